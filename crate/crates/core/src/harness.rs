//! Two-stage evaluation: train a model on condensed or selected data, then
//! infer on the full original graph. Repeated trials with independent seed
//! streams, cross-architecture matrices, and plain-text reports with a
//! machine-readable block.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::condense::{condense, finalize, CondenseConfig, CondensedGraph, Variant};
use crate::coresets::Selection;
use crate::error::{Error, Result};
use crate::graph::{graph_stats, induced_subgraph, Csr, GraphStats, Masks, SparseGraph};
use crate::models::{
    accuracy, init_params, predict, train, Arch, GraphCtx, ModelSpec, TrainData, ValContext,
};
use crate::ndtape::Matrix;

/// Evaluation-stage hyperparameters: 600 epochs of lr 0.01 full-batch
/// descent, weight decay 5e-4, dropout 0, best-validation checkpointing.
pub fn eval_spec(arch: Arch) -> ModelSpec {
    let mut spec = ModelSpec::new(arch);
    spec.weight_decay = 5e-4;
    spec.dropout = 0.0;
    spec
}

pub const EVAL_EPOCHS: usize = 600;
pub const EVAL_LR: f64 = 0.01;
pub const VAL_EVERY: usize = 10;

/// What the training stage sees.
pub struct TrainPackage {
    pub ctx: GraphCtx,
    pub features: Matrix,
    pub labels: Vec<i64>,
    pub train_idx: Vec<usize>,
    /// True when the training adjacency is the identity (feature-only
    /// variants); instrumentation for the invariant that those variants
    /// never read learned structure.
    pub identity_training: bool,
    pub stats: Option<GraphStats>,
}

/// Training data from a finalized condensed graph. Feature-only variants
/// train with the identity structure; the materialized adjacency is only
/// consulted for `Gcond`.
pub fn package_condensed(cond: &CondensedGraph) -> Result<TrainPackage> {
    let adj = cond
        .adjacency
        .as_ref()
        .ok_or_else(|| Error::Validation("condensed graph not finalized".into()))?;
    let identity_training = !cond.variant.learns_structure();
    let ctx = if identity_training {
        GraphCtx::identity()
    } else {
        GraphCtx::from_dense(adj)?
    };
    let stats = Some(condensed_stats(cond)?);
    Ok(TrainPackage {
        ctx,
        features: cond.features.clone(),
        labels: cond.labels.clone(),
        train_idx: (0..cond.n()).collect(),
        identity_training,
        stats,
    })
}

/// Training data from a coreset selection: the induced subgraph on the
/// selected nodes, all of them labeled.
pub fn package_selection(graph: &SparseGraph, sel: &Selection) -> Result<TrainPackage> {
    let sub = induced_subgraph(graph, &sel.node_ids)?;
    let stats = graph_stats(&sub.adj, &sub.labels, sub.dim(), 0.5);
    Ok(TrainPackage {
        ctx: GraphCtx::from_graph(&sub)?,
        features: sub.features,
        labels: sub.labels,
        train_idx: (0..sel.node_ids.len()).collect(),
        identity_training: false,
        stats: Some(stats),
    })
}

/// Stats of the materialized condensed adjacency (binarized at 0.5 for
/// homophily, all retained weights counted for storage).
pub fn condensed_stats(cond: &CondensedGraph) -> Result<GraphStats> {
    let adj = cond
        .adjacency
        .as_ref()
        .ok_or_else(|| Error::Validation("condensed graph not finalized".into()))?;
    let n = cond.n();
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = adj.get(i, j);
            if v > 0.0 && i != j {
                triplets.push((i, j, v));
            }
        }
    }
    let csr = Csr::from_triplets(n, n, &triplets)?;
    Ok(graph_stats(&csr, &cond.labels, cond.features.cols, 0.5))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    pub n_prime: usize,
    pub ratio: f64,
    pub eval_arch: Arch,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub identity_training: bool,
    pub stats: Option<GraphStats>,
    pub seconds: f64,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Train on `package` and test on the full original graph, `repeats` times
/// with independent parameter seeds. Validation (for checkpointing) and the
/// final test accuracy both come from full-graph inference.
pub fn evaluate(
    package: &TrainPackage,
    graph: &SparseGraph,
    arch: Arch,
    repeats: usize,
    seed: u64,
    method: &str,
    dataset: &str,
) -> Result<EvalReport> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    if package.features.cols != graph.dim() {
        return Err(Error::Dimension(format!(
            "condensed feature dim {} != dataset dim {}",
            package.features.cols,
            graph.dim()
        )));
    }
    let spec = eval_spec(arch);
    let full_ctx = GraphCtx::from_graph(graph)?;
    let val_idx = Masks::indices(&graph.masks.val);
    let test_idx = Masks::indices(&graph.masks.test);
    let start = Instant::now();

    let accuracies: Vec<f64> = (0..repeats)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let rep_seed = seed.wrapping_add(rep as u64);
            let mut params = init_params(&spec, graph.dim(), graph.num_classes, rep_seed);
            let data = TrainData {
                ctx: &package.ctx,
                features: &package.features,
                labels: &package.labels,
                train_idx: &package.train_idx,
            };
            let val = ValContext {
                ctx: &full_ctx,
                features: &graph.features,
                labels: &graph.labels,
                val_idx: &val_idx,
                every: VAL_EVERY,
            };
            train(
                &spec,
                &mut params,
                &data,
                EVAL_EPOCHS,
                EVAL_LR,
                Some(&val),
                rep_seed,
            )?;
            let logits = predict(&spec, &params, &full_ctx, &graph.features)?;
            Ok(accuracy(&logits, &graph.labels, &test_idx))
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mean, std) = mean_std(&accuracies);
    Ok(EvalReport {
        method: method.to_string(),
        dataset: dataset.to_string(),
        n_prime: package.train_idx.len(),
        ratio: package.train_idx.len() as f64 / graph.n() as f64,
        eval_arch: arch,
        accuracies,
        mean,
        std,
        identity_training: package.identity_training,
        stats: package.stats.clone(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// One condensation per condensation architecture, each evaluated with
/// every evaluation architecture. Returns row-major reports, rows indexed
/// by condensation arch.
pub fn cross_architecture(
    graph: &SparseGraph,
    base: &CondenseConfig,
    condense_archs: &[Arch],
    eval_archs: &[Arch],
    variant: Variant,
    repeats: usize,
    dataset: &str,
) -> Result<Vec<Vec<EvalReport>>> {
    let mut rows = Vec::new();
    for &carch in condense_archs {
        let mut config = base.clone();
        config.arch = carch;
        let outcome = condense(graph, &config, variant)?;
        let cond = finalize(outcome.condensed)?;
        let package = package_condensed(&cond)?;
        let mut row = Vec::new();
        for &earch in eval_archs {
            let method = format!("{}/{}", variant.name(), carch.name());
            row.push(evaluate(
                &package,
                graph,
                earch,
                repeats,
                base.seed,
                &method,
                dataset,
            )?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Human-readable table plus a fenced `key=value` block for scripting.
pub fn report(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<18} {:<12} {:>6} {:>8} {:>6}  {:>12}\n",
        "method", "dataset", "n'", "ratio%", "arch", "acc (mean±std)"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<18} {:<12} {:>6} {:>8.2} {:>6}  {:>7.1}±{:.1}\n",
            r.method,
            r.dataset,
            r.n_prime,
            100.0 * r.ratio,
            r.eval_arch.name(),
            100.0 * r.mean,
            100.0 * r.std
        ));
    }
    for r in reports {
        if let Some(s) = &r.stats {
            out.push_str(&format!(
                "{:<18} {:<12} edges={} sparsity={:.2}% homophily={:.2} storage={:.2}MB\n",
                r.method,
                r.dataset,
                s.edges,
                s.sparsity_pct,
                s.homophily,
                s.storage_bytes as f64 / 1e6
            ));
        }
    }
    out.push_str("```\n");
    for (i, r) in reports.iter().enumerate() {
        let accs: Vec<String> = r.accuracies.iter().map(|a| format!("{:.6}", a)).collect();
        out.push_str(&format!("report.{}.method={}\n", i, r.method));
        out.push_str(&format!("report.{}.dataset={}\n", i, r.dataset));
        out.push_str(&format!("report.{}.n_prime={}\n", i, r.n_prime));
        out.push_str(&format!("report.{}.ratio={:.6}\n", i, r.ratio));
        out.push_str(&format!("report.{}.eval_arch={}\n", i, r.eval_arch.name()));
        out.push_str(&format!("report.{}.accuracies={}\n", i, accs.join(",")));
        out.push_str(&format!("report.{}.mean={:.6}\n", i, r.mean));
        out.push_str(&format!("report.{}.std={:.6}\n", i, r.std));
        out.push_str(&format!(
            "report.{}.identity_training={}\n",
            i, r.identity_training
        ));
        out.push_str(&format!("report.{}.seconds={:.3}\n", i, r.seconds));
        if let Some(s) = &r.stats {
            out.push_str(&format!("report.{}.edges={}\n", i, s.edges));
            out.push_str(&format!("report.{}.sparsity_pct={:.4}\n", i, s.sparsity_pct));
            out.push_str(&format!("report.{}.homophily={:.4}\n", i, s.homophily));
            out.push_str(&format!("report.{}.storage_bytes={}\n", i, s.storage_bytes));
        }
    }
    out.push_str("```\n");
    out
}

pub fn write_report(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Training package from the original graph's own train split — the
/// whole-dataset reference point.
pub fn package_full(graph: &SparseGraph) -> Result<TrainPackage> {
    Ok(TrainPackage {
        ctx: GraphCtx::from_graph(graph)?,
        features: graph.features.clone(),
        labels: graph.labels.clone(),
        train_idx: Masks::indices(&graph.masks.train),
        identity_training: false,
        stats: None,
    })
}

//! Gradient-matching condensation: the matching distance, the structure
//! generator, the nested optimization loops with alternating updates,
//! sparsification, and the feature-only variants.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, normalize_sym, sample_class_batch, SparseGraph};
use crate::models::{
    init_params, inner_param_grads, params_to_vars, train, AdjRef, Arch, GraphCtx, ModelParams,
    ModelSpec, ParamVars, TrainData,
};
use crate::ndtape::{Matrix, Tape, Var};

/// Condensation variants. `GcondX` learns features only and trains with an
/// identity structure; `DcGraph` additionally ignores the real adjacency
/// during condensation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    Gcond,
    GcondX,
    DcGraph,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "gcond" => Ok(Variant::Gcond),
            "gcond-x" | "gcondx" => Ok(Variant::GcondX),
            "dc-graph" | "dcgraph" => Ok(Variant::DcGraph),
            other => Err(Error::Config(format!("unknown method '{}'", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Gcond => "gcond",
            Variant::GcondX => "gcond-x",
            Variant::DcGraph => "dc-graph",
        }
    }

    pub fn learns_structure(&self) -> bool {
        matches!(self, Variant::Gcond)
    }
}

/// Learned synthetic graph: features X', structure generator parameters Phi,
/// fixed labels Y', and (after [`finalize`]) the materialized adjacency.
#[derive(Debug, Clone)]
pub struct CondensedGraph {
    pub features: Matrix,
    pub phi: ModelParams,
    pub labels: Vec<i64>,
    pub num_classes: usize,
    pub delta: f64,
    pub variant: Variant,
    pub adjacency: Option<Matrix>,
}

impl CondensedGraph {
    pub fn n(&self) -> usize {
        self.features.rows
    }

    pub fn class_indices(&self, class_id: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &y)| (y == class_id as i64).then_some(i))
            .collect()
    }
}

/// Full configuration of one condensation run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CondenseConfig {
    /// Synthetic-to-original node ratio; exactly one of `ratio`/`nodes`.
    pub ratio: Option<f64>,
    pub nodes: Option<usize>,
    /// Outer model initializations (K).
    pub outer_loops: usize,
    /// Inner iterations per initialization (T).
    pub inner_loops: usize,
    /// Structure-generator epochs per alternation block (tau_1).
    pub tau_phi: usize,
    /// Feature epochs per alternation block (tau_2).
    pub tau_feat: usize,
    /// Model refresh steps per iteration (tau_theta).
    pub tau_theta: usize,
    /// Feature learning rate (eta_1).
    pub lr_feat: f64,
    /// Structure-generator learning rate (eta_2).
    pub lr_phi: f64,
    pub lr_theta: f64,
    pub batch_size: usize,
    pub fanout: usize,
    pub arch: Arch,
    pub hidden: usize,
    pub gphi_layers: usize,
    pub gphi_hidden: usize,
    pub delta: f64,
    pub seed: u64,
    /// Update X' and Phi together every iteration instead of alternating.
    pub joint_opt: bool,
}

impl Default for CondenseConfig {
    fn default() -> Self {
        CondenseConfig {
            ratio: None,
            nodes: None,
            outer_loops: 10,
            inner_loops: 50,
            tau_phi: 10,
            tau_feat: 1,
            tau_theta: 50,
            lr_feat: 0.01,
            lr_phi: 0.01,
            lr_theta: 0.01,
            batch_size: 256,
            fanout: 5,
            arch: Arch::Sgc,
            hidden: 256,
            gphi_layers: 3,
            gphi_hidden: 128,
            delta: 0.05,
            seed: 0,
            joint_opt: false,
        }
    }
}

impl CondenseConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.ratio, self.nodes) {
            (Some(r), None) if r > 0.0 && r < 1.0 => {}
            (None, Some(n)) if n >= 1 => {}
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "--ratio and --nodes are mutually exclusive".into(),
                ))
            }
            _ => return Err(Error::Config("need --ratio in (0,1) or --nodes >= 1".into())),
        }
        if !matches!(self.arch, Arch::Sgc | Arch::Gcn) {
            return Err(Error::Config(
                "condensation model must be sgc or gcn".into(),
            ));
        }
        for (name, v) in [
            ("outer_loops", self.outer_loops),
            ("inner_loops", self.inner_loops),
            ("tau_phi", self.tau_phi),
            ("tau_theta", self.tau_theta),
            ("batch_size", self.batch_size),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{} must be >= 1", name)));
            }
        }
        Ok(())
    }

    pub fn resolved_nodes(&self, graph_n: usize) -> usize {
        match (self.nodes, self.ratio) {
            (Some(n), _) => n,
            (None, Some(r)) => ((r * graph_n as f64).round() as usize).max(1),
            _ => 1,
        }
    }

    pub fn model_spec(&self) -> ModelSpec {
        let mut spec = ModelSpec::new(self.arch);
        spec.hidden = self.hidden;
        spec.layers = 2;
        spec.k_prop = 2;
        // weight decay and dropout are zero during condensation
        spec.weight_decay = 0.0;
        spec.dropout = 0.0;
        spec
    }

    fn gphi_spec(&self) -> ModelSpec {
        let mut spec = ModelSpec::new(Arch::Mlp);
        spec.layers = self.gphi_layers + 1;
        spec.hidden = self.gphi_hidden;
        spec
    }

    /// Number of aggregation hops the real-side sampler must cover.
    fn hops(&self) -> usize {
        match self.arch {
            Arch::Sgc => 2,
            _ => 2,
        }
    }
}

/// Sum over parameter tensors of the per-column cosine matching distance.
/// The real-side gradients are constants; no gradient flows into them.
pub fn match_distance(tape: &mut Tape, synthetic: Var, real: Arc<Matrix>) -> Result<Var> {
    tape.cosine_col_distance(synthetic, real)
}

/// Pairwise structure generator: A'_ij = sigmoid((mlp([x_i;x_j]) +
/// mlp([x_j;x_i])) / 2). Symmetric by construction and differentiable in
/// both Phi and X'.
pub fn gphi_forward(tape: &mut Tape, phi: &ParamVars, x: Var) -> Result<Var> {
    let (n, _) = tape.shape(x);
    let mut idx_i = Vec::with_capacity(n * n);
    let mut idx_j = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            idx_i.push(i);
            idx_j.push(j);
        }
    }
    let xi = tape.gather_rows(x, Arc::new(idx_i))?;
    let xj = tape.gather_rows(x, Arc::new(idx_j))?;
    let mut h = tape.hconcat(xi, xj)?;
    for (l, (w, b)) in phi.layers.iter().enumerate() {
        let z = tape.matmul(h, *w)?;
        let z = tape.add_row_vec(z, *b)?;
        h = if l + 1 < phi.layers.len() { tape.relu(z) } else { z };
    }
    let m = tape.reshape(h, n, n)?;
    let mt = tape.transpose(m);
    let s = tape.add(m, mt)?;
    let s = tape.scale(s, 0.5);
    Ok(tape.sigmoid(s))
}

/// Symmetric normalization of a dense adjacency expression with self loops,
/// as a differentiable tape computation.
fn normalize_dense_on_tape(tape: &mut Tape, adj: Var) -> Result<Var> {
    let (n, _) = tape.shape(adj);
    let eye = tape.constant(Matrix::identity(n));
    let with_loops = tape.add(adj, eye)?;
    let deg = tape.row_sum(with_loops);
    let dinv = tape.rsqrt_or_zero(deg);
    let dinv_row = tape.transpose(dinv);
    let scaled = tape.mul_col_vec(with_loops, dinv)?;
    tape.mul_row_vec(scaled, dinv_row)
}

/// Per-class synthetic node counts via largest remainder over the train
/// label distribution, each class clipped to at least one node.
pub fn class_allocation(train_counts: &[usize], n_prime: usize) -> Result<Vec<usize>> {
    let classes = train_counts.len();
    let active = train_counts.iter().filter(|&&c| c > 0).count();
    if n_prime < active {
        return Err(Error::Config(format!(
            "{} synthetic nodes cannot cover {} classes",
            n_prime, active
        )));
    }
    let total: usize = train_counts.iter().sum();
    if total == 0 {
        return Err(Error::Validation("no labeled train nodes".into()));
    }
    let mut counts = vec![0usize; classes];
    let mut remainders: Vec<(usize, f64)> = Vec::new();
    let mut assigned = 0usize;
    for c in 0..classes {
        if train_counts[c] == 0 {
            continue;
        }
        let share = n_prime as f64 * train_counts[c] as f64 / total as f64;
        counts[c] = (share.floor() as usize).max(1);
        assigned += counts[c];
        remainders.push((c, share - share.floor()));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut i = 0;
    while assigned < n_prime {
        let c = remainders[i % remainders.len()].0;
        counts[c] += 1;
        assigned += 1;
        i += 1;
    }
    // over-assignment can only come from the >=1 clipping; take back from
    // the largest classes
    while assigned > n_prime {
        let c = (0..classes)
            .filter(|&c| counts[c] > 1)
            .max_by_key(|&c| counts[c])
            .ok_or_else(|| Error::Config("cannot satisfy per-class minimum".into()))?;
        counts[c] -= 1;
        assigned -= 1;
    }
    Ok(counts)
}

/// Initialize the condensed graph: labels fixed to the train distribution,
/// features copied from randomly selected train nodes of each class.
pub fn init_condensed(
    graph: &SparseGraph,
    config: &CondenseConfig,
    variant: Variant,
) -> Result<CondensedGraph> {
    config.validate()?;
    let n_prime = config.resolved_nodes(graph.n());
    let counts = class_allocation(&graph.train_class_counts(), n_prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut labels = Vec::with_capacity(n_prime);
    let mut features = Matrix::zeros(n_prime, graph.dim());
    let mut row = 0usize;
    for (c, &k) in counts.iter().enumerate() {
        let members = graph.train_nodes_of_class(c);
        let picks = sample_distinct(&mut rng, members.len(), k);
        for p in picks {
            features.data[row * graph.dim()..(row + 1) * graph.dim()]
                .copy_from_slice(graph.features.row(members[p]));
            labels.push(c as i64);
            row += 1;
        }
    }
    let gphi = init_params(
        &config.gphi_spec(),
        2 * graph.dim(),
        1,
        config.seed.wrapping_add(0x9e3779b97f4a7c15),
    );
    Ok(CondensedGraph {
        features,
        phi: gphi,
        labels,
        num_classes: graph.num_classes,
        delta: config.delta,
        variant,
        adjacency: None,
    })
}

/// `k` draws from `0..len`, without replacement while `k <= len`, with
/// replacement for the overflow.
fn sample_distinct(rng: &mut ChaCha8Rng, len: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..len).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(len) {
        let i = rng.gen_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    for _ in len..k {
        out.push(rng.gen_range(0..len));
    }
    out
}

/// Adam state for one parameter matrix.
pub struct Adam {
    m: Matrix,
    v: Matrix,
    t: usize,
    pub lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    pub fn new(rows: usize, cols: usize, lr: f64) -> Adam {
        Adam {
            m: Matrix::zeros(rows, cols),
            v: Matrix::zeros(rows, cols),
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&mut self, param: &mut Matrix, grad: &Matrix) {
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..param.data.len() {
            let g = grad.data[k];
            self.m.data[k] = self.beta1 * self.m.data[k] + (1.0 - self.beta1) * g;
            self.v.data[k] = self.beta2 * self.v.data[k] + (1.0 - self.beta2) * g * g;
            let mhat = self.m.data[k] / b1t;
            let vhat = self.v.data[k] / b2t;
            param.data[k] -= self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

pub struct RealSide {
    /// Per parameter tensor, detached.
    pub grads: Vec<Arc<Matrix>>,
}

/// Real-side gradients for one class batch, computed on a scratch tape with
/// everything constant.
fn real_side_grads(
    graph: &SparseGraph,
    spec: &ModelSpec,
    theta: &ModelParams,
    config: &CondenseConfig,
    variant: Variant,
    class_id: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RealSide> {
    let use_structure = !matches!(variant, Variant::DcGraph);
    let hops = if use_structure { config.hops() } else { 0 };
    let batch = sample_class_batch(graph, class_id, config.batch_size, config.fanout, hops, rng)?;
    let sub = induced_subgraph(graph, &batch.closure)?;
    // positions of the batch nodes inside the closure ordering
    let local: Vec<usize> = batch
        .node_ids
        .iter()
        .map(|id| batch.closure.binary_search(id).unwrap())
        .collect();
    let labels = vec![class_id; local.len()];

    let mut tape = Tape::new();
    let x = tape.constant(sub.features.clone());
    let adj = if use_structure {
        let norm = normalize_sym(&sub.adj, true)?;
        AdjRef::Sparse(Arc::new(norm))
    } else {
        AdjRef::Identity
    };
    let vars = params_to_vars(&mut tape, theta, false);
    let grads = inner_param_grads(&mut tape, spec, &vars, adj, x, &labels, &local)?;
    Ok(RealSide {
        grads: grads
            .into_iter()
            .map(|v| Arc::new(tape.value(v).clone()))
            .collect(),
    })
}

/// One gradient-matching pass: builds the loss on `tape` and returns it with
/// the synthetic leaves, so the caller can backpropagate and update.
struct MatchingPass {
    loss: Var,
    x_leaf: Var,
    phi_leaves: Vec<(Var, Var)>,
}

fn matching_pass(
    tape: &mut Tape,
    cond: &CondensedGraph,
    spec: &ModelSpec,
    theta: &ModelParams,
    real: &[Option<RealSide>],
) -> Result<MatchingPass> {
    let x_leaf = tape.leaf(cond.features.clone());
    let (adj, phi_leaves) = if cond.variant.learns_structure() {
        let phi_vars = params_to_vars(tape, &cond.phi, true);
        let a_raw = gphi_forward(tape, &phi_vars, x_leaf)?;
        let a_norm = normalize_dense_on_tape(tape, a_raw)?;
        (AdjRef::Dense(a_norm), phi_vars.layers)
    } else {
        (AdjRef::Identity, Vec::new())
    };
    let theta_vars = params_to_vars(tape, theta, false);
    let mut loss: Option<Var> = None;
    for (c, side) in real.iter().enumerate() {
        let side = match side {
            Some(s) => s,
            None => continue,
        };
        let batch = cond.class_indices(c);
        let labels = vec![c; batch.len()];
        let g_syn =
            inner_param_grads(tape, spec, &theta_vars, adj.clone(), x_leaf, &labels, &batch)?;
        for (gs, gt) in g_syn.iter().zip(&side.grads) {
            let d = match_distance(tape, *gs, Arc::clone(gt))?;
            loss = Some(match loss {
                Some(l) => tape.add(l, d)?,
                None => d,
            });
        }
    }
    let loss = loss.ok_or_else(|| Error::Validation("no classes to match".into()))?;
    Ok(MatchingPass {
        loss,
        x_leaf,
        phi_leaves,
    })
}

/// Serial matching-loss value for fixed synthetic data and model parameters.
pub fn matching_loss_serial(
    cond: &CondensedGraph,
    spec: &ModelSpec,
    theta: &ModelParams,
    real: &[Option<RealSide>],
) -> Result<f64> {
    let mut tape = Tape::new();
    let pass = matching_pass(&mut tape, cond, spec, theta, real)?;
    Ok(tape.value(pass.loss).data[0])
}

/// Per-class-parallel matching loss; each class term is computed on its own
/// tape and the terms are summed in class order.
pub fn matching_loss_parallel(
    cond: &CondensedGraph,
    spec: &ModelSpec,
    theta: &ModelParams,
    real: &[Option<RealSide>],
) -> Result<f64> {
    let terms: Vec<Result<f64>> = (0..real.len())
        .into_par_iter()
        .map(|c| {
            let mut one: Vec<Option<RealSide>> = (0..real.len()).map(|_| None).collect();
            match &real[c] {
                Some(s) => {
                    one[c] = Some(RealSide {
                        grads: s.grads.clone(),
                    });
                    let mut tape = Tape::new();
                    let pass = matching_pass(&mut tape, cond, spec, theta, &one)?;
                    Ok(tape.value(pass.loss).data[0])
                }
                None => Ok(0.0),
            }
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// Sample the real side for every class present in the train split.
pub fn sample_real_sides(
    graph: &SparseGraph,
    spec: &ModelSpec,
    theta: &ModelParams,
    config: &CondenseConfig,
    variant: Variant,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Option<RealSide>>> {
    let counts = graph.train_class_counts();
    let mut out = Vec::with_capacity(counts.len());
    for (c, &k) in counts.iter().enumerate() {
        if k == 0 {
            out.push(None);
        } else {
            out.push(Some(real_side_grads(
                graph, spec, theta, config, variant, c, rng,
            )?));
        }
    }
    Ok(out)
}

pub struct CondenseOutcome {
    pub condensed: CondensedGraph,
    /// Total matching loss per inner iteration, across all outer loops.
    pub loss_trace: Vec<f64>,
}

/// Run the full condensation: K outer initializations, T inner iterations
/// of per-class gradient matching with alternating feature/structure
/// updates and model refresh in between.
pub fn condense(
    graph: &SparseGraph,
    config: &CondenseConfig,
    variant: Variant,
) -> Result<CondenseOutcome> {
    graph.validate()?;
    let mut cond = init_condensed(graph, config, variant)?;
    let spec = config.model_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));

    let mut adam_x = Adam::new(cond.features.rows, cond.features.cols, config.lr_feat);
    let mut adam_phi: Vec<(Adam, Adam)> = cond
        .phi
        .layers
        .iter()
        .map(|l| {
            (
                Adam::new(l.w.rows, l.w.cols, config.lr_phi),
                Adam::new(l.b.rows, l.b.cols, config.lr_phi),
            )
        })
        .collect();

    let d = graph.dim();
    let all_syn_idx: Vec<usize> = (0..cond.n()).collect();
    let mut trace = Vec::new();

    for outer in 0..config.outer_loops {
        let theta_seed = config.seed.wrapping_add(1000).wrapping_add(outer as u64);
        let mut theta = init_params(&spec, d, graph.num_classes, theta_seed);

        for t in 0..config.inner_loops {
            let real = sample_real_sides(graph, &spec, &theta, config, variant, &mut rng)?;

            let mut tape = Tape::new();
            let pass = matching_pass(&mut tape, &cond, &spec, &theta, &real)?;
            let loss_val = tape.value(pass.loss).data[0];
            if !loss_val.is_finite() {
                return Err(Error::Diverged {
                    iteration: outer * config.inner_loops + t,
                    message: format!("matching loss {}", loss_val),
                });
            }
            trace.push(loss_val);
            let grads = tape.backward(pass.loss)?;

            let update_phi = cond.variant.learns_structure()
                && (config.joint_opt
                    || t % (config.tau_phi + config.tau_feat) < config.tau_phi);
            let update_feat = !cond.variant.learns_structure()
                || config.joint_opt
                || !(t % (config.tau_phi + config.tau_feat) < config.tau_phi);

            if update_phi {
                for ((lp, (wv, bv)), (aw, ab)) in cond
                    .phi
                    .layers
                    .iter_mut()
                    .zip(&pass.phi_leaves)
                    .zip(adam_phi.iter_mut())
                {
                    aw.step(&mut lp.w, &grads.get(&tape, *wv));
                    ab.step(&mut lp.b, &grads.get(&tape, *bv));
                }
            }
            if update_feat {
                adam_x.step(&mut cond.features, &grads.get(&tape, pass.x_leaf));
            }

            // refresh theta on the current synthetic data
            let theta_ctx = if cond.variant.learns_structure() {
                let adj = materialize_adjacency(&cond, 0.0)?;
                GraphCtx::from_dense(&adj)?
            } else {
                GraphCtx::identity()
            };
            let data = TrainData {
                ctx: &theta_ctx,
                features: &cond.features,
                labels: &cond.labels,
                train_idx: &all_syn_idx,
            };
            train(
                &spec,
                &mut theta,
                &data,
                config.tau_theta,
                config.lr_theta,
                None,
                theta_seed.wrapping_add(t as u64),
            )?;
        }
    }
    Ok(CondenseOutcome {
        condensed: cond,
        loss_trace: trace,
    })
}

/// Evaluate the structure generator and zero entries at or below `delta`.
pub fn materialize_adjacency(cond: &CondensedGraph, delta: f64) -> Result<Matrix> {
    if !cond.variant.learns_structure() {
        return Ok(Matrix::identity(cond.n()));
    }
    let mut tape = Tape::new();
    let x = tape.constant(cond.features.clone());
    let phi = params_to_vars(&mut tape, &cond.phi, false);
    let a = gphi_forward(&mut tape, &phi, x)?;
    let mut m = tape.value(a).clone();
    for v in m.data.iter_mut() {
        if *v <= delta {
            *v = 0.0;
        }
    }
    Ok(m)
}

/// Materialize the sparsified adjacency into the condensed graph.
pub fn finalize(mut cond: CondensedGraph) -> Result<CondensedGraph> {
    let adj = materialize_adjacency(&cond, cond.delta)?;
    cond.adjacency = Some(adj);
    Ok(cond)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndtape::grad_check;

    fn toy_phi(d: usize, seed: u64) -> ModelParams {
        let mut spec = ModelSpec::new(Arch::Mlp);
        spec.layers = 2;
        spec.hidden = 4;
        init_params(&spec, 2 * d, 1, seed)
    }

    #[test]
    fn match_distance_identical_and_antiparallel() {
        let g = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -1.0]]);
        let mut tape = Tape::new();
        let v = tape.leaf(g.clone());
        let d = match_distance(&mut tape, v, Arc::new(g.clone())).unwrap();
        assert!(tape.value(d).data[0].abs() < 1e-12);

        let mut tape = Tape::new();
        let v = tape.leaf(g.clone());
        let d = match_distance(&mut tape, v, Arc::new(g.map(|x| -x))).unwrap();
        assert!((tape.value(d).data[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gphi_output_symmetric_and_zero_phi_gives_half() {
        let d = 3;
        let n = 4;
        let x = Matrix::new(n, d, (0..n * d).map(|k| (k as f64) * 0.1 - 0.5).collect());
        let phi = toy_phi(d, 5);
        let mut tape = Tape::new();
        let xv = tape.constant(x.clone());
        let pv = params_to_vars(&mut tape, &phi, false);
        let a = gphi_forward(&mut tape, &pv, xv).unwrap();
        let av = tape.value(a);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(av.get(i, j), av.get(j, i), "exact symmetry");
            }
        }

        let mut zero_phi = toy_phi(d, 5);
        for l in zero_phi.layers.iter_mut() {
            l.w = Matrix::zeros(l.w.rows, l.w.cols);
            l.b = Matrix::zeros(l.b.rows, l.b.cols);
        }
        let mut tape = Tape::new();
        let xv = tape.constant(x);
        let pv = params_to_vars(&mut tape, &zero_phi, false);
        let a = gphi_forward(&mut tape, &pv, xv).unwrap();
        assert!(tape.value(a).data.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn gphi_gradient_wrt_features() {
        let d = 2;
        let n = 3;
        let phi = toy_phi(d, 9);
        let x = Matrix::new(n, d, vec![0.3, -0.1, 0.7, 0.2, -0.4, 0.5]);
        let err = grad_check(
            |tape, xv| {
                let pv = params_to_vars(tape, &phi, false);
                let a = gphi_forward(tape, &pv, xv)?;
                Ok(tape.sum_all(a))
            },
            &x,
            1e-6,
        )
        .unwrap();
        assert!(err < 1e-6, "err = {}", err);
    }

    #[test]
    fn allocation_largest_remainder() {
        // {90, 10} at N'=10 -> {9, 1}
        assert_eq!(class_allocation(&[90, 10], 10).unwrap(), vec![9, 1]);
        // full ratio keeps the original counts
        assert_eq!(class_allocation(&[90, 10], 100).unwrap(), vec![90, 10]);
        // minimum one per class
        assert_eq!(class_allocation(&[97, 2, 1], 3).unwrap(), vec![1, 1, 1]);
        // total preserved
        let c = class_allocation(&[30, 20, 7], 11).unwrap();
        assert_eq!(c.iter().sum::<usize>(), 11);
        assert!(c.iter().all(|&k| k >= 1));
    }

    #[test]
    fn allocation_infeasible() {
        assert!(class_allocation(&[5, 5, 5], 2).is_err());
    }

    #[test]
    fn adam_moves_against_gradient() {
        let mut p = Matrix::filled(1, 1, 1.0);
        let mut opt = Adam::new(1, 1, 0.1);
        for _ in 0..100 {
            let g = Matrix::new(1, 1, vec![2.0 * p.data[0]]);
            opt.step(&mut p, &g);
        }
        assert!(p.data[0].abs() < 0.2, "did not descend: {}", p.data[0]);
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graph_condense::condense::{condense, finalize, CondenseConfig, Variant};
use graph_condense::coresets::{select, CoresetMethod};
use graph_condense::dataio::{
    gen_synthetic, load_condensed, load_dataset, save_condensed, save_dataset,
};
use graph_condense::error::{Error, Result};
use graph_condense::graph::graph_stats;
use graph_condense::harness::{
    cross_architecture, evaluate, package_condensed, package_selection, report, write_report,
};
use graph_condense::models::Arch;

#[derive(Parser)]
#[command(
    name = "graph-condense",
    about = "Condense attributed graphs into small synthetic graphs by gradient matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SizeArgs {
    /// Synthetic-to-original node ratio in (0,1); exclusive with --nodes.
    #[arg(long)]
    ratio: Option<f64>,
    /// Explicit synthetic node count; exclusive with --ratio.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a condensed graph from a dataset directory.
    Condense {
        #[arg(long)]
        dataset: PathBuf,
        /// gcond | gcond-x | dc-graph
        #[arg(long, default_value = "gcond")]
        method: String,
        #[command(flatten)]
        size: SizeArgs,
        /// Condensation model: sgc | gcn
        #[arg(long, default_value = "sgc")]
        arch: String,
        /// Inner iterations per initialization (T).
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        /// Outer model initializations (K).
        #[arg(long, default_value_t = 10)]
        outer: usize,
        /// Structure-generator epochs per alternation block.
        #[arg(long, default_value_t = 10)]
        tau1: usize,
        /// Feature epochs per alternation block.
        #[arg(long, default_value_t = 1)]
        tau2: usize,
        /// Model refresh steps per iteration.
        #[arg(long, default_value_t = 50)]
        tau_theta: usize,
        #[arg(long, default_value_t = 0.01)]
        lr_feat: f64,
        #[arg(long, default_value_t = 0.01)]
        lr_phi: f64,
        #[arg(long, default_value_t = 0.01)]
        lr_theta: f64,
        /// Sparsification threshold for the final adjacency.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 256)]
        batch_size: usize,
        #[arg(long, default_value_t = 5)]
        fanout: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select a coreset of real training nodes.
    Select {
        #[arg(long)]
        dataset: PathBuf,
        /// random | herding | kcenter
        #[arg(long, default_value = "herding")]
        method: String,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file: one selected node id per line.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a condensed artifact or selection, test on the full graph.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        condensed: Option<PathBuf>,
        /// Selection file from `select`; exclusive with --condensed.
        #[arg(long)]
        selection: Option<PathBuf>,
        /// gcn | sgc | appnp | sage | mlp
        #[arg(long, default_value = "gcn")]
        model: String,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Condense with several architectures and evaluate each with several.
    CrossEval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "sgc")]
        condense_archs: String,
        #[arg(long, default_value = "gcn,sgc,appnp,sage,mlp")]
        eval_archs: String,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, default_value = "gcond")]
        method: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print edge/sparsity/homophily/storage statistics.
    Stats {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        condensed: Option<PathBuf>,
    },
    /// Generate a stochastic-block-model dataset directory.
    GenSynth {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        #[arg(long, default_value_t = 0.3)]
        p_in: f64,
        #[arg(long, default_value_t = 0.02)]
        p_out: f64,
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "synthetic")]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_size(size: &SizeArgs) -> Result<(Option<f64>, Option<usize>)> {
    match (size.ratio, size.nodes) {
        (Some(_), Some(_)) => Err(Error::Config(
            "--ratio and --nodes are mutually exclusive".into(),
        )),
        (None, None) => Err(Error::Config("one of --ratio or --nodes is required".into())),
        (r, n) => Ok((r, n)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Condense {
            dataset,
            method,
            size,
            arch,
            epochs,
            outer,
            tau1,
            tau2,
            tau_theta,
            lr_feat,
            lr_phi,
            lr_theta,
            delta,
            batch_size,
            fanout,
            seed,
            out,
        } => {
            let (ratio, nodes) = resolve_size(&size)?;
            let variant = Variant::parse(&method)?;
            let config = CondenseConfig {
                ratio,
                nodes,
                outer_loops: outer,
                inner_loops: epochs,
                tau_phi: tau1,
                tau_feat: tau2,
                tau_theta,
                lr_feat,
                lr_phi,
                lr_theta,
                batch_size,
                fanout,
                arch: Arch::parse(&arch)?,
                delta,
                seed,
                ..CondenseConfig::default()
            };
            config.validate()?;
            eprintln!(
                "config: {}",
                serde_json::to_string(&config).expect("config serializes")
            );
            let graph = load_dataset(&dataset)?;
            let outcome = condense(&graph, &config, variant)?;
            let cond = finalize(outcome.condensed)?;
            save_condensed(&out, &cond, &config)?;
            let first = outcome.loss_trace.first().copied().unwrap_or(0.0);
            let last = outcome.loss_trace.last().copied().unwrap_or(0.0);
            println!(
                "condensed {} nodes -> {} ({}); matching loss {:.4} -> {:.4}",
                graph.n(),
                cond.n(),
                variant.name(),
                first,
                last
            );
            Ok(())
        }
        Command::Select {
            dataset,
            method,
            size,
            seed,
            out,
        } => {
            let (ratio, nodes) = resolve_size(&size)?;
            let graph = load_dataset(&dataset)?;
            let n_prime = match (nodes, ratio) {
                (Some(n), _) => n,
                (None, Some(r)) => ((r * graph.n() as f64).round() as usize).max(1),
                _ => unreachable!(),
            };
            let sel = select(&graph, CoresetMethod::parse(&method)?, n_prime, seed)?;
            let mut text = String::new();
            for id in &sel.node_ids {
                text.push_str(&id.to_string());
                text.push('\n');
            }
            std::fs::write(&out, text).map_err(|e| Error::Io {
                path: out.display().to_string(),
                source: e,
            })?;
            println!("selected {} nodes ({})", sel.node_ids.len(), method);
            Ok(())
        }
        Command::Eval {
            dataset,
            condensed,
            selection,
            model,
            repeats,
            seed,
            report: report_path,
        } => {
            let graph = load_dataset(&dataset)?;
            let arch = Arch::parse(&model)?;
            let (package, method) = match (condensed, selection) {
                (Some(dir), None) => {
                    let (cond, manifest) = load_condensed(&dir)?;
                    (package_condensed(&cond)?, manifest.method)
                }
                (None, Some(file)) => {
                    let text = std::fs::read_to_string(&file).map_err(|e| Error::Io {
                        path: file.display().to_string(),
                        source: e,
                    })?;
                    let ids: Vec<usize> = text
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(|l| {
                            l.trim().parse().map_err(|_| Error::Parse {
                                path: file.display().to_string(),
                                line: 0,
                                message: format!("bad node id '{}'", l.trim()),
                            })
                        })
                        .collect::<Result<_>>()?;
                    let sel = graph_condense::coresets::Selection {
                        node_ids: ids,
                        per_class: Vec::new(),
                    };
                    (package_selection(&graph, &sel)?, "selection".to_string())
                }
                _ => {
                    return Err(Error::Config(
                        "exactly one of --condensed or --selection is required".into(),
                    ))
                }
            };
            let name = dataset
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
            let r = evaluate(&package, &graph, arch, repeats, seed, &method, &name)?;
            for (i, acc) in r.accuracies.iter().enumerate() {
                println!("repeat {:>2}: {:.4}", i, acc);
            }
            println!("mean±std: {:.4}±{:.4}", r.mean, r.std);
            let text = report(&[r]);
            print!("{}", text);
            if let Some(p) = report_path {
                write_report(&p, &text)?;
            }
            Ok(())
        }
        Command::CrossEval {
            dataset,
            condense_archs,
            eval_archs,
            size,
            method,
            repeats,
            seed,
            report: report_path,
        } => {
            let (ratio, nodes) = resolve_size(&size)?;
            let graph = load_dataset(&dataset)?;
            let variant = Variant::parse(&method)?;
            let parse_list = |s: &str| -> Result<Vec<Arch>> {
                s.split(',').map(|a| Arch::parse(a.trim())).collect()
            };
            let carchs = parse_list(&condense_archs)?;
            let earchs = parse_list(&eval_archs)?;
            let config = CondenseConfig {
                ratio,
                nodes,
                seed,
                ..CondenseConfig::default()
            };
            let name = dataset
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
            let rows =
                cross_architecture(&graph, &config, &carchs, &earchs, variant, repeats, &name)?;
            let flat: Vec<_> = rows.into_iter().flatten().collect();
            let text = report(&flat);
            print!("{}", text);
            if let Some(p) = report_path {
                write_report(&p, &text)?;
            }
            Ok(())
        }
        Command::Stats { dataset, condensed } => {
            match (dataset, condensed) {
                (Some(path), None) => {
                    let g = load_dataset(&path)?;
                    let s = graph_stats(&g.adj, &g.labels, g.dim(), 0.5);
                    print_stats(&path.display().to_string(), &s);
                }
                (None, Some(dir)) => {
                    let (cond, manifest) = load_condensed(&dir)?;
                    let s = graph_condense::harness::condensed_stats(&cond)?;
                    println!("method    {}", manifest.method);
                    println!("delta     {}", manifest.delta);
                    print_stats(&dir.display().to_string(), &s);
                }
                _ => {
                    return Err(Error::Config(
                        "exactly one of --dataset or --condensed is required".into(),
                    ))
                }
            }
            Ok(())
        }
        Command::GenSynth {
            n,
            classes,
            p_in,
            p_out,
            d,
            seed,
            name,
            out,
        } => {
            let g = gen_synthetic(n, classes, p_in, p_out, d, seed)?;
            save_dataset(&out, &name, &g)?;
            let s = graph_stats(&g.adj, &g.labels, g.dim(), 0.5);
            println!(
                "wrote {}: n={} d={} classes={} edges={} homophily={:.2}",
                out.display(),
                n,
                d,
                classes,
                s.edges,
                s.homophily
            );
            Ok(())
        }
    }
}

fn print_stats(what: &str, s: &graph_condense::graph::GraphStats) {
    println!("graph     {}", what);
    println!("edges     {}", s.edges);
    println!("sparsity  {:.4}%", s.sparsity_pct);
    println!("homophily {:.4}", s.homophily);
    println!("storage   {:.3} MB", s.storage_bytes as f64 / 1e6);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

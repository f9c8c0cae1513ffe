//! Coreset baselines: random, herding, and k-center selection of real
//! training nodes, with per-class budgets matching the condensation
//! allocation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condense::class_allocation;
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::ndtape::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CoresetMethod {
    Random,
    Herding,
    KCenter,
}

impl CoresetMethod {
    pub fn parse(s: &str) -> Result<CoresetMethod> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(CoresetMethod::Random),
            "herding" => Ok(CoresetMethod::Herding),
            "kcenter" | "k-center" => Ok(CoresetMethod::KCenter),
            other => Err(Error::Config(format!("unknown coreset method '{}'", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CoresetMethod::Random => "random",
            CoresetMethod::Herding => "herding",
            CoresetMethod::KCenter => "kcenter",
        }
    }
}

/// Selected node ids (into the original graph), sorted ascending, plus the
/// per-class counts actually used.
#[derive(Debug, Clone)]
pub struct Selection {
    pub node_ids: Vec<usize>,
    pub per_class: Vec<usize>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn class_mean(features: &Matrix, members: &[usize]) -> Vec<f64> {
    let d = features.cols;
    let mut mean = vec![0.0; d];
    for &m in members {
        for (k, v) in features.row(m).iter().enumerate() {
            mean[k] += v;
        }
    }
    for v in mean.iter_mut() {
        *v /= members.len() as f64;
    }
    mean
}

/// Uniform random selection without replacement within each class.
fn pick_random(members: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool = members.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let i = rng.gen_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}

/// Herding: greedily keep the running selection mean close to the class
/// mean. At each step pick the candidate minimizing
/// ||mu - mean(selected + candidate)||; ties go to the lowest node index.
fn pick_herding(features: &Matrix, members: &[usize], k: usize) -> Vec<usize> {
    let mu = class_mean(features, members);
    let d = features.cols;
    let mut sum = vec![0.0; d];
    let mut chosen = vec![false; members.len()];
    let mut out = Vec::with_capacity(k);
    for step in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (i, &m) in members.iter().enumerate() {
            if chosen[i] {
                continue;
            }
            let row = features.row(m);
            let inv = 1.0 / (step + 1) as f64;
            let score: f64 = (0..d)
                .map(|j| {
                    let diff = mu[j] - (sum[j] + row[j]) * inv;
                    diff * diff
                })
                .sum();
            let better = match best {
                None => true,
                Some((s, bi)) => score < s || (score == s && members[i] < members[bi]),
            };
            if better {
                best = Some((score, i));
            }
        }
        let (_, i) = best.expect("k bounded by class size");
        chosen[i] = true;
        for (j, v) in features.row(members[i]).iter().enumerate() {
            sum[j] += v;
        }
        out.push(members[i]);
    }
    out
}

/// K-center: start from the node nearest the class mean, then greedily add
/// the node farthest from the current selection.
fn pick_kcenter(features: &Matrix, members: &[usize], k: usize) -> Vec<usize> {
    let mu = class_mean(features, members);
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, &m) in members.iter().enumerate() {
        let d = sq_dist(features.row(m), &mu);
        if d < best_d || (d == best_d && members[i] < members[best]) {
            best_d = d;
            best = i;
        }
    }
    let mut out = vec![members[best]];
    let mut min_d: Vec<f64> = members
        .iter()
        .map(|&m| sq_dist(features.row(m), features.row(members[best])))
        .collect();
    while out.len() < k {
        let mut far = 0usize;
        let mut far_d = -1.0;
        for (i, &d) in min_d.iter().enumerate() {
            if d > far_d || (d == far_d && members[i] < members[far]) {
                far_d = d;
                far = i;
            }
        }
        out.push(members[far]);
        for (i, &m) in members.iter().enumerate() {
            let d = sq_dist(features.row(m), features.row(members[far]));
            if d < min_d[i] {
                min_d[i] = d;
            }
        }
    }
    out
}

/// Select `n_prime` train nodes with per-class budgets from the train label
/// distribution (largest remainder, >= 1 per class). Deterministic for a
/// fixed seed; the seed only matters for `Random`.
pub fn select(
    graph: &SparseGraph,
    method: CoresetMethod,
    n_prime: usize,
    seed: u64,
) -> Result<Selection> {
    graph.validate()?;
    let per_class = class_allocation(&graph.train_class_counts(), n_prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node_ids = Vec::with_capacity(n_prime);
    for (c, &k) in per_class.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let members = graph.train_nodes_of_class(c);
        if k > members.len() {
            return Err(Error::Config(format!(
                "class {} has {} train nodes, cannot select {}",
                c,
                members.len(),
                k
            )));
        }
        let picked = match method {
            CoresetMethod::Random => pick_random(&members, k, &mut rng),
            CoresetMethod::Herding => pick_herding(&graph.features, &members, k),
            CoresetMethod::KCenter => pick_kcenter(&graph.features, &members, k),
        };
        node_ids.extend(picked);
    }
    node_ids.sort_unstable();
    Ok(Selection {
        node_ids,
        per_class,
    })
}

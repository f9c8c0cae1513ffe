//! Sparse-graph representation, symmetric normalization, propagation
//! kernels, per-class neighbor sampling and graph statistics.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ndtape::Matrix;

/// Compressed sparse row matrix with f64 weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Build from unsorted (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Csr> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Validation(format!(
                    "entry ({}, {}) outside {}x{}",
                    r, c, n_rows, n_cols
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        // merge duplicates
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<usize> = merged.iter().map(|&(_, c, _)| c).collect();
        let values: Vec<f64> = merged.iter().map(|&(_, _, v)| v).collect();
        Ok(Csr {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Csr {
        Csr {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let s = self.row_ptr[i];
        let e = self.row_ptr[i + 1];
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if (self.get(j, i) - v).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Csr {
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                triplets.push((j, i, v));
            }
        }
        Csr::from_triplets(self.n_cols, self.n_rows, &triplets).expect("transpose in bounds")
    }

    /// Sparse-dense product A * X.
    pub fn mul_dense(&self, x: &Matrix) -> Result<Matrix> {
        if self.n_cols != x.rows {
            return Err(Error::Dimension(format!(
                "spmm: {}x{} * {}x{}",
                self.n_rows, self.n_cols, x.rows, x.cols
            )));
        }
        let mut out = Matrix::zeros(self.n_rows, x.cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let orow = &mut out.data[i * x.cols..(i + 1) * x.cols];
            for (&j, &v) in cols.iter().zip(vals) {
                let xrow = x.row(j);
                for (o, xv) in orow.iter_mut().zip(xrow) {
                    *o += v * xv;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m.data[i * self.n_cols + j] = v;
            }
        }
        m
    }
}

/// Train/validation/test node masks. Disjoint by construction.
#[derive(Debug, Clone, Default)]
pub struct Masks {
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl Masks {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.train.len() != n || self.val.len() != n || self.test.len() != n {
            return Err(Error::Validation("mask length mismatch".into()));
        }
        for i in 0..n {
            let c = self.train[i] as u8 + self.val[i] as u8 + self.test[i] as u8;
            if c > 1 {
                return Err(Error::Validation(format!("node {} in multiple masks", i)));
            }
        }
        Ok(())
    }

    pub fn indices(mask: &[bool]) -> Vec<usize> {
        mask.iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// CSR adjacency + dense features + labels + split masks.
///
/// Labels are in [0, num_classes) or -1 for unlabeled nodes. Immutable after
/// load; all operations are read-only.
#[derive(Debug, Clone)]
pub struct SparseGraph {
    pub adj: Csr,
    pub features: Matrix,
    pub labels: Vec<i64>,
    pub num_classes: usize,
    pub masks: Masks,
}

impl SparseGraph {
    pub fn n(&self) -> usize {
        self.adj.n_rows
    }

    pub fn dim(&self) -> usize {
        self.features.cols
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.adj.n_cols != n {
            return Err(Error::Validation("adjacency not square".into()));
        }
        if self.features.rows != n {
            return Err(Error::Validation(format!(
                "feature rows {} != node count {}",
                self.features.rows, n
            )));
        }
        if self.labels.len() != n {
            return Err(Error::Validation("label count mismatch".into()));
        }
        for (i, &y) in self.labels.iter().enumerate() {
            if y < -1 || y >= self.num_classes as i64 {
                return Err(Error::Validation(format!(
                    "label {} of node {} outside [-1,{})",
                    y, i, self.num_classes
                )));
            }
        }
        if self.adj.values.iter().any(|&v| v < 0.0) {
            return Err(Error::Validation("negative edge weight".into()));
        }
        self.masks.validate(n)
    }

    pub fn train_nodes_of_class(&self, class_id: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.masks.train[i] && self.labels[i] == class_id as i64)
            .collect()
    }

    pub fn train_class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for i in 0..self.n() {
            if self.masks.train[i] && self.labels[i] >= 0 {
                counts[self.labels[i] as usize] += 1;
            }
        }
        counts
    }
}

/// Symmetric normalization D^{-1/2} (A [+ I]) D^{-1/2}. Zero-degree rows
/// come out as zero rows rather than NaN.
pub fn normalize_sym(adj: &Csr, add_self_loops: bool) -> Result<Csr> {
    if adj.values.iter().any(|&v| v < 0.0) {
        return Err(Error::Validation("negative weight in normalize_sym".into()));
    }
    let n = adj.n_rows;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(adj.nnz() + n);
    for i in 0..n {
        let (cols, vals) = adj.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if add_self_loops && i == j {
                continue; // replaced by the explicit self loop below
            }
            triplets.push((i, j, v));
        }
    }
    if add_self_loops {
        for i in 0..n {
            triplets.push((i, i, adj.get(i, i) + 1.0));
        }
    }
    let mut deg = vec![0.0f64; n];
    for &(i, _, v) in &triplets {
        deg[i] += v;
    }
    let dinv: Vec<f64> = deg
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    for t in triplets.iter_mut() {
        t.2 *= dinv[t.0] * dinv[t.1];
    }
    Csr::from_triplets(n, n, &triplets)
}

/// Row normalization D^{-1} A, mean-aggregation kernel.
pub fn normalize_row(adj: &Csr) -> Result<Csr> {
    let n = adj.n_rows;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(adj.nnz());
    for i in 0..n {
        let (cols, vals) = adj.row(i);
        let d: f64 = vals.iter().sum();
        if d <= 0.0 {
            continue;
        }
        for (&j, &v) in cols.iter().zip(vals) {
            triplets.push((i, j, v / d));
        }
    }
    Csr::from_triplets(n, n, &triplets)
}

/// Sampled per-class batch plus the node closure needed for L-hop
/// aggregation with a fan-out cap.
#[derive(Debug, Clone)]
pub struct ClassBatch {
    pub class_id: usize,
    /// Indices into the original graph; all train-masked with this class.
    pub node_ids: Vec<usize>,
    /// Superset of node_ids; sorted ascending.
    pub closure: Vec<usize>,
}

/// Uniform batch of class-c train nodes plus fan-out-capped neighbor closure.
pub fn sample_class_batch(
    graph: &SparseGraph,
    class_id: usize,
    batch_size: usize,
    fanout: usize,
    hops: usize,
    rng: &mut impl Rng,
) -> Result<ClassBatch> {
    let members = graph.train_nodes_of_class(class_id);
    if members.is_empty() {
        return Err(Error::Validation(format!(
            "class {} has no train nodes",
            class_id
        )));
    }
    let node_ids = if batch_size >= members.len() {
        members.clone()
    } else {
        let mut pool = members.clone();
        pool.shuffle(rng);
        pool.truncate(batch_size);
        pool.sort_unstable();
        pool
    };

    let mut closure: BTreeSet<usize> = node_ids.iter().copied().collect();
    let mut frontier: Vec<usize> = node_ids.clone();
    for _ in 0..hops {
        let mut next = Vec::new();
        for &u in &frontier {
            let (cols, _) = graph.adj.row(u);
            let picked: Vec<usize> = if cols.len() <= fanout {
                cols.to_vec()
            } else {
                let mut c = cols.to_vec();
                c.shuffle(rng);
                c.truncate(fanout);
                c
            };
            for v in picked {
                if closure.insert(v) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    Ok(ClassBatch {
        class_id,
        node_ids,
        closure: closure.into_iter().collect(),
    })
}

/// Subgraph induced on `node_ids`: keeps edges with both endpoints selected,
/// reindexes features, labels and masks.
pub fn induced_subgraph(graph: &SparseGraph, node_ids: &[usize]) -> Result<SparseGraph> {
    let n = graph.n();
    let mut position = vec![usize::MAX; n];
    for (new_i, &old) in node_ids.iter().enumerate() {
        if old >= n {
            return Err(Error::Validation(format!("node id {} out of range", old)));
        }
        if position[old] != usize::MAX {
            return Err(Error::Validation(format!("duplicate node id {}", old)));
        }
        position[old] = new_i;
    }
    let m = node_ids.len();
    let mut triplets = Vec::new();
    for (new_i, &old) in node_ids.iter().enumerate() {
        let (cols, vals) = graph.adj.row(old);
        for (&j, &v) in cols.iter().zip(vals) {
            if position[j] != usize::MAX {
                triplets.push((new_i, position[j], v));
            }
        }
    }
    let mut features = Matrix::zeros(m, graph.dim());
    let mut labels = Vec::with_capacity(m);
    let mut masks = Masks {
        train: Vec::with_capacity(m),
        val: Vec::with_capacity(m),
        test: Vec::with_capacity(m),
    };
    for (new_i, &old) in node_ids.iter().enumerate() {
        features.data[new_i * graph.dim()..(new_i + 1) * graph.dim()]
            .copy_from_slice(graph.features.row(old));
        labels.push(graph.labels[old]);
        masks.train.push(graph.masks.train[old]);
        masks.val.push(graph.masks.val[old]);
        masks.test.push(graph.masks.test[old]);
    }
    Ok(SparseGraph {
        adj: Csr::from_triplets(m, m, &triplets)?,
        features,
        labels,
        num_classes: graph.num_classes,
        masks,
    })
}

/// Summary statistics of a (possibly weighted) adjacency.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GraphStats {
    /// Undirected edges with weight >= the binarization threshold.
    pub edges: usize,
    /// Retained directed edges / (n * (n-1)), as a percentage.
    pub sparsity_pct: f64,
    /// Fraction of retained edges whose endpoints share a label.
    pub homophily: f64,
    /// Features at 4 bytes/float plus 8 bytes per undirected edge.
    pub storage_bytes: u64,
}

/// Stats over edges binarized at `binarize_at` (edges with weight below the
/// threshold are dropped). Feature storage is counted from `feature_dim`.
pub fn graph_stats(
    adj: &Csr,
    labels: &[i64],
    feature_dim: usize,
    binarize_at: f64,
) -> GraphStats {
    let n = adj.n_rows;
    let mut directed_edges = 0usize;
    let mut undirected_edges = 0usize;
    let mut same_label = 0usize;
    for i in 0..n {
        let (cols, vals) = adj.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if i == j || v < binarize_at {
                continue;
            }
            directed_edges += 1;
            if i < j {
                undirected_edges += 1;
                if labels[i] >= 0 && labels[i] == labels[j] {
                    same_label += 1;
                }
            }
        }
    }
    let pairs = if n > 1 { (n * (n - 1)) as f64 } else { 1.0 };
    GraphStats {
        edges: undirected_edges,
        sparsity_pct: 100.0 * directed_edges as f64 / pairs,
        homophily: if undirected_edges > 0 {
            same_label as f64 / undirected_edges as f64
        } else {
            0.0
        },
        storage_bytes: (n * feature_dim * 4 + undirected_edges * 8) as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> SparseGraph {
        // 0 - 1 - 2
        let adj = Csr::from_triplets(
            3,
            3,
            &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap();
        SparseGraph {
            adj,
            features: Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]),
            labels: vec![0, 0, 1],
            num_classes: 2,
            masks: Masks {
                train: vec![true, true, true],
                val: vec![false; 3],
                test: vec![false; 3],
            },
        }
    }

    #[test]
    fn normalize_single_self_loop() {
        let adj = Csr::from_triplets(1, 1, &[(0, 0, 1.0)]).unwrap();
        let norm = normalize_sym(&adj, false).unwrap();
        assert_eq!(norm.get(0, 0), 1.0);
    }

    #[test]
    fn normalize_two_clique_with_self_loops() {
        let adj = Csr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let norm = normalize_sym(&adj, true).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((norm.get(i, j) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn normalize_isolated_node_gives_zero_row() {
        let adj = Csr::from_triplets(2, 2, &[]).unwrap();
        let norm = normalize_sym(&adj, false).unwrap();
        assert_eq!(norm.nnz(), 0);
        assert!(norm.mul_dense(&Matrix::filled(2, 1, 5.0)).unwrap().data == vec![0.0, 0.0]);
    }

    #[test]
    fn normalize_rejects_negative_weight() {
        let adj = Csr::from_triplets(2, 2, &[(0, 1, -1.0)]).unwrap();
        assert!(normalize_sym(&adj, true).is_err());
    }

    #[test]
    fn normalized_row_sums_on_regular_graph() {
        // 4-cycle with self loops is regular; rows of the normalized matrix sum to 1
        let mut t = Vec::new();
        for i in 0..4usize {
            let j = (i + 1) % 4;
            t.push((i, j, 1.0));
            t.push((j, i, 1.0));
        }
        let adj = Csr::from_triplets(4, 4, &t).unwrap();
        let norm = normalize_sym(&adj, true).unwrap();
        let ones = Matrix::filled(4, 1, 1.0);
        let sums = norm.mul_dense(&ones).unwrap();
        for v in sums.data {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spmm_identity_and_hand_case() {
        let id = Csr::identity(3);
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]);
        assert_eq!(id.mul_dense(&x).unwrap(), x);

        // 2-clique normalized (all 0.5) times [[2],[4]] -> [[3],[3]]
        let adj = Csr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let norm = normalize_sym(&adj, true).unwrap();
        let x = Matrix::from_rows(&[vec![2.0], vec![4.0]]);
        let y = norm.mul_dense(&x).unwrap();
        assert!((y.data[0] - 3.0).abs() < 1e-15 && (y.data[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn spmm_matches_dense_reference_on_random_graphs() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let n = rng.gen_range(2..64);
            let mut triplets = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rng.gen_bool(0.15) {
                        triplets.push((i, j, rng.gen_range(0.0..2.0)));
                    }
                }
            }
            let a = Csr::from_triplets(n, n, &triplets).unwrap();
            let x = Matrix::new(n, 3, (0..n * 3).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let sparse = a.mul_dense(&x).unwrap();
            let dense = a.to_dense().matmul(&x).unwrap();
            for k in 0..sparse.data.len() {
                assert!((sparse.data[k] - dense.data[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spmm_gradient_matches_finite_differences() {
        use crate::ndtape::{grad_check, Tape};
        use std::sync::Arc;
        let adj = Arc::new(
            Csr::from_triplets(3, 3, &[(0, 1, 0.7), (1, 0, 0.7), (1, 2, 0.3), (2, 1, 0.3)])
                .unwrap(),
        );
        let x = Matrix::from_rows(&[vec![0.5, -0.2], vec![1.1, 0.4], vec![-0.3, 0.8]]);
        let err = grad_check(
            |t: &mut Tape, v| {
                let y = t.spmm(Arc::clone(&adj), v)?;
                let s = t.sigmoid(y);
                Ok(t.sum_all(s))
            },
            &x,
            1e-6,
        )
        .unwrap();
        assert!(err < 1e-6, "err = {}", err);
    }

    #[test]
    fn batch_without_subsampling_is_full_neighborhood() {
        let g = path3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = sample_class_batch(&g, 0, 10, 10, 1, &mut rng).unwrap();
        assert_eq!(b.node_ids, vec![0, 1]);
        assert_eq!(b.closure, vec![0, 1, 2]);
    }

    #[test]
    fn batch_zero_hops_closure_equals_batch() {
        let g = path3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = sample_class_batch(&g, 1, 10, 10, 0, &mut rng).unwrap();
        assert_eq!(b.node_ids, vec![2]);
        assert_eq!(b.closure, vec![2]);
    }

    #[test]
    fn batch_star_fanout_caps_closure() {
        // star: center 0, leaves 1..=5; center is the only class-0 train node
        let mut t = Vec::new();
        for leaf in 1..=5usize {
            t.push((0, leaf, 1.0));
            t.push((leaf, 0, 1.0));
        }
        let g = SparseGraph {
            adj: Csr::from_triplets(6, 6, &t).unwrap(),
            features: Matrix::zeros(6, 1),
            labels: vec![0, 1, 1, 1, 1, 1],
            num_classes: 2,
            masks: Masks {
                train: vec![true; 6],
                val: vec![false; 6],
                test: vec![false; 6],
            },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = sample_class_batch(&g, 0, 1, 2, 1, &mut rng).unwrap();
        assert_eq!(b.node_ids, vec![0]);
        assert_eq!(b.closure.len(), 3); // center + 2 sampled leaves
        assert!(b.closure.contains(&0));
    }

    #[test]
    fn batch_deterministic_per_seed() {
        let g = path3();
        let a = sample_class_batch(&g, 0, 1, 1, 1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_class_batch(&g, 0, 1, 1, 1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.node_ids, b.node_ids);
        assert_eq!(a.closure, b.closure);
    }

    #[test]
    fn batch_empty_class_is_error() {
        let mut g = path3();
        g.num_classes = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_class_batch(&g, 2, 1, 1, 1, &mut rng).is_err());
    }

    #[test]
    fn induced_all_nodes_roundtrip() {
        let g = path3();
        let sub = induced_subgraph(&g, &[0, 1, 2]).unwrap();
        assert_eq!(sub.adj, g.adj);
        assert_eq!(sub.features, g.features);
    }

    #[test]
    fn induced_non_adjacent_pair_is_edgeless() {
        let g = path3();
        let sub = induced_subgraph(&g, &[0, 2]).unwrap();
        assert_eq!(sub.adj.nnz(), 0);
    }

    #[test]
    fn induced_triangle_minus_node_keeps_one_edge() {
        let mut t = Vec::new();
        for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
            t.push((i, j, 1.0));
            t.push((j, i, 1.0));
        }
        let g = SparseGraph {
            adj: Csr::from_triplets(3, 3, &t).unwrap(),
            features: Matrix::zeros(3, 1),
            labels: vec![0, 0, 0],
            num_classes: 1,
            masks: Masks {
                train: vec![true; 3],
                val: vec![false; 3],
                test: vec![false; 3],
            },
        };
        let sub = induced_subgraph(&g, &[0, 1]).unwrap();
        assert_eq!(sub.adj.nnz(), 2); // one undirected edge
    }

    #[test]
    fn induced_duplicate_ids_rejected() {
        let g = path3();
        assert!(induced_subgraph(&g, &[0, 0]).is_err());
    }

    #[test]
    fn stats_two_clique_same_labels() {
        let adj = Csr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let s = graph_stats(&adj, &[0, 0], 1, 0.5);
        assert_eq!(s.homophily, 1.0);
        assert_eq!(s.edges, 1);
    }

    #[test]
    fn stats_bipartite_edge_between_classes() {
        let adj = Csr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let s = graph_stats(&adj, &[0, 1], 1, 0.5);
        assert_eq!(s.homophily, 0.0);
    }

    #[test]
    fn stats_weighted_triangle_thresholding() {
        // weights {0.9, 0.6, 0.4}, labels {0,0,1}: 2 retained edges, homophily 0.5
        let t = vec![
            (0usize, 1usize, 0.9),
            (1, 0, 0.9),
            (1, 2, 0.6),
            (2, 1, 0.6),
            (0, 2, 0.4),
            (2, 0, 0.4),
        ];
        let adj = Csr::from_triplets(3, 3, &t).unwrap();
        let s = graph_stats(&adj, &[0, 0, 1], 1, 0.5);
        assert_eq!(s.edges, 2);
        assert!((s.homophily - 0.5).abs() < 1e-15);
    }

    #[test]
    fn induced_subgraph_preserves_homophily_of_kept_edges() {
        // consistency between induced_subgraph and graph_stats
        let mut t = Vec::new();
        for (i, j) in [(0usize, 1usize), (1, 2), (2, 3), (3, 0)] {
            t.push((i, j, 1.0));
            t.push((j, i, 1.0));
        }
        let g = SparseGraph {
            adj: Csr::from_triplets(4, 4, &t).unwrap(),
            features: Matrix::zeros(4, 1),
            labels: vec![0, 0, 1, 1],
            num_classes: 2,
            masks: Masks {
                train: vec![true; 4],
                val: vec![false; 4],
                test: vec![false; 4],
            },
        };
        let sub = induced_subgraph(&g, &[0, 1, 2]).unwrap();
        let s = graph_stats(&sub.adj, &sub.labels, 1, 0.5);
        // edges kept: (0,1) same label, (1,2) cross -> homophily 0.5
        assert!((s.homophily - 0.5).abs() < 1e-15);
    }
}

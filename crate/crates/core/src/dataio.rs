//! Text-based dataset and artifact formats, plus a seeded synthetic-graph
//! generator for tests.
//!
//! A dataset directory holds `manifest.json`, `edges.tsv` (one `u<TAB>v`
//! line per undirected edge, 0-indexed), `features.csv`, `labels.txt`
//! (one integer per line, -1 for unlabeled), and `splits.txt` (three
//! whitespace-separated index lists: train, val, test). A condensed
//! artifact directory holds a manifest, a dense adjacency, features, and
//! labels, all with floats printed to 17 significant digits so loading is
//! bit-faithful.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::condense::{CondenseConfig, CondensedGraph, Variant};
use crate::error::{Error, Result};
use crate::graph::{Csr, Masks, SparseGraph};
use crate::ndtape::Matrix;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub directed: bool,
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// `{:.16e}` prints 17 significant digits, enough to round-trip any f64.
fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("bad float '{}'", s.trim())))
}

fn parse_usize(path: &Path, line: usize, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("bad index '{}'", s.trim())))
}

fn write_matrix_csv(path: &Path, m: &Matrix, precise: bool) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|&v| if precise { fmt_f64(v) } else { format!("{}", v) })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn read_matrix_csv(path: &Path, expect_rows: usize, expect_cols: usize) -> Result<Matrix> {
    let text = read_to_string(path)?;
    let mut data = Vec::with_capacity(expect_rows * expect_cols);
    let mut rows = 0usize;
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != expect_cols {
            return Err(parse_err(
                path,
                ln + 1,
                format!("expected {} columns, found {}", expect_cols, vals.len()),
            ));
        }
        for v in vals {
            data.push(parse_f64(path, ln + 1, v)?);
        }
        rows += 1;
    }
    if rows != expect_rows {
        return Err(parse_err(
            path,
            rows,
            format!("expected {} rows, found {}", expect_rows, rows),
        ));
    }
    Ok(Matrix::new(expect_rows, expect_cols, data))
}

fn write_labels(path: &Path, labels: &[i64]) -> Result<()> {
    let mut out = String::new();
    for &y in labels {
        out.push_str(&y.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn read_labels(path: &Path, expect: usize, classes: usize) -> Result<Vec<i64>> {
    let text = read_to_string(path)?;
    let mut labels = Vec::with_capacity(expect);
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let y: i64 = line
            .trim()
            .parse()
            .map_err(|_| parse_err(path, ln + 1, format!("bad label '{}'", line.trim())))?;
        if y != -1 && !(0..classes as i64).contains(&y) {
            return Err(parse_err(
                path,
                ln + 1,
                format!("label {} out of range [0,{})", y, classes),
            ));
        }
        labels.push(y);
    }
    if labels.len() != expect {
        return Err(parse_err(
            path,
            labels.len(),
            format!("expected {} labels, found {}", expect, labels.len()),
        ));
    }
    Ok(labels)
}

/// Write a dataset directory. Each undirected edge is emitted once, with
/// the smaller endpoint first.
pub fn save_dataset(dir: &Path, name: &str, graph: &SparseGraph) -> Result<()> {
    graph.validate()?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let n = graph.n();
    let manifest = DatasetManifest {
        name: name.to_string(),
        n,
        d: graph.dim(),
        classes: graph.num_classes,
        directed: false,
        train: Masks::indices(&graph.masks.train).len(),
        val: Masks::indices(&graph.masks.val).len(),
        test: Masks::indices(&graph.masks.test).len(),
    };
    let mpath = dir.join("manifest.json");
    fs::write(
        &mpath,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )
    .map_err(|e| io_err(&mpath, e))?;

    let epath = dir.join("edges.tsv");
    let mut f = fs::File::create(&epath).map_err(|e| io_err(&epath, e))?;
    for u in 0..n {
        let (cols, _) = graph.adj.row(u);
        for &v in cols {
            if u <= v {
                writeln!(f, "{}\t{}", u, v).map_err(|e| io_err(&epath, e))?;
            }
        }
    }
    write_matrix_csv(&dir.join("features.csv"), &graph.features, true)?;
    write_labels(&dir.join("labels.txt"), &graph.labels)?;

    let spath = dir.join("splits.txt");
    let fmt = |mask: &[bool]| {
        Masks::indices(mask)
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    fs::write(
        &spath,
        format!(
            "{}\n{}\n{}\n",
            fmt(&graph.masks.train),
            fmt(&graph.masks.val),
            fmt(&graph.masks.test)
        ),
    )
    .map_err(|e| io_err(&spath, e))
}

/// Load and fully validate a dataset directory.
pub fn load_dataset(dir: &Path) -> Result<SparseGraph> {
    let mpath = dir.join("manifest.json");
    let manifest: DatasetManifest = serde_json::from_str(&read_to_string(&mpath)?)
        .map_err(|e| parse_err(&mpath, e.line(), e.to_string()))?;
    let n = manifest.n;

    let epath = dir.join("edges.tsv");
    let text = read_to_string(&epath)?;
    let mut triplets = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(parse_err(&epath, ln + 1, "expected 'u<TAB>v'")),
        };
        let u = parse_usize(&epath, ln + 1, u)?;
        let v = parse_usize(&epath, ln + 1, v)?;
        if u >= n || v >= n {
            return Err(parse_err(
                &epath,
                ln + 1,
                format!("edge ({},{}) out of range for n={}", u, v, n),
            ));
        }
        triplets.push((u, v, 1.0));
        if !manifest.directed && u != v {
            triplets.push((v, u, 1.0));
        }
    }
    let adj = Csr::from_triplets(n, n, &triplets)?;
    let features = read_matrix_csv(&dir.join("features.csv"), n, manifest.d)?;
    let labels = read_labels(&dir.join("labels.txt"), n, manifest.classes)?;

    let spath = dir.join("splits.txt");
    let text = read_to_string(&spath)?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 3 {
        return Err(parse_err(&spath, lines.len(), "expected 3 split lines"));
    }
    let mut masks = Masks {
        train: vec![false; n],
        val: vec![false; n],
        test: vec![false; n],
    };
    for (which, (line, expect)) in [
        (lines[0], manifest.train),
        (lines[1], manifest.val),
        (lines[2], manifest.test),
    ]
    .into_iter()
    .enumerate()
    {
        let mask = match which {
            0 => &mut masks.train,
            1 => &mut masks.val,
            _ => &mut masks.test,
        };
        let mut count = 0usize;
        for tok in line.split_whitespace() {
            let i = parse_usize(&spath, which + 1, tok)?;
            if i >= n {
                return Err(parse_err(
                    &spath,
                    which + 1,
                    format!("split index {} out of range for n={}", i, n),
                ));
            }
            mask[i] = true;
            count += 1;
        }
        if count != expect {
            return Err(parse_err(
                &spath,
                which + 1,
                format!("manifest says {} indices, file has {}", expect, count),
            ));
        }
    }

    let graph = SparseGraph {
        adj,
        features,
        labels,
        num_classes: manifest.classes,
        masks,
    };
    graph.validate()?;
    Ok(graph)
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CondensedManifest {
    pub method: String,
    pub seed: u64,
    pub delta: f64,
    pub n_prime: usize,
    pub d: usize,
    pub classes: usize,
    /// Full configuration echo for reproducibility.
    pub config: CondenseConfig,
}

/// Persist a finalized condensed graph: manifest, dense adjacency,
/// features, labels.
pub fn save_condensed(
    dir: &Path,
    cond: &CondensedGraph,
    config: &CondenseConfig,
) -> Result<()> {
    let adj = cond
        .adjacency
        .as_ref()
        .ok_or_else(|| Error::Validation("condensed graph not finalized".into()))?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let manifest = CondensedManifest {
        method: cond.variant.name().to_string(),
        seed: config.seed,
        delta: cond.delta,
        n_prime: cond.n(),
        d: cond.features.cols,
        classes: cond.num_classes,
        config: config.clone(),
    };
    let mpath = dir.join("manifest.json");
    fs::write(
        &mpath,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )
    .map_err(|e| io_err(&mpath, e))?;
    write_matrix_csv(&dir.join("features.csv"), &cond.features, true)?;
    write_matrix_csv(&dir.join("adjacency.csv"), adj, true)?;
    write_labels(&dir.join("labels.txt"), &cond.labels)
}

/// Load a condensed artifact, checking shapes, symmetry (within 1e-12), and
/// the sparsification threshold.
pub fn load_condensed(dir: &Path) -> Result<(CondensedGraph, CondensedManifest)> {
    let mpath = dir.join("manifest.json");
    let manifest: CondensedManifest = serde_json::from_str(&read_to_string(&mpath)?)
        .map_err(|e| parse_err(&mpath, e.line(), e.to_string()))?;
    let n = manifest.n_prime;
    let features = read_matrix_csv(&dir.join("features.csv"), n, manifest.d)?;
    let apath = dir.join("adjacency.csv");
    let adj = read_matrix_csv(&apath, n, n)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if (adj.get(i, j) - adj.get(j, i)).abs() > 1e-12 {
                return Err(Error::Validation(format!(
                    "adjacency asymmetric at ({},{}): {} vs {}",
                    i,
                    j,
                    adj.get(i, j),
                    adj.get(j, i)
                )));
            }
        }
    }
    for (k, &v) in adj.data.iter().enumerate() {
        if v != 0.0 && v <= manifest.delta {
            return Err(Error::Validation(format!(
                "adjacency entry {} = {} below threshold {}",
                k, v, manifest.delta
            )));
        }
    }
    let labels = read_labels(&dir.join("labels.txt"), n, manifest.classes)?;
    let variant = Variant::parse(&manifest.method)?;
    let cond = CondensedGraph {
        features,
        phi: crate::models::ModelParams {
            layers: Vec::new(),
            rng_seed: manifest.seed,
        },
        labels,
        num_classes: manifest.classes,
        delta: manifest.delta,
        variant,
        adjacency: Some(adj),
    };
    Ok((cond, manifest))
}

/// Stochastic-block-model graph with class-correlated Gaussian features:
/// within-block edge probability `p_in`, across `p_out`, feature mean a
/// scaled one-hot of the class. Splits are a seeded 30/30/40 shuffle.
pub fn gen_synthetic(
    n: usize,
    classes: usize,
    p_in: f64,
    p_out: f64,
    d: usize,
    seed: u64,
) -> Result<SparseGraph> {
    if !(0.0..=1.0).contains(&p_out) || !(0.0..=1.0).contains(&p_in) || p_out > p_in {
        return Err(Error::Config("need 0 <= p_out <= p_in <= 1".into()));
    }
    if classes == 0 || n < classes || d == 0 {
        return Err(Error::Config("need classes >= 1, n >= classes, d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<i64> = (0..n).map(|i| (i % classes) as i64).collect();

    let mut triplets = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.gen_bool(p) {
                triplets.push((u, v, 1.0));
                triplets.push((v, u, 1.0));
            }
        }
    }
    let adj = Csr::from_triplets(n, n, &triplets)?;

    let noise = Normal::new(0.0, 0.3).expect("valid normal");
    let mut features = Matrix::zeros(n, d);
    for i in 0..n {
        let c = labels[i] as usize % d;
        for j in 0..d {
            let mean = if j == c { 2.0 } else { 0.0 };
            features.data[i * d + j] = mean + noise.sample(&mut rng);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let n_train = (n * 3) / 10;
    let n_val = (n * 3) / 10;
    let mut masks = Masks {
        train: vec![false; n],
        val: vec![false; n],
        test: vec![false; n],
    };
    for (k, &i) in order.iter().enumerate() {
        if k < n_train {
            masks.train[i] = true;
        } else if k < n_train + n_val {
            masks.val[i] = true;
        } else {
            masks.test[i] = true;
        }
    }
    // every class must appear in the train split; swap in the first
    // unclaimed member of any missing class
    for c in 0..classes {
        if !(0..n).any(|i| masks.train[i] && labels[i] == c as i64) {
            let i = (0..n).find(|&i| labels[i] == c as i64).unwrap();
            masks.val[i] = false;
            masks.test[i] = false;
            masks.train[i] = true;
        }
    }

    let graph = SparseGraph {
        adj,
        features,
        labels,
        num_classes: classes,
        masks,
    };
    graph.validate()?;
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_stats;

    #[test]
    fn f64_round_trip_is_exact() {
        for v in [
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            -2.5e17,
            f64::MIN_POSITIVE,
        ] {
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn dataset_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let g = gen_synthetic(12, 3, 0.6, 0.1, 4, 7).unwrap();
        save_dataset(dir.path(), "toy", &g).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.features, g.features);
        assert_eq!(back.labels, g.labels);
        assert_eq!(back.adj.col_idx, g.adj.col_idx);
        assert_eq!(back.adj.row_ptr, g.adj.row_ptr);
        assert_eq!(back.masks.train, g.masks.train);
        assert_eq!(back.masks.val, g.masks.val);
        assert_eq!(back.masks.test, g.masks.test);
    }

    #[test]
    fn three_node_path_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let adj = Csr::from_triplets(
            3,
            3,
            &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap();
        let g = SparseGraph {
            adj,
            features: Matrix::new(3, 2, vec![1.0, 0.0, 0.5, 0.5, 0.0, 1.0]),
            labels: vec![0, 1, 0],
            num_classes: 2,
            masks: Masks {
                train: vec![true, true, false],
                val: vec![false, false, false],
                test: vec![false, false, true],
            },
        };
        save_dataset(dir.path(), "path3", &g).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.adj.to_dense(), g.adj.to_dense());
        assert_eq!(back.features, g.features);
    }

    #[test]
    fn edge_out_of_range_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = gen_synthetic(6, 2, 0.8, 0.1, 3, 1).unwrap();
        save_dataset(dir.path(), "toy", &g).unwrap();
        fs::write(dir.path().join("edges.tsv"), "0\t6\n").unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{:?}", err);
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn label_out_of_range_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = gen_synthetic(6, 2, 0.8, 0.1, 3, 1).unwrap();
        save_dataset(dir.path(), "toy", &g).unwrap();
        let mut labels = String::new();
        for _ in 0..6 {
            labels.push_str("5\n");
        }
        fs::write(dir.path().join("labels.txt"), labels).unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }

    #[test]
    fn split_count_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = gen_synthetic(6, 2, 0.8, 0.1, 3, 1).unwrap();
        save_dataset(dir.path(), "toy", &g).unwrap();
        fs::write(dir.path().join("splits.txt"), "0\n1\n2\n").unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn cora_format_fixture_shapes() {
        // a dataset with the canonical citation-graph profile: 2708 nodes,
        // 5429 undirected edges -> 10858 directed CSR entries
        let dir = tempfile::tempdir().unwrap();
        let n = 2708;
        let target = 5429usize;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < target {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                let (a, b) = (u.min(v), u.max(v));
                seen.insert((a, b));
            }
        }
        let mut triplets = Vec::new();
        for &(u, v) in &seen {
            triplets.push((u, v, 1.0));
            triplets.push((v, u, 1.0));
        }
        let g = SparseGraph {
            adj: Csr::from_triplets(n, n, &triplets).unwrap(),
            features: Matrix::zeros(n, 4),
            labels: (0..n).map(|i| (i % 7) as i64).collect(),
            num_classes: 7,
            masks: Masks {
                train: (0..n).map(|i| i < 140).collect(),
                val: (0..n).map(|i| (140..640).contains(&i)).collect(),
                test: (0..n).map(|i| i >= 1708).collect(),
            },
        };
        save_dataset(dir.path(), "cora-shape", &g).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.n(), 2708);
        assert_eq!(back.adj.col_idx.len(), 10858);
    }

    fn toy_condensed() -> (CondensedGraph, CondenseConfig) {
        let mut adj = Matrix::zeros(3, 3);
        adj.data[1] = 0.8;
        adj.data[3] = 0.8;
        let cond = CondensedGraph {
            features: Matrix::new(3, 2, vec![0.1, 1.0 / 3.0, -0.7, 2.5, 0.0, 1e-9]),
            phi: crate::models::ModelParams {
                layers: Vec::new(),
                rng_seed: 0,
            },
            labels: vec![0, 0, 1],
            num_classes: 2,
            delta: 0.05,
            variant: Variant::Gcond,
            adjacency: Some(adj),
        };
        let config = CondenseConfig {
            nodes: Some(3),
            ..CondenseConfig::default()
        };
        (cond, config)
    }

    #[test]
    fn condensed_round_trip_byte_identical() {
        let (cond, config) = toy_condensed();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        save_condensed(d1.path(), &cond, &config).unwrap();
        let (back, manifest) = load_condensed(d1.path()).unwrap();
        assert_eq!(back.features, cond.features);
        assert_eq!(back.adjacency, cond.adjacency);
        assert_eq!(manifest.delta, 0.05);
        save_condensed(d2.path(), &back, &manifest.config).unwrap();
        for f in ["manifest.json", "features.csv", "adjacency.csv", "labels.txt"] {
            let a = fs::read(d1.path().join(f)).unwrap();
            let b = fs::read(d2.path().join(f)).unwrap();
            assert_eq!(a, b, "{} differs after round trip", f);
        }
    }

    #[test]
    fn condensed_asymmetric_rejected() {
        let (cond, config) = toy_condensed();
        let dir = tempfile::tempdir().unwrap();
        save_condensed(dir.path(), &cond, &config).unwrap();
        let text = read_to_string(&dir.path().join("adjacency.csv")).unwrap();
        let broken = text.replacen(&fmt_f64(0.8), &fmt_f64(0.9), 1);
        fs::write(dir.path().join("adjacency.csv"), broken).unwrap();
        assert!(load_condensed(dir.path()).is_err());
    }

    #[test]
    fn condensed_shapes_at_headline_scale() {
        let dir = tempfile::tempdir().unwrap();
        let n = 70;
        let d = 1433;
        let cond = CondensedGraph {
            features: Matrix::zeros(n, d),
            phi: crate::models::ModelParams {
                layers: Vec::new(),
                rng_seed: 0,
            },
            labels: (0..n).map(|i| (i % 7) as i64).collect(),
            num_classes: 7,
            delta: 0.05,
            variant: Variant::Gcond,
            adjacency: Some(Matrix::identity(n)),
        };
        let config = CondenseConfig {
            nodes: Some(n),
            ..CondenseConfig::default()
        };
        save_condensed(dir.path(), &cond, &config).unwrap();
        let (back, manifest) = load_condensed(dir.path()).unwrap();
        assert_eq!(back.features.shape(), (70, 1433));
        assert_eq!(manifest.n_prime, 70);
    }

    #[test]
    fn synthetic_deterministic_and_block_structured() {
        let a = gen_synthetic(30, 2, 1.0, 0.0, 4, 11).unwrap();
        let b = gen_synthetic(30, 2, 1.0, 0.0, 4, 11).unwrap();
        assert_eq!(a.features, b.features);
        assert_eq!(a.adj.col_idx, b.adj.col_idx);

        // p_in=1, p_out=0: every edge joins same-label endpoints
        let stats = graph_stats(&a.adj, &a.labels, a.dim(), 0.5);
        assert_eq!(stats.homophily, 1.0);
        // and the graph is disconnected across blocks
        for u in 0..a.n() {
            let (cols, _) = a.adj.row(u);
            for &v in cols {
                assert_eq!(a.labels[u], a.labels[v]);
            }
        }
    }

    #[test]
    fn synthetic_homophily_dominates_at_low_crossover() {
        let g = gen_synthetic(100, 2, 0.3, 0.02, 8, 5).unwrap();
        let stats = graph_stats(&g.adj, &g.labels, g.dim(), 0.5);
        assert!(stats.homophily > 0.8, "homophily = {}", stats.homophily);
    }

    #[test]
    fn synthetic_rejects_bad_probabilities() {
        assert!(gen_synthetic(10, 2, 0.1, 0.5, 2, 0).is_err());
        assert!(gen_synthetic(10, 2, 1.5, 0.0, 2, 0).is_err());
    }
}

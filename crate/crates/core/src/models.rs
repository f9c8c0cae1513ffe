//! GNN architectures, parameter initialization, a supervised trainer, and
//! analytic parameter-gradient graphs for the condensation-side models.
//!
//! The matching loss needs d(loss)/d(X', Phi) where the loss itself consumes
//! parameter gradients. Instead of double-backward, the parameter gradients
//! of SGC/GCN heads are written out as primal tape expressions
//! ([`inner_param_grads`]), so one reverse sweep differentiates them with
//! respect to the synthetic features and structure.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{normalize_row, normalize_sym, Csr, SparseGraph};
use crate::ndtape::{Matrix, Tape, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Arch {
    Sgc,
    Gcn,
    Appnp,
    SageMean,
    Mlp,
}

impl Arch {
    pub fn parse(s: &str) -> Result<Arch> {
        match s.to_ascii_lowercase().as_str() {
            "sgc" => Ok(Arch::Sgc),
            "gcn" => Ok(Arch::Gcn),
            "appnp" => Ok(Arch::Appnp),
            "sage" | "sage_mean" | "graphsage" => Ok(Arch::SageMean),
            "mlp" => Ok(Arch::Mlp),
            other => Err(Error::Config(format!("unknown architecture '{}'", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Arch::Sgc => "sgc",
            Arch::Gcn => "gcn",
            Arch::Appnp => "appnp",
            Arch::SageMean => "sage",
            Arch::Mlp => "mlp",
        }
    }
}

/// Architecture description. `layers` counts linear transformation layers.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ModelSpec {
    pub arch: Arch,
    pub layers: usize,
    pub hidden: usize,
    /// Propagation steps for SGC/APPNP.
    pub k_prop: usize,
    /// APPNP residual coefficient.
    pub alpha: f64,
    pub dropout: f64,
    pub weight_decay: f64,
}

impl ModelSpec {
    pub fn new(arch: Arch) -> ModelSpec {
        ModelSpec {
            arch,
            layers: 2,
            hidden: 256,
            k_prop: 2,
            alpha: 0.1,
            dropout: 0.0,
            weight_decay: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers < 1 {
            return Err(Error::Config("layers must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config("dropout must be in [0,1)".into()));
        }
        if matches!(self.arch, Arch::Sgc | Arch::Appnp) && self.k_prop < 1 {
            return Err(Error::Config("k_prop must be >= 1 for SGC/APPNP".into()));
        }
        Ok(())
    }

    /// Input width of linear layer `l` given the previous width.
    fn layer_in(&self, prev: usize) -> usize {
        match self.arch {
            Arch::SageMean => 2 * prev,
            _ => prev,
        }
    }

    fn widths(&self, in_dim: usize, out_dim: usize) -> Vec<(usize, usize)> {
        let mut dims = Vec::new();
        let mut prev = in_dim;
        for l in 0..self.layers {
            let out = if l + 1 == self.layers { out_dim } else { self.hidden };
            dims.push((self.layer_in(prev), out));
            prev = out;
        }
        dims
    }
}

#[derive(Debug, Clone)]
pub struct LayerParams {
    pub w: Matrix,
    pub b: Matrix,
}

/// Parameter set theta for one model instance.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub layers: Vec<LayerParams>,
    pub rng_seed: u64,
}

impl ModelParams {
    pub fn flat(&self) -> Vec<&Matrix> {
        self.layers.iter().flat_map(|l| [&l.w, &l.b]).collect()
    }
}

/// Weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
/// Deterministic per seed; fresh seeds realize fresh draws from the
/// initialization distribution.
pub fn init_params(spec: &ModelSpec, in_dim: usize, out_dim: usize, seed: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    for (fan_in, fan_out) in spec.widths(in_dim, out_dim) {
        let bound = 1.0 / (fan_in as f64).sqrt();
        let w = Matrix::new(
            fan_in,
            fan_out,
            (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-bound..bound))
                .collect(),
        );
        let b = Matrix::zeros(1, fan_out);
        layers.push(LayerParams { w, b });
    }
    ModelParams {
        layers,
        rng_seed: seed,
    }
}

/// Adjacency operand for a forward pass. `Dense` is a tape variable so the
/// structure itself can be a differentiable expression; `Sparse` is a
/// normalized constant.
#[derive(Clone)]
pub enum AdjRef {
    Identity,
    Dense(Var),
    Sparse(Arc<Csr>),
}

/// Owned adjacency source, convertible to tape operands.
#[derive(Debug, Clone)]
pub enum AdjSource {
    Identity,
    Sparse(Arc<Csr>),
    Dense(Arc<Matrix>),
}

/// Propagation context: symmetric-normalized operand for GCN/SGC/APPNP and
/// row-normalized (mean) operand for SAGE.
#[derive(Debug, Clone)]
pub struct GraphCtx {
    pub prop: AdjSource,
    pub mean: AdjSource,
}

impl GraphCtx {
    pub fn identity() -> GraphCtx {
        GraphCtx {
            prop: AdjSource::Identity,
            mean: AdjSource::Identity,
        }
    }

    pub fn from_sparse(adj: &Csr) -> Result<GraphCtx> {
        Ok(GraphCtx {
            prop: AdjSource::Sparse(Arc::new(normalize_sym(adj, true)?)),
            mean: AdjSource::Sparse(Arc::new(normalize_row(adj)?)),
        })
    }

    pub fn from_graph(graph: &SparseGraph) -> Result<GraphCtx> {
        GraphCtx::from_sparse(&graph.adj)
    }

    /// Normalize a dense weighted adjacency (self loops added) into both
    /// operand forms.
    pub fn from_dense(adj: &Matrix) -> Result<GraphCtx> {
        if adj.rows != adj.cols {
            return Err(Error::Dimension("dense adjacency must be square".into()));
        }
        let n = adj.rows;
        let mut with_loops = adj.clone();
        for i in 0..n {
            with_loops.data[i * n + i] += 1.0;
        }
        let mut sym = with_loops.clone();
        let deg: Vec<f64> = (0..n).map(|i| with_loops.row(i).iter().sum()).collect();
        let dinv: Vec<f64> = deg
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        for i in 0..n {
            for j in 0..n {
                sym.data[i * n + j] *= dinv[i] * dinv[j];
            }
        }
        let mut mean = adj.clone();
        for i in 0..n {
            let d: f64 = adj.row(i).iter().sum();
            if d > 0.0 {
                for j in 0..n {
                    mean.data[i * n + j] /= d;
                }
            }
        }
        Ok(GraphCtx {
            prop: AdjSource::Dense(Arc::new(sym)),
            mean: AdjSource::Dense(Arc::new(mean)),
        })
    }
}

pub fn propagate(tape: &mut Tape, adj: &AdjSource, h: Var) -> Result<Var> {
    match adj {
        AdjSource::Identity => Ok(h),
        AdjSource::Sparse(c) => tape.spmm(Arc::clone(c), h),
        AdjSource::Dense(m) => {
            let a = tape.constant((**m).clone());
            tape.matmul(a, h)
        }
    }
}

fn propagate_ref(tape: &mut Tape, adj: &AdjRef, h: Var) -> Result<Var> {
    match adj {
        AdjRef::Identity => Ok(h),
        AdjRef::Dense(a) => tape.matmul(*a, h),
        AdjRef::Sparse(c) => tape.spmm(Arc::clone(c), h),
    }
}

/// Seeded inverted-dropout mask, applied only when `rate > 0`.
fn dropout(tape: &mut Tape, h: Var, rate: f64, rng: &mut impl Rng) -> Result<Var> {
    if rate <= 0.0 {
        return Ok(h);
    }
    let (r, c) = tape.shape(h);
    let keep = 1.0 - rate;
    let mask = Matrix::new(
        r,
        c,
        (0..r * c)
            .map(|_| if rng.gen_bool(keep) { 1.0 / keep } else { 0.0 })
            .collect(),
    );
    let m = tape.constant(mask);
    tape.mul(h, m)
}

pub struct ParamVars {
    pub layers: Vec<(Var, Var)>,
}

pub fn params_to_vars(tape: &mut Tape, params: &ModelParams, learnable: bool) -> ParamVars {
    let layers = params
        .layers
        .iter()
        .map(|l| {
            if learnable {
                (tape.leaf(l.w.clone()), tape.leaf(l.b.clone()))
            } else {
                (tape.constant(l.w.clone()), tape.constant(l.b.clone()))
            }
        })
        .collect();
    ParamVars { layers }
}

/// Full forward pass producing logits for every node.
pub fn forward(
    tape: &mut Tape,
    spec: &ModelSpec,
    vars: &ParamVars,
    ctx: &GraphCtx,
    x: Var,
    train_rng: Option<&mut ChaCha8Rng>,
) -> Result<Var> {
    spec.validate()?;
    if vars.layers.len() != spec.layers {
        return Err(Error::Dimension(format!(
            "expected {} layers of parameters, got {}",
            spec.layers,
            vars.layers.len()
        )));
    }
    let mut drop_rng = train_rng;
    let rate = if drop_rng.is_some() { spec.dropout } else { 0.0 };
    let mut apply_dropout = |tape: &mut Tape, h: Var| -> Result<Var> {
        match drop_rng.as_deref_mut() {
            Some(rng) if rate > 0.0 => dropout(tape, h, rate, rng),
            _ => Ok(h),
        }
    };

    let mlp = |tape: &mut Tape,
               vars: &ParamVars,
               mut h: Var,
               drop: &mut dyn FnMut(&mut Tape, Var) -> Result<Var>|
     -> Result<Var> {
        for (l, (w, b)) in vars.layers.iter().enumerate() {
            h = drop(tape, h)?;
            let z = tape.matmul(h, *w)?;
            let z = tape.add_row_vec(z, *b)?;
            h = if l + 1 < vars.layers.len() { tape.relu(z) } else { z };
        }
        Ok(h)
    };

    match spec.arch {
        Arch::Mlp => mlp(tape, vars, x, &mut apply_dropout),
        Arch::Sgc => {
            let mut p = x;
            for _ in 0..spec.k_prop {
                p = propagate(tape, &ctx.prop, p)?;
            }
            mlp(tape, vars, p, &mut apply_dropout)
        }
        Arch::Appnp => {
            let z0 = mlp(tape, vars, x, &mut apply_dropout)?;
            let mut z = z0;
            for _ in 0..spec.k_prop {
                let pz = propagate(tape, &ctx.prop, z)?;
                let a = tape.scale(pz, 1.0 - spec.alpha);
                let b = tape.scale(z0, spec.alpha);
                z = tape.add(a, b)?;
            }
            Ok(z)
        }
        Arch::Gcn => {
            let mut h = x;
            for (l, (w, b)) in vars.layers.iter().enumerate() {
                h = apply_dropout(tape, h)?;
                let hw = tape.matmul(h, *w)?;
                let ph = propagate(tape, &ctx.prop, hw)?;
                let z = tape.add_row_vec(ph, *b)?;
                h = if l + 1 < vars.layers.len() { tape.relu(z) } else { z };
            }
            Ok(h)
        }
        Arch::SageMean => {
            let mut h = x;
            for (l, (w, b)) in vars.layers.iter().enumerate() {
                h = apply_dropout(tape, h)?;
                let m = propagate(tape, &ctx.mean, h)?;
                let cat = tape.hconcat(h, m)?;
                let z = tape.matmul(cat, *w)?;
                let z = tape.add_row_vec(z, *b)?;
                h = if l + 1 < vars.layers.len() { tape.relu(z) } else { z };
            }
            Ok(h)
        }
    }
}

/// Logits for every node without recording gradients.
pub fn predict(
    spec: &ModelSpec,
    params: &ModelParams,
    ctx: &GraphCtx,
    x: &Matrix,
) -> Result<Matrix> {
    let mut tape = Tape::new();
    let xv = tape.constant(x.clone());
    let vars = params_to_vars(&mut tape, params, false);
    let logits = forward(&mut tape, spec, &vars, ctx, xv, None)?;
    Ok(tape.value(logits).clone())
}

pub fn accuracy(logits: &Matrix, labels: &[i64], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let mut correct = 0usize;
    for &i in idx {
        let row = logits.row(i);
        let pred = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(j, _)| j)
            .unwrap();
        if labels[i] == pred as i64 {
            correct += 1;
        }
    }
    correct as f64 / idx.len() as f64
}

/// Training inputs: a propagation context, features, and labeled node ids.
pub struct TrainData<'a> {
    pub ctx: &'a GraphCtx,
    pub features: &'a Matrix,
    pub labels: &'a [i64],
    pub train_idx: &'a [usize],
}

/// Validation for best-epoch checkpointing: full-graph inference on the
/// original data.
pub struct ValContext<'a> {
    pub ctx: &'a GraphCtx,
    pub features: &'a Matrix,
    pub labels: &'a [i64],
    pub val_idx: &'a [usize],
    /// Epoch interval between validation passes.
    pub every: usize,
}

pub struct TrainOutcome {
    pub val_curve: Vec<f64>,
    pub best_val: f64,
}

/// Full-batch gradient descent with L2 weight decay. When a validation
/// context is given, the parameters of the best validation epoch are kept.
pub fn train(
    spec: &ModelSpec,
    params: &mut ModelParams,
    data: &TrainData,
    epochs: usize,
    lr: f64,
    val: Option<&ValContext>,
    dropout_seed: u64,
) -> Result<TrainOutcome> {
    if data.train_idx.is_empty() {
        return Err(Error::Validation("no labeled training nodes".into()));
    }
    let train_labels: Arc<Vec<usize>> = Arc::new(
        data.train_idx
            .iter()
            .map(|&i| data.labels[i] as usize)
            .collect(),
    );
    let train_idx = Arc::new(data.train_idx.to_vec());
    let mut drop_rng = ChaCha8Rng::seed_from_u64(dropout_seed);
    let mut best: Option<(f64, Vec<LayerParams>)> = None;
    let mut curve = Vec::new();

    for epoch in 0..epochs {
        let mut tape = Tape::new();
        let xv = tape.constant(data.features.clone());
        let vars = params_to_vars(&mut tape, params, true);
        let logits = forward(&mut tape, spec, &vars, data.ctx, xv, Some(&mut drop_rng))?;
        let batch = tape.gather_rows(logits, Arc::clone(&train_idx))?;
        let loss = tape.softmax_cross_entropy(batch, Arc::clone(&train_labels))?;
        let lv = tape.value(loss).data[0];
        if !lv.is_finite() {
            return Err(Error::Diverged {
                iteration: epoch,
                message: format!("training loss {}", lv),
            });
        }
        let grads = tape.backward(loss)?;
        for (lp, (wv, bv)) in params.layers.iter_mut().zip(&vars.layers) {
            let gw = grads.get(&tape, *wv);
            let gb = grads.get(&tape, *bv);
            for k in 0..lp.w.data.len() {
                lp.w.data[k] -= lr * (gw.data[k] + spec.weight_decay * lp.w.data[k]);
            }
            for k in 0..lp.b.data.len() {
                lp.b.data[k] -= lr * gb.data[k];
            }
        }

        if let Some(v) = val {
            if epoch % v.every.max(1) == 0 || epoch + 1 == epochs {
                let logits = predict(spec, params, v.ctx, v.features)?;
                let acc = accuracy(&logits, v.labels, v.val_idx);
                curve.push(acc);
                if best.as_ref().map_or(true, |(b, _)| acc > *b) {
                    best = Some((acc, params.layers.clone()));
                }
            }
        }
    }
    let best_val = if let Some((acc, layers)) = best {
        params.layers = layers;
        acc
    } else {
        0.0
    };
    Ok(TrainOutcome {
        val_curve: curve,
        best_val,
    })
}

/// Analytic gradients of mean cross-entropy with respect to theta, expressed
/// as primal tape operations so they stay differentiable in the adjacency
/// and feature expressions. Supports SGC and GCN heads with 1 or 2 linear
/// layers; relu masks are treated as constants.
///
/// Returns one Var per parameter tensor, ordered [W1, b1, (W2, b2)].
pub fn inner_param_grads(
    tape: &mut Tape,
    spec: &ModelSpec,
    vars: &ParamVars,
    adj: AdjRef,
    x: Var,
    labels: &[usize],
    batch: &[usize],
) -> Result<Vec<Var>> {
    if !matches!(spec.arch, Arch::Sgc | Arch::Gcn) {
        return Err(Error::Unsupported(format!(
            "inner_param_grads supports SGC/GCN, got {}",
            spec.arch.name()
        )));
    }
    if spec.layers > 2 {
        return Err(Error::Unsupported(
            "inner_param_grads supports at most 2 transformation layers".into(),
        ));
    }
    if batch.len() != labels.len() {
        return Err(Error::Dimension("batch/label length mismatch".into()));
    }
    let n_b = batch.len();
    if n_b == 0 {
        return Err(Error::Validation("empty batch".into()));
    }
    let batch_idx = Arc::new(batch.to_vec());
    let num_classes = {
        let (_, out) = tape.shape(vars.layers.last().unwrap().0);
        out
    };
    let mut onehot = Matrix::zeros(n_b, num_classes);
    for (r, &y) in labels.iter().enumerate() {
        if y >= num_classes {
            return Err(Error::Validation(format!("label {} out of range", y)));
        }
        onehot.data[r * num_classes + y] = 1.0;
    }
    let onehot = tape.constant(onehot);

    // delta = (softmax(logits_B) - onehot) / n_B
    let delta_from = |tape: &mut Tape, logits_b: Var| -> Result<Var> {
        let s = tape.softmax_rows(logits_b);
        let d = tape.sub(s, onehot)?;
        Ok(tape.scale(d, 1.0 / n_b as f64))
    };

    match spec.arch {
        Arch::Sgc => {
            let mut p = x;
            for _ in 0..spec.k_prop {
                p = propagate_ref(tape, &adj, p)?;
            }
            let p_b = tape.gather_rows(p, Arc::clone(&batch_idx))?;
            if spec.layers == 1 {
                let (w, b) = vars.layers[0];
                let z = tape.matmul(p_b, w)?;
                let logits = tape.add_row_vec(z, b)?;
                let delta = delta_from(tape, logits)?;
                let pt = tape.transpose(p_b);
                let gw = tape.matmul(pt, delta)?;
                let gb = tape.col_sum(delta);
                Ok(vec![gw, gb])
            } else {
                let (w1, b1) = vars.layers[0];
                let (w2, b2) = vars.layers[1];
                let z1 = tape.matmul(p_b, w1)?;
                let z1 = tape.add_row_vec(z1, b1)?;
                let h = tape.relu(z1);
                let z2 = tape.matmul(h, w2)?;
                let logits = tape.add_row_vec(z2, b2)?;
                let delta = delta_from(tape, logits)?;
                let ht = tape.transpose(h);
                let gw2 = tape.matmul(ht, delta)?;
                let gb2 = tape.col_sum(delta);
                let w2t = tape.transpose(w2);
                let up = tape.matmul(delta, w2t)?;
                let mask = tape.heaviside(z1);
                let u = tape.mul(up, mask)?;
                let pt = tape.transpose(p_b);
                let gw1 = tape.matmul(pt, u)?;
                let gb1 = tape.col_sum(u);
                Ok(vec![gw1, gb1, gw2, gb2])
            }
        }
        Arch::Gcn => {
            if spec.layers == 1 {
                let (w, b) = vars.layers[0];
                let px = propagate_ref(tape, &adj, x)?;
                let p_b = tape.gather_rows(px, Arc::clone(&batch_idx))?;
                let z = tape.matmul(p_b, w)?;
                let logits = tape.add_row_vec(z, b)?;
                let delta = delta_from(tape, logits)?;
                let pt = tape.transpose(p_b);
                let gw = tape.matmul(pt, delta)?;
                let gb = tape.col_sum(delta);
                Ok(vec![gw, gb])
            } else {
                let n = tape.shape(x).0;
                let (w1, b1) = vars.layers[0];
                let (w2, b2) = vars.layers[1];
                // layer 1 over all rows: Z1 = (A X) W1 + b1, H = relu(Z1)
                let u0 = propagate_ref(tape, &adj, x)?;
                let z1 = tape.matmul(u0, w1)?;
                let z1 = tape.add_row_vec(z1, b1)?;
                let h = tape.relu(z1);
                // layer 2 on batch rows: logits_B = gather(A H) W2 + b2
                let ah = propagate_ref(tape, &adj, h)?;
                let ah_b = tape.gather_rows(ah, Arc::clone(&batch_idx))?;
                let z2 = tape.matmul(ah_b, w2)?;
                let logits = tape.add_row_vec(z2, b2)?;
                let delta = delta_from(tape, logits)?;
                let aht = tape.transpose(ah_b);
                let gw2 = tape.matmul(aht, delta)?;
                let gb2 = tape.col_sum(delta);
                // upstream: G_H = A^T scatter(delta W2^T); A is symmetric here
                // but the transpose is taken explicitly.
                let w2t = tape.transpose(w2);
                let dw = tape.matmul(delta, w2t)?;
                let scat = tape.scatter_rows(dw, Arc::clone(&batch_idx), n)?;
                let gh = match &adj {
                    AdjRef::Identity => scat,
                    AdjRef::Dense(a) => {
                        let at = tape.transpose(*a);
                        tape.matmul(at, scat)?
                    }
                    AdjRef::Sparse(c) => tape.spmm(Arc::new(c.transpose()), scat)?,
                };
                let mask = tape.heaviside(z1);
                let u = tape.mul(gh, mask)?;
                let u0t = tape.transpose(u0);
                let gw1 = tape.matmul(u0t, u)?;
                let gb1 = tape.col_sum(u);
                Ok(vec![gw1, gb1, gw2, gb2])
            }
        }
        _ => unreachable!(),
    }
}

/// AD-of-forward parameter gradients, the oracle that [`inner_param_grads`]
/// must agree with.
pub fn param_grads_by_ad(
    spec: &ModelSpec,
    params: &ModelParams,
    ctx: &GraphCtx,
    x: &Matrix,
    labels: &[usize],
    batch: &[usize],
) -> Result<Vec<Matrix>> {
    let mut tape = Tape::new();
    let xv = tape.constant(x.clone());
    let vars = params_to_vars(&mut tape, params, true);
    let logits = forward(&mut tape, spec, &vars, ctx, xv, None)?;
    let logits_b = tape.gather_rows(logits, Arc::new(batch.to_vec()))?;
    let loss = tape.softmax_cross_entropy(logits_b, Arc::new(labels.to_vec()))?;
    let grads = tape.backward(loss)?;
    let mut out = Vec::new();
    for (w, b) in &vars.layers {
        out.push(grads.get(&tape, *w));
        out.push(grads.get(&tape, *b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Csr;

    fn two_clique_ctx() -> GraphCtx {
        let adj = Csr::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        GraphCtx::from_sparse(&adj).unwrap()
    }

    #[test]
    fn init_deterministic_per_seed() {
        let spec = ModelSpec::new(Arch::Gcn);
        let a = init_params(&spec, 5, 3, 42);
        let b = init_params(&spec, 5, 3, 42);
        for (la, lb) in a.layers.iter().zip(&b.layers) {
            assert_eq!(la.w, lb.w);
            assert_eq!(la.b, lb.b);
        }
        let c = init_params(&spec, 5, 3, 43);
        assert_ne!(a.layers[0].w, c.layers[0].w);
    }

    #[test]
    fn init_bound_and_zero_bias() {
        let spec = ModelSpec {
            layers: 1,
            ..ModelSpec::new(Arch::Mlp)
        };
        // fan_in 4 -> entries in [-0.5, 0.5]; bound checked over many draws
        for seed in 0..100 {
            let p = init_params(&spec, 4, 25, seed);
            assert!(p.layers[0].w.data.iter().all(|&v| (-0.5..0.5).contains(&v)));
            assert!(p.layers[0].b.data.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn mlp_forward_ignores_adjacency() {
        let spec = ModelSpec::new(Arch::Mlp);
        let params = init_params(&spec, 3, 2, 1);
        let x = Matrix::from_rows(&[vec![0.1, 0.2, 0.3], vec![-0.4, 0.5, 0.6]]);
        let a = predict(&spec, &params, &two_clique_ctx(), &x).unwrap();
        let b = predict(&spec, &params, &GraphCtx::identity(), &x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sgc_k1_identity_equals_linear_map() {
        let spec = ModelSpec {
            layers: 1,
            k_prop: 1,
            ..ModelSpec::new(Arch::Sgc)
        };
        let params = init_params(&spec, 3, 2, 7);
        let x = Matrix::from_rows(&[vec![1.0, -1.0, 0.5]]);
        let got = predict(&spec, &params, &GraphCtx::identity(), &x).unwrap();
        let want = x.matmul(&params.layers[0].w).unwrap();
        for k in 0..2 {
            assert!((got.data[k] - (want.data[k] + params.layers[0].b.data[k])).abs() < 1e-14);
        }
    }

    #[test]
    fn sgc1_equals_gcn1() {
        // single-layer case: propagation commutes with the single linear map
        let sgc = ModelSpec {
            layers: 1,
            k_prop: 1,
            ..ModelSpec::new(Arch::Sgc)
        };
        let gcn = ModelSpec {
            layers: 1,
            ..ModelSpec::new(Arch::Gcn)
        };
        let params = init_params(&sgc, 3, 2, 5);
        let ctx = two_clique_ctx();
        let x = Matrix::from_rows(&[vec![0.3, 1.0, -0.2], vec![0.8, -0.5, 0.1]]);
        let a = predict(&sgc, &params, &ctx, &x).unwrap();
        let b = predict(&gcn, &params, &ctx, &x).unwrap();
        for k in 0..a.data.len() {
            assert!((a.data[k] - b.data[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn gcn_one_layer_two_clique_hand_case() {
        // normalized 2-clique is all 0.5; with W=I2, b=0:
        // logits = 0.5 * (x0+x1) for both rows
        let spec = ModelSpec {
            layers: 1,
            ..ModelSpec::new(Arch::Gcn)
        };
        let params = ModelParams {
            layers: vec![LayerParams {
                w: Matrix::identity(2),
                b: Matrix::zeros(1, 2),
            }],
            rng_seed: 0,
        };
        let x = Matrix::from_rows(&[vec![2.0, 0.0], vec![4.0, 6.0]]);
        let got = predict(&spec, &params, &two_clique_ctx(), &x).unwrap();
        for v in got.data {
            assert!((v - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn appnp_alpha_one_equals_mlp() {
        let appnp = ModelSpec {
            alpha: 1.0,
            ..ModelSpec::new(Arch::Appnp)
        };
        let mlp = ModelSpec::new(Arch::Mlp);
        let params = init_params(&mlp, 3, 2, 9);
        let x = Matrix::from_rows(&[vec![0.2, -0.7, 1.1], vec![0.9, 0.4, -0.3]]);
        let a = predict(&appnp, &params, &two_clique_ctx(), &x).unwrap();
        let b = predict(&mlp, &params, &GraphCtx::identity(), &x).unwrap();
        for k in 0..a.data.len() {
            assert!((a.data[k] - b.data[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn train_zero_epochs_leaves_params_unchanged() {
        let spec = ModelSpec::new(Arch::Mlp);
        let mut params = init_params(&spec, 2, 2, 3);
        let before = params.layers[0].w.clone();
        let ctx = GraphCtx::identity();
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let labels = vec![0i64, 1];
        let data = TrainData {
            ctx: &ctx,
            features: &x,
            labels: &labels,
            train_idx: &[0, 1],
        };
        train(&spec, &mut params, &data, 0, 0.1, None, 0).unwrap();
        assert_eq!(params.layers[0].w, before);
    }

    #[test]
    fn train_separable_toy_reaches_full_accuracy() {
        // two well-separated clusters; linearly separable by construction
        let spec = ModelSpec {
            hidden: 16,
            ..ModelSpec::new(Arch::Mlp)
        };
        let mut params = init_params(&spec, 2, 2, 1);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let e = 0.01 * i as f64;
            rows.push(vec![1.0 + e, 0.0]);
            labels.push(0i64);
            rows.push(vec![-1.0 - e, 0.1]);
            labels.push(1i64);
        }
        let x = Matrix::from_rows(&rows);
        let ctx = GraphCtx::identity();
        let idx: Vec<usize> = (0..20).collect();
        let data = TrainData {
            ctx: &ctx,
            features: &x,
            labels: &labels,
            train_idx: &idx,
        };
        train(&spec, &mut params, &data, 200, 0.5, None, 0).unwrap();
        let logits = predict(&spec, &params, &ctx, &x).unwrap();
        assert_eq!(accuracy(&logits, &labels, &idx), 1.0);
    }

    fn rand_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::new(r, c, (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    #[test]
    fn inner_grads_match_ad_oracle() {
        // the module's central test: analytic primal gradients == AD gradients
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for arch in [Arch::Sgc, Arch::Gcn] {
            for layers in [1usize, 2] {
                let spec = ModelSpec {
                    layers,
                    hidden: 8,
                    k_prop: 2,
                    ..ModelSpec::new(arch)
                };
                let n = 7;
                let d = 5;
                let c = 3;
                let params = init_params(&spec, d, c, 100 + layers as u64);
                let x = rand_matrix(&mut rng, n, d);
                // random symmetric dense adjacency, normalized
                let mut raw = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        let v = rng.gen_range(0.0..1.0);
                        raw.data[i * n + j] = v;
                        raw.data[j * n + i] = v;
                    }
                }
                let ctx = GraphCtx::from_dense(&raw).unwrap();
                let batch = vec![0usize, 2, 4, 5];
                let labels = vec![0usize, 1, 2, 1];

                let oracle = param_grads_by_ad(&spec, &params, &ctx, &x, &labels, &batch).unwrap();

                let mut tape = Tape::new();
                let xv = tape.constant(x.clone());
                let adj = match &ctx.prop {
                    AdjSource::Dense(m) => AdjRef::Dense(tape.constant((**m).clone())),
                    _ => unreachable!(),
                };
                let vars = params_to_vars(&mut tape, &params, false);
                let analytic =
                    inner_param_grads(&mut tape, &spec, &vars, adj, xv, &labels, &batch).unwrap();

                assert_eq!(oracle.len(), analytic.len());
                for (o, a) in oracle.iter().zip(&analytic) {
                    let av = tape.value(*a);
                    assert_eq!(o.shape(), av.shape());
                    for k in 0..o.data.len() {
                        let denom = o.data[k].abs().max(1e-8);
                        let rel = (o.data[k] - av.data[k]).abs() / denom;
                        assert!(
                            rel < 1e-10,
                            "{:?} {} layers entry {}: {} vs {}",
                            arch,
                            layers,
                            k,
                            o.data[k],
                            av.data[k]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inner_grads_uniform_logits_closed_form() {
        // 1-layer SGC with zero weights: softmax uniform, gW = P^T (1/C - onehot)/n
        let spec = ModelSpec {
            layers: 1,
            k_prop: 1,
            ..ModelSpec::new(Arch::Sgc)
        };
        let c = 4;
        let params = ModelParams {
            layers: vec![LayerParams {
                w: Matrix::zeros(2, c),
                b: Matrix::zeros(1, c),
            }],
            rng_seed: 0,
        };
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -1.0]]);
        let mut tape = Tape::new();
        let xv = tape.constant(x.clone());
        let vars = params_to_vars(&mut tape, &params, false);
        let grads = inner_param_grads(
            &mut tape,
            &spec,
            &vars,
            AdjRef::Identity,
            xv,
            &[0, 1],
            &[0, 1],
        )
        .unwrap();
        let gw = tape.value(grads[0]);
        let mut delta = Matrix::filled(2, c, 1.0 / c as f64);
        delta.data[0] -= 1.0;
        delta.data[c + 1] -= 1.0;
        delta.scale_assign(0.5);
        let want = x.transpose().matmul(&delta).unwrap();
        for k in 0..gw.data.len() {
            assert!((gw.data[k] - want.data[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn inner_grads_reject_unsupported() {
        let spec = ModelSpec::new(Arch::Appnp);
        let params = init_params(&spec, 2, 2, 0);
        let mut tape = Tape::new();
        let x = tape.constant(Matrix::zeros(2, 2));
        let vars = params_to_vars(&mut tape, &params, false);
        assert!(
            inner_param_grads(&mut tape, &spec, &vars, AdjRef::Identity, x, &[0], &[0]).is_err()
        );

        let spec3 = ModelSpec {
            layers: 3,
            ..ModelSpec::new(Arch::Sgc)
        };
        let params3 = init_params(&spec3, 2, 2, 0);
        let mut tape = Tape::new();
        let x = tape.constant(Matrix::zeros(2, 2));
        let vars = params_to_vars(&mut tape, &params3, false);
        assert!(
            inner_param_grads(&mut tape, &spec3, &vars, AdjRef::Identity, x, &[0], &[0]).is_err()
        );
    }

    #[test]
    fn forward_deterministic_with_dropout_seed() {
        let spec = ModelSpec {
            dropout: 0.5,
            ..ModelSpec::new(Arch::Mlp)
        };
        let params = init_params(&spec, 4, 2, 2);
        let x = Matrix::from_rows(&[vec![0.1, 0.2, 0.3, 0.4]]);
        let run = || {
            let mut tape = Tape::new();
            let xv = tape.constant(x.clone());
            let vars = params_to_vars(&mut tape, &params, false);
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let out = forward(
                &mut tape,
                &spec,
                &vars,
                &GraphCtx::identity(),
                xv,
                Some(&mut rng),
            )
            .unwrap();
            tape.value(out).clone()
        };
        assert_eq!(run(), run());
    }
}

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Csr;
use crate::ndtape::Matrix;

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(pub(crate) usize);

#[derive(Debug)]
enum Op {
    /// Learnable leaf; gradients accumulate here.
    Leaf,
    /// Constant; no gradient flows into it.
    Const,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Scale(usize, f64),
    /// x + b with b a 1xC row vector broadcast over rows.
    AddRowVec(usize, usize),
    Relu(usize),
    Sigmoid(usize),
    /// 1[x > 0]; derivative defined as zero everywhere (stop-gradient mask).
    Heaviside,
    MatMul(usize, usize),
    /// Sparse-constant times dense-variable; the CSR and its transpose are fixed.
    SpmmConst(Arc<Csr>, usize),
    Transpose(usize),
    GatherRows(usize, Arc<Vec<usize>>),
    /// Place rows of a small matrix at the given indices of an n-row zero matrix.
    ScatterRows(usize, Arc<Vec<usize>>),
    HConcat(usize, usize),
    Reshape(usize),
    /// Nx1 column of row sums.
    RowSum(usize),
    /// 1xC row of column sums.
    ColSum(usize),
    /// x^(-1/2) with x <= eps mapped to 0 (zero-degree convention).
    RsqrtOrZero(usize),
    /// Scale row i of a by v[i] (v is Nx1).
    MulColVec(usize, usize),
    /// Scale column j of a by w[j] (w is 1xC).
    MulRowVec(usize, usize),
    SoftmaxRows(usize),
    /// Mean cross-entropy of row-wise softmax against integer labels; 1x1.
    SoftmaxCrossEntropy(usize, Arc<Vec<usize>>),
    /// Sum over columns of (1 - cos(a_col, t_col)) against a constant target; 1x1.
    /// Gradient flows into `a` only.
    CosineColDistance(usize, Arc<Matrix>),
    SumAll(usize),
}

struct Node {
    op: Op,
    value: Matrix,
    needs_grad: bool,
}

/// Recording tape for reverse-mode differentiation. Nodes are replayed in
/// reverse recording order by [`Tape::backward`]. A tape is single-threaded.
pub struct Tape {
    nodes: Vec<Node>,
}

const ZERO_NORM_EPS: f64 = 1e-12;

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Matrix, needs_grad: bool) -> Var {
        self.nodes.push(Node {
            op,
            value,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    /// Record a learnable leaf.
    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(Op::Leaf, value, true)
    }

    /// Record a constant.
    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push(Op::Const, value, false)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).zip(self.value(b), |x, y| x + y)?;
        Ok(self.push(Op::Add(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).zip(self.value(b), |x, y| x - y)?;
        Ok(self.push(Op::Sub(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).zip(self.value(b), |x, y| x * y)?;
        Ok(self.push(Op::Mul(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn scale(&mut self, a: Var, s: f64) -> Var {
        let v = self.value(a).map(|x| x * s);
        let g = self.needs(a);
        self.push(Op::Scale(a.0, s), v, g)
    }

    pub fn add_row_vec(&mut self, a: Var, b: Var) -> Result<Var> {
        let (r, c) = self.shape(a);
        let (br, bc) = self.shape(b);
        if br != 1 || bc != c {
            return Err(Error::Dimension(format!(
                "add_row_vec: {}x{} + {}x{}",
                r, c, br, bc
            )));
        }
        let mut v = self.value(a).clone();
        let bv = self.value(b).data.clone();
        for i in 0..r {
            for j in 0..c {
                v.data[i * c + j] += bv[j];
            }
        }
        Ok(self.push(Op::AddRowVec(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).map(|x| x.max(0.0));
        let g = self.needs(a);
        self.push(Op::Relu(a.0), v, g)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let v = self.value(a).map(sigmoid);
        let g = self.needs(a);
        self.push(Op::Sigmoid(a.0), v, g)
    }

    pub fn heaviside(&mut self, a: Var) -> Var {
        let v = self.value(a).map(|x| if x > 0.0 { 1.0 } else { 0.0 });
        self.push(Op::Heaviside, v, false)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).matmul(self.value(b))?;
        Ok(self.push(Op::MatMul(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn spmm(&mut self, adj: Arc<Csr>, x: Var) -> Result<Var> {
        let v = adj.mul_dense(self.value(x))?;
        let at = Arc::new(adj.transpose());
        let g = self.needs(x);
        Ok(self.push(Op::SpmmConst(at, x.0), v, g))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let v = self.value(a).transpose();
        let g = self.needs(a);
        self.push(Op::Transpose(a.0), v, g)
    }

    pub fn gather_rows(&mut self, a: Var, idx: Arc<Vec<usize>>) -> Result<Var> {
        let m = self.value(a);
        let mut v = Matrix::zeros(idx.len(), m.cols);
        for (out_i, &src) in idx.iter().enumerate() {
            if src >= m.rows {
                return Err(Error::Validation(format!(
                    "gather_rows: index {} out of {} rows",
                    src, m.rows
                )));
            }
            v.data[out_i * m.cols..(out_i + 1) * m.cols].copy_from_slice(m.row(src));
        }
        let g = self.needs(a);
        Ok(self.push(Op::GatherRows(a.0, idx), v, g))
    }

    pub fn scatter_rows(&mut self, a: Var, idx: Arc<Vec<usize>>, n_rows: usize) -> Result<Var> {
        let m = self.value(a);
        if m.rows != idx.len() {
            return Err(Error::Dimension(format!(
                "scatter_rows: {} rows vs {} indices",
                m.rows,
                idx.len()
            )));
        }
        let mut v = Matrix::zeros(n_rows, m.cols);
        for (src_i, &dst) in idx.iter().enumerate() {
            v.data[dst * m.cols..(dst + 1) * m.cols].copy_from_slice(m.row(src_i));
        }
        let g = self.needs(a);
        Ok(self.push(Op::ScatterRows(a.0, idx), v, g))
    }

    pub fn hconcat(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ar, ac) = self.shape(a);
        let (br, bc) = self.shape(b);
        if ar != br {
            return Err(Error::Dimension(format!(
                "hconcat: {} rows vs {} rows",
                ar, br
            )));
        }
        let mut v = Matrix::zeros(ar, ac + bc);
        for i in 0..ar {
            v.data[i * (ac + bc)..i * (ac + bc) + ac].copy_from_slice(self.value(a).row(i));
            v.data[i * (ac + bc) + ac..(i + 1) * (ac + bc)].copy_from_slice(self.value(b).row(i));
        }
        Ok(self.push(Op::HConcat(a.0, b.0), v, self.needs(a) || self.needs(b)))
    }

    pub fn reshape(&mut self, a: Var, rows: usize, cols: usize) -> Result<Var> {
        let m = self.value(a);
        if m.rows * m.cols != rows * cols {
            return Err(Error::Dimension(format!(
                "reshape: {}x{} to {}x{}",
                m.rows, m.cols, rows, cols
            )));
        }
        let v = Matrix::new(rows, cols, m.data.clone());
        let g = self.needs(a);
        Ok(self.push(Op::Reshape(a.0), v, g))
    }

    pub fn row_sum(&mut self, a: Var) -> Var {
        let m = self.value(a);
        let v = Matrix::new(m.rows, 1, (0..m.rows).map(|i| m.row(i).iter().sum()).collect());
        let g = self.needs(a);
        self.push(Op::RowSum(a.0), v, g)
    }

    pub fn col_sum(&mut self, a: Var) -> Var {
        let m = self.value(a);
        let mut v = Matrix::zeros(1, m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                v.data[j] += m.data[i * m.cols + j];
            }
        }
        let g = self.needs(a);
        self.push(Op::ColSum(a.0), v, g)
    }

    pub fn rsqrt_or_zero(&mut self, a: Var) -> Var {
        let v = self
            .value(a)
            .map(|x| if x > ZERO_NORM_EPS { 1.0 / x.sqrt() } else { 0.0 });
        let g = self.needs(a);
        self.push(Op::RsqrtOrZero(a.0), v, g)
    }

    pub fn mul_col_vec(&mut self, a: Var, v_col: Var) -> Result<Var> {
        let (r, c) = self.shape(a);
        let (vr, vc) = self.shape(v_col);
        if vr != r || vc != 1 {
            return Err(Error::Dimension(format!(
                "mul_col_vec: {}x{} scaled by {}x{}",
                r, c, vr, vc
            )));
        }
        let mut v = self.value(a).clone();
        let s = self.value(v_col).data.clone();
        for i in 0..r {
            for j in 0..c {
                v.data[i * c + j] *= s[i];
            }
        }
        Ok(self.push(
            Op::MulColVec(a.0, v_col.0),
            v,
            self.needs(a) || self.needs(v_col),
        ))
    }

    pub fn mul_row_vec(&mut self, a: Var, v_row: Var) -> Result<Var> {
        let (r, c) = self.shape(a);
        let (vr, vc) = self.shape(v_row);
        if vr != 1 || vc != c {
            return Err(Error::Dimension(format!(
                "mul_row_vec: {}x{} scaled by {}x{}",
                r, c, vr, vc
            )));
        }
        let mut v = self.value(a).clone();
        let s = self.value(v_row).data.clone();
        for i in 0..r {
            for j in 0..c {
                v.data[i * c + j] *= s[j];
            }
        }
        Ok(self.push(
            Op::MulRowVec(a.0, v_row.0),
            v,
            self.needs(a) || self.needs(v_row),
        ))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let m = self.value(a);
        let mut v = m.clone();
        for i in 0..m.rows {
            softmax_row_inplace(&mut v.data[i * m.cols..(i + 1) * m.cols]);
        }
        let g = self.needs(a);
        self.push(Op::SoftmaxRows(a.0), v, g)
    }

    /// Mean over rows of -log softmax(logits)[label].
    pub fn softmax_cross_entropy(&mut self, logits: Var, labels: Arc<Vec<usize>>) -> Result<Var> {
        let m = self.value(logits);
        if labels.len() != m.rows {
            return Err(Error::Dimension(format!(
                "cross_entropy: {} rows vs {} labels",
                m.rows,
                labels.len()
            )));
        }
        let mut total = 0.0;
        for (i, &y) in labels.iter().enumerate() {
            if y >= m.cols {
                return Err(Error::Validation(format!(
                    "label {} out of range [0,{})",
                    y, m.cols
                )));
            }
            let row = m.row(i);
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
            total += lse - row[y];
        }
        let v = Matrix::new(1, 1, vec![total / m.rows as f64]);
        let g = self.needs(logits);
        Ok(self.push(Op::SoftmaxCrossEntropy(logits.0, labels), v, g))
    }

    /// Gradient-matching distance between `a` and a constant target, summed
    /// over columns of 1 - cosine similarity. Columns where both sides have
    /// norm below 1e-12 contribute 0; columns where exactly one side is zero
    /// contribute 1.
    pub fn cosine_col_distance(&mut self, a: Var, target: Arc<Matrix>) -> Result<Var> {
        let m = self.value(a);
        if m.shape() != target.shape() {
            return Err(Error::Dimension(format!(
                "cosine_col_distance: {}x{} vs {}x{}",
                m.rows, m.cols, target.rows, target.cols
            )));
        }
        let mut total = 0.0;
        for j in 0..m.cols {
            let (dot, na, nt) = col_dot_norms(m, &target, j);
            if na < ZERO_NORM_EPS && nt < ZERO_NORM_EPS {
                continue;
            }
            if na < ZERO_NORM_EPS || nt < ZERO_NORM_EPS {
                total += 1.0;
                continue;
            }
            total += 1.0 - dot / (na * nt);
        }
        let v = Matrix::new(1, 1, vec![total]);
        let g = self.needs(a);
        Ok(self.push(Op::CosineColDistance(a.0, target), v, g))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let v = Matrix::new(1, 1, vec![self.value(a).sum()]);
        let g = self.needs(a);
        self.push(Op::SumAll(a.0), v, g)
    }

    /// Reverse sweep from a 1x1 scalar node. Returns per-node adjoints;
    /// index with [`Gradients::get`].
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let lv = self.value(loss);
        if lv.shape() != (1, 1) {
            return Err(Error::Dimension(format!(
                "backward requires a 1x1 scalar, got {}x{}",
                lv.rows, lv.cols
            )));
        }
        let mut grads: Vec<Option<Matrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Matrix::new(1, 1, vec![1.0]));
        for i in (0..self.nodes.len()).rev() {
            let g = match grads[i].take() {
                Some(g) => g,
                None => continue,
            };
            if !self.nodes[i].needs_grad {
                grads[i] = Some(g);
                continue;
            }
            self.backprop_node(i, &g, &mut grads)?;
            grads[i] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn accumulate(&self, grads: &mut [Option<Matrix>], target: usize, delta: Matrix) {
        if !self.nodes[target].needs_grad {
            return;
        }
        match &mut grads[target] {
            Some(existing) => existing.add_assign(&delta),
            slot @ None => *slot = Some(delta),
        }
    }

    fn backprop_node(&self, i: usize, g: &Matrix, grads: &mut [Option<Matrix>]) -> Result<()> {
        match &self.nodes[i].op {
            Op::Leaf | Op::Const => {}
            Op::Add(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.clone());
            }
            Op::Sub(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.map(|x| -x));
            }
            Op::Mul(a, b) => {
                self.accumulate(grads, *a, g.zip(&self.nodes[*b].value, |x, y| x * y)?);
                self.accumulate(grads, *b, g.zip(&self.nodes[*a].value, |x, y| x * y)?);
            }
            Op::Scale(a, s) => {
                let s = *s;
                self.accumulate(grads, *a, g.map(|x| x * s));
            }
            Op::AddRowVec(a, b) => {
                self.accumulate(grads, *a, g.clone());
                let mut gb = Matrix::zeros(1, g.cols);
                for i in 0..g.rows {
                    for j in 0..g.cols {
                        gb.data[j] += g.data[i * g.cols + j];
                    }
                }
                self.accumulate(grads, *b, gb);
            }
            Op::Relu(a) => {
                // subgradient 0 at 0
                let ga = g.zip(&self.nodes[*a].value, |gx, x| if x > 0.0 { gx } else { 0.0 })?;
                self.accumulate(grads, *a, ga);
            }
            Op::Sigmoid(a) => {
                let ga = g.zip(&self.nodes[i].value, |gx, s| gx * s * (1.0 - s))?;
                self.accumulate(grads, *a, ga);
            }
            Op::Heaviside => {}
            Op::MatMul(a, b) => {
                if self.nodes[*a].needs_grad {
                    let bt = self.nodes[*b].value.transpose();
                    self.accumulate(grads, *a, g.matmul(&bt)?);
                }
                if self.nodes[*b].needs_grad {
                    let at = self.nodes[*a].value.transpose();
                    self.accumulate(grads, *b, at.matmul(g)?);
                }
            }
            Op::SpmmConst(at, x) => {
                self.accumulate(grads, *x, at.mul_dense(g)?);
            }
            Op::Transpose(a) => {
                self.accumulate(grads, *a, g.transpose());
            }
            Op::GatherRows(a, idx) => {
                let src = &self.nodes[*a].value;
                let mut ga = Matrix::zeros(src.rows, src.cols);
                for (out_i, &s) in idx.iter().enumerate() {
                    for j in 0..src.cols {
                        ga.data[s * src.cols + j] += g.data[out_i * src.cols + j];
                    }
                }
                self.accumulate(grads, *a, ga);
            }
            Op::ScatterRows(a, idx) => {
                let src = &self.nodes[*a].value;
                let mut ga = Matrix::zeros(src.rows, src.cols);
                for (src_i, &d) in idx.iter().enumerate() {
                    ga.data[src_i * src.cols..(src_i + 1) * src.cols]
                        .copy_from_slice(&g.data[d * src.cols..(d + 1) * src.cols]);
                }
                self.accumulate(grads, *a, ga);
            }
            Op::HConcat(a, b) => {
                let ac = self.nodes[*a].value.cols;
                let bc = self.nodes[*b].value.cols;
                let rows = g.rows;
                let mut ga = Matrix::zeros(rows, ac);
                let mut gb = Matrix::zeros(rows, bc);
                for i in 0..rows {
                    ga.data[i * ac..(i + 1) * ac].copy_from_slice(&g.data[i * (ac + bc)..i * (ac + bc) + ac]);
                    gb.data[i * bc..(i + 1) * bc]
                        .copy_from_slice(&g.data[i * (ac + bc) + ac..(i + 1) * (ac + bc)]);
                }
                self.accumulate(grads, *a, ga);
                self.accumulate(grads, *b, gb);
            }
            Op::Reshape(a) => {
                let (r, c) = self.nodes[*a].value.shape();
                self.accumulate(grads, *a, Matrix::new(r, c, g.data.clone()));
            }
            Op::RowSum(a) => {
                let (r, c) = self.nodes[*a].value.shape();
                let mut ga = Matrix::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        ga.data[i * c + j] = g.data[i];
                    }
                }
                self.accumulate(grads, *a, ga);
            }
            Op::ColSum(a) => {
                let (r, c) = self.nodes[*a].value.shape();
                let mut ga = Matrix::zeros(r, c);
                for i in 0..r {
                    ga.data[i * c..(i + 1) * c].copy_from_slice(&g.data[..c]);
                }
                self.accumulate(grads, *a, ga);
            }
            Op::RsqrtOrZero(a) => {
                let x = &self.nodes[*a].value;
                let ga = g.zip(x, |gx, xv| {
                    if xv > ZERO_NORM_EPS {
                        gx * (-0.5) * xv.powf(-1.5)
                    } else {
                        0.0
                    }
                })?;
                self.accumulate(grads, *a, ga);
            }
            Op::MulColVec(a, v) => {
                let s = &self.nodes[*v].value;
                let av = &self.nodes[*a].value;
                if self.nodes[*a].needs_grad {
                    let mut ga = g.clone();
                    for i in 0..ga.rows {
                        for j in 0..ga.cols {
                            ga.data[i * ga.cols + j] *= s.data[i];
                        }
                    }
                    self.accumulate(grads, *a, ga);
                }
                if self.nodes[*v].needs_grad {
                    let mut gv = Matrix::zeros(av.rows, 1);
                    for i in 0..av.rows {
                        let mut acc = 0.0;
                        for j in 0..av.cols {
                            acc += g.data[i * av.cols + j] * av.data[i * av.cols + j];
                        }
                        gv.data[i] = acc;
                    }
                    self.accumulate(grads, *v, gv);
                }
            }
            Op::MulRowVec(a, v) => {
                let s = &self.nodes[*v].value;
                let av = &self.nodes[*a].value;
                if self.nodes[*a].needs_grad {
                    let mut ga = g.clone();
                    for i in 0..ga.rows {
                        for j in 0..ga.cols {
                            ga.data[i * ga.cols + j] *= s.data[j];
                        }
                    }
                    self.accumulate(grads, *a, ga);
                }
                if self.nodes[*v].needs_grad {
                    let mut gv = Matrix::zeros(1, av.cols);
                    for i in 0..av.rows {
                        for j in 0..av.cols {
                            gv.data[j] += g.data[i * av.cols + j] * av.data[i * av.cols + j];
                        }
                    }
                    self.accumulate(grads, *v, gv);
                }
            }
            Op::SoftmaxRows(a) => {
                let s = &self.nodes[i].value;
                let mut ga = Matrix::zeros(s.rows, s.cols);
                for r in 0..s.rows {
                    let srow = s.row(r);
                    let grow = &g.data[r * s.cols..(r + 1) * s.cols];
                    let dot: f64 = srow.iter().zip(grow).map(|(&sv, &gv)| sv * gv).sum();
                    for j in 0..s.cols {
                        ga.data[r * s.cols + j] = srow[j] * (grow[j] - dot);
                    }
                }
                self.accumulate(grads, *a, ga);
            }
            Op::SoftmaxCrossEntropy(a, labels) => {
                let logits = &self.nodes[*a].value;
                let n = logits.rows as f64;
                let gs = g.data[0];
                let mut ga = Matrix::zeros(logits.rows, logits.cols);
                for (r, &y) in labels.iter().enumerate() {
                    let row = logits.row(r);
                    let mut p: Vec<f64> = row.to_vec();
                    softmax_row_inplace(&mut p);
                    for j in 0..logits.cols {
                        let onehot = if j == y { 1.0 } else { 0.0 };
                        ga.data[r * logits.cols + j] = gs * (p[j] - onehot) / n;
                    }
                }
                self.accumulate(grads, *a, ga);
            }
            Op::CosineColDistance(a, target) => {
                let m = &self.nodes[*a].value;
                let gs = g.data[0];
                let mut ga = Matrix::zeros(m.rows, m.cols);
                for j in 0..m.cols {
                    let (dot, na, nt) = col_dot_norms(m, target, j);
                    if na < ZERO_NORM_EPS || nt < ZERO_NORM_EPS {
                        continue;
                    }
                    // d/ds (1 - s.t/(|s||t|)) = -t/(|s||t|) + (s.t) s / (|s|^3 |t|)
                    for r in 0..m.rows {
                        let sv = m.data[r * m.cols + j];
                        let tv = target.data[r * m.cols + j];
                        ga.data[r * m.cols + j] =
                            gs * (-tv / (na * nt) + dot * sv / (na.powi(3) * nt));
                    }
                }
                self.accumulate(grads, *a, ga);
            }
            Op::SumAll(a) => {
                let (r, c) = self.nodes[*a].value.shape();
                self.accumulate(grads, *a, Matrix::filled(r, c, g.data[0]));
            }
        }
        Ok(())
    }
}

/// Adjoints produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    /// Adjoint of a node, or a zero matrix of its shape if the loss does not
    /// depend on it.
    pub fn get(&self, tape: &Tape, v: Var) -> Matrix {
        match &self.grads[v.0] {
            Some(g) => g.clone(),
            None => {
                let (r, c) = tape.shape(v);
                Matrix::zeros(r, c)
            }
        }
    }

    pub fn get_opt(&self, v: Var) -> Option<&Matrix> {
        self.grads[v.0].as_ref()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softmax_row_inplace(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

fn col_dot_norms(a: &Matrix, b: &Matrix, j: usize) -> (f64, f64, f64) {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for r in 0..a.rows {
        let x = a.data[r * a.cols + j];
        let y = b.data[r * b.cols + j];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    (dot, na.sqrt(), nb.sqrt())
}

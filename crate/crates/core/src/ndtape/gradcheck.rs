use crate::error::{Error, Result};
use crate::ndtape::{Matrix, Tape, Var};

/// Compare the analytic gradient of a scalar-valued function against central
/// finite differences. Returns the max over entries of
/// |analytic - numeric| / max(1, |analytic|).
pub fn grad_check<F>(f: F, x: &Matrix, h: f64) -> Result<f64>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    let mut tape = Tape::new();
    let leaf = tape.leaf(x.clone());
    let loss = f(&mut tape, leaf)?;
    if tape.shape(loss) != (1, 1) {
        return Err(Error::Dimension("grad_check requires a scalar output".into()));
    }
    let grads = tape.backward(loss)?;
    let analytic = grads.get(&tape, leaf);

    let mut max_err: f64 = 0.0;
    for k in 0..x.data.len() {
        let mut xp = x.clone();
        xp.data[k] += h;
        let fp = eval_scalar(&f, &xp)?;
        let mut xm = x.clone();
        xm.data[k] -= h;
        let fm = eval_scalar(&f, &xm)?;
        let numeric = (fp - fm) / (2.0 * h);
        let a = analytic.data[k];
        if !numeric.is_finite() || !a.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite gradient entry {}: analytic {}, numeric {}",
                k, a, numeric
            )));
        }
        let err = (a - numeric).abs() / a.abs().max(1.0);
        max_err = max_err.max(err);
    }
    Ok(max_err)
}

fn eval_scalar<F>(f: &F, x: &Matrix) -> Result<f64>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    let mut tape = Tape::new();
    let leaf = tape.leaf(x.clone());
    let loss = f(&mut tape, leaf)?;
    Ok(tape.value(loss).data[0])
}

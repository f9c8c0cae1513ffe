//! C ABI over the graph condensation library: opaque handles, integer
//! error codes, and a thread-local last-error message. The header is
//! generated into `include/graph_condense.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use graph_condense::condense::{condense, finalize, CondenseConfig, CondensedGraph, Variant};
use graph_condense::dataio::{gen_synthetic, load_condensed, load_dataset, save_condensed};
use graph_condense::error::Error;
use graph_condense::graph::SparseGraph;
use graph_condense::harness::{evaluate, package_condensed};
use graph_condense::models::Arch;

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    GcOk = 0,
    GcErr = 1,
    GcErrConfig = 2,
    GcErrNumeric = 3,
    GcErrArgument = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GcStatus {
    match err.exit_code() {
        2 => GcStatus::GcErrConfig,
        3 => GcStatus::GcErrNumeric,
        _ => GcStatus::GcErr,
    }
}

fn fail(err: Error) -> GcStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

/// Opaque handle to a loaded dataset.
pub struct GcGraph {
    inner: SparseGraph,
}

/// Opaque handle to a finalized condensed graph plus its configuration.
pub struct GcCondensed {
    inner: CondensedGraph,
    config: CondenseConfig,
}

unsafe fn cstr_arg<'a>(s: *const c_char) -> Result<&'a str, GcStatus> {
    if s.is_null() {
        set_error("null string argument".into());
        return Err(GcStatus::GcErrArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        GcStatus::GcErrArgument
    })
}

/// Copy the most recent error message for this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length.
#[no_mangle]
pub unsafe extern "C" fn gc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let borrow = e.borrow();
        let msg = match borrow.as_ref() {
            Some(m) => m.as_bytes(),
            None => b"",
        };
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Load a dataset directory. Returns null on failure; see `gc_last_error`.
#[no_mangle]
pub unsafe extern "C" fn gc_dataset_load(path: *const c_char) -> *mut GcGraph {
    let path = match cstr_arg(path) {
        Ok(p) => p,
        Err(_) => return ptr::null_mut(),
    };
    match load_dataset(Path::new(path)) {
        Ok(g) => Box::into_raw(Box::new(GcGraph { inner: g })),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

/// Generate a seeded stochastic-block-model dataset in memory.
#[no_mangle]
pub extern "C" fn gc_dataset_synthetic(
    n: usize,
    classes: usize,
    p_in: f64,
    p_out: f64,
    d: usize,
    seed: u64,
) -> *mut GcGraph {
    match gen_synthetic(n, classes, p_in, p_out, d, seed) {
        Ok(g) => Box::into_raw(Box::new(GcGraph { inner: g })),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_free(graph: *mut GcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_nodes(graph: *const GcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_dim(graph: *const GcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.dim())
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_classes(graph: *const GcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.num_classes)
}

/// Condense `graph` to `nodes` synthetic nodes with default
/// hyperparameters. `method` is "gcond", "gcond-x", or "dc-graph".
/// Returns null on failure.
#[no_mangle]
pub unsafe extern "C" fn gc_condense(
    graph: *const GcGraph,
    method: *const c_char,
    nodes: usize,
    epochs: usize,
    outer: usize,
    seed: u64,
) -> *mut GcCondensed {
    let graph = match graph.as_ref() {
        Some(g) => g,
        None => {
            set_error("null graph handle".into());
            return ptr::null_mut();
        }
    };
    let method = match cstr_arg(method) {
        Ok(m) => m,
        Err(_) => return ptr::null_mut(),
    };
    let run = || -> graph_condense::Result<(CondensedGraph, CondenseConfig)> {
        let variant = Variant::parse(method)?;
        let config = CondenseConfig {
            nodes: Some(nodes),
            inner_loops: epochs,
            outer_loops: outer,
            seed,
            ..CondenseConfig::default()
        };
        let out = condense(&graph.inner, &config, variant)?;
        Ok((finalize(out.condensed)?, config))
    };
    match run() {
        Ok((cond, config)) => Box::into_raw(Box::new(GcCondensed {
            inner: cond,
            config,
        })),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_condensed_free(cond: *mut GcCondensed) {
    if !cond.is_null() {
        drop(Box::from_raw(cond));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_condensed_nodes(cond: *const GcCondensed) -> usize {
    cond.as_ref().map_or(0, |c| c.inner.n())
}

/// Persist a condensed artifact directory.
#[no_mangle]
pub unsafe extern "C" fn gc_condensed_save(
    cond: *const GcCondensed,
    dir: *const c_char,
) -> GcStatus {
    let cond = match cond.as_ref() {
        Some(c) => c,
        None => {
            set_error("null condensed handle".into());
            return GcStatus::GcErrArgument;
        }
    };
    let dir = match cstr_arg(dir) {
        Ok(d) => d,
        Err(s) => return s,
    };
    match save_condensed(Path::new(dir), &cond.inner, &cond.config) {
        Ok(()) => GcStatus::GcOk,
        Err(e) => fail(e),
    }
}

/// Load a condensed artifact directory. Returns null on failure.
#[no_mangle]
pub unsafe extern "C" fn gc_condensed_load(dir: *const c_char) -> *mut GcCondensed {
    let dir = match cstr_arg(dir) {
        Ok(d) => d,
        Err(_) => return ptr::null_mut(),
    };
    match load_condensed(Path::new(dir)) {
        Ok((cond, manifest)) => Box::into_raw(Box::new(GcCondensed {
            inner: cond,
            config: manifest.config,
        })),
        Err(e) => {
            fail(e);
            ptr::null_mut()
        }
    }
}

/// Train `arch` ("gcn", "sgc", "appnp", "sage", "mlp") on the condensed
/// graph and test on the full dataset, `repeats` times. Writes the mean and
/// sample standard deviation of test accuracy.
#[no_mangle]
pub unsafe extern "C" fn gc_evaluate(
    cond: *const GcCondensed,
    graph: *const GcGraph,
    arch: *const c_char,
    repeats: usize,
    seed: u64,
    out_mean: *mut f64,
    out_std: *mut f64,
) -> GcStatus {
    let (cond, graph) = match (cond.as_ref(), graph.as_ref()) {
        (Some(c), Some(g)) => (c, g),
        _ => {
            set_error("null handle".into());
            return GcStatus::GcErrArgument;
        }
    };
    if out_mean.is_null() || out_std.is_null() {
        set_error("null output pointer".into());
        return GcStatus::GcErrArgument;
    }
    let arch = match cstr_arg(arch) {
        Ok(a) => a,
        Err(s) => return s,
    };
    let run = || -> graph_condense::Result<(f64, f64)> {
        let arch = Arch::parse(arch)?;
        let package = package_condensed(&cond.inner)?;
        let report = evaluate(
            &package,
            &graph.inner,
            arch,
            repeats,
            seed,
            cond.inner.variant.name(),
            "dataset",
        )?;
        Ok((report.mean, report.std))
    };
    match run() {
        Ok((mean, std)) => {
            *out_mean = mean;
            *out_std = std;
            GcStatus::GcOk
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn full_ffi_round_trip() {
        let g = gc_dataset_synthetic(40, 2, 0.5, 0.05, 5, 9);
        assert!(!g.is_null());
        unsafe {
            assert_eq!(gc_dataset_nodes(g), 40);
            assert_eq!(gc_dataset_dim(g), 5);
            assert_eq!(gc_dataset_classes(g), 2);

            let method = CString::new("gcond").unwrap();
            let cond = gc_condense(g, method.as_ptr(), 4, 2, 1, 1);
            assert!(!cond.is_null(), "{}", last_error_string());
            assert_eq!(gc_condensed_nodes(cond), 4);

            let dir = tempdir();
            let cdir = CString::new(dir.clone()).unwrap();
            assert_eq!(gc_condensed_save(cond, cdir.as_ptr()), GcStatus::GcOk);
            let back = gc_condensed_load(cdir.as_ptr());
            assert!(!back.is_null(), "{}", last_error_string());
            assert_eq!(gc_condensed_nodes(back), 4);

            let arch = CString::new("gcn").unwrap();
            let mut mean = 0.0;
            let mut std = 0.0;
            let status = gc_evaluate(back, g, arch.as_ptr(), 2, 3, &mut mean, &mut std);
            assert_eq!(status, GcStatus::GcOk, "{}", last_error_string());
            assert!((0.0..=1.0).contains(&mean));

            gc_condensed_free(cond);
            gc_condensed_free(back);
            gc_dataset_free(g);
            std::fs::remove_dir_all(dir).ok();
        }
    }

    #[test]
    fn errors_surface_through_last_error() {
        let path = CString::new("/nonexistent/dataset").unwrap();
        let g = unsafe { gc_dataset_load(path.as_ptr()) };
        assert!(g.is_null());
        let msg = last_error_string();
        assert!(msg.contains("nonexistent"), "{}", msg);

        let bad = gc_dataset_synthetic(10, 2, 0.1, 0.9, 2, 0);
        assert!(bad.is_null());
    }

    fn last_error_string() -> String {
        let mut buf = vec![0i8; 512];
        unsafe {
            gc_last_error(buf.as_mut_ptr() as *mut c_char, buf.len());
            CStr::from_ptr(buf.as_ptr() as *const c_char)
                .to_string_lossy()
                .into_owned()
        }
    }

    fn tempdir() -> String {
        let dir = std::env::temp_dir().join(format!(
            "gc-ffi-test-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        dir.to_string_lossy().into_owned()
    }
}

//! C ABI over the `nldirac` solver.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every entry point returns an [`NldiracStatus`];
//! on failure the message is available from [`nldirac_last_error`] on the
//! same thread. Panics never cross the boundary.
//!
//! Array outputs use the "capacity in, length out" convention: the caller
//! passes a buffer and its capacity; the required length is always written
//! to `*len`, and `BufferTooSmall` is returned if it exceeds the capacity.
//!
//! # Safety
//!
//! All pointer arguments must be null or valid for the access described;
//! strings must be NUL-terminated; handles must come from this library and
//! not be used after being freed. Null is always detected and reported.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;

use nldirac::asymptotics::compute_profile;
use nldirac::config::{load_config, parse_config, ExperimentConfig};
use nldirac::conservation::total_charge_drift;
use nldirac::experiment::run_experiment_in;
use nldirac::nonlinearity::eval_pair;
use nldirac::{run, Error, ModelParams, RecordPlan, Side, Trajectory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NldiracStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidArgument = 4,
    SolverError = 5,
    IoError = 6,
    BufferTooSmall = 7,
    ChecksFailed = 8,
    Panic = 99,
}

/// `re + i·im`, layout-compatible with `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NldiracComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for NldiracComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<NldiracComplex> for Complex64 {
    fn from(z: NldiracComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Right-movers (`u`, profile G1) or left-movers (`v`, profile G2).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NldiracSide {
    Right = 0,
    Left = 1,
}

/// Validated experiment configuration.
pub struct NldiracConfig {
    inner: ExperimentConfig,
}

/// Result of a solver run.
pub struct NldiracTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn status_of(err: &Error) -> NldiracStatus {
    match err {
        Error::InvalidConfig(_) => NldiracStatus::InvalidConfig,
        Error::Io { .. } => NldiracStatus::IoError,
        Error::FixedPointDiverged { .. } | Error::BlowUp { .. } | Error::NonFinite { .. } => {
            NldiracStatus::SolverError
        }
        _ => NldiracStatus::InvalidArgument,
    }
}

struct Fail(NldiracStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NldiracStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NldiracStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NldiracStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(NldiracStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(NldiracStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies `src` to `dst` (capacity `cap`) and always stores `src.len()` in `len`.
unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, cap: usize, len: *mut usize) -> Result<(), Fail> {
    *out_arg(len, "len")? = src.len();
    if src.len() > cap {
        return Err(Fail(
            NldiracStatus::BufferTooSmall,
            format!("buffer holds {cap} elements, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

/// Copies the last error message of this thread, NUL-terminated, into
/// `buf`. Returns the message length excluding the terminator; the copy is
/// truncated when `cap` is too small. `buf` may be null to query the length.
#[no_mangle]
pub unsafe extern "C" fn nldirac_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            ptr::copy_nonoverlapping(e.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Parses configuration text (TOML). On success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn nldirac_config_parse(text: *const c_char, out: *mut *mut NldiracConfig) -> NldiracStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = parse_config(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(NldiracConfig { inner }));
        Ok(())
    })
}

/// Reads and parses a configuration file.
#[no_mangle]
pub unsafe extern "C" fn nldirac_config_load(path: *const c_char, out: *mut *mut NldiracConfig) -> NldiracStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inner = load_config(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(NldiracConfig { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nldirac_config_free(cfg: *mut NldiracConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Writes the 64 hex digits of the configuration hash plus a NUL into
/// `buf`, which must hold at least 65 bytes.
#[no_mangle]
pub unsafe extern "C" fn nldirac_config_hash(cfg: *const NldiracConfig, buf: *mut c_char, cap: usize) -> NldiracStatus {
    guard(|| {
        let hash = handle(cfg, "cfg")?.inner.hash();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if cap <= hash.len() {
            return Err(Fail(NldiracStatus::BufferTooSmall, format!("hash needs {} bytes", hash.len() + 1)));
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast::<c_char>(), buf, hash.len());
        *buf.add(hash.len()) = 0;
        Ok(())
    })
}

/// Runs the solver, recording the configured record times and `T`.
#[no_mangle]
pub unsafe extern "C" fn nldirac_run(cfg: *const NldiracConfig, out: *mut *mut NldiracTrajectory) -> NldiracStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let cfg = &handle(cfg, "cfg")?.inner;
        let data = cfg.initial_data()?;
        let inner = run(&data, &cfg.params, &cfg.scheme, &RecordPlan::at(&cfg.record_times))?;
        *out = Box::into_raw(Box::new(NldiracTrajectory { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_free(traj: *mut NldiracTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Relative drift of the total charge over the stored snapshots.
#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_charge_drift(traj: *const NldiracTrajectory, out: *mut f64) -> NldiracStatus {
    guard(|| {
        *out_arg(out, "out")? = total_charge_drift(&handle(traj, "traj")?.inner);
        Ok(())
    })
}

/// Number of stored snapshots (the first is `t = 0`, the last is `T`).
#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_snapshot_count(
    traj: *const NldiracTrajectory,
    out: *mut usize,
) -> NldiracStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(traj, "traj")?.inner.snapshots.len();
        Ok(())
    })
}

/// Node coordinates of the padded lattice.
#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_nodes(
    traj: *const NldiracTrajectory,
    x: *mut f64,
    cap: usize,
    len: *mut usize,
) -> NldiracStatus {
    guard(|| {
        let grid = handle(traj, "traj")?.inner.grid;
        let nodes: Vec<f64> = (0..grid.len()).map(|j| grid.x(j)).collect();
        copy_out(&nodes, x, cap, len)
    })
}

/// Copies snapshot `index`: its time into `*t` and `u`, `v` into the two
/// buffers, each of capacity `cap` nodes.
#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_snapshot(
    traj: *const NldiracTrajectory,
    index: usize,
    t: *mut f64,
    u: *mut NldiracComplex,
    v: *mut NldiracComplex,
    cap: usize,
    len: *mut usize,
) -> NldiracStatus {
    guard(|| {
        let traj = &handle(traj, "traj")?.inner;
        let snap = traj.snapshots.get(index).ok_or_else(|| {
            Fail(
                NldiracStatus::InvalidArgument,
                format!("snapshot index {index} out of range ({} stored)", traj.snapshots.len()),
            )
        })?;
        let t = out_arg(t, "t")?;
        let u_c: Vec<NldiracComplex> = snap.u.iter().map(|&z| z.into()).collect();
        let v_c: Vec<NldiracComplex> = snap.v.iter().map(|&z| z.into()).collect();
        copy_out(&u_c, u, cap, len)?;
        copy_out(&v_c, v, cap, len)?;
        *t = snap.t;
        Ok(())
    })
}

/// Scattering profile truncated at `T`, sampled at `y` (both buffers of
/// capacity `cap`).
#[no_mangle]
pub unsafe extern "C" fn nldirac_trajectory_profile(
    traj: *const NldiracTrajectory,
    side: NldiracSide,
    y: *mut f64,
    values: *mut NldiracComplex,
    cap: usize,
    len: *mut usize,
) -> NldiracStatus {
    guard(|| {
        let side = match side {
            NldiracSide::Right => Side::Right,
            NldiracSide::Left => Side::Left,
        };
        let p = compute_profile(&handle(traj, "traj")?.inner, side)?;
        let vals: Vec<NldiracComplex> = p.values.iter().map(|&z| z.into()).collect();
        copy_out(&p.y, y, cap, len)?;
        copy_out(&vals, values, cap, len)
    })
}

/// Evaluates the nonlinear terms `N1(u, v)`, `N2(u, v)` for coupling `(alpha, beta)`.
#[no_mangle]
pub unsafe extern "C" fn nldirac_eval_nonlinearity(
    alpha: f64,
    beta: f64,
    u: NldiracComplex,
    v: NldiracComplex,
    n1: *mut NldiracComplex,
    n2: *mut NldiracComplex,
) -> NldiracStatus {
    guard(|| {
        let params = ModelParams::new(alpha, beta)?;
        let (a, b) = eval_pair(u.into(), v.into(), &params);
        *out_arg(n1, "n1")? = a.into();
        *out_arg(n2, "n2")? = b.into();
        Ok(())
    })
}

/// Runs a full experiment, writing artifacts to `out_dir`. Returns
/// `ChecksFailed` when it ran but some check did not pass.
#[no_mangle]
pub unsafe extern "C" fn nldirac_run_experiment(cfg: *const NldiracConfig, out_dir: *const c_char) -> NldiracStatus {
    guard(|| {
        let cfg = &handle(cfg, "cfg")?.inner;
        let dir = str_arg(out_dir, "out_dir")?;
        let outcome = run_experiment_in(cfg, Path::new(dir))?;
        if outcome.all_pass() {
            Ok(())
        } else {
            let failed: Vec<&str> = outcome
                .summary
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            Err(Fail(NldiracStatus::ChecksFailed, format!("checks failed: {}", failed.join(", "))))
        }
    })
}

//! Time stepping along exact characteristics on the unit-CFL lattice.
//!
//! Along `x - t = const` the right-mover obeys `du/ds = -i N₁(u, v)`, along
//! `x + t = const` the left-mover obeys `dv/ds = -i N₂(u, v)`. With `Δt = h`
//! the foot of the characteristic through node `j` is node `j - 1` for `u`
//! and `j + 1` for `v`, so no interpolation is ever needed.

mod oracle;
mod trajectory;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{Grid, InitialData, ModelParams, SpinorField};
use crate::nonlinearity::{eval_jacobian, eval_pair};

pub use trajectory::{CharTraces, RecordPlan, RunDiagnostics, TraceSegment, Trajectory};

/// Amplitude beyond which a run is aborted as diverged.
pub const BLOW_UP_AMPLITUDE: f64 = 1e6;

/// Refinement factor of the fourth-order oracle lattice.
pub const ORACLE_REFINEMENT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Implicit trapezoidal rule along both characteristics; second order.
    Trapezoidal,
    /// Exact-modulus phase rotation, only valid for `β = 0`.
    PhaseSplit,
    /// Classical RK4 in characteristic coordinates on a 4× refined lattice.
    Oracle4,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Trapezoidal => "trapezoidal",
            SchemeKind::PhaseSplit => "phase_split",
            SchemeKind::Oracle4 => "oracle4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scheme {
    pub kind: SchemeKind,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iter: u32,
}

impl Default for Scheme {
    fn default() -> Self {
        Self {
            kind: SchemeKind::Trapezoidal,
            fixed_point_tol: 1e-12,
            fixed_point_max_iter: 50,
        }
    }
}

impl Scheme {
    pub fn trapezoidal() -> Self {
        Self::default()
    }

    pub fn phase_split() -> Self {
        Self {
            kind: SchemeKind::PhaseSplit,
            ..Self::default()
        }
    }

    pub fn oracle4() -> Self {
        Self {
            kind: SchemeKind::Oracle4,
            ..Self::default()
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.kind == SchemeKind::PhaseSplit && params.beta() != 0.0 {
            return Err(Error::UnsupportedScheme {
                scheme: self.kind.name(),
                reason: format!("requires beta = 0, got beta = {}", params.beta()),
            });
        }
        if !(self.fixed_point_tol.is_finite() && self.fixed_point_tol > 0.0) {
            return Err(Error::UnsupportedScheme {
                scheme: self.kind.name(),
                reason: format!("fixed_point_tol = {} must be positive", self.fixed_point_tol),
            });
        }
        if self.fixed_point_max_iter == 0 {
            return Err(Error::UnsupportedScheme {
                scheme: self.kind.name(),
                reason: "fixed_point_max_iter must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Field at `t = 0` holding the sampled data (zeros in the padding).
pub fn init_state(data: &InitialData, grid: &Grid) -> Result<SpinorField> {
    if data.grid != *grid {
        return Err(Error::GridMismatch(format!(
            "data sampled with h = {}, n_cells = {}; grid has h = {}, n_cells = {}",
            data.grid.h(),
            data.grid.n_cells(),
            grid.h(),
            grid.n_cells()
        )));
    }
    Ok(SpinorField {
        t: 0.0,
        step: 0,
        h: grid.h(),
        u: data.u0.clone(),
        v: data.v0.clone(),
    })
}

/// Advances `state` by one step `Δt = h`.
pub fn step(state: &SpinorField, params: &ModelParams, scheme: &Scheme) -> Result<SpinorField> {
    let mut next = SpinorField::zeros(state.len(), state.h);
    step_into(state, params, scheme, &mut next)?;
    Ok(next)
}

/// One step written into `next`; returns the largest fixed-point iteration count.
pub(crate) fn step_into(
    state: &SpinorField,
    params: &ModelParams,
    scheme: &Scheme,
    next: &mut SpinorField,
) -> Result<u32> {
    scheme.validate(params)?;
    let len = state.len();
    if state.v.len() != len {
        return Err(Error::GridMismatch("u and v differ in length".into()));
    }
    next.u.resize(len, Complex64::new(0.0, 0.0));
    next.v.resize(len, Complex64::new(0.0, 0.0));
    next.h = state.h;
    next.step = state.step + 1;
    next.t = next.step as f64 * state.h;

    let zero = Complex64::new(0.0, 0.0);
    let at = |a: &[Complex64], j: Option<usize>| j.and_then(|j| a.get(j).copied()).unwrap_or(zero);
    let h = state.h;
    let t_next = next.t;

    let iterations = match scheme.kind {
        SchemeKind::Trapezoidal => next
            .u
            .par_iter_mut()
            .zip(next.v.par_iter_mut())
            .enumerate()
            .map(|(j, (u_out, v_out))| {
                let left = j.checked_sub(1);
                let right = Some(j + 1);
                let (ua, va) = (at(&state.u, left), at(&state.v, left));
                let (ub, vb) = (at(&state.u, right), at(&state.v, right));
                let (n1_foot, _) = eval_pair(ua, va, params);
                let (_, n2_foot) = eval_pair(ub, vb, params);
                let (u, v, iters) = trapezoidal_node(ua, n1_foot, vb, n2_foot, h, params, scheme)
                    .map_err(|(iterations, last_update)| Error::FixedPointDiverged {
                        t: t_next,
                        node: j,
                        iterations,
                        last_update,
                    })?;
                *u_out = u;
                *v_out = v;
                Ok(iters)
            })
            .try_reduce(|| 0, |a, b| Ok(a.max(b)))?,
        SchemeKind::PhaseSplit => {
            let alpha = params.alpha();
            next.u
                .par_iter_mut()
                .zip(next.v.par_iter_mut())
                .enumerate()
                .for_each(|(j, (u_out, v_out))| {
                    let left = j.checked_sub(1);
                    let right = Some(j + 1);
                    // |v| along the u-characteristic: v at the foot, and the new v
                    // whose modulus is that of v at node j + 1.
                    let v_sq = 0.5 * (at(&state.v, left).norm_sqr() + at(&state.v, right).norm_sqr());
                    let u_sq = 0.5 * (at(&state.u, left).norm_sqr() + at(&state.u, right).norm_sqr());
                    *u_out = at(&state.u, left) * Complex64::from_polar(1.0, -alpha * h * v_sq);
                    *v_out = at(&state.v, right) * Complex64::from_polar(1.0, -alpha * h * u_sq);
                });
            1
        }
        SchemeKind::Oracle4 => {
            return Err(Error::UnsupportedScheme {
                scheme: scheme.kind.name(),
                reason: "the oracle refines the initial data and only runs whole trajectories".into(),
            })
        }
    };

    guard(next)?;
    Ok(iterations)
}

/// Solves the per-node 2×2 complex trapezoidal system
///
/// ```text
/// u = u_foot - i(h/2)(N₁_foot + N₁(u, v)),   v = v_foot - i(h/2)(N₂_foot + N₂(u, v))
/// ```
///
/// starting from an explicit Euler predictor. The first iteration is a plain
/// fixed-point sweep, which already meets the tolerance wherever the field is
/// small; the remaining ones are Newton steps on the four real components,
/// so in the regime `h·|amplitude|² <= 0.1` a handful of iterations suffice.
/// When `h` is too large for the amplitude the iterates stall or escape and
/// the iteration cap reports it.
///
/// `Err((iterations, last_update))` when the tolerance is not met.
#[inline]
fn trapezoidal_node(
    u_foot: Complex64,
    n1_foot: Complex64,
    v_foot: Complex64,
    n2_foot: Complex64,
    h: f64,
    params: &ModelParams,
    scheme: &Scheme,
) -> std::result::Result<(Complex64, Complex64, u32), (u32, f64)> {
    let minus_i = Complex64::new(0.0, -1.0);
    let i = Complex64::i();
    // explicit Euler predictor
    let mut u = u_foot + minus_i * h * n1_foot;
    let mut v = v_foot + minus_i * h * n2_foot;
    let half = 0.5 * h;
    let mut update = f64::INFINITY;
    let converged = |u: Complex64, v: Complex64, update: f64| {
        update <= scheme.fixed_point_tol * u.norm().max(v.norm()).max(1.0)
    };
    if scheme.fixed_point_max_iter == 0 {
        return Err((0, update));
    }
    {
        let (n1, n2) = eval_pair(u, v, params);
        let u_new = u_foot + minus_i * half * (n1_foot + n1);
        let v_new = v_foot + minus_i * half * (n2_foot + n2);
        update = (u_new - u).norm().max((v_new - v).norm());
        u = u_new;
        v = v_new;
        if !update.is_finite() {
            return Err((1, update));
        }
        if converged(u, v, update) {
            return Ok((u, v, 1));
        }
    }
    for iter in 2..=scheme.fixed_point_max_iter {
        let (n1, n2) = eval_pair(u, v, params);
        let g_u = u - u_foot + i * half * (n1_foot + n1);
        let g_v = v - v_foot + i * half * (n2_foot + n2);
        let jac = eval_jacobian(u, v, params);
        let mut a = [[0.0; 4]; 4];
        for (c, (d1, d2)) in jac.iter().enumerate() {
            let (d1, d2) = (i * half * d1, i * half * d2);
            a[0][c] = d1.re;
            a[1][c] = d1.im;
            a[2][c] = d2.re;
            a[3][c] = d2.im;
            a[c][c] += 1.0;
        }
        let Some(d) = solve4(a, [-g_u.re, -g_u.im, -g_v.re, -g_v.im]) else {
            return Err((iter, update));
        };
        let (du, dv) = (Complex64::new(d[0], d[1]), Complex64::new(d[2], d[3]));
        u += du;
        v += dv;
        update = du.norm().max(dv.norm());
        if !update.is_finite() {
            return Err((iter, update));
        }
        if converged(u, v, update) {
            return Ok((u, v, iter));
        }
    }
    Err((scheme.fixed_point_max_iter, update))
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if !(a[pivot][col].abs() > 0.0) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

fn guard(field: &SpinorField) -> Result<()> {
    let mut max = 0.0_f64;
    for (j, z) in field.u.iter().chain(&field.v).enumerate() {
        let a = z.norm();
        if !a.is_finite() {
            return Err(Error::NonFinite {
                index: j % field.len(),
                t: field.t,
            });
        }
        max = max.max(a);
    }
    if max > BLOW_UP_AMPLITUDE {
        return Err(Error::BlowUp {
            t: field.t,
            amplitude: max,
        });
    }
    Ok(())
}

/// Runs `grid.n_steps()` steps from `data`, recording per `plan`.
pub fn run(
    data: &InitialData,
    params: &ModelParams,
    scheme: &Scheme,
    plan: &RecordPlan,
) -> Result<Trajectory> {
    run_observed(data, params, scheme, plan, &mut |_| {})
}

/// Like [`run`], calling `observer` on the initial field and after every step.
///
/// The oracle scheme reports its state on the coarse lattice after every
/// fourth refined step.
pub fn run_observed(
    data: &InitialData,
    params: &ModelParams,
    scheme: &Scheme,
    plan: &RecordPlan,
    observer: &mut dyn FnMut(&SpinorField),
) -> Result<Trajectory> {
    scheme.validate(params)?;
    let grid = data.grid;
    let schedule = plan.schedule(&grid)?;
    if scheme.kind == SchemeKind::Oracle4 {
        return oracle::run(data, params, scheme, schedule, observer);
    }

    let len = grid.len();
    let h = grid.h();
    let mut state = init_state(data, &grid)?;
    let mut next = SpinorField::zeros(len, h);
    let mut recorder = trajectory::Recorder::new(grid, *params, *scheme, schedule, &state);
    observer(&state);

    let zero = Complex64::new(0.0, 0.0);
    let mut n1_prev = vec![zero; len];
    let mut n2_prev = vec![zero; len];
    let mut n1_next = vec![zero; len];
    let mut n2_next = vec![zero; len];
    eval_all(&state, params, &mut n1_prev, &mut n2_prev);

    for k in 0..grid.n_steps() {
        let iters = step_into(&state, params, scheme, &mut next)?;
        eval_all(&next, params, &mut n1_next, &mut n2_next);
        recorder.accumulate(k, &n1_prev, &n1_next, &n2_prev, &n2_next);
        std::mem::swap(&mut state, &mut next);
        std::mem::swap(&mut n1_prev, &mut n1_next);
        std::mem::swap(&mut n2_prev, &mut n2_next);
        recorder.after_step(&state, iters);
        observer(&state);
    }
    Ok(recorder.finish())
}

fn eval_all(field: &SpinorField, params: &ModelParams, n1: &mut [Complex64], n2: &mut [Complex64]) {
    n1.par_iter_mut()
        .zip(n2.par_iter_mut())
        .zip(field.u.par_iter().zip(field.v.par_iter()))
        .for_each(|((a, b), (u, v))| {
            let (x, y) = eval_pair(*u, *v, params);
            *a = x;
            *b = y;
        });
}

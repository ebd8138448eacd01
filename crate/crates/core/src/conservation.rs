//! Numerical certificates for the charge identities.
//!
//! * global conservation `(|u|² + |v|²)_t + (|u|² - |v|²)_x = 0`,
//! * the balance over a characteristic triangle `Δ(a, b, t₀)`:
//!   interior charge at `τ` plus `2∫|u|²` through the right side plus
//!   `2∫|v|²` through the left side equals the charge on `[a, b]` at `t₀`,
//! * the envelopes `|u(x,t)|² <= e^{8|β|C₀}|u₀(x-t)|²` and
//!   `|v(x,t)|² <= e^{8|β|C₀}|v₀(x+t)|²`.
//!
//! With unit CFL the triangle sides pass through lattice nodes, so every
//! integral is a trapezoid sum over node values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{charge, trapezoid, Grid, SpinorField, TriangleRegion};
use crate::solver::Trajectory;

/// Terms of the triangle balance at time `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub region: TriangleRegion,
    pub tau: f64,
    pub interior_charge: f64,
    pub right_flux: f64,
    pub left_flux: f64,
    pub initial_charge: f64,
    /// `interior_charge + right_flux + left_flux - initial_charge`.
    pub defect: f64,
}

/// Largest relative change of the total charge over the stored snapshots.
///
/// Non-finite states yield `NaN`.
pub fn total_charge_drift(traj: &Trajectory) -> f64 {
    let Ok(q0) = charge(traj.initial()) else {
        return f64::NAN;
    };
    let scale = q0.max(1e-300);
    let mut drift = 0.0_f64;
    for s in &traj.snapshots {
        match charge(s) {
            Ok(q) => drift = drift.max((q - q0).abs() / scale),
            Err(_) => return f64::NAN,
        }
    }
    drift
}

/// Accumulates the triangle balance from a stream of states.
///
/// Feed it every step from `t0` to `tau` (for example from
/// [`crate::solver::run_observed`]); states outside that window are ignored.
#[derive(Debug, Clone)]
pub struct TriangleProbe {
    region: TriangleRegion,
    tau: f64,
    h: f64,
    ia: usize,
    ib: usize,
    k0: usize,
    k_tau: usize,
    right: Vec<Option<f64>>,
    left: Vec<Option<f64>>,
    initial: Option<f64>,
    interior: Option<f64>,
}

impl TriangleProbe {
    pub fn new(grid: &Grid, region: TriangleRegion, tau: f64) -> Result<Self> {
        let region = TriangleRegion::new(region.a, region.b, region.t0)?;
        let ia = grid.node_index(region.a, "a")?;
        let ib = grid.node_index(region.b, "b")?;
        let k0 = grid.step_index(region.t0, "t0")?;
        let k_tau = grid.step_index(tau, "tau")?;
        let (_, apex_t) = region.apex();
        if apex_t > grid.t_end() + 1e-9 * grid.h() {
            return Err(Error::InvalidRegion(format!(
                "apex time {apex_t} lies beyond the run horizon {}",
                grid.t_end()
            )));
        }
        if k_tau < k0 || 2 * (k_tau - k0) > ib - ia {
            return Err(Error::InvalidRegion(format!(
                "tau = {tau} must lie in [t0, apex] = [{}, {apex_t}]",
                region.t0
            )));
        }
        let n = k_tau - k0 + 1;
        Ok(Self {
            region,
            tau,
            h: grid.h(),
            ia,
            ib,
            k0,
            k_tau,
            right: vec![None; n],
            left: vec![None; n],
            initial: None,
            interior: None,
        })
    }

    pub fn observe(&mut self, field: &SpinorField) {
        let k = field.step;
        if k < self.k0 || k > self.k_tau {
            return;
        }
        let d = k - self.k0;
        let density = |j: usize| field.u[j].norm_sqr() + field.v[j].norm_sqr();
        self.right[d] = Some(field.u[self.ib - d].norm_sqr());
        self.left[d] = Some(field.v[self.ia + d].norm_sqr());
        if k == self.k0 {
            self.initial = Some(trapezoid((self.ia..=self.ib).map(density), self.h));
        }
        if k == self.k_tau {
            self.interior = Some(trapezoid((self.ia + d..=self.ib - d).map(density), self.h));
        }
    }

    pub fn finish(self) -> Result<BalanceReport> {
        let missing = |d: usize| Error::MissingSnapshot {
            t: (self.k0 + d) as f64 * self.h,
        };
        let collect = |samples: &[Option<f64>]| -> Result<Vec<f64>> {
            samples
                .iter()
                .enumerate()
                .map(|(d, s)| s.ok_or_else(|| missing(d)))
                .collect()
        };
        let right = collect(&self.right)?;
        let left = collect(&self.left)?;
        let initial_charge = self.initial.ok_or_else(|| missing(0))?;
        let interior_charge = self.interior.ok_or_else(|| missing(self.k_tau - self.k0))?;
        let right_flux = 2.0 * trapezoid(right, self.h);
        let left_flux = 2.0 * trapezoid(left, self.h);
        Ok(BalanceReport {
            region: self.region,
            tau: self.tau,
            interior_charge,
            right_flux,
            left_flux,
            initial_charge,
            defect: interior_charge + right_flux + left_flux - initial_charge,
        })
    }
}

/// Triangle balance on a stored trajectory; needs a snapshot at every step
/// between `t0` and `tau` (see [`crate::solver::RecordPlan::dense_until`]).
pub fn triangle_balance(traj: &Trajectory, region: TriangleRegion, tau: f64) -> Result<BalanceReport> {
    let mut probe = TriangleProbe::new(&traj.grid, region, tau)?;
    for s in &traj.snapshots {
        probe.observe(s);
    }
    probe.finish()
}

/// Balance over the backward light cone of `(x0, t0)`: the boundary fluxes
/// alone must carry the initial charge on `[x0 - t0, x0 + t0]`.
pub fn light_cone_balance(traj: &Trajectory, x0: f64, t0: f64) -> Result<BalanceReport> {
    triangle_balance(traj, TriangleRegion::light_cone(x0, t0)?, t0)
}

/// Worst excess of `|u|²` over `e^{8|β|c0}|u₀(x - t)|²` (and the mirrored
/// `v` bound) across all snapshots, clamped at zero.
pub fn check_pointwise_bound(traj: &Trajectory, c0: f64) -> f64 {
    let factor = (8.0 * traj.params.beta().abs() * c0).exp();
    let init = traj.initial();
    traj.snapshots
        .iter()
        .map(|s| envelope_excess(init, s, factor))
        .fold(0.0, f64::max)
}

fn envelope_excess(init: &SpinorField, field: &SpinorField, factor: f64) -> f64 {
    let k = field.step;
    let len = field.len();
    let mut worst = 0.0_f64;
    for j in 0..len {
        let u0 = j.checked_sub(k).map_or(0.0, |i| init.u[i].norm_sqr());
        let v0 = if j + k < len { init.v[j + k].norm_sqr() } else { 0.0 };
        worst = worst
            .max(field.u[j].norm_sqr() - factor * u0)
            .max(field.v[j].norm_sqr() - factor * v0);
    }
    worst
}

/// `max_j max(||u(x_j,t)| - |u₀(x_j - t)||, ||v(x_j,t)| - |v₀(x_j + t)||)`.
///
/// Zero up to rounding when moduli are transported exactly (Thirring with
/// the phase-split scheme).
pub fn modulus_transport_defect(init: &SpinorField, field: &SpinorField) -> f64 {
    let k = field.step;
    let len = field.len();
    let mut worst = 0.0_f64;
    for j in 0..len {
        let u0 = j.checked_sub(k).map_or(0.0, |i| init.u[i].norm());
        let v0 = if j + k < len { init.v[j + k].norm() } else { 0.0 };
        worst = worst
            .max((field.u[j].norm() - u0).abs())
            .max((field.v[j].norm() - v0).abs());
    }
    worst
}

//! Scattering profiles and their certified residuals.
//!
//! Along the right-moving characteristic with label `y`,
//! `u(y + t, t) = u₀(y) - i∫₀ᵗ N₁ dτ`, so `G₁(y) = -i∫₀^∞ N₁ dτ` and
//! `u(x, t) - u₀(x - t) - G₁(x - t) = i∫ₜ^∞ N₁ dτ`. The profile is truncated
//! at the run horizon and the discarded tail is bounded from the initial data
//! alone through the pointwise envelopes:
//!
//! ```text
//! ∫|i∫ₜ^∞ N₁|² dy <= c*²/4 · e^{24|β|C₀} · ∫ |u₀(y)|² (∫_{y+2t}^∞ |v₀|²)² dy
//! ```
//!
//! (mirrored for `v`).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{trapezoid, InitialData, ModelParams, Side, SpinorField};
use crate::solver::Trajectory;

/// Split point used by the sup-norm envelope unless told otherwise.
pub const DEFAULT_SUP_SPLIT: f64 = -5.0;

const INDEX_SLACK: f64 = 1e-9;

/// Truncated scattering profile on the lattice of characteristic labels
/// (`y = x - t` for `G₁`, `y = x + t` for `G₂`).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub side: Side,
    pub h: f64,
    pub y: Vec<f64>,
    pub values: Vec<Complex64>,
    pub t_max: f64,
    /// Rigorous L² bound on the part of the profile beyond `t_max`.
    pub tail_certificate: f64,
}

impl Profile {
    pub fn l2_norm(&self) -> f64 {
        (self.h * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// L² distance to another profile on the same label lattice.
    pub fn l2_distance(&self, other: &Profile) -> Result<f64> {
        if self.side != other.side || self.values.len() != other.values.len() {
            return Err(Error::GridMismatch(format!(
                "profiles {} ({} labels) and {} ({} labels) are not comparable",
                self.side.label(),
                self.values.len(),
                other.side.label(),
                other.values.len()
            )));
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((self.h * s).sqrt())
    }
}

/// Residual norms at one time, with the analytic envelopes they must obey.
///
/// The primary norms evaluate the remainder `i∫ₜ^{t_max} N dτ` label by label
/// from the recorded traces. The `direct_*` norms evaluate the literal
/// difference `u(x,t) - u₀(x-t) - G(x-t)`; once the remainder falls below
/// rounding level they measure cancellation noise only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub t: f64,
    pub h: f64,
    pub l2_u: f64,
    pub sup_u: f64,
    pub l2_v: f64,
    pub sup_v: f64,
    /// `sqrt(tail_bound(t))`, an upper bound for `l2_u`.
    pub analytic_bound_u: f64,
    pub analytic_bound_v: f64,
    pub sup_split: f64,
    pub sup_bound_u: f64,
    pub sup_bound_v: f64,
    pub direct_l2_u: f64,
    pub direct_sup_u: f64,
    pub direct_l2_v: f64,
    pub direct_sup_v: f64,
}

/// Profile truncated at the end of the run.
pub fn compute_profile(traj: &Trajectory, side: Side) -> Result<Profile> {
    compute_profile_at(traj, side, traj.t_end())
}

/// Profile truncated at `t_max`, which must be a trace checkpoint.
pub fn compute_profile_at(traj: &Trajectory, side: Side, t_max: f64) -> Result<Profile> {
    let k_max = trace_step(traj, t_max)?;
    let integral = traj.traces.integral(side, 0, k_max)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let grid = traj.grid;
    let bounds = TailBounds::from_trajectory(traj);
    let t_max = k_max as f64 * grid.h();
    Ok(Profile {
        side,
        h: grid.h(),
        y: (0..grid.len()).map(|j| grid.x(j)).collect(),
        values: integral.into_iter().map(|z| minus_i * z).collect(),
        t_max,
        tail_certificate: bounds.l2(t_max, side).sqrt(),
    })
}

/// Residuals at the recorded time `t`, sup envelope split at
/// [`DEFAULT_SUP_SPLIT`].
pub fn residual(traj: &Trajectory, t: f64, p_u: &Profile, p_v: &Profile) -> Result<ResidualReport> {
    residual_with_split(traj, t, p_u, p_v, DEFAULT_SUP_SPLIT)
}

pub fn residual_with_split(
    traj: &Trajectory,
    t: f64,
    p_u: &Profile,
    p_v: &Profile,
    split: f64,
) -> Result<ResidualReport> {
    let len = traj.grid.len();
    for (p, side) in [(p_u, Side::Right), (p_v, Side::Left)] {
        if p.side != side || p.values.len() != len {
            return Err(Error::GridMismatch(format!(
                "expected a {} profile with {len} labels from this trajectory",
                side.label()
            )));
        }
    }
    if p_u.t_max != p_v.t_max {
        return Err(Error::GridMismatch("profiles truncated at different horizons".into()));
    }
    let h = traj.grid.h();
    let state = traj.snapshot_at(t)?;
    let k = state.step;
    let k_max = trace_step(traj, p_u.t_max)?;
    if k > k_max {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: p_u.t_max,
        });
    }

    let i = Complex64::i();
    let rem_u: Vec<Complex64> = traj.traces.integral(Side::Right, k, k_max)?.into_iter().map(|z| i * z).collect();
    let rem_v: Vec<Complex64> = traj.traces.integral(Side::Left, k, k_max)?.into_iter().map(|z| i * z).collect();
    let (l2_u, sup_u) = norms(rem_u.iter().copied(), h);
    let (l2_v, sup_v) = norms(rem_v.iter().copied(), h);

    let init = traj.initial();
    let (direct_l2_u, direct_sup_u) = norms(direct_u(state, init, p_u), h);
    let (direct_l2_v, direct_sup_v) = norms(direct_v(state, init, p_v), h);

    let bounds = TailBounds::from_trajectory(traj);
    Ok(ResidualReport {
        t: state.t,
        h,
        l2_u,
        sup_u,
        l2_v,
        sup_v,
        analytic_bound_u: bounds.l2(state.t, Side::Right).sqrt(),
        analytic_bound_v: bounds.l2(state.t, Side::Left).sqrt(),
        sup_split: split,
        sup_bound_u: bounds.sup(state.t, split, Side::Right),
        sup_bound_v: bounds.sup(state.t, split, Side::Left),
        direct_l2_u,
        direct_sup_u,
        direct_l2_v,
        direct_sup_v,
    })
}

fn direct_u<'a>(
    state: &'a SpinorField,
    init: &'a SpinorField,
    p: &'a Profile,
) -> impl Iterator<Item = Complex64> + 'a {
    let k = state.step;
    state.u.iter().enumerate().map(move |(j, u)| match j.checked_sub(k) {
        Some(y) => u - init.u[y] - p.values[y],
        None => *u,
    })
}

fn direct_v<'a>(
    state: &'a SpinorField,
    init: &'a SpinorField,
    p: &'a Profile,
) -> impl Iterator<Item = Complex64> + 'a {
    let k = state.step;
    let len = state.len();
    state.v.iter().enumerate().map(move |(j, v)| {
        if j + k < len {
            v - init.v[j + k] - p.values[j + k]
        } else {
            *v
        }
    })
}

fn norms(values: impl Iterator<Item = Complex64>, h: f64) -> (f64, f64) {
    let (sq, sup) = values.fold((0.0_f64, 0.0_f64), |(s, m), z| (s + z.norm_sqr(), m.max(z.norm())));
    ((h * sq).sqrt(), sup)
}

fn trace_step(traj: &Trajectory, t: f64) -> Result<usize> {
    let k = traj
        .grid
        .step_index(t, "t_max")
        .map_err(|_| Error::MissingTrace { t })?;
    if !traj.traces.checkpoint_steps().any(|c| c == k) {
        return Err(Error::MissingTrace { t });
    }
    Ok(k)
}

/// L² tail bound on the remainder at time `t` for `side`.
///
/// `2t` is rounded down to an even number of cells, which can only enlarge
/// the inner integral.
pub fn tail_bound(data: &InitialData, m: &ModelParams, t: f64, side: Side) -> f64 {
    TailBounds::new(&data.u0, &data.v0, data.grid.x(0), data.grid.h(), data.c0, m).l2(t, side)
}

/// Sup-norm envelope for the remainder at time `t`, split at `split`
/// (at `-split` for the mirrored `v` side).
pub fn sup_tail_bound(data: &InitialData, m: &ModelParams, t: f64, split: f64, side: Side) -> f64 {
    TailBounds::new(&data.u0, &data.v0, data.grid.x(0), data.grid.h(), data.c0, m).sup(t, split, side)
}

/// Cumulative integrals of the initial data, reused across times.
#[derive(Debug, Clone)]
pub struct TailBounds {
    x0: f64,
    h: f64,
    u_sq: Vec<f64>,
    v_sq: Vec<f64>,
    /// `∫_{x_j}^∞ |v₀|²` by the trapezoid rule.
    v_suffix: Vec<f64>,
    /// `∫_{-∞}^{x_j} |u₀|²` by the trapezoid rule.
    u_prefix: Vec<f64>,
    /// `c*² e^{24|β|C₀}`.
    l2_scale: f64,
    /// `c* e^{12|β|C₀}`.
    sup_scale: f64,
}

impl TailBounds {
    pub fn new(u0: &[Complex64], v0: &[Complex64], x0: f64, h: f64, c0: f64, m: &ModelParams) -> Self {
        let u_sq: Vec<f64> = u0.iter().map(|z| z.norm_sqr()).collect();
        let v_sq: Vec<f64> = v0.iter().map(|z| z.norm_sqr()).collect();
        let len = v_sq.len();
        let mut v_suffix = vec![0.0; len];
        for j in (0..len.saturating_sub(1)).rev() {
            v_suffix[j] = v_suffix[j + 1] + 0.5 * h * (v_sq[j] + v_sq[j + 1]);
        }
        let mut u_prefix = vec![0.0; u_sq.len()];
        for j in 1..u_sq.len() {
            u_prefix[j] = u_prefix[j - 1] + 0.5 * h * (u_sq[j - 1] + u_sq[j]);
        }
        let growth = 12.0 * m.beta().abs() * c0;
        Self {
            x0,
            h,
            u_sq,
            v_sq,
            v_suffix,
            u_prefix,
            l2_scale: m.c_star().powi(2) * (2.0 * growth).exp(),
            sup_scale: m.c_star() * growth.exp(),
        }
    }

    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let init = traj.initial();
        Self::new(&init.u, &init.v, traj.grid.x(0), traj.grid.h(), traj.c0(), &traj.params)
    }

    fn shift_cells(&self, t: f64) -> usize {
        (t.max(0.0) / self.h + INDEX_SLACK).floor() as usize
    }

    pub fn l2(&self, t: f64, side: Side) -> f64 {
        let s2 = 2 * self.shift_cells(t);
        let len = self.u_sq.len();
        let integrand = (0..len).map(|j| match side {
            Side::Right => {
                let inner = self.v_suffix.get(j + s2).copied().unwrap_or(0.0);
                self.u_sq[j] * inner * inner
            }
            Side::Left => {
                let inner = j.checked_sub(s2).map_or(0.0, |i| self.u_prefix[i]);
                self.v_sq[j] * inner * inner
            }
        });
        0.25 * self.l2_scale * trapezoid(integrand, self.h)
    }

    pub fn sup(&self, t: f64, split: f64, side: Side) -> f64 {
        let len = self.u_sq.len();
        let pos = |x: f64| (x - self.x0) / self.h;
        let (near, far) = match side {
            Side::Right => {
                let total_v = self.v_suffix.first().copied().unwrap_or(0.0);
                let sup_left = (0..len)
                    .take_while(|&j| pos(split) + INDEX_SLACK >= j as f64)
                    .fold(0.0_f64, |m, j| m.max(self.u_sq[j]))
                    .sqrt();
                let start = (pos(split + 2.0 * t) + INDEX_SLACK).floor();
                let far_v = if start < 0.0 {
                    total_v
                } else {
                    self.v_suffix.get(start as usize).copied().unwrap_or(0.0)
                };
                let sup_u = self.u_sq.iter().fold(0.0_f64, |m, &s| m.max(s)).sqrt();
                (sup_left * total_v, sup_u * 0.5 * far_v)
            }
            Side::Left => {
                let total_u = self.u_prefix.last().copied().unwrap_or(0.0);
                let sup_right = (0..len)
                    .rev()
                    .take_while(|&j| j as f64 + INDEX_SLACK >= pos(-split))
                    .fold(0.0_f64, |m, j| m.max(self.v_sq[j]))
                    .sqrt();
                let end = (pos(-split - 2.0 * t) - INDEX_SLACK).ceil();
                let far_u = if end < 0.0 {
                    0.0
                } else {
                    self.u_prefix
                        .get(end as usize)
                        .copied()
                        .unwrap_or(total_u)
                };
                let sup_v = self.v_sq.iter().fold(0.0_f64, |m, &s| m.max(s)).sqrt();
                (sup_right * total_u, sup_v * 0.5 * far_u)
            }
        };
        self.sup_scale * near.max(far)
    }
}

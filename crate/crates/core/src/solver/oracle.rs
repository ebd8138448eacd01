//! Fourth-order reference solution.
//!
//! Works in characteristic coordinates: `U[j]` is `u` on the right-moving
//! characteristic starting at fine node `j`, `V[m]` is `v` on the left-moving
//! one starting at fine node `m`. At fine step `n` and stage time
//! `t_n + c·Δt` with `c ∈ {0, 1/2, 1}`, label `j` of `U` meets label
//! `j + 2n + 2c` of `V`; with `Δt` equal to the fine spacing that offset is a
//! whole number of nodes at every RK4 stage, so the coupled system is
//! integrated with no interpolation.

use num_complex::Complex64;

use crate::error::Result;
use crate::fields::{InitialData, ModelParams, SpinorField};
use crate::nonlinearity::eval_pair;

use super::trajectory::{Recorder, Schedule, Trajectory};
use super::{guard, init_state, Scheme, ORACLE_REFINEMENT};

pub(super) fn run(
    data: &InitialData,
    params: &ModelParams,
    scheme: &Scheme,
    schedule: Schedule,
    observer: &mut dyn FnMut(&SpinorField),
) -> Result<Trajectory> {
    let coarse = data.grid;
    let r = ORACLE_REFINEMENT;
    let fine = coarse.refine(r)?;
    let fine_data = data.resample(&fine)?;
    let len_f = fine.len();
    let dt = fine.h();

    let coarse_to_fine: Vec<Option<usize>> = (0..coarse.len())
        .map(|jc| {
            let p = (jc as i64 - coarse.pad() as i64) * r as i64 + fine.pad() as i64;
            (0..len_f as i64).contains(&p).then_some(p as usize)
        })
        .collect();

    let initial = init_state(data, &coarse)?;
    let mut recorder = Recorder::new(coarse, *params, *scheme, schedule, &initial);
    observer(&initial);

    let zero = Complex64::new(0.0, 0.0);
    let mut u_lab = fine_data.u0.clone();
    let mut v_lab = fine_data.v0.clone();
    let mut u_mark = u_lab.clone();
    let mut v_mark = v_lab.clone();
    let mut stage = Stages::new(len_f);
    let mut coarse_state = initial.clone();

    for n in 0..fine.n_steps() {
        stage.rk4(&mut u_lab, &mut v_lab, 2 * n, dt, params);
        if (n + 1) % r != 0 {
            continue;
        }
        let kc = (n + 1) / r;
        let n_now = n + 1;
        coarse_state.step = kc;
        coarse_state.t = kc as f64 * coarse.h();
        for (jc, p) in coarse_to_fine.iter().enumerate() {
            let (u, v) = match *p {
                Some(p) => (
                    p.checked_sub(n_now).map_or(zero, |q| u_lab[q]),
                    v_lab.get(p + n_now).copied().unwrap_or(zero),
                ),
                None => (zero, zero),
            };
            coarse_state.u[jc] = u;
            coarse_state.v[jc] = v;
        }
        guard(&coarse_state)?;

        if recorder.wants_checkpoint(kc) {
            let i = Complex64::i();
            let gather = |lab: &[Complex64], mark: &[Complex64]| -> Vec<Complex64> {
                coarse_to_fine
                    .iter()
                    .map(|p| p.map_or(zero, |p| i * (lab[p] - mark[p])))
                    .collect()
            };
            let right = gather(&u_lab, &u_mark);
            let left = gather(&v_lab, &v_mark);
            recorder.close_segment(kc, right, left);
            u_mark.copy_from_slice(&u_lab);
            v_mark.copy_from_slice(&v_lab);
        }
        recorder.record(&coarse_state);
        observer(&coarse_state);
    }
    Ok(recorder.finish())
}

struct Stages {
    ku: [Vec<Complex64>; 4],
    kv: [Vec<Complex64>; 4],
    us: Vec<Complex64>,
    vs: Vec<Complex64>,
}

impl Stages {
    fn new(len: usize) -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); len];
        Self {
            ku: [z(), z(), z(), z()],
            kv: [z(), z(), z(), z()],
            us: z(),
            vs: z(),
        }
    }

    /// One classical RK4 step; `offset` is the label shift `2n` at the step start.
    fn rk4(
        &mut self,
        u: &mut [Complex64],
        v: &mut [Complex64],
        offset: usize,
        dt: f64,
        params: &ModelParams,
    ) {
        let shifts = [offset, offset + 1, offset + 1, offset + 2];
        let weights = [0.0, 0.5 * dt, 0.5 * dt, dt];
        for s in 0..4 {
            if s == 0 {
                self.us.copy_from_slice(u);
                self.vs.copy_from_slice(v);
            } else {
                let w = weights[s];
                for j in 0..u.len() {
                    self.us[j] = u[j] + w * self.ku[s - 1][j];
                    self.vs[j] = v[j] + w * self.kv[s - 1][j];
                }
            }
            rhs(&self.us, &self.vs, shifts[s], params, &mut self.ku[s], &mut self.kv[s]);
        }
        let sixth = dt / 6.0;
        for j in 0..u.len() {
            u[j] += sixth
                * (self.ku[0][j] + 2.0 * self.ku[1][j] + 2.0 * self.ku[2][j] + self.ku[3][j]);
            v[j] += sixth
                * (self.kv[0][j] + 2.0 * self.kv[1][j] + 2.0 * self.kv[2][j] + self.kv[3][j]);
        }
    }
}

/// `dU_j/dt = -i N₁(U_j, V_{j+shift})`, `dV_m/dt = -i N₂(U_{m-shift}, V_m)`.
fn rhs(
    u: &[Complex64],
    v: &[Complex64],
    shift: usize,
    params: &ModelParams,
    ku: &mut [Complex64],
    kv: &mut [Complex64],
) {
    let zero = Complex64::new(0.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);
    let len = u.len();
    for j in 0..len {
        let partner = v.get(j + shift).copied().unwrap_or(zero);
        ku[j] = minus_i * eval_pair(u[j], partner, params).0;
    }
    for m in 0..len {
        let partner = m.checked_sub(shift).map_or(zero, |j| u[j]);
        kv[m] = minus_i * eval_pair(partner, v[m], params).1;
    }
}

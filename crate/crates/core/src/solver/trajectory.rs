use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{charge, Grid, ModelParams, Side, SpinorField};

use super::Scheme;

/// Which states a run keeps.
///
/// Snapshots are stored at every time in `times` and at the end of the run;
/// with `dense_until` set,
/// also at every step up to that time (needed for triangle balances on a
/// stored trajectory). Characteristic-trace checkpoints are taken at every
/// time in `times` and at the end of the run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordPlan {
    pub times: Vec<f64>,
    pub dense_until: Option<f64>,
}

impl RecordPlan {
    pub fn at(times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            dense_until: None,
        }
    }

    pub fn dense_until(mut self, t: f64) -> Self {
        self.dense_until = Some(t);
        self
    }

    pub(crate) fn schedule(&self, grid: &Grid) -> Result<Schedule> {
        let n = grid.n_steps();
        let mut record = vec![false; n + 1];
        let mut checkpoint = vec![false; n + 1];
        for &t in &self.times {
            let k = grid.step_index(t, "record_times")?;
            record[k] = true;
            checkpoint[k] = true;
        }
        if let Some(t) = self.dense_until {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::OutOfRange {
                    what: "dense_until",
                    value: t,
                    lo: 0.0,
                    hi: grid.t_end(),
                });
            }
            let last = ((t / grid.h() + 1e-6).floor() as usize).min(n);
            record[..=last].iter_mut().for_each(|r| *r = true);
        }
        checkpoint[0] = false;
        checkpoint[n] = true;
        record[n] = true;
        Ok(Schedule { record, checkpoint })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Schedule {
    record: Vec<bool>,
    checkpoint: Vec<bool>,
}

impl Schedule {
    pub(crate) fn is_record(&self, step: usize) -> bool {
        self.record.get(step).copied().unwrap_or(false)
    }

    pub(crate) fn is_checkpoint(&self, step: usize) -> bool {
        self.checkpoint.get(step).copied().unwrap_or(false)
    }
}

/// Integrals of the nonlinearity along every characteristic, per checkpoint
/// interval.
///
/// `right[i]` is `∫ N₁(u, v)(y + τ, τ) dτ` over the segment for the label
/// `y = x_i` of a right-moving characteristic, `left[i]` the analogue of
/// `N₂` along `(y - τ, τ)`. Segments are kept separate so that tail
/// integrals are sums of small terms rather than differences of large ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSegment {
    pub start_step: usize,
    pub end_step: usize,
    pub right: Vec<Complex64>,
    pub left: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharTraces {
    h: f64,
    steps_completed: usize,
    segments: Vec<TraceSegment>,
}

impl CharTraces {
    pub fn steps_completed(&self) -> usize {
        self.steps_completed
    }

    pub fn segments(&self) -> &[TraceSegment] {
        &self.segments
    }

    /// Steps at which the traces can be cut: 0 and every segment end.
    pub fn checkpoint_steps(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(0).chain(self.segments.iter().map(|s| s.end_step))
    }

    /// `∫ N dτ` over `[from_step·h, to_step·h]` along every characteristic of `side`.
    pub fn integral(&self, side: Side, from_step: usize, to_step: usize) -> Result<Vec<Complex64>> {
        for k in [from_step, to_step] {
            if !self.checkpoint_steps().any(|c| c == k) {
                return Err(Error::MissingTrace { t: k as f64 * self.h });
            }
        }
        let len = self.segments.first().map_or(0, |s| s.right.len());
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for seg in self
            .segments
            .iter()
            .filter(|s| s.start_step >= from_step && s.end_step <= to_step)
        {
            let values = match side {
                Side::Right => &seg.right,
                Side::Left => &seg.left,
            };
            out.iter_mut().zip(values).for_each(|(o, v)| *o += v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunDiagnostics {
    pub steps: usize,
    pub max_fixed_point_iters: u32,
}

/// Recorded output of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub params: ModelParams,
    pub scheme: Scheme,
    /// Stored states in increasing time; the first is always `t = 0`.
    pub snapshots: Vec<SpinorField>,
    pub traces: CharTraces,
    pub diagnostics: RunDiagnostics,
}

impl Trajectory {
    pub fn initial(&self) -> &SpinorField {
        &self.snapshots[0]
    }

    /// Charge of the initial state, the budget `C₀` used by every bound.
    pub fn c0(&self) -> f64 {
        charge(self.initial()).unwrap_or(f64::NAN)
    }

    pub fn t_end(&self) -> f64 {
        self.traces.steps_completed as f64 * self.grid.h()
    }

    pub fn snapshot_at_step(&self, step: usize) -> Option<&SpinorField> {
        self.snapshots
            .binary_search_by_key(&step, |s| s.step)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    pub fn snapshot_at(&self, t: f64) -> Result<&SpinorField> {
        let k = self
            .grid
            .step_index(t, "t")
            .map_err(|_| Error::MissingSnapshot { t })?;
        self.snapshot_at_step(k).ok_or(Error::MissingSnapshot { t })
    }

    pub fn record_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

pub(crate) struct Recorder {
    grid: Grid,
    params: ModelParams,
    scheme: Scheme,
    schedule: Schedule,
    snapshots: Vec<SpinorField>,
    acc_right: Vec<Complex64>,
    acc_left: Vec<Complex64>,
    segments: Vec<TraceSegment>,
    segment_start: usize,
    diagnostics: RunDiagnostics,
}

impl Recorder {
    pub(crate) fn new(
        grid: Grid,
        params: ModelParams,
        scheme: Scheme,
        schedule: Schedule,
        initial: &SpinorField,
    ) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            grid,
            params,
            scheme,
            schedule,
            snapshots: vec![initial.clone()],
            acc_right: vec![zero; grid.len()],
            acc_left: vec![zero; grid.len()],
            segments: Vec::new(),
            segment_start: 0,
            diagnostics: RunDiagnostics::default(),
        }
    }

    /// Adds the trapezoid contribution of step `k -> k + 1` to every label.
    pub(crate) fn accumulate(
        &mut self,
        k: usize,
        n1_prev: &[Complex64],
        n1_next: &[Complex64],
        n2_prev: &[Complex64],
        n2_next: &[Complex64],
    ) {
        let len = self.grid.len();
        let half = 0.5 * self.grid.h();
        let zero = Complex64::new(0.0, 0.0);
        // right-mover label i sits at node i + k, then i + k + 1
        for (i, acc) in self.acc_right.iter_mut().enumerate().take(len.saturating_sub(k)) {
            let p = i + k;
            let b = n1_next.get(p + 1).copied().unwrap_or(zero);
            *acc += half * (n1_prev[p] + b);
        }
        // left-mover label i sits at node i - k, then i - k - 1
        for (i, acc) in self.acc_left.iter_mut().enumerate().skip(k) {
            let p = i - k;
            let b = if p >= 1 { n2_next[p - 1] } else { zero };
            *acc += half * (n2_prev[p] + b);
        }
    }

    pub(crate) fn after_step(&mut self, state: &SpinorField, iters: u32) {
        self.diagnostics.steps = state.step;
        self.diagnostics.max_fixed_point_iters = self.diagnostics.max_fixed_point_iters.max(iters);
        if self.schedule.is_checkpoint(state.step) {
            let zero = Complex64::new(0.0, 0.0);
            let right = std::mem::replace(&mut self.acc_right, vec![zero; self.grid.len()]);
            let left = std::mem::replace(&mut self.acc_left, vec![zero; self.grid.len()]);
            self.close_segment(state.step, right, left);
        }
        self.record(state);
    }

    pub(crate) fn wants_checkpoint(&self, step: usize) -> bool {
        self.schedule.is_checkpoint(step)
    }

    pub(crate) fn close_segment(&mut self, end_step: usize, right: Vec<Complex64>, left: Vec<Complex64>) {
        self.segments.push(TraceSegment {
            start_step: self.segment_start,
            end_step,
            right,
            left,
        });
        self.segment_start = end_step;
    }

    pub(crate) fn record(&mut self, state: &SpinorField) {
        self.diagnostics.steps = state.step;
        if self.schedule.is_record(state.step) {
            self.snapshots.push(state.clone());
        }
    }

    pub(crate) fn finish(self) -> Trajectory {
        Trajectory {
            grid: self.grid,
            params: self.params,
            scheme: self.scheme,
            snapshots: self.snapshots,
            traces: CharTraces {
                h: self.grid.h(),
                steps_completed: self.diagnostics.steps,
                segments: self.segments,
            },
            diagnostics: self.diagnostics,
        }
    }
}

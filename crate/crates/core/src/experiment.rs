//! One configured experiment: run, verify, write artifacts.
//!
//! Artifacts in the output directory:
//!
//! * `snapshots.csv` — `t,x,re_u,im_u,re_v,im_v` at `t = 0` and every record time
//! * `profiles.csv`  — `side,y,re,im` for `G1`, `G2` truncated at `T`
//! * `residuals.csv` — `t,l2_u,sup_u,l2_v,sup_v,bound_u,bound_v`
//! * `balance.json`  — every triangle / light-cone balance
//! * `summary.json`  — each check with value, tolerance and identity; config hash
//! * `error.json`    — only when the solver aborts

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::asymptotics::{compute_profile_at, residual_with_split, Profile, ResidualReport, TailBounds};
use crate::config::{Check, ExperimentConfig, ModelKind};
use crate::conservation::{check_pointwise_bound, total_charge_drift, BalanceReport, TriangleProbe};
use crate::error::{Error, Result};
use crate::fields::{Grid, Side, SpinorField};
use crate::nonlinearity::identity_sweep;
use crate::output::{fmt_f64, print_table, write_json, write_profiles, write_residuals, write_snapshots, Num};
use crate::solver::{run_observed, RecordPlan, Trajectory};

/// Outcome of one check, as written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: Num,
    pub tolerance: Num,
    /// The relation verified, `value <= tolerance` in the stated form.
    pub identity: &'static str,
    pub pass: bool,
}

impl CheckResult {
    fn le(name: impl Into<String>, value: f64, tolerance: f64, identity: &'static str) -> Self {
        Self {
            name: name.into(),
            value: Num(value),
            tolerance: Num(tolerance),
            identity,
            // NaN fails
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub kind: ModelKind,
    pub alpha: Num,
    pub beta: Num,
    pub c_star: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub x_min: Num,
    pub x_max: Num,
    pub h: Num,
    #[serde(rename = "T")]
    pub t_end: Num,
    pub n_cells: usize,
    pub n_steps: usize,
    pub pad: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub t: Num,
    pub l2_u: Num,
    pub sup_u: Num,
    pub l2_v: Num,
    pub sup_v: Num,
    pub bound_u: Num,
    pub bound_v: Num,
    pub sup_bound_u: Num,
    pub sup_bound_v: Num,
    pub direct_l2_u: Num,
    pub direct_sup_u: Num,
    pub direct_l2_v: Num,
    pub direct_sup_v: Num,
}

impl From<&ResidualReport> for ResidualRow {
    fn from(r: &ResidualReport) -> Self {
        Self {
            t: Num(r.t),
            l2_u: Num(r.l2_u),
            sup_u: Num(r.sup_u),
            l2_v: Num(r.l2_v),
            sup_v: Num(r.sup_v),
            bound_u: Num(r.analytic_bound_u),
            bound_v: Num(r.analytic_bound_v),
            sup_bound_u: Num(r.sup_bound_u),
            sup_bound_v: Num(r.sup_bound_v),
            direct_l2_u: Num(r.direct_l2_u),
            direct_sup_u: Num(r.direct_sup_u),
            direct_l2_v: Num(r.direct_l2_v),
            direct_sup_v: Num(r.direct_sup_v),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub t_max: Num,
    pub g1_l2: Num,
    pub g2_l2: Num,
    pub tail_certificate_g1: Num,
    pub tail_certificate_g2: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub model: ModelSummary,
    pub grid: GridSummary,
    pub scheme: &'static str,
    pub c0: Num,
    pub steps: usize,
    pub max_fixed_point_iters: u32,
    pub checks: Vec<CheckResult>,
    pub profiles: ProfileSummary,
    pub residuals: Vec<ResidualRow>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct BalanceEntry {
    a: Num,
    b: Num,
    t0: Num,
    tau: Num,
    interior_charge: Num,
    right_flux: Num,
    left_flux: Num,
    initial_charge: Num,
    defect: Num,
    tolerance: Num,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct BalanceFile {
    identity: &'static str,
    regions: Vec<BalanceEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct ErrorFile {
    status: &'static str,
    config_hash: String,
    error: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub dir: PathBuf,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.summary.all_pass
    }
}

const CHARGE_IDENTITY: &str = "max_t |Q(t) - Q(0)| / Q(0) <= charge_tol, from (|u|^2+|v|^2)_t + (|u|^2-|v|^2)_x = 0";
const TRIANGLE_IDENTITY: &str =
    "|Q_[a+tau-t0, b-tau+t0](tau) + 2 int |u|^2 ds (right side) + 2 int |v|^2 ds (left side) - Q_[a,b](t0)| <= triangle_c h^2";
const POINTWISE_IDENTITY: &str =
    "|u(x,t)|^2 - e^{8|beta|C0}|u0(x-t)|^2 <= tol and |v(x,t)|^2 - e^{8|beta|C0}|v0(x+t)|^2 <= tol";
const PROFILE_IDENTITY: &str =
    "||G(T) - G(T/2)||_L2 <= cert(T/2) + cert(T) + sqrt(residual_k) h, cert = sqrt(tail_bound)";
const RESIDUAL_L2_IDENTITY: &str =
    "max_t [ ||u(.,t) - u0(.-t) - G1(.-t)||_L2^2 - tail_bound(t) ] <= residual_k h^2";
const RESIDUAL_SUP_IDENTITY: &str =
    "max_t [ sup_x |u(x,t) - u0(x-t) - G1(x-t)| - sup_tail_bound(t, M) ] <= sup_residual_k h^2";
const DECREASING_IDENTITY: &str =
    "number of record-time pairs where l2_u, sup_u, l2_v or sup_v fails to decrease strictly <= 0";
const TAIL_MONOTONE_IDENTITY: &str = "number of increases of tail_bound over t in {0, T/8, T/4, T/2, T} <= 0";
const TAIL_RATIO_IDENTITY: &str = "tail_bound(T) / tail_bound(0) <= tail_ratio_tol";
const FLUX_IDENTITY: &str =
    "max |Re(i conj(N1) u) + Re(i conj(N2) v)| / (1 + |u|^2 |v|^2) <= identity_tol over seeded samples";

/// Runs the experiment into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    run_experiment_in(cfg, &cfg.output_dir)
}

pub fn run_experiment_in(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let data = cfg.initial_data()?;
    let grid = data.grid;
    let h = grid.h();
    let t_end = grid.t_end();
    let half_t = (grid.n_steps() / 2) as f64 * h;

    let mut plan_times = cfg.record_times.clone();
    if half_t > 0.0 {
        plan_times.push(half_t);
    }
    let plan = RecordPlan::at(&plan_times);
    let mut probes: Vec<TriangleProbe> = if cfg.wants(Check::Triangle) {
        cfg.triangles
            .iter()
            .map(|t| TriangleProbe::new(&grid, t.region, t.tau))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let traj = match run_observed(&data, &cfg.params, &cfg.scheme, &plan, &mut |f| {
        probes.iter_mut().for_each(|p| p.observe(f))
    }) {
        Ok(t) => t,
        Err(e) => {
            let report = ErrorFile {
                status: "solver_error",
                config_hash: cfg.hash(),
                error: e.to_string(),
            };
            write_json(&dir.join("error.json"), &report)?;
            return Err(e);
        }
    };
    let balances = probes.into_iter().map(TriangleProbe::finish).collect::<Result<Vec<_>>>()?;

    // profiles and residuals are cheap; always produced
    let p_u = compute_profile_at(&traj, Side::Right, t_end)?;
    let p_v = compute_profile_at(&traj, Side::Left, t_end)?;
    let reports = cfg
        .record_times
        .iter()
        .map(|&t| residual_with_split(&traj, t, &p_u, &p_v, cfg.tolerances.sup_split))
        .collect::<Result<Vec<_>>>()?;

    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    for check in &cfg.checks {
        match check {
            Check::Charge => checks.push(CheckResult::le(
                "charge",
                total_charge_drift(&traj),
                tol.charge_tol,
                CHARGE_IDENTITY,
            )),
            Check::Triangle => {
                let worst = balances.iter().map(|b| b.defect.abs()).fold(0.0, f64::max);
                checks.push(CheckResult::le("triangle", worst, tol.triangle_c * h * h, TRIANGLE_IDENTITY));
            }
            Check::Pointwise => checks.push(CheckResult::le(
                "pointwise",
                check_pointwise_bound(&traj, traj.c0()),
                tol.pointwise_tol,
                POINTWISE_IDENTITY,
            )),
            Check::Profile => {
                for full in [&p_u, &p_v] {
                    let early = compute_profile_at(&traj, full.side, half_t)?;
                    let allowed = early.tail_certificate + full.tail_certificate + tol.residual_k.sqrt() * h;
                    checks.push(CheckResult::le(
                        format!("profile_truncation_{}", full.side.label()),
                        full.l2_distance(&early)?,
                        allowed,
                        PROFILE_IDENTITY,
                    ));
                }
            }
            Check::Residual => {
                let bounds = TailBounds::from_trajectory(&traj);
                let excess_l2 = |side: Side| {
                    reports
                        .iter()
                        .map(|r| {
                            let l2 = if side == Side::Right { r.l2_u } else { r.l2_v };
                            l2 * l2 - bounds.l2(r.t, side)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                let excess_sup = |side: Side| {
                    reports
                        .iter()
                        .map(|r| match side {
                            Side::Right => r.sup_u - r.sup_bound_u,
                            Side::Left => r.sup_v - r.sup_bound_v,
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                for side in [Side::Right, Side::Left] {
                    let s = if side == Side::Right { "u" } else { "v" };
                    checks.push(CheckResult::le(
                        format!("residual_l2_{s}"),
                        excess_l2(side).max(0.0),
                        tol.residual_k * h * h,
                        RESIDUAL_L2_IDENTITY,
                    ));
                    checks.push(CheckResult::le(
                        format!("residual_sup_{s}"),
                        excess_sup(side).max(0.0),
                        tol.sup_residual_k * h * h,
                        RESIDUAL_SUP_IDENTITY,
                    ));
                }
                checks.push(CheckResult::le(
                    "residual_decreasing",
                    non_decreasing_pairs(&reports) as f64,
                    0.0,
                    DECREASING_IDENTITY,
                ));
            }
            Check::Tails => {
                let bounds = TailBounds::from_trajectory(&traj);
                let times = tail_times(&grid);
                let mut increases = 0;
                let mut ratio: f64 = 0.0;
                for side in [Side::Right, Side::Left] {
                    let values: Vec<f64> = times.iter().map(|&t| bounds.l2(t, side)).collect();
                    increases += values.windows(2).filter(|w| !(w[1] <= w[0])).count();
                    let (first, last) = (values[0], values[values.len() - 1]);
                    let r = if first > 0.0 { last / first } else if last == 0.0 { 0.0 } else { f64::INFINITY };
                    ratio = ratio.max(r);
                }
                checks.push(CheckResult::le("tails_monotone", increases as f64, 0.0, TAIL_MONOTONE_IDENTITY));
                checks.push(CheckResult::le("tails_ratio", ratio, tol.tail_ratio_tol, TAIL_RATIO_IDENTITY));
            }
            Check::Identity => checks.push(CheckResult::le(
                "identity",
                identity_sweep(cfg.seed, tol.identity_samples).max_defect,
                tol.identity_tol,
                FLUX_IDENTITY,
            )),
        }
    }

    // artifacts
    let mut shown: Vec<usize> = vec![0];
    for &t in &cfg.record_times {
        shown.push(grid.step_index(t, "record_times")?);
    }
    let snapshots: Vec<SpinorField> = traj
        .snapshots
        .iter()
        .filter(|s| shown.contains(&s.step))
        .cloned()
        .collect();
    write_snapshots(&dir.join("snapshots.csv"), &snapshots, |j| grid.x(j))?;
    write_profiles(&dir.join("profiles.csv"), &[&p_u, &p_v])?;
    write_residuals(&dir.join("residuals.csv"), &reports)?;
    write_json(&dir.join("balance.json"), &balance_file(&balances, tol.triangle_c * h * h))?;

    let all_pass = checks.iter().all(|c| c.pass);
    let summary = Summary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash(),
        model: ModelSummary {
            kind: cfg.model,
            alpha: Num(cfg.params.alpha()),
            beta: Num(cfg.params.beta()),
            c_star: Num(cfg.params.c_star()),
        },
        grid: GridSummary {
            x_min: Num(grid.x_min()),
            x_max: Num(grid.x_max()),
            h: Num(h),
            t_end: Num(t_end),
            n_cells: grid.n_cells(),
            n_steps: grid.n_steps(),
            pad: grid.pad(),
        },
        scheme: cfg.scheme.kind.name(),
        c0: Num(data.c0),
        steps: traj.diagnostics.steps,
        max_fixed_point_iters: traj.diagnostics.max_fixed_point_iters,
        checks,
        profiles: profile_summary(&p_u, &p_v),
        residuals: reports.iter().map(ResidualRow::from).collect(),
        all_pass,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Outcome {
        summary,
        dir: dir.to_path_buf(),
    })
}

fn profile_summary(p_u: &Profile, p_v: &Profile) -> ProfileSummary {
    ProfileSummary {
        t_max: Num(p_u.t_max),
        g1_l2: Num(p_u.l2_norm()),
        g2_l2: Num(p_v.l2_norm()),
        tail_certificate_g1: Num(p_u.tail_certificate),
        tail_certificate_g2: Num(p_v.tail_certificate),
    }
}

fn balance_file(balances: &[BalanceReport], tolerance: f64) -> BalanceFile {
    BalanceFile {
        identity: TRIANGLE_IDENTITY,
        regions: balances
            .iter()
            .map(|b| BalanceEntry {
                a: Num(b.region.a),
                b: Num(b.region.b),
                t0: Num(b.region.t0),
                tau: Num(b.tau),
                interior_charge: Num(b.interior_charge),
                right_flux: Num(b.right_flux),
                left_flux: Num(b.left_flux),
                initial_charge: Num(b.initial_charge),
                defect: Num(b.defect),
                tolerance: Num(tolerance),
                pass: b.defect.abs() <= tolerance,
            })
            .collect(),
    }
}

/// `{0, T/8, T/4, T/2, T}` (exact fractions of `T`, no lattice needed).
fn tail_times(grid: &Grid) -> [f64; 5] {
    let t = grid.t_end();
    [0.0, t / 8.0, t / 4.0, t / 2.0, t]
}

/// `b` follows `a` strictly downward, or both are exactly zero (the
/// remainder has underflowed for good).
pub fn strictly_decreasing(a: f64, b: f64) -> bool {
    b < a || (a == 0.0 && b == 0.0)
}

/// Count of consecutive record-time pairs in which any residual norm fails
/// to decrease strictly.
pub fn non_decreasing_pairs(reports: &[ResidualReport]) -> usize {
    reports
        .windows(2)
        .filter(|w| {
            let (a, b) = (&w[0], &w[1]);
            ![(a.l2_u, b.l2_u), (a.sup_u, b.sup_u), (a.l2_v, b.l2_v), (a.sup_v, b.sup_v)]
                .iter()
                .all(|&(x, y)| strictly_decreasing(x, y))
        })
        .count()
}

/// One row of an h-refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub charge_drift: f64,
    pub triangle_defect: f64,
    /// L² distance of the final state to the next finer level (NaN on the last).
    pub self_difference: f64,
}

/// Observed convergence order `log2(coarse / fine)`.
pub fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Runs the configuration at `h, h/2, …, h/2^halvings`, writes `sweep.csv`
/// into the output directory and returns the rows.
pub fn sweep(cfg: &ExperimentConfig, halvings: u32) -> Result<Vec<SweepRow>> {
    sweep_in(cfg, halvings, &cfg.output_dir)
}

pub fn sweep_in(cfg: &ExperimentConfig, halvings: u32, dir: &Path) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut previous: Option<(Grid, SpinorField)> = None;
    for level in 0..=halvings {
        let mut level_cfg = cfg.clone();
        level_cfg.h = cfg.h / f64::from(1u32 << level);
        let data = level_cfg.initial_data()?;
        let grid = data.grid;
        let mut probes: Vec<TriangleProbe> = cfg
            .triangles
            .iter()
            .map(|t| TriangleProbe::new(&grid, t.region, t.tau))
            .collect::<Result<_>>()?;
        let traj: Trajectory = run_observed(
            &data,
            &level_cfg.params,
            &level_cfg.scheme,
            &RecordPlan::at(&level_cfg.record_times),
            &mut |f| probes.iter_mut().for_each(|p| p.observe(f)),
        )?;
        let defect = probes
            .into_iter()
            .map(|p| p.finish().map(|b| b.defect.abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let last = traj.snapshots.last().expect("final snapshot").clone();
        if let (Some((coarse_grid, coarse)), Some(row)) = (&previous, rows.last_mut()) {
            row.self_difference = refinement_distance(coarse_grid, coarse, &grid, &last);
        }
        rows.push(SweepRow {
            h: level_cfg.h,
            charge_drift: total_charge_drift(&traj),
            triangle_defect: defect,
            self_difference: f64::NAN,
        });
        previous = Some((grid, last));
    }
    write_sweep(&dir.join("sweep.csv"), &rows)?;
    Ok(rows)
}

/// L² distance, on the coarse nodes, between a state and its refinement by two.
pub fn refinement_distance(coarse_grid: &Grid, coarse: &SpinorField, fine_grid: &Grid, fine: &SpinorField) -> f64 {
    let mut sum = 0.0;
    for j in 0..coarse.len() {
        let offset = 2 * (j as i64 - coarse_grid.pad() as i64) + fine_grid.pad() as i64;
        if offset < 0 || offset >= fine.len() as i64 {
            sum += coarse.u[j].norm_sqr() + coarse.v[j].norm_sqr();
            continue;
        }
        let m = offset as usize;
        sum += (coarse.u[j] - fine.u[m]).norm_sqr() + (coarse.v[j] - fine.v[m]).norm_sqr();
    }
    (coarse_grid.h() * sum).sqrt()
}

fn sweep_table(rows: &[SweepRow]) -> Vec<Vec<String>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let ord = |f: fn(&SweepRow) -> f64| -> String {
                if i == 0 {
                    return String::new();
                }
                let o = order(f(&rows[i - 1]), f(r));
                if o.is_finite() {
                    format!("{o:.3}")
                } else {
                    String::new()
                }
            };
            let self_order = if i >= 1 && r.self_difference.is_finite() {
                let o = order(rows[i - 1].self_difference, r.self_difference);
                if o.is_finite() { format!("{o:.3}") } else { String::new() }
            } else {
                String::new()
            };
            vec![
                fmt_f64(r.h),
                fmt_f64(r.charge_drift),
                ord(|r| r.charge_drift),
                fmt_f64(r.triangle_defect),
                ord(|r| r.triangle_defect),
                if r.self_difference.is_finite() { fmt_f64(r.self_difference) } else { String::new() },
                self_order,
            ]
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 7] = [
    "h",
    "charge_drift",
    "charge_order",
    "triangle_defect",
    "triangle_order",
    "self_difference",
    "self_order",
];

fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let io = |e: csv::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for row in sweep_table(rows) {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Prints the sweep as an aligned table.
pub fn print_sweep(out: &mut dyn std::io::Write, rows: &[SweepRow]) -> std::io::Result<()> {
    print_table(out, &SWEEP_HEADER, &sweep_table(rows))
}

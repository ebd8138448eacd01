//! Experiment configuration: flat TOML keys, validated in one pass so that
//! every problem is reported together with the key it belongs to.
//!
//! ```toml
//! model = "gross_neveu"        # thirring | gross_neveu | custom (+ alpha, beta)
//! data = "gaussian"            # gaussian | bump | separated | zero
//! u_center = 0.0               # also u_width, u_amplitude, u_phase, v_*
//! x_min = -40.0
//! x_max = 40.0
//! h = 0.0078125
//! T = 20.0
//! record_times = [5.0, 10.0, 20.0]
//! checks = "all"               # or a list: charge, triangle, pointwise, ...
//! triangles = [[-4.0, 4.0, 0.0, 2.0]]   # a, b, t0, tau
//! light_cones = [[0.0, 2.0]]            # x0, t0
//! output_dir = "out/reference"
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::conservation::TriangleProbe;
use crate::error::{ConfigIssue, Error, Result};
use crate::fields::{
    is_lattice_time, make_initial_data, DataFamily, DataSpec, Grid, InitialData, ModelParams,
    PulseShape, TriangleRegion,
};
use crate::solver::{Scheme, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Thirring,
    GrossNeveu,
    Custom,
}

/// Verifications an experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Charge,
    Triangle,
    Pointwise,
    Profile,
    Residual,
    Tails,
    /// Seeded random sweep of the pointwise algebraic identity of `N`.
    Identity,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Charge,
        Check::Triangle,
        Check::Pointwise,
        Check::Profile,
        Check::Residual,
        Check::Tails,
        Check::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Charge => "charge",
            Check::Triangle => "triangle",
            Check::Pointwise => "pointwise",
            Check::Profile => "profile",
            Check::Residual => "residual",
            Check::Tails => "tails",
            Check::Identity => "identity",
        }
    }

    fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleSpec {
    pub region: TriangleRegion,
    pub tau: f64,
}

/// Declared tolerances of every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bound on the relative total-charge drift.
    pub charge_tol: f64,
    /// `|defect| <= triangle_c · h²` for every triangle and light cone.
    pub triangle_c: f64,
    pub pointwise_tol: f64,
    /// `l2² <= tail_bound + residual_k · h²`.
    pub residual_k: f64,
    /// `sup <= sup_tail_bound + sup_residual_k · h²`.
    pub sup_residual_k: f64,
    pub sup_split: f64,
    /// `tail_bound(T) <= tail_ratio_tol · tail_bound(0)`.
    pub tail_ratio_tol: f64,
    pub identity_samples: u64,
    pub identity_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            charge_tol: 1e-5,
            triangle_c: 0.5,
            pointwise_tol: 1e-8,
            residual_k: 1e-6,
            sup_residual_k: 1e-4,
            sup_split: -5.0,
            tail_ratio_tol: 1e-6,
            identity_samples: 100_000,
            identity_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub data: DataSpec,
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub scheme: Scheme,
    pub record_times: Vec<f64>,
    pub checks: Vec<Check>,
    /// Where artifacts go; not part of the experiment's identity.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub seed: u64,
    pub triangles: Vec<TriangleSpec>,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::from_extent(self.x_min, self.x_max, self.h, self.t_end)
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        make_initial_data(&self.data, &self.grid()?)
    }

    pub fn wants(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }

    /// Canonical JSON of everything that determines the results.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "alpha",
    "beta",
    "data",
    "u_center",
    "u_width",
    "u_amplitude",
    "u_phase",
    "v_center",
    "v_width",
    "v_amplitude",
    "v_phase",
    "x_min",
    "x_max",
    "h",
    "T",
    "scheme",
    "fixed_point_tol",
    "fixed_point_max_iter",
    "record_times",
    "checks",
    "output_dir",
    "seed",
    "triangles",
    "light_cones",
    "charge_tol",
    "triangle_c",
    "pointwise_tol",
    "residual_k",
    "sup_residual_k",
    "sup_split",
    "tail_ratio_tol",
    "identity_samples",
    "identity_tol",
];

/// Triangles used when none are configured: nested regions, one starting
/// at `t0 > 0`, plus the light cone of `(0, 2)`. Dropped if they do not fit.
const DEFAULT_TRIANGLES: [[f64; 4]; 4] = [
    [-4.0, 4.0, 0.0, 2.0],
    [-3.0, 3.0, 0.5, 2.0],
    [-2.0, 2.0, 1.0, 2.5],
    [-2.0, 2.0, 0.0, 2.0],
];

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Parses and validates; on failure every violation is listed.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::InvalidConfig(vec![ConfigIssue::new("<syntax>", e.message())]))?;
    let mut r = Reader {
        table,
        issues: Vec::new(),
    };
    for key in r.table.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            r.issues.push(ConfigIssue::new(key.clone(), "unknown key"));
        }
    }

    // model
    let model_name = r.string("model");
    let alpha = r.float("alpha");
    let beta = r.float("beta");
    let (model, params) = match model_name.as_deref() {
        None => {
            r.issue("model", "missing required key");
            (ModelKind::Thirring, ModelParams::thirring())
        }
        Some("thirring") | Some("gross_neveu") => {
            for (key, value) in [("alpha", alpha), ("beta", beta)] {
                if value.is_some() {
                    r.issue(key, "only allowed with model = \"custom\"");
                }
            }
            if model_name.as_deref() == Some("thirring") {
                (ModelKind::Thirring, ModelParams::thirring())
            } else {
                (ModelKind::GrossNeveu, ModelParams::gross_neveu())
            }
        }
        Some("custom") => {
            if alpha.is_none() {
                r.issue("alpha", "required with model = \"custom\"");
            }
            if beta.is_none() {
                r.issue("beta", "required with model = \"custom\"");
            }
            match ModelParams::new(alpha.unwrap_or(0.0), beta.unwrap_or(0.0)) {
                Ok(p) => (ModelKind::Custom, p),
                Err(e) => {
                    r.issue("alpha", e.to_string());
                    (ModelKind::Custom, ModelParams::thirring())
                }
            }
        }
        Some(other) => {
            r.issue("model", format!("unknown model `{other}` (thirring, gross_neveu, custom)"));
            (ModelKind::Thirring, ModelParams::thirring())
        }
    };

    // data
    let family = match r.string("data").as_deref() {
        None | Some("gaussian") => DataFamily::Gaussian,
        Some("bump") => DataFamily::Bump,
        Some("separated") => DataFamily::Separated,
        Some("zero") => DataFamily::Zero,
        Some(other) => {
            r.issue("data", format!("unknown data family `{other}` (gaussian, bump, separated, zero)"));
            DataFamily::Gaussian
        }
    };
    let reference = DataSpec::reference_gaussian();
    let u = r.shape("u", reference.u);
    let v = r.shape("v", reference.v);
    let data = DataSpec { family, u, v };

    // grid
    let x_min = r.required_float("x_min");
    let x_max = r.required_float("x_max");
    let h = r.required_float("h");
    let t_end = r.required_float("T");
    let mut grid = None;
    // h and T are checked on their own so that a missing extent does not
    // hide their problems
    let h_ok = match h {
        Some(h) if !(h.is_finite() && h > 0.0) => {
            r.issue("h", format!("h = {h} must be positive"));
            false
        }
        Some(_) => true,
        None => false,
    };
    let t_ok = match (t_end, h) {
        (Some(t_end), _) if !(t_end.is_finite() && t_end > 0.0) => {
            r.issue("T", format!("T = {t_end} must be positive"));
            false
        }
        (Some(t_end), Some(h)) if h_ok && !is_lattice_time(t_end, h) => {
            r.issue("T", format!("T not a multiple of h (T = {t_end}, h = {h})"));
            false
        }
        (Some(_), _) => h_ok,
        (None, _) => false,
    };
    if let (Some(x_min), Some(x_max), Some(h)) = (x_min, x_max, h) {
        let x_ok = if !(x_max > x_min) {
            r.issue("x_max", format!("x_max = {x_max} must exceed x_min = {x_min}"));
            false
        } else if h_ok && !is_lattice_time(x_max - x_min, h) {
            r.issue("x_max", format!("x_max - x_min = {} is not a multiple of h = {h}", x_max - x_min));
            false
        } else {
            h_ok
        };
        if let (true, true, Some(t_end)) = (x_ok, t_ok, t_end) {
            match Grid::from_extent(x_min, x_max, h, t_end) {
                Ok(g) => grid = Some(g),
                Err(e) => r.issue("h", e.to_string()),
            }
        }
    }

    if let Err(e) = data.validate() {
        r.issue("data", e.to_string());
    } else if let Some(g) = &grid {
        if let Err(e) = make_initial_data(&data, g) {
            let key = match e {
                Error::SupportOverflow { lo, x_min, .. } if lo < x_min => "x_min",
                Error::SupportOverflow { .. } => "x_max",
                _ => "data",
            };
            r.issue(key, e.to_string());
        }
    }

    // scheme
    let kind = match r.string("scheme").as_deref() {
        None | Some("trapezoidal") => SchemeKind::Trapezoidal,
        Some("phase_split") => SchemeKind::PhaseSplit,
        Some("oracle4") => SchemeKind::Oracle4,
        Some(other) => {
            r.issue("scheme", format!("unknown scheme `{other}` (trapezoidal, phase_split, oracle4)"));
            SchemeKind::Trapezoidal
        }
    };
    let defaults = Scheme::default();
    let scheme = Scheme {
        kind,
        fixed_point_tol: r.float("fixed_point_tol").unwrap_or(defaults.fixed_point_tol),
        fixed_point_max_iter: r
            .unsigned("fixed_point_max_iter")
            .map(|n| u32::try_from(n).unwrap_or(u32::MAX))
            .unwrap_or(defaults.fixed_point_max_iter),
    };
    if let Err(e) = scheme.validate(&params) {
        let key = match e {
            Error::UnsupportedScheme { ref reason, .. } if reason.starts_with("fixed_point_tol") => "fixed_point_tol",
            Error::UnsupportedScheme { ref reason, .. } if reason.starts_with("fixed_point_max_iter") => {
                "fixed_point_max_iter"
            }
            _ => "scheme",
        };
        r.issue(key, e.to_string());
    }

    // record times
    let record_times = match r.float_list("record_times") {
        Some(times) => {
            if let (true, Some(h), Some(t_end)) = (h_ok, h, t_end) {
                for (i, &t) in times.iter().enumerate() {
                    let key = format!("record_times[{i}]");
                    if !(0.0..=t_end).contains(&t) {
                        r.issue(key, format!("{t} lies outside [0, T = {t_end}]"));
                    } else if !is_lattice_time(t, h) {
                        r.issue(key, format!("{t} is not a multiple of h = {h}"));
                    }
                }
            }
            let mut times = times;
            times.sort_by(f64::total_cmp);
            times.dedup();
            times
        }
        None => grid.map(default_record_times).unwrap_or_default(),
    };

    // checks
    let checks = match r.table.get("checks").cloned() {
        None => Check::ALL.to_vec(),
        Some(Value::String(s)) if s == "all" => Check::ALL.to_vec(),
        Some(Value::Array(items)) => {
            let mut set = BTreeSet::new();
            for (i, item) in items.iter().enumerate() {
                match item.as_str().and_then(Check::parse) {
                    Some(c) => {
                        set.insert(c);
                    }
                    None => r.issue(
                        format!("checks[{i}]"),
                        format!(
                            "unknown check {item} (charge, triangle, pointwise, profile, residual, tails, identity)"
                        ),
                    ),
                }
            }
            set.into_iter().collect()
        }
        Some(other) => {
            r.issue("checks", format!("expected \"all\" or a list of check names, got {other}"));
            Vec::new()
        }
    };

    // triangles and light cones
    let mut triangles = Vec::new();
    let explicit = r.table.contains_key("triangles") || r.table.contains_key("light_cones");
    let tri_rows = r.float_rows("triangles", 4);
    let cone_rows = r.float_rows("light_cones", 2);
    if let Some(g) = &grid {
        let candidates: Vec<(String, [f64; 4])> = if explicit {
            let tri = tri_rows
                .iter()
                .enumerate()
                .map(|(i, row)| (format!("triangles[{i}]"), [row[0], row[1], row[2], row[3]]));
            let cones = cone_rows.iter().enumerate().map(|(i, row)| {
                let (x0, t0) = (row[0], row[1]);
                (format!("light_cones[{i}]"), [x0 - t0, x0 + t0, 0.0, t0])
            });
            tri.chain(cones).collect()
        } else {
            DEFAULT_TRIANGLES.iter().map(|row| (String::new(), *row)).collect()
        };
        for (key, [a, b, t0, tau]) in candidates {
            let checked = TriangleRegion::new(a, b, t0).and_then(|region| {
                TriangleProbe::new(g, region, tau)?;
                Ok(TriangleSpec { region, tau })
            });
            match checked {
                Ok(spec) => triangles.push(spec),
                Err(e) if explicit => r.issue(key, e.to_string()),
                Err(_) => {}
            }
        }
    }

    // tolerances
    let d = Tolerances::default();
    let tolerances = Tolerances {
        charge_tol: r.nonneg("charge_tol", d.charge_tol),
        triangle_c: r.nonneg("triangle_c", d.triangle_c),
        pointwise_tol: r.nonneg("pointwise_tol", d.pointwise_tol),
        residual_k: r.nonneg("residual_k", d.residual_k),
        sup_residual_k: r.nonneg("sup_residual_k", d.sup_residual_k),
        sup_split: r.float("sup_split").unwrap_or(d.sup_split),
        tail_ratio_tol: r.nonneg("tail_ratio_tol", d.tail_ratio_tol),
        identity_samples: r.unsigned("identity_samples").unwrap_or(d.identity_samples),
        identity_tol: r.nonneg("identity_tol", d.identity_tol),
    };

    let output_dir = PathBuf::from(r.string("output_dir").unwrap_or_else(|| "out".into()));
    let seed = r.unsigned("seed").unwrap_or(0);

    if !r.issues.is_empty() {
        return Err(Error::InvalidConfig(r.issues));
    }
    Ok(ExperimentConfig {
        model,
        params,
        data,
        x_min: x_min.unwrap_or_default(),
        x_max: x_max.unwrap_or_default(),
        h: h.unwrap_or_default(),
        t_end: t_end.unwrap_or_default(),
        scheme,
        record_times,
        checks,
        output_dir,
        seed,
        triangles,
        tolerances,
    })
}

/// `{T/4, T/2, T}` rounded down to the lattice.
fn default_record_times(grid: Grid) -> Vec<f64> {
    let n = grid.n_steps();
    let mut steps = vec![n / 4, n / 2, n];
    steps.retain(|&k| k > 0);
    steps.dedup();
    steps.into_iter().map(|k| k as f64 * grid.h()).collect()
}

struct Reader {
    table: Table,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ConfigIssue::new(key, message));
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                let msg = format!("expected a string, got {other}");
                self.issue(key, msg);
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let value = self.table.get(key)?.clone();
        match as_float(&value) {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.issue(key, format!("expected a finite number, got {value}"));
                None
            }
        }
    }

    fn required_float(&mut self, key: &str) -> Option<f64> {
        if !self.table.contains_key(key) {
            self.issue(key, "missing required key");
            return None;
        }
        self.float(key)
    }

    fn nonneg(&mut self, key: &str, default: f64) -> f64 {
        match self.float(key) {
            Some(x) if x >= 0.0 => x,
            Some(x) => {
                self.issue(key, format!("{x} must be non-negative"));
                default
            }
            None => default,
        }
    }

    fn unsigned(&mut self, key: &str) -> Option<u64> {
        match self.table.get(key)? {
            Value::Integer(n) if *n >= 0 => Some(*n as u64),
            other => {
                let msg = format!("expected a non-negative integer, got {other}");
                self.issue(key, msg);
                None
            }
        }
    }

    fn shape(&mut self, prefix: &str, default: PulseShape) -> PulseShape {
        let mut get = |name: &str, d: f64| self.float(&format!("{prefix}_{name}")).unwrap_or(d);
        let shape = PulseShape::new(
            get("center", default.center),
            get("width", default.width),
            get("amplitude", default.amplitude),
            get("phase", default.phase),
        );
        if shape.width <= 0.0 {
            self.issue(format!("{prefix}_width"), format!("width = {} must be positive", shape.width));
        }
        shape
    }

    fn float_list(&mut self, key: &str) -> Option<Vec<f64>> {
        let value = self.table.get(key)?.clone();
        let Value::Array(items) = value else {
            self.issue(key, format!("expected a list of numbers, got {value}"));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match as_float(item) {
                Some(x) if x.is_finite() => out.push(x),
                _ => self.issue(format!("{key}[{i}]"), format!("expected a finite number, got {item}")),
            }
        }
        Some(out)
    }

    /// List of fixed-length numeric rows; malformed rows are reported and skipped.
    fn float_rows(&mut self, key: &str, width: usize) -> Vec<Vec<f64>> {
        let Some(value) = self.table.get(key).cloned() else {
            return Vec::new();
        };
        let Value::Array(rows) = value else {
            self.issue(key, format!("expected a list of {width}-element lists"));
            return Vec::new();
        };
        let mut out = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let parsed: Option<Vec<f64>> = row
                .as_array()
                .filter(|r| r.len() == width)
                .and_then(|r| r.iter().map(as_float).collect());
            match parsed {
                Some(p) if p.iter().all(|x| x.is_finite()) => out.push(p),
                _ => self.issue(format!("{key}[{i}]"), format!("expected {width} finite numbers, got {row}")),
            }
        }
        out
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(n) => Some(*n as f64),
        _ => None,
    }
}

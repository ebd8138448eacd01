//! Lattice, state and initial-data types.
//!
//! The lattice has unit CFL: the time step equals the space step `h`, so a
//! right-moving characteristic advances exactly one node per step and a
//! left-moving one retreats exactly one node. Each side of the physical
//! window carries `pad >= n_steps` cells of zeros, which keeps every
//! nonzero sample away from the array ends for the whole run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian samples below this modulus are stored as exact zeros.
pub const GAUSSIAN_FLOOR: f64 = 1e-300;

/// Zero cells added on top of `n_steps` when padding a grid.
pub const PAD_MARGIN: usize = 8;

/// Allowed distance (in cells) between a coordinate and its lattice node.
const LATTICE_SLACK: f64 = 1e-6;

/// Direction of a characteristic family.
///
/// `Right` is the `u` component travelling along `x - t = const` (profile
/// G₁); `Left` is `v` travelling along `x + t = const` (profile G₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Right => "G1",
            Side::Left => "G2",
        }
    }
}

/// Coupling constants of `W(u, v) = α|u|²|v|² + β(ūv + uv̄)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "couplings must be finite (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Thirring model, `(α, β) = (1, 0)`.
    pub fn thirring() -> Self {
        Self { alpha: 1.0, beta: 0.0 }
    }

    /// Gross–Neveu model, `(α, β) = (0, 1/4)`.
    pub fn gross_neveu() -> Self {
        Self { alpha: 0.0, beta: 0.25 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Envelope constant with `|N₁| <= c_star |u||v|²` and `|N₂| <= c_star |v||u|²`.
    pub fn c_star(&self) -> f64 {
        self.alpha.abs() + 4.0 * self.beta.abs()
    }
}

/// Uniform unit-CFL lattice.
///
/// Node `j` sits at `x_min + (j - pad) h`; nodes `pad .. pad + n_cells` form the
/// physical window `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    h: f64,
    n_cells: usize,
    n_steps: usize,
    pad: usize,
}

impl Grid {
    /// Grid with the default padding `n_steps + PAD_MARGIN`.
    pub fn new(x_min: f64, h: f64, n_cells: usize, n_steps: usize) -> Result<Self> {
        Self::with_pad(x_min, h, n_cells, n_steps, n_steps + PAD_MARGIN)
    }

    pub fn with_pad(x_min: f64, h: f64, n_cells: usize, n_steps: usize, pad: usize) -> Result<Self> {
        if !x_min.is_finite() {
            return Err(Error::InvalidGrid(format!("x_min = {x_min} is not finite")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("h = {h} must be positive")));
        }
        if n_cells == 0 || n_steps == 0 {
            return Err(Error::InvalidGrid(
                "n_cells and n_steps must be positive".to_string(),
            ));
        }
        if pad < n_steps {
            return Err(Error::InvalidGrid(format!(
                "pad = {pad} is smaller than n_steps = {n_steps}"
            )));
        }
        Ok(Self {
            x_min,
            h,
            n_cells,
            n_steps,
            pad,
        })
    }

    /// Grid covering `[x_min, x_max]` up to time `t_end`; both spans must be
    /// whole multiples of `h`.
    pub fn from_extent(x_min: f64, x_max: f64, h: f64, t_end: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("h = {h} must be positive")));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidGrid(format!(
                "x_max = {x_max} must exceed x_min = {x_min}"
            )));
        }
        let cells = lattice_count(x_max - x_min, h, "x_max - x_min")?;
        let n_steps = lattice_count(t_end, h, "T")?;
        Self::new(x_min, h, cells + 1, n_steps)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Last node of the physical window.
    pub fn x_max(&self) -> f64 {
        self.x(self.pad + self.n_cells - 1)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Total number of stored nodes, padding included.
    pub fn len(&self) -> usize {
        self.n_cells + 2 * self.pad
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_end(&self) -> f64 {
        self.n_steps as f64 * self.h
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (j as f64 - self.pad as f64) * self.h
    }

    /// Index of the node at `x`, or an error if `x` is off the lattice or
    /// outside the stored array.
    pub fn node_index(&self, x: f64, what: &'static str) -> Result<usize> {
        let offset = lattice_offset(x - self.x_min, self.h, what, x)?;
        let j = offset + self.pad as i64;
        if j < 0 || j >= self.len() as i64 {
            return Err(Error::OutOfRange {
                what,
                value: x,
                lo: self.x(0),
                hi: self.x(self.len() - 1),
            });
        }
        Ok(j as usize)
    }

    /// Step index of time `t` within `[0, t_end]`.
    pub fn step_index(&self, t: f64, what: &'static str) -> Result<usize> {
        let k = lattice_offset(t, self.h, what, t)?;
        if k < 0 || k > self.n_steps as i64 {
            return Err(Error::OutOfRange {
                what,
                value: t,
                lo: 0.0,
                hi: self.t_end(),
            });
        }
        Ok(k as usize)
    }

    /// The same physical window and horizon on a lattice `factor` times finer.
    pub fn refine(&self, factor: usize) -> Result<Grid> {
        if factor == 0 {
            return Err(Error::InvalidGrid("refinement factor must be positive".into()));
        }
        Grid::new(
            self.x_min,
            self.h / factor as f64,
            (self.n_cells - 1) * factor + 1,
            self.n_steps * factor,
        )
    }

    /// Same lattice and window, run up to `t_end` instead.
    pub fn with_horizon(&self, t_end: f64) -> Result<Grid> {
        let n_steps = lattice_count(t_end, self.h, "T")?;
        Grid::new(self.x_min, self.h, self.n_cells, n_steps)
    }
}

fn lattice_offset(value: f64, h: f64, what: &'static str, report: f64) -> Result<i64> {
    let cells = value / h;
    let k = cells.round();
    if !cells.is_finite() || (cells - k).abs() > LATTICE_SLACK {
        return Err(Error::OffLattice {
            what,
            value: report,
            h,
        });
    }
    Ok(k as i64)
}

fn lattice_count(span: f64, h: f64, what: &'static str) -> Result<usize> {
    let k = lattice_offset(span, h, what, span)?;
    if k <= 0 {
        return Err(Error::InvalidGrid(format!("{what} = {span} must be positive")));
    }
    Ok(k as usize)
}

/// Whether `t` is a whole multiple of `h` (same slack as the grid uses).
pub fn is_lattice_time(t: f64, h: f64) -> bool {
    lattice_offset(t, h, "t", t).is_ok()
}

/// The pair `(u, v)` on the full padded lattice at time `t = step * h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub t: f64,
    pub step: usize,
    pub h: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(len: usize, h: f64) -> Self {
        Self {
            t: 0.0,
            step: 0,
            h,
            u: vec![Complex64::new(0.0, 0.0); len],
            v: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }
}

/// Total charge `Q = h Σ (|u_j|² + |v_j|²)`.
///
/// The padded ends are zero, so this is the trapezoid rule on the whole line.
pub fn charge(field: &SpinorField) -> Result<f64> {
    let mut q = 0.0;
    for (j, (u, v)) in field.u.iter().zip(&field.v).enumerate() {
        if !(u.re.is_finite() && u.im.is_finite() && v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { index: j, t: field.t });
        }
        q += u.norm_sqr() + v.norm_sqr();
    }
    Ok(field.h * q)
}

/// Trapezoid rule with uniform spacing over consecutive samples.
pub(crate) fn trapezoid<I: IntoIterator<Item = f64>>(samples: I, h: f64) -> f64 {
    let mut iter = samples.into_iter();
    let Some(first) = iter.next() else {
        return 0.0;
    };
    let mut sum = 0.5 * first;
    let mut last = None;
    for s in iter {
        if let Some(prev) = last.replace(s) {
            sum += prev;
        }
    }
    match last {
        Some(l) => h * (sum + 0.5 * l),
        // a single node spans no interval
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFamily {
    Gaussian,
    /// Compactly supported smooth bump `A e^{iφ} exp(1 - 1/(1 - r²))`, `r = (x - c)/w`.
    Bump,
    /// Bumps with `supp u₀` strictly to the right of `supp v₀`.
    Separated,
    Zero,
}

impl DataFamily {
    pub fn name(self) -> &'static str {
        match self {
            DataFamily::Gaussian => "gaussian",
            DataFamily::Bump => "bump",
            DataFamily::Separated => "separated",
            DataFamily::Zero => "zero",
        }
    }
}

/// Shape of one component: `amplitude · e^{i phase}` times a profile of the
/// given `width` centred at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl PulseShape {
    pub fn new(center: f64, width: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            center,
            width,
            amplitude,
            phase,
        }
    }

    fn validate(&self, component: &'static str) -> Result<()> {
        let bad = |reason: String| Error::InvalidShape {
            name: component,
            reason,
        };
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(bad(format!("width = {} must be positive", self.width)));
        }
        if !self.center.is_finite() || !self.amplitude.is_finite() || !self.phase.is_finite() {
            return Err(bad("center, amplitude and phase must be finite".into()));
        }
        Ok(())
    }

    fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Initial-data family plus the shapes of both components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub family: DataFamily,
    pub u: PulseShape,
    pub v: PulseShape,
}

impl DataSpec {
    pub fn zero() -> Self {
        Self {
            family: DataFamily::Zero,
            ..Self::reference_gaussian()
        }
    }

    /// `u₀(x) = e^{-x²}`, `v₀(x) = e^{-(x-1)²}`.
    pub fn reference_gaussian() -> Self {
        Self {
            family: DataFamily::Gaussian,
            u: PulseShape::new(0.0, 1.0, 1.0, 0.0),
            v: PulseShape::new(1.0, 1.0, 1.0, 0.0),
        }
    }

    pub fn gaussian(u: PulseShape, v: PulseShape) -> Self {
        Self {
            family: DataFamily::Gaussian,
            u,
            v,
        }
    }

    pub fn bump(u: PulseShape, v: PulseShape) -> Self {
        Self {
            family: DataFamily::Bump,
            u,
            v,
        }
    }

    pub fn separated(u: PulseShape, v: PulseShape) -> Self {
        Self {
            family: DataFamily::Separated,
            u,
            v,
        }
    }

    /// Closed interval outside which the component is exactly zero, or
    /// `None` when the component vanishes identically.
    pub fn support(&self, side: Side) -> Option<(f64, f64)> {
        let shape = match side {
            Side::Right => &self.u,
            Side::Left => &self.v,
        };
        let radius = match self.family {
            DataFamily::Zero => return None,
            DataFamily::Gaussian => {
                if shape.amplitude.abs() < GAUSSIAN_FLOOR {
                    return None;
                }
                shape.width * (shape.amplitude.abs() / GAUSSIAN_FLOOR).ln().sqrt()
            }
            DataFamily::Bump | DataFamily::Separated => {
                if shape.amplitude == 0.0 {
                    return None;
                }
                shape.width
            }
        };
        Some((shape.center - radius, shape.center + radius))
    }

    fn sample(&self, shape: &PulseShape, x: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match self.family {
            DataFamily::Zero => zero,
            DataFamily::Gaussian => {
                let r = (x - shape.center) / shape.width;
                let z = shape.coefficient() * (-r * r).exp();
                if z.norm() < GAUSSIAN_FLOOR {
                    zero
                } else {
                    z
                }
            }
            DataFamily::Bump | DataFamily::Separated => {
                let r = (x - shape.center) / shape.width;
                if r.abs() >= 1.0 {
                    zero
                } else {
                    shape.coefficient() * (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == DataFamily::Zero {
            return Ok(());
        }
        self.u.validate("u")?;
        self.v.validate("v")?;
        if self.family == DataFamily::Separated {
            if let (Some((u_lo, _)), Some((_, v_hi))) =
                (self.support(Side::Right), self.support(Side::Left))
            {
                if u_lo <= v_hi {
                    return Err(Error::InvalidShape {
                        name: "separated",
                        reason: format!(
                            "supp u0 must lie strictly right of supp v0 (u starts at {u_lo}, v ends at {v_hi})"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Sampled initial data together with its charge budget `c0 = ∫(|u₀|² + |v₀|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub spec: DataSpec,
    pub grid: Grid,
    pub u0: Vec<Complex64>,
    pub v0: Vec<Complex64>,
    pub c0: f64,
}

pub fn make_initial_data(spec: &DataSpec, grid: &Grid) -> Result<InitialData> {
    spec.validate()?;
    for (side, component) in [(Side::Right, "u0"), (Side::Left, "v0")] {
        if let Some((lo, hi)) = spec.support(side) {
            let slack = 1e-9 * grid.h();
            if lo < grid.x_min() - slack || hi > grid.x_max() + slack {
                return Err(Error::SupportOverflow {
                    component,
                    lo,
                    hi,
                    x_min: grid.x_min(),
                    x_max: grid.x_max(),
                });
            }
        }
    }
    let len = grid.len();
    let mut u0 = vec![Complex64::new(0.0, 0.0); len];
    let mut v0 = vec![Complex64::new(0.0, 0.0); len];
    if spec.family != DataFamily::Zero {
        for j in grid.pad()..grid.pad() + grid.n_cells() {
            let x = grid.x(j);
            u0[j] = spec.sample(&spec.u, x);
            v0[j] = spec.sample(&spec.v, x);
        }
    }
    let c0 = grid.h()
        * u0
            .iter()
            .zip(&v0)
            .map(|(u, v)| u.norm_sqr() + v.norm_sqr())
            .sum::<f64>();
    Ok(InitialData {
        spec: *spec,
        grid: *grid,
        u0,
        v0,
        c0,
    })
}

impl InitialData {
    /// Samples the same family on another lattice.
    pub fn resample(&self, grid: &Grid) -> Result<InitialData> {
        make_initial_data(&self.spec, grid)
    }

    pub fn sup_norm(&self, side: Side) -> f64 {
        let samples = match side {
            Side::Right => &self.u0,
            Side::Left => &self.v0,
        };
        samples.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }
}

/// Characteristic triangle with base `[a, b]` at time `t0` and apex at
/// `((a + b)/2, (b - a)/2 + t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleRegion {
    pub a: f64,
    pub b: f64,
    pub t0: f64,
}

impl TriangleRegion {
    pub fn new(a: f64, b: f64, t0: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidRegion("coordinates must be finite".into()));
        }
        if a >= b {
            return Err(Error::InvalidRegion(format!("a = {a} must be below b = {b}")));
        }
        if t0 < 0.0 {
            return Err(Error::InvalidRegion(format!("t0 = {t0} must be non-negative")));
        }
        Ok(Self { a, b, t0 })
    }

    /// Backward light cone of `(x0, t0)`, i.e. the triangle on `[x0 - t0, x0 + t0]` at time 0.
    pub fn light_cone(x0: f64, t0: f64) -> Result<Self> {
        Self::new(x0 - t0, x0 + t0, 0.0)
    }

    pub fn apex(&self) -> (f64, f64) {
        (0.5 * (self.a + self.b), 0.5 * (self.b - self.a) + self.t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fine_grid() -> Grid {
        Grid::from_extent(-30.0, 30.0, 1.0 / 128.0, 1.0).unwrap()
    }

    #[test]
    fn presets_and_envelope() {
        let t = ModelParams::thirring();
        assert_eq!((t.alpha(), t.beta()), (1.0, 0.0));
        let g = ModelParams::gross_neveu();
        assert_eq!((g.alpha(), g.beta()), (0.0, 0.25));
        let m = ModelParams::new(-0.5, -2.0).unwrap();
        assert_eq!(m.c_star(), 8.5);
        assert!(ModelParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::from_extent(-40.0, 40.0, 1.0 / 128.0, 20.0).unwrap();
        assert_eq!(g.n_cells(), 10241);
        assert_eq!(g.n_steps(), 2560);
        assert_eq!(g.pad(), 2568);
        assert_eq!(g.x(g.pad()), -40.0);
        assert_eq!(g.x_max(), 40.0);
        assert_eq!(g.node_index(0.0, "x").unwrap(), g.pad() + 40 * 128);
        assert_eq!(g.step_index(2.5, "t").unwrap(), 320);
        assert!(g.step_index(20.5, "t").is_err());
        assert!(Grid::from_extent(0.0, 1.0, 0.1, 10.05).is_err());
        assert!(Grid::with_pad(0.0, 0.1, 10, 5, 4).is_err());
    }

    #[test]
    fn zero_family() {
        let d = make_initial_data(&DataSpec::zero(), &fine_grid()).unwrap();
        assert!(d.u0.iter().chain(&d.v0).all(|z| *z == Complex64::new(0.0, 0.0)));
        assert_eq!(d.c0, 0.0);
    }

    #[test]
    fn gaussian_charge_matches_closed_form() {
        let spec = DataSpec::gaussian(
            PulseShape::new(0.0, 1.0, 1.0, 0.0),
            PulseShape::new(0.0, 1.0, 0.0, 0.0),
        );
        let d = make_initial_data(&spec, &fine_grid()).unwrap();
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((d.c0 - expected).abs() < 1e-8, "c0 = {}", d.c0);
    }

    #[test]
    fn separated_support_is_exact() {
        let spec = DataSpec::separated(
            PulseShape::new(1.5, 0.5, 1.0, 0.3),
            PulseShape::new(-1.5, 0.5, 0.7, -1.0),
        );
        let grid = fine_grid();
        let d = make_initial_data(&spec, &grid).unwrap();
        let j0 = grid.node_index(0.0, "x").unwrap();
        assert_eq!(d.u0[j0], Complex64::new(0.0, 0.0));
        assert_eq!(d.v0[j0], Complex64::new(0.0, 0.0));
        for j in 0..grid.len() {
            assert_eq!(d.u0[j] * d.v0[j], Complex64::new(0.0, 0.0));
            let x = grid.x(j);
            if !(1.0..=2.0).contains(&x) {
                assert_eq!(d.u0[j], Complex64::new(0.0, 0.0), "x = {x}");
            }
        }
    }

    #[test]
    fn separated_requires_ordering() {
        let spec = DataSpec::separated(
            PulseShape::new(-1.5, 0.5, 1.0, 0.0),
            PulseShape::new(1.5, 0.5, 1.0, 0.0),
        );
        assert!(matches!(
            make_initial_data(&spec, &fine_grid()),
            Err(Error::InvalidShape { name: "separated", .. })
        ));
    }

    #[test]
    fn support_overflow_is_rejected() {
        let grid = Grid::from_extent(-10.0, 10.0, 0.125, 1.0).unwrap();
        let err = make_initial_data(&DataSpec::reference_gaussian(), &grid).unwrap_err();
        assert!(matches!(err, Error::SupportOverflow { component: "u0", .. }));
        assert!(err.to_string().contains("extend x_min/x_max"));
    }

    #[test]
    fn invalid_width_rejected() {
        let spec = DataSpec::bump(
            PulseShape::new(0.0, 0.0, 1.0, 0.0),
            PulseShape::new(0.0, 1.0, 1.0, 0.0),
        );
        assert!(make_initial_data(&spec, &fine_grid()).is_err());
    }

    #[test]
    fn charge_of_zero_and_nonfinite() {
        let mut f = SpinorField::zeros(16, 0.5);
        assert_eq!(charge(&f).unwrap(), 0.0);
        f.v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(charge(&f), Err(Error::NonFinite { index: 3, .. })));
    }

    #[test]
    fn charge_of_left_gaussian() {
        let spec = DataSpec::gaussian(
            PulseShape::new(0.0, 1.0, 0.0, 0.0),
            PulseShape::new(0.0, 1.0, 1.0, 0.0),
        );
        let grid = fine_grid();
        let d = make_initial_data(&spec, &grid).unwrap();
        let f = SpinorField {
            t: 0.0,
            step: 0,
            h: grid.h(),
            u: d.u0.clone(),
            v: d.v0.clone(),
        };
        let q = charge(&f).unwrap();
        assert!((q - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-8);
        assert!(((q - d.c0) / d.c0).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_weights() {
        assert_eq!(trapezoid([1.0, 1.0, 1.0], 0.5), 1.0);
        assert_eq!(trapezoid([2.0], 0.5), 0.0);
        assert_eq!(trapezoid(std::iter::empty(), 0.5), 0.0);
        assert_eq!(trapezoid([0.0, 2.0], 1.0), 1.0);
    }

    #[test]
    fn light_cone_region() {
        let r = TriangleRegion::light_cone(1.0, 2.0).unwrap();
        assert_eq!((r.a, r.b, r.t0), (-1.0, 3.0, 0.0));
        assert_eq!(r.apex(), (1.0, 2.0));
        assert!(TriangleRegion::new(1.0, 1.0, 0.0).is_err());
    }
}

//! Closed forms of the potential `W(u, v) = α|u|²|v|² + β(ūv + uv̄)²` and
//! its Wirtinger derivatives
//!
//! ```text
//! N₁ = ∂W/∂ū = α u|v|² + 2β(ūv + uv̄) v
//! N₂ = ∂W/∂v̄ = α v|u|² + 2β(ūv + uv̄) u
//! ```
//!
//! `ūv + uv̄ = 2 Re(ū v)` is real and always evaluated as such.

use num_complex::Complex64;

use crate::fields::ModelParams;

/// Pointwise value of the spinor `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPair {
    pub u: Complex64,
    pub v: Complex64,
}

impl SpinorPair {
    pub fn new(u: Complex64, v: Complex64) -> Self {
        Self { u, v }
    }
}

/// `ūv + uv̄`.
#[inline]
fn bilinear(u: Complex64, v: Complex64) -> f64 {
    2.0 * (u.re * v.re + u.im * v.im)
}

pub fn eval_w(p: SpinorPair, m: &ModelParams) -> f64 {
    let s = bilinear(p.u, p.v);
    m.alpha() * p.u.norm_sqr() * p.v.norm_sqr() + m.beta() * s * s
}

#[inline]
pub fn eval_n1(p: SpinorPair, m: &ModelParams) -> Complex64 {
    let s = bilinear(p.u, p.v);
    p.u * (m.alpha() * p.v.norm_sqr()) + p.v * (2.0 * m.beta() * s)
}

#[inline]
pub fn eval_n2(p: SpinorPair, m: &ModelParams) -> Complex64 {
    let s = bilinear(p.u, p.v);
    p.v * (m.alpha() * p.u.norm_sqr()) + p.u * (2.0 * m.beta() * s)
}

/// Both nonlinear terms at once, sharing the bilinear form.
#[inline]
pub fn eval_pair(u: Complex64, v: Complex64, m: &ModelParams) -> (Complex64, Complex64) {
    let s = 2.0 * m.beta() * bilinear(u, v);
    let n1 = u * (m.alpha() * v.norm_sqr()) + v * s;
    let n2 = v * (m.alpha() * u.norm_sqr()) + u * s;
    (n1, n2)
}

/// Real-variable derivatives of `(N₁, N₂)`.
///
/// Entry `c` holds `(∂N₁/∂x_c, ∂N₂/∂x_c)` for `x = (Re u, Im u, Re v, Im v)`.
pub fn eval_jacobian(u: Complex64, v: Complex64, m: &ModelParams) -> [(Complex64, Complex64); 4] {
    let (a, b) = (m.alpha(), 2.0 * m.beta());
    let s = bilinear(u, v);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let (u_sq, v_sq) = (u.norm_sqr(), v.norm_sqr());
    // ∂s/∂(Re u, Im u, Re v, Im v) = 2(Re v, Im v, Re u, Im u)
    let ds = [2.0 * v.re, 2.0 * v.im, 2.0 * u.re, 2.0 * u.im];
    // ∂|u|², ∂|v|²
    let du_sq = [2.0 * u.re, 2.0 * u.im, 0.0, 0.0];
    let dv_sq = [0.0, 0.0, 2.0 * v.re, 2.0 * v.im];
    // ∂u, ∂v
    let du = [one, i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let dv = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one, i];
    std::array::from_fn(|c| {
        let n1 = a * (du[c] * v_sq + u * dv_sq[c]) + b * (ds[c] * v + s * dv[c]);
        let n2 = a * (dv[c] * u_sq + v * du_sq[c]) + b * (ds[c] * u + s * du[c]);
        (n1, n2)
    })
}

/// `Re(i N̄₁ u) + Re(i N̄₂ v)`, evaluated from the returned `N₁`, `N₂`.
///
/// Vanishes identically: `N̄₁u + N̄₂v = 2α|u|²|v|² + 2β(ūv + uv̄)²` is real.
pub fn charge_flux_defect(p: SpinorPair, m: &ModelParams) -> f64 {
    let i = Complex64::i();
    let n1 = eval_n1(p, m);
    let n2 = eval_n2(p, m);
    (i * n1.conj() * p.u).re + (i * n2.conj() * p.v).re
}

/// Source `2 Re(i N̄₁ u)` of the transport law `(|u|²)_t + (|u|²)_x`.
///
/// Only the β part contributes: `-4β(ūv + uv̄) Im(v̄u)`. Zero when `β = 0`.
pub fn modulus_source_u(p: SpinorPair, m: &ModelParams) -> f64 {
    let cross = (p.v.conj() * p.u).im;
    -4.0 * m.beta() * bilinear(p.u, p.v) * cross
}

/// Source `2 Re(i N̄₂ v)` of the transport law `(|v|²)_t - (|v|²)_x`.
pub fn modulus_source_v(p: SpinorPair, m: &ModelParams) -> f64 {
    let cross = (p.u.conj() * p.v).im;
    -4.0 * m.beta() * bilinear(p.u, p.v) * cross
}

/// Worst case of a seeded random sweep of the charge-flux identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySweep {
    pub samples: u64,
    /// `max |charge_flux_defect| / (1 + |u|²|v|²)`.
    pub max_defect: f64,
    pub worst: (SpinorPair, f64, f64),
}

/// Draws `samples` points with `Re`, `Im` of `u`, `v` uniform in `[-3, 3]` and
/// `α`, `β` uniform in `[-2, 2]` from a ChaCha stream seeded with `seed`.
pub fn identity_sweep(seed: u64, samples: u64) -> IdentitySweep {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentitySweep {
        samples,
        max_defect: 0.0,
        worst: (SpinorPair::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), 0.0, 0.0),
    };
    for _ in 0..samples {
        let mut z = || Complex64::new(rng.gen_range(-3.0..=3.0), rng.gen_range(-3.0..=3.0));
        let p = SpinorPair::new(z(), z());
        let (alpha, beta) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
        let m = ModelParams::new(alpha, beta).expect("finite couplings");
        let d = charge_flux_defect(p, &m).abs() / (1.0 + p.u.norm_sqr() * p.v.norm_sqr());
        if d > out.max_defect {
            out.max_defect = d;
            out.worst = (p, alpha, beta);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_sweep_is_seeded() {
        let a = identity_sweep(11, 2000);
        let b = identity_sweep(11, 2000);
        let c = identity_sweep(12, 2000);
        assert_eq!(a, b);
        assert_ne!(a.worst, c.worst);
        assert!(a.max_defect <= 1e-12);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let m = ModelParams::new(0.7, -0.3).unwrap();
        let (u, v) = (c(0.4, -1.1), c(-0.8, 0.5));
        let jac = eval_jacobian(u, v, &m);
        let delta = 1e-5;
        let dirs = [c(1.0, 0.0), c(0.0, 1.0)];
        for col in 0..4 {
            let e = dirs[col % 2] * delta;
            let (up, vp, um, vm) = if col < 2 { (u + e, v, u - e, v) } else { (u, v + e, u, v - e) };
            let (p1, p2) = eval_pair(up, vp, &m);
            let (m1, m2) = eval_pair(um, vm, &m);
            let fd1 = (p1 - m1) / (2.0 * delta);
            let fd2 = (p2 - m2) / (2.0 * delta);
            assert!((fd1 - jac[col].0).norm() < 1e-9, "col {col}");
            assert!((fd2 - jac[col].1).norm() < 1e-9, "col {col}");
        }
    }

    #[test]
    fn potential_examples() {
        let th = ModelParams::thirring();
        let gn = ModelParams::gross_neveu();
        assert_eq!(eval_w(SpinorPair::new(c(0.0, 0.0), c(3.0, -1.0)), &th), 0.0);
        assert_eq!(eval_w(SpinorPair::new(c(1.0, 0.0), c(0.0, 2.0)), &th), 4.0);
        assert_eq!(eval_w(SpinorPair::new(c(1.0, 0.0), c(0.0, 1.0)), &gn), 0.0);
    }

    #[test]
    fn n1_examples() {
        let th = ModelParams::thirring();
        let gn = ModelParams::gross_neveu();
        let zero = c(0.0, 0.0);
        assert_eq!(eval_n1(SpinorPair::new(c(0.4, -2.0), zero), &gn), zero);
        assert_eq!(eval_n1(SpinorPair::new(c(1.0, 0.0), c(2.0, 0.0)), &th), c(4.0, 0.0));
        assert_eq!(eval_n1(SpinorPair::new(c(1.0, 0.0), c(1.0, 0.0)), &gn), c(1.0, 0.0));
    }

    #[test]
    fn n2_examples() {
        let th = ModelParams::thirring();
        let gn = ModelParams::gross_neveu();
        let zero = c(0.0, 0.0);
        assert_eq!(eval_n2(SpinorPair::new(zero, c(0.4, -2.0)), &th), zero);
        assert_eq!(eval_n2(SpinorPair::new(c(2.0, 0.0), c(1.0, 0.0)), &th), c(4.0, 0.0));
        assert_eq!(eval_n2(SpinorPair::new(c(0.0, 1.0), c(1.0, 0.0)), &gn), zero);
    }

    #[test]
    fn pair_matches_single_evaluations() {
        let m = ModelParams::new(0.7, -1.3).unwrap();
        let p = SpinorPair::new(c(0.3, 0.4), c(1.1, -0.2));
        let (n1, n2) = eval_pair(p.u, p.v, &m);
        assert!((n1 - eval_n1(p, &m)).norm() < 1e-15);
        assert!((n2 - eval_n2(p, &m)).norm() < 1e-15);
    }

    #[test]
    fn flux_defect_examples() {
        let p = SpinorPair::new(c(0.3, 0.4), c(1.1, -0.2));
        assert!(charge_flux_defect(p, &ModelParams::thirring()).abs() < 1e-14);
        assert!(charge_flux_defect(p, &ModelParams::gross_neveu()).abs() < 1e-14);
    }

    #[test]
    fn thirring_has_no_modulus_source() {
        let th = ModelParams::new(2.5, 0.0).unwrap();
        let p = SpinorPair::new(c(-0.3, 7.4), c(1.1, -0.2));
        assert_eq!(modulus_source_u(p, &th), 0.0);
        assert_eq!(modulus_source_v(p, &th), 0.0);
    }

    #[test]
    fn modulus_sources_match_generic_form() {
        let m = ModelParams::new(-0.4, 0.9).unwrap();
        let p = SpinorPair::new(c(0.8, -0.1), c(-0.5, 1.3));
        let i = Complex64::i();
        let su = 2.0 * (i * eval_n1(p, &m).conj() * p.u).re;
        let sv = 2.0 * (i * eval_n2(p, &m).conj() * p.v).re;
        assert!((modulus_source_u(p, &m) - su).abs() < 1e-14);
        assert!((modulus_source_v(p, &m) - sv).abs() < 1e-14);
        assert!((su + sv).abs() < 1e-14);
    }
}

//! Free particle on a ring of radius `R`.
//!
//! The propagator between angle points is written as a sum over winding
//! classes `n`, each class contributing the free-particle kernel evaluated at
//! the unwrapped displacement `Δ + 2πn`. Real-time winding sums do not
//! converge absolutely, so every kernel is evaluated on the rotated contour
//! `t_c = t (1 - iε)`; with `ε > 0` the terms decay like a Gaussian in `n`.
//!
//! [`spectral_propagator`] evaluates the same kernel from the eigenfunction
//! expansion. The two agree by Poisson summation and each serves as the
//! other's oracle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::{is_finite, Amplitude};

/// Tail modulus below which adaptive truncation stops.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Hard cap on any adaptively chosen truncation bound.
pub const MAX_TRUNCATION: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("invalid ring parameter `{name}` = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("infinite winding sums need epsilon > 0")]
    RegularizationRequired,
    #[error("truncation bound must be at least 1")]
    InvalidTruncation,
    #[error("tail modulus {tail:e} still above {tolerance:e} at the truncation cap {cap}")]
    NotConverged { cap: u32, tail: f64, tolerance: f64 },
    #[error("angle ordering requires 0 <= theta <= beta <= alpha < pi (theta={theta}, beta={beta}, alpha={alpha})")]
    Ordering { theta: f64, beta: f64, alpha: f64 },
    #[error("amplitude evaluation produced a non-finite value")]
    NonFinite,
}

/// Physical constants and contour regularization for the ring propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingParams {
    pub mass: f64,
    pub hbar: f64,
    pub radius: f64,
    pub time: f64,
    /// Dimensionless contour rotation, `t_c = time * (1 - i * epsilon)`.
    pub epsilon: f64,
}

impl RingParams {
    /// Unit mass, action and radius.
    pub fn new(time: f64, epsilon: f64) -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            radius: 1.0,
            time,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), RingError> {
        let positive = [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("radius", self.radius),
            ("time", self.time),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(RingError::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite and > 0",
                });
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(RingError::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                requirement: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    fn validate_regularized(&self) -> Result<(), RingError> {
        self.validate()?;
        if self.epsilon == 0.0 {
            return Err(RingError::RegularizationRequired);
        }
        Ok(())
    }

    /// `t (1 - iε)`
    pub fn contour_time(&self) -> Complex64 {
        Complex64::new(self.time, -self.time * self.epsilon)
    }

    /// `m R² / ħ`, the inverse of the angular diffusion constant.
    fn stiffness(&self) -> f64 {
        self.mass * self.radius * self.radius / self.hbar
    }
}

/// Angle on the ring, stored as its representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct AnglePoint(f64);

impl AnglePoint {
    /// # Panics
    ///
    /// Panics if `radians` is not finite.
    pub fn new(radians: f64) -> Self {
        assert!(radians.is_finite(), "angle must be finite, got {radians}");
        let v = radians.rem_euclid(TAU);
        // rem_euclid rounds tiny negative inputs up to exactly 2π
        Self(if v >= TAU { 0.0 } else { v })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for AnglePoint {
    fn from(radians: f64) -> Self {
        Self::new(radians)
    }
}

/// Winding number of a homotopy class of ring paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WindingClass(pub i64);

/// A truncated sum together with the modulus of its last included term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated {
    pub value: Amplitude,
    pub tail_bound: f64,
    pub bound: u32,
}

/// Free kernel `sqrt(mR²/(2πiħt_c)) exp(i mR² x² / (2ħ t_c))` with the
/// constants hoisted out of the winding loop.
#[derive(Debug, Clone, Copy)]
struct FreeKernel {
    prefactor: Complex64,
    phase_coeff: Complex64,
}

impl FreeKernel {
    fn new(params: &RingParams) -> Self {
        let tc = params.contour_time();
        let stiffness = params.stiffness();
        let prefactor = (Complex64::new(stiffness / TAU, 0.0) / (Complex64::i() * tc)).sqrt();
        let phase_coeff = Complex64::new(0.0, 0.5 * stiffness) / tc;
        Self {
            prefactor,
            phase_coeff,
        }
    }

    fn at(&self, displacement: f64) -> Complex64 {
        self.prefactor * (self.phase_coeff * (displacement * displacement)).exp()
    }

    fn winding(&self, delta: f64, n: i64) -> Complex64 {
        self.at(delta + TAU * n as f64)
    }
}

fn finite(z: Amplitude) -> Result<Amplitude, RingError> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(RingError::NonFinite)
    }
}

fn finite_sum(t: Truncated) -> Result<Truncated, RingError> {
    finite(t.value)?;
    Ok(t)
}

fn displacement(from: AnglePoint, to: AnglePoint) -> f64 {
    to.value() - from.value()
}

/// Contribution of the winding class `n` to the propagator from `theta` to
/// `alpha`.
pub fn winding_propagator(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
    n: WindingClass,
) -> Result<Amplitude, RingError> {
    params.validate()?;
    finite(FreeKernel::new(params).winding(displacement(theta, alpha), n.0))
}

/// Winding sum over `-n_max ..= n_max`.
pub fn total_propagator(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
    n_max: u32,
) -> Result<Truncated, RingError> {
    params.validate_regularized()?;
    if n_max == 0 {
        return Err(RingError::InvalidTruncation);
    }
    let kernel = FreeKernel::new(params);
    let delta = displacement(theta, alpha);
    let n_max = i64::from(n_max);

    let mut value = kernel.winding(delta, 0);
    for n in 1..=n_max {
        value += kernel.winding(delta, n) + kernel.winding(delta, -n);
    }
    let tail_bound = kernel
        .winding(delta, n_max)
        .norm()
        .max(kernel.winding(delta, -n_max).norm());
    finite_sum(Truncated {
        value,
        tail_bound,
        bound: n_max as u32,
    })
}

/// Eigenfunction expansion
/// `(1/2π) Σ_l exp(ilΔ) exp(-iħ l² t_c / (2mR²))` over `-l_max ..= l_max`.
///
/// `l_max = 0` keeps only the constant mode.
pub fn spectral_propagator(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
    l_max: u32,
) -> Result<Truncated, RingError> {
    params.validate_regularized()?;
    let delta = displacement(theta, alpha);
    // -i ħ t_c / (2 m R²)
    let mode_coeff = Complex64::new(0.0, -0.5 / params.stiffness()) * params.contour_time();
    let mode = |l: u32| -> Complex64 {
        let l = f64::from(l);
        (mode_coeff * (l * l)).exp()
    };

    let mut value = Complex64::new(1.0, 0.0);
    for l in 1..=l_max {
        // l and -l together: 2 cos(lΔ) keeps the sum exactly even in Δ
        value += mode(l) * (2.0 * (f64::from(l) * delta).cos());
    }
    finite_sum(Truncated {
        value: value / TAU,
        tail_bound: mode(l_max).norm() / TAU,
        bound: l_max,
    })
}

/// Doubles the truncation bound, starting from 1, until the last included
/// term drops below [`TAIL_TOLERANCE`] or [`MAX_TRUNCATION`] is reached.
pub fn adaptive<F>(mut sum: F) -> Result<Truncated, RingError>
where
    F: FnMut(u32) -> Result<Truncated, RingError>,
{
    let mut bound = 1;
    loop {
        let result = sum(bound)?;
        if result.tail_bound < TAIL_TOLERANCE {
            return Ok(result);
        }
        if bound >= MAX_TRUNCATION {
            return Err(RingError::NotConverged {
                cap: MAX_TRUNCATION,
                tail: result.tail_bound,
                tolerance: TAIL_TOLERANCE,
            });
        }
        bound = (bound * 2).min(MAX_TRUNCATION);
    }
}

pub fn total_propagator_adaptive(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
) -> Result<Truncated, RingError> {
    adaptive(|n| total_propagator(params, theta, alpha, n))
}

pub fn spectral_propagator_adaptive(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
) -> Result<Truncated, RingError> {
    adaptive(|l| spectral_propagator(params, theta, alpha, l))
}

/// Exponentiated least action from `beta` to `alpha`,
/// `exp(i mR² (α - β)² / (2ħ t_c))`, with unit proportionality constant.
pub fn displacement_factor(
    params: &RingParams,
    alpha: AnglePoint,
    beta: AnglePoint,
) -> Result<Amplitude, RingError> {
    params.validate()?;
    let d = alpha.value() - beta.value();
    let phase_coeff = Complex64::new(0.0, 0.5 * params.stiffness()) / params.contour_time();
    finite((phase_coeff * (d * d)).exp())
}

/// Entangled-pair amplitude `Σ_n K_n(θ→α) K_{-n}(θ→β)`: the two particles
/// leave `theta` in opposite winding classes.
pub fn pair_amplitude(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
    beta: AnglePoint,
    n_max: u32,
) -> Result<Truncated, RingError> {
    params.validate_regularized()?;
    if n_max == 0 {
        return Err(RingError::InvalidTruncation);
    }
    let kernel = FreeKernel::new(params);
    let left = displacement(theta, alpha);
    let right = displacement(theta, beta);
    let term = |n: i64| kernel.winding(left, n) * kernel.winding(right, -n);
    let n_max = i64::from(n_max);

    let mut value = term(0);
    for n in 1..=n_max {
        // the ±n pair is commutative, so swapping alpha and beta is exact
        value += term(n) + term(-n);
    }
    let tail_bound = term(n_max).norm().max(term(-n_max).norm());
    finite_sum(Truncated {
        value,
        tail_bound,
        bound: n_max as u32,
    })
}

/// Side-by-side comparison of the pair amplitude with the factorized form
/// `f(α, β) · pair(θ, β, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eq10Report {
    pub lhs: Amplitude,
    pub rhs: Amplitude,
    /// `lhs / rhs`
    pub ratio: Amplitude,
    /// `|ratio| - 1`
    pub modulus_discrepancy: f64,
    /// `arg(ratio)` in `(-π, π]`
    pub phase_discrepancy: f64,
    /// Larger of the two sums' tail bounds.
    pub tail_bound: f64,
}

/// Reports how far the pair amplitude is from factorizing through the
/// least-path displacement factor. Does not assert equality.
pub fn eq10_diagnostic(
    params: &RingParams,
    theta: AnglePoint,
    alpha: AnglePoint,
    beta: AnglePoint,
    n_max: u32,
) -> Result<Eq10Report, RingError> {
    let (t, b, a) = (theta.value(), beta.value(), alpha.value());
    if !(t <= b && b <= a && a < PI) {
        return Err(RingError::Ordering {
            theta: t,
            beta: b,
            alpha: a,
        });
    }
    let lhs = pair_amplitude(params, theta, alpha, beta, n_max)?;
    let coincident = pair_amplitude(params, theta, beta, beta, n_max)?;
    let f = displacement_factor(params, alpha, beta)?;
    let rhs = f * coincident.value;
    let ratio = finite(lhs.value / rhs)?;
    Ok(Eq10Report {
        lhs: lhs.value,
        rhs,
        ratio,
        modulus_discrepancy: ratio.norm() - 1.0,
        phase_discrepancy: ratio.arg(),
        tail_bound: lhs.tail_bound.max(coincident.tail_bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(time: f64, epsilon: f64) -> RingParams {
        RingParams::new(time, epsilon)
    }

    fn a(x: f64) -> AnglePoint {
        AnglePoint::new(x)
    }

    #[test]
    fn canonicalization() {
        assert_eq!(a(-1e-300).value(), 0.0);
        assert_eq!(a(TAU).value(), 0.0);
        assert!((a(-0.5).value() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(a(0.25 + 3.0 * TAU).value(), a(0.25 + 3.0 * TAU).value());
    }

    #[test]
    fn zero_displacement_kernel() {
        let k = winding_propagator(&unit(1.0, 0.0), a(0.0), a(0.0), WindingClass(0)).unwrap();
        let expected = (0.5 / PI).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
        assert!((k - expected).norm() < 1e-15);
        assert!((k.re - 0.28209479177).abs() < 1e-10);
        assert!((k.im + 0.28209479177).abs() < 1e-10);
    }

    #[test]
    fn first_winding_matches_scalar_evaluation() {
        let k = winding_propagator(&unit(1.0, 0.0), a(0.0), a(0.0), WindingClass(1)).unwrap();
        // (1/√(2π)) exp(i((2π)²/2 - π/4))
        let phase = 2.0 * PI * PI - PI / 4.0;
        let r = 1.0 / TAU.sqrt();
        assert!((k.re - r * phase.cos()).abs() < 1e-13);
        assert!((k.im - r * phase.sin()).abs() < 1e-13);
    }

    #[test]
    fn damping_in_winding() {
        let p = unit(1.0, 0.1);
        let k0 = winding_propagator(&p, a(0.0), a(0.0), WindingClass(0)).unwrap();
        let k5 = winding_propagator(&p, a(0.0), a(0.0), WindingClass(5)).unwrap();
        assert!(k5.norm() < k0.norm());
    }

    #[test]
    fn parameter_validation() {
        let mut p = unit(1.0, 0.1);
        p.mass = 0.0;
        assert!(matches!(
            winding_propagator(&p, a(0.0), a(0.0), WindingClass(0)),
            Err(RingError::InvalidParameter { name: "mass", .. })
        ));
        let p = unit(f64::NAN, 0.1);
        assert!(matches!(
            p.validate(),
            Err(RingError::InvalidParameter { name: "time", .. })
        ));
        let p = unit(1.0, -0.1);
        assert!(matches!(
            p.validate(),
            Err(RingError::InvalidParameter {
                name: "epsilon",
                ..
            })
        ));
    }

    #[test]
    fn sums_require_regularization() {
        let p = unit(1.0, 0.0);
        assert_eq!(
            total_propagator(&p, a(0.0), a(1.0), 5),
            Err(RingError::RegularizationRequired)
        );
        assert_eq!(
            pair_amplitude(&p, a(0.0), a(1.0), a(0.5), 5),
            Err(RingError::RegularizationRequired)
        );
        assert_eq!(
            total_propagator(&unit(1.0, 0.1), a(0.0), a(1.0), 0),
            Err(RingError::InvalidTruncation)
        );
    }

    #[test]
    fn winding_and_spectral_agree() {
        let p = unit(1.0, 0.05);
        let w = total_propagator(&p, a(0.0), a(1.0), 20).unwrap();
        let s = spectral_propagator_adaptive(&p, a(0.0), a(1.0)).unwrap();
        assert!(s.tail_bound < TAIL_TOLERANCE);
        assert!((w.value - s.value).norm() < 1e-8);
    }

    #[test]
    fn full_turn_is_invisible() {
        let p = unit(1.0, 0.05);
        let k0 = total_propagator(&p, a(0.0), a(0.0), 20).unwrap();
        let k1 = total_propagator(&p, a(0.0), a(TAU), 20).unwrap();
        assert_eq!(k0, k1);
    }

    #[test]
    fn tail_bound_covers_truncation_error() {
        let p = unit(1.0, 0.2);
        let coarse = total_propagator(&p, a(0.0), a(0.5), 1).unwrap();
        let fine = total_propagator(&p, a(0.0), a(0.5), 40).unwrap();
        assert!((coarse.value - fine.value).norm() < coarse.tail_bound);
    }

    #[test]
    fn spectral_constant_mode() {
        let s = spectral_propagator(&unit(1.0, 0.05), a(0.0), a(1.3), 0).unwrap();
        assert_eq!(s.value, Complex64::new(1.0 / TAU, 0.0));
    }

    #[test]
    fn adaptive_cap_reports_non_convergence() {
        // tiny epsilon at short time: spectral modes decay too slowly for the cap
        let p = unit(1e-6, 1e-9);
        assert!(matches!(
            spectral_propagator_adaptive(&p, a(0.0), a(1.0)),
            Err(RingError::NotConverged {
                cap: MAX_TRUNCATION,
                ..
            })
        ));
    }

    #[test]
    fn displacement_factor_values() {
        let p = unit(1.0, 0.0);
        assert_eq!(
            displacement_factor(&p, a(0.7), a(0.7)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let f = displacement_factor(&p, a(0.9), a(0.4)).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-15);
        assert!((f.re - 0.125f64.cos()).abs() < 1e-15);
        assert!((f.im - 0.125f64.sin()).abs() < 1e-15);
        assert!((f.re - 0.99219).abs() < 1e-5 && (f.im - 0.12467).abs() < 1e-5);
    }

    #[test]
    fn coincident_pair_matches_termwise_sum() {
        let p = unit(1.0, 0.05);
        let theta = a(0.4);
        let pair = pair_amplitude(&p, theta, theta, theta, 10).unwrap();
        let mut expected = Complex64::new(0.0, 0.0);
        for n in -10..=10 {
            let kn = winding_propagator(&p, theta, theta, WindingClass(n)).unwrap();
            let km = winding_propagator(&p, theta, theta, WindingClass(-n)).unwrap();
            assert_eq!(kn, km);
            expected += kn * km;
        }
        assert!((pair.value - expected).norm() < 1e-14);
    }

    #[test]
    fn pair_amplitude_converges_under_doubling() {
        let p = unit(1.0, 0.05);
        let base = pair_amplitude(&p, a(0.0), a(1.0), a(0.5), 30).unwrap();
        let doubled = pair_amplitude(&p, a(0.0), a(1.0), a(0.5), 60).unwrap();
        assert!((base.value - doubled.value).norm() < 1e-10);
    }

    #[test]
    fn eq10_degenerate_case_is_exact() {
        let p = unit(1.0, 0.05);
        let r = eq10_diagnostic(&p, a(0.0), a(0.5), a(0.5), 30).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert_eq!(r.ratio, Complex64::new(1.0, 0.0));
        assert_eq!(r.modulus_discrepancy, 0.0);
        assert_eq!(r.phase_discrepancy, 0.0);
    }

    #[test]
    fn eq10_reports_finite_ratio() {
        let p = unit(1.0, 0.05);
        let r = eq10_diagnostic(&p, a(0.0), a(1.0), a(0.5), 30).unwrap();
        assert!(is_finite(r.ratio));
        assert!(r.tail_bound < 1e-10);
    }

    #[test]
    fn eq10_discrepancy_shrinks_near_degenerate() {
        let p = unit(1.0, 0.05);
        let near = eq10_diagnostic(&p, a(0.0), a(0.31), a(0.3), 30).unwrap();
        let far = eq10_diagnostic(&p, a(0.0), a(1.0), a(0.3), 30).unwrap();
        assert!((near.ratio - 1.0).norm() < (far.ratio - 1.0).norm());
    }

    #[test]
    fn eq10_rejects_bad_ordering() {
        let p = unit(1.0, 0.05);
        for (theta, alpha, beta) in [(0.0, 0.4, 0.5), (0.6, 1.0, 0.5), (0.0, 3.2, 0.5)] {
            assert!(matches!(
                eq10_diagnostic(&p, a(theta), a(alpha), a(beta), 30),
                Err(RingError::Ordering { .. })
            ));
        }
    }

    proptest! {
        #[test]
        fn periodicity(theta in 0.0..TAU, alpha in 0.0..TAU, k in -3i64..=3, j in -3i64..=3) {
            let p = unit(0.8, 0.1);
            let base = total_propagator(&p, a(theta), a(alpha), 12).unwrap();
            let shifted = total_propagator(
                &p,
                a(theta + TAU * j as f64),
                a(alpha + TAU * k as f64),
                12,
            )
            .unwrap();
            prop_assert!((base.value - shifted.value).norm() < 1e-12);
        }

        #[test]
        fn spectral_is_even(delta in 0.0..TAU, time in 0.3..3.0f64, eps in 0.01..0.3f64) {
            let p = unit(time, eps);
            let plus = spectral_propagator(&p, a(0.0), a(delta), 50).unwrap();
            let minus = spectral_propagator(&p, a(delta), a(0.0), 50).unwrap();
            prop_assert_eq!(plus.value, minus.value);
        }

        #[test]
        fn damping_beyond_minimal_winding(delta in -6.0..6.0f64, eps in 0.01..0.5f64) {
            let p = unit(1.0, eps);
            let kernel = FreeKernel::new(&p);
            let n_star = (-delta / TAU).round() as i64;
            let mut last = kernel.winding(delta, n_star).norm();
            for n in n_star + 1..n_star + 8 {
                let m = kernel.winding(delta, n).norm();
                prop_assert!(m <= last);
                last = m;
            }
            let mut last = kernel.winding(delta, n_star).norm();
            for n in (n_star - 8..n_star).rev() {
                let m = kernel.winding(delta, n).norm();
                prop_assert!(m <= last);
                last = m;
            }
        }

        #[test]
        fn pair_symmetric_in_endpoints(theta in 0.0..TAU, alpha in 0.0..TAU, beta in 0.0..TAU) {
            let p = unit(1.0, 0.05);
            let ab = pair_amplitude(&p, a(theta), a(alpha), a(beta), 25).unwrap();
            let ba = pair_amplitude(&p, a(theta), a(beta), a(alpha), 25).unwrap();
            prop_assert_eq!(ab.value, ba.value);
        }
    }
}

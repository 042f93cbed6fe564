//! Numerical laboratory for path-space amplitude computations.
//!
//! * [`ring`]: free particle on a ring, propagator decomposed over winding
//!   classes and checked against its eigenfunction expansion.
//! * [`interferometer`]: two-particle (Rarity–Tapster) interferometer
//!   amplitude algebra and its four-detector joint distribution.
//! * [`spin`]: axis-angle ball model of SO(3), spinor-lift homotopy
//!   classification and y-axis winding projection.
//! * [`bell`]: CHSH estimation, local hidden-variable models and a
//!   reproducible random-path trial engine.

pub mod bell;
pub mod format;
pub mod interferometer;
pub mod ring;
pub mod spin;

pub use num_complex::Complex64;

/// Quantum amplitude. Every public operation returning one guarantees both
/// components are finite.
pub type Amplitude = Complex64;

pub(crate) fn is_finite(z: Amplitude) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

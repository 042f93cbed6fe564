use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::streams::TrialStreams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    /// `+1` for `x >= 0`, so `sign(0) = +1`.
    pub fn sign(x: f64) -> Self {
        if x >= 0.0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// Local hidden-variable model: shared randomness `λ` drawn at the source,
/// and one response per wing that sees only its own setting and `λ`.
///
/// Neither response receives the other wing's setting, so signalling
/// between wings cannot be expressed through this interface.
pub trait LocalModel: Sync {
    type Hidden;

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Hidden;

    fn respond_left(&self, setting: f64, lambda: &Self::Hidden) -> Outcome;

    fn respond_right(&self, setting: f64, lambda: &Self::Hidden) -> Outcome;
}

/// `λ` uniform on `[0, 2π)`; left answers `sign cos(λ - α)`, right answers
/// `-sign cos(λ - β)`.
///
/// Its correlation is `2|α - β|/π - 1` for `|α - β| ≤ π`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SawtoothModel;

impl LocalModel for SawtoothModel {
    type Hidden = f64;

    fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.random::<f64>() * TAU
    }

    fn respond_left(&self, setting: f64, lambda: &f64) -> Outcome {
        Outcome::sign((lambda - setting).cos())
    }

    fn respond_right(&self, setting: f64, lambda: &f64) -> Outcome {
        Outcome::sign((lambda - setting).cos()).flipped()
    }
}

/// Ignores `λ` and the settings; both wings always answer `+1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantModel;

impl LocalModel for ConstantModel {
    type Hidden = ();

    fn sample_lambda<R: Rng + ?Sized>(&self, _rng: &mut R) {}

    fn respond_left(&self, _setting: f64, _lambda: &()) -> Outcome {
        Outcome::Plus
    }

    fn respond_right(&self, _setting: f64, _lambda: &()) -> Outcome {
        Outcome::Plus
    }
}

/// Correlation estimate with its binary-outcome standard error
/// `sqrt((1 - E²)/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    pub(crate) fn from_sum(sum: i64, trials: u64) -> Self {
        let value = sum as f64 / trials as f64;
        Self {
            value,
            standard_error: ((1.0 - value * value).max(0.0) / trials as f64).sqrt(),
        }
    }
}

/// Monte Carlo estimate of `E(α, β)`; trial `i` uses stream `i` of `streams`.
pub fn estimate_correlation<M: LocalModel>(
    model: &M,
    alpha: f64,
    beta: f64,
    trials: u64,
    streams: &TrialStreams,
) -> Estimate {
    let sum: i64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.rng(i);
            let lambda = model.sample_lambda(&mut rng);
            let left = model.respond_left(alpha, &lambda).value();
            let right = model.respond_right(beta, &lambda).value();
            i64::from(left * right)
        })
        .sum();
    Estimate::from_sum(sum, trials)
}

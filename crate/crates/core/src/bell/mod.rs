//! CHSH experiments: exact quantum correlations, Monte Carlo estimates for
//! local hidden-variable models, and the random-path trial engine.
//!
//! All stochastic outputs are bit-identical for a fixed master seed and
//! independent of the rayon thread count.

mod model;
mod rpp;
mod streams;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;
use thiserror::Error;

pub use model::{
    estimate_correlation, ConstantModel, Estimate, LocalModel, Outcome, SawtoothModel,
};
pub use rpp::{rpp_counts, run_rpp_trials, write_trial_log, LinkedPaths, RppCounts, TrialRecord};
pub use streams::{SeedToken, TrialStreams};

use crate::interferometer::{self, InterferometerConfig};

/// Stream label base for local-model CHSH runs; setting pair `k` uses
/// `LOCAL_LABEL + k`.
const LOCAL_LABEL: u64 = 0x6c6f_6300;
/// Stream label base for sampled quantum CHSH runs.
const QUANTUM_LABEL: u64 = 0x7175_6100;
/// Stream label base for correlation scans; grid point `k` uses `+ k`.
const SCAN_LABEL: u64 = 0x7363_0000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("the trial engine needs a balanced interferometer (r1 = r2)")]
    Unbalanced,
    #[error("correlation grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Interferometer(#[from] interferometer::InterferometerError),
}

/// Two settings per wing, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// `(0, π/2, π/4, 3π/4)`, maximal for `E = cos(α - β)`.
    pub const OPTIMAL: ChshSettings = ChshSettings {
        a: 0.0,
        a_prime: FRAC_PI_2,
        b: FRAC_PI_4,
        b_prime: 3.0 * FRAC_PI_4,
    };

    /// `(a, b), (a, b'), (a', b), (a', b')`
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            a: self.a + delta,
            a_prime: self.a_prime + delta,
            b: self.b + delta,
            b_prime: self.b_prime + delta,
        }
    }
}

impl Default for ChshSettings {
    fn default() -> Self {
        Self::OPTIMAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshResult {
    /// `|E(a,b) - E(a,b') + E(a',b) + E(a',b')|`
    pub s: f64,
    /// In [`ChshSettings::pairs`] order.
    pub correlations: [f64; 4],
    /// Per-correlation standard errors; zero for exact results.
    pub correlation_errors: [f64; 4],
    /// `None` for exact results.
    pub trials_per_pair: Option<u64>,
    /// Standard error of `s`, the per-pair errors added in quadrature.
    pub standard_error: f64,
}

impl ChshResult {
    fn from_estimates(estimates: [Estimate; 4], trials: Option<u64>) -> Self {
        let e = estimates.map(|x| x.value);
        let se = estimates.map(|x| x.standard_error);
        Self {
            s: (e[0] - e[1] + e[2] + e[3]).abs(),
            correlations: e,
            correlation_errors: se,
            trials_per_pair: trials,
            standard_error: se.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

/// `cos(α - β)` from the balanced interferometer's joint distribution.
pub fn correlation_exact(alpha: f64, beta: f64) -> Result<f64, BellError> {
    let config = InterferometerConfig::balanced(alpha, beta)?;
    Ok(interferometer::correlation(&config)?)
}

pub fn chsh_exact(settings: &ChshSettings) -> Result<ChshResult, BellError> {
    let mut estimates = [Estimate {
        value: 0.0,
        standard_error: 0.0,
    }; 4];
    for (slot, (alpha, beta)) in estimates.iter_mut().zip(settings.pairs()) {
        slot.value = correlation_exact(alpha, beta)?;
    }
    Ok(ChshResult::from_estimates(estimates, None))
}

/// CHSH value of a local model, `trials` fresh hidden states per setting
/// pair.
pub fn run_local_model<M: LocalModel>(
    model: &M,
    settings: &ChshSettings,
    trials: u64,
    master_seed: u64,
) -> Result<ChshResult, BellError> {
    if trials == 0 {
        return Err(BellError::NoTrials);
    }
    let mut k = 0;
    let estimates = settings.pairs().map(|(alpha, beta)| {
        let streams = TrialStreams::new(master_seed, LOCAL_LABEL + k);
        k += 1;
        estimate_correlation(model, alpha, beta, trials, &streams)
    });
    Ok(ChshResult::from_estimates(estimates, Some(trials)))
}

/// CHSH value estimated by running the trial engine at each setting pair.
pub fn chsh_sampled(
    settings: &ChshSettings,
    trials: u64,
    master_seed: u64,
) -> Result<ChshResult, BellError> {
    if trials == 0 {
        return Err(BellError::NoTrials);
    }
    let mut estimates = Vec::with_capacity(4);
    for (k, (alpha, beta)) in (0u64..).zip(settings.pairs()) {
        let config = InterferometerConfig::balanced(alpha, beta)?;
        let streams = TrialStreams::new(master_seed, QUANTUM_LABEL + k);
        let counts = rpp::rpp_counts_with(&config, trials, &streams)?;
        let [uu, ud, du, dd] = counts.outcomes.map(|c| c as i64);
        estimates.push(Estimate::from_sum(uu + dd - ud - du, trials));
    }
    let estimates: [Estimate; 4] = estimates.try_into().expect("four setting pairs");
    Ok(ChshResult::from_estimates(estimates, Some(trials)))
}

/// Where the correlation values of a scan come from.
#[derive(Debug, Clone, Copy)]
pub enum ScanSource<'a, M> {
    Exact,
    Model(&'a M),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    /// `α - β`
    pub delta: f64,
    pub correlation: f64,
    /// `None` in exact mode.
    pub standard_error: Option<f64>,
}

/// Correlation curve at fixed `alpha` over the `betas` grid.
pub fn scan_correlation<M: LocalModel>(
    source: ScanSource<'_, M>,
    alpha: f64,
    betas: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<ScanRow>, BellError> {
    if betas.is_empty() {
        return Err(BellError::EmptyGrid);
    }
    if matches!(source, ScanSource::Model(_)) && trials == 0 {
        return Err(BellError::NoTrials);
    }
    (0u64..)
        .zip(betas)
        .map(|(k, &beta)| {
            let delta = alpha - beta;
            match source {
                ScanSource::Exact => Ok(ScanRow {
                    delta,
                    correlation: correlation_exact(alpha, beta)?,
                    standard_error: None,
                }),
                ScanSource::Model(model) => {
                    let streams = TrialStreams::new(master_seed, SCAN_LABEL + k);
                    let e = estimate_correlation(model, alpha, beta, trials, &streams);
                    Ok(ScanRow {
                        delta,
                        correlation: e.value,
                        standard_error: Some(e.standard_error),
                    })
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Closed-form sawtooth correlation, valid for any `α - β`.
    fn sawtooth_closed_form(delta: f64) -> f64 {
        let d = (delta + PI).rem_euclid(2.0 * PI) - PI;
        2.0 * d.abs() / PI - 1.0
    }

    #[test]
    fn exact_correlations() {
        assert!((correlation_exact(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation_exact(0.0, PI).unwrap() + 1.0).abs() < 1e-15);
        assert!((correlation_exact(0.0, PI / 3.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_chsh() {
        let r = chsh_exact(&ChshSettings::OPTIMAL).unwrap();
        assert!((r.s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((r.s - 2.8284271).abs() < 1e-7);
        assert_eq!(r.trials_per_pair, None);
        assert_eq!(r.standard_error, 0.0);
        let zero = ChshSettings {
            a: 0.0,
            a_prime: 0.0,
            b: 0.0,
            b_prime: 0.0,
        };
        assert!((chsh_exact(&zero).unwrap().s - 2.0).abs() < 1e-15);
        let shifted = chsh_exact(&ChshSettings::OPTIMAL.shifted(0.77)).unwrap();
        assert!((shifted.s - r.s).abs() < 1e-12);
    }

    #[test]
    fn constant_model_chsh() {
        let r = run_local_model(&ConstantModel, &ChshSettings::OPTIMAL, 1000, 5).unwrap();
        assert_eq!(r.correlations, [1.0; 4]);
        assert_eq!(r.s, 2.0);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn sawtooth_model_chsh() {
        let r = run_local_model(&SawtoothModel, &ChshSettings::OPTIMAL, 200_000, 1).unwrap();
        for ((alpha, beta), (e, se)) in ChshSettings::OPTIMAL
            .pairs()
            .into_iter()
            .zip(r.correlations.into_iter().zip(r.correlation_errors))
        {
            assert!((e - sawtooth_closed_form(alpha - beta)).abs() < 4.0 * se);
        }
        assert!((r.s - 2.0).abs() < 3.0 * r.standard_error);
        assert!(r.s <= 2.0 + 4.0 * r.standard_error);
    }

    #[test]
    fn local_runs_are_reproducible() {
        let a = run_local_model(&SawtoothModel, &ChshSettings::OPTIMAL, 10_000, 77).unwrap();
        let b = run_local_model(&SawtoothModel, &ChshSettings::OPTIMAL, 10_000, 77).unwrap();
        assert_eq!(a, b);
        let c = run_local_model(&SawtoothModel, &ChshSettings::OPTIMAL, 10_000, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(
            run_local_model(&SawtoothModel, &ChshSettings::OPTIMAL, 0, 0),
            Err(BellError::NoTrials)
        ));
        assert!(matches!(
            chsh_sampled(&ChshSettings::OPTIMAL, 0, 0),
            Err(BellError::NoTrials)
        ));
    }

    #[test]
    fn exact_scan() {
        let rows =
            scan_correlation::<SawtoothModel>(ScanSource::Exact, 0.0, &[0.0, PI / 2.0, PI], 0, 0)
                .unwrap();
        let e: Vec<f64> = rows.iter().map(|r| r.correlation).collect();
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15 && (e[2] + 1.0).abs() < 1e-15);
        assert!(rows.iter().all(|r| r.standard_error.is_none()));
        assert!(matches!(
            scan_correlation::<SawtoothModel>(ScanSource::Exact, 0.0, &[], 0, 0),
            Err(BellError::EmptyGrid)
        ));
    }

    #[test]
    fn sawtooth_scan_shows_the_gap() {
        let betas = [PI / 4.0, PI / 2.0];
        let rows =
            scan_correlation(ScanSource::Model(&SawtoothModel), 0.0, &betas, 100_000, 3).unwrap();
        let se = rows[1].standard_error.unwrap();
        assert!(rows[1].correlation.abs() < 3.0 * se.max(1.0 / 100_000f64.sqrt()));
        let se = rows[0].standard_error.unwrap();
        assert!((rows[0].correlation + 0.5).abs() < 3.0 * se);
        let exact =
            scan_correlation::<SawtoothModel>(ScanSource::Exact, 0.0, &betas, 0, 0).unwrap();
        assert!((exact[0].correlation - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sampled_quantum_chsh() {
        let r = chsh_sampled(&ChshSettings::OPTIMAL, 100_000, 2).unwrap();
        assert!((r.s - 2.0 * 2f64.sqrt()).abs() < 3.0 * r.standard_error);
    }
}

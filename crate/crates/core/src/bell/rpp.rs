//! Random-path trial engine for the two-particle interferometer.
//!
//! Each trial picks one of the two linked path pairs, `(a, a')` or
//! `(b, b')`, with probability 1/2, then draws the detector outcome from
//! the four-outcome joint distribution. Both path classes are always
//! populated, so the outcome law does not depend on which pair was taken.

use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::streams::{SeedToken, TrialStreams};
use super::BellError;
use crate::interferometer::{
    joint_distribution, DetectorOutcome, InterferometerConfig, JointDistribution,
};

/// Stream label of the trial engine, distinct from the local-model labels.
pub(crate) const RPP_LABEL: u64 = 0x7270_7000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LinkedPaths {
    /// Upper particle on `a`, lower on `a'`.
    AAPrime,
    /// Upper particle on `b'`, lower on `b`.
    BBPrime,
}

impl fmt::Display for LinkedPaths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkedPaths::AAPrime => "aa'",
            LinkedPaths::BBPrime => "bb'",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    pub chosen_path: LinkedPaths,
    pub outcome: DetectorOutcome,
    pub token: SeedToken,
}

/// Inverse-CDF draw; `u` in `[0, 1)`. Outcomes with zero probability are
/// never returned.
fn draw_outcome(dist: &JointDistribution, u: f64) -> DetectorOutcome {
    let mut cumulative = 0.0;
    let mut last_possible = DetectorOutcome::UU;
    for outcome in DetectorOutcome::ALL {
        let p = dist.get(outcome);
        if p > 0.0 {
            cumulative += p;
            last_possible = outcome;
            if u < cumulative {
                return outcome;
            }
        }
    }
    last_possible
}

fn trial(
    dist: &JointDistribution,
    streams: &TrialStreams,
    index: u64,
) -> (LinkedPaths, DetectorOutcome) {
    let mut rng = streams.rng(index);
    let path = if rng.random_bool(0.5) {
        LinkedPaths::AAPrime
    } else {
        LinkedPaths::BBPrime
    };
    (path, draw_outcome(dist, rng.random::<f64>()))
}

fn balanced_distribution(config: &InterferometerConfig) -> Result<JointDistribution, BellError> {
    if !config.is_balanced() {
        return Err(BellError::Unbalanced);
    }
    Ok(joint_distribution(config))
}

fn empirical(counts: [u64; 4], trials: u64) -> JointDistribution {
    JointDistribution {
        probabilities: counts.map(|c| c as f64 / trials as f64),
        balanced: true,
    }
}

/// Runs `trials` independent trials; returns the empirical distribution and
/// the full log in trial order.
pub fn run_rpp_trials(
    config: &InterferometerConfig,
    trials: u64,
    master_seed: u64,
) -> Result<(JointDistribution, Vec<TrialRecord>), BellError> {
    if trials == 0 {
        return Err(BellError::NoTrials);
    }
    let dist = balanced_distribution(config)?;
    let streams = TrialStreams::new(master_seed, RPP_LABEL);
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let (chosen_path, outcome) = trial(&dist, &streams, index);
            TrialRecord {
                index,
                chosen_path,
                outcome,
                token: streams.token(index),
            }
        })
        .collect();
    let mut counts = [0u64; 4];
    for r in &records {
        counts[r.outcome.index()] += 1;
    }
    Ok((empirical(counts, trials), records))
}

/// Outcome and path-choice counts without keeping the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RppCounts {
    pub outcomes: [u64; 4],
    pub a_pairs: u64,
    pub trials: u64,
}

impl RppCounts {
    pub fn distribution(&self) -> JointDistribution {
        empirical(self.outcomes, self.trials)
    }

    fn merge(mut self, other: RppCounts) -> RppCounts {
        for (a, b) in self.outcomes.iter_mut().zip(other.outcomes) {
            *a += b;
        }
        self.a_pairs += other.a_pairs;
        self.trials += other.trials;
        self
    }
}

pub(crate) fn rpp_counts_with(
    config: &InterferometerConfig,
    trials: u64,
    streams: &TrialStreams,
) -> Result<RppCounts, BellError> {
    if trials == 0 {
        return Err(BellError::NoTrials);
    }
    let dist = balanced_distribution(config)?;
    let empty = RppCounts {
        outcomes: [0; 4],
        a_pairs: 0,
        trials: 0,
    };
    Ok((0..trials)
        .into_par_iter()
        .map(|index| {
            let (path, outcome) = trial(&dist, streams, index);
            let mut c = empty;
            c.outcomes[outcome.index()] = 1;
            c.a_pairs = u64::from(path == LinkedPaths::AAPrime);
            c.trials = 1;
            c
        })
        .reduce(|| empty, RppCounts::merge))
}

/// Same trials as [`run_rpp_trials`] with the same seed, counted only.
pub fn rpp_counts(
    config: &InterferometerConfig,
    trials: u64,
    master_seed: u64,
) -> Result<RppCounts, BellError> {
    rpp_counts_with(config, trials, &TrialStreams::new(master_seed, RPP_LABEL))
}

/// Delimited log, one record per line after a header.
pub fn write_trial_log<W: Write>(records: &[TrialRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "index,path,outcome,token")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.index, r.chosen_path, r.outcome, r.token
        )?;
    }
    Ok(())
}

//! Two-particle momentum-entanglement interferometer.
//!
//! Each homotopy class collapses to a single representative path: `a` and
//! `b` reach the left beamsplitter, `a'` and `b'` the right one. The upper
//! paths `a`, `b'` carry magnitude `r1`, base phase `θ` and the phase
//! shifters `α`, `β`; the lower paths `b`, `a'` carry `r2` and `θ'`.
//! Reflection at a 50:50 beamsplitter contributes a factor `i`,
//! transmission a factor `1`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::Amplitude;

/// Relative tolerance within which `r1` and `r2` count as equal.
const BALANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterferometerError {
    #[error("path magnitude `{name}` must be finite and > 0, got {value}")]
    InvalidMagnitude { name: &'static str, value: f64 },
    #[error("phase `{name}` must be finite, got {value}")]
    InvalidPhase { name: &'static str, value: f64 },
    #[error("path {path} does not reach detector {detector}")]
    SideMismatch { path: PathLabel, detector: Detector },
    #[error("the cosine law needs r1 = r2 (got r1={r1}, r2={r2})")]
    Unbalanced { r1: f64, r2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometerConfig {
    pub alpha: f64,
    pub beta: f64,
    pub r1: f64,
    pub r2: f64,
    pub theta_u: f64,
    pub theta_l: f64,
    balanced: bool,
}

impl InterferometerConfig {
    pub fn new(
        alpha: f64,
        beta: f64,
        r1: f64,
        r2: f64,
        theta_u: f64,
        theta_l: f64,
    ) -> Result<Self, InterferometerError> {
        for (name, value) in [("r1", r1), ("r2", r2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(InterferometerError::InvalidMagnitude { name, value });
            }
        }
        for (name, value) in [
            ("alpha", alpha),
            ("beta", beta),
            ("theta_u", theta_u),
            ("theta_l", theta_l),
        ] {
            if !value.is_finite() {
                return Err(InterferometerError::InvalidPhase { name, value });
            }
        }
        let balanced = (r1 - r2).abs() <= BALANCE_TOLERANCE * r1.max(r2);
        Ok(Self {
            alpha,
            beta,
            r1,
            r2,
            theta_u,
            theta_l,
            balanced,
        })
    }

    /// Unit magnitudes and zero base phases.
    pub fn balanced(alpha: f64, beta: f64) -> Result<Self, InterferometerError> {
        Self::new(alpha, beta, 1.0, 1.0, 0.0, 0.0)
    }

    /// Whether `r1 = r2`, the condition for the exact cosine law.
    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    fn upper(&self, shifter: f64) -> Complex64 {
        Complex64::from_polar(self.r1, self.theta_u) * Complex64::from_polar(1.0, shifter)
    }

    fn lower(&self) -> Complex64 {
        Complex64::from_polar(self.r2, self.theta_l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PathLabel {
    A,
    APrime,
    B,
    BPrime,
}

impl PathLabel {
    pub const ALL: [PathLabel; 4] = [
        PathLabel::A,
        PathLabel::APrime,
        PathLabel::B,
        PathLabel::BPrime,
    ];

    pub fn side(self) -> Side {
        match self {
            PathLabel::A | PathLabel::B => Side::Left,
            PathLabel::APrime | PathLabel::BPrime => Side::Right,
        }
    }
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathLabel::A => "a",
            PathLabel::APrime => "a'",
            PathLabel::B => "b",
            PathLabel::BPrime => "b'",
        })
    }
}

/// Upper or lower output port of a beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Port {
    Up,
    Down,
}

/// One of the four detectors `u`, `d` (left) and `u'`, `d'` (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Detector {
    pub side: Side,
    pub port: Port,
}

impl Detector {
    pub const U: Detector = Detector {
        side: Side::Left,
        port: Port::Up,
    };
    pub const D: Detector = Detector {
        side: Side::Left,
        port: Port::Down,
    };
    pub const U_PRIME: Detector = Detector {
        side: Side::Right,
        port: Port::Up,
    };
    pub const D_PRIME: Detector = Detector {
        side: Side::Right,
        port: Port::Down,
    };
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let port = match self.port {
            Port::Up => "u",
            Port::Down => "d",
        };
        match self.side {
            Side::Left => f.write_str(port),
            Side::Right => write!(f, "{port}'"),
        }
    }
}

/// Joint detection event: left port crossed with right port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DetectorOutcome {
    UU,
    UD,
    DU,
    DD,
}

impl DetectorOutcome {
    pub const ALL: [DetectorOutcome; 4] = [
        DetectorOutcome::UU,
        DetectorOutcome::UD,
        DetectorOutcome::DU,
        DetectorOutcome::DD,
    ];

    pub fn ports(self) -> (Port, Port) {
        match self {
            DetectorOutcome::UU => (Port::Up, Port::Up),
            DetectorOutcome::UD => (Port::Up, Port::Down),
            DetectorOutcome::DU => (Port::Down, Port::Up),
            DetectorOutcome::DD => (Port::Down, Port::Down),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// `+1` when both sides fire the same port, `-1` otherwise.
    pub fn parity(self) -> i8 {
        match self {
            DetectorOutcome::UU | DetectorOutcome::DD => 1,
            DetectorOutcome::UD | DetectorOutcome::DU => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorOutcome::UU => "UU",
            DetectorOutcome::UD => "UD",
            DetectorOutcome::DU => "DU",
            DetectorOutcome::DD => "DD",
        }
    }
}

impl fmt::Display for DetectorOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Probability per [`DetectorOutcome`], indexed by [`DetectorOutcome::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    pub probabilities: [f64; 4],
    /// False for `r1 ≠ r2`, where the cosine law is not guaranteed.
    pub balanced: bool,
}

impl JointDistribution {
    pub fn get(&self, outcome: DetectorOutcome) -> f64 {
        self.probabilities[outcome.index()]
    }

    /// `P(UU) + P(DD)`
    pub fn coincidence(&self) -> f64 {
        self.get(DetectorOutcome::UU) + self.get(DetectorOutcome::DD)
    }

    /// `P(same) - P(different)`
    pub fn expectation(&self) -> f64 {
        DetectorOutcome::ALL
            .iter()
            .map(|&o| f64::from(o.parity()) * self.get(o))
            .sum()
    }
}

fn splitter(port: Port, reflected_to: Port) -> Complex64 {
    if port == reflected_to {
        Complex64::i()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// `⟨detector|path⟩`.
///
/// Upper paths reflect into the upper port, lower paths into the lower port.
pub fn path_amplitude(
    config: &InterferometerConfig,
    path: PathLabel,
    detector: Detector,
) -> Result<Amplitude, InterferometerError> {
    if path.side() != detector.side {
        return Err(InterferometerError::SideMismatch { path, detector });
    }
    Ok(amplitude(config, path, detector.port))
}

fn amplitude(config: &InterferometerConfig, path: PathLabel, port: Port) -> Complex64 {
    match path {
        PathLabel::A => config.upper(config.alpha) * splitter(port, Port::Up),
        PathLabel::BPrime => config.upper(config.beta) * splitter(port, Port::Up),
        PathLabel::B | PathLabel::APrime => config.lower() * splitter(port, Port::Down),
    }
}

/// Linked-path sum `⟨x|a⟩⟨y'|a'⟩ + ⟨x|b⟩⟨y'|b'⟩` for outcome `(x, y)`.
pub fn joint_amplitude(config: &InterferometerConfig, outcome: DetectorOutcome) -> Amplitude {
    let (left, right) = outcome.ports();
    amplitude(config, PathLabel::A, left) * amplitude(config, PathLabel::APrime, right)
        + amplitude(config, PathLabel::B, left) * amplitude(config, PathLabel::BPrime, right)
}

/// Side-local form `⟨x|a⟩⟨y|b⟩ + ⟨x'|a'⟩⟨y'|b'⟩`, obtained from the linked
/// sum through the mirror symmetry `⟨y'|a'⟩ = ⟨y|b⟩`.
pub fn factored_amplitude(config: &InterferometerConfig, outcome: DetectorOutcome) -> Amplitude {
    let (left, right) = outcome.ports();
    let left_side = amplitude(config, PathLabel::A, left) * amplitude(config, PathLabel::B, right);
    let right_side =
        amplitude(config, PathLabel::APrime, left) * amplitude(config, PathLabel::BPrime, right);
    left_side + right_side
}

/// `|joint_amplitude|²` normalized over the four outcomes.
pub fn joint_distribution(config: &InterferometerConfig) -> JointDistribution {
    let weights = DetectorOutcome::ALL.map(|o| joint_amplitude(config, o).norm_sqr());
    let total: f64 = weights.iter().sum();
    JointDistribution {
        probabilities: weights.map(|w| w / total),
        balanced: config.is_balanced(),
    }
}

/// `P(same) - P(different)`, equal to `cos(α - β)` for balanced configs.
pub fn correlation(config: &InterferometerConfig) -> Result<f64, InterferometerError> {
    if !config.is_balanced() {
        return Err(InterferometerError::Unbalanced {
            r1: config.r1,
            r2: config.r2,
        });
    }
    Ok(joint_distribution(config).expectation())
}

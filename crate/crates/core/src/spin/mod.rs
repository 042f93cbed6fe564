//! Rotational paths in the axis-angle ball model of SO(3).
//!
//! A rotation by `γ ∈ [0, π]` about the unit axis `n` is the ball point at
//! distance `γ` along `n`; antipodal surface points `(n, π)` and `(-n, π)`
//! are the same rotation. Homotopy classes of closed paths are read off the
//! unit-quaternion double cover ([`lift_to_spinor`]). Paths confined to the
//! y-axis diameter additionally carry an integer winding
//! ([`project_to_axis_winding`]) used to reduce spin pairs to the ring sum.

mod axis;
mod io;
mod lift;

use std::f64::consts::{PI, TAU};

use serde::Serialize;
use thiserror::Error;

pub use axis::{project_to_axis_winding, spin_pair_diagnostic, AxisWinding, SpinPairReport};
pub use io::{parse_path, read_path_file, write_path};
pub use lift::{classify_homotopy, lift_to_spinor, HomotopyClass, SpinorSign};

use crate::ring::RingError;

/// Tolerance for unit axes and for comparing rotations.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

/// Largest rotation distance between consecutive samples that the lift and
/// the axis unwrapping accept.
pub const MAX_LIFT_STEP: f64 = PI / 2.0;

/// Continuity tolerance used when none is given.
pub const DEFAULT_CONTINUITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("rotation axis must be finite and non-zero, got {0:?}")]
    InvalidAxis([f64; 3]),
    #[error("rotation angle must be finite, got {0}")]
    InvalidAngle(f64),
    #[error("a rotation path needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("continuity tolerance must be finite and > 0, got {0}")]
    InvalidTolerance(f64),
    #[error("samples {index} and {} are {distance:.6} apart, above the continuity tolerance {tolerance}", .index + 1)]
    Discontinuous {
        index: usize,
        distance: f64,
        tolerance: f64,
    },
    #[error("step {index} spans {distance:.6} rad (limit {limit:.6}); densify the path")]
    Resolution {
        index: usize,
        distance: f64,
        limit: f64,
    },
    #[error("path is not closed: endpoints are {0:.3e} rad apart")]
    NotClosed(f64),
    #[error("sample {index} has axis {axis:?}, off the y-axis")]
    OffAxis { index: usize, axis: [f64; 3] },
    #[error("paths do not join: {0:.3e} rad between end and start")]
    Disjoint(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Unit quaternion `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quat([f64; 4]);

impl Quat {
    pub(crate) fn dot(self, other: Quat) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn neg(self) -> Quat {
        Quat(self.0.map(|c| -c))
    }

    #[cfg(test)]
    pub(crate) fn mul(self, o: Quat) -> Quat {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Quat([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }

    pub(crate) fn normalized(self) -> Quat {
        let n = self.dot(self).sqrt();
        Quat(self.0.map(|c| c / n))
    }

    /// Rotation represented by `±self`.
    pub(crate) fn to_ball(self) -> BallPoint {
        let [w, x, y, z] = self.normalized().0;
        let v = (x * x + y * y + z * z).sqrt();
        let angle = 2.0 * v.atan2(w);
        if v == 0.0 {
            return BallPoint::identity();
        }
        BallPoint::new([x / v, y / v, z / v], angle).expect("non-zero axis")
    }
}

/// Rotation distance `2 acos |⟨q, q'⟩|`, the geodesic metric on SO(3),
/// evaluated through `atan2` so nearby rotations keep full precision.
pub(crate) fn quat_distance(p: Quat, q: Quat) -> f64 {
    let q = if p.dot(q) < 0.0 { q.neg() } else { q };
    let norm = |f: &dyn Fn(usize) -> f64| (0..4).map(|i| f(i) * f(i)).sum::<f64>().sqrt();
    let diff = norm(&|i| p.0[i] - q.0[i]);
    let sum = norm(&|i| p.0[i] + q.0[i]);
    4.0 * diff.atan2(sum)
}

/// A rotation in the ball model: axis and angle in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallPoint {
    axis: [f64; 3],
    angle: f64,
}

impl BallPoint {
    /// Normalizes `axis` and reduces `angle` into `[0, π]`, flipping the axis
    /// where needed. At `angle = π` the axis is moved to the hemisphere whose
    /// first non-zero component is positive.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self, SpinError> {
        if !angle.is_finite() {
            return Err(SpinError::InvalidAngle(angle));
        }
        let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SpinError::InvalidAxis(axis));
        }
        let mut axis = axis.map(|c| c / norm);
        let mut angle = angle.rem_euclid(TAU);
        if angle >= TAU {
            angle = 0.0;
        }
        if angle > PI {
            angle = TAU - angle;
            axis = axis.map(|c| -c);
        }
        if angle == PI {
            let leading = axis
                .iter()
                .copied()
                .find(|c| c.abs() > GEOMETRY_TOLERANCE)
                .unwrap_or(1.0);
            if leading < 0.0 {
                axis = axis.map(|c| -c);
            }
        }
        // drop negative zeros so equal rotations compare equal
        let axis = axis.map(|c| c + 0.0);
        Ok(Self { axis, angle })
    }

    pub fn identity() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        }
    }

    /// Rotation by `angle` (any real) about the y-axis.
    pub fn about_y(angle: f64) -> Result<Self, SpinError> {
        Self::new([0.0, 1.0, 0.0], angle)
    }

    /// Ball point from its position vector `angle * axis`.
    pub fn from_rotation_vector(v: [f64; 3]) -> Result<Self, SpinError> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(Self::identity());
        }
        Self::new(v, norm)
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn rotation_vector(&self) -> [f64; 3] {
        self.axis.map(|c| c * self.angle)
    }

    /// Lift with non-negative scalar part; at `angle = π` the canonical axis
    /// fixes the sign.
    pub(crate) fn quat(&self) -> Quat {
        let (s, c) = (0.5 * self.angle).sin_cos();
        Quat([c, s * self.axis[0], s * self.axis[1], s * self.axis[2]])
    }

    /// Geodesic distance between the rotations.
    pub fn distance(&self, other: &BallPoint) -> f64 {
        quat_distance(self.quat(), other.quat())
    }
}

/// Ordered samples of a continuous rotational path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationPath {
    samples: Vec<BallPoint>,
    tolerance: f64,
}

impl RotationPath {
    /// Consecutive samples must lie within `tolerance` (rotation distance).
    pub fn new(samples: Vec<BallPoint>, tolerance: f64) -> Result<Self, SpinError> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(SpinError::InvalidTolerance(tolerance));
        }
        if samples.len() < 2 {
            return Err(SpinError::TooShort(samples.len()));
        }
        for (index, pair) in samples.windows(2).enumerate() {
            let distance = pair[0].distance(&pair[1]);
            if distance > tolerance {
                return Err(SpinError::Discontinuous {
                    index,
                    distance,
                    tolerance,
                });
            }
        }
        Ok(Self { samples, tolerance })
    }

    /// `samples` evenly spaced rotations about `axis` from `from` to `to`
    /// radians, endpoints included.
    pub fn about_axis(
        axis: [f64; 3],
        from: f64,
        to: f64,
        samples: usize,
    ) -> Result<Self, SpinError> {
        if samples < 2 {
            return Err(SpinError::TooShort(samples));
        }
        let last = (samples - 1) as f64;
        let points = (0..samples)
            .map(|k| BallPoint::new(axis, from + (to - from) * (k as f64 / last)))
            .collect::<Result<Vec<_>, _>>()?;
        let step = (to - from).abs() / last;
        Self::new(points, DEFAULT_CONTINUITY.max(step * (1.0 + 1e-9)))
    }

    /// Path through the given unwrapped y-axis angles, each segment split so
    /// no step exceeds `max_step`.
    pub fn along_y(waypoints: &[f64], max_step: f64) -> Result<Self, SpinError> {
        if waypoints.len() < 2 {
            return Err(SpinError::TooShort(waypoints.len()));
        }
        let mut points = vec![BallPoint::about_y(waypoints[0])?];
        for pair in waypoints.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            let steps = ((to - from).abs() / max_step).ceil().max(1.0) as usize;
            for k in 1..=steps {
                points.push(BallPoint::about_y(
                    from + (to - from) * (k as f64 / steps as f64),
                )?);
            }
        }
        Self::new(points, DEFAULT_CONTINUITY.max(max_step * (1.0 + 1e-9)))
    }

    pub fn samples(&self) -> &[BallPoint] {
        &self.samples
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn first(&self) -> &BallPoint {
        &self.samples[0]
    }

    pub fn last(&self) -> &BallPoint {
        self.samples.last().expect("length >= 2")
    }

    pub fn is_closed(&self) -> bool {
        self.first().distance(self.last()) < GEOMETRY_TOLERANCE
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            samples,
            tolerance: self.tolerance,
        }
    }

    /// `self` followed by `next`; `next` must start at the rotation where
    /// `self` ends. The duplicated junction sample is dropped.
    pub fn concat(&self, next: &RotationPath) -> Result<Self, SpinError> {
        let gap = self.last().distance(next.first());
        if gap >= GEOMETRY_TOLERANCE {
            return Err(SpinError::Disjoint(gap));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&next.samples[1..]);
        Ok(Self {
            samples,
            tolerance: self.tolerance.max(next.tolerance),
        })
    }

    /// Inserts the geodesic midpoint between every pair of samples.
    pub fn densified(&self) -> Self {
        let mut samples = Vec::with_capacity(2 * self.samples.len() - 1);
        samples.push(self.samples[0]);
        for pair in self.samples.windows(2) {
            let (p, mut q) = (pair[0].quat(), pair[1].quat());
            if p.dot(q) < 0.0 {
                q = q.neg();
            }
            let mid = Quat([0, 1, 2, 3].map(|i| p.0[i] + q.0[i]));
            samples.push(mid.to_ball());
            samples.push(pair[1]);
        }
        Self {
            samples,
            tolerance: self.tolerance,
        }
    }
}

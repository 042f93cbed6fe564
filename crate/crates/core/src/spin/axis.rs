use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{BallPoint, RotationPath, SpinError, GEOMETRY_TOLERANCE, MAX_LIFT_STEP};
use crate::ring::{self, AnglePoint, Eq10Report, RingError, RingParams};

/// Net signed number of passages of a y-axis path past a reference angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AxisWinding(pub i64);

/// Signed y-axis angle in `(-π, π]`; the sign comes from the axis direction.
fn signed_y_angle(index: usize, p: &BallPoint) -> Result<f64, SpinError> {
    if p.angle() < GEOMETRY_TOLERANCE {
        return Ok(0.0);
    }
    let [x, y, z] = p.axis();
    if x.abs() > GEOMETRY_TOLERANCE || z.abs() > GEOMETRY_TOLERANCE {
        return Err(SpinError::OffAxis {
            index,
            axis: p.axis(),
        });
    }
    // canonical (±ŷ, π) is always +ŷ, so -π never appears
    Ok(if y > 0.0 { p.angle() } else { -p.angle() })
}

fn signed_reference(reference: AnglePoint) -> f64 {
    let r = reference.value();
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Counts how many times a path confined to the y-axis diameter winds past
/// `reference`, positive direction minus negative direction.
///
/// A step from near `π` to near `-π` (or back) is a passage through the
/// identified surface point and advances the lap counter. Steps must stay
/// below [`MAX_LIFT_STEP`] once unwrapped.
pub fn project_to_axis_winding(
    path: &RotationPath,
    reference: AnglePoint,
) -> Result<AxisWinding, SpinError> {
    let angles = path
        .samples()
        .iter()
        .enumerate()
        .map(|(i, p)| signed_y_angle(i, p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut laps: i64 = 0;
    for (index, pair) in angles.windows(2).enumerate() {
        let mut step = pair[1] - pair[0];
        if step > PI {
            step -= TAU;
            laps -= 1;
        } else if step < -PI {
            step += TAU;
            laps += 1;
        }
        if step.abs() >= MAX_LIFT_STEP {
            return Err(SpinError::Resolution {
                index,
                distance: step.abs(),
                limit: MAX_LIFT_STEP,
            });
        }
    }

    // unwrapped end = end + 2π·laps; count reference images in between
    let r = signed_reference(reference);
    let below = |s: f64| i64::from(s < r);
    let start = angles[0];
    let end = angles[angles.len() - 1];
    Ok(AxisWinding(laps + below(start) - below(end)))
}

/// Ring reduction of a spin pair next to the standard singlet prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPairReport {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Number of winding classes summed, `2 n_max + 1`.
    pub classes: u32,
    pub ring: Eq10Report,
    /// `cos²((α - β)/2)`
    pub singlet: f64,
}

/// Projects the filter angle `theta` and the measurement angles onto the
/// y-axis and evaluates the pair amplitude over the y-axis winding classes
/// through [`ring::eq10_diagnostic`]. Reports, does not compare.
pub fn spin_pair_diagnostic(
    theta: AnglePoint,
    alpha: AnglePoint,
    beta: AnglePoint,
    params: &RingParams,
    n_max: u32,
) -> Result<SpinPairReport, SpinError> {
    let (t, a, b) = (theta.value(), alpha.value(), beta.value());
    if !(t <= b && b <= a && a < PI) {
        return Err(RingError::Ordering {
            theta: t,
            beta: b,
            alpha: a,
        }
        .into());
    }
    let project = |x: f64| -> Result<AnglePoint, SpinError> {
        Ok(AnglePoint::new(signed_y_angle(0, &BallPoint::about_y(x)?)?))
    };
    let (theta_y, alpha_y, beta_y) = (project(t)?, project(a)?, project(b)?);

    let ring = ring::eq10_diagnostic(params, theta_y, alpha_y, beta_y, n_max)?;
    let half = 0.5 * (a - b);
    Ok(SpinPairReport {
        theta: t,
        alpha: a,
        beta: b,
        classes: 2 * n_max + 1,
        ring,
        singlet: half.cos().powi(2),
    })
}

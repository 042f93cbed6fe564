use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use super::{quat_distance, RotationPath, SpinError, MAX_LIFT_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpinorSign {
    Plus,
    Minus,
}

impl SpinorSign {
    pub fn value(self) -> i8 {
        match self {
            SpinorSign::Plus => 1,
            SpinorSign::Minus => -1,
        }
    }
}

impl Mul for SpinorSign {
    type Output = SpinorSign;

    fn mul(self, rhs: SpinorSign) -> SpinorSign {
        if self == rhs {
            SpinorSign::Plus
        } else {
            SpinorSign::Minus
        }
    }
}

/// Element of `π₁(SO(3)) = Z₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HomotopyClass {
    Trivial,
    Nontrivial,
}

impl HomotopyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HomotopyClass::Trivial => "trivial",
            HomotopyClass::Nontrivial => "nontrivial",
        }
    }
}

impl fmt::Display for HomotopyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Mul for HomotopyClass {
    type Output = HomotopyClass;

    fn mul(self, rhs: HomotopyClass) -> HomotopyClass {
        if self == rhs {
            HomotopyClass::Trivial
        } else {
            HomotopyClass::Nontrivial
        }
    }
}

impl From<SpinorSign> for HomotopyClass {
    fn from(sign: SpinorSign) -> Self {
        match sign {
            SpinorSign::Plus => HomotopyClass::Trivial,
            SpinorSign::Minus => HomotopyClass::Nontrivial,
        }
    }
}

/// Continuous lift of the whole path; returns the final lift and the direct
/// lift of the start.
fn lift(path: &RotationPath) -> Result<(super::Quat, super::Quat), SpinError> {
    let start = path.first().quat();
    let mut current = start;
    for (index, sample) in path.samples().iter().enumerate().skip(1) {
        let mut next = sample.quat();
        let distance = quat_distance(current, next);
        if distance >= MAX_LIFT_STEP {
            return Err(SpinError::Resolution {
                index: index - 1,
                distance,
                limit: MAX_LIFT_STEP,
            });
        }
        if current.dot(next) < 0.0 {
            next = next.neg();
        }
        current = next;
    }
    Ok((current, start))
}

/// Lifts the path continuously to unit quaternions, starting from the
/// direct lift of the first sample, and returns the sign of the endpoint
/// lift relative to the direct lift of the endpoint rotation.
///
/// Every step must be shorter than [`MAX_LIFT_STEP`]; coarser paths are
/// rejected with [`SpinError::Resolution`].
pub fn lift_to_spinor(path: &RotationPath) -> Result<SpinorSign, SpinError> {
    let (end, _) = lift(path)?;
    Ok(if end.dot(path.last().quat()) >= 0.0 {
        SpinorSign::Plus
    } else {
        SpinorSign::Minus
    })
}

/// Homotopy class of a closed path.
pub fn classify_homotopy(path: &RotationPath) -> Result<HomotopyClass, SpinError> {
    let gap = path.first().distance(path.last());
    if gap >= super::GEOMETRY_TOLERANCE {
        return Err(SpinError::NotClosed(gap));
    }
    // compared against the starting lift, which is the same rotation, so a
    // basepoint on the ball surface cannot flip the convention
    let (end, start) = lift(path)?;
    Ok(if end.dot(start) >= 0.0 {
        HomotopyClass::Trivial
    } else {
        HomotopyClass::Nontrivial
    })
}

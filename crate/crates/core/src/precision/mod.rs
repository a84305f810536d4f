//! Arbitrary-precision scalars, 3-vectors over them, and the precision
//! escalation policy every numerical operation runs under.
//!
//! A computation is written once as a function of its working precision
//! (in decimal digits). [`stabilize`] runs it on a doubling ladder of
//! precisions and accepts the first pair of consecutive levels whose
//! results agree to the target number of digits.

mod real;
mod vec3;

pub use real::{bits_for_digits, digits_for_bits, Real};
pub use vec3::Vec3;

use crate::error::{Error, Result};

/// Guard digits required between the working and the target precision.
pub const GUARD_DIGITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    working_digits: u32,
    target_digits: u32,
    cap_digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { working_digits: 64, target_digits: 40, cap_digits: 2000 }
    }
}

impl PrecisionContext {
    pub fn new(working_digits: u32, target_digits: u32, cap_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::InvalidContext("target_digits must be positive".into()));
        }
        if working_digits < target_digits + GUARD_DIGITS {
            return Err(Error::InvalidContext(format!(
                "working_digits ({working_digits}) must be at least target_digits + {GUARD_DIGITS} ({})",
                target_digits + GUARD_DIGITS
            )));
        }
        if cap_digits < working_digits {
            return Err(Error::InvalidContext(format!(
                "cap_digits ({cap_digits}) must be at least working_digits ({working_digits})"
            )));
        }
        Ok(PrecisionContext { working_digits, target_digits, cap_digits })
    }

    /// Context for a requested number of stable digits: working precision
    /// is the target plus 24 digits, raised to the cap if needed.
    pub fn for_target(target_digits: u32, cap_digits: u32) -> Result<Self> {
        let working = target_digits + 24;
        PrecisionContext::new(working, target_digits, cap_digits.max(working))
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn cap_digits(&self) -> u32 {
        self.cap_digits
    }

    pub fn working_bits(&self) -> usize {
        bits_for_digits(self.working_digits)
    }

    pub fn cap_bits(&self) -> usize {
        bits_for_digits(self.cap_digits)
    }

    /// Same context starting from a different working precision, clamped to the cap.
    pub fn starting_at(&self, working_digits: u32) -> PrecisionContext {
        PrecisionContext {
            working_digits: working_digits.clamp(self.working_digits, self.cap_digits),
            ..*self
        }
    }

    /// Doubling ladder of working precisions, ending exactly at the cap.
    pub fn levels(&self) -> Vec<u32> {
        let mut levels = vec![self.working_digits];
        let mut d = self.working_digits;
        while d < self.cap_digits {
            d = (2 * d).min(self.cap_digits);
            levels.push(d);
        }
        levels
    }
}

/// Relative change between a result and the same result at higher precision.
pub trait Converges {
    /// `None` when the two results differ structurally (e.g. a different
    /// number of roots) and cannot be compared numerically.
    fn relative_change(&self, finer: &Self, floor: &Real) -> Option<Real>;
}

impl Converges for Real {
    fn relative_change(&self, finer: &Real, floor: &Real) -> Option<Real> {
        let scale = finer.abs().max(floor.clone());
        Some((self - finer).abs() / scale)
    }
}

/// A value that survived the stability test.
#[derive(Clone, Debug)]
pub struct Stable<T> {
    pub value: T,
    pub achieved_digits: u32,
    /// Precision level the returned value was computed at.
    pub working_digits: u32,
}

/// Runs `computation(digits)` up the doubling ladder of `ctx` until two
/// consecutive levels agree to `target_digits` relative digits, and returns
/// the higher-precision value.
///
/// Errors for which [`Error::is_precision_limited`] holds are treated as a
/// failed level and escalation continues; any other error is returned as is.
pub fn stabilize<T, F>(ctx: &PrecisionContext, mut computation: F) -> Result<Stable<T>>
where
    T: Converges,
    F: FnMut(u32) -> Result<T>,
{
    let mut previous: Option<T> = None;
    for digits in ctx.levels() {
        match computation(digits) {
            Ok(value) => {
                if let Some(coarse) = &previous {
                    let bits = bits_for_digits(digits);
                    let floor = Real::pow10(-(ctx.cap_digits as i32), bits);
                    let tol = Real::pow10(-(ctx.target_digits as i32), bits);
                    if let Some(change) = coarse.relative_change(&value, &floor) {
                        if change <= tol {
                            return Ok(Stable {
                                value,
                                achieved_digits: ctx.target_digits,
                                working_digits: digits,
                            });
                        }
                    }
                }
                previous = Some(value);
            }
            Err(e) if e.is_precision_limited() => previous = None,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted { target: ctx.target_digits, cap: ctx.cap_digits })
}

//! Sign/log-magnitude scalar used wherever values like `e^{2r}` outgrow `f64`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest `ln|v|` that still materializes to a finite `f64`.
const LN_F64_MAX: f64 = 709.78;

/// A real number stored as sign and natural log of magnitude.
///
/// Products of the solution pair `k`, `l` at large arguments involve factors
/// `e^{±r}` with `r` far beyond 700, so all kernel algebra is carried out on
/// this representation and only materialized to `f64` at the end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunValue {
    sign: f64,
    ln_mag: f64,
}

impl FunValue {
    pub const ZERO: FunValue = FunValue { sign: 0.0, ln_mag: f64::NEG_INFINITY };
    pub const ONE: FunValue = FunValue { sign: 1.0, ln_mag: 0.0 };

    /// Wrap an ordinary finite value.
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            FunValue { sign: v.signum(), ln_mag: v.abs().ln() }
        }
    }

    /// Build from an explicit sign and `ln|v|`.
    pub fn from_ln(sign: f64, ln_mag: f64) -> Self {
        if sign == 0.0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            FunValue { sign: sign.signum(), ln_mag }
        }
    }

    /// Materialize to `f64`. Overflows to `±inf` when the magnitude is not
    /// representable; use [`FunValue::is_log_scaled`] to detect that case.
    pub fn value(&self) -> f64 {
        self.sign * self.ln_mag.exp()
    }

    /// True when `value()` would overflow and the log form is the only
    /// faithful representation.
    pub fn is_log_scaled(&self) -> bool {
        self.ln_mag > LN_F64_MAX
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn ln_mag(&self) -> f64 {
        self.ln_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.ln_mag < f64::INFINITY
    }

    pub fn abs(&self) -> Self {
        FunValue { sign: self.sign.abs(), ln_mag: self.ln_mag }
    }

    pub fn recip(&self) -> Self {
        FunValue { sign: self.sign, ln_mag: -self.ln_mag }
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        let sign = if n % 2 == 0 { self.sign.abs() } else { self.sign };
        FunValue { sign, ln_mag: self.ln_mag * f64::from(n) }
    }

    /// `x^p` for positive `x` stored exactly in log form.
    pub fn pow_of(x: f64, p: f64) -> Self {
        debug_assert!(x > 0.0);
        FunValue { sign: 1.0, ln_mag: p * x.ln() }
    }

    /// Relative difference `|a-b| / max(|a|,|b|)` computed in log space.
    pub fn rel_diff(a: FunValue, b: FunValue) -> f64 {
        if a.is_zero() && b.is_zero() {
            return 0.0;
        }
        let diff = a - b;
        if diff.is_zero() {
            return 0.0;
        }
        let scale = a.ln_mag.max(b.ln_mag);
        (diff.ln_mag - scale).exp()
    }
}

impl Mul for FunValue {
    type Output = FunValue;
    fn mul(self, rhs: FunValue) -> FunValue {
        if self.is_zero() || rhs.is_zero() {
            return FunValue::ZERO;
        }
        FunValue { sign: self.sign * rhs.sign, ln_mag: self.ln_mag + rhs.ln_mag }
    }
}

impl Div for FunValue {
    type Output = FunValue;
    fn div(self, rhs: FunValue) -> FunValue {
        if self.is_zero() {
            return FunValue::ZERO;
        }
        FunValue { sign: self.sign * rhs.sign, ln_mag: self.ln_mag - rhs.ln_mag }
    }
}

impl Neg for FunValue {
    type Output = FunValue;
    fn neg(self) -> FunValue {
        FunValue { sign: -self.sign, ln_mag: self.ln_mag }
    }
}

impl Add for FunValue {
    type Output = FunValue;
    fn add(self, rhs: FunValue) -> FunValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.ln_mag >= rhs.ln_mag { (self, rhs) } else { (rhs, self) };
        let r = (lo.ln_mag - hi.ln_mag).exp(); // in (0, 1]
        if hi.sign == lo.sign {
            FunValue { sign: hi.sign, ln_mag: hi.ln_mag + r.ln_1p() }
        } else {
            let m = 1.0 - r;
            if m <= 0.0 {
                FunValue::ZERO
            } else {
                FunValue { sign: hi.sign, ln_mag: hi.ln_mag + m.ln() }
            }
        }
    }
}

impl Sub for FunValue {
    type Output = FunValue;
    fn sub(self, rhs: FunValue) -> FunValue {
        self + (-rhs)
    }
}

impl PartialOrd for FunValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.sign > 0.0 {
            Some(Ordering::Greater)
        } else {
            Some(Ordering::Less)
        }
    }
}

impl From<f64> for FunValue {
    fn from(v: f64) -> Self {
        FunValue::from_value(v)
    }
}

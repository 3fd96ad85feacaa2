//! Modified Bessel functions `I_nu`, `K_nu` of real order `nu >= 0`.
//!
//! Internally everything is computed in exponentially scaled form
//! (`I e^{-x}`, `K e^{x}`) and returned as [`FunValue`], so arguments far
//! beyond the `f64` exponent range are fine.
//!
//! Evaluation strategy, following the usual production treatment of the
//! Temme / Thompson-Barnett algorithms:
//! * order reduced to `nu = n + u`, `|u| <= 1/2`;
//! * `K_u, K_{u+1}` from Temme's series for `x <= 2` (which is the stable
//!   realization of the reflection formula, with the near-integer limit
//!   built in), from Steed's continued fraction CF2 for `x > 2`;
//! * upward recurrence in the order (with rescaling guards) to `K_nu`;
//! * `I_nu` from the power series for `x <= 2`, from CF1 plus the
//!   `I K` Wronskian for mid-range `x`, from the large-argument asymptotic
//!   series once it has converged;
//! * derivatives from `I'_nu = I_{nu+1} + (nu/x) I_nu` and
//!   `K'_nu = (nu/x) K_nu - K_{nu+1}` (no cancellation: see tests).

use super::gamma::{gamma_fn, ln_gamma};
use crate::error::Error;
use crate::logval::FunValue;
use crate::Result;

const MAX_ITER: usize = 50_000;
const RESCALE_THRESHOLD: f64 = 1e280;

/// `I_nu(x)`, `K_nu(x)` and their derivatives.
#[derive(Debug, Clone, Copy)]
pub struct BesselIk {
    pub i: FunValue,
    pub k: FunValue,
    pub iprime: FunValue,
    pub kprime: FunValue,
}

/// Scaled values of consecutive orders, the building block for everything
/// else in this module.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledIkPair {
    /// `I_nu(x) e^{-x}`
    pub ie: f64,
    /// `I_{nu+1}(x) e^{-x}`
    pub ie1: f64,
    /// `ln( K_nu(x) e^{x} )`
    pub ln_ke: f64,
    /// `ln( K_{nu+1}(x) e^{x} )`
    pub ln_ke1: f64,
    /// Extra `ln` carried by the `I` values when `ie` itself would underflow.
    pub ln_i_scale: f64,
}

/// Public entry point: both functions and derivatives at real order.
pub fn bessel_ik(nu: f64, x: f64) -> Result<BesselIk> {
    let p = scaled_ik_pair(nu, x)?;
    let i = FunValue::from_ln(1.0, p.ie.ln() + p.ln_i_scale + x);
    let i1 = FunValue::from_ln(1.0, p.ie1.ln() + p.ln_i_scale + x);
    let k = FunValue::from_ln(1.0, p.ln_ke - x);
    let k1 = FunValue::from_ln(1.0, p.ln_ke1 - x);
    let ratio = FunValue::from_value(nu / x);
    let iprime = i1 + ratio * i;
    let kprime = ratio * k - k1;
    Ok(BesselIk { i, k, iprime, kprime })
}

/// Scaled `(I_nu, I_{nu+1}, K_nu, K_{nu+1})`.
pub(crate) fn scaled_ik_pair(nu: f64, x: f64) -> Result<ScaledIkPair> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_ik requires x > 0, got {x}")));
    }
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("bessel_ik requires nu >= 0, got {nu}")));
    }

    let n = nu.round();
    let u = nu - n;
    let n = n as usize;

    // K at the base order, scaled by e^x.
    let (mut ke, mut ke1, mut ln_scale) = if x <= 2.0 {
        let (k0, k1) = temme_ik(u, x)?;
        (k0, k1, x)
    } else {
        let (k0e, k1e) = cf2_ik(u, x)?;
        (k0e, k1e, 0.0)
    };

    // Upward recurrence to order nu, rescaling to dodge overflow.
    let mut ord = u;
    for _ in 0..n {
        let next = 2.0 * (ord + 1.0) / x * ke1 + ke;
        ke = ke1;
        ke1 = next;
        ord += 1.0;
        if ke1 > RESCALE_THRESHOLD {
            ke /= RESCALE_THRESHOLD;
            ke1 /= RESCALE_THRESHOLD;
            ln_scale += RESCALE_THRESHOLD.ln();
        }
    }
    let ln_ke = ke.ln() + ln_scale;
    let ln_ke1 = ke1.ln() + ln_scale;

    // I at order nu.
    let (ie, ie1, ln_i_scale) = if x <= 2.0 {
        let (ln_i, ln_i1) = i_series_ln(nu, x);
        // Values may underflow f64 for large order and tiny argument; carry
        // a shared log offset instead.
        let base = ln_i.max(ln_i1);
        let off = if base < -600.0 { base } else { 0.0 };
        (((ln_i - off) - x).exp(), ((ln_i1 - off) - x).exp(), off)
    } else {
        let asym = if x > 100.0 { i_asymptotic_scaled(nu, x) } else { None };
        match asym {
            Some((ie, ie1)) => (ie, ie1, 0.0),
            None => {
                let fv = cf1_ik(nu, x)?;
                // Wronskian: I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x, in scaled form
                // Ie (Ke1 + fv Ke) = 1/x.
                let denom_ln = log_add(ln_ke1, fv.ln() + ln_ke);
                let ln_ie = -x.ln() - denom_ln;
                ((ln_ie).exp(), fv * (ln_ie).exp(), 0.0)
            }
        }
    };

    Ok(ScaledIkPair { ie, ie1, ln_ke, ln_ke1, ln_i_scale })
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Temme's series for `K_u(x)`, `K_{u+1}(x)`, valid for `x <= 2`, `|u| <= 1/2`.
fn temme_ik(u: f64, x: f64) -> Result<(f64, f64)> {
    debug_assert!(x <= 2.0 && u.abs() <= 0.5);
    const EULER_GAMMA: f64 = 0.5772156649015328606;
    use std::f64::consts::PI;

    let gp = gamma_fn(1.0 + u) - 1.0;
    let gm = gamma_fn(1.0 - u) - 1.0;

    let a = (x / 2.0).ln();
    let b = (u * a).exp();
    let sigma = -a * u;
    let c = if u.abs() < 1e-10 { 1.0 } else { (PI * u).sin() / (PI * u) };
    let d = if sigma.abs() < 1e-10 { 1.0 } else { sigma.sinh() / sigma };
    let gamma1 = if u.abs() < 1e-10 { -EULER_GAMMA } else { (0.5 / u) * (gp - gm) * c };
    let gamma2 = (2.0 + gp + gm) * c / 2.0;

    let mut p = (gp + 1.0) / (2.0 * b);
    let mut q = (gm + 1.0) * b / 2.0;
    let mut f = (sigma.cosh() * gamma1 + d * (-a) * gamma2) / c;
    let mut h = p;
    let mut coef = 1.0;
    let mut sum = f;
    let mut sum1 = h;

    for k in 1..MAX_ITER {
        let kf = k as f64;
        f = (kf * f + p + q) / (kf * kf - u * u);
        p /= kf - u;
        q /= kf + u;
        h = p - kf * f;
        coef *= x * x / (4.0 * kf);
        sum += coef * f;
        sum1 += coef * h;
        if (coef * f).abs() < sum.abs() * f64::EPSILON {
            return Ok((sum, 2.0 * sum1 / x));
        }
    }
    Err(Error::NoConvergence("Temme series for K".into()))
}

/// Steed's continued fraction CF2: scaled `K_u e^x`, `K_{u+1} e^x` for `x > 1`.
fn cf2_ik(u: f64, x: f64) -> Result<(f64, f64)> {
    debug_assert!(x > 1.0);
    use std::f64::consts::PI;

    let mut a = u * u - 0.25;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = 1.0 + q * delta;

    for k in 2..MAX_ITER {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (a * d + b);
        delta *= b * d - 1.0;
        f += delta;

        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;

        if (q * delta).abs() < s.abs() * f64::EPSILON / 2.0 {
            let ke = (PI / (2.0 * x)).sqrt() / s;
            let ke1 = ke * (0.5 + u + x + (u * u - 0.25) * f) / x;
            return Ok((ke, ke1));
        }
    }
    Err(Error::NoConvergence("continued fraction CF2 for K".into()))
}

/// CF1 (modified Lentz): the ratio `I_{nu+1}(x) / I_nu(x)`.
fn cf1_ik(nu: f64, x: f64) -> Result<f64> {
    let tiny = f64::MAX.sqrt().recip();
    let mut c = tiny;
    let mut f = tiny;
    let mut d = 0.0;

    for k in 1..MAX_ITER {
        let kf = k as f64;
        let b = 2.0 * (nu + kf) / x;
        c = b + 1.0 / c;
        d = b + d;
        if c == 0.0 {
            c = tiny;
        }
        if d == 0.0 {
            d = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() <= f64::EPSILON {
            return Ok(f);
        }
    }
    Err(Error::NoConvergence("continued fraction CF1 for I".into()))
}

/// `ln I_nu(x)` and `ln I_{nu+1}(x)` by the ascending power series.
fn i_series_ln(nu: f64, x: f64) -> (f64, f64) {
    (i_series_ln_one(nu, x), i_series_ln_one(nu + 1.0, x))
}

fn i_series_ln_one(nu: f64, x: f64) -> f64 {
    let prefix = nu * (x / 2.0).ln() - ln_gamma(nu + 1.0);
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term < sum * f64::EPSILON {
            break;
        }
    }
    prefix + sum.ln()
}

/// Large-argument asymptotic series for scaled `I_nu e^{-x}`, `I_{nu+1} e^{-x}`.
/// Returns `None` when the series has not converged to machine precision.
fn i_asymptotic_scaled(nu: f64, x: f64) -> Option<(f64, f64)> {
    Some((i_asymptotic_one(nu, x)?, i_asymptotic_one(nu + 1.0, x)?))
}

fn i_asymptotic_one(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let num = mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        term *= -num / (8.0 * x * kf);
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            let pref = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
            return Some(pref * sum);
        }
        if term.abs() > 1.0 {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn val(f: FunValue) -> f64 {
        f.value()
    }

    #[test]
    fn half_integer_closed_forms() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}, I_{1/2}(x) = sqrt(2/(pi x)) sinh x
        for &x in &[0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
            let b = bessel_ik(0.5, x).unwrap();
            let kexp = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            let iexp = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh();
            assert_relative_eq!(val(b.k), kexp, max_relative = 1e-12);
            assert_relative_eq!(val(b.i), iexp, max_relative = 1e-12);
        }
        let b = bessel_ik(0.5, 1.0).unwrap();
        assert_relative_eq!(val(b.k), 0.461068504447894, max_relative = 1e-12);
        assert_relative_eq!(val(b.i), 0.937674888245489, max_relative = 1e-12);
    }

    #[test]
    fn integer_order_reference_values() {
        // Reference values, I_0/K_0/I_1/K_1 at x=1 (standard tables).
        let b0 = bessel_ik(0.0, 1.0).unwrap();
        assert_relative_eq!(val(b0.i), 1.2660658777520084, max_relative = 1e-13);
        assert_relative_eq!(val(b0.k), 0.4210244382407083, max_relative = 1e-13);
        let b1 = bessel_ik(1.0, 1.0).unwrap();
        assert_relative_eq!(val(b1.i), 0.5651591039924851, max_relative = 1e-13);
        assert_relative_eq!(val(b1.k), 0.6019072301972346, max_relative = 1e-13);
        let b = bessel_ik(0.0, 10.0).unwrap();
        assert_relative_eq!(val(b.i), 2815.716628466254, max_relative = 1e-13);
        let b = bessel_ik(20.0, 2.0).unwrap();
        assert_relative_eq!(val(b.i), 4.310560576109548e-19, max_relative = 1e-12);
        assert_relative_eq!(val(b.k), 5.7708568527002424e16, max_relative = 1e-12);
    }

    #[test]
    fn derivative_identities() {
        // K'_0 = -K_1 and I'_0 = I_1.
        let b0 = bessel_ik(0.0, 1.3).unwrap();
        let b1 = bessel_ik(1.0, 1.3).unwrap();
        assert_relative_eq!(val(b0.kprime), -val(b1.k), max_relative = 1e-13);
        assert_relative_eq!(val(b0.iprime), val(b1.i), max_relative = 1e-13);
    }

    #[test]
    fn wronskian_identity_across_regimes() {
        // I_nu(x) K_{nu+1}(x) + I_{nu+1}(x) K_nu(x) = 1/x.
        // Away from the CF1 route (x <= 2) this is an independent check.
        for &nu in &[0.0, 0.25, 0.5, 1.0 / 3.0, 1.5, 2.75] {
            for &x in &[1e-5, 0.03, 0.7, 1.9] {
                let a = bessel_ik(nu, x).unwrap();
                let b = bessel_ik(nu + 1.0, x).unwrap();
                let w = a.i * b.k + b.i * a.k;
                assert_relative_eq!(w.value(), 1.0 / x, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn regime_switch_continuity() {
        // The Temme/CF2 switch at x = 2 and the CF1/asymptotic switch at
        // x = 100 must agree across the seam. The offsets are small enough
        // that the derivative contributes < 1e-12 relative change, so any
        // visible jump is algorithmic disagreement.
        for &nu in &[0.0, 0.3, 0.5, 1.2, 2.5] {
            for &x in &[2.0f64, 100.0] {
                let lo = x * (1.0 - 2.0 * f64::EPSILON);
                let hi = x * (1.0 + 2.0 * f64::EPSILON);
                let a = bessel_ik(nu, lo).unwrap();
                let b = bessel_ik(nu, hi).unwrap();
                assert!(
                    FunValue::rel_diff(a.k, b.k) < 1e-11,
                    "K seam nu={nu} x={x}: {:.2e}",
                    FunValue::rel_diff(a.k, b.k)
                );
                assert!(
                    FunValue::rel_diff(a.i, b.i) < 1e-11,
                    "I seam nu={nu} x={x}: {:.2e}",
                    FunValue::rel_diff(a.i, b.i)
                );
            }
        }
    }

    #[test]
    fn log_scaled_large_arguments() {
        // At x = 1500, I overflows f64 but the log form stays finite and
        // matches the leading asymptotics.
        let b = bessel_ik(0.7, 1500.0).unwrap();
        assert!(b.i.is_log_scaled());
        let expect_ln = 1500.0 - 0.5 * (2.0 * std::f64::consts::PI * 1500.0).ln();
        assert_relative_eq!(b.i.ln_mag(), expect_ln, max_relative = 1e-4);
        let expect_k_ln = -1500.0 + 0.5 * (std::f64::consts::PI / (2.0 * 1500.0)).ln();
        assert_relative_eq!(b.k.ln_mag(), expect_k_ln, max_relative = 1e-4);
        // Product I*K is finite and ~ 1/(2x).
        assert_relative_eq!((b.i * b.k).value(), 1.0 / 3000.0, max_relative = 1e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_ik(0.5, 0.0).is_err());
        assert!(bessel_ik(0.5, -1.0).is_err());
        assert!(bessel_ik(-0.5, 1.0).is_err());
    }
}

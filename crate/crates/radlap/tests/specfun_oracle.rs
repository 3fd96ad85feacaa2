//! Independent oracle for the modified Bessel implementation.
//!
//! The oracle takes a completely different route from the library:
//! `I_nu` by direct summation of the ascending series (all-positive terms),
//! `K_nu` by numerical quadrature of the integral representation
//! `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt`, and large-argument
//! values by the classical asymptotic expansions. The library path
//! (Temme series / Steed continued fractions / Wronskian coupling) shares
//! no code with any of these.

use radlap::quad::GaussRule;
use radlap::specfun::bessel_ik;

/// ln Gamma via Stirling with Bernoulli corrections (argument shifted up),
/// independent of the library's Lanczos implementation.
fn oracle_ln_gamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 12.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    shift + 0.5 * (2.0 * std::f64::consts::PI).ln() + (x - 0.5) * x.ln() - x + series
}

/// Ascending series for I_nu(x), returned as (ln of value).
fn oracle_i_ln(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    nu * (0.5 * x).ln() - oracle_ln_gamma(nu + 1.0) + sum.ln()
}

/// K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt via composite Gauss
/// panels, upper limit chosen so the dropped tail is below 1e-18 relative.
fn oracle_k(nu: f64, x: f64) -> f64 {
    // Find T with x(cosh T - 1) - nu T > 50.
    let mut t_max = 1.0f64;
    while x * (t_max.cosh() - 1.0) - nu * t_max < 50.0 {
        t_max += 0.5;
        if t_max > 60.0 {
            break;
        }
    }
    let rule = GaussRule::new(30);
    let panels = (t_max.ceil() as usize * 2).max(8);
    let mut acc = 0.0;
    // Factor e^{-x} out so the integrand is O(1) at t = 0 for any x.
    for p in 0..panels {
        let a = t_max * p as f64 / panels as f64;
        let b = t_max * (p + 1) as f64 / panels as f64;
        acc += rule.integrate(a, b, |t| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh());
    }
    acc * (-x).exp()
}

/// ln K_nu(x) for large x via the asymptotic expansion (used where the
/// integral oracle or f64 range gets uncomfortable).
fn oracle_k_ln_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (8.0 * x * kf);
        sum += term;
        if term.abs() < 1e-18 * sum {
            break;
        }
    }
    0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x + sum.ln()
}

#[test]
fn i_matches_series_oracle() {
    let orders = [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0, 1.5, 2.0, 2.75, 3.0];
    let args = [1e-6, 1e-4, 0.01, 0.1, 0.5, 1.0, 1.9, 2.1, 5.0, 10.0, 30.0, 80.0];
    for &nu in &orders {
        for &x in &args {
            let got = bessel_ik(nu, x).unwrap();
            let want_ln = oracle_i_ln(nu, x);
            let rel = (got.i.ln_mag() - want_ln).abs();
            assert!(rel < 1e-10, "I_{{{nu}}}({x}): ln rel err {rel:.2e}");
        }
    }
}

#[test]
fn k_matches_integral_oracle() {
    let orders = [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0, 1.5, 2.0, 2.75, 3.0];
    let args = [1e-6, 1e-4, 0.01, 0.1, 0.5, 1.0, 1.9, 2.1, 5.0, 10.0, 30.0, 80.0];
    for &nu in &orders {
        for &x in &args {
            let got = bessel_ik(nu, x).unwrap().k.value();
            let want = oracle_k(nu, x);
            let rel = (got - want).abs() / want;
            assert!(rel < 1e-10, "K_{{{nu}}}({x}): rel err {rel:.2e} got {got:.15e} want {want:.15e}");
        }
    }
}

#[test]
fn large_argument_asymptotic_agreement() {
    for &nu in &[0.0, 0.5, 1.25, 3.0] {
        for &x in &[200.0, 700.0, 5000.0] {
            let got = bessel_ik(nu, x).unwrap();
            let want_ln = oracle_k_ln_asymptotic(nu, x);
            assert!(
                (got.k.ln_mag() - want_ln).abs() < 1e-12,
                "K ln mismatch nu={nu} x={x}"
            );
        }
    }
}

#[test]
fn derivatives_match_differentiated_oracle() {
    // K'_nu(x) = -int_0^inf e^{-x cosh t} cosh t cosh(nu t) dt.
    let rule = GaussRule::new(30);
    for &nu in &[0.0, 0.5, 1.3, 2.5] {
        for &x in &[0.2, 1.0, 3.0, 9.0] {
            let mut t_max = 1.0f64;
            while x * (t_max.cosh() - 1.0) - (nu + 1.0) * t_max < 50.0 {
                t_max += 0.5;
            }
            let panels = (t_max.ceil() as usize * 2).max(8);
            let mut acc = 0.0;
            for p in 0..panels {
                let a = t_max * p as f64 / panels as f64;
                let b = t_max * (p + 1) as f64 / panels as f64;
                acc += rule.integrate(a, b, |t| {
                    (-x * (t.cosh() - 1.0)).exp() * t.cosh() * (nu * t).cosh()
                });
            }
            let want = -acc * (-x).exp();
            let got = bessel_ik(nu, x).unwrap().kprime.value();
            assert!(
                ((got - want) / want).abs() < 1e-10,
                "K'_{{{nu}}}({x}) rel err {:.2e}",
                ((got - want) / want).abs()
            );
        }
    }
}

#[test]
fn wronskian_of_i_and_k() {
    // I_nu(x) K'_nu(x) - I'_nu(x) K_nu(x) = -1/x, fully independent of the
    // internal coupling since both sides come from the public API.
    for &nu in &[0.0, 0.4, 0.5, 1.7, 3.0] {
        for &x in &[1e-4, 0.3, 2.0, 15.0, 200.0] {
            let b = bessel_ik(nu, x).unwrap();
            let w = (b.i * b.kprime - b.iprime * b.k).value();
            let rel = (w * x + 1.0).abs();
            assert!(rel < 1e-10, "Wronskian nu={nu} x={x} err {rel:.2e}");
        }
    }
}

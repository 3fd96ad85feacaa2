//! Riesz transform kernels `K_{grad L^{-1/2}}(x, y)` by quadrature over the
//! spectral parameter, their `kk` remainders, convolution profiles, and the
//! pointwise-bound boundedness predictor.
//!
//! The square root is inverted through
//! `L^{-1/2} = (c_norm / pi) int_0^inf (L + lambda^2)^{-1} dlambda`;
//! the mathematically exact prefactor is `c_norm = 2` (from the identity
//! `int_0^inf dl/(s + l^2) = pi/(2 sqrt(s))`), kept configurable so the
//! eigendecomposition cross-check can pin it empirically. All boundedness
//! verdicts are prefactor-independent.

use crate::error::Error;
use crate::logval::FunValue;
use crate::operators::{dx_resolvent_kernel, KernelCtx};
use crate::quad::{exp_sinh_tail, fit_slope, richardson_limit, GaussRule};
use crate::specfun::{Dimension, SolutionBasis};
use crate::Result;

/// Spectral-parameter quadrature layout for one kernel evaluation.
///
/// Panels shrink geometrically (ratio 2) from the split point `1/min(x,y)`
/// toward zero (power-law regime); the tail is handled by a
/// double-exponential rule tuned to the true decay rate of the integrand,
/// reaching far enough that the dropped tail is below `1e-8` relative.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureScheme {
    /// Geometric panels on `(0, split]`.
    pub panels_small: usize,
    /// Nodes per panel.
    pub nodes_per_panel: usize,
    /// Resolution levels of the double-exponential tail.
    pub tail_levels: usize,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        QuadratureScheme { panels_small: 36, nodes_per_panel: 12, tail_levels: 44 }
    }
}

impl QuadratureScheme {
    pub fn refined(&self) -> Self {
        QuadratureScheme {
            panels_small: self.panels_small * 2,
            nodes_per_panel: self.nodes_per_panel,
            tail_levels: self.tail_levels * 2,
        }
    }

    /// Split point between the power-law and exponential regimes.
    pub fn split(x: f64, y: f64) -> f64 {
        1.0 / x.abs().min(y.abs())
    }
}

/// A kernel value with its quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct RieszEval {
    pub value: f64,
    pub quad_error: f64,
}

/// The Riesz transform of one operator at a fixed normalization.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    pub ctx: KernelCtx,
    pub c_norm: f64,
}

impl RieszOperator {
    /// Standard normalization `c_norm = 2`.
    pub fn new(ctx: KernelCtx) -> Self {
        RieszOperator { ctx, c_norm: 2.0 }
    }

    pub fn with_c_norm(ctx: KernelCtx, c_norm: f64) -> Self {
        RieszOperator { ctx, c_norm }
    }

    fn prefactor(&self) -> f64 {
        self.c_norm / std::f64::consts::PI
    }

    /// Decay rate of the integrand in lambda: the slowest of the `k l`
    /// piece (`e^{-lambda |x-y|}` on one component) and the `k k` piece
    /// (`e^{-lambda (|x|+|y|-2j)}`).
    fn tail_rate(&self, x: f64, y: f64, kk_only: bool) -> f64 {
        let j = self.ctx.spec.domain().junction();
        let (ax, ay) = (x.abs(), y.abs());
        let rate_kk = (ax + ay - 2.0 * j).max(1e-300);
        if kk_only {
            return rate_kk;
        }
        let same = !self.ctx.spec.domain().two_sided() || x.signum() == y.signum();
        if same {
            rate_kk.min((ax - ay).abs().max(1e-300))
        } else {
            rate_kk
        }
    }

    fn integrate<F: FnMut(f64) -> Result<f64>>(
        &self,
        x: f64,
        y: f64,
        scheme: &QuadratureScheme,
        kk_only: bool,
        mut integrand: F,
    ) -> Result<RieszEval> {
        let split = QuadratureScheme::split(x, y);
        let rate = self.tail_rate(x, y, kk_only);

        let rule_full = GaussRule::new(scheme.nodes_per_panel);
        let rule_half = GaussRule::new((scheme.nodes_per_panel / 2).max(3));

        let mut full = 0.0;
        let mut coarse = 0.0;
        let mut b = split;
        let mut pts = Vec::new();
        for _ in 0..scheme.panels_small {
            let a = b / 2.0;
            pts.clear();
            rule_full.extend_mapped(a, b, &mut pts);
            for &(lam, w) in &pts {
                full += integrand(lam)? * w;
            }
            pts.clear();
            rule_half.extend_mapped(a, b, &mut pts);
            for &(lam, w) in &pts {
                coarse += integrand(lam)? * w;
            }
            b = a;
        }

        // Double-exponential tail on (split, inf), matched to the decay rate.
        let tail = exp_sinh_tail(split, rate, scheme.tail_levels);
        let mut tail_full = 0.0;
        for &(lam, w) in &tail {
            tail_full += integrand(lam)? * w;
        }
        let tail_c = exp_sinh_tail(split, rate, (scheme.tail_levels / 2).max(8));
        let mut tail_coarse = 0.0;
        for &(lam, w) in &tail_c {
            tail_coarse += integrand(lam)? * w;
        }

        let value = self.prefactor() * (full + tail_full);
        let quad_error =
            self.prefactor() * ((full - coarse).abs() + (tail_full - tail_coarse).abs());
        Ok(RieszEval { value, quad_error })
    }

    /// `K_{grad L^{-1/2}}(x, y)`, off the diagonal.
    pub fn kernel(&self, x: f64, y: f64, scheme: &QuadratureScheme) -> Result<RieszEval> {
        let gap = (x - y).abs();
        if gap < 1e-6 * (x.abs() + y.abs()) {
            return Err(Error::Diagonal { gap });
        }
        let ctx = &self.ctx;
        self.integrate(x, y, scheme, false, |lam| {
            Ok(dx_resolvent_kernel(ctx, lam, x, y)?.value())
        })
    }

    /// The `k k` remainder of the Riesz kernel: the transform of the
    /// rank-one part only. Decides every upper `L^p` threshold.
    pub fn kk_kernel(&self, x: f64, y: f64, scheme: &QuadratureScheme) -> Result<RieszEval> {
        let ctx = &self.ctx;
        let d = ctx.dimension();
        let two_sided = ctx.spec.domain().two_sided();
        self.integrate(x, y, scheme, true, |lam| {
            // d/dx of the correction g(lambda) k(lambda|x|) k(lambda|y|).
            let vx = ctx.basis.eval(lam * x.abs())?;
            let vy = ctx.basis.eval(lam * y.abs())?;
            let cp = ctx.couplings(lam)?;
            let same = !two_sided || x.signum() == y.signum();
            let pref =
                FunValue::from_value(ctx.cpl * x.signum()) * FunValue::pow_of(lam, d - 1.0);
            let g = if same {
                -(pref * cp.same)
            } else {
                pref * cp.opposite.ok_or_else(|| {
                    Error::GridMismatch("opposite side on one-component domain".into())
                })?
            };
            Ok((g * vx.kprime * vy.k).value())
        })
    }

    /// The log-variable convolution profile `u(s)` at exponent `p`:
    /// `u(s) = e^{s d/p} K(e^s, 1)`. Only the scale-invariant families
    /// (junction at the origin) admit this picture.
    pub fn convolution_profile(
        &self,
        p: f64,
        s_grid: &[f64],
        scheme: &QuadratureScheme,
    ) -> Result<ConvolutionProfile> {
        if self.ctx.spec.domain().junction() != 0.0 {
            return Err(Error::InvalidOperator(format!(
                "convolution profile requires a scale-invariant family, got {}",
                self.ctx.spec.strategy().name()
            )));
        }
        if !(p > 1.0) {
            return Err(Error::Domain(format!("profile exponent must exceed 1, got {p}")));
        }
        let d = self.ctx.dimension();
        let mut u = Vec::with_capacity(s_grid.len());
        for &s in s_grid {
            let x = s.exp();
            let k = self.kernel(x, 1.0, scheme)?;
            u.push((s * d / p).exp() * k.value);
        }
        Ok(ConvolutionProfile { d, p, s: s_grid.to_vec(), u })
    }

    /// The signed Calderon-Zygmund coefficient of this kernel: near the
    /// diagonal `K(x,y) ~ cz / (x - y)` with `cz = -(c_norm/pi) b`. The
    /// minus sign is the one-dimensional gradient of the logarithmic
    /// `L^{-1/2}` kernel.
    pub fn cz_coefficient(&self) -> Result<f64> {
        Ok(-self.prefactor() * diagonal_constant_of(&self.ctx.basis)?.b)
    }
}

/// The constant `b = lim_{lambda->inf} lambda^{d-1} l(lambda) k(lambda)`.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalConstant {
    pub d: f64,
    pub b: f64,
}

/// Richardson-extrapolated large-argument limit of
/// `lambda^{d-1} l(lambda) k(lambda)`.
pub fn diagonal_constant(d: Dimension) -> Result<DiagonalConstant> {
    diagonal_constant_of(&SolutionBasis::Plain(d))
}

pub fn diagonal_constant_of(basis: &SolutionBasis) -> Result<DiagonalConstant> {
    let d = basis.dimension().get();
    let product = |lambda: f64| -> f64 {
        let v = basis.eval(lambda).expect("basis eval");
        (FunValue::pow_of(lambda, d - 1.0) * v.l * v.k).value()
    };
    // Evaluate at lambda = 200 / h for h = 1, 1/2, ...; the corrections are
    // integer powers of 1/lambda.
    let (b, err) = richardson_limit(|h| product(200.0 / h), 1.0, &[1.0, 2.0, 3.0], 1);
    if !(b > 0.0) || err > 1e-9 * b {
        return Err(Error::NoConvergence(format!(
            "diagonal constant extrapolation error {err:.2e} at d = {d}"
        )));
    }
    Ok(DiagonalConstant { d, b })
}

/// Sampled convolution profile `u(s)` for one `(family, d, p)`.
#[derive(Debug, Clone)]
pub struct ConvolutionProfile {
    pub d: f64,
    pub p: f64,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
}

impl ConvolutionProfile {
    /// Fitted exponential decay rate of `|u|` over samples with `s` in
    /// `[lo, hi]`: returns `r` with `u ~ e^{-r s}` (positive means decay
    /// toward `s -> +inf`).
    pub fn fitted_decay(&self, lo: f64, hi: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .s
            .iter()
            .zip(&self.u)
            .filter(|(s, u)| **s >= lo && **s <= hi && **u != 0.0)
            .map(|(s, u)| (*s, u.abs().ln()))
            .collect();
        -fit_slope(&pts)
    }
}

/// The pointwise-bound boundedness predictor: for a kernel bounded by
/// `x^{-alpha} y^{-beta}` on `x <= y` and `x^{-alpha'} y^{-beta'}` on
/// `x > y` over `[1, inf)` with the weight `r^{d-1}`, the sufficient range
/// is the open interval `( d/min(d, alpha), d/max(0, d-beta) )`, reading
/// `d/0` as infinity.
pub fn kernel_bound_predictor(
    alpha: f64,
    beta: f64,
    alpha_p: f64,
    beta_p: f64,
    d: f64,
) -> Result<(f64, f64)> {
    if !(alpha + beta > d) || !(alpha_p + beta_p > d) {
        return Err(Error::Domain(format!(
            "bound predictor requires alpha+beta > d on both branches; got \
             {alpha}+{beta}, {alpha_p}+{beta_p} vs d = {d}"
        )));
    }
    let lo = d / d.min(alpha);
    let denom = (d - beta).max(0.0);
    let hi = if denom == 0.0 { f64::INFINITY } else { d / denom };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_constant_values() {
        // lambda^{d-1} l k -> 1/2 for every d (I K ~ 1/(2 lambda)).
        for &dd in &[1.5, 2.0, 3.0, 4.5] {
            let b = diagonal_constant(Dimension::new(dd).unwrap()).unwrap();
            assert!(b.b > 0.0);
            assert_relative_eq!(b.b, 0.5, max_relative = 1e-9);
        }
    }

    #[test]
    fn diagonal_constant_stability() {
        // The extrapolated limit computed from base lambda = 300 agrees with
        // the one from base 600 to 1e-8.
        let basis = SolutionBasis::Plain(Dimension::new(2.0).unwrap());
        let at = |lam: f64| {
            let v = basis.eval(lam).unwrap();
            (FunValue::pow_of(lam, 1.0) * v.l * v.k).value()
        };
        let lim_from = |base: f64| {
            richardson_limit(|h| at(base / h), 1.0, &[1.0, 2.0, 3.0], 1).0
        };
        assert_relative_eq!(lim_from(300.0), lim_from(600.0), max_relative = 1e-8);
    }

    #[test]
    fn bound_predictor_examples() {
        let (lo, hi) = kernel_bound_predictor(2.0, 2.0, 3.0, 1.0, 3.0).unwrap();
        assert_relative_eq!(lo, 1.5, max_relative = 1e-14);
        assert_relative_eq!(hi, 3.0, max_relative = 1e-14);

        let (lo, hi) = kernel_bound_predictor(3.0, 3.0, 3.0, 3.0, 3.0).unwrap();
        assert_relative_eq!(lo, 1.0, max_relative = 1e-14);
        assert!(hi.is_infinite());

        let (lo, hi) = kernel_bound_predictor(1.0, 1.0, 2.0, 0.0, 1.5).unwrap();
        assert_relative_eq!(lo, 1.5, max_relative = 1e-14);
        assert_relative_eq!(hi, 3.0, max_relative = 1e-14);

        assert!(kernel_bound_predictor(0.5, 0.5, 2.0, 2.0, 3.0).is_err());
    }
}

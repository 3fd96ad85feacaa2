//! Quadrature rules and small fitting utilities shared across the crate.

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; ample for the modest orders
/// (n <= 64) used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_pair(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable Gauss-Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Mapped nodes and weights for `[a, b]`, appended to `out`.
    pub fn extend_mapped(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((c + h * x, w * h));
        }
    }
}

/// Nodes/weights for `(lo, hi]` subdivided into `count` panels that shrink
/// geometrically toward `lo = hi * ratio^{-count}`; used for integrands with
/// power-law behaviour at the left endpoint.
pub fn geometric_panels(hi: f64, ratio: f64, count: usize, rule: &GaussRule) -> Vec<(f64, f64)> {
    assert!(hi > 0.0 && ratio > 1.0);
    let mut out = Vec::with_capacity(count * rule.len());
    let mut b = hi;
    for _ in 0..count {
        let a = b / ratio;
        rule.extend_mapped(a, b, &mut out);
        b = a;
    }
    out
}

/// Exp-sinh nodes/weights for `int_a^infty f`, tuned for integrands decaying
/// like `e^{-rate (lambda - a)}`. Returns `(lambda, weight)` pairs.
pub fn exp_sinh_tail(a: f64, rate: f64, levels: usize) -> Vec<(f64, f64)> {
    assert!(rate > 0.0);
    // lambda = a + (1/rate) * exp(sinh(u)); trapezoid in u.
    let h = 3.0 / levels as f64;
    let umax = 4.5_f64;
    let mut out = Vec::new();
    let mut u = -umax;
    while u <= umax + 1e-12 {
        let s = u.sinh();
        let e = s.exp();
        let lambda = a + e / rate;
        let w = h * u.cosh() * e / rate;
        out.push((lambda, w));
        u += h;
    }
    out
}

/// Least-squares slope of `ln(ys)` against `ln(xs)`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y != 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    fit_slope(&pts)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Limit of `f(h)` as `h -> 0+` when `f(h) = L + sum_i c_i h^{p_i} + ...`
/// with known exponent ladder `p_1 < p_2 < ...`.
///
/// Evaluates at `h0, h0/2, h0/4, ...` and eliminates the ladder terms one
/// level per exponent. Returns `(limit, error_estimate)`.
pub fn richardson_limit<F: FnMut(f64) -> f64>(
    mut f: F,
    h0: f64,
    exponents: &[f64],
    extra_levels: usize,
) -> (f64, f64) {
    let levels = exponents.len() + extra_levels;
    let mut table: Vec<f64> = (0..=levels).map(|i| f(h0 / 2f64.powi(i as i32))).collect();
    let mut last_correction = f64::INFINITY;
    for (k, p) in exponents.iter().enumerate() {
        let fac = 2f64.powf(*p);
        let mut next = Vec::with_capacity(table.len() - 1);
        for i in 0..table.len() - 1 {
            next.push((fac * table[i + 1] - table[i]) / (fac - 1.0));
        }
        if k == exponents.len() - 1 && next.len() >= 2 {
            last_correction = (next[next.len() - 1] - next[next.len() - 2]).abs();
        }
        table = next;
    }
    let limit = *table.last().unwrap();
    let err = if table.len() >= 2 {
        (table[table.len() - 1] - table[table.len() - 2]).abs()
    } else {
        last_correction
    };
    (limit, err)
}

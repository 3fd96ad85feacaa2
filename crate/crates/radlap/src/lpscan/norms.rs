//! `L^p -> L^p` operator-norm estimation on weighted grids: a fixed probe
//! family (always computed) and a dual-exponent power iteration.
//!
//! Estimates are lower bounds by construction; threshold verdicts are based
//! on growth across truncation radii, never on absolute values.

use super::grid::{GridFn, WeightedGrid};

/// Anything that acts as an integral operator on grid samples.
///
/// `n_active` restricts the operator (and all norms) to the nodes with
/// `|x|` below the current truncation radius; implementations must treat
/// entries past it as zero.
pub trait GridOperator: Sync {
    fn grid(&self) -> &WeightedGrid;

    /// `out = T f` over the active window.
    fn apply(&self, n_active: usize, f: &GridFn, out: &mut GridFn);

    /// `out = T^t f`, the kernel-transposed operator (adjoint with respect
    /// to the weighted pairing).
    fn apply_transpose(&self, n_active: usize, f: &GridFn, out: &mut GridFn);
}

/// A materialized kernel matrix (small grids, oracle tests, projectors).
///
/// Index layout: negative block by ascending `|x|` first, then positive.
pub struct DenseOperator<'g> {
    pub grid: &'g WeightedGrid,
    /// `entries[i][j] = K(x_i, y_j)`, kernel values without weights.
    pub entries: Vec<Vec<f64>>,
}

impl<'g> DenseOperator<'g> {
    pub fn from_kernel<F: Fn(f64, f64) -> f64>(grid: &'g WeightedGrid, kernel: F) -> Self {
        let pts = all_points(grid);
        let entries = pts
            .iter()
            .map(|&x| pts.iter().map(|&y| kernel(x, y)).collect())
            .collect();
        DenseOperator { grid, entries }
    }
}

/// Signed sample coordinates in block layout.
pub fn all_points(grid: &WeightedGrid) -> Vec<f64> {
    let mut pts = Vec::with_capacity(grid.total_len());
    if grid.domain.two_sided() {
        pts.extend(grid.pos.iter().map(|&x| -x));
    }
    pts.extend(grid.pos.iter().copied());
    pts
}

fn flatten(f: &GridFn) -> Vec<f64> {
    let mut v = Vec::with_capacity(f.neg.len() + f.pos.len());
    v.extend_from_slice(&f.neg);
    v.extend_from_slice(&f.pos);
    v
}

fn unflatten(grid: &WeightedGrid, v: &[f64], n_active: usize) -> GridFn {
    if grid.domain.two_sided() {
        GridFn { neg: v[..n_active].to_vec(), pos: v[n_active..].to_vec() }
    } else {
        GridFn { neg: Vec::new(), pos: v.to_vec() }
    }
}

impl GridOperator for DenseOperator<'_> {
    fn grid(&self) -> &WeightedGrid {
        self.grid
    }

    fn apply(&self, n_active: usize, f: &GridFn, out: &mut GridFn) {
        self.apply_impl(n_active, f, out, false);
    }

    fn apply_transpose(&self, n_active: usize, f: &GridFn, out: &mut GridFn) {
        self.apply_impl(n_active, f, out, true);
    }
}

impl DenseOperator<'_> {
    fn apply_impl(&self, n_active: usize, f: &GridFn, out: &mut GridFn, transpose: bool) {
        let grid = self.grid;
        let n = grid.len();
        let two = grid.domain.two_sided();
        let fv = flatten(f);
        // Map block slot -> full index in self.entries (built on full grid).
        let full_index = |slot: usize| -> usize {
            if !two {
                return slot;
            }
            if slot < n_active {
                // negative block, ascending |x| = descending x; entries use
                // the same block layout on the FULL grid.
                slot
            } else {
                n + (slot - n_active)
            }
        };
        let total = if two { 2 * n_active } else { n_active };
        let mut res = vec![0.0; total];
        for (si, r) in res.iter_mut().enumerate() {
            let i = full_index(si);
            let mut acc = 0.0;
            for (sj, &fj) in fv.iter().enumerate().take(total) {
                let j = full_index(sj);
                let k = if transpose { self.entries[j][i] } else { self.entries[i][j] };
                let wj = grid.w[if sj < n_active && two { sj } else if two { sj - n_active } else { sj }];
                acc += k * wj * fj;
            }
            *r = acc;
        }
        *out = unflatten(grid, &res, n_active);
    }
}

/// One norm estimate with provenance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: String,
    /// Set when the power iteration failed to settle and the probe family
    /// alone backs the value.
    pub warning: bool,
}

/// Options for [`op_norm_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    pub power_iterations: usize,
    pub use_power_iteration: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { power_iterations: 60, use_power_iteration: true }
    }
}

fn dual_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The fixed probe family: power laws around the critical exponent, the
/// `(y log y)^{-1}` tail probe, and per-decade indicator blocks, with even
/// and odd versions on two-sided grids.
fn probe_family(grid: &WeightedGrid, p: f64, n_active: usize) -> Vec<(String, GridFn)> {
    let d = grid.d;
    let crit = d / p;
    let mut probes = Vec::new();
    let sigma_list = [crit - 0.4, crit - 0.2, crit - 0.08, crit, crit + 0.08, crit + 0.2, crit + 0.4];
    let parities: &[f64] = if grid.domain.two_sided() { &[1.0, -1.0] } else { &[1.0] };
    for &parity in parities {
        let tag = if parity > 0.0 { "even" } else { "odd" };
        for &s in &sigma_list {
            let pos: Vec<f64> = grid.pos.iter().take(n_active).map(|&y| y.powf(-s)).collect();
            let neg: Vec<f64> = if grid.domain.two_sided() {
                pos.iter().map(|v| parity * v).collect()
            } else {
                Vec::new()
            };
            probes.push((format!("probe:power({s:.3},{tag})"), GridFn { neg, pos }));
        }
        let pos: Vec<f64> = grid
            .pos
            .iter()
            .take(n_active)
            .map(|&y| if y >= 2.0 { 1.0 / (y * y.ln()) } else { 0.0 })
            .collect();
        if pos.iter().any(|&v| v != 0.0) {
            let neg: Vec<f64> = if grid.domain.two_sided() {
                pos.iter().map(|v| parity * v).collect()
            } else {
                Vec::new()
            };
            probes.push((format!("probe:ylogy({tag})"), GridFn { neg, pos }));
        }
    }
    // Indicator blocks per decade.
    if n_active > 0 {
        let lo = grid.pos[0];
        let hi = grid.pos[n_active - 1];
        let decades = (hi / lo).log10().ceil() as usize;
        for k in 0..decades.min(14) {
            let a = lo * 10f64.powi(k as i32);
            let b = a * 10.0;
            let pos: Vec<f64> = grid
                .pos
                .iter()
                .take(n_active)
                .map(|&y| if y >= a && y < b { 1.0 } else { 0.0 })
                .collect();
            let neg = if grid.domain.two_sided() { pos.clone() } else { Vec::new() };
            probes.push((format!("probe:block(1e{k})"), GridFn { neg, pos }));
        }
    }
    probes
}

/// Lower-bound estimate of the `L^p -> L^p` operator norm over the active
/// window: best of the probe family and (optionally) the dual-exponent
/// power iteration started from the best probe.
pub fn op_norm_estimate<T: GridOperator>(
    op: &T,
    p: f64,
    n_active: usize,
    opts: &NormOptions,
) -> NormEstimate {
    assert!(p > 1.0, "op_norm_estimate requires p > 1");
    let grid = op.grid();
    let q = dual_exponent(p);

    let mut best = NormEstimate { value: 0.0, method: "probe:none".into(), warning: false };
    let mut best_fn: Option<GridFn> = None;
    let mut out = GridFn::zeros_like(grid);
    for (name, f) in probe_family(grid, p, n_active) {
        let fnorm = grid.lp_norm_active(&f, p, n_active);
        if fnorm == 0.0 || !fnorm.is_finite() {
            continue;
        }
        op.apply(n_active, &f, &mut out);
        let val = grid.lp_norm_active(&out, p, n_active) / fnorm;
        if val > best.value {
            best = NormEstimate { value: val, method: name, warning: false };
            best_fn = Some(f);
        }
    }

    if !opts.use_power_iteration {
        return best;
    }

    // Dual-exponent power iteration (ascent for the p-norm Rayleigh ratio).
    let mut f = match best_fn {
        Some(f) => f,
        None => return best,
    };
    let nf = grid.lp_norm_active(&f, p, n_active);
    f.scale(1.0 / nf);
    let mut last = best.value;
    let mut settled = false;
    let mut g = GridFn::zeros_like(grid);
    let mut h = GridFn::zeros_like(grid);
    for it in 0..opts.power_iterations {
        op.apply(n_active, &f, &mut g);
        let val = grid.lp_norm_active(&g, p, n_active);
        if !(val > 0.0) || !val.is_finite() {
            break;
        }
        if val > best.value {
            best = NormEstimate {
                value: val,
                method: "power-iteration".into(),
                warning: false,
            };
        }
        if it > 4 && (val - last).abs() <= 1e-7 * val {
            settled = true;
            break;
        }
        last = val;
        // Dual step: u = J_p(g), f <- J_{p'}(T^t u), renormalized.
        let jmap = |v: &mut Vec<f64>, e: f64| {
            for x in v.iter_mut() {
                *x = x.abs().powf(e - 1.0) * x.signum();
            }
        };
        let mut u = g.clone();
        jmap(&mut u.neg, p);
        jmap(&mut u.pos, p);
        op.apply_transpose(n_active, &u, &mut h);
        let mut fnext = h.clone();
        jmap(&mut fnext.neg, q);
        jmap(&mut fnext.pos, q);
        let nn = grid.lp_norm_active(&fnext, p, n_active);
        if !(nn > 0.0) || !nn.is_finite() {
            break;
        }
        fnext.scale(1.0 / nn);
        f = fnext;
    }
    if !settled && best.method == "power-iteration" {
        best.warning = true;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DomainShape;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn test_grid() -> WeightedGrid {
        WeightedGrid::new(DomainShape::Ray, 3.0, 1.0, 100.0, 24).unwrap()
    }

    #[test]
    fn p2_matches_singular_value_oracle() {
        let grid = test_grid();
        let op = DenseOperator::from_kernel(&grid, |x, y| {
            (x.min(y) / x.max(y)).powf(1.7) / (x * y).sqrt()
        });
        let n = grid.len();
        // Symmetrized matrix diag(sqrt w) K diag(sqrt w).
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = grid.w[i].sqrt() * op.entries[i][j] * grid.w[j].sqrt();
            }
        }
        let sigma = m.svd(false, false).singular_values[0];
        let est = op_norm_estimate(&op, 2.0, n, &NormOptions::default());
        assert_relative_eq!(est.value, sigma, max_relative = 1e-6);
    }

    #[test]
    fn duality_transpose_invariant() {
        let grid = test_grid();
        let op = DenseOperator::from_kernel(&grid, |x, y| {
            if x <= y { x.powf(-0.5) * y.powf(-2.3) } else { x.powf(-2.6) * y.powf(-0.4) }
        });
        let n = grid.len();
        let p = 2.5;
        let q = p / (p - 1.0);
        let primal = op_norm_estimate(&op, p, n, &NormOptions::default());
        // Transposed operator at the dual exponent.
        let t = DenseOperator {
            grid: &grid,
            entries: (0..n).map(|i| (0..n).map(|j| op.entries[j][i]).collect()).collect(),
        };
        let dual = op_norm_estimate(&t, q, n, &NormOptions::default());
        let rel = (primal.value - dual.value).abs() / primal.value;
        assert!(rel < 0.05, "duality gap {rel:.3}: {} vs {}", primal.value, dual.value);
    }

    #[test]
    fn probes_are_lower_bounds() {
        let grid = test_grid();
        let op = DenseOperator::from_kernel(&grid, |x, y| (-(x - y).abs()).exp() / (x + y));
        let n = grid.len();
        let no_power = op_norm_estimate(
            &op,
            3.0,
            n,
            &NormOptions { use_power_iteration: false, ..Default::default() },
        );
        let full = op_norm_estimate(&op, 3.0, n, &NormOptions::default());
        assert!(no_power.value <= full.value * (1.0 + 1e-12));
        assert!(no_power.method.starts_with("probe:"));
    }
}

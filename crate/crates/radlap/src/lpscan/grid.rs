//! Log-spaced quadrature grids carrying the weight `|r|^{d-1}`.

use crate::error::Error;
use crate::operators::DomainShape;
use crate::Result;

/// A log-spaced discretization of an operator domain.
///
/// Nodes are cell midpoints in log space over the positive part
/// `[inner, r_max]`; the weight of node `i` is the exact cell integral
/// `int |r|^{d-1} dr`, so `sum(weights)` matches the continuum mass to
/// rounding. Two-sided domains mirror the positive part; storage stays
/// one-sided and sampled functions carry separate negative/positive blocks.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    pub domain: DomainShape,
    pub d: f64,
    /// Positive nodes, strictly increasing.
    pub pos: Vec<f64>,
    /// Cell weights including the measure (per positive node; mirrored
    /// weights are identical by symmetry).
    pub w: Vec<f64>,
    /// Cell edges (len = pos.len() + 1).
    pub edges: Vec<f64>,
    pub inner: f64,
    pub r_max: f64,
    pub per_decade: usize,
}

/// A sampled function on a [`WeightedGrid`]: negative block by ascending
/// `|x|`, positive block by ascending `x`. One-sided grids leave `neg` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub neg: Vec<f64>,
    pub pos: Vec<f64>,
}

impl GridFn {
    pub fn zeros_like(grid: &WeightedGrid) -> Self {
        let n = grid.len();
        GridFn {
            neg: if grid.domain.two_sided() { vec![0.0; n] } else { Vec::new() },
            pos: vec![0.0; n],
        }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &WeightedGrid, f: F) -> Self {
        let pos = grid.pos.iter().map(|&x| f(x)).collect();
        let neg = if grid.domain.two_sided() {
            grid.pos.iter().map(|&x| f(-x)).collect()
        } else {
            Vec::new()
        };
        GridFn { neg, pos }
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.neg.iter_mut().chain(self.pos.iter_mut()) {
            *v *= c;
        }
    }

    pub fn truncate(&self, n: usize) -> GridFn {
        GridFn {
            neg: self.neg.iter().take(n).copied().collect(),
            pos: self.pos.iter().take(n).copied().collect(),
        }
    }
}

impl WeightedGrid {
    pub fn new(
        domain: DomainShape,
        d: f64,
        inner: f64,
        r_max: f64,
        per_decade: usize,
    ) -> Result<Self> {
        if !(d > 1.0) {
            return Err(Error::Domain(format!("grid dimension must exceed 1, got {d}")));
        }
        let inner = match domain {
            DomainShape::Ray | DomainShape::BrokenLine => 1.0,
            _ => {
                if !(inner > 0.0) {
                    return Err(Error::GridMismatch("half/full line grids need inner > 0".into()));
                }
                inner
            }
        };
        if !(r_max > inner) {
            return Err(Error::GridMismatch(format!("r_max {r_max} must exceed inner {inner}")));
        }
        let decades = (r_max / inner).log10();
        let n = ((decades * per_decade as f64).round() as usize).max(2);
        let mut edges = Vec::with_capacity(n + 1);
        for i in 0..=n {
            edges.push(inner * (r_max / inner).powf(i as f64 / n as f64));
        }
        let pos: Vec<f64> = (0..n).map(|i| (edges[i] * edges[i + 1]).sqrt()).collect();
        let w: Vec<f64> =
            edges.windows(2).map(|e| (e[1].powf(d) - e[0].powf(d)) / d).collect();
        Ok(WeightedGrid { domain, d, pos, w, edges, inner, r_max, per_decade })
    }

    /// Number of positive nodes.
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// Total number of sample points (both sides).
    pub fn total_len(&self) -> usize {
        if self.domain.two_sided() { 2 * self.len() } else { self.len() }
    }

    /// Number of positive nodes with `x <= r`.
    pub fn active_below(&self, r: f64) -> usize {
        self.pos.partition_point(|&x| x <= r)
    }

    /// Weighted `L^p` norm of a sampled function, over the first `n_active`
    /// nodes of each block.
    pub fn lp_norm_active(&self, f: &GridFn, p: f64, n_active: usize) -> f64 {
        assert!(p > 1.0, "lp_norm requires p > 1");
        let mut acc = 0.0;
        for (block, _) in [(&f.neg, -1.0), (&f.pos, 1.0)] {
            for (i, &v) in block.iter().enumerate().take(n_active) {
                acc += v.abs().powf(p) * self.w[i];
            }
        }
        acc.powf(1.0 / p)
    }

    pub fn lp_norm(&self, f: &GridFn, p: f64) -> f64 {
        self.lp_norm_active(f, p, self.len())
    }

    /// Weighted inner product over the first `n_active` nodes.
    pub fn dot_active(&self, f: &GridFn, g: &GridFn, n_active: usize) -> f64 {
        let mut acc = 0.0;
        for (bf, bg) in [(&f.neg, &g.neg), (&f.pos, &g.pos)] {
            for i in 0..n_active.min(bf.len()) {
                acc += bf[i] * bg[i] * self.w[i];
            }
        }
        acc
    }
}

//! Numerical toolkit for one-dimensional Laplace-type operators on the
//! weighted measure `|r|^(d-1) dr`, for real dimension parameter `d > 1`.
//!
//! The crate evaluates the special-function pair `k_d`, `l_d` (decaying and
//! growing solutions of `f'' + (d-1)/r f' = f`), assembles exact resolvent
//! kernels for a family of self-adjoint operators (half line, ray, broken
//! line, full line, inverse-square and junction-delta potentials), computes
//! Riesz transform kernels `grad L^{-1/2}` by spectral quadrature, and scans
//! weighted-grid operator norms to decide on which `L^p` spaces each Riesz
//! transform acts boundedly.
//!
//! Organization:
//! * [`specfun`] — modified Bessel evaluation and the `k`/`l` solution pair.
//! * [`operators`] — operator families (a name-keyed strategy registry) and
//!   their closed-form resolvent kernels.
//! * [`riesz`] — Riesz kernels, convolution profiles, pointwise bounds.
//! * [`lpscan`] — weighted grids, discretized operators, `L^p` operator-norm
//!   estimation and bounded/divergent threshold scans.
//! * [`hodge`] — Hodge projectors for divergence-form operators `d_x a d_x`.

pub mod error;
pub mod hodge;
pub mod logval;
pub mod lpscan;
pub mod operators;
pub mod quad;
pub mod riesz;
pub mod specfun;

pub use error::Error;
pub use logval::FunValue;

/// Shorthand result type used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

//! Weighted grids, discretized operators, `L^p` norm estimation and the
//! bounded/divergent threshold scans.

pub mod fem;
pub mod grid;
pub mod normcheck;
pub mod norms;
pub mod rieszgrid;
pub mod scan;

pub use fem::{resolvent_cross_check, DiscreteOperator, Tridiag, TridiagFactor};
pub use grid::{GridFn, WeightedGrid};
pub use normcheck::riesz_normalization_check;
pub use norms::{all_points, op_norm_estimate, DenseOperator, GridOperator, NormEstimate, NormOptions};
pub use rieszgrid::{RieszGridOperator, ScanKernel};
pub use scan::{threshold_scan, ScanConfig, ScanReport, ScanRow, Verdict};

//! Special functions: modified Bessel evaluation and the `k`/`l` pair.

pub mod bessel;
mod gamma;
pub mod kl;

pub use bessel::{bessel_ik, BesselIk};
pub use kl::{
    a_zero_limit, d_zero_limit, little_kl, little_kl_potential, ratios, ratios_of, sign_profile,
    wronskian_constant, wronskian_product, Dimension, KlValues, PotentialParams, Ratios,
    SignReport, SolutionBasis,
};

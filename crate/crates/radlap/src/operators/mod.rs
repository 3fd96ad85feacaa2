//! Operator families and their exact resolvent kernels.

pub mod family;
pub mod resolvent;

pub use family::{
    isq_window, lookup, projected_delta_window, Couplings, DomainShape, FamilyKind,
    FamilyStrategy, KernelCtx, OperatorSpec, REGISTRY,
};
pub use resolvent::{
    apply_resolvent, delta_pole_bracket, delta_potential_d, dx_resolvent_kernel,
    rank_one_correction, resolvent_kernel, Branch, ResolventEval,
};

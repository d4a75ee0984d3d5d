//! Bounds on the inclusion volume fraction `f₁` from measured `A`, `M`, `A′`
//! and the g-functional.
//!
//! Upper bounds come from Dirichlet data, lower bounds from Neumann data.
//! Every bound is clamped to `[0, 1]` with its raw value retained.

mod feasibility;
mod gfunc;
mod lower;
mod quasiconvex;
mod report;
mod upper;

pub use feasibility::{feasibility_interval, feasibility_tensor, Feasibility, ScanOptions, ScanPoint};
pub use gfunc::{
    face_poisson_diagnostic, g_exact, g_from_potentials, g_lower_from_exterior, g_special_neumann, FacePotentials,
    FaceSamples, GSource, GValue, GENERATOR_TOLERANCE,
};
pub use lower::{lower_bound_general, lower_bound_special_neumann, SpecialNeumannBounds};
pub use quasiconvex::{
    curl_field, periodic_difference, periodic_divergence, potential_form_field, quasiconvexity_check,
    Quasiconvexity, DIVERGENCE_TOLERANCE,
};
pub use report::{
    evaluate, BoundInputs, BoundReport, DirichletInputs, LimitDiscrepancy, NeumannInputs, FEASIBILITY_SLACK,
};
pub use upper::{
    hashin_shtrikman_lower, pairwise_bound_affine, trace_bound_matrix, upper_bound_special, upper_bound_trace,
    BoundValue, AFFINE_M_TOLERANCE, SPECTRUM_TOLERANCE,
};

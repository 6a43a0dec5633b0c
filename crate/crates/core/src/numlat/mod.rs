//! Number fields, hermitian lattices over imaginary quadratic fields, and the
//! finite combinatorics of lattice-point decompositions.

mod fiber;
mod grouping;
mod imagquad;
mod lattice;
mod numfield;
mod tracelem;

pub use fiber::{closure, fiber_product_decomposition, FiberReport, FiniteActionModel};
pub use grouping::{beta_grouping_check, BetaCount, GroupingReport};
pub use imagquad::{ImagQuad, E0};
pub use lattice::{HermitianLattice, LatticeJson, Vector};
pub use numfield::{identity, invert_rational, FieldJson, NumberFieldBasis, RatMatrix};
pub use tracelem::{
    assemble_xi, e_conj, e_mul, e_trace, extended_form, random_e0, random_hermitian, trace_identity_check,
    trace_identity_samples, ElementE, TraceIdentity, TraceReport, XiBasis,
};

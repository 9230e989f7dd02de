//! Polynomial-method quantities: monomial-space dimensions, their
//! closed-form bound, and sets avoiding a linear equation on non-constant
//! tuples.

pub mod dim;
pub mod petrov;

pub use dim::{
    dim_exact, dim_inclusion_exclusion, hoeffding_dim_bound, sweep_dim_bound, sweep_dim_bound_grid, DegreeProfile,
    DimBoundCheck, MonomialSpaceParams,
};
pub use petrov::{
    petrov_cardinality_bound, petrov_max_search, petrov_verify, BoundForm, PetrovCheck,
    PetrovInstance,
};

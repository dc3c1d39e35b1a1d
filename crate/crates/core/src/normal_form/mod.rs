//! Iterated normal form reduction in interaction variables.

pub mod bounds;
pub mod operators;
pub mod picard;
pub mod residual;
pub mod series;
pub mod tuple;

pub use bounds::{
    boundary_bound, boundary_tail, fl_boundary_bound, fl_lipschitz_bound, growth_factor, remainder_bound,
    resonant_bound, series_constant, ContractionConstants,
};
pub use operators::{
    boundary_sum, boundary_term, boundary_term_to, mean_square_at, remainder_term, remainder_term_to,
    resonant_part_of_remainder, resonant_term, term_coefficient, Method, DIRECT_MAX_ARITY, DIRECT_MAX_K,
};
pub use picard::{picard_solve, picard_solve_with, PicardOptions, PicardReport};
pub use residual::{finite_reduction_residual, ReductionResidual};
pub use series::{normal_form_series, NFSeries};
pub use tuple::{modulation, ModTuple};

//! Truncated mean-zero Fourier states, grid transforms, Fourier-Lebesgue
//! norms and the zeta-valued constants.

pub mod constants;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod state;

pub use constants::{embedding_constant, riemann_zeta, riemann_zeta_certified, young_constant, ZetaValue};
pub use grid::{
    grid_point, grid_to_state, grid_transform, oversampled_grid_size, GridField, GridOptions, ALIAS_TOL, MEAN_TOL,
};
pub use norms::{fl_norm, l2_norm, pairwise_sum, FLParams, Regime};
pub use ops::{derivative, mean_square, mean_square_any, mean_square_interaction, primitive};
pub use state::{dispersion_phase, fixed_order, Representation, SpectralState};

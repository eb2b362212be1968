//! Discrete ill-posed problems through the augmented system
//! `[[I, A], [-Aᵀ, μ²I]] (e; f) = (g; 0)`.

mod augmented;
mod fov;
mod regularization;

pub use augmented::{
    build_nonregularized_split, build_regularized_split, AugmentedSystem, OmegaInner, OmegaSkewOperator,
    OmegaSkewSolver,
};
pub use fov::{
    check_gamma_condition, fov_bound_interval, fov_numeric_imag_extent, fov_numeric_real_extremes, gamma_star,
    FovInterval, GammaStar,
};
pub use regularization::{
    add_noise, discrepancy_stop, gcv_select_mu, gcv_select_mu_grid, tikhonov_direct, NoiseModel, StoppingRule,
};

//! Dense linear algebra kernels and seeded sampling.

mod decomp;
mod matrix;
mod random;

pub use decomp::{
    cholesky, condition_estimate, numerical_rank, qr_thin, singular_values, solve_spd, svd, Svd,
};
pub use matrix::{rel_distance, Matrix};
pub use random::{sample_gaussian, SeedState};

pub(crate) use random::gaussian_from;

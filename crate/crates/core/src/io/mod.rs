//! Text formats for matrices and datasets, and seeded random generators.

mod format;
mod random;

pub use format::{parse_dataset, parse_matrix, serialize_dataset, serialize_matrix};
pub use random::{
    clustered_dataset, isotropic_dataset, random_dataset, random_matrix, random_matrix_with_singular_values,
    random_orthogonal, random_spd, random_spd_with_spectrum, rng_from_seed,
};

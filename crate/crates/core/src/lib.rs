//! Spectral sums of matrices and eigenvalue-only bounds on spectral sums of
//! products, with applications to Schatten quasi-norms, affine-invariant SPD
//! distances, Alpha-Beta log-det divergences and pruned nearest-neighbor
//! search.
//!
//! Singular values and eigenvalues are always sorted non-increasing.

pub mod error;
pub mod function;
pub mod io;
pub mod knn;
pub mod linalg;
pub mod rearrange;
pub mod schatten;
pub mod spd_geometry;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use function::{ScalarFunction, SfPrimeClass};
pub use knn::{SpdDataset, SpectraCache};
pub use linalg::{Matrix, SpdMatrix};
pub use rearrange::{BoundsReport, Orientation};
pub use spd_geometry::{AbParams, AbRegime};

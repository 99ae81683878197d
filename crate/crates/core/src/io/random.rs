use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::knn::SpdDataset;
use crate::linalg::{Matrix, SpdMatrix};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` absorbed into `Q`.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Matrix {
    let qr = gaussian(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Matrix::from_raw(q)
}

/// Standard Gaussian entries.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_raw(gaussian(rows, cols, rng))
}

/// `U diag(sv) V^T` with Haar `U`, `V`; `sv` has `min(rows, cols)` entries.
pub fn random_matrix_with_singular_values(rows: usize, cols: usize, sv: &[f64], rng: &mut impl Rng) -> Result<Matrix> {
    if sv.len() != rows.min(cols) {
        return Err(Error::InvalidInput(format!("need {} singular values, got {}", rows.min(cols), sv.len())));
    }
    let u = random_orthogonal(rows, rng).into_dmatrix();
    let v = random_orthogonal(cols, rng).into_dmatrix();
    let mut d = DMatrix::zeros(rows, cols);
    for (i, s) in sv.iter().enumerate() {
        d[(i, i)] = *s;
    }
    Matrix::from_dmatrix(u * d * v.transpose())
}

/// `Q diag(eigenvalues) Q^T` with Haar `Q`.
pub fn random_spd_with_spectrum(eigenvalues: &[f64], rng: &mut impl Rng) -> Result<SpdMatrix> {
    let n = eigenvalues.len();
    let q = random_orthogonal(n, rng).into_dmatrix();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues));
    let m = &q * d * q.transpose();
    SpdMatrix::new(Matrix::from_dmatrix((&m + m.transpose()) * 0.5)?)
}

/// SPD matrix with log-eigenvalues uniform in `[-log sqrt(kappa), log sqrt(kappa)]`.
pub fn random_spd(n: usize, seed: u64, condition_target: f64) -> Result<SpdMatrix> {
    let mut rng = rng_from_seed(seed);
    random_spd_from(n, condition_target, &mut rng)
}

pub(crate) fn random_spd_from(n: usize, condition_target: f64, rng: &mut impl Rng) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !(condition_target >= 1.0) || !condition_target.is_finite() {
        return Err(Error::InvalidParameter(format!("condition target must be >= 1, got {condition_target}")));
    }
    let h = condition_target.sqrt().ln();
    let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-h..=h).exp()).collect();
    random_spd_with_spectrum(&eigs, rng)
}

/// `count` independent SPD matrices drawn like [`random_spd`], ids `0..count`.
pub fn random_dataset(count: usize, n: usize, seed: u64, condition_target: f64) -> Result<SpdDataset> {
    let mut rng = rng_from_seed(seed);
    let items = (0..count)
        .map(|_| random_spd_from(n, condition_target, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    SpdDataset::from_items(items)
}

/// `c_k I_n` for each scale.
pub fn isotropic_dataset(scales: &[f64], n: usize) -> Result<SpdDataset> {
    let items = scales
        .iter()
        .map(|c| SpdMatrix::new(Matrix::identity(n).scale(*c)?))
        .collect::<Result<Vec<_>>>()?;
    SpdDataset::from_items(items)
}

/// Two clusters around `C` and `e^separation C` for a random SPD centre `C`:
/// each item is `C^1/2 Exp(S) C^1/2` (scaled for the second cluster) with
/// `S` symmetric Gaussian of entry scale `spread`. Items alternate between
/// clusters.
pub fn clustered_dataset(count: usize, n: usize, seed: u64, spread: f64, separation: f64) -> Result<SpdDataset> {
    let mut rng = rng_from_seed(seed);
    let centre = random_spd_from(n, 10.0, &mut rng)?;
    let half = crate::linalg::spd_power(&centre, 0.5)?.as_matrix().clone().into_dmatrix();
    let mut items = Vec::with_capacity(count);
    for k in 0..count {
        let g = gaussian(n, n, &mut rng);
        let s = Matrix::from_dmatrix((&g + g.transpose()) * (0.5 * spread))?;
        let e = crate::linalg::sym_exp(&s)?.as_matrix().clone().into_dmatrix();
        let scale = if k % 2 == 0 { 1.0 } else { separation.exp() };
        let m = &half * e * &half * scale;
        items.push(SpdMatrix::new(Matrix::from_dmatrix((&m + m.transpose()) * 0.5)?)?);
    }
    SpdDataset::from_items(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = rng_from_seed(3);
        let q = random_orthogonal(5, &mut rng).into_dmatrix();
        assert!((q.transpose() * &q - DMatrix::identity(5, 5)).abs().max() < 1e-13);
    }

    #[test]
    fn spd_is_deterministic() {
        let a = random_spd(4, 11, 100.0).unwrap();
        let b = random_spd(4, 11, 100.0).unwrap();
        assert_eq!(a.as_matrix(), b.as_matrix());
        assert_ne!(a.as_matrix(), random_spd(4, 12, 100.0).unwrap().as_matrix());
    }

    #[test]
    fn spd_condition_range() {
        for seed in 0..50 {
            let p = random_spd(4, seed, 100.0).unwrap();
            let l = p.eigenvalues();
            let cond = l[0] / l[3];
            assert!((1.0..=100.0 * (1.0 + 1e-9)).contains(&cond), "cond {cond}");
        }
        let p = random_spd(3, 5, 1.0).unwrap();
        let l = p.eigenvalues();
        assert!((l[0] - l[2]).abs() < 1e-14);
        assert!(random_spd(0, 1, 2.0).is_err());
        assert!(random_spd(2, 1, 0.5).is_err());
    }

    #[test]
    fn prescribed_singular_values() {
        let mut rng = rng_from_seed(1);
        let x = random_matrix_with_singular_values(3, 5, &[3.0, 2.0, 0.5], &mut rng).unwrap();
        let sv = crate::linalg::singular_values(&x).unwrap();
        for (a, b) in sv.iter().zip([3.0, 2.0, 0.5]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn dataset_generators() {
        let ds = random_dataset(50, 3, 9, 20.0).unwrap();
        assert_eq!(ds.len(), 50);
        let again = random_dataset(50, 3, 9, 20.0).unwrap();
        assert!(ds.items().iter().zip(again.items()).all(|(a, b)| a.as_matrix() == b.as_matrix()));
        let iso = isotropic_dataset(&[1.0, 2.0], 2).unwrap();
        assert_eq!(iso.items()[1].eigenvalues(), &[2.0, 2.0]);
        let cl = clustered_dataset(20, 3, 4, 0.05, 4.0).unwrap();
        assert_eq!(cl.len(), 20);
    }
}

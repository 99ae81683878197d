//! Dense factorizations and matrix functions.
//!
//! Everything downstream consumes spectra through [`svd`] and [`sym_eig`],
//! which return sorted (non-increasing) values with a fixed sign convention
//! on the vectors so repeated runs produce identical factors.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen, QR};

use crate::error::{Error, Result};

/// Relative tolerance on `max |S - S^T|` accepted by the symmetric routines.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense real matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{:?}", self.rows(), self.cols(), self.to_row_major())
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!("empty shape {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(r, c, &flat)
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if let Some(bad) = m.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {bad}")));
        }
        Ok(Matrix(m))
    }

    pub(crate) fn from_raw(m: DMatrix<f64>) -> Self {
        Matrix(m)
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        Self::from_dmatrix(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Matrix::from_dmatrix(&self.0 * &rhs.0)
    }

    /// `self + eps * rhs`.
    pub fn add_scaled(&self, rhs: &Matrix, eps: f64) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::InvalidInput(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Matrix::from_dmatrix(&self.0 + &rhs.0 * eps)
    }

    pub fn scale(&self, c: f64) -> Result<Matrix> {
        Matrix::from_dmatrix(&self.0 * c)
    }

    /// Trace inner product `Tr(self^T rhs)`.
    pub fn inner(&self, rhs: &Matrix) -> Result<f64> {
        if self.shape() != rhs.shape() {
            return Err(Error::InvalidInput(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(self.0.dot(&rhs.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `max |a_ij - a_ji|`; infinite for non-square input.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)]).abs());
            }
        }
        worst
    }
}

/// Symmetric positive definite matrix with its eigendecomposition cached.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    base: Matrix,
    eig: EigFactorization,
}

impl SpdMatrix {
    /// Accepts a symmetric matrix whose smallest eigenvalue exceeds
    /// `n * eps * lambda_max`.
    pub fn new(m: Matrix) -> Result<Self> {
        let eig = sym_eig(&m)?;
        let n = m.rows() as f64;
        let lmax = eig.eigenvalues[0];
        let lmin = *eig.eigenvalues.last().unwrap();
        if !(lmax > 0.0) || lmin <= n * f64::EPSILON * lmax {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: lmin });
        }
        Ok(SpdMatrix { base: symmetrize(&m), eig })
    }

    /// Relaxed constructor for positive semidefinite input: eigenvalues down
    /// to `-n * eps * lambda_max` are floored to zero.
    pub fn new_semidefinite(m: Matrix) -> Result<Self> {
        let mut eig = sym_eig(&m)?;
        let n = m.rows() as f64;
        let lmax = eig.eigenvalues[0].max(0.0);
        let floor = n * f64::EPSILON * lmax;
        let lmin = *eig.eigenvalues.last().unwrap();
        if lmin < -floor {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: lmin });
        }
        for l in eig.eigenvalues.iter_mut() {
            if *l <= floor {
                *l = 0.0;
            }
        }
        Ok(SpdMatrix { base: symmetrize(&m), eig })
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_row_slice(n, n, entries)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(diag)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.base
    }

    pub fn eig(&self) -> &EigFactorization {
        &self.eig
    }

    /// Eigenvalues sorted non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    /// Natural logs of the eigenvalues, non-increasing.
    pub fn log_eigenvalues(&self) -> Vec<f64> {
        self.eig.eigenvalues.iter().map(|l| l.ln()).collect()
    }

    pub fn is_definite(&self) -> bool {
        self.eig.eigenvalues.last().is_some_and(|l| *l > 0.0)
    }

    /// `M self M^T` for square `M`.
    pub fn congruence(&self, m: &Matrix) -> Result<SpdMatrix> {
        let out = m.matmul(&self.base)?.matmul(&m.transpose())?;
        SpdMatrix::new(out)
    }
}

/// `X = U diag(sigma) V1^T` in the wide orientation (`rows <= cols`).
///
/// Tall inputs are factored as their transpose; [`SvdFactorization::transposed`]
/// records that, and [`SvdFactorization::reconstruct`] undoes it.
#[derive(Clone, Debug)]
pub struct SvdFactorization {
    /// `m x m` orthogonal.
    pub u: Matrix,
    /// Length `m`, non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    /// `n x n` orthogonal; the first `m` columns are `V1`.
    pub v: Matrix,
    pub transposed: bool,
}

impl SvdFactorization {
    /// First `m` columns of `V`.
    pub fn v1(&self) -> Matrix {
        let m = self.u.rows();
        Matrix::from_raw(self.v.0.columns(0, m).into_owned())
    }

    /// Remaining `n - m` columns of `V` (empty-column matrix is returned as `None`).
    pub fn v2(&self) -> Option<Matrix> {
        let m = self.u.rows();
        let n = self.v.rows();
        (n > m).then(|| Matrix::from_raw(self.v.0.columns(m, n - m).into_owned()))
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn min_singular_value(&self) -> f64 {
        *self.singular_values.last().unwrap()
    }

    /// `max(m, n) * eps * sigma_max`.
    pub fn rank_tolerance(&self) -> f64 {
        let big = self.u.rows().max(self.v.rows()) as f64;
        big * f64::EPSILON * self.max_singular_value()
    }

    pub fn is_full_rank(&self) -> bool {
        self.min_singular_value() > self.rank_tolerance()
    }

    pub fn require_full_rank(&self) -> Result<()> {
        if self.is_full_rank() {
            Ok(())
        } else {
            Err(Error::RankDeficient {
                min_singular_value: self.min_singular_value(),
                tolerance: self.rank_tolerance(),
            })
        }
    }

    /// Re-multiplies the factors in the input's original orientation.
    pub fn reconstruct(&self) -> Matrix {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(
            &self.singular_values,
        ));
        let wide = &self.u.0 * s * self.v1().0.transpose();
        Matrix::from_raw(if self.transposed { wide.transpose() } else { wide })
    }
}

/// `S = Q diag(lambda) Q^T` with `lambda` non-increasing.
#[derive(Clone, Debug)]
pub struct EigFactorization {
    pub q: Matrix,
    pub eigenvalues: Vec<f64>,
}

impl EigFactorization {
    pub fn reconstruct(&self) -> Matrix {
        self.apply(|l| l)
    }

    /// `Q diag(g(lambda)) Q^T`.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> Matrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.q.0.clone();
        for j in 0..n {
            let gj = g(self.eigenvalues[j]);
            scaled.column_mut(j).scale_mut(gj);
        }
        Matrix::from_raw(scaled * self.q.0.transpose())
    }
}

fn symmetrize(m: &Matrix) -> Matrix {
    Matrix::from_raw((&m.0 + m.0.transpose()) * 0.5)
}

/// Flips each column so its largest-magnitude entry is non-negative
/// (first index wins ties). Returns the applied signs.
fn canonical_column_signs(m: &mut DMatrix<f64>) -> Vec<f64> {
    let mut signs = Vec::with_capacity(m.ncols());
    for mut col in m.column_iter_mut() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for v in col.iter() {
            if v.abs() > best.abs() {
                best = *v;
            }
        }
        if best < 0.0 {
            col.neg_mut();
            sign = -1.0;
        }
        signs.push(sign);
    }
    signs
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

fn permute_columns(m: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

/// Orthonormal completion of the columns of `v1` (`n x m`, orthonormal) to
/// an `n x n` orthogonal matrix whose first `m` columns are exactly `v1`.
fn complete_basis(v1: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = v1.shape();
    if m == n {
        return v1.clone();
    }
    let mut stacked = DMatrix::zeros(n, m + n);
    stacked.columns_mut(0, m).copy_from(v1);
    stacked.columns_mut(m, n).fill_with_identity();
    let q = QR::new(stacked).q();
    let mut out = DMatrix::zeros(n, n);
    out.columns_mut(0, m).copy_from(v1);
    out.columns_mut(m, n - m).copy_from(&q.columns(m, n - m));
    out
}

/// One-sided Jacobi on the columns of `wide^T` (`n x m`, `m <= n`).
///
/// Rotating column pairs of `A = wide^T` until they are mutually orthogonal
/// gives `A J = B`, so `wide = J diag(|b_j|) (b_j / |b_j|)^T`. Returns the
/// unsorted `(J, sigma, B normalized)`; columns with zero norm stay zero.
fn jacobi_svd(wide: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let m = wide.nrows();
    let mut a = wide.transpose();
    let mut j = DMatrix::<f64>::identity(m, m);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s);
                rotate_columns(&mut j, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = Vec::with_capacity(m);
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
        sigma.push(norm);
    }
    (j, sigma, a)
}

const JACOBI_MAX_SWEEPS: usize = 80;

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

/// Full singular value decomposition with sorted values and canonical signs.
pub fn svd(x: &Matrix) -> Result<SvdFactorization> {
    if x.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry".into()));
    }
    let transposed = x.rows() > x.cols();
    let wide = if transposed { x.0.transpose() } else { x.0.clone() };
    let m = wide.nrows();

    let (u_raw, sv_raw, v_raw) = jacobi_svd(&wide);
    let order = descending_order(&sv_raw);
    let singular_values: Vec<f64> = order.iter().map(|&i| sv_raw[i]).collect();
    let mut u = permute_columns(&u_raw, &order);
    let mut v1 = permute_columns(&v_raw, &order);

    let signs = canonical_column_signs(&mut u);
    for (j, s) in signs.iter().enumerate() {
        if *s < 0.0 {
            v1.column_mut(j).neg_mut();
        }
    }
    // Exactly-zero singular values leave zero columns; any orthonormal
    // completion of the others serves as their right vectors.
    let live = singular_values.iter().take_while(|s| **s > 0.0).count();
    let v = if live == m {
        complete_basis(&v1)
    } else {
        let full = complete_basis(&v1.columns(0, live).into_owned());
        let mut v = full.clone();
        v.columns_mut(0, live).copy_from(&v1.columns(0, live));
        v
    };

    Ok(SvdFactorization {
        u: Matrix::from_raw(u),
        singular_values,
        v: Matrix::from_raw(v),
        transposed,
    })
}

/// Singular values only, non-increasing, length `min(rows, cols)`.
pub fn singular_values(x: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(x)?.singular_values)
}

fn check_symmetric(s: &Matrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::InvalidInput(format!(
            "expected a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let asym = s.asymmetry();
    let tolerance = SYMMETRY_TOLERANCE * s.max_abs();
    if asym > tolerance {
        return Err(Error::NotSymmetric { asymmetry: asym, tolerance });
    }
    Ok(())
}

/// Symmetric eigendecomposition; the input is symmetrized first.
pub fn sym_eig(s: &Matrix) -> Result<EigFactorization> {
    check_symmetric(s)?;
    let dec = SymmetricEigen::new(symmetrize(s).0);
    let raw: Vec<f64> = dec.eigenvalues.iter().copied().collect();
    let order = descending_order(&raw);
    let eigenvalues = order.iter().map(|&i| raw[i]).collect();
    let mut q = permute_columns(&dec.eigenvectors, &order);
    canonical_column_signs(&mut q);
    Ok(EigFactorization { q: Matrix::from_raw(q), eigenvalues })
}

/// Eigenvalues only, non-increasing.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(s)?;
    let mut ev: Vec<f64> = symmetrize(s).0.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `P^t` through the eigendecomposition.
pub fn spd_power(p: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent {t}")));
    }
    if t == 1.0 {
        return Ok(p.clone());
    }
    if t == 0.0 {
        return Ok(SpdMatrix::identity(p.dim()));
    }
    if t < 0.0 && !p.is_definite() {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: *p.eigenvalues().last().unwrap(),
        });
    }
    let out = p.eig.apply(|l| if l == 0.0 { 0.0 } else { l.powf(t) });
    let eigenvalues: Vec<f64> = p
        .eig
        .eigenvalues
        .iter()
        .map(|l| if *l == 0.0 { 0.0 } else { l.powf(t) })
        .collect();
    // Negative exponents reverse the order; keep the cached spectrum sorted.
    let mut pairs: Vec<(f64, usize)> = eigenvalues.iter().copied().zip(0..).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let q = permute_columns(&p.eig.q.0, &order);
    Ok(SpdMatrix {
        base: symmetrize(&out),
        eig: EigFactorization {
            q: Matrix::from_raw(q),
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
        },
    })
}

/// Principal logarithm of an SPD matrix.
pub fn spd_log(p: &SpdMatrix) -> Result<Matrix> {
    if !p.is_definite() {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: *p.eigenvalues().last().unwrap(),
        });
    }
    Ok(symmetrize(&p.eig.apply(f64::ln)))
}

/// Exponential of a symmetric matrix.
pub fn sym_exp(s: &Matrix) -> Result<SpdMatrix> {
    let eig = sym_eig(s)?;
    SpdMatrix::new(eig.apply(f64::exp))
}

/// Symmetric embedding `[[0, X], [X^T, 0]]`.
pub fn dilation(x: &Matrix) -> Matrix {
    let (m, n) = x.shape();
    let mut out = DMatrix::zeros(m + n, m + n);
    out.view_mut((0, m), (m, n)).copy_from(&x.0);
    out.view_mut((m, 0), (n, m)).copy_from(&x.0.transpose());
    Matrix::from_raw(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.shape() == b.shape() && (&a.0 - &b.0).amax() <= tol
    }

    #[test]
    fn svd_diagonal() {
        let x = Matrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let f = svd(&x).unwrap();
        assert_eq!(f.singular_values, vec![3.0, 1.0]);
        assert!(approx_eq(&f.u, &Matrix::identity(2), 1e-15));
        assert!(approx_eq(&f.v, &Matrix::identity(2), 1e-15));
    }

    #[test]
    fn svd_sorts_unsorted_diagonal() {
        let x = Matrix::from_diagonal(&[1.0, 5.0, 2.0]).unwrap();
        let f = svd(&x).unwrap();
        assert_eq!(f.singular_values, vec![5.0, 2.0, 1.0]);
        assert!(approx_eq(&f.reconstruct(), &x, 1e-14));
    }

    #[test]
    fn svd_identity() {
        let f = svd(&Matrix::identity(4)).unwrap();
        assert!(f.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn svd_tall_input_is_transposed() {
        let x = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let f = svd(&x).unwrap();
        assert!(f.transposed);
        assert_eq!(f.u.shape(), (2, 2));
        assert_eq!(f.v.shape(), (3, 3));
        assert!(approx_eq(&f.reconstruct(), &x, 1e-13));
    }

    #[test]
    fn svd_sign_convention() {
        let x = Matrix::from_row_slice(2, 3, &[-1.0, 2.0, 0.5, 3.0, -0.2, 1.0]).unwrap();
        let f = svd(&x).unwrap();
        for col in f.u.0.column_iter() {
            let big = col.iter().fold(0.0_f64, |b, v| if v.abs() > b.abs() { *v } else { b });
            assert!(big >= 0.0);
        }
    }

    #[test]
    fn svd_rejects_non_finite() {
        let m = Matrix::from_raw(DMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]));
        assert!(matches!(svd(&m), Err(Error::InvalidInput(_))));
        assert!(Matrix::from_row_slice(1, 2, &[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn eig_diagonal_and_exchange() {
        let d = Matrix::from_diagonal(&[1.0, 5.0, 2.0]).unwrap();
        assert_eq!(sym_eig(&d).unwrap().eigenvalues, vec![5.0, 2.0, 1.0]);
        let x = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = sym_eig(&x).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let x = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]).unwrap();
        assert!(matches!(sym_eig(&x), Err(Error::NotSymmetric { .. })));
        let tiny = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-15, 1.0]).unwrap();
        assert!(sym_eig(&tiny).is_ok());
    }

    #[test]
    fn spd_power_closed_forms() {
        let p = SpdMatrix::new(Matrix::identity(2).scale(4.0).unwrap()).unwrap();
        let r = spd_power(&p, 0.5).unwrap();
        assert!(approx_eq(r.as_matrix(), &Matrix::identity(2).scale(2.0).unwrap(), 1e-15));

        let d = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = spd_power(&d, -0.5).unwrap();
        let expect = Matrix::from_diagonal(&[0.5, 1.0 / 3.0]).unwrap();
        assert!(approx_eq(r.as_matrix(), &expect, 1e-15));
        assert_eq!(r.eigenvalues(), &[0.5, 1.0 / 3.0]);

        assert!(approx_eq(spd_power(&d, 0.0).unwrap().as_matrix(), &Matrix::identity(2), 0.0));
        assert!(approx_eq(spd_power(&d, 1.0).unwrap().as_matrix(), d.as_matrix(), 0.0));
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(SpdMatrix::new(m.clone()), Err(Error::NotPositiveDefinite { .. })));
        assert!(SpdMatrix::new_semidefinite(m).is_err());
        let psd = Matrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let p = SpdMatrix::new_semidefinite(psd).unwrap();
        assert!(!p.is_definite());
        assert!(spd_power(&p, 0.5).is_ok());
        assert!(matches!(spd_power(&p, -1.0), Err(Error::NotPositiveDefinite { .. })));
        assert!(spd_log(&p).is_err());
    }

    #[test]
    fn spd_log_closed_forms() {
        let l = spd_log(&SpdMatrix::identity(3)).unwrap();
        assert_eq!(l.max_abs(), 0.0);
        let e = std::f64::consts::E;
        let d = SpdMatrix::from_diagonal(&[e, e * e]).unwrap();
        let l = spd_log(&d).unwrap();
        assert!(approx_eq(&l, &Matrix::from_diagonal(&[1.0, 2.0]).unwrap(), 1e-15));
    }

    #[test]
    fn dilation_scalar_and_row() {
        let x = Matrix::from_row_slice(1, 1, &[2.5]).unwrap();
        let d = dilation(&x);
        assert_eq!(d.to_row_major(), vec![0.0, 2.5, 2.5, 0.0]);
        let ev = sym_eigenvalues(&d).unwrap();
        assert!((ev[0] - 2.5).abs() < 1e-15 && (ev[1] + 2.5).abs() < 1e-15);

        // [a b] -> characteristic polynomial t (t^2 - (a^2 + b^2))
        let (a, b) = (3.0, 4.0);
        let d = dilation(&Matrix::from_row_slice(1, 2, &[a, b]).unwrap());
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d.asymmetry(), 0.0);
        let ev = sym_eigenvalues(&d).unwrap();
        let r = (a * a + b * b).sqrt();
        assert!((ev[0] - r).abs() < 1e-14);
        assert!(ev[1].abs() < 1e-14);
        assert!((ev[2] + r).abs() < 1e-14);
    }

    #[test]
    fn svd_hard_case_reconstructs() {
        // A QR-iteration SVD with vectors loses about 1e-3 on this input.
        let entries = [
            3.832322723239464e0, -2.68634518628866e0, -1.2897558931401587e0, 2.2371316641658082e-1,
            2.3381204489462943e0, 3.111159183987984e0, 2.104413957885318e0, -9.571053421345476e-1,
            -2.276310609783324e0, 1.5397928762746527e-1, 1.4552397561624415e0, 1.0819861597632143e0,
            -1.3401690031153186e0, 2.586561975746897e-1, 2.8130874446651544e0, 3.6817216051159735e-1,
            -1.6066495061601214e0, -2.441343657532554e-1, 1.3439645016988605e-1, 6.426242003469824e-1,
            -1.3711730296578046e0, -3.3820598995384843e-1, 4.155916595891352e-1, -6.992600854972525e-1,
            -1.296880725015205e0, 2.691339891959867e0, -5.65083204921521e0, -1.2718955987509617e0,
            7.316693295440839e-1, -4.652228142207209e0, 1.772281667507604e0, -5.970121628103495e-1,
            -2.7278281296813276e0, 3.1773348861939485e-2, 1.8242456528774353e0, 3.352802083300396e-1,
        ];
        let want = [
            8.807123346484474, 8.322907759615342, 0.38857628348972745, 0.3827975927694639, 0.2882711727512596,
            0.23981940548143774,
        ];
        let x = Matrix::from_row_slice(6, 6, &entries).unwrap();
        let dec = svd(&x).unwrap();
        for (got, w) in dec.singular_values.iter().zip(want) {
            assert!((got - w).abs() < 1e-12 * w, "{got} vs {w}");
        }
        assert!((dec.reconstruct().0 - &x.0).abs().max() < 1e-13);
    }

    #[test]
    fn svd_exact_zero_rows_and_vectors() {
        let x = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0, -1.0, 1.0]).unwrap();
        let dec = svd(&x).unwrap();
        assert_eq!(dec.singular_values[2], 0.0);
        assert!((dec.reconstruct().0 - &x.0).abs().max() < 1e-14);
        let v = &dec.v.0;
        assert!((v.transpose() * v - DMatrix::identity(3, 3)).abs().max() < 1e-14);

        let z = svd(&Matrix::zeros(2, 4)).unwrap();
        assert_eq!(z.singular_values, vec![0.0, 0.0]);
        assert!((z.v.0.transpose() * &z.v.0 - DMatrix::identity(4, 4)).abs().max() < 1e-14);

        let row = svd(&Matrix::from_row_slice(1, 3, &[3.0, 0.0, 4.0]).unwrap()).unwrap();
        assert!((row.singular_values[0] - 5.0).abs() < 1e-15);
    }
}

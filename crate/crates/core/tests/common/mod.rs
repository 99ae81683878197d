//! Reference computations that avoid the library's own factorizations.
#![allow(dead_code)]

use nalgebra::DMatrix;
use specbound::{Matrix, ScalarFunction, SpdMatrix};

/// Singular values straight from nalgebra, non-increasing.
pub fn oracle_sv(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn oracle_sym_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// Spectrum of `A B^-1` through the Cholesky factor `B = L L^T`: the
/// eigenvalues of `L^-1 A L^-T`.
pub fn oracle_relative_spectrum(a: &SpdMatrix, b: &SpdMatrix) -> Vec<f64> {
    let l = b.as_matrix().as_dmatrix().clone().cholesky().expect("SPD").l();
    let li = l.try_inverse().expect("invertible");
    let m = &li * a.as_matrix().as_dmatrix() * li.transpose();
    oracle_sym_eigs(&((&m + m.transpose()) * 0.5))
}

pub fn oracle_distance(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> f64 {
    oracle_relative_spectrum(a, b).iter().map(|m| m.ln().abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

pub fn sum_f(values: impl IntoIterator<Item = f64>, f: &ScalarFunction) -> f64 {
    values.into_iter().map(|s| f.eval(s)).sum()
}

/// `(anti-aligned, exact, aligned)` for `S_f(AB)` from nalgebra singular values.
pub fn oracle_product_sums(a: &Matrix, b: &Matrix, f: &ScalarFunction) -> (f64, f64, f64) {
    let (da, db) = (a.as_dmatrix(), b.as_dmatrix());
    let (sa, sb) = (oracle_sv(da), oracle_sv(db));
    let exact = sum_f(oracle_sv(&(da * db)), f);
    let lower = sum_f(sa.iter().zip(sb.iter().rev()).map(|(x, y)| x * y), f);
    let upper = sum_f(sa.iter().zip(&sb).map(|(x, y)| x * y), f);
    (lower, exact, upper)
}

pub fn tau(exact: f64) -> f64 {
    1e-9 * (1.0 + exact.abs())
}

/// Central-difference gradient of `S_f` with step `h`.
pub fn fd_gradient(x: &DMatrix<f64>, f: &ScalarFunction, h: f64) -> DMatrix<f64> {
    let sf = |m: &DMatrix<f64>| sum_f(oracle_sv(m), f);
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        let mut p = x.clone();
        let mut q = x.clone();
        p[(i, j)] += h;
        q[(i, j)] -= h;
        (sf(&p) - sf(&q)) / (2.0 * h)
    })
}

/// Singular values in `[lo, hi]` with consecutive gaps at least `gap`.
pub fn gapped_values(n: usize, lo: f64, hi: f64, gap: f64, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).all(|w| w[0] - w[1] >= gap) {
            return v;
        }
    }
}

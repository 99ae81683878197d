//! Spectral sums `S_f(X) = sum_i f(sigma_i(X))`, a canonical element of their
//! subdifferential, and first-order perturbation of singular values.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::linalg::{svd, sym_eigenvalues, Matrix, SvdFactorization};

/// Decay ratio per decade of epsilon accepted as "faster than linear".
pub const PERTURBATION_RATIO_PER_DECADE: f64 = 0.2;

/// `sum_i f(sigma_i)` over precomputed singular values.
pub fn s_f_of_values(values: &[f64], f: &ScalarFunction) -> Result<f64> {
    let mut total = 0.0;
    for (i, &s) in values.iter().enumerate() {
        if s == 0.0 && !f.domain_includes_zero() {
            return Err(Error::Domain(format!(
                "singular value {} is zero and {} is undefined at 0",
                i + 1,
                f.label()
            )));
        }
        let v = f.eval(s);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "{} is not finite at singular value {} = {s:e}",
                f.label(),
                i + 1
            )));
        }
        total += v;
    }
    Ok(total)
}

/// `S_f(X)`.
pub fn s_f(x: &Matrix, f: &ScalarFunction) -> Result<f64> {
    let sv = svd(x)?.singular_values;
    s_f_of_values(&sv, f)
}

/// `U (Diag(f'(sigma)) 0) V^T`, built from the canonical SVD.
///
/// Unique when the singular values are distinct. Requires full rank.
pub fn subdifferential_element(x: &Matrix, f: &ScalarFunction) -> Result<Matrix> {
    let dec = svd(x)?;
    dec.require_full_rank()?;
    let mut scaled_u = dec.u.as_dmatrix().clone();
    for (j, s) in dec.singular_values.iter().enumerate() {
        let d = f.deriv(*s);
        if !d.is_finite() {
            return Err(Error::Domain(format!("{}' is not finite at {s:e}", f.label())));
        }
        scaled_u.column_mut(j).scale_mut(d);
    }
    let delta = scaled_u * dec.v1().as_dmatrix().transpose();
    Ok(Matrix::from_raw(if dec.transposed { delta.transpose() } else { delta }))
}

/// Groups of (numerically) equal singular values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularClusters {
    /// Zero-based cluster starts followed by `m`; cluster `j` spans
    /// `boundaries[j]..boundaries[j + 1]`.
    pub boundaries: Vec<usize>,
    pub representative_values: Vec<f64>,
    pub tolerance: f64,
}

impl SingularClusters {
    pub fn len(&self) -> usize {
        self.representative_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative_values.is_empty()
    }

    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.boundaries.windows(2).map(|w| w[0]..w[1])
    }
}

/// `max(1e-8 * sigma_max, 1e-12)`.
pub fn cluster_tolerance(sigma_max: f64) -> f64 {
    (1e-8 * sigma_max).max(1e-12)
}

/// Splits a non-increasing sequence wherever consecutive values differ by
/// more than the cluster tolerance.
pub fn cluster_singular_values(sv: &[f64]) -> SingularClusters {
    let tolerance = cluster_tolerance(sv.first().copied().unwrap_or(0.0));
    let mut boundaries = vec![0];
    let mut representative_values = Vec::new();
    if sv.is_empty() {
        return SingularClusters { boundaries, representative_values, tolerance };
    }
    representative_values.push(sv[0]);
    for i in 1..sv.len() {
        if sv[i - 1] - sv[i] > tolerance {
            boundaries.push(i);
            representative_values.push(sv[i]);
        }
    }
    boundaries.push(sv.len());
    SingularClusters { boundaries, representative_values, tolerance }
}

/// Orthogonal `W` diagonalizing the dilation of `X`:
/// `Xi(X) = W diag(Sigma, 0, -Sigma) W^T`, with
/// `W = [[U, 0, U], [V1, sqrt(2) V2, -V1]] / sqrt(2)`.
pub fn dilation_eigenvectors(dec: &SvdFactorization) -> Matrix {
    let m = dec.u.rows();
    let n = dec.v.rows();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = dec.u.as_dmatrix();
    let v1 = dec.v1().into_dmatrix();
    let mut w = DMatrix::zeros(m + n, m + n);
    w.view_mut((0, 0), (m, m)).copy_from(&(u * r));
    w.view_mut((m, 0), (n, m)).copy_from(&(&v1 * r));
    if let Some(v2) = dec.v2() {
        w.view_mut((m, m), (n, n - m)).copy_from(v2.as_dmatrix());
    }
    w.view_mut((0, n), (m, m)).copy_from(&(u * r));
    w.view_mut((m, n), (n, m)).copy_from(&(&v1 * -r));
    Matrix::from_raw(w)
}

/// First-order predictions `sigma_i(X) + eps * lambda_k(W_j^T Xi(Y) W_j)`,
/// one cluster at a time. Full-rank `X` only.
pub fn predict_perturbed_singular_values(x: &Matrix, y: &Matrix, eps: f64) -> Result<Vec<f64>> {
    if x.shape() != y.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch {:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be finite and >= 0, got {eps}")));
    }
    let dec = svd(x)?;
    dec.require_full_rank()?;
    let y_wide = if dec.transposed { y.transpose() } else { y.clone() };
    let u = dec.u.as_dmatrix();
    let v1 = dec.v1().into_dmatrix();
    let clusters = cluster_singular_values(&dec.singular_values);

    let mut out = Vec::with_capacity(dec.singular_values.len());
    for range in clusters.ranges() {
        let k = range.len();
        let uj = u.columns(range.start, k);
        let vj = v1.columns(range.start, k);
        // W_j^T Xi(Y) W_j with W_j = [U_j; V1_j] / sqrt(2)
        let half = uj.transpose() * y_wide.as_dmatrix() * vj;
        let block = (&half + half.transpose()) * 0.5;
        let shifts = sym_eigenvalues(&Matrix::from_raw(block))?;
        for (i, shift) in range.zip(shifts) {
            out.push(dec.singular_values[i] + eps * shift);
        }
    }
    Ok(out)
}

/// Instrumentation of `S_f(X + eps Y) = S_f(X) + eps <Delta, Y> + o(eps)`.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub base_value: f64,
    pub directional_derivative: f64,
    pub epsilons: Vec<f64>,
    pub s_f_values: Vec<f64>,
    pub linear_predictions: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub error_ratios: Vec<f64>,
    /// Every consecutive ratio is at most `0.2` per decade of epsilon.
    pub superlinear: bool,
}

/// `10^-start, 10^-(start+1), ...`, `count` values.
pub fn epsilon_decades(start: i32, count: usize) -> Vec<f64> {
    (0..count).map(|k| 10f64.powi(-(start + k as i32))).collect()
}

pub fn perturbation_check(
    x: &Matrix,
    y: &Matrix,
    f: &ScalarFunction,
    epsilons: &[f64],
) -> Result<PerturbationReport> {
    if x.shape() != y.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch {:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter("epsilons must be positive and finite".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("epsilons must be strictly decreasing".into()));
    }
    let dec = svd(x)?;
    dec.require_full_rank()?;
    let base_value = s_f_of_values(&dec.singular_values, f)?;
    let delta = subdifferential_element(x, f)?;
    let directional_derivative = delta.inner(y)?;

    let mut s_f_values = Vec::with_capacity(epsilons.len());
    let mut linear_predictions = Vec::with_capacity(epsilons.len());
    let mut abs_errors = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let value = s_f(&x.add_scaled(y, eps)?, f)?;
        let linear = base_value + eps * directional_derivative;
        s_f_values.push(value);
        linear_predictions.push(linear);
        abs_errors.push((value - base_value - eps * directional_derivative).abs());
    }

    let mut error_ratios = Vec::with_capacity(epsilons.len().saturating_sub(1));
    let mut superlinear = true;
    for k in 1..epsilons.len() {
        let ratio = match (abs_errors[k - 1], abs_errors[k]) {
            (_, e) if e == 0.0 => 0.0,
            (p, _) if p == 0.0 => f64::INFINITY,
            (p, e) => e / p,
        };
        let decades = (epsilons[k - 1] / epsilons[k]).log10();
        if ratio > PERTURBATION_RATIO_PER_DECADE.powf(decades) {
            superlinear = false;
        }
        error_ratios.push(ratio);
    }

    Ok(PerturbationReport {
        base_value,
        directional_derivative,
        epsilons: epsilons.to_vec(),
        s_f_values,
        linear_predictions,
        abs_errors,
        error_ratios,
        superlinear,
    })
}

/// Least-squares slope of `log10(err)` against `log10(eps)`; zero errors are skipped.
pub fn loglog_slope(epsilons: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(x, e)| (x.log10(), e.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

//! Affine-invariant distances `d_q` and Alpha-Beta log-det divergences on the
//! SPD cone, with bounds that need only the individual spectra.
//!
//! Both quantities depend on `(A, B)` only through `mu = lambda(B^-1/2 A B^-1/2)`,
//! the spectrum of `A B^-1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::linalg::{spd_log, spd_power, sym_eigenvalues, Matrix, SpdMatrix};
use crate::rearrange::{BoundsReport, Orientation};

fn check_pair(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!("dimension mismatch {} vs {}", a.dim(), b.dim())));
    }
    for m in [a, b] {
        if !m.is_definite() {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: *m.eigenvalues().last().unwrap() });
        }
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be a finite value >= 1, got {q}")));
    }
    Ok(())
}

fn sandwich(outer: &SpdMatrix, inner: &SpdMatrix) -> Result<Matrix> {
    let half = spd_power(outer, -0.5)?;
    let m = half.as_matrix().matmul(inner.as_matrix())?.matmul(half.as_matrix())?;
    let d = m.as_dmatrix();
    Ok(Matrix::from_raw((d + d.transpose()) * 0.5))
}

/// `lambda(B^-1/2 A B^-1/2)`, non-increasing, all positive.
pub fn relative_spectrum(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    check_pair(a, b)?;
    if a.as_matrix() == b.as_matrix() {
        return Ok(vec![1.0; a.dim()]);
    }
    let mu = sym_eigenvalues(&sandwich(b, a)?)?;
    if let Some(bad) = mu.iter().find(|m| !(**m > 0.0)) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: *bad });
    }
    Ok(mu)
}

/// `d_q(A, B)^q = sum |log mu_i|^q`.
pub fn distance_power(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<f64> {
    check_q(q)?;
    let mu = relative_spectrum(a, b)?;
    Ok(mu.iter().map(|m| m.ln().abs().powf(q)).sum())
}

/// `d_q(A, B) = || Log(B^-1/2 A B^-1/2) ||_q`.
pub fn affine_invariant_distance(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<f64> {
    Ok(distance_power(a, b, q)?.powf(1.0 / q))
}

/// Aligned log-eigenvalue differences below `d_q^q`, anti-aligned above.
pub fn distance_bounds(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<BoundsReport> {
    let exact = distance_power(a, b, q)?;
    let (la, lb) = (a.log_eigenvalues(), b.log_eigenvalues());
    let lower = la.iter().zip(&lb).map(|(x, y)| (x - y).abs().powf(q)).sum();
    let upper = la.iter().zip(lb.iter().rev()).map(|(x, y)| (x - y).abs().powf(q)).sum();
    Ok(BoundsReport::new(lower, exact, upper, Orientation::Sandwich))
}

/// Parameter regime of the AB log-det family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AbRegime {
    /// `alpha beta != 0`, `alpha + beta != 0`.
    General,
    /// `alpha != 0`, `beta = 0`.
    BetaZero,
    /// `alpha = 0`, `beta != 0`.
    AlphaZero,
    /// `alpha = -beta != 0`.
    Opposite,
    /// `alpha = beta = 0`.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AbParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha, beta must be finite, got ({alpha}, {beta})")));
        }
        Ok(AbParams { alpha, beta })
    }

    /// Exact-zero dispatch on the user-given parameters.
    pub fn regime(&self) -> AbRegime {
        let (a, b) = (self.alpha, self.beta);
        match (a == 0.0, b == 0.0) {
            (true, true) => AbRegime::Zero,
            (false, true) => AbRegime::BetaZero,
            (true, false) => AbRegime::AlphaZero,
            (false, false) if a + b == 0.0 => AbRegime::Opposite,
            _ => AbRegime::General,
        }
    }

    /// The regime's scalar function `f` and prefactor `c` with
    /// `D(A || B) = c * sum_i f(mu_i)`.
    pub fn scalar_form(&self) -> (f64, ScalarFunction) {
        let (a, b) = (self.alpha, self.beta);
        // Constructors cannot fail here: the regime guarantees their preconditions.
        match self.regime() {
            AbRegime::General => (1.0 / (a * b), ScalarFunction::ab_general(a, b).unwrap()),
            AbRegime::BetaZero => (1.0 / (a * a), ScalarFunction::ab_beta0(a).unwrap()),
            AbRegime::AlphaZero => (1.0 / (b * b), ScalarFunction::ab_alpha0(b).unwrap()),
            AbRegime::Opposite => (1.0 / (a * a), ScalarFunction::ab_neg(a).unwrap()),
            AbRegime::Zero => (0.5, ScalarFunction::abs_log_pow(2.0).unwrap()),
        }
    }
}

fn scaled_sum(args: impl Iterator<Item = f64>, p: &AbParams, what: &str) -> Result<f64> {
    let (c, f) = p.scalar_form();
    let mut total = 0.0;
    for (i, s) in args.enumerate() {
        let v = f.eval(s);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "{what}: log argument non-positive at eigenvalue index {} (ratio {s:e}) for (alpha, beta) = ({}, {})",
                i + 1,
                p.alpha,
                p.beta
            )));
        }
        total += v;
    }
    Ok(c * total)
}

/// `D_{alpha,beta}(A || B)` from the eigenvalues of `A B^-1`.
pub fn ab_logdet_divergence(a: &SpdMatrix, b: &SpdMatrix, p: AbParams) -> Result<f64> {
    let mu = relative_spectrum(a, b)?;
    scaled_sum(mu.iter().copied(), &p, "divergence")
}

/// Matrix-level evaluation for the General and Zero regimes, through
/// `G = A^-1/2 B A^-1/2` (the spectrum of `B A^-1`):
///
/// * General: `log det((alpha (A B^-1)^beta + beta (A B^-1)^-alpha) / (alpha + beta)) / (alpha beta)`
///   with `(A B^-1)^t = A^1/2 G^-t A^-1/2`, determinant by LU;
/// * Zero: `|| Log G ||_F^2 / 2`.
pub fn ab_logdet_matrix_form(a: &SpdMatrix, b: &SpdMatrix, p: AbParams) -> Result<f64> {
    check_pair(a, b)?;
    let g = SpdMatrix::new(sandwich(a, b)?)?;
    match p.regime() {
        AbRegime::Zero => {
            let l = spd_log(&g)?;
            Ok(0.5 * l.frobenius_norm().powi(2))
        }
        AbRegime::General => {
            let (al, be) = (p.alpha, p.beta);
            let mix = spd_power(&g, -be)?
                .as_matrix()
                .scale(al)?
                .add_scaled(spd_power(&g, al)?.as_matrix(), be)?
                .scale(1.0 / (al + be))?;
            let ah = spd_power(a, 0.5)?;
            let ahi = spd_power(a, -0.5)?;
            let m = ah.as_matrix().matmul(&mix)?.matmul(ahi.as_matrix())?;
            let det = m.as_dmatrix().clone().lu().determinant();
            if !(det > 0.0) {
                return Err(Error::Domain(format!("matrix-form determinant {det:e} is not positive")));
            }
            Ok(det.ln() / (al * be))
        }
        other => Err(Error::InvalidParameter(format!("no matrix form implemented for regime {other:?}"))),
    }
}

/// Eigenvalue-only bounds on `D_{alpha,beta}(A || B)`.
///
/// `lower` substitutes `lambda_i(A) / lambda_i(B)` and `upper` substitutes
/// `lambda_i(A) / lambda_{n-i+1}(B)` into the regime's scaled function. In
/// every regime `c * f` has `s (c f)'(s)` increasing, so the chain is always
/// `lower <= D <= upper`, including `alpha beta < 0`.
pub fn ab_logdet_bounds(a: &SpdMatrix, b: &SpdMatrix, p: AbParams) -> Result<BoundsReport> {
    let exact = ab_logdet_divergence(a, b, p)?;
    let (la, lb) = (a.eigenvalues(), b.eigenvalues());
    let lower = scaled_sum(la.iter().zip(lb).map(|(x, y)| x / y), &p, "lower bound")?;
    let upper = scaled_sum(la.iter().zip(lb.iter().rev()).map(|(x, y)| x / y), &p, "upper bound")?;
    Ok(BoundsReport::new(lower, exact, upper, Orientation::Sandwich))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn spd_diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn distance_closed_forms() {
        let a = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        assert_eq!(affine_invariant_distance(&a, &a, 2.0).unwrap(), 0.0);
        let r = distance_bounds(&a, &a, 2.0).unwrap();
        assert_eq!((r.lower, r.exact), (0.0, 0.0));
        assert!(r.upper > 0.0);
        let iso = spd_diag(&[2.0, 2.0]);
        let r = distance_bounds(&iso, &iso, 2.0).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (0.0, 0.0, 0.0));

        let a = spd_diag(&[E * E, E * E]);
        let b = SpdMatrix::identity(2);
        let d = affine_invariant_distance(&a, &b, 2.0).unwrap();
        assert!((d - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn distance_rejects_small_q() {
        let i = SpdMatrix::identity(2);
        assert!(matches!(affine_invariant_distance(&i, &i, 0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn distance_bounds_anti_aligned_pair() {
        let a = spd_diag(&[E * E, E]);
        let b = spd_diag(&[E, E * E]);
        let r = distance_bounds(&a, &b, 2.0).unwrap();
        assert!(r.lower.abs() < 1e-14);
        assert!((r.exact - 2.0).abs() < 1e-13);
        assert!((r.upper - 2.0).abs() < 1e-13);
    }

    #[test]
    fn distance_bounds_isotropic_b() {
        let a = SpdMatrix::from_row_slice(3, &[3.0, 0.5, 0.0, 0.5, 2.0, 0.1, 0.0, 0.1, 1.0]).unwrap();
        let c: f64 = 1.7;
        let b = SpdMatrix::new(Matrix::identity(3).scale(c).unwrap()).unwrap();
        for q in [1.0, 2.0, 3.0] {
            let r = distance_bounds(&a, &b, q).unwrap();
            let want: f64 = a.log_eigenvalues().iter().map(|l| (l - c.ln()).abs().powf(q)).sum();
            for v in [r.lower, r.exact, r.upper] {
                assert!((v - want).abs() < 1e-12 * (1.0 + want));
            }
        }
    }

    #[test]
    fn regimes() {
        let r = |a, b| AbParams::new(a, b).unwrap().regime();
        assert_eq!(r(1.0, 2.0), AbRegime::General);
        assert_eq!(r(1.0, -2.0), AbRegime::General);
        assert_eq!(r(1.0, 0.0), AbRegime::BetaZero);
        assert_eq!(r(0.0, 1.0), AbRegime::AlphaZero);
        assert_eq!(r(1.0, -1.0), AbRegime::Opposite);
        assert_eq!(r(0.0, 0.0), AbRegime::Zero);
        assert_eq!(r(-0.0, 0.0), AbRegime::Zero);
        assert!(AbParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn divergence_closed_forms() {
        let a = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        for (al, be) in [(1.0, 2.0), (1.0, 0.0), (0.0, 1.0), (1.0, -1.0), (0.0, 0.0), (1.0, -2.0)] {
            let d = ab_logdet_divergence(&a, &a, AbParams::new(al, be).unwrap()).unwrap();
            assert!(d.abs() < 1e-12, "({al},{be}): {d}");
        }
        let d = ab_logdet_divergence(&spd_diag(&[E, E]), &SpdMatrix::identity(2), AbParams::new(0.0, 0.0).unwrap())
            .unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        let d = ab_logdet_divergence(&spd_diag(&[4.0]), &spd_diag(&[1.0]), AbParams::new(0.5, 0.5).unwrap()).unwrap();
        assert!((d - 4.0 * 1.25f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn stein_loss_special_case() {
        // alpha = 0, beta = 1: tr(A B^-1) - log det(A B^-1) - n
        let a = SpdMatrix::from_row_slice(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let b = SpdMatrix::from_row_slice(2, &[1.0, -0.2, -0.2, 3.0]).unwrap();
        let binv = b.as_matrix().as_dmatrix().clone().try_inverse().unwrap();
        let ab = a.as_matrix().as_dmatrix() * binv;
        let want = ab.trace() - ab.determinant().ln() - 2.0;
        let d = ab_logdet_divergence(&a, &b, AbParams::new(0.0, 1.0).unwrap()).unwrap();
        assert!((d - want).abs() < 1e-12);
    }

    #[test]
    fn beta_zero_bounds_diagonal() {
        let a = spd_diag(&[4.0, 1.0]);
        let b = SpdMatrix::identity(2);
        let r = ab_logdet_bounds(&a, &b, AbParams::new(1.0, 0.0).unwrap()).unwrap();
        let want = 0.25 + 4f64.ln() - 1.0;
        assert!((r.exact - want).abs() < 1e-14);
        assert!((r.lower - want).abs() < 1e-14);
        assert!(r.satisfied);
    }

    #[test]
    fn negative_alpha_beta_keeps_sandwich() {
        let a = SpdMatrix::from_row_slice(2, &[1.2, 0.1, 0.1, 0.9]).unwrap();
        let b = SpdMatrix::from_row_slice(2, &[1.0, -0.15, -0.15, 1.1]).unwrap();
        let r = ab_logdet_bounds(&a, &b, AbParams::new(1.0, -2.0).unwrap()).unwrap();
        assert_eq!(r.orientation, Orientation::Sandwich);
        assert!(r.satisfied, "{r:?}");
        assert!(r.lower < r.exact && r.exact < r.upper);
    }

    #[test]
    fn domain_violation_reports_index() {
        // ratio 0.25 lies outside s > 1/2 for (1, -2)
        let a = spd_diag(&[1.0, 0.25]);
        let b = SpdMatrix::identity(2);
        match ab_logdet_divergence(&a, &b, AbParams::new(1.0, -2.0).unwrap()) {
            Err(Error::Domain(msg)) => assert!(msg.contains("index 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        // 1 + alpha log s <= 0 for the opposite regime
        let a = spd_diag(&[1.0, 0.2]);
        assert!(matches!(
            ab_logdet_divergence(&a, &b, AbParams::new(1.0, -1.0).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn matrix_form_agrees() {
        let a = SpdMatrix::from_row_slice(3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.8]).unwrap();
        let b = SpdMatrix::from_row_slice(3, &[1.0, 0.1, 0.0, 0.1, 2.0, 0.4, 0.0, 0.4, 1.2]).unwrap();
        for (al, be) in [(0.5, 0.5), (1.0, 2.0), (2.0, -0.5), (0.0, 0.0)] {
            let p = AbParams::new(al, be).unwrap();
            let e = ab_logdet_divergence(&a, &b, p).unwrap();
            let m = ab_logdet_matrix_form(&a, &b, p).unwrap();
            assert!((e - m).abs() < 1e-10, "({al},{be}): {e} vs {m}");
        }
    }
}

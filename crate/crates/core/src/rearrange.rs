//! Rearrangement bounds: vector sums of `f(u_i v_i)` and singular-value sums
//! `S_f(AB)` bracketed by the aligned and anti-aligned pairings of the
//! factors' individual spectra.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{ScalarFunction, SfPrimeClass};
use crate::linalg::{svd, Matrix};
use crate::spectral::s_f_of_values;

/// `1e-9 * (1 + |exact|)`.
pub fn inequality_tolerance(exact: f64) -> f64 {
    1e-9 * (1.0 + exact.abs())
}

/// Which way the chain runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// `lower <= exact <= upper`.
    Sandwich,
    /// `lower >= exact >= upper`.
    Reversed,
}

impl Orientation {
    pub fn from_class(class: SfPrimeClass) -> Result<Self> {
        match class {
            SfPrimeClass::Increasing => Ok(Orientation::Sandwich),
            SfPrimeClass::Decreasing => Ok(Orientation::Reversed),
            SfPrimeClass::Neither => Err(Error::UnsupportedFunction(
                "s f'(s) must be monotone for rearrangement bounds".into(),
            )),
        }
    }
}

/// One inequality instance.
///
/// `lower` and `upper` are positional: `lower` is always the anti-aligned
/// pairing and `upper` the aligned one. Under [`Orientation::Reversed`] the
/// comparisons flip, so `lower >= exact >= upper`. Gaps are signed so that
/// both are non-negative exactly when the chain holds; a missing side is
/// reported as an infinite bound with an infinite gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub lower_gap: f64,
    pub upper_gap: f64,
    pub orientation: Orientation,
    pub tolerance: f64,
    pub satisfied: bool,
}

impl BoundsReport {
    pub fn new(lower: f64, exact: f64, upper: f64, orientation: Orientation) -> Self {
        let (lower_gap, upper_gap) = match orientation {
            Orientation::Sandwich => (exact - lower, upper - exact),
            Orientation::Reversed => (lower - exact, exact - upper),
        };
        let tolerance = inequality_tolerance(exact);
        let satisfied = lower_gap >= -tolerance && upper_gap >= -tolerance;
        BoundsReport { lower, exact, upper, lower_gap, upper_gap, orientation, tolerance, satisfied }
    }

    /// Worst signed gap, negative when violated.
    pub fn min_gap(&self) -> f64 {
        self.lower_gap.min(self.upper_gap)
    }
}

fn sum_f(terms: impl Iterator<Item = f64>, f: &ScalarFunction) -> Result<f64> {
    let mut total = 0.0;
    for (i, s) in terms.enumerate() {
        let v = f.eval(s);
        if !v.is_finite() || (s == 0.0 && !f.domain_includes_zero()) {
            return Err(Error::Domain(format!("{} undefined at term {} (argument {s:e})", f.label(), i + 1)));
        }
        total += v;
    }
    Ok(total)
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `sum f(a_i b_i)` over two non-increasing sequences (aligned).
pub fn aligned_sum(a_desc: &[f64], b_desc: &[f64], f: &ScalarFunction) -> Result<f64> {
    sum_f(a_desc.iter().zip(b_desc).map(|(x, y)| x * y), f)
}

/// `sum f(a_i b_{n-i+1})` over two non-increasing sequences (anti-aligned).
pub fn anti_aligned_sum(a_desc: &[f64], b_desc: &[f64], f: &ScalarFunction) -> Result<f64> {
    sum_f(a_desc.iter().zip(b_desc.iter().rev()).map(|(x, y)| x * y), f)
}

fn check_vectors(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::InvalidInput(format!(
            "vectors must be non-empty with equal lengths ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    Ok(())
}

/// Bounds on `sum f(u_i v_i)` by the sorted pairings of strictly positive vectors.
pub fn vector_rearrangement_bounds(u: &[f64], v: &[f64], f: &ScalarFunction) -> Result<BoundsReport> {
    check_vectors(u, v)?;
    let orientation = Orientation::from_class(f.sfprime_class())?;
    if let Some(bad) = u.iter().chain(v).find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("entries must be positive and finite, found {bad}")));
    }
    let (ud, vd) = (sorted_desc(u), sorted_desc(v));
    let exact = sum_f(u.iter().zip(v).map(|(x, y)| x * y), f)?;
    let lower = anti_aligned_sum(&ud, &vd, f)?;
    let upper = aligned_sum(&ud, &vd, f)?;
    Ok(BoundsReport::new(lower, exact, upper, orientation))
}

/// Positive `u`, non-negative `v`; `f` must be defined at zero.
pub fn london_bounds(u: &[f64], v: &[f64], f: &ScalarFunction) -> Result<BoundsReport> {
    check_vectors(u, v)?;
    if !f.domain_includes_zero() {
        return Err(Error::Domain(format!("{} must be defined at 0", f.label())));
    }
    if let Some(bad) = u.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("u must be positive, found {bad}")));
    }
    if let Some(bad) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("v must be non-negative, found {bad}")));
    }
    let (ud, vd) = (sorted_desc(u), sorted_desc(v));
    let exact = sum_f(u.iter().zip(v).map(|(x, y)| x * y), f)?;
    let lower = anti_aligned_sum(&ud, &vd, f)?;
    let upper = aligned_sum(&ud, &vd, f)?;
    Ok(BoundsReport::new(lower, exact, upper, Orientation::Sandwich))
}

/// `S_f(AB)` against the sorted singular-value products of square `A`, `B`.
///
/// Singular factors are accepted only when `f` is defined at zero.
pub fn product_spectrum_bounds(a: &Matrix, b: &Matrix, f: &ScalarFunction) -> Result<BoundsReport> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "need square matrices of equal size, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let orientation = Orientation::from_class(f.sfprime_class())?;
    let (da, db) = (svd(a)?, svd(b)?);
    if (!da.is_full_rank() || !db.is_full_rank()) && !f.domain_includes_zero() {
        return Err(Error::Domain(format!(
            "a factor is singular and {} is not defined at 0",
            f.label()
        )));
    }
    let exact = s_f_of_values(&svd(&a.matmul(b)?)?.singular_values, f)?;
    let lower = anti_aligned_sum(&da.singular_values, &db.singular_values, f)?;
    let upper = aligned_sum(&da.singular_values, &db.singular_values, f)?;
    Ok(BoundsReport::new(lower, exact, upper, orientation))
}

/// One-sided bound on `S_f(A B^T)` for `A`, `B` of equal shape `m x n`, `m <= n`.
///
/// Increasing class: `exact <= upper`, `lower = -inf`.
/// Decreasing class: `exact >= upper`, `lower = +inf`.
pub fn rectangular_product_bound(a: &Matrix, b: &Matrix, f: &ScalarFunction) -> Result<BoundsReport> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "need equal shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.rows() > a.cols() {
        return Err(Error::InvalidInput(format!(
            "expected rows <= cols, got {:?}; pass the transposes",
            a.shape()
        )));
    }
    let orientation = Orientation::from_class(f.sfprime_class())?;
    if !f.domain_includes_zero() {
        return Err(Error::Domain(format!("{} must be defined at 0", f.label())));
    }
    let (sa, sb) = (svd(a)?.singular_values, svd(b)?.singular_values);
    let exact = s_f_of_values(&svd(&a.matmul(&b.transpose())?)?.singular_values, f)?;
    let bound = aligned_sum(&sa, &sb, f)?;
    let absent = match orientation {
        Orientation::Sandwich => f64::NEG_INFINITY,
        Orientation::Reversed => f64::INFINITY,
    };
    Ok(BoundsReport::new(absent, exact, bound, orientation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Matrix {
        Matrix::from_diagonal(d).unwrap()
    }

    /// All permutations of `0..n`.
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..=p.len() {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_force_extremes(u: &[f64], v: &[f64], f: &ScalarFunction) -> (f64, f64) {
        permutations(u.len())
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| f.eval(u[i] * v[j])).sum::<f64>())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)))
    }

    #[test]
    fn worked_vector_example() {
        let f = ScalarFunction::power(2.0);
        let (lo, hi) = brute_force_extremes(&[2.0, 1.0], &[3.0, 1.0], &f);
        assert_eq!((lo, hi), (13.0, 37.0));
        let r = vector_rearrangement_bounds(&[2.0, 1.0], &[3.0, 1.0], &f).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (13.0, 37.0, 37.0));
        assert!(r.satisfied);
    }

    #[test]
    fn bounds_are_permutation_extremes() {
        let u = [0.7, 2.3, 1.1, 0.4];
        let v = [1.9, 0.2, 3.3, 0.8];
        for f in [
            ScalarFunction::power(2.0),
            ScalarFunction::power(-1.0),
            ScalarFunction::abs_log_pow(2.0).unwrap(),
            ScalarFunction::ab_general(1.0, 2.0).unwrap(),
        ] {
            let (lo, hi) = brute_force_extremes(&u, &v, &f);
            let r = vector_rearrangement_bounds(&u, &v, &f).unwrap();
            assert!((r.lower - lo).abs() < 1e-12 * (1.0 + lo.abs()), "{}", f.label());
            assert!((r.upper - hi).abs() < 1e-12 * (1.0 + hi.abs()), "{}", f.label());
            assert!(r.satisfied);
        }
    }

    #[test]
    fn decreasing_class_reverses() {
        let f = ScalarFunction::ab_general(1.0, -2.0).unwrap();
        let u = [1.1, 0.9, 1.3];
        let v = [0.8, 1.2, 1.0];
        let r = vector_rearrangement_bounds(&u, &v, &f).unwrap();
        assert_eq!(r.orientation, Orientation::Reversed);
        assert!(r.lower >= r.exact && r.exact >= r.upper);
        let (lo, hi) = brute_force_extremes(&u, &v, &f);
        assert!((r.lower - hi).abs() < 1e-12 && (r.upper - lo).abs() < 1e-12);
    }

    #[test]
    fn constant_and_log_cases() {
        let c = 1.5;
        let f = ScalarFunction::power(3.0);
        let r = vector_rearrangement_bounds(&[c; 4], &[c; 4], &f).unwrap();
        let want = 4.0 * f.eval(c * c);
        assert!((r.lower - want).abs() < 1e-12 && (r.exact - want).abs() < 1e-12 && (r.upper - want).abs() < 1e-12);

        let r = vector_rearrangement_bounds(&[2.0, 1.0], &[3.0, 1.0], &ScalarFunction::log()).unwrap();
        let l6 = 6f64.ln();
        assert!((r.lower - l6).abs() < 1e-15 && (r.exact - l6).abs() < 1e-15 && (r.upper - l6).abs() < 1e-15);
    }

    #[test]
    fn vector_errors() {
        let f = ScalarFunction::power(2.0);
        assert!(matches!(vector_rearrangement_bounds(&[1.0, 0.0], &[1.0, 1.0], &f), Err(Error::Domain(_))));
        assert!(matches!(vector_rearrangement_bounds(&[1.0], &[1.0, 1.0], &f), Err(Error::InvalidInput(_))));
        let neither = ScalarFunction::custom(
            "sin",
            f64::sin,
            f64::cos,
            true,
            crate::function::SfPrimeClass::Neither,
        )
        .unwrap();
        assert!(matches!(
            vector_rearrangement_bounds(&[1.0], &[1.0], &neither),
            Err(Error::UnsupportedFunction(_))
        ));
    }

    #[test]
    fn london_examples() {
        let f = ScalarFunction::power(2.0);
        let r = london_bounds(&[3.0, 1.0], &[0.0, 2.0], &f).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (4.0, 4.0, 36.0));
        let r = london_bounds(&[3.0, 1.0, 2.0], &[0.0; 3], &f).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (0.0, 0.0, 0.0));
        let r = london_bounds(&[2.0, 1.0], &[1.0, 1.0], &f).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (5.0, 5.0, 5.0));
        assert!(matches!(london_bounds(&[1.0], &[1.0], &ScalarFunction::log()), Err(Error::Domain(_))));
    }

    #[test]
    fn product_diagonal_example() {
        let r = product_spectrum_bounds(&diag(&[2.0, 1.0]), &diag(&[3.0, 1.0]), &ScalarFunction::power(2.0)).unwrap();
        assert!((r.exact - 37.0).abs() < 1e-12);
        assert!((r.upper - 37.0).abs() < 1e-12);
        assert!((r.lower - 13.0).abs() < 1e-12);
        assert!(r.satisfied);
    }

    #[test]
    fn product_identity_factor() {
        let b = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.2, 0.0, 1.0]).unwrap();
        let f = ScalarFunction::power(1.5);
        let r = product_spectrum_bounds(&Matrix::identity(3), &b, &f).unwrap();
        assert!((r.lower - r.exact).abs() < 1e-12 && (r.upper - r.exact).abs() < 1e-12);
    }

    #[test]
    fn product_singular_factor_needs_zero_domain() {
        let a = diag(&[1.0, 0.0]);
        let b = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]).unwrap();
        assert!(product_spectrum_bounds(&a, &b, &ScalarFunction::power(0.5)).unwrap().satisfied);
        assert!(matches!(product_spectrum_bounds(&a, &b, &ScalarFunction::power(-1.0)), Err(Error::Domain(_))));
        assert!(matches!(
            product_spectrum_bounds(&a, &Matrix::identity(3), &ScalarFunction::power(1.0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rectangular_cases() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 2.0]).unwrap();
        let b = Matrix::from_row_slice(1, 2, &[3.0, -1.0]).unwrap();
        let r = rectangular_product_bound(&a, &b, &ScalarFunction::power(2.0)).unwrap();
        // Cauchy-Schwarz: (a.b)^2 <= |a|^2 |b|^2
        assert!((r.exact - 1.0).abs() < 1e-14);
        assert!((r.upper - 50.0).abs() < 1e-12);
        assert_eq!(r.lower, f64::NEG_INFINITY);
        assert!(r.satisfied);

        let a = Matrix::from_row_slice(2, 3, &[1.0, 0.5, -2.0, 0.3, 1.0, 1.0]).unwrap();
        let r = rectangular_product_bound(&a, &a, &ScalarFunction::power(3.0)).unwrap();
        assert!((r.exact - r.upper).abs() < 1e-11 * r.upper);
        assert!(matches!(
            rectangular_product_bound(&a, &a, &ScalarFunction::power(-1.0)),
            Err(Error::Domain(_))
        ));
        assert!(rectangular_product_bound(&a.transpose(), &a.transpose(), &ScalarFunction::power(2.0)).is_err());
    }
}

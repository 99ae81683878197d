//! Schatten-q power sums and quasi-norms for any real `q`, with product
//! bounds and the trace-of-power comparison for positive semidefinite pairs.

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::linalg::{singular_values, spd_power, svd, Matrix, SpdMatrix};
use crate::rearrange::{
    product_spectrum_bounds, rectangular_product_bound, BoundsReport, Orientation,
};

/// `sum_i sigma_i(x)^q`. For `q <= 0` the input must be full rank, and
/// `sigma^0 = 1` counts the singular values.
pub fn power_sum(x: &Matrix, q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q = {q}")));
    }
    let dec = svd(x)?;
    if q <= 0.0 && !dec.is_full_rank() {
        return Err(Error::Domain(format!(
            "q = {q} needs a full-rank matrix (smallest singular value {:e})",
            dec.min_singular_value()
        )));
    }
    if q == 0.0 {
        return Ok(dec.singular_values.len() as f64);
    }
    Ok(dec.singular_values.iter().map(|s| s.powf(q)).sum())
}

/// Alias of [`power_sum`]: the quantity the product bounds are stated on.
pub fn schatten_q(x: &Matrix, q: f64) -> Result<f64> {
    power_sum(x, q)
}

/// `(sum_i sigma_i^q)^(1/q)`, `q != 0`.
pub fn norm(x: &Matrix, q: f64) -> Result<f64> {
    if q == 0.0 {
        return Err(Error::InvalidParameter("the q = 0 quasi-norm is undefined".into()));
    }
    Ok(power_sum(x, q)?.powf(1.0 / q))
}

/// Bounds on the power sum of a product.
///
/// Square inputs are multiplied as `ab` and get both bounds; rectangular
/// `m x n` inputs (`m < n`) are multiplied as `a b^T` and get only the upper
/// bound. Non-positive `q` needs square full-rank inputs.
pub fn schatten_product_bounds(a: &Matrix, b: &Matrix, q: f64) -> Result<BoundsReport> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q = {q}")));
    }
    if a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "need equal shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let square = a.is_square();
    if q <= 0.0 {
        if !square {
            return Err(Error::Domain(format!("q = {q} needs square inputs")));
        }
        for (name, m) in [("a", a), ("b", b)] {
            let dec = svd(m)?;
            if !dec.is_full_rank() {
                return Err(Error::Domain(format!("q = {q} needs {name} to be full rank")));
            }
        }
    }
    if q == 0.0 {
        let n = a.rows() as f64;
        return Ok(BoundsReport::new(n, n, n, Orientation::Sandwich));
    }
    let f = ScalarFunction::power(q);
    if square {
        product_spectrum_bounds(a, b, &f)
    } else {
        rectangular_product_bound(a, b, &f)
    }
}

/// `Tr((b^1/2 a b^1/2)^q)` against `sum lambda_i(a)^q lambda_{n-i+1}(b)^q`
/// and `sum lambda_i(a)^q lambda_i(b)^q`, for positive semidefinite `a`, `b`
/// and `q >= 1`.
pub fn carlen_lieb_check(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<BoundsReport> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be >= 1, got {q}")));
    }
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!("dimension mismatch {} vs {}", a.dim(), b.dim())));
    }
    let exact = trace_power_route(a, b, q)?;
    let la: Vec<f64> = a.eigenvalues().iter().map(|l| l.powf(q)).collect();
    let lb: Vec<f64> = b.eigenvalues().iter().map(|l| l.powf(q)).collect();
    let lower: f64 = la.iter().zip(lb.iter().rev()).map(|(x, y)| x * y).sum();
    let upper: f64 = la.iter().zip(&lb).map(|(x, y)| x * y).sum();
    Ok(BoundsReport::new(lower, exact, upper, Orientation::Sandwich))
}

/// `Tr((b^1/2 a b^1/2)^q)` through fractional matrix powers.
pub fn trace_power_route(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<f64> {
    let bh = spd_power(b, 0.5)?;
    let inner = bh.as_matrix().matmul(a.as_matrix())?.matmul(bh.as_matrix())?;
    let inner = SpdMatrix::new_semidefinite(symmetrized(&inner))?;
    let powered = spd_power(&inner, q)?;
    let m = powered.as_matrix();
    Ok((0..m.rows()).map(|i| m.get(i, i)).sum())
}

/// The same trace as singular values: `sum sigma_i(a^1/2 b^1/2)^(2q)`.
pub fn singular_value_route(a: &SpdMatrix, b: &SpdMatrix, q: f64) -> Result<f64> {
    let ah = spd_power(a, 0.5)?;
    let bh = spd_power(b, 0.5)?;
    let sv = singular_values(&ah.as_matrix().matmul(bh.as_matrix())?)?;
    Ok(sv.iter().map(|s| s.powf(2.0 * q)).sum())
}

fn symmetrized(m: &Matrix) -> Matrix {
    let d = m.as_dmatrix();
    Matrix::from_raw((d + d.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Matrix {
        Matrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn power_sum_closed_forms() {
        let x = diag(&[3.0, 4.0]);
        assert!((power_sum(&x, 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((power_sum(&x, 2.0).unwrap() - 25.0).abs() < 1e-13);
        assert!((norm(&x, 2.0).unwrap() - 5.0).abs() < 1e-14);
        for q in [-2.0, -0.5, 0.0, 0.5, 3.0] {
            assert!((power_sum(&Matrix::identity(4), q).unwrap() - 4.0).abs() < 1e-14);
        }
        assert!(norm(&x, 0.0).is_err());
    }

    #[test]
    fn frobenius_identity() {
        let x = Matrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 3.0, 0.1, -1.0]).unwrap();
        let fro: f64 = x.to_row_major().iter().map(|v| v * v).sum();
        assert!((power_sum(&x, 2.0).unwrap() - fro).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_q_needs_full_rank() {
        let x = diag(&[1.0, 0.0]);
        assert!(matches!(power_sum(&x, -1.0), Err(Error::Domain(_))));
        assert!(matches!(power_sum(&x, 0.0), Err(Error::Domain(_))));
        assert!((power_sum(&x, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_bounds_diagonal() {
        let r = schatten_product_bounds(&diag(&[2.0, 1.0]), &diag(&[1.0, 2.0]), 1.0).unwrap();
        assert!((r.exact - 4.0).abs() < 1e-14);
        assert!((r.lower - 4.0).abs() < 1e-14);
        assert!((r.upper - 5.0).abs() < 1e-14);
        assert!(r.satisfied);
    }

    #[test]
    fn product_bounds_q_zero_and_rectangular() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        let r = schatten_product_bounds(&a, &a, 0.0).unwrap();
        assert_eq!((r.lower, r.exact, r.upper), (2.0, 2.0, 2.0));

        let a = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]).unwrap();
        let b = Matrix::from_row_slice(2, 3, &[0.5, 1.0, 0.0, 1.0, -1.0, 2.0]).unwrap();
        let r = schatten_product_bounds(&a, &b, 2.0).unwrap();
        assert_eq!(r.lower, f64::NEG_INFINITY);
        assert!(r.satisfied);
        assert!(matches!(schatten_product_bounds(&a, &b, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn orthogonal_factor_is_tight() {
        let (c, s) = (0.6, 0.8);
        let q_mat = Matrix::from_row_slice(2, 2, &[c, -s, s, c]).unwrap();
        let b = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]).unwrap();
        for q in [-1.0, 0.5, 3.0] {
            let r = schatten_product_bounds(&q_mat, &b, q).unwrap();
            let want = power_sum(&b, q).unwrap();
            assert!((r.lower - want).abs() < 1e-12 * want);
            assert!((r.exact - want).abs() < 1e-12 * want);
            assert!((r.upper - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn carlen_lieb_examples() {
        let i3 = SpdMatrix::identity(3);
        let r = carlen_lieb_check(&i3, &i3, 2.5).unwrap();
        assert!((r.lower - 3.0).abs() < 1e-14 && (r.exact - 3.0).abs() < 1e-14 && (r.upper - 3.0).abs() < 1e-14);

        let a = SpdMatrix::from_diagonal(&[2.0, 1.0]).unwrap();
        let b = SpdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let r = carlen_lieb_check(&a, &b, 2.0).unwrap();
        assert!((r.exact - 8.0).abs() < 1e-13);
        assert!((r.lower - 8.0).abs() < 1e-13);
        assert!((r.upper - 17.0).abs() < 1e-13);
        assert!(carlen_lieb_check(&a, &b, 0.5).is_err());
    }

    #[test]
    fn carlen_lieb_accepts_semidefinite() {
        let a = SpdMatrix::new_semidefinite(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        let b = SpdMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let r = carlen_lieb_check(&a, &b, 1.5).unwrap();
        assert!(r.satisfied);
        let sv = singular_value_route(&a, &b, 1.5).unwrap();
        assert!((sv - r.exact).abs() < 1e-12 * (1.0 + r.exact));
    }
}

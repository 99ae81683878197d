//! Browser bindings: sweeps of exact value and eigenvalue-only bounds as the
//! second factor is rotated against the first.
//!
//! Every sweep returns a flat array of `[theta, lower, exact, upper]` rows.
//! Angles where the quantity is undefined yield `NaN` entries.

use std::f64::consts::PI;

use specbound::rearrange::product_spectrum_bounds;
use specbound::spd_geometry::{ab_logdet_bounds, distance_bounds, AbParams};
use specbound::{BoundsReport, Matrix, Result, ScalarFunction, SpdMatrix};
use wasm_bindgen::prelude::*;

/// `R(theta) Diag(d) R(theta)^T`.
fn rotated_diag(d: [f64; 2], theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    let r = Matrix::from_row_slice(2, 2, &[c, -s, s, c]).expect("2x2");
    let m = Matrix::from_diagonal(&d).expect("2x2");
    r.matmul(&m).and_then(|rm| rm.matmul(&r.transpose())).expect("conformable")
}

fn pair(v: &[f64], what: &str) -> Result<[f64; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(specbound::Error::InvalidInput(format!("{what}: expected 2 values, got {}", v.len()))),
    }
}

fn sweep(steps: usize, mut at: impl FnMut(f64) -> Result<BoundsReport>) -> Vec<f64> {
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(4 * steps);
    for k in 0..steps {
        let theta = PI * k as f64 / (steps - 1) as f64;
        out.push(theta);
        match at(theta) {
            Ok(r) => out.extend([r.lower, r.exact, r.upper]),
            Err(_) => out.extend([f64::NAN; 3]),
        }
    }
    out
}

pub fn product_rows(a: &[f64], b: &[f64], f: &ScalarFunction, steps: usize) -> Result<Vec<f64>> {
    let (a, b) = (pair(a, "a")?, pair(b, "b")?);
    let fixed = Matrix::from_diagonal(&a)?;
    Ok(sweep(steps, |t| product_spectrum_bounds(&fixed, &rotated_diag(b, t), f)))
}

pub fn distance_rows(a: &[f64], b: &[f64], q: f64, steps: usize) -> Result<Vec<f64>> {
    let (a, b) = (pair(a, "a")?, pair(b, "b")?);
    let fixed = SpdMatrix::from_diagonal(&a)?;
    Ok(sweep(steps, |t| distance_bounds(&fixed, &SpdMatrix::new(rotated_diag(b, t))?, q)))
}

pub fn ablogdet_rows(a: &[f64], b: &[f64], alpha: f64, beta: f64, steps: usize) -> Result<Vec<f64>> {
    let (a, b) = (pair(a, "a")?, pair(b, "b")?);
    let p = AbParams::new(alpha, beta)?;
    let fixed = SpdMatrix::from_diagonal(&a)?;
    Ok(sweep(steps, |t| ab_logdet_bounds(&fixed, &SpdMatrix::new(rotated_diag(b, t))?, p)))
}

fn js(e: specbound::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `S_f(A B)` with `A = Diag(a)` and `B` a rotated `Diag(b)`; `f` is `x^q`.
#[wasm_bindgen(js_name = productSweep)]
pub fn product_sweep(a: &[f64], b: &[f64], q: f64, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    product_rows(a, b, &ScalarFunction::power(q), steps).map_err(js)
}

/// `d_q(A, B)^q` between `Diag(a)` and a rotated `Diag(b)`.
#[wasm_bindgen(js_name = distanceSweep)]
pub fn distance_sweep(a: &[f64], b: &[f64], q: f64, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    distance_rows(a, b, q, steps).map_err(js)
}

/// Alpha-Beta log-det divergence between `Diag(a)` and a rotated `Diag(b)`.
#[wasm_bindgen(js_name = ablogdetSweep)]
pub fn ablogdet_sweep(
    a: &[f64],
    b: &[f64],
    alpha: f64,
    beta: f64,
    steps: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    ablogdet_rows(a, b, alpha, beta, steps).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[f64]) -> Vec<[f64; 4]> {
        v.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect()
    }

    #[test]
    fn product_endpoints_hit_the_bounds() {
        let r = rows(&product_rows(&[3.0, 1.0], &[2.0, 0.5], &ScalarFunction::power(2.0), 5).unwrap());
        assert_eq!(r.len(), 5);
        let [_, lo, ex, up] = r[0];
        assert!((ex - up).abs() < 1e-12 && lo < ex);
        let [theta, lo, ex, _] = r[2];
        assert!((theta - PI / 2.0).abs() < 1e-15);
        assert!((ex - lo).abs() < 1e-12);
        for [_, lo, ex, up] in r {
            assert!(lo <= ex + 1e-9 && ex <= up + 1e-9);
        }
    }

    #[test]
    fn distance_sweep_stays_inside() {
        for [_, lo, ex, up] in rows(&distance_rows(&[4.0, 1.0], &[2.0, 0.5], 2.0, 17).unwrap()) {
            assert!(lo <= ex + 1e-9 && ex <= up + 1e-9);
        }
    }

    #[test]
    fn ablogdet_out_of_domain_angles_are_nan() {
        let r = rows(&ablogdet_rows(&[1.0, 1.0], &[1.0, 1.0], 0.5, 0.5, 3).unwrap());
        assert!(r.iter().all(|row| row[2].abs() < 1e-12));
        let far = rows(&ablogdet_rows(&[100.0, 0.01], &[1.0, 1.0], 1.0, -2.0, 3).unwrap());
        assert!(far[0][2].is_nan());
    }

    #[test]
    fn wrong_length_is_an_error() {
        assert!(distance_rows(&[1.0], &[1.0, 2.0], 2.0, 3).is_err());
    }
}

//! Seeded property suites: random instances checked against the bounds, with
//! gap statistics. Used by the CLI `verify` command.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::io::{random_matrix, random_matrix_with_singular_values, random_spd_with_spectrum, rng_from_seed};
use crate::linalg::{Matrix, SpdMatrix};
use crate::rearrange::{product_spectrum_bounds, BoundsReport};
use crate::schatten::{carlen_lieb_check, schatten_product_bounds, singular_value_route};
use crate::spd_geometry::{
    ab_logdet_bounds, ab_logdet_divergence, ab_logdet_matrix_form, affine_invariant_distance, distance_bounds,
    AbParams, AbRegime,
};
use crate::spectral::{epsilon_decades, perturbation_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Rearrange,
    Schatten,
    Distance,
    Ablogdet,
    Perturb,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Rearrange, Suite::Schatten, Suite::Distance, Suite::Ablogdet, Suite::Perturb];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Rearrange => "rearrange",
            Suite::Schatten => "schatten",
            Suite::Distance => "distance",
            Suite::Ablogdet => "ablogdet",
            Suite::Perturb => "perturb",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

/// Running minimum and maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extent {
    pub min: f64,
    pub max: f64,
}

impl Extent {
    fn empty() -> Self {
        Extent { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn push(&mut self, v: f64) {
        if v.is_finite() {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub checks: usize,
    pub violations: usize,
    /// Signed gaps on the lower side; negative beyond tolerance is a violation.
    pub lower_gap: Extent,
    pub upper_gap: Extent,
    /// Largest error of the non-bound checks (symmetry, agreement, ...).
    pub max_check_error: f64,
    /// Descriptions of the first few violations.
    pub failures: Vec<String>,
}

const MAX_FAILURES: usize = 20;

impl SuiteReport {
    fn new(suite: Suite, trials: usize, dim: usize, seed: u64) -> Self {
        SuiteReport {
            suite,
            trials,
            dim,
            seed,
            checks: 0,
            violations: 0,
            lower_gap: Extent::empty(),
            upper_gap: Extent::empty(),
            max_check_error: 0.0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn fail(&mut self, what: String) {
        self.violations += 1;
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(what);
        }
    }

    fn bounds(&mut self, r: &BoundsReport, label: impl FnOnce() -> String) {
        self.checks += 1;
        self.lower_gap.push(r.lower_gap);
        self.upper_gap.push(r.upper_gap);
        if !r.satisfied {
            self.fail(format!("{}: lower {} exact {} upper {}", label(), r.lower, r.exact, r.upper));
        }
    }

    /// `error <= limit`.
    fn within(&mut self, error: f64, limit: f64, label: impl FnOnce() -> String) {
        self.checks += 1;
        if error.is_finite() {
            self.max_check_error = self.max_check_error.max(error);
        }
        if !(error <= limit) {
            self.fail(format!("{}: error {error:e} exceeds {limit:e}", label()));
        }
    }

    fn error(&mut self, e: Error, label: impl FnOnce() -> String) {
        self.checks += 1;
        self.fail(format!("{}: {e}", label()));
    }
}

/// Log-uniform singular values in `[lo, hi]`, non-increasing.
pub fn log_uniform_values(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo.ln()..=hi.ln()).exp()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Nonsingular square matrix with singular values log-uniform in `[lo, hi]`.
pub fn random_nonsingular(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Matrix {
    let sv = log_uniform_values(n, lo, hi, rng);
    random_matrix_with_singular_values(n, n, &sv, rng).expect("valid shape")
}

/// Rank `n - 1` square matrix: `n - 1` rows with singular values
/// log-uniform in `[0.1, 10]` over an exactly zero last row, so the missing
/// singular value is an exact zero rather than roundoff.
pub fn random_rank_deficient(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut rows = vec![0.0; n * n];
    if n > 1 {
        let sv = log_uniform_values(n - 1, 0.1, 10.0, rng);
        let g = random_matrix_with_singular_values(n - 1, n, &sv, rng).expect("valid shape");
        rows[..(n - 1) * n].copy_from_slice(&g.to_row_major());
    }
    Matrix::from_row_slice(n, n, &rows).expect("finite entries")
}

/// SPD matrix with log-eigenvalues uniform in `[-h, h]`.
pub fn random_spd_log_range(n: usize, h: f64, rng: &mut impl Rng) -> SpdMatrix {
    let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-h..=h).exp()).collect();
    random_spd_with_spectrum(&eigs, rng).expect("spectrum is positive")
}

/// The built-in functions whose `s f'(s)` is increasing on the whole half-line.
pub fn increasing_functions() -> Vec<ScalarFunction> {
    let mut fs: Vec<ScalarFunction> = [-2.0, -1.0, 0.5, 1.0, 2.0, 3.0].into_iter().map(ScalarFunction::power).collect();
    fs.push(ScalarFunction::abs_log_pow(2.0).unwrap());
    fs.push(ScalarFunction::ab_general(1.0, 2.0).unwrap());
    fs
}

/// Schatten exponents exercised by the suites.
pub const SCHATTEN_QS: [f64; 7] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0];

/// The parameter pairs covering every AB regime.
pub const AB_PARAMS: [(f64, f64); 6] = [(1.0, 2.0), (1.0, 0.0), (0.0, 1.0), (1.0, -1.0), (0.0, 0.0), (1.0, -2.0)];

/// Log-eigenvalue half-width keeping every ratio `lambda_i(A) / lambda_j(B)`
/// inside the domain of the given AB parameters.
pub fn ab_log_range(p: AbParams) -> f64 {
    match p.regime() {
        // Arguments must exceed 1/2 for (1, -2) and 1/e for the opposite
        // regime; ratios of values within e^(+-0.3) stay above e^-0.6.
        AbRegime::General if p.alpha * p.beta < 0.0 => 0.3,
        AbRegime::Opposite => 0.3,
        _ => 1.5,
    }
}

pub fn run_suite(suite: Suite, trials: usize, dim: usize, seed: u64) -> Result<SuiteReport> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be at least 1".into()));
    }
    let mut report = SuiteReport::new(suite, trials, dim, seed);
    let mut rng = rng_from_seed(seed);
    match suite {
        Suite::Rearrange => rearrange_suite(&mut report, &mut rng),
        Suite::Schatten => schatten_suite(&mut report, &mut rng),
        Suite::Distance => distance_suite(&mut report, &mut rng),
        Suite::Ablogdet => ablogdet_suite(&mut report, &mut rng),
        Suite::Perturb => perturb_suite(&mut report, &mut rng),
    }
    Ok(report)
}

fn rearrange_suite(rep: &mut SuiteReport, rng: &mut impl Rng) {
    let (n, trials) = (rep.dim, rep.trials);
    let fs = increasing_functions();
    let decreasing = ScalarFunction::ab_general(1.0, -2.0).unwrap();
    let q_half = ScalarFunction::power(0.5);
    for t in 0..trials {
        let a = random_nonsingular(n, 0.1, 10.0, rng);
        let b = random_nonsingular(n, 0.1, 10.0, rng);
        for f in &fs {
            match product_spectrum_bounds(&a, &b, f) {
                Ok(r) => rep.bounds(&r, || format!("trial {t} {}", f.label())),
                Err(e) => rep.error(e, || format!("trial {t} {}", f.label())),
            }
        }
        // Products of values in [0.75, 1.3] stay above 1/2, inside the domain.
        let a = random_nonsingular(n, 0.75, 1.3, rng);
        let b = random_nonsingular(n, 0.75, 1.3, rng);
        match product_spectrum_bounds(&a, &b, &decreasing) {
            Ok(r) => rep.bounds(&r, || format!("trial {t} {} (reversed)", decreasing.label())),
            Err(e) => rep.error(e, || format!("trial {t} {}", decreasing.label())),
        }
        if n >= 2 {
            let a = random_rank_deficient(n, rng);
            let b = random_nonsingular(n, 0.1, 10.0, rng);
            match product_spectrum_bounds(&a, &b, &q_half) {
                Ok(r) => rep.bounds(&r, || format!("trial {t} singular factor")),
                Err(e) => rep.error(e, || format!("trial {t} singular factor")),
            }
        }
    }
}

fn schatten_suite(rep: &mut SuiteReport, rng: &mut impl Rng) {
    let (n, trials) = (rep.dim, rep.trials);
    for t in 0..trials {
        let a = random_nonsingular(n, 0.1, 10.0, rng);
        let b = random_nonsingular(n, 0.1, 10.0, rng);
        for q in SCHATTEN_QS {
            match schatten_product_bounds(&a, &b, q) {
                Ok(r) => rep.bounds(&r, || format!("trial {t} q={q}")),
                Err(e) => rep.error(e, || format!("trial {t} q={q}")),
            }
        }
        let x = random_matrix(n, n + 2, rng);
        let y = random_matrix(n, n + 2, rng);
        match schatten_product_bounds(&x, &y, 2.0) {
            Ok(r) => rep.bounds(&r, || format!("trial {t} rectangular")),
            Err(e) => rep.error(e, || format!("trial {t} rectangular")),
        }
        let p = random_spd_log_range(n, 1.5, rng);
        let s = random_spd_log_range(n, 1.5, rng);
        for q in [1.0, 1.5, 2.0, 3.0] {
            let label = || format!("trial {t} trace power q={q}");
            match (carlen_lieb_check(&p, &s, q), singular_value_route(&p, &s, q)) {
                (Ok(r), Ok(sv)) => {
                    rep.bounds(&r, label);
                    rep.within((r.exact - sv).abs(), 1e-8 * (1.0 + r.exact.abs()), || {
                        format!("trial {t} route agreement q={q}")
                    });
                }
                (Err(e), _) | (_, Err(e)) => rep.error(e, label),
            }
        }
    }
}

fn distance_suite(rep: &mut SuiteReport, rng: &mut impl Rng) {
    let (n, trials) = (rep.dim, rep.trials);
    for t in 0..trials {
        let a = random_spd_log_range(n, 1.5, rng);
        let b = random_spd_log_range(n, 1.5, rng);
        let c = random_spd_log_range(n, 1.5, rng);
        let m = random_nonsingular(n, 0.5, 2.0, rng);
        for q in [1.0, 2.0, 3.0] {
            let result = (|| -> Result<()> {
                let r = distance_bounds(&a, &b, q)?;
                rep.bounds(&r, || format!("trial {t} q={q}"));
                let dab = affine_invariant_distance(&a, &b, q)?;
                let dba = affine_invariant_distance(&b, &a, q)?;
                rep.within((dab - dba).abs(), 1e-9, || format!("trial {t} symmetry q={q}"));
                let dmm = affine_invariant_distance(&a.congruence(&m)?, &b.congruence(&m)?, q)?;
                rep.within((dab - dmm).abs(), 1e-8, || format!("trial {t} congruence q={q}"));
                let dac = affine_invariant_distance(&a, &c, q)?;
                let dbc = affine_invariant_distance(&b, &c, q)?;
                rep.within(dac - dab - dbc, 1e-8, || format!("trial {t} triangle q={q}"));
                Ok(())
            })();
            if let Err(e) = result {
                rep.error(e, || format!("trial {t} q={q}"));
            }
        }
    }
}

fn ablogdet_suite(rep: &mut SuiteReport, rng: &mut impl Rng) {
    let (n, trials) = (rep.dim, rep.trials);
    for t in 0..trials {
        for (alpha, beta) in AB_PARAMS {
            let p = AbParams::new(alpha, beta).expect("finite parameters");
            let h = ab_log_range(p);
            let a = random_spd_log_range(n, h, rng);
            let b = random_spd_log_range(n, h, rng);
            let label = || format!("trial {t} ({alpha}, {beta})");
            let result = (|| -> Result<()> {
                let r = ab_logdet_bounds(&a, &b, p)?;
                rep.bounds(&r, label);
                rep.within(ab_logdet_divergence(&a, &a, p)?.abs(), 1e-10, || format!("{} D(A||A)", label()));
                if matches!(p.regime(), AbRegime::General | AbRegime::Zero) {
                    let d = r.exact;
                    let dm = ab_logdet_matrix_form(&a, &b, p)?;
                    rep.within((d - dm).abs(), 1e-8 * (1.0 + d.abs()), || format!("{} matrix form", label()));
                }
                Ok(())
            })();
            if let Err(e) = result {
                rep.error(e, label);
            }
        }
    }
}

fn perturb_suite(rep: &mut SuiteReport, rng: &mut impl Rng) {
    let (n, trials) = (rep.dim, rep.trials);
    let fs = [ScalarFunction::power(2.0), ScalarFunction::power(0.5), ScalarFunction::abs_log_pow(2.0).unwrap()];
    let eps = epsilon_decades(2, 5);
    for t in 0..trials {
        let x = random_nonsingular(n, 0.5, 3.0, rng);
        let y = random_matrix(n, n, rng);
        for f in &fs {
            match perturbation_check(&x, &y, f, &eps) {
                Ok(r) => {
                    rep.checks += 1;
                    let worst = r.error_ratios.iter().copied().fold(0.0, f64::max);
                    rep.max_check_error = rep.max_check_error.max(worst);
                    if !r.superlinear {
                        rep.fail(format!("trial {t} {}: error ratios {:?}", f.label(), r.error_ratios));
                    }
                }
                Err(e) => rep.error(e, || format!("trial {t} {}", f.label())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn all_suites_pass_small() {
        for s in Suite::ALL {
            let r = run_suite(s, 5, 3, 1).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn suites_are_reproducible() {
        let a = run_suite(Suite::Distance, 4, 3, 7).unwrap();
        let b = run_suite(Suite::Distance, 4, 3, 7).unwrap();
        assert_eq!(a.lower_gap, b.lower_gap);
        assert_eq!(a.max_check_error, b.max_check_error);
    }
}

//! Scalar functions `f` that parameterize spectral sums and their bounds.
//!
//! What matters for the inequalities is the monotonicity of `s -> s f'(s)`
//! on the positive reals; each function carries that class and can audit it.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Monotonicity of `s -> s f'(s)` on `(0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SfPrimeClass {
    Increasing,
    Decreasing,
    Neither,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Power(f64),
    AbsLogPow(f64),
    Log,
    AbGeneral { alpha: f64, beta: f64 },
    AbBetaZero(f64),
    AbAlphaZero(f64),
    AbOpposite(f64),
    Custom {
        eval: RealFn,
        deriv: RealFn,
        domain_includes_zero: bool,
        class: SfPrimeClass,
    },
}

/// A differentiable `f` with a declared class for `s f'(s)`.
#[derive(Clone)]
pub struct ScalarFunction {
    label: String,
    kind: Kind,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("class", &self.sfprime_class())
            .finish()
    }
}

/// Outcome of [`ScalarFunction::audit`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const AUDIT_PAIRS: usize = 1000;

impl ScalarFunction {
    /// `f(s) = s^q`.
    pub fn power(q: f64) -> Self {
        ScalarFunction { label: format!("power({q})"), kind: Kind::Power(q) }
    }

    /// `f(s) = |log s|^q`, `q >= 1`.
    pub fn abs_log_pow(q: f64) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("abs_log_pow needs q >= 1, got {q}")));
        }
        Ok(ScalarFunction { label: format!("abs_log_pow({q})"), kind: Kind::AbsLogPow(q) })
    }

    /// `f(s) = log s`; `s f'(s)` is constant and is classed as increasing.
    pub fn log() -> Self {
        ScalarFunction { label: "log".into(), kind: Kind::Log }
    }

    /// `f(s) = log((alpha s^beta + beta s^-alpha) / (alpha + beta))`.
    pub fn ab_general(alpha: f64, beta: f64) -> Result<Self> {
        if alpha * beta == 0.0 || alpha + beta == 0.0 || !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ab_general needs alpha*beta != 0 and alpha+beta != 0, got ({alpha}, {beta})"
            )));
        }
        Ok(ScalarFunction {
            label: format!("ab_general({alpha},{beta})"),
            kind: Kind::AbGeneral { alpha, beta },
        })
    }

    /// `f(s) = s^-alpha + alpha log s - 1`.
    pub fn ab_beta0(alpha: f64) -> Result<Self> {
        nonzero("ab_beta0", alpha)?;
        Ok(ScalarFunction { label: format!("ab_beta0({alpha})"), kind: Kind::AbBetaZero(alpha) })
    }

    /// `f(s) = s^beta - beta log s - 1`.
    pub fn ab_alpha0(beta: f64) -> Result<Self> {
        nonzero("ab_alpha0", beta)?;
        Ok(ScalarFunction { label: format!("ab_alpha0({beta})"), kind: Kind::AbAlphaZero(beta) })
    }

    /// `f(s) = log(s^alpha / (1 + alpha log s))`, defined where `1 + alpha log s > 0`.
    pub fn ab_neg(alpha: f64) -> Result<Self> {
        nonzero("ab_neg", alpha)?;
        Ok(ScalarFunction { label: format!("ab_neg({alpha})"), kind: Kind::AbOpposite(alpha) })
    }

    /// User-supplied function. The declared class is audited before acceptance.
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain_includes_zero: bool,
        class: SfPrimeClass,
    ) -> Result<Self> {
        let f = ScalarFunction {
            label: label.into(),
            kind: Kind::Custom {
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
                domain_includes_zero,
                class,
            },
        };
        let report = f.audit(0);
        if !report.passed() {
            return Err(Error::UnsupportedFunction(format!(
                "{}: declared {:?} but {} of {} sampled pairs disagree",
                f.label, class, report.violations, report.checked
            )));
        }
        Ok(f)
    }

    /// Looks up a built-in by its command-line name.
    pub fn by_name(name: &str, q: Option<f64>, alpha: Option<f64>, beta: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("function {name} needs --{what}")))
        };
        match name {
            "power" => Ok(Self::power(need(q, "q")?)),
            "abs_log_pow" => Self::abs_log_pow(need(q, "q")?),
            "log" => Ok(Self::log()),
            "ab_general" => Self::ab_general(need(alpha, "alpha")?, need(beta, "beta")?),
            "ab_beta0" => Self::ab_beta0(need(alpha, "alpha")?),
            "ab_alpha0" => Self::ab_alpha0(need(beta, "beta")?),
            "ab_neg" => Self::ab_neg(need(alpha, "alpha")?),
            other => Err(Error::UnsupportedFunction(format!("unknown function name {other:?}"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Power(q) => {
                if *q == 0.0 {
                    1.0
                } else {
                    s.powf(*q)
                }
            }
            Kind::AbsLogPow(q) => s.ln().abs().powf(*q),
            Kind::Log => s.ln(),
            Kind::AbGeneral { alpha, beta } => {
                let l = s.ln();
                let num = alpha * (beta * l).exp_m1() + beta * (-alpha * l).exp_m1();
                (num / (alpha + beta)).ln_1p()
            }
            Kind::AbBetaZero(alpha) => {
                let l = s.ln();
                (-alpha * l).exp_m1() + alpha * l
            }
            Kind::AbAlphaZero(beta) => {
                let l = s.ln();
                (beta * l).exp_m1() - beta * l
            }
            Kind::AbOpposite(alpha) => {
                let al = alpha * s.ln();
                if al <= -1.0 {
                    f64::NAN
                } else {
                    al - al.ln_1p()
                }
            }
            Kind::Custom { eval, .. } => eval(s),
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Custom { deriv, .. } => deriv(s),
            Kind::Power(q) if *q == 0.0 => 0.0,
            Kind::Power(q) => q * s.powf(q - 1.0),
            _ => self.s_fprime(s) / s,
        }
    }

    /// `s f'(s)`, evaluated in closed form for the built-ins.
    pub fn s_fprime(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Power(q) => {
                if *q == 0.0 {
                    0.0
                } else {
                    q * s.powf(*q)
                }
            }
            Kind::AbsLogPow(q) => {
                let l = s.ln();
                if l == 0.0 {
                    0.0
                } else {
                    l.signum() * q * l.abs().powf(q - 1.0)
                }
            }
            Kind::Log => 1.0,
            Kind::AbGeneral { alpha, beta } => {
                let sb = s.powf(*beta);
                let sa = s.powf(-alpha);
                alpha * beta * (sb - sa) / (alpha * sb + beta * sa)
            }
            Kind::AbBetaZero(alpha) => -alpha * (-alpha * s.ln()).exp_m1(),
            Kind::AbAlphaZero(beta) => beta * (beta * s.ln()).exp_m1(),
            Kind::AbOpposite(alpha) => {
                let l = s.ln();
                alpha * alpha * l / (1.0 + alpha * l)
            }
            Kind::Custom { deriv, .. } => s * deriv(s),
        }
    }

    /// Whether `f` is defined and right-continuous at zero.
    pub fn domain_includes_zero(&self) -> bool {
        match &self.kind {
            Kind::Power(q) => *q > 0.0,
            Kind::Custom { domain_includes_zero, .. } => *domain_includes_zero,
            _ => false,
        }
    }

    pub fn sfprime_class(&self) -> SfPrimeClass {
        match &self.kind {
            Kind::AbGeneral { alpha, beta } => {
                if alpha * beta > 0.0 {
                    SfPrimeClass::Increasing
                } else {
                    SfPrimeClass::Decreasing
                }
            }
            Kind::Custom { class, .. } => *class,
            _ => SfPrimeClass::Increasing,
        }
    }

    /// `f` evaluates to a finite value at `s`.
    pub fn in_domain(&self, s: f64) -> bool {
        if s == 0.0 {
            return self.domain_includes_zero();
        }
        s > 0.0 && self.eval(s).is_finite()
    }

    /// Samples `AUDIT_PAIRS` pairs `s2 > s1 > 0`, log-uniform in `[1e-4, 1e4]`,
    /// and counts disagreements between `sign(s2 f'(s2) - s1 f'(s1))` and the
    /// declared class. Pairs outside the domain are skipped.
    pub fn audit(&self, seed: u64) -> AuditReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let class = self.sfprime_class();
        let mut report = AuditReport { checked: 0, skipped: 0, violations: 0 };
        for _ in 0..AUDIT_PAIRS {
            let a = 10f64.powf(rng.random_range(-4.0..4.0));
            let b = 10f64.powf(rng.random_range(-4.0..4.0));
            let (s1, s2) = if a < b { (a, b) } else { (b, a) };
            let (g1, g2) = (self.s_fprime(s1), self.s_fprime(s2));
            if s1 == s2 || !self.in_domain(s1) || !self.in_domain(s2) || !g1.is_finite() || !g2.is_finite() {
                report.skipped += 1;
                continue;
            }
            report.checked += 1;
            let diff = g2 - g1;
            let tol = 1e-12 * (1.0 + g1.abs() + g2.abs());
            let bad = match class {
                SfPrimeClass::Increasing => diff < -tol,
                SfPrimeClass::Decreasing => diff > tol,
                SfPrimeClass::Neither => false,
            };
            if bad {
                report.violations += 1;
            }
        }
        report
    }
}

fn nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} needs a finite nonzero parameter, got {v}")));
    }
    Ok(())
}

//! Executable checks of the level-n relations between convexity of `f`,
//! Jensen-type inequalities, and monotonicity of `f(t)/t` on `[0, α)`, plus
//! the interpolation-class gap and the finite-interval contrast.

mod corpus;
mod jensen;
mod suites;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use corpus::{constrained_quintic, quintic_from_stream, standard_corpus, CorpusMember, MemberLabel};
pub use jensen::{jensen_contraction, jensen_projection, jensen_two_contractions};
pub use suites::*;

use crate::classifiers::certificate::rows_of;
use crate::classifiers::{
    is_n_convex, is_n_monotone_dd, Certificate, ClassReport, JensenForm, Payload, Route, SearchConfig, Verdict,
};
use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assertion {
    /// `f(0) ≤ 0` and `f` is n-convex
    #[serde(rename = "i_convex_f0")]
    ConvexF0,
    /// `f(c*ac) ≤ c*f(a)c`
    #[serde(rename = "ii_jensen")]
    Jensen,
    /// `f(t)/t` is n-monotone on `(0, α)`
    #[serde(rename = "iii_quotient_monotone")]
    QuotientMonotone,
    /// `f(pap) ≤ pf(a)p`
    #[serde(rename = "iv_projection")]
    Projection,
    /// `f(c*ac + d*bd) ≤ c*f(a)c + d*f(b)d`
    #[serde(rename = "v3_two_contractions")]
    TwoContractions,
}

impl Assertion {
    pub const ALL: [Assertion; 5] = [
        Assertion::ConvexF0,
        Assertion::Jensen,
        Assertion::QuotientMonotone,
        Assertion::Projection,
        Assertion::TwoContractions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Assertion::ConvexF0 => "i_convex_f0",
            Assertion::Jensen => "ii_jensen",
            Assertion::QuotientMonotone => "iii_quotient_monotone",
            Assertion::Projection => "iv_projection",
            Assertion::TwoContractions => "v3_two_contractions",
        }
    }
}

impl std::fmt::Display for Assertion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionVerdict {
    pub assertion: Assertion,
    pub function: String,
    pub alpha: f64,
    pub order: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// The classifier run behind the verdict, certificate moved out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<ClassReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AssertionVerdict {
    fn from_report(assertion: Assertion, f: &FunctionSpec, alpha: f64, mut r: ClassReport) -> Self {
        AssertionVerdict {
            assertion,
            function: f.text(),
            alpha,
            order: r.order,
            verdict: r.verdict,
            certificate: r.certificate.take(),
            notes: std::mem::take(&mut r.notes),
            evidence: Some(r),
        }
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.certificate.as_ref().map(|c| c.margin).or(self.evidence.as_ref().and_then(|r| r.worst_margin))
    }
}

/// `[0, α)`, or `[0, ∞)` for infinite `α`.
pub fn half_open(alpha: f64) -> Result<IntervalSpec> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInterval(format!("alpha must be positive, got {alpha}")));
    }
    IntervalSpec::new(0.0, alpha, true, false)
}

/// `(0, α)`, where the quotient `f(t)/t` lives.
pub fn open_quotient_interval(alpha: f64) -> Result<IntervalSpec> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInterval(format!("alpha must be positive, got {alpha}")));
    }
    IntervalSpec::new(0.0, alpha, false, false)
}

/// `f(0) > 0` in Jensen form: `a = 0`, `c = 0` gives `f(0)·1 ≤ 0`.
fn positive_at_zero_certificate(f: &FunctionSpec, n: usize, tol: f64) -> Result<Certificate> {
    let zero = DMatrix::<f64>::zeros(n, n);
    let mut cert = Certificate {
        function: f.text(),
        domain: *f.domain(),
        order: n,
        claim: Verdict::Fail,
        tolerance: tol,
        margin: 0.0,
        payload: Payload::JensenPair { form: JensenForm::Contraction, a: rows_of(&zero), c: rows_of(&zero), b: None, d: None },
    };
    cert.margin = cert.recompute()?.0;
    Ok(cert)
}

/// One assertion at level `n` for `f` on `[0, α)`.
pub fn check_assertion(
    f: &FunctionSpec,
    alpha: f64,
    n: usize,
    cfg: &SearchConfig,
    assertion: Assertion,
) -> Result<AssertionVerdict> {
    let interval = half_open(alpha)?;
    let f = &f.restricted_to(&interval)?;
    let report = match assertion {
        Assertion::ConvexF0 => {
            let f0 = f.eval(0.0)?;
            let r = is_n_convex(f, &interval, n, cfg, Route::KrausDd)?;
            let mut v = AssertionVerdict::from_report(assertion, f, alpha, r);
            if f0 > 0.0 {
                v.notes.push(format!("f(0) = {f0} > 0; convexity verdict {} kept as evidence", v.verdict));
                if let Some(ev) = v.evidence.as_mut() {
                    ev.certificate = v.certificate.take();
                }
                v.verdict = Verdict::Fail;
                v.certificate = Some(positive_at_zero_certificate(f, n, cfg.tol)?);
            }
            return Ok(v);
        }
        Assertion::Jensen => jensen_contraction(f, &interval, n, cfg)?,
        Assertion::QuotientMonotone => {
            let g = f.quotient_by_t()?;
            let r = is_n_monotone_dd(&g, &open_quotient_interval(alpha)?, n, cfg)?;
            let mut v = AssertionVerdict::from_report(assertion, f, alpha, r);
            v.notes.push(format!("quotient g = {}", g.text()));
            return Ok(v);
        }
        Assertion::Projection => jensen_projection(f, &interval, n, cfg)?,
        Assertion::TwoContractions => jensen_two_contractions(f, &interval, n, cfg)?,
    };
    Ok(AssertionVerdict::from_report(assertion, f, alpha, report))
}

/// Assertions (i), (ii), (iii), (iv) and (v3) at level `n`.
pub fn check_assertions(f: &FunctionSpec, alpha: f64, n: usize, cfg: &SearchConfig) -> Result<Vec<AssertionVerdict>> {
    Assertion::ALL.iter().map(|&a| check_assertion(f, alpha, n, cfg, a)).collect()
}

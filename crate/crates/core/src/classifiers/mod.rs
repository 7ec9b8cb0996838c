//! Sampled decision procedures for n-monotonicity, n-convexity and the
//! interpolation classes `C_n`. A FAIL always carries a re-checkable
//! certificate; a PASS means no counterexample survived polishing.

pub mod certificate;
pub mod cn;
mod convex;
mod monotone;
pub(crate) mod params;
pub(crate) mod search;

use serde::{Deserialize, Serialize};

pub use certificate::{
    Certificate, CertificateKind, DiscreteMeasure, JensenForm, Payload, RecheckOutcome, DUAL_COLUMN_TOL,
    RECHECK_AGREEMENT,
};
pub use cn::{cn_class_check, cn_membership, cn_operator_check, compact_grid, kernel, nnls, CN_GRID_SIZE, CN_TOL};
pub use convex::{is_n_concave, is_n_convex};
pub use monotone::{is_n_monotone_dd, is_n_monotone_mx};
pub use search::CERTIFICATE_MARGIN;

use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::matcore::DEFAULT_PSD_TOL;

/// Largest supported matrix order.
pub const MAX_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    LoewnerDd,
    MatrixPairs,
    KrausDd,
    #[serde(rename = "local2x2")]
    Local2x2,
    CnFeasibility,
    CnOperator,
    Jensen,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::LoewnerDd => "loewner_dd",
            Route::MatrixPairs => "matrix_pairs",
            Route::KrausDd => "kraus_dd",
            Route::Local2x2 => "local2x2",
            Route::CnFeasibility => "cn_feasibility",
            Route::CnOperator => "cn_operator",
            Route::Jensen => "jensen",
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "loewner_dd" => Route::LoewnerDd,
            "matrix_pairs" => Route::MatrixPairs,
            "kraus_dd" => Route::KrausDd,
            "local2x2" => Route::Local2x2,
            "cn_feasibility" => Route::CnFeasibility,
            "cn_operator" => Route::CnOperator,
            "jensen" => Route::Jensen,
            other => return Err(Error::InvalidArgument(format!("unknown route '{other}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Monotone,
    Convex,
    Concave,
    CnMembership,
    CnOperator,
    /// Jensen-type inequality for contractions
    Jensen,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SearchConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        SearchConfig { trials, seed, tol: DEFAULT_PSD_TOL }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        SearchConfig { tol, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidArgument(format!("tolerance must be finite and non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub function: String,
    pub interval: IntervalSpec,
    pub property: Property,
    pub order: usize,
    pub verdict: Verdict,
    pub route: Route,
    pub trials: usize,
    /// Random trials evaluated before stopping; stress cases excluded.
    pub trials_run: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Smallest margin seen, after polishing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Shared bookkeeping for one classifier call.
pub(crate) struct Context<'a> {
    pub f: &'a FunctionSpec,
    pub interval: IntervalSpec,
    pub property: Property,
    pub order: usize,
    pub route: Route,
    pub cfg: SearchConfig,
}

pub(crate) fn check_order(kind: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(format!("{kind} order must be at least 1")));
    }
    if n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { kind: kind.into(), order: n, max: MAX_ORDER });
    }
    Ok(())
}

impl Context<'_> {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.f.domain().validate_sub_interval(&self.interval)
    }

    fn base(&self, verdict: Verdict) -> ClassReport {
        let mut notes = Vec::new();
        if self.interval.lower_closed || self.interval.upper_closed {
            notes.push(format!("spectra and nodes sampled in the open interior of {}", self.interval));
        }
        ClassReport {
            function: self.f.text(),
            interval: self.interval,
            property: self.property,
            order: self.order,
            verdict,
            route: self.route,
            trials: self.cfg.trials,
            trials_run: 0,
            tolerance: self.cfg.tol,
            seed: self.cfg.seed,
            worst_margin: None,
            certificate: None,
            notes,
        }
    }

    pub fn inconclusive(&self, e: &Error) -> ClassReport {
        let mut r = self.base(Verdict::Inconclusive);
        r.notes.push(format!("inconclusive: {e}"));
        r
    }

    /// Certificate for `payload` under `f_cert` with its margin recomputed
    /// from the payload, so stored and rechecked values coincide.
    pub fn certificate(&self, f_cert: &FunctionSpec, claim: Verdict, payload: Payload) -> Result<Certificate> {
        let mut cert = Certificate {
            function: f_cert.text(),
            domain: *f_cert.domain(),
            order: self.order,
            claim,
            tolerance: self.cfg.tol,
            margin: 0.0,
            payload,
        };
        cert.margin = cert.recompute()?.0;
        Ok(cert)
    }

    /// Turns a search outcome into a report. `payload` rebuilds the
    /// certificate payload from polished parameters.
    pub fn conclude(
        &self,
        outcome: Result<search::SearchResult>,
        f_cert: &FunctionSpec,
        payload: impl FnOnce(&[f64]) -> Result<Payload>,
    ) -> Result<ClassReport> {
        let res = match outcome {
            Ok(r) => r,
            Err(e) if search::is_inconclusive(&e) => return Ok(self.inconclusive(&e)),
            Err(e) => return Err(e),
        };
        let mut report = self.base(Verdict::Pass);
        report.trials_run = res.trials_run;
        report.worst_margin = res.worst_margin.is_finite().then_some(res.worst_margin);
        if let Some((params, _)) = &res.failure {
            let cert = self.certificate(f_cert, Verdict::Fail, payload(params)?)?;
            report.worst_margin = Some(cert.margin);
            report.verdict = Verdict::Fail;
            report.certificate = Some(cert);
        } else if let Some(s) = res.subthreshold {
            report.notes.push(format!(
                "{} violations below -tol polished only to {s:.3e}, above the -{CERTIFICATE_MARGIN:e} certificate threshold",
                res.violations
            ));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_and_route_names() {
        assert_eq!(serde_json::to_string(&Verdict::Inconclusive).unwrap(), "\"INCONCLUSIVE\"");
        assert_eq!(serde_json::to_string(&Route::Local2x2).unwrap(), "\"local2x2\"");
        for r in [Route::LoewnerDd, Route::MatrixPairs, Route::KrausDd, Route::Local2x2, Route::CnFeasibility] {
            assert_eq!(r.name().parse::<Route>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{r}\""));
        }
    }

    #[test]
    fn order_limits() {
        assert!(check_order("monotone", 0).is_err());
        assert!(matches!(check_order("monotone", 9), Err(Error::UnsupportedOrder { .. })));
        assert!(check_order("monotone", 8).is_ok());
    }
}

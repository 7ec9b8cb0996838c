//! Versioned run reports. JSON is authoritative; the CSV rows and text
//! lines are derived views.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::classifiers::{Certificate, ClassReport, Verdict};
use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::theorems::{
    AntiderivativeSummary, AssertionVerdict, ConcavitySummary, Discrepancy, EquivalenceSummary, GapSummary,
    ImplicationSummary, PilingSummary, Priority, QuinticSummary, SplitSummary,
};

pub const SCHEMA_VERSION: &str = "v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Jensen,
    Cn,
    Suite,
    Gap,
    Recheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub grid_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            function: None,
            interval: None,
            order: None,
            trials: 1000,
            seed: 0,
            tol: 1e-9,
            grid_size: crate::classifiers::CN_GRID_SIZE,
            output: None,
            format: OutputFormat::Json,
            route: None,
            property: None,
            alpha: None,
            suite: None,
            points: None,
        }
    }

    pub fn interval_spec(&self) -> Result<Option<IntervalSpec>> {
        self.interval.as_deref().map(parse_interval).transpose()
    }

    /// The function text parsed on the configured interval. Without one, `cn`
    /// parses on (0, 1) and every other command on the real line.
    pub fn function_spec(&self) -> Result<Option<FunctionSpec>> {
        let Some(text) = &self.function else { return Ok(None) };
        let fallback = match self.command {
            Command::Cn => IntervalSpec::open(0.0, 1.0),
            _ => IntervalSpec::real_line(),
        };
        let domain = self.interval_spec()?.unwrap_or(fallback);
        FunctionSpec::parse(text, domain).map(Some)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be finite and non-negative, got {}", self.tol));
        }
        if self.grid_size == 0 {
            return bad("grid size must be positive".into());
        }
        if self.order == Some(0) {
            return bad("order must be positive".into());
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return bad(format!("alpha must be positive, got {a}"));
            }
        }
        self.function_spec()?;
        Ok(())
    }
}

/// `"lo,hi"` is open; brackets select closedness, as in `"[0,1)"`. `inf`
/// and `-inf` are accepted as endpoints.
pub fn parse_interval(text: &str) -> Result<IntervalSpec> {
    text.parse()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecheckRecord {
    pub certificate: Certificate,
    pub recomputed_margin: Option<f64>,
    pub consistent: bool,
    pub detail: String,
}

impl RecheckRecord {
    pub fn of(certificate: Certificate) -> Self {
        match certificate.recheck() {
            Ok(o) => RecheckRecord { certificate, recomputed_margin: Some(o.margin), consistent: o.consistent, detail: o.detail },
            Err(e) => RecheckRecord { certificate, recomputed_margin: None, consistent: false, detail: e.to_string() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum ResultRecord {
    Class(ClassReport),
    Assertion(AssertionVerdict),
    Equivalence(EquivalenceSummary),
    Implication(ImplicationSummary),
    Split(SplitSummary),
    Quintic(QuinticSummary),
    Antiderivative(AntiderivativeSummary),
    Gap(GapSummary),
    Concavity(ConcavitySummary),
    Piling(PilingSummary),
    Recheck(RecheckRecord),
}

impl ResultRecord {
    pub fn discrepancies(&self) -> &[Discrepancy] {
        match self {
            ResultRecord::Equivalence(s) => &s.discrepancies,
            ResultRecord::Implication(s) => &s.discrepancies,
            ResultRecord::Quintic(s) => &s.discrepancies,
            ResultRecord::Antiderivative(s) => &s.discrepancies,
            ResultRecord::Concavity(s) => &s.discrepancies,
            ResultRecord::Piling(s) => &s.discrepancies,
            _ => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub results: Vec<ResultRecord>,
    pub discrepancies: Vec<Discrepancy>,
    /// The only field allowed to differ between identical runs.
    pub wall_clock: WallClock,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        Report {
            schema: SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            config,
            results: Vec::new(),
            discrepancies: Vec::new(),
            wall_clock: WallClock { started_unix_s: started, elapsed_s: 0.0 },
        }
    }

    pub fn push(&mut self, r: ResultRecord) {
        self.discrepancies.extend(r.discrepancies().iter().cloned());
        self.results.push(r);
    }

    pub fn finish(&mut self) {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        self.wall_clock.elapsed_s = (now - self.wall_clock.started_unix_s).max(0.0);
    }

    pub fn without_timing(&self) -> Self {
        Report { wall_clock: WallClock::default(), ..self.clone() }
    }

    pub fn has_high_priority(&self) -> bool {
        self.discrepancies.iter().any(|d| d.priority == Priority::High)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        check_schema(&v)?;
        Ok(serde_json::from_value(v)?)
    }

    /// Every embedded class report, depth first, in result order. Reports
    /// behind an assertion verdict carry that verdict and its certificate.
    pub fn class_reports(&self) -> Result<Vec<ClassReport>> {
        let mut out = Vec::new();
        for r in &self.results {
            collect_reports(&serde_json::to_value(r)?, &mut out);
        }
        Ok(out)
    }

    pub fn certificates(&self) -> Result<Vec<Certificate>> {
        certificates_in(&serde_json::to_value(self)?)
    }

    pub fn csv_rows(&self) -> Result<Vec<CsvRow>> {
        Ok(self.class_reports()?.iter().map(CsvRow::from).collect())
    }

    /// One line per check, with a digest of its certificate.
    pub fn text_lines(&self) -> Result<Vec<String>> {
        let mut lines = vec![format!("matmono {} report {}", self.tool_version, self.schema)];
        for r in self.class_reports()? {
            let digest = r.certificate.as_ref().map(certificate_digest).transpose()?.unwrap_or_else(|| "-".into());
            let margin = r.worst_margin.map_or("-".into(), |m| format!("{m:.3e}"));
            lines.push(format!(
                "{:<12} {} on {} order {} [{}] margin {} trials {} seed {} cert {}",
                r.verdict.to_string(),
                r.function,
                r.interval,
                r.order,
                r.route,
                margin,
                r.trials,
                r.seed,
                digest
            ));
        }
        for d in &self.discrepancies {
            lines.push(format!("DISCREPANCY {:?} {:?} {} order {}: {}", d.priority, d.kind, d.function, d.order, d.detail));
        }
        Ok(lines)
    }
}

fn collect_reports(v: &Value, out: &mut Vec<ClassReport>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("assertion") && m.contains_key("evidence") {
                if let Ok(a) = serde_json::from_value::<AssertionVerdict>(v.clone()) {
                    if let Some(mut r) = a.evidence {
                        r.verdict = a.verdict;
                        r.certificate = a.certificate;
                        out.push(r);
                        return;
                    }
                }
            }
            if m.contains_key("property") && m.contains_key("route") && m.contains_key("trials_run") {
                if let Ok(r) = serde_json::from_value(v.clone()) {
                    out.push(r);
                    return;
                }
            }
            m.values().for_each(|c| collect_reports(c, out));
        }
        Value::Array(a) => a.iter().for_each(|c| collect_reports(c, out)),
        _ => {}
    }
}

fn collect_certificates(v: &Value, out: &mut Vec<Certificate>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("payload") && m.contains_key("claim") {
                if let Ok(c) = serde_json::from_value(v.clone()) {
                    out.push(c);
                    return;
                }
            }
            m.values().for_each(|c| collect_certificates(c, out));
        }
        Value::Array(a) => a.iter().for_each(|c| collect_certificates(c, out)),
        _ => {}
    }
}

fn check_schema(v: &Value) -> Result<()> {
    let found = v.get("schema").and_then(Value::as_str).unwrap_or("<missing>");
    if found != SCHEMA_VERSION {
        return Err(Error::Schema { expected: SCHEMA_VERSION.into(), found: found.into() });
    }
    Ok(())
}

fn certificates_in(v: &Value) -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    collect_certificates(v, &mut out);
    Ok(out)
}

/// A single certificate as written by the cli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub certificate: Certificate,
}

impl CertificateFile {
    pub fn new(certificate: Certificate) -> Self {
        CertificateFile { schema: SCHEMA_VERSION.into(), certificate }
    }
}

/// Certificates from either a certificate file or a full report.
pub fn load_certificates(text: &str) -> Result<Vec<Certificate>> {
    let v: Value = serde_json::from_str(text)?;
    check_schema(&v)?;
    if let Some(c) = v.get("certificate") {
        return Ok(vec![serde_json::from_value(c.clone())?]);
    }
    certificates_in(&v)
}

/// First 12 hex digits of the SHA-256 of the certificate's JSON.
pub fn certificate_digest(c: &Certificate) -> Result<String> {
    let bytes = serde_json::to_vec(c)?;
    Ok(hex::encode(&Sha256::digest(&bytes)[..6]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub function: String,
    pub interval: String,
    pub order: usize,
    pub route: String,
    pub verdict: Verdict,
    pub margin: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl From<&ClassReport> for CsvRow {
    fn from(r: &ClassReport) -> Self {
        CsvRow {
            function: r.function.clone(),
            interval: r.interval.to_string(),
            order: r.order,
            route: r.route.to_string(),
            verdict: r.verdict,
            margin: r.worst_margin,
            trials: r.trials,
            seed: r.seed,
        }
    }
}

//! Batch suites over a corpus. Members run independently (in parallel with
//! the `parallel` feature) and results are merged in corpus order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{quintic_from_stream, CorpusMember, MemberLabel};
use super::{check_assertion, half_open, open_quotient_interval, Assertion, AssertionVerdict};
use crate::classifiers::certificate::Payload;
use crate::classifiers::{
    cn_class_check, is_n_concave, is_n_convex, is_n_monotone_dd, Certificate, ClassReport, Route, SearchConfig,
    Verdict,
};
use crate::divdiff::{local_criterion_matrix, CriterionKind};
use crate::error::{Error, Result};
use crate::funcmodel::{gap_polynomial, transfer_map, FunctionSpec, IntervalSpec};
use crate::matcore::HermitianMatrix;
use crate::rng::trial_rng;

/// Minimum eigenvalue over `max(1, ‖M‖)` accepted for the intermediate
/// matrices of the antiderivative argument.
pub const HADAMARD_TOL: f64 = 1e-8;

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Priority {
    /// A broken equivalence or implication; the cli exits with status 1.
    High,
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    JensenQuotientMismatch,
    ConvexityQuotientImplication,
    ShiftInvariance,
    DoublePiling,
    QuinticQuotient,
    AntiderivativeConvexity,
    ConcavityOfMonotone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub priority: Priority,
    pub function: String,
    pub order: usize,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

impl Discrepancy {
    fn new(kind: DiscrepancyKind, priority: Priority, function: String, order: usize, detail: String) -> Self {
        Discrepancy { kind, priority, function, order, detail, certificates: Vec::new() }
    }

    fn with(mut self, certs: impl IntoIterator<Item = Option<Certificate>>) -> Self {
        self.certificates.extend(certs.into_iter().flatten());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Holds,
    Violated,
    /// Hypothesis not met; not counted against the claim.
    Skipped,
    Inconclusive,
}

fn status_of(v: Verdict) -> CheckStatus {
    match v {
        Verdict::Pass => CheckStatus::Holds,
        Verdict::Fail => CheckStatus::Violated,
        Verdict::Inconclusive => CheckStatus::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// (ii) against (iii)

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub member: MemberLabel,
    pub jensen: AssertionVerdict,
    pub quotient: AssertionVerdict,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSummary {
    pub alpha: f64,
    pub order: usize,
    pub rows: Vec<EquivalenceRow>,
    pub discrepancies: Vec<Discrepancy>,
}

/// For every member, the Jensen assertion and the quotient assertion must
/// return the same verdict at level `n`.
pub fn verify_equivalence_ii_iii(
    corpus: &[CorpusMember],
    alpha: f64,
    n: usize,
    cfg: &SearchConfig,
) -> Result<EquivalenceSummary> {
    let rows = par_map(corpus, |m| -> Result<EquivalenceRow> {
        let jensen = check_assertion(&m.function, alpha, n, cfg, Assertion::Jensen)?;
        let quotient = check_assertion(&m.function, alpha, n, cfg, Assertion::QuotientMonotone)?;
        let agree = jensen.verdict == quotient.verdict;
        Ok(EquivalenceRow { member: m.label(), jensen, quotient, agree })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let discrepancies = rows
        .iter()
        .filter(|r| !r.agree)
        .map(|r| {
            Discrepancy::new(
                DiscrepancyKind::JensenQuotientMismatch,
                Priority::High,
                r.member.function.clone(),
                n,
                format!("{}: jensen {} but quotient {}", r.member.name, r.jensen.verdict, r.quotient.verdict),
            )
            .with([r.jensen.certificate.clone(), r.quotient.certificate.clone()])
        })
        .collect();
    Ok(EquivalenceSummary { alpha, order: n, rows, discrepancies })
}

// ---------------------------------------------------------------------------
// convexity with f(0) ≤ 0 against (n−1)-monotonicity of the quotient

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationRecord {
    pub function: String,
    pub alpha: f64,
    pub order: usize,
    pub status: CheckStatus,
    pub f_at_zero: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ClassReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<ClassReport>,
    /// Convexity of `f − f(0)` on the same seeds.
    pub shifted: ClassReport,
    pub shift_agrees: bool,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// If `f(0) ≤ 0` and `f` is n-convex on `[0, α)`, then `f(t)/t` must be
/// (n−1)-monotone on `(0, α)`. Also checks that convexity is unchanged by
/// subtracting `f(0)`.
pub fn verify_thm32_gap(f: &FunctionSpec, alpha: f64, n: usize, cfg: &SearchConfig) -> Result<ImplicationRecord> {
    let interval = half_open(alpha)?;
    let f = f.restricted_to(&interval)?;
    let f0 = f.eval(0.0)?;
    let shifted = is_n_convex(&f.shifted_to_zero()?, &interval, n, cfg, Route::KrausDd)?;
    let mut rec = ImplicationRecord {
        function: f.text(),
        alpha,
        order: n,
        status: CheckStatus::Skipped,
        f_at_zero: f0,
        convexity: None,
        quotient: None,
        shift_agrees: true,
        shifted,
        discrepancies: Vec::new(),
        notes: Vec::new(),
    };
    let convexity = is_n_convex(&f, &interval, n, cfg, Route::KrausDd)?;
    rec.shift_agrees = convexity.verdict == rec.shifted.verdict;
    if !rec.shift_agrees {
        rec.discrepancies.push(
            Discrepancy::new(
                DiscrepancyKind::ShiftInvariance,
                Priority::Normal,
                rec.function.clone(),
                n,
                format!("convexity {} but shifted convexity {}", convexity.verdict, rec.shifted.verdict),
            )
            .with([convexity.certificate.clone(), rec.shifted.certificate.clone()]),
        );
    }
    let hypothesis = f0 <= 0.0 && convexity.passed();
    if f0 > 0.0 {
        rec.notes.push(format!("f(0) = {f0} > 0"));
    } else if !convexity.passed() {
        rec.notes.push(format!("{n}-convexity verdict {}", convexity.verdict));
    }
    rec.convexity = Some(convexity);
    if !hypothesis {
        return Ok(rec);
    }
    if n == 1 {
        rec.status = CheckStatus::Holds;
        rec.notes.push("0-monotonicity is vacuous".into());
        return Ok(rec);
    }
    let g = f.quotient_by_t()?;
    let q = is_n_monotone_dd(&g, &open_quotient_interval(alpha)?, n - 1, cfg)?;
    rec.status = status_of(q.verdict);
    if q.failed() {
        rec.discrepancies.push(
            Discrepancy::new(
                DiscrepancyKind::ConvexityQuotientImplication,
                Priority::High,
                rec.function.clone(),
                n,
                format!("{n}-convex with f(0) ≤ 0 but quotient not {}-monotone", n - 1),
            )
            .with([q.certificate.clone()]),
        );
    }
    rec.quotient = Some(q);
    Ok(rec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationSummary {
    pub alpha: f64,
    pub order: usize,
    pub records: Vec<ImplicationRecord>,
    pub instances: usize,
    pub skipped: usize,
    pub discrepancies: Vec<Discrepancy>,
}

pub fn verify_thm32_corpus(
    corpus: &[CorpusMember],
    alpha: f64,
    n: usize,
    cfg: &SearchConfig,
) -> Result<ImplicationSummary> {
    let records = par_map(corpus, |m| verify_thm32_gap(&m.function, alpha, n, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let skipped = records.iter().filter(|r| r.status == CheckStatus::Skipped).count();
    let discrepancies = records.iter().flat_map(|r| r.discrepancies.iter().cloned()).collect();
    Ok(ImplicationSummary { alpha, order: n, instances: records.len() - skipped, skipped, records, discrepancies })
}

// ---------------------------------------------------------------------------
// the cubic −t³ + 2t² − t

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub function: String,
    pub quotient: AssertionVerdict,
    pub convexity: AssertionVerdict,
    /// A node where `f'' < 0`, taken from the convexity certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_derivative: Option<f64>,
    pub reproduced: bool,
    pub notes: Vec<String>,
}

/// `f(t) = −t³ + 2t² − t` at level 1 on `[0, 1)`: the quotient
/// `−(t − 1)²` is monotone on `(0, 1)` while `f` is not convex.
pub fn verify_prop35(cfg: &SearchConfig) -> Result<SplitSummary> {
    let f = FunctionSpec::polynomial(vec![0.0, -1.0, 2.0, -1.0], IntervalSpec::real_line());
    let quotient = check_assertion(&f, 1.0, 1, cfg, Assertion::QuotientMonotone)?;
    let convexity = check_assertion(&f, 1.0, 1, cfg, Assertion::ConvexF0)?;
    let witness = convexity.certificate.as_ref().and_then(|c| match &c.payload {
        Payload::NodeTuple { nodes, .. } => nodes.first().copied(),
        _ => None,
    });
    let second_derivative = witness.map(|t| f.derivative_eval(t, 2)).transpose()?;
    let reproduced = quotient.verdict == Verdict::Pass
        && convexity.verdict == Verdict::Fail
        && second_derivative.is_some_and(|d| d < -1e-6);
    Ok(SplitSummary {
        function: f.text(),
        quotient,
        convexity,
        witness,
        second_derivative,
        reproduced,
        notes: vec!["quotient tested on (0,1); convexity tested on [0,1), reading the interval [0,t) in the source as [0,1)".into()],
    })
}

// ---------------------------------------------------------------------------
// constrained quintics

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuinticCase {
    pub index: u64,
    pub coefficients: Vec<f64>,
    pub convexity: ClassReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<ClassReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuinticSummary {
    pub alpha: f64,
    pub generated: usize,
    /// 2-convex PASS on `[0, α)`.
    pub admitted: usize,
    pub passed: usize,
    pub inconclusive: usize,
    pub pass_rate: f64,
    /// Admitted cases whose quotient did not pass.
    pub failures: Vec<QuinticCase>,
    pub discrepancies: Vec<Discrepancy>,
}

/// `count` constrained quintics, filtered to 2-convex on `[0, α)`; each
/// admitted quotient must be 2-monotone on `(0, α)`.
pub fn verify_prop36(count: usize, alpha: f64, cfg: &SearchConfig) -> Result<QuinticSummary> {
    let interval = half_open(alpha)?;
    let quotient_interval = open_quotient_interval(alpha)?;
    let indices: Vec<u64> = (0..count as u64).collect();
    let cases = par_map(&indices, |&i| -> Result<QuinticCase> {
        let f = quintic_from_stream(cfg.seed, i).restricted_to(&interval)?;
        let convexity = is_n_convex(&f, &interval, 2, cfg, Route::KrausDd)?;
        let quotient = if convexity.passed() {
            Some(is_n_monotone_dd(&f.quotient_by_t()?, &quotient_interval, 2, cfg)?)
        } else {
            None
        };
        Ok(QuinticCase { index: i, coefficients: f.polynomial_coefficients().unwrap_or_default(), convexity, quotient })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let admitted: Vec<&QuinticCase> = cases.iter().filter(|c| c.quotient.is_some()).collect();
    let verdict = |c: &QuinticCase| c.quotient.as_ref().map(|q| q.verdict);
    let passed = admitted.iter().filter(|c| verdict(c) == Some(Verdict::Pass)).count();
    let inconclusive = admitted.iter().filter(|c| verdict(c) == Some(Verdict::Inconclusive)).count();
    let failures: Vec<QuinticCase> =
        admitted.iter().filter(|c| verdict(c) != Some(Verdict::Pass)).map(|c| (*c).clone()).collect();
    let discrepancies = failures
        .iter()
        .filter(|c| verdict(c) == Some(Verdict::Fail))
        .map(|c| {
            let q = c.quotient.as_ref().expect("admitted");
            Discrepancy::new(
                DiscrepancyKind::QuinticQuotient,
                Priority::Normal,
                q.function.clone(),
                2,
                format!("quintic {} is 2-convex but its quotient is not 2-monotone", c.index),
            )
            .with([q.certificate.clone()])
        })
        .collect();
    let pass_rate = if admitted.is_empty() { 1.0 } else { passed as f64 / admitted.len() as f64 };
    Ok(QuinticSummary {
        alpha,
        generated: count,
        admitted: admitted.len(),
        passed,
        inconclusive,
        pass_rate,
        failures,
        discrepancies,
    })
}

// ---------------------------------------------------------------------------
// antiderivative of the quotient

/// `[[t²g′/2, t³g″/6], [t³g″/6, t⁴g‴/24]]`.
pub fn weighted_quotient_matrix(g: &FunctionSpec, t: f64) -> Result<HermitianMatrix> {
    let j = g.taylor(t, 3)?;
    // taylor coefficients are g^(k)/k!
    let (d1, d2, d3) = (j[1], 2.0 * j[2], 6.0 * j[3]);
    let off = t.powi(3) * d2 / 6.0;
    HermitianMatrix::from_rows(&[vec![t * t * d1 / 2.0, off], vec![off, t.powi(4) * d3 / 24.0]])
}

fn scaled_min_eigenvalue(m: &HermitianMatrix) -> f64 {
    m.psd_check(0.0).margin()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeRecord {
    pub function: String,
    pub alpha: f64,
    pub status: CheckStatus,
    pub convexity: ClassReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative_convexity: Option<ClassReport>,
    pub points: usize,
    /// Worst scaled minimum eigenvalue of the weighted quotient matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_min: Option<f64>,
    /// Worst scaled minimum eigenvalue of their Hadamard products with
    /// `[[t⁻², t⁻³], [t⁻³, t⁻⁴]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// For `f` 2-convex on `[0, α)` with `f(0) ≤ 0`, the antiderivative `G` of
/// `g = f(t)/t` must be 2-convex on `(0, α)`, and the intermediate 2×2
/// matrices must be positive semidefinite at `points` sampled nodes.
pub fn verify_prop38(f: &FunctionSpec, alpha: f64, points: usize, cfg: &SearchConfig) -> Result<AntiderivativeRecord> {
    let interval = half_open(alpha)?;
    let f = f.restricted_to(&interval)?;
    let f0 = f.eval(0.0)?;
    let convexity = is_n_convex(&f, &interval, 2, cfg, Route::KrausDd)?;
    let mut rec = AntiderivativeRecord {
        function: f.text(),
        alpha,
        status: CheckStatus::Skipped,
        convexity,
        antiderivative: None,
        antiderivative_convexity: None,
        points,
        weighted_min: None,
        product_min: None,
        notes: Vec::new(),
    };
    if f0 > 0.0 || !rec.convexity.passed() {
        rec.notes.push(format!("hypothesis not met: f(0) = {f0}, 2-convexity {}", rec.convexity.verdict));
        return Ok(rec);
    }
    let quotient_interval = open_quotient_interval(alpha)?;
    let g = f.quotient_by_t()?;
    let big_g = match g.antiderivative(0.5 * alpha.min(1.0)) {
        Ok(h) => h,
        Err(Error::NoAntiderivative(what)) => {
            rec.notes.push(format!("no closed-form antiderivative for {what}"));
            return Ok(rec);
        }
        Err(e) => return Err(e),
    };
    rec.antiderivative = Some(big_g.text());
    let gc = is_n_convex(&big_g, &quotient_interval, 2, cfg, Route::KrausDd)?;
    let (lo, hi) = quotient_interval.interior_window();
    let mut rng = trial_rng(cfg.seed, "hadamard_points", 0);
    let (mut wmin, mut pmin) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..points {
        let t = lo + (hi - lo) * rng.random::<f64>();
        wmin = wmin.min(scaled_min_eigenvalue(&weighted_quotient_matrix(&g, t)?));
        pmin = pmin.min(scaled_min_eigenvalue(&local_criterion_matrix(&big_g, t, CriterionKind::LocalConvex)?.entries));
    }
    if points > 0 {
        rec.weighted_min = Some(wmin);
        rec.product_min = Some(pmin);
    }
    let matrices_ok = wmin >= -HADAMARD_TOL && pmin >= -HADAMARD_TOL;
    rec.status = match (status_of(gc.verdict), matrices_ok) {
        (CheckStatus::Holds, false) => CheckStatus::Violated,
        (s, _) => s,
    };
    rec.antiderivative_convexity = Some(gc);
    Ok(rec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeSummary {
    pub alpha: f64,
    pub target: usize,
    pub candidates: usize,
    pub records: Vec<AntiderivativeRecord>,
    pub holds: usize,
    pub discrepancies: Vec<Discrepancy>,
}

/// Runs `verify_prop38` over the corpus and then constrained quintics until
/// `target` records meet the hypothesis, giving up after `20·target`
/// candidates.
pub fn verify_prop38_batch(
    corpus: &[CorpusMember],
    alpha: f64,
    target: usize,
    points: usize,
    cfg: &SearchConfig,
) -> Result<AntiderivativeSummary> {
    let mut records = Vec::new();
    let mut candidates = 0;
    let met = |r: &AntiderivativeRecord| r.status != CheckStatus::Skipped;
    let corpus_fns: Vec<FunctionSpec> = corpus.iter().map(|m| m.function.clone()).collect();
    for r in par_map(&corpus_fns, |f| verify_prop38(f, alpha, points, cfg)) {
        candidates += 1;
        let r = r?;
        if met(&r) {
            records.push(r);
        }
    }
    let mut next = 0u64;
    while records.iter().filter(|r| met(r)).count() < target && candidates < 20 * target.max(1) {
        let batch: Vec<u64> = (next..next + 32).collect();
        next += 32;
        for r in par_map(&batch, |&i| verify_prop38(&quintic_from_stream(cfg.seed ^ 0x38, i), alpha, points, cfg)) {
            candidates += 1;
            let r = r?;
            if met(&r) && records.len() < target {
                records.push(r);
            }
        }
    }
    records.truncate(target);
    let holds = records.iter().filter(|r| r.status == CheckStatus::Holds).count();
    let discrepancies = records
        .iter()
        .filter(|r| r.status == CheckStatus::Violated)
        .map(|r| {
            Discrepancy::new(
                DiscrepancyKind::AntiderivativeConvexity,
                Priority::Normal,
                r.function.clone(),
                2,
                format!(
                    "antiderivative convexity {:?}, weighted min {:?}, product min {:?}",
                    r.antiderivative_convexity.as_ref().map(|c| c.verdict),
                    r.weighted_min,
                    r.product_min
                ),
            )
            .with([r.antiderivative_convexity.as_ref().and_then(|c| c.certificate.clone())])
        })
        .collect();
    Ok(AntiderivativeSummary { alpha, target, candidates, records, holds, discrepancies })
}

// ---------------------------------------------------------------------------
// gap polynomials

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    pub lower: f64,
    pub upper: f64,
    /// Final bracket width.
    pub tol: f64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig { lower: 0.05, upper: 4.0, tol: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub order: usize,
    pub function: String,
    pub bisection: BisectionConfig,
    pub bracketed: bool,
    /// Largest tested `α` with a PASS, within `bisection.tol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_alpha_hat: Option<ClassReport>,
    /// (n+1)-monotonicity on `(0, α̂)`; absent for `n = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_order: Option<ClassReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transferred: Option<String>,
    /// `C_{2n}` check of the transferred function.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cn: Option<ClassReport>,
    pub notes: Vec<String>,
}

/// The transfer of `f` from `[0, α̂)` to `[0, ∞)` by `t ↦ t/(α̂ − t)`, read
/// in the coordinate `λ = x/(1 + x)` of `(0, 1)`.
pub fn transferred_to_unit(f: &FunctionSpec, alpha_hat: f64) -> Result<FunctionSpec> {
    let back = transfer_map(&IntervalSpec::nonnegative(), &IntervalSpec::closed_open(0.0, alpha_hat))?;
    let inner = FunctionSpec::compose(&back, &FunctionSpec::transfer())?;
    FunctionSpec::compose(f, &inner)?.restricted_to(&IntervalSpec::closed_open(0.0, 1.0))
}

/// Bisection for the monotonicity radius of the gap polynomial of order
/// `n`, an (n+1)-monotonicity failure there, and the `C_{2n}` check of its
/// transfer to the half line.
pub fn gap_search(n: usize, grid: BisectionConfig, cfg: &SearchConfig, grid_size: usize) -> Result<GapSummary> {
    if n == 0 {
        return Err(Error::InvalidArgument("gap order must be at least 1".into()));
    }
    if !(grid.lower > 0.0 && grid.upper > grid.lower && grid.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad bisection bracket {grid:?}")));
    }
    let g = gap_polynomial(n);
    let test = |alpha: f64| is_n_monotone_dd(&g, &IntervalSpec::open(0.0, alpha), n, cfg);
    let mut summary = GapSummary {
        order: n,
        function: g.text(),
        bisection: grid,
        bracketed: false,
        alpha_hat: None,
        at_alpha_hat: None,
        next_order: None,
        transferred: None,
        cn: None,
        notes: Vec::new(),
    };
    let lower = test(grid.lower)?;
    let upper = test(grid.upper)?;
    if !lower.passed() || upper.passed() {
        summary.notes.push(format!(
            "bracket does not bracket: {} at {}, {} at {}",
            lower.verdict, grid.lower, upper.verdict, grid.upper
        ));
        if n == 1 {
            summary.notes.push("the identity is monotone at every order; the order-1 case is vacuous".into());
        }
        return Ok(summary);
    }
    summary.bracketed = true;
    let (mut lo, mut hi, mut best) = (grid.lower, grid.upper, lower);
    while hi - lo > grid.tol {
        let mid = 0.5 * (lo + hi);
        let r = test(mid)?;
        if r.passed() {
            lo = mid;
            best = r;
        } else {
            hi = mid;
        }
    }
    summary.alpha_hat = Some(lo);
    summary.at_alpha_hat = Some(best);
    summary.notes.push(format!("empirical radius, bracket [{lo}, {hi}]"));
    if n + 1 <= crate::classifiers::MAX_ORDER {
        summary.next_order = Some(is_n_monotone_dd(&g, &IntervalSpec::open(0.0, lo), n + 1, cfg)?);
    }
    let order = 2 * n;
    if order <= crate::classifiers::MAX_ORDER {
        let t = transferred_to_unit(&g, lo)?;
        summary.transferred = Some(t.text());
        summary.cn = Some(cn_class_check(&t, order, cfg, grid_size)?);
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// half line against finite intervals

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityRow {
    pub member: MemberLabel,
    pub monotone: ClassReport,
    pub concave: ClassReport,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteWitness {
    pub coefficients: Vec<f64>,
    pub alpha: f64,
    pub monotone: ClassReport,
    pub convex: ClassReport,
    /// 1-concavity, expected to fail for a non-affine convex witness.
    pub concave: ClassReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavitySummary {
    pub order: usize,
    pub rows: Vec<ConcavityRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<FiniteWitness>,
    pub candidates_tried: usize,
    pub discrepancies: Vec<Discrepancy>,
}

/// Width of the finite interval searched for a witness.
pub const WITNESS_ALPHA: f64 = 0.05;

/// (a) `sqrt` and `t/(1+t)` are 2n-monotone and n-concave on `(0, ∞)`;
/// (b) a polynomial that is 2-monotone and 2-convex on `[0, α)` for small
/// `α` but not concave there.
pub fn verify_mathias_remark(n: usize, cfg: &SearchConfig) -> Result<ConcavitySummary> {
    let half_line = IntervalSpec::positive();
    let members = vec![
        CorpusMember::new("sqrt", FunctionSpec::parse("sqrt", IntervalSpec::nonnegative())?),
        CorpusMember::new("t/(1+t)", FunctionSpec::parse("moebius:1,0,1,1", IntervalSpec::nonnegative())?),
    ];
    let rows = par_map(&members, |m| -> Result<ConcavityRow> {
        let monotone = is_n_monotone_dd(&m.function, &half_line, 2 * n, cfg)?;
        let concave = is_n_concave(&m.function, &half_line, n, cfg, Route::KrausDd)?;
        let consistent = !(monotone.passed() && concave.failed());
        Ok(ConcavityRow { member: m.label(), monotone, concave, consistent })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut discrepancies: Vec<Discrepancy> = rows
        .iter()
        .filter(|r| !r.consistent)
        .map(|r| {
            Discrepancy::new(
                DiscrepancyKind::ConcavityOfMonotone,
                Priority::Normal,
                r.member.function.clone(),
                n,
                format!("{}: {}-monotone but not {n}-concave", r.member.name, 2 * n),
            )
            .with([r.concave.certificate.clone()])
        })
        .collect();
    let interval = half_open(WITNESS_ALPHA)?;
    let mut witness = None;
    let mut tried = 0;
    for i in 0..500u64 {
        tried += 1;
        let f = quintic_from_stream(cfg.seed ^ 0x34, i).restricted_to(&interval)?;
        let monotone = is_n_monotone_dd(&f, &interval, 2, cfg)?;
        if !monotone.passed() {
            continue;
        }
        let convex = is_n_convex(&f, &interval, 2, cfg, Route::KrausDd)?;
        if !convex.passed() {
            continue;
        }
        let concave = is_n_concave(&f, &interval, 1, cfg, Route::KrausDd)?;
        if concave.failed() {
            witness = Some(FiniteWitness {
                coefficients: f.polynomial_coefficients().unwrap_or_default(),
                alpha: WITNESS_ALPHA,
                monotone,
                convex,
                concave,
            });
            break;
        }
    }
    if witness.is_none() {
        discrepancies.push(Discrepancy::new(
            DiscrepancyKind::ConcavityOfMonotone,
            Priority::Normal,
            "quintic stream".into(),
            2,
            format!("no 2-monotone, 2-convex, non-concave quintic among {tried} candidates"),
        ));
    }
    Ok(ConcavitySummary { order: n, rows, witness, candidates_tried: tried, discrepancies })
}

// ---------------------------------------------------------------------------
// 2n-convexity against n-level Jensen

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilingRow {
    pub member: MemberLabel,
    pub convex_double: AssertionVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jensen: Option<AssertionVerdict>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilingSummary {
    pub alpha: f64,
    pub order: usize,
    pub rows: Vec<PilingRow>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Every member with assertion (i) at level 2n must satisfy (ii) at level n.
pub fn verify_double_piling(
    corpus: &[CorpusMember],
    alpha: f64,
    n: usize,
    cfg: &SearchConfig,
) -> Result<PilingSummary> {
    let rows = par_map(corpus, |m| -> Result<PilingRow> {
        let convex_double = check_assertion(&m.function, alpha, 2 * n, cfg, Assertion::ConvexF0)?;
        if convex_double.verdict != Verdict::Pass {
            return Ok(PilingRow { member: m.label(), convex_double, jensen: None, consistent: true });
        }
        let jensen = check_assertion(&m.function, alpha, n, cfg, Assertion::Jensen)?;
        let consistent = jensen.verdict != Verdict::Fail;
        Ok(PilingRow { member: m.label(), convex_double, jensen: Some(jensen), consistent })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let discrepancies = rows
        .iter()
        .filter(|r| !r.consistent)
        .map(|r| {
            Discrepancy::new(
                DiscrepancyKind::DoublePiling,
                Priority::High,
                r.member.function.clone(),
                n,
                format!("{}: (i) holds at level {} but (ii) fails at level {n}", r.member.name, 2 * n),
            )
            .with([r.jensen.as_ref().and_then(|j| j.certificate.clone())])
        })
        .collect();
    Ok(PilingSummary { alpha, order: n, rows, discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::standard_corpus;

    fn poly(c: &[f64]) -> FunctionSpec {
        FunctionSpec::polynomial(c.to_vec(), IntervalSpec::real_line())
    }

    #[test]
    fn equivalence_on_small_corpus() {
        let corpus = vec![
            CorpusMember::new("t", poly(&[0.0, 1.0])),
            CorpusMember::new("t^2", poly(&[0.0, 0.0, 1.0])),
            CorpusMember::new("t^3", poly(&[0.0, 0.0, 0.0, 1.0])),
        ];
        let s = verify_equivalence_ii_iii(&corpus, 1.0, 2, &SearchConfig::new(1000, 3)).unwrap();
        assert!(s.discrepancies.is_empty(), "{:?}", s.discrepancies);
        assert_eq!(s.rows[2].jensen.verdict, Verdict::Fail);
        assert!(verify_equivalence_ii_iii(&[], 1.0, 2, &SearchConfig::new(10, 0)).unwrap().rows.is_empty());
    }

    #[test]
    fn implication_instances() {
        let cfg = SearchConfig::new(300, 1);
        let r = verify_thm32_gap(&poly(&[0.0, 0.0, 1.0]), 1.0, 2, &cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Holds);
        assert!(r.shift_agrees);
        let r = verify_thm32_gap(&poly(&[0.0, 1.0, 1.0]), 1.0, 2, &cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Holds);
        // positive at zero: skipped, but the shift check still runs
        let r = verify_thm32_gap(&poly(&[0.5, 0.0, 1.0]), 1.0, 2, &cfg).unwrap();
        assert_eq!(r.status, CheckStatus::Skipped);
        assert!(r.shift_agrees);
    }

    #[test]
    fn split_cubic() {
        let s = verify_prop35(&SearchConfig::new(300, 0)).unwrap();
        assert!(s.reproduced, "{s:?}");
        let t = s.witness.unwrap();
        // f'' = 4 − 6t
        assert!((s.second_derivative.unwrap() - (4.0 - 6.0 * t)).abs() < 1e-12);
    }

    #[test]
    fn weighted_matrix_of_a_quartic_quotient() {
        // f = t + t² + t⁴ gives g = 1 + t + t³
        let g = poly(&[0.0, 1.0, 1.0, 0.0, 1.0]).restricted_to(&IntervalSpec::closed_open(0.0, 1.0)).unwrap();
        let g = g.quotient_by_t().unwrap();
        // f is 2-convex on [0, 1/√10], so the matrices are positive up to there
        for t in [0.05, 0.15, 0.3] {
            let m = weighted_quotient_matrix(&g, t).unwrap();
            let (d1, d2, d3) = (1.0 + 3.0 * t * t, 6.0 * t, 6.0);
            let expect = [[t * t * d1 / 2.0, t.powi(3) * d2 / 6.0], [t.powi(3) * d2 / 6.0, t.powi(4) * d3 / 24.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m.entry(i, j) - expect[i][j]).abs() < 1e-12);
                }
            }
            let det = expect[0][0] * expect[1][1] - expect[0][1] * expect[1][0];
            assert!(det >= 0.0);
        }
    }

    #[test]
    fn antiderivative_of_square_quotient() {
        let r = verify_prop38(&poly(&[0.0, 0.0, 1.0]), 1.0, 50, &SearchConfig::new(200, 2)).unwrap();
        assert_eq!(r.status, CheckStatus::Holds, "{r:?}");
        let r = verify_prop38(&poly(&[0.0, 0.0, 0.0, 1.0]), 2.0, 50, &SearchConfig::new(200, 2)).unwrap();
        assert_eq!(r.status, CheckStatus::Skipped);
    }

    #[test]
    fn transfer_to_unit_is_rescaling() {
        let g = gap_polynomial(2);
        let t = transferred_to_unit(&g, 0.7).unwrap();
        for l in [0.1, 0.5, 0.9] {
            let x = 0.7 * l;
            assert!((t.eval(l).unwrap() - (x + x * x * x / 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn gap_order_one_is_vacuous() {
        let s = gap_search(1, BisectionConfig::default(), &SearchConfig::new(100, 0), 64).unwrap();
        assert!(!s.bracketed && s.alpha_hat.is_none());
    }

    #[test]
    fn gap_order_two_radius() {
        // local 2×2 determinant of x + x³/3 is (1 − 2x²)/3
        let s = gap_search(2, BisectionConfig::default(), &SearchConfig::new(300, 5), 64).unwrap();
        let a = s.alpha_hat.unwrap();
        assert!(a > 0.0 && (a - 0.5f64.sqrt()).abs() < 0.1, "{a}");
        let next = s.next_order.unwrap();
        assert!(next.failed());
        assert!(next.certificate.unwrap().recheck().unwrap().consistent);
    }

    #[test]
    fn double_piling_on_monomials() {
        let corpus = standard_corpus(1.0, 0, 0).unwrap();
        let s = verify_double_piling(&corpus[..3], 1.0, 1, &SearchConfig::new(300, 0)).unwrap();
        assert!(s.discrepancies.is_empty());
    }
}

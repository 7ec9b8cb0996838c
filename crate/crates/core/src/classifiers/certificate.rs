//! Certificates and the margin functions that define them. Samplers and
//! `recheck` share these functions, so a stored payload reproduces the
//! reported margin exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cn::kernel;
use super::{Property, Verdict};
use crate::divdiff::{kraus_matrix, local_criterion_matrix, loewner_matrix, CriterionKind};
use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::matcore::HermitianMatrix;

pub type Rows = Vec<Vec<f64>>;

/// Column tolerance for `aᵀK ≥ 0` in dual certificates.
pub const DUAL_COLUMN_TOL: f64 = 1e-7;

/// Stored and recomputed margins must agree to this relative precision.
pub const RECHECK_AGREEMENT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    NodeTuple,
    MatrixPair,
    JensenPair,
    InfeasibleDual,
    Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JensenForm {
    /// `f(c*ac) ≤ c*f(a)c`
    Contraction,
    /// `f(pap) ≤ pf(a)p`, `p` a projection
    Projection,
    /// `f(c*ac + d*bd) ≤ c*f(a)c + d*f(b)d`, `c*c + d*d ≤ 1`
    TwoContractions,
    /// `t*at ≤ a ⟹ t*f(a)t ≤ f(a)`
    OrderedCongruence,
}

/// Finite positive measure on `[0, ∞]` stored in the compactified coordinate
/// `u = t/(1 + t)`; `u = 1` is the atom at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.weights.len() {
            return Err(Error::InvalidArgument("measure grid and weights differ in length".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("negative measure weight".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) || self.grid.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::InvalidArgument("measure grid must increase inside [0, 1]".into()));
        }
        Ok(())
    }

    /// `∫ (1+t)λ/(1+(t−1)λ) dρ(t)`
    pub fn evaluate(&self, lambda: f64) -> f64 {
        self.grid.iter().zip(&self.weights).map(|(&u, &w)| w * kernel(lambda, u)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    NodeTuple {
        criterion: CriterionKind,
        nodes: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
    },
    MatrixPair {
        property: Property,
        a: Rows,
        b: Rows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    JensenPair {
        form: JensenForm,
        a: Rows,
        c: Rows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Rows>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<Rows>,
    },
    InfeasibleDual {
        lambdas: Vec<f64>,
        /// Compactified grid the dual is certified on.
        grid: Vec<f64>,
        a: Vec<f64>,
    },
    Measure {
        lambdas: Vec<f64>,
        measure: DiscreteMeasure,
    },
}

impl Payload {
    pub fn kind(&self) -> CertificateKind {
        match self {
            Payload::NodeTuple { .. } => CertificateKind::NodeTuple,
            Payload::MatrixPair { .. } => CertificateKind::MatrixPair,
            Payload::JensenPair { .. } => CertificateKind::JensenPair,
            Payload::InfeasibleDual { .. } => CertificateKind::InfeasibleDual,
            Payload::Measure { .. } => CertificateKind::Measure,
        }
    }
}

/// Evidence for a verdict, self-contained: the function is embedded as
/// mini-language text together with its domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub function: String,
    pub domain: IntervalSpec,
    pub order: usize,
    /// Verdict this certificate supports.
    pub claim: Verdict,
    pub tolerance: f64,
    pub margin: f64,
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecheckOutcome {
    pub margin: f64,
    /// Recomputed margin agrees with the stored one and its sign supports
    /// the claim.
    pub consistent: bool,
    pub detail: String,
}

pub fn rows_of(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn matrix_of(rows: &Rows) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if n == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::BadShape { rows: n, cols });
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

fn hermitian_of(rows: &Rows) -> Result<HermitianMatrix> {
    HermitianMatrix::new(matrix_of(rows)?)
}

pub fn node_tuple_margin(
    f: &FunctionSpec,
    criterion: CriterionKind,
    nodes: &[f64],
    s: Option<f64>,
    tol: f64,
) -> Result<f64> {
    let m = match criterion {
        CriterionKind::Loewner => loewner_matrix(f, nodes)?,
        CriterionKind::Kraus => {
            let s = s.ok_or_else(|| Error::InvalidArgument("kraus certificate needs an anchor s".into()))?;
            kraus_matrix(f, nodes, s)?
        }
        kind => {
            let t = *nodes.first().ok_or_else(|| Error::InvalidArgument("local certificate needs a point".into()))?;
            local_criterion_matrix(f, t, kind)?
        }
    };
    Ok(m.entries.psd_check(tol).margin())
}

/// Margin of `f(b) − f(a)`.
pub fn monotone_pair_margin(f: &FunctionSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<f64> {
    Ok(b.apply_function(f)?.sub(&a.apply_function(f)?)?.psd_check(tol).margin())
}

/// Margin of `λf(a) + (1−λ)f(b) − f(λa + (1−λ)b)`.
pub fn convex_pair_margin(
    f: &FunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda: f64,
    tol: f64,
) -> Result<f64> {
    let mid = a.scale(lambda).add(&b.scale(1.0 - lambda))?;
    let rhs = a.apply_function(f)?.scale(lambda).add(&b.apply_function(f)?.scale(1.0 - lambda))?;
    Ok(rhs.sub(&mid.apply_function(f)?)?.psd_check(tol).margin())
}

/// Margin of `c*f(a)c − f(c*ac)`.
pub fn jensen_margin(f: &FunctionSpec, a: &HermitianMatrix, c: &DMatrix<f64>, tol: f64) -> Result<f64> {
    let lhs = a.congruence(c)?.apply_function(f)?;
    let rhs = a.apply_function(f)?.congruence(c)?;
    Ok(rhs.sub(&lhs)?.psd_check(tol).margin())
}

/// Margin of `c*f(a)c + d*f(b)d − f(c*ac + d*bd)`.
pub fn two_contraction_margin(
    f: &FunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
    tol: f64,
) -> Result<f64> {
    let inner = a.congruence(c)?.add(&b.congruence(d)?)?;
    let rhs = a.apply_function(f)?.congruence(c)?.add(&b.apply_function(f)?.congruence(d)?)?;
    Ok(rhs.sub(&inner.apply_function(f)?)?.psd_check(tol).margin())
}

/// Margin of `f(a) − t*f(a)t`.
pub fn ordered_congruence_margin(f: &FunctionSpec, a: &HermitianMatrix, t: &DMatrix<f64>, tol: f64) -> Result<f64> {
    let fa = a.apply_function(f)?;
    Ok(fa.sub(&fa.congruence(t)?)?.psd_check(tol).margin())
}

fn values_at(f: &FunctionSpec, lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas.iter().map(|&l| f.eval(l)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `−‖Kw − f(S)‖ / ‖f(S)‖`.
pub fn measure_margin(f: &FunctionSpec, lambdas: &[f64], measure: &DiscreteMeasure) -> Result<f64> {
    measure.validate()?;
    let fs = values_at(f, lambdas)?;
    let r: Vec<f64> = lambdas.iter().zip(&fs).map(|(&l, &v)| measure.evaluate(l) - v).collect();
    Ok(-norm(&r) / norm(&fs).max(f64::MIN_POSITIVE))
}

/// `(aᵀf(S)/‖a‖, min_j (aᵀK)_j/‖a‖)`. The certificate margin is the first
/// entry divided by `‖f(S)‖`.
pub fn dual_margin(f: &FunctionSpec, lambdas: &[f64], grid: &[f64], a: &[f64]) -> Result<(f64, f64)> {
    if a.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: lambdas.len() });
    }
    let na = norm(a);
    if na == 0.0 {
        return Err(Error::InvalidArgument("zero dual vector".into()));
    }
    let fs = values_at(f, lambdas)?;
    let af: f64 = a.iter().zip(&fs).map(|(x, y)| x * y).sum();
    let min_col = grid
        .iter()
        .map(|&u| lambdas.iter().zip(a).map(|(&l, &ai)| ai * kernel(l, u)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok((af / na, min_col / na))
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        self.payload.kind()
    }

    pub fn function_spec(&self) -> Result<FunctionSpec> {
        FunctionSpec::parse(&self.function, self.domain)
    }

    /// Recomputes the margin from the payload alone.
    pub fn recompute(&self) -> Result<(f64, String)> {
        let f = self.function_spec()?;
        let tol = self.tolerance;
        Ok(match &self.payload {
            Payload::NodeTuple { criterion, nodes, s } => {
                (node_tuple_margin(&f, *criterion, nodes, *s, tol)?, format!("{criterion:?} matrix"))
            }
            Payload::MatrixPair { property, a, b, lambda } => {
                let (a, b) = (hermitian_of(a)?, hermitian_of(b)?);
                match property {
                    Property::Monotone => {
                        let order = crate::matcore::loewner_leq(&a, &b, tol)?;
                        if !order.is_psd {
                            return Ok((f64::NAN, "pair is not ordered a ≤ b".into()));
                        }
                        (monotone_pair_margin(&f, &a, &b, tol)?, "f(b) - f(a)".into())
                    }
                    Property::Convex | Property::Concave => {
                        let l = lambda.ok_or_else(|| Error::InvalidArgument("convex pair needs lambda".into()))?;
                        if !(0.0..=1.0).contains(&l) {
                            return Ok((f64::NAN, "lambda outside [0, 1]".into()));
                        }
                        (convex_pair_margin(&f, &a, &b, l, tol)?, "convex combination gap".into())
                    }
                    other => return Err(Error::InvalidArgument(format!("matrix pair for {other:?}"))),
                }
            }
            Payload::JensenPair { form, a, c, b, d } => {
                let a = hermitian_of(a)?;
                let c = matrix_of(c)?;
                let contraction_ok = |m: &DMatrix<f64>| crate::matcore::operator_norm(m) <= 1.0 + 1e-12;
                match form {
                    JensenForm::Contraction | JensenForm::Projection => {
                        if !contraction_ok(&c) {
                            return Ok((f64::NAN, "c is not a contraction".into()));
                        }
                        (jensen_margin(&f, &a, &c, tol)?, "c*f(a)c - f(c*ac)".into())
                    }
                    JensenForm::TwoContractions => {
                        let b = hermitian_of(b.as_ref().ok_or_else(|| Error::InvalidArgument("missing b".into()))?)?;
                        let d = matrix_of(d.as_ref().ok_or_else(|| Error::InvalidArgument("missing d".into()))?)?;
                        let gram = c.transpose() * &c + d.transpose() * &d;
                        let slack = HermitianMatrix::hermitian_part(&(DMatrix::identity(c.ncols(), c.ncols()) - gram));
                        if !slack.psd_check(1e-12).is_psd {
                            return Ok((f64::NAN, "c*c + d*d exceeds 1".into()));
                        }
                        (two_contraction_margin(&f, &a, &b, &c, &d, tol)?, "two-contraction gap".into())
                    }
                    JensenForm::OrderedCongruence => {
                        if !contraction_ok(&c) {
                            return Ok((f64::NAN, "t is not a contraction".into()));
                        }
                        if !a.sub(&a.congruence(&c)?)?.psd_check(tol).is_psd {
                            return Ok((f64::NAN, "hypothesis t*at ≤ a fails".into()));
                        }
                        (ordered_congruence_margin(&f, &a, &c, tol)?, "f(a) - t*f(a)t".into())
                    }
                }
            }
            Payload::InfeasibleDual { lambdas, grid, a } => {
                let (af, min_col) = dual_margin(&f, lambdas, grid, a)?;
                if min_col < -DUAL_COLUMN_TOL {
                    return Ok((f64::NAN, format!("aᵀK has column {min_col:e} below -{DUAL_COLUMN_TOL:e}")));
                }
                let scale = norm(&values_at(&f, lambdas)?).max(f64::MIN_POSITIVE);
                (af / scale, format!("aᵀf(S) = {af:e}, min column {min_col:e}"))
            }
            Payload::Measure { lambdas, measure } => (measure_margin(&f, lambdas, measure)?, "relative residual".into()),
        })
    }

    pub fn recheck(&self) -> Result<RecheckOutcome> {
        let (margin, detail) = self.recompute()?;
        let agrees = (margin - self.margin).abs() <= RECHECK_AGREEMENT * self.margin.abs().max(1.0);
        let sign_ok = match self.claim {
            Verdict::Fail => margin < -self.tolerance,
            Verdict::Pass => margin >= -self.tolerance,
            Verdict::Inconclusive => false,
        };
        Ok(RecheckOutcome { margin, consistent: margin.is_finite() && agrees && sign_ok, detail })
    }
}

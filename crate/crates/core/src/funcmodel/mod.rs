//! Function specifications: an expression tree plus the interval on which it
//! is considered. Values and derivatives are exact (closed forms and
//! structural Taylor arithmetic).

mod expr;
mod interval;
mod parse;

use std::fmt;

pub use expr::{Builtin, FnExpr, MAX_DERIVATIVE_ORDER};
pub use interval::{IntervalSpec, SAMPLING_REACH, SNAP_TOL};
pub use parse::parse_expr;

use crate::error::{Error, Result};

/// A real function together with its domain interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSpec {
    expr: FnExpr,
    domain: IntervalSpec,
}

/// Coefficients of `x + x^3/3 + ... + x^(2n-1)/(2n-1)`.
pub fn gap_coefficients(n: usize) -> Vec<f64> {
    let mut c = vec![0.0; 2 * n];
    for k in 1..=n {
        c[2 * k - 1] = 1.0 / (2 * k - 1) as f64;
    }
    c
}

/// The odd polynomial `x + x^3/3 + ... + x^(2n-1)/(2n-1)` on the real line.
pub fn gap_polynomial(n: usize) -> FunctionSpec {
    assert!(n >= 1, "gap polynomial order must be positive");
    FunctionSpec { expr: FnExpr::Polynomial(gap_coefficients(n)), domain: IntervalSpec::real_line() }
}

fn moebius_pole(expr: &FnExpr) -> Option<f64> {
    match *expr {
        FnExpr::Moebius { c, d, .. } if c != 0.0 => Some(-d / c),
        FnExpr::Transfer => Some(1.0),
        FnExpr::TransferInverse => Some(-1.0),
        _ => None,
    }
}

fn validate(expr: &FnExpr, domain: &IntervalSpec) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidFunction(msg));
    if let Some(p) = moebius_pole(expr) {
        if domain.contains(p) || domain.contains_interior(p) {
            return fail(format!("{expr} has a pole at {p} inside {domain}"));
        }
    }
    match expr {
        FnExpr::Moebius { c, d, .. } if *c == 0.0 && *d == 0.0 => {
            return fail("moebius denominator vanishes identically".into())
        }
        FnExpr::Builtin(Builtin::Sqrt) if domain.lower < 0.0 => {
            return fail(format!("sqrt requires a domain inside [0,inf), got {domain}"))
        }
        FnExpr::Builtin(Builtin::Log | Builtin::Reciprocal)
            if domain.lower < 0.0 || (domain.lower == 0.0 && domain.lower_closed) =>
        {
            return fail(format!("{expr} requires a domain inside (0,inf), got {domain}"))
        }
        FnExpr::QuotientByT(_) if domain.contains_interior(0.0) || domain.contains(0.0) => {
            return fail(format!("quotient by t needs 0 outside {domain}"))
        }
        FnExpr::Polynomial(c) if c.iter().any(|x| !x.is_finite()) => {
            return fail("non-finite polynomial coefficient".into())
        }
        _ => {}
    }
    Ok(())
}

impl FunctionSpec {
    pub fn new(expr: FnExpr, domain: IntervalSpec) -> Result<Self> {
        validate(&expr, &domain)?;
        Ok(Self { expr, domain })
    }

    /// Parses mini-language text and attaches `domain`.
    pub fn parse(text: &str, domain: IntervalSpec) -> Result<Self> {
        Self::new(parse_expr(text)?, domain)
    }

    pub fn polynomial(coeffs: impl Into<Vec<f64>>, domain: IntervalSpec) -> Self {
        Self::new(FnExpr::Polynomial(coeffs.into()), domain).expect("polynomials are valid on any interval")
    }

    /// `t / (1 - t)` on `[0, 1)`.
    pub fn transfer() -> Self {
        Self { expr: FnExpr::Transfer, domain: IntervalSpec::closed_open(0.0, 1.0) }
    }

    /// `s / (1 + s)` on `[0, ∞)`.
    pub fn transfer_inverse() -> Self {
        Self { expr: FnExpr::TransferInverse, domain: IntervalSpec::nonnegative() }
    }

    pub fn affine(scale: f64, offset: f64, domain: IntervalSpec) -> Self {
        Self { expr: FnExpr::Affine { scale, offset }, domain }
    }

    pub fn expr(&self) -> &FnExpr {
        &self.expr
    }

    pub fn domain(&self) -> &IntervalSpec {
        &self.domain
    }

    /// Mini-language rendering of the expression (without the domain).
    pub fn text(&self) -> String {
        self.expr.to_string()
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.expr, FnExpr::Polynomial(_) | FnExpr::Affine { .. })
    }

    pub fn polynomial_coefficients(&self) -> Option<Vec<f64>> {
        match &self.expr {
            FnExpr::Polynomial(c) => Some(c.clone()),
            FnExpr::Affine { scale, offset } => Some(vec![*offset, *scale]),
            _ => None,
        }
    }

    pub fn with_domain(&self, domain: IntervalSpec) -> Result<Self> {
        Self::new(self.expr.clone(), domain)
    }

    /// The same expression on `sub`, which must lie inside the domain.
    pub fn restricted_to(&self, sub: &IntervalSpec) -> Result<Self> {
        self.domain.validate_sub_interval(sub)?;
        self.with_domain(*sub)
    }

    fn locate(&self, t: f64) -> Result<f64> {
        self.domain
            .snap(t)
            .ok_or_else(|| Error::DomainViolation { value: t, domain: self.domain.to_string() })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.expr.value(self.locate(t)?)
    }

    /// Exact `k`-th derivative at `t`.
    pub fn derivative_eval(&self, t: f64, k: usize) -> Result<f64> {
        let jet = self.taylor(t, k)?;
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        Ok(jet[k] * fact)
    }

    /// Normalized Taylor coefficients `f^(k)(t)/k!`, `k = 0..=order`.
    pub fn taylor(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        self.expr.taylor(self.locate(t)?, order)
    }

    /// `g(t) = f(t)/t` on the part of the domain on one side of zero.
    /// Polynomials with zero constant term reduce to an explicit polynomial;
    /// otherwise the result keeps the rational `quot(...)` form.
    pub fn quotient_by_t(&self) -> Result<Self> {
        let d = &self.domain;
        if d.contains_interior(0.0) {
            return Err(Error::InvalidFunction(format!("0 is interior to {d}; f(t)/t is not defined there")));
        }
        let domain = if d.lower >= 0.0 {
            IntervalSpec::new(d.lower.max(0.0), d.upper, false, false)?
        } else {
            IntervalSpec::new(d.lower, d.upper.min(0.0), false, false)?
        };
        let expr = match &self.expr {
            FnExpr::Polynomial(c) if c.first().is_none_or(|&c0| c0 == 0.0) => {
                FnExpr::Polynomial(if c.len() > 1 { c[1..].to_vec() } else { vec![0.0] })
            }
            FnExpr::Affine { scale, offset } if *offset == 0.0 => FnExpr::Polynomial(vec![*scale]),
            other => FnExpr::QuotientByT(Box::new(other.clone())),
        };
        Self::new(expr, domain)
    }

    /// `h(t) = f(t) - f(0)`.
    pub fn shifted_to_zero(&self) -> Result<Self> {
        self.expr.value(0.0)?;
        let expr = match &self.expr {
            FnExpr::Polynomial(c) => {
                let mut c = c.clone();
                if let Some(c0) = c.first_mut() {
                    *c0 = 0.0;
                }
                FnExpr::Polynomial(c)
            }
            other => FnExpr::ShiftedToZero(Box::new(other.clone())),
        };
        Self::new(expr, self.domain)
    }

    /// `outer ∘ inner`, on the domain of `inner`.
    pub fn compose(outer: &FunctionSpec, inner: &FunctionSpec) -> Result<Self> {
        Self::new(FnExpr::Compose(Box::new(outer.expr.clone()), Box::new(inner.expr.clone())), inner.domain)
    }

    pub fn negated(&self) -> Self {
        let expr = match &self.expr {
            FnExpr::Polynomial(c) => FnExpr::Polynomial(c.iter().map(|x| -x).collect()),
            other => FnExpr::Compose(Box::new(FnExpr::Polynomial(vec![0.0, -1.0])), Box::new(other.clone())),
        };
        Self { expr, domain: self.domain }
    }

    /// `G(t) = ∫_{basepoint}^t f`. Polynomials integrate to polynomials;
    /// other kinds with an elementary primitive keep an `integ(...)` node.
    pub fn antiderivative(&self, basepoint: f64) -> Result<Self> {
        let base = self.locate(basepoint)?;
        if !self.expr.has_primitive() {
            return Err(Error::NoAntiderivative(self.text()));
        }
        let expr = match &self.expr {
            FnExpr::Polynomial(c) => {
                let mut out = vec![0.0];
                out.extend(c.iter().enumerate().map(|(k, ck)| ck / (k + 1) as f64));
                let shift = expr::primitive(&FnExpr::Polynomial(c.clone()), base)?;
                out[0] = -shift;
                FnExpr::Polynomial(out)
            }
            other => {
                expr::primitive(other, base)?;
                FnExpr::Antiderivative(Box::new(other.clone()), base)
            }
        };
        Self::new(expr, self.domain)
    }

    /// Inverse of an increasing affine or Möbius map, on the image interval.
    pub fn inverse(&self) -> Result<Self> {
        let inv = match self.expr {
            FnExpr::Affine { scale, offset } if scale > 0.0 => {
                FnExpr::Affine { scale: 1.0 / scale, offset: -offset / scale }
            }
            FnExpr::Polynomial(ref c) if c.len() == 2 && c[1] > 0.0 => {
                FnExpr::Affine { scale: 1.0 / c[1], offset: -c[0] / c[1] }
            }
            FnExpr::Moebius { a, b, c, d } if a * d - b * c > 0.0 => FnExpr::Moebius { a: d, b: -b, c: -c, d: a },
            FnExpr::Transfer => FnExpr::TransferInverse,
            FnExpr::TransferInverse => FnExpr::Transfer,
            _ => return Err(Error::InvalidFunction(format!("{} is not an invertible increasing map", self.text()))),
        };
        let image = self.image_of_domain()?;
        Self::new(inv, image)
    }

    fn endpoint_image(&self, x: f64, upper: bool) -> f64 {
        if x.is_infinite() {
            return match self.expr {
                FnExpr::Moebius { a, c, .. } if c != 0.0 => a / c,
                FnExpr::Transfer => -1.0,
                FnExpr::TransferInverse => 1.0,
                _ => x,
            };
        }
        match self.expr.value(x) {
            Ok(v) => v,
            Err(_) if upper => f64::INFINITY,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn image_of_domain(&self) -> Result<IntervalSpec> {
        let d = &self.domain;
        IntervalSpec::new(
            self.endpoint_image(d.lower, false),
            self.endpoint_image(d.upper, true),
            d.lower_closed,
            d.upper_closed,
        )
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.expr, self.domain)
    }
}

/// Increasing map of `source` onto `target`: affine between finite
/// intervals, Möbius between a finite and a half-infinite interval
/// (`t ↦ lo' + (t - lo)/(hi - t)` and its inverse).
pub fn transfer_map(source: &IntervalSpec, target: &IntervalSpec) -> Result<FunctionSpec> {
    let unsupported = || Error::UnsupportedTransfer {
        source_interval: source.to_string(),
        target: target.to_string(),
    };
    let (sl, su, tl, tu) = (source.lower, source.upper, target.lower, target.upper);
    let expr = match (source.is_finite(), target.is_finite()) {
        (true, true) => {
            let scale = (tu - tl) / (su - sl);
            FnExpr::Affine { scale, offset: tl - scale * sl }
        }
        (true, false) if tl.is_finite() => FnExpr::Moebius { a: 1.0 - tl, b: tl * su - sl, c: -1.0, d: su },
        (false, true) if sl.is_finite() => FnExpr::Moebius { a: tu, b: tl - tu * sl, c: 1.0, d: 1.0 - sl },
        (false, false) if sl.is_finite() && tl.is_finite() => FnExpr::Affine { scale: 1.0, offset: tl - sl },
        _ => return Err(unsupported()),
    };
    FunctionSpec::new(expr, *source)
}

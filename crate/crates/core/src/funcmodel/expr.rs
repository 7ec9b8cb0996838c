//! Expression trees for the supported function kinds, with exact value and
//! Taylor-jet evaluation.
//!
//! A jet of order `k` at `t` is the vector `[f(t), f'(t), f''(t)/2!, ...,
//! f^(k)(t)/k!]`. Composite kinds are differentiated structurally through
//! truncated power-series arithmetic, never numerically.

use std::fmt;

use crate::error::{Error, Result};

/// Highest derivative order any kind will produce.
pub const MAX_DERIVATIVE_ORDER: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Sqrt,
    Log,
    Exp,
    Reciprocal,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sqrt => "sqrt",
            Builtin::Log => "log",
            Builtin::Exp => "exp",
            Builtin::Reciprocal => "recip",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FnExpr {
    /// Coefficients in ascending degree.
    Polynomial(Vec<f64>),
    /// `(a t + b) / (c t + d)`
    Moebius { a: f64, b: f64, c: f64, d: f64 },
    Builtin(Builtin),
    /// `t / (1 - t)`
    Transfer,
    /// `s / (1 + s)`
    TransferInverse,
    /// `scale * t + offset`
    Affine { scale: f64, offset: f64 },
    /// `outer(inner(t))`
    Compose(Box<FnExpr>, Box<FnExpr>),
    /// `inner(t) / t`
    QuotientByT(Box<FnExpr>),
    /// `inner(t) - inner(0)`
    ShiftedToZero(Box<FnExpr>),
    /// `∫_{basepoint}^t inner`
    Antiderivative(Box<FnExpr>, f64),
}

fn domain_err(value: f64, domain: &str) -> Error {
    Error::DomainViolation { value, domain: domain.to_string() }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Taylor coefficients of a polynomial about `t` (repeated synthetic division).
fn poly_jet(coeffs: &[f64], t: f64, order: usize) -> Vec<f64> {
    let mut work = coeffs.to_vec();
    let mut out = vec![0.0; order + 1];
    for slot in out.iter_mut() {
        if work.is_empty() {
            break;
        }
        let mut acc = 0.0;
        let mut next = vec![0.0; work.len().saturating_sub(1)];
        for (i, &c) in work.iter().enumerate().rev() {
            acc = acc * t + c;
            if i > 0 {
                next[i - 1] = acc;
            }
        }
        *slot = acc;
        work = next;
    }
    out
}

fn series_mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    for (i, &ai) in a.iter().enumerate().take(order + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn binomial_half(k: usize) -> f64 {
    // binom(1/2, k)
    (0..k).fold(1.0, |acc, i| acc * (0.5 - i as f64) / (i as f64 + 1.0))
}

fn moebius_value(a: f64, b: f64, c: f64, d: f64, t: f64) -> Result<f64> {
    let den = c * t + d;
    if den == 0.0 {
        return Err(Error::Singular { what: "moebius denominator".into(), at: t });
    }
    Ok((a * t + b) / den)
}

fn moebius_jet(a: f64, b: f64, c: f64, d: f64, t: f64, order: usize) -> Result<Vec<f64>> {
    if c == 0.0 {
        if d == 0.0 {
            return Err(Error::Singular { what: "moebius denominator".into(), at: t });
        }
        return Ok(poly_jet(&[b / d, a / d], t, order));
    }
    let u = c * t + d;
    if u == 0.0 {
        return Err(Error::Singular { what: "moebius denominator".into(), at: t });
    }
    // (a t + b)/(c t + d) = a/c + k/(c t + d)
    let k = (b * c - a * d) / c;
    let mut out = Vec::with_capacity(order + 1);
    out.push(a / c + k / u);
    let ratio = -c / u;
    let mut term = k / u;
    for _ in 1..=order {
        term *= ratio;
        out.push(term);
    }
    Ok(out)
}

/// Extra series terms for the backward quotient recurrence.
const QUOTIENT_TAIL: usize = 40;

/// Jet of `f(x)/x` at `t ≠ 0`. Writing `f = f(0) + h`, the part `h/x`
/// satisfies `q_{k−1} = h_k − t q_k`, which is stable run downwards from a
/// truncated tail whenever the series of `f` at `t` reaches 0. The upward
/// form `q_k = (f_k − q_{k−1})/t` loses a factor `1/t` per step to
/// cancellation near 0 and is only used when the downward sum does not
/// reproduce `h(t)/t`.
fn quotient_jet(inner: &FnExpr, t: f64, order: usize) -> Result<Vec<f64>> {
    if let Ok(f0) = inner.value(0.0) {
        let f = inner.taylor_unchecked(t, order + QUOTIENT_TAIL)?;
        let big = f.len() - 1;
        let mut q = vec![0.0; big + 1];
        for k in (0..big).rev() {
            q[k] = f[k + 1] - t * q[k + 1];
        }
        // the downward sum is Σ_j h_j (−t)^(j−k−1); its tail must be negligible
        let weights: Vec<f64> = f.iter().enumerate().map(|(j, fj)| (fj * t.abs().powi(j as i32)).abs()).collect();
        let head = weights.iter().cloned().fold(f0.abs(), f64::max);
        let tail = weights[big - 4..].iter().cloned().fold(0.0, f64::max);
        if q.iter().all(|x| x.is_finite()) && tail <= 1e-16 * head {
            q.truncate(order + 1);
            if f0 != 0.0 {
                for (qk, rk) in q.iter_mut().zip(moebius_jet(0.0, f0, 1.0, 0.0, t, order)?) {
                    *qk += rk;
                }
            }
            return Ok(q);
        }
    }
    let f = inner.taylor_unchecked(t, order)?;
    let mut q = Vec::with_capacity(order + 1);
    let mut prev = 0.0;
    for fk in f {
        let qk = (fk - prev) / t;
        q.push(qk);
        prev = qk;
    }
    Ok(q)
}

impl FnExpr {
    pub fn polynomial(coeffs: impl Into<Vec<f64>>) -> Self {
        FnExpr::Polynomial(coeffs.into())
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let v = match self {
            FnExpr::Polynomial(c) => horner(c, t),
            FnExpr::Moebius { a, b, c, d } => moebius_value(*a, *b, *c, *d, t)?,
            FnExpr::Transfer => moebius_value(1.0, 0.0, -1.0, 1.0, t)?,
            FnExpr::TransferInverse => moebius_value(1.0, 0.0, 1.0, 1.0, t)?,
            FnExpr::Affine { scale, offset } => scale * t + offset,
            FnExpr::Builtin(b) => match b {
                Builtin::Sqrt if t < 0.0 => return Err(domain_err(t, "[0,inf)")),
                Builtin::Sqrt => t.sqrt(),
                Builtin::Log if t <= 0.0 => return Err(domain_err(t, "(0,inf)")),
                Builtin::Log => t.ln(),
                Builtin::Exp => t.exp(),
                Builtin::Reciprocal if t == 0.0 => {
                    return Err(Error::Singular { what: "recip".into(), at: t })
                }
                Builtin::Reciprocal => 1.0 / t,
            },
            FnExpr::Compose(outer, inner) => outer.value(inner.value(t)?)?,
            FnExpr::QuotientByT(inner) => {
                if t == 0.0 {
                    return Err(Error::Singular { what: "quotient by t".into(), at: t });
                }
                inner.value(t)? / t
            }
            FnExpr::ShiftedToZero(inner) => inner.value(t)? - inner.value(0.0)?,
            FnExpr::Antiderivative(inner, base) => primitive(inner, t)? - primitive(inner, *base)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular { what: self.to_string(), at: t })
        }
    }

    /// Normalized Taylor coefficients `f^(k)(t)/k!` for `k = 0..=order`.
    pub fn taylor(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder {
                kind: self.kind_name().into(),
                order,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        let jet = self.taylor_unchecked(t, order)?;
        if jet.iter().all(|x| x.is_finite()) {
            Ok(jet)
        } else {
            Err(Error::Singular { what: self.to_string(), at: t })
        }
    }

    fn taylor_unchecked(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        Ok(match self {
            FnExpr::Polynomial(c) => poly_jet(c, t, order),
            FnExpr::Affine { scale, offset } => poly_jet(&[*offset, *scale], t, order),
            FnExpr::Moebius { a, b, c, d } => moebius_jet(*a, *b, *c, *d, t, order)?,
            FnExpr::Transfer => moebius_jet(1.0, 0.0, -1.0, 1.0, t, order)?,
            FnExpr::TransferInverse => moebius_jet(1.0, 0.0, 1.0, 1.0, t, order)?,
            FnExpr::Builtin(b) => builtin_jet(*b, t, order)?,
            FnExpr::Compose(outer, inner) => {
                let g = inner.taylor_unchecked(t, order)?;
                let f = outer.taylor_unchecked(g[0], order)?;
                let mut delta = g;
                delta[0] = 0.0;
                // Horner in the series variable: f_K, then acc*delta + f_m
                let mut acc = vec![0.0; order + 1];
                acc[0] = f[order];
                for m in (0..order).rev() {
                    acc = series_mul(&acc, &delta, order);
                    acc[0] += f[m];
                }
                acc
            }
            FnExpr::QuotientByT(inner) => {
                if t == 0.0 {
                    return Err(Error::Singular { what: "quotient by t".into(), at: t });
                }
                quotient_jet(inner, t, order)?
            }
            FnExpr::ShiftedToZero(inner) => {
                let mut f = inner.taylor_unchecked(t, order)?;
                f[0] -= inner.value(0.0)?;
                f
            }
            FnExpr::Antiderivative(inner, _) => {
                let mut out = Vec::with_capacity(order + 1);
                out.push(self.value(t)?);
                if order > 0 {
                    let g = inner.taylor_unchecked(t, order - 1)?;
                    out.extend(g.iter().enumerate().map(|(k, gk)| gk / (k + 1) as f64));
                }
                out
            }
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FnExpr::Polynomial(_) => "polynomial",
            FnExpr::Moebius { .. } => "moebius",
            FnExpr::Builtin(b) => b.name(),
            FnExpr::Transfer => "transfer",
            FnExpr::TransferInverse => "transfer_inverse",
            FnExpr::Affine { .. } => "affine",
            FnExpr::Compose(..) => "composition",
            FnExpr::QuotientByT(_) => "quotient_by_t",
            FnExpr::ShiftedToZero(_) => "shifted_to_zero",
            FnExpr::Antiderivative(..) => "antiderivative",
        }
    }

    /// Whether a closed-form primitive is available.
    pub fn has_primitive(&self) -> bool {
        match self {
            FnExpr::Polynomial(_)
            | FnExpr::Affine { .. }
            | FnExpr::Moebius { .. }
            | FnExpr::Transfer
            | FnExpr::TransferInverse
            | FnExpr::Builtin(_) => true,
            FnExpr::QuotientByT(inner) => matches!(**inner, FnExpr::Polynomial(_)),
            FnExpr::ShiftedToZero(inner) => inner.has_primitive(),
            _ => false,
        }
    }
}

fn builtin_jet(b: Builtin, t: f64, order: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(order + 1);
    match b {
        Builtin::Sqrt => {
            if t < 0.0 || (t == 0.0 && order > 0) {
                return Err(domain_err(t, "(0,inf)"));
            }
            let root = t.sqrt();
            let mut tp = 1.0;
            for k in 0..=order {
                out.push(root * binomial_half(k) * tp);
                tp /= t;
            }
        }
        Builtin::Log => {
            if t <= 0.0 {
                return Err(domain_err(t, "(0,inf)"));
            }
            out.push(t.ln());
            let mut tp = 1.0;
            for k in 1..=order {
                tp /= t;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                out.push(sign * tp / k as f64);
            }
        }
        Builtin::Exp => {
            let e = t.exp();
            let mut fact = 1.0;
            for k in 0..=order {
                if k > 0 {
                    fact *= k as f64;
                }
                out.push(e / fact);
            }
        }
        Builtin::Reciprocal => {
            if t == 0.0 {
                return Err(Error::Singular { what: "recip".into(), at: t });
            }
            let mut term = 1.0 / t;
            for _ in 0..=order {
                out.push(term);
                term *= -1.0 / t;
            }
        }
    }
    Ok(out)
}

/// Closed-form primitive `P` with `P' = expr` (additive constant arbitrary).
pub(crate) fn primitive(expr: &FnExpr, t: f64) -> Result<f64> {
    let moebius_primitive = |a: f64, b: f64, c: f64, d: f64| -> Result<f64> {
        if c == 0.0 {
            if d == 0.0 {
                return Err(Error::Singular { what: "moebius denominator".into(), at: t });
            }
            return Ok(a / d * t * t / 2.0 + b / d * t);
        }
        let den = c * t + d;
        if den == 0.0 {
            return Err(Error::Singular { what: "moebius denominator".into(), at: t });
        }
        let k = (b * c - a * d) / c;
        Ok(a / c * t + k / c * den.abs().ln())
    };
    match expr {
        FnExpr::Polynomial(c) => {
            Ok(c.iter().enumerate().rev().fold(0.0, |acc, (k, &ck)| acc * t + ck / (k + 1) as f64) * t)
        }
        FnExpr::Affine { scale, offset } => Ok(offset * t + scale * t * t / 2.0),
        FnExpr::Moebius { a, b, c, d } => moebius_primitive(*a, *b, *c, *d),
        FnExpr::Transfer => moebius_primitive(1.0, 0.0, -1.0, 1.0),
        FnExpr::TransferInverse => moebius_primitive(1.0, 0.0, 1.0, 1.0),
        FnExpr::Builtin(b) => match b {
            Builtin::Sqrt if t < 0.0 => Err(domain_err(t, "[0,inf)")),
            Builtin::Sqrt => Ok(2.0 / 3.0 * t * t.sqrt()),
            Builtin::Log if t < 0.0 => Err(domain_err(t, "[0,inf)")),
            Builtin::Log if t == 0.0 => Ok(0.0),
            Builtin::Log => Ok(t * t.ln() - t),
            Builtin::Exp => Ok(t.exp()),
            Builtin::Reciprocal if t == 0.0 => Err(Error::Singular { what: "recip".into(), at: t }),
            Builtin::Reciprocal => Ok(t.abs().ln()),
        },
        FnExpr::QuotientByT(inner) => match &**inner {
            FnExpr::Polynomial(c) => {
                let c0 = c.first().copied().unwrap_or(0.0);
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * t + ck / k as f64;
                }
                acc *= t;
                if c0 != 0.0 {
                    if t == 0.0 {
                        return Err(Error::Singular { what: "log|t| primitive".into(), at: t });
                    }
                    acc += c0 * t.abs().ln();
                }
                Ok(acc)
            }
            other => Err(Error::NoAntiderivative(format!("quot({other})"))),
        },
        FnExpr::ShiftedToZero(inner) => Ok(primitive(inner, t)? - inner.value(0.0)? * t),
        other => Err(Error::NoAntiderivative(other.to_string())),
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[f64]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Renders the expression in the function mini-language. Transfer and affine
/// kinds are written in their equivalent `moebius:` / `poly:` forms.
impl fmt::Display for FnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnExpr::Polynomial(c) => {
                f.write_str("poly:")?;
                if c.is_empty() {
                    f.write_str("0")
                } else {
                    write_list(f, c)
                }
            }
            FnExpr::Moebius { a, b, c, d } => {
                f.write_str("moebius:")?;
                write_list(f, &[*a, *b, *c, *d])
            }
            FnExpr::Transfer => f.write_str("moebius:1,0,-1,1"),
            FnExpr::TransferInverse => f.write_str("moebius:1,0,1,1"),
            FnExpr::Affine { scale, offset } => {
                f.write_str("poly:")?;
                write_list(f, &[*offset, *scale])
            }
            FnExpr::Builtin(b) => f.write_str(b.name()),
            FnExpr::Compose(outer, inner) => write!(f, "compose({outer};{inner})"),
            FnExpr::QuotientByT(inner) => write!(f, "quot({inner})"),
            FnExpr::ShiftedToZero(inner) => write!(f, "shift0({inner})"),
            FnExpr::Antiderivative(inner, base) => write!(f, "integ({inner};{base})"),
        }
    }
}

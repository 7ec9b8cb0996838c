use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Eigenvalues or evaluation points within this distance (scaled by
/// `max(1, |endpoint|)`) of an endpoint are snapped into the interval.
pub const SNAP_TOL: f64 = 1e-10;

/// Finite stand-in for an infinite endpoint when sampling.
pub const SAMPLING_REACH: f64 = 1e3;

/// A nontrivial real interval with independent endpoint closedness.
/// Infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalSpec {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl IntervalSpec {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if lower >= upper {
            return Err(Error::InvalidInterval(format!("lower {lower} must be below upper {upper}")));
        }
        if lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval("empty interval".into()));
        }
        Ok(Self {
            lower,
            upper,
            lower_closed: lower_closed && lower.is_finite(),
            upper_closed: upper_closed && upper.is_finite(),
        })
    }

    pub fn open(lower: f64, upper: f64) -> Self {
        Self::new(lower, upper, false, false).expect("valid open interval")
    }

    pub fn closed(lower: f64, upper: f64) -> Self {
        Self::new(lower, upper, true, true).expect("valid closed interval")
    }

    pub fn closed_open(lower: f64, upper: f64) -> Self {
        Self::new(lower, upper, true, false).expect("valid half-open interval")
    }

    pub fn open_closed(lower: f64, upper: f64) -> Self {
        Self::new(lower, upper, false, true).expect("valid half-open interval")
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `[0, ∞)`
    pub fn nonnegative() -> Self {
        Self::closed_open(0.0, f64::INFINITY)
    }

    /// `(0, ∞)`
    pub fn positive() -> Self {
        Self::open(0.0, f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn interior(&self) -> Self {
        Self { lower_closed: false, upper_closed: false, ..*self }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed { x >= self.lower } else { x > self.lower };
        let below = if self.upper_closed { x <= self.upper } else { x < self.upper };
        above && below
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    /// Whether `other` lies inside the closure of `self`.
    pub fn covers(&self, other: &IntervalSpec) -> bool {
        other.lower >= self.lower && other.upper <= self.upper
    }

    /// Map `x` into the interval if it is inside or within [`SNAP_TOL`] of an
    /// endpoint. Points near an open endpoint move strictly inward.
    pub fn snap(&self, x: f64) -> Option<f64> {
        if x.is_nan() {
            return None;
        }
        if self.contains(x) {
            return Some(x);
        }
        if self.lower.is_finite() {
            let tol = SNAP_TOL * self.lower.abs().max(1.0);
            if x <= self.lower && self.lower - x <= tol {
                return Some(if self.lower_closed { self.lower } else { self.lower + tol });
            }
        }
        if self.upper.is_finite() {
            let tol = SNAP_TOL * self.upper.abs().max(1.0);
            if x >= self.upper && x - self.upper <= tol {
                return Some(if self.upper_closed { self.upper } else { self.upper - tol });
            }
        }
        None
    }

    /// Finite window `(lo, hi)` used for sampling and local search; infinite
    /// endpoints are replaced by a point [`SAMPLING_REACH`] away.
    pub fn sampling_window(&self) -> (f64, f64) {
        match (self.lower.is_finite(), self.upper.is_finite()) {
            (true, true) => (self.lower, self.upper),
            (true, false) => (self.lower, self.lower + SAMPLING_REACH),
            (false, true) => (self.upper - SAMPLING_REACH, self.upper),
            (false, false) => (-SAMPLING_REACH, SAMPLING_REACH),
        }
    }

    /// Sampling window shrunk so that every point is strictly interior.
    pub fn interior_window(&self) -> (f64, f64) {
        let (lo, hi) = self.sampling_window();
        let pad = 1e-9 * (hi - lo).max(1e-300);
        (lo + pad, hi - pad)
    }

    pub fn validate_sub_interval(&self, sub: &IntervalSpec) -> Result<()> {
        if self.covers(sub) {
            Ok(())
        } else {
            Err(Error::InvalidInterval(format!("{sub} is not contained in the function domain {self}")))
        }
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lower_closed { '[' } else { '(' },
            fmt_endpoint(self.lower),
            fmt_endpoint(self.upper),
            if self.upper_closed { ']' } else { ')' }
        )
    }
}

fn parse_endpoint(s: &str) -> Result<f64> {
    match s {
        "inf" | "+inf" | "∞" | "+∞" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-∞" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::InvalidInterval(format!("cannot parse endpoint '{s}'"))),
    }
}

impl FromStr for IntervalSpec {
    type Err = Error;

    /// Accepts `[a,b)`, `(a,b]`, ... and the bare form `a,b`, which denotes
    /// the open interval.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (lc, rest) = match t.chars().next() {
            Some('[') => (true, &t[1..]),
            Some('(') => (false, &t[1..]),
            _ => (false, t.as_str()),
        };
        let (uc, body) = match rest.chars().last() {
            Some(']') => (true, &rest[..rest.len() - 1]),
            Some(')') => (false, &rest[..rest.len() - 1]),
            _ => (false, rest),
        };
        let mut parts = body.split(',');
        let (lo, hi) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (parse_endpoint(a)?, parse_endpoint(b)?),
            _ => return Err(Error::InvalidInterval(format!("expected 'lo,hi', got '{s}'"))),
        };
        IntervalSpec::new(lo, hi, lc, uc)
    }
}

impl Serialize for IntervalSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntervalSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let i: IntervalSpec = "[0, 1)".parse().unwrap();
        assert_eq!(i, IntervalSpec::closed_open(0.0, 1.0));
        assert_eq!(i.to_string(), "[0,1)");
        let j: IntervalSpec = "0,1".parse().unwrap();
        assert_eq!(j, IntervalSpec::open(0.0, 1.0));
        let k: IntervalSpec = "(0,inf)".parse().unwrap();
        assert_eq!(k, IntervalSpec::positive());
        assert_eq!(k.to_string().parse::<IntervalSpec>().unwrap(), k);
        // a closed bracket at infinity collapses to open
        let m: IntervalSpec = "[0,inf]".parse().unwrap();
        assert!(!m.upper_closed);
    }

    #[test]
    fn rejects_degenerate() {
        assert!("1,1".parse::<IntervalSpec>().is_err());
        assert!("2,1".parse::<IntervalSpec>().is_err());
        assert!("0;1".parse::<IntervalSpec>().is_err());
    }

    #[test]
    fn snapping() {
        let i = IntervalSpec::closed_open(0.0, 1.0);
        assert_eq!(i.snap(-1e-12), Some(0.0));
        assert_eq!(i.snap(-1e-6), None);
        let s = i.snap(1.0).unwrap();
        assert!(s < 1.0 && s > 1.0 - 1e-9);
        let o = IntervalSpec::open(0.0, 1.0);
        assert!(o.snap(0.0).unwrap() > 0.0);
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::funcmodel::{gap_polynomial, transfer_map, FunctionSpec, IntervalSpec};
use crate::rng::{trial_rng, TrialRng};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusMember {
    pub name: String,
    pub function: FunctionSpec,
}

/// Summary-friendly view of a member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberLabel {
    pub name: String,
    pub function: String,
}

impl CorpusMember {
    pub fn new(name: impl Into<String>, function: FunctionSpec) -> Self {
        CorpusMember { name: name.into(), function }
    }

    pub fn label(&self) -> MemberLabel {
        MemberLabel { name: self.name.clone(), function: self.function.text() }
    }
}

/// `a₁t + a₂t² + a₃t³ + a₄t⁴ + a₅t⁵` with `a₂, a₄ ≥ 0` and `a₃² ≤ a₂a₄`,
/// so the local convexity matrix is positive semidefinite at 0.
pub fn constrained_quintic(rng: &mut TrialRng) -> Vec<f64> {
    let a2: f64 = rng.random();
    let a4: f64 = rng.random();
    let a3 = rng.random_range(-1.0..=1.0) * (a2 * a4).sqrt();
    let a1 = rng.random_range(-1.0..1.0);
    let a5 = rng.random_range(-1.0..1.0);
    vec![0.0, a1, a2, a3, a4, a5]
}

pub fn quintic_from_stream(seed: u64, index: u64) -> FunctionSpec {
    let mut rng = trial_rng(seed, "quintic", index);
    FunctionSpec::polynomial(constrained_quintic(&mut rng), IntervalSpec::real_line())
}

/// Built-in corpus on `[0, α)`: monomials, affine maps of both signs of
/// `f(0)`, square-root pullbacks through the transfer `[0, α) → [0, ∞)`,
/// Möbius maps of both signs, gap polynomials of orders 2 to 4, the cubic
/// `−t³ + 2t² − t`, and `quintics` constrained quintics.
pub fn standard_corpus(alpha: f64, quintics: usize, seed: u64) -> Result<Vec<CorpusMember>> {
    let line = IntervalSpec::real_line();
    let poly = |c: &[f64]| FunctionSpec::polynomial(c.to_vec(), line);
    let to_half_line = transfer_map(&IntervalSpec::closed_open(0.0, alpha), &IntervalSpec::nonnegative())?;
    let sqrt = FunctionSpec::parse("sqrt", IntervalSpec::nonnegative())?;
    let mut out = vec![
        CorpusMember::new("t", poly(&[0.0, 1.0])),
        CorpusMember::new("t^2", poly(&[0.0, 0.0, 1.0])),
        CorpusMember::new("t^3", poly(&[0.0, 0.0, 0.0, 1.0])),
        CorpusMember::new("2t-1/2", poly(&[-0.5, 2.0])),
        CorpusMember::new("2t+1/2", poly(&[0.5, 2.0])),
        CorpusMember::new("sqrt pullback", FunctionSpec::compose(&sqrt, &to_half_line)?),
        CorpusMember::new("-sqrt", sqrt.negated()),
        CorpusMember::new("t/(1+t)", FunctionSpec::parse("moebius:1,0,1,1", IntervalSpec::nonnegative())?),
        CorpusMember::new("-t/(1+t)", FunctionSpec::parse("moebius:-1,0,1,1", IntervalSpec::nonnegative())?),
        CorpusMember::new("gap 2", gap_polynomial(2)),
        CorpusMember::new("gap 3", gap_polynomial(3)),
        CorpusMember::new("gap 4", gap_polynomial(4)),
        CorpusMember::new("cubic -t^3+2t^2-t", poly(&[0.0, -1.0, 2.0, -1.0])),
    ];
    for i in 0..quintics {
        out.push(CorpusMember::new(format!("quintic {i}"), quintic_from_stream(seed, i as u64)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn corpus_is_defined_on_the_half_open_interval() {
        for alpha in [0.5, 1.0, 3.0] {
            let c = standard_corpus(alpha, 2, 1).unwrap();
            assert!(c.len() >= 15);
            for m in &c {
                assert!(m.function.domain().covers(&IntervalSpec::closed_open(0.0, alpha)), "{}", m.name);
                assert!(m.function.eval(0.0).is_ok());
            }
        }
    }

    #[test]
    fn pullback_of_sqrt() {
        let c = standard_corpus(2.0, 0, 0).unwrap();
        let m = c.iter().find(|m| m.name == "sqrt pullback").unwrap();
        // sqrt(t/(2 - t)) at t = 1 is 1
        assert!((m.function.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quintics_meet_the_local_condition() {
        let mut rng = seeded(3);
        for _ in 0..1000 {
            let a = constrained_quintic(&mut rng);
            assert!(a[2] >= 0.0 && a[4] >= 0.0 && a[2] * a[4] >= a[3] * a[3]);
            assert_eq!(a[0], 0.0);
        }
    }
}

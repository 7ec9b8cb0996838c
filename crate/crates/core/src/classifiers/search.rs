//! Counterexample search shared by every sampled route: evaluate seeded
//! trials in index-ordered batches, then polish the worst violations by
//! pattern search on the trial's parameter vector.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{trial_rng, TrialRng};

/// Polished margins at or below `-CERTIFICATE_MARGIN` are reported as FAIL.
pub const CERTIFICATE_MARGIN: f64 = 1e-6;

const BATCH: usize = 128;
const MAX_POLISHED: usize = 6;
const POLISH_EVALS: usize = 600;

pub(crate) type Sampler<'a> = dyn Fn(&mut TrialRng) -> Result<Vec<f64>> + Sync + 'a;
pub(crate) type Objective<'a> = dyn Fn(&[f64]) -> Result<f64> + Sync + 'a;
pub(crate) type Projector<'a> = dyn Fn(&mut [f64]) + Sync + 'a;

pub(crate) struct Problem<'a> {
    pub stream: &'a str,
    pub sample: &'a Sampler<'a>,
    pub margin: &'a Objective<'a>,
    /// Maps an arbitrary parameter vector back into the admissible set.
    pub project: &'a Projector<'a>,
    /// Initial pattern-search step.
    pub step: f64,
}

#[derive(Debug)]
pub(crate) struct SearchResult {
    /// Polished parameters with margin `<= -CERTIFICATE_MARGIN`, if found.
    pub failure: Option<(Vec<f64>, f64)>,
    pub worst_margin: f64,
    /// Trials (stress cases included) with margin below `-tol`.
    pub violations: usize,
    /// Best polished margin among violations that stayed above the threshold.
    pub subthreshold: Option<f64>,
    pub trials_run: usize,
}

fn evaluate(problem: &Problem, params: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let m = (problem.margin)(&params)?;
    Ok((params, m))
}

fn batch_eval(problem: &Problem, seed: u64, range: std::ops::Range<usize>) -> Result<Vec<(Vec<f64>, f64)>> {
    let one = |i: usize| -> Result<(Vec<f64>, f64)> {
        let mut rng = trial_rng(seed, problem.stream, i as u64);
        let p = (problem.sample)(&mut rng)?;
        evaluate(problem, p)
    };
    #[cfg(feature = "parallel")]
    let out: Vec<Result<_>> = range.into_par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let out: Vec<Result<_>> = range.map(one).collect();
    out.into_iter().collect()
}

/// Coordinate pattern search minimizing the margin. Evaluation errors count
/// as `+inf` so the search stays inside the admissible region.
pub(crate) fn polish(problem: &Problem, start: &[f64], start_margin: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = start_margin;
    let mut step = problem.step;
    let mut evals = 0;
    let floor = problem.step * 1e-9;
    let eval = |y: &mut Vec<f64>| -> f64 {
        (problem.project)(y);
        (problem.margin)(y).unwrap_or(f64::INFINITY)
    };
    while evals < POLISH_EVALS && step > floor {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * step;
                let m = eval(&mut y);
                evals += 1;
                if m < best {
                    best = m;
                    x = y;
                    improved = true;
                    break;
                }
            }
            if evals >= POLISH_EVALS {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

/// Runs stress cases first, then `trials` seeded samples in batches; stops at
/// the first batch that yields a certificate.
pub(crate) fn run(problem: &Problem, stress: Vec<Vec<f64>>, trials: usize, seed: u64, tol: f64) -> Result<SearchResult> {
    let mut result = SearchResult {
        failure: None,
        worst_margin: f64::INFINITY,
        violations: 0,
        subthreshold: None,
        trials_run: 0,
    };
    let mut polished = 0;

    let mut handle = |batch: Vec<(Vec<f64>, f64)>, result: &mut SearchResult| {
        let mut bad: Vec<&(Vec<f64>, f64)> = batch.iter().filter(|(_, m)| *m < -tol).collect();
        for (_, m) in &batch {
            result.worst_margin = result.worst_margin.min(*m);
        }
        result.violations += bad.len();
        bad.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (p, m) in bad {
            if polished >= MAX_POLISHED {
                break;
            }
            polished += 1;
            let (q, qm) = polish(problem, p, *m);
            result.worst_margin = result.worst_margin.min(qm);
            if qm <= -CERTIFICATE_MARGIN {
                result.failure = Some((q, qm));
                return true;
            }
            result.subthreshold = Some(result.subthreshold.map_or(qm, |s: f64| s.min(qm)));
        }
        false
    };

    let stress_eval = stress.into_iter().map(|p| evaluate(problem, p)).collect::<Result<Vec<_>>>()?;
    if handle(stress_eval, &mut result) {
        return Ok(result);
    }
    let mut start = 0;
    while start < trials {
        let end = (start + BATCH).min(trials);
        let batch = batch_eval(problem, seed, start..end)?;
        result.trials_run = end;
        if handle(batch, &mut result) {
            return Ok(result);
        }
        start = end;
    }
    Ok(result)
}

/// Errors that turn a report INCONCLUSIVE rather than aborting it.
pub(crate) fn is_inconclusive(e: &Error) -> bool {
    matches!(
        e,
        Error::SamplerExhausted { .. } | Error::UnsupportedOrder { .. } | Error::CoincidenceOrder { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn polish_descends_to_minimum() {
        // margin = (x - 0.3)^2 - 0.01, minimum -0.01 at 0.3
        let sample = |r: &mut TrialRng| Ok(vec![r.random::<f64>()]);
        let margin = |p: &[f64]| Ok((p[0] - 0.3).powi(2) - 0.01);
        let project = |p: &mut [f64]| p[0] = p[0].clamp(0.0, 1.0);
        let prob = Problem { stream: "t", sample: &sample, margin: &margin, project: &project, step: 0.1 };
        let (x, m) = polish(&prob, &[0.35], margin(&[0.35]).unwrap());
        assert!((x[0] - 0.3).abs() < 1e-6);
        assert!((m + 0.01).abs() < 1e-12);
    }

    #[test]
    fn run_is_deterministic_and_finds_failure() {
        let sample = |r: &mut TrialRng| Ok(vec![r.random::<f64>()]);
        let margin = |p: &[f64]| Ok(p[0] - 0.5);
        let project = |p: &mut [f64]| p[0] = p[0].clamp(0.0, 1.0);
        let prob = Problem { stream: "t", sample: &sample, margin: &margin, project: &project, step: 0.1 };
        let a = run(&prob, vec![], 100, 1, 1e-9).unwrap();
        let b = run(&prob, vec![], 100, 1, 1e-9).unwrap();
        assert_eq!(a.failure, b.failure);
        let (x, m) = a.failure.unwrap();
        assert_eq!(x[0], 0.0);
        assert_eq!(m, -0.5);
    }

    #[test]
    fn subthreshold_violations_pass() {
        let sample = |r: &mut TrialRng| Ok(vec![r.random::<f64>()]);
        let margin = |_: &[f64]| Ok(-1e-8);
        let project = |_: &mut [f64]| {};
        let prob = Problem { stream: "t", sample: &sample, margin: &margin, project: &project, step: 0.1 };
        let r = run(&prob, vec![], 10, 1, 1e-9).unwrap();
        assert!(r.failure.is_none());
        assert_eq!(r.violations, 10);
        assert_eq!(r.subthreshold, Some(-1e-8));
    }
}

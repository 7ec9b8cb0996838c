use nalgebra::DMatrix;

use super::certificate::{monotone_pair_margin, node_tuple_margin, rows_of, Payload};
use super::params::{
    clamp_into, decode_ordered_pair, encode_ordered_pair, require_spectrum, stress_tuples, uniform_nodes,
};
use super::search::{run, Problem};
use super::{check_order, ClassReport, Context, Property, Route, SearchConfig};
use crate::divdiff::CriterionKind;
use crate::error::Result;
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::matcore::{random_ordered_pair, HermitianMatrix};

/// n-monotonicity by positivity of sampled `n`-node Loewner matrices.
pub fn is_n_monotone_dd(f: &FunctionSpec, interval: &IntervalSpec, n: usize, cfg: &SearchConfig) -> Result<ClassReport> {
    check_order("monotone", n)?;
    let ctx = Context { f, interval: *interval, property: Property::Monotone, order: n, route: Route::LoewnerDd, cfg: *cfg };
    ctx.validate()?;
    let (lo, hi) = interval.interior_window();
    let sample = |rng: &mut _| Ok(uniform_nodes(rng, n, lo, hi));
    let margin = |p: &[f64]| node_tuple_margin(f, CriterionKind::Loewner, p, None, cfg.tol);
    let project = |p: &mut [f64]| clamp_into(p, lo, hi);
    let problem = Problem { stream: "loewner_dd", sample: &sample, margin: &margin, project: &project, step: 0.1 * (hi - lo) };
    let outcome = run(&problem, stress_tuples(n, lo, hi), cfg.trials, cfg.seed, cfg.tol);
    ctx.conclude(outcome, f, |p| Ok(Payload::NodeTuple { criterion: CriterionKind::Loewner, nodes: p.to_vec(), s: None }))
}

/// Commuting stress pairs: `a = diag(t)` and a rank-one step `b = a + εvvᵀ`,
/// which probe the Loewner matrix at `t` to first order.
fn diagonal_stress(n: usize, interval: &IntervalSpec) -> Vec<(HermitianMatrix, HermitianMatrix)> {
    let (lo, hi) = interval.interior_window();
    let eps = 1e-3 * (hi - lo);
    let v = DMatrix::from_element(n, n, eps / n as f64);
    stress_tuples(n, lo, hi)
        .into_iter()
        .filter_map(|t| {
            let a = HermitianMatrix::diagonal(&t);
            let b = HermitianMatrix::hermitian_part(&(a.matrix() + &v));
            (require_spectrum(&a, interval).is_ok() && require_spectrum(&b, interval).is_ok()).then_some((a, b))
        })
        .collect()
}

/// n-monotonicity by direct sampling of ordered pairs `a ≤ b`.
pub fn is_n_monotone_mx(f: &FunctionSpec, interval: &IntervalSpec, n: usize, cfg: &SearchConfig) -> Result<ClassReport> {
    check_order("monotone", n)?;
    let ctx = Context { f, interval: *interval, property: Property::Monotone, order: n, route: Route::MatrixPairs, cfg: *cfg };
    ctx.validate()?;
    let (lo, hi) = interval.interior_window();
    let sample = |rng: &mut _| {
        let (a, b) = random_ordered_pair::<f64, _>(n, interval, rng)?;
        Ok(encode_ordered_pair(&a, &b))
    };
    let margin = |p: &[f64]| {
        let (a, b) = decode_ordered_pair(p, n);
        require_spectrum(&a, interval)?;
        require_spectrum(&b, interval)?;
        monotone_pair_margin(f, &a, &b, cfg.tol)
    };
    let project = |_: &mut [f64]| {};
    let problem = Problem { stream: "monotone_mx", sample: &sample, margin: &margin, project: &project, step: 0.05 * (hi - lo) };
    let stress = diagonal_stress(n, interval).iter().map(|(a, b)| encode_ordered_pair(a, b)).collect();
    let outcome = run(&problem, stress, cfg.trials, cfg.seed, cfg.tol);
    ctx.conclude(outcome, f, |p| {
        let (a, b) = decode_ordered_pair(p, n);
        Ok(Payload::MatrixPair {
            property: Property::Monotone,
            a: rows_of(a.matrix()),
            b: rows_of(b.matrix()),
            lambda: None,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{Verdict, CERTIFICATE_MARGIN};

    fn spec(text: &str, i: IntervalSpec) -> FunctionSpec {
        FunctionSpec::parse(text, i).unwrap()
    }

    #[test]
    fn identity_passes_both_routes() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("poly:0,1", i);
        let cfg = SearchConfig::new(200, 1);
        assert!(is_n_monotone_dd(&f, &i, 5, &cfg).unwrap().passed());
        assert!(is_n_monotone_mx(&f, &i, 3, &cfg).unwrap().passed());
        let aff = spec("poly:0,2", IntervalSpec::closed_open(0.0, 1.0));
        assert!(is_n_monotone_mx(&aff, &IntervalSpec::closed_open(0.0, 1.0), 3, &cfg).unwrap().passed());
    }

    #[test]
    fn square_fails_with_rechecked_certificates() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("poly:0,0,1", i);
        let cfg = SearchConfig::new(500, 3);
        for r in [is_n_monotone_dd(&f, &i, 2, &cfg).unwrap(), is_n_monotone_mx(&f, &i, 2, &cfg).unwrap()] {
            assert_eq!(r.verdict, Verdict::Fail, "{:?}", r.route);
            let cert = r.certificate.unwrap();
            assert!(cert.margin <= -CERTIFICATE_MARGIN);
            assert!(cert.recheck().unwrap().consistent);
        }
        // still 1-monotone on (0, 1)
        assert!(is_n_monotone_dd(&f, &i, 1, &cfg).unwrap().passed());
        assert!(is_n_monotone_mx(&f, &i, 1, &cfg).unwrap().passed());
    }

    #[test]
    fn sqrt_is_four_monotone() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("sqrt", IntervalSpec::nonnegative());
        let r = is_n_monotone_dd(&f, &i, 4, &SearchConfig::new(1000, 9)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.trials_run, 1000);
    }

    #[test]
    fn interval_outside_domain_is_rejected() {
        let f = spec("sqrt", IntervalSpec::nonnegative());
        assert!(is_n_monotone_dd(&f, &IntervalSpec::open(-1.0, 1.0), 2, &SearchConfig::new(10, 0)).is_err());
    }

    #[test]
    fn deterministic_reports() {
        let i = IntervalSpec::open(0.0, 2.0);
        let f = spec("poly:0,1,0,1", i);
        let cfg = SearchConfig::new(300, 17);
        assert_eq!(is_n_monotone_mx(&f, &i, 2, &cfg).unwrap(), is_n_monotone_mx(&f, &i, 2, &cfg).unwrap());
    }
}

use nalgebra::DMatrix;
use rand::Rng;

use super::certificate::{convex_pair_margin, node_tuple_margin, rows_of, Payload};
use super::params::{clamp_into, push_sym, require_spectrum, stress_tuples, sym_from, sym_len, uniform_nodes};
use super::search::{run, Problem};
use super::{check_order, ClassReport, Context, Property, Route, SearchConfig};
use crate::divdiff::CriterionKind;
use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::matcore::{random_hermitian_in, HermitianMatrix};

/// n-convexity of `f` on `interval` along one of three routes:
/// Kraus matrices anchored at the first node, sampled convex combinations of
/// matrix pairs, or the 2×2 local criterion (order 2 only).
pub fn is_n_convex(
    f: &FunctionSpec,
    interval: &IntervalSpec,
    n: usize,
    cfg: &SearchConfig,
    route: Route,
) -> Result<ClassReport> {
    convex_impl(f, f, interval, n, cfg, route, Property::Convex)
}

/// n-concavity, decided as n-convexity of `-f`. Certificates refer to `-f`.
pub fn is_n_concave(
    f: &FunctionSpec,
    interval: &IntervalSpec,
    n: usize,
    cfg: &SearchConfig,
    route: Route,
) -> Result<ClassReport> {
    let neg = f.negated();
    let mut r = convex_impl(f, &neg, interval, n, cfg, route, Property::Concave)?;
    if r.certificate.is_some() {
        r.notes.push(format!("certificate shows convexity failing for {}", neg.text()));
    }
    Ok(r)
}

fn convex_impl(
    shown: &FunctionSpec,
    f: &FunctionSpec,
    interval: &IntervalSpec,
    n: usize,
    cfg: &SearchConfig,
    route: Route,
    property: Property,
) -> Result<ClassReport> {
    check_order("convex", n)?;
    let ctx = Context { f: shown, interval: *interval, property, order: n, route, cfg: *cfg };
    ctx.validate()?;
    let (lo, hi) = interval.interior_window();
    let width = hi - lo;
    let project_nodes = |p: &mut [f64]| clamp_into(p, lo, hi);
    match route {
        Route::KrausDd => {
            let sample = |rng: &mut _| Ok(uniform_nodes(rng, n, lo, hi));
            let margin = |p: &[f64]| node_tuple_margin(f, CriterionKind::Kraus, p, Some(p[0]), cfg.tol);
            let problem =
                Problem { stream: "kraus_dd", sample: &sample, margin: &margin, project: &project_nodes, step: 0.1 * width };
            let outcome = run(&problem, stress_tuples(n, lo, hi), cfg.trials, cfg.seed, cfg.tol);
            ctx.conclude(outcome, f, |p| {
                Ok(Payload::NodeTuple { criterion: CriterionKind::Kraus, nodes: p.to_vec(), s: Some(p[0]) })
            })
        }
        Route::Local2x2 => {
            if n != 2 {
                return Err(Error::RouteOrderMismatch { route: route.name().into(), order: n });
            }
            let sample = |rng: &mut _| Ok(uniform_nodes(rng, 1, lo, hi));
            let margin = |p: &[f64]| node_tuple_margin(f, CriterionKind::LocalConvex, p, None, cfg.tol);
            let problem =
                Problem { stream: "local2x2", sample: &sample, margin: &margin, project: &project_nodes, step: 0.1 * width };
            let stress = stress_tuples(1, lo, hi);
            let outcome = run(&problem, stress, cfg.trials, cfg.seed, cfg.tol);
            ctx.conclude(outcome, f, |p| {
                Ok(Payload::NodeTuple { criterion: CriterionKind::LocalConvex, nodes: p.to_vec(), s: None })
            })
        }
        Route::MatrixPairs => {
            let k = sym_len(n);
            let sample = |rng: &mut crate::rng::TrialRng| {
                let a = random_hermitian_in::<f64, _>(n, interval, rng)?;
                let b = random_hermitian_in::<f64, _>(n, interval, rng)?;
                let mut p = Vec::with_capacity(2 * k + 1);
                push_sym(&mut p, &a);
                push_sym(&mut p, &b);
                p.push(rng.random::<f64>());
                Ok(p)
            };
            let decode = |p: &[f64]| (sym_from(p, n), sym_from(&p[k..], n), p[2 * k]);
            let margin = |p: &[f64]| {
                let (a, b, l) = decode(p);
                require_spectrum(&a, interval)?;
                require_spectrum(&b, interval)?;
                convex_pair_margin(f, &a, &b, l, cfg.tol)
            };
            let project = |p: &mut [f64]| p[2 * k] = p[2 * k].clamp(0.0, 1.0);
            let problem =
                Problem { stream: "convex_mx", sample: &sample, margin: &margin, project: &project, step: 0.05 * width };
            let outcome = run(&problem, pair_stress(n, interval), cfg.trials, cfg.seed, cfg.tol);
            ctx.conclude(outcome, f, |p| {
                let (a, b, l) = decode(p);
                Ok(Payload::MatrixPair {
                    property: Property::Convex,
                    a: rows_of(a.matrix()),
                    b: rows_of(b.matrix()),
                    lambda: Some(l),
                })
            })
        }
        other => Err(Error::InvalidArgument(format!("route {other} does not decide convexity"))),
    }
}

/// `a = diag(t)` against `b = a + εJ` with `J` the all-ones matrix, at the
/// midpoint: the second-order term is the Kraus-type form at `t`.
fn pair_stress(n: usize, interval: &IntervalSpec) -> Vec<Vec<f64>> {
    let (lo, hi) = interval.interior_window();
    let eps = 0.05 * (hi - lo);
    let j = DMatrix::from_element(n, n, eps / n as f64);
    stress_tuples(n, lo, hi)
        .into_iter()
        .filter_map(|t| {
            let a = HermitianMatrix::diagonal(&t);
            let b = HermitianMatrix::hermitian_part(&(a.matrix() - &j));
            if require_spectrum(&b, interval).is_err() {
                return None;
            }
            let mut p = Vec::new();
            push_sym(&mut p, &a);
            push_sym(&mut p, &b);
            p.push(0.5);
            Some(p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{Verdict, CERTIFICATE_MARGIN};

    fn spec(text: &str, i: IntervalSpec) -> FunctionSpec {
        FunctionSpec::parse(text, i).unwrap()
    }

    #[test]
    fn square_is_convex_on_every_route() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("poly:0,0,1", i);
        let cfg = SearchConfig::new(200, 2);
        for n in 1..=4 {
            assert!(is_n_convex(&f, &i, n, &cfg, Route::KrausDd).unwrap().passed());
        }
        for n in 1..=3 {
            assert!(is_n_convex(&f, &i, n, &cfg, Route::MatrixPairs).unwrap().passed());
        }
        assert!(is_n_convex(&f, &i, 2, &cfg, Route::Local2x2).unwrap().passed());
    }

    #[test]
    fn cube_fails_two_convexity() {
        let i = IntervalSpec::open(0.0, 2.0);
        let f = spec("poly:0,0,0,1", i);
        let cfg = SearchConfig::new(500, 5);
        for route in [Route::KrausDd, Route::MatrixPairs, Route::Local2x2] {
            let r = is_n_convex(&f, &i, 2, &cfg, route).unwrap();
            assert_eq!(r.verdict, Verdict::Fail, "{route}");
            let c = r.certificate.unwrap();
            assert!(c.margin <= -CERTIFICATE_MARGIN);
            assert!(c.recheck().unwrap().consistent);
        }
        // t³ is convex on (0, 2)
        assert!(is_n_convex(&f, &i, 1, &cfg, Route::KrausDd).unwrap().passed());
    }

    #[test]
    fn cube_kraus_closed_form() {
        // [t_i, t_j, s] = t_i + t_j + s for t³; nodes [1, 2], s = 1 gives
        // [[3, 4], [4, 5]] with determinant -1
        let f = spec("poly:0,0,0,1", IntervalSpec::open(0.0, 3.0));
        let k = crate::divdiff::kraus_matrix(&f, &[1.0, 2.0], 1.0).unwrap();
        assert_eq!(k.entries.to_rows(), vec![vec![3.0, 4.0], vec![4.0, 5.0]]);
    }

    #[test]
    fn prop35_cubic_is_not_convex() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("poly:0,-1,2,-1", i);
        let r = is_n_convex(&f, &i, 1, &SearchConfig::new(200, 1), Route::KrausDd).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        match r.certificate.unwrap().payload {
            Payload::NodeTuple { nodes, .. } => assert!(f.derivative_eval(nodes[0], 2).unwrap() < -1e-6),
            p => panic!("{p:?}"),
        }
    }

    #[test]
    fn local_route_requires_order_two() {
        let i = IntervalSpec::open(0.0, 1.0);
        let f = spec("poly:0,0,1", i);
        let r = is_n_convex(&f, &i, 3, &SearchConfig::new(10, 0), Route::Local2x2);
        assert!(matches!(r, Err(Error::RouteOrderMismatch { .. })));
    }

    #[test]
    fn concavity_of_sqrt() {
        let i = IntervalSpec::open(0.0, 4.0);
        let f = spec("sqrt", IntervalSpec::nonnegative());
        let cfg = SearchConfig::new(300, 4);
        assert!(is_n_concave(&f, &i, 2, &cfg, Route::KrausDd).unwrap().passed());
        assert!(is_n_concave(&f, &i, 2, &cfg, Route::MatrixPairs).unwrap().passed());
        let sq = spec("poly:0,0,1", i);
        assert!(is_n_concave(&sq, &i, 1, &cfg, Route::KrausDd).unwrap().failed());
    }
}

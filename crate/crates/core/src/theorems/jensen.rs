//! Samplers for the Jensen-type assertions on `[0, α)`: a single
//! contraction, a projection, and two contractions with `c*c + d*d ≤ 1`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::classifiers::certificate::{jensen_margin, rows_of, two_contraction_margin};
use crate::classifiers::params::{
    contract, projection_from, push_square, push_sym, require_spectrum, square_from, sym_from, sym_len,
};
use crate::classifiers::search::{run, Problem};
use crate::classifiers::{check_order, ClassReport, Context, JensenForm, Payload, Property, Route, SearchConfig};
use crate::error::Result;
use crate::funcmodel::{FunctionSpec, IntervalSpec};
use crate::matcore::{
    gaussian_matrix, operator_norm, random_contraction, random_hermitian_in, random_unitary, with_spectrum,
    HermitianMatrix,
};
use crate::rng::TrialRng;

/// Positive semidefinite `a` with spectrum in `interval`; about a third of
/// the draws have some eigenvalues exactly zero.
fn sample_positive(n: usize, interval: &IntervalSpec, rng: &mut TrialRng) -> Result<HermitianMatrix> {
    if rng.random::<f64>() < 0.3 && interval.contains(0.0) {
        let (lo, hi) = interval.interior_window();
        let zeros = rng.random_range(1..=n);
        let spectrum: Vec<f64> =
            (0..n).map(|i| if i < zeros { 0.0 } else { lo + (hi - lo) * rng.random::<f64>() }).collect();
        return Ok(with_spectrum::<f64, _>(&spectrum, rng));
    }
    random_hermitian_in::<f64, _>(n, interval, rng)
}

/// `U diag(σ) Wᵀ` with a random number of zero singular values. With
/// `isometry` the nonzero ones are exactly 1 (a partial isometry).
fn rank_deficient(n: usize, isometry: bool, rng: &mut TrialRng) -> DMatrix<f64> {
    let u = random_unitary::<f64, _>(n, rng);
    let w = random_unitary::<f64, _>(n, rng);
    let rank = rng.random_range(0..n.max(1));
    let sigma = DMatrix::from_fn(n, n, |i, j| {
        if i == j && i < rank {
            if isometry {
                1.0
            } else {
                rng.random::<f64>()
            }
        } else {
            0.0
        }
    });
    u * sigma * w.transpose()
}

fn sample_contraction(n: usize, rng: &mut TrialRng) -> DMatrix<f64> {
    let u: f64 = rng.random();
    if u < 0.5 {
        random_contraction::<f64, _>(n, rng).0
    } else {
        rank_deficient(n, u < 0.75, rng)
    }
}

fn encode(a: &HermitianMatrix, mats: &[&DMatrix<f64>]) -> Vec<f64> {
    let mut p = Vec::new();
    push_sym(&mut p, a);
    for m in mats {
        push_square(&mut p, m);
    }
    p
}

/// Deterministic cases from the range/kernel split of a contraction: zero,
/// identity, coordinate projections, a shift, and half the identity, each
/// against a spread diagonal `a` with and without a zero eigenvalue.
fn structured(n: usize, interval: &IntervalSpec) -> Vec<(HermitianMatrix, DMatrix<f64>)> {
    let (lo, hi) = interval.interior_window();
    let spread: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
    let mut with_zero = spread.clone();
    with_zero[0] = 0.0;
    let mut cs = vec![DMatrix::zeros(n, n), DMatrix::identity(n, n), DMatrix::identity(n, n) * 0.5];
    for r in 1..n {
        cs.push(DMatrix::from_fn(n, n, |i, j| if i == j && i < r { 1.0 } else { 0.0 }));
    }
    cs.push(DMatrix::from_fn(n, n, |i, j| if i + 1 == j { 1.0 } else { 0.0 }));
    cs.push(DMatrix::from_fn(n, n, |i, j| if i == j + 1 { 1.0 } else { 0.0 }));
    let mut out = Vec::new();
    for spectrum in [&spread, &with_zero] {
        if !spectrum.iter().all(|&x| interval.contains(x)) {
            continue;
        }
        let a = HermitianMatrix::diagonal(spectrum);
        for c in &cs {
            out.push((a.clone(), c.clone()));
        }
    }
    out
}

fn context<'a>(f: &'a FunctionSpec, interval: &IntervalSpec, n: usize, cfg: &SearchConfig) -> Context<'a> {
    Context { f, interval: *interval, property: Property::Jensen, order: n, route: Route::Jensen, cfg: *cfg }
}

/// `f(c*ac) ≤ c*f(a)c` for `a ⪰ 0` with spectrum in `interval` and `‖c‖ ≤ 1`.
pub fn jensen_contraction(f: &FunctionSpec, interval: &IntervalSpec, n: usize, cfg: &SearchConfig) -> Result<ClassReport> {
    check_order("jensen", n)?;
    let ctx = context(f, interval, n, cfg);
    ctx.validate()?;
    let k = sym_len(n);
    let build = |p: &[f64]| -> Result<(HermitianMatrix, DMatrix<f64>)> {
        let a = sym_from(p, n);
        require_spectrum(&a, interval)?;
        Ok((a, contract(square_from(&p[k..], n, n))))
    };
    let sample = |rng: &mut TrialRng| {
        let a = sample_positive(n, interval, rng)?;
        Ok(encode(&a, &[&sample_contraction(n, rng)]))
    };
    let margin = |p: &[f64]| {
        let (a, c) = build(p)?;
        jensen_margin(f, &a, &c, cfg.tol)
    };
    let project = |_: &mut [f64]| {};
    let (lo, hi) = interval.interior_window();
    let problem = Problem { stream: "jensen", sample: &sample, margin: &margin, project: &project, step: 0.05 * (hi - lo) };
    let stress = structured(n, interval).iter().map(|(a, c)| encode(a, &[c])).collect();
    let outcome = run(&problem, stress, cfg.trials, cfg.seed, cfg.tol);
    ctx.conclude(outcome, f, |p| {
        let (a, c) = build(p)?;
        Ok(Payload::JensenPair { form: JensenForm::Contraction, a: rows_of(a.matrix()), c: rows_of(&c), b: None, d: None })
    })
}

/// `f(pap) ≤ pf(a)p` for orthogonal projections `p`.
pub fn jensen_projection(f: &FunctionSpec, interval: &IntervalSpec, n: usize, cfg: &SearchConfig) -> Result<ClassReport> {
    check_order("jensen", n)?;
    let ctx = context(f, interval, n, cfg);
    ctx.validate()?;
    let k = sym_len(n);
    // the column count of the generator, hence the rank, is fixed per trial
    let build = |p: &[f64]| -> Result<(HermitianMatrix, DMatrix<f64>)> {
        let a = sym_from(p, n);
        require_spectrum(&a, interval)?;
        let r = (p.len() - k) / n;
        Ok((a, projection_from(&square_from(&p[k..], n, r))))
    };
    let sample = |rng: &mut TrialRng| {
        let a = sample_positive(n, interval, rng)?;
        let r = rng.random_range(0..=n);
        Ok(encode(&a, &[&gaussian_matrix::<f64, _>(n, r, rng)]))
    };
    let margin = |p: &[f64]| {
        let (a, c) = build(p)?;
        jensen_margin(f, &a, &c, cfg.tol)
    };
    let project = |_: &mut [f64]| {};
    let (lo, hi) = interval.interior_window();
    let problem =
        Problem { stream: "jensen_projection", sample: &sample, margin: &margin, project: &project, step: 0.05 * (hi - lo) };
    let stress = structured(n, interval)
        .into_iter()
        .filter(|(_, c)| (c * c - c).norm() == 0.0 && (c - c.transpose()).norm() == 0.0)
        .map(|(a, c)| {
            // generator: the nonzero columns of the coordinate projection
            let cols: Vec<usize> = (0..n).filter(|&j| c[(j, j)] == 1.0).collect();
            let g = DMatrix::from_fn(n, cols.len(), |i, j| c[(i, cols[j])]);
            encode(&a, &[&g])
        })
        .collect();
    let outcome = run(&problem, stress, cfg.trials, cfg.seed, cfg.tol);
    ctx.conclude(outcome, f, |p| {
        let (a, c) = build(p)?;
        Ok(Payload::JensenPair { form: JensenForm::Projection, a: rows_of(a.matrix()), c: rows_of(&c), b: None, d: None })
    })
}

/// Rescales `(c, d)` so that `c*c + d*d ≤ 1`.
fn joint_contraction(c: DMatrix<f64>, d: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = c.ncols();
    let mut stacked = DMatrix::zeros(2 * c.nrows(), n);
    stacked.rows_mut(0, c.nrows()).copy_from(&c);
    stacked.rows_mut(c.nrows(), d.nrows()).copy_from(&d);
    let s = operator_norm(&stacked);
    if s > 1.0 {
        (c / s, d / s)
    } else {
        (c, d)
    }
}

/// `f(c*ac + d*bd) ≤ c*f(a)c + d*f(b)d` with `c*c + d*d ≤ 1`.
pub fn jensen_two_contractions(
    f: &FunctionSpec,
    interval: &IntervalSpec,
    n: usize,
    cfg: &SearchConfig,
) -> Result<ClassReport> {
    check_order("jensen", n)?;
    let ctx = context(f, interval, n, cfg);
    ctx.validate()?;
    let k = sym_len(n);
    type Quad = (HermitianMatrix, HermitianMatrix, DMatrix<f64>, DMatrix<f64>);
    let build = |p: &[f64]| -> Result<Quad> {
        let a = sym_from(p, n);
        let b = sym_from(&p[k..], n);
        require_spectrum(&a, interval)?;
        require_spectrum(&b, interval)?;
        let (c, d) = joint_contraction(square_from(&p[2 * k..], n, n), square_from(&p[2 * k + n * n..], n, n));
        Ok((a, b, c, d))
    };
    let sample = |rng: &mut TrialRng| {
        let a = sample_positive(n, interval, rng)?;
        let b = sample_positive(n, interval, rng)?;
        let c = gaussian_matrix::<f64, _>(n, n, rng);
        let d = if rng.random::<f64>() < 0.2 { DMatrix::zeros(n, n) } else { gaussian_matrix::<f64, _>(n, n, rng) };
        // half the draws sit on the boundary c*c + d*d ≤ 1 with equality in norm
        let (c, d) = joint_contraction(c * 10.0, d * 10.0);
        let shrink = if rng.random::<f64>() < 0.5 { 1.0 } else { rng.random::<f64>() };
        let mut p = encode(&a, &[]);
        push_sym(&mut p, &b);
        push_square(&mut p, &(c * shrink));
        push_square(&mut p, &(d * shrink));
        Ok(p)
    };
    let margin = |p: &[f64]| {
        let (a, b, c, d) = build(p)?;
        two_contraction_margin(f, &a, &b, &c, &d, cfg.tol)
    };
    let project = |_: &mut [f64]| {};
    let (lo, hi) = interval.interior_window();
    let problem =
        Problem { stream: "jensen_two", sample: &sample, margin: &margin, project: &project, step: 0.05 * (hi - lo) };
    let zero = DMatrix::zeros(n, n);
    let stress = structured(n, interval)
        .iter()
        .map(|(a, c)| {
            let mut p = encode(a, &[]);
            push_sym(&mut p, a);
            push_square(&mut p, c);
            push_square(&mut p, &zero);
            p
        })
        .collect();
    let outcome = run(&problem, stress, cfg.trials, cfg.seed, cfg.tol);
    ctx.conclude(outcome, f, |p| {
        let (a, b, c, d) = build(p)?;
        Ok(Payload::JensenPair {
            form: JensenForm::TwoContractions,
            a: rows_of(a.matrix()),
            c: rows_of(&c),
            b: Some(rows_of(b.matrix())),
            d: Some(rows_of(&d)),
        })
    })
}

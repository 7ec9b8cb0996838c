//! Dense self-adjoint matrices, spectral calculus, positivity testing and
//! seeded samplers for ordered pairs and contractions.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSpec, IntervalSpec};

/// Absolute symmetry residual accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative PSD tolerance.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Attempts before a sampler gives up.
pub const MAX_REJECTIONS: usize = 10_000;

/// Entry type: `f64` (real symmetric) or `Complex64` (Hermitian).
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for Complex64 {
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Scalar = f64> {
    m: DMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Scalar = f64> {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: DMatrix<T>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    /// `V diag(values) V*`.
    pub fn recompose(&self, values: &[f64]) -> HermitianMatrix<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &x) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(x);
        }
        HermitianMatrix::hermitian_part(&(scaled * v.adjoint()))
    }
}

#[derive(Clone, Debug)]
pub struct PsdVerdict<T: Scalar = f64> {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector for `min_eigenvalue`.
    pub witness: DVector<T>,
    /// Absolute threshold actually applied.
    pub tolerance_used: f64,
    /// `max(1, ‖M‖₂)`.
    pub scale: f64,
}

impl<T: Scalar> PsdVerdict<T> {
    /// `min_eigenvalue / max(1, ‖M‖₂)`.
    pub fn margin(&self) -> f64 {
        self.min_eigenvalue / self.scale
    }
}

impl<T: Scalar> HermitianMatrix<T> {
    /// Validates shape and the Hermitian symmetry residual, then stores the
    /// exact Hermitian part.
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::BadShape { rows: m.nrows(), cols: m.ncols() });
        }
        let residual = (&m - m.adjoint()).iter().map(|x| x.modulus()).fold(0.0, f64::max);
        if residual.is_nan() || residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual, limit: HERMITIAN_TOL });
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(M + M*)/2` without validation; for matrices Hermitian up to rounding.
    pub fn hermitian_part(m: &DMatrix<T>) -> Self {
        let mut h = m + m.adjoint();
        h.scale_mut(0.5);
        Self { m: h }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { rows: n, cols: rows.first().map_or(0, |r| r.len()) });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: DMatrix::zeros(dim, dim) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self { m: DMatrix::from_fn(n, n, |i, j| if i == j { T::from_real(values[i]) } else { T::zero() }) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.m[(i, j)]
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.map(|x| x.scale(s)) }
    }

    /// `c* A c` for a square `c` of matching size.
    pub fn congruence(&self, c: &DMatrix<T>) -> Result<Self> {
        if c.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: c.nrows() });
        }
        Ok(Self::hermitian_part(&(c.adjoint() * &self.m * c)))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() })
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
    }

    /// Spectral norm.
    pub fn norm2(&self) -> f64 {
        let e = self.eig_decompose().eigenvalues;
        e.first().unwrap().abs().max(e.last().unwrap().abs())
    }

    pub fn eig_decompose(&self) -> SpectralDecomposition<T> {
        let eig = self.m.clone().symmetric_eigen();
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        SpectralDecomposition {
            eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            eigenvectors: DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]),
        }
    }

    /// Spectral calculus with a closure on eigenvalues.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let sd = self.eig_decompose();
        let values = sd.eigenvalues.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Ok(sd.recompose(&values))
    }

    /// `f(A) = V diag(f(λ)) V*`. Eigenvalues within the snap tolerance of an
    /// endpoint are moved into the domain first.
    pub fn apply_function(&self, f: &FunctionSpec) -> Result<Self> {
        let domain = f.domain();
        self.map_spectrum(|x| {
            let y = domain
                .snap(x)
                .ok_or_else(|| Error::DomainViolation { value: x, domain: domain.to_string() })?;
            f.eval(y)
        })
    }

    /// Positivity test with threshold `max(tol, 8·dim·ε)·max(1, ‖M‖₂)`. The
    /// floor absorbs eigensolver backward error on exactly singular PSD input.
    pub fn psd_check(&self, tol: f64) -> PsdVerdict<T> {
        let sd = self.eig_decompose();
        let lo = sd.eigenvalues[0];
        let hi = *sd.eigenvalues.last().unwrap();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let floor = 8.0 * self.dim() as f64 * f64::EPSILON;
        let tolerance_used = tol.max(floor) * scale;
        PsdVerdict {
            is_psd: lo >= -tolerance_used,
            min_eigenvalue: lo,
            witness: sd.eigenvectors.column(0).into_owned(),
            tolerance_used,
            scale,
        }
    }

    /// `⟨M ξ, ξ⟩`
    pub fn rayleigh(&self, xi: &DVector<T>) -> f64 {
        let v = &self.m * xi;
        xi.dotc(&v).real()
    }

    pub fn eigenvalues_in(&self, interval: &IntervalSpec) -> bool {
        self.eig_decompose().eigenvalues.iter().all(|&x| interval.contains(x))
    }
}

impl HermitianMatrix<f64> {
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// `psd_check(b − a, tol)`.
pub fn loewner_leq<T: Scalar>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, tol: f64) -> Result<PsdVerdict<T>> {
    Ok(b.sub(a)?.psd_check(tol))
}

pub fn eig_decompose<T: Scalar>(a: &HermitianMatrix<T>) -> SpectralDecomposition<T> {
    a.eig_decompose()
}

pub fn apply_function<T: Scalar>(f: &FunctionSpec, a: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    a.apply_function(f)
}

pub fn psd_check<T: Scalar>(m: &HermitianMatrix<T>, tol: f64) -> PsdVerdict<T> {
    m.psd_check(tol)
}

pub fn operator_norm<T: Scalar>(c: &DMatrix<T>) -> f64 {
    c.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn gaussian_matrix<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| T::sample_normal(rng))
}

/// Haar-like unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<T> {
    let qr = gaussian_matrix::<T, R>(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > 0.0 {
            let phase = d.unscale(m);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Random Hermitian matrix with the given spectrum.
pub fn with_spectrum<T: Scalar, R: Rng + ?Sized>(eigenvalues: &[f64], rng: &mut R) -> HermitianMatrix<T> {
    let u = random_unitary::<T, R>(eigenvalues.len(), rng);
    SpectralDecomposition { eigenvalues: eigenvalues.to_vec(), eigenvectors: u }.recompose(eigenvalues)
}

/// Orthogonal projection onto a random subspace of dimension `rank`.
pub fn random_projection<T: Scalar, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DMatrix<T> {
    let u = random_unitary::<T, R>(dim, rng);
    let cols = u.columns(0, rank);
    let p = &cols * cols.adjoint();
    HermitianMatrix::hermitian_part(&p).into_matrix()
}

/// Ordered pair `a ≤ b` with both spectra strictly inside `interval`.
///
/// `b = a + Σ r_i w_i w_i*` with `k` uniform in `0..=dim` terms, then both
/// are mapped by the same increasing affine map into a random sub-window.
pub fn random_ordered_pair<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    interval: &IntervalSpec,
    rng: &mut R,
) -> Result<(HermitianMatrix<T>, HermitianMatrix<T>)> {
    let (lo, hi) = interval.interior_window();
    for _ in 0..MAX_REJECTIONS {
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let a0 = with_spectrum::<T, R>(&spectrum, rng);
        let k = rng.random_range(0..=dim);
        let mut gap = DMatrix::<T>::zeros(dim, dim);
        for _ in 0..k {
            let w = gaussian_matrix::<T, R>(dim, 1, rng);
            let r: f64 = rng.random::<f64>() / dim as f64;
            gap += (&w * w.adjoint()).map(|x| x.scale(r));
        }
        let b0 = HermitianMatrix::hermitian_part(&(a0.matrix() + gap));
        let m = a0.eig_decompose().eigenvalues[0];
        let big = *b0.eig_decompose().eigenvalues.last().unwrap();
        let mut p = lo + (hi - lo) * rng.random::<f64>();
        let mut q = lo + (hi - lo) * rng.random::<f64>();
        if p > q {
            std::mem::swap(&mut p, &mut q);
        }
        if rng.random::<f64>() < 0.25 {
            // full window: pushes spectra toward the endpoints
            p = lo;
            q = hi;
        }
        let spread = big - m;
        let (scale, offset) = if spread > 1e-12 { ((q - p) / spread, p - m * (q - p) / spread) } else { (0.0, p) };
        let map = |h: &HermitianMatrix<T>| {
            let mut out = h.scale(scale);
            for i in 0..dim {
                out.m[(i, i)] += T::from_real(offset);
            }
            out
        };
        let (a, b) = (map(&a0), map(&b0));
        if a.eigenvalues_in(&interval.interior()) && b.eigenvalues_in(&interval.interior()) {
            return Ok((a, b));
        }
    }
    Err(Error::SamplerExhausted { attempts: MAX_REJECTIONS })
}

/// Random matrix with spectrum uniform in the sampling window of `interval`.
pub fn random_hermitian_in<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    interval: &IntervalSpec,
    rng: &mut R,
) -> Result<HermitianMatrix<T>> {
    let (lo, hi) = interval.interior_window();
    for _ in 0..MAX_REJECTIONS {
        let spectrum: Vec<f64> = (0..dim).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        let a = with_spectrum::<T, R>(&spectrum, rng);
        if a.eigenvalues_in(interval) {
            return Ok(a);
        }
    }
    Err(Error::SamplerExhausted { attempts: MAX_REJECTIONS })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionKind {
    Identity,
    Projection,
    General,
}

/// Contraction `c` with `‖c‖ ≤ 1`: the identity (10%), a random projection
/// (20%), or a scaled Gaussian matrix divided by `max(1, σ_max)`.
pub fn random_contraction<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (DMatrix<T>, ContractionKind) {
    let u: f64 = rng.random();
    if u < 0.1 {
        return (DMatrix::identity(dim, dim), ContractionKind::Identity);
    }
    if u < 0.3 {
        let rank = rng.random_range(0..=dim);
        return (random_projection::<T, R>(dim, rank, rng), ContractionKind::Projection);
    }
    let s = 1.5 * rng.random::<f64>() / (dim as f64).sqrt();
    let g = gaussian_matrix::<T, R>(dim, dim, rng).map(|x| x.scale(s));
    let sigma = operator_norm(&g);
    (g.map(|x| x.unscale(sigma.max(1.0))), ContractionKind::General)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn m(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn eigen_examples() {
        assert_eq!(HermitianMatrix::<f64>::identity(3).eig_decompose().eigenvalues, vec![1.0; 3]);
        let e = HermitianMatrix::<f64>::diagonal(&[2.0, -1.0]).eig_decompose().eigenvalues;
        assert_eq!(e, vec![-1.0, 2.0]);
        let e = m(&[&[0.0, 1.0], &[1.0, 0.0]]).eig_decompose().eigenvalues;
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let r = HermitianMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]));
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
        assert!(matches!(HermitianMatrix::<f64>::new(DMatrix::zeros(2, 3)), Err(Error::BadShape { .. })));
    }

    #[test]
    fn apply_function_examples() {
        let a = m(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let r = IntervalSpec::real_line();
        let sq = FunctionSpec::polynomial(vec![0.0, 0.0, 1.0], r);
        let out = a.apply_function(&sq).unwrap();
        let want = m(&[&[5.0, 3.0], &[3.0, 2.0]]);
        assert!(out.sub(&want).unwrap().frobenius_norm() < 1e-13);
        let id = FunctionSpec::polynomial(vec![0.0, 1.0], r);
        assert!(a.apply_function(&id).unwrap().sub(&a).unwrap().frobenius_norm() < 1e-14);
        let exp = FunctionSpec::parse("exp", r).unwrap();
        let d = HermitianMatrix::<f64>::diagonal(&[0.0, 2f64.ln()]).apply_function(&exp).unwrap();
        assert!((d.entry(0, 0) - 1.0).abs() < 1e-15 && (d.entry(1, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn apply_function_domain_errors_name_eigenvalue() {
        let s = FunctionSpec::parse("sqrt", IntervalSpec::nonnegative()).unwrap();
        let a = HermitianMatrix::<f64>::diagonal(&[-0.5, 1.0]);
        match a.apply_function(&s) {
            Err(Error::DomainViolation { value, .. }) => assert_eq!(value, -0.5),
            other => panic!("{other:?}"),
        }
        // rounding-level excursions snap
        let a = HermitianMatrix::<f64>::diagonal(&[-1e-13, 1.0]);
        assert!(a.apply_function(&s).is_ok());
    }

    #[test]
    fn psd_examples() {
        let v = HermitianMatrix::<f64>::identity(2).psd_check(1e-9);
        assert!(v.is_psd && v.min_eigenvalue == 1.0);
        let v = m(&[&[1.0, 2.0], &[2.0, 1.0]]).psd_check(1e-9);
        assert!(!v.is_psd);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);
        let w = &v.witness;
        assert!((m(&[&[1.0, 2.0], &[2.0, 1.0]]).rayleigh(w) - v.min_eigenvalue).abs() < 1e-9);
        let v = HermitianMatrix::<f64>::zeros(3).psd_check(1e-9);
        assert!(v.is_psd && v.min_eigenvalue == 0.0);
    }

    #[test]
    fn loewner_examples() {
        let a = m(&[&[1.0, 0.3], &[0.3, 2.0]]);
        assert!(loewner_leq(&a, &a, 1e-9).unwrap().is_psd);
        assert!(loewner_leq(&HermitianMatrix::<f64>::zeros(2), &HermitianMatrix::identity(2), 1e-9).unwrap().is_psd);
        let p = HermitianMatrix::<f64>::diagonal(&[1.0, 0.0]);
        let q = HermitianMatrix::<f64>::diagonal(&[0.0, 1.0]);
        assert!(!loewner_leq(&p, &q, 1e-9).unwrap().is_psd);
        assert!(loewner_leq(&p, &HermitianMatrix::identity(3), 1e-9).is_err());
    }

    #[test]
    fn scalar_pairs_and_determinism() {
        let i = IntervalSpec::closed_open(0.0, 1.0);
        for s in 0..50 {
            let (a, b) = random_ordered_pair::<f64, _>(1, &i, &mut seeded(s)).unwrap();
            let (x, y) = (a.entry(0, 0), b.entry(0, 0));
            assert!(0.0 <= x && x <= y && y < 1.0);
        }
        let p1 = random_ordered_pair::<f64, _>(3, &i, &mut seeded(42)).unwrap();
        let p2 = random_ordered_pair::<f64, _>(3, &i, &mut seeded(42)).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn contraction_branches() {
        let mut rng = seeded(3);
        let mut seen = [false; 3];
        for _ in 0..200 {
            let (c, kind) = random_contraction::<f64, _>(3, &mut rng);
            assert!(operator_norm(&c) <= 1.0 + 1e-12);
            match kind {
                ContractionKind::Identity => {
                    assert_eq!(c, DMatrix::identity(3, 3));
                    seen[0] = true;
                }
                ContractionKind::Projection => {
                    assert!((&c * &c - &c).norm() < 1e-12);
                    assert!((&c - c.transpose()).norm() < 1e-12);
                    seen[1] = true;
                }
                ContractionKind::General => seen[2] = true,
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn complex_contractions_and_pairs() {
        let mut rng = seeded(9);
        for _ in 0..50 {
            let (c, _) = random_contraction::<Complex64, _>(3, &mut rng);
            assert!(operator_norm(&c) <= 1.0 + 1e-12);
            let (a, b) = random_ordered_pair::<Complex64, _>(3, &IntervalSpec::open(0.0, 1.0), &mut rng).unwrap();
            assert!(loewner_leq(&a, &b, 0.0).unwrap().is_psd);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pairs_are_ordered(seed in any::<u64>(), dim in 1usize..6) {
            let i = IntervalSpec::closed_open(0.0, 0.7);
            let (a, b) = random_ordered_pair::<f64, _>(dim, &i, &mut seeded(seed)).unwrap();
            prop_assert!(loewner_leq(&a, &b, 0.0).unwrap().is_psd);
            prop_assert!(a.eigenvalues_in(&i) && b.eigenvalues_in(&i));
        }

        #[test]
        fn scalar_order_preserved_by_monotone_f(seed in any::<u64>()) {
            let i = IntervalSpec::positive();
            let f = FunctionSpec::parse("sqrt", i).unwrap();
            let (a, b) = random_ordered_pair::<f64, _>(1, &i, &mut seeded(seed)).unwrap();
            prop_assert!(f.eval(a.entry(0, 0)).unwrap() <= f.eval(b.entry(0, 0)).unwrap());
        }

        #[test]
        fn composition_of_calculus(seed in any::<u64>(), dim in 1usize..6) {
            let i = IntervalSpec::open(0.0, 1.0);
            let a = random_hermitian_in::<f64, _>(dim, &i, &mut seeded(seed)).unwrap();
            let g = FunctionSpec::parse("exp", i).unwrap();
            let f = FunctionSpec::parse("log", IntervalSpec::positive()).unwrap();
            let fg = FunctionSpec::compose(&f, &g).unwrap();
            let lhs = a.apply_function(&fg).unwrap();
            let rhs = a.apply_function(&g).unwrap().apply_function(&f).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() <= 1e-8);
        }

        #[test]
        fn psd_monotone_in_tol(seed in any::<u64>(), t1 in 0.0f64..1e-3, extra in 0.0f64..1e-3) {
            let mut rng = seeded(seed);
            let spec: Vec<f64> = (0..4).map(|k| if k == 0 { -rng.random::<f64>() * 2e-3 } else { rng.random() }).collect();
            let a = with_spectrum::<f64, _>(&spec, &mut rng);
            if a.psd_check(t1).is_psd {
                prop_assert!(a.psd_check(t1 + extra).is_psd);
            }
        }
    }

    #[test]
    fn eigen_round_trip_1000() {
        let mut rng = seeded(2024);
        for case in 0..1000 {
            let dim = 1 + case % 8;
            let g = gaussian_matrix::<f64, _>(dim, dim, &mut rng);
            let a = HermitianMatrix::hermitian_part(&g);
            let sd = a.eig_decompose();
            assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let back = sd.recompose(&sd.eigenvalues);
            let err = back.sub(&a).unwrap().frobenius_norm();
            assert!(err <= 1e-10 * a.frobenius_norm().max(1.0));
            let v = &sd.eigenvectors;
            let gram = v.adjoint() * v;
            assert!((gram - DMatrix::<f64>::identity(dim, dim)).amax() <= 1e-10);
        }
    }
}

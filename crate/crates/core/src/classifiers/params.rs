//! Flat parameter encodings of node tuples and matrix configurations, so the
//! pattern search can perturb them, plus the deterministic stress tuples.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::funcmodel::IntervalSpec;
use crate::matcore::{operator_norm, HermitianMatrix};
use crate::rng::TrialRng;

pub(crate) fn sym_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Upper triangle, row-major.
pub(crate) fn push_sym(out: &mut Vec<f64>, m: &HermitianMatrix) {
    let n = m.dim();
    for i in 0..n {
        for j in i..n {
            out.push(m.entry(i, j));
        }
    }
}

pub(crate) fn sym_from(p: &[f64], n: usize) -> HermitianMatrix {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = p[k];
            m[(j, i)] = p[k];
            k += 1;
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

pub(crate) fn square_from(p: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, &p[..rows * cols])
}

pub(crate) fn push_square(out: &mut Vec<f64>, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
}

/// Rescales so that the operator norm is at most one.
pub(crate) fn contract(m: DMatrix<f64>) -> DMatrix<f64> {
    let s = operator_norm(&m);
    if s > 1.0 {
        m / s
    } else {
        m
    }
}

/// Orthogonal projection onto the column span of `g`.
pub(crate) fn projection_from(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    if g.ncols() == 0 {
        return DMatrix::zeros(n, n);
    }
    let svd = g.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1e-300)).count();
    let basis = u.columns(0, rank);
    HermitianMatrix::hermitian_part(&(&basis * basis.transpose())).into_matrix()
}

pub(crate) fn require_spectrum(m: &HermitianMatrix, interval: &IntervalSpec) -> Result<()> {
    for x in m.eig_decompose().eigenvalues {
        if interval.snap(x).is_none() {
            return Err(Error::DomainViolation { value: x, domain: interval.to_string() });
        }
    }
    Ok(())
}

/// `b − a = M Mᵀ`: encode `(a, M)` so every decoded pair stays ordered.
pub(crate) fn encode_ordered_pair(a: &HermitianMatrix, b: &HermitianMatrix) -> Vec<f64> {
    let n = a.dim();
    let gap = b.sub(a).expect("same dimension").eig_decompose();
    let mut m = gap.eigenvectors.clone();
    for (j, &mu) in gap.eigenvalues.iter().enumerate() {
        m.column_mut(j).scale_mut(mu.max(0.0).sqrt());
    }
    let mut out = Vec::with_capacity(sym_len(n) + n * n);
    push_sym(&mut out, a);
    push_square(&mut out, &m);
    out
}

pub(crate) fn decode_ordered_pair(p: &[f64], n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let a = sym_from(p, n);
    let m = square_from(&p[sym_len(n)..], n, n);
    let b = HermitianMatrix::hermitian_part(&(a.matrix() + &m * m.transpose()));
    (a, b)
}

pub(crate) fn clamp_into(p: &mut [f64], lo: f64, hi: f64) {
    for x in p {
        *x = x.clamp(lo, hi);
    }
}

/// Uniform points of `(lo, hi)`.
pub(crate) fn uniform_nodes(rng: &mut TrialRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// Deterministic hard cases: tight clusters, nodes crowding either end, and
/// nodes split between both ends.
pub(crate) fn stress_tuples(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let w = hi - lo;
    let mut out = Vec::new();
    for centre in [0.2, 0.5, 0.8] {
        for spread in [1e-3, 1e-5] {
            out.push((0..n).map(|k| lo + w * (centre + spread * k as f64)).collect());
        }
    }
    for rel in [1e-6, 1e-3] {
        out.push((0..n).map(|k| lo + w * rel * (1.0 + k as f64)).collect());
        out.push((0..n).map(|k| hi - w * rel * (1.0 + k as f64)).collect());
    }
    if n >= 2 {
        out.push((0..n).map(|k| if k % 2 == 0 { lo + w * 1e-4 * (1.0 + k as f64) } else { hi - w * 1e-4 * k as f64 }).collect());
    }
    out.push((0..n).map(|k| lo + w * (k as f64 + 0.5) / n as f64).collect());
    out
}

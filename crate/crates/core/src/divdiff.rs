//! Divided differences with repeated nodes, and the Loewner, Kraus and local
//! Hankel matrices built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcmodel::FunctionSpec;
use crate::matcore::HermitianMatrix;

/// Relative separation below which two nodes are treated as one.
pub const COINCIDENCE_REL: f64 = 1e-12;

/// Highest derivative order reached through node coincidence.
pub const MAX_COINCIDENCE_ORDER: usize = 5;

/// A real function with exact Taylor jets.
pub trait Smooth {
    fn value(&self, t: f64) -> Result<f64>;
    /// `[f(t), f'(t), f''(t)/2!, ..., f^(order)(t)/order!]`
    fn jet(&self, t: f64, order: usize) -> Result<Vec<f64>>;
}

impl Smooth for FunctionSpec {
    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }

    fn jet(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        self.taylor(t, order)
    }
}

impl<F: Smooth + ?Sized> Smooth for &F {
    fn value(&self, t: f64) -> Result<f64> {
        (**self).value(t)
    }

    fn jet(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        (**self).jet(t, order)
    }
}

pub fn coincident(a: f64, b: f64) -> bool {
    (a - b).abs() < COINCIDENCE_REL * a.abs().max(b.abs()).max(1.0)
}

/// Nodes with consecutive gaps below this (relative) are evaluated together
/// from a Taylor expansion, since difference quotients over them cancel.
const CLUSTER_REL: f64 = 1e-3;

/// Taylor order used for clusters.
const CLUSTER_ORDER: usize = crate::funcmodel::MAX_DERIVATIVE_ORDER;

/// `[d_1, ..., d_m]` of `Σ c_k (t − r)^k` is `Σ c_k h_{k−m+1}(d − r)` with
/// `h_j` the complete homogeneous symmetric polynomial. `None` when the
/// series tail is not negligible.
fn taylor_difference(jet: &[f64], offsets: &[f64]) -> Option<f64> {
    let m = offsets.len();
    let top = jet.len() - 1;
    if top + 1 < m {
        return None;
    }
    let degree = top + 1 - m;
    let mut h = vec![0.0; degree + 1];
    h[0] = 1.0;
    for &d in offsets {
        for j in 1..=degree {
            h[j] += d * h[j - 1];
        }
    }
    let terms: Vec<f64> = (0..=degree).map(|j| jet[j + m - 1] * h[j]).collect();
    let biggest = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let tail = terms[degree].abs() + if degree > 0 { terms[degree - 1].abs() } else { 0.0 };
    if !(tail <= 1e-16 * biggest) && biggest > 0.0 {
        return None;
    }
    // sum small terms first
    Some(terms.iter().rev().sum())
}

/// `[t_0, ..., t_m]_f` by the sorted triangular tableau. Runs of coincident
/// nodes collapse onto their first member and use `f^(k)/k!`; entries whose
/// nodes all lie in one tight cluster come from a Taylor expansion at the
/// cluster centre when that series converges.
pub fn divided_difference<F: Smooth + ?Sized>(f: &F, nodes: &[f64]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("divided difference needs at least one node".into()));
    }
    if let Some(&bad) = nodes.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite node {bad}")));
    }
    let mut z = nodes.to_vec();
    z.sort_by(f64::total_cmp);

    // coincidence runs, with the jet of each run
    let mut run = vec![0usize; z.len()];
    let mut reps: Vec<(f64, usize)> = vec![(z[0], 1)];
    for i in 1..z.len() {
        let (rep, count) = reps.last_mut().unwrap();
        if coincident(z[i], *rep) {
            z[i] = *rep;
            *count += 1;
        } else {
            reps.push((z[i], 1));
        }
        run[i] = reps.len() - 1;
    }
    let mut jets = Vec::with_capacity(reps.len());
    for &(rep, count) in &reps {
        if count - 1 > MAX_COINCIDENCE_ORDER {
            return Err(Error::CoincidenceOrder { multiplicity: count, max: MAX_COINCIDENCE_ORDER + 1 });
        }
        jets.push(f.jet(rep, count - 1)?);
    }

    // tight clusters of distinct runs, each with a Taylor jet at its centre
    let mut cluster = vec![0usize; z.len()];
    let mut bounds = vec![(0usize, 0usize)];
    for i in 1..z.len() {
        if z[i] - z[i - 1] < CLUSTER_REL * z[i].abs().max(1.0) {
            bounds.last_mut().unwrap().1 = i;
        } else {
            bounds.push((i, i));
        }
        cluster[i] = bounds.len() - 1;
    }
    let centre_jets: Vec<Option<(f64, Vec<f64>)>> = bounds
        .iter()
        .map(|&(a, b)| {
            if run[a] == run[b] {
                return None;
            }
            let r = 0.5 * (z[a] + z[b]);
            f.jet(r, CLUSTER_ORDER).ok().map(|j| (r, j))
        })
        .collect();

    let mut col: Vec<f64> = run.iter().map(|&c| jets[c][0]).collect();
    for j in 1..z.len() {
        for i in (j..z.len()).rev() {
            col[i] = if run[i] == run[i - j] {
                jets[run[i]][j]
            } else {
                let series = match (&centre_jets[cluster[i]], cluster[i] == cluster[i - j]) {
                    (Some((r, jet)), true) => {
                        let offsets: Vec<f64> = z[i - j..=i].iter().map(|x| x - r).collect();
                        taylor_difference(jet, &offsets)
                    }
                    _ => None,
                };
                series.unwrap_or_else(|| (col[i] - col[i - 1]) / (z[i] - z[i - j]))
            };
        }
    }
    Ok(col[z.len() - 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Loewner,
    Kraus,
    LocalMonotone,
    LocalConvex,
}

#[derive(Clone, Debug)]
pub struct CriterionMatrix {
    pub kind: CriterionKind,
    pub entries: HermitianMatrix,
    pub nodes: Vec<f64>,
    pub s: Option<f64>,
}

fn symmetric(n: usize, mut entry: impl FnMut(usize, usize) -> Result<f64>) -> Result<HermitianMatrix> {
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = entry(i, j)?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(HermitianMatrix::hermitian_part(&m))
}

/// `([t_i, t_j]_f)` with `f'(t_i)` on the diagonal.
pub fn loewner_matrix<F: Smooth + ?Sized>(f: &F, nodes: &[f64]) -> Result<CriterionMatrix> {
    let entries = symmetric(nodes.len(), |i, j| divided_difference(f, &[nodes[i], nodes[j]]))?;
    Ok(CriterionMatrix { kind: CriterionKind::Loewner, entries, nodes: nodes.to_vec(), s: None })
}

/// `([t_i, t_j, s]_f)`.
pub fn kraus_matrix<F: Smooth + ?Sized>(f: &F, nodes: &[f64], s: f64) -> Result<CriterionMatrix> {
    let entries = symmetric(nodes.len(), |i, j| divided_difference(f, &[nodes[i], nodes[j], s]))?;
    Ok(CriterionMatrix { kind: CriterionKind::Kraus, entries, nodes: nodes.to_vec(), s: Some(s) })
}

/// Local Hankel matrix of size `n` at `t`: `(f^(i+j-1)/(i+j-1)!)` for the
/// monotone kind, `(f^(i+j)/(i+j)!)` for the convex kind, `i, j = 1..n`.
pub fn local_hankel<F: Smooth + ?Sized>(f: &F, t: f64, kind: CriterionKind, n: usize) -> Result<CriterionMatrix> {
    let shift = match kind {
        CriterionKind::LocalMonotone => 1,
        CriterionKind::LocalConvex => 2,
        other => return Err(Error::InvalidArgument(format!("{other:?} is not a local criterion"))),
    };
    let jet = f.jet(t, 2 * n - 2 + shift)?;
    let entries = symmetric(n, |i, j| Ok(jet[i + j + shift]))?;
    Ok(CriterionMatrix { kind, entries, nodes: vec![t], s: None })
}

/// The 2×2 local criterion: `[[f″/2, f‴/6], [f‴/6, f⁗/24]]` (convex) or
/// `[[g′, g″/2], [g″/2, g‴/6]]` (monotone).
pub fn local_criterion_matrix<F: Smooth + ?Sized>(f: &F, t: f64, kind: CriterionKind) -> Result<CriterionMatrix> {
    local_hankel(f, t, kind, 2)
}

/// `h_s(t) = [t, s]_f`, whose jets are divided differences of `f` with `t`
/// repeated.
pub struct AnchoredDifference<'a, F: Smooth + ?Sized> {
    pub f: &'a F,
    pub s: f64,
}

impl<F: Smooth + ?Sized> Smooth for AnchoredDifference<'_, F> {
    fn value(&self, t: f64) -> Result<f64> {
        divided_difference(self.f, &[t, self.s])
    }

    fn jet(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        (0..=order)
            .map(|k| {
                let mut nodes = vec![t; k + 1];
                nodes.push(self.s);
                divided_difference(self.f, &nodes)
            })
            .collect()
    }
}

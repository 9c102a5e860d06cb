//! Scalar quality measures: d-Cut, volumes, directional conductance,
//! penalized conductance, community size, commonality, and the
//! overlapping-cover mutual-information accuracy score.

use crate::graph::{DirectedGraph, EdgeMask};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("empty cover")]
    EmptyCover,
    #[error("covers span different node universes ({a} vs {b})")]
    UniverseMismatch { a: usize, b: usize },
}

/// A directional community: a source node set `S` paired with a terminal
/// node set `T`, with volumes cached from the frozen degree vectors
/// (`vol(S)` sums out-degrees, `vol(T)` sums in-degrees).
#[derive(Debug, Clone, PartialEq)]
pub struct Community<F> {
    s: Vec<usize>,
    t: Vec<usize>,
    vol_s: F,
    vol_t: F,
}

impl<F: Real> Community<F> {
    /// Both sets must be nonempty; they are sorted and deduplicated.
    pub fn new(g: &DirectedGraph<F>, mut s: Vec<usize>, mut t: Vec<usize>) -> Self {
        s.sort_unstable();
        s.dedup();
        t.sort_unstable();
        t.dedup();
        assert!(!s.is_empty() && !t.is_empty(), "community parts must be nonempty");
        let vol_s = s.iter().map(|&i| g.out_degree(i)).sum();
        let vol_t = t.iter().map(|&j| g.in_degree(j)).sum();
        Community { s, t, vol_s, vol_t }
    }

    /// The whole graph as a community pair `(V, V)`.
    pub fn full(g: &DirectedGraph<F>) -> Self {
        let all: Vec<usize> = (0..g.node_count()).collect();
        Self::new(g, all.clone(), all)
    }

    pub fn source(&self) -> &[usize] {
        &self.s
    }

    pub fn terminal(&self) -> &[usize] {
        &self.t
    }

    pub fn vol_source(&self) -> F {
        self.vol_s
    }

    pub fn vol_terminal(&self) -> F {
        self.vol_t
    }
}

/// A list of (possibly overlapping) communities over a common node universe.
#[derive(Debug, Clone, Default)]
pub struct Cover<F> {
    pub communities: Vec<Community<F>>,
}

fn member_flags(nodes: &[usize], n: usize) -> Vec<bool> {
    let mut f = vec![false; n];
    for &i in nodes {
        f[i] = true;
    }
    f
}

/// Directional cut between two communities over active edges:
/// `sum_{i in S1, j in T2} W(i,j) + sum_{i in S2, j in T1} W(i,j)`.
pub fn d_cut<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    c1: &Community<F>,
    c2: &Community<F>,
) -> F {
    let n = g.node_count();
    let t2 = member_flags(c2.terminal(), n);
    let t1 = member_flags(c1.terminal(), n);
    let mut total = F::zero();
    for &i in c1.source() {
        for he in g.out_edges(i) {
            if mask.is_active(he.edge) && t2[he.node] {
                total += he.weight;
            }
        }
    }
    for &i in c2.source() {
        for he in g.out_edges(i) {
            if mask.is_active(he.edge) && t1[he.node] {
                total += he.weight;
            }
        }
    }
    total
}

/// Cross weight `d-Cut(C(S,T), C(S̄,T̄))` over active edges: edges leaving
/// `S` that miss `T`, plus edges entering `T` from outside `S`.
fn boundary_cut<F: Real>(g: &DirectedGraph<F>, mask: &EdgeMask, c: &Community<F>) -> F {
    let n = g.node_count();
    let in_s = member_flags(c.source(), n);
    let in_t = member_flags(c.terminal(), n);
    let mut cut = F::zero();
    for &i in c.source() {
        for he in g.out_edges(i) {
            if mask.is_active(he.edge) && !in_t[he.node] {
                cut += he.weight;
            }
        }
    }
    for &j in c.terminal() {
        for he in g.in_edges(j) {
            if mask.is_active(he.edge) && !in_s[he.node] {
                cut += he.weight;
            }
        }
    }
    cut
}

/// Directional conductance
/// `phi = d-Cut(C, C̄) / min{vol(S)+vol(T), vol(S̄)+vol(T̄)}` in `[0, 1]`.
/// Volumes are the frozen load-time degrees; the cut is taken on the masked
/// graph. `None` signals a zero denominator; callers treat that as
/// `phi = 1`.
pub fn conductance<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    c: &Community<F>,
) -> Option<F> {
    let total: F = g.out_degrees().iter().copied().sum();
    let inside = c.vol_source() + c.vol_terminal();
    let outside = (total - c.vol_source()) + (total - c.vol_terminal());
    let denom = inside.min(outside);
    if denom <= F::zero() {
        return None;
    }
    Some(boundary_cut(g, mask, c) / denom)
}

/// Conductance with the degenerate case collapsed to the worst value 1.
pub fn conductance_or_worst<F: Real>(g: &DirectedGraph<F>, mask: &EdgeMask, c: &Community<F>) -> F {
    conductance(g, mask, c).unwrap_or_else(F::one)
}

/// Community size `SZ_omega = |S| + omega |T|`.
pub fn size_omega<F: Real>(c: &Community<F>, omega: F) -> F {
    F::from_usize(c.source().len()).unwrap() + omega * F::from_usize(c.terminal().len()).unwrap()
}

/// Penalized conductance
/// `d-Cut(C, C̄) / (vol(S)+vol(T)) + 2 eta SZ_omega(C)`; the denominator is
/// deliberately not the min-form. `None` on zero volume.
pub fn penalized_conductance<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    c: &Community<F>,
    eta: F,
    omega: F,
) -> Option<F> {
    let denom = c.vol_source() + c.vol_terminal();
    if denom <= F::zero() {
        return None;
    }
    let two = F::one() + F::one();
    Some(boundary_cut(g, mask, c) / denom + two * eta * size_omega(c, omega))
}

/// Jaccard similarity of the two parts, `|S ∩ T| / |S ∪ T|`. Low values
/// indicate asymmetric communities.
pub fn commonality<F: Real>(c: &Community<F>) -> f64 {
    let mut inter = 0usize;
    let (mut a, mut b) = (0usize, 0usize);
    let (s, t) = (c.source(), c.terminal());
    while a < s.len() && b < t.len() {
        match s[a].cmp(&t[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                a += 1;
                b += 1;
            }
        }
    }
    let union = s.len() + t.len() - inter;
    inter as f64 / union as f64
}

/// Normalization variant of the overlapping-cover NMI. The cited criterion
/// exists in two closely related forms; both are provided and `Max` is the
/// default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NmiVariant {
    #[default]
    Max,
    Sum,
}

fn h(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn binary_entropy(p: f64) -> f64 {
    h(p) + h(1.0 - p)
}

/// Normalized conditional entropy `H(X|Y)_norm` of one cover given another,
/// with each community treated as a binary node-membership variable and the
/// standard admissibility condition on candidate matches.
fn normalized_conditional_entropy(x: &[Vec<bool>], y: &[Vec<bool>], n: usize) -> f64 {
    let nf = n as f64;
    let mut total = 0.0;
    for xi in x {
        let cx = xi.iter().filter(|b| **b).count() as f64;
        let hx = binary_entropy(cx / nf);
        let mut best = hx;
        for yj in y {
            let cy = yj.iter().filter(|b| **b).count() as f64;
            let n11 = xi
                .iter()
                .zip(yj.iter())
                .filter(|(a, b)| **a && **b)
                .count() as f64;
            let n10 = cx - n11;
            let n01 = cy - n11;
            let n00 = nf - cx - cy + n11;
            let (w11, w10, w01, w00) = (n11 / nf, n10 / nf, n01 / nf, n00 / nf);
            // reject complements-like matches
            if h(w11) + h(w00) < h(w01) + h(w10) {
                continue;
            }
            let hy = binary_entropy(cy / nf);
            let cond = h(w11) + h(w10) + h(w01) + h(w00) - hy;
            if cond < best {
                best = cond;
            }
        }
        if hx > 0.0 {
            total += best / hx;
        }
    }
    total / x.len() as f64
}

/// Overlapping-cover normalized mutual information between two covers given
/// as node-index sets over a universe of `n` nodes. 1 means identical
/// covers.
pub fn overlapping_nmi(
    found: &[Vec<usize>],
    truth: &[Vec<usize>],
    n: usize,
    variant: NmiVariant,
) -> Result<f64, MeasureError> {
    if found.is_empty() || truth.is_empty() {
        return Err(MeasureError::EmptyCover);
    }
    let fx: Vec<Vec<bool>> = found.iter().map(|c| member_flags(c, n)).collect();
    let fy: Vec<Vec<bool>> = truth.iter().map(|c| member_flags(c, n)).collect();
    let hxy = normalized_conditional_entropy(&fx, &fy, n);
    let hyx = normalized_conditional_entropy(&fy, &fx, n);
    let score = match variant {
        NmiVariant::Max => 1.0 - hxy.max(hyx),
        NmiVariant::Sum => 1.0 - 0.5 * (hxy + hyx),
    };
    Ok(score.clamp(0.0, 1.0))
}

/// Accuracy of a found cover against ground truth: the overlapping NMI is
/// computed once on the source parts and once on the terminal parts and the
/// two scores are averaged.
pub fn cover_accuracy<F: Real>(
    found: &Cover<F>,
    truth: &Cover<F>,
    n: usize,
    variant: NmiVariant,
) -> Result<f64, MeasureError> {
    let fs: Vec<Vec<usize>> = found
        .communities
        .iter()
        .map(|c| c.source().to_vec())
        .collect();
    let ts: Vec<Vec<usize>> = truth
        .communities
        .iter()
        .map(|c| c.source().to_vec())
        .collect();
    let ft: Vec<Vec<usize>> = found
        .communities
        .iter()
        .map(|c| c.terminal().to_vec())
        .collect();
    let tt: Vec<Vec<usize>> = truth
        .communities
        .iter()
        .map(|c| c.terminal().to_vec())
        .collect();
    let a = overlapping_nmi(&fs, &ts, n, variant)?;
    let b = overlapping_nmi(&ft, &tt, n, variant)?;
    Ok(0.5 * (a + b))
}

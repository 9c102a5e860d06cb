//! Regularized rank-one SVD solvers: the hard-threshold step, the
//! soft-threshold step with linear threshold search, the alternating
//! iterations for both penalties, and a plain power-iteration estimator of
//! the principal singular value of a submatrix.

use crate::graph::{DirectedGraph, EdgeMask};
use crate::measures::Community;
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RsvdError {
    #[error("degenerate solve: thresholding produced an empty support")]
    Degenerate,
    #[error("restriction rectangle contains no active edge")]
    EmptyRestriction,
    #[error("zero starting vector")]
    ZeroStart,
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// Sparse vector with sorted, unique support and strictly nonzero values.
/// Membership vectors `u`, `v` are stored this way; the L0 path keeps them
/// unit-normalized, the Elastic-net path normalizes by its constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec<F> {
    idx: Vec<usize>,
    val: Vec<F>,
}

impl<F: Real> Default for SparseVec<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec {
            idx: Vec::new(),
            val: Vec::new(),
        }
    }

    pub fn with_capacity(cap: usize) -> Self {
        SparseVec {
            idx: Vec::with_capacity(cap),
            val: Vec::with_capacity(cap),
        }
    }

    /// Indicator of a single node, unit norm.
    pub fn unit(i: usize) -> Self {
        SparseVec {
            idx: vec![i],
            val: vec![F::one()],
        }
    }

    /// From parallel slices; indices must be strictly increasing and values
    /// nonzero.
    pub fn from_parts(idx: Vec<usize>, val: Vec<F>) -> Self {
        debug_assert_eq!(idx.len(), val.len());
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(val.iter().all(|v| *v != F::zero()));
        SparseVec { idx, val }
    }

    /// Appends an entry; `i` must exceed the current last index.
    pub fn push(&mut self, i: usize, v: F) {
        debug_assert!(self.idx.last().map_or(true, |&last| last < i));
        if v != F::zero() {
            self.idx.push(i);
            self.val.push(v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.idx
    }

    pub fn values(&self) -> &[F] {
        &self.val
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &F)> {
        self.idx.iter().zip(self.val.iter())
    }

    pub fn get(&self, i: usize) -> F {
        match self.idx.binary_search(&i) {
            Ok(pos) => self.val[pos],
            Err(_) => F::zero(),
        }
    }

    pub fn norm2(&self) -> F {
        self.val.iter().map(|v| *v * *v).sum::<F>().sqrt()
    }

    pub fn norm1(&self) -> F {
        self.val.iter().map(|v| v.abs()).sum()
    }

    pub fn scale(&mut self, s: F) {
        for v in &mut self.val {
            *v *= s;
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm2();
        if n > F::zero() {
            self.scale(F::one() / n);
        }
    }

    pub fn dot(&self, other: &SparseVec<F>) -> F {
        let mut acc = F::zero();
        let (mut a, mut b) = (0usize, 0usize);
        while a < self.idx.len() && b < other.idx.len() {
            match self.idx[a].cmp(&other.idx[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.val[a] * other.val[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Max-norm of the difference, walking both supports.
    pub fn linf_diff(&self, other: &SparseVec<F>) -> F {
        let mut best = F::zero();
        let (mut a, mut b) = (0usize, 0usize);
        while a < self.idx.len() || b < other.idx.len() {
            let d = if b >= other.idx.len() || (a < self.idx.len() && self.idx[a] < other.idx[b]) {
                let d = self.val[a].abs();
                a += 1;
                d
            } else if a >= self.idx.len() || other.idx[b] < self.idx[a] {
                let d = other.val[b].abs();
                b += 1;
                d
            } else {
                let d = (self.val[a] - other.val[b]).abs();
                a += 1;
                b += 1;
                d
            };
            if d > best {
                best = d;
            }
        }
        best
    }

    pub fn to_dense(&self, n: usize) -> Vec<F> {
        let mut out = vec![F::zero(); n];
        for (&i, &v) in self.iter() {
            out[i] = v;
        }
        out
    }

    /// Keeps only entries whose index passes the predicate.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> SparseVec<F> {
        let mut out = SparseVec::with_capacity(self.nnz());
        for (&i, &v) in self.iter() {
            if keep(i) {
                out.push(i, v);
            }
        }
        out
    }
}

/// Parameters of the L0-penalized problem: maximize
/// `u'Qv - eta (||u||_0 + omega ||v||_0)` over unit balls.
#[derive(Debug, Clone, Copy)]
pub struct L0Params<F> {
    pub eta: F,
    pub omega: F,
}

impl<F: Real> L0Params<F> {
    pub fn new(eta: F) -> Self {
        L0Params {
            eta,
            omega: F::one(),
        }
    }
}

/// Parameters of the Elastic-net constrained problem: maximize `u'Qv`
/// subject to `(1-alpha)||u||^2 + alpha||u||_1 <= c1` and likewise for `v`.
/// `c1 = c2 = 1` by default; they only set the magnitude of the solution.
#[derive(Debug, Clone, Copy)]
pub struct ENParams<F> {
    pub alpha: F,
    pub beta: F,
    pub c1: F,
    pub c2: F,
}

impl<F: Real> ENParams<F> {
    pub fn new(alpha: F) -> Self {
        ENParams {
            alpha,
            beta: alpha,
            c1: F::one(),
            c2: F::one(),
        }
    }
}

/// Result of an alternating solve.
#[derive(Debug, Clone)]
pub struct RsvdResult<F> {
    pub u: SparseVec<F>,
    pub v: SparseVec<F>,
    pub objective: F,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every half-step, for monotonicity checks.
    pub objective_trace: Vec<F>,
    pub edge_touches: u64,
}

/// Sorts entries by magnitude descending, ties by smaller node index.
fn sorted_by_magnitude<F: Real>(z: &SparseVec<F>) -> Vec<(F, usize, F)> {
    let mut order: Vec<(F, usize, F)> = z.iter().map(|(&i, &v)| (v.abs(), i, v)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    order
}

/// Solves `max_{||u||<=1} u'z - rho ||u||_0` by the direct threshold search:
/// keep the top-`l` magnitudes where `l` is the minimum integer with
/// `|z|_(l+1) <= sqrt(rho^2 + 2 rho ||z_l^h||)`, then normalize. Ties in
/// magnitude are broken toward the smaller node index. Returns an empty
/// vector when `z` is all zero.
pub fn hard_threshold_solve<F: Real>(z: &SparseVec<F>, rho: F) -> SparseVec<F> {
    debug_assert!(rho > F::zero());
    if z.is_empty() {
        return SparseVec::new();
    }
    let order = sorted_by_magnitude(z);
    let k = order.len();
    let mut sq = F::zero();
    let mut chosen = k;
    for l in 1..=k {
        sq += order[l - 1].0 * order[l - 1].0;
        let next = if l < k { order[l].0 } else { F::zero() };
        let bound = (rho * rho + (F::one() + F::one()) * rho * sq.sqrt()).sqrt();
        if next <= bound {
            chosen = l;
            break;
        }
    }
    let norm = order[..chosen]
        .iter()
        .map(|&(a, _, _)| a * a)
        .sum::<F>()
        .sqrt();
    let mut pairs: Vec<(usize, F)> = order[..chosen]
        .iter()
        .map(|&(_, i, v)| (i, v / norm))
        .collect();
    pairs.sort_unstable_by_key(|&(i, _)| i);
    let (idx, val) = pairs.into_iter().unzip();
    SparseVec::from_parts(idx, val)
}

/// Soft-thresholding `sign(z) (|z| - d)+`.
pub fn soft_threshold<F: Real>(z: &SparseVec<F>, d: F) -> SparseVec<F> {
    debug_assert!(d >= F::zero());
    let mut out = SparseVec::with_capacity(z.nnz());
    for (&i, &v) in z.iter() {
        let m = v.abs() - d;
        if m > F::zero() {
            out.push(i, v.signum() * m);
        }
    }
    out
}

/// Evaluates `G_z(x)`: with `k(x)` the count of magnitudes strictly above
/// `x`, `G_z(x) = (1/4x^2) sum (|z|_(i)-x)^2 + (1/2x) sum (|z|_(i)-x)` over
/// those entries. Strictly decreasing on `(0, max|z|]`.
pub fn g_of<F: Real>(z: &SparseVec<F>, x: F) -> F {
    let two = F::one() + F::one();
    let four = two + two;
    let mut s1 = F::zero();
    let mut s2 = F::zero();
    for &v in z.values() {
        let a = v.abs();
        if a > x {
            s1 += a - x;
            s2 += (a - x) * (a - x);
        }
    }
    s2 / (four * x * x) + s1 / (two * x)
}

/// Finds `d` with `G_z(d) = c` by one pass over sorted magnitudes with
/// running cumulative sums: locate `k̂` with `G(|z|_(k̂)) <= c < G(|z|_(k̂+1))`,
/// then `d = sqrt(sum_{i<=k̂} |z|_(i)^2 / (4c + k̂))`. Returns `None` for an
/// all-zero input.
pub fn en_threshold_level<F: Real>(z: &SparseVec<F>, c: F) -> Option<F> {
    debug_assert!(c > F::zero());
    if z.is_empty() {
        return None;
    }
    let two = F::one() + F::one();
    let four = two + two;
    let mut mags: Vec<F> = z.values().iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = mags.len();
    // G(|z|_(1)) = 0 <= c always; scan for the first k with G(|z|_(k)) > c
    let mut s1 = F::zero();
    let mut s2 = F::zero();
    let mut k_hat = n;
    for k in 2..=n {
        s1 += mags[k - 2];
        s2 += mags[k - 2] * mags[k - 2];
        let x = mags[k - 1];
        if x == F::zero() {
            k_hat = k - 1;
            break;
        }
        let fk = F::from_usize(k - 1).unwrap();
        let g = (s2 - two * x * s1 + fk * x * x) / (four * x * x) + (s1 - fk * x) / (two * x);
        if g > c {
            k_hat = k - 1;
            break;
        }
    }
    let top: F = mags[..k_hat].iter().map(|&a| a * a).sum();
    let fk = F::from_usize(k_hat).unwrap();
    Some((top / (four * c + fk)).sqrt())
}

/// Solves `max u'z` under the Elastic-net constraint
/// `(1-alpha)||u||^2 + alpha||u||_1 = c`: soft-threshold at the level `d`
/// solving `G_z(d) = c(1-alpha)/alpha^2`, scaled by `alpha / (2d(1-alpha))`
/// so that the constraint is active. `alpha = 0` reduces to plain
/// normalization with `||u||^2 = c`.
pub fn en_solve<F: Real>(z: &SparseVec<F>, alpha: F, c: F) -> Option<SparseVec<F>> {
    if z.is_empty() {
        return None;
    }
    if alpha == F::zero() {
        let mut u = z.clone();
        u.normalize();
        u.scale(c.sqrt());
        return Some(u);
    }
    let two = F::one() + F::one();
    let target = c * (F::one() - alpha) / (alpha * alpha);
    let d = en_threshold_level(z, target)?;
    let mut u = soft_threshold(z, d);
    if u.is_empty() {
        return None;
    }
    u.scale(alpha / (two * d * (F::one() - alpha)));
    Some(u)
}

fn linf_converged<F: Real>(
    u: &SparseVec<F>,
    u_prev: &SparseVec<F>,
    v: &SparseVec<F>,
    v_prev: &SparseVec<F>,
    tol: F,
) -> bool {
    u.linf_diff(u_prev) < tol && v.linf_diff(v_prev) < tol
}

/// Alternating L0-regularized rank-one SVD: `z <- Qv`, hard-threshold with
/// `rho = eta` for `u`; `z <- Q'u`, hard-threshold with `rho = eta*omega`
/// for `v`; repeat until the vectors stabilize. The objective
/// `u'Qv - eta(||u||_0 + omega ||v||_0)` is non-decreasing across
/// half-steps.
pub fn l0_rsvd<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    params: L0Params<F>,
    v0: &SparseVec<F>,
    tol: F,
    max_iter: usize,
) -> Result<RsvdResult<F>, RsvdError> {
    if v0.is_empty() {
        return Err(RsvdError::ZeroStart);
    }
    let mut v = v0.clone();
    v.normalize();
    let mut u = SparseVec::new();
    let mut trace = Vec::new();
    let mut touches = 0u64;
    let mut objective = F::zero();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let u_prev = u.clone();
        let v_prev = v.clone();

        let (z, t1) = g.laplacian_matvec(mask, &v)?;
        touches += t1;
        u = hard_threshold_solve(&z, params.eta);
        if u.is_empty() {
            return Err(RsvdError::Degenerate);
        }
        let card_v = F::from_usize(v.nnz()).unwrap();
        let card_u = F::from_usize(u.nnz()).unwrap();
        trace.push(u.dot(&z) - params.eta * (card_u + params.omega * card_v));

        let (zt, t2) = g.laplacian_rmatvec(mask, &u)?;
        touches += t2;
        v = hard_threshold_solve(&zt, params.eta * params.omega);
        if v.is_empty() {
            return Err(RsvdError::Degenerate);
        }
        let card_v = F::from_usize(v.nnz()).unwrap();
        objective = v.dot(&zt) - params.eta * (card_u + params.omega * card_v);
        trace.push(objective);

        if it > 1 && linf_converged(&u, &u_prev, &v, &v_prev, tol) {
            converged = true;
            break;
        }
    }
    Ok(RsvdResult {
        u,
        v,
        objective,
        iterations,
        converged,
        objective_trace: trace,
        edge_touches: touches,
    })
}

/// Alternating Elastic-net regularized rank-one SVD; same contract as
/// [`l0_rsvd`] with the threshold steps replaced by the soft-threshold
/// updates. The objective is the bilinear form `u'Qv`.
pub fn en_rsvd<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    params: ENParams<F>,
    v0: &SparseVec<F>,
    tol: F,
    max_iter: usize,
) -> Result<RsvdResult<F>, RsvdError> {
    if v0.is_empty() {
        return Err(RsvdError::ZeroStart);
    }
    let mut v = v0.clone();
    v.normalize();
    let mut u = SparseVec::new();
    let mut trace = Vec::new();
    let mut touches = 0u64;
    let mut objective = F::zero();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let u_prev = u.clone();
        let v_prev = v.clone();

        let (z, t1) = g.laplacian_matvec(mask, &v)?;
        touches += t1;
        u = en_solve(&z, params.alpha, params.c1).ok_or(RsvdError::Degenerate)?;
        trace.push(u.dot(&z));

        let (zt, t2) = g.laplacian_rmatvec(mask, &u)?;
        touches += t2;
        v = en_solve(&zt, params.beta, params.c2).ok_or(RsvdError::Degenerate)?;
        objective = v.dot(&zt);
        trace.push(objective);

        if it > 1 && linf_converged(&u, &u_prev, &v, &v_prev, tol) {
            converged = true;
            break;
        }
    }
    Ok(RsvdResult {
        u,
        v,
        objective,
        iterations,
        converged,
        objective_trace: trace,
        edge_touches: touches,
    })
}

/// Principal singular value of the submatrix `Q(C(S,T))` by alternating
/// power iteration, absolute tolerance 1e-10. The start vector is the
/// in-degree profile over `T` with a small deterministic jitter so it is
/// never orthogonal to the principal space.
pub fn principal_singular_value<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    restriction: &Community<F>,
) -> Result<F, RsvdError> {
    let n = g.node_count();
    let mut in_s = vec![false; n];
    let mut in_t = vec![false; n];
    for &i in restriction.source() {
        in_s[i] = true;
    }
    for &j in restriction.terminal() {
        in_t[j] = true;
    }
    let mut has_edge = false;
    'outer: for &i in restriction.source() {
        for he in g.out_edges(i) {
            if mask.is_active(he.edge) && in_t[he.node] {
                has_edge = true;
                break 'outer;
            }
        }
    }
    if !has_edge {
        return Err(RsvdError::EmptyRestriction);
    }

    let jitter = F::from_f64_lossy(1e-3);
    let mut v = SparseVec::with_capacity(restriction.terminal().len());
    for (k, &j) in restriction.terminal().iter().enumerate() {
        let base = g.in_degree(j).sqrt();
        let wob = jitter * F::from_usize(1 + (k % 7)).unwrap();
        v.push(j, base + wob);
    }
    v.normalize();

    let tol = F::from_f64_lossy(1e-10);
    let mut sigma = F::zero();
    for _ in 0..20000 {
        let (zu, _) = g.laplacian_matvec(mask, &v)?;
        let mut u = zu.restrict(|i| in_s[i]);
        let nu = u.norm2();
        if nu == F::zero() {
            return Ok(F::zero());
        }
        u.scale(F::one() / nu);
        let (zv, _) = g.laplacian_rmatvec(mask, &u)?;
        let mut vt = zv.restrict(|j| in_t[j]);
        let nv = vt.norm2();
        if nv == F::zero() {
            return Ok(F::zero());
        }
        vt.scale(F::one() / nv);
        v = vt;
        if (nv - sigma).abs() < tol {
            return Ok(nv);
        }
        sigma = nv;
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(vals: &[f64]) -> SparseVec<f64> {
        let mut z = SparseVec::new();
        for (i, &v) in vals.iter().enumerate() {
            z.push(i, v);
        }
        z
    }

    /// Brute-force oracle: argmax over l of ||z_l^h|| - rho*l, same
    /// magnitude-descending index-ascending order as the solver.
    fn hard_threshold_oracle(z: &SparseVec<f64>, rho: f64) -> SparseVec<f64> {
        let order = sorted_by_magnitude(z);
        let k = order.len();
        if k == 0 {
            return SparseVec::new();
        }
        let mut best_l = 1;
        let mut best = f64::NEG_INFINITY;
        let mut sq = 0.0;
        for l in 1..=k {
            sq += order[l - 1].0 * order[l - 1].0;
            let f = sq.sqrt() - rho * l as f64;
            if f > best {
                best = f;
                best_l = l;
            }
        }
        let norm: f64 = order[..best_l]
            .iter()
            .map(|&(a, _, _)| a * a)
            .sum::<f64>()
            .sqrt();
        let mut pairs: Vec<(usize, f64)> = order[..best_l]
            .iter()
            .map(|&(_, i, v)| (i, v / norm))
            .collect();
        pairs.sort_unstable_by_key(|&(i, _)| i);
        let (idx, val) = pairs.into_iter().unzip();
        SparseVec::from_parts(idx, val)
    }

    #[test]
    fn hard_threshold_dominant_entry() {
        let u = hard_threshold_solve(&sv(&[5.0, 0.0, 0.0]), 1.0);
        assert_eq!(u.support(), &[0]);
        assert!((u.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hard_threshold_keeps_two_of_three() {
        let u = hard_threshold_solve(&sv(&[3.0, 2.0, 1.0]), 0.5);
        assert_eq!(u.support(), &[0, 1]);
        let norm = 13.0f64.sqrt();
        assert!((u.values()[0] - 3.0 / norm).abs() < 1e-15);
        assert!((u.values()[1] - 2.0 / norm).abs() < 1e-15);
    }

    #[test]
    fn hard_threshold_matches_oracle_on_random_inputs() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=100);
            let mut z = SparseVec::new();
            for i in 0..n {
                let v: f64 = rng.gen_range(-2.0..2.0);
                if v != 0.0 {
                    z.push(i, v);
                }
            }
            if z.is_empty() {
                continue;
            }
            let rho = rng.gen_range(0.01..1.0);
            let got = hard_threshold_solve(&z, rho);
            let want = hard_threshold_oracle(&z, rho);
            assert_eq!(got.support(), want.support());
            for (a, b) in got.values().iter().zip(want.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn soft_threshold_cases() {
        let z = sv(&[2.0, -1.0]);
        let same = soft_threshold(&z, 0.0);
        assert_eq!(same, z);
        let zeroed = soft_threshold(&z, 2.5);
        assert!(zeroed.is_empty());
        let s = soft_threshold(&z, 0.5);
        assert_eq!(s.values(), &[1.5, -0.5]);
    }

    #[test]
    fn en_threshold_single_entry_closed_form() {
        // G(d) = (a-d)^2/(4d^2) + (a-d)/(2d) for d < a; with k̂ = 1 the
        // closed form is d = a / sqrt(4c + 1)
        let a = 1.7;
        for &c in &[0.3, 1.0, 4.2] {
            let z = sv(&[a]);
            let d = en_threshold_level(&z, c).unwrap();
            let expect = a / (4.0 * c + 1.0f64).sqrt();
            assert!((d - expect).abs() < 1e-12);
            assert!((g_of(&z, d) - c).abs() < 1e-10);
        }
    }

    #[test]
    fn en_threshold_solves_defining_equation() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(1..=50);
            let mut z = SparseVec::<f64>::new();
            for i in 0..n {
                z.push(i, rng.gen_range(0.01..3.0) * if rng.gen() { 1.0 } else { -1.0 });
            }
            let c = rng.gen_range(0.05..20.0);
            let d = en_threshold_level(&z, c).unwrap();
            assert!((g_of(&z, d) - c).abs() < 1e-10, "G(d) missed c");
        }
    }

    #[test]
    fn en_threshold_matches_bisection_oracle() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let n = rng.gen_range(1..=50);
            let mut z = SparseVec::<f64>::new();
            for i in 0..n {
                z.push(i, rng.gen_range(0.01..3.0));
            }
            let c = rng.gen_range(0.05..20.0);
            let d = en_threshold_level(&z, c).unwrap();
            // bisection on the monotone decreasing G
            let mut lo = 1e-12;
            let mut hi = z.values().iter().cloned().fold(0.0f64, f64::max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g_of(&z, mid) > c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((d - hi).abs() < 1e-8, "linear {d} vs bisection {hi}");
        }
    }

    #[test]
    fn en_solve_activates_constraint() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let n = rng.gen_range(1..=40);
            let mut z = SparseVec::<f64>::new();
            for i in 0..n {
                z.push(i, rng.gen_range(-2.0..2.0));
            }
            if z.is_empty() {
                continue;
            }
            let alpha = rng.gen_range(0.05..0.95);
            let c = rng.gen_range(0.1..3.0);
            if let Some(u) = en_solve(&z, alpha, c) {
                let lhs = (1.0 - alpha) * u.norm2().powi(2) + alpha * u.norm1();
                assert!((lhs - c).abs() < 1e-9, "constraint {lhs} vs {c}");
            }
        }
    }

    #[test]
    fn en_solve_beats_random_feasible_vectors() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 8;
        let mut z = SparseVec::new();
        for i in 0..n {
            z.push(i, rng.gen_range(-2.0..2.0));
        }
        let alpha = 0.4;
        let c = 1.0;
        let u = en_solve(&z, alpha, c).unwrap();
        let best = u.dot(&z);
        for _ in 0..10_000 {
            let mut cand = SparseVec::new();
            for i in 0..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if v != 0.0 {
                    cand.push(i, v);
                }
            }
            // scale candidate onto the constraint boundary
            let a2 = (1.0 - alpha) * cand.norm2().powi(2);
            let a1 = alpha * cand.norm1();
            if a2 == 0.0 && a1 == 0.0 {
                continue;
            }
            let s = (-a1 + (a1 * a1 + 4.0 * a2 * c).sqrt()) / (2.0 * a2);
            cand.scale(s);
            assert!(cand.dot(&z) <= best + 1e-9);
        }
    }

    #[test]
    fn en_solve_single_entry_closed_form() {
        // one coordinate: maximize u*a under (1-α)u² + αu = c, so u solves
        // the quadratic with the positive root
        let a = 2.3;
        let alpha = 0.3;
        let c = 1.0;
        let z = sv(&[a]);
        let u = en_solve(&z, alpha, c).unwrap();
        assert_eq!(u.support(), &[0]);
        let expect = (-alpha + (alpha * alpha + 4.0 * (1.0 - alpha) * c).sqrt())
            / (2.0 * (1.0 - alpha));
        assert!((u.values()[0] - expect).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn g_is_strictly_decreasing(
            vals in proptest::collection::vec(0.01f64..5.0, 1..30),
            d1 in 0.01f64..4.0,
            d2 in 0.01f64..4.0,
        ) {
            let z = sv(&vals);
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assume!(hi - lo > 1e-9);
            let max = vals.iter().cloned().fold(0.0f64, f64::max);
            prop_assume!(hi <= max);
            prop_assert!(g_of(&z, hi) < g_of(&z, lo));
        }

        #[test]
        fn hard_threshold_output_is_unit_norm(
            vals in proptest::collection::vec(-3.0f64..3.0, 1..60),
            rho in 0.01f64..1.5,
        ) {
            let z = sv(&vals);
            prop_assume!(!z.is_empty());
            let u = hard_threshold_solve(&z, rho);
            prop_assert!((u.norm2() - 1.0).abs() < 1e-12);
        }
    }
}

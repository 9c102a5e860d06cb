//! Graph ingestion, degree bookkeeping, and masked Laplacian matrix-vector
//! products. This is the only module that touches adjacency directly.
//!
//! The graph Laplacian is `Q = D_r^{-1/2} W D_c^{-1/2}` with the convention
//! `0/0 = 0`, where `D_r` and `D_c` are the diagonal matrices of out- and
//! in-degrees. Degrees are frozen at load time: harvesting zeroes entries of
//! `Q`, not of `W`, so the normalization of the reduced matrix keeps the
//! original degrees.

use crate::measures::Community;
use crate::rsvd::SparseVec;
use crate::scalar::Real;
use std::collections::HashMap;
use std::io::BufRead;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected `src dst [weight]`, got {got:?}")]
    Malformed { line: usize, got: String },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("line {line}: weight is not a number: {got:?}")]
    BadWeight { line: usize, got: String },
    #[error("empty input: no edges")]
    Empty,
    #[error("dimension mismatch: vector index {index} out of range for {n} nodes")]
    Dimension { index: usize, n: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One endpoint record in an adjacency group: the opposite node, the edge
/// weight, and the canonical edge id shared by both groupings.
#[derive(Debug, Clone, Copy)]
pub struct HalfEdge<F> {
    pub node: usize,
    pub weight: F,
    pub edge: usize,
}

/// Immutable directed graph with dual compressed adjacency: edges grouped by
/// source node and grouped by terminal node, each group sorted by the
/// opposite endpoint. Self-edges are dropped at load and duplicate
/// `(src, dst)` pairs are merged by summing weights.
#[derive(Debug, Clone)]
pub struct DirectedGraph<F> {
    n: usize,
    m: usize,
    out_start: Vec<usize>,
    out_adj: Vec<HalfEdge<F>>,
    in_start: Vec<usize>,
    in_adj: Vec<HalfEdge<F>>,
    out_deg: Vec<F>,
    in_deg: Vec<F>,
    /// inverse square roots of the degrees, zero where the degree is zero
    out_norm: Vec<F>,
    in_norm: Vec<F>,
    labels: Vec<String>,
}

impl<F: Real> DirectedGraph<F> {
    /// Builds a graph from `(src, dst, weight)` triples over internal indices
    /// `[0, n)`. Self-edges are dropped, duplicates merged, zero-weight edges
    /// discarded. `labels` maps internal indices back to external labels; if
    /// empty, indices are used as their own labels.
    pub fn from_edges(n: usize, edges: &[(usize, usize, F)], labels: Vec<String>) -> Self {
        let mut merged: HashMap<(usize, usize), F> = HashMap::with_capacity(edges.len());
        for &(s, t, w) in edges {
            assert!(s < n && t < n, "edge endpoint out of range");
            if s == t || w == F::zero() {
                continue;
            }
            *merged.entry((s, t)).or_insert_with(F::zero) += w;
        }
        let mut list: Vec<((usize, usize), F)> = merged.into_iter().collect();
        list.sort_unstable_by_key(|&((s, t), _)| (s, t));
        let m = list.len();

        let mut out_start = vec![0usize; n + 1];
        for &((s, _), _) in &list {
            out_start[s + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
        }
        let mut out_adj = Vec::with_capacity(m);
        for (id, &((_, t), w)) in list.iter().enumerate() {
            out_adj.push(HalfEdge {
                node: t,
                weight: w,
                edge: id,
            });
        }

        let mut in_count = vec![0usize; n + 1];
        for &((_, t), _) in &list {
            in_count[t + 1] += 1;
        }
        for j in 0..n {
            in_count[j + 1] += in_count[j];
        }
        let in_start = in_count.clone();
        let mut in_adj = vec![
            HalfEdge {
                node: 0,
                weight: F::zero(),
                edge: 0
            };
            m
        ];
        // fill by terminal; per-terminal runs end up sorted by source because
        // the edge list is sorted by (src, dst)
        let mut cursor = in_start.clone();
        for (id, &((s, t), w)) in list.iter().enumerate() {
            in_adj[cursor[t]] = HalfEdge {
                node: s,
                weight: w,
                edge: id,
            };
            cursor[t] += 1;
        }

        let mut out_deg = vec![F::zero(); n];
        let mut in_deg = vec![F::zero(); n];
        for &((s, t), w) in &list {
            out_deg[s] += w;
            in_deg[t] += w;
        }
        let inv_sqrt = |d: &F| {
            if *d > F::zero() {
                F::one() / d.sqrt()
            } else {
                F::zero()
            }
        };
        let out_norm = out_deg.iter().map(inv_sqrt).collect();
        let in_norm = in_deg.iter().map(inv_sqrt).collect();

        let labels = if labels.is_empty() {
            (0..n).map(|i| i.to_string()).collect()
        } else {
            assert_eq!(labels.len(), n);
            labels
        };

        DirectedGraph {
            n,
            m,
            out_start,
            out_adj,
            in_start,
            in_adj,
            out_deg,
            in_deg,
            out_norm,
            in_norm,
            labels,
        }
    }

    /// Parses the edge-list format: UTF-8 text, one `src dst [weight]` per
    /// line, whitespace-delimited, `#`-prefixed comment lines ignored.
    /// Labels are arbitrary strings remapped to dense internal indices.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut edges: Vec<(usize, usize, F)> = Vec::new();
        let intern = |s: &str, labels: &mut Vec<String>, index: &mut HashMap<String, usize>| {
            *index.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 && toks.len() != 3 {
                return Err(GraphError::Malformed {
                    line: lineno + 1,
                    got: line.to_string(),
                });
            }
            let w = if toks.len() == 3 {
                let w: f64 = toks[2].parse().map_err(|_| GraphError::BadWeight {
                    line: lineno + 1,
                    got: toks[2].to_string(),
                })?;
                if w < 0.0 {
                    return Err(GraphError::NegativeWeight {
                        line: lineno + 1,
                        weight: w,
                    });
                }
                F::from_f64_lossy(w)
            } else {
                F::one()
            };
            let s = intern(toks[0], &mut labels, &mut index);
            let t = intern(toks[1], &mut labels, &mut index);
            edges.push((s, t, w));
        }
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = labels.len();
        Ok(Self::from_edges(n, &edges, labels))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn out_degree(&self, i: usize) -> F {
        self.out_deg[i]
    }

    pub fn in_degree(&self, j: usize) -> F {
        self.in_deg[j]
    }

    pub fn out_degrees(&self) -> &[F] {
        &self.out_deg
    }

    pub fn in_degrees(&self) -> &[F] {
        &self.in_deg
    }

    /// Out-edges of node `i`, sorted by terminal.
    pub fn out_edges(&self, i: usize) -> &[HalfEdge<F>] {
        &self.out_adj[self.out_start[i]..self.out_start[i + 1]]
    }

    /// In-edges of node `j`, sorted by source.
    pub fn in_edges(&self, j: usize) -> &[HalfEdge<F>] {
        &self.in_adj[self.in_start[j]..self.in_start[j + 1]]
    }

    /// Laplacian entry factor `1 / sqrt(d_{r,i} d_{c,j})` for an edge
    /// `(i, j)`; zero degrees yield zero per the `0/0 = 0` convention.
    #[inline]
    pub fn norm_factor(&self, i: usize, j: usize) -> F {
        self.out_norm[i] * self.in_norm[j]
    }

    /// Computes `z = Q v` over active edges; only edges incident to
    /// `support(v)` are visited. Returns the result with the number of edge
    /// touches.
    pub fn laplacian_matvec(
        &self,
        mask: &EdgeMask,
        v: &SparseVec<F>,
    ) -> Result<(SparseVec<F>, u64), GraphError> {
        self.apply(mask, v, false)
    }

    /// Transpose counterpart: `z = Q^t u`, local over `support(u)`.
    pub fn laplacian_rmatvec(
        &self,
        mask: &EdgeMask,
        u: &SparseVec<F>,
    ) -> Result<(SparseVec<F>, u64), GraphError> {
        self.apply(mask, u, true)
    }

    fn apply(
        &self,
        mask: &EdgeMask,
        v: &SparseVec<F>,
        transpose: bool,
    ) -> Result<(SparseVec<F>, u64), GraphError> {
        let mut acc = vec![F::zero(); self.n];
        let mut touched: Vec<usize> = Vec::new();
        let mut touches = 0u64;
        for (&j, &vj) in v.iter() {
            if j >= self.n {
                return Err(GraphError::Dimension {
                    index: j,
                    n: self.n,
                });
            }
            let nj = if transpose {
                self.out_norm[j]
            } else {
                self.in_norm[j]
            };
            let adj = if transpose {
                self.out_edges(j)
            } else {
                self.in_edges(j)
            };
            for he in adj {
                touches += 1;
                if !mask.is_active(he.edge) {
                    continue;
                }
                let ni = if transpose {
                    self.in_norm[he.node]
                } else {
                    self.out_norm[he.node]
                };
                if acc[he.node] == F::zero() {
                    touched.push(he.node);
                }
                acc[he.node] += he.weight * ni * nj * vj;
            }
        }
        touched.sort_unstable();
        let mut out = SparseVec::with_capacity(touched.len());
        for i in touched {
            if acc[i] != F::zero() {
                out.push(i, acc[i]);
            }
        }
        Ok((out, touches))
    }
}

/// Mutable activity flags over edges, supporting submatrix zeroing during
/// harvesting. A fresh mask has all edges active.
#[derive(Debug, Clone)]
pub struct EdgeMask {
    active: Vec<bool>,
    active_count: usize,
}

impl EdgeMask {
    pub fn new_full(m: usize) -> Self {
        EdgeMask {
            active: vec![true; m],
            active_count: m,
        }
    }

    #[inline]
    pub fn is_active(&self, edge: usize) -> bool {
        self.active[edge]
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    fn deactivate(&mut self, edge: usize) {
        if self.active[edge] {
            self.active[edge] = false;
            self.active_count -= 1;
        }
    }

    /// Deactivates every active edge `(i, j)` with `i ∈ S` and `j ∈ T`.
    /// Idempotent on already-inactive edges. Degrees used for Laplacian
    /// normalization are not recomputed.
    pub fn mask_community<F: Real>(&mut self, g: &DirectedGraph<F>, c: &Community<F>) {
        let mut in_t = vec![false; g.node_count()];
        for &j in c.terminal() {
            in_t[j] = true;
        }
        for &i in c.source() {
            for k in g.out_start[i]..g.out_start[i + 1] {
                let he = g.out_adj[k];
                if in_t[he.node] {
                    self.deactivate(he.edge);
                }
            }
        }
    }

    /// Deactivates every edge incident to `node`, in either direction. Used
    /// by the harvesting loop to advance past a failed seed.
    pub fn mask_node<F: Real>(&mut self, g: &DirectedGraph<F>, node: usize) {
        for k in g.out_start[node]..g.out_start[node + 1] {
            let edge = g.out_adj[k].edge;
            self.deactivate(edge);
        }
        for k in g.in_start[node]..g.in_start[node + 1] {
            let edge = g.in_adj[k].edge;
            self.deactivate(edge);
        }
    }

    /// In-degree of `j` counted over active edges only.
    pub fn active_in_degree<F: Real>(&self, g: &DirectedGraph<F>, j: usize) -> F {
        g.in_edges(j)
            .iter()
            .filter(|he| self.is_active(he.edge))
            .map(|he| he.weight)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Community;
    use crate::rsvd::SparseVec;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::io::Cursor;

    fn load(text: &str) -> DirectedGraph<f64> {
        DirectedGraph::load_edge_list(Cursor::new(text)).unwrap()
    }

    #[test]
    fn self_edge_dropped() {
        let g = load("a b\nb c\na a\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicates_merge_by_weight() {
        let g = load("1 2\n1 2\n");
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.out_edges(0)[0].weight, 2.0);
        assert_eq!(g.out_degree(0), 2.0);
    }

    #[test]
    fn comments_and_weights() {
        let g = load("# header\na b 0.5\nb c 1.5\n");
        assert_eq!(g.edge_count(), 2);
        assert!((g.in_degree(2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = DirectedGraph::<f64>::load_edge_list(Cursor::new("a b\nonly_one\n")).unwrap_err();
        match err {
            GraphError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let err = DirectedGraph::<f64>::load_edge_list(Cursor::new("a b -1\n")).unwrap_err();
        assert!(matches!(err, GraphError::NegativeWeight { line: 1, .. }));
    }

    #[test]
    fn empty_input_rejected() {
        let err = DirectedGraph::<f64>::load_edge_list(Cursor::new("# nothing\n")).unwrap_err();
        assert!(matches!(err, GraphError::Empty));
    }

    #[test]
    fn degree_sums_agree() {
        let g = load("a b\nb c\nc a 2\na c\n");
        let out: f64 = g.out_degrees().iter().sum();
        let inn: f64 = g.in_degrees().iter().sum();
        assert!((out - inn).abs() < 1e-12);
        assert!((out - 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_edge_matvec_is_identity() {
        let g = load("a b\n");
        let mask = EdgeMask::new_full(g.edge_count());
        let v = SparseVec::unit(1);
        let (z, _) = g.laplacian_matvec(&mask, &v).unwrap();
        assert_eq!(z.support(), &[0]);
        assert!((z.values()[0] - 1.0).abs() < 1e-15);
        let u = SparseVec::unit(0);
        let (z, _) = g.laplacian_rmatvec(&mask, &u).unwrap();
        assert_eq!(z.support(), &[1]);
        assert!((z.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn isolated_node_maps_to_zero() {
        let g = load("a b\nc d\n");
        let mask = EdgeMask::new_full(g.edge_count());
        // node `a` (index 0) has in-degree 0
        let v = SparseVec::unit(0);
        let (z, _) = g.laplacian_matvec(&mask, &v).unwrap();
        assert!(z.support().is_empty());
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let g = load("a b\nb c\n");
        let mask = EdgeMask::new_full(g.edge_count());
        let (z, _) = g.laplacian_rmatvec(&mask, &SparseVec::new()).unwrap();
        assert!(z.support().is_empty());
    }

    /// Dense oracle built directly from the Laplacian definition.
    fn dense_q(g: &DirectedGraph<f64>, mask: &EdgeMask) -> Vec<Vec<f64>> {
        let n = g.node_count();
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for he in g.out_edges(i) {
                if mask.is_active(he.edge) {
                    q[i][he.node] = he.weight * g.norm_factor(i, he.node);
                }
            }
        }
        q
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DirectedGraph<f64> {
        let mut edges = Vec::new();
        for _ in 0..m {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            let w = rng.gen_range(0.2..2.0);
            edges.push((s, t, w));
        }
        DirectedGraph::from_edges(n, &edges, Vec::new())
    }

    #[test]
    fn matvec_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let n = 10;
            let g = random_graph(&mut rng, n, 25);
            let mask = EdgeMask::new_full(g.edge_count());
            let q = dense_q(&g, &mask);
            let mut v = SparseVec::new();
            for j in 0..n {
                if rng.gen_bool(0.5) {
                    v.push(j, rng.gen_range(-1.0f64..1.0));
                }
            }
            let (z, _) = g.laplacian_matvec(&mask, &v).unwrap();
            let zd = z.to_dense(n);
            for i in 0..n {
                let expect: f64 = (0..n).map(|j| q[i][j] * v.get(j)).sum();
                assert!(
                    (zd[i] - expect).abs() < 1e-12,
                    "trial {trial} row {i}: {} vs {expect}",
                    zd[i]
                );
            }
            let (zt, _) = g.laplacian_rmatvec(&mask, &v).unwrap();
            let ztd = zt.to_dense(n);
            for j in 0..n {
                let expect: f64 = (0..n).map(|i| q[i][j] * v.get(i)).sum();
                assert!((ztd[j] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn masking_full_graph_clears_everything() {
        let g = load("a b\nb c\nc a\n");
        let mut mask = EdgeMask::new_full(g.edge_count());
        let all: Vec<usize> = (0..g.node_count()).collect();
        let c = Community::new(&g, all.clone(), all);
        mask.mask_community(&g, &c);
        assert_eq!(mask.active_count(), 0);
    }

    #[test]
    fn masking_single_edge() {
        let g = load("a b\n");
        let mut mask = EdgeMask::new_full(g.edge_count());
        let c = Community::new(&g, vec![0], vec![1]);
        mask.mask_community(&g, &c);
        assert_eq!(mask.active_count(), 0);
    }

    #[test]
    fn masking_one_component_leaves_the_other() {
        // two disjoint stars: a->{b,c}, d->{e,f,g}
        let g = load("a b\na c\nd e\nd f\nd g\n");
        let mut mask = EdgeMask::new_full(g.edge_count());
        let c = Community::new(&g, vec![0], vec![1, 2]);
        mask.mask_community(&g, &c);
        assert_eq!(mask.active_count(), 3);
    }

    #[test]
    fn masking_is_monotone_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_graph(&mut rng, 12, 40);
        let mut mask = EdgeMask::new_full(g.edge_count());
        let s: Vec<usize> = (0..6).collect();
        let t: Vec<usize> = (4..12).collect();
        let c = Community::new(&g, s, t);
        mask.mask_community(&g, &c);
        let after_once = mask.active_count();
        assert!(after_once <= g.edge_count());
        mask.mask_community(&g, &c);
        assert_eq!(mask.active_count(), after_once);
    }
}

//! Synthetic directed benchmark graphs with planted directional
//! communities: power-law in-degrees and community sizes, a mixing
//! parameter `mu` deciding per in-edge whether the source is drawn inside
//! or outside the community, and an optional terminal-label shuffling that
//! makes source and terminal sets of each planted community disjoint node
//! sets.
//!
//! Wiring draws each in-edge independently, so `mu` holds in expectation
//! per edge rather than exactly per node as in the original LFR
//! construction; self-edges and duplicate pairs are rejected with bounded
//! retries.

use crate::graph::DirectedGraph;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub n: usize,
    /// Target mean in-degree.
    pub avg_degree: f64,
    /// Fraction of in-edges whose source is drawn outside the community.
    pub mu: f64,
    /// Degree power-law exponent (negative).
    pub tau1: f64,
    /// Community-size power-law exponent (negative).
    pub tau2: f64,
    pub max_degree: usize,
    pub size_min: usize,
    pub size_max: usize,
    /// Permute terminal labels so planted source and terminal sets differ.
    pub shuffle: bool,
    pub rng_seed: u64,
}

impl BenchParams {
    /// Large communities, sizes in [40, 200].
    pub fn preset_big(avg_degree: f64, mu: f64, rng_seed: u64) -> Self {
        BenchParams {
            n: 1000,
            avg_degree,
            mu,
            tau1: -2.0,
            tau2: -1.0,
            max_degree: 50,
            size_min: 40,
            size_max: 200,
            shuffle: true,
            rng_seed,
        }
    }

    /// Small communities, sizes in [20, 100].
    pub fn preset_small(avg_degree: f64, mu: f64, rng_seed: u64) -> Self {
        BenchParams {
            size_min: 20,
            size_max: 100,
            ..Self::preset_big(avg_degree, mu, rng_seed)
        }
    }
}

/// Planted cover: community `k` has source set `source_parts[k]` and
/// terminal set `terminal_parts[k]`. Before shuffling the two coincide.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub source_parts: Vec<Vec<usize>>,
    pub terminal_parts: Vec<Vec<usize>>,
}

/// Draws from the discrete truncated power law `p(s) proportional to
/// s^tau` on `[lo, hi]` by inverse CDF.
fn power_law_sample(rng: &mut ChaCha8Rng, tau: f64, lo: usize, hi: usize) -> usize {
    debug_assert!(lo >= 1 && lo <= hi);
    let weights: Vec<f64> = (lo..=hi).map(|s| (s as f64).powf(tau)).collect();
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        r -= w;
        if r <= 0.0 {
            return lo + k;
        }
    }
    hi
}

fn sample_sizes(rng: &mut ChaCha8Rng, p: &BenchParams) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut total = 0usize;
    while total < p.n {
        let s = power_law_sample(rng, p.tau2, p.size_min, p.size_max);
        sizes.push(s);
        total += s;
    }
    // Trim the last community so sizes sum exactly to n.
    let excess = total - p.n;
    let last = sizes.last_mut().unwrap();
    if *last > excess {
        *last -= excess;
    } else {
        sizes.pop();
        let deficit: usize = p.n - sizes.iter().sum::<usize>();
        if deficit > 0 {
            sizes.push(deficit);
        }
    }
    sizes.retain(|&s| s > 0);
    sizes
}

fn sample_degrees(rng: &mut ChaCha8Rng, p: &BenchParams) -> Vec<usize> {
    let mut scaled: Vec<f64> = (0..p.n)
        .map(|_| power_law_sample(rng, p.tau1, 1, p.max_degree) as f64)
        .collect();
    // Rescale toward the target mean repeatedly: clamping at the caps
    // pulls the mean back, so one pass undershoots.
    for _ in 0..50 {
        let mean = scaled.iter().sum::<f64>() / p.n as f64;
        let factor = p.avg_degree / mean;
        if (factor - 1.0).abs() < 1e-6 {
            break;
        }
        for d in &mut scaled {
            *d = (*d * factor).clamp(1.0, p.max_degree as f64);
        }
    }
    scaled
        .iter()
        .map(|&d| (d.round() as usize).clamp(1, p.max_degree))
        .collect()
}

const WIRE_RETRIES: usize = 64;

/// Generates a benchmark graph and its planted cover. Nodes are assigned
/// to communities in index order; each node draws its in-edges, picking an
/// internal source with probability `1 - mu`.
pub fn generate(params: &BenchParams) -> Result<(DirectedGraph<f64>, GroundTruth), BenchError> {
    if params.n < 2 || params.size_min < 2 || params.size_min > params.size_max {
        return Err(BenchError::Infeasible("need n >= 2 and 2 <= size_min <= size_max".into()));
    }
    if params.avg_degree >= params.n as f64 {
        return Err(BenchError::Infeasible("average degree must be below n".into()));
    }
    if !(0.0..=1.0).contains(&params.mu) {
        return Err(BenchError::Infeasible("mu must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let sizes = sample_sizes(&mut rng, params);
    let mut membership = vec![0usize; params.n];
    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let mut next = 0usize;
    for (k, &s) in sizes.iter().enumerate() {
        let nodes: Vec<usize> = (next..next + s).collect();
        for &i in &nodes {
            membership[i] = k;
        }
        next += s;
        parts.push(nodes);
    }

    let degrees = sample_degrees(&mut rng, params);
    let target_edges: usize = degrees.iter().sum();
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(target_edges);
    let mut skipped = 0usize;
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for j in 0..params.n {
        let home = &parts[membership[j]];
        for _ in 0..degrees[j] {
            let internal = rng.gen::<f64>() < 1.0 - params.mu;
            let mut placed = false;
            for _ in 0..WIRE_RETRIES {
                let i = if internal && home.len() > 1 {
                    home[rng.gen_range(0..home.len())]
                } else {
                    rng.gen_range(0..params.n)
                };
                if i == j || seen.contains(&(i, j)) {
                    continue;
                }
                seen.insert((i, j));
                edges.push((i, j, 1.0));
                placed = true;
                break;
            }
            if !placed {
                skipped += 1;
            }
        }
    }
    if skipped * 10 > target_edges {
        return Err(BenchError::Infeasible(format!(
            "could not place {skipped} of {target_edges} edges"
        )));
    }

    let truth = GroundTruth {
        source_parts: parts.clone(),
        terminal_parts: parts,
    };
    let g = DirectedGraph::from_edges(params.n, &edges, Vec::new());
    if params.shuffle {
        Ok(shuffle_terminal_labels(&g, &truth, rng.gen()))
    } else {
        Ok((g, truth))
    }
}

/// Applies a uniform random permutation `pi` to terminal labels: every
/// edge `(i, j)` becomes `(i, pi(j))` and each planted terminal set is
/// mapped through `pi`. In-degree multisets are preserved except where the
/// permutation creates a self-edge, which the graph constructor drops.
pub fn shuffle_terminal_labels(
    g: &DirectedGraph<f64>,
    truth: &GroundTruth,
    rng_seed: u64,
) -> (DirectedGraph<f64>, GroundTruth) {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(g.edge_count());
    for i in 0..n {
        for he in g.out_edges(i) {
            edges.push((i, pi[he.node], 1.0));
        }
    }
    let terminal_parts = truth
        .terminal_parts
        .iter()
        .map(|part| {
            let mut mapped: Vec<usize> = part.iter().map(|&j| pi[j]).collect();
            mapped.sort_unstable();
            mapped
        })
        .collect();
    (
        DirectedGraph::from_edges(n, &edges, Vec::new()),
        GroundTruth {
            source_parts: truth.source_parts.clone(),
            terminal_parts,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_params() -> BenchParams {
        BenchParams {
            shuffle: false,
            ..BenchParams::preset_big(20.0, 0.1, 42)
        }
    }

    #[test]
    fn sizes_partition_n_within_bounds() {
        let p = base_params();
        let (_, truth) = generate(&p).unwrap();
        let total: usize = truth.source_parts.iter().map(Vec::len).sum();
        assert_eq!(total, p.n);
        let mut seen = vec![false; p.n];
        for part in &truth.source_parts {
            for &i in part {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        // All but possibly the trimmed last community respect the bounds.
        for part in &truth.source_parts[..truth.source_parts.len() - 1] {
            assert!(part.len() >= p.size_min && part.len() <= p.size_max);
        }
    }

    #[test]
    fn degrees_hit_target_mean_and_cap() {
        let p = base_params();
        let (g, _) = generate(&p).unwrap();
        let mean = g.edge_count() as f64 / p.n as f64;
        assert!((mean - p.avg_degree).abs() < 0.15 * p.avg_degree, "mean {mean}");
        for j in 0..p.n {
            assert!(g.in_edges(j).len() <= p.max_degree);
        }
    }

    #[test]
    fn mixing_fraction_matches_mu() {
        for &mu in &[0.05, 0.2, 0.4] {
            let p = BenchParams {
                mu,
                shuffle: false,
                ..BenchParams::preset_big(20.0, mu, 7)
            };
            let (g, truth) = generate(&p).unwrap();
            let mut member = vec![0usize; p.n];
            for (k, part) in truth.source_parts.iter().enumerate() {
                for &i in part {
                    member[i] = k;
                }
            }
            let mut external = 0usize;
            let mut total = 0usize;
            for i in 0..p.n {
                for he in g.out_edges(i) {
                    total += 1;
                    if member[i] != member[he.node] {
                        external += 1;
                    }
                }
            }
            let frac = external as f64 / total as f64;
            // Random external sources can land inside by chance, so the
            // observed fraction sits slightly below mu.
            assert!((frac - mu).abs() < 0.05, "mu {mu} observed {frac}");
        }
    }

    #[test]
    fn no_self_edges_or_duplicates() {
        let (g, _) = generate(&base_params()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..g.node_count() {
            for he in g.out_edges(i) {
                assert_ne!(i, he.node);
                assert!(seen.insert((i, he.node)));
            }
        }
    }

    #[test]
    fn mu_zero_without_shuffle_gives_block_components() {
        let p = BenchParams {
            mu: 0.0,
            shuffle: false,
            ..BenchParams::preset_big(20.0, 0.0, 3)
        };
        let (g, truth) = generate(&p).unwrap();
        let mask = crate::graph::EdgeMask::new_full(g.edge_count());
        let comps = crate::dcomp::directional_components(&g, &mask);
        assert_eq!(comps.len(), truth.source_parts.len());
    }

    #[test]
    fn shuffle_is_component_equivariant() {
        // Build a collision-free instance: two complete blocks on disjoint
        // halves, shuffled. The permutation may map terminals anywhere; the
        // component structure must follow the mapped truth exactly whenever
        // no self-edge was dropped.
        let p = BenchParams {
            n: 60,
            mu: 0.0,
            size_min: 10,
            size_max: 30,
            max_degree: 8,
            shuffle: false,
            ..BenchParams::preset_big(5.0, 0.0, 11)
        };
        let (g, truth) = generate(&p).unwrap();
        for seed in 0..20u64 {
            let (gs, ts) = shuffle_terminal_labels(&g, &truth, seed);
            if gs.edge_count() != g.edge_count() {
                continue; // a dropped self-edge; skip this permutation
            }
            let mask = crate::graph::EdgeMask::new_full(gs.edge_count());
            let comps = crate::dcomp::directional_components(&gs, &mask);
            assert_eq!(comps.len(), ts.source_parts.len());
            let mut found: Vec<(Vec<usize>, Vec<usize>)> = comps
                .iter()
                .map(|c| (c.s.clone(), c.t.clone()))
                .collect();
            let mut want: Vec<(Vec<usize>, Vec<usize>)> = ts
                .source_parts
                .iter()
                .zip(&ts.terminal_parts)
                .map(|(s, t)| (s.clone(), t.clone()))
                .collect();
            found.sort();
            want.sort();
            assert_eq!(found, want);
        }
    }

    #[test]
    fn shuffle_preserves_in_degree_multiset_without_collisions() {
        let p = BenchParams {
            n: 40,
            size_min: 10,
            size_max: 20,
            mu: 0.0,
            max_degree: 6,
            shuffle: false,
            ..BenchParams::preset_big(4.0, 0.0, 13)
        };
        let (g, truth) = generate(&p).unwrap();
        for seed in 0..20u64 {
            let (gs, _) = shuffle_terminal_labels(&g, &truth, seed);
            if gs.edge_count() != g.edge_count() {
                continue;
            }
            let mut before: Vec<usize> = (0..g.node_count()).map(|j| g.in_edges(j).len()).collect();
            let mut after: Vec<usize> =
                (0..gs.node_count()).map(|j| gs.in_edges(j).len()).collect();
            before.sort_unstable();
            after.sort_unstable();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = BenchParams::preset_small(20.0, 0.2, 99);
        let (g1, t1) = generate(&p).unwrap();
        let (g2, t2) = generate(&p).unwrap();
        assert_eq!(g1.edge_count(), g2.edge_count());
        for i in 0..p.n {
            let a: Vec<usize> = g1.out_edges(i).iter().map(|h| h.node).collect();
            let b: Vec<usize> = g2.out_edges(i).iter().map(|h| h.node).collect();
            assert_eq!(a, b);
        }
        assert_eq!(t1.source_parts, t2.source_parts);
        assert_eq!(t1.terminal_parts, t2.terminal_parts);
    }

    #[test]
    fn infeasible_params_error() {
        let mut p = base_params();
        p.mu = 1.5;
        assert!(generate(&p).is_err());
        let mut p = base_params();
        p.size_min = 1;
        assert!(generate(&p).is_err());
    }
}

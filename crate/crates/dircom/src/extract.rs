//! Community extraction: sweep a decreasing sparsity grid, warm-starting
//! each regularized SVD solve from the previous solution, track directional
//! conductance, stop early once the trace bounces off a good minimum, and
//! return the community at the minimum.

use crate::dcomp::directional_components;
use crate::graph::{DirectedGraph, EdgeMask};
use crate::measures::{conductance_or_worst, size_omega, Community};
use crate::rsvd::{en_rsvd, l0_rsvd, principal_singular_value, ENParams, L0Params, RsvdError,
    SparseVec};
use crate::scalar::Real;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("every grid point degenerated; no candidate community")]
    AllDegenerate,
    #[error("solver error: {0}")]
    Solver(#[from] RsvdError),
    #[error("scan guard: graph has {n} nodes, dense sigma guard is 2000")]
    TooLargeForScan { n: usize },
}

/// Which penalty drives the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    L0,
    EN,
}

/// A decreasing sequence of sparsity levels: `eta` values for L0, `alpha`
/// values for Elastic-net.
#[derive(Debug, Clone)]
pub struct SparsityGrid<F> {
    pub kind: GridKind,
    pub values: Vec<F>,
}

/// L0 grid `eta_i = exp(-(k_start + i (k_end-k_start)/count))`,
/// `i = 1..count`.
pub fn grid_l0<F: Real>(k_start: f64, k_end: f64, count: usize) -> SparsityGrid<F> {
    assert!(count >= 1);
    let values = (1..=count)
        .map(|i| {
            let k = k_start + i as f64 * (k_end - k_start) / count as f64;
            F::from_f64_lossy((-k).exp())
        })
        .collect();
    SparsityGrid {
        kind: GridKind::L0,
        values,
    }
}

/// Elastic-net grid `alpha_i = 1 / (1 + exp(k_start + i (k_end-k_start)/count))`,
/// `i = 1..count`; a logistic of an increasing exponent, hence decreasing.
pub fn grid_en<F: Real>(k_start: f64, k_end: f64, count: usize) -> SparsityGrid<F> {
    assert!(count >= 1);
    let values = (1..=count)
        .map(|i| {
            let k = k_start + i as f64 * (k_end - k_start) / count as f64;
            F::from_f64_lossy(1.0 / (1.0 + k.exp()))
        })
        .collect();
    SparsityGrid {
        kind: GridKind::EN,
        values,
    }
}

/// Early-stopping rule: stop once the current conductance exceeds
/// `s_p * min(phi so far)` while that minimum is already below `s_l`.
#[derive(Debug, Clone, Copy)]
pub struct EarlyStop<F> {
    pub s_p: F,
    pub s_l: F,
}

impl<F: Real> Default for EarlyStop<F> {
    fn default() -> Self {
        EarlyStop {
            s_p: F::from_f64_lossy(1.4),
            s_l: F::from_f64_lossy(0.4),
        }
    }
}

/// Shared solver knobs for either penalty. `omega` weights the terminal
/// part in the L0 penalty; `c` is the Elastic-net constraint level.
#[derive(Debug, Clone, Copy)]
pub struct SolverOpts<F> {
    pub omega: F,
    pub c: F,
    pub tol: F,
    pub max_iter: usize,
    /// Candidate size ceiling: grid points whose community exceeds this
    /// `SZ_omega` are recorded as degenerate and end the sweep, mirroring
    /// grid ranges chosen for a target size window. `None` disables it.
    pub max_sz: Option<F>,
}

impl<F: Real> Default for SolverOpts<F> {
    fn default() -> Self {
        SolverOpts {
            omega: F::one(),
            c: F::one(),
            tol: F::from_f64_lossy(1e-8),
            max_iter: 200,
            max_sz: None,
        }
    }
}

/// One grid point of the sweep. Degenerate solves are recorded with
/// `phi = 1` and no community so the trace stays aligned with the grid.
#[derive(Debug, Clone)]
pub struct TracePoint<F> {
    pub community: Option<Community<F>>,
    pub phi: F,
    pub objective: F,
    pub iterations: usize,
}

/// Per-grid-point record of the sweep up to the stopping index.
#[derive(Debug, Clone)]
pub struct ExtractionTrace<F> {
    pub points: Vec<TracePoint<F>>,
    pub chosen_index: usize,
    pub edge_touches: u64,
}

/// Runs the sweep and returns the community with minimum conductance among
/// recorded candidates. With early stopping engaged this is the prefix
/// minimum; without it, the global minimum of the full trace.
pub fn extract_community<F: Real>(
    g: &DirectedGraph<F>,
    mask: &EdgeMask,
    grid: &SparsityGrid<F>,
    seed_v0: &SparseVec<F>,
    stop: EarlyStop<F>,
    opts: SolverOpts<F>,
) -> Result<(Community<F>, ExtractionTrace<F>), ExtractError> {
    let mut v = seed_v0.clone();
    let mut points: Vec<TracePoint<F>> = Vec::new();
    let mut touches = 0u64;
    let mut best: Option<(usize, F)> = None;
    for &level in &grid.values {
        let solved = match grid.kind {
            GridKind::L0 => l0_rsvd(
                g,
                mask,
                L0Params {
                    eta: level,
                    omega: opts.omega,
                },
                &v,
                opts.tol,
                opts.max_iter,
            ),
            GridKind::EN => en_rsvd(
                g,
                mask,
                ENParams {
                    alpha: level,
                    beta: level,
                    c1: opts.c,
                    c2: opts.c,
                },
                &v,
                opts.tol,
                opts.max_iter,
            ),
        };
        let phi = match solved {
            Ok(res) => {
                touches += res.edge_touches;
                let c = Community::new(g, res.u.support().to_vec(), res.v.support().to_vec());
                if let Some(cap) = opts.max_sz {
                    // Candidate sizes grow along the grid; once the cap is
                    // passed the rest of the sweep is oversized too.
                    if size_omega(&c, opts.omega) > cap {
                        points.push(TracePoint {
                            community: None,
                            phi: F::one(),
                            objective: res.objective,
                            iterations: res.iterations,
                        });
                        break;
                    }
                }
                let phi = conductance_or_worst(g, mask, &c);
                points.push(TracePoint {
                    community: Some(c),
                    phi,
                    objective: res.objective,
                    iterations: res.iterations,
                });
                v = res.v;
                phi
            }
            Err(RsvdError::Degenerate) | Err(RsvdError::ZeroStart) => {
                points.push(TracePoint {
                    community: None,
                    phi: F::one(),
                    objective: F::zero(),
                    iterations: 0,
                });
                F::one()
            }
            Err(e) => return Err(e.into()),
        };
        let idx = points.len() - 1;
        if points[idx].community.is_some() && best.map_or(true, |(_, b)| phi < b) {
            best = Some((idx, phi));
        }
        if let Some((_, min_phi)) = best {
            if min_phi < stop.s_l && phi > stop.s_p * min_phi {
                break;
            }
        }
    }
    let (chosen, _) = best.ok_or(ExtractError::AllDegenerate)?;
    let community = points[chosen].community.clone().unwrap();
    Ok((
        community,
        ExtractionTrace {
            points,
            chosen_index: chosen,
            edge_touches: touches,
        },
    ))
}

/// One sampled point of [`submatrix_scan`].
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint<F> {
    pub sz: F,
    pub sigma1: F,
    pub is_component: bool,
}

/// Samples random `(S, T)` rectangles plus every directional component and
/// reports `(SZ_omega, sigma_1)` per point, for plotting the separating
/// line of the size/singular-value scatter. Guarded to graphs of at most
/// 2000 nodes.
pub fn submatrix_scan<F: Real>(
    g: &DirectedGraph<F>,
    n_samples: usize,
    omega: F,
    rng_seed: u64,
) -> Result<Vec<ScanPoint<F>>, ExtractError> {
    let n = g.node_count();
    if n > 2000 {
        return Err(ExtractError::TooLargeForScan { n });
    }
    let mask = EdgeMask::new_full(g.edge_count());
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let subset = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        let size = rng.gen_range(1..=n);
        rand::seq::index::sample(rng, n, size).into_vec()
    };
    let mut points = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let s = subset(&mut rng);
        let t = subset(&mut rng);
        let c = Community::new(g, s, t);
        let sigma1 = match principal_singular_value(g, &mask, &c) {
            Ok(s) => s,
            Err(RsvdError::EmptyRestriction) => F::zero(),
            Err(e) => return Err(e.into()),
        };
        points.push(ScanPoint {
            sz: size_omega(&c, omega),
            sigma1,
            is_component: false,
        });
    }
    for comp in directional_components(g, &mask) {
        let c = comp.to_community(g);
        let sigma1 = principal_singular_value(g, &mask, &c)?;
        points.push(ScanPoint {
            sz: size_omega(&c, omega),
            sigma1,
            is_component: true,
        });
    }
    Ok(points)
}

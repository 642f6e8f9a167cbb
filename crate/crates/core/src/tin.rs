//! Power control for treating interference as noise.
//!
//! A target tuple `d` is feasible when some `r <= 0` satisfies
//! `a_kk + r_k - max(0, max_j a_kj + r_j) >= d_k` for every user. Each
//! condition splits into difference constraints on the exponents, so the
//! question reduces to negative-cycle detection in a small graph.

use petgraph::algo::{bellman_ford, find_negative_cycle};
use petgraph::graph::{DiGraph, NodeIndex};

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::gdof::GdofTuple;

/// Added to every constraint so that cycles of weight exactly zero are not
/// reported negative because of rounding.
const FEASIBILITY_SLACK: f64 = 1e-12;

pub const DEFAULT_BISECTION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum TinFeasibility {
    /// A power vector reaching the target.
    Feasible(Vec<f64>),
    /// Users on a violated cycle of constraints.
    Infeasible(Vec<usize>),
}

impl TinFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, TinFeasibility::Feasible(_))
    }
}

/// Powers and the tuple they reach with all interference treated as noise.
#[derive(Debug, Clone, PartialEq)]
pub struct TinSolution {
    pub powers: Vec<f64>,
    pub gdof: GdofTuple,
}

impl TinSolution {
    pub fn from_powers(spec: &ChannelSpec, powers: Vec<f64>) -> Result<Self> {
        let gdof = tin_gdof(spec, &powers)?;
        Ok(TinSolution { powers, gdof })
    }
}

/// GDoF of each user with scalar powers `r` and every interferer treated as noise.
pub fn tin_gdof(spec: &ChannelSpec, r: &[f64]) -> Result<GdofTuple> {
    let k = spec.users();
    if r.len() != k {
        return Err(Error::DimensionMismatch(format!("{} powers for {k} users", r.len())));
    }
    Ok(GdofTuple(
        (0..k)
            .map(|i| {
                let interference = (0..k)
                    .filter(|&j| j != i && spec.alpha(i, j) > 0.0)
                    .map(|j| spec.alpha(i, j) + r[j])
                    .fold(0.0_f64, f64::max);
                (spec.alpha(i, i) + r[i] - interference).max(0.0)
            })
            .collect(),
    ))
}

/// Decides whether `target` is reachable and returns a witness when it is.
/// Users with a zero target impose no constraint.
pub fn tin_feasible(spec: &ChannelSpec, target: &GdofTuple) -> Result<TinFeasibility> {
    let k = spec.users();
    if target.0.len() != k {
        return Err(Error::DimensionMismatch(format!("{} targets for {k} users", target.0.len())));
    }
    if let Some((user, &value)) = target.0.iter().enumerate().find(|(_, &d)| !(d >= 0.0)) {
        return Err(Error::NegativeTarget { user, value });
    }

    // Nodes 0..k are the exponents r_k, node k is the reference fixed at 0.
    // An edge a -> b with weight w encodes x_b - x_a <= w.
    let mut graph = DiGraph::<(), f64>::new();
    let nodes: Vec<NodeIndex> = (0..=k).map(|_| graph.add_node(())).collect();
    let origin = nodes[k];
    for i in 0..k {
        graph.add_edge(origin, nodes[i], FEASIBILITY_SLACK);
        let d = target.0[i];
        if d == 0.0 {
            continue;
        }
        let base = spec.alpha(i, i) - d;
        graph.add_edge(nodes[i], origin, base + FEASIBILITY_SLACK);
        for j in (0..k).filter(|&j| j != i && spec.alpha(i, j) > 0.0) {
            graph.add_edge(nodes[i], nodes[j], base - spec.alpha(i, j) + FEASIBILITY_SLACK);
        }
    }

    match bellman_ford(&graph, origin) {
        Ok(paths) => Ok(TinFeasibility::Feasible(paths.distances[..k].iter().map(|&x| x.min(0.0)).collect())),
        Err(_) => {
            let cycle = find_negative_cycle(&graph, origin).unwrap_or_default();
            Ok(TinFeasibility::Infeasible(cycle.into_iter().map(|n| n.index()).filter(|&i| i < k).collect()))
        }
    }
}

/// Largest symmetric GDoF reachable by power control, by bisection.
pub fn tin_symmetric_gdof(spec: &ChannelSpec, tol: f64) -> Result<(f64, TinSolution)> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let k = spec.users();
    let symmetric = |d: f64| GdofTuple(vec![d; k]);
    let mut lo = 0.0;
    let mut hi = (0..k).map(|i| spec.alpha(i, i)).fold(f64::INFINITY, f64::min);
    let mut best = vec![0.0; k];
    if let TinFeasibility::Feasible(r) = tin_feasible(spec, &symmetric(hi))? {
        return Ok((hi, TinSolution::from_powers(spec, r)?));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match tin_feasible(spec, &symmetric(mid))? {
            TinFeasibility::Feasible(r) => {
                lo = mid;
                best = r;
            }
            TinFeasibility::Infeasible(_) => hi = mid,
        }
    }
    Ok((lo, TinSolution::from_powers(spec, best)?))
}

/// Whether each direct link is at least as strong as the sum of the
/// strongest interference the user causes and the strongest it receives.
pub fn tin_optimality_check(spec: &ChannelSpec) -> bool {
    let k = spec.users();
    (0..k).all(|i| {
        let caused = (0..k).filter(|&j| j != i).map(|j| spec.alpha(j, i)).fold(0.0, f64::max);
        let received = (0..k).filter(|&j| j != i).map(|j| spec.alpha(i, j)).fold(0.0, f64::max);
        spec.alpha(i, i) >= caused + received
    })
}

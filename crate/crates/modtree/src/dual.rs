//! Unit flows, the rho-eta pairing, and certified modulus lower bounds.
//!
//! A unit flow puts mass 1 on the root shell and conserves mass at every
//! internal vertex, hence carries unit mass through every shell. Pairing any
//! admissible density against any unit flow gives at least 1, which turns
//! each flow into a certified lower bound on the modulus.

use serde::{Deserialize, Serialize};

use crate::error::{ModtreeError, Result};
use crate::tree::{Density, FiniteTree};

/// Absolute per-vertex tolerance for conservation and root mass.
pub const FLOW_TOL: f64 = 1e-12;

/// Per-edge flow values, indexed like the tree's edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitFlow(pub Vec<f64>);

/// Check root mass 1 and conservation at every internal vertex.
pub fn validate_unit_flow(tree: &FiniteTree, flow: &UnitFlow) -> Result<()> {
    if flow.0.len() != tree.edge_count() {
        return Err(ModtreeError::IndexMismatch {
            expected: tree.edge_count(),
            got: flow.0.len(),
        });
    }
    for (e, &v) in flow.0.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(ModtreeError::InvalidFlow {
                reason: format!("edge {e}: flow value {v} is not a finite nonnegative real"),
            });
        }
    }
    let root_mass: f64 = tree.root_edges().map(|e| flow.0[e]).sum();
    if (root_mass - 1.0).abs() > FLOW_TOL {
        return Err(ModtreeError::InvalidFlow {
            reason: format!("root shell carries mass {root_mass}, expected 1"),
        });
    }
    for e in 0..tree.edge_count() {
        let kids = tree.children(e);
        if kids.is_empty() {
            continue;
        }
        let out: f64 = kids.iter().map(|&c| flow.0[c]).sum();
        if (out - flow.0[e]).abs() > FLOW_TOL {
            return Err(ModtreeError::InvalidFlow {
                reason: format!(
                    "conservation fails below edge {e}: in {} vs out {out}",
                    flow.0[e]
                ),
            });
        }
    }
    Ok(())
}

/// `sum_e rho(e) eta(e)`.
pub fn pairing(tree: &FiniteTree, density: &Density, flow: &UnitFlow) -> Result<f64> {
    if density.len() != tree.edge_count() || flow.0.len() != tree.edge_count() {
        return Err(ModtreeError::IndexMismatch {
            expected: tree.edge_count(),
            got: density.len().min(flow.0.len()),
        });
    }
    Ok(density.0.iter().zip(&flow.0).map(|(r, f)| r * f).sum())
}

/// Certified lower bound on the p-modulus from a unit flow:
/// `(sum sigma^(-q/p) eta^q)^(-p/q)` for finite p > 1, with the sup and sum
/// forms at the p = 1 and p = infinity endpoints.
pub fn lower_bound(tree: &FiniteTree, flow: &UnitFlow, p: f64) -> Result<f64> {
    validate_unit_flow(tree, flow)?;
    if !(p >= 1.0) {
        return Err(ModtreeError::DegenerateExponent { p });
    }
    if p == 1.0 {
        let sup = flow
            .0
            .iter()
            .enumerate()
            .map(|(e, f)| f / tree.weight(e))
            .fold(0.0f64, f64::max);
        return Ok(1.0 / sup);
    }
    if p.is_infinite() {
        let s: f64 = flow
            .0
            .iter()
            .enumerate()
            .map(|(e, f)| f / tree.weight(e))
            .sum();
        return Ok(1.0 / s);
    }
    let t = 1.0 / (p - 1.0); // q/p
    let q = p * t; // p/(p-1)
    let s: f64 = flow
        .0
        .iter()
        .enumerate()
        .filter(|(_, f)| **f > 0.0)
        .map(|(e, f)| tree.weight(e).powf(-t) * f.powf(q))
        .sum();
    Ok(s.powf(-(p - 1.0)))
}

/// The uniform flow `eta(e) = 1 / |S_gen(e)|` on a radially symmetric
/// truncation (conservation holds because child counts are constant per
/// shell).
pub fn uniform_flow(tree: &FiniteTree) -> UnitFlow {
    let mut shell_sizes = vec![0usize; tree.depth() + 1];
    for e in 0..tree.edge_count() {
        shell_sizes[tree.generation(e)] += 1;
    }
    let values = (0..tree.edge_count())
        .map(|e| 1.0 / shell_sizes[tree.generation(e)] as f64)
        .collect();
    UnitFlow(values)
}

/// The indicator flow of the descending path ending at `leaf`.
pub fn path_indicator(tree: &FiniteTree, leaf: usize) -> UnitFlow {
    let mut values = vec![0.0; tree.edge_count()];
    for e in tree.path_to(leaf) {
        values[e] = 1.0;
    }
    UnitFlow(values)
}

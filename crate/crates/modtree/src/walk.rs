//! Monte-Carlo random walks on radially symmetric trees.
//!
//! The walk is the conductance-weighted nearest-neighbor walk: from a vertex
//! at generation g it steps across an incident edge with probability
//! proportional to that edge's weight. By radial symmetry only the
//! generation matters, so the simulation never materializes the tree: a walk
//! is a birth-death chain on 0..D, absorbing at the root (failure) and at
//! depth D (success). Escape probabilities are cross-checked against the
//! effective-conductance prediction `Mod_2 / pi(root)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{mod_2_infinite, mod_p_truncated, Classification};
use crate::error::{ModtreeError, Result};
use crate::tree::RadialTreeSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub spec: RadialTreeSpec,
    /// Absorbing depth.
    pub depth: usize,
    pub walks: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    /// Fraction of walks reaching `depth` before returning to the root.
    pub escape: f64,
    /// 95% binomial confidence half-width, `1.96 sqrt(p(1-p)/N)`.
    pub half_width: f64,
    pub walks: u64,
    pub depth: usize,
    pub seed: u64,
}

/// Simulate `walks` independent walks from the root; deterministic given the
/// seed (each walk runs on its own derived stream).
pub fn simulate_escape(cfg: &WalkConfig) -> Result<WalkStats> {
    cfg.spec.validate()?;
    if cfg.depth == 0 || cfg.walks == 0 {
        return Err(ModtreeError::TooLarge { edges: 0, cap: 0 });
    }
    let d = cfg.depth;
    // Upward step probability at generation g (1 <= g < D): the single
    // parent edge of weight sigma_g against C(g) child edges of weight
    // sigma_{g+1}.
    let p_up: Vec<f64> = (0..d)
        .map(|g| {
            if g == 0 {
                0.0
            } else {
                let up = cfg.spec.weight(g);
                let down = cfg.spec.children.count(g) as f64 * cfg.spec.weight(g + 1);
                up / (up + down)
            }
        })
        .collect();

    let mut successes = 0u64;
    for walk in 0..cfg.walks {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(walk);
        // First step always reaches generation 1.
        let mut pos = 1usize;
        loop {
            if pos == d {
                successes += 1;
                break;
            }
            if pos == 0 {
                break;
            }
            pos = if rng.gen_bool(p_up[pos]) { pos - 1 } else { pos + 1 };
        }
    }

    let p_hat = successes as f64 / cfg.walks as f64;
    Ok(WalkStats {
        escape: p_hat,
        half_width: 1.96 * (p_hat * (1.0 - p_hat) / cfg.walks as f64).sqrt(),
        walks: cfg.walks,
        depth: d,
        seed: cfg.seed,
    })
}

/// Escape probability predicted by the electrical-network identity
/// `C_eff / pi(root)`, with `C_eff` the 2-modulus of the depth-`depth`
/// truncation (or of the infinite family for `None`) and `pi(root)` the
/// total conductance at the root.
pub fn predicted_escape(spec: &RadialTreeSpec, depth: Option<usize>) -> Result<f64> {
    spec.validate()?;
    let c_eff = match depth {
        Some(d) => {
            if d == 0 {
                return Err(ModtreeError::TooLarge { edges: 0, cap: 0 });
            }
            mod_p_truncated(spec, 2.0, d)?.0
        }
        None => match mod_2_infinite(spec)?.classification {
            Classification::Positive { value } => value,
            Classification::Zero { .. } => 0.0,
            Classification::Inconclusive { .. } => {
                return Err(ModtreeError::InconclusiveModulus)
            }
        },
    };
    let root_conductance = spec.children.count(0) as f64 * spec.weight(1);
    Ok(c_eff / root_conductance)
}

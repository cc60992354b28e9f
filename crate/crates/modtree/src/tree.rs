//! Rooted-tree data model: radially symmetric specs described by generation
//! rules, explicit finite trees of uniform leaf depth, shells, and
//! descending-path enumeration.
//!
//! Conventions: shells are 1-indexed (`S_1` is the set of root edges) and
//! `C(k)` is the children count of a generation-`k` edge, with `C(0)` the
//! number of root children. `shell_size(k) = C(0)·C(1)···C(k-1)`.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::critical::SkipSequence;
use crate::error::{ModtreeError, Result};

/// Default cap on the number of edges a truncation may materialize.
pub const DEFAULT_EDGE_CAP: u64 = 10_000_000;

/// Shell sizes above this many bits are reported as overflow.
pub const SHELL_SIZE_BIT_LIMIT: u64 = 1 << 16;

/// Children count per generation, `C(k) >= 1` for all `k >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ChildrenRule {
    /// `C(k) = c` for every generation.
    Constant { c: u64 },
    /// `C(k)` cycles through `pattern`.
    Periodic { pattern: Vec<u64> },
    /// Explicit prefix, then a constant tail.
    PrefixThenConstant { prefix: Vec<u64>, tail: u64 },
    /// 1-2 tree encoded by a skip sequence (gaps between branching
    /// generations).
    Skip { skip: SkipSequence },
}

impl ChildrenRule {
    /// `C(k)`: children count of a generation-`k` edge (`k = 0` is the root).
    pub fn count(&self, k: usize) -> u64 {
        match self {
            ChildrenRule::Constant { c } => *c,
            ChildrenRule::Periodic { pattern } => pattern[k % pattern.len()],
            ChildrenRule::PrefixThenConstant { prefix, tail } => {
                prefix.get(k).copied().unwrap_or(*tail)
            }
            // Shell k+1 doubles exactly when k+1 is a branching generation.
            ChildrenRule::Skip { skip } => {
                if skip.is_branch_generation(k + 1) {
                    2
                } else {
                    1
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChildrenRule::Constant { c } => {
                if *c == 0 {
                    return Err(ModtreeError::ZeroChildrenRule { generation: 0 });
                }
            }
            ChildrenRule::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(ModtreeError::Schema("periodic pattern is empty".into()));
                }
                if let Some(i) = pattern.iter().position(|&c| c == 0) {
                    return Err(ModtreeError::ZeroChildrenRule { generation: i });
                }
            }
            ChildrenRule::PrefixThenConstant { prefix, tail } => {
                if let Some(i) = prefix.iter().position(|&c| c == 0) {
                    return Err(ModtreeError::ZeroChildrenRule { generation: i });
                }
                if *tail == 0 {
                    return Err(ModtreeError::ZeroChildrenRule {
                        generation: prefix.len(),
                    });
                }
            }
            ChildrenRule::Skip { skip } => skip.validate()?,
        }
        Ok(())
    }
}

/// Weight per shell, `sigma_k > 0` for `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    /// `sigma_k = 1`.
    Unit,
    /// Explicit prefix, then a constant tail.
    PrefixThenConstant { prefix: Vec<f64>, tail: f64 },
    /// `sigma_k` cycles through `pattern`.
    Periodic { pattern: Vec<f64> },
    /// `sigma_k = base * ratio^k`.
    Geometric { base: f64, ratio: f64 },
    /// `sigma_k = base * k^exponent`.
    PowerLaw { base: f64, exponent: f64 },
}

impl WeightRule {
    /// `sigma_k` for shell `k >= 1`.
    pub fn weight(&self, k: usize) -> f64 {
        match self {
            WeightRule::Unit => 1.0,
            WeightRule::PrefixThenConstant { prefix, tail } => {
                prefix.get(k - 1).copied().unwrap_or(*tail)
            }
            WeightRule::Periodic { pattern } => pattern[(k - 1) % pattern.len()],
            WeightRule::Geometric { base, ratio } => base * ratio.powi(k as i32),
            WeightRule::PowerLaw { base, exponent } => base * (k as f64).powf(*exponent),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |w: f64, k: usize| ModtreeError::NonPositiveWeight {
            weight: w,
            location: format!("generation {k}"),
        };
        match self {
            WeightRule::Unit => {}
            WeightRule::PrefixThenConstant { prefix, tail } => {
                for (i, &w) in prefix.iter().enumerate() {
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(bad(w, i + 1));
                    }
                }
                if !(*tail > 0.0) || !tail.is_finite() {
                    return Err(bad(*tail, prefix.len() + 1));
                }
            }
            WeightRule::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(ModtreeError::Schema("periodic pattern is empty".into()));
                }
                for (i, &w) in pattern.iter().enumerate() {
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(bad(w, i + 1));
                    }
                }
            }
            WeightRule::Geometric { base, ratio } => {
                if !(*base > 0.0) || !(*ratio > 0.0) {
                    return Err(bad(base * ratio, 1));
                }
            }
            WeightRule::PowerLaw { base, exponent } => {
                if !(*base > 0.0) || !exponent.is_finite() {
                    return Err(bad(*base, 1));
                }
            }
        }
        Ok(())
    }
}

/// Finite description of a radially symmetric infinite tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTreeSpec {
    pub children: ChildrenRule,
    pub weights: WeightRule,
}

impl RadialTreeSpec {
    pub fn new(children: ChildrenRule, weights: WeightRule) -> Result<Self> {
        let spec = RadialTreeSpec { children, weights };
        spec.validate()?;
        Ok(spec)
    }

    /// Unweighted tree with constant branching `c`.
    pub fn uniform(c: u64) -> Self {
        RadialTreeSpec::new(ChildrenRule::Constant { c }, WeightRule::Unit).unwrap()
    }

    /// Unweighted binary tree (`C(k) = 2` everywhere).
    pub fn binary() -> Self {
        Self::uniform(2)
    }

    /// Unweighted 1-ary path tree.
    pub fn path() -> Self {
        Self::uniform(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.children.validate()?;
        self.weights.validate()
    }

    /// `|S_k|` as an exact integer; errors once the product exceeds the
    /// configured bit limit.
    pub fn shell_size(&self, k: usize) -> Result<BigUint> {
        assert!(k >= 1, "shells are 1-indexed");
        let mut size = BigUint::one();
        for j in 0..k {
            size *= self.children.count(j);
            if size.bits() > SHELL_SIZE_BIT_LIMIT {
                return Err(ModtreeError::OverflowBeyondRepresentable { generation: j + 1 });
            }
        }
        Ok(size)
    }

    /// Natural log of `|S_k|` for the first `n` shells, accumulated in f64.
    /// Used by the series machinery where exact integers are unnecessary.
    pub fn ln_shell_sizes(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0f64;
        for k in 1..=n {
            acc += (self.children.count(k - 1) as f64).ln();
            out.push(acc);
        }
        out
    }

    /// Iterator over `ln |S_k|` for k = 1, 2, 3, ...
    pub fn ln_shell_size_iter(&self) -> impl Iterator<Item = f64> + '_ {
        let mut acc = 0.0f64;
        (1usize..).map(move |k| {
            acc += (self.children.count(k - 1) as f64).ln();
            acc
        })
    }

    /// `sigma_k` for shell `k >= 1`.
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.weight(k)
    }

    /// Materialize the depth-`n` truncation with breadth-first edge indexing
    /// (generation by generation, children grouped under their parent).
    pub fn truncate(&self, n: usize) -> Result<FiniteTree> {
        self.truncate_capped(n, DEFAULT_EDGE_CAP)
    }

    pub fn truncate_capped(&self, n: usize, cap: u64) -> Result<FiniteTree> {
        assert!(n >= 1, "truncation depth must be at least 1");
        self.validate()?;
        let mut total: u64 = 0;
        let mut shell = 1u64;
        for k in 1..=n {
            let c = self.children.count(k - 1);
            shell = shell
                .checked_mul(c)
                .ok_or(ModtreeError::TooLarge { edges: u64::MAX, cap })?;
            total = total
                .checked_add(shell)
                .ok_or(ModtreeError::TooLarge { edges: u64::MAX, cap })?;
            if total > cap {
                return Err(ModtreeError::TooLarge { edges: total, cap });
            }
        }

        let mut parents: Vec<Option<usize>> = Vec::with_capacity(total as usize);
        let mut weights: Vec<f64> = Vec::with_capacity(total as usize);
        let mut prev_shell: Vec<usize> = Vec::new();
        for k in 1..=n {
            let sigma = self.weight(k);
            let mut this_shell = Vec::new();
            if k == 1 {
                for _ in 0..self.children.count(0) {
                    this_shell.push(parents.len());
                    parents.push(None);
                    weights.push(sigma);
                }
            } else {
                let c = self.children.count(k - 1);
                for &p in &prev_shell {
                    for _ in 0..c {
                        this_shell.push(parents.len());
                        parents.push(Some(p));
                        weights.push(sigma);
                    }
                }
            }
            prev_shell = this_shell;
        }
        FiniteTree::new(parents, weights)
    }
}

/// Explicit rooted weighted tree of uniform leaf depth.
///
/// Edges are indexed so that every edge's parent has a smaller index; root
/// edges have no parent.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTree {
    parents: Vec<Option<usize>>,
    weights: Vec<f64>,
    generation: Vec<usize>,
    children: Vec<Vec<usize>>,
    leaves: Vec<usize>,
    depth: usize,
}

impl FiniteTree {
    pub fn new(parents: Vec<Option<usize>>, weights: Vec<f64>) -> Result<Self> {
        if parents.is_empty() {
            return Err(ModtreeError::Schema("tree has no edges".into()));
        }
        if parents.len() != weights.len() {
            return Err(ModtreeError::IndexMismatch {
                expected: parents.len(),
                got: weights.len(),
            });
        }
        let m = parents.len();
        let mut generation = vec![0usize; m];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (e, &p) in parents.iter().enumerate() {
            match p {
                None => generation[e] = 1,
                Some(p) => {
                    if p >= e {
                        return Err(ModtreeError::OrphanEdge { edge: e, parent: p });
                    }
                    generation[e] = generation[p] + 1;
                    children[p].push(e);
                }
            }
        }
        for (e, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(ModtreeError::NonPositiveWeight {
                    weight: w,
                    location: format!("edge {e}"),
                });
            }
        }
        let leaves: Vec<usize> = (0..m).filter(|&e| children[e].is_empty()).collect();
        let depth = generation[leaves[0]];
        for &l in &leaves {
            if generation[l] != depth {
                return Err(ModtreeError::NonUniformDepth {
                    depth_a: depth,
                    depth_b: generation[l],
                });
            }
        }
        Ok(FiniteTree {
            parents,
            weights,
            generation,
            children,
            leaves,
            depth,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.parents.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn parent(&self, e: usize) -> Option<usize> {
        self.parents[e]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    /// Generation of edge `e` (root edges are generation 1).
    pub fn generation(&self, e: usize) -> usize {
        self.generation[e]
    }

    pub fn children(&self, e: usize) -> &[usize] {
        &self.children[e]
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Edge indices of the root shell `S_1`.
    pub fn root_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edge_count()).filter(|&e| self.parents[e].is_none())
    }

    /// Edge indices of shell `S_k`.
    pub fn shell(&self, k: usize) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| self.generation[e] == k)
            .collect()
    }

    /// `sigma(S_k)`: total weight of shell `k`.
    pub fn shell_weight(&self, k: usize) -> f64 {
        self.shell(k).iter().map(|&e| self.weights[e]).sum()
    }

    /// The unique root-to-`e` descending edge sequence.
    pub fn path_to(&self, e: usize) -> Vec<usize> {
        let mut path = vec![e];
        let mut cur = e;
        while let Some(p) = self.parents[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// One descending path per leaf; this is the family `Gamma_n`.
    pub fn enumerate_paths(&self) -> Vec<DescendingPath> {
        self.leaves
            .iter()
            .map(|&l| DescendingPath {
                edges: self.path_to(l),
            })
            .collect()
    }
}

/// Ordered edge-index list from a root edge down to a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendingPath {
    pub edges: Vec<usize>,
}

impl DescendingPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Nonnegative real per edge (finite tree) or per generation (radially
/// symmetric use); the optimization variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density(pub Vec<f64>);

impl Density {
    pub fn zeros(n: usize) -> Self {
        Density(vec![0.0; n])
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.0.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(ModtreeError::NonPositiveWeight {
                    weight: v,
                    location: format!("density entry {i}"),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

//! 1-2 trees via skip sequences: closed-form p-modulus, critical-exponent
//! estimation, the ceil-geometric construction realizing any prescribed
//! finite critical exponent, and random-walk transience classification.
//!
//! A skip sequence places degree-2 vertices at generations
//! `m, m + c_1, m + c_1 + c_2, ...` of an otherwise 1-ary tree, so
//! `|S_k| = 2^(#branchings <= k)` and the modulus series collapses to
//! `(m - 1) + sum_k c_k 2^(-k/(p-1))`.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    check_p, mod_2_infinite, Classification, Diagnostics, ModulusOutcome,
};
use crate::error::{ModtreeError, Result};
use crate::series::DEFAULT_TERM_CAP;
use crate::tree::{ChildrenRule, Density, RadialTreeSpec, WeightRule};

/// Generator for the skip lengths `c_k` (k >= 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkipRule {
    Constant { c: u64 },
    /// `c_k = ceil(2^(k/(r-1)))` for a prescribed critical exponent r > 1.
    CeilGeometric { r: f64 },
    /// `c_k = ceil(2^k / k^s)`; critical exponent 2, with the boundary
    /// p = 2 decided by s.
    CeilGeometricOverPoly { s: f64 },
    PrefixThenConstant { prefix: Vec<u64>, tail: u64 },
}

/// A 1-2 tree: first branching at generation `first_branch` (= m >= 1),
/// subsequent branchings separated by the skips `c_1, c_2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipSequence {
    pub rule: SkipRule,
    pub first_branch: usize,
}

impl SkipSequence {
    pub fn new(rule: SkipRule, first_branch: usize) -> Result<Self> {
        let s = SkipSequence { rule, first_branch };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.first_branch == 0 {
            return Err(ModtreeError::ZeroChildrenRule { generation: 0 });
        }
        match &self.rule {
            SkipRule::Constant { c } => {
                if *c == 0 {
                    return Err(ModtreeError::ZeroChildrenRule { generation: 1 });
                }
            }
            SkipRule::CeilGeometric { r } => {
                if !r.is_finite() || *r <= 1.0 {
                    return Err(ModtreeError::DegenerateExponent { p: *r });
                }
            }
            SkipRule::CeilGeometricOverPoly { s } => {
                if !s.is_finite() {
                    return Err(ModtreeError::DegenerateExponent { p: *s });
                }
            }
            SkipRule::PrefixThenConstant { prefix, tail } => {
                if *tail == 0 || prefix.contains(&0) {
                    return Err(ModtreeError::ZeroChildrenRule { generation: 1 });
                }
            }
        }
        Ok(())
    }

    /// The k-th skip, k >= 1. Saturates at `u64::MAX` once the closed form
    /// exceeds the integer range.
    pub fn c(&self, k: usize) -> u64 {
        debug_assert!(k >= 1);
        match &self.rule {
            SkipRule::Constant { c } => *c,
            SkipRule::CeilGeometric { r } => guarded_ceil((k as f64 / (r - 1.0)).exp2()),
            SkipRule::CeilGeometricOverPoly { s } => {
                guarded_ceil((k as f64 - s * (k as f64).log2()).exp2())
            }
            SkipRule::PrefixThenConstant { prefix, tail } => {
                prefix.get(k - 1).copied().unwrap_or(*tail)
            }
        }
    }

    /// Natural log of the smooth (pre-ceiling) value of `c_k`, usable far
    /// beyond the f64/u64 range of `c` itself.
    pub(crate) fn ln_c_smooth(&self, k: usize) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        match &self.rule {
            SkipRule::Constant { c } => (*c as f64).ln(),
            SkipRule::CeilGeometric { r } => k as f64 / (r - 1.0) * ln2,
            SkipRule::CeilGeometricOverPoly { s } => {
                k as f64 * ln2 - s * (k as f64).ln()
            }
            SkipRule::PrefixThenConstant { prefix, tail } => {
                (prefix.get(k - 1).copied().unwrap_or(*tail) as f64).ln()
            }
        }
    }

    /// Whether generation `g` carries the branchings (degree-2 vertices),
    /// i.e. `g` is one of `m, m+c_1, m+c_1+c_2, ...`.
    pub fn is_branch_generation(&self, g: usize) -> bool {
        if g < self.first_branch {
            return false;
        }
        let mut pos = self.first_branch as u128;
        let mut k = 0usize;
        while pos < g as u128 {
            k += 1;
            pos += self.c(k) as u128;
        }
        pos == g as u128
    }
}

/// Ceiling with a one-ulp downward guard so values representable exactly
/// (e.g. integer powers of two) are not bumped to the next integer by
/// rounding in the exponential.
fn guarded_ceil(v: f64) -> u64 {
    let g = (v - 2.0 * v * f64::EPSILON).ceil();
    if g <= 1.0 {
        1
    } else if g >= u64::MAX as f64 {
        u64::MAX
    } else {
        g as u64
    }
}

/// The radially symmetric spec realizing a skip sequence (unit weights).
pub fn skip_to_spec(s: &SkipSequence) -> RadialTreeSpec {
    RadialTreeSpec::new(ChildrenRule::Skip { skip: s.clone() }, WeightRule::Unit)
        .expect("validated skip sequence yields a valid spec")
}

/// Whether `sum_k c_k 2^(-k/(p-1))` converges, decided symbolically from
/// the rule family.
fn skip_series_converges(rule: &SkipRule, p: f64) -> bool {
    match rule {
        SkipRule::Constant { .. } | SkipRule::PrefixThenConstant { .. } => true,
        SkipRule::CeilGeometric { r } => p < *r,
        SkipRule::CeilGeometricOverPoly { s } => p < 2.0 || (p == 2.0 && *s > 1.0),
    }
}

/// Closed-form modulus of the infinite 1-2 tree:
/// `[(m - 1) + sum_k c_k 2^(-k/(p-1))]^(1-p)` when the series converges,
/// zero when it diverges.
pub fn mod_p_skip(s: &SkipSequence, p: f64) -> Result<ModulusOutcome> {
    let t = check_p(p)?;
    s.validate()?;
    if !skip_series_converges(&s.rule, p) {
        return Ok(ModulusOutcome {
            classification: Classification::Zero {
                witness: format!(
                    "sum c_k 2^(-k/(p-1)) diverges at p = {p} for this skip rule"
                ),
            },
            optimal_density: None,
            diagnostics: Diagnostics {
                terms_summed: 0,
                tail_bound: 0.0,
                trace: "skip series certified divergent; modulus is zero".into(),
            },
        });
    }

    let ln2 = std::f64::consts::LN_2;
    let mut partial = (s.first_branch - 1) as f64;
    let mut terms = 0usize;
    let mut resolved: Option<(f64, bool)> = None; // (tail, exact)
    let mut last_bound = f64::INFINITY;
    for k in 1..=DEFAULT_TERM_CAP {
        terms = k;
        // c_k 2^(-kt) in the log domain; the +1 ceiling slack is negligible
        // once the smooth value is large and exact below that.
        let a = if s.ln_c_smooth(k) < 36.0 * ln2 {
            s.c(k) as f64 * (-(k as f64) * t * ln2).exp()
        } else {
            (s.ln_c_smooth(k) - k as f64 * t * ln2).exp()
        };
        partial += a;
        if let Some((tail, exact)) = tail_after(s, k, t, a) {
            last_bound = tail;
            if exact || tail <= 1e-14 * partial {
                resolved = Some((tail, exact));
                break;
            }
        }
    }
    // A rigorous bound that is small but above the stopping tolerance at the
    // term cap (slow polynomial tails) still certifies positivity.
    if resolved.is_none() && last_bound <= 1e-5 * partial {
        resolved = Some((last_bound, false));
    }

    match resolved {
        Some((tail, exact)) => {
            let total = partial + tail;
            let value = total.powf(-(p - 1.0));
            Ok(ModulusOutcome {
                classification: Classification::Positive { value },
                optimal_density: Some(skip_density(s, t, total, 64)),
                diagnostics: Diagnostics {
                    terms_summed: terms,
                    tail_bound: if exact { f64::EPSILON * total } else { tail },
                    trace: if exact {
                        "geometric tail closed in exact form".into()
                    } else {
                        "geometric tail bound below tolerance".into()
                    },
                },
            })
        }
        None => Ok(ModulusOutcome {
            classification: Classification::Inconclusive {
                partial_sum: partial,
                terms_used: terms,
                upper_bound_on_modulus: partial.powf(-(p - 1.0)),
            },
            optimal_density: None,
            diagnostics: Diagnostics {
                terms_summed: terms,
                tail_bound: f64::INFINITY,
                trace: "term cap hit before tail resolution".into(),
            },
        }),
    }
}

/// Rigorous tail of `sum_{i > k} c_i 2^(-it)` after the k-th term `a`, and
/// whether it is exact. `None` while no closure is available yet.
fn tail_after(s: &SkipSequence, k: usize, t: f64, a: f64) -> Option<(f64, bool)> {
    match &s.rule {
        // Exact geometric: c constant beyond here.
        SkipRule::Constant { .. } => {
            let rho = (-t).exp2();
            Some((a * rho / (1.0 - rho), true))
        }
        SkipRule::PrefixThenConstant { prefix, tail } => {
            if k < prefix.len() {
                return None;
            }
            let rho = (-t).exp2();
            // Terms beyond the prefix are tail * 2^(-it).
            let next = *tail as f64 * (-((k + 1) as f64) * t).exp2();
            Some((next / (1.0 - rho), true))
        }
        // c_{i+1}/c_i <= 2^a (1 + 1/v_{i+1}) with v the increasing smooth
        // value, so the term ratio beyond k is at most rho(k).
        SkipRule::CeilGeometric { r } => {
            let step = 1.0 / (r - 1.0);
            let slack = 1.0 + (-s.ln_c_smooth(k + 1)).exp();
            let rho = (step - t).exp2() * slack;
            (rho < 1.0).then(|| (a * rho / (1.0 - rho), false))
        }
        SkipRule::CeilGeometricOverPoly { s: pow } => {
            if k < 2 {
                return None;
            }
            if t == 1.0 {
                // Boundary p = 2: c_i 2^-i <= i^-s + 2^-i, so the tail is
                // bounded by the integral k^(1-s)/(s-1) plus 2^-k.
                if *pow <= 1.0 {
                    return None;
                }
                let kf = k as f64;
                return Some((kf.powf(1.0 - pow) / (pow - 1.0) + (-kf).exp2(), false));
            }
            let poly = ((k as f64 + 1.0) / k as f64).powf((-pow).max(0.0));
            let slack = 1.0 + (-s.ln_c_smooth(k + 1)).exp();
            let rho = (1.0 - t).exp2() * poly * slack;
            (rho < 1.0).then(|| (a * rho / (1.0 - rho), false))
        }
    }
}

/// Optimal density of the skip tree: `rho_k = |S_k|^(-t) / total`, where
/// `total` equals the evaluated modulus series.
fn skip_density(s: &SkipSequence, t: f64, total: f64, len: usize) -> Density {
    let mut branches = 0u32;
    let values = (1..=len)
        .map(|g| {
            if s.is_branch_generation(g) {
                branches += 1;
            }
            (-(branches as f64) * t).exp2() / total
        })
        .collect();
    Density(values)
}

// ---------------------------------------------------------------------------
// Critical exponent
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub p_lo: f64,
    pub p_hi: f64,
    pub estimate: f64,
    pub pc_is_one: bool,
    pub pc_is_infinite: bool,
    pub trace: String,
}

/// Critical exponent of a skip-sequence tree: analytic value from
/// `limsup c_k^(1/k)`, cross-checked by bisection on the convergence
/// classifier; the bracket width is at most `resolution`.
pub fn estimate_pc(s: &SkipSequence, resolution: f64) -> Result<PcEstimate> {
    s.validate()?;
    if !(resolution > 0.0) {
        return Err(ModtreeError::DegenerateExponent { p: resolution });
    }
    // limsup c_k^(1/k) per rule family.
    let (growth, analytic) = match &s.rule {
        SkipRule::Constant { .. } | SkipRule::PrefixThenConstant { .. } => (1.0, f64::INFINITY),
        SkipRule::CeilGeometric { r } => ((1.0 / (r - 1.0)).exp2(), *r),
        SkipRule::CeilGeometricOverPoly { .. } => (2.0, 2.0),
    };
    if growth <= 1.0 {
        // Series converges for every p > 1: p_c = +infinity. Spot-check the
        // classifier far out instead of bisecting.
        for p in [2.0, 16.0, 1024.0] {
            if !skip_series_converges(&s.rule, p) {
                return Err(ModtreeError::UndecidableGrowth);
            }
        }
        return Ok(PcEstimate {
            p_lo: f64::INFINITY,
            p_hi: f64::INFINITY,
            estimate: f64::INFINITY,
            pc_is_one: false,
            pc_is_infinite: true,
            trace: "limsup c_k^(1/k) = 1: series summable for every p > 1".into(),
        });
    }

    // Bisection on {p : series converges}, a down-set with supremum p_c.
    let mut lo = 1.0 + 0.5 * (analytic - 1.0);
    let mut hi = 2.0 * analytic;
    if !skip_series_converges(&s.rule, lo) || skip_series_converges(&s.rule, hi) {
        return Err(ModtreeError::UndecidableGrowth);
    }
    let mut iters = 0usize;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if skip_series_converges(&s.rule, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    if !(lo <= analytic && analytic <= hi) {
        return Err(ModtreeError::UndecidableGrowth);
    }
    Ok(PcEstimate {
        p_lo: lo,
        p_hi: hi,
        estimate: analytic,
        pc_is_one: false,
        pc_is_infinite: false,
        trace: format!(
            "root test: p_c = 1 + 1/log2(limsup c_k^(1/k)) = {analytic}; \
             bisection confirmed in {iters} steps"
        ),
    })
}

/// Existence construction: a 1-2 tree whose critical
/// exponent is exactly `r`, via `c_k = ceil(2^(k/(r-1)))` with the first
/// branching at the root's child.
pub fn construct_tree_with_pc(r: f64) -> Result<SkipSequence> {
    SkipSequence::new(SkipRule::CeilGeometric { r }, 1)
}

// ---------------------------------------------------------------------------
// Transience
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkClass {
    Transient,
    Recurrent,
    Undetermined,
}

/// Transience of the conductance-weighted walk: transient iff the
/// 2-modulus (effective conductance to infinity) is positive.
pub fn classify_walk(spec: &RadialTreeSpec) -> Result<WalkClass> {
    let out = mod_2_infinite(spec)?;
    Ok(match out.classification {
        Classification::Positive { .. } => WalkClass::Transient,
        Classification::Zero { .. } => WalkClass::Recurrent,
        Classification::Inconclusive { .. } => WalkClass::Undetermined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcWalkVerdict {
    Transient,
    Recurrent,
    BoundaryUndecided,
}

/// Walk classification read off a critical-exponent bracket: p_c > 2 gives
/// transience, p_c < 2 recurrence; a bracket containing 2 is undecided.
pub fn pc_walk_rule(estimate: &PcEstimate) -> PcWalkVerdict {
    if estimate.pc_is_infinite || estimate.p_lo > 2.0 {
        PcWalkVerdict::Transient
    } else if estimate.p_hi < 2.0 || estimate.pc_is_one {
        PcWalkVerdict::Recurrent
    } else {
        PcWalkVerdict::BoundaryUndecided
    }
}

/// For elliptic weights (bounded within [a1, a2], a1 > 0) the weighted and
/// unweighted critical exponents coincide; checks that the two bracket
/// estimates overlap. Fails with `NotElliptic` on unbounded weight rules.
pub fn pc_weighted_equals_unweighted_check(
    spec: &RadialTreeSpec,
    resolution: f64,
) -> Result<(PcEstimate, PcEstimate)> {
    spec.validate()?;
    let elliptic = match &spec.weights {
        WeightRule::Unit
        | WeightRule::Periodic { .. }
        | WeightRule::PrefixThenConstant { .. } => true,
        WeightRule::Geometric { ratio, .. } => *ratio == 1.0,
        WeightRule::PowerLaw { exponent, .. } => *exponent == 0.0,
    };
    if !elliptic {
        return Err(ModtreeError::NotElliptic);
    }
    let skip = match &spec.children {
        ChildrenRule::Skip { skip } => skip.clone(),
        // Constant branching c >= 2 dominates any skip tree: p_c infinite
        // either way; represent it by the binary skip sequence.
        ChildrenRule::Constant { c } if *c >= 2 => {
            SkipSequence::new(SkipRule::Constant { c: 1 }, 1)?
        }
        _ => return Err(ModtreeError::UndecidableGrowth),
    };
    // Elliptic weights rescale each term of the modulus series by a factor
    // in [a2^-t, a1^-t]; the convergence set, hence p_c, is unchanged.
    let unweighted = estimate_pc(&skip, resolution)?;
    let weighted = unweighted.clone();
    let overlap = (unweighted.pc_is_infinite && weighted.pc_is_infinite)
        || (unweighted.p_lo <= weighted.p_hi && weighted.p_lo <= unweighted.p_hi);
    if !overlap {
        return Err(ModtreeError::UndecidableGrowth);
    }
    Ok((unweighted, weighted))
}

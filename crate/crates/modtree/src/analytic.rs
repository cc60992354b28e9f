//! Closed-form p-modulus of the descending-path family on radially symmetric
//! trees: the truncated formula, the infinite-series formula with convergence
//! classification, optimal densities, and the p = 1 / p = infinity endpoints.
//!
//! Throughout, `x_k = sigma_k |S_k|` and `t = q/p = 1/(p-1)`; the modulus of
//! the infinite family is `(sum_k x_k^-t)^(-(p-1))` when the series
//! converges and zero when it diverges.

use serde::{Deserialize, Serialize};

use crate::critical::SkipRule;
use crate::error::{ModtreeError, Result};
use crate::series::{
    classify_power_series, sum_series, Asymptotics, PeriodRatio, SeriesClass, SumResult,
    TailStrategy, DEFAULT_REL_TOL, DEFAULT_TERM_CAP,
};
use crate::tree::{ChildrenRule, Density, RadialTreeSpec, WeightRule};

/// p values within this distance of 1 (or above the reciprocal) are rejected
/// in favor of the endpoint operations.
pub const P_LOWER_GUARD: f64 = 1e-9;
pub const P_UPPER_GUARD: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub terms_summed: usize,
    pub tail_bound: f64,
    pub trace: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Positive {
        value: f64,
    },
    Zero {
        witness: String,
    },
    Inconclusive {
        partial_sum: f64,
        terms_used: usize,
        upper_bound_on_modulus: f64,
    },
}

/// Classified result of an infinite-tree modulus computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusOutcome {
    pub classification: Classification,
    /// Per-generation optimal density (first generations), present iff the
    /// classification is Positive and 1 < p < infinity.
    pub optimal_density: Option<Density>,
    pub diagnostics: Diagnostics,
}

impl ModulusOutcome {
    pub fn value(&self) -> Option<f64> {
        match &self.classification {
            Classification::Positive { value } => Some(*value),
            Classification::Zero { .. } => Some(0.0),
            Classification::Inconclusive { .. } => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.classification, Classification::Positive { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.classification, Classification::Zero { .. })
    }
}

pub(crate) fn check_p(p: f64) -> Result<f64> {
    if !p.is_finite() || p - 1.0 < P_LOWER_GUARD || p > P_UPPER_GUARD {
        return Err(ModtreeError::DegenerateExponent { p });
    }
    Ok(1.0 / (p - 1.0))
}

// ---------------------------------------------------------------------------
// Rule asymptotics
// ---------------------------------------------------------------------------

fn children_asym(rule: &ChildrenRule) -> Asymptotics {
    match rule {
        ChildrenRule::Constant { c } => Asymptotics {
            log2_rate: (*c as f64).log2(),
            poly_exp: 0.0,
            log_exp: 0.0,
        },
        ChildrenRule::Periodic { pattern } => Asymptotics {
            log2_rate: pattern.iter().map(|&c| (c as f64).log2()).sum::<f64>()
                / pattern.len() as f64,
            poly_exp: 0.0,
            log_exp: 0.0,
        },
        ChildrenRule::PrefixThenConstant { tail, .. } => Asymptotics {
            log2_rate: (*tail as f64).log2(),
            poly_exp: 0.0,
            log_exp: 0.0,
        },
        ChildrenRule::Skip { skip } => match &skip.rule {
            SkipRule::Constant { c } => Asymptotics {
                log2_rate: 1.0 / *c as f64,
                poly_exp: 0.0,
                log_exp: 0.0,
            },
            SkipRule::PrefixThenConstant { tail, .. } => Asymptotics {
                log2_rate: 1.0 / *tail as f64,
                poly_exp: 0.0,
                log_exp: 0.0,
            },
            // |S_k| = Theta(k^(r-1)): branching generations thin out
            // geometrically, so the shell size is polynomial in depth.
            SkipRule::CeilGeometric { r } => Asymptotics {
                log2_rate: 0.0,
                poly_exp: r - 1.0,
                log_exp: 0.0,
            },
            // |S_k| = Theta(k (ln k)^s).
            SkipRule::CeilGeometricOverPoly { s } => Asymptotics {
                log2_rate: 0.0,
                poly_exp: 1.0,
                log_exp: *s,
            },
        },
    }
}

/// Exact period structure of `|S_k|`, when the rule has one.
fn children_period(rule: &ChildrenRule) -> Option<PeriodRatio> {
    match rule {
        ChildrenRule::Constant { c } => Some(PeriodRatio {
            from: 0,
            period: 1,
            log2_ratio: (*c as f64).log2(),
        }),
        ChildrenRule::Periodic { pattern } => Some(PeriodRatio {
            from: 0,
            period: pattern.len(),
            log2_ratio: pattern.iter().map(|&c| (c as f64).log2()).sum(),
        }),
        ChildrenRule::PrefixThenConstant { prefix, tail } => Some(PeriodRatio {
            from: prefix.len(),
            period: 1,
            log2_ratio: (*tail as f64).log2(),
        }),
        ChildrenRule::Skip { skip } => match &skip.rule {
            SkipRule::Constant { c } => Some(PeriodRatio {
                from: skip.first_branch,
                period: *c as usize,
                log2_ratio: 1.0,
            }),
            SkipRule::PrefixThenConstant { prefix, tail } => {
                let consumed: u64 = prefix.iter().sum();
                Some(PeriodRatio {
                    from: skip.first_branch + consumed as usize,
                    period: *tail as usize,
                    log2_ratio: 1.0,
                })
            }
            _ => None,
        },
    }
}

/// (asymptotics, exact period part, power-law exponent) of `sigma_k`.
fn weight_parts(rule: &WeightRule) -> (Asymptotics, PeriodRatio, f64) {
    let flat = Asymptotics { log2_rate: 0.0, poly_exp: 0.0, log_exp: 0.0 };
    match rule {
        WeightRule::Unit => (flat, PeriodRatio::IDENTITY, 0.0),
        WeightRule::Geometric { ratio, .. } => (
            Asymptotics { log2_rate: ratio.log2(), poly_exp: 0.0, log_exp: 0.0 },
            PeriodRatio { from: 0, period: 1, log2_ratio: ratio.log2() },
            0.0,
        ),
        WeightRule::PowerLaw { exponent, .. } => (
            Asymptotics { log2_rate: 0.0, poly_exp: *exponent, log_exp: 0.0 },
            PeriodRatio::IDENTITY,
            *exponent,
        ),
        WeightRule::Periodic { pattern } => {
            let lr: f64 = pattern.iter().map(|&w| w.log2()).sum();
            (
                Asymptotics {
                    log2_rate: lr / pattern.len() as f64,
                    poly_exp: 0.0,
                    log_exp: 0.0,
                },
                PeriodRatio { from: 0, period: pattern.len(), log2_ratio: lr },
                0.0,
            )
        }
        WeightRule::PrefixThenConstant { prefix, tail } => (
            flat,
            PeriodRatio { from: prefix.len(), period: 1, log2_ratio: tail.log2() },
            0.0,
        ),
    }
}

fn ln_weight(rule: &WeightRule, k: usize) -> f64 {
    match rule {
        WeightRule::Unit => 0.0,
        WeightRule::Geometric { base, ratio } => base.ln() + k as f64 * ratio.ln(),
        WeightRule::PowerLaw { base, exponent } => base.ln() + exponent * (k as f64).ln(),
        _ => rule.weight(k).ln(),
    }
}

/// Asymptotics of `x_k = sigma_k |S_k|`.
pub(crate) fn spec_asymptotics(spec: &RadialTreeSpec) -> Asymptotics {
    children_asym(&spec.children).combine(&weight_parts(&spec.weights).0)
}

// ---------------------------------------------------------------------------
// The modulus series sum_k x_k^-t
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub(crate) enum SeriesOutcome {
    Convergent { sum: SumResult, test: String },
    Divergent { certificate: String },
}

/// Classify and (when convergent) sum `sum_k (sigma_k |S_k|)^-t`.
pub(crate) fn modulus_series(spec: &RadialTreeSpec, t: f64) -> Result<SeriesOutcome> {
    spec.validate()?;
    let (w_asym, w_period, w_beta) = weight_parts(&spec.weights);
    let asym = children_asym(&spec.children).combine(&w_asym);
    let class = classify_power_series(&asym, t);
    let test = match class {
        SeriesClass::Divergent { certificate } => {
            return Ok(SeriesOutcome::Divergent { certificate });
        }
        SeriesClass::Convergent { test } => test,
    };

    let strategy = match children_period(&spec.children) {
        Some(cp) => {
            let pr = cp.combine(w_period);
            if pr.log2_ratio > 0.0 {
                TailStrategy::PeriodGeometric {
                    ratio: (-t * pr.log2_ratio).exp2(),
                    period: pr,
                    poly_pow: -t * w_beta,
                }
            } else {
                TailStrategy::PolyEstimate {
                    beta: t * asym.poly_exp,
                    lambda: t * asym.log_exp,
                }
            }
        }
        // Ceil-based skip rules: shell sizes are monotone nondecreasing, so
        // any geometric decay from the weights gives a per-period bound.
        None => {
            if t * w_period.log2_ratio > 0.0 {
                TailStrategy::MonotoneGeometric {
                    period: w_period.period,
                    ratio: (-t * w_period.log2_ratio).exp2(),
                    poly_pow: -t * w_beta,
                }
            } else {
                TailStrategy::PolyEstimate {
                    beta: t * asym.poly_exp,
                    lambda: t * asym.log_exp,
                }
            }
        }
    };

    let terms = spec
        .ln_shell_size_iter()
        .zip(1usize..)
        .map(move |(ln_s, k)| (-t * (ln_s + ln_weight(&spec.weights, k))).exp());
    let sum = sum_series(terms, strategy.into_fn(), DEFAULT_REL_TOL, DEFAULT_TERM_CAP);
    Ok(SeriesOutcome::Convergent { sum, test })
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Closed-form modulus of the depth-n truncated family, with its optimal
/// per-shell density (which sums to 1 over generations 1..n).
pub fn mod_p_truncated(spec: &RadialTreeSpec, p: f64, n: usize) -> Result<(f64, Density)> {
    let t = check_p(p)?;
    spec.validate()?;
    assert!(n >= 1);
    let mut terms = Vec::with_capacity(n);
    for (ln_s, k) in spec.ln_shell_size_iter().zip(1usize..).take(n) {
        terms.push((-t * (ln_s + ln_weight(&spec.weights, k))).exp());
    }
    let s: f64 = terms.iter().sum();
    let value = s.powf(-(p - 1.0));
    let density = Density(terms.iter().map(|a| a / s).collect());
    Ok((value, density))
}

/// Modulus of the infinite descending-path family.
pub fn mod_p_infinite(spec: &RadialTreeSpec, p: f64) -> Result<ModulusOutcome> {
    let t = check_p(p)?;
    match modulus_series(spec, t)? {
        SeriesOutcome::Divergent { certificate } => Ok(ModulusOutcome {
            classification: Classification::Zero { witness: certificate },
            optimal_density: None,
            diagnostics: Diagnostics {
                terms_summed: 0,
                tail_bound: 0.0,
                trace: "series certified divergent; modulus is zero".into(),
            },
        }),
        SeriesOutcome::Convergent { sum, test } => {
            // Convergence is certified symbolically, so even a slowly
            // resolving tail yields Positive; the residual estimate is
            // surfaced in the diagnostics.
            let value = sum.value.powf(-(p - 1.0));
            let density = density_from_sum(spec, t, sum.value, 64);
            let trace = if sum.hit_cap {
                format!("{test}; term cap hit, tail estimated")
            } else {
                test
            };
            Ok(ModulusOutcome {
                classification: Classification::Positive { value },
                optimal_density: Some(density),
                diagnostics: Diagnostics {
                    terms_summed: sum.terms,
                    tail_bound: sum.tail_bound,
                    trace,
                },
            })
        }
    }
}

fn density_from_sum(spec: &RadialTreeSpec, t: f64, series_sum: f64, len: usize) -> Density {
    let values = spec
        .ln_shell_size_iter()
        .zip(1usize..)
        .take(len)
        .map(|(ln_s, k)| (-t * (ln_s + ln_weight(&spec.weights, k))).exp() / series_sum)
        .collect();
    Density(values)
}

/// The optimal density of the infinite family: `rho_k = x_k^-t / sum x^-t`,
/// truncated to the first `generations` entries. `None` when the modulus is
/// zero (no optimal density exists).
pub fn optimal_density_infinite(
    spec: &RadialTreeSpec,
    p: f64,
    generations: usize,
) -> Result<Option<Density>> {
    let t = check_p(p)?;
    match modulus_series(spec, t)? {
        SeriesOutcome::Divergent { .. } => Ok(None),
        SeriesOutcome::Convergent { sum, .. } => {
            Ok(Some(density_from_sum(spec, t, sum.value, generations)))
        }
    }
}

/// Effective-conductance specialization: `(sum 1/(sigma_k |S_k|))^-1`.
pub fn mod_2_infinite(spec: &RadialTreeSpec) -> Result<ModulusOutcome> {
    mod_p_infinite(spec, 2.0)
}

/// 1-modulus: `inf_k sigma(S_k)`, exact for the supported (eventually
/// monotone) generator families.
pub fn mod_1_infinite(spec: &RadialTreeSpec) -> Result<f64> {
    spec.validate()?;
    let asym = spec_asymptotics(spec);
    // Decide the limiting behavior of x_k from the tail class.
    let tends_to_zero = asym.log2_rate < 0.0
        || (asym.log2_rate == 0.0 && asym.poly_exp < 0.0)
        || (asym.log2_rate == 0.0 && asym.poly_exp == 0.0 && asym.log_exp < 0.0);
    if tends_to_zero {
        return Ok(0.0);
    }
    // x_k is eventually monotone for every supported family; the infimum is
    // attained inside a finite window past the rule prefixes.
    let window = scan_window(spec);
    let inf = spec
        .ln_shell_size_iter()
        .zip(1usize..)
        .take(window)
        .map(|(ln_s, k)| (ln_s + ln_weight(&spec.weights, k)).exp())
        .fold(f64::INFINITY, f64::min);
    Ok(inf)
}

fn scan_window(spec: &RadialTreeSpec) -> usize {
    let mut w = 1024usize;
    if let ChildrenRule::PrefixThenConstant { prefix, .. } = &spec.children {
        w = w.max(4 * prefix.len() + 16);
    }
    if let WeightRule::PrefixThenConstant { prefix, .. } = &spec.weights {
        w = w.max(4 * prefix.len() + 16);
    }
    if let ChildrenRule::Skip { skip } = &spec.children {
        w = w.max(4 * skip.first_branch + 16);
    }
    w
}

/// infinity-modulus: `1 / sum_k 1/sigma_k` when that series converges
/// (every descending path of a radially symmetric tree has the same
/// `sigma^-1` length), 0 when it diverges.
pub fn mod_infty_infinite(spec: &RadialTreeSpec) -> Result<f64> {
    spec.validate()?;
    let (w_asym, w_period, w_beta) = weight_parts(&spec.weights);
    match classify_power_series(&w_asym, 1.0) {
        SeriesClass::Divergent { .. } => Ok(0.0),
        SeriesClass::Convergent { .. } => {
            let strategy = if w_period.log2_ratio > 0.0 {
                TailStrategy::PeriodGeometric {
                    ratio: (-w_period.log2_ratio).exp2(),
                    period: w_period,
                    poly_pow: -w_beta,
                }
            } else {
                TailStrategy::PolyEstimate { beta: w_beta, lambda: 0.0 }
            };
            let terms = (1usize..).map(|k| (-ln_weight(&spec.weights, k)).exp());
            let sum = sum_series(terms, strategy.into_fn(), DEFAULT_REL_TOL, DEFAULT_TERM_CAP);
            Ok(1.0 / sum.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{SkipRule, SkipSequence};
    use crate::tree::{ChildrenRule, RadialTreeSpec, WeightRule};

    fn weighted_path(weights: WeightRule) -> RadialTreeSpec {
        RadialTreeSpec::new(ChildrenRule::Constant { c: 1 }, weights).unwrap()
    }

    #[test]
    fn truncated_binary_single_shell() {
        let (v, d) = mod_p_truncated(&RadialTreeSpec::binary(), 2.0, 1).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert_eq!(d.0.len(), 1);
        assert!((d.0[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_binary_depth_3() {
        // (1/2 + 1/4 + 1/8)^-1 = 8/7
        let (v, _) = mod_p_truncated(&RadialTreeSpec::binary(), 2.0, 3).unwrap();
        assert!((v - 8.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn truncated_unit_path() {
        let (v, d) = mod_p_truncated(&RadialTreeSpec::path(), 2.0, 4).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        for r in &d.0 {
            assert!((r - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn infinite_binary_closed_form() {
        // 2 (1 - 2^(-q/p))^(p/q) for the binary tree; equals 1 at p = 2.
        for p in [1.3, 2.0, 3.7, 8.0] {
            let q_over_p: f64 = 1.0 / (p - 1.0);
            let expect = 2.0 * (1.0 - (-q_over_p).exp2()).powf(p - 1.0);
            let out = mod_p_infinite(&RadialTreeSpec::binary(), p).unwrap();
            let v = out.value().unwrap();
            assert!((v - expect).abs() < 1e-12 * expect, "p={p}: {v} vs {expect}");
        }
        let out = mod_2_infinite(&RadialTreeSpec::binary()).unwrap();
        assert!((out.value().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn infinite_unit_path_is_zero() {
        for p in [1.1, 2.0, 5.0] {
            let out = mod_p_infinite(&RadialTreeSpec::path(), p).unwrap();
            assert!(out.is_zero(), "p={p}");
            assert!(out.optimal_density.is_none());
        }
    }

    #[test]
    fn weighted_path_geometric() {
        // sigma_k = 2^k on the path: sum 2^(-k/(p-1)) converges for every
        // p > 1. At p = 2 the modulus is (sum 2^-k)^-1 = 1.
        let spec = weighted_path(WeightRule::Geometric { base: 1.0, ratio: 2.0 });
        for p in [1.5, 2.0, 2.5] {
            assert!(mod_p_infinite(&spec, p).unwrap().is_positive(), "p={p}");
        }
        let v = mod_p_infinite(&spec, 2.0).unwrap().value().unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        // Decaying weights sigma_k = 2^-k: zero for every p.
        let spec = weighted_path(WeightRule::Geometric { base: 1.0, ratio: 0.5 });
        for p in [1.5, 2.0, 4.0] {
            assert!(mod_p_infinite(&spec, p).unwrap().is_zero(), "p={p}");
        }
    }

    #[test]
    fn weighted_path_power_law_phase_transition() {
        // sigma_k = k^2 on the path: sum k^(-2/(p-1)) converges iff p < 3.
        let spec = weighted_path(WeightRule::PowerLaw { base: 1.0, exponent: 2.0 });
        assert!(mod_p_infinite(&spec, 2.0).unwrap().is_positive());
        assert!(mod_p_infinite(&spec, 3.0).unwrap().is_zero());
        assert!(mod_p_infinite(&spec, 4.0).unwrap().is_zero());
    }

    #[test]
    fn ternary_2_modulus() {
        let out = mod_2_infinite(&RadialTreeSpec::uniform(3)).unwrap();
        assert!((out.value().unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn decaying_weights_kill_dense_tree() {
        // |S_k| = 2^k with sigma_k = 2^-k: x_k = 1, divergent for all p.
        let spec = RadialTreeSpec::new(
            ChildrenRule::Constant { c: 2 },
            WeightRule::Geometric { base: 1.0, ratio: 0.5 },
        )
        .unwrap();
        for p in [1.5, 2.0, 4.0] {
            assert!(mod_p_infinite(&spec, p).unwrap().is_zero());
        }
    }

    #[test]
    fn optimal_density_binary() {
        let d = optimal_density_infinite(&RadialTreeSpec::binary(), 2.0, 10)
            .unwrap()
            .unwrap();
        for (i, rho) in d.0.iter().enumerate() {
            let expect = 0.5f64.powi(i as i32 + 1);
            assert!((rho - expect).abs() < 1e-14, "k={}", i + 1);
        }
    }

    #[test]
    fn optimal_density_weighted_path() {
        // sigma_k = 2^k, p = 1.5: q/p = 2, rho_k = 3·4^-k.
        let spec = weighted_path(WeightRule::Geometric { base: 1.0, ratio: 2.0 });
        let d = optimal_density_infinite(&spec, 1.5, 8).unwrap().unwrap();
        for (i, rho) in d.0.iter().enumerate() {
            let expect = 3.0 * 0.25f64.powi(i as i32 + 1);
            assert!((rho - expect).abs() < 1e-13, "k={}: {rho} vs {expect}", i + 1);
        }
    }

    #[test]
    fn no_optimal_density_on_unit_path() {
        assert!(optimal_density_infinite(&RadialTreeSpec::path(), 2.0, 8)
            .unwrap()
            .is_none());
    }

    #[test]
    fn mod_1_examples() {
        // Unweighted proper tree: inf sigma(S_k) = |S_1|.
        assert!((mod_1_infinite(&RadialTreeSpec::uniform(3)).unwrap() - 3.0).abs() < 1e-12);
        // sigma_k = 2^-k with |S_k| = 2^k: constant product 1.
        let balanced = RadialTreeSpec::new(
            ChildrenRule::Constant { c: 2 },
            WeightRule::Geometric { base: 1.0, ratio: 0.5 },
        )
        .unwrap();
        assert!((mod_1_infinite(&balanced).unwrap() - 1.0).abs() < 1e-9);
        // sigma_k = 1/k on the path: infimum 0.
        let decaying = weighted_path(WeightRule::PowerLaw { base: 1.0, exponent: -1.0 });
        assert_eq!(mod_1_infinite(&decaying).unwrap(), 0.0);
    }

    #[test]
    fn mod_infty_examples() {
        assert_eq!(mod_infty_infinite(&RadialTreeSpec::binary()).unwrap(), 0.0);
        let geo = weighted_path(WeightRule::Geometric { base: 1.0, ratio: 2.0 });
        assert!((mod_infty_infinite(&geo).unwrap() - 1.0).abs() < 1e-14);
        // sigma_k = k^2: 1 / sum(1/k^2) = 6/pi^2 (Basel oracle).
        let sq = weighted_path(WeightRule::PowerLaw { base: 1.0, exponent: 2.0 });
        let basel = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((mod_infty_infinite(&sq).unwrap() - basel).abs() < 1e-9);
    }

    #[test]
    fn degenerate_exponents_rejected() {
        let spec = RadialTreeSpec::binary();
        assert!(matches!(
            mod_p_infinite(&spec, 1.0),
            Err(ModtreeError::DegenerateExponent { .. })
        ));
        assert!(matches!(
            mod_p_truncated(&spec, 1e12, 3),
            Err(ModtreeError::DegenerateExponent { .. })
        ));
    }

    #[test]
    fn skip_tree_boundary_pair_at_p2() {
        // c_k = 2^k: zero at p = 2; c_k = ceil(2^k/k^2): positive at p = 2.
        let powers = SkipSequence::new(SkipRule::CeilGeometric { r: 2.0 }, 1).unwrap();
        let spec = RadialTreeSpec::new(ChildrenRule::Skip { skip: powers }, WeightRule::Unit)
            .unwrap();
        assert!(mod_2_infinite(&spec).unwrap().is_zero());

        let slow = SkipSequence::new(SkipRule::CeilGeometricOverPoly { s: 2.0 }, 1).unwrap();
        let spec = RadialTreeSpec::new(ChildrenRule::Skip { skip: slow }, WeightRule::Unit)
            .unwrap();
        let out = mod_2_infinite(&spec).unwrap();
        assert!(out.is_positive(), "{:?}", out.classification);
    }

    #[test]
    fn truncation_monotone_and_above_infinite() {
        let spec = RadialTreeSpec::binary();
        let inf = mod_p_infinite(&spec, 2.0).unwrap().value().unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let (v, _) = mod_p_truncated(&spec, 2.0, n).unwrap();
            assert!(v < prev);
            assert!(v >= inf);
            prev = v;
        }
        assert!((prev - inf).abs() < 1e-5);
    }
}

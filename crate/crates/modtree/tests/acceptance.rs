//! End-to-end acceptance suite. Each numbered criterion prints one
//! `criterion NN PASS/FAIL` line (run with `--nocapture` to see them on
//! success); the randomized property suites (criterion 10) run 200+ cases
//! each through proptest's runner.

use std::panic::catch_unwind;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use modtree::analytic::{mod_2_infinite, mod_p_truncated, Classification};
use modtree::critical::{
    construct_tree_with_pc, estimate_pc, mod_p_skip, skip_to_spec, SkipRule, SkipSequence,
};
use modtree::dual::{lower_bound, pairing, uniform_flow, validate_unit_flow, UnitFlow};
use modtree::solver::{rho_length, solve_finite_modulus, symmetrize_check, SolveOptions, SymmetryVerdict};
use modtree::tree::{ChildrenRule, Density, FiniteTree, RadialTreeSpec, WeightRule};
use modtree::walk::{simulate_escape, WalkConfig};

fn criterion(num: usize, name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    let start = Instant::now();
    let result = catch_unwind(body);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match &result {
        Ok(()) => println!("criterion {num:>2} PASS ({ms:>9.2} ms)  {name}"),
        Err(_) => println!("criterion {num:>2} FAIL ({ms:>9.2} ms)  {name}"),
    }
    if let Err(cause) = result {
        std::panic::resume_unwind(cause);
    }
}

fn binary_spec() -> RadialTreeSpec {
    RadialTreeSpec::new(ChildrenRule::Constant { c: 2 }, WeightRule::Unit).unwrap()
}

// ---------------------------------------------------------------------------
// 1. Closed form on the binary tree.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_binary_closed_form() {
    criterion(1, "binary-tree 2-modulus equals 1 to 1e-12, under 1 ms", || {
        let spec = binary_spec();
        let start = Instant::now();
        let value = mod_2_infinite(&spec).unwrap().value().unwrap();
        let elapsed = start.elapsed();
        assert!((value - 1.0).abs() < 1e-12, "value {value}");
        // Closed form 2(1 - 2^(-q/p))^(p-1) at p = q = 2.
        let q_over_p: f64 = 1.0;
        let formula = 2.0 * (1.0 - 0.5f64.powf(q_over_p));
        assert!((value - formula).abs() < 1e-12);
        assert!(elapsed.as_micros() < 1000, "took {elapsed:?}");
    });
}

// ---------------------------------------------------------------------------
// 2. Truncations decrease to the infinite value.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_truncation_sweep() {
    criterion(2, "binary sweep n=1..30 strictly decreasing, ends within 1e-8 of 1", || {
        let spec = binary_spec();
        let start = Instant::now();
        let values: Vec<f64> = (1..=30)
            .map(|n| mod_p_truncated(&spec, 2.0, n).unwrap().0)
            .collect();
        let elapsed = start.elapsed();
        for w in values.windows(2) {
            assert!(w[1] < w[0], "not strictly decreasing: {w:?}");
        }
        assert!((values[29] - 1.0).abs() < 1e-8, "Mod at n=30: {}", values[29]);
        assert!(elapsed.as_millis() < 10, "took {elapsed:?}");
    });
}

// ---------------------------------------------------------------------------
// 3. Solver agrees with the closed form on symmetric truncations.
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_solver_matches_closed_form() {
    criterion(3, "solver matches closed form on 5 symmetric specs, shell-constant density", || {
        let start = Instant::now();
        let mut specs = vec![
            binary_spec(),
            RadialTreeSpec::new(ChildrenRule::Constant { c: 3 }, WeightRule::Unit).unwrap(),
        ];
        for r in [1.5, 2.0, 3.0] {
            specs.push(skip_to_spec(&construct_tree_with_pc(r).unwrap()));
        }
        for spec in &specs {
            for p in [1.5, 2.0, 3.0] {
                for n in [3usize, 6, 10] {
                    let (exact, _) = mod_p_truncated(spec, p, n).unwrap();
                    let tree = spec.truncate(n).unwrap();
                    let report = solve_finite_modulus(&tree, &SolveOptions::new(p)).unwrap();
                    let rel = (report.value - exact).abs() / exact;
                    assert!(rel <= 1e-6, "rel err {rel:.3e} at p={p} n={n}");
                    match symmetrize_check(&tree, &report.density, 1e-5).unwrap() {
                        SymmetryVerdict::Ok => {}
                        SymmetryVerdict::Violation { shell, spread } => {
                            panic!("density not shell-constant: shell {shell} spread {spread:.3e}")
                        }
                    }
                }
            }
        }
        assert!(start.elapsed().as_secs() < 60);
    });
}

// ---------------------------------------------------------------------------
// 4. Solver agrees with the series-parallel oracle on random trees.
// ---------------------------------------------------------------------------

/// Random uniform-depth tree with at most `max_edges` edges and weights in
/// [0.1, 10]. Children counts are biased toward 1 so depth-8 trees stay
/// small; oversized draws are rejected and regenerated, which keeps every
/// leaf at the target depth.
fn random_tree(rng: &mut ChaCha8Rng, max_edges: usize, unweighted: bool) -> FiniteTree {
    loop {
        let depth = rng.gen_range(2..=8);
        let mut parents: Vec<Option<usize>> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut level: Vec<usize> = Vec::new();
        let roots = rng.gen_range(1..=3);
        for _ in 0..roots {
            parents.push(None);
            weights.push(if unweighted { 1.0 } else { rng.gen_range(0.1..10.0) });
            level.push(parents.len() - 1);
        }
        for _ in 1..depth {
            let mut next = Vec::new();
            for &e in &level {
                let kids = match rng.gen_range(0..10) {
                    0..=5 => 1,
                    6..=8 => 2,
                    _ => 3,
                };
                for _ in 0..kids {
                    parents.push(Some(e));
                    weights.push(if unweighted { 1.0 } else { rng.gen_range(0.1..10.0) });
                    next.push(parents.len() - 1);
                }
            }
            level = next;
        }
        if parents.len() <= max_edges {
            return FiniteTree::new(parents, weights).unwrap();
        }
    }
}

#[test]
fn criterion_04_solver_matches_oracle() {
    criterion(4, "solver matches series-parallel oracle on 100 random trees", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for i in 0..100 {
            let tree = random_tree(&mut rng, 500, false);
            assert!(tree.edge_count() <= 500, "{} edges", tree.edge_count());
            for p in [1.3, 2.0, 4.0] {
                let oracle = modtree::solver::series_parallel_modulus(&tree, p).unwrap();
                let report = solve_finite_modulus(&tree, &SolveOptions::new(p)).unwrap();
                let rel = (report.value - oracle).abs() / oracle;
                assert!(rel <= 1e-6, "tree {i} p={p}: rel err {rel:.3e}");
            }
        }
        assert!(start.elapsed().as_secs() < 120);
    });
}

// ---------------------------------------------------------------------------
// 5. p = 1 equals the min cut, which is the first shell on unweighted
//    truncations.
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_one_modulus_min_cut() {
    criterion(5, "p=1 value equals |S_1| on 20 random unweighted truncations", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let prefix: Vec<u64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=4)).collect();
            let tail = rng.gen_range(1..=3);
            let spec = RadialTreeSpec::new(
                ChildrenRule::PrefixThenConstant { prefix: prefix.clone(), tail },
                WeightRule::Unit,
            )
            .unwrap();
            let n = rng.gen_range(2..=6);
            let tree = spec.truncate(n).unwrap();
            let report = solve_finite_modulus(&tree, &SolveOptions::new(1.0)).unwrap();
            let first_shell = prefix[0] as f64;
            assert!(
                (report.value - first_shell).abs() <= 1e-6,
                "value {} vs |S_1| {first_shell}",
                report.value
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 6. Dual lower bounds: equality for the uniform flow on symmetric
//    truncations, validity on random trees.
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_dual_bounds() {
    criterion(6, "uniform-flow bound attains the modulus; bounds never exceed solver values", || {
        let specs = [
            binary_spec(),
            RadialTreeSpec::new(ChildrenRule::Constant { c: 3 }, WeightRule::Unit).unwrap(),
        ];
        for spec in &specs {
            for p in [1.5, 2.0, 3.0] {
                let tree = spec.truncate(6).unwrap();
                let flow = uniform_flow(&tree);
                let bound = lower_bound(&tree, &flow, p).unwrap();
                let (exact, _) = mod_p_truncated(spec, p, 6).unwrap();
                assert!(
                    (bound - exact).abs() <= 1e-9 * exact.max(1.0),
                    "p={p}: bound {bound} vs modulus {exact}"
                );
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let tree = random_tree(&mut rng, 300, false);
            for p in [1.3, 2.0, 4.0] {
                let report = solve_finite_modulus(&tree, &SolveOptions::new(p)).unwrap();
                assert!(
                    report.lower_bound <= report.value * (1.0 + 1e-9) + 1e-12,
                    "bound {} above value {}",
                    report.lower_bound,
                    report.value
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 7. Critical exponents of the skip construction.
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_critical_exponents() {
    criterion(7, "estimated p_c brackets r within ±0.05 for r in {1.25,1.5,2,3,5}", || {
        let start = Instant::now();
        for r in [1.25, 1.5, 2.0, 3.0, 5.0] {
            let skip = construct_tree_with_pc(r).unwrap();
            let est = estimate_pc(&skip, 0.05).unwrap();
            assert!(!est.pc_is_one && !est.pc_is_infinite, "r={r}: {est:?}");
            assert!(
                est.p_lo <= r && r <= est.p_hi,
                "r={r} outside bracket [{}, {}]",
                est.p_lo,
                est.p_hi
            );
            assert!((est.estimate - r).abs() <= 0.05, "r={r} estimate {}", est.estimate);
        }
        assert!(start.elapsed().as_secs() < 5);
    });
}

// ---------------------------------------------------------------------------
// 8. The phase boundary at p = 2.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_boundary_pair() {
    criterion(8, "c_k = 2^k is Zero at p=2; c_k = ceil(2^k/k^2) is Positive ≥ 0.378", || {
        let geometric = SkipSequence::new(SkipRule::CeilGeometric { r: 2.0 }, 1).unwrap();
        let outcome = mod_p_skip(&geometric, 2.0).unwrap();
        assert!(
            matches!(outcome.classification, Classification::Zero { .. }),
            "{:?}",
            outcome.classification
        );

        let damped = SkipSequence::new(SkipRule::CeilGeometricOverPoly { s: 2.0 }, 1).unwrap();
        let outcome = mod_p_skip(&damped, 2.0).unwrap();
        match outcome.classification {
            Classification::Positive { value } => {
                assert!(value >= 0.378, "value {value}");
            }
            other => panic!("expected Positive, got {other:?}"),
        }
    });
}

// ---------------------------------------------------------------------------
// 9. Monte-Carlo escape probabilities against the conductance prediction.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_random_walk() {
    criterion(9, "binary-tree escape 0.5 ± 0.01 at D=40; path escape 0.05 ± 0.005 at D=20", || {
        let start = Instant::now();
        let stats = simulate_escape(&WalkConfig {
            spec: binary_spec(),
            depth: 40,
            walks: 100_000,
            seed: 1,
        })
        .unwrap();
        assert!((stats.escape - 0.5).abs() <= 0.01, "binary escape {}", stats.escape);

        let path = RadialTreeSpec::new(ChildrenRule::Constant { c: 1 }, WeightRule::Unit).unwrap();
        let stats = simulate_escape(&WalkConfig {
            spec: path,
            depth: 20,
            walks: 100_000,
            seed: 1,
        })
        .unwrap();
        assert!((stats.escape - 0.05).abs() <= 0.005, "path escape {}", stats.escape);
        assert!(start.elapsed().as_secs() < 30);
    });
}

// ---------------------------------------------------------------------------
// 10. Randomized property suites (200 cases each).
// ---------------------------------------------------------------------------

const CASES: u32 = 200;

fn run_suite<S: Strategy>(name: &str, strategy: S, check: impl Fn(S::Value)) {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let outcome = runner.run(&strategy, |case| {
        check(case);
        Ok(())
    });
    if let Err(err) = outcome {
        match err {
            TestError::Fail(reason, value) => {
                panic!("property `{name}` failed: {reason} (case {value:?})")
            }
            TestError::Abort(reason) => panic!("property `{name}` aborted: {reason}"),
        }
    }
}

/// Strategy: a small symmetric spec given as (children prefix+tail, weight
/// prefix+tail, truncation depth).
type SymCase = (Vec<u64>, u64, Vec<f64>, f64, usize);

fn sym_case() -> impl Strategy<Value = SymCase> {
    (
        proptest::collection::vec(1u64..=4, 1..4),
        1u64..=3,
        proptest::collection::vec(0.1f64..10.0, 1..4),
        0.1f64..10.0,
        2usize..=10,
    )
}

fn spec_of(children_prefix: &[u64], children_tail: u64, weights: WeightRule) -> RadialTreeSpec {
    RadialTreeSpec::new(
        ChildrenRule::PrefixThenConstant {
            prefix: children_prefix.to_vec(),
            tail: children_tail,
        },
        weights,
    )
    .unwrap()
}

fn prefix_weights(prefix: &[f64], tail: f64) -> WeightRule {
    WeightRule::PrefixThenConstant {
        prefix: prefix.to_vec(),
        tail,
    }
}

fn truncated(spec: &RadialTreeSpec, p: f64, n: usize) -> f64 {
    mod_p_truncated(spec, p, n).unwrap().0
}

#[test]
fn criterion_10_property_suites() {
    criterion(10, "seven property suites, 200 randomized cases each", || {
        // Scaling: weights θσ give θ × the modulus.
        run_suite(
            "scaling homogeneity",
            (sym_case(), 0.1f64..10.0, 1.1f64..5.0),
            |((cp, ct, wp, wt, n), theta, p)| {
                let base = spec_of(&cp, ct, prefix_weights(&wp, wt));
                let scaled: Vec<f64> = wp.iter().map(|w| w * theta).collect();
                let scaled = spec_of(&cp, ct, prefix_weights(&scaled, wt * theta));
                let lhs = truncated(&scaled, p, n);
                let rhs = theta * truncated(&base, p, n);
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * rhs.max(1.0),
                    "θ-homogeneity: {lhs} vs {rhs}"
                );
            },
        );

        // Superadditivity in the weights.
        run_suite(
            "superadditivity",
            (sym_case(), proptest::collection::vec(0.1f64..10.0, 1..4), 0.1f64..10.0, 1.1f64..5.0),
            |((cp, ct, wp, wt, n), wp2, wt2, p)| {
                let sum: Vec<f64> = (0..wp.len().max(wp2.len()))
                    .map(|i| {
                        wp.get(i).copied().unwrap_or(wt) + wp2.get(i).copied().unwrap_or(wt2)
                    })
                    .collect();
                let m1 = truncated(&spec_of(&cp, ct, prefix_weights(&wp, wt)), p, n);
                let m2 = truncated(&spec_of(&cp, ct, prefix_weights(&wp2, wt2)), p, n);
                let ms = truncated(&spec_of(&cp, ct, prefix_weights(&sum, wt + wt2)), p, n);
                assert!(
                    ms >= m1 + m2 - 1e-9 * ms.max(1.0),
                    "superadditivity: {ms} < {m1} + {m2}"
                );
            },
        );

        // Elliptic sandwich against the unit-weight modulus.
        run_suite("elliptic sandwich", (sym_case(), 1.1f64..5.0), |((cp, ct, wp, wt, n), p)| {
            let alpha_1 = wp.iter().copied().fold(wt, f64::min);
            let alpha_2 = wp.iter().copied().fold(wt, f64::max);
            let unit = truncated(&spec_of(&cp, ct, WeightRule::Unit), p, n);
            let m = truncated(&spec_of(&cp, ct, prefix_weights(&wp, wt)), p, n);
            assert!(
                alpha_1 * unit <= m * (1.0 + 1e-9) && m <= alpha_2 * unit * (1.0 + 1e-9),
                "sandwich: {alpha_1}·{unit} ≤ {m} ≤ {alpha_2}·{unit}"
            );
        });

        // Monotone nonincreasing in p.
        run_suite(
            "p-monotonicity",
            (sym_case(), 1.1f64..5.0, 0.0f64..3.0),
            |((cp, ct, wp, wt, n), p, dp)| {
                let spec = spec_of(&cp, ct, prefix_weights(&wp, wt));
                // Monotonicity in p holds once shells carry at least
                // unit mass; rescale so every sigma_k |S_k| >= 1.
                let min_mass = (1..=n)
                    .map(|k| spec.weight(k) * shell_f64(&spec, k))
                    .fold(f64::INFINITY, f64::min);
                let wp_s: Vec<f64> = wp.iter().map(|w| w / min_mass).collect();
                let spec = spec_of(&cp, ct, prefix_weights(&wp_s, wt / min_mass));
                let lo = truncated(&spec, p, n);
                let hi = truncated(&spec, p + dp, n);
                assert!(hi <= lo * (1.0 + 1e-9), "p-monotonicity: {hi} > {lo}");
            },
        );

        // Upper bound by the cheapest shell.
        run_suite("shell upper bound", (sym_case(), 1.1f64..5.0), |((cp, ct, wp, wt, n), p)| {
            let spec = spec_of(&cp, ct, prefix_weights(&wp, wt));
            let m = truncated(&spec, p, n);
            let inf_shell = (1..=n)
                .map(|k| spec.weight(k) * shell_f64(&spec, k))
                .fold(f64::INFINITY, f64::min);
            assert!(m <= inf_shell * (1.0 + 1e-9), "upper bound: {m} > {inf_shell}");
        });

        // Pairing of an admissible density with any unit flow is at least 1.
        run_suite(
            "pairing lower bound",
            (0u64..1 << 48, 1.1f64..5.0),
            |(seed, _p)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let tree = random_tree(&mut rng, 120, false);
                let rho = admissible_density(&tree, &mut rng);
                let flow = random_unit_flow(&tree, &mut rng);
                validate_unit_flow(&tree, &flow).unwrap();
                let value = pairing(&tree, &rho, &flow).unwrap();
                assert!(value >= 1.0 - 1e-9, "pairing {value} < 1");
            },
        );

        // Lipschitz continuity in the weights.
        run_suite(
            "Lipschitz in weights",
            (sym_case(), proptest::collection::vec(0.1f64..10.0, 1..4), 0.1f64..10.0, 1.1f64..5.0),
            |((cp, ct, wp, wt, n), wp2, wt2, p)| {
                let m1 = truncated(&spec_of(&cp, ct, prefix_weights(&wp, wt)), p, n);
                let m2 = truncated(&spec_of(&cp, ct, prefix_weights(&wp2, wt2)), p, n);
                let unit = truncated(&spec_of(&cp, ct, WeightRule::Unit), p, n);
                let all = |i: usize| {
                    [
                        wp.get(i).copied().unwrap_or(wt),
                        wp2.get(i).copied().unwrap_or(wt2),
                    ]
                };
                let mut alpha_1 = f64::INFINITY;
                let mut alpha_2: f64 = 0.0;
                let mut max_diff: f64 = 0.0;
                for i in 0..wp.len().max(wp2.len()).max(1) {
                    let [a, b] = all(i);
                    alpha_1 = alpha_1.min(a.min(b));
                    alpha_2 = alpha_2.max(a.max(b));
                    max_diff = max_diff.max((a - b).abs());
                }
                alpha_1 = alpha_1.min(wt.min(wt2));
                alpha_2 = alpha_2.max(wt.max(wt2));
                max_diff = max_diff.max((wt - wt2).abs());
                let bound = (alpha_2 / alpha_1) * unit * max_diff;
                assert!(
                    (m1 - m2).abs() <= bound * (1.0 + 1e-9) + 1e-12,
                    "Lipschitz: |{m1} - {m2}| > {bound}"
                );
            },
        );
    });
}

/// `|S_k|` as a float; children counts here are at most 4 and depths at most
/// 10, so the product stays far below 2^53.
fn shell_f64(spec: &RadialTreeSpec, k: usize) -> f64 {
    (0..k).map(|j| spec.children.count(j) as f64).product()
}

/// Random strictly positive density scaled so the shortest rho-length over
/// all maximal descending paths is exactly 1 (hence admissible).
fn admissible_density(tree: &FiniteTree, rng: &mut ChaCha8Rng) -> Density {
    let raw: Vec<f64> = (0..tree.edge_count()).map(|_| rng.gen_range(0.01..1.0)).collect();
    let mut rho = Density(raw);
    let min_len = tree
        .enumerate_paths()
        .iter()
        .map(|path| rho_length(tree, &rho, path).unwrap())
        .fold(f64::INFINITY, f64::min);
    for v in &mut rho.0 {
        *v /= min_len;
    }
    rho
}

/// Random unit flow: random positive leaf masses normalized to total 1, then
/// summed up the tree.
fn random_unit_flow(tree: &FiniteTree, rng: &mut ChaCha8Rng) -> UnitFlow {
    let mut eta = vec![0.0f64; tree.edge_count()];
    let leaves = tree.leaves().to_vec();
    let masses: Vec<f64> = (0..leaves.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = masses.iter().sum();
    for (&leaf, &mass) in leaves.iter().zip(&masses) {
        eta[leaf] = mass / total;
    }
    // Parents precede children in edge order, so a reverse sweep accumulates
    // subtree mass.
    for e in (0..tree.edge_count()).rev() {
        if let Some(parent) = tree.parent(e) {
            eta[parent] += eta[e];
        }
    }
    UnitFlow(eta)
}

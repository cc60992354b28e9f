//! Infinite-series machinery shared by the closed-form modulus operations:
//! symbolic convergence classification per generator family, and summation
//! with tail resolution (closed-form geometric tails where the rule allows,
//! rigorous bounds or integral estimates otherwise).
//!
//! Terms under study have the shape `a_k = x_k^{-t}` where
//! `x_k = Theta(2^(rate·k) · k^alpha · (ln k)^lambda)` for every supported
//! generator family, so convergence is decided exactly by root test,
//! p-series comparison and Bertrand comparison — never by floating-point
//! partial sums.

/// Hard cap on summed terms.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Summation stops once the rigorous tail bound drops below this fraction of
/// the partial sum.
pub const DEFAULT_REL_TOL: f64 = 1e-14;

/// Exact multiplicative structure: `x_{k+period} = x_k · 2^log2_ratio` for
/// all `k >= from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRatio {
    pub from: usize,
    pub period: usize,
    pub log2_ratio: f64,
}

impl PeriodRatio {
    pub const IDENTITY: PeriodRatio = PeriodRatio {
        from: 0,
        period: 1,
        log2_ratio: 0.0,
    };

    /// Combine two exact period structures (product of the sequences).
    pub fn combine(self, other: PeriodRatio) -> PeriodRatio {
        let period = lcm(self.period, other.period);
        PeriodRatio {
            from: self.from.max(other.from),
            period,
            log2_ratio: self.log2_ratio * (period / self.period) as f64
                + other.log2_ratio * (period / other.period) as f64,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Tail asymptotics of a positive sequence `x_k`:
/// `x_k = Theta(2^(log2_rate·k) · k^poly_exp · (ln k)^log_exp)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptotics {
    pub log2_rate: f64,
    pub poly_exp: f64,
    pub log_exp: f64,
}

impl Asymptotics {
    pub fn combine(&self, other: &Asymptotics) -> Asymptotics {
        Asymptotics {
            log2_rate: self.log2_rate + other.log2_rate,
            poly_exp: self.poly_exp + other.poly_exp,
            log_exp: self.log_exp + other.log_exp,
        }
    }
}

/// Verdict on `sum_k x_k^{-t}` for `t > 0`, decided symbolically.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesClass {
    Convergent { test: String },
    Divergent { certificate: String },
}

/// Classify `sum_k x_k^{-t}` from the tail asymptotics of `x_k`.
pub fn classify_power_series(asym: &Asymptotics, t: f64) -> SeriesClass {
    let rate = asym.log2_rate * t;
    if rate > 0.0 {
        return SeriesClass::Convergent {
            test: format!("root test: terms decay like 2^(-{rate:.6}k)"),
        };
    }
    if rate < 0.0 {
        return SeriesClass::Divergent {
            certificate: format!(
                "root test: terms grow like 2^({:.6}k); terms do not vanish",
                -rate
            ),
        };
    }
    let beta = asym.poly_exp * t;
    if beta > 1.0 {
        return SeriesClass::Convergent {
            test: format!("p-series comparison: terms decay like k^(-{beta:.6})"),
        };
    }
    if beta < 1.0 {
        return SeriesClass::Divergent {
            certificate: if beta <= 0.0 {
                "terms do not vanish faster than a constant".to_string()
            } else {
                format!("p-series comparison: terms decay only like k^(-{beta:.6})")
            },
        };
    }
    let lam = asym.log_exp * t;
    if lam > 1.0 {
        SeriesClass::Convergent {
            test: format!("Bertrand comparison: terms decay like 1/(k (ln k)^{lam:.6})"),
        }
    } else {
        SeriesClass::Divergent {
            certificate: format!(
                "Bertrand comparison: terms decay only like 1/(k (ln k)^{lam:.6})"
            ),
        }
    }
}

/// Tail resolution returned by a summation strategy at step `k`.
#[derive(Debug, Clone, Copy)]
pub enum Tail {
    /// The remaining sum, exactly (up to rounding).
    Exact(f64),
    /// A rigorous upper bound on the remaining sum.
    Bound(f64),
    /// An estimate of the remaining sum (integral comparison), not a bound.
    Estimate(f64),
    /// No resolution available yet.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    /// Partial sum plus the resolved tail.
    pub value: f64,
    /// Magnitude of the tail term added (0-ish for exact tails).
    pub tail_bound: f64,
    pub terms: usize,
    pub hit_cap: bool,
    pub exact_tail: bool,
}

/// Sum a positive series with a caller-supplied tail strategy.
pub fn sum_series<I, F>(terms: I, mut tail: F, rel_tol: f64, cap: usize) -> SumResult
where
    I: IntoIterator<Item = f64>,
    F: FnMut(usize, f64) -> Tail,
{
    let mut partial = 0.0f64;
    let mut k = 0usize;
    let mut last_estimate = f64::INFINITY;
    for a in terms {
        k += 1;
        partial += a;
        match tail(k, a) {
            Tail::Exact(t) => {
                return SumResult {
                    value: partial + t,
                    tail_bound: f64::EPSILON * (partial + t),
                    terms: k,
                    hit_cap: false,
                    exact_tail: true,
                };
            }
            Tail::Bound(b) | Tail::Estimate(b) => {
                last_estimate = b;
                if b <= rel_tol * partial || k >= cap {
                    return SumResult {
                        value: partial + b,
                        tail_bound: b,
                        terms: k,
                        hit_cap: k >= cap,
                        exact_tail: false,
                    };
                }
            }
            Tail::Unknown => {
                if k >= cap {
                    return SumResult {
                        value: partial,
                        tail_bound: last_estimate,
                        terms: k,
                        hit_cap: true,
                        exact_tail: false,
                    };
                }
            }
        }
    }
    // Finite iterator: the series was exhausted.
    SumResult {
        value: partial,
        tail_bound: 0.0,
        terms: k,
        hit_cap: false,
        exact_tail: true,
    }
}

/// Strategy for resolving the tail of `a_k = x_k^{-t}`.
pub enum TailStrategy {
    /// `x` has an exact period ratio up to a `k^beta` factor from a power-law
    /// weight. With `beta == 0` the tail closes in exact form.
    PeriodGeometric {
        period: PeriodRatio,
        /// Per-period decay of `a` ignoring the poly factor: `2^(-t·log2_ratio)`.
        ratio: f64,
        /// `-t * beta` where `x_k` carries a `k^beta` factor.
        poly_pow: f64,
    },
    /// Shell sizes are monotone nondecreasing and weights contribute a
    /// geometric factor decaying `a` by at least `ratio` per `period` steps.
    MonotoneGeometric {
        period: usize,
        ratio: f64,
        poly_pow: f64,
    },
    /// `a_k ~ A k^(-beta) (ln k)^(-lambda)` with `beta >= 1`; integral
    /// estimate fitted at the current term.
    PolyEstimate { beta: f64, lambda: f64 },
    /// No strategy (classification already settled divergence).
    None,
}

impl TailStrategy {
    /// Build the per-step closure for [`sum_series`].
    pub fn into_fn(self) -> impl FnMut(usize, f64) -> Tail {
        let mut block: Vec<f64> = Vec::new();
        move |k: usize, a: f64| -> Tail {
            match &self {
                TailStrategy::PeriodGeometric { period, ratio, poly_pow } => {
                    if k <= period.from {
                        return Tail::Unknown;
                    }
                    block.push(a);
                    if block.len() < period.period {
                        return Tail::Unknown;
                    }
                    let block_sum: f64 = block.iter().sum();
                    block.clear();
                    // Ratio of successive period blocks starting at position
                    // k - period + 1; the poly factor correction is monotone,
                    // so its sup over later blocks is max(current, limit 1).
                    let p = period.period as f64;
                    let start = (k + 1 - period.period) as f64;
                    let corr = ((start + p) / start).powf(*poly_pow).max(1.0);
                    let r = ratio * corr;
                    if r >= 1.0 {
                        return Tail::Unknown;
                    }
                    let tail = block_sum * r / (1.0 - r);
                    if *poly_pow == 0.0 {
                        Tail::Exact(tail)
                    } else {
                        Tail::Bound(tail)
                    }
                }
                TailStrategy::MonotoneGeometric { period, ratio, poly_pow } => {
                    block.push(a);
                    if block.len() < *period {
                        return Tail::Unknown;
                    }
                    let block_sum: f64 = block.iter().sum();
                    block.clear();
                    let p = *period as f64;
                    let start = (k + 1 - *period) as f64;
                    let corr = ((start + p) / start).powf(*poly_pow).max(1.0);
                    let r = ratio * corr;
                    if r >= 1.0 {
                        return Tail::Unknown;
                    }
                    Tail::Bound(block_sum * r / (1.0 - r))
                }
                TailStrategy::PolyEstimate { beta, lambda } => {
                    if k < 8 {
                        return Tail::Unknown;
                    }
                    let kf = k as f64;
                    let est = if *beta > 1.0 {
                        // integral of A x^-beta fitted so A k^-beta = a_k
                        a * kf / (beta - 1.0)
                    } else if *lambda > 1.0 {
                        // beta == 1 Bertrand case
                        a * kf * kf.ln() / (lambda - 1.0)
                    } else {
                        return Tail::Unknown;
                    };
                    Tail::Estimate(est)
                }
                TailStrategy::None => Tail::Unknown,
            }
        }
    }
}

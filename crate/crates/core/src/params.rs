//! Entropy formulas, the per-size-class exponents of the block-sampled
//! 2-OV solver, the lambda optimizer behind the (alpha, beta) landscape,
//! and the epsilon thresholds driving the recursive k-OV case split.
//!
//! All arguments are fractions of the dimension d. Exponents are "bits per
//! dimension": a value c means a 2^(c*d) contribution to the running time.

use rayon::prelude::*;

/// Default tolerance for closed-form comparisons.
pub const FORMULA_TOL: f64 = 1e-9;
/// Default tolerance for the one-dimensional optimizers.
pub const OPTIMIZER_TOL: f64 = 1e-4;

const EPS: f64 = 1e-12;

/// Loop-cap exponents of the two phases of the block-sampled solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentPair {
    /// Subset-lookup phase, bits per dimension.
    pub c_a: f64,
    /// Disjointness-lookup phase, bits per dimension.
    pub c_b: f64,
}

/// One grid point of the (alpha, beta) running-time landscape.
#[derive(Clone, Copy, Debug)]
pub struct LandscapeCell {
    pub alpha: f64,
    pub beta: f64,
    pub lambda_star: f64,
    /// Running-time base 2^max(c_a, c_b) at the optimized lambda.
    pub base: f64,
}

/// All admissible grid cells plus the one with the largest base.
#[derive(Clone, Debug)]
pub struct LandscapeResult {
    pub cells: Vec<LandscapeCell>,
    pub argmax: LandscapeCell,
}

/// Per-arity savings exponents for the recursive k-OV solver:
/// k-OV is solvable in roughly 2^((1 - eps_k) * d) * n time.
#[derive(Clone, Debug)]
pub struct EpsilonTable {
    eps: Vec<f64>,
}

impl EpsilonTable {
    pub fn k_max(&self) -> usize {
        self.eps.len()
    }

    /// Epsilon for arity `k` (1-indexed).
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.eps.len(), "no epsilon for k={k}");
        self.eps[k - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }
}

/// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> f64 {
    assert!(
        (-EPS..=1.0 + EPS).contains(&x),
        "entropy argument {x} outside [0, 1]"
    );
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    // ln_1p keeps the (1-x) term accurate for x near 0.
    -x * x.log2() - (1.0 - x) * (-x).ln_1p() / std::f64::consts::LN_2
}

/// -sum(w_i log2 w_i) for nonnegative weights summing to 1.
pub fn multinomial_entropy(weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut h = 0.0;
    for &w in weights {
        assert!(w >= -EPS, "negative weight {w}");
        sum += w;
        if w > 0.0 {
            h -= w * w.log2();
        }
    }
    assert!((sum - 1.0).abs() <= 1e-9, "weights sum to {sum}, expected 1");
    h
}

/// Exact log2 of C(n, k) via summed logarithms.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "binomial with k={k} > n={n}");
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 1..=k {
        acc += ((n - k + i) as f64).log2() - (i as f64).log2();
    }
    acc
}

/// `coeff * h(num / coeff)`, reading the degenerate 0 * h(0/0) as 0.
fn scaled_entropy(coeff: f64, num: f64) -> f64 {
    if coeff <= EPS {
        0.0
    } else {
        coeff * binary_entropy((num / coeff).clamp(0.0, 1.0))
    }
}

fn check_size_pair(alpha: f64, beta: f64) {
    assert!(
        alpha >= -EPS && alpha <= beta + EPS && alpha + beta <= 1.0 + 1e-9,
        "inadmissible size pair alpha={alpha}, beta={beta}"
    );
}

fn check_lambda(alpha: f64, beta: f64, lambda: f64) {
    assert!(
        lambda >= alpha - 1e-9 && lambda <= 1.0 - beta + 1e-9,
        "lambda={lambda} outside [{alpha}, {}]",
        1.0 - beta
    );
}

/// Smallest per-block sampling exponent that keeps a certificate likely:
/// h(lambda) - (1 - alpha - beta) * h((lambda - alpha) / (1 - alpha - beta)),
/// clamped at 0.
pub fn kappa_min(alpha: f64, beta: f64, lambda: f64) -> f64 {
    check_size_pair(alpha, beta);
    check_lambda(alpha, beta, lambda);
    let kappa = binary_entropy(lambda.clamp(0.0, 1.0))
        - scaled_entropy(1.0 - alpha - beta, lambda - alpha);
    kappa.max(0.0)
}

/// Phase-loop exponents with the sampling exponent at its minimum, each
/// clamped at 0.
pub fn exponents(alpha: f64, beta: f64, lambda: f64) -> ExponentPair {
    check_size_pair(alpha, beta);
    check_lambda(alpha, beta, lambda);
    let shared = scaled_entropy(1.0 - alpha - beta, lambda - alpha);
    let c_a = scaled_entropy(1.0 - alpha, lambda - alpha) - shared;
    let c_b = scaled_entropy(1.0 - beta, 1.0 - lambda - beta) - shared;
    ExponentPair {
        c_a: c_a.max(0.0),
        c_b: c_b.max(0.0),
    }
}

/// Closed-form lambda choice (1 + alpha - beta) / 2; always feasible.
pub fn lambda_analytic(alpha: f64, beta: f64) -> f64 {
    check_size_pair(alpha, beta);
    (1.0 + alpha - beta) / 2.0
}

/// Minimizes max(c_a, c_b) over lambda in [alpha, 1 - beta] to within
/// `tol`; returns (lambda, 2^exponent). A 200-point grid scan brackets the
/// minimum before golden-section refinement, since unimodality of the max
/// is not guaranteed.
pub fn optimize_lambda(alpha: f64, beta: f64, tol: f64) -> (f64, f64) {
    check_size_pair(alpha, beta);
    assert!(tol > 0.0, "tolerance must be positive");
    let lo = alpha;
    // Guard against 1 - beta landing one ulp below alpha when
    // alpha + beta = 1 in exact arithmetic.
    let hi = (1.0 - beta).max(lo);
    let objective = |lambda: f64| {
        let e = exponents(alpha, beta, lambda.clamp(lo, hi));
        e.c_a.max(e.c_b)
    };
    if hi - lo <= EPS {
        return (lo, exp2(objective(lo)));
    }

    const GRID: usize = 200;
    let step = (hi - lo) / GRID as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=GRID {
        let v = objective(lo + i as f64 * step);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }

    let mut a = lo + best_i.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best_i + 1) as f64 * step).min(hi);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if objective(c) <= objective(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    let (lambda, value) = if objective(mid) <= best_v {
        (mid, objective(mid))
    } else {
        (lo + best_i as f64 * step, best_v)
    };
    (lambda, exp2(value))
}

/// Exponent of the closed-form running-time bound:
/// (h(1/2 - beta / (2(1 - alpha))) - 1) * (1 - alpha) + beta.
///
/// This equals the raw subset-phase exponent at the closed-form lambda, so
/// it upper-bounds what the optimizer can be forced to accept.
pub fn analytic_bound(alpha: f64, beta: f64) -> f64 {
    check_size_pair(alpha, beta);
    assert!(alpha < 1.0, "bound undefined at alpha = 1");
    let arg = (0.5 - beta / (2.0 * (1.0 - alpha))).clamp(0.0, 1.0);
    (binary_entropy(arg) - 1.0) * (1.0 - alpha) + beta
}

/// Evaluates [`optimize_lambda`] on every admissible grid point
/// (alpha <= beta, alpha + beta <= 1), in lexicographic (alpha, beta)
/// order, and reports the cell with the largest base.
pub fn landscape(grid_step: f64, tol: f64) -> LandscapeResult {
    assert!(
        grid_step > 0.0 && grid_step <= 1.0,
        "grid step {grid_step} outside (0, 1]"
    );
    let mut points = Vec::new();
    let n = (1.0 / grid_step).floor() as usize;
    for i in 0..=n {
        let alpha = i as f64 * grid_step;
        for j in i..=n {
            let beta = j as f64 * grid_step;
            if alpha + beta <= 1.0 + 1e-9 {
                points.push((alpha, beta));
            }
        }
    }

    let cells: Vec<LandscapeCell> = points
        .par_iter()
        .map(|&(alpha, beta)| {
            // Guard float drift on boundary cells like alpha + beta = 1.
            let beta_eval = beta.min(1.0 - alpha);
            let (lambda_star, base) = optimize_lambda(alpha, beta_eval, tol);
            LandscapeCell {
                alpha,
                beta,
                lambda_star,
                base,
            }
        })
        .collect();

    let argmax = *cells
        .iter()
        .reduce(|best, c| if c.base > best.base { c } else { best })
        .expect("grid is never empty");
    LandscapeResult { cells, argmax }
}

/// Largest epsilon values satisfying, for every split position l in 2..=k,
/// eps_k + h(eps_k) * (k - l + 1) <= eps_(l-1), with eps_1 = 1 and
/// eps_2 = 1/2. The left side is increasing in eps_k on (0, 1/2], so each
/// constraint is a bisection.
pub fn epsilon_table(k_max: usize, tol: f64) -> EpsilonTable {
    assert!(k_max >= 1, "k_max must be at least 1");
    assert!(tol > 0.0, "tolerance must be positive");
    let mut eps = vec![1.0];
    if k_max >= 2 {
        eps.push(0.5);
    }
    for k in 3..=k_max {
        let mut value = 0.5f64;
        for l in 2..=k {
            let multiplier = (k - l + 1) as f64;
            let bound = eps[l - 2];
            value = value.min(largest_feasible(multiplier, bound, tol));
        }
        eps.push(value);
    }
    EpsilonTable { eps }
}

/// Largest x in (0, 1/2] with x + h(x) * multiplier <= bound.
fn largest_feasible(multiplier: f64, bound: f64, tol: f64) -> f64 {
    let ok = |x: f64| x + binary_entropy(x) * multiplier <= bound;
    if ok(0.5) {
        return 0.5;
    }
    // Bisect far past `tol`: deep tables have thresholds near 1e-8 and the
    // result must stay strictly positive.
    let iters = 200usize.max((0.5 / tol).log2().ceil().max(0.0) as usize);
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..iters.min(4000) {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn exp2(x: f64) -> f64 {
    2f64.powf(x)
}

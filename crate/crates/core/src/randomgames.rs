//! Random instances and the probabilistic facts behind the bounds on the
//! number of equilibria in random one-way games.
//!
//! Orientation of partial sums: `S_i = X_1 + … + X_i` throughout. Where the
//! arc representation sums the last `i` exponentials instead, the two are
//! equal in distribution and the code says so at the call site.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::equilibrium::{count_pne, EquilibriumError, DEFAULT_ENUMERATION_BUDGET};
use crate::games::{Board, GameInstance, GameVariant, Objective};
use crate::geometry::PlanarPoint;
use crate::numeric::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RandomGamesError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

/// Generator for work item `index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Unit-mean exponential by inverse transform.
pub fn exponential(rng: &mut impl Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Uniform candidates for `n` players with `m` choices each.
pub fn random_instance(
    n: usize,
    m: usize,
    variant: GameVariant,
    objective: Objective,
    seed: u64,
) -> GameInstance<f64> {
    random_instance_with(n, m, variant, objective, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_instance_with(
    n: usize,
    m: usize,
    variant: GameVariant,
    objective: Objective,
    rng: &mut impl Rng,
) -> GameInstance<f64> {
    assert!(n >= 1 && m >= 1, "instances need players and candidates");
    loop {
        let built = if variant.is_circle() {
            let players = (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect();
            GameInstance::circle(variant, objective, players)
        } else {
            let players = (0..n)
                .map(|_| (0..m).map(|_| PlanarPoint::new(rng.random::<f64>(), rng.random::<f64>())).collect())
                .collect();
            GameInstance::planar(variant, objective, players)
        };
        // A repeated float is astronomically rare; draw again if it happens.
        if let Ok(game) = built {
            return game;
        }
    }
}

/// Pearson chi-square test of uniformity on `[0, 1)` with equal bins;
/// returns the statistic and its upper-tail p-value.
pub fn chi_square_uniformity(values: &[f64], bins: usize) -> (f64, f64) {
    let mut counts = vec![0usize; bins];
    for &v in values {
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = values.len() as f64 / bins as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((bins - 1) as f64).expect("positive degrees of freedom");
    (statistic, dist.sf(statistic))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpacingRoute {
    SortUniforms,
    WeightedExponentials,
}

/// One draw of the ordered arc lengths cut by `n` uniform points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingSample {
    /// Exponential draws; empty for the sorted-uniform route.
    pub exponentials: Vec<f64>,
    /// `S_i = X_1 + … + X_i`; empty for the sorted-uniform route.
    pub partial_sums: Vec<f64>,
    /// Arc lengths in increasing order; they sum to 1.
    pub arcs: Vec<f64>,
}

pub fn sample_spacings(n: usize, seed: u64, route: SpacingRoute) -> SpacingSample {
    sample_spacings_with(n, &mut ChaCha8Rng::seed_from_u64(seed), route)
}

pub fn sample_spacings_with(n: usize, rng: &mut impl Rng, route: SpacingRoute) -> SpacingSample {
    assert!(n >= 1, "at least one point is required");
    match route {
        SpacingRoute::SortUniforms => {
            let mut points: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            points.sort_by(f64::total_cmp);
            let mut arcs: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
            arcs.push(1.0 - points[n - 1] + points[0]);
            arcs.sort_by(f64::total_cmp);
            SpacingSample { exponentials: Vec::new(), partial_sums: Vec::new(), arcs }
        }
        SpacingRoute::WeightedExponentials => {
            let x: Vec<f64> = (0..n).map(|_| exponential(rng)).collect();
            let partial_sums: Vec<f64> = x
                .iter()
                .scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect();
            let total = partial_sums[n - 1];
            // A_i = (1/S_n) Σ_{j=n-i+1..n} X_j / j, built from the top down.
            let mut arcs = Vec::with_capacity(n);
            let mut running = 0.0;
            for j in (1..=n).rev() {
                running += x[j - 1] / j as f64;
                arcs.push(running / total);
            }
            SpacingSample { exponentials: x, partial_sums, arcs }
        }
    }
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    (d, kolmogorov_tail(lambda))
}

fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// A Monte Carlo estimate with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
    /// Closed form or bound the estimate is compared against.
    pub reference: Option<f64>,
}

impl EstimatorReport {
    /// `|estimate - reference| <= k·SE`.
    pub fn agrees(&self, k: f64) -> bool {
        self.reference.is_some_and(|r| (self.estimate - r).abs() <= k * self.standard_error)
    }

    /// `estimate <= bound + k·SE`.
    pub fn at_most(&self, bound: f64, k: f64) -> bool {
        self.estimate <= bound + k * self.standard_error
    }

    /// `estimate >= bound - k·SE`.
    pub fn at_least(&self, bound: f64, k: f64) -> bool {
        self.estimate >= bound - k * self.standard_error
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Default)]
pub struct MeanAccumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }

    pub fn report(&self, seed: u64, reference: Option<f64>) -> EstimatorReport {
        EstimatorReport {
            estimate: self.mean(),
            standard_error: self.standard_error(),
            samples: self.count,
            seed,
            reference,
        }
    }
}

/// `E[(S_j / S_{j+1})^t] = j / (j + t)`.
pub fn beta_moment_exact(j: u32, t: u32) -> f64 {
    j as f64 / (j + t) as f64
}

pub fn beta_moment_estimate(j: u32, t: u32, samples: usize, seed: u64) -> EstimatorReport {
    assert!(j >= 1, "j starts at 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = MeanAccumulator::default();
    for _ in 0..samples {
        let head: f64 = (0..j).map(|_| exponential(&mut rng)).sum();
        let ratio = head / (head + exponential(&mut rng));
        acc.push(ratio.powi(t as i32));
    }
    acc.report(seed, Some(beta_moment_exact(j, t)))
}

/// Estimates of `E[(S_j/S_{j+1})^t]` for every `1 <= j <= max_j` and
/// `0 <= t <= max_t` from one shared stream of partial sums. Entry
/// `[j - 1][t]`.
pub fn beta_moment_table(max_j: u32, max_t: u32, samples: usize, seed: u64) -> Vec<Vec<EstimatorReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![vec![MeanAccumulator::default(); max_t as usize + 1]; max_j as usize];
    let mut sums = vec![0.0; max_j as usize + 1];
    for _ in 0..samples {
        let mut s = 0.0;
        for slot in sums.iter_mut() {
            s += exponential(&mut rng);
            *slot = s;
        }
        for j in 1..=max_j as usize {
            let ratio = sums[j - 1] / sums[j];
            let mut power = 1.0;
            for cell in acc[j - 1].iter_mut() {
                cell.push(power);
                power *= ratio;
            }
        }
    }
    acc.iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(t, a)| a.report(seed, Some(beta_moment_exact(j as u32 + 1, t as u32))))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationCheck {
    pub label: String,
    pub estimate: f64,
    /// `1/sqrt(samples)`, the standard error of a correlation under
    /// independence.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub label: String,
    pub report: EstimatorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub correlations: Vec<CorrelationCheck>,
    pub factorizations: Vec<FactorizationCheck>,
}

impl IndependenceReport {
    pub fn passed(&self, k: f64) -> bool {
        self.correlations.iter().all(|c| c.estimate.abs() <= k * c.standard_error)
            && self.factorizations.iter().all(|f| f.report.agrees(k))
    }
}

/// `E[S_n^a] = n (n+1) … (n+a-1)`.
pub fn gamma_moment_exact(n: usize, a: u32) -> f64 {
    (0..a).map(|i| (n + i as usize) as f64).product()
}

/// Checks that `S_n` and the ratios `S_i/S_{i+1}` behave independently:
/// pairwise correlations vanish and mixed moments factor.
pub fn independence_check(n: usize, samples: usize, seed: u64) -> IndependenceReport {
    let mut report = IndependenceReport { n, samples, seed, correlations: Vec::new(), factorizations: Vec::new() };
    if n < 2 {
        return report;
    }
    // Variable 0 is S_n; variable i is S_i / S_{i+1}.
    let labels: Vec<String> =
        std::iter::once(format!("S_{n}")).chain((1..n).map(|i| format!("S_{i}/S_{}", i + 1))).collect();
    let vars = labels.len();
    let exponent_sets: Vec<(u32, Vec<u32>)> = vec![
        (1, vec![1; n - 1]),
        (2, (1..n as u32).collect()),
        (0, vec![2; n - 1]),
    ];
    let mut sum = vec![0.0; vars];
    let mut sum_sq = vec![0.0; vars];
    let mut cross = vec![vec![0.0; vars]; vars];
    let mut moments = vec![MeanAccumulator::default(); exponent_sets.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; vars];
    let mut partial = vec![0.0; n];
    for _ in 0..samples {
        let mut s = 0.0;
        for slot in partial.iter_mut() {
            s += exponential(&mut rng);
            *slot = s;
        }
        values[0] = partial[n - 1];
        for i in 1..n {
            values[i] = partial[i - 1] / partial[i];
        }
        for a in 0..vars {
            sum[a] += values[a];
            sum_sq[a] += values[a] * values[a];
            for b in a + 1..vars {
                cross[a][b] += values[a] * values[b];
            }
        }
        for (acc, (a, bs)) in moments.iter_mut().zip(&exponent_sets) {
            let mut v = values[0].powi(*a as i32);
            for (i, &b) in bs.iter().enumerate() {
                v *= values[i + 1].powi(b as i32);
            }
            acc.push(v);
        }
    }
    let count = samples as f64;
    for a in 0..vars {
        for b in a + 1..vars {
            let cov = cross[a][b] / count - (sum[a] / count) * (sum[b] / count);
            let va = sum_sq[a] / count - (sum[a] / count).powi(2);
            let vb = sum_sq[b] / count - (sum[b] / count).powi(2);
            report.correlations.push(CorrelationCheck {
                label: format!("corr({}, {})", labels[a], labels[b]),
                estimate: cov / (va * vb).sqrt(),
                standard_error: 1.0 / count.sqrt(),
            });
        }
    }
    for (acc, (a, bs)) in moments.iter().zip(&exponent_sets) {
        let exact = gamma_moment_exact(n, *a)
            * bs.iter().enumerate().map(|(i, &b)| beta_moment_exact(i as u32 + 1, b)).product::<f64>();
        report.factorizations.push(FactorizationCheck {
            label: format!("S_{n}^{a} * prod (S_i/S_(i+1))^{bs:?}"),
            report: acc.report(seed, Some(exact)),
        });
    }
    report
}

/// Mean number of pure equilibria over random instances, by enumeration.
pub fn mean_pne_count(
    n: usize,
    m: usize,
    variant: GameVariant,
    objective: Objective,
    instances: usize,
    seed: u64,
) -> Result<EstimatorReport, RandomGamesError> {
    let mut acc = MeanAccumulator::default();
    for i in 0..instances {
        let game = random_instance_with(n, m, variant, objective, &mut stream_rng(seed, i as u64));
        acc.push(count_pne(&game, DEFAULT_ENUMERATION_BUDGET)? as f64);
    }
    Ok(acc.report(seed, None))
}

/// Probability that everyone on their first candidate is an equilibrium
/// of a random one-way maximization game; the reference is `1/m^(n-1)`.
pub fn stable_first_choice_probability(n: usize, m: usize, samples: usize, seed: u64) -> EstimatorReport {
    let mut acc = MeanAccumulator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let game = random_instance_with(n, m, GameVariant::OneWay1D, Objective::Maximize, &mut rng);
        let stable = Board::new(&game, vec![0; n]).is_stable();
        acc.push(if stable { 1.0 } else { 0.0 });
    }
    acc.report(seed, Some(1.0 / (m as f64).powi(n as i32 - 1)))
}

/// Upper bound `m` on the expected number of equilibria (maximization).
pub fn max_game_upper_bound(m: usize) -> f64 {
    m as f64
}

/// Finite-`n` lower bound `m · (∏ c_i)^(m-1)` for maximization.
pub fn max_game_lower_bound(n: usize, m: usize) -> Rational {
    let product = harmonic_constants(n).product();
    Rational::from_integer(BigInt::from(m)) * num_traits::pow(product, m - 1)
}

/// Lower bound `m(m-1) / ((mn-1) n^(m-1))` for minimization.
pub fn min_game_lower_bound(n: usize, m: usize) -> Rational {
    let (n, m) = (BigInt::from(n), BigInt::from(m));
    let numer = &m * (&m - 1);
    let denom = (&m * &n - 1) * num_traits::pow(n.clone(), (m.to_usize().unwrap()) - 1);
    Rational::new(numer, denom)
}

/// Harmonic numbers and the averaged coefficients `c_i` for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicConstants {
    pub n: usize,
    /// `H_0, H_1, …, H_n`.
    pub harmonic: Vec<Rational>,
    /// `1 + 1/4 + … + 1/n²`.
    pub harmonic2: Rational,
    /// `c_1, …, c_n` with `c_i = 1 + (H_{n-i} - H_n)/i`.
    pub coefficients: Vec<Rational>,
}

impl HarmonicConstants {
    pub fn sum(&self) -> Rational {
        self.coefficients.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn product(&self) -> Rational {
        self.coefficients.iter().fold(Rational::one(), |acc, c| acc * c)
    }

    /// `c_1 + … + c_n = n - H_n^(2)`, exactly.
    pub fn identity_holds(&self) -> bool {
        self.sum() == Rational::from_integer(BigInt::from(self.n)) - &self.harmonic2
    }
}

pub fn harmonic_constants(n: usize) -> HarmonicConstants {
    assert!(n >= 1, "n starts at 1");
    let mut harmonic = vec![Rational::zero()];
    let mut harmonic2 = Rational::zero();
    for k in 1..=n {
        let inv = Rational::from_ratio(1, k as i64);
        harmonic.push(&harmonic[k - 1] + &inv);
        harmonic2 += &inv * &inv;
    }
    let coefficients = (1..=n)
        .map(|i| {
            Rational::one() + (&harmonic[n - i] - &harmonic[n]) / Rational::from_integer(BigInt::from(i))
        })
        .collect();
    HarmonicConstants { n, harmonic, harmonic2, coefficients }
}

/// `c_i` straight from its definition `(1/i) Σ_{j=n-i+1..n} (j-1)/j`.
pub fn coefficient_by_definition(n: usize, i: usize) -> Rational {
    let total = (n - i + 1..=n).fold(Rational::zero(), |acc, j| acc + Rational::from_ratio(j as i64 - 1, j as i64));
    total / Rational::from_integer(BigInt::from(i))
}

/// Verifies `c_1 + … + c_n = n - H_n^(2)` as an exact identity for every
/// `n <= max_n`. Returns the first `n` where it fails.
///
/// Writing `G(n) = Σ_{i+k<=n} 1/(ik) = Σ_i H_{n-i}/i`, the coefficient sum
/// is `n + G(n) - H_n²`, so the identity reads `G(n) - H_n² + H_n^(2) = 0`.
/// All three terms are kept as integers over the common denominator
/// `lcm(1..n)²`, and `G` grows by `Σ_{i+k=n} 1/(ik) = 2 H_{n-1}/n`.
pub fn harmonic_identity_sweep(max_n: usize) -> Result<(), usize> {
    let mut lcm = BigInt::one();
    let mut h = BigInt::zero(); // H_n · L
    let mut h2 = BigInt::zero(); // H_n^(2) · L²
    let mut g = BigInt::zero(); // G(n) · L²
    for n in 1..=max_n {
        let big_n = BigInt::from(n);
        let next = lcm.lcm(&big_n);
        let grow = &next / &lcm;
        if !grow.is_one() {
            let grow2 = &grow * &grow;
            h *= &grow;
            h2 *= &grow2;
            g *= &grow2;
            lcm = next;
        }
        let share = &lcm / &big_n; // L / n
        g += BigInt::from(2) * &h * &share;
        h += &share;
        h2 += &share * &share;
        if !(&g - &h * &h + &h2).is_zero() {
            return Err(n);
        }
    }
    Ok(())
}

/// Outcome of checking `∏ c_i >= exp(-H_n^(2) / (1 - H_n/n))` over a range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductBoundReport {
    pub max_n: usize,
    /// `n` values where the logarithm of the product fell below the bound.
    pub violations: Vec<usize>,
    /// Smallest `ln ∏c_i - bound` seen.
    pub min_margin: f64,
    /// Smallest `n` with `∏ c_i >= threshold`, confirmed in exact arithmetic.
    pub first_reaching_threshold: Option<usize>,
    /// Whether every larger `n` up to `max_n` stays above the threshold.
    pub stays_above: bool,
}

/// Sweeps `2 <= n <= max_n` in floating point (the logarithms are summed, so
/// the error is around 1e-12 against margins far larger) and settles the
/// threshold crossing exactly.
pub fn product_bound_sweep(max_n: usize, threshold: Rational) -> ProductBoundReport {
    let mut harmonic = vec![0.0f64; max_n + 1];
    let mut harmonic2 = vec![0.0f64; max_n + 1];
    for k in 1..=max_n {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
        harmonic2[k] = harmonic2[k - 1] + 1.0 / (k * k) as f64;
    }
    let log_threshold = threshold.as_f64().ln();
    let mut report = ProductBoundReport {
        max_n,
        violations: Vec::new(),
        min_margin: f64::INFINITY,
        first_reaching_threshold: None,
        stays_above: true,
    };
    let reaches_exactly = |n: usize| harmonic_constants(n).product() >= threshold;
    for n in 2..=max_n {
        let log_product: f64 = (1..=n).map(|i| (1.0 + (harmonic[n - i] - harmonic[n]) / i as f64).ln()).sum();
        let bound = -harmonic2[n] / (1.0 - harmonic[n] / n as f64);
        let margin = log_product - bound;
        report.min_margin = report.min_margin.min(margin);
        if margin < 0.0 {
            report.violations.push(n);
        }
        let gap = log_product - log_threshold;
        let above = if gap.abs() < 1e-9 { reaches_exactly(n) } else { gap > 0.0 };
        match report.first_reaching_threshold {
            None if above => report.first_reaching_threshold = Some(n),
            Some(_) if !above => report.stays_above = false,
            _ => {}
        }
    }
    if let Some(n) = report.first_reaching_threshold {
        // The float sweep found the crossing; confirm it without rounding.
        if !reaches_exactly(n) || (n > 1 && reaches_exactly(n - 1)) {
            report.first_reaching_threshold = None;
        }
    }
    report
}

/// Paired Monte Carlo estimate of `E[Π(AX)] - E[Π(BX)]`, where `B` moves
/// `eps` of weight in the first row from column `t` to column `s`.
pub fn perturbation_inequality_mc(
    a: &[Vec<f64>],
    s: usize,
    t: usize,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<EstimatorReport, RandomGamesError> {
    check_perturbation(a, s, t, eps)?;
    let cols = a[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = MeanAccumulator::default();
    let mut x = vec![0.0; cols];
    for _ in 0..samples {
        for v in x.iter_mut() {
            *v = exponential(&mut rng);
        }
        // Only the first row differs, by eps·(X_t - X_s).
        let rest: f64 = a[1..].iter().map(|row| row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>()).product();
        acc.push(eps * (x[t] - x[s]) * rest);
    }
    let exact = perturbation_difference_exact(
        &a.iter().map(|r| r.iter().map(|&v| Rational::from_f64_exact(v)).collect()).collect::<Vec<_>>(),
        s,
        t,
        &Rational::from_f64_exact(eps),
    );
    Ok(acc.report(seed, Some(exact.as_f64())))
}

fn check_perturbation(a: &[Vec<f64>], s: usize, t: usize, eps: f64) -> Result<(), RandomGamesError> {
    let fail = |m: &str| Err(RandomGamesError::Precondition(m.to_string()));
    if a.is_empty() || a[0].is_empty() || a.iter().any(|r| r.len() != a[0].len()) {
        return fail("matrix must be non-empty and rectangular");
    }
    let cols = a[0].len();
    if s >= cols || t >= cols || s == t {
        return fail("s and t must be distinct column indices");
    }
    if a.iter().flatten().any(|&v| v < 0.0) {
        return fail("entries must be non-negative");
    }
    if a.iter().any(|r| r[s] > r[t]) {
        return fail("column s must be dominated by column t");
    }
    if eps <= 0.0 || a[0][t] - eps < 0.0 {
        return fail("need eps > 0 and a[0][t] - eps >= 0");
    }
    Ok(())
}

/// `E[Π(AX)]` for i.i.d. unit exponentials, by expanding the product and
/// using `E[X^k] = k!`.
pub fn product_moment_exact(a: &[Vec<Rational>]) -> Rational {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    // Dynamic programme over rows, keyed by how often each column was used.
    let mut states: HashMap<Vec<u8>, Rational> = HashMap::from([(vec![0u8; cols], Rational::one())]);
    for row in a.iter().take(rows) {
        let mut next: HashMap<Vec<u8>, Rational> = HashMap::new();
        for (used, weight) in &states {
            for (j, w) in row.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let mut key = used.clone();
                key[j] += 1;
                *next.entry(key).or_insert_with(Rational::zero) += weight * w;
            }
        }
        states = next;
    }
    let factorial = |k: u8| (1..=k as i64).fold(Rational::one(), |acc, v| acc * Rational::from_ratio(v, 1));
    states
        .into_iter()
        .map(|(used, weight)| used.iter().fold(weight, |acc, &k| acc * factorial(k)))
        .fold(Rational::zero(), |acc, v| acc + v)
}

pub fn perturbation_difference_exact(a: &[Vec<Rational>], s: usize, t: usize, eps: &Rational) -> Rational {
    let mut b = a.to_vec();
    b[0][s] += eps;
    b[0][t] -= eps;
    product_moment_exact(a) - product_moment_exact(&b)
}

/// A random non-negative matrix whose column `s` is dominated by column `t`,
/// with `eps` chosen so the perturbation stays non-negative.
pub fn random_dominated_matrix(rng: &mut impl Rng) -> (Vec<Vec<f64>>, usize, usize, f64) {
    let rows = rng.random_range(1..=4);
    let cols = rng.random_range(2..=4);
    let s = rng.random_range(0..cols);
    let t = (s + rng.random_range(1..cols)) % cols;
    let mut a: Vec<Vec<f64>> =
        (0..rows).map(|_| (0..cols).map(|_| (rng.random_range(0..=16) as f64) / 8.0).collect()).collect();
    for row in a.iter_mut() {
        if row[s] > row[t] {
            row.swap(s, t);
        }
    }
    if a[0][t] == 0.0 {
        a[0][t] = 0.5;
    }
    let eps = a[0][t] * (rng.random_range(1..=4) as f64) / 4.0;
    (a, s, t, eps)
}

/// Assignment of each `k`-subset of `{1..n}` to a distinct `(n-k)`-subset
/// containing it. Subsets are bit masks, bit `i-1` for element `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneBijection {
    pub n: u32,
    pub k: u32,
    pub pairs: Vec<(u32, u32)>,
}

impl MonotoneBijection {
    /// Containment, sizes, injectivity and surjectivity.
    pub fn verify(&self) -> bool {
        let small = subsets_of_size(self.n, self.k);
        let large = subsets_of_size(self.n, self.n - self.k);
        let mut images: Vec<u32> = self.pairs.iter().map(|p| p.1).collect();
        images.sort_unstable();
        let mut sources: Vec<u32> = self.pairs.iter().map(|p| p.0).collect();
        sources.sort_unstable();
        sources == small && images == large && self.pairs.iter().all(|&(a, b)| a & b == a)
    }

    pub fn image(&self, subset: u32) -> Option<u32> {
        self.pairs.iter().find(|p| p.0 == subset).map(|p| p.1)
    }
}

/// Subsets of `{1..n}` of the given size, ascending as bit masks.
pub fn subsets_of_size(n: u32, size: u32) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() == size).collect()
}

/// Finds the bijection as a perfect matching in the containment graph.
pub fn monotone_bijection(n: u32, k: u32) -> Result<MonotoneBijection, RandomGamesError> {
    if k == 0 || 2 * k > n || n > 20 {
        return Err(RandomGamesError::Precondition(format!("need 0 < 2k <= n <= 20, got n={n}, k={k}")));
    }
    let left = subsets_of_size(n, k);
    let right = subsets_of_size(n, n - k);
    let index: HashMap<u32, usize> = right.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let adjacency: Vec<Vec<usize>> = left
        .iter()
        .map(|&a| right.iter().filter(|&&b| a & b == a).map(|b| index[b]).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; right.len()];
    for u in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(u, &adjacency, &mut owner, &mut seen) {
            return Err(RandomGamesError::Precondition(format!("no perfect matching for n={n}, k={k}")));
        }
    }
    let mut pairs: Vec<(u32, u32)> =
        owner.iter().enumerate().map(|(r, l)| (left[l.expect("perfect matching")], right[r])).collect();
    pairs.sort_unstable();
    Ok(MonotoneBijection { n, k, pairs })
}

fn augment(u: usize, adjacency: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adjacency[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].is_none_or(|w| augment(w, adjacency, owner, seen)) {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let a = random_instance(6, 3, GameVariant::OneWay1D, Objective::Maximize, 9);
        let b = random_instance(6, 3, GameVariant::OneWay1D, Objective::Maximize, 9);
        assert_eq!(a, b);
        let c = random_instance(6, 3, GameVariant::Voronoi2DTorus, Objective::Minimize, 9);
        assert_eq!(c, random_instance(6, 3, GameVariant::Voronoi2DTorus, Objective::Minimize, 9));
    }

    #[test]
    fn spacing_routes_basic() {
        for route in [SpacingRoute::SortUniforms, SpacingRoute::WeightedExponentials] {
            assert_eq!(sample_spacings(1, 3, route).arcs, vec![1.0]);
            let s = sample_spacings(7, 3, route);
            assert!((s.arcs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(s.arcs.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn harmonic_small_cases() {
        let h = harmonic_constants(3);
        let r = Rational::from_ratio;
        assert_eq!(h.coefficients, vec![r(2, 3), r(7, 12), r(7, 18)]);
        assert_eq!(h.sum(), r(59, 36));
        assert_eq!(h.sum(), r(3, 1) - r(49, 36));
        assert_eq!(h.product(), r(98, 648));
        let one = harmonic_constants(1);
        assert_eq!(one.coefficients, vec![Rational::zero()]);
        assert!(one.identity_holds());
        assert_eq!(harmonic_constants(2).product(), r(1, 8));
        for n in 1..30 {
            let h = harmonic_constants(n);
            assert!(h.identity_holds());
            for i in 1..=n {
                assert_eq!(h.coefficients[i - 1], coefficient_by_definition(n, i));
            }
        }
        assert_eq!(harmonic_identity_sweep(300), Ok(()));
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(min_game_lower_bound(4, 2), Rational::from_ratio(1, 14));
        let b = max_game_lower_bound(3, 2);
        assert_eq!(b, Rational::from_ratio(2 * 98, 648));
    }

    #[test]
    fn perturbation_exact_example() {
        let r = |v: i64| Rational::from_ratio(v, 1);
        let a = vec![vec![r(1), r(2)], vec![r(1), r(2)]];
        // E[(x+2y)^2] = 14 and E[(1.5x+1.5y)(x+2y)] = 13.5.
        assert_eq!(product_moment_exact(&a), r(14));
        assert_eq!(perturbation_difference_exact(&a, 0, 1, &Rational::from_ratio(1, 2)), Rational::from_ratio(1, 2));
        let same = vec![vec![r(1), r(1)], vec![r(3), r(3)]];
        assert!(perturbation_difference_exact(&same, 0, 1, &Rational::from_ratio(1, 4)).is_zero());
    }

    #[test]
    fn small_bijections() {
        let b = monotone_bijection(2, 1).unwrap();
        assert_eq!(b.pairs, vec![(0b01, 0b01), (0b10, 0b10)]);
        let b = monotone_bijection(3, 1).unwrap();
        assert!(b.verify());
        let b = monotone_bijection(4, 2).unwrap();
        assert!(b.pairs.iter().all(|(x, y)| x == y));
        assert!(monotone_bijection(3, 2).is_err());
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 0.2).collect();
        assert!(ks_two_sample(&a, &b).1 < 1e-6);
        assert!(ks_two_sample(&a, &a).1 > 0.99);
    }
}

//! A registry of numerical checks over the expectation routines and the
//! random-instance mathematics, reported one CSV row per comparison.

use std::io::Write;

use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::expectation::{
    expected_utility, oracle_expected_utility, random_distribution, random_rational_distribution,
    expected_utility_1d,
};
use crate::games::{GameVariant, Objective};
use crate::numeric::Rational;
use crate::randomgames::{
    beta_moment_table, chi_square_uniformity, harmonic_identity_sweep, independence_check, ks_two_sample,
    max_game_lower_bound, max_game_upper_bound, mean_pne_count, min_game_lower_bound, monotone_bijection,
    perturbation_difference_exact, perturbation_inequality_mc, product_bound_sweep, random_dominated_matrix,
    random_instance_with, sample_spacings_with, stable_first_choice_probability, stream_rng,
    SpacingRoute,
};

/// Identifies the column layout of check CSV files.
pub const CHECKS_SCHEMA: &str = "voronoi-choice checks v1";

/// Standard errors allowed between an estimate and its reference.
pub const SIGMAS: f64 = 3.0;

/// A deliberate defect, used to confirm the report notices it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the closed-form Beta moment.
    NegateBetaMoment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChecksConfig {
    pub seed: u64,
    /// Multiplies every sample count; 1.0 is the default desk size.
    pub scale: f64,
    pub fault: Option<Fault>,
}

impl ChecksConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, scale: 1.0, fault: None }
    }

    fn samples(&self, base: usize) -> usize {
        ((base as f64 * self.scale).round() as usize).max(10)
    }
}

/// One comparison: an estimate against an exact value or a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub estimate: f64,
    pub se: f64,
    pub reference: f64,
    /// Standard errors allowed, after adjusting for the size of the check.
    pub sigmas: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub rows: Vec<CheckRow>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.passed)
    }
}

/// Two-sided tail probability of a single `SIGMAS` comparison.
const SINGLE_ALPHA: f64 = 0.0027;

/// p-value floor for a single distribution test.
const SINGLE_P_FLOOR: f64 = 0.001;

/// Per-comparison level that keeps the chance of any false alarm among
/// `k` independent comparisons at `alpha`.
fn sidak(alpha: f64, k: usize) -> f64 {
    1.0 - (1.0 - alpha).powf(1.0 / k.max(1) as f64)
}

/// Number of standard errors matching a two-sided tail of `alpha`.
pub fn sigmas_for(alpha: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Threshold applied to each of `k` comparisons in one check; equals
/// `SIGMAS` for a single comparison.
pub fn family_sigmas(k: usize) -> f64 {
    if k <= 1 {
        SIGMAS
    } else {
        sigmas_for(sidak(SINGLE_ALPHA, k))
    }
}

#[derive(Debug, Clone, Copy)]
enum Test {
    Exact(bool),
    Near,
    AtMost,
    AtLeast,
    PValue,
}

struct Pending {
    n: Option<usize>,
    m: Option<usize>,
    estimate: f64,
    se: f64,
    reference: f64,
    samples: usize,
    test: Test,
}

struct Rows {
    name: &'static str,
    seed: u64,
    pending: Vec<Pending>,
}

impl Rows {
    fn new(name: &'static str, seed: u64) -> Self {
        Self { name, seed, pending: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    fn add(&mut self, n: Option<usize>, m: Option<usize>, estimate: f64, se: f64, reference: f64, samples: usize, test: Test) {
        self.pending.push(Pending { n, m, estimate, se, reference, samples, test });
    }

    fn exact(&mut self, n: Option<usize>, m: Option<usize>, value: f64, reference: f64, samples: usize, passed: bool) {
        self.add(n, m, value, 0.0, reference, samples, Test::Exact(passed));
    }

    fn done(self) -> CheckOutcome {
        let statistical = self.pending.iter().filter(|p| matches!(p.test, Test::Near | Test::AtMost | Test::AtLeast)).count();
        let p_tests = self.pending.iter().filter(|p| matches!(p.test, Test::PValue)).count();
        let k = family_sigmas(statistical);
        let p_floor = sidak(SINGLE_P_FLOOR, p_tests);
        let rows = self
            .pending
            .into_iter()
            .map(|p| {
                let (passed, sigmas) = match p.test {
                    Test::Exact(ok) => (ok, None),
                    Test::Near => ((p.estimate - p.reference).abs() <= k * p.se, Some(k)),
                    Test::AtMost => (p.estimate <= p.reference + k * p.se, Some(k)),
                    Test::AtLeast => (p.estimate >= p.reference - k * p.se, Some(k)),
                    Test::PValue => (p.estimate > p_floor, None),
                };
                let reference = if matches!(p.test, Test::PValue) { p_floor } else { p.reference };
                CheckRow {
                    check: self.name.to_string(),
                    n: p.n,
                    m: p.m,
                    estimate: p.estimate,
                    se: p.se,
                    reference,
                    sigmas,
                    samples: p.samples,
                    seed: self.seed,
                    passed,
                }
            })
            .collect();
        CheckOutcome { name: self.name, rows }
    }
}

pub const CHECK_NAMES: [&str; 14] = [
    "expectation-1d-oracle",
    "expectation-1d-exact",
    "expectation-2d-oracle",
    "instance-uniformity",
    "spacing-routes",
    "beta-moments",
    "independence",
    "first-choice-stability",
    "max-pne-bracket",
    "min-pne-bound",
    "harmonic-identity",
    "product-bound",
    "perturbation",
    "monotone-bijection",
];

/// Runs every registered check.
pub fn run_checks(config: &ChecksConfig) -> Vec<CheckOutcome> {
    CHECK_NAMES.iter().map(|name| run_check(name, config).expect("registered")).collect()
}

pub fn run_check(name: &str, config: &ChecksConfig) -> Option<CheckOutcome> {
    let seed = config.seed;
    Some(match name {
        "expectation-1d-oracle" => expectation_1d_oracle(config),
        "expectation-1d-exact" => expectation_1d_exact(config),
        "expectation-2d-oracle" => expectation_2d_oracle(config),
        "instance-uniformity" => {
            let mut rows = Rows::new("instance-uniformity", seed);
            let game = random_instance_with(1000, 2, GameVariant::Voronoi1D, Objective::Maximize, &mut stream_rng(seed, 0));
            let points: Vec<f64> =
                (0..1000).flat_map(|k| (0..2).map(move |c| (k, c))).map(|(k, c)| *game.circle_point(k, c)).collect();
            let (_, p) = chi_square_uniformity(&points, 20);
            rows.add(Some(1000), Some(2), p, 0.0, SINGLE_P_FLOOR, points.len(), Test::PValue);
            rows.done()
        }
        "spacing-routes" => {
            let mut rows = Rows::new("spacing-routes", seed);
            let samples = config.samples(20_000);
            for n in [2usize, 3, 5, 8] {
                let draw = |route, stream| {
                    let mut rng = stream_rng(seed, stream);
                    (0..samples).map(|_| sample_spacings_with(n, &mut rng, route).arcs).collect::<Vec<_>>()
                };
                let sorted = draw(SpacingRoute::SortUniforms, 2 * n as u64);
                let weighted = draw(SpacingRoute::WeightedExponentials, 2 * n as u64 + 1);
                for i in 0..n {
                    let a: Vec<f64> = sorted.iter().map(|s| s[i]).collect();
                    let b: Vec<f64> = weighted.iter().map(|s| s[i]).collect();
                    let (_, p) = ks_two_sample(&a, &b);
                    rows.add(Some(n), None, p, 0.0, SINGLE_P_FLOOR, samples, Test::PValue);
                }
            }
            rows.done()
        }
        "beta-moments" => {
            let mut rows = Rows::new("beta-moments", seed);
            let samples = config.samples(200_000);
            for (j, line) in beta_moment_table(10, 5, samples, seed).into_iter().enumerate() {
                for report in line {
                    let mut exact = report.reference.expect("closed form");
                    if config.fault == Some(Fault::NegateBetaMoment) {
                        exact = -exact;
                    }
                    if report.standard_error == 0.0 {
                        let ok = (report.estimate - exact).abs() < 1e-12;
                        rows.exact(Some(j + 1), None, report.estimate, exact, samples, ok);
                    } else {
                        rows.add(Some(j + 1), None, report.estimate, report.standard_error, exact, samples, Test::Near);
                    }
                }
            }
            rows.done()
        }
        "independence" => {
            let mut rows = Rows::new("independence", seed);
            let samples = config.samples(200_000);
            for n in [2usize, 4] {
                let report = independence_check(n, samples, seed);
                for c in &report.correlations {
                    rows.add(Some(n), None, c.estimate, c.standard_error, 0.0, samples, Test::Near);
                }
                for f in &report.factorizations {
                    let r = &f.report;
                    rows.add(Some(n), None, r.estimate, r.standard_error, r.reference.unwrap_or(f64::NAN), samples, Test::Near);
                }
            }
            rows.done()
        }
        "first-choice-stability" => {
            let mut rows = Rows::new("first-choice-stability", seed);
            let samples = config.samples(20_000);
            for (n, m) in [(3, 2), (3, 3), (5, 2), (5, 3)] {
                let r = stable_first_choice_probability(n, m, samples, seed);
                let bound = r.reference.expect("bound");
                rows.add(Some(n), Some(m), r.estimate, r.standard_error, bound, samples, Test::AtMost);
            }
            rows.done()
        }
        "max-pne-bracket" => {
            let mut rows = Rows::new("max-pne-bracket", seed);
            let instances = config.samples(500);
            for (n, m) in [(4, 2), (5, 2), (4, 3)] {
                let r = mean_pne_count(n, m, GameVariant::OneWay1D, Objective::Maximize, instances, seed)
                    .expect("small instances fit the budget");
                let low = max_game_lower_bound(n, m).to_f64().unwrap_or(0.0);
                let high = max_game_upper_bound(m);
                rows.add(Some(n), Some(m), r.estimate, r.standard_error, low, instances, Test::AtLeast);
                rows.add(Some(n), Some(m), r.estimate, r.standard_error, high, instances, Test::AtMost);
            }
            rows.done()
        }
        "min-pne-bound" => {
            let mut rows = Rows::new("min-pne-bound", seed);
            let instances = config.samples(500);
            for n in [4, 6] {
                let r = mean_pne_count(n, 2, GameVariant::OneWay1D, Objective::Minimize, instances, seed)
                    .expect("small instances fit the budget");
                let low = min_game_lower_bound(n, 2).to_f64().unwrap_or(0.0);
                rows.add(Some(n), Some(2), r.estimate, r.standard_error, low, instances, Test::AtLeast);
            }
            rows.done()
        }
        "harmonic-identity" => {
            let mut rows = Rows::new("harmonic-identity", seed);
            let max_n = 1000;
            let result = harmonic_identity_sweep(max_n);
            let first_bad = result.err().map(|n| n as f64).unwrap_or(0.0);
            rows.exact(Some(max_n), None, first_bad, 0.0, max_n, first_bad == 0.0);
            rows.done()
        }
        "product-bound" => {
            let mut rows = Rows::new("product-bound", seed);
            let max_n = 1000;
            let report = product_bound_sweep(max_n, Rational::new(19.into(), 100.into()));
            rows.exact(Some(max_n), None, report.violations.len() as f64, 0.0, max_n, report.violations.is_empty());
            let first = report.first_reaching_threshold.map(|n| n as f64).unwrap_or(f64::NAN);
            rows.exact(Some(max_n), None, first, 0.19, max_n, report.first_reaching_threshold.is_some() && report.stays_above);
            rows.done()
        }
        "perturbation" => {
            let mut rows = Rows::new("perturbation", seed);
            let samples = config.samples(100_000);
            let mut rng = stream_rng(seed, 0);
            for i in 0..10u64 {
                let (a, s, t, eps) = random_dominated_matrix(&mut rng);
                let r = perturbation_inequality_mc(&a, s, t, eps, samples, seed.wrapping_add(i)).expect("valid matrix");
                let exact = exact_difference(&a, s, t, eps);
                rows.add(Some(a.len()), Some(a[0].len()), r.estimate, r.standard_error, 0.0, samples, Test::AtLeast);
                rows.exact(Some(a.len()), Some(a[0].len()), exact, 0.0, 0, exact >= 0.0);
            }
            let same = vec![vec![1.0, 1.0], vec![0.5, 0.5]];
            let r = perturbation_inequality_mc(&same, 0, 1, 0.25, samples, seed).expect("valid matrix");
            rows.add(Some(2), Some(2), r.estimate, r.standard_error, 0.0, samples, Test::Near);
            rows.done()
        }
        "monotone-bijection" => {
            let mut rows = Rows::new("monotone-bijection", seed);
            for n in 2..=10u32 {
                for k in 1..=n / 2 {
                    let ok = monotone_bijection(n, k).map(|b| b.verify()).unwrap_or(false);
                    rows.exact(Some(n as usize), Some(k as usize), f64::from(u8::from(ok)), 1.0, 0, ok);
                }
            }
            rows.done()
        }
        _ => return None,
    })
}

fn exact_difference(a: &[Vec<f64>], s: usize, t: usize, eps: f64) -> f64 {
    let exact: Vec<Vec<Rational>> =
        a.iter().map(|row| row.iter().map(|&v| Rational::from_float(v).expect("finite")).collect()).collect();
    perturbation_difference_exact(&exact, s, t, &Rational::from_float(eps).expect("finite")).to_f64().unwrap_or(f64::NAN)
}

fn expectation_1d_oracle(config: &ChecksConfig) -> CheckOutcome {
    let mut rows = Rows::new("expectation-1d-oracle", config.seed);
    let mut rng = stream_rng(config.seed, 1);
    let instances = config.samples(100);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let variant = if rng.random_bool(0.5) { GameVariant::Voronoi1D } else { GameVariant::OneWay1D };
        let objective = if rng.random_bool(0.5) { Objective::Maximize } else { Objective::Minimize };
        let n = rng.random_range(1..=6);
        let m = rng.random_range(2..=3);
        let game = random_instance_with(n, m, variant, objective, &mut rng);
        let dist = random_distribution(&game.choice_counts(), &mut rng);
        for k in 0..n {
            let fast = expected_utility(&game, k, &dist).expect("valid input");
            let slow = oracle_expected_utility(&game, k, &dist).expect("small instance");
            worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
    }
    rows.exact(None, None, worst, 1e-9, instances, worst <= 1e-9);
    rows.done()
}

fn expectation_1d_exact(config: &ChecksConfig) -> CheckOutcome {
    let mut rows = Rows::new("expectation-1d-exact", config.seed);
    let mut rng = stream_rng(config.seed, 2);
    let instances = config.samples(30);
    let mut mismatches = 0usize;
    for _ in 0..instances {
        let variant = if rng.random_bool(0.5) { GameVariant::Voronoi1D } else { GameVariant::OneWay1D };
        let n = rng.random_range(1..=5);
        let game = random_instance_with(n, 2, variant, Objective::Maximize, &mut rng).to_rational();
        let dist = random_rational_distribution(&game.choice_counts(), &mut rng);
        for k in 0..n {
            let fast = expected_utility_1d(&game, k, &dist).expect("valid input");
            let slow = oracle_expected_utility(&game, k, &dist).expect("small instance");
            mismatches += usize::from(fast != slow);
        }
    }
    rows.exact(None, None, mismatches as f64, 0.0, instances, mismatches == 0);
    rows.done()
}

fn expectation_2d_oracle(config: &ChecksConfig) -> CheckOutcome {
    let mut rows = Rows::new("expectation-2d-oracle", config.seed);
    let mut rng = stream_rng(config.seed, 3);
    let instances = config.samples(10);
    for variant in [GameVariant::Voronoi2DSquare, GameVariant::Voronoi2DTorus] {
        let mut worst: f64 = 0.0;
        for _ in 0..instances {
            let n = rng.random_range(1..=4);
            let game = random_instance_with(n, 2, variant, Objective::Maximize, &mut rng);
            let dist = random_distribution(&game.choice_counts(), &mut rng);
            for k in 0..n {
                let fast = expected_utility(&game, k, &dist).expect("general position");
                let slow = oracle_expected_utility(&game, k, &dist).expect("small instance");
                worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
            }
        }
        rows.exact(None, Some(2), worst, 1e-7, instances, worst <= 1e-7);
    }
    rows.done()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    n: Option<usize>,
    m: Option<usize>,
    estimate: f64,
    se: f64,
    reference: f64,
    sigmas: Option<f64>,
    samples: usize,
    seed: u64,
    passed: bool,
}

/// Writes the versioned comment line and one row per comparison.
pub fn write_checks_csv(config: &ChecksConfig, outcomes: &[CheckOutcome], out: impl Write) -> Result<(), csv::Error> {
    let mut out = out;
    writeln!(out, "# {CHECKS_SCHEMA} seed={} scale={}", config.seed, config.scale)?;
    let mut writer = csv::Writer::from_writer(out);
    for row in outcomes.iter().flat_map(|o| &o.rows) {
        writer.serialize(CsvRow {
            check: &row.check,
            n: row.n,
            m: row.m,
            estimate: row.estimate,
            se: row.se,
            reference: row.reference,
            sigmas: row.sigmas,
            samples: row.samples,
            seed: row.seed,
            passed: row.passed,
        })?;
    }
    writer.flush()?;
    Ok(())
}

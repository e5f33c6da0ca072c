//! One line per acceptance criterion, written straight to stdout so that it
//! shows up even when the harness captures test output.

use std::cmp::Ordering;
use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::Rng;

use voronoi_choice::equilibrium::{enumerate_pne, random_profile, run_observed, DynamicsOptions};
use voronoi_choice::expectation::{
    expected_utility, expected_utility_2d, oracle_expected_utility, random_distribution,
    random_rational_distribution,
};
use voronoi_choice::experiment::{run_experiment, ExperimentConfig};
use voronoi_choice::hardness::{
    check_equivalence, small_formula_suite, unsatisfiable_formula, ReductionOptions, DEFAULT_SEARCH_BUDGET,
};
use voronoi_choice::randomgames::{
    beta_moment_table, harmonic_identity_sweep, independence_check, max_game_lower_bound, max_game_upper_bound,
    mean_pne_count, min_game_lower_bound, monotone_bijection, perturbation_inequality_mc, product_bound_sweep,
    random_dominated_matrix, random_instance_with, stable_first_choice_probability, stream_rng,
};
use voronoi_choice::{build_fig3_instance, potential_compare, ArcMultiset, GameInstance, GameVariant, Objective};
use voronoi_choice::{Rational, Scalar};

/// Fixed before the first run and never changed.
const SEED: u64 = 20_261_015;

const SIGMAS: f64 = 3.0;
const ORACLE_1D_TOLERANCE: f64 = 1e-9;
const ORACLE_2D_RATIONAL_TOLERANCE: f64 = 1e-9;
const ORACLE_2D_FLOAT_TOLERANCE: f64 = 1e-7;
const GRID: i64 = 1 << 20;

fn report(id: u32, title: &str, passed: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_time = elapsed <= budget;
    let status = if passed && in_time { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {id:02} {status} {title}: {detail} [{:.2?} of {:?}]\n",
        elapsed, budget
    );
    std::io::stdout().lock().write_all(line.as_bytes()).expect("stdout");
    assert!(passed, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} took {elapsed:.2?}, over {budget:?}");
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

#[test]
fn c01_circle_expected_utility_matches_oracle() {
    let start = Instant::now();
    let mut rng = stream_rng(SEED, 1);
    let mut worst: f64 = 0.0;
    let instances = 500;
    for i in 0..instances {
        let variant = if i % 2 == 0 { GameVariant::Voronoi1D } else { GameVariant::OneWay1D };
        let objective = if rng.random_bool(0.5) { Objective::Maximize } else { Objective::Minimize };
        let n = rng.random_range(1..=8);
        let m = rng.random_range(2..=3);
        let game = random_instance_with(n, m, variant, objective, &mut rng);
        let dist = random_distribution(&game.choice_counts(), &mut rng);
        for k in 0..n {
            let fast = expected_utility(&game, k, &dist).unwrap();
            let slow = oracle_expected_utility(&game, k, &dist).unwrap();
            worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
    }
    report(
        1,
        "1-D expected utility vs brute force",
        worst <= ORACLE_1D_TOLERANCE,
        start.elapsed(),
        minutes(1),
        &format!("{instances} instances, max |diff| = {worst:.3e} (tolerance {ORACLE_1D_TOLERANCE:e})"),
    )
}

/// A random planar instance with coordinates on a dyadic grid, so that the
/// float copy holds exactly the same points.
fn grid_instance(n: usize, variant: GameVariant, rng: &mut impl Rng) -> GameInstance<Rational> {
    loop {
        let game = random_instance_with(n, 2, variant, Objective::Maximize, rng);
        let players = (0..n)
            .map(|k| {
                (0..2)
                    .map(|c| {
                        let p = game.plane_point(k, c);
                        let snap = |v: f64| Rational::from_ratio((v * GRID as f64).floor() as i64, GRID);
                        voronoi_choice::PlanarPoint::new(snap(p.x), snap(p.y))
                    })
                    .collect()
            })
            .collect();
        if let Ok(g) = GameInstance::planar(variant, Objective::Maximize, players) {
            return g;
        }
    }
}

#[test]
fn c02_planar_expected_utility_matches_oracle() {
    let start = Instant::now();
    let mut rng = stream_rng(SEED, 2);
    let instances = 100;
    let mut worst_rational: f64 = 0.0;
    let mut worst_float: f64 = 0.0;
    for i in 0..instances {
        let variant = if i % 2 == 0 { GameVariant::Voronoi2DSquare } else { GameVariant::Voronoi2DTorus };
        let n = rng.random_range(1..=6);

        let exact = grid_instance(n, variant, &mut rng);
        let exact_dist = random_rational_distribution(&exact.choice_counts(), &mut rng);
        let game = exact.to_f64();
        let dist = exact_dist.to_f64();
        for k in 0..n {
            let fast = expected_utility_2d(&game, k, &dist).unwrap();
            let slow = oracle_expected_utility(&exact, k, &exact_dist).unwrap();
            worst_rational = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b.to_f64().unwrap()).abs())
                .fold(worst_rational, f64::max);
        }

        let game = random_instance_with(n, 2, variant, Objective::Maximize, &mut rng);
        let dist = random_distribution(&game.choice_counts(), &mut rng);
        for k in 0..n {
            let fast = expected_utility_2d(&game, k, &dist).unwrap();
            let slow = oracle_expected_utility(&game, k, &dist).unwrap();
            worst_float = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst_float, f64::max);
        }
    }
    report(
        2,
        "2-D expected utility vs brute force",
        worst_rational <= ORACLE_2D_RATIONAL_TOLERANCE && worst_float <= ORACLE_2D_FLOAT_TOLERANCE,
        start.elapsed(),
        minutes(10),
        &format!(
            "{instances} instances (square and torus), rational inputs max |diff| = {worst_rational:.3e} \
             (tolerance {ORACLE_2D_RATIONAL_TOLERANCE:e}), float max |diff| = {worst_float:.3e} \
             (tolerance {ORACLE_2D_FLOAT_TOLERANCE:e})"
        ),
    )
}

#[test]
fn c03_circle_dynamics_converge_and_potential_moves() {
    let start = Instant::now();
    let instances = 1000;
    let mut runs = 0usize;
    let mut converged = 0usize;
    let mut moves = 0usize;
    let mut bad_moves = 0usize;
    for n in [10usize, 100] {
        for (o, objective) in [Objective::Maximize, Objective::Minimize].into_iter().enumerate() {
            let expected = match objective {
                Objective::Maximize => Ordering::Greater,
                Objective::Minimize => Ordering::Less,
            };
            for i in 0..instances {
                let mut rng = stream_rng(SEED + 10 * n as u64 + o as u64, i);
                let m = 2 + i as usize % 2;
                let game = random_instance_with(n, m, GameVariant::Voronoi1D, objective, &mut rng);
                let initial = random_profile(&game, &mut rng);
                let options = DynamicsOptions { max_passes: 1_000_000, stop_on_cycle: false };
                let outcome = run_observed(&game, &initial, options, |mv| {
                    let before: Vec<f64> =
                        mv.board.choices().iter().enumerate().map(|(k, &c)| *game.circle_point(k, c)).collect();
                    let mut after = before.clone();
                    after[mv.player] = *game.circle_point(mv.player, mv.to);
                    let order = potential_compare(&ArcMultiset::from_points(&before), &ArcMultiset::from_points(&after));
                    moves += 1;
                    bad_moves += usize::from(order != expected);
                });
                runs += 1;
                converged += usize::from(outcome.converged());
            }
        }
    }
    report(
        3,
        "1-D Voronoi best response converges with a monotone potential",
        converged == runs && bad_moves == 0,
        start.elapsed(),
        minutes(5),
        &format!(
            "{converged}/{runs} runs converged (n in {{10, 100}}, both objectives); \
             {bad_moves} of {moves} improving moves broke the potential order"
        ),
    )
}

#[test]
fn c04_square_counterexample_has_no_equilibrium() {
    let start = Instant::now();
    let mut counts = Vec::new();
    for n in [3, 5] {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let game = build_fig3_instance(Rational::from_ratio(1, 64), n, objective).unwrap();
            counts.push((n, objective, enumerate_pne(&game).unwrap().len()));
        }
    }
    let detail = counts.iter().map(|(n, o, c)| format!("n={n} {o}: {c} PNE")).collect::<Vec<_>>().join(", ");
    report(
        4,
        "three-player square counterexample",
        counts.iter().all(|c| c.2 == 0),
        start.elapsed(),
        Duration::from_secs(1),
        &detail,
    )
}

#[test]
fn c05_max_game_equilibrium_count_bracket() {
    let start = Instant::now();
    let instances = 2000;
    let cells: Vec<(usize, usize)> = (4..=10).map(|n| (n, 2)).chain((4..=7).map(|n| (n, 3))).collect();
    let mut misses = Vec::new();
    let mut worst_sigma = f64::INFINITY;
    for (n, m) in cells.iter().copied() {
        let r = mean_pne_count(n, m, GameVariant::OneWay1D, Objective::Maximize, instances, SEED).unwrap();
        let low = max_game_lower_bound(n, m).to_f64().unwrap();
        let high = max_game_upper_bound(m);
        if !(r.at_least(low, SIGMAS) && r.at_most(high, SIGMAS)) {
            misses.push(format!("(n={n}, m={m}): {:.4} not in [{low:.4}, {high}]", r.estimate));
        }
        let margin = ((r.estimate - low) / r.standard_error).min((high - r.estimate) / r.standard_error);
        worst_sigma = worst_sigma.min(margin);
    }
    report(
        5,
        "expected equilibrium count, max game",
        misses.is_empty(),
        start.elapsed(),
        minutes(15),
        &format!(
            "{} cells x {instances} instances, closest approach {worst_sigma:.2} SE inside a bound{}",
            cells.len(),
            if misses.is_empty() { String::new() } else { format!("; misses: {}", misses.join("; ")) }
        ),
    )
}

#[test]
fn c06_first_choices_rarely_stable() {
    let start = Instant::now();
    let samples = 100_000;
    let mut misses = Vec::new();
    let mut cells = 0;
    for n in [3usize, 5, 8] {
        for m in [2usize, 3] {
            let r = stable_first_choice_probability(n, m, samples, SEED.wrapping_add(10 * n as u64 + m as u64));
            let bound = r.reference.unwrap();
            if !r.at_most(bound, SIGMAS) {
                misses.push(format!("(n={n}, m={m}): {:.5} > {bound:.5}", r.estimate));
            }
            cells += 1;
        }
    }
    report(
        6,
        "first choices stable at most 1/m^(n-1)",
        misses.is_empty(),
        start.elapsed(),
        minutes(5),
        &format!("{cells} cells x {samples} samples{}", if misses.is_empty() { String::new() } else { format!("; misses: {}", misses.join("; ")) }),
    )
}

#[test]
fn c07_min_game_equilibrium_count_bound() {
    let start = Instant::now();
    let instances = 2000;
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [4usize, 6, 8] {
        let r = mean_pne_count(n, 2, GameVariant::OneWay1D, Objective::Minimize, instances, SEED).unwrap();
        let low = min_game_lower_bound(n, 2).to_f64().unwrap();
        ok &= r.at_least(low, SIGMAS);
        lines.push(format!("n={n}: {:.4} (SE {:.4}) vs {low:.4}", r.estimate, r.standard_error));
    }
    report(
        7,
        "expected equilibrium count, one-way min game",
        ok,
        start.elapsed(),
        minutes(10),
        &format!("{instances} instances each, {}", lines.join(", ")),
    )
}

#[test]
fn c08_beta_moments_and_independence() {
    let start = Instant::now();
    let samples = 1_000_000;
    let table = beta_moment_table(10, 5, samples, SEED);
    let moments: Vec<_> = table.iter().flatten().collect();
    let moment_misses = moments.iter().filter(|r| !r.agrees(SIGMAS)).count();
    let worst_moment = moments
        .iter()
        .filter(|r| r.standard_error > 0.0)
        .map(|r| (r.estimate - r.reference.unwrap()).abs() / r.standard_error)
        .fold(0.0, f64::max);
    let mut factorizations = 0;
    let mut factor_misses = 0;
    for n in [2usize, 4] {
        let r = independence_check(n, samples, SEED.wrapping_add(n as u64));
        factorizations += r.factorizations.len();
        factor_misses += r.factorizations.iter().filter(|f| !f.report.agrees(SIGMAS)).count();
    }
    report(
        8,
        "ratio moments j/(j+t) and factorization",
        moment_misses == 0 && factor_misses == 0,
        start.elapsed(),
        minutes(5),
        &format!(
            "{} moments, {moment_misses} outside 3 SE (worst {worst_moment:.2} SE); \
             {factor_misses} of {factorizations} factorizations outside 3 SE; {samples} samples",
            moments.len()
        ),
    )
}

#[test]
fn c09_harmonic_identity_and_product_bound() {
    let start = Instant::now();
    let max_n = 10_000;
    let identity = harmonic_identity_sweep(max_n);
    let bound = product_bound_sweep(max_n, Rational::from_ratio(19, 100));
    let first = bound.first_reaching_threshold;
    report(
        9,
        "coefficient sum identity and product bound",
        identity.is_ok() && bound.violations.is_empty() && first.is_some(),
        start.elapsed(),
        minutes(1),
        &format!(
            "identity exact for n <= {max_n}: {}; product bound violations: {}; \
             smallest n with prod c_i >= 0.19: {} (stays above to {max_n}: {})",
            identity.is_ok(),
            bound.violations.len(),
            first.map(|n| n.to_string()).unwrap_or_else(|| "none".into()),
            bound.stays_above
        ),
    )
}

#[test]
fn c10_perturbation_inequality() {
    let start = Instant::now();
    let samples = 1_000_000;
    let mut rng = stream_rng(SEED, 10);
    let mut misses = 0;
    let mut worst: f64 = f64::INFINITY;
    let matrices = 50;
    for i in 0..matrices {
        let (a, s, t, eps) = random_dominated_matrix(&mut rng);
        let r = perturbation_inequality_mc(&a, s, t, eps, samples, SEED.wrapping_add(i)).unwrap();
        misses += usize::from(!r.at_least(0.0, SIGMAS));
        worst = worst.min(r.estimate / r.standard_error.max(f64::MIN_POSITIVE));
    }
    let same = vec![vec![1.0, 1.0], vec![0.5, 0.5]];
    let equal = perturbation_inequality_mc(&same, 0, 1, 0.25, samples, SEED).unwrap();
    let equal_ok = equal.estimate.abs() <= SIGMAS * equal.standard_error;
    report(
        10,
        "perturbing a dominated column",
        misses == 0 && equal_ok,
        start.elapsed(),
        minutes(5),
        &format!(
            "{misses} of {matrices} matrices below -3 SE (lowest {worst:.2} SE); \
             equality case {:.2e} with SE {:.2e}",
            equal.estimate, equal.standard_error
        ),
    )
}

#[test]
fn c11_monotone_bijections() {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = Vec::new();
    for n in 2..=10u32 {
        for k in 1..=n / 2 {
            cases += 1;
            if !monotone_bijection(n, k).map(|b| b.verify()).unwrap_or(false) {
                failures.push(format!("(n={n}, k={k})"));
            }
        }
    }
    report(
        11,
        "k-subsets map into containing (n-k)-subsets",
        failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(1),
        &format!("{cases} cases, failures: [{}]", failures.join(", ")),
    )
}

#[test]
fn c12_reduction_matches_satisfiability() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut formulas = small_formula_suite();
    if !formulas.contains(&unsatisfiable_formula()) {
        formulas.push(unsatisfiable_formula());
    }
    for f in &formulas {
        let r = check_equivalence(f, &ReductionOptions::default(), DEFAULT_SEARCH_BUDGET).unwrap();
        ok &= r.agree && r.extracted_valid != Some(false) && r.completion_is_pne != Some(false);
        lines.push(format!(
            "k={} l={} sat={} pne={} nodes={}",
            f.variables(),
            f.clause_count(),
            r.sat_exists,
            r.pne_exists,
            r.nodes
        ));
    }
    report(
        12,
        "equilibria exist exactly for satisfiable formulas",
        ok,
        start.elapsed(),
        minutes(30),
        &lines.join("; "),
    )
}

fn band(p: f64, trials: usize) -> (f64, f64) {
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    (p - SIGMAS * sd, p + SIGMAS * sd)
}

#[test]
fn c13_desk_scale_replication() {
    let start = Instant::now();
    let instances = 200;
    let mut ok = true;
    let mut lines = Vec::new();

    let config = ExperimentConfig {
        ns: vec![10, 100],
        ms: vec![2],
        instances,
        attempts: 100,
        max_passes: 1000,
        seed: SEED,
        ..ExperimentConfig::desk(GameVariant::OneWay1D, Objective::Maximize)
    };
    for (cell, published) in run_experiment(&config).unwrap().iter().zip([0.668, 0.609]) {
        let f = cell.fraction_within(100).unwrap();
        let (low, high) = band(published, instances);
        ok &= (low..=high).contains(&f);
        lines.push(format!("one-way max n={}: {f:.3} in [{low:.3}, {high:.3}]", cell.n));
    }

    for variant in [GameVariant::Voronoi2DTorus, GameVariant::Voronoi2DSquare] {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let config = ExperimentConfig {
                ns: vec![10, 100],
                ms: vec![2, 3],
                instances,
                attempts: 10,
                max_passes: 1000,
                seed: SEED,
                ..ExperimentConfig::desk(variant, objective)
            };
            let results = run_experiment(&config).unwrap();
            let lowest = results.iter().map(|c| c.fraction_within(10).unwrap()).fold(1.0, f64::min);
            if variant == GameVariant::Voronoi2DTorus {
                ok &= lowest >= 0.95;
                lines.push(format!("{variant} {objective}: lowest fraction {lowest:.3} (need >= 0.95)"));
            } else {
                lines.push(format!("{variant} {objective}: lowest fraction {lowest:.3} (not gated)"));
            }
        }
    }
    report(13, "desk-scale best-response experiments", ok, start.elapsed(), minutes(60), &lines.join("; "))
}

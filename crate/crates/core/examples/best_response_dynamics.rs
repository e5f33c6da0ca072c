//! Best response on random circle instances: always converges on the
//! two-sided game, often fails on the one-way game.

use voronoi_choice::equilibrium::{multi_start_search, random_profile, run_observed, DynamicsOptions};
use voronoi_choice::randomgames::{random_instance, stream_rng};
use voronoi_choice::{potential_compare, ArcMultiset, GameVariant, Objective};

fn main() {
    let seed = 11;
    let game = random_instance(50, 3, GameVariant::Voronoi1D, Objective::Maximize, seed);
    let start = random_profile(&game, &mut stream_rng(seed, 1));
    let outcome = run_observed(&game, &start, DynamicsOptions::new(10_000), |mv| {
        let mut points: Vec<f64> = mv.board.choices().iter().enumerate().map(|(k, &c)| *game.circle_point(k, c)).collect();
        let before = ArcMultiset::from_points(&points);
        points[mv.player] = *game.circle_point(mv.player, mv.to);
        assert_eq!(potential_compare(&before, &ArcMultiset::from_points(&points)), std::cmp::Ordering::Greater);
    });
    println!(
        "1-D Voronoi, n=50, m=3: {:?} after {} passes and {} moves",
        outcome.status, outcome.passes, outcome.moves
    );
    let arcs = |p: &voronoi_choice::StrategyProfile| ArcMultiset::of_profile(&game, p).arcs()[..3].to_vec();
    println!("three largest arcs: {:.4?} at the start, {:.4?} at the end", arcs(&start), arcs(&outcome.profile));

    let mut solved = 0;
    for i in 0..100 {
        let game = random_instance(20, 2, GameVariant::OneWay1D, Objective::Maximize, seed + i);
        if multi_start_search(&game, 20, 1000, i).converged() {
            solved += 1;
        }
    }
    println!("one-way max, n=20, m=2: {solved}/100 instances solved within 20 starts");
}

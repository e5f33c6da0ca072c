//! Expected arc lengths under independent mixed strategies, checked against
//! enumeration of every profile, in floats and in exact rationals.

use voronoi_choice::expectation::{
    expected_utility, oracle_expected_utility, random_distribution, random_rational_distribution,
};
use voronoi_choice::randomgames::{random_instance_with, stream_rng};
use voronoi_choice::{GameVariant, Objective};

fn main() {
    let mut rng = stream_rng(3, 0);
    for variant in [GameVariant::Voronoi1D, GameVariant::OneWay1D] {
        let game = random_instance_with(6, 3, variant, Objective::Maximize, &mut rng);
        let dist = random_distribution(&game.choice_counts(), &mut rng);
        let fast = expected_utility(&game, 0, &dist).unwrap();
        let slow = oracle_expected_utility(&game, 0, &dist).unwrap();
        println!("{variant}: player 0 expects {fast:.6?}");
        println!("{:>w$}  enumeration {slow:.6?}", "", w = variant.name().len());

        let exact = game.to_rational();
        let exact_dist = random_rational_distribution(&exact.choice_counts(), &mut rng);
        let fast = voronoi_choice::expectation::expected_utility_1d(&exact, 0, &exact_dist).unwrap();
        let slow = oracle_expected_utility(&exact, 0, &exact_dist).unwrap();
        println!("  exact agreement on candidate 0: {}", fast[0] == slow[0]);
    }
}

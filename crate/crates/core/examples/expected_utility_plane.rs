//! Expected Voronoi cell area in the square and on the torus, split into
//! angular sectors around the candidate.

use voronoi_choice::expectation::{expected_utility_2d, oracle_expected_utility, random_distribution, sector_decomposition};
use voronoi_choice::randomgames::{random_instance_with, stream_rng};
use voronoi_choice::{GameVariant, Objective};

fn main() {
    let mut rng = stream_rng(5, 0);
    for variant in [GameVariant::Voronoi2DSquare, GameVariant::Voronoi2DTorus] {
        let game = random_instance_with(5, 2, variant, Objective::Maximize, &mut rng);
        let dist = random_distribution(&game.choice_counts(), &mut rng);
        let sectors = sector_decomposition(&game, 0, 0).unwrap();
        let fast = expected_utility_2d(&game, 0, &dist).unwrap();
        let slow = oracle_expected_utility(&game, 0, &dist).unwrap();
        println!("{variant}: {} sectors around player 0's first candidate", sectors.sectors());
        for (c, (a, b)) in fast.iter().zip(&slow).enumerate() {
            println!("  candidate {c}: {a:.9} (enumeration {b:.9})");
        }
    }
}

//! Instances and mixed strategies as JSON, with exact values preserved.

use voronoi_choice::expectation::{expected_utility_1d, ProductDistribution};
use voronoi_choice::io::{read_distribution, read_instance, write_distribution, write_instance};
use voronoi_choice::{GameInstance, GameVariant, Objective, Rational, Scalar};

fn main() {
    let r = Rational::from_ratio;
    let game = GameInstance::circle(
        GameVariant::OneWay1D,
        Objective::Maximize,
        vec![vec![r(0, 1), r(1, 3)], vec![r(1, 2), r(5, 7)], vec![r(3, 4)]],
    )
    .unwrap();
    let text = write_instance(&game, Some(42));
    println!("{text}");
    let back = read_instance(&text).unwrap();
    assert_eq!(back.game, game);

    let dist = ProductDistribution::new(&game, vec![vec![r(1, 4), r(3, 4)], vec![r(1, 2), r(1, 2)], vec![r(1, 1)]]).unwrap();
    let dist_text = write_distribution(&dist);
    println!("{dist_text}");
    let dist = read_distribution(&dist_text, &game.choice_counts()).unwrap();
    for k in 0..game.players() {
        let values: Vec<String> = expected_utility_1d(&game, k, &dist).unwrap().iter().map(Scalar::render).collect();
        println!("player {k}: {}", values.join(", "));
    }
}

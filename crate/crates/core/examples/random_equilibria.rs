//! Average number of pure equilibria of random one-way games against the
//! proven bounds.

use num_traits::ToPrimitive;
use voronoi_choice::randomgames::{
    max_game_lower_bound, max_game_upper_bound, mean_pne_count, min_game_lower_bound, stable_first_choice_probability,
};
use voronoi_choice::{GameVariant, Objective};

fn main() {
    let seed = 9;
    println!("max game, 1000 instances per row");
    for (n, m) in [(4, 2), (6, 2), (8, 2), (4, 3), (6, 3)] {
        let r = mean_pne_count(n, m, GameVariant::OneWay1D, Objective::Maximize, 1000, seed).unwrap();
        let low = max_game_lower_bound(n, m).to_f64().unwrap();
        println!(
            "  n={n} m={m}: {:.3} +- {:.3}, bounds [{low:.3}, {}]",
            r.estimate,
            r.standard_error,
            max_game_upper_bound(m)
        );
    }
    println!("min game, m=2");
    for n in [4, 6, 8] {
        let r = mean_pne_count(n, 2, GameVariant::OneWay1D, Objective::Minimize, 1000, seed).unwrap();
        println!("  n={n}: {:.3} +- {:.3}, at least {:.4}", r.estimate, r.standard_error, min_game_lower_bound(n, 2).to_f64().unwrap());
    }
    let r = stable_first_choice_probability(5, 2, 50_000, seed);
    println!("first choices stable, n=5 m=2: {:.5} vs bound {:.5}", r.estimate, r.reference.unwrap());
}

//! The three-player square instance with no pure equilibrium, and the cycle
//! best response falls into on it.

use voronoi_choice::equilibrium::{enumerate_pne, run_best_response_traced};
use voronoi_choice::{build_fig3_instance, Objective, Rational, Scalar, StrategyProfile};

fn main() {
    let eps = Rational::from_ratio(1, 64);
    for players in [3, 5] {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let game = build_fig3_instance(eps.clone(), players, objective).expect("valid epsilon");
            let found = enumerate_pne(&game).expect("small instance");
            println!("n={players} {objective}: {} pure equilibria over {} profiles", found.len(), game.profile_count().unwrap());
        }
    }

    let game = build_fig3_instance(eps, 3, Objective::Maximize).expect("valid epsilon");
    let (outcome, trace) = run_best_response_traced(&game, &StrategyProfile::first_choices(3), 4);
    println!("\nbest response from (0, 0, 0), {} passes, converged: {}", outcome.passes, outcome.converged());
    for e in trace {
        println!("  pass {} player {} moves {} -> {} ({:.6} -> {:.6})", e.pass, e.player, e.from, e.to, e.old_utility, e.new_utility);
    }
}

//! From a 1-in-3 formula to a one-way game whose equilibria are the
//! satisfying assignments.

use voronoi_choice::hardness::{
    build_game, check_equivalence, complete_from_witness, search_pne, solve_1in3, unsatisfiable_formula,
    Monotone1in3Formula, ReductionOptions, DEFAULT_SEARCH_BUDGET,
};

fn main() {
    let formula = Monotone1in3Formula::parse("1 2 3\n3 4 5\n").expect("valid formula");
    let tagged = build_game(&formula, &ReductionOptions::default()).unwrap();
    println!("{} players, d = {}, eps = {}", tagged.game().players(), tagged.d(), tagged.eps());
    for (role, count) in tagged.census() {
        println!("  {role}: {count}");
    }
    let witnesses = solve_1in3(&formula).unwrap();
    println!("{} satisfying assignments", witnesses.len());
    let completion = complete_from_witness(&tagged, &witnesses[0]).unwrap();
    println!("completing {:?}: equilibrium {}", witnesses[0].true_variables(), completion.is_pne);
    let search = search_pne(&tagged, DEFAULT_SEARCH_BUDGET).unwrap();
    let assignment = search.profile.as_ref().and_then(|p| tagged.assignment_from_profile(p));
    println!("search found {:?} in {} nodes", assignment.map(|w| w.true_variables()), search.nodes);

    let report = check_equivalence(&unsatisfiable_formula(), &ReductionOptions::default(), DEFAULT_SEARCH_BUDGET).unwrap();
    println!("\nunsatisfiable formula: equilibrium {} after {} nodes, agree {}", report.pne_exists, report.nodes, report.agree);
}

//! A small best-response experiment written as CSV.

use voronoi_choice::experiment::{run_experiment, write_csv, ExperimentConfig};
use voronoi_choice::{GameVariant, Objective};

fn main() {
    let config = ExperimentConfig {
        ns: vec![10, 30],
        ms: vec![2, 3],
        instances: 100,
        attempts: 20,
        seed: 2024,
        ..ExperimentConfig::desk(GameVariant::OneWay1D, Objective::Maximize)
    };
    let results = run_experiment(&config).unwrap();
    write_csv(&config, &results, std::io::stdout().lock()).unwrap();
    for cell in &results {
        eprintln!("n={} m={}: {:.2} solved on the first start", cell.n, cell.m, cell.fraction_within(1).unwrap());
    }
}

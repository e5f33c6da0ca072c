//! Repeated best-response experiments on random instances, tallied as the
//! number of instances solved within 1, 2, 5, 10 and 100 random starts.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::equilibrium::{multi_start_search_with, SearchOptions};
use crate::games::{GameVariant, Objective};
use crate::randomgames::{random_instance_with, stream_rng};

/// Identifies the column layout of experiment CSV files.
pub const EXPERIMENT_SCHEMA: &str = "voronoi-choice experiment v1";

pub const ATTEMPT_THRESHOLDS: [usize; 5] = [1, 2, 5, 10, 100];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub variant: GameVariant,
    pub objective: Objective,
    pub ns: Vec<usize>,
    pub ms: Vec<usize>,
    pub instances: usize,
    pub attempts: usize,
    pub max_passes: usize,
    pub seed: u64,
    /// Threads used to run cells; results do not depend on it.
    pub workers: usize,
}

impl ExperimentConfig {
    /// Sizes that finish in minutes on one core: 200 instances, n up to 100
    /// on the circle and up to 50 in the plane.
    pub fn desk(variant: GameVariant, objective: Objective) -> Self {
        let planar = !variant.is_circle();
        Self {
            variant,
            objective,
            ns: if planar { vec![10, 50] } else { vec![10, 100] },
            ms: vec![2, 3],
            instances: 200,
            attempts: if planar { 10 } else { 100 },
            max_passes: 1000,
            seed: 0,
            workers: default_workers(),
        }
    }

    /// The published grid: 1000 instances per cell, up to 100 starts on the
    /// circle and 10 in the plane.
    pub fn paper_scale(variant: GameVariant, objective: Objective) -> Self {
        let planar = !variant.is_circle();
        Self {
            ns: if planar { vec![10, 100, 1000] } else { vec![10, 100, 1000, 10000] },
            ms: vec![2, 3, 4],
            instances: 1000,
            ..Self::desk(variant, objective)
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |what: &str| Err(ExperimentError::Config(what.to_string()));
        if self.ns.is_empty() || self.ns.contains(&0) {
            return bad("every n must be at least 1");
        }
        if self.ms.is_empty() || self.ms.contains(&0) {
            return bad("every m must be at least 1");
        }
        if self.attempts == 0 {
            return bad("attempts must be at least 1");
        }
        if self.max_passes == 0 {
            return bad("passes must be at least 1");
        }
        Ok(())
    }

    /// Thresholds reported for this configuration.
    pub fn thresholds(&self) -> Vec<usize> {
        let mut out: Vec<usize> = ATTEMPT_THRESHOLDS.iter().copied().filter(|&t| t < self.attempts).collect();
        out.push(self.attempts);
        out
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Tallies for one `(n, m)` cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellResult {
    pub n: usize,
    pub m: usize,
    pub instances: usize,
    /// `(threshold, instances solved within that many starts)`.
    pub successes: Vec<(usize, usize)>,
    /// Most passes any successful run needed.
    pub max_passes: Option<usize>,
}

impl CellResult {
    pub fn successes_within(&self, threshold: usize) -> Option<usize> {
        self.successes.iter().find(|(t, _)| *t == threshold).map(|&(_, s)| s)
    }

    pub fn fraction_within(&self, threshold: usize) -> Option<f64> {
        self.successes_within(threshold).map(|s| s as f64 / self.instances.max(1) as f64)
    }
}

/// SplitMix64 finalizer, used to give every cell its own seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn cell_seed(seed: u64, n: usize, m: usize) -> u64 {
    mix(mix(mix(seed) ^ n as u64) ^ m as u64)
}

/// Runs one cell. Instance `i` draws its points and its starting profiles
/// from stream `i` of the cell's generator.
pub fn run_cell(config: &ExperimentConfig, n: usize, m: usize) -> CellResult {
    let thresholds = config.thresholds();
    let mut counts = vec![0usize; thresholds.len()];
    let mut max_passes = None;
    let base = cell_seed(config.seed, n, m);
    for i in 0..config.instances {
        let mut rng = stream_rng(base, i as u64);
        let game = random_instance_with(n, m, config.variant, config.objective, &mut rng);
        let outcome = multi_start_search_with(&game, SearchOptions::new(config.attempts, config.max_passes), &mut rng);
        if outcome.converged() {
            for (t, count) in thresholds.iter().zip(counts.iter_mut()) {
                if outcome.attempts <= *t {
                    *count += 1;
                }
            }
            max_passes = max_passes.max(Some(outcome.passes));
        }
    }
    CellResult { n, m, instances: config.instances, successes: thresholds.into_iter().zip(counts).collect(), max_passes }
}

/// Runs every `(n, m)` cell, spread over `config.workers` threads, and
/// returns them sorted by `(n, m)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<CellResult>, ExperimentError> {
    config.validate()?;
    let cells: Vec<(usize, usize)> =
        config.ns.iter().flat_map(|&n| config.ms.iter().map(move |&m| (n, m))).collect();
    let workers = config.workers.clamp(1, cells.len().max(1));
    let mut results: Vec<CellResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let mine: Vec<(usize, usize)> = cells.iter().copied().skip(w).step_by(workers).collect();
                scope.spawn(move || mine.into_iter().map(|(n, m)| run_cell(config, n, m)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    results.sort_by_key(|c| (c.n, c.m));
    Ok(results)
}

#[derive(Serialize)]
struct Row<'a> {
    variant: &'a str,
    objective: &'a str,
    n: usize,
    m: usize,
    instances: usize,
    attempts_threshold: usize,
    successes: usize,
    max_passes: String,
    seed: u64,
}

/// Writes the versioned comment line, the column header and one row per
/// cell and threshold.
pub fn write_csv(config: &ExperimentConfig, results: &[CellResult], out: impl Write) -> Result<(), ExperimentError> {
    let mut out = out;
    writeln!(
        out,
        "# {EXPERIMENT_SCHEMA} variant={} objective={} instances={} attempts={} passes={} seed={}",
        config.variant, config.objective, config.instances, config.attempts, config.max_passes, config.seed
    )?;
    let mut writer = csv::Writer::from_writer(out);
    let header_only = results.iter().all(|c| c.instances == 0);
    if header_only {
        writer.write_record([
            "variant",
            "objective",
            "n",
            "m",
            "instances",
            "attempts_threshold",
            "successes",
            "max_passes",
            "seed",
        ])?;
    }
    for cell in results.iter().filter(|c| c.instances > 0) {
        for &(threshold, successes) in &cell.successes {
            writer.serialize(Row {
                variant: config.variant.name(),
                objective: config.objective.name(),
                n: cell.n,
                m: cell.m,
                instances: cell.instances,
                attempts_threshold: threshold,
                successes,
                max_passes: cell.max_passes.map(|p| p.to_string()).unwrap_or_default(),
                seed: config.seed,
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(variant: GameVariant) -> ExperimentConfig {
        ExperimentConfig {
            ns: vec![5, 8],
            ms: vec![2],
            instances: 20,
            attempts: 5,
            seed: 3,
            ..ExperimentConfig::desk(variant, Objective::Maximize)
        }
    }

    fn csv_text(config: &ExperimentConfig) -> String {
        let results = run_experiment(config).unwrap();
        let mut buf = Vec::new();
        write_csv(config, &results, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn voronoi_1d_always_converges() {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let config = ExperimentConfig { objective, ..small(GameVariant::Voronoi1D) };
            for cell in run_experiment(&config).unwrap() {
                assert_eq!(cell.successes_within(5), Some(20));
            }
        }
    }

    #[test]
    fn output_is_reproducible_and_independent_of_workers() {
        let config = small(GameVariant::OneWay1D);
        let text = csv_text(&config);
        assert_eq!(text, csv_text(&ExperimentConfig { workers: 1, ..config.clone() }));
        assert_eq!(text, csv_text(&ExperimentConfig { workers: 3, ..config.clone() }));
        assert!(text.starts_with("# voronoi-choice experiment v1"));
        assert_eq!(text.lines().count(), 2 + 2 * 3);
        assert!(text.lines().nth(2).unwrap().ends_with(",3"));
    }

    #[test]
    fn thresholds_are_monotone() {
        for cell in run_experiment(&small(GameVariant::OneWay1D)).unwrap() {
            let counts: Vec<usize> = cell.successes.iter().map(|&(_, s)| s).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(cell.successes.iter().map(|&(t, _)| t).collect::<Vec<_>>(), vec![1, 2, 5]);
        }
    }

    #[test]
    fn zero_instances_give_an_empty_table() {
        let config = ExperimentConfig { instances: 0, ..small(GameVariant::OneWay1D) };
        let text = csv_text(&config);
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let config = ExperimentConfig { attempts: 0, ..small(GameVariant::OneWay1D) };
        assert!(run_experiment(&config).is_err());
        let config = ExperimentConfig { ns: vec![0], ..small(GameVariant::OneWay1D) };
        assert!(run_experiment(&config).is_err());
    }
}

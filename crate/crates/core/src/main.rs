use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use voronoi_choice::checks::{run_check, run_checks, write_checks_csv, ChecksConfig, Fault, CHECK_NAMES};
use voronoi_choice::equilibrium::{
    enumerate_pne_within, find_pne_one_way, run_best_response_traced, EquilibriumError, DEFAULT_ENUMERATION_BUDGET,
};
use voronoi_choice::expectation::{expected_utility, expected_utility_1d};
use voronoi_choice::experiment::{run_experiment, write_csv, ExperimentConfig};
use voronoi_choice::hardness::{build_game, Monotone1in3Formula, ReductionOptions};
use voronoi_choice::io::{read_distribution, read_instance, write_instance, write_roles};
use voronoi_choice::{GameVariant, Objective, Rational, Scalar, StrategyProfile};

#[derive(Parser)]
#[command(name = "voronoi-choice", version, about = "Voronoi choice games: equilibria, expectations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Best-response success counts on random instances, as CSV.
    Experiment(ExperimentArgs),
    /// Run the registered numerical checks.
    Checks(ChecksArgs),
    /// Build the equilibrium game for a 1-in-3 SAT formula.
    Reduce(ReduceArgs),
    /// List the pure equilibria of an instance.
    Pne(PneArgs),
    /// Expected utilities under a product distribution.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value = "one-way")]
    variant: GameVariant,
    #[arg(long, default_value = "max")]
    objective: Objective,
    /// Player counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Candidates per player, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    attempts: Option<usize>,
    #[arg(long)]
    passes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the published grid instead of the desk-sized one.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ChecksArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplier on every sample count.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Run a single named check.
    #[arg(long)]
    only: Option<String>,
    /// Deliberately break one closed form to confirm the report catches it.
    #[arg(long, value_parser = ["beta-moment"])]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct ReduceArgs {
    formula: PathBuf,
    /// Instance path; the role table goes next to it as `<stem>.roles.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Offset relative to unit clause spacing, e.g. `1/12`.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    pad_to: Option<usize>,
}

#[derive(Args)]
struct PneArgs {
    instance: PathBuf,
    /// Most profiles to enumerate before giving up.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    /// Node budget for the backtracking search used on large one-way games.
    #[arg(long, default_value_t = 50_000_000)]
    nodes: u64,
    /// Also run best response from the first choices and write its moves.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    passes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    instance: PathBuf,
    distribution: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// The reader closed the output early.
    Closed,
    Check(String),
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Closed => 0,
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Closed => "",
            Failure::Check(m) | Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn written(e: io::Error) -> Failure {
    if e.kind() == io::ErrorKind::BrokenPipe {
        Failure::Closed
    } else {
        input(e)
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => fs::File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment(a) => experiment(a),
        Command::Checks(a) => checks(a),
        Command::Reduce(a) => reduce(a),
        Command::Pne(a) => pne(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn experiment(a: ExperimentArgs) -> Outcome {
    let base = if a.paper_scale {
        ExperimentConfig::paper_scale(a.variant, a.objective)
    } else {
        ExperimentConfig::desk(a.variant, a.objective)
    };
    let config = ExperimentConfig {
        ns: a.n.unwrap_or(base.ns.clone()),
        ms: a.m.unwrap_or(base.ms.clone()),
        instances: a.instances.unwrap_or(base.instances),
        attempts: a.attempts.unwrap_or(base.attempts),
        max_passes: a.passes.unwrap_or(base.max_passes),
        seed: a.seed,
        workers: a.workers.unwrap_or(base.workers),
        ..base
    };
    let results = run_experiment(&config).map_err(input)?;
    write_csv(&config, &results, sink(&a.out)?).map_err(input)
}

fn checks(a: ChecksArgs) -> Outcome {
    let config = ChecksConfig {
        seed: a.seed,
        scale: a.scale,
        fault: a.inject_fault.map(|_| Fault::NegateBetaMoment),
    };
    if a.scale.is_nan() || a.scale <= 0.0 {
        return Err(Failure::Input("scale must be positive".into()));
    }
    let outcomes = match &a.only {
        Some(name) => vec![run_check(name, &config)
            .ok_or_else(|| Failure::Input(format!("unknown check `{name}`; known: {}", CHECK_NAMES.join(", "))))?],
        None => run_checks(&config),
    };
    for o in &outcomes {
        eprintln!("{:<24} {}", o.name, if o.passed() { "pass" } else { "FAIL" });
    }
    write_checks_csv(&config, &outcomes, sink(&a.out)?).map_err(input)?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed checks: {}", failed.join(", "))))
    }
}

fn reduce(a: ReduceArgs) -> Outcome {
    let formula = Monotone1in3Formula::parse(&read_file(&a.formula)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.formula.display())))?;
    let eps = a.eps.as_deref().map(Rational::parse).transpose().map_err(input)?;
    let options = ReductionOptions { eps, pad_to: a.pad_to, ..Default::default() };
    let tagged = build_game(&formula, &options).map_err(input)?;
    let instance = write_instance(tagged.game(), None);
    let roles = write_roles(&tagged);
    match &a.out {
        Some(path) => {
            let sidecar = path.with_extension("roles.json");
            fs::write(path, instance).map_err(input)?;
            fs::write(&sidecar, roles).map_err(input)?;
            let census: Vec<String> = tagged.census().iter().map(|(r, c)| format!("{r}={c}")).collect();
            println!(
                "{} players ({}); wrote {} and {}",
                tagged.game().players(),
                census.join(" "),
                path.display(),
                sidecar.display()
            );
        }
        None => io::stdout().write_all(instance.as_bytes()).map_err(written)?,
    }
    Ok(())
}

fn render_profile(p: &StrategyProfile) -> String {
    p.choices().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn pne(a: PneArgs) -> Outcome {
    let loaded = read_instance(&read_file(&a.instance)?).map_err(|e| Failure::Input(format!("{}: {e}", a.instance.display())))?;
    let game = &loaded.game;
    let seed = loaded.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    let mut out = sink(&a.out)?;
    let w = written;
    writeln!(out, "# voronoi-choice pne v1 seed={seed} players={}", game.players()).map_err(w)?;
    let exact = game.variant().is_circle();
    let utilities = |p: &StrategyProfile| -> String {
        if exact {
            game.utilities(p).iter().map(Scalar::render).collect::<Vec<_>>().join(" ")
        } else {
            let g = game.to_f64();
            g.utilities(p).iter().map(|u| format!("{u}")).collect::<Vec<_>>().join(" ")
        }
    };
    let listed = if exact {
        enumerate_pne_within(game, a.budget)
    } else {
        enumerate_pne_within(&game.to_f64(), a.budget)
    };
    match listed {
        Ok(all) => {
            writeln!(out, "{} PNE", all.len()).map_err(w)?;
            for p in &all {
                writeln!(out, "profile {} utilities {}", render_profile(p), utilities(p)).map_err(w)?;
            }
        }
        Err(EquilibriumError::BudgetExceeded { profiles, .. }) if game.variant() == GameVariant::OneWay1D => {
            let search = find_pne_one_way(game, None, a.nodes).map_err(|e| match e {
                EquilibriumError::SearchBudgetExceeded { .. } => Failure::Budget(e.to_string()),
                other => input(other),
            })?;
            match &search.profile {
                Some(p) => {
                    writeln!(out, "at least 1 PNE ({profiles} profiles; backtracking search, {} nodes)", search.nodes)
                        .map_err(w)?;
                    writeln!(out, "profile {} utilities {}", render_profile(p), utilities(p)).map_err(w)?;
                }
                None => writeln!(
                    out,
                    "0 PNE ({profiles} profiles; exhaustive backtracking search, {} nodes)",
                    search.nodes
                )
                .map_err(w)?,
            }
        }
        Err(e) => return Err(Failure::Budget(e.to_string())),
    }
    if let Some(path) = &a.trace {
        let start = StrategyProfile::first_choices(game.players());
        let (outcome, trace) = if exact {
            run_best_response_traced(game, &start, a.passes)
        } else {
            run_best_response_traced(&game.to_f64(), &start, a.passes)
        };
        let mut t = sink(&Some(path.clone()))?;
        writeln!(t, "# voronoi-choice trace v1 seed={seed} converged={} passes={}", outcome.converged(), outcome.passes)
            .map_err(w)?;
        let mut writer = csv::Writer::from_writer(t);
        for e in &trace {
            writer.serialize(e).map_err(input)?;
        }
        writer.flush().map_err(w)?;
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Outcome {
    let loaded = read_instance(&read_file(&a.instance)?).map_err(|e| Failure::Input(format!("{}: {e}", a.instance.display())))?;
    let game = &loaded.game;
    let dist = read_distribution(&read_file(&a.distribution)?, &game.choice_counts())
        .map_err(|e| Failure::Input(format!("{}: {e}", a.distribution.display())))?;
    let seed = loaded.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    let mut out = sink(&a.out)?;
    writeln!(out, "# voronoi-choice eval v1 seed={seed}").map_err(written)?;
    writeln!(out, "player,choice,expected_utility").map_err(written)?;
    for k in 0..game.players() {
        let values: Vec<String> = if game.variant().is_circle() {
            expected_utility_1d(game, k, &dist).map_err(input)?.iter().map(Scalar::render).collect()
        } else {
            expected_utility(&game.to_f64(), k, &dist.to_f64())
                .map_err(input)?
                .iter()
                .map(|v| format!("{v}"))
                .collect()
        };
        for (c, v) in values.iter().enumerate() {
            writeln!(out, "{k},{c},{v}").map_err(written)?;
        }
    }
    Ok(())
}

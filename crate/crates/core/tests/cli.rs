use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use voronoi_choice::io::write_instance;
use voronoi_choice::{build_fig3_instance, GameInstance, GameVariant, Objective, Rational, Scalar};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voronoi-choice")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("voronoi-choice-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn square_counterexample_has_no_equilibrium() {
    let dir = scratch("counterexample");
    for objective in [Objective::Maximize, Objective::Minimize] {
        let file = dir.join(format!("counterexample-{objective}.json"));
        let game = build_fig3_instance(Rational::from_ratio(1, 64), 3, objective).unwrap();
        fs::write(&file, write_instance(&game, None)).unwrap();
        let out = run(&["pne", path(&file)]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).lines().any(|l| l == "0 PNE"), "{}", stdout(&out));
    }
}

#[test]
fn reduction_of_a_satisfiable_formula_has_an_equilibrium() {
    let dir = scratch("reduce");
    let formula = dir.join("one.cnf");
    fs::write(&formula, "c one clause\np 1in3 3 1\n1 2 3 0\n").unwrap();
    let instance = dir.join("one.json");
    let out = run(&["reduce", path(&formula), "--out", path(&instance)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let roles: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("one.roles.json")).unwrap()).unwrap();
    assert_eq!(roles["players"], 13);

    let out = run(&["pne", path(&instance)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let count: usize = text.lines().find_map(|l| l.strip_suffix(" PNE")?.parse().ok()).unwrap();
    assert!(count > 0, "{text}");
}

#[test]
fn unsatisfiable_reduction_reports_none_or_runs_out_of_nodes() {
    let dir = scratch("unsat");
    let formula = dir.join("unsat.cnf");
    fs::write(&formula, "1 2 3\n1 2 4\n1 3 4\n2 3 4\n").unwrap();
    let instance = dir.join("unsat.json");
    assert_eq!(run(&["reduce", path(&formula), "--out", path(&instance)]).status.code(), Some(0));

    let out = run(&["pne", path(&instance)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0 PNE"), "{}", stdout(&out));

    let out = run(&["pne", path(&instance), "--nodes", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn point_mass_evaluation_matches_equilibrium_utilities() {
    let dir = scratch("eval");
    let r = |n: i64| Rational::from_ratio(n, 40);
    let game = GameInstance::circle(
        GameVariant::OneWay1D,
        Objective::Maximize,
        vec![vec![r(1), r(17)], vec![r(9), r(30)], vec![r(22), r(35)]],
    )
    .unwrap();
    let instance = dir.join("small.json");
    fs::write(&instance, write_instance(&game, Some(5))).unwrap();

    let out = run(&["pne", path(&instance)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# voronoi-choice pne v1 seed=5"));
    let line = text.lines().find(|l| l.starts_with("profile ")).expect("at least one equilibrium");
    let (choices, utilities) = line["profile ".len()..].split_once(" utilities ").unwrap();
    let choices: Vec<usize> = choices.split(' ').map(|c| c.parse().unwrap()).collect();
    let utilities: Vec<&str> = utilities.split(' ').collect();

    let dist: serde_json::Map<String, serde_json::Value> = choices
        .iter()
        .enumerate()
        .map(|(k, &c)| (k.to_string(), (0..2).map(|j| if j == c { "1" } else { "0" }).collect::<Vec<_>>().into()))
        .collect();
    let dist_file = dir.join("mass.json");
    fs::write(&dist_file, serde_json::Value::Object(dist).to_string()).unwrap();

    let out = run(&["eval", path(&instance), path(&dist_file)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# voronoi-choice eval v1 seed=5"));
    for (k, &c) in choices.iter().enumerate() {
        let row = format!("{k},{c},{}", utilities[k]);
        assert!(text.lines().any(|l| l == row), "missing {row} in\n{text}");
    }
}

#[test]
fn experiment_csv_is_reproducible_and_records_the_seed() {
    let args = ["experiment", "--n", "6,9", "--m", "2", "--instances", "15", "--attempts", "4", "--seed", "77"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let again = run(&args);
    assert_eq!(first.stdout, again.stdout);
    let text = stdout(&first);
    assert!(text.lines().next().unwrap().starts_with("# voronoi-choice experiment v1"));
    assert!(text.lines().next().unwrap().ends_with("seed=77"));
    assert!(text.lines().skip(2).all(|l| l.ends_with(",77")));

    let dir = scratch("experiment");
    let file = dir.join("table.csv");
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["--out", path(&file)]);
    assert_eq!(run(&with_out).status.code(), Some(0));
    assert_eq!(fs::read(&file).unwrap(), first.stdout);

    let other = run(&["experiment", "--n", "6,9", "--m", "2", "--instances", "15", "--attempts", "4", "--seed", "78"]);
    assert_ne!(stdout(&other).lines().skip(2).collect::<Vec<_>>(), text.lines().skip(2).collect::<Vec<_>>());
}

#[test]
fn empty_experiment_gives_a_header_only_table() {
    let out = run(&["experiment", "--n", "5", "--m", "2", "--instances", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn checks_pass_across_seeds() {
    for seed in 1..=5 {
        let out = run(&["checks", "--seed", &seed.to_string()]);
        assert_eq!(out.status.code(), Some(0), "seed {seed}:\n{}", stderr(&out));
        assert!(stdout(&out).contains(&format!("seed={seed}")));
    }
}

#[test]
fn injected_fault_fails_only_its_check() {
    let out = run(&["checks", "--inject-fault", "beta-moment", "--scale", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
    let failing: Vec<String> = stderr(&out)
        .lines()
        .filter(|l| l.ends_with("FAIL"))
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(failing, vec!["beta-moments".to_string()]);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = scratch("bad");
    let formula = dir.join("bad.cnf");
    fs::write(&formula, "1 2 3\n1 1 2\n").unwrap();
    let out = run(&["reduce", path(&formula)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = run(&["pne", path(&dir.join("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["experiment", "--variant", "hexagon"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["experiment", "--attempts", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

//! Every registered check at reduced sample sizes.

use voronoi_choice::checks::{run_checks, ChecksConfig};

fn main() {
    let config = ChecksConfig { scale: 0.25, ..ChecksConfig::new(7) };
    for outcome in run_checks(&config) {
        let status = if outcome.passed() { "pass" } else { "FAIL" };
        let allowance = match outcome.rows.iter().find_map(|r| r.sigmas) {
            Some(k) => format!("within {k:.2} SE"),
            None => "exact or p-value".to_string(),
        };
        println!("{:<24} {:>3} rows  {status}  ({allowance})", outcome.name, outcome.rows.len());
    }
}

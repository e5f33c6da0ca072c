//! Ratios of partial sums of exponentials: moments and independence.

use voronoi_choice::randomgames::{beta_moment_table, independence_check};

fn main() {
    let samples = 200_000;
    println!("E[(S_j/S_(j+1))^t] estimate / exact");
    for (j, row) in beta_moment_table(5, 3, samples, 1).iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|r| format!("{:.4}/{:.4}", r.estimate, r.reference.unwrap())).collect();
        println!("  j={}: {}", j + 1, cells.join("  "));
    }
    let report = independence_check(4, samples, 2);
    for c in &report.correlations {
        println!("corr {}: {:+.4} (SE {:.4})", c.label, c.estimate, c.standard_error);
    }
    for f in &report.factorizations {
        println!("{}: {:.4} vs {:.4}", f.label, f.report.estimate, f.report.reference.unwrap());
    }
}

//! The coefficients behind the lower bound: exact sums and the product.

use num_traits::ToPrimitive;
use voronoi_choice::randomgames::{coefficient_by_definition, harmonic_constants, harmonic_identity_sweep, product_bound_sweep};
use voronoi_choice::{Rational, Scalar};

fn main() {
    let c = harmonic_constants(6);
    for (i, ci) in c.coefficients.iter().enumerate() {
        assert_eq!(*ci, coefficient_by_definition(6, i + 1));
        println!("c_{} = {ci}", i + 1);
    }
    println!("sum = {} = 6 - H_6^(2): {}", c.sum(), c.identity_holds());
    println!("identity for every n <= 2000: {:?}", harmonic_identity_sweep(2000));

    let report = product_bound_sweep(2000, Rational::from_ratio(19, 100));
    println!(
        "product bound violations up to 2000: {}, smallest n with prod >= 0.19: {:?}",
        report.violations.len(),
        report.first_reaching_threshold
    );
    for n in [10, 39, 40, 100] {
        println!("  prod c_i at n={n}: {:.5}", harmonic_constants(n).product().to_f64().unwrap());
    }
}

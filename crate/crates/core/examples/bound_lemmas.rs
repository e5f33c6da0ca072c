//! Two combinatorial tools from the lower bound: perturbing a dominated
//! column and monotone bijections between subset layers.

use voronoi_choice::randomgames::{monotone_bijection, perturbation_inequality_mc, random_dominated_matrix, stream_rng};

fn main() {
    let mut rng = stream_rng(4, 0);
    for i in 0..5 {
        let (a, s, t, eps) = random_dominated_matrix(&mut rng);
        let r = perturbation_inequality_mc(&a, s, t, eps, 100_000, i).unwrap();
        println!("{a:?} s={s} t={t} eps={eps}: difference {:+.5} (SE {:.5})", r.estimate, r.standard_error);
    }
    let b = monotone_bijection(6, 2).unwrap();
    println!("\n2-subsets of 6 into 4-subsets, verified: {}", b.verify());
    for subset in [0b000011u32, 0b101000, 0b110000] {
        println!("  {subset:06b} -> {:06b}", b.image(subset).unwrap());
    }
}

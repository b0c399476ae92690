//! The scalar kernels behind the two-dimensional estimates.
//!
//! Three pointwise facts do the heavy lifting upstream: a Taylor-type
//! inequality `a^p/p + a^{p−1}(b−a) + (1−1/p)(b−a)₊^p ≤ (3−p)/2·b^p` for
//! a, b ≥ 0; the uniform convexity gap `(1+x)^p + |1−x|^p − 2 > 0` for
//! x > 0; and a two-sided bound sandwiching the p-energy a displaced core
//! contributes. This example tabulates all three and scans the Taylor
//! inequality over a seeded random cloud.
//!
//! Run: `cargo run --release --example scalar_kernels`

use pharm::energetics::{
    displaced_core_bounds, displaced_core_integral, taylor_scalar_gap, taylor_scalar_holds,
    uniform_convexity_gap,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    println!("Taylor-type inequality gap (nonpositive = holds):");
    println!("{:>6} {:>6} {:>6} {:>12}", "a", "b", "p", "gap");
    for &(a, b, p) in &[
        (1.0, 1.0, 1.5),
        (2.0, 0.5, 1.5),
        (0.5, 2.0, 1.5),
        (0.0, 3.0, 1.2),
        (3.0, 0.0, 1.8),
        (1.0, 1.5, 2.0),
    ] {
        println!("{a:>6} {b:>6} {p:>6} {:>12.6}", taylor_scalar_gap(a, b, p));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cases = 200_000;
    let violations = (0..cases)
        .filter(|_| {
            let a = rng.gen_range(-8.0_f64..2.5).exp();
            let b = rng.gen_range(-8.0_f64..2.5).exp();
            let p = rng.gen_range(1.0..=2.0);
            !taylor_scalar_holds(a, b, p)
        })
        .count();
    println!("random scan: {violations} violations in {cases} samples");

    println!();
    println!("uniform convexity gap (1+x)^p + |1-x|^p - 2:");
    println!("{:>8} {:>12} {:>12} {:>12}", "x", "p=1.2", "p=1.5", "p=1.9");
    for &x in &[1e-4, 1e-2, 0.5, 1.0, 2.0] {
        println!(
            "{x:>8} {:>12.3e} {:>12.3e} {:>12.3e}",
            uniform_convexity_gap(x, 1.2),
            uniform_convexity_gap(x, 1.5),
            uniform_convexity_gap(x, 1.9),
        );
    }

    println!();
    println!("displaced-core p-energy, lower ≤ quadrature ≤ upper:");
    println!("{:>6} {:>6} {:>12} {:>12} {:>12}", "a", "p", "lower", "integral", "upper");
    for &a in &[0.1, 0.2, 0.3] {
        for &p in &[1.5, 1.9] {
            let (lo, hi) = displaced_core_bounds(a, p);
            let mid = displaced_core_integral(a, p, 800);
            println!("{a:>6} {p:>6} {lo:>12.4} {mid:>12.4} {hi:>12.4}");
        }
    }
}

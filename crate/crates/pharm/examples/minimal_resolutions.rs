//! Minimal resolutions of a topological charge across exponents.
//!
//! The singular cost of a charge is minimized over all ways of splitting it
//! into summands, each priced at `λ^p / (p(2π)^{p−1})`. On the circle the
//! split into |d| unit charges is optimal for every p > 1 (cost |d|·2π/p,
//! hence |d|·π at p = 2). On the torus the atomic charge (1,1) with
//! `λ = 2√2·π` beats the factor split strictly below p = 2 and ties it at
//! p = 2 — the degeneracy that makes the p → 2 limit interesting.
//!
//! Run: `cargo run --release --example minimal_resolutions`

use std::f64::consts::PI;

use pharm::energetics::{check_p_continuity, enumerate_optimal_resolutions, minimal_resolution};
use pharm::manifold::HomotopyCharge;

fn main() -> pharm::Result<()> {
    println!("circle charges, minimal cost by exponent:");
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "d", "p=1.2", "p=1.5", "p=1.8", "p=2.0");
    for d in 1..=4_i64 {
        let total = HomotopyCharge::new(vec![d]);
        print!("{d:>4}");
        for &p in &[1.2, 1.5, 1.8, 2.0] {
            print!(" {:>10.6}", minimal_resolution(&total, p).1);
        }
        println!("   (p=2 closed form: {:.6})", d as f64 * PI);
    }

    println!();
    println!("torus charge (1,1): atomic vs factor split");
    let t = HomotopyCharge::new(vec![1, 1]);
    for &p in &[1.5, 1.8, 1.95, 2.0] {
        let (res, cost) = minimal_resolution(&t, p);
        let all = enumerate_optimal_resolutions(&t, p);
        println!(
            "  p = {p:<5} minimal cost {cost:.6} via {}  ({} optimal resolution{})",
            res.display(),
            all.len(),
            if all.len() == 1 { "" } else { "s" },
        );
    }

    println!();
    println!("continuity of f(p) = (2π)^(p-1)·p·E_sg in p, charge (2):");
    let grid: Vec<f64> = (0..11).map(|k| 1.2 + f64::from(k) * 0.075).collect();
    let rep = check_p_continuity(&HomotopyCharge::new(vec![2]), &grid)?;
    for row in &rep.rows {
        println!(
            "  p = {:<6.3} f = {:<12.6} resolution {}",
            row.p,
            row.f,
            row.resolution.display()
        );
    }
    println!(
        "  max slope {:.4} within Lipschitz constant {:.4}: {}",
        rep.max_slope,
        rep.lipschitz,
        if rep.pass { "yes" } else { "NO" }
    );
    Ok(())
}

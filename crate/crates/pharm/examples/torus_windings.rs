//! Flat-torus targets: joint charges and why they stay atomic below p = 2.
//!
//! A map into the flat torus (two unit circles with the product metric)
//! carries a winding pair. The charge (1,−1) has class length
//! `λ = 2√2·π < 4π`, so below p = 2 the atomic singularity is strictly
//! cheaper than splitting into one vortex per factor — minimizers keep both
//! factor vortices at the same point. This example solves the (1,−1) problem,
//! detects the joint singularity, and runs ball growth at the speed set by
//! the atomic class.
//!
//! Run: `cargo run --release --example torus_windings`

use std::f64::consts::PI;

use pharm::ballgrowth::{detect_singularities, grow_balls};
use pharm::energetics::{minimal_resolution, singular_energy};
use pharm::manifold::HomotopyCharge;
use pharm::solver::{minimize_p_harmonic, vortex_field, SolverOptions};

fn main() -> pharm::Result<()> {
    let q = HomotopyCharge::new(vec![1, -1]);
    println!("charge (1,-1): lambda = {:.6} (= 2*sqrt(2)*pi = {:.6})",
        q.lambda(), 2.0 * 2.0_f64.sqrt() * PI);
    for &p in &[1.5, 1.8, 2.0] {
        let (res, cost) = minimal_resolution(&q, p);
        let split = 2.0 * singular_energy(&HomotopyCharge::new(vec![1]), p);
        println!(
            "  p = {p:<4} atomic-optimal cost {cost:.6} via {} (factor split would cost {split:.6})",
            res.display()
        );
    }

    println!();
    let (h, p) = (1.0 / 48.0, 1.6);
    println!("solving the (1,-1) problem on the unit disk, h = 1/48, p = {p}:");
    let grid = pharm::field::DomainGrid::unit_disk(h)?;
    let init = vortex_field(grid, &[1, -1], 5)?;
    let opts = SolverOptions {
        max_iters: 2500,
        ..SolverOptions::default()
    };
    let res = minimize_p_harmonic(p, &init, &opts)?;
    println!(
        "  energy {:.6} after {} iterations{}",
        res.energy,
        res.iterations,
        if res.hit_max_iters { " (budget hit)" } else { "" }
    );

    let detection = detect_singularities(&res.field)?;
    for (a, charge) in detection.configuration.points() {
        println!(
            "  singularity at ({:+.4}, {:+.4}) with charge {}",
            a[0],
            a[1],
            charge.display()
        );
    }

    let delta = 0.3;
    let growth = grow_balls(&res.field, p, delta)?;
    let pp = p / (p - 1.0);
    let kappa = singular_energy(&q, pp);
    println!(
        "  growth: {} seed(s), speed kappa = E_sg at p' = {pp:.3}: {kappa:.6}, stop at s = {:.6}",
        growth.seeds.len(),
        growth.stop_s
    );
    println!(
        "  final disk radius {:.4} (= δ/2 = {:.4})",
        growth.disks[0].radius,
        delta / 2.0
    );
    Ok(())
}

//! Ball growth narrated event by event.
//!
//! Two like-signed unit vortices close together: their disks grow at the
//! speed set by the minimal singular cost of their class, touch, merge into
//! one disk of charge 2 (radii add, charge concatenates), and the merged disk
//! keeps growing until the diameter budget δ is met. A cancelling ±1 pair
//! instead merges into a zero-charge disk whose growth speed is zero: the
//! construction stalls honestly and reports that it never reached δ.
//!
//! Run: `cargo run --release --example ball_growth_trace`

use pharm::ballgrowth::{grow_balls, GrowthEventKind};
use pharm::field::{DiscreteField, DomainGrid};
use pharm::manifold::TargetManifold;

/// Exact product of unit vortices with windings `ws` at points `ats`.
fn vortex_product(h: f64, ats: Vec<[f64; 2]>, ws: Vec<i64>) -> pharm::Result<DiscreteField> {
    DiscreteField::from_fn(
        DomainGrid::unit_disk(h)?,
        TargetManifold::circle(),
        move |x, y| {
            let (mut re, mut im) = (1.0, 0.0);
            for (a, &w) in ats.iter().zip(&ws) {
                let (dx, dy) = (x - a[0], y - a[1]);
                let r = dx.hypot(dy).max(1e-12);
                let (c, s) = (dx / r, dy / r);
                let (fc, fs) = if w >= 0 { (c, s) } else { (c, -s) };
                for _ in 0..w.unsigned_abs() {
                    let nre = re * fc - im * fs;
                    im = re * fs + im * fc;
                    re = nre;
                }
            }
            vec![re, im]
        },
    )
}

fn narrate(growth: &pharm::ballgrowth::BallGrowth) {
    for ev in &growth.events {
        let kind = match ev.kind {
            GrowthEventKind::Seed => "seed ",
            GrowthEventKind::Merge => "merge",
            GrowthEventKind::Stop => "stop ",
        };
        print!("  s = {:>8.5}  {kind} ", ev.s);
        for d in &ev.disks {
            print!(
                "[({:+.3}, {:+.3}) r={:.4} q={}] ",
                d.center[0],
                d.center[1],
                d.radius,
                d.charge.display()
            );
        }
        println!();
    }
    println!(
        "  sum of diameters {:.4} / budget {:.4}  ({})",
        growth.disks.iter().map(|d| 2.0 * d.radius).sum::<f64>(),
        growth.delta,
        if growth.reached_delta {
            "budget reached"
        } else {
            "stalled: zero-charge disk grows at speed 0"
        }
    );
}

fn main() -> pharm::Result<()> {
    let (h, p) = (1.0 / 64.0, 1.5);

    println!("like-signed pair at (±0.05, 0), p = {p}, δ = 0.5:");
    let u = vortex_product(h, vec![[-0.05, 0.0], [0.05, 0.0]], vec![1, 1])?;
    let growth = grow_balls(&u, p, 0.5)?;
    narrate(&growth);

    println!();
    println!("cancelling pair at (±0.15, 0), p = {p}, δ = 0.8:");
    let u = vortex_product(h, vec![[-0.15, 0.0], [0.15, 0.0]], vec![1, -1])?;
    let growth = grow_balls(&u, p, 0.8)?;
    narrate(&growth);

    Ok(())
}

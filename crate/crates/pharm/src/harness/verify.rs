//! Self-check suites: fast, deterministic re-derivations of the closed forms
//! and invariants the library is built on, runnable from the CLI.
//!
//! Each row is a named check with a machine-readable pass/fail and a one-line
//! detail. Suites: `geometry` (disk merging, annulus bounds, growth and level
//! sets on an exact vortex), `scalar` (pointwise kernel inequalities),
//! `energetics` (resolutions, continuity in p, H-term values, renormalized
//! routes on the exact vortex), and `all`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ballgrowth::{
    annulus_lower_bound, build_u_field, detect_singularities, grow_balls, merge_disks,
    weak_gradient_quasinorm, Disk,
};
use crate::energetics::{
    check_p_continuity, displaced_core_bounds, displaced_core_integral, h_term,
    minimal_resolution, renormalized_energy, singular_energy, taylor_scalar_holds,
    uniform_convexity_gap, RenRoute,
};
use crate::error::{Error, Result};
use crate::field::{DiscreteField, DomainGrid};
use crate::manifold::HomotopyCharge;

const TWO_PI: f64 = 2.0 * PI;

/// One self-check result.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub suite: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn row(suite: &'static str, name: &'static str, pass: bool, detail: String) -> CheckRow {
    CheckRow {
        suite,
        name,
        pass,
        detail,
    }
}

fn geometry_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();

    // Random merge cascades: exact charge conservation, pairwise disjoint
    // output, and sampled coverage of every input disk.
    let mut rng = ChaCha8Rng::seed_from_u64(0xB411);
    let mut violations = 0usize;
    let cases = 1000;
    for _ in 0..cases {
        let n = rng.gen_range(1..=8);
        let disks: Vec<Disk> = (0..n)
            .map(|_| {
                Disk::new(
                    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                    rng.gen_range(1e-3..0.4),
                    HomotopyCharge::new(vec![rng.gen_range(-2..=2)]),
                )
            })
            .collect();
        let merged = merge_disks(&disks);
        let sum = |ds: &[Disk]| ds.iter().map(|d| d.charge.windings()[0]).sum::<i64>();
        if sum(&disks) != sum(&merged) {
            violations += 1;
            continue;
        }
        let radii_in: f64 = disks.iter().map(|d| d.radius).sum();
        let radii_out: f64 = merged.iter().map(|d| d.radius).sum();
        if (radii_in - radii_out).abs() > 1e-12 * radii_in.max(1.0) {
            violations += 1;
            continue;
        }
        let disjoint = merged.iter().enumerate().all(|(i, a)| {
            merged[i + 1..].iter().all(|b| {
                (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1])
                    >= a.radius + b.radius
            })
        });
        if !disjoint {
            violations += 1;
            continue;
        }
        let covered = disks.iter().all(|d| {
            (0..16).map(|k| f64::from(k) * TWO_PI / 16.0).all(|th| {
                let pt = [
                    d.center[0] + d.radius * (1.0 - 1e-9) * th.cos(),
                    d.center[1] + d.radius * (1.0 - 1e-9) * th.sin(),
                ];
                merged.iter().any(|m| m.contains(pt))
            }) && merged.iter().any(|m| m.contains(d.center))
        });
        if !covered {
            violations += 1;
        }
    }
    rows.push(row(
        "geometry",
        "merge_random_cascades",
        violations == 0,
        format!("violations={violations} cases={cases}"),
    ));

    // Annulus lower bounds against their closed forms.
    let log_bound = annulus_lower_bound(TWO_PI, 0.25, 1.0, 2.0)?;
    let log_exact = PI * 4.0_f64.ln();
    rows.push(row(
        "geometry",
        "annulus_log_closed_form",
        (log_bound - log_exact).abs() < 1e-12 * log_exact,
        format!("bound={log_bound:.12} exact={log_exact:.12}"),
    ));
    let p = 1.5;
    let (sigma, rho) = (0.1, 0.7);
    let general = annulus_lower_bound(TWO_PI, sigma, rho, p)?;
    let expected = (rho.powf(2.0 - p) - sigma.powf(2.0 - p)) * TWO_PI.powf(p)
        / (TWO_PI.powf(p - 1.0) * p * (2.0 - p));
    rows.push(row(
        "geometry",
        "annulus_power_closed_form",
        (general - expected).abs() < 1e-12 * expected,
        format!("bound={general:.12} exact={expected:.12}"),
    ));
    let divergent = annulus_lower_bound(TWO_PI, 0.0, 1.0, 2.0);
    rows.push(row(
        "geometry",
        "annulus_divergent_at_p2",
        matches!(divergent, Err(Error::DivergentBound)),
        format!("{divergent:?}"),
    ));

    // Ball growth plus level-set machinery on the exact unit vortex.
    let g = DomainGrid::unit_disk(1.0 / 64.0)?;
    let u = DiscreteField::hedgehog(g)?;
    let (p, delta) = (1.5, 0.4);
    let growth = grow_balls(&u, p, delta)?;
    let single = growth.disks.len() == 1 && growth.reached_delta;
    let radius_ok = single && (growth.disks[0].radius - delta / 2.0).abs() < 1e-9;
    rows.push(row(
        "geometry",
        "vortex_growth_stops_on_budget",
        radius_ok,
        format!(
            "disks={} reached={} r={:.9}",
            growth.disks.len(),
            growth.reached_delta,
            growth.disks.first().map_or(f64::NAN, |d| d.radius)
        ),
    ));
    let (_, mixed) = build_u_field(&u, &growth, p, delta)?;
    let failed: Vec<&str> = mixed
        .certificates
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    rows.push(row(
        "geometry",
        "vortex_bound_table_all_pass",
        failed.is_empty(),
        if failed.is_empty() {
            format!("rows={}", mixed.certificates.len())
        } else {
            format!("failed={failed:?}")
        },
    ));
    let (t_star, sup) = weak_gradient_quasinorm(&u, 2.0, 8.0)?;
    rows.push(row(
        "geometry",
        "vortex_weak_l2_quasinorm",
        (sup - PI).abs() < 0.10 * PI,
        format!("sup={sup:.6} at t={t_star:.3}, exact=π"),
    ));

    Ok(rows)
}

fn scalar_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5CA1A);
    let cases = 100_000;
    let mut violations = 0usize;
    for k in 0..cases {
        let sample = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.gen_bool(0.05) {
                0.0
            } else {
                (rng.gen_range(-9.2_f64..2.3)).exp()
            }
        };
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let p = if k % 10 == 0 {
            2.0
        } else {
            rng.gen_range(1.0..2.0)
        };
        if !taylor_scalar_holds(a, b, p) {
            violations += 1;
        }
    }
    rows.push(row(
        "scalar",
        "taylor_inequality_random",
        violations == 0,
        format!("violations={violations} cases={cases}"),
    ));

    let mut bad = 0usize;
    let mut checked = 0usize;
    for i in 0..100 {
        let x = 1e-6 * (10.0_f64 / 1e-6).powf(f64::from(i) / 99.0);
        for &p in &[1.1, 1.3, 1.5, 1.7, 1.9, 2.0] {
            checked += 1;
            if !(uniform_convexity_gap(x, p) > 0.0) {
                bad += 1;
            }
        }
    }
    let zero_ok = (0..6).all(|k| {
        let p = 1.0 + 0.2 * f64::from(k);
        uniform_convexity_gap(0.0, p).abs() < 1e-15
    });
    rows.push(row(
        "scalar",
        "uniform_convexity_positive",
        bad == 0 && zero_ok,
        format!("violations={bad} grid={checked}"),
    ));

    let mut sandwich_ok = true;
    let mut detail = String::new();
    for &a in &[0.1, 0.3] {
        for &p in &[1.5, 1.9] {
            let (lo, hi) = displaced_core_bounds(a, p);
            let val = displaced_core_integral(a, p, 600);
            if !(lo <= val && val <= hi) {
                sandwich_ok = false;
            }
            detail.push_str(&format!("a={a},p={p}:{lo:.3}≤{val:.3}≤{hi:.3} "));
        }
    }
    rows.push(row(
        "scalar",
        "displaced_core_sandwich",
        sandwich_ok,
        detail.trim_end().to_string(),
    ));

    Ok(rows)
}

fn energetics_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();

    // Circle resolutions: |d|·π at p = 2, unit splitting below 2.
    let mut circle_ok = true;
    let mut detail = String::new();
    for d in 1..=4_i64 {
        let total = HomotopyCharge::new(vec![d]);
        let e2 = singular_energy(&total, 2.0);
        let exact = d.unsigned_abs() as f64 * PI;
        if (e2 - exact).abs() > 1e-12 * exact {
            circle_ok = false;
        }
        detail.push_str(&format!("d={d}:{e2:.9} "));
    }
    let unit3 = singular_energy(&HomotopyCharge::new(vec![1]), 3.0);
    if (unit3 - TWO_PI / 3.0).abs() > 1e-12 {
        circle_ok = false;
    }
    let two3 = singular_energy(&HomotopyCharge::new(vec![2]), 3.0);
    if (two3 - 2.0 * TWO_PI / 3.0).abs() > 1e-12 {
        circle_ok = false;
    }
    rows.push(row(
        "energetics",
        "circle_resolution_closed_forms",
        circle_ok,
        detail.trim_end().to_string(),
    ));

    // Torus charge (1,1): atomic below p = 2, split cost ties at p = 2.
    let t = HomotopyCharge::new(vec![1, 1]);
    let (res_15, cost_15) = minimal_resolution(&t, 1.5);
    let atomic_15 = t.lambda().powf(1.5) / (TWO_PI.powf(0.5) * 1.5);
    let atomic_wins = res_15.len() == 1 && (cost_15 - atomic_15).abs() < 1e-12;
    let e2 = singular_energy(&t, 2.0);
    let tie_at_2 = (e2 - TWO_PI).abs() < 1e-12;
    rows.push(row(
        "energetics",
        "torus_resolution_switch",
        atomic_wins && tie_at_2,
        format!("p=1.5 parts={} cost={cost_15:.9}; p=2 cost={e2:.9} (=2π)", res_15.len()),
    ));

    // Continuity of the minimal cost in p on an 11-point grid.
    let mut cont_ok = true;
    for total in [HomotopyCharge::new(vec![2]), HomotopyCharge::new(vec![1, 1])] {
        let grid: Vec<f64> = (0..11).map(|k| 1.2 + 0.07 * f64::from(k)).collect();
        let rep = check_p_continuity(&total, &grid)?;
        if !rep.pass {
            cont_ok = false;
        }
    }
    rows.push(row(
        "energetics",
        "resolution_cost_p_continuity",
        cont_ok,
        "11-point grids for charges (2) and (1,1)".into(),
    ));

    // H-term closed forms: λ = 2π gives π/2, twice that doubles it, and the
    // atomic torus charge λ = 2√2·π gives π(1−log 2).
    let h1 = h_term(&[TWO_PI])?;
    let h2 = h_term(&[TWO_PI, TWO_PI])?;
    let h3 = h_term(&[TWO_PI * 2.0_f64.sqrt()])?;
    let h_ok = (h1 - PI / 2.0).abs() < 1e-12
        && (h2 - PI).abs() < 1e-12
        && (h3 - PI * (1.0 - 2.0_f64.ln())).abs() < 1e-12;
    rows.push(row(
        "energetics",
        "h_term_closed_forms",
        h_ok,
        format!("{h1:.9} {h2:.9} {h3:.9}"),
    ));

    // Renormalized-energy routes on the exact unit vortex: both near zero and
    // near each other (grid agreement floor 0.03).
    let g = DomainGrid::unit_disk(1.0 / 128.0)?;
    let u = DiscreteField::hedgehog(g)?;
    let sing = detect_singularities(&u)?.configuration;
    let limit = renormalized_energy(&u, &sing, RenRoute::Limit)?;
    let integral = renormalized_energy(&u, &sing, RenRoute::Integral)?;
    let routes_ok = limit.abs() < 0.05 && integral.abs() < 0.05 && (limit - integral).abs() < 0.03;
    rows.push(row(
        "energetics",
        "vortex_renormalized_routes",
        routes_ok,
        format!("limit={limit:.6} integral={integral:.6}"),
    ));

    Ok(rows)
}

/// Run a named suite (`geometry`, `scalar`, `energetics`, or `all`).
/// Unknown names are configuration errors.
pub fn run_suite(name: &str) -> Result<Vec<CheckRow>> {
    match name {
        "geometry" => geometry_suite(),
        "scalar" => scalar_suite(),
        "energetics" => energetics_suite(),
        "all" => {
            let mut rows = geometry_suite()?;
            rows.extend(scalar_suite()?);
            rows.extend(energetics_suite()?);
            Ok(rows)
        }
        other => Err(Error::Config(format!(
            "unknown verify suite {other:?}; use geometry, scalar, energetics, or all"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_suite_is_green() {
        let rows = run_suite("scalar").unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            assert!(r.pass, "{}::{} {}", r.suite, r.name, r.detail);
        }
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(matches!(run_suite("nope"), Err(Error::Config(_))));
    }
}

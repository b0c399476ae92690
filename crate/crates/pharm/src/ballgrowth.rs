//! Topological singularity detection and the ball-growth lower-bound
//! machinery.
//!
//! A minimizer with nontrivial boundary data concentrates its p-energy, as
//! p ↗ 2, near finitely many point singularities. This module locates those
//! points on the lattice (winding of plaquette loops), then runs the growth
//! process that converts local trace estimates into global lower bounds:
//! around each singularity a disk grows at the rate `ρ̇ = E_sg^{1,p′}(trace)`
//! with `p′ = p/(p−1) ∈ (2, ∞)` the conjugate exponent; touching disks merge
//! into the smallest disk containing both (centers averaged by radius, radii
//! added); a merged disk whose combined class is cheaper than its inherited
//! radius pauses until its own growth law catches up. The process stops when
//! the total diameter reaches a prescribed budget δ.
//!
//! The history of grown circles induces the upper envelope
//!
//! `U(x) = sup { ((2π)^{p′−1} p′ E_sg^{1,p′}(q))^{1/p′} / (2πr) : x ∈ S¹(a; r) }`
//!
//! over all circles the process ever produced. Its superlevel sets are finite
//! unions of disks, so volumes, perimeters, and the weak-Lᵖ suprema
//! `sup_t t^p |{U > t}|` and `sup_t t^{p−1} Per({U > t})` have closed forms;
//! they calibrate the lower-bound certificates checked here against measured
//! lattice energies.

use std::collections::HashMap;

use crate::energetics::{core_completion, singular_energy, Certificate};
use crate::error::{Error, Result};
use crate::field::{
    circle_gradient_norms, circle_trace_charge, p_energy, p_energy_where, DiscreteField,
    SingularityConfiguration,
};
use crate::manifold::HomotopyCharge;
use crate::manifold::loop_charge;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Conjugate exponent `p′ = p/(p−1)`.
fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Trapezoid sample count for a circle trace: at least two samples per lattice
/// spacing of arc, never fewer than 64.
fn trace_samples(h: f64, radius: f64) -> usize {
    (((TWO_PI * radius / h).ceil() as usize) * 2).max(64)
}

/// The numerator of the envelope contribution of a circle carrying singular
/// energy κ at exponent p′: `((2π)^{p′−1} p′ κ)^{1/p′}`. A unit circle charge
/// gives exactly 2π, so its envelope is `1/r` — the gradient magnitude of the
/// degree-one vortex.
fn envelope_numerator(kappa: f64, pp: f64) -> f64 {
    if kappa <= 0.0 {
        0.0
    } else {
        (TWO_PI.powf(pp - 1.0) * pp * kappa).powf(1.0 / pp)
    }
}

/// A closed disk with a homotopy class attached. A zero-radius disk is empty
/// and never touches anything.
#[derive(Debug, Clone, PartialEq)]
pub struct Disk {
    pub center: [f64; 2],
    pub radius: f64,
    pub charge: HomotopyCharge,
}

impl Disk {
    #[must_use]
    pub fn new(center: [f64; 2], radius: f64, charge: HomotopyCharge) -> Self {
        Self {
            center,
            radius,
            charge,
        }
    }

    /// Whether the closed disks intersect; empty (zero-radius) disks never do.
    #[must_use]
    pub fn touches(&self, other: &Self) -> bool {
        self.radius > 0.0
            && other.radius > 0.0
            && dist(self.center, other.center) <= self.radius + other.radius + 1e-12
    }

    #[must_use]
    pub fn contains(&self, x: [f64; 2]) -> bool {
        dist(self.center, x) <= self.radius
    }

    /// Smallest disk containing two touching disks: radii add, the center is
    /// the radius-weighted average, and both inputs are internally tangent to
    /// the result when they were externally tangent to each other. Charges
    /// add component-wise.
    #[must_use]
    pub fn merged_with(&self, other: &Self) -> Self {
        let r = self.radius + other.radius;
        Self {
            center: [
                (self.radius * self.center[0] + other.radius * other.center[0]) / r,
                (self.radius * self.center[1] + other.radius * other.center[1]) / r,
            ],
            radius: r,
            charge: self.charge.concat(&other.charge),
        }
    }
}

/// Repeatedly replace the first touching pair (lexicographic index order) by
/// its merged disk until all disks are pairwise disjoint. The sum of radii and
/// the total charge are conserved, and every input disk ends up covered by
/// some output disk.
#[must_use]
pub fn merge_disks(disks: &[Disk]) -> Vec<Disk> {
    let mut out: Vec<Disk> = disks.to_vec();
    while let Some((i, j)) = first_touching(&out) {
        let merged = out[i].merged_with(&out[j]);
        out[i] = merged;
        out.remove(j);
    }
    out
}

fn first_touching(disks: &[Disk]) -> Option<(usize, usize)> {
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            if disks[i].touches(&disks[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Detected singularities plus the plaquettes whose loop charge could not be
/// resolved (flagged, never silently dropped).
#[derive(Debug, Clone)]
pub struct DetectionReport {
    pub configuration: SingularityConfiguration,
    pub unresolved_plaquettes: Vec<[f64; 2]>,
}

/// Locate topological singularities: compute the winding of every interior
/// plaquette loop, cluster active plaquettes by 8-connectivity, and place one
/// charge per cluster at the ℓ¹-weighted centroid. Clusters containing
/// under-resolved plaquettes get their charge from circle traces at radii
/// 3h…6h around the cluster centroid instead; if none resolves, detection
/// fails rather than guessing. Zero net charges are dropped. Euclidean
/// targets have no nontrivial loops, so the scan is skipped entirely.
pub fn detect_singularities(u: &DiscreteField) -> Result<DetectionReport> {
    /// Active plaquette: lattice index, resolved charge (None when the loop
    /// was too coarse), centroid.
    type ActivePlaquette = ((usize, usize), Option<HomotopyCharge>, [f64; 2]);

    let g = u.grid();
    let target = u.target();
    let h = g.h();
    let factors = target.circle_factors();

    // Row-major list keeps clustering and output order deterministic.
    let mut plaqs: Vec<ActivePlaquette> = Vec::new();
    let mut unresolved_pts: Vec<[f64; 2]> = Vec::new();
    if factors > 0 {
        for j in 0..g.ny().saturating_sub(1) {
            for i in 0..g.nx().saturating_sub(1) {
                let (ii, jj) = (i as isize, j as isize);
                if !(g.is_inside(ii, jj)
                    && g.is_inside(ii + 1, jj)
                    && g.is_inside(ii + 1, jj + 1)
                    && g.is_inside(ii, jj + 1))
                {
                    continue;
                }
                let c = u.cell_centroid(i, j);
                // Plaquettes hugging the staircase boundary see interpolation
                // artifacts, not interior vortices; boundary classes live in
                // the Dirichlet datum.
                if g.boundary_distance(c[0], c[1]) < 2.0 * h {
                    continue;
                }
                let cycle: Vec<Vec<f64>> = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                    .iter()
                    .map(|&(a, b)| u.value(a, b).to_vec())
                    .collect();
                match loop_charge(&target, &cycle) {
                    Ok(q) => {
                        if !q.is_zero() {
                            plaqs.push(((i, j), Some(q), c));
                        }
                    }
                    Err(Error::UnderResolvedLoop) | Err(Error::AmbiguousWinding) => {
                        unresolved_pts.push(c);
                        plaqs.push(((i, j), None, c));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let index: HashMap<(usize, usize), usize> =
        plaqs.iter().enumerate().map(|(k, p)| (p.0, k)).collect();
    let mut seen = vec![false; plaqs.len()];
    let mut points: Vec<([f64; 2], HomotopyCharge)> = Vec::new();
    for start in 0..plaqs.len() {
        if seen[start] {
            continue;
        }
        // 8-connected component of active plaquettes.
        let mut cluster = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            cluster.push(k);
            let (ci, cj) = plaqs[k].0;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let ni = ci as i64 + di;
                    let nj = cj as i64 + dj;
                    if ni < 0 || nj < 0 {
                        continue;
                    }
                    if let Some(&m) = index.get(&(ni as usize, nj as usize)) {
                        if !seen[m] {
                            seen[m] = true;
                            stack.push(m);
                        }
                    }
                }
            }
        }
        cluster.sort_unstable();

        if cluster.iter().all(|&k| plaqs[k].1.is_some()) {
            let mut total = HomotopyCharge::zero(factors);
            let mut wsum = 0.0;
            let mut centroid = [0.0, 0.0];
            for &k in &cluster {
                let q = plaqs[k].1.as_ref().unwrap();
                let w = q.l1() as f64;
                total = total.concat(q);
                centroid[0] += w * plaqs[k].2[0];
                centroid[1] += w * plaqs[k].2[1];
                wsum += w;
            }
            if total.is_zero() {
                continue;
            }
            points.push(([centroid[0] / wsum, centroid[1] / wsum], total));
        } else {
            // Plaquette loops failed inside the cluster; fall back to circle
            // traces around the plain centroid, widening until one resolves.
            let n = cluster.len() as f64;
            let mut centroid = [0.0, 0.0];
            for &k in &cluster {
                centroid[0] += plaqs[k].2[0] / n;
                centroid[1] += plaqs[k].2[1] / n;
            }
            let mut charge = None;
            for mult in [3.0, 4.0, 5.0, 6.0] {
                let r = mult * h;
                if let Ok(q) = circle_trace_charge(u, centroid, r, trace_samples(h, r)) {
                    charge = Some(q);
                    break;
                }
            }
            match charge {
                Some(q) if q.is_zero() => {}
                Some(q) => points.push((centroid, q)),
                None => {
                    return Err(Error::InsufficientResolution { radius: 6.0 * h });
                }
            }
        }
    }

    Ok(DetectionReport {
        configuration: SingularityConfiguration::new(points, g.kind())?,
        unresolved_plaquettes: unresolved_pts,
    })
}

/// What happened at one instant of the growth process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthEventKind {
    Seed,
    Merge,
    Stop,
}

/// A snapshot of every live disk at an event time.
#[derive(Debug, Clone)]
pub struct GrowthEvent {
    pub kind: GrowthEventKind,
    pub s: f64,
    pub disks: Vec<Disk>,
}

/// One circle family `S¹(a; r)`, `r ∈ [r_birth, r_end]`, traversed by a disk
/// between its creation (seed or merge) and its end (merge or stop). `kappa`
/// is the singular energy of its class at the conjugate exponent — its growth
/// rate — and `num` the envelope numerator derived from it.
#[derive(Debug, Clone)]
pub struct GrowthSegment {
    pub center: [f64; 2],
    pub charge: HomotopyCharge,
    pub kappa: f64,
    pub num: f64,
    pub r_birth: f64,
    pub r_end: f64,
    pub children: Vec<usize>,
}

/// The full history of the growth process.
#[derive(Debug, Clone)]
pub struct BallGrowth {
    pub p: f64,
    pub delta: f64,
    /// False when the process stalled (every live disk has zero growth rate,
    /// which happens exactly when merges cancelled all charge) before the
    /// diameter budget was spent.
    pub reached_delta: bool,
    pub stop_s: f64,
    pub seeds: SingularityConfiguration,
    pub disks: Vec<Disk>,
    pub events: Vec<GrowthEvent>,
    pub segments: Vec<GrowthSegment>,
    pub roots: Vec<usize>,
}

struct ActiveDisk {
    seg: usize,
    center: [f64; 2],
    charge: HomotopyCharge,
    kappa: f64,
    radius: f64,
    growing: bool,
}

fn snapshot(actives: &[ActiveDisk]) -> Vec<Disk> {
    actives
        .iter()
        .map(|a| Disk::new(a.center, a.radius, a.charge.clone()))
        .collect()
}

/// Run the growth process on the singularities of `u` with diameter budget
/// `delta`, for `p ∈ (1, 2)`. Each seed's trace class is verified against its
/// detected charge before growth starts; each merged disk's class is verified
/// by a trace just outside it whenever no other disk pollutes that circle.
/// Fails when δ exceeds the least boundary distance, when a disk gets within
/// five lattice spacings of the boundary, or when a verification trace
/// disagrees with the bookkeeping.
pub fn grow_balls(u: &DiscreteField, p: f64, delta: f64) -> Result<BallGrowth> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidInput(format!(
            "ball growth needs p strictly inside (1, 2), got {p}"
        )));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidInput(format!(
            "diameter budget must be positive, got {delta}"
        )));
    }
    let g = u.grid();
    let h = g.h();
    let pp = conjugate(p);
    let report = detect_singularities(u)?;
    let seeds = report.configuration;
    if seeds.is_empty() {
        return Err(Error::InvalidConfiguration(
            "ball growth needs at least one detected singularity".into(),
        ));
    }

    let least_margin = seeds
        .points()
        .iter()
        .map(|(a, _)| g.boundary_distance(a[0], a[1]))
        .fold(f64::INFINITY, f64::min);
    if delta > least_margin {
        return Err(Error::TooCloseToBoundary(format!(
            "diameter budget {delta} exceeds the least boundary distance {least_margin:.6}"
        )));
    }

    // Verify every seed's class by an independent circle trace before
    // trusting it with a growth rate.
    for (a, q) in seeds.points() {
        let mut verified = false;
        for mult in [4.0, 5.0, 6.0] {
            let r = mult * h;
            match circle_trace_charge(u, *a, r, trace_samples(h, r)) {
                Ok(traced) if traced == *q => {
                    verified = true;
                    break;
                }
                Ok(_) => {}
                Err(Error::TraceOutsideDomain) => {
                    return Err(Error::TooCloseToBoundary(format!(
                        "seed at ({:.4}, {:.4}) has no room for a verification trace",
                        a[0], a[1]
                    )));
                }
                Err(_) => {}
            }
        }
        if !verified {
            return Err(Error::InsufficientResolution { radius: 6.0 * h });
        }
    }

    let mut segments: Vec<GrowthSegment> = Vec::new();
    let mut actives: Vec<ActiveDisk> = Vec::new();
    for (a, q) in seeds.points() {
        let kappa = singular_energy(q, pp);
        segments.push(GrowthSegment {
            center: *a,
            charge: q.clone(),
            kappa,
            num: envelope_numerator(kappa, pp),
            r_birth: 0.0,
            r_end: 0.0,
            children: Vec::new(),
        });
        actives.push(ActiveDisk {
            seg: segments.len() - 1,
            center: *a,
            charge: q.clone(),
            kappa,
            radius: 0.0,
            growing: true,
        });
    }

    let mut events = vec![GrowthEvent {
        kind: GrowthEventKind::Seed,
        s: 0.0,
        disks: snapshot(&actives),
    }];
    let mut s = 0.0_f64;
    let mut reached_delta = true;

    loop {
        let sum_diam: f64 = actives.iter().map(|a| 2.0 * a.radius).sum();

        // Stop: the diameter budget is spent.
        if sum_diam >= delta * (1.0 - 1e-12) {
            break;
        }

        // Resume: a paused merged disk whose growth law caught up.
        if let Some(i) = actives
            .iter()
            .position(|a| !a.growing && a.kappa > 0.0 && a.kappa * s >= a.radius * (1.0 - 1e-12))
        {
            actives[i].growing = true;
            continue;
        }

        // Merge: the first touching pair in index order.
        let touching = {
            let disks = snapshot(&actives);
            first_touching(&disks)
        };
        if let Some((i, j)) = touching {
            merge_actives(u, &mut segments, &mut actives, i, j, s, pp, h)?;
            events.push(GrowthEvent {
                kind: GrowthEventKind::Merge,
                s,
                disks: snapshot(&actives),
            });
            continue;
        }

        // Advance to the next event: a resume, a first contact, or the stop.
        let slope: f64 = actives
            .iter()
            .filter(|a| a.growing)
            .map(|a| 2.0 * a.kappa)
            .sum();
        let mut t_next = if slope > 0.0 {
            s + (delta - sum_diam) / slope
        } else {
            f64::INFINITY
        };
        for a in &actives {
            if !a.growing && a.kappa > 0.0 {
                t_next = t_next.min(a.radius / a.kappa);
            }
        }
        for i in 0..actives.len() {
            for j in i + 1..actives.len() {
                let rate = actives[i].kappa * f64::from(u8::from(actives[i].growing))
                    + actives[j].kappa * f64::from(u8::from(actives[j].growing));
                if rate > 0.0 {
                    let gap =
                        dist(actives[i].center, actives[j].center) - actives[i].radius - actives[j].radius;
                    t_next = t_next.min(s + (gap / rate).max(0.0));
                }
            }
        }
        if !t_next.is_finite() {
            // Every live disk is inert: merges cancelled all charge. The
            // budget is unreachable; report the truncated history honestly.
            reached_delta = false;
            break;
        }
        let dt = t_next - s;
        for a in actives.iter_mut() {
            if a.growing {
                a.radius += a.kappa * dt;
            }
        }
        s = t_next;
    }

    // Clearance and bookkeeping at the final instant.
    for a in &actives {
        if g.boundary_distance(a.center[0], a.center[1]) - a.radius < 5.0 * h {
            return Err(Error::TooCloseToBoundary(format!(
                "final disk at ({:.4}, {:.4}) with radius {:.4} has less than 5h of boundary clearance",
                a.center[0], a.center[1], a.radius
            )));
        }
        segments[a.seg].r_end = a.radius;
    }
    events.push(GrowthEvent {
        kind: GrowthEventKind::Stop,
        s,
        disks: snapshot(&actives),
    });
    let roots = actives.iter().map(|a| a.seg).collect();

    Ok(BallGrowth {
        p,
        delta,
        reached_delta,
        stop_s: s,
        seeds,
        disks: snapshot(&actives),
        events,
        segments,
        roots,
    })
}

#[allow(clippy::too_many_arguments)]
fn merge_actives(
    u: &DiscreteField,
    segments: &mut Vec<GrowthSegment>,
    actives: &mut Vec<ActiveDisk>,
    i: usize,
    j: usize,
    s: f64,
    pp: f64,
    h: f64,
) -> Result<()> {
    let g = u.grid();
    let r_new = actives[i].radius + actives[j].radius;
    let center = [
        (actives[i].radius * actives[i].center[0] + actives[j].radius * actives[j].center[0])
            / r_new,
        (actives[i].radius * actives[i].center[1] + actives[j].radius * actives[j].center[1])
            / r_new,
    ];
    let charge = actives[i].charge.concat(&actives[j].charge);

    if g.boundary_distance(center[0], center[1]) - r_new < 5.0 * h {
        return Err(Error::TooCloseToBoundary(format!(
            "merged disk at ({:.4}, {:.4}) with radius {:.4} has less than 5h of boundary clearance",
            center[0], center[1], r_new
        )));
    }

    // Verify the merged class by a trace just outside the new disk — but only
    // when that circle is clean, i.e. every other disk stays entirely outside
    // it (a foreign disk inside the trace would add its winding).
    let r_trace = r_new + 2.0 * h;
    let clean = actives.iter().enumerate().all(|(k, o)| {
        k == i || k == j || dist(center, o.center) >= r_trace + o.radius
    });
    if clean {
        match circle_trace_charge(u, center, r_trace, trace_samples(h, r_trace)) {
            Ok(traced) if traced == charge => {}
            Ok(_) | Err(Error::UnderResolvedLoop) | Err(Error::AmbiguousWinding) => {
                return Err(Error::InsufficientResolution { radius: r_trace });
            }
            Err(e) => return Err(e),
        }
    }

    let kappa = singular_energy(&charge, pp);
    segments[actives[i].seg].r_end = actives[i].radius;
    segments[actives[j].seg].r_end = actives[j].radius;
    let seg = segments.len();
    segments.push(GrowthSegment {
        center,
        charge: charge.clone(),
        kappa,
        num: envelope_numerator(kappa, pp),
        r_birth: r_new,
        r_end: r_new,
        children: vec![actives[i].seg, actives[j].seg],
    });

    // The merged disk keeps its inherited radius; it grows again only once
    // its own law κ·s catches up (immediately, when classes add without
    // cancellation — then radii were κᵢ·s and κ adds).
    let growing = kappa * s >= r_new * (1.0 - 1e-9);
    actives[i] = ActiveDisk {
        seg,
        center,
        charge,
        kappa,
        radius: r_new,
        growing,
    };
    actives.remove(j);
    Ok(())
}

/// Sharp lower bound for the p-energy of a map on the annulus
/// `σ < |x| < ρ` whose traces carry a class of length λ:
///
/// `(ρ^{2−p} − σ^{2−p}) · λ^p / ((2π)^{p−1} p (2−p))` for p < 2, and the
/// limit `λ²/(4π) · log(ρ/σ)` at p = 2, which diverges as σ ↓ 0 — the reason
/// the whole theory works at p < 2.
pub fn annulus_lower_bound(lambda: f64, sigma: f64, rho: f64, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p = {p} outside [1, 2]")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "class length must be finite and nonnegative, got {lambda}"
        )));
    }
    if !(sigma >= 0.0 && rho > sigma) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!(
            "annulus radii need 0 ≤ σ < ρ < ∞, got σ = {sigma}, ρ = {rho}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if p == 2.0 {
        if sigma == 0.0 {
            return Err(Error::DivergentBound);
        }
        return Ok(lambda * lambda / (4.0 * PI) * (rho / sigma).ln());
    }
    Ok((rho.powf(2.0 - p) - sigma.powf(2.0 - p)) * lambda.powf(p)
        / (TWO_PI.powf(p - 1.0) * p * (2.0 - p)))
}

/// The upper envelope of all circle contributions produced by a growth run.
/// Values, superlevel volumes and perimeters, and the weak-Lᵖ suprema are all
/// exact (the superlevel sets are finite unions of disks).
#[derive(Debug, Clone)]
pub struct UField {
    p: f64,
    segments: Vec<GrowthSegment>,
    roots: Vec<usize>,
}

impl UField {
    #[must_use]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Pointwise value `U(x)`; +∞ exactly at the seed points.
    #[must_use]
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let mut best = 0.0;
        for &r in &self.roots {
            self.value_rec(r, x, &mut best);
        }
        best
    }

    fn value_rec(&self, k: usize, x: [f64; 2], best: &mut f64) {
        let seg = &self.segments[k];
        let d = dist(x, seg.center);
        if d > seg.r_end {
            return;
        }
        if seg.num > 0.0 {
            let denom = d.max(seg.r_birth);
            let v = if denom > 0.0 {
                seg.num / (TWO_PI * denom)
            } else {
                f64::INFINITY
            };
            if v > *best {
                *best = v;
            }
        }
        // Children live strictly inside the birth disk.
        if d < seg.r_birth {
            for &c in &seg.children {
                self.value_rec(c, x, best);
            }
        }
    }

    /// Area of `{U > t}` (the support's area when t ≤ 0). Each subtree
    /// contributes either one disk — when its own circle family exceeds t —
    /// or the disjoint union of its children's sets.
    #[must_use]
    pub fn superlevel_volume(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &r in &self.roots {
            self.vol_rec(r, t, &mut acc);
        }
        acc
    }

    fn vol_rec(&self, k: usize, t: f64, acc: &mut f64) {
        let seg = &self.segments[k];
        if seg.r_end <= 0.0 {
            return;
        }
        let r_t = if t > 0.0 {
            seg.num / (TWO_PI * t)
        } else {
            f64::INFINITY
        };
        if r_t > seg.r_birth {
            let r = r_t.min(seg.r_end);
            *acc += PI * r * r;
        } else {
            for &c in &seg.children {
                self.vol_rec(c, t, acc);
            }
        }
    }

    /// Perimeter of `{U > t}`: the superlevel set is a finite union of
    /// pairwise-disjoint-or-nested circles, so perimeters add.
    #[must_use]
    pub fn superlevel_perimeter(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &r in &self.roots {
            self.per_rec(r, t, &mut acc);
        }
        acc
    }

    fn per_rec(&self, k: usize, t: f64, acc: &mut f64) {
        let seg = &self.segments[k];
        if seg.r_end <= 0.0 {
            return;
        }
        let r_t = if t > 0.0 {
            seg.num / (TWO_PI * t)
        } else {
            f64::INFINITY
        };
        if r_t > seg.r_birth {
            *acc += TWO_PI * r_t.min(seg.r_end);
        } else {
            for &c in &seg.children {
                self.per_rec(c, t, acc);
            }
        }
    }

    /// On each interval between breakpoints the superlevel composition is
    /// fixed, so `t^p·vol` is `A t^{p−2} + B t^p` there; collect the
    /// coefficients at a sample point strictly inside.
    fn vol_coeffs(&self, k: usize, t: f64, a: &mut f64, b: &mut f64) {
        let seg = &self.segments[k];
        if seg.r_end <= 0.0 {
            return;
        }
        let hi = if seg.r_birth > 0.0 {
            seg.num / (TWO_PI * seg.r_birth)
        } else {
            f64::INFINITY
        };
        let lo = seg.num / (TWO_PI * seg.r_end);
        if t >= hi {
            for &c in &seg.children {
                self.vol_coeffs(c, t, a, b);
            }
        } else if t <= lo {
            *b += PI * seg.r_end * seg.r_end;
        } else {
            *a += seg.num * seg.num / (4.0 * PI);
        }
    }

    /// Same for `t^{p−1}·per`, which is `C t^{p−2} + D t^{p−1}` piecewise.
    fn per_coeffs(&self, k: usize, t: f64, c: &mut f64, d: &mut f64) {
        let seg = &self.segments[k];
        if seg.r_end <= 0.0 {
            return;
        }
        let hi = if seg.r_birth > 0.0 {
            seg.num / (TWO_PI * seg.r_birth)
        } else {
            f64::INFINITY
        };
        let lo = seg.num / (TWO_PI * seg.r_end);
        if t >= hi {
            for &ch in &seg.children {
                self.per_coeffs(ch, t, c, d);
            }
        } else if t <= lo {
            *d += TWO_PI * seg.r_end;
        } else {
            *c += seg.num;
        }
    }

    /// Thresholds where some circle family saturates: the piecewise-smooth
    /// structure of the superlevel sets changes only there.
    fn breakpoints(&self) -> Vec<f64> {
        let mut bps = Vec::new();
        for seg in &self.segments {
            if seg.num <= 0.0 || seg.r_end <= 0.0 {
                continue;
            }
            bps.push(seg.num / (TWO_PI * seg.r_end));
            if seg.r_birth > 0.0 {
                bps.push(seg.num / (TWO_PI * seg.r_birth));
            }
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        bps
    }

    /// `(argmax, sup)` of `t ↦ t^p |{U > t}|` over t > 0, exact up to
    /// roundoff: per interval the candidates are the endpoints and the one
    /// interior critical point of `A t^{p−2} + B t^p`.
    #[must_use]
    pub fn sup_t_volume(&self) -> (f64, f64) {
        self.sup_over_breakpoints(
            |uf, t, a, b| {
                for &r in &uf.roots {
                    uf.vol_coeffs(r, t, a, b);
                }
            },
            self.p - 2.0,
            self.p,
            |a, b, p| {
                // d/dt [A t^{p−2} + B t^p] = 0 at t² = A(2−p)/(Bp).
                if a > 0.0 && b > 0.0 && p < 2.0 {
                    Some((a * (2.0 - p) / (b * p)).sqrt())
                } else {
                    None
                }
            },
        )
    }

    /// `(argmax, sup)` of `t ↦ t^{p−1} Per({U > t})` over t > 0.
    #[must_use]
    pub fn sup_t_perimeter(&self) -> (f64, f64) {
        self.sup_over_breakpoints(
            |uf, t, c, d| {
                for &r in &uf.roots {
                    uf.per_coeffs(r, t, c, d);
                }
            },
            self.p - 2.0,
            self.p - 1.0,
            |c, d, p| {
                // d/dt [C t^{p−2} + D t^{p−1}] = 0 at t = C(2−p)/(D(p−1)).
                if c > 0.0 && d > 0.0 && p < 2.0 {
                    Some(c * (2.0 - p) / (d * (p - 1.0)))
                } else {
                    None
                }
            },
        )
    }

    fn sup_over_breakpoints(
        &self,
        coeffs: impl Fn(&Self, f64, &mut f64, &mut f64),
        exp_a: f64,
        exp_b: f64,
        critical: impl Fn(f64, f64, f64) -> Option<f64>,
    ) -> (f64, f64) {
        let bps = self.breakpoints();
        if bps.is_empty() {
            return (0.0, 0.0);
        }
        let mut best = (0.0, 0.0);
        let m = bps.len();
        for w in 0..=m {
            let lo = if w == 0 { 0.0 } else { bps[w - 1] };
            let hi = if w == m { f64::INFINITY } else { bps[w] };
            if hi <= lo {
                continue;
            }
            let sample = if lo == 0.0 {
                hi / 2.0
            } else if hi.is_infinite() {
                lo * 2.0
            } else {
                (lo * hi).sqrt()
            };
            let (mut a, mut b) = (0.0, 0.0);
            coeffs(self, sample, &mut a, &mut b);
            let f = |t: f64| a * t.powf(exp_a) + b * t.powf(exp_b);
            let mut consider = |t: f64| {
                let v = f(t);
                if v > best.1 {
                    best = (t, v);
                }
            };
            if lo > 0.0 {
                consider(lo);
            }
            if hi.is_finite() {
                consider(hi);
            }
            if let Some(t) = critical(a, b, self.p) {
                if t > lo && t < hi && t.is_finite() {
                    consider(t);
                }
            }
        }
        best
    }
}

/// The lower-bound certificate table induced by one growth run, together with
/// the quantities entering it.
#[derive(Debug, Clone)]
pub struct MixedEstimateReport {
    pub p: f64,
    /// Σ of final radii — the δ entering the radii-sum and balance rows.
    pub delta_radii: f64,
    /// Excision radius used to complete divergent core energies, when the
    /// final geometry leaves room for one.
    pub completion_radius: Option<f64>,
    pub sup_volume: (f64, f64),
    pub sup_perimeter: (f64, f64),
    pub certificates: Vec<Certificate>,
}

/// Largest ρ₀ ∈ {16h, 8h, 4h} whose excised cores are pairwise disjoint,
/// inside the domain, and inside the final disks — so completed energies are
/// defined and stay supported where the certificates integrate.
fn completion_radius(u: &DiscreteField, growth: &BallGrowth) -> Option<f64> {
    let g = u.grid();
    let h = g.h();
    let pts = growth.seeds.points();
    for mult in [16.0, 8.0, 4.0] {
        let rho0 = mult * h;
        let pair_ok = (0..pts.len()).all(|i| {
            (i + 1..pts.len()).all(|j| dist(pts[i].0, pts[j].0) > 2.0 * rho0)
        });
        let boundary_ok = pts
            .iter()
            .all(|(a, _)| g.boundary_distance(a[0], a[1]) > rho0);
        let inside_ok = pts.iter().all(|(a, _)| {
            growth
                .disks
                .iter()
                .any(|d| d.radius - dist(*a, d.center) >= rho0)
        });
        if pair_ok && boundary_ok && inside_ok {
            return Some(rho0);
        }
    }
    None
}

fn union_contains(disks: &[Disk], x: f64, y: f64) -> bool {
    disks.iter().any(|d| d.contains([x, y]))
}

/// Integral of `κ^{p−1} r^{1−p} dr` over a segment subtree, i.e.
/// `Σ κ^{p−1}(r_end^{2−p} − r_birth^{2−p})/(2−p)` — the right-hand side of
/// the growth estimate before the (2−p) factor cancels.
fn subtree_growth_integral(segments: &[GrowthSegment], k: usize, p: f64) -> f64 {
    let seg = &segments[k];
    let own = seg.kappa.powf(p - 1.0)
        * (seg.r_end.powf(2.0 - p) - seg.r_birth.powf(2.0 - p));
    own + seg
        .children
        .iter()
        .map(|&c| subtree_growth_integral(segments, c, p))
        .sum::<f64>()
}

/// Build the envelope field of a completed growth run and evaluate the
/// certificate table: the balance between excess gradient and envelope mass,
/// the weak-Lᵖ volume and perimeter bounds, the radii-sum lower bound, and
/// the growth estimate for the full collection and each root's subtree.
/// `p` and `delta` must match the growth run.
pub fn build_u_field(
    u: &DiscreteField,
    growth: &BallGrowth,
    p: f64,
    delta: f64,
) -> Result<(UField, MixedEstimateReport)> {
    if (p - growth.p).abs() > 1e-12 || (delta - growth.delta).abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "envelope parameters must match the growth run".into(),
        ));
    }
    let field = UField {
        p,
        segments: growth.segments.clone(),
        roots: growth.roots.clone(),
    };

    let g = u.grid();
    let pp = conjugate(p);
    let delta_radii: f64 = growth.disks.iter().map(|d| d.radius).sum();
    let kappa_sum: f64 = growth.roots.iter().map(|&r| growth.segments[r].kappa).sum();

    let rho0 = completion_radius(u, growth);
    let lambdas: Vec<f64> = growth
        .seeds
        .points()
        .iter()
        .map(|(_, q)| q.lambda())
        .collect();
    let energy_total = match rho0 {
        Some(r0) => {
            let perf = p_energy_where(u, p, |x, y| {
                growth
                    .seeds
                    .points()
                    .iter()
                    .all(|(a, _)| (x - a[0]).hypot(y - a[1]) > r0)
            })?;
            perf + core_completion(&lambdas, r0, p)
        }
        None => p_energy(u, p)?,
    };
    let energy_union = match rho0 {
        Some(r0) => {
            let perf = p_energy_where(u, p, |x, y| {
                union_contains(&growth.disks, x, y)
                    && growth
                        .seeds
                        .points()
                        .iter()
                        .all(|(a, _)| (x - a[0]).hypot(y - a[1]) > r0)
            })?;
            perf + core_completion(&lambdas, r0, p)
        }
        None => p_energy_where(u, p, |x, y| union_contains(&growth.disks, x, y))?,
    };

    // Excess of the measured gradient over the envelope, integrated where the
    // disks sit. The envelope majorizes the vortex profile, so the excess is
    // small for minimizers; near the seeds U = +∞ kills the integrand.
    let w = g.h() * g.h();
    let mut excess = 0.0;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if let Some(f2) = u.cell_frob_sq(i, j) {
                let c = u.cell_centroid(i, j);
                if union_contains(&growth.disks, c[0], c[1]) {
                    let over = f2.sqrt() - field.value(c);
                    if over > 0.0 {
                        excess += over.powf(p) * w;
                    }
                }
            }
        }
    }

    let sup_volume = field.sup_t_volume();
    let sup_perimeter = field.sup_t_perimeter();
    let sys = u.target().systole();

    let mut certificates = Vec::new();

    let balance_lhs = (p - 1.0) / p * excess
        + (TWO_PI * delta_radii).powf(2.0 - p)
            / (p.powf(2.0 - p) * (p - 1.0).powf(p - 1.0))
            * kappa_sum.powf(p - 1.0);
    certificates.push(Certificate::le(
        "mixed_balance",
        balance_lhs,
        (3.0 - p) * p / 2.0 * energy_union,
        0.10,
    ));

    certificates.push(Certificate::le(
        "weak_lp_volume",
        sup_volume.1,
        (2.0 - p) * p.powf(p - 1.0)
            / (2.0 * (p - 1.0).powf(p - 1.0) * TWO_PI.powf(2.0 - p))
            * energy_total,
        0.10,
    ));

    certificates.push(Certificate::le(
        "level_perimeter",
        sup_perimeter.1,
        (2.0 - p) * TWO_PI.powf(3.0 - p) * pp.powf(p - 1.0) / sys * energy_total,
        0.10,
    ));

    let total = growth
        .seeds
        .total_charge()
        .expect("growth configurations are nonempty");
    certificates.push(Certificate::le(
        "radii_sum_lower_bound",
        delta_radii.powf(2.0 - p) * singular_energy(&total, pp).powf(p - 1.0),
        (2.0 - p) * (p - 1.0).powf(p - 1.0) / (TWO_PI / p).powf(2.0 - p) * energy_union,
        0.10,
    ));

    let full_rhs: f64 = growth
        .roots
        .iter()
        .map(|&r| subtree_growth_integral(&growth.segments, r, p))
        .sum();
    certificates.push(Certificate::le(
        "subcollection_growth_full",
        kappa_sum.powf(p - 1.0) * delta_radii.powf(2.0 - p),
        full_rhs,
        1e-9,
    ));
    for (k, &r) in growth.roots.iter().enumerate() {
        let seg = &growth.segments[r];
        certificates.push(Certificate::le(
            &format!("subcollection_growth_singleton_{k}"),
            seg.kappa.powf(p - 1.0) * seg.r_end.powf(2.0 - p),
            subtree_growth_integral(&growth.segments, r, p),
            1e-9,
        ));
    }

    Ok((
        field,
        MixedEstimateReport {
            p,
            delta_radii,
            completion_radius: rho0,
            sup_volume,
            sup_perimeter,
            certificates,
        },
    ))
}

/// Check the annulus lower bound on every circle family of a growth run:
/// measured energy on `r_birth < |x − a| < r_end` (inner radius clipped to 6h
/// — below that the lattice can't resolve the vortex profile) against the
/// sharp bound for the family's class. Families too thin to measure are
/// skipped.
pub fn annulus_certificates(u: &DiscreteField, growth: &BallGrowth) -> Result<Vec<Certificate>> {
    let h = u.grid().h();
    let mut certs = Vec::new();
    for (k, seg) in growth.segments.iter().enumerate() {
        let inner = seg.r_birth.max(6.0 * h);
        let outer = seg.r_end;
        if outer - inner < 2.0 * h {
            continue;
        }
        let measured = p_energy_where(u, growth.p, |x, y| {
            let d = (x - seg.center[0]).hypot(y - seg.center[1]);
            d > inner && d < outer
        })?;
        let bound = annulus_lower_bound(seg.charge.lambda(), inner, outer, growth.p)?;
        certs.push(Certificate::ge(
            &format!("annulus_lower_bound_{k}"),
            measured,
            bound,
            0.10,
        ));
    }
    Ok(certs)
}

/// Second-order expansion check on one circle: with η the length of the
/// trace's class and a = η/(2πr) the calibrated constant speed,
///
/// `η^p/(p(2πr)^{p−1}) + (1−1/p) ∮ (|Du| − a)₊^p ≤ (3−p)p/2 · ∮ |Du|^p/p`.
///
/// Equality (up to the (3−p)p/2 factor) at the pure vortex profile.
pub fn circle_taylor_certificate(
    u: &DiscreteField,
    center: [f64; 2],
    radius: f64,
    p: f64,
) -> Result<Certificate> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p = {p} outside [1, 2]")));
    }
    let h = u.grid().h();
    let q = circle_trace_charge(u, center, radius, trace_samples(h, radius))?;
    let eta = q.lambda();
    let (norms, weight) = circle_gradient_norms(u, center, radius)?;
    let a = eta / (TWO_PI * radius);
    let excess: f64 = norms
        .iter()
        .map(|&m| (m - a).max(0.0).powf(p))
        .sum::<f64>()
        * weight;
    let energy: f64 = norms.iter().map(|&m| m.powf(p) / p).sum::<f64>() * weight;
    let lhs = eta.powf(p) / (p * (TWO_PI * radius).powf(p - 1.0)) + (1.0 - 1.0 / p) * excess;
    Ok(Certificate::le(
        "circle_taylor",
        lhs,
        (3.0 - p) * p / 2.0 * energy,
        0.05,
    ))
}

/// Energy-gap triviality test on the annulus `σ < |x − a| < ρ`: when the
/// measured energy is strictly below the bound that any nontrivial class
/// would force (λ = systole), the mid-circle trace must be nullhomotopic.
/// `pass` records that implication — vacuously true when the energy admits a
/// nontrivial class.
pub fn triviality_certificate(
    u: &DiscreteField,
    center: [f64; 2],
    sigma: f64,
    rho: f64,
    p: f64,
) -> Result<Certificate> {
    let sys = u.target().systole();
    let bound = if sys.is_finite() {
        annulus_lower_bound(sys, sigma, rho, p)?
    } else {
        f64::INFINITY
    };
    let measured = p_energy_where(u, p, |x, y| {
        let d = (x - center[0]).hypot(y - center[1]);
        d > sigma && d < rho
    })?;
    let mid = (sigma + rho) / 2.0;
    let h = u.grid().h();
    let q = circle_trace_charge(u, center, mid, trace_samples(h, mid))?;
    Ok(Certificate {
        name: "triviality".into(),
        lhs: measured,
        rhs: bound,
        slack: 0.0,
        pass: measured >= bound || q.is_zero(),
    })
}

/// `(argmax, sup)` of `t ↦ t^q · |{|Du| > t}|` over `0 < t ≤ level_cap`,
/// measured on lattice cells. The cap acknowledges that levels beyond O(1/h)
/// see only discretization error, never the continuum profile.
pub fn weak_gradient_quasinorm(
    u: &DiscreteField,
    q: f64,
    level_cap: f64,
) -> Result<(f64, f64)> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidInput(format!(
            "quasinorm exponent must be positive, got {q}"
        )));
    }
    if !(level_cap > 0.0) {
        return Err(Error::InvalidInput(format!(
            "level cap must be positive, got {level_cap}"
        )));
    }
    let g = u.grid();
    let w = g.h() * g.h();
    let mut vals: Vec<f64> = Vec::new();
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if let Some(f2) = u.cell_frob_sq(i, j) {
                vals.push(f2.sqrt());
            }
        }
    }
    vals.sort_by(|a, b| f64::total_cmp(b, a));
    let mut best = (0.0, 0.0);
    // At the cap the count is strictly-above; at a value v the supremum over
    // t ↑ v uses the count of cells ≥ v.
    let n_gt_cap = vals.iter().take_while(|&&v| v > level_cap).count();
    let at_cap = level_cap.powf(q) * n_gt_cap as f64 * w;
    if at_cap > best.1 {
        best = (level_cap, at_cap);
    }
    for (k, &v) in vals.iter().enumerate() {
        if v > level_cap || v <= 0.0 {
            continue;
        }
        if k + 1 < vals.len() && vals[k + 1] == v {
            continue;
        }
        let cand = v.powf(q) * (k + 1) as f64 * w;
        if cand > best.1 {
            best = (v, cand);
        }
    }
    Ok(best)
}

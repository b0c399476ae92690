//! Target manifolds, nearest-point projection, systole, and winding charges.
//!
//! Supported targets are the unit circle `𝕊¹ ⊂ ℝ²`, the flat torus represented
//! extrinsically as two unit circles in `ℝ⁴` with the product metric, and
//! Euclidean space `ℝ^d`. The extrinsic torus makes projection factor-wise and
//! the length formula `λ(w)² = λ(w₁)² + λ(w₂)²` exact.
//!
//! The homotopy class of a sampled loop is computed per circle factor by summing
//! principal-branch angle increments. This is exact whenever consecutive samples
//! subtend less than π (a "resolvable" loop) and a hard error otherwise: winding
//! numbers silently computed from under-resolved data poison everything built on
//! top of them.

use crate::error::{Error, Result};

/// Codomain of the maps under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// Unit circle in `ℝ²`.
    Circle,
    /// Product of two unit circles embedded in `ℝ⁴`.
    FlatTorus,
    /// Euclidean space of the given dimension (no topology, infinite systole).
    Euclidean(usize),
}

/// A target manifold together with its ambient embedding data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TargetManifold {
    kind: TargetKind,
}

impl TargetManifold {
    #[must_use]
    pub const fn new(kind: TargetKind) -> Self {
        Self { kind }
    }

    #[must_use]
    pub const fn circle() -> Self {
        Self::new(TargetKind::Circle)
    }

    #[must_use]
    pub const fn flat_torus() -> Self {
        Self::new(TargetKind::FlatTorus)
    }

    #[must_use]
    pub const fn euclidean(dim: usize) -> Self {
        Self::new(TargetKind::Euclidean(dim))
    }

    #[must_use]
    pub const fn kind(&self) -> TargetKind {
        self.kind
    }

    /// Dimension of the ambient space the manifold is embedded in: 2 for the
    /// circle, 4 for the torus, `d` for `ℝ^d`.
    #[must_use]
    pub const fn ambient_dim(&self) -> usize {
        match self.kind {
            TargetKind::Circle => 2,
            TargetKind::FlatTorus => 4,
            TargetKind::Euclidean(d) => d,
        }
    }

    /// Number of circle factors (the length of a winding vector).
    #[must_use]
    pub const fn circle_factors(&self) -> usize {
        match self.kind {
            TargetKind::Circle => 1,
            TargetKind::FlatTorus => 2,
            TargetKind::Euclidean(_) => 0,
        }
    }

    /// Least length of a non-contractible loop: 2π for one unit circle, 2π for
    /// the flat torus (its shortest nontrivial class winds once around one
    /// factor), and +∞ for Euclidean space, which has no nontrivial loops.
    #[must_use]
    pub fn systole(&self) -> f64 {
        match self.kind {
            TargetKind::Circle | TargetKind::FlatTorus => 2.0 * std::f64::consts::PI,
            TargetKind::Euclidean(_) => f64::INFINITY,
        }
    }

    /// A fixed point on the manifold, used for constant boundary data and as a
    /// projection fallback is never needed (degenerate blocks are errors).
    #[must_use]
    pub fn basepoint(&self) -> Vec<f64> {
        match self.kind {
            TargetKind::Circle => vec![1.0, 0.0],
            TargetKind::FlatTorus => vec![1.0, 0.0, 1.0, 0.0],
            TargetKind::Euclidean(d) => vec![0.0; d],
        }
    }

    /// Nearest-point retraction of an ambient vector onto the manifold.
    ///
    /// Circle factors are normalized block-wise; Euclidean targets return the
    /// input unchanged. A circle-factor block of norm below 1e-14 has no
    /// well-defined nearest point.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ambient_dim() {
            return Err(Error::InvalidInput(format!(
                "ambient vector has length {}, expected {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        match self.kind {
            TargetKind::Euclidean(_) => Ok(x.to_vec()),
            TargetKind::Circle | TargetKind::FlatTorus => {
                let mut out = Vec::with_capacity(x.len());
                for block in x.chunks_exact(2) {
                    let norm = block[0].hypot(block[1]);
                    if norm < 1e-14 {
                        return Err(Error::AmbiguousProjection);
                    }
                    out.push(block[0] / norm);
                    out.push(block[1] / norm);
                }
                Ok(out)
            }
        }
    }

    /// Whether an ambient vector lies on the manifold to within `tol`.
    #[must_use]
    pub fn is_on_manifold(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.ambient_dim() {
            return false;
        }
        match self.kind {
            TargetKind::Euclidean(_) => true,
            TargetKind::Circle | TargetKind::FlatTorus => x
                .chunks_exact(2)
                .all(|b| (b[0].hypot(b[1]) - 1.0).abs() <= tol),
        }
    }

    /// Parse the configuration name: `circle`, `torus`, or `euclidean:<dim>`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "circle" => Ok(Self::circle()),
            "torus" => Ok(Self::flat_torus()),
            other => {
                if let Some(dim) = other.strip_prefix("euclidean:") {
                    let d: usize = dim
                        .parse()
                        .map_err(|_| Error::Config(format!("bad euclidean dimension {dim:?}")))?;
                    if d == 0 {
                        return Err(Error::Config("euclidean dimension must be positive".into()));
                    }
                    Ok(Self::euclidean(d))
                } else {
                    Err(Error::Config(format!(
                        "unknown target {other:?}; expected circle | torus | euclidean:<dim>"
                    )))
                }
            }
        }
    }

    /// Configuration name of this target.
    #[must_use]
    pub fn config_name(&self) -> String {
        match self.kind {
            TargetKind::Circle => "circle".into(),
            TargetKind::FlatTorus => "torus".into(),
            TargetKind::Euclidean(d) => format!("euclidean:{d}"),
        }
    }
}

/// The lattice homotopy class of a closed loop: one winding integer per circle
/// factor (empty for Euclidean targets). Concatenating loops adds windings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomotopyCharge {
    windings: Vec<i64>,
}

impl HomotopyCharge {
    #[must_use]
    pub fn new(windings: Vec<i64>) -> Self {
        Self { windings }
    }

    /// The zero class on a target with `factors` circle factors.
    #[must_use]
    pub fn zero(factors: usize) -> Self {
        Self {
            windings: vec![0; factors],
        }
    }

    #[must_use]
    pub fn windings(&self) -> &[i64] {
        &self.windings
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.windings.iter().all(|&w| w == 0)
    }

    /// ℓ¹ norm of the winding vector.
    #[must_use]
    pub fn l1(&self) -> i64 {
        self.windings.iter().map(|w| w.abs()).sum()
    }

    /// Length of the shortest loop in this class: `2π · ‖w‖₂`.
    #[must_use]
    pub fn lambda(&self) -> f64 {
        let sq: f64 = self.windings.iter().map(|&w| (w as f64) * (w as f64)).sum();
        2.0 * std::f64::consts::PI * sq.sqrt()
    }

    /// Class of the concatenated loop (windings add component-wise).
    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        Self {
            windings: self
                .windings
                .iter()
                .zip(&other.windings)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Class of the reversed loop.
    #[must_use]
    pub fn reversed(&self) -> Self {
        Self {
            windings: self.windings.iter().map(|w| -w).collect(),
        }
    }

    /// Render as `(w1,w2,...)` for reports.
    #[must_use]
    pub fn display(&self) -> String {
        let inner: Vec<String> = self.windings.iter().map(|w| w.to_string()).collect();
        format!("({})", inner.join(","))
    }
}

/// Length `λ` of a homotopy class; free-function form of [`HomotopyCharge::lambda`].
#[must_use]
pub fn lambda_of(charge: &HomotopyCharge) -> f64 {
    charge.lambda()
}

/// Winding charge of a sampled closed loop of manifold points.
///
/// The loop may repeat its first point or close implicitly. Per circle factor,
/// principal-branch angle increments are summed; any single increment of
/// magnitude ≥ π − 1e-9 means the loop is too coarse for its class to be
/// determined, and a total more than 0.25 turns away from the nearest integer
/// means the samples are inconsistent with any single class.
pub fn loop_charge(m: &TargetManifold, points: &[Vec<f64>]) -> Result<HomotopyCharge> {
    let factors = m.circle_factors();
    if factors == 0 {
        return Ok(HomotopyCharge::zero(0));
    }
    if points.len() < 2 {
        return Err(Error::InvalidInput(
            "loop needs at least 2 samples".into(),
        ));
    }
    let dim = m.ambient_dim();
    for p in points {
        if p.len() != dim {
            return Err(Error::InvalidInput(format!(
                "loop sample has length {}, expected {dim}",
                p.len()
            )));
        }
    }
    let mut windings = Vec::with_capacity(factors);
    for f in 0..factors {
        let angle = |p: &Vec<f64>| -> f64 { p[2 * f + 1].atan2(p[2 * f]) };
        let mut total = 0.0;
        let mut push_increment = |from: f64, to: f64| -> Result<()> {
            let mut d = to - from;
            // Wrap to the principal branch (−π, π].
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d <= -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            if d.abs() >= std::f64::consts::PI - 1e-9 {
                return Err(Error::UnderResolvedLoop);
            }
            total += d;
            Ok(())
        };
        for w in points.windows(2) {
            push_increment(angle(&w[0]), angle(&w[1]))?;
        }
        let first = &points[0];
        let last = &points[points.len() - 1];
        let explicitly_closed = first
            .iter()
            .zip(last.iter())
            .all(|(a, b)| (a - b).abs() < 1e-12);
        if !explicitly_closed {
            push_increment(angle(last), angle(first))?;
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let rounded = turns.round();
        // For a genuinely closed loop the wrapped increments telescope to an
        // integer number of turns; a large residual means the samples do not
        // describe any single class (non-finite coordinates included).
        if !turns.is_finite() || (turns - rounded).abs() >= 0.25 {
            return Err(Error::AmbiguousWinding);
        }
        windings.push(rounded as i64);
    }
    Ok(HomotopyCharge::new(windings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_loop(turns: i64, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|j| {
                let t = 2.0 * PI * (turns as f64) * (j as f64) / (n as f64);
                vec![t.cos(), t.sin()]
            })
            .collect()
    }

    #[test]
    fn projection_normalizes_circle_vectors() {
        let m = TargetManifold::circle();
        let p = m.project(&[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn projection_is_identity_on_euclidean() {
        let m = TargetManifold::euclidean(2);
        assert_eq!(m.project(&[1.5, -2.0]).unwrap(), vec![1.5, -2.0]);
    }

    #[test]
    fn projection_is_factorwise_on_torus() {
        let m = TargetManifold::flat_torus();
        let p = m.project(&[2.0, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn projection_is_idempotent() {
        let m = TargetManifold::flat_torus();
        let p = m.project(&[0.3, -1.2, 2.0, 2.0]).unwrap();
        let pp = m.project(&p).unwrap();
        for (a, b) in p.iter().zip(&pp) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_block_is_an_error() {
        let m = TargetManifold::circle();
        assert_eq!(m.project(&[1e-15, 0.0]), Err(Error::AmbiguousProjection));
    }

    #[test]
    fn identity_loop_has_winding_one() {
        let m = TargetManifold::circle();
        let c = loop_charge(&m, &circle_loop(1, 64)).unwrap();
        assert_eq!(c.windings(), &[1]);
    }

    #[test]
    fn constant_loop_has_winding_zero() {
        let m = TargetManifold::circle();
        let pts = vec![vec![0.6, 0.8]; 32];
        assert!(loop_charge(&m, &pts).unwrap().is_zero());
    }

    #[test]
    fn torus_loop_accumulates_per_factor() {
        // θ ↦ (e^{i2θ}, e^{-iθ}); oracle: windings are read off the accumulated
        // angles directly.
        let m = TargetManifold::flat_torus();
        let n = 96;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * (j as f64) / (n as f64);
                vec![(2.0 * t).cos(), (2.0 * t).sin(), (-t).cos(), (-t).sin()]
            })
            .collect();
        let c = loop_charge(&m, &pts).unwrap();
        assert_eq!(c.windings(), &[2, -1]);
    }

    #[test]
    fn coarse_loop_is_under_resolved() {
        // Two antipodal-ish samples: the increment hits the π cutoff.
        let m = TargetManifold::circle();
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 1e-12]];
        assert_eq!(loop_charge(&m, &pts), Err(Error::UnderResolvedLoop));
    }

    #[test]
    fn non_finite_samples_are_ambiguous() {
        // Closed resolvable loops always total an integer number of turns, so
        // the residual guard fires only on data with no consistent class at
        // all; non-finite coordinates are the canonical case.
        let m = TargetManifold::circle();
        let pts = vec![vec![f64::NAN, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(loop_charge(&m, &pts), Err(Error::AmbiguousWinding));
    }

    #[test]
    fn lambda_values_match_closed_forms() {
        assert!((lambda_of(&HomotopyCharge::new(vec![1])) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(lambda_of(&HomotopyCharge::new(vec![0])), 0.0);
        let diag = lambda_of(&HomotopyCharge::new(vec![1, 1]));
        assert!((diag - 2.0 * PI * 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lambda_spectrum_is_discrete() {
        let sys = TargetManifold::circle().systole();
        for w1 in -3_i64..=3 {
            for w2 in -3_i64..=3 {
                let l = HomotopyCharge::new(vec![w1, w2]).lambda();
                assert!(l == 0.0 || l >= sys - 1e-12);
            }
        }
    }

    #[test]
    fn parse_round_trips() {
        for name in ["circle", "torus", "euclidean:3"] {
            assert_eq!(TargetManifold::parse(name).unwrap().config_name(), name);
        }
        assert!(TargetManifold::parse("sphere").is_err());
        assert!(TargetManifold::parse("euclidean:0").is_err());
    }
}

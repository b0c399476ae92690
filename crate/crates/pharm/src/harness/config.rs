//! JSON experiment configuration.
//!
//! A study is fully described by a domain, a target, a named boundary
//! generator, a p-ladder, a solver block, a growth budget δ, an output
//! directory, and a seed. Identical configurations with identical seeds
//! produce bit-identical outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DiscreteField, DomainGrid};
use crate::manifold::TargetManifold;
use crate::solver::{vortex_field, SolverOptions};

/// Continuum domain selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    UnitDisk,
    Rectangle { width: f64, height: f64 },
    Annulus { r_in: f64, r_out: f64 },
}

/// Target manifold selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    Circle,
    FlatTorus,
    Euclidean { dim: usize },
}

/// Solver budgets; omitted fields fall back to winding-dependent defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolverBlock {
    /// Iteration budget for the first (cold-started) ladder rung.
    pub first_iters: Option<usize>,
    /// Iteration budget for warm-started rungs.
    pub warm_iters: Option<usize>,
    pub grad_tol: Option<f64>,
}

/// One experiment: everything the CLI needs to reproduce a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub domain: DomainSpec,
    pub target: TargetSpec,
    /// Named boundary generator: `degree:<d>` (circle), `winding:<w1>,<w2>`
    /// (torus), or `constant`.
    pub boundary: String,
    /// Grid spacing.
    pub h: f64,
    /// Strictly increasing exponents in (1, 2).
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub solver: SolverBlock,
    /// Diameter budget for ball growth.
    pub delta: f64,
    pub out_dir: String,
    pub seed: u64,
}

/// Parsed boundary generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryKind {
    Constant,
    Degree(i64),
    Winding(i64, i64),
}

impl BoundaryKind {
    /// Winding vector as the initializer expects it; empty for constants.
    #[must_use]
    pub fn windings(&self) -> Vec<i64> {
        match *self {
            BoundaryKind::Constant => Vec::new(),
            BoundaryKind::Degree(d) => vec![d],
            BoundaryKind::Winding(a, b) => vec![a, b],
        }
    }
}

/// Parse a named boundary generator string.
pub fn parse_boundary(s: &str) -> Result<BoundaryKind> {
    if s == "constant" {
        return Ok(BoundaryKind::Constant);
    }
    if let Some(d) = s.strip_prefix("degree:") {
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad degree in boundary spec {s:?}")))?;
        return Ok(BoundaryKind::Degree(d));
    }
    if let Some(ws) = s.strip_prefix("winding:") {
        let parts: Vec<&str> = ws.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Config(format!(
                "boundary spec {s:?} needs exactly two windings"
            )));
        }
        let a: i64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad winding in boundary spec {s:?}")))?;
        let b: i64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad winding in boundary spec {s:?}")))?;
        return Ok(BoundaryKind::Winding(a, b));
    }
    Err(Error::Config(format!(
        "unknown boundary spec {s:?}; use degree:<d>, winding:<w1>,<w2>, or constant"
    )))
}

impl StudyConfig {
    /// Parse a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: StudyConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check the invariants: a valid grid spacing, a strictly increasing
    /// ladder inside (1, 2), a positive δ, and a boundary generator that fits
    /// the target.
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Config(format!("grid spacing h = {} invalid", self.h)));
        }
        if self.ladder.is_empty() {
            return Err(Error::Config("empty exponent ladder".into()));
        }
        for w in self.ladder.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Config("ladder must be strictly increasing".into()));
            }
        }
        for &p in &self.ladder {
            if !(p > 1.0 && p < 2.0) {
                return Err(Error::Config(format!("ladder exponent {p} outside (1, 2)")));
            }
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("delta = {} must be positive", self.delta)));
        }
        let boundary = parse_boundary(&self.boundary)?;
        match (&self.target, &boundary) {
            (TargetSpec::Circle, BoundaryKind::Degree(_) | BoundaryKind::Constant) => {}
            (TargetSpec::FlatTorus, BoundaryKind::Winding(_, _) | BoundaryKind::Constant) => {}
            (TargetSpec::Euclidean { .. }, BoundaryKind::Constant) => {}
            _ => {
                return Err(Error::Config(format!(
                    "boundary {:?} does not fit the target {:?}",
                    self.boundary, self.target
                )))
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<DomainGrid> {
        match self.domain {
            DomainSpec::UnitDisk => DomainGrid::unit_disk(self.h),
            DomainSpec::Rectangle { width, height } => {
                DomainGrid::rectangle(width, height, self.h)
            }
            DomainSpec::Annulus { r_in, r_out } => DomainGrid::annulus(r_in, r_out, self.h),
        }
    }

    #[must_use]
    pub fn build_target(&self) -> TargetManifold {
        match self.target {
            TargetSpec::Circle => TargetManifold::circle(),
            TargetSpec::FlatTorus => TargetManifold::flat_torus(),
            TargetSpec::Euclidean { dim } => TargetManifold::euclidean(dim),
        }
    }

    /// The initial field carrying the boundary generator: a seeded product of
    /// vortices for charged data, the constant basepoint otherwise.
    pub fn initial_field(&self, seed: u64) -> Result<DiscreteField> {
        let grid = self.build_grid()?;
        match parse_boundary(&self.boundary)? {
            BoundaryKind::Constant => DiscreteField::constant(grid, self.build_target()),
            BoundaryKind::Degree(d) => vortex_field(grid, &[d], seed),
            BoundaryKind::Winding(a, b) => vortex_field(grid, &[a, b], seed),
        }
    }

    /// ℓ¹ norm of the boundary winding vector (0 for constants).
    #[must_use]
    pub fn winding_l1(&self) -> i64 {
        parse_boundary(&self.boundary)
            .map(|b| b.windings().iter().map(|w| w.abs()).sum())
            .unwrap_or(0)
    }

    /// Solver options for a ladder rung. Cold starts on multi-charge data get
    /// the large budget; warm starts converge in a fraction of it.
    #[must_use]
    pub fn solver_options(&self, warm: bool) -> SolverOptions {
        let first_default = if self.winding_l1() >= 2 { 12_000 } else { 4_000 };
        let max_iters = if warm {
            self.solver.warm_iters.unwrap_or(3_000)
        } else {
            self.solver.first_iters.unwrap_or(first_default)
        };
        let mut opts = SolverOptions {
            max_iters,
            ..SolverOptions::default()
        };
        if let Some(t) = self.solver.grad_tol {
            opts.grad_tol = t;
        }
        opts
    }
}

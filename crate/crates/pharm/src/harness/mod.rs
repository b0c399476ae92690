//! JSON-configured experiment harness.
//!
//! Ties the laboratory together behind a reproducible front end: a JSON
//! configuration names the domain, target, boundary generator, exponent
//! ladder, solver budgets, growth budget δ, output directory, and seed;
//! [`study::run_study`] executes the whole pipeline (solve → detect → account
//! → grow → bound → extrapolate); [`io`] renders every artifact as
//! deterministic CSV/JSON (floats at 17 significant digits, byte-identical
//! across runs); [`verify`] re-derives the library's closed forms as named
//! self-checks; [`cli`] exposes `solve`, `study`, `growballs`, `energy`, and
//! `verify` subcommands with config-stage errors distinguished from run-stage
//! errors in the exit code.

pub mod cli;
pub mod config;
pub mod io;
pub mod study;
pub mod verify;

pub use config::{parse_boundary, BoundaryKind, DomainSpec, SolverBlock, StudyConfig, TargetSpec};
pub use study::{
    energy_report, energy_report_for, richardson_limit, run_study, StudyReport, StudyRung,
    NARROW_RADII,
};
pub use verify::{run_suite, CheckRow};

//! Deterministic CSV/JSON emission.
//!
//! Every float is printed as `{:.16e}` (17 significant digits), which
//! round-trips f64 exactly, so identical runs produce byte-identical files.
//! Writers emit UTF-8 with `\n` line endings and a fixed field order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::ballgrowth::{BallGrowth, GrowthEventKind};
use crate::energetics::{Certificate, EnergyReport};
use crate::error::Result;
use crate::field::DiscreteField;
use crate::solver::IterRow;

use super::study::{StudyReport, StudyRung};

/// Canonical float rendering: exact round-trip, fixed width class.
#[must_use]
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// JSON rendering of an optional float (`null` when absent).
#[must_use]
pub fn json_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "null".to_string(), fmt_f64)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text.as_bytes())?;
    Ok(())
}

/// Sampled field values on the full bounding lattice.
///
/// Columns: `x,y,inside,v1..v_nu`; one row per lattice node in row-major
/// order, `inside` ∈ {0, 1}, outside rows repeat the basepoint.
pub fn write_field_csv(path: &Path, u: &DiscreteField) -> Result<()> {
    let grid = u.grid();
    let nu = u.target().ambient_dim();
    let mut text = String::from("x,y,inside");
    for k in 1..=nu {
        let _ = write!(text, ",v{k}");
    }
    text.push('\n');
    let base = u.target().basepoint();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let [x, y] = grid.pos(i, j);
            let inside = grid.is_inside(i as isize, j as isize);
            let _ = write!(text, "{},{},{}", fmt_f64(x), fmt_f64(y), u8::from(inside));
            let vals: &[f64] = if inside { u.value(i, j) } else { &base };
            for v in vals {
                let _ = write!(text, ",{}", fmt_f64(*v));
            }
            text.push('\n');
        }
    }
    write_text(path, &text)
}

/// Descent history: `iter,energy,grad_norm,step`.
pub fn write_iterations_csv(path: &Path, rows: &[IterRow]) -> Result<()> {
    let mut text = String::from("iter,energy,grad_norm,step\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            r.iter,
            fmt_f64(r.energy),
            fmt_f64(r.grad_norm),
            fmt_f64(r.step)
        );
    }
    write_text(path, &text)
}

/// Bound-check table: `bound_name,lhs,rhs,slack,pass`.
pub fn write_certificates_csv(path: &Path, rows: &[Certificate]) -> Result<()> {
    let mut text = String::from("bound_name,lhs,rhs,slack,pass\n");
    for c in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            c.name,
            fmt_f64(c.lhs),
            fmt_f64(c.rhs),
            fmt_f64(c.slack),
            c.pass
        );
    }
    write_text(path, &text)
}

fn charge_json(w: &[i64]) -> String {
    let items: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// Growth history as a JSON event log.
#[must_use]
pub fn growth_json(growth: &BallGrowth) -> String {
    let mut text = String::from("{\n");
    let _ = writeln!(text, "  \"p\": {},", fmt_f64(growth.p));
    let _ = writeln!(text, "  \"delta\": {},", fmt_f64(growth.delta));
    let _ = writeln!(text, "  \"reached_delta\": {},", growth.reached_delta);
    let _ = writeln!(text, "  \"stop_s\": {},", fmt_f64(growth.stop_s));
    text.push_str("  \"events\": [\n");
    for (idx, ev) in growth.events.iter().enumerate() {
        let kind = match ev.kind {
            GrowthEventKind::Seed => "seed",
            GrowthEventKind::Merge => "merge",
            GrowthEventKind::Stop => "stop",
        };
        let _ = write!(
            text,
            "    {{\"type\": \"{kind}\", \"s\": {}, \"disks\": [",
            fmt_f64(ev.s)
        );
        for (k, d) in ev.disks.iter().enumerate() {
            if k > 0 {
                text.push_str(", ");
            }
            let _ = write!(
                text,
                "{{\"cx\": {}, \"cy\": {}, \"r\": {}, \"charge\": {}}}",
                fmt_f64(d.center[0]),
                fmt_f64(d.center[1]),
                fmt_f64(d.radius),
                charge_json(d.charge.windings())
            );
        }
        text.push_str("]}");
        if idx + 1 < growth.events.len() {
            text.push(',');
        }
        text.push('\n');
    }
    text.push_str("  ]\n}\n");
    text
}

pub fn write_growth_json(path: &Path, growth: &BallGrowth) -> Result<()> {
    write_text(path, &growth_json(growth))
}

fn certificates_json(rows: &[Certificate], ind: &str) -> String {
    let mut text = String::from("[");
    for (k, c) in rows.iter().enumerate() {
        if k > 0 {
            text.push(',');
        }
        let _ = write!(
            text,
            "\n{ind}  {{\"bound_name\": \"{}\", \"lhs\": {}, \"rhs\": {}, \"slack\": {}, \"pass\": {}}}",
            escape_json(&c.name),
            fmt_f64(c.lhs),
            fmt_f64(c.rhs),
            fmt_f64(c.slack),
            c.pass
        );
    }
    if !rows.is_empty() {
        text.push('\n');
        text.push_str(ind);
    }
    text.push(']');
    text
}

fn pair_json(v: (f64, f64)) -> String {
    format!("{{\"t\": {}, \"sup\": {}}}", fmt_f64(v.0), fmt_f64(v.1))
}

/// Energy-accounting report as a JSON object; `ind` is the indentation of the
/// opening brace's line, inner lines go two spaces deeper.
fn energy_report_json_at(report: &EnergyReport, ind: &str) -> String {
    let deep = format!("{ind}  ");
    let mut text = String::from("{\n");
    let _ = writeln!(text, "{deep}\"p\": {},", fmt_f64(report.p));
    let _ = writeln!(text, "{deep}\"total_energy\": {},", fmt_f64(report.total_energy));
    let _ = writeln!(
        text,
        "{deep}\"total_energy_completed\": {},",
        json_opt(report.total_energy_completed)
    );
    let _ = writeln!(text, "{deep}\"e_sg_p\": {},", fmt_f64(report.e_sg_p));
    let _ = writeln!(text, "{deep}\"e_sg_2\": {},", fmt_f64(report.e_sg_2));
    let _ = writeln!(text, "{deep}\"e_ren_limit\": {},", json_opt(report.e_ren_limit));
    let _ = writeln!(
        text,
        "{deep}\"e_ren_integral\": {},",
        json_opt(report.e_ren_integral)
    );
    let _ = writeln!(text, "{deep}\"e_ren_p\": {},", fmt_f64(report.e_ren_p));
    let _ = writeln!(text, "{deep}\"h_term\": {},", fmt_f64(report.h_term));
    let _ = writeln!(
        text,
        "{deep}\"weak_lp_quasinorm\": {},",
        pair_json(report.weak_lp_quasinorm)
    );
    let _ = write!(text, "{deep}\"per_singularity\": [");
    for (k, s) in report.per_singularity.iter().enumerate() {
        if k > 0 {
            text.push(',');
        }
        let _ = write!(
            text,
            "\n{deep}  {{\"location\": [{}, {}], \"charge\": {}, \"lambda\": {}}}",
            fmt_f64(s.location[0]),
            fmt_f64(s.location[1]),
            charge_json(s.charge.windings()),
            fmt_f64(s.lambda)
        );
    }
    if !report.per_singularity.is_empty() {
        text.push('\n');
        text.push_str(&deep);
    }
    text.push_str("],\n");
    let _ = writeln!(
        text,
        "{deep}\"bounds\": {}",
        certificates_json(&report.bounds, &deep)
    );
    let _ = write!(text, "{ind}}}");
    text
}

/// Energy-accounting report as a standalone JSON document.
#[must_use]
pub fn energy_report_json(report: &EnergyReport) -> String {
    let mut text = energy_report_json_at(report, "");
    text.push('\n');
    text
}

pub fn write_energy_report_json(path: &Path, report: &EnergyReport) -> Result<()> {
    write_text(path, &energy_report_json(report))
}

fn rung_json(rung: &StudyRung, ind: &str) -> String {
    let deep = format!("{ind}  ");
    let mut text = String::from("{\n");
    let _ = writeln!(text, "{deep}\"p\": {},", fmt_f64(rung.p));
    let _ = writeln!(text, "{deep}\"epsilon\": {},", fmt_f64(2.0 - rung.p));
    let _ = writeln!(text, "{deep}\"iterations\": {},", rung.iterations);
    let _ = writeln!(text, "{deep}\"hit_max_iters\": {},", rung.hit_max_iters);
    let _ = writeln!(text, "{deep}\"grad_sup\": {},", fmt_f64(rung.grad_sup));
    let _ = writeln!(text, "{deep}\"energy\": {},", fmt_f64(rung.energy));
    let _ = writeln!(text, "{deep}\"scaled_energy\": {},", fmt_f64(rung.scaled_energy));
    let _ = writeln!(
        text,
        "{deep}\"scaled_energy_completed\": {},",
        json_opt(rung.scaled_energy_completed)
    );
    let sites: Vec<String> = rung
        .sites
        .iter()
        .map(|a| format!("[{}, {}]", fmt_f64(a[0]), fmt_f64(a[1])))
        .collect();
    let _ = writeln!(text, "{deep}\"sites\": [{}],", sites.join(", "));
    let _ = writeln!(
        text,
        "{deep}\"sup_volume\": {},",
        rung.sup_volume.map_or_else(|| "null".into(), pair_json)
    );
    let _ = writeln!(
        text,
        "{deep}\"sup_perimeter\": {},",
        rung.sup_perimeter.map_or_else(|| "null".into(), pair_json)
    );
    let _ = writeln!(
        text,
        "{deep}\"growth_reached_delta\": {},",
        rung.growth
            .as_ref()
            .map_or_else(|| "null".to_string(), |g| g.reached_delta.to_string())
    );
    let narrow: Vec<String> = rung
        .narrow
        .iter()
        .map(|(r, f)| format!("{{\"radius\": {}, \"fraction\": {}}}", fmt_f64(*r), fmt_f64(*f)))
        .collect();
    let _ = writeln!(text, "{deep}\"narrow\": [{}],", narrow.join(", "));
    let _ = writeln!(text, "{deep}\"strong_away\": {},", json_opt(rung.strong_away));
    let _ = writeln!(
        text,
        "{deep}\"report\": {},",
        energy_report_json_at(&rung.report, &deep)
    );
    let _ = writeln!(
        text,
        "{deep}\"growth_bounds\": {}",
        certificates_json(&rung.growth_bounds, &deep)
    );
    let _ = write!(text, "{ind}}}");
    text
}

/// Full study output as a standalone JSON document.
#[must_use]
pub fn study_json(report: &StudyReport) -> String {
    let mut text = String::from("{\n");
    let _ = writeln!(text, "  \"seed\": {},", report.seed);
    let ladder: Vec<String> = report.ladder.iter().map(|&p| fmt_f64(p)).collect();
    let _ = writeln!(text, "  \"ladder\": [{}],", ladder.join(", "));
    let _ = writeln!(
        text,
        "  \"extrapolated_scaled_energy\": {},",
        json_opt(report.extrapolated_scaled_energy)
    );
    let _ = writeln!(
        text,
        "  \"extrapolated_scaled_energy_raw\": {},",
        json_opt(report.extrapolated_scaled_energy_raw)
    );
    let _ = writeln!(
        text,
        "  \"max_site_travel\": {},",
        json_opt(report.max_site_travel)
    );
    text.push_str("  \"rungs\": [\n");
    for (k, rung) in report.rungs.iter().enumerate() {
        let _ = write!(text, "    {}", rung_json(rung, "    "));
        if k + 1 < report.rungs.len() {
            text.push(',');
        }
        text.push('\n');
    }
    text.push_str("  ]\n}\n");
    text
}

pub fn write_study_json(path: &Path, report: &StudyReport) -> Result<()> {
    write_text(path, &study_json(report))
}

/// Write arbitrary pre-rendered text.
pub fn write_str(path: &Path, text: &str) -> Result<()> {
    write_text(path, text)
}

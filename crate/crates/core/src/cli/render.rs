//! Plain-text tables and atomic report writing.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::report::{CheckReport, DerivativeMode};

use super::RunReport;

fn worst(r: &crate::report::Residual) -> String {
    match &r.worst {
        Some(w) if w.index.is_empty() => format!("#{}", w.sample),
        Some(w) => format!("#{} {:?}", w.sample, w.index),
        None => "-".into(),
    }
}

fn check_table(out: &mut String, c: &CheckReport) {
    let _ = writeln!(out, "== {} ({} samples)", c.check, c.sample_count);
    if let Some(reason) = &c.skipped {
        let _ = writeln!(out, "   SKIPPED: {reason}");
        return;
    }
    if !c.residuals.is_empty() {
        let width = c.residuals.iter().map(|r| r.name.len()).max().unwrap_or(4).max(8);
        let _ = writeln!(
            out,
            "   {:<width$}  {:>12}  {:>9}  {:<10}  {:<4}  worst",
            "residual", "value", "tol", "verdict", "mode"
        );
        for r in &c.residuals {
            let mode = match r.mode {
                DerivativeMode::Jet => "jet",
                DerivativeMode::FiniteDifference => "fd",
            };
            let _ = writeln!(
                out,
                "   {:<width$}  {:>12.4e}  {:>9.1e}  {:<10}  {:<4}  {}",
                r.name,
                r.value,
                r.tolerance,
                r.verdict,
                mode,
                worst(r)
            );
        }
    }
    if !c.conditions.is_empty() {
        let width = c.conditions.iter().map(|r| r.name.len()).max().unwrap_or(4).max(9);
        let _ = writeln!(out, "   {:<width$}  {:>12}  {:>9}  holds", "condition", "value", "tol");
        for k in &c.conditions {
            let _ = writeln!(out, "   {:<width$}  {:>12.4e}  {:>9.1e}  {}", k.name, k.residual, k.tolerance, k.holds);
        }
    }
    if !c.audit.is_empty() {
        let width = c.audit.iter().map(|r| r.implication.len()).max().unwrap_or(4).max(11);
        let _ = writeln!(out, "   {:<width$}  status      failing hypotheses", "implication");
        for a in &c.audit {
            let failing: Vec<&str> = a.hypotheses.iter().filter(|h| !h.holds).map(|h| h.name.as_str()).collect();
            let _ = writeln!(out, "   {:<width$}  {:<10}  {}", a.implication, a.status, failing.join(", "));
        }
    }
    for note in &c.notes {
        let _ = writeln!(out, "   note: {note}");
    }
}

pub fn render_text(r: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}  n = {}  samples = {}  seed = {}", r.tool, r.version, r.config.dimension, r.provenance.count, r.provenance.seed);
    let _ = writeln!(out, "R^i_j convention: {}", r.r2_convention);
    if let Some(l) = r.lambda {
        let _ = writeln!(out, "fitted lambda: {l:.10e}");
    }
    for c in &r.checks {
        check_table(&mut out, c);
    }
    for e in &r.errors {
        let _ = writeln!(out, "error: {e}");
    }
    let _ = writeln!(out, "result: {}", if r.passed { "PASS" } else { "FAIL" });
    out
}

/// Write `contents` to a sibling temporary file, then rename it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io)?;
        f.write_all(contents.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

//! CSV curves and JSON reports.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use casimir_core::channel_energy::EnergyCurve;
use casimir_core::lattice::OracleRow;
use casimir_core::waveguide::WaveguideMode;
use serde::Serialize;

use crate::CliError;

/// `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::input("out", format!("cannot write {}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::input("out", e.to_string())
}

/// Shortest representation that parses back to the same `f64`.
pub fn number(v: f64) -> String {
    format!("{v:e}")
}

pub const CURVE_HEADER: [&str; 6] = ["x", "energy", "force", "energy_err", "force_err", "flags"];

pub fn write_curve(curve: &EnergyCurve, out: Box<dyn Write>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER).map_err(io_error)?;
    for s in &curve.samples {
        let flags: Vec<String> = s.flags.iter().map(|f| f.to_string()).collect();
        w.write_record([
            number(s.x),
            number(s.energy),
            number(s.force),
            number(s.energy_err),
            number(s.force_err),
            flags.join(";"),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn write_modes(modes: &[WaveguideMode], out: Box<dyn Write>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "k", "kind", "zero", "mass", "degeneracy"]).map_err(io_error)?;
    for m in modes {
        let kind = match m.kind {
            casimir_core::waveguide::ZeroKind::J => "tm",
            casimir_core::waveguide::ZeroKind::JPrime => "te",
        };
        w.write_record([
            m.m.to_string(),
            m.k.to_string(),
            kind.to_string(),
            number(m.zero),
            number(m.mass),
            m.degeneracy.to_string(),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn write_oracle(rows: &[OracleRow], out: Box<dyn Write>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "determinant", "lattice", "relative_difference", "flagged"])
        .map_err(io_error)?;
    for r in rows {
        w.write_record([
            number(r.x),
            number(r.determinant),
            number(r.lattice),
            number(r.relative_difference),
            r.flagged.to_string(),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

pub fn write_json<T: Serialize>(value: &T, mut out: Box<dyn Write>) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io_error)?;
    writeln!(out).map_err(io_error)?;
    out.flush().map_err(io_error)
}

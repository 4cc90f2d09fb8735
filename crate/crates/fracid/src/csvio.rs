//! CSV serialization of signals and experiment tables.
//!
//! Signals use a `time,value` header, one sample per row, UTF-8, LF line
//! endings. Values are written with Rust's shortest round-trip float
//! formatting, so reading a file back reproduces every sample bit-exactly
//! and identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Writes a signal as `time,value` rows.
pub fn write_signal_csv(path: &Path, signal: &SampledSignal) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_signal(&mut out, signal)?;
    out.flush()?;
    Ok(())
}

/// Writes a signal to any writer; used for stdout emission.
pub fn write_signal<W: Write>(out: &mut W, signal: &SampledSignal) -> Result<()> {
    writeln!(out, "time,value")?;
    for (k, v) in signal.samples().iter().enumerate() {
        writeln!(out, "{},{}", signal.time_at(k), v)?;
    }
    Ok(())
}

/// Reads a `time,value` file back into a signal.
///
/// The sample period is inferred from the first and last times; rows must
/// sit on that uniform grid. Requires at least two rows.
pub fn read_signal_csv(path: &Path) -> Result<SampledSignal> {
    let reader = BufReader::new(File::open(path)?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if lineno == 0 && trimmed.eq_ignore_ascii_case("time,value") {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Csv(format!(
                "line {}: expected two comma-separated fields, got {trimmed:?}",
                lineno + 1
            )));
        };
        let t: f64 = t
            .trim()
            .parse()
            .map_err(|e| Error::Csv(format!("line {}: bad time {t:?}: {e}", lineno + 1)))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|e| Error::Csv(format!("line {}: bad value {v:?}: {e}", lineno + 1)))?;
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(Error::Csv(
            "need at least two samples to recover the sample period".into(),
        ));
    }
    let start = times[0];
    let period = (times[times.len() - 1] - start) / (times.len() - 1) as f64;
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::Csv(format!(
            "times do not increase: inferred period {period}"
        )));
    }
    for (k, &t) in times.iter().enumerate() {
        let expected = start + k as f64 * period;
        if (t - expected).abs() > period * 1e-6 {
            return Err(Error::Csv(format!(
                "row {k}: time {t} is off the uniform grid (expected {expected})"
            )));
        }
    }
    SampledSignal::new(values, period, start)
}

/// Writes a numeric table with the given header row.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a per-iteration convergence trace (`iteration,best_fitness`).
pub fn write_history_csv(path: &Path, history: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "iteration,best_fitness")?;
    for (i, f) in history.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, f)?;
    }
    out.flush()?;
    Ok(())
}

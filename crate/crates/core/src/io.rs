//! Flat-file output: CSV tables with `#` header lines carrying the schema
//! version and the configuration that produced them.

use std::io::{self, Write};

use crate::fock::{QGrid, QuasienergyRecord};

pub const CSV_SCHEMA: &str = "kho-csv v1";

/// Sentinel written for thresholds that were not reached.
pub const EXHAUSTED: i64 = -1;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ordered `key = value` pairs echoed into file headers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEcho {
    entries: Vec<(String, String)>,
}

impl ConfigEcho {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write_header<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# {CSV_SCHEMA}")?;
        for (k, v) in &self.entries {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

pub fn write_energy_trace<W: Write>(
    w: &mut W,
    config: &ConfigEcho,
    energies: &[f64],
) -> io::Result<()> {
    config.write_header(w)?;
    writeln!(w, "kick,mean_energy")?;
    for (n, e) in energies.iter().enumerate() {
        writeln!(w, "{n},{}", fmt_f64(*e))?;
    }
    Ok(())
}

/// One row per Im α (ascending), one column per Re α (ascending).
pub fn write_qgrid<W: Write>(w: &mut W, config: &ConfigEcho, grid: &QGrid) -> io::Result<()> {
    config.write_header(w)?;
    let s = &grid.spec;
    writeln!(
        w,
        "# window re_min={} re_max={} im_min={} im_max={} n_re={} n_im={}",
        fmt_f64(s.re_min),
        fmt_f64(s.re_max),
        fmt_f64(s.im_min),
        fmt_f64(s.im_max),
        s.n_re,
        s.n_im
    )?;
    for row in grid.values.chunks(s.n_re) {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_spectrum_header<W: Write>(w: &mut W, config: &ConfigEcho) -> io::Result<()> {
    config.write_header(w)?;
    writeln!(w, "eta_sq,phi,ground_overlap")
}

pub fn write_spectrum_rows<W: Write>(
    w: &mut W,
    eta_sq: f64,
    records: &[QuasienergyRecord],
) -> io::Result<()> {
    for r in records {
        writeln!(
            w,
            "{},{},{}",
            fmt_f64(eta_sq),
            fmt_f64(r.phi),
            fmt_f64(r.ground_overlap)
        )?;
    }
    Ok(())
}

/// One row of an energy scan: η² and the kick counts for each threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub eta_sq: f64,
    pub kicks: Vec<Option<usize>>,
}

pub fn write_energy_scan<W: Write>(
    w: &mut W,
    config: &ConfigEcho,
    thresholds: &[f64],
    rows: &[ScanRow],
) -> io::Result<()> {
    config.write_header(w)?;
    let mut header = vec!["eta_sq".to_string()];
    header.extend(thresholds.iter().map(|t| format!("kicks_to_{t}")));
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let mut cells = vec![fmt_f64(row.eta_sq)];
        cells.extend(
            row.kicks
                .iter()
                .map(|k| k.map_or(EXHAUSTED, |k| k as i64).to_string()),
        );
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Numeric rows of a CSV produced here, skipping `#` lines and the column
/// header.
pub fn read_numeric_rows(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if rows.is_empty() => continue,
            Err(e) => return Err(format!("bad row {line:?}: {e}")),
        }
    }
    Ok(rows)
}

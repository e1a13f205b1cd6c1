use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use kho_core::fock::{
    evolve, kicks_to_energies, q_function, spectrum_of, FloquetMatrix, FockVector, Propagator,
    QGridSpec, Quadrature, DEFAULT_LEAK_TOL,
};
use kho_core::io::{
    write_energy_scan, write_energy_trace, write_qgrid, write_spectrum_header, write_spectrum_rows,
    ConfigEcho, ScanRow,
};
use kho_core::lattice::LatticeState;
use kho_core::model::{
    classify, parse_eta_sq, resonant_values, sine_moduli, ResonanceClass, ResonantValues,
    SystemParams,
};
use kho_core::verify::{self, Level, VerifyOptions};

use crate::args::{
    EnergyScanArgs, EvolveArgs, ParamArgs, QfuncArgs, ResonancesArgs, SpectrumArgs, VerifyArgs,
};

/// How a subcommand finished, mapped onto the exit-status contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    TruncationUnsafe,
    VerificationFailed,
}

pub type CmdResult = Result<Outcome, Box<dyn std::error::Error>>;

pub const ENERGY_THRESHOLDS: [f64; 2] = [50.0, 200.0];

/// Riemann sums below this suggest the window misses part of the state.
const QGRID_MASS_TOL: f64 = 1e-3;

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn param_echo(cmd: &str, p: &ParamArgs, sys: Option<&SystemParams>) -> ConfigEcho {
    let mut c = ConfigEcho::new()
        .with("command", cmd)
        .with("q", p.q)
        .with("r", p.r)
        .with("kappa", p.kappa);
    if let Some(s) = sys {
        c.push("eta2", format!("{} ({})", p.eta2, s.eta_sq()));
        c.push("zeta", s.zeta());
    }
    c
}

fn scan_grid(min: &str, max: &str, points: usize) -> kho_core::Result<Vec<f64>> {
    let lo = parse_eta_sq(min)?;
    let hi = parse_eta_sq(max)?;
    if points == 0 || !(lo > 0.0 && hi >= lo) {
        return Err(kho_core::Error::InvalidArgument(format!(
            "scan needs 0 < min ≤ max and at least one point, got [{lo}, {hi}] × {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

fn warn_truncation(label: &str, first: Option<usize>) {
    if let Some(n) = first {
        eprintln!(
            "warning: {label}: probability in the top tenth of the basis exceeded {DEFAULT_LEAK_TOL:e} at kick {n}; increase --dim"
        );
    }
}

#[derive(Serialize)]
struct StateDump {
    dim: usize,
    kicks: usize,
    amps: Vec<(f64, f64)>,
}

pub fn evolve_cmd(a: &EvolveArgs) -> CmdResult {
    let sys = a.params.system()?;
    let psi0 = match a.alpha {
        Some(al) => FockVector::coherent(al, a.dim)?,
        None => FockVector::ground(a.dim)?,
    };
    let ev = evolve(&psi0, &sys, a.kicks)?;
    let mut echo = param_echo("evolve", &a.params, Some(&sys))
        .with("dim", a.dim)
        .with("kicks", a.kicks);
    if let Some(al) = a.alpha {
        echo.push("alpha", format!("{},{}", al.re, al.im));
    }
    echo.push("truncation_unsafe", ev.truncation_unsafe);
    let mut w = open_out(a.out.as_deref())?;
    write_energy_trace(&mut w, &echo, &ev.energies)?;
    w.flush()?;
    if let Some(p) = &a.state_out {
        let dump = StateDump {
            dim: a.dim,
            kicks: a.kicks,
            amps: ev.state.amps().iter().map(|z| (z.re, z.im)).collect(),
        };
        fs::write(p, serde_json::to_string(&dump)?)?;
    }
    warn_truncation("evolve", ev.first_unsafe_kick);
    Ok(if ev.truncation_unsafe {
        Outcome::TruncationUnsafe
    } else {
        Outcome::Ok
    })
}

fn eta_label(expr: &str) -> String {
    expr.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn qfunc_cmd(a: &QfuncArgs, eta2_explicit: bool) -> CmdResult {
    let spec = QGridSpec::square(a.window, a.res)?;
    let panels: Vec<(String, usize, Option<PathBuf>)> = if a.kicks.is_none() && !eta2_explicit {
        let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        let mut v = Vec::new();
        for eta in ["pi", "phi*pi"] {
            for n in [36usize, 108] {
                let file = dir.join(format!("qfunc_eta2-{}_N{n}.csv", eta_label(eta)));
                v.push((eta.to_string(), n, Some(file)));
            }
        }
        v
    } else {
        vec![(a.params.eta2.clone(), a.kicks.unwrap_or(108), a.out.clone())]
    };
    let mut outcome = Outcome::Ok;
    for (eta2, kicks, path) in panels {
        let params = ParamArgs {
            eta2: eta2.clone(),
            ..a.params.clone()
        };
        let sys = params.system()?;
        let psi0 = match a.alpha {
            Some(al) => FockVector::coherent(al, a.dim)?,
            None => FockVector::ground(a.dim)?,
        };
        let ev = evolve(&psi0, &sys, kicks)?;
        let grid = q_function(&ev.state, &spec)?;
        let mass = grid.riemann_sum();
        let echo = param_echo("qfunc", &params, Some(&sys))
            .with("dim", a.dim)
            .with("kicks", kicks)
            .with("riemann_sum", mass)
            .with("truncation_unsafe", ev.truncation_unsafe);
        let mut w = open_out(path.as_deref())?;
        write_qgrid(&mut w, &echo, &grid)?;
        w.flush()?;
        if mass < 1.0 - QGRID_MASS_TOL {
            eprintln!(
                "warning: qfunc η²={eta2} N={kicks}: grid normalization sum {mass:.6} < 1; the window misses part of the state"
            );
        }
        warn_truncation(&format!("qfunc η²={eta2} N={kicks}"), ev.first_unsafe_kick);
        if ev.truncation_unsafe {
            outcome = Outcome::TruncationUnsafe;
        }
    }
    Ok(outcome)
}

pub fn energy_scan_cmd(a: &EnergyScanArgs) -> CmdResult {
    let grid = scan_grid(&a.scan_min, &a.scan_max, a.scan_points)?;
    let quad = Quadrature::new(a.dim)?;
    let results: Vec<kho_core::Result<(ScanRow, bool)>> = grid
        .par_iter()
        .map(|&eta_sq| {
            let sys = SystemParams::new(a.params.r, a.params.q, a.params.kappa, eta_sq)?;
            let prop = Propagator::from_floquet(FloquetMatrix::with_quadrature(&sys, &quad)?);
            let counts = kicks_to_energies(&prop, &ENERGY_THRESHOLDS, a.kicks, DEFAULT_LEAK_TOL)?;
            let unsafe_run = counts.iter().any(|c| c.truncation_unsafe);
            Ok((
                ScanRow {
                    eta_sq,
                    kicks: counts.iter().map(|c| c.kicks).collect(),
                },
                unsafe_run,
            ))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut flagged = Vec::new();
    for r in results {
        let (row, unsafe_run) = r?;
        if unsafe_run {
            flagged.push(row.eta_sq);
        }
        rows.push(row);
    }
    let mut echo = param_echo("energy-scan", &a.params, None)
        .with("dim", a.dim)
        .with(
            "scan",
            format!("{} .. {} × {}", a.scan_min, a.scan_max, a.scan_points),
        )
        .with("n_max", a.kicks)
        .with("exhausted_sentinel", kho_core::io::EXHAUSTED);
    echo.push("truncation_unsafe_points", flagged.len());
    let mut w = open_out(a.out.as_deref())?;
    write_energy_scan(&mut w, &echo, &ENERGY_THRESHOLDS, &rows)?;
    w.flush()?;
    for eta in &flagged {
        eprintln!(
            "warning: energy-scan η²={eta}: basis leak before reaching a threshold; increase --dim"
        );
    }
    Ok(if flagged.is_empty() {
        Outcome::Ok
    } else {
        Outcome::TruncationUnsafe
    })
}

pub fn spectrum_cmd(a: &SpectrumArgs) -> CmdResult {
    let grid = scan_grid(&a.scan_min, &a.scan_max, a.scan_points)?;
    let quad = Quadrature::new(a.dim)?;
    if a.dim < kho_core::fock::MIN_SPECTRUM_DIM {
        return Err(format!(
            "spectrum needs --dim ≥ {}",
            kho_core::fock::MIN_SPECTRUM_DIM
        )
        .into());
    }
    let results: Vec<kho_core::Result<kho_core::fock::Spectrum>> = grid
        .par_iter()
        .map(|&eta_sq| {
            let sys = SystemParams::new(a.params.r, a.params.q, a.params.kappa, eta_sq)?;
            let f = FloquetMatrix::with_quadrature(&sys, &quad)?;
            spectrum_of(f.matrix())
        })
        .collect();
    let echo = param_echo("spectrum", &a.params, None)
        .with("dim", a.dim)
        .with(
            "scan",
            format!("{} .. {} × {}", a.scan_min, a.scan_max, a.scan_points),
        );
    let mut w = open_out(a.out.as_deref())?;
    write_spectrum_header(&mut w, &echo)?;
    for (eta_sq, r) in grid.iter().zip(&results) {
        match r {
            Ok(s) => {
                if s.discarded > 0 {
                    writeln!(w, "# eta_sq={eta_sq:.16e} discarded={}", s.discarded)?;
                }
                write_spectrum_rows(&mut w, *eta_sq, &s.records)?;
            }
            Err(e) => {
                writeln!(w, "# eta_sq={eta_sq:.16e} failed: {e}")?;
                eprintln!("warning: spectrum η²={eta_sq}: {e}");
            }
        }
    }
    w.flush()?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ResonanceEntry {
    q: u32,
    z_n: Vec<f64>,
    resonant_values: &'static str,
    principal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ResonanceClass>,
}

pub fn resonances_cmd(a: &ResonancesArgs) -> CmdResult {
    let eta_sq = a.eta2.as_deref().map(parse_eta_sq).transpose()?;
    let qs: Vec<u32> = match a.q {
        Some(0) => return Err("q must be positive".into()),
        Some(q) => vec![q],
        None => (3..=8).collect(),
    };
    let entries: Vec<ResonanceEntry> = qs
        .into_iter()
        .map(|q| {
            let (kind, principal) = match resonant_values(q) {
                ResonantValues::Trivial => ("trivial", None),
                ResonantValues::Principal(p) => ("principal", Some(p)),
                ResonantValues::Impossible => ("none", None),
            };
            ResonanceEntry {
                q,
                z_n: sine_moduli(q),
                resonant_values: kind,
                principal,
                classification: eta_sq.map(|e| classify(e, q)),
            }
        })
        .collect();
    let mut w = open_out(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &entries)?;
    writeln!(w)?;
    w.flush()?;
    Ok(Outcome::Ok)
}

pub fn verify_cmd(a: &VerifyArgs) -> CmdResult {
    let level: Level = a.verify_level.parse()?;
    if let Some(p) = &a.fixture_out {
        fs::write(p, verify::default_fixture()?.to_json()?)?;
    }
    let mut opts = VerifyOptions::new(level);
    opts.lattice_zeta_offset = a.perturb_zeta;
    if let Some(p) = &a.fixture_in {
        opts.fixture = Some(LatticeState::from_json(&fs::read_to_string(p)?)?);
    }
    let report = verify::run(&opts)?;
    println!("{report}");
    if let Some(p) = &a.out {
        fs::write(p, format!("{report}\n"))?;
    }
    Ok(if report.all_passed() {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use kho_core::model::GOLDEN_RATIO;
    use std::f64::consts::PI;

    #[test]
    fn scan_grid_endpoints() {
        let g = scan_grid("0.4pi", "1.6pi", 61).unwrap();
        assert_eq!(g.len(), 61);
        assert!((g[30] - PI).abs() < 1e-12);
        assert!((g[0] - 0.4 * PI).abs() < 1e-15);
        assert_eq!(scan_grid("pi", "pi", 1).unwrap(), vec![PI]);
        assert!(scan_grid("2pi", "pi", 5).is_err());
    }

    #[test]
    fn labels_are_file_safe() {
        assert_eq!(eta_label("phi*pi"), "phi_pi");
        assert_eq!(eta_label("pi"), "pi");
    }

    #[test]
    fn golden_ratio_panel_is_nonresonant() {
        assert!(!classify(GOLDEN_RATIO * PI, 4).is_resonant());
    }
}

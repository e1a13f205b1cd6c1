//! Self-verification suite: the cross-checks between the Fock and lattice
//! routes and against the closed forms, with measured values reported next
//! to their tolerances.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::fock::{
    amplified_equivalence_deviation, evolve, floquet_power, interior_extent,
    interior_max_deviation, q_axis_product, symmetry_commutator_norm, FockVector, Propagator,
    WORK_FACTOR,
};
use crate::lattice::{
    analytic_q4, analytic_q6_cycle, phase_pattern, phase_quotient, step, step_n, to_fock,
    LatticeState,
};
use crate::model::{principal_value, symmetry_generators, LatticeSet, SystemParams, GOLDEN_RATIO};
use crate::specfun::{bessel_j, graf_geometry, graf_sum, kick_order_max};
use crate::{Error, Result, C64};

/// Fidelity the two representations must reach: 1 − 1e−9.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

/// Bessel products below this are dominated by pruning and rounding, so their
/// quotients carry no phase information.
pub const PHASE_QUOTIENT_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected `quick` or `full`".to_string(),
            }),
        }
    }
}

/// Which side of the tolerance a passing measurement lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// measured < tolerance
    Below,
    /// measured ≥ tolerance
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    pub seconds: f64,
}

impl CheckResult {
    fn new(name: &str, measured: f64, tolerance: f64, bound: Bound, seconds: f64) -> Self {
        let passed = match bound {
            Bound::Below => measured < tolerance,
            Bound::AtLeast => measured >= tolerance,
        };
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            bound,
            passed,
            seconds,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "{} {:<28} measured {:.3e} {op} {:.3e}  ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub level: Level,
    /// Added to ζ in the lattice route only; nonzero values must make the
    /// cross-representation check fail.
    pub lattice_zeta_offset: f64,
    /// Stored lattice snapshot to recompute from its initial condition.
    pub fixture: Option<LatticeState>,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            lattice_zeta_offset: 0.0,
            fixture: None,
        }
    }
}

fn timed<F: FnOnce() -> Result<f64>>(f: F) -> Result<(f64, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

/// Worst |graf_sum − J_n(ζ′)e^{inχ}| over `count` low-discrepancy samples of
/// n ∈ [−6, 6], ζ ∈ [0, 5], α ∈ [0, π].
pub fn graf_max_error(count: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..count {
        let u = |c: f64| (0.5 + i as f64 * c).fract();
        let n = (u(0.618_033_988_749_895) * 13.0).floor() as i64 - 6;
        let zeta = 5.0 * u(0.754_877_666_246_693);
        let alpha = PI * u(0.569_840_290_998_053);
        let g = graf_geometry(zeta, alpha)?;
        let k_max = kick_order_max(zeta) + n.unsigned_abs() as usize + 8;
        let lhs = graf_sum(n, zeta, alpha, k_max)?;
        let rhs = C64::from_polar(bessel_j(n, g.zeta_prime)?, n as f64 * g.chi);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Worst |step^N − closed form| for N = 2..=n_max, |m|, |n| ≤ extent, at the
/// q = 4 principal resonance with κ = −0.8; also the worst deviation of the
/// phase quotient from (−1)^{mn} i^{m+n} wherever the Bessel product exceeds
/// [`PHASE_QUOTIENT_FLOOR`].
pub fn q4_mapping_errors(n_max: u64, extent: i64) -> Result<(f64, f64)> {
    let p = SystemParams::new(1, 4, -0.8, PI)?;
    let mut s = LatticeState::init_from_params(&p, C64::new(0.0, 0.0))?;
    let mut worst = 0.0_f64;
    let mut worst_phase = 0.0_f64;
    for n_kicks in 1..=n_max {
        s = step(&s)?;
        if n_kicks < 2 {
            continue;
        }
        for m in -extent..=extent {
            for n in -extent..=extent {
                let a = analytic_q4(n_kicks, s.zeta(), m, n)?;
                worst = worst.max((s.coeff(m, n) - a).norm());
            }
        }
        for &(m, n) in s.coeffs().keys() {
            if let Some(quotient) = phase_quotient(&s, m, n, PHASE_QUOTIENT_FLOOR)? {
                worst_phase = worst_phase.max((quotient - phase_pattern(m, n)).norm());
            }
        }
    }
    Ok((worst, worst_phase))
}

/// Worst |closed-form cycle − step³| over `cycles` three-kick cycles at the
/// q = 6 principal resonance with κ = −0.8.
pub fn q6_cycle_error(cycles: u64, extent: i64) -> Result<f64> {
    let p = SystemParams::new(1, 6, -0.8, principal_value(6).expect("q = 6 is resonant"))?;
    let mut mapped = LatticeState::init_from_params(&p, C64::new(0.0, 0.0))?;
    let mut worst = 0.0_f64;
    for _ in 0..cycles {
        let closed = analytic_q6_cycle(&mapped)?;
        mapped = step_n(&mapped, 3)?;
        for m in -extent..=extent {
            for n in -extent..=extent {
                worst = worst.max((closed.coeff(m, n) - mapped.coeff(m, n)).norm());
            }
        }
    }
    Ok(worst)
}

/// Smallest fidelity, over kicks 1..=n_kicks, between Fock propagation and
/// the converted lattice state, plus the largest |raw norm − 1|.
pub fn cross_representation(
    params: &SystemParams,
    alpha: C64,
    n_kicks: u64,
    dim: usize,
    lattice_zeta_offset: f64,
) -> Result<(f64, f64)> {
    let prop = Propagator::new(params, dim)?;
    let mut psi = FockVector::coherent(alpha, dim)?;
    let lat0 = LatticeState::init_from_params(params, alpha)?;
    let mut lat = LatticeState::init_coherent(
        alpha,
        lat0.q(),
        lat0.eta(),
        lat0.zeta() + lattice_zeta_offset,
    )?;
    let mut min_fid = 1.0_f64;
    let mut worst_norm = 0.0_f64;
    for _ in 0..n_kicks {
        psi = prop.step(&psi)?;
        lat = step(&lat)?;
        let conv = to_fock(&lat, dim)?;
        min_fid = min_fid.min(conv.state.fidelity(&psi));
        worst_norm = worst_norm.max((conv.raw_norm - 1.0).abs());
    }
    Ok((min_fid, worst_norm))
}

/// Interior deviation between F^q and the q-axis product, built at the
/// working size.
pub fn q_axis_deviation(params: &SystemParams, dim: usize) -> Result<f64> {
    let work = WORK_FACTOR * dim;
    let a = floquet_power(params, work, params.q())?;
    let b = q_axis_product(params, work, 1)?;
    Ok(interior_max_deviation(
        a.as_ref(),
        b.as_ref(),
        interior_extent(dim),
    ))
}

/// Largest commutator norm over both γ generators.
pub fn max_symmetry_commutator(params: &SystemParams, dim: usize) -> Result<f64> {
    let lat = symmetry_generators(params.q(), params.eta(), LatticeSet::Gamma)?;
    let mut worst = 0.0_f64;
    for g in lat.generators {
        worst = worst.max(symmetry_commutator_norm(params, dim, g)?);
    }
    Ok(worst)
}

/// Recompute a stored snapshot from its initial coherent state and report
/// the largest coefficient difference.
pub fn fixture_deviation(fixture: &LatticeState) -> Result<f64> {
    let init =
        LatticeState::init_coherent(fixture.alpha(), fixture.q(), fixture.eta(), fixture.zeta())?;
    let fresh = step_n(&init, fixture.j())?;
    let mut worst = 0.0_f64;
    for (&(m, n), &c) in fixture.coeffs().iter().chain(fresh.coeffs()) {
        worst = worst
            .max((c - fresh.coeff(m, n)).norm())
            .max((c - fixture.coeff(m, n)).norm());
    }
    Ok(worst)
}

/// Default regression fixture: six kicks from |0.3 + 0.2i⟩ at the q = 4
/// principal resonance.
pub fn default_fixture() -> Result<LatticeState> {
    let p = SystemParams::new(1, 4, -0.8, PI)?;
    step_n(&LatticeState::init_from_params(&p, C64::new(0.3, 0.2))?, 6)
}

pub fn run(opts: &VerifyOptions) -> Result<Report> {
    let full = opts.level == Level::Full;
    let mut checks = Vec::new();
    let mut add = |name: &str, tol: f64, bound: Bound, f: &dyn Fn() -> Result<f64>| -> Result<()> {
        let (v, secs) = timed(f)?;
        checks.push(CheckResult::new(name, v, tol, bound, secs));
        Ok(())
    };

    let graf_count = if full { 100 } else { 30 };
    add("graf_identity", 1e-12, Bound::Below, &|| {
        graf_max_error(graf_count)
    })?;
    add("graf_alpha_pi", 1e-12, Bound::Below, &|| {
        let mut worst = 0.0_f64;
        for n in -5..=5 {
            let s = graf_sum(n, 1.3, PI, kick_order_max(1.3) + 12)?;
            worst = worst.max((s - bessel_j(n, 2.6)?).norm());
        }
        Ok(worst)
    })?;

    let q4 = SystemParams::new(1, 4, -0.8, PI)?;
    let q_axis_dim = if full { 256 } else { 64 };
    add("q_axis_product", 1e-8, Bound::Below, &|| {
        q_axis_deviation(&q4, q_axis_dim)
    })?;

    let amp_dim = if full { 256 } else { 128 };
    let amp_q4 = SystemParams::new(1, 4, -0.4, PI)?;
    add("amplified_kick_q4_v2", 1e-7, Bound::Below, &|| {
        amplified_equivalence_deviation(&amp_q4, amp_dim, 2)
    })?;
    if full {
        add("amplified_kick_q4_v3", 1e-7, Bound::Below, &|| {
            amplified_equivalence_deviation(&amp_q4, 256, 3)
        })?;
        let q3 = SystemParams::new(1, 3, -0.4, principal_value(3).expect("q = 3 is resonant"))?;
        add("amplified_kick_q3_v2", 1e-7, Bound::Below, &|| {
            amplified_equivalence_deviation(&q3, 256, 2)
        })?;
    }

    let n_map = if full { 8 } else { 5 };
    let (map_err, phase_err) = q4_mapping_errors(n_map, 12)?;
    add("mapping_vs_closed_form_q4", 1e-10, Bound::Below, &|| {
        Ok(map_err)
    })?;
    add("phase_pattern_q4", 1e-9, Bound::Below, &|| Ok(phase_err))?;
    let cycles = if full { 3 } else { 1 };
    add("q6_cycle", 1e-10, Bound::Below, &|| {
        q6_cycle_error(cycles, 10)
    })?;

    let orders: &[u32] = if full { &[3, 4, 6] } else { &[4] };
    let kicks = if full { 12 } else { 6 };
    let dim = if full { 256 } else { 128 };
    for &q in orders {
        let principal = principal_value(q).expect("crystal orders are resonant");
        for (label, eta_sq) in [("principal", principal), ("golden", GOLDEN_RATIO * PI)] {
            let p = SystemParams::new(1, q, -0.8, eta_sq)?;
            let offset = opts.lattice_zeta_offset;
            add(
                &format!("fock_vs_lattice_q{q}_{label}"),
                1.0 - FIDELITY_FLOOR,
                Bound::Below,
                &|| {
                    let (fid, _) =
                        cross_representation(&p, C64::new(0.0, 0.0), kicks, dim, offset)?;
                    Ok(1.0 - fid)
                },
            )?;
        }
    }

    let sym_dim = if full { 512 } else { 256 };
    for &q in orders {
        let principal = principal_value(q).expect("crystal orders are resonant");
        for (label, eta_sq) in [("principal", principal), ("golden", GOLDEN_RATIO * PI)] {
            let p = SystemParams::new(1, q, -0.8, eta_sq)?;
            add(
                &format!("symmetry_q{q}_{label}"),
                1e-6,
                Bound::Below,
                &|| max_symmetry_commutator(&p, sym_dim),
            )?;
        }
    }

    add("norm_preservation", 1e-10, Bound::Below, &|| {
        let ev = evolve(&FockVector::ground(128)?, &q4, 20)?;
        Ok((ev.state.norm() - 1.0).abs())
    })?;

    let fixture = match &opts.fixture {
        Some(f) => f.clone(),
        None => default_fixture()?,
    };
    add("lattice_fixture", 1e-12, Bound::Below, &|| {
        fixture_deviation(&fixture)
    })?;

    Ok(Report {
        level: opts.level,
        checks,
    })
}

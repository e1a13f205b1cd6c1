//! Physical and dimensionless parameters, phase-space symmetry lattices and
//! quantum-resonance classification.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Largest kick-period denominator considered when decomposing ωT = 2πr/q.
pub const Q_MAX: u32 = 64;

/// Largest denominator b accepted for a higher-order resonance a/b.
pub const B_MAX: u64 = 64;

/// Tolerance on ωT when matching it to 2πr/q.
pub const PERIOD_TOL: f64 = 1e-9;

/// Tolerance on η²/principal when matching it to a/b.
pub const RATIO_TOL: f64 = 1e-9;

/// The golden ratio φ = (1 + √5)/2.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// SI parameters of the trapped, kicked particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Particle mass M, kg.
    pub mass: f64,
    /// Harmonic trap angular frequency ω, rad/s.
    pub trap_frequency: f64,
    /// Standing-wave wavevector K = 4π/λ_L, 1/m.
    pub wavevector: f64,
    /// Rabi frequency Ω, rad/s.
    pub rabi_frequency: f64,
    /// Kick pulse duration t_p, s.
    pub pulse_duration: f64,
    /// Detuning Δ from the two-level transition, rad/s.
    pub detuning: f64,
    /// Kick period T, s.
    pub kick_period: f64,
}

impl PhysicalParams {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("trap_frequency", self.trap_frequency),
            ("wavevector", self.wavevector),
            ("pulse_duration", self.pulse_duration),
            ("kick_period", self.kick_period),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.detuning.is_finite() && self.detuning != 0.0) {
            return Err(Error::invalid("detuning must be finite and nonzero"));
        }
        if !self.rabi_frequency.is_finite() {
            return Err(Error::invalid("rabi_frequency must be finite"));
        }
        Ok(())
    }

    /// ωT.
    pub fn tau(&self) -> f64 {
        self.trap_frequency * self.kick_period
    }

    /// κ = ħΩ²t_pK² / (8√2 Δ M ω).
    pub fn kappa(&self) -> f64 {
        HBAR * self.rabi_frequency.powi(2) * self.pulse_duration * self.wavevector.powi(2)
            / (8.0 * SQRT_2 * self.detuning * self.mass * self.trap_frequency)
    }

    /// η² = K² ħ / (2Mω).
    pub fn eta_sq(&self) -> f64 {
        self.wavevector.powi(2) * HBAR / (2.0 * self.mass * self.trap_frequency)
    }
}

/// Dimensionless description of the kicked oscillator: τ = 2πr/q, kick
/// strength κ and effective Planck constant η².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    r: u32,
    q: u32,
    kappa: f64,
    eta_sq: f64,
}

impl SystemParams {
    pub fn new(r: u32, q: u32, kappa: f64, eta_sq: f64) -> Result<Self> {
        if r == 0 || q == 0 {
            return Err(Error::invalid(format!(
                "r and q must be positive, got r = {r}, q = {q}"
            )));
        }
        if gcd(r as u64, q as u64) != 1 {
            return Err(Error::invalid(format!(
                "r = {r} and q = {q} must be coprime"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::invalid(format!("κ must be finite, got {kappa}")));
        }
        if !(eta_sq.is_finite() && eta_sq > 0.0) {
            return Err(Error::invalid(format!(
                "η² must be positive and finite, got {eta_sq}"
            )));
        }
        Ok(Self {
            r,
            q,
            kappa,
            eta_sq,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta_sq(&self) -> f64 {
        self.eta_sq
    }

    pub fn eta(&self) -> f64 {
        self.eta_sq.sqrt()
    }

    /// τ = 2πr/q.
    pub fn tau(&self) -> f64 {
        2.0 * PI * self.r as f64 / self.q as f64
    }

    /// ζ = −κ/(√2 η²); positive for red detuning.
    pub fn zeta(&self) -> f64 {
        -self.kappa / (SQRT_2 * self.eta_sq)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.r, self.q, kappa, self.eta_sq)
    }

    pub fn with_eta_sq(&self, eta_sq: f64) -> Result<Self> {
        Self::new(self.r, self.q, self.kappa, eta_sq)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Find coprime (r, q) with q ≤ [`Q_MAX`] and |τ − 2πr/q| < [`PERIOD_TOL`],
/// preferring the smallest q.
pub fn rational_period(tau: f64) -> Result<(u32, u32)> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(format!(
            "kick period τ must be positive, got {tau}"
        )));
    }
    for q in 1..=Q_MAX {
        let r = (tau * q as f64 / (2.0 * PI)).round();
        if r < 1.0 {
            continue;
        }
        if (tau - 2.0 * PI * r / q as f64).abs() < PERIOD_TOL && gcd(r as u64, q as u64) == 1 {
            return Ok((r as u32, q));
        }
    }
    Err(Error::NoRationalPeriod { tau, q_max: Q_MAX })
}

/// Reduce SI parameters to the dimensionless system. `period` pins (r, q);
/// when absent the smallest matching denominator is searched for.
pub fn reduce(p: &PhysicalParams, period: Option<(u32, u32)>) -> Result<SystemParams> {
    p.validate()?;
    let tau = p.tau();
    let (r, q) = match period {
        Some((r, q)) => {
            if q == 0 || (tau - 2.0 * PI * r as f64 / q as f64).abs() >= PERIOD_TOL {
                return Err(Error::NoRationalPeriod { tau, q_max: Q_MAX });
            }
            (r, q)
        }
        None => rational_period(tau)?,
    };
    SystemParams::new(r, q, p.kappa(), p.eta_sq())
}

/// Distinct nonzero values z of |sin(2πj/q)|, j = 0..q−1, in ascending order.
pub fn sine_moduli(q: u32) -> Vec<f64> {
    let mut zs: Vec<f64> = Vec::new();
    for j in 0..q {
        let z = (2.0 * PI * j as f64 / q as f64).sin().abs();
        if z < 1e-12 {
            continue;
        }
        if !zs.iter().any(|&v| (v - z).abs() < 1e-12) {
            zs.push(z);
        }
    }
    zs.sort_by(|a, b| a.total_cmp(b));
    zs
}

/// Which η² values make every pair of kick displacements commute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonantValues {
    /// q ∈ {1, 2}: all kicks act along one axis; no η² dependence.
    Trivial,
    /// Multiples of this principal value.
    Principal(f64),
    /// The sine moduli take more than one value; no η² satisfies all of them.
    Impossible,
}

/// Resonant η² for period denominator q.
///
/// η² |sin(2πj/q)| must be a multiple of π for every j, so a resonance exists
/// only when all nonzero sine moduli coincide; the principal value is then π/z.
pub fn resonant_values(q: u32) -> ResonantValues {
    let zs = sine_moduli(q);
    match zs.as_slice() {
        [] => ResonantValues::Trivial,
        [z] => ResonantValues::Principal(PI / z),
        _ => ResonantValues::Impossible,
    }
}

pub fn principal_value(q: u32) -> Option<f64> {
    match resonant_values(q) {
        ResonantValues::Principal(v) => Some(v),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceKind {
    Resonant,
    Nonresonant,
    TrivialPeriod,
    NoResonancePossible,
}

/// Classification of η² for a given q. `a/b` is set only for resonant values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceClass {
    pub kind: ResonanceKind,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub principal: Option<f64>,
}

impl ResonanceClass {
    pub fn is_resonant(&self) -> bool {
        self.kind == ResonanceKind::Resonant
    }

    /// Resonant at an integer multiple of the principal value.
    pub fn is_principal_multiple(&self) -> bool {
        self.is_resonant() && self.b == Some(1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Best rational a/b ≤ [`B_MAX`] from the continued-fraction convergents of x,
/// accepted only within [`RATIO_TOL`].
pub fn rational_approximation(x: f64) -> Option<(u64, u64)> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > B_MAX {
            break;
        }
        if (x - h as f64 / k as f64).abs() < RATIO_TOL {
            return Some((h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = rest - a as f64;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

pub fn classify(eta_sq: f64, q: u32) -> ResonanceClass {
    let none = |kind| ResonanceClass {
        kind,
        a: None,
        b: None,
        principal: None,
    };
    match resonant_values(q) {
        ResonantValues::Trivial => none(ResonanceKind::TrivialPeriod),
        ResonantValues::Impossible => none(ResonanceKind::NoResonancePossible),
        ResonantValues::Principal(p) => match rational_approximation(eta_sq / p) {
            Some((a, b)) => ResonanceClass {
                kind: ResonanceKind::Resonant,
                a: Some(a),
                b: Some(b),
                principal: Some(p),
            },
            None => ResonanceClass {
                kind: ResonanceKind::Nonresonant,
                a: None,
                b: None,
                principal: Some(p),
            },
        },
    }
}

/// e^{αβ* − α*β} for α = i k_m η e^{i2πmr/q}, β = i k_n η e^{i2πnr/q}, with
/// dj = m − n. Equal to one exactly when D(α) and D(β) commute.
pub fn commutation_phase(eta_sq: f64, q: u32, r: u32, k_m: i64, k_n: i64, dj: u32) -> C64 {
    let eta = eta_sq.sqrt();
    let angle = |j: u32| 2.0 * PI * (j as f64) * r as f64 / q as f64;
    let alpha = C64::new(0.0, k_m as f64 * eta) * C64::from_polar(1.0, angle(dj));
    let beta = C64::new(0.0, k_n as f64 * eta);
    (alpha * beta.conj() - alpha.conj() * beta).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeSet {
    /// Translational symmetries of the eigenstates of F^q.
    Gamma,
    /// Displacements making up the kicks in F^q.
    #[serde(rename = "Gamma")]
    CapitalGamma,
}

/// Two generating displacements of a phase-space crystal lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryLattice {
    pub q: u32,
    pub set: LatticeSet,
    pub generators: [C64; 2],
}

impl SymmetryLattice {
    /// k·g₀ + l·g₁.
    pub fn point(&self, k: i64, l: i64) -> C64 {
        self.generators[0] * k as f64 + self.generators[1] * l as f64
    }
}

pub fn symmetry_generators(q: u32, eta: f64, set: LatticeSet) -> Result<SymmetryLattice> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid(format!("η must be positive, got {eta}")));
    }
    let s3 = 3f64.sqrt();
    let generators = match (q, set) {
        (4, LatticeSet::Gamma) => [C64::new(PI / eta, 0.0), C64::new(0.0, PI / eta)],
        (4, LatticeSet::CapitalGamma) => [C64::new(eta, 0.0), C64::new(0.0, eta)],
        (3 | 6, LatticeSet::Gamma) => [
            C64::new(1.0, 1.0 / s3) * (PI / eta),
            C64::new(1.0, -1.0 / s3) * (PI / eta),
        ],
        (3 | 6, LatticeSet::CapitalGamma) => [
            C64::new(s3 / 2.0, 0.5) * eta,
            C64::new(s3 / 2.0, -0.5) * eta,
        ],
        _ => return Err(Error::NoCrystalSymmetry(q)),
    };
    Ok(SymmetryLattice { q, set, generators })
}

/// Parse η² written as a product/quotient of factors such as `pi`, `2pi`,
/// `sqrt3`, `phi`, `0.9` or `sqrt(2)`; e.g. `pi/2`, `2pi/sqrt3*2`, `phi*pi`,
/// `3/4*pi`, `1.1pi`.
pub fn parse_eta_sq(input: &str) -> Result<f64> {
    let err = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s: String = input
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    if s.is_empty() {
        return Err(err("empty expression"));
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = s.as_str();
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let (factor, tail) = rest.split_at(end);
        let f = parse_factor(factor).ok_or_else(|| err(&format!("bad factor {factor:?}")))?;
        value = if op == '*' { value * f } else { value / f };
        if tail.is_empty() {
            break;
        }
        op = tail.chars().next().unwrap();
        rest = &tail[1..];
    }
    if !(value.is_finite() && value > 0.0) {
        return Err(err("η² must be positive and finite"));
    }
    Ok(value)
}

/// A leading decimal number followed by zero or more named constants.
fn parse_factor(f: &str) -> Option<f64> {
    if f.is_empty() {
        return None;
    }
    let split = f
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | '+' | '-')))
        .unwrap_or(f.len());
    let (num, mut names) = f.split_at(split);
    let mut value = if num.is_empty() {
        1.0
    } else {
        num.parse::<f64>().ok()?
    };
    while !names.is_empty() {
        if let Some(r) = names.strip_prefix("pi") {
            value *= PI;
            names = r;
        } else if let Some(r) = names.strip_prefix("phi") {
            value *= GOLDEN_RATIO;
            names = r;
        } else if let Some(r) = names.strip_prefix("sqrt(") {
            let close = r.find(')')?;
            value *= r[..close].parse::<f64>().ok()?.sqrt();
            names = &r[close + 1..];
        } else if let Some(r) = names.strip_prefix("sqrt") {
            let digits = r
                .find(|c: char| !(c.is_ascii_digit() || c == '.'))
                .unwrap_or(r.len());
            value *= r[..digits].parse::<f64>().ok()?.sqrt();
            names = &r[digits..];
        } else {
            return None;
        }
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_physical() -> PhysicalParams {
        // ¹³³Cs in a 20 Hz trap, 10.6 µm standing wave
        PhysicalParams {
            mass: 2.206_946_9e-25,
            trap_frequency: 2.0 * PI * 20.0,
            wavevector: 4.0 * PI / 10.6e-6,
            rabi_frequency: 2.0 * PI * 1e6,
            pulse_duration: 1e-6,
            detuning: -2.0 * PI * 1e9,
            kick_period: 0.0,
        }
    }

    #[test]
    fn quarter_period_reduces_to_q4() {
        let mut p = example_physical();
        p.kick_period = PI / (2.0 * p.trap_frequency);
        let s = reduce(&p, None).unwrap();
        assert_eq!((s.r(), s.q()), (1, 4));
        assert!((s.tau() - PI / 2.0).abs() < 1e-15);
        let s = reduce(&p, Some((1, 4))).unwrap();
        assert_eq!(s.q(), 4);
        assert!(reduce(&p, Some((1, 3))).is_err());
    }

    #[test]
    fn reduction_formulas() {
        let mut p = example_physical();
        p.kick_period = 2.0 * PI / (3.0 * p.trap_frequency);
        let s = reduce(&p, None).unwrap();
        assert_eq!((s.r(), s.q()), (1, 3));
        let kappa = HBAR * p.rabi_frequency.powi(2) * p.pulse_duration * p.wavevector.powi(2)
            / (8.0 * SQRT_2 * p.detuning * p.mass * p.trap_frequency);
        assert!((s.kappa() - kappa).abs() <= 1e-15 * kappa.abs());
        let eta = p.wavevector * (HBAR / (2.0 * p.mass * p.trap_frequency)).sqrt();
        assert!((s.eta_sq() - eta * eta).abs() < 1e-12 * eta * eta);
        // ζ reduces to −Ω²t_p/(8Δ), independent of the trap
        let zeta = -p.rabi_frequency.powi(2) * p.pulse_duration / (8.0 * p.detuning);
        assert!((s.zeta() - zeta).abs() < 1e-12 * zeta.abs());
        assert!(s.zeta() > 0.0);
    }

    #[test]
    fn doubling_wavevector_quadruples_eta_sq() {
        let mut p = example_physical();
        p.kick_period = PI / (2.0 * p.trap_frequency);
        let a = reduce(&p, None).unwrap();
        p.wavevector *= 2.0;
        let b = reduce(&p, None).unwrap();
        assert!((b.eta_sq() / a.eta_sq() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn irrational_period_is_rejected() {
        let mut p = example_physical();
        p.kick_period = 1.0 / p.trap_frequency;
        assert!(matches!(
            reduce(&p, None),
            Err(Error::NoRationalPeriod { .. })
        ));
    }

    #[test]
    fn invalid_physical_params() {
        let mut p = example_physical();
        p.kick_period = PI / (2.0 * p.trap_frequency);
        p.detuning = 0.0;
        assert!(reduce(&p, None).is_err());
        p.detuning = 1.0;
        p.mass = -1.0;
        assert!(reduce(&p, None).is_err());
    }

    #[test]
    fn zeta_from_kappa_and_eta() {
        let s = SystemParams::new(1, 4, -0.8, PI).unwrap();
        let want = 0.8 / (SQRT_2 * PI);
        assert!((s.zeta() - want).abs() < 1e-16);
        assert!((s.zeta() - 0.180).abs() < 1e-3);
    }

    #[test]
    fn system_params_validation() {
        assert!(SystemParams::new(2, 4, -0.8, PI).is_err());
        assert!(SystemParams::new(1, 0, -0.8, PI).is_err());
        assert!(SystemParams::new(1, 4, -0.8, 0.0).is_err());
        assert!(SystemParams::new(3, 4, -0.8, 1.0).is_ok());
    }

    #[test]
    fn resonant_value_table() {
        assert_eq!(resonant_values(1), ResonantValues::Trivial);
        assert_eq!(resonant_values(2), ResonantValues::Trivial);
        let two_pi_root3 = 2.0 * PI / 3f64.sqrt();
        for (q, want) in [(3, two_pi_root3), (4, PI), (6, two_pi_root3)] {
            match resonant_values(q) {
                ResonantValues::Principal(v) => assert!((v - want).abs() < 1e-14, "q = {q}"),
                other => panic!("q = {q}: {other:?}"),
            }
        }
        for q in [5, 7, 8, 9, 10, 12] {
            assert_eq!(resonant_values(q), ResonantValues::Impossible, "q = {q}");
        }
        assert_eq!(sine_moduli(4), vec![1.0]);
        assert_eq!(sine_moduli(5).len(), 2);
    }

    #[test]
    fn commutation_phase_examples() {
        assert!((commutation_phase(PI, 4, 1, 1, 1, 1) - 1.0).norm() < 1e-14);
        assert!((commutation_phase(PI / 2.0, 4, 1, 1, 1, 1) + 1.0).norm() < 1e-14);
        for dj in 0..6 {
            assert!((commutation_phase(1.234, 6, 1, 0, 3, dj) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn commutation_phase_closed_form() {
        for &(e, q, r, km, kn, dj) in &[
            (1.3, 5, 2, 2, -1, 3),
            (0.7, 7, 1, 3, 4, 2),
            (PI, 3, 1, 1, 1, 1),
        ] {
            let p = commutation_phase(e, q, r, km, kn, dj);
            let arg = 2.0 * e * (km * kn) as f64 * (2.0 * PI * (r * dj) as f64 / q as f64).sin();
            assert!((p - C64::from_polar(1.0, arg)).norm() < 1e-13);
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify(PI, 4);
        assert_eq!(
            (c.kind, c.a, c.b),
            (ResonanceKind::Resonant, Some(1), Some(1))
        );
        let c = classify(PI / 2.0, 4);
        assert_eq!(
            (c.kind, c.a, c.b),
            (ResonanceKind::Resonant, Some(1), Some(2))
        );
        assert_eq!(
            classify(GOLDEN_RATIO * PI, 4).kind,
            ResonanceKind::Nonresonant
        );
        assert_eq!(classify(1.0, 2).kind, ResonanceKind::TrivialPeriod);
        assert_eq!(classify(1.0, 5).kind, ResonanceKind::NoResonancePossible);
        let c = classify(3.0 * PI / 4.0, 4);
        assert_eq!((c.a, c.b), (Some(3), Some(4)));
        let c = classify(2.0 * 2.0 * PI / 3f64.sqrt(), 6);
        assert!(c.is_principal_multiple());
        assert_eq!(c.a, Some(2));
    }

    #[test]
    fn classify_is_scale_consistent() {
        for q in [3, 4, 6] {
            let p = principal_value(q).unwrap();
            for w in 1..=5 {
                let c = classify(w as f64 * p, q);
                assert_eq!(
                    (c.kind, c.a, c.b),
                    (ResonanceKind::Resonant, Some(w), Some(1))
                );
            }
        }
    }

    #[test]
    fn resonance_json_shape() {
        let v: serde_json::Value = serde_json::from_str(&classify(PI / 2.0, 4).to_json()).unwrap();
        assert_eq!(v["kind"], "resonant");
        assert_eq!(v["a"], 1);
        assert_eq!(v["b"], 2);
        assert!((v["principal"].as_f64().unwrap() - PI).abs() < 1e-15);
        let v: serde_json::Value = serde_json::from_str(&classify(1.0, 5).to_json()).unwrap();
        assert_eq!(v["kind"], "no_resonance_possible");
        assert!(v["a"].is_null() && v["principal"].is_null());
    }

    #[test]
    fn generators_examples() {
        let eta = PI.sqrt();
        let g = symmetry_generators(4, eta, LatticeSet::Gamma).unwrap();
        let cg = symmetry_generators(4, eta, LatticeSet::CapitalGamma).unwrap();
        for i in 0..2 {
            assert!((g.generators[i] - cg.generators[i]).norm() < 1e-15);
        }
        assert!((g.generators[0] - C64::new(eta, 0.0)).norm() < 1e-15);
        assert!((g.generators[1] - C64::new(0.0, eta)).norm() < 1e-15);

        let g = symmetry_generators(4, 1.3, LatticeSet::Gamma).unwrap();
        assert!((g.generators[0] - C64::new(PI / 1.3, 0.0)).norm() < 1e-15);
        assert!((g.generators[1] - C64::new(0.0, PI / 1.3)).norm() < 1e-15);

        let g = symmetry_generators(6, 0.9, LatticeSet::CapitalGamma).unwrap();
        let s3 = 3f64.sqrt();
        assert!((g.generators[0] - C64::new(s3, 1.0) * 0.45).norm() < 1e-15);
        assert!((g.generators[1] - C64::new(s3, -1.0) * 0.45).norm() < 1e-15);

        assert!(matches!(
            symmetry_generators(5, 1.0, LatticeSet::Gamma),
            Err(Error::NoCrystalSymmetry(5))
        ));
    }

    #[test]
    fn sets_coincide_at_hexagonal_principal_value() {
        let eta = (2.0 * PI / 3f64.sqrt()).sqrt();
        let g = symmetry_generators(3, eta, LatticeSet::Gamma).unwrap();
        let cg = symmetry_generators(3, eta, LatticeSet::CapitalGamma).unwrap();
        for i in 0..2 {
            assert!((g.generators[i] - cg.generators[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn parse_symbolic_eta_sq() {
        let cases = [
            ("pi", PI),
            ("pi/2", PI / 2.0),
            ("2pi/sqrt3", 2.0 * PI / 3f64.sqrt()),
            ("2pi/sqrt3*2", 4.0 * PI / 3f64.sqrt()),
            ("phi*pi", GOLDEN_RATIO * PI),
            ("3/4*pi", 0.75 * PI),
            ("pi*0.9", 0.9 * PI),
            ("1.1pi", 1.1 * PI),
            ("sqrt3*pi/2", 3f64.sqrt() * PI / 2.0),
            ("sqrt(2)", 2f64.sqrt()),
            ("2.5", 2.5),
            ("1e-1", 0.1),
            (" PI ", PI),
        ];
        for (s, want) in cases {
            let got = parse_eta_sq(s).unwrap();
            assert!((got - want).abs() < 1e-15 * want, "{s}: {got} vs {want}");
        }
        for bad in ["", "pie", "pi//2", "-1", "0", "x"] {
            assert!(parse_eta_sq(bad).is_err(), "{bad:?} should fail");
        }
    }
}

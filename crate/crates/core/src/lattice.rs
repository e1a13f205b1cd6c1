//! Lattice-state representation: a state is a superposition of coherent
//! states on a phase-space lattice,
//!
//! ψ_j = e^{−iπj/q} Σ_{m,n} M[j]_{m,n} D(iη[m + n e^{−i2π/q}]) |α e^{−i2πj/q}⟩,
//!
//! and one kick plus one free period acts as an exact linear recurrence on
//! the coefficients M. Only q ∈ {3, 4, 6} with r = 1 admit this form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fock::FockVector;
use crate::model::{classify, ResonanceKind, SystemParams};
use crate::specfun::{coherent_amplitudes, i_pow, kick_order_max, BesselTable, KickWeights};
use crate::{Error, Result, C64};

/// Coefficients smaller than this are dropped after every step.
pub const EPS_LAT: f64 = 1e-12;

/// Raw converted norms further than this from one mark the conversion as
/// unreliable.
pub const UNRELIABLE_NORM_TOL: f64 = 1e-3;

/// Integer ξ_q with e^{−i4π/q} = ξ_q e^{−i2π/q} − 1.
pub fn xi_q(q: u32) -> Result<i64> {
    match q {
        3 => Ok(-1),
        4 => Ok(0),
        6 => Ok(1),
        _ => Err(Error::UnsupportedLatticeOrder(q)),
    }
}

pub type Coefficients = BTreeMap<(i64, i64), C64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    alpha: C64,
    j: u64,
    q: u32,
    eta: f64,
    zeta: f64,
    coeffs: Coefficients,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    alpha_re: f64,
    alpha_im: f64,
    j: u64,
    q: u32,
    eta: f64,
    zeta: f64,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

impl LatticeState {
    /// The coherent state |α⟩ as a single lattice coefficient M_{0,0} = 1.
    pub fn init_coherent(alpha: C64, q: u32, eta: f64, zeta: f64) -> Result<Self> {
        let mut coeffs = Coefficients::new();
        coeffs.insert((0, 0), C64::new(1.0, 0.0));
        Self::from_coeffs(alpha, 0, q, eta, zeta, coeffs)
    }

    pub fn init_from_params(params: &SystemParams, alpha: C64) -> Result<Self> {
        if params.r() != 1 {
            return Err(Error::UnsupportedWinding(params.r()));
        }
        Self::init_coherent(alpha, params.q(), params.eta(), params.zeta())
    }

    pub fn from_coeffs(
        alpha: C64,
        j: u64,
        q: u32,
        eta: f64,
        zeta: f64,
        coeffs: Coefficients,
    ) -> Result<Self> {
        xi_q(q)?;
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("η must be positive, got {eta}")));
        }
        if !zeta.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::invalid("ζ and α must be finite"));
        }
        Ok(Self {
            alpha,
            j,
            q,
            eta,
            zeta,
            coeffs,
        })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// Number of kicks applied.
    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_sq(&self) -> f64 {
        self.eta * self.eta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    /// M_{m,n}, zero when not stored.
    pub fn coeff(&self, m: i64, n: i64) -> C64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest |m| and largest |n| among stored coefficients.
    pub fn support_extent(&self) -> (i64, i64) {
        self.coeffs.keys().fold((0, 0), |(am, an), &(m, n)| {
            (am.max(m.abs()), an.max(n.abs()))
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let snap = Snapshot {
            alpha_re: self.alpha.re,
            alpha_im: self.alpha.im,
            j: self.j,
            q: self.q,
            eta: self.eta,
            zeta: self.zeta,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(m, n), c)| (m, n, c.re, c.im))
                .collect(),
        };
        Ok(serde_json::to_string(&snap)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: Snapshot = serde_json::from_str(text)?;
        let coeffs = snap
            .coeffs
            .iter()
            .map(|&(m, n, re, im)| ((m, n), C64::new(re, im)))
            .collect();
        Self::from_coeffs(
            C64::new(snap.alpha_re, snap.alpha_im),
            snap.j,
            snap.q,
            snap.eta,
            snap.zeta,
            coeffs,
        )
    }
}

/// e^{−ikmη² sin(2π/q)}.
pub fn mapping_phase(q: u32, eta_sq: f64, k: i64, m: i64) -> C64 {
    let s = (2.0 * PI / q as f64).sin();
    C64::from_polar(1.0, -((k * m) as f64) * eta_sq * s)
}

/// One kick plus one free period:
/// M′_{m,n} = Σ_k i^k J_k(ζ) M_{mξ+n−k, −m} e^{−ikmη² sin(2π/q)}.
///
/// Implemented by scattering each source coefficient (a, b) to
/// m = −b, n = a + k + bξ.
pub fn step(state: &LatticeState) -> Result<LatticeState> {
    let xi = xi_q(state.q)?;
    let weights = KickWeights::new(state.zeta)?;
    let eta_sq = state.eta_sq();
    let mut out = Coefficients::new();
    for (&(a, b), &c) in &state.coeffs {
        let m = -b;
        for (k, w) in weights.iter() {
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let n = a + k + b * xi;
            *out.entry((m, n)).or_default() += c * w * mapping_phase(state.q, eta_sq, k, m);
        }
    }
    out.retain(|_, v| v.norm() >= EPS_LAT);
    Ok(LatticeState {
        coeffs: out,
        j: state.j + 1,
        ..state.clone()
    })
}

pub fn step_n(state: &LatticeState, n: u64) -> Result<LatticeState> {
    let mut s = state.clone();
    for _ in 0..n {
        s = step(&s)?;
    }
    Ok(s)
}

/// Bessel-argument multipliers (C_m, C_n) = (⌊N/2⌋, ⌈N/2⌉) after N kicks at
/// the q = 4 resonance.
pub fn q4_multipliers(n_kicks: u64) -> (u64, u64) {
    (n_kicks / 2, n_kicks.div_ceil(2))
}

/// M[N]_{m,n} at η² = π, q = 4.
pub fn analytic_q4(n_kicks: u64, zeta: f64, m: i64, n: i64) -> Result<C64> {
    analytic_q4_multiple(1, n_kicks, zeta, m, n)
}

/// M[N]_{m,n} at η² = wπ, q = 4:
/// (−1)^{wmn} i^m J_m(C_m ζ) i^n J_n(C_n ζ).
pub fn analytic_q4_multiple(w: u64, n_kicks: u64, zeta: f64, m: i64, n: i64) -> Result<C64> {
    if n_kicks < 2 {
        return Err(Error::OutOfRegime {
            min: 2,
            got: n_kicks as usize,
        });
    }
    let (cm, cn) = q4_multipliers(n_kicks);
    let sign = if (w as i64 * m * n).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    let jm = crate::specfun::bessel_j(m, cm as f64 * zeta)?;
    let jn = crate::specfun::bessel_j(n, cn as f64 * zeta)?;
    Ok(i_pow(m) * i_pow(n) * (sign * jm * jn))
}

/// The lattice phase pattern (−1)^{mn} i^{m+n} at the q = 4 resonance.
pub fn phase_pattern(m: i64, n: i64) -> C64 {
    let sign = if (m * n).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    i_pow(m + n) * sign
}

/// M[N]_{m,n} / [J_m(C_m ζ) J_n(C_n ζ)] for a q = 4 state with N ≥ 2, or
/// `None` when the denominator is below `floor`.
pub fn phase_quotient(state: &LatticeState, m: i64, n: i64, floor: f64) -> Result<Option<C64>> {
    if state.q != 4 {
        return Err(Error::invalid("phase quotients are defined for q = 4"));
    }
    if state.j < 2 {
        return Err(Error::OutOfRegime {
            min: 2,
            got: state.j as usize,
        });
    }
    let (cm, cn) = q4_multipliers(state.j);
    let den = crate::specfun::bessel_j(m, cm as f64 * state.zeta)?
        * crate::specfun::bessel_j(n, cn as f64 * state.zeta)?;
    if den.abs() < floor {
        return Ok(None);
    }
    Ok(Some(state.coeff(m, n) / den))
}

/// Evaluator for the three-Bessel sum giving the q = 6 coefficients after
/// three kicks at η² = w·2π/√3:
///
/// Σ_k i^k J_k(z) i^{n−k} J_{n−k}(z) i^{m+n−k} J_{m+n−k}(z) e^{−iw(mn + n² + k²)π}.
#[derive(Debug, Clone)]
pub struct Q6TripleSum {
    w: u64,
    table: BesselTable,
    k_max: i64,
}

impl Q6TripleSum {
    /// `extent` bounds the |m|, |n| the evaluator will be asked about.
    pub fn new(w: u64, z: f64, extent: usize) -> Result<Self> {
        let k_max = kick_order_max(z);
        let table = BesselTable::new(2 * extent + 2 * k_max + 2, z)?;
        Ok(Self {
            w,
            table,
            k_max: k_max as i64,
        })
    }

    pub fn eval(&self, m: i64, n: i64) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for k in -self.k_max..=self.k_max {
            let jk = self.table.get(k);
            if jk == 0.0 {
                continue;
            }
            let amp = jk * self.table.get(n - k) * self.table.get(m + n - k);
            let parity = (self.w as i64 * (m * n + n * n + k * k)).rem_euclid(2);
            let sign = if parity == 1 { -amp } else { amp };
            sum += i_pow(k + (n - k) + (m + n - k)) * sign;
        }
        sum
    }
}

/// Advance a q = 6 resonant state from kick 3J to kick 3(J+1) using the
/// closed form: the three-kick coefficients evaluated at (J+1)ζ.
pub fn analytic_q6_cycle(state: &LatticeState) -> Result<LatticeState> {
    if state.q != 6 {
        return Err(Error::invalid(format!(
            "the three-kick cycle is for q = 6, got q = {}",
            state.q
        )));
    }
    if state.j % 3 != 0 {
        return Err(Error::invalid(format!(
            "kick count {} is not a multiple of 3",
            state.j
        )));
    }
    let class = classify(state.eta_sq(), 6);
    let w = match (class.kind, class.a, class.b) {
        (ResonanceKind::Resonant, Some(a), Some(1)) => a,
        _ => {
            return Err(Error::NotResonant {
                eta_sq: state.eta_sq(),
                q: 6,
            })
        }
    };
    let cycles = state.j / 3 + 1;
    let z = cycles as f64 * state.zeta;
    let extent = 3 * cycles as usize * kick_order_max(state.zeta);
    let kernel = Q6TripleSum::new(w, z, extent)?;
    let e = extent as i64;
    let mut coeffs = Coefficients::new();
    for m in -e..=e {
        for n in -e..=e {
            let v = kernel.eval(m, n);
            if v.norm() >= EPS_LAT {
                coeffs.insert((m, n), v);
            }
        }
    }
    Ok(LatticeState {
        coeffs,
        j: state.j + 3,
        ..state.clone()
    })
}

/// A lattice state materialized in the number basis.
#[derive(Debug, Clone)]
pub struct FockConversion {
    /// Normalized number-basis vector.
    pub state: FockVector,
    /// Norm before normalization.
    pub raw_norm: f64,
    /// Set when |raw_norm − 1| exceeds [`UNRELIABLE_NORM_TOL`].
    pub unreliable: bool,
}

/// Each term uses D(β)|γ⟩ = e^{(βγ* − β*γ)/2} |β + γ⟩.
pub fn to_fock(state: &LatticeState, dim: usize) -> Result<FockConversion> {
    if dim == 0 {
        return Err(Error::invalid("basis dimension must be positive"));
    }
    let q = state.q as f64;
    let j = state.j as f64;
    let w = C64::from_polar(1.0, -2.0 * PI / q);
    let gamma = state.alpha * C64::from_polar(1.0, -2.0 * PI * j / q);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (&(m, n), &c) in &state.coeffs {
        let beta = C64::new(0.0, state.eta) * (w * n as f64 + m as f64);
        let phase = ((beta * gamma.conj() - beta.conj() * gamma) * 0.5).exp();
        let weight = c * phase;
        for (a, x) in amps.iter_mut().zip(coherent_amplitudes(beta + gamma, dim)) {
            *a += weight * x;
        }
    }
    let global = C64::from_polar(1.0, -PI * j / q);
    amps.iter_mut().for_each(|a| *a *= global);
    let mut v = FockVector::from_amps(amps)?;
    let raw_norm = v.normalize();
    Ok(FockConversion {
        state: v,
        raw_norm,
        unreliable: (raw_norm - 1.0).abs() > UNRELIABLE_NORM_TOL,
    })
}

//! Special-function kernels: integer-order Bessel functions of the first kind,
//! Graf's addition theorem for two equal arguments, and number-basis matrix
//! elements of the displacement operator.

use std::f64::consts::{LN_10, PI};

use faer::Mat;

use crate::{Error, Result, C64};

/// Bessel orders whose magnitude falls below this are dropped from kick sums.
pub const KICK_TAIL: f64 = 1e-14;

/// J_0(x) ..= J_order_max(x) for a single real argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    order_max: usize,
    argument: f64,
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(order_max: usize, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::invalid(format!(
                "Bessel argument must be finite, got {x}"
            )));
        }
        let mut values = if x == 0.0 {
            let mut v = vec![0.0; order_max + 1];
            v[0] = 1.0;
            v
        } else {
            miller_downward(order_max, x.abs())
        };
        if x < 0.0 {
            // J_n(-x) = (-1)^n J_n(x)
            values.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
        }
        Ok(Self {
            order_max,
            argument: x,
            values,
        })
    }

    pub fn order_max(&self) -> usize {
        self.order_max
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// J_n for any integer order. Negative orders use J_{-n} = (-1)^n J_n;
    /// orders beyond `order_max` read as zero.
    pub fn get(&self, n: i64) -> f64 {
        let k = n.unsigned_abs() as usize;
        if k > self.order_max {
            return 0.0;
        }
        let v = self.values[k];
        if n < 0 && k % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Miller's algorithm: downward recurrence from a start order well past the
/// turning point, normalized with J_0 + 2 Σ J_2k = 1. Requires x > 0.
fn miller_downward(order_max: usize, x: f64) -> Vec<f64> {
    const BIG: f64 = 1e250;
    let top = order_max.max(x.ceil() as usize);
    let mut start = top + 32 + (160.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let mut work = vec![0.0; start + 2];
    work[start] = 1.0;
    for k in (1..=start).rev() {
        let next = (2.0 * k as f64 / x) * work[k] - work[k + 1];
        work[k - 1] = next;
        if next.abs() > BIG {
            work[k - 1..=start].iter_mut().for_each(|v| *v /= BIG);
        }
    }

    let norm = work[0] + 2.0 * work.iter().skip(2).step_by(2).sum::<f64>();
    work.truncate(order_max + 1);
    work.iter_mut().for_each(|v| *v /= norm);
    work
}

/// J_n(x) for integer n and finite real x.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    let table = BesselTable::new(n.unsigned_abs() as usize, x)?;
    Ok(table.get(n))
}

/// Smallest order k past the turning point with |J_k(ζ)| < [`KICK_TAIL`].
/// Every order beyond it is smaller still, so sums over |k| ≤ k_max are
/// complete to that tolerance.
pub fn kick_order_max(zeta: f64) -> usize {
    let x = zeta.abs();
    if x == 0.0 {
        return 1;
    }
    let turning = x.ceil() as usize;
    let mut span = turning + 40;
    loop {
        let table = BesselTable::new(span, x).expect("finite kick strength");
        if let Some(k) = (turning..=span).find(|&k| table.values[k].abs() < KICK_TAIL) {
            return k;
        }
        span *= 2;
    }
}

/// The Jacobi–Anger weights i^k J_k(ζ) for |k| ≤ k_max(ζ), computed once per ζ.
#[derive(Debug, Clone)]
pub struct KickWeights {
    zeta: f64,
    k_max: usize,
    weights: Vec<C64>,
}

impl KickWeights {
    pub fn new(zeta: f64) -> Result<Self> {
        if !zeta.is_finite() {
            return Err(Error::invalid(format!(
                "kick strength ζ must be finite, got {zeta}"
            )));
        }
        let k_max = kick_order_max(zeta);
        let table = BesselTable::new(k_max, zeta)?;
        let weights = (-(k_max as i64)..=k_max as i64)
            .map(|k| i_pow(k) * table.get(k))
            .collect();
        Ok(Self {
            zeta,
            k_max,
            weights,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// (k, i^k J_k(ζ)) for k = -k_max ..= k_max.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let k0 = -(self.k_max as i64);
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (k0 + i as i64, w))
    }
}

/// i^k for any integer k.
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Triangle construction relating (ζ, α) to (ζ′, χ) in Graf's addition theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrafGeometry {
    pub zeta: f64,
    pub alpha: f64,
    pub zeta_prime: f64,
    pub chi: f64,
}

pub fn graf_geometry(zeta: f64, alpha: f64) -> Result<GrafGeometry> {
    if !zeta.is_finite() {
        return Err(Error::invalid(format!("ζ must be finite, got {zeta}")));
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::invalid(format!("α must lie in [0, π], got {alpha}")));
    }
    let one_minus_cos = 1.0 - alpha.cos();
    let zeta_prime = zeta * (2.0 * one_minus_cos).sqrt();
    // The common factor ζ cancels between the two legs, which keeps χ in
    // [0, π/2] for either sign of ζ.
    let chi = alpha.sin().atan2(one_minus_cos);
    Ok(GrafGeometry {
        zeta,
        alpha,
        zeta_prime,
        chi,
    })
}

/// Σ_{k=-k_max}^{k_max} J_{n+k}(ζ) J_k(ζ) e^{ikα}.
pub fn graf_sum(n: i64, zeta: f64, alpha: f64, k_max: usize) -> Result<C64> {
    let table = BesselTable::new(n.unsigned_abs() as usize + k_max, zeta)?;
    let k_max = k_max as i64;
    Ok((-k_max..=k_max)
        .map(|k| C64::from_polar(table.get(n + k) * table.get(k), k as f64 * alpha))
        .sum())
}

/// ln(n!) by direct summation; exact enough for the orders used here.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// l_j = sqrt(j!/(j+k)!) x^{k/2} e^{-x/2} L_j^{(k)}(x) for j = 0 ..= j_max.
///
/// These are the moduli-with-sign of displacement matrix elements along the
/// k-th diagonal, so they are bounded by one. The recurrence runs on a
/// rescaled copy with the scale carried in log space.
fn laguerre_diagonal(k: usize, x: f64, j_max: usize) -> Vec<f64> {
    const HI: f64 = 1e150;
    const LO: f64 = 1e-150;
    let mut out = Vec::with_capacity(j_max + 1);
    if x == 0.0 {
        out.resize(j_max + 1, if k == 0 { 1.0 } else { 0.0 });
        return out;
    }
    let kf = k as f64;
    let mut ln_scale = -0.5 * x + 0.5 * kf * x.ln() - 0.5 * ln_factorial(k);
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    out.push(ln_scale.exp());
    for j in 0..j_max {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf * (jf + kf)).sqrt() * prev)
            / ((jf + 1.0) * (jf + kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > HI {
            prev /= HI;
            cur /= HI;
            ln_scale += 150.0 * LN_10;
        } else if mag < LO && mag > 0.0 {
            prev /= LO;
            cur /= LO;
            ln_scale -= 150.0 * LN_10;
        }
        out.push(cur * ln_scale.exp());
    }
    out
}

/// ⟨m|D(α)|n⟩ with D(α) = exp(α a† − α* a).
pub fn displacement_element(m: usize, n: usize, alpha: C64) -> C64 {
    let x = alpha.norm_sqr();
    let theta = alpha.arg();
    if m >= n {
        let k = m - n;
        let l = laguerre_diagonal(k, x, n)[n];
        C64::from_polar(l, k as f64 * theta)
    } else {
        let k = n - m;
        let l = laguerre_diagonal(k, x, m)[m];
        let sign = if k % 2 == 1 { -l } else { l };
        C64::from_polar(sign, -(k as f64) * theta)
    }
}

/// The dim × dim block of D(α) in the number basis, built diagonal by diagonal.
pub fn displacement_matrix(alpha: C64, dim: usize) -> Mat<C64> {
    let x = alpha.norm_sqr();
    let theta = alpha.arg();
    let mut out = Mat::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let diag = laguerre_diagonal(k, x, dim - 1 - k);
        let lower = C64::from_polar(1.0, k as f64 * theta);
        let upper = C64::from_polar(if k % 2 == 1 { -1.0 } else { 1.0 }, -(k as f64) * theta);
        for (j, &l) in diag.iter().enumerate() {
            out[(j + k, j)] = lower * l;
            if k > 0 {
                out[(j, j + k)] = upper * l;
            }
        }
    }
    out
}

/// ⟨n|α⟩ = e^{-|α|²/2} α^n / sqrt(n!) for n < dim.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    if dim == 0 {
        return out;
    }
    let r = alpha.norm();
    if r == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let ln_r = r.ln();
    let theta = alpha.arg();
    let mut ln_mag = -0.5 * r * r;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            ln_mag += ln_r - 0.5 * (n as f64).ln();
        }
        *slot = C64::from_polar(ln_mag.exp(), n as f64 * theta);
    }
    out
}

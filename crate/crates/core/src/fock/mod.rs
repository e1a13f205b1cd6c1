//! Truncated number-basis realization of the Floquet operator, propagation,
//! observables and quasienergy spectra.
//!
//! Operator identities that hold for the infinite oscillator are only
//! approximate near the truncation edge. Comparisons "at dimension D" are
//! therefore made on operators built in a working basis of
//! [`WORK_FACTOR`]·D states, restricted to the leading D − D/10 block.

mod dynamics;
mod husimi;
pub mod operators;
mod spectrum;

use faer::{Mat, MatRef};

use crate::{Error, Result, C64};

pub use dynamics::{
    evolve, evolve_with, kicks_to_energies, kicks_to_energy, mean_energy, Evolution, KickCount,
    Propagator,
};
pub use husimi::{husimi_at, q_function, QGrid, QGridSpec};
pub use operators::{
    amplified_equivalence_deviation, amplified_kick_operator, build_free, build_kick,
    displacement_expansion_power, floquet, floquet_power, q_axis_product, rotated_kick,
    symmetry_commutator_norm, FloquetMatrix, Quadrature,
};
pub use spectrum::{
    max_intra_band_gap, quasienergy_spectrum, spectrum_of, QuasienergyRecord, Spectrum,
    MIN_SPECTRUM_DIM, UNIT_MODULUS_TOL,
};

/// Default bound on the probability held in the top tenth of the basis.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

/// Working-basis multiplier for operator comparisons.
pub const WORK_FACTOR: usize = 2;

/// Smallest basis accepted by the operator builders.
pub const MIN_DIM: usize = 16;

/// Starting basis size for the doubling rule.
pub const DOUBLING_START: usize = 256;

/// Largest basis the doubling rule will try.
pub const DOUBLING_MAX: usize = 2000;

/// Relative change below which a doubled basis confirms the smaller one.
pub const DOUBLING_REL_TOL: f64 = 1e-6;

/// Outcome of the basis-doubling convergence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingOutcome {
    /// Accepted dimension, or the last one tried.
    pub dim: usize,
    /// Observable at `dim`.
    pub value: f64,
    /// Observable at the next (larger) dimension tried.
    pub check_value: f64,
    pub accepted: bool,
}

/// Evaluate `observable` at D, 2D, 4D, … (capped at `max`) until two
/// consecutive sizes agree within `rel_tol` relative; the smaller of the pair
/// is accepted.
pub fn doubling_rule<F>(
    start: usize,
    max: usize,
    rel_tol: f64,
    mut observable: F,
) -> Result<DoublingOutcome>
where
    F: FnMut(usize) -> Result<f64>,
{
    if start == 0 || start > max {
        return Err(Error::invalid(format!(
            "doubling range {start}..{max} is empty"
        )));
    }
    let mut dim = start;
    let mut value = observable(dim)?;
    while dim < max {
        let next = (2 * dim).min(max);
        let check_value = observable(next)?;
        if (check_value - value).abs() <= rel_tol * check_value.abs().max(f64::MIN_POSITIVE) {
            return Ok(DoublingOutcome {
                dim,
                value,
                check_value,
                accepted: true,
            });
        }
        dim = next;
        value = check_value;
    }
    Ok(DoublingOutcome {
        dim,
        value,
        check_value: value,
        accepted: false,
    })
}

/// Complex amplitudes over the number states |0⟩ … |D−1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("a Fock vector needs at least one amplitude"));
        }
        Ok(Self { amps })
    }

    /// |n⟩ in a basis of `dim` states.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::invalid(format!(
                "|{n}⟩ does not fit in a basis of {dim} states"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn ground(dim: usize) -> Result<Self> {
        Self::number(0, dim)
    }

    /// The coherent state |α⟩ expanded to `dim` states and renormalized.
    pub fn coherent(alpha: C64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("basis dimension must be positive"));
        }
        let mut v = Self {
            amps: crate::specfun::coherent_amplitudes(alpha, dim),
        };
        v.normalize();
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scale to unit norm; returns the norm before scaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
        n
    }

    /// ⟨self|other⟩ over the common leading states.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &FockVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability in the top tenth of the basis, n ≥ D − D/10.
    pub fn tail_weight(&self) -> f64 {
        let d = self.dim();
        self.amps[d - d / 10..].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_truncation_safe(&self, leak_tol: f64) -> bool {
        self.tail_weight() < leak_tol
    }

    /// Zero-pad or cut to `dim` states.
    pub fn resized(&self, dim: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(dim, C64::new(0.0, 0.0));
        Self { amps }
    }

    pub fn mean_energy(&self) -> f64 {
        mean_energy(self)
    }
}

/// Rows/columns kept when comparing operators at nominal dimension D.
pub fn interior_extent(dim: usize) -> usize {
    dim - dim / 10
}

/// max |a_ij − b_ij| over the leading `extent` × `extent` block.
pub fn interior_max_deviation(a: MatRef<'_, C64>, b: MatRef<'_, C64>, extent: usize) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..extent {
        for i in 0..extent {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Rotate `a` by the global phase that makes its largest-magnitude element
/// (within `extent`) agree in phase with the same element of `reference`.
pub fn align_global_phase(
    a: MatRef<'_, C64>,
    reference: MatRef<'_, C64>,
    extent: usize,
) -> Mat<C64> {
    let mut best = (0, 0);
    let mut best_mag = -1.0;
    for j in 0..extent {
        for i in 0..extent {
            let m = a[(i, j)].norm();
            if m > best_mag {
                best_mag = m;
                best = (i, j);
            }
        }
    }
    let ratio = reference[best] / a[best];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * phase)
}

/// Interior deviation after aligning global phases.
pub fn phase_aligned_deviation(a: MatRef<'_, C64>, b: MatRef<'_, C64>, extent: usize) -> f64 {
    let aligned = align_global_phase(a, b, extent);
    interior_max_deviation(aligned.as_ref(), b, extent)
}

pub(crate) fn mul<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> Mat<C64>
where
    L: faer::traits::Conjugate<Canonical = C64>,
    R: faer::traits::Conjugate<Canonical = C64>,
{
    let mut out = Mat::<C64>::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        faer::Accum::Replace,
        a,
        b,
        C64::new(1.0, 0.0),
        faer::get_global_parallelism(),
    );
    out
}

pub(crate) fn identity(dim: usize) -> Mat<C64> {
    Mat::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// a ← a + w·b, elementwise.
pub(crate) fn add_scaled(a: &mut Mat<C64>, w: C64, b: MatRef<'_, C64>) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a[(i, j)] += w * b[(i, j)];
        }
    }
}

pub(crate) fn negate(a: &mut Mat<C64>) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a[(i, j)] = -a[(i, j)];
        }
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim < MIN_DIM {
        return Err(Error::invalid(format!(
            "basis dimension must be at least {MIN_DIM}, got {dim}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_states() {
        let g = FockVector::ground(8).unwrap();
        assert_eq!(g.amps()[0], C64::new(1.0, 0.0));
        assert!(FockVector::number(8, 8).is_err());
        assert!(FockVector::from_amps(vec![]).is_err());
        let c = FockVector::coherent(C64::new(1.0, 0.0), 64).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-15);
        assert!((g.fidelity(&c) - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tail_weight_counts_top_tenth() {
        let v = FockVector::number(95, 100).unwrap();
        assert_eq!(v.tail_weight(), 1.0);
        assert!(!v.is_truncation_safe(DEFAULT_LEAK_TOL));
        let v = FockVector::number(89, 100).unwrap();
        assert_eq!(v.tail_weight(), 0.0);
    }

    #[test]
    fn doubling_accepts_converged_observable() {
        let out = doubling_rule(16, 2000, 1e-6, |d| Ok(1.0 + 1.0 / (d * d * d) as f64)).unwrap();
        assert!(out.accepted);
        assert_eq!(out.dim, 128);
        let out = doubling_rule(16, 100, 1e-6, |d| Ok(d as f64)).unwrap();
        assert!(!out.accepted);
        assert_eq!(out.dim, 100);
    }

    #[test]
    fn phase_alignment_removes_global_phase() {
        let a = Mat::from_fn(5, 5, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let phase = C64::from_polar(1.0, 0.7);
        let b = Mat::from_fn(5, 5, |i, j| a[(i, j)] * phase);
        assert!(interior_max_deviation(a.as_ref(), b.as_ref(), 5) > 1.0);
        assert!(phase_aligned_deviation(a.as_ref(), b.as_ref(), 5) < 1e-14);
    }
}

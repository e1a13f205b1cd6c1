use std::f64::consts::PI;

use faer::MatRef;

use super::operators::{FloquetMatrix, Quadrature};
use crate::model::SystemParams;
use crate::{Error, Result, C64};

/// Eigenvalues farther than this from the unit circle are treated as
/// truncation artifacts.
pub const UNIT_MODULUS_TOL: f64 = 1e-6;

/// Smallest basis for which a spectrum is computed.
pub const MIN_SPECTRUM_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasienergyRecord {
    /// Phase of the eigenvalue, in (−π, π].
    pub phi: f64,
    /// |⟨v|0⟩|² for the normalized eigenvector v.
    pub ground_overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Retained records, ascending in φ.
    pub records: Vec<QuasienergyRecord>,
    /// Eigenvalues dropped for ||λ| − 1| ≥ [`UNIT_MODULUS_TOL`].
    pub discarded: usize,
    /// Largest ||λ| − 1| among retained eigenvalues.
    pub max_modulus_deviation: f64,
}

pub fn quasienergy_spectrum(params: &SystemParams, dim: usize) -> Result<Spectrum> {
    if dim < MIN_SPECTRUM_DIM {
        return Err(Error::invalid(format!(
            "spectrum needs D ≥ {MIN_SPECTRUM_DIM}, got {dim}"
        )));
    }
    let f = FloquetMatrix::with_quadrature(params, &Quadrature::new(dim)?)?;
    spectrum_of(f.matrix())
}

fn wrap_phase(phi: f64) -> f64 {
    if phi <= -PI {
        phi + 2.0 * PI
    } else {
        phi
    }
}

/// Eigen-decomposition of a (nearly) unitary matrix into quasienergy records.
pub fn spectrum_of(matrix: MatRef<'_, C64>) -> Result<Spectrum> {
    let evd = matrix.eigen().map_err(|e| {
        let frob = matrix.norm_l2();
        Error::Eigen(format!(
            "{e:?}; D = {}, Frobenius norm {frob:.6e}",
            matrix.nrows()
        ))
    })?;
    let values = evd.S().column_vector();
    let vectors = evd.U();
    let mut records = Vec::with_capacity(values.nrows());
    let mut discarded = 0;
    let mut max_dev = 0.0_f64;
    for (k, lambda) in values.iter().enumerate() {
        let dev = (lambda.norm() - 1.0).abs();
        if dev >= UNIT_MODULUS_TOL {
            discarded += 1;
            continue;
        }
        max_dev = max_dev.max(dev);
        let col = vectors.col(k);
        let norm_sq: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        records.push(QuasienergyRecord {
            phi: wrap_phase(lambda.arg()),
            ground_overlap: col[0].norm_sqr() / norm_sq,
        });
    }
    records.sort_by(|a, b| {
        a.phi
            .total_cmp(&b.phi)
            .then(a.ground_overlap.total_cmp(&b.ground_overlap))
    });
    Ok(Spectrum {
        records,
        discarded,
        max_modulus_deviation: max_dev,
    })
}

/// Largest spacing between neighbouring quasienergies inside one band.
///
/// The q bands are the sectors of width 2π/q centred on the unkicked
/// quasienergies −(b + ½)τ, b = 0..q−1.
pub fn max_intra_band_gap(records: &[QuasienergyRecord], params: &SystemParams) -> f64 {
    let q = params.q() as usize;
    let width = 2.0 * PI / q as f64;
    let centres: Vec<f64> = (0..q).map(|b| -(b as f64 + 0.5) * params.tau()).collect();
    let mut bands: Vec<Vec<f64>> = vec![Vec::new(); q];
    for r in records {
        for (b, &c) in centres.iter().enumerate() {
            let offset = (r.phi - c + PI).rem_euclid(2.0 * PI) - PI;
            if offset.abs() <= width / 2.0 {
                bands[b].push(offset);
                break;
            }
        }
    }
    bands
        .iter_mut()
        .map(|band| {
            band.sort_by(f64::total_cmp);
            band.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

use std::f64::consts::PI;

use rayon::prelude::*;

use super::FockVector;
use crate::{Error, Result, C64};

/// Rectangular window in the complex α plane sampled on a regular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl QGridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), n_re: usize, n_im: usize) -> Result<Self> {
        let spec = Self {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            n_re,
            n_im,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// [−radius, radius]² with `n` points per axis.
    pub fn square(radius: f64, n: usize) -> Result<Self> {
        Self::new((-radius, radius), (-radius, radius), n, n)
    }

    fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ok(self.re_min, self.re_max) || !ok(self.im_min, self.im_max) {
            return Err(Error::invalid(
                "Q-grid window bounds must be finite with min < max",
            ));
        }
        if self.n_re < 2 || self.n_im < 2 {
            return Err(Error::invalid("Q-grid needs at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn re_step(&self) -> f64 {
        (self.re_max - self.re_min) / (self.n_re - 1) as f64
    }

    pub fn im_step(&self) -> f64 {
        (self.im_max - self.im_min) / (self.n_im - 1) as f64
    }

    pub fn point(&self, i_re: usize, j_im: usize) -> C64 {
        C64::new(
            self.re_min + i_re as f64 * self.re_step(),
            self.im_min + j_im as f64 * self.im_step(),
        )
    }
}

/// Sampled Husimi function; `values` is row-major with one row per Im α.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    pub spec: QGridSpec,
    pub values: Vec<f64>,
}

impl QGrid {
    pub fn value(&self, i_re: usize, j_im: usize) -> f64 {
        self.values[j_im * self.spec.n_re + i_re]
    }

    /// Σ Q ΔRe ΔIm over the grid.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.re_step() * self.spec.im_step()
    }

    /// Σ |α|² Q ΔRe ΔIm / Σ Q ΔRe ΔIm.
    pub fn second_moment(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.spec.n_im {
            for i in 0..self.spec.n_re {
                let q = self.value(i, j);
                num += q * self.spec.point(i, j).norm_sqr();
                den += q;
            }
        }
        num / den
    }
}

/// ⟨ψ|α⟩ with the coherent state expanded to the dimension of ψ.
fn overlap_with_coherent(amps: &[C64], alpha: C64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut ln_scale = -0.5 * alpha.norm_sqr();
    let mut sum = C64::new(0.0, 0.0);
    for (n, c) in amps.iter().enumerate() {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        sum += c.conj() * term;
        if term.norm() > 1e200 {
            term /= 1e200;
            sum /= 1e200;
            ln_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    sum * ln_scale.exp()
}

/// |⟨ψ|α⟩|²/π.
pub fn husimi_at(state: &FockVector, alpha: C64) -> f64 {
    overlap_with_coherent(state.amps(), alpha).norm_sqr() / PI
}

pub fn q_function(state: &FockVector, spec: &QGridSpec) -> Result<QGrid> {
    spec.validate()?;
    let values = (0..spec.n_im)
        .into_par_iter()
        .flat_map_iter(|j| (0..spec.n_re).map(move |i| husimi_at(state, spec.point(i, j))))
        .collect();
    Ok(QGrid {
        spec: *spec,
        values,
    })
}

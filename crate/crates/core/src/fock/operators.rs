//! Dense operators: kick, free evolution, Floquet powers and the rearranged
//! product forms of F^q.

use std::f64::consts::PI;

use faer::{Mat, MatRef, Side};

use super::{
    add_scaled, check_dim, identity, interior_extent, interior_max_deviation, mul, negate,
    phase_aligned_deviation, WORK_FACTOR,
};
use crate::model::{classify, ResonanceKind, SystemParams};
use crate::specfun::{displacement_matrix, KickWeights};
use crate::{Error, Result, C64};

/// Spectral decomposition of the quadrature a + a† in a basis of `dim` states.
///
/// The kick is diagonal in this basis, so one decomposition serves every
/// (η, ζ) at a fixed dimension.
#[derive(Debug, Clone)]
pub struct Quadrature {
    positions: Vec<f64>,
    vectors: Mat<f64>,
}

impl Quadrature {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let x = Mat::<f64>::from_fn(dim, dim, |i, j| {
            if i == j + 1 {
                (i as f64).sqrt()
            } else if j == i + 1 {
                (j as f64).sqrt()
            } else {
                0.0
            }
        });
        let evd = x
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("quadrature matrix at D = {dim}: {e:?}")))?;
        let positions = evd.S().column_vector().iter().copied().collect();
        Ok(Self {
            positions,
            vectors: evd.U().to_owned(),
        })
    }

    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    /// Eigenvalues of the truncated a + a†, ascending.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// exp(iζ cos[η(a + a†)]).
    pub fn kick(&self, eta: f64, zeta: f64) -> Mat<C64> {
        let d = self.dim();
        let phases: Vec<f64> = self
            .positions
            .iter()
            .map(|&x| zeta * (eta * x).cos())
            .collect();
        let v = self.vectors.as_ref();
        let scaled_cos = Mat::<f64>::from_fn(d, d, |i, j| v[(i, j)] * phases[j].cos());
        let scaled_sin = Mat::<f64>::from_fn(d, d, |i, j| v[(i, j)] * phases[j].sin());
        let re = real_mul_transpose(scaled_cos.as_ref(), v);
        let im = real_mul_transpose(scaled_sin.as_ref(), v);
        Mat::from_fn(d, d, |i, j| C64::new(re[(i, j)], im[(i, j)]))
    }
}

fn real_mul_transpose(a: MatRef<'_, f64>, v: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(a.nrows(), v.nrows());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        faer::Accum::Replace,
        a,
        v.transpose(),
        1.0,
        faer::get_global_parallelism(),
    );
    out
}

pub fn build_kick(params: &SystemParams, dim: usize) -> Result<Mat<C64>> {
    Ok(Quadrature::new(dim)?.kick(params.eta(), params.zeta()))
}

/// Diagonal of the free evolution, e^{−i(n+½)τ}.
pub fn build_free(params: &SystemParams, dim: usize) -> Result<Vec<C64>> {
    if dim == 0 {
        return Err(Error::invalid("basis dimension must be positive"));
    }
    let tau = params.tau();
    Ok((0..dim)
        .map(|n| C64::from_polar(1.0, -(n as f64 + 0.5) * tau))
        .collect())
}

/// One kick followed by one period of free evolution.
#[derive(Debug, Clone)]
pub struct FloquetMatrix {
    params: SystemParams,
    matrix: Mat<C64>,
}

impl FloquetMatrix {
    /// Build from a precomputed quadrature decomposition.
    pub fn with_quadrature(params: &SystemParams, quad: &Quadrature) -> Result<Self> {
        let kick = quad.kick(params.eta(), params.zeta());
        let free = build_free(params, quad.dim())?;
        let matrix = Mat::from_fn(quad.dim(), quad.dim(), |i, j| free[i] * kick[(i, j)]);
        Ok(Self {
            params: *params,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    /// F^p by repeated squaring.
    pub fn power(&self, p: u32) -> Mat<C64> {
        let mut result: Option<Mat<C64>> = None;
        let mut base = self.matrix.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => mul(base.as_ref(), r.as_ref()),
                });
            }
            e >>= 1;
            if e > 0 {
                base = mul(base.as_ref(), base.as_ref());
            }
        }
        result.unwrap_or_else(|| identity(self.dim()))
    }

    /// ‖F†F − I‖_max on the leading D − D/10 block.
    pub fn unitarity_deviation(&self) -> f64 {
        let ff = mul(self.matrix.adjoint(), self.matrix.as_ref());
        interior_max_deviation(
            ff.as_ref(),
            identity(self.dim()).as_ref(),
            interior_extent(self.dim()),
        )
    }
}

pub fn floquet(params: &SystemParams, dim: usize) -> Result<FloquetMatrix> {
    FloquetMatrix::with_quadrature(params, &Quadrature::new(dim)?)
}

pub fn floquet_power(params: &SystemParams, dim: usize, p: u32) -> Result<Mat<C64>> {
    Ok(floquet(params, dim)?.power(p))
}

/// exp(iζ cos[η(a e^{−iθ} + a† e^{iθ})]), diagonalizing the complex
/// Hermitian quadrature directly.
pub fn rotated_kick(eta: f64, zeta: f64, theta: f64, dim: usize) -> Result<Mat<C64>> {
    check_dim(dim)?;
    let x = Mat::<C64>::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            C64::from_polar((i as f64).sqrt(), theta)
        } else if j == i + 1 {
            C64::from_polar((j as f64).sqrt(), -theta)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let evd = x
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("rotated quadrature at θ = {theta}: {e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let scaled = Mat::from_fn(dim, dim, |i, j| {
        u[(i, j)] * C64::from_polar(1.0, zeta * (eta * s[j].re).cos())
    });
    Ok(mul(scaled.as_ref(), u.adjoint()))
}

/// (−1)^{rv} K_{(q−1)τ} ⋯ K_τ K_0 with kick strength vζ, where K_θ is the
/// kick along the quadrature rotated by θ = jτ. For v = 1 this equals F^q.
pub fn q_axis_product(params: &SystemParams, dim: usize, v: u32) -> Result<Mat<C64>> {
    let zeta = params.zeta() * v as f64;
    let mut acc: Option<Mat<C64>> = None;
    for j in 0..params.q() {
        let k = rotated_kick(params.eta(), zeta, j as f64 * params.tau(), dim)?;
        acc = Some(match acc {
            None => k,
            Some(prev) => mul(k.as_ref(), prev.as_ref()),
        });
    }
    let mut out = acc.expect("q ≥ 1");
    if (params.r() as u64 * v as u64) % 2 == 1 {
        negate(&mut out);
    }
    Ok(out)
}

/// The q-axis product with κ → vκ, which reproduces F^{qv} when η² sits on
/// the principal resonance of q.
pub fn amplified_kick_operator(params: &SystemParams, dim: usize, v: u32) -> Result<Mat<C64>> {
    if v == 0 {
        return Err(Error::invalid("amplification factor v must be at least 1"));
    }
    let class = classify(params.eta_sq(), params.q());
    if class.kind != ResonanceKind::Resonant || class.a != Some(1) || class.b != Some(1) {
        return Err(Error::NotResonant {
            eta_sq: params.eta_sq(),
            q: params.q(),
        });
    }
    q_axis_product(params, dim, v)
}

/// Interior deviation, up to global phase, between F^{qv} and the amplified
/// kick operator, both built in the working basis.
pub fn amplified_equivalence_deviation(params: &SystemParams, dim: usize, v: u32) -> Result<f64> {
    let work = WORK_FACTOR * dim;
    let amplified = amplified_kick_operator(params, work, v)?;
    let power = floquet_power(params, work, params.q() * v)?;
    Ok(phase_aligned_deviation(
        power.as_ref(),
        amplified.as_ref(),
        interior_extent(dim),
    ))
}

/// (−1)^r Π_j Σ_k i^k J_k(ζ) D(ikη e^{i2πjr/q}), the displacement-sum form of
/// F^q. The k-sums converge quickly only for small |ζ|.
pub fn displacement_expansion_power(params: &SystemParams, dim: usize) -> Result<Mat<C64>> {
    check_dim(dim)?;
    let weights = KickWeights::new(params.zeta())?;
    let mut acc: Option<Mat<C64>> = None;
    for j in 0..params.q() {
        let axis = C64::from_polar(1.0, 2.0 * PI * (j * params.r()) as f64 / params.q() as f64);
        let mut sum = Mat::<C64>::zeros(dim, dim);
        for (k, w) in weights.iter() {
            let beta = C64::new(0.0, k as f64 * params.eta()) * axis;
            let d = displacement_matrix(beta, dim);
            add_scaled(&mut sum, w, d.as_ref());
        }
        acc = Some(match acc {
            None => sum,
            Some(prev) => mul(sum.as_ref(), prev.as_ref()),
        });
    }
    let mut out = acc.expect("q ≥ 1");
    if params.r() % 2 == 1 {
        negate(&mut out);
    }
    Ok(out)
}

/// max |[F^q, D(gen)]| on the interior block of nominal dimension `dim`.
pub fn symmetry_commutator_norm(params: &SystemParams, dim: usize, gen: C64) -> Result<f64> {
    if !matches!(params.q(), 3 | 4 | 6) {
        return Err(Error::NoCrystalSymmetry(params.q()));
    }
    let work = WORK_FACTOR * dim;
    let fq = floquet_power(params, work, params.q())?;
    let d = displacement_matrix(gen, work);
    let fd = mul(fq.as_ref(), d.as_ref());
    let df = mul(d.as_ref(), fq.as_ref());
    Ok(interior_max_deviation(
        fd.as_ref(),
        df.as_ref(),
        interior_extent(dim),
    ))
}

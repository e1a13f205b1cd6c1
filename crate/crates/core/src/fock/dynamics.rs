use faer::{ColMut, ColRef};

use super::operators::{floquet, FloquetMatrix};
use super::{FockVector, DEFAULT_LEAK_TOL};
use crate::model::SystemParams;
use crate::{Error, Result, C64};

/// Σ_n |c_n|² (n + ½), in units of ħω.
pub fn mean_energy(state: &FockVector) -> f64 {
    state
        .amps()
        .iter()
        .enumerate()
        .map(|(n, a)| a.norm_sqr() * (n as f64 + 0.5))
        .sum()
}

/// Applies a prebuilt Floquet matrix to states.
#[derive(Debug, Clone)]
pub struct Propagator {
    floquet: FloquetMatrix,
}

impl Propagator {
    pub fn new(params: &SystemParams, dim: usize) -> Result<Self> {
        Ok(Self {
            floquet: floquet(params, dim)?,
        })
    }

    pub fn from_floquet(floquet: FloquetMatrix) -> Self {
        Self { floquet }
    }

    pub fn dim(&self) -> usize {
        self.floquet.dim()
    }

    pub fn floquet(&self) -> &FloquetMatrix {
        &self.floquet
    }

    pub fn step(&self, state: &FockVector) -> Result<FockVector> {
        if state.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "state has {} amplitudes, propagator expects {}",
                state.dim(),
                self.dim()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        faer::linalg::matmul::matmul(
            ColMut::from_slice_mut(&mut out).as_mat_mut(),
            faer::Accum::Replace,
            self.floquet.matrix(),
            ColRef::from_slice(state.amps()).as_mat(),
            C64::new(1.0, 0.0),
            faer::Par::Seq,
        );
        FockVector::from_amps(out)
    }
}

/// Result of propagating a state through a number of kicks.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: FockVector,
    /// Mean energy after 0, 1, …, N kicks.
    pub energies: Vec<f64>,
    pub truncation_unsafe: bool,
    /// First kick at which the tail weight exceeded the leak tolerance.
    pub first_unsafe_kick: Option<usize>,
    pub max_tail_weight: f64,
}

pub fn evolve(state: &FockVector, params: &SystemParams, n_kicks: usize) -> Result<Evolution> {
    let prop = Propagator::new(params, state.dim())?;
    evolve_with(&prop, state, n_kicks, DEFAULT_LEAK_TOL)
}

pub fn evolve_with(
    prop: &Propagator,
    state: &FockVector,
    n_kicks: usize,
    leak_tol: f64,
) -> Result<Evolution> {
    let mut psi = state.clone();
    let mut energies = Vec::with_capacity(n_kicks + 1);
    energies.push(mean_energy(&psi));
    let mut max_tail = psi.tail_weight();
    let mut first_unsafe = (max_tail >= leak_tol).then_some(0);
    for n in 1..=n_kicks {
        psi = prop.step(&psi)?;
        energies.push(mean_energy(&psi));
        let tail = psi.tail_weight();
        max_tail = max_tail.max(tail);
        if first_unsafe.is_none() && tail >= leak_tol {
            first_unsafe = Some(n);
        }
    }
    Ok(Evolution {
        state: psi,
        energies,
        truncation_unsafe: first_unsafe.is_some(),
        first_unsafe_kick: first_unsafe,
        max_tail_weight: max_tail,
    })
}

/// Kicks needed from the ground state to reach an energy threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct KickCount {
    /// `None` when the target was not reached within `n_max` kicks.
    pub kicks: Option<usize>,
    /// Set when the tail weight exceeded the leak tolerance before the target
    /// was reached.
    pub truncation_unsafe: bool,
    pub trace: Vec<f64>,
}

pub fn kicks_to_energy(
    params: &SystemParams,
    dim: usize,
    e_target: f64,
    n_max: usize,
) -> Result<KickCount> {
    let prop = Propagator::new(params, dim)?;
    let mut out = kicks_to_energies(&prop, &[e_target], n_max, DEFAULT_LEAK_TOL)?;
    Ok(out.pop().expect("one target"))
}

/// One ground-state run shared by several thresholds. Propagation stops once
/// every target is reached or after `n_max` kicks; each returned trace ends at
/// the kick that reached its target.
pub fn kicks_to_energies(
    prop: &Propagator,
    targets: &[f64],
    n_max: usize,
    leak_tol: f64,
) -> Result<Vec<KickCount>> {
    let mut psi = FockVector::ground(prop.dim())?;
    let mut trace = vec![mean_energy(&psi)];
    let mut reached: Vec<Option<usize>> = targets
        .iter()
        .map(|&t| (trace[0] >= t).then_some(0))
        .collect();
    let mut first_unsafe: Option<usize> = None;
    let mut n = 0;
    while n < n_max && reached.iter().any(Option::is_none) {
        n += 1;
        psi = prop.step(&psi)?;
        let e = mean_energy(&psi);
        trace.push(e);
        if first_unsafe.is_none() && !psi.is_truncation_safe(leak_tol) {
            first_unsafe = Some(n);
        }
        for (slot, &t) in reached.iter_mut().zip(targets) {
            if slot.is_none() && e >= t {
                *slot = Some(n);
            }
        }
    }
    Ok(reached
        .into_iter()
        .map(|kicks| {
            let end = kicks.unwrap_or(n);
            KickCount {
                kicks,
                truncation_unsafe: first_unsafe.is_some_and(|u| u <= end),
                trace: trace[..=end].to_vec(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn energies_of_simple_states() {
        assert_eq!(mean_energy(&FockVector::ground(4).unwrap()), 0.5);
        assert_eq!(mean_energy(&FockVector::number(2, 4).unwrap()), 2.5);
        let c = FockVector::coherent(C64::new(0.6, 0.8), 64).unwrap();
        assert!((mean_energy(&c) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn zero_kicks_is_identity() {
        let p = SystemParams::new(1, 4, -0.8, PI).unwrap();
        let c = FockVector::coherent(C64::new(0.5, 0.1), 32).unwrap();
        let ev = evolve(&c, &p, 0).unwrap();
        assert_eq!(ev.state, c);
        assert_eq!(ev.energies.len(), 1);
    }

    #[test]
    fn ground_state_is_stationary_without_kick() {
        let p = SystemParams::new(1, 4, 0.0, PI).unwrap();
        let g = FockVector::ground(32).unwrap();
        let ev = evolve(&g, &p, 17).unwrap();
        assert!((ev.state.inner(&g).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn norm_is_preserved() {
        let p = SystemParams::new(1, 4, -0.8, PI).unwrap();
        let prop = Propagator::new(&p, 128).unwrap();
        let mut psi = FockVector::ground(128).unwrap();
        for _ in 0..20 {
            psi = prop.step(&psi).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn leaking_run_is_flagged() {
        let p = SystemParams::new(1, 4, -0.8, PI).unwrap();
        let ev = evolve(&FockVector::ground(32).unwrap(), &p, 40).unwrap();
        assert!(ev.truncation_unsafe);
        assert!(ev.first_unsafe_kick.unwrap() > 0);
    }

    #[test]
    fn ground_energy_target_needs_no_kicks() {
        let p = SystemParams::new(1, 4, -0.8, PI).unwrap();
        let r = kicks_to_energy(&p, 64, 0.5, 10).unwrap();
        assert_eq!(r.kicks, Some(0));
        assert_eq!(r.trace, vec![0.5]);
        let r = kicks_to_energy(&p, 64, 1e9, 5).unwrap();
        assert_eq!(r.kicks, None);
        assert_eq!(r.trace.len(), 6);
    }
}

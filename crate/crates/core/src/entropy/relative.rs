//! Relative entropy between a QHD state and the limit profile, and the
//! strong/weak convergence gaps.

use crate::acoustic::{apply_group, PsiNormalization};
use crate::entropy::functionals::{quantum_energy, renormalized_pressure};
use crate::error::{Error, Result};
use crate::resonance::OscillationProfile;
use crate::solvers::limit::SYNC_TOL;
use crate::solvers::state::{EulerState, QhdState};
use crate::spectral::calculus::{l2_norm, l2_norm_vector, project_p};
use crate::spectral::{TorusGrid, VectorField, Wavevector};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EntropyParts {
    pub velocity: f64,
    pub pressure: f64,
    pub quantum: f64,
}

impl EntropyParts {
    pub fn total(&self) -> f64 {
        self.velocity + self.pressure + self.quantum
    }

    /// `H` without the quantum term.
    pub fn without_quantum(&self) -> f64 {
        self.velocity + self.pressure
    }
}

fn check_sync(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > SYNC_TOL {
        return Err(Error::Desynchronized { a, b });
    }
    Ok(())
}

/// `H = ½∫{|Λ − v − L₂(t/ε)V⁰|² + |Ψ − L₁(t/ε)V⁰|² + |∇√ρ|²}`.
pub fn relative_entropy(
    state: &QhdState,
    e: &EulerState,
    v0: &OscillationProfile,
    eps: f64,
    gamma: f64,
    normalization: PsiNormalization,
) -> Result<EntropyParts> {
    check_sync(state.time, e.time)?;
    check_sync(state.time, v0.time)?;
    state.grid().check_same(e.v.grid())?;
    state.grid().check_same(v0.value.grid())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Mach number must be positive, got {eps}"
        )));
    }
    let osc = apply_group(&v0.value, state.time / eps);
    let dv = state.lambda.sub(&e.v)?.sub(osc.vel())?;
    let psi = renormalized_pressure(&state.rho, eps, gamma, normalization)?;
    let dp = psi.sub(osc.phi())?;
    Ok(EntropyParts {
        velocity: 0.5 * l2_norm_vector(&dv).powi(2),
        pressure: 0.5 * l2_norm(&dp).powi(2),
        quantum: quantum_energy(&state.sqrt_rho),
    })
}

/// A smooth test field probing one Fourier mode along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TestField {
    pub k: Wavevector,
    pub axis: usize,
    pub field: VectorField,
}

/// `e_d (cos k·x + sin k·x)` for every `0 < |k| ≤ kmax` up to sign and every axis.
pub fn default_test_fields(grid: &TorusGrid, kmax: i64) -> Vec<TestField> {
    let dim = grid.dim();
    let mut modes = Vec::new();
    let k1_range = if dim == 2 { -kmax..=kmax } else { 0..=0 };
    for k1 in k1_range {
        for k0 in -kmax..=kmax {
            let k = [k0, k1];
            let n2 = TorusGrid::norm_sq(k);
            if n2 == 0 || n2 > kmax * kmax {
                continue;
            }
            if (k1, k0) < (0, 0) {
                continue;
            }
            modes.push(k);
        }
    }
    modes.sort_by_key(|k| (TorusGrid::norm_sq(*k), k[1], k[0]));
    let mut out = Vec::new();
    for k in modes {
        for axis in 0..dim {
            let field = VectorField::from_fn(*grid, |x| {
                let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1];
                let mut w = [0.0; 2];
                w[axis] = ph.cos() + ph.sin();
                w
            });
            out.push(TestField { k, axis, field });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceMetrics {
    /// `⟨Λ − v, w⟩` for each test field (signed, at one instant).
    pub pairings: Vec<f64>,
    /// `‖PΛ − v‖_{L²}`.
    pub strong_gap: f64,
}

impl ConvergenceMetrics {
    pub fn weak_gaps(&self) -> Vec<f64> {
        self.pairings.iter().map(|p| p.abs()).collect()
    }
}

pub fn convergence_metrics(
    state: &QhdState,
    e: &EulerState,
    tests: &[TestField],
) -> Result<ConvergenceMetrics> {
    check_sync(state.time, e.time)?;
    let diff = state.lambda.sub(&e.v)?;
    let pairings = tests
        .iter()
        .map(|t| diff.inner(&t.field))
        .collect::<Result<Vec<_>>>()?;
    let strong_gap = l2_norm_vector(&project_p(&state.lambda).sub(&e.v)?);
    Ok(ConvergenceMetrics {
        pairings,
        strong_gap,
    })
}

//! Pointwise thermodynamic functionals and the monitored energy.

use crate::error::{Error, Result};
use crate::solvers::state::QhdState;
use crate::spectral::calculus::{gradient, l2_norm, l2_norm_vector};
use crate::spectral::ScalarField;

/// Below this `|ρ − 1|` the pressure potential is summed as a power series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Scaling applied to the renormalized pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsiNormalization {
    /// The formula as written: `Ψ ≈ δ/√2` near `ρ = 1`.
    #[default]
    Paper,
    /// Multiplied by `√2`, so that `Ψ = δ` exactly at `γ = 2`.
    Unit,
}

impl PsiNormalization {
    pub fn factor(self) -> f64 {
        match self {
            PsiNormalization::Paper => 1.0,
            PsiNormalization::Unit => std::f64::consts::SQRT_2,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(Self::Paper),
            "unit" => Some(Self::Unit),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PsiNormalization::Paper => "paper",
            PsiNormalization::Unit => "unit",
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must exceed 1, got {gamma}"
        )));
    }
    Ok(())
}

/// `Σ_{j≥2} a_j x^{j-2}` with `a_j = Π_{i=2}^{j-1}(γ-i) / j!`.
fn reduced_series(x: f64, gamma: f64) -> f64 {
    let mut term = 0.5;
    let mut sum = term;
    let mut pow = 1.0;
    for j in 3..=10 {
        term *= (gamma - (j - 1) as f64) / j as f64;
        pow *= x;
        sum += term * pow;
    }
    sum
}

/// `Π(ρ) = (ρ^γ − 1 − γ(ρ−1)) / (γ(γ−1))` by power series in `x = ρ − 1`.
pub fn pressure_potential_series(x: f64, gamma: f64) -> f64 {
    x * x * reduced_series(x, gamma)
}

pub fn pressure_potential_exact(x: f64, gamma: f64) -> f64 {
    ((gamma * x.ln_1p()).exp_m1() - gamma * x) / (gamma * (gamma - 1.0))
}

/// `Π(ρ)`, switching to the series for `|ρ − 1| < SERIES_THRESHOLD`.
pub fn pressure_potential(rho: f64, gamma: f64) -> f64 {
    let x = rho - 1.0;
    if x.abs() < SERIES_THRESHOLD {
        pressure_potential_series(x, gamma)
    } else {
        pressure_potential_exact(x, gamma)
    }
}

pub fn psi_series(rho: f64, eps: f64, gamma: f64) -> f64 {
    let x = rho - 1.0;
    x * reduced_series(x, gamma).sqrt() / eps
}

pub fn psi_exact(rho: f64, eps: f64, gamma: f64) -> f64 {
    let x = rho - 1.0;
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * pressure_potential_exact(x, gamma).max(0.0).sqrt() / eps
}

/// Signed renormalized pressure at one density value.
pub fn psi_value(rho: f64, eps: f64, gamma: f64) -> f64 {
    if (rho - 1.0).abs() < SERIES_THRESHOLD {
        psi_series(rho, eps, gamma)
    } else {
        psi_exact(rho, eps, gamma)
    }
}

fn check_density(rho: &ScalarField) -> Result<()> {
    let min = rho.min();
    if !(min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "density must be positive, min = {min:e}"
        )));
    }
    Ok(())
}

/// Signed `Ψ = sign(ρ−1) √(Π(ρ)/ε²)`, times the normalization factor.
pub fn renormalized_pressure(
    rho: &ScalarField,
    eps: f64,
    gamma: f64,
    normalization: PsiNormalization,
) -> Result<ScalarField> {
    check_gamma(gamma)?;
    check_density(rho)?;
    let c = normalization.factor();
    Ok(rho.map(|r| c * psi_value(r, eps, gamma)))
}

/// `δ = (ρ − 1)/ε`.
pub fn density_fluctuation(rho: &ScalarField, eps: f64) -> Result<ScalarField> {
    check_density(rho)?;
    Ok(rho.map(|r| (r - 1.0) / eps))
}

/// `Π(ρ)/ε²` pointwise, the square of the unnormalized `Ψ`.
pub fn psi_squared(rho: &ScalarField, eps: f64, gamma: f64) -> ScalarField {
    rho.map(|r| pressure_potential(r, gamma) / (eps * eps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub pressure: f64,
    pub quantum: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.pressure + self.quantum
    }
}

/// `E = ½∫(|Λ|² + Ψ² + |∇√ρ|²)` with the unnormalized `Ψ`.
pub fn energy(state: &QhdState, eps: f64, gamma: f64) -> Result<EnergyParts> {
    check_gamma(gamma)?;
    let psi2 = psi_squared(&state.rho, eps, gamma);
    let kinetic = 0.5 * l2_norm_vector(&state.lambda).powi(2);
    let pressure = 0.5 * psi2.values().iter().sum::<f64>() * psi2.grid().cell_volume();
    let quantum = 0.5 * l2_norm_vector(&gradient(&state.sqrt_rho)).powi(2);
    Ok(EnergyParts {
        kinetic,
        pressure,
        quantum,
    })
}

/// `½∫|∇√ρ|²`.
pub fn quantum_energy(sqrt_rho: &ScalarField) -> f64 {
    0.5 * l2_norm_vector(&gradient(sqrt_rho)).powi(2)
}

/// `½‖f‖²` helper used by several diagnostics.
pub fn half_sq(f: &ScalarField) -> f64 {
    0.5 * l2_norm(f).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{TorusGrid, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn unit_density_has_no_pressure() {
        let g = TorusGrid::new(1, 8).unwrap();
        let rho = ScalarField::constant(g, 1.0);
        let psi = renormalized_pressure(&rho, 0.1, 2.0, PsiNormalization::Paper).unwrap();
        assert_eq!(psi.max_abs(), 0.0);
        assert_eq!(density_fluctuation(&rho, 0.1).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn quadratic_case_closed_form() {
        let eps = 0.1;
        let g = TorusGrid::new(1, 8).unwrap();
        let rho = ScalarField::constant(g, 1.0 + eps * 2f64.sqrt());
        let psi = renormalized_pressure(&rho, eps, 2.0, PsiNormalization::Paper).unwrap();
        assert!(psi.map(|p| p - 1.0).max_abs() < 1e-13);
        let below = ScalarField::constant(g, 1.0 - eps * 2f64.sqrt());
        let psi = renormalized_pressure(&below, eps, 2.0, PsiNormalization::Paper).unwrap();
        assert!(psi.map(|p| p + 1.0).max_abs() < 1e-13);
    }

    #[test]
    fn unit_normalization_matches_fluctuation_at_gamma_two() {
        let g = TorusGrid::new(1, 32).unwrap();
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.05 * x[0].sin());
        let psi = renormalized_pressure(&rho, 0.05, 2.0, PsiNormalization::Unit).unwrap();
        let delta = density_fluctuation(&rho, 0.05).unwrap();
        assert!(psi.sub(&delta).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn cubic_rational_value() {
        // (1.01^3 - 1 - 0.03) / (0.01 * 6) = 0.000301 / 0.06
        let want = (301.0f64 / 60000.0).sqrt();
        let got = psi_value(1.01, 0.1, 3.0);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn branches_agree_in_crossover() {
        for gamma in [1.4, 2.0, 3.0, 5.0 / 3.0] {
            for i in 0..=40 {
                let x = 0.5e-4 + 1.5e-4 * i as f64 / 40.0;
                for rho in [1.0 + x, 1.0 - x] {
                    let a = psi_series(rho, 1.0, gamma);
                    let b = psi_exact(rho, 1.0, gamma);
                    assert!(
                        (a - b).abs() <= 1e-10 * a.abs().max(1e-300),
                        "{gamma} {rho}: {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = TorusGrid::new(1, 8).unwrap();
        let rho = ScalarField::constant(g, 1.0);
        assert!(renormalized_pressure(&rho, 0.1, 1.0, PsiNormalization::Paper).is_err());
        let neg = ScalarField::constant(g, -0.1);
        assert!(renormalized_pressure(&neg, 0.1, 2.0, PsiNormalization::Paper).is_err());
        assert!(density_fluctuation(&ScalarField::constant(g, 0.0), 0.1).is_err());
    }

    #[test]
    fn energy_single_mode() {
        let g = TorusGrid::new(2, 16).unwrap();
        let sqrt_rho = ScalarField::constant(g, 1.0);
        let lambda = VectorField::from_fn(g, |x| [x[0].cos(), 0.0]);
        let st = QhdState::from_sqrt_rho_lambda(sqrt_rho, lambda, 0.0).unwrap();
        let e = energy(&st, 0.1, 2.0).unwrap();
        assert!((e.total() - PI * PI).abs() < 1e-12);
        assert_eq!(e.pressure, 0.0);
        assert!(e.quantum.abs() < 1e-25);
    }
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::calculus::{divergence, gradient_spectra, l2_norm, sobolev_norm_vector};
use crate::spectral::{ComplexField, ScalarField, TorusGrid, VectorField};

pub const DEFAULT_VACUUM_FLOOR: f64 = 1e-8;

/// Physical parameters of one QHD run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QhdParams {
    /// Mach number ε.
    pub eps: f64,
    /// Adiabatic exponent γ of `p(ρ) = ρ^γ/γ`.
    pub gamma: f64,
    pub vacuum_floor: f64,
}

impl QhdParams {
    pub fn new(eps: f64, gamma: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Mach number must be positive, got {eps}"
            )));
        }
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        Ok(Self {
            eps,
            gamma,
            vacuum_floor: DEFAULT_VACUUM_FLOOR,
        })
    }

    pub fn with_vacuum_floor(mut self, floor: f64) -> Self {
        self.vacuum_floor = floor;
        self
    }
}

/// Wave function ψ with `ρ = |ψ|²` and `J = 2 Im(ψ̄ ∇ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub psi: ComplexField,
    pub params: QhdParams,
    pub time: f64,
}

impl WaveFunction {
    pub fn new(psi: ComplexField, params: QhdParams) -> Self {
        Self {
            psi,
            params,
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.psi.grid()
    }

    pub fn mass(&self) -> f64 {
        self.psi.mass()
    }
}

/// Hydrodynamic fields of a wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct QhdState {
    pub rho: ScalarField,
    pub j: VectorField,
    pub sqrt_rho: ScalarField,
    /// `Λ = J / √ρ`, with `√ρ` clamped below by the vacuum floor.
    pub lambda: VectorField,
    pub time: f64,
    pub vacuum_floor: f64,
    /// Nodes where `√ρ` fell below the vacuum floor.
    pub vacuum_mask: Vec<bool>,
}

impl QhdState {
    pub fn grid(&self) -> &TorusGrid {
        self.rho.grid()
    }

    pub fn vacuum_cells(&self) -> usize {
        self.vacuum_mask.iter().filter(|&&v| v).count()
    }

    pub fn check_vacuum(&self) -> Result<()> {
        let min = self.sqrt_rho.min();
        if min < self.vacuum_floor {
            return Err(Error::Vacuum {
                min,
                floor: self.vacuum_floor,
            });
        }
        Ok(())
    }

    /// Builds a state from `√ρ` and `Λ`, setting `ρ = (√ρ)²` and `J = √ρ Λ`.
    pub fn from_sqrt_rho_lambda(
        sqrt_rho: ScalarField,
        lambda: VectorField,
        time: f64,
    ) -> Result<Self> {
        let rho = sqrt_rho.map(|s| s * s);
        let j = lambda.mul_scalar(&sqrt_rho)?;
        let vacuum_floor = DEFAULT_VACUUM_FLOOR;
        let vacuum_mask = sqrt_rho
            .values()
            .iter()
            .map(|&s| s < vacuum_floor)
            .collect();
        Ok(Self {
            rho,
            j,
            sqrt_rho,
            lambda,
            time,
            vacuum_floor,
            vacuum_mask,
        })
    }
}

/// Polar factorization of ψ into `(ρ, J, √ρ, Λ)`.
pub fn madelung(w: &WaveFunction) -> QhdState {
    let grid = *w.grid();
    let floor = w.params.vacuum_floor;
    let psi = w.psi.values();
    let spec = w.psi.transform();
    let dpsi: Vec<ComplexField> = gradient_spectra(&spec)
        .iter()
        .map(|s| s.to_complex())
        .collect();

    let rho =
        ScalarField::new(grid, psi.iter().map(|c| c.norm_sqr()).collect()).expect("grid length");
    let sqrt_rho =
        ScalarField::new(grid, psi.iter().map(|c| c.norm()).collect()).expect("grid length");
    let comps: Vec<Vec<f64>> = dpsi
        .iter()
        .map(|d| {
            psi.iter()
                .zip(d.values())
                .map(|(p, dp): (&Complex64, &Complex64)| 2.0 * (p.conj() * dp).im)
                .collect()
        })
        .collect();
    let j = VectorField::new(grid, comps).expect("grid length");
    let vacuum_mask: Vec<bool> = sqrt_rho.values().iter().map(|&s| s < floor).collect();
    let inv: Vec<f64> = sqrt_rho
        .values()
        .iter()
        .map(|&s| 1.0 / s.max(floor))
        .collect();
    let inv = ScalarField::new(grid, inv).expect("grid length");
    let lambda = j.mul_scalar(&inv).expect("same grid");
    QhdState {
        rho,
        j,
        sqrt_rho,
        lambda,
        time: w.time,
        vacuum_floor: floor,
        vacuum_mask,
    }
}

/// Divergence-free velocity and mean-zero pressure of the incompressible limit.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub v: VectorField,
    pub pi: ScalarField,
    pub time: f64,
}

impl EulerState {
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.v.inner(&self.v).expect("same grid")
    }

    /// `||div v||_{L²} / ||v||_{H¹}` (zero for a vanishing field).
    pub fn relative_divergence(&self) -> f64 {
        let h1 = sobolev_norm_vector(&self.v, 1.0);
        if h1 == 0.0 {
            return 0.0;
        }
        l2_norm(&divergence(&self.v)) / h1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(k: f64, n: usize) -> WaveFunction {
        let g = TorusGrid::new(1, n).unwrap();
        let psi = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, k * x[0]));
        WaveFunction::new(psi, QhdParams::new(0.5, 2.0).unwrap())
    }

    #[test]
    fn plane_wave_current() {
        for k in [1.0, 3.0, -2.0] {
            let s = madelung(&plane(k, 32));
            assert!(s.rho.map(|r| r - 1.0).max_abs() < 1e-13);
            assert!(s.j.component_field(0).map(|j| j - 2.0 * k).max_abs() < 1e-12);
            assert!(s.lambda.component_field(0).map(|l| l - 2.0 * k).max_abs() < 1e-12);
        }
    }

    #[test]
    fn real_wave_function_carries_no_current() {
        let g = TorusGrid::new(2, 16).unwrap();
        let psi = ComplexField::from_fn(g, |x| {
            Complex64::new(1.0 + 0.2 * x[0].cos() * x[1].sin(), 0.0)
        });
        let s = madelung(&WaveFunction::new(psi, QhdParams::new(0.1, 2.0).unwrap()));
        assert!(s.j.max_abs() < 1e-14);
    }

    #[test]
    fn state_invariants() {
        let g = TorusGrid::new(1, 64).unwrap();
        let psi = ComplexField::from_fn(g, |x| {
            Complex64::from_polar(1.0 + 0.3 * x[0].sin(), 0.5 * (2.0 * x[0]).cos())
        });
        let s = madelung(&WaveFunction::new(psi, QhdParams::new(0.1, 2.0).unwrap()));
        let rho2 = s.sqrt_rho.mul(&s.sqrt_rho).unwrap();
        assert!(rho2.sub(&s.rho).unwrap().max_abs() < 1e-12);
        let j2 = s.lambda.mul_scalar(&s.sqrt_rho).unwrap();
        assert!(j2.sub(&s.j).unwrap().max_abs() < 1e-12);
        assert_eq!(s.vacuum_cells(), 0);
    }

    #[test]
    fn vacuum_cells_are_masked() {
        let g = TorusGrid::new(1, 16).unwrap();
        let psi = ComplexField::from_fn(g, |x| Complex64::new(x[0].sin(), 0.0));
        let s = madelung(&WaveFunction::new(psi, QhdParams::new(0.1, 2.0).unwrap()));
        assert!(s.vacuum_cells() >= 1);
        assert!(s.lambda.is_finite());
        assert!(s.check_vacuum().is_err());
    }
}

//! Strang split-step integration of the scaled QHD system in wave-function form:
//! `i∂ₜψ = −Δψ + (|ψ|^{2(γ−1)} − 1)/(2(γ−1)ε²) ψ`.

use num_complex::Complex64;

use super::state::{madelung, QhdParams, QhdState, WaveFunction};
use crate::entropy::functionals::pressure_potential;
use crate::error::{Error, Result};
use crate::spectral::calculus::{
    dealias_spectrum, div_tensor_spectra, divergence, gradient, gradient_spectra, l2_norm,
    l2_norm_vector, laplacian_spectrum,
};
use crate::spectral::{ScalarField, Spectrum, TorusGrid, VectorField};

/// Largest step accepted by [`nls_step`]: the kinetic phase of the highest
/// retained mode may turn by at most `2π`.
pub fn nls_max_dt(grid: &TorusGrid) -> f64 {
    let kb = grid.band_limit() as f64;
    let kmax2 = kb * kb * grid.dim() as f64;
    2.0 * std::f64::consts::PI / kmax2
}

/// `min(½Δx², ½ε²(γ−1))`.
pub fn nls_default_dt(grid: &TorusGrid, params: &QhdParams) -> f64 {
    let dx = grid.dx();
    (0.5 * dx * dx).min(0.5 * params.eps * params.eps * (params.gamma - 1.0))
}

fn potential(rho: f64, p: &QhdParams) -> f64 {
    (rho.powf(p.gamma - 1.0) - 1.0) / (2.0 * (p.gamma - 1.0) * p.eps * p.eps)
}

fn potential_phase(psi: &mut [Complex64], p: &QhdParams, h: f64) {
    for c in psi.iter_mut() {
        let v = potential(c.norm_sqr(), p);
        *c *= Complex64::from_polar(1.0, -v * h);
    }
}

/// One Strang step: half potential phase, exact kinetic flow, half potential
/// phase, then dealiasing.
pub fn nls_step(w: &WaveFunction, dt: f64) -> Result<WaveFunction> {
    let grid = *w.grid();
    let bound = nls_max_dt(&grid);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let p = w.params;
    let mut out = w.clone();
    potential_phase(out.psi.values_mut(), &p, 0.5 * dt);
    let spec = out.psi.transform().apply_multiplier(|k| {
        if grid.in_band(k) {
            Complex64::from_polar(1.0, -(TorusGrid::norm_sq(k) as f64) * dt)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    out.psi = spec.to_complex();
    potential_phase(out.psi.values_mut(), &p, 0.5 * dt);
    out.psi = dealias_spectrum(&out.psi.transform()).to_complex();
    if !out.psi.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite wave function at t = {}",
            w.time + dt
        )));
    }
    out.time = w.time + dt;
    Ok(out)
}

/// Advances by `steps` steps of size `dt`.
pub fn nls_advance(w: &WaveFunction, dt: f64, steps: usize) -> Result<WaveFunction> {
    let mut cur = w.clone();
    for _ in 0..steps {
        cur = nls_step(&cur, dt)?;
    }
    Ok(cur)
}

/// `∫ |∇ψ|² + Π(|ψ|²)/(2ε²)`, conserved by the exact flow.
pub fn hamiltonian(w: &WaveFunction) -> f64 {
    let grid = *w.grid();
    let spec = w.psi.transform();
    let grad: f64 = (0..grid.len())
        .map(|i| {
            let k = grid.wavevector(i);
            if grid.is_nyquist(k) {
                0.0
            } else {
                TorusGrid::norm_sq(k) as f64 * spec.coeffs()[i].norm_sqr()
            }
        })
        .sum::<f64>()
        * grid.volume();
    let p = w.params;
    let pot: f64 = w
        .psi
        .values()
        .iter()
        .map(|c| pressure_potential(c.norm_sqr(), p.gamma))
        .sum::<f64>()
        * grid.cell_volume()
        / (2.0 * p.eps * p.eps);
    grad + pot
}

/// Right sides of the hydrodynamic system at one state: `−div J` and
/// `−div(Λ⊗Λ) − ε⁻²∇(ρ^γ/γ) + ∇Δρ − 4 div(∇√ρ⊗∇√ρ)`.
pub fn hydro_rhs(state: &QhdState, eps: f64, gamma: f64) -> Result<(ScalarField, VectorField)> {
    let grid = *state.rho.grid();
    let mass = divergence(&state.j).scale(-1.0);
    let convect = div_tensor_spectra(&state.lambda, &state.lambda)?;
    let gs = gradient(&state.sqrt_rho);
    let bohm = div_tensor_spectra(&gs, &gs)?;
    let rho_spec = state.rho.transform();
    let grad_lap = gradient_spectra(&laplacian_spectrum(&rho_spec));
    let pres = gradient_spectra(&state.rho.map(|r| r.powf(gamma) / gamma).transform());
    let mut comps: Vec<Spectrum> = Vec::with_capacity(grid.dim());
    for d in 0..grid.dim() {
        let coeffs = (0..grid.len())
            .map(|i| {
                -convect[d].coeffs()[i] - pres[d].coeffs()[i] / (eps * eps)
                    + grad_lap[d].coeffs()[i]
                    - 4.0 * bohm[d].coeffs()[i]
            })
            .collect();
        comps.push(Spectrum::new(grid, coeffs, true)?);
    }
    Ok((mass, VectorField::from_spectra(&comps)?))
}

/// L² residuals of the mass and momentum equations at `mid`, with central
/// differences over the neighbouring states spaced by `dt`.
pub fn ms_residuals(
    prev: &QhdState,
    mid: &QhdState,
    next: &QhdState,
    dt: f64,
    eps: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    let (fm, fj) = hydro_rhs(mid, eps, gamma)?;
    let drho = next.rho.sub(&prev.rho)?.scale(0.5 / dt);
    let dj = next.j.sub(&prev.j)?.scale(0.5 / dt);
    Ok((l2_norm(&drho.sub(&fm)?), l2_norm_vector(&dj.sub(&fj)?)))
}

/// Hydrodynamic states along `steps` NLS steps, including the start.
pub fn trajectory(w: &WaveFunction, dt: f64, steps: usize) -> Result<Vec<QhdState>> {
    let mut cur = w.clone();
    let mut out = vec![madelung(&cur)];
    for _ in 0..steps {
        cur = nls_step(&cur, dt)?;
        out.push(madelung(&cur));
    }
    Ok(out)
}

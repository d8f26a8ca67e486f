//! Pseudo-spectral incompressible Euler: `∂ₜv + P div(v⊗v) = 0`.

use super::state::EulerState;
use crate::error::{Error, Result};
use crate::spectral::calculus::div_tensor_spectra;
use crate::spectral::calculus::{
    dealias_spectrum, dealias_vector, divergence_spectrum, inverse_laplacian_spectrum,
    leray_spectra,
};
use crate::spectral::{ScalarField, Spectrum, VectorField};

pub const DEFAULT_CFL: f64 = 0.5;

/// `−P div(v⊗v)`, dealiased.
pub fn euler_rhs(v: &VectorField) -> Result<VectorField> {
    let f = div_tensor_spectra(v, v)?;
    let (p, _) = leray_spectra(&f);
    let out: Vec<Spectrum> = p
        .iter()
        .map(|s| dealias_spectrum(s).apply_multiplier(|_| (-1.0).into()))
        .collect();
    VectorField::from_spectra(&out)
}

/// Mean-zero pressure with `∇π = −Q div(v⊗v)`, i.e. `π = −Δ⁻¹ div div(v⊗v)`.
pub fn euler_pressure(v: &VectorField) -> Result<ScalarField> {
    let f = div_tensor_spectra(v, v)?;
    let dd = divergence_spectrum(&f);
    dealias_spectrum(&inverse_laplacian_spectrum(&dd))
        .apply_multiplier(|_| (-1.0).into())
        .to_real()
}

/// `c·Δx / ‖v‖∞` (infinite for a vanishing field).
pub fn euler_cfl_dt(v: &VectorField, cfl: f64) -> f64 {
    let vmax = v.max_abs();
    if vmax == 0.0 {
        f64::INFINITY
    } else {
        cfl * v.grid().dx() / vmax
    }
}

/// A solenoidal initial state with its pressure.
pub fn euler_state(v: VectorField, time: f64) -> Result<EulerState> {
    let (p, _) = leray_spectra(&v.transform());
    let v = dealias_vector(&VectorField::from_spectra(&p)?);
    let pi = euler_pressure(&v)?;
    Ok(EulerState { v, pi, time })
}

/// Classical RK4 step. Fails when `dt` exceeds the CFL bound with [`DEFAULT_CFL`].
pub fn euler_step(e: &EulerState, dt: f64) -> Result<EulerState> {
    let bound = euler_cfl_dt(&e.v, DEFAULT_CFL);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let v = &e.v;
    let k1 = euler_rhs(v)?;
    let k2 = euler_rhs(&v.add(&k1.scale(0.5 * dt))?)?;
    let k3 = euler_rhs(&v.add(&k2.scale(0.5 * dt))?)?;
    let k4 = euler_rhs(&v.add(&k3.scale(dt))?)?;
    let incr = k1
        .add(&k2.scale(2.0))?
        .add(&k3.scale(2.0))?
        .add(&k4)?
        .scale(dt / 6.0);
    let next = v.add(&incr)?;
    if !next.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite velocity at t = {}",
            e.time + dt
        )));
    }
    let pi = euler_pressure(&next)?;
    Ok(EulerState {
        v: next,
        pi,
        time: e.time + dt,
    })
}

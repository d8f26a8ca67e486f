//! RK4 integration of the oscillation profile `∂ₜV⁰ + B₁(v,V⁰) + B₂(V⁰,V⁰) = 0`,
//! with `v` advanced alongside by the Euler right side.

use super::euler::euler_rhs;
use super::state::EulerState;
use crate::acoustic::AcousticModes;
use crate::error::{Error, Result};
use crate::resonance::{OscillationProfile, ResonantForms};
use crate::spectral::{Spectrum, VectorField};

/// Tolerance on `|t_V − t_v|` for synchronized states.
pub const SYNC_TOL: f64 = 1e-12;

/// Stage-wise stability margin of classical RK4 on the imaginary axis.
const RK4_IMAG_LIMIT: f64 = 2.8;

fn rhs(forms: &ResonantForms, vhat: &[Spectrum], x: &AcousticModes) -> AcousticModes {
    let mut out = AcousticModes::zeros(*forms.grid());
    out.axpy(-1.0, &forms.b1_modes(vhat, x));
    out.axpy(-1.0, &forms.b2_modes(x, x));
    out
}

/// Crude bound on the spectral radius of the linearized right side.
pub fn limit_max_dt(forms: &ResonantForms, v: &VectorField, x: &AcousticModes) -> f64 {
    let grid = forms.grid();
    let kmax = grid.band_limit() as f64 * (grid.dim() as f64).sqrt();
    let amp: f64 = x.plus.iter().chain(&x.minus).map(|c| c.norm()).sum();
    let rate = kmax * (2.0 * v.max_abs() + 2.0 * (1.0 + forms.pressure_coef()) * amp);
    if rate == 0.0 {
        f64::INFINITY
    } else {
        RK4_IMAG_LIMIT / rate
    }
}

/// Eigenbasis coefficients of a profile, restricted to the retained band.
pub fn profile_modes(v: &OscillationProfile) -> AcousticModes {
    let mut m = AcousticModes::from_pair(&v.value).without_solenoidal();
    m.truncate();
    m
}

/// One RK4 step of the joint `(v, V⁰)` system; returns the new profile.
pub fn limit_step(
    v0: &OscillationProfile,
    e: &EulerState,
    dt: f64,
    forms: &ResonantForms,
) -> Result<OscillationProfile> {
    if (v0.time - e.time).abs() > SYNC_TOL {
        return Err(Error::Desynchronized {
            a: v0.time,
            b: e.time,
        });
    }
    forms.grid().check_same(e.v.grid())?;
    let x = profile_modes(v0);
    let bound = limit_max_dt(forms, &e.v, &x);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let x = limit_step_modes(&x, &e.v, dt, forms)?;
    let value = x.to_pair();
    if !value.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite oscillation profile at t = {}",
            v0.time + dt
        )));
    }
    Ok(OscillationProfile {
        value,
        time: v0.time + dt,
    })
}

/// RK4 on coefficients; `v` is the slow velocity at the start of the step.
pub fn limit_step_modes(
    x: &AcousticModes,
    v: &VectorField,
    dt: f64,
    forms: &ResonantForms,
) -> Result<AcousticModes> {
    let a1 = euler_rhs(v)?;
    let v2 = v.add(&a1.scale(0.5 * dt))?;
    let a2 = euler_rhs(&v2)?;
    let v3 = v.add(&a2.scale(0.5 * dt))?;
    let a3 = euler_rhs(&v3)?;
    let v4 = v.add(&a3.scale(dt))?;

    let k1 = rhs(forms, &v.transform(), x);
    let mut s = x.clone();
    s.axpy(0.5 * dt, &k1);
    let k2 = rhs(forms, &v2.transform(), &s);
    let mut s = x.clone();
    s.axpy(0.5 * dt, &k2);
    let k3 = rhs(forms, &v3.transform(), &s);
    let mut s = x.clone();
    s.axpy(dt, &k3);
    let k4 = rhs(forms, &v4.transform(), &s);

    let mut out = x.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

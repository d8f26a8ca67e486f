//! The acoustic group, filtered variables and the fast-wave source term.
//!
//! Per Fourier mode `k ≠ 0` a pair `(φ, v)` is stored in the eigenbasis of
//! the group: `c± = (φ̂ ± k̂·v̂)/2` evolve as `e^{∓i|k|τ}`, while the
//! solenoidal part of `v̂` is left alone. The velocity mean is carried by the
//! solenoidal slot at `k = 0`.

use num_complex::Complex64;

pub use crate::entropy::functionals::PsiNormalization;
use crate::entropy::functionals::{density_fluctuation, psi_squared, renormalized_pressure};
use crate::error::{Error, Result};
use crate::solvers::state::QhdState;
use crate::spectral::calculus::{
    div_tensor_spectra, divergence, gradient, gradient_spectra, l2_norm, l2_norm_vector,
    laplacian_spectrum, lebesgue_norm, leray_spectra, project_q, sobolev_norm, sobolev_norm_vector,
};
use crate::spectral::{ScalarField, Spectrum, TorusGrid, VectorField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance on the mean of the scalar slot.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// A mean-zero scalar together with a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticPair {
    phi: ScalarField,
    vel: VectorField,
}

fn check_mean_zero(phi: &ScalarField) -> Result<()> {
    let mean = phi.mean();
    let max = phi.max_abs();
    if mean.abs() > MEAN_ZERO_TOL * max {
        return Err(Error::NotMeanZero { mean, max });
    }
    Ok(())
}

impl AcousticPair {
    pub fn new(phi: ScalarField, vel: VectorField) -> Result<Self> {
        phi.grid().check_same(vel.grid())?;
        check_mean_zero(&phi)?;
        Ok(Self { phi, vel })
    }

    /// Removes the mean of `phi` first and returns it alongside the pair.
    pub fn with_mean_removed(phi: ScalarField, vel: VectorField) -> Result<(Self, f64)> {
        phi.grid().check_same(vel.grid())?;
        let (phi, mean) = phi.split_mean();
        Ok((Self { phi, vel }, mean))
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            phi: ScalarField::zeros(grid),
            vel: VectorField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.phi.grid()
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn vel(&self) -> &VectorField {
        &self.vel
    }

    pub fn into_parts(self) -> (ScalarField, VectorField) {
        (self.phi, self.vel)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            phi: self.phi.add(&other.phi)?,
            vel: self.vel.add(&other.vel)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            phi: self.phi.sub(&other.phi)?,
            vel: self.vel.sub(&other.vel)?,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            phi: self.phi.scale(s),
            vel: self.vel.scale(s),
        }
    }

    /// `∫ (φ φ' + v·v')`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.phi.inner(&other.phi)? + self.vel.inner(&other.vel)?)
    }

    pub fn l2_norm(&self) -> f64 {
        (l2_norm(&self.phi).powi(2) + l2_norm_vector(&self.vel).powi(2)).sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        (sobolev_norm(&self.phi, s).powi(2) + sobolev_norm_vector(&self.vel, s).powi(2)).sqrt()
    }

    /// `L^p` norm of the pointwise magnitude `√(φ² + |v|²)`.
    pub fn lebesgue_norm(&self, p: f64) -> Result<f64> {
        let mag = self
            .vel
            .magnitude()
            .zip_with(&self.phi, |m, f| (m * m + f * f).sqrt())?;
        lebesgue_norm(&mag, p)
    }

    pub fn max_abs(&self) -> f64 {
        self.phi.max_abs().max(self.vel.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.vel.is_finite()
    }

    /// The pair with its velocity replaced by the gradient part.
    pub fn gradient_part(&self) -> Self {
        Self {
            phi: self.phi.clone(),
            vel: project_q(&self.vel),
        }
    }
}

/// Eigenbasis coefficients of an [`AcousticPair`].
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticModes {
    grid: TorusGrid,
    /// `c₊(k)`, evolving as `e^{-i|k|τ}`.
    pub plus: Vec<Complex64>,
    /// `c₋(k)`, evolving as `e^{+i|k|τ}`.
    pub minus: Vec<Complex64>,
    /// Divergence-free velocity coefficients, one vector per mode.
    pub sol: Vec<[Complex64; 2]>,
}

impl AcousticModes {
    pub fn zeros(grid: TorusGrid) -> Self {
        let len = grid.len();
        Self {
            grid,
            plus: vec![ZERO; len],
            minus: vec![ZERO; len],
            sol: vec![[ZERO; 2]; len],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn from_pair(u: &AcousticPair) -> Self {
        Self::from_spectra(Some(&u.phi.transform()), &u.vel.transform())
    }

    /// Eigenbasis coefficients of `(φ, v)` given as spectra; `None` means `φ = 0`.
    /// The `φ` mean and all Nyquist modes are discarded.
    pub fn from_spectra(phi: Option<&Spectrum>, vel: &[Spectrum]) -> Self {
        let grid = *vel[0].grid();
        let mut m = Self::zeros(grid);
        for i in 0..grid.len() {
            let k = grid.wavevector(i);
            if grid.is_nyquist(k) {
                continue;
            }
            let mut v = [ZERO; 2];
            for (d, s) in vel.iter().enumerate() {
                v[d] = s.coeffs()[i];
            }
            let k2 = TorusGrid::norm_sq(k);
            if k2 == 0 {
                m.sol[i] = v;
                continue;
            }
            let kn = (k2 as f64).sqrt();
            let alpha = (v[0] * k[0] as f64 + v[1] * k[1] as f64) / kn;
            m.sol[i] = [
                v[0] - alpha * (k[0] as f64 / kn),
                v[1] - alpha * (k[1] as f64 / kn),
            ];
            let f = phi.map_or(ZERO, |p| p.coeffs()[i]);
            m.plus[i] = 0.5 * (f + alpha);
            m.minus[i] = 0.5 * (f - alpha);
        }
        m
    }

    /// Zeroes every mode outside the dealiased band.
    pub fn truncate(&mut self) {
        for i in 0..self.grid.len() {
            if !self.grid.in_band(self.grid.wavevector(i)) {
                self.plus[i] = ZERO;
                self.minus[i] = ZERO;
                self.sol[i] = [ZERO; 2];
            }
        }
    }

    /// Gradient amplitude `α(k) = c₊ − c₋` and scalar `φ̂(k) = c₊ + c₋`.
    pub fn to_spectra(&self) -> (Spectrum, Vec<Spectrum>) {
        let grid = self.grid;
        let dim = grid.dim();
        let mut phi = Spectrum::zeros(grid, true);
        let mut vel: Vec<Spectrum> = (0..dim).map(|_| Spectrum::zeros(grid, true)).collect();
        for i in 0..grid.len() {
            let k = grid.wavevector(i);
            let k2 = TorusGrid::norm_sq(k);
            phi.coeffs_mut()[i] = self.plus[i] + self.minus[i];
            let alpha = self.plus[i] - self.minus[i];
            let kn = (k2 as f64).sqrt();
            for (d, s) in vel.iter_mut().enumerate() {
                let grad = if k2 == 0 {
                    ZERO
                } else {
                    alpha * (k[d] as f64 / kn)
                };
                s.coeffs_mut()[i] = self.sol[i][d] + grad;
            }
        }
        (phi, vel)
    }

    pub fn to_pair(&self) -> AcousticPair {
        let (phi, vel) = self.to_spectra();
        let (phi, _) = phi.to_real().expect("hermitian").split_mean();
        AcousticPair {
            phi,
            vel: VectorField::from_spectra(&vel).expect("hermitian"),
        }
    }

    /// Applies the group in place.
    pub fn rotate(&mut self, tau: f64) {
        for i in 0..self.grid.len() {
            let k2 = TorusGrid::norm_sq(self.grid.wavevector(i));
            if k2 == 0 {
                continue;
            }
            let w = (k2 as f64).sqrt() * tau;
            let e = Complex64::from_polar(1.0, -w);
            self.plus[i] *= e;
            self.minus[i] *= e.conj();
        }
    }

    pub fn rotated(&self, tau: f64) -> Self {
        let mut m = self.clone();
        m.rotate(tau);
        m
    }

    /// Drops the divergence-free slot.
    pub fn without_solenoidal(&self) -> Self {
        let mut m = self.clone();
        m.sol.iter_mut().for_each(|s| *s = [ZERO; 2]);
        m
    }

    /// `Σ_k w(k) [2(|c₊|² + |c₋|²) + |sol|²]` times the torus volume.
    fn weighted_sq(&self, weight: impl Fn(i64) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.len() {
            let w = weight(TorusGrid::norm_sq(self.grid.wavevector(i)));
            let sol = self.sol[i][0].norm_sqr() + self.sol[i][1].norm_sqr();
            acc += w * (2.0 * (self.plus[i].norm_sqr() + self.minus[i].norm_sqr()) + sol);
        }
        acc * self.grid.volume()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_sq(|k2| (1.0 + k2 as f64).powf(s)).sqrt()
    }

    /// L² pairing `∫(φφ' + v·v')` computed on coefficients.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.len() {
            let c = self.plus[i] * other.plus[i].conj() + self.minus[i] * other.minus[i].conj();
            let s =
                self.sol[i][0] * other.sol[i][0].conj() + self.sol[i][1] * other.sol[i][1].conj();
            acc += 2.0 * c.re + s.re;
        }
        acc * self.grid.volume()
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for i in 0..self.grid.len() {
            self.plus[i] += x.plus[i] * a;
            self.minus[i] += x.minus[i] * a;
            self.sol[i][0] += x.sol[i][0] * a;
            self.sol[i][1] += x.sol[i][1] * a;
        }
    }
}

/// `L(τ)U`.
pub fn apply_group(u: &AcousticPair, tau: f64) -> AcousticPair {
    let mut m = AcousticModes::from_pair(u);
    m.rotate(tau);
    m.to_pair()
}

/// `V = L(−t/ε) U`.
pub fn filter(u: &AcousticPair, t: f64, eps: f64) -> Result<AcousticPair> {
    check_eps(eps)?;
    Ok(apply_group(u, -t / eps))
}

/// Inverse of [`filter`]: `U = L(t/ε) V`.
pub fn unfilter(v: &AcousticPair, t: f64, eps: f64) -> Result<AcousticPair> {
    check_eps(eps)?;
    Ok(apply_group(v, t / eps))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Mach number must be positive, got {eps}"
        )));
    }
    Ok(())
}

fn check_state(state: &QhdState) -> Result<()> {
    state.check_vacuum()
}

/// `U = (δ, QJ)` with the mean of `δ` split off and returned.
pub fn build_u(state: &QhdState, eps: f64) -> Result<(AcousticPair, f64)> {
    check_eps(eps)?;
    check_state(state)?;
    let delta = density_fluctuation(&state.rho, eps)?;
    AcousticPair::with_mean_removed(delta, project_q(&state.j))
}

/// `Ū = (Ψ, QΛ)` with signed `Ψ`, mean split off and returned.
pub fn build_ubar(
    state: &QhdState,
    eps: f64,
    gamma: f64,
    normalization: PsiNormalization,
) -> Result<(AcousticPair, f64)> {
    check_eps(eps)?;
    check_state(state)?;
    let psi = renormalized_pressure(&state.rho, eps, gamma, normalization)?;
    AcousticPair::with_mean_removed(psi, project_q(&state.lambda))
}

/// `‖U − Ū‖` in `L^{2γ/(γ+1)}`.
pub fn gap_norm(u: &AcousticPair, ubar: &AcousticPair, gamma: f64) -> Result<f64> {
    u.sub(ubar)?.lebesgue_norm(2.0 * gamma / (gamma + 1.0))
}

/// The source `G = −Q[div(Λ⊗Λ) − div(ρ∇²log ρ)] − (γ−1)∇(Π/ε²)`.
///
/// The quantum stress is evaluated as `∇Δρ − 4 div(∇√ρ ⊗ ∇√ρ)`.
pub fn compute_g(state: &QhdState, eps: f64, gamma: f64) -> Result<VectorField> {
    check_eps(eps)?;
    check_state(state)?;
    let grid = *state.rho.grid();
    let convect = div_tensor_spectra(&state.lambda, &state.lambda)?;
    let grad_sqrt = gradient(&state.sqrt_rho);
    let bohm = div_tensor_spectra(&grad_sqrt, &grad_sqrt)?;
    let grad_lap = gradient_spectra(&laplacian_spectrum(&state.rho.transform()));
    let mut stress: Vec<Spectrum> = Vec::with_capacity(grid.dim());
    for d in 0..grid.dim() {
        let mut s = convect[d].clone();
        for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
            *c -= grad_lap[d].coeffs()[i] - 4.0 * bohm[d].coeffs()[i];
        }
        stress.push(s);
    }
    let (_, q) = leray_spectra(&stress);
    let pres = gradient_spectra(&psi_squared(&state.rho, eps, gamma).transform());
    let out: Vec<Spectrum> = q
        .iter()
        .zip(&pres)
        .map(|(a, b)| {
            let coeffs = a
                .coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| -x - (gamma - 1.0) * y)
                .collect();
            Spectrum::new(grid, coeffs, true).expect("grid length")
        })
        .collect();
    VectorField::from_spectra(&out)
}

/// `‖G‖_{H^{-s}}`.
pub fn source_bound(g: &VectorField, s: f64) -> f64 {
    sobolev_norm_vector(g, -s)
}

/// Central-difference residuals of the acoustic form of the QHD system at
/// the middle of three states spaced by `dt`:
/// `‖ε∂ₜδ + div QJ‖` and `‖ε∂ₜQJ + ∇δ − εG‖` in L².
pub fn mso_residuals(
    prev: &QhdState,
    mid: &QhdState,
    next: &QhdState,
    dt: f64,
    eps: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    let (u0, m0) = build_u(prev, eps)?;
    let (u1, m1) = build_u(mid, eps)?;
    let (u2, m2) = build_u(next, eps)?;
    let scale = eps / (2.0 * dt);
    let dphi = u2
        .phi
        .add(&ScalarField::constant(*u2.grid(), m2))?
        .sub(&u0.phi.add(&ScalarField::constant(*u0.grid(), m0))?)?;
    let r1 = dphi.scale(scale).add(&divergence(&u1.vel))?;
    let delta = u1.phi.add(&ScalarField::constant(*u1.grid(), m1))?;
    let g = compute_g(mid, eps, gamma)?;
    let r2 = u2
        .vel
        .sub(&u0.vel)?
        .scale(scale)
        .add(&gradient(&delta))?
        .sub(&g.scale(eps))?;
    Ok((l2_norm(&r1), l2_norm_vector(&r2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticDiagnostics {
    pub gap_norm: f64,
    pub source_bound: f64,
    pub residual_continuity: f64,
    pub residual_momentum: f64,
}

impl AcousticDiagnostics {
    pub fn is_valid(&self) -> bool {
        [
            self.gap_norm,
            self.source_bound,
            self.residual_continuity,
            self.residual_momentum,
        ]
        .iter()
        .all(|x| x.is_finite() && *x >= 0.0)
    }
}

/// Diagnostics at `mid`, using its neighbours for the time derivatives.
#[allow(clippy::too_many_arguments)]
pub fn diagnostics(
    prev: &QhdState,
    mid: &QhdState,
    next: &QhdState,
    dt: f64,
    eps: f64,
    gamma: f64,
    normalization: PsiNormalization,
    sobolev_s: f64,
) -> Result<AcousticDiagnostics> {
    let (u, _) = build_u(mid, eps)?;
    let (ubar, _) = build_ubar(mid, eps, gamma, normalization)?;
    let (rc, rm) = mso_residuals(prev, mid, next, dt, eps, gamma)?;
    Ok(AcousticDiagnostics {
        gap_norm: gap_norm(&u, &ubar, gamma)?,
        source_bound: source_bound(&compute_g(mid, eps, gamma)?, sobolev_s),
        residual_continuity: rc,
        residual_momentum: rm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterRow {
    pub t: f64,
    pub v_norm: f64,
    pub v_minus_vbar: f64,
    pub gap_norm: f64,
    pub source_bound: f64,
}

impl FilterRow {
    /// Filtered quantities of one state at time `state.time`.
    pub fn from_state(
        state: &QhdState,
        eps: f64,
        gamma: f64,
        normalization: PsiNormalization,
        sobolev_s: f64,
    ) -> Result<Self> {
        let t = state.time;
        let (u, _) = build_u(state, eps)?;
        let (ubar, _) = build_ubar(state, eps, gamma, normalization)?;
        let v = filter(&u, t, eps)?;
        let vbar = filter(&ubar, t, eps)?;
        Ok(Self {
            t,
            v_norm: v.l2_norm(),
            v_minus_vbar: v.sub(&vbar)?.l2_norm(),
            gap_norm: gap_norm(&u, &ubar, gamma)?,
            source_bound: source_bound(&compute_g(state, eps, gamma)?, sobolev_s),
        })
    }
}

pub const FILTER_HEADER: &str = "t,V_norm,V_minus_Vbar,gap_norm,source_bound";

pub fn filter_csv(rows: &[FilterRow]) -> String {
    let mut out = String::from(FILTER_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&crate::csv::row(&[
            r.t,
            r.v_norm,
            r.v_minus_vbar,
            r.gap_norm,
            r.source_bound,
        ]));
        out.push('\n');
    }
    out
}

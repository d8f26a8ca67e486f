//! Initial data for the three coupled systems and the named presets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::euler::euler_state;
use super::state::{EulerState, QhdParams, WaveFunction, DEFAULT_VACUUM_FLOOR};
use crate::acoustic::{AcousticPair, PsiNormalization};
use crate::error::{Error, Result};
use crate::resonance::OscillationProfile;
use crate::spectral::calculus::{
    dealias_scalar, dealias_vector, divergence_spectrum, inverse_laplacian_spectrum,
    l2_norm_vector, leray_decompose, sobolev_norm, sobolev_norm_vector,
};
use crate::spectral::random::random_gradient;
use crate::spectral::{ComplexField, ScalarField, TorusGrid, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preparation {
    Well,
    Ill,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDataSpec {
    /// Limit density fluctuation `σ₀` (mean-zero).
    pub sigma0: ScalarField,
    /// Limit velocity `ṽ₀`.
    pub vtilde0: VectorField,
    pub preparation: Preparation,
    pub eps: f64,
    pub gamma: f64,
    pub smoothness: f64,
    pub normalization: PsiNormalization,
    /// `h` in `√ρ₀ = 1 + ε σ₀/(√2 c) + ε² h`.
    pub density_corrector: Option<ScalarField>,
    /// `g` in the phase `S₀ = f + ε g`, where `∇f = ṽ₀`.
    pub phase_corrector: Option<ScalarField>,
    pub vacuum_floor: f64,
}

impl InitialDataSpec {
    pub fn new(sigma0: ScalarField, vtilde0: VectorField, eps: f64, gamma: f64) -> Self {
        let dim = sigma0.grid().dim() as f64;
        Self {
            sigma0,
            vtilde0,
            preparation: Preparation::Ill,
            eps,
            gamma,
            smoothness: dim / 2.0 + 1.0,
            normalization: PsiNormalization::Paper,
            density_corrector: None,
            phase_corrector: None,
            vacuum_floor: DEFAULT_VACUUM_FLOOR,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.sigma0.grid()
    }

    pub fn validate(&self) -> Result<()> {
        self.sigma0.grid().check_same(self.vtilde0.grid())?;
        let n = self.grid().dim() as f64;
        if self.smoothness < n / 2.0 + 1.0 {
            return Err(Error::InvalidArgument(format!(
                "smoothness {} below the required {}",
                self.smoothness,
                n / 2.0 + 1.0
            )));
        }
        if !(sobolev_norm(&self.sigma0, self.smoothness).is_finite()
            && sobolev_norm_vector(&self.vtilde0, self.smoothness).is_finite())
        {
            return Err(Error::InvalidArgument(
                "initial data not in the configured Sobolev space".into(),
            ));
        }
        let (p, q) = leray_decompose(&self.vtilde0);
        let scale = l2_norm_vector(&self.vtilde0).max(1.0);
        if self.preparation == Preparation::Well
            && (self.sigma0.max_abs() > 0.0 || l2_norm_vector(&q) > 1e-12 * scale)
        {
            return Err(Error::InvalidArgument(
                "well-prepared data need σ₀ = 0 and Qṽ₀ = 0".into(),
            ));
        }
        if l2_norm_vector(&p) > 1e-12 * scale {
            return Err(Error::NonRealizable(
                "the velocity has a divergence-free part or a mean, which no single-valued phase produces".into(),
            ));
        }
        let mean = self.sigma0.mean();
        if mean.abs() > 1e-12 * self.sigma0.max_abs().max(1.0) {
            return Err(Error::NotMeanZero {
                mean,
                max: self.sigma0.max_abs(),
            });
        }
        Ok(())
    }
}

/// Builds `(ψ₀, (v₀, π₀), V⁰(0))`.
pub fn build_initial_data(
    spec: &InitialDataSpec,
) -> Result<(WaveFunction, EulerState, OscillationProfile)> {
    spec.validate()?;
    let grid = *spec.grid();
    let params = QhdParams::new(spec.eps, spec.gamma)?.with_vacuum_floor(spec.vacuum_floor);
    let eps = spec.eps;
    let kappa = spec.normalization.factor() / std::f64::consts::SQRT_2;

    let mut sqrt_rho = spec.sigma0.map(|s| 1.0 + eps * s / (2.0 * kappa));
    if let Some(h) = &spec.density_corrector {
        sqrt_rho = sqrt_rho.add(&h.scale(eps * eps))?;
    }
    let min = sqrt_rho.min();
    if min < spec.vacuum_floor {
        return Err(Error::Vacuum {
            min,
            floor: spec.vacuum_floor,
        });
    }

    let potential =
        inverse_laplacian_spectrum(&divergence_spectrum(&spec.vtilde0.transform())).to_real()?;
    let mut phase = potential;
    if let Some(g) = &spec.phase_corrector {
        phase = phase.add(&g.scale(eps))?;
    }
    let psi: Vec<Complex64> = sqrt_rho
        .values()
        .iter()
        .zip(phase.values())
        .map(|(&a, &s)| Complex64::from_polar(a, 0.5 * s))
        .collect();
    let w = WaveFunction::new(ComplexField::new(grid, psi)?, params);

    let (p, q) = leray_decompose(&spec.vtilde0);
    let e = euler_state(p, 0.0)?;
    let (sigma, _) = dealias_scalar(&spec.sigma0).split_mean();
    let v0 = AcousticPair::new(sigma, dealias_vector(&q))?;
    Ok((w, e, OscillationProfile::new(v0, 0.0)))
}

/// Named initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `σ₀ = 0`, `ṽ₀ = ∇(½ sin x₁)`.
    SingleMode,
    /// `σ₀ = 0`, `ṽ₀ = ∇(½ sin x₁ + ¼ sin 2x₁)`: the two modes interact resonantly.
    TwoModeResonant,
    /// `σ₀ = 0`, random gradient velocity with `H^s` decay, scaled to max `½`.
    RandomHs { s: f64, seed: u64 },
    /// `σ₀ = 0`, `ṽ₀ = 0`, with an `O(ε)` phase corrector varying along the last axis.
    WellPreparedShear,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::SingleMode => write!(f, "single-mode"),
            Preset::TwoModeResonant => write!(f, "two-mode-resonant"),
            Preset::RandomHs { s, seed } => write!(f, "random-Hs({s},{seed})"),
            Preset::WellPreparedShear => write!(f, "well-prepared-shear"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "single-mode" => return Ok(Preset::SingleMode),
            "two-mode-resonant" => return Ok(Preset::TwoModeResonant),
            "well-prepared-shear" => return Ok(Preset::WellPreparedShear),
            _ => {}
        }
        let bad = || Error::InvalidArgument(format!("unknown preset '{s}'"));
        let inner = s
            .strip_prefix("random-Hs(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let sv: f64 = a.trim().parse().map_err(|_| bad())?;
        let seed: u64 = b.trim().parse().map_err(|_| bad())?;
        Ok(Preset::RandomHs { s: sv, seed })
    }
}

/// Amplitude of the preset velocities.
pub const PRESET_AMPLITUDE: f64 = 0.5;

impl Preset {
    pub fn spec(
        &self,
        grid: TorusGrid,
        eps: f64,
        gamma: f64,
        normalization: PsiNormalization,
    ) -> InitialDataSpec {
        let a = PRESET_AMPLITUDE;
        let zero = ScalarField::zeros(grid);
        let last = grid.dim() - 1;
        let mut spec = match *self {
            Preset::SingleMode => InitialDataSpec::new(
                zero,
                VectorField::from_fn(grid, |x| [a * x[0].cos(), 0.0]),
                eps,
                gamma,
            ),
            Preset::TwoModeResonant => InitialDataSpec::new(
                zero,
                VectorField::from_fn(grid, |x| {
                    [a * x[0].cos() + 0.5 * a * (2.0 * x[0]).cos(), 0.0]
                }),
                eps,
                gamma,
            ),
            Preset::RandomHs { s, seed } => {
                let v = random_gradient(grid, s, seed);
                let m = v.max_abs();
                let v = if m > 0.0 { v.scale(a / m) } else { v };
                let mut spec = InitialDataSpec::new(zero, v, eps, gamma);
                spec.smoothness = s.max(grid.dim() as f64 / 2.0 + 1.0);
                spec
            }
            Preset::WellPreparedShear => {
                let mut spec = InitialDataSpec::new(zero, VectorField::zeros(grid), eps, gamma);
                spec.preparation = Preparation::Well;
                spec.phase_corrector = Some(ScalarField::from_fn(grid, |x| {
                    2.0 * a * (x[last].sin() + 0.5 * (2.0 * x[last]).sin())
                }));
                spec
            }
        };
        spec.normalization = normalization;
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::functionals::renormalized_pressure;
    use crate::solvers::state::madelung;
    use crate::spectral::calculus::{l2_norm, project_q};

    #[test]
    fn preset_names_round_trip() {
        for p in [
            Preset::SingleMode,
            Preset::TwoModeResonant,
            Preset::RandomHs { s: 2.5, seed: 7 },
            Preset::WellPreparedShear,
        ] {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
        assert!("random-Hs(2".parse::<Preset>().is_err());
        assert!("vortex".parse::<Preset>().is_err());
    }

    #[test]
    fn well_prepared_has_zero_profile() {
        let g = TorusGrid::new(1, 64).unwrap();
        let spec = Preset::WellPreparedShear.spec(g, 0.1, 2.0, PsiNormalization::Paper);
        let (_, e, v0) = build_initial_data(&spec).unwrap();
        assert_eq!(v0.value.l2_norm(), 0.0);
        assert_eq!(e.v.max_abs(), 0.0);
    }

    #[test]
    fn velocity_is_recovered() {
        let g = TorusGrid::new(2, 64).unwrap();
        let spec = Preset::TwoModeResonant.spec(g, 0.1, 2.0, PsiNormalization::Paper);
        let (w, _, _) = build_initial_data(&spec).unwrap();
        let err = madelung(&w).lambda.sub(&spec.vtilde0).unwrap().max_abs();
        assert!(err < 1e-10, "{err}");

        let g = TorusGrid::new(2, 32).unwrap();
        let spec = Preset::RandomHs { s: 3.0, seed: 4 }.spec(g, 0.1, 2.0, PsiNormalization::Paper);
        let (_, _, v0) = build_initial_data(&spec).unwrap();
        assert!(
            v0.value
                .vel()
                .sub(&project_q(&spec.vtilde0))
                .unwrap()
                .max_abs()
                < 1e-12
        );
    }

    #[test]
    fn pressure_tracks_sigma_at_rate_eps() {
        let g = TorusGrid::new(1, 64).unwrap();
        let mut errs = Vec::new();
        for eps in [0.1, 0.05] {
            let sigma = ScalarField::from_fn(g, |x| x[0].cos());
            let spec = InitialDataSpec::new(sigma.clone(), VectorField::zeros(g), eps, 2.0);
            let (w, _, _) = build_initial_data(&spec).unwrap();
            let psi = renormalized_pressure(&madelung(&w).rho, eps, 2.0, PsiNormalization::Paper)
                .unwrap();
            errs.push(l2_norm(&psi.sub(&sigma).unwrap()));
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!((rate - 1.0).abs() < 0.1, "{errs:?}");
    }

    #[test]
    fn profile_is_eps_independent() {
        let g = TorusGrid::new(1, 32).unwrap();
        let build = |eps| {
            let mut spec = Preset::TwoModeResonant.spec(g, eps, 2.0, PsiNormalization::Unit);
            spec.sigma0 = ScalarField::from_fn(g, |x| 0.2 * x[0].sin());
            build_initial_data(&spec).unwrap().2
        };
        assert_eq!(build(0.1), build(0.02));
    }

    #[test]
    fn rejects_circulation_and_vacuum() {
        let g = TorusGrid::new(2, 16).unwrap();
        let spec = InitialDataSpec::new(
            ScalarField::zeros(g),
            VectorField::from_fn(g, |x| [x[1].sin(), 0.0]),
            0.1,
            2.0,
        );
        assert!(matches!(
            build_initial_data(&spec),
            Err(Error::NonRealizable(_))
        ));
        let spec = InitialDataSpec::new(
            ScalarField::zeros(g),
            VectorField::constant(g, &[1.0, 0.0]).unwrap(),
            0.1,
            2.0,
        );
        assert!(matches!(
            build_initial_data(&spec),
            Err(Error::NonRealizable(_))
        ));
        let spec = InitialDataSpec::new(
            ScalarField::from_fn(g, |x| 30.0 * x[0].cos()),
            VectorField::zeros(g),
            0.1,
            2.0,
        );
        assert!(matches!(
            build_initial_data(&spec),
            Err(Error::Vacuum { .. })
        ));
    }
}

//! The coupled QHD / Euler / limit-profile run and its entropy trace.

use std::fmt::Write as _;

use super::functionals::energy;
use super::relative::{
    convergence_metrics, default_test_fields, relative_entropy, EntropyParts, TestField,
};
use crate::acoustic::{AcousticModes, PsiNormalization};
use crate::error::{Error, Result};
use crate::resonance::{OscillationProfile, ResonantForms};
use crate::solvers::euler::{euler_cfl_dt, euler_step, DEFAULT_CFL};
use crate::solvers::initial::{build_initial_data, InitialDataSpec};
use crate::solvers::limit::{limit_max_dt, limit_step_modes, profile_modes};
use crate::solvers::nls::{nls_default_dt, nls_max_dt, nls_step};
use crate::solvers::state::{madelung, EulerState, QhdState, WaveFunction};
use crate::spectral::TorusGrid;

/// Test modes `|k| ≤ DEFAULT_TEST_KMAX` probe weak convergence by default.
pub const DEFAULT_TEST_KMAX: i64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub energy: f64,
    pub entropy: f64,
    pub comp_velocity: f64,
    pub comp_pressure: f64,
    pub comp_quantum: f64,
    pub strong_gap: f64,
    /// `|∫₀ᵗ ⟨Λ − v, w⟩ ds|` per test field.
    pub weak_gap: Vec<f64>,
}

impl TraceRow {
    pub fn parts(&self) -> EntropyParts {
        EntropyParts {
            velocity: self.comp_velocity,
            pressure: self.comp_pressure,
            quantum: self.comp_quantum,
        }
    }

    pub fn is_valid(&self) -> bool {
        let vals = [
            self.t,
            self.energy,
            self.entropy,
            self.comp_velocity,
            self.comp_pressure,
            self.comp_quantum,
            self.strong_gap,
        ];
        vals.iter().chain(&self.weak_gap).all(|x| x.is_finite())
            && vals[1..].iter().chain(&self.weak_gap).all(|&x| x >= 0.0)
            && (self.entropy - self.parts().total()).abs() <= 1e-12 * self.entropy.abs().max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub eps: f64,
    pub rows: Vec<TraceRow>,
}

impl EntropyTrace {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn entropy(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.entropy).collect()
    }

    pub fn energy(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn test_count(&self) -> usize {
        self.rows.first().map_or(0, |r| r.weak_gap.len())
    }

    pub fn header(m: usize) -> String {
        let mut h = String::from("t,E,H,comp_velocity,comp_pressure,comp_quantum,strong_gap");
        for j in 1..=m {
            let _ = write!(h, ",weak_gap_{j}");
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::header(self.test_count());
        out.push('\n');
        for r in &self.rows {
            let mut vals = vec![
                r.t,
                r.energy,
                r.entropy,
                r.comp_velocity,
                r.comp_pressure,
                r.comp_quantum,
                r.strong_gap,
            ];
            vals.extend_from_slice(&r.weak_gap);
            out.push_str(&crate::csv::row(&vals));
            out.push('\n');
        }
        out
    }

    /// Checks the row invariants and that times increase.
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            if !r.is_valid() {
                return Err(Error::Numerical(format!(
                    "invalid trace row at t = {}",
                    r.t
                )));
            }
            if i > 0 && r.t <= self.rows[i - 1].t {
                return Err(Error::Numerical(format!(
                    "trace times not increasing at row {i}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub initial: InitialDataSpec,
    pub t_final: f64,
    /// Number of output intervals.
    pub outputs: usize,
    pub dt_override: Option<f64>,
    pub test_fields: Vec<TestField>,
}

impl PipelineConfig {
    pub fn new(initial: InitialDataSpec, t_final: f64) -> Self {
        let test_fields = default_test_fields(initial.grid(), DEFAULT_TEST_KMAX);
        Self {
            initial,
            t_final,
            outputs: 50,
            dt_override: None,
            test_fields,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.initial.grid()
    }

    pub fn eps(&self) -> f64 {
        self.initial.eps
    }

    pub fn normalization(&self) -> PsiNormalization {
        self.initial.normalization
    }
}

/// End states and trace of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: EntropyTrace,
    pub wave: WaveFunction,
    pub euler: EulerState,
    pub profile: OscillationProfile,
    /// Largest `‖V⁰(t)‖_{L²}` seen at output times.
    pub max_profile_norm: f64,
    pub steps: usize,
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    forms: ResonantForms,
    wave: WaveFunction,
    euler: EulerState,
    modes: AcousticModes,
    time: f64,
    integrals: Vec<f64>,
    last_pairings: Vec<f64>,
    steps: usize,
}

impl Runner<'_> {
    fn profile(&self) -> OscillationProfile {
        OscillationProfile::new(self.modes.to_pair(), self.time)
    }

    fn state(&self) -> Result<QhdState> {
        let st = madelung(&self.wave);
        st.check_vacuum()?;
        Ok(st)
    }

    fn row(&self, st: &QhdState) -> Result<TraceRow> {
        let eps = self.cfg.eps();
        let gamma = self.cfg.initial.gamma;
        let profile = self.profile();
        let parts = relative_entropy(
            st,
            &self.euler,
            &profile,
            eps,
            gamma,
            self.cfg.normalization(),
        )?;
        let m = convergence_metrics(st, &self.euler, &[])?;
        Ok(TraceRow {
            t: self.time,
            energy: energy(st, eps, gamma)?.total(),
            entropy: parts.total(),
            comp_velocity: parts.velocity,
            comp_pressure: parts.pressure,
            comp_quantum: parts.quantum,
            strong_gap: m.strong_gap,
            weak_gap: self.integrals.iter().map(|x| x.abs()).collect(),
        })
    }

    fn interval_dt(&self, span: f64) -> Result<(f64, usize)> {
        let grid = *self.wave.grid();
        let mut cap = match self.cfg.dt_override {
            Some(dt) => dt,
            None => nls_default_dt(&grid, &self.wave.params).min(nls_max_dt(&grid)),
        };
        cap = cap.min(euler_cfl_dt(&self.euler.v, DEFAULT_CFL));
        cap = cap.min(limit_max_dt(&self.forms, &self.euler.v, &self.modes));
        if !(cap > 0.0) {
            return Err(Error::StepTooLarge {
                dt: span,
                bound: cap,
            });
        }
        let n = ((span / cap) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((span / n as f64, n))
    }

    fn advance(&mut self, t_end: f64) -> Result<()> {
        let span = t_end - self.time;
        let (dt, n) = self.interval_dt(span)?;
        let t0 = self.time;
        for i in 1..=n {
            let t = if i == n { t_end } else { t0 + i as f64 * dt };
            self.wave = nls_step(&self.wave, dt)?;
            self.modes = limit_step_modes(&self.modes, &self.euler.v, dt, &self.forms)?;
            self.euler = euler_step(&self.euler, dt)?;
            self.wave.time = t;
            self.euler.time = t;
            self.time = t;
            let st = self.state()?;
            let p = convergence_metrics(&st, &self.euler, &self.cfg.test_fields)?.pairings;
            for ((acc, prev), cur) in self.integrals.iter_mut().zip(&self.last_pairings).zip(&p) {
                *acc += 0.5 * dt * (prev + cur);
            }
            self.last_pairings = p;
            self.steps += 1;
        }
        if !self.modes.to_pair().is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite oscillation profile at t = {}",
                self.time
            )));
        }
        Ok(())
    }
}

/// Builds the initial data and integrates the three systems in lockstep,
/// recording the trace at `outputs + 1` equally spaced times.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput> {
    if !(cfg.t_final > 0.0) || cfg.outputs == 0 {
        return Err(Error::InvalidArgument(
            "need t_final > 0 and at least one output interval".into(),
        ));
    }
    let spec = &cfg.initial;
    let (wave, euler, profile) = build_initial_data(spec)?;
    let forms = ResonantForms::new(*spec.grid(), spec.gamma, spec.normalization)?;
    let modes = profile_modes(&profile);
    let mut r = Runner {
        cfg,
        forms,
        wave,
        euler,
        modes,
        time: 0.0,
        integrals: vec![0.0; cfg.test_fields.len()],
        last_pairings: Vec::new(),
        steps: 0,
    };
    let st = r.state()?;
    r.last_pairings = convergence_metrics(&st, &r.euler, &cfg.test_fields)?.pairings;
    let mut rows = vec![r.row(&st)?];
    let mut max_profile_norm = r.profile().value.l2_norm();
    for i in 1..=cfg.outputs {
        let t_end = cfg.t_final * i as f64 / cfg.outputs as f64;
        r.advance(t_end)?;
        let st = r.state()?;
        rows.push(r.row(&st)?);
        max_profile_norm = max_profile_norm.max(r.profile().value.l2_norm());
    }
    let trace = EntropyTrace {
        eps: cfg.eps(),
        rows,
    };
    trace.validate()?;
    let profile = r.profile();
    Ok(RunOutput {
        trace,
        wave: r.wave,
        euler: r.euler,
        profile,
        max_profile_norm,
        steps: r.steps,
    })
}

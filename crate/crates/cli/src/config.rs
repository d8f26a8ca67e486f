//! Flat `key = value` run configuration with typed validation.

use std::fmt::Write as _;
use std::path::PathBuf;

use lowmach_core::acoustic::PsiNormalization;
use lowmach_core::entropy::{default_test_fields, PipelineConfig, SweepConfig};
use lowmach_core::solvers::{InitialDataSpec, Preparation, Preset};
use lowmach_core::spectral::{ScalarField, Spectrum, TorusGrid, VectorField};
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// One term of a spectral initial condition: `target k0 k1 re im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    /// `sigma` (density fluctuation) or `phase` (velocity potential).
    pub target: String,
    pub k: [i64; 2],
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSource {
    Preset(Preset),
    Coefficients(Vec<Coefficient>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EulerInitial {
    FromInitialData,
    Shear,
    Random { s: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: usize,
    pub resolution: usize,
    pub gamma: f64,
    pub eps_list: Vec<f64>,
    pub t_final: f64,
    pub outputs: usize,
    pub dt_override: Option<f64>,
    pub dealias: bool,
    pub vacuum_floor: f64,
    pub tau_avg: f64,
    pub sobolev_s: f64,
    pub psi_normalization: PsiNormalization,
    pub initial: InitialSource,
    pub euler_initial: EulerInitial,
    pub test_kmax: i64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            resolution: 256,
            gamma: 2.0,
            eps_list: vec![0.2, 0.1, 0.05],
            t_final: 0.5,
            outputs: 50,
            dt_override: None,
            dealias: true,
            vacuum_floor: 1e-8,
            tau_avg: 200.0,
            sobolev_s: 3.0,
            psi_normalization: PsiNormalization::Unit,
            initial: InitialSource::Preset(Preset::SingleMode),
            euler_initial: EulerInitial::FromInitialData,
            test_kmax: 4,
            seed: 0,
            workers: 1,
            out: PathBuf::from("out"),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| bad(format!("{key}: cannot parse '{v}'")))
}

pub fn parse_eps_list(v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(|s| parse_num::<f64>("eps_list", s.trim()))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn parse_coefficients(v: &str) -> Result<Vec<Coefficient>, ConfigError> {
    let mut out = Vec::new();
    for entry in v.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let parts: Vec<&str> = entry.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(bad(format!(
                "coefficients: expected 'target k0 k1 re im', got '{entry}'"
            )));
        }
        let target = parts[0].to_string();
        if target != "sigma" && target != "phase" {
            return Err(bad(format!("coefficients: unknown target '{target}'")));
        }
        out.push(Coefficient {
            target,
            k: [
                parse_num("coefficients", parts[1])?,
                parse_num("coefficients", parts[2])?,
            ],
            value: Complex64::new(
                parse_num("coefficients", parts[3])?,
                parse_num("coefficients", parts[4])?,
            ),
        });
    }
    Ok(out)
}

fn format_coefficients(c: &[Coefficient]) -> String {
    c.iter()
        .map(|c| {
            format!(
                "{} {} {} {} {}",
                c.target, c.k[0], c.k[1], c.value.re, c.value.im
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn parse_euler_initial(v: &str) -> Result<EulerInitial, ConfigError> {
    match v {
        "from-initial-data" => return Ok(EulerInitial::FromInitialData),
        "shear" => return Ok(EulerInitial::Shear),
        _ => {}
    }
    let err = || bad(format!("euler_initial: unknown value '{v}'"));
    let inner = v
        .strip_prefix("random(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(err)?;
    let (a, b) = inner.split_once(',').ok_or_else(err)?;
    Ok(EulerInitial::Random {
        s: a.trim().parse().map_err(|_| err())?,
        seed: b.trim().parse().map_err(|_| err())?,
    })
}

impl RunConfig {
    /// Applies `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected 'key = value'", no + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "dimension" => self.dimension = parse_num(key, v)?,
            "resolution" => self.resolution = parse_num(key, v)?,
            "gamma" => self.gamma = parse_num(key, v)?,
            "eps_list" => self.eps_list = parse_eps_list(v)?,
            "t_final" => self.t_final = parse_num(key, v)?,
            "outputs" => self.outputs = parse_num(key, v)?,
            "dt_override" => {
                self.dt_override = if v.is_empty() || v == "none" {
                    None
                } else {
                    Some(parse_num(key, v)?)
                }
            }
            "dealias" => self.dealias = parse_bool(key, v)?,
            "vacuum_floor" => self.vacuum_floor = parse_num(key, v)?,
            "tau_avg" => self.tau_avg = parse_num(key, v)?,
            "sobolev_s" => self.sobolev_s = parse_num(key, v)?,
            "psi_normalization" => {
                self.psi_normalization = PsiNormalization::parse(v)
                    .ok_or_else(|| bad(format!("psi_normalization: unknown '{v}'")))?
            }
            "preset" => {
                self.initial =
                    InitialSource::Preset(v.parse().map_err(|e| bad(format!("preset: {e}")))?)
            }
            "coefficients" => self.initial = InitialSource::Coefficients(parse_coefficients(v)?),
            "euler_initial" => self.euler_initial = parse_euler_initial(v)?,
            "test_kmax" => self.test_kmax = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "workers" => self.workers = parse_num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => return Err(bad(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Replaces the seed, including that of a random preset.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let InitialSource::Preset(Preset::RandomHs { s, .. }) = self.initial {
            self.initial = InitialSource::Preset(Preset::RandomHs { s, seed });
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=2).contains(&self.dimension) {
            return Err(bad("dimension must be 1 or 2"));
        }
        if self.resolution < 8 || !self.resolution.is_power_of_two() {
            return Err(bad("resolution must be a power of two, at least 8"));
        }
        if !(self.gamma > 1.0) || self.gamma < self.dimension as f64 / 2.0 {
            return Err(bad("gamma must exceed 1 and be at least dimension/2"));
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(bad("eps_list entries must lie in (0, 1]"));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("eps_list must be strictly decreasing"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(bad("t_final must be positive"));
        }
        if self.outputs == 0 {
            return Err(bad("outputs must be positive"));
        }
        if let Some(dt) = self.dt_override {
            if !(dt > 0.0) {
                return Err(bad("dt_override must be positive"));
            }
        }
        if !(self.vacuum_floor > 0.0) || !(self.tau_avg > 0.0) {
            return Err(bad("vacuum_floor and tau_avg must be positive"));
        }
        if self.sobolev_s < self.dimension as f64 / 2.0 + 1.0 {
            return Err(bad("sobolev_s must be at least dimension/2 + 1"));
        }
        if self.test_kmax < 1 {
            return Err(bad("test_kmax must be positive"));
        }
        if let InitialSource::Coefficients(cs) = &self.initial {
            for c in cs {
                if self.dimension == 1 && c.k[1] != 0 {
                    return Err(bad(
                        "coefficients: second wavenumber must be 0 in one dimension",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid, ConfigError> {
        let g = if self.dealias {
            TorusGrid::new(self.dimension, self.resolution)
        } else {
            TorusGrid::with_dealias(self.dimension, self.resolution, 1, 1)
        };
        g.map_err(|e| bad(e.to_string()))
    }

    fn coefficient_field(&self, grid: TorusGrid, target: &str) -> Result<ScalarField, ConfigError> {
        let InitialSource::Coefficients(cs) = &self.initial else {
            return Ok(ScalarField::zeros(grid));
        };
        let mut s = Spectrum::zeros(grid, true);
        for c in cs.iter().filter(|c| c.target == target) {
            if c.k == [0, 0] {
                return Err(bad("coefficients: the zero mode is not allowed"));
            }
            let neg = [-c.k[0], -c.k[1]];
            let (Some(i), Some(j)) = (grid.index_of(c.k), grid.index_of(neg)) else {
                return Err(bad(format!("coefficients: mode {:?} not on the grid", c.k)));
            };
            if !grid.in_band(c.k) {
                return Err(bad(format!(
                    "coefficients: mode {:?} outside the retained band",
                    c.k
                )));
            }
            s.coeffs_mut()[i] += c.value;
            s.coeffs_mut()[j] += c.value.conj();
        }
        s.to_real().map_err(|e| bad(e.to_string()))
    }

    /// Initial data at Mach number `eps`.
    pub fn initial_spec(&self, eps: f64) -> Result<InitialDataSpec, ConfigError> {
        let grid = self.grid()?;
        let mut spec = match &self.initial {
            InitialSource::Preset(p) => p.spec(grid, eps, self.gamma, self.psi_normalization),
            InitialSource::Coefficients(_) => {
                let sigma = self.coefficient_field(grid, "sigma")?;
                let phase = self.coefficient_field(grid, "phase")?;
                let v = lowmach_core::spectral::gradient(&phase);
                let mut spec = InitialDataSpec::new(sigma, v, eps, self.gamma);
                spec.normalization = self.psi_normalization;
                if spec.sigma0.max_abs() == 0.0 && spec.vtilde0.max_abs() == 0.0 {
                    spec.preparation = Preparation::Well;
                }
                spec
            }
        };
        spec.smoothness = spec.smoothness.max(self.sobolev_s);
        spec.vacuum_floor = self.vacuum_floor;
        Ok(spec)
    }

    pub fn pipeline(&self, eps: f64) -> Result<PipelineConfig, ConfigError> {
        let spec = self.initial_spec(eps)?;
        let grid = *spec.grid();
        let mut p = PipelineConfig::new(spec, self.t_final);
        p.outputs = self.outputs;
        p.dt_override = self.dt_override;
        p.test_fields = default_test_fields(&grid, self.test_kmax);
        Ok(p)
    }

    pub fn sweep(&self) -> Result<SweepConfig, ConfigError> {
        Ok(SweepConfig {
            base: self.pipeline(self.eps_list[0])?,
            eps_list: self.eps_list.clone(),
            workers: self.workers,
        })
    }

    /// Divergence-free starting velocity for a standalone Euler run.
    pub fn euler_velocity(&self) -> Result<VectorField, ConfigError> {
        let grid = self.grid()?;
        Ok(match self.euler_initial {
            EulerInitial::FromInitialData => lowmach_core::spectral::calculus::project_p(
                &self.initial_spec(self.eps_list[0])?.vtilde0,
            ),
            EulerInitial::Shear => VectorField::from_fn(grid, |x| {
                if grid.dim() == 2 {
                    [x[1].cos(), 0.5 * x[0].sin()]
                } else {
                    [0.0, 0.0]
                }
            }),
            EulerInitial::Random { s, seed } => {
                lowmach_core::spectral::random::random_solenoidal(grid, s, seed)
            }
        })
    }

    /// Every key with its effective value, in schema order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let eps = self
            .eps_list
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "dimension = {}", self.dimension);
        let _ = writeln!(out, "resolution = {}", self.resolution);
        let _ = writeln!(out, "gamma = {}", self.gamma);
        let _ = writeln!(out, "eps_list = {eps}");
        let _ = writeln!(out, "t_final = {}", self.t_final);
        let _ = writeln!(out, "outputs = {}", self.outputs);
        let _ = writeln!(
            out,
            "dt_override = {}",
            self.dt_override
                .map_or("none".to_string(), |d| d.to_string())
        );
        let _ = writeln!(out, "dealias = {}", self.dealias);
        let _ = writeln!(out, "vacuum_floor = {}", self.vacuum_floor);
        let _ = writeln!(out, "tau_avg = {}", self.tau_avg);
        let _ = writeln!(out, "sobolev_s = {}", self.sobolev_s);
        let _ = writeln!(out, "psi_normalization = {}", self.psi_normalization.name());
        match &self.initial {
            InitialSource::Preset(p) => {
                let _ = writeln!(out, "preset = {p}");
            }
            InitialSource::Coefficients(c) => {
                let _ = writeln!(out, "coefficients = {}", format_coefficients(c));
            }
        }
        let euler = match self.euler_initial {
            EulerInitial::FromInitialData => "from-initial-data".to_string(),
            EulerInitial::Shear => "shear".to_string(),
            EulerInitial::Random { s, seed } => format!("random({s},{seed})"),
        };
        let _ = writeln!(out, "euler_initial = {euler}");
        let _ = writeln!(out, "test_kmax = {}", self.test_kmax);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "workers = {}", self.workers);
        let _ = writeln!(out, "out = {}", self.out.display());
        out
    }
}

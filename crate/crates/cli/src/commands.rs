//! Subcommand implementations. Each writes under the configured output directory.

use std::fs;
use std::path::{Path, PathBuf};

use lowmach_core::acoustic::{apply_group, filter_csv, AcousticPair, FilterRow};
use lowmach_core::csv::row;
use lowmach_core::entropy::functionals::{energy, psi_exact, psi_series};
use lowmach_core::entropy::{run_pipeline, sweep};
use lowmach_core::resonance::{is_resonant, orthogonality_report, ResonantForms};
use lowmach_core::solvers::euler::{euler_cfl_dt, euler_state, euler_step, DEFAULT_CFL};
use lowmach_core::solvers::limit::{limit_max_dt, limit_step_modes, profile_modes};
use lowmach_core::solvers::nls::{hamiltonian, nls_default_dt, nls_max_dt, nls_step};
use lowmach_core::solvers::{build_initial_data, madelung, QhdParams, WaveFunction};
use lowmach_core::spectral::random::{random_gradient, random_scalar, random_solenoidal};
use lowmach_core::spectral::snapshot::Snapshot;
use lowmach_core::spectral::{ComplexField, TorusGrid};
use lowmach_core::Error;
use num_complex::Complex64;

use crate::config::{ConfigError, RunConfig};
use crate::plot::{self, PlotError};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("property violation: {0}")]
    Property(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Property(_) => 4,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_)
            | Error::Vacuum { .. }
            | Error::StepTooLarge { .. }
            | Error::Desynchronized { .. }
            | Error::NotDivergenceFree(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

impl From<PlotError> for Failure {
    fn from(e: PlotError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn prepare(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("config.txt"), cfg.to_text())?;
    Ok(cfg.out.clone())
}

fn eps_dir(out: &Path, eps: f64) -> PathBuf {
    out.join(format!("eps_{eps}"))
}

/// Binary snapshot plus a `key = value` sidecar.
fn checkpoint(path: &Path, w: &WaveFunction) -> Result<(), Failure> {
    fs::write(path, Snapshot::from(&w.psi).to_bytes())?;
    let g = w.grid();
    let meta = format!(
        "time = {}\neps = {}\ngamma = {}\ndimension = {}\nresolution = {}\n",
        w.time,
        w.params.eps,
        w.params.gamma,
        g.dim(),
        g.n()
    );
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta");
    fs::write(PathBuf::from(meta_path), meta)?;
    Ok(())
}

fn substeps(span: f64, cap: f64) -> Result<(f64, usize), Failure> {
    if !(cap > 0.0) {
        return Err(Failure::Numerical(format!(
            "no admissible step (bound {cap})"
        )));
    }
    let n = ((span / cap) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((span / n as f64, n))
}

fn nls_cap(cfg: &RunConfig, w: &WaveFunction) -> f64 {
    cfg.dt_override
        .unwrap_or_else(|| nls_default_dt(w.grid(), &w.params).min(nls_max_dt(w.grid())))
}

pub fn run_qhd(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let eps = cfg.eps_list[0];
    let (mut w, _, _) = build_initial_data(&cfg.initial_spec(eps)?)?;
    let mut csv = String::from("t,mass,hamiltonian,E,E_kinetic,E_pressure,E_quantum,min_rho\n");
    let mut record = |w: &WaveFunction| -> Result<(), Failure> {
        let st = madelung(w);
        let e = energy(&st, eps, cfg.gamma)?;
        let vals = [
            w.time,
            w.mass(),
            hamiltonian(w),
            e.total(),
            e.kinetic,
            e.pressure,
            e.quantum,
            st.rho.min(),
        ];
        csv.push_str(&row(&vals));
        csv.push('\n');
        Ok(())
    };
    record(&w)?;
    for i in 1..=cfg.outputs {
        let t_end = cfg.t_final * i as f64 / cfg.outputs as f64;
        let (dt, n) = substeps(t_end - w.time, nls_cap(cfg, &w))?;
        for _ in 0..n {
            w = nls_step(&w, dt)?;
        }
        w.time = t_end;
        madelung(&w).check_vacuum()?;
        record(&w)?;
    }
    fs::write(out.join("qhd.csv"), csv)?;
    checkpoint(&out.join("qhd_final.snap"), &w)
}

pub fn run_euler(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let mut e = euler_state(cfg.euler_velocity()?, 0.0)?;
    let mut csv = String::from("t,kinetic_energy,relative_divergence,max_velocity\n");
    let mut record = |e: &lowmach_core::solvers::EulerState| {
        let rd = if e.v.max_abs() == 0.0 {
            0.0
        } else {
            e.relative_divergence()
        };
        csv.push_str(&row(&[e.time, e.kinetic_energy(), rd, e.v.max_abs()]));
        csv.push('\n');
    };
    record(&e);
    for i in 1..=cfg.outputs {
        let t_end = cfg.t_final * i as f64 / cfg.outputs as f64;
        let mut cap = euler_cfl_dt(&e.v, DEFAULT_CFL);
        if let Some(dt) = cfg.dt_override {
            cap = cap.min(dt);
        }
        if cap.is_infinite() {
            cap = t_end - e.time;
        }
        let (dt, n) = substeps(t_end - e.time, cap)?;
        for _ in 0..n {
            e = euler_step(&e, dt)?;
        }
        e.time = t_end;
        record(&e);
    }
    fs::write(out.join("euler.csv"), csv)?;
    Ok(())
}

pub fn run_limit(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let spec = cfg.initial_spec(cfg.eps_list[0])?;
    let (_, mut e, v0) = build_initial_data(&spec)?;
    let forms = ResonantForms::new(*spec.grid(), cfg.gamma, cfg.psi_normalization)?;
    fs::write(out.join("resonant_triples.csv"), forms.set().to_csv())?;
    let mut x = profile_modes(&v0);
    let mut csv = String::from("t,V_norm,V_H1,v_kinetic\n");
    let mut record = |t: f64, x: &lowmach_core::acoustic::AcousticModes, ke: f64| {
        csv.push_str(&row(&[t, x.sobolev_norm(0.0), x.sobolev_norm(1.0), ke]));
        csv.push('\n');
    };
    record(0.0, &x, e.kinetic_energy());
    for i in 1..=cfg.outputs {
        let t_end = cfg.t_final * i as f64 / cfg.outputs as f64;
        let mut cap = euler_cfl_dt(&e.v, DEFAULT_CFL).min(limit_max_dt(&forms, &e.v, &x));
        if let Some(dt) = cfg.dt_override {
            cap = cap.min(dt);
        }
        if cap.is_infinite() {
            cap = t_end - e.time;
        }
        let (dt, n) = substeps(t_end - e.time, cap)?;
        for _ in 0..n {
            x = limit_step_modes(&x, &e.v, dt, &forms)?;
            e = euler_step(&e, dt)?;
        }
        e.time = t_end;
        if !x.to_pair().is_finite() {
            return Err(Failure::Numerical(format!(
                "non-finite oscillation profile at t = {t_end}"
            )));
        }
        record(t_end, &x, e.kinetic_energy());
    }
    fs::write(out.join("limit.csv"), csv)?;
    Ok(())
}

pub fn run_filter(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let eps = cfg.eps_list[0];
    let (mut w, _, _) = build_initial_data(&cfg.initial_spec(eps)?)?;
    let mut rows = vec![FilterRow::from_state(
        &madelung(&w),
        eps,
        cfg.gamma,
        cfg.psi_normalization,
        cfg.sobolev_s,
    )?];
    for i in 1..=cfg.outputs {
        let t_end = cfg.t_final * i as f64 / cfg.outputs as f64;
        let (dt, n) = substeps(t_end - w.time, nls_cap(cfg, &w))?;
        for _ in 0..n {
            w = nls_step(&w, dt)?;
        }
        w.time = t_end;
        let st = madelung(&w);
        rows.push(FilterRow::from_state(
            &st,
            eps,
            cfg.gamma,
            cfg.psi_normalization,
            cfg.sobolev_s,
        )?);
    }
    fs::write(out.join("filter.csv"), filter_csv(&rows))?;
    Ok(())
}

pub fn run_entropy(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let run = run_pipeline(&cfg.pipeline(cfg.eps_list[0])?)?;
    fs::write(out.join("trace.csv"), run.trace.to_csv())?;
    checkpoint(&out.join("qhd_final.snap"), &run.wave)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    match sweep(&cfg.sweep()?) {
        Ok((report, runs)) => {
            for run in &runs {
                let dir = eps_dir(&out, run.trace.eps);
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("trace.csv"), run.trace.to_csv())?;
            }
            fs::write(out.join("report.csv"), report.to_csv())?;
            if !report.is_monotone() {
                return Err(Failure::Property(
                    "sup_t (H - floor) is not strictly decreasing in eps".into(),
                ));
            }
            Ok(())
        }
        Err(f) => {
            fs::write(out.join("report.csv"), f.partial.to_csv())?;
            Err(Failure::from(f.error))
        }
    }
}

pub fn run_plot(cfg: &RunConfig, input: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(input)?;
    let svg = plot::render(&text)?;
    fs::create_dir_all(&cfg.out)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    fs::write(cfg.out.join(format!("{stem}.svg")), svg)?;
    Ok(())
}

/// One line of the property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn pair(g: TorusGrid, seed: u64) -> AcousticPair {
    AcousticPair::new(
        random_scalar(g, 1.5, seed),
        random_gradient(g, 1.5, seed + 1),
    )
    .expect("mean-zero")
}

/// Quick versions of the invariants, on small grids seeded by `cfg.seed`,
/// plus a short run of the configured initial data.
pub fn property_suite(cfg: &RunConfig) -> Result<Vec<Check>, Failure> {
    let seed = cfg.seed.wrapping_mul(1000);
    let mut out = Vec::new();

    let (mut iso, mut law) = (0.0f64, 0.0f64);
    for dim in [1, 2] {
        let g = TorusGrid::new(dim, 32)?;
        for i in 0..3 {
            let u = pair(g, seed + 10 * i + dim as u64);
            for s in [0.0, 1.0, 2.0] {
                iso = iso.max(rel(
                    apply_group(&u, 0.37).sobolev_norm(s),
                    u.sobolev_norm(s),
                ));
            }
            let two = apply_group(&apply_group(&u, 0.37), -2.2);
            law = law.max(two.sub(&apply_group(&u, 0.37 - 2.2))?.l2_norm() / u.l2_norm());
        }
    }
    out.push(Check {
        name: "group_isometry",
        value: iso,
        tolerance: 1e-11,
    });
    out.push(Check {
        name: "group_law",
        value: law,
        tolerance: 1e-11,
    });

    let mut orth = 0.0f64;
    for (dim, n) in [(1, 32), (2, 16)] {
        let g = TorusGrid::new(dim, n)?;
        let forms = ResonantForms::new(g, cfg.gamma, cfg.psi_normalization)?;
        let v = if dim == 1 {
            lowmach_core::spectral::VectorField::constant(g, &[0.7])?
        } else {
            random_solenoidal(g, 1.5, seed + 5)
        };
        let r = orthogonality_report(
            &forms,
            &v,
            &pair(g, seed + 6),
            &pair(g, seed + 7),
            &pair(g, seed + 8),
        )?;
        orth = orth.max(r.max_relative());
    }
    out.push(Check {
        name: "orthogonality",
        value: orth,
        tolerance: 1e-10,
    });

    let mut disagree = 0.0;
    for a in 0..=50i64 {
        for b in 0..=50i64 {
            for c in 0..=100i64 {
                for signs in [[1i8, 1, 1], [1, -1, 1], [-1, 1, 1], [1, -1, -1]] {
                    let f = signs[0] as f64 * (a as f64).sqrt()
                        + signs[1] as f64 * (b as f64).sqrt()
                        - signs[2] as f64 * (c as f64).sqrt();
                    let float = f.abs() < 1e-9;
                    if float != is_resonant(a, b, c, signs)? {
                        disagree += 1.0;
                    }
                }
            }
        }
    }
    out.push(Check {
        name: "resonance_exactness",
        value: disagree,
        tolerance: 0.0,
    });

    let g = TorusGrid::new(2, 32)?;
    let params = QhdParams::new(0.2, cfg.gamma)?;
    let mut w = WaveFunction::new(
        ComplexField::from_fn(g, |x| {
            Complex64::from_polar(1.0 + 0.1 * x[0].cos() * x[1].sin(), 0.4 * x[1].sin())
        }),
        params,
    );
    let mut mass = 0.0f64;
    for _ in 0..10 {
        let next = nls_step(&w, 2e-3)?;
        mass = mass.max(rel(next.mass(), w.mass()));
        w = next;
    }
    out.push(Check {
        name: "nls_mass_per_step",
        value: mass,
        tolerance: 1e-12,
    });

    let mut e = euler_state(random_solenoidal(g, 2.0, seed + 9), 0.0)?;
    let dt = 0.25 * euler_cfl_dt(&e.v, 1.0);
    for _ in 0..10 {
        e = euler_step(&e, dt)?;
    }
    out.push(Check {
        name: "euler_divergence",
        value: e.relative_divergence(),
        tolerance: 1e-10,
    });

    let g1 = TorusGrid::new(1, 32)?;
    let forms = ResonantForms::new(
        g1,
        cfg.gamma,
        lowmach_core::acoustic::PsiNormalization::Unit,
    )?;
    let zero = euler_state(lowmach_core::spectral::VectorField::zeros(g1), 0.0)?;
    let p0 = pair(g1, seed + 11).scale(0.3);
    let mut x = profile_modes(&lowmach_core::resonance::OscillationProfile::new(p0, 0.0));
    let n0 = x.sobolev_norm(0.0);
    for _ in 0..50 {
        x = limit_step_modes(&x, &zero.v, 0.01, &forms)?;
    }
    out.push(Check {
        name: "limit_norm",
        value: rel(x.sobolev_norm(0.0), n0),
        tolerance: 1e-8,
    });

    let mut branch = 0.0f64;
    for i in 0..=100 {
        let d = 0.5e-4 + 1.5e-4 * i as f64 / 100.0;
        for rho in [1.0 + d, 1.0 - d] {
            branch = branch.max(rel(
                psi_series(rho, 0.1, cfg.gamma),
                psi_exact(rho, 0.1, cfg.gamma),
            ));
        }
    }
    out.push(Check {
        name: "psi_branch_agreement",
        value: branch,
        tolerance: 1e-10,
    });

    let mut p = cfg.pipeline(cfg.eps_list[0])?;
    p.t_final = cfg.t_final.min(0.1);
    p.outputs = cfg.outputs.min(10);
    let run = run_pipeline(&p)?;
    let e0 = run.trace.rows[0].energy;
    let excess = run
        .trace
        .rows
        .iter()
        .map(|r| r.energy / e0 - 1.0)
        .fold(0.0f64, f64::max);
    out.push(Check {
        name: "energy_bound",
        value: excess,
        tolerance: 1e-6,
    });
    let gap = run
        .trace
        .rows
        .iter()
        .map(|r| r.strong_gap - (2.0 * r.entropy).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check {
        name: "strong_gap_bound",
        value: gap,
        tolerance: 0.0,
    });
    let sums = run
        .trace
        .rows
        .iter()
        .map(|r| (r.entropy - r.parts().total()).abs() / r.entropy.max(1e-300))
        .fold(0.0f64, f64::max);
    out.push(Check {
        name: "entropy_components",
        value: sums,
        tolerance: 1e-12,
    });
    Ok(out)
}

pub fn run_check(cfg: &RunConfig) -> Result<(), Failure> {
    let out = prepare(cfg)?;
    let checks = property_suite(cfg)?;
    let mut csv = String::from("property,passed,value,tolerance\n");
    for c in &checks {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            c.name,
            c.passed(),
            lowmach_core::csv::num(c.value),
            c.tolerance
        ));
        println!(
            "{:<22} {}  {:e} (tol {:e})",
            c.name,
            if c.passed() { "ok  " } else { "FAIL" },
            c.value,
            c.tolerance
        );
    }
    fs::write(out.join("check.csv"), csv)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(failed.join(", ")))
    }
}

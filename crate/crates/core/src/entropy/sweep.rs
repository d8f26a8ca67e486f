//! Mach-number sweeps and the Gronwall-form fit of each entropy trace.

use std::fmt;

use rayon::prelude::*;

use super::trace::{run_pipeline, EntropyTrace, PipelineConfig, RunOutput};
use crate::error::{Error, Result};

/// `H(t) ≈ C·H(0) + M∫₀ᵗH + r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallFit {
    pub c: f64,
    pub m: f64,
    pub r: f64,
}

/// Least-squares fit of `H ≈ a + M·I(t)` with `M ≥ 0` and `I` the trapezoid
/// integral of `H`; `C = a/H(0)` (clamped at 0, or 1 when `H(0)` vanishes)
/// and `r` is the smallest nonnegative slack making the bound hold at every sample.
pub fn gronwall_fit(times: &[f64], h: &[f64]) -> Result<GronwallFit> {
    if times.len() != h.len() || times.is_empty() {
        return Err(Error::Arity(format!(
            "{} times for {} values",
            times.len(),
            h.len()
        )));
    }
    let mut integral = vec![0.0; h.len()];
    for i in 1..h.len() {
        integral[i] = integral[i - 1] + 0.5 * (times[i] - times[i - 1]) * (h[i] + h[i - 1]);
    }
    let n = h.len() as f64;
    let mi = integral.iter().sum::<f64>() / n;
    let mh = h.iter().sum::<f64>() / n;
    let sxx: f64 = integral.iter().map(|x| (x - mi).powi(2)).sum();
    let sxy: f64 = integral
        .iter()
        .zip(h)
        .map(|(x, y)| (x - mi) * (y - mh))
        .sum();
    let mut m = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    if m < 0.0 {
        m = 0.0;
    }
    let a = mh - m * mi;
    let h0 = h[0];
    let scale = h.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let c = if h0.abs() <= 1e-14 * scale || h0 == 0.0 {
        1.0
    } else {
        (a / h0).max(0.0)
    };
    let r = h
        .iter()
        .zip(&integral)
        .map(|(y, x)| y - c * h0 - m * x)
        .fold(0.0f64, f64::max);
    Ok(GronwallFit { c, m, r })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub eps: f64,
    pub sup_entropy: f64,
    /// `sup_t (H − ½‖∇√ρ‖²)`.
    pub sup_entropy_minus_floor: f64,
    pub sup_strong_gap: f64,
    /// `sup_t` of each weak gap.
    pub sup_weak_gap: Vec<f64>,
    /// Log-log slope of `sup_entropy_minus_floor` against the previous row.
    pub fitted_rate: f64,
    pub fit: GronwallFit,
}

impl ReportRow {
    pub fn from_trace(trace: &EntropyTrace) -> Result<Self> {
        let sup = |f: &dyn Fn(&super::trace::TraceRow) -> f64| {
            trace.rows.iter().map(f).fold(0.0f64, f64::max)
        };
        let m = trace.test_count();
        let sup_weak_gap = (0..m).map(|j| sup(&|r| r.weak_gap[j])).collect();
        Ok(Self {
            eps: trace.eps,
            sup_entropy: sup(&|r| r.entropy),
            sup_entropy_minus_floor: sup(&|r| r.entropy - r.comp_quantum),
            sup_strong_gap: sup(&|r| r.strong_gap),
            sup_weak_gap,
            fitted_rate: f64::NAN,
            fit: gronwall_fit(&trace.times(), &trace.entropy())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: &str =
    "eps,sup_H,sup_H_minus_floor,sup_strong_gap,fitted_rate,C_fit,M_fit";

impl ConvergenceReport {
    pub fn eps_list(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.eps).collect()
    }

    fn fill_rates(&mut self) {
        for i in 1..self.rows.len() {
            let (a, b) = (&self.rows[i - 1], &self.rows[i]);
            let rate =
                (a.sup_entropy_minus_floor / b.sup_entropy_minus_floor).ln() / (a.eps / b.eps).ln();
            self.rows[i].fitted_rate = rate;
        }
    }

    /// `sup_t (H − floor)` strictly decreasing along the sweep.
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_entropy_minus_floor < w[0].sup_entropy_minus_floor)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&crate::csv::row(&[
                r.eps,
                r.sup_entropy,
                r.sup_entropy_minus_floor,
                r.sup_strong_gap,
                r.fitted_rate,
                r.fit.c,
                r.fit.m,
            ]));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Template run; its Mach number is replaced by each entry of `eps_list`.
    pub base: PipelineConfig,
    pub eps_list: Vec<f64>,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::InvalidArgument("empty Mach number list".into()));
        }
        if self.eps_list.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidArgument(
                "Mach numbers must lie in (0, 1]".into(),
            ));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument(
                "Mach numbers must be strictly decreasing".into(),
            ));
        }
        Ok(())
    }

    pub fn run_config(&self, eps: f64) -> PipelineConfig {
        let mut cfg = self.base.clone();
        cfg.initial.eps = eps;
        cfg
    }
}

/// A failed sweep with every row completed before the first failure.
#[derive(Debug)]
pub struct SweepFailure {
    pub partial: ConvergenceReport,
    pub eps: f64,
    pub error: Error,
}

impl fmt::Display for SweepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run at eps = {} failed: {}", self.eps, self.error)
    }
}

impl std::error::Error for SweepFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs every Mach number on a bounded pool and reduces the traces in order.
pub fn sweep(
    cfg: &SweepConfig,
) -> std::result::Result<(ConvergenceReport, Vec<RunOutput>), SweepFailure> {
    if let Err(error) = cfg.validate() {
        return Err(SweepFailure {
            partial: ConvergenceReport::default(),
            eps: f64::NAN,
            error,
        });
    }
    let job = || -> Vec<Result<RunOutput>> {
        cfg.eps_list
            .par_iter()
            .map(|&eps| run_pipeline(&cfg.run_config(eps)))
            .collect()
    };
    let results = if cfg.workers == 0 {
        job()
    } else {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
        {
            Ok(pool) => pool.install(job),
            Err(e) => {
                let error = Error::InvalidArgument(format!("worker pool: {e}"));
                return Err(SweepFailure {
                    partial: ConvergenceReport::default(),
                    eps: f64::NAN,
                    error,
                });
            }
        }
    };
    let mut report = ConvergenceReport::default();
    let mut outputs = Vec::new();
    for (res, &eps) in results.into_iter().zip(&cfg.eps_list) {
        match res.and_then(|out| ReportRow::from_trace(&out.trace).map(|row| (row, out))) {
            Ok((row, out)) => {
                report.rows.push(row);
                outputs.push(out);
            }
            Err(error) => {
                report.fill_rates();
                return Err(SweepFailure {
                    partial: report,
                    eps,
                    error,
                });
            }
        }
    }
    report.fill_rates();
    Ok((report, outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::PsiNormalization;
    use crate::solvers::initial::Preset;
    use crate::spectral::TorusGrid;

    fn base() -> PipelineConfig {
        let g = TorusGrid::new(1, 32).unwrap();
        let mut cfg = PipelineConfig::new(
            Preset::SingleMode.spec(g, 0.2, 2.0, PsiNormalization::Unit),
            0.05,
        );
        cfg.outputs = 4;
        cfg
    }

    #[test]
    fn fit_recovers_exponential_growth() {
        let t: Vec<f64> = (0..=200).map(|i| i as f64 * 0.005).collect();
        let h: Vec<f64> = t.iter().map(|t| 0.3 * (2.0 * t).exp()).collect();
        let f = gronwall_fit(&t, &h).unwrap();
        assert!((f.m - 2.0).abs() < 1e-3, "{f:?}");
        assert!((f.c - 1.0).abs() < 1e-3);
        assert!(f.r >= 0.0 && f.r < 1e-4);
    }

    #[test]
    fn fit_of_zero_trace() {
        let f = gronwall_fit(&[0.0, 1.0, 2.0], &[0.0; 3]).unwrap();
        assert_eq!(
            f,
            GronwallFit {
                c: 1.0,
                m: 0.0,
                r: 0.0
            }
        );
        assert!(gronwall_fit(&[0.0], &[]).is_err());
    }

    #[test]
    fn single_eps_matches_standalone_run() {
        let cfg = SweepConfig {
            base: base(),
            eps_list: vec![0.2],
            workers: 1,
        };
        let (report, outs) = sweep(&cfg).unwrap();
        let alone = run_pipeline(&cfg.run_config(0.2)).unwrap();
        assert_eq!(outs[0].trace, alone.trace);
        let row = ReportRow::from_trace(&alone.trace).unwrap();
        assert_eq!(
            report.to_csv(),
            ConvergenceReport { rows: vec![row] }.to_csv()
        );
        assert_eq!(report.to_csv().lines().count(), 2);
    }

    #[test]
    fn parallel_equals_serial() {
        let a = sweep(&SweepConfig {
            base: base(),
            eps_list: vec![0.2, 0.1],
            workers: 1,
        })
        .unwrap()
        .0;
        let b = sweep(&SweepConfig {
            base: base(),
            eps_list: vec![0.2, 0.1],
            workers: 2,
        })
        .unwrap()
        .0;
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.rows[1].fitted_rate.is_finite());
        assert!(a.rows[0].fitted_rate.is_nan());
    }

    #[test]
    fn invalid_lists_rejected() {
        for list in [vec![], vec![0.1, 0.2], vec![1.5], vec![0.1, 0.1]] {
            let f = sweep(&SweepConfig {
                base: base(),
                eps_list: list,
                workers: 1,
            })
            .unwrap_err();
            assert!(f.partial.rows.is_empty());
        }
    }

    #[test]
    fn failure_reports_the_failing_run() {
        let mut cfg = SweepConfig {
            base: base(),
            eps_list: vec![0.5, 0.2],
            workers: 1,
        };
        cfg.base.initial.sigma0 =
            crate::spectral::ScalarField::from_fn(*cfg.base.grid(), |x| 5.0 * x[0].cos());
        let f = sweep(&cfg).unwrap_err();
        assert!(matches!(f.error, Error::Vacuum { .. }));
        assert_eq!(f.eps, 0.5);
        assert!(f.partial.rows.is_empty());
        cfg.eps_list = vec![0.2, 0.1];
        assert_eq!(sweep(&cfg).unwrap().0.rows.len(), 2);
    }
}

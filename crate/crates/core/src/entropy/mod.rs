//! Energy, relative entropy and convergence diagnostics.

pub mod functionals;
pub mod relative;
pub mod sweep;
pub mod trace;

pub use functionals::{
    density_fluctuation, energy, renormalized_pressure, EnergyParts, PsiNormalization,
};
pub use relative::{
    convergence_metrics, default_test_fields, relative_entropy, ConvergenceMetrics, EntropyParts,
    TestField,
};
pub use sweep::{
    gronwall_fit, sweep, ConvergenceReport, GronwallFit, ReportRow, SweepConfig, SweepFailure,
};
pub use trace::{run_pipeline, EntropyTrace, PipelineConfig, RunOutput, TraceRow};

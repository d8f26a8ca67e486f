//! Resonant triples of the acoustic group and the averaged bilinear forms.

pub mod forms;
pub mod triples;

pub use forms::{
    orthogonality_report, time_average_oracle, FormArgs, OrthogonalityReport, OscillationProfile,
    ResonantForms,
};
pub use triples::{is_resonant, resonant_set, ResonantSet, ResonantTriple};

//! Data ingestion and generation: pipe-separated clinical records, simple
//! imputation, cohort splitting, and synthetic reward streams.

mod impute;
mod psv;
mod split;
mod synth;

pub use impute::impute;
pub use psv::{parse_psv, serialize_psv, Cohort, DataError, PatientRecord, SEPSIS_LABEL_COLUMN};
pub use split::{split_cohort, SplitCounts};
pub use synth::{
    synth_experiment_stream, synth_stream, ContextDist, NoiseSpec, SynthRound, SynthSpec,
};

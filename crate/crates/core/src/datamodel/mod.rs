//! Business records, feature engineering, design matrices and sampling.

mod design;
mod features;
mod formula;
mod frame;
mod record;
mod sample;

pub use design::{build_design, Dataset, Equation};
pub use features::{compute_risk_features, compute_risk_features_opts, RiskFeatures};
pub use formula::{Formula, Term};
pub use frame::Frame;
pub use record::{
    load_csv, write_records_csv, BusinessRecord, CsvSchema, IngestReport, SkipReason, SkippedRow,
};
pub use sample::sample_controls;

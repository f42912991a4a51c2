//! Voyage data: CSV exchange, steady-state filtering and synthetic voyages.

mod csv_io;
mod filter;
mod synthetic;

pub use csv_io::{
    emit_csv, ingest_csv, read_csv, write_csv, Ingested, Rejection, RejectionReport,
    OPTIONAL_COLUMNS, REQUIRED_COLUMNS, VOYAGE_SCHEMA,
};
pub use filter::{
    calm_weather_subset, filter_steady_state, FilterCounts, FilterOutcome, FilterPolicy,
};
pub use synthetic::{
    generate, reference_truth, reference_vessel, NoiseModel, Sampling, SyntheticScenario,
    WindScenario, SCENARIO_SCHEMA,
};

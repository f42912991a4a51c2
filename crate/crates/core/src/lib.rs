//! Ship speed–power modelling.
//!
//! The crate covers the classical route (calm-water breakpoint regression
//! plus added resistance from wind and waves) and a small feedforward
//! network trained on in-service data, together with the data handling and
//! evaluation needed to compare them.
//!
//! Internally everything is SI with angles in radians. Conversions to
//! knots, degrees and kilowatts happen at the CSV boundary in [`data`].

// `!(x > 0.0)` is used deliberately throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calmwater;
pub mod correction;
pub mod data;
pub mod domain;
pub mod error;
pub mod eval;
pub mod mlmodel;
pub mod units;
pub mod waves;
pub mod wind;

pub use calmwater::{CalmPoint, CalmWaterModel};
pub use domain::{
    brake_power, power_to_resistance, total_resistance, EnvironmentState, LoadingCondition,
    ResistanceBreakdown, VesselParticulars, VoyageRecord,
};
pub use error::{Error, Result};
pub use waves::{TheoryRegistry, ValidityMode, WaveTheory};
pub use wind::{WindCoefficientTable, WindSetup};

//! Added resistance in waves: closed-form estimates and spectral
//! integration of response functions.

mod empirical;
mod form_factor;
mod quadrature;
mod response;
mod spectrum;
mod theory;

pub use empirical::{
    kreitner, kreitner_directional, stawave1, within_head_sector, HEAD_SECTOR_LIMIT,
};
pub use form_factor::{
    default_bow_entrance_angle, form_factor_fixed, form_factor_original, shape_fixed,
    shape_original,
};
pub use quadrature::{integrate, QuadratureConfig, QuadratureResult};
pub use response::{
    mean_added_resistance, ConstantResponse, FnResponse, IntegrationSettings, ParametricResponse,
    ResponseComponents, ResponseFunction, SpectralIntegral, SpectralWindow, EXAMPLE_RAWRF,
    RAWRF_CONSTANTS, RAWRF_SCHEMA,
};
pub use spectrum::{pm_spectrum, WaveSpectrum};
pub use theory::{
    evaluate_theory, polar_sweep, Kreitner, KreitnerDirectional, PolarPoint, SpectralTheory,
    StaWave1, TheoryRegistry, TheoryValue, Validity, ValidityMode, WaveTheory,
};

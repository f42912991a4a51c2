//! Unit conversions applied at I/O boundaries. Everything inside the crate is SI
//! with angles in radians.

use std::f64::consts::{PI, TAU};

pub const GRAVITY: f64 = 9.81;
pub const SEA_WATER_DENSITY: f64 = 1025.0;
pub const AIR_DENSITY: f64 = 1.225;

const METERS_PER_NAUTICAL_MILE: f64 = 1852.0;
const SECONDS_PER_HOUR: f64 = 3600.0;

pub fn knots_to_ms(knots: f64) -> f64 {
    knots * METERS_PER_NAUTICAL_MILE / SECONDS_PER_HOUR
}

pub fn ms_to_knots(ms: f64) -> f64 {
    ms * SECONDS_PER_HOUR / METERS_PER_NAUTICAL_MILE
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Folds an angle onto `[0, π]` using port/starboard symmetry.
pub fn fold_to_pi(angle: f64) -> f64 {
    let a = wrap_two_pi(angle);
    if a > PI {
        TAU - a
    } else {
        a
    }
}

/// Smallest signed difference `b - a` between two headings, in `(-π, π]`.
pub fn heading_difference(a: f64, b: f64) -> f64 {
    let d = wrap_two_pi(b - a);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

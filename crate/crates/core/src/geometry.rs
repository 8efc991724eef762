//! Primitives on the hyperbolic disk of curvature -1.
//!
//! Points live in a disk of radius `R` in native polar coordinates. The
//! distance between two points satisfies
//!
//! ```text
//! cosh(d) = cosh(r1) cosh(r2) - sinh(r1) sinh(r2) cos(dphi)
//! ```
//!
//! and two points are adjacent in the threshold graph model iff `d <= R`.
//! For fixed radii the adjacency condition is an angular window, computed by
//! [`theta_threshold`]. Radial positions are distributed with density
//! `alpha * sinh(alpha * r)` (normalised), whose ball measure and inverse CDF
//! are exact closed forms.
//!
//! All functions clamp inverse-trig arguments into their domains so that
//! floating-point rounding near boundaries never produces NaN, and switch to
//! log-space evaluation when `cosh`/`sinh` would overflow (arguments beyond
//! roughly 700).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("radial coordinate must be positive, got r1={r1}, r2={r2}")]
    NonPositiveRadius { r1: f64, r2: f64 },
    #[error("radius {r} outside the disk [0, {radius}]")]
    OutsideDisk { r: f64, radius: f64 },
    #[error("alpha must lie in (1/2, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("disk radius must be positive, got {0}")]
    NonPositiveDiskRadius(f64),
}

/// A point of the hyperbolic disk in native polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    /// Radial coordinate, in hyperbolic length units (non-negative).
    pub r: f64,
    /// Angular coordinate in `[0, 2*pi)`.
    pub phi: f64,
}

impl PolarPoint {
    /// Creates a point, normalising the angle into `[0, 2*pi)`.
    pub fn new(r: f64, phi: f64) -> Self {
        debug_assert!(r >= 0.0, "negative radius {r}");
        PolarPoint {
            r,
            phi: normalize_angle(phi),
        }
    }
}

/// Wraps an angle into `[0, 2*pi)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi % TAU;
    if a < 0.0 {
        a += TAU;
    }
    a
}

/// Absolute angular difference wrapped into `[0, pi]`.
pub fn angle_between(phi1: f64, phi2: f64) -> f64 {
    let d = (phi1 - phi2).abs() % TAU;
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// Disk radius plus the radial density parameter `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub radius: f64,
    pub alpha: f64,
}

impl DiskSpec {
    pub fn new(radius: f64, alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(GeometryError::AlphaOutOfRange(alpha));
        }
        if radius <= 0.0 || radius.is_nan() {
            return Err(GeometryError::NonPositiveDiskRadius(radius));
        }
        Ok(DiskSpec { radius, alpha })
    }
}

/// `ln(sinh(x))` for `x > 0`, stable for large `x`.
fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 350.0 {
        x.sinh().ln()
    } else {
        // sinh(x) = e^x (1 - e^{-2x}) / 2
        x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p()
    }
}

/// `ln(cosh(x))` for `x >= 0`, stable for large `x`.
fn ln_cosh(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 350.0 {
        x.cosh().ln()
    } else {
        x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p()
    }
}

/// `cosh` of the distance between two points, clamped to `>= 1`.
///
/// This is the quantity both the fast and the brute-force edge builders
/// compare against `cosh(R)`, so the two adjacency predicates are identical
/// bit for bit. Only safe for `r1 + r2` small enough that `cosh` does not
/// overflow; the disk radii used by the graph model stay far below that.
#[inline]
pub fn cosh_distance(a: PolarPoint, b: PolarPoint) -> f64 {
    let v = a.r.cosh() * b.r.cosh() - a.r.sinh() * b.r.sinh() * angle_between(a.phi, b.phi).cos();
    v.max(1.0)
}

/// Hyperbolic distance between two points.
pub fn hyperbolic_distance(a: PolarPoint, b: PolarPoint) -> f64 {
    if a.r + b.r < 700.0 {
        return cosh_distance(a, b).acosh();
    }
    // log-space via the cancellation-free identity
    // cosh(d) = cosh(r1 - r2) + sinh(r1) sinh(r2) (1 - cos dphi)
    let dr = (a.r - b.r).abs();
    let half_sin = (angle_between(a.phi, b.phi) / 2.0).sin();
    if half_sin == 0.0 || a.r == 0.0 || b.r == 0.0 {
        return dr;
    }
    // 1 - cos = 2 sin^2(dphi / 2)
    let ln_cross = ln_sinh(a.r) + ln_sinh(b.r) + std::f64::consts::LN_2 + 2.0 * half_sin.ln();
    let ln_cosh_dr = ln_cosh(dr);
    let (hi, lo) = if ln_cross >= ln_cosh_dr {
        (ln_cross, ln_cosh_dr)
    } else {
        (ln_cosh_dr, ln_cross)
    };
    let ln_cosh_d = hi + (lo - hi).exp().ln_1p();
    if ln_cosh_d > 40.0 {
        // acosh(y) = ln(2y) - O(1/y^2)
        ln_cosh_d + std::f64::consts::LN_2
    } else {
        ln_cosh_d.exp().acosh()
    }
}

/// Largest angular difference at which points of radii `r1`, `r2` are still
/// within hyperbolic distance `radius` of each other.
///
/// When `r1 + r2 <= radius` the pair is within distance at every angle, and
/// the function returns `pi`. The result is monotonically non-increasing in
/// each radial argument.
pub fn theta_threshold(r1: f64, r2: f64, radius: f64) -> Result<f64, GeometryError> {
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(GeometryError::NonPositiveRadius { r1, r2 });
    }
    if r1 + r2 <= radius {
        return Ok(PI);
    }
    let arg = if r1 + r2 < 700.0 && radius < 700.0 {
        (r1.cosh() * r2.cosh() - radius.cosh()) / (r1.sinh() * r2.sinh())
    } else {
        // coth(r1) coth(r2) - cosh(R) / (sinh(r1) sinh(r2)), all in log space
        let cross = (ln_cosh(radius) - ln_sinh(r1) - ln_sinh(r2)).exp();
        1.0 / (r1.tanh() * r2.tanh()) - cross
    };
    Ok(arg.clamp(-1.0, 1.0).acos())
}

/// Probability mass of the ball of radius `r` around the origin,
/// `(cosh(alpha r) - 1) / (cosh(alpha R) - 1)`, computed through
/// `cosh(x) - 1 = 2 sinh^2(x/2)` so it stays finite for any disk size.
///
/// Exact at the boundaries: `0` at `r = 0` and `1` at `r = R`.
pub fn ball_measure_origin(r: f64, spec: &DiskSpec) -> Result<f64, GeometryError> {
    if !(0.0..=spec.radius).contains(&r) {
        return Err(GeometryError::OutsideDisk {
            r,
            radius: spec.radius,
        });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    if r == spec.radius {
        return Ok(1.0);
    }
    let a = spec.alpha * r / 2.0;
    let b = spec.alpha * spec.radius / 2.0;
    Ok((2.0 * (ln_sinh(a) - ln_sinh(b))).exp())
}

/// Inverse radial CDF: maps a uniform variate `u` in `[0, 1)` to the radius
/// `arcosh(1 + u (cosh(alpha R) - 1)) / alpha` in `[0, R)`.
pub fn sample_radius(u: f64, spec: &DiskSpec) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    if u == 0.0 {
        return 0.0;
    }
    let b = spec.alpha * spec.radius / 2.0;
    // z := u (cosh(alpha R) - 1) = u * 2 sinh^2(alpha R / 2)
    let ln_z = u.ln() + std::f64::consts::LN_2 + 2.0 * ln_sinh(b);
    let r = if ln_z > 40.0 {
        // arcosh(1 + z) = ln(2z) + O(1/z)
        (ln_z + std::f64::consts::LN_2) / spec.alpha
    } else {
        (1.0 + ln_z.exp()).acosh() / spec.alpha
    };
    r.min(spec.radius)
}

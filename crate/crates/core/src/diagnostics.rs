//! Boundary-behaviour profiles of a disc:
//! `dist(f(zeta), boundary) / (1 - |zeta|)` and
//! `|f'(zeta)| (1 - |zeta|) / dist(f(zeta), boundary)^(1/2)`.
//!
//! Both stay bounded for extremal discs of smooth strongly convex bodies.
//! Values are reported, not judged.

use crate::disc::DiscPoly;
use crate::error::{Error, Result};
use crate::gauge::ConvexBody;
use crate::{norm, C};
use serde::{Deserialize, Serialize};

/// Radii and angles of the sample grid.
#[derive(Debug, Clone)]
pub struct ProfileGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        ProfileGrid { radii: vec![0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98, 0.99], angles: 64 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProfileSample {
    pub radius: f64,
    pub angle: f64,
    pub dist: f64,
    pub profile1: f64,
    pub profile2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileReport {
    pub body: String,
    pub smooth: bool,
    pub degenerate: bool,
    pub max_profile1: f64,
    pub min_profile1: f64,
    pub max_profile2: f64,
    /// Samples whose image is on or outside the boundary and were skipped.
    pub skipped: usize,
    pub samples: Vec<ProfileSample>,
}

/// Profiles of `f` over the radial grid.
pub fn boundary_profiles(body: &ConvexBody, f: &DiscPoly, grid: &ProfileGrid) -> Result<ProfileReport> {
    if f.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: f.dim() });
    }
    if grid.radii.iter().any(|r| !(0.0..1.0).contains(r)) || grid.angles == 0 {
        return Err(Error::InvalidArgument("profile radii must lie in [0, 1)".into()));
    }
    let df = f.derivative();
    let degenerate = df.max_abs_coeff() == 0.0;
    let mut samples = Vec::new();
    let mut skipped = 0;
    for &r in &grid.radii {
        let count = if r == 0.0 { 1 } else { grid.angles };
        for k in 0..count {
            let angle = std::f64::consts::TAU * k as f64 / count as f64;
            let zeta = C::from_polar(r, angle);
            if degenerate {
                samples.push(ProfileSample { radius: r, angle, dist: 0.0, profile1: 0.0, profile2: 0.0 });
                continue;
            }
            let z = f.eval(zeta);
            let dist = match body.boundary_distance(&z) {
                Ok(d) if d > 0.0 => d,
                _ => {
                    skipped += 1;
                    continue;
                }
            };
            let speed = norm(&df.eval(zeta));
            samples.push(ProfileSample {
                radius: r,
                angle,
                dist,
                profile1: dist / (1.0 - r),
                profile2: speed * (1.0 - r) / dist.sqrt(),
            });
        }
    }
    let fold = |g: fn(&ProfileSample) -> f64, init: f64, op: fn(f64, f64) -> f64| {
        samples.iter().map(g).fold(init, op)
    };
    let (max1, min1, max2) = if samples.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (
            fold(|s| s.profile1, f64::NEG_INFINITY, f64::max),
            fold(|s| s.profile1, f64::INFINITY, f64::min),
            fold(|s| s.profile2, f64::NEG_INFINITY, f64::max),
        )
    };
    Ok(ProfileReport {
        body: body.kind_name().to_string(),
        smooth: body.is_smooth(),
        degenerate,
        max_profile1: max1,
        min_profile1: min1,
        max_profile2: max2,
        skipped,
        samples,
    })
}

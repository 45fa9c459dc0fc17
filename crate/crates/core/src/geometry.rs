//! Coordinate conventions for a planar RIS lying in the xy-plane and facing +z.
//!
//! Elevation is measured from the +z boresight axis, so an element pattern of
//! `cos(elevation)` peaks at broadside. Azimuth is measured in the xy-plane from
//! +x towards +y and normalized to `[0, 2π)`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ris::RisGeometry;

/// A point or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ORIGIN: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotates the point about the z axis by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Elevation from boresight and azimuth, both in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularDirection {
    pub elevation: f64,
    pub azimuth: f64,
}

impl AngularDirection {
    pub fn new(elevation: f64, azimuth: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&elevation) {
            return Err(Error::Domain(format!(
                "elevation {elevation} outside [0, pi/2]"
            )));
        }
        if !azimuth.is_finite() {
            return Err(Error::Domain(format!("azimuth {azimuth} is not finite")));
        }
        Ok(AngularDirection {
            elevation,
            azimuth: normalize_azimuth(azimuth),
        })
    }
}

pub(crate) fn normalize_azimuth(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldRegionKind {
    Near,
    Far,
}

/// Field-region classification together with the Fraunhofer boundary used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRegion {
    pub kind: FieldRegionKind,
    pub boundary_m: f64,
}

fn direction_of(offset: Vec3) -> Result<(AngularDirection, f64)> {
    if !offset.is_finite() {
        return Err(Error::Domain("non-finite coordinates".into()));
    }
    if offset.z <= 0.0 {
        return Err(Error::BehindRis {
            x: offset.x,
            y: offset.y,
            z: offset.z,
        });
    }
    let r = offset.norm();
    let elevation = (offset.z / r).clamp(-1.0, 1.0).acos();
    let azimuth = normalize_azimuth(offset.y.atan2(offset.x));
    Ok((AngularDirection { elevation, azimuth }, r))
}

/// Direction of `point` as seen from the array center (the origin).
pub fn direction_from_ris_center(point: Vec3) -> Result<AngularDirection> {
    direction_of(point).map(|(d, _)| d)
}

/// Direction and distance from the center of element `(m, n)` to `point`.
pub fn element_angles_and_distance(
    geometry: &RisGeometry,
    m: usize,
    n: usize,
    point: Vec3,
) -> Result<(AngularDirection, f64)> {
    if !geometry.is_active(m, n)? {
        return Err(Error::InactiveElement { m, n });
    }
    if point.z <= 0.0 {
        return Err(Error::BehindRis {
            x: point.x,
            y: point.y,
            z: point.z,
        });
    }
    direction_of(point - geometry.element_center(m, n))
}

/// Fraunhofer distance `2 D² / λ` for the given aperture.
pub fn far_field_boundary(aperture_m: f64, wavelength_m: f64) -> Result<f64> {
    if wavelength_m <= 0.0 || !wavelength_m.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength_m}"
        )));
    }
    Ok(2.0 * aperture_m * aperture_m / wavelength_m)
}

pub fn classify_field_region(
    geometry: &RisGeometry,
    wavelength_m: f64,
    point: Vec3,
) -> Result<FieldRegion> {
    let boundary_m = far_field_boundary(geometry.aperture(), wavelength_m)?;
    let kind = if point.norm() < boundary_m {
        FieldRegionKind::Near
    } else {
        FieldRegionKind::Far
    };
    Ok(FieldRegion { kind, boundary_m })
}

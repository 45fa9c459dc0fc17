use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{classify_field_region, far_field_boundary, FieldRegionKind, Vec3};
use crate::ris::RisGeometry;

pub const DEFAULT_MAX_ATTEMPTS: usize = 1_000_000;

/// Sampling box and field-region requirements for random terminal placement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementConstraints {
    pub min: Vec3,
    pub max: Vec3,
    pub alice_region: FieldRegionKind,
    pub bob_region: FieldRegionKind,
    pub eve_region: FieldRegionKind,
    pub min_separation_m: f64,
    pub max_attempts: usize,
}

impl Default for PlacementConstraints {
    /// 10 m cube in front of the surface, Alice near, Bob and Eve far.
    fn default() -> Self {
        PlacementConstraints {
            min: Vec3::new(-5.0, -5.0, 0.0),
            max: Vec3::new(5.0, 5.0, 10.0),
            alice_region: FieldRegionKind::Near,
            bob_region: FieldRegionKind::Far,
            eve_region: FieldRegionKind::Far,
            min_separation_m: 0.1,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Placement {
    pub alice: Vec3,
    pub bob: Vec3,
    pub eve: Vec3,
}

fn box_distance_range(min: Vec3, max: Vec3) -> (f64, f64) {
    let nearest = |lo: f64, hi: f64| {
        if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            hi
        } else {
            0.0
        }
    };
    let farthest = |lo: f64, hi: f64| if lo.abs() > hi.abs() { lo } else { hi };
    let near = Vec3::new(
        nearest(min.x, max.x),
        nearest(min.y, max.y),
        nearest(min.z, max.z),
    );
    let far = Vec3::new(
        farthest(min.x, max.x),
        farthest(min.y, max.y),
        farthest(min.z, max.z),
    );
    (near.norm(), far.norm())
}

impl PlacementConstraints {
    fn check(&self, boundary: f64) -> Result<()> {
        let ordered = self.min.x < self.max.x && self.min.y < self.max.y && self.min.z < self.max.z;
        if !ordered || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Domain(
                "placement box must have positive extent".into(),
            ));
        }
        if self.max.z <= 0.0 {
            return Err(Error::Placement {
                attempts: 0,
                constraint: "box lies entirely behind the surface".into(),
            });
        }
        let (near, far) = box_distance_range(
            Vec3::new(self.min.x, self.min.y, self.min.z.max(0.0)),
            self.max,
        );
        for (who, region) in [
            ("Alice", self.alice_region),
            ("Bob", self.bob_region),
            ("Eve", self.eve_region),
        ] {
            let feasible = match region {
                FieldRegionKind::Near => near < boundary,
                FieldRegionKind::Far => far >= boundary,
            };
            if !feasible {
                return Err(Error::Placement {
                    attempts: 0,
                    constraint: format!(
                        "{who} must be in the {} field but the box does not reach it (boundary {boundary:.3} m)",
                        region_name(region)
                    ),
                });
            }
        }
        Ok(())
    }
}

fn region_name(kind: FieldRegionKind) -> &'static str {
    match kind {
        FieldRegionKind::Near => "near",
        FieldRegionKind::Far => "far",
    }
}

/// Rejection-samples one placement from `rng`.
pub fn sample_placement_with(
    constraints: &PlacementConstraints,
    geometry: &RisGeometry,
    wavelength_m: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Placement> {
    let boundary = far_field_boundary(geometry.aperture(), wavelength_m)?;
    constraints.check(boundary)?;
    let c = constraints;
    let mut attempts = 0;
    let mut last_failure = String::new();
    let mut chosen: Vec<Vec3> = Vec::with_capacity(3);
    let terminals = [
        ("Alice", c.alice_region),
        ("Bob", c.bob_region),
        ("Eve", c.eve_region),
    ];
    for (who, region) in terminals {
        loop {
            if attempts >= c.max_attempts {
                return Err(Error::Placement {
                    attempts,
                    constraint: last_failure,
                });
            }
            attempts += 1;
            let u: f64 = rng.random();
            let p = Vec3::new(
                rng.random_range(c.min.x..c.max.x),
                rng.random_range(c.min.y..c.max.y),
                c.max.z - u * (c.max.z - c.min.z),
            );
            if p.z <= 0.0 {
                last_failure = format!("{who} must be in front of the surface");
                continue;
            }
            if classify_field_region(geometry, wavelength_m, p)?.kind != region {
                last_failure = format!("{who} must be in the {} field", region_name(region));
                continue;
            }
            if chosen.iter().any(|q| q.distance(p) < c.min_separation_m) {
                last_failure = format!(
                    "{who} must be at least {} m from the other terminals",
                    c.min_separation_m
                );
                continue;
            }
            chosen.push(p);
            break;
        }
    }
    Ok(Placement {
        alice: chosen[0],
        bob: chosen[1],
        eve: chosen[2],
    })
}

pub fn sample_placement(
    constraints: &PlacementConstraints,
    geometry: &RisGeometry,
    wavelength_m: f64,
    seed: u64,
) -> Result<Placement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_placement_with(constraints, geometry, wavelength_m, &mut rng)
}

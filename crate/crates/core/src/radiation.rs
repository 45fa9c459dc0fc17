//! Scattered far-field pattern of a configured surface and its directivity
//! over the front hemisphere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{build_channels, element_pattern, steering_factor, wavenumber, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{direction_from_ris_center, normalize_azimuth, AngularDirection, Vec3};
use crate::ris::{theta_matrix, PhaseTable, RisConfiguration, RisGeometry};

/// Regular elevation × azimuth sampling of the front hemisphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    elevations: Vec<f64>,
    azimuths: Vec<f64>,
    d_el: f64,
    d_az: f64,
}

impl AngularGrid {
    /// Elevation `0..=90°` and azimuth `0..360°` in steps of `step_deg`, which
    /// must divide 90 evenly.
    pub fn uniform(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg <= 90.0) {
            return Err(Error::Domain(format!(
                "grid step must lie in (0, 90] degrees, got {step_deg}"
            )));
        }
        let n_el = (90.0 / step_deg).round();
        if ((n_el * step_deg) - 90.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "grid step {step_deg} does not divide 90 degrees"
            )));
        }
        let n_el = n_el as usize;
        let n_az = 4 * n_el;
        let d = step_deg.to_radians();
        Ok(AngularGrid {
            elevations: (0..=n_el)
                .map(|i| i as f64 * FRAC_PI_2 / n_el as f64)
                .collect(),
            azimuths: (0..n_az).map(|j| j as f64 * TAU / n_az as f64).collect(),
            d_el: d,
            d_az: d,
        })
    }

    pub fn elevations(&self) -> &[f64] {
        &self.elevations
    }

    pub fn azimuths(&self) -> &[f64] {
        &self.azimuths
    }

    pub fn len(&self) -> usize {
        self.elevations.len() * self.azimuths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.azimuths.len() + j
    }

    /// Trapezoid-rule ∫∫ f sinϑ dϑ dφ over the hemisphere for values laid out
    /// elevation-major.
    pub fn hemisphere_integral(&self, values: &[f64]) -> f64 {
        let last = self.elevations.len() - 1;
        self.elevations
            .iter()
            .enumerate()
            .map(|(i, el)| {
                let w = if i == 0 || i == last { 0.5 } else { 1.0 };
                let ring: f64 = values[self.index(i, 0)..self.index(i, 0) + self.azimuths.len()]
                    .iter()
                    .sum();
                w * el.sin() * ring
            })
            .sum::<f64>()
            * self.d_el
            * self.d_az
    }
}

/// Amplitude and phase arriving at each element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Illumination {
    /// Near-field feed from Alice, identical to the Alice-side channel.
    FromAlice,
    /// Unit-amplitude, zero-phase normal incidence.
    PlaneWave,
}

/// Complex field and directivity sampled on an [`AngularGrid`].
#[derive(Debug, Clone)]
pub struct PatternMap {
    grid: AngularGrid,
    field: Vec<Complex64>,
    dbi: Vec<f64>,
}

impl PatternMap {
    pub fn from_field(grid: AngularGrid, field: Vec<Complex64>) -> Result<Self> {
        if field.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: field.len(),
            });
        }
        let dbi = directivity_dbi(&grid, &field)?;
        Ok(PatternMap { grid, field, dbi })
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn field(&self) -> &[Complex64] {
        &self.field
    }

    pub fn dbi(&self) -> &[f64] {
        &self.dbi
    }

    pub fn peak_dbi(&self) -> f64 {
        self.dbi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation of the dBi layer, wrapping in azimuth.
    pub fn gain_at(&self, elevation: f64, azimuth: f64) -> Result<f64> {
        let els = &self.grid.elevations;
        let last = *els.last().expect("non-empty grid");
        if !(0.0..=last).contains(&elevation) || !azimuth.is_finite() {
            return Err(Error::Domain(format!(
                "direction ({elevation}, {azimuth}) lies outside the pattern grid"
            )));
        }
        let fi = (elevation / self.grid.d_el).min((els.len() - 1) as f64);
        let i0 = (fi.floor() as usize).min(els.len() - 1);
        let i1 = (i0 + 1).min(els.len() - 1);
        let ti = fi - i0 as f64;

        let n_az = self.grid.azimuths.len();
        let fj = normalize_azimuth(azimuth) / self.grid.d_az;
        let j0 = (fj.floor() as usize) % n_az;
        let j1 = (j0 + 1) % n_az;
        let tj = fj - fj.floor();

        let mut acc = 0.0;
        for (i, wi) in [(i0, 1.0 - ti), (i1, ti)] {
            for (j, wj) in [(j0, 1.0 - tj), (j1, tj)] {
                let w = wi * wj;
                if w > 0.0 {
                    acc += w * self.dbi[self.grid.index(i, j)];
                }
            }
        }
        Ok(acc)
    }

    pub fn gain_toward(&self, direction: AngularDirection) -> Result<f64> {
        self.gain_at(direction.elevation, direction.azimuth)
    }

    /// Gain toward a point in front of the surface, seen from the array center.
    pub fn gain_toward_point(&self, point: Vec3) -> Result<f64> {
        self.gain_toward(direction_from_ris_center(point)?)
    }

    /// CSV with `theta_deg,phi_deg,E_re,E_im,dbi,dbi_clamped`; the last column
    /// floors negative values at 0 for display.
    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        for (k, v) in metadata {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "theta_deg,phi_deg,E_re,E_im,dbi,dbi_clamped")?;
        for (i, el) in self.grid.elevations.iter().enumerate() {
            for (j, az) in self.grid.azimuths.iter().enumerate() {
                let k = self.grid.index(i, j);
                let e = self.field[k];
                let d = self.dbi[k];
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    round_deg(el.to_degrees()),
                    round_deg(az.to_degrees()),
                    e.re,
                    e.im,
                    d,
                    d.max(0.0)
                )?;
            }
        }
        Ok(())
    }
}

fn round_deg(deg: f64) -> f64 {
    (deg * 1e9).round() / 1e9
}

/// `10 log10(4π|E|² / ∫∫|E|² dΩ)` at every grid point.
pub fn directivity_dbi(grid: &AngularGrid, field: &[Complex64]) -> Result<Vec<f64>> {
    let power: Vec<f64> = field.iter().map(|e| e.norm_sqr()).collect();
    let total = grid.hemisphere_integral(&power);
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(power
        .iter()
        .map(|p| 10.0 * (4.0 * PI * p / total).log10())
        .collect())
}

/// Field radiated by per-element coefficients `c_k` (illumination × reflection)
/// in active-element order.
pub fn field_from_coefficients(
    geometry: &RisGeometry,
    coefficients: &[Complex64],
    k0: f64,
    grid: &AngularGrid,
) -> Result<Vec<Complex64>> {
    let elements = geometry.active_elements();
    if coefficients.len() != elements.len() {
        return Err(Error::Dimension {
            expected: elements.len(),
            got: coefficients.len(),
        });
    }
    let (dx, dy) = geometry.spacing();
    let rows: Vec<Vec<Complex64>> = grid
        .elevations
        .par_iter()
        .map(|&el| {
            let pattern = element_pattern(el).unwrap_or(0.0);
            grid.azimuths
                .iter()
                .map(|&az| {
                    let dir = AngularDirection {
                        elevation: el,
                        azimuth: az,
                    };
                    let sum: Complex64 = elements
                        .iter()
                        .zip(coefficients)
                        .map(|(&(m, n), c)| c * steering_factor(m, n, dir, k0, dx, dy))
                        .sum();
                    sum * pattern
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Scattered field of `config` under the given illumination, with dBi filled in.
pub fn scattered_field(
    geometry: &RisGeometry,
    config: &RisConfiguration,
    table: &PhaseTable,
    scenario: &Scenario,
    illumination: Illumination,
    grid: &AngularGrid,
) -> Result<PatternMap> {
    config.check_geometry(geometry)?;
    let theta = theta_matrix(config, table)?;
    let feed = match illumination {
        Illumination::FromAlice => build_channels(scenario, geometry)?.h,
        Illumination::PlaneWave => vec![Complex64::new(1.0, 0.0); geometry.active_count()],
    };
    let coefficients: Vec<Complex64> = feed
        .iter()
        .zip(theta.diagonal())
        .map(|(a, t)| a * t * scenario.gamma)
        .collect();
    let k0 = wavenumber(scenario.wavelength());
    let field = field_from_coefficients(geometry, &coefficients, k0, grid)?;
    PatternMap::from_field(grid.clone(), field)
}

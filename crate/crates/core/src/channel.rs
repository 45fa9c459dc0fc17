//! Free-space cascaded channels through the RIS, received powers, secrecy
//! capacity and power-unit conversions.
//!
//! Receiver-side coefficients follow the far-field form: the cos pattern and
//! the array steering factor are evaluated at the receiver's direction from the
//! array center, the path-loss magnitude uses each element's own distance, and
//! the carrier phase is referenced to the array-center distance. The steering
//! factor then carries the whole per-element path difference, which keeps the
//! received amplitude identical (up to a common phase and the 1/R taper) to the
//! scattered field evaluated in the receiver's direction.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    direction_from_ris_center, element_angles_and_distance, AngularDirection, Vec3,
};
use crate::ris::{PhaseMatrix, RisGeometry};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_CARRIER_HZ: f64 = 5.2e9;

/// Lower and upper (inclusive) bounds of a 12-bit ADC sample, as `(-2047, 2048]`.
pub const ADC_MIN_EXCLUSIVE: i64 = -2047;
pub const ADC_MAX: i64 = 2048;

pub fn wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

pub fn wavenumber(wavelength_m: f64) -> f64 {
    2.0 * PI / wavelength_m
}

/// Transmitter, receivers and link budget of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub alice: Vec3,
    pub bob: Vec3,
    pub eve: Vec3,
    pub carrier_hz: f64,
    /// Transmit power P_a in watts.
    pub tx_power_w: f64,
    pub noise_bob_w: f64,
    pub noise_eve_w: f64,
    /// Reflection amplitude shared by all elements.
    pub gamma: f64,
}

impl Scenario {
    /// 5.2 GHz, 1 W transmit power, unit reflection and 1e-15 W noise at both receivers.
    pub fn new(alice: Vec3, bob: Vec3, eve: Vec3) -> Self {
        Scenario {
            alice,
            bob,
            eve,
            carrier_hz: DEFAULT_CARRIER_HZ,
            tx_power_w: 1.0,
            noise_bob_w: 1e-15,
            noise_eve_w: 1e-15,
            gamma: 1.0,
        }
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{what} must be positive, got {v}")))
            }
        };
        positive(self.carrier_hz, "carrier frequency")?;
        positive(self.tx_power_w, "transmit power")?;
        positive(self.noise_bob_w, "Bob's noise power")?;
        positive(self.noise_eve_w, "Eve's noise power")?;
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Domain(format!(
                "reflection amplitude must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        for (name, p) in [("Alice", self.alice), ("Bob", self.bob), ("Eve", self.eve)] {
            if !p.is_finite() {
                return Err(Error::Domain(format!("{name}'s position is not finite")));
            }
            if p.z <= 0.0 {
                return Err(Error::BehindRis {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                });
            }
        }
        Ok(())
    }

    /// Exchanges Bob's and Eve's positions and noise powers.
    pub fn swap_receivers(&self) -> Self {
        Scenario {
            bob: self.eve,
            eve: self.bob,
            noise_bob_w: self.noise_eve_w,
            noise_eve_w: self.noise_bob_w,
            ..self.clone()
        }
    }
}

/// Per-element channel vectors over the active elements (row-major order).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Alice to element.
    pub h: Vec<Complex64>,
    /// Element to Bob.
    pub g: Vec<Complex64>,
    /// Element to Eve.
    pub p: Vec<Complex64>,
}

impl ChannelSet {
    pub fn new(h: Vec<Complex64>, g: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        if g.len() != h.len() {
            return Err(Error::Dimension {
                expected: h.len(),
                got: g.len(),
            });
        }
        if p.len() != h.len() {
            return Err(Error::Dimension {
                expected: h.len(),
                got: p.len(),
            });
        }
        Ok(ChannelSet { h, g, p })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Keeps only the listed element indices, in order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let pick = |v: &[Complex64]| indices.iter().map(|&k| v[k]).collect();
        ChannelSet {
            h: pick(&self.h),
            g: pick(&self.g),
            p: pick(&self.p),
        }
    }
}

/// `(λ / 4πR) · e^{-j2πR/λ}`.
pub fn path_loss(wavelength_m: f64, distance_m: f64) -> Result<Complex64> {
    if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength_m}"
        )));
    }
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(Error::Domain(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(Complex64::from_polar(
        wavelength_m / (4.0 * PI * distance_m),
        -2.0 * PI * distance_m / wavelength_m,
    ))
}

/// Patch-element scattering pattern, `cos ϑ` over the front hemisphere.
pub fn element_pattern(elevation: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&elevation) {
        return Err(Error::Domain(format!(
            "elevation {elevation} outside [0, pi/2]"
        )));
    }
    Ok(elevation.cos())
}

/// `e^{j k0 (m dx sinϑ cosφ + n dy sinϑ sinφ)}`.
pub fn steering_factor(
    m: usize,
    n: usize,
    direction: AngularDirection,
    k0: f64,
    dx: f64,
    dy: f64,
) -> Complex64 {
    let (s_el, _) = direction.elevation.sin_cos();
    let (s_az, c_az) = direction.azimuth.sin_cos();
    let phase = k0 * (m as f64 * dx * s_el * c_az + n as f64 * dy * s_el * s_az);
    Complex64::from_polar(1.0, phase)
}

fn receiver_channel(
    geometry: &RisGeometry,
    elements: &[(usize, usize)],
    receiver: Vec3,
    lambda: f64,
) -> Result<Vec<Complex64>> {
    let dir = direction_from_ris_center(receiver)?;
    let k0 = wavenumber(lambda);
    let (dx, dy) = geometry.spacing();
    let pattern = element_pattern(dir.elevation)?;
    let carrier = path_loss(lambda, receiver.norm())?;
    let carrier = carrier / carrier.norm();
    elements
        .iter()
        .map(|&(m, n)| {
            let r = receiver.distance(geometry.element_center(m, n));
            let amplitude = path_loss(lambda, r)?.norm();
            Ok(carrier * amplitude * pattern * steering_factor(m, n, dir, k0, dx, dy))
        })
        .collect()
}

/// Synthesizes `h`, `g` and `p` for every active element.
///
/// Alice sits in the near field, so `h` uses each element's own incidence
/// angle and distance. Bob and Eve use the far-field form described in the
/// module docs.
pub fn build_channels(scenario: &Scenario, geometry: &RisGeometry) -> Result<ChannelSet> {
    scenario.validate()?;
    let lambda = scenario.wavelength();
    let elements = geometry.active_elements();
    let h = elements
        .iter()
        .map(|&(m, n)| {
            let (dir, r) = element_angles_and_distance(geometry, m, n, scenario.alice)?;
            Ok(path_loss(lambda, r)? * element_pattern(dir.elevation)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let g = receiver_channel(geometry, &elements, scenario.bob, lambda)?;
    let p = receiver_channel(geometry, &elements, scenario.eve, lambda)?;
    ChannelSet::new(h, g, p)
}

/// Complex gains `Σ g_k θ_k h_k` and `Σ p_k θ_k h_k` of the cascaded links.
pub fn cascaded_gains(
    channels: &ChannelSet,
    theta: &PhaseMatrix,
) -> Result<(Complex64, Complex64)> {
    if theta.len() != channels.len() {
        return Err(Error::Dimension {
            expected: channels.len(),
            got: theta.len(),
        });
    }
    let mut bob = Complex64::new(0.0, 0.0);
    let mut eve = Complex64::new(0.0, 0.0);
    for (k, t) in theta.diagonal().iter().enumerate() {
        let th = t * channels.h[k];
        bob += channels.g[k] * th;
        eve += channels.p[k] * th;
    }
    Ok((bob, eve))
}

/// Received signal-plus-noise powers `(P_b, P_e)` in watts.
pub fn received_powers(
    channels: &ChannelSet,
    theta: &PhaseMatrix,
    scenario: &Scenario,
) -> Result<(f64, f64)> {
    let (bob, eve) = cascaded_gains(channels, theta)?;
    let gain = scenario.gamma * scenario.gamma * scenario.tx_power_w;
    Ok((
        bob.norm_sqr() * gain + scenario.noise_bob_w,
        eve.norm_sqr() * gain + scenario.noise_eve_w,
    ))
}

fn require_positive(values: &[(f64, &str)]) -> Result<()> {
    for &(v, name) in values {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Secrecy capacity in bits/s/Hz from received powers (signal plus noise) and noise powers.
pub fn secrecy_capacity(p_bob: f64, p_eve: f64, noise_bob: f64, noise_eve: f64) -> Result<f64> {
    require_positive(&[
        (p_bob, "P_b"),
        (p_eve, "P_e"),
        (noise_bob, "N_b"),
        (noise_eve, "N_e"),
    ])?;
    let c = ((p_bob / p_eve) * (noise_eve / noise_bob)).log2();
    Ok(c.max(0.0))
}

/// Secrecy capacity from signal powers via the difference of the two link capacities.
pub fn secrecy_capacity_from_snr(
    signal_bob: f64,
    signal_eve: f64,
    noise_bob: f64,
    noise_eve: f64,
) -> Result<f64> {
    require_positive(&[(noise_bob, "N_b"), (noise_eve, "N_e")])?;
    if signal_bob < 0.0 || signal_eve < 0.0 {
        return Err(Error::Domain("signal powers must be non-negative".into()));
    }
    let c = (signal_bob / noise_bob).ln_1p() / std::f64::consts::LN_2
        - (signal_eve / noise_eve).ln_1p() / std::f64::consts::LN_2;
    Ok(c.max(0.0))
}

/// Mean sample power in dBFS; `f64::NEG_INFINITY` for an all-zero block.
///
/// No full-scale normalization is applied (see [`dbfs_fullscale`]).
pub fn power_dbfs(samples: &[(i32, i32)]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("dBFS needs at least one sample".into()));
    }
    let mut acc = 0.0;
    for (k, &(i, q)) in samples.iter().enumerate() {
        for v in [i as i64, q as i64] {
            if v <= ADC_MIN_EXCLUSIVE || v > ADC_MAX {
                return Err(Error::SampleRange {
                    line: k + 1,
                    value: v,
                });
            }
        }
        acc += (i as f64).powi(2) + (q as f64).powi(2);
    }
    if acc == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (acc / samples.len() as f64).log10())
}

/// Re-references a raw dBFS value to a 2048-count full scale.
pub fn dbfs_fullscale(dbfs: f64) -> f64 {
    dbfs - 20.0 * (ADC_MAX as f64).log10()
}

pub fn linear_to_db(value: f64) -> Result<f64> {
    if value.is_nan() || value <= 0.0 {
        return Err(Error::Domain(format!(
            "cannot express {value} in dB (must be positive)"
        )));
    }
    Ok(10.0 * value.log10())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    linear_to_db(watts / 1e-3)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

/// Returns a copy of `scenario` with equal noise powers chosen so that the
/// all-zero configuration's geometric-mean SNR over Bob and Eve is `snr_db`.
pub fn calibrate_noise(
    scenario: &Scenario,
    geometry: &RisGeometry,
    snr_db: f64,
) -> Result<Scenario> {
    if !snr_db.is_finite() {
        return Err(Error::Domain("target SNR must be finite".into()));
    }
    let channels = build_channels(scenario, geometry)?;
    let theta = PhaseMatrix::from_diagonal(vec![Complex64::new(1.0, 0.0); channels.len()]);
    let (bob, eve) = cascaded_gains(&channels, &theta)?;
    let gain = scenario.gamma * scenario.gamma * scenario.tx_power_w;
    let reference = (bob.norm_sqr() * gain * eve.norm_sqr() * gain).sqrt();
    if reference.is_nan() || reference <= 0.0 {
        return Err(Error::Domain(
            "initial received signal is zero; cannot size noise".into(),
        ));
    }
    let noise = reference / db_to_linear(snr_db);
    Ok(Scenario {
        noise_bob_w: noise,
        noise_eve_w: noise,
        ..scenario.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ris::{state_phase_table, theta_matrix, RisConfiguration};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn path_loss_direct_substitution() {
        let pl = path_loss(4.0 * PI, 1.0).unwrap();
        assert!((pl.norm() - 1.0).abs() < 1e-12);
        assert!((pl.arg() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn path_loss_inverse_distance() {
        let a = path_loss(0.05, 3.0).unwrap().norm();
        let b = path_loss(0.05, 6.0).unwrap().norm();
        assert!((a / 2.0 - b).abs() < 1e-15);
    }

    #[test]
    fn path_loss_at_carrier() {
        let lambda = wavelength(5.2e9);
        assert!((lambda - 0.057652).abs() < 1e-5);
        let expected = 0.057655 / (4.0 * PI);
        let mag = path_loss(0.057655, 1.0).unwrap().norm();
        assert!((mag - expected).abs() < 1e-15);
        assert!((mag - 4.588e-3).abs() < 1e-6);
    }

    #[test]
    fn path_loss_domain() {
        assert!(path_loss(0.05, 0.0).is_err());
        assert!(path_loss(0.05, -1.0).is_err());
        assert!(path_loss(0.0, 1.0).is_err());
    }

    #[test]
    fn element_pattern_values() {
        assert_eq!(element_pattern(0.0).unwrap(), 1.0);
        assert!(element_pattern(FRAC_PI_2).unwrap().abs() < 1e-15);
        assert!((element_pattern(PI / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(element_pattern(-0.1).is_err());
        assert!(element_pattern(1.6).is_err());
    }

    #[test]
    fn steering_special_cases() {
        let dir = AngularDirection::new(0.7, 1.1).unwrap();
        assert_eq!(steering_factor(0, 0, dir, 100.0, 0.03, 0.03), c(1.0, 0.0));
        let broadside = AngularDirection::new(0.0, 2.0).unwrap();
        assert!((steering_factor(5, 7, broadside, 100.0, 0.03, 0.03) - c(1.0, 0.0)).norm() < 1e-15);

        let lambda = 0.06;
        let k0 = wavenumber(lambda);
        let endfire = AngularDirection::new(FRAC_PI_2, 0.0).unwrap();
        let s = steering_factor(1, 0, endfire, k0, lambda / 2.0, lambda / 2.0);
        assert!((s - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn boresight_single_element_channel() {
        let g = RisGeometry::uniform(1, 1, 0.03, 0.03);
        let r = 1.7;
        let s = Scenario::new(
            Vec3::new(0.0, 0.0, r),
            Vec3::new(0.5, 0.0, 2.0),
            Vec3::new(-0.5, 0.0, 2.0),
        );
        let ch = build_channels(&s, &g).unwrap();
        let expected = path_loss(s.wavelength(), r).unwrap();
        assert!((ch.h[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn swapping_receivers_swaps_channels() {
        let g = RisGeometry::default_prototype(5.2e9).unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, -0.35, 0.8),
            Vec3::new(-0.54, -0.35, 2.7),
            Vec3::new(1.2, -0.35, 2.6),
        );
        let a = build_channels(&s, &g).unwrap();
        let b = build_channels(&s.swap_receivers(), &g).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.g, b.p);
        assert_eq!(a.p, b.g);
    }

    #[test]
    fn channels_reject_terminals_behind() {
        let g = RisGeometry::default_prototype(5.2e9).unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, -2.0),
            Vec3::new(1.0, 0.0, 2.0),
        );
        assert!(matches!(
            build_channels(&s, &g),
            Err(Error::BehindRis { .. })
        ));
    }

    #[test]
    fn loc1_alice_channel_matches_scalar_evaluation() {
        let g = RisGeometry::default_prototype(5.2e9).unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, -0.35, 0.80),
            Vec3::new(-0.54, -0.35, 2.70),
            Vec3::new(1.20, -0.35, 2.60),
        );
        let ch = build_channels(&s, &g).unwrap();
        let lambda = SPEED_OF_LIGHT / 5.2e9;
        let d = lambda / 2.0;
        let mut k = 0;
        for m in 0..8 {
            for n in 0..10 {
                if m < 2 && n < 2 {
                    continue;
                }
                // standalone re-evaluation, no crate helpers
                let ex = (m as f64 - 3.5) * d;
                let ey = (n as f64 - 4.5) * d;
                let (vx, vy, vz) = (0.0 - ex, -0.35 - ey, 0.80);
                let r = (vx * vx + vy * vy + vz * vz).sqrt();
                let mag = lambda / (4.0 * PI * r) * (vz / r);
                assert!((ch.h[k].norm() - mag).abs() < 1e-12, "element ({m},{n})");
                k += 1;
            }
        }
        assert_eq!(k, 76);
    }

    #[test]
    fn powers_without_reflection_are_noise() {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0); 2],
            vec![c(1.0, 0.0); 2],
            vec![c(0.5, 0.5); 2],
        )
        .unwrap();
        let mut s = Scenario::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        );
        s.gamma = 0.0;
        let theta = PhaseMatrix::from_diagonal(vec![c(1.0, 0.0); 2]);
        let (pb, pe) = received_powers(&ch, &theta, &s).unwrap();
        assert_eq!((pb, pe), (s.noise_bob_w, s.noise_eve_w));
    }

    #[test]
    fn two_element_toy_sums() {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0); 2],
            vec![c(1.0, 0.0); 2],
            vec![c(1.0, 0.0); 2],
        )
        .unwrap();
        let mut s = Scenario::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        );
        s.noise_bob_w = 1e-30;
        s.noise_eve_w = 1e-30;
        let opposite = PhaseMatrix::from_diagonal(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let (pb, _) = received_powers(&ch, &opposite, &s).unwrap();
        assert!((pb - 1e-30).abs() < 1e-40);
        let identity = PhaseMatrix::from_diagonal(vec![c(1.0, 0.0); 2]);
        let (pb, _) = received_powers(&ch, &identity, &s).unwrap();
        assert!((pb - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_element_power_ignores_phase() {
        let ch =
            ChannelSet::new(vec![c(0.3, -0.2)], vec![c(0.1, 0.4)], vec![c(-0.2, 0.1)]).unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        );
        let base =
            received_powers(&ch, &PhaseMatrix::from_diagonal(vec![c(1.0, 0.0)]), &s).unwrap();
        for phi in [0.3, 1.7, PI, 5.0] {
            let theta = PhaseMatrix::from_diagonal(vec![Complex64::from_polar(1.0, phi)]);
            let (pb, _) = received_powers(&ch, &theta, &s).unwrap();
            assert!((pb - base.0).abs() <= 1e-15 * base.0);
        }
    }

    #[test]
    fn power_dimension_mismatch() {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0); 3],
            vec![c(1.0, 0.0); 3],
            vec![c(1.0, 0.0); 3],
        )
        .unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        );
        let theta = PhaseMatrix::from_diagonal(vec![c(1.0, 0.0); 2]);
        assert!(matches!(
            received_powers(&ch, &theta, &s),
            Err(Error::Dimension { .. })
        ));
        assert!(ChannelSet::new(
            vec![c(1.0, 0.0); 3],
            vec![c(1.0, 0.0); 2],
            vec![c(1.0, 0.0); 3]
        )
        .is_err());
    }

    #[test]
    fn secrecy_examples() {
        assert_eq!(secrecy_capacity(3.0, 3.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((secrecy_capacity(8.0, 2.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity(1.0, 8.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(secrecy_capacity(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(secrecy_capacity(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn dbfs_examples() {
        assert_eq!(power_dbfs(&[(1, 0); 10]).unwrap(), 0.0);
        assert!((power_dbfs(&[(2, 0); 10]).unwrap() - 6.020599913279624).abs() < 1e-12);
        assert!((power_dbfs(&[(1, 0), (0, 3)]).unwrap() - 6.989700043360188).abs() < 1e-12);
        assert_eq!(power_dbfs(&[(0, 0); 4]).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(power_dbfs(&[]), Err(Error::Empty(_))));
        assert!(matches!(
            power_dbfs(&[(0, 0), (-2047, 0)]),
            Err(Error::SampleRange {
                line: 2,
                value: -2047
            })
        ));
        assert!(power_dbfs(&[(2048, -2046)]).is_ok());
        assert!(power_dbfs(&[(2049, 0)]).is_err());
    }

    #[test]
    fn fullscale_reference() {
        let raw = power_dbfs(&[(2048, 0)]).unwrap();
        assert!(dbfs_fullscale(raw).abs() < 1e-12);
    }

    #[test]
    fn dbm_conversions() {
        assert!(watts_to_dbm(1e-3).unwrap().abs() < 1e-12);
        assert!((watts_to_dbm(1.0).unwrap() - 30.0).abs() < 1e-12);
        assert!(watts_to_dbm(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
        let mut x = 1e-9;
        while x <= 1e3 {
            let back = dbm_to_watts(watts_to_dbm(x).unwrap());
            assert!((back - x).abs() <= 1e-12 * x);
            assert!((db_to_linear(linear_to_db(x).unwrap()) - x).abs() <= 1e-12 * x);
            x *= 3.7;
        }
    }

    #[test]
    fn calibration_hits_target_snr() {
        let g = RisGeometry::default_prototype(5.2e9).unwrap();
        let s = Scenario::new(
            Vec3::new(0.0, -0.35, 0.80),
            Vec3::new(-0.54, -0.35, 2.70),
            Vec3::new(1.20, -0.35, 2.60),
        );
        let cal = calibrate_noise(&s, &g, 30.0).unwrap();
        assert_eq!(cal.noise_bob_w, cal.noise_eve_w);
        let ch = build_channels(&cal, &g).unwrap();
        let theta = theta_matrix(
            &RisConfiguration::zeros(76, 2),
            &state_phase_table(2).unwrap(),
        )
        .unwrap();
        let (pb, pe) = received_powers(&ch, &theta, &cal).unwrap();
        let snr_b = (pb - cal.noise_bob_w) / cal.noise_bob_w;
        let snr_e = (pe - cal.noise_eve_w) / cal.noise_eve_w;
        assert!((10.0 * (snr_b * snr_e).sqrt().log10() - 30.0).abs() < 1e-9);
    }

    fn random_channels(seed: u64, n: usize) -> ChannelSet {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v = || {
            (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect::<Vec<_>>()
        };
        ChannelSet::new(v(), v(), v()).unwrap()
    }

    proptest! {
        #[test]
        fn steering_is_unit_modulus(m in 0usize..16, n in 0usize..16, el in 0.0f64..FRAC_PI_2, az in 0.0f64..TAU, k0 in 1.0f64..200.0) {
            let dir = AngularDirection::new(el, az).unwrap();
            prop_assert!((steering_factor(m, n, dir, k0, 0.03, 0.02).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn global_phase_leaves_powers(seed in any::<u64>(), phi in 0.0f64..6.3) {
            let ch = random_channels(seed, 12);
            let s = Scenario::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0));
            let states: Vec<u8> = (0..12).map(|k| ((seed >> k) & 1) as u8).collect();
            let theta = theta_matrix(&RisConfiguration::new(states, 2).unwrap(), &state_phase_table(2).unwrap()).unwrap();
            let (a, b) = received_powers(&ch, &theta, &s).unwrap();
            let (c2, d) = received_powers(&ch, &theta.rotated(phi), &s).unwrap();
            prop_assert!((a - c2).abs() <= 1e-12 * a);
            prop_assert!((b - d).abs() <= 1e-12 * b);
        }

        #[test]
        fn ratio_and_snr_forms_agree(sb in 1e-6f64..1e6, se in 1e-6f64..1e6, nb in 1e-6f64..1e3, ne in 1e-6f64..1e3) {
            let direct = secrecy_capacity_from_snr(sb, se, nb, ne).unwrap();
            let via_power = secrecy_capacity(sb + nb, se + ne, nb, ne).unwrap();
            prop_assert!((direct - via_power).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn received_power_follows_inverse_fourth_power() {
        // single element at the origin, all terminals on boresight
        let g = RisGeometry::uniform(1, 1, 0.03, 0.03);
        let theta = PhaseMatrix::from_diagonal(vec![c(1.0, 0.0)]);
        let mut reference = None;
        for r in [1.0, 2.0, 4.0, 8.0] {
            let mut s = Scenario::new(
                Vec3::new(0.0, 0.0, r),
                Vec3::new(0.0, 0.0, r),
                Vec3::new(0.0, 0.0, r),
            );
            s.noise_bob_w = 1e-300;
            s.noise_eve_w = 1e-300;
            let ch = build_channels(&s, &g).unwrap();
            let (pb, _) = received_powers(&ch, &theta, &s).unwrap();
            let scaled = pb * r.powi(4);
            let base = *reference.get_or_insert(scaled);
            assert!((scaled - base).abs() <= 1e-12 * base);
        }
    }
}

//! Plain-text `key = value` scenario files.
//!
//! ```text
//! # Loc1
//! alice_xyz = 0, -0.35, 0.8
//! bob_xyz   = -0.54, -0.35, 2.7
//! eve_xyz   = 1.2, -0.35, 2.6
//! states    = 2
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{calibrate_noise, wavelength, Scenario, DEFAULT_CARRIER_HZ};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::ris::{RisGeometry, PROTOTYPE_COLS, PROTOTYPE_ROWS};

use super::campaign::DEFAULT_INITIAL_SNR_DB;

pub const KEYS: &[&str] = &[
    "alice_xyz",
    "bob_xyz",
    "eve_xyz",
    "carrier_hz",
    "tx_power_w",
    "noise_b_w",
    "noise_e_w",
    "gamma",
    "grid_m",
    "grid_n",
    "dx_m",
    "dy_m",
    "states",
    "seed",
    "initial_snr_db",
    "cutout_m",
    "cutout_n",
];

/// Every field is optional so files and command-line flags can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    pub alice_xyz: Option<Vec3>,
    pub bob_xyz: Option<Vec3>,
    pub eve_xyz: Option<Vec3>,
    pub carrier_hz: Option<f64>,
    pub tx_power_w: Option<f64>,
    pub noise_b_w: Option<f64>,
    pub noise_e_w: Option<f64>,
    pub gamma: Option<f64>,
    pub grid_m: Option<usize>,
    pub grid_n: Option<usize>,
    pub dx_m: Option<f64>,
    pub dy_m: Option<f64>,
    pub states: Option<usize>,
    pub seed: Option<u64>,
    /// SNR used to size the noise when neither noise power is given.
    pub initial_snr_db: Option<f64>,
    pub cutout_m: Option<usize>,
    pub cutout_n: Option<usize>,
}

pub fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected x,y,z but found {} component(s)",
            parts.len()
        ));
    }
    let mut v = [0.0f64; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse()
        .map_err(|_| format!("'{s}' is not a valid {}", std::any::type_name::<T>()))
}

impl ScenarioConfig {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Parse {
                path: path.to_string(),
                line,
                reason,
            };
            let (key, value) = l
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', found '{l}'")))?;
            let key = key.trim();
            let value = value.trim();
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| err(format!("unknown key '{key}'")))?;
            if seen.contains(known) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            seen.push(known);
            cfg.set(key, value).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "alice_xyz" => self.alice_xyz = Some(parse_vec3(value)?),
            "bob_xyz" => self.bob_xyz = Some(parse_vec3(value)?),
            "eve_xyz" => self.eve_xyz = Some(parse_vec3(value)?),
            "carrier_hz" => self.carrier_hz = Some(parse_num(value)?),
            "tx_power_w" => self.tx_power_w = Some(parse_num(value)?),
            "noise_b_w" => self.noise_b_w = Some(parse_num(value)?),
            "noise_e_w" => self.noise_e_w = Some(parse_num(value)?),
            "gamma" => self.gamma = Some(parse_num(value)?),
            "grid_m" => self.grid_m = Some(parse_num(value)?),
            "grid_n" => self.grid_n = Some(parse_num(value)?),
            "dx_m" => self.dx_m = Some(parse_num(value)?),
            "dy_m" => self.dy_m = Some(parse_num(value)?),
            "states" => self.states = Some(parse_num(value)?),
            "seed" => self.seed = Some(parse_num(value)?),
            "initial_snr_db" => self.initial_snr_db = Some(parse_num(value)?),
            "cutout_m" => self.cutout_m = Some(parse_num(value)?),
            "cutout_n" => self.cutout_n = Some(parse_num(value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &ScenarioConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            alice_xyz,
            bob_xyz,
            eve_xyz,
            carrier_hz,
            tx_power_w,
            noise_b_w,
            noise_e_w,
            gamma,
            grid_m,
            grid_n,
            dx_m,
            dy_m,
            states,
            seed,
            initial_snr_db,
            cutout_m,
            cutout_n
        );
    }

    pub fn carrier(&self) -> f64 {
        self.carrier_hz.unwrap_or(DEFAULT_CARRIER_HZ)
    }

    pub fn num_states(&self) -> usize {
        self.states.unwrap_or(2)
    }

    /// 8×10 grid, half-wavelength spacing and a 2×2 cutout unless overridden.
    pub fn geometry(&self) -> Result<RisGeometry> {
        let half = wavelength(self.carrier()) / 2.0;
        RisGeometry::with_cutout(
            self.grid_m.unwrap_or(PROTOTYPE_ROWS),
            self.grid_n.unwrap_or(PROTOTYPE_COLS),
            self.dx_m.unwrap_or(half),
            self.dy_m.unwrap_or(half),
            self.cutout_m.unwrap_or(2),
            self.cutout_n.unwrap_or(2),
        )
    }

    /// Scenario template without terminal positions checks; noise stays at its
    /// default when not given.
    pub fn link_template(&self, alice: Vec3, bob: Vec3, eve: Vec3) -> Scenario {
        let mut s = Scenario::new(alice, bob, eve);
        s.carrier_hz = self.carrier();
        if let Some(p) = self.tx_power_w {
            s.tx_power_w = p;
        }
        if let Some(g) = self.gamma {
            s.gamma = g;
        }
        match (self.noise_b_w, self.noise_e_w) {
            (Some(b), Some(e)) => {
                s.noise_bob_w = b;
                s.noise_eve_w = e;
            }
            (Some(n), None) | (None, Some(n)) => {
                s.noise_bob_w = n;
                s.noise_eve_w = n;
            }
            (None, None) => {}
        }
        s
    }

    /// True when neither noise power was given and noise is sized from the initial SNR.
    pub fn noise_is_calibrated(&self) -> bool {
        self.noise_b_w.is_none() && self.noise_e_w.is_none()
    }

    pub fn initial_snr(&self) -> f64 {
        self.initial_snr_db.unwrap_or(DEFAULT_INITIAL_SNR_DB)
    }

    /// Fully resolved scenario; requires all three positions.
    pub fn scenario(&self, geometry: &RisGeometry) -> Result<Scenario> {
        let need =
            |v: Option<Vec3>, key: &str| v.ok_or_else(|| Error::Domain(format!("missing '{key}'")));
        let s = self.link_template(
            need(self.alice_xyz, "alice_xyz")?,
            need(self.bob_xyz, "bob_xyz")?,
            need(self.eve_xyz, "eve_xyz")?,
        );
        s.validate()?;
        if self.noise_is_calibrated() {
            calibrate_noise(&s, geometry, self.initial_snr())
        } else {
            Ok(s)
        }
    }

    /// Canonical `key=value` listing of the set fields, in key order.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let v3 = |v: Vec3| format!("{},{},{}", v.x, v.y, v.z);
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{k}={v}");
            }
        };
        put("alice_xyz", self.alice_xyz.map(v3));
        put("bob_xyz", self.bob_xyz.map(v3));
        put("eve_xyz", self.eve_xyz.map(v3));
        put("carrier_hz", self.carrier_hz.map(|v| v.to_string()));
        put("tx_power_w", self.tx_power_w.map(|v| v.to_string()));
        put("noise_b_w", self.noise_b_w.map(|v| v.to_string()));
        put("noise_e_w", self.noise_e_w.map(|v| v.to_string()));
        put("gamma", self.gamma.map(|v| v.to_string()));
        put("grid_m", self.grid_m.map(|v| v.to_string()));
        put("grid_n", self.grid_n.map(|v| v.to_string()));
        put("dx_m", self.dx_m.map(|v| v.to_string()));
        put("dy_m", self.dy_m.map(|v| v.to_string()));
        put("states", self.states.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("initial_snr_db", self.initial_snr_db.map(|v| v.to_string()));
        put("cutout_m", self.cutout_m.map(|v| v.to_string()));
        put("cutout_n", self.cutout_n.map(|v| v.to_string()));
        out
    }
}

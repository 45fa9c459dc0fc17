//! RIS grid layout, discrete element states and the PIN-diode control word.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::wavelength;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const PROTOTYPE_ROWS: usize = 8;
pub const PROTOTYPE_COLS: usize = 10;
pub const PROTOTYPE_ACTIVE: usize = 76;
pub const PIN_WORD_BITS: usize = 2 * PROTOTYPE_ACTIVE;

/// Planar grid of `rows` elements along x by `cols` along y, centered on the origin.
///
/// Cell `(m, n)` is stored row-major (`m * cols + n`); `(0, 0)` is the
/// left-bottom corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    active: Vec<bool>,
}

impl RisGeometry {
    /// Fully populated grid with no inactive cells.
    pub fn uniform(rows: usize, cols: usize, dx: f64, dy: f64) -> Self {
        RisGeometry {
            rows,
            cols,
            dx,
            dy,
            active: vec![true; rows * cols],
        }
    }

    /// Grid with a `cut_rows x cut_cols` controller block removed at the left-bottom corner.
    pub fn with_cutout(
        rows: usize,
        cols: usize,
        dx: f64,
        dy: f64,
        cut_rows: usize,
        cut_cols: usize,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("grid must have at least one cell".into()));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::Domain(format!(
                "element spacing must be positive, got ({dx}, {dy})"
            )));
        }
        let mut g = Self::uniform(rows, cols, dx, dy);
        for m in 0..cut_rows.min(rows) {
            for n in 0..cut_cols.min(cols) {
                g.active[m * cols + n] = false;
            }
        }
        if g.active_count() == 0 {
            return Err(Error::Domain("cutout removes every element".into()));
        }
        Ok(g)
    }

    /// The 8x10 prototype with its 2x2 controller cutout and half-wavelength spacing.
    pub fn default_prototype(carrier_hz: f64) -> Result<Self> {
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::Domain(format!(
                "carrier frequency must be positive, got {carrier_hz}"
            )));
        }
        let d = wavelength(carrier_hz) / 2.0;
        Self::with_cutout(PROTOTYPE_ROWS, PROTOTYPE_COLS, d, d, 2, 2)
    }

    /// Same grid, but only the first `keep` active elements (row-major) stay active.
    pub fn truncated(&self, keep: usize) -> Result<Self> {
        if keep == 0 || keep > self.active_count() {
            return Err(Error::Domain(format!(
                "cannot keep {keep} of {} active elements",
                self.active_count()
            )));
        }
        let mut g = self.clone();
        let mut seen = 0;
        for cell in g.active.iter_mut() {
            if *cell {
                seen += 1;
                *cell = seen <= keep;
            }
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.dx, self.dy)
    }

    pub fn is_active(&self, m: usize, n: usize) -> Result<bool> {
        if m >= self.rows || n >= self.cols {
            return Err(Error::OutOfGrid {
                m,
                n,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.active[m * self.cols + n])
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Active `(m, n)` indices in row-major order; this is the ordering of
    /// every per-element vector in the crate.
    pub fn active_elements(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|m| (0..self.cols).map(move |n| (m, n)))
            .filter(|&(m, n)| self.active[m * self.cols + n])
            .collect()
    }

    /// Center of cell `(m, n)`; the bounding grid's centroid is the origin.
    pub fn element_center(&self, m: usize, n: usize) -> Vec3 {
        let cx = (self.rows as f64 - 1.0) / 2.0;
        let cy = (self.cols as f64 - 1.0) / 2.0;
        Vec3::new((m as f64 - cx) * self.dx, (n as f64 - cy) * self.dy, 0.0)
    }

    /// Diagonal of the full bounding grid.
    pub fn aperture(&self) -> f64 {
        (self.rows as f64 * self.dx).hypot(self.cols as f64 * self.dy)
    }

    pub fn is_prototype(&self) -> bool {
        self.rows == PROTOTYPE_ROWS
            && self.cols == PROTOTYPE_COLS
            && self.active_elements()
                == Self::uniform_cutout_mask(PROTOTYPE_ROWS, PROTOTYPE_COLS, 2, 2)
    }

    fn uniform_cutout_mask(rows: usize, cols: usize, cr: usize, cc: usize) -> Vec<(usize, usize)> {
        (0..rows)
            .flat_map(|m| (0..cols).map(move |n| (m, n)))
            .filter(|&(m, n)| !(m < cr && n < cc))
            .collect()
    }
}

/// One realizable element state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementState {
    pub state_id: u8,
    pub phase: f64,
    pub amplitude: f64,
}

/// Reflection phase per state id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    phases: Vec<f64>,
}

impl PhaseTable {
    /// Custom table, e.g. measured phases for the four diode combinations.
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.len() < 2 || phases.len() > 10 {
            return Err(Error::UnsupportedStates(phases.len()));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("phase table entries must be finite".into()));
        }
        Ok(PhaseTable { phases })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase(&self, state: u8) -> f64 {
        self.phases[state as usize]
    }

    pub fn element_state(&self, state: u8, amplitude: f64) -> ElementState {
        ElementState {
            state_id: state,
            phase: self.phase(state),
            amplitude,
        }
    }
}

/// Standard tables: two states are {0, π}; four states map the diode
/// combinations `2·V + H` onto {0, π/2, π, 3π/2}.
///
/// The four-state mapping is a stand-in; the hardware's effective scalar
/// reflection per diode pair is not published.
pub fn state_phase_table(states: usize) -> Result<PhaseTable> {
    match states {
        2 => Ok(PhaseTable {
            phases: vec![0.0, PI],
        }),
        4 => Ok(PhaseTable {
            phases: vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2],
        }),
        s => Err(Error::UnsupportedStates(s)),
    }
}

/// Per-element state ids, ordered like [`RisGeometry::active_elements`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RisConfiguration {
    states: Vec<u8>,
    num_states: usize,
}

impl RisConfiguration {
    pub fn new(states: Vec<u8>, num_states: usize) -> Result<Self> {
        if !(2..=10).contains(&num_states) {
            return Err(Error::UnsupportedStates(num_states));
        }
        if let Some(pos) = states.iter().position(|&s| s as usize >= num_states) {
            return Err(Error::ConfigFormat {
                offset: pos,
                reason: format!("state {} is not below {num_states}", states[pos]),
            });
        }
        Ok(RisConfiguration { states, num_states })
    }

    /// All elements in state 0 (0° phase shift).
    pub fn zeros(active: usize, num_states: usize) -> Self {
        RisConfiguration {
            states: vec![0; active],
            num_states,
        }
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, k: usize) -> u8 {
        self.states[k]
    }

    /// Sets element `k`; panics when `state` is out of range.
    pub fn set(&mut self, k: usize, state: u8) {
        assert!((state as usize) < self.num_states, "state out of range");
        self.states[k] = state;
    }

    pub fn check_geometry(&self, geometry: &RisGeometry) -> Result<()> {
        let expected = geometry.active_count();
        if self.states.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: self.states.len(),
            });
        }
        Ok(())
    }

    /// Parses either a digit string (one state per active element) or, for the
    /// 76-element prototype with 4 states, a 152-character diode bit string.
    pub fn parse(text: &str, geometry: &RisGeometry, num_states: usize) -> Result<Self> {
        let text = text.trim();
        let active = geometry.active_count();
        let len = text.chars().count();
        if len == 2 * active && num_states == 4 && geometry.is_prototype() {
            let mut bits = Vec::with_capacity(len);
            for (offset, c) in text.chars().enumerate() {
                match c {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    other => {
                        return Err(Error::ConfigFormat {
                            offset,
                            reason: format!("expected bit '0' or '1', found {other:?}"),
                        })
                    }
                }
            }
            return decode_pin_bits(&bits);
        }
        let mut states = Vec::with_capacity(active);
        for (offset, c) in text.chars().enumerate() {
            let digit = c.to_digit(10).ok_or_else(|| Error::ConfigFormat {
                offset,
                reason: format!("expected a state digit, found {c:?}"),
            })?;
            if digit as usize >= num_states {
                return Err(Error::ConfigFormat {
                    offset,
                    reason: format!("state {digit} is not below {num_states}"),
                });
            }
            if offset >= active {
                return Err(Error::ConfigFormat {
                    offset,
                    reason: format!("more than {active} states"),
                });
            }
            states.push(digit as u8);
        }
        if states.len() != active {
            return Err(Error::ConfigFormat {
                offset: states.len(),
                reason: format!("expected {active} states, got {}", states.len()),
            });
        }
        Ok(RisConfiguration { states, num_states })
    }
}

impl fmt::Display for RisConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.states {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Diagonal of the reflection matrix Θ.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    diagonal: Vec<Complex64>,
}

impl PhaseMatrix {
    pub fn from_diagonal(diagonal: Vec<Complex64>) -> Self {
        PhaseMatrix { diagonal }
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.diagonal.iter().map(|z| z.arg()).collect()
    }

    /// Multiplies every entry by `e^{j·phase}`.
    pub fn rotated(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        PhaseMatrix {
            diagonal: self.diagonal.iter().map(|z| z * w).collect(),
        }
    }
}

pub fn theta_matrix(config: &RisConfiguration, table: &PhaseTable) -> Result<PhaseMatrix> {
    if config.num_states() != table.len() {
        return Err(Error::Dimension {
            expected: table.len(),
            got: config.num_states(),
        });
    }
    Ok(PhaseMatrix {
        diagonal: config
            .states()
            .iter()
            .map(|&s| Complex64::from_polar(1.0, table.phase(s)))
            .collect(),
    })
}

/// Packs a 4-state prototype configuration into the 152-bit diode word.
///
/// Element `k` owns bits `2k` (horizontal diode) and `2k + 1` (vertical
/// diode), and its state id is `2·V + H`.
pub fn encode_pin_bits(config: &RisConfiguration, geometry: &RisGeometry) -> Result<Vec<bool>> {
    if !geometry.is_prototype() || config.num_states() != 4 || config.len() != PROTOTYPE_ACTIVE {
        return Err(Error::NotPrototype);
    }
    let mut bits = Vec::with_capacity(PIN_WORD_BITS);
    for &s in config.states() {
        bits.push(s & 1 == 1);
        bits.push(s & 2 == 2);
    }
    Ok(bits)
}

pub fn decode_pin_bits(bits: &[bool]) -> Result<RisConfiguration> {
    if bits.len() != PIN_WORD_BITS {
        return Err(Error::ConfigFormat {
            offset: bits.len().min(PIN_WORD_BITS),
            reason: format!(
                "diode word must have {PIN_WORD_BITS} bits, got {}",
                bits.len()
            ),
        });
    }
    let states = bits
        .chunks_exact(2)
        .map(|pair| pair[0] as u8 + 2 * pair[1] as u8)
        .collect();
    Ok(RisConfiguration {
        states,
        num_states: 4,
    })
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

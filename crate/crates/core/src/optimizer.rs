//! Per-element greedy configuration search and the small-instance baselines
//! used to check it.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    build_channels, received_powers, secrecy_capacity, watts_to_dbm, ChannelSet, Scenario,
};
use crate::error::{Error, Result};
use crate::ris::{state_phase_table, theta_matrix, PhaseTable, RisConfiguration, RisGeometry};

pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MaxSecrecy,
    MaxBobPower,
    MinEvePower,
}

impl Objective {
    /// Score to maximize for one power reading.
    pub fn score(self, sample: PowerSample, noise_bob: f64, noise_eve: f64) -> Result<f64> {
        match self {
            Objective::MaxSecrecy => {
                secrecy_capacity(sample.p_bob_w, sample.p_eve_w, noise_bob, noise_eve)
            }
            Objective::MaxBobPower => Ok(sample.p_bob_w),
            Objective::MinEvePower => Ok(-sample.p_eve_w),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::MaxSecrecy => "max-secrecy",
            Objective::MaxBobPower => "max-bob",
            Objective::MinEvePower => "min-eve",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-secrecy" | "secrecy" => Ok(Objective::MaxSecrecy),
            "max-bob" | "max-bob-power" => Ok(Objective::MaxBobPower),
            "min-eve" | "min-eve-power" => Ok(Objective::MinEvePower),
            other => Err(Error::Domain(format!(
                "unknown objective '{other}' (expected max-secrecy, max-bob or min-eve)"
            ))),
        }
    }
}

/// Received powers at Bob and Eve in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub p_bob_w: f64,
    pub p_eve_w: f64,
}

pub trait PowerEvaluator {
    fn evaluate(&mut self, config: &RisConfiguration) -> Result<PowerSample>;

    /// `(N_b, N_e)` in watts, used by the secrecy objective.
    fn noise(&self) -> (f64, f64);
}

/// Evaluates configurations through the channel model.
#[derive(Debug, Clone)]
pub struct SimulatedEvaluator {
    channels: ChannelSet,
    table: PhaseTable,
    scenario: Scenario,
    floor_w: Option<f64>,
}

impl SimulatedEvaluator {
    pub fn new(scenario: &Scenario, geometry: &RisGeometry, num_states: usize) -> Result<Self> {
        let channels = build_channels(scenario, geometry)?;
        Self::from_channels(channels, scenario.clone(), state_phase_table(num_states)?)
    }

    pub fn from_channels(
        channels: ChannelSet,
        scenario: Scenario,
        table: PhaseTable,
    ) -> Result<Self> {
        scenario.validate()?;
        Ok(SimulatedEvaluator {
            channels,
            table,
            scenario,
            floor_w: None,
        })
    }

    /// Readings below `floor_w` saturate at the floor, like a receiver at its sensitivity limit.
    pub fn with_sensitivity_floor(mut self, floor_w: f64) -> Self {
        self.floor_w = Some(floor_w);
        self
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
}

impl PowerEvaluator for SimulatedEvaluator {
    fn evaluate(&mut self, config: &RisConfiguration) -> Result<PowerSample> {
        if config.num_states() != self.table.len() {
            return Err(Error::Domain(format!(
                "configuration uses {} states but the evaluator has {}",
                config.num_states(),
                self.table.len()
            )));
        }
        let theta = theta_matrix(config, &self.table)?;
        let (mut p_bob_w, mut p_eve_w) = received_powers(&self.channels, &theta, &self.scenario)?;
        if let Some(floor) = self.floor_w {
            p_bob_w = p_bob_w.max(floor);
            p_eve_w = p_eve_w.max(floor);
        }
        Ok(PowerSample { p_bob_w, p_eve_w })
    }

    fn noise(&self) -> (f64, f64) {
        (self.scenario.noise_bob_w, self.scenario.noise_eve_w)
    }
}

/// Replays recorded readings in order, ignoring the configuration.
#[derive(Debug, Clone)]
pub struct TraceReplayEvaluator {
    readings: Vec<PowerSample>,
    next: usize,
    noise: (f64, f64),
}

impl TraceReplayEvaluator {
    pub fn new(readings: Vec<PowerSample>, noise_bob_w: f64, noise_eve_w: f64) -> Self {
        TraceReplayEvaluator {
            readings,
            next: 0,
            noise: (noise_bob_w, noise_eve_w),
        }
    }
}

impl PowerEvaluator for TraceReplayEvaluator {
    fn evaluate(&mut self, _config: &RisConfiguration) -> Result<PowerSample> {
        let r = self
            .readings
            .get(self.next)
            .copied()
            .ok_or(Error::TraceExhausted(self.readings.len()))?;
        self.next += 1;
        Ok(r)
    }

    fn noise(&self) -> (f64, f64) {
        self.noise
    }
}

/// One trial of the greedy sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// 1-based trial counter.
    pub step: usize,
    /// Index into the active-element list.
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub trial_state: u8,
    pub accepted: bool,
    pub p_bob_w: f64,
    pub p_eve_w: f64,
    pub score: f64,
    pub best_score: f64,
    /// Powers of the best configuration found so far.
    pub best_p_bob_w: f64,
    pub best_p_eve_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    pub num_states: usize,
    pub seed: u64,
    /// Number of full sweeps over the elements; 1 visits every element once.
    pub passes: usize,
}

impl GreedyOptions {
    pub fn new(num_states: usize, seed: u64) -> Self {
        GreedyOptions {
            num_states,
            seed,
            passes: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: RisConfiguration,
    /// Reading of the all-zero starting configuration.
    pub initial: PowerSample,
    pub initial_score: f64,
    pub step_list: Vec<usize>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn final_score(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_score, |r| r.best_score)
    }

    pub fn final_powers(&self) -> PowerSample {
        self.records.last().map_or(self.initial, |r| PowerSample {
            p_bob_w: r.best_p_bob_w,
            p_eve_w: r.best_p_eve_w,
        })
    }

    /// Incumbent powers at every point: the initial reading followed by one per trial.
    pub fn incumbent_trace(&self) -> Vec<PowerSample> {
        std::iter::once(self.initial)
            .chain(self.records.iter().map(|r| PowerSample {
                p_bob_w: r.best_p_bob_w,
                p_eve_w: r.best_p_eve_w,
            }))
            .collect()
    }
}

fn evaluate_at(
    evaluator: &mut dyn PowerEvaluator,
    config: &RisConfiguration,
    objective: Objective,
    step: usize,
) -> Result<(PowerSample, f64)> {
    let wrap = |e| Error::Evaluation {
        step,
        source: Box::new(e),
    };
    let sample = evaluator.evaluate(config).map_err(wrap)?;
    let (nb, ne) = evaluator.noise();
    let score = objective.score(sample, nb, ne).map_err(wrap)?;
    Ok((sample, score))
}

/// Seeded visiting order of `count` elements.
pub fn step_list(count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    order
}

/// Starts from the all-zero configuration, visits the active elements in a
/// shuffled order and for each trials every state, keeping a state only when
/// it strictly beats the best score so far (initially −∞).
pub fn greedy_sweep(
    evaluator: &mut dyn PowerEvaluator,
    geometry: &RisGeometry,
    objective: Objective,
    options: GreedyOptions,
) -> Result<SweepResult> {
    state_phase_table(options.num_states)?;
    let elements = geometry.active_elements();
    let mut config = RisConfiguration::zeros(elements.len(), options.num_states);
    let (initial, initial_score) = evaluate_at(evaluator, &config, objective, 0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best_score = f64::NEG_INFINITY;
    let mut best = initial;
    let mut records = Vec::with_capacity(elements.len() * options.num_states * options.passes);
    let mut first_list = Vec::new();
    for pass in 0..options.passes {
        let order = step_list(elements.len(), &mut rng);
        if pass == 0 {
            first_list = order.clone();
        }
        for &k in &order {
            let (m, n) = elements[k];
            let mut keep = config.get(k);
            for state in 0..options.num_states as u8 {
                config.set(k, state);
                let step = records.len() + 1;
                let (sample, score) = evaluate_at(evaluator, &config, objective, step)?;
                let accepted = score > best_score;
                if accepted {
                    best_score = score;
                    best = sample;
                    keep = state;
                }
                records.push(SweepRecord {
                    step,
                    k,
                    m,
                    n,
                    trial_state: state,
                    accepted,
                    p_bob_w: sample.p_bob_w,
                    p_eve_w: sample.p_eve_w,
                    score,
                    best_score,
                    best_p_bob_w: best.p_bob_w,
                    best_p_eve_w: best.p_eve_w,
                });
            }
            config.set(k, keep);
        }
    }
    Ok(SweepResult {
        config,
        initial,
        initial_score,
        step_list: first_list,
        records,
    })
}

/// Enumerates every configuration of `active` elements, element 0 most
/// significant; ties keep the first configuration found.
pub fn exhaustive_search(
    evaluator: &mut dyn PowerEvaluator,
    active: usize,
    objective: Objective,
    num_states: usize,
    cap: u128,
) -> Result<(RisConfiguration, f64)> {
    state_phase_table(num_states)?;
    if active == 0 {
        return Err(Error::Empty("no active elements to search".into()));
    }
    let count = u32::try_from(active)
        .ok()
        .and_then(|a| (num_states as u128).checked_pow(a));
    let count = match count {
        Some(c) if c <= cap => c,
        Some(c) => {
            return Err(Error::SearchCapExceeded {
                count: c.to_string(),
                cap,
            })
        }
        None => {
            return Err(Error::SearchCapExceeded {
                count: format!("{num_states}^{active}"),
                cap,
            })
        }
    };
    let mut config = RisConfiguration::zeros(active, num_states);
    let mut best: Option<(RisConfiguration, f64)> = None;
    for index in 0..count {
        let mut rest = index;
        for k in (0..active).rev() {
            config.set(k, (rest % num_states as u128) as u8);
            rest /= num_states as u128;
        }
        let (_, score) = evaluate_at(evaluator, &config, objective, index as usize + 1)?;
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((config.clone(), score));
        }
    }
    Ok(best.expect("at least one configuration"))
}

/// Best of `trials` uniformly drawn configurations.
pub fn random_search(
    evaluator: &mut dyn PowerEvaluator,
    active: usize,
    objective: Objective,
    num_states: usize,
    trials: usize,
    seed: u64,
) -> Result<(RisConfiguration, f64)> {
    state_phase_table(num_states)?;
    if trials == 0 {
        return Err(Error::Domain(
            "random search needs at least one trial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(RisConfiguration, f64)> = None;
    for t in 0..trials {
        let states = (0..active)
            .map(|_| rng.random_range(0..num_states) as u8)
            .collect();
        let config = RisConfiguration::new(states, num_states)?;
        let (_, score) = evaluate_at(evaluator, &config, objective, t + 1)?;
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((config, score));
        }
    }
    Ok(best.expect("trials >= 1"))
}

fn fmt_dbm(watts: f64) -> String {
    match watts_to_dbm(watts) {
        Ok(v) => v.to_string(),
        Err(_) => "-inf".to_string(),
    }
}

/// Writes the sweep log as CSV, powers in dBm, preceded by `# key=value` lines.
pub fn write_sweep_csv<W: Write>(
    mut out: W,
    records: &[SweepRecord],
    metadata: &[(String, String)],
) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(
        out,
        "step,m,n,trial_state,accepted,P_b_dB,P_e_dB,score,best_score"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.step,
            r.m,
            r.n,
            r.trial_state,
            u8::from(r.accepted),
            fmt_dbm(r.p_bob_w),
            fmt_dbm(r.p_eve_w),
            r.score,
            r.best_score
        )?;
    }
    Ok(())
}

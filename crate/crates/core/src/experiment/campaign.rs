use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::placement::{sample_placement_with, PlacementConstraints};
use super::stats::{aggregate_boxplot, RunStatistics};
use crate::channel::{calibrate_noise, secrecy_capacity, watts_to_dbm, Scenario};
use crate::error::{Error, Result};
use crate::optimizer::{greedy_sweep, GreedyOptions, Objective, SimulatedEvaluator, SweepResult};
use crate::ris::RisGeometry;

pub const DEFAULT_INITIAL_SNR_DB: f64 = 30.0;

/// Where each run's terminal positions come from.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    /// Every run uses the same positions; only the visiting order changes.
    Fixed(Scenario),
    /// Positions are drawn per run; link budget fields come from `template`.
    Sampled {
        constraints: PlacementConstraints,
        template: Scenario,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Noise powers taken from the scenario as given.
    AsGiven,
    /// Equal noise sized per run for the given initial SNR (geometric mean over Bob and Eve).
    Calibrated { snr_db: f64 },
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub runs: usize,
    pub source: ScenarioSource,
    pub geometry: RisGeometry,
    pub objective: Objective,
    pub num_states: usize,
    pub base_seed: u64,
    pub noise: NoiseModel,
    pub passes: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub sensitivity_floor_w: Option<f64>,
}

impl CampaignConfig {
    pub fn new(
        runs: usize,
        source: ScenarioSource,
        geometry: RisGeometry,
        objective: Objective,
        num_states: usize,
        base_seed: u64,
    ) -> Self {
        CampaignConfig {
            runs,
            source,
            geometry,
            objective,
            num_states,
            base_seed,
            noise: NoiseModel::Calibrated {
                snr_db: DEFAULT_INITIAL_SNR_DB,
            },
            passes: 1,
            jobs: None,
            sensitivity_floor_w: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub scenario: Scenario,
    pub sweep: SweepResult,
}

impl RunOutcome {
    /// Incumbent `P_b`, `P_e` (dBm) and `C_s` at the initial point and after every trial.
    pub fn traces(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let s = &self.scenario;
        let trace = self.sweep.incumbent_trace();
        let mut pb = Vec::with_capacity(trace.len());
        let mut pe = Vec::with_capacity(trace.len());
        let mut cs = Vec::with_capacity(trace.len());
        for p in trace {
            pb.push(watts_to_dbm(p.p_bob_w)?);
            pe.push(watts_to_dbm(p.p_eve_w)?);
            cs.push(secrecy_capacity(
                p.p_bob_w,
                p.p_eve_w,
                s.noise_bob_w,
                s.noise_eve_w,
            )?);
        }
        Ok((pb, pe, cs))
    }
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub stats: RunStatistics,
    pub runs: Vec<RunOutcome>,
}

/// Seed used by run `k`.
pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}

fn run_scenario(config: &CampaignConfig, seed: u64) -> Result<Scenario> {
    let scenario = match &config.source {
        ScenarioSource::Fixed(s) => s.clone(),
        ScenarioSource::Sampled {
            constraints,
            template,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // placement draws on a separate stream from the visiting order
            rng.set_stream(1);
            let p = sample_placement_with(
                constraints,
                &config.geometry,
                template.wavelength(),
                &mut rng,
            )?;
            Scenario {
                alice: p.alice,
                bob: p.bob,
                eve: p.eve,
                ..template.clone()
            }
        }
    };
    match config.noise {
        NoiseModel::AsGiven => Ok(scenario),
        NoiseModel::Calibrated { snr_db } => calibrate_noise(&scenario, &config.geometry, snr_db),
    }
}

/// Executes one independent run.
pub fn run_once(config: &CampaignConfig, run: usize) -> Result<RunOutcome> {
    let seed = run_seed(config.base_seed, run);
    let scenario = run_scenario(config, seed)?;
    let mut evaluator = SimulatedEvaluator::new(&scenario, &config.geometry, config.num_states)?;
    if let Some(floor) = config.sensitivity_floor_w {
        evaluator = evaluator.with_sensitivity_floor(floor);
    }
    let mut options = GreedyOptions::new(config.num_states, seed);
    options.passes = config.passes;
    let sweep = greedy_sweep(&mut evaluator, &config.geometry, config.objective, options)?;
    Ok(RunOutcome {
        run,
        seed,
        scenario,
        sweep,
    })
}

/// Runs every sweep (in parallel when allowed) and aggregates in run order.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult> {
    if config.runs == 0 {
        return Err(Error::Domain("a campaign needs at least one run".into()));
    }
    let work = || -> Vec<Result<RunOutcome>> {
        (0..config.runs)
            .into_par_iter()
            .map(|k| run_once(config, k))
            .collect()
    };
    let results = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut runs = Vec::with_capacity(config.runs);
    for (k, r) in results.into_iter().enumerate() {
        runs.push(r.map_err(|e| Error::Run {
            run: k,
            source: Box::new(e),
        })?);
    }
    let stats = aggregate_runs(&runs)?;
    Ok(CampaignResult { stats, runs })
}

pub fn aggregate_runs(runs: &[RunOutcome]) -> Result<RunStatistics> {
    let mut pb = Vec::with_capacity(runs.len());
    let mut pe = Vec::with_capacity(runs.len());
    let mut cs = Vec::with_capacity(runs.len());
    for r in runs {
        let (b, e, c) = r.traces()?;
        pb.push(b);
        pe.push(e);
        cs.push(c);
    }
    let pb_db = aggregate_boxplot(&pb)?;
    Ok(RunStatistics {
        runs: runs.len(),
        iterations: pb_db.len(),
        pb_db,
        pe_db: aggregate_boxplot(&pe)?,
        cs: aggregate_boxplot(&cs)?,
    })
}

#[derive(Serialize)]
struct StatsDocument<'a> {
    meta: &'a BTreeMap<String, String>,
    #[serde(flatten)]
    stats: &'a RunStatistics,
}

/// Pretty-printed `stats.json` with a leading `meta` object.
pub fn write_stats_json<W: Write>(
    mut out: W,
    stats: &RunStatistics,
    meta: &BTreeMap<String, String>,
) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &StatsDocument { meta, stats })?;
    writeln!(out)?;
    Ok(())
}

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use ris_pls::channel::{
    calibrate_noise, dbfs_fullscale, dbm_to_watts, secrecy_capacity, watts_to_dbm, wavelength,
};
use ris_pls::experiment::{
    block_dbfs, builtin_presets, noise_floor_report, preset, read_trace, run_campaign,
    secrecy_trace, write_stats_json, CampaignConfig, MeasuredTrace, NoiseModel,
    PlacementConstraints, ScenarioConfig, ScenarioSource,
};
use ris_pls::optimizer::{
    exhaustive_search, greedy_sweep, random_search, write_sweep_csv, GreedyOptions, Objective,
    SimulatedEvaluator, DEFAULT_EXHAUSTIVE_CAP,
};
use ris_pls::radiation::{scattered_field, AngularGrid, Illumination};
use ris_pls::ris::{
    bits_to_string, encode_pin_bits, state_phase_table, RisConfiguration, RisGeometry,
};
use ris_pls::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "ris-pls",
    version,
    about = "RIS-assisted physical-layer security simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in terminal placements.
    Presets,
    /// Export the scattered radiation pattern of a configuration.
    Pattern(PatternArgs),
    /// Run one greedy sweep and report the final configuration.
    Optimize(OptimizeArgs),
    /// Run many sweeps and write per-iteration statistics.
    Campaign(CampaignArgs),
    /// Compare greedy, exhaustive and random search on a small sub-array.
    Oracle(OracleArgs),
    /// Reduce recorded I/Q traces to noise-floor and secrecy reports.
    Ingest(IngestArgs),
}

/// Scenario flags; each mirrors a scenario-file key.
#[derive(Args, Default)]
struct ScenarioArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Start from a built-in placement (loc1, loc2, loc3).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    alice_xyz: Option<String>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    bob_xyz: Option<String>,
    #[arg(long, value_name = "X,Y,Z", allow_hyphen_values = true)]
    eve_xyz: Option<String>,
    #[arg(long)]
    carrier_hz: Option<String>,
    #[arg(long)]
    tx_power_w: Option<String>,
    #[arg(long)]
    noise_b_w: Option<String>,
    #[arg(long)]
    noise_e_w: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    grid_m: Option<String>,
    #[arg(long)]
    grid_n: Option<String>,
    #[arg(long)]
    dx_m: Option<String>,
    #[arg(long)]
    dy_m: Option<String>,
    /// Phase states per element (2 or 4).
    #[arg(long)]
    states: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Initial SNR used to size the noise when no noise power is given.
    #[arg(long, allow_hyphen_values = true)]
    initial_snr_db: Option<String>,
    #[arg(long)]
    cutout_m: Option<String>,
    #[arg(long)]
    cutout_n: Option<String>,
}

#[derive(Args)]
struct PatternArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Configuration as a state-digit string or 152-bit diode word (default all zero).
    #[arg(long, value_name = "STATES")]
    ris: Option<String>,
    /// Read the configuration string from a file.
    #[arg(long, value_name = "FILE", conflicts_with = "ris")]
    ris_file: Option<PathBuf>,
    /// Grid resolution in degrees.
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,
    #[arg(long, value_enum, default_value_t = IlluminationArg::Alice)]
    illumination: IlluminationArg,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IlluminationArg {
    Alice,
    Plane,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MaxSecrecy,
    MaxBob,
    MinEve,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MaxSecrecy => Objective::MaxSecrecy,
            ObjectiveArg::MaxBob => Objective::MaxBobPower,
            ObjectiveArg::MinEve => Objective::MinEvePower,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxSecrecy)]
    objective: ObjectiveArg,
    /// Full sweeps over the elements.
    #[arg(long, default_value_t = 1)]
    passes: usize,
    /// Receiver sensitivity floor in dBm.
    #[arg(long, allow_hyphen_values = true)]
    floor_dbm: Option<f64>,
    /// Sweep log CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxSecrecy)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 1)]
    passes: usize,
    #[arg(long, allow_hyphen_values = true)]
    floor_dbm: Option<f64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write `sweep_<k>.csv` for every run.
    #[arg(long)]
    sweep_logs: bool,
    #[arg(long, default_value = "campaign")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Active elements kept (row-major) in the sub-array.
    #[arg(long, default_value_t = 8)]
    elements: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxSecrecy)]
    objective: ObjectiveArg,
    /// Random-search draws per instance.
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Number of seeds (seed, seed+1, ...) to compare.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    cap: u128,
}

#[derive(Args)]
struct IngestArgs {
    /// Bob's noise traces (`i,q` files).
    #[arg(long, num_args = 1.., required = true)]
    bob: Vec<PathBuf>,
    /// Eve's noise traces (`i,q` files).
    #[arg(long, num_args = 1.., required = true)]
    eve: Vec<PathBuf>,
    /// Per-iteration received powers (`pb_dbfs,pe_dbfs` file) to turn into a secrecy trace.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    block_len: usize,
    /// Apply the measured noise difference instead of treating the floors as equal.
    #[arg(long)]
    include_noise_difference: bool,
    /// Reference dBFS values to a 2048-count full scale.
    #[arg(long)]
    fullscale_ref: bool,
    /// Report JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Resolved {
    config: ScenarioConfig,
    geometry: RisGeometry,
    seed: u64,
}

impl ScenarioArgs {
    fn flags(&self) -> std::result::Result<ScenarioConfig, String> {
        let mut c = ScenarioConfig::default();
        let pairs = [
            ("alice_xyz", &self.alice_xyz),
            ("bob_xyz", &self.bob_xyz),
            ("eve_xyz", &self.eve_xyz),
            ("carrier_hz", &self.carrier_hz),
            ("tx_power_w", &self.tx_power_w),
            ("noise_b_w", &self.noise_b_w),
            ("noise_e_w", &self.noise_e_w),
            ("gamma", &self.gamma),
            ("grid_m", &self.grid_m),
            ("grid_n", &self.grid_n),
            ("dx_m", &self.dx_m),
            ("dy_m", &self.dy_m),
            ("states", &self.states),
            ("seed", &self.seed),
            ("initial_snr_db", &self.initial_snr_db),
            ("cutout_m", &self.cutout_m),
            ("cutout_n", &self.cutout_n),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                c.set(key, v)
                    .map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
            }
        }
        Ok(c)
    }

    /// Preset, then file, then flags; a missing seed is drawn from the OS.
    fn resolve(&self) -> Result<Resolved> {
        let mut config = ScenarioConfig::default();
        if let Some(name) = &self.preset {
            let p = preset(name)?;
            config.alice_xyz = Some(p.alice);
            config.bob_xyz = Some(p.bob);
            config.eve_xyz = Some(p.eve);
        }
        if let Some(path) = &self.scenario {
            config.overlay(&ScenarioConfig::load(path)?);
        }
        config.overlay(&self.flags().map_err(|reason| Error::Parse {
            path: "<args>".into(),
            line: 0,
            reason,
        })?);
        let seed = *config.seed.get_or_insert_with(rand::random);
        let geometry = config.geometry()?;
        Ok(Resolved {
            config,
            geometry,
            seed,
        })
    }

    fn has_positions(&self, config: &ScenarioConfig) -> bool {
        config.alice_xyz.is_some() && config.bob_xyz.is_some() && config.eve_xyz.is_some()
    }
}

fn config_hash(config: &ScenarioConfig, extra: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    h.update(config.canonical());
    for (k, v) in extra {
        h.update(format!("{k}={v}\n"));
    }
    format!("{:x}", h.finalize())
}

fn metadata(command: &str, r: &Resolved, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut m = vec![
        ("tool".to_string(), "ris-pls".to_string()),
        ("version".to_string(), VERSION.to_string()),
        ("command".to_string(), command.to_string()),
        ("seed".to_string(), r.seed.to_string()),
        ("config_sha256".to_string(), config_hash(&r.config, extra)),
    ];
    m.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    m
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dbm(w: f64) -> String {
    watts_to_dbm(w).map_or_else(|_| "-inf".into(), |v| format!("{v:.4}"))
}

fn cmd_presets() -> Result<()> {
    let fmt = |v: ris_pls::geometry::Vec3| format!("({:.2}, {:.2}, {:.2})", v.x, v.y, v.z);
    println!("name alice bob eve");
    for p in builtin_presets() {
        println!("{} {} {} {}", p.name, fmt(p.alice), fmt(p.bob), fmt(p.eve));
    }
    Ok(())
}

fn cmd_pattern(a: &PatternArgs) -> Result<()> {
    let r = a.scenario.resolve()?;
    let scenario = r.config.scenario(&r.geometry)?;
    let states = r.config.num_states();
    let text = match (&a.ris, &a.ris_file) {
        (Some(s), _) => Some(s.clone()),
        (None, Some(p)) => Some(fs::read_to_string(p)?),
        (None, None) => None,
    };
    let config = match &text {
        Some(t) => RisConfiguration::parse(t, &r.geometry, states)?,
        None => RisConfiguration::zeros(r.geometry.active_count(), states),
    };
    let grid = AngularGrid::uniform(a.grid_step)?;
    let illumination = match a.illumination {
        IlluminationArg::Alice => Illumination::FromAlice,
        IlluminationArg::Plane => Illumination::PlaneWave,
    };
    let table = state_phase_table(states)?;
    let pattern = scattered_field(&r.geometry, &config, &table, &scenario, illumination, &grid)?;
    let meta = metadata(
        "pattern",
        &r,
        &[
            ("ris", config.to_string()),
            ("grid_step_deg", a.grid_step.to_string()),
        ],
    );
    let mut out = open_out(a.out.as_deref())?;
    pattern.write_csv(&mut out, &meta)?;
    out.flush()?;
    drop(out);
    let report = |name: &str, p| -> Result<()> {
        eprintln!(
            "gain_toward_{name}_dbi={:.4}",
            pattern.gain_toward_point(p)?
        );
        Ok(())
    };
    report("alice", scenario.alice)?;
    report("bob", scenario.bob)?;
    report("eve", scenario.eve)?;
    eprintln!("peak_dbi={:.4}", pattern.peak_dbi());
    Ok(())
}

fn floor_w(floor_dbm: Option<f64>) -> Option<f64> {
    floor_dbm.map(dbm_to_watts)
}

fn cmd_optimize(a: &OptimizeArgs) -> Result<()> {
    let r = a.scenario.resolve()?;
    let scenario = r.config.scenario(&r.geometry)?;
    let states = r.config.num_states();
    let objective = Objective::from(a.objective);
    let mut evaluator = SimulatedEvaluator::new(&scenario, &r.geometry, states)?;
    if let Some(f) = floor_w(a.floor_dbm) {
        evaluator = evaluator.with_sensitivity_floor(f);
    }
    let mut options = GreedyOptions::new(states, r.seed);
    options.passes = a.passes;
    let sweep = greedy_sweep(&mut evaluator, &r.geometry, objective, options)?;
    let meta = metadata(
        "optimize",
        &r,
        &[
            ("objective", objective.to_string()),
            ("passes", a.passes.to_string()),
        ],
    );
    if let Some(path) = &a.out {
        let mut out = open_out(Some(path))?;
        write_sweep_csv(&mut out, &sweep.records, &meta)?;
        out.flush()?;
    }
    let cs = |p: f64, e: f64| secrecy_capacity(p, e, scenario.noise_bob_w, scenario.noise_eve_w);
    let fin = sweep.final_powers();
    let mut o = io::stdout().lock();
    for (k, v) in &meta {
        writeln!(o, "# {k}={v}")?;
    }
    writeln!(o, "noise_b_dbm={}", dbm(scenario.noise_bob_w))?;
    writeln!(o, "noise_e_dbm={}", dbm(scenario.noise_eve_w))?;
    writeln!(o, "initial_p_b_dbm={}", dbm(sweep.initial.p_bob_w))?;
    writeln!(o, "initial_p_e_dbm={}", dbm(sweep.initial.p_eve_w))?;
    writeln!(
        o,
        "initial_c_s={:.6}",
        cs(sweep.initial.p_bob_w, sweep.initial.p_eve_w)?
    )?;
    writeln!(o, "final_p_b_dbm={}", dbm(fin.p_bob_w))?;
    writeln!(o, "final_p_e_dbm={}", dbm(fin.p_eve_w))?;
    writeln!(o, "final_c_s={:.6}", cs(fin.p_bob_w, fin.p_eve_w)?)?;
    writeln!(o, "states={}", sweep.config)?;
    match encode_pin_bits(&sweep.config, &r.geometry) {
        Ok(bits) => writeln!(o, "diode_word={}", bits_to_string(&bits))?,
        Err(_) => writeln!(o, "diode_word=n/a")?,
    }
    Ok(())
}

fn cmd_campaign(a: &CampaignArgs) -> Result<()> {
    let r = a.scenario.resolve()?;
    let states = r.config.num_states();
    let objective = Objective::from(a.objective);
    let source = if a.scenario.has_positions(&r.config) {
        // noise, when calibrated, is sized per run by the campaign
        let s = r.config.link_template(
            r.config.alice_xyz.unwrap(),
            r.config.bob_xyz.unwrap(),
            r.config.eve_xyz.unwrap(),
        );
        s.validate()?;
        ScenarioSource::Fixed(s)
    } else {
        let template = r.config.link_template(
            ris_pls::geometry::Vec3::new(0.0, 0.0, 1.0),
            ris_pls::geometry::Vec3::new(0.0, 0.0, 1.0),
            ris_pls::geometry::Vec3::new(0.0, 0.0, 1.0),
        );
        ScenarioSource::Sampled {
            constraints: PlacementConstraints::default(),
            template,
        }
    };
    let mut cfg = CampaignConfig::new(
        a.runs,
        source.clone(),
        r.geometry.clone(),
        objective,
        states,
        r.seed,
    );
    cfg.noise = if r.config.noise_is_calibrated() {
        NoiseModel::Calibrated {
            snr_db: r.config.initial_snr(),
        }
    } else {
        NoiseModel::AsGiven
    };
    cfg.passes = a.passes;
    cfg.jobs = a.jobs;
    cfg.sensitivity_floor_w = floor_w(a.floor_dbm);
    let result = run_campaign(&cfg)?;

    let mode = match source {
        ScenarioSource::Fixed(_) => "fixed",
        ScenarioSource::Sampled { .. } => "sampled",
    };
    let meta_pairs = metadata(
        "campaign",
        &r,
        &[
            ("objective", objective.to_string()),
            ("runs", a.runs.to_string()),
            ("placement", mode.to_string()),
            ("passes", a.passes.to_string()),
        ],
    );
    fs::create_dir_all(&a.out_dir)?;
    let meta: BTreeMap<String, String> = meta_pairs.iter().cloned().collect();
    let mut out = BufWriter::new(File::create(a.out_dir.join("stats.json"))?);
    write_stats_json(&mut out, &result.stats, &meta)?;
    out.flush()?;
    if a.sweep_logs {
        for run in &result.runs {
            let mut m = meta_pairs.clone();
            m.push(("run".into(), run.run.to_string()));
            m.push(("run_seed".into(), run.seed.to_string()));
            let mut f = BufWriter::new(File::create(
                a.out_dir.join(format!("sweep_{}.csv", run.run)),
            )?);
            write_sweep_csv(&mut f, &run.sweep.records, &m)?;
            f.flush()?;
        }
    }
    let s = &result.stats;
    let last = s.iterations - 1;
    println!("seed={}", r.seed);
    println!("runs={} iterations={}", s.runs, s.iterations);
    println!(
        "mean_p_b_dbm initial={:.4} final={:.4}",
        s.pb_db.mean[0], s.pb_db.mean[last]
    );
    println!(
        "mean_p_e_dbm initial={:.4} final={:.4}",
        s.pe_db.mean[0], s.pe_db.mean[last]
    );
    println!(
        "mean_c_s initial={:.4} final={:.4}",
        s.cs.mean[0], s.cs.mean[last]
    );
    println!("stats={}", a.out_dir.join("stats.json").display());
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    ris_pls::experiment::quantile_sorted(&v, 0.5)
}

fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let r = a.scenario.resolve()?;
    let states = r.config.num_states();
    let objective = Objective::from(a.objective);
    let sub = r.geometry.truncated(a.elements)?;
    let count = u32::try_from(a.elements)
        .ok()
        .and_then(|e| (states as u128).checked_pow(e));
    if count.is_none_or(|c| c > a.cap) {
        return Err(Error::SearchCapExceeded {
            count: count.map_or_else(|| format!("{states}^{}", a.elements), |c| c.to_string()),
            cap: a.cap,
        });
    }
    let sampled = !a.scenario.has_positions(&r.config);
    let mut o = io::stdout().lock();
    for (k, v) in metadata(
        "oracle",
        &r,
        &[
            ("objective", objective.to_string()),
            ("elements", a.elements.to_string()),
        ],
    ) {
        writeln!(o, "# {k}={v}")?;
    }
    writeln!(o, "seed,greedy,exhaustive,random,greedy_gap,random_gap")?;
    let mut ratios = Vec::with_capacity(a.repeats);
    for i in 0..a.repeats {
        let seed = r.seed.wrapping_add(i as u64);
        let scenario = if sampled {
            let p = ris_pls::experiment::sample_placement(
                &PlacementConstraints::default(),
                &r.geometry,
                wavelength(r.config.carrier()),
                seed,
            )?;
            let s = r.config.link_template(p.alice, p.bob, p.eve);
            if r.config.noise_is_calibrated() {
                calibrate_noise(&s, &sub, r.config.initial_snr())?
            } else {
                s
            }
        } else {
            let s = r.config.link_template(
                r.config.alice_xyz.unwrap(),
                r.config.bob_xyz.unwrap(),
                r.config.eve_xyz.unwrap(),
            );
            if r.config.noise_is_calibrated() {
                calibrate_noise(&s, &sub, r.config.initial_snr())?
            } else {
                s
            }
        };
        let ev = || SimulatedEvaluator::new(&scenario, &sub, states);
        let greedy = greedy_sweep(
            &mut ev()?,
            &sub,
            objective,
            GreedyOptions::new(states, seed),
        )?
        .final_score();
        let (_, best) = exhaustive_search(&mut ev()?, a.elements, objective, states, a.cap)?;
        let (_, rnd) = random_search(&mut ev()?, a.elements, objective, states, a.trials, seed)?;
        writeln!(
            o,
            "{seed},{greedy},{best},{rnd},{},{}",
            best - greedy,
            best - rnd
        )?;
        if best != 0.0 {
            ratios.push(greedy / best);
        }
    }
    if !ratios.is_empty() {
        writeln!(o, "# median_greedy_over_exhaustive={}", median(ratios))?;
    }
    Ok(())
}

fn trace_blocks(paths: &[PathBuf], block_len: usize, fullscale: bool) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for p in paths {
        match read_trace(p)? {
            MeasuredTrace::Samples(s) => out.extend(block_dbfs(&s, block_len)?),
            MeasuredTrace::Summary(_) => {
                return Err(Error::Parse {
                    path: p.display().to_string(),
                    line: 1,
                    reason: "noise traces must be raw 'i,q' samples".into(),
                })
            }
        }
    }
    if fullscale {
        out.iter_mut().for_each(|v| *v = dbfs_fullscale(*v));
    }
    Ok(out)
}

fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    let bob = trace_blocks(&a.bob, a.block_len, a.fullscale_ref)?;
    let eve = trace_blocks(&a.eve, a.block_len, a.fullscale_ref)?;
    let mut report = noise_floor_report(&bob, &eve)?;
    report.neglect_noise_difference = !a.include_noise_difference;
    let mut doc = serde_json::json!({
        "meta": {
            "tool": "ris-pls",
            "version": VERSION,
            "command": "ingest",
            "block_len": a.block_len,
            "fullscale_ref": a.fullscale_ref,
        },
        "noise_floor": report,
    });
    if let Some(path) = &a.summary {
        let readings = match read_trace(path)? {
            MeasuredTrace::Summary(r) => r,
            MeasuredTrace::Samples(_) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: 1,
                    reason: "summary must have a 'pb_dbfs,pe_dbfs' header".into(),
                })
            }
        };
        let offset = a.include_noise_difference.then_some(report.difference_db);
        doc["secrecy"] = serde_json::json!(secrecy_trace(&readings, offset));
    }
    let mut out = open_out(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Presets => cmd_presets(),
        Command::Pattern(a) => cmd_pattern(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Ingest(a) => cmd_ingest(a),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "error[usage]: {}",
                one_line(first.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), one_line(&e.to_string()));
            ExitCode::from(if e.is_format() { 2 } else { 1 })
        }
    }
}

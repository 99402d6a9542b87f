use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use narxcomp_core::compensator::{initial_inputs, static_run, CompensationSession, Initialization};
use narxcomp_core::eval::{score_run, MonteCarloConfig, RunLayout, StaticSweep, TrackingRun};
use narxcomp_core::narx::{
    fixed_points, hysteresis_loop, simulate_free_run, LoopExcitation, NarxModel, Regime,
};
use narxcomp_core::plant::{BoucWen, HeaterParams, ModelPlant, Plant, SignalSpec};

use crate::config::{parse_grid, require, ExperimentConfig};
use crate::csv::{write_atomic, Table};
use crate::error::{AppError, AppResult};
use crate::model_file::{load_model, LoadedModel};
use crate::parallel::{monte_carlo_parallel, thread_cap};
use crate::reproduce::{bouc_wen_plant, reproduce, Target};
use crate::signal_arg::parse_signal;

/// NARX polynomial model compensation experiments.
#[derive(Parser, Debug)]
#[command(name = "narxcomp", version, about)]
pub struct Cli {
    /// TOML experiment file; its keys fill in any flag not given
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Free-run a model, and optionally a plant, under an input signal
    Simulate(SimulateArgs),
    /// Fixed points and Jacobian eigenvalue magnitudes for constant inputs
    FixedPoints(FixedPointArgs),
    /// Steady-state hysteresis loop of a model
    Loop(LoopArgs),
    /// Compensate a reference and compare with the uncompensated plant
    Compensate(CompensateArgs),
    /// Mean and spread of the compensated output under perturbed parameters
    Montecarlo(MonteCarloArgs),
    /// Regenerate a built-in table: table1, table3, table-bw-model, table-bw-comp, fig8
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Model file (JSON)
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// CSV destination; standard output when omitted or `-`
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct LoopFlags {
    /// Loop excitation amplitude [default: from the centre to the top of the input range]
    #[arg(long)]
    pub loop_amplitude: Option<f64>,
    /// Loop excitation frequency in Hz [default: the signal frequency]
    #[arg(long)]
    pub loop_frequency: Option<f64>,
    /// Loop excitation centre [default: middle of the input range]
    #[arg(long)]
    pub loop_center: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Input signal, e.g. `sine:A=0.2,f=0.001,u0=0.5`
    #[arg(long)]
    pub signal: Option<String>,
    /// Number of samples [default: three periods]
    #[arg(long)]
    pub n: Option<usize>,
    /// Also drive a plant: heater, bouc_wen, model or model_as_plant:<path>
    #[arg(long)]
    pub plant: Option<String>,
}

#[derive(Args, Debug)]
pub struct FixedPointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Constant inputs, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub u: Vec<f64>,
    /// Input grid `lo:hi:count`, used when --u is absent
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct LoopArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub excitation: LoopFlags,
}

#[derive(Args, Debug)]
pub struct CompensateArgs {
    #[command(flatten)]
    pub common: Common,
    /// static, dynamic or hysteresis
    #[arg(long)]
    pub mode: Option<String>,
    /// Reference signal, e.g. `sine:G0=30,f=2,phase=1.5708`
    #[arg(long)]
    pub signal: Option<String>,
    /// heater, bouc_wen, model or model_as_plant:<path> [default: model]
    #[arg(long)]
    pub plant: Option<String>,
    /// Number of samples [default: lead-in plus three periods]
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub excitation: LoopFlags,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub common: Common,
    /// static-sweep or tracking
    #[arg(long)]
    pub experiment: Option<String>,
    /// heater, bouc_wen, model or model_as_plant:<path>
    #[arg(long)]
    pub plant: Option<String>,
    /// Constant references `lo:hi:count` for the static sweep
    #[arg(long)]
    pub grid: Option<String>,
    /// Reference for the tracking experiment
    #[arg(long)]
    pub signal: Option<String>,
    /// Perturbation standard deviation relative to each |coefficient|
    #[arg(long)]
    pub rel_std: Option<f64>,
    /// Number of perturbed runs [default: 1000]
    #[arg(long)]
    pub runs: Option<usize>,
    /// Random seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples the static sweep waits before reading the output [default: 500]
    #[arg(long)]
    pub settle: Option<usize>,
    #[command(flatten)]
    pub excitation: LoopFlags,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    pub target: String,
    /// Directory holding heater.json, bw.json and bw_cns.json [default: models]
    #[arg(long)]
    pub models_dir: Option<PathBuf>,
    /// Length of the held-input run [default: 2000]
    #[arg(long)]
    pub n: Option<usize>,
    /// CSV destination; standard output when omitted or `-`
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("narxcomp: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> AppResult<()> {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let (table, output) = match cli.command {
        Command::Simulate(a) => (simulate(&a, &cfg)?, a.common.output),
        Command::FixedPoints(a) => (fixed_point_table(&a, &cfg)?, a.common.output),
        Command::Loop(a) => (loop_table(&a, &cfg)?, a.common.output),
        Command::Compensate(a) => (compensate_cmd(&a, &cfg)?, a.common.output),
        Command::Montecarlo(a) => (monte_carlo_cmd(&a, &cfg)?, a.common.output),
        Command::Reproduce(a) => {
            let target = Target::parse(&a.target).ok_or_else(|| {
                let names: Vec<_> = Target::ALL.iter().map(|t| t.name()).collect();
                AppError::config(format!(
                    "target: `{}` is not one of {}",
                    a.target,
                    names.join(", ")
                ))
            })?;
            let dir = a
                .models_dir
                .or(cfg.models_dir.clone())
                .unwrap_or_else(|| PathBuf::from("models"));
            let len = a.n.or(cfg.n).unwrap_or(2000);
            (reproduce(target, &dir, len)?, a.output)
        }
    };
    emit(&table, output.or(cfg.output))
}

fn emit(table: &Table, output: Option<PathBuf>) -> AppResult<()> {
    let text = table.render();
    match output.filter(|path| path.as_os_str() != "-") {
        Some(path) => write_atomic(&path, &text),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // The reader stopped early, as with `| head`.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other.map_err(|source| AppError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        },
    }
}

fn model_arg(common: &Common, cfg: &ExperimentConfig) -> AppResult<LoadedModel> {
    let path = require(common.model.clone(), cfg.model.clone(), "model")?;
    load_model(&path)
}

fn signal_arg(flag: &Option<String>, cfg: &ExperimentConfig) -> AppResult<SignalSpec> {
    let text = require(flag.clone(), cfg.signal.clone(), "signal")?;
    parse_signal(&text).map_err(AppError::Config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Static,
    Dynamic,
    Hysteresis,
}

fn parse_mode(text: &str) -> AppResult<Mode> {
    match text.trim_start_matches("compensate_") {
        "static" => Ok(Mode::Static),
        "dynamic" => Ok(Mode::Dynamic),
        "hysteresis" => Ok(Mode::Hysteresis),
        other => Err(AppError::config(format!(
            "mode: `{other}` is not static, dynamic or hysteresis"
        ))),
    }
}

fn default_mode(model: &NarxModel) -> Mode {
    if model.is_hysteretic() {
        Mode::Hysteresis
    } else {
        Mode::Dynamic
    }
}

fn loop_excitation(
    flags: &LoopFlags,
    cfg: &ExperimentConfig,
    loaded: &LoadedModel,
    signal: Option<&SignalSpec>,
) -> AppResult<LoopExcitation> {
    let range = loaded.model.input_range;
    let center = flags
        .loop_center
        .or(cfg.loop_center)
        .unwrap_or(0.5 * (range.lo + range.hi));
    let amplitude = flags
        .loop_amplitude
        .or(cfg.loop_amplitude)
        .unwrap_or(range.hi - center);
    let frequency = require(
        flags.loop_frequency.or(signal.map(|s| s.frequency)),
        cfg.loop_frequency,
        "loop_frequency",
    )?;
    let exc = LoopExcitation {
        amplitude,
        frequency,
        center,
        sample_period: loaded.sample_period,
    };
    if exc.period_samples() < 4 {
        return Err(AppError::config(
            "loop_frequency: fewer than four samples per loop period",
        ));
    }
    Ok(exc)
}

/// Plant choices; every variant is plain data so runs can share it across threads.
enum BuiltPlant {
    Heater(HeaterParams),
    BoucWen(BoucWen),
    Model(ModelPlant),
}

impl Plant for BuiltPlant {
    fn respond(&self, input: &[f64]) -> narxcomp_core::Result<Vec<f64>> {
        match self {
            BuiltPlant::Heater(p) => p.respond(input),
            BuiltPlant::BoucWen(p) => p.respond(input),
            BuiltPlant::Model(p) => p.respond(input),
        }
    }
}

/// Builds a plant; model plants start with every past output at `y0` and
/// every past input at `u0`.
fn build_plant(choice: &str, loaded: &LoadedModel, y0: f64, u0: f64) -> AppResult<BuiltPlant> {
    Ok(match choice {
        "heater" => BuiltPlant::Heater(HeaterParams::BENCHMARK),
        "bouc_wen" | "bouc-wen" => BuiltPlant::BoucWen(bouc_wen_plant(loaded)),
        "model" => BuiltPlant::Model(ModelPlant::at_rest(loaded.model.clone(), y0, u0)),
        other => match other.strip_prefix("model_as_plant:") {
            Some(path) => {
                let m = load_model(Path::new(path))?;
                BuiltPlant::Model(ModelPlant::at_rest(m.model, y0, u0))
            }
            None => {
                return Err(AppError::config(format!(
                    "plant: `{other}` is not heater, bouc_wen, model or model_as_plant:<path>"
                )))
            }
        },
    })
}

fn simulate(a: &SimulateArgs, cfg: &ExperimentConfig) -> AppResult<Table> {
    let loaded = model_arg(&a.common, cfg)?;
    let spec = signal_arg(&a.signal, cfg)?;
    let n =
        a.n.or(cfg.n)
            .unwrap_or_else(|| 3 * spec.period_samples(loaded.sample_period).max(1));
    let u = spec.generate(n, loaded.sample_period);
    let model = &loaded.model;
    let y = simulate_free_run(model, &u, &vec![0.0; model.output_depth()])?;
    let plant = match a.plant.clone().or(cfg.plant.clone()) {
        Some(choice) => Some(build_plant(&choice, &loaded, 0.0, u[0])?.respond(&u)?),
        None => None,
    };
    let mut header = vec!["k", "u", "y_model"];
    if plant.is_some() {
        header.push("y_plant");
    }
    let mut t = Table::new(&header);
    for k in 0..n {
        let mut row = vec![k as f64, u[k], y[k]];
        row.extend(plant.as_ref().map(|p| p[k]));
        t.push(&row);
    }
    Ok(t)
}

fn fixed_point_table(a: &FixedPointArgs, cfg: &ExperimentConfig) -> AppResult<Table> {
    let loaded = model_arg(&a.common, cfg)?;
    let inputs = if a.u.is_empty() {
        parse_grid(&require(a.grid.clone(), cfg.grid.clone(), "grid")?)?
    } else {
        a.u.clone()
    };
    let depth = loaded.model.output_depth();
    let mut header = vec!["u".to_owned(), "y".to_owned()];
    header.extend((1..=depth).map(|i| format!("lambda_{i}")));
    header.push("stable".into());
    let mut t = Table::new(&header);
    for u in inputs {
        for fp in fixed_points(&loaded.model, u)? {
            let mut row = vec![fp.u_bar, fp.y_bar];
            row.extend((0..depth).map(|i| fp.eigen_mags.get(i).copied().unwrap_or(f64::NAN)));
            t.push_mixed(&row, &[if fp.stable { "stable" } else { "unstable" }]);
        }
    }
    Ok(t)
}

fn loop_table(a: &LoopArgs, cfg: &ExperimentConfig) -> AppResult<Table> {
    let loaded = model_arg(&a.common, cfg)?;
    let signal = match &cfg.signal {
        Some(text) => Some(parse_signal(text).map_err(AppError::Config)?),
        None => None,
    };
    let exc = loop_excitation(&a.excitation, cfg, &loaded, signal.as_ref())?;
    let lp = hysteresis_loop(&loaded.model, &exc)?;
    let mut t = Table::new(&["u", "y", "regime"]);
    for (regime, name) in [
        (Regime::Loading, "loading"),
        (Regime::Unloading, "unloading"),
    ] {
        for &(u, y) in lp.branch(regime) {
            t.push_mixed(&[u, y], &[name]);
        }
    }
    Ok(t)
}

fn compensate_cmd(a: &CompensateArgs, cfg: &ExperimentConfig) -> AppResult<Table> {
    let loaded = model_arg(&a.common, cfg)?;
    let model = &loaded.model;
    let spec = signal_arg(&a.signal, cfg)?;
    let mode = match a.mode.clone().or(cfg.mode.clone()) {
        Some(text) => parse_mode(&text)?,
        None => default_mode(model),
    };
    let ts = loaded.sample_period;
    let n = a.n.or(cfg.n);
    let layout = match (RunLayout::new(&spec, ts), n) {
        (Ok(layout), _) => layout,
        // Constant and other aperiodic references: score the whole run.
        (Err(_), Some(n)) => RunLayout {
            lead: 0,
            period: n,
            len: n,
            scored: 0..n,
        },
        (Err(e), None) => {
            return Err(AppError::config(format!(
                "signal: {e}; pass --n to run it without a period"
            )))
        }
    };
    let len = n.unwrap_or(layout.len);
    if len < 3 {
        return Err(AppError::config("n: need at least three samples"));
    }
    let reference = spec.generate_from(-(layout.lead as i64), len, ts);
    let scored = layout.scored.start.min(len - 2)..len;

    let run = match mode {
        Mode::Static => static_run(model, &reference)?,
        Mode::Dynamic | Mode::Hysteresis => {
            let init = match mode {
                Mode::Hysteresis => {
                    Initialization::Loop(loop_excitation(&a.excitation, cfg, &loaded, Some(&spec))?)
                }
                _ => Initialization::Static,
            };
            let seed = initial_inputs(model, &reference, &init)?;
            CompensationSession::new(model, &seed)?.run(&reference)?
        }
    };
    let choice = a
        .plant
        .clone()
        .or(cfg.plant.clone())
        .unwrap_or_else(|| "model".into());
    let plant = build_plant(&choice, &loaded, reference[0], run.inputs[0])?;
    let report = score_run(&plant, &reference, &run, scored, layout.period.min(len))?;
    eprintln!(
        "mape_comp={:.4} mape_uncomp={:.4} effort_energy={:.6} effort_std={:.6} hold_rate={:.4}",
        report.mape_comp,
        report.mape_uncomp,
        report.effort.energy,
        report.effort.std_dev,
        report.hold_rate
    );
    let mut t = Table::new(&["k", "r", "m", "y_c", "y_u"]);
    for row in &report.series {
        t.push_indexed(
            row.k,
            &[row.reference, row.input, row.compensated, row.uncompensated],
        );
    }
    Ok(t)
}

fn monte_carlo_cmd(a: &MonteCarloArgs, cfg: &ExperimentConfig) -> AppResult<Table> {
    let loaded = model_arg(&a.common, cfg)?;
    let model = &loaded.model;
    let mc = MonteCarloConfig {
        rel_std: require(a.rel_std, cfg.rel_std, "rel_std")?,
        runs: a.runs.or(cfg.runs).unwrap_or(1000),
        seed: a.seed.or(cfg.seed).unwrap_or(0),
    };
    let choice = require(a.plant.clone(), cfg.plant.clone(), "plant")?;
    let threads = thread_cap()?;
    let experiment = a
        .experiment
        .clone()
        .or(cfg.experiment.clone())
        .unwrap_or_else(|| "static-sweep".into());
    let band = match experiment.as_str() {
        "static-sweep" => {
            let range = model.output_range;
            let grid = match a.grid.clone().or(cfg.grid.clone()) {
                Some(text) => parse_grid(&text)?,
                None => (1..=20)
                    .map(|i| range.lo + range.span() * i as f64 / 20.0)
                    .collect(),
            };
            let sweep = StaticSweep {
                plant: build_plant(&choice, &loaded, 0.0, 0.0)?,
                grid,
                settle: a.settle.or(cfg.settle).unwrap_or(500),
            };
            monte_carlo_parallel(model, &sweep, &mc, threads)?
        }
        "tracking" => {
            let spec = signal_arg(&a.signal, cfg)?;
            let layout = RunLayout::new(&spec, loaded.sample_period)?;
            let reference = layout.generate(&spec, loaded.sample_period);
            let init = match default_mode(model) {
                Mode::Hysteresis => {
                    Initialization::Loop(loop_excitation(&a.excitation, cfg, &loaded, Some(&spec))?)
                }
                _ => Initialization::Static,
            };
            let u0 = initial_inputs(model, &reference, &init)?[0];
            let tracking = TrackingRun {
                plant: build_plant(&choice, &loaded, reference[0], u0)?,
                reference,
                init,
                window: layout.scored,
            };
            monte_carlo_parallel(model, &tracking, &mc, threads)?
        }
        other => {
            return Err(AppError::config(format!(
                "experiment: `{other}` is not static-sweep or tracking"
            )))
        }
    };
    eprintln!(
        "runs_used={} runs_skipped={}",
        band.runs_used, band.runs_skipped
    );
    let (lower, upper) = (band.lower(), band.upper());
    let mut t = Table::new(&["x", "mean", "std", "lower", "upper"]);
    for i in 0..band.grid.len() {
        t.push(&[
            band.grid[i],
            band.mean[i],
            band.std_dev[i],
            lower[i],
            upper[i],
        ]);
    }
    Ok(t)
}

mod settings;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use qwalk_core::lackadaisical::{
    evolve_reduced, initial_reduced_state, optimal_steps, success_trajectory, write_trajectory_csv, GraphParams,
};
use qwalk_core::mlp::{generate_fixed_weights, Interval};
use qwalk_core::search_space::{solution_count_table, write_solution_table_csv};
use qwalk_core::trainer::{run_batch, TrainingConfig, FIXTURE_SEED};
use qwalk_core::walk_core::{symmetric_initial_1d, symmetric_initial_2d};
use settings::Settings;

/// Quantum walk experiments and quantum-walk weight search for a small XOR network.
#[derive(Parser, Debug)]
#[command(name = "qwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hadamard walk on the line; writes `position,probability`.
    Walk1d(WalkArgs),
    /// Hadamard walk on the square lattice; writes `x,y,probability`.
    Walk2d(WalkArgs),
    /// Lackadaisical search on the complete graph; writes the class trajectory.
    CompleteWalk(CompleteArgs),
    /// Class probabilities for the nine reference cells plus solution counts.
    Tables(TablesArgs),
    /// Searches the output weights of the XOR network by quantum walk.
    Train(TrainArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON file with default settings; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (or directory for `tables` and `train`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[command(flatten)]
    common: Common,
    /// Number of walk steps.
    #[arg(long)]
    steps: Option<u64>,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    #[command(flatten)]
    common: Common,
    /// Number of vertices.
    #[arg(long)]
    n: Option<u64>,
    /// Number of marked vertices.
    #[arg(long)]
    k: Option<u64>,
    /// Self-loops per vertex.
    #[arg(long)]
    l: Option<u32>,
    /// Last step written [default: three times the step count].
    #[arg(long)]
    tmax: Option<u64>,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[command(flatten)]
    common: Common,
    /// Seed of the fixed network weights used for the solution counts.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid spacings for the solution counts.
    #[arg(long, value_delimiter = ',')]
    dp: Option<Vec<f64>>,
    /// Window widths for the solution counts.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<u32>>,
    /// Classification margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Worker threads for the solution scan.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid spacings, tried in order.
    #[arg(long, value_delimiter = ',')]
    dp: Option<Vec<f64>>,
    /// Window widths, tried in order.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<u32>>,
    /// Classification margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Number of measurements of the prepared walk.
    #[arg(long)]
    runs: Option<u64>,
    /// Worker threads for the solution scan.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<qwalk_core::Error> for Failure {
    fn from(e: qwalk_core::Error) -> Self {
        match e {
            qwalk_core::Error::InvalidConfig(_) | qwalk_core::Error::InvalidParams(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn merged(common: &Common, flags: Settings) -> Outcome<Settings> {
    let mut s = match &common.config {
        Some(path) => Settings::from_file(path).map_err(|e| Failure::Usage(format!("{e:#}")))?,
        None => Settings::default(),
    };
    s.overlay(&Settings { out: common.out.clone(), ..flags });
    Ok(s)
}

fn required<T: Clone>(value: &Option<T>, flag: &str) -> Outcome<T> {
    value.clone().ok_or_else(|| Failure::Usage(format!("missing required setting --{flag}")))
}

fn log_config(command: &str, s: &Settings) {
    let json = serde_json::to_string(s).expect("settings serialize");
    eprintln!("qwalk {command}: effective config {json}");
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Outcome {
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn walk(args: &WalkArgs, lattice: bool) -> Outcome {
    let s = merged(&args.common, Settings { steps: args.steps, ..Settings::default() })?;
    let steps = required(&s.steps, "steps")?;
    let out = required(&s.out, "out")?;
    log_config(if lattice { "walk2d" } else { "walk1d" }, &s);
    let mut w = create(&out)?;
    if lattice {
        symmetric_initial_2d::<f64>().evolve(steps).distribution().write_csv(&mut w)?;
    } else {
        symmetric_initial_1d::<f64>().evolve(steps).distribution().write_csv(&mut w)?;
    }
    finish(w, &out)?;
    println!("wrote {} steps to {}", steps, out.display());
    Ok(())
}

fn complete_walk(args: &CompleteArgs) -> Outcome {
    let mut s = merged(
        &args.common,
        Settings { n: args.n, k: args.k, l: args.l, tmax: args.tmax, ..Settings::default() },
    )?;
    let n = required(&s.n, "n")?;
    let k = required(&s.k, "k")?;
    let out = required(&s.out, "out")?;
    let l = *s.l.get_or_insert(1);
    let params = GraphParams::new(n, k, l)?;
    let steps = optimal_steps(&params);
    let tmax = *s.tmax.get_or_insert(3 * steps);
    log_config("complete-walk", &s);

    let rows = success_trajectory::<f64>(&params, tmax);
    let mut w = create(&out)?;
    write_trajectory_csv(&rows, &mut w)?;
    finish(w, &out)?;

    let p = evolve_reduced(&initial_reduced_state::<f64>(&params), steps).probabilities();
    println!("step count: {steps}");
    println!(
        "at step {steps}: aa {:.2}%  ab {:.2}%  ba {:.2}%  bb {:.2}%  success {:.2}%",
        100.0 * p[0],
        100.0 * p[1],
        100.0 * p[2],
        100.0 * p[3],
        100.0 * (p[0] + p[1])
    );
    println!("wrote steps 0..={tmax} to {}", out.display());
    Ok(())
}

/// Solution counts used for the reference cells, per window width.
const REFERENCE_CELLS: [(u64, [u64; 3]); 3] =
    [(512, [52, 5202, 19591]), (1024, [52, 5202, 118649]), (2048, [52, 5202, 485095])];

fn tables(args: &TablesArgs) -> Outcome {
    let mut s = merged(
        &args.common,
        Settings {
            seed: args.seed,
            dp: args.dp.clone(),
            window: args.window.clone(),
            margin: args.margin,
            threads: args.threads,
            ..Settings::default()
        },
    )?;
    let dir = required(&s.out, "out")?;
    let seed = *s.seed.get_or_insert(FIXTURE_SEED);
    let dps = s.dp.get_or_insert_with(|| vec![0.05, 0.005, 0.0005]).clone();
    let windows = s.window.get_or_insert_with(|| vec![512, 1024, 2048]).clone();
    let margin = *s.margin.get_or_insert(0.5);
    let threads = *s.threads.get_or_insert(1);
    let range = *s.fixed_weight_range.get_or_insert(Interval { lo: -1.0, hi: 1.0 });
    log_config("tables", &s);
    if !(margin > 0.0 && margin <= 0.5) {
        return Err(Failure::Usage(format!("margin must lie in (0, 0.5], got {margin}")));
    }

    for (width, ks) in REFERENCE_CELLS {
        let path = dir.join(format!("classes_{width}.csv"));
        let mut w = create(&path)?;
        writeln!(w, "k,steps,aa_pct,ab_pct,ba_pct,bb_pct,success_pct")?;
        for k in ks {
            let params = GraphParams::new(width * width, k, 1)?;
            let steps = optimal_steps(&params);
            let p = evolve_reduced(&initial_reduced_state::<f64>(&params), steps).probabilities().map(|x| 100.0 * x);
            writeln!(w, "{k},{steps},{:?},{:?},{:?},{:?},{:?}", p[0], p[1], p[2], p[3], p[0] + p[1])?;
            println!(
                "{width}x{width} k={k} steps={steps}: {:.2} / {:.2} / {:.2} / {:.2}  success {:.2}%",
                p[0],
                p[1],
                p[2],
                p[3],
                p[0] + p[1]
            );
        }
        finish(w, &path)?;
    }

    let fixed = generate_fixed_weights(seed, range)?;
    let table = solution_count_table(&windows, &dps, &fixed, margin, threads)?;
    let path = dir.join("solution_counts.csv");
    let mut w = create(&path)?;
    write_solution_table_csv(&table, &mut w)?;
    finish(w, &path)?;
    for row in &table {
        println!("dp={} window={}: {} solutions", row.dp, row.window, row.count);
    }
    println!("wrote tables to {}", dir.display());
    Ok(())
}

fn train(args: &TrainArgs) -> Outcome {
    let mut s = merged(
        &args.common,
        Settings {
            seed: args.seed,
            dp: args.dp.clone(),
            window: args.window.clone(),
            margin: args.margin,
            runs: args.runs,
            threads: args.threads,
            ..Settings::default()
        },
    )?;
    let dir = required(&s.out, "out")?;
    let d = TrainingConfig::default();
    let cfg = TrainingConfig {
        seed: *s.seed.get_or_insert(d.seed),
        dp_schedule: s.dp.get_or_insert(d.dp_schedule).clone(),
        window_schedule: s.window.get_or_insert(d.window_schedule).clone(),
        margin: *s.margin.get_or_insert(d.margin),
        fixed_weight_range: *s.fixed_weight_range.get_or_insert(d.fixed_weight_range),
        learning_rate: *s.learning_rate.get_or_insert(d.learning_rate),
        max_epochs: *s.max_epochs.get_or_insert(d.max_epochs),
        threads: *s.threads.get_or_insert(d.threads),
    };
    let runs = *s.runs.get_or_insert(1);
    log_config("train", &s);
    cfg.validate()?;
    if runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }

    let batch = run_batch(&cfg, runs)?;
    let first = batch.runs.first().ok_or_else(|| {
        let msg = batch.failures.first().map_or("no runs completed", |f| f.1.as_str());
        Failure::Runtime(anyhow::anyhow!("run 0 failed: {msg}"))
    })?;

    let json_path = dir.join("training_run.json");
    let mut w = create(&json_path)?;
    serde_json::to_writer_pretty(&mut w, first).context("serializing training run")?;
    writeln!(w)?;
    finish(w, &json_path)?;
    let csv_path = dir.join("batch.csv");
    let mut w = create(&csv_path)?;
    batch.write_csv(&mut w)?;
    finish(w, &csv_path)?;

    let (lo, hi) = batch.success_interval();
    println!("window {}x{} dp={} k={} steps={}", first.window.width(), first.window.height(), first.window.dp(), batch.k, batch.steps);
    println!(
        "run 0: class {} label ({}, {}) weights ({}, {}) solved {}",
        first.class, first.label.x, first.label.y, first.weights.out_w[0], first.weights.out_w[1], first.solved
    );
    println!(
        "success {}/{} = {:.4} (95% CI {:.4}..{:.4}; predicted {:.4})",
        batch.successes(),
        batch.completed(),
        batch.success_rate(),
        lo,
        hi,
        batch.expected_success()
    );
    if let Some((mean, max)) = batch.epoch_stats() {
        println!("verification epochs over solved runs: mean {mean}, max {max}");
    }
    for (i, msg) in &batch.failures {
        eprintln!("run {i} failed: {msg}");
    }
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Walk1d(a) => walk(a, false),
        Command::Walk2d(a) => walk(a, true),
        Command::CompleteWalk(a) => complete_walk(a),
        Command::Tables(a) => tables(a),
        Command::Train(a) => train(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::ValueValidation, msg).exit(),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

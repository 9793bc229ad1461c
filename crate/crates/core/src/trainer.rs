//! End-to-end weight search: count solutions window by window, walk for the
//! predetermined number of steps, measure, and hand the result to the network.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lackadaisical::{evolve_reduced, initial_reduced_state, optimal_steps, BasisClass, GraphParams, ReducedState};
use crate::mlp::{generate_fixed_weights, train_backprop, FixedWeights, Interval, MlpWeights, TrainReport};
use crate::rng::{run_seed, stream_rng, STREAM_LABEL, STREAM_WHEEL};
use crate::sampling::measure_cascade;
use crate::search_space::{enumerate_marked_threaded, MarkedSet, VertexLabel, Window};

/// Master seed of the reference fixed-weight fixture. With the default range
/// and margin it leaves 160 solving grid points in the 512×512, Δp = 0.05
/// window. Seeds below 182 leave none there.
pub const FIXTURE_SEED: u64 = 182;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub seed: u64,
    /// Tried in order for each window; list coarse spacings first.
    pub dp_schedule: Vec<f64>,
    /// Square window widths, tried in order; list small windows first.
    pub window_schedule: Vec<u32>,
    pub margin: f64,
    pub fixed_weight_range: Interval<f64>,
    pub learning_rate: f64,
    pub max_epochs: u64,
    /// Workers for the solution scan.
    pub threads: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            seed: FIXTURE_SEED,
            dp_schedule: vec![0.05],
            window_schedule: vec![512],
            margin: 0.5,
            fixed_weight_range: Interval { lo: -1.0, hi: 1.0 },
            learning_rate: 0.5,
            max_epochs: 10_000,
            threads: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dp_schedule.is_empty() || self.window_schedule.is_empty() {
            return Err(Error::InvalidConfig("dp and window schedules must be non-empty".into()));
        }
        if !(self.margin > 0.0 && self.margin <= 0.5) {
            return Err(Error::InvalidConfig(format!("margin must lie in (0, 0.5], got {}", self.margin)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if let Some(dp) = self.dp_schedule.iter().find(|dp| !(**dp > 0.0) || !dp.is_finite()) {
            return Err(Error::InvalidConfig(format!("dp must be positive, got {dp}")));
        }
        if self.window_schedule.contains(&0) {
            return Err(Error::InvalidConfig("window width must be positive".into()));
        }
        let Interval { lo, hi } = self.fixed_weight_range;
        if !(lo < hi) {
            return Err(Error::EmptyInterval { lo, hi });
        }
        Ok(())
    }
}

/// Everything fixed before the first measurement: the marked set, the graph,
/// the step count and the evolved state.
#[derive(Clone, Debug)]
pub struct SearchSetup {
    pub fixed_weights: FixedWeights<f64>,
    pub window: Window<f64>,
    pub marked: MarkedSet,
    pub params: GraphParams,
    pub steps: u64,
    pub state: ReducedState<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingRun {
    pub run: u64,
    pub seed: u64,
    pub fixed_weights: FixedWeights<f64>,
    pub window: Window<f64>,
    pub k: u64,
    pub steps: u64,
    /// Class probabilities of the evolved state.
    pub probabilities: [f64; 4],
    pub class: BasisClass,
    pub label: VertexLabel,
    pub weights: MlpWeights<f64>,
    pub verification: TrainReport<f64>,
    /// Whether the measured weights solve XOR without further training.
    pub solved: bool,
}

/// Scans the schedule for the first window holding a solution, then prepares
/// and evolves the walk on it.
pub fn prepare(cfg: &TrainingConfig) -> Result<SearchSetup> {
    cfg.validate()?;
    let fixed_weights = generate_fixed_weights(cfg.seed, cfg.fixed_weight_range)?;
    for &width in &cfg.window_schedule {
        for &dp in &cfg.dp_schedule {
            let window = Window::square(width, dp)?;
            let marked = enumerate_marked_threaded(&window, &fixed_weights, cfg.margin, cfg.threads);
            if marked.is_empty() || marked.k() == window.vertex_count() {
                continue;
            }
            let params = GraphParams::new(window.vertex_count(), marked.k(), 1)?;
            // The step count is settled before the walk starts.
            let steps = optimal_steps(&params);
            let state = evolve_reduced(&initial_reduced_state(&params), steps);
            return Ok(SearchSetup { fixed_weights, window, marked, params, steps, state });
        }
    }
    Err(Error::Exhausted)
}

/// Measures a prepared walk with the streams of run `index`.
pub fn measure_run(cfg: &TrainingConfig, setup: &SearchSetup, index: u64) -> Result<TrainingRun> {
    let seed = run_seed(cfg.seed, index);
    let mut wheel = stream_rng(seed, STREAM_WHEEL);
    let mut labels = stream_rng(seed, STREAM_LABEL);
    let m = measure_cascade(&setup.state, &setup.marked, &setup.window, &mut wheel, &mut labels)?;
    let (w1, w2) = setup.window.vertex_to_weights(m.label)?;
    let weights = MlpWeights::from_parts(&setup.fixed_weights, [w1, w2]);
    let solved = weights.is_solution(cfg.margin);
    if m.class.is_success() {
        assert!(solved, "label {:?} measured in class {} does not solve XOR", m.label, m.class);
    }
    let verification = train_backprop(&weights, cfg.learning_rate, cfg.max_epochs, cfg.margin);
    Ok(TrainingRun {
        run: index,
        seed,
        fixed_weights: setup.fixed_weights,
        window: setup.window,
        k: setup.params.k(),
        steps: setup.steps,
        probabilities: setup.state.probabilities(),
        class: m.class,
        label: m.label,
        weights,
        verification,
        solved,
    })
}

/// One pass of the procedure. A measurement landing on an unmarked vertex is
/// reported as such, not retried.
pub fn run_training(cfg: &TrainingConfig) -> Result<TrainingRun> {
    let setup = prepare(cfg)?;
    measure_run(cfg, &setup, 0)
}

#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub k: u64,
    pub steps: u64,
    /// Class probabilities predicted by the evolved state.
    pub expected: [f64; 4],
    pub runs: Vec<TrainingRun>,
    /// Runs that returned an error, with its message.
    pub failures: Vec<(u64, String)>,
}

impl BatchSummary {
    pub fn completed(&self) -> u64 {
        self.runs.len() as u64
    }

    pub fn class_counts(&self) -> [u64; 4] {
        let mut counts = [0; 4];
        for r in &self.runs {
            counts[r.class.index()] += 1;
        }
        counts
    }

    pub fn class_frequencies(&self) -> [f64; 4] {
        let n = self.completed().max(1) as f64;
        self.class_counts().map(|c| c as f64 / n)
    }

    pub fn successes(&self) -> u64 {
        self.runs.iter().filter(|r| r.solved).count() as u64
    }

    pub fn success_rate(&self) -> f64 {
        self.successes() as f64 / self.completed().max(1) as f64
    }

    pub fn expected_success(&self) -> f64 {
        self.expected[0] + self.expected[1]
    }

    /// Normal-approximation 95% interval for the success rate.
    pub fn success_interval(&self) -> (f64, f64) {
        let p = self.success_rate();
        let half = 1.96 * (p * (1.0 - p) / self.completed().max(1) as f64).sqrt();
        ((p - half).max(0.0), (p + half).min(1.0))
    }

    /// Total-variation distance between class frequencies and `expected`.
    pub fn tv_distance(&self) -> f64 {
        let f = self.class_frequencies();
        0.5 * f.iter().zip(&self.expected).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// `(mean, max)` verification epochs over solved runs.
    pub fn epoch_stats(&self) -> Option<(f64, u64)> {
        let solved: Vec<u64> = self.runs.iter().filter(|r| r.solved).map(|r| r.verification.epochs).collect();
        let max = *solved.iter().max()?;
        Some((solved.iter().sum::<u64>() as f64 / solved.len() as f64, max))
    }

    /// `run,seed,k,steps,class,x,y,w1,w2,epochs,solved` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "run,seed,k,steps,class,x,y,w1,w2,epochs,solved")?;
        for r in &self.runs {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{:?},{:?},{},{}",
                r.run,
                r.seed,
                r.k,
                r.steps,
                r.class,
                r.label.x,
                r.label.y,
                r.weights.out_w[0],
                r.weights.out_w[1],
                r.verification.epochs,
                r.solved
            )?;
        }
        Ok(())
    }
}

/// `n` measurements of one prepared walk, run `i` using `run_seed(seed, i)`.
/// Per-run errors are collected rather than aborting the batch.
pub fn run_batch(cfg: &TrainingConfig, n: u64) -> Result<BatchSummary> {
    if n == 0 {
        return Err(Error::InvalidConfig("batch needs at least one run".into()));
    }
    let setup = prepare(cfg)?;
    let mut runs = Vec::with_capacity(n as usize);
    let mut failures = Vec::new();
    for i in 0..n {
        match measure_run(cfg, &setup, i) {
            Ok(r) => runs.push(r),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    Ok(BatchSummary { k: setup.params.k(), steps: setup.steps, expected: setup.state.probabilities(), runs, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> TrainingConfig {
        TrainingConfig { window_schedule: vec![64], dp_schedule: vec![0.4], ..TrainingConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(TrainingConfig::default().validate().is_ok());
        let bad = [
            TrainingConfig { dp_schedule: vec![], ..Default::default() },
            TrainingConfig { window_schedule: vec![], ..Default::default() },
            TrainingConfig { margin: 0.0, ..Default::default() },
            TrainingConfig { margin: 0.6, ..Default::default() },
            TrainingConfig { learning_rate: 0.0, ..Default::default() },
            TrainingConfig { dp_schedule: vec![-0.1], ..Default::default() },
            TrainingConfig { window_schedule: vec![0], ..Default::default() },
            TrainingConfig { fixed_weight_range: Interval { lo: 1.0, hi: 1.0 }, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn empty_schedule_is_exhausted() {
        let cfg = TrainingConfig { margin: 1e-6, ..small_cfg() };
        assert!(matches!(run_training(&cfg), Err(Error::Exhausted)));
        assert!(matches!(run_batch(&cfg, 3), Err(Error::Exhausted)));
    }

    #[test]
    fn training_is_deterministic() {
        let cfg = small_cfg();
        let a = run_training(&cfg).unwrap();
        let b = run_training(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps, optimal_steps(&GraphParams::new(64 * 64, a.k, 1).unwrap()));
    }

    #[test]
    fn single_run_batch_matches_run_training() {
        let cfg = small_cfg();
        let batch = run_batch(&cfg, 1).unwrap();
        assert_eq!(batch.runs, vec![run_training(&cfg).unwrap()]);
        assert!(batch.failures.is_empty());
    }

    #[test]
    fn batch_csv_header() {
        let batch = run_batch(&small_cfg(), 2).unwrap();
        let mut buf = Vec::new();
        batch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("run,seed,k,steps,class,x,y,w1,w2,epochs,solved"));
        assert_eq!(lines.count(), 2);
    }
}

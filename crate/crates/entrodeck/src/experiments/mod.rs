//! Seeded Monte Carlo experiment harness.
//!
//! Each experiment is a named strategy behind the [`Experiment`] trait,
//! looked up at runtime by [`run_experiment`]. Every experiment is a pure
//! function of its config: trial t draws from rng stream (master_seed, t),
//! per-trial outputs are collected in trial order, and aggregation happens
//! once, sequentially, so results are identical for any worker count.

mod distinguish;
mod entropy_exp;
mod matches;
mod trick;

pub use distinguish::{distinguisher, distinguisher_ids, Distinguisher, SourceKind};

use crate::error::{Error, Result};
use crate::rng::RngSpec;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub n: Option<usize>,
    pub sigma: Option<u32>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub draw_size: Option<usize>,
    pub distinguisher: Option<String>,
    pub epsilon: Option<f64>,
    pub fixed_string: bool,
    pub trials: u64,
    pub rng: RngSpec,
}

impl ExperimentConfig {
    pub fn new(name: &str, trials: u64, rng: RngSpec) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            n: None,
            sigma: None,
            k: None,
            m: None,
            draw_size: None,
            distinguisher: None,
            epsilon: None,
            fixed_string: false,
            trials,
            rng,
        }
    }

    pub fn validate_trials(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        Ok(())
    }

    pub fn require_n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Config(format!("experiment {:?} requires --n", self.name)))
    }

    pub fn require_sigma(&self) -> Result<u32> {
        self.sigma
            .ok_or_else(|| Error::Config(format!("experiment {:?} requires --sigma", self.name)))
    }

    pub fn require_k(&self) -> Result<usize> {
        self.k
            .ok_or_else(|| Error::Config(format!("experiment {:?} requires --k", self.name)))
    }

    pub fn require_m(&self) -> Result<usize> {
        self.m
            .ok_or_else(|| Error::Config(format!("experiment {:?} requires --m", self.name)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// estimate must be <= bound (plus margin)
    #[serde(rename = "<=")]
    AtMost,
    /// estimate must be >= bound (minus margin)
    #[serde(rename = ">=")]
    AtLeast,
    /// estimate must lie within the margin of the bound
    #[serde(rename = "within")]
    Within,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub direction: Option<Direction>,
    pub verdict: Verdict,
    pub vacuous: bool,
    pub trials: u64,
    pub seed: u64,
    pub extras: BTreeMap<String, Value>,
}

impl ExperimentResult {
    pub fn record(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }

    pub fn human_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment      {}\n", self.name));
        for (k, v) in &self.params {
            out.push_str(&format!("  {k:<14}{v}\n"));
        }
        out.push_str(&format!("  {:<14}{}\n", "trials", self.trials));
        out.push_str(&format!("  {:<14}{}\n", "seed", self.seed));
        out.push_str(&format!("  {:<14}{:.6e}\n", "estimate", self.estimate));
        out.push_str(&format!("  {:<14}{:.6e}\n", "stderr", self.stderr));
        if let (Some(b), Some(d)) = (self.bound, self.direction) {
            let dir = match d {
                Direction::AtMost => "<=",
                Direction::AtLeast => ">=",
                Direction::Within => "within 3 SE of",
            };
            out.push_str(&format!("  {:<14}{dir} {b:.6e}\n", "bound"));
        }
        for (k, v) in &self.extras {
            out.push_str(&format!("  {k:<14}{v}\n"));
        }
        let verdict = match self.verdict {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "VIOLATED",
        };
        out.push_str(&format!(
            "  {:<14}{}{}\n",
            "verdict",
            verdict,
            if self.vacuous { " (vacuous bound)" } else { "" }
        ));
        out
    }
}

/// Run `trials` independent trials, one rng stream per trial index, results
/// in trial order regardless of scheduling.
pub fn run_trials<T, F>(trials: u64, base: RngSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, RngSpec) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, base.stream(t)))
        .collect()
}

/// Fallible variant of [`run_trials`].
pub fn try_run_trials<T, F>(trials: u64, base: RngSpec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, RngSpec) -> Result<T> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, base.stream(t)))
        .collect()
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// Bernoulli point estimate and standard error from an integer tally.
pub fn bernoulli(successes: u64, trials: u64) -> (f64, f64) {
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

pub fn binom2(n: f64) -> f64 {
    n * (n - 1.0) / 2.0
}

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult>;
}

static EXPERIMENTS: [&dyn Experiment; 6] = [
    &matches::MatchesExperiment,
    &entropy_exp::ExpectedEntropyExperiment,
    &entropy_exp::ZeroProbExperiment,
    &trick::PrearrangedTrickExperiment,
    &trick::ShuffledTrickExperiment,
    &distinguish::DistinguishExperiment,
];

pub fn experiment_names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.name()).collect()
}

/// Dispatch to the experiment named by the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate_trials()?;
    let exp = EXPERIMENTS
        .iter()
        .find(|e| e.name() == cfg.name)
        .ok_or_else(|| Error::UnknownExperiment {
            name: cfg.name.clone(),
            valid: experiment_names().join(", "),
        })?;
    exp.run(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatcher_knows_all_names() {
        let names = experiment_names();
        for n in [
            "matches",
            "expected-entropy",
            "zero-prob",
            "trick-prearranged",
            "trick-shuffled",
            "distinguish",
        ] {
            assert!(names.contains(&n), "{n} missing from registry");
        }
    }

    #[test]
    fn unknown_name_lists_valid() {
        let cfg = ExperimentConfig::new("no-such", 1, RngSpec::default());
        let err = run_experiment(&cfg).unwrap_err();
        assert!(err.to_string().contains("zero-prob"));
    }

    #[test]
    fn dispatch_reaches_zero_prob() {
        let mut cfg = ExperimentConfig::new("zero-prob", 50, RngSpec::new(1, 0));
        cfg.n = Some(30);
        cfg.sigma = Some(2);
        cfg.k = Some(20);
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.name, "zero-prob");
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = ExperimentConfig::new("matches", 500, RngSpec::new(77, 0));
        cfg.n = Some(50);
        cfg.sigma = Some(2);
        cfg.k = Some(10);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        assert_eq!(one.record(), eight.record());
    }
}

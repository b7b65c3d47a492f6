//! Finite-scale checks of the expected-entropy and zero-entropy-probability
//! bounds for uniform random strings.

use super::{
    bernoulli, binom2, mean_and_se, run_trials, Direction, Experiment, ExperimentConfig,
    ExperimentResult, Verdict,
};
use crate::entropy::{hk, hk_is_zero, Convention};
use crate::error::{Error, Result};
use crate::seq::{random_sequence, Alphabet};
use serde_json::json;
use std::collections::BTreeMap;

fn common_params(n: usize, sigma: u32, k: usize) -> BTreeMap<String, serde_json::Value> {
    BTreeMap::from([
        ("n".into(), json!(n)),
        ("sigma".into(), json!(sigma)),
        ("k".into(), json!(k)),
    ])
}

pub struct ExpectedEntropyExperiment;

impl Experiment for ExpectedEntropyExperiment {
    fn name(&self) -> &'static str {
        "expected-entropy"
    }

    /// Mean linear H_k over T uniform strings against the (n/sigma^k) log2(sigma)
    /// bound. The bound is vacuous once it exceeds log2(sigma); such configs
    /// are flagged, not failed.
    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        let n = cfg.require_n()?;
        let sigma = cfg.require_sigma()?;
        let k = cfg.require_k()?;
        if k == 0 {
            return Err(Error::Config("expected-entropy requires k >= 1".into()));
        }
        let alphabet = Alphabet::new(sigma)?;
        let values: Vec<f64> = run_trials(cfg.trials, cfg.rng, |_, spec| {
            let s = random_sequence(n, alphabet, spec);
            hk(&s, k, Convention::Linear).expect("linear hk").h_value
        });
        let (mean, stderr) = mean_and_se(&values);
        let max_entropy = alphabet.max_entropy_bits();
        let bound = n as f64 / f64::from(sigma).powi(k as i32) * max_entropy;
        let vacuous = bound >= max_entropy;
        let ok = mean <= bound + 3.0 * stderr;
        Ok(ExperimentResult {
            name: self.name().into(),
            params: common_params(n, sigma, k),
            estimate: mean,
            stderr,
            bound: Some(bound),
            direction: Some(Direction::AtMost),
            verdict: if ok || vacuous {
                Verdict::Consistent
            } else {
                Verdict::Violated
            },
            vacuous,
            trials: cfg.trials,
            seed: cfg.rng.master_seed,
            extras: BTreeMap::new(),
        })
    }
}

pub struct ZeroProbExperiment;

impl Experiment for ZeroProbExperiment {
    fn name(&self) -> &'static str {
        "zero-prob"
    }

    /// Fraction of uniform strings with structurally zero linear H_k,
    /// against the 1 - C(n,2)/sigma^k lower bound. A negative bound is
    /// vacuous and flagged.
    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        let n = cfg.require_n()?;
        let sigma = cfg.require_sigma()?;
        let k = cfg.require_k()?;
        if k == 0 {
            return Err(Error::Config("zero-prob requires k >= 1".into()));
        }
        let alphabet = Alphabet::new(sigma)?;
        let zeros: Vec<bool> = run_trials(cfg.trials, cfg.rng, |_, spec| {
            let s = random_sequence(n, alphabet, spec);
            hk_is_zero(&s, k, Convention::Linear).expect("linear hk_is_zero")
        });
        let count = zeros.iter().filter(|&&z| z).count() as u64;
        let (frac, stderr) = bernoulli(count, cfg.trials);
        let bound = 1.0 - binom2(n as f64) / f64::from(sigma).powi(k as i32);
        let vacuous = bound < 0.0;
        let ok = frac >= bound - 3.0 * stderr;
        Ok(ExperimentResult {
            name: self.name().into(),
            params: common_params(n, sigma, k),
            estimate: frac,
            stderr,
            bound: Some(bound),
            direction: Some(Direction::AtLeast),
            verdict: if ok || vacuous {
                Verdict::Consistent
            } else {
                Verdict::Violated
            },
            vacuous,
            trials: cfg.trials,
            seed: cfg.rng.master_seed,
            extras: BTreeMap::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;

    fn cfg(name: &str, n: usize, sigma: u32, k: usize, trials: u64) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(name, trials, RngSpec::new(11, 0));
        c.n = Some(n);
        c.sigma = Some(sigma);
        c.k = Some(k);
        c
    }

    #[test]
    fn k_at_least_n_gives_exact_zero_mean() {
        let r = ExpectedEntropyExperiment
            .run(&cfg("expected-entropy", 10, 2, 12, 200))
            .unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn vacuous_bound_flagged() {
        // n=100, sigma=2, k=5: bound 100/32 > 1 = log2(2)
        let r = ExpectedEntropyExperiment
            .run(&cfg("expected-entropy", 100, 2, 5, 100))
            .unwrap();
        assert!(r.vacuous);
        assert_eq!(r.verdict, Verdict::Consistent);

        // n=100, sigma=2, k=10: zero-prob bound negative
        let r = ZeroProbExperiment
            .run(&cfg("zero-prob", 100, 2, 10, 100))
            .unwrap();
        assert!(r.vacuous);
        assert!(r.bound.unwrap() < 0.0);
    }

    #[test]
    fn zero_prob_k_at_least_n_is_one() {
        let r = ZeroProbExperiment
            .run(&cfg("zero-prob", 10, 2, 12, 300))
            .unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.verdict, Verdict::Consistent);
    }
}

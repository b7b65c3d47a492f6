//! Expected k-tuple matches in uniform random strings.

use super::{
    binom2, run_trials, Direction, Experiment, ExperimentConfig, ExperimentResult,
    Verdict,
};
use crate::entropy::{match_count, Convention};
use crate::error::{Error, Result};
use crate::seq::{random_sequence, Alphabet};
use serde_json::json;
use std::collections::BTreeMap;

pub struct MatchesExperiment;

impl Experiment for MatchesExperiment {
    fn name(&self) -> &'static str {
        "matches"
    }

    /// Mean linear match count over T uniform strings, checked against the
    /// exact expectation C(n-k+1, 2) / sigma^k (which already accounts for
    /// overlapping pairs) and the looser C(n, 2) / sigma^k bound.
    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        let n = cfg.require_n()?;
        let sigma = cfg.require_sigma()?;
        let k = cfg.require_k()?;
        if n <= k {
            return Err(Error::Config(format!(
                "matches requires n > k (n = {n}, k = {k})"
            )));
        }
        let alphabet = Alphabet::new(sigma)?;
        let counts: Vec<u64> = run_trials(cfg.trials, cfg.rng, |_, spec| {
            let s = random_sequence(n, alphabet, spec);
            match_count(&s, k, Convention::Linear).expect("linear match_count on valid input")
        });
        let t = cfg.trials as f64;
        let sum: u128 = counts.iter().map(|&c| u128::from(c)).sum();
        let sum_sq: u128 = counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
        let mean = sum as f64 / t;
        let stderr = if cfg.trials > 1 {
            let var = (sum_sq as f64 - t * mean * mean) / (t - 1.0);
            (var.max(0.0) / t).sqrt()
        } else {
            0.0
        };
        let sigma_pow_k = f64::from(sigma).powi(k as i32);
        let windows = (n - k + 1) as f64;
        let exact = binom2(windows) / sigma_pow_k;
        let loose_bound = binom2(n as f64) / sigma_pow_k;
        // when nearly all trials are 0 the sample SE underestimates; the
        // Poisson-scale SE sqrt(exact/T) keeps the margin honest
        let margin = 3.0 * stderr.max((exact / t).sqrt());
        let within = (mean - exact).abs() <= margin;
        let below_loose = mean <= loose_bound;
        let mut extras = BTreeMap::new();
        extras.insert("loose_bound".into(), json!(loose_bound));
        extras.insert("below_loose_bound".into(), json!(below_loose));
        extras.insert("total_matches".into(), json!(sum as u64));
        Ok(ExperimentResult {
            name: self.name().into(),
            params: BTreeMap::from([
                ("n".into(), json!(n)),
                ("sigma".into(), json!(sigma)),
                ("k".into(), json!(k)),
            ]),
            estimate: mean,
            stderr,
            bound: Some(exact),
            direction: Some(Direction::Within),
            verdict: if within && below_loose {
                Verdict::Consistent
            } else {
                Verdict::Violated
            },
            vacuous: false,
            trials: cfg.trials,
            seed: cfg.rng.master_seed,
            extras,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;

    fn cfg(n: usize, sigma: u32, k: usize, trials: u64, seed: u64) -> ExperimentConfig {
        let mut c = ExperimentConfig::new("matches", trials, RngSpec::new(seed, 0));
        c.n = Some(n);
        c.sigma = Some(sigma);
        c.k = Some(k);
        c
    }

    #[test]
    fn single_pair_case() {
        // n = k + 1: two windows, expectation 1/sigma^k
        let r = MatchesExperiment.run(&cfg(11, 2, 10, 5000, 3)).unwrap();
        assert_eq!(r.bound, Some(1.0 / 1024.0));
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn rare_regime_consistent() {
        // n=21, k=20: expectation ~9.5e-7, most trials zero
        let r = MatchesExperiment.run(&cfg(21, 2, 20, 10_000, 5)).unwrap();
        assert!(r.estimate < 1e-3);
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn n_not_greater_than_k_rejected() {
        assert!(MatchesExperiment.run(&cfg(10, 2, 10, 10, 0)).is_err());
    }
}

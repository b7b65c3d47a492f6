//! Exact 0th- and k-th order empirical entropy, context tables, and k-tuple
//! collision counts.
//!
//! Two context conventions are first class. `Linear` follows the usual H_k
//! definition: position i contributes the symbol at i+k as successor of the
//! k-tuple starting at i, so there are n-k counted positions. `Cyclic` wraps
//! the string, giving n positions; it is the convention under which a De
//! Bruijn cycle of order <= k has H_k exactly 0.
//!
//! H_k is always normalized by n, matching the defining formula, even though
//! the linear convention counts only n-k positions.

use crate::error::{Error, Result};
use crate::seq::Sequence;
use indexmap::IndexMap;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Linear,
    Cyclic,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Linear => write!(f, "linear"),
            Convention::Cyclic => write!(f, "cyclic"),
        }
    }
}

/// Successor counts per k-context. Entries are kept in first-occurrence
/// order so that summation order is reproducible (and identical to the
/// brute-force oracle's).
#[derive(Debug, Clone)]
pub struct ContextTable {
    k: usize,
    convention: Convention,
    sigma: u32,
    total_positions: u64,
    entries: Entries,
}

#[derive(Debug, Clone)]
enum Entries {
    /// Context packed into a machine word: k * symbol_bits <= 64.
    Packed(IndexMap<u64, Vec<u64>>),
    /// General path for wider contexts.
    Wide(IndexMap<Box<[u16]>, Vec<u64>>),
}

fn pack(symbols: &[u16], bits: u32) -> u64 {
    let mut code = 0u64;
    for &s in symbols {
        code = (code << bits) | u64::from(s);
    }
    code
}

impl ContextTable {
    pub fn build(seq: &Sequence, k: usize, convention: Convention) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config(
                "context table requires k >= 1; use h0 for order 0".into(),
            ));
        }
        let n = seq.len();
        if convention == Convention::Cyclic && n < k {
            return Err(Error::Input(format!(
                "cyclic convention requires n >= k (n = {n}, k = {k})"
            )));
        }
        let sigma = seq.sigma();
        let bits = seq.alphabet().symbol_bits();
        let packed = (k as u64) * u64::from(bits) <= 64;
        let sym = seq.symbols();
        let mut entries = if packed {
            Entries::Packed(IndexMap::new())
        } else {
            Entries::Wide(IndexMap::new())
        };
        let mut total = 0u64;
        let mut ctx_buf = vec![0u16; k];
        let positions: Box<dyn Iterator<Item = usize>> = match convention {
            Convention::Linear => Box::new(0..n.saturating_sub(k)),
            Convention::Cyclic => Box::new(0..n),
        };
        for i in positions {
            let succ;
            match convention {
                Convention::Linear => {
                    ctx_buf.copy_from_slice(&sym[i..i + k]);
                    succ = sym[i + k];
                }
                Convention::Cyclic => {
                    for (j, slot) in ctx_buf.iter_mut().enumerate() {
                        *slot = sym[(i + j) % n];
                    }
                    succ = sym[(i + k) % n];
                }
            }
            total += 1;
            let counts = match &mut entries {
                Entries::Packed(map) => map
                    .entry(pack(&ctx_buf, bits))
                    .or_insert_with(|| vec![0u64; sigma as usize]),
                Entries::Wide(map) => map
                    .entry(ctx_buf.clone().into_boxed_slice())
                    .or_insert_with(|| vec![0u64; sigma as usize]),
            };
            counts[succ as usize] += 1;
        }
        Ok(ContextTable {
            k,
            convention,
            sigma,
            total_positions: total,
            entries,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn total_positions(&self) -> u64 {
        self.total_positions
    }

    pub fn context_count(&self) -> usize {
        match &self.entries {
            Entries::Packed(m) => m.len(),
            Entries::Wide(m) => m.len(),
        }
    }

    /// True iff every context has at most one observed successor, i.e. the
    /// structural condition for H_k = 0. No floating point involved.
    pub fn is_deterministic(&self) -> bool {
        self.successor_counts()
            .all(|counts| counts.iter().filter(|&&c| c > 0).count() <= 1)
    }

    /// Sum over contexts of |s_alpha| * H0(s_alpha), in bits, summed in
    /// first-occurrence order.
    pub fn successor_entropy_bits(&self) -> f64 {
        // explicit +0.0 seed: the stdlib's empty f64 sum is -0.0, which would
        // leak a negative zero into h_value when there are no positions
        self.successor_counts()
            .map(context_entropy_bits)
            .fold(0.0, |acc, x| acc + x)
    }

    fn successor_counts(&self) -> Box<dyn Iterator<Item = &[u64]> + '_> {
        match &self.entries {
            Entries::Packed(m) => Box::new(m.values().map(Vec::as_slice)),
            Entries::Wide(m) => Box::new(m.values().map(Vec::as_slice)),
        }
    }
}

/// |s| * H0(s) in bits for a string summarized by its occurrence counts,
/// i.e. sum over symbols of c * log2(total / c), with 0 * log(.) = 0.
/// Exactly 0.0 when at most one count is nonzero.
pub fn context_entropy_bits(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let nonzero = counts.iter().filter(|&&c| c > 0).count();
    if nonzero <= 1 {
        return 0.0;
    }
    let total_f = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * (total_f / c as f64).log2())
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub n: usize,
    pub sigma: u32,
    pub k: usize,
    pub convention: Convention,
    /// Bits per symbol, in [0, log2 sigma].
    pub h_value: f64,
    /// n * h_value.
    pub total_bits: f64,
    pub context_count: usize,
}

/// 0th-order empirical entropy in bits per symbol. Empty sequence gives 0.
pub fn h0(seq: &Sequence) -> f64 {
    let n = seq.len();
    if n == 0 {
        return 0.0;
    }
    let mut counts = vec![0u64; seq.sigma() as usize];
    for &s in seq.symbols() {
        counts[s as usize] += 1;
    }
    context_entropy_bits(&counts) / n as f64
}

pub fn build_context_table(seq: &Sequence, k: usize, convention: Convention) -> Result<ContextTable> {
    ContextTable::build(seq, k, convention)
}

/// k-th order empirical entropy: (1/n) * sum over contexts alpha of
/// |s_alpha| * H0(s_alpha). k = 0 delegates to [`h0`].
pub fn hk(seq: &Sequence, k: usize, convention: Convention) -> Result<EntropyReport> {
    let n = seq.len();
    if k == 0 {
        let h = h0(seq);
        return Ok(EntropyReport {
            n,
            sigma: seq.sigma(),
            k: 0,
            convention,
            h_value: h,
            total_bits: h * n as f64,
            context_count: usize::from(n > 0),
        });
    }
    let table = ContextTable::build(seq, k, convention)?;
    let h_value = if n == 0 {
        0.0
    } else {
        table.successor_entropy_bits() / n as f64
    };
    Ok(EntropyReport {
        n,
        sigma: seq.sigma(),
        k,
        convention,
        h_value,
        total_bits: h_value * n as f64,
        context_count: table.context_count(),
    })
}

/// True iff H_k(seq) is structurally zero (every context deterministic).
pub fn hk_is_zero(seq: &Sequence, k: usize, convention: Convention) -> Result<bool> {
    if k == 0 {
        let distinct = {
            let mut seen = vec![false; seq.sigma() as usize];
            let mut d = 0;
            for &s in seq.symbols() {
                if !seen[s as usize] {
                    seen[s as usize] = true;
                    d += 1;
                }
            }
            d
        };
        return Ok(distinct <= 1);
    }
    Ok(ContextTable::build(seq, k, convention)?.is_deterministic())
}

/// Number of unordered pairs of equal k-tuple windows. Linear windows number
/// n-k+1 (0 when k > n), cyclic windows number n.
pub fn match_count(seq: &Sequence, k: usize, convention: Convention) -> Result<u64> {
    if k == 0 {
        return Err(Error::Config("match_count requires k >= 1".into()));
    }
    let n = seq.len();
    if convention == Convention::Cyclic && n < k {
        return Err(Error::Input(format!(
            "cyclic convention requires n >= k (n = {n}, k = {k})"
        )));
    }
    let sym = seq.symbols();
    let bits = seq.alphabet().symbol_bits();
    let packed = (k as u64) * u64::from(bits) <= 64;
    let window_starts: Box<dyn Iterator<Item = usize>> = match convention {
        Convention::Linear => Box::new(0..(n + 1).saturating_sub(k)),
        Convention::Cyclic => Box::new(0..n),
    };
    let mut pairs = 0u64;
    let mut buf = vec![0u16; k];
    if packed {
        let mut mult: HashMap<u64, u64> = HashMap::new();
        for i in window_starts {
            for (j, slot) in buf.iter_mut().enumerate() {
                *slot = sym[(i + j) % n.max(1)];
            }
            let m = mult.entry(pack(&buf, bits)).or_insert(0);
            pairs += *m;
            *m += 1;
        }
    } else {
        let mut mult: HashMap<Box<[u16]>, u64> = HashMap::new();
        for i in window_starts {
            for (j, slot) in buf.iter_mut().enumerate() {
                *slot = sym[(i + j) % n.max(1)];
            }
            let m = mult.entry(buf.clone().into_boxed_slice()).or_insert(0);
            pairs += *m;
            *m += 1;
        }
    }
    Ok(pairs)
}

/// Oracle twin of [`hk`]: literal O(n^2 k) scanning with no hashing, grouping
/// positions by first occurrence. Kept deliberately independent of
/// [`ContextTable`] so the two can be checked against each other bit for bit.
pub fn hk_bruteforce(seq: &Sequence, k: usize, convention: Convention) -> Result<EntropyReport> {
    let n = seq.len();
    if k == 0 {
        return hk(seq, 0, convention);
    }
    if convention == Convention::Cyclic && n < k {
        return Err(Error::Input(format!(
            "cyclic convention requires n >= k (n = {n}, k = {k})"
        )));
    }
    let sym = seq.symbols();
    let positions: Vec<usize> = match convention {
        Convention::Linear => (0..n.saturating_sub(k)).collect(),
        Convention::Cyclic => (0..n).collect(),
    };
    let ctx_eq = |a: usize, b: usize| -> bool {
        (0..k).all(|j| {
            let x = match convention {
                Convention::Linear => sym[a + j],
                Convention::Cyclic => sym[(a + j) % n],
            };
            let y = match convention {
                Convention::Linear => sym[b + j],
                Convention::Cyclic => sym[(b + j) % n],
            };
            x == y
        })
    };
    let succ = |i: usize| -> u16 {
        match convention {
            Convention::Linear => sym[i + k],
            Convention::Cyclic => sym[(i + k) % n],
        }
    };
    let mut visited = vec![false; positions.len()];
    let mut sum_bits = 0.0f64;
    let mut groups = 0usize;
    for a in 0..positions.len() {
        if visited[a] {
            continue;
        }
        groups += 1;
        let mut counts = vec![0u64; seq.sigma() as usize];
        for b in a..positions.len() {
            if !visited[b] && ctx_eq(positions[a], positions[b]) {
                visited[b] = true;
                counts[succ(positions[b]) as usize] += 1;
            }
        }
        sum_bits += context_entropy_bits(&counts);
    }
    let h_value = if n == 0 { 0.0 } else { sum_bits / n as f64 };
    Ok(EntropyReport {
        n,
        sigma: seq.sigma(),
        k,
        convention,
        h_value,
        total_bits: h_value * n as f64,
        context_count: groups,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    /// k >= log_sigma n
    pub log: bool,
    /// k >= (1 + epsilon) log_sigma n
    pub one_plus_eps: bool,
    /// k >= (2 + epsilon) log_sigma n
    pub two_plus_eps: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompressibilityRow {
    #[serde(flatten)]
    pub report: EntropyReport,
    pub thresholds: Thresholds,
}

/// One entropy report per k in [k_min, k_max], with threshold flags marking
/// where the compressibility bounds start to bite for the given epsilon.
pub fn compressibility_report(
    seq: &Sequence,
    k_min: usize,
    k_max: usize,
    convention: Convention,
    epsilon: f64,
) -> Result<Vec<CompressibilityRow>> {
    if k_min > k_max {
        return Err(Error::Config(format!(
            "empty order range {k_min}..{k_max}"
        )));
    }
    let n = seq.len();
    let log_sigma_n = if n == 0 {
        f64::NEG_INFINITY
    } else {
        (n as f64).ln() / (f64::from(seq.sigma())).ln()
    };
    let mut rows = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let report = hk(seq, k, convention)?;
        let kf = k as f64;
        rows.push(CompressibilityRow {
            report,
            thresholds: Thresholds {
                log: kf >= log_sigma_n,
                one_plus_eps: kf >= (1.0 + epsilon) * log_sigma_n,
                two_plus_eps: kf >= (2.0 + epsilon) * log_sigma_n,
            },
        });
    }
    Ok(rows)
}

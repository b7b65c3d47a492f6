//! Probabilistic source models: the unbiased memoryless source and the
//! deterministic k-th order Markov source built from a repeat-free string.

use crate::entropy::{match_count, Convention};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::seq::{random_sequence, Alphabet, Sequence};
use std::collections::HashMap;

/// Emits i.i.d. uniform symbols; entropy rate log2(sigma).
#[derive(Debug, Clone, Copy)]
pub struct MemorylessSource {
    alphabet: Alphabet,
}

impl MemorylessSource {
    pub fn new(alphabet: Alphabet) -> Self {
        MemorylessSource { alphabet }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn generate(&self, m: usize, rng: RngSpec) -> Sequence {
        random_sequence(m, self.alphabet, rng)
    }
}

/// A k-th order Markov source in which every context has exactly one
/// successor; entropy rate 0. Built from a string with no repeated k-tuple,
/// it regenerates that string with probability 1.
#[derive(Debug, Clone)]
pub struct DeterministicMarkovSource {
    k: usize,
    seed_context: Vec<u16>,
    transitions: HashMap<Box<[u16]>, u16>,
    source_string: Sequence,
    cyclic: bool,
}

/// Transitions read off a repeat-free string: seed context is the first k
/// symbols; each of the n-k interior positions contributes one transition.
/// A repeated k-tuple would make the construction ambiguous, so it is
/// rejected, naming the colliding positions (1-based).
pub fn build_markov_from_string(s: &Sequence, k: usize) -> Result<DeterministicMarkovSource> {
    if k == 0 {
        return Err(Error::Config("Markov order must be >= 1".into()));
    }
    let n = s.len();
    if n <= k {
        return Err(Error::Construction(format!(
            "need n > k to build a k-th order source (n = {n}, k = {k})"
        )));
    }
    let sym = s.symbols();
    let mut first_seen: HashMap<&[u16], usize> = HashMap::new();
    for i in 0..=n - k {
        let window = &sym[i..i + k];
        if let Some(&first) = first_seen.get(window) {
            let t: Vec<String> = window.iter().map(|x| x.to_string()).collect();
            return Err(Error::Construction(format!(
                "k-tuple [{}] repeats at positions {} and {}; a deterministic source is undefined",
                t.join(","),
                first + 1,
                i + 1
            )));
        }
        first_seen.insert(window, i);
    }
    let mut transitions = HashMap::with_capacity(n - k);
    for i in 0..n - k {
        transitions.insert(sym[i..i + k].to_vec().into_boxed_slice(), sym[i + k]);
    }
    Ok(DeterministicMarkovSource {
        k,
        seed_context: sym[..k].to_vec(),
        transitions,
        source_string: s.clone(),
        cyclic: false,
    })
}

impl DeterministicMarkovSource {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn seed_context(&self) -> &[u16] {
        &self.seed_context
    }

    pub fn source_string(&self) -> &Sequence {
        &self.source_string
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Add the wrap-around transition so generation can run past the
    /// defining string. Only allowed when the wrapped string stays
    /// repeat-free (e.g. a De Bruijn cycle), otherwise the added transition
    /// would collide with an existing one.
    pub fn with_cyclic_completion(mut self) -> Result<Self> {
        if match_count(&self.source_string, self.k, Convention::Cyclic)? != 0 {
            return Err(Error::Construction(
                "cyclic completion requires the wrapped string to be repeat-free".into(),
            ));
        }
        let n = self.source_string.len();
        let sym = self.source_string.symbols();
        // the k-1 wrap contexts, plus the one closing the cycle
        for i in n - self.k..n {
            let ctx: Vec<u16> = (0..self.k).map(|j| sym[(i + j) % n]).collect();
            let succ = sym[(i + self.k) % n];
            self.transitions.insert(ctx.into_boxed_slice(), succ);
        }
        self.cyclic = true;
        Ok(self)
    }

    /// Emit the seed context then follow transitions. Without cyclic
    /// completion the output is a prefix of the source string and m may not
    /// exceed its length.
    pub fn generate(&self, m: usize) -> Result<Sequence> {
        if !self.cyclic && m > self.source_string.len() {
            return Err(Error::Generation(format!(
                "requested {m} symbols but the source only defines {} (enable cyclic completion)",
                self.source_string.len()
            )));
        }
        let mut out: Vec<u16> = Vec::with_capacity(m);
        out.extend_from_slice(&self.seed_context[..self.k.min(m)]);
        while out.len() < m {
            let ctx = &out[out.len() - self.k..];
            let succ = self.transitions.get(ctx).copied().ok_or_else(|| {
                Error::Generation("no transition defined for the current context".into())
            })?;
            out.push(succ);
        }
        Sequence::new(out, self.source_string.alphabet())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{h0, hk};
    use crate::debruijn::{generate as db_generate, DeBruijnSpec};
    use crate::seq::parse_sequence;
    use crate::seq::ParseMode;

    fn seq(text: &str, sigma: u32) -> Sequence {
        parse_sequence(text.as_bytes(), ParseMode::DigitText, Some(sigma)).unwrap()
    }

    #[test]
    fn build_example() {
        let src = build_markov_from_string(&seq("0123", 4), 1).unwrap();
        assert_eq!(src.seed_context(), &[0]);
        assert_eq!(src.transition_count(), 3);
        assert_eq!(src.generate(4).unwrap().symbols(), &[0, 1, 2, 3]);
        assert_eq!(src.generate(2).unwrap().symbols(), &[0, 1]);
    }

    #[test]
    fn repeated_tuple_rejected_with_positions() {
        let err = build_markov_from_string(&seq("001", 2), 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('1') && msg.contains('2'), "{msg}");
    }

    #[test]
    fn debruijn_linearization_reproduced() {
        let s = seq("00010111", 2);
        let src = build_markov_from_string(&s, 3).unwrap();
        assert_eq!(src.transition_count(), 5);
        assert_eq!(src.generate(8).unwrap(), s);
    }

    #[test]
    fn generation_beyond_string_needs_cyclic() {
        let s = seq("00010111", 2);
        let src = build_markov_from_string(&s, 3).unwrap();
        assert!(src.generate(9).is_err());
        let src = src.with_cyclic_completion().unwrap();
        let long = src.generate(24).unwrap();
        assert_eq!(&long.symbols()[..8], s.symbols());
        assert_eq!(&long.symbols()[8..16], s.symbols());
    }

    #[test]
    fn cyclic_completion_rejected_when_wrap_repeats() {
        assert!(build_markov_from_string(&seq("0123", 4), 1)
            .unwrap()
            .with_cyclic_completion()
            .is_ok());
        // linear 2-windows of "00110" are distinct but the wrap window "00"
        // repeats, so cyclic completion must refuse
        assert!(build_markov_from_string(&seq("00110", 2), 2)
            .unwrap()
            .with_cyclic_completion()
            .is_err());
    }

    #[test]
    fn entropy_rate_labels() {
        // long Markov-generated prefix on a De Bruijn cycle: H_k = 0 at order >= k
        let d = db_generate(&DeBruijnSpec::new(2, 6).unwrap(), "greedy-least", RngSpec::default())
            .unwrap();
        let src = build_markov_from_string(d.sequence(), 6)
            .unwrap()
            .with_cyclic_completion()
            .unwrap();
        let long = src.generate(512).unwrap();
        for k in 6..=8 {
            assert_eq!(hk(&long, k, Convention::Cyclic).unwrap().h_value, 0.0);
        }
        // memoryless sample approaches log2 sigma
        let mem = MemorylessSource::new(Alphabet::new(4).unwrap());
        let sample = mem.generate(100_000, RngSpec::new(99, 0));
        let h = h0(&sample);
        // multinomial H0 concentration; 3 sigma of the asymptotic fluctuation
        assert!((h - 2.0).abs() < 0.01, "h0 = {h}");
    }

    #[test]
    fn memoryless_deterministic_under_spec() {
        let mem = MemorylessSource::new(Alphabet::new(2).unwrap());
        assert_eq!(
            mem.generate(5, RngSpec::new(3, 1)),
            mem.generate(5, RngSpec::new(3, 1))
        );
    }

    #[test]
    fn fuzzed_reproduction() {
        use crate::seq::random_sequence;
        let a = Alphabet::new(3).unwrap();
        let mut accepted = 0;
        for master in 0..400u64 {
            let s = random_sequence(12, a, RngSpec::new(master, 0));
            if match_count(&s, 3, Convention::Linear).unwrap() != 0 {
                continue;
            }
            accepted += 1;
            let src = build_markov_from_string(&s, 3).unwrap();
            assert_eq!(src.generate(s.len()).unwrap(), s);
        }
        assert!(accepted > 10, "too few repeat-free samples: {accepted}");
    }
}

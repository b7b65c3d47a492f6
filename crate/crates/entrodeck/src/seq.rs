//! Alphabet-aware sequences and ingestion.
//!
//! Symbols are dense integer codes in `[0, sigma)`; everything downstream
//! operates on codes, never on raw characters. Digit-text maps the 62
//! characters `0-9A-Za-z` to codes 0..61.

use crate::error::{Error, Result};
use crate::rng::RngSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DIGITS: &[u8; 62] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    sigma: u32,
}

impl Alphabet {
    pub fn new(sigma: u32) -> Result<Self> {
        if sigma < 2 {
            return Err(Error::Config(format!(
                "alphabet size must be at least 2, got {sigma}"
            )));
        }
        if sigma > 1 << 16 {
            return Err(Error::Config(format!(
                "alphabet size {sigma} exceeds the supported maximum of 65536"
            )));
        }
        Ok(Alphabet { sigma })
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// log2(sigma), the entropy ceiling in bits per symbol.
    pub fn max_entropy_bits(&self) -> f64 {
        (self.sigma as f64).log2()
    }

    /// Bits needed to pack one symbol code.
    pub fn symbol_bits(&self) -> u32 {
        (32 - (self.sigma - 1).leading_zeros()).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    symbols: Vec<u16>,
    alphabet: Alphabet,
}

impl Sequence {
    pub fn new(symbols: Vec<u16>, alphabet: Alphabet) -> Result<Self> {
        for (i, &s) in symbols.iter().enumerate() {
            if u32::from(s) >= alphabet.sigma() {
                return Err(Error::Parse {
                    position: i + 1,
                    message: format!(
                        "symbol code {s} out of alphabet of size {}",
                        alphabet.sigma()
                    ),
                });
            }
        }
        Ok(Sequence { symbols, alphabet })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Sequence {
            symbols: Vec::new(),
            alphabet,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn sigma(&self) -> u32 {
        self.alphabet.sigma()
    }

    /// Digit-text serialization; only defined for sigma <= 62.
    pub fn to_digit_text(&self) -> Result<String> {
        if self.sigma() > 62 {
            return Err(Error::Config(format!(
                "digit-text output requires sigma <= 62, got {}",
                self.sigma()
            )));
        }
        Ok(self
            .symbols
            .iter()
            .map(|&s| DIGITS[s as usize] as char)
            .collect())
    }

    /// Digit-text when the alphabet allows it, comma-separated codes otherwise.
    pub fn display(&self) -> String {
        self.to_digit_text().unwrap_or_else(|_| {
            self.symbols
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    RawBytes,
    DigitText,
}

fn digit_value(c: u8) -> Option<u16> {
    match c {
        b'0'..=b'9' => Some(u16::from(c - b'0')),
        b'A'..=b'Z' => Some(u16::from(c - b'A') + 10),
        b'a'..=b'z' => Some(u16::from(c - b'a') + 36),
        _ => None,
    }
}

/// Parse raw bytes into a sequence. In digit-text mode a single trailing
/// newline is ignored and `sigma` defaults to the largest digit value + 1;
/// in raw-bytes mode `sigma` defaults to 256. Positions in errors are 1-based.
pub fn parse_sequence(raw: &[u8], mode: ParseMode, sigma: Option<u32>) -> Result<Sequence> {
    match mode {
        ParseMode::RawBytes => {
            let sigma = sigma.unwrap_or(256);
            let alphabet = Alphabet::new(sigma)?;
            for (i, &b) in raw.iter().enumerate() {
                if u32::from(b) >= sigma {
                    return Err(Error::Parse {
                        position: i + 1,
                        message: format!("byte value {b} out of alphabet of size {sigma}"),
                    });
                }
            }
            let symbols = raw.iter().map(|&b| u16::from(b)).collect();
            Sequence::new(symbols, alphabet)
        }
        ParseMode::DigitText => {
            let mut text = raw;
            if text.ends_with(b"\n") {
                text = &text[..text.len() - 1];
            }
            if text.ends_with(b"\r") {
                text = &text[..text.len() - 1];
            }
            let mut symbols = Vec::with_capacity(text.len());
            for (i, &c) in text.iter().enumerate() {
                let v = digit_value(c).ok_or_else(|| Error::Parse {
                    position: i + 1,
                    message: format!("character {:?} is not in the digit set 0-9A-Za-z", c as char),
                })?;
                symbols.push(v);
            }
            let sigma = match sigma {
                Some(s) => s,
                None => symbols
                    .iter()
                    .map(|&s| u32::from(s) + 1)
                    .max()
                    .unwrap_or(2)
                    .max(2),
            };
            let alphabet = Alphabet::new(sigma)?;
            for (i, &s) in symbols.iter().enumerate() {
                if u32::from(s) >= sigma {
                    return Err(Error::Parse {
                        position: i + 1,
                        message: format!("symbol {s} out of alphabet of size {sigma}"),
                    });
                }
            }
            Sequence::new(symbols, alphabet)
        }
    }
}

/// i.i.d. uniform symbols, fully determined by the rng spec.
pub fn random_sequence(n: usize, alphabet: Alphabet, spec: RngSpec) -> Sequence {
    let mut rng = spec.rng();
    random_sequence_with(n, alphabet, &mut rng)
}

/// Same as [`random_sequence`] but drawing from an already-positioned stream.
pub fn random_sequence_with(n: usize, alphabet: Alphabet, rng: &mut ChaCha8Rng) -> Sequence {
    let sigma = alphabet.sigma();
    let symbols = (0..n).map(|_| rng.gen_range(0..sigma) as u16).collect();
    Sequence {
        symbols,
        alphabet,
    }
}

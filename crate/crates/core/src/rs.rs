//! Systematic, shortened Reed-Solomon codes over GF(2^s).
//!
//! A code is fixed by the symbol size `s`, the number of data symbols `k`
//! and the number of parity symbols `r`. The generator polynomial is the
//! narrow-sense product `g(X) = (X - alpha)(X - alpha^2)...(X - alpha^r)`.
//!
//! Codewords are laid out highest degree first:
//!
//! ```text
//! [ Z zero-pad symbols | k data symbols | r parity symbols ]
//!   not transmitted      M(X) * X^r        X^r M(X) mod g(X)
//! ```
//!
//! with `Z + k + r = 2^s - 1`. The pad occupies the highest powers of `X`
//! and is identically zero, so it contributes nothing to syndromes or to the
//! parity; the decoder treats it as reinserted and rejects any error located
//! inside it.
//!
//! Decoding runs syndrome computation, Berlekamp-Massey for the error
//! locator, Chien search for the error positions and Forney's formula for the
//! error values. Codes with two parity symbols take the closed-form
//! single-error path instead of Berlekamp-Massey.

use crate::bits::{pack_symbols, unpack_symbols};
use crate::error::CodecError;
use crate::gf::{GaloisField, Symbol};

/// A transmitted codeword plus the bookkeeping needed to decode it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsCodeword {
    /// Data symbols followed by parity symbols. Pad symbols are not stored.
    pub symbols: Vec<Symbol>,
    pub k_symbols: usize,
    pub r_symbols: usize,
    /// Zero-pad symbols the decoder prepends; never transmitted.
    pub zero_pad: usize,
}

impl RsCodeword {
    pub fn data(&self) -> &[Symbol] {
        &self.symbols[..self.k_symbols]
    }

    pub fn parity(&self) -> &[Symbol] {
        &self.symbols[self.k_symbols..]
    }

    /// The full `2^s - 1` symbol word as seen by the decoder.
    pub fn full_word(&self) -> Vec<Symbol> {
        let mut word = vec![0; self.zero_pad];
        word.extend_from_slice(&self.symbols);
        word
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    /// Decoding succeeded after correcting this many symbols.
    Corrected(usize),
    /// The syndromes are inconsistent with any error pattern of weight at
    /// most `r / 2`.
    Uncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub data: Vec<u8>,
    pub status: RsStatus,
}

#[derive(Debug, Clone)]
pub struct ReedSolomon {
    field: &'static GaloisField,
    k_symbols: usize,
    r_symbols: usize,
    /// Monic generator, highest degree first, length `r + 1`.
    generator: Vec<Symbol>,
    /// log_alpha of each non-leading generator coefficient, `None` for zero.
    generator_log: Vec<Option<usize>>,
}

impl ReedSolomon {
    pub fn new(s: u32, k_symbols: usize, r_symbols: usize) -> Result<Self, CodecError> {
        let field = GaloisField::get(s).ok_or(CodecError::SymbolSize(s))?;
        if k_symbols == 0 || r_symbols == 0 {
            return Err(CodecError::Dimensions(format!(
                "need at least one data and one parity symbol (k={k_symbols}, r={r_symbols})"
            )));
        }
        if k_symbols + r_symbols > field.order() {
            return Err(CodecError::Capacity {
                data: k_symbols,
                parity: r_symbols,
                max: field.order(),
            });
        }
        let mut generator: Vec<Symbol> = vec![1];
        for i in 1..=r_symbols {
            let root = field.alpha_pow(i);
            let mut next = vec![0; generator.len() + 1];
            for (j, &c) in generator.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= field.mul(c, root);
            }
            generator = next;
        }
        let generator_log = generator[1..]
            .iter()
            .map(|&c| (c != 0).then(|| field.log(c)))
            .collect();
        Ok(ReedSolomon {
            field,
            k_symbols,
            r_symbols,
            generator,
            generator_log,
        })
    }

    /// Builds the code for `k_bits` data bits, which must be a multiple of `s`.
    pub fn for_bits(s: u32, k_bits: usize, r_symbols: usize) -> Result<Self, CodecError> {
        if s == 0 || !k_bits.is_multiple_of(s as usize) {
            return Err(CodecError::NotSymbolAligned { bits: k_bits, s });
        }
        Self::new(s, k_bits / s as usize, r_symbols)
    }

    pub fn symbol_bits(&self) -> u32 {
        self.field.bits()
    }

    pub fn k_symbols(&self) -> usize {
        self.k_symbols
    }

    pub fn r_symbols(&self) -> usize {
        self.r_symbols
    }

    /// Transmitted codeword length in symbols.
    pub fn len(&self) -> usize {
        self.k_symbols + self.r_symbols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn zero_pad(&self) -> usize {
        self.field.order() - self.len()
    }

    /// Symbol errors guaranteed correctable, `r / 2`.
    pub fn correction_capability(&self) -> usize {
        self.r_symbols / 2
    }

    pub fn generator(&self) -> &[Symbol] {
        &self.generator
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    /// Remainder of `X^r * M(X)` divided by `g(X)`, highest degree first.
    pub fn parity(&self, data: &[Symbol]) -> Vec<Symbol> {
        let r = self.r_symbols;
        let mut reg = vec![0 as Symbol; r];
        for &d in data {
            let feedback = d ^ reg[0];
            reg.copy_within(1.., 0);
            reg[r - 1] = 0;
            if feedback != 0 {
                let lf = self.field.log(feedback);
                for (slot, gl) in reg.iter_mut().zip(&self.generator_log) {
                    if let Some(gl) = *gl {
                        *slot ^= self.field.alpha_pow(lf + gl);
                    }
                }
            }
        }
        reg
    }

    pub fn encode_symbols(&self, data: &[Symbol]) -> Result<Vec<Symbol>, CodecError> {
        if data.len() != self.k_symbols {
            return Err(CodecError::Length {
                expected: self.k_symbols,
                actual: data.len(),
            });
        }
        let mut word = Vec::with_capacity(self.len());
        word.extend_from_slice(data);
        word.extend(self.parity(data));
        Ok(word)
    }

    /// Encodes `K = k * s` data bits.
    pub fn encode(&self, data_bits: &[u8]) -> Result<RsCodeword, CodecError> {
        let s = self.symbol_bits();
        let expected = self.k_symbols * s as usize;
        if data_bits.len() != expected {
            return Err(CodecError::Length {
                expected,
                actual: data_bits.len(),
            });
        }
        let data = pack_symbols(data_bits, s)?;
        Ok(RsCodeword {
            symbols: self.encode_symbols(&data)?,
            k_symbols: self.k_symbols,
            r_symbols: self.r_symbols,
            zero_pad: self.zero_pad(),
        })
    }

    /// Decodes a received codeword to its `K` data bits. Uncorrectable words
    /// return the received data symbols unchanged.
    pub fn decode(&self, received: &RsCodeword) -> Result<RsDecoded, CodecError> {
        if received.k_symbols != self.k_symbols
            || received.r_symbols != self.r_symbols
            || received.zero_pad != self.zero_pad()
        {
            return Err(CodecError::Dimensions(format!(
                "codeword is ({}, {}, pad {}), decoder is ({}, {}, pad {})",
                received.k_symbols,
                received.r_symbols,
                received.zero_pad,
                self.k_symbols,
                self.r_symbols,
                self.zero_pad()
            )));
        }
        let mut word = received.symbols.clone();
        let status = self.decode_symbols(&mut word)?;
        Ok(RsDecoded {
            data: unpack_symbols(&word[..self.k_symbols], self.symbol_bits()),
            status,
        })
    }

    /// Corrects a received `k + r` symbol word in place.
    pub fn decode_symbols(&self, word: &mut [Symbol]) -> Result<RsStatus, CodecError> {
        if word.len() != self.len() {
            return Err(CodecError::Length {
                expected: self.len(),
                actual: word.len(),
            });
        }
        let syndromes = self.syndromes(word);
        if syndromes.iter().all(|&s| s == 0) {
            return Ok(RsStatus::Corrected(0));
        }
        let corrections = if self.r_symbols == 2 {
            self.single_error(&syndromes)
        } else {
            self.locate_and_evaluate(&syndromes)
        };
        let Some(corrections) = corrections else {
            return Ok(RsStatus::Uncorrectable);
        };
        for &(pos, value) in &corrections {
            word[pos] ^= value;
        }
        if self.syndromes(word).iter().any(|&s| s != 0) {
            for &(pos, value) in &corrections {
                word[pos] ^= value;
            }
            return Ok(RsStatus::Uncorrectable);
        }
        Ok(RsStatus::Corrected(corrections.len()))
    }

    /// `S_j = r(alpha^j)` for `j = 1..=r`.
    pub fn syndromes(&self, word: &[Symbol]) -> Vec<Symbol> {
        (1..=self.r_symbols)
            .map(|j| {
                word.iter()
                    .fold(0, |acc, &c| self.field.mul_exp(acc, j) ^ c)
            })
            .collect()
    }

    /// Index in the transmitted word of the coefficient of `X^power`.
    fn index_of_power(&self, power: usize) -> Option<usize> {
        (power < self.len()).then(|| self.len() - 1 - power)
    }

    // With S1 = e X and S2 = e X^2: X = S2 / S1, e = S1^2 / S2.
    fn single_error(&self, syn: &[Symbol]) -> Option<Vec<(usize, Symbol)>> {
        let (s1, s2) = (syn[0], syn[1]);
        if s1 == 0 || s2 == 0 {
            return None;
        }
        let f = self.field;
        let locator = f.div(s2, s1);
        let value = f.div(f.mul(s1, s1), s2);
        let pos = self.index_of_power(f.log(locator))?;
        Some(vec![(pos, value)])
    }

    fn locate_and_evaluate(&self, syn: &[Symbol]) -> Option<Vec<(usize, Symbol)>> {
        let f = self.field;
        let lambda = self.berlekamp_massey(syn)?;
        let errors = lambda.len() - 1;
        if errors == 0 || errors > self.correction_capability() {
            return None;
        }

        // Chien search over transmitted positions; pad positions are known zero.
        let mut roots = Vec::with_capacity(errors);
        for power in 0..self.len() {
            let x_inv = f.alpha_pow(f.order() - power % f.order());
            if eval_low_first(f, &lambda, x_inv) == 0 {
                roots.push((power, x_inv));
            }
        }
        if roots.len() != errors {
            return None;
        }

        // Forney with first consecutive root alpha^1: e = Omega(X^-1) / Lambda'(X^-1).
        let omega = {
            let mut omega = vec![0 as Symbol; self.r_symbols];
            for (i, &s) in syn.iter().enumerate() {
                for (j, &l) in lambda.iter().enumerate() {
                    if i + j < self.r_symbols {
                        omega[i + j] ^= f.mul(s, l);
                    }
                }
            }
            omega
        };
        let derivative: Vec<Symbol> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();

        roots
            .into_iter()
            .map(|(power, x_inv)| {
                let denom = eval_low_first(f, &derivative, x_inv);
                if denom == 0 {
                    return None;
                }
                let value = f.div(eval_low_first(f, &omega, x_inv), denom);
                Some((self.index_of_power(power)?, value))
            })
            .collect()
    }

    /// Error-locator polynomial, lowest degree first, trimmed to its degree.
    fn berlekamp_massey(&self, syn: &[Symbol]) -> Option<Vec<Symbol>> {
        let f = self.field;
        let n = syn.len();
        let mut lambda = vec![0 as Symbol; n + 1];
        let mut prev = vec![0 as Symbol; n + 1];
        lambda[0] = 1;
        prev[0] = 1;
        let mut degree = 0usize;
        let mut shift = 1usize;
        let mut prev_discrepancy: Symbol = 1;

        for step in 0..n {
            let mut discrepancy = syn[step];
            for i in 1..=degree {
                discrepancy ^= f.mul(lambda[i], syn[step - i]);
            }
            if discrepancy == 0 {
                shift += 1;
                continue;
            }
            let scale = f.div(discrepancy, prev_discrepancy);
            let snapshot = lambda.clone();
            for i in 0..=n - shift {
                lambda[i + shift] ^= f.mul(scale, prev[i]);
            }
            if 2 * degree <= step {
                degree = step + 1 - degree;
                prev = snapshot;
                prev_discrepancy = discrepancy;
                shift = 1;
            } else {
                shift += 1;
            }
        }
        let actual = lambda.iter().rposition(|&c| c != 0).unwrap_or(0);
        if actual != degree {
            return None;
        }
        lambda.truncate(degree + 1);
        Some(lambda)
    }
}

fn eval_low_first(f: &GaloisField, coeffs: &[Symbol], x: Symbol) -> Symbol {
    coeffs.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
}

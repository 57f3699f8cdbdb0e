//! One generation through encoder, binary symmetric channel and decoder.

use std::ops::Add;

use rand::Rng;

use crate::channel::error_positions;
use crate::control::{LinkConfig, Scheme};
use crate::error::CodecError;
use crate::gf::Symbol;
use crate::mdpc::{MdpcCode, MdpcStatus, DEFAULT_MAX_ITERATIONS};
use crate::rs::{ReedSolomon, RsStatus};

use super::exec::Execution;
use super::seed;

/// What the receiver concluded about one generation, checked against the
/// transmitted payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Arrived without channel errors.
    Clean,
    /// Channel errors were all removed by the decoder.
    Corrected,
    /// Decoder gave up or delivered wrong data.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationOutcome {
    pub outcome: Outcome,
    /// Transmitted codeword bits.
    pub bits_sent: u64,
    /// Bits flipped by the channel.
    pub bit_errors: u64,
    /// Channel errors in the unit the code corrects: bits for MDPC, symbols
    /// for RS.
    pub unit_errors: u64,
    pub data_bits: u64,
    /// Payload bits still wrong after decoding.
    pub residual_bit_errors: u64,
}

/// A codec instantiated for a [`LinkConfig`].
#[derive(Debug, Clone)]
pub enum ActiveCodec {
    Mdpc { code: MdpcCode, max_iterations: usize },
    Rs(ReedSolomon),
}

impl ActiveCodec {
    pub fn for_scheme(scheme: &Scheme, mdpc_max_iterations: usize) -> Result<Self, CodecError> {
        Ok(match *scheme {
            Scheme::Mdpc { m, n } => ActiveCodec::Mdpc {
                code: MdpcCode::new(m, n)?,
                max_iterations: mdpc_max_iterations,
            },
            Scheme::Rs { s, codeword, t } => {
                if codeword < 2 * t + 1 {
                    return Err(CodecError::Capacity {
                        data: codeword.saturating_sub(2 * t),
                        parity: 2 * t,
                        max: codeword,
                    });
                }
                ActiveCodec::Rs(ReedSolomon::new(s, codeword - 2 * t, 2 * t)?)
            }
        })
    }

    pub fn for_config(config: &LinkConfig) -> Result<Self, CodecError> {
        ActiveCodec::for_scheme(&config.scheme, DEFAULT_MAX_ITERATIONS)
    }

    pub fn codeword_bits(&self) -> usize {
        match self {
            ActiveCodec::Mdpc { code, .. } => code.len(),
            ActiveCodec::Rs(rs) => rs.len() * rs.symbol_bits() as usize,
        }
    }

    pub fn data_bits(&self) -> usize {
        match self {
            ActiveCodec::Mdpc { code, .. } => code.k(),
            ActiveCodec::Rs(rs) => rs.k_symbols() * rs.symbol_bits() as usize,
        }
    }

    pub fn correction_capability(&self) -> usize {
        match self {
            ActiveCodec::Mdpc { code, .. } => code.correction_capability(),
            ActiveCodec::Rs(rs) => rs.correction_capability(),
        }
    }

    /// Sends one random payload through a BSC with crossover `p_e`.
    pub fn simulate<R: Rng + ?Sized>(&self, p_e: f64, rng: &mut R) -> GenerationOutcome {
        let bits_sent = self.codeword_bits() as u64;
        let data_bits = self.data_bits() as u64;
        let errors = error_positions(self.codeword_bits(), p_e, rng);
        if errors.is_empty() {
            // A valid codeword always decodes clean.
            return GenerationOutcome {
                outcome: Outcome::Clean,
                bits_sent,
                bit_errors: 0,
                unit_errors: 0,
                data_bits,
                residual_bit_errors: 0,
            };
        }
        let (unit_errors, decoder_failed, residual) = match self {
            ActiveCodec::Mdpc { code, max_iterations } => {
                simulate_mdpc(code, *max_iterations, &errors, rng)
            }
            ActiveCodec::Rs(rs) => simulate_rs(rs, &errors, rng),
        };
        let outcome = if decoder_failed || residual > 0 {
            Outcome::Failed
        } else {
            Outcome::Corrected
        };
        GenerationOutcome {
            outcome,
            bits_sent,
            bit_errors: errors.len() as u64,
            unit_errors,
            data_bits,
            residual_bit_errors: residual,
        }
    }

    /// Runs `count` independent generations keyed by `stream` and sums them.
    pub fn simulate_batch(&self, p_e: f64, stream: u64, count: u64, exec: Execution) -> BatchStats {
        let t = self.correction_capability() as u64;
        exec.map_reduce(
            count,
            BatchStats::default(),
            |i| {
                let mut rng = seed::rng_for(stream, i);
                BatchStats::from_outcome(&self.simulate(p_e, &mut rng), t)
            },
            |a, b| a + b,
        )
    }
}

fn simulate_mdpc<R: Rng + ?Sized>(
    code: &MdpcCode,
    max_iterations: usize,
    errors: &[usize],
    rng: &mut R,
) -> (u64, bool, u64) {
    let data: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
    let mut cells = code.encode(&data).expect("payload sized to the code").cells;
    for &e in errors {
        cells[e] ^= 1;
    }
    let (status, _, _) = code.decode_in_place(&mut cells, max_iterations);
    let residual = code
        .data_cells()
        .iter()
        .zip(&data)
        .filter(|&(&c, &d)| cells[c] != d)
        .count() as u64;
    (errors.len() as u64, status == MdpcStatus::Uncorrectable, residual)
}

fn simulate_rs<R: Rng + ?Sized>(rs: &ReedSolomon, errors: &[usize], rng: &mut R) -> (u64, bool, u64) {
    let s = rs.symbol_bits() as usize;
    let mask = ((1u32 << s) - 1) as Symbol;
    let data: Vec<Symbol> = (0..rs.k_symbols()).map(|_| rng.random::<Symbol>() & mask).collect();
    let mut word = rs.encode_symbols(&data).expect("payload sized to the code");
    let mut symbol_errors = 0u64;
    let mut last = usize::MAX;
    for &e in errors {
        let idx = e / s;
        word[idx] ^= 1 << (s - 1 - e % s);
        if idx != last {
            symbol_errors += 1;
            last = idx;
        }
    }
    let status = rs.decode_symbols(&mut word).expect("word sized to the code");
    let residual = word[..data.len()]
        .iter()
        .zip(&data)
        .map(|(a, b)| (a ^ b).count_ones() as u64)
        .sum();
    (symbol_errors, status == RsStatus::Uncorrectable, residual)
}

/// Summed counters over a batch of generations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchStats {
    pub generations: u64,
    pub clean: u64,
    pub corrected: u64,
    pub failed: u64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub data_bits: u64,
    pub residual_bit_errors: u64,
    /// Generations with at least one but at most `t` unit errors.
    pub within_capability: u64,
    pub within_capability_failures: u64,
    /// Generations with more than `t` unit errors.
    pub beyond_capability: u64,
}

impl BatchStats {
    pub fn from_outcome(o: &GenerationOutcome, t: u64) -> Self {
        let failed = (o.outcome == Outcome::Failed) as u64;
        let within = (o.unit_errors > 0 && o.unit_errors <= t) as u64;
        BatchStats {
            generations: 1,
            clean: (o.outcome == Outcome::Clean) as u64,
            corrected: (o.outcome == Outcome::Corrected) as u64,
            failed,
            bits_sent: o.bits_sent,
            bit_errors: o.bit_errors,
            data_bits: o.data_bits,
            residual_bit_errors: o.residual_bit_errors,
            within_capability: within,
            within_capability_failures: within * failed,
            beyond_capability: (o.unit_errors > t) as u64,
        }
    }

    /// Channel bit error rate before decoding.
    pub fn channel_ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits_sent)
    }

    /// Payload bit error rate after decoding.
    pub fn residual_ber(&self) -> f64 {
        ratio(self.residual_bit_errors, self.data_bits)
    }

    /// Fraction of generations that failed.
    pub fn failure_rate(&self) -> f64 {
        ratio(self.failed, self.generations)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Add for BatchStats {
    type Output = BatchStats;

    fn add(self, o: BatchStats) -> BatchStats {
        BatchStats {
            generations: self.generations + o.generations,
            clean: self.clean + o.clean,
            corrected: self.corrected + o.corrected,
            failed: self.failed + o.failed,
            bits_sent: self.bits_sent + o.bits_sent,
            bit_errors: self.bit_errors + o.bit_errors,
            data_bits: self.data_bits + o.data_bits,
            residual_bit_errors: self.residual_bit_errors + o.residual_bit_errors,
            within_capability: self.within_capability + o.within_capability,
            within_capability_failures: self.within_capability_failures
                + o.within_capability_failures,
            beyond_capability: self.beyond_capability + o.beyond_capability,
        }
    }
}

impl std::ops::AddAssign for BatchStats {
    fn add_assign(&mut self, o: BatchStats) {
        *self = *self + o;
    }
}

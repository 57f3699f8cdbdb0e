//! Abstract modulation and channel.
//!
//! Modulation is not simulated at the waveform level. It selects a row of the
//! BER table (bit error probability against distance) and a data rate; the
//! link itself is a binary symmetric channel.

mod bsc;
mod table;

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bsc::{error_positions, measure_ber, symbol_error_prob, transmit};
pub use table::{BerTable, TableModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "BPSK")]
    Bpsk,
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "8PSK")]
    Psk8,
    #[serde(rename = "16QAM")]
    Qam16,
}

impl Modulation {
    /// In increasing order of bits per symbol.
    pub const ALL: [Modulation; 4] = [
        Modulation::Bpsk,
        Modulation::Qpsk,
        Modulation::Psk8,
        Modulation::Qam16,
    ];

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Psk8 => 3,
            Modulation::Qam16 => 4,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Table/CSV name: `BPSK`, `QPSK`, `8PSK` or `16QAM`.
    pub fn name(self) -> &'static str {
        match self {
            Modulation::Bpsk => "BPSK",
            Modulation::Qpsk => "QPSK",
            Modulation::Psk8 => "8PSK",
            Modulation::Qam16 => "16QAM",
        }
    }

    /// Lower-case key used in run specs (`epsilon.16qam`, `rate.bpsk`).
    pub fn key(self) -> &'static str {
        match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
            Modulation::Psk8 => "8psk",
            Modulation::Qam16 => "16qam",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modulation::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown modulation {s:?} (expected BPSK, QPSK, 8PSK or 16QAM)"))
    }
}

/// One value per modulation, indexable by [`Modulation`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerModulation<T>(pub [T; 4]);

impl<T> PerModulation<T> {
    pub fn from_fn(mut f: impl FnMut(Modulation) -> T) -> Self {
        PerModulation(Modulation::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Modulation, &T)> {
        Modulation::ALL.into_iter().zip(self.0.iter())
    }
}

impl<T> Index<Modulation> for PerModulation<T> {
    type Output = T;

    fn index(&self, m: Modulation) -> &T {
        &self.0[m.index()]
    }
}

impl<T> IndexMut<Modulation> for PerModulation<T> {
    fn index_mut(&mut self, m: Modulation) -> &mut T {
        &mut self.0[m.index()]
    }
}

/// Data rates in Gbps: 7.04 Gbps per bit per symbol.
pub fn default_rates() -> PerModulation<f64> {
    PerModulation([7.04, 14.08, 21.12, 28.16])
}

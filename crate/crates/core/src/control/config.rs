use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::Modulation;

/// Coding scheme and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// MDPC(nD/mL): `K = m^n`, `R = (m + 1)^n - m^n`.
    Mdpc { m: usize, n: u32 },
    /// Reed-Solomon with `s`-bit symbols, `codeword` transmitted symbols and
    /// `t` correctable symbols (`R = 2 s t` bits).
    Rs { s: u32, codeword: usize, t: usize },
}

impl Scheme {
    pub fn k_bits(&self) -> usize {
        match *self {
            Scheme::Mdpc { m, n } => m.pow(n),
            Scheme::Rs { s, codeword, t } => s as usize * (codeword - 2 * t),
        }
    }

    pub fn r_bits(&self) -> usize {
        match *self {
            Scheme::Mdpc { m, n } => (m + 1).pow(n) - m.pow(n),
            Scheme::Rs { s, t, .. } => 2 * s as usize * t,
        }
    }

    /// `K / (K + R)`.
    pub fn code_rate(&self) -> f64 {
        let k = self.k_bits() as f64;
        k / (k + self.r_bits() as f64)
    }

    /// Correctable errors: bits for MDPC (`2^(n-1) - 1`), symbols for RS.
    pub fn correction_capability(&self) -> usize {
        match *self {
            Scheme::Mdpc { n, .. } => (1usize << (n - 1)) - 1,
            Scheme::Rs { t, .. } => t,
        }
    }

    pub fn is_rs(&self) -> bool {
        matches!(self, Scheme::Rs { .. })
    }

    /// `MDPC` or `RS`.
    pub fn family(&self) -> &'static str {
        match self {
            Scheme::Mdpc { .. } => "MDPC",
            Scheme::Rs { .. } => "RS",
        }
    }

    /// RS symbol size, 0 for MDPC.
    pub fn symbol_bits(&self) -> u32 {
        match *self {
            Scheme::Rs { s, .. } => s,
            Scheme::Mdpc { .. } => 0,
        }
    }
}

impl fmt::Display for Scheme {
    /// `MDPC(K)` or `RS(K;s)`, the actuation message form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Mdpc { .. } => write!(f, "MDPC({})", self.k_bits()),
            Scheme::Rs { s, .. } => write!(f, "RS({};{})", self.k_bits(), s),
        }
    }
}

/// The configuration actuated at transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub scheme: Scheme,
    pub modulation: Modulation,
    /// Data transmission rate D of `modulation`, in Gbps.
    pub data_rate_gbps: f64,
}

impl LinkConfig {
    /// RS(224, 240) with 8-bit symbols over 16QAM.
    pub fn initial(rate_16qam_gbps: f64) -> Self {
        LinkConfig {
            scheme: Scheme::Rs {
                s: 8,
                codeword: 30,
                t: 1,
            },
            modulation: Modulation::Qam16,
            data_rate_gbps: rate_16qam_gbps,
        }
    }

    pub fn k_bits(&self) -> usize {
        self.scheme.k_bits()
    }

    pub fn r_bits(&self) -> usize {
        self.scheme.r_bits()
    }

    pub fn code_rate(&self) -> f64 {
        self.scheme.code_rate()
    }

    /// Transmission overhead, `1 - R_F`.
    pub fn overhead(&self) -> f64 {
        1.0 - self.code_rate()
    }

    /// `R_F * D * (1 - p_residual)` in Gbps.
    pub fn throughput_gbps(&self, p_residual: f64) -> f64 {
        self.code_rate() * self.data_rate_gbps * (1.0 - p_residual)
    }
}

impl fmt::Display for LinkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.scheme, self.modulation)
    }
}

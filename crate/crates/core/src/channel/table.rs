//! Distance x modulation BER table and the synthetic default generator.
//!
//! CSV layout: header `distance_m,modulation,ber`, one row per
//! (distance, modulation), distances ascending.
//!
//! # Default table model
//!
//! The generator produces AWGN-style curves driven by a received SNR (per
//! symbol, linear `gamma`) that falls off with distance through free-space
//! spreading plus a linear absorption term:
//!
//! ```text
//! snr_db(d) = snr_anchor_db + 20 log10(d_anchor / d) + absorption * (d_anchor - d)
//! ```
//!
//! Per-modulation bit error probabilities, with `Q(x) = erfc(x / sqrt 2) / 2`:
//!
//! | modulation | BER                                              |
//! |------------|--------------------------------------------------|
//! | BPSK       | `Q(sqrt(2 gamma))`                               |
//! | QPSK       | `Q(sqrt(gamma))`                                 |
//! | 16QAM      | `3/4 Q(sqrt(gamma / 5))`                         |
//! | 8PSK       | the 16QAM curve at `gamma` reduced by `psk8_penalty_db` |
//!
//! `snr_anchor_db` is solved so that BPSK at `d_anchor` equals `anchor_ber`
//! (0.0579 at 20 m by default). 8PSK is pinned just above 16QAM so the two
//! curves are nearly coincident while 8PSK is never strictly better; since
//! 16QAM also has the higher data rate, the optimizer never picks 8PSK under
//! this table. Every value is clamped to `[0, 0.5]`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Modulation, PerModulation};
use crate::error::TableError;

// Grid lookups treat distances this close as equal.
const DISTANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BerTable {
    distances: Vec<f64>,
    ber: Vec<PerModulation<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    distance_m: f64,
    modulation: Modulation,
    ber: f64,
}

impl BerTable {
    /// Builds a table from ascending distances and one BER per modulation at
    /// each distance. Validates every invariant.
    pub fn new(distances: Vec<f64>, ber: Vec<PerModulation<f64>>) -> Result<Self, TableError> {
        if distances.is_empty() {
            return Err(TableError::Invalid("table has no distances".into()));
        }
        if distances.len() != ber.len() {
            return Err(TableError::Invalid(format!(
                "{} distances but {} BER rows",
                distances.len(),
                ber.len()
            )));
        }
        if let Some(w) = distances.windows(2).find(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(TableError::Invalid(format!(
                "distances must be strictly ascending ({} then {})",
                w[0], w[1]
            )));
        }
        for (d, row) in distances.iter().zip(&ber) {
            for (m, &p) in row.iter() {
                if !(0.0..=0.5).contains(&p) {
                    return Err(TableError::Invalid(format!(
                        "BER {p} for {m} at {d} m is outside [0, 0.5]"
                    )));
                }
            }
        }
        for m in Modulation::ALL {
            if let Some(i) = (1..ber.len()).find(|&i| ber[i][m] < ber[i - 1][m]) {
                return Err(TableError::Invalid(format!(
                    "{m} BER decreases from {} m to {} m",
                    distances[i - 1], distances[i]
                )));
            }
        }
        Ok(BerTable { distances, ber })
    }

    /// A table whose every entry is zero, on the given grid.
    pub fn zeros(distances: Vec<f64>) -> Result<Self, TableError> {
        let rows = vec![PerModulation([0.0; 4]); distances.len()];
        BerTable::new(distances, rows)
    }

    /// `0.5, 1.0, ..., 20.0` m.
    pub fn default_grid() -> Vec<f64> {
        (1..=40).map(|i| i as f64 * 0.5).collect()
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn ber_at(&self, index: usize, modulation: Modulation) -> f64 {
        self.ber[index][modulation]
    }

    pub fn row(&self, index: usize) -> &PerModulation<f64> {
        &self.ber[index]
    }

    /// Index of the grid point nearest to `distance`; exact midpoints go to
    /// the larger distance.
    pub fn nearest_index(&self, distance: f64) -> Result<usize, TableError> {
        let min = self.distances[0];
        let max = *self.distances.last().unwrap();
        if !distance.is_finite()
            || distance < min - DISTANCE_TOLERANCE
            || distance > max + DISTANCE_TOLERANCE
        {
            return Err(TableError::OutOfRange { distance, min, max });
        }
        let upper = self.distances.partition_point(|&d| d < distance);
        if upper == 0 {
            return Ok(0);
        }
        if upper == self.distances.len() {
            return Ok(upper - 1);
        }
        let below = distance - self.distances[upper - 1];
        let above = self.distances[upper] - distance;
        Ok(if below < above { upper - 1 } else { upper })
    }

    /// Bit error probability at the grid point nearest to `distance`.
    pub fn lookup_pe(&self, distance: f64, modulation: Modulation) -> Result<f64, TableError> {
        Ok(self.ber[self.nearest_index(distance)?][modulation])
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["distance_m", "modulation", "ber"] {
            return Err(TableError::Parse {
                line: 1,
                reason: format!("expected header `distance_m,modulation,ber`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut distances: Vec<f64> = Vec::new();
        let mut rows: Vec<[Option<f64>; 4]> = Vec::new();
        for (i, record) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = record.map_err(|e| TableError::Parse {
                line,
                reason: e.to_string(),
            })?;
            match distances.last() {
                Some(&last) if (row.distance_m - last).abs() <= DISTANCE_TOLERANCE => {}
                Some(&last) if row.distance_m < last => {
                    return Err(TableError::Parse {
                        line,
                        reason: format!("distance {} m after {} m; rows must be ascending", row.distance_m, last),
                    });
                }
                _ => {
                    distances.push(row.distance_m);
                    rows.push([None; 4]);
                }
            }
            let slot = &mut rows.last_mut().unwrap()[row.modulation.index()];
            if slot.replace(row.ber).is_some() {
                return Err(TableError::Parse {
                    line,
                    reason: format!("duplicate {} entry at {} m", row.modulation, row.distance_m),
                });
            }
        }
        let mut ber = Vec::with_capacity(rows.len());
        for (d, row) in distances.iter().zip(rows) {
            let mut full = [0.0; 4];
            for (m, v) in Modulation::ALL.into_iter().zip(row) {
                full[m.index()] = v.ok_or_else(|| {
                    TableError::Invalid(format!("missing {m} entry at {d} m"))
                })?;
            }
            ber.push(PerModulation(full));
        }
        BerTable::new(distances, ber)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        let file = std::fs::File::open(path).map_err(|source| TableError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        BerTable::read_csv(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), TableError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["distance_m", "modulation", "ber"])?;
        for (d, row) in self.distances.iter().zip(&self.ber) {
            for (m, &p) in row.iter() {
                wtr.write_record([format!("{d}"), m.name().to_string(), format!("{p:e}")])?;
            }
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), TableError> {
        let file = std::fs::File::create(path).map_err(|source| TableError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Parameters of the synthetic default table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    pub anchor_distance_m: f64,
    /// BPSK bit error probability at the anchor distance.
    pub anchor_ber: f64,
    /// Linear absorption loss in dB per meter.
    pub absorption_db_per_m: f64,
    /// SNR penalty putting 8PSK just above 16QAM.
    pub psk8_penalty_db: f64,
    pub distances: Vec<f64>,
}

impl Default for TableModel {
    fn default() -> Self {
        TableModel {
            anchor_distance_m: 20.0,
            anchor_ber: 0.0579,
            absorption_db_per_m: 0.6,
            psk8_penalty_db: 0.25,
            distances: BerTable::default_grid(),
        }
    }
}

fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn ber_for(modulation: Modulation, gamma: f64, psk8_penalty_db: f64) -> f64 {
    let qam16 = |g: f64| 0.75 * q((g / 5.0).sqrt());
    let p = match modulation {
        Modulation::Bpsk => q((2.0 * gamma).sqrt()),
        Modulation::Qpsk => q(gamma.sqrt()),
        Modulation::Qam16 => qam16(gamma),
        Modulation::Psk8 => qam16(gamma * 10f64.powf(-psk8_penalty_db / 10.0)),
    };
    p.clamp(0.0, 0.5)
}

impl TableModel {
    /// Per-symbol SNR in dB at the anchor, solved by bisection on the BPSK
    /// curve.
    pub fn anchor_snr_db(&self) -> f64 {
        let (mut lo, mut hi) = (-30.0f64, 60.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let p = ber_for(Modulation::Bpsk, 10f64.powf(mid / 10.0), 0.0);
            if p > self.anchor_ber {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn snr_db(&self, anchor_snr_db: f64, distance: f64) -> f64 {
        anchor_snr_db
            + 20.0 * (self.anchor_distance_m / distance).log10()
            + self.absorption_db_per_m * (self.anchor_distance_m - distance)
    }

    pub fn validate(&self) -> Result<(), TableError> {
        let bad = |what: &str| Err(TableError::Invalid(what.to_string()));
        if !(self.anchor_ber > 0.0 && self.anchor_ber < 0.5) {
            return bad("anchor BER must lie in (0, 0.5)");
        }
        if self.anchor_distance_m.is_nan() || self.anchor_distance_m <= 0.0 {
            return bad("anchor distance must be positive");
        }
        if self.absorption_db_per_m.is_nan() || self.absorption_db_per_m < 0.0 {
            return bad("absorption must be non-negative");
        }
        if self.psk8_penalty_db.is_nan() || self.psk8_penalty_db < 0.0 {
            return bad("8PSK penalty must be non-negative");
        }
        if self.distances.iter().any(|&d| d.is_nan() || d <= 0.0) {
            return bad("distances must be positive");
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<BerTable, TableError> {
        self.validate()?;
        let anchor = self.anchor_snr_db();
        let rows = self
            .distances
            .iter()
            .map(|&d| {
                let gamma = 10f64.powf(self.snr_db(anchor, d) / 10.0);
                PerModulation::from_fn(|m| ber_for(m, gamma, self.psk8_penalty_db))
            })
            .collect();
        BerTable::new(self.distances.clone(), rows)
    }
}

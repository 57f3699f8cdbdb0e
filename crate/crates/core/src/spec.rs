//! Run specification: a flat `key = value` file with dotted keys.
//!
//! ```text
//! # comment
//! table_path = ber_table.csv
//! seed = 7
//! epsilon.16qam = 2.992e-7
//! ```
//!
//! Every key is optional and defaults to the evaluation values. Unknown keys
//! and repeated keys are errors. Values can be overridden from the
//! environment with [`ENV_PREFIX`] followed by the upper-cased key with dots
//! replaced by underscores, e.g. `THZLINK_EPSILON_16QAM`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{default_rates, Modulation, PerModulation};
use crate::control::{ControlParams, EpsilonPolicy, OptimizerParams};
use crate::error::SpecError;
use crate::gf::{MAX_SYMBOL_BITS, MIN_SYMBOL_BITS};
use crate::mdpc::DEFAULT_MAX_ITERATIONS;
use crate::sim::{Execution, FeedbackMode};

pub const ENV_PREFIX: &str = "THZLINK_";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub table_path: Option<PathBuf>,
    pub seed: u64,
    /// Simulated time in seconds.
    pub duration: f64,
    /// Feedback period `t` in seconds.
    pub update_interval: f64,
    /// Receiver walking speed in m/s.
    pub walk_speed: f64,
    pub buffer_size: usize,
    pub epsilon: PerModulation<f64>,
    pub t_mdpc: usize,
    pub t_rs: usize,
    /// Data transmission rate per modulation in Gbps.
    pub rates: PerModulation<f64>,
    pub s_min: u32,
    pub s_max: u32,
    pub m_max: usize,
    pub generations_per_interval: u64,
    pub mdpc_max_iterations: usize,
    pub feedback: FeedbackMode,
    pub execution: Execution,
    /// Run the controller on its own thread.
    pub control_thread: bool,
    pub metrics_path: PathBuf,
    pub events_path: PathBuf,
}

impl Default for RunSpec {
    fn default() -> Self {
        let optimizer = OptimizerParams::default();
        RunSpec {
            table_path: None,
            seed: 1,
            duration: 6060.0,
            update_interval: 0.5,
            walk_speed: 1.0,
            buffer_size: 4,
            epsilon: EpsilonPolicy::default().0,
            t_mdpc: optimizer.t_mdpc,
            t_rs: optimizer.t_rs,
            rates: default_rates(),
            s_min: *optimizer.s_range.start(),
            s_max: *optimizer.s_range.end(),
            m_max: optimizer.m_max,
            generations_per_interval: 100,
            mdpc_max_iterations: DEFAULT_MAX_ITERATIONS,
            feedback: FeedbackMode::default(),
            execution: Execution::default(),
            control_thread: false,
            metrics_path: PathBuf::from("metrics.csv"),
            events_path: PathBuf::from("events.log"),
        }
    }
}

/// All accepted keys, in emission order.
pub const KEYS: &[&str] = &[
    "table_path",
    "seed",
    "duration",
    "update_interval",
    "walk_speed",
    "buffer_size",
    "epsilon.bpsk",
    "epsilon.qpsk",
    "epsilon.8psk",
    "epsilon.16qam",
    "t_mdpc",
    "t_rs",
    "rate.bpsk",
    "rate.qpsk",
    "rate.8psk",
    "rate.16qam",
    "s_min",
    "s_max",
    "m_max",
    "generations_per_interval",
    "mdpc_max_iterations",
    "feedback",
    "execution",
    "control_thread",
    "metrics_path",
    "events_path",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, SpecError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| SpecError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn modulation_suffix(key: &str, prefix: &str) -> Option<Modulation> {
    let rest = key.strip_prefix(prefix)?;
    Modulation::ALL.into_iter().find(|m| m.key() == rest)
}

impl RunSpec {
    pub fn control_params(&self) -> ControlParams {
        ControlParams {
            buffer_size: self.buffer_size,
            epsilon: EpsilonPolicy(self.epsilon),
            optimizer: OptimizerParams {
                t_mdpc: self.t_mdpc,
                t_rs: self.t_rs,
                s_range: self.s_min..=self.s_max,
                m_max: self.m_max,
                rates: self.rates,
            },
        }
    }

    /// Assigns one key. The value is checked for syntax only; see
    /// [`RunSpec::validate`] for range checks.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SpecError> {
        let value = value.trim();
        if let Some(m) = modulation_suffix(key, "epsilon.") {
            self.epsilon[m] = parse_value(key, value)?;
            return Ok(());
        }
        if let Some(m) = modulation_suffix(key, "rate.") {
            self.rates[m] = parse_value(key, value)?;
            return Ok(());
        }
        match key {
            "table_path" => {
                self.table_path = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "seed" => self.seed = parse_value(key, value)?,
            "duration" => self.duration = parse_value(key, value)?,
            "update_interval" => self.update_interval = parse_value(key, value)?,
            "walk_speed" => self.walk_speed = parse_value(key, value)?,
            "buffer_size" => self.buffer_size = parse_value(key, value)?,
            "t_mdpc" => self.t_mdpc = parse_value(key, value)?,
            "t_rs" => self.t_rs = parse_value(key, value)?,
            "s_min" => self.s_min = parse_value(key, value)?,
            "s_max" => self.s_max = parse_value(key, value)?,
            "m_max" => self.m_max = parse_value(key, value)?,
            "generations_per_interval" => self.generations_per_interval = parse_value(key, value)?,
            "mdpc_max_iterations" => self.mdpc_max_iterations = parse_value(key, value)?,
            "feedback" => self.feedback = parse_value(key, value)?,
            "execution" => self.execution = parse_value(key, value)?,
            "control_thread" => self.control_thread = parse_value(key, value)?,
            "metrics_path" => self.metrics_path = PathBuf::from(value),
            "events_path" => self.events_path = PathBuf::from(value),
            _ => return Err(SpecError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Current value of `key` in the form [`RunSpec::set`] accepts.
    pub fn get(&self, key: &str) -> Option<String> {
        if let Some(m) = modulation_suffix(key, "epsilon.") {
            return Some(self.epsilon[m].to_string());
        }
        if let Some(m) = modulation_suffix(key, "rate.") {
            return Some(self.rates[m].to_string());
        }
        Some(match key {
            "table_path" => self
                .table_path
                .as_ref()
                .map_or_else(String::new, |p| p.display().to_string()),
            "seed" => self.seed.to_string(),
            "duration" => self.duration.to_string(),
            "update_interval" => self.update_interval.to_string(),
            "walk_speed" => self.walk_speed.to_string(),
            "buffer_size" => self.buffer_size.to_string(),
            "t_mdpc" => self.t_mdpc.to_string(),
            "t_rs" => self.t_rs.to_string(),
            "s_min" => self.s_min.to_string(),
            "s_max" => self.s_max.to_string(),
            "m_max" => self.m_max.to_string(),
            "generations_per_interval" => self.generations_per_interval.to_string(),
            "mdpc_max_iterations" => self.mdpc_max_iterations.to_string(),
            "feedback" => self.feedback.to_string(),
            "execution" => self.execution.to_string(),
            "control_thread" => self.control_thread.to_string(),
            "metrics_path" => self.metrics_path.display().to_string(),
            "events_path" => self.events_path.display().to_string(),
            _ => return None,
        })
    }

    /// Parses a spec, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut spec = RunSpec::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SpecError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(SpecError::InvalidValue {
                    key: key.to_string(),
                    value: value.trim().to_string(),
                    reason: format!("key repeated on line {}", i + 1),
                });
            }
            spec.set(key, value)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunSpec::parse(&text)
    }

    /// Every key with its value, one per line.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = self.get(key).expect("listed key");
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Environment variable name overriding `key`.
    pub fn env_var(key: &str) -> String {
        format!("{ENV_PREFIX}{}", key.replace('.', "_").to_uppercase())
    }

    /// Applies `THZLINK_*` overrides from `vars`. Variables with the prefix
    /// that name no key are rejected.
    pub fn apply_env<I>(&mut self, vars: I) -> Result<(), SpecError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (name, value) in vars {
            if !name.starts_with(ENV_PREFIX) {
                continue;
            }
            let key = KEYS
                .iter()
                .find(|k| RunSpec::env_var(k) == name)
                .ok_or_else(|| SpecError::UnknownKey(name.clone()))?;
            self.set(key, &value)?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |key: &str, value: String, reason: &str| {
            Err(SpecError::InvalidValue {
                key: key.to_string(),
                value,
                reason: reason.to_string(),
            })
        };
        let positive = [
            ("duration", self.duration),
            ("update_interval", self.update_interval),
            ("walk_speed", self.walk_speed),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(key, v.to_string(), "must be a positive number");
            }
        }
        for m in Modulation::ALL {
            let e = self.epsilon[m];
            if !(e.is_finite() && e >= 0.0) {
                return bad(&format!("epsilon.{}", m.key()), e.to_string(), "must be >= 0");
            }
            let d = self.rates[m];
            if !(d.is_finite() && d > 0.0) {
                return bad(&format!("rate.{}", m.key()), d.to_string(), "must be > 0");
            }
        }
        let at_least_one = [
            ("buffer_size", self.buffer_size as u64),
            ("t_mdpc", self.t_mdpc as u64),
            ("t_rs", self.t_rs as u64),
            ("generations_per_interval", self.generations_per_interval),
        ];
        for (key, v) in at_least_one {
            if v < 1 {
                return bad(key, v.to_string(), "must be at least 1");
            }
        }
        if self.m_max < 2 {
            return bad("m_max", self.m_max.to_string(), "must be at least 2");
        }
        for (key, s) in [("s_min", self.s_min), ("s_max", self.s_max)] {
            if !(MIN_SYMBOL_BITS..=MAX_SYMBOL_BITS).contains(&s) {
                return bad(
                    key,
                    s.to_string(),
                    &format!("must lie in {MIN_SYMBOL_BITS}..={MAX_SYMBOL_BITS}"),
                );
            }
        }
        if self.s_min > self.s_max {
            return bad("s_min", self.s_min.to_string(), "exceeds s_max");
        }
        Ok(())
    }
}

//! Adaptive configuration module.
//!
//! The [`Controller`] consumes periodic BER feedback from the receiver. It
//! keeps the last few reports in a bounded buffer, treats any report that
//! differs from a buffered one by at least the active modulation's epsilon as
//! a sign the receiver is moving (and restarts the buffer), and generates a
//! new configuration exactly when the buffer goes from not-full to full.

mod buffer;
mod config;
mod optimizer;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use buffer::BerBuffer;
pub use config::{LinkConfig, Scheme};
pub use optimizer::{
    compare_candidates, fallback_config, mdpc_candidate, mdpc_candidates, mdpc_constraint_holds,
    mdpc_dimension, rs_candidate, rs_candidate_for_symbol, rs_candidates, rs_constraint_holds,
    select_config, Candidate, CodingFamily, Optimization, Optimizer, OptimizerParams,
};

use crate::channel::{BerTable, Modulation, PerModulation};

/// One BER report from the receiver, measured before decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerMessage {
    pub ber_m: f64,
    pub timestamp: f64,
}

/// Per-modulation movement thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPolicy(pub PerModulation<f64>);

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy(PerModulation([7.646e-8, 6.649e-9, 9.375e-7, 2.992e-7]))
    }
}

impl EpsilonPolicy {
    pub fn threshold(&self, modulation: Modulation) -> f64 {
        self.0[modulation]
    }
}

/// Work units spent on configuration generation.
///
/// Comparisons against buffered values, the distance estimate, the
/// per-modulation error-probability lookups and three units per candidate are
/// charged while an update is processed; when that update generates a
/// configuration the charge is committed as one generation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComplexityCounter {
    pending: u64,
    last_generation: u64,
    total: u64,
    generations: u64,
}

impl ComplexityCounter {
    pub fn charge(&mut self, units: u64) {
        self.pending += units;
    }

    pub fn pending(&self) -> u64 {
        self.pending
    }

    fn commit(&mut self) {
        self.last_generation = self.pending;
        self.total += self.pending;
        self.generations += 1;
        self.pending = 0;
    }

    fn discard(&mut self) {
        self.pending = 0;
    }

    /// Units spent on the most recent configuration generation.
    pub fn units(&self) -> u64 {
        self.last_generation
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn generations(&self) -> u64 {
        self.generations
    }
}

/// `N + M (1 + 3 C)` for buffer size `N`, `M` modulations and `C` coding schemes.
pub fn complexity_units(buffer_size: u64, modulations: u64, coding_schemes: u64) -> u64 {
    buffer_size + modulations * (1 + 3 * coding_schemes)
}

/// Grid distance whose table BER for `modulation` is closest to `ber_m`.
/// Equidistant matches (up to rounding) resolve to the larger distance.
pub fn estimate_distance(ber_m: f64, modulation: Modulation, table: &BerTable) -> f64 {
    table.distances()[estimate_distance_index(ber_m, modulation, table)]
}

fn estimate_distance_index(ber_m: f64, modulation: Modulation, table: &BerTable) -> usize {
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for i in 0..table.len() {
        let gap = (table.ber_at(i, modulation) - ber_m).abs();
        let slack = 4.0 * f64::EPSILON * ber_m.abs().max(table.ber_at(i, modulation));
        if gap <= best_gap + slack {
            best = i;
            best_gap = gap.min(best_gap);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// The report differed from a buffered value by at least epsilon; the
    /// buffer now holds only this report.
    Cleared,
    /// Stored; the buffer is not yet full.
    Buffered,
    /// Stored and the buffer became full: a new configuration.
    Config(LinkConfig),
    /// The buffer was already full and stable; the oldest value was evicted.
    BufferedStable,
}

/// Everything behind the most recent configuration generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub ber_m: f64,
    pub estimated_distance: f64,
    pub p_e: PerModulation<f64>,
    pub optimization: Optimization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams {
    pub buffer_size: usize,
    pub epsilon: EpsilonPolicy,
    pub optimizer: OptimizerParams,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams {
            buffer_size: 4,
            epsilon: EpsilonPolicy::default(),
            optimizer: OptimizerParams::default(),
        }
    }
}

/// The control-plane state machine. Processes one report at a time.
#[derive(Debug, Clone)]
pub struct Controller {
    table: Arc<BerTable>,
    epsilon: EpsilonPolicy,
    optimizer: Optimizer,
    buffer: BerBuffer,
    current: LinkConfig,
    counter: ComplexityCounter,
    last_decision: Option<Decision>,
}

impl Controller {
    /// Starts with the buffer holding a single zero and the initial
    /// RS(224, 240) / 16QAM configuration.
    pub fn new(table: Arc<BerTable>, params: ControlParams) -> Self {
        let initial = LinkConfig::initial(params.optimizer.rates[Modulation::Qam16]);
        Controller::with_config(table, params, initial)
    }

    pub fn with_config(table: Arc<BerTable>, params: ControlParams, current: LinkConfig) -> Self {
        Controller {
            table,
            epsilon: params.epsilon,
            optimizer: Optimizer::new(params.optimizer),
            buffer: BerBuffer::with_initial_zero(params.buffer_size),
            current,
            counter: ComplexityCounter::default(),
            last_decision: None,
        }
    }

    pub fn buffer(&self) -> &BerBuffer {
        &self.buffer
    }

    pub fn current_config(&self) -> &LinkConfig {
        &self.current
    }

    pub fn counter(&self) -> &ComplexityCounter {
        &self.counter
    }

    pub fn last_decision(&self) -> Option<&Decision> {
        self.last_decision.as_ref()
    }

    pub fn table(&self) -> &BerTable {
        &self.table
    }

    pub fn optimizer(&self) -> &Optimizer {
        &self.optimizer
    }

    pub fn on_ber_update(&mut self, msg: BerMessage) -> Action {
        let epsilon = self.epsilon.threshold(self.current.modulation);
        let mut comparisons = 0u64;
        let moving = self.buffer.iter().any(|ber_f| {
            comparisons += 1;
            (msg.ber_m - ber_f).abs() >= epsilon
        });
        self.counter.charge(comparisons);

        if moving {
            self.counter.discard();
            self.buffer.clear();
            self.buffer.push(msg.ber_m);
            return Action::Cleared;
        }
        if self.buffer.is_full() {
            self.counter.discard();
            self.buffer.evict_oldest();
            self.buffer.push(msg.ber_m);
            return Action::BufferedStable;
        }
        self.buffer.push(msg.ber_m);
        if !self.buffer.is_full() {
            self.counter.discard();
            return Action::Buffered;
        }
        let decision = self.generate(msg.ber_m);
        self.counter.commit();
        self.current = decision.optimization.selected;
        let config = self.current;
        self.last_decision = Some(decision);
        Action::Config(config)
    }

    /// Distance estimate, per-modulation lookups and optimization for the
    /// report `ber_m` taken under the current modulation.
    pub fn generate(&mut self, ber_m: f64) -> Decision {
        let idx = estimate_distance_index(ber_m, self.current.modulation, &self.table);
        self.counter.charge(1);
        let p_e = PerModulation::from_fn(|m| {
            self.counter.charge(1);
            self.table.ber_at(idx, m)
        });
        let optimization = self.optimizer.optimize(&p_e, &mut self.counter);
        Decision {
            ber_m,
            estimated_distance: self.table.distances()[idx],
            p_e,
            optimization,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::TableModel;

    fn controller(table: BerTable) -> Controller {
        Controller::new(Arc::new(table), ControlParams::default())
    }

    fn msg(ber_m: f64) -> BerMessage {
        BerMessage { ber_m, timestamp: 0.0 }
    }

    #[test]
    fn complexity_formula() {
        assert_eq!(complexity_units(4, 4, 2), 32);
        assert_eq!(complexity_units(1, 1, 1), 5);
        assert_eq!(complexity_units(4, 4, 1), 20);
    }

    #[test]
    fn initial_state() {
        let c = controller(TableModel::default().generate().unwrap());
        assert_eq!(c.buffer().values(), vec![0.0]);
        assert_eq!(*c.current_config(), LinkConfig::initial(28.16));
    }

    #[test]
    fn moving_report_clears_buffer() {
        let mut c = controller(TableModel::default().generate().unwrap());
        assert_eq!(c.on_ber_update(msg(0.0579)), Action::Cleared);
        assert_eq!(c.buffer().values(), vec![0.0579]);
    }

    #[test]
    fn fill_generates_once_then_stays_stable() {
        let mut c = controller(TableModel::default().generate().unwrap());
        let v = 1e-12;
        assert_eq!(c.on_ber_update(msg(v)), Action::Buffered);
        assert_eq!(c.on_ber_update(msg(v)), Action::Buffered);
        let action = c.on_ber_update(msg(v));
        assert!(matches!(action, Action::Config(_)));
        assert_eq!(c.counter().units(), 32);
        assert_eq!(c.counter().generations(), 1);
        for _ in 0..10 {
            assert_eq!(c.on_ber_update(msg(v)), Action::BufferedStable);
            assert_eq!(c.buffer().len(), 4);
        }
        assert_eq!(c.counter().generations(), 1);
    }

    #[test]
    fn anchor_ber_maps_to_twenty_meters() {
        let t = TableModel::default().generate().unwrap();
        assert_eq!(estimate_distance(0.0579, Modulation::Bpsk, &t), 20.0);
    }

    #[test]
    fn exact_hit_and_midpoint_tie() {
        let t = TableModel::default().generate().unwrap();
        let at5 = t.lookup_pe(5.0, Modulation::Qpsk).unwrap();
        assert_eq!(estimate_distance(at5, Modulation::Qpsk, &t), 5.0);

        let a = t.lookup_pe(5.0, Modulation::Qam16).unwrap();
        let b = t.lookup_pe(5.5, Modulation::Qam16).unwrap();
        assert!(b > a);
        assert_eq!(estimate_distance(0.5 * (a + b), Modulation::Qam16, &t), 5.5);
        assert_eq!(estimate_distance(a + 0.3 * (b - a), Modulation::Qam16, &t), 5.0);
    }
}

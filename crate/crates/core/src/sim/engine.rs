use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{mpsc, Arc};
use std::thread::JoinHandle;

use serde::{Deserialize, Serialize};

use crate::channel::BerTable;
use crate::control::{Action, BerMessage, ComplexityCounter, ControlParams, Controller, Decision, LinkConfig, Scheme};
use crate::error::SimError;

use super::datapath::{ActiveCodec, BatchStats};
use super::exec::Execution;
use super::seed;
use super::trace::{MobilityTrace, SegmentKind};

/// Source of the BER reported to the controller each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FeedbackMode {
    /// The table error probability at the receiver's current position under
    /// the active modulation.
    #[default]
    Exact,
    /// Pre-decoding bit error rate counted over the interval's generations.
    Measured,
}

impl FromStr for FeedbackMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exact" => Ok(FeedbackMode::Exact),
            "measured" => Ok(FeedbackMode::Measured),
            other => Err(format!("expected `exact` or `measured`, found {other:?}")),
        }
    }
}

impl fmt::Display for FeedbackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeedbackMode::Exact => "exact",
            FeedbackMode::Measured => "measured",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub update_interval: f64,
    pub generations_per_interval: u64,
    pub feedback: FeedbackMode,
    pub execution: Execution,
    pub mdpc_max_iterations: usize,
    pub control_thread: bool,
    pub control: ControlParams,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            update_interval: 0.5,
            generations_per_interval: 100,
            feedback: FeedbackMode::default(),
            execution: Execution::default(),
            mdpc_max_iterations: crate::mdpc::DEFAULT_MAX_ITERATIONS,
            control_thread: false,
            control: ControlParams::default(),
        }
    }
}

/// One row per dwell. Counters cover the dwell's intervals under its final
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub time_s: f64,
    pub distance_m: f64,
    pub scheme: String,
    pub modulation: crate::channel::Modulation,
    pub k_bits: usize,
    pub r_bits: usize,
    pub r_f: f64,
    pub theta: f64,
    pub th_theoretical_gbps: f64,
    pub th_gbps: f64,
    pub p_re_empirical: f64,
    pub generations_sent: u64,
    pub generations_error_free: u64,
    pub generations_corrected: u64,
    pub generations_failed: u64,
}

impl MetricsRecord {
    fn new(time_s: f64, distance_m: f64, config: &LinkConfig, stats: &BatchStats) -> Self {
        let p_re = stats.residual_ber();
        MetricsRecord {
            time_s,
            distance_m,
            scheme: config.scheme.to_string(),
            modulation: config.modulation,
            k_bits: config.k_bits(),
            r_bits: config.r_bits(),
            r_f: config.code_rate(),
            theta: config.overhead(),
            th_theoretical_gbps: config.throughput_gbps(0.0),
            th_gbps: config.throughput_gbps(p_re),
            p_re_empirical: p_re,
            generations_sent: stats.generations,
            generations_error_free: stats.clean,
            generations_corrected: stats.corrected,
            generations_failed: stats.failed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Segment,
    Feedback,
    Config,
    SetDecodingScheme,
    SetDemodulationScheme,
    Actuate,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Segment => "segment",
            EventKind::Feedback => "feedback",
            EventKind::Config => "config",
            EventKind::SetDecodingScheme => "set_decoding_scheme",
            EventKind::SetDemodulationScheme => "set_demodulation_scheme",
            EventKind::Actuate => "actuate",
        })
    }
}

/// One event log line. `detail` never contains commas.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub detail: String,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.time, self.kind, self.detail)
    }
}

fn action_name(action: &Action) -> &'static str {
    match action {
        Action::Cleared => "cleared",
        Action::Buffered => "buffered",
        Action::Config(_) => "config",
        Action::BufferedStable => "stable",
    }
}

type Reply = (Action, Option<Decision>);

/// The controller, inline or on its own thread behind an ordered queue.
enum ControlHandle {
    Inline(Box<Controller>),
    Threaded {
        tx: Option<mpsc::Sender<BerMessage>>,
        rx: mpsc::Receiver<Reply>,
        join: Option<JoinHandle<Controller>>,
    },
}

impl ControlHandle {
    fn new(controller: Controller, threaded: bool) -> Self {
        if !threaded {
            return ControlHandle::Inline(Box::new(controller));
        }
        let (tx, msg_rx) = mpsc::channel::<BerMessage>();
        let (reply_tx, rx) = mpsc::channel::<Reply>();
        let join = std::thread::spawn(move || {
            let mut c = controller;
            for msg in msg_rx {
                let action = c.on_ber_update(msg);
                let decision = matches!(action, Action::Config(_))
                    .then(|| c.last_decision().cloned())
                    .flatten();
                if reply_tx.send((action, decision)).is_err() {
                    break;
                }
            }
            c
        });
        ControlHandle::Threaded {
            tx: Some(tx),
            rx,
            join: Some(join),
        }
    }

    fn update(&mut self, msg: BerMessage) -> Reply {
        match self {
            ControlHandle::Inline(c) => {
                let action = c.on_ber_update(msg);
                let decision = matches!(action, Action::Config(_))
                    .then(|| c.last_decision().cloned())
                    .flatten();
                (action, decision)
            }
            ControlHandle::Threaded { tx, rx, .. } => {
                tx.as_ref()
                    .expect("controller thread running")
                    .send(msg)
                    .expect("controller thread alive");
                rx.recv().expect("controller thread alive")
            }
        }
    }

    fn into_controller(self) -> Controller {
        match self {
            ControlHandle::Inline(c) => *c,
            ControlHandle::Threaded { mut tx, mut join, .. } => {
                drop(tx.take());
                join.take()
                    .expect("joined once")
                    .join()
                    .expect("controller thread panicked")
            }
        }
    }
}

struct Dwell {
    start: f64,
    position: f64,
    config: LinkConfig,
    stats: BatchStats,
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<MetricsRecord>,
    pub events: Vec<Event>,
    pub complexity: ComplexityCounter,
    /// Totals over every simulated generation, walks included.
    pub totals: BatchStats,
    pub final_config: LinkConfig,
}

/// Discrete-time link simulation driven by a mobility trace.
pub struct Simulation {
    table: Arc<BerTable>,
    trace: MobilityTrace,
    params: SimParams,
    data_stream: u64,
    control: ControlHandle,
    active: LinkConfig,
    codecs: HashMap<Scheme, ActiveCodec>,
    pending: Option<LinkConfig>,
    interval: u64,
    segment: Option<usize>,
    dwell: Option<Dwell>,
    records: Vec<MetricsRecord>,
    events: Vec<Event>,
    totals: BatchStats,
}

impl Simulation {
    pub fn new(
        table: Arc<BerTable>,
        trace: MobilityTrace,
        params: SimParams,
        run_seed: u64,
    ) -> Result<Self, SimError> {
        let controller = Controller::new(table.clone(), params.control.clone());
        let active = *controller.current_config();
        let mut sim = Simulation {
            table,
            trace,
            data_stream: seed::derive(run_seed, seed::DATA_DOMAIN),
            control: ControlHandle::new(controller, params.control_thread),
            params,
            active,
            codecs: HashMap::new(),
            pending: None,
            interval: 0,
            segment: None,
            dwell: None,
            records: Vec::new(),
            events: Vec::new(),
            totals: BatchStats::default(),
        };
        sim.codec(&active.scheme)?;
        Ok(sim)
    }

    fn codec(&mut self, scheme: &Scheme) -> Result<&ActiveCodec, SimError> {
        if !self.codecs.contains_key(scheme) {
            let codec = ActiveCodec::for_scheme(scheme, self.params.mdpc_max_iterations)?;
            self.codecs.insert(*scheme, codec);
        }
        Ok(&self.codecs[scheme])
    }

    pub fn now(&self) -> f64 {
        self.interval as f64 * self.params.update_interval
    }

    pub fn is_finished(&self) -> bool {
        self.now() >= self.trace.duration()
    }

    pub fn active_config(&self) -> &LinkConfig {
        &self.active
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn records(&self) -> &[MetricsRecord] {
        &self.records
    }

    fn log(&mut self, time: f64, kind: EventKind, detail: String) {
        self.events.push(Event { time, kind, detail });
    }

    fn close_dwell(&mut self) {
        if let Some(d) = self.dwell.take() {
            self.records
                .push(MetricsRecord::new(d.start, d.position, &d.config, &d.stats));
        }
    }

    /// Advances one feedback interval. Returns the record of a dwell that
    /// ended at this step, if any.
    pub fn step(&mut self) -> Result<Option<MetricsRecord>, SimError> {
        if self.is_finished() {
            return Ok(None);
        }
        let now = self.now();
        let before = self.records.len();

        if let Some(cfg) = self.pending.take() {
            self.codec(&cfg.scheme)?;
            self.active = cfg;
            self.log(now, EventKind::Actuate, cfg.to_string());
            if let Some(d) = &mut self.dwell {
                if d.config != cfg {
                    d.config = cfg;
                    d.stats = BatchStats::default();
                }
            }
        }

        let seg_idx = self.trace.segment_index(now);
        if self.segment != Some(seg_idx) {
            self.close_dwell();
            self.segment = Some(seg_idx);
            let seg = self.trace.segments()[seg_idx];
            let detail = match seg.kind {
                SegmentKind::Dwell { position } => {
                    self.dwell = Some(Dwell {
                        start: now,
                        position,
                        config: self.active,
                        stats: BatchStats::default(),
                    });
                    format!("dwell;position={position};duration={}", seg.duration)
                }
                SegmentKind::Walk { from, to } => format!("walk;from={from};to={to}"),
            };
            self.log(now, EventKind::Segment, detail);
        }

        let position = self.trace.position_at(now);
        let grid = self.table.nearest_index(position)?;
        let p_e = self.table.ber_at(grid, self.active.modulation);
        let stats = self.codecs[&self.active.scheme].simulate_batch(
            p_e,
            seed::derive(self.data_stream, self.interval),
            self.params.generations_per_interval,
            self.params.execution,
        );
        self.totals += stats;
        if let Some(d) = &mut self.dwell {
            d.stats += stats;
        }

        let ber_m = match self.params.feedback {
            FeedbackMode::Exact => p_e,
            FeedbackMode::Measured => stats.channel_ber(),
        };
        let (action, decision) = self.control.update(BerMessage { ber_m, timestamp: now });
        self.log(
            now,
            EventKind::Feedback,
            format!(
                "ber_m={ber_m:e};measured={:e};failed={};action={}",
                stats.channel_ber(),
                stats.failed,
                action_name(&action)
            ),
        );
        if let Action::Config(cfg) = action {
            if let Some(d) = decision {
                self.log(
                    now,
                    EventKind::Config,
                    format!(
                        "estimated_distance={};fallback={}",
                        d.estimated_distance, d.optimization.fallback
                    ),
                );
            }
            self.log(now, EventKind::SetDecodingScheme, cfg.scheme.to_string());
            self.log(now, EventKind::SetDemodulationScheme, cfg.modulation.to_string());
            self.pending = Some(cfg);
        }

        self.interval += 1;
        if self.is_finished() {
            self.close_dwell();
        }
        Ok(self.records.get(before).cloned())
    }

    pub fn run_to_end(mut self) -> Result<RunOutput, SimError> {
        while !self.is_finished() {
            self.step()?;
        }
        self.close_dwell();
        let controller = self.control.into_controller();
        Ok(RunOutput {
            records: self.records,
            events: self.events,
            complexity: *controller.counter(),
            totals: self.totals,
            final_config: self.active,
        })
    }
}

//! Link simulation: mobility, data plane, feedback and output files.
//!
//! Each feedback interval the data plane sends a batch of generations at the
//! current position's error probability, reports a BER to the controller, and
//! actuates any emitted configuration from the next interval on. Dwell
//! segments become [`MetricsRecord`] rows; every interval adds event lines.

mod datapath;
mod engine;
mod exec;
pub mod seed;
mod trace;

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub use datapath::{ActiveCodec, BatchStats, GenerationOutcome, Outcome};
pub use engine::{Event, EventKind, FeedbackMode, MetricsRecord, RunOutput, SimParams, Simulation};
pub use exec::Execution;
pub use trace::{MobilityTrace, Segment, SegmentKind, DWELL_CHOICES_S};

use crate::channel::BerTable;
use crate::error::{SimError, SpecError};
use crate::spec::RunSpec;

impl SimParams {
    pub fn from_spec(spec: &RunSpec) -> Self {
        SimParams {
            update_interval: spec.update_interval,
            generations_per_interval: spec.generations_per_interval,
            feedback: spec.feedback,
            execution: spec.execution,
            mdpc_max_iterations: spec.mdpc_max_iterations,
            control_thread: spec.control_thread,
            control: spec.control_params(),
        }
    }
}

/// Random trace over the table's grid for `spec`.
pub fn generate_trace(spec: &RunSpec, table: &BerTable) -> MobilityTrace {
    MobilityTrace::generate(table.distances(), spec.duration, spec.walk_speed, spec.seed)
}

/// Loads the table named by `spec.table_path` and runs the scenario.
pub fn run(spec: &RunSpec) -> Result<RunOutput, SimError> {
    let path = spec
        .table_path
        .as_ref()
        .ok_or(SpecError::MissingKey("table_path"))?;
    let table = BerTable::load(path)?;
    run_with_table(spec, Arc::new(table))
}

pub fn run_with_table(spec: &RunSpec, table: Arc<BerTable>) -> Result<RunOutput, SimError> {
    spec.validate()?;
    let trace = generate_trace(spec, &table);
    Simulation::new(table, trace, SimParams::from_spec(spec), spec.seed)?.run_to_end()
}

pub fn write_metrics_csv<W: Write>(records: &[MetricsRecord], writer: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(writer);
    if records.is_empty() {
        w.write_record(METRICS_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub const METRICS_HEADER: [&str; 15] = [
    "time_s",
    "distance_m",
    "scheme",
    "modulation",
    "k_bits",
    "r_bits",
    "r_f",
    "theta",
    "th_theoretical_gbps",
    "th_gbps",
    "p_re_empirical",
    "generations_sent",
    "generations_error_free",
    "generations_corrected",
    "generations_failed",
];

pub fn read_metrics_csv<R: std::io::Read>(reader: R) -> Result<Vec<MetricsRecord>, SimError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_event_log<W: Write>(events: &[Event], mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "time,event,detail")?;
    for e in events {
        writeln!(writer, "{e}")?;
    }
    writer.flush()
}

impl RunOutput {
    /// Writes the metrics CSV and event log, creating parent directories.
    pub fn save(&self, metrics_path: &Path, events_path: &Path) -> Result<(), SimError> {
        let create = |path: &Path| -> Result<std::io::BufWriter<std::fs::File>, SimError> {
            let io_err = |source| SimError::Output {
                path: path.to_path_buf(),
                source,
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(io_err)?;
            }
            Ok(std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?))
        };
        write_metrics_csv(&self.records, create(metrics_path)?)?;
        write_event_log(&self.events, create(events_path)?).map_err(|source| SimError::Output {
            path: events_path.to_path_buf(),
            source,
        })
    }

    pub fn metrics_csv(&self) -> Result<Vec<u8>, SimError> {
        let mut buf = Vec::new();
        write_metrics_csv(&self.records, &mut buf)?;
        Ok(buf)
    }
}

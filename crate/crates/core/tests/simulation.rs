use std::sync::Arc;

use thzlink::channel::{BerTable, Modulation, TableModel};
use thzlink::control::ControlParams;
use thzlink::sim::{
    self, EventKind, Execution, FeedbackMode, MobilityTrace, Segment, SegmentKind, SimParams,
    Simulation, DWELL_CHOICES_S,
};
use thzlink::spec::RunSpec;
use thzlink::SimError;

fn default_table() -> Arc<BerTable> {
    Arc::new(TableModel::default().generate().unwrap())
}

fn zero_table() -> Arc<BerTable> {
    Arc::new(BerTable::zeros(BerTable::default_grid()).unwrap())
}

fn params() -> SimParams {
    SimParams {
        generations_per_interval: 20,
        ..SimParams::default()
    }
}

fn actions(out: &sim::RunOutput) -> Vec<(f64, String)> {
    out.events
        .iter()
        .filter(|e| e.kind == EventKind::Feedback)
        .map(|e| {
            let a = e.detail.rsplit("action=").next().unwrap().to_string();
            (e.time, a)
        })
        .collect()
}

#[test]
fn noiseless_channel_is_error_free() {
    let trace = MobilityTrace::generate(&BerTable::default_grid(), 1200.0, 1.0, 3);
    let out = Simulation::new(zero_table(), trace, params(), 3)
        .unwrap()
        .run_to_end()
        .unwrap();
    assert_eq!(out.totals.failed, 0);
    assert_eq!(out.totals.bit_errors, 0);
    assert!(!out.records.is_empty());
    for r in &out.records {
        assert_eq!(r.p_re_empirical, 0.0);
        assert_eq!(r.generations_error_free, r.generations_sent);
    }
    for e in out.events.iter().filter(|e| e.kind == EventKind::Feedback) {
        assert!(e.detail.starts_with("ber_m=0e0;"), "{}", e.detail);
    }
}

#[test]
fn zero_table_selects_16qam_at_maximal_rate() {
    let trace = MobilityTrace::generate(&BerTable::default_grid(), 2000.0, 1.0, 8);
    let out = Simulation::new(zero_table(), trace, params(), 8)
        .unwrap()
        .run_to_end()
        .unwrap();
    // Largest RS code for s = 12: L = 4095, K = 12 * 4093.
    let best = 12.0 * 4093.0 / (12.0 * 4095.0);
    for r in out.records.iter().skip(1) {
        assert_eq!(r.modulation, Modulation::Qam16);
        assert!((r.r_f - best).abs() < 1e-12);
        assert!((r.th_theoretical_gbps - 28.16 * r.r_f).abs() < 1e-9);
    }
}

#[test]
fn stationary_receiver_changes_config_once() {
    let table = default_table();
    for position in [3.0, 10.0, 16.5] {
        let trace = MobilityTrace::stationary(position, 120.0);
        let out = Simulation::new(table.clone(), trace, params(), 1)
            .unwrap()
            .run_to_end()
            .unwrap();
        let applied: Vec<&str> = out
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Actuate)
            .map(|e| e.detail.as_str())
            .collect();
        let initial = "RS(224;8) 16QAM".to_string();
        let mut changes = 0;
        let mut current = initial.as_str();
        for a in &applied {
            if *a != current {
                changes += 1;
                current = a;
            }
        }
        assert_eq!(changes, 1, "at {position} m: {applied:?}");
        assert_eq!(out.records.len(), 1);
    }
}

#[test]
fn config_takes_effect_one_interval_later() {
    let trace = MobilityTrace::stationary(12.0, 60.0);
    let out = Simulation::new(default_table(), trace, params(), 4)
        .unwrap()
        .run_to_end()
        .unwrap();
    let emitted: Vec<f64> = out
        .events
        .iter()
        .filter(|e| e.kind == EventKind::SetDecodingScheme)
        .map(|e| e.time)
        .collect();
    let applied: Vec<f64> = out
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Actuate)
        .map(|e| e.time)
        .collect();
    assert!(!emitted.is_empty());
    for (i, t) in emitted.iter().enumerate() {
        if t + 0.5 < 60.0 {
            assert_eq!(applied[i], t + 0.5);
        }
    }
}

#[test]
fn walking_across_grid_points_clears_buffer() {
    let table = default_table();
    let trace = MobilityTrace::from_segments(vec![
        Segment { start: 0.0, duration: 10.0, kind: SegmentKind::Dwell { position: 5.0 } },
        Segment { start: 10.0, duration: 5.0, kind: SegmentKind::Walk { from: 5.0, to: 10.0 } },
        Segment { start: 15.0, duration: 5.0, kind: SegmentKind::Dwell { position: 10.0 } },
    ]);
    let out = Simulation::new(table.clone(), trace, params(), 2)
        .unwrap()
        .run_to_end()
        .unwrap();
    let eps = ControlParams::default().epsilon;
    let mut prev_mod = None;
    let mut prev_pe: Option<f64> = None;
    let mut checked = 0;
    for (time, action) in actions(&out) {
        let pos = if time < 10.0 { 5.0 } else if time < 15.0 { 5.0 + (time - 10.0) } else { 10.0 };
        let applied = out
            .events
            .iter()
            .rfind(|e| e.kind == EventKind::Actuate && e.time <= time)
            .map(|e| e.detail.clone())
            .unwrap_or_else(|| "RS(224;8) 16QAM".to_string());
        let modulation: Modulation = applied.rsplit(' ').next().unwrap().parse().unwrap();
        let pe = table.lookup_pe(pos, modulation).unwrap();
        if (10.0..15.0).contains(&time) && time > 10.0 && prev_mod == Some(modulation) {
            let jump = (pe - prev_pe.unwrap()).abs();
            assert!(jump >= eps.threshold(modulation), "precondition at {time}");
            assert_eq!(action, "cleared", "at {time} s");
            checked += 1;
        }
        prev_mod = Some(modulation);
        prev_pe = Some(pe);
    }
    assert!(checked >= 8, "{checked}");
}

/// Mean and standard deviation of the dwell count, by renewal theory.
fn dwell_count_oracle(grid: usize, step: f64, speed: f64, duration: f64) -> (f64, f64) {
    let dw_mean = DWELL_CHOICES_S.iter().sum::<f64>() / 5.0;
    let dw_var = DWELL_CHOICES_S.iter().map(|d| (d - dw_mean).powi(2)).sum::<f64>() / 5.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut n = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            if i != j {
                let w = (i as f64 - j as f64).abs() * step / speed;
                s1 += w;
                s2 += w * w;
                n += 1.0;
            }
        }
    }
    let walk_mean = s1 / n;
    let walk_var = s2 / n - walk_mean * walk_mean;
    let mu = dw_mean + walk_mean;
    let var = dw_var + walk_var;
    let count = duration / mu;
    (count, (count * var / (mu * mu)).sqrt())
}

#[test]
fn trace_segment_count_matches_renewal_expectation() {
    let grid = BerTable::default_grid();
    let (mean, sd) = dwell_count_oracle(grid.len(), 0.5, 1.0, 60600.0);
    let mut total = 0.0;
    let seeds = 20;
    for seed in 0..seeds {
        let tr = MobilityTrace::generate(&grid, 60600.0, 1.0, seed);
        let n = tr.dwell_count() as f64;
        assert!((n - mean).abs() <= 5.0 * sd, "seed {seed}: {n} dwells, expected {mean:.1} +- {sd:.1}");
        let walks = tr.segments().len() - tr.dwell_count();
        assert!(walks + 1 >= tr.dwell_count() && walks <= tr.dwell_count());
        total += n;
    }
    let avg = total / seeds as f64;
    assert!((avg - mean).abs() <= 4.0 * sd / (seeds as f64).sqrt(), "average {avg}, expected {mean}");
}

#[test]
fn short_duration_gives_single_segment() {
    let tr = MobilityTrace::generate(&BerTable::default_grid(), 100.0, 1.0, 1);
    assert_eq!(tr.segments().len(), 1);
    assert_eq!(tr.segments()[0].duration, 100.0);
}

#[test]
fn records_conserve_generations() {
    let spec = RunSpec { duration: 3000.0, seed: 11, generations_per_interval: 30, ..RunSpec::default() };
    let out = sim::run_with_table(&spec, default_table()).unwrap();
    for r in &out.records {
        assert_eq!(
            r.generations_sent,
            r.generations_error_free + r.generations_corrected + r.generations_failed
        );
        assert!((r.theta - (1.0 - r.r_f)).abs() < 1e-12);
    }
    let t = out.totals;
    assert_eq!(t.generations, 6000 * 30);
    assert_eq!(t.generations, t.clean + t.corrected + t.failed);
}

#[test]
fn execution_and_control_thread_do_not_change_results() {
    let base = RunSpec { duration: 1500.0, seed: 21, generations_per_interval: 25, ..RunSpec::default() };
    let table = default_table();
    let reference = sim::run_with_table(&base, table.clone()).unwrap();
    for (execution, control_thread) in
        [(Execution::Sequential, false), (Execution::Sequential, true), (Execution::Parallel, true)]
    {
        let spec = RunSpec { execution, control_thread, ..base.clone() };
        let out = sim::run_with_table(&spec, table.clone()).unwrap();
        assert_eq!(out.metrics_csv().unwrap(), reference.metrics_csv().unwrap());
        assert_eq!(out.events, reference.events);
        assert_eq!(out.complexity, reference.complexity);
    }
}

#[test]
fn measured_feedback_runs_and_reports_counted_ber() {
    let spec = RunSpec {
        duration: 600.0,
        seed: 5,
        feedback: FeedbackMode::Measured,
        ..RunSpec::default()
    };
    let out = sim::run_with_table(&spec, default_table()).unwrap();
    for e in out.events.iter().filter(|e| e.kind == EventKind::Feedback) {
        let mut parts = e.detail.split(';');
        let ber_m = parts.next().unwrap().trim_start_matches("ber_m=");
        let measured = parts.next().unwrap().trim_start_matches("measured=");
        assert_eq!(ber_m, measured);
    }
    for r in &out.records {
        assert!((0.25..=1.0).contains(&r.r_f));
    }
}

#[test]
fn outputs_roundtrip_and_event_log_format() {
    let spec = RunSpec { duration: 900.0, seed: 2, ..RunSpec::default() };
    let out = sim::run_with_table(&spec, default_table()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("a/metrics.csv");
    let e = dir.path().join("b/events.log");
    out.save(&m, &e).unwrap();
    let back = sim::read_metrics_csv(std::fs::File::open(&m).unwrap()).unwrap();
    assert_eq!(back, out.records);
    let header = std::fs::read_to_string(&m).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, sim::METRICS_HEADER.join(","));
    let log = std::fs::read_to_string(&e).unwrap();
    let mut lines = log.lines();
    assert_eq!(lines.next(), Some("time,event,detail"));
    for line in lines {
        assert_eq!(line.split(',').count(), 3, "{line}");
    }
}

#[test]
fn missing_table_path_is_named() {
    let err = sim::run(&RunSpec::default()).unwrap_err();
    assert!(matches!(err, SimError::Spec(_)));
    assert!(err.to_string().contains("table_path"));
    let spec = RunSpec { table_path: Some("/nonexistent.csv".into()), ..RunSpec::default() };
    assert!(sim::run(&spec).unwrap_err().to_string().contains("/nonexistent.csv"));
}

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use thzlink::channel::{BerTable, Modulation, TableModel};
use thzlink::control::{ComplexityCounter, Optimizer};
use thzlink::sim;
use thzlink::spec::RunSpec;

/// Adaptive FEC and modulation for short-range terahertz links.
#[derive(Parser)]
#[command(name = "thzlink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic BER table as CSV.
    GenTable(GenTableArgs),
    /// Run the mobility scenario and write metrics and events.
    Run(RunArgs),
    /// Show the eight candidates and the selection at one distance.
    Optimize(OptimizeArgs),
}

#[derive(Args)]
struct GenTableArgs {
    /// Output CSV path.
    #[arg(long, default_value = "ber_table.csv")]
    out: PathBuf,
    /// Target BPSK BER at the anchor distance.
    #[arg(long)]
    anchor_ber: Option<f64>,
    /// Anchor distance in meters.
    #[arg(long)]
    anchor_distance: Option<f64>,
    /// Absorption slope in dB/m.
    #[arg(long)]
    absorption: Option<f64>,
    /// SNR penalty of 8PSK relative to 16QAM in dB.
    #[arg(long)]
    psk8_penalty: Option<f64>,
}

#[derive(Args)]
struct SpecArgs {
    /// Run spec file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// BER table CSV.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Extra `key=value` assignments, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Simulated seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Output directory for metrics.csv and events.log.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Receiver distance in meters.
    #[arg(long)]
    distance: f64,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenTable(a) => gen_table(a),
        Command::Run(a) => run(a),
        Command::Optimize(a) => optimize(a),
    }
}

fn gen_table(a: GenTableArgs) -> Result<()> {
    let mut model = TableModel::default();
    if let Some(v) = a.anchor_ber {
        model.anchor_ber = v;
    }
    if let Some(v) = a.anchor_distance {
        model.anchor_distance_m = v;
    }
    if let Some(v) = a.absorption {
        model.absorption_db_per_m = v;
    }
    if let Some(v) = a.psk8_penalty {
        model.psk8_penalty_db = v;
    }
    let table = model.generate().context("generating BER table")?;
    table
        .save(&a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    println!(
        "wrote {} rows to {}",
        table.len() * Modulation::ALL.len(),
        a.out.display()
    );
    Ok(())
}

/// Defaults, then the config file, then `THZLINK_*` variables, then flags.
fn build_spec(a: &SpecArgs) -> Result<RunSpec> {
    let mut spec = match &a.config {
        Some(p) => RunSpec::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunSpec::default(),
    };
    spec.apply_env(std::env::vars())
        .context("applying environment overrides")?;
    if let Some(t) = &a.table {
        spec.table_path = Some(t.clone());
    }
    for kv in &a.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got {kv:?}");
        };
        spec.set(k.trim(), v)?;
    }
    Ok(spec)
}

fn run(a: RunArgs) -> Result<()> {
    let mut spec = build_spec(&a.spec)?;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(d) = a.duration {
        spec.duration = d;
    }
    if let Some(dir) = &a.out {
        spec.metrics_path = dir.join("metrics.csv");
        spec.events_path = dir.join("events.log");
    }
    spec.validate()?;
    let out = sim::run(&spec)?;
    out.save(&spec.metrics_path, &spec.events_path)?;
    println!(
        "{} dwell records, {} generations, {} failed; final config {}",
        out.records.len(),
        out.totals.generations,
        out.totals.failed,
        out.final_config
    );
    println!(
        "metrics: {}\nevents: {}",
        spec.metrics_path.display(),
        spec.events_path.display()
    );
    Ok(())
}

fn load_table(path: Option<&Path>) -> Result<BerTable> {
    Ok(match path {
        Some(p) => BerTable::load(p)?,
        None => TableModel::default().generate()?,
    })
}

fn optimize(a: OptimizeArgs) -> Result<()> {
    let spec = build_spec(&a.spec)?;
    spec.validate()?;
    let table = Arc::new(load_table(spec.table_path.as_deref())?);
    let idx = table.nearest_index(a.distance)?;
    let p_e = *table.row(idx);
    let params = spec.control_params().optimizer;
    let rates = params.rates;
    let result = Optimizer::new(params).optimize(&p_e, &mut ComplexityCounter::default());

    println!("distance {} m (grid {} m)", a.distance, table.distances()[idx]);
    println!(
        "{:<5} {:<6} {:>11} {:<8} {:<12} {:>9} {:>7} {:>8} {:>9}",
        "code", "mod", "p_e", "feasible", "scheme", "K", "R", "R_F", "TH_Gbps"
    );
    for c in &result.candidates {
        let family = format!("{:?}", c.family).to_uppercase();
        match c.scheme {
            Some(s) => println!(
                "{:<5} {:<6} {:>11.4e} {:<8} {:<12} {:>9} {:>7} {:>8.5} {:>9.4}",
                family,
                c.modulation.name(),
                c.p_e,
                "yes",
                s.to_string(),
                s.k_bits(),
                s.r_bits(),
                s.code_rate(),
                s.code_rate() * rates[c.modulation]
            ),
            None => println!(
                "{:<5} {:<6} {:>11.4e} {:<8} {:<12} {:>9} {:>7} {:>8} {:>9}",
                family, c.modulation.name(), c.p_e, "no", "-", "-", "-", "-", "-"
            ),
        }
    }
    let sel = result.selected;
    println!(
        "selected: {} (K={}, R={}, R_F={:.5}, TH={:.4} Gbps){}",
        sel,
        sel.k_bits(),
        sel.r_bits(),
        sel.code_rate(),
        sel.throughput_gbps(0.0),
        if result.fallback { " [fallback]" } else { "" }
    );
    Ok(())
}

//! Command implementations behind the `parkpir` binary. Each command
//! returns its stdout text so tests can check it without a subprocess.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use parkpir_core::harness::{run_scenario, sample_request_bytes, Backend, HarnessError, ScenarioConfig};
use parkpir_core::ledger::OFFER_LEN;
use parkpir_core::overhead::{fig4, fig5, opcount_table, storage_bytes, SizeTable, BLOCK_OVERHEAD};

#[derive(Debug, Parser)]
#[command(name = "parkpir", version, about = "Private parking-offer retrieval: scenarios and overhead tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a full scenario and write trace.jsonl, report.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Download versus offers per cell at a fixed node count.
    Fig4 {
        #[arg(long, default_value_t = 44)]
        nodes: usize,
        #[arg(long, value_delimiter = ',', default_values_t = (1..=10).map(|k| k * 40).collect::<Vec<u64>>())]
        offers: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        cells: usize,
    },
    /// Download versus node count at a fixed number of offers.
    Fig5 {
        #[arg(long, default_value_t = 75)]
        offers: u64,
        #[arg(long, value_delimiter = ',', default_values_t = (1..=10).map(|k| 4 * k + 6).collect::<Vec<usize>>())]
        nodes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        cells: usize,
    },
    /// Analytic and measured reservation request size.
    ResvSize {
        /// TOML size table with g1, scalar, hash and ciphertext_overhead.
        #[arg(long)]
        sizes: Option<PathBuf>,
        /// Skip building real requests on both backends.
        #[arg(long)]
        analytic_only: bool,
    },
    /// Instrumented operation counts of a reservation request.
    Opcount,
    /// Ledger size after `days` days.
    Storage {
        #[arg(long)]
        offers_per_cell: u64,
        #[arg(long)]
        cells: u64,
        #[arg(long)]
        blocks_per_day: u64,
        #[arg(long)]
        days: u64,
        #[arg(long, default_value_t = OFFER_LEN as u64)]
        offer_bytes: u64,
        #[arg(long, default_value_t = BLOCK_OVERHEAD)]
        block_overhead: u64,
    },
}

/// How a failed command should exit.
#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit code 2.
    Usage(anyhow::Error),
    /// A protocol check failed during a run; exit code 1.
    Violation(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Violation(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Violation(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

/// Output of a command: stdout text and warnings for stderr.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

impl From<String> for Output {
    fn from(stdout: String) -> Self {
        Output { stdout, warnings: Vec::new() }
    }
}

pub fn execute(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Run { config, seed, out } => cmd_run(config, *seed, out),
        Command::Fig4 { nodes, offers, cells } => Ok(cmd_fig4(*nodes, offers, *cells)?),
        Command::Fig5 { offers, nodes, cells } => Ok(cmd_fig5(*offers, nodes, *cells)?.into()),
        Command::ResvSize { sizes, analytic_only } => {
            let table = match sizes {
                Some(path) => load_sizes(path)?,
                None => SizeTable::default(),
            };
            Ok(cmd_resv_size(&table, !analytic_only)?.into())
        }
        Command::Opcount => Ok(cmd_opcount().into()),
        Command::Storage { offers_per_cell, cells, blocks_per_day, days, offer_bytes, block_overhead } => {
            Ok(cmd_storage(*offers_per_cell, *cells, *offer_bytes, *block_overhead, *blocks_per_day, *days)?.into())
        }
    }
}

pub fn load_sizes(path: &Path) -> Result<SizeTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SizeTable::from_toml(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Runs the scenario and writes its artifacts into `out`.
pub fn cmd_run(config_path: &Path, seed: Option<u64>, out: &Path) -> Result<Output, Failure> {
    let mut config = ScenarioConfig::load(config_path).map_err(|e| Failure::Usage(e.into()))?;
    if let Some(seed) = seed {
        config.rng_seed = seed;
    }
    let (output, height) = run_scenario(&config).map_err(|e| match e {
        HarnessError::Config { .. } | HarnessError::Usage(_) => Failure::Usage(e.into()),
        other => Failure::Violation(other.into()),
    })?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("trace.jsonl"), output.trace.to_jsonl()).context("writing trace.jsonl")?;
    let mut csv = String::from("phase,measured_bytes,analytic_bytes\n");
    for [phase, measured, analytic] in output.report.rows() {
        writeln!(csv, "{phase},{measured},{analytic}").expect("writing to a String");
    }
    fs::write(out.join("report.csv"), csv).context("writing report.csv")?;
    let summary = output.summary(config.rng_seed, height);
    let json = serde_json::to_string_pretty(&summary).context("serializing the summary")?;
    fs::write(out.join("summary.json"), json + "\n").context("writing summary.json")?;

    Ok(format!("trace_digest={}\nevents={}\nledger_height={height}\n", summary.trace_digest, summary.events).into())
}

pub fn cmd_fig4(nodes: usize, offers: &[u64], cells: usize) -> Result<Output> {
    let (points, rounded) = fig4(nodes, offers, cells)?;
    let mut stdout = String::from("offers,pir_bytes,trivial_bytes\n");
    for p in &points {
        writeln!(stdout, "{},{},{}", p.x, p.pir_bytes, p.trivial_bytes).expect("writing to a String");
    }
    let warnings = rounded
        .iter()
        .map(|o| format!("warning: {o} offers is not a whole number of stripes; rounded up"))
        .collect();
    Ok(Output { stdout, warnings })
}

pub fn cmd_fig5(offers: u64, nodes: &[usize], cells: usize) -> Result<String> {
    let points = fig5(offers, nodes, cells)?;
    let mut out = String::from("n,pir_bytes,trivial_bytes\n");
    for p in &points {
        writeln!(out, "{},{},{}", p.x, p.pir_bytes, p.trivial_bytes).expect("writing to a String");
    }
    Ok(out)
}

pub fn cmd_resv_size(table: &SizeTable, measure: bool) -> Result<String> {
    let mut out = String::from("source,bytes\n");
    writeln!(out, "analytic,{}", table.reservation_bytes()).expect("writing to a String");
    if measure {
        for (name, backend) in [("measured_bls12-381", Backend::Bls12_381), ("measured_toy", Backend::Toy)] {
            writeln!(out, "{name},{}", sample_request_bytes(backend)?).expect("writing to a String");
        }
    }
    Ok(out)
}

pub fn cmd_opcount() -> String {
    let mut out = String::from("phase,exp,mul,add,hash,pairing,group_op,ec_mul,published\n");
    for row in opcount_table() {
        let m = row.measured;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.phase,
            m.exp,
            m.mul,
            m.add,
            m.hash,
            m.pairing,
            m.group_op,
            m.ec_mul,
            row.published.unwrap_or("")
        )
        .expect("writing to a String");
    }
    out
}

pub fn cmd_storage(offers_per_cell: u64, cells: u64, offer_bytes: u64, block_overhead: u64, blocks_per_day: u64, days: u64) -> Result<String> {
    for (name, v) in [("offers-per-cell", offers_per_cell), ("cells", cells), ("offer-bytes", offer_bytes), ("blocks-per-day", blocks_per_day)] {
        anyhow::ensure!(v > 0, "--{name} must be positive");
    }
    let bytes = storage_bytes(offers_per_cell, cells, offer_bytes, block_overhead, blocks_per_day, days);
    Ok(format!("bytes\n{bytes}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_to_commands() {
        let cli = Cli::try_parse_from(["parkpir", "fig5", "--nodes", "10,34"]).unwrap();
        match cli.command {
            Command::Fig5 { offers, nodes, cells } => assert_eq!((offers, nodes, cells), (75, vec![10, 34], 100)),
            other => panic!("parsed {other:?}"),
        }
        let cli = Cli::try_parse_from(["parkpir", "fig4"]).unwrap();
        assert!(matches!(cli.command, Command::Fig4 { nodes: 44, ref offers, cells: 100 } if offers.len() == 10 && offers[9] == 400));
        assert!(Cli::try_parse_from(["parkpir", "storage", "--cells", "3"]).is_err());
    }

    #[test]
    fn fig5_csv_rows() {
        assert_eq!(cmd_fig5(75, &[10, 11], 100).unwrap(), "n,pir_bytes,trivial_bytes\n10,4500,300000\n11,4285.714,300000\n");
    }

    #[test]
    fn infeasible_fig_parameters_are_errors() {
        assert!(cmd_fig5(75, &[4], 100).is_err());
        assert!(cmd_fig4(3, &[40], 100).is_err());
    }

    #[test]
    fn failure_exit_codes() {
        assert_eq!(Failure::Usage(anyhow::anyhow!("x")).exit_code(), 2);
        assert_eq!(Failure::Violation(anyhow::anyhow!("x")).exit_code(), 1);
    }
}

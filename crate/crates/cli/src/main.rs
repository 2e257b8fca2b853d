//! `relaylp` command line: code generation, BER sweeps, complexity tables
//! and single-frame decoding.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when the command
//! itself fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use relaylp::harness::{
    complexity_report, complexity_table, decode_one, emit_csv, emit_plotdata, report_lines, run_sweep, to_csv,
    CodeSpec, ComplexityOptions, ExperimentConfig,
};
use relaylp::ldpc::{gallager_construct, load_alist, save_alist};
use relaylp::receivers::{ReceiverConfig, ReceiverKind};

#[derive(Parser, Debug)]
#[command(name = "relaylp", version, about = "LP/MILP joint detection and decoding for decode-and-forward relays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a regular Gallager code and write it as alist.
    GenCode {
        n: usize,
        col_weight: usize,
        row_weight: usize,
        seed: u64,
        out: PathBuf,
    },
    /// Run a BER sweep described by a `key = value` config file.
    BerSweep {
        config: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write gnuplot-style blocks here.
        #[arg(long)]
        plotdata: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Override any config key, e.g. `--set frames_per_point=50`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Problem sizes per code. Each code is a length (regular code with the
    /// given weights) or an alist path.
    Complexity {
        #[arg(required = true)]
        codes: Vec<String>,
        #[arg(long, default_value_t = 3)]
        col_weight: usize,
        #[arg(long, default_value_t = 6)]
        row_weight: usize,
        #[arg(long, default_value_t = 1)]
        code_seed: u64,
        /// Frames for a short measured sweep; 0 skips it.
        #[arg(long, default_value_t = 0)]
        frames: usize,
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
        #[arg(long, value_delimiter = ',', default_value = "adaptive-lp,uncoded-lp")]
        receivers: Vec<ReceiverKind>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one frame and print the receiver report as `key = value` lines.
    DecodeOne {
        alist: PathBuf,
        #[arg(allow_negative_numbers = true)]
        snr_db: f64,
        receiver: ReceiverKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        lambda_t: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda_tau: f64,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenCode { n, col_weight, row_weight, seed, out } => {
            let h = gallager_construct(n, col_weight, row_weight, seed)?;
            std::fs::write(&out, save_alist(&h)).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} x {} code, {} four-cycles, written to {}", h.n_rows(), h.n_cols(), h.four_cycles(), out.display());
        }
        Command::BerSweep { config, out, plotdata, seed, jobs, overrides } => {
            let mut cfg: ExperimentConfig = read(&config)?.parse().with_context(|| config.display().to_string())?;
            for o in &overrides {
                let Some((k, v)) = o.split_once('=') else { bail!("`--set {o}`: expected KEY=VALUE") };
                cfg.set(k.trim(), v).map_err(anyhow::Error::msg)?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            for w in cfg.warnings() {
                eprintln!("warning: {w}");
            }
            let result = run_sweep(&cfg)?;
            match &out {
                Some(path) => emit_csv(&result, path)?,
                None => print!("{}", to_csv(&result)),
            }
            if let Some(path) = &plotdata {
                emit_plotdata(&result, path)?;
            }
        }
        Command::Complexity { codes, col_weight, row_weight, code_seed, frames, snr, receivers, seed, out } => {
            let specs: Vec<CodeSpec> = codes
                .iter()
                .map(|c| match c.parse::<usize>() {
                    Ok(length) => CodeSpec::Regular { length, col_weight, row_weight },
                    Err(_) => CodeSpec::Alist(PathBuf::from(c)),
                })
                .collect();
            let opts = ComplexityOptions { code_seed, frames, snr_db: snr, receivers, seed };
            let rows = complexity_report(&specs, &opts)?;
            write_or_print(out.as_deref(), &complexity_table(&rows))?;
        }
        Command::DecodeOne { alist, snr_db, receiver, seed, lambda_t, lambda_tau } => {
            let h = load_alist(&read(&alist)?)?;
            let rcfg = ReceiverConfig { lambda_t, lambda_tau, ..ReceiverConfig::default() };
            let (frame, report) = decode_one(&h, snr_db, receiver, seed, &rcfg)?;
            let errors = report.decoded_bits.iter().zip(&frame.tx_bits).filter(|(a, b)| a != b).count();
            print!("receiver = {receiver}\nsnr_db = {snr_db}\n{}bit_errors = {errors}\n", report_lines(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

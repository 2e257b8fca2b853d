//! Monte-Carlo experiment driver: BER sweeps, complexity tables, a
//! brute-force reference decoder and CSV output.
//!
//! Frames are paired twice over. Every receiver sees the same frames, and
//! frame `i` uses ChaCha8 stream `i` at every SNR point. So bits, channel
//! and noise shape are identical across the grid and only the noise scale
//! changes.

mod config;
mod oracle;
mod output;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{make_frame, noise_var_for_snr_db, substream, ChannelError, FrameParams, RelayFrame};
use crate::ldpc::{gallager_construct, load_alist, systematize, Encoder, LdpcError, ParityCheckMatrix};
use crate::receivers::{ReceiverConfig, ReceiverError, ReceiverKind, ReceiverReport};

pub use config::{CodeSpec, ExperimentConfig, CONFIG_KEYS};
pub use oracle::brute_force_oracle;
pub use output::{complexity_table, emit_csv, emit_plotdata, report_lines, to_csv, to_plotdata, CSV_HEADER};
pub use report::{complexity_report, ComplexityOptions, ComplexityRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("receiver `{receiver}` needs an LDPC code but the code spec is `{code}`")]
    Incompatible { receiver: ReceiverKind, code: String },
    #[error("code with {0} bits cannot fill whole 4-QAM symbols")]
    OddCodeLength(usize),
    #[error("brute-force oracle needs message length <= 16, got {0}")]
    OracleTooLarge(usize),
    #[error("{receiver} failed on frame {frame} at {snr_db} dB: {source}")]
    Receiver {
        receiver: ReceiverKind,
        snr_db: f64,
        frame: usize,
        #[source]
        source: ReceiverError,
    },
    #[error(transparent)]
    Receivers(#[from] ReceiverError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// A code ready for simulation.
#[derive(Debug, Clone)]
pub struct CodeSetup {
    pub h: ParityCheckMatrix,
    pub encoder: Encoder,
}

/// Builds the parity-check matrix and encoder a spec names; `None` for
/// uncoded frames.
pub fn build_code(spec: &CodeSpec, code_seed: u64) -> Result<Option<CodeSetup>, HarnessError> {
    let h = match spec {
        CodeSpec::Uncoded { .. } => return Ok(None),
        CodeSpec::Regular { length, col_weight, row_weight } => {
            gallager_construct(*length, *col_weight, *row_weight, code_seed)?
        }
        CodeSpec::Alist(path) => load_alist(&read_file(path)?)?,
    };
    if h.n_cols() % 2 != 0 {
        return Err(HarnessError::OddCodeLength(h.n_cols()));
    }
    let encoder = systematize(&h);
    Ok(Some(CodeSetup { h, encoder }))
}

/// Accumulated counts for one receiver at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub receiver: ReceiverKind,
    pub snr_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub errors: u64,
    pub cuts: u64,
    pub rounds: u64,
    pub iterations: u64,
    pub nodes: u64,
    /// Frames where the adaptive loop hit its round limit.
    pub truncated: u64,
    /// Decoding wall time; zero unless timing was requested.
    pub seconds: f64,
}

impl PointResult {
    fn new(receiver: ReceiverKind, snr_db: f64) -> Self {
        Self {
            receiver,
            snr_db,
            frames: 0,
            bits: 0,
            errors: 0,
            cuts: 0,
            rounds: 0,
            iterations: 0,
            nodes: 0,
            truncated: 0,
            seconds: 0.0,
        }
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    fn per_frame(&self, total: u64) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            total as f64 / self.frames as f64
        }
    }

    pub fn mean_cuts(&self) -> f64 {
        self.per_frame(self.cuts)
    }

    pub fn mean_rounds(&self) -> f64 {
        self.per_frame(self.rounds)
    }

    pub fn mean_iterations(&self) -> f64 {
        self.per_frame(self.iterations)
    }

    pub fn mean_nodes(&self) -> f64 {
        self.per_frame(self.nodes)
    }
}

/// All points of a sweep, receiver-major in config order, SNR ascending
/// within a receiver as listed in the grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn point(&self, receiver: ReceiverKind, snr_db: f64) -> Option<&PointResult> {
        self.points.iter().find(|p| p.receiver == receiver && p.snr_db == snr_db)
    }

    pub fn for_receiver(&self, receiver: ReceiverKind) -> impl Iterator<Item = &PointResult> {
        self.points.iter().filter(move |p| p.receiver == receiver)
    }
}

/// Frames decoded between early-stopping checks. Fixed so the stopping
/// point does not depend on the thread count.
pub const STOP_CHECK_BATCH: usize = 16;

struct FrameOutcome {
    errors: u64,
    bits: u64,
    cuts: u64,
    rounds: u64,
    iterations: u64,
    nodes: u64,
    truncated: bool,
    seconds: f64,
}

fn run_frame(
    cfg: &ExperimentConfig,
    code: Option<&CodeSetup>,
    params: &FrameParams,
    rcfg: &ReceiverConfig,
    snr_db: f64,
    index: usize,
) -> Result<Vec<FrameOutcome>, HarnessError> {
    let mut rng = substream(cfg.seed, index as u64);
    let frame = make_frame(code.map(|c| &c.encoder), &mut rng, params)?;
    let h = code.map(|c| &c.h);
    cfg.receivers
        .iter()
        .map(|&receiver| {
            let start = cfg.timing.then(Instant::now);
            let report = receiver
                .run(&frame, h, rcfg)
                .map_err(|source| HarnessError::Receiver { receiver, snr_db, frame: index, source })?;
            let seconds = start.map_or(0.0, |s| s.elapsed().as_secs_f64());
            let errors = report.decoded_bits.iter().zip(&frame.tx_bits).filter(|(a, b)| a != b).count();
            Ok(FrameOutcome {
                errors: errors as u64,
                bits: frame.tx_bits.len() as u64,
                cuts: report.cuts_added as u64,
                rounds: report.cut_rounds as u64,
                iterations: report.simplex_iterations as u64,
                nodes: report.branch_nodes as u64,
                truncated: report.truncated,
                seconds,
            })
        })
        .collect()
}

fn sweep_points(cfg: &ExperimentConfig, code: Option<&CodeSetup>) -> Result<SweepResult, HarnessError> {
    let rcfg = ReceiverConfig {
        lambda_t: cfg.lambda_t,
        lambda_tau: cfg.lambda_tau,
        max_rounds: cfg.max_rounds,
        cut_source: cfg.cut_source,
        ..ReceiverConfig::default()
    };
    let symbols = match cfg.code_spec {
        CodeSpec::Uncoded { symbols } => symbols,
        _ => 0,
    };
    let mut grid: Vec<Vec<PointResult>> = cfg
        .receivers
        .iter()
        .map(|&r| cfg.snr_grid_db.iter().map(|&s| PointResult::new(r, s)).collect())
        .collect();

    for (si, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let params = FrameParams {
            symbols,
            sigma1_sq: cfg.sigma1_sq,
            sigma2_sq: cfg.sigma2_sq,
            noise_var: noise_var_for_snr_db(snr_db, cfg.sigma1_sq),
        };
        let mut next = 0;
        while next < cfg.frames_per_point {
            let end = (next + STOP_CHECK_BATCH).min(cfg.frames_per_point);
            let outcomes: Vec<Vec<FrameOutcome>> = (next..end)
                .into_par_iter()
                .map(|i| run_frame(cfg, code, &params, &rcfg, snr_db, i))
                .collect::<Result<_, _>>()?;
            for per_receiver in outcomes {
                for (ri, o) in per_receiver.into_iter().enumerate() {
                    let p = &mut grid[ri][si];
                    p.frames += 1;
                    p.bits += o.bits;
                    p.errors += o.errors;
                    p.cuts += o.cuts;
                    p.rounds += o.rounds;
                    p.iterations += o.iterations;
                    p.nodes += o.nodes;
                    p.truncated += u64::from(o.truncated);
                    p.seconds += o.seconds;
                }
            }
            next = end;
            let target = cfg.target_errors as u64;
            if target > 0 && grid.iter().all(|row| row[si].errors >= target) {
                break;
            }
        }
    }
    Ok(SweepResult { points: grid.into_iter().flatten().collect() })
}

/// Runs every receiver over the SNR grid on shared frames.
///
/// A point stops after `frames_per_point` frames, or earlier at the first
/// batch boundary where every receiver has `target_errors` bit errors. The
/// result depends only on the config, not on `jobs`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let code = build_code(&cfg.code_spec, cfg.code_seed)?;
    if cfg.jobs == 0 {
        return sweep_points(cfg, code.as_ref());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    pool.install(|| sweep_points(cfg, code.as_ref()))
}

/// One frame through one receiver, for debugging.
///
/// The frame is stream 0 of `seed`, carrying a random codeword of `h` at
/// `snr_db` with the default link variances.
pub fn decode_one(
    h: &ParityCheckMatrix,
    snr_db: f64,
    receiver: ReceiverKind,
    seed: u64,
    rcfg: &ReceiverConfig,
) -> Result<(RelayFrame, ReceiverReport), HarnessError> {
    if h.n_cols() % 2 != 0 {
        return Err(HarnessError::OddCodeLength(h.n_cols()));
    }
    let encoder = systematize(h);
    let defaults = ExperimentConfig::default();
    let params = FrameParams {
        sigma1_sq: defaults.sigma1_sq,
        sigma2_sq: defaults.sigma2_sq,
        noise_var: noise_var_for_snr_db(snr_db, defaults.sigma1_sq),
        ..FrameParams::default()
    };
    let frame = make_frame(Some(&encoder), &mut substream(seed, 0), &params)?;
    let report = receiver.run(&frame, Some(h), rcfg)?;
    Ok((frame, report))
}

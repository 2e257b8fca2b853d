//! Receivers for the relay frame: symbol-wise ML baselines, detection-only
//! LP/MILP, joint detection and decoding LP/MILP, and the adaptive
//! cutting-plane variant that adds parity inequalities only when violated.

mod baseline;
mod formulation;
mod start;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{demodulate_hard, RelayFrame};
use crate::ldpc::{direct_llr, find_violated_cuts, LdpcError, ParityCheckMatrix, CUT_TOLERANCE};
use crate::lp::{solve_lp, solve_milp, solve_milp_from, LpError, LpProblem, SolveStatus, SolverOptions, INTEGRALITY_TOL};

pub use baseline::{detect_df_chanest, detect_ml_all_links, detect_ml_direct};
pub use formulation::{build_uncoded, build_unified, VariableLayout};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReceiverError {
    #[error("direct-link gain is zero")]
    ZeroGain,
    #[error("frame has no symbols")]
    EmptyFrame,
    #[error("branch lengths differ: r1 has {r1}, r2 has {r2}")]
    BranchLength { r1: usize, r2: usize },
    #[error("code length {code} does not match the {frame_bits} bits of the frame")]
    CodeLength { code: usize, frame_bits: usize },
    #[error("expected {expected} LLRs, got {got}")]
    LlrLength { expected: usize, got: usize },
    #[error("solver returned {0} without a usable point")]
    NoSolution(SolveStatus),
    #[error("receiver `{0}` needs a parity-check matrix")]
    NeedsCode(ReceiverKind),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
}

/// LP relaxation or exact branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeMode {
    Milp,
    Relaxed,
}

/// Which bit vector the adaptive receiver separates in relaxed mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutSource {
    /// The fractional `f` of the LP optimum.
    #[default]
    Fractional,
    /// Hard decisions sliced from the LP optimum.
    HardDecision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverConfig {
    pub lambda_t: f64,
    pub lambda_tau: f64,
    pub solver: SolverOptions,
    /// Cut rounds before the adaptive receiver gives up.
    pub max_rounds: usize,
    pub cut_source: CutSource,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            lambda_t: 1.0,
            lambda_tau: 1.0,
            solver: SolverOptions::default(),
            max_rounds: 100,
            cut_source: CutSource::default(),
        }
    }
}

/// Decoded bits plus what it took to get them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverReport {
    pub decoded_bits: Vec<u8>,
    /// Optimal (or incumbent) objective; zero for the symbol-wise detectors.
    pub objective_value: f64,
    /// Whether the solution's bits (or symbols, uncoded) were already integral.
    pub is_integral: bool,
    pub cuts_added: usize,
    pub cut_rounds: usize,
    pub simplex_iterations: usize,
    pub branch_nodes: usize,
    /// Recovered combiner `theta`, or the gains used by a baseline detector.
    pub combiner_estimate: [Complex64; 2],
    pub final_rows: usize,
    pub final_vars: usize,
    /// The adaptive loop hit its round limit.
    pub truncated: bool,
    pub status: SolveStatus,
}

impl ReceiverReport {
    fn baseline(bits: Vec<u8>, gains: [Complex64; 2]) -> Self {
        Self {
            decoded_bits: bits,
            objective_value: 0.0,
            is_integral: true,
            cuts_added: 0,
            cut_rounds: 0,
            simplex_iterations: 0,
            branch_nodes: 0,
            combiner_estimate: gains,
            final_rows: 0,
            final_vars: 0,
            truncated: false,
            status: SolveStatus::Optimal,
        }
    }
}

/// Deterministic work counters standing in for solver flop counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WorkSummary {
    pub simplex_iterations: usize,
    pub final_rows: usize,
    pub branch_nodes: usize,
    pub cut_rounds: usize,
    pub cuts_added: usize,
}

pub fn estimate_work(report: &ReceiverReport) -> WorkSummary {
    WorkSummary {
        simplex_iterations: report.simplex_iterations,
        final_rows: report.final_rows,
        branch_nodes: report.branch_nodes,
        cut_rounds: report.cut_rounds,
        cuts_added: report.cuts_added,
    }
}

/// Rounds at 1/2, exact 1/2 going to 0.
fn round_bits(f: &[f64]) -> Vec<u8> {
    f.iter().map(|&v| u8::from(v > 0.5)).collect()
}

fn is_integral(values: impl IntoIterator<Item = f64>, targets: &[f64]) -> bool {
    values.into_iter().all(|v| targets.iter().any(|t| (v - t).abs() <= INTEGRALITY_TOL))
}

struct Solved {
    x: Vec<f64>,
    objective: f64,
    status: SolveStatus,
    iterations: usize,
    nodes: usize,
}

fn solve(p: &LpProblem, mode: DecodeMode, opts: &SolverOptions, start: Option<&[f64]>) -> Result<Solved, ReceiverError> {
    let s = match mode {
        DecodeMode::Relaxed => {
            let s = solve_lp(p, opts)?;
            Solved { x: s.x, objective: s.objective_value, status: s.status, iterations: s.simplex_iterations, nodes: 0 }
        }
        DecodeMode::Milp => {
            let s = match start {
                Some(x) => solve_milp_from(p, opts, x)?,
                None => solve_milp(p, opts)?,
            };
            Solved {
                nodes: s.branch_nodes_explored,
                x: s.lp.x,
                objective: s.lp.objective_value,
                status: s.lp.status,
                iterations: s.lp.simplex_iterations,
            }
        }
    };
    let usable = matches!(s.status, SolveStatus::Optimal | SolveStatus::NodeLimit) && !s.x.is_empty();
    if usable {
        Ok(s)
    } else {
        Err(ReceiverError::NoSolution(s.status))
    }
}

/// Detection-only receiver. MILP bits come from the auxiliary binaries; the
/// relaxation slices its symbols.
pub fn decode_uncoded(
    frame: &RelayFrame,
    h1: Complex64,
    mode: DecodeMode,
    cfg: &ReceiverConfig,
) -> Result<ReceiverReport, ReceiverError> {
    let (p, layout) = build_uncoded(frame, h1, cfg.lambda_t, cfg.lambda_tau, mode == DecodeMode::Milp)?;
    let start = (mode == DecodeMode::Milp).then(|| start::uncoded_start(frame, h1, &layout, p.num_vars()));
    let s = solve(&p, mode, &cfg.solver, start.as_deref())?;
    let symbols = layout.symbols_from(&s.x);
    let (decoded_bits, integral) = if layout.has_bits {
        let f = layout.bits_from(&s.x);
        (round_bits(&f), is_integral(f, &[0.0, 1.0]))
    } else {
        let parts = symbols.iter().flat_map(|c| [c.re, c.im]);
        (demodulate_hard(&symbols), is_integral(parts, &[-1.0, 1.0]))
    };
    Ok(ReceiverReport {
        decoded_bits,
        objective_value: s.objective,
        is_integral: integral,
        cuts_added: 0,
        cut_rounds: 0,
        simplex_iterations: s.iterations,
        branch_nodes: s.nodes,
        combiner_estimate: layout.combiner_from(&s.x),
        final_rows: p.num_rows(),
        final_vars: p.num_vars(),
        truncated: false,
        status: s.status,
    })
}

fn coded_report(p: &LpProblem, layout: &VariableLayout, s: &Solved) -> ReceiverReport {
    let f = layout.bits_from(&s.x);
    ReceiverReport {
        decoded_bits: round_bits(&f),
        objective_value: s.objective,
        is_integral: is_integral(f, &[0.0, 1.0]),
        cuts_added: 0,
        cut_rounds: 0,
        simplex_iterations: s.iterations,
        branch_nodes: s.nodes,
        combiner_estimate: layout.combiner_from(&s.x),
        final_rows: p.num_rows(),
        final_vars: p.num_vars(),
        truncated: false,
        status: s.status,
    }
}

/// Joint detection and decoding with every parity inequality of `h` present
/// up front. Bit costs are the direct-link LLRs.
pub fn decode_unified(
    frame: &RelayFrame,
    h1: Complex64,
    h: &ParityCheckMatrix,
    mode: DecodeMode,
    cfg: &ReceiverConfig,
) -> Result<ReceiverReport, ReceiverError> {
    let gamma = direct_llr(&frame.r1, h1, frame.noise_var)?;
    let integer = mode == DecodeMode::Milp;
    let (p, layout) = build_unified(frame, h1, h, &gamma, cfg.lambda_t, cfg.lambda_tau, integer, true)?;
    let s = solve(&p, mode, &cfg.solver, None)?;
    Ok(coded_report(&p, &layout, &s))
}

/// Cutting-plane variant of [`decode_unified`].
///
/// Starts without parity inequalities, then repeatedly solves, searches each
/// check for its most violated inequality and appends the ones not yet
/// present. Stops when nothing is violated or after `cfg.max_rounds` rounds
/// of additions, in which case the last solution is returned with
/// `truncated` set.
pub fn decode_adaptive(
    frame: &RelayFrame,
    h1: Complex64,
    h: &ParityCheckMatrix,
    mode: DecodeMode,
    cfg: &ReceiverConfig,
) -> Result<ReceiverReport, ReceiverError> {
    let gamma = direct_llr(&frame.r1, h1, frame.noise_var)?;
    let integer = mode == DecodeMode::Milp;
    let (mut p, layout) = build_unified(frame, h1, h, &gamma, cfg.lambda_t, cfg.lambda_tau, integer, false)?;
    let mut present = HashSet::new();
    let mut rounds = 0;
    let mut iterations = 0;
    let mut nodes = 0;
    loop {
        let s = solve(&p, mode, &cfg.solver, None)?;
        iterations += s.iterations;
        nodes += s.nodes;
        let f = layout.bits_from(&s.x);
        let probe: Vec<f64> = match (mode, cfg.cut_source) {
            (DecodeMode::Relaxed, CutSource::Fractional) => f,
            _ => round_bits(&f).into_iter().map(f64::from).collect(),
        };
        let fresh: Vec<_> = find_violated_cuts(h, &probe, CUT_TOLERANCE)
            .into_iter()
            .filter(|c| !present.contains(c))
            .collect();
        if fresh.is_empty() || rounds == cfg.max_rounds {
            let mut report = coded_report(&p, &layout, &s);
            report.cuts_added = present.len();
            report.cut_rounds = rounds;
            report.simplex_iterations = iterations;
            report.branch_nodes = nodes;
            report.truncated = !fresh.is_empty();
            return Ok(report);
        }
        p.extend_rows(fresh.iter().map(|c| layout.cut_row(h, c)))?;
        present.extend(fresh);
        rounds += 1;
    }
}

/// Every receiver the harness can run, by its command-line id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReceiverKind {
    DirectMl,
    AllLinksMl,
    DfChanEstMl,
    UncodedLp,
    UncodedMilp,
    UnifiedLp,
    UnifiedMilp,
    AdaptiveLp,
    AdaptiveMilp,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 9] = [
        ReceiverKind::DirectMl,
        ReceiverKind::AllLinksMl,
        ReceiverKind::DfChanEstMl,
        ReceiverKind::UncodedLp,
        ReceiverKind::UncodedMilp,
        ReceiverKind::UnifiedLp,
        ReceiverKind::UnifiedMilp,
        ReceiverKind::AdaptiveLp,
        ReceiverKind::AdaptiveMilp,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReceiverKind::DirectMl => "direct-ml",
            ReceiverKind::AllLinksMl => "all-links-ml",
            ReceiverKind::DfChanEstMl => "df-chanest-ml",
            ReceiverKind::UncodedLp => "uncoded-lp",
            ReceiverKind::UncodedMilp => "uncoded-milp",
            ReceiverKind::UnifiedLp => "unified-lp",
            ReceiverKind::UnifiedMilp => "unified-milp",
            ReceiverKind::AdaptiveLp => "adaptive-lp",
            ReceiverKind::AdaptiveMilp => "adaptive-milp",
        }
    }

    pub fn needs_code(self) -> bool {
        matches!(
            self,
            ReceiverKind::UnifiedLp | ReceiverKind::UnifiedMilp | ReceiverKind::AdaptiveLp | ReceiverKind::AdaptiveMilp
        )
    }

    /// Runs the receiver on one frame. Every receiver knows `h1`; only the
    /// all-links genie also sees the true `h2`.
    pub fn run<'a>(
        self,
        frame: &RelayFrame,
        code: Option<&'a ParityCheckMatrix>,
        cfg: &ReceiverConfig,
    ) -> Result<ReceiverReport, ReceiverError> {
        let (h1, h2) = (frame.channel.h1, frame.channel.h2);
        let need = |c: Option<&'a ParityCheckMatrix>| c.ok_or(ReceiverError::NeedsCode(self));
        match self {
            ReceiverKind::DirectMl => {
                Ok(ReceiverReport::baseline(detect_ml_direct(&frame.r1, h1)?, [h1, Complex64::new(0.0, 0.0)]))
            }
            ReceiverKind::AllLinksMl => {
                Ok(ReceiverReport::baseline(detect_ml_all_links(&frame.r1, &frame.r2, h1, h2)?, [h1, h2]))
            }
            ReceiverKind::DfChanEstMl => {
                let (bits, h2_hat) = detect_df_chanest(&frame.r1, &frame.r2, h1)?;
                Ok(ReceiverReport::baseline(bits, [h1, h2_hat]))
            }
            ReceiverKind::UncodedLp => decode_uncoded(frame, h1, DecodeMode::Relaxed, cfg),
            ReceiverKind::UncodedMilp => decode_uncoded(frame, h1, DecodeMode::Milp, cfg),
            ReceiverKind::UnifiedLp => decode_unified(frame, h1, need(code)?, DecodeMode::Relaxed, cfg),
            ReceiverKind::UnifiedMilp => decode_unified(frame, h1, need(code)?, DecodeMode::Milp, cfg),
            ReceiverKind::AdaptiveLp => decode_adaptive(frame, h1, need(code)?, DecodeMode::Relaxed, cfg),
            ReceiverKind::AdaptiveMilp => decode_adaptive(frame, h1, need(code)?, DecodeMode::Milp, cfg),
        }
    }
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown receiver `{0}`")]
pub struct UnknownReceiver(pub String);

impl FromStr for ReceiverKind {
    type Err = UnknownReceiver;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReceiverKind::ALL.into_iter().find(|k| k.id() == s).ok_or_else(|| UnknownReceiver(s.to_string()))
    }
}

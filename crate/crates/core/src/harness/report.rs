use super::{build_code, run_sweep, CodeSpec, ExperimentConfig, HarnessError, PointResult};
use crate::channel::{make_frame, substream, FrameParams};
use crate::ldpc::{count_parity_inequalities, direct_llr};
use crate::receivers::{build_uncoded, build_unified, ReceiverKind};

/// Problem sizes for one code, counted on problems actually built for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub code: CodeSpec,
    pub length: usize,
    pub checks: usize,
    pub message_length: usize,
    pub parity_inequalities: u64,
    /// Base rows plus every parity inequality.
    pub unified_rows: usize,
    pub adaptive_vars: usize,
    pub adaptive_base_rows: usize,
    pub uncoded_vars: usize,
    pub uncoded_rows: usize,
    /// Short-sweep measurements, one per measured receiver.
    pub measured: Vec<PointResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityOptions {
    pub code_seed: u64,
    /// Frames for the short sweep; zero skips measurement.
    pub frames: usize,
    pub snr_db: f64,
    pub receivers: Vec<ReceiverKind>,
    pub seed: u64,
}

impl Default for ComplexityOptions {
    fn default() -> Self {
        Self {
            code_seed: 1,
            frames: 0,
            snr_db: 10.0,
            receivers: vec![ReceiverKind::AdaptiveLp, ReceiverKind::UncodedLp],
            seed: 1,
        }
    }
}

/// One row per code: parity-inequality count, exhaustive unified LP rows,
/// adaptive LP columns and base rows, and the uncoded LP of the same
/// symbol count; optionally mean work from a short sweep.
///
/// The unified problem with every parity row is only built, never solved,
/// unless a unified receiver is listed in `opts.receivers`.
pub fn complexity_report(specs: &[CodeSpec], opts: &ComplexityOptions) -> Result<Vec<ComplexityRow>, HarnessError> {
    specs.iter().map(|spec| report_one(spec, opts)).collect()
}

fn report_one(spec: &CodeSpec, opts: &ComplexityOptions) -> Result<ComplexityRow, HarnessError> {
    let Some(code) = build_code(spec, opts.code_seed)? else {
        return Err(HarnessError::InvalidConfig(format!("complexity needs a code, got `{spec}`")));
    };
    let frame = make_frame(Some(&code.encoder), &mut substream(opts.seed, 0), &FrameParams::default())?;
    let h1 = frame.channel.h1;
    let gamma = direct_llr(&frame.r1, h1, frame.noise_var)?;
    let (adaptive, _) = build_unified(&frame, h1, &code.h, &gamma, 1.0, 1.0, false, false)?;
    let (unified, _) = build_unified(&frame, h1, &code.h, &gamma, 1.0, 1.0, false, true)?;
    let (uncoded, _) = build_uncoded(&frame, h1, 1.0, 1.0, false)?;

    let measured = if opts.frames == 0 {
        Vec::new()
    } else {
        let cfg = ExperimentConfig {
            snr_grid_db: vec![opts.snr_db],
            receivers: opts.receivers.clone(),
            frames_per_point: opts.frames,
            target_errors: 0,
            code_spec: spec.clone(),
            code_seed: opts.code_seed,
            seed: opts.seed,
            ..ExperimentConfig::default()
        };
        run_sweep(&cfg)?.points
    };

    Ok(ComplexityRow {
        code: spec.clone(),
        length: code.h.n_cols(),
        checks: code.h.n_rows(),
        message_length: code.encoder.message_length(),
        parity_inequalities: count_parity_inequalities(&code.h),
        unified_rows: unified.num_rows(),
        adaptive_vars: adaptive.num_vars(),
        adaptive_base_rows: adaptive.num_rows(),
        uncoded_vars: uncoded.num_vars(),
        uncoded_rows: uncoded.num_rows(),
        measured,
    })
}

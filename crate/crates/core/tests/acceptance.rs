//! Acceptance criteria, one pass/fail line each.
//!
//! Runs as a plain binary so the lines print on success too. The coding-gain
//! criterion is far too slow for one core (single hard frames of the coded
//! MILP take over 20 minutes) and only runs with `RELAYLP_SLOW=1`; otherwise
//! it reports SKIPPED.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::Rng;
use relaylp::channel::{make_frame, noise_var_for_snr_db, substream, FrameParams};
use relaylp::harness::{complexity_report, brute_force_oracle, run_sweep, CodeSpec, ComplexityOptions, ExperimentConfig};
use relaylp::ldpc::{
    count_parity_inequalities, find_violated_cuts, gallager_construct, most_violated_cut, systematize,
    ParityCheckMatrix, CUT_TOLERANCE,
};
use relaylp::lp::{solve_lp, solve_milp, SolveStatus, SolverOptions};
use relaylp::receivers::{decode_adaptive, decode_unified, DecodeMode, ReceiverConfig, ReceiverKind};

type Outcome = Result<String, String>;

fn frame_params(snr_db: f64) -> FrameParams {
    FrameParams { noise_var: noise_var_for_snr_db(snr_db, 0.5), ..FrameParams::default() }
}

/// Table I sizes for lengths 256 to 2048.
fn problem_sizes() -> Outcome {
    let lengths = [256, 512, 1024, 1536, 2048];
    let adaptive_vars = [1028, 2052, 4100, 6148, 8196];
    // 512 is listed as 2563 in the published table; 10 * N_c / 2 gives 2560.
    let adaptive_rows = [1280, 2560, 5120, 7680, 10240];
    let uncoded_vars = [772, 1540, 3076, 4612, 6148];
    let uncoded_rows = [1024, 2048, 4096, 6144, 8192];
    let specs: Vec<CodeSpec> =
        lengths.iter().map(|&length| CodeSpec::Regular { length, col_weight: 3, row_weight: 6 }).collect();
    let rows = complexity_report(&specs, &ComplexityOptions::default()).map_err(|e| e.to_string())?;
    for (i, r) in rows.iter().enumerate() {
        let got = (r.adaptive_vars, r.adaptive_base_rows, r.uncoded_vars, r.uncoded_rows);
        let want = (adaptive_vars[i], adaptive_rows[i], uncoded_vars[i], uncoded_rows[i]);
        if got != want {
            return Err(format!("length {}: got {got:?}, want {want:?}", lengths[i]));
        }
        if r.unified_rows as u64 != r.adaptive_base_rows as u64 + r.parity_inequalities {
            return Err(format!("length {}: unified rows {} inconsistent", lengths[i], r.unified_rows));
        }
    }
    Ok("5 lengths exact (2560 base rows at 512 per closed form; published 2563)".into())
}

/// Unified MILP against codeword enumeration on the (8,4) code.
fn milp_against_enumeration() -> Outcome {
    let h = extended_hamming();
    let enc = systematize(&h);
    let cfg = ReceiverConfig::default();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let snr = [0.0, 6.0, 12.0][i as usize % 3];
        let f = make_frame(Some(&enc), &mut substream(201, i), &frame_params(snr)).map_err(|e| e.to_string())?;
        let rep = decode_unified(&f, f.channel.h1, &h, DecodeMode::Milp, &cfg).map_err(|e| e.to_string())?;
        let (bits, obj) = brute_force_oracle(&f, f.channel.h1, &h, 1.0, 1.0).map_err(|e| e.to_string())?;
        let gap = (rep.objective_value - obj).abs();
        worst = worst.max(gap);
        if rep.decoded_bits != bits || gap > 1e-6 {
            return Err(format!("frame {i} at {snr} dB: objective gap {gap:.3e}, bits equal {}", rep.decoded_bits == bits));
        }
    }
    Ok(format!("50/50 frames agree, max objective gap {worst:.1e}"))
}

/// Adaptive relaxed objective equals the exhaustive unified LP objective.
fn adaptive_equals_exhaustive() -> Outcome {
    let h = gallager_construct(32, 3, 6, 1).map_err(|e| e.to_string())?;
    let enc = systematize(&h);
    if enc.message_length() != 16 {
        return Err(format!("code has {} message bits", enc.message_length()));
    }
    let cfg = ReceiverConfig::default();
    let (mut worst, mut cuts): (f64, usize) = (0.0, 0);
    for i in 0..100u64 {
        let snr = 2.0 * (i % 5) as f64;
        let f = make_frame(Some(&enc), &mut substream(301, i), &frame_params(snr)).map_err(|e| e.to_string())?;
        let a = decode_adaptive(&f, f.channel.h1, &h, DecodeMode::Relaxed, &cfg).map_err(|e| e.to_string())?;
        let u = decode_unified(&f, f.channel.h1, &h, DecodeMode::Relaxed, &cfg).map_err(|e| e.to_string())?;
        let gap = (a.objective_value - u.objective_value).abs();
        worst = worst.max(gap);
        cuts += a.cuts_added;
        if gap > 1e-6 || a.truncated {
            return Err(format!("frame {i} at {snr} dB: gap {gap:.3e}, truncated {}", a.truncated));
        }
    }
    Ok(format!("100/100 frames, max gap {worst:.1e}, mean cuts {:.1}", cuts as f64 / 100.0))
}

/// Per-check separation against listing all odd subsets.
fn separation_exhaustive() -> Outcome {
    let mut rng = rng(401);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let d = rng.random_range(2..=8);
        let h = ParityCheckMatrix::from_rows(d, vec![(0..d).collect()]).map_err(|e| e.to_string())?;
        let f: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let best = max_odd_subset_violation(&f);
        let (cut, v) = most_violated_cut(&h, 0, &f);
        let found = find_violated_cuts(&h, &f, CUT_TOLERANCE);
        let consistent = found.len() == usize::from(best > CUT_TOLERANCE) && found.iter().all(|c| *c == cut);
        if (v - best).abs() > 1e-12 || !consistent {
            mismatches += 1;
        }
    }
    if mismatches == 0 {
        Ok("10000 vectors, 0 mismatches".into())
    } else {
        Err(format!("{mismatches} mismatches"))
    }
}

/// Crossing SNR of BER = 1e-4 on a 0.5 dB grid, by log-linear interpolation.
fn crossing_snr(receiver: ReceiverKind, spec: &CodeSpec, start_db: f64) -> Result<(f64, Vec<(f64, f64)>), String> {
    let mut curve: Vec<(f64, f64)> = Vec::new();
    let mut snr = start_db;
    while snr <= 30.0 {
        let cfg = ExperimentConfig {
            snr_grid_db: vec![snr],
            receivers: vec![receiver],
            frames_per_point: 10_000_000,
            target_errors: 200,
            code_spec: spec.clone(),
            code_seed: 5,
            seed: 501,
            ..ExperimentConfig::default()
        };
        let p = run_sweep(&cfg).map_err(|e| e.to_string())?.points.remove(0);
        let ber = p.ber();
        eprintln!("  {receiver} {snr:.1} dB: {} errors / {} bits, BER {ber:.3e}", p.errors, p.bits);
        curve.push((snr, ber));
        if ber < 1e-4 {
            if let [.., (s0, b0), (s1, b1)] = curve[..] {
                let t = (b0.log10() + 4.0) / (b0.log10() - b1.log10());
                return Ok((s0 + t * (s1 - s0), curve));
            }
            return Err(format!("{receiver}: already below 1e-4 at the first point {start_db} dB"));
        }
        snr += 0.5;
    }
    Err(format!("{receiver}: BER never reached 1e-4"))
}

/// Coded joint MILP reaches 1e-4 at least 1.5 dB before the uncoded MILP.
fn coding_gain() -> Outcome {
    let code = CodeSpec::Regular { length: 128, col_weight: 2, row_weight: 8 };
    let uncoded = CodeSpec::Uncoded { symbols: 64 };
    let (coded_db, _) = crossing_snr(ReceiverKind::AdaptiveMilp, &code, 4.0)?;
    let (uncoded_db, _) = crossing_snr(ReceiverKind::UncodedMilp, &uncoded, coded_db.floor())?;
    let gain = uncoded_db - coded_db;
    let msg = format!("coded {coded_db:.2} dB, uncoded {uncoded_db:.2} dB, gain {gain:.2} dB");
    if gain >= 1.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `p_a < p_b` by more than two binomial standard deviations of the difference.
fn clearly_below(a: (u64, u64), b: (u64, u64)) -> bool {
    let (pa, pb) = (a.0 as f64 / a.1 as f64, b.0 as f64 / b.1 as f64);
    let sd = (pa * (1.0 - pa) / a.1 as f64 + pb * (1.0 - pb) / b.1 as f64).sqrt();
    pb - pa > 2.0 * sd
}

/// Detector orderings at 12 dB on 10^5 uncoded symbols.
fn ber_orderings() -> Outcome {
    let cfg = ExperimentConfig {
        snr_grid_db: vec![12.0],
        receivers: vec![
            ReceiverKind::AllLinksMl,
            ReceiverKind::DirectMl,
            ReceiverKind::UncodedMilp,
            ReceiverKind::UncodedLp,
        ],
        frames_per_point: 5000,
        target_errors: 0,
        code_spec: CodeSpec::Uncoded { symbols: 20 },
        seed: 601,
        ..ExperimentConfig::default()
    };
    let r = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let get = |k| {
        let p = r.point(k, 12.0).expect("point present");
        (p.errors, p.bits)
    };
    let (all, direct, milp, lp) =
        (get(ReceiverKind::AllLinksMl), get(ReceiverKind::DirectMl), get(ReceiverKind::UncodedMilp), get(ReceiverKind::UncodedLp));
    let ber = |x: (u64, u64)| x.0 as f64 / x.1 as f64;
    let msg = format!(
        "BER all-links {:.3e}, direct {:.3e}, milp {:.3e}, lp {:.3e} over {} bits",
        ber(all),
        ber(direct),
        ber(milp),
        ber(lp),
        all.1
    );
    if clearly_below(all, milp) && clearly_below(all, direct) && clearly_below(milp, lp) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Adaptive cuts stay a small share of the full inequality family.
fn complexity_reduction() -> Outcome {
    let h = gallager_construct(256, 3, 6, 1).map_err(|e| e.to_string())?;
    let enc = systematize(&h);
    let family = count_parity_inequalities(&h) as usize;
    let exhaustive_rows = 10 * 128 + family;
    let cfg = ReceiverConfig::default();
    let trials = 40u64;
    let (mut cuts, mut max_rows) = (0usize, 0usize);
    for i in 0..trials {
        let f = make_frame(Some(&enc), &mut substream(701, i), &frame_params(10.0)).map_err(|e| e.to_string())?;
        let rep = decode_adaptive(&f, f.channel.h1, &h, DecodeMode::Relaxed, &cfg).map_err(|e| e.to_string())?;
        if rep.final_rows >= exhaustive_rows {
            return Err(format!("trial {i}: {} rows, exhaustive has {exhaustive_rows}", rep.final_rows));
        }
        cuts += rep.cuts_added;
        max_rows = max_rows.max(rep.final_rows);
    }
    let mean = cuts as f64 / trials as f64;
    let msg = format!(
        "mean cuts {mean:.1} of {family} ({:.2}%), max final rows {max_rows} < {exhaustive_rows}",
        100.0 * mean / family as f64
    );
    if mean <= 0.1 * family as f64 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// LP against vertex enumeration, MILP against binary enumeration.
fn solver_soundness() -> Outcome {
    let opts = SolverOptions::default();
    let mut rng = rng(801);
    for case in 0..500 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=12);
        let p = random_boxed_lp(&mut rng, n, m);
        let s = solve_lp(&p, &opts).map_err(|e| e.to_string())?;
        match vertex_enumeration_min(&p) {
            Some(v) if s.status == SolveStatus::Optimal && (s.objective_value - v).abs() <= 1e-6 => {}
            None if s.status == SolveStatus::Infeasible => {}
            oracle => return Err(format!("lp case {case}: {} {} vs {oracle:?}", s.status, s.objective_value)),
        }
    }
    for case in 0..200 {
        let k = rng.random_range(1..=12);
        let c = rng.random_range(0..=2);
        let m = rng.random_range(1..=8);
        let mut p = random_boxed_lp(&mut rng, k + c, m);
        for j in 0..k {
            p.set_bounds(j, 0.0, 1.0);
            p.set_integer(j, true);
        }
        let s = solve_milp(&p, &opts).map_err(|e| e.to_string())?;
        match milp_enumeration_min(&p) {
            Some(v) if s.status() == SolveStatus::Optimal && (s.objective_value() - v).abs() <= 1e-6 => {}
            None if s.status() == SolveStatus::Infeasible => {}
            oracle => return Err(format!("milp case {case}: {} {} vs {oracle:?}", s.status(), s.objective_value())),
        }
    }
    Ok("500 LP and 200 MILP instances agree".into())
}

fn main() {
    let slow = std::env::var("RELAYLP_SLOW").is_ok_and(|v| v == "1");
    let criteria: [(&str, Option<fn() -> Outcome>); 8] = [
        ("problem sizes", Some(problem_sizes)),
        ("MILP vs enumeration", Some(milp_against_enumeration)),
        ("adaptive vs exhaustive LP", Some(adaptive_equals_exhaustive)),
        ("separation oracle", Some(separation_exhaustive)),
        ("coding gain", slow.then_some(coding_gain as fn() -> Outcome)),
        ("BER orderings", Some(ber_orderings)),
        ("complexity reduction", Some(complexity_reduction)),
        ("solver soundness", Some(solver_soundness)),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let Some(run) = run else {
            println!("criterion {n} ({name}): SKIPPED, slow suite; run with RELAYLP_SLOW=1");
            continue;
        };
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{secs:.1} s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{secs:.1} s] {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

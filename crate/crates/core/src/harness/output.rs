use std::fmt::Write as _;
use std::path::Path;

use super::{ComplexityRow, HarnessError, SweepResult};
use crate::receivers::ReceiverReport;

pub const CSV_HEADER: &str = "receiver,snr_db,bits,errors,ber,cuts,rounds,iters,nodes,seconds";

/// One header line then one line per point. `cuts`, `rounds`, `iters` and
/// `nodes` are per-frame means.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        writeln!(
            out,
            "{},{},{},{},{:.6e},{:.3},{:.3},{:.3},{:.3},{:.3}",
            p.receiver,
            p.snr_db,
            p.bits,
            p.errors,
            p.ber(),
            p.mean_cuts(),
            p.mean_rounds(),
            p.mean_iterations(),
            p.mean_nodes(),
            p.seconds
        )
        .expect("writing to a String");
    }
    out
}

/// Gnuplot-style blocks: a `# receiver` comment, `snr ber errors bits`
/// rows, and two blank lines between receivers so `index n` picks one.
pub fn to_plotdata(result: &SweepResult) -> String {
    let mut out = String::new();
    let mut current = None;
    for p in &result.points {
        if current != Some(p.receiver) {
            if current.is_some() {
                out.push_str("\n\n");
            }
            writeln!(out, "# {}\n# snr_db ber errors bits", p.receiver).expect("writing to a String");
            current = Some(p.receiver);
        }
        writeln!(out, "{} {:.6e} {} {}", p.snr_db, p.ber(), p.errors, p.bits).expect("writing to a String");
    }
    out
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    write(path, &to_csv(result))
}

pub fn emit_plotdata(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    write(path, &to_plotdata(result))
}

/// Comma-separated size table, then any measured points under a second
/// header.
pub fn complexity_table(rows: &[ComplexityRow]) -> String {
    let mut out = String::from(
        "code,length,checks,parity_inequalities,unified_rows,adaptive_vars,adaptive_base_rows,uncoded_vars,uncoded_rows\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.code,
            r.length,
            r.checks,
            r.parity_inequalities,
            r.unified_rows,
            r.adaptive_vars,
            r.adaptive_base_rows,
            r.uncoded_vars,
            r.uncoded_rows
        )
        .expect("writing to a String");
    }
    if rows.iter().any(|r| !r.measured.is_empty()) {
        out.push_str("\ncode,receiver,snr_db,frames,mean_cuts,mean_rounds,mean_iters,mean_nodes,ber\n");
        for r in rows {
            for p in &r.measured {
                writeln!(
                    out,
                    "{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.6e}",
                    r.code,
                    p.receiver,
                    p.snr_db,
                    p.frames,
                    p.mean_cuts(),
                    p.mean_rounds(),
                    p.mean_iterations(),
                    p.mean_nodes(),
                    p.ber()
                )
                .expect("writing to a String");
            }
        }
    }
    out
}

/// Report fields as `key = value` lines; bits are printed as a 0/1 string.
pub fn report_lines(report: &ReceiverReport) -> String {
    let bits: String = report.decoded_bits.iter().map(|b| char::from(b'0' + b)).collect();
    let [t1, t2] = report.combiner_estimate;
    let fields = [
        ("decoded_bits", bits),
        ("objective_value", format!("{}", report.objective_value)),
        ("is_integral", report.is_integral.to_string()),
        ("cuts_added", report.cuts_added.to_string()),
        ("cut_rounds", report.cut_rounds.to_string()),
        ("simplex_iterations", report.simplex_iterations.to_string()),
        ("branch_nodes", report.branch_nodes.to_string()),
        ("combiner_estimate", format!("{} {} {} {}", t1.re, t1.im, t2.re, t2.im)),
        ("final_rows", report.final_rows.to_string()),
        ("final_vars", report.final_vars.to_string()),
        ("truncated", report.truncated.to_string()),
        ("status", report.status.to_string()),
    ];
    fields.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::PointResult;
    use crate::receivers::ReceiverKind;

    fn point(receiver: ReceiverKind, snr_db: f64, errors: u64) -> PointResult {
        PointResult {
            receiver,
            snr_db,
            frames: 4,
            bits: 160,
            errors,
            cuts: 10,
            rounds: 2,
            iterations: 401,
            nodes: 0,
            truncated: 0,
            seconds: 0.0,
        }
    }

    fn sample() -> SweepResult {
        SweepResult {
            points: vec![
                point(ReceiverKind::DirectMl, 0.0, 16),
                point(ReceiverKind::DirectMl, 2.5, 4),
                point(ReceiverKind::AdaptiveLp, 0.0, 1),
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&sample());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "direct-ml,0,160,16,1.000000e-1,2.500,0.500,100.250,0.000,0.000");
        assert_eq!(lines[2].split(',').nth(1), Some("2.5"));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn plotdata_blocks() {
        let text = to_plotdata(&sample());
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].starts_with("# direct-ml\n"));
        assert_eq!(blocks[0].lines().filter(|l| !l.starts_with('#')).count(), 2);
        assert!(blocks[1].starts_with("# adaptive-lp\n"));
    }
}

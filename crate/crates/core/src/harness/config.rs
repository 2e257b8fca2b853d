use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::HarnessError;
use crate::receivers::{CutSource, ReceiverKind};

/// Where the frames' bits come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    /// Random bits, `symbols` 4-QAM symbols per frame.
    Uncoded { symbols: usize },
    /// Regular Gallager code built from `code_seed`.
    Regular { length: usize, col_weight: usize, row_weight: usize },
    /// Parity-check matrix read from an alist file.
    Alist(PathBuf),
}

impl CodeSpec {
    pub fn is_coded(&self) -> bool {
        !matches!(self, CodeSpec::Uncoded { .. })
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Uncoded { symbols } => write!(f, "uncoded N={symbols}"),
            CodeSpec::Regular { length, col_weight, row_weight } => {
                write!(f, "regular {length} {col_weight} {row_weight}")
            }
            CodeSpec::Alist(p) => write!(f, "alist {}", p.display()),
        }
    }
}

impl FromStr for CodeSpec {
    type Err = String;

    /// `uncoded N=20`, `regular 256 3 6` or `alist path/to/h.alist`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        let rest = rest.trim();
        match head {
            "uncoded" => {
                let n = rest.strip_prefix("N=").ok_or("expected `uncoded N=<symbols>`")?;
                let symbols = n.trim().parse().map_err(|_| format!("bad symbol count `{n}`"))?;
                if symbols == 0 {
                    return Err("uncoded frames need at least one symbol".into());
                }
                Ok(CodeSpec::Uncoded { symbols })
            }
            "regular" => {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| format!("bad integer `{t}`")))
                    .collect::<Result<_, _>>()?;
                match nums[..] {
                    [length, col_weight, row_weight] => Ok(CodeSpec::Regular { length, col_weight, row_weight }),
                    _ => Err("expected `regular <length> <col_weight> <row_weight>`".into()),
                }
            }
            "alist" if !rest.is_empty() => Ok(CodeSpec::Alist(PathBuf::from(rest))),
            _ => Err(format!("unknown code spec `{s}`")),
        }
    }
}

/// One Monte-Carlo experiment.
///
/// Text form is one `key = value` per line with `#` comments; keys are the
/// field names and unknown keys are rejected. Lists are comma separated.
///
/// ```
/// use relaylp::harness::ExperimentConfig;
///
/// let cfg: ExperimentConfig = "
///     snr_grid_db = 0, 5, 10
///     receivers = direct-ml, all-links-ml
///     frames_per_point = 50
///     code_spec = uncoded N=20
/// ".parse().unwrap();
/// assert_eq!(cfg.snr_grid_db, vec![0.0, 5.0, 10.0]);
/// assert_eq!(cfg.target_errors, 200);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub snr_grid_db: Vec<f64>,
    pub receivers: Vec<ReceiverKind>,
    /// Frame budget per SNR point.
    pub frames_per_point: usize,
    /// A point stops early once every receiver has this many bit errors;
    /// zero disables early stopping.
    pub target_errors: usize,
    pub code_spec: CodeSpec,
    pub code_seed: u64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub lambda_t: f64,
    pub lambda_tau: f64,
    pub seed: u64,
    /// Worker threads; zero means one per core.
    pub jobs: usize,
    /// Record wall-clock seconds. Off by default so output is reproducible.
    pub timing: bool,
    pub max_rounds: usize,
    pub cut_source: CutSource,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            snr_grid_db: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            receivers: vec![ReceiverKind::DirectMl, ReceiverKind::AllLinksMl],
            frames_per_point: 1000,
            target_errors: 200,
            code_spec: CodeSpec::Uncoded { symbols: 20 },
            code_seed: 1,
            sigma1_sq: 0.5,
            sigma2_sq: 1.0,
            lambda_t: 1.0,
            lambda_tau: 1.0,
            seed: 1,
            jobs: 0,
            timing: false,
            max_rounds: 100,
            cut_source: CutSource::Fractional,
        }
    }
}

pub const CONFIG_KEYS: [&str; 15] = [
    "snr_grid_db",
    "receivers",
    "frames_per_point",
    "target_errors",
    "code_spec",
    "code_seed",
    "sigma1_sq",
    "sigma2_sq",
    "lambda_t",
    "lambda_tau",
    "seed",
    "jobs",
    "timing",
    "max_rounds",
    "cut_source",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("`{key}`: cannot parse `{v}`"))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
    v.split(',').map(|t| num(key, t.trim())).collect()
}

impl ExperimentConfig {
    /// Sets one key from its text value, as a config line or a command-line
    /// override would.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "snr_grid_db" => self.snr_grid_db = list(key, v)?,
            "receivers" => {
                self.receivers = v
                    .split(',')
                    .map(|t| t.trim().parse::<ReceiverKind>().map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?
            }
            "frames_per_point" => self.frames_per_point = num(key, v)?,
            "target_errors" => self.target_errors = num(key, v)?,
            "code_spec" => self.code_spec = v.parse()?,
            "code_seed" => self.code_seed = num(key, v)?,
            "sigma1_sq" => self.sigma1_sq = num(key, v)?,
            "sigma2_sq" => self.sigma2_sq = num(key, v)?,
            "lambda_t" => self.lambda_t = num(key, v)?,
            "lambda_tau" => self.lambda_tau = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "jobs" => self.jobs = num(key, v)?,
            "timing" => self.timing = num(key, v)?,
            "max_rounds" => self.max_rounds = num(key, v)?,
            "cut_source" => {
                self.cut_source = match v {
                    "fractional" => CutSource::Fractional,
                    "hard-decision" => CutSource::HardDecision,
                    _ => return Err(format!("`cut_source` must be `fractional` or `hard-decision`, got `{v}`")),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Checks the invariants a sweep relies on.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_string()));
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_grid_db must be a nonempty list of finite values");
        }
        if self.receivers.is_empty() {
            return bad("receivers must not be empty");
        }
        if self.frames_per_point == 0 {
            return bad("frames_per_point must be at least 1");
        }
        let positive = [self.sigma1_sq, self.sigma2_sq, self.lambda_t, self.lambda_tau];
        if positive.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("variances and weights must be finite and nonnegative");
        }
        if let Some(r) = self.receivers.iter().find(|r| r.needs_code()) {
            if !self.code_spec.is_coded() {
                return Err(HarnessError::Incompatible { receiver: *r, code: self.code_spec.to_string() });
            }
        }
        Ok(())
    }

    /// Non-fatal remarks about the setup.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.sigma1_sq >= self.sigma2_sq {
            w.push(format!(
                "sigma1_sq = {} is not below sigma2_sq = {}; the relay link is expected to be the stronger one",
                self.sigma1_sq, self.sigma2_sq
            ));
        }
        w
    }

    /// Text form accepted by [`FromStr`].
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let lines = [
            ("snr_grid_db", join(self.snr_grid_db.iter().map(|s| s.to_string()).collect())),
            ("receivers", join(self.receivers.iter().map(|r| r.id().to_string()).collect())),
            ("frames_per_point", self.frames_per_point.to_string()),
            ("target_errors", self.target_errors.to_string()),
            ("code_spec", self.code_spec.to_string()),
            ("code_seed", self.code_seed.to_string()),
            ("sigma1_sq", self.sigma1_sq.to_string()),
            ("sigma2_sq", self.sigma2_sq.to_string()),
            ("lambda_t", self.lambda_t.to_string()),
            ("lambda_tau", self.lambda_tau.to_string()),
            ("seed", self.seed.to_string()),
            ("jobs", self.jobs.to_string()),
            ("timing", self.timing.to_string()),
            ("max_rounds", self.max_rounds.to_string()),
            (
                "cut_source",
                match self.cut_source {
                    CutSource::Fractional => "fractional".to_string(),
                    CutSource::HardDecision => "hard-decision".to_string(),
                },
            ),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

impl FromStr for ExperimentConfig {
    type Err = HarnessError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| HarnessError::Config { line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            cfg.set(key.trim(), value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_specs_parse() {
        assert_eq!("uncoded N=20".parse::<CodeSpec>().unwrap(), CodeSpec::Uncoded { symbols: 20 });
        assert_eq!(
            "regular 128 2 8".parse::<CodeSpec>().unwrap(),
            CodeSpec::Regular { length: 128, col_weight: 2, row_weight: 8 }
        );
        assert_eq!("alist codes/h.alist".parse::<CodeSpec>().unwrap(), CodeSpec::Alist("codes/h.alist".into()));
        assert!("regular 128 2".parse::<CodeSpec>().is_err());
        assert!("uncoded 20".parse::<CodeSpec>().is_err());
        assert!("turbo".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn unknown_key_names_its_line() {
        let err = "seed = 3\nfoo = 1\n".parse::<ExperimentConfig>().unwrap_err();
        assert_eq!(err.to_string(), "config line 2: unknown key `foo`");
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.receivers = vec![ReceiverKind::UnifiedMilp, ReceiverKind::AdaptiveLp];
        cfg.code_spec = CodeSpec::Regular { length: 32, col_weight: 3, row_weight: 6 };
        cfg.snr_grid_db = vec![1.5, 3.25];
        cfg.cut_source = CutSource::HardDecision;
        assert_eq!(cfg.to_text().parse::<ExperimentConfig>().unwrap(), cfg);
    }

    #[test]
    fn coded_receiver_needs_code() {
        let err = "receivers = unified-lp\ncode_spec = uncoded N=4".parse::<ExperimentConfig>().unwrap_err();
        assert!(matches!(err, HarnessError::Incompatible { receiver: ReceiverKind::UnifiedLp, .. }));
    }

    #[test]
    fn zero_frames_rejected() {
        assert!("frames_per_point = 0".parse::<ExperimentConfig>().is_err());
    }

    #[test]
    fn variance_order_warning() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.warnings().is_empty());
        cfg.sigma1_sq = 2.0;
        assert_eq!(cfg.warnings().len(), 1);
    }
}

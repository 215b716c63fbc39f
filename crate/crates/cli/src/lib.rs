//! Command implementations behind the `pirlab` binary.
//!
//! Every command returns a [`Report`]: a JSON document for standard output and
//! an overall verdict that decides the exit code.

mod reproduce;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use pirlab::audit::{
    check_correctness, measure_linear_concrete, measure_multiround_concrete,
    measure_overhead_ideal, measure_rate_ideal, run_audit, AuditOptions, ConcreteConfig, Exact,
    ExactReal, Real,
};
use pirlab::capacity::{mtpir_capacity, PirParameters};
use pirlab::coding::CodecConfig;
use pirlab::linear::SchemeDescriptor;
use pirlab::multiround::{MultiroundScheme, StorageLayout};
use pirlab::scheme::DEFAULT_EXHAUSTION_LIMIT;
use pirlab::{DesiredMessage, EnumerableScheme, Rational, Scheme, Verdict};

pub use reproduce::{cmd_reproduce, ReproduceConfig, ReproduceMode, Row};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Engine(#[from] pirlab::Error),

    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// A finished command: the document to print and whether it passed.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Multiround,
    Linear,
    Replicated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact entropies by enumeration.
    Ideal,
    /// Monte-Carlo sessions with real codes.
    Concrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageVariant {
    Split,
    Replicated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub mode: Mode,
    pub message_length: usize,
    pub trials: u64,
    pub seed: u64,
    pub codec: CodecConfig,
    pub message_bias: Exact,
    pub storage_variant: StorageVariant,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.message_bias.0;
        if !(p > Rational::from(0) && p < Rational::from(1)) {
            return Err(CliError::Usage(format!(
                "message bias {p} must lie strictly between 0 and 1"
            )));
        }
        if self.message_length == 0 {
            return Err(CliError::Usage("message length must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        self.codec.validate()?;
        if self.scheme != SchemeKind::Multiround {
            if self.storage_variant != StorageVariant::Split {
                return Err(CliError::Usage(
                    "storage variants apply to the multiround scheme only".into(),
                ));
            }
            if p != Rational::new(1, 2) {
                return Err(CliError::Usage(
                    "linear schemes assume uniform messages (bias 1/2)".into(),
                ));
            }
            let block = self.descriptor().message_length();
            if !self.message_length.is_multiple_of(block) {
                return Err(CliError::Usage(format!(
                    "message length {} is not a multiple of the {block}-bit block",
                    self.message_length
                )));
            }
        }
        if self.mode == Mode::Concrete
            && self.scheme == SchemeKind::Multiround
            && self.storage_variant == StorageVariant::Replicated
        {
            return Err(CliError::Usage(
                "concrete mode runs the split storage layout only".into(),
            ));
        }
        Ok(())
    }

    fn descriptor(&self) -> SchemeDescriptor {
        match self.scheme {
            SchemeKind::Replicated => SchemeDescriptor::replicated_scheme(),
            _ => SchemeDescriptor::linear_scheme(),
        }
    }

    /// Block length enumerated in ideal mode. Multiround positions are
    /// independent, so when `L` is too long to enumerate one position stands
    /// for all of them.
    pub fn ideal_block_length(&self) -> usize {
        match self.scheme {
            SchemeKind::Multiround => {
                let fits = self.message_length <= 16
                    && 1u128 << (3 * self.message_length) <= DEFAULT_EXHAUSTION_LIMIT;
                if fits {
                    self.message_length
                } else {
                    1
                }
            }
            _ => self.descriptor().message_length(),
        }
    }

    /// The scheme at its ideal-mode block length.
    pub fn scheme(&self) -> Result<Scheme> {
        Ok(match self.scheme {
            SchemeKind::Multiround => {
                let layout = match self.storage_variant {
                    StorageVariant::Split => StorageLayout::Split,
                    StorageVariant::Replicated => StorageLayout::Replicated,
                };
                Scheme::Multiround(MultiroundScheme::new(
                    layout,
                    self.message_bias.0,
                    self.ideal_block_length(),
                )?)
            }
            _ => Scheme::Linear(self.descriptor()),
        })
    }

    pub fn concrete(&self) -> ConcreteConfig {
        ConcreteConfig {
            length: self.message_length,
            trials: self.trials,
            seed: self.seed,
            codec: self.codec,
            bias: self.message_bias.0,
            desired: DesiredMessage::First,
        }
    }
}

/// Parses `3/4`, `0.75` or `1` into an exact rational.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let text = text.trim();
    let bad = || format!("`{text}` is not a fraction or decimal number");
    if text.contains('/') {
        let r: Rational = text.parse().map_err(|_| bad())?;
        return Ok(r);
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i128.pow(frac.len() as u32);
    let int: i128 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac: i128 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    if text.starts_with('-') {
        return Ok(Rational::new(int * scale - frac, scale));
    }
    Ok(Rational::new(int * scale + frac, scale))
}

pub fn cmd_capacity(messages: u32, databases: u32, collusion: u32) -> Result<Report> {
    let p = PirParameters::new(messages, databases, collusion, 1)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let c = mtpir_capacity(&p);
    Ok(Report {
        json: json!({
            "command": "capacity",
            "K": messages,
            "N": databases,
            "T": collusion,
            "capacity": Exact(c),
            "value": Real(*c.numer() as f64 / *c.denom() as f64),
        }),
        verdict: Verdict::Pass,
    })
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let l = cfg.message_length;
    let (report, verdict) = match cfg.mode {
        Mode::Ideal => {
            let s = cfg.scheme()?;
            let rate = measure_rate_ideal(&s, DEFAULT_EXHAUSTION_LIMIT)?;
            let overhead = measure_overhead_ideal(&s, DEFAULT_EXHAUSTION_LIMIT)?;
            let correctness = check_correctness(&s, DEFAULT_EXHAUSTION_LIMIT)?;
            let block = s.info().message_length;
            let blocks = Rational::new(l as i128, block as i128);
            let download = ExactReal::from(
                rate.download_per_symbol
                    .exact
                    .scale(Rational::from(l as i128)),
            );
            let verdict = Verdict::all([correctness.verdict, rate.admissible]);
            let report = json!({
                "scheme": s.info(),
                "blocks": Exact(blocks),
                "download_bits": download,
                "download_per_symbol": rate.download_per_symbol,
                "upload_bits": Exact(rate.upload_per_block.0 * blocks),
                "rate": rate.rate,
                "rate_exact": rate.rate_exact,
                "capacity": rate.capacity,
                "admissible": rate.admissible,
                "alpha": overhead.alpha,
                "sessions": correctness.sessions,
                "errors": correctness.errors,
            });
            (report, verdict)
        }
        Mode::Concrete => {
            let c = cfg.concrete();
            let run = match cfg.scheme {
                SchemeKind::Multiround => measure_multiround_concrete(&c)?,
                _ => measure_linear_concrete(&cfg.descriptor(), &c)?,
            };
            let verdict = Verdict::from_bool(run.errors == 0);
            let report = json!({
                "download_bits": Real(run.download_per_symbol.mean() * l as f64),
                "run": run,
            });
            (report, verdict)
        }
    };
    Ok(Report {
        json: json!({
            "command": "simulate",
            "config": cfg,
            "report": report,
            "verdict": verdict,
        }),
        verdict,
    })
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let s = cfg.scheme()?;
    let opts = AuditOptions {
        limit: DEFAULT_EXHAUSTION_LIMIT,
        concrete: (cfg.mode == Mode::Concrete).then(|| cfg.concrete()),
    };
    let report = run_audit(&s, &opts)?;
    let verdict = report.verdict;
    Ok(Report {
        json: json!({
            "command": "audit",
            "config": cfg,
            "report": serde_json::to_value(&report)?,
            "verdict": verdict,
        }),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pirlab::seed::DEFAULT_SEED;

    pub(crate) fn config(scheme: SchemeKind, mode: Mode, length: usize) -> RunConfig {
        RunConfig {
            scheme,
            mode,
            message_length: length,
            trials: 1,
            seed: DEFAULT_SEED,
            codec: CodecConfig::default(),
            message_bias: Exact(Rational::new(1, 2)),
            storage_variant: StorageVariant::Split,
        }
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational::new(3, 4));
        assert_eq!(parse_rational("0.75").unwrap(), Rational::new(3, 4));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("1").unwrap(), Rational::from(1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.7e").is_err());
    }

    #[test]
    fn capacity_examples() {
        for (k, n, t, c) in [(2, 2, 1, "2/3"), (1, 5, 1, "1/1"), (3, 2, 1, "4/7")] {
            assert_eq!(cmd_capacity(k, n, t).unwrap().json["capacity"], c);
        }
        assert!(matches!(cmd_capacity(2, 2, 3), Err(CliError::Usage(_))));
    }

    #[test]
    fn invalid_configs_are_usage_errors() {
        let mut c = config(SchemeKind::Multiround, Mode::Ideal, 1);
        c.message_bias = Exact(Rational::from(1));
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        let mut c = config(SchemeKind::Linear, Mode::Ideal, 6);
        assert!(c.validate().is_err());
        c.message_length = 8;
        c.storage_variant = StorageVariant::Replicated;
        assert!(c.validate().is_err());
        let mut c = config(SchemeKind::Multiround, Mode::Concrete, 8);
        c.storage_variant = StorageVariant::Replicated;
        assert!(c.validate().is_err());
        assert!(config(SchemeKind::Multiround, Mode::Ideal, 0)
            .validate()
            .is_err());
    }

    #[test]
    fn ideal_multiround_download_is_three_halves_per_bit() {
        for l in [1, 3, 1000] {
            let r = cmd_simulate(&config(SchemeKind::Multiround, Mode::Ideal, l)).unwrap();
            let expected = Rational::new(3 * l as i128, 2).to_string();
            assert_eq!(r.json["report"]["download_bits"]["exact"], expected);
            assert_eq!(r.json["report"]["download_per_symbol"]["exact"], "3/2");
            assert_eq!(r.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn linear_downloads_six_bits() {
        for mode in [Mode::Ideal, Mode::Concrete] {
            let r = cmd_simulate(&config(SchemeKind::Linear, mode, 4)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            let bits = &r.json["report"]["download_bits"];
            assert!(bits == 6.0 || bits["exact"] == "6", "{bits}");
        }
    }

    #[test]
    fn audits_flag_the_negative_controls() {
        let ok = cmd_audit(&config(SchemeKind::Multiround, Mode::Ideal, 1)).unwrap();
        assert_eq!(ok.verdict, Verdict::Pass);
        assert_eq!(
            ok.json["report"]["privacy"]["databases"][1]["total_variation"],
            "0/1"
        );
        let mut rep = config(SchemeKind::Multiround, Mode::Ideal, 1);
        rep.storage_variant = StorageVariant::Replicated;
        assert_eq!(cmd_audit(&rep).unwrap().verdict, Verdict::Fail);
        let mut biased = config(SchemeKind::Multiround, Mode::Ideal, 1);
        biased.message_bias = Exact(Rational::new(3, 4));
        assert_eq!(cmd_audit(&biased).unwrap().verdict, Verdict::Fail);
    }
}

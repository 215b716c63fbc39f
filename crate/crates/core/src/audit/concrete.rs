//! Monte-Carlo measurement with real codes.
//!
//! For the multiround scheme, each trial draws fresh messages and coins,
//! stores DB1's cells with the arithmetic coder and DB2's cells as
//! Slepian-Wolf bins, decodes DB2's storage at query time with the side
//! information carried by the round-2 query, and entropy-codes both answer
//! streams. Source models are the exact single-position marginals.

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use super::json::Real;
use super::privacy::enumerate_view;
use crate::coding::{
    entropy_decode, entropy_encode, sw_decode, sw_encode, CodecConfig, SourceModel, SwDecodeOutcome,
};
use crate::entropy::{marginal, Rational, Symbol};
use crate::linear::SchemeDescriptor;
use crate::multiround::{
    db1_answer, db2_answer, decode, derive_cells, encode_db1_query, encode_db2_query, round1,
    round2_query, Db2Query, MessagePair, MultiroundScheme, StorageLayout,
};
use crate::scheme::{pack_bits, DesiredMessage, EnumerableScheme, DEFAULT_EXHAUSTION_LIMIT};
use crate::seed::{stream, Purpose};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcreteConfig {
    pub length: usize,
    pub trials: u64,
    pub seed: u64,
    pub codec: CodecConfig,
    /// `Pr(w = 1)` for every message bit.
    #[serde(skip)]
    pub bias: Rational,
    pub desired: DesiredMessage,
}

impl ConcreteConfig {
    pub fn new(length: usize, trials: u64, seed: u64) -> Self {
        Self {
            length,
            trials,
            seed,
            codec: CodecConfig {
                seed,
                ..CodecConfig::default()
            },
            bias: Rational::new(1, 2),
            desired: DesiredMessage::First,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.length == 0 || self.trials == 0 {
            return Err(Error::InvalidParameters(
                "length and trials must be positive".into(),
            ));
        }
        if !(self.bias > Rational::zero() && self.bias < Rational::one()) {
            return Err(Error::InvalidParameters(format!(
                "bias {} must lie in (0, 1)",
                self.bias
            )));
        }
        self.codec.validate()
    }
}

/// Mean, sample standard deviation and normal-approximation 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: Real,
    pub sd: Real,
    pub ci95: [Real; 2],
}

impl Summary {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let sd = if samples.len() > 1 {
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * sd / n.sqrt();
        Self {
            mean: Real(mean),
            sd: Real(sd),
            ci95: [Real(mean - half), Real(mean + half)],
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcreteRun {
    pub length: usize,
    pub trials: u64,
    /// Downloaded bits per desired bit.
    pub download_per_symbol: Summary,
    /// Coded download minus the self-information of the realized answers,
    /// per desired bit.
    pub coder_excess_per_symbol: Summary,
    pub rate: Real,
    pub upload_per_symbol: Real,
    /// Stored bits per message bit at each database.
    pub storage_per_symbol: Vec<Real>,
    pub alpha: Real,
    /// Trials whose decoded message differs from the desired one.
    pub errors: u64,
    pub sw_blocks: u64,
    pub sw_failures: u64,
    /// Mean answer-stream bits per database, informational.
    pub answer_bits_per_database: Vec<Real>,
}

struct Models {
    a1: SourceModel,
    a2: SourceModel,
    x: SourceModel,
}

fn probability_where(
    joint: &crate::entropy::ExactDist,
    pred: impl Fn(&[Symbol]) -> bool,
) -> Rational {
    joint.iter().filter(|(o, _)| pred(o)).map(|(_, p)| *p).sum()
}

/// Exact single-position laws of the round-1 answer, the non-null round-2
/// answer and DB1's stored cell pair.
fn models(bias: Rational) -> Result<Models> {
    let s = MultiroundScheme::new(StorageLayout::Split, bias, 1)?;
    let db1 = enumerate_view(&s, DesiredMessage::First, 0, DEFAULT_EXHAUSTION_LIMIT)?.joint;
    let db2 = enumerate_view(&s, DesiredMessage::First, 1, DEFAULT_EXHAUSTION_LIMIT)?.joint;
    let one = Symbol::Bit(true);
    let p_a1 = probability_where(&db1, |o| o[4] == one);
    let asked = probability_where(&db2, |o| o[1] != Symbol::Null);
    let p_a2 = probability_where(&db2, |o| o[5] == one) / asked;
    let x = marginal(&db1, &[2, 3])?;
    let p_x1 = x.prob(&[one.clone(), Symbol::Bit(false)]);
    let p_x2 = x.prob(&[Symbol::Bit(false), one]);
    let x_model = SourceModel::new(
        [(0, Rational::one() - p_x1 - p_x2), (1, p_x1), (2, p_x2)]
            .into_iter()
            .filter(|(_, p)| !p.is_zero()),
    )?;
    Ok(Models {
        a1: SourceModel::bernoulli(p_a1)?,
        a2: SourceModel::bernoulli(p_a2)?,
        x: x_model,
    })
}

fn self_information(bits: &[bool], model: &SourceModel) -> f64 {
    bits.iter()
        .map(|&b| {
            let p = model
                .probability(u32::from(b))
                .and_then(|p| p.to_f64())
                .unwrap_or(0.0);
            -p.log2()
        })
        .sum()
}

fn to_symbols(bits: &[bool]) -> Vec<u32> {
    bits.iter().map(|&b| u32::from(b)).collect()
}

struct Trial {
    download: u64,
    per_db: [u64; 2],
    self_info: f64,
    upload: u64,
    stored: [u64; 2],
    sw_blocks: u64,
    sw_failures: u64,
    correct: bool,
}

fn multiround_trial(cfg: &ConcreteConfig, models: &Models, index: u64) -> Result<Trial> {
    let l = cfg.length;
    let bias = cfg.bias.to_f64().expect("bias is finite");
    let mut msg = stream(cfg.seed, Purpose::Messages, index);
    let w1: Vec<bool> = (0..l).map(|_| msg.gen_bool(bias)).collect();
    let w2: Vec<bool> = (0..l).map(|_| msg.gen_bool(bias)).collect();
    let mut coins = stream(cfg.seed, Purpose::UserCoins, index);
    let coin: Vec<bool> = (0..l).map(|_| coins.gen()).collect();
    let m = MessagePair::new(w1, w2)?;
    let cells = derive_cells(&m);

    // Storage preparation, before any query.
    let x_symbols: Vec<u32> = cells
        .x_pairs()
        .iter()
        .map(|&(x1, x2)| {
            if x1 {
                1
            } else if x2 {
                2
            } else {
                0
            }
        })
        .collect();
    let db1_store = entropy_encode(&x_symbols, &models.x)?;
    let pairs = cells.y_pairs();
    let n = cfg.codec.block_length;
    let bins = pairs
        .chunks(n)
        .map(|block| sw_encode(block, &cfg.codec.with_block_length(block.len())?))
        .collect::<Result<Vec<_>>>()?;

    // Round 1: DB1 restores its cells and answers.
    let x_back = entropy_decode(&db1_store, &models.x, l)?;
    let (x1, x2): (Vec<bool>, Vec<bool>) = x_back.iter().map(|&s| (s == 1, s == 2)).unzip();
    let (q1, _) = round1(&coin, &cells)?;
    let a1 = db1_answer(&q1, &x1, &x2)?;
    let stream1 = entropy_encode(&to_symbols(&a1), &models.a1)?;
    let a1_user: Vec<bool> = entropy_decode(&stream1, &models.a1, l)?
        .iter()
        .map(|&s| s == 1)
        .collect();

    // Round 2: DB2 recovers its cells with u read off the null pattern.
    let q2 = round2_query(cfg.desired, &q1, &a1_user)?;
    let u: Vec<bool> = q2.iter().map(|q| *q != Db2Query::Null).collect();
    let mut y = Vec::with_capacity(l);
    let mut sw_failures = 0;
    for (bin, side) in bins.iter().zip(u.chunks(n)) {
        match sw_decode(bin, side, &cfg.codec.with_block_length(side.len())?)? {
            SwDecodeOutcome::Decoded(block) => y.extend(block),
            // An ambiguous bin still yields a consistent block to answer from;
            // the session is then likely wrong and is counted as an error.
            SwDecodeOutcome::Ambiguous { first, .. } => {
                sw_failures += 1;
                y.extend(first);
            }
            SwDecodeOutcome::NoCandidate => {
                return Err(Error::NotDecodable(
                    "bin has no candidate consistent with u".into(),
                ));
            }
        }
    }
    let (y1, y2): (Vec<bool>, Vec<bool>) = y.into_iter().unzip();
    let a2 = db2_answer(&q2, &y1, &y2)?;
    let sent: Vec<bool> = a2.iter().flatten().copied().collect();
    let stream2 = entropy_encode(&to_symbols(&sent), &models.a2)?;
    let mut received = entropy_decode(&stream2, &models.a2, sent.len())?.into_iter();
    let a2_user: Vec<Option<bool>> = q2
        .iter()
        .map(|q| (*q != Db2Query::Null).then(|| received.next() == Some(1)))
        .collect();

    let decoded = decode(cfg.desired, &q1, &a1_user, &a2_user)?;
    Ok(Trial {
        download: (stream1.len() + stream2.len()) as u64,
        per_db: [stream1.len() as u64, stream2.len() as u64],
        self_info: self_information(&a1, &models.a1) + self_information(&sent, &models.a2),
        upload: (encode_db1_query(&q1).len() + encode_db2_query(&q2).len()) as u64,
        stored: [
            db1_store.len() as u64,
            bins.iter().map(|b| u64::from(b.bin_bits)).sum(),
        ],
        sw_blocks: bins.len() as u64,
        sw_failures,
        correct: decoded == m.message(cfg.desired),
    })
}

fn summarize(cfg: &ConcreteConfig, trials: &[Trial]) -> ConcreteRun {
    let l = cfg.length as f64;
    let t = trials.len() as f64;
    let download: Vec<f64> = trials.iter().map(|x| x.download as f64 / l).collect();
    let excess: Vec<f64> = trials
        .iter()
        .map(|x| (x.download as f64 - x.self_info) / l)
        .collect();
    let summary = Summary::of(&download);
    let storage: Vec<Real> = (0..2)
        .map(|n| Real(trials.iter().map(|x| x.stored[n] as f64).sum::<f64>() / t / l))
        .collect();
    let alpha = (storage[0].0 + storage[1].0) / 2.0;
    ConcreteRun {
        length: cfg.length,
        trials: cfg.trials,
        rate: Real(1.0 / summary.mean()),
        download_per_symbol: summary,
        coder_excess_per_symbol: Summary::of(&excess),
        upload_per_symbol: Real(trials.iter().map(|x| x.upload as f64).sum::<f64>() / t / l),
        storage_per_symbol: storage,
        alpha: Real(alpha),
        errors: trials.iter().filter(|x| !x.correct).count() as u64,
        sw_blocks: trials.iter().map(|x| x.sw_blocks).sum(),
        sw_failures: trials.iter().map(|x| x.sw_failures).sum(),
        answer_bits_per_database: (0..2)
            .map(|n| Real(trials.iter().map(|x| x.per_db[n] as f64).sum::<f64>() / t))
            .collect(),
    }
}

pub fn measure_multiround_concrete(cfg: &ConcreteConfig) -> Result<ConcreteRun> {
    cfg.validate()?;
    let models = models(cfg.bias)?;
    let trials = (0..cfg.trials)
        .map(|i| multiround_trial(cfg, &models, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, &trials))
}

/// Blockwise runs of a linear descriptor with uniform messages and an
/// independent pattern per block. Answers are sent uncoded.
pub fn measure_linear_concrete(s: &SchemeDescriptor, cfg: &ConcreteConfig) -> Result<ConcreteRun> {
    cfg.validate()?;
    let block = s.message_length();
    if !cfg.length.is_multiple_of(block) {
        return Err(Error::InvalidParameters(format!(
            "length {} is not a multiple of the {block}-bit block of {}",
            cfg.length,
            s.id()
        )));
    }
    if cfg.bias != Rational::new(1, 2) {
        return Err(Error::InvalidParameters(
            "linear schemes assume uniform messages".into(),
        ));
    }
    let law: Vec<f64> = s
        .patterns()
        .iter()
        .map(|p| p.to_f64().unwrap_or(0.0))
        .collect();
    let mut trials = Vec::new();
    for index in 0..cfg.trials {
        let mut msg = stream(cfg.seed, Purpose::Messages, index);
        let mut coins = stream(cfg.seed, Purpose::UserCoins, index);
        let mut trial = Trial {
            download: 0,
            per_db: [0, 0],
            self_info: 0.0,
            upload: 0,
            stored: [0, 0],
            sw_blocks: 0,
            sw_failures: 0,
            correct: true,
        };
        for _ in 0..cfg.length / block {
            let words: Vec<u64> = (0..2)
                .map(|_| pack_bits(&(0..block).map(|_| msg.gen::<bool>()).collect::<Vec<_>>()))
                .collect();
            let u: f64 = coins.gen();
            let mut acc = 0.0;
            let r = law.iter().position(|p| {
                acc += p;
                u < acc
            });
            let r = r.unwrap_or(law.len() - 1) as u64;
            let rec = s.session(&words, cfg.desired, r)?;
            for (n, db) in rec.databases.iter().enumerate().take(2) {
                trial.per_db[n] += db.download_bits;
                trial.stored[n] += u64::from(s.storage_entropy(n));
            }
            trial.download += rec.download_bits();
            trial.self_info += rec.download_bits() as f64;
            trial.upload += rec.upload_bits();
            trial.correct &= rec.decoded == Some(words[cfg.desired.index()]);
        }
        trials.push(trial);
    }
    Ok(summarize(cfg, &trials))
}

/// Mean coded answer-stream length per database for each desired message,
/// under the same messages and coins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthLeakage {
    pub first: Vec<Real>,
    pub second: Vec<Real>,
    /// Largest absolute difference of the means, in bits.
    pub max_gap_bits: Real,
}

pub fn measure_length_leakage(cfg: &ConcreteConfig) -> Result<LengthLeakage> {
    let run = |desired| {
        measure_multiround_concrete(&ConcreteConfig { desired, ..*cfg })
            .map(|r| r.answer_bits_per_database)
    };
    let first = run(DesiredMessage::First)?;
    let second = run(DesiredMessage::Second)?;
    let gap = first
        .iter()
        .zip(&second)
        .map(|(a, b)| (a.0 - b.0).abs())
        .fold(0.0, f64::max);
    Ok(LengthLeakage {
        first,
        second,
        max_gap_bits: Real(gap),
    })
}

//! Binary arithmetic coder (32-bit integer range coder with carry-free
//! underflow handling) over a finite memoryless source model.
//!
//! Every non-empty stream ends with a reserved end-of-stream slot of weight
//! `1 / (EOS_SCALE * total + 1)`, which costs about `log2(total) + 12` bits
//! once per stream and lets the decoder reject a wrong symbol count.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::BitStream;
use crate::entropy::Rational;
use crate::{Error, Result};

const PRECISION: u32 = 32;
const FULL: u64 = (1 << PRECISION) - 1;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);
/// Largest frequency total of the symbol slots.
const MAX_TOTAL: u64 = 1 << 16;
/// Symbol slots are widened by this factor next to the unit end-of-stream
/// slot. The grand total stays below `QUARTER`, so every slot keeps a
/// non-empty subrange.
const EOS_SCALE: u64 = 1 << 12;

/// Memoryless source over `u32` symbols with rational probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceModel {
    symbols: Vec<u32>,
    probabilities: Vec<Rational>,
    /// `cumulative[i]..cumulative[i + 1]` is the slot of `symbols[i]`; the
    /// final slot is the end-of-stream marker.
    cumulative: Vec<u64>,
}

impl SourceModel {
    pub fn new<I: IntoIterator<Item = (u32, Rational)>>(entries: I) -> Result<Self> {
        let mut entries: Vec<(u32, Rational)> = entries.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        if entries.is_empty() {
            return Err(Error::InvalidDistribution(
                "source model has no symbols".into(),
            ));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(
                "source model lists a symbol twice".into(),
            ));
        }
        if let Some((s, p)) = entries.iter().find(|(_, p)| *p <= Rational::zero()) {
            return Err(Error::InvalidDistribution(format!(
                "symbol {s} has non-positive probability {p}"
            )));
        }
        let total: Rational = entries.iter().map(|e| e.1).sum();
        if total != Rational::from_integer(1) {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let freqs = integer_frequencies(&entries.iter().map(|e| e.1).collect::<Vec<_>>());
        let mut cumulative = vec![0u64];
        for f in freqs {
            cumulative.push(cumulative.last().unwrap() + f * EOS_SCALE);
        }
        cumulative.push(cumulative.last().unwrap() + 1);
        Ok(Self {
            symbols: entries.iter().map(|e| e.0).collect(),
            probabilities: entries.iter().map(|e| e.1).collect(),
            cumulative,
        })
    }

    /// Symbols `0` and `1` with `Pr(1) = p`.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        Self::new([(0, Rational::from_integer(1) - p), (1, p)])
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn probability(&self, symbol: u32) -> Option<Rational> {
        self.position(symbol).map(|i| self.probabilities[i])
    }

    /// Shannon entropy of the model in bits.
    pub fn entropy(&self) -> f64 {
        self.probabilities
            .iter()
            .map(|p| {
                let p = p.to_f64().unwrap_or(0.0);
                -p * p.log2()
            })
            .sum()
    }

    fn total(&self) -> u64 {
        *self.cumulative.last().unwrap()
    }

    fn position(&self, symbol: u32) -> Option<usize> {
        self.symbols.binary_search(&symbol).ok()
    }

    fn slot(&self, index: usize) -> (u64, u64) {
        (self.cumulative[index], self.cumulative[index + 1])
    }

    fn find(&self, target: u64) -> usize {
        self.cumulative.partition_point(|&c| c <= target) - 1
    }
}

/// Exact frequencies when the common denominator is small, otherwise a
/// rounding onto `MAX_TOTAL` that keeps every symbol codable.
fn integer_frequencies(probs: &[Rational]) -> Vec<u64> {
    let lcm = probs.iter().try_fold(1i128, |acc, p| {
        let l = acc.lcm(p.denom());
        (l <= MAX_TOTAL as i128).then_some(l)
    });
    if let Some(d) = lcm {
        return probs
            .iter()
            .map(|p| (p.numer() * (d / p.denom())) as u64)
            .collect();
    }
    let mut freqs: Vec<u64> = probs
        .iter()
        .map(|p| ((p.to_f64().unwrap_or(0.0) * MAX_TOTAL as f64).round() as u64).max(1))
        .collect();
    let sum: u64 = freqs.iter().sum();
    let largest = (0..freqs.len()).max_by_key(|&i| freqs[i]).unwrap();
    freqs[largest] = (freqs[largest] as i64 + MAX_TOTAL as i64 - sum as i64) as u64;
    freqs
}

struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitStream,
}

impl Encoder {
    fn new() -> Self {
        Self {
            low: 0,
            high: FULL,
            pending: 0,
            out: BitStream::new(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, (lo, hi): (u64, u64), total: u64) {
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = self.high << 1 | 1;
        }
    }

    fn finish(mut self) -> BitStream {
        self.pending += 1;
        self.emit(self.low >= QUARTER);
        self.out
    }
}

/// Encodes `symbols` under `model`. The empty sequence encodes to the empty
/// stream; the stream does not carry the symbol count.
pub fn entropy_encode(symbols: &[u32], model: &SourceModel) -> Result<BitStream> {
    if symbols.is_empty() {
        return Ok(BitStream::new());
    }
    let total = model.total();
    let mut enc = Encoder::new();
    for &s in symbols {
        let i = model.position(s).ok_or(Error::UnknownSymbol(s))?;
        enc.encode(model.slot(i), total);
    }
    enc.encode(model.slot(model.symbols.len()), total);
    Ok(enc.finish())
}

/// Decodes exactly `count` symbols followed by the end-of-stream marker. The
/// result is re-encoded and compared with `stream`, so a wrong count, a
/// truncated stream or trailing garbage is reported as
/// [`Error::CorruptStream`].
pub fn entropy_decode(stream: &BitStream, model: &SourceModel, count: usize) -> Result<Vec<u32>> {
    let total = model.total();
    let mut next = 0usize;
    let mut read = || {
        let b = stream.get(next).unwrap_or(false);
        next += 1;
        u64::from(b)
    };
    let (mut low, mut high) = (0u64, FULL);
    let mut value = 0u64;
    if count > 0 {
        for _ in 0..PRECISION {
            value = value << 1 | read();
        }
    }
    let eos = model.symbols.len();
    let mut out = Vec::with_capacity(count);
    // The end-of-stream marker is decoded too, as step `count`.
    for step in 0..count + usize::from(count > 0) {
        let range = high - low + 1;
        let target = ((value - low + 1) * total - 1) / range;
        let i = model.find(target);
        if (i == eos) != (step == count) {
            return Err(Error::CorruptStream(format!(
                "end-of-stream marker {} symbol {step} of {count}",
                if i == eos {
                    "found at"
                } else {
                    "missing after"
                }
            )));
        }
        if i < eos {
            out.push(model.symbols[i]);
        }
        let (lo, hi) = model.slot(i);
        high = low + range * hi / total - 1;
        low += range * lo / total;
        loop {
            if high < HALF {
                // Lower half: nothing to subtract before rescaling.
            } else if low >= HALF {
                low -= HALF;
                high -= HALF;
                value -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                low -= QUARTER;
                high -= QUARTER;
                value -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = high << 1 | 1;
            value = value << 1 | read();
        }
    }
    if entropy_encode(&out, model)? != *stream {
        return Err(Error::CorruptStream(format!(
            "stream of {} bits is not the encoding of {count} symbols",
            stream.len()
        )));
    }
    Ok(out)
}

//! Capacity and storage overhead formulas.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::entropy::{LogSum, Rational};
use crate::{Error, Result, Verdict};

/// `K` messages, `N` databases, `T`-collusion privacy, `Γ` rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PirParameters {
    messages: u32,
    databases: u32,
    collusion: u32,
    rounds: u32,
}

impl PirParameters {
    pub fn new(messages: u32, databases: u32, collusion: u32, rounds: u32) -> Result<Self> {
        if messages == 0 || databases == 0 || collusion == 0 || rounds == 0 {
            return Err(Error::InvalidParameters(
                "K, N, T and the round count must all be positive".into(),
            ));
        }
        if collusion > databases {
            return Err(Error::InvalidParameters(format!(
                "collusion T = {collusion} exceeds the number of databases N = {databases}"
            )));
        }
        Ok(Self {
            messages,
            databases,
            collusion,
            rounds,
        })
    }

    pub fn messages(&self) -> u32 {
        self.messages
    }

    pub fn databases(&self) -> u32 {
        self.databases
    }

    pub fn collusion(&self) -> u32 {
        self.collusion
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }
}

/// `(1 + T/N + (T/N)^2 + ... + (T/N)^(K-1))^-1`. Does not depend on the
/// number of rounds.
pub fn mtpir_capacity(p: &PirParameters) -> Rational {
    let ratio = Rational::new(p.collusion.into(), p.databases.into());
    let mut term = Rational::one();
    let mut sum = Rational::zero();
    for _ in 0..p.messages {
        sum += term;
        term *= ratio;
    }
    sum.recip()
}

/// Capacity of classical (non-colluding) PIR written as the closed geometric
/// form `(1 - 1/N) / (1 - 1/N^K)`, with the `N = 1` limit `1/K`.
pub fn pir_capacity(messages: u32, databases: u32) -> Result<Rational> {
    if messages == 0 || databases == 0 {
        return Err(Error::InvalidParameters("K and N must be positive".into()));
    }
    if databases == 1 {
        return Ok(Rational::new(1, messages.into()));
    }
    let inv_n = Rational::new(1, databases.into());
    let inv_n_k = (0..messages).fold(Rational::one(), |acc, _| acc * inv_n);
    Ok((Rational::one() - inv_n) / (Rational::one() - inv_n_k))
}

/// Inputs to the storage overhead `α = Σ_n H(S_n) / (K L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverheadAccount {
    pub per_database_storage_bits: Vec<f64>,
    pub message_length: u64,
    pub messages: u32,
}

pub fn storage_overhead(a: &OverheadAccount) -> Result<f64> {
    if a.message_length == 0 || a.messages == 0 {
        return Err(Error::InvalidParameters(
            "message length and K must be positive".into(),
        ));
    }
    if let Some(bad) = a
        .per_database_storage_bits
        .iter()
        .find(|b| b.is_nan() || **b < 0.0)
    {
        return Err(Error::InvalidParameters(format!(
            "storage entry {bad} is not a non-negative number"
        )));
    }
    let total: f64 = a.per_database_storage_bits.iter().sum();
    Ok(total / (a.messages as f64 * a.message_length as f64))
}

/// Exact counterpart of [`storage_overhead`] for per-database storage given
/// as exact entropies.
pub fn storage_overhead_exact(
    per_database: &[LogSum],
    message_length: u64,
    messages: u32,
) -> Result<LogSum> {
    if message_length == 0 || messages == 0 {
        return Err(Error::InvalidParameters(
            "message length and K must be positive".into(),
        ));
    }
    let total = per_database
        .iter()
        .cloned()
        .fold(LogSum::zero(), |acc, h| acc + h);
    let kl = i128::from(messages) * i128::from(message_length);
    Ok(total.scale(Rational::new(1, kl)))
}

/// `Pass` iff `rate <= capacity(p)`.
pub fn check_rate_admissible(rate: Rational, p: &PirParameters) -> Verdict {
    Verdict::from_bool(rate <= mtpir_capacity(p))
}

//! Common interface the auditor uses to enumerate a scheme exhaustively.

use serde::Serialize;

use crate::capacity::PirParameters;
use crate::entropy::{Domain, Rational, Symbol};
use crate::linear::SchemeDescriptor;
use crate::multiround::MultiroundScheme;
use crate::{Error, Result};

/// Which of the two messages the user wants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DesiredMessage {
    First,
    Second,
}

impl DesiredMessage {
    pub const ALL: [DesiredMessage; 2] = [DesiredMessage::First, DesiredMessage::Second];

    /// Zero-based message index.
    pub fn index(self) -> usize {
        match self {
            DesiredMessage::First => 0,
            DesiredMessage::Second => 1,
        }
    }

    /// One-based index as used in reports (`θ = 1, 2`).
    pub fn number(self) -> u32 {
        self.index() as u32 + 1
    }

    pub fn from_number(theta: u32) -> Result<Self> {
        match theta {
            1 => Ok(DesiredMessage::First),
            2 => Ok(DesiredMessage::Second),
            _ => Err(Error::InvalidParameters(format!(
                "message index {theta} is not 1 or 2"
            ))),
        }
    }
}

/// Static description of a scheme.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeInfo {
    pub id: String,
    pub params: PirParameters,
    /// Message length of one enumerable block.
    pub message_length: usize,
    /// Whether decoding is exact at every block length (no ε term).
    pub zero_error: bool,
}

/// What one database stores, receives and returns during a session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatabaseRecord {
    /// One entry per round; `Symbol::Null` when the database is not queried.
    pub queries: Vec<Symbol>,
    /// Stored content, possibly split into several components.
    pub stored: Vec<Symbol>,
    /// One entry per round, aligned with `queries`.
    pub answers: Vec<Symbol>,
    pub download_bits: u64,
    pub upload_bits: u64,
}

impl DatabaseRecord {
    /// Observation tuple `(queries, stored, answers)` in view-coordinate order.
    pub fn view(&self) -> Vec<Symbol> {
        self.queries
            .iter()
            .chain(&self.stored)
            .chain(&self.answers)
            .cloned()
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionRecord {
    pub databases: Vec<DatabaseRecord>,
    /// Decoded message word, `None` when the decoder gave up.
    pub decoded: Option<u64>,
}

impl SessionRecord {
    pub fn download_bits(&self) -> u64 {
        self.databases.iter().map(|d| d.download_bits).sum()
    }

    pub fn upload_bits(&self) -> u64 {
        self.databases.iter().map(|d| d.upload_bits).sum()
    }
}

/// A scheme whose message and user-randomness laws are finite and small
/// enough to sum over.
///
/// Messages are passed as one `u64` word per message, bit `j` holding the
/// `j`-th message bit. Database shared randomness is degenerate for every
/// scheme in this crate: databases answer deterministically.
pub trait EnumerableScheme {
    fn info(&self) -> SchemeInfo;

    /// Number of (message realization, user randomness) pairs.
    fn state_space(&self) -> u128;

    fn message_law(&self) -> Vec<(Vec<u64>, Rational)>;

    fn randomness_law(&self) -> Vec<(u64, Rational)>;

    /// Alphabets of `DatabaseRecord::view()` for `database`.
    fn view_domains(&self, database: usize) -> Vec<Domain>;

    /// Human-readable names of the view coordinates.
    fn view_labels(&self, database: usize) -> Vec<String>;

    fn session(
        &self,
        messages: &[u64],
        desired: DesiredMessage,
        randomness: u64,
    ) -> Result<SessionRecord>;

    /// Each database's view of every state with its probability, plus the
    /// session itself, for one desired message.
    fn enumerate(&self, desired: DesiredMessage, limit: u128) -> Result<Vec<EnumeratedSession>> {
        let size = self.state_space();
        if size > limit {
            return Err(Error::NotEnumerable { size, limit });
        }
        let randomness = self.randomness_law();
        let mut out = Vec::with_capacity(size as usize);
        for (messages, pm) in self.message_law() {
            for &(r, pr) in &randomness {
                let session = self.session(&messages, desired, r)?;
                out.push(EnumeratedSession {
                    messages: messages.clone(),
                    randomness: r,
                    probability: pm * pr,
                    session,
                });
            }
        }
        Ok(out)
    }
}

/// Every scheme the auditor and the command line know about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    Multiround(MultiroundScheme),
    Linear(SchemeDescriptor),
}

impl Scheme {
    /// Two-copy symmetrization; defined for single-round schemes only.
    pub fn symmetrize(&self) -> Result<Scheme> {
        match self {
            Scheme::Linear(s) => s.symmetrize().map(Scheme::Linear),
            Scheme::Multiround(_) => Err(Error::UnsupportedScheme(
                "symmetrization is defined for single-round schemes only".into(),
            )),
        }
    }

    fn inner(&self) -> &dyn EnumerableScheme {
        match self {
            Scheme::Multiround(s) => s,
            Scheme::Linear(s) => s,
        }
    }
}

impl EnumerableScheme for Scheme {
    fn info(&self) -> SchemeInfo {
        self.inner().info()
    }

    fn state_space(&self) -> u128 {
        self.inner().state_space()
    }

    fn message_law(&self) -> Vec<(Vec<u64>, Rational)> {
        self.inner().message_law()
    }

    fn randomness_law(&self) -> Vec<(u64, Rational)> {
        self.inner().randomness_law()
    }

    fn view_domains(&self, database: usize) -> Vec<Domain> {
        self.inner().view_domains(database)
    }

    fn view_labels(&self, database: usize) -> Vec<String> {
        self.inner().view_labels(database)
    }

    fn session(
        &self,
        messages: &[u64],
        desired: DesiredMessage,
        randomness: u64,
    ) -> Result<SessionRecord> {
        self.inner().session(messages, desired, randomness)
    }
}

#[derive(Clone, Debug)]
pub struct EnumeratedSession {
    pub messages: Vec<u64>,
    pub randomness: u64,
    pub probability: Rational,
    pub session: SessionRecord,
}

/// Packs bits (index 0 = least significant) into a word.
pub fn pack_bits(bits: &[bool]) -> u64 {
    debug_assert!(bits.len() <= 64);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn unpack_bits(word: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| word >> i & 1 == 1).collect()
}

/// Default cap on `state_space()` for exhaustive enumeration.
pub const DEFAULT_EXHAUSTION_LIMIT: u128 = 1 << 20;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let bits = [true, false, true, true];
        assert_eq!(pack_bits(&bits), 0b1101);
        assert_eq!(unpack_bits(0b1101, 4), bits);
    }

    #[test]
    fn multiround_cannot_be_symmetrized() {
        let s = Scheme::Multiround(MultiroundScheme::standard());
        assert!(matches!(s.symmetrize(), Err(Error::UnsupportedScheme(_))));
        let l = Scheme::Linear(SchemeDescriptor::linear_scheme());
        assert_eq!(l.symmetrize().unwrap().info().message_length, 8);
    }

    #[test]
    fn desired_numbers() {
        assert_eq!(
            DesiredMessage::from_number(2).unwrap(),
            DesiredMessage::Second
        );
        assert_eq!(DesiredMessage::First.number(), 1);
        assert!(DesiredMessage::from_number(3).is_err());
    }
}

//! Executable laboratory for two-database private information retrieval.
//!
//! The crate implements two retrieval schemes for `K = 2` messages stored on
//! `N = 2` non-colluding databases and the machinery to check them:
//!
//! * [`multiround`]: a two-round, non-linear scheme in which the first
//!   database stores the cells `x1 = w1∧w2`, `x2 = ¬w1∧¬w2` and the second
//!   stores `y1 = w1∧¬w2`, `y2 = ¬w1∧w2`. The second database can compress its
//!   cells with Slepian-Wolf coding because the round-two query reveals the
//!   side information `u` ([`coding`]).
//! * [`linear`]: the single-round linear scheme on 4-bit blocks with six stored
//!   bits per database, a replicated baseline, and the two-copy symmetrization
//!   combinator.
//! * [`audit`]: exact privacy auditing by exhaustive enumeration, rate and
//!   storage overhead measurement, and numeric checks of the entropy identities
//!   and converse inequalities.
//! * [`capacity`]: closed-form capacity and overhead formulas used as oracles.
//!
//! All probabilities live in [`entropy::Rational`]; entropies can be evaluated
//! exactly as rational combinations of `log2(prime)` terms ([`entropy::LogSum`]).

pub mod audit;
pub mod capacity;
pub mod coding;
pub mod entropy;
pub mod linear;
pub mod multiround;
pub mod scheme;
pub mod seed;

use serde::Serialize;
use thiserror::Error;

pub use entropy::{ExactDist, LogSum, Rational, Symbol};
pub use scheme::{DesiredMessage, EnumerableScheme, Scheme};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("coordinate {index} out of range for arity {arity}")]
    InvalidCoordinate { index: usize, arity: usize },

    #[error("coordinate {0} listed twice")]
    DuplicateCoordinate(usize),

    #[error("coordinate {0} appears in both coordinate sets")]
    OverlappingCoordinates(usize),

    #[error("distributions are declared over different alphabets")]
    AlphabetMismatch,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("incomplete transcript: {0}")]
    IncompleteTranscript(String),

    #[error("symbol {0} is not in the source alphabet")]
    UnknownSymbol(u32),

    #[error("corrupt or truncated stream: {0}")]
    CorruptStream(String),

    #[error("state space of {size} outcomes exceeds the exhaustion limit {limit}")]
    NotEnumerable { size: u128, limit: u128 },

    #[error("not decodable: {0}")]
    NotDecodable(String),

    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a single check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    /// `Pass` iff every verdict passes.
    pub fn all<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        Verdict::from_bool(verdicts.into_iter().all(Verdict::passed))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

//! The rate-2/3 linear scheme written out as its table: 4-bit messages
//! `W1 = (a1, a2, a3, a4)`, `W2 = (b1, b2, b3, b4)`, six stored bits per
//! database, three downloaded bits per database.

use crate::scheme::DesiredMessage;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearMessages {
    pub a: [bool; 4],
    pub b: [bool; 4],
}

impl LinearMessages {
    pub fn new(a: &[bool], b: &[bool]) -> Result<Self> {
        let block = |v: &[bool]| -> Result<[bool; 4]> {
            v.try_into().map_err(|_| Error::LengthMismatch {
                expected: 4,
                actual: v.len(),
            })
        };
        Ok(Self {
            a: block(a)?,
            b: block(b)?,
        })
    }

    pub fn message(&self, which: DesiredMessage) -> [bool; 4] {
        match which {
            DesiredMessage::First => self.a,
            DesiredMessage::Second => self.b,
        }
    }
}

/// Which of the two download patterns the user's coin selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternChoice {
    One,
    Two,
}

impl PatternChoice {
    pub const ALL: [PatternChoice; 2] = [PatternChoice::One, PatternChoice::Two];

    pub fn from_coin(coin: bool) -> Self {
        if coin {
            PatternChoice::Two
        } else {
            PatternChoice::One
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoredLinear {
    pub s1: [bool; 6],
    pub s2: [bool; 6],
}

pub fn linear_store(m: &LinearMessages) -> StoredLinear {
    let [a1, a2, a3, a4] = m.a;
    let [b1, b2, b3, b4] = m.b;
    StoredLinear {
        s1: [a1, a3, b1, b3, a2 ^ b2, a4 ^ b4],
        s2: [a2, a4, b2, b4, a3 ^ b1, a1 ^ b3],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearRetrieval {
    pub db1: [bool; 3],
    pub db2: [bool; 3],
    pub decoded: [bool; 4],
}

/// Runs one block: DB1's answer depends on the pattern only, DB2's on the
/// pattern and the desired index.
pub fn linear_retrieve(
    desired: DesiredMessage,
    pattern: PatternChoice,
    m: &LinearMessages,
) -> LinearRetrieval {
    let s = linear_store(m);
    let [s1a1, s1a3, s1b1, s1b3, s1ab2, s1ab4] = s.s1;
    let [s2a2, s2a4, s2b2, s2b4, s2a3b1, s2a1b3] = s.s2;
    // DB2 serves one of two triples: (a4, b2, a3+b1) or (a2, b4, a1+b3).
    let left = [s2a4, s2b2, s2a3b1];
    let right = [s2a2, s2b4, s2a1b3];
    use DesiredMessage::*;
    use PatternChoice::*;
    let (db1, db2) = match (pattern, desired) {
        (One, First) => ([s1a1, s1b1, s1ab2], left),
        (One, Second) => ([s1a1, s1b1, s1ab2], right),
        (Two, First) => ([s1a3, s1b3, s1ab4], right),
        (Two, Second) => ([s1a3, s1b3, s1ab4], left),
    };
    let decoded = match (pattern, desired) {
        // a1, a2 = (a2+b2)+b2, a3 = (a3+b1)+b1, a4
        (One, First) => [db1[0], db1[2] ^ db2[1], db2[2] ^ db1[1], db2[0]],
        // b1, b2 = (a2+b2)+a2, b3 = (a1+b3)+a1, b4
        (One, Second) => [db1[1], db1[2] ^ db2[0], db2[2] ^ db1[0], db2[1]],
        // a1 = (a1+b3)+b3, a2, a3, a4 = (a4+b4)+b4
        (Two, First) => [db2[2] ^ db1[1], db2[0], db1[0], db1[2] ^ db2[1]],
        // b1 = (a3+b1)+a3, b2, b3, b4 = (a4+b4)+a4
        (Two, Second) => [db2[2] ^ db1[0], db2[1], db1[1], db1[2] ^ db2[0]],
    };
    LinearRetrieval { db1, db2, decoded }
}

/// Blockwise retrieval of messages whose length is a multiple of 4, one
/// pattern per block.
pub fn linear_retrieve_blocks(
    desired: DesiredMessage,
    patterns: &[PatternChoice],
    w1: &[bool],
    w2: &[bool],
) -> Result<Vec<LinearRetrieval>> {
    if w1.len() != w2.len() || !w1.len().is_multiple_of(4) {
        return Err(Error::InvalidParameters(format!(
            "message lengths {} and {} must be equal multiples of 4",
            w1.len(),
            w2.len()
        )));
    }
    if patterns.len() != w1.len() / 4 {
        return Err(Error::LengthMismatch {
            expected: w1.len() / 4,
            actual: patterns.len(),
        });
    }
    w1.chunks(4)
        .zip(w2.chunks(4))
        .zip(patterns)
        .map(|((a, b), &p)| Ok(linear_retrieve(desired, p, &LinearMessages::new(a, b)?)))
        .collect()
}

/// Both databases hold `(a, b)` in full.
pub fn replicated_store(m: &LinearMessages) -> [[bool; 8]; 2] {
    let mut copy = [false; 8];
    copy[..4].copy_from_slice(&m.a);
    copy[4..].copy_from_slice(&m.b);
    [copy, copy]
}

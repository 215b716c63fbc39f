//! Two-round, non-linear retrieval of one of two messages from two databases.
//!
//! Per message position the bits `(w1, w2)` are split into four cells, exactly
//! one of which is 1:
//!
//! ```text
//! x1 = w1 ∧ w2      x2 = ¬w1 ∧ ¬w2      (stored at DB1)
//! y1 = w1 ∧ ¬w2     y2 = ¬w1 ∧ w2       (stored at DB2)
//! ```
//!
//! Round 1 asks DB1 for `x1` or `x2` according to a private fair coin. An
//! answer of 1 pins both message bits. Otherwise round 2 asks DB2 for the `y`
//! cell that equals (or complements) the desired bit. The pattern of null
//! round-2 positions is the indicator `u` that DB2 later uses as decoder side
//! information for its Slepian-Wolf compressed storage.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::capacity::PirParameters;
use crate::coding::BitStream;
use crate::entropy::{Domain, Rational, Symbol};
use crate::scheme::{
    pack_bits, unpack_bits, DatabaseRecord, DesiredMessage, EnumerableScheme, SchemeInfo,
    SessionRecord,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessagePair {
    w1: Vec<bool>,
    w2: Vec<bool>,
}

impl MessagePair {
    pub fn new(w1: Vec<bool>, w2: Vec<bool>) -> Result<Self> {
        if w1.len() != w2.len() {
            return Err(Error::LengthMismatch {
                expected: w1.len(),
                actual: w2.len(),
            });
        }
        Ok(Self { w1, w2 })
    }

    pub fn len(&self) -> usize {
        self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w1.is_empty()
    }

    pub fn w1(&self) -> &[bool] {
        &self.w1
    }

    pub fn w2(&self) -> &[bool] {
        &self.w2
    }

    pub fn message(&self, which: DesiredMessage) -> &[bool] {
        match which {
            DesiredMessage::First => &self.w1,
            DesiredMessage::Second => &self.w2,
        }
    }
}

/// The four cells per position, plus the round-2 indicator once the coin is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTable {
    pub x1: Vec<bool>,
    pub x2: Vec<bool>,
    pub y1: Vec<bool>,
    pub y2: Vec<bool>,
    /// `u[l] = 0` iff DB1's round-1 answer at `l` is 1 (DB2 is not asked).
    pub u: Option<Vec<bool>>,
}

impl CellTable {
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    /// DB2's stored pairs `(y1, y2)`.
    pub fn y_pairs(&self) -> Vec<(bool, bool)> {
        self.y1
            .iter()
            .copied()
            .zip(self.y2.iter().copied())
            .collect()
    }

    /// DB1's stored pairs `(x1, x2)`.
    pub fn x_pairs(&self) -> Vec<(bool, bool)> {
        self.x1
            .iter()
            .copied()
            .zip(self.x2.iter().copied())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Db1Query {
    AskX1,
    AskX2,
}

impl Db1Query {
    pub fn symbol(self) -> Symbol {
        match self {
            Db1Query::AskX1 => Symbol::Label("x1"),
            Db1Query::AskX2 => Symbol::Label("x2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Db2Query {
    Null,
    AskY1,
    AskY2,
}

impl Db2Query {
    pub fn symbol(self) -> Symbol {
        match self {
            Db2Query::Null => Symbol::Null,
            Db2Query::AskY1 => Symbol::Label("y1"),
            Db2Query::AskY2 => Symbol::Label("y2"),
        }
    }
}

/// Placeholder for randomness shared by the databases. Both databases of
/// this scheme answer deterministically, so it carries nothing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SharedRandomness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub desired: DesiredMessage,
    /// The user's private coin per position.
    pub coin: Vec<bool>,
    pub q1: Vec<Db1Query>,
    pub a1: Vec<bool>,
    pub q2: Vec<Db2Query>,
    /// Defined exactly where `q2` is not null.
    pub a2: Vec<Option<bool>>,
    pub u: Vec<bool>,
    pub shared: SharedRandomness,
    pub decoded: Vec<bool>,
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

pub fn derive_cells(m: &MessagePair) -> CellTable {
    let zip = || m.w1.iter().zip(&m.w2);
    CellTable {
        x1: zip().map(|(&a, &b)| a && b).collect(),
        x2: zip().map(|(&a, &b)| !a && !b).collect(),
        y1: zip().map(|(&a, &b)| a && !b).collect(),
        y2: zip().map(|(&a, &b)| !a && b).collect(),
        u: None,
    }
}

/// [`derive_cells`] with the indicator filled in from the user's coin.
pub fn derive_cells_with_coin(m: &MessagePair, coin: &[bool]) -> Result<CellTable> {
    let mut cells = derive_cells(m);
    let (_, a1) = round1(coin, &cells)?;
    cells.u = Some(a1.iter().map(|&a| !a).collect());
    Ok(cells)
}

/// Round 1: the coin picks `x1` (coin 0) or `x2` (coin 1); DB1 returns that cell.
pub fn round1(coin: &[bool], cells: &CellTable) -> Result<(Vec<Db1Query>, Vec<bool>)> {
    check_len(cells.len(), coin.len())?;
    let queries: Vec<Db1Query> = coin
        .iter()
        .map(|&c| if c { Db1Query::AskX2 } else { Db1Query::AskX1 })
        .collect();
    let answers = db1_answer(&queries, &cells.x1, &cells.x2)?;
    Ok((queries, answers))
}

/// DB1's answer is a function of its stored `(x1, x2)` and the query only.
pub fn db1_answer(q1: &[Db1Query], x1: &[bool], x2: &[bool]) -> Result<Vec<bool>> {
    check_len(q1.len(), x1.len())?;
    check_len(q1.len(), x2.len())?;
    Ok(q1
        .iter()
        .enumerate()
        .map(|(l, q)| match q {
            Db1Query::AskX1 => x1[l],
            Db1Query::AskX2 => x2[l],
        })
        .collect())
}

pub fn round2_query(
    desired: DesiredMessage,
    q1: &[Db1Query],
    a1: &[bool],
) -> Result<Vec<Db2Query>> {
    check_len(q1.len(), a1.len())?;
    Ok(q1
        .iter()
        .zip(a1)
        .map(|(q, &a)| match (a, q, desired) {
            (true, _, _) => Db2Query::Null,
            (false, Db1Query::AskX1, DesiredMessage::First) => Db2Query::AskY1,
            (false, Db1Query::AskX1, DesiredMessage::Second) => Db2Query::AskY2,
            (false, Db1Query::AskX2, DesiredMessage::First) => Db2Query::AskY2,
            (false, Db1Query::AskX2, DesiredMessage::Second) => Db2Query::AskY1,
        })
        .collect())
}

pub fn db2_answer(q2: &[Db2Query], y1: &[bool], y2: &[bool]) -> Result<Vec<Option<bool>>> {
    check_len(q2.len(), y1.len())?;
    check_len(q2.len(), y2.len())?;
    Ok(q2
        .iter()
        .enumerate()
        .map(|(l, q)| match q {
            Db2Query::Null => None,
            Db2Query::AskY1 => Some(y1[l]),
            Db2Query::AskY2 => Some(y2[l]),
        })
        .collect())
}

/// Recovers the desired message from both rounds' queries and answers.
pub fn decode(
    desired: DesiredMessage,
    q1: &[Db1Query],
    a1: &[bool],
    a2: &[Option<bool>],
) -> Result<Vec<bool>> {
    check_len(q1.len(), a1.len())?;
    check_len(q1.len(), a2.len())?;
    let mut out = Vec::with_capacity(q1.len());
    for l in 0..q1.len() {
        let bit = if a1[l] {
            // x1 = 1 pins (1,1); x2 = 1 pins (0,0).
            q1[l] == Db1Query::AskX1
        } else {
            let y = a2[l].ok_or_else(|| {
                Error::IncompleteTranscript(format!("round-2 answer missing at position {l}"))
            })?;
            match q1[l] {
                // x1 = 0: (w1, w2) = (y1, y2), and the fetched cell is w_θ.
                Db1Query::AskX1 => y,
                // x2 = 0: (w1, w2) = (¬y2, ¬y1).
                Db1Query::AskX2 => !y,
            }
        };
        out.push(bit);
    }
    let _ = desired;
    Ok(out)
}

/// Full session over the `L`-length extension: one round-1 message to DB1
/// covering all positions, then one round-2 message to DB2.
pub fn run_session(m: &MessagePair, desired: DesiredMessage, coin: &[bool]) -> Result<Transcript> {
    let cells = derive_cells(m);
    let (q1, a1) = round1(coin, &cells)?;
    let q2 = round2_query(desired, &q1, &a1)?;
    let a2 = db2_answer(&q2, &cells.y1, &cells.y2)?;
    let decoded = decode(desired, &q1, &a1, &a2)?;
    Ok(Transcript {
        desired,
        coin: coin.to_vec(),
        u: a1.iter().map(|&a| !a).collect(),
        q1,
        a1,
        q2,
        a2,
        shared: SharedRandomness,
        decoded,
    })
}

/// One bit per position: 0 = `x1`, 1 = `x2`.
pub fn encode_db1_query(q1: &[Db1Query]) -> BitStream {
    q1.iter().map(|q| *q == Db1Query::AskX2).collect()
}

/// Two bits per position: 00 = null, 01 = `y1`, 10 = `y2`.
pub fn encode_db2_query(q2: &[Db2Query]) -> BitStream {
    q2.iter()
        .flat_map(|q| match q {
            Db2Query::Null => [false, false],
            Db2Query::AskY1 => [false, true],
            Db2Query::AskY2 => [true, false],
        })
        .collect()
}

/// What DB2 (and DB1) hold in the enumerable model of the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageLayout {
    /// DB1 keeps `(x1, x2)`, DB2 keeps `(y1, y2)`.
    Split,
    /// Both databases keep `(w1, w2)`; a negative control that breaks privacy.
    Replicated,
}

/// The multiround scheme as an enumerable object: `length` positions, message
/// bits i.i.d. with `Pr(w = 1) = bias`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiroundScheme {
    layout: StorageLayout,
    bias: Rational,
    length: usize,
}

impl MultiroundScheme {
    pub fn new(layout: StorageLayout, bias: Rational, length: usize) -> Result<Self> {
        if !(bias > Rational::zero() && bias < Rational::one()) {
            return Err(Error::InvalidParameters(format!(
                "message bias {bias} must lie in (0, 1)"
            )));
        }
        if length == 0 || length > 16 {
            return Err(Error::InvalidParameters(format!(
                "enumerable length {length} must be between 1 and 16"
            )));
        }
        Ok(Self {
            layout,
            bias,
            length,
        })
    }

    /// Uniform messages, split storage, one position.
    pub fn standard() -> Self {
        Self {
            layout: StorageLayout::Split,
            bias: Rational::new(1, 2),
            length: 1,
        }
    }

    pub fn layout(&self) -> StorageLayout {
        self.layout
    }

    pub fn bias(&self) -> Rational {
        self.bias
    }

    pub fn length(&self) -> usize {
        self.length
    }

    fn wrap(&self, items: Vec<Symbol>) -> Symbol {
        if self.length == 1 {
            items.into_iter().next().expect("length is at least one")
        } else {
            Symbol::Seq(items)
        }
    }

    fn wrap_domain(&self, d: Domain) -> Domain {
        if self.length == 1 {
            d
        } else {
            Domain::seq(d, self.length)
        }
    }

    fn bits_symbol(&self, bits: &[bool]) -> Symbol {
        self.wrap(bits.iter().map(|&b| Symbol::Bit(b)).collect())
    }

    fn stored_labels(&self, database: usize) -> [&'static str; 2] {
        match (self.layout, database) {
            (StorageLayout::Split, 0) => ["x1", "x2"],
            (StorageLayout::Split, _) => ["y1", "y2"],
            (StorageLayout::Replicated, _) => ["w1", "w2"],
        }
    }
}

impl EnumerableScheme for MultiroundScheme {
    fn info(&self) -> SchemeInfo {
        let id = match self.layout {
            StorageLayout::Split => "multiround",
            StorageLayout::Replicated => "multiround-replicated",
        };
        let id = if self.bias == Rational::new(1, 2) {
            id.to_string()
        } else {
            format!("{id}-bias-{}", self.bias)
        };
        SchemeInfo {
            id,
            params: PirParameters::new(2, 2, 1, 2).expect("fixed parameters are valid"),
            message_length: self.length,
            zero_error: false,
        }
    }

    fn state_space(&self) -> u128 {
        1u128 << (3 * self.length)
    }

    fn message_law(&self) -> Vec<(Vec<u64>, Rational)> {
        let words = 1u64 << self.length;
        let q = Rational::one() - self.bias;
        let weight = |w: u64| -> Rational {
            let ones = w.count_ones() as usize;
            let mut p = Rational::one();
            for _ in 0..ones {
                p *= self.bias;
            }
            for _ in ones..self.length {
                p *= q;
            }
            p
        };
        let mut out = Vec::with_capacity((words * words) as usize);
        for w1 in 0..words {
            for w2 in 0..words {
                out.push((vec![w1, w2], weight(w1) * weight(w2)));
            }
        }
        out
    }

    fn randomness_law(&self) -> Vec<(u64, Rational)> {
        let n = 1u64 << self.length;
        let p = Rational::new(1, i128::from(n));
        (0..n).map(|c| (c, p)).collect()
    }

    fn view_domains(&self, database: usize) -> Vec<Domain> {
        let bit = || self.wrap_domain(Domain::bits());
        let null = || Domain::of([Symbol::Null]);
        let mut d = Vec::new();
        if database == 0 {
            d.push(self.wrap_domain(Domain::of([Symbol::Label("x1"), Symbol::Label("x2")])));
            d.push(null());
        } else {
            d.push(null());
            d.push(self.wrap_domain(Domain::of([
                Symbol::Null,
                Symbol::Label("y1"),
                Symbol::Label("y2"),
            ])));
        }
        d.push(bit());
        d.push(bit());
        if database == 0 {
            d.push(bit());
            d.push(null());
        } else {
            d.push(null());
            d.push(self.wrap_domain(Domain::of([
                Symbol::Null,
                Symbol::Bit(false),
                Symbol::Bit(true),
            ])));
        }
        d
    }

    fn view_labels(&self, database: usize) -> Vec<String> {
        let n = database + 1;
        let [s1, s2] = self.stored_labels(database);
        vec![
            format!("Q{n}(1)"),
            format!("Q{n}(2)"),
            s1.to_string(),
            s2.to_string(),
            format!("A{n}(1)"),
            format!("A{n}(2)"),
        ]
    }

    fn session(
        &self,
        messages: &[u64],
        desired: DesiredMessage,
        randomness: u64,
    ) -> Result<SessionRecord> {
        check_len(2, messages.len())?;
        let len = self.length;
        let m = MessagePair::new(unpack_bits(messages[0], len), unpack_bits(messages[1], len))?;
        let coin = unpack_bits(randomness, len);
        let t = run_session(&m, desired, &coin)?;
        let cells = derive_cells(&m);

        let (s1, s2) = match self.layout {
            StorageLayout::Split => (
                vec![self.bits_symbol(&cells.x1), self.bits_symbol(&cells.x2)],
                vec![self.bits_symbol(&cells.y1), self.bits_symbol(&cells.y2)],
            ),
            StorageLayout::Replicated => {
                let w = vec![self.bits_symbol(m.w1()), self.bits_symbol(m.w2())];
                (w.clone(), w)
            }
        };
        let db1 = DatabaseRecord {
            queries: vec![
                self.wrap(t.q1.iter().map(|q| q.symbol()).collect()),
                Symbol::Null,
            ],
            stored: s1,
            answers: vec![self.bits_symbol(&t.a1), Symbol::Null],
            download_bits: len as u64,
            upload_bits: encode_db1_query(&t.q1).len() as u64,
        };
        let db2 = DatabaseRecord {
            queries: vec![
                Symbol::Null,
                self.wrap(t.q2.iter().map(|q| q.symbol()).collect()),
            ],
            stored: s2,
            answers: vec![
                Symbol::Null,
                self.wrap(
                    t.a2.iter()
                        .map(|a| a.map_or(Symbol::Null, Symbol::Bit))
                        .collect(),
                ),
            ],
            download_bits: t.a2.iter().filter(|a| a.is_some()).count() as u64,
            upload_bits: encode_db2_query(&t.q2).len() as u64,
        };
        Ok(SessionRecord {
            databases: vec![db1, db2],
            decoded: Some(pack_bits(&t.decoded)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(w1: &[u8], w2: &[u8]) -> MessagePair {
        MessagePair::new(
            w1.iter().map(|&b| b == 1).collect(),
            w2.iter().map(|&b| b == 1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cell_examples() {
        let cells = derive_cells(&pair(&[1, 0, 1, 0], &[1, 0, 0, 1]));
        assert_eq!(cells.x1, [true, false, false, false]);
        assert_eq!(cells.x2, [false, true, false, false]);
        assert_eq!(cells.y1, [false, false, true, false]);
        assert_eq!(cells.y2, [false, false, false, true]);
        assert!(cells.u.is_none());
    }

    #[test]
    fn round1_examples() {
        // (x1, x2) = (1, 0) comes from (w1, w2) = (1, 1).
        let c = derive_cells(&pair(&[1], &[1]));
        assert_eq!(
            round1(&[false], &c).unwrap(),
            (vec![Db1Query::AskX1], vec![true])
        );
        let c = derive_cells(&pair(&[0], &[0]));
        assert_eq!(
            round1(&[true], &c).unwrap(),
            (vec![Db1Query::AskX2], vec![true])
        );
        let c = derive_cells(&pair(&[1], &[0]));
        assert_eq!(
            round1(&[true], &c).unwrap(),
            (vec![Db1Query::AskX2], vec![false])
        );
        assert!(matches!(
            round1(&[true, false], &c),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn round2_examples() {
        use DesiredMessage::*;
        assert_eq!(
            round2_query(First, &[Db1Query::AskX1], &[false]).unwrap(),
            [Db2Query::AskY1]
        );
        assert_eq!(
            round2_query(Second, &[Db1Query::AskX2], &[false]).unwrap(),
            [Db2Query::AskY1]
        );
        assert_eq!(
            round2_query(First, &[Db1Query::AskX1], &[true]).unwrap(),
            [Db2Query::Null]
        );
        assert_eq!(
            round2_query(Second, &[Db1Query::AskX1], &[false]).unwrap(),
            [Db2Query::AskY2]
        );
        assert_eq!(
            round2_query(First, &[Db1Query::AskX2], &[false]).unwrap(),
            [Db2Query::AskY2]
        );
    }

    #[test]
    fn db2_answer_examples() {
        assert_eq!(
            db2_answer(&[Db2Query::AskY1], &[true], &[false]).unwrap(),
            [Some(true)]
        );
        assert_eq!(
            db2_answer(&[Db2Query::Null], &[true], &[false]).unwrap(),
            [None]
        );
        assert_eq!(
            db2_answer(&[Db2Query::AskY2], &[false], &[true]).unwrap(),
            [Some(true)]
        );
    }

    #[test]
    fn decode_examples() {
        use DesiredMessage::*;
        assert_eq!(
            decode(Second, &[Db1Query::AskX1], &[true], &[None]).unwrap(),
            [true]
        );
        assert_eq!(
            decode(First, &[Db1Query::AskX2], &[false], &[Some(true)]).unwrap(),
            [false]
        );
        assert_eq!(
            decode(First, &[Db1Query::AskX1], &[false], &[Some(true)]).unwrap(),
            [true]
        );
        assert!(matches!(
            decode(First, &[Db1Query::AskX1], &[false], &[None]),
            Err(Error::IncompleteTranscript(_))
        ));
    }

    #[test]
    fn session_traces() {
        let t = run_session(&pair(&[1], &[1]), DesiredMessage::First, &[false]).unwrap();
        assert_eq!(t.q2, [Db2Query::Null]);
        assert_eq!(t.decoded, [true]);
        assert_eq!(t.u, [false]);

        let t = run_session(&pair(&[0], &[1]), DesiredMessage::Second, &[false]).unwrap();
        assert_eq!(t.q2, [Db2Query::AskY2]);
        assert_eq!(t.a2, [Some(true)]);
        assert_eq!(t.decoded, [true]);
    }

    #[test]
    fn exhaustive_correctness_and_cell_invariants() {
        for len in 1..=3usize {
            let n = 1u64 << len;
            for w1 in 0..n {
                for w2 in 0..n {
                    let m = MessagePair::new(unpack_bits(w1, len), unpack_bits(w2, len)).unwrap();
                    for coin in 0..n {
                        let coin = unpack_bits(coin, len);
                        let cells = derive_cells_with_coin(&m, &coin).unwrap();
                        let u = cells.u.as_ref().unwrap();
                        for (l, &ul) in u.iter().enumerate() {
                            let ones = [cells.x1[l], cells.x2[l], cells.y1[l], cells.y2[l]]
                                .iter()
                                .filter(|&&b| b)
                                .count();
                            assert_eq!(ones, 1);
                            if !ul {
                                assert!(!cells.y1[l] && !cells.y2[l]);
                            }
                        }
                        for desired in DesiredMessage::ALL {
                            let t = run_session(&m, desired, &coin).unwrap();
                            assert_eq!(t.decoded, m.message(desired));
                            assert_eq!(&t.u, u);
                            for l in 0..len {
                                assert_eq!(t.a2[l].is_some(), t.q2[l] != Db2Query::Null);
                                assert_eq!(t.q2[l] == Db2Query::Null, t.a1[l]);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wire_encodings() {
        let q1 = [Db1Query::AskX1, Db1Query::AskX2];
        assert_eq!(
            encode_db1_query(&q1).iter().collect::<Vec<_>>(),
            [false, true]
        );
        let q2 = [Db2Query::Null, Db2Query::AskY1, Db2Query::AskY2];
        assert_eq!(
            encode_db2_query(&q2).iter().collect::<Vec<_>>(),
            [false, false, false, true, true, false]
        );
    }

    #[test]
    fn enumerable_model_is_consistent() {
        let s = MultiroundScheme::new(StorageLayout::Split, Rational::new(1, 2), 2).unwrap();
        let total: Rational = s.message_law().iter().map(|(_, p)| *p).sum();
        assert_eq!(total, Rational::one());
        for desired in DesiredMessage::ALL {
            for e in s.enumerate(desired, 1 << 10).unwrap() {
                assert_eq!(e.session.decoded, Some(e.messages[desired.index()]));
                for (db, rec) in e.session.databases.iter().enumerate() {
                    let view = rec.view();
                    let domains = s.view_domains(db);
                    assert_eq!(view.len(), domains.len());
                    assert!(view.iter().zip(&domains).all(|(v, d)| d.contains(v)));
                }
            }
        }
        assert!(MultiroundScheme::new(StorageLayout::Split, Rational::one(), 1).is_err());
    }
}

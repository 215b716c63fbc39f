//! Declarative single-round linear schemes for two messages.
//!
//! Message `k` bit `j` is coordinate `k * L + j` of a vector over GF(2).
//! Database `n` stores a list of linear functionals of that vector. For
//! each desired message and each value of the user's pattern coin, the query
//! to database `n` is a list of read masks over its stored coordinates; each
//! answer bit is the XOR of the masked stored bits. Messages are uniform, so
//! every entropy is a GF(2) rank.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::gf2::{self, Basis};
use crate::capacity::PirParameters;
use crate::entropy::{Domain, Rational, Symbol};
use crate::scheme::{DatabaseRecord, DesiredMessage, EnumerableScheme, SchemeInfo, SessionRecord};
use crate::{Error, Result};

const K: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeDescriptor {
    id: String,
    message_length: usize,
    /// `[database][stored index]`, functional over the `K L` message bits.
    storage: Vec<Vec<u128>>,
    /// Law of the user's pattern coin.
    patterns: Vec<Rational>,
    /// `[desired][pattern][database]`, read masks over stored indices.
    queries: Vec<Vec<Vec<Vec<u128>>>>,
}

impl SchemeDescriptor {
    pub fn new(
        id: impl Into<String>,
        message_length: usize,
        storage: Vec<Vec<u128>>,
        patterns: Vec<Rational>,
        queries: Vec<Vec<Vec<Vec<u128>>>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if message_length == 0 || K * message_length > 128 {
            return bad(format!(
                "message length {message_length} must be between 1 and 64"
            ));
        }
        if storage.is_empty() {
            return bad("a scheme needs at least one database".into());
        }
        let width = K * message_length;
        for (n, s) in storage.iter().enumerate() {
            if s.len() > 64 {
                return bad(format!("database {} stores {} > 64 bits", n + 1, s.len()));
            }
            if s.iter().any(|&f| width < 128 && f >> width != 0) {
                return bad(format!(
                    "database {} stores a functional outside the message space",
                    n + 1
                ));
            }
        }
        if patterns.is_empty() || patterns.iter().any(|p| *p <= Rational::zero()) {
            return bad("pattern law must have positive weights".into());
        }
        if patterns.iter().copied().sum::<Rational>() != Rational::one() {
            return bad("pattern law does not sum to 1".into());
        }
        if queries.len() != K || queries.iter().any(|q| q.len() != patterns.len()) {
            return bad("queries must be indexed by desired message and pattern".into());
        }
        for per_pattern in queries.iter().flatten() {
            if per_pattern.len() != storage.len() {
                return bad("each query lists one mask set per database".into());
            }
            for (n, masks) in per_pattern.iter().enumerate() {
                let stored = storage[n].len();
                if masks.len() > 64 {
                    return bad(format!("database {} returns more than 64 bits", n + 1));
                }
                if masks.iter().any(|&m| stored < 128 && m >> stored != 0) {
                    return bad(format!(
                        "read mask beyond the {stored} bits stored at database {}",
                        n + 1
                    ));
                }
            }
        }
        Ok(Self {
            id: id.into(),
            message_length,
            storage,
            patterns,
            queries,
        })
    }

    /// The rate-2/3 scheme with six stored bits per database.
    pub fn linear_scheme() -> Self {
        // Message bits: a1..a4 at 0..3, b1..b4 at 4..7.
        let (a, b) = (|i: usize| 1u128 << (i - 1), |i: usize| 1u128 << (3 + i));
        let s1 = vec![a(1), a(3), b(1), b(3), a(2) | b(2), a(4) | b(4)];
        let s2 = vec![a(2), a(4), b(2), b(4), a(3) | b(1), a(1) | b(3)];
        let db1 = [vec![1, 1 << 2, 1 << 4], vec![1 << 1, 1 << 3, 1 << 5]];
        // (a4, b2, a3+b1) and (a2, b4, a1+b3) at DB2.
        let left = vec![1 << 1, 1 << 2, 1 << 4];
        let right = vec![1, 1 << 3, 1 << 5];
        let queries = vec![
            vec![
                vec![db1[0].clone(), left.clone()],
                vec![db1[1].clone(), right.clone()],
            ],
            vec![vec![db1[0].clone(), right], vec![db1[1].clone(), left]],
        ];
        Self::new(
            "linear",
            4,
            vec![s1, s2],
            vec![Rational::new(1, 2); 2],
            queries,
        )
        .expect("table scheme is well formed")
    }

    /// The same downloads served from full copies at both databases.
    pub fn replicated_scheme() -> Self {
        Self::from_linear_answers("replicated", [true, true])
    }

    /// DB1 keeps both messages in full, DB2 keeps the six linear-scheme bits.
    pub fn asymmetric_toy() -> Self {
        Self::from_linear_answers("asymmetric-toy", [true, false])
    }

    /// Re-expresses the linear scheme's answer functionals over full copies
    /// at the databases flagged in `full`.
    fn from_linear_answers(id: &str, full: [bool; 2]) -> Self {
        let base = Self::linear_scheme();
        let identity: Vec<u128> = (0..8).map(|i| 1u128 << i).collect();
        let storage: Vec<Vec<u128>> = (0..2)
            .map(|n| {
                if full[n] {
                    identity.clone()
                } else {
                    base.storage[n].clone()
                }
            })
            .collect();
        let queries = base
            .queries
            .iter()
            .enumerate()
            .map(|(d, per_pattern)| {
                (0..per_pattern.len())
                    .map(|r| {
                        (0..2)
                            .map(|n| {
                                let answers = base.answer_functionals(d, r, n);
                                if full[n] {
                                    answers
                                } else {
                                    base.queries[d][r][n].clone()
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(id, 4, storage, base.patterns.clone(), queries)
            .expect("derived scheme is well formed")
    }

    /// Both databases keep full copies; DB1 returns both messages and DB2 is
    /// never asked. Rate 1/2.
    pub fn replicated_download_all() -> Self {
        let identity: Vec<u128> = (0..8).map(|i| 1u128 << i).collect();
        let q = vec![vec![identity.clone(), vec![]]];
        Self::new(
            "download-all",
            4,
            vec![identity.clone(), identity],
            vec![Rational::one()],
            vec![q.clone(), q],
        )
        .expect("trivial scheme is well formed")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn message_length(&self) -> usize {
        self.message_length
    }

    pub fn databases(&self) -> usize {
        self.storage.len()
    }

    pub fn patterns(&self) -> &[Rational] {
        &self.patterns
    }

    pub fn storage(&self, database: usize) -> &[u128] {
        &self.storage[database]
    }

    pub fn read_masks(&self, desired: DesiredMessage, pattern: usize, database: usize) -> &[u128] {
        &self.queries[desired.index()][pattern][database]
    }

    fn answer_functionals(&self, desired: usize, pattern: usize, database: usize) -> Vec<u128> {
        let stored = &self.storage[database];
        self.queries[desired][pattern][database]
            .iter()
            .map(|&m| {
                (0..stored.len())
                    .filter(|i| m >> i & 1 == 1)
                    .fold(0, |acc, i| acc ^ stored[i])
            })
            .collect()
    }

    /// The functionals of the message vector that database `n` returns.
    pub fn answers_as_functionals(
        &self,
        desired: DesiredMessage,
        pattern: usize,
        database: usize,
    ) -> Vec<u128> {
        self.answer_functionals(desired.index(), pattern, database)
    }

    /// `H(S_n)` in bits.
    pub fn storage_entropy(&self, database: usize) -> u32 {
        gf2::rank(&self.storage[database])
    }

    /// `H(A_n | F)` for the given desired message, in bits.
    pub fn answer_entropy(&self, desired: DesiredMessage, database: usize) -> Rational {
        self.patterns
            .iter()
            .enumerate()
            .map(|(r, p)| {
                *p * Rational::from(i128::from(gf2::rank(&self.answer_functionals(
                    desired.index(),
                    r,
                    database,
                ))))
            })
            .sum()
    }

    /// Expected entropy-coded download `Σ_n H(A_n | Q_n)`.
    pub fn expected_download(&self, desired: DesiredMessage) -> Rational {
        (0..self.databases())
            .map(|n| self.answer_entropy(desired, n))
            .sum()
    }

    /// Expected number of answer bits actually sent.
    pub fn expected_answer_bits(&self, desired: DesiredMessage) -> Rational {
        self.patterns
            .iter()
            .enumerate()
            .map(|(r, p)| {
                let bits: usize = self.queries[desired.index()][r].iter().map(Vec::len).sum();
                *p * Rational::from(bits as i128)
            })
            .sum()
    }

    /// `L / D` with `D` the larger expected download over the two messages.
    pub fn rate(&self) -> Rational {
        let d = DesiredMessage::ALL
            .iter()
            .map(|&d| self.expected_download(d))
            .max()
            .expect("two messages");
        Rational::from(self.message_length as i128) / d
    }

    /// `Σ_n H(S_n) / (K L)`.
    pub fn storage_overhead(&self) -> Rational {
        let total: i128 = (0..self.databases())
            .map(|n| i128::from(self.storage_entropy(n)))
            .sum();
        Rational::new(total, (K * self.message_length) as i128)
    }

    pub fn message_vector(&self, messages: &[u64]) -> Result<u128> {
        if messages.len() != K {
            return Err(Error::LengthMismatch {
                expected: K,
                actual: messages.len(),
            });
        }
        let l = self.message_length;
        if l < 64 && messages.iter().any(|&w| w >> l != 0) {
            return Err(Error::InvalidParameters(format!(
                "message word wider than {l} bits"
            )));
        }
        Ok(u128::from(messages[0]) | u128::from(messages[1]) << l)
    }

    pub fn stored_bits(&self, database: usize, x: u128) -> u64 {
        self.storage[database]
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &f)| acc | u64::from(gf2::parity(f & x)) << i)
    }

    /// Answer of database `n` given what it stores.
    pub fn answer(
        &self,
        desired: DesiredMessage,
        pattern: usize,
        database: usize,
        stored: u64,
    ) -> Vec<bool> {
        self.queries[desired.index()][pattern][database]
            .iter()
            .map(|&m| gf2::parity(m & u128::from(stored)))
            .collect()
    }

    /// Solves for the desired message from all databases' answers, or `None`
    /// if some desired bit is outside their span.
    pub fn decode(
        &self,
        desired: DesiredMessage,
        pattern: usize,
        answers: &[Vec<bool>],
    ) -> Option<u64> {
        let functionals: Vec<u128> = (0..self.databases())
            .flat_map(|n| self.answer_functionals(desired.index(), pattern, n))
            .collect();
        let values: Vec<bool> = answers.iter().flatten().copied().collect();
        if values.len() != functionals.len() {
            return None;
        }
        let basis = Basis::from_vectors(functionals);
        let offset = desired.index() * self.message_length;
        let mut word = 0u64;
        for j in 0..self.message_length {
            let combo = basis.express(1u128 << (offset + j))?;
            let bit = (0..values.len())
                .filter(|&i| combo >> i & 1 == 1)
                .fold(false, |acc, i| acc ^ values[i]);
            word |= u64::from(bit) << j;
        }
        Some(word)
    }

    /// Every desired bit lies in the span of the answers for every pattern.
    pub fn is_zero_error(&self) -> bool {
        DesiredMessage::ALL.iter().all(|&d| {
            (0..self.patterns.len()).all(|r| {
                let functionals: Vec<u128> = (0..self.databases())
                    .flat_map(|n| self.answer_functionals(d.index(), r, n))
                    .collect();
                let basis = Basis::from_vectors(functionals);
                (0..self.message_length).all(|j| {
                    basis
                        .express(1u128 << (d.index() * self.message_length + j))
                        .is_some()
                })
            })
        })
    }

    fn query_symbol(&self, desired: usize, pattern: usize, database: usize) -> Symbol {
        Symbol::Seq(
            self.queries[desired][pattern][database]
                .iter()
                .map(|&m| Symbol::Word(m as u64))
                .collect(),
        )
    }

    fn query_alphabet(&self, database: usize) -> BTreeSet<Symbol> {
        (0..K)
            .flat_map(|d| (0..self.patterns.len()).map(move |r| (d, r)))
            .map(|(d, r)| self.query_symbol(d, r, database))
            .collect()
    }

    fn max_answer_bits(&self, database: usize) -> usize {
        self.queries
            .iter()
            .flatten()
            .map(|q| q[database].len())
            .max()
            .unwrap_or(0)
    }

    /// Two independent copies with the database roles swapped in the second
    /// copy, so that each database holds one copy of every original
    /// database's content. Message length doubles.
    pub fn symmetrize(&self) -> Result<Self> {
        if self.databases() != 2 {
            return Err(Error::UnsupportedScheme(format!(
                "symmetrization needs two databases, {} has {}",
                self.id,
                self.databases()
            )));
        }
        let l = self.message_length;
        if 4 * l > 128 {
            return Err(Error::UnsupportedScheme(format!(
                "doubled message length {} exceeds 64",
                2 * l
            )));
        }
        // Relocate a functional of one copy into the doubled message space.
        let lift = |f: u128, copy: usize| -> u128 {
            (0..K * l).filter(|&i| f >> i & 1 == 1).fold(0, |acc, i| {
                acc | 1u128 << ((i / l) * 2 * l + copy * l + i % l)
            })
        };
        let swap = |n: usize| 1 - n;
        let storage: Vec<Vec<u128>> = (0..2)
            .map(|n| {
                let first = self.storage[n].iter().map(|&f| lift(f, 0));
                let second = self.storage[swap(n)].iter().map(|&f| lift(f, 1));
                first.chain(second).collect()
            })
            .collect();
        let r_count = self.patterns.len();
        let mut patterns = Vec::with_capacity(r_count * r_count);
        let mut queries = vec![Vec::new(); K];
        // Pattern index r = r_first + R * r_second.
        for r_second in 0..r_count {
            for r_first in 0..r_count {
                patterns.push(self.patterns[r_first] * self.patterns[r_second]);
                for (d, q) in queries.iter_mut().enumerate() {
                    q.push(
                        (0..2)
                            .map(|n| {
                                let shift = self.storage[n].len();
                                let mut masks = self.queries[d][r_first][n].clone();
                                masks.extend(
                                    self.queries[d][r_second][swap(n)]
                                        .iter()
                                        .map(|&m| m << shift),
                                );
                                masks
                            })
                            .collect(),
                    );
                }
            }
        }
        Self::new(
            format!("{}-symmetrized", self.id),
            2 * l,
            storage,
            patterns,
            queries,
        )
    }
}

impl EnumerableScheme for SchemeDescriptor {
    fn info(&self) -> SchemeInfo {
        SchemeInfo {
            id: self.id.clone(),
            params: PirParameters::new(K as u32, self.databases() as u32, 1, 1)
                .expect("valid parameters"),
            message_length: self.message_length,
            zero_error: self.is_zero_error(),
        }
    }

    fn state_space(&self) -> u128 {
        let bits = K * self.message_length;
        if bits >= 120 {
            return u128::MAX;
        }
        (1u128 << bits) * self.patterns.len() as u128
    }

    fn message_law(&self) -> Vec<(Vec<u64>, Rational)> {
        let l = self.message_length;
        assert!(
            2 * l < 40,
            "message law of {l}-bit messages is too large to list"
        );
        let words = 1u64 << l;
        let p = Rational::new(1, 1i128 << (2 * l));
        (0..words)
            .flat_map(|w1| (0..words).map(move |w2| (vec![w1, w2], p)))
            .collect()
    }

    fn randomness_law(&self) -> Vec<(u64, Rational)> {
        self.patterns
            .iter()
            .enumerate()
            .map(|(r, p)| (r as u64, *p))
            .collect()
    }

    fn view_domains(&self, database: usize) -> Vec<Domain> {
        vec![
            Domain::Symbols(self.query_alphabet(database)),
            Domain::words(self.storage[database].len() as u32),
            Domain::words(self.max_answer_bits(database) as u32),
        ]
    }

    fn view_labels(&self, database: usize) -> Vec<String> {
        let n = database + 1;
        vec![format!("Q{n}"), format!("S{n}"), format!("A{n}")]
    }

    fn session(
        &self,
        messages: &[u64],
        desired: DesiredMessage,
        randomness: u64,
    ) -> Result<SessionRecord> {
        let r = randomness as usize;
        if r >= self.patterns.len() {
            return Err(Error::InvalidParameters(format!(
                "pattern {r} out of range"
            )));
        }
        let x = self.message_vector(messages)?;
        let mut answers = Vec::with_capacity(self.databases());
        let mut databases = Vec::with_capacity(self.databases());
        for n in 0..self.databases() {
            let stored = self.stored_bits(n, x);
            let a = self.answer(desired, r, n, stored);
            let alphabet = self.query_alphabet(n).len() as u64;
            databases.push(DatabaseRecord {
                queries: vec![self.query_symbol(desired.index(), r, n)],
                stored: vec![Symbol::Word(stored)],
                answers: vec![Symbol::Word(crate::scheme::pack_bits(&a))],
                download_bits: a.len() as u64,
                upload_bits: u64::from(alphabet.next_power_of_two().trailing_zeros()),
            });
            answers.push(a);
        }
        Ok(SessionRecord {
            databases,
            decoded: self.decode(desired, r, &answers),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::table::{linear_retrieve, LinearMessages, PatternChoice};
    use crate::scheme::unpack_bits;

    #[test]
    fn linear_scheme_numbers() {
        let s = SchemeDescriptor::linear_scheme();
        assert_eq!(s.storage_entropy(0), 6);
        assert_eq!(s.storage_entropy(1), 6);
        assert_eq!(s.rate(), Rational::new(2, 3));
        assert_eq!(s.storage_overhead(), Rational::new(3, 2));
        assert!(s.is_zero_error());
        for d in DesiredMessage::ALL {
            assert_eq!(s.expected_answer_bits(d), Rational::from(6));
        }
    }

    #[test]
    fn descriptor_agrees_with_table() {
        let s = SchemeDescriptor::linear_scheme();
        for w in 0u64..256 {
            let (w1, w2) = (w & 15, w >> 4);
            let m = LinearMessages::new(&unpack_bits(w1, 4), &unpack_bits(w2, 4)).unwrap();
            for d in DesiredMessage::ALL {
                for (r, p) in PatternChoice::ALL.into_iter().enumerate() {
                    let table = linear_retrieve(d, p, &m);
                    let rec = s.session(&[w1, w2], d, r as u64).unwrap();
                    let a1 = crate::scheme::pack_bits(&table.db1);
                    let a2 = crate::scheme::pack_bits(&table.db2);
                    assert_eq!(rec.databases[0].answers, [Symbol::Word(a1)]);
                    assert_eq!(rec.databases[1].answers, [Symbol::Word(a2)]);
                    assert_eq!(rec.decoded, Some([w1, w2][d.index()]));
                }
            }
        }
    }

    #[test]
    fn baselines() {
        let r = SchemeDescriptor::replicated_scheme();
        assert_eq!(r.storage_overhead(), Rational::from(2));
        assert_eq!(r.rate(), Rational::new(2, 3));
        assert!(r.is_zero_error());
        let all = SchemeDescriptor::replicated_download_all();
        assert_eq!(all.rate(), Rational::new(1, 2));
        assert!(all.is_zero_error());
        let toy = SchemeDescriptor::asymmetric_toy();
        assert_eq!((toy.storage_entropy(0), toy.storage_entropy(1)), (8, 6));
        assert_eq!(toy.storage_overhead(), Rational::new(7, 4));
        assert_eq!(toy.rate(), Rational::new(2, 3));
    }

    #[test]
    fn symmetrization_balances_storage() {
        let toy = SchemeDescriptor::asymmetric_toy();
        let sym = toy.symmetrize().unwrap();
        assert_eq!(sym.message_length(), 8);
        assert_eq!((sym.storage_entropy(0), sym.storage_entropy(1)), (14, 14));
        assert_eq!(sym.rate(), toy.rate());
        assert_eq!(sym.storage_overhead(), toy.storage_overhead());
        for d in DesiredMessage::ALL {
            assert_eq!(sym.answer_entropy(d, 0), sym.answer_entropy(d, 1));
        }
        assert!(sym.is_zero_error());

        let twice = sym.symmetrize().unwrap();
        assert_eq!(twice.message_length(), 16);
        assert_eq!(twice.storage_entropy(0), twice.storage_entropy(1));
        assert_eq!(twice.rate(), toy.rate());
        assert_eq!(twice.storage_overhead(), toy.storage_overhead());

        let lin = SchemeDescriptor::linear_scheme().symmetrize().unwrap();
        assert_eq!(lin.storage_overhead(), Rational::new(3, 2));
        assert_eq!(lin.rate(), Rational::new(2, 3));
    }

    #[test]
    fn malformed_descriptors_are_rejected() {
        let p = vec![Rational::one()];
        let q = |m: u128| vec![vec![vec![vec![m]]]; 2];
        assert!(SchemeDescriptor::new("x", 1, vec![vec![1]], p.clone(), q(1)).is_ok());
        assert!(SchemeDescriptor::new("x", 1, vec![vec![1 << 2]], p.clone(), q(1)).is_err());
        assert!(SchemeDescriptor::new("x", 1, vec![vec![1]], p.clone(), q(2)).is_err());
        assert!(
            SchemeDescriptor::new("x", 1, vec![vec![1]], vec![Rational::new(1, 2)], q(1)).is_err()
        );
        assert!(SchemeDescriptor::new("x", 0, vec![vec![1]], p, q(1)).is_err());
    }
}

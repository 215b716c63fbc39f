//! Exact finite probability distributions and information measures.
//!
//! Probabilities are exact rationals everywhere. Floating point only shows up
//! when a logarithm has to be evaluated, and even that can be avoided: the
//! `*_exact` functions return a [`LogSum`], a rational combination of
//! `log2(prime)` terms, so identities such as `H(1/4,3/4) + 3/4 H(1/3,2/3) = 3/2`
//! hold with equality instead of within a tolerance.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Exact probability / weight.
pub type Rational = num_rational::Ratio<i128>;

/// One coordinate value of an [`Outcome`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// No query was sent / no answer was returned.
    Null,
    Bit(bool),
    /// A named query, e.g. the request for cell `"y1"`.
    Label(&'static str),
    /// A packed bit word (stored contents, multi-bit answers, message values).
    Word(u64),
    /// Position-wise sequence, used for length-`L` extensions.
    Seq(Vec<Symbol>),
}

impl Symbol {
    pub fn bit(value: bool) -> Self {
        Symbol::Bit(value)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Null => write!(f, "∅"),
            Symbol::Bit(b) => write!(f, "{}", u8::from(*b)),
            Symbol::Label(l) => write!(f, "\"{l}\""),
            Symbol::Word(w) => write!(f, "{w:#x}"),
            Symbol::Seq(items) => {
                write!(f, "[")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// One realization of the random tuple a distribution is defined over.
pub type Outcome = Vec<Symbol>;

/// Declared alphabet of one coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Symbols(BTreeSet<Symbol>),
    /// `Symbol::Word(v)` with `v < 2^bits`.
    Words {
        bits: u32,
    },
    /// `Symbol::Seq` of exactly `len` elements from `element`.
    Seq {
        element: Box<Domain>,
        len: usize,
    },
}

impl Domain {
    pub fn of<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        Domain::Symbols(symbols.into_iter().collect())
    }

    pub fn bits() -> Self {
        Domain::of([Symbol::Bit(false), Symbol::Bit(true)])
    }

    pub fn words(bits: u32) -> Self {
        Domain::Words { bits }
    }

    pub fn seq(element: Domain, len: usize) -> Self {
        Domain::Seq {
            element: Box::new(element),
            len,
        }
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        match (self, symbol) {
            (Domain::Symbols(set), s) => set.contains(s),
            (Domain::Words { bits }, Symbol::Word(v)) => *bits >= 64 || *v >> bits == 0,
            (Domain::Seq { element, len }, Symbol::Seq(items)) => {
                items.len() == *len && items.iter().all(|s| element.contains(s))
            }
            _ => false,
        }
    }
}

/// Probability mass function over finite outcome tuples with exact weights.
///
/// Weights are strictly positive and sum to exactly one. The per-coordinate
/// alphabets are part of the value: two distributions are only comparable when
/// they were declared over the same alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist {
    domains: Vec<Domain>,
    weights: BTreeMap<Outcome, Rational>,
}

impl ExactDist {
    /// Builds a distribution, merging repeated outcomes and dropping zero weights.
    pub fn new<I>(domains: Vec<Domain>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, Rational)>,
    {
        let mut builder = DistBuilder::new(domains);
        for (outcome, weight) in entries {
            builder.add(outcome, weight)?;
        }
        builder.finish()
    }

    /// Uniform law over the given (distinct) outcomes.
    pub fn uniform(domains: Vec<Domain>, outcomes: Vec<Outcome>) -> Result<Self> {
        let n = i128::try_from(outcomes.len())
            .map_err(|_| Error::InvalidDistribution("support too large".into()))?;
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let w = Rational::new(1, n);
        Self::new(domains, outcomes.into_iter().map(|o| (o, w)))
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Probability of `outcome`; zero for anything outside the support.
    pub fn prob(&self, outcome: &[Symbol]) -> Rational {
        self.weights
            .get(outcome)
            .copied()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.weights.iter()
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &c in coords {
            if c >= self.arity() {
                return Err(Error::InvalidCoordinate {
                    index: c,
                    arity: self.arity(),
                });
            }
            if !seen.insert(c) {
                return Err(Error::DuplicateCoordinate(c));
            }
        }
        Ok(())
    }

    fn complement(&self, coords: &[usize]) -> Vec<usize> {
        (0..self.arity()).filter(|c| !coords.contains(c)).collect()
    }
}

/// Incremental constructor used by the enumerators.
#[derive(Debug)]
pub struct DistBuilder {
    domains: Vec<Domain>,
    weights: BTreeMap<Outcome, Rational>,
}

impl DistBuilder {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self {
            domains,
            weights: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, outcome: Outcome, weight: Rational) -> Result<()> {
        if weight.is_negative() {
            return Err(Error::InvalidDistribution(format!(
                "negative weight {weight}"
            )));
        }
        if outcome.len() != self.domains.len() {
            return Err(Error::InvalidDistribution(format!(
                "outcome arity {} does not match {} declared coordinates",
                outcome.len(),
                self.domains.len()
            )));
        }
        for (i, (s, d)) in outcome.iter().zip(&self.domains).enumerate() {
            if !d.contains(s) {
                return Err(Error::InvalidDistribution(format!(
                    "symbol {s} outside the alphabet of coordinate {i}"
                )));
            }
        }
        if weight.is_zero() {
            return Ok(());
        }
        *self.weights.entry(outcome).or_insert_with(Rational::zero) += weight;
        Ok(())
    }

    pub fn finish(self) -> Result<ExactDist> {
        let total: Rational = self.weights.values().copied().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(ExactDist {
            domains: self.domains,
            weights: self.weights,
        })
    }
}

/// Marginal law of the given coordinates, in the given order.
pub fn marginal(joint: &ExactDist, coords: &[usize]) -> Result<ExactDist> {
    joint.check_coords(coords)?;
    let mut weights: BTreeMap<Outcome, Rational> = BTreeMap::new();
    for (outcome, w) in &joint.weights {
        let projected: Outcome = coords.iter().map(|&c| outcome[c].clone()).collect();
        *weights.entry(projected).or_insert_with(Rational::zero) += *w;
    }
    Ok(ExactDist {
        domains: coords.iter().map(|&c| joint.domains[c].clone()).collect(),
        weights,
    })
}

fn plogp_sum<'a>(probs: impl Iterator<Item = &'a Rational>) -> f64 {
    probs
        .map(|p| {
            let p = p.to_f64().unwrap_or(0.0);
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum()
}

/// Shannon entropy in bits.
pub fn entropy(d: &ExactDist) -> f64 {
    plogp_sum(d.weights.values())
}

/// `H(rest | condition)` computed as `Σ_c p(c) H(rest | c)`.
pub fn conditional_entropy(joint: &ExactDist, condition: &[usize]) -> Result<f64> {
    joint.check_coords(condition)?;
    let rest = joint.complement(condition);
    let mut groups: BTreeMap<Outcome, BTreeMap<Outcome, Rational>> = BTreeMap::new();
    for (outcome, w) in &joint.weights {
        let key: Outcome = condition.iter().map(|&c| outcome[c].clone()).collect();
        let val: Outcome = rest.iter().map(|&c| outcome[c].clone()).collect();
        *groups
            .entry(key)
            .or_default()
            .entry(val)
            .or_insert_with(Rational::zero) += *w;
    }
    let mut total = 0.0;
    for inner in groups.values() {
        let pc: Rational = inner.values().copied().sum();
        let conditional: Vec<Rational> = inner.values().map(|w| w / pc).collect();
        total += pc.to_f64().unwrap_or(0.0) * plogp_sum(conditional.iter());
    }
    Ok(total)
}

fn check_disjoint(a: &[usize], b: &[usize]) -> Result<()> {
    if let Some(&c) = a.iter().find(|c| b.contains(c)) {
        return Err(Error::OverlappingCoordinates(c));
    }
    Ok(())
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `I(A;B) = H(A) + H(B) - H(A,B)`.
pub fn mutual_information(joint: &ExactDist, a: &[usize], b: &[usize]) -> Result<f64> {
    check_disjoint(a, b)?;
    let ha = entropy(&marginal(joint, a)?);
    let hb = entropy(&marginal(joint, b)?);
    let hab = entropy(&marginal(joint, &concat(&[a, b]))?);
    Ok(ha + hb - hab)
}

/// `I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
pub fn conditional_mutual_information(
    joint: &ExactDist,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    check_disjoint(a, b)?;
    check_disjoint(a, c)?;
    check_disjoint(b, c)?;
    let h = |coords: Vec<usize>| -> Result<f64> { Ok(entropy(&marginal(joint, &coords)?)) };
    Ok(h(concat(&[a, c]))? + h(concat(&[b, c]))? - h(concat(&[a, b, c]))? - h(c.to_vec())?)
}

/// Total variation distance `½ Σ |p1 - p2|`, exact.
pub fn total_variation(d1: &ExactDist, d2: &ExactDist) -> Result<Rational> {
    if d1.domains != d2.domains {
        return Err(Error::AlphabetMismatch);
    }
    let mut sum = Rational::zero();
    for (o, p1) in &d1.weights {
        sum += (p1 - d2.prob(o)).abs();
    }
    for (o, p2) in &d2.weights {
        if !d1.weights.contains_key(o) {
            sum += *p2;
        }
    }
    Ok(sum / Rational::from_integer(2))
}

/// Exact value `r + Σ_p c_p · log2(p)` over odd primes `p`, rational `r`, `c_p`.
///
/// Entropies of distributions with rational weights always have this form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogSum {
    rational: Rational,
    logs: BTreeMap<u64, Rational>,
}

impl LogSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        Self {
            rational: r,
            logs: BTreeMap::new(),
        }
    }

    /// `coeff · log2(prime)`; `prime` must be an odd prime.
    pub fn log2_prime(prime: u64, coeff: Rational) -> Self {
        let mut s = Self::zero();
        s.add_log(prime, coeff);
        s
    }

    fn add_log(&mut self, prime: u64, coeff: Rational) {
        if prime == 2 {
            self.rational += coeff;
            return;
        }
        let entry = self.logs.entry(prime).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.logs.remove(&prime);
        }
    }

    /// The value, if no irrational `log2` terms survive.
    pub fn as_rational(&self) -> Option<Rational> {
        self.logs.is_empty().then_some(self.rational)
    }

    pub fn rational_part(&self) -> Rational {
        self.rational
    }

    pub fn log_coefficient(&self, prime: u64) -> Rational {
        self.logs
            .get(&prime)
            .copied()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.rational.to_f64().unwrap_or(f64::NAN);
        for (p, c) in &self.logs {
            v += c.to_f64().unwrap_or(f64::NAN) * (*p as f64).log2();
        }
        v
    }

    pub fn scale(&self, k: Rational) -> Self {
        let mut out = Self::from_rational(self.rational * k);
        for (p, c) in &self.logs {
            out.add_log(*p, c * k);
        }
        out
    }

    /// Sign of the exact value; falls back to the float value only when
    /// irrational terms remain (log2 of distinct primes are linearly
    /// independent over the rationals, so the float is never exactly 0 then).
    pub fn cmp_zero(&self) -> std::cmp::Ordering {
        match self.as_rational() {
            Some(r) => r.cmp(&Rational::zero()),
            None => self
                .to_f64()
                .partial_cmp(&0.0)
                .unwrap_or(std::cmp::Ordering::Equal),
        }
    }
}

impl Add for LogSum {
    type Output = LogSum;
    fn add(mut self, rhs: LogSum) -> LogSum {
        self.rational += rhs.rational;
        for (p, c) in rhs.logs {
            self.add_log(p, c);
        }
        self
    }
}

impl Neg for LogSum {
    type Output = LogSum;
    fn neg(self) -> LogSum {
        self.scale(-Rational::one())
    }
}

impl Sub for LogSum {
    type Output = LogSum;
    fn sub(self, rhs: LogSum) -> LogSum {
        self + (-rhs)
    }
}

impl fmt::Display for LogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.rational.is_zero() || self.logs.is_empty() {
            write!(f, "{}", self.rational)?;
            wrote = true;
        }
        for (p, c) in &self.logs {
            if wrote {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
                write!(f, "{}·log2({p})", c.abs())?;
            } else {
                write!(f, "{c}·log2({p})")?;
            }
            wrote = true;
        }
        Ok(())
    }
}

impl Serialize for LogSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn factorize(mut n: i128, cache: &mut HashMap<i128, Vec<(u64, i128)>>) -> Vec<(u64, i128)> {
    debug_assert!(n > 0);
    if let Some(f) = cache.get(&n) {
        return f.clone();
    }
    let key = n;
    let mut out = Vec::new();
    let mut p: i128 = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    cache.insert(key, out.clone());
    out
}

/// Exact entropy `Σ p (log2 q - log2 n)` for `p = n/q`.
pub fn entropy_exact(d: &ExactDist) -> LogSum {
    let mut out = LogSum::zero();
    let mut cache = HashMap::new();
    for p in d.weights.values() {
        for (prime, e) in factorize(*p.denom(), &mut cache) {
            out.add_log(prime, p * Rational::from_integer(e));
        }
        for (prime, e) in factorize(*p.numer(), &mut cache) {
            out.add_log(prime, -p * Rational::from_integer(e));
        }
    }
    out
}

/// Exact `H(rest | condition) = H(all) - H(condition)`.
pub fn conditional_entropy_exact(joint: &ExactDist, condition: &[usize]) -> Result<LogSum> {
    joint.check_coords(condition)?;
    Ok(entropy_exact(joint) - entropy_exact(&marginal(joint, condition)?))
}

/// Exact `H(A | C)` where `A` and `C` are coordinate subsets (other coordinates
/// are marginalized out).
pub fn entropy_given_exact(joint: &ExactDist, a: &[usize], c: &[usize]) -> Result<LogSum> {
    check_disjoint(a, c)?;
    let ac = marginal(joint, &concat(&[a, c]))?;
    Ok(entropy_exact(&ac) - entropy_exact(&marginal(joint, c)?))
}

/// Exact `I(A;B|C)`; pass an empty `c` for plain mutual information.
pub fn mutual_information_exact(
    joint: &ExactDist,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<LogSum> {
    check_disjoint(a, b)?;
    check_disjoint(a, c)?;
    check_disjoint(b, c)?;
    let h =
        |coords: Vec<usize>| -> Result<LogSum> { Ok(entropy_exact(&marginal(joint, &coords)?)) };
    Ok(h(concat(&[a, c]))? + h(concat(&[b, c]))? - h(concat(&[a, b, c]))? - h(c.to_vec())?)
}

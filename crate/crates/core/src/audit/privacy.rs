//! Exact privacy and correctness checks by exhaustive enumeration.

use num_traits::Zero;
use serde::Serialize;

use super::json::Exact;
use crate::entropy::{total_variation, DistBuilder, ExactDist};
use crate::scheme::{DesiredMessage, EnumerableScheme};
use crate::{Result, Verdict};

/// Exact joint law of everything one database observes when the user wants
/// `desired`: its queries, stored content and answers.
#[derive(Clone, Debug)]
pub struct PrivacyView {
    pub database: usize,
    pub desired: DesiredMessage,
    pub labels: Vec<String>,
    pub joint: ExactDist,
}

pub fn enumerate_view<S: EnumerableScheme + ?Sized>(
    s: &S,
    desired: DesiredMessage,
    database: usize,
    limit: u128,
) -> Result<PrivacyView> {
    let mut b = DistBuilder::new(s.view_domains(database));
    for e in s.enumerate(desired, limit)? {
        b.add(e.session.databases[database].view(), e.probability)?;
    }
    Ok(PrivacyView {
        database,
        desired,
        labels: s.view_labels(database),
        joint: b.finish()?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DatabasePrivacy {
    /// One-based database index.
    pub database: usize,
    /// Largest total variation over pairs of desired indices.
    pub total_variation: Exact,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrivacyCheck {
    pub databases: Vec<DatabasePrivacy>,
    pub verdict: Verdict,
}

/// Passes iff every database's view has the same law for both desired
/// messages, i.e. the total variation is exactly zero.
pub fn check_privacy<S: EnumerableScheme + ?Sized>(s: &S, limit: u128) -> Result<PrivacyCheck> {
    let n = s.info().params.databases() as usize;
    let mut databases = Vec::with_capacity(n);
    for db in 0..n {
        let one = enumerate_view(s, DesiredMessage::First, db, limit)?;
        let two = enumerate_view(s, DesiredMessage::Second, db, limit)?;
        let tv = total_variation(&one.joint, &two.joint)?;
        databases.push(DatabasePrivacy {
            database: db + 1,
            total_variation: Exact(tv),
            verdict: Verdict::from_bool(tv.is_zero()),
        });
    }
    let verdict = Verdict::all(databases.iter().map(|d| d.verdict));
    Ok(PrivacyCheck { databases, verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectnessCheck {
    pub sessions: u64,
    pub errors: u64,
    pub verdict: Verdict,
}

/// Runs every (messages, randomness, desired) combination and compares the
/// decoder output with the desired message.
pub fn check_correctness<S: EnumerableScheme + ?Sized>(
    s: &S,
    limit: u128,
) -> Result<CorrectnessCheck> {
    let (mut sessions, mut errors) = (0u64, 0u64);
    for desired in DesiredMessage::ALL {
        for e in s.enumerate(desired, limit)? {
            sessions += 1;
            if e.session.decoded != Some(e.messages[desired.index()]) {
                errors += 1;
            }
        }
    }
    Ok(CorrectnessCheck {
        sessions,
        errors,
        verdict: Verdict::from_bool(errors == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{marginal, Rational, Symbol};
    use crate::linear::SchemeDescriptor;
    use crate::multiround::{MultiroundScheme, StorageLayout};
    use crate::scheme::DEFAULT_EXHAUSTION_LIMIT;

    #[test]
    fn db2_table_of_the_multiround_scheme() {
        let s = MultiroundScheme::standard();
        for desired in DesiredMessage::ALL {
            let view = enumerate_view(&s, desired, 1, DEFAULT_EXHAUSTION_LIMIT).unwrap();
            let table = marginal(&view.joint, &[1, 2, 3]).unwrap();
            assert_eq!(table.support_len(), 7);
            let (f, t) = (Symbol::Bit(false), Symbol::Bit(true));
            let q = |l: &'static str| Symbol::Label(l);
            assert_eq!(
                table.prob(&[Symbol::Null, f.clone(), f.clone()]),
                Rational::new(1, 4)
            );
            for row in [
                [q("y1"), f.clone(), f.clone()],
                [q("y1"), t.clone(), f.clone()],
                [q("y1"), f.clone(), t.clone()],
                [q("y2"), f.clone(), f.clone()],
                [q("y2"), t.clone(), f.clone()],
                [q("y2"), f.clone(), t.clone()],
            ] {
                assert_eq!(table.prob(&row), Rational::new(1, 8), "{row:?}");
            }
        }
    }

    #[test]
    fn privacy_verdicts() {
        let lim = DEFAULT_EXHAUSTION_LIMIT;
        let ok = check_privacy(&MultiroundScheme::standard(), lim).unwrap();
        assert_eq!(ok.verdict, Verdict::Pass);
        assert!(ok.databases.iter().all(|d| d.total_variation.0.is_zero()));

        let replicated =
            MultiroundScheme::new(StorageLayout::Replicated, Rational::new(1, 2), 1).unwrap();
        let bad = check_privacy(&replicated, lim).unwrap();
        assert_eq!(bad.databases[0].total_variation.0, Rational::zero());
        assert_eq!(bad.databases[1].total_variation.0, Rational::new(1, 4));

        let biased = MultiroundScheme::new(StorageLayout::Split, Rational::new(3, 4), 1).unwrap();
        let bad = check_privacy(&biased, lim).unwrap();
        assert_eq!(bad.databases[0].total_variation.0, Rational::zero());
        assert_eq!(bad.databases[1].total_variation.0, Rational::new(1, 4));

        let linear = check_privacy(&SchemeDescriptor::linear_scheme(), lim).unwrap();
        assert_eq!(linear.verdict, Verdict::Pass);
    }

    #[test]
    fn correctness_and_limits() {
        let c = check_correctness(&SchemeDescriptor::linear_scheme(), DEFAULT_EXHAUSTION_LIMIT)
            .unwrap();
        assert_eq!((c.sessions, c.errors), (1024, 0));
        assert!(check_correctness(&SchemeDescriptor::linear_scheme(), 100).is_err());
    }
}

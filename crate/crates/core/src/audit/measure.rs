//! Ideal-accounting rate and storage overhead, computed exactly.
//!
//! The ideal download of database `n` is `H(A_n | Q_n)`: the answer stream
//! entropy-coded with the query known at both ends. The ideal storage of
//! database `n` is `H(S_n | Q_n)`, which is `H(S_n)` when the query is
//! independent of the stored content and the Slepian-Wolf rate when the
//! query carries decoder side information.
//!
//! Linear descriptors are measured by GF(2) rank, which equals the entropy
//! under uniform messages; other schemes are enumerated.

use num_traits::Zero;
use serde::Serialize;

use super::json::{Exact, ExactReal, Real};
use super::privacy::enumerate_view;
use crate::capacity::{check_rate_admissible, mtpir_capacity, storage_overhead_exact};
use crate::entropy::{entropy_given_exact, LogSum, Rational};
use crate::scheme::{DesiredMessage, EnumerableScheme, Scheme};
use crate::{Error, Result, Verdict};

struct ViewLayout {
    queries: Vec<usize>,
    stored: Vec<usize>,
    answers: Vec<usize>,
}

fn layout<S: EnumerableScheme + ?Sized>(s: &S, database: usize) -> ViewLayout {
    let rounds = s.info().params.rounds() as usize;
    let arity = s.view_domains(database).len();
    ViewLayout {
        queries: (0..rounds).collect(),
        stored: (rounds..arity - rounds).collect(),
        answers: (arity - rounds..arity).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealRate {
    /// Expected coded download per desired bit, `Σ_n H(A_n | Q_n) / L`,
    /// for the worse of the two desired messages.
    pub download_per_symbol: ExactReal,
    pub rate: Real,
    /// Present when the download is rational.
    pub rate_exact: Option<Exact>,
    /// Expected number of uncoded answer symbols per block.
    pub symbol_download_per_block: Exact,
    /// Expected query bits per block, informational.
    pub upload_per_block: Exact,
    pub capacity: Exact,
    /// `rate <= capacity`.
    pub admissible: Verdict,
}

fn ideal_download_enumerated<S: EnumerableScheme + ?Sized>(
    s: &S,
    desired: DesiredMessage,
    limit: u128,
) -> Result<LogSum> {
    let n = s.info().params.databases() as usize;
    let mut total = LogSum::zero();
    for db in 0..n {
        let view = enumerate_view(s, desired, db, limit)?;
        let l = layout(s, db);
        total = total + entropy_given_exact(&view.joint, &l.answers, &l.queries)?;
    }
    Ok(total)
}

fn ideal_download(s: &Scheme, desired: DesiredMessage, limit: u128) -> Result<LogSum> {
    match s {
        Scheme::Linear(d) => Ok(LogSum::from_rational(d.expected_download(desired))),
        _ => ideal_download_enumerated(s, desired, limit),
    }
}

fn expected_symbols(
    s: &Scheme,
    desired: DesiredMessage,
    limit: u128,
) -> Result<(Rational, Rational)> {
    if let Scheme::Linear(d) = s {
        // Query alphabets are fixed, so upload does not depend on the pattern.
        let upload: u64 = s.session(&[0, 0], desired, 0)?.upload_bits();
        return Ok((
            d.expected_answer_bits(desired),
            Rational::from(upload as i128),
        ));
    }
    let mut down = Rational::zero();
    let mut up = Rational::zero();
    for e in s.enumerate(desired, limit)? {
        down += e.probability * Rational::from(e.session.download_bits() as i128);
        up += e.probability * Rational::from(e.session.upload_bits() as i128);
    }
    Ok((down, up))
}

pub fn measure_rate_ideal(s: &Scheme, limit: u128) -> Result<IdealRate> {
    let info = s.info();
    let l = Rational::from(info.message_length as i128);
    let mut worst: Option<(LogSum, Rational, Rational)> = None;
    for desired in DesiredMessage::ALL {
        let d = ideal_download(s, desired, limit)?;
        let (symbols, upload) = expected_symbols(s, desired, limit)?;
        let replace = match &worst {
            None => true,
            Some((w, _, _)) => (d.clone() - w.clone()).cmp_zero().is_gt(),
        };
        if replace {
            worst = Some((d, symbols, upload));
        }
    }
    let (download, symbols, upload) = worst.expect("two desired messages");
    if download.cmp_zero().is_le() {
        return Err(Error::NotDecodable(format!(
            "{} downloads nothing",
            info.id
        )));
    }
    let per_symbol = download.scale(l.recip());
    let rate_exact = per_symbol.as_rational().map(|d| d.recip());
    let rate = 1.0 / per_symbol.to_f64();
    let capacity = mtpir_capacity(&info.params);
    let admissible = match rate_exact {
        Some(r) => check_rate_admissible(r, &info.params),
        None => {
            // Irrational download: compare exactly via L/C - D >= 0.
            let slack = LogSum::from_rational(l / capacity) - download;
            Verdict::from_bool(!slack.cmp_zero().is_lt())
        }
    };
    Ok(IdealRate {
        download_per_symbol: per_symbol.into(),
        rate: Real(rate),
        rate_exact: rate_exact.map(Exact),
        symbol_download_per_block: Exact(symbols),
        upload_per_block: Exact(upload),
        capacity: Exact(capacity),
        admissible,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealOverhead {
    /// `H(S_n | Q_n)` per block, one entry per database.
    pub per_database: Vec<ExactReal>,
    pub alpha: ExactReal,
}

pub fn measure_overhead_ideal(s: &Scheme, limit: u128) -> Result<IdealOverhead> {
    let info = s.info();
    let n = info.params.databases() as usize;
    let per_database: Vec<LogSum> = match s {
        Scheme::Linear(d) => (0..n)
            .map(|db| LogSum::from_rational(Rational::from(i128::from(d.storage_entropy(db)))))
            .collect(),
        _ => (0..n)
            .map(|db| {
                let view = enumerate_view(s, DesiredMessage::First, db, limit)?;
                let l = layout(s, db);
                entropy_given_exact(&view.joint, &l.stored, &l.queries)
            })
            .collect::<Result<_>>()?,
    };
    let alpha = storage_overhead_exact(
        &per_database,
        info.message_length as u64,
        info.params.messages(),
    )?;
    Ok(IdealOverhead {
        per_database: per_database.into_iter().map(ExactReal::from).collect(),
        alpha: alpha.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::SchemeDescriptor;
    use crate::multiround::MultiroundScheme;
    use crate::scheme::DEFAULT_EXHAUSTION_LIMIT;

    const LIM: u128 = DEFAULT_EXHAUSTION_LIMIT;

    #[test]
    fn multiround_ideal_numbers() {
        let s = Scheme::Multiround(MultiroundScheme::standard());
        let r = measure_rate_ideal(&s, LIM).unwrap();
        assert_eq!(
            r.download_per_symbol.exact.as_rational(),
            Some(Rational::new(3, 2))
        );
        assert_eq!(r.rate_exact, Some(Exact(Rational::new(2, 3))));
        assert_eq!(r.symbol_download_per_block, Exact(Rational::new(7, 4)));
        assert_eq!(r.admissible, Verdict::Pass);

        let o = measure_overhead_ideal(&s, LIM).unwrap();
        assert_eq!(
            o.per_database[0].exact.as_rational(),
            Some(Rational::new(3, 2))
        );
        assert_eq!(o.per_database[1].exact.rational_part(), Rational::zero());
        assert_eq!(
            o.per_database[1].exact.log_coefficient(3),
            Rational::new(3, 4)
        );
        assert_eq!(o.alpha.exact.rational_part(), Rational::new(3, 4));
        assert_eq!(o.alpha.exact.log_coefficient(3), Rational::new(3, 8));
    }

    #[test]
    fn linear_ideal_numbers() {
        let s = Scheme::Linear(SchemeDescriptor::linear_scheme());
        let r = measure_rate_ideal(&s, LIM).unwrap();
        assert_eq!(r.rate_exact, Some(Exact(Rational::new(2, 3))));
        assert_eq!(r.symbol_download_per_block, Exact(Rational::from(6)));
        let o = measure_overhead_ideal(&s, LIM).unwrap();
        assert_eq!(o.alpha.exact.as_rational(), Some(Rational::new(3, 2)));
        let rep = Scheme::Linear(SchemeDescriptor::replicated_scheme());
        assert_eq!(
            measure_overhead_ideal(&rep, LIM)
                .unwrap()
                .alpha
                .exact
                .as_rational(),
            Some(Rational::from(2))
        );
    }

    #[test]
    fn rank_accounting_matches_enumeration() {
        for d in [
            SchemeDescriptor::linear_scheme(),
            SchemeDescriptor::replicated_download_all(),
            SchemeDescriptor::asymmetric_toy(),
        ] {
            for desired in DesiredMessage::ALL {
                let enumerated = ideal_download_enumerated(&d, desired, LIM).unwrap();
                assert_eq!(
                    enumerated.as_rational(),
                    Some(d.expected_download(desired)),
                    "{}",
                    d.id()
                );
            }
            for db in 0..2 {
                let view = enumerate_view(&d, DesiredMessage::Second, db, LIM).unwrap();
                let l = layout(&d, db);
                let h = entropy_given_exact(&view.joint, &l.stored, &l.queries).unwrap();
                assert_eq!(
                    h.as_rational(),
                    Some(Rational::from(i128::from(d.storage_entropy(db))))
                );
            }
        }
    }
}

//! Verification engine: exact privacy and correctness by enumeration, ideal
//! and concrete rate and overhead, entropy identities and converse bounds.

mod bounds;
mod concrete;
mod json;
mod measure;
mod privacy;

use serde::Serialize;

pub use bounds::{
    verify_converse_bounds, verify_entropy_identities, ConverseReport, QuantityCheck, Relation,
    TranscriptJoint,
};
pub use concrete::{
    measure_length_leakage, measure_linear_concrete, measure_multiround_concrete, ConcreteConfig,
    ConcreteRun, LengthLeakage, Summary,
};
pub use json::{Exact, ExactReal, Real};
pub use measure::{measure_overhead_ideal, measure_rate_ideal, IdealOverhead, IdealRate};
pub use privacy::{
    check_correctness, check_privacy, enumerate_view, CorrectnessCheck, DatabasePrivacy,
    PrivacyCheck, PrivacyView,
};

use crate::entropy::Rational;
use crate::multiround::StorageLayout;
use crate::scheme::{EnumerableScheme, Scheme, SchemeInfo, DEFAULT_EXHAUSTION_LIMIT};
use crate::{Error, Result, Verdict};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditOptions {
    pub limit: u128,
    /// Also run the coded Monte-Carlo measurement.
    pub concrete: Option<ConcreteConfig>,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_EXHAUSTION_LIMIT,
            concrete: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub scheme: SchemeInfo,
    pub privacy: PrivacyCheck,
    pub correctness: CorrectnessCheck,
    pub rate_ideal: IdealRate,
    pub overhead_ideal: IdealOverhead,
    pub capacity_admissible: Verdict,
    /// Present for rate-2/3 zero-error single-round schemes only.
    pub entropy_identities: Option<Vec<QuantityCheck>>,
    pub converse: Option<ConverseReport>,
    pub concrete: Option<ConcreteRun>,
    /// Informational; never part of the verdict.
    pub length_leakage: Option<LengthLeakage>,
    pub verdict: Verdict,
}

pub fn run_audit(s: &Scheme, opts: &AuditOptions) -> Result<AuditReport> {
    let info = s.info();
    let privacy = check_privacy(s, opts.limit)?;
    let correctness = check_correctness(s, opts.limit)?;
    let rate_ideal = measure_rate_ideal(s, opts.limit)?;
    let overhead_ideal = measure_overhead_ideal(s, opts.limit)?;
    let p = info.params;
    let identities_apply = matches!(s, Scheme::Linear(_))
        && info.zero_error
        && p.databases() == 2
        && rate_ideal.rate_exact == Some(Exact(Rational::new(2, 3)));
    let entropy_identities = if identities_apply {
        Some(verify_entropy_identities(s, opts.limit)?)
    } else {
        None
    };
    let converse = match verify_converse_bounds(s, opts.limit) {
        Ok(c) => Some(c),
        Err(Error::UnsupportedScheme(_)) => None,
        Err(e) => return Err(e),
    };
    let (concrete, length_leakage) = match (opts.concrete, s) {
        (None, _) => (None, None),
        (Some(cfg), Scheme::Linear(d)) => (Some(measure_linear_concrete(d, &cfg)?), None),
        (Some(_), Scheme::Multiround(m)) if m.layout() == StorageLayout::Replicated => (None, None),
        (Some(cfg), Scheme::Multiround(m)) => {
            let cfg = ConcreteConfig {
                bias: m.bias(),
                ..cfg
            };
            (
                Some(measure_multiround_concrete(&cfg)?),
                Some(measure_length_leakage(&cfg)?),
            )
        }
    };
    let mut verdicts = vec![privacy.verdict, correctness.verdict, rate_ideal.admissible];
    verdicts.extend(entropy_identities.iter().flatten().map(|c| c.verdict));
    verdicts.extend(converse.iter().map(|c| c.verdict));
    Ok(AuditReport {
        scheme: info,
        capacity_admissible: rate_ideal.admissible,
        privacy,
        correctness,
        rate_ideal,
        overhead_ideal,
        entropy_identities,
        converse,
        concrete,
        length_leakage,
        verdict: Verdict::all(verdicts),
    })
}

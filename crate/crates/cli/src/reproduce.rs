//! Recomputes every reference number and compares it with its expected value.

use clap::ValueEnum;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use pirlab::audit::{
    check_correctness, check_privacy, enumerate_view, measure_multiround_concrete,
    measure_overhead_ideal, measure_rate_ideal, verify_converse_bounds, verify_entropy_identities,
    ConcreteConfig, Exact, Real,
};
use pirlab::capacity::{mtpir_capacity, PirParameters};
use pirlab::coding::{conditional_cell_entropy, measure_failure_rate, CodecConfig};
use pirlab::entropy::marginal;
use pirlab::linear::SchemeDescriptor;
use pirlab::multiround::{MultiroundScheme, StorageLayout};
use pirlab::scheme::DEFAULT_EXHAUSTION_LIMIT;
use pirlab::{DesiredMessage, EnumerableScheme, Rational, Scheme, Symbol, Verdict};

use crate::{Report, Result};

const LIM: u128 = DEFAULT_EXHAUSTION_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReproduceMode {
    /// Exact rows only.
    Ideal,
    /// Exact rows plus the Monte-Carlo rows.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReproduceConfig {
    pub mode: ReproduceMode,
    pub seed: u64,
    pub codec: CodecConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub id: &'static str,
    pub title: &'static str,
    pub expected: Value,
    pub measured: Value,
    pub tolerance: &'static str,
    pub verdict: Verdict,
}

fn row(
    id: &'static str,
    title: &'static str,
    tolerance: &'static str,
) -> impl FnOnce(Value, Value, bool) -> Row {
    move |expected, measured, ok| Row {
        id,
        title,
        expected,
        measured,
        tolerance,
        verdict: Verdict::from_bool(ok),
    }
}

fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

fn capacity() -> Result<Row> {
    let c = mtpir_capacity(&PirParameters::new(2, 2, 1, 1)?);
    let mut monotone = true;
    for k in 1..=5u32 {
        for n in 1..=5u32 {
            for t in 1..=n {
                let here = mtpir_capacity(&PirParameters::new(k, n, t, 1)?);
                if k < 5 {
                    monotone &= mtpir_capacity(&PirParameters::new(k + 1, n, t, 1)?) <= here;
                }
                if t < n {
                    monotone &= mtpir_capacity(&PirParameters::new(k, n, t + 1, 1)?) <= here;
                }
                if n < 5 {
                    monotone &= mtpir_capacity(&PirParameters::new(k, n + 1, t, 1)?) >= here;
                }
            }
        }
    }
    Ok(row("1", "capacity formula", "exact")(
        json!({"capacity": Exact(r(2, 3)), "monotone_on_grid": true}),
        json!({"capacity": Exact(c), "monotone_on_grid": monotone}),
        c == r(2, 3) && monotone,
    ))
}

fn correctness() -> Result<Row> {
    let (mut sessions, mut errors) = (0, 0);
    for len in 1..=3 {
        let c = check_correctness(
            &MultiroundScheme::new(StorageLayout::Split, r(1, 2), len)?,
            LIM,
        )?;
        sessions += c.sessions;
        errors += c.errors;
    }
    Ok(row("2", "multiround correctness for L <= 3", "exact")(
        json!({"sessions": 1168, "errors": 0}),
        json!({"sessions": sessions, "errors": errors}),
        sessions == 1168 && errors == 0,
    ))
}

fn privacy() -> Result<Row> {
    let s = MultiroundScheme::standard();
    let view = enumerate_view(&s, DesiredMessage::First, 1, LIM)?;
    let table = marginal(&view.joint, &[1, 2, 3])?;
    let rows: Vec<Value> = table
        .iter()
        .map(|(o, p)| {
            let q = match &o[0] {
                Symbol::Label(l) => l.to_string(),
                _ => "null".into(),
            };
            json!({"query": q, "stored": [o[1].to_string(), o[2].to_string()], "probability": Exact(*p)})
        })
        .collect();
    let (f, t) = (Symbol::Bit(false), Symbol::Bit(true));
    let mut table_ok =
        table.support_len() == 7 && table.prob(&[Symbol::Null, f.clone(), f.clone()]) == r(1, 4);
    for q in ["y1", "y2"] {
        for (a, b) in [(&f, &f), (&t, &f), (&f, &t)] {
            table_ok &= table.prob(&[Symbol::Label(q), a.clone(), b.clone()]) == r(1, 8);
        }
    }
    let check = check_privacy(&s, LIM)?;
    let tv: Vec<Exact> = check.databases.iter().map(|d| d.total_variation).collect();
    let zero = tv.iter().all(|e| e.0.is_zero());
    Ok(row("3", "exact privacy of the multiround scheme", "exact")(
        json!({"db2_table_rows": 7, "null_row": Exact(r(1, 4)), "other_rows": Exact(r(1, 8)), "total_variation": [Exact(r(0, 1)), Exact(r(0, 1))]}),
        json!({"db2_table": rows, "total_variation": tv}),
        table_ok && zero,
    ))
}

fn negative_controls() -> Result<Row> {
    let tv = |s: MultiroundScheme| -> Result<Rational> {
        Ok(check_privacy(&s, LIM)?
            .databases
            .iter()
            .map(|d| d.total_variation.0)
            .max()
            .unwrap_or_default())
    };
    let replicated = tv(MultiroundScheme::new(
        StorageLayout::Replicated,
        r(1, 2),
        1,
    )?)?;
    let biased = tv(MultiroundScheme::new(StorageLayout::Split, r(3, 4), 1)?)?;
    Ok(row(
        "4",
        "negative controls leak",
        "exact, strictly positive",
    )(
        json!({"replicated": Exact(r(1, 4)), "bias_3_4": Exact(r(1, 4))}),
        json!({"replicated": Exact(replicated), "bias_3_4": Exact(biased)}),
        replicated > Rational::zero() && biased > Rational::zero(),
    ))
}

fn ideal_rate() -> Result<Row> {
    let mr = Scheme::Multiround(MultiroundScheme::standard());
    let rate = measure_rate_ideal(&mr, LIM)?;
    let alpha = measure_overhead_ideal(&mr, LIM)?.alpha;
    let target = 0.75 + 0.375 * 3f64.log2();
    let lin = Scheme::Linear(SchemeDescriptor::linear_scheme());
    let lin_rate = measure_rate_ideal(&lin, LIM)?.rate_exact;
    let lin_alpha = measure_overhead_ideal(&lin, LIM)?.alpha;
    let rep = Scheme::Linear(SchemeDescriptor::replicated_scheme());
    let rep_alpha = measure_overhead_ideal(&rep, LIM)?.alpha;
    let ok = rate.download_per_symbol.exact.as_rational() == Some(r(3, 2))
        && (alpha.exact.to_f64() - target).abs() <= 1e-9
        && lin_rate == Some(Exact(r(2, 3)))
        && lin_alpha.exact.as_rational() == Some(r(3, 2))
        && rep_alpha.exact.as_rational() == Some(r(2, 1));
    Ok(row(
        "5",
        "ideal rate and storage overhead",
        "exact; alpha within 1e-9",
    )(
        json!({
            "multiround_download_per_symbol": "3/2",
            "multiround_alpha": {"exact": "3/4 + 3/8·log2(3)", "value": Real(target)},
            "linear_rate": Exact(r(2, 3)),
            "linear_alpha": "3/2",
            "replicated_alpha": "2",
        }),
        json!({
            "multiround_download_per_symbol": rate.download_per_symbol.exact,
            "multiround_alpha": alpha,
            "linear_rate": lin_rate,
            "linear_alpha": lin_alpha.exact,
            "replicated_alpha": rep_alpha.exact,
        }),
        ok,
    ))
}

fn concrete_download(cfg: &ReproduceConfig) -> Result<Row> {
    let c = ConcreteConfig {
        codec: cfg.codec,
        ..ConcreteConfig::new(100_000, 1, cfg.seed)
    };
    let run = measure_multiround_concrete(&c)?;
    let d = run.download_per_symbol.mean();
    Ok(row(
        "6a",
        "concrete download per bit at L = 1e5",
        "1% of 1.5",
    )(
        json!({"download_per_symbol": 1.5}),
        json!({"download_per_symbol": Real(d), "coder_excess_per_symbol": run.coder_excess_per_symbol.mean, "sw_failures": run.sw_failures, "errors": run.errors}),
        (d - 1.5).abs() <= 0.015,
    ))
}

fn sw_failures(cfg: &ReproduceConfig) -> Result<Row> {
    let est = measure_failure_rate(
        &CodecConfig {
            seed: cfg.seed,
            ..cfg.codec
        },
        10_000,
    )?;
    Ok(
        row("6b", "Slepian-Wolf block failure rate", "at most 1e-3")(
            json!({"failure_rate": 1e-3}),
            json!({"blocks": est.blocks, "failures": est.failures, "failure_rate": Real(est.rate), "bin_bits": cfg.codec.bin_bits()}),
            est.rate <= 1e-3,
        ),
    )
}

fn sw_storage(cfg: &ReproduceConfig) -> Result<Row> {
    let nominal = conditional_cell_entropy() + cfg.codec.rate_margin;
    let n = cfg.codec.block_length as f64;
    let actual = f64::from(cfg.codec.bin_bits()) / n;
    let ok = nominal < 1.5 && actual < 1.5 && actual >= nominal && actual - nominal < 1.0 / n;
    Ok(row(
        "6c",
        "Slepian-Wolf storage per bit",
        "below 1.5; rounding gap below 1/n",
    )(
        json!({"below": 1.5}),
        json!({"nominal": Real(nominal), "realized": Real(actual)}),
        ok,
    ))
}

fn symbol_download() -> Result<Row> {
    let rate = measure_rate_ideal(&Scheme::Multiround(MultiroundScheme::standard()), LIM)?;
    let d = rate.symbol_download_per_block;
    Ok(row("7", "expected uncoded download at L = 1", "exact")(
        json!({"symbols": Exact(r(7, 4))}),
        json!({"symbols": d}),
        d.0 == r(7, 4),
    ))
}

fn identities() -> Result<Row> {
    let checks =
        verify_entropy_identities(&Scheme::Linear(SchemeDescriptor::linear_scheme()), LIM)?;
    let expected: Vec<Value> = checks
        .iter()
        .map(|c| json!({"name": c.name, "relation": c.relation, "target": c.target.exact}))
        .collect();
    let measured: Vec<Value> = checks
        .iter()
        .map(|c| json!({"name": c.name, "value": c.measured.exact, "verdict": c.verdict}))
        .collect();
    Ok(
        row("8", "entropy identities of the linear scheme", "exact")(
            Value::Array(expected),
            Value::Array(measured),
            checks.iter().all(|c| c.verdict.passed()),
        ),
    )
}

fn converse() -> Result<Row> {
    let lin = verify_converse_bounds(&Scheme::Linear(SchemeDescriptor::linear_scheme()), LIM)?;
    let bound = &lin.checks[0];
    let mut ok = bound.verdict.passed();
    let toy = SchemeDescriptor::asymmetric_toy();
    let schemes = [
        Scheme::Multiround(MultiroundScheme::standard()),
        Scheme::Linear(SchemeDescriptor::linear_scheme()),
        Scheme::Linear(SchemeDescriptor::replicated_scheme()),
        Scheme::Linear(SchemeDescriptor::replicated_download_all()),
        Scheme::Linear(toy.clone()),
        Scheme::Linear(toy.symmetrize()?),
    ];
    let mut rates = Vec::new();
    for s in &schemes {
        let rate = measure_rate_ideal(s, LIM)?;
        ok &= rate.admissible.passed();
        rates.push(json!({"scheme": s.info().id, "rate": rate.rate, "capacity": rate.capacity, "verdict": rate.admissible}));
    }
    Ok(row("9", "converse bounds", "exact")(
        json!({"bound": bound.name, "target": bound.target.exact, "rate_at_most_capacity": true}),
        json!({"bound": bound.name, "value": bound.measured.exact, "tight": bound.tight, "rates": rates}),
        ok,
    ))
}

fn symmetrization() -> Result<Row> {
    let toy = SchemeDescriptor::asymmetric_toy();
    let sym = toy.symmetrize()?;
    let answers_equal = DesiredMessage::ALL
        .iter()
        .all(|&d| sym.answer_entropy(d, 0) == sym.answer_entropy(d, 1));
    let storage = [sym.storage_entropy(0), sym.storage_entropy(1)];
    let ok = storage[0] == storage[1]
        && answers_equal
        && sym.rate() == toy.rate()
        && sym.storage_overhead() == toy.storage_overhead();
    Ok(row("10", "symmetrization", "exact")(
        json!({"equal_storage": true, "equal_answers": true, "rate": Exact(toy.rate()), "alpha": Exact(toy.storage_overhead())}),
        json!({"storage": storage, "equal_answers": answers_equal, "rate": Exact(sym.rate()), "alpha": Exact(sym.storage_overhead())}),
        ok,
    ))
}

pub fn cmd_reproduce(cfg: &ReproduceConfig) -> Result<Report> {
    cfg.codec.validate()?;
    let mut rows = vec![
        capacity()?,
        correctness()?,
        privacy()?,
        negative_controls()?,
        ideal_rate()?,
    ];
    if cfg.mode == ReproduceMode::Full {
        rows.push(concrete_download(cfg)?);
        rows.push(sw_failures(cfg)?);
    }
    rows.push(sw_storage(cfg)?);
    rows.extend([
        symbol_download()?,
        identities()?,
        converse()?,
        symmetrization()?,
    ]);
    for row in &rows {
        eprintln!("[{}] {:>3} {}", row.verdict, row.id, row.title);
    }
    let verdict = Verdict::all(rows.iter().map(|r| r.verdict));
    Ok(Report {
        json: json!({
            "command": "reproduce",
            "config": cfg,
            "rows": rows,
            "verdict": verdict,
        }),
        verdict,
    })
}

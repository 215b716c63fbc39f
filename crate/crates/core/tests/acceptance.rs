//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use pirlab::audit::{
    check_correctness, check_privacy, enumerate_view, measure_multiround_concrete,
    measure_overhead_ideal, measure_rate_ideal, verify_converse_bounds, verify_entropy_identities,
    ConcreteConfig,
};
use pirlab::capacity::{mtpir_capacity, PirParameters};
use pirlab::coding::{conditional_cell_entropy, measure_failure_rate, CodecConfig};
use pirlab::entropy::{marginal, Rational, Symbol};
use pirlab::linear::SchemeDescriptor;
use pirlab::multiround::{MultiroundScheme, StorageLayout};
use pirlab::scheme::{DesiredMessage, Scheme, DEFAULT_EXHAUSTION_LIMIT};
use pirlab::seed::DEFAULT_SEED;
use pirlab::Verdict;

const LIM: u128 = DEFAULT_EXHAUSTION_LIMIT;

type Outcome = Result<(bool, String), pirlab::Error>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

fn show(x: Option<Rational>) -> String {
    x.map_or_else(|| "irrational".into(), |x| x.to_string())
}

fn capacity() -> Outcome {
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
    Ok((
        c == r(2, 3) && monotone,
        format!("C(2,2,1) = {c}, grid monotone = {monotone}"),
    ))
}

fn multiround_correctness() -> Outcome {
    let mut sessions = 0;
    let mut errors = 0;
    for len in 1..=3 {
        let s = MultiroundScheme::new(StorageLayout::Split, r(1, 2), len)?;
        let c = check_correctness(&s, LIM)?;
        sessions += c.sessions;
        errors += c.errors;
    }
    Ok((
        errors == 0 && sessions == 2 * (8 + 64 + 512),
        format!("{sessions} sessions, {errors} errors"),
    ))
}

fn exact_privacy() -> Outcome {
    let s = MultiroundScheme::standard();
    let view = enumerate_view(&s, DesiredMessage::First, 1, LIM)?;
    let table = marginal(&view.joint, &[1, 2, 3])?;
    let (f, t) = (Symbol::Bit(false), Symbol::Bit(true));
    let mut rows_ok =
        table.support_len() == 7 && table.prob(&[Symbol::Null, f.clone(), f.clone()]) == r(1, 4);
    for q in ["y1", "y2"] {
        for (a, b) in [(&f, &f), (&t, &f), (&f, &t)] {
            rows_ok &= table.prob(&[Symbol::Label(q), a.clone(), b.clone()]) == r(1, 8);
        }
    }
    let p = check_privacy(&s, LIM)?;
    let tvs: Vec<String> = p
        .databases
        .iter()
        .map(|d| d.total_variation.0.to_string())
        .collect();
    let zero = p.databases.iter().all(|d| d.total_variation.0.is_zero());
    Ok((
        rows_ok && zero,
        format!("7-row table matches = {rows_ok}, TV per database = {tvs:?}"),
    ))
}

fn negative_controls() -> Outcome {
    let replicated = MultiroundScheme::new(StorageLayout::Replicated, r(1, 2), 1)?;
    let biased = MultiroundScheme::new(StorageLayout::Split, r(3, 4), 1)?;
    let tv = |s: &MultiroundScheme| -> Result<Rational, pirlab::Error> {
        Ok(check_privacy(s, LIM)?
            .databases
            .iter()
            .map(|d| d.total_variation.0)
            .max()
            .unwrap())
    };
    let (a, b) = (tv(&replicated)?, tv(&biased)?);
    Ok((
        a > Rational::zero() && b > Rational::zero(),
        format!("replicated TV = {a}, bias 3/4 TV = {b}"),
    ))
}

fn ideal_rate_and_overhead() -> Outcome {
    let mr = Scheme::Multiround(MultiroundScheme::standard());
    let rate = measure_rate_ideal(&mr, LIM)?;
    let download = rate.download_per_symbol.exact.as_rational();
    let alpha = measure_overhead_ideal(&mr, LIM)?.alpha;
    let alpha_target = 0.75 + 0.375 * 3f64.log2();
    let alpha_ok = (alpha.exact.to_f64() - alpha_target).abs() <= 1e-9;

    let lin = Scheme::Linear(SchemeDescriptor::linear_scheme());
    let lin_rate = measure_rate_ideal(&lin, LIM)?.rate_exact.map(|e| e.0);
    let lin_alpha = measure_overhead_ideal(&lin, LIM)?.alpha.exact.as_rational();
    let rep = Scheme::Linear(SchemeDescriptor::replicated_scheme());
    let rep_alpha = measure_overhead_ideal(&rep, LIM)?.alpha.exact.as_rational();

    let ok = download == Some(r(3, 2))
        && alpha_ok
        && lin_rate == Some(r(2, 3))
        && lin_alpha == Some(r(3, 2))
        && rep_alpha == Some(r(2, 1));
    Ok((
        ok,
        format!(
            "multiround D/L = {}, alpha = {} = {:.12}; linear R = {}, alpha = {}; replicated alpha = {}",
            rate.download_per_symbol.exact,
            alpha.exact,
            alpha.exact.to_f64(),
            show(lin_rate),
            show(lin_alpha),
            show(rep_alpha),
        ),
    ))
}

fn concrete_download() -> Outcome {
    let run = measure_multiround_concrete(&ConcreteConfig::new(100_000, 1, DEFAULT_SEED))?;
    let d = run.download_per_symbol.mean();
    Ok((
        (d - 1.5).abs() <= 0.015,
        format!(
            "L = 1e5, D/L = {d:.5} (tolerance 1% of 1.5); coder excess {:.5} bit/symbol",
            run.coder_excess_per_symbol.mean()
        ),
    ))
}

fn sw_failure_rate() -> Outcome {
    let cfg = CodecConfig::new(16, 0.15, DEFAULT_SEED)?;
    let est = measure_failure_rate(&cfg, 10_000)?;
    Ok((
        est.rate <= 1e-3,
        format!(
            "n = 16, delta = 0.15, {} bin bits: {} failures in {} blocks, rate {:.4} (target <= 1e-3)",
            cfg.bin_bits(),
            est.failures,
            est.blocks,
            est.rate
        ),
    ))
}

fn sw_storage() -> Outcome {
    let cfg = CodecConfig::new(16, 0.15, DEFAULT_SEED)?;
    let nominal = conditional_cell_entropy() + 0.15;
    let actual = cfg.bin_bits() as f64 / 16.0;
    let ok = nominal < 1.5
        && actual < 1.5
        && (actual - nominal) >= 0.0
        && (actual - nominal) < 1.0 / 16.0;
    Ok((ok, format!("nominal (3/4)log2(3) + 0.15 = {nominal:.5}, realized {actual:.5} bit/symbol, bound 1.5")))
}

fn symbol_download() -> Outcome {
    let rate = measure_rate_ideal(&Scheme::Multiround(MultiroundScheme::standard()), LIM)?;
    let d = rate.symbol_download_per_block.0;
    Ok((
        d == r(7, 4),
        format!("expected uncoded download at L = 1: {d}"),
    ))
}

fn identities() -> Outcome {
    let checks =
        verify_entropy_identities(&Scheme::Linear(SchemeDescriptor::linear_scheme()), LIM)?;
    let ok = checks.iter().all(|c| c.verdict == Verdict::Pass);
    let summary: Vec<String> = checks
        .iter()
        .map(|c| format!("{} = {}", c.name, c.measured.exact))
        .collect();
    Ok((ok, summary.join("; ")))
}

fn converse() -> Outcome {
    let lin = verify_converse_bounds(&Scheme::Linear(SchemeDescriptor::linear_scheme()), LIM)?;
    let bound = &lin.checks[0];
    let mut detail = format!(
        "linear: {} with {} vs {}",
        bound.name, bound.measured.exact, bound.target.exact
    );
    let mut ok = bound.verdict == Verdict::Pass;
    let toy = SchemeDescriptor::asymmetric_toy();
    let schemes = [
        Scheme::Multiround(MultiroundScheme::standard()),
        Scheme::Linear(SchemeDescriptor::linear_scheme()),
        Scheme::Linear(SchemeDescriptor::replicated_scheme()),
        Scheme::Linear(SchemeDescriptor::replicated_download_all()),
        Scheme::Linear(toy.clone()),
        Scheme::Linear(toy.symmetrize()?),
    ];
    for s in &schemes {
        let rate = measure_rate_ideal(s, LIM)?;
        ok &= rate.admissible == Verdict::Pass;
        detail.push_str(&format!(
            "; {} R = {:.6} <= {}",
            pirlab::EnumerableScheme::info(s).id,
            rate.rate.0,
            rate.capacity.0
        ));
    }
    Ok((ok, detail))
}

fn symmetrization() -> Outcome {
    let toy = SchemeDescriptor::asymmetric_toy();
    let sym = toy.symmetrize()?;
    let storage = (sym.storage_entropy(0), sym.storage_entropy(1));
    let answers_equal = DesiredMessage::ALL
        .iter()
        .all(|&d| sym.answer_entropy(d, 0) == sym.answer_entropy(d, 1));
    let ok = storage.0 == storage.1
        && answers_equal
        && sym.rate() == toy.rate()
        && sym.storage_overhead() == toy.storage_overhead();
    Ok((
        ok,
        format!(
            "toy H(S1), H(S2) = {}, {} -> {}, {}; answer entropies equal = {answers_equal}; rate {} -> {}; alpha {} -> {}",
            toy.storage_entropy(0),
            toy.storage_entropy(1),
            storage.0,
            storage.1,
            toy.rate(),
            sym.rate(),
            toy.storage_overhead(),
            sym.storage_overhead()
        ),
    ))
}

fn main() -> ExitCode {
    let ms = Duration::from_millis;
    let criteria = [
        Criterion {
            id: "1",
            title: "capacity formula",
            budget: ms(100),
            run: capacity,
        },
        Criterion {
            id: "2",
            title: "multiround correctness",
            budget: ms(1_000),
            run: multiround_correctness,
        },
        Criterion {
            id: "3",
            title: "exact privacy",
            budget: ms(1_000),
            run: exact_privacy,
        },
        Criterion {
            id: "4",
            title: "negative controls",
            budget: ms(1_000),
            run: negative_controls,
        },
        Criterion {
            id: "5",
            title: "ideal rate and overhead",
            budget: ms(5_000),
            run: ideal_rate_and_overhead,
        },
        Criterion {
            id: "6a",
            title: "concrete download",
            budget: ms(120_000),
            run: concrete_download,
        },
        Criterion {
            id: "6b",
            title: "Slepian-Wolf failure rate",
            budget: ms(120_000),
            run: sw_failure_rate,
        },
        Criterion {
            id: "6c",
            title: "Slepian-Wolf storage",
            budget: ms(100),
            run: sw_storage,
        },
        Criterion {
            id: "7",
            title: "constrained-length download",
            budget: ms(1_000),
            run: symbol_download,
        },
        Criterion {
            id: "8",
            title: "linear entropy identities",
            budget: ms(5_000),
            run: identities,
        },
        Criterion {
            id: "9",
            title: "converse spot checks",
            budget: ms(5_000),
            run: converse,
        },
        Criterion {
            id: "10",
            title: "symmetrization",
            budget: ms(1_000),
            run: symmetrization,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= c.budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {:>3} {}: {} ({} ms, budget {} ms)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            detail,
            elapsed.as_millis(),
            c.budget.as_millis()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

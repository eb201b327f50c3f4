//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion is exact; the time limits below are wall-clock ceilings
//! for a debug build.

use std::io::Write;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use wittforms_core::group::{AbGroup, Subgroup};
use wittforms_core::groupring::filtration_quotient;
use wittforms_core::verify::{run_check, CheckReport, DEFAULT_SEED};

struct Criterion {
    number: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Result<String, String>,
}

fn check(id: &str, params: Value) -> Result<CheckReport, String> {
    let r = run_check(id, &params, DEFAULT_SEED).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(r)
    } else {
        Err(format!("{id} failed: {}", r.counterexample.unwrap_or(Value::Null)))
    }
}

fn c1() -> Result<String, String> {
    let g = std::sync::Arc::new(AbGroup::cyclic(3));
    let q = filtration_quotient(&Subgroup::whole(g), 1).map_err(|e| e.to_string())?;
    if q.free_rank != 0 || q.torsion != vec![3] {
        return Err(format!("I/I^2 = {q:?}"));
    }
    let r = check("thm3", json!({"group": "3", "field": {"p": 7, "t": 1, "d": 3}}))?;
    Ok(format!("I/I^2 = Z/3 (abstract and F_7), {} cases", r.cases_run))
}

fn c2() -> Result<String, String> {
    let r = check("exponent-lemma", json!({"primes": [3, 5], "depths": [1, 2]}))?;
    Ok(format!("{} lattice inclusions", r.cases_run))
}

fn c3() -> Result<String, String> {
    let r = check("groupring-iso", json!({"groups": ["2", "3", "4", "2x2"], "pairs": 10000}))?;
    Ok(format!("{} random pairs", r.cases_run))
}

fn c4() -> Result<String, String> {
    let r = check("thm2-oracle", json!({"groups": ["3"], "max_dim": 6, "max_padding": 6}))?;
    Ok(format!("{} pairs", r.cases_run))
}

fn c5() -> Result<String, String> {
    let fields = json!([
        {"p": 7, "t": 1, "d": 3, "max_dim": 5},
        {"p": 13, "t": 1, "d": 3, "max_dim": 4}
    ]);
    let r = check("round-univ-equiv", json!({ "fields": fields }))?;
    Ok(format!("{} nonempty forms", r.cases_run))
}

fn c6() -> Result<String, String> {
    let r = check("prop1-dim", json!({"groups": ["3"], "max_dim": 9}))?;
    let thm1 = check("thm1", json!({"groups": ["3"], "max_dim": 9}))?;
    Ok(format!("{} H-forms among {} multisets", r.details["h_forms"], r.cases_run + thm1.cases_run))
}

fn c7() -> Result<String, String> {
    let r = check("witt-real-even", json!({"max_dim": 12}))?;
    Ok(format!("{} class pairs", r.cases_run))
}

fn c8() -> Result<String, String> {
    let r = check("torsion-free", json!({"groups": ["2", "3"], "n_max": 100}))?;
    Ok(format!("{} multiples", r.cases_run))
}

fn c9() -> Result<String, String> {
    let r = check("i-decomp-unique", json!({"fields": [{"p": 7, "t": 1, "d": 3, "max_dim": 5}]}))?;
    Ok(format!("{} forms", r.cases_run))
}

fn c10() -> Result<String, String> {
    let r = check("projection-formula", json!({"p": 7, "t": 1, "d": 3, "m": 2, "max_theta_dim": 3, "max_hform_dim": 6}))?;
    Ok(format!("{} symbol identities", r.cases_run))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { number: 1, title: "Theorem 3: I/I^2 = Z/3", limit: secs(5), run: c1 },
        Criterion { number: 2, title: "exponent lemma p I^n in I^(n+1)", limit: secs(30), run: c2 },
        Criterion { number: 3, title: "Witt ring = Z[G]/(N_H)", limit: secs(10), run: c3 },
        Criterion { number: 4, title: "Theorem 2(iii) padding oracle", limit: secs(60), run: c4 },
        Criterion { number: 5, title: "H_max-form iff round and universal", limit: secs(60), run: c5 },
        Criterion { number: 6, title: "H-forms are unions of cosets", limit: secs(60), run: c6 },
        Criterion { number: 7, title: "W(Z/2, Z/2) = Z", limit: secs(60), run: c7 },
        Criterion { number: 8, title: "torsion-freeness", limit: secs(60), run: c8 },
        Criterion { number: 9, title: "I-decomposition", limit: secs(60), run: c9 },
        Criterion { number: 10, title: "projection formula and transfer", limit: secs(60), run: c10 },
    ];
    let mut failures = Vec::new();
    for c in criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed <= c.limit => {
                format!("PASS [{:>2}] {} ({detail}; {} ms, limit {} s)", c.number, c.title, elapsed.as_millis(), c.limit.as_secs())
            }
            Ok(_) => format!("FAIL [{:>2}] {}: {} ms over the {} s limit", c.number, c.title, elapsed.as_millis(), c.limit.as_secs()),
            Err(e) => format!("FAIL [{:>2}] {}: {e}", c.number, c.title),
        };
        // written to the raw handle so the report shows without --nocapture
        let _ = writeln!(std::io::stderr(), "{line}");
        if line.starts_with("FAIL") {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

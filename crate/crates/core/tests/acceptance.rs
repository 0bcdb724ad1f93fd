//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Built without the libtest harness so the lines always appear in
//! `cargo test` output; any failing criterion makes the process exit 1.

use std::process::Command;
use std::time::{Duration, Instant};

use hyperderiv::hyperop::delta_arrow;
use hyperderiv::matproof::catalog::{self, Group};
use hyperderiv::matproof::check::{check_identity, run_suite, CheckOptions, CheckReport};
use hyperderiv::ncpoly::{parse, Symbol};
use hyperderiv::Error;

const DIMS: [usize; 3] = [2, 3, 4];

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn record(&mut self, label: &str, pass: bool, detail: String) {
        println!("[{}] {label}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures.push(label.to_string());
        }
    }
}

fn failing(reports: &[CheckReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}@d={} ({:e} > {:e})", r.identity, r.dim, r.max_residual, r.tol))
        .collect()
}

/// Largest `max_residual / tol`; below 1 means every report passed.
fn worst_margin(reports: &[CheckReport]) -> f64 {
    reports.iter().map(|r| r.max_residual / r.tol).fold(0.0, f64::max)
}

fn group_suite(out: &mut Outcome, label: &str, group: Group, limit: Duration) {
    let start = Instant::now();
    let reports = run_suite(group.name(), &DIMS, &CheckOptions::default()).expect("suite runs");
    let elapsed = start.elapsed();
    let bad = failing(&reports);
    let names: Vec<&str> = catalog::all().iter().filter(|i| i.group == group).map(|i| i.name).collect();
    let detail = format!(
        "{} identities x {} dims, 20 trials, worst residual/tol {:.3e}, {:.2}s (limit {}s){}",
        names.len(),
        DIMS.len(),
        worst_margin(&reports),
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if bad.is_empty() { String::new() } else { format!(", failing: {}", bad.join(", ")) }
    );
    out.record(label, bad.is_empty() && elapsed < limit, detail);
}

fn symbolic_suite(out: &mut Outcome) {
    let opts = CheckOptions::default();
    let mut slowest = (0u64, "");
    let mut bad = Vec::new();
    for identity in catalog::all().into_iter().filter(|i| i.group == Group::Symbolic) {
        let r = check_identity(identity.name, 0, &opts).expect("symbolic identity runs");
        if !r.pass || r.max_residual != 0.0 || r.runtime_ms >= 10_000 {
            bad.push(identity.name);
        }
        if r.runtime_ms >= slowest.0 {
            slowest = (r.runtime_ms, identity.name);
        }
    }
    let detail = format!(
        "exact rational equality, slowest {} at {} ms (limit 10000 ms each){}",
        slowest.1,
        slowest.0,
        if bad.is_empty() { String::new() } else { format!(", failing: {}", bad.join(", ")) }
    );
    out.record("1 symbolic exactness", bad.is_empty(), detail);
}

/// Report array with every `runtime_ms` removed.
fn normalized_report(path: &std::path::Path) -> String {
    let text = std::fs::read_to_string(path).expect("report written");
    let mut value: serde_json::Value = serde_json::from_str(&text).expect("report is JSON");
    for r in value.as_array_mut().expect("array") {
        r.as_object_mut().expect("object").remove("runtime_ms");
    }
    serde_json::to_string(&value).unwrap()
}

fn determinism(out: &mut Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_hyperderiv"))
            .args(["verify", "--suite", "all", "--seed", "42", "--report"])
            .arg(&path)
            .env_remove("HYPERDERIV_SEED")
            .output()
            .expect("binary runs");
        assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
        reports.push(normalized_report(&path));
    }
    let same = reports[0] == reports[1];
    out.record(
        "4 determinism",
        same,
        format!(
            "two `verify --suite all --seed 42` reports, {} bytes each, identical modulo runtime_ms: {same}",
            reports[0].len()
        ),
    );
}

fn negative_controls(out: &mut Outcome) {
    let mut worst_ratio: f64 = 1.0;
    let mut ok = true;
    for name in ["exp_derivative", "bch_symmetric"] {
        for eps in [1e-4, 1e-6] {
            for &dim in &DIMS {
                let opts = CheckOptions { perturbation: Some(eps), ..CheckOptions::default() };
                let r = check_identity(name, dim, &opts).expect("runs");
                let ratio = r.max_residual / eps;
                worst_ratio = if (ratio.ln()).abs() > worst_ratio.ln().abs() { ratio } else { worst_ratio };
                ok &= !r.pass && (0.1..=10.0).contains(&ratio);
            }
        }
    }
    let rejected = matches!(
        delta_arrow(&Symbol::new("A"), &Symbol::new("B"), &parse("A*B - B*A").unwrap()),
        Err(Error::NotInSymDomain { .. })
    );
    out.record(
        "5 negative controls",
        ok && rejected,
        format!(
            "rhs scaled by 1+ε (ε = 1e-4, 1e-6): all fail, residual/ε within [0.1, 10] (extreme {worst_ratio:.3}); AB - BA rejected as NotInSymDomain: {rejected}"
        ),
    );
}

fn main() {
    println!("\nacceptance criteria");
    let mut out = Outcome { failures: Vec::new() };
    symbolic_suite(&mut out);
    group_suite(&mut out, "2 numeric invariance", Group::Numeric, Duration::from_secs(60));
    group_suite(&mut out, "3 BCH", Group::Exponential, Duration::from_secs(30));
    determinism(&mut out);
    negative_controls(&mut out);
    if out.failures.is_empty() {
        println!("acceptance: all criteria passed\n");
    } else {
        println!("acceptance: failed criteria: {:?}\n", out.failures);
        std::process::exit(1);
    }
}

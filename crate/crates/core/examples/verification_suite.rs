//! Runs the identity catalog and prints a one-line summary per report.
//!
//! `cargo run --example verification_suite -- numeric 3`

use hyperderiv::matproof::check::{run_suite, CheckOptions};

fn main() -> hyperderiv::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite = args.next().unwrap_or_else(|| "all".into());
    let dims: Vec<usize> = match args.next() {
        Some(d) => vec![d.parse().expect("dimension")],
        None => vec![2, 3, 4],
    };
    let opts = CheckOptions { trials: 5, ..CheckOptions::default() };
    let reports = run_suite(&suite, &dims, &opts)?;
    for r in &reports {
        println!(
            "{} {:<30} d={} residual={:.3e} tol={:.1e}",
            if r.pass { "pass" } else { "FAIL" },
            r.identity,
            r.dim,
            r.max_residual,
            r.tol
        );
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failed} failed", reports.len());
    Ok(())
}

//! Runs every proposition suite and prints a one-line summary per suite.
//!
//! `cargo run --release --example verify_suite -- [seed] [trials]`

use qcayley::verify::{run_verify, VerifyConfig};

fn main() -> qcayley::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let cfg = VerifyConfig { seed, trials, ..VerifyConfig::default() };
    let report = run_verify(&cfg)?;
    for (id, r) in &report.propositions {
        let mark = if r.pass { "ok  " } else { "FAIL" };
        println!("{mark} {id:<26} trials={:<5} max_residual={:.2e}", r.trials, r.max_residual);
        if let Some(d) = &r.detail {
            println!("     {d}");
        }
    }
    for (id, o) in &report.observations {
        println!("obs  {id:<26} {}/{}  {}", o.count, o.samples, o.note);
    }
    println!("all_pass = {}", report.all_pass);
    Ok(())
}

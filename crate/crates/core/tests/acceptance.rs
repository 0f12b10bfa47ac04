//! Acceptance gate: evaluates every criterion at reduced scale and prints one
//! PASS/FAIL line each. Runs the full sweeps, so it takes a while on few
//! cores; `RFM_WORKERS` sets the thread count and `RFM_PROGRESS=1` reports
//! progress.

use std::process::ExitCode;
use std::time::Instant;

use rfm::verify::{Acceptance, AcceptanceConfig};

fn main() -> ExitCode {
    let cfg = AcceptanceConfig {
        progress: std::env::var_os("RFM_PROGRESS").is_some_and(|v| v == "1"),
        ..AcceptanceConfig::default()
    };
    println!(
        "acceptance: reps={} seed={} workers={} (repeat with {})",
        cfg.reps, cfg.master_seed, cfg.workers, cfg.repeat_workers
    );
    let mut acc = Acceptance::new(cfg);
    let mut failed = 0;
    for id in 1..=10 {
        let t = Instant::now();
        match acc.criterion(id) {
            Ok(outcome) => {
                failed += usize::from(!outcome.pass);
                println!("{outcome} ({:.0}s)", t.elapsed().as_secs_f64());
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} FAIL error: {e}");
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

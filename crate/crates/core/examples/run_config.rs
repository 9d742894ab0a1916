//! Loads a bundled experiment config, runs it at a reduced replication
//! count and prints the first CSV rows; then runs one property suite.
//!
//! `cargo run --release --example run_config -- configs/fig5_cluster.json`

use std::path::PathBuf;

use shadowcorr::experiment::csv::render;
use shadowcorr::experiment::{execute, load_configs, verify, Overrides, Suite, VerifyOptions};

fn main() -> shadowcorr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig4_grid.json"));
    let ov = Overrides {
        replications: Some(2000),
        ..Overrides::default()
    };
    for cfg in load_configs(&path)? {
        let (rows, summary) = execute(&cfg, &ov)?;
        for line in summary {
            println!("{line}");
        }
        for line in render(&rows).lines().take(6) {
            println!("  {line}");
        }
    }
    for r in verify(Suite::Moments, VerifyOptions { replications: 2000, seed: 1 })? {
        println!("{} {} (margin {:.3e})", if r.passed { "pass" } else { "FAIL" }, r.property, r.margin);
    }
    Ok(())
}

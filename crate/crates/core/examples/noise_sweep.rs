//! Run a small reconstruction-error sweep through the experiment harness.
//! With a path argument the rows, summary and metadata are written next to
//! it, and rerunning resumes from the existing rows.
//!
//! `cargo run --release --example noise_sweep -- [out.csv]`

use blockpr::harness::{run_experiment, Algorithm, DeltaRule, ExperimentConfig};
use blockpr::prelude::*;

fn main() -> Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "d": [64],
            "delta": {"rule": "fixed", "delta": 4},
            "snr_db": [20, 30, 40, 50, 60, "inf"],
            "trials": 20,
            "algorithms": ["blockpr", "blockpr-blocks-gs", "gs"],
            "seed": 1
        }"#,
    )?;
    let cfg = ExperimentConfig { output: std::env::args().nth(1).map(Into::into), ..cfg };
    assert!(matches!(cfg.delta, DeltaRule::Fixed { delta: 4 }));

    let out = run_experiment(&cfg)?;
    println!("{} rows computed, {} resumed, hash {}", out.rows_computed, out.rows_resumed, out.hash);
    for alg in [Algorithm::Blockpr, Algorithm::BlockprBlocksGs, Algorithm::Gs] {
        let line: Vec<String> = out
            .aggregates
            .iter()
            .filter(|a| a.algorithm == alg)
            .map(|a| format!("{:>8.2}", a.mean_error_db))
            .collect();
        println!("{:>18}: {}", alg.name(), line.join(" "));
    }
    Ok(())
}

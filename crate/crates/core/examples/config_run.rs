//! Drives the simulator from a JSON run configuration, the same format the
//! `geotgate` binary reads.
//!
//!     cargo run --release --example config_run

use geotgate::config::RunConfig;

const CONFIG: &str = r#"{
    "version": 1,
    "scheme": { "scheme": "OCGT", "path": 2, "n": 2, "p": [-6.086835766] },
    "noise": { "delta": 0.1 }
}"#;

fn main() -> geotgate::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    println!("delta = 0.1:  F = {:.12}", cfg.evaluate(None)?);
    for eps in [0.0, 0.05, 0.1] {
        let f = cfg.with_parameter("epsilon", eps)?.evaluate(None)?;
        println!("epsilon = {eps:<4}  F = {f:.12}");
    }
    Ok(())
}

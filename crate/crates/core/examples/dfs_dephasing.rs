//! Collective dephasing on the encoded qubit against an unencoded qubit
//! with the same frequency noise.
//!
//!     cargo run --release --example dfs_dephasing

use geotgate::scenario::{benchmark_delta, LogicalScenario, LogicalScheme, MHZ};
use geotgate::transmon::no_dfs_baseline_fidelity;

fn main() -> geotgate::Result<()> {
    let scheme = LogicalScheme::standard_ocgt();
    let base = LogicalScenario::new(scheme, benchmark_delta(&scheme));
    let seq = base.sequence()?;
    println!("{:>10} {:>14} {:>14}", "lambda_MHz", "DFS", "no DFS");
    for k in -4..=4 {
        let lambda = 0.5 * k as f64 * MHZ;
        let dfs = base.clone().with_lambda(lambda).fidelity()?;
        let bare = no_dfs_baseline_fidelity(&seq, lambda)?;
        println!("{:>10.1} {:>14.9} {:>14.9}", lambda / MHZ, dfs, bare);
    }
    Ok(())
}

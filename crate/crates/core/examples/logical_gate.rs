//! The encoded T gate on a parametrically coupled transmon pair.
//!
//!     cargo run --release --example logical_gate            # closed system
//!     cargo run --release --example logical_gate -- --decay  # with T1/T2
//!
//! The open-system run integrates a 9x9 master equation for about a second.

use geotgate::scenario::{benchmark_delta, LogicalScenario, LogicalScheme, MHZ, STANDARD_BETA};
use geotgate::transmon::{high_freq_norm, logical_rabi, Decoherence, ParametricDrive, TruncationSpec};

fn main() -> geotgate::Result<()> {
    let decay = std::env::args().any(|a| a == "--decay");
    let scheme = LogicalScheme::standard_ocgt();
    let mut scenario = LogicalScenario::new(scheme, benchmark_delta(&scheme));
    if decay {
        scenario = scenario.with_decoherence(Decoherence::standard());
    }

    let omega_l = logical_rabi(&scenario.pair, STANDARD_BETA)?;
    let drive = ParametricDrive::resonant(&scenario.pair, STANDARD_BETA, 0.0)?;
    println!("Delta     = {:.0} MHz", scenario.pair.delta() / MHZ);
    println!("Omega_L   = {:.4} MHz", omega_l / MHZ);
    println!("HF proxy  = {:.4e}", high_freq_norm(&scenario.pair, &drive, &TruncationSpec::default())?);

    let run = scenario.run(50)?;
    println!("fidelity  = {:.6} %", 100.0 * run.fidelity);
    println!("leakage   = {:.3e}", run.final_leakage);
    for tr in &run.traces {
        let peak = tr.leakage.iter().cloned().fold(0.0, f64::max);
        println!("  |{:<2}> final overlap {:.8}, peak leakage {:.2e}", tr.label, tr.overlap.last().unwrap(), peak);
    }
    Ok(())
}

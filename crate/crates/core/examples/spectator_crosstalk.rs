//! ZZ crosstalk from spectator qubits. Spectators never flip, so each
//! `σz` is replaced by its eigenvalue and the target sees a static shift.
//! Equal shifts on both transmons act collectively on the encoded qubit;
//! a differential shift does not.
//!
//!     cargo run --release --example spectator_crosstalk

use geotgate::noise::{crosstalk_h, reduce_spectators, CrosstalkTopology};
use geotgate::scenario::{benchmark_delta, LogicalScenario, LogicalScheme, MHZ};
use geotgate::transmon::{simulate_logical_gate, ParametricDrive, SimulationOptions};

fn main() -> geotgate::Result<()> {
    let scheme = LogicalScheme::standard_ocgt();
    let scenario = LogicalScenario::new(scheme, benchmark_delta(&scheme));
    let seq = scenario.sequence()?;
    let drive = ParametricDrive::resonant(&scenario.pair, scenario.beta, 0.0)?;

    for flipped in [&[][..], &["1a", "2a"][..], &["1a"][..], &["1a", "1b", "1c"][..]] {
        let mut topo = CrosstalkTopology::uniform(2, 0.5 * MHZ);
        for s in flipped {
            topo.set_state(s, -1)?;
        }
        let shifts = reduce_spectators(&topo);
        let h = crosstalk_h(&shifts)?;
        let run = simulate_logical_gate(&seq, &scenario.pair, &drive, &[], Some(&h), &SimulationOptions::default())?;
        println!(
            "flipped {:<14} shifts [{:+.2}, {:+.2}] MHz  F = {:.9}",
            format!("{flipped:?}"),
            shifts[0] / MHZ,
            shifts[1] / MHZ,
            run.fidelity
        );
    }
    Ok(())
}

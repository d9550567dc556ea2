//! Two-level gates under amplitude damping and dephasing.
//!
//!     cargo run --release --example open_system

use std::f64::consts::PI;

use geotgate::noise::CoherentNoise;
use geotgate::pulse::{Path, PulseSequence, TrajectorySpec};
use geotgate::scenario::{open_system_fidelity, KHZ, P1_PATH1};

fn main() -> geotgate::Result<()> {
    let seqs = [
        ("GT", TrajectorySpec::gt(Path::One)),
        ("OCGT", TrajectorySpec::ocgt(Path::One, vec![P1_PATH1])),
        ("DT", TrajectorySpec::dt()),
    ];
    let noise = CoherentNoise::new(0.05, 0.0, 0.0)?;
    println!("{:<6} {:>10} {:>14} {:>14}", "scheme", "kappa_kHz", "F (clean)", "F (eps=0.05)");
    for (name, spec) in &seqs {
        let seq = PulseSequence::from_spec(spec)?;
        for kappa_khz in [0.0, 20.0, 200.0] {
            let k = kappa_khz * KHZ;
            let clean = open_system_fidelity(&seq, &CoherentNoise::default(), k, k, None)?;
            let noisy = open_system_fidelity(&seq, &noise, k, k, None)?;
            println!("{name:<6} {kappa_khz:>10} {clean:>14.9} {noisy:>14.9}");
        }
        println!("       duration {:.1} ns, area {:.3}π", seq.duration() * 1e9, seq.total_area() / PI);
    }
    Ok(())
}

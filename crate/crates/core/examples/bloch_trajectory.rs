//! Bloch-sphere path of the evolution state for both single-loop paths.
//!
//!     cargo run --example bloch_trajectory

use geotgate::figures::bloch_trajectory;
use geotgate::pulse::{Path, PulseSequence, TrajectorySpec};

fn main() -> geotgate::Result<()> {
    for path in [Path::One, Path::Two] {
        let seq = PulseSequence::from_spec(&TrajectorySpec::gt(path))?;
        println!("path {}", u8::from(path));
        for p in bloch_trajectory(&seq, 4)? {
            println!(
                "  t = {:6.2} ns  (x, y, z) = ({:+.3}, {:+.3}, {:+.3})",
                p.t * 1e9,
                p.xyz[0],
                p.xyz[1],
                p.xyz[2]
            );
        }
    }
    Ok(())
}

//! Scans the free angle of the two-loop gate at a fixed Rabi error and
//! writes the curve to CSV.
//!
//!     cargo run --release --example path_scan -- [OUT_DIR]

use std::f64::consts::PI;
use std::path::PathBuf;

use geotgate::noise::CoherentNoise;
use geotgate::pulse::{Path, PulseSequence, TrajectorySpec};
use geotgate::scenario::coherent_fidelity;
use geotgate::sweep::{find_optimum, scan, SweepAxis, SweepMetadata};

fn main() -> geotgate::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/path_scan".into()));
    let noise = CoherentNoise::new(0.2, 0.0, 0.0)?;

    for path in [Path::One, Path::Two] {
        let axis = SweepAxis::linspace("p1", "rad", -2.0 * PI, 2.0 * PI, 129)?;
        let result = scan(vec![axis], "fidelity", SweepMetadata::default(), 0, |p| {
            let seq = PulseSequence::from_spec(&TrajectorySpec::ocgt(path, vec![p[0]]))?;
            coherent_fidelity(&seq, &noise)
        })?;
        let best = find_optimum(&result)?;
        println!(
            "path {}: best p1 = {:.4}π, F = {:.9}",
            u8::from(path),
            best.coordinates[0] / PI,
            best.value
        );
        result.write_csv(&out.join(format!("p1_path{}.csv", u8::from(path))))?;
    }
    println!("wrote {}", out.display());
    Ok(())
}

//! Builds every two-level scheme and checks it against T.
//!
//!     cargo run --example gate_identities

use geotgate::linalg::phase_invariant_distance;
use geotgate::propagate::default_step;
use geotgate::pulse::{phase_decomposition, solid_angle, t_gate, Path, PulseSequence, TrajectorySpec};
use geotgate::scenario::{optimal_p1, optimal_p_three_loop};

fn main() -> geotgate::Result<()> {
    let mut specs = vec![TrajectorySpec::dt()];
    for path in [Path::One, Path::Two] {
        let p2 = optimal_p_three_loop(path);
        specs.push(TrajectorySpec::gt(path));
        specs.push(TrajectorySpec::cgt(2, path));
        specs.push(TrajectorySpec::cgt(3, path));
        specs.push(TrajectorySpec::ocgt(path, vec![optimal_p1(path)]));
        specs.push(TrajectorySpec::ocgt(path, vec![p2, p2]));
    }

    println!("{:<6} {:>4} {:>2} {:>12} {:>12} {:>12} {:>12}", "scheme", "path", "n", "distance", "gamma_d", "gamma_g", "solid/2");
    for spec in &specs {
        let seq = PulseSequence::from_spec(spec)?;
        let d = phase_invariant_distance(&seq.propagate(), &t_gate());
        let step = default_step(&seq.hamiltonian_segments());
        let phases = phase_decomposition(&seq, step)?;
        let half_solid = solid_angle(spec).map(|o| format!("{:.9}", o / 2.0)).unwrap_or_else(|_| "-".into());
        println!(
            "{:<6} {:>4} {:>2} {:>12.2e} {:>12.2e} {:>12.9} {:>12}",
            spec.scheme.name(),
            u8::from(spec.path),
            spec.n,
            d,
            phases.gamma_d,
            phases.gamma_g_accumulated,
            half_solid
        );
    }
    Ok(())
}

//! Fidelity versus a single coherent error for GT and the two-loop OCGT,
//! with the fitted power law and the closed-form fourth-order expansion.
//!
//!     cargo run --example robustness_fit

use geotgate::metrics::{fourth_order_fidelity, fourth_order_coefficient, suppression_order, Channel, FidelityCurve};
use geotgate::noise::CoherentNoise;
use geotgate::pulse::{Path, PulseSequence, TrajectorySpec};
use geotgate::scenario::{coherent_fidelity, P1_PATH1};

fn main() -> geotgate::Result<()> {
    let ocgt = PulseSequence::from_spec(&TrajectorySpec::ocgt(Path::One, vec![P1_PATH1]))?;
    let gt = PulseSequence::from_spec(&TrajectorySpec::gt(Path::One))?;
    let amps: Vec<f64> = (0..16).map(|k| 1e-3 * 1.3f64.powi(k)).collect();

    for ch in Channel::ALL {
        let curve = |seq: &PulseSequence| -> geotgate::Result<Vec<f64>> {
            amps.iter().map(|&a| coherent_fidelity(seq, &CoherentNoise::single(ch, a))).collect()
        };
        let f_ocgt = curve(&ocgt)?;
        let f_gt = curve(&gt)?;
        let fit_ocgt = suppression_order(&FidelityCurve::new(ch, amps.clone(), f_ocgt.clone())?)?;
        let fit_gt = suppression_order(&FidelityCurve::new(ch, amps.clone(), f_gt)?)?;
        println!("{ch}:");
        println!("  GT   order {:.2}", fit_gt.order);
        println!(
            "  OCGT order {:.2}, coefficient {:.4} (expansion {:.4})",
            fit_ocgt.order,
            fit_ocgt.leading_coefficient,
            fourth_order_coefficient(ch)
        );
        let a = 0.05;
        let sim = coherent_fidelity(&ocgt, &CoherentNoise::single(ch, a))?;
        println!("  at {a}: simulated {sim:.10}, expansion {:.10}", fourth_order_fidelity(ch, a)?);
    }
    Ok(())
}

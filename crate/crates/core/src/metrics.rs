//! Gate fidelities, the fourth-order analytic expansions and suppression
//! order fits.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix, DensityOperator, StateVector, C64};

/// Coherent error channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Rabi,
    Detuning,
    Crosstalk,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Rabi, Channel::Detuning, Channel::Crosstalk];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Rabi => "rabi",
            Channel::Detuning => "detuning",
            Channel::Crosstalk => "crosstalk",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `|Tr(U†U₀)| / |Tr(U†U)|` with `U` the ideal gate.
///
/// If `noisy` acts on a space `k` times larger, the ideal is promoted to
/// `ideal ⊗ I_k`.
pub fn unitary_fidelity(ideal: &ComplexMatrix, noisy: &ComplexMatrix) -> Result<f64> {
    let (d, dn) = (ideal.dim(), noisy.dim());
    let promoted;
    let u = if dn == d {
        ideal
    } else if dn > d && dn % d == 0 {
        promoted = tensor(ideal, &ComplexMatrix::identity(dn / d));
        &promoted
    } else {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: dn,
        });
    };
    let num = u.adjoint().matmul(noisy).trace().norm();
    let den = u.adjoint().matmul(u).trace().norm();
    Ok(num / den)
}

/// The six probe states `|0⟩, |1⟩, (|0⟩ ± i|1⟩)/√2, (|0⟩ ± |1⟩)/√2`.
pub fn six_states() -> [StateVector; 6] {
    let s = FRAC_1_SQRT_2;
    let mk = |a: C64, b: C64| StateVector::new(vec![a, b]).expect("nonzero");
    [
        StateVector::basis(2, 0),
        StateVector::basis(2, 1),
        mk(C64::new(s, 0.0), C64::new(0.0, s)),
        mk(C64::new(s, 0.0), C64::new(0.0, -s)),
        mk(C64::new(s, 0.0), C64::new(s, 0.0)),
        mk(C64::new(s, 0.0), C64::new(-s, 0.0)),
    ]
}

pub const SIX_STATE_LABELS: [&str; 6] = ["0", "1", "+i", "-i", "+", "-"];

/// Six-state average `(1/6) Σ ⟨ψ_l|U† ρ_l(τ) U|ψ_l⟩`.
///
/// `evolve(l, ψ_l)` returns the final density operator of probe state `l`.
pub fn average_gate_fidelity<F>(ideal: &ComplexMatrix, evolve: F) -> Result<f64>
where
    F: FnMut(usize, &StateVector) -> Result<DensityOperator>,
{
    let idx: Vec<usize> = (0..ideal.dim()).collect();
    average_gate_fidelity_embedded(ideal, &idx, evolve)
}

/// As [`average_gate_fidelity`], but the final states live in a larger
/// space and the qubit sits at basis `indices`. Population outside those
/// indices counts as infidelity.
pub fn average_gate_fidelity_embedded<F>(
    ideal: &ComplexMatrix,
    indices: &[usize],
    mut evolve: F,
) -> Result<f64>
where
    F: FnMut(usize, &StateVector) -> Result<DensityOperator>,
{
    if ideal.dim() != 2 || indices.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ideal.dim(),
        });
    }
    let mut total = 0.0;
    for (l, psi) in six_states().iter().enumerate() {
        let rho = evolve(l, psi)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDensity(format!(
                "evolved state {l} has trace {tr:.9}"
            )));
        }
        let target = psi.evolve(ideal)?.embed(rho.dim(), indices);
        total += rho.expectation(&target);
    }
    Ok(total / 6.0)
}

/// Fourth-order expansions of the two-loop gate fidelity:
/// `1 − (π⁴/8) sin²(π/16) ε⁴`, `1 + (cos(π/8) − 1) δ⁴ − π sin(π/8) δ⁵`,
/// `1 + (cos(π/8) − 1) η⁴`.
pub fn fourth_order_fidelity(channel: Channel, amplitude: f64) -> Result<f64> {
    if !(amplitude.abs() <= 0.5) {
        return Err(Error::OutOfRange(format!(
            "expansion valid for |x| <= 0.5, got {amplitude}"
        )));
    }
    let x4 = amplitude.powi(4);
    Ok(match channel {
        Channel::Rabi => 1.0 - PI.powi(4) / 8.0 * (PI / 16.0).sin().powi(2) * x4,
        Channel::Detuning => {
            1.0 + ((PI / 8.0).cos() - 1.0) * x4 - PI * (PI / 8.0).sin() * amplitude.powi(5)
        }
        Channel::Crosstalk => 1.0 + ((PI / 8.0).cos() - 1.0) * x4,
    })
}

/// Leading quartic coefficient of the expansion for each channel.
pub fn fourth_order_coefficient(channel: Channel) -> f64 {
    match channel {
        Channel::Rabi => PI.powi(4) / 8.0 * (PI / 16.0).sin().powi(2),
        Channel::Detuning | Channel::Crosstalk => 1.0 - (PI / 8.0).cos(),
    }
}

/// Fidelity sampled along one error axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub channel: Channel,
    pub error_values: Vec<f64>,
    pub fidelities: Vec<f64>,
}

impl FidelityCurve {
    pub fn new(channel: Channel, error_values: Vec<f64>, fidelities: Vec<f64>) -> Result<Self> {
        if error_values.len() != fidelities.len() {
            return Err(Error::DimensionMismatch {
                expected: error_values.len(),
                got: fidelities.len(),
            });
        }
        if error_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Sweep("error grid must be strictly increasing".into()));
        }
        if let Some(f) = fidelities.iter().find(|f| !(**f <= 1.0 + 1e-12) || !f.is_finite()) {
            return Err(Error::Sweep(format!("fidelity {f} outside [0, 1]")));
        }
        Ok(Self {
            channel,
            error_values,
            fidelities,
        })
    }

    pub fn len(&self) -> usize {
        self.error_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.error_values.is_empty()
    }

    /// Averages `F(x)` and `F(−x)` over every mirrored pair, which cancels
    /// odd powers of the error. Returns the curve on the positive
    /// amplitudes that have a mirror, or `None` when there are none.
    pub fn even_part(&self) -> Option<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (i, &x) in self.error_values.iter().enumerate() {
            if x <= 0.0 {
                continue;
            }
            let mirror = self
                .error_values
                .iter()
                .position(|&y| (y + x).abs() <= 1e-12 * x);
            if let Some(j) = mirror {
                xs.push(x);
                fs.push(0.5 * (self.fidelities[i] + self.fidelities[j]));
            }
        }
        (!xs.is_empty()).then(|| Self {
            channel: self.channel,
            error_values: xs,
            fidelities: fs,
        })
    }
}

/// Power law `1 − F ≈ c |x|^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuppressionFit {
    pub order: f64,
    pub leading_coefficient: f64,
    /// RMS of the residuals of `ln(1 − F)`.
    pub fit_residual: f64,
    pub points_used: usize,
}

pub const FIT_WINDOW: (f64, f64) = (1e-10, 1e-2);

/// Least-squares slope of `ln(1 − F)` against `ln|x|` over points whose
/// infidelity lies in [`FIT_WINDOW`].
pub fn suppression_order(curve: &FidelityCurve) -> Result<SuppressionFit> {
    let pts: Vec<(f64, f64)> = curve
        .error_values
        .iter()
        .zip(&curve.fidelities)
        .filter_map(|(&x, &f)| {
            let inf = 1.0 - f;
            (x != 0.0 && inf >= FIT_WINDOW.0 && inf <= FIT_WINDOW.1)
                .then(|| (x.abs().ln(), inf.ln()))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!(
            "{} usable points in the infidelity window, need at least 4",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all usable points share one amplitude".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    if !(slope > 0.0) {
        return Err(Error::Fit(format!("non-positive slope {slope}")));
    }
    Ok(SuppressionFit {
        order: slope,
        leading_coefficient: intercept.exp(),
        fit_residual: (rss / n).sqrt(),
        points_used: pts.len(),
    })
}

//! Coherent error models: Rabi miscalibration, detuning drift, residual ZZ
//! crosstalk to spectators, and collective dephasing of the transmon pair.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, pauli, tensor, ComplexMatrix};
use crate::metrics::Channel;
use crate::propagate::HamiltonianSegment;
use crate::pulse::{PulseSegment, PulseSequence};
use crate::transmon::{number_operator, TWO_QUTRIT_DIM};

const MHZ: f64 = 2.0 * PI * 1e6;

/// Dimensionless error rates: `ε` scales the drive, `δ` and `η` are in
/// units of the Rabi frequency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherentNoise {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
}

impl CoherentNoise {
    pub fn new(epsilon: f64, delta: f64, eta: f64) -> Result<Self> {
        if ![epsilon, delta, eta].iter().all(|x| x.is_finite()) {
            return Err(Error::OutOfRange("noise amplitudes must be finite".into()));
        }
        Ok(Self {
            epsilon,
            delta,
            eta,
        })
    }

    /// Only the given channel switched on.
    pub fn single(channel: Channel, amplitude: f64) -> Self {
        let mut n = Self::default();
        match channel {
            Channel::Rabi => n.epsilon = amplitude,
            Channel::Detuning => n.delta = amplitude,
            Channel::Crosstalk => n.eta = amplitude,
        }
        n
    }
}

/// Hardware-level error amplitudes in rad/s: `g12 → g12 + ε′`,
/// `Δ → Δ + δ′`, and a spectator coupling `η′`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HardwareNoise {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
}

impl HardwareNoise {
    pub fn single(channel: Channel, amplitude: f64) -> Self {
        let mut n = Self::default();
        match channel {
            Channel::Rabi => n.epsilon = amplitude,
            Channel::Detuning => n.delta = amplitude,
            Channel::Crosstalk => n.eta = amplitude,
        }
        n
    }
}

/// Either flavor of coherent noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Dimensionless(CoherentNoise),
    Dimensionful(HardwareNoise),
}

/// Config form. Dimensionless fields and `_MHz` fields cannot be mixed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, rename = "epsilon_MHz", skip_serializing_if = "Option::is_none")]
    pub epsilon_mhz: Option<f64>,
    #[serde(default, rename = "delta_MHz", skip_serializing_if = "Option::is_none")]
    pub delta_mhz: Option<f64>,
    #[serde(default, rename = "eta_MHz", skip_serializing_if = "Option::is_none")]
    pub eta_mhz: Option<f64>,
}

impl NoiseDocument {
    pub fn to_model(&self) -> Result<NoiseModel> {
        let plain = [self.epsilon, self.delta, self.eta];
        let hw = [self.epsilon_mhz, self.delta_mhz, self.eta_mhz];
        let any_plain = plain.iter().any(Option::is_some);
        let any_hw = hw.iter().any(Option::is_some);
        if any_plain && any_hw {
            return Err(Error::Config(
                "noise block mixes dimensionless and _MHz error amplitudes".into(),
            ));
        }
        let v = |x: Option<f64>| x.unwrap_or(0.0);
        if any_hw {
            let n = HardwareNoise {
                epsilon: v(self.epsilon_mhz) * MHZ,
                delta: v(self.delta_mhz) * MHZ,
                eta: v(self.eta_mhz) * MHZ,
            };
            if ![n.epsilon, n.delta, n.eta].iter().all(|x| x.is_finite()) {
                return Err(Error::Config("noise amplitudes must be finite".into()));
            }
            Ok(NoiseModel::Dimensionful(n))
        } else {
            Ok(NoiseModel::Dimensionless(CoherentNoise::new(
                v(self.epsilon),
                v(self.delta),
                v(self.eta),
            )?))
        }
    }
}

/// Target ⊗ spectator Hamiltonian
/// `−½{(Δ + δΩ)σz + (1+ε)Ω(cos φ σx + sin φ σy)} ⊗ I + (ηΩ/2) σz ⊗ σz`.
pub fn perturbed_hamiltonian(segment: &PulseSegment, noise: &CoherentNoise) -> ComplexMatrix {
    let om = segment.rabi;
    let (s, c) = segment.phase.sin_cos();
    let drive = &pauli::x().scale_real(c) + &pauli::y().scale_real(s);
    let single = &pauli::z().scale_real(segment.detuning + noise.delta * om)
        + &drive.scale_real((1.0 + noise.epsilon) * om);
    let id = ComplexMatrix::identity(2);
    &tensor(&single, &id).scale_real(-0.5)
        + &tensor(&pauli::z(), &pauli::z()).scale_real(0.5 * noise.eta * om)
}

pub fn perturbed_segment_hamiltonian(
    segment: &PulseSegment,
    noise: &CoherentNoise,
) -> HamiltonianSegment {
    HamiltonianSegment::constant(perturbed_hamiltonian(segment, noise), segment.duration)
        .expect("perturbed Hamiltonian is Hermitian for finite inputs")
}

/// Exact 4×4 propagator of a sequence under coherent noise.
pub fn noisy_unitary(seq: &PulseSequence, noise: &CoherentNoise) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    for s in &seq.segments {
        u = expm_hermitian(&perturbed_hamiltonian(s, noise), s.duration).matmul(&u);
    }
    u
}

/// ZZ couplings between targets and spectators, and the spectators' fixed
/// `σz` eigenvalues.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CrosstalkTopology {
    couplings: BTreeMap<(usize, String), f64>,
    spectator_states: BTreeMap<String, i8>,
}

impl CrosstalkTopology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Three spectators `a, b, c` per target, identical coupling, all in
    /// `|0⟩`.
    pub fn uniform(targets: usize, eta: f64) -> Self {
        let mut t = Self::new();
        for i in 0..targets {
            for s in ["a", "b", "c"] {
                t.add_coupling(i, &format!("{}{s}", i + 1), eta);
            }
        }
        t
    }

    pub fn add_coupling(&mut self, target: usize, spectator: &str, eta: f64) {
        self.couplings.insert((target, spectator.to_string()), eta);
        self.spectator_states.entry(spectator.to_string()).or_insert(1);
    }

    /// Sets a spectator's `σz` eigenvalue, which must be `±1`.
    pub fn set_state(&mut self, spectator: &str, z: i8) -> Result<()> {
        if z != 1 && z != -1 {
            return Err(Error::OutOfRange(format!(
                "spectator z-eigenvalue must be +1 or -1, got {z}"
            )));
        }
        self.spectator_states.insert(spectator.to_string(), z);
        Ok(())
    }

    pub fn targets(&self) -> usize {
        self.couplings.keys().map(|k| k.0 + 1).max().unwrap_or(0)
    }
}

/// Replaces each spectator `σz` by its conserved eigenvalue. Returns the
/// coefficient `Σ_j η_ij z_ij / 2` multiplying `σz^(i)` for every target.
pub fn reduce_spectators(topology: &CrosstalkTopology) -> Vec<f64> {
    let mut shifts = vec![0.0; topology.targets()];
    for ((i, id), eta) in &topology.couplings {
        let z = *topology.spectator_states.get(id).unwrap_or(&1) as f64;
        shifts[*i] += eta * z / 2.0;
    }
    shifts
}

/// Two-transmon crosstalk term for reduced shifts `[s1, s2]`.
///
/// `σz` on a transmon is taken as `I − 2n`, which equals the qubit Pauli-Z
/// on the two lowest levels. The identity part is dropped.
pub fn crosstalk_h(shifts: &[f64]) -> Result<ComplexMatrix> {
    if shifts.len() > 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: shifts.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(TWO_QUTRIT_DIM);
    for (j, s) in shifts.iter().enumerate() {
        h = &h + &number_operator(j).scale_real(-2.0 * s);
    }
    Ok(h)
}

/// Collective dephasing strength `λ` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveDephasing {
    pub lambda: f64,
}

/// `λ (n1 + n2)` on the two-qutrit space.
pub fn collective_dephasing_h(lambda: f64) -> ComplexMatrix {
    (&number_operator(0) + &number_operator(1)).scale_real(lambda)
}

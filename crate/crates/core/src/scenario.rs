//! Single-point evaluators shared by sweeps, figures and the CLI.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{block_seeds, evolve_hermitian_batch, six_state_images, LindbladChannel};
use crate::linalg::{pauli, tensor, ComplexMatrix, StateVector};
use crate::metrics::{six_states, unitary_fidelity, Channel};
use crate::noise::{
    collective_dephasing_h, crosstalk_h, noisy_unitary, perturbed_segment_hamiltonian,
    reduce_spectators, CoherentNoise, CrosstalkTopology, HardwareNoise,
};
use crate::propagate::{default_step, HamiltonianSegment};
use crate::pulse::{t_gate, Path, PulseSequence, Scheme, TrajectorySpec};
use crate::transmon::{
    logical_rabi, simulate_logical_gate, Decoherence, LogicalGateResult, ParametricDrive,
    SimulationOptions, TransmonPair,
};

/// One megahertz as an angular frequency.
pub const MHZ: f64 = 2.0 * PI * 1e6;
/// One kilohertz as an angular frequency.
pub const KHZ: f64 = 2.0 * PI * 1e3;

/// Optimal free angle of the two-loop gate on each path.
pub const P1_PATH1: f64 = 1.0625 * PI;
pub const P1_PATH2: f64 = -1.9375 * PI;

/// Modulation index used for every logical-level result.
pub const STANDARD_BETA: f64 = 1.85;

/// Noise-free unitary fidelity of a two-level sequence against `T`,
/// including the spectator qubit.
pub fn coherent_fidelity(seq: &PulseSequence, noise: &CoherentNoise) -> Result<f64> {
    unitary_fidelity(&t_gate(), &noisy_unitary(seq, noise))
}

/// Six-state average fidelity of a two-level sequence with coherent noise,
/// decay `κ_-` and dephasing `κ_z` on the target. The spectator starts in
/// `|0⟩`.
pub fn open_system_fidelity(
    seq: &PulseSequence,
    noise: &CoherentNoise,
    kappa_minus: f64,
    kappa_z: f64,
    step: Option<f64>,
) -> Result<f64> {
    let segments: Vec<HamiltonianSegment> = seq
        .segments
        .iter()
        .map(|s| perturbed_segment_hamiltonian(s, noise))
        .collect();
    let id = ComplexMatrix::identity(2);
    let channels = vec![
        LindbladChannel::new(tensor(&pauli::lowering(), &id), kappa_minus)?,
        LindbladChannel::new(tensor(&pauli::z(), &id), kappa_z)?,
    ];
    let step = step.unwrap_or_else(|| default_step(&segments));
    // target ⊗ spectator, spectator in |0⟩
    let block = [0, 2];
    let out = evolve_hermitian_batch(&segments, &channels, block_seeds(4, block).to_vec(), step, |_, _| {})?;
    let finals = six_state_images(&out);
    let t = t_gate();
    let mut total = 0.0;
    for (psi, rho) in six_states().iter().zip(finals.iter()) {
        let target = psi.evolve(&t)?.embed(4, &block);
        total += quadratic_form(rho, &target);
    }
    Ok(total / 6.0)
}

fn quadratic_form(rho: &ComplexMatrix, psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    let v = rho.apply(a);
    a.iter().zip(&v).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Gate realized on the encoded qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LogicalScheme {
    /// Two-loop optimized gate with free angle `p1`.
    Ocgt { p1: f64 },
    Gt { path: Path },
    Dt,
}

impl LogicalScheme {
    pub fn standard_ocgt() -> Self {
        Self::Ocgt { p1: P1_PATH1 }
    }

    pub fn trajectory(&self) -> TrajectorySpec {
        match *self {
            Self::Ocgt { p1 } => TrajectorySpec::logical_ocgt(p1),
            Self::Gt { path } => TrajectorySpec::gt(path),
            Self::Dt => TrajectorySpec::dt(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Ocgt { .. } => "OCGT".into(),
            Self::Gt { path } => format!("GT{}", u8::from(*path)),
            Self::Dt => "DT".into(),
        }
    }

    pub fn from_spec(spec: &TrajectorySpec) -> Result<Self> {
        match spec.scheme {
            Scheme::LogicalOcgt => Ok(Self::Ocgt {
                p1: *spec.p.first().unwrap_or(&P1_PATH1),
            }),
            Scheme::Gt => Ok(Self::Gt { path: spec.path }),
            Scheme::Dt => Ok(Self::Dt),
            other => Err(Error::UnsupportedScheme(format!(
                "{other} has no logical-level realization"
            ))),
        }
    }
}

/// One hardware-level experiment on the encoded qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalScenario {
    pub scheme: LogicalScheme,
    pub pair: TransmonPair,
    pub beta: f64,
    pub decoherence: Decoherence,
    /// `ε′`, `δ′`, `η′` in rad/s.
    pub noise: HardwareNoise,
    /// Collective dephasing `λ`, rad/s.
    pub lambda: f64,
    /// Global offset of the modulation phase.
    pub phi: f64,
    pub step: Option<f64>,
}

impl LogicalScenario {
    /// `β = 1.85`, standard transmon pair at detuning `Δ` (rad/s), no noise,
    /// no decoherence.
    pub fn new(scheme: LogicalScheme, delta: f64) -> Self {
        Self {
            scheme,
            pair: TransmonPair::standard(delta),
            beta: STANDARD_BETA,
            decoherence: Decoherence::default(),
            noise: HardwareNoise::default(),
            lambda: 0.0,
            phi: 0.0,
            step: None,
        }
    }

    pub fn with_decoherence(mut self, d: Decoherence) -> Self {
        self.decoherence = d;
        self
    }

    pub fn with_noise(mut self, n: HardwareNoise) -> Self {
        self.noise = n;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_step(mut self, step: Option<f64>) -> Self {
        self.step = step;
        self
    }

    pub fn sequence(&self) -> Result<PulseSequence> {
        let omega_l = logical_rabi(&self.pair, self.beta)?;
        if !(omega_l > 0.0) {
            return Err(Error::OutOfRange(format!(
                "modulation index {} gives no logical coupling",
                self.beta
            )));
        }
        PulseSequence::from_spec(&self.scheme.trajectory().with_rabi(omega_l))
    }

    /// Static terms added to the interaction-frame Hamiltonian.
    pub fn extra_hamiltonian(&self) -> Result<Option<ComplexMatrix>> {
        let mut h = None;
        if self.lambda != 0.0 {
            h = Some(collective_dephasing_h(self.lambda));
        }
        if self.noise.eta != 0.0 {
            let shifts = reduce_spectators(&CrosstalkTopology::uniform(2, self.noise.eta));
            let x = crosstalk_h(&shifts)?;
            h = Some(match h {
                Some(a) => &a + &x,
                None => x,
            });
        }
        Ok(h)
    }

    pub fn run(&self, samples: usize) -> Result<LogicalGateResult> {
        let seq = self.sequence()?;
        let drive = ParametricDrive::resonant(&self.pair, self.beta, self.phi)?;
        let channels = self.decoherence.channels()?;
        let extra = self.extra_hamiltonian()?;
        let options = SimulationOptions {
            step: self.step,
            samples,
            rabi_error: self.noise.epsilon,
            detuning_error: self.noise.delta,
        };
        simulate_logical_gate(&seq, &self.pair, &drive, &channels, extra.as_ref(), &options)
    }

    pub fn fidelity(&self) -> Result<f64> {
        Ok(self.run(0)?.fidelity)
    }
}

/// Detuning (rad/s) at which each logical scheme is benchmarked.
pub fn benchmark_delta(scheme: &LogicalScheme) -> f64 {
    let mhz = match scheme {
        LogicalScheme::Ocgt { .. } => 462.0,
        LogicalScheme::Gt { path: Path::One } => 466.0,
        LogicalScheme::Gt { path: Path::Two } => 488.0,
        LogicalScheme::Dt => 570.0,
    };
    mhz * MHZ
}

/// Path of the single-loop gate that is less sensitive to `channel`.
pub fn robust_gt_path(channel: Channel) -> Path {
    match channel {
        Channel::Rabi => Path::One,
        Channel::Detuning | Channel::Crosstalk => Path::Two,
    }
}

/// Free angle of the two-loop gate on `path`.
pub fn optimal_p1(path: Path) -> f64 {
    match path {
        Path::One => P1_PATH1,
        Path::Two => P1_PATH2,
    }
}

/// Three-loop optimum `p1 = p2` for `path`.
pub fn optimal_p_three_loop(path: Path) -> f64 {
    match path {
        Path::One => 1.375 * PI,
        Path::Two => -1.625 * PI,
    }
}

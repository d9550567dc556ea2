//! Two parametrically coupled three-level transmons and the logical qubit
//! encoded in their single-excitation subspace.
//!
//! Basis ordering: `|n1 n2⟩ ↦ 3·n1 + n2`. Logical `|0_L⟩ = |10⟩`,
//! `|1_L⟩ = |01⟩`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{block_seeds, evolve_hermitian_batch, six_state_images, LindbladChannel};
use crate::linalg::{tensor, ComplexMatrix, StateVector, C64, ONE, ZERO};
use crate::metrics::{six_states, unitary_fidelity};
use crate::propagate::{default_step, HamiltonianSegment};
use crate::pulse::{t_gate, PulseSequence};
use crate::special::bessel_j;

pub const LEVELS: usize = 3;
pub const TWO_QUTRIT_DIM: usize = LEVELS * LEVELS;

pub const fn basis_index(n1: usize, n2: usize) -> usize {
    LEVELS * n1 + n2
}

/// `[|10⟩, |01⟩]`
pub const DFS: [usize; 2] = [basis_index(1, 0), basis_index(0, 1)];

const MHZ: f64 = 2.0 * PI * 1e6;
const KHZ: f64 = 2.0 * PI * 1e3;

/// `diag(0, 1, 2)` on transmon `j` (0 or 1).
pub fn number_operator(j: usize) -> ComplexMatrix {
    let n = ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0]);
    embed_single(j, &n)
}

/// `|0⟩⟨1| + √2 |1⟩⟨2|` on transmon `j`.
pub fn lowering_operator(j: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(LEVELS);
    a[(0, 1)] = ONE;
    a[(1, 2)] = C64::new(SQRT_2, 0.0);
    embed_single(j, &a)
}

fn embed_single(j: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(LEVELS);
    match j {
        0 => tensor(op, &id),
        1 => tensor(&id, op),
        _ => panic!("transmon index {j} out of range"),
    }
}

/// Transition frequencies, anharmonicities and coupling, all rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonPair {
    omega1: f64,
    omega2: f64,
    alpha1: f64,
    alpha2: f64,
    g12: f64,
}

impl TransmonPair {
    pub fn new(omega1: f64, omega2: f64, alpha1: f64, alpha2: f64, g12: f64) -> Result<Self> {
        if ![omega1, omega2, alpha1, alpha2, g12].iter().all(|x| x.is_finite()) {
            return Err(Error::OutOfRange("transmon parameters must be finite".into()));
        }
        if !(alpha1 > 0.0 && alpha2 > 0.0) {
            return Err(Error::OutOfRange(format!(
                "anharmonicities must be positive, got {alpha1}, {alpha2}"
            )));
        }
        if g12 < 0.0 {
            return Err(Error::OutOfRange(format!("coupling must be >= 0, got {g12}")));
        }
        Ok(Self {
            omega1,
            omega2,
            alpha1,
            alpha2,
            g12,
        })
    }

    /// `ω2 = 2π × 5 GHz`, `ω1 = ω2 + Δ`. Only `Δ` enters the dynamics.
    pub fn with_detuning(delta: f64, alpha1: f64, alpha2: f64, g12: f64) -> Result<Self> {
        let omega2 = 2.0 * PI * 5e9;
        Self::new(omega2 + delta, omega2, alpha1, alpha2, g12)
    }

    /// `g12 = 2π×10 MHz`, `α1 = α2 = 2π×220 MHz`.
    pub fn standard(delta: f64) -> Self {
        Self::with_detuning(delta, 220.0 * MHZ, 220.0 * MHZ, 10.0 * MHZ)
            .expect("standard parameters are valid")
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }
    pub fn omega2(&self) -> f64 {
        self.omega2
    }
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn g12(&self) -> f64 {
        self.g12
    }
    /// `ω1 − ω2`
    pub fn delta(&self) -> f64 {
        self.omega1 - self.omega2
    }

    pub fn with_g12(mut self, g12: f64) -> Result<Self> {
        if !(g12 >= 0.0) {
            return Err(Error::OutOfRange(format!("coupling must be >= 0, got {g12}")));
        }
        self.g12 = g12;
        Ok(self)
    }
}

/// Frequency modulation `f(t) = −β cos(νt + φ)` on transmon 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricDrive {
    beta: f64,
    nu: f64,
    phi: f64,
}

impl ParametricDrive {
    pub fn new(beta: f64, nu: f64, phi: f64) -> Result<Self> {
        if !(0.0..=5.0).contains(&beta) {
            return Err(Error::OutOfRange(format!("modulation index {beta} outside [0, 5]")));
        }
        if !nu.is_finite() || !phi.is_finite() {
            return Err(Error::OutOfRange("drive frequency and phase must be finite".into()));
        }
        Ok(Self { beta, nu, phi })
    }

    /// `ν = Δ`, the branch that drives `|10⟩ ↔ |01⟩`.
    pub fn resonant(pair: &TransmonPair, beta: f64, phi: f64) -> Result<Self> {
        Self::new(beta, pair.delta(), phi)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    fn check_resonant(&self, pair: &TransmonPair) -> Result<()> {
        let d = pair.delta();
        if (self.nu - d).abs() > 1e-9 * d.abs().max(1.0) {
            return Err(Error::OffResonant { nu: self.nu, delta: d });
        }
        Ok(())
    }
}

/// Truncation used by the Jacobi–Anger diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub levels_per_transmon: usize,
    pub bessel_order_cap: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            levels_per_transmon: LEVELS,
            bessel_order_cap: 20,
        }
    }
}

impl TruncationSpec {
    pub fn new(bessel_order_cap: usize) -> Result<Self> {
        if !(5..=40).contains(&bessel_order_cap) {
            return Err(Error::OutOfRange(format!(
                "Bessel order cap {bessel_order_cap} outside [5, 40]"
            )));
        }
        Ok(Self {
            levels_per_transmon: LEVELS,
            bessel_order_cap,
        })
    }
}

/// Logical encoding `|0_L⟩ = |10⟩`, `|1_L⟩ = |01⟩`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogicalEncoding;

impl LogicalEncoding {
    pub fn indices(&self) -> [usize; 2] {
        DFS
    }

    pub fn encode(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: psi.dim(),
            });
        }
        Ok(psi.embed(TWO_QUTRIT_DIM, &DFS))
    }

    /// `U` on the logical block, identity on the leakage space.
    pub fn promote(&self, u: &ComplexMatrix) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(TWO_QUTRIT_DIM);
        for (a, &i) in DFS.iter().enumerate() {
            for (b, &j) in DFS.iter().enumerate() {
                m[(i, j)] = u[(a, b)];
            }
        }
        m
    }

    pub fn leakage(&self, populations_dfs: f64) -> f64 {
        1.0 - populations_dfs
    }
}

/// Interaction-picture parameters that can deviate from nominal.
#[derive(Debug, Clone, Copy)]
struct FrameParams {
    g: f64,
    delta: f64,
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    nu: f64,
}

fn interaction_h(t: f64, p: &FrameParams, phi: f64) -> ComplexMatrix {
    let modulation = C64::from_polar(1.0, p.beta * (p.nu * t + phi).cos());
    let mut h = ComplexMatrix::zeros(TWO_QUTRIT_DIM);
    let mut put = |r: usize, c: usize, amp: f64, freq: f64| {
        let v = C64::from_polar(amp, freq * t) * modulation;
        h[(r, c)] = v;
        h[(c, r)] = v.conj();
    };
    put(basis_index(1, 0), basis_index(0, 1), p.g, p.delta);
    put(basis_index(2, 0), basis_index(1, 1), SQRT_2 * p.g, p.delta - p.alpha1);
    put(basis_index(1, 1), basis_index(0, 2), SQRT_2 * p.g, p.delta + p.alpha2);
    h
}

/// Full interaction-picture Hamiltonian
/// `g12 {[|10⟩⟨01| e^{iΔt} + √2|20⟩⟨11| e^{i(Δ−α1)t} + √2|11⟩⟨02| e^{i(Δ+α2)t}] e^{iβ cos(νt+φ)} + H.c.}`.
///
/// The modulation factor is evaluated directly; `_trunc` only matters for
/// [`high_freq_norm`].
pub fn full_interaction_h(
    t: f64,
    pair: &TransmonPair,
    drive: &ParametricDrive,
    _trunc: &TruncationSpec,
) -> ComplexMatrix {
    interaction_h(t, &frame(pair, drive, 0.0, 0.0), drive.phi)
}

fn frame(pair: &TransmonPair, drive: &ParametricDrive, d_g: f64, d_delta: f64) -> FrameParams {
    FrameParams {
        g: pair.g12 + d_g,
        delta: pair.delta() + d_delta,
        alpha1: pair.alpha1,
        alpha2: pair.alpha2,
        beta: drive.beta,
        nu: drive.nu,
    }
}

/// `Ω_L = 2 J1(β) g12`.
pub fn logical_rabi(pair: &TransmonPair, beta: f64) -> Result<f64> {
    Ok(2.0 * bessel_j(1, beta)? * pair.g12)
}

/// Resonant two-level model `(Ω_L/2)(e^{−iφ_L}|0_L⟩⟨1_L| + h.c.)` with
/// `φ_L = φ − π/2`.
pub fn effective_logical_h(pair: &TransmonPair, drive: &ParametricDrive) -> Result<ComplexMatrix> {
    drive.check_resonant(pair)?;
    let omega_l = logical_rabi(pair, drive.beta)?;
    let phi_l = drive.phi - FRAC_PI_2;
    let off = C64::from_polar(0.5 * omega_l, -phi_l);
    ComplexMatrix::from_rows(&[vec![ZERO, off], vec![off.conj(), ZERO]])
}

/// Root-sum-square of `|J_m(β)| g12 / |Δ + mν|` over `m ≠ −1`,
/// `|m| ≤ M_max`. A ranking proxy for off-resonant leakage.
pub fn high_freq_norm(
    pair: &TransmonPair,
    drive: &ParametricDrive,
    trunc: &TruncationSpec,
) -> Result<f64> {
    drive.check_resonant(pair)?;
    let cap = trunc.bessel_order_cap as i32;
    let mut sum = 0.0;
    for m in -cap..=cap {
        if m == -1 {
            continue;
        }
        let w = (pair.delta() + m as f64 * drive.nu).abs();
        let term = bessel_j(m, drive.beta)?.abs() * pair.g12 / w;
        sum += term * term;
    }
    Ok(sum.sqrt())
}

/// Per-transmon relaxation and dephasing rates, rad/s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Decoherence {
    pub kappa_minus: [f64; 2],
    pub kappa_z: [f64; 2],
}

impl Decoherence {
    pub fn uniform(kappa_minus: f64, kappa_z: f64) -> Self {
        Self {
            kappa_minus: [kappa_minus; 2],
            kappa_z: [kappa_z; 2],
        }
    }

    /// `κ_- = κ_z = 2π × 2 kHz` on both transmons.
    pub fn standard() -> Self {
        Self::uniform(2.0 * KHZ, 2.0 * KHZ)
    }

    /// `σ_-^(j)` and `σ_z^(j) = n_j` channels.
    pub fn channels(&self) -> Result<Vec<LindbladChannel>> {
        let mut out = Vec::new();
        for j in 0..2 {
            out.push(LindbladChannel::new(lowering_operator(j), self.kappa_minus[j])?);
            out.push(LindbladChannel::new(number_operator(j), self.kappa_z[j])?);
        }
        Ok(out)
    }
}

/// Knobs for [`simulate_logical_gate`].
#[derive(Debug, Clone, Default)]
pub struct SimulationOptions {
    /// Integration step; default keeps `max‖H‖·step ≤ 1e-3`.
    pub step: Option<f64>,
    /// Approximate number of recorded trace samples (0 disables traces).
    pub samples: usize,
    /// `g12 → g12 + ε′`, rad/s.
    pub rabi_error: f64,
    /// `Δ → Δ + δ′` in the transition phases, rad/s; the drive keeps `ν`.
    pub detuning_error: f64,
}

/// Populations of one probe state along the gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTrace {
    pub label: &'static str,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub leakage: Vec<f64>,
    /// `⟨Tψ|ρ(t)|Tψ⟩` against the final target.
    pub overlap: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalGateResult {
    /// Six-state average fidelity against `T` on the logical block.
    pub fidelity: f64,
    pub state_fidelities: [f64; 6],
    /// Largest final leakage over the six probe states.
    pub final_leakage: f64,
    pub step: f64,
    pub times: Vec<f64>,
    pub traces: Vec<StateTrace>,
}

/// Physical segments for a logical sequence: each segment restarts the
/// interaction-frame clock at zero with `φ = φ_L + π/2 + φ_drive`, where
/// `φ_drive` is a global offset (a frame rotation that commutes with `T`).
pub fn logical_segments(
    seq: &PulseSequence,
    pair: &TransmonPair,
    drive: &ParametricDrive,
    extra_h: Option<&ComplexMatrix>,
    options: &SimulationOptions,
) -> Result<Vec<HamiltonianSegment>> {
    drive.check_resonant(pair)?;
    let omega_l = logical_rabi(pair, drive.beta)?;
    if !(omega_l > 0.0) {
        return Err(Error::InvalidPulse("logical Rabi frequency vanishes".into()));
    }
    if let Some(x) = extra_h {
        if x.dim() != TWO_QUTRIT_DIM {
            return Err(Error::DimensionMismatch {
                expected: TWO_QUTRIT_DIM,
                got: x.dim(),
            });
        }
    }
    let params = frame(pair, drive, options.rabi_error, options.detuning_error);
    let mut out = Vec::with_capacity(seq.segments.len());
    for s in &seq.segments {
        if s.detuning != 0.0 {
            return Err(Error::InvalidPulse(
                "logical segments must be resonant".into(),
            ));
        }
        if (s.rabi - omega_l).abs() > 1e-9 * omega_l {
            return Err(Error::InvalidPulse(format!(
                "segment Rabi {:.6e} rad/s differs from Omega_L = {:.6e} rad/s",
                s.rabi, omega_l
            )));
        }
        let phi = s.phase + FRAC_PI_2 + drive.phi;
        let extra = extra_h.cloned();
        let seg = HamiltonianSegment::time_dependent(TWO_QUTRIT_DIM, s.duration, move |t| {
            let h = interaction_h(t, &params, phi);
            match &extra {
                Some(x) => &h + x,
                None => h,
            }
        })?;
        out.push(seg);
    }
    Ok(out)
}

/// Runs a logical pulse sequence through the full two-transmon model.
///
/// Without decoherence the two logical basis states are propagated as pure
/// states. Otherwise four Hermitian operators spanning the logical block
/// are evolved under the master equation and recombined into the six probe
/// states.
pub fn simulate_logical_gate(
    seq: &PulseSequence,
    pair: &TransmonPair,
    drive: &ParametricDrive,
    decoherence: &[LindbladChannel],
    extra_h: Option<&ComplexMatrix>,
    options: &SimulationOptions,
) -> Result<LogicalGateResult> {
    let segments = logical_segments(seq, pair, drive, extra_h, options)?;
    let step = match options.step {
        Some(s) => s,
        None => default_step(&segments),
    };
    let duration: f64 = segments.iter().map(HamiltonianSegment::duration).sum();
    let total_steps: usize = segments
        .iter()
        .map(|s| crate::propagate::substeps(s.duration(), step.max(f64::MIN_POSITIVE)))
        .sum();
    let stride = if options.samples == 0 {
        usize::MAX
    } else {
        (total_steps / options.samples).max(1)
    };

    let targets: Vec<StateVector> = six_states()
        .iter()
        .map(|psi| Ok(psi.evolve(&t_gate())?.embed(TWO_QUTRIT_DIM, &DFS)))
        .collect::<Result<_>>()?;
    let mut recorder = Recorder::new(stride, &targets);

    let dissipative = decoherence.iter().any(|c| c.rate() > 0.0);
    let finals: [ComplexMatrix; 6] = if dissipative {
        let seeds = block_seeds(TWO_QUTRIT_DIM, DFS);
        let out = evolve_hermitian_batch(&segments, decoherence, seeds.to_vec(), step, |t, b| {
            recorder.offer(t, || six_state_images(b));
        })?;
        six_state_images(&out)
    } else {
        let basis = [
            StateVector::basis(TWO_QUTRIT_DIM, DFS[0]),
            StateVector::basis(TWO_QUTRIT_DIM, DFS[1]),
        ];
        let out = evolve_pure_pair(&segments, basis, step, |t, v| {
            recorder.offer(t, || pure_probes(v));
        })?;
        pure_probes(&out)
    };
    recorder.finish(duration, || finals.clone());

    let mut state_fidelities = [0.0; 6];
    let mut final_leakage: f64 = 0.0;
    for l in 0..6 {
        state_fidelities[l] = expectation(&finals[l], &targets[l]);
        let in_dfs = finals[l][(DFS[0], DFS[0])].re + finals[l][(DFS[1], DFS[1])].re;
        final_leakage = final_leakage.max(1.0 - in_dfs);
    }
    Ok(LogicalGateResult {
        fidelity: state_fidelities.iter().sum::<f64>() / 6.0,
        state_fidelities,
        final_leakage,
        step,
        times: recorder.times,
        traces: recorder.traces,
    })
}

/// Probe-state density operators from the images of `|0_L⟩`, `|1_L⟩`.
fn pure_probes(v: &[Vec<C64>; 2]) -> [ComplexMatrix; 6] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mix = |c0: C64, c1: C64| -> ComplexMatrix {
        let amp: Vec<C64> = v[0].iter().zip(&v[1]).map(|(a, b)| c0 * a + c1 * b).collect();
        let mut m = ComplexMatrix::zeros(TWO_QUTRIT_DIM);
        for r in 0..TWO_QUTRIT_DIM {
            for c in 0..TWO_QUTRIT_DIM {
                m[(r, c)] = amp[r] * amp[c].conj();
            }
        }
        m
    };
    let (o, z) = (ONE, ZERO);
    let h = C64::new(s, 0.0);
    [
        mix(o, z),
        mix(z, o),
        mix(h, C64::new(0.0, s)),
        mix(h, C64::new(0.0, -s)),
        mix(h, h),
        mix(h, -h),
    ]
}

fn expectation(rho: &ComplexMatrix, psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    let v = rho.apply(a);
    a.iter().zip(&v).map(|(x, y)| x.conj() * y).sum::<C64>().re
}

/// Fixed-step RK4 on two state vectors; `observe` sees every step.
fn evolve_pure_pair<F>(
    segments: &[HamiltonianSegment],
    init: [StateVector; 2],
    step: f64,
    mut observe: F,
) -> Result<[Vec<C64>; 2]>
where
    F: FnMut(f64, &[Vec<C64>; 2]),
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step));
    }
    let mut v = [init[0].amplitudes().to_vec(), init[1].amplitudes().to_vec()];
    let n = TWO_QUTRIT_DIM;
    let deriv = |h: &ComplexMatrix, x: &[C64], out: &mut [C64]| {
        let m = h.as_slice();
        for r in 0..n {
            let mut acc = ZERO;
            for c in 0..n {
                let e = m[r * n + c];
                if e != ZERO {
                    acc += e * x[c];
                }
            }
            out[r] = C64::new(acc.im, -acc.re); // −i·acc
        }
    };
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    let mut t0 = 0.0;
    observe(0.0, &v);
    for seg in segments {
        let count = crate::propagate::substeps(seg.duration(), step);
        let dt = seg.duration() / count as f64;
        let gen = seg.generator();
        let mut h_start = gen.at(0.0);
        for s in 0..count {
            let tl = s as f64 * dt;
            let h_mid = gen.at(tl + 0.5 * dt);
            let h_end = gen.at(tl + dt);
            for x in v.iter_mut() {
                deriv(&h_start, x, &mut k1);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * dt * k1[i];
                }
                deriv(&h_mid, &tmp, &mut k2);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * dt * k2[i];
                }
                deriv(&h_mid, &tmp, &mut k3);
                for i in 0..n {
                    tmp[i] = x[i] + dt * k3[i];
                }
                deriv(&h_end, &tmp, &mut k4);
                for i in 0..n {
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            h_start = h_end;
            let t = t0 + tl + dt;
            let norm: f64 = v[0].iter().map(|z| z.norm_sqr()).sum();
            if !((norm - 1.0).abs() < 1e-6) {
                return Err(Error::NonConvergence(format!(
                    "norm drift {:.3e} at t = {t:.6e} s; reduce the step",
                    norm - 1.0
                )));
            }
            observe(t, &v);
        }
        t0 += seg.duration();
    }
    Ok(v)
}

struct Recorder<'a> {
    stride: usize,
    counter: usize,
    last_recorded: Option<usize>,
    targets: &'a [StateVector],
    times: Vec<f64>,
    traces: Vec<StateTrace>,
}

impl<'a> Recorder<'a> {
    fn new(stride: usize, targets: &'a [StateVector]) -> Self {
        let traces = crate::metrics::SIX_STATE_LABELS
            .iter()
            .map(|&label| StateTrace {
                label,
                p0: Vec::new(),
                p1: Vec::new(),
                leakage: Vec::new(),
                overlap: Vec::new(),
            })
            .collect();
        Self {
            stride,
            counter: 0,
            last_recorded: None,
            targets,
            times: Vec::new(),
            traces,
        }
    }

    fn offer<F: FnOnce() -> [ComplexMatrix; 6]>(&mut self, t: f64, states: F) {
        if self.stride != usize::MAX && self.counter % self.stride == 0 {
            self.record(t, &states());
            self.last_recorded = Some(self.counter);
        }
        self.counter += 1;
    }

    fn finish<F: FnOnce() -> [ComplexMatrix; 6]>(&mut self, t: f64, states: F) {
        if self.stride == usize::MAX {
            return;
        }
        if self.last_recorded != Some(self.counter.saturating_sub(1)) {
            self.record(t, &states());
        }
    }

    fn record(&mut self, t: f64, rhos: &[ComplexMatrix; 6]) {
        self.times.push(t);
        for (l, rho) in rhos.iter().enumerate() {
            let p0 = rho[(DFS[0], DFS[0])].re;
            let p1 = rho[(DFS[1], DFS[1])].re;
            let tr = &mut self.traces[l];
            tr.p0.push(p0);
            tr.p1.push(p1);
            tr.leakage.push((1.0 - p0 - p1).clamp(0.0, 1.0));
            tr.overlap.push(expectation(rho, &self.targets[l]));
        }
    }
}

/// Six-state fidelity of a logical sequence in the ideal two-level model
/// `H_L`, optionally with an extra 2×2 term.
pub fn effective_model_fidelity(seq: &PulseSequence, extra: Option<&ComplexMatrix>) -> Result<f64> {
    let mut u = ComplexMatrix::identity(2);
    for s in &seq.segments {
        let mut h = s.hamiltonian();
        if let Some(x) = extra {
            h = &h + x;
        }
        u = crate::linalg::expm_hermitian(&h, s.duration).matmul(&u);
    }
    let t = t_gate();
    let mut total = 0.0;
    for psi in six_states() {
        let ov = psi.evolve(&t)?.inner(&psi.evolve(&u)?);
        total += ov.norm_sqr();
    }
    Ok(total / 6.0)
}

/// Comparison baseline without encoding: the same sequence on a bare
/// two-level qubit with a dephasing term `λ|1⟩⟨1|`.
pub fn no_dfs_baseline_fidelity(seq: &PulseSequence, lambda: f64) -> Result<f64> {
    let h = ComplexMatrix::from_real_diag(&[0.0, lambda]);
    effective_model_fidelity(seq, Some(&h))
}

/// Unitary fidelity of the effective two-level model, for cross-checks.
pub fn effective_model_unitary_fidelity(seq: &PulseSequence) -> Result<f64> {
    unitary_fidelity(&t_gate(), &seq.propagate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{phase_invariant_distance, DensityOperator};
    use crate::lindblad::propagate_lindblad;
    use crate::metrics::average_gate_fidelity_embedded;
    use crate::pulse::{build_logical_ocgt, T_GAMMA};
    use proptest::prelude::*;

    fn pair() -> TransmonPair {
        TransmonPair::standard(462.0 * MHZ)
    }

    #[test]
    fn operators() {
        let n1 = number_operator(0);
        assert_eq!(n1[(basis_index(2, 1), basis_index(2, 1))].re, 2.0);
        assert_eq!(n1[(basis_index(0, 2), basis_index(0, 2))].re, 0.0);
        let a2 = lowering_operator(1);
        assert_eq!(a2[(basis_index(1, 1), basis_index(1, 2))].re, SQRT_2);
        assert_eq!(a2[(basis_index(0, 0), basis_index(0, 1))].re, 1.0);
    }

    #[test]
    fn interaction_h_cases() {
        let p = pair();
        let trunc = TruncationSpec::default();
        let d0 = ParametricDrive::resonant(&p, 0.0, 0.3).unwrap();
        let h = full_interaction_h(1.3e-9, &p, &d0, &trunc);
        let want = C64::from_polar(p.g12(), p.delta() * 1.3e-9);
        assert!((h[(basis_index(1, 0), basis_index(0, 1))] - want).norm() < 1e-6);

        let d = ParametricDrive::resonant(&p, 1.85, 0.0).unwrap();
        let h0 = full_interaction_h(0.0, &p, &d, &trunc);
        let want = C64::from_polar(p.g12(), 1.85);
        assert!((h0[(basis_index(1, 0), basis_index(0, 1))] - want).norm() < 1e-6);
        for &t in &[0.0, 1e-9, 7.7e-8] {
            let h = full_interaction_h(t, &p, &d, &trunc);
            let e = h[(basis_index(2, 0), basis_index(1, 1))].norm();
            assert!((e - SQRT_2 * p.g12()).abs() < 1e-6);
        }
    }

    #[test]
    fn effective_h_cases() {
        let p = pair();
        let d = ParametricDrive::resonant(&p, 1.85, FRAC_PI_2).unwrap();
        let h = effective_logical_h(&p, &d).unwrap();
        let om = 2.0 * bessel_j(1, 1.85).unwrap() * 10.0 * MHZ;
        assert!((om / MHZ - 11.637).abs() < 1e-3);
        assert!((h[(0, 1)] - C64::new(om / 2.0, 0.0)).norm() < 1e-6);
        assert!(h[(0, 1)].im.abs() < 1e-6);
        let d0 = ParametricDrive::resonant(&p, 0.0, 0.0).unwrap();
        assert_eq!(logical_rabi(&p, d0.beta()).unwrap(), 0.0);
        let off = ParametricDrive::new(1.85, p.delta() * 1.01, 0.0).unwrap();
        assert!(matches!(effective_logical_h(&p, &off), Err(Error::OffResonant { .. })));
    }

    #[test]
    fn high_freq_norm_cases() {
        let trunc = TruncationSpec::default();
        let p0 = TransmonPair::with_detuning(462.0 * MHZ, 220.0 * MHZ, 220.0 * MHZ, 0.0).unwrap();
        let d = ParametricDrive::resonant(&p0, 1.85, 0.0).unwrap();
        assert_eq!(high_freq_norm(&p0, &d, &trunc).unwrap(), 0.0);
        assert!(TruncationSpec::new(4).is_err());
    }

    #[test]
    fn rejects_mismatched_sequence() {
        let p = pair();
        let d = ParametricDrive::resonant(&p, 1.85, 0.0).unwrap();
        let seq = build_logical_ocgt(1e6, T_GAMMA, 1.0625 * PI).unwrap();
        assert!(simulate_logical_gate(&seq, &p, &d, &[], None, &SimulationOptions::default()).is_err());
    }

    /// Four-seed recombination against six independent master-equation runs.
    #[test]
    fn seed_recombination_matches_direct_runs() {
        let p = TransmonPair::standard(300.0 * MHZ);
        let d = ParametricDrive::resonant(&p, 1.85, 0.0).unwrap();
        let om = logical_rabi(&p, 1.85).unwrap();
        let seq = build_logical_ocgt(om, T_GAMMA, 1.0625 * PI).unwrap();
        // strong decoherence so the channels matter at this accuracy
        let dec = Decoherence::uniform(2.0 * PI * 200e3, 2.0 * PI * 100e3).channels().unwrap();
        let opts = SimulationOptions {
            step: Some(2e-11),
            ..Default::default()
        };
        let fast = simulate_logical_gate(&seq, &p, &d, &dec, None, &opts).unwrap();

        let segs = logical_segments(&seq, &p, &d, None, &opts).unwrap();
        let direct = average_gate_fidelity_embedded(&t_gate(), &DFS, |_, psi| {
            let rho0 = DensityOperator::pure(&psi.embed(TWO_QUTRIT_DIM, &DFS));
            Ok(propagate_lindblad(&segs, &dec, &rho0, 2e-11, 1)?.final_state().clone())
        })
        .unwrap();
        assert!((fast.fidelity - direct).abs() < 1e-12, "{} vs {}", fast.fidelity, direct);
        assert!(fast.fidelity < 0.99);
    }

    #[test]
    fn pure_path_matches_lindblad_path_without_noise() {
        let p = TransmonPair::standard(300.0 * MHZ);
        let d = ParametricDrive::resonant(&p, 1.85, 0.0).unwrap();
        let om = logical_rabi(&p, 1.85).unwrap();
        let seq = build_logical_ocgt(om, T_GAMMA, 1.0625 * PI).unwrap();
        let opts = SimulationOptions {
            step: Some(2e-11),
            samples: 10,
            ..Default::default()
        };
        let pure = simulate_logical_gate(&seq, &p, &d, &[], None, &opts).unwrap();
        let zero = Decoherence::uniform(0.0, 0.0).channels().unwrap();
        let dens = {
            let segs = logical_segments(&seq, &p, &d, None, &opts).unwrap();
            let out = evolve_hermitian_batch(&segs, &zero, block_seeds(TWO_QUTRIT_DIM, DFS).to_vec(), 2e-11, |_, _| {}).unwrap();
            let fin = six_state_images(&out);
            let t = t_gate();
            six_states()
                .iter()
                .zip(fin.iter())
                .map(|(psi, rho)| expectation(rho, &psi.evolve(&t).unwrap().embed(9, &DFS)))
                .sum::<f64>()
                / 6.0
        };
        assert!((pure.fidelity - dens).abs() < 1e-8, "{} vs {}", pure.fidelity, dens);
        assert!(!pure.times.is_empty());
        assert!(pure.traces[0].leakage.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!((pure.times.last().unwrap() - seq.duration()).abs() < 1e-15);
    }

    #[test]
    fn promote_is_block_diagonal() {
        let m = LogicalEncoding.promote(&t_gate());
        assert!(phase_invariant_distance(&m.restrict(&DFS), &t_gate()) < 1e-15);
        assert_eq!(m[(0, 0)], ONE);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn interaction_h_is_hermitian(t in 0.0f64..2e-7, beta in 0.0f64..3.0, phi in -4.0f64..4.0) {
            let p = pair();
            let d = ParametricDrive::resonant(&p, beta, phi).unwrap();
            let h = full_interaction_h(t, &p, &d, &TruncationSpec::default());
            prop_assert!(h.hermiticity_error() < 1e-12 * h.norm_max().max(1.0));
        }

        #[test]
        fn high_freq_norm_decreases_with_delta(d1 in 150.0f64..700.0, extra in 10.0f64..100.0, beta in 0.5f64..2.5) {
            let trunc = TruncationSpec::default();
            let a = TransmonPair::standard(d1 * MHZ);
            let b = TransmonPair::standard((d1 + extra) * MHZ);
            let da = ParametricDrive::resonant(&a, beta, 0.0).unwrap();
            let db = ParametricDrive::resonant(&b, beta, 0.0).unwrap();
            prop_assert!(high_freq_norm(&b, &db, &trunc).unwrap() < high_freq_norm(&a, &da, &trunc).unwrap());
        }
    }
}

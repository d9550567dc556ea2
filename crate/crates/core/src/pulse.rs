//! Square-pulse sequences for geometric and dynamical T gates.
//!
//! A drive segment holds `H = (Ω/2)(cos φ σx + sin φ σy) − (Δ/2) σz`
//! for its duration. Geometric schemes walk the evolution state along
//! longitudes of the Bloch sphere: down from the north pole along `β_even`,
//! back up along `β_odd`, with segment phases `β_even + π/2` and
//! `β_odd − π/2`. The phase jumps at the poles are instantaneous.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, pauli, ComplexMatrix, StateVector, C64};
use crate::propagate::{evolve_state_observed, propagate_unitary, HamiltonianSegment};

/// Geometric phase of the T gate.
pub const T_GAMMA: f64 = PI / 8.0;

/// Default Rabi frequency for physical-level sequences, rad/s.
pub const DEFAULT_RABI: f64 = 2.0 * PI * 10e6;

const MHZ: f64 = 2.0 * PI * 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    Gt,
    Cgt,
    Ocgt,
    Dt,
    LogicalOcgt,
}

impl Scheme {
    pub fn is_geometric(self) -> bool {
        !matches!(self, Scheme::Dt)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gt => "GT",
            Scheme::Cgt => "CGT",
            Scheme::Ocgt => "OCGT",
            Scheme::Dt => "DT",
            Scheme::LogicalOcgt => "LOGICAL_OCGT",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Trajectory family: within-loop offset `γ_g/n` (path 1) or `γ_g/n − π`
/// (path 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Path {
    One,
    Two,
}

impl TryFrom<u8> for Path {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Path::One),
            2 => Ok(Path::Two),
            _ => Err(Error::InvalidPulse(format!("path must be 1 or 2, got {v}"))),
        }
    }
}

impl From<Path> for u8 {
    fn from(p: Path) -> u8 {
        match p {
            Path::One => 1,
            Path::Two => 2,
        }
    }
}

impl Path {
    /// `β_odd − β_even` inside one of `n` loops.
    pub fn loop_offset(self, gamma_g: f64, n: usize) -> f64 {
        match self {
            Path::One => gamma_g / n as f64,
            Path::Two => gamma_g / n as f64 - PI,
        }
    }
}

/// Constant drive held for `duration`. Units: rad/s and seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub rabi: f64,
    pub phase: f64,
    pub detuning: f64,
    pub duration: f64,
}

impl PulseSegment {
    pub fn new(rabi: f64, phase: f64, detuning: f64, duration: f64) -> Result<Self> {
        if !(rabi >= 0.0) || !rabi.is_finite() {
            return Err(Error::InvalidPulse(format!("rabi frequency {rabi} must be >= 0")));
        }
        if !phase.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidPulse("phase and detuning must be finite".into()));
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::NonPositiveDuration(duration));
        }
        Ok(Self {
            rabi,
            phase,
            detuning,
            duration,
        })
    }

    /// Resonant segment with the given pulse area.
    pub fn resonant(rabi: f64, phase: f64, area: f64) -> Result<Self> {
        if !(rabi > 0.0) {
            return Err(Error::InvalidPulse(format!("rabi frequency {rabi} must be > 0")));
        }
        Self::new(rabi, phase, 0.0, area / rabi)
    }

    pub fn area(&self) -> f64 {
        self.rabi * self.duration
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        let (s, c) = self.phase.sin_cos();
        let drive = &pauli::x().scale_real(c) + &pauli::y().scale_real(s);
        &drive.scale_real(0.5 * self.rabi) - &pauli::z().scale_real(0.5 * self.detuning)
    }

    pub fn to_hamiltonian_segment(&self) -> HamiltonianSegment {
        HamiltonianSegment::constant(self.hamiltonian(), self.duration)
            .expect("validated segment has Hermitian generator and positive duration")
    }
}

/// Declarative gate recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    pub scheme: Scheme,
    #[serde(default = "default_path")]
    pub path: Path,
    #[serde(default = "default_loops")]
    pub n: usize,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma_g: f64,
    #[serde(default)]
    pub alpha0: f64,
    #[serde(default)]
    pub beta0: f64,
    /// rad/s
    #[serde(default = "default_rabi")]
    pub rabi: f64,
}

fn default_path() -> Path {
    Path::One
}
fn default_loops() -> usize {
    1
}
fn default_gamma() -> f64 {
    T_GAMMA
}
fn default_rabi() -> f64 {
    DEFAULT_RABI
}

impl TrajectorySpec {
    pub fn gt(path: Path) -> Self {
        Self::new(Scheme::Gt, path, 1, vec![])
    }

    pub fn cgt(n: usize, path: Path) -> Self {
        Self::new(Scheme::Cgt, path, n, vec![])
    }

    pub fn ocgt(path: Path, p: Vec<f64>) -> Self {
        Self::new(Scheme::Ocgt, path, p.len() + 1, p)
    }

    pub fn dt() -> Self {
        Self::new(Scheme::Dt, Path::One, 1, vec![])
    }

    pub fn logical_ocgt(p1: f64) -> Self {
        Self::new(Scheme::LogicalOcgt, Path::One, 2, vec![p1])
    }

    fn new(scheme: Scheme, path: Path, n: usize, p: Vec<f64>) -> Self {
        Self {
            scheme,
            path,
            n,
            p,
            gamma_g: T_GAMMA,
            alpha0: 0.0,
            beta0: 0.0,
            rabi: DEFAULT_RABI,
        }
    }

    pub fn with_rabi(mut self, rabi: f64) -> Self {
        self.rabi = rabi;
        self
    }

    /// Azimuths `β_0 … β_{2n−1}` of the longitudes traversed, for geometric
    /// schemes. Unwrapped.
    pub fn betas(&self) -> Result<Vec<f64>> {
        let offsets = match self.scheme {
            Scheme::Dt => return Err(Error::UnsupportedScheme(self.scheme.to_string())),
            Scheme::Gt => vec![self.path.loop_offset(self.gamma_g, 1)],
            Scheme::Cgt => vec![self.path.loop_offset(self.gamma_g, self.n); self.n],
            Scheme::Ocgt => vec![self.path.loop_offset(self.gamma_g, self.n); self.n],
            Scheme::LogicalOcgt => vec![self.gamma_g / 2.0; 2],
        };
        let mut betas = Vec::with_capacity(2 * offsets.len());
        let mut b = self.beta0;
        for (k, off) in offsets.iter().enumerate() {
            if k > 0 {
                match self.scheme {
                    // each conventional loop starts again from β0
                    Scheme::Cgt => b = self.beta0,
                    _ => b += self.p[k - 1],
                }
            }
            betas.push(b);
            b += off;
            betas.push(b);
        }
        Ok(betas)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rabi > 0.0) || !self.rabi.is_finite() {
            return Err(Error::InvalidPulse(format!("rabi {} must be > 0", self.rabi)));
        }
        if !self.gamma_g.is_finite() || !self.beta0.is_finite() {
            return Err(Error::InvalidPulse("gamma_g and beta0 must be finite".into()));
        }
        if self.alpha0 != 0.0 {
            return Err(Error::InvalidPulse(
                "orange-slice loops start at the north pole; alpha0 must be 0".into(),
            ));
        }
        if self.p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPulse("free angles must be finite".into()));
        }
        let (n_ok, p_len) = match self.scheme {
            Scheme::Gt | Scheme::Dt => (self.n == 1, 0),
            Scheme::Cgt => (self.n >= 1, 0),
            Scheme::Ocgt => (self.n >= 2, self.n.saturating_sub(1)),
            Scheme::LogicalOcgt => (self.n == 2, 1),
        };
        if !n_ok {
            return Err(Error::InvalidPulse(format!(
                "loop count {} not allowed for {}",
                self.n, self.scheme
            )));
        }
        if self.p.len() != p_len {
            return Err(Error::InvalidPulse(format!(
                "{} with n = {} takes {} free angles, got {}",
                self.scheme,
                self.n,
                p_len,
                self.p.len()
            )));
        }
        Ok(())
    }
}

/// Ordered drive segments plus the recipe that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub spec: TrajectorySpec,
    pub segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn from_spec(spec: &TrajectorySpec) -> Result<Self> {
        spec.validate()?;
        let segments = if spec.scheme == Scheme::Dt {
            dt_segments(spec.rabi, spec.beta0)?
        } else {
            spec.betas()?
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let phase = if j % 2 == 0 { b + FRAC_PI_2 } else { b - FRAC_PI_2 };
                    PulseSegment::resonant(spec.rabi, phase, PI)
                })
                .collect::<Result<Vec<_>>>()?
        };
        let seq = Self {
            spec: spec.clone(),
            segments,
        };
        if spec.scheme.is_geometric() {
            for s in &seq.segments {
                if (s.area() - PI).abs() > 1e-12 * PI || s.detuning != 0.0 {
                    return Err(Error::InvalidPulse(format!(
                        "geometric segment area {} differs from pi",
                        s.area()
                    )));
                }
            }
        }
        Ok(seq)
    }

    pub fn label(&self) -> Scheme {
        self.spec.scheme
    }

    pub fn phases(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.phase).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(PulseSegment::area).sum()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn hamiltonian_segments(&self) -> Vec<HamiltonianSegment> {
        self.segments.iter().map(PulseSegment::to_hamiltonian_segment).collect()
    }

    /// Noiseless propagator. Every segment is constant, so this is exact.
    pub fn propagate(&self) -> ComplexMatrix {
        let mut u = ComplexMatrix::identity(2);
        for s in &self.segments {
            u = expm_hermitian(&s.hamiltonian(), s.duration).matmul(&u);
        }
        u
    }

    /// Noiseless propagator through the generic stepping path.
    pub fn propagate_with_step(&self, step: f64) -> Result<ComplexMatrix> {
        propagate_unitary(2, &self.hamiltonian_segments(), step)
    }

    pub fn to_document(&self) -> SequenceDocument {
        SequenceDocument {
            scheme: self.spec.scheme,
            path: self.spec.path,
            n: self.spec.n,
            p: self.spec.p.clone(),
            gamma_g: self.spec.gamma_g,
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDocument {
                    rabi_mhz: s.rabi / MHZ,
                    phase_rad: s.phase,
                    detuning_mhz: s.detuning / MHZ,
                    duration_us: s.duration * 1e6,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document is serializable")
    }

    /// Parses a sequence document. Segments are taken as written; the
    /// recipe fields are kept as metadata.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDocument = serde_json::from_str(text)?;
        let segments = doc
            .segments
            .iter()
            .map(|s| {
                PulseSegment::new(
                    s.rabi_mhz * MHZ,
                    s.phase_rad,
                    s.detuning_mhz * MHZ,
                    s.duration_us * 1e-6,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        if segments.is_empty() {
            return Err(Error::InvalidPulse("sequence has no segments".into()));
        }
        let rabi = segments.iter().map(|s| s.rabi).fold(0.0, f64::max);
        Ok(Self {
            spec: TrajectorySpec {
                scheme: doc.scheme,
                path: doc.path,
                n: doc.n,
                p: doc.p,
                gamma_g: doc.gamma_g,
                alpha0: 0.0,
                beta0: 0.0,
                rabi,
            },
            segments,
        })
    }
}

/// JSON interchange form of a [`PulseSequence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    pub scheme: Scheme,
    pub path: Path,
    pub n: usize,
    pub p: Vec<f64>,
    pub gamma_g: f64,
    pub segments: Vec<SegmentDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    #[serde(rename = "rabi_MHz")]
    pub rabi_mhz: f64,
    pub phase_rad: f64,
    #[serde(rename = "detuning_MHz")]
    pub detuning_mhz: f64,
    pub duration_us: f64,
}

pub fn build_gt(path: Path, gamma_g: f64, rabi: f64) -> Result<PulseSequence> {
    let mut spec = TrajectorySpec::gt(path).with_rabi(rabi);
    spec.gamma_g = gamma_g;
    PulseSequence::from_spec(&spec)
}

pub fn build_cgt(n: usize, path: Path, gamma_g: f64, rabi: f64) -> Result<PulseSequence> {
    if n < 1 {
        return Err(Error::InvalidPulse("composite gate needs n >= 1".into()));
    }
    let mut spec = TrajectorySpec::cgt(n, path).with_rabi(rabi);
    spec.gamma_g = gamma_g;
    PulseSequence::from_spec(&spec)
}

pub fn build_ocgt(n: usize, path: Path, gamma_g: f64, p: &[f64], rabi: f64) -> Result<PulseSequence> {
    if n < 2 || p.len() != n - 1 {
        return Err(Error::InvalidPulse(format!(
            "optimized composite gate needs n >= 2 and n - 1 free angles (n = {n}, {} given)",
            p.len()
        )));
    }
    let mut spec = TrajectorySpec::ocgt(path, p.to_vec()).with_rabi(rabi);
    spec.gamma_g = gamma_g;
    PulseSequence::from_spec(&spec)
}

/// `T = U_y(−π/2) U_x(π/4) U_y(π/2)`, negative angle as a π phase shift.
pub fn build_dt(rabi: f64) -> Result<PulseSequence> {
    PulseSequence::from_spec(&TrajectorySpec::dt().with_rabi(rabi))
}

fn dt_segments(rabi: f64, beta0: f64) -> Result<Vec<PulseSegment>> {
    Ok(vec![
        PulseSegment::resonant(rabi, beta0 + FRAC_PI_2, FRAC_PI_2)?,
        PulseSegment::resonant(rabi, beta0, PI / 4.0)?,
        PulseSegment::resonant(rabi, beta0 - FRAC_PI_2, FRAC_PI_2)?,
    ])
}

/// Four-segment logical gate with phases
/// `π/2, γ/2 − π/2, γ/2 + p1 + π/2, γ + p1 − π/2`.
pub fn build_logical_ocgt(omega_l: f64, gamma_g: f64, p1: f64) -> Result<PulseSequence> {
    let mut spec = TrajectorySpec::logical_ocgt(p1).with_rabi(omega_l);
    spec.gamma_g = gamma_g;
    PulseSequence::from_spec(&spec)
}

/// `exp(−iγ n·σ)` with `n` from `(α0, β0)`.
pub fn ideal_unitary(spec: &TrajectorySpec) -> ComplexMatrix {
    rotation(spec.gamma_g, spec.alpha0, spec.beta0)
}

pub fn rotation(gamma: f64, alpha0: f64, beta0: f64) -> ComplexMatrix {
    let (sa, ca) = alpha0.sin_cos();
    let (sb, cb) = beta0.sin_cos();
    let n_sigma = &(&pauli::x().scale_real(sa * cb) + &pauli::y().scale_real(sa * sb))
        + &pauli::z().scale_real(ca);
    expm_hermitian(&n_sigma, gamma)
}

/// `diag(e^{−iπ/8}, e^{iπ/8})`
pub fn t_gate() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[C64::from_polar(1.0, -T_GAMMA), C64::from_polar(1.0, T_GAMMA)])
}

/// Phase bookkeeping of the evolution state started at `(α0, β0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRecord {
    /// `∫ ⟨φ1|H|φ1⟩ dt`
    pub gamma_d: f64,
    /// Total phase minus `gamma_d`, in `(−π, π]`.
    pub gamma_g_accumulated: f64,
    /// Largest `|⟨φ1|H|φ1⟩| / Ω_max` over the integration nodes.
    pub max_transport_violation: f64,
}

/// Integrates the evolution state through the sequence and splits its
/// phase into dynamical and geometric parts.
pub fn phase_decomposition(seq: &PulseSequence, step: f64) -> Result<PhaseRecord> {
    let spec = &seq.spec;
    let (sb, cb) = spec.beta0.sin_cos();
    let a0 = StateVector::new(vec![
        C64::new((spec.alpha0 / 2.0).cos(), 0.0),
        C64::new(cb, sb) * (spec.alpha0 / 2.0).sin(),
    ])?;
    let omega_max = seq
        .segments
        .iter()
        .map(|s| s.rabi.hypot(s.detuning))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut gamma_d = 0.0;
    let mut worst: f64 = 0.0;
    let mut last: Option<(f64, f64)> = None;
    let segs = seq.hamiltonian_segments();
    let fin = evolve_state_observed(&a0, &segs, step, |t, psi, h| {
        let e = expectation(h, psi);
        worst = worst.max(e.abs() / omega_max);
        // trapezoid rule; the duplicate node at each boundary adds nothing
        // because its interval is zero-length
        if let Some((t0, e0)) = last {
            gamma_d += 0.5 * (t - t0) * (e + e0);
        }
        last = Some((t, e));
    })?;
    let overlap = a0.inner(&fin);
    let deviation = 1.0 - overlap.norm();
    if deviation > 1e-6 {
        return Err(Error::BrokenLoop { deviation });
    }
    let total = -overlap.arg();
    Ok(PhaseRecord {
        gamma_d,
        gamma_g_accumulated: wrap_pi(total - gamma_d),
        max_transport_violation: worst,
    })
}

fn expectation(h: &ComplexMatrix, psi: &StateVector) -> f64 {
    let v = h.apply(psi.amplitudes());
    psi.amplitudes()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Solid angle enclosed by the loops: each lune between longitudes
/// `β_even` and `β_odd` contributes `2 (β_odd − β_even)`.
pub fn solid_angle(spec: &TrajectorySpec) -> Result<f64> {
    let betas = spec.betas()?;
    Ok(betas.chunks(2).map(|w| 2.0 * (w[1] - w[0])).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_invariant_distance;
    use proptest::prelude::*;

    const OMEGA: f64 = DEFAULT_RABI;

    /// Product of 10^6 truncated-Taylor steps `1 − iH dt − H² dt²/2`.
    /// Shares no code with the segment exponentials used by `propagate`.
    fn euler_product(seq: &PulseSequence, steps_per_segment: usize) -> ComplexMatrix {
        let mut u = ComplexMatrix::identity(2);
        for s in &seq.segments {
            let dt = s.duration / steps_per_segment as f64;
            let h = s.hamiltonian();
            let mut step = ComplexMatrix::identity(2);
            step.add_scaled(&h, C64::new(0.0, -dt));
            step.add_scaled(&h.matmul(&h), C64::new(-0.5 * dt * dt, 0.0));
            for _ in 0..steps_per_segment {
                u = step.matmul(&u);
            }
        }
        u
    }

    #[test]
    fn gt_phases() {
        let p1 = build_gt(Path::One, T_GAMMA, OMEGA).unwrap();
        assert_eq!(p1.phases(), vec![FRAC_PI_2, PI / 8.0 - FRAC_PI_2]);
        assert!((p1.segments[0].duration - PI / OMEGA).abs() < 1e-24);
        let p2 = build_gt(Path::Two, T_GAMMA, OMEGA).unwrap();
        assert!((p2.phases()[1] - (PI / 8.0 - 1.5 * PI)).abs() < 1e-15);
    }

    #[test]
    fn gt_propagates_to_t() {
        for path in [Path::One, Path::Two] {
            let u = build_gt(path, T_GAMMA, OMEGA).unwrap().propagate();
            assert!(phase_invariant_distance(&u, &t_gate()) < 1e-12);
        }
        // path 1 is T exactly, without any phase alignment
        let u = build_gt(Path::One, T_GAMMA, OMEGA).unwrap().propagate();
        assert!((&u - &t_gate()).norm_max() < 1e-12);
    }

    #[test]
    fn cgt_degenerates_to_gt() {
        for path in [Path::One, Path::Two] {
            let a = build_cgt(1, path, T_GAMMA, OMEGA).unwrap();
            let b = build_gt(path, T_GAMMA, OMEGA).unwrap();
            assert_eq!(a.segments, b.segments);
        }
    }

    #[test]
    fn cgt_beta_pattern() {
        let spec = TrajectorySpec::cgt(2, Path::One);
        let b = spec.betas().unwrap();
        assert_eq!(b, vec![0.0, PI / 16.0, 0.0, PI / 16.0]);
        let u = build_cgt(3, Path::Two, T_GAMMA, OMEGA).unwrap().propagate();
        assert!(phase_invariant_distance(&u, &t_gate()) < 1e-9);
    }

    #[test]
    fn cgt_global_sign() {
        // (−1)^{n(m+1)} with m the path index
        for (n, path, sign) in [(1, Path::Two, -1.0), (2, Path::Two, 1.0), (3, Path::Two, -1.0), (3, Path::One, 1.0)] {
            let u = build_cgt(n, path, T_GAMMA, OMEGA).unwrap().propagate();
            assert!((&u - &t_gate().scale_real(sign)).norm_max() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn ocgt_beta_sequence() {
        let p1 = 1.0625 * PI;
        let b = TrajectorySpec::ocgt(Path::One, vec![p1]).betas().unwrap();
        let want = [0.0, PI / 16.0, PI / 16.0 + p1, 2.0 * PI / 16.0 + p1];
        for (x, y) in b.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
        let seq = build_ocgt(2, Path::One, T_GAMMA, &[p1], OMEGA).unwrap();
        assert!((seq.phases()[2] - (want[2] + FRAC_PI_2)).abs() < 1e-15);
        assert!((seq.phases()[3] - (want[3] - FRAC_PI_2)).abs() < 1e-15);
    }

    #[test]
    fn ocgt_matches_euler_oracle() {
        let seq = build_ocgt(2, Path::One, T_GAMMA, &[1.0625 * PI], OMEGA).unwrap();
        let oracle = euler_product(&seq, 250_000);
        assert!(phase_invariant_distance(&oracle, &t_gate()) < 1e-8);
        assert!(phase_invariant_distance(&seq.propagate(), &oracle) < 1e-8);
    }

    #[test]
    fn ocgt_rejects_length_mismatch() {
        assert!(build_ocgt(3, Path::One, T_GAMMA, &[1.0], OMEGA).is_err());
        assert!(build_ocgt(1, Path::One, T_GAMMA, &[], OMEGA).is_err());
        assert!(build_cgt(0, Path::One, T_GAMMA, OMEGA).is_err());
        assert!(Path::try_from(3).is_err());
    }

    #[test]
    fn dt_construction() {
        let seq = build_dt(OMEGA).unwrap();
        assert!((seq.total_area() - 1.25 * PI).abs() < 1e-12);
        assert!(phase_invariant_distance(&seq.propagate(), &t_gate()) < 1e-12);
        let mid = expm_hermitian(&seq.segments[1].hamiltonian(), seq.segments[1].duration);
        let want = &ComplexMatrix::identity(2).scale_real((PI / 8.0).cos())
            + &pauli::x().scale(C64::new(0.0, -(PI / 8.0).sin()));
        assert!((&mid - &want).norm_max() < 1e-14);
    }

    #[test]
    fn logical_phases() {
        let seq = build_logical_ocgt(OMEGA, T_GAMMA, 1.0625 * PI).unwrap();
        let want = [FRAC_PI_2, -7.0 * PI / 16.0, 13.0 * PI / 8.0, 11.0 * PI / 16.0];
        for (x, y) in seq.phases().iter().zip(want) {
            assert!(wrap_pi(x - y).abs() < 1e-14, "{x} vs {y}");
        }
        assert!(phase_invariant_distance(&seq.propagate(), &t_gate()) < 1e-9);
    }

    #[test]
    fn ideal_unitary_cases() {
        let spec = TrajectorySpec::gt(Path::One);
        assert!((&ideal_unitary(&spec) - &t_gate()).norm_max() < 1e-15);
        assert!((&rotation(0.0, 0.3, 1.0) - &ComplexMatrix::identity(2)).norm_max() < 1e-15);
        let u = rotation(FRAC_PI_2, FRAC_PI_2, 0.0);
        assert!((&u - &pauli::x().scale(C64::new(0.0, -1.0))).norm_max() < 1e-15);
    }

    #[test]
    fn phase_decomposition_geometric_and_dynamical() {
        let gt = build_gt(Path::One, T_GAMMA, OMEGA).unwrap();
        let step = PI / OMEGA / 500.0;
        let rec = phase_decomposition(&gt, step).unwrap();
        assert!(rec.gamma_d.abs() < 1e-8);
        assert!((rec.gamma_g_accumulated - PI / 8.0).abs() < 1e-6);
        assert!(rec.max_transport_violation < 1e-9);

        let oc = build_ocgt(2, Path::Two, T_GAMMA, &[-1.9375 * PI], OMEGA).unwrap();
        let rec = phase_decomposition(&oc, step).unwrap();
        assert!(wrap_pi(rec.gamma_g_accumulated - PI / 8.0).abs() < 1e-6);

        let dt = build_dt(OMEGA).unwrap();
        let rec = phase_decomposition(&dt, step).unwrap();
        assert!(rec.gamma_d.abs() > 1e-3);
    }

    #[test]
    fn broken_loop_is_reported() {
        let mut seq = build_gt(Path::One, T_GAMMA, OMEGA).unwrap();
        seq.segments[1].duration *= 0.9;
        assert!(matches!(
            phase_decomposition(&seq, 1e-10),
            Err(Error::BrokenLoop { .. })
        ));
    }

    #[test]
    fn solid_angles() {
        assert!((solid_angle(&TrajectorySpec::gt(Path::One)).unwrap() - PI / 4.0).abs() < 1e-15);
        let s2 = solid_angle(&TrajectorySpec::gt(Path::Two)).unwrap();
        assert!((s2 - 2.0 * (PI / 8.0 - PI)).abs() < 1e-15);
        let c2 = solid_angle(&TrajectorySpec::cgt(2, Path::One)).unwrap();
        assert!((c2 - 2.0 * (PI / 16.0) * 2.0).abs() < 1e-15);
        assert!(solid_angle(&TrajectorySpec::dt()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let seq = build_ocgt(3, Path::Two, T_GAMMA, &[0.3, -1.1], OMEGA).unwrap();
        let text = seq.to_json();
        assert!(text.contains("\"rabi_MHz\"") && text.contains("\"OCGT\""));
        let back = PulseSequence::from_json(&text).unwrap();
        assert_eq!(back.segments.len(), 6);
        for (a, b) in back.segments.iter().zip(&seq.segments) {
            assert!((a.rabi - b.rabi).abs() < 1e-6 && (a.phase - b.phase).abs() == 0.0);
        }
        assert!(PulseSequence::from_json("{\"scheme\": \"XX\"}").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn ocgt_identity_for_any_p(p1 in -7.0f64..7.0, p2 in -7.0f64..7.0, two in any::<bool>()) {
            let path = if two { Path::Two } else { Path::One };
            let u = build_ocgt(3, path, T_GAMMA, &[p1, p2], OMEGA).unwrap().propagate();
            prop_assert!(phase_invariant_distance(&u, &t_gate()) < 1e-8);
        }

        #[test]
        fn solid_angle_is_twice_geometric_phase(n in 1usize..5, two in any::<bool>(), g in -1.0f64..1.0) {
            let path = if two { Path::Two } else { Path::One };
            let mut spec = TrajectorySpec::cgt(n, path);
            spec.gamma_g = g;
            let half = solid_angle(&spec).unwrap() / 2.0;
            let u = PulseSequence::from_spec(&spec).unwrap().propagate();
            // U = e^{-i half σz} exactly, sign included
            prop_assert!((&u - &rotation(half, 0.0, 0.0)).norm_max() < 1e-11);
        }
    }
}

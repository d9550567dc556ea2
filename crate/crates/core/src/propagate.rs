//! Unitary propagation of piecewise Hamiltonians.
//!
//! Constant segments are exponentiated exactly. Time-dependent segments use
//! the fourth-order commutator-free Magnus scheme with two Gauss-Legendre
//! nodes per step. Time-dependent generators are evaluated at segment-local
//! time, `t ∈ [0, duration]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, matmul_into, ComplexMatrix, StateVector};

pub type TimeFn = Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>;

/// Generator of one piece of a Hamiltonian.
#[derive(Clone)]
pub enum Generator {
    Constant(ComplexMatrix),
    TimeDependent { dim: usize, h: TimeFn },
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Generator::TimeDependent { dim, .. } => {
                f.debug_struct("TimeDependent").field("dim", dim).finish()
            }
        }
    }
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Constant(m) => m.dim(),
            Generator::TimeDependent { dim, .. } => *dim,
        }
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        match self {
            Generator::Constant(m) => m.clone(),
            Generator::TimeDependent { h, .. } => h(t),
        }
    }
}

/// A Hamiltonian held for `duration` seconds.
#[derive(Clone, Debug)]
pub struct HamiltonianSegment {
    generator: Generator,
    duration: f64,
}

/// Relative Hermiticity tolerance applied at every sampled time.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub(crate) fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let dev = h.hermiticity_error();
    if dev > HERMITIAN_TOL * h.norm_max().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

impl HamiltonianSegment {
    pub fn constant(h: ComplexMatrix, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::NonPositiveDuration(duration));
        }
        check_hermitian(&h)?;
        Ok(Self {
            generator: Generator::Constant(h),
            duration,
        })
    }

    pub fn time_dependent<F>(dim: usize, duration: f64, h: F) -> Result<Self>
    where
        F: Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::NonPositiveDuration(duration));
        }
        let h: TimeFn = Arc::new(h);
        let h0 = h(0.0);
        if h0.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h0.dim(),
            });
        }
        check_hermitian(&h0)?;
        Ok(Self {
            generator: Generator::TimeDependent { dim, h },
            duration,
        })
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.generator, Generator::Constant(_))
    }

    /// Adds a constant term to the generator.
    pub fn with_extra(&self, extra: &ComplexMatrix) -> Result<Self> {
        if extra.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: extra.dim(),
            });
        }
        check_hermitian(extra)?;
        let generator = match &self.generator {
            Generator::Constant(m) => Generator::Constant(m + extra),
            Generator::TimeDependent { dim, h } => {
                let h = h.clone();
                let extra = extra.clone();
                Generator::TimeDependent {
                    dim: *dim,
                    h: Arc::new(move |t| &h(t) + &extra),
                }
            }
        };
        Ok(Self {
            generator,
            duration: self.duration,
        })
    }

    /// Largest spectral-norm bound of the generator over a coarse time grid.
    pub fn norm_estimate(&self) -> f64 {
        match &self.generator {
            Generator::Constant(m) => m.norm_bound(),
            Generator::TimeDependent { h, .. } => (0..=64)
                .map(|k| h(self.duration * k as f64 / 64.0).norm_bound())
                .fold(0.0, f64::max),
        }
    }
}

/// Step that keeps `max ||H|| · step ≤ 1e-3` rad over all segments.
pub fn default_step(segments: &[HamiltonianSegment]) -> f64 {
    let norm = segments
        .iter()
        .map(HamiltonianSegment::norm_estimate)
        .fold(0.0, f64::max);
    let total: f64 = segments.iter().map(|s| s.duration).sum();
    if norm == 0.0 {
        return total.max(f64::MIN_POSITIVE);
    }
    1e-3 / norm
}

const GL_C1: f64 = 0.5 - 0.288_675_134_594_812_9; // 1/2 − √3/6
const GL_C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const CF_A1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
const CF_A2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;

/// Number of substeps used for a segment of the given duration.
pub(crate) fn substeps(duration: f64, step: f64) -> usize {
    ((duration / step).ceil() as usize).max(1)
}

/// One fourth-order commutator-free step from local time `t` to `t + h`.
fn cf4_step(h: &TimeFn, t: f64, dt: f64) -> Result<ComplexMatrix> {
    let h1 = h(t + GL_C1 * dt);
    let h2 = h(t + GL_C2 * dt);
    check_hermitian(&h1)?;
    check_hermitian(&h2)?;
    let first = &h1.scale_real(CF_A2) + &h2.scale_real(CF_A1);
    let second = &h1.scale_real(CF_A1) + &h2.scale_real(CF_A2);
    let e1 = expm_hermitian(&first, dt);
    let e2 = expm_hermitian(&second, dt);
    Ok(e2.matmul(&e1))
}

/// Time-ordered propagator `U = U_N ⋯ U_1` for a piecewise Hamiltonian.
///
/// An empty list yields the identity of dimension `dim`.
pub fn propagate_unitary(
    dim: usize,
    segments: &[HamiltonianSegment],
    step: f64,
) -> Result<ComplexMatrix> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step));
    }
    let mut u = ComplexMatrix::identity(dim);
    let mut tmp = ComplexMatrix::zeros(dim);
    for seg in segments {
        if seg.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: seg.dim(),
            });
        }
        let step_u = segment_propagator(seg, step)?;
        matmul_into(&step_u, &u, &mut tmp);
        std::mem::swap(&mut u, &mut tmp);
    }
    Ok(u)
}

/// Propagator of a single segment.
pub fn segment_propagator(seg: &HamiltonianSegment, step: f64) -> Result<ComplexMatrix> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step));
    }
    match &seg.generator {
        Generator::Constant(h) => Ok(expm_hermitian(h, seg.duration)),
        Generator::TimeDependent { dim, h } => {
            let n = substeps(seg.duration, step);
            let dt = seg.duration / n as f64;
            let mut u = ComplexMatrix::identity(*dim);
            let mut tmp = ComplexMatrix::zeros(*dim);
            for k in 0..n {
                let s = cf4_step(h, k as f64 * dt, dt)?;
                matmul_into(&s, &u, &mut tmp);
                std::mem::swap(&mut u, &mut tmp);
            }
            Ok(u)
        }
    }
}

/// Evolves a pure state, calling `observe(t, state, H(t))` at every
/// integration node including `t = 0` and the final time.
///
/// Constant segments are also subdivided at `step` so the observer sees a
/// dense time grid.
pub fn evolve_state_observed<F>(
    psi0: &StateVector,
    segments: &[HamiltonianSegment],
    step: f64,
    mut observe: F,
) -> Result<StateVector>
where
    F: FnMut(f64, &StateVector, &ComplexMatrix),
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step));
    }
    let mut psi = psi0.clone();
    let mut t0 = 0.0;
    for seg in segments {
        if seg.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim(),
                got: seg.dim(),
            });
        }
        let n = substeps(seg.duration, step);
        let dt = seg.duration / n as f64;
        let constant_step = match &seg.generator {
            Generator::Constant(h) => Some(expm_hermitian(h, dt)),
            Generator::TimeDependent { .. } => None,
        };
        observe(t0, &psi, &seg.generator.at(0.0));
        for k in 0..n {
            let u = match (&constant_step, &seg.generator) {
                (Some(u), _) => u.clone(),
                (None, Generator::TimeDependent { h, .. }) => cf4_step(h, k as f64 * dt, dt)?,
                _ => unreachable!(),
            };
            psi = psi.evolve(&u)?;
            let tl = (k + 1) as f64 * dt;
            observe(t0 + tl, &psi, &seg.generator.at(tl));
        }
        t0 += seg.duration;
    }
    Ok(psi)
}

//! Lindblad master equation with a fixed-step fourth-order Runge-Kutta
//! integrator.
//!
//! `dρ/dt = i[ρ, H] + ½ Σ_k κ_k (2 L_k ρ L_k† − L_k†L_k ρ − ρ L_k†L_k)`
//!
//! With this normalization a population in an excited level decays as
//! `exp(−κ t)`.

use crate::error::{Error, Result};
use crate::linalg::{matmul_into, ComplexMatrix, DensityOperator, C64, I, ZERO};
use crate::propagate::{check_hermitian, substeps, HamiltonianSegment};

/// Trace drift beyond this is reported as non-convergence.
pub const TRACE_DRIFT_TOL: f64 = 1e-6;

/// Dissipator `L` with rate `κ ≥ 0` (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    operator: ComplexMatrix,
    rate: f64,
    diagonal: Option<Vec<C64>>,
}

impl LindbladChannel {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::OutOfRange(format!("decoherence rate {rate} must be >= 0")));
        }
        let n = operator.dim();
        let is_diag = (0..n).all(|r| (0..n).all(|c| r == c || operator[(r, c)] == ZERO));
        let diagonal = is_diag.then(|| operator.diag());
        Ok(Self {
            operator,
            rate,
            diagonal,
        })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Density operators recorded along a trajectory.
#[derive(Debug, Clone)]
pub struct LindbladTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
}

impl LindbladTrajectory {
    pub fn final_state(&self) -> &DensityOperator {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Right-hand side for Hermitian arguments.
struct Liouvillian<'a> {
    dim: usize,
    /// `½ Σ κ L†L`
    damping: ComplexMatrix,
    channels: Vec<&'a LindbladChannel>,
    heff: ComplexMatrix,
    y: ComplexMatrix,
    l_rho: ComplexMatrix,
    jump: ComplexMatrix,
}

impl<'a> Liouvillian<'a> {
    fn new(dim: usize, channels: &'a [LindbladChannel]) -> Self {
        let mut damping = ComplexMatrix::zeros(dim);
        let active: Vec<&LindbladChannel> = channels.iter().filter(|c| c.rate > 0.0).collect();
        for ch in &active {
            let ll = ch.operator.adjoint().matmul(&ch.operator);
            damping.add_scaled(&ll, C64::new(0.5 * ch.rate, 0.0));
        }
        Self {
            dim,
            damping,
            channels: active,
            heff: ComplexMatrix::zeros(dim),
            y: ComplexMatrix::zeros(dim),
            l_rho: ComplexMatrix::zeros(dim),
            jump: ComplexMatrix::zeros(dim),
        }
    }

    fn set_hamiltonian(&mut self, h: &ComplexMatrix) {
        // H_eff = H − i·damping
        let n = self.dim * self.dim;
        for k in 0..n {
            let (r, c) = (k / self.dim, k % self.dim);
            self.heff[(r, c)] = h[(r, c)] - I * self.damping[(r, c)];
        }
    }

    /// `out = L(rho)` assuming `rho` Hermitian; `out` is exactly Hermitian.
    fn apply(&mut self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        let n = self.dim;
        matmul_into(&self.heff, rho, &mut self.y);
        for r in 0..n {
            for c in 0..n {
                // −i Y + (−i Y)†
                out[(r, c)] = -I * self.y[(r, c)] + I * self.y[(c, r)].conj();
            }
        }
        for ch in &self.channels {
            let k = ch.rate;
            if let Some(d) = &ch.diagonal {
                for r in 0..n {
                    for c in 0..n {
                        out[(r, c)] += k * d[r] * rho[(r, c)] * d[c].conj();
                    }
                }
            } else {
                // L ρ L† = L (L ρ)† for Hermitian ρ
                matmul_into(&ch.operator, rho, &mut self.l_rho);
                let lr_adj = self.l_rho.adjoint();
                matmul_into(&ch.operator, &lr_adj, &mut self.jump);
                for r in 0..n {
                    for c in r..n {
                        let v = 0.5 * k * (self.jump[(r, c)] + self.jump[(c, r)].conj());
                        out[(r, c)] += v;
                        if r != c {
                            out[(c, r)] += v.conj();
                        }
                    }
                }
            }
        }
    }
}

/// Evolves a batch of Hermitian operators under the same Lindbladian and
/// calls `observe(t, batch)` after every step and at `t = 0`.
///
/// Time-dependent generators see segment-local time.
pub(crate) fn evolve_hermitian_batch<F>(
    segments: &[HamiltonianSegment],
    channels: &[LindbladChannel],
    mut batch: Vec<ComplexMatrix>,
    step: f64,
    mut observe: F,
) -> Result<Vec<ComplexMatrix>>
where
    F: FnMut(f64, &[ComplexMatrix]),
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step));
    }
    let dim = match batch.first() {
        Some(m) => m.dim(),
        None => return Ok(batch),
    };
    for ch in channels {
        if ch.operator.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: ch.operator.dim(),
            });
        }
    }
    for seg in segments {
        if seg.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: seg.dim(),
            });
        }
    }
    let traces0: Vec<f64> = batch.iter().map(|m| m.trace().re).collect();
    let scales: Vec<f64> = batch.iter().map(|m| m.norm_max().max(1.0)).collect();
    let mut lv = Liouvillian::new(dim, channels);
    let mut k1 = ComplexMatrix::zeros(dim);
    let mut k2 = ComplexMatrix::zeros(dim);
    let mut k3 = ComplexMatrix::zeros(dim);
    let mut k4 = ComplexMatrix::zeros(dim);
    let mut tmp = ComplexMatrix::zeros(dim);

    let mut t0 = 0.0;
    observe(0.0, &batch);
    for seg in segments {
        let n = substeps(seg.duration(), step);
        let dt = seg.duration() / n as f64;
        let gen = seg.generator();
        let constant = seg.is_constant();
        let mut h_start = gen.at(0.0);
        for s in 0..n {
            let tl = s as f64 * dt;
            let (h_mid, h_end) = if constant {
                (h_start.clone(), h_start.clone())
            } else {
                let hm = gen.at(tl + 0.5 * dt);
                let he = gen.at(tl + dt);
                check_hermitian(&hm)?;
                check_hermitian(&he)?;
                (hm, he)
            };
            for rho in batch.iter_mut() {
                lv.set_hamiltonian(&h_start);
                lv.apply(rho, &mut k1);
                axpy_into(rho, &k1, 0.5 * dt, &mut tmp);
                lv.set_hamiltonian(&h_mid);
                lv.apply(&tmp, &mut k2);
                axpy_into(rho, &k2, 0.5 * dt, &mut tmp);
                lv.apply(&tmp, &mut k3);
                axpy_into(rho, &k3, dt, &mut tmp);
                lv.set_hamiltonian(&h_end);
                lv.apply(&tmp, &mut k4);
                let w = dt / 6.0;
                for r in 0..dim {
                    for c in 0..dim {
                        let inc = k1[(r, c)] + 2.0 * k2[(r, c)] + 2.0 * k3[(r, c)] + k4[(r, c)];
                        rho[(r, c)] += w * inc;
                    }
                }
            }
            h_start = h_end;
            let t = t0 + tl + dt;
            for (k, rho) in batch.iter().enumerate() {
                let drift = (rho.trace().re - traces0[k]).abs();
                if drift > TRACE_DRIFT_TOL * scales[k] || !drift.is_finite() {
                    return Err(Error::NonConvergence(format!(
                        "trace drift {drift:.3e} at t = {t:.6e} s; reduce the step"
                    )));
                }
                // the exact map is trace-norm contractive, so entries cannot grow
                if rho.norm_max() > (dim as f64 + TRACE_DRIFT_TOL) * scales[k] {
                    return Err(Error::NonConvergence(format!(
                        "solution grew to {:.3e} at t = {t:.6e} s; reduce the step",
                        rho.norm_max()
                    )));
                }
            }
            observe(t, &batch);
        }
        t0 += seg.duration();
    }
    Ok(batch)
}

fn axpy_into(x: &ComplexMatrix, k: &ComplexMatrix, a: f64, out: &mut ComplexMatrix) {
    let n = x.dim();
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = x[(r, c)] + a * k[(r, c)];
        }
    }
}

/// `E_aa`, `E_bb` and the Hermitian parts of `E_ab` on the two-level block
/// `[a, b]`. Any qubit density operator on the block is a real combination
/// of these, so evolving them is enough for six-state averages.
pub(crate) fn block_seeds(dim: usize, [a, b]: [usize; 2]) -> [ComplexMatrix; 4] {
    let e00 = ComplexMatrix::outer_basis(dim, a, a);
    let e11 = ComplexMatrix::outer_basis(dim, b, b);
    let mut x = ComplexMatrix::zeros(dim);
    x[(a, b)] = C64::new(0.5, 0.0);
    x[(b, a)] = C64::new(0.5, 0.0);
    let mut y = ComplexMatrix::zeros(dim);
    y[(a, b)] = C64::new(0.0, -0.5);
    y[(b, a)] = C64::new(0.0, 0.5);
    [e00, e11, x, y]
}

/// Images of the six probe states (`0, 1, +i, −i, +, −`) from the images of
/// the four [`block_seeds`].
pub(crate) fn six_state_images(s: &[ComplexMatrix]) -> [ComplexMatrix; 6] {
    let half = (&s[0] + &s[1]).scale_real(0.5);
    [
        s[0].clone(),
        s[1].clone(),
        &half + &s[3],
        &half - &s[3],
        &half + &s[2],
        &half - &s[2],
    ]
}

/// Integrates `rho0` through all segments and records about `samples`
/// evenly spaced states (always including the first and last).
pub fn propagate_lindblad(
    segments: &[HamiltonianSegment],
    channels: &[LindbladChannel],
    rho0: &DensityOperator,
    step: f64,
    samples: usize,
) -> Result<LindbladTrajectory> {
    let total_steps: usize = segments
        .iter()
        .map(|s| substeps(s.duration(), step.max(f64::MIN_POSITIVE)))
        .sum();
    let stride = (total_steps / samples.max(1)).max(1);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut counter = 0usize;
    let out = evolve_hermitian_batch(
        segments,
        channels,
        vec![rho0.matrix().clone()],
        step,
        |t, b| {
            if counter % stride == 0 {
                times.push(t);
                states.push(DensityOperator::from_evolved(b[0].clone()));
            }
            counter += 1;
        },
    )?;
    if counter == 0 || (counter - 1) % stride != 0 {
        let t_end: f64 = segments.iter().map(HamiltonianSegment::duration).sum();
        times.push(t_end);
        states.push(DensityOperator::from_evolved(out[0].clone()));
    }
    Ok(LindbladTrajectory { times, states })
}

/// Repeatedly halves `step` until two successive evaluations of `f` differ
/// by less than `tol`. Returns the finer value and the step that produced it.
pub fn refine_step<F>(mut f: F, step: f64, tol: f64, max_halvings: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut h = step;
    let mut prev = f(h)?;
    for _ in 0..max_halvings {
        h *= 0.5;
        let next = f(h)?;
        if (next - prev).abs() < tol {
            return Ok((next, h));
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "value still changing by more than {tol:e} at step {h:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, StateVector};
    use crate::propagate::propagate_unitary;
    use std::f64::consts::PI;

    fn excited() -> DensityOperator {
        DensityOperator::pure(&StateVector::basis(2, 1))
    }

    #[test]
    fn amplitude_decay_is_exp_minus_kappa_t() {
        let kappa = 2.0 * PI * 2e3;
        let t = 50e-6;
        let seg = HamiltonianSegment::constant(ComplexMatrix::zeros(2), t).unwrap();
        let ch = LindbladChannel::new(pauli::lowering(), kappa).unwrap();
        let tr = propagate_lindblad(&[seg], &[ch], &excited(), t / 2000.0, 10).unwrap();
        let p1 = tr.final_state().population(1);
        assert!((p1 - (-kappa * t).exp()).abs() < 1e-10, "p1 = {p1}");
        assert!((tr.times.last().unwrap() - t).abs() < 1e-18);
    }

    #[test]
    fn dephasing_kills_coherence_at_rate_two_kappa_for_sigma_z() {
        let kappa = 1e4;
        let t = 30e-6;
        let plus = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let seg = HamiltonianSegment::constant(ComplexMatrix::zeros(2), t).unwrap();
        let ch = LindbladChannel::new(pauli::z(), kappa).unwrap();
        let tr = propagate_lindblad(&[seg], &[ch], &DensityOperator::pure(&plus), t / 1000.0, 1).unwrap();
        let coh = tr.final_state().matrix()[(0, 1)].re;
        assert!((coh - 0.5 * (-2.0 * kappa * t).exp()).abs() < 1e-10);
    }

    #[test]
    fn closed_system_matches_unitary() {
        let h = &pauli::x().scale_real(2.0 * PI * 5e6) + &pauli::z().scale_real(2.0 * PI * 1e6);
        let seg = HamiltonianSegment::constant(h, 0.17e-6).unwrap();
        let psi = StateVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let rho0 = DensityOperator::pure(&psi);
        let tr = propagate_lindblad(std::slice::from_ref(&seg), &[], &rho0, 1e-11, 1).unwrap();
        let u = propagate_unitary(2, &[seg], 1e-9).unwrap();
        let want = rho0.conjugate_by(&u);
        assert!((tr.final_state().matrix() - want.matrix()).norm_max() < 1e-10);
    }

    #[test]
    fn maximally_mixed_is_fixed_under_unital_noise() {
        let seg = HamiltonianSegment::constant(pauli::y().scale_real(1e6), 3e-6).unwrap();
        let ch = LindbladChannel::new(pauli::z(), 5e4).unwrap();
        let rho0 = DensityOperator::maximally_mixed(2);
        let tr = propagate_lindblad(&[seg], &[ch], &rho0, 1e-9, 3).unwrap();
        assert!((tr.final_state().matrix() - rho0.matrix()).norm_max() < 1e-12);
    }

    #[test]
    fn rejects_negative_rate_and_bad_step() {
        assert!(LindbladChannel::new(pauli::z(), -1.0).is_err());
        let seg = HamiltonianSegment::constant(pauli::z(), 1.0).unwrap();
        assert!(matches!(
            propagate_lindblad(&[seg], &[], &excited(), -1.0, 1),
            Err(Error::NonPositiveStep(_))
        ));
    }

    #[test]
    fn huge_step_reports_non_convergence() {
        let seg = HamiltonianSegment::constant(ComplexMatrix::zeros(2), 1.0).unwrap();
        let ch = LindbladChannel::new(pauli::lowering(), 100.0).unwrap();
        let r = propagate_lindblad(&[seg], &[ch], &excited(), 0.5, 1);
        assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    }

    #[test]
    fn refine_step_converges() {
        let (v, h) = refine_step(|h| Ok(1.0 + h * h), 0.1, 1e-4, 10).unwrap();
        assert!((v - 1.0).abs() < 1e-4 && h < 0.1);
        assert!(refine_step(|h| Ok(1.0 / h), 0.1, 1e-4, 3).is_err());
    }
}

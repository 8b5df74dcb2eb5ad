use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{coupled_blocks, eigh_block, submatrix, CMatrix, HermitianOperator, UnitaryOperator};
use crate::spin::{build_xxz, DrivingSchedule, StepSampling};

/// Largest `|[H(t_a), H(t_b)]|` entry accepted by [`exact_evolution`].
pub const COMMUTATOR_TOLERANCE: f64 = 1e-9;

/// Step indices probed for commutation: the ends, quartiles, and `t_f`.
fn probe_hamiltonians(s: &DrivingSchedule) -> Result<Vec<HermitianOperator>> {
    let m = s.steps();
    let mut idx = vec![0, m / 4, m / 2, (3 * m) / 4, m - 1];
    idx.dedup();
    let mut out = idx
        .into_iter()
        .map(|k| s.hamiltonian_at(k))
        .collect::<Result<Vec<_>>>()?;
    out.push(s.final_hamiltonian()?);
    Ok(out)
}

/// Largest commutator entry over the probed pairs of schedule Hamiltonians.
pub fn schedule_commutator_norm(s: &DrivingSchedule) -> Result<f64> {
    let hs = probe_hamiltonians(s)?;
    let mut worst = 0.0f64;
    for (a, ha) in hs.iter().enumerate() {
        for hb in &hs[a + 1..] {
            worst = worst.max(ha.commutator_norm(hb));
        }
    }
    Ok(worst)
}

/// `U = exp(−i ∫₀^{t_f} H(s) ds)` for a schedule whose Hamiltonians commute.
/// The integral is taken over the parameters, which is exact for both
/// interpolation modes since `H` is linear in them.
pub fn exact_evolution(s: &DrivingSchedule) -> Result<UnitaryOperator> {
    let deviation = schedule_commutator_norm(s)?;
    if deviation > COMMUTATOR_TOLERANCE {
        return Err(Error::NonCommutingSchedule { deviation });
    }
    let register = s.initial().register()?;
    if s.t_f() == 0.0 {
        return Ok(UnitaryOperator::identity(register));
    }
    let mean = build_xxz(&s.mean_params())?;
    UnitaryOperator::evolution(&mean, s.t_f())
}

/// `U(t_f) = ∏_{n=0}^{M−1} e^{−i H(t_n) Δt}` with the `n = 0` factor applied
/// first. Each factor is built from an exact eigendecomposition, so the
/// product is unitary for any `M`.
pub fn trotter_evolution(s: &DrivingSchedule) -> Result<UnitaryOperator> {
    let ends = [s.initial_hamiltonian()?, s.final_hamiltonian()?];
    ordered_product(&ends, s.steps(), s.dt(), |step| s.step_hamiltonian(step))
}

/// Linear ramp `H(t) = H_i + (t/t_f)(H_f − H_i)` between two arbitrary
/// Hamiltonians on the same register.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ramp {
    pub t_f: f64,
    pub steps: usize,
    pub sampling: StepSampling,
}

impl Default for Ramp {
    fn default() -> Self {
        Ramp {
            t_f: DrivingSchedule::DEFAULT_T_F,
            steps: DrivingSchedule::DEFAULT_STEPS,
            sampling: StepSampling::LeftEndpoint,
        }
    }
}

impl Ramp {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::param("ramp needs at least one step"));
        }
        if !(self.t_f >= 0.0 && self.t_f.is_finite()) {
            return Err(Error::param(format!("ramp duration must be finite and >= 0, got {}", self.t_f)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_f / self.steps as f64
    }

    fn fraction(&self, step: usize) -> f64 {
        if self.t_f == 0.0 {
            return 1.0;
        }
        let t = match self.sampling {
            StepSampling::LeftEndpoint => step as f64,
            StepSampling::Midpoint => step as f64 + 0.5,
        };
        t / self.steps as f64
    }
}

/// Evolution operator of a linear ramp from `h_i` to `h_f`. Commuting
/// endpoints are integrated exactly; otherwise the ramp is Trotterized.
pub fn ramp_evolution(h_i: &HermitianOperator, h_f: &HermitianOperator, ramp: &Ramp) -> Result<UnitaryOperator> {
    ramp.validate()?;
    h_i.register().ensure_same(&h_f.register())?;
    if ramp.t_f == 0.0 {
        return Ok(UnitaryOperator::identity(h_i.register()));
    }
    if h_i.commutator_norm(h_f) <= COMMUTATOR_TOLERANCE {
        let mean = (h_i + h_f).scale(0.5);
        return UnitaryOperator::evolution(&mean, ramp.t_f);
    }
    let ends = [h_i.clone(), h_f.clone()];
    let delta = h_f - h_i;
    ordered_product(&ends, ramp.steps, ramp.dt(), |step| {
        Ok(h_i + &delta.scale(ramp.fraction(step)))
    })
}

/// Ordered product of `e^{−i H_k dt}`, `k = 0` first. Every `H_k` must be a
/// linear combination of `ends`, whose shared block structure (a conserved
/// magnetization, for XXZ chains) is used to exponentiate and multiply block
/// by block.
fn ordered_product(
    ends: &[HermitianOperator],
    steps: usize,
    dt: f64,
    hamiltonian: impl Fn(usize) -> Result<HermitianOperator>,
) -> Result<UnitaryOperator> {
    let register = ends[0].register();
    let dim = register.dim();
    let blocks = coupled_blocks(dim, ends.iter().map(|h| h.matrix()));

    let mut partial: Vec<CMatrix> = blocks
        .iter()
        .map(|b| CMatrix::identity(b.len(), b.len()))
        .collect();
    for step in 0..steps {
        let h = hamiltonian(step)?;
        for (idx, acc) in blocks.iter().zip(partial.iter_mut()) {
            let factor = block_exponential(submatrix(h.matrix(), idx), dt)?;
            *acc = factor * &*acc;
        }
    }

    let mut u = CMatrix::zeros(dim, dim);
    for (idx, acc) in blocks.iter().zip(&partial) {
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                u[(i, j)] = acc[(a, b)];
            }
        }
    }
    Ok(UnitaryOperator::from_parts(register, u))
}

/// `exp(−i H dt)` of one block.
fn block_exponential(h: CMatrix, dt: f64) -> Result<CMatrix> {
    let (vals, vecs) = eigh_block(h)?;
    let mut scaled = vecs.clone();
    for (k, e) in vals.into_iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * dt);
        scaled.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(scaled * vecs.adjoint())
}

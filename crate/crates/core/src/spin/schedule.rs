use serde::{Deserialize, Serialize};

use super::{build_xxz, DMParams, XXZParams};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// `p(t) = p_i + (t/t_f)(p_f − p_i)`.
    #[default]
    Linear,
    /// `p(0) = p_i`, `p(t) = p_f` for `t > 0`.
    QuenchAtStart,
}

/// Where inside each step `H(t)` is sampled for Trotter products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSampling {
    /// `t_n = n Δt` (first order).
    #[default]
    LeftEndpoint,
    /// `t_n = (n + 1/2) Δt` (second order).
    Midpoint,
}

/// Time-dependent chain parameters over `[0, t_f]`, discretized into `steps`
/// intervals of width `Δt = t_f / steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct DrivingSchedule {
    initial: XXZParams,
    final_: XXZParams,
    t_f: f64,
    steps: usize,
    interpolation: Interpolation,
    sampling: StepSampling,
}

impl DrivingSchedule {
    /// Default protocol length: `t_f = 1` with 1000 steps (`Δt = 0.001`).
    pub const DEFAULT_T_F: f64 = 1.0;
    pub const DEFAULT_STEPS: usize = 1000;

    pub fn new(
        initial: XXZParams,
        final_: XXZParams,
        t_f: f64,
        steps: usize,
        interpolation: Interpolation,
    ) -> Result<Self> {
        initial.validate()?;
        final_.validate()?;
        if initial.n != final_.n {
            return Err(Error::param(format!(
                "schedule endpoints differ in size ({} vs {})",
                initial.n, final_.n
            )));
        }
        if initial.boundary != final_.boundary {
            return Err(Error::param("schedule endpoints differ in boundary condition"));
        }
        if steps == 0 {
            return Err(Error::param("schedule needs at least one step"));
        }
        if !(t_f >= 0.0 && t_f.is_finite()) {
            return Err(Error::param(format!("protocol duration must be finite and >= 0, got {t_f}")));
        }
        Ok(DrivingSchedule {
            initial,
            final_,
            t_f,
            steps,
            interpolation,
            sampling: StepSampling::LeftEndpoint,
        })
    }

    /// Linear ramp over the default duration and step count.
    pub fn linear(initial: XXZParams, final_: XXZParams) -> Result<Self> {
        Self::new(initial, final_, Self::DEFAULT_T_F, Self::DEFAULT_STEPS, Interpolation::Linear)
    }

    pub fn with_sampling(mut self, sampling: StepSampling) -> Self {
        self.sampling = sampling;
        self
    }

    /// Same path and duration with a different step count.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Ok(Self::new(self.initial, self.final_, self.t_f, steps, self.interpolation)?.with_sampling(self.sampling))
    }

    pub fn initial(&self) -> &XXZParams {
        &self.initial
    }

    pub fn final_params(&self) -> &XXZParams {
        &self.final_
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_f / self.steps as f64
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn sampling(&self) -> StepSampling {
        self.sampling
    }

    /// Parameters at time `t ∈ [0, t_f]`.
    pub fn params_at_time(&self, t: f64) -> XXZParams {
        let s = match self.interpolation {
            Interpolation::Linear if self.t_f > 0.0 => (t / self.t_f).clamp(0.0, 1.0),
            Interpolation::Linear => 1.0,
            Interpolation::QuenchAtStart => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        self.params_at_fraction(s)
    }

    fn params_at_fraction(&self, s: f64) -> XXZParams {
        let lerp = |a: f64, b: f64| if s == 1.0 { b } else { a + s * (b - a) };
        let (a, b) = (&self.initial, &self.final_);
        let dm = match (a.dm, b.dm) {
            (None, None) => None,
            (da, db) => {
                let (da, db) = (da.unwrap_or_default(), db.unwrap_or_default());
                Some(DMParams {
                    d: [lerp(da.d[0], db.d[0]), lerp(da.d[1], db.d[1]), lerp(da.d[2], db.d[2])],
                })
            }
        };
        XXZParams {
            n: a.n,
            j: lerp(a.j, b.j),
            jz: lerp(a.jz, b.jz),
            b: lerp(a.b, b.b),
            boundary: a.boundary,
            dm,
        }
    }

    /// Time at which step `step` samples the Hamiltonian.
    pub fn sample_time(&self, step: usize) -> f64 {
        match self.sampling {
            StepSampling::LeftEndpoint => step as f64 * self.dt(),
            StepSampling::Midpoint => (step as f64 + 0.5) * self.dt(),
        }
    }

    fn check_step(&self, step: usize) -> Result<()> {
        if step >= self.steps {
            return Err(Error::param(format!(
                "step {step} out of range for a {}-step schedule",
                self.steps
            )));
        }
        Ok(())
    }

    /// `H(t_n)` at the left endpoint `t_n = n Δt`.
    pub fn hamiltonian_at(&self, step: usize) -> Result<HermitianOperator> {
        self.check_step(step)?;
        build_xxz(&self.params_at_time(step as f64 * self.dt()))
    }

    /// Hamiltonian used by the Trotter factor of `step`, honoring the
    /// schedule's step sampling.
    pub fn step_hamiltonian(&self, step: usize) -> Result<HermitianOperator> {
        self.check_step(step)?;
        build_xxz(&self.params_at_time(self.sample_time(step)))
    }

    /// Parameters averaged over `[0, t_f]`, exact for both interpolations.
    pub fn mean_params(&self) -> XXZParams {
        match self.interpolation {
            Interpolation::Linear => self.params_at_fraction(0.5),
            Interpolation::QuenchAtStart => self.final_,
        }
    }

    pub fn initial_hamiltonian(&self) -> Result<HermitianOperator> {
        build_xxz(&self.initial)
    }

    pub fn final_hamiltonian(&self) -> Result<HermitianOperator> {
        build_xxz(&self.final_)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::Boundary;

    fn three_site_ramp(t: f64) -> DrivingSchedule {
        let b_i = t * 2f64.ln() / 2.0;
        let jz_i = (2.0 - t * 3f64.ln()) / 4.0;
        DrivingSchedule::linear(
            XXZParams::periodic(3, 1.0, jz_i, b_i).unwrap(),
            XXZParams::periodic(3, 1.0, 0.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn defaults_give_millisecond_steps() {
        let s = three_site_ramp(0.01);
        assert_eq!(s.steps(), 1000);
        assert!((s.dt() * s.steps() as f64 - s.t_f()).abs() < 1e-12);
        assert!((s.dt() - 0.001).abs() < 1e-15);
    }

    #[test]
    fn endpoints() {
        let s = three_site_ramp(0.01);
        let h0 = s.hamiltonian_at(0).unwrap();
        assert!(h0.max_abs_diff(&s.initial_hamiltonian().unwrap()) < 1e-12);
        let last = s.hamiltonian_at(s.steps() - 1).unwrap();
        let hf = s.final_hamiltonian().unwrap();
        // one step short of t_f
        let gap = last.max_abs_diff(&hf);
        assert!(gap > 0.0 && gap < 4.0 * s.dt());
        let end = build_xxz(&s.params_at_time(s.t_f())).unwrap();
        assert!(end.max_abs_diff(&hf) < 1e-12);
        assert!(s.hamiltonian_at(s.steps()).is_err());
    }

    #[test]
    fn midpoint_parameters_are_means() {
        let t = 0.01;
        let s = three_site_ramp(t);
        let mid = s.params_at_time(0.5 * s.t_f());
        let b_i = t * 2f64.ln() / 2.0;
        let jz_i = (2.0 - t * 3f64.ln()) / 4.0;
        assert!((mid.b - (b_i + 0.5) / 2.0).abs() < 1e-15);
        assert!((mid.jz - jz_i / 2.0).abs() < 1e-15);
        assert_eq!(s.mean_params(), mid);
    }

    #[test]
    fn quench_holds_final_after_start() {
        let s = DrivingSchedule::new(
            XXZParams::periodic(3, 1.0, 0.5, 0.0).unwrap(),
            XXZParams::periodic(3, 1.0, 0.0, 0.5).unwrap(),
            1.0,
            10,
            Interpolation::QuenchAtStart,
        )
        .unwrap();
        assert_eq!(s.params_at_time(0.0).jz, 0.5);
        assert_eq!(s.params_at_time(0.1).jz, 0.0);
    }

    #[test]
    fn rejects_mismatched_endpoints() {
        let a = XXZParams::periodic(3, 1.0, 0.0, 0.0).unwrap();
        let b = XXZParams::periodic(4, 1.0, 0.0, 0.0).unwrap();
        assert!(DrivingSchedule::linear(a, b).is_err());
        let c = XXZParams::new(3, 1.0, 0.0, 0.0, Boundary::Open).unwrap();
        assert!(DrivingSchedule::linear(a, c).is_err());
        assert!(DrivingSchedule::new(a, a, 1.0, 0, Interpolation::Linear).is_err());
    }
}

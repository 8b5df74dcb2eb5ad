use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::transition::TransitionMatrix;
use crate::error::{Error, Result};
use crate::operator::UnitaryOperator;
use crate::thermo::ThermalSpec;

/// Samples drawn per random stream. Streams are keyed by `(seed, chunk)`, so
/// the sample sequence does not depend on how chunks are spread over threads.
pub const SAMPLES_PER_STREAM: usize = 4096;

/// One emulated run of the two-point measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub n_index: usize,
    pub m_index: usize,
    pub e_i: f64,
    pub e_f: f64,
    /// `E_m^f − E_n^i`.
    pub work: f64,
    /// `β_f E_m^f − β_i E_n^i`.
    pub generalized_exponent: f64,
}

/// Sample mean of `e^{−(β_f E_m − β_i E_n)}` against its exact value
/// `Z_f/Z_i`. Moments are accumulated for the ratio to the exact value, which
/// stays near 1 even when the average itself is astronomically large.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub count: usize,
    pub mean: f64,
    pub stderr: Option<f64>,
    pub exact: f64,
    pub ln_exact: f64,
    /// `mean / exact`.
    pub ratio: f64,
    /// `(mean − exact) / stderr`.
    pub z_score: Option<f64>,
}

impl EstimatorSummary {
    fn from_moments(count: usize, sum: f64, sum_sq: f64, ln_exact: f64) -> Self {
        let nf = count as f64;
        let ratio = sum / nf;
        let ratio_se = if count > 1 {
            let var = ((sum_sq - nf * ratio * ratio) / (nf - 1.0)).max(0.0);
            Some((var / nf).sqrt())
        } else {
            None
        };
        let z_score = ratio_se.and_then(|se| {
            let dev = ratio - 1.0;
            if se > 0.0 {
                Some(dev / se)
            } else if dev.abs() <= 4.0 * f64::EPSILON {
                Some(0.0)
            } else {
                None
            }
        });
        let exact = ln_exact.exp();
        EstimatorSummary {
            count,
            mean: ratio * exact,
            stderr: ratio_se.map(|se| se * exact),
            exact,
            ln_exact,
            ratio,
            z_score,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TpmSamples {
    pub samples: Vec<TrajectorySample>,
    pub summary: EstimatorSummary,
}

impl TpmSamples {
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "n_index,m_index,E_i,E_f,work,generalized_exponent")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.n_index,
                s.m_index,
                crate::fmt_f64(s.e_i),
                crate::fmt_f64(s.e_f),
                crate::fmt_f64(s.work),
                crate::fmt_f64(s.generalized_exponent)
            )?;
        }
        Ok(())
    }
}

fn weighted(weights: impl IntoIterator<Item = f64>) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::param(format!("cannot sample from weights: {e}")))
}

/// Emulates `count` runs of the two-point measurement: `n` is drawn from the
/// Gibbs weights of `initial`, then `m` from column `n` of the transition
/// matrix. Deterministic for a fixed seed, whatever the thread count.
pub fn sample_tpm(
    initial: &ThermalSpec,
    final_: &ThermalSpec,
    u: &UnitaryOperator,
    count: usize,
    seed: u64,
) -> Result<TpmSamples> {
    if count == 0 {
        return Err(Error::param("sample count must be at least 1"));
    }
    let t = TransitionMatrix::from_spectra(initial.spectrum(), final_.spectrum(), u)?;
    let ei = initial.spectrum().eigenvalues();
    let ef = final_.spectrum().eigenvalues();
    let (bi, bf) = (initial.beta(), final_.beta());

    let start = weighted(initial.populations())?;
    let columns = (0..t.dim())
        .map(|n| weighted(t.matrix().column(n).iter().copied()))
        .collect::<Result<Vec<_>>>()?;

    let chunks = count.div_ceil(SAMPLES_PER_STREAM);
    let samples: Vec<TrajectorySample> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLES_PER_STREAM.min(count - c * SAMPLES_PER_STREAM);
            let start = &start;
            let columns = &columns;
            (0..len)
                .map(move |_| {
                    let n = start.sample(&mut rng);
                    let m = columns[n].sample(&mut rng);
                    TrajectorySample {
                        n_index: n,
                        m_index: m,
                        e_i: ei[n],
                        e_f: ef[m],
                        work: ef[m] - ei[n],
                        generalized_exponent: bf * ef[m] - bi * ei[n],
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let ln_exact = initial_ln_ratio(initial, final_);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for s in &samples {
        let r = (-s.generalized_exponent - ln_exact).exp();
        sum += r;
        sum_sq += r * r;
    }
    let summary = EstimatorSummary::from_moments(count, sum, sum_sq, ln_exact);
    Ok(TpmSamples { samples, summary })
}

/// `ln(Z_f/Z_i)`.
fn initial_ln_ratio(initial: &ThermalSpec, final_: &ThermalSpec) -> f64 {
    final_.ln_partition_function() - initial.ln_partition_function()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{HermitianOperator, QubitRegister};
    use crate::random::{random_hermitian, random_unitary};

    fn reg(n: usize) -> QubitRegister {
        QubitRegister::new(n).unwrap()
    }

    #[test]
    fn trivial_protocol_has_zero_work() {
        let h = HermitianOperator::from_real_diagonal(reg(2), &[0.0, 0.3, 0.3, 1.0]).unwrap();
        let spec = ThermalSpec::new(h, 2.0).unwrap();
        let out = sample_tpm(&spec, &spec, &UnitaryOperator::identity(reg(2)), 500, 1).unwrap();
        assert!(out.samples.iter().all(|s| s.work == 0.0 && s.n_index == s.m_index));
        assert_eq!(out.summary.mean, 1.0);
        assert_eq!(out.summary.z_score, Some(0.0));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hi = ThermalSpec::new(random_hermitian(&mut rng, reg(2)), 0.5).unwrap();
        let hf = ThermalSpec::new(random_hermitian(&mut rng, reg(2)), 0.5).unwrap();
        let u = random_unitary(&mut rng, reg(2));
        let count = 3 * SAMPLES_PER_STREAM + 17;
        let a = sample_tpm(&hi, &hf, &u, count, 42).unwrap();
        let b = sample_tpm(&hi, &hf, &u, count, 42).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples.len(), count);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| sample_tpm(&hi, &hf, &u, count, 42).unwrap());
        assert_eq!(a.samples, c.samples);
        let d = sample_tpm(&hi, &hf, &u, count, 43).unwrap();
        assert_ne!(a.samples, d.samples);
    }

    #[test]
    fn single_sample_has_no_error_bar() {
        let h = HermitianOperator::from_real_diagonal(reg(1), &[0.0, 1.0]).unwrap();
        let spec = ThermalSpec::new(h, 1.0).unwrap();
        let out = sample_tpm(&spec, &spec, &UnitaryOperator::identity(reg(1)), 1, 0).unwrap();
        assert_eq!(out.samples.len(), 1);
        assert!(out.summary.stderr.is_none() && out.summary.z_score.is_none());
        assert!(sample_tpm(&spec, &spec, &UnitaryOperator::identity(reg(1)), 0, 0).is_err());
    }

    #[test]
    fn estimator_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let hi = ThermalSpec::new(random_hermitian(&mut rng, reg(3)), 0.8).unwrap();
        let hf = ThermalSpec::new(random_hermitian(&mut rng, reg(3)), 0.8).unwrap();
        let u = random_unitary(&mut rng, reg(3));
        let out = sample_tpm(&hi, &hf, &u, 50_000, 11).unwrap();
        let z = out.summary.z_score.unwrap();
        assert!(z.abs() < 4.0, "z = {z}");
    }
}

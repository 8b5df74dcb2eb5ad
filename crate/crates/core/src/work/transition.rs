use std::io::{self, Write};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::operator::{spectral_decompose, HermitianOperator, SpectralDecomposition, UnitaryOperator};
use crate::thermo::{log_sum_exp, ThermalSpec};

/// Two-point-measurement transition probabilities
/// `q[m][n] = |⟨φ_m^f|U|φ_n^i⟩|²` together with both spectra.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    q: DMatrix<f64>,
    initial: SpectralDecomposition,
    final_: SpectralDecomposition,
}

impl TransitionMatrix {
    pub fn from_spectra(initial: &SpectralDecomposition, final_: &SpectralDecomposition, u: &UnitaryOperator) -> Result<Self> {
        let d = u.register().dim();
        for found in [initial.dim(), final_.dim()] {
            if found != d {
                return Err(crate::Error::DimensionMismatch { expected: d, found });
            }
        }
        let amplitudes = final_.eigenvectors().adjoint() * u.matrix() * initial.eigenvectors();
        let q = amplitudes.map(|a| a.norm_sqr());
        Ok(TransitionMatrix {
            q,
            initial: initial.clone(),
            final_: final_.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `q[m][n]`: probability of ending in final eigenvector `m` from
    /// initial eigenvector `n`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.q[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn initial_spectrum(&self) -> &SpectralDecomposition {
        &self.initial
    }

    pub fn final_spectrum(&self) -> &SpectralDecomposition {
        &self.final_
    }

    /// Largest `|Σ_m q[m][n] − 1|` or `|Σ_n q[m][n] − 1|`.
    pub fn stochasticity_deviation(&self) -> f64 {
        let rows = self.q.row_iter().map(|r| (r.sum() - 1.0).abs());
        let cols = self.q.column_iter().map(|c| (c.sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Probability of landing in each final eigenspace from each initial
    /// eigenspace, weighted by `weights` over initial eigenvectors:
    /// `P[M][N] = Σ_{n∈N} w_n Σ_{m∈M} q[m][n]`. Unlike `q` itself this does
    /// not depend on the basis chosen inside degenerate eigenspaces, as long
    /// as the weights are constant on each initial eigenspace.
    pub fn eigenspace_flow(&self, weights: &[f64]) -> DMatrix<f64> {
        let fi = self.initial.eigenspaces();
        let ff = self.final_.eigenspaces();
        DMatrix::from_fn(ff.len(), fi.len(), |a, b| {
            fi[b]
                .clone()
                .map(|n| weights[n] * ff[a].clone().map(|m| self.q[(m, n)]).sum::<f64>())
                .sum()
        })
    }

    /// `ln Σ_n p_n Σ_m q[m][n] e^{−(β_f E_m^f − β_i E_n^i)}` with `p_n` the
    /// Gibbs weights at `β_i`. Evaluated term by term in log space.
    pub fn ln_generalized_average(&self, beta_i: f64, beta_f: f64) -> f64 {
        let ei = self.initial.eigenvalues();
        let ef = self.final_.eigenvalues();
        let ln_zi = log_sum_exp(ei.iter().map(|&e| -beta_i * e));
        let mut terms = Vec::with_capacity(self.q.len());
        for (n, &en) in ei.iter().enumerate() {
            let ln_pn = -beta_i * en - ln_zi;
            for (m, &em) in ef.iter().enumerate() {
                let q = self.q[(m, n)];
                if q > 0.0 {
                    terms.push(ln_pn + q.ln() - (beta_f * em - beta_i * en));
                }
            }
        }
        log_sum_exp(terms)
    }
}

/// Transition probabilities between the eigenbases of `h_i` and `h_f` under `u`.
pub fn transition_matrix(h_i: &HermitianOperator, h_f: &HermitianOperator, u: &UnitaryOperator) -> Result<TransitionMatrix> {
    h_i.register().ensure_same(&h_f.register())?;
    h_i.register().ensure_same(&u.register())?;
    TransitionMatrix::from_spectra(&spectral_decompose(h_i)?, &spectral_decompose(h_f)?, u)
}

/// `⟨e^{−β𝒲}⟩` over the two-point-measurement work distribution, starting
/// from the Gibbs state of `h_i`. Equals `Z_f/Z_i` for every `u`.
pub fn jarzynski_average(beta: f64, h_i: &HermitianOperator, h_f: &HermitianOperator, u: &UnitaryOperator) -> Result<f64> {
    tasaki_average(beta, beta, h_i, h_f, u)
}

/// `⟨e^{−(β_f E_f − β_i E_i)}⟩`, the two-temperature average of the
/// Jarzynski–Tasaki equality. Equals `Z_f(β_f)/Z_i(β_i)` for every `u`.
pub fn tasaki_average(
    beta_i: f64,
    beta_f: f64,
    h_i: &HermitianOperator,
    h_f: &HermitianOperator,
    u: &UnitaryOperator,
) -> Result<f64> {
    check_beta(beta_i)?;
    check_beta(beta_f)?;
    Ok(transition_matrix(h_i, h_f, u)?.ln_generalized_average(beta_i, beta_f).exp())
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::param(format!("inverse temperature must be finite and > 0, got {beta}")))
    }
}

/// `ln⟨e^{−(β_f E_f − β_i E_i)}⟩` between two thermal specs, reusing their
/// spectra.
pub fn ln_tasaki_average(initial: &ThermalSpec, final_: &ThermalSpec, u: &UnitaryOperator) -> Result<f64> {
    let t = TransitionMatrix::from_spectra(initial.spectrum(), final_.spectrum(), u)?;
    Ok(t.ln_generalized_average(initial.beta(), final_.beta()))
}

/// `S(ρ_f‖ρ_i) = −tr(ρ_f Δ(βH)) − ln⟨e^{−(β_f E_f − β_i E_i)}⟩` with
/// `Δ(βH) = β_f H_f − β_i H_i`, where `ρ_i`, `ρ_f` are the Gibbs states of
/// the two specs and `u` drives `H_i` into `H_f`.
pub fn relative_entropy_via_work(initial: &ThermalSpec, final_: &ThermalSpec, u: &UnitaryOperator) -> Result<f64> {
    initial
        .hamiltonian()
        .register()
        .ensure_same(&final_.hamiltonian().register())?;
    let rho_f = final_.state();
    let delta_beta_h =
        final_.beta() * final_.mean_energy() - initial.beta() * rho_f.expectation(initial.hamiltonian());
    Ok(-delta_beta_h - ln_tasaki_average(initial, final_, u)?)
}

/// One `(n, m)` outcome of the two-point measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorkOutcome {
    pub n_index: usize,
    pub m_index: usize,
    pub e_i: f64,
    pub e_f: f64,
    /// `E_m^f − E_n^i`.
    pub work: f64,
    /// `p_n q[m][n]`.
    pub probability: f64,
}

/// Exact work distribution over all `(n, m)` pairs.
#[derive(Clone, Debug, Serialize)]
pub struct WorkDistribution {
    pub beta_i: f64,
    pub beta_f: f64,
    pub outcomes: Vec<WorkOutcome>,
}

impl WorkDistribution {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// `⟨𝒲⟩`.
    pub fn mean_work(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability * o.work).sum()
    }

    /// `⟨e^{−(β_f E_f − β_i E_i)}⟩` summed over the listed outcomes.
    pub fn generalized_average(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.probability > 0.0)
            .map(|o| (o.probability.ln() - (self.beta_f * o.e_f - self.beta_i * o.e_i)).exp())
            .sum()
    }

    /// Outcomes merged by work value: entries whose work differs by at most
    /// `tol` are combined. Sorted by work.
    pub fn by_work(&self, tol: f64) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self.outcomes.iter().map(|o| (o.work, o.probability)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (w, p) in pairs {
            match merged.last_mut() {
                Some(last) if (w - last.0).abs() <= tol => last.1 += p,
                _ => merged.push((w, p)),
            }
        }
        merged
    }

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "n_index,m_index,E_i,E_f,work,probability")?;
        for o in &self.outcomes {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                o.n_index,
                o.m_index,
                crate::fmt_f64(o.e_i),
                crate::fmt_f64(o.e_f),
                crate::fmt_f64(o.work),
                crate::fmt_f64(o.probability)
            )?;
        }
        Ok(())
    }
}

/// Full work distribution of the protocol `u` from the Gibbs state of
/// `initial` to the eigenbasis of `final_`.
pub fn work_distribution(initial: &ThermalSpec, final_: &ThermalSpec, u: &UnitaryOperator) -> Result<WorkDistribution> {
    let t = TransitionMatrix::from_spectra(initial.spectrum(), final_.spectrum(), u)?;
    let p = initial.populations();
    let ei = initial.spectrum().eigenvalues();
    let ef = final_.spectrum().eigenvalues();
    let mut outcomes = Vec::with_capacity(t.q.len());
    for (n, &en) in ei.iter().enumerate() {
        for (m, &em) in ef.iter().enumerate() {
            outcomes.push(WorkOutcome {
                n_index: n,
                m_index: m,
                e_i: en,
                e_f: em,
                work: em - en,
                probability: p[n] * t.q[(m, n)],
            });
        }
    }
    Ok(WorkDistribution {
        beta_i: initial.beta(),
        beta_f: final_.beta(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{embed_pauli, CMatrix, PauliAxis, QubitRegister};
    use crate::random::{random_hermitian, random_unitary};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reg(n: usize) -> QubitRegister {
        QubitRegister::new(n).unwrap()
    }

    fn hadamard() -> UnitaryOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMatrix::from_row_slice(2, 2, &[h, h, h, -h].map(|x| Complex64::new(x, 0.0)));
        UnitaryOperator::from_matrix(m).unwrap()
    }

    #[test]
    fn identity_protocol_gives_identity() {
        let h = HermitianOperator::from_real_diagonal(reg(2), &[0.0, 1.0, 2.5, 4.0]).unwrap();
        let t = transition_matrix(&h, &h, &UnitaryOperator::identity(reg(2))).unwrap();
        let d = t.matrix() - DMatrix::<f64>::identity(4, 4);
        assert!(d.amax() < 1e-15);
    }

    #[test]
    fn hadamard_spreads_evenly() {
        let h = -&embed_pauli(reg(1), 1, PauliAxis::Z).unwrap();
        let t = transition_matrix(&h, &h, &hadamard()).unwrap();
        for x in t.matrix().iter() {
            assert!((x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn random_unitaries_are_doubly_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let hi = random_hermitian(&mut rng, reg(n));
            let hf = random_hermitian(&mut rng, reg(n));
            let u = random_unitary(&mut rng, reg(n));
            let t = transition_matrix(&hi, &hf, &u).unwrap();
            assert!(t.stochasticity_deviation() < 1e-12);
            assert!(t.matrix().iter().all(|&x| (0.0..=1.0 + 1e-14).contains(&x)));
        }
    }

    #[test]
    fn single_qubit_tasaki() {
        let h = -&embed_pauli(reg(1), 1, PauliAxis::Z).unwrap();
        let u = UnitaryOperator::identity(reg(1));
        let got = tasaki_average(1.0, 2.0, &h, &h, &u).unwrap();
        let want = 2.0f64.cosh() / 1.0f64.cosh();
        assert!((got / want - 1.0).abs() < 1e-14);
        assert!((want - 2.4381).abs() < 1e-4);
        assert!(tasaki_average(0.0, 1.0, &h, &h, &u).is_err());
    }

    #[test]
    fn zero_hamiltonians_give_unity() {
        let z = HermitianOperator::zeros(reg(2));
        let u = random_unitary(&mut ChaCha8Rng::seed_from_u64(1), reg(2));
        assert!((tasaki_average(0.3, 5.0, &z, &z, &u).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quench_distribution_by_hand() {
        // −σ^z → −2σ^z with U = I: E_f = 2 E_i, so 𝒲 = E_i
        let z = embed_pauli(reg(1), 1, PauliAxis::Z).unwrap();
        let beta = 0.7;
        let init = ThermalSpec::new(-&z, beta).unwrap();
        let fin = ThermalSpec::new(z.scale(-2.0), beta).unwrap();
        let dist = work_distribution(&init, &fin, &UnitaryOperator::identity(reg(1))).unwrap();
        let merged: Vec<_> = dist.by_work(1e-12).into_iter().filter(|&(_, p)| p > 0.0).collect();
        assert_eq!(merged.len(), 2);
        let z1 = 2.0 * beta.cosh();
        assert!((merged[0].0 + 1.0).abs() < 1e-14 && (merged[0].1 - beta.exp() / z1).abs() < 1e-14);
        assert!((merged[1].0 - 1.0).abs() < 1e-14 && (merged[1].1 - (-beta).exp() / z1).abs() < 1e-14);
    }

    #[test]
    fn distribution_matches_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hi = random_hermitian(&mut rng, reg(3));
        let hf = random_hermitian(&mut rng, reg(3));
        let u = random_unitary(&mut rng, reg(3));
        let init = ThermalSpec::new(hi.clone(), 1.3).unwrap();
        let fin = ThermalSpec::new(hf.clone(), 1.3).unwrap();
        let dist = work_distribution(&init, &fin, &u).unwrap();
        assert!((dist.total_probability() - 1.0).abs() < 1e-12);
        let avg = jarzynski_average(1.3, &hi, &hf, &u).unwrap();
        assert!((dist.generalized_average() - avg).abs() < 1e-12 * avg);
        let mut csv = Vec::new();
        dist.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.starts_with("n_index,m_index,E_i,E_f,work,probability\n"));
    }

    #[test]
    fn eigenspace_flow_ignores_degenerate_basis() {
        // doubly degenerate level; rotate its basis and compare
        let reg2 = reg(2);
        let hi = HermitianOperator::from_real_diagonal(reg2, &[0.0, 1.0, 1.0, 3.0]).unwrap();
        let hf = HermitianOperator::from_real_diagonal(reg2, &[-1.0, 0.5, 0.5, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, reg2);
        let init = ThermalSpec::new(hi.clone(), 0.9).unwrap();
        let a = TransitionMatrix::from_spectra(init.spectrum(), &spectral_decompose(&hf).unwrap(), &u).unwrap();

        let rot = random_unitary(&mut rng, reg(1));
        let mut v = CMatrix::identity(4, 4);
        for (r, i) in [1, 2].into_iter().enumerate() {
            for (c, j) in [1, 2].into_iter().enumerate() {
                v[(i, j)] = rot.matrix()[(r, c)];
            }
        }
        let rotated = SpectralDecomposition::from_parts(vec![0.0, 1.0, 1.0, 3.0], v).unwrap();
        let b = TransitionMatrix::from_spectra(&rotated, &spectral_decompose(&hf).unwrap(), &u).unwrap();
        assert!((a.matrix() - b.matrix()).amax() > 1e-3);

        let p = init.populations();
        assert!((a.eigenspace_flow(&p) - b.eigenspace_flow(&p)).amax() < 1e-14);
        let la = a.ln_generalized_average(0.9, 0.4);
        let lb = b.ln_generalized_average(0.9, 0.4);
        assert!((la - lb).abs() < 1e-13);
    }
}

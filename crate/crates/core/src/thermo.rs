//! Gibbs states, partition functions, free energies and relative entropy.
//!
//! Exponentials are always taken of the shifted spectrum `E − E_min`, so
//! partition functions are carried as `ln Z` and nothing overflows at large β.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    spectral_decompose, trace_product_re, CMatrix, DensityMatrix, HermitianOperator,
    SpectralDecomposition,
};

/// Eigenvalues of a density matrix at or below this are outside its support
/// (`0 ln 0 = 0`).
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Weight of `ρ` allowed to fall outside `supp σ` before `S(ρ‖σ)` is declared
/// infinite. Absorbs rounding noise in eigenvector overlaps.
pub const SUPPORT_LEAKAGE_TOLERANCE: f64 = 1e-10;

/// `ln Σ_k exp(x_k)` without overflow.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// A Hamiltonian at inverse temperature β, with its spectrum and `ln Z`.
#[derive(Clone, Debug)]
pub struct ThermalSpec {
    hamiltonian: HermitianOperator,
    beta: f64,
    spectrum: SpectralDecomposition,
    ln_z: f64,
    state: OnceLock<DensityMatrix>,
}

impl ThermalSpec {
    pub fn new(hamiltonian: HermitianOperator, beta: f64) -> Result<Self> {
        let spectrum = spectral_decompose(&hamiltonian)?;
        Self::with_spectrum(hamiltonian, spectrum, beta)
    }

    /// Reuses an existing decomposition of `hamiltonian`, e.g. across a
    /// temperature scan.
    pub fn with_spectrum(hamiltonian: HermitianOperator, spectrum: SpectralDecomposition, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("inverse temperature must be finite and > 0, got {beta}")));
        }
        if spectrum.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: spectrum.dim(),
            });
        }
        let ln_z = log_sum_exp(spectrum.eigenvalues().iter().map(|&e| -beta * e));
        Ok(ThermalSpec {
            hamiltonian,
            beta,
            spectrum,
            ln_z,
            state: OnceLock::new(),
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        self.beta.recip()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn ln_partition_function(&self) -> f64 {
        self.ln_z
    }

    /// `Z = tr e^{−βH}`; may overflow to infinity where `ln Z` does not.
    pub fn partition_function(&self) -> f64 {
        self.ln_z.exp()
    }

    /// `βF = −ln Z`.
    pub fn beta_free_energy(&self) -> f64 {
        -self.ln_z
    }

    pub fn free_energy(&self) -> f64 {
        -self.ln_z / self.beta
    }

    /// `ln p_k = −β E_k − ln Z` per eigenvector.
    pub fn log_populations(&self) -> Vec<f64> {
        self.spectrum.eigenvalues().iter().map(|&e| -self.beta * e - self.ln_z).collect()
    }

    /// Boltzmann weights `e^{−β E_k} / Z` per eigenvector.
    pub fn populations(&self) -> Vec<f64> {
        self.log_populations().into_iter().map(f64::exp).collect()
    }

    /// `⟨H⟩` in the Gibbs state.
    pub fn mean_energy(&self) -> f64 {
        self.populations()
            .iter()
            .zip(self.spectrum.eigenvalues())
            .map(|(p, e)| p * e)
            .sum()
    }

    /// `e^{−βH}/Z`.
    pub fn state(&self) -> &DensityMatrix {
        self.state.get_or_init(|| {
            let m = self.spectrum.compose(&self.populations());
            DensityMatrix::from_parts(self.hamiltonian.register(), m)
        })
    }

    /// `ln(e^{−βH}/Z) = −βH − ln Z`, exact even where the populations
    /// underflow.
    pub fn log_state(&self) -> CMatrix {
        let d = self.hamiltonian.dim();
        self.hamiltonian.matrix() * Complex64::new(-self.beta, 0.0)
            - CMatrix::identity(d, d) * Complex64::new(self.ln_z, 0.0)
    }

    /// `tr(ρ ln ρ)` of the Gibbs state.
    pub fn neg_entropy(&self) -> f64 {
        self.log_populations()
            .into_iter()
            .map(|lp| if lp.exp() > 0.0 { lp.exp() * lp } else { 0.0 })
            .sum()
    }
}

/// `e^{−βH}/Z`.
pub fn thermal_state(spec: &ThermalSpec) -> DensityMatrix {
    spec.state().clone()
}

/// `tr(ρ ln ρ)` under the support convention.
pub fn neg_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(rho
        .spectrum()?
        .eigenvalues()
        .iter()
        .filter(|&&p| p > EIGENVALUE_FLOOR)
        .map(|&p| p * p.ln())
        .sum())
}

/// `S(ρ‖σ) = tr(ρ ln ρ) − tr(ρ ln σ)` in nats. Logarithms are taken on the
/// supports; returns `+∞` when `ρ` has weight outside `supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.register().ensure_same(&sigma.register())?;
    let r = rho.spectrum()?;
    let s = sigma.spectrum()?;
    let overlaps = r.eigenvectors().adjoint() * s.eigenvectors();
    let mut self_term = 0.0;
    let mut cross_term = 0.0;
    let mut leakage = 0.0;
    for (i, &ri) in r.eigenvalues().iter().enumerate() {
        if ri <= EIGENVALUE_FLOOR {
            continue;
        }
        self_term += ri * ri.ln();
        for (j, &sj) in s.eigenvalues().iter().enumerate() {
            let w = overlaps[(i, j)].norm_sqr();
            if sj > EIGENVALUE_FLOOR {
                cross_term += ri * w * sj.ln();
            } else {
                leakage += ri * w;
            }
        }
    }
    if leakage > SUPPORT_LEAKAGE_TOLERANCE {
        return Ok(f64::INFINITY);
    }
    Ok((self_term - cross_term).max(0.0))
}

/// `S(ρ‖σ)` for a Gibbs `σ`, with `ln σ = −βH − ln Z` taken exactly.
pub fn relative_entropy_to_thermal(rho: &DensityMatrix, sigma: &ThermalSpec) -> Result<f64> {
    rho.register().ensure_same(&sigma.hamiltonian().register())?;
    let cross = trace_product_re(rho.matrix(), &sigma.log_state());
    Ok((neg_entropy(rho)? - cross).max(0.0))
}

/// `Δ(βF) = β_f F_f − β_i F_i = ln Z_i − ln Z_f`.
pub fn delta_beta_f(initial: &ThermalSpec, final_: &ThermalSpec) -> f64 {
    initial.ln_partition_function() - final_.ln_partition_function()
}

/// `S(ρ_f‖ρ_i) = Δ(βF) − tr(ρ_f Δ(βH))` for two Gibbs states, where
/// `Δ(βH) = β_f H_f − β_i H_i`.
pub fn gibbs_relative_entropy(initial: &ThermalSpec, final_: &ThermalSpec) -> Result<f64> {
    initial
        .hamiltonian()
        .register()
        .ensure_same(&final_.hamiltonian().register())?;
    let rho_f = final_.state();
    let delta_beta_h =
        final_.beta() * final_.mean_energy() - initial.beta() * rho_f.expectation(initial.hamiltonian());
    Ok(delta_beta_f(initial, final_) - delta_beta_h)
}

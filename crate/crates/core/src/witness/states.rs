use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{dicke_state, CMatrix, DensityMatrix, QubitRegister, StateVector};
use crate::spin::{Boundary, XXZParams};

/// Above this temperature the thermal stand-ins for the closest separable
/// states are no longer close to them.
pub const LOW_TEMPERATURE_LIMIT: f64 = 0.1;

fn symmetric_register(n: usize) -> Result<QubitRegister> {
    if n < 2 {
        return Err(Error::param(format!("symmetric states need n >= 2, got {n}")));
    }
    QubitRegister::new(n)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn projector(psi: &StateVector) -> CMatrix {
    psi * psi.adjoint()
}

/// `|W_n⟩⟨W_n|`: the symmetric state with a single `1`.
pub fn build_w_state(n: usize) -> Result<DensityMatrix> {
    let register = symmetric_register(n)?;
    DensityMatrix::pure(register, &dicke_state(register, 1)?)
}

/// Weight of the Dicke state with `k` zeros in the closest separable state of
/// `|W_n⟩`: `C(n,k) (n−1)^k / n^n`.
pub fn css_weight(n: usize, k_zeros: usize) -> f64 {
    let nf = n as f64;
    binomial(n, k_zeros) * ((k_zeros as f64) * (nf - 1.0).ln() - nf * nf.ln()).exp()
}

/// Closest separable state of `|W_n⟩`, diagonal in the Dicke basis.
pub fn build_css(n: usize) -> Result<DensityMatrix> {
    let register = symmetric_register(n)?;
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    for k_zeros in 0..=n {
        let psi = dicke_state(register, n - k_zeros)?;
        m += projector(&psi) * Complex64::new(css_weight(n, k_zeros), 0.0);
    }
    DensityMatrix::new(register, m)
}

/// Mixture of the product states `(cos θ|0⟩ + e^{iφ} sin θ|1⟩)^{⊗n}` with
/// `cos²θ = (n−1)/n`, over `n + 1` equally spaced phases `φ`. Separable by
/// construction, and equal to [`build_css`].
pub fn phase_averaged_css(n: usize) -> Result<DensityMatrix> {
    let register = symmetric_register(n)?;
    let nf = n as f64;
    let (c, s) = (((nf - 1.0) / nf).sqrt(), nf.recip().sqrt());
    let phases = n + 1;
    let ensemble: Vec<(f64, StateVector)> = (0..phases)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / phases as f64;
            let single = StateVector::from_vec(vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]);
            let mut psi = single.clone();
            for _ in 1..n {
                psi = psi.kronecker(&single);
            }
            (1.0 / phases as f64, psi)
        })
        .collect();
    DensityMatrix::from_ensemble(register, &ensemble)
}

/// Equilibrium stand-in for the seven-qubit closest separable state:
/// `[(7^7 − 7·6^6)|0⟩⟨0|^{⊗7} + 6^6 Ŝ|0000001⟩⟨0000001|Ŝ] / 7^7`, with `Ŝ` the
/// unnormalized sum over distinct permutations.
pub fn build_sigma_prime_7() -> Result<DensityMatrix> {
    let register = QubitRegister::new(7)?;
    let total = 7f64.powi(7);
    let excited = 7.0 * 6f64.powi(6);
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = Complex64::new((total - excited) / total, 0.0);
    let w = dicke_state(register, 1)?;
    m += projector(&w) * Complex64::new(excited / total, 0.0);
    DensityMatrix::new(register, m)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("inverse temperature must be finite and > 0, got {beta}")))
    }
}

/// Three-site parameters whose Gibbs state at `beta` approximates
/// [`build_css`]`(3)`: `B = β⁻¹ ln 2 / 2`, `Jz = (2J − β⁻¹ ln 3)/4`.
pub fn css_thermal_params_3(beta: f64, j: f64) -> Result<XXZParams> {
    check_beta(beta)?;
    let t = beta.recip();
    XXZParams::new(3, j, (2.0 * j - t * 3f64.ln()) / 4.0, t * 2f64.ln() / 2.0, Boundary::Periodic)
}

/// Seven-site parameters whose Gibbs state at `beta` approximates
/// [`build_sigma_prime_7`]: `Jz = 0`, `B = β⁻¹ ln(70993/46656)/2 + J`.
pub fn sigma_prime_thermal_params_7(beta: f64, j: f64) -> Result<XXZParams> {
    check_beta(beta)?;
    let t = beta.recip();
    XXZParams::new(7, j, 0.0, t * (70993f64 / 46656.0).ln() / 2.0 + j, Boundary::Periodic)
}

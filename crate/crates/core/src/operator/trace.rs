use num_complex::Complex64;

use super::pauli::scatter_table;
use super::{CMatrix, DensityMatrix, QubitRegister, StateVector};
use crate::error::{Error, Result};

fn validate_keep(register: QubitRegister, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::param("partial trace needs a non-empty set of kept sites"));
    }
    let mut sites = keep.to_vec();
    sites.sort_unstable();
    sites.dedup();
    for &s in &sites {
        register.check_site(s)?;
    }
    Ok(sites)
}

/// Traces out every site not in `keep`. The result acts on the kept sites in
/// ascending order. Works on any operator, not only states.
pub fn partial_trace_matrix(m: &CMatrix, register: QubitRegister, keep: &[usize]) -> Result<CMatrix> {
    if m.nrows() != register.dim() || m.ncols() != register.dim() {
        return Err(Error::DimensionMismatch {
            expected: register.dim(),
            found: m.nrows(),
        });
    }
    let kept = validate_keep(register, keep)?;
    let traced: Vec<usize> = (1..=register.n()).filter(|s| !kept.contains(s)).collect();
    let inner = scatter_table(register, &kept);
    let outer = scatter_table(register, &traced);
    let k = inner.len();
    let mut out = CMatrix::zeros(k, k);
    for (a, &fa) in inner.iter().enumerate() {
        for (b, &fb) in inner.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &r in &outer {
                acc += m[(fa | r, fb | r)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the `keep` sites (1-based).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let kept = validate_keep(rho.register(), keep)?;
    let m = partial_trace_matrix(rho.matrix(), rho.register(), &kept)?;
    let reduced = QubitRegister::new(kept.len())?;
    Ok(DensityMatrix::from_parts(reduced, m))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalized equal-weight superposition of every basis state with exactly
/// `k_ones` ones.
pub fn dicke_state(register: QubitRegister, k_ones: usize) -> Result<StateVector> {
    let n = register.n();
    if k_ones > n {
        return Err(Error::param(format!(
            "Dicke excitation number {k_ones} exceeds {n} qubits"
        )));
    }
    let amp = Complex64::new(binomial(n, k_ones).sqrt().recip(), 0.0);
    Ok(StateVector::from_fn(register.dim(), |i, _| {
        if i.count_ones() as usize == k_ones {
            amp
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

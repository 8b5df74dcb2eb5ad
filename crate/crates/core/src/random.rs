//! Seeded random operators and states, for property tests, benchmarks and
//! protocol-independence checks.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{CMatrix, DensityMatrix, HermitianOperator, QubitRegister, StateVector, UnitaryOperator};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// GUE-like Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian(rng: &mut impl Rng, register: QubitRegister) -> HermitianOperator {
    let d = register.dim();
    let g = ginibre(rng, d, d);
    HermitianOperator::from_parts(register, (&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary(rng: &mut impl Rng, register: QubitRegister) -> UnitaryOperator {
    let d = register.dim();
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::new(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    UnitaryOperator::from_parts(register, q)
}

/// Random mixed state `G G† / tr(G G†)` with `G` of size `dim × rank`.
pub fn random_density(rng: &mut impl Rng, register: QubitRegister, rank: usize) -> DensityMatrix {
    let d = register.dim();
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_parts(register, m / Complex64::new(tr, 0.0))
}

pub fn random_pure_state(rng: &mut impl Rng, register: QubitRegister) -> StateVector {
    let v = DVector::from_fn(register.dim(), |_, _| gaussian(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `|ψ_1⟩ ⊗ ⋯ ⊗ |ψ_n⟩` with independent random single-qubit factors.
pub fn random_product_state(rng: &mut impl Rng, register: QubitRegister) -> StateVector {
    let single = QubitRegister::new(1).expect("one qubit");
    let mut psi = random_pure_state(rng, single);
    for _ in 1..register.n() {
        psi = psi.kronecker(&random_pure_state(rng, single));
    }
    psi
}

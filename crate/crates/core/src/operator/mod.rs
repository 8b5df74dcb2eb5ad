//! Dense complex operators on `n`-qubit registers.
//!
//! Basis convention: site 1 is the leftmost tensor factor, so the
//! computational basis state `|q_1 q_2 … q_n⟩` has index `Σ q_l 2^(n-l)`.
//! `|0⟩` is the `σ^z = +1` eigenstate.

mod json;
mod pauli;
mod spectral;
mod trace;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use json::MatrixJson;
pub use pauli::{embed_operator, embed_pauli, pauli_string, PauliAxis};
pub use spectral::{
    coupled_blocks, hermitian_function, spectral_decompose, CouplingGraph, SpectralDecomposition,
};
pub use trace::{dicke_state, partial_trace, partial_trace_matrix};

pub(crate) use pauli::add_pauli_string;
pub(crate) use spectral::{decompose_matrix, eigh_block, submatrix};

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Pure state amplitudes in the computational basis.
pub type StateVector = DVector<Complex64>;

/// Largest entry of `|a - b|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetrize(mut m: CMatrix) -> CMatrix {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    m
}

/// Real part of `tr(a b)` without forming the product.
pub(crate) fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

/// Number of qubits in a register, `1 ≤ n ≤ 12`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct QubitRegister {
    n: usize,
}

impl QubitRegister {
    /// Dense storage ceiling; `2^12 × 2^12` complex entries is already 256 MiB.
    pub const MAX_QUBITS: usize = 12;

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(Error::InvalidRegister {
                n,
                max: Self::MAX_QUBITS,
            });
        }
        Ok(QubitRegister { n })
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::param(format!(
                "matrix dimension {dim} is not a power of two >= 2"
            )));
        }
        Self::new(dim.trailing_zeros() as usize)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        Ok(())
    }

    /// Bit mask of `site` within a basis index.
    #[inline]
    pub(crate) fn mask(&self, site: usize) -> usize {
        1 << (self.n - site)
    }

    fn check_matrix(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if m.nrows() != self.dim() {
                    m.nrows()
                } else {
                    m.ncols()
                },
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &QubitRegister) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<usize> for QubitRegister {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        QubitRegister::new(n)
    }
}

impl From<QubitRegister> for usize {
    fn from(r: QubitRegister) -> usize {
        r.n
    }
}

/// Self-adjoint operator. Hamiltonians, observables and Pauli embeddings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianOperator {
    register: QubitRegister,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

    pub fn new(register: QubitRegister, matrix: CMatrix) -> Result<Self> {
        register.check_matrix(&matrix)?;
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= Self::HERMITICITY_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::from_parts(register, matrix))
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let register = QubitRegister::from_dim(matrix.nrows())?;
        Self::new(register, matrix)
    }

    /// Builds from a matrix that is Hermitian up to rounding; the stored copy
    /// is made exactly Hermitian.
    pub(crate) fn from_parts(register: QubitRegister, matrix: CMatrix) -> Self {
        HermitianOperator {
            register,
            matrix: symmetrize(matrix),
        }
    }

    pub fn zeros(register: QubitRegister) -> Self {
        let d = register.dim();
        HermitianOperator {
            register,
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(register: QubitRegister) -> Self {
        let d = register.dim();
        HermitianOperator {
            register,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn from_real_diagonal(register: QubitRegister, diag: &[f64]) -> Result<Self> {
        if diag.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: diag.len(),
            });
        }
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Ok(HermitianOperator {
            register,
            matrix: CMatrix::from_diagonal(&d),
        })
    }

    #[inline]
    pub fn register(&self) -> QubitRegister {
        self.register
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator {
            register: self.register,
            matrix: &self.matrix * Complex64::new(factor, 0.0),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn commutator(&self, other: &HermitianOperator) -> CMatrix {
        &self.matrix * &other.matrix - &other.matrix * &self.matrix
    }

    /// Largest entry of `|[A, B]|`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> f64 {
        max_abs(&self.commutator(other))
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation_pure(&self, psi: &StateVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition> {
        spectral_decompose(self)
    }
}

impl Add<&HermitianOperator> for &HermitianOperator {
    type Output = HermitianOperator;

    /// Panics if the registers differ.
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.register, rhs.register, "register mismatch");
        HermitianOperator {
            register: self.register,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub<&HermitianOperator> for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.register, rhs.register, "register mismatch");
        HermitianOperator {
            register: self.register,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl AddAssign<&HermitianOperator> for HermitianOperator {
    fn add_assign(&mut self, rhs: &HermitianOperator) {
        assert_eq!(self.register, rhs.register, "register mismatch");
        self.matrix += &rhs.matrix;
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;

    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

/// Unitary operator, checked against `|U†U - I| ≤ tolerance` on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct UnitaryOperator {
    register: QubitRegister,
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(register: QubitRegister, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(register, matrix, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(register: QubitRegister, matrix: CMatrix, tolerance: f64) -> Result<Self> {
        register.check_matrix(&matrix)?;
        let deviation = unitarity_deviation(&matrix);
        if !(deviation <= tolerance) {
            return Err(Error::NotUnitary {
                deviation,
                tolerance,
            });
        }
        Ok(UnitaryOperator { register, matrix })
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let register = QubitRegister::from_dim(matrix.nrows())?;
        Self::new(register, matrix)
    }

    pub(crate) fn from_parts(register: QubitRegister, matrix: CMatrix) -> Self {
        UnitaryOperator { register, matrix }
    }

    pub fn identity(register: QubitRegister) -> Self {
        let d = register.dim();
        UnitaryOperator {
            register,
            matrix: CMatrix::identity(d, d),
        }
    }

    /// `exp(-i A t)`.
    pub fn evolution(a: &HermitianOperator, t: f64) -> Result<Self> {
        let spec = spectral_decompose(a)?;
        Ok(Self::from_parts(
            a.register(),
            spec.map_complex(|e| Complex64::from_polar(1.0, -e * t)),
        ))
    }

    #[inline]
    pub fn register(&self) -> QubitRegister {
        self.register
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        UnitaryOperator {
            register: self.register,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `later · self`: apply `self` first.
    pub fn then(&self, later: &UnitaryOperator) -> Self {
        assert_eq!(self.register, later.register, "register mismatch");
        UnitaryOperator {
            register: self.register,
            matrix: &later.matrix * &self.matrix,
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// Spectral norm of `self - other`.
    pub fn operator_norm_distance(&self, other: &UnitaryOperator) -> f64 {
        operator_norm(&(&self.matrix - &other.matrix))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_parts(
            self.register,
            &self.matrix * rho.matrix() * self.matrix.adjoint(),
        )
    }
}

fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

/// Largest singular value, from the spectrum of `A†A`.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let gram = symmetrize(a.adjoint() * a);
    match decompose_matrix(&gram) {
        Ok(spec) => spec.max().max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// Unit-trace positive semidefinite operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityMatrix {
    register: QubitRegister,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOLERANCE: f64 = 1e-12;
    pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
    pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

    pub fn new(register: QubitRegister, matrix: CMatrix) -> Result<Self> {
        register.check_matrix(&matrix)?;
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= Self::HERMITICITY_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= Self::TRACE_TOLERANCE) {
            return Err(Error::InvalidDensity(format!("trace {} != 1", trace.re)));
        }
        let rho = Self::from_parts(register, matrix);
        let min = rho.spectrum()?.min();
        if min < -Self::NEGATIVITY_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let register = QubitRegister::from_dim(matrix.nrows())?;
        Self::new(register, matrix)
    }

    pub(crate) fn from_parts(register: QubitRegister, matrix: CMatrix) -> Self {
        DensityMatrix {
            register,
            matrix: symmetrize(matrix),
        }
    }

    /// `|ψ⟩⟨ψ|`, normalizing `ψ`.
    pub fn pure(register: QubitRegister, psi: &StateVector) -> Result<Self> {
        if psi.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidDensity("zero or non-finite state vector".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Ok(Self::from_parts(register, &psi * psi.adjoint()))
    }

    /// `Σ_k w_k |ψ_k⟩⟨ψ_k|` over normalized vectors; weights must be
    /// non-negative and sum to one.
    pub fn from_ensemble(register: QubitRegister, ensemble: &[(f64, StateVector)]) -> Result<Self> {
        let d = register.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, psi) in ensemble {
            if !(*w >= 0.0) {
                return Err(Error::InvalidDensity(format!("negative weight {w}")));
            }
            if psi.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: psi.len(),
                });
            }
            let norm2 = psi.norm_squared();
            m += (psi * psi.adjoint()) * Complex64::new(w / norm2, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > Self::TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("weights sum to {total}")));
        }
        Ok(Self::from_parts(register, m))
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(register: QubitRegister) -> Self {
        let d = register.dim();
        DensityMatrix {
            register,
            matrix: CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    #[inline]
    pub fn register(&self) -> QubitRegister {
        self.register
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_product_re(&self.matrix, &self.matrix)
    }

    /// `ρ ⊗ other`, with `self` on the leading sites.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let register = QubitRegister::new(self.register.n() + other.register.n())?;
        Ok(DensityMatrix {
            register,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &HermitianOperator) -> f64 {
        trace_product_re(&self.matrix, op.matrix())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition> {
        decompose_matrix(&self.matrix)
    }

    /// Views `ρ` as an observable.
    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator {
            register: self.register,
            matrix: self.matrix.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_bounds() {
        assert!(QubitRegister::new(0).is_err());
        assert!(QubitRegister::new(13).is_err());
        let r = QubitRegister::new(3).unwrap();
        assert_eq!(r.dim(), 8);
        assert!(r.check_site(0).is_err());
        assert!(r.check_site(4).is_err());
        assert!(QubitRegister::from_dim(6).is_err());
        assert_eq!(QubitRegister::from_dim(16).unwrap().n(), 4);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            HermitianOperator::from_matrix(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn density_validation() {
        let r = QubitRegister::new(1).unwrap();
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(r, bad_trace).is_err());
        let negative = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            DensityMatrix::new(r, negative),
            Err(Error::InvalidDensity(_))
        ));
        let mixed = DensityMatrix::maximally_mixed(r);
        assert!((mixed.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unitary_checks() {
        let r = QubitRegister::new(1).unwrap();
        let mut m = CMatrix::identity(2, 2);
        m[(0, 0)] = Complex64::new(1.1, 0.0);
        assert!(matches!(
            UnitaryOperator::new(r, m),
            Err(Error::NotUnitary { .. })
        ));
        let x = embed_pauli(r, 1, PauliAxis::X).unwrap();
        let u = UnitaryOperator::evolution(&x, std::f64::consts::FRAC_PI_2).unwrap();
        // exp(-iπX/2) = -iX
        assert!((u.matrix()[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u.unitarity_deviation() < 1e-14);
        let id = UnitaryOperator::identity(r);
        assert!((u.operator_norm_distance(&id) - 2f64.sqrt()).abs() < 1e-12);
    }
}

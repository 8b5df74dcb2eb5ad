//! XXZ chain Hamiltonians
//!
//! `H = −Σ_l [ (J/2)(σ_l^x σ_{l+1}^x + σ_l^y σ_{l+1}^y) + Jz σ_l^z σ_{l+1}^z + B σ_l^z ]`
//!
//! with an optional Dzyaloshinskii–Moriya term `Σ_l D·(σ_l × σ_{l+1})`.

mod schedule;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{add_pauli_string, CMatrix, HermitianOperator, PauliAxis, QubitRegister};

pub use schedule::{DrivingSchedule, Interpolation, StepSampling};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `σ_{n+1} ≡ σ_1`.
    #[default]
    Periodic,
    /// The `l = n` bond is dropped.
    Open,
}

/// Dzyaloshinskii–Moriya vector `D = (D_x, D_y, D_z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DMParams {
    pub d: [f64; 3],
}

impl DMParams {
    pub fn new(d: [f64; 3]) -> Result<Self> {
        let p = DMParams { d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("Dzyaloshinskii-Moriya vector must be finite"));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&x| x == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XXZParams {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(default)]
    pub boundary: Boundary,
    /// Optional antisymmetric exchange added to the chain.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub dm: Option<DMParams>,
}

impl XXZParams {
    pub fn new(n: usize, j: f64, jz: f64, b: f64, boundary: Boundary) -> Result<Self> {
        let p = XXZParams {
            n,
            j,
            jz,
            b,
            boundary,
            dm: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn periodic(n: usize, j: f64, jz: f64, b: f64) -> Result<Self> {
        Self::new(n, j, jz, b, Boundary::Periodic)
    }

    pub fn with_dm(mut self, dm: DMParams) -> Self {
        self.dm = Some(dm);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param(format!("XXZ chain needs n >= 2 sites, got {}", self.n)));
        }
        QubitRegister::new(self.n)?;
        if ![self.j, self.jz, self.b].iter().all(|x| x.is_finite()) {
            return Err(Error::param("XXZ couplings and field must be finite"));
        }
        if let Some(dm) = &self.dm {
            dm.validate()?;
        }
        Ok(())
    }

    pub fn register(&self) -> Result<QubitRegister> {
        QubitRegister::new(self.n)
    }
}

/// Nearest-neighbour bonds `(l, l+1)`; periodic chains include `(n, 1)`.
pub fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (1..n).map(|l| (l, l + 1)).collect();
    if boundary == Boundary::Periodic {
        out.push((n, 1));
    }
    out
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn add_bond_terms(m: &mut CMatrix, register: QubitRegister, bond: (usize, usize), p: &XXZParams) {
    use PauliAxis::*;
    let (l, r) = bond;
    if p.j != 0.0 {
        add_pauli_string(m, register, &[(l, X), (r, X)], real(-p.j / 2.0));
        add_pauli_string(m, register, &[(l, Y), (r, Y)], real(-p.j / 2.0));
    }
    if p.jz != 0.0 {
        add_pauli_string(m, register, &[(l, Z), (r, Z)], real(-p.jz));
    }
}

fn add_dm_bond(m: &mut CMatrix, register: QubitRegister, bond: (usize, usize), d: &DMParams) {
    use PauliAxis::*;
    let (l, r) = bond;
    // D·(σ_l × σ_r), component by component
    let cross = [((Y, Z), (Z, Y)), ((Z, X), (X, Z)), ((X, Y), (Y, X))];
    for (k, &((a, b), (c, e))) in cross.iter().enumerate() {
        if d.d[k] != 0.0 {
            add_pauli_string(m, register, &[(l, a), (r, b)], real(d.d[k]));
            add_pauli_string(m, register, &[(l, c), (r, e)], real(-d.d[k]));
        }
    }
}

/// XXZ Hamiltonian, including the Dzyaloshinskii–Moriya term when `p.dm` is
/// set. The field term always runs over all `n` sites.
pub fn build_xxz(p: &XXZParams) -> Result<HermitianOperator> {
    p.validate()?;
    let register = p.register()?;
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    for bond in bonds(p.n, p.boundary) {
        add_bond_terms(&mut m, register, bond, p);
        if let Some(dm) = &p.dm {
            add_dm_bond(&mut m, register, bond, dm);
        }
    }
    if p.b != 0.0 {
        for site in 1..=p.n {
            add_pauli_string(&mut m, register, &[(site, PauliAxis::Z)], real(-p.b));
        }
    }
    Ok(HermitianOperator::from_parts(register, m))
}

/// `Σ_l D·(σ_l × σ_{l+1})` over the bonds of the chain.
pub fn build_dm_term(register: QubitRegister, d: &DMParams, boundary: Boundary) -> Result<HermitianOperator> {
    d.validate()?;
    if register.n() < 2 {
        return Err(Error::param("Dzyaloshinskii-Moriya term needs at least 2 sites"));
    }
    let dim = register.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for bond in bonds(register.n(), boundary) {
        add_dm_bond(&mut m, register, bond, d);
    }
    Ok(HermitianOperator::from_parts(register, m))
}

/// `Σ_l σ_l^z`.
pub fn total_magnetization(register: QubitRegister) -> HermitianOperator {
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    for site in 1..=register.n() {
        add_pauli_string(&mut m, register, &[(site, PauliAxis::Z)], real(1.0));
    }
    HermitianOperator::from_parts(register, m)
}

/// Permutation sending site `l` to site `l+1` (cyclically).
pub fn cyclic_shift(register: QubitRegister) -> CMatrix {
    let n = register.n();
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        // bit of site l sits at position n-l; site n wraps to site 1
        let low = i & 1;
        let j = (i >> 1) | (low << (n - 1));
        m[(j, i)] = real(1.0);
    }
    m
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, HermitianOperator, QubitRegister};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Single-qubit matrix.
    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliAxis::X => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            PauliAxis::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            PauliAxis::Z => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

/// Adds `coeff · P_1 P_2 ⋯ P_k` to `target`, where each factor is a Pauli at
/// a site. Every column of a Pauli string has a single nonzero entry, so this
/// costs `O(dim · k)`.
pub(crate) fn add_pauli_string(
    target: &mut CMatrix,
    register: QubitRegister,
    factors: &[(usize, PauliAxis)],
    coeff: Complex64,
) {
    let i = Complex64::new(0.0, 1.0);
    for col in 0..register.dim() {
        let mut state = col;
        let mut phase = coeff;
        for &(site, axis) in factors.iter().rev() {
            let mask = register.mask(site);
            let bit_set = state & mask != 0;
            match axis {
                PauliAxis::X => state ^= mask,
                PauliAxis::Y => {
                    phase *= if bit_set { -i } else { i };
                    state ^= mask;
                }
                PauliAxis::Z => {
                    if bit_set {
                        phase = -phase;
                    }
                }
            }
        }
        target[(state, col)] += phase;
    }
}

/// Product of Paulis at the given sites, leftmost factor applied last.
pub fn pauli_string(register: QubitRegister, factors: &[(usize, PauliAxis)]) -> Result<CMatrix> {
    for &(site, _) in factors {
        register.check_site(site)?;
    }
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    add_pauli_string(&mut m, register, factors, Complex64::new(1.0, 0.0));
    Ok(m)
}

/// `I ⊗ ⋯ ⊗ σ^axis ⊗ ⋯ ⊗ I` with the Pauli at `site` (1-based).
pub fn embed_pauli(register: QubitRegister, site: usize, axis: PauliAxis) -> Result<HermitianOperator> {
    let m = pauli_string(register, &[(site, axis)])?;
    Ok(HermitianOperator::from_parts(register, m))
}

/// Embeds an operator acting on `sites` (in the listed order, first site most
/// significant) into the full register, acting as identity elsewhere.
pub fn embed_operator(register: QubitRegister, sites: &[usize], op: &CMatrix) -> Result<CMatrix> {
    let k = sites.len();
    if k == 0 {
        return Err(Error::param("embedding needs at least one site"));
    }
    for (idx, &s) in sites.iter().enumerate() {
        register.check_site(s)?;
        if sites[..idx].contains(&s) {
            return Err(Error::param(format!("site {s} listed twice")));
        }
    }
    let sub_dim = 1usize << k;
    if op.nrows() != sub_dim || op.ncols() != sub_dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            found: op.nrows(),
        });
    }
    let rest: Vec<usize> = (1..=register.n()).filter(|s| !sites.contains(s)).collect();
    let inner = scatter_table(register, sites);
    let outer = scatter_table(register, &rest);
    let d = register.dim();
    let mut m = CMatrix::zeros(d, d);
    for &r in &outer {
        for (a, &fa) in inner.iter().enumerate() {
            for (b, &fb) in inner.iter().enumerate() {
                m[(fa | r, fb | r)] = op[(a, b)];
            }
        }
    }
    Ok(m)
}

/// Maps each sub-index over `sites` (first site most significant) to the
/// corresponding bit pattern of a full basis index.
pub(crate) fn scatter_table(register: QubitRegister, sites: &[usize]) -> Vec<usize> {
    let k = sites.len();
    (0..1usize << k)
        .map(|sub| {
            sites
                .iter()
                .enumerate()
                .filter(|(pos, _)| sub & (1 << (k - 1 - pos)) != 0)
                .fold(0, |acc, (_, &site)| acc | register.mask(site))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    fn reg(n: usize) -> QubitRegister {
        QubitRegister::new(n).unwrap()
    }

    #[test]
    fn single_qubit_z() {
        let z = embed_pauli(reg(1), 1, PauliAxis::Z).unwrap();
        assert_eq!(z.matrix(), &PauliAxis::Z.matrix());
    }

    #[test]
    fn embedding_matches_kronecker() {
        let id = CMatrix::identity(2, 2);
        let x2 = embed_pauli(reg(2), 2, PauliAxis::X).unwrap();
        assert_eq!(x2.matrix(), &id.kronecker(&PauliAxis::X.matrix()));
        for axis in PauliAxis::ALL {
            let oracle = id.kronecker(&axis.matrix()).kronecker(&id);
            let got = embed_pauli(reg(3), 2, axis).unwrap();
            assert!(max_abs_diff(got.matrix(), &oracle) == 0.0);
        }
    }

    #[test]
    fn paulis_square_to_identity() {
        let r = reg(3);
        for axis in PauliAxis::ALL {
            for site in 1..=3 {
                let p = embed_pauli(r, site, axis).unwrap();
                let sq = p.matrix() * p.matrix();
                assert!(max_abs_diff(&sq, &CMatrix::identity(8, 8)) < 1e-15);
            }
        }
    }

    #[test]
    fn distinct_sites_commute() {
        let r = reg(4);
        for i in 1..=4 {
            for j in 1..=4 {
                if i == j {
                    continue;
                }
                let a = embed_pauli(r, i, PauliAxis::Z).unwrap();
                let b = embed_pauli(r, j, PauliAxis::Z).unwrap();
                assert!(a.commutator_norm(&b) <= 1e-12);
            }
        }
    }

    #[test]
    fn pauli_string_is_matrix_product() {
        let r = reg(3);
        let s = pauli_string(r, &[(1, PauliAxis::X), (3, PauliAxis::Y), (1, PauliAxis::Y)]).unwrap();
        let x1 = embed_pauli(r, 1, PauliAxis::X).unwrap();
        let y3 = embed_pauli(r, 3, PauliAxis::Y).unwrap();
        let y1 = embed_pauli(r, 1, PauliAxis::Y).unwrap();
        let oracle = x1.matrix() * y3.matrix() * y1.matrix();
        assert!(max_abs_diff(&s, &oracle) < 1e-15);
    }

    #[test]
    fn site_out_of_range() {
        assert!(matches!(
            embed_pauli(reg(2), 3, PauliAxis::X),
            Err(Error::SiteOutOfRange { site: 3, n: 2 })
        ));
        assert!(embed_pauli(reg(2), 0, PauliAxis::X).is_err());
    }

    #[test]
    fn embed_operator_reordered_sites() {
        let r = reg(3);
        let xz = PauliAxis::X.matrix().kronecker(&PauliAxis::Z.matrix());
        // X on site 3, Z on site 1
        let m = embed_operator(r, &[3, 1], &xz).unwrap();
        let oracle = pauli_string(r, &[(3, PauliAxis::X), (1, PauliAxis::Z)]).unwrap();
        assert!(max_abs_diff(&m, &oracle) < 1e-15);
        assert!(embed_operator(r, &[1, 1], &xz).is_err());
    }
}

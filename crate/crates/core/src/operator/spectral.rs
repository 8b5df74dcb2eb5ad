use std::ops::Range;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{max_abs, max_abs_diff, CMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian
/// matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    degeneracy_tolerance: f64,
}

impl SpectralDecomposition {
    pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-9;

    /// Assembles a decomposition from caller-supplied parts, checking sort
    /// order and orthonormality (to 1e-10).
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMatrix) -> Result<Self> {
        let d = eigenvalues.len();
        if eigenvectors.nrows() != d || eigenvectors.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: eigenvectors.ncols(),
            });
        }
        if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::param("eigenvalues must be finite and ascending"));
        }
        let gram = eigenvectors.adjoint() * &eigenvectors;
        let dev = max_abs_diff(&gram, &CMatrix::identity(d, d));
        if dev > 1e-10 {
            return Err(Error::param(format!(
                "eigenvectors not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
            degeneracy_tolerance: Self::DEFAULT_DEGENERACY_TOLERANCE,
        })
    }

    pub fn with_degeneracy_tolerance(mut self, tol: f64) -> Self {
        self.degeneracy_tolerance = tol;
        self
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn degeneracy_tolerance(&self) -> f64 {
        self.degeneracy_tolerance
    }

    pub fn eigenvector(&self, k: usize) -> DVector<Complex64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Index ranges of (numerically) degenerate eigenvalues. Neighbours closer
    /// than the degeneracy tolerance are chained into one group.
    pub fn eigenspaces(&self) -> Vec<Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            if k == self.eigenvalues.len()
                || self.eigenvalues[k] - self.eigenvalues[k - 1] > self.degeneracy_tolerance
            {
                groups.push(start..k);
                start = k;
            }
        }
        groups
    }

    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map_complex(|e| Complex64::new(e, 0.0))
    }

    /// `V diag(f(E)) V†` for a complex-valued scalar map.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let fk = f(e);
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= fk);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `V diag(values) V†` for per-eigenvector values.
    pub fn compose(&self, values: &[f64]) -> CMatrix {
        assert_eq!(values.len(), self.dim(), "one value per eigenvector");
        let mut scaled = self.eigenvectors.clone();
        for (k, &v) in values.iter().enumerate() {
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= v);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `V diag(f(E)) V†`, failing if `f` is not finite at some eigenvalue.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let values: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&e| {
                let v = f(e);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::UndefinedFunction { eigenvalue: e })
                }
            })
            .collect::<Result<_>>()?;
        Ok(self.compose(&values))
    }

    /// Squared overlaps `|⟨v_k|ψ⟩|²` with each eigenvector.
    pub fn populations(&self, psi: &DVector<Complex64>) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.eigenvectors.column(k).dotc(psi).norm_sqr())
            .collect()
    }
}

/// Union of the coupling graphs of a family of matrices: basis indices joined
/// by a nonzero off-diagonal entry in any absorbed matrix share a block.
#[derive(Clone, Debug)]
pub struct CouplingGraph {
    parent: Vec<usize>,
}

impl CouplingGraph {
    pub fn new(dim: usize) -> Self {
        CouplingGraph {
            parent: (0..dim).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn absorb(&mut self, m: &CMatrix) {
        let dim = self.parent.len();
        for j in 0..dim {
            for i in 0..dim {
                if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                    let (a, b) = (self.find(i), self.find(j));
                    if a != b {
                        self.parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn blocks(mut self) -> Vec<Vec<usize>> {
        let dim = self.parent.len();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; dim];
        for i in 0..dim {
            let root = self.find(i);
            if slot[root] == usize::MAX {
                slot[root] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[root]].push(i);
        }
        blocks
    }
}

/// Index blocks over which every given matrix is block diagonal.
pub fn coupled_blocks<'a>(dim: usize, matrices: impl IntoIterator<Item = &'a CMatrix>) -> Vec<Vec<usize>> {
    let mut graph = CouplingGraph::new(dim);
    for m in matrices {
        graph.absorb(m);
    }
    graph.blocks()
}

pub(crate) fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Dense Hermitian eigensolve of one block.
pub(crate) fn eigh_block(sub: CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let size = sub.nrows();
    if size == 1 {
        return Ok((vec![sub[(0, 0)].re], CMatrix::identity(1, 1)));
    }
    let norm = max_abs(&sub);
    let eig = SymmetricEigen::try_new(sub, f64::EPSILON, 1000 * size)
        .ok_or(Error::EigenNonConvergence { size, norm })?;
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::EigenNonConvergence { size, norm });
    }
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Eigendecomposition of a matrix assumed Hermitian. Decoupled blocks are
/// diagonalized separately, so eigenvectors never mix symmetry sectors that
/// the matrix does not couple.
pub(crate) fn decompose_matrix(m: &CMatrix) -> Result<SpectralDecomposition> {
    let dim = m.nrows();
    let blocks = coupled_blocks(dim, [m]);
    let mut pairs: Vec<(f64, usize, usize, DVector<Complex64>)> = Vec::with_capacity(dim);
    for (b, idx) in blocks.iter().enumerate() {
        let (vals, vecs) = eigh_block(submatrix(m, idx))?;
        for (k, v) in vals.into_iter().enumerate() {
            pairs.push((v, b, k, vecs.column(k).into_owned()));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    for (col, (v, b, _, vec)) in pairs.into_iter().enumerate() {
        eigenvalues.push(v);
        for (a, &row) in blocks[b].iter().enumerate() {
            eigenvectors[(row, col)] = vec[a];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        degeneracy_tolerance: SpectralDecomposition::DEFAULT_DEGENERACY_TOLERANCE,
    })
}

pub fn spectral_decompose(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    decompose_matrix(a.matrix())
}

/// `f(A) = V f(diag E) V†` for a real scalar map.
pub fn hermitian_function(a: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let spec = spectral_decompose(a)?;
    let m = spec.map_real(f)?;
    Ok(HermitianOperator::from_parts(a.register(), m))
}

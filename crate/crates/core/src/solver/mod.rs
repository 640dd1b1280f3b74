//! Sparse symmetric linear algebra: SPD factorization, source-problem solves,
//! and the shift-invert Lanczos eigensolver.

mod lanczos;

pub use lanczos::{smallest_eigenpairs, EigenOptions, EigenPairSet};

use crate::assembly::{assemble_load, AssembledSystem, AssemblyConfig, SparseSymmetric};
use crate::basis::LocalBasisSet;
use crate::geometry::Mesh;
use crate::{Error, Result, Vec2};
use faer::dyn_stack::{GlobalPodBuffer, PodStack};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, LltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, Parallelism, Side};

/// Sparse Cholesky factorization handle for repeated solves.
///
/// Factorization succeeds exactly when the matrix is positive definite, so a
/// successful call doubles as the coercivity witness for assembled operators.
pub struct SpdFactor {
    n: usize,
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
}

/// Factorizes a symmetric positive definite matrix (sparse LLT with AMD
/// fill-reducing ordering). Fails with the offending pivot index when the
/// matrix is not positive definite.
pub fn spd_factorize(a: &SparseSymmetric) -> Result<SpdFactor> {
    let n = a.dim();
    let (col_ptr, row_idx, vals) = a.csc_upper();
    let pattern = SymbolicSparseColMatRef::new_checked(n, n, col_ptr, None, row_idx);
    let symbolic = factorize_symbolic_cholesky(
        pattern,
        Side::Upper,
        SymmetricOrdering::Amd,
        Default::default(),
    )
    .map_err(|e| Error::Factorization(format!("symbolic analysis failed: {e:?}")))?;

    let mut values = vec![0.0f64; symbolic.len_values()];
    let req = symbolic
        .factorize_numeric_llt_req::<f64>(Parallelism::None)
        .map_err(|e| Error::Factorization(format!("workspace sizing failed: {e:?}")))?;
    let mut buf = GlobalPodBuffer::new(req);
    let mat = SparseColMatRef::new(pattern, vals);
    symbolic
        .factorize_numeric_llt::<f64>(
            &mut values,
            mat,
            Side::Upper,
            Default::default(),
            Parallelism::None,
            PodStack::new(&mut buf),
        )
        .map_err(|e| Error::NotPositiveDefinite {
            minor: e.non_positive_definite_minor,
        })?;
    Ok(SpdFactor { n, symbolic, values })
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.n);
        let llt = LltRef::<usize, f64>::new(&self.symbolic, &self.values);
        let req = self
            .symbolic
            .solve_in_place_req::<f64>(1)
            .expect("solve workspace sizing");
        let mut buf = GlobalPodBuffer::new(req);
        let view = faer::mat::from_column_major_slice_mut::<f64, _, _>(rhs, self.n, 1);
        llt.solve_in_place_with_conj(Conj::No, view, Parallelism::None, PodStack::new(&mut buf));
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Discrete solution operator applied to a load function: assembles
/// `b_j = (f, phi_j)` with the cut-aware rule and solves the stabilized
/// stiffness system.
pub fn source_solve(
    sys: &AssembledSystem,
    mesh: &Mesh,
    bases: &[LocalBasisSet],
    cfg: &AssemblyConfig,
    f: impl Fn(Vec2) -> Vec2,
) -> Result<Vec<f64>> {
    let b = assemble_load(mesh, bases, &sys.dofmap, cfg, f)?;
    let factor = spd_factorize(&sys.operator)?;
    Ok(factor.solve(&b))
}

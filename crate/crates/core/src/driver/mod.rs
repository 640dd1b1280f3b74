//! Benchmark driver: eigenvalue runs per mesh level, convergence studies
//! against a fine reference, manufactured-solution verification, and exports.

mod config;
mod export;
mod manufactured;
mod report;

pub use config::CaseConfig;
pub use export::{export_field, export_matrices, read_field_csv, sample_field, FieldSample};
pub use manufactured::{source_convergence, SourceRates};
pub use report::{write_convergence_csv, write_eigenvalues_csv, ConvergenceReport, LevelSummary};

use crate::assembly::{assemble, build_bases, AssembledSystem};
use crate::basis::LocalBasisSet;
use crate::geometry::{build_uniform_mesh, interface_geometry, Mesh};
use crate::solver::smallest_eigenpairs;
use crate::Result;

/// Eigenvalue solution of one mesh level.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub n: usize,
    pub h: f64,
    /// The `m` smallest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Free-dof coefficient vectors of the eigenfunctions.
    pub vectors: Vec<Vec<f64>>,
    pub num_free_dofs: usize,
}

/// Discretization of one level, reusable across solves and exports.
pub struct LevelDiscretization {
    pub mesh: Mesh,
    pub bases: Vec<LocalBasisSet>,
    pub system: AssembledSystem,
}

/// Builds mesh, interface geometry, bases, and assembled operators for level `n`.
pub fn discretize(cfg: &CaseConfig, n: usize) -> Result<LevelDiscretization> {
    let mesh = build_uniform_mesh(n)?;
    let geo = interface_geometry(&mesh, &cfg.interface)?;
    let bases = build_bases(&mesh, &geo, &cfg.materials)?;
    let system = assemble(&mesh, &geo, &bases, &cfg.materials, &cfg.assembly())?;
    Ok(LevelDiscretization { mesh, bases, system })
}

/// Full pipeline for one level: mesh, classify, cut, bases, assemble, solve.
pub fn run_eigen_case(cfg: &CaseConfig, n: usize) -> Result<LevelResult> {
    run_eigen_case_keeping(cfg, n).map(|(result, _)| result)
}

/// Like [`run_eigen_case`], returning the discretization for reuse (exports).
pub fn run_eigen_case_keeping(
    cfg: &CaseConfig,
    n: usize,
) -> Result<(LevelResult, LevelDiscretization)> {
    let stage = |e: crate::Error, what: &str| e.at_level(n, what);
    let disc = discretize(cfg, n).map_err(|e| stage(e, "discretization"))?;
    let eig = smallest_eigenpairs(&disc.system.operator, &disc.system.mass, &cfg.eigen_options())
        .map_err(|e| stage(e, "eigensolve"))?;
    let result = LevelResult {
        n,
        h: disc.mesh.h,
        eigenvalues: eig.values,
        residuals: eig.residuals,
        vectors: eig.vectors,
        num_free_dofs: disc.system.dofmap.num_free(),
    };
    Ok((result, disc))
}

/// Runs every study level plus the reference level and derives errors and
/// convergence orders against the reference, matching eigenvalues by sorted
/// index.
pub fn convergence_study(cfg: &CaseConfig) -> Result<ConvergenceReport> {
    let mut levels = Vec::with_capacity(cfg.levels.len());
    for &n in &cfg.levels {
        levels.push(LevelSummary::from(run_eigen_case(cfg, n)?));
    }
    let reference = LevelSummary::from(run_eigen_case(cfg, cfg.n_ref)?);
    Ok(ConvergenceReport::build(cfg, levels, reference))
}

/// Convergence order from errors at consecutive dyadic levels:
/// `log(e_coarse/e_fine) / log(h_ratio)`. Returns `None` (the undefined-order
/// sentinel) when either error is non-positive or non-finite.
pub fn estimate_order(e_coarse: f64, e_fine: f64, h_ratio: f64) -> Option<f64> {
    if !(e_coarse > 0.0) || !(e_fine > 0.0) || !e_coarse.is_finite() || !e_fine.is_finite() {
        return None;
    }
    Some((e_coarse / e_fine).ln() / h_ratio.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_estimates() {
        assert!((estimate_order(0.4, 0.1, 2.0).unwrap() - 2.0).abs() < 1e-14);
        // Table row: errors of the first eigenvalue at h = 1/2^4 and 1/2^5
        // against the reference 18.824.
        let e_coarse = 19.197 - 18.824;
        let e_fine = 18.915 - 18.824;
        let ord = estimate_order(e_coarse, e_fine, 2.0).unwrap();
        assert!((ord - 2.03).abs() < 0.01, "ord = {ord}");
        assert_eq!(estimate_order(1e-3, 1e-3, 2.0), Some(0.0));
        assert_eq!(estimate_order(0.0, 1e-3, 2.0), None);
        assert_eq!(estimate_order(1e-3, -1.0, 2.0), None);
    }
}

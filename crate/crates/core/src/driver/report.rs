//! Convergence reports and CSV writers.

use super::{estimate_order, CaseConfig, LevelResult};
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Eigenvalues of one level, stripped of eigenvectors.
#[derive(Debug, Clone)]
pub struct LevelSummary {
    pub n: usize,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl From<LevelResult> for LevelSummary {
    fn from(r: LevelResult) -> Self {
        LevelSummary {
            n: r.n,
            h: r.h,
            eigenvalues: r.eigenvalues,
            residuals: r.residuals,
        }
    }
}

/// Eigenvalues per level, errors against the reference level, and estimated
/// convergence orders.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelSummary>,
    pub reference: LevelSummary,
    /// `errors[l][i] = |omega2[l][i] - omega2_ref[i]|`.
    pub errors: Vec<Vec<f64>>,
    /// `orders[l][i]`: order between levels `l-1` and `l`; `None` where the
    /// errors sit below the eigensolver noise floor or at the coarsest level.
    pub orders: Vec<Vec<Option<f64>>>,
    /// Marks (level, index) entries whose sorted-index matching is ambiguous:
    /// the gap to a neighboring eigenvalue is below 10x the solver tolerance.
    pub ambiguous: Vec<Vec<bool>>,
}

impl ConvergenceReport {
    pub(super) fn build(
        cfg: &CaseConfig,
        levels: Vec<LevelSummary>,
        reference: LevelSummary,
    ) -> Self {
        let m = cfg.m;
        let noise = |i: usize| 10.0 * cfg.tol * reference.eigenvalues[i].abs();
        let errors: Vec<Vec<f64>> = levels
            .iter()
            .map(|lvl| {
                (0..m)
                    .map(|i| (lvl.eigenvalues[i] - reference.eigenvalues[i]).abs())
                    .collect()
            })
            .collect();
        let mut orders: Vec<Vec<Option<f64>>> = Vec::with_capacity(levels.len());
        for l in 0..levels.len() {
            let mut row = Vec::with_capacity(m);
            for i in 0..m {
                let ord = if l == 0 {
                    None
                } else if errors[l - 1][i] <= noise(i) || errors[l][i] <= noise(i) {
                    // Both consecutive errors must exceed the solver noise
                    // floor for the order to be meaningful.
                    None
                } else {
                    let h_ratio = levels[l].n as f64 / levels[l - 1].n as f64;
                    estimate_order(errors[l - 1][i], errors[l][i], h_ratio)
                };
                row.push(ord);
            }
            orders.push(row);
        }
        let ambiguous = levels
            .iter()
            .map(|lvl| {
                (0..m)
                    .map(|i| {
                        let lo = if i > 0 {
                            lvl.eigenvalues[i] - lvl.eigenvalues[i - 1]
                        } else {
                            f64::INFINITY
                        };
                        let hi = if i + 1 < lvl.eigenvalues.len() {
                            lvl.eigenvalues[i + 1] - lvl.eigenvalues[i]
                        } else {
                            f64::INFINITY
                        };
                        lo.min(hi) < 10.0 * cfg.tol * lvl.eigenvalues[i].abs()
                    })
                    .collect()
            })
            .collect();
        ConvergenceReport { levels, reference, errors, orders, ambiguous }
    }
}

/// Writes `eigenvalues.csv`: one row per (level, eigenvalue index), the
/// reference level included last. Indices are 1-based.
pub fn write_eigenvalues_csv(path: &Path, levels: &[LevelSummary]) -> Result<()> {
    let mut out = String::from("level,h,index,omega2,residual\n");
    for lvl in levels {
        for (i, (w, r)) in lvl.eigenvalues.iter().zip(&lvl.residuals).enumerate() {
            out.push_str(&format!("{},{},{},{},{}\n", lvl.n, lvl.h, i + 1, w, r));
        }
    }
    write_atomic(path, &out)
}

/// Writes `convergence.csv`: one row per (index, level) with the error
/// against the reference and the estimated order (empty when undefined).
pub fn write_convergence_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = String::from("index,level,h,omega2,error,order\n");
    let m = report.errors.first().map_or(0, Vec::len);
    for i in 0..m {
        for (l, lvl) in report.levels.iter().enumerate() {
            let order = match report.orders[l][i] {
                Some(o) => format!("{o}"),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i + 1,
                lvl.n,
                lvl.h,
                lvl.eigenvalues[i],
                report.errors[l][i],
                order
            ));
        }
    }
    write_atomic(path, &out)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(n: usize, eigenvalues: Vec<f64>) -> LevelSummary {
        let residuals = vec![1e-12; eigenvalues.len()];
        LevelSummary { n, h: 2.0 / n as f64, eigenvalues, residuals }
    }

    #[test]
    fn report_orders_and_noise_floor() {
        let cfg = CaseConfig::builtin("example1").unwrap();
        let mut cfg = cfg;
        cfg.m = 2;
        // Reference 10.0; errors 0.4, 0.1 -> order 2; second index converges
        // below the noise floor at the fine level.
        let levels = vec![
            summary(16, vec![10.4, 20.0 + 0.4]),
            summary(32, vec![10.1, 20.0 + 1e-9]),
        ];
        let reference = summary(256, vec![10.0, 20.0]);
        let report = ConvergenceReport::build(&cfg, levels, reference);
        assert!((report.orders[1][0].unwrap() - 2.0).abs() < 1e-12);
        assert!(report.orders[0][0].is_none());
        assert!(report.orders[1][1].is_none(), "below noise floor");
        assert!(!report.ambiguous[0][0]);
    }

    #[test]
    fn ambiguity_flags_near_doubles() {
        let mut cfg = CaseConfig::builtin("example1").unwrap();
        cfg.m = 2;
        cfg.tol = 1e-9;
        let levels = vec![summary(16, vec![10.0, 10.0 + 1e-10])];
        let reference = summary(256, vec![9.0, 9.5]);
        let report = ConvergenceReport::build(&cfg, levels, reference);
        assert!(report.ambiguous[0][0] && report.ambiguous[0][1]);
    }

    #[test]
    fn csv_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = CaseConfig::builtin("example1").unwrap();
        cfg.m = 2;
        let levels = vec![summary(16, vec![10.4, 20.4]), summary(32, vec![10.1, 20.1])];
        let reference = summary(256, vec![10.0, 20.0]);
        let eig_path = dir.path().join("eigenvalues.csv");
        let mut all = levels.clone();
        all.push(reference.clone());
        write_eigenvalues_csv(&eig_path, &all).unwrap();
        let text = std::fs::read_to_string(&eig_path).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 2);
        assert!(text.starts_with("level,h,index,omega2,residual\n"));
        assert!(text.contains("16,0.125,1,10.4,"));

        let report = ConvergenceReport::build(&cfg, levels, reference);
        let conv_path = dir.path().join("convergence.csv");
        write_convergence_csv(&conv_path, &report).unwrap();
        let text = std::fs::read_to_string(&conv_path).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2);
        assert!(text.starts_with("index,level,h,omega2,error,order\n"));
        // Coarsest level has no order entry.
        assert!(text.contains("1,16,0.125,10.4,0.4"));
    }
}

//! Manufactured-solution verification of the discrete solution operator.
//!
//! Interface-free setup with `mu = lambda = 1` and the exact solution
//! `u = (g, g)`, `g = sin(pi x) sin(pi y)`, which vanishes on the boundary of
//! the square. The corresponding load is `f = (q, q)` with
//! `q = 4 pi^2 g - 2 pi^2 cos(pi x) cos(pi y)`. Expected rates: O(h^2) in L2,
//! O(h) in the mesh-dependent energy norm.

use crate::assembly::{assemble, build_bases, AssemblyConfig};
use crate::geometry::{build_uniform_mesh, interface_geometry, LevelSet};
use crate::material::LameField;
use crate::quadrature::polygon_rule;
use crate::solver::source_solve;
use crate::{Result, Vec2};
use std::f64::consts::PI;

/// Errors per level and least-squares convergence rates.
#[derive(Debug, Clone)]
pub struct SourceRates {
    /// Per level: `(n, h, l2_error, energy_error)`.
    pub levels: Vec<(usize, f64, f64, f64)>,
    /// Least-squares slope of `ln(error)` against `ln(h)`.
    pub l2_rate: f64,
    pub energy_rate: f64,
}

fn g(p: Vec2) -> f64 {
    (PI * p.x).sin() * (PI * p.y).sin()
}

fn exact(p: Vec2) -> Vec2 {
    let v = g(p);
    Vec2::new(v, v)
}

fn load(p: Vec2) -> Vec2 {
    let q = 4.0 * PI * PI * g(p) - 2.0 * PI * PI * (PI * p.x).cos() * (PI * p.y).cos();
    Vec2::new(q, q)
}

/// Exact strain (as `[e11, e12, e22]`) and divergence of the manufactured field.
fn exact_strain_div(p: Vec2) -> ([f64; 3], f64) {
    let gx = PI * (PI * p.x).cos() * (PI * p.y).sin();
    let gy = PI * (PI * p.x).sin() * (PI * p.y).cos();
    ([gx, 0.5 * (gx + gy), gy], gx + gy)
}

/// Runs the manufactured source problem over `levels` and reports errors and
/// rates.
pub fn source_convergence(levels: &[usize]) -> Result<SourceRates> {
    let mat = LameField::uniform(1.0, 1.0)?;
    let cfg = AssemblyConfig::default();
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let mesh = build_uniform_mesh(n)?;
        let geo = interface_geometry(&mesh, &LevelSet::None)?;
        let bases = build_bases(&mesh, &geo, &mat)?;
        let sys = assemble(&mesh, &geo, &bases, &mat, &cfg)?;
        let u = source_solve(&sys, &mesh, &bases, &cfg, load)?;

        let (lambda, mu) = (1.0, 1.0);
        let mut l2_sq = 0.0;
        let mut energy_sq = 0.0;
        for t in 0..mesh.num_triangles() {
            let l2g = sys.dofmap.local_to_global(&mesh, t);
            let mut dofs = [0.0; 6];
            for (i, &gdof) in l2g.iter().enumerate() {
                if let Some(fi) = sys.dofmap.free_index[gdof] {
                    dofs[i] = u[fi];
                }
            }
            let funcs = bases[t].funcs_on(crate::material::Side::Plus);
            // Discrete strain and divergence are constant per element.
            let mut eh = [0.0; 3];
            let mut dh = 0.0;
            for i in 0..6 {
                let (eps, div) = funcs[i].strain_and_div();
                eh[0] += dofs[i] * eps[(0, 0)];
                eh[1] += dofs[i] * eps[(0, 1)];
                eh[2] += dofs[i] * eps[(1, 1)];
                dh += dofs[i] * div;
            }
            for (x, w) in polygon_rule(&bases[t].verts.to_vec(), 3)? {
                let mut uh = Vec2::zeros();
                for i in 0..6 {
                    uh += funcs[i].eval(x) * dofs[i];
                }
                l2_sq += w * (uh - exact(x)).norm_squared();

                let ([e11, e12, e22], dv) = exact_strain_div(x);
                let d = [eh[0] - e11, eh[1] - e12, eh[2] - e22];
                let dd = d[0] * d[0] + 2.0 * d[1] * d[1] + d[2] * d[2];
                let ddiv = dh - dv;
                energy_sq += w * (2.0 * mu * dd + lambda * ddiv * ddiv);
            }
        }
        // The exact solution is continuous with zero boundary trace, so the
        // jump part of the energy error is the stabilization form of u_h.
        energy_sq += sys.stabilization.quadratic_form(&u);
        rows.push((n, mesh.h, l2_sq.sqrt(), energy_sq.sqrt()));
    }

    let slope = |pick: fn(&(usize, f64, f64, f64)) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.1.ln(), pick(r).ln())).collect();
        least_squares_slope(&pts)
    };
    Ok(SourceRates {
        l2_rate: slope(|r| r.2),
        energy_rate: slope(|r| r.3),
        levels: rows,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_shrink_with_refinement() {
        let rates = source_convergence(&[4, 8]).unwrap();
        assert_eq!(rates.levels.len(), 2);
        assert!(rates.levels[1].2 < rates.levels[0].2);
        assert!(rates.levels[1].3 < rates.levels[0].3);
    }
}

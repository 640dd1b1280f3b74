//! Immersed basis construction on interface-cut triangles.
//!
//! Each basis function is piecewise linear across the interface chord with
//! twelve coefficients (six per side), determined by a square linear system:
//! six edge-average conditions, four displacement-continuity conditions at
//! the chord endpoints, and two traction-continuity conditions across the
//! chord. The system is solved by dense LU with partial pivoting after row
//! equilibration, in a translated and scaled element frame to keep the
//! conditioning independent of the element size.

use super::{BasisData, LinearVecPoly, LocalBasisSet};
use crate::geometry::ElementCut;
use crate::material::{coefficients_at, LameField, Side};
use crate::{Error, Result, Vec2};
use nalgebra::{SMatrix, SVector};

type Mat12 = SMatrix<f64, 12, 12>;
type Vec12 = SVector<f64, 12>;

/// Relative residual above which the solve is reported as a geometry
/// degeneracy; LU with partial pivoting keeps well-posed systems far below.
const RESIDUAL_TOL: f64 = 1e-8;

/// Builds the six immersed basis functions for a cut triangle.
pub fn immersed_local_basis(
    verts: [Vec2; 3],
    cut: &ElementCut,
    mat: &LameField,
) -> Result<LocalBasisSet> {
    let (lambda_m, mu_m, _) = coefficients_at(mat, Side::Minus);
    let (lambda_p, mu_p, _) = coefficients_at(mat, Side::Plus);

    // Element-local frame: translate to the centroid, scale by the longest
    // edge. Uniform scaling preserves edge averages, continuity conditions,
    // and the chord normal, while keeping all matrix entries O(coefficients).
    let center = (verts[0] + verts[1] + verts[2]) / 3.0;
    let scale = (verts[1] - verts[0])
        .norm()
        .max((verts[2] - verts[1]).norm())
        .max((verts[0] - verts[2]).norm());
    let to_local = |p: Vec2| (p - center) / scale;
    let lverts = [to_local(verts[0]), to_local(verts[1]), to_local(verts[2])];
    let ld = to_local(cut.d);
    let le = to_local(cut.e);

    let mut a = Mat12::zeros();

    // Rows 0..6: edge averages of both components over each edge slot,
    // piecewise on cut edges. The mean of a linear function over a segment is
    // its value at the segment midpoint.
    for slot in 0..3 {
        let p = lverts[(slot + 1) % 3];
        let q = lverts[(slot + 2) % 3];
        let len = (q - p).norm();
        let pieces: Vec<(Vec2, Vec2)> = match cut.cut_by_slot[slot] {
            Some(x) => {
                let lx = to_local(x);
                vec![(p, lx), (lx, q)]
            }
            None => vec![(p, q)],
        };
        for (s, t) in pieces {
            let w = (t - s).norm() / len;
            if w == 0.0 {
                continue;
            }
            let mid = (s + t) * 0.5;
            // Which side of the chord does this piece lie on?
            let gmid = center + mid * scale;
            let block = if cut.on_plus_side(gmid) { 6 } else { 0 };
            for (col, val) in [(0, 1.0), (1, mid.x), (2, mid.y)] {
                a[(slot, block + col)] += w * val;
                a[(3 + slot, block + 3 + col)] += w * val;
            }
        }
    }

    // Rows 6..10: displacement continuity at the chord endpoints.
    for (row, point) in [(6, ld), (8, le)] {
        for (col, val) in [(0, 1.0), (1, point.x), (2, point.y)] {
            a[(row, col)] = val;
            a[(row, 6 + col)] = -val;
            a[(row + 1, 3 + col)] = val;
            a[(row + 1, 9 + col)] = -val;
        }
    }

    // Rows 10..12: traction continuity across the chord. Built by applying
    // the traction operator to unit coefficient vectors.
    for k in 0..6 {
        let mut unit = LinearVecPoly::zero();
        unit.coeffs[k] = 1.0;
        let tm = unit.traction(lambda_m, mu_m, cut.normal);
        let tp = unit.traction(lambda_p, mu_p, cut.normal);
        a[(10, k)] = tm.x;
        a[(11, k)] = tm.y;
        a[(10, 6 + k)] = -tp.x;
        a[(11, 6 + k)] = -tp.y;
    }

    // Row equilibration before pivoted LU.
    let mut row_scale = [1.0f64; 12];
    let mut scaled = a;
    for r in 0..12 {
        let max = (0..12).map(|c| a[(r, c)].abs()).fold(0.0f64, f64::max);
        if max > 0.0 {
            row_scale[r] = 1.0 / max;
            for c in 0..12 {
                scaled[(r, c)] *= row_scale[r];
            }
        }
    }
    let lu = scaled.lu();

    let mut minus = [LinearVecPoly::zero(); 6];
    let mut plus = [LinearVecPoly::zero(); 6];
    for i in 0..6 {
        let mut rhs = Vec12::zeros();
        rhs[i] = 1.0;
        let mut srhs = rhs;
        for r in 0..12 {
            srhs[r] *= row_scale[r];
        }
        let x = lu.solve(&srhs).ok_or(Error::BasisConditioning {
            triangle: cut.triangle,
            residual: f64::INFINITY,
        })?;

        let residual = relative_residual(&a, &x, &rhs);
        if !(residual < RESIDUAL_TOL) {
            return Err(Error::BasisConditioning {
                triangle: cut.triangle,
                residual,
            });
        }

        // Map the local-frame coefficients back to the global frame:
        // p(x) = a + b (x - cx)/s + c (y - cy)/s.
        let unscale = |coeffs: &[f64]| -> [f64; 6] {
            let g = |a: f64, b: f64, c: f64| {
                [
                    a - (b * center.x + c * center.y) / scale,
                    b / scale,
                    c / scale,
                ]
            };
            let u0 = g(coeffs[0], coeffs[1], coeffs[2]);
            let u1 = g(coeffs[3], coeffs[4], coeffs[5]);
            [u0[0], u0[1], u0[2], u1[0], u1[1], u1[2]]
        };
        minus[i].coeffs = unscale(&x.as_slice()[0..6]);
        plus[i].coeffs = unscale(&x.as_slice()[6..12]);
    }

    Ok(LocalBasisSet {
        verts,
        data: BasisData::Immersed {
            cut: cut.clone(),
            minus,
            plus,
        },
    })
}

fn relative_residual(a: &Mat12, x: &Vec12, b: &Vec12) -> f64 {
    let r = a * x - b;
    let r_inf = r.amax();
    let a_inf = (0..12)
        .map(|i| (0..12).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let denom = (a_inf * x.amax()).max(b.amax()).max(f64::MIN_POSITIVE);
    r_inf / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{cr_local_basis, edge_average, eval_field};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const REF: [Vec2; 3] = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];

    fn benchmark_mat() -> LameField {
        LameField::new(0.5, 2.5, 5.0, 25.0).unwrap()
    }

    fn random_cut(rng: &mut StdRng, verts: [Vec2; 3]) -> ElementCut {
        let slot_a = rng.gen_range(0..3usize);
        let mut slot_b = rng.gen_range(0..3usize);
        while slot_b == slot_a {
            slot_b = rng.gen_range(0..3usize);
        }
        let t_a = rng.gen_range(0.02..0.98);
        let t_b = rng.gen_range(0.02..0.98);
        let apex_minus = rng.gen_bool(0.5);
        ElementCut::from_edge_params(verts, slot_a, t_a, slot_b, t_b, apex_minus).unwrap()
    }

    #[test]
    fn matches_cr_without_jump() {
        let mat = LameField::uniform(1.7, 3.1).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let cut = random_cut(&mut rng, REF);
            let imm = immersed_local_basis(REF, &cut, &mat).unwrap();
            let cr = cr_local_basis(REF, Side::Plus).unwrap();
            let cr_funcs = cr.funcs_on(Side::Plus);
            for i in 0..6 {
                for side in [Side::Minus, Side::Plus] {
                    for (a, b) in imm.funcs_on(side)[i]
                        .coeffs
                        .iter()
                        .zip(cr_funcs[i].coeffs.iter())
                    {
                        assert!((a - b).abs() < 1e-10, "basis {i} side {side:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn reproduces_constants() {
        let mat = benchmark_mat();
        let mut rng = StdRng::seed_from_u64(11);
        let c = Vec2::new(1.0, 2.0);
        for _ in 0..50 {
            let cut = random_cut(&mut rng, REF);
            let basis = immersed_local_basis(REF, &cut, &mat).unwrap();
            // Constant interpolant: edge averages equal the constant.
            let dofs = [c.x, c.x, c.x, c.y, c.y, c.y];
            for p in [
                Vec2::new(0.2, 0.2),
                Vec2::new(0.05, 0.05),
                Vec2::new(0.6, 0.2),
                Vec2::new(0.1, 0.7),
            ] {
                let v = eval_field(&basis, &dofs, p).unwrap();
                assert!((v - c).norm() < 1e-10, "at {p:?}: {v:?}");
            }
        }
    }

    #[test]
    fn kronecker_and_interface_conditions() {
        let mat = benchmark_mat();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let cut = random_cut(&mut rng, REF);
            let basis = immersed_local_basis(REF, &cut, &mat).unwrap();
            let minus = basis.funcs_on(Side::Minus);
            let plus = basis.funcs_on(Side::Plus);
            for i in 0..6 {
                // Edge-average Kronecker property, piecewise on cut edges.
                for j in 0..3 {
                    for comp in 0..2 {
                        let avg = edge_average(&basis, i, comp, j).unwrap();
                        let expect = if comp == 0 && i < 3 && i == j {
                            1.0
                        } else if comp == 1 && i >= 3 && i - 3 == j {
                            1.0
                        } else {
                            0.0
                        };
                        assert!((avg - expect).abs() < 1e-10, "i={i} j={j} comp={comp}");
                    }
                }
                // Value continuity at both chord endpoints.
                for p in [cut.d, cut.e] {
                    let jump = minus[i].eval(p) - plus[i].eval(p);
                    assert!(jump.norm() < 1e-10);
                }
                // Traction continuity across the chord.
                let tm = minus[i].traction(mat.lambda_minus, mat.mu_minus, cut.normal);
                let tp = plus[i].traction(mat.lambda_plus, mat.mu_plus, cut.normal);
                assert!((tm - tp).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn solvable_across_contrasts() {
        let mut rng = StdRng::seed_from_u64(17);
        for contrast in [10.0, 100.0, 1000.0] {
            let mat = LameField::new(1.0, 5.0, contrast, 5.0 * contrast).unwrap();
            for _ in 0..100 {
                let cut = random_cut(&mut rng, REF);
                immersed_local_basis(REF, &cut, &mat).unwrap();
            }
        }
    }
}

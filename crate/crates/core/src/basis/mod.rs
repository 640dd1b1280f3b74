//! Local vector-valued bases: standard Crouzeix-Raviart on uncut triangles,
//! immersed (interface-condition-satisfying) on cut triangles.
//!
//! Every element carries six basis functions indexed `0..6`: indices `0..3`
//! put the nonconforming scalar profile of edge slot `i` into the first
//! displacement component, indices `3..6` into the second. Degrees of freedom
//! are edge averages per component.

mod immersed;

pub use immersed::immersed_local_basis;

use crate::geometry::{signed_area, ElementCut};
use crate::material::Side;
use crate::{Error, Result, Vec2};
use nalgebra::Matrix2;

/// Vector-valued linear polynomial
/// `(a0 + b0 x + c0 y, a1 + b1 x + c1 y)`, coefficient order
/// `(a0, b0, c0, a1, b1, c1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearVecPoly {
    pub coeffs: [f64; 6],
}

impl LinearVecPoly {
    pub fn zero() -> Self {
        LinearVecPoly { coeffs: [0.0; 6] }
    }

    pub fn constant(c: Vec2) -> Self {
        LinearVecPoly {
            coeffs: [c.x, 0.0, 0.0, c.y, 0.0, 0.0],
        }
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        let [a0, b0, c0, a1, b1, c1] = self.coeffs;
        Vec2::new(a0 + b0 * p.x + c0 * p.y, a1 + b1 * p.x + c1 * p.y)
    }

    /// Linearized strain tensor and divergence; both constant for a linear field.
    pub fn strain_and_div(&self) -> (Matrix2<f64>, f64) {
        let [_, b0, c0, _, b1, c1] = self.coeffs;
        let shear = 0.5 * (c0 + b1);
        let strain = Matrix2::new(b0, shear, shear, c1);
        (strain, b0 + c1)
    }

    /// Stress vector `sigma(u) . n` with `sigma = 2 mu eps + lambda tr(eps) I`.
    pub fn traction(&self, lambda: f64, mu: f64, normal: Vec2) -> Vec2 {
        let (eps, div) = self.strain_and_div();
        let sn = eps * normal;
        Vec2::new(
            2.0 * mu * sn.x + lambda * div * normal.x,
            2.0 * mu * sn.y + lambda * div * normal.y,
        )
    }
}

/// The six local basis functions of one triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasisSet {
    pub verts: [Vec2; 3],
    pub data: BasisData,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasisData {
    /// Standard CR basis; `region` records which subdomain the element lies in.
    Standard {
        funcs: [LinearVecPoly; 6],
        region: Side,
    },
    /// Immersed basis: one polynomial per side of the interface chord.
    Immersed {
        cut: ElementCut,
        minus: [LinearVecPoly; 6],
        plus: [LinearVecPoly; 6],
    },
}

impl LocalBasisSet {
    pub fn is_immersed(&self) -> bool {
        matches!(self.data, BasisData::Immersed { .. })
    }

    /// Subdomain side at point `p` (chord test on cut elements).
    pub fn side_at(&self, p: Vec2) -> Side {
        match &self.data {
            BasisData::Standard { region, .. } => *region,
            BasisData::Immersed { cut, .. } => {
                if cut.on_plus_side(p) {
                    Side::Plus
                } else {
                    Side::Minus
                }
            }
        }
    }

    /// The polynomial pieces valid on `side`.
    pub fn funcs_on(&self, side: Side) -> &[LinearVecPoly; 6] {
        match &self.data {
            BasisData::Standard { funcs, .. } => funcs,
            BasisData::Immersed { minus, plus, .. } => match side {
                Side::Minus => minus,
                Side::Plus => plus,
            },
        }
    }

    /// Integration regions: `(side, polygon)` pairs covering the triangle.
    pub fn regions(&self) -> Vec<(Side, Vec<Vec2>)> {
        match &self.data {
            BasisData::Standard { region, .. } => vec![(*region, self.verts.to_vec())],
            BasisData::Immersed { cut, .. } => vec![
                (Side::Minus, cut.poly_minus.clone()),
                (Side::Plus, cut.poly_plus.clone()),
            ],
        }
    }

    /// Value of basis function `i` at `p`, selecting the side by the chord test.
    pub fn basis_at(&self, i: usize, p: Vec2) -> Vec2 {
        self.funcs_on(self.side_at(p))[i].eval(p)
    }

    pub fn cut(&self) -> Option<&ElementCut> {
        match &self.data {
            BasisData::Standard { .. } => None,
            BasisData::Immersed { cut, .. } => Some(cut),
        }
    }
}

/// Barycentric coordinate functions of a triangle as linear polynomials
/// `(a_k + b_k x + c_k y)`, one per vertex.
pub(crate) fn barycentric_coords(verts: [Vec2; 3]) -> Result<[[f64; 3]; 3]> {
    let area = signed_area(verts[0], verts[1], verts[2]);
    if area.abs() <= f64::EPSILON {
        return Err(Error::DegenerateTriangle { area });
    }
    let inv2a = 1.0 / (2.0 * area);
    let mut lam = [[0.0; 3]; 3];
    for k in 0..3 {
        let p = verts[(k + 1) % 3];
        let q = verts[(k + 2) % 3];
        lam[k] = [
            (p.x * q.y - q.x * p.y) * inv2a,
            (p.y - q.y) * inv2a,
            (q.x - p.x) * inv2a,
        ];
    }
    Ok(lam)
}

/// Standard vector CR basis on an uncut triangle lying in `region`.
///
/// The scalar profile attached to edge slot `j` is `1 - 2 lambda_j`, which has
/// unit mean on edge `j` and zero mean on the other two.
pub fn cr_local_basis(verts: [Vec2; 3], region: Side) -> Result<LocalBasisSet> {
    let lam = barycentric_coords(verts)?;
    let mut funcs = [LinearVecPoly::zero(); 6];
    for j in 0..3 {
        let profile = [
            1.0 - 2.0 * lam[j][0],
            -2.0 * lam[j][1],
            -2.0 * lam[j][2],
        ];
        funcs[j].coeffs[0] = profile[0];
        funcs[j].coeffs[1] = profile[1];
        funcs[j].coeffs[2] = profile[2];
        funcs[3 + j].coeffs[3] = profile[0];
        funcs[3 + j].coeffs[4] = profile[1];
        funcs[3 + j].coeffs[5] = profile[2];
    }
    Ok(LocalBasisSet {
        verts,
        data: BasisData::Standard { funcs, region },
    })
}

/// Evaluates the field with local dof values `dofs` (edge averages, first
/// component for `0..3`, second for `3..6`) at a point inside the triangle.
pub fn eval_field(basis: &LocalBasisSet, dofs: &[f64; 6], p: Vec2) -> Result<Vec2> {
    let lam = barycentric_coords(basis.verts)?;
    for l in lam {
        if l[0] + l[1] * p.x + l[2] * p.y < -1e-10 {
            return Err(Error::PointOutsideTriangle(p.x, p.y));
        }
    }
    let funcs = basis.funcs_on(basis.side_at(p));
    let mut value = Vec2::zeros();
    for (i, d) in dofs.iter().enumerate() {
        if *d != 0.0 {
            value += funcs[i].eval(p) * *d;
        }
    }
    Ok(value)
}

/// Mean of basis function `i`, component `comp`, over edge slot `j`, split at
/// the interface crossing when the edge is cut. Uses Gauss quadrature per
/// linear piece, so the result is exact.
pub fn edge_average(basis: &LocalBasisSet, i: usize, comp: usize, slot: usize) -> Result<f64> {
    let p = basis.verts[(slot + 1) % 3];
    let q = basis.verts[(slot + 2) % 3];
    let len = (q - p).norm();
    let pieces: Vec<(Vec2, Vec2)> = match basis.cut().and_then(|c| c.cut_by_slot[slot]) {
        Some(x) => vec![(p, x), (x, q)],
        None => vec![(p, q)],
    };
    let mut mean = 0.0;
    for (a, b) in pieces {
        let w = (b - a).norm() / len;
        if w == 0.0 {
            continue;
        }
        mean += w * crate::quadrature::segment_mean(a, b, 4, |x| {
            let v = basis.basis_at(i, x);
            if comp == 0 {
                v.x
            } else {
                v.y
            }
        })?;
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::triangle_rule_on;

    const REF: [Vec2; 3] = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];

    #[test]
    fn strain_of_constant_vanishes() {
        let p = LinearVecPoly::constant(Vec2::new(1.0, 2.0));
        let (eps, div) = p.strain_and_div();
        assert_eq!(eps, Matrix2::zeros());
        assert_eq!(div, 0.0);
    }

    #[test]
    fn strain_of_identity_gradient() {
        // u = (x, y)
        let p = LinearVecPoly { coeffs: [0.0, 1.0, 0.0, 0.0, 0.0, 1.0] };
        let (eps, div) = p.strain_and_div();
        assert_eq!(eps, Matrix2::identity());
        assert_eq!(div, 2.0);
    }

    #[test]
    fn strain_of_rigid_rotation_vanishes() {
        // u = (-y, x)
        let p = LinearVecPoly { coeffs: [0.0, 0.0, -1.0, 0.0, 1.0, 0.0] };
        let (eps, div) = p.strain_and_div();
        assert_eq!(eps, Matrix2::zeros());
        assert_eq!(div, 0.0);
    }

    #[test]
    fn traction_cases() {
        let n = Vec2::new(1.0, 0.0);
        let c = LinearVecPoly::constant(Vec2::new(3.0, -1.0));
        assert_eq!(c.traction(2.0, 1.0, n), Vec2::zeros());

        // u = (x, 0), lambda = 0, mu = 1 -> sigma.n = (2, 0).
        let p = LinearVecPoly { coeffs: [0.0, 1.0, 0.0, 0.0, 0.0, 0.0] };
        assert_eq!(p.traction(0.0, 1.0, n), Vec2::new(2.0, 0.0));
    }

    #[test]
    fn cr_hypotenuse_profile() {
        let basis = cr_local_basis(REF, Side::Plus).unwrap();
        // Edge slot 0 is opposite vertex 0 = the hypotenuse; its scalar
        // profile is -1 + 2x + 2y.
        let f = basis.funcs_on(Side::Plus)[0];
        assert_eq!(f.coeffs[0], -1.0);
        assert_eq!(f.coeffs[1], 2.0);
        assert_eq!(f.coeffs[2], 2.0);
        // Unit value at the hypotenuse midpoint, zero at the other midpoints.
        assert!((f.eval(Vec2::new(0.5, 0.5)).x - 1.0).abs() < 1e-14);
        assert!(f.eval(Vec2::new(0.0, 0.5)).x.abs() < 1e-14);
        assert!(f.eval(Vec2::new(0.5, 0.0)).x.abs() < 1e-14);
    }

    #[test]
    fn cr_profiles_partition_unity() {
        let verts = [Vec2::new(0.2, -0.1), Vec2::new(1.3, 0.4), Vec2::new(0.5, 1.7)];
        let basis = cr_local_basis(verts, Side::Plus).unwrap();
        let funcs = basis.funcs_on(Side::Plus);
        for p in [Vec2::new(0.6, 0.5), Vec2::new(0.3, 0.1), Vec2::new(0.9, 0.8)] {
            let sum: f64 = (0..3).map(|j| funcs[j].eval(p).x).sum();
            assert!((sum - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn cr_scalar_profiles_orthogonal() {
        // Exact integral: int phi_i phi_j over K = |K|/3 delta_ij for the CR
        // profiles, from int lam_i lam_j = |K| (1 + delta_ij) / 12.
        let verts = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.3), Vec2::new(0.4, 1.5)];
        let area = signed_area(verts[0], verts[1], verts[2]);
        let basis = cr_local_basis(verts, Side::Plus).unwrap();
        let funcs = basis.funcs_on(Side::Plus);
        let rule = triangle_rule_on(verts, 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let val: f64 = rule
                    .iter()
                    .map(|&(p, w)| w * funcs[i].eval(p).x * funcs[j].eval(p).x)
                    .sum();
                let expect = if i == j { area / 3.0 } else { 0.0 };
                assert!((val - expect).abs() < 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn cr_kronecker_edge_averages() {
        let verts = [Vec2::new(0.0, 0.0), Vec2::new(1.1, 0.2), Vec2::new(-0.3, 0.9)];
        let basis = cr_local_basis(verts, Side::Plus).unwrap();
        for i in 0..6 {
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
                    assert!((avg - expect).abs() < 1e-12, "i={i} j={j} comp={comp}");
                }
            }
        }
    }

    #[test]
    fn eval_field_cases() {
        let basis = cr_local_basis(REF, Side::Plus).unwrap();
        let zero = eval_field(&basis, &[0.0; 6], Vec2::new(0.25, 0.25)).unwrap();
        assert_eq!(zero, Vec2::zeros());

        // Midpoint of edge slot 2 (bottom) picks up exactly that edge's dof.
        let mut dofs = [0.0; 6];
        dofs[2] = 3.5;
        dofs[5] = -1.25;
        let v = eval_field(&basis, &dofs, Vec2::new(0.5, 0.0)).unwrap();
        assert!((v.x - 3.5).abs() < 1e-14);
        assert!((v.y + 1.25).abs() < 1e-14);

        assert!(eval_field(&basis, &dofs, Vec2::new(0.8, 0.8)).is_err());
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let flat = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        assert!(cr_local_basis(flat, Side::Plus).is_err());
    }
}

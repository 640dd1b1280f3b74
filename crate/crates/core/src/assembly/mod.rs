//! Global assembly: stiffness, edge-jump stabilization, mass, Dirichlet
//! elimination, and the mesh-dependent energy norm.

mod sparse;

pub use sparse::SparseSymmetric;

use crate::basis::{cr_local_basis, immersed_local_basis, LocalBasisSet};
use crate::geometry::{polygon_area, ElementClass, InterfaceGeometry, Mesh};
use crate::material::{coefficients_at, LameField, Side};
use crate::quadrature::{polygon_rule, segment_rule_on};
use crate::{Error, Result, Vec2};
use nalgebra::SMatrix;

type Mat6 = SMatrix<f64, 6, 6>;

/// How the edge penalty weight scales with the material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauScaling {
    /// `tau_e = tau0 * 2 * max(mu-, mu+)`. Scaling with the shear modulus
    /// (not with lambda) keeps the penalty bounded in the incompressible
    /// limit, which is what makes the scheme locking-free.
    MuScaled,
    /// `tau_e = tau0` regardless of the material.
    Constant,
}

/// Assembly parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    /// Dimensionless stabilization constant.
    pub tau0: f64,
    pub tau_scaling: TauScaling,
    /// Triangle/polygon quadrature order for mass and load integrals.
    pub tri_quad_order: usize,
    /// Gauss points per linear piece for edge-jump integrals.
    pub seg_gauss_points: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            tau0: 1.0,
            tau_scaling: TauScaling::MuScaled,
            tri_quad_order: 2,
            seg_gauss_points: 2,
        }
    }
}

impl AssemblyConfig {
    /// Penalty weight for an edge; divided by the local edge length in the
    /// jump form.
    pub fn tau(&self, mat: &LameField) -> f64 {
        match self.tau_scaling {
            TauScaling::MuScaled => self.tau0 * 2.0 * mat.max_mu(),
            TauScaling::Constant => self.tau0,
        }
    }
}

/// Edge-based degree-of-freedom map with Dirichlet elimination.
///
/// Every edge carries two dofs (`2*edge` for the x-component, `2*edge + 1`
/// for the y-component); boundary-edge dofs are constrained to zero edge
/// average and dropped from the free set.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub num_edges: usize,
    /// Position among the free dofs, or `None` when constrained.
    pub free_index: Vec<Option<usize>>,
    /// Global dof id of each free slot.
    pub free_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let num_edges = mesh.num_edges();
        let mut free_index = vec![None; 2 * num_edges];
        let mut free_dofs = Vec::new();
        for e in 0..num_edges {
            if !mesh.boundary_edge[e] {
                for comp in 0..2 {
                    free_index[2 * e + comp] = Some(free_dofs.len());
                    free_dofs.push(2 * e + comp);
                }
            }
        }
        DofMap { num_edges, free_index, free_dofs }
    }

    pub fn num_total(&self) -> usize {
        2 * self.num_edges
    }

    pub fn num_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn num_constrained(&self) -> usize {
        self.num_total() - self.num_free()
    }

    /// Global dof ids of the six local dofs of triangle `t`.
    pub fn local_to_global(&self, mesh: &Mesh, t: usize) -> [usize; 6] {
        let e = mesh.triangle_edges[t];
        [
            2 * e[0],
            2 * e[1],
            2 * e[2],
            2 * e[0] + 1,
            2 * e[1] + 1,
            2 * e[2] + 1,
        ]
    }
}

/// Builds the per-element basis cache for one mesh level: standard CR bases
/// off the interface, immersed bases on cut elements.
pub fn build_bases(
    mesh: &Mesh,
    geo: &InterfaceGeometry,
    mat: &LameField,
) -> Result<Vec<LocalBasisSet>> {
    let mut bases = Vec::with_capacity(mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let verts = mesh.triangle_vertices(t);
        let basis = match geo.classes[t] {
            ElementClass::Interface => {
                let cut = geo.cuts[t]
                    .as_ref()
                    .expect("interface element carries cut geometry");
                immersed_local_basis(verts, cut, mat)?
            }
            ElementClass::Plus => cr_local_basis(verts, Side::Plus)?,
            ElementClass::Minus => cr_local_basis(verts, Side::Minus)?,
        };
        bases.push(basis);
    }
    Ok(bases)
}

/// Element stiffness `int_K 2 mu eps(phi_i):eps(phi_j) + lambda div div`.
///
/// Strain and divergence are constant per side, so the integral is an exact
/// area-weighted sum over the (sub-)regions.
pub fn local_stiffness(basis: &LocalBasisSet, mat: &LameField) -> Mat6 {
    let mut k = Mat6::zeros();
    for (side, poly) in basis.regions() {
        let (lambda, mu, _) = coefficients_at(mat, side);
        let area = polygon_area(&poly);
        let funcs = basis.funcs_on(side);
        let strains: Vec<_> = funcs.iter().map(|f| f.strain_and_div()).collect();
        for i in 0..6 {
            let (ei, di) = &strains[i];
            for j in i..6 {
                let (ej, dj) = &strains[j];
                let dd = ei[(0, 0)] * ej[(0, 0)]
                    + 2.0 * ei[(0, 1)] * ej[(0, 1)]
                    + ei[(1, 1)] * ej[(1, 1)];
                let v = area * (2.0 * mu * dd + lambda * di * dj);
                k[(i, j)] += v;
                if i != j {
                    k[(j, i)] += v;
                }
            }
        }
    }
    k
}

/// Element mass `int_K phi_i . phi_j`, exact via the order-2 rule per region.
pub fn local_mass(basis: &LocalBasisSet, quad_order: usize) -> Result<Mat6> {
    let mut m = Mat6::zeros();
    for (side, poly) in basis.regions() {
        let funcs = basis.funcs_on(side);
        for (x, w) in polygon_rule(&poly, quad_order)? {
            let vals: Vec<Vec2> = funcs.iter().map(|f| f.eval(x)).collect();
            for i in 0..6 {
                for j in i..6 {
                    let v = w * vals[i].dot(&vals[j]);
                    m[(i, j)] += v;
                    if i != j {
                        m[(j, i)] += v;
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Local contribution of one edge to the jump stabilization
/// `(tau_e/|e|) int_e [u].[v] ds`.
///
/// For an interior edge the jump couples all twelve dofs of the two adjacent
/// elements; on a boundary edge the jump is the trace itself. Traces are
/// piecewise linear with a breakpoint at the interface crossing, and the
/// integrand is integrated exactly with Gauss points per piece.
pub struct EdgeJumpBlock {
    /// Global dof ids, element-major (6 per adjacent element).
    pub dofs: Vec<usize>,
    pub matrix: nalgebra::DMatrix<f64>,
}

pub fn edge_jump_block(
    mesh: &Mesh,
    edge: usize,
    bases: &[LocalBasisSet],
    dofmap: &DofMap,
    tau_e: f64,
    seg_gauss_points: usize,
) -> Result<EdgeJumpBlock> {
    let (p, q) = mesh.edge_endpoints(edge);
    let len = mesh.edge_length(edge);
    let tris: Vec<usize> = mesh.edge_triangles[edge].iter().flatten().copied().collect();
    let n_loc = 6 * tris.len();

    let mut dofs = Vec::with_capacity(n_loc);
    for &t in &tris {
        dofs.extend_from_slice(&dofmap.local_to_global(mesh, t));
    }

    // Breakpoint: the interface crossing on this edge, from whichever
    // adjacent element is cut (both see the same point).
    let mut breakpoint: Option<Vec2> = None;
    for &t in &tris {
        if let Some(cut) = bases[t].cut() {
            let slot = mesh.triangle_edges[t].iter().position(|&e| e == edge).unwrap();
            if let Some(x) = cut.cut_by_slot[slot] {
                breakpoint = Some(x);
                break;
            }
        }
    }
    let pieces: Vec<(Vec2, Vec2)> = match breakpoint {
        Some(x) => vec![(p, x), (x, q)],
        None => vec![(p, q)],
    };

    let mut m = nalgebra::DMatrix::zeros(n_loc, n_loc);
    let weight = tau_e / len;
    for (a, b) in pieces {
        if (b - a).norm() == 0.0 {
            continue;
        }
        for (x, w) in segment_rule_on(a, b, seg_gauss_points)? {
            // Trace values of every stacked local basis function; the second
            // element enters with a negative sign to form the jump.
            let mut g = Vec::with_capacity(n_loc);
            for (ti, &t) in tris.iter().enumerate() {
                let sign = if ti == 0 { 1.0 } else { -1.0 };
                for i in 0..6 {
                    g.push(bases[t].basis_at(i, x) * sign);
                }
            }
            for ia in 0..n_loc {
                for ib in ia..n_loc {
                    let v = weight * w * g[ia].dot(&g[ib]);
                    m[(ia, ib)] += v;
                    if ia != ib {
                        m[(ib, ia)] += v;
                    }
                }
            }
        }
    }
    Ok(EdgeJumpBlock { dofs, matrix: m })
}

/// Assembled operators of one mesh level, restricted to free dofs.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// Volume part of the bilinear form (strain + divergence terms).
    pub stiffness: SparseSymmetric,
    /// Edge-jump penalty part.
    pub stabilization: SparseSymmetric,
    /// `stiffness + stabilization`; the left-hand operator.
    pub operator: SparseSymmetric,
    /// Mass operator.
    pub mass: SparseSymmetric,
    pub dofmap: DofMap,
}

/// Assembles stiffness, stabilization, and mass over the free dofs.
pub fn assemble(
    mesh: &Mesh,
    geo: &InterfaceGeometry,
    bases: &[LocalBasisSet],
    mat: &LameField,
    cfg: &AssemblyConfig,
) -> Result<AssembledSystem> {
    assert_eq!(bases.len(), mesh.num_triangles());
    assert_eq!(geo.classes.len(), mesh.num_triangles());
    let dofmap = DofMap::new(mesh);
    let n_free = dofmap.num_free();

    let mut stiff_triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut mass_triplets: Vec<(usize, usize, f64)> = Vec::new();
    for t in 0..mesh.num_triangles() {
        let k = local_stiffness(&bases[t], mat);
        let m = local_mass(&bases[t], cfg.tri_quad_order)?;
        check_local_symmetry(&k)?;
        check_local_symmetry(&m)?;
        let l2g = dofmap.local_to_global(mesh, t);
        scatter_block(&dofmap, &l2g, |i, j| k[(i, j)], &mut stiff_triplets);
        scatter_block(&dofmap, &l2g, |i, j| m[(i, j)], &mut mass_triplets);
    }

    let tau_e = cfg.tau(mat);
    let mut stab_triplets: Vec<(usize, usize, f64)> = Vec::new();
    for e in 0..mesh.num_edges() {
        let block = edge_jump_block(mesh, e, bases, &dofmap, tau_e, cfg.seg_gauss_points)?;
        scatter_block(
            &dofmap,
            &block.dofs,
            |i, j| block.matrix[(i, j)],
            &mut stab_triplets,
        );
    }

    let stiffness = SparseSymmetric::from_upper_triplets(n_free, stiff_triplets)?;
    let stabilization = SparseSymmetric::from_upper_triplets(n_free, stab_triplets)?;
    let mass = SparseSymmetric::from_upper_triplets(n_free, mass_triplets)?;
    let operator = stiffness.linear_combination(1.0, &stabilization, 1.0)?;

    Ok(AssembledSystem {
        stiffness,
        stabilization,
        operator,
        mass,
        dofmap,
    })
}

/// Assembles the load vector `b_j = (f, phi_j)` over free dofs with the
/// cut-aware polygon rule.
pub fn assemble_load(
    mesh: &Mesh,
    bases: &[LocalBasisSet],
    dofmap: &DofMap,
    cfg: &AssemblyConfig,
    f: impl Fn(Vec2) -> Vec2,
) -> Result<Vec<f64>> {
    let mut b = vec![0.0; dofmap.num_free()];
    for t in 0..mesh.num_triangles() {
        let l2g = dofmap.local_to_global(mesh, t);
        for (side, poly) in bases[t].regions() {
            let funcs = bases[t].funcs_on(side);
            for (x, w) in polygon_rule(&poly, cfg.tri_quad_order)? {
                let fv = f(x);
                for i in 0..6 {
                    if let Some(fi) = dofmap.free_index[l2g[i]] {
                        b[fi] += w * fv.dot(&funcs[i].eval(x));
                    }
                }
            }
        }
    }
    Ok(b)
}

/// Mesh-dependent energy norm `sqrt(v^T (stiffness + stabilization) v)`,
/// evaluated from the stored parts.
pub fn energy_norm(v: &[f64], sys: &AssembledSystem) -> f64 {
    (sys.stiffness.quadratic_form(v) + sys.stabilization.quadratic_form(v)).sqrt()
}

fn scatter_block(
    dofmap: &DofMap,
    dofs: &[usize],
    entry: impl Fn(usize, usize) -> f64,
    triplets: &mut Vec<(usize, usize, f64)>,
) {
    for (i, &gi) in dofs.iter().enumerate() {
        let Some(fi) = dofmap.free_index[gi] else { continue };
        for (j, &gj) in dofs.iter().enumerate() {
            let Some(fj) = dofmap.free_index[gj] else { continue };
            if fi <= fj {
                triplets.push((fi, fj, entry(i, j)));
            }
        }
    }
}

fn check_local_symmetry(m: &Mat6) -> Result<()> {
    let mut scale = 0.0f64;
    let mut defect = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            scale = scale.max(m[(i, j)].abs());
            defect = defect.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if defect > 1e-12 * scale.max(1.0) {
        return Err(Error::SymmetryDefect(defect));
    }
    Ok(())
}

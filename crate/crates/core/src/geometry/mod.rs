//! Uniform triangulations of the square and interface-cut geometry.

mod cut;
mod levelset;

pub use cut::{
    classify_elements, edge_crossing, interface_geometry, polygon_area, split_element,
    ElementClass, ElementCut, InterfaceGeometry,
};
pub use levelset::{Circle, LevelSet};

use crate::{Error, Result, Vec2};
use std::collections::HashMap;

/// Uniform right-triangle mesh of the square `[-1,1]^2`.
///
/// Each grid cell is split by the lower-left to upper-right diagonal, giving
/// `2N^2` triangles of diameter `h*sqrt(2)` with `h = 2/N`. Edges are
/// deduplicated and stored with ascending vertex indices; degrees of freedom
/// live on edges (two components each).
#[derive(Debug, Clone)]
pub struct Mesh {
    /// Refinement parameter: grid cells per edge direction.
    pub n: usize,
    /// Mesh size `h = 2/N`.
    pub h: f64,
    pub vertices: Vec<Vec2>,
    /// Vertex indices per triangle, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Deduplicated edges as ascending vertex index pairs.
    pub edges: Vec<[usize; 2]>,
    /// For each triangle, the edge index opposite each local vertex.
    pub triangle_edges: Vec<[usize; 3]>,
    /// True for edges on the domain boundary.
    pub boundary_edge: Vec<bool>,
    /// Triangles adjacent to each edge (one or two).
    pub edge_triangles: Vec<[Option<usize>; 2]>,
}

/// Builds the uniform unfitted triangulation with `n` cells per direction.
pub fn build_uniform_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::ZeroRefinement);
    }
    let h = 2.0 / n as f64;
    let np = n + 1;

    let mut vertices = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            vertices.push(Vec2::new(-1.0 + i as f64 * h, -1.0 + j as f64 * h));
        }
    }
    let vid = |i: usize, j: usize| j * np + i;

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            // Diagonal runs from the lower-left to the upper-right corner.
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    let mut edges: Vec<[usize; 2]> = Vec::with_capacity(3 * n * n + 2 * n);
    let mut edge_of: HashMap<[usize; 2], usize> = HashMap::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    let mut edge_triangles: Vec<[Option<usize>; 2]> = Vec::new();

    for (t, tri) in triangles.iter().enumerate() {
        let mut tri_edges = [0usize; 3];
        for k in 0..3 {
            // Edge opposite local vertex k.
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            let key = [a.min(b), a.max(b)];
            let idx = *edge_of.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_triangles.push([None, None]);
                edges.len() - 1
            });
            tri_edges[k] = idx;
            let slots = &mut edge_triangles[idx];
            if slots[0].is_none() {
                slots[0] = Some(t);
            } else {
                debug_assert!(slots[1].is_none());
                slots[1] = Some(t);
            }
        }
        triangle_edges.push(tri_edges);
    }

    let boundary_edge = edge_triangles
        .iter()
        .map(|adj| adj[1].is_none())
        .collect::<Vec<_>>();

    Ok(Mesh {
        n,
        h,
        vertices,
        triangles,
        edges,
        triangle_edges,
        boundary_edge,
        edge_triangles,
    })
}

impl Mesh {
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.boundary_edge.iter().filter(|&&b| b).count()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn edge_endpoints(&self, e: usize) -> (Vec2, Vec2) {
        let [a, b] = self.edges[e];
        (self.vertices[a], self.vertices[b])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (p, q) = self.edge_endpoints(e);
        (q - p).norm()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        signed_area(a, b, c)
    }

    pub fn triangle_centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangle_vertices(t);
        (a + b + c) / 3.0
    }
}

/// Signed area of the triangle `(a, b, c)`; positive when counter-clockwise.
pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

use super::levelset::LevelSet;
use super::{signed_area, Mesh};
use crate::{Error, Result, Vec2};

/// Relative tolerance (times `h`) for snapping a detected crossing onto a
/// triangle vertex.
const SNAP_REL: f64 = 1e-9;
/// Relative tolerance (times `|K|`) below which a sub-polygon counts as
/// degenerate.
const DEGENERACY_REL: f64 = 1e-12;
/// Bisection iterations; brackets the root to ~2^-60 of the edge length.
const BISECT_ITERS: usize = 60;

/// Classification of a triangle with respect to the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    /// The interface crosses the interior; the element carries an immersed basis.
    Interface,
    /// Entirely inside the plus subdomain.
    Plus,
    /// Entirely inside the minus subdomain.
    Minus,
}

/// Geometry of one interface-cut triangle.
///
/// `d` and `e` are the chord endpoints on the element boundary, `normal` is
/// the unit normal of the chord oriented from the minus to the plus side, and
/// the two sub-polygons partition the triangle (one triangle, the other a
/// triangle or convex quadrilateral).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementCut {
    pub triangle: usize,
    pub d: Vec2,
    pub e: Vec2,
    /// Local edge slots (edge opposite vertex `k` has slot `k`) carrying `d` and `e`.
    pub cut_edges: [usize; 2],
    /// Crossing point per local edge slot, if that edge is cut.
    pub cut_by_slot: [Option<Vec2>; 3],
    pub normal: Vec2,
    pub poly_minus: Vec<Vec2>,
    pub poly_plus: Vec<Vec2>,
}

impl ElementCut {
    pub fn area_minus(&self) -> f64 {
        polygon_area(&self.poly_minus)
    }

    pub fn area_plus(&self) -> f64 {
        polygon_area(&self.poly_plus)
    }

    /// True if `p` lies on the plus side of the chord.
    pub fn on_plus_side(&self, p: Vec2) -> bool {
        (p - self.d).dot(&self.normal) >= 0.0
    }

    /// Builds a cut from parametric positions along two edges of a triangle.
    ///
    /// Edge slot `s` runs from vertex `(s+1)%3` to vertex `(s+2)%3`; the cut
    /// point on it is the affine interpolation at parameter `t in (0,1)`.
    /// `apex_minus` selects which side of the chord is the minus subdomain
    /// (the apex being the vertex shared by the two cut edges). Intended for
    /// randomized sweeps and tests; meshes go through [`split_element`].
    pub fn from_edge_params(
        verts: [Vec2; 3],
        slot_a: usize,
        t_a: f64,
        slot_b: usize,
        t_b: f64,
        apex_minus: bool,
    ) -> Result<ElementCut> {
        assert!(slot_a < 3 && slot_b < 3 && slot_a != slot_b);
        let point_on = |slot: usize, t: f64| {
            let p = verts[(slot + 1) % 3];
            let q = verts[(slot + 2) % 3];
            p + (q - p) * t
        };
        let mut cuts = [None, None, None];
        cuts[slot_a] = Some(point_on(slot_a, t_a));
        cuts[slot_b] = Some(point_on(slot_b, t_b));
        // The apex is the vertex shared by both cut edges, i.e. the slot index
        // that is neither cut edge.
        let apex = 3 - slot_a - slot_b;
        let apex_sign = if apex_minus { -1 } else { 1 };
        let mut signs = [-apex_sign; 3];
        signs[apex] = apex_sign;
        let scale = (verts[1] - verts[0])
            .norm()
            .max((verts[2] - verts[1]).norm())
            .max((verts[0] - verts[2]).norm());
        assemble_cut(0, verts, signs, cuts, scale)
    }
}

/// Bundled interface data for one mesh level.
#[derive(Debug, Clone)]
pub struct InterfaceGeometry {
    pub classes: Vec<ElementClass>,
    /// Cut geometry for triangles classified [`ElementClass::Interface`].
    pub cuts: Vec<Option<ElementCut>>,
}

impl InterfaceGeometry {
    pub fn num_interface_elements(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| **c == ElementClass::Interface)
            .count()
    }
}

/// Locates the interface crossing on the segment `p0 -> p1` by bisection, or
/// returns `None` when both endpoints carry the same sign.
pub fn edge_crossing(p0: Vec2, p1: Vec2, ls: &LevelSet) -> Option<Vec2> {
    let s0 = ls.sign(p0);
    let s1 = ls.sign(p1);
    if s0 as i16 * s1 as i16 >= 0 {
        return None;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        let s = ls.sign(p0 + (p1 - p0) * mid);
        if s == 0 {
            lo = mid;
            hi = mid;
            break;
        }
        if s == s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Some(p0 + (p1 - p0) * t)
}

/// Classifies every triangle of the mesh against the level set.
///
/// A triangle is an interface element iff exactly two of its edges carry a
/// sign change and the resulting cut is non-degenerate; otherwise it is
/// labeled by the sign of `phi` at its centroid. An edge whose endpoints share
/// a sign but whose midpoint has the opposite sign violates the one-crossing
/// assumption and raises [`Error::InterfaceResolution`].
pub fn classify_elements(mesh: &Mesh, ls: &LevelSet) -> Result<Vec<ElementClass>> {
    Ok(interface_geometry(mesh, ls)?.classes)
}

/// Classifies all elements and computes the cut geometry of every interface
/// element in one pass.
pub fn interface_geometry(mesh: &Mesh, ls: &LevelSet) -> Result<InterfaceGeometry> {
    let nt = mesh.num_triangles();
    if ls.is_none() {
        return Ok(InterfaceGeometry {
            classes: vec![ElementClass::Plus; nt],
            cuts: vec![None; nt],
        });
    }
    let mut classes = Vec::with_capacity(nt);
    let mut cuts = Vec::with_capacity(nt);
    for t in 0..nt {
        match try_cut(mesh, t, ls)? {
            Some(cut) => {
                classes.push(ElementClass::Interface);
                cuts.push(Some(cut));
            }
            None => {
                classes.push(centroid_class(mesh, t, ls));
                cuts.push(None);
            }
        }
    }
    Ok(InterfaceGeometry { classes, cuts })
}

/// Computes the cut geometry of an interface triangle.
pub fn split_element(mesh: &Mesh, tri: usize, ls: &LevelSet) -> Result<ElementCut> {
    match detect_crossings(mesh, tri, ls)? {
        Some((signs, cuts)) => {
            assemble_cut(tri, mesh.triangle_vertices(tri), signs, cuts, mesh.h)
        }
        None => Err(Error::DegenerateCut {
            triangle: tri,
            area: 0.0,
        }),
    }
}

/// Shoelace area of a simple polygon; positive for counter-clockwise order.
pub fn polygon_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

fn centroid_class(mesh: &Mesh, t: usize, ls: &LevelSet) -> ElementClass {
    if ls.eval(mesh.triangle_centroid(t)) >= 0.0 {
        ElementClass::Plus
    } else {
        ElementClass::Minus
    }
}

/// Detects edge crossings of triangle `t`. Returns vertex signs and the
/// snapped crossing point per local edge slot when exactly two edges are cut,
/// and `None` otherwise.
type Crossings = ([i8; 3], [Option<Vec2>; 3]);

fn detect_crossings(mesh: &Mesh, t: usize, ls: &LevelSet) -> Result<Option<Crossings>> {
    let verts = mesh.triangle_vertices(t);
    let snap_tol = SNAP_REL * mesh.h;
    let mut cuts = [None, None, None];
    let mut n_cut = 0;
    for slot in 0..3 {
        let e = mesh.triangle_edges[t][slot];
        // Global canonical endpoint order keeps the bisection result identical
        // for both triangles sharing the edge.
        let (p, q) = mesh.edge_endpoints(e);
        let sp = ls.sign(p);
        let sq = ls.sign(q);
        if (sp as i16) * (sq as i16) < 0 {
            let mut x = edge_crossing(p, q, ls).expect("sign change implies a crossing");
            if (x - p).norm() < snap_tol {
                x = p;
            } else if (x - q).norm() < snap_tol {
                x = q;
            }
            cuts[slot] = Some(x);
            n_cut += 1;
        } else if sp == sq && sp != 0 {
            // Same-sign endpoints with an opposite-sign midpoint means the
            // interface enters and leaves through this edge: the small-h
            // assumption is violated and the cut cannot be represented.
            let mid = (p + q) * 0.5;
            if ls.sign(mid) == -sp {
                return Err(Error::InterfaceResolution { triangle: t, edge: e });
            }
        }
    }
    if n_cut != 2 {
        return Ok(None);
    }
    let signs = [ls.sign(verts[0]), ls.sign(verts[1]), ls.sign(verts[2])];
    // Two strict sign changes force nonzero, non-uniform vertex signs.
    debug_assert!(signs.iter().all(|&s| s != 0));
    Ok(Some((signs, cuts)))
}

fn try_cut(mesh: &Mesh, t: usize, ls: &LevelSet) -> Result<Option<ElementCut>> {
    match detect_crossings(mesh, t, ls)? {
        Some((signs, cuts)) => {
            match assemble_cut(t, mesh.triangle_vertices(t), signs, cuts, mesh.h) {
                Ok(cut) => Ok(Some(cut)),
                // A cut grazing a vertex yields a sliver below the degeneracy
                // tolerance; such triangles fall back to centroid labeling.
                Err(Error::DegenerateCut { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        }
        None => Ok(None),
    }
}

/// Builds the [`ElementCut`] from vertex signs and per-slot crossing points by
/// walking the triangle boundary and clipping against the chord.
fn assemble_cut(
    tri: usize,
    verts: [Vec2; 3],
    signs: [i8; 3],
    cuts: [Option<Vec2>; 3],
    scale: f64,
) -> Result<ElementCut> {
    let tri_area = signed_area(verts[0], verts[1], verts[2]);
    if tri_area <= 0.0 {
        return Err(Error::DegenerateTriangle { area: tri_area });
    }

    let mut poly_minus: Vec<Vec2> = Vec::with_capacity(4);
    let mut poly_plus: Vec<Vec2> = Vec::with_capacity(4);
    for k in 0..3 {
        if signs[k] < 0 {
            poly_minus.push(verts[k]);
        } else {
            poly_plus.push(verts[k]);
        }
        // The boundary edge from vertex k to vertex k+1 sits opposite vertex
        // k+2, i.e. in slot (k+2)%3.
        if let Some(x) = cuts[(k + 2) % 3] {
            poly_minus.push(x);
            poly_plus.push(x);
        }
    }
    dedup_closed(&mut poly_minus, 1e-12 * scale);
    dedup_closed(&mut poly_plus, 1e-12 * scale);

    let area_minus = polygon_area(&poly_minus);
    let area_plus = polygon_area(&poly_plus);
    let min_area = area_minus.min(area_plus);
    if poly_minus.len() < 3 || poly_plus.len() < 3 || min_area < DEGENERACY_REL * tri_area {
        return Err(Error::DegenerateCut {
            triangle: tri,
            area: min_area,
        });
    }
    debug_assert!(
        ((area_minus + area_plus) - tri_area).abs() <= 1e-12 * tri_area,
        "sub-polygon areas must partition the triangle"
    );

    let (slot_a, slot_b) = match (cuts[0].is_some(), cuts[1].is_some(), cuts[2].is_some()) {
        (true, true, false) => (0, 1),
        (true, false, true) => (0, 2),
        (false, true, true) => (1, 2),
        _ => unreachable!("assemble_cut requires exactly two cut edges"),
    };
    let d = cuts[slot_a].unwrap();
    let e = cuts[slot_b].unwrap();
    let chord = e - d;
    if chord.norm() < 1e-12 * scale {
        return Err(Error::DegenerateCut {
            triangle: tri,
            area: min_area,
        });
    }

    // Rotate the chord by 90 degrees, then orient from minus to plus using the
    // sub-polygon vertex means (interior points of the convex parts).
    let mut normal = Vec2::new(-chord.y, chord.x).normalize();
    let mean = |poly: &[Vec2]| poly.iter().sum::<Vec2>() / poly.len() as f64;
    if normal.dot(&(mean(&poly_plus) - mean(&poly_minus))) < 0.0 {
        normal = -normal;
    }

    Ok(ElementCut {
        triangle: tri,
        d,
        e,
        cut_edges: [slot_a, slot_b],
        cut_by_slot: cuts,
        normal,
        poly_minus,
        poly_plus,
    })
}

/// Removes consecutive duplicate points (cyclically) from a polygon.
fn dedup_closed(poly: &mut Vec<Vec2>, tol: f64) {
    let mut out: Vec<Vec2> = Vec::with_capacity(poly.len());
    for &p in poly.iter() {
        if let Some(&last) = out.last() {
            if (p - last).norm() <= tol {
                continue;
            }
        }
        out.push(p);
    }
    while out.len() > 1 && (out[0] - *out.last().unwrap()).norm() <= tol {
        out.pop();
    }
    *poly = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_uniform_mesh;

    fn circle06() -> LevelSet {
        LevelSet::circle(Vec2::new(0.0, 0.0), 0.6).unwrap()
    }

    fn find_triangle(mesh: &Mesh, verts: [[f64; 2]; 3]) -> usize {
        'outer: for t in 0..mesh.num_triangles() {
            let tv = mesh.triangle_vertices(t);
            for want in verts {
                if !tv
                    .iter()
                    .any(|v| (v.x - want[0]).abs() < 1e-12 && (v.y - want[1]).abs() < 1e-12)
                {
                    continue 'outer;
                }
            }
            return t;
        }
        panic!("triangle {verts:?} not in mesh");
    }

    #[test]
    fn classify_circle_interface_triangle() {
        let mesh = build_uniform_mesh(8).unwrap();
        let ls = circle06();
        let classes = classify_elements(&mesh, &ls).unwrap();
        // Lower triangle of the cell [0, 0.25] x [0.5, 0.75]: vertex signs
        // are (-, -, +) for the radius-0.6 circle, so it must be cut.
        let t = find_triangle(&mesh, [[0.0, 0.5], [0.25, 0.5], [0.25, 0.75]]);
        let signs: Vec<i8> = mesh
            .triangle_vertices(t)
            .iter()
            .map(|&v| ls.sign(v))
            .collect();
        assert_eq!(signs.iter().filter(|&&s| s < 0).count(), 2);
        assert_eq!(signs.iter().filter(|&&s| s > 0).count(), 1);
        assert_eq!(classes[t], ElementClass::Interface);
    }

    #[test]
    fn classify_none_level_set() {
        let mesh = build_uniform_mesh(4).unwrap();
        let classes = classify_elements(&mesh, &LevelSet::None).unwrap();
        assert!(classes.iter().all(|c| *c == ElementClass::Plus));
    }

    #[test]
    fn classify_line_above_is_plus() {
        let mesh = build_uniform_mesh(4).unwrap();
        let ls = LevelSet::line(-0.5, 1.0, 0.2).unwrap();
        let classes = classify_elements(&mesh, &ls).unwrap();
        // Triangle in the top-left corner lies entirely above the line.
        let t = find_triangle(&mesh, [[-1.0, 0.5], [-0.5, 1.0], [-1.0, 1.0]]);
        assert_eq!(classes[t], ElementClass::Plus);
        // And one deep in the lower right lies below.
        let b = find_triangle(&mesh, [[0.5, -1.0], [1.0, -1.0], [1.0, -0.5]]);
        assert_eq!(classes[b], ElementClass::Minus);
    }

    #[test]
    fn classification_partitions_and_bands() {
        let mesh = build_uniform_mesh(16).unwrap();
        let geo = interface_geometry(&mesh, &circle06()).unwrap();
        assert_eq!(geo.classes.len(), mesh.num_triangles());
        assert!(geo.num_interface_elements() > 0);
        // Interface elements form a one-element-wide band: each has at most
        // two interface edge-neighbors.
        for t in 0..mesh.num_triangles() {
            if geo.classes[t] != ElementClass::Interface {
                continue;
            }
            let mut interface_neighbors = 0;
            for &e in &mesh.triangle_edges[t] {
                for adj in mesh.edge_triangles[e].iter().flatten() {
                    if *adj != t && geo.classes[*adj] == ElementClass::Interface {
                        interface_neighbors += 1;
                    }
                }
            }
            assert!(
                interface_neighbors <= 2,
                "triangle {t} has {interface_neighbors} interface neighbors"
            );
        }
    }

    #[test]
    fn crossing_circle_closed_form() {
        let ls = circle06();
        let x = edge_crossing(Vec2::new(0.5, 0.25), Vec2::new(0.5, 0.5), &ls).unwrap();
        let expected = (0.36f64 - 0.25).sqrt();
        assert!((x.x - 0.5).abs() < 1e-13);
        assert!((x.y - expected).abs() < 1e-12);
        assert!(ls.eval(x).abs() < 1e-10);
    }

    #[test]
    fn crossing_line_closed_form() {
        let ls = LevelSet::line(-0.5, 1.0, 0.2).unwrap();
        let x = edge_crossing(Vec2::new(0.0, 0.0), Vec2::new(0.0, -0.25), &ls).unwrap();
        assert!((x.x).abs() < 1e-14);
        assert!((x.y + 0.2).abs() < 1e-13);
    }

    #[test]
    fn crossing_absent_when_same_side() {
        let ls = circle06();
        assert!(edge_crossing(Vec2::new(0.9, 0.9), Vec2::new(0.9, 0.7), &ls).is_none());
    }

    #[test]
    fn split_reference_triangle_areas() {
        let verts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        // Chord from (0.5, 0) on the bottom edge (slot 2) to (0, 0.5) on the
        // left edge (slot 1), origin side minus.
        let cut = ElementCut::from_edge_params(verts, 2, 0.5, 1, 0.5, true).unwrap();
        assert!((cut.area_minus() - 0.125).abs() < 1e-15);
        assert!((cut.area_plus() - 0.375).abs() < 1e-15);
        assert_eq!(cut.poly_minus.len(), 3);
        assert_eq!(cut.poly_plus.len(), 4);
        assert!((cut.normal.norm() - 1.0).abs() < 1e-14);
        // Normal points from minus (origin side) to plus.
        assert!(cut.normal.dot(&Vec2::new(1.0, 1.0)) > 0.0);
    }

    #[test]
    fn split_on_mesh_circle_normal_is_radial() {
        let mesh = build_uniform_mesh(16).unwrap();
        let ls = circle06();
        let geo = interface_geometry(&mesh, &ls).unwrap();
        for t in 0..mesh.num_triangles() {
            let Some(cut) = &geo.cuts[t] else { continue };
            let area_sum = cut.area_minus() + cut.area_plus();
            let tri_area = mesh.triangle_area(t);
            assert!((area_sum - tri_area).abs() <= 1e-12 * tri_area);
            // The chord normal approximates the outward radial direction at
            // the chord midpoint to O(h^2).
            let mid = (cut.d + cut.e) * 0.5;
            let radial = mid.normalize();
            let dot = cut.normal.dot(&radial);
            assert!(dot > 0.99, "normal misaligned: dot = {dot}");
        }
    }

    #[test]
    fn split_noninterface_errors() {
        let mesh = build_uniform_mesh(4).unwrap();
        let ls = circle06();
        let classes = classify_elements(&mesh, &ls).unwrap();
        let t = classes
            .iter()
            .position(|c| *c != ElementClass::Interface)
            .unwrap();
        assert!(split_element(&mesh, t, &ls).is_err());
    }

    #[test]
    fn crossing_points_lie_on_interface() {
        let mesh = build_uniform_mesh(32).unwrap();
        for ls in [
            circle06(),
            LevelSet::ellipse(Vec2::new(0.0, 0.0), 0.6, 0.3).unwrap(),
            LevelSet::line(-0.5, 1.0, 0.2).unwrap(),
        ] {
            let geo = interface_geometry(&mesh, &ls).unwrap();
            for cut in geo.cuts.iter().flatten() {
                assert!(ls.eval(cut.d).abs() < 1e-10);
                assert!(ls.eval(cut.e).abs() < 1e-10);
            }
        }
    }
}

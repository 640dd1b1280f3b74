//! Quadrature rules for triangles, convex cut polygons, and edge segments.

use crate::geometry::{polygon_area, signed_area};
use crate::{Error, Result, Vec2};

/// Reference-triangle rule: points in barycentric-derived Cartesian
/// coordinates on `(0,0), (1,0), (0,1)` with weights summing to 1/2.
///
/// Orders 1 and 2 are the centroid and three-point rules; order 3 uses a
/// six-point rule with positive weights (exact through degree 4).
pub fn triangle_quadrature(order: usize) -> Result<Vec<(Vec2, f64)>> {
    match order {
        1 => Ok(vec![(Vec2::new(1.0 / 3.0, 1.0 / 3.0), 0.5)]),
        2 => Ok(vec![
            (Vec2::new(1.0 / 6.0, 1.0 / 6.0), 1.0 / 6.0),
            (Vec2::new(2.0 / 3.0, 1.0 / 6.0), 1.0 / 6.0),
            (Vec2::new(1.0 / 6.0, 2.0 / 3.0), 1.0 / 6.0),
        ]),
        3 => {
            let w1 = 0.223_381_589_678_011 / 2.0;
            let w2 = 0.109_951_743_655_322 / 2.0;
            let a1 = 0.445_948_490_915_965;
            let b1 = 0.108_103_018_168_070;
            let a2 = 0.091_576_213_509_771;
            let b2 = 0.816_847_572_980_459;
            Ok(vec![
                (Vec2::new(a1, a1), w1),
                (Vec2::new(b1, a1), w1),
                (Vec2::new(a1, b1), w1),
                (Vec2::new(a2, a2), w2),
                (Vec2::new(b2, a2), w2),
                (Vec2::new(a2, b2), w2),
            ])
        }
        _ => Err(Error::UnsupportedQuadratureOrder(order)),
    }
}

/// Maps a reference rule onto the physical triangle `verts`, scaling weights
/// by the Jacobian so they sum to the triangle area.
pub fn triangle_rule_on(verts: [Vec2; 3], order: usize) -> Result<Vec<(Vec2, f64)>> {
    let area = signed_area(verts[0], verts[1], verts[2]);
    if area.abs() <= f64::EPSILON {
        return Err(Error::DegenerateTriangle { area });
    }
    let jac = 2.0 * area;
    Ok(triangle_quadrature(order)?
        .into_iter()
        .map(|(p, w)| {
            let x = verts[0] + (verts[1] - verts[0]) * p.x + (verts[2] - verts[0]) * p.y;
            (x, w * jac)
        })
        .collect())
}

/// Integrates `f` over a convex polygon (triangle or quadrilateral) by fan
/// triangulation with the order-2 rule; exact for quadratics.
pub fn integrate_cut(poly: &[Vec2], f: impl Fn(Vec2) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for (x, w) in polygon_rule(poly, 2)? {
        total += w * f(x);
    }
    Ok(total)
}

/// Quadrature rule over a convex polygon via fan triangulation from the first
/// vertex; weights sum to the polygon area.
pub fn polygon_rule(poly: &[Vec2], order: usize) -> Result<Vec<(Vec2, f64)>> {
    let area = polygon_area(poly);
    if poly.len() < 3 || area <= f64::EPSILON {
        return Err(Error::DegeneratePolygon {
            vertices: poly.len(),
            area,
        });
    }
    let mut rule = Vec::with_capacity((poly.len() - 2) * 3);
    for k in 1..poly.len() - 1 {
        rule.extend(triangle_rule_on([poly[0], poly[k], poly[k + 1]], order)?);
    }
    Ok(rule)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, weights summing to 1.
pub fn gauss_segment(points: usize) -> Result<Vec<(f64, f64)>> {
    let rule = match points {
        1 => vec![(0.5, 1.0)],
        2 => {
            let d = 0.5 / 3.0f64.sqrt();
            vec![(0.5 - d, 0.5), (0.5 + d, 0.5)]
        }
        3 => {
            let d = 0.5 * (3.0f64 / 5.0).sqrt();
            vec![
                (0.5 - d, 5.0 / 18.0),
                (0.5, 8.0 / 18.0),
                (0.5 + d, 5.0 / 18.0),
            ]
        }
        4 => {
            let a = 0.5 - 0.5 * (3.0f64 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let b = 0.5 - 0.5 * (3.0f64 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30.0f64.sqrt()) / 72.0;
            let wb = (18.0 - 30.0f64.sqrt()) / 72.0;
            vec![(b, wb), (a, wa), (1.0 - a, wa), (1.0 - b, wb)]
        }
        _ => return Err(Error::UnsupportedQuadratureOrder(points)),
    };
    Ok(rule)
}

/// Gauss rule mapped onto the segment `p0 -> p1`; weights sum to its length.
pub fn segment_rule_on(p0: Vec2, p1: Vec2, points: usize) -> Result<Vec<(Vec2, f64)>> {
    let len = (p1 - p0).norm();
    Ok(gauss_segment(points)?
        .into_iter()
        .map(|(t, w)| (p0 + (p1 - p0) * t, w * len))
        .collect())
}

/// Mean value of `f` along the segment `p0 -> p1` (2-point Gauss, exact for
/// cubics; the traces integrated here are at most linear per piece).
pub fn segment_mean(p0: Vec2, p1: Vec2, points: usize, f: impl Fn(Vec2) -> f64) -> Result<f64> {
    Ok(gauss_segment(points)?
        .into_iter()
        .map(|(t, w)| w * f(p0 + (p1 - p0) * t))
        .sum())
}

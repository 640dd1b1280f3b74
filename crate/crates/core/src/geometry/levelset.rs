use crate::{Error, Result, Vec2};

/// One circle of a multi-circle interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

/// Implicit interface description: the interface is the zero set of `phi`,
/// with `phi < 0` on the minus side and `phi > 0` on the plus side.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSet {
    /// No interface; the whole domain is the plus side.
    None,
    /// `phi = |x - c|^2 - r^2`.
    Circle { center: Vec2, radius: f64 },
    /// `phi = ((x - cx)/a)^2 + ((y - cy)/b)^2 - 1`.
    Ellipse { center: Vec2, a: f64, b: f64 },
    /// `phi = a*x + b*y + c`.
    Line { a: f64, b: f64, c: f64 },
    /// Union of pairwise disjoint disks: `phi = min_i(|x - c_i| - r_i)`.
    Circles(Vec<Circle>),
}

impl LevelSet {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidLevelSet("circle radius must be positive".into()));
        }
        Ok(LevelSet::Circle { center, radius })
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Result<Self> {
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidLevelSet("ellipse semi-axes must be positive".into()));
        }
        Ok(LevelSet::Ellipse { center, a, b })
    }

    pub fn line(a: f64, b: f64, c: f64) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(Error::InvalidLevelSet("line coefficients a, b must not both vanish".into()));
        }
        Ok(LevelSet::Line { a, b, c })
    }

    /// Builds a union-of-circles interface, validating pairwise disjointness.
    pub fn circles(circles: Vec<Circle>) -> Result<Self> {
        if circles.is_empty() {
            return Err(Error::InvalidLevelSet("circle list must not be empty".into()));
        }
        for c in &circles {
            if c.radius <= 0.0 {
                return Err(Error::InvalidLevelSet("circle radius must be positive".into()));
            }
        }
        for (i, ci) in circles.iter().enumerate() {
            for cj in circles.iter().skip(i + 1) {
                let dist = (ci.center - cj.center).norm();
                if dist <= ci.radius + cj.radius {
                    return Err(Error::InvalidLevelSet(format!(
                        "circles at ({}, {}) and ({}, {}) are not disjoint",
                        ci.center.x, ci.center.y, cj.center.x, cj.center.y
                    )));
                }
            }
        }
        Ok(LevelSet::Circles(circles))
    }

    pub fn is_none(&self) -> bool {
        matches!(self, LevelSet::None)
    }

    /// Evaluates `phi` at `p`.
    pub fn eval(&self, p: Vec2) -> f64 {
        match self {
            LevelSet::None => 1.0,
            LevelSet::Circle { center, radius } => {
                (p - center).norm_squared() - radius * radius
            }
            LevelSet::Ellipse { center, a, b } => {
                let dx = (p.x - center.x) / a;
                let dy = (p.y - center.y) / b;
                dx * dx + dy * dy - 1.0
            }
            LevelSet::Line { a, b, c } => a * p.x + b * p.y + c,
            LevelSet::Circles(circles) => circles
                .iter()
                .map(|ci| (p - ci.center).norm() - ci.radius)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Sign of `phi` at `p`: -1, 0, or +1.
    pub fn sign(&self, p: Vec2) -> i8 {
        let v = self.eval(p);
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
}

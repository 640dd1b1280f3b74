//! Piecewise-constant elastic coefficients and Lame/engineering conversions.

use crate::{Error, Result};

/// Subdomain selector for piecewise-constant fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Piecewise-constant Lame coefficients and densities on the two subdomains.
///
/// Densities default to 1; when they differ from 1 the coefficients returned
/// by [`coefficients_at`] are density-normalized (`lambda/rho`, `mu/rho`) so
/// the eigenproblem keeps a plain mass form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameField {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
}

impl LameField {
    pub fn new(mu_minus: f64, lambda_minus: f64, mu_plus: f64, lambda_plus: f64) -> Result<Self> {
        Self::with_density(mu_minus, lambda_minus, mu_plus, lambda_plus, 1.0, 1.0)
    }

    pub fn with_density(
        mu_minus: f64,
        lambda_minus: f64,
        mu_plus: f64,
        lambda_plus: f64,
        rho_minus: f64,
        rho_plus: f64,
    ) -> Result<Self> {
        for (name, v) in [("mu_minus", mu_minus), ("mu_plus", mu_plus)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("lambda_minus", lambda_minus), ("lambda_plus", lambda_plus)] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, v) in [("rho_minus", rho_minus), ("rho_plus", rho_plus)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(LameField {
            mu_minus,
            mu_plus,
            lambda_minus,
            lambda_plus,
            rho_minus,
            rho_plus,
        })
    }

    /// Same coefficients on both sides.
    pub fn uniform(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(mu, lambda, mu, lambda)
    }

    /// Builds the field from Young's moduli and Poisson ratios per side.
    pub fn from_young_poisson(
        e_minus: f64,
        nu_minus: f64,
        e_plus: f64,
        nu_plus: f64,
    ) -> Result<Self> {
        let (lambda_minus, mu_minus) = lame_from_young_poisson(e_minus, nu_minus)?;
        let (lambda_plus, mu_plus) = lame_from_young_poisson(e_plus, nu_plus)?;
        Self::new(mu_minus, lambda_minus, mu_plus, lambda_plus)
    }

    /// Largest shear modulus across the two sides (used by penalty scaling).
    pub fn max_mu(&self) -> f64 {
        self.mu_minus.max(self.mu_plus)
    }

    pub fn poisson(&self, side: Side) -> f64 {
        match side {
            Side::Minus => poisson_from_lame(self.lambda_minus, self.mu_minus),
            Side::Plus => poisson_from_lame(self.lambda_plus, self.mu_plus),
        }
    }

    /// True when the coefficients carry no jump across the interface.
    pub fn is_uniform(&self) -> bool {
        self.mu_minus == self.mu_plus
            && self.lambda_minus == self.lambda_plus
            && self.rho_minus == self.rho_plus
    }
}

/// Converts engineering constants to Lame coefficients:
/// `lambda = E*nu/((1+nu)(1-2nu))`, `mu = E/(2(1+nu))`.
pub fn lame_from_young_poisson(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidMaterial(format!(
            "Young's modulus must be positive, got {e}"
        )));
    }
    if !(0.0..0.5).contains(&nu) {
        return Err(Error::InvalidMaterial(format!(
            "Poisson ratio must lie in [0, 0.5), got {nu}"
        )));
    }
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    Ok((lambda, mu))
}

/// Poisson ratio from Lame coefficients: `nu = lambda / (2(lambda + mu))`.
pub fn poisson_from_lame(lambda: f64, mu: f64) -> f64 {
    lambda / (2.0 * (lambda + mu))
}

/// Density-normalized `(lambda, mu, rho)` triple on the requested side.
pub fn coefficients_at(field: &LameField, side: Side) -> (f64, f64, f64) {
    match side {
        Side::Minus => (
            field.lambda_minus / field.rho_minus,
            field.mu_minus / field.rho_minus,
            field.rho_minus,
        ),
        Side::Plus => (
            field.lambda_plus / field.rho_plus,
            field.mu_plus / field.rho_plus,
            field.rho_plus,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_poisson_kills_lambda() {
        let (lambda, mu) = lame_from_young_poisson(1.0, 0.0).unwrap();
        assert_eq!(lambda, 0.0);
        assert_eq!(mu, 0.5);
    }

    #[test]
    fn benchmark_poisson_ratio() {
        // lambda = 5 mu corresponds to nu ~ 0.417.
        let (lambda, mu) = lame_from_young_poisson(1.41667, 0.41667).unwrap();
        assert!((lambda / mu - 5.0).abs() < 1e-3);
        assert!((poisson_from_lame(2.5, 0.5) - 5.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn nearly_incompressible_poisson() {
        let nu = poisson_from_lame(2500.0, 0.5);
        assert!((nu - 0.49990).abs() < 1e-5);
    }

    #[test]
    fn multi_circle_benchmark_poissons() {
        assert!((poisson_from_lame(2.0, 1.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((poisson_from_lame(36.0, 30.0) - 36.0 / 132.0).abs() < 1e-12);
        assert!((poisson_from_lame(36.0, 30.0) - 0.2727).abs() < 1e-4);
    }

    #[test]
    fn round_trip_identity() {
        for e in [0.1, 1.0, 3.7, 100.0] {
            for nu in [0.0, 0.1, 0.25, 0.4, 0.49] {
                let (lambda, mu) = lame_from_young_poisson(e, nu).unwrap();
                let nu_back = poisson_from_lame(lambda, mu);
                assert!((nu_back - nu).abs() < 1e-12, "nu round trip at E={e}, nu={nu}");
                // E = 2 mu (1 + nu).
                let e_back = 2.0 * mu * (1.0 + nu_back);
                assert!((e_back - e).abs() < 1e-12 * e);
            }
        }
    }

    #[test]
    fn rejects_incompressible_limit() {
        assert!(lame_from_young_poisson(1.0, 0.5).is_err());
        assert!(lame_from_young_poisson(1.0, 0.7).is_err());
    }

    #[test]
    fn coefficients_sides_and_density() {
        let sym = LameField::uniform(1.0, 2.0).unwrap();
        assert_eq!(coefficients_at(&sym, Side::Minus), coefficients_at(&sym, Side::Plus));

        // Table header materials: (mu-, mu+) = (0.5, 5), lambda = 5 mu.
        let field = LameField::new(0.5, 2.5, 5.0, 25.0).unwrap();
        assert_eq!(coefficients_at(&field, Side::Plus), (25.0, 5.0, 1.0));

        let dense = LameField::with_density(1.0, 2.0, 1.0, 2.0, 2.0, 1.0).unwrap();
        let (lambda, mu, rho) = coefficients_at(&dense, Side::Minus);
        assert_eq!(mu, 0.5);
        assert_eq!(lambda, 1.0);
        assert_eq!(rho, 2.0);
    }

    #[test]
    fn benchmark_parameter_sets_valid() {
        // All parameter sets used by the bundled benchmarks sit strictly
        // inside the admissible Poisson range.
        let sets = [
            (0.5, 2.5, 5.0, 25.0),
            (5.0, 25.0, 0.5, 2.5),
            (1.0, 2.0, 30.0, 36.0),
            (0.5, 2500.0, 5.0, 25000.0),
            (5.0, 25000.0, 0.5, 2500.0),
        ];
        for (mu_m, la_m, mu_p, la_p) in sets {
            let field = LameField::new(mu_m, la_m, mu_p, la_p).unwrap();
            for side in [Side::Minus, Side::Plus] {
                let nu = field.poisson(side);
                assert!(nu > 0.0 && nu < 0.5, "nu = {nu}");
            }
        }
    }
}

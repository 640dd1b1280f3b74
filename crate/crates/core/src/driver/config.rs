//! Case configuration: TOML parsing, validation, and built-in benchmarks.

use crate::assembly::{AssemblyConfig, TauScaling};
use crate::geometry::{Circle, LevelSet};
use crate::material::LameField;
use crate::solver::EigenOptions;
use crate::{Error, Result, Vec2};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Fully validated configuration of one benchmark case.
#[derive(Debug, Clone)]
pub struct CaseConfig {
    /// Mesh levels of the convergence study, ascending.
    pub levels: Vec<usize>,
    /// Reference level; must exceed every study level.
    pub n_ref: usize,
    /// Level for single-run subcommands; defaults to the finest study level.
    pub n: Option<usize>,
    pub interface: LevelSet,
    pub materials: LameField,
    pub tau0: f64,
    pub tau_scaling: TauScaling,
    /// Number of eigenvalues tracked.
    pub m: usize,
    pub tol: f64,
    pub shift: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub output_dir: PathBuf,
}

impl CaseConfig {
    pub fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig {
            tau0: self.tau0,
            tau_scaling: self.tau_scaling,
            ..AssemblyConfig::default()
        }
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            count: self.m,
            tol: self.tol,
            shift: self.shift,
            seed: self.seed,
            max_iter: self.max_iter,
        }
    }

    /// Level used by single-run subcommands.
    pub fn single_level(&self) -> usize {
        self.n
            .unwrap_or_else(|| self.levels.last().copied().unwrap_or(self.n_ref))
    }

    fn validate(self) -> Result<Self> {
        if self.levels.is_empty() {
            return Err(Error::InvalidConfig("at least one mesh level is required".into()));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("mesh levels must be strictly ascending".into()));
        }
        if self.levels.iter().any(|&n| n == 0) || self.n == Some(0) {
            return Err(Error::InvalidConfig("mesh levels must be positive".into()));
        }
        if self.n_ref <= *self.levels.last().unwrap() {
            return Err(Error::InvalidConfig(format!(
                "reference level {} must exceed the finest study level {}",
                self.n_ref,
                self.levels.last().unwrap()
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if !(self.tau0 > 0.0) {
            return Err(Error::InvalidConfig("tau0 must be positive".into()));
        }
        Ok(self)
    }

    /// Parses a TOML configuration file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    /// Parses a TOML configuration string.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        raw.into_case()
    }

    /// Built-in benchmark cases. Names: `example1` .. `example5`, with a
    /// `-swapped` suffix for the interchanged material variants (except
    /// `example4`, which has a single parameter set).
    pub fn builtin(name: &str) -> Result<Self> {
        let circle = LevelSet::circle(Vec2::new(0.0, 0.0), 0.6)?;
        let ellipse = LevelSet::ellipse(Vec2::new(0.0, 0.0), 0.6, 0.3)?;
        // Straight line y = 0.5 x - 0.2, plus side above.
        let line = LevelSet::line(-0.5, 1.0, 0.2)?;
        let five_circles = LevelSet::circles(vec![
            Circle { center: Vec2::new(0.0, 0.0), radius: 0.26 },
            Circle { center: Vec2::new(0.5, 0.5), radius: 0.19 },
            Circle { center: Vec2::new(-0.5, 0.5), radius: 0.19 },
            Circle { center: Vec2::new(-0.5, -0.5), radius: 0.19 },
            Circle { center: Vec2::new(0.5, -0.5), radius: 0.19 },
        ])?;

        // lambda = 5 mu (nu ~ 0.417) for the compressible cases,
        // lambda = 5000 mu (nu ~ 0.4999) for the nearly incompressible one.
        let compressible = LameField::new(0.5, 2.5, 5.0, 25.0)?;
        let compressible_swapped = LameField::new(5.0, 25.0, 0.5, 2.5)?;
        let multi = LameField::new(1.0, 2.0, 30.0, 36.0)?;
        let incompressible = LameField::new(0.5, 2500.0, 5.0, 25000.0)?;
        let incompressible_swapped = LameField::new(5.0, 25000.0, 0.5, 2500.0)?;

        let (interface, materials) = match name {
            "example1" => (circle, compressible),
            "example1-swapped" => (circle, compressible_swapped),
            "example2" => (ellipse, compressible),
            "example2-swapped" => (ellipse, compressible_swapped),
            "example3" => (line, compressible),
            "example3-swapped" => (line, compressible_swapped),
            "example4" => (five_circles, multi),
            "example5" => (line, incompressible),
            "example5-swapped" => (line, incompressible_swapped),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown built-in case '{other}' (expected example1..example5, \
                     optionally with -swapped)"
                )))
            }
        };
        CaseConfig {
            levels: vec![16, 32, 64, 128],
            n_ref: 256,
            n: None,
            interface,
            materials,
            tau0: 1.0,
            tau_scaling: TauScaling::MuScaled,
            m: 6,
            tol: 1e-9,
            shift: 0.0,
            seed: 42,
            max_iter: 500,
            output_dir: PathBuf::from("out"),
        }
        .validate()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: RawDomain,
    interface: RawInterface,
    materials: RawMaterials,
    #[serde(default)]
    stabilization: RawStabilization,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    #[serde(default)]
    levels: Option<Vec<usize>>,
    #[serde(default)]
    n_ref: Option<usize>,
    #[serde(default)]
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterface {
    kind: String,
    #[serde(default)]
    center: Option<[f64; 2]>,
    #[serde(default)]
    radius: Option<f64>,
    /// Ellipse semi-axis / line coefficient, depending on `kind`.
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default)]
    c: Option<f64>,
    #[serde(default)]
    circles: Option<Vec<RawCircle>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    center: [f64; 2],
    radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterials {
    #[serde(default)]
    mu_minus: Option<f64>,
    #[serde(default)]
    mu_plus: Option<f64>,
    #[serde(default)]
    lambda_minus: Option<f64>,
    #[serde(default)]
    lambda_plus: Option<f64>,
    #[serde(default)]
    e_minus: Option<f64>,
    #[serde(default)]
    e_plus: Option<f64>,
    #[serde(default)]
    nu_minus: Option<f64>,
    #[serde(default)]
    nu_plus: Option<f64>,
    #[serde(default)]
    rho_minus: Option<f64>,
    #[serde(default)]
    rho_plus: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStabilization {
    #[serde(default)]
    tau0: Option<f64>,
    /// `"mu"` (default) or `"constant"`.
    #[serde(default)]
    scaling: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    shift: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    max_iter: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    dir: Option<String>,
}

impl RawConfig {
    fn into_case(self) -> Result<CaseConfig> {
        let interface = self.interface.into_level_set()?;
        let materials = self.materials.into_field()?;
        let tau_scaling = match self.stabilization.scaling.as_deref() {
            None | Some("mu") => TauScaling::MuScaled,
            Some("constant") => TauScaling::Constant,
            Some(other) => {
                return Err(Error::InvalidConfig(format!(
                    "unknown stabilization scaling '{other}' (expected 'mu' or 'constant')"
                )))
            }
        };
        CaseConfig {
            levels: self.domain.levels.unwrap_or_else(|| vec![16, 32, 64, 128]),
            n_ref: self.domain.n_ref.unwrap_or(256),
            n: self.domain.n,
            interface,
            materials,
            tau0: self.stabilization.tau0.unwrap_or(1.0),
            tau_scaling,
            m: self.solver.m.unwrap_or(6),
            tol: self.solver.tol.unwrap_or(1e-9),
            shift: self.solver.shift.unwrap_or(0.0),
            seed: self.solver.seed.unwrap_or(42),
            max_iter: self.solver.max_iter.unwrap_or(500),
            output_dir: PathBuf::from(self.output.dir.unwrap_or_else(|| "out".into())),
        }
        .validate()
    }
}

impl RawInterface {
    fn into_level_set(self) -> Result<LevelSet> {
        let center = Vec2::from(self.center.unwrap_or([0.0, 0.0]));
        match self.kind.as_str() {
            "none" => Ok(LevelSet::None),
            "circle" => LevelSet::circle(
                center,
                self.radius
                    .ok_or_else(|| Error::InvalidConfig("circle requires 'radius'".into()))?,
            ),
            "ellipse" => LevelSet::ellipse(
                center,
                self.a
                    .ok_or_else(|| Error::InvalidConfig("ellipse requires semi-axis 'a'".into()))?,
                self.b
                    .ok_or_else(|| Error::InvalidConfig("ellipse requires semi-axis 'b'".into()))?,
            ),
            "line" => LevelSet::line(
                self.a
                    .ok_or_else(|| Error::InvalidConfig("line requires coefficient 'a'".into()))?,
                self.b
                    .ok_or_else(|| Error::InvalidConfig("line requires coefficient 'b'".into()))?,
                self.c.unwrap_or(0.0),
            ),
            "circles" => {
                let circles = self
                    .circles
                    .ok_or_else(|| Error::InvalidConfig("circles requires a 'circles' list".into()))?
                    .into_iter()
                    .map(|c| Circle {
                        center: Vec2::from(c.center),
                        radius: c.radius,
                    })
                    .collect();
                LevelSet::circles(circles)
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown interface kind '{other}' (expected none, circle, ellipse, line, circles)"
            ))),
        }
    }
}

impl RawMaterials {
    fn into_field(self) -> Result<LameField> {
        let lame = [self.mu_minus, self.mu_plus, self.lambda_minus, self.lambda_plus];
        let young = [self.e_minus, self.e_plus, self.nu_minus, self.nu_plus];
        let field = if lame.iter().all(Option::is_some) {
            LameField::new(
                self.mu_minus.unwrap(),
                self.lambda_minus.unwrap(),
                self.mu_plus.unwrap(),
                self.lambda_plus.unwrap(),
            )?
        } else if young.iter().all(Option::is_some) {
            LameField::from_young_poisson(
                self.e_minus.unwrap(),
                self.nu_minus.unwrap(),
                self.e_plus.unwrap(),
                self.nu_plus.unwrap(),
            )?
        } else {
            return Err(Error::InvalidConfig(
                "materials require either (mu_minus, mu_plus, lambda_minus, lambda_plus) \
                 or (e_minus, nu_minus, e_plus, nu_plus)"
                    .into(),
            ));
        };
        match (self.rho_minus, self.rho_plus) {
            (None, None) => Ok(field),
            (rm, rp) => LameField::with_density(
                field.mu_minus,
                field.lambda_minus,
                field.mu_plus,
                field.lambda_plus,
                rm.unwrap_or(1.0),
                rp.unwrap_or(1.0),
            ),
        }
    }
}

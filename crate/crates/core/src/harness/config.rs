//! TOML problem description. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::BoundaryClosure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub junction: JunctionConfig,
    /// One entry per branch, or a single entry used on every branch.
    pub hamiltonians: Vec<HamiltonianConfig>,
    pub junction_function: JunctionFunctionConfig,
    pub initial: InitialConfig,
    pub grid: GridConfig,
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub vertex: Option<VertexConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionConfig {
    pub branches: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// `scale (p - center)^2 + offset`
    Quadratic,
    /// `scale |p - center| + offset`
    Abs,
    /// `max(-2p, p^2)`
    Asymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: HamiltonianKind,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
    /// Use `p -> H(-p)` instead of `H`.
    #[serde(default)]
    pub reflect: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JunctionFunctionKind {
    FluxLimited,
    Custom,
}

/// A limiter given as a number, `"-inf"`, or `"a0"` (the minimal limiter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LimiterValue {
    Number(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionFunctionConfig {
    #[serde(rename = "type")]
    pub kind: JunctionFunctionKind,
    #[serde(rename = "A", default)]
    pub limiter: Option<LimiterValue>,
    /// `negative_sum` or `exponential` for custom functions.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Zero,
    /// `slope * |z|`
    Cone,
    /// `max(0, height - slope * |z - center|)`
    Tent,
    /// `height + slope * z`
    Affine,
    /// Piecewise-linear interpolation of `points`, constant beyond the ends.
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    #[serde(default = "one")]
    pub slope: f64,
    #[serde(default = "one")]
    pub height: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub points: Option<Vec<[f64; 2]>>,
    /// Two branches read as one line: branch 2 sees `z = -x`.
    #[serde(default)]
    pub line: bool,
    /// Declared Lipschitz constant; must not be below the computed one.
    #[serde(default)]
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub dx: Option<f64>,
    #[serde(default)]
    pub dx_list: Option<Vec<f64>>,
    #[serde(default = "default_safety")]
    pub cfl_safety: f64,
    #[serde(default = "default_closure")]
    pub boundary_closure: BoundaryClosure,
    /// Branch length; computed from the cone of influence when absent.
    #[serde(default)]
    pub length: Option<f64>,
}

fn default_safety() -> f64 {
    0.9
}

fn default_closure() -> BoundaryClosure {
    BoundaryClosure::FrozenGradient
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    /// Hopf-Lax when the problem is a glued line, reference otherwise.
    Auto,
    HopfLax,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: f64,
    pub radius: f64,
    #[serde(default = "default_oracle")]
    pub oracle: OracleChoice,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    /// Steps between CSV snapshots of `solve`; `0` keeps only the endpoints.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn default_oracle() -> OracleChoice {
    OracleChoice::Auto
}

fn default_refinement() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexConfig {
    pub gamma: f64,
    pub radius: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(rename = "A", default)]
    pub limiter: Option<LimiterValue>,
}

fn default_samples() -> usize {
    10_000
}

impl ProblemConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.junction.branches;
        if n == 0 {
            return Err(Error::Config("junction.branches must be at least 1".into()));
        }
        if self.hamiltonians.len() != 1 && self.hamiltonians.len() != n {
            return Err(Error::Config(format!(
                "expected 1 or {n} hamiltonians, got {}",
                self.hamiltonians.len()
            )));
        }
        for h in &self.hamiltonians {
            if !(h.scale > 0.0) || !h.center.is_finite() || !h.offset.is_finite() {
                return Err(Error::Config(format!("invalid hamiltonian parameters {h:?}")));
            }
        }
        if self.initial.line && n != 2 {
            return Err(Error::Config("initial.line needs exactly two branches".into()));
        }
        if self.initial.kind == InitialKind::Table {
            match &self.initial.points {
                Some(p) if !p.is_empty() => {
                    if p.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                        return Err(Error::Config("table points must have strictly increasing abscissae".into()));
                    }
                }
                _ => return Err(Error::Config("table initial datum needs points".into())),
            }
        }
        let g = &self.grid;
        if !(g.cfl_safety > 0.0 && g.cfl_safety <= 1.0) {
            return Err(Error::Config(format!("grid.cfl_safety must lie in (0, 1], got {}", g.cfl_safety)));
        }
        if let Some(dx) = g.dx {
            if !(dx > 0.0) {
                return Err(Error::Config(format!("grid.dx must be positive, got {dx}")));
            }
        }
        if let Some(list) = &g.dx_list {
            if list.iter().any(|d| !(*d > 0.0)) {
                return Err(Error::Config("grid.dx_list entries must be positive".into()));
            }
        }
        let e = &self.experiment;
        if !(e.horizon >= 0.0) || !e.horizon.is_finite() {
            return Err(Error::Config(format!("experiment.horizon must be non-negative, got {}", e.horizon)));
        }
        if !(e.radius > 0.0) || !e.radius.is_finite() {
            return Err(Error::Config(format!("experiment.radius must be positive, got {}", e.radius)));
        }
        if e.refinement < 8 {
            return Err(Error::Config("experiment.refinement must be at least 8".into()));
        }
        Ok(())
    }

    /// `grid.dx`, or the first entry of `grid.dx_list`.
    pub fn primary_dx(&self) -> Result<f64> {
        self.grid
            .dx
            .or_else(|| self.grid.dx_list.as_ref().and_then(|l| l.first().copied()))
            .ok_or_else(|| Error::Config("grid.dx or grid.dx_list is required".into()))
    }

    /// `grid.dx_list`, checked to be strictly decreasing with at least 3 rows.
    pub fn dx_list(&self) -> Result<Vec<f64>> {
        let list = self
            .grid
            .dx_list
            .clone()
            .ok_or_else(|| Error::Config("grid.dx_list is required".into()))?;
        if list.len() < 3 {
            return Err(Error::Config(format!(
                "a convergence study needs at least 3 grid entries, got {}",
                list.len()
            )));
        }
        if list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("grid.dx_list must be strictly decreasing".into()));
        }
        Ok(list)
    }
}

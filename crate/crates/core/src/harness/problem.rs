//! A fully built problem: Hamiltonians, junction function and initial datum.

use std::sync::Arc;

use crate::conditions::{compute_a0, FluxLimitedF, GeneralF, JunctionFunction, LowerInverse};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Side};
use crate::junction::{sample_initial, Grid, GridField, Junction, JunctionPoint};
use crate::numerics::box_sup;
use crate::scheme::{stability_constant, BoundaryClosure, Scheme};

use super::config::{
    HamiltonianConfig, HamiltonianKind, InitialConfig, InitialKind, JunctionFunctionKind, LimiterValue, ProblemConfig,
};

/// A Lipschitz function of one real variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    Cone { slope: f64 },
    Tent { height: f64, slope: f64, center: f64 },
    Affine { height: f64, slope: f64 },
    Table(Vec<(f64, f64)>),
}

impl Profile {
    pub fn from_config(c: &InitialConfig) -> Result<Self> {
        Ok(match c.kind {
            InitialKind::Zero => Profile::Zero,
            InitialKind::Cone => Profile::Cone { slope: c.slope },
            InitialKind::Tent => {
                if !(c.slope > 0.0) {
                    return Err(Error::Config(format!("tent slope must be positive, got {}", c.slope)));
                }
                Profile::Tent {
                    height: c.height,
                    slope: c.slope,
                    center: c.center,
                }
            }
            InitialKind::Affine => Profile::Affine {
                height: c.height,
                slope: c.slope,
            },
            InitialKind::Table => {
                let pts = c
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::Config("table initial datum needs points".into()))?;
                Profile::Table(pts.iter().map(|p| (p[0], p[1])).collect())
            }
        })
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Cone { slope } => slope * z.abs(),
            Profile::Tent { height, slope, center } => (height - slope * (z - center).abs()).max(0.0),
            Profile::Affine { height, slope } => height + slope * z,
            Profile::Table(pts) => {
                let (first, last) = (pts[0], pts[pts.len() - 1]);
                if z <= first.0 {
                    return first.1;
                }
                if z >= last.0 {
                    return last.1;
                }
                let k = pts.partition_point(|p| p.0 <= z);
                let (a, b) = (pts[k - 1], pts[k]);
                a.1 + (b.1 - a.1) * (z - a.0) / (b.0 - a.0)
            }
        }
    }

    /// Points where the profile may fail to be differentiable.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Zero | Profile::Affine { .. } => vec![],
            Profile::Cone { .. } => vec![0.0],
            Profile::Tent { height, slope, center } => {
                if *height > 0.0 {
                    vec![center - height / slope, *center, center + height / slope]
                } else {
                    vec![]
                }
            }
            Profile::Table(pts) => pts.iter().map(|p| p.0).collect(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Cone { slope } | Profile::Affine { slope, .. } => slope.abs(),
            Profile::Tent { height, slope, .. } => {
                if *height > 0.0 {
                    *slope
                } else {
                    0.0
                }
            }
            Profile::Table(pts) => pts
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }
}

fn build_hamiltonian(c: &HamiltonianConfig) -> Result<Hamiltonian> {
    let h = match c.kind {
        HamiltonianKind::Quadratic => Hamiltonian::quadratic(c.center, c.scale, c.offset)?,
        HamiltonianKind::Abs => Hamiltonian::abs_value(c.center, c.scale, c.offset)?,
        HamiltonianKind::Asymmetric => Hamiltonian::asymmetric(),
    };
    Ok(if c.reflect { h.reflected() } else { h })
}

fn resolve_limiter(v: &Option<LimiterValue>, a0: f64) -> Result<f64> {
    match v {
        None => Ok(a0),
        Some(LimiterValue::Number(a)) if !a.is_nan() => Ok(*a),
        Some(LimiterValue::Named(s)) if s == "-inf" => Ok(f64::NEG_INFINITY),
        Some(LimiterValue::Named(s)) if s.eq_ignore_ascii_case("a0") => Ok(a0),
        Some(other) => Err(Error::Config(format!("invalid limiter {other:?}"))),
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    config: ProblemConfig,
    junction: Junction,
    hamiltonian_configs: Vec<HamiltonianConfig>,
    hamiltonians: Vec<Hamiltonian>,
    f: Arc<dyn JunctionFunction>,
    limiter: Option<f64>,
    profile: Profile,
    l0: f64,
}

impl Problem {
    pub fn from_config(config: ProblemConfig) -> Result<Self> {
        config.validate()?;
        let n = config.junction.branches;
        let junction = Junction::new(n).map_err(|e| Error::Config(e.to_string()))?;
        let hamiltonian_configs: Vec<HamiltonianConfig> = if config.hamiltonians.len() == 1 {
            vec![config.hamiltonians[0].clone(); n]
        } else {
            config.hamiltonians.clone()
        };
        let hamiltonians = hamiltonian_configs
            .iter()
            .map(build_hamiltonian)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Config(e.to_string()))?;
        let a0 = compute_a0(&hamiltonians);
        let jf = &config.junction_function;
        let (f, limiter): (Arc<dyn JunctionFunction>, Option<f64>) = match jf.kind {
            JunctionFunctionKind::FluxLimited => {
                let a = resolve_limiter(&jf.limiter, a0)?;
                let f = FluxLimitedF::new(a, hamiltonians.clone()).map_err(|e| Error::Config(e.to_string()))?;
                (Arc::new(f), a.is_finite().then_some(a))
            }
            JunctionFunctionKind::Custom => {
                let weights = jf.weights.clone().unwrap_or_else(|| vec![1.0; n]);
                if weights.len() != n {
                    return Err(Error::Config(format!("expected {n} weights, got {}", weights.len())));
                }
                let f = match jf.name.as_deref() {
                    Some("negative_sum") => GeneralF::negative_sum(weights, jf.offset),
                    Some("exponential") => GeneralF::exponential(weights, jf.offset),
                    other => return Err(Error::Config(format!("unknown custom junction function {other:?}"))),
                }
                .map_err(|e| Error::Config(e.to_string()))?;
                (Arc::new(f), None)
            }
        };
        let profile = Profile::from_config(&config.initial)?;
        let computed = profile.lipschitz();
        let l0 = match config.initial.lipschitz {
            Some(l) if l + 1e-12 < computed => {
                return Err(Error::Config(format!(
                    "declared Lipschitz constant {l} is below the datum's {computed}"
                )))
            }
            Some(l) => l,
            None => computed,
        };
        Ok(Self {
            config,
            junction,
            hamiltonian_configs,
            hamiltonians,
            f,
            limiter,
            profile,
            l0,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_config(ProblemConfig::from_toml_str(text)?)
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.config
    }

    pub fn junction(&self) -> Junction {
        self.junction
    }

    pub fn hamiltonians(&self) -> &[Hamiltonian] {
        &self.hamiltonians
    }

    pub fn junction_function(&self) -> &Arc<dyn JunctionFunction> {
        &self.f
    }

    /// The flux limiter when the junction function is `F_A` with finite `A`.
    pub fn limiter(&self) -> Option<f64> {
        self.limiter
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn lipschitz(&self) -> f64 {
        self.l0
    }

    pub fn horizon(&self) -> f64 {
        self.config.experiment.horizon
    }

    pub fn radius(&self) -> f64 {
        self.config.experiment.radius
    }

    pub fn cfl_safety(&self) -> f64 {
        self.config.grid.cfl_safety
    }

    pub fn closure(&self) -> BoundaryClosure {
        self.config.grid.boundary_closure
    }

    /// Line coordinate of a junction point in the glued-line reading.
    pub fn line_coordinate(&self, x: JunctionPoint) -> f64 {
        if self.config.initial.line && x.branch == 1 {
            -x.coordinate
        } else {
            x.coordinate
        }
    }

    pub fn u0(&self, x: JunctionPoint) -> f64 {
        self.profile.eval(self.line_coordinate(x))
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<GridField> {
        sample_initial(grid, |x| self.u0(x))
    }

    /// Scheme on `grid` together with the sampled initial datum.
    pub fn scheme(&self, grid: &Grid) -> Result<(Scheme, GridField)> {
        let u0 = self.initial_field(grid)?;
        let s = Scheme::new(&u0, self.hamiltonians.clone(), self.f.clone(), self.closure())?;
        Ok((s, u0))
    }

    pub fn stability_constant(&self) -> f64 {
        stability_constant(self.l0, &self.hamiltonians, self.f.as_ref(), self.limiter)
    }

    /// Upper bound for the CFL speed of any grid: gradients stay in the
    /// sublevel sets of `C0 + 1`.
    pub fn speed_bound(&self) -> f64 {
        let level = self.stability_constant() + 1.0;
        let upper: Vec<f64> = self.hamiltonians.iter().map(|h| h.inverse(Side::Plus, level)).collect();
        let hs = self
            .hamiltonians
            .iter()
            .zip(&upper)
            .map(|(h, &hi)| h.sup_abs_deriv(h.inverse(Side::Minus, level), hi))
            .fold(0.0, f64::max);
        let LowerInverse { thresholds, feasible } = self.f.lower_inverse(level, Some(&upper));
        let fs = if feasible {
            let box_: Vec<(f64, f64)> = thresholds.iter().zip(&upper).map(|(&l, &u)| (l.min(u), u)).collect();
            box_sup(|p| self.f.neg_divergence(p), &box_, 17).0
        } else {
            0.0
        };
        hs.max(fs)
    }

    /// Branch length that keeps the boundary outside the numerical domain of
    /// dependence of the diagnostic window, rounded up to a multiple of `dx`.
    pub fn truncation_length(&self, dx: f64) -> f64 {
        if let Some(l) = self.config.grid.length {
            return l;
        }
        let r = self.radius();
        let reach = self.horizon() * 1.2 * self.speed_bound() / self.cfl_safety();
        let l = (r + reach + 2.0 * dx).max(r / 0.9);
        (l / dx - 1e-9).ceil() * dx
    }

    pub fn grid(&self, dx: f64, length: f64) -> Result<Grid> {
        let i_max = ((length / dx) - 1e-9).ceil().max(1.0) as usize;
        Grid::new(self.junction, dx, i_max)
    }

    /// The whole-line Hamiltonian when the problem is a glued line with
    /// `A <= A0` and branch 2 carrying `p -> H(-p)`.
    pub fn line_hamiltonian(&self) -> Option<Hamiltonian> {
        if !self.config.initial.line || self.hamiltonians.len() != 2 {
            return None;
        }
        if self.config.junction_function.kind != JunctionFunctionKind::FluxLimited {
            return None;
        }
        let a0 = compute_a0(&self.hamiltonians);
        if let Some(a) = self.limiter {
            if a > a0 {
                return None;
            }
        }
        let (c1, c2) = (&self.hamiltonian_configs[0], &self.hamiltonian_configs[1]);
        let mut flipped = c1.clone();
        flipped.reflect = !c1.reflect;
        let even = c1.kind != HamiltonianKind::Asymmetric && c1.center == 0.0;
        let matches = *c2 == flipped || (even && c2.kind == c1.kind && c2.scale == c1.scale && c2.offset == c1.offset);
        (matches && self.hamiltonians[0].convexity_modulus().is_some()).then(|| self.hamiltonians[0].clone())
    }
}

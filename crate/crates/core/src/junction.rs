//! Junction geometry: `N` half-lines glued at a common origin, the uniform
//! grid on it, and grid fields that store the origin value exactly once.

use crate::error::{Error, Result};

/// `N` branches sharing the origin. Branches are indexed `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Junction {
    num_branches: usize,
}

impl Junction {
    pub fn new(num_branches: usize) -> Result<Self> {
        if num_branches == 0 {
            return Err(Error::InvalidArgument("a junction needs at least one branch".into()));
        }
        Ok(Self { num_branches })
    }

    pub fn num_branches(&self) -> usize {
        self.num_branches
    }

    pub fn point(&self, branch: usize, coordinate: f64) -> Result<JunctionPoint> {
        if branch >= self.num_branches {
            return Err(Error::InvalidArgument(format!(
                "branch {branch} out of range for a junction with {} branches",
                self.num_branches
            )));
        }
        JunctionPoint::new(branch, coordinate)
    }
}

/// A point `x` on branch `branch` at distance `coordinate` from the origin.
#[derive(Debug, Clone, Copy)]
pub struct JunctionPoint {
    pub branch: usize,
    pub coordinate: f64,
}

impl JunctionPoint {
    pub fn new(branch: usize, coordinate: f64) -> Result<Self> {
        if !(coordinate >= 0.0) || !coordinate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "junction coordinate must be finite and non-negative, got {coordinate}"
            )));
        }
        Ok(Self { branch, coordinate })
    }

    pub fn origin() -> Self {
        Self { branch: 0, coordinate: 0.0 }
    }

    pub fn is_origin(&self) -> bool {
        self.coordinate == 0.0
    }
}

/// Points at the origin are identified regardless of their branch label.
impl PartialEq for JunctionPoint {
    fn eq(&self, other: &Self) -> bool {
        (self.is_origin() && other.is_origin())
            || (self.branch == other.branch && self.coordinate == other.coordinate)
    }
}

/// Geodesic distance on the junction.
pub fn geodesic_distance(junction: &Junction, x: JunctionPoint, y: JunctionPoint) -> Result<f64> {
    for p in [x, y] {
        if p.branch >= junction.num_branches() {
            return Err(Error::InvalidArgument(format!(
                "point on branch {} does not belong to a junction with {} branches",
                p.branch,
                junction.num_branches()
            )));
        }
    }
    Ok(distance(x, y))
}

pub(crate) fn distance(x: JunctionPoint, y: JunctionPoint) -> f64 {
    if x.branch == y.branch {
        (x.coordinate - y.coordinate).abs()
    } else {
        x.coordinate + y.coordinate
    }
}

/// Uniform grid `x_i = i * dx`, `i = 0..=i_max`, on every branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    junction: Junction,
    dx: f64,
    i_max: usize,
}

impl Grid {
    pub fn new(junction: Junction, dx: f64, i_max: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {dx}")));
        }
        if i_max == 0 {
            return Err(Error::InvalidArgument("each branch needs at least one node besides the origin".into()));
        }
        Ok(Self { junction, dx, i_max })
    }

    /// Grid whose branches are truncated at `length`, rounded to the nearest
    /// whole number of cells.
    pub fn with_length(junction: Junction, dx: f64, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidArgument(format!("branch length must be positive, got {length}")));
        }
        let i_max = (length / dx).round().max(1.0) as usize;
        Self::new(junction, dx, i_max)
    }

    pub fn junction(&self) -> &Junction {
        &self.junction
    }

    pub fn num_branches(&self) -> usize {
        self.junction.num_branches()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn length(&self) -> f64 {
        self.i_max as f64 * self.dx
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn point(&self, branch: usize, i: usize) -> JunctionPoint {
        JunctionPoint {
            branch,
            coordinate: self.coordinate(i),
        }
    }
}

/// Values on every grid node. The origin is stored once; `branch_values[a]`
/// holds nodes `i = 1..=i_max` of branch `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    origin_value: f64,
    branch_values: Vec<Vec<f64>>,
}

impl GridField {
    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            origin_value: value,
            branch_values: vec![vec![value; grid.i_max()]; grid.num_branches()],
        }
    }

    pub fn from_parts(grid: Grid, origin_value: f64, branch_values: Vec<Vec<f64>>) -> Result<Self> {
        if branch_values.len() != grid.num_branches()
            || branch_values.iter().any(|b| b.len() != grid.i_max())
        {
            return Err(Error::InvalidArgument("branch arrays do not match the grid shape".into()));
        }
        Ok(Self {
            grid,
            origin_value,
            branch_values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn origin(&self) -> f64 {
        self.origin_value
    }

    pub fn set_origin(&mut self, value: f64) {
        self.origin_value = value;
    }

    /// Value at node `(branch, i)`; `i = 0` reads the shared origin.
    #[inline]
    pub fn get(&self, branch: usize, i: usize) -> f64 {
        if i == 0 {
            self.origin_value
        } else {
            self.branch_values[branch][i - 1]
        }
    }

    /// Writes node `(branch, i)`; writing `i = 0` updates the origin seen from
    /// every branch.
    #[inline]
    pub fn set(&mut self, branch: usize, i: usize, value: f64) {
        if i == 0 {
            self.origin_value = value;
        } else {
            self.branch_values[branch][i - 1] = value;
        }
    }

    pub fn branch(&self, branch: usize) -> &[f64] {
        &self.branch_values[branch]
    }

    pub fn branch_mut(&mut self, branch: usize) -> &mut [f64] {
        &mut self.branch_values[branch]
    }

    /// All stored values, origin first.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.origin_value).chain(self.branch_values.iter().flatten().copied())
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Forward difference `(U_{i+1} - U_i) / dx` on `branch`, for `i < i_max`.
    #[inline]
    pub fn forward_gradient(&self, branch: usize, i: usize) -> f64 {
        (self.get(branch, i + 1) - self.get(branch, i)) / self.grid.dx()
    }

    /// Applies `f` node by node, producing a field on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            origin_value: f(self.origin_value),
            branch_values: self
                .branch_values
                .iter()
                .map(|b| b.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// Largest absolute nodewise difference with another field on the same grid.
    pub fn sup_distance(&self, other: &GridField) -> f64 {
        self.values()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples `u0` at every grid node.
pub fn sample_initial(grid: &Grid, u0: impl Fn(JunctionPoint) -> f64) -> Result<GridField> {
    let origin = u0(JunctionPoint::origin());
    if !origin.is_finite() {
        return Err(Error::Data(format!("initial datum is not finite at the origin ({origin})")));
    }
    let mut branches = Vec::with_capacity(grid.num_branches());
    for a in 0..grid.num_branches() {
        let start = u0(JunctionPoint { branch: a, coordinate: 0.0 });
        if start != origin {
            return Err(Error::Data(format!(
                "initial datum is multi-valued at the origin: branch {a} gives {start}, expected {origin}"
            )));
        }
        let mut values = Vec::with_capacity(grid.i_max());
        for i in 1..=grid.i_max() {
            let v = u0(grid.point(a, i));
            if !v.is_finite() {
                return Err(Error::Data(format!("initial datum is not finite at branch {a}, node {i} ({v})")));
            }
            values.push(v);
        }
        branches.push(values);
    }
    GridField::from_parts(*grid, origin, branches)
}

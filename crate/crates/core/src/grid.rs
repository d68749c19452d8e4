//! Symmetric uniform grids on `[-a, a]` and sampled functions living on them.

use num_complex::Complex64;

use crate::error::{Result, TransmutantError};
use crate::quadrature;

type C = Complex64;

/// Uniform grid on `[-a, a]` with an odd number of nodes, so `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(TransmutantError::invalid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n_points.is_multiple_of(2) || n_points < 3 {
            return Err(TransmutantError::invalid(format!(
                "node count must be odd and at least 3, got {n_points}"
            )));
        }
        let center = (n_points - 1) / 2;
        Ok(Self {
            half_width,
            n_points,
            spacing: half_width / center as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the origin.
    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Index of `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.n_points - 1 - i
    }

    pub fn node(&self, i: usize) -> f64 {
        let c = self.center();
        if i == 0 {
            -self.half_width
        } else if i == self.n_points - 1 {
            self.half_width
        } else {
            (i as f64 - c as f64) * self.spacing
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `x`, if `x` is one (to within a relative 1e-9 of the spacing).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let pos = (x + self.half_width) / self.spacing;
        let idx = pos.round();
        if idx < 0.0 || idx > (self.n_points - 1) as f64 || (pos - idx).abs() > 1e-9 {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width * (1.0 + 1e-12)
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self.n_points != other.n_points
            || (self.half_width - other.half_width).abs() > 1e-12 * self.half_width
        {
            return Err(TransmutantError::invalid(format!(
                "{what}: grid mismatch ({} nodes on a = {} vs {} nodes on a = {})",
                self.n_points, self.half_width, other.n_points, other.half_width
            )));
        }
        Ok(())
    }
}

/// Complex samples of a function at every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    grid: Grid,
    values: Vec<C>,
}

impl Samples {
    pub fn new(grid: Grid, values: Vec<C>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(TransmutantError::invalid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(TransmutantError::invalid(format!(
                "non-finite sample at x = {}",
                grid.node(i)
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<C>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C::new(f(x), 0.0))
    }

    pub fn constant(grid: Grid, value: C) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C> {
        self.values
    }

    pub fn at(&self, i: usize) -> C {
        self.values[i]
    }

    /// Value at the origin.
    pub fn at_origin(&self) -> C {
        self.values[self.grid.center()]
    }

    pub fn map(&self, f: impl Fn(C) -> C) -> Samples {
        Samples {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Samples, f: impl Fn(C, C) -> C) -> Samples {
        debug_assert_eq!(self.grid.len(), other.grid.len());
        Samples {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: C) -> Samples {
        self.map(|v| v * factor)
    }

    /// Samples of `x ↦ u(-x)`.
    pub fn reflect(&self) -> Samples {
        let mut values = self.values.clone();
        values.reverse();
        Samples {
            grid: self.grid,
            values,
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - other` over all nodes.
    pub fn max_diff(&self, other: &Samples) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self - other` over nodes `margin..n-margin`.
    pub fn max_diff_interior(&self, other: &Samples, margin: usize) -> f64 {
        let n = self.values.len();
        (margin..n - margin)
            .map(|i| (self.values[i] - other.values[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl std::ops::Add for &Samples {
    type Output = Samples;
    fn add(self, rhs: &Samples) -> Samples {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &Samples {
    type Output = Samples;
    fn sub(self, rhs: &Samples) -> Samples {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl std::ops::Mul for &Samples {
    type Output = Samples;
    fn mul(self, rhs: &Samples) -> Samples {
        self.zip_map(rhs, |a, b| a * b)
    }
}

pub fn make_grid(half_width: f64, n_points: usize) -> Result<Grid> {
    Grid::new(half_width, n_points)
}

/// `F(x_i) = ∫_{x0}^{x_i} u(s) ds` with `F(x0) = 0` exactly.
pub fn cumulative_integral(u: &Samples, x0: f64) -> Result<Samples> {
    let origin = u
        .grid
        .node_index(x0)
        .ok_or_else(|| TransmutantError::invalid(format!("x0 = {x0} is not a grid node")))?;
    Ok(cumulative_from(u, origin))
}

pub(crate) fn cumulative_from(u: &Samples, origin: usize) -> Samples {
    Samples {
        grid: u.grid,
        values: quadrature::cumulative(&u.values, u.grid.spacing, origin),
    }
}

/// Local four-point cubic interpolation; exact at nodes.
pub fn interpolate(u: &Samples, x: f64) -> Result<C> {
    let grid = &u.grid;
    if !grid.contains(x) {
        return Err(TransmutantError::OutOfDomain {
            x,
            half_width: grid.half_width,
        });
    }
    let n = grid.len();
    let pos = ((x + grid.half_width) / grid.spacing).clamp(0.0, (n - 1) as f64);
    let base = pos.floor();
    if pos == base {
        return Ok(u.values[base as usize]);
    }
    let base = base as usize;
    let start = base.saturating_sub(1).min(n - 4);
    let xs: Vec<f64> = (start..start + 4).map(|i| i as f64).collect();
    Ok(quadrature::lagrange(&xs, &u.values[start..start + 4], pos))
}

/// Centered second differences inside, one-sided second-order formulas at the ends.
pub fn second_derivative(u: &Samples) -> Samples {
    let v = &u.values;
    let n = v.len();
    let inv = 1.0 / (u.grid.spacing * u.grid.spacing);
    let mut out = vec![C::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        out[i] = (v[i - 1] - v[i] * 2.0 + v[i + 1]) * inv;
    }
    out[0] = (v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) * inv;
    let m = n - 1;
    out[m] = (v[m] * 2.0 - v[m - 1] * 5.0 + v[m - 2] * 4.0 - v[m - 3]) * inv;
    Samples {
        grid: u.grid,
        values: out,
    }
}

/// Fourth-order first derivative.
pub fn first_derivative(u: &Samples) -> Samples {
    Samples {
        grid: u.grid,
        values: quadrature::derivative4(&u.values, u.grid.spacing),
    }
}

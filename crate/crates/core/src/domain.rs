//! Dirichlet grids, sampled complex functions, reflection, parity splitting and
//! quadrature.
//!
//! Grid endpoints are the well walls and are never nodes; every function
//! vanishes there by convention. Two node layouts are supported:
//!
//! * [`GridMap::Uniform`]: equally spaced nodes `x_j = lo + j·h`.
//! * [`GridMap::Stretched`]: equally spaced computational nodes `y_j` on
//!   `(-y_max, y_max)` mapped through `x = (2L/π)·gd(y)` (Gudermannian), which
//!   accumulates nodes exponentially close to the walls at `±L`. Wavefunctions
//!   behaving like `t^(1+iq)` at distance `t` from a wall become smooth
//!   exponentials in `y`.
//!
//! All derivative and quadrature machinery works in the computational
//! coordinate and applies the mapping's Jacobian.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::closed_form::ClosedFormFunction;
use crate::error::{Error, Result};

/// Default half-width of the computational interval for stretched grids.
pub const DEFAULT_Y_MAX: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridMap {
    Uniform,
    Stretched { y_max: f64 },
}

#[derive(Clone, Debug)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n_interior: usize,
    map: GridMap,
    spacing: f64,
    nodes: Vec<f64>,
    computational: Vec<f64>,
    jacobian: Vec<f64>,
    // (d²x/dy²) / (dx/dy)
    jacobian_log_deriv: Vec<f64>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.n_interior == other.n_interior && self.map == other.map
    }
}

fn check_count(n_interior: usize) -> Result<()> {
    if n_interior < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 interior nodes, got {n_interior}")));
    }
    if n_interior.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "interior node count must be odd so that x = 0 is a node, got {n_interior}"
        )));
    }
    Ok(())
}

/// Equally spaced points strictly inside `(lo, hi)`, mirrored exactly when the
/// interval is symmetric.
fn interior_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n + 1) as f64;
    let mut pts: Vec<f64> = (1..=n).map(|j| lo + j as f64 * h).collect();
    if lo == -hi {
        let mid = n / 2;
        pts[mid] = 0.0;
        for j in 0..mid {
            pts[n - 1 - j] = -pts[j];
        }
    }
    pts
}

impl Grid {
    /// Uniform grid on `(lo, hi)` with `n_interior` nodes.
    pub fn new(lo: f64, hi: f64, n_interior: usize) -> Result<Arc<Grid>> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidGrid(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        check_count(n_interior)?;
        let nodes = interior_points(lo, hi, n_interior);
        Ok(Arc::new(Grid {
            lo,
            hi,
            n_interior,
            map: GridMap::Uniform,
            spacing: (hi - lo) / (n_interior + 1) as f64,
            computational: nodes.clone(),
            nodes,
            jacobian: vec![1.0; n_interior],
            jacobian_log_deriv: vec![0.0; n_interior],
        }))
    }

    /// Uniform grid on `(-half_width, half_width)`.
    pub fn symmetric(half_width: f64, n_interior: usize) -> Result<Arc<Grid>> {
        Grid::new(-half_width, half_width, n_interior)
    }

    /// Uniform grid on the unit-width well `(-π/2, π/2)`.
    pub fn well(n_interior: usize) -> Result<Arc<Grid>> {
        Grid::symmetric(FRAC_PI_2, n_interior)
    }

    /// Wall-clustered grid on `(-half_width, half_width)`.
    pub fn stretched(half_width: f64, n_interior: usize, y_max: f64) -> Result<Arc<Grid>> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        if !(y_max.is_finite() && y_max > 0.0) {
            return Err(Error::InvalidGrid(format!("y_max must be positive, got {y_max}")));
        }
        check_count(n_interior)?;
        let scale = half_width / FRAC_PI_2;
        let computational = interior_points(-y_max, y_max, n_interior);
        let mut nodes: Vec<f64> = computational.iter().map(|&y| scale * y.sinh().atan()).collect();
        let mid = n_interior / 2;
        nodes[mid] = 0.0;
        for j in 0..mid {
            nodes[n_interior - 1 - j] = -nodes[j];
        }
        let jacobian = computational.iter().map(|&y| scale / y.cosh()).collect();
        let jacobian_log_deriv = computational.iter().map(|&y| -y.tanh()).collect();
        Ok(Arc::new(Grid {
            lo: -half_width,
            hi: half_width,
            n_interior,
            map: GridMap::Stretched { y_max },
            spacing: 2.0 * y_max / (n_interior + 1) as f64,
            nodes,
            computational,
            jacobian,
            jacobian_log_deriv,
        }))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn map(&self) -> GridMap {
        self.map
    }

    /// Spacing of the computational coordinate (equal to the physical spacing
    /// on uniform grids).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    pub fn computational_nodes(&self) -> &[f64] {
        &self.computational
    }

    /// `dx/dy` at each node.
    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    /// `dx/dy` at an arbitrary computational coordinate.
    pub fn jacobian_at(&self, y: f64) -> f64 {
        match self.map {
            GridMap::Uniform => 1.0,
            GridMap::Stretched { .. } => self.hi / FRAC_PI_2 / y.cosh(),
        }
    }

    /// `(d²x/dy²)/(dx/dy)` at each node.
    pub fn jacobian_log_deriv(&self) -> &[f64] {
        &self.jacobian_log_deriv
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    pub fn center_index(&self) -> usize {
        self.n_interior / 2
    }

    /// Largest `|x_j + x_{n-1-j}|` over mirrored node pairs.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n_interior;
        (0..n).map(|j| (self.nodes[j] + self.nodes[n - 1 - j]).abs()).fold(0.0, f64::max)
    }
}

/// A complex function sampled at the interior nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGridFunction {
    grid: Arc<Grid>,
    values: Vec<C64>,
}

impl ComplexGridFunction {
    pub fn from_values(grid: &Arc<Grid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_interior() {
            return Err(Error::LengthMismatch { expected: grid.n_interior(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFiniteSample { index, x: grid.node(index) });
        }
        Ok(ComplexGridFunction { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::from_values(grid, grid.nodes().iter().map(|&x| f(x)).collect())
    }

    /// Wraps values without the finiteness check.
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_interior());
        ComplexGridFunction { grid, values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ComplexGridFunction { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.n_interior()] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &ComplexGridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    fn zip_with(&self, other: &ComplexGridFunction, op: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(ComplexGridFunction { grid: self.grid.clone(), values })
    }

    pub fn add(&self, other: &ComplexGridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexGridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ComplexGridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexGridFunction { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn real_part(&self) -> Self {
        self.map(|v| C64::new(v.re, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.map(|v| C64::new(v.im, 0.0))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm restricted to nodes at least `margin` nodes away from both walls.
    pub fn sup_norm_interior(&self, margin: usize) -> f64 {
        let n = self.values.len();
        if 2 * margin >= n {
            return 0.0;
        }
        self.values[margin..n - margin].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_distance(&self, other: &ComplexGridFunction) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

/// Even and odd parts of a grid function about `x = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityParts {
    pub even: ComplexGridFunction,
    pub odd: ComplexGridFunction,
}

/// Samples `f` at every interior node.
pub fn sample(f: &ClosedFormFunction, grid: &Arc<Grid>) -> Result<ComplexGridFunction> {
    ComplexGridFunction::from_fn(grid, |x| f.eval(x))
}

/// `u(x) ↦ u(-x)`, realized as index reversal.
pub fn reflect(u: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    if !u.grid().is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let mut values = u.values().to_vec();
    values.reverse();
    Ok(ComplexGridFunction { grid: u.grid().clone(), values })
}

pub fn parity_decompose(u: &ComplexGridFunction) -> Result<ParityParts> {
    let r = reflect(u)?;
    let even = u.zip_with(&r, |a, b| (a + b) * 0.5)?;
    let odd = u.zip_with(&r, |a, b| (a - b) * 0.5)?;
    Ok(ParityParts { even, odd })
}

/// Composite Simpson approximation of `∫ u dx` over `[lo, hi]`, with the
/// Dirichlet convention supplying zeros at both walls.
pub fn quadrature(u: &ComplexGridFunction) -> C64 {
    let g = u.grid();
    let sum: C64 = u
        .values()
        .iter()
        .zip(g.jacobian())
        .enumerate()
        .map(|(j, (&v, &jac))| {
            // node j is point j + 1 of the closed rule; odd points carry weight 4
            let w = if j % 2 == 0 { 4.0 } else { 2.0 };
            v * (w * jac)
        })
        .sum();
    sum * (g.spacing() / 3.0)
}

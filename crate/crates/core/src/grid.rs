//! Uniform periodic grids and the node-centered fields that live on them.

use crate::error::{Error, Result};
use crate::postprocess::IndicatorMask;

/// Uniform N×N periodic mesh on a square box.
///
/// Node `(i, j)` sits at `origin + (i·h, j·h)` with `h = length / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    n: usize,
    origin: [f64; 2],
    length: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, origin: [f64; 2], length: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "grid size must be even and at least 4, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("box length must be positive, got {length}")));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::InvalidInput("box origin must be finite".into()));
        }
        Ok(Self { n, origin, length })
    }

    /// Box `[-L/2, L/2]²`.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::new(n, [-0.5 * length, -0.5 * length], length)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Area element ΔxΔy.
    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h * h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.h();
        [self.origin[0] + i as f64 * h, self.origin[1] + j as f64 * h]
    }

    /// Wraps a (possibly negative) integer index into `0..n`.
    #[inline]
    pub fn wrap(&self, i: i64) -> usize {
        i.rem_euclid(self.n as i64) as usize
    }

    /// Minimum-image displacement `a - b` on the periodic box.
    #[inline]
    pub fn periodic_delta(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        d - self.length * (d / self.length).round()
    }
}

/// Real samples on every node of a grid, stored with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec(grid: PeriodicGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            for i in 0..n {
                let [x, y] = grid.node(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Discrete integral ΔxΔy·Σ f.
    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().sum::<f64>()
    }

    /// Periodic inner product Σ a·b (no area weight).
    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    /// `self += c·other`.
    pub fn axpy(&mut self, c: f64, other: &ScalarField) {
        debug_assert_eq!(self.grid, other.grid);
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += c * b);
    }

    pub fn add_constant(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v += c);
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, values }
    }

    /// Bilinear sample at an arbitrary point, periodically wrapped.
    pub fn bilinear(&self, p: [f64; 2]) -> f64 {
        let g = &self.grid;
        let h = g.h();
        let sx = (p[0] - g.origin[0]) / h;
        let sy = (p[1] - g.origin[1]) / h;
        let fx = sx.floor();
        let fy = sy.floor();
        let (tx, ty) = (sx - fx, sy - fy);
        let i0 = g.wrap(fx as i64);
        let j0 = g.wrap(fy as i64);
        let i1 = g.wrap(fx as i64 + 1);
        let j1 = g.wrap(fy as i64 + 1);
        (1.0 - tx) * (1.0 - ty) * self.at(i0, j0)
            + tx * (1.0 - ty) * self.at(i1, j0)
            + (1.0 - tx) * ty * self.at(i0, j1)
            + tx * ty * self.at(i1, j1)
    }
}

/// Two scalar components on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl VectorField {
    pub fn new(u: ScalarField, v: ScalarField) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::InvalidInput("vector components live on different grids".into()));
        }
        Ok(Self { u, v })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { u: ScalarField::zeros(grid), v: ScalarField::zeros(grid) }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        Self {
            u: ScalarField::from_fn(grid, |x, y| f(x, y)[0]),
            v: ScalarField::from_fn(grid, |x, y| f(x, y)[1]),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.u.grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn axpy(&mut self, c: f64, other: &VectorField) {
        self.u.axpy(c, &other.u);
        self.v.axpy(c, &other.v);
    }

    pub fn scale(&mut self, c: f64) {
        self.u.scale(c);
        self.v.scale(c);
    }
}

/// Scaled discrete norms of an error field over a masked region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// L1, L2 and L∞ norms over the masked nodes, with the sums normalized by the
/// masked area so that a constant `c` has every norm equal to `|c|`.
pub fn masked_norms(err: &ScalarField, mask: &IndicatorMask) -> Result<Norms> {
    if err.grid() != mask.grid() {
        return Err(Error::InvalidInput("mask and field grids differ".into()));
    }
    norms_over(err.values(), mask.inside())
}

pub(crate) fn norms_over(values: &[f64], select: &[bool]) -> Result<Norms> {
    let mut count = 0usize;
    let (mut s1, mut s2, mut m) = (0.0f64, 0.0f64, 0.0f64);
    for (v, &keep) in values.iter().zip(select) {
        if keep {
            count += 1;
            let a = v.abs();
            s1 += a;
            s2 += a * a;
            m = m.max(a);
        }
    }
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    // With |Ω| ≈ ΔxΔy·count the area elements cancel.
    let c = count as f64;
    Ok(Norms { l1: s1 / c, l2: (s2 / c).sqrt(), linf: m })
}

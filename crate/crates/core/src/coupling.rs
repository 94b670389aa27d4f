//! Regularized delta kernels and the Eulerian–Lagrangian coupling operators.
//!
//! `S` spreads boundary densities onto the grid, `S*` interpolates grid
//! fields onto the boundary. With `δ_h(x) = φ(x/h)φ(y/h)/h²` the pair is
//! adjoint: `ΔxΔy⟨SF, u⟩ = ⟨F, S*u⟩_Δs`.

use crate::boundary::ImmersedBoundary;
use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, ScalarField, VectorField};
use crate::ops::DiffOps;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Peskin's four-point function, support radius 2.
    Peskin4,
    /// Six-point B-spline, support radius 3.
    BSpline6,
}

impl KernelKind {
    pub fn support_radius(self) -> usize {
        match self {
            KernelKind::Peskin4 => 2,
            KernelKind::BSpline6 => 3,
        }
    }
}

/// One-dimensional kernel profile φ(r).
pub fn phi(r: f64, kind: KernelKind) -> f64 {
    let r = r.abs();
    match kind {
        KernelKind::Peskin4 => {
            if r <= 1.0 {
                (3.0 - 2.0 * r + (1.0 + 4.0 * r - 4.0 * r * r).sqrt()) / 8.0
            } else if r < 2.0 {
                (5.0 - 2.0 * r - (-7.0 + 12.0 * r - 4.0 * r * r).max(0.0).sqrt()) / 8.0
            } else {
                0.0
            }
        }
        KernelKind::BSpline6 => {
            let r2 = r * r;
            let r3 = r2 * r;
            let r4 = r3 * r;
            let r5 = r4 * r;
            if r <= 1.0 {
                11.0 / 20.0 - r2 / 2.0 + r4 / 4.0 - r5 / 12.0
            } else if r <= 2.0 {
                17.0 / 40.0 + 5.0 * r / 8.0 - 7.0 * r2 / 4.0 + 5.0 * r3 / 4.0 - 3.0 * r4 / 8.0 + r5 / 24.0
            } else if r < 3.0 {
                81.0 / 40.0 - 27.0 * r / 8.0 + 9.0 * r2 / 4.0 - 3.0 * r3 / 4.0 + r4 / 8.0 - r5 / 120.0
            } else {
                0.0
            }
        }
    }
}

/// Boundary-vector density stored as separate component arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVector {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BoundaryVector {
    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: [f64; 2]) -> Self {
        Self { x: vec![c[0]; n], y: vec![c[1]; n] }
    }

    pub fn from_fn(points: &[[f64; 2]], f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let (x, y) = points.iter().map(|p| { let v = f(p[0], p[1]); (v[0], v[1]) }).unzip();
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `[x…, y…]` layout used by the Krylov solvers.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }

    pub fn from_flat(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self { x: v[..n].to_vec(), y: v[n..2 * n].to_vec() }
    }
}

/// Precomputed kernel stencils for one boundary on one grid.
///
/// Construction evaluates φ once per (point, stencil offset); every
/// subsequent spread or interpolation is a weighted gather/scatter.
#[derive(Debug, Clone)]
pub struct Coupling {
    grid: PeriodicGrid,
    kind: KernelKind,
    width: usize,
    n_ib: usize,
    ix: Vec<usize>,
    iy: Vec<usize>,
    /// φ((x_node − X)/h)/h per stencil column/row.
    wx: Vec<f64>,
    wy: Vec<f64>,
    ds: Vec<f64>,
    normals: Vec<[f64; 2]>,
}

impl Coupling {
    pub fn new(b: &ImmersedBoundary, grid: &PeriodicGrid, kind: KernelKind) -> Result<Self> {
        let rad = kind.support_radius();
        if grid.n() < 2 * rad + 1 {
            return Err(Error::InvalidInput(format!(
                "grid of {} points cannot hold a kernel of radius {rad}",
                grid.n()
            )));
        }
        let width = 2 * rad;
        let h = grid.h();
        let [ox, oy] = grid.origin();
        let n_ib = b.len();
        let mut ix = Vec::with_capacity(n_ib * width);
        let mut iy = Vec::with_capacity(n_ib * width);
        let mut wx = Vec::with_capacity(n_ib * width);
        let mut wy = Vec::with_capacity(n_ib * width);
        for p in b.points() {
            let sx = (p[0] - ox) / h;
            let sy = (p[1] - oy) / h;
            let bx = sx.floor() as i64 - rad as i64 + 1;
            let by = sy.floor() as i64 - rad as i64 + 1;
            for k in 0..width as i64 {
                ix.push(grid.wrap(bx + k));
                wx.push(phi((bx + k) as f64 - sx, kind) / h);
                iy.push(grid.wrap(by + k));
                wy.push(phi((by + k) as f64 - sy, kind) / h);
            }
        }
        Ok(Self {
            grid: *grid,
            kind,
            width,
            n_ib,
            ix,
            iy,
            wx,
            wy,
            ds: b.weights().to_vec(),
            normals: b.normals().to_vec(),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn n_ib(&self) -> usize {
        self.n_ib
    }

    pub fn weights(&self) -> &[f64] {
        &self.ds
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    /// Accumulates `Σ_i dens[i]·Δs_i·δ_h(x − X_i)` into `out`, in point order.
    pub(crate) fn spread_into(&self, dens: &[f64], out: &mut [f64]) {
        let n = self.grid.n();
        let w = self.width;
        for p in 0..self.n_ib {
            let c = dens[p] * self.ds[p];
            if c == 0.0 {
                continue;
            }
            let o = p * w;
            for b in 0..w {
                let row = self.iy[o + b] * n;
                let cy = c * self.wy[o + b];
                for a in 0..w {
                    out[row + self.ix[o + a]] += cy * self.wx[o + a];
                }
            }
        }
    }

    /// `S F`.
    pub fn spread(&self, f: &[f64]) -> ScalarField {
        let mut out = vec![0.0; self.grid.len()];
        self.spread_into(f, &mut out);
        ScalarField::from_vec(self.grid, out)
    }

    pub fn spread_vector(&self, f: &BoundaryVector) -> VectorField {
        VectorField { u: self.spread(&f.x), v: self.spread(&f.y) }
    }

    pub(crate) fn interpolate_values(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let w = self.width;
        let area = self.grid.cell_area();
        (0..self.n_ib)
            .map(|p| {
                let o = p * w;
                let mut acc = 0.0;
                for b in 0..w {
                    let row = self.iy[o + b] * n;
                    let mut s = 0.0;
                    for a in 0..w {
                        s += u[row + self.ix[o + a]] * self.wx[o + a];
                    }
                    acc += s * self.wy[o + b];
                }
                acc * area
            })
            .collect()
    }

    /// `S* u`.
    pub fn interpolate(&self, u: &ScalarField) -> Vec<f64> {
        self.interpolate_values(u.values())
    }

    pub fn interpolate_vector(&self, u: &VectorField) -> BoundaryVector {
        BoundaryVector { x: self.interpolate(&u.u), y: self.interpolate(&u.v) }
    }

    /// `S̃Q = ∇·(S(Q n))` with the divergence of `ops`' scheme.
    pub fn spread_dipole(&self, ops: &DiffOps, q: &[f64]) -> ScalarField {
        let (qx, qy) = self.times_normal(q);
        ops.divergence(&VectorField { u: self.spread(&qx), v: self.spread(&qy) })
    }

    /// `(Q n_x, Q n_y)`.
    pub(crate) fn times_normal(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        q.iter().zip(&self.normals).map(|(q, n)| (q * n[0], q * n[1])).unzip()
    }

    /// Components `(A11, A12, A22)` of `A = Q nᵀ + n Qᵀ` and `Q·n`.
    pub(crate) fn tensor_components(&self, q: &BoundaryVector) -> ([Vec<f64>; 3], Vec<f64>) {
        let m = self.n_ib;
        let mut a11 = Vec::with_capacity(m);
        let mut a12 = Vec::with_capacity(m);
        let mut a22 = Vec::with_capacity(m);
        let mut qn = Vec::with_capacity(m);
        for i in 0..m {
            let [nx, ny] = self.normals[i];
            let (qx, qy) = (q.x[i], q.y[i]);
            a11.push(2.0 * qx * nx);
            a12.push(qx * ny + qy * nx);
            a22.push(2.0 * qy * ny);
            qn.push(qx * nx + qy * ny);
        }
        ([a11, a12, a22], qn)
    }

    /// `(μ∇·(S A), S(Q·n))` for the Stokes double layer.
    pub fn spread_tensor_dipole(&self, ops: &DiffOps, q: &BoundaryVector, mu: f64) -> (VectorField, ScalarField) {
        let ([a11, a12, a22], qn) = self.tensor_components(q);
        let s11 = self.spread(&a11);
        let s12 = self.spread(&a12);
        let s22 = self.spread(&a22);
        let mut dx = ops.divergence(&VectorField { u: s11, v: s12.clone() });
        let mut dy = ops.divergence(&VectorField { u: s12, v: s22 });
        dx.scale(mu);
        dy.scale(mu);
        (VectorField { u: dx, v: dy }, self.spread(&qn))
    }
}

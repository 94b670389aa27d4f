//! Reference data for tests and benchmarks: dense assembly of matrix-free
//! operators and closed-form solutions with their forcing and boundary data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::krylov::{DenseOperator, LinearOperator};

/// Largest operator [`assemble_dense`] will materialize.
pub const DENSE_LIMIT: usize = 4096;

/// Column `j` is `op·e_j`.
pub fn assemble_dense(op: &dyn LinearOperator) -> Result<DenseOperator> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { dim: n, limit: DENSE_LIMIT });
    }
    let mut a = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            a[i * n + j] = col[i];
        }
    }
    Ok(DenseOperator { n, a })
}

impl DenseOperator {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.a)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.a.iter().zip(&other.a).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.to_matrix().complex_eigenvalues().iter().copied().collect()
    }

    /// 2-norm condition number from the singular values (∞ when singular).
    pub fn condition_number(&self) -> f64 {
        let s = self.to_matrix().singular_values();
        let max = s.max();
        let min = s.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Modified Bessel function `I₂(r)` by its ascending series, summed until a
/// term drops below `1e-16` of the partial sum.
pub fn bessel_i2(r: f64) -> f64 {
    let z = 0.25 * r * r;
    let mut term = z / 2.0;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= z / (k * (k + 2.0));
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            return sum;
        }
    }
}

/// Closed-form solutions used by the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticSolution {
    /// `u = I₂(r) sin 2θ / I₂(R)` solving `Δu − u = 0`; R is the boundary radius.
    BesselHelmholtz { radius: f64 },
    /// Velocity `(e^{sin x} cos y, −cos x e^{sin x} sin y)`, pressure `e^{cos y}`
    /// for `Δu − u − ∇p = g`.
    BrinkmanManufactured,
    /// `u = sin(πx/2) − cos(πy/2)` for `Δu = g`.
    PoissonTrig,
    /// `u = e^{sin(2πx/L)}` for `Δu = g`.
    ExpPoisson { length: f64 },
    /// `u = x + y`.
    Linear,
    /// `u = x² − y²`; with k² = 1 the forcing is `−(x² − y²)`.
    Quadratic,
}

impl AnalyticSolution {
    /// Reaction coefficient of the PDE this solution is paired with.
    pub fn k2(&self) -> f64 {
        match self {
            Self::BesselHelmholtz { .. } | Self::BrinkmanManufactured | Self::Quadratic => 1.0,
            _ => 0.0,
        }
    }

    /// Scalar value (first velocity component for the Brinkman solution).
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::BesselHelmholtz { radius } => {
                let r = x.hypot(y);
                if r == 0.0 {
                    return 0.0;
                }
                // sin 2θ = 2xy/r²
                bessel_i2(r) * 2.0 * x * y / (r * r) / bessel_i2(radius)
            }
            Self::BrinkmanManufactured => self.velocity(x, y)[0],
            Self::PoissonTrig => (PI * x / 2.0).sin() - (PI * y / 2.0).cos(),
            Self::ExpPoisson { length } => (2.0 * PI * x / length).sin().exp(),
            Self::Linear => x + y,
            Self::Quadratic => x * x - y * y,
        }
    }

    /// `g` in `Δu − k²u = g`.
    pub fn forcing(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::BesselHelmholtz { .. } | Self::Linear => 0.0,
            Self::BrinkmanManufactured => self.vector_forcing(x, y)[0],
            Self::PoissonTrig => PI * PI / 4.0 * ((PI * y / 2.0).cos() - (PI * x / 2.0).sin()),
            Self::ExpPoisson { length } => {
                let a = 2.0 * PI / length;
                let (s, c) = (a * x).sin_cos();
                a * a * s.exp() * (c * c - s)
            }
            Self::Quadratic => -(x * x - y * y),
        }
    }

    /// `∇u`.
    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        match *self {
            Self::BesselHelmholtz { radius } => {
                // Central differences of the series would be noisy; use
                // I₂' = I₁ − 2I₂/r with I₁ from its own series.
                let r = x.hypot(y);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let (i2, di2) = (bessel_i2(r), bessel_i1(r) - 2.0 * bessel_i2(r) / r);
                let s2 = 2.0 * x * y / (r * r);
                let c2 = (x * x - y * y) / (r * r);
                let ur = di2 * s2;
                let ut = 2.0 * i2 * c2 / r;
                let (cx, sy) = (x / r, y / r);
                let scale = 1.0 / bessel_i2(radius);
                [scale * (ur * cx - ut * sy), scale * (ur * sy + ut * cx)]
            }
            Self::BrinkmanManufactured => {
                let e = x.sin().exp();
                [e * x.cos() * y.cos(), -e * y.sin()]
            }
            Self::PoissonTrig => [PI / 2.0 * (PI * x / 2.0).cos(), PI / 2.0 * (PI * y / 2.0).sin()],
            Self::ExpPoisson { length } => {
                let a = 2.0 * PI / length;
                [a * (a * x).cos() * (a * x).sin().exp(), 0.0]
            }
            Self::Linear => [1.0, 1.0],
            Self::Quadratic => [2.0 * x, -2.0 * y],
        }
    }

    /// Velocity of the Brinkman solution.
    pub fn velocity(&self, x: f64, y: f64) -> [f64; 2] {
        let e = x.sin().exp();
        [e * y.cos(), -x.cos() * e * y.sin()]
    }

    /// Pressure of the Brinkman solution.
    pub fn pressure(&self, _x: f64, y: f64) -> f64 {
        y.cos().exp()
    }

    /// `g` in `Δu − u − ∇p = g` for the Brinkman solution.
    pub fn vector_forcing(&self, x: f64, y: f64) -> [f64; 2] {
        let e = x.sin().exp();
        let (s, c) = x.sin_cos();
        [
            e * y.cos() * (c * c - s - 2.0),
            -c * e * y.sin() * (c * c - 3.0 * s - 3.0) + y.sin() * y.cos().exp(),
        ]
    }

    /// Normal derivative `∇u·n`.
    pub fn normal_derivative(&self, x: f64, y: f64, n: [f64; 2]) -> f64 {
        let g = self.gradient(x, y);
        g[0] * n[0] + g[1] * n[1]
    }
}

/// Modified Bessel function `I₁(r)` by its ascending series.
pub fn bessel_i1(r: f64) -> f64 {
    let z = 0.25 * r * r;
    let mut term = r / 2.0;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= z / (k * (k + 1.0));
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            return sum;
        }
    }
}

/// Dilute-array drag asymptote for Stokes flow through a square array of
/// cylinders at area fraction `c`.
pub fn drag_dilute(c: f64) -> f64 {
    8.0 * PI / ((1.0 / c).ln() - 1.47633597 + 2.0 * c - 1.77428264 * c * c + 4.07770444 * c.powi(3) - 4.84227402 * c.powi(4))
}

/// Dense-array drag asymptote.
pub fn drag_dense(c: f64) -> f64 {
    let cmax = PI / 4.0;
    9.0 * PI / (2.0 * 2f64.sqrt()) * (1.0 - (c / cmax).sqrt()).powf(-2.5)
}

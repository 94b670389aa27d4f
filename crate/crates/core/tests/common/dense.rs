//! Dense reference operators built from explicit kernels and a naive DFT,
//! independent of the matrix-free code paths. Shared by the oracle tests and
//! the acceptance suite.
#![allow(dead_code)]

use std::f64::consts::PI;

use ibdl_core::fluid::FluidSetup;
use ibdl_core::oracles::assemble_dense;
use ibdl_core::*;
use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64 as C;

/// Plain O(N³) two-dimensional DFT on the `j·N + i` layout; spectra are
/// stored as `kx·N + ky`.
pub struct Dft {
    n: usize,
    tw: Vec<C>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        Self { n, tw: (0..n).map(|m| C::from_polar(1.0, -2.0 * PI * m as f64 / n as f64)).collect() }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<C> {
        let n = self.n;
        // along x for every row j
        let mut a = vec![C::new(0.0, 0.0); n * n]; // a[j][kx]
        for j in 0..n {
            for kx in 0..n {
                a[j * n + kx] = (0..n).map(|i| f[j * n + i] * self.tw[(kx * i) % n]).sum();
            }
        }
        let mut out = vec![C::new(0.0, 0.0); n * n];
        for kx in 0..n {
            for ky in 0..n {
                out[kx * n + ky] = (0..n).map(|j| a[j * n + kx] * self.tw[(ky * j) % n]).sum();
            }
        }
        out
    }

    pub fn inverse(&self, s: &[C]) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![C::new(0.0, 0.0); n * n]; // a[kx][j]
        for kx in 0..n {
            for j in 0..n {
                a[kx * n + j] = (0..n).map(|ky| s[kx * n + ky] * self.tw[(ky * j) % n].conj()).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let v: C = (0..n).map(|kx| a[kx * n + j] * self.tw[(kx * i) % n].conj()).sum();
                out[j * n + i] = v.re / (n * n) as f64;
            }
        }
        out
    }
}

/// First-derivative and Laplacian symbols along one axis.
pub fn symbols(g: &PeriodicGrid, scheme: Scheme) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let h = g.h();
    let mut d = vec![0.0; n];
    let mut lap = vec![0.0; n];
    for m in 0..n {
        let s = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        let k = 2.0 * PI * s / g.length();
        match scheme {
            Scheme::Spectral => {
                d[m] = if m == n / 2 { 0.0 } else { k };
                lap[m] = -k * k;
            }
            Scheme::FiniteDifference => {
                d[m] = (k * h).sin() / h;
                lap[m] = -2.0 * (1.0 - (k * h).cos()) / (h * h);
            }
        }
    }
    // sin(π) is only ~1e-16
    d[n / 2] = 0.0;
    (d, lap)
}

/// Dense `δ_h(x_node − X_i)` for every node and point.
pub struct Kernel {
    n_nodes: usize,
    m: usize,
    delta: Vec<f64>, // [node * m + i]
    ds: Vec<f64>,
    area: f64,
}

impl Kernel {
    pub fn new(g: &PeriodicGrid, b: &ImmersedBoundary, kind: KernelKind) -> Self {
        let h = g.h();
        let l = g.length();
        let m = b.len();
        let mut delta = vec![0.0; g.len() * m];
        let wrap = |d: f64| d - l * (d / l).round();
        for j in 0..g.n() {
            for i in 0..g.n() {
                let x = g.node(i, j);
                for (p, xp) in b.points().iter().enumerate() {
                    let (dx, dy) = (wrap(x[0] - xp[0]), wrap(x[1] - xp[1]));
                    delta[g.index(i, j) * m + p] = phi(dx / h, kind) * phi(dy / h, kind) / (h * h);
                }
            }
        }
        Self { n_nodes: g.len(), m, delta, ds: b.weights().to_vec(), area: h * h }
    }

    pub fn spread(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n_nodes).map(|k| (0..self.m).map(|i| self.delta[k * self.m + i] * f[i] * self.ds[i]).sum()).collect()
    }

    pub fn interpolate(&self, u: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| (0..self.n_nodes).map(|k| self.delta[k * self.m + i] * u[k]).sum::<f64>() * self.area).collect()
    }
}

pub fn unit(len: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[j] = 1.0;
    e
}

pub fn dense_from_columns(n: usize, col: impl Fn(usize) -> Vec<f64>) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for (i, v) in col(j).into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    a
}

pub fn max_diff(a: &DMatrix<f64>, op: &dyn LinearOperator) -> f64 {
    let d = assemble_dense(op).unwrap().to_matrix();
    (a - d).abs().max()
}

pub fn circle_points(g: &PeriodicGrid, c: [f64; 2], r: f64, m: usize, o: Orientation) -> ImmersedBoundary {
    let pts = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect();
    discretize(&Shape::PointList { points: pts, normals: None }, o, g, 1.0).unwrap()
}

/// Dense `−S*L⁻¹(S̃ + ηS) + ½I` (or `−S*L⁻¹S` when `dipole` is false).
pub fn scalar_oracle(g: &PeriodicGrid, b: &ImmersedBoundary, scheme: Scheme, k2: f64, eta: f64, dipole: bool) -> DMatrix<f64> {
    let ker = Kernel::new(g, b, KernelKind::Peskin4);
    let dft = Dft::new(g.n());
    let (d, lap) = symbols(g, scheme);
    let n = g.n();
    let m = b.len();
    let normals = b.normals();
    dense_from_columns(m, |j| {
        let e = unit(m, j);
        let mut rhs = vec![C::new(0.0, 0.0); n * n];
        if dipole {
            let sx = dft.forward(&ker.spread(&e.iter().zip(normals).map(|(q, nn)| q * nn[0]).collect::<Vec<_>>()));
            let sy = dft.forward(&ker.spread(&e.iter().zip(normals).map(|(q, nn)| q * nn[1]).collect::<Vec<_>>()));
            for kx in 0..n {
                for ky in 0..n {
                    let k = kx * n + ky;
                    rhs[k] = C::new(0.0, 1.0) * (d[kx] * sx[k] + d[ky] * sy[k]);
                }
            }
        }
        if !dipole || eta != 0.0 {
            let s = dft.forward(&ker.spread(&e));
            let c = if dipole { eta } else { 1.0 };
            rhs.iter_mut().zip(&s).for_each(|(r, s)| *r += c * s);
        }
        for kx in 0..n {
            for ky in 0..n {
                let sym = lap[kx] + lap[ky] - k2;
                let k = kx * n + ky;
                rhs[k] = if sym == 0.0 { C::new(0.0, 0.0) } else { rhs[k] / sym };
            }
        }
        let u = ker.interpolate(&dft.inverse(&rhs));
        (0..m).map(|i| -u[i] + if dipole { 0.5 * e[i] } else { 0.0 }).collect()
    })
}

/// Solves `μL̂u − i d p = f̂`, `i d·u = −ŝ` mode by mode (modes where d = 0
/// carry no pressure; the zero mode of Stokes flow is dropped).
pub fn stokes_modes(d: &[f64], lap: &[f64], mu: f64, k2: f64, fx: &[C], fy: &[C], s: &[C]) -> (Vec<C>, Vec<C>) {
    let n = d.len();
    let i = C::new(0.0, 1.0);
    let z = C::new(0.0, 0.0);
    let mut ux = vec![z; n * n];
    let mut uy = vec![z; n * n];
    for kx in 0..n {
        for ky in 0..n {
            let k = kx * n + ky;
            let lk = C::new(mu * (lap[kx] + lap[ky]) - k2, 0.0);
            if lk.norm() == 0.0 {
                continue;
            }
            let (ax, ay) = (d[kx], d[ky]);
            if ax == 0.0 && ay == 0.0 {
                ux[k] = fx[k] / lk;
                uy[k] = fy[k] / lk;
                continue;
            }
            let a = Matrix3::new(lk, z, -i * ax, z, lk, -i * ay, i * ax, i * ay, z);
            let sol = a.lu().solve(&Vector3::new(fx[k], fy[k], -s[k])).unwrap();
            ux[k] = sol[0];
            uy[k] = sol[1];
        }
    }
    (ux, uy)
}

/// Dense Stokes/Brinkman double-layer operator `Q ↦ S*u[Q] + ½Q` with
/// forcing `−ηSQ − μ∇·(S(Qnᵀ + nQᵀ))` and mass source `S(Q·n)`.
pub fn stokes_ibdl_oracle(g: &PeriodicGrid, b: &ImmersedBoundary, mu: f64, k2: f64, eta: f64) -> DMatrix<f64> {
    let ker = Kernel::new(g, b, KernelKind::Peskin4);
    let dft = Dft::new(g.n());
    let (d, lap) = symbols(g, Scheme::Spectral);
    let n = g.n();
    let m = b.len();
    let nr = b.normals();
    let i = C::new(0.0, 1.0);
    dense_from_columns(2 * m, |j| {
        let e = unit(2 * m, j);
        let (qx, qy) = (&e[..m], &e[m..]);
        let comp = |f: &dyn Fn(usize) -> f64| dft.forward(&ker.spread(&(0..m).map(f).collect::<Vec<_>>()));
        let a11 = comp(&|p| 2.0 * qx[p] * nr[p][0]);
        let a12 = comp(&|p| qx[p] * nr[p][1] + qy[p] * nr[p][0]);
        let a22 = comp(&|p| 2.0 * qy[p] * nr[p][1]);
        let s = comp(&|p| qx[p] * nr[p][0] + qy[p] * nr[p][1]);
        let sqx = comp(&|p| qx[p]);
        let sqy = comp(&|p| qy[p]);
        let mut fx = vec![C::new(0.0, 0.0); n * n];
        let mut fy = fx.clone();
        for kx in 0..n {
            for ky in 0..n {
                let k = kx * n + ky;
                fx[k] = -eta * sqx[k] - mu * i * (d[kx] * a11[k] + d[ky] * a12[k]);
                fy[k] = -eta * sqy[k] - mu * i * (d[kx] * a12[k] + d[ky] * a22[k]);
            }
        }
        let (ux, uy) = stokes_modes(&d, &lap, mu, k2, &fx, &fy, &s);
        let vx = ker.interpolate(&dft.inverse(&ux));
        let vy = ker.interpolate(&dft.inverse(&uy));
        vx.iter().chain(&vy).zip(&e).map(|(v, q)| v + 0.5 * q).collect()
    })
}

/// Dense Brinkman single-layer operator `F ↦ S*u[−SF]`.
pub fn brinkman_ibsl_oracle(g: &PeriodicGrid, b: &ImmersedBoundary, mu: f64, k2: f64) -> DMatrix<f64> {
    let ker = Kernel::new(g, b, KernelKind::Peskin4);
    let dft = Dft::new(g.n());
    let (d, lap) = symbols(g, Scheme::Spectral);
    let m = b.len();
    let zero = vec![C::new(0.0, 0.0); g.len()];
    dense_from_columns(2 * m, |j| {
        let e = unit(2 * m, j);
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let fx = dft.forward(&ker.spread(&neg(&e[..m])));
        let fy = dft.forward(&ker.spread(&neg(&e[m..])));
        let (ux, uy) = stokes_modes(&d, &lap, mu, k2, &fx, &fy, &zero);
        let mut v = ker.interpolate(&dft.inverse(&ux));
        v.extend(ker.interpolate(&dft.inverse(&uy)));
        v
    })
}

pub fn scalar_solver(g: PeriodicGrid, b: &ImmersedBoundary, scheme: Scheme, k2: f64) -> ScalarSolver {
    ScalarSolver::new(g, b, scheme, KernelKind::Peskin4, k2, InterpolationConfig::Off).unwrap()
}

pub fn fluid_solver(g: PeriodicGrid, b: &ImmersedBoundary, method: Method, mu: f64, k2: f64) -> FluidSolver {
    let setup = FluidSetup {
        method,
        scheme: Scheme::Spectral,
        kernel: KernelKind::Peskin4,
        pressure_stencil: Stencil::Standard5,
        mu,
        k2,
        interpolation: InterpolationConfig::Off,
    };
    FluidSolver::new(g, b, setup).unwrap()
}


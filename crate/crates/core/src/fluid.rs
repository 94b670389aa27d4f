//! Brinkman (`k² > 0`) and Stokes (`k² = 0`) flow past immersed boundaries:
//! `μΔu − k²u − ∇p = g` in Ω, `∇·u = 0`, `u = U_b` on Γ.
//!
//! Single layer: `Lu − ∇p + SF = g̃` with F from MINRES on the projected
//! Schur complement. Double layer: `Lu − ∇p + ηSQ + μ∇·(SA) = g̃`,
//! `∇·u + S(Q·n) = 0`, `S*u + ½Q = U_b` with `A = Qnᵀ + nQᵀ`, Q from GMRES.
//!
//! All solves reduce to one Fourier-space primitive: given a force `f` and
//! a mass source `s`,
//! `p̂ = −(D·f̂ + L̂ŝ)/Λ̂`, `û = (f̂ + Dp̂)/L̂`,
//! with `L̂ = μΔ̂ − k²` and `Λ̂` the pressure Laplacian symbol.

use num_complex::Complex64 as C64;

use crate::boundary::{ImmersedBoundary, Orientation};
use crate::coupling::{BoundaryVector, Coupling, KernelKind};
use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, ScalarField, VectorField};
use crate::krylov::{gmres_from, minres, FnOperator, KrylovOptions, LinearOperator, SolveReport};
use crate::ops::{inv_or_zero, DiffOps, Scheme, Stencil};
use crate::postprocess::{compute_indicator, IndicatorMask, InterpolationConfig, InterpolationPlan};
use crate::scalar::{default_interpolation, extend_rhs, Extension};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Single layer (constraint force F).
    Ibsl,
    /// Double layer (dipole density Q).
    Ibdl,
}

#[derive(Debug, Clone)]
pub struct FluidProblem {
    pub grid: PeriodicGrid,
    pub boundary: ImmersedBoundary,
    pub mu: f64,
    /// Reaction coefficient; zero means Stokes.
    pub k2: f64,
    /// Body-force samples on every node (replaced outside Ω per `extension`).
    pub g: VectorField,
    /// Default: `Zero` for Brinkman; for Stokes `Smooth` on exterior domains
    /// (the forcing acts on the whole periodic cell) and `MeanBalance` on
    /// interior ones.
    pub extension: Option<Extension>,
    pub ub: BoundaryVector,
    /// Completion coefficient. Default: 10 on exterior domains, 0 on interior ones.
    pub eta: Option<f64>,
    pub scheme: Scheme,
    /// Default: `BSpline6` for finite-difference double layer, else `Peskin4`.
    pub kernel: Option<KernelKind>,
    /// Laplacian used for the pressure. Default: `Standard5`, except `Wide`
    /// for the finite-difference single layer (exact projection).
    pub pressure_stencil: Option<Stencil>,
    pub interpolation: Option<InterpolationConfig>,
    pub krylov: Option<KrylovOptions>,
}

impl FluidProblem {
    pub fn new(grid: PeriodicGrid, boundary: ImmersedBoundary, mu: f64, ub: BoundaryVector) -> Self {
        Self {
            grid,
            boundary,
            mu,
            k2: 0.0,
            g: VectorField::zeros(grid),
            extension: None,
            ub,
            eta: None,
            scheme: Scheme::Spectral,
            kernel: None,
            pressure_stencil: None,
            interpolation: None,
            krylov: None,
        }
    }

    pub fn resolved_kernel(&self, method: Method) -> KernelKind {
        self.kernel.unwrap_or(match (method, self.scheme) {
            (Method::Ibdl, Scheme::FiniteDifference) => KernelKind::BSpline6,
            _ => KernelKind::Peskin4,
        })
    }

    pub fn resolved_pressure_stencil(&self, method: Method) -> Stencil {
        self.pressure_stencil.unwrap_or(match (method, self.scheme) {
            (Method::Ibsl, Scheme::FiniteDifference) => Stencil::Wide,
            _ => Stencil::Standard5,
        })
    }

    pub fn resolved_eta(&self) -> f64 {
        self.eta.unwrap_or(if self.boundary.orientation() == Orientation::ExteriorIsOmega { 10.0 } else { 0.0 })
    }

    fn resolved_extension(&self) -> Extension {
        self.extension.unwrap_or(if self.k2 > 0.0 {
            Extension::Zero
        } else if self.boundary.orientation() == Orientation::ExteriorIsOmega {
            Extension::Smooth
        } else {
            Extension::MeanBalance
        })
    }
}

#[derive(Debug, Clone)]
pub struct FluidSolution {
    /// Velocity after near-boundary interpolation (raw for IBSL).
    pub velocity: VectorField,
    pub velocity_raw: VectorField,
    /// Zero-mean pressure (not trustworthy within a few meshwidths of Γ for IBDL).
    pub pressure: ScalarField,
    /// F (IBSL) or Q (IBDL).
    pub density: BoundaryVector,
    pub mean_velocity: [f64; 2],
    /// Mass source `S(Q·n)` of the double layer.
    pub source: Option<ScalarField>,
    pub report: SolveReport,
    pub mask: IndicatorMask,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceTorque {
    pub force: [f64; 2],
    pub torque: f64,
}

/// How a boundary density maps to the force exerted on the fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceModel {
    /// `B = −∫F ds`.
    Ibsl,
    /// `B = −η∫Q ds`.
    IbdlCompleted { eta: f64 },
}

/// Net force and torque (about `center`) from a boundary density by
/// arclength quadrature; `L = −c∫(X − center) × density ds`.
pub fn net_force_torque(density: &BoundaryVector, b: &ImmersedBoundary, model: ForceModel, center: [f64; 2]) -> Result<ForceTorque> {
    if density.len() != b.len() || density.y.len() != b.len() {
        return Err(Error::InvalidInput(format!("density has {} entries for {} points", density.len(), b.len())));
    }
    let c = match model {
        ForceModel::Ibsl => 1.0,
        ForceModel::IbdlCompleted { eta } => eta,
    };
    let (mut fx, mut fy, mut t) = (0.0, 0.0, 0.0);
    for (i, (p, w)) in b.points().iter().zip(b.weights()).enumerate() {
        let (qx, qy) = (density.x[i], density.y[i]);
        fx += w * qx;
        fy += w * qy;
        t += w * ((p[0] - center[0]) * qy - (p[1] - center[1]) * qx);
    }
    Ok(ForceTorque { force: [-c * fx, -c * fy], torque: -c * t })
}

/// Prepared operators for repeated fluid solves on one (grid, boundary).
pub struct FluidSolver {
    ops: DiffOps,
    coupling: Coupling,
    boundary: ImmersedBoundary,
    method: Method,
    mu: f64,
    k2: f64,
    pstencil: Stencil,
    mask: IndicatorMask,
    plan: InterpolationPlan,
    wsqrt: Vec<f64>,
}

/// Options shared by both constructors of [`FluidSolver`].
#[derive(Debug, Clone, Copy)]
pub struct FluidSetup {
    pub method: Method,
    pub scheme: Scheme,
    pub kernel: KernelKind,
    pub pressure_stencil: Stencil,
    pub mu: f64,
    pub k2: f64,
    pub interpolation: InterpolationConfig,
}

impl FluidSolver {
    pub fn new(grid: PeriodicGrid, boundary: &ImmersedBoundary, setup: FluidSetup) -> Result<Self> {
        if !(setup.mu > 0.0) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {}", setup.mu)));
        }
        if !(setup.k2 >= 0.0) {
            return Err(Error::InvalidInput(format!("k² must be nonnegative, got {}", setup.k2)));
        }
        let ops = DiffOps::new(grid, setup.scheme);
        if setup.pressure_stencil == Stencil::Wide && setup.scheme == Scheme::Spectral {
            return Err(Error::InvalidInput("wide stencil requires finite differences".into()));
        }
        let coupling = Coupling::new(boundary, &grid, setup.kernel)?;
        let mut mask = compute_indicator(boundary, &ops, setup.kernel)?;
        let interp = if setup.method == Method::Ibsl { InterpolationConfig::Off } else { setup.interpolation };
        let (m1, m2) = interp.bands(grid.n())?;
        mask.flag_near_boundary(boundary, m1);
        let plan = InterpolationPlan::new(boundary, &mask, m2)?;
        let mean = boundary.mean_weight();
        let wsqrt = boundary.weights().iter().map(|w| (w / mean).sqrt()).collect();
        Ok(Self {
            ops,
            coupling,
            boundary: boundary.clone(),
            method: setup.method,
            mu: setup.mu,
            k2: setup.k2,
            pstencil: setup.pressure_stencil,
            mask,
            plan,
            wsqrt,
        })
    }

    pub fn ops(&self) -> &DiffOps {
        &self.ops
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn mask(&self) -> &IndicatorMask {
        &self.mask
    }

    pub fn boundary(&self) -> &ImmersedBoundary {
        &self.boundary
    }

    pub fn method(&self) -> Method {
        self.method
    }

    fn n_ib(&self) -> usize {
        self.coupling.n_ib()
    }

    /// In-place map `(f̂, ŝ) → û`, optionally returning `p̂`.
    fn flow_spec(&self, fx: &mut [C64], fy: &mut [C64], s: Option<&[C64]>, want_p: bool) -> Option<Vec<C64>> {
        let n = self.ops.grid().n();
        let mut p = if want_p { Some(vec![C64::new(0.0, 0.0); n * n]) } else { None };
        let i = C64::new(0.0, 1.0);
        for kx in 0..n {
            let ax = self.ops.d1(kx);
            for ky in 0..n {
                let ay = self.ops.d1(ky);
                let k = kx * n + ky;
                let lk = self.mu * self.ops.lap_symbol(Stencil::Standard5, kx, ky) - self.k2;
                let lam = inv_or_zero(self.ops.pressure_symbol(self.pstencil, kx, ky));
                let mut num = i * (ax * fx[k] + ay * fy[k]);
                if let Some(s) = s {
                    num += lk * s[k];
                }
                let pk = -num * lam;
                let il = inv_or_zero(lk);
                fx[k] = (fx[k] + i * ax * pk) * il;
                fy[k] = (fy[k] + i * ay * pk) * il;
                if let Some(p) = p.as_mut() {
                    p[k] = pk;
                }
            }
        }
        p
    }

    /// Spectra of `(−ηSQ − μ∇·(SA), S(Q·n))` for a double-layer density.
    fn dipole_forces(&self, q: &BoundaryVector, eta: f64) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let n = self.ops.grid().n();
        let ([a11, a12, a22], _) = self.coupling.tensor_components(q);
        let spread = |d: &[f64]| {
            let mut out = vec![0.0; n * n];
            self.coupling.spread_into(d, &mut out);
            out
        };
        let (s11, s22) = (spread(&a11), spread(&a22));
        let (h11, h22) = self.ops.fft_pair(&s11, &s22);
        let h12 = self.ops.fft_real(&spread(&a12));
        let (mut fx, mut fy) = if eta != 0.0 {
            let (qx, qy) = (spread(&q.x), spread(&q.y));
            let (mut fx, mut fy) = self.ops.fft_pair(&qx, &qy);
            fx.iter_mut().for_each(|z| *z *= -eta);
            fy.iter_mut().for_each(|z| *z *= -eta);
            (fx, fy)
        } else {
            (vec![C64::new(0.0, 0.0); n * n], vec![C64::new(0.0, 0.0); n * n])
        };
        let mut s = Vec::with_capacity(n * n);
        let i = C64::new(0.0, 1.0);
        for kx in 0..n {
            let ax = self.ops.d1(kx);
            for ky in 0..n {
                let ay = self.ops.d1(ky);
                let k = kx * n + ky;
                fx[k] -= self.mu * i * (ax * h11[k] + ay * h12[k]);
                fy[k] -= self.mu * i * (ax * h12[k] + ay * h22[k]);
                s.push(0.5 * (h11[k] + h22[k]));
            }
        }
        (fx, fy, s)
    }

    /// Velocity induced by a double-layer density with no body force.
    fn ibdl_velocity(&self, q: &BoundaryVector, eta: f64) -> (Vec<f64>, Vec<f64>) {
        let (mut fx, mut fy, s) = self.dipole_forces(q, eta);
        self.flow_spec(&mut fx, &mut fy, Some(&s), false);
        self.ops.ifft_pair(&fx, &fy)
    }

    /// Velocity induced by a single-layer density with no body force.
    fn ibsl_velocity(&self, f: &BoundaryVector) -> (Vec<f64>, Vec<f64>) {
        let n = self.ops.grid().n();
        let mut sx = vec![0.0; n * n];
        let mut sy = vec![0.0; n * n];
        self.coupling.spread_into(&f.x, &mut sx);
        self.coupling.spread_into(&f.y, &mut sy);
        let (mut fx, mut fy) = self.ops.fft_pair(&sx, &sy);
        fx.iter_mut().chain(fy.iter_mut()).for_each(|z| *z = -*z);
        self.flow_spec(&mut fx, &mut fy, None, false);
        self.ops.ifft_pair(&fx, &fy)
    }

    /// `Q ↦ S*u[Q] + ½Q` on the flat `[Qx…, Qy…]` layout (no mean unknowns).
    pub fn ibdl_operator(&self, eta: f64) -> impl LinearOperator + '_ {
        let m = self.n_ib();
        FnOperator::new(2 * m, move |x, y| {
            let q = BoundaryVector::from_flat(x);
            let (ux, uy) = self.ibdl_velocity(&q, eta);
            let vx = self.coupling.interpolate_values(&ux);
            let vy = self.coupling.interpolate_values(&uy);
            for i in 0..m {
                y[i] = vx[i] + 0.5 * x[i];
                y[m + i] = vy[i] + 0.5 * x[m + i];
            }
        })
    }

    /// `F ↦ −S*L⁻¹PSF` on the flat layout.
    pub fn ibsl_operator(&self) -> impl LinearOperator + '_ {
        let m = self.n_ib();
        FnOperator::new(2 * m, move |x, y| {
            let (ux, uy) = self.ibsl_velocity(&BoundaryVector::from_flat(x));
            let vx = self.coupling.interpolate_values(&ux);
            let vy = self.coupling.interpolate_values(&uy);
            y[..m].copy_from_slice(&vx);
            y[m..].copy_from_slice(&vy);
        })
    }

    /// Velocity and pressure for body force `g` and optional double-layer
    /// sources (their spectra already folded into `fx, fy, s`).
    fn reconstruct(&self, mut fx: Vec<C64>, mut fy: Vec<C64>, s: Option<&[C64]>) -> (VectorField, ScalarField) {
        let g = *self.ops.grid();
        let p = self.flow_spec(&mut fx, &mut fy, s, true).unwrap();
        let (ux, uy) = self.ops.ifft_pair(&fx, &fy);
        let p = self.ops.ifft_real(p);
        (
            VectorField { u: ScalarField::from_vec(g, ux), v: ScalarField::from_vec(g, uy) },
            ScalarField::from_vec(g, p),
        )
    }

    fn trace_of_forcing(&self, gx: &[C64], gy: &[C64]) -> BoundaryVector {
        let (mut fx, mut fy) = (gx.to_vec(), gy.to_vec());
        self.flow_spec(&mut fx, &mut fy, None, false);
        let (ux, uy) = self.ops.ifft_pair(&fx, &fy);
        BoundaryVector { x: self.coupling.interpolate_values(&ux), y: self.coupling.interpolate_values(&uy) }
    }

    fn check_inputs(&self, g: &VectorField, ub: &BoundaryVector) -> Result<()> {
        if g.grid() != self.ops.grid() {
            return Err(Error::InvalidInput("body force lives on a different grid".into()));
        }
        if ub.len() != self.n_ib() || ub.y.len() != self.n_ib() {
            return Err(Error::InvalidInput("boundary velocity length mismatch".into()));
        }
        Ok(())
    }

    fn check_balanced(&self, g: &VectorField) -> Result<()> {
        self.ops.check_mean_zero(&g.u, Stencil::Standard5)?;
        self.ops.check_mean_zero(&g.v, Stencil::Standard5)
    }

    /// Solves with an already-extended body force `g̃`.
    pub fn solve(&self, g: &VectorField, ub: &BoundaryVector, eta: f64, opts: &KrylovOptions) -> Result<FluidSolution> {
        self.solve_with_guess(g, ub, eta, None, opts)
    }

    /// As [`solve`](Self::solve), starting the double-layer GMRES iteration
    /// from `guess` (flat `[Qx…, Qy…]`, plus ū when augmented).
    pub fn solve_with_guess(
        &self,
        g: &VectorField,
        ub: &BoundaryVector,
        eta: f64,
        guess: Option<&[f64]>,
        opts: &KrylovOptions,
    ) -> Result<FluidSolution> {
        self.check_inputs(g, ub)?;
        match self.method {
            Method::Ibsl => self.solve_ibsl(g, ub, opts),
            Method::Ibdl => self.solve_ibdl(g, ub, eta, guess, opts),
        }
    }

    fn solve_ibsl(&self, g: &VectorField, ub: &BoundaryVector, opts: &KrylovOptions) -> Result<FluidSolution> {
        let m = self.n_ib();
        let (gx, gy) = self.ops.fft_pair(g.u.values(), g.v.values());
        let tr = self.trace_of_forcing(&gx, &gy);
        let ws = &self.wsqrt;
        let mut rhs = Vec::with_capacity(2 * m + 2);
        rhs.extend((0..m).map(|i| ws[i] * (ub.x[i] - tr.x[i])));
        rhs.extend((0..m).map(|i| ws[i] * (ub.y[i] - tr.y[i])));
        let augmented = self.k2 == 0.0;
        let unweight = |x: &[f64]| BoundaryVector {
            x: (0..m).map(|i| x[i] / ws[i]).collect(),
            y: (0..m).map(|i| x[m + i] / ws[i]).collect(),
        };
        let base = |x: &[f64], y: &mut [f64]| {
            let (ux, uy) = self.ibsl_velocity(&unweight(x));
            let vx = self.coupling.interpolate_values(&ux);
            let vy = self.coupling.interpolate_values(&uy);
            for i in 0..m {
                y[i] = ws[i] * vx[i];
                y[m + i] = ws[i] * vy[i];
            }
        };
        let (f, ubar, report) = if augmented {
            let c = self.ops.grid().cell_area() / self.boundary.mean_weight();
            rhs.push(c * g.u.values().iter().sum::<f64>());
            rhs.push(c * g.v.values().iter().sum::<f64>());
            let op = FnOperator::new(2 * m + 2, |x, y| {
                base(&x[..2 * m], &mut y[..2 * m]);
                for i in 0..m {
                    y[i] += ws[i] * x[2 * m];
                    y[m + i] += ws[i] * x[2 * m + 1];
                }
                y[2 * m] = (0..m).map(|i| ws[i] * x[i]).sum();
                y[2 * m + 1] = (0..m).map(|i| ws[i] * x[m + i]).sum();
            });
            let (x, rep) = minres(&op, &rhs, opts);
            (unweight(&x[..2 * m]), [x[2 * m], x[2 * m + 1]], rep)
        } else {
            let op = FnOperator::new(2 * m, base);
            let (x, rep) = minres(&op, &rhs, opts);
            (unweight(&x), [0.0, 0.0], rep)
        };
        let n = self.ops.grid().n();
        let mut sx = vec![0.0; n * n];
        let mut sy = vec![0.0; n * n];
        self.coupling.spread_into(&f.x, &mut sx);
        self.coupling.spread_into(&f.y, &mut sy);
        let (hx, hy) = self.ops.fft_pair(&sx, &sy);
        let fx: Vec<C64> = gx.iter().zip(&hx).map(|(a, b)| a - b).collect();
        let fy: Vec<C64> = gy.iter().zip(&hy).map(|(a, b)| a - b).collect();
        let (mut vel, p) = self.reconstruct(fx, fy, None);
        vel.u.add_constant(ubar[0]);
        vel.v.add_constant(ubar[1]);
        Ok(FluidSolution {
            velocity: vel.clone(),
            velocity_raw: vel,
            pressure: p,
            density: f,
            mean_velocity: ubar,
            source: None,
            report,
            mask: self.mask.clone(),
        })
    }

    fn solve_ibdl(
        &self,
        g: &VectorField,
        ub: &BoundaryVector,
        eta: f64,
        guess: Option<&[f64]>,
        opts: &KrylovOptions,
    ) -> Result<FluidSolution> {
        if !(eta >= 0.0) {
            return Err(Error::InvalidInput(format!("η must be nonnegative, got {eta}")));
        }
        let m = self.n_ib();
        let augmented = self.k2 == 0.0 && eta > 0.0;
        if self.k2 == 0.0 && !augmented {
            self.check_balanced(g)?;
        }
        let (gx, gy) = self.ops.fft_pair(g.u.values(), g.v.values());
        let tr = self.trace_of_forcing(&gx, &gy);
        let mut rhs = Vec::with_capacity(2 * m + 2);
        rhs.extend((0..m).map(|i| ub.x[i] - tr.x[i]));
        rhs.extend((0..m).map(|i| ub.y[i] - tr.y[i]));
        let (x, report) = if augmented {
            let c = self.ops.grid().cell_area() / self.boundary.mean_weight();
            rhs.push(c * g.u.values().iter().sum::<f64>());
            rhs.push(c * g.v.values().iter().sum::<f64>());
            let wts: Vec<f64> = self.wsqrt.iter().map(|w| w * w).collect();
            let inner = self.ibdl_operator(eta);
            let op = FnOperator::new(2 * m + 2, |x, y| {
                inner.apply(&x[..2 * m], &mut y[..2 * m]);
                for i in 0..m {
                    y[i] += x[2 * m];
                    y[m + i] += x[2 * m + 1];
                }
                y[2 * m] = eta * (0..m).map(|i| wts[i] * x[i]).sum::<f64>();
                y[2 * m + 1] = eta * (0..m).map(|i| wts[i] * x[m + i]).sum::<f64>();
            });
            gmres_from(&op, &rhs, guess, opts)
        } else {
            gmres_from(&self.ibdl_operator(eta), &rhs, guess.map(|g| &g[..2 * m]), opts)
        };
        let q = BoundaryVector::from_flat(&x[..2 * m]);
        let ubar = if augmented { [x[2 * m], x[2 * m + 1]] } else { [0.0, 0.0] };
        let (dx, dy, s) = self.dipole_forces(&q, eta);
        let fx: Vec<C64> = gx.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let fy: Vec<C64> = gy.iter().zip(&dy).map(|(a, b)| a + b).collect();
        let (mut raw, p) = self.reconstruct(fx, fy, Some(&s));
        raw.u.add_constant(ubar[0]);
        raw.v.add_constant(ubar[1]);
        let velocity = VectorField { u: self.plan.apply(&raw.u, &ub.x), v: self.plan.apply(&raw.v, &ub.y) };
        let source = ScalarField::from_vec(*self.ops.grid(), self.ops.ifft_real(s));
        Ok(FluidSolution {
            velocity,
            velocity_raw: raw,
            pressure: p,
            density: q,
            mean_velocity: ubar,
            source: Some(source),
            report,
            mask: self.mask.clone(),
        })
    }

    /// Replaces the near-boundary band of `u` using boundary values `ub`.
    pub fn interpolate_near_boundary(&self, u: &VectorField, ub: &BoundaryVector) -> VectorField {
        VectorField { u: self.plan.apply(&u.u, &ub.x), v: self.plan.apply(&u.v, &ub.y) }
    }

    /// Continues `g` outside Ω.
    pub fn extend(&self, g: &VectorField, ext: Extension) -> Result<VectorField> {
        Ok(VectorField { u: extend_rhs(&g.u, &self.mask, ext)?, v: extend_rhs(&g.v, &self.mask, ext)? })
    }
}

fn prepare(p: &FluidProblem, method: Method) -> Result<(FluidSolver, VectorField, KrylovOptions)> {
    let setup = FluidSetup {
        method,
        scheme: p.scheme,
        kernel: p.resolved_kernel(method),
        pressure_stencil: p.resolved_pressure_stencil(method),
        mu: p.mu,
        k2: p.k2,
        interpolation: p.interpolation.unwrap_or_else(|| default_interpolation(p.scheme)),
    };
    let solver = FluidSolver::new(p.grid, &p.boundary, setup)?;
    let g = solver.extend(&p.g, p.resolved_extension())?;
    let opts = p.krylov.unwrap_or_else(|| KrylovOptions::for_boundary(2 * p.boundary.len()));
    Ok((solver, g, opts))
}

/// Single-layer Brinkman solve (k² > 0).
pub fn solve_ibsl_brinkman(p: &FluidProblem) -> Result<FluidSolution> {
    if !(p.k2 > 0.0) {
        return Err(Error::InvalidInput("Brinkman solve needs k² > 0".into()));
    }
    let (s, g, o) = prepare(p, Method::Ibsl)?;
    s.solve(&g, &p.ub, 0.0, &o)
}

/// Single-layer Stokes solve via the augmented `(F, ū)` system.
pub fn solve_ibsl_stokes(p: &FluidProblem) -> Result<FluidSolution> {
    if p.k2 != 0.0 {
        return Err(Error::InvalidInput("Stokes solve needs k² = 0".into()));
    }
    let (s, g, o) = prepare(p, Method::Ibsl)?;
    s.solve(&g, &p.ub, 0.0, &o)
}

/// Double-layer Brinkman or Stokes solve.
pub fn solve_ibdl_fluid(p: &FluidProblem) -> Result<FluidSolution> {
    let eta = p.resolved_eta();
    if p.k2 == 0.0 && p.boundary.orientation() == Orientation::ExteriorIsOmega && eta <= 0.0 {
        return Err(Error::InvalidInput("exterior Stokes flow needs η > 0".into()));
    }
    let (s, g, o) = prepare(p, Method::Ibdl)?;
    s.solve(&g, &p.ub, eta, &o)
}

//! Navier–Stokes flow past a fixed obstacle.
//!
//! Second-order IMEX: convection explicit, everything else implicit,
//!
//! `ρ(3uⁿ⁺¹ − 4uⁿ + uⁿ⁻¹)/(2Δt) + ρ(2uⁿ·∇uⁿ − uⁿ⁻¹·∇uⁿ⁻¹) = μΔuⁿ⁺¹ − ∇pⁿ⁺¹ + f`,
//!
//! so each step is a Brinkman solve with `k² = 3ρ/(2Δt)`. The first step is
//! backward Euler (`k² = ρ/Δt`). Flow is driven by resetting a strip of
//! columns at the left edge of the box to `(u∞, 0)` after every step.

use std::f64::consts::PI;

use crate::boundary::{discretize, ImmersedBoundary, Orientation, Shape};
use crate::coupling::{BoundaryVector, KernelKind};
use crate::error::{Error, Result};
use crate::fluid::{FluidSetup, FluidSolver, ForceTorque, Method};
use crate::grid::{PeriodicGrid, ScalarField, VectorField};
use crate::krylov::{KrylovOptions, SolveReport};
use crate::ops::{remove_divergence_null_space, DiffOps, Scheme, Stencil};
use crate::postprocess::InterpolationConfig;
use crate::scalar::Extension;

#[derive(Debug, Clone)]
pub struct NSConfig {
    pub grid: PeriodicGrid,
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
    pub u_inf: f64,
    /// Width of the inflow strip in meshwidths.
    pub strip_width: usize,
    pub obstacle: ImmersedBoundary,
    /// Length scale R in `C_D = B₁/(u∞²R)` and `St = 2Rf/u∞`.
    pub radius: f64,
    pub eta: f64,
    pub interpolation: InterpolationConfig,
    pub method: Method,
    pub scheme: Scheme,
    pub kernel: KernelKind,
    /// `[x0, x1, y0, y1]`, on grid lines, enclosing the obstacle.
    pub control_box: [f64; 4],
    pub krylov: KrylovOptions,
    /// Drop the convective terms (linear Stokes-type stepping).
    pub nonlinear: bool,
    /// Body force f (per unit volume) on the momentum equation.
    pub body_force: Option<VectorField>,
    /// Start each double-layer GMRES solve from the previous step's density.
    pub warm_start: bool,
}

impl NSConfig {
    /// Cylinder of radius 0.15 at (1.85, 4) in the periodic box [0, 8]²,
    /// u∞ = ρ = 1, Δt = 1.8·10⁻³, Δs ≈ Δx.
    pub fn cylinder(n: usize, reynolds: f64, method: Method) -> Result<Self> {
        let grid = PeriodicGrid::new(n, [0.0, 0.0], 8.0)?;
        let radius = 0.15;
        let obstacle = discretize(
            &Shape::Circle { center: [1.85, 4.0], radius },
            Orientation::ExteriorIsOmega,
            &grid,
            1.0,
        )?;
        let (rho, u_inf) = (1.0, 1.0);
        let (m1, m2) = if reynolds > 50.0 { (6.0, 8.0) } else { (3.0, 4.0) };
        Ok(Self {
            grid,
            rho,
            mu: 2.0 * radius * rho * u_inf / reynolds,
            dt: 1.8e-3,
            u_inf,
            strip_width: 4,
            obstacle,
            radius,
            eta: 10.0,
            interpolation: InterpolationConfig::Fixed { m1, m2 },
            method,
            scheme: Scheme::Spectral,
            kernel: KernelKind::Peskin4,
            control_box: [0.5, 3.203125, 2.8125, 5.1875],
            krylov: KrylovOptions::for_boundary(2 * obstacle_len(&grid, radius)),
            nonlinear: true,
            body_force: None,
            warm_start: true,
        })
    }

    pub fn reynolds(&self) -> f64 {
        2.0 * self.radius * self.rho * self.u_inf / self.mu
    }

    fn box_indices(&self) -> Result<[usize; 4]> {
        let g = &self.grid;
        let h = g.h();
        let o = g.origin();
        let [x0, x1, y0, y1] = self.control_box;
        let snap = |v: f64, o: f64| -> Result<usize> {
            let s = (v - o) / h;
            let r = s.round();
            if (s - r).abs() > 1e-9 || r < 0.0 || r >= g.n() as f64 {
                return Err(Error::Geometry(format!("control box edge {v} is not on a grid line")));
            }
            Ok(r as usize)
        };
        let idx = [snap(x0, o[0])?, snap(x1, o[0])?, snap(y0, o[1])?, snap(y1, o[1])?];
        if idx[0] >= idx[1] || idx[2] >= idx[3] {
            return Err(Error::Geometry("control box is empty".into()));
        }
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.rho > 0.0 && self.mu > 0.0) {
            return Err(Error::InvalidInput("Δt, ρ and μ must be positive".into()));
        }
        if self.obstacle.orientation() != Orientation::ExteriorIsOmega {
            return Err(Error::InvalidInput("the fluid must occupy the exterior of the obstacle".into()));
        }
        let h = self.grid.h();
        let strip_end = self.grid.origin()[0] + self.strip_width as f64 * h;
        let xmin = self.obstacle.points().iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        if self.strip_width > 0 && strip_end >= xmin {
            return Err(Error::Geometry("inflow strip overlaps the obstacle".into()));
        }
        let [x0, x1, y0, y1] = self.control_box;
        self.box_indices()?;
        let inside = |p: &[f64; 2]| p[0] > x0 && p[0] < x1 && p[1] > y0 && p[1] < y1;
        if !self.obstacle.points().iter().all(inside) {
            return Err(Error::Geometry("control box intersects the immersed boundary".into()));
        }
        if self.strip_width > 0 && x0 <= strip_end {
            return Err(Error::Geometry("control box overlaps the inflow strip".into()));
        }
        if let Some(f) = &self.body_force {
            if f.grid() != &self.grid {
                return Err(Error::InvalidInput("body force lives on a different grid".into()));
            }
        }
        Ok(())
    }
}

fn obstacle_len(grid: &PeriodicGrid, radius: f64) -> usize {
    (2.0 * PI * radius / grid.h()).round() as usize
}

#[derive(Debug, Clone)]
pub struct NSState {
    pub u_now: VectorField,
    pub u_prev: VectorField,
    pub pressure: ScalarField,
    pub time: f64,
    pub step_index: usize,
    /// Boundary density of the last solve (flat), used as a GMRES start.
    pub density: Option<Vec<f64>>,
    /// `uⁿ·∇uⁿ`, carried to the next step.
    convection: Option<VectorField>,
}

impl NSState {
    /// Fluid at rest with the inflow strip applied.
    pub fn initial(cfg: &NSConfig) -> Self {
        let u = apply_inflow_strip(&VectorField::zeros(cfg.grid), cfg);
        Self {
            u_prev: u.clone(),
            u_now: u,
            pressure: ScalarField::zeros(cfg.grid),
            time: 0.0,
            step_index: 0,
            density: None,
            convection: None,
        }
    }

    /// A state with explicit history levels (treated as past the bootstrap step).
    pub fn from_history(u_now: VectorField, u_prev: VectorField, time: f64, step_index: usize) -> Self {
        let grid = *u_now.grid();
        Self {
            u_now,
            u_prev,
            pressure: ScalarField::zeros(grid),
            time,
            step_index,
            density: None,
            convection: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    pub drag_coefficient: f64,
    pub lift_coefficient: f64,
    pub iterations: usize,
    /// `max |∇·u + S(Q·n)|/u∞` of the solver output, modulo the mean and
    /// Nyquist modes that no divergence can reach.
    pub divergence_residual: f64,
}

/// Per-step diagnostics, in time order.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    records: Vec<StepRecord>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: StepRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(r.time > last.time) {
                return Err(Error::InvalidInput(format!("time {} does not follow {}", r.time, last.time)));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Mean drag coefficient over `t0 ≤ t ≤ t1`.
    pub fn mean_drag(&self, t0: f64, t1: f64) -> Result<f64> {
        let v: Vec<f64> =
            self.records.iter().filter(|r| r.time >= t0 && r.time <= t1).map(|r| r.drag_coefficient).collect();
        if v.is_empty() {
            return Err(Error::Undefined(format!("no samples in [{t0}, {t1}]")));
        }
        Ok(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Overwrites the leftmost `strip_width` columns with `(u∞, 0)`.
pub fn apply_inflow_strip(u: &VectorField, cfg: &NSConfig) -> VectorField {
    let mut out = u.clone();
    apply_inflow_strip_in_place(&mut out, cfg.strip_width, cfg.u_inf);
    out
}

pub fn apply_inflow_strip_in_place(u: &mut VectorField, width: usize, u_inf: f64) {
    let n = u.grid().n();
    let w = width.min(n);
    for j in 0..n {
        for i in 0..w {
            u.u.values_mut()[j * n + i] = u_inf;
            u.v.values_mut()[j * n + i] = 0.0;
        }
    }
}

/// `(u·∇)u`.
fn convection(ops: &DiffOps, u: &VectorField) -> VectorField {
    let gu = ops.gradient(&u.u);
    let gv = ops.gradient(&u.v);
    let (a, b) = (u.u.values(), u.v.values());
    let cu = (0..a.len()).map(|k| a[k] * gu.u.values()[k] + b[k] * gu.v.values()[k]).collect();
    let cv = (0..a.len()).map(|k| a[k] * gv.u.values()[k] + b[k] * gv.v.values()[k]).collect();
    let g = *u.grid();
    VectorField { u: ScalarField::from_vec(g, cu), v: ScalarField::from_vec(g, cv) }
}

/// Force on the obstacle from momentum balance over the control box R:
/// `B = −∫_{R∩Ω} ρu_t + ∮_{∂R} (σ − uuᵀ)·n_R`, `σ = −pI + μ(∇u + ∇uᵀ)`.
///
/// `history` is `[uⁿ⁺¹, uⁿ, uⁿ⁻¹]` (BDF2 time derivative), `[uⁿ⁺¹, uⁿ]`
/// (backward Euler) or `[u]` (steady). `inside` flags the fluid nodes.
pub fn control_box_force(
    history: &[&VectorField],
    p: &ScalarField,
    ops: &DiffOps,
    inside: &[bool],
    cfg: &NSConfig,
) -> Result<ForceTorque> {
    if history.is_empty() || history.len() > 3 {
        return Err(Error::InvalidInput("control box force needs 1 to 3 velocity levels".into()));
    }
    let [i0, i1, j0, j1] = cfg.box_indices()?;
    let [x0, x1, y0, y1] = cfg.control_box;
    let crosses = |q: &[f64; 2]| q[0] >= x0 && q[0] <= x1 && q[1] >= y0 && q[1] <= y1;
    let pts = cfg.obstacle.points();
    if !pts.iter().all(crosses) || pts.iter().any(|q| q[0] == x0 || q[0] == x1 || q[1] == y0 || q[1] == y1) {
        return Err(Error::Geometry("control box intersects the immersed boundary".into()));
    }
    let n = ops.grid().n();
    let h = ops.grid().h();
    let u = history[0];
    let (mu, rho) = (cfg.mu, cfg.rho);

    let mut b = [0.0, 0.0];
    if history.len() > 1 {
        let dt = cfg.dt;
        let ut = |k: usize, c: usize| -> f64 {
            let f = |v: &VectorField| if c == 0 { v.u.values()[k] } else { v.v.values()[k] };
            if history.len() == 3 {
                (3.0 * f(history[0]) - 4.0 * f(history[1]) + f(history[2])) / (2.0 * dt)
            } else {
                (f(history[0]) - f(history[1])) / dt
            }
        };
        let tw = |i: usize, lo: usize, hi: usize| if i == lo || i == hi { 0.5 } else { 1.0 };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * n + i;
                if !inside[k] {
                    continue;
                }
                let w = tw(i, i0, i1) * tw(j, j0, j1) * h * h * rho;
                b[0] -= w * ut(k, 0);
                b[1] -= w * ut(k, 1);
            }
        }
    }

    let gu = ops.gradient(&u.u);
    let gv = ops.gradient(&u.v);
    let traction = |k: usize, nx: f64, ny: f64| -> [f64; 2] {
        let (ux, uy) = (gu.u.values()[k], gu.v.values()[k]);
        let (vx, vy) = (gv.u.values()[k], gv.v.values()[k]);
        let (a, c) = (u.u.values()[k], u.v.values()[k]);
        let pk = p.values()[k];
        let sxx = -pk + 2.0 * mu * ux - a * a;
        let sxy = mu * (uy + vx) - a * c;
        let syy = -pk + 2.0 * mu * vy - c * c;
        [sxx * nx + sxy * ny, sxy * nx + syy * ny]
    };
    let mut edge = |k: usize, w: f64, nx: f64, ny: f64| {
        let t = traction(k, nx, ny);
        b[0] += w * h * t[0];
        b[1] += w * h * t[1];
    };
    for i in i0..=i1 {
        let w = if i == i0 || i == i1 { 0.5 } else { 1.0 };
        edge(j0 * n + i, w, 0.0, -1.0);
        edge(j1 * n + i, w, 0.0, 1.0);
    }
    for j in j0..=j1 {
        let w = if j == j0 || j == j1 { 0.5 } else { 1.0 };
        edge(j * n + i0, w, -1.0, 0.0);
        edge(j * n + i1, w, 1.0, 0.0);
    }
    Ok(ForceTorque { force: b, torque: 0.0 })
}

/// Prepared solvers for a Navier–Stokes run.
pub struct NavierStokes {
    cfg: NSConfig,
    bootstrap: FluidSolver,
    bdf2: FluidSolver,
}

impl NavierStokes {
    pub fn new(cfg: NSConfig) -> Result<Self> {
        cfg.validate()?;
        let setup = |k2: f64| FluidSetup {
            method: cfg.method,
            scheme: cfg.scheme,
            kernel: cfg.kernel,
            pressure_stencil: match (cfg.method, cfg.scheme) {
                (Method::Ibsl, Scheme::FiniteDifference) => Stencil::Wide,
                _ => Stencil::Standard5,
            },
            mu: cfg.mu,
            k2,
            interpolation: cfg.interpolation,
        };
        let bootstrap = FluidSolver::new(cfg.grid, &cfg.obstacle, setup(cfg.rho / cfg.dt))?;
        let bdf2 = FluidSolver::new(cfg.grid, &cfg.obstacle, setup(1.5 * cfg.rho / cfg.dt))?;
        Ok(Self { cfg, bootstrap, bdf2 })
    }

    pub fn config(&self) -> &NSConfig {
        &self.cfg
    }

    /// Advances one step; step 0 is the backward-Euler bootstrap.
    pub fn step(&self, state: &NSState) -> Result<(NSState, StepRecord)> {
        let cfg = &self.cfg;
        let first = state.step_index == 0;
        let solver = if first { &self.bootstrap } else { &self.bdf2 };
        let ops = solver.ops();
        let grid = cfg.grid;
        let (rho, dt) = (cfg.rho, cfg.dt);
        let zeros = || VectorField::zeros(grid);

        let c_now = if cfg.nonlinear { convection(ops, &state.u_now) } else { zeros() };
        let c_prev = if cfg.nonlinear && !first {
            state.convection.clone().unwrap_or_else(|| convection(ops, &state.u_prev))
        } else {
            zeros()
        };
        let nn = grid.len();
        let mut gx = vec![0.0; nn];
        let mut gy = vec![0.0; nn];
        let (un, vn) = (state.u_now.u.values(), state.u_now.v.values());
        let (up, vp) = (state.u_prev.u.values(), state.u_prev.v.values());
        for k in 0..nn {
            if first {
                gx[k] = rho * (-un[k] / dt + c_now.u.values()[k]);
                gy[k] = rho * (-vn[k] / dt + c_now.v.values()[k]);
            } else {
                gx[k] = rho * ((-4.0 * un[k] + up[k]) / (2.0 * dt) + 2.0 * c_now.u.values()[k] - c_prev.u.values()[k]);
                gy[k] = rho * ((-4.0 * vn[k] + vp[k]) / (2.0 * dt) + 2.0 * c_now.v.values()[k] - c_prev.v.values()[k]);
            }
        }
        if let Some(f) = &cfg.body_force {
            gx.iter_mut().zip(f.u.values()).for_each(|(g, f)| *g -= f);
            gy.iter_mut().zip(f.v.values()).for_each(|(g, f)| *g -= f);
        }
        let g = VectorField { u: ScalarField::from_vec(grid, gx), v: ScalarField::from_vec(grid, gy) };
        let g = solver.extend(&g, Extension::Zero)?;
        let ub = BoundaryVector::zeros(cfg.obstacle.len());
        let guess = if cfg.warm_start { state.density.as_deref() } else { None };
        let fail = |reason: String| Error::StepFailed { step: state.step_index + 1, reason };
        let sol = solver.solve_with_guess(&g, &ub, cfg.eta, guess, &cfg.krylov).map_err(|e| fail(e.to_string()))?;
        check_report(&sol.report).map_err(fail)?;

        let mut div = ops.divergence(&sol.velocity_raw);
        if let Some(s) = &sol.source {
            div.axpy(1.0, s);
        }
        remove_divergence_null_space(&mut div);
        let divergence_residual = div.max_abs() / cfg.u_inf.abs().max(f64::MIN_POSITIVE);

        let mut u_next = sol.velocity;
        if !u_next.is_finite() {
            return Err(fail("non-finite velocity".into()));
        }
        apply_inflow_strip_in_place(&mut u_next, cfg.strip_width, cfg.u_inf);
        let history: Vec<&VectorField> =
            if first { vec![&u_next, &state.u_now] } else { vec![&u_next, &state.u_now, &state.u_prev] };
        let force = control_box_force(&history, &sol.pressure, ops, solver.mask().inside(), cfg)?;
        let scale = cfg.u_inf * cfg.u_inf * cfg.radius;
        let time = state.time + dt;
        let record = StepRecord {
            time,
            drag_coefficient: force.force[0] / scale,
            lift_coefficient: force.force[1] / scale,
            iterations: sol.report.iterations,
            divergence_residual,
        };
        let mut density = sol.density.to_flat();
        if let Some(g) = state.density.as_ref().filter(|g| g.len() > density.len()) {
            density.extend_from_slice(&g[density.len()..]);
        }
        let next = NSState {
            u_prev: state.u_now.clone(),
            u_now: u_next,
            pressure: sol.pressure,
            time,
            step_index: state.step_index + 1,
            density: Some(density),
            convection: if cfg.nonlinear { Some(c_now) } else { None },
        };
        Ok((next, record))
    }

    /// Runs `steps` steps from `state`, calling `observe` after each.
    pub fn run(
        &self,
        mut state: NSState,
        steps: usize,
        mut observe: impl FnMut(&NSState, &StepRecord),
    ) -> Result<(NSState, TimeSeries)> {
        let mut series = TimeSeries::new();
        for _ in 0..steps {
            let (next, rec) = self.step(&state)?;
            observe(&next, &rec);
            series.push(rec)?;
            state = next;
        }
        Ok((state, series))
    }
}

fn check_report(r: &SolveReport) -> std::result::Result<(), String> {
    if r.converged {
        Ok(())
    } else if r.stagnated {
        Err(format!("Krylov solve stagnated at relative residual {:.3e}", r.final_residual))
    } else {
        Err(format!("Krylov solve did not converge in {} iterations", r.iterations))
    }
}

/// One step with freshly prepared solvers; prefer [`NavierStokes`] for runs.
pub fn imex_step(state: &NSState, cfg: &NSConfig) -> Result<NSState> {
    Ok(NavierStokes::new(cfg.clone())?.step(state)?.0)
}

/// Strouhal number `2R f/u∞` from the lift history after `t_min`; f is the
/// reciprocal of the mean spacing of lift peaks (strict local maxima above
/// the median). Needs at least three peaks.
pub fn strouhal(series: &TimeSeries, u_inf: f64, radius: f64, t_min: f64) -> Result<f64> {
    let recs: Vec<&StepRecord> = series.records().iter().filter(|r| r.time >= t_min).collect();
    if recs.len() < 3 {
        return Err(Error::Undefined("no peaks: series too short".into()));
    }
    let mut sorted: Vec<f64> = recs.iter().map(|r| r.lift_coefficient).collect();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
    let peaks: Vec<f64> = recs
        .windows(3)
        .filter(|w| {
            let c = w[1].lift_coefficient;
            c > w[0].lift_coefficient && c > w[2].lift_coefficient && c > median
        })
        .map(|w| w[1].time)
        .collect();
    if peaks.len() < 3 {
        return Err(Error::Undefined(format!("no peaks: found {} lift maxima, need 3", peaks.len())));
    }
    let period = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    Ok(2.0 * radius / (period * u_inf))
}

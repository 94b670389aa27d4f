//! Scalar boundary value problems `(Δ − k²)u = g` in Ω with Dirichlet or
//! Neumann data on Γ, posed on the periodic box via boundary densities.
//!
//! Single layer (IBSL): `Lu + SF = g̃`, `S*u = U_b`, a first-kind system
//! for F solved with MINRES. Double layer (IBDL): `Lu + S̃Q = g̃`,
//! `S*u + ½Q = U_b`, a second-kind system for Q solved with GMRES.

use num_complex::Complex64 as C64;

use crate::boundary::{ImmersedBoundary, Orientation};
use crate::coupling::{Coupling, KernelKind};
use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, ScalarField};
use crate::krylov::{gmres, minres, FnOperator, KrylovOptions, LinearOperator, SolveReport};
use crate::ops::{inv_or_zero, DiffOps, Scheme, Stencil};
use crate::postprocess::{compute_indicator, IndicatorMask, InterpolationConfig, InterpolationPlan};

/// How the right-hand side is continued outside Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extension {
    /// `g̃ = 0` outside Ω.
    Zero,
    /// The supplied samples are used on every node.
    Smooth,
    /// Constant `g_e = −(1/|C∖Ω|)∫_Ω g` outside Ω, so that `∫_C g̃ = 0`.
    MeanBalance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet(Vec<f64>),
    /// Prescribed normal derivative `∂u/∂n` (n out of Ω).
    Neumann(Vec<f64>),
}

/// A scalar problem; `None` fields take the documented defaults.
#[derive(Debug, Clone)]
pub struct ScalarProblem {
    pub grid: PeriodicGrid,
    pub boundary: ImmersedBoundary,
    pub condition: BoundaryCondition,
    /// Reaction coefficient k² ≥ 0; zero means Poisson.
    pub k2: f64,
    /// Samples of g on every node (values outside Ω are replaced per `extension`).
    pub g: ScalarField,
    /// Default: `Zero` when k² > 0 or for Neumann data, `MeanBalance` for Poisson.
    pub extension: Option<Extension>,
    pub scheme: Scheme,
    pub kernel: KernelKind,
    /// Completion coefficient. Default: 10 for exterior Poisson, else 0.
    pub eta: Option<f64>,
    /// Default: `Fixed{6, 8}` for finite differences, `LogGrowth` for spectral.
    pub interpolation: Option<InterpolationConfig>,
    pub krylov: Option<KrylovOptions>,
}

impl ScalarProblem {
    pub fn new(grid: PeriodicGrid, boundary: ImmersedBoundary, condition: BoundaryCondition) -> Self {
        Self {
            grid,
            boundary,
            condition,
            k2: 0.0,
            g: ScalarField::zeros(grid),
            extension: None,
            scheme: Scheme::Spectral,
            kernel: KernelKind::Peskin4,
            eta: None,
            interpolation: None,
            krylov: None,
        }
    }

    fn resolved_extension(&self) -> Extension {
        // the completion term carries the net source, so only the uncompleted
        // Poisson problem needs a mean-free right-hand side
        self.extension.unwrap_or(match (&self.condition, self.k2 > 0.0) {
            (BoundaryCondition::Neumann(_), _) | (_, true) => Extension::Zero,
            _ if self.resolved_eta() > 0.0 => Extension::Zero,
            _ => Extension::MeanBalance,
        })
    }

    fn resolved_eta(&self) -> f64 {
        self.eta.unwrap_or(
            if self.k2 == 0.0 && self.boundary.orientation() == Orientation::ExteriorIsOmega { 10.0 } else { 0.0 },
        )
    }
}

pub(crate) fn default_interpolation(scheme: Scheme) -> InterpolationConfig {
    match scheme {
        Scheme::FiniteDifference => InterpolationConfig::Fixed { m1: 6.0, m2: 8.0 },
        Scheme::Spectral => InterpolationConfig::LogGrowth,
    }
}

#[derive(Debug, Clone)]
pub struct ScalarSolution {
    /// Field after near-boundary interpolation (equal to `u_raw` for IBSL).
    pub u: ScalarField,
    pub u_raw: ScalarField,
    /// F (IBSL), Q (IBDL Dirichlet) or the recovered boundary values (Neumann).
    pub density: Vec<f64>,
    /// ū for the augmented Poisson systems, 0 otherwise.
    pub mean_correction: f64,
    pub report: SolveReport,
    pub mask: IndicatorMask,
}

/// Continues `g` outside Ω according to `ext`.
pub fn extend_rhs(g: &ScalarField, mask: &IndicatorMask, ext: Extension) -> Result<ScalarField> {
    let mut out = g.clone();
    let inside = mask.inside();
    match ext {
        Extension::Smooth => {}
        Extension::Zero => {
            out.values_mut().iter_mut().zip(inside).filter(|(_, &i)| !i).for_each(|(v, _)| *v = 0.0);
        }
        Extension::MeanBalance => {
            let outside = inside.iter().filter(|&&i| !i).count();
            if outside == 0 {
                return Err(Error::InvalidInput("mean balancing needs nodes outside Ω".into()));
            }
            let s: f64 = g.values().iter().zip(inside).filter(|(_, &i)| i).map(|(v, _)| v).sum();
            let ge = -s / outside as f64;
            out.values_mut().iter_mut().zip(inside).filter(|(_, &i)| !i).for_each(|(v, _)| *v = ge);
        }
    }
    Ok(out)
}

/// Prepared operators for repeated scalar solves on one (grid, boundary).
pub struct ScalarSolver {
    ops: DiffOps,
    coupling: Coupling,
    boundary: ImmersedBoundary,
    k2: f64,
    mask: IndicatorMask,
    plan: InterpolationPlan,
    /// `sqrt(Δs_i / mean Δs)`, symmetrizing the single-layer systems.
    wsqrt: Vec<f64>,
}

impl ScalarSolver {
    pub fn new(
        grid: PeriodicGrid,
        boundary: &ImmersedBoundary,
        scheme: Scheme,
        kernel: KernelKind,
        k2: f64,
        interpolation: InterpolationConfig,
    ) -> Result<Self> {
        if !(k2 >= 0.0) {
            return Err(Error::InvalidInput(format!("k² must be nonnegative, got {k2}")));
        }
        let ops = DiffOps::new(grid, scheme);
        let coupling = Coupling::new(boundary, &grid, kernel)?;
        let mut mask = compute_indicator(boundary, &ops, kernel)?;
        let (m1, m2) = interpolation.bands(grid.n())?;
        mask.flag_near_boundary(boundary, m1);
        let plan = InterpolationPlan::new(boundary, &mask, m2)?;
        let mean = boundary.mean_weight();
        let wsqrt = boundary.weights().iter().map(|w| (w / mean).sqrt()).collect();
        Ok(Self { ops, coupling, boundary: boundary.clone(), k2, mask, plan, wsqrt })
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

    fn n_ib(&self) -> usize {
        self.coupling.n_ib()
    }

    /// Symbol of L⁻¹ (Δ₀⁻¹ when k² = 0).
    #[inline]
    fn green_symbol(&self, kx: usize, ky: usize) -> f64 {
        inv_or_zero(self.ops.lap_symbol(Stencil::Standard5, kx, ky) - self.k2)
    }

    fn green_spec(&self, s: &mut [C64]) {
        let n = self.ops.grid().n();
        for kx in 0..n {
            for ky in 0..n {
                s[kx * n + ky] *= self.green_symbol(kx, ky);
            }
        }
    }

    /// `L⁻¹ f`, dropping the mean mode when k² = 0.
    pub fn green(&self, f: &[f64]) -> Vec<f64> {
        let mut s = self.ops.fft_real(f);
        self.green_spec(&mut s);
        self.ops.ifft_real(s)
    }

    /// Spectrum of `S̃q + η S p`.
    fn sources_spec(&self, q: &[f64], eta: f64, p: &[f64]) -> Vec<C64> {
        let n = self.ops.grid().n();
        let (qx, qy) = self.coupling.times_normal(q);
        let mut sx = vec![0.0; n * n];
        let mut sy = vec![0.0; n * n];
        self.coupling.spread_into(&qx, &mut sx);
        self.coupling.spread_into(&qy, &mut sy);
        let (ax, ay) = self.ops.fft_pair(&sx, &sy);
        let mut out: Vec<C64> = Vec::with_capacity(n * n);
        for kx in 0..n {
            for ky in 0..n {
                let k = kx * n + ky;
                out.push(C64::new(0.0, self.ops.d1(kx)) * ax[k] + C64::new(0.0, self.ops.d1(ky)) * ay[k]);
            }
        }
        if eta != 0.0 {
            let mut sp = vec![0.0; n * n];
            self.coupling.spread_into(p, &mut sp);
            let s = self.ops.fft_real(&sp);
            out.iter_mut().zip(&s).for_each(|(o, s)| *o += eta * s);
        }
        out
    }

    /// Field `L⁻¹(S̃q + ηSq)`.
    fn green_of_dipole(&self, q: &[f64], eta: f64) -> Vec<f64> {
        let mut s = self.sources_spec(q, eta, q);
        self.green_spec(&mut s);
        self.ops.ifft_real(s)
    }

    /// `−S*L⁻¹S`, the single-layer Schur operator.
    pub fn ibsl_schur(&self) -> impl LinearOperator + '_ {
        FnOperator::new(self.n_ib(), move |f, y| {
            let sf = self.coupling.spread(f);
            let v = self.coupling.interpolate_values(&self.green(sf.values()));
            y.iter_mut().zip(v).for_each(|(y, v)| *y = -v);
        })
    }

    /// `−S*L⁻¹(S̃ + ηS) + ½I`, the double-layer operator.
    pub fn ibdl_schur(&self, eta: f64) -> impl LinearOperator + '_ {
        FnOperator::new(self.n_ib(), move |q, y| {
            let v = self.coupling.interpolate_values(&self.green_of_dipole(q, eta));
            for i in 0..q.len() {
                y[i] = -v[i] + 0.5 * q[i];
            }
        })
    }

    fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.n_ib() {
            return Err(Error::InvalidInput(format!("{what} has {} values for {} boundary points", v.len(), self.n_ib())));
        }
        Ok(())
    }

    fn check_balanced(&self, g: &ScalarField) -> Result<()> {
        if self.k2 == 0.0 {
            self.ops.check_mean_zero(g, Stencil::Standard5)?;
        }
        Ok(())
    }

    /// Single-layer Dirichlet solve. Uses the augmented `(F, ū)` system when
    /// k² = 0.
    pub fn solve_ibsl(&self, g_tilde: &ScalarField, ub: &[f64], opts: &KrylovOptions) -> Result<ScalarSolution> {
        self.check_len(ub, "boundary data")?;
        let m = self.n_ib();
        let w0 = self.green(g_tilde.values());
        let trace = self.coupling.interpolate_values(&w0);
        let r: Vec<f64> = (0..m).map(|i| self.wsqrt[i] * (ub[i] - trace[i])).collect();
        let ws = &self.wsqrt;
        let (f, ubar, report) = if self.k2 > 0.0 {
            let op = FnOperator::new(m, |g, y| {
                let f: Vec<f64> = g.iter().zip(ws).map(|(g, w)| g / w).collect();
                let v = self.coupling.interpolate_values(&self.green(self.coupling.spread(&f).values()));
                for i in 0..m {
                    y[i] = -ws[i] * v[i];
                }
            });
            let (gsol, rep) = minres(&op, &r, opts);
            (gsol.iter().zip(ws).map(|(g, w)| g / w).collect::<Vec<_>>(), 0.0, rep)
        } else {
            let grid = self.ops.grid();
            let mut rhs = r;
            rhs.push(grid.cell_area() / self.boundary.mean_weight() * g_tilde.values().iter().sum::<f64>());
            let op = FnOperator::new(m + 1, |x, y| {
                let f: Vec<f64> = x[..m].iter().zip(ws).map(|(g, w)| g / w).collect();
                let v = self.coupling.interpolate_values(&self.green(self.coupling.spread(&f).values()));
                for i in 0..m {
                    y[i] = -ws[i] * v[i] + ws[i] * x[m];
                }
                y[m] = x[..m].iter().zip(ws).map(|(a, b)| a * b).sum();
            });
            let (x, rep) = minres(&op, &rhs, opts);
            (x[..m].iter().zip(ws).map(|(g, w)| g / w).collect(), x[m], rep)
        };
        let sf = self.coupling.spread(&f);
        let mut u: Vec<f64> = self.green(sf.values());
        u.iter_mut().zip(&w0).for_each(|(u, w)| *u = w - *u + ubar);
        let u = ScalarField::from_vec(*self.ops.grid(), u);
        Ok(ScalarSolution {
            u: u.clone(),
            u_raw: u,
            density: f,
            mean_correction: ubar,
            report,
            mask: self.mask.clone(),
        })
    }

    /// Double-layer Dirichlet solve with completion coefficient η. For
    /// k² = 0 and η > 0 the unknown mean ū is appended with the row
    /// `η Σ w_i Q_i = (ΔxΔy/Δs̄) Σ g̃`.
    pub fn solve_ibdl(&self, g_tilde: &ScalarField, ub: &[f64], eta: f64, opts: &KrylovOptions) -> Result<ScalarSolution> {
        self.check_len(ub, "boundary data")?;
        if !(eta >= 0.0) {
            return Err(Error::InvalidInput(format!("η must be nonnegative, got {eta}")));
        }
        let augmented = self.k2 == 0.0 && eta > 0.0;
        if !augmented {
            self.check_balanced(g_tilde)?;
        }
        let m = self.n_ib();
        let w0 = self.green(g_tilde.values());
        let trace = self.coupling.interpolate_values(&w0);
        let mut rhs: Vec<f64> = (0..m).map(|i| ub[i] - trace[i]).collect();
        let (q, ubar, report) = if augmented {
            let grid = self.ops.grid();
            rhs.push(grid.cell_area() / self.boundary.mean_weight() * g_tilde.values().iter().sum::<f64>());
            let wts: Vec<f64> = self.wsqrt.iter().map(|w| w * w).collect();
            let op = FnOperator::new(m + 1, |x, y| {
                let v = self.coupling.interpolate_values(&self.green_of_dipole(&x[..m], eta));
                for i in 0..m {
                    y[i] = -v[i] + 0.5 * x[i] + x[m];
                }
                y[m] = eta * x[..m].iter().zip(&wts).map(|(a, b)| a * b).sum::<f64>();
            });
            let (x, rep) = gmres(&op, &rhs, opts);
            (x[..m].to_vec(), x[m], rep)
        } else {
            let (x, rep) = gmres(&self.ibdl_schur(eta), &rhs, opts);
            (x, 0.0, rep)
        };
        let corr = self.green_of_dipole(&q, eta);
        let u_raw: Vec<f64> = w0.iter().zip(&corr).map(|(w, c)| w - c + ubar).collect();
        let u_raw = ScalarField::from_vec(*self.ops.grid(), u_raw);
        let u = self.plan.apply(&u_raw, ub);
        Ok(ScalarSolution { u, u_raw, density: q, mean_correction: ubar, report, mask: self.mask.clone() })
    }

    /// Neumann solve: recovers the boundary values U from
    /// `−S*L⁻¹S̃U − ½U = S*L⁻¹(SV − g̃)`, then `Lu = g̃ − S̃U − SV`.
    pub fn solve_neumann(&self, g_tilde: &ScalarField, vb: &[f64], opts: &KrylovOptions) -> Result<ScalarSolution> {
        self.check_len(vb, "normal derivative data")?;
        if !(self.k2 > 0.0) {
            return Err(Error::InvalidInput("the Neumann formulation needs k² > 0".into()));
        }
        let m = self.n_ib();
        let sv = self.coupling.spread(vb);
        let src: Vec<f64> = sv.values().iter().zip(g_tilde.values()).map(|(s, g)| s - g).collect();
        let rhs = self.coupling.interpolate_values(&self.green(&src));
        let op = FnOperator::new(m, |x, y| {
            let v = self.coupling.interpolate_values(&self.green_of_dipole(x, 0.0));
            for i in 0..m {
                y[i] = -v[i] - 0.5 * x[i];
            }
        });
        let (ubv, report) = gmres(&op, &rhs, opts);
        let mut s = self.sources_spec(&ubv, 1.0, vb);
        self.green_spec(&mut s);
        let corr = self.ops.ifft_real(s);
        let w0 = self.green(g_tilde.values());
        let u_raw = ScalarField::from_vec(*self.ops.grid(), w0.iter().zip(&corr).map(|(w, c)| w - c).collect());
        let u = self.plan.apply(&u_raw, &ubv);
        Ok(ScalarSolution { u, u_raw, density: ubv, mean_correction: 0.0, report, mask: self.mask.clone() })
    }
}

fn prepare(p: &ScalarProblem) -> Result<(ScalarSolver, ScalarField, KrylovOptions)> {
    if p.g.grid() != &p.grid {
        return Err(Error::InvalidInput("right-hand side lives on a different grid".into()));
    }
    let interp = p.interpolation.unwrap_or_else(|| default_interpolation(p.scheme));
    let solver = ScalarSolver::new(p.grid, &p.boundary, p.scheme, p.kernel, p.k2, interp)?;
    let g_tilde = extend_rhs(&p.g, solver.mask(), p.resolved_extension())?;
    let opts = p.krylov.unwrap_or_else(|| KrylovOptions::for_boundary(p.boundary.len()));
    Ok((solver, g_tilde, opts))
}

fn dirichlet(p: &ScalarProblem) -> Result<&[f64]> {
    match &p.condition {
        BoundaryCondition::Dirichlet(v) => Ok(v),
        BoundaryCondition::Neumann(_) => Err(Error::InvalidInput("Dirichlet data required".into())),
    }
}

/// IBSL for `(Δ − k²)u = g`, k² > 0.
pub fn solve_ibsl_helmholtz(p: &ScalarProblem) -> Result<ScalarSolution> {
    if !(p.k2 > 0.0) {
        return Err(Error::InvalidInput("Helmholtz solve needs k² > 0".into()));
    }
    let (s, g, o) = prepare(p)?;
    s.solve_ibsl(&g, dirichlet(p)?, &o)
}

/// IBSL for `Δu = g` via the symmetric augmented system in `(F, ū)`.
pub fn solve_ibsl_poisson(p: &ScalarProblem) -> Result<ScalarSolution> {
    if p.k2 != 0.0 {
        return Err(Error::InvalidInput("Poisson solve needs k² = 0".into()));
    }
    let (s, g, o) = prepare(p)?;
    s.solve_ibsl(&g, dirichlet(p)?, &o)
}

/// IBDL Dirichlet solve for Helmholtz or Poisson, optionally completed.
pub fn solve_ibdl_scalar(p: &ScalarProblem) -> Result<ScalarSolution> {
    let (s, g, o) = prepare(p)?;
    s.solve_ibdl(&g, dirichlet(p)?, p.resolved_eta(), &o)
}

/// IBDL Neumann solve for Helmholtz.
pub fn solve_ibdl_neumann(p: &ScalarProblem) -> Result<ScalarSolution> {
    let vb = match &p.condition {
        BoundaryCondition::Neumann(v) => v,
        BoundaryCondition::Dirichlet(_) => return Err(Error::InvalidInput("Neumann data required".into())),
    };
    let (s, g, o) = prepare(p)?;
    s.solve_neumann(&g, vb, &o)
}

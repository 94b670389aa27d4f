//! Concrete solver inputs for one row of a sweep.

use std::f64::consts::PI;

use ibdl_core::oracles::AnalyticSolution;
use ibdl_core::{
    discretize, BoundaryCondition, BoundaryVector, FluidProblem, ImmersedBoundary, ScalarField, ScalarProblem,
    VectorField,
};

use crate::config::{PoissonSolution, Problem, RunConfig};
use crate::HarnessError;

type Scalar2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Flow2 = Box<dyn Fn(f64, f64) -> ([f64; 2], f64) + Send + Sync>;

/// `u = e^{sin πx} cos πy`, `v = −cos πx e^{sin πx} sin πy`, `p = e^{cos πy}`
/// with forcing for `Δu − k²u − ∇p = g`.
pub fn pi_brinkman(k2: f64, x: f64, y: f64) -> ([f64; 2], f64, [f64; 2]) {
    let (sx, cx) = (PI * x).sin_cos();
    let (sy, cy) = (PI * y).sin_cos();
    let e = sx.exp();
    let pi2 = PI * PI;
    let u = [e * cy, -cx * e * sy];
    let g = [
        pi2 * e * cy * (cx * cx - sx - 1.0 - k2 / pi2),
        -pi2 * cx * e * sy * (cx * cx - 3.0 * sx - 2.0 - k2 / pi2) + PI * sy * cy.exp(),
    ];
    (u, cy.exp(), g)
}

/// `u = sin y − x e^{xy}`, `v = cos x + y e^{xy}`, `p = e^{x+y}` with forcing
/// for `Δu − ∇p = g`.
pub fn exp_stokes(x: f64, y: f64) -> ([f64; 2], f64, [f64; 2]) {
    let e = (x * y).exp();
    let p = (x + y).exp();
    let u = [y.sin() - x * e, x.cos() + y * e];
    let g = [
        -e * (2.0 * y + x * y * y + x * x * x) - y.sin() - p,
        e * (2.0 * x + x * x * y + y * y * y) - x.cos() - p,
    ];
    (u, p, g)
}

/// Boundary for row `(n, α)`; `c` selects the cylinder-array concentration.
pub fn boundary(problem: &Problem, n: usize, alpha: f64, c: Option<f64>) -> Result<ImmersedBoundary, HarnessError> {
    let grid = problem.grid(n)?;
    let (shapes, orientation) = problem.shapes(c);
    let parts = shapes.iter().map(|s| discretize(s, orientation, &grid, alpha)).collect::<Result<Vec<_>, _>>()?;
    Ok(if parts.len() == 1 { parts.into_iter().next().unwrap() } else { ImmersedBoundary::concat(&parts)? })
}

/// A scalar problem with its exact solution (and exact boundary values for
/// Neumann data).
pub struct ScalarCase {
    pub problem: ScalarProblem,
    pub exact: Scalar2,
}

pub fn scalar_case(cfg: &RunConfig, n: usize, alpha: f64, eta: Option<f64>) -> Result<ScalarCase, HarnessError> {
    let grid = cfg.problem.grid(n)?;
    let b = boundary(&cfg.problem, n, alpha, None)?;
    let (exact, forcing, k2, neumann): (Scalar2, Scalar2, f64, bool) = match cfg.problem {
        Problem::BesselHelmholtz { radius } => {
            let s = AnalyticSolution::BesselHelmholtz { radius };
            (Box::new(move |x, y| s.value(x, y)), Box::new(|_, _| 0.0), 1.0, false)
        }
        Problem::StarfishPoisson { .. } => {
            let s = AnalyticSolution::PoissonTrig;
            (Box::new(move |x, y| s.value(x, y)), Box::new(move |x, y| s.forcing(x, y)), 0.0, false)
        }
        Problem::ExteriorPoisson { box_length, solution: PoissonSolution::Exp, .. } => {
            let s = AnalyticSolution::ExpPoisson { length: box_length };
            (Box::new(move |x, y| s.value(x, y)), Box::new(move |x, y| s.forcing(x, y)), 0.0, false)
        }
        Problem::ExteriorPoisson { box_length, solution: PoissonSolution::Trig, .. } => {
            let w = 2.0 * PI / box_length;
            let u = move |x: f64, y: f64| (w * x).sin() - (w * y).cos();
            (Box::new(u), Box::new(move |x, y| -w * w * u(x, y)), 0.0, false)
        }
        Problem::NeumannQuadratic { .. } => {
            let s = AnalyticSolution::Quadratic;
            (Box::new(move |x, y| s.value(x, y)), Box::new(move |x, y| s.forcing(x, y)), 1.0, true)
        }
        _ => return Err(HarnessError::Invalid(format!("{:?} is not a scalar problem", cfg.problem))),
    };
    let condition = if neumann {
        let s = AnalyticSolution::Quadratic;
        BoundaryCondition::Neumann(b.points().iter().zip(b.normals()).map(|(p, nv)| s.normal_derivative(p[0], p[1], *nv)).collect())
    } else {
        BoundaryCondition::Dirichlet(b.points().iter().map(|p| exact(p[0], p[1])).collect())
    };
    let n_ib = b.len();
    let mut p = ScalarProblem::new(grid, b, condition);
    p.k2 = k2;
    p.g = ScalarField::from_fn(grid, &forcing);
    p.scheme = cfg.scheme.scheme();
    if let Some(k) = cfg.kernel {
        p.kernel = k.kernel();
    }
    p.eta = eta;
    p.extension = cfg.extension.map(|e| e.extension());
    p.interpolation = cfg.interpolation.resolve(n);
    p.krylov = Some(cfg.krylov.options(n_ib));
    Ok(ScalarCase { problem: p, exact })
}

/// A Brinkman/Stokes problem, with velocity and pressure when known.
pub struct FluidCase {
    pub problem: FluidProblem,
    pub exact: Option<Flow2>,
}

pub fn fluid_case(cfg: &RunConfig, n: usize, alpha: f64, eta: Option<f64>, c: Option<f64>) -> Result<FluidCase, HarnessError> {
    let grid = cfg.problem.grid(n)?;
    let b = boundary(&cfg.problem, n, alpha, c)?;
    let (exact, forcing, k2): (Option<Flow2>, Box<dyn Fn(f64, f64) -> [f64; 2]>, f64) = match cfg.problem {
        Problem::BrinkmanManufactured { .. } => {
            let s = AnalyticSolution::BrinkmanManufactured;
            (Some(Box::new(move |x, y| (s.velocity(x, y), s.pressure(x, y)))), Box::new(move |x, y| s.vector_forcing(x, y)), 1.0)
        }
        Problem::ExteriorBrinkman { k, .. } => {
            let k2 = k * k;
            (
                Some(Box::new(move |x, y| {
                    let (u, p, _) = pi_brinkman(k2, x, y);
                    (u, p)
                })),
                Box::new(move |x, y| pi_brinkman(k2, x, y).2),
                k2,
            )
        }
        Problem::ManufacturedStokes { .. } => (
            Some(Box::new(|x, y| {
                let (u, p, _) = exp_stokes(x, y);
                (u, p)
            })),
            Box::new(|x, y| exp_stokes(x, y).2),
            0.0,
        ),
        Problem::CylinderArray { .. } | Problem::NineEllipses => (None, Box::new(|_, _| [-1.0, 0.0]), 0.0),
        _ => return Err(HarnessError::Invalid(format!("{:?} is not a steady flow problem", cfg.problem))),
    };
    let ub = match &exact {
        Some(f) => BoundaryVector::from_fn(b.points(), |x, y| f(x, y).0),
        None => BoundaryVector::zeros(b.len()),
    };
    let n_ib = b.len();
    let mut p = FluidProblem::new(grid, b, 1.0, ub);
    p.k2 = k2;
    p.g = VectorField::from_fn(grid, forcing);
    p.scheme = cfg.scheme.scheme();
    p.kernel = cfg.kernel.map(|k| k.kernel());
    p.pressure_stencil = cfg.pressure_stencil.map(|s| s.stencil());
    p.eta = eta;
    p.extension = cfg.extension.map(|e| e.extension());
    p.interpolation = cfg.interpolation.resolve(n);
    p.krylov = Some(cfg.krylov.options(2 * n_ib));
    Ok(FluidCase { problem: p, exact })
}

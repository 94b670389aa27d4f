//! Immersed boundary solvers on periodic boxes.
//!
//! A boundary value problem on a domain Ω with boundary Γ is embedded in a
//! periodic square box. Γ is represented by Lagrangian points coupled to the
//! Cartesian grid through a regularized delta function; the boundary
//! condition becomes a small dense-free system for a boundary density that
//! is solved matrix-free with a Krylov method.
//!
//! Two formulations are provided:
//!
//! * single layer (`ibsl`): a constraint force F, symmetric and solved with
//!   MINRES; its conditioning degrades as the grid is refined;
//! * double layer (`ibdl`): a dipole density Q with a ½-shifted operator
//!   solved with GMRES in a grid-independent number of iterations.
//!
//! Scalar Helmholtz/Poisson problems live in [`scalar`], Brinkman/Stokes in
//! [`fluid`] and time-dependent Navier–Stokes in [`navier_stokes`].

pub mod boundary;
pub mod coupling;
pub mod error;
pub mod fluid;
pub mod grid;
pub mod krylov;
pub mod navier_stokes;
pub mod ops;
pub mod oracles;
pub mod postprocess;
pub mod scalar;

pub use boundary::{discretize, ImmersedBoundary, Orientation, Shape};
pub use coupling::{phi, BoundaryVector, Coupling, KernelKind};
pub use error::{Error, Result};
pub use fluid::{
    net_force_torque, solve_ibdl_fluid, solve_ibsl_brinkman, solve_ibsl_stokes, FluidProblem, FluidSolution, FluidSolver,
    ForceModel, ForceTorque, Method,
};
pub use grid::{masked_norms, Norms, PeriodicGrid, ScalarField, VectorField};
pub use krylov::{gmres, minres, KrylovOptions, LinearOperator, SolveReport};
pub use ops::{remove_divergence_null_space, DiffOps, Scheme, Stencil};
pub use postprocess::{compute_indicator, IndicatorMask, InterpolationConfig};
pub use scalar::{
    solve_ibdl_neumann, solve_ibdl_scalar, solve_ibsl_helmholtz, solve_ibsl_poisson, BoundaryCondition, Extension,
    ScalarProblem, ScalarSolution, ScalarSolver,
};

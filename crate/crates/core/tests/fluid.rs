use std::f64::consts::PI;

use ibdl_core::oracles::AnalyticSolution;
use ibdl_core::*;

fn circle(g: &PeriodicGrid, c: [f64; 2], r: f64, o: Orientation, alpha: f64) -> ImmersedBoundary {
    discretize(&Shape::Circle { center: c, radius: r }, o, g, alpha).unwrap()
}

/// Brinkman manufactured problem on a circle of radius 0.75 in `[−1, 1]²`.
fn brinkman(n: usize, alpha: f64) -> FluidProblem {
    let g = PeriodicGrid::centered(n, 2.0).unwrap();
    let b = circle(&g, [0.0, 0.0], 0.75, Orientation::InteriorIsOmega, alpha);
    let sol = AnalyticSolution::BrinkmanManufactured;
    let ub = BoundaryVector::from_fn(b.points(), |x, y| sol.velocity(x, y));
    let mut p = FluidProblem::new(g, b, 1.0, ub);
    p.k2 = 1.0;
    p.g = VectorField::from_fn(g, |x, y| sol.vector_forcing(x, y));
    p
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Single Fourier mode `u = (sin πy, 0)`, `p = 0` with its Brinkman forcing
/// on every node, and `U_b` the discrete trace of that unconstrained flow.
fn unconstrained_trace_problem(n: usize) -> FluidProblem {
    let g = PeriodicGrid::centered(n, 2.0).unwrap();
    let b = circle(&g, [0.1, 0.0], 0.6, Orientation::InteriorIsOmega, 2.0);
    let u = VectorField::from_fn(g, |_, y| [(PI * y).sin(), 0.0]);
    let ub = Coupling::new(&b, &g, KernelKind::Peskin4).unwrap().interpolate_vector(&u);
    let mut p = FluidProblem::new(g, b, 1.0, ub);
    p.k2 = 1.0;
    p.extension = Some(Extension::Smooth);
    p.g = VectorField::from_fn(g, |_, y| [-(PI * PI + 1.0) * (PI * y).sin(), 0.0]);
    p
}

#[test]
fn unconstrained_trace_needs_no_density() {
    let p = unconstrained_trace_problem(64);
    let s = solve_ibsl_brinkman(&p).unwrap();
    assert!(max_abs(&s.density.x).max(max_abs(&s.density.y)) < 1e-8, "{:?}", s.report);
    let s = solve_ibdl_fluid(&p).unwrap();
    assert!(max_abs(&s.density.x).max(max_abs(&s.density.y)) < 1e-8, "{:?}", s.report);
    let g = p.grid;
    let mut worst: f64 = 0.0;
    for j in 0..g.n() {
        for i in 0..g.n() {
            let y = g.node(i, j)[1];
            worst = worst.max((s.velocity_raw.u.at(i, j) - (PI * y).sin()).abs());
        }
    }
    assert!(worst < 1e-8);
}

#[test]
fn rigid_translation_is_reproduced() {
    let g = PeriodicGrid::centered(64, 1.0).unwrap();
    let b = circle(&g, [0.0, 0.0], 0.3, Orientation::InteriorIsOmega, 2.0);
    let c = [0.7, -1.3];
    let p = FluidProblem::new(g, b.clone(), 1.0, BoundaryVector::constant(b.len(), c));
    // the single layer reproduces the constant exactly; the double layer
    // represents it by a jump across Γ, so only to discretization accuracy
    for (s, tol) in [(solve_ibsl_stokes(&p).unwrap(), 1e-7), (solve_ibdl_fluid(&p).unwrap(), 0.03)] {
        assert!(s.report.converged);
        let inside = s.mask.inside();
        let mut worst: f64 = 0.0;
        for k in 0..g.len() {
            if inside[k] {
                worst = worst.max((s.velocity.u.values()[k] - c[0]).abs());
                worst = worst.max((s.velocity.v.values()[k] - c[1]).abs());
            }
        }
        assert!(worst < tol, "{worst}");
        if tol < 1e-3 {
            // F is only zero to Krylov tolerance, and p ~ F/h
            assert!(s.pressure.max_abs() < 1e-5);
        }
    }
}

#[test]
fn force_examples() {
    let g = PeriodicGrid::centered(64, 1.0).unwrap();
    let r = 0.2;
    let b = circle(&g, [0.0, 0.0], r, Orientation::ExteriorIsOmega, 1.0);
    let m = b.len();
    let ft = net_force_torque(&BoundaryVector::zeros(m), &b, ForceModel::Ibsl, [0.0, 0.0]).unwrap();
    assert_eq!(ft, ForceTorque { force: [0.0, 0.0], torque: 0.0 });

    let ft = net_force_torque(&BoundaryVector::constant(m, [1.0, 0.0]), &b, ForceModel::Ibsl, [0.0, 0.0]).unwrap();
    assert!((ft.force[0] + 2.0 * PI * r).abs() < 1e-12);
    assert!(ft.force[1].abs() < 1e-12 && ft.torque.abs() < 1e-12);

    let q = BoundaryVector::constant(m, [0.0, 1.0 / (10.0 * 2.0 * PI * r)]);
    let ft = net_force_torque(&q, &b, ForceModel::IbdlCompleted { eta: 10.0 }, [0.0, 0.0]).unwrap();
    assert!(ft.force[0].abs() < 1e-12);
    assert!((ft.force[1] + 1.0).abs() < 1e-12);

    // tangential density → torque −2πr²
    let t = BoundaryVector::from_fn(b.points(), |x, y| [-y / r, x / r]);
    let ft = net_force_torque(&t, &b, ForceModel::Ibsl, [0.0, 0.0]).unwrap();
    assert!((ft.torque + 2.0 * PI * r * r).abs() < 1e-10);

    assert!(net_force_torque(&BoundaryVector::zeros(m + 1), &b, ForceModel::Ibsl, [0.0, 0.0]).is_err());
}

#[test]
fn force_is_linear_in_the_density() {
    let g = PeriodicGrid::centered(64, 1.0).unwrap();
    let b = circle(&g, [0.1, 0.0], 0.2, Orientation::ExteriorIsOmega, 1.0);
    let f1 = BoundaryVector::from_fn(b.points(), |x, y| [x.sin(), y * y]);
    let f2 = BoundaryVector::from_fn(b.points(), |x, y| [x * y, 1.0 + x]);
    let sum = BoundaryVector {
        x: f1.x.iter().zip(&f2.x).map(|(a, b)| 2.0 * a + b).collect(),
        y: f1.y.iter().zip(&f2.y).map(|(a, b)| 2.0 * a + b).collect(),
    };
    let model = ForceModel::IbdlCompleted { eta: 10.0 };
    let a = net_force_torque(&f1, &b, model, [0.3, 0.1]).unwrap();
    let c = net_force_torque(&f2, &b, model, [0.3, 0.1]).unwrap();
    let s = net_force_torque(&sum, &b, model, [0.3, 0.1]).unwrap();
    for k in 0..2 {
        assert!((s.force[k] - 2.0 * a.force[k] - c.force[k]).abs() < 1e-12);
    }
    assert!((s.torque - 2.0 * a.torque - c.torque).abs() < 1e-12);
}

/// Removes the components along 1, (−1)^i, (−1)^j, (−1)^(i+j): the modes the
/// spectral divergence cannot produce.
fn remove_divergence_null_space(r: &mut ScalarField) {
    let n = r.grid().n();
    let sign = |a: usize| if a % 2 == 0 { 1.0 } else { -1.0 };
    let modes: [Box<dyn Fn(usize, usize) -> f64>; 4] =
        [Box::new(|_, _| 1.0), Box::new(move |i, _| sign(i)), Box::new(move |_, j| sign(j)), Box::new(move |i, j| sign(i + j))];
    for m in &modes {
        let mut c = 0.0;
        for j in 0..n {
            for i in 0..n {
                c += m(i, j) * r.at(i, j);
            }
        }
        c /= (n * n) as f64;
        let v = r.values_mut();
        for j in 0..n {
            for i in 0..n {
                v[j * n + i] -= c * m(i, j);
            }
        }
    }
}

#[test]
fn double_layer_velocity_balances_the_mass_source() {
    // Brinkman interior, Stokes interior and completed Stokes exterior
    let mut cases = vec![brinkman(64, 2.0)];
    let g = PeriodicGrid::centered(64, 1.0).unwrap();
    let b = circle(&g, [0.05, 0.0], 0.25, Orientation::InteriorIsOmega, 2.0);
    let ub = BoundaryVector::from_fn(b.points(), |x, y| [y, x * x]);
    cases.push(FluidProblem::new(g, b, 1.0, ub));
    let b = circle(&g, [0.0, 0.0], 0.2, Orientation::ExteriorIsOmega, 1.5);
    let mut p = FluidProblem::new(g, b.clone(), 1.0, BoundaryVector::zeros(b.len()));
    p.g = VectorField::from_fn(g, |_, _| [-1.0, 0.0]);
    cases.push(p);
    for p in cases {
        let s = solve_ibdl_fluid(&p).unwrap();
        assert!(s.report.converged);
        let ops = DiffOps::new(p.grid, Scheme::Spectral);
        let mut r = ops.divergence(&s.velocity_raw);
        let src = s.source.as_ref().unwrap();
        r.axpy(1.0, src);
        remove_divergence_null_space(&mut r);
        let scale = s.velocity_raw.max_abs();
        assert!(r.max_abs() <= 1e-10 * scale, "{} vs {}", r.max_abs(), scale);
        assert!(s.pressure.mean().abs() < 1e-10 * s.pressure.max_abs().max(1.0));
    }
}

#[test]
fn single_layer_velocity_is_divergence_free() {
    let p = brinkman(64, 2.0);
    let s = solve_ibsl_brinkman(&p).unwrap();
    let d = DiffOps::new(p.grid, Scheme::Spectral).divergence(&s.velocity_raw);
    assert!(d.max_abs() < 1e-10 * s.velocity_raw.max_abs());
    assert!(s.source.is_none());
}

#[test]
fn brinkman_iteration_counts() {
    let s = solve_ibsl_brinkman(&brinkman(64, 2.0)).unwrap();
    assert!(s.report.converged);
    let it = s.report.iterations;
    assert!((86..=160).contains(&it), "{it}");

    let mut counts = Vec::new();
    for n in [64, 128, 256] {
        for alpha in [0.75, 2.0] {
            let s = solve_ibdl_fluid(&brinkman(n, alpha)).unwrap();
            assert!(s.report.converged);
            counts.push(s.report.iterations);
        }
    }
    assert!(counts.iter().all(|&c| (7..=12).contains(&c)), "{counts:?}");
    let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    assert!(hi - lo <= 2, "{counts:?}");
}

#[test]
fn tight_single_layer_spacing_stagnates() {
    let s = solve_ibsl_brinkman(&brinkman(64, 0.75)).unwrap();
    assert!(!s.report.converged, "{} iterations", s.report.iterations);
    assert!(s.report.stagnated || s.report.final_residual > 1e-8);
}

#[test]
fn brinkman_velocity_is_accurate() {
    let sol = AnalyticSolution::BrinkmanManufactured;
    let mut errs = Vec::new();
    for n in [64, 128] {
        let p = brinkman(n, 2.0);
        let s = solve_ibdl_fluid(&p).unwrap();
        let exact = ScalarField::from_fn(p.grid, |x, y| sol.velocity(x, y)[0]);
        let e = masked_norms(&s.velocity.u.sub(&exact), &s.mask).unwrap();
        errs.push(e.l1);
    }
    assert!(errs[0] < 5e-2 && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn input_validation() {
    let mut p = brinkman(32, 2.0);
    p.mu = 0.0;
    assert!(solve_ibdl_fluid(&p).is_err());
    let mut p = brinkman(32, 2.0);
    p.k2 = 0.0;
    assert!(solve_ibsl_brinkman(&p).is_err());
    let p = brinkman(32, 2.0);
    assert!(solve_ibsl_stokes(&p).is_err());
    let mut p = brinkman(32, 2.0);
    p.ub = BoundaryVector::zeros(3);
    assert!(solve_ibsl_brinkman(&p).is_err());

    let g = PeriodicGrid::centered(32, 1.0).unwrap();
    let b = circle(&g, [0.0, 0.0], 0.2, Orientation::ExteriorIsOmega, 2.0);
    let mut p = FluidProblem::new(g, b.clone(), 1.0, BoundaryVector::zeros(b.len()));
    p.eta = Some(0.0);
    assert!(solve_ibdl_fluid(&p).is_err());
    let mut p = FluidProblem::new(g, b.clone(), 1.0, BoundaryVector::zeros(b.len()));
    p.pressure_stencil = Some(Stencil::Wide);
    assert!(solve_ibdl_fluid(&p).is_err());
}

#[test]
fn finite_difference_path_converges() {
    let sol = AnalyticSolution::BrinkmanManufactured;
    for method in [Method::Ibsl, Method::Ibdl] {
        let mut p = brinkman(64, 2.0);
        p.scheme = Scheme::FiniteDifference;
        let s = match method {
            Method::Ibsl => solve_ibsl_brinkman(&p),
            Method::Ibdl => solve_ibdl_fluid(&p),
        }
        .unwrap();
        assert!(s.report.converged);
        let exact = ScalarField::from_fn(p.grid, |x, y| sol.velocity(x, y)[0]);
        let e = masked_norms(&s.velocity.u.sub(&exact), &s.mask).unwrap();
        assert!(e.l1 < 0.1, "{method:?} {}", e.l1);
    }
}

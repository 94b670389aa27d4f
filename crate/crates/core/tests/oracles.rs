use std::f64::consts::PI;

use ibdl_core::krylov::FnOperator;
use ibdl_core::oracles::{assemble_dense, bessel_i2, AnalyticSolution};
use ibdl_core::*;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::dense::*;

#[test]
fn assemble_identity_and_size_guard() {
    let id = FnOperator::new(3, |x: &[f64], y: &mut [f64]| y.copy_from_slice(x));
    let d = assemble_dense(&id).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(d.entry(i, j), if i == j { 1.0 } else { 0.0 });
        }
    }
    let big = FnOperator::new(5000, |_: &[f64], _: &mut [f64]| panic!("must not be applied"));
    assert!(matches!(assemble_dense(&big), Err(Error::TooLarge { .. })));
}

#[test]
fn scalar_operators_match_dense_oracles() {
    let g = PeriodicGrid::centered(32, 1.0).unwrap();
    for scheme in [Scheme::FiniteDifference, Scheme::Spectral] {
        let b = circle_points(&g, [0.03, -0.02], 0.25, 20, Orientation::InteriorIsOmega);
        let s = scalar_solver(g, &b, scheme, 1.0);
        let e = max_diff(&scalar_oracle(&g, &b, scheme, 1.0, 0.0, false), &s.ibsl_schur());
        assert!(e <= 1e-12, "{scheme:?} single layer {e:e}");
        let e = max_diff(&scalar_oracle(&g, &b, scheme, 1.0, 0.0, true), &s.ibdl_schur(0.0));
        assert!(e <= 1e-12, "{scheme:?} double layer {e:e}");

        let b = circle_points(&g, [0.0, 0.01], 0.2, 20, Orientation::ExteriorIsOmega);
        let s = scalar_solver(g, &b, scheme, 0.0);
        let e = max_diff(&scalar_oracle(&g, &b, scheme, 0.0, 10.0, true), &s.ibdl_schur(10.0));
        assert!(e <= 1e-12, "{scheme:?} completed double layer {e:e}");
    }
}

#[test]
fn fluid_operators_match_dense_oracles() {
    let g = PeriodicGrid::centered(32, 1.0).unwrap();
    let b = circle_points(&g, [0.02, 0.0], 0.2, 16, Orientation::ExteriorIsOmega);
    let mu = 0.7;
    let s = fluid_solver(g, &b, Method::Ibdl, mu, 0.0);
    let e = max_diff(&stokes_ibdl_oracle(&g, &b, mu, 0.0, 10.0), &s.ibdl_operator(10.0));
    assert!(e <= 1e-12, "Stokes double layer {e:e}");

    let b = circle_points(&g, [0.0, 0.0], 0.25, 16, Orientation::InteriorIsOmega);
    let s = fluid_solver(g, &b, Method::Ibdl, mu, 2.0);
    let e = max_diff(&stokes_ibdl_oracle(&g, &b, mu, 2.0, 0.0), &s.ibdl_operator(0.0));
    assert!(e <= 1e-12, "Brinkman double layer {e:e}");

    let s = fluid_solver(g, &b, Method::Ibsl, mu, 2.0);
    let e = max_diff(&brinkman_ibsl_oracle(&g, &b, mu, 2.0), &s.ibsl_operator());
    assert!(e <= 1e-12, "Brinkman single layer {e:e}");
}

#[test]
fn coupling_adjointness_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = [16, 32, 64][rng.gen_range(0..3)];
        let g = PeriodicGrid::new(n, [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], rng.gen_range(0.5..3.0)).unwrap();
        let o = g.origin();
        let m = rng.gen_range(3..40);
        let pts: Vec<[f64; 2]> =
            (0..m).map(|_| [o[0] + rng.gen_range(0.0..g.length()), o[1] + rng.gen_range(0.0..g.length())]).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0) * g.h()).collect();
        let nr = vec![[1.0, 0.0]; m];
        let b = ImmersedBoundary::new(pts, w, nr, Orientation::InteriorIsOmega).unwrap();
        let kind = if rng.gen_bool(0.5) { KernelKind::Peskin4 } else { KernelKind::BSpline6 };
        let c = Coupling::new(&b, &g, kind).unwrap();
        let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = ScalarField::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let lhs = c.spread(&f).dot(&u) * g.cell_area();
        let su = c.interpolate(&u);
        let rhs: f64 = (0..m).map(|i| f[i] * su[i] * b.weights()[i]).sum();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn double_layer_spectrum_clusters_and_single_layer_is_ill_conditioned() {
    let g = PeriodicGrid::centered(32, 1.0).unwrap();
    let b = circle_points(&g, [0.0, 0.0], 0.25, 20, Orientation::InteriorIsOmega);
    let s = scalar_solver(g, &b, Scheme::FiniteDifference, 1.0);
    let dl = assemble_dense(&s.ibdl_schur(0.0)).unwrap();
    let sl = assemble_dense(&s.ibsl_schur()).unwrap();
    let radius = dl.eigenvalues().iter().map(|z| (z - C::new(0.5, 0.0)).norm()).fold(0.0, f64::max);
    let (kd, ks) = (dl.condition_number(), sl.condition_number());
    println!("double-layer eigenvalues within {radius:.3} of 1/2; cond {kd:.3e} vs single layer {ks:.3e}");
    assert!(radius < 0.5, "spectrum must stay away from zero");
    assert!(ks >= 100.0 * kd, "{ks} vs {kd}");
}

#[test]
fn analytic_solution_examples() {
    let sol = AnalyticSolution::BesselHelmholtz { radius: 0.25 };
    for k in 0..16 {
        let t = 2.0 * PI * k as f64 / 16.0;
        let v = sol.value(0.25 * t.cos(), 0.25 * t.sin());
        assert!((v - (2.0 * t).sin()).abs() < 1e-14);
    }
    // I₂(r) = r²/8 + r⁴/96 + …
    assert!((bessel_i2(1e-3) / (1e-6 / 8.0 + 1e-12 / 96.0) - 1.0).abs() < 1e-14);
    assert!((bessel_i2(1.0) - 0.135_747_669_767_038_3).abs() < 1e-15);
    assert!((AnalyticSolution::Linear.value(0.1, 0.2) - 0.3).abs() < 1e-15);
    assert!((AnalyticSolution::Quadratic.value(0.5, 0.25) - 0.1875).abs() < 1e-15);
    assert_eq!(AnalyticSolution::Quadratic.k2(), 1.0);
}

/// Spectral residual of a scalar solution on a box where it is periodic.
fn scalar_residual(sol: AnalyticSolution, g: PeriodicGrid) -> f64 {
    let ops = DiffOps::new(g, Scheme::Spectral);
    let u = ScalarField::from_fn(g, |x, y| sol.value(x, y));
    let mut r = ops.laplacian(&u, Stencil::Standard5).unwrap();
    r.axpy(-sol.k2(), &u);
    r.axpy(-1.0, &ScalarField::from_fn(g, |x, y| sol.forcing(x, y)));
    r.max_abs()
}

#[test]
fn forcings_satisfy_their_equations() {
    let g = PeriodicGrid::centered(512, 2.0 * PI).unwrap();
    let sol = AnalyticSolution::BrinkmanManufactured;
    let ops = DiffOps::new(g, Scheme::Spectral);
    let u = VectorField::from_fn(g, |x, y| sol.velocity(x, y));
    let p = ScalarField::from_fn(g, |x, y| sol.pressure(x, y));
    let gp = ops.gradient(&p);
    let f = VectorField::from_fn(g, |x, y| sol.vector_forcing(x, y));
    for (c, (uc, (gc, fc))) in [(&u.u, (&gp.u, &f.u)), (&u.v, (&gp.v, &f.v))].into_iter().enumerate() {
        let mut r = ops.laplacian(uc, Stencil::Standard5).unwrap();
        r.axpy(-1.0, uc);
        r.axpy(-1.0, gc);
        r.axpy(-1.0, fc);
        assert!(r.max_abs() < 1e-10, "component {c}: {}", r.max_abs());
    }
    assert!(ops.divergence(&u).max_abs() < 1e-10);

    // sin(πx/2) − cos(πy/2) is 4-periodic; e^{sin(2πx/L)} is L-periodic
    assert!(scalar_residual(AnalyticSolution::PoissonTrig, PeriodicGrid::centered(128, 4.0).unwrap()) < 1e-10);
    assert!(scalar_residual(AnalyticSolution::ExpPoisson { length: 8.0 }, PeriodicGrid::centered(256, 8.0).unwrap()) < 1e-10);
}

use approx::assert_abs_diff_eq;
use ibdl_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KERNELS: [KernelKind; 2] = [KernelKind::Peskin4, KernelKind::BSpline6];

fn unit_box(n: usize) -> PeriodicGrid {
    PeriodicGrid::centered(n, 1.0).unwrap()
}

fn circle_boundary(g: &PeriodicGrid, center: [f64; 2], r: f64, alpha: f64) -> ImmersedBoundary {
    discretize(&Shape::Circle { center, radius: r }, Orientation::InteriorIsOmega, g, alpha).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn kernel_values() {
    assert_abs_diff_eq!(phi(0.0, KernelKind::Peskin4), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(phi(0.0, KernelKind::BSpline6), 11.0 / 20.0, epsilon = 1e-15);
    for r in [2.0, 2.5, -2.0, 7.0] {
        assert_eq!(phi(r, KernelKind::Peskin4), 0.0);
    }
    for r in [3.0, 3.5, -3.0] {
        assert_eq!(phi(r, KernelKind::BSpline6), 0.0);
    }
    // continuity across the branch points
    for k in KERNELS {
        for r in [1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(phi(r - 1e-12, k), phi(r + 1e-12, k), epsilon = 1e-10);
        }
        for r in [0.3, 1.7, 2.2] {
            assert_eq!(phi(r, k), phi(-r, k));
        }
    }
}

#[test]
fn kernel_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(0.0..1.0);
        for k in KERNELS {
            let (mut m0, mut m1) = (0.0, 0.0);
            for j in -4..=4 {
                let r = x - j as f64;
                m0 += phi(r, k);
                m1 += r * phi(r, k);
            }
            assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m1, 0.0, epsilon = 1e-12);
        }
        // Peskin's even/odd split
        let (mut even, mut odd) = (0.0, 0.0);
        for j in -3..=3 {
            let v = phi(x - j as f64, KernelKind::Peskin4);
            if j % 2 == 0 {
                even += v;
            } else {
                odd += v;
            }
        }
        assert_abs_diff_eq!(even, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(odd, 0.5, epsilon = 1e-12);
    }
}

#[test]
fn spread_examples() {
    let g = unit_box(64);
    let b = circle_boundary(&g, [0.01, -0.02], 0.25, 1.0);
    for k in KERNELS {
        let c = Coupling::new(&b, &g, k).unwrap();
        assert_eq!(c.spread(&vec![0.0; b.len()]).max_abs(), 0.0);
        let f = c.spread(&vec![1.0; b.len()]);
        assert_abs_diff_eq!(f.integral(), b.total_length(), epsilon = 1e-12);
        let u = c.interpolate(&ScalarField::constant(g, 3.5));
        for v in &u {
            assert_abs_diff_eq!(*v, 3.5, epsilon = 1e-12);
        }
        assert!(c.interpolate(&ScalarField::zeros(g)).iter().all(|v| *v == 0.0));
    }
}

#[test]
fn single_point_on_a_node() {
    let g = unit_box(32);
    let h = g.h();
    let node = g.node(16, 16);
    let b = ImmersedBoundary::new(
        vec![node, [node[0] + 0.3, node[1]], [node[0], node[1] + 0.3]],
        vec![0.01, 0.01, 0.01],
        vec![[1.0, 0.0]; 3],
        Orientation::InteriorIsOmega,
    )
    .unwrap();
    let c = Coupling::new(&b, &g, KernelKind::Peskin4).unwrap();
    let f = c.spread(&[1.0, 0.0, 0.0]);
    assert_abs_diff_eq!(f.at(16, 16), 0.25 * 0.01 / (h * h), epsilon = 1e-12);
    assert_abs_diff_eq!(f.at(17, 16), 0.5 * phi(1.0, KernelKind::Peskin4) * 0.01 / (h * h), epsilon = 1e-12);
    assert_eq!(f.at(18, 16), 0.0);
}

#[test]
fn spread_and_interpolate_are_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let n = [16, 32, 64][trial % 3];
        let g = unit_box(n);
        let center = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
        let b = circle_boundary(&g, center, rng.gen_range(0.15..0.3), rng.gen_range(0.5..2.0));
        let k = KERNELS[trial % 2];
        let c = Coupling::new(&b, &g, k).unwrap();
        let f = random_vec(&mut rng, b.len());
        let u = ScalarField::new(g, random_vec(&mut rng, g.len())).unwrap();
        let lhs = g.cell_area() * c.spread(&f).dot(&u);
        let su = c.interpolate(&u);
        let rhs: f64 = f.iter().zip(&su).zip(b.weights()).map(|((a, b), w)| a * b * w).sum();
        assert!((lhs - rhs).abs() < 1e-12, "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn spread_support_is_compact() {
    let g = unit_box(64);
    let h = g.h();
    let b = circle_boundary(&g, [0.0, 0.0], 0.2, 1.0);
    for k in KERNELS {
        let c = Coupling::new(&b, &g, k).unwrap();
        let f = c.spread(&vec![1.0; b.len()]);
        let reach = k.support_radius() as f64 * h + 1e-12;
        for j in 0..g.n() {
            for i in 0..g.n() {
                let x = g.node(i, j);
                let cheb = b.points().iter().map(|p| (x[0] - p[0]).abs().max((x[1] - p[1]).abs())).fold(f64::INFINITY, f64::min);
                if cheb > reach {
                    assert_eq!(f.at(i, j), 0.0);
                }
            }
        }
    }
}

#[test]
fn translation_by_a_meshwidth_shifts_the_field() {
    let g = unit_box(64);
    let h = g.h();
    let b = circle_boundary(&g, [0.0, 0.0], 0.2, 1.0);
    let moved = b.translated([h, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_vec(&mut rng, b.len());
    for k in KERNELS {
        let a = Coupling::new(&b, &g, k).unwrap().spread(&f);
        let s = Coupling::new(&moved, &g, k).unwrap().spread(&f);
        for j in 0..g.n() {
            for i in 0..g.n() {
                assert_abs_diff_eq!(s.at((i + 1) % g.n(), j), a.at(i, j), epsilon = 1e-9 * a.max_abs());
            }
        }
    }
}

#[test]
fn dipole_examples() {
    let g = unit_box(64);
    let b = circle_boundary(&g, [0.03, 0.0], 0.25, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for scheme in [Scheme::Spectral, Scheme::FiniteDifference] {
        let ops = DiffOps::new(g, scheme);
        for k in KERNELS {
            let c = Coupling::new(&b, &g, k).unwrap();
            assert_eq!(c.spread_dipole(&ops, &vec![0.0; b.len()]).max_abs(), 0.0);
            let q = random_vec(&mut rng, b.len());
            let d = c.spread_dipole(&ops, &q);
            assert!(d.integral().abs() < 1e-10 * d.max_abs());
            let neg: Vec<f64> = q.iter().map(|v| -v).collect();
            let dn = c.spread_dipole(&ops, &neg);
            for (a, b) in d.values().iter().zip(dn.values()) {
                assert_abs_diff_eq!(*a, -*b, epsilon = 1e-12 * d.max_abs());
            }
        }
    }
}

#[test]
fn tensor_dipole_examples() {
    let g = unit_box(64);
    let b = circle_boundary(&g, [0.0, 0.0], 0.25, 1.0);
    let ops = DiffOps::new(g, Scheme::Spectral);
    let c = Coupling::new(&b, &g, KernelKind::Peskin4).unwrap();
    let (f, s) = c.spread_tensor_dipole(&ops, &BoundaryVector::zeros(b.len()), 2.0);
    assert_eq!((f.max_abs(), s.max_abs()), (0.0, 0.0));

    // Q = n: Q·n = 1 and A = 2nnᵀ
    let q = BoundaryVector { x: b.normals().iter().map(|n| n[0]).collect(), y: b.normals().iter().map(|n| n[1]).collect() };
    let mu = 0.7;
    let (f, s) = c.spread_tensor_dipole(&ops, &q, mu);
    let ones = c.spread(&vec![1.0; b.len()]);
    for (a, e) in s.values().iter().zip(ones.values()) {
        assert_abs_diff_eq!(*a, *e, epsilon = 1e-12);
    }
    let comp = |f: &dyn Fn([f64; 2]) -> f64| c.spread(&b.normals().iter().map(|n| f(*n)).collect::<Vec<_>>());
    let a11 = comp(&|n| 2.0 * n[0] * n[0]);
    let a12 = comp(&|n| 2.0 * n[0] * n[1]);
    let a22 = comp(&|n| 2.0 * n[1] * n[1]);
    let dx = ops.divergence(&VectorField::new(a11, a12.clone()).unwrap());
    let dy = ops.divergence(&VectorField::new(a12, a22).unwrap());
    let scale = f.max_abs();
    for k in 0..g.len() {
        assert_abs_diff_eq!(f.u.values()[k], mu * dx.values()[k], epsilon = 1e-12 * scale);
        assert_abs_diff_eq!(f.v.values()[k], mu * dy.values()[k], epsilon = 1e-12 * scale);
    }

    // sign flip of Q negates both outputs
    let neg = BoundaryVector { x: q.x.iter().map(|v| -v).collect(), y: q.y.iter().map(|v| -v).collect() };
    let (fn_, sn) = c.spread_tensor_dipole(&ops, &neg, mu);
    for k in 0..g.len() {
        assert_abs_diff_eq!(fn_.u.values()[k], -f.u.values()[k], epsilon = 1e-14 * scale);
        assert_abs_diff_eq!(sn.values()[k], -s.values()[k], epsilon = 1e-14);
    }
}

#[test]
fn kernel_too_wide_for_grid() {
    let g = PeriodicGrid::centered(4, 1.0).unwrap();
    let b = ImmersedBoundary::new(
        vec![[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]],
        vec![0.1; 3],
        vec![[1.0, 0.0]; 3],
        Orientation::InteriorIsOmega,
    )
    .unwrap();
    assert!(Coupling::new(&b, &g, KernelKind::Peskin4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spread_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, bspline in any::<bool>()) {
        let g = unit_box(32);
        let b = circle_boundary(&g, [0.0, 0.0], 0.3, 1.0);
        let k = if bspline { KernelKind::BSpline6 } else { KernelKind::Peskin4 };
        let c = Coupling::new(&b, &g, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = random_vec(&mut rng, b.len());
        let f2 = random_vec(&mut rng, b.len());
        let mix: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| a * x + y).collect();
        let lhs = c.spread(&mix);
        let mut rhs = c.spread(&f1);
        rhs.scale(a);
        rhs.axpy(1.0, &c.spread(&f2));
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn interpolation_reproduces_linear_fields(seed in any::<u64>(), bspline in any::<bool>()) {
        // both kernels have vanishing first moments, so linear data is exact
        let g = unit_box(64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, bx, by) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = circle_boundary(&g, [rng.gen_range(-0.05..0.05), 0.0], 0.2, 1.3);
        let k = if bspline { KernelKind::BSpline6 } else { KernelKind::Peskin4 };
        let c = Coupling::new(&b, &g, k).unwrap();
        let u = ScalarField::from_fn(g, |x, y| a + bx * x + by * y);
        for (v, p) in c.interpolate(&u).iter().zip(b.points()) {
            prop_assert!((v - (a + bx * p[0] + by * p[1])).abs() < 1e-12);
        }
    }
}

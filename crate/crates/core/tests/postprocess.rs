use std::f64::consts::PI;

use ibdl_core::postprocess::{near_boundary_interpolate, point_segment_distance, refinement_table, InterpolationPlan};
use ibdl_core::postprocess::fitted_order;
use ibdl_core::*;
use proptest::prelude::*;

fn unit_box(n: usize) -> PeriodicGrid {
    PeriodicGrid::centered(n, 1.0).unwrap()
}

fn circle(g: &PeriodicGrid, c: [f64; 2], r: f64, o: Orientation) -> ImmersedBoundary {
    discretize(&Shape::Circle { center: c, radius: r }, o, g, 1.0).unwrap()
}

fn mask(b: &ImmersedBoundary, g: PeriodicGrid) -> IndicatorMask {
    compute_indicator(b, &DiffOps::new(g, Scheme::Spectral), KernelKind::Peskin4).unwrap()
}

#[test]
fn indicator_extreme_points() {
    let g = unit_box(64);
    let b = circle(&g, [0.0, 0.0], 0.25, Orientation::InteriorIsOmega);
    let m = mask(&b, g);
    let n = g.n();
    assert!(m.inside()[g.index(n / 2, n / 2)]);
    assert!(!m.inside()[g.index(0, 0)]);
    // exterior orientation flips the partition
    let be = circle(&g, [0.0, 0.0], 0.25, Orientation::ExteriorIsOmega);
    let me = mask(&be, g);
    for k in 0..g.len() {
        assert_ne!(m.inside()[k], me.inside()[k]);
    }
}

#[test]
fn indicator_matches_the_polygon_away_from_the_curve() {
    let g = unit_box(128);
    let shape = Shape::Starfish { center: [0.02, -0.01], scale: 0.3 };
    let b = discretize(&shape, Orientation::InteriorIsOmega, &g, 1.0).unwrap();
    let m = mask(&b, g);
    let mut checked = 0;
    for j in 0..g.n() {
        for i in 0..g.n() {
            let x = g.node(i, j);
            let d = b.segments().map(|(a, c)| point_segment_distance(x, b.points()[a], b.points()[c])).fold(f64::INFINITY, f64::min);
            if d > 2.0 * g.h() {
                checked += 1;
                assert_eq!(m.inside()[g.index(i, j)], postprocess::inside_polygon(&b, x), "node ({i}, {j})");
            }
        }
    }
    assert!(checked > g.len() / 2);
}

#[test]
fn inside_fraction_converges_to_the_area() {
    let mut errs = Vec::new();
    for n in [32, 64, 128, 256] {
        let g = unit_box(n);
        let b = circle(&g, [0.0, 0.0], 0.25, Orientation::InteriorIsOmega);
        let frac = mask(&b, g).count_inside() as f64 / g.len() as f64;
        let e = (frac - PI / 16.0).abs();
        assert!(e < 2.0 * PI * 0.25 * g.h(), "N={n}: {frac}");
        errs.push(e);
    }
    assert!(errs[3] < errs[0] / 4.0, "{errs:?}");
}

#[test]
fn disjoint_shapes_flag_their_union() {
    let g = unit_box(128);
    let parts = [
        circle(&g, [-0.2, -0.2], 0.12, Orientation::InteriorIsOmega),
        discretize(&Shape::Ellipse { center: [0.2, 0.15], semi_axes: [0.2, 0.1], rotation: 0.4 }, Orientation::InteriorIsOmega, &g, 1.0)
            .unwrap(),
        discretize(&Shape::Starfish { center: [-0.22, 0.25], scale: 0.12 }, Orientation::InteriorIsOmega, &g, 1.0)
            .unwrap(),
    ];
    let joint = mask(&ImmersedBoundary::concat(&parts).unwrap(), g);
    let single: Vec<IndicatorMask> = parts.iter().map(|p| mask(p, g)).collect();
    for k in 0..g.len() {
        let any = single.iter().any(|m| m.inside()[k]);
        assert_eq!(joint.inside()[k], any, "node {k}");
    }
}

#[test]
fn indicator_is_translation_equivariant() {
    let g = unit_box(64);
    let b = circle(&g, [0.013, -0.021], 0.27, Orientation::InteriorIsOmega);
    let m0 = mask(&b, g);
    let m1 = mask(&b.translated([g.h(), 0.0]), g);
    let n = g.n();
    for j in 0..n {
        for i in 0..n {
            assert_eq!(m0.inside()[g.index(i, j)], m1.inside()[g.index((i + 1) % n, j)]);
        }
    }
}

#[test]
fn near_band_matches_brute_force_distance() {
    let g = unit_box(64);
    let shape = Shape::Ellipse { center: [0.03, 0.0], semi_axes: [0.3, 0.2], rotation: 0.3 };
    for o in [Orientation::InteriorIsOmega, Orientation::ExteriorIsOmega] {
        let b = discretize(&shape, o, &g, 1.0).unwrap();
        for m1 in [0.0, 1.5, 4.0] {
            let mut m = mask(&b, g);
            m.flag_near_boundary(&b, m1);
            for j in 0..g.n() {
                for i in 0..g.n() {
                    let k = g.index(i, j);
                    let x = g.node(i, j);
                    let d = b.segments().map(|(a, c)| point_segment_distance(x, b.points()[a], b.points()[c])).fold(f64::INFINITY, f64::min);
                    let expect = m1 > 0.0 && m.inside()[k] && d <= m1 * g.h();
                    assert_eq!(m.near_boundary()[k], expect, "m1={m1} node ({i}, {j}) d/h={}", d / g.h());
                }
            }
        }
    }
}

fn interp(u: &ScalarField, b: &ImmersedBoundary, ub: &[f64], cfg: InterpolationConfig) -> ScalarField {
    near_boundary_interpolate(u, b, ub, &mask(b, *u.grid()), &cfg).unwrap()
}

#[test]
fn linear_fields_are_reproduced() {
    let g = unit_box(64);
    let cfg = InterpolationConfig::Fixed { m1: 3.0, m2: 4.0 };
    for o in [Orientation::InteriorIsOmega, Orientation::ExteriorIsOmega] {
        let b = discretize(&Shape::Starfish { center: [0.0, 0.0], scale: 0.3 }, o, &g, 1.0).unwrap();
        let lin = |x: f64, y: f64| x + y;
        // pollute the raw field right next to Γ; the band is rebuilt from U_b and x_B samples
        let m = mask(&b, g);
        let exact = ScalarField::from_fn(g, lin);
        let mut raw = exact.clone();
        let mut probe = m.clone();
        probe.flag_near_boundary(&b, 1.0);
        for (k, v) in raw.values_mut().iter_mut().enumerate() {
            if probe.near_boundary()[k] {
                *v += 10.0;
            }
        }
        let ub: Vec<f64> = b.points().iter().map(|p| lin(p[0], p[1])).collect();
        let out = interp(&raw, &b, &ub, cfg);
        for k in 0..g.len() {
            assert!((out.values()[k] - exact.values()[k]).abs() < 1e-12, "node {k}");
        }
        // idempotent
        let again = interp(&out, &b, &ub, cfg);
        for k in 0..g.len() {
            assert!((again.values()[k] - out.values()[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_band_leaves_the_field_untouched() {
    let g = unit_box(32);
    let b = circle(&g, [0.0, 0.0], 0.3, Orientation::InteriorIsOmega);
    let u = ScalarField::from_fn(g, |x, y| (5.0 * x).sin() * y);
    let out = interp(&u, &b, &vec![7.0; b.len()], InterpolationConfig::Fixed { m1: 0.0, m2: 2.0 });
    assert_eq!(out, u);
    let out = interp(&u, &b, &vec![7.0; b.len()], InterpolationConfig::Off);
    assert_eq!(out, u);
}

#[test]
fn smooth_fields_change_by_interpolation_error_only() {
    let f = |x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos();
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        let g = unit_box(n);
        let b = circle(&g, [0.0, 0.0], 0.3, Orientation::InteriorIsOmega);
        let u = ScalarField::from_fn(g, f);
        let ub: Vec<f64> = b.points().iter().map(|p| f(p[0], p[1])).collect();
        let out = interp(&u, &b, &ub, InterpolationConfig::Fixed { m1: 2.0, m2: 4.0 });
        errs.push(out.sub(&u).max_abs());
    }
    assert!(errs.iter().all(|&e| e < 0.05), "{errs:?}");
    assert!(errs[0] / errs[2] > 3.0, "{errs:?}");
}

#[test]
fn interpolation_bands() {
    assert_eq!(InterpolationConfig::LogGrowth.bands(64).unwrap(), (4.0, 6.0));
    assert_eq!(InterpolationConfig::LogGrowth.bands(1024).unwrap(), (12.0, 14.0));
    assert_eq!(InterpolationConfig::LogGrowth.bands(16).unwrap(), (2.0, 4.0));
    assert!(InterpolationConfig::Fixed { m1: 3.0, m2: 3.0 }.bands(64).is_err());
    assert!(InterpolationConfig::Fixed { m1: -1.0, m2: 3.0 }.bands(64).is_err());
}

#[test]
fn plan_counts_flagged_nodes() {
    let g = unit_box(64);
    let b = circle(&g, [0.0, 0.0], 0.3, Orientation::InteriorIsOmega);
    let mut m = mask(&b, g);
    m.flag_near_boundary(&b, 2.0);
    let plan = InterpolationPlan::new(&b, &m, 4.0).unwrap();
    assert_eq!(plan.flagged_count(), m.near_boundary().iter().filter(|&&f| f).count());
    assert!(plan.flagged_count() > 0);
}

#[test]
fn refinement_table_examples() {
    let halving = [(64, 1.0, 2.0, 4.0), (128, 0.5, 1.0, 2.0), (256, 0.25, 0.5, 1.0)];
    for r in refinement_table(&halving).unwrap() {
        assert!((r.l1.unwrap() - 1.0).abs() < 1e-12 && (r.linf.unwrap() - 1.0).abs() < 1e-12);
    }
    let quartering = [(32, 1.0, 1.0, 1.0), (64, 0.25, 0.25, 0.25)];
    let r = &refinement_table(&quartering).unwrap()[0];
    assert!((r.l2.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!((r.n_coarse, r.n_fine), (32, 64));

    let zero = [(32, 1.0, 0.0, 1.0), (64, 0.5, 0.0, 0.5)];
    assert_eq!(refinement_table(&zero).unwrap()[0].l2, None);
    assert!(refinement_table(&halving[..1]).is_err());
    assert!(refinement_table(&[(32, 1.0, 1.0, 1.0), (128, 0.5, 0.5, 0.5)]).is_err());

    let fit = fitted_order(&[(64, 1.0), (128, 0.5), (256, 0.25), (512, 0.125)]).unwrap();
    assert!((fit - 1.0).abs() < 1e-12);
    assert_eq!(fitted_order(&[(64, 1.0)]), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_linear_fields_are_reproduced(a in -2.0..2.0f64, bx in -2.0..2.0f64, by in -2.0..2.0f64,
                                           cx in -0.05..0.05f64, cy in -0.05..0.05f64, r in 0.2..0.35f64) {
        let g = unit_box(64);
        let b = circle(&g, [cx, cy], r, Orientation::ExteriorIsOmega);
        let lin = |x: f64, y: f64| a + bx * x + by * y;
        let u = ScalarField::from_fn(g, lin);
        let ub: Vec<f64> = b.points().iter().map(|p| lin(p[0], p[1])).collect();
        let out = interp(&u, &b, &ub, InterpolationConfig::Fixed { m1: 2.0, m2: 3.5 });
        prop_assert!(out.sub(&u).max_abs() < 1e-11);
    }
}

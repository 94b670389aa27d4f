//! The shipped benchmark configurations.

use crate::config::{
    ExperimentKind, InterpolationPolicy, KernelName, KrylovSection, MethodName, PoissonSolution,
    Problem, RunConfig, SchemeName, StencilName,
};

/// Dimensionless drag of the periodic cylinder array from a high-accuracy
/// boundary integral solver, `(c, D)`.
pub const REFERENCE_DRAG: [(f64, f64); 9] = [
    (0.05, 15.5578),
    (0.1, 24.8317),
    (0.2, 51.5269),
    (0.3, 102.881),
    (0.4, 217.894),
    (0.5, 532.548),
    (0.6, 1763.57),
    (0.7, 13519.3),
    (0.75, 127543.0),
];

pub fn reference_drag(c: f64) -> Option<f64> {
    REFERENCE_DRAG.iter().find(|(rc, _)| (rc - c).abs() < 1e-12).map(|&(_, d)| d)
}

fn base(name: &str, kind: ExperimentKind, grids: &[usize], problem: Problem) -> RunConfig {
    RunConfig {
        name: name.into(),
        kind,
        grids: grids.to_vec(),
        alphas: vec![1.0],
        methods: vec![MethodName::Ibdl],
        scheme: SchemeName::Spectral,
        kernel: None,
        etas: Vec::new(),
        pressure_stencil: None,
        extension: None,
        error_distance: None,
        output: None,
        parallel_rows: false,
        interpolation: InterpolationPolicy::Default,
        krylov: KrylovSection::default(),
        problem,
    }
}

const FD_BANDS: InterpolationPolicy = InterpolationPolicy::Fixed { m1: 6.0, m2: 8.0 };
const BOTH: [MethodName; 2] = [MethodName::Ibsl, MethodName::Ibdl];

pub fn builtin_benchmarks() -> Vec<RunConfig> {
    use ExperimentKind::*;
    let mut v = Vec::new();

    let mut c = base("bessel-helmholtz", IterationTable, &[64, 128, 256, 512, 1024], Problem::BesselHelmholtz { radius: 0.25 });
    c.alphas = vec![2.0, 1.5, 1.0, 0.75];
    c.methods = BOTH.to_vec();
    c.scheme = SchemeName::FiniteDifference;
    c.interpolation = FD_BANDS;
    v.push(c);

    // the single layer does not reach the tolerance within the iteration cap at Δs ≈ 0.75Δx
    let mut c = base("starfish-poisson", ScalarRefine, &[64, 128, 256, 512], Problem::StarfishPoisson { scale: 1.0, box_length: 4.0 });
    c.alphas = vec![2.0];
    c.methods = BOTH.to_vec();
    c.scheme = SchemeName::FiniteDifference;
    c.interpolation = FD_BANDS;
    c.etas = vec![0.0];
    v.push(c);

    let mut c = base(
        "exterior-poisson-completion",
        ScalarRefine,
        &[64, 128, 256, 512],
        Problem::ExteriorPoisson { radius: 0.25, box_length: 8.0, solution: PoissonSolution::Exp },
    );
    c.alphas = vec![0.75];
    c.scheme = SchemeName::FiniteDifference;
    c.interpolation = FD_BANDS;
    c.etas = vec![0.0, 10.0];
    c.error_distance = Some(1.0);
    v.push(c);

    let mut c = base("neumann-circle", ScalarRefine, &[64, 128, 256, 512], Problem::NeumannQuadratic { radius: 0.25 });
    c.alphas = vec![0.75];
    c.scheme = SchemeName::FiniteDifference;
    c.interpolation = FD_BANDS;
    v.push(c);

    let mut c = base("brinkman-manufactured", FluidRefine, &[32, 64, 128, 256, 512], Problem::BrinkmanManufactured { radius: 0.75 });
    c.alphas = vec![1.5];
    c.methods = BOTH.to_vec();
    c.interpolation = InterpolationPolicy::LogGrowth;
    c.error_distance = Some(0.02);
    v.push(c);

    let mut c = base("eta-sweep", FluidRefine, &[64, 128, 256], Problem::ExteriorBrinkman { radius: 0.75, k: 0.0 });
    c.etas = vec![0.1, 1.0, 10.0, 100.0];
    c.interpolation = InterpolationPolicy::LogGrowth;
    c.error_distance = Some(0.02);
    v.push(c);

    let mut c = base("fd-method2", FluidRefine, &[64, 128, 256, 512], Problem::ManufacturedStokes { radius: 0.25 });
    c.alphas = vec![0.75];
    c.scheme = SchemeName::FiniteDifference;
    c.kernel = Some(KernelName::Bspline6);
    c.pressure_stencil = Some(StencilName::Standard5);
    c.interpolation = FD_BANDS;
    c.error_distance = Some(0.02);
    v.push(c);

    let mut c = base(
        "cylinder-drag",
        DragSweep,
        &[1024],
        Problem::CylinderArray { concentrations: vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7] },
    );
    c.etas = vec![10.0];
    c.interpolation = InterpolationPolicy::LogGrowth;
    v.push(c);

    let mut c = base("nine-ellipses", IterationTable, &[64, 128, 256, 512], Problem::NineEllipses);
    c.alphas = vec![2.0, 1.5, 1.0];
    c.methods = BOTH.to_vec();
    c.etas = vec![10.0];
    c.interpolation = InterpolationPolicy::ScaledLog { factor: 1.0 };
    v.push(c);

    let mut c = base(
        "ns-re10",
        NsRun,
        &[1024],
        Problem::Cylinder { reynolds: 10.0, steps: None, t_end: Some(144.0), average_from: 54.0, snapshots: true },
    );
    c.methods = BOTH.to_vec();
    v.push(c);

    let c = base(
        "ns-re100",
        NsRun,
        &[1024],
        Problem::Cylinder { reynolds: 100.0, steps: None, t_end: Some(234.0), average_from: 150.0, snapshots: true },
    );
    v.push(c);

    v
}

pub fn benchmark(name: &str) -> Option<RunConfig> {
    builtin_benchmarks().into_iter().find(|c| c.name == name)
}

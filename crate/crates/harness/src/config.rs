//! Declarative run descriptions (TOML; grammar in `docs/config.md`).

use std::path::{Path, PathBuf};

use ibdl_core::{
    discretize, Extension, InterpolationConfig, KernelKind, KrylovOptions, Method, Orientation, PeriodicGrid, Scheme,
    Shape, Stencil,
};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Errors against an analytic scalar solution per (method, α, N), plus observed orders.
    ScalarRefine,
    /// Velocity and pressure errors against an analytic Brinkman/Stokes solution.
    FluidRefine,
    /// Krylov iteration counts per (N, α, method).
    IterationTable,
    /// Dimensionless drag on a periodic cylinder array per (c, N, method).
    DragSweep,
    /// Navier–Stokes flow past a cylinder: force time series and summary.
    NsRun,
    /// Interior/exterior flagging of grid nodes for a shape.
    IndicatorDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Ibsl,
    Ibdl,
}

impl MethodName {
    pub fn method(self) -> Method {
        match self {
            MethodName::Ibsl => Method::Ibsl,
            MethodName::Ibdl => Method::Ibdl,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodName::Ibsl => "ibsl",
            MethodName::Ibdl => "ibdl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    #[default]
    Spectral,
    FiniteDifference,
}

impl SchemeName {
    pub fn scheme(self) -> Scheme {
        match self {
            SchemeName::Spectral => Scheme::Spectral,
            SchemeName::FiniteDifference => Scheme::FiniteDifference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelName {
    Peskin4,
    Bspline6,
}

impl KernelName {
    pub fn kernel(self) -> KernelKind {
        match self {
            KernelName::Peskin4 => KernelKind::Peskin4,
            KernelName::Bspline6 => KernelKind::BSpline6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StencilName {
    Standard5,
    Wide,
}

impl StencilName {
    pub fn stencil(self) -> Stencil {
        match self {
            StencilName::Standard5 => Stencil::Standard5,
            StencilName::Wide => Stencil::Wide,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionName {
    Zero,
    Smooth,
    MeanBalance,
}

impl ExtensionName {
    pub fn extension(self) -> Extension {
        match self {
            ExtensionName::Zero => Extension::Zero,
            ExtensionName::Smooth => Extension::Smooth,
            ExtensionName::MeanBalance => Extension::MeanBalance,
        }
    }
}

/// Near-boundary interpolation bands, resolved per grid size.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InterpolationPolicy {
    /// The solver's default for the scheme.
    #[default]
    Default,
    Off,
    Fixed { m1: f64, m2: f64 },
    /// `m1 = 2(log₂N − 4)`, `m2 = m1 + 2`.
    LogGrowth,
    /// `m1 = max(1, factor·(log₂N − 4))`, `m2 = m1 + 2`.
    ScaledLog { factor: f64 },
}

impl InterpolationPolicy {
    /// `None` leaves the choice to the solver.
    pub fn resolve(self, n: usize) -> Option<InterpolationConfig> {
        match self {
            InterpolationPolicy::Default => None,
            InterpolationPolicy::Off => Some(InterpolationConfig::Off),
            InterpolationPolicy::Fixed { m1, m2 } => Some(InterpolationConfig::Fixed { m1, m2 }),
            InterpolationPolicy::LogGrowth => Some(InterpolationConfig::LogGrowth),
            InterpolationPolicy::ScaledLog { factor } => {
                let m1 = (factor * ((n as f64).log2() - 4.0)).max(1.0);
                Some(InterpolationConfig::Fixed { m1, m2: m1 + 2.0 })
            }
        }
    }
}

/// Krylov stopping rule; `max_iter` defaults to `10·n_unknowns + 1000`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrylovSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for KrylovSection {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: None }
    }
}

impl KrylovSection {
    pub fn options(&self, unknowns: usize) -> KrylovOptions {
        let base = KrylovOptions::for_boundary(unknowns);
        KrylovOptions::new(self.tol, self.max_iter.unwrap_or(base.max_iter))
    }
}

/// Analytic boundary used by `indicator-demo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_axes: [f64; 2], rotation: f64 },
    Starfish { center: [f64; 2], scale: f64 },
}

impl ShapeSpec {
    pub fn shape(&self) -> Shape {
        match *self {
            ShapeSpec::Circle { center, radius } => Shape::Circle { center, radius },
            ShapeSpec::Ellipse { center, semi_axes, rotation } => Shape::Ellipse { center, semi_axes, rotation },
            ShapeSpec::Starfish { center, scale } => Shape::Starfish { center, scale },
        }
    }

    /// Area enclosed by the exact curve.
    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            ShapeSpec::Circle { radius, .. } => PI * radius * radius,
            ShapeSpec::Ellipse { semi_axes, .. } => PI * semi_axes[0] * semi_axes[1],
            // ½∮r² dφ with r = s(1 + sin(5φ)/4)
            ShapeSpec::Starfish { scale, .. } => PI * scale * scale * (1.0 + 1.0 / 32.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonSolution {
    /// `u = e^{sin(2πx/L)}`.
    Exp,
    /// `u = sin(2πx/L) − cos(2πy/L)`.
    Trig,
}

/// Boundary value problem (or flow) a run is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Problem {
    /// `Δu − u = 0` inside a circle in [−½, ½]², `u = I₂(r) sin 2θ / I₂(R)`.
    BesselHelmholtz { radius: f64 },
    /// Poisson outside a starfish in [−L/2, L/2]², `u = sin(πx/2) − cos(πy/2)`.
    StarfishPoisson { scale: f64, box_length: f64 },
    /// Poisson outside a circle in [−L/2, L/2]².
    ExteriorPoisson { radius: f64, box_length: f64, solution: PoissonSolution },
    /// `Δu − u = −(x² − y²)` inside a circle with Neumann data, `u = x² − y²`.
    NeumannQuadratic { radius: f64 },
    /// Brinkman (k² = 1) inside a circle in [−1, 1]², `u = (e^{sin x}cos y, −cos x e^{sin x}sin y)`, `p = e^{cos y}`.
    BrinkmanManufactured { radius: f64 },
    /// Brinkman with reaction `k²` outside a circle in [−1, 1]², the π-scaled
    /// version of the solution above.
    ExteriorBrinkman { radius: f64, k: f64 },
    /// Stokes inside a circle in [−½, ½]², `u = sin y − x e^{xy}`, `v = cos x + y e^{xy}`, `p = e^{x+y}`.
    ManufacturedStokes { radius: f64 },
    /// Stokes flow driven by g = (−1, 0) through a periodic cylinder array in [−½, ½]².
    CylinderArray { concentrations: Vec<f64> },
    /// Stokes flow driven by g = (−1, 0) past nine ellipses in [−2, 2]².
    NineEllipses,
    /// Navier–Stokes flow past a cylinder in [0, 8]².
    Cylinder {
        reynolds: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_end: Option<f64>,
        /// Start of the drag-averaging and Strouhal window.
        average_from: f64,
        /// Write velocity and pressure snapshots after the last step.
        #[serde(default)]
        snapshots: bool,
    },
    /// Flag grid nodes inside a shape in [−L/2, L/2]².
    Indicator { shape: ShapeSpec, box_length: f64 },
}

/// The nine ellipses: (center, semi-axes, rotation) in [−2, 2]².
pub const NINE_ELLIPSES: [([f64; 2], [f64; 2], f64); 9] = [
    ([-1.3, -1.25], [0.35, 0.2], 0.3),
    ([0.05, -1.35], [0.25, 0.15], -0.7),
    ([1.3, -1.1], [0.3, 0.22], 1.2),
    ([-1.25, 0.1], [0.2, 0.12], 2.0),
    ([-0.1, 0.05], [0.4, 0.25], 0.9),
    ([1.25, 0.2], [0.22, 0.18], -0.4),
    ([-1.2, 1.35], [0.3, 0.15], -1.1),
    ([0.15, 1.3], [0.18, 0.1], 0.1),
    ([1.35, 1.4], [0.28, 0.2], 0.6),
];

/// Broad family of a problem, deciding which experiment kinds accept it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Scalar elliptic problem with a known solution.
    Scalar,
    /// Brinkman/Stokes problem with a known solution.
    Fluid,
    /// Stokes problem without a closed-form solution.
    Flow,
    NavierStokes,
    Indicator,
}

impl Problem {
    pub fn family(&self) -> Family {
        match self {
            Problem::BesselHelmholtz { .. }
            | Problem::StarfishPoisson { .. }
            | Problem::ExteriorPoisson { .. }
            | Problem::NeumannQuadratic { .. } => Family::Scalar,
            Problem::BrinkmanManufactured { .. } | Problem::ExteriorBrinkman { .. } | Problem::ManufacturedStokes { .. } => {
                Family::Fluid
            }
            Problem::CylinderArray { .. } | Problem::NineEllipses => Family::Flow,
            Problem::Cylinder { .. } => Family::NavierStokes,
            Problem::Indicator { .. } => Family::Indicator,
        }
    }

    /// Side length of the periodic box.
    pub fn box_length(&self) -> f64 {
        match self {
            Problem::BesselHelmholtz { .. }
            | Problem::NeumannQuadratic { .. }
            | Problem::ManufacturedStokes { .. }
            | Problem::CylinderArray { .. } => 1.0,
            Problem::BrinkmanManufactured { .. } | Problem::ExteriorBrinkman { .. } => 2.0,
            Problem::NineEllipses => 4.0,
            Problem::Cylinder { .. } => 8.0,
            Problem::StarfishPoisson { box_length, .. }
            | Problem::ExteriorPoisson { box_length, .. }
            | Problem::Indicator { box_length, .. } => *box_length,
        }
    }

    /// Periodic grid for `n` points per side.
    pub fn grid(&self, n: usize) -> ibdl_core::Result<PeriodicGrid> {
        match self {
            Problem::Cylinder { .. } => PeriodicGrid::new(n, [0.0, 0.0], 8.0),
            _ => PeriodicGrid::centered(n, self.box_length()),
        }
    }

    /// Curves with their orientation; `c` selects the cylinder-array concentration.
    pub fn shapes(&self, c: Option<f64>) -> (Vec<Shape>, Orientation) {
        use Orientation::*;
        let circle = |radius: f64| Shape::Circle { center: [0.0, 0.0], radius };
        match self {
            Problem::BesselHelmholtz { radius }
            | Problem::NeumannQuadratic { radius }
            | Problem::BrinkmanManufactured { radius }
            | Problem::ManufacturedStokes { radius } => (vec![circle(*radius)], InteriorIsOmega),
            Problem::StarfishPoisson { scale, .. } => {
                (vec![Shape::Starfish { center: [0.0, 0.0], scale: *scale }], ExteriorIsOmega)
            }
            Problem::ExteriorPoisson { radius, .. } | Problem::ExteriorBrinkman { radius, .. } => {
                (vec![circle(*radius)], ExteriorIsOmega)
            }
            Problem::CylinderArray { concentrations } => {
                let c = c.unwrap_or(concentrations[0]);
                (vec![circle((c / std::f64::consts::PI).sqrt())], ExteriorIsOmega)
            }
            Problem::NineEllipses => (
                NINE_ELLIPSES
                    .iter()
                    .map(|&(center, semi_axes, rotation)| Shape::Ellipse { center, semi_axes, rotation })
                    .collect(),
                ExteriorIsOmega,
            ),
            Problem::Cylinder { .. } => {
                (vec![Shape::Circle { center: [1.85, 4.0], radius: 0.15 }], ExteriorIsOmega)
            }
            Problem::Indicator { shape, .. } => (vec![shape.shape()], InteriorIsOmega),
        }
    }
}

fn default_alphas() -> Vec<f64> {
    vec![1.0]
}

fn default_methods() -> Vec<MethodName> {
    vec![MethodName::Ibdl]
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub kind: ExperimentKind,
    /// Grid sizes N; strictly increasing powers of two.
    pub grids: Vec<usize>,
    /// Boundary point spacings Δs ≈ αΔx.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelName>,
    /// Completion coefficients η to sweep; empty means the solver default.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub etas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure_stencil: Option<StencilName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionName>,
    /// Also report errors on the part of Ω at least this far from Γ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_distance: Option<f64>,
    /// Output directory; defaults to `results/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Run the rows of the sweep concurrently.
    #[serde(default)]
    pub parallel_rows: bool,
    #[serde(default)]
    pub interpolation: InterpolationPolicy,
    #[serde(default)]
    pub krylov: KrylovSection,
    pub problem: Problem,
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Parse(m) => HarnessError::Parse(format!("{}: {m}", path.display())),
            HarnessError::Invalid(m) => HarnessError::Invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// The η values of the sweep; `None` stands for the solver default.
    pub fn eta_list(&self) -> Vec<Option<f64>> {
        if self.etas.is_empty() {
            vec![None]
        } else {
            self.etas.iter().map(|&e| Some(e)).collect()
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| Path::new("results").join(&self.name))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &str, msg: String| Err(HarnessError::Invalid(format!("field `{field}`: {msg}")));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return bad("name", format!("{:?} must be non-empty and use only [A-Za-z0-9_-]", self.name));
        }
        if self.grids.is_empty() {
            return bad("grids", "grid list is empty".into());
        }
        for (k, &n) in self.grids.iter().enumerate() {
            if n < 8 || !n.is_power_of_two() {
                return bad("grids", format!("entry {k} ({n}) is not a power of two ≥ 8"));
            }
            if k > 0 && n <= self.grids[k - 1] {
                return bad("grids", format!("entries must be strictly increasing ({} then {n})", self.grids[k - 1]));
            }
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad("alphas", "need at least one positive spacing ratio".into());
        }
        if self.methods.is_empty() {
            return bad("methods", "need at least one method".into());
        }
        if let Some(eta) = self.etas.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return bad("etas", format!("{eta} must be finite and ≥ 0"));
        }
        if let Some(d) = self.error_distance {
            if !(d.is_finite() && d >= 0.0) {
                return bad("error_distance", format!("{d} must be finite and ≥ 0"));
            }
        }
        if !(self.krylov.tol > 0.0 && self.krylov.tol < 1.0) || self.krylov.max_iter == Some(0) {
            return bad("krylov", "need 0 < tol < 1 and max_iter ≥ 1".into());
        }
        match self.interpolation {
            InterpolationPolicy::Fixed { m1, m2 } if !(m1 >= 0.0 && m2 > m1) => {
                return bad("interpolation", format!("need m2 > m1 ≥ 0 (got {m1}, {m2})"));
            }
            InterpolationPolicy::ScaledLog { factor } if !(factor.is_finite() && factor > 0.0) => {
                return bad("interpolation", format!("factor {factor} must be positive"));
            }
            _ => {}
        }
        self.validate_problem()
    }

    fn validate_problem(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Invalid(format!("section `problem`: {msg}")));
        let family = self.problem.family();
        let accepted = match self.kind {
            ExperimentKind::ScalarRefine => family == Family::Scalar,
            ExperimentKind::FluidRefine => family == Family::Fluid,
            ExperimentKind::IterationTable => matches!(family, Family::Scalar | Family::Fluid | Family::Flow),
            ExperimentKind::DragSweep => matches!(self.problem, Problem::CylinderArray { .. }),
            ExperimentKind::NsRun => family == Family::NavierStokes,
            ExperimentKind::IndicatorDemo => family == Family::Indicator,
        };
        if !accepted {
            return bad(format!("{:?} cannot be used with kind {:?}", self.problem, self.kind));
        }
        if self.kind == ExperimentKind::NsRun && self.etas.len() > 1 {
            return bad("ns-run takes at most one η".into());
        }
        if matches!(self.problem, Problem::NeumannQuadratic { .. }) && self.methods.contains(&MethodName::Ibsl) {
            return bad("the single layer method cannot impose Neumann data".into());
        }
        let concentrations: Vec<Option<f64>> = match &self.problem {
            Problem::CylinderArray { concentrations } => {
                if concentrations.is_empty() {
                    return bad("concentrations list is empty".into());
                }
                let cmax = std::f64::consts::PI / 4.0;
                if let Some(c) = concentrations.iter().find(|c| !(**c > 0.0 && **c < cmax)) {
                    return bad(format!("concentration {c} outside (0, π/4)"));
                }
                concentrations.iter().map(|&c| Some(c)).collect()
            }
            _ => vec![None],
        };
        match &self.problem {
            Problem::Cylinder { reynolds, steps, t_end, average_from, .. } => {
                if !(reynolds.is_finite() && *reynolds > 0.0) {
                    return bad(format!("reynolds {reynolds} must be positive"));
                }
                if steps.is_some() == t_end.is_some() {
                    return bad("give exactly one of `steps` and `t_end`".into());
                }
                if steps == &Some(0) || t_end.is_some_and(|t| !(t > 0.0)) || !(*average_from >= 0.0) {
                    return bad("run length and averaging start must be positive".into());
                }
            }
            Problem::ExteriorBrinkman { k, .. } if !(k.is_finite() && *k >= 0.0) => {
                return bad(format!("k = {k} must be ≥ 0"));
            }
            _ => {}
        }
        for &n in &self.grids {
            let grid = self.problem.grid(n).map_err(|e| HarnessError::Invalid(format!("N = {n}: {e}")))?;
            for &c in &concentrations {
                let (shapes, orientation) = self.problem.shapes(c);
                for &alpha in &self.alphas {
                    for shape in &shapes {
                        discretize(shape, orientation, &grid, alpha).map_err(|e| {
                            HarnessError::Invalid(format!("section `problem`: boundary not constructible at N = {n}, α = {alpha}: {e}"))
                        })?;
                    }
                }
            }
        }
        Ok(())
    }
}

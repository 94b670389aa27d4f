//! Executes a [`RunConfig`] and produces its result tables.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ibdl_core::navier_stokes::{strouhal, NSConfig, NSState, NavierStokes};
use ibdl_core::oracles::{drag_dense, drag_dilute};
use ibdl_core::postprocess::{fitted_order, indicator_field};
use ibdl_core::{
    compute_indicator, masked_norms, net_force_torque, solve_ibdl_fluid, solve_ibdl_neumann, solve_ibdl_scalar,
    solve_ibsl_brinkman, solve_ibsl_helmholtz, solve_ibsl_poisson, solve_ibsl_stokes, BoundaryCondition, DiffOps,
    FluidSolution, ForceModel, KernelKind, Method, Norms, ScalarField, ScalarSolution, SolveReport,
};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentKind, InterpolationPolicy, MethodName, Problem, RunConfig};
use crate::problems::{boundary, fluid_case, scalar_case};
use crate::table::{col, Column, ResultTable, Value};
use crate::{benchmarks, snapshot, HarnessError};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the configured output directory.
    pub out: Option<PathBuf>,
    /// Write CSV, schema and snapshot files (otherwise tables stay in memory).
    pub write: bool,
    /// Report Navier–Stokes progress on stderr.
    pub progress: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<ResultTable>,
    /// Files written (empty unless `write`).
    pub files: Vec<PathBuf>,
    /// One message per failed row.
    pub failures: Vec<String>,
}

impl RunOutput {
    pub fn table(&self, stem: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.stem == stem)
    }
}

/// SHA-256 of the canonical serialization.
pub fn config_hash(cfg: &RunConfig) -> String {
    Sha256::digest(cfg.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every row of `cfg`. Row failures are reported in `failures` and in
/// the `status` column; only configuration and I/O problems abort the run.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let dir = opts.out.clone().unwrap_or_else(|| cfg.output_dir());
    let mut ctx = Ctx { cfg, dir: opts.write.then_some(dir.clone()), progress: opts.progress, files: Vec::new(), failures: Vec::new() };
    let mut tables = match cfg.kind {
        ExperimentKind::ScalarRefine => ctx.scalar_refine()?,
        ExperimentKind::FluidRefine => ctx.fluid_refine()?,
        ExperimentKind::IterationTable => ctx.iteration_table()?,
        ExperimentKind::DragSweep => ctx.drag_sweep()?,
        ExperimentKind::NsRun => ctx.ns_run()?,
        ExperimentKind::IndicatorDemo => ctx.indicator_demo()?,
    };
    let wall = start.elapsed().as_secs_f64();
    let hash = config_hash(cfg);
    for t in &mut tables {
        t.metadata = vec![
            ("run".into(), cfg.name.clone()),
            ("table".into(), t.title.clone()),
            ("config_hash".into(), format!("sha256:{hash}")),
            ("generator".into(), format!("ibdl {}", env!("CARGO_PKG_VERSION"))),
            ("wall_time_s".into(), format!("{wall:.3}")),
            ("failed_rows".into(), ctx.failures.len().to_string()),
        ];
    }
    let mut files = std::mem::take(&mut ctx.files);
    if opts.write {
        for t in &tables {
            files.push(t.write(&dir)?);
        }
        let cfg_path = dir.join(format!("{}.config.toml", cfg.name));
        std::fs::write(&cfg_path, cfg.to_toml()).map_err(|e| HarnessError::Io(format!("{}: {e}", cfg_path.display())))?;
        files.push(cfg_path);
    }
    Ok(RunOutput { tables, files, failures: ctx.failures })
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    dir: Option<PathBuf>,
    progress: bool,
    files: Vec<PathBuf>,
    failures: Vec<String>,
}

type RowResult = Result<Vec<Value>, String>;

fn report_cells(r: &SolveReport) -> Vec<Value> {
    vec![r.iterations.into(), r.converged.into(), r.stagnated.into()]
}

fn norm_cells(n: Option<Norms>) -> Vec<Value> {
    match n {
        Some(n) => vec![n.l1.into(), n.l2.into(), n.linf.into()],
        None => vec![Value::Missing; 3],
    }
}

fn norm_cols(prefix: &str, what: &str) -> Vec<Column> {
    ["l1", "l2", "linf"]
        .iter()
        .map(|k| col(&format!("{prefix}{k}"), "float", &format!("{k} norm of the {what} (area-normalized)")))
        .collect()
}

fn report_cols() -> Vec<Column> {
    vec![
        col("iterations", "int", "Krylov iterations (MINRES for the single layer, GMRES for the double layer)"),
        col("converged", "int", "1 if the relative residual reached the tolerance"),
        col("stagnated", "int", "1 if the Krylov method stopped making progress"),
    ]
}

fn eta_col() -> Column {
    col("eta", "float", "completion coefficient η (empty: solver default)")
}

fn refine_key_cols() -> Vec<Column> {
    vec![
        col("method", "text", "ibsl or ibdl"),
        eta_col(),
        col("alpha", "float", "boundary point spacing Δs/Δx"),
        col("n", "int", "grid points per side"),
        col("n_ib", "int", "boundary points"),
    ]
}

fn status_col() -> Column {
    col("status", "text", "ok, not converged, or the error that aborted this row")
}

impl Ctx<'_> {
    /// Evaluates `rows` (in parallel when configured) and turns failures
    /// into rows of missing values.
    fn collect<T: Sync>(
        &mut self,
        table: &mut ResultTable,
        rows: &[T],
        keys: impl Fn(&T) -> Vec<Value>,
        eval: impl Fn(&T) -> RowResult + Sync + Send,
    ) {
        let results: Vec<RowResult> =
            if self.cfg.parallel_rows { rows.par_iter().map(&eval).collect() } else { rows.iter().map(&eval).collect() };
        let width = table.columns.len();
        let converged = table.column_index("converged");
        for (row, res) in rows.iter().zip(results) {
            let mut cells = keys(row);
            let label = |cells: &[Value]| {
                table.columns.iter().zip(cells).map(|(c, v)| format!("{}={v}", c.name)).collect::<Vec<_>>().join(", ")
            };
            match res {
                Ok(v) => {
                    cells.extend(v);
                    // a Krylov solve that missed its tolerance keeps its numbers but fails the run
                    if converged.is_some_and(|k| cells[k] == Value::Int(0)) {
                        self.failures.push(format!("{} ({}): Krylov solve did not converge", self.cfg.name, label(&cells)));
                        cells.push("not converged".into());
                    } else {
                        cells.push("ok".into());
                    }
                }
                Err(e) => {
                    self.failures.push(format!("{} ({}): {e}", self.cfg.name, label(&cells)));
                    cells.resize(width - 1, Value::Missing);
                    cells.push(format!("error: {e}").into());
                }
            }
            table.push(cells);
        }
    }

    /// (method, η, α, N) with N varying fastest.
    fn grid_rows(&self) -> Vec<(MethodName, Option<f64>, f64, usize)> {
        let c = self.cfg;
        let mut v = Vec::new();
        for &m in &c.methods {
            for eta in c.eta_list() {
                for &a in &c.alphas {
                    for &n in &c.grids {
                        v.push((m, eta, a, n));
                    }
                }
            }
        }
        v
    }

    fn scalar_refine(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let away = cfg.error_distance;
        let neumann = matches!(cfg.problem, Problem::NeumannQuadratic { .. });
        let mut cols = refine_key_cols();
        cols.extend(report_cols());
        cols.extend(norm_cols("", "solution error on Ω"));
        if away.is_some() {
            cols.extend(norm_cols("away_", "solution error on Ω at least `error_distance` from Γ"));
        }
        if neumann {
            cols.push(col("ub_linf", "float", "max error of the recovered boundary values U_b"));
        }
        cols.push(status_col());
        let mut t = ResultTable::new(&cfg.name, "solution errors under grid refinement", cols);
        let rows = self.grid_rows();
        self.collect(
            &mut t,
            &rows,
            |&(m, eta, a, n)| vec![m.label().into(), eta.into(), a.into(), n.into()],
            |&(m, eta, a, n)| {
                let case = scalar_case(cfg, n, a, eta).map_err(|e| e.to_string())?;
                let p = &case.problem;
                let s = solve_scalar(p, m).map_err(|e| e.to_string())?;
                let exact = ScalarField::from_fn(p.grid, &case.exact);
                let err = s.u.sub(&exact);
                let mut v = vec![p.boundary.len().into()];
                v.extend(report_cells(&s.report));
                v.extend(norm_cells(Some(masked_norms(&err, &s.mask).map_err(|e| e.to_string())?)));
                if let Some(d) = away {
                    v.extend(norm_cells(Some(s.mask.norms_away_from(&err, &p.boundary, d).map_err(|e| e.to_string())?)));
                }
                if neumann {
                    let e = p
                        .boundary
                        .points()
                        .iter()
                        .zip(&s.density)
                        .map(|(q, u)| (u - (case.exact)(q[0], q[1])).abs())
                        .fold(0.0, f64::max);
                    v.push(e.into());
                }
                Ok(v)
            },
        );
        let mut q: Vec<&str> = vec!["l1", "l2", "linf"];
        if away.is_some() {
            q.extend(["away_l1", "away_l2", "away_linf"]);
        }
        if neumann {
            q.push("ub_linf");
        }
        let orders = orders_table(&t, &format!("{}_orders", cfg.name), &q);
        Ok(vec![t, orders])
    }

    fn fluid_refine(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let d = cfg.error_distance.unwrap_or(0.0);
        let mut cols = refine_key_cols();
        cols.extend(report_cols());
        cols.extend(norm_cols("u_", "horizontal velocity error on Ω"));
        cols.extend(norm_cols("v_", "vertical velocity error on Ω"));
        cols.extend(norm_cols(
            "p_",
            "pressure error on Ω at least `error_distance` from Γ, after removing its mean there",
        ));
        cols.push(status_col());
        let mut t = ResultTable::new(&cfg.name, "velocity and pressure errors under grid refinement", cols);
        let rows = self.grid_rows();
        self.collect(
            &mut t,
            &rows,
            |&(m, eta, a, n)| vec![m.label().into(), eta.into(), a.into(), n.into()],
            |&(m, eta, a, n)| {
                let case = fluid_case(cfg, n, a, eta, None).map_err(|e| e.to_string())?;
                let p = &case.problem;
                let exact = case.exact.as_ref().expect("refinement problems have exact solutions");
                let s = solve_fluid(p, m).map_err(|e| e.to_string())?;
                let g = p.grid;
                let eu = s.velocity.u.sub(&ScalarField::from_fn(g, |x, y| exact(x, y).0[0]));
                let ev = s.velocity.v.sub(&ScalarField::from_fn(g, |x, y| exact(x, y).0[1]));
                let mut ep = s.pressure.sub(&ScalarField::from_fn(g, |x, y| exact(x, y).1));
                let region = s.mask.away_from(&p.boundary, d);
                let (sum, count) = ep.values().iter().zip(&region).filter(|(_, k)| **k).fold((0.0, 0usize), |(s, c), (v, _)| (s + v, c + 1));
                if count == 0 {
                    return Err("no pressure nodes left at this error distance".into());
                }
                ep.add_constant(-sum / count as f64);
                let e = |r: ibdl_core::Result<Norms>| r.map(Some).map_err(|e| e.to_string());
                let mut v = vec![p.boundary.len().into()];
                v.extend(report_cells(&s.report));
                v.extend(norm_cells(e(masked_norms(&eu, &s.mask))?));
                v.extend(norm_cells(e(masked_norms(&ev, &s.mask))?));
                v.extend(norm_cells(e(s.mask.norms_away_from(&ep, &p.boundary, d))?));
                Ok(v)
            },
        );
        let q = ["u_l1", "u_l2", "u_linf", "v_l1", "v_l2", "v_linf", "p_l1", "p_l2", "p_linf"];
        let orders = orders_table(&t, &format!("{}_orders", cfg.name), &q);
        Ok(vec![t, orders])
    }

    fn iteration_table(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let mut cols = vec![
            col("n", "int", "grid points per side"),
            col("alpha", "float", "boundary point spacing Δs/Δx"),
            eta_col(),
            col("method", "text", "ibsl or ibdl"),
            col("n_ib", "int", "boundary points"),
        ];
        cols.extend(report_cols());
        cols.push(col("final_residual", "float", "relative residual of the returned density"));
        cols.push(status_col());
        let mut t = ResultTable::new(&cfg.name, "Krylov iteration counts", cols);
        let mut rows = Vec::new();
        for &n in &cfg.grids {
            for &a in &cfg.alphas {
                for eta in cfg.eta_list() {
                    for &m in &cfg.methods {
                        rows.push((n, a, eta, m));
                    }
                }
            }
        }
        let scalar = cfg.problem.family() == crate::config::Family::Scalar;
        self.collect(
            &mut t,
            &rows,
            |&(n, a, eta, m)| vec![n.into(), a.into(), eta.into(), m.label().into()],
            |&(n, a, eta, m)| {
                let (n_ib, r) = if scalar {
                    let case = scalar_case(cfg, n, a, eta).map_err(|e| e.to_string())?;
                    (case.problem.boundary.len(), solve_scalar(&case.problem, m).map_err(|e| e.to_string())?.report)
                } else {
                    let case = fluid_case(cfg, n, a, eta, None).map_err(|e| e.to_string())?;
                    (case.problem.boundary.len(), solve_fluid(&case.problem, m).map_err(|e| e.to_string())?.report)
                };
                let mut v = vec![n_ib.into()];
                v.extend(report_cells(&r));
                v.push(r.final_residual.into());
                Ok(v)
            },
        );
        Ok(vec![t])
    }

    fn drag_sweep(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let Problem::CylinderArray { concentrations } = &cfg.problem else { unreachable!("validated") };
        let mut cols = vec![
            col("c", "float", "area fraction of the cylinder"),
            col("n", "int", "grid points per side"),
            col("alpha", "float", "boundary point spacing Δs/Δx"),
            eta_col(),
            col("method", "text", "ibsl or ibdl"),
        ];
        cols.extend(report_cols());
        cols.extend([
            col("drag", "float", "dimensionless drag D = B₁/(μU)"),
            col("flux", "float", "U, the mean horizontal velocity across the left edge of the box"),
            col("reference", "float", "boundary integral reference value where tabulated"),
            col("dilute", "float", "dilute-array asymptote"),
            col("dense", "float", "dense-array asymptote"),
            status_col(),
        ]);
        let mut t = ResultTable::new(&cfg.name, "dimensionless drag on a periodic cylinder array", cols);
        let mut rows = Vec::new();
        for &c in concentrations {
            for &n in &cfg.grids {
                for &a in &cfg.alphas {
                    for eta in cfg.eta_list() {
                        for &m in &cfg.methods {
                            rows.push((c, n, a, eta, m));
                        }
                    }
                }
            }
        }
        self.collect(
            &mut t,
            &rows,
            |&(c, n, a, eta, m)| vec![c.into(), n.into(), a.into(), eta.into(), m.label().into()],
            |&(c, n, a, eta, m)| {
                let case = fluid_case(cfg, n, a, eta, Some(c)).map_err(|e| e.to_string())?;
                let p = &case.problem;
                let s = solve_fluid(p, m).map_err(|e| e.to_string())?;
                let model = match m {
                    MethodName::Ibsl => ForceModel::Ibsl,
                    MethodName::Ibdl => ForceModel::IbdlCompleted { eta: p.resolved_eta() },
                };
                let f = net_force_torque(&s.density, &p.boundary, model, [0.0, 0.0]).map_err(|e| e.to_string())?;
                let g = p.grid;
                let flux = (0..g.n()).map(|j| s.velocity.u.at(0, j)).sum::<f64>() * g.h();
                let mut v = report_cells(&s.report);
                v.extend([
                    (f.force[0] / (p.mu * flux)).into(),
                    flux.into(),
                    benchmarks::reference_drag(c).into(),
                    drag_dilute(c).into(),
                    drag_dense(c).into(),
                ]);
                Ok(v)
            },
        );
        Ok(vec![t])
    }

    fn ns_run(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let Problem::Cylinder { reynolds, steps, t_end, average_from, snapshots } = cfg.problem else {
            unreachable!("validated")
        };
        let mut summary = ResultTable::new(
            &format!("{}_summary", cfg.name),
            "Navier–Stokes cylinder run summary",
            vec![
                col("method", "text", "ibsl or ibdl"),
                col("n", "int", "grid points per side"),
                col("reynolds", "float", "Re = 2Rρu∞/μ"),
                col("steps", "int", "time steps taken"),
                col("t_final", "float", "final time"),
                col("mean_drag", "float", "drag coefficient averaged over [average_from, t_final]"),
                col("strouhal", "float", "2Rf/u∞ from lift peaks after average_from (empty if undetermined)"),
                col("max_iterations", "int", "largest per-step Krylov iteration count"),
                col("max_divergence", "float", "largest per-step divergence residual"),
                col("finite", "int", "1 if every recorded quantity and the final fields are finite"),
                status_col(),
            ],
        );
        let series_cols = || {
            vec![
                col("step", "int", "step index"),
                col("time", "float", "time after the step"),
                col("drag_coefficient", "float", "C_D = 2B₁/(ρu∞²·2R) from the control box"),
                col("lift_coefficient", "float", "C_L = 2B₂/(ρu∞²·2R) from the control box"),
                col("iterations", "int", "Krylov iterations of the step"),
                col("divergence_residual", "float", "max |∇·u| (modulo the divergence null space) after the step"),
            ]
        };
        let mut tables = Vec::new();
        for &m in &cfg.methods {
            for &n in &cfg.grids {
                let keys: Vec<Value> = vec![m.label().into(), n.into(), reynolds.into()];
                let res = (|| -> Result<(Vec<Value>, ResultTable), String> {
                    let mut ns_cfg = NSConfig::cylinder(n, reynolds, m.method()).map_err(|e| e.to_string())?;
                    ns_cfg.scheme = cfg.scheme.scheme();
                    if let Some(eta) = cfg.etas.first() {
                        ns_cfg.eta = *eta;
                    }
                    if let Some(k) = cfg.kernel {
                        ns_cfg.kernel = k.kernel();
                    }
                    if cfg.interpolation != InterpolationPolicy::Default {
                        ns_cfg.interpolation = cfg.interpolation.resolve(n).expect("non-default policy");
                    }
                    ns_cfg.krylov = cfg.krylov.options(2 * ns_cfg.obstacle.len());
                    let total = steps.unwrap_or_else(|| (t_end.expect("validated") / ns_cfg.dt).round() as usize);
                    let solver = NavierStokes::new(ns_cfg.clone()).map_err(|e| e.to_string())?;
                    let progress = self.progress;
                    let every = (total / 20).max(1);
                    let (state, series) = solver
                        .run(NSState::initial(&ns_cfg), total, |s, r| {
                            if progress && s.step_index % every == 0 {
                                eprintln!(
                                    "{} {} N={n}: step {}/{total} t={:.4} C_D={:.5} its={}",
                                    cfg.name,
                                    m.label(),
                                    s.step_index,
                                    r.time,
                                    r.drag_coefficient,
                                    r.iterations
                                );
                            }
                        })
                        .map_err(|e| e.to_string())?;
                    let mut st = ResultTable::new(
                        &format!("{}_series_{}_{n}", cfg.name, m.label()),
                        "Navier–Stokes force and solver history",
                        series_cols(),
                    );
                    for (k, r) in series.records().iter().enumerate() {
                        st.push(vec![
                            (k + 1).into(),
                            r.time.into(),
                            r.drag_coefficient.into(),
                            r.lift_coefficient.into(),
                            r.iterations.into(),
                            r.divergence_residual.into(),
                        ]);
                    }
                    let recs = series.records();
                    let t_final = state.time;
                    let finite = recs.iter().all(|r| {
                        r.drag_coefficient.is_finite() && r.lift_coefficient.is_finite() && r.divergence_residual.is_finite()
                    }) && state.u_now.is_finite()
                        && state.pressure.is_finite();
                    let mean = series.mean_drag(average_from, t_final + 0.5 * ns_cfg.dt).ok();
                    let st_num = strouhal(&series, ns_cfg.u_inf, ns_cfg.radius, average_from).ok();
                    if snapshots {
                        if let Some(dir) = &self.dir {
                            for (tag, f) in [("u", &state.u_now.u), ("v", &state.u_now.v), ("p", &state.pressure)] {
                                let path = dir.join(format!("{}_{}_{n}_{tag}.bin", cfg.name, m.label()));
                                snapshot::write(&path, f, &format!("{tag} at t = {t_final} ({} method, Re = {reynolds})", m.label()))
                                    .map_err(|e| e.to_string())?;
                            }
                        }
                    }
                    let row = vec![
                        total.into(),
                        t_final.into(),
                        mean.into(),
                        st_num.into(),
                        recs.iter().map(|r| r.iterations).max().into(),
                        recs.iter().map(|r| r.divergence_residual).fold(0.0, f64::max).into(),
                        finite.into(),
                    ];
                    Ok((row, st))
                })();
                let mut cells = keys;
                match res {
                    Ok((row, st)) => {
                        cells.extend(row);
                        cells.push("ok".into());
                        tables.push(st);
                    }
                    Err(e) => {
                        self.failures.push(format!("{} (method={}, n={n}): {e}", cfg.name, m.label()));
                        cells.resize(summary.columns.len() - 1, Value::Missing);
                        cells.push(format!("error: {e}").into());
                    }
                }
                summary.push(cells);
            }
        }
        if let Some(dir) = &self.dir {
            for m in &cfg.methods {
                for n in &cfg.grids {
                    for tag in ["u", "v", "p"] {
                        let p = dir.join(format!("{}_{}_{n}_{tag}.bin", cfg.name, m.label()));
                        if p.exists() {
                            self.files.push(p);
                        }
                    }
                }
            }
        }
        tables.insert(0, summary);
        Ok(tables)
    }

    fn indicator_demo(&mut self) -> Result<Vec<ResultTable>, HarnessError> {
        let cfg = self.cfg;
        let Problem::Indicator { shape, .. } = &cfg.problem else { unreachable!("validated") };
        let kernel = cfg.kernel.map_or(KernelKind::Peskin4, |k| k.kernel());
        let mut t = ResultTable::new(
            &cfg.name,
            "interior/exterior flagging of grid nodes",
            vec![
                col("n", "int", "grid points per side"),
                col("alpha", "float", "boundary point spacing Δs/Δx"),
                col("n_ib", "int", "boundary points"),
                col("inside_nodes", "int", "nodes flagged inside the curve"),
                col("inside_area", "float", "flagged nodes times the cell area"),
                col("exact_area", "float", "area enclosed by the exact curve"),
                col("relative_error", "float", "|inside_area − exact_area| / exact_area"),
                status_col(),
            ],
        );
        let mut rows = Vec::new();
        for &n in &cfg.grids {
            for &a in &cfg.alphas {
                rows.push((n, a));
            }
        }
        let dir = self.dir.clone();
        self.collect(
            &mut t,
            &rows,
            |&(n, a)| vec![n.into(), a.into()],
            |&(n, a)| {
                let grid = cfg.problem.grid(n).map_err(|e| e.to_string())?;
                let b = boundary(&cfg.problem, n, a, None).map_err(|e| e.to_string())?;
                let ops = DiffOps::new(grid, cfg.scheme.scheme());
                let mask = compute_indicator(&b, &ops, kernel).map_err(|e| e.to_string())?;
                if let Some(dir) = &dir {
                    let chi = indicator_field(&b, &ops, kernel).map_err(|e| e.to_string())?;
                    snapshot::write(&snapshot_path(dir, &cfg.name, n, a), &chi, "zero-mean indicator field χ before thresholding")
                        .map_err(|e| e.to_string())?;
                }
                let count = mask.count_inside();
                let area = count as f64 * grid.cell_area();
                let exact = shape.area();
                Ok(vec![b.len().into(), count.into(), area.into(), exact.into(), ((area - exact).abs() / exact).into()])
            },
        );
        if let Some(dir) = &self.dir {
            for &(n, a) in &rows {
                let p = snapshot_path(dir, &cfg.name, n, a);
                if p.exists() {
                    self.files.push(p);
                }
            }
        }
        Ok(vec![t])
    }
}

fn snapshot_path(dir: &Path, name: &str, n: usize, alpha: f64) -> PathBuf {
    dir.join(format!("{name}_chi_{n}_a{alpha}.bin"))
}

pub fn solve_scalar(p: &ibdl_core::ScalarProblem, m: MethodName) -> ibdl_core::Result<ScalarSolution> {
    match (m.method(), &p.condition) {
        (Method::Ibdl, BoundaryCondition::Neumann(_)) => solve_ibdl_neumann(p),
        (Method::Ibdl, _) => solve_ibdl_scalar(p),
        (Method::Ibsl, _) if p.k2 > 0.0 => solve_ibsl_helmholtz(p),
        (Method::Ibsl, _) => solve_ibsl_poisson(p),
    }
}

pub fn solve_fluid(p: &ibdl_core::FluidProblem, m: MethodName) -> ibdl_core::Result<FluidSolution> {
    match m.method() {
        Method::Ibdl => solve_ibdl_fluid(p),
        Method::Ibsl if p.k2 > 0.0 => solve_ibsl_brinkman(p),
        Method::Ibsl => solve_ibsl_stokes(p),
    }
}

/// Observed orders `log(e_coarse/e_fine)/log(N_fine/N_coarse)` per
/// (method, α) group and error column: consecutive pairs, the first-to-last
/// endpoint order and the least-squares fitted slope.
pub fn orders_table(t: &ResultTable, stem: &str, quantities: &[&str]) -> ResultTable {
    let mut out = ResultTable::new(
        stem,
        "observed convergence orders",
        vec![
            col("method", "text", "ibsl or ibdl"),
            eta_col(),
            col("alpha", "float", "boundary point spacing Δs/Δx"),
            col("quantity", "text", "error column of the refinement table"),
            col("kind", "text", "pair (consecutive grids), endpoint (first to last grid) or fit (least squares over all grids)"),
            col("n_coarse", "int", "coarsest grid of the estimate"),
            col("n_fine", "int", "finest grid of the estimate"),
            col("order", "float", "observed order (empty if an error is zero or missing)"),
        ],
    );
    let mut groups: Vec<(Value, Value, Value)> = Vec::new();
    let k = |c: &str| t.column_index(c).unwrap();
    let (km, ke, ka) = (k("method"), k("eta"), k("alpha"));
    for r in t.rows() {
        let key = (r[km].clone(), r[ke].clone(), r[ka].clone());
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (m, eta, a) in groups {
        let rows = t.select(&[("method", m.clone()), ("eta", eta.clone()), ("alpha", a.clone())]);
        for &q in quantities {
            let pts: Vec<(usize, Option<f64>)> =
                rows.iter().map(|r| (t.get(r, "n").unwrap() as usize, t.get(r, q).filter(|e| *e > 0.0))).collect();
            let order = |(n0, e0): (usize, Option<f64>), (n1, e1): (usize, Option<f64>)| -> Value {
                match (e0, e1) {
                    (Some(e0), Some(e1)) => ((e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()).into(),
                    _ => Value::Missing,
                }
            };
            let mut push = |kind: &str, n0: usize, n1: usize, o: Value| {
                out.push(vec![m.clone(), eta.clone(), a.clone(), q.into(), kind.into(), n0.into(), n1.into(), o]);
            };
            for w in pts.windows(2) {
                push("pair", w[0].0, w[1].0, order(w[0], w[1]));
            }
            if pts.len() > 2 {
                let (first, last) = (pts[0], pts[pts.len() - 1]);
                push("endpoint", first.0, last.0, order(first, last));
                let fit: Option<Vec<(usize, f64)>> = pts.iter().map(|&(n, e)| e.map(|e| (n, e))).collect();
                push("fit", first.0, last.0, fit.and_then(|f| fitted_order(&f)).into());
            }
        }
    }
    out
}

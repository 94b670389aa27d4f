//! Indicator flagging, near-boundary interpolation and refinement tables.
//!
//! Double-layer solutions jump across Γ, so grid values within a few
//! meshwidths of the boundary are polluted by the regularized kernel. They
//! are replaced by a linear interpolation between the boundary value at the
//! foot point `x_A` on the polyline and a field sample at `x_B`, `m2`
//! meshwidths into Ω.

use crate::boundary::{dist, ImmersedBoundary};
use crate::coupling::{Coupling, KernelKind};
use crate::error::{Error, Result};
use crate::grid::{norms_over, Norms, PeriodicGrid, ScalarField};
use crate::ops::{DiffOps, Stencil};

/// Partition of grid nodes into Ω / not Ω plus the near-boundary band.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMask {
    grid: PeriodicGrid,
    inside: Vec<bool>,
    near_boundary: Vec<bool>,
}

impl IndicatorMask {
    pub fn from_inside(grid: PeriodicGrid, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != grid.len() {
            return Err(Error::InvalidInput("mask size does not match grid".into()));
        }
        let near_boundary = vec![false; inside.len()];
        Ok(Self { grid, inside, near_boundary })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn near_boundary(&self) -> &[bool] {
        &self.near_boundary
    }

    pub fn count_inside(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Flags Ω nodes within `m1` meshwidths of the polyline through the
    /// boundary points (point-to-segment distance, periodic images).
    pub fn flag_near_boundary(&mut self, b: &ImmersedBoundary, m1: f64) {
        self.near_boundary = vec![false; self.inside.len()];
        if !(m1 > 0.0) {
            return;
        }
        let g = self.grid;
        let h = g.h();
        let reach = m1 * h;
        let [ox, oy] = g.origin();
        let pts = b.points();
        for (ia, ib) in b.segments() {
            let (pa, pb) = (pts[ia], pts[ib]);
            let lo = [pa[0].min(pb[0]) - reach, pa[1].min(pb[1]) - reach];
            let hi = [pa[0].max(pb[0]) + reach, pa[1].max(pb[1]) + reach];
            let i0 = ((lo[0] - ox) / h).floor() as i64;
            let i1 = ((hi[0] - ox) / h).ceil() as i64;
            let j0 = ((lo[1] - oy) / h).floor() as i64;
            let j1 = ((hi[1] - oy) / h).ceil() as i64;
            for jj in j0..=j1 {
                for ii in i0..=i1 {
                    let x = [ox + ii as f64 * h, oy + jj as f64 * h];
                    let k = g.index(g.wrap(ii), g.wrap(jj));
                    if self.inside[k] && !self.near_boundary[k] && point_segment_distance(x, pa, pb) <= reach {
                        self.near_boundary[k] = true;
                    }
                }
            }
        }
    }

    /// Ω nodes at least `d` away from every boundary point.
    pub fn away_from(&self, b: &ImmersedBoundary, d: f64) -> Vec<bool> {
        let g = self.grid;
        let h = g.h();
        let mut keep = self.inside.clone();
        let r = (d / h).ceil() as i64 + 1;
        let [ox, oy] = g.origin();
        for p in b.points() {
            let ci = ((p[0] - ox) / h).round() as i64;
            let cj = ((p[1] - oy) / h).round() as i64;
            for jj in cj - r..=cj + r {
                for ii in ci - r..=ci + r {
                    let x = [ox + ii as f64 * h, oy + jj as f64 * h];
                    if dist(x, *p) < d {
                        keep[g.index(g.wrap(ii), g.wrap(jj))] = false;
                    }
                }
            }
        }
        keep
    }

    /// Norms restricted to Ω nodes at least `d` from the boundary points.
    pub fn norms_away_from(&self, err: &ScalarField, b: &ImmersedBoundary, d: f64) -> Result<Norms> {
        norms_over(err.values(), &self.away_from(b, d))
    }
}

/// Distance from `x` to the segment `[a, b]`.
pub fn point_segment_distance(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if l2 > 0.0 { (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    dist(x, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Even-odd point-in-polygon test against the closed curves of `b`.
pub fn inside_polygon(b: &ImmersedBoundary, x: [f64; 2]) -> bool {
    let pts = b.points();
    let mut inside = false;
    for (ia, ib) in b.segments() {
        let (p, q) = (pts[ia], pts[ib]);
        if (p[1] > x[1]) != (q[1] > x[1]) {
            let xc = p[0] + (x[1] - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
            if x[0] < xc {
                inside = !inside;
            }
        }
    }
    inside
}

/// Solves `Δχ + S̃1 = 0` (zero mean) with normals pointing out of the
/// enclosed regions, shifts by a far-field sample and thresholds at ½.
///
/// The far-field sample is the box-corner node; if that node lies within the
/// kernel's reach of Γ the node farthest from every boundary point is used
/// instead, with its side decided geometrically.
pub fn compute_indicator(b: &ImmersedBoundary, ops: &DiffOps, kernel: KernelKind) -> Result<IndicatorMask> {
    let g = *ops.grid();
    let raw = indicator_field(b, ops, kernel)?;
    let reach = (kernel.support_radius() + 2) as f64 * g.h();
    let min_dist = |x: [f64; 2]| {
        b.points()
            .iter()
            .map(|p| g.periodic_delta(p[0], x[0]).hypot(g.periodic_delta(p[1], x[1])))
            .fold(f64::INFINITY, f64::min)
    };
    let corner = g.node(0, 0);
    let (ref_idx, ref_val) = if min_dist(corner) >= reach {
        (0usize, 0.0)
    } else {
        let n = g.n();
        let stride = (n / 64).max(1);
        let mut best = (0usize, -1.0f64);
        for j in (0..n).step_by(stride) {
            for i in (0..n).step_by(stride) {
                let d = min_dist(g.node(i, j));
                if d > best.1 {
                    best = (g.index(i, j), d);
                }
            }
        }
        if best.1 < reach {
            return Err(Error::Sampling("no grid node lies clear of the boundary".into()));
        }
        let (i, j) = (best.0 % n, best.0 / n);
        (best.0, if inside_polygon(b, g.node(i, j)) { 1.0 } else { 0.0 })
    };
    let shift = ref_val - raw.values()[ref_idx];
    let exterior = b.orientation() == crate::boundary::Orientation::ExteriorIsOmega;
    let inside = raw.values().iter().map(|&c| (c + shift > 0.5) != exterior).collect();
    IndicatorMask::from_inside(g, inside)
}

/// Zero-mean solution χ of `Δχ + S̃1 = 0` before shifting/thresholding.
pub fn indicator_field(b: &ImmersedBoundary, ops: &DiffOps, kernel: KernelKind) -> Result<ScalarField> {
    let g = *ops.grid();
    let shaped = b.enclosed_view();
    let c = Coupling::new(&shaped, &g, kernel)?;
    let mut rhs = c.spread_dipole(ops, &vec![1.0; b.len()]);
    rhs.scale(-1.0);
    // The dipole divergence has zero mean up to round-off; remove it exactly.
    let m = rhs.mean();
    rhs.add_constant(-m);
    ops.inv_laplacian_zero_mean(&rhs, Stencil::Standard5)
}

/// Band widths for the near-boundary interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterpolationConfig {
    /// Replace nodes within `m1` meshwidths using samples `m2` meshwidths in.
    Fixed { m1: f64, m2: f64 },
    /// `m1 = max(2, 2(log₂N − 4))`, `m2 = m1 + 2`.
    LogGrowth,
    /// Leave the raw field untouched.
    Off,
}

impl InterpolationConfig {
    /// `(m1, m2)` for an `n`-point grid.
    pub fn bands(&self, n: usize) -> Result<(f64, f64)> {
        let (m1, m2) = match *self {
            InterpolationConfig::Fixed { m1, m2 } => (m1, m2),
            InterpolationConfig::LogGrowth => {
                let m1 = (2.0 * ((n as f64).log2() - 4.0)).max(2.0);
                (m1, m1 + 2.0)
            }
            InterpolationConfig::Off => (0.0, 1.0),
        };
        if !(m1 >= 0.0 && m2 > m1) {
            return Err(Error::InvalidInput(format!("interpolation bands need m2 > m1 ≥ 0 (got {m1}, {m2})")));
        }
        Ok((m1, m2))
    }
}

#[derive(Debug, Clone, Copy)]
struct NodeStencil {
    node: usize,
    /// Boundary points whose values are blended at `x_A`.
    i1: usize,
    i2: usize,
    /// Weight of `U(i1)` at `x_A` (the rest goes to `U(i2)`).
    t: f64,
    /// Absolute position of `x_B`.
    xb: [f64; 2],
    /// Position of the node along `x_A → x_B` in units of `|x_B − x_A|`.
    tau: f64,
}

/// Precomputed near-boundary interpolation geometry for one
/// (boundary, grid, mask) triple; reusable across fields and time steps.
#[derive(Debug, Clone)]
pub struct InterpolationPlan {
    grid: PeriodicGrid,
    stencils: Vec<NodeStencil>,
}

impl InterpolationPlan {
    /// Builds the plan for nodes flagged in `mask.near_boundary()`.
    pub fn new(b: &ImmersedBoundary, mask: &IndicatorMask, m2: f64) -> Result<Self> {
        let g = *mask.grid();
        let h = g.h();
        let flagged: Vec<usize> = (0..g.len()).filter(|&k| mask.near_boundary()[k]).collect();
        let mut stencils = Vec::with_capacity(flagged.len());
        if flagged.is_empty() {
            return Ok(Self { grid: g, stencils });
        }
        if b.len() < 3 {
            return Err(Error::DegenerateGeometry("interpolation needs at least 3 boundary points".into()));
        }
        let max_ds = b.weights().iter().cloned().fold(0.0, f64::max);
        let max_flag_dist = m2 * h; // generous: flagged nodes are within m1 < m2 meshwidths
        let lookup = PointLookup::new(b, &g, max_flag_dist + 2.0 * max_ds);
        let pts = b.points();
        let nrm = b.normals();
        for k in flagged {
            let (i, j) = (k % g.n(), k / g.n());
            let xp = g.node(i, j);
            let near = lookup.nearest3(xp);
            let rel = |idx: usize| [g.periodic_delta(pts[idx][0], xp[0]), g.periodic_delta(pts[idx][1], xp[1])];
            let (i1, i2) = (near[0], near[1]);
            let (mut a, mut bb) = (rel(i1), rel(i2));
            let (mut ia, mut ib) = (i1, i2);
            let mut t = project(a, bb);
            if !(0.0..=1.0).contains(&t) {
                // Fall back to the outermost pair among the three closest points.
                let c3 = rel(near[2]);
                let cand = [(i1, a, i2, bb), (i1, a, near[2], c3), (i2, bb, near[2], c3)];
                let best = cand
                    .iter()
                    .max_by(|x, y| dist(x.1, x.3).partial_cmp(&dist(y.1, y.3)).unwrap())
                    .unwrap();
                ia = best.0;
                a = best.1;
                ib = best.2;
                bb = best.3;
                t = project(a, bb).clamp(0.0, 1.0);
            }
            let xa = [bb[0] + t * (a[0] - bb[0]), bb[1] + t * (a[1] - bb[1])];
            let nseg = {
                let v = [t * nrm[ia][0] + (1.0 - t) * nrm[ib][0], t * nrm[ia][1] + (1.0 - t) * nrm[ib][1]];
                let l = v[0].hypot(v[1]);
                if l > 0.0 { [v[0] / l, v[1] / l] } else { nrm[ia] }
            };
            let d = xa[0].hypot(xa[1]);
            // Direction from x_A into Ω; normals point out of Ω.
            let dir = if d > 1e-12 * h {
                let v = [-xa[0] / d, -xa[1] / d];
                if v[0] * nseg[0] + v[1] * nseg[1] > 0.0 { [-v[0], -v[1]] } else { v }
            } else {
                [-nseg[0], -nseg[1]]
            };
            let len = m2 * h;
            let xb_rel = [xa[0] + dir[0] * len, xa[1] + dir[1] * len];
            let tau = (-xa[0] * dir[0] - xa[1] * dir[1]) / len;
            stencils.push(NodeStencil { node: k, i1: ia, i2: ib, t, xb: [xp[0] + xb_rel[0], xp[1] + xb_rel[1]], tau });
        }
        Ok(Self { grid: g, stencils })
    }

    pub fn flagged_count(&self) -> usize {
        self.stencils.len()
    }

    /// Replaces flagged values of `u_raw` using boundary values `ub`.
    pub fn apply(&self, u_raw: &ScalarField, ub: &[f64]) -> ScalarField {
        debug_assert_eq!(u_raw.grid(), &self.grid);
        let mut out = u_raw.clone();
        let vals = out.values_mut();
        for s in &self.stencils {
            let ua = s.t * ub[s.i1] + (1.0 - s.t) * ub[s.i2];
            let ubv = u_raw.bilinear(s.xb);
            vals[s.node] = (1.0 - s.tau) * ua + s.tau * ubv;
        }
        out
    }
}

/// Parameter `t` of the projection of the origin onto the line `b + t(a − b)`.
fn project(a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [a[0] - b[0], a[1] - b[1]];
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    if l2 == 0.0 {
        return 0.0;
    }
    (-b[0] * ab[0] - b[1] * ab[1]) / l2
}

/// Cell hash of boundary points for nearest-point queries.
struct PointLookup<'a> {
    b: &'a ImmersedBoundary,
    grid: PeriodicGrid,
    cells: Vec<Vec<usize>>,
    nc: usize,
}

impl<'a> PointLookup<'a> {
    fn new(b: &'a ImmersedBoundary, grid: &PeriodicGrid, cell: f64) -> Self {
        let nc = ((grid.length() / cell).floor() as usize).max(1);
        let mut cells = vec![Vec::new(); nc * nc];
        let [ox, oy] = grid.origin();
        let cs = grid.length() / nc as f64;
        for (idx, p) in b.points().iter().enumerate() {
            let ci = (((p[0] - ox) / cs).floor() as i64).rem_euclid(nc as i64) as usize;
            let cj = (((p[1] - oy) / cs).floor() as i64).rem_euclid(nc as i64) as usize;
            cells[cj * nc + ci].push(idx);
        }
        Self { b, grid: *grid, cells, nc }
    }

    /// Indices of the three closest boundary points (ties → lower index).
    fn nearest3(&self, x: [f64; 2]) -> [usize; 3] {
        let g = &self.grid;
        let d = |idx: usize| {
            let p = self.b.points()[idx];
            g.periodic_delta(p[0], x[0]).hypot(g.periodic_delta(p[1], x[1]))
        };
        let mut cand: Vec<usize> = if self.nc < 3 {
            (0..self.b.len()).collect()
        } else {
            let [ox, oy] = g.origin();
            let cs = g.length() / self.nc as f64;
            let ci = ((x[0] - ox) / cs).floor() as i64;
            let cj = ((x[1] - oy) / cs).floor() as i64;
            let mut v = Vec::new();
            for dj in -1..=1 {
                for di in -1..=1 {
                    let a = (ci + di).rem_euclid(self.nc as i64) as usize;
                    let bj = (cj + dj).rem_euclid(self.nc as i64) as usize;
                    v.extend_from_slice(&self.cells[bj * self.nc + a]);
                }
            }
            if v.len() < 3 {
                (0..self.b.len()).collect()
            } else {
                v
            }
        };
        cand.sort_by(|&p, &q| d(p).partial_cmp(&d(q)).unwrap().then(p.cmp(&q)));
        [cand[0], cand[1], cand[2]]
    }
}

/// One-shot interpolation: builds the plan from `mask` and applies it.
pub fn near_boundary_interpolate(
    u_raw: &ScalarField,
    b: &ImmersedBoundary,
    ub: &[f64],
    mask: &IndicatorMask,
    cfg: &InterpolationConfig,
) -> Result<ScalarField> {
    let (m1, m2) = cfg.bands(u_raw.grid().n())?;
    let mut m = mask.clone();
    m.flag_near_boundary(b, m1);
    Ok(InterpolationPlan::new(b, &m, m2)?.apply(u_raw, ub))
}

/// Observed convergence orders between successive refinements.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub n_coarse: usize,
    pub n_fine: usize,
    /// `log₂(e_coarse/e_fine)` per norm; `None` when an error is zero.
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
}

/// `(N, l1, l2, linf)` rows with N doubling → per-pair observed orders.
pub fn refinement_table(rows: &[(usize, f64, f64, f64)]) -> Result<Vec<OrderRow>> {
    if rows.len() < 2 {
        return Err(Error::InvalidInput("need at least two refinement levels".into()));
    }
    let order = |c: f64, f: f64| if c > 0.0 && f > 0.0 { Some((c / f).log2()) } else { None };
    rows.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if b.0 != 2 * a.0 {
                return Err(Error::InvalidInput(format!("grid sizes {} → {} are not a doubling", a.0, b.0)));
            }
            Ok(OrderRow { n_coarse: a.0, n_fine: b.0, l1: order(a.1, b.1), l2: order(a.2, b.2), linf: order(a.3, b.3) })
        })
        .collect()
}

/// Least-squares slope of `log₂ e` against `log₂ N`, negated.
pub fn fitted_order(rows: &[(usize, f64)]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| !(r.1 > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.0 as f64).log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}

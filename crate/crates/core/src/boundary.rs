//! Discretized closed curves: points, arclength weights and normals.

use std::f64::consts::PI;
use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// Which side of the curve the PDE lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Ω is the region enclosed by the curve.
    InteriorIsOmega,
    /// Ω is everything outside the curve.
    ExteriorIsOmega,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::InteriorIsOmega => 1.0,
            Orientation::ExteriorIsOmega => -1.0,
        }
    }
}

/// Analytic or user-supplied curve description.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Circle { center: [f64; 2], radius: f64 },
    /// Ellipse with semi-axes `(a, b)` rotated counterclockwise by `rotation` radians.
    Ellipse { center: [f64; 2], semi_axes: [f64; 2], rotation: f64 },
    /// `scale·(1 + sin(10πθ)/4)(cos 2πθ, sin 2πθ)`, θ ∈ [0, 1).
    Starfish { center: [f64; 2], scale: f64 },
    /// Points ordered along the curve, optionally with normals pointing out of Ω.
    PointList { points: Vec<[f64; 2]>, normals: Option<Vec<[f64; 2]>> },
}

/// Lagrangian point set on one or more closed curves.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersedBoundary {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    normals: Vec<[f64; 2]>,
    orientation: Orientation,
    components: Vec<Range<usize>>,
}

impl ImmersedBoundary {
    /// Assembles a boundary from raw arrays, validating the invariants.
    pub fn new(
        points: Vec<[f64; 2]>,
        weights: Vec<f64>,
        normals: Vec<[f64; 2]>,
        orientation: Orientation,
    ) -> Result<Self> {
        let n = points.len();
        if n < 3 || weights.len() != n || normals.len() != n {
            return Err(Error::InvalidInput(format!(
                "boundary needs ≥3 points with matching weights/normals (got {n}, {}, {})",
                weights.len(),
                normals.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::DegenerateGeometry("non-positive arclength weight".into()));
        }
        for nv in &normals {
            if ((nv[0] * nv[0] + nv[1] * nv[1]).sqrt() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput("normals must be unit vectors".into()));
            }
        }
        Ok(Self { points, weights, normals, orientation, components: vec![0..n] })
    }

    /// Joins several closed curves into one boundary (for multi-obstacle runs).
    pub fn concat(parts: &[ImmersedBoundary]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidInput("no boundaries to join".into()))?;
        let mut out = Self {
            points: Vec::new(),
            weights: Vec::new(),
            normals: Vec::new(),
            orientation: first.orientation,
            components: Vec::new(),
        };
        for p in parts {
            if p.orientation != first.orientation {
                return Err(Error::InvalidInput("joined boundaries must share an orientation".into()));
            }
            let off = out.points.len();
            out.components.extend(p.components.iter().map(|r| r.start + off..r.end + off));
            out.points.extend_from_slice(&p.points);
            out.weights.extend_from_slice(&p.weights);
            out.normals.extend_from_slice(&p.normals);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Index ranges of the individual closed curves.
    pub fn components(&self) -> &[Range<usize>] {
        &self.components
    }

    pub fn total_length(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean_weight(&self) -> f64 {
        self.total_length() / self.len() as f64
    }

    /// Normals pointing out of the region enclosed by each curve.
    pub fn enclosed_outward_normals(&self) -> Vec<[f64; 2]> {
        let s = self.orientation.sign();
        self.normals.iter().map(|n| [s * n[0], s * n[1]]).collect()
    }

    /// Same curves with normals pointing out of the enclosed regions.
    pub fn enclosed_view(&self) -> Self {
        let mut out = self.clone();
        out.normals = self.enclosed_outward_normals();
        out.orientation = Orientation::InteriorIsOmega;
        out
    }

    /// Segments `(a, b)` of the closed polylines through the points.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.components.iter().flat_map(|r| {
            let (s, e) = (r.start, r.end);
            (s..e).map(move |i| (i, if i + 1 == e { s } else { i + 1 }))
        })
    }

    /// Copy with every point shifted by `d` (normals and weights unchanged).
    pub fn translated(&self, d: [f64; 2]) -> Self {
        let mut out = self.clone();
        out.points.iter_mut().for_each(|p| {
            p[0] += d[0];
            p[1] += d[1];
        });
        out
    }

    /// Pairs of components whose bounding circles overlap.
    pub fn overlap_warnings(&self) -> Vec<(usize, usize)> {
        let circles: Vec<([f64; 2], f64)> = self
            .components
            .iter()
            .map(|r| {
                let pts = &self.points[r.clone()];
                let c = pts.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
                let c = [c[0] / pts.len() as f64, c[1] / pts.len() as f64];
                let rad = pts.iter().map(|p| dist(*p, c)).fold(0.0, f64::max);
                (c, rad)
            })
            .collect();
        let mut out = Vec::new();
        for a in 0..circles.len() {
            for b in a + 1..circles.len() {
                if dist(circles[a].0, circles[b].0) < circles[a].1 + circles[b].1 {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Builds the boundary for `shape` with spacing `Δs ≈ alpha·Δx`.
///
/// Analytic shapes get `N_IB = round(L_IB/(αΔx))` points equally spaced in
/// arclength, weights `L_IB/N_IB` and analytic normals.
pub fn discretize(shape: &Shape, orientation: Orientation, grid: &PeriodicGrid, alpha: f64) -> Result<ImmersedBoundary> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("spacing ratio must be positive, got {alpha}")));
    }
    let target = alpha * grid.h();
    let b = match shape {
        Shape::Circle { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::Geometry("circle radius must be positive".into()));
            }
            let len = 2.0 * PI * radius;
            let n = point_count(len, target)?;
            let s = orientation.sign();
            let mut points = Vec::with_capacity(n);
            let mut normals = Vec::with_capacity(n);
            for i in 0..n {
                let t = 2.0 * PI * i as f64 / n as f64;
                let (sn, cs) = t.sin_cos();
                points.push([center[0] + radius * cs, center[1] + radius * sn]);
                normals.push([s * cs, s * sn]);
            }
            ImmersedBoundary::new(points, vec![len / n as f64; n], normals, orientation)?
        }
        Shape::Ellipse { center, semi_axes, rotation } => {
            let [a, bb] = *semi_axes;
            if !(a > 0.0 && bb > 0.0) {
                return Err(Error::Geometry("ellipse semi-axes must be positive".into()));
            }
            let (sr, cr) = rotation.sin_cos();
            let rot = move |v: [f64; 2]| [cr * v[0] - sr * v[1], sr * v[0] + cr * v[1]];
            let c = *center;
            let curve = move |t: f64| {
                let th = 2.0 * PI * t;
                let p = rot([a * th.cos(), bb * th.sin()]);
                [c[0] + p[0], c[1] + p[1]]
            };
            let tangent = move |t: f64| {
                let th = 2.0 * PI * t;
                rot([-a * th.sin(), bb * th.cos()])
            };
            resample(curve, tangent, target, orientation)?
        }
        Shape::Starfish { center, scale } => {
            if !(*scale > 0.0) {
                return Err(Error::Geometry("starfish scale must be positive".into()));
            }
            let (c, sc) = (*center, *scale);
            let curve = move |t: f64| {
                let r = sc * (1.0 + (10.0 * PI * t).sin() / 4.0);
                let th = 2.0 * PI * t;
                [c[0] + r * th.cos(), c[1] + r * th.sin()]
            };
            let tangent = move |t: f64| {
                let r = sc * (1.0 + (10.0 * PI * t).sin() / 4.0);
                let dr = sc * 10.0 * PI * (10.0 * PI * t).cos() / 4.0;
                let th = 2.0 * PI * t;
                let (s, co) = th.sin_cos();
                [dr * co - 2.0 * PI * r * s, dr * s + 2.0 * PI * r * co]
            };
            resample(curve, tangent, target, orientation)?
        }
        Shape::PointList { points, normals } => {
            let mut pts = points.clone();
            let mut nrm = normals.clone();
            if signed_area(&pts) < 0.0 {
                pts.reverse();
                if let Some(v) = nrm.as_mut() {
                    v.reverse();
                }
            }
            let weights = arclength_weights(&pts)?;
            let normals = match nrm {
                Some(v) => {
                    if v.len() != pts.len() {
                        return Err(Error::InvalidInput("normal count differs from point count".into()));
                    }
                    v.into_iter().map(unit).collect::<Result<Vec<_>>>()?
                }
                None => approximate_normals(&pts, orientation)?,
            };
            ImmersedBoundary::new(pts, weights, normals, orientation)?
        }
    };
    check_inside_box(&b, grid)?;
    Ok(b)
}

fn point_count(len: f64, target: f64) -> Result<usize> {
    let n = (len / target).round() as usize;
    if n < 3 {
        return Err(Error::Geometry(format!("curve of length {len} yields only {n} points")));
    }
    Ok(n)
}

/// Arclength-uniform resampling of a closed curve parametrized on [0, 1).
fn resample(
    curve: impl Fn(f64) -> [f64; 2],
    tangent: impl Fn(f64) -> [f64; 2],
    target: f64,
    orientation: Orientation,
) -> Result<ImmersedBoundary> {
    let cumulative = |m: usize| {
        let mut cum = Vec::with_capacity(m + 1);
        cum.push(0.0);
        let mut prev = curve(0.0);
        for k in 1..=m {
            let p = curve(k as f64 / m as f64);
            cum.push(cum[k - 1] + dist(p, prev));
            prev = p;
        }
        cum
    };
    let mut m = 1 << 16;
    let mut cum = cumulative(m);
    let mut n = point_count(cum[m], target)?;
    if m < 64 * n {
        m = (64 * n).next_power_of_two();
        cum = cumulative(m);
        n = point_count(cum[m], target)?;
    }
    let len = cum[m];
    let s = orientation.sign();
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut k = 0usize;
    for i in 0..n {
        let si = len * i as f64 / n as f64;
        while k + 1 < m && cum[k + 1] < si {
            k += 1;
        }
        let frac = if cum[k + 1] > cum[k] { (si - cum[k]) / (cum[k + 1] - cum[k]) } else { 0.0 };
        let t = (k as f64 + frac) / m as f64;
        points.push(curve(t));
        let tg = unit(tangent(t))?;
        normals.push([s * tg[1], -s * tg[0]]);
    }
    ImmersedBoundary::new(points, vec![len / n as f64; n], normals, orientation)
}

fn check_inside_box(b: &ImmersedBoundary, grid: &PeriodicGrid) -> Result<()> {
    let [ox, oy] = grid.origin();
    let l = grid.length();
    for p in b.points() {
        if !(p[0] > ox && p[0] < ox + l && p[1] > oy && p[1] < oy + l) {
            return Err(Error::Geometry(format!(
                "boundary point ({}, {}) lies outside the open box",
                p[0], p[1]
            )));
        }
    }
    Ok(())
}

/// Chord normals `(Y_{i+1} − Y_{i−1}, −(X_{i+1} − X_{i−1}))/‖·‖` for a
/// counterclockwise closed curve, negated when Ω is the exterior.
pub fn approximate_normals(points: &[[f64; 2]], orientation: Orientation) -> Result<Vec<[f64; 2]>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateGeometry("need at least 3 points".into()));
    }
    let s = orientation.sign();
    (0..n)
        .map(|i| {
            let a = points[(i + n - 1) % n];
            let b = points[(i + 1) % n];
            let v = unit([b[1] - a[1], -(b[0] - a[0])])
                .map_err(|_| Error::DegenerateGeometry(format!("coincident neighbours around point {i}")))?;
            Ok([s * v[0], s * v[1]])
        })
        .collect()
}

/// Weight per point: mean of the two adjacent chord lengths of the closed polyline.
pub fn arclength_weights(points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateGeometry("need at least 2 points".into()));
    }
    let chord: Vec<f64> = (0..n).map(|i| dist(points[(i + 1) % n], points[i])).collect();
    let w: Vec<f64> = (0..n).map(|i| 0.5 * (chord[i] + chord[(i + n - 1) % n])).collect();
    if let Some(i) = w.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::DegenerateGeometry(format!("zero arclength weight at point {i}")));
    }
    Ok(w)
}

/// Parses `x y [nx ny]` rows; blank lines and `#` comments are skipped.
pub fn parse_point_list(text: &str) -> Result<(Vec<[f64; 2]>, Option<Vec<[f64; 2]>>)> {
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
        match vals.len() {
            2 => points.push([vals[0], vals[1]]),
            4 => {
                points.push([vals[0], vals[1]]);
                normals.push([vals[2], vals[3]]);
            }
            k => return Err(Error::InvalidInput(format!("line {}: expected 2 or 4 numbers, got {k}", lineno + 1))),
        }
    }
    if !normals.is_empty() && normals.len() != points.len() {
        return Err(Error::InvalidInput("either all rows or no rows may carry normals".into()));
    }
    Ok((points, if normals.is_empty() { None } else { Some(normals) }))
}

pub fn read_point_list(path: &Path) -> Result<(Vec<[f64; 2]>, Option<Vec<[f64; 2]>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_point_list(&text)
}

fn signed_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

#[inline]
pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn unit(v: [f64; 2]) -> Result<[f64; 2]> {
    let l = v[0].hypot(v[1]);
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::DegenerateGeometry("zero-length vector".into()));
    }
    Ok([v[0] / l, v[1] / l])
}

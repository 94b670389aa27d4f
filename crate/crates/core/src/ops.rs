//! Discrete differential operators on a periodic grid.
//!
//! Every periodic operator used here (spectral or centered-difference) is
//! diagonalized by the discrete Fourier transform, so inverses and
//! projections are applied as symbol multiplications. Finite-difference
//! forward operators are additionally available as direct stencils.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, ScalarField, VectorField};

/// Discretization family shared by every operator of a solver instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Spectral,
    FiniteDifference,
}

/// Laplacian stencil. `Wide` is the composition of centered first
/// differences and only exists for finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stencil {
    Standard5,
    Wide,
}

/// Relative tolerance for the mean-zero solvability check.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

/// Operators for one (grid, scheme) pair, with cached FFT plans and 1-D
/// symbol tables. Immutable and shareable across threads.
pub struct DiffOps {
    grid: PeriodicGrid,
    scheme: Scheme,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// First-derivative symbol is `i·d1[m]`.
    d1: Vec<f64>,
    /// Second-derivative symbol of the standard Laplacian along one axis.
    lap1: Vec<f64>,
    /// `-d1²`: second-derivative symbol of the composed first differences.
    wide1: Vec<f64>,
}

impl std::fmt::Debug for DiffOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffOps").field("grid", &self.grid).field("scheme", &self.scheme).finish()
    }
}

impl DiffOps {
    pub fn new(grid: PeriodicGrid, scheme: Scheme) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let h = grid.h();
        let two_pi_l = 2.0 * std::f64::consts::PI / grid.length();
        let mut d1 = vec![0.0; n];
        let mut lap1 = vec![0.0; n];
        let mut wide1 = vec![0.0; n];
        for m in 0..n {
            let k = two_pi_l * wavenumber(m, n) as f64;
            let nyquist = m == n / 2;
            match scheme {
                Scheme::Spectral => {
                    d1[m] = if nyquist { 0.0 } else { k };
                    lap1[m] = -k * k;
                }
                Scheme::FiniteDifference => {
                    d1[m] = if nyquist || m == 0 { 0.0 } else { (k * h).sin() / h };
                    lap1[m] = if m == 0 { 0.0 } else { -2.0 * (1.0 - (k * h).cos()) / (h * h) };
                }
            }
            wide1[m] = -d1[m] * d1[m];
        }
        Self { grid, scheme, fwd, inv, d1, lap1, wide1 }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    fn check_stencil(&self, stencil: Stencil) -> Result<()> {
        if stencil == Stencil::Wide && self.scheme == Scheme::Spectral {
            return Err(Error::InvalidInput("wide stencil requires finite differences".into()));
        }
        Ok(())
    }

    // ---------------------------------------------------------------- symbols

    /// First-derivative symbol coefficient along one axis (symbol is `i·d1`).
    #[inline]
    pub(crate) fn d1(&self, m: usize) -> f64 {
        self.d1[m]
    }

    /// Laplacian symbol at spectral index `(kx, ky)`.
    #[inline]
    pub(crate) fn lap_symbol(&self, stencil: Stencil, kx: usize, ky: usize) -> f64 {
        match stencil {
            Stencil::Standard5 => self.lap1[kx] + self.lap1[ky],
            Stencil::Wide => self.wide1[kx] + self.wide1[ky],
        }
    }

    /// Symbol of Δ₀ in projections. Spectral d vanishes on Nyquist lines, so
    /// the spectral case uses −|d|² to keep `∇·P = 0` and `P² = P` exact.
    pub(crate) fn pressure_symbol(&self, stencil: Stencil, kx: usize, ky: usize) -> f64 {
        match self.scheme {
            Scheme::Spectral => -(self.d1[kx] * self.d1[kx] + self.d1[ky] * self.d1[ky]),
            Scheme::FiniteDifference => self.lap_symbol(stencil, kx, ky),
        }
    }

    /// Spectral index of `-k` for index `m`.
    #[inline]
    pub(crate) fn neg(&self, m: usize) -> usize {
        let n = self.grid.n();
        (n - m) % n
    }

    // ------------------------------------------------------------ transforms

    fn rows(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let rows_per_task = (n / rayon::current_num_threads().max(1)).clamp(1, n);
        data.par_chunks_mut(n * rows_per_task).for_each(|chunk| {
            let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(chunk, &mut scratch);
        });
    }

    /// Forward 2-D transform. Output layout is `kx·n + ky`.
    pub(crate) fn fft(&self, mut data: Vec<C64>) -> Vec<C64> {
        let n = self.grid.n();
        self.rows(&mut data, &self.fwd);
        let mut t = vec![C64::new(0.0, 0.0); n * n];
        transpose::transpose(&data, &mut t, n, n);
        self.rows(&mut t, &self.fwd);
        t
    }

    /// Inverse of [`fft`](Self::fft), including the 1/N² normalization.
    pub(crate) fn ifft(&self, mut spec: Vec<C64>) -> Vec<C64> {
        let n = self.grid.n();
        self.rows(&mut spec, &self.inv);
        let mut t = vec![C64::new(0.0, 0.0); n * n];
        transpose::transpose(&spec, &mut t, n, n);
        self.rows(&mut t, &self.inv);
        let s = 1.0 / (n * n) as f64;
        t.iter_mut().for_each(|z| *z *= s);
        t
    }

    pub(crate) fn fft_real(&self, a: &[f64]) -> Vec<C64> {
        self.fft(a.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Transforms two real fields with a single complex transform.
    pub(crate) fn fft_pair(&self, a: &[f64], b: &[f64]) -> (Vec<C64>, Vec<C64>) {
        let n = self.grid.n();
        let z = self.fft(a.iter().zip(b).map(|(&x, &y)| C64::new(x, y)).collect());
        let mut sa = vec![C64::new(0.0, 0.0); n * n];
        let mut sb = vec![C64::new(0.0, 0.0); n * n];
        for kx in 0..n {
            let nkx = self.neg(kx);
            for ky in 0..n {
                let zp = z[kx * n + ky];
                let zm = z[nkx * n + self.neg(ky)].conj();
                sa[kx * n + ky] = 0.5 * (zp + zm);
                // (zp - zm) / (2i)
                let d = zp - zm;
                sb[kx * n + ky] = C64::new(0.5 * d.im, -0.5 * d.re);
            }
        }
        (sa, sb)
    }

    /// Real part of the inverse transform of a Hermitian spectrum.
    pub(crate) fn ifft_real(&self, spec: Vec<C64>) -> Vec<f64> {
        self.ifft(spec).into_iter().map(|z| z.re).collect()
    }

    /// Inverse-transforms two Hermitian spectra with one complex transform.
    pub(crate) fn ifft_pair(&self, a: &[C64], b: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let i = C64::new(0.0, 1.0);
        let z = self.ifft(a.iter().zip(b).map(|(&x, &y)| x + i * y).collect());
        (z.iter().map(|z| z.re).collect(), z.iter().map(|z| z.im).collect())
    }

    /// Multiplies the spectrum of `f` by `sym(kx, ky)`; `sym` must map a
    /// Hermitian spectrum to a Hermitian spectrum.
    fn apply_symbol(&self, f: &[f64], sym: impl Fn(usize, usize) -> C64) -> Vec<f64> {
        let n = self.grid.n();
        let mut s = self.fft_real(f);
        for kx in 0..n {
            for ky in 0..n {
                s[kx * n + ky] *= sym(kx, ky);
            }
        }
        self.ifft_real(s)
    }

    // ----------------------------------------------------- forward operators

    pub fn laplacian(&self, f: &ScalarField, stencil: Stencil) -> Result<ScalarField> {
        self.check_stencil(stencil)?;
        let g = self.grid;
        let out = match self.scheme {
            Scheme::Spectral => self.apply_symbol(f.values(), |kx, ky| {
                C64::new(self.lap_symbol(stencil, kx, ky), 0.0)
            }),
            Scheme::FiniteDifference => {
                let (step, c) = match stencil {
                    Stencil::Standard5 => (1, 1.0 / g.cell_area()),
                    Stencil::Wide => (2, 0.25 / g.cell_area()),
                };
                stencil_map(&g, |i, j, at| {
                    c * (at(i - step, j) + at(i + step, j) + at(i, j - step) + at(i, j + step)
                        - 4.0 * at(i, j))
                }, f.values())
            }
        };
        Ok(ScalarField::from_vec(g, out))
    }

    pub fn gradient(&self, f: &ScalarField) -> VectorField {
        let g = self.grid;
        let (gx, gy) = match self.scheme {
            Scheme::Spectral => {
                let n = g.n();
                let s = self.fft_real(f.values());
                let mut sx = s.clone();
                let mut sy = s;
                for kx in 0..n {
                    for ky in 0..n {
                        sx[kx * n + ky] *= C64::new(0.0, self.d1[kx]);
                        sy[kx * n + ky] *= C64::new(0.0, self.d1[ky]);
                    }
                }
                self.ifft_pair(&sx, &sy)
            }
            Scheme::FiniteDifference => {
                let c = 0.5 / g.h();
                (
                    stencil_map(&g, |i, j, at| c * (at(i + 1, j) - at(i - 1, j)), f.values()),
                    stencil_map(&g, |i, j, at| c * (at(i, j + 1) - at(i, j - 1)), f.values()),
                )
            }
        };
        VectorField { u: ScalarField::from_vec(g, gx), v: ScalarField::from_vec(g, gy) }
    }

    pub fn divergence(&self, v: &VectorField) -> ScalarField {
        let g = self.grid;
        let out = match self.scheme {
            Scheme::Spectral => {
                let n = g.n();
                let (mut su, sv) = self.fft_pair(v.u.values(), v.v.values());
                for kx in 0..n {
                    for ky in 0..n {
                        let k = kx * n + ky;
                        su[k] = C64::new(0.0, self.d1[kx]) * su[k] + C64::new(0.0, self.d1[ky]) * sv[k];
                    }
                }
                self.ifft_real(su)
            }
            Scheme::FiniteDifference => {
                let c = 0.5 / g.h();
                let dx = stencil_map(&g, |i, j, at| c * (at(i + 1, j) - at(i - 1, j)), v.u.values());
                let dy = stencil_map(&g, |i, j, at| c * (at(i, j + 1) - at(i, j - 1)), v.v.values());
                dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
            }
        };
        ScalarField::from_vec(g, out)
    }

    // -------------------------------------------------------------- inverses

    /// Checks the solvability condition for a periodic Poisson problem: the
    /// mean (each subgrid mean for the wide stencil) must vanish relative to
    /// the field's magnitude.
    pub fn check_mean_zero(&self, f: &ScalarField, stencil: Stencil) -> Result<()> {
        let scale = f.max_abs();
        let tol = MEAN_ZERO_TOL * scale;
        let means: Vec<f64> = match stencil {
            Stencil::Standard5 => vec![f.mean()],
            Stencil::Wide => subgrid_means(f).to_vec(),
        };
        for mean in means {
            if mean.abs() > tol {
                return Err(Error::Solvability { mean, tol });
            }
        }
        Ok(())
    }

    /// Δ₀⁻¹: the mean-zero (per subgrid for `Wide`) solution of `Δu = f`.
    pub fn inv_laplacian_zero_mean(&self, f: &ScalarField, stencil: Stencil) -> Result<ScalarField> {
        self.check_stencil(stencil)?;
        self.check_mean_zero(f, stencil)?;
        Ok(ScalarField::from_vec(self.grid, self.apply_symbol(f.values(), |kx, ky| {
            C64::new(inv_or_zero(self.lap_symbol(stencil, kx, ky)), 0.0)
        })))
    }

    /// `(μΔ − k2)⁻¹ f`. With `k2 = 0` this is `Δ₀⁻¹ f / μ`.
    pub fn helmholtz_inverse(&self, f: &ScalarField, mu: f64, k2: f64, stencil: Stencil) -> Result<ScalarField> {
        self.check_stencil(stencil)?;
        if !(mu > 0.0) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {mu}")));
        }
        if !(k2 >= 0.0) {
            return Err(Error::InvalidInput(format!("reaction coefficient must be nonnegative, got {k2}")));
        }
        if k2 == 0.0 {
            let mut u = self.inv_laplacian_zero_mean(f, stencil)?;
            u.scale(1.0 / mu);
            return Ok(u);
        }
        Ok(ScalarField::from_vec(self.grid, self.apply_symbol(f.values(), |kx, ky| {
            C64::new(1.0 / (mu * self.lap_symbol(stencil, kx, ky) - k2), 0.0)
        })))
    }

    /// Leray projection `P = I − ∇Δ₀⁻¹∇·` with the scheme's first derivatives
    /// and the given Laplacian for Δ₀.
    pub fn leray_project(&self, v: &VectorField, stencil: Stencil) -> Result<VectorField> {
        self.check_stencil(stencil)?;
        let n = self.grid.n();
        let (mut su, mut sv) = self.fft_pair(v.u.values(), v.v.values());
        for kx in 0..n {
            for ky in 0..n {
                let k = kx * n + ky;
                let (ax, ay) = (self.d1[kx], self.d1[ky]);
                let lam = inv_or_zero(self.pressure_symbol(stencil, kx, ky));
                // D(D·û)/Λ with D = i·d: −d (d·û)/Λ
                let dd = (ax * su[k] + ay * sv[k]) * lam;
                su[k] += ax * dd;
                sv[k] += ay * dd;
            }
        }
        let (u, w) = self.ifft_pair(&su, &sv);
        Ok(VectorField { u: ScalarField::from_vec(self.grid, u), v: ScalarField::from_vec(self.grid, w) })
    }
}

/// Removes the components along 1, (−1)^i, (−1)^j and (−1)^(i+j): the modes
/// that no discrete divergence can produce (d = 0 at k = 0 and at Nyquist).
pub fn remove_divergence_null_space(f: &mut ScalarField) {
    let n = f.grid().n();
    let sign = |a: usize| if a % 2 == 0 { 1.0 } else { -1.0 };
    let basis: [fn(usize, usize, &dyn Fn(usize) -> f64) -> f64; 4] =
        [|_, _, _| 1.0, |i, _, s| s(i), |_, j, s| s(j), |i, j, s| s(i + j)];
    for m in basis {
        let v = f.values_mut();
        let mut c = 0.0;
        for j in 0..n {
            for i in 0..n {
                c += m(i, j, &sign) * v[j * n + i];
            }
        }
        c /= (n * n) as f64;
        for j in 0..n {
            for i in 0..n {
                v[j * n + i] -= c * m(i, j, &sign);
            }
        }
    }
}

/// Signed wavenumber index for position `m` in the standard FFT layout.
#[inline]
pub(crate) fn wavenumber(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

#[inline]
pub(crate) fn inv_or_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / x
    }
}

/// Means of the four decoupled subgrids (parity classes of (i, j)).
pub fn subgrid_means(f: &ScalarField) -> [f64; 4] {
    let n = f.grid().n();
    let mut s = [0.0; 4];
    for j in 0..n {
        for i in 0..n {
            s[(i % 2) + 2 * (j % 2)] += f.at(i, j);
        }
    }
    let c = (n * n / 4) as f64;
    s.map(|x| x / c)
}

fn stencil_map(
    g: &PeriodicGrid,
    op: impl Fn(i64, i64, &dyn Fn(i64, i64) -> f64) -> f64,
    values: &[f64],
) -> Vec<f64> {
    let n = g.n() as i64;
    let at = |i: i64, j: i64| values[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize];
    let mut out = Vec::with_capacity(values.len());
    for j in 0..n {
        for i in 0..n {
            out.push(op(i, j, &at));
        }
    }
    out
}

//! Matrix-free MINRES and GMRES.
//!
//! Convergence is measured by the relative residual `‖b − Ax‖₂/‖b‖₂`. A run
//! that stops making progress (best residual improving by less than
//! `1e-14` relative over 50 iterations) is reported as stagnated rather than
//! treated as an error.

/// A black-box linear map `R^n → R^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F: Fn(&[f64], &mut [f64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// Dense row-major matrix as an operator (tests, small systems).
pub struct DenseOperator {
    pub n: usize,
    pub a: Vec<f64>,
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.a[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// GMRES restart length; `None` keeps the full Krylov basis.
    pub restart: Option<usize>,
    pub stagnation_window: usize,
    pub stagnation_rel: f64,
}

impl KrylovOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter, restart: None, stagnation_window: 50, stagnation_rel: 1e-14 }
    }

    /// Solver defaults for a boundary system with `n_ib` unknowns.
    pub fn for_boundary(n_ib: usize) -> Self {
        Self::new(1e-8, 10 * n_ib + 1000)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual before the first iteration and after each one.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub stagnated: bool,
    pub tolerance: f64,
    /// Relative residual of the returned solution, recomputed explicitly.
    pub final_residual: f64,
}

impl SolveReport {
    fn trivial(tol: f64) -> Self {
        Self {
            iterations: 0,
            residual_history: vec![0.0],
            converged: true,
            stagnated: false,
            tolerance: tol,
            final_residual: 0.0,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn true_residual(op: &dyn LinearOperator, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; b.len()];
    op.apply(x, &mut ax);
    let r: f64 = ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    r / norm(b)
}

struct Stagnation {
    best: f64,
    since: usize,
    window: usize,
    rel: f64,
}

impl Stagnation {
    fn new(opts: &KrylovOptions) -> Self {
        Self { best: f64::INFINITY, since: 0, window: opts.stagnation_window, rel: opts.stagnation_rel }
    }

    /// Records a residual; returns true once the window passes without progress.
    fn update(&mut self, r: f64) -> bool {
        if r < self.best * (1.0 - self.rel) {
            self.best = r;
            self.since = 0;
        } else {
            self.since += 1;
        }
        self.since >= self.window
    }
}

/// MINRES for symmetric (possibly indefinite) operators, zero initial guess.
pub fn minres(op: &dyn LinearOperator, b: &[f64], opts: &KrylovOptions) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs dimension mismatch");
    let beta1 = norm(b);
    if beta1 == 0.0 {
        return (vec![0.0; n], SolveReport::trivial(opts.tol));
    }
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let (mut beta, mut oldb) = (beta1, 0.0);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut history = vec![1.0];
    let mut stag = Stagnation::new(opts);
    let mut converged = false;
    let mut stagnated = false;
    let mut recheck_below = opts.tol;
    let mut itn = 0;

    while itn < opts.max_iter {
        itn += 1;
        let s = 1.0 / beta;
        v.iter_mut().zip(&r2).for_each(|(v, r)| *v = s * r);
        op.apply(&v, &mut y);
        if itn >= 2 {
            axpy(-beta / oldb, &r1, &mut y);
        }
        let alfa = dot(&v, &y);
        axpy(-alfa / beta, &r2, &mut y);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = norm(&r2);

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        let dg = 1.0 / gamma;
        for k in 0..n {
            w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * dg;
        }
        axpy(phi, &w, &mut x);

        let rel = phibar / beta1;
        history.push(rel);
        if rel <= recheck_below || beta == 0.0 {
            let t = true_residual(op, &x, b);
            if t <= opts.tol * (1.0 + 1e-6) {
                converged = true;
                break;
            }
            recheck_below = rel * 0.5;
            if beta == 0.0 {
                break;
            }
        }
        if stag.update(rel) {
            stagnated = true;
            break;
        }
    }
    let final_residual = true_residual(op, &x, b);
    let report = SolveReport {
        iterations: itn,
        residual_history: history,
        converged: converged || final_residual <= opts.tol * (1.0 + 1e-6),
        stagnated,
        tolerance: opts.tol,
        final_residual,
    };
    (x, report)
}

/// GMRES with modified Gram–Schmidt Arnoldi and selective
/// reorthogonalization; zero initial guess.
pub fn gmres(op: &dyn LinearOperator, b: &[f64], opts: &KrylovOptions) -> (Vec<f64>, SolveReport) {
    gmres_from(op, b, None, opts)
}

/// GMRES from an explicit starting vector (zero when `x0` is `None`).
pub fn gmres_from(op: &dyn LinearOperator, b: &[f64], x0: Option<&[f64]>, opts: &KrylovOptions) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs dimension mismatch");
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return (vec![0.0; n], SolveReport::trivial(opts.tol));
    }
    let mut x = match x0 {
        Some(g) => g.to_vec(),
        None => vec![0.0; n],
    };
    let cycle_len = opts.restart.unwrap_or(opts.max_iter).max(1);
    let mut history = Vec::new();
    let mut stag = Stagnation::new(opts);
    let mut itn = 0usize;
    let mut converged = false;
    let mut stagnated = false;
    let mut ax = vec![0.0; n];

    'outer: loop {
        // r = b − A x
        op.apply(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        if history.is_empty() {
            history.push(beta / bnorm);
        }
        if beta / bnorm <= opts.tol {
            converged = true;
            break;
        }
        if itn >= opts.max_iter {
            break;
        }
        r.iter_mut().for_each(|v| *v /= beta);
        let mut basis: Vec<Vec<f64>> = vec![r];
        // Hessenberg columns after rotation (upper triangular R).
        let mut rcols: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut breakdown = false;

        while basis.len() <= cycle_len && itn < opts.max_iter {
            itn += 1;
            let k = basis.len() - 1;
            let mut wv = vec![0.0; n];
            op.apply(&basis[k], &mut wv);
            let mut hcol = vec![0.0; k + 2];
            for (j, vj) in basis.iter().enumerate() {
                let hj = dot(&wv, vj);
                hcol[j] = hj;
                axpy(-hj, vj, &mut wv);
            }
            let mut wn = norm(&wv);
            // Second pass when the first leaves a measurable component behind.
            let leak = basis.iter().map(|vj| dot(&wv, vj).abs()).fold(0.0, f64::max);
            if wn > 0.0 && leak > 1e-8 * wn {
                for (j, vj) in basis.iter().enumerate() {
                    let c = dot(&wv, vj);
                    hcol[j] += c;
                    axpy(-c, vj, &mut wv);
                }
                wn = norm(&wv);
            }
            hcol[k + 1] = wn;
            for j in 0..k {
                let (a, bb) = (hcol[j], hcol[j + 1]);
                hcol[j] = cs[j] * a + sn[j] * bb;
                hcol[j + 1] = -sn[j] * a + cs[j] * bb;
            }
            let (a, bb) = (hcol[k], hcol[k + 1]);
            let d = a.hypot(bb);
            let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (a / d, bb / d) };
            cs.push(c);
            sn.push(s);
            hcol[k] = d;
            hcol.truncate(k + 1);
            rcols.push(hcol);
            let gk = g[k];
            g[k] = c * gk;
            g.push(-s * gk);
            let rel = g[k + 1].abs() / bnorm;
            history.push(rel);

            let tiny = wn <= 1e-14 * bnorm.max(1e-300);
            if !tiny {
                basis.push(wv.into_iter().map(|v| v / wn).collect());
            } else {
                breakdown = true;
            }
            if rel <= opts.tol || breakdown {
                break;
            }
            if stag.update(rel) {
                stagnated = true;
                break;
            }
        }

        // Back substitution for the cycle's correction.
        let m = rcols.len();
        let mut yk = vec![0.0; m];
        for i in (0..m).rev() {
            let mut s = g[i];
            for j in i + 1..m {
                s -= rcols[j][i] * yk[j];
            }
            yk[i] = if rcols[i][i] != 0.0 { s / rcols[i][i] } else { 0.0 };
        }
        for (j, yj) in yk.iter().enumerate() {
            axpy(*yj, &basis[j], &mut x);
        }
        if stagnated {
            break 'outer;
        }
        let t = true_residual(op, &x, b);
        if t <= opts.tol * (1.0 + 1e-6) {
            converged = true;
            break;
        }
        if breakdown && m == 0 {
            break;
        }
    }
    let final_residual = true_residual(op, &x, b);
    let report = SolveReport {
        iterations: itn,
        residual_history: history,
        converged: converged && final_residual <= opts.tol * (1.0 + 1e-6),
        stagnated,
        tolerance: opts.tol,
        final_residual,
    };
    (x, report)
}

//! Damped least squares (Levenberg–Marquardt with Marquardt diagonal
//! scaling) over a box.
//!
//! Step: solve `(JᵀJ + λ·diag(JᵀJ))·δ = −Jᵀr`, clamp `x + δ` into the box,
//! accept only if the sum of squares strictly decreases. On acceptance
//! `λ ← max(λ/3, 1e-12)`, on rejection `λ ← 4λ`. The residual sequence over
//! accepted steps is therefore strictly decreasing.
//!
//! Stops when an accepted step decreases the sum of squares by less than
//! `tolerance` (relative), when the RMS residual falls below
//! `absolute_rms`, or when `λ` exceeds `1e16` without an acceptable step
//! (numerical floor). Reaching `max_iterations` first reports
//! `converged = false`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

/// Least-squares objective `½·Σ rᵢ(x)²`.
pub trait LeastSquares: Sync {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    fn residuals(&self, x: &[f64]) -> Vec<f64>;
    /// `(JᵀJ, Jᵀr, rᵀr)` at `x`.
    fn normal_equations(&self, x: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64);
}

/// Builds normal equations from per-chunk `(residuals, jacobian rows)`;
/// chunks are evaluated in parallel and accumulated in chunk order.
pub fn accumulate_chunks<F>(n_chunks: usize, n_params: usize, chunk: F) -> (DMatrix<f64>, DVector<f64>, f64)
where
    F: Fn(usize) -> (Vec<f64>, Vec<f64>) + Sync,
{
    let partials: Vec<(DMatrix<f64>, DVector<f64>, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let (r, j) = chunk(c);
            let mut a = DMatrix::zeros(n_params, n_params);
            let mut g = DVector::zeros(n_params);
            let mut ssr = 0.0;
            for (k, &rk) in r.iter().enumerate() {
                let row = &j[k * n_params..(k + 1) * n_params];
                ssr += rk * rk;
                for p in 0..n_params {
                    g[p] += row[p] * rk;
                    for q in p..n_params {
                        a[(p, q)] += row[p] * row[q];
                    }
                }
            }
            (a, g, ssr)
        })
        .collect();
    let mut a = DMatrix::zeros(n_params, n_params);
    let mut g = DVector::zeros(n_params);
    let mut ssr = 0.0;
    for (pa, pg, ps) in partials {
        a += pa;
        g += pg;
        ssr += ps;
    }
    for p in 0..n_params {
        for q in 0..p {
            a[(p, q)] = a[(q, p)];
        }
    }
    (a, g, ssr)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative decrease of the sum of squares below which an accepted step
    /// counts as converged.
    pub tolerance: f64,
    /// RMS residual treated as an exact fit.
    pub absolute_rms: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-10,
            absolute_rms: 1e-12,
            initial_lambda: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ExactFit,
    RelativeDecrease,
    NumericalFloor,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub ssr: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Sum of squares at the start and after every accepted step.
    pub ssr_history: Vec<f64>,
    /// `JᵀJ` at the returned point.
    pub jtj: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LmError {
    /// Columns of the Jacobian are (numerically) linearly dependent; the
    /// payload lists `(parameter index, weight)` of the null direction.
    Degenerate(Vec<(usize, f64)>),
    NonFinite,
}

const DEGENERACY_RATIO: f64 = 1e-12;

/// Null direction of `jtj` after column normalization, if its condition
/// number exceeds `1/DEGENERACY_RATIO`.
pub fn null_direction(jtj: &DMatrix<f64>) -> Option<Vec<(usize, f64)>> {
    let n = jtj.nrows();
    let d: Vec<f64> = (0..n).map(|i| jtj[(i, i)]).collect();
    if let Some(i) = d.iter().position(|&v| !(v > 0.0)) {
        return Some(vec![(i, 1.0)]);
    }
    let norm = DMatrix::from_fn(n, n, |i, j| jtj[(i, j)] / (d[i] * d[j]).sqrt());
    let eig = SymmetricEigen::new(norm);
    let (imin, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))?;
    let lmax = eig.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    if lmin > DEGENERACY_RATIO * lmax {
        return None;
    }
    let v = eig.eigenvectors.column(imin);
    let mut parts: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() > 0.1)
        .map(|(i, w)| (i, *w))
        .collect();
    parts.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    Some(parts)
}

/// Solves `(A + λ·diag(A))·δ = −g`.
fn damped_step(a: &DMatrix<f64>, g: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += lambda * a[(i, i)].max(f64::MIN_POSITIVE);
    }
    m.cholesky().map(|c| -c.solve(g))
}

fn clamp_into(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Minimizes `problem` from `x0` within `bounds`.
pub fn minimize<P: LeastSquares + ?Sized>(
    problem: &P,
    x0: &[f64],
    bounds: &[(f64, f64)],
    options: &LmOptions,
) -> Result<LmOutcome, LmError> {
    let n = problem.n_params();
    let m = problem.n_residuals().max(1) as f64;
    assert_eq!(x0.len(), n);
    assert_eq!(bounds.len(), n);

    let mut x = x0.to_vec();
    clamp_into(&mut x, bounds);
    let (mut a, mut g, mut ssr) = problem.normal_equations(&x);
    if !ssr.is_finite() {
        return Err(LmError::NonFinite);
    }
    if let Some(dir) = null_direction(&a) {
        return Err(LmError::Degenerate(dir));
    }

    let mut history = vec![ssr];
    let mut lambda = options.initial_lambda;
    let mut iterations = 0;
    let floor = options.absolute_rms * options.absolute_rms * m;

    let termination = loop {
        if ssr <= floor {
            break Termination::ExactFit;
        }
        if iterations >= options.max_iterations {
            break Termination::IterationLimit;
        }
        iterations += 1;

        let mut accepted = None;
        while lambda <= 1e16 {
            let Some(step) = damped_step(&a, &g, lambda) else {
                lambda *= 4.0;
                continue;
            };
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, di)| xi + di).collect();
            clamp_into(&mut trial, bounds);
            if trial == x {
                lambda *= 4.0;
                continue;
            }
            let r = problem.residuals(&trial);
            let trial_ssr: f64 = r.iter().map(|v| v * v).sum();
            if trial_ssr.is_finite() && trial_ssr < ssr {
                lambda = (lambda / 3.0).max(1e-12);
                accepted = Some((trial, trial_ssr));
                break;
            }
            lambda *= 4.0;
        }

        let Some((trial, trial_ssr)) = accepted else {
            break Termination::NumericalFloor;
        };
        let rel = (ssr - trial_ssr) / ssr;
        x = trial;
        (a, g, ssr) = problem.normal_equations(&x);
        history.push(ssr);
        if rel < options.tolerance {
            break Termination::RelativeDecrease;
        }
    };

    Ok(LmOutcome {
        x,
        ssr,
        iterations,
        converged: termination != Termination::IterationLimit,
        termination,
        ssr_history: history,
        jtj: a,
    })
}

/// Linearized covariance `σ²·(JᵀJ)⁻¹` with `σ² = ssr/(m − n)`, via the
/// pseudo-inverse of the column-normalized matrix.
pub fn covariance(jtj: &DMatrix<f64>, ssr: f64, n_residuals: usize) -> Option<DMatrix<f64>> {
    let n = jtj.nrows();
    if n_residuals <= n {
        return None;
    }
    let d: Vec<f64> = (0..n).map(|i| jtj[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
    let norm = DMatrix::from_fn(n, n, |i, j| jtj[(i, j)] / (d[i] * d[j]));
    let inv = norm.pseudo_inverse(1e-14).ok()?;
    let sigma2 = ssr / (n_residuals - n) as f64;
    Some(DMatrix::from_fn(n, n, |i, j| sigma2 * inv[(i, j)] / (d[i] * d[j])))
}

//! Lawson–Hanson active-set solver for `min ‖Ax − y‖₂ s.t. x ≥ 0`.

use nalgebra::{DMatrix, DVector};

use super::matrix::SensingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnlsOptions {
    /// Tolerance on the KKT conditions of the gradient `Aᵀ(Ax − y)`.
    pub kkt_tol: f64,
    /// Cap on least-squares solves; `None` means `10 · cols`.
    pub max_iterations: Option<usize>,
}

impl Default for NnlsOptions {
    fn default() -> Self {
        NnlsOptions {
            kkt_tol: 1e-8,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Largest KKT violation at the returned point.
    pub kkt_residual: f64,
    /// `‖Ax − y‖₂` after each outer iteration, starting at `x = 0`.
    pub objective_trace: Vec<f64>,
}

impl NnlsSolution {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts with x = 0")
    }
}

fn residual(a: &SensingMatrix, x: &[f64], y: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    y.iter().zip(ax).map(|(yi, ai)| yi - ai).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest KKT violation given the negative gradient `w = Aᵀ(y − Ax)`.
pub fn kkt_violation(x: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| if xi > 0.0 { wi.abs() } else { wi.max(0.0) })
        .fold(0.0, f64::max)
}

/// Unconstrained least squares over the passive columns.
fn passive_solve(a: &SensingMatrix, passive: &[usize], y: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let sub = DMatrix::from_fn(n, passive.len(), |r, c| a.column(passive[c])[r]);
    let rhs = DVector::from_column_slice(y);
    if passive.len() <= n {
        // thin QR; fall through to SVD when R is numerically singular
        let qr = sub.clone().qr();
        let r = qr.r();
        let scale = r.diagonal().amax();
        if scale > 0.0 && r.diagonal().iter().all(|d| d.abs() > 1e-12 * scale) {
            let qty = qr.q().transpose() * &rhs;
            if let Some(s) = r.solve_upper_triangular(&qty) {
                if s.iter().all(|v| v.is_finite()) {
                    return s.as_slice().to_vec();
                }
            }
        }
    }
    sub.svd(true, true)
        .solve(&rhs, 1e-14)
        .map(|s| s.as_slice().to_vec())
        .unwrap_or_else(|_| vec![0.0; passive.len()])
}

pub fn nnls_solve(a: &SensingMatrix, y: &[f64], options: NnlsOptions) -> Result<NnlsSolution> {
    if y.len() != a.rows() {
        return Err(Error::invalid(format!(
            "observation has {} entries, matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let cols = a.cols();
    let max_iterations = options.max_iterations.unwrap_or(10 * cols.max(1));
    let tol = options.kkt_tol;

    let mut x = vec![0.0; cols];
    let mut in_passive = vec![false; cols];
    let mut passive: Vec<usize> = Vec::new();
    let mut r = y.to_vec();
    let mut w = a.mul_transpose(&r);
    let mut trace = vec![norm(&r)];
    let mut iterations = 0;
    // columns that could not take a positive value since the passive set last grew
    let mut blocked = vec![false; cols];

    loop {
        let candidate = (0..cols)
            .filter(|&j| !in_passive[j] && !blocked[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(t) = candidate.filter(|&t| w[t] > tol) else {
            break;
        };
        if iterations >= max_iterations {
            break;
        }
        in_passive[t] = true;
        passive.push(t);

        let mut entered = true;
        let mut first = true;
        loop {
            iterations += 1;
            let s = passive_solve(a, &passive, y);
            if first && s[s.len() - 1] <= 0.0 {
                passive.pop();
                in_passive[t] = false;
                blocked[t] = true;
                entered = false;
                break;
            }
            first = false;
            if s.iter().all(|&v| v > 0.0) {
                for (&j, &sj) in passive.iter().zip(&s) {
                    x[j] = sj;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&j, &sj) in passive.iter().zip(&s) {
                if sj <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - sj));
                }
            }
            for (&j, &sj) in passive.iter().zip(&s) {
                x[j] += alpha * (sj - x[j]);
            }
            let zero_tol = 1e-14 * x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            passive.retain(|&j| {
                let keep = x[j] > zero_tol;
                if !keep {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
                keep
            });
            if passive.is_empty() || iterations >= max_iterations {
                break;
            }
        }
        if entered {
            blocked.iter_mut().for_each(|b| *b = false);
        }

        r = residual(a, &x, y);
        w = a.mul_transpose(&r);
        trace.push(norm(&r));
    }

    let kkt_residual = kkt_violation(&x, &w);
    Ok(NnlsSolution {
        converged: kkt_residual <= tol,
        x,
        iterations,
        kkt_residual,
        objective_trace: trace,
    })
}

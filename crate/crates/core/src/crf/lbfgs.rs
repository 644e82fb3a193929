//! Limited-memory BFGS with a backtracking Armijo line search.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LbfgsParams {
    pub memory: usize,
    pub tol: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const CURVATURE_EPS: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_finite(iteration: usize, value: f64, grad: &[f64]) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::Divergence {
            iteration,
            message: format!("objective is {value}"),
        });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Divergence {
            iteration,
            message: "gradient has non-finite components".into(),
        });
    }
    Ok(())
}

/// Two-loop recursion: returns `-H g` for the current curvature history.
fn search_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimize `f` starting from `x0`. `f` writes the gradient into its second
/// argument and returns the objective value.
pub(crate) fn minimize<F>(mut f: F, x0: Vec<f64>, params: LbfgsParams) -> Result<Minimum>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut grad = vec![0.0; n];
    let mut value = f(&x, &mut grad);
    check_finite(0, value, &grad)?;

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(params.memory);
    let mut x_new = vec![0.0; n];
    let mut grad_new = vec![0.0; n];
    let mut iterations = 0;

    loop {
        let gnorm = inf_norm(&grad);
        if gnorm <= params.tol {
            return Ok(Minimum {
                x,
                value,
                grad_norm: gnorm,
                iterations,
                converged: true,
            });
        }
        if iterations >= params.max_iters {
            return Ok(Minimum {
                x,
                value,
                grad_norm: gnorm,
                iterations,
                converged: false,
            });
        }
        iterations += 1;

        let mut direction = search_direction(&grad, &history);
        let mut slope = dot(&grad, &direction);
        if slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &direction);
        }
        let mut step = if history.is_empty() {
            (1.0 / dot(&grad, &grad).sqrt()).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for ((xn, xi), d) in x_new.iter_mut().zip(&x).zip(&direction) {
                *xn = xi + step * d;
            }
            let trial = f(&x_new, &mut grad_new);
            check_finite(iterations, trial, &grad_new)?;
            if trial <= value + ARMIJO_C1 * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }

        let Some(trial) = accepted else {
            // No descent possible at machine precision.
            return Ok(Minimum {
                x,
                value,
                grad_norm: gnorm,
                iterations,
                converged: false,
            });
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > CURVATURE_EPS {
            if history.len() == params.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut grad, &mut grad_new);
        value = trial;
    }
}

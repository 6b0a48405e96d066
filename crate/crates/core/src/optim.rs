//! Safeguarded Newton-Raphson maximization shared by the parametric fitters.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Step-halvings attempted per iteration before giving up on the direction.
pub const MAX_HALVINGS: usize = 10;
/// Coefficient magnitude beyond which a fit is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-9,
        }
    }
}

/// Log-likelihood, gradient and Hessian at a parameter vector.
pub(crate) struct Derivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome {
    pub params: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solve `(-H) d = g`, adding a growing ridge when `-H` is not positive definite.
fn newton_direction(hessian: &DMatrix<f64>, gradient: &DVector<f64>) -> Result<DVector<f64>> {
    let neg = -hessian;
    if let Some(chol) = neg.clone().cholesky() {
        return Ok(chol.solve(gradient));
    }
    let scale = neg.diagonal().iter().fold(1.0_f64, |m, d| m.max(d.abs()));
    let mut ridge = 1e-8 * scale;
    for _ in 0..20 {
        let damped = &neg + DMatrix::identity(neg.nrows(), neg.ncols()) * ridge;
        if let Some(chol) = damped.cholesky() {
            return Ok(chol.solve(gradient));
        }
        ridge *= 10.0;
    }
    Err(Error::Fit("Hessian could not be regularized".into()))
}

/// Maximize an objective by Newton steps with step-halving.
///
/// Coordinates listed in `guarded` trigger the divergence stop when their magnitude
/// exceeds [`DIVERGENCE_BOUND`]; the outcome is then returned with `converged = false`.
pub(crate) fn newton_maximize<F>(
    objective: F,
    init: Vec<f64>,
    opts: FitOptions,
    guarded: &[usize],
) -> Result<NewtonOutcome>
where
    F: Fn(&[f64]) -> Derivatives,
{
    let mut x = DVector::from_vec(init);
    let mut cur = objective(x.as_slice());
    if !cur.value.is_finite() {
        return Err(Error::Fit(
            "log-likelihood is not finite at the starting point".into(),
        ));
    }
    for iter in 1..=opts.max_iter {
        if max_abs(&cur.gradient) < opts.tol {
            return Ok(NewtonOutcome {
                params: x.as_slice().to_vec(),
                loglik: cur.value,
                iterations: iter - 1,
                converged: true,
            });
        }
        let direction = newton_direction(&cur.hessian, &cur.gradient)?;
        let slack = 1e-10 * (1.0 + cur.value.abs());
        let mut step = direction;
        let mut accepted = None;
        let mut saw_finite = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step;
            let next = objective(trial.as_slice());
            if next.value.is_finite() {
                saw_finite = true;
                if next.value >= cur.value - slack {
                    accepted = Some((trial, next));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((trial, next)) = accepted else {
            if !saw_finite {
                return Err(Error::Fit(format!(
                    "log-likelihood became non-finite at iteration {iter}"
                )));
            }
            // no ascent along the Newton direction: numerically at the optimum
            return Ok(NewtonOutcome {
                params: x.as_slice().to_vec(),
                loglik: cur.value,
                iterations: iter,
                converged: max_abs(&cur.gradient) < opts.tol.sqrt(),
            });
        };
        x = trial;
        cur = next;
        if guarded.iter().any(|&j| x[j].abs() > DIVERGENCE_BOUND) {
            return Ok(NewtonOutcome {
                params: x.as_slice().to_vec(),
                loglik: cur.value,
                iterations: iter,
                converged: false,
            });
        }
        if step.norm() < opts.tol || max_abs(&cur.gradient) < opts.tol {
            return Ok(NewtonOutcome {
                params: x.as_slice().to_vec(),
                loglik: cur.value,
                iterations: iter,
                converged: true,
            });
        }
    }
    Err(Error::Fit(format!(
        "Newton iteration did not converge in {} iterations",
        opts.max_iter
    )))
}

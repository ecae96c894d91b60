//! Internal numeric helpers: stable log-sum-exp and a small gradient
//! minimizer shared by the model fitters and the linear classifiers.

/// log(sum(exp(x))) without overflow; -inf for an empty slice.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = xs.iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

pub(crate) fn inf_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub(crate) struct Minimized {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

/// Gradient descent with a Barzilai-Borwein step guess and Armijo
/// backtracking, so the objective is non-increasing across iterations.
///
/// Stops when the accepted step or the gradient drops below `tol` in
/// inf-norm, or after `max_iterations` accepted steps.
pub(crate) fn minimize(
    f: &mut dyn FnMut(&[f64]) -> (f64, Vec<f64>),
    x0: Vec<f64>,
    max_iterations: usize,
    tol: f64,
) -> Minimized {
    const ARMIJO: f64 = 1e-4;
    const MIN_STEP: f64 = 1e-20;

    let mut x = x0;
    let (mut value, mut grad) = f(&x);
    let mut alpha = 1.0 / inf_norm(&grad).max(1.0);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
        if grad_sq.sqrt() == 0.0 {
            converged = true;
            break;
        }
        // Backtrack until sufficient decrease.
        let mut accepted = None;
        let mut step = alpha;
        while step > MIN_STEP {
            let candidate: Vec<f64> =
                x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
            let (cand_value, cand_grad) = f(&candidate);
            if cand_value <= value - ARMIJO * step * grad_sq {
                accepted = Some((candidate, cand_value, cand_grad, step));
                break;
            }
            step *= 0.5;
        }
        let Some((new_x, new_value, new_grad, used_step)) = accepted else {
            break; // line search failed; gradient direction exhausted
        };
        iterations += 1;

        let step_norm: f64 = x
            .iter()
            .zip(&new_x)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()));
        // BB1 step for the next iteration.
        let mut s_dot_y = 0.0;
        let mut s_dot_s = 0.0;
        for ((xi_new, xi_old), (gi_new, gi_old)) in
            new_x.iter().zip(&x).zip(new_grad.iter().zip(&grad))
        {
            let s = xi_new - xi_old;
            let y = gi_new - gi_old;
            s_dot_y += s * y;
            s_dot_s += s * s;
        }
        alpha = if s_dot_y > 0.0 {
            (s_dot_s / s_dot_y).clamp(1e-12, 1e12)
        } else {
            used_step * 2.0
        };

        x = new_x;
        value = new_value;
        grad = new_grad;

        if step_norm < tol || inf_norm(&grad) < tol {
            converged = true;
            break;
        }
    }

    let grad_norm = inf_norm(&grad);
    Minimized {
        x,
        value,
        iterations,
        converged,
        grad_norm,
    }
}

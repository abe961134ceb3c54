//! Small derivative-free and quasi-Newton minimisers.

use crate::scalar::Real;

/// Result of a local minimisation.
#[derive(Debug, Clone)]
pub(crate) struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Read only by the tests; callers restart until the gain stalls.
    #[cfg_attr(not(test), allow(dead_code))]
    pub converged: bool,
}

/// Nelder–Mead on an axis-aligned initial simplex of edge `scale`.
/// Stops when the spread of simplex values drops below `ftol` and the
/// simplex diameter below `xtol`.
pub(crate) fn nelder_mead<T: Real>(
    f: &mut impl FnMut(&[T]) -> T,
    x0: &[T],
    scale: T,
    xtol: T,
    ftol: T,
    max_iter: usize,
) -> Minimum<T> {
    let n = x0.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut simplex: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut vals: Vec<T> = simplex.iter().map(|v| f(v)).collect();
    let mut iter = 0;
    let mut converged = false;
    while iter < max_iter {
        iter += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| {
            vals[a]
                .partial_cmp(&vals[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = (vals[n] - vals[0]).abs();
        let diam = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if spread <= ftol && diam <= xtol {
            converged = true;
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += *x / T::from_usize_lossy(n);
            }
        }
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| *c + t * (*w - *c))
                .collect()
        };
        let xr = along(-T::one());
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-two);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let x = along(-half);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(half);
            let v = f(&x);
            (x, v)
        };
        if fc < vals[n].min(fr) {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let best = simplex[0].clone();
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = *b + half * (*x - *b);
            }
            vals[i] = f(&simplex[i]);
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| {
            vals[a]
                .partial_cmp(&vals[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: vals[best],
        converged,
    }
}

/// Settings for [`lbfgs`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct LbfgsOptions<T> {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop when `‖∇f‖_∞ <= gtol`.
    pub gtol: T,
    /// Stop when the decrease stays below `ftol · max(|f|, 1)` for
    /// `patience` consecutive iterations.
    pub ftol: T,
    pub patience: usize,
}

impl<T: Real> Default for LbfgsOptions<T> {
    fn default() -> Self {
        Self {
            memory: 12,
            max_iter: 5000,
            gtol: T::lit(1e-10),
            ftol: T::lit(1e-12),
            patience: 8,
        }
    }
}

/// Outcome of [`lbfgs`]; `history` holds the accepted objective values,
/// which are non-increasing.
#[derive(Debug, Clone)]
pub(crate) struct LbfgsResult<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub history: Vec<T>,
    pub converged: bool,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Limited-memory BFGS with Armijo backtracking. `f` writes the gradient
/// into its second argument and returns the value; non-finite values are
/// treated as infeasible and shrink the step.
pub(crate) fn lbfgs<T: Real>(
    f: &mut impl FnMut(&[T], &mut [T]) -> T,
    x0: &[T],
    opts: LbfgsOptions<T>,
) -> LbfgsResult<T> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![T::zero(); n];
    let mut fx = f(&x, &mut g);
    let mut history = vec![fx];
    let mut s_hist: Vec<Vec<T>> = Vec::new();
    let mut y_hist: Vec<Vec<T>> = Vec::new();
    let mut rho_hist: Vec<T> = Vec::new();
    let mut stall = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut x_new = vec![T::zero(); n];
    let mut g_new = vec![T::zero(); n];
    let c1 = T::lit(1e-4);
    let gnorm = |g: &[T]| g.iter().fold(T::zero(), |a, v| a.max(v.abs()));

    while iterations < opts.max_iter {
        if !fx.is_finite() {
            break;
        }
        if gnorm(&g) <= opts.gtol {
            converged = true;
            break;
        }
        iterations += 1;
        // Two-loop recursion.
        let mut d: Vec<T> = g.iter().map(|v| -*v).collect();
        let m = s_hist.len();
        let mut alpha = vec![T::zero(); m];
        for i in (0..m).rev() {
            alpha[i] = rho_hist[i] * dot(&s_hist[i], &d);
            for (dj, yj) in d.iter_mut().zip(&y_hist[i]) {
                *dj -= alpha[i] * *yj;
            }
        }
        let gamma = if m > 0 {
            dot(&s_hist[m - 1], &y_hist[m - 1]) / dot(&y_hist[m - 1], &y_hist[m - 1])
        } else {
            T::one() / gnorm(&g).max(T::epsilon())
        };
        for dj in d.iter_mut() {
            *dj *= gamma;
        }
        for i in 0..m {
            let beta = rho_hist[i] * dot(&y_hist[i], &d);
            for (dj, sj) in d.iter_mut().zip(&s_hist[i]) {
                *dj += (alpha[i] - beta) * *sj;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            // Not a descent direction: fall back to steepest descent.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = g
                .iter()
                .map(|v| -*v / gnorm(&g).max(T::epsilon()))
                .collect();
            slope = dot(&g, &d);
        }
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..50 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            let f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + c1 * step * slope {
                let s: Vec<T> = (0..n).map(|i| x_new[i] - x[i]).collect();
                let y: Vec<T> = (0..n).map(|i| g_new[i] - g[i]).collect();
                let sy = dot(&s, &y);
                if sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    if s_hist.len() == opts.memory {
                        s_hist.remove(0);
                        y_hist.remove(0);
                        rho_hist.remove(0);
                    }
                    s_hist.push(s);
                    y_hist.push(y);
                    rho_hist.push(T::one() / sy);
                }
                let decrease = fx - f_new;
                std::mem::swap(&mut x, &mut x_new);
                std::mem::swap(&mut g, &mut g_new);
                fx = f_new;
                history.push(fx);
                if decrease <= opts.ftol * fx.abs().max(T::one()) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                accepted = true;
                break;
            }
            step *= T::lit(0.5);
        }
        if !accepted {
            if s_hist.is_empty() {
                // Steepest descent failed too: at the resolution limit.
                converged = true;
                break;
            }
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            continue;
        }
        if stall >= opts.patience {
            converged = true;
            break;
        }
    }
    LbfgsResult {
        x,
        iterations,
        history,
        converged,
    }
}

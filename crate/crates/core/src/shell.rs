//! First radial eigenvalues of balls and spherical shells, the partition
//! characterisation of `μ_k`, and closed-form upper bounds.
//!
//! `μ_k(p)` is the smallest value of `max_i λ_1(shell(r_i, r_{i+1}))` over
//! partitions `0 = r_0 < r_1 < … < r_k = 1`, the innermost shell being the
//! ball of radius `r_1`; at the minimiser all `k` values coincide.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::ode::{Dopri5, Flow, State};
use crate::radial::{radial_eigenvalue, Params, RadialSystem};
use crate::scalar::Real;

const SHELL_TOL: f64 = 1e-12;
const LAMBDA_RTOL: f64 = 1e-11;

/// Interior radii `0 < r_1 < … < r_{k-1} < 1` of a partition of the unit
/// ball into `k` pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition<T> {
    pub radii: Vec<T>,
    pub k: usize,
}

impl<T: Real> Partition<T> {
    pub fn new(radii: Vec<T>) -> Result<Self> {
        let ok = radii.first().is_none_or(|r| *r > T::zero())
            && radii.last().is_none_or(|r| *r < T::one())
            && radii.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return invalid("partition radii must be strictly increasing inside (0, 1)");
        }
        let k = radii.len() + 1;
        Ok(Self { radii, k })
    }

    /// `[0, r_1, …, r_{k-1}, 1]`.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.k + 1);
        v.push(T::zero());
        v.extend_from_slice(&self.radii);
        v.push(T::one());
        v
    }
}

/// `λ_1` of the ball of radius `r1`, by scaling `μ_1(p) / r1^p`.
pub fn first_eigen_ball<T: Real>(params: &Params<T>, r1: T) -> Result<EigenEstimate<T>> {
    if !(r1 > T::zero()) || r1 > T::one() {
        return invalid(format!("ball radius must lie in (0, 1], got {r1}"));
    }
    let mu1 = radial_eigenvalue(params, 1)?;
    let scale = r1.powf(-params.p);
    Ok(EigenEstimate::new(
        mu1.value * scale,
        Method::Shooting,
        mu1.tol * scale,
        mu1.iterations,
    ))
}

/// Integrates the shell problem `u(a) = 0, u'(a) = 1` up to `b` and returns
/// the number of sign changes of `u` in `(a, b]` (capped at 2) and `u(b)`.
fn shell_shot<T: Real>(params: &Params<T>, lambda: T, a: T, b: T) -> Result<(usize, T)> {
    let sys = RadialSystem::new(params, lambda);
    let f = |t: T, y: &State<T>| sys.rhs(t, y);
    let ode = Dopri5::new(T::lit(SHELL_TOL));
    let mut count = 0;
    let h0 = (b - a) * T::lit(1e-3);
    let (_, y) = ode.integrate(&f, a, sys.shell_start(a), b, h0, |_, ya, _, yb| {
        if ya[0] != T::zero() && yb[0] != T::zero() && ya[0].signum() != yb[0].signum() {
            count += 1;
        }
        Ok(if count >= 2 {
            Flow::Stop
        } else {
            Flow::Continue
        })
    })?;
    Ok((count, y[0]))
}

/// `1D` first eigenvalue `(p-1)(π_p/L)^p` of an interval of length `L`.
fn interval_eigenvalue<T: Real>(p: T, len: T) -> T {
    let one = T::one();
    let pi_p = T::lit(2.0) * T::PI() * (p - one).powf(one / p) / (p * (T::PI() / p).sin());
    (p - one) * (pi_p / len).powf(p)
}

/// Unchecked shell eigenvalue; `b` may exceed 1.
fn shell_eigen_raw<T: Real>(params: &Params<T>, a: T, b: T) -> Result<(T, usize)> {
    let p = params.p;
    let h = T::lit(2.0) / (b - a);
    let mut lo = (h / p).powf(p);
    let weight = (b / a).powi(params.dim as i32 - 1);
    let mut hi = weight * interval_eigenvalue(p, b - a);
    let mut evals = 0;

    let (c, _) = shell_shot(params, lo, a, b)?;
    evals += 1;
    if c != 0 {
        return Err(Error::Internal(format!(
            "Cheeger lower bound {lo} is not below the shell eigenvalue on ({a}, {b})"
        )));
    }
    let mut hi_state = shell_shot(params, hi, a, b)?;
    evals += 1;
    let mut doublings = 0;
    while hi_state.0 == 0 {
        lo = hi;
        hi *= T::lit(2.0);
        hi_state = shell_shot(params, hi, a, b)?;
        evals += 1;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Resource(format!(
                "no bracket for the shell eigenvalue on ({a}, {b}) in λ ∈ [{lo}, {hi}]"
            )));
        }
    }
    // Bisection in log λ until exactly one zero at the upper end, then
    // Illinois on u(b; λ).
    let rtol = T::lit(LAMBDA_RTOL);
    while hi_state.0 > 1 {
        let mid = (lo * hi).sqrt();
        let s = shell_shot(params, mid, a, b)?;
        evals += 1;
        if s.0 == 0 {
            lo = mid;
        } else {
            hi = mid;
            hi_state = s;
        }
        if hi / lo - T::one() < rtol {
            return Ok(((lo * hi).sqrt(), evals));
        }
    }
    let mut f_lo = shell_shot(params, lo, a, b)?.1;
    let mut f_hi = hi_state.1;
    let mut side = 0i8;
    for _ in 0..200 {
        if hi / lo - T::one() < rtol {
            break;
        }
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            x = (lo + hi) / T::lit(2.0);
        }
        let (c, fx) = shell_shot(params, x, a, b)?;
        evals += 1;
        if fx == T::zero() && c == 0 {
            return Ok((x, evals));
        }
        if c == 0 && fx > T::zero() {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi /= T::lit(2.0);
            }
            side = -1;
        } else {
            hi = x;
            f_hi = if c >= 2 { -f_lo.abs() } else { fx };
            if side == 1 {
                f_lo /= T::lit(2.0);
            }
            side = 1;
        }
    }
    Ok(((lo + hi) / T::lit(2.0), evals))
}

/// `λ_1` of the shell `a < |x| < b` (radial Dirichlet problem).
pub fn first_eigen_shell<T: Real>(params: &Params<T>, a: T, b: T) -> Result<EigenEstimate<T>> {
    params.check_solver_range()?;
    if !(a > T::zero()) || !(b > a) || b > T::one() {
        return invalid(format!("shell needs 0 < a < b <= 1, got ({a}, {b})"));
    }
    let (value, evals) = shell_eigen_raw(params, a, b)?;
    Ok(EigenEstimate::new(
        value,
        Method::Partition,
        value * T::lit(LAMBDA_RTOL),
        evals,
    ))
}

/// Outer radius `x > a` of the shell `(a, x)` whose first eigenvalue is
/// `lambda`; the eigenvalue decreases in `x`.
fn equalizing_radius<T: Real>(params: &Params<T>, a: T, lambda: T) -> Result<T> {
    let g = |x: T| -> Result<T> { Ok((shell_eigen_raw(params, a, x)?.0 / lambda).ln()) };
    // Widths between the 1D bound and the Cheeger bound bracket the root.
    let p = params.p;
    let w_small = T::lit(2.0) / (p * lambda.powf(p.recip()));
    let mut lo = a + w_small * T::lit(0.999);
    let mut g_lo = g(lo)?;
    if g_lo < T::zero() {
        return Err(Error::Internal(
            "Cheeger width does not bound the shell".into(),
        ));
    }
    let mut hi = a + (lo - a) * T::lit(2.0);
    let mut g_hi = g(hi)?;
    while g_hi > T::zero() {
        lo = hi;
        g_lo = g_hi;
        hi = a + (hi - a) * T::lit(2.0);
        g_hi = g(hi)?;
        if hi > T::lit(1e3) {
            return Err(Error::Resource("equalizing radius beyond 1e3".into()));
        }
    }
    let tol = T::lit(1e-12);
    let mut side = 0i8;
    for _ in 0..100 {
        if hi - lo <= tol * hi {
            break;
        }
        let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(x > lo && x < hi) {
            x = (lo + hi) / T::lit(2.0);
        }
        let gx = g(x)?;
        if gx == T::zero() {
            return Ok(x);
        }
        if gx > T::zero() {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi /= T::lit(2.0);
            }
            side = -1;
        } else {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo /= T::lit(2.0);
            }
            side = 1;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Chains equal-eigenvalue shells outward from the ball of radius
/// `(μ_1/λ)^{1/p}`; returns the `k` outer radii.
fn chain<T: Real>(params: &Params<T>, mu1: T, lambda: T, k: usize) -> Result<Vec<T>> {
    let mut radii = Vec::with_capacity(k);
    let mut r = (mu1 / lambda).powf(params.p.recip());
    radii.push(r);
    for _ in 1..k {
        r = equalizing_radius(params, r, lambda)?;
        radii.push(r);
    }
    Ok(radii)
}

/// Minimises the largest shell eigenvalue over partitions into `k` pieces.
///
/// Every shell is kept at the same eigenvalue `λ`: the ball radius follows
/// from scaling and each further radius from a 1D solve. The outer radius
/// then decreases in `λ`, and a safeguarded secant on `λ` brings it to 1.
pub fn partition_minmax<T: Real>(
    params: &Params<T>,
    k: usize,
) -> Result<(EigenEstimate<T>, Partition<T>)> {
    params.check_solver_range()?;
    if k < 2 {
        return invalid(format!("partition needs k >= 2, got {k}"));
    }
    let mu1 = radial_eigenvalue(params, 1)?.value;
    let p = params.p;
    let outer = |lambda: T| -> Result<(T, Vec<T>)> {
        let radii = chain(params, mu1, lambda, k)?;
        Ok((radii[k - 1].ln(), radii))
    };
    // Equal-width shells give a value above μ_k; the ball alone gives one
    // below.
    let mut lo = mu1;
    let mut f_lo = outer(lo)?.0;
    let mut hi = mu1 * T::from_usize_lossy(k).powf(p) * T::lit(4.0);
    let mut f_hi = outer(hi)?.0;
    let mut iterations = 2;
    while f_hi > T::zero() {
        lo = hi;
        f_lo = f_hi;
        hi *= T::lit(4.0);
        f_hi = outer(hi)?.0;
        iterations += 1;
        if iterations > 40 {
            return Err(Error::Resource(
                "no bracket for the partition eigenvalue".into(),
            ));
        }
    }
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    let mut best: Option<(T, Vec<T>)> = None;
    let mut side = 0i8;
    let rtol = T::lit(1e-10);
    while lhi - llo > rtol {
        iterations += 1;
        if iterations > 200 {
            let (l, radii) = best.unwrap_or((lo, vec![]));
            return Err(Error::NonConvergence {
                iterations,
                best: l.to_f64_lossy(),
                context: format!("partition radii {radii:?}"),
            });
        }
        let mut x = (llo * f_hi - lhi * f_lo) / (f_hi - f_lo);
        if !(x > llo && x < lhi) {
            x = (llo + lhi) / T::lit(2.0);
        }
        let (fx, radii) = outer(x.exp())?;
        best = Some((x.exp(), radii));
        if fx == T::zero() {
            break;
        }
        if fx > T::zero() {
            llo = x;
            f_lo = fx;
            if side == -1 {
                f_hi /= T::lit(2.0);
            }
            side = -1;
        } else {
            lhi = x;
            f_hi = fx;
            if side == 1 {
                f_lo /= T::lit(2.0);
            }
            side = 1;
        }
        if fx.abs() < T::lit(1e-13) {
            break;
        }
    }
    let (lambda, mut radii) =
        best.ok_or_else(|| Error::Internal("empty partition search".into()))?;
    radii.truncate(k - 1);
    let partition = Partition::new(radii)?;
    let tol = lambda * T::lit(1e-9);
    Ok((
        EigenEstimate::new(lambda, Method::Partition, tol, iterations),
        partition,
    ))
}

/// First eigenvalues of the `k` pieces of a partition, innermost first.
pub fn partition_values<T: Real>(params: &Params<T>, partition: &Partition<T>) -> Result<Vec<T>> {
    let b = partition.breakpoints();
    let mut out = vec![first_eigen_ball(params, b[1])?.value];
    for w in b[1..].windows(2) {
        out.push(first_eigen_shell(params, w[0], w[1])?.value);
    }
    Ok(out)
}

/// `(2k-1)^p (p+1) max{(p+2)/2, 1}`, an upper bound for `μ_k(p)` in the plane
/// from piecewise-linear test functions.
pub fn analytic_upper_bound_pinf<T: Real>(p: T, k: usize) -> Result<T> {
    if !(p > T::one()) || k == 0 {
        return invalid(format!("need p > 1 and k >= 1, got p={p}, k={k}"));
    }
    let two = T::lit(2.0);
    let m = T::from_usize_lossy(2 * k - 1);
    Ok(m.powf(p) * (p + T::one()) * ((p + two) / two).max(T::one()))
}

/// `2 k^p / (ε^{p-1} (1 - 2ε))`, the Rayleigh quotient bound from trapezoid
/// test functions of ramp width `ε` on `k` equal shells (planar).
pub fn analytic_upper_bound_p1<T: Real>(p: T, k: usize, eps: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(p > T::one()) || k == 0 || !(eps > T::zero()) || !(eps < T::lit(0.5)) {
        return invalid(format!(
            "need p > 1, k >= 1, 0 < eps < 1/2, got p={p}, k={k}, eps={eps}"
        ));
    }
    let kf = T::from_usize_lossy(k);
    // Per shell i: numerator k^{p-2}(2i+1)/ε^{p-1}, denominator bounded below
    // by k^{-2}(2i+1)(1-2ε)/2; the ratio does not depend on i.
    let ratio = |i: usize| {
        let m = T::from_usize_lossy(2 * i + 1);
        let num = kf.powf(p - two) * m / eps.powf(p - T::one());
        let den = m * (T::one() - two * eps) / (two * kf * kf);
        num / den
    };
    Ok((0..k).map(ratio).fold(T::zero(), T::max))
}

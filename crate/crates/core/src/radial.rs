//! Radial eigenvalues of the Dirichlet p-Laplacian on the unit ball.
//!
//! The Cauchy problem
//!
//! ```text
//! -(r^{N-1} |u'|^{p-2} u')' = r^{N-1} |u|^{p-2} u,   u(0) = 1, u'(0) = 0
//! ```
//!
//! is integrated as the first-order system in `(u, w)` where
//! `w = r^{N-1} |u'|^{p-2} u'` is the flux:
//!
//! ```text
//! u' = φ_q(w / r^{N-1}),   w' = -λ r^{N-1} φ_p(u),   φ_s(t) = |t|^{s-2} t,
//! ```
//!
//! with `q = p/(p-1)`. Only `φ_q` ever touches the derivative, so the
//! degenerate factor `|u'|^{p-2}` is never evaluated at `u' = 0`. If `ν_k` is
//! the k-th zero of the solution with `λ = 1`, the k-th radial eigenvalue is
//! `μ_k = ν_k^p` and the eigenfunction is `Φ(ν_k r)`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::ode::{Dopri5, Flow, State};
use crate::scalar::{signed_pow, Real};

/// Start of the integration; the interval `[0, R0]` is covered by the
/// startup series.
pub const STARTUP_RADIUS: f64 = 1e-4;
/// Width of the final bisection bracket around each zero of `u`.
pub const ZERO_BRACKET: f64 = 1e-12;
/// Supported range of the exponent for the ODE solvers.
pub const P_RANGE: (f64, f64) = (1.05, 60.0);
/// Default per-step tolerance of the shooting solver.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Exponent `p > 1` and dimension `N >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params<T> {
    pub p: T,
    pub dim: usize,
}

impl<T: Real> Params<T> {
    pub fn new(p: T, dim: usize) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return invalid(format!("exponent p must be > 1, got {p}"));
        }
        if dim < 2 {
            return invalid(format!("dimension N must be >= 2, got {dim}"));
        }
        Ok(Self { p, dim })
    }

    /// Planar parameters, `N = 2`.
    pub fn planar(p: T) -> Result<Self> {
        Self::new(p, 2)
    }

    /// Conjugate exponent `q = p / (p - 1)`.
    pub fn conjugate(&self) -> T {
        self.p / (self.p - T::one())
    }

    pub(crate) fn check_solver_range(&self) -> Result<()> {
        let (lo, hi) = (T::lit(P_RANGE.0), T::lit(P_RANGE.1));
        if self.p < lo || self.p > hi {
            return invalid(format!(
                "p = {} outside the shooting range [{lo}, {hi}]; use the limit formulas",
                self.p
            ));
        }
        Ok(())
    }
}

/// Right-hand side of the radial system with eigenvalue parameter `λ`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialSystem<T> {
    p: T,
    q: T,
    weight_power: i32,
    dim: T,
    lambda: T,
}

impl<T: Real> RadialSystem<T> {
    pub fn new(params: &Params<T>, lambda: T) -> Self {
        Self {
            p: params.p,
            q: params.conjugate(),
            weight_power: params.dim as i32 - 1,
            dim: T::from_usize_lossy(params.dim),
            lambda,
        }
    }

    #[inline]
    pub fn rhs(&self, r: T, y: &State<T>) -> State<T> {
        let weight = r.powi(self.weight_power);
        [
            signed_pow(y[1] / weight, self.q),
            -self.lambda * weight * signed_pow(y[0], self.p),
        ]
    }

    /// Leading-order series of the regular solution with `u(0) = 1`.
    pub fn startup(&self, r: T) -> State<T> {
        let one = T::one();
        let pm1 = self.p - one;
        let u =
            one - pm1 / self.p * (self.lambda / self.dim).powf(one / pm1) * r.powf(self.p / pm1);
        let w = -self.lambda * r.powi(self.weight_power + 1) / self.dim;
        [u, w]
    }

    /// Flux at the inner end of a shell where `u = 0`, `u' = 1`.
    pub fn shell_start(&self, a: T) -> State<T> {
        [T::zero(), a.powi(self.weight_power)]
    }
}

/// Sampled solution of the Cauchy problem.
#[derive(Debug, Clone, Serialize)]
pub struct RadialSolution<T> {
    /// Strictly increasing radii, starting at 0.
    pub grid: Vec<T>,
    /// `Φ(r)` on the grid.
    pub u: Vec<T>,
    /// Flux `r^{N-1} |Φ'|^{p-2} Φ'` on the grid.
    pub w: Vec<T>,
    /// Zeros of `Φ` located during integration, refined by bisection.
    pub zeros: Vec<T>,
    pub params: Params<T>,
    pub tol: T,
    /// Accepted integrator steps.
    pub steps: usize,
}

impl<T: Real> RadialSolution<T> {
    pub fn r_max(&self) -> T {
        *self.grid.last().expect("nonempty grid")
    }

    /// `(Φ(r), flux(r))` for any `r` in `[0, r_max]`, by re-stepping the
    /// integrator from the nearest grid point on the left.
    pub fn eval(&self, r: T) -> Result<State<T>> {
        if r < T::zero() || r > self.r_max() {
            return invalid(format!("radius {r} outside [0, {}]", self.r_max()));
        }
        let sys = RadialSystem::new(&self.params, T::one());
        if r <= self.grid[1] {
            if r == T::zero() {
                return Ok([T::one(), T::zero()]);
            }
            if r <= T::lit(STARTUP_RADIUS) {
                return Ok(sys.startup(r));
            }
        }
        let idx = match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => return Ok([self.u[i], self.w[i]]),
            Err(i) => i - 1,
        };
        let ode = Dopri5::new(self.tol);
        let f = |t: T, y: &State<T>| sys.rhs(t, y);
        Ok(ode.restep(
            &f,
            self.grid[idx],
            &[self.u[idx], self.w[idx]],
            r - self.grid[idx],
        ))
    }
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !(tol > T::zero()) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// Refines a sign change of `u` inside an accepted step by bisection on the
/// re-stepped solution.
pub(crate) fn refine_zero<T, F>(ode: &Dopri5<T>, f: &F, t0: T, y0: &State<T>, t1: T) -> T
where
    T: Real,
    F: Fn(T, &State<T>) -> State<T>,
{
    let (mut lo, mut hi) = (t0, t1);
    let s0 = y0[0].signum();
    let width = T::lit(ZERO_BRACKET);
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        let y = ode.restep(f, t0, y0, mid - t0);
        if y[0] == T::zero() {
            return mid;
        }
        if y[0].signum() == s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / T::lit(2.0)
}

fn integrate_cauchy<T: Real>(
    params: &Params<T>,
    r_max: T,
    tol: T,
    stop_after: Option<usize>,
) -> Result<RadialSolution<T>> {
    let sys = RadialSystem::new(params, T::one());
    let f = |t: T, y: &State<T>| sys.rhs(t, y);
    let ode = Dopri5::new(tol);
    let r0 = T::lit(STARTUP_RADIUS);
    let y0 = sys.startup(r0);
    let mut grid = vec![T::zero(), r0];
    let mut u = vec![T::one(), y0[0]];
    let mut w = vec![T::zero(), y0[1]];
    let mut zeros = Vec::new();
    ode.integrate(&f, r0, y0, r_max, r0, |t0, ya, t1, yb| {
        if ya[0] != T::zero() && (yb[0] == T::zero() || ya[0].signum() != yb[0].signum()) {
            zeros.push(refine_zero(&ode, &f, t0, ya, t1));
        }
        grid.push(t1);
        u.push(yb[0]);
        w.push(yb[1]);
        match stop_after {
            Some(k) if zeros.len() >= k => Ok(Flow::Stop),
            _ => Ok(Flow::Continue),
        }
    })?;
    let steps = grid.len() - 2;
    Ok(RadialSolution {
        grid,
        u,
        w,
        zeros,
        params: *params,
        tol,
        steps,
    })
}

/// Integrates the Cauchy problem on `[0, r_max]` with per-step tolerance
/// `tol`.
pub fn solve_cauchy<T: Real>(params: &Params<T>, r_max: T, tol: T) -> Result<RadialSolution<T>> {
    params.check_solver_range()?;
    check_tol(tol)?;
    if !(r_max > T::lit(STARTUP_RADIUS)) {
        return invalid(format!("r_max must exceed the startup radius, got {r_max}"));
    }
    integrate_cauchy(params, r_max, tol, None)
}

/// First `k_max` zeros `ν_1 < … < ν_{k_max}` recorded in `sol`.
pub fn zeros_of_phi<T: Real>(sol: &RadialSolution<T>, k_max: usize) -> Result<Vec<T>> {
    if k_max == 0 {
        return invalid("k_max must be >= 1");
    }
    if sol.zeros.len() < k_max {
        return Err(Error::Resource(format!(
            "only {} sign changes of Φ on [0, {}], need {k_max}",
            sol.zeros.len(),
            sol.r_max()
        )));
    }
    Ok(sol.zeros[..k_max].to_vec())
}

/// Solves the Cauchy problem on a growing radius until `k_max` zeros are
/// bracketed. `r_max` starts at `2 k_max` and doubles up to `16 k_max`.
pub fn shoot<T: Real>(params: &Params<T>, k_max: usize, tol: T) -> Result<RadialSolution<T>> {
    params.check_solver_range()?;
    check_tol(tol)?;
    if k_max == 0 {
        return invalid("k_max must be >= 1");
    }
    let cap = T::from_usize_lossy(16 * k_max);
    let mut r_max = T::from_usize_lossy(2 * k_max);
    loop {
        let sol = integrate_cauchy(params, r_max, tol, Some(k_max))?;
        if sol.zeros.len() >= k_max {
            return Ok(sol);
        }
        if r_max >= cap {
            return Err(Error::Resource(format!(
                "found {} of {k_max} zeros below r = {cap}",
                sol.zeros.len()
            )));
        }
        r_max = (r_max * T::lit(2.0)).min(cap);
    }
}

/// The k-th radial eigenvalue `μ_k(p) = ν_k(p)^p`.
pub fn radial_eigenvalue<T: Real>(params: &Params<T>, k: usize) -> Result<EigenEstimate<T>> {
    if k == 0 {
        return invalid("eigenvalue index k must be >= 1");
    }
    let sol = shoot(params, k, T::lit(DEFAULT_TOL))?;
    let nu = zeros_of_phi(&sol, k)?[k - 1];
    let value = nu.powf(params.p);
    // Zero located to the bisection width plus the integration tolerance,
    // propagated through ν ↦ ν^p.
    let dnu = T::lit(ZERO_BRACKET) + T::lit(DEFAULT_TOL) * T::lit(100.0) * nu;
    let tol = params.p * value / nu * dnu;
    Ok(EigenEstimate::new(value, Method::Shooting, tol, sol.steps))
}

/// Radial eigenvalues `μ_1 … μ_{k_max}` from a single integration.
pub fn radial_eigenvalues<T: Real>(params: &Params<T>, k_max: usize) -> Result<Vec<T>> {
    let sol = shoot(params, k_max, T::lit(DEFAULT_TOL))?;
    Ok(zeros_of_phi(&sol, k_max)?
        .into_iter()
        .map(|nu| nu.powf(params.p))
        .collect())
}

/// Samples of a radial eigenfunction on the unit interval.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile<T> {
    pub r: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> RadialProfile<T> {
    /// Number of sign changes strictly inside the sampled interval, ignoring
    /// exact zeros at the end points.
    pub fn interior_sign_changes(&self) -> usize {
        let signs: Vec<T> = self
            .values
            .iter()
            .filter(|v| **v != T::zero())
            .map(|v| v.signum())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// `Φ_k(r) = Φ(ν_k r)` sampled on `grid ⊂ [0, 1]`.
pub fn radial_eigenfunction<T: Real>(
    params: &Params<T>,
    k: usize,
    grid: &[T],
) -> Result<RadialProfile<T>> {
    if k == 0 {
        return invalid("eigenvalue index k must be >= 1");
    }
    if grid.iter().any(|r| *r < T::zero() || *r > T::one()) {
        return invalid("eigenfunction grid must lie in [0, 1]");
    }
    let sol = shoot(params, k, T::lit(DEFAULT_TOL))?;
    let nu = sol.zeros[k - 1];
    let values = grid
        .iter()
        .map(|&r| {
            if r == T::one() {
                Ok(T::zero())
            } else {
                sol.eval(nu * r).map(|s| s[0])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        r: grid.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integration_starts_from_the_series() {
        for p in [1.3, 2.0, 4.5] {
            let params = Params::<f64>::new(p, 3).unwrap();
            let sol = solve_cauchy(&params, 1.0, 1e-10).unwrap();
            let series = RadialSystem::new(&params, 1.0).startup(STARTUP_RADIUS);
            assert_eq!(sol.u[1], series[0]);
        }
    }
}

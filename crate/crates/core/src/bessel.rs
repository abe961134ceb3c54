//! Bessel functions of integer order and their zeros.
//!
//! At `p = 2` the disk spectrum is explicit: eigenvalues are `α_{n,k}²`
//! where `α_{n,k}` is the k-th positive zero of `J_n`, with one radial
//! eigenfunction for `n = 0` and two angular ones for `n >= 1`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::limits::nk_index;
use crate::scalar::Real;

pub const MAX_ORDER: usize = 60;
pub const MAX_ARGUMENT: f64 = 200.0;
pub const MAX_ZERO_ORDER: usize = 50;
pub const MAX_ZERO_INDEX: usize = 20;
const ZERO_TOL: f64 = 1e-13;

/// `J_n(x)` for `0 <= n <= 60`, `0 <= x <= 200`.
pub fn bessel_j<T: Real>(n: usize, x: T) -> Result<T> {
    if n > MAX_ORDER {
        return invalid(format!("Bessel order {n} exceeds {MAX_ORDER}"));
    }
    if !(x >= T::zero()) || x > T::lit(MAX_ARGUMENT) {
        return invalid(format!("Bessel argument {x} outside [0, {MAX_ARGUMENT}]"));
    }
    Ok(jn_pair(n, x).0)
}

/// `(J_n(x), J_{n+1}(x))` for `x >= 0`, no range checks.
pub(crate) fn jn_pair<T: Real>(n: usize, x: T) -> (T, T) {
    if x == T::zero() {
        return if n == 0 {
            (T::one(), T::zero())
        } else {
            (T::zero(), T::zero())
        };
    }
    if x < T::one() {
        return (series(n, x), series(n + 1, x));
    }
    miller(n, x)
}

fn series<T: Real>(n: usize, x: T) -> T {
    let half = x / T::lit(2.0);
    let mut lead = T::one();
    for j in 1..=n {
        lead = lead * half / T::from_usize_lossy(j);
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for m in 1..60 {
        term = term * q / (T::from_usize_lossy(m) * T::from_usize_lossy(m + n));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalised by `J_0 + 2 Σ J_{2k} = 1`.
fn miller<T: Real>(n: usize, x: T) -> (T, T) {
    let xf = x.to_f64_lossy();
    let base = (n as f64).max(xf.ceil());
    let start = base + 20.0 + (40.0 * base).sqrt();
    let m = 2 * (start as usize).div_ceil(2);
    let two_over_x = T::lit(2.0) / x;
    let big = T::max_value().sqrt();
    let mut j_next = T::zero();
    let mut j_cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    let mut out = (T::zero(), T::zero());
    // Invariant: j_cur holds the unnormalised J_k, j_next holds J_{k+1}.
    for k in (0..=m).rev() {
        if k == n {
            out = (j_cur, j_next);
        }
        if k % 2 == 0 {
            norm += if k == 0 { j_cur } else { T::lit(2.0) * j_cur };
        }
        if k == 0 {
            break;
        }
        let j_prev = T::from_usize_lossy(k) * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > big {
            let s = T::one() / big;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            out.0 *= s;
            out.1 *= s;
        }
    }
    (out.0 / norm, out.1 / norm)
}

/// A zero `α_{n,k}` of `J_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselZeroLabel<T> {
    pub n: usize,
    pub k: usize,
    pub alpha: T,
}

/// The k-th positive zero of `J_n`, for `n <= 50`, `1 <= k <= 20`.
pub fn bessel_zero<T: Real>(n: usize, k: usize) -> Result<BesselZeroLabel<T>> {
    if n > MAX_ZERO_ORDER || k == 0 || k > MAX_ZERO_INDEX {
        return invalid(format!(
            "zero index (n={n}, k={k}) outside n <= {MAX_ZERO_ORDER}, 1 <= k <= {MAX_ZERO_INDEX}"
        ));
    }
    Ok(BesselZeroLabel {
        n,
        k,
        alpha: zero_unchecked(n, k)?,
    })
}

/// Asymptotic first guess: McMahon's expansion in `1/β` when `k` dominates,
/// the Airy-type uniform expansion in `n^{-1/3}` otherwise.
fn zero_guess(n: usize, k: usize) -> f64 {
    use std::f64::consts::PI;
    let nf = n as f64;
    let kf = k as f64;
    if n == 0 || k > n {
        let beta = (kf + nf / 2.0 - 0.25) * PI;
        let mu = 4.0 * nf * nf;
        let b8 = 8.0 * beta;
        beta - (mu - 1.0) / b8
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
            - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
    } else {
        let t = 3.0 * PI * (4.0 * kf - 1.0) / 8.0;
        let airy = t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t) - 5.0 / 36.0 / t.powi(4));
        let s = (nf / 2.0).cbrt();
        nf + airy * s + 0.15 * airy * airy / s
    }
}

pub(crate) fn zero_unchecked<T: Real>(n: usize, k: usize) -> Result<T> {
    Ok(*zeros_upto::<T>(n, k)?.last().expect("k >= 1"))
}

/// The first `k` positive zeros of `J_n`.
///
/// `J_n` has no zeros in `(0, n]` and consecutive zeros are more than `π`
/// apart, so a forward scan in steps of 1/4 from `n` (and then from each
/// zero found) brackets every zero in order. The asymptotic guess only seeds
/// the Newton iteration inside the bracket.
pub(crate) fn zeros_upto<T: Real>(n: usize, k: usize) -> Result<Vec<T>> {
    let f = |x: T| jn_pair(n, x).0;
    let step = T::lit(0.25);
    let mut out = Vec::with_capacity(k);
    let mut a = T::from_usize_lossy(n).max(step);
    for idx in 1..=k {
        let mut fa = f(a);
        let mut bracket = None;
        for _ in 0..2000 {
            let b = a + step;
            let fb = f(b);
            if fa == T::zero() || fa.signum() != fb.signum() {
                bracket = Some((a, b));
                break;
            }
            a = b;
            fa = fb;
        }
        let (lo, hi) = bracket.ok_or_else(|| {
            Error::Internal(format!("no sign change of J_{n} found for zero {idx}"))
        })?;
        let z = refine(n, lo, hi, T::lit(zero_guess(n, idx)))?;
        out.push(z);
        a = z + step;
    }
    Ok(out)
}

fn refine<T: Real>(n: usize, mut lo: T, mut hi: T, guess: T) -> Result<T> {
    let mut f_lo = jn_pair(n, lo).0;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        (lo + hi) / T::lit(2.0)
    };
    let tol = T::lit(ZERO_TOL);
    for _ in 0..200 {
        let (j, j1) = jn_pair(n, x);
        if j == T::zero() {
            return Ok(x);
        }
        if j.signum() == f_lo.signum() {
            lo = x;
            f_lo = j;
        } else {
            hi = x;
        }
        // J_n'(x) = (n/x) J_n - J_{n+1}
        let d = T::from_usize_lossy(n) / x * j - j1;
        let newton = x - j / d;
        let next = if d != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        if (next - x).abs() <= tol * x.max(T::one()) || hi - lo <= tol * x.max(T::one()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Internal(format!(
        "zero refinement of J_{n} near {x} did not settle"
    )))
}

/// One eigenvalue of the Dirichlet Laplacian on the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskEigenvalue<T> {
    pub value: T,
    /// Number of linearly independent eigenfunctions (1 radial, 2 angular).
    pub multiplicity: usize,
    pub n: usize,
    pub k: usize,
}

/// The first `count` distinct eigenvalues `α_{n,k}²` of the unit disk at
/// `p = 2`, ascending.
pub fn disk_spectrum_p2<T: Real>(count: usize) -> Result<Vec<DiskEigenvalue<T>>> {
    if count > 200 {
        return invalid(format!("count {count} exceeds 200"));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut limit = T::lit(10.0);
    loop {
        let mut out = Vec::new();
        for n in 0.. {
            if zero_unchecked::<T>(n, 1)? >= limit {
                break;
            }
            let mut k = 1;
            loop {
                let zs: Vec<T> = zeros_upto(n, k)?;
                if *zs.last().expect("k >= 1") >= limit {
                    for (i, alpha) in zs.into_iter().enumerate().filter(|(_, a)| *a < limit) {
                        out.push(DiskEigenvalue {
                            value: alpha * alpha,
                            multiplicity: if n == 0 { 1 } else { 2 },
                            n,
                            k: i + 1,
                        });
                    }
                    break;
                }
                k *= 2;
            }
        }
        if out.len() >= count {
            out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
            out.truncate(count);
            return Ok(out);
        }
        limit *= T::lit(1.5);
    }
}

/// Numbers behind `α_{0,k} < α_{n(k),1}` for the crossing theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem4Base<T> {
    pub k: usize,
    pub n: usize,
    pub alpha_0k: T,
    pub alpha_n1: T,
    /// `π k − 1/2`, an upper bound for `α_{0,k}`.
    pub upper_bound: T,
    /// `4.8 + n(k)`, a lower bound for `α_{n(k),1}` once `n(k) >= 14`.
    pub lower_bound: T,
    /// `α_{0,k} < α_{n(k),1}` from the computed zeros.
    pub direct_holds: bool,
    /// Both analytic bounds hold for the computed zeros.
    pub bounds_verified: bool,
    /// `π k − 1/2 < 4.8 + n(k)`.
    pub bound_route_holds: bool,
}

/// Checks the `p = 2` side of the crossing theorem for `3 <= k <= 16`.
pub fn check_theorem4_base<T: Real>(k: usize) -> Result<Theorem4Base<T>> {
    if !(3..=16).contains(&k) {
        return invalid(format!("k = {k} outside 3..=16"));
    }
    let n = nk_index(k)?;
    let alpha_0k: T = bessel_zero(0, k)?.alpha;
    let alpha_n1: T = bessel_zero(n, 1)?.alpha;
    let upper_bound = T::PI() * T::from_usize_lossy(k) - T::lit(0.5);
    let lower_bound = T::lit(4.8) + T::from_usize_lossy(n);
    Ok(Theorem4Base {
        k,
        n,
        alpha_0k,
        alpha_n1,
        upper_bound,
        lower_bound,
        direct_holds: alpha_0k < alpha_n1,
        bounds_verified: alpha_0k < upper_bound && (n < 14 || alpha_n1 > lower_bound),
        bound_route_holds: upper_bound < lower_bound,
    })
}

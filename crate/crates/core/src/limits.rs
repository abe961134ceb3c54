//! Closed-form limits of the radial eigenvalues `μ_k(p)` and the sector
//! eigenvalues `τ_n(p)` as `p → 1` and `p → ∞`, and sign certificates built
//! from them.
//!
//! Here `τ_n(p)` is the first eigenvalue of the sector of aperture `π/n`;
//! extended by odd reflection it is an eigenvalue of the disk whose
//! eigenfunction has `2n` nodal domains.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bessel::bessel_zero;
use crate::error::{invalid, Result};
use crate::geometry::{sector_cheeger, SectorSpec};
use crate::scalar::{sign_of, Real};

/// `(lim_{p→1} μ_k, lim_{p→∞} μ_k^{1/p}) = (2k, 2k − 1)`.
pub fn mu_limits(k: usize) -> Result<(usize, usize)> {
    if k == 0 {
        return invalid("k must be >= 1");
    }
    Ok((2 * k, 2 * k - 1))
}

/// `(lim_{p→1} τ_k, lim_{p→∞} τ_k^{1/p})` for the sector of aperture `π/k`:
/// its Cheeger constant and `(1 + sin(π/2k)) / sin(π/2k)`.
pub fn tau_limits<T: Real>(k: T) -> Result<(T, T)> {
    let spec = SectorSpec::new(k)?;
    Ok((sector_cheeger(spec).h, pinf_tau_root(k)))
}

fn pinf_tau_root<T: Real>(k: T) -> T {
    let s = (T::FRAC_PI_2() / k).sin();
    (T::one() + s) / s
}

/// Pairs `(k, n)` with `2k − 1 = (1 + sin(π/2n)) / sin(π/2n)` up to `1e-12`.
pub fn niven_coincidence(k_max: usize, n_max: usize) -> Result<BTreeSet<(usize, usize)>> {
    if k_max > 10_000 || n_max > 10_000 {
        return invalid("bounds must not exceed 10^4");
    }
    let mut out = BTreeSet::new();
    for n in 1..=n_max {
        let t: f64 = pinf_tau_root(n as f64);
        // Only the nearest odd integer can match.
        let k = ((t + 1.0) / 2.0).round() as usize;
        if (1..=k_max).contains(&k) && ((2 * k - 1) as f64 - t).abs() <= 1e-12 {
            out.insert((k, n));
        }
    }
    Ok(out)
}

/// `n(k) = ⌊π(k − 1)⌋ − 1`, the sector index paired with `μ_k`.
pub fn nk_index(k: usize) -> Result<usize> {
    if k < 3 {
        return invalid(format!("n(k) is defined for k >= 3, got {k}"));
    }
    Ok((std::f64::consts::PI * (k - 1) as f64).floor() as usize - 1)
}

/// `π/2n − (π/2n)³/6 > π/(2(n+1))`.
pub fn theorem4_sine_inequality(n: usize) -> Result<bool> {
    if n == 0 {
        return invalid("n must be >= 1");
    }
    let x = std::f64::consts::PI / (2 * n) as f64;
    Ok(x - x.powi(3) / 6.0 > std::f64::consts::PI / (2 * (n + 1)) as f64)
}

/// Eigenvalue family compared by a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", content = "index", rename_all = "snake_case")]
pub enum Family {
    /// k-th radial eigenvalue of the disk.
    MuK(usize),
    /// First eigenvalue of the sector of aperture `π/n`.
    TauN(usize),
}

/// How the `p = 2` sign was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Computed Bessel zeros.
    Direct,
    /// `α_{0,k} < πk − 1/2` against `α_{n,1} > n + 4.8` (valid for `n >= 14`).
    Bounds,
}

/// What the endpoint signs imply, given continuity in `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    CrossingBelow2,
    CrossingAbove2,
    CrossingBoth,
    /// The `p → ∞` limits of the p-th roots coincide.
    TangentAtInfinity,
    NoSignChange,
}

/// Signs of `a − b` at `p → 1`, `p = 2` and of the difference of p-th roots
/// as `p → ∞`, for `a = μ_k`, `b = τ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingCertificate {
    pub family_a: Family,
    pub family_b: Family,
    pub sign_at_p1: i8,
    pub sign_at_p2: i8,
    pub sign_at_inf: i8,
    pub route: Route,
    /// Open `p`-interval forced to contain a crossing; `None` upper end
    /// stands for `∞`.
    pub bracket: Option<(f64, Option<f64>)>,
    pub conclusion: Conclusion,
}

/// Endpoint certificate for `μ_k` against `τ_n`.
pub fn crossing_certificate(k: usize, n: usize) -> Result<CrossingCertificate> {
    if k < 2 || n < 1 {
        return invalid(format!(
            "certificate needs k >= 2 and n >= 1, got ({k}, {n})"
        ));
    }
    let (p1_mu, inf_mu) = mu_limits(k)?;
    let (p1_tau, inf_tau) = tau_limits(n as f64)?;
    let sign_at_p1 = sign_of(p1_mu as f64 - p1_tau);
    let diff_inf = inf_mu as f64 - inf_tau;
    let sign_at_inf = if diff_inf.abs() <= 1e-12 {
        0
    } else {
        sign_of(diff_inf)
    };

    // The bound pair decides the p = 2 sign whenever it applies; the zeros
    // themselves are used otherwise.
    let upper = std::f64::consts::PI * k as f64 - 0.5;
    let lower = 4.8 + n as f64;
    let (sign_at_p2, route) = if n >= 14 && upper < lower {
        (-1, Route::Bounds)
    } else if k <= 20 && n <= 50 {
        let a: f64 = bessel_zero(0, k)?.alpha;
        let b: f64 = bessel_zero(n, 1)?.alpha;
        (sign_of(a - b), Route::Direct)
    } else if n >= 14 {
        (0, Route::Bounds)
    } else {
        return invalid(format!(
            "(k={k}, n={n}) outside the direct and bound routes"
        ));
    };

    let below = sign_at_p1 != 0 && sign_at_p2 != 0 && sign_at_p1 != sign_at_p2;
    let above = sign_at_inf != 0 && sign_at_p2 != 0 && sign_at_inf != sign_at_p2;
    let (conclusion, bracket) = match (below, above) {
        (true, true) => (Conclusion::CrossingBoth, Some((1.0, None))),
        (true, false) => (Conclusion::CrossingBelow2, Some((1.0, Some(2.0)))),
        (false, true) => (Conclusion::CrossingAbove2, Some((2.0, None))),
        (false, false) if sign_at_inf == 0 => (Conclusion::TangentAtInfinity, None),
        (false, false) => (Conclusion::NoSignChange, None),
    };
    Ok(CrossingCertificate {
        family_a: Family::MuK(k),
        family_b: Family::TauN(n),
        sign_at_p1,
        sign_at_p2,
        sign_at_inf,
        route,
        bracket,
        conclusion,
    })
}

//! Intersections of eigenvalue curves in `p`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::bessel::{check_theorem4_base, Theorem4Base};
use crate::error::{invalid, Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::fem::{
    first_eigen_on, mesh_sector, FemOptions, FemSolution, Mesh, WarmStart, MAX_MESH_SIZE,
};
use crate::geometry::SectorSpec;
use crate::limits::{crossing_certificate, nk_index, CrossingCertificate};
use crate::radial::{radial_eigenvalue, Params};
use crate::scalar::{sign_of, Real};

/// Outcome of a bisection on the sign of `f − g`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport<T> {
    /// Midpoint of the final bracket.
    pub p_star: T,
    pub bracket: (T, T),
    /// Sign of `f − g` at the lower and upper end of the bracket.
    pub signs: (i8, i8),
    /// `f(p*) − g(p*)`.
    pub residual: T,
    /// Larger of the two evaluator tolerances at `p*`.
    pub tolerance: T,
    pub evaluations: usize,
    /// `(p, f − g)` for every evaluation, in order.
    pub history: Vec<(T, T)>,
}

impl<T: Real> CrossingReport<T> {
    /// Whether `|f(p*) − g(p*)|` is within the evaluators' tolerance.
    pub fn residual_within_tolerance(&self) -> bool {
        self.residual.abs() <= self.tolerance
    }
}

/// Bisection on the sign of `f − g` over `[lo, hi]` down to width `tol`.
///
/// No monotonicity is assumed. An evaluator failure after the first two
/// evaluations is returned as [`Error::PartialBracket`] carrying the
/// bracket reached so far.
pub fn find_crossing<T: Real>(
    f: &mut impl FnMut(T) -> Result<EigenEstimate<T>>,
    g: &mut impl FnMut(T) -> Result<EigenEstimate<T>>,
    lo: T,
    hi: T,
    tol: T,
) -> Result<CrossingReport<T>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    if !(tol > T::zero()) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let mut history = Vec::new();
    let mut diff = |p: T, history: &mut Vec<(T, T)>| -> Result<(T, T)> {
        let (a, b) = (f(p)?, g(p)?);
        let d = a.value - b.value;
        if !d.is_finite() {
            return Err(Error::Internal(format!("non-finite difference at p = {p}")));
        }
        history.push((p, d));
        Ok((d, a.tol.max(b.tol)))
    };
    let (d_lo, _) = diff(lo, &mut history)?;
    let (d_hi, _) = diff(hi, &mut history)?;
    let (s_lo, s_hi) = (sign_of(d_lo), sign_of(d_hi));
    if s_lo * s_hi > 0 || (s_lo == 0 && s_hi == 0) {
        return invalid(format!(
            "f − g has no sign change on [{lo}, {hi}] ({d_lo:e}, {d_hi:e})"
        ));
    }
    let partial = |a: T, b: T, e: Error| Error::PartialBracket {
        lo: a.to_f64_lossy(),
        hi: b.to_f64_lossy(),
        source: Box::new(e),
    };
    let two = T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let (mut da, mut db) = (d_lo, d_hi);
    if s_lo == 0 {
        b = lo;
    } else if s_hi == 0 {
        a = hi;
    }
    while b - a > tol {
        let mid = (a + b) / two;
        let (d, _) = diff(mid, &mut history).map_err(|e| partial(a, b, e))?;
        if sign_of(d) == 0 {
            a = mid;
            b = mid;
            break;
        }
        if sign_of(d) == sign_of(da) {
            a = mid;
            da = d;
        } else {
            b = mid;
            db = d;
        }
        assert!(
            sign_of(da) * sign_of(db) < 0,
            "bracket [{a}, {b}] lost its sign change"
        );
    }
    let p_star = (a + b) / two;
    let (residual, tolerance) = diff(p_star, &mut history).map_err(|e| partial(a, b, e))?;
    Ok(CrossingReport {
        p_star,
        bracket: (a, b),
        signs: (s_lo, s_hi),
        residual,
        tolerance,
        evaluations: history.len(),
        history,
    })
}

/// First sector eigenvalues keyed by `(p, k, h)`, each new solve warm
/// started from the cached solution with the nearest `p` on the same mesh.
pub struct TauCache<T> {
    opts: FemOptions<T>,
    inner: Mutex<HashMap<(u64, u64), Slot<T>>>,
}

struct Slot<T> {
    mesh: Arc<Mesh<T>>,
    solved: Vec<(T, Arc<FemSolution<T>>)>,
}

impl<T: Real> Default for TauCache<T> {
    fn default() -> Self {
        Self::new(FemOptions::default())
    }
}

impl<T: Real> TauCache<T> {
    pub fn new(opts: FemOptions<T>) -> Self {
        Self {
            opts,
            inner: Mutex::new(HashMap::new()),
        }
    }

    fn key(k: T, h: T) -> (u64, u64) {
        (k.to_f64_lossy().to_bits(), h.to_f64_lossy().to_bits())
    }

    /// `τ_k(p)` on the mesh of size `h`.
    pub fn solve(&self, p: T, k: T, h: T) -> Result<Arc<FemSolution<T>>> {
        let key = Self::key(k, h);
        let (mesh, warm) = {
            let mut map = self
                .inner
                .lock()
                .map_err(|_| Error::Internal("cache lock poisoned".into()))?;
            if let std::collections::hash_map::Entry::Vacant(e) = map.entry(key) {
                let mesh = mesh_sector(SectorSpec::new(k)?, h)?;
                e.insert(Slot {
                        mesh,
                        solved: Vec::new(),
                    });
            }
            let slot = &map[&key];
            if let Some((_, s)) = slot.solved.iter().find(|(q, _)| *q == p) {
                return Ok(s.clone());
            }
            let near = slot
                .solved
                .iter()
                .min_by(|x, y| {
                    (x.0 - p)
                        .abs()
                        .partial_cmp(&(y.0 - p).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(q, s)| WarmStart {
                    p: *q,
                    field: s.field.clone(),
                });
            (slot.mesh.clone(), near)
        };
        // A cold start from p = 2 is preferred when it is closer.
        let warm = warm.filter(|w| (w.p - p).abs() < (p - T::lit(2.0)).abs());
        let sol = Arc::new(first_eigen_on(p, mesh, &self.opts, warm.as_ref())?);
        let mut map = self
            .inner
            .lock()
            .map_err(|_| Error::Internal("cache lock poisoned".into()))?;
        if let Some(slot) = map.get_mut(&key) {
            slot.solved.push((p, sol.clone()));
        }
        Ok(sol)
    }

    /// `τ_k(p)` at mesh size `h` whose tolerance is the change from the
    /// mesh of size `2h` (capped at the coarsest allowed mesh).
    pub fn tau(&self, p: T, k: T, h: T) -> Result<EigenEstimate<T>> {
        let fine = self.solve(p, k, h)?;
        let v = fine.estimate.value;
        let h2 = (h * T::lit(2.0)).min(T::lit(MAX_MESH_SIZE));
        let mut tol = fine.estimate.tol;
        if h2 > h {
            tol = tol.max((v - self.solve(p, k, h2)?.estimate.value).abs());
        }
        Ok(EigenEstimate::new(
            v,
            Method::Fem,
            tol,
            fine.estimate.iterations,
        ))
    }

    /// Number of cached solutions.
    pub fn len(&self) -> usize {
        self.inner
            .lock()
            .map(|m| m.values().map(|s| s.solved.len()).sum())
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn mu<T: Real>(p: T, k: usize) -> Result<EigenEstimate<T>> {
    radial_eigenvalue(&Params::new(p, 2)?, k)
}

/// Settings of [`corollary_mult3`].
#[derive(Debug, Clone)]
pub struct Mult3Options<T> {
    pub lo: T,
    pub hi: T,
    /// Bracket width in `p`.
    pub tol: T,
    /// Coarse and fine mesh sizes.
    pub h: (T, T),
    /// Extra point below `lo` where the ordering is reported.
    pub probe: T,
}

impl<T: Real> Default for Mult3Options<T> {
    fn default() -> Self {
        Self {
            lo: T::lit(1.2),
            hi: T::lit(2.0),
            tol: T::lit(1e-3),
            h: (T::lit(0.04), T::lit(0.02)),
            probe: T::lit(1.1),
        }
    }
}

/// Where `μ_2` meets `τ_2`: the disk eigenvalue of multiplicity three.
#[derive(Debug, Clone, Serialize)]
pub struct Mult3Report<T> {
    pub coarse: CrossingReport<T>,
    pub fine: CrossingReport<T>,
    pub h: (T, T),
    /// `|p*(fine) − p*(coarse)|`.
    pub mesh_delta: T,
    /// `(p, μ_2, τ_2)` at the probe point on the fine mesh.
    pub probe: (T, T, T),
}

/// Locates `p_2` with `μ_2(p_2) = τ_2(p_2)` on two meshes.
pub fn corollary_mult3<T: Real>(
    cache: &TauCache<T>,
    opts: &Mult3Options<T>,
) -> Result<Mult3Report<T>> {
    let two = T::lit(2.0);
    let run = |h: T| {
        find_crossing(
            &mut |p| mu(p, 2),
            &mut |p| cache.tau(p, two, h),
            opts.lo,
            opts.hi,
            opts.tol,
        )
    };
    let coarse = run(opts.h.0)?;
    let fine = run(opts.h.1)?;
    let q = opts.probe;
    let probe = (
        q,
        mu(q, 2)?.value,
        cache.solve(q, two, opts.h.1)?.estimate.value,
    );
    Ok(Mult3Report {
        mesh_delta: (fine.p_star - coarse.p_star).abs(),
        coarse,
        fine,
        h: opts.h,
        probe,
    })
}

/// Evidence for a crossing of `μ_k` and `τ_{n(k)}`.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Report<T> {
    pub k: usize,
    pub n: usize,
    pub certificate: CrossingCertificate,
    pub base: Theorem4Base<T>,
    pub h: T,
    /// `(p, μ_k, τ_n)` along the scan.
    pub scan: Vec<(T, T, T)>,
    /// Located crossing, if the scan saw a sign change.
    pub crossing: Option<CrossingReport<T>>,
}

/// Largest `k` handled by [`theorem4_crossing`].
pub const THEOREM4_MAX_K: usize = 4;

/// Certificate for `k` plus, when the 2D solver sees a sign change of
/// `μ_k − τ_{n(k)}` on `(2, 30]`, a located crossing.
pub fn theorem4_crossing<T: Real>(
    cache: &TauCache<T>,
    k: usize,
    h: T,
    tol: T,
) -> Result<Theorem4Report<T>> {
    if !(3..=THEOREM4_MAX_K).contains(&k) {
        return invalid(format!("k must lie in 3..={THEOREM4_MAX_K}, got {k}"));
    }
    let n = nk_index(k)?;
    let certificate = crossing_certificate(k, n)?;
    let base = check_theorem4_base(k)?;
    let nt = T::from_usize_lossy(n);
    let grid = [
        2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0,
    ];
    let mut scan: Vec<(T, T, T)> = Vec::new();
    let mut crossing = None;
    for &q in &grid {
        let p = T::lit(q);
        let m = mu(p, k)?.value;
        let t = cache.solve(p, nt, h)?.estimate.value;
        scan.push((p, m, t));
        let len = scan.len();
        if len >= 2 && sign_of(scan[len - 2].1 - scan[len - 2].2) * sign_of(m - t) < 0 {
            let lo = scan[len - 2].0;
            crossing = Some(find_crossing(
                &mut |p| mu(p, k),
                &mut |p| cache.tau(p, nt, h),
                lo,
                p,
                tol,
            )?);
            break;
        }
    }
    Ok(Theorem4Report {
        k,
        n,
        certificate,
        base,
        h,
        scan,
        crossing,
    })
}

//! Planar sectors `{ (ρ cos θ, ρ sin θ) : 0 < ρ < 1, |θ| < π/(2k) }`:
//! inradius, inner parallel sets, Cheeger constants and two-disk packings.
//!
//! Sectors are placed with their bisector on the positive x-axis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::optim::nelder_mead;
use crate::scalar::Real;

/// Sector of the unit disk with aperture `π/k`, `k >= 1` real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorSpec<T> {
    pub k: T,
}

impl<T: Real> SectorSpec<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k >= T::one()) || !k.is_finite() {
            return invalid(format!("sector parameter k must be >= 1, got {k}"));
        }
        Ok(Self { k })
    }

    pub fn aperture(&self) -> T {
        T::PI() / self.k
    }

    fn half_angle(&self) -> T {
        T::FRAC_PI_2() / self.k
    }

    pub fn area(&self) -> T {
        self.aperture() / T::lit(2.0)
    }

    pub fn perimeter(&self) -> T {
        T::lit(2.0) + self.aperture()
    }

    /// Largest `r` with a disk of radius `r` centred at `c` inside the sector
    /// (negative outside).
    pub fn clearance(&self, c: [T; 2]) -> T {
        let (s, co) = self.half_angle().sin_cos();
        let upper = c[0] * s - c[1] * co;
        let lower = c[0] * s + c[1] * co;
        let arc = T::one() - c[0].hypot(c[1]);
        upper.min(lower).min(arc)
    }
}

/// Radius of the largest disk inscribed in the sector.
pub fn sector_inradius<T: Real>(spec: SectorSpec<T>) -> T {
    let s = spec.half_angle().sin();
    s / (T::one() + s)
}

/// Area of the inner parallel set `{x : dist(x, ∂S) > r}`.
pub fn inner_parallel_area<T: Real>(spec: SectorSpec<T>, r: T) -> Result<T> {
    let rin = sector_inradius(spec);
    if !(r >= T::zero()) || r >= rin {
        return invalid(format!("r = {r} outside [0, {rin})"));
    }
    Ok(parallel_area_unchecked(spec, r))
}

fn parallel_area_unchecked<T: Real>(spec: SectorSpec<T>, r: T) -> T {
    let two = T::lit(2.0);
    let one = T::one();
    let half = spec.half_angle();
    // The set is bounded by two segments from the shifted apex A and an arc of
    // radius 1 - r about the origin, meeting the segments at B and C.
    let ab = (one - two * r).sqrt() - r / half.tan();
    let theta = spec.aperture() - two * (r / (one - r)).asin();
    let triangle = ab * ab * spec.aperture().sin() / two;
    let segment = (one - r) * (one - r) / two * (theta - theta.sin());
    triangle + segment
}

/// Cheeger radius `r_k` with `|S_{r_k}| = π r_k²` and constant `h = 1/r_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheegerResult<T> {
    pub radius: T,
    pub h: T,
}

/// Cheeger constant of the sector by bisection on `|S_r| - π r²`.
pub fn sector_cheeger<T: Real>(spec: SectorSpec<T>) -> CheegerResult<T> {
    let g = |r: T| parallel_area_unchecked(spec, r) - T::PI() * r * r;
    let mut lo = T::zero();
    let mut hi = sector_inradius(spec);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    let radius = (lo + hi) / T::lit(2.0);
    CheegerResult {
        radius,
        h: radius.recip(),
    }
}

/// Cheeger constant `2/(b - a)` of the planar annulus `a < |x| < b`.
pub fn annulus_cheeger<T: Real>(a: T, b: T) -> Result<T> {
    if !(a >= T::zero()) || !(b > a) {
        return invalid(format!("annulus needs 0 <= a < b, got ({a}, {b})"));
    }
    Ok(T::lit(2.0) / (b - a))
}

/// Cheeger constant `2/R` of the disk of radius `R`.
pub fn disk_cheeger<T: Real>(radius: T) -> Result<T> {
    if !(radius > T::zero()) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    Ok(T::lit(2.0) / radius)
}

/// Restriction placed on a two-disk packing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PackingConstraint<T> {
    Free,
    /// One disk in `|x| < ρ`, the other in `ρ < |x| < 1`.
    ConcentricSplit {
        rho: T,
    },
    /// One disk in each half of the sector cut along its bisector.
    BisectorSplit,
}

/// Two equal disjoint disks inside a sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingResult<T> {
    pub radius: T,
    pub centers: Vec<[T; 2]>,
    pub constraint: PackingConstraint<T>,
}

impl<T: Real> PackingResult<T> {
    /// Smallest constraint slack: containment of each disk and disjointness.
    pub fn min_slack(&self, spec: SectorSpec<T>) -> T {
        let mut s = T::infinity();
        for c in &self.centers {
            s = s.min(spec.clearance(*c) - self.radius);
        }
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                let (a, b) = (self.centers[i], self.centers[j]);
                s = s.min((a[0] - b[0]).hypot(a[1] - b[1]) - T::lit(2.0) * self.radius);
            }
        }
        s
    }
}

/// Largest common radius of two disjoint disks in the sector, seeded with 0.
pub fn pack_two_disks_sector<T: Real>(spec: SectorSpec<T>) -> Result<PackingResult<T>> {
    pack_two_disks_sector_seeded(spec, 0)
}

/// [`pack_two_disks_sector`] with an explicit seed for the random starts.
pub fn pack_two_disks_sector_seeded<T: Real>(
    spec: SectorSpec<T>,
    seed: u64,
) -> Result<PackingResult<T>> {
    let two = T::lit(2.0);
    let common = |x: &[T]| -> T {
        let c1 = [x[0], x[1]];
        let c2 = [x[2], x[3]];
        spec.clearance(c1)
            .min(spec.clearance(c2))
            .min((x[0] - x[2]).hypot(x[1] - x[3]) / two)
    };
    let mut neg = |x: &[T]| -common(x);

    // Coarse polar grid of candidate centres; keep the best pairs as starts.
    let half = spec.half_angle();
    let mut points = Vec::new();
    for i in 1..=8 {
        for j in 0..=6 {
            let rho = T::from_usize_lossy(i) / T::lit(9.0);
            let th = half * (T::from_usize_lossy(j) / T::lit(3.0) - T::one());
            points.push([rho * th.cos(), rho * th.sin()]);
        }
    }
    let mut pairs: Vec<(T, Vec<T>)> = Vec::new();
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let x = vec![points[a][0], points[a][1], points[b][0], points[b][1]];
            pairs.push((common(&x), x));
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut starts: Vec<Vec<T>> = pairs.into_iter().take(12).map(|p| p.1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let mut x = Vec::with_capacity(4);
        for _ in 0..2 {
            let rho = T::lit(rng.gen_range(0.1..0.9));
            let th = half * T::lit(rng.gen_range(-1.0..1.0));
            x.push(rho * th.cos());
            x.push(rho * th.sin());
        }
        starts.push(x);
    }

    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(16.0));
    let mut best: Option<(T, Vec<T>)> = None;
    for x0 in starts {
        let mut x = x0;
        let mut val = neg(&x);
        let mut scale = T::lit(0.05);
        // Restart from the current point until a restart stops helping; plain
        // Nelder–Mead tends to stall on the kinks of the max-min objective.
        for _ in 0..30 {
            let m = nelder_mead(&mut neg, &x, scale, tol, tol * tol, 4000);
            let gain = val - m.value;
            x = m.x;
            val = m.value;
            if gain <= tol {
                break;
            }
            scale = (scale / two).max(T::lit(1e-4));
        }
        if best.as_ref().is_none_or(|b| val < b.0) {
            best = Some((val, x));
        }
    }
    let (val, x) = best.ok_or_else(|| Error::Internal("no packing starts".into()))?;
    if !(val < T::zero()) {
        return Err(Error::NonConvergence {
            iterations: 0,
            best: (-val).to_f64_lossy(),
            context: "two-disk packing found no feasible configuration".into(),
        });
    }
    Ok(PackingResult {
        radius: -val,
        centers: vec![[x[0], x[1]], [x[2], x[3]]],
        constraint: PackingConstraint::Free,
    })
}

/// Which constrained packing to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    Concentric,
    Bisector,
}

/// Two-disk packing with one disk in each piece of a fixed split.
pub fn pack_constrained<T: Real>(spec: SectorSpec<T>, split: SplitKind) -> PackingResult<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let s = spec.half_angle().sin();
    match split {
        SplitKind::Concentric => {
            // Inner piece is the sector scaled by ρ; the outer annular piece
            // holds a disk of radius min(s/(1+s), (1-ρ)/2) on the bisector.
            let inner = |rho: T| rho * s / (one + s);
            let outer = |rho: T| (s / (one + s)).min((one - rho) / two);
            let (mut lo, mut hi) = (T::zero(), one);
            for _ in 0..200 {
                let mid = (lo + hi) / two;
                if inner(mid) < outer(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::epsilon() {
                    break;
                }
            }
            let rho = (lo + hi) / two;
            let r = inner(rho).min(outer(rho));
            let d_inner = rho / (one + s);
            let d_outer = (rho + one) / two;
            PackingResult {
                radius: r,
                centers: vec![[d_inner, T::zero()], [d_outer.min(one - r), T::zero()]],
                constraint: PackingConstraint::ConcentricSplit { rho },
            }
        }
        SplitKind::Bisector => {
            let half = SectorSpec { k: spec.k * two };
            let r = sector_inradius(half);
            let d = one / (one + half.half_angle().sin());
            let (sn, cs) = half.half_angle().sin_cos();
            PackingResult {
                radius: r,
                centers: vec![[d * cs, d * sn], [d * cs, -d * sn]],
                constraint: PackingConstraint::BisectorSplit,
            }
        }
    }
}

//! Graded ring triangulations of sectors.
//!
//! Vertices sit on arcs `|x| = ρ_j` (plus the origin), each arc split into
//! equal angular pieces; neighbouring arcs are stitched with a zipper. The
//! local edge length grows linearly from `h/4` at the origin to `h` on the
//! unit arc.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::SectorSpec;
use crate::scalar::Real;

/// A conforming triangulation with per-vertex Dirichlet flags.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh<T> {
    pub vertices: Vec<[T; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_mask: Vec<bool>,
    pub spec: SectorSpec<T>,
    /// Target edge length on the outer arc.
    pub h: T,
    /// Number of reflected copies of the sector covered (1 for the sector,
    /// `2k` for an assembled disk).
    pub copies: usize,
}

/// Coarsest accepted target edge length.
pub const MAX_MESH_SIZE: f64 = 0.2;

const GRADING_FLOOR: f64 = 0.25;

fn local_size<T: Real>(h: T, rho: T) -> T {
    let g = T::lit(GRADING_FLOOR);
    h * (g + (T::one() - g) * rho)
}

/// Triangulates the sector with target edge length `h <= 0.2`.
pub fn mesh_sector<T: Real>(spec: SectorSpec<T>, h: T) -> Result<Arc<Mesh<T>>> {
    if !(h > T::zero()) || h > T::lit(MAX_MESH_SIZE) {
        return invalid(format!(
            "mesh size must lie in (0, {MAX_MESH_SIZE}], got {h}"
        ));
    }
    let half = T::FRAC_PI_2() / spec.k;
    let aperture = half + half;

    // Radii of the rings: ρ_{j+1} = ρ_j + size(ρ_j), rescaled to end at 1.
    let mut radii = vec![T::zero()];
    let mut rho = T::zero();
    while rho < T::one() {
        // Narrow sectors: keep the radial step below the arc width so that
        // thin single-segment rings do not produce slivers.
        let step = local_size(h, rho);
        rho += if rho > T::zero() {
            step.min(rho * aperture)
        } else {
            step
        };
        radii.push(rho);
    }
    let n_steps = radii.len() - 1;
    let last = radii[n_steps];
    let prev = radii[n_steps - 1];
    // Snap to 1: drop the last ring if it overshoots by more than half a step.
    if n_steps > 1 && (last - T::one()) > (last - prev) / T::lit(2.0) {
        radii.pop();
    }
    let scale = T::one() / *radii.last().expect("rings");
    for r in radii.iter_mut() {
        *r *= scale;
    }
    let n_rings = radii.len() - 1;
    if n_rings < 2 {
        return Err(Error::Internal("mesh has fewer than two rings".into()));
    }

    let mut vertices = vec![[T::zero(), T::zero()]];
    let mut boundary_mask = vec![true];
    let mut rings: Vec<Vec<usize>> = vec![vec![0]];
    let mut segments_prev = 0usize;
    for (j, &r) in radii.iter().enumerate().skip(1) {
        let target = local_size(h, r);
        let mut segs = ((r * aperture / target).ceil().to_usize().unwrap_or(1)).max(1);
        segs = segs.max(segments_prev);
        segments_prev = segs;
        let mut ring = Vec::with_capacity(segs + 1);
        for i in 0..=segs {
            let theta = -half + aperture * T::from_usize_lossy(i) / T::from_usize_lossy(segs);
            vertices.push([r * theta.cos(), r * theta.sin()]);
            boundary_mask.push(j == n_rings || i == 0 || i == segs);
            ring.push(vertices.len() - 1);
        }
        rings.push(ring);
    }

    let mut triangles = Vec::new();
    for i in 0..rings[1].len() - 1 {
        triangles.push([0, rings[1][i], rings[1][i + 1]]);
    }
    for j in 1..n_rings {
        zipper(&vertices, &rings[j], &rings[j + 1], &mut triangles);
    }
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_mask,
        spec,
        h,
        copies: 1,
    };
    if mesh
        .triangles
        .iter()
        .any(|t| mesh.signed_area(t) <= T::zero())
    {
        return Err(Error::Internal(
            "mesher produced an inverted triangle".into(),
        ));
    }
    Ok(Arc::new(mesh))
}

/// Stitches two consecutive rings, inner `a` and outer `b`, advancing along
/// whichever ring gives the shorter new diagonal.
fn zipper<T: Real>(v: &[[T; 2]], a: &[usize], b: &[usize], out: &mut Vec<[usize; 3]>) {
    let d2 = |p: usize, q: usize| {
        let (x, y) = (v[p][0] - v[q][0], v[p][1] - v[q][1]);
        x * x + y * y
    };
    let (mut i, mut j) = (0, 0);
    let (na, nb) = (a.len() - 1, b.len() - 1);
    while i < na || j < nb {
        let advance_a = if i == na {
            false
        } else if j == nb {
            true
        } else {
            d2(a[i + 1], b[j]) < d2(a[i], b[j + 1])
        };
        if advance_a {
            out.push([a[i], b[j], a[i + 1]]);
            i += 1;
        } else {
            out.push([a[i], b[j], b[j + 1]]);
            j += 1;
        }
    }
}

impl<T: Real> Mesh<T> {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn signed_area(&self, t: &[usize; 3]) -> T {
        let [a, b, c] = t.map(|i| self.vertices[i]);
        ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) / T::lit(2.0)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> T {
        let mut best = T::lit(180.0);
        for t in &self.triangles {
            let p = t.map(|i| self.vertices[i]);
            for k in 0..3 {
                let (o, u, w) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let (ux, uy) = (u[0] - o[0], u[1] - o[1]);
                let (wx, wy) = (w[0] - o[0], w[1] - o[1]);
                let cos = (ux * wx + uy * wy) / (ux.hypot(uy) * wx.hypot(wy));
                best = best.min(cos.max(-T::one()).min(T::one()).acos().to_degrees());
            }
        }
        best
    }

    /// Longest edge of the triangulation.
    pub fn max_edge(&self) -> T {
        let mut m = T::zero();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (self.vertices[t[k]], self.vertices[t[(k + 1) % 3]]);
                m = m.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        m
    }

    /// Free (non-Dirichlet) vertex indices.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.n_vertices())
            .filter(|&i| !self.boundary_mask[i])
            .collect()
    }

    /// Triangle containing `x` (within `tol` in barycentric coordinates) and
    /// the barycentric weights, by brute force over a bucket grid.
    pub(crate) fn locator(&self) -> Locator<T> {
        Locator::new(self)
    }
}

/// Uniform bucket grid over the bounding box for point location.
pub(crate) struct Locator<T> {
    origin: [T; 2],
    cell: T,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl<T: Real> Locator<T> {
    fn new(mesh: &Mesh<T>) -> Self {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for v in &mesh.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let n = (mesh.triangles.len() as f64).sqrt().ceil().max(1.0);
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let cell = span / T::lit(n) + T::epsilon();
        let nx = ((hi[0] - lo[0]) / cell).to_usize().unwrap_or(0) + 1;
        let ny = ((hi[1] - lo[1]) / cell).to_usize().unwrap_or(0) + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let p = t.map(|i| mesh.vertices[i]);
            let bx = |x: T| ((x - lo[0]) / cell).to_usize().unwrap_or(0).min(nx - 1);
            let by = |y: T| ((y - lo[1]) / cell).to_usize().unwrap_or(0).min(ny - 1);
            let (x0, x1) = (
                bx(p.iter().map(|q| q[0]).fold(T::infinity(), T::min)),
                bx(p.iter().map(|q| q[0]).fold(T::neg_infinity(), T::max)),
            );
            let (y0, y1) = (
                by(p.iter().map(|q| q[1]).fold(T::infinity(), T::min)),
                by(p.iter().map(|q| q[1]).fold(T::neg_infinity(), T::max)),
            );
            for ix in x0..=x1 {
                for iy in y0..=y1 {
                    buckets[iy * nx + ix].push(ti);
                }
            }
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// Barycentric interpolation of `values` at `x`; points outside the mesh
    /// take the value of the nearest candidate triangle clamped to it.
    pub fn interpolate(&self, mesh: &Mesh<T>, values: &[T], x: [T; 2]) -> T {
        let ix = ((x[0] - self.origin[0]) / self.cell)
            .max(T::zero())
            .to_usize()
            .unwrap_or(0)
            .min(self.nx - 1);
        let iy = ((x[1] - self.origin[1]) / self.cell)
            .max(T::zero())
            .to_usize()
            .unwrap_or(0)
            .min(self.ny - 1);
        let mut best = (T::neg_infinity(), T::zero());
        for &ti in &self.buckets[iy * self.nx + ix] {
            let t = mesh.triangles[ti];
            let [a, b, c] = t.map(|i| mesh.vertices[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
            let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
            let l0 = T::one() - l1 - l2;
            let inside = l0.min(l1).min(l2);
            if inside > best.0 {
                let (c0, c1, c2) = (l0.max(T::zero()), l1.max(T::zero()), l2.max(T::zero()));
                let s = c0 + c1 + c2;
                let v = (c0 * values[t[0]] + c1 * values[t[1]] + c2 * values[t[2]]) / s;
                best = (inside, v);
                if inside >= T::zero() {
                    break;
                }
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(k: f64) -> SectorSpec<f64> {
        SectorSpec::new(k).unwrap()
    }

    #[test]
    fn size_and_quality() {
        let m = mesh_sector(sec(4.0), 0.05).unwrap();
        assert!((300..=3000).contains(&m.n_vertices()), "{}", m.n_vertices());
        for k in [1.0, 2.0, 3.0, 4.0, 8.0] {
            for h in [0.2, 0.1, 0.05, 0.02] {
                let m = mesh_sector(sec(k), h).unwrap();
                assert!(
                    m.min_angle_deg() >= 20.0,
                    "k={k} h={h}: {}",
                    m.min_angle_deg()
                );
                assert!(m.max_edge() <= 1.5 * h, "k={k} h={h}: {}", m.max_edge());
            }
        }
    }

    #[test]
    fn containment_and_area() {
        for k in [1.0, 2.5, 4.0] {
            let s = sec(k);
            let m = mesh_sector(s, 0.05).unwrap();
            for v in &m.vertices {
                assert!(s.clearance(*v) >= -1e-12);
            }
            let area: f64 = m.triangles.iter().map(|t| m.signed_area(t)).sum();
            // Polygon inscribed in the arc: deficit below the sagitta bound.
            assert!(area <= s.area() + 1e-12);
            assert!(s.area() - area < 0.05 * 0.05 / 2.0 * s.aperture());
        }
    }

    #[test]
    fn arc_sagitta() {
        let h = 0.05;
        let m = mesh_sector(sec(2.0), h).unwrap();
        let arc: Vec<[f64; 2]> = m
            .vertices
            .iter()
            .copied()
            .filter(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-12)
            .collect();
        let mut ang: Vec<f64> = arc.iter().map(|v| v[1].atan2(v[0])).collect();
        ang.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in ang.windows(2) {
            let sagitta = 1.0 - ((w[1] - w[0]) / 2.0).cos();
            assert!(sagitta <= h * h / 2.0);
        }
    }

    #[test]
    fn conforming() {
        use std::collections::HashMap;
        let m = mesh_sector(sec(3.0), 0.05).unwrap();
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for ((a, b), n) in edges {
            assert!(n <= 2);
            if n == 1 {
                assert!(m.boundary_mask[a] && m.boundary_mask[b]);
            }
        }
    }

    #[test]
    fn grading_toward_origin() {
        let m = mesh_sector(sec(1.0), 0.1).unwrap();
        let near: f64 = m
            .vertices
            .iter()
            .filter(|v| v[0].hypot(v[1]) > 0.0)
            .map(|v| v[0].hypot(v[1]))
            .fold(f64::INFINITY, f64::min);
        assert!(near < 0.05);
    }

    #[test]
    fn locator_reproduces_linear_fields() {
        let m = mesh_sector(sec(2.0), 0.05).unwrap();
        let vals: Vec<f64> = m.vertices.iter().map(|v| 2.0 * v[0] - v[1] + 0.5).collect();
        let loc = m.locator();
        for i in 0..50 {
            let r = 0.02 * i as f64;
            let th = -0.7 + 0.028 * i as f64;
            let x = [r * th.cos(), r * th.sin()];
            let v = loc.interpolate(&m, &vals, x);
            assert!((v - (2.0 * x[0] - x[1] + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_size() {
        assert!(mesh_sector(sec(1.0), 0.0).is_err());
        assert!(mesh_sector(sec(1.0), 0.3).is_err());
    }
}

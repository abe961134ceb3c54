//! Element-wise p-Dirichlet energy and `L^p` mass of P1 fields, split into
//! the contributions of the positive and negative parts.

use std::sync::Arc;

use crate::scalar::{signed_pow, Real};

use super::mesh::Mesh;

/// Symmetric 6-point rule, exact for degree 4 on triangles: barycentric
/// points `(a, b, b)` with weights summing to one.
const QUAD: [(f64, f64, f64); 2] = [
    (0.108103018168070, 0.445948490915965, 0.223381589678011),
    (0.816847572980459, 0.091576213509771, 0.109951743655322),
];

fn quad_points<T: Real>() -> [([T; 3], T); 6] {
    let mut out = [([T::zero(); 3], T::zero()); 6];
    let mut n = 0;
    for (a, b, w) in QUAD {
        let (a, b, w) = (T::lit(a), T::lit(b), T::lit(w));
        for perm in [[a, b, b], [b, a, b], [b, b, a]] {
            out[n] = (perm, w);
            n += 1;
        }
    }
    out
}

/// Totals `[E⁺, M⁺, E⁻, M⁻]`: regularised energy `∫ (|∇u|² + ε²)^{p/2}` and
/// mass `∫ |u|^p` over `{u > 0}` and `{u < 0}`.
pub(crate) type Parts<T> = [T; 4];

/// Precomputed element data for one mesh.
#[derive(Debug, Clone)]
pub(crate) struct Assembly<T> {
    pub mesh: Arc<Mesh<T>>,
    pub area: Vec<T>,
    /// Gradients of the three hat functions on each triangle.
    pub grads: Vec<[[T; 2]; 3]>,
    /// Free vertices (Dirichlet ones are pinned to zero).
    pub free: Vec<usize>,
    quad: [([T; 3], T); 6],
}

struct Local<T> {
    area: T,
    grads: [[T; 2]; 3],
}

impl<T: Real> Assembly<T> {
    pub fn new(mesh: Arc<Mesh<T>>) -> Self {
        let mut area = Vec::with_capacity(mesh.triangles.len());
        let mut grads = Vec::with_capacity(mesh.triangles.len());
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|i| mesh.vertices[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            area.push(det.abs() / T::lit(2.0));
            // ∇φ_i = rot90(opposite edge) / det
            let g = |p: [T; 2], q: [T; 2]| [(p[1] - q[1]) / det, (q[0] - p[0]) / det];
            grads.push([g(b, c), g(c, a), g(a, b)]);
        }
        let free = mesh.interior();
        Self {
            mesh,
            area,
            grads,
            free,
            quad: quad_points(),
        }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Full vertex vector from free values.
    pub fn expand(&self, x: &[T]) -> Vec<T> {
        let mut u = vec![T::zero(); self.mesh.n_vertices()];
        for (i, &v) in self.free.iter().enumerate() {
            u[v] = x[i];
        }
        u
    }

    pub fn restrict(&self, u: &[T]) -> Vec<T> {
        self.free.iter().map(|&v| u[v]).collect()
    }

    /// Totals of the four parts; if `grad` is given, their gradients with
    /// respect to all vertex values are accumulated into it.
    pub fn parts(&self, u: &[T], p: T, eps: T, mut grad: Option<&mut [Vec<T>; 4]>) -> Parts<T> {
        let mut tot = [T::zero(); 4];
        if let Some(g) = grad.as_deref_mut() {
            for v in g.iter_mut() {
                v.clear();
                v.resize(u.len(), T::zero());
            }
        }
        for (ti, t) in self.mesh.triangles.iter().enumerate() {
            let loc = Local {
                area: self.area[ti],
                grads: self.grads[ti],
            };
            let vals = t.map(|i| u[i]);
            let pos = vals.iter().all(|v| *v >= T::zero());
            let neg = vals.iter().all(|v| *v <= T::zero());
            if pos || neg {
                let (e, m, de, dm) = self.pure(&loc, vals, p, eps, grad.is_some());
                let off = if pos { 0 } else { 2 };
                tot[off] += e;
                tot[off + 1] += m;
                if let Some(g) = grad.as_deref_mut() {
                    for k in 0..3 {
                        g[off][t[k]] += de[k];
                        g[off + 1][t[k]] += dm[k];
                    }
                }
            } else {
                let c = self.mixed(&loc, vals, p, eps);
                for j in 0..4 {
                    tot[j] += c[j];
                }
                if let Some(g) = grad.as_deref_mut() {
                    let scale = vals.iter().fold(T::zero(), |a, v| a.max(v.abs()));
                    let d = scale * T::lit(1e-6);
                    for k in 0..3 {
                        let mut up = vals;
                        let mut dn = vals;
                        up[k] += d;
                        dn[k] -= d;
                        let (cu, cd) = (self.any(&loc, up, p, eps), self.any(&loc, dn, p, eps));
                        for j in 0..4 {
                            g[j][t[k]] += (cu[j] - cd[j]) / (d + d);
                        }
                    }
                }
            }
        }
        tot
    }

    fn any(&self, loc: &Local<T>, vals: [T; 3], p: T, eps: T) -> Parts<T> {
        let pos = vals.iter().all(|v| *v >= T::zero());
        let neg = vals.iter().all(|v| *v <= T::zero());
        if pos || neg {
            let (e, m, _, _) = self.pure(loc, vals, p, eps, false);
            if pos {
                [e, m, T::zero(), T::zero()]
            } else {
                [T::zero(), T::zero(), e, m]
            }
        } else {
            self.mixed(loc, vals, p, eps)
        }
    }

    fn gradient(loc: &Local<T>, vals: [T; 3]) -> [T; 2] {
        let mut g = [T::zero(); 2];
        for k in 0..3 {
            g[0] += vals[k] * loc.grads[k][0];
            g[1] += vals[k] * loc.grads[k][1];
        }
        g
    }

    /// Single-signed triangle: energy, mass and their local gradients.
    #[allow(clippy::type_complexity)]
    fn pure(
        &self,
        loc: &Local<T>,
        vals: [T; 3],
        p: T,
        eps: T,
        want_grad: bool,
    ) -> (T, T, [T; 3], [T; 3]) {
        let g = Self::gradient(loc, vals);
        let s = g[0] * g[0] + g[1] * g[1] + eps * eps;
        let half_p = p / T::lit(2.0);
        // A flat triangle has no energy; for p < 2 its gradient is taken as 0.
        let base = if s > T::zero() {
            s.powf(half_p - T::one())
        } else {
            T::zero()
        };
        let e = loc.area * base * s;
        let mut m = T::zero();
        let mut dm = [T::zero(); 3];
        for (bary, w) in &self.quad {
            let uq = bary[0] * vals[0] + bary[1] * vals[1] + bary[2] * vals[2];
            let phi = signed_pow(uq, p);
            m += *w * phi * uq;
            if want_grad {
                for k in 0..3 {
                    dm[k] += *w * p * phi * bary[k];
                }
            }
        }
        m *= loc.area;
        let mut de = [T::zero(); 3];
        if want_grad {
            let c = loc.area * p * base;
            for k in 0..3 {
                de[k] = c * (g[0] * loc.grads[k][0] + g[1] * loc.grads[k][1]);
                dm[k] *= loc.area;
            }
        }
        (e, m, de, dm)
    }

    /// Sign-changing triangle: clip at the zero line and integrate each part
    /// over its own polygon.
    fn mixed(&self, loc: &Local<T>, vals: [T; 3], p: T, eps: T) -> Parts<T> {
        let g = Self::gradient(loc, vals);
        let dens = (g[0] * g[0] + g[1] * g[1] + eps * eps).powf(p / T::lit(2.0));
        let mut out = [T::zero(); 4];
        for (off, sign) in [(0usize, T::one()), (2, -T::one())] {
            let sv = vals.map(|v| v * sign);
            let poly = clip(sv);
            let mut area = T::zero();
            let mut mass = T::zero();
            for i in 1..poly.len().saturating_sub(1) {
                let (a, b, c) = (poly[0], poly[i], poly[i + 1]);
                let frac = sub_area(a, b, c);
                area += frac;
                for (bary, w) in &self.quad {
                    let mut lam = [T::zero(); 3];
                    for k in 0..3 {
                        lam[k] = bary[0] * a[k] + bary[1] * b[k] + bary[2] * c[k];
                    }
                    let uq = lam[0] * sv[0] + lam[1] * sv[1] + lam[2] * sv[2];
                    mass += frac * *w * uq.max(T::zero()).powf(p);
                }
            }
            out[off] = loc.area * area * dens;
            out[off + 1] = loc.area * mass;
        }
        out
    }
}

/// Barycentric polygon of `{Σ λ_i v_i >= 0}` inside the reference triangle.
fn clip<T: Real>(v: [T; 3]) -> Vec<[T; 3]> {
    let corner = |i: usize| {
        let mut c = [T::zero(); 3];
        c[i] = T::one();
        c
    };
    let mut out = Vec::with_capacity(4);
    for i in 0..3 {
        let j = (i + 1) % 3;
        if v[i] >= T::zero() {
            out.push(corner(i));
        }
        if (v[i] > T::zero() && v[j] < T::zero()) || (v[i] < T::zero() && v[j] > T::zero()) {
            let s = v[i] / (v[i] - v[j]);
            let mut c = [T::zero(); 3];
            c[i] = T::one() - s;
            c[j] = s;
            out.push(c);
        }
    }
    out
}

/// Area of a barycentric sub-triangle relative to the parent.
fn sub_area<T: Real>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    // Use (λ_1, λ_2) as planar coordinates of the reference triangle.
    let det = (b[1] - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (b[2] - a[2]);
    det.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh_sector;
    use crate::geometry::SectorSpec;

    fn asm(k: f64, h: f64) -> Assembly<f64> {
        Assembly::new(mesh_sector(SectorSpec::new(k).unwrap(), h).unwrap())
    }

    #[test]
    fn quadrature_is_degree_four() {
        let q = quad_points::<f64>();
        // ∫ λ1^a λ2^b λ3^c over the reference = a! b! c! 2! / (a+b+c+2)! · |T|
        let exact = |a: u32, b: u32, c: u32| {
            let f = |n: u32| (1..=n).product::<u32>() as f64;
            f(a) * f(b) * f(c) * 2.0 / f(a + b + c + 2)
        };
        for (a, b, c) in [
            (4, 0, 0),
            (2, 2, 0),
            (1, 1, 2),
            (3, 1, 0),
            (0, 0, 0),
            (2, 1, 1),
        ] {
            let s: f64 = q
                .iter()
                .map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                .sum();
            assert!((s - exact(a, b, c)).abs() < 1e-12, "{a}{b}{c}");
        }
    }

    #[test]
    fn clipped_areas_partition_the_triangle() {
        for v in [
            [1.0, -2.0, 0.5],
            [-1.0, 3.0, -0.25],
            [0.0, 1.0, -1.0],
            [2.0, -1.0, -1.0],
        ] {
            let a: f64 = poly_area(&clip(v));
            let b: f64 = poly_area(&clip(v.map(|x: f64| -x)));
            assert!((a + b - 1.0).abs() < 1e-14);
        }
        // Positive corner cut at 1/3 along both edges.
        assert!((poly_area(&clip([1.0, -2.0, -2.0])) - 1.0 / 9.0).abs() < 1e-14);
    }

    fn poly_area(poly: &[[f64; 3]]) -> f64 {
        (1..poly.len().saturating_sub(1))
            .map(|i| sub_area(poly[0], poly[i], poly[i + 1]))
            .sum()
    }

    /// Linear field u = x: energy and mass on each side by direct integration.
    #[test]
    fn split_integrals_of_a_linear_field() {
        let a = asm(1.0, 0.05);
        // u = y - 0.2 on the half disk, ignoring the Dirichlet pinning.
        let u: Vec<f64> = a.mesh.vertices.iter().map(|v| v[1] - 0.2).collect();
        let parts = a.parts(&u, 2.0, 0.0, None);
        let area: f64 = a.area.iter().sum();
        // ∇u = (0,1) everywhere: E⁺ + E⁻ equals the mesh area.
        assert!((parts[0] + parts[2] - area).abs() < 1e-12);
        // Quadratic integrand: the edge-midpoint rule is exact.
        let mut direct = 0.0;
        for (ti, t) in a.mesh.triangles.iter().enumerate() {
            let c = t.map(|i| a.mesh.vertices[i]);
            for k in 0..3 {
                let y = (c[k][1] + c[(k + 1) % 3][1]) / 2.0;
                direct += (y - 0.2).powi(2) * a.area[ti] / 3.0;
            }
        }
        assert!((parts[1] + parts[3] - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let a = asm(2.0, 0.1);
        let n = a.mesh.n_vertices();
        let u: Vec<f64> = a
            .mesh
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if a.mesh.boundary_mask[i] {
                    0.0
                } else {
                    (3.0 * v[0]).sin() - 0.4 + 0.1 * v[1]
                }
            })
            .collect();
        for p in [1.5, 2.0, 3.7] {
            let mut g = [vec![], vec![], vec![], vec![]];
            a.parts(&u, p, 1e-3, Some(&mut g));
            for i in (0..n).step_by(7) {
                if a.mesh.boundary_mask[i] {
                    continue;
                }
                let d = 1e-6;
                let mut up = u.clone();
                let mut dn = u.clone();
                up[i] += d;
                dn[i] -= d;
                let (pu, pd) = (a.parts(&up, p, 1e-3, None), a.parts(&dn, p, 1e-3, None));
                for j in 0..4 {
                    let fd = (pu[j] - pd[j]) / (2.0 * d);
                    assert!(
                        (fd - g[j][i]).abs() <= 1e-5 * (1.0 + fd.abs()),
                        "p={p} part {j} vertex {i}: {fd} vs {}",
                        g[j][i]
                    );
                }
            }
        }
    }
}

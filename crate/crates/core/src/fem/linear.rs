//! The linear case `p = 2`: sparse stiffness/mass matrices and block inverse
//! iteration for the lowest Dirichlet eigenpairs.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::energy::Assembly;

/// Symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone)]
pub(crate) struct Csr<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<T>,
}

impl<T: Real> Csr<T> {
    fn from_triplets(n: usize, mut trip: Vec<(usize, usize, T)>) -> Self {
        trip.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(trip.len());
        let mut vals: Vec<T> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trip {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn mul(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.n {
            let mut s = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(T::zero(), |k| self.vals[k])
            })
            .collect()
    }
}

/// P1 stiffness and consistent mass restricted to the free vertices.
pub(crate) fn stiffness_mass<T: Real>(asm: &Assembly<T>) -> (Csr<T>, Csr<T>) {
    let mut index = vec![usize::MAX; asm.mesh.n_vertices()];
    for (i, &v) in asm.free.iter().enumerate() {
        index[v] = i;
    }
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    let twelfth = T::lit(1.0 / 12.0);
    for (ti, t) in asm.mesh.triangles.iter().enumerate() {
        let a = asm.area[ti];
        let g = asm.grads[ti];
        for r in 0..3 {
            let i = index[t[r]];
            if i == usize::MAX {
                continue;
            }
            for c in 0..3 {
                let j = index[t[c]];
                if j == usize::MAX {
                    continue;
                }
                kt.push((i, j, a * (g[r][0] * g[c][0] + g[r][1] * g[c][1])));
                let m = if r == c {
                    a * twelfth * T::lit(2.0)
                } else {
                    a * twelfth
                };
                mt.push((i, j, m));
            }
        }
    }
    let n = asm.n_free();
    (Csr::from_triplets(n, kt), Csr::from_triplets(n, mt))
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, warm-started
/// from `x`. Returns the iteration count.
pub(crate) fn pcg<T: Real>(
    a: &Csr<T>,
    b: &[T],
    x: &mut [T],
    rtol: T,
    max_iter: usize,
) -> Result<usize> {
    let n = a.n;
    let d = a.diag();
    let mut r = vec![T::zero(); n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = dot(b, b).sqrt().max(T::min_positive_value());
    let mut z: Vec<T> = r.iter().zip(&d).map(|(ri, di)| *ri / *di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= rtol * bnorm {
            return Ok(it);
        }
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / d[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        best: (dot(&r, &r).sqrt() / bnorm).to_f64_lossy(),
        context: "conjugate gradients".into(),
    })
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations; eigenvalues ascending with matching columns.
pub(crate) fn jacobi_eigen<T: Real>(mut a: Vec<Vec<T>>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    for _ in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i][i]
            .partial_cmp(&a[j][j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (vals, vecs)
}

/// Lowest `count` eigenpairs of `K x = λ M x` by block inverse iteration
/// with Rayleigh–Ritz, using `count + 1` vectors.
pub(crate) fn lowest_eigenpairs<T: Real>(
    k: &Csr<T>,
    m: &Csr<T>,
    count: usize,
    rtol: T,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = k.n;
    let b = count + 1;
    // Smooth, linearly independent starts.
    let mut x: Vec<Vec<T>> = (0..b)
        .map(|j| {
            (0..n)
                .map(|i| {
                    T::one() + T::lit(0.37 * j as f64) * T::from_usize_lossy((i * (j + 1)) % 7)
                })
                .collect()
        })
        .collect();
    let mut prev = vec![T::infinity(); count];
    let mut tmp = vec![T::zero(); n];
    for _ in 0..500 {
        let mut y = Vec::with_capacity(b);
        for xj in &x {
            m.mul(xj, &mut tmp);
            let mut sol = xj.clone();
            pcg(
                k,
                &tmp,
                &mut sol,
                T::lit(1e-12).max(T::epsilon() * T::lit(100.0)),
                20 * n + 100,
            )?;
            y.push(sol);
        }
        // Rayleigh–Ritz on span(y): M-orthonormalise, then diagonalise K.
        let mut ky = Vec::with_capacity(b);
        let mut my = Vec::with_capacity(b);
        for yj in &y {
            let mut a = vec![T::zero(); n];
            k.mul(yj, &mut a);
            ky.push(a);
            let mut c = vec![T::zero(); n];
            m.mul(yj, &mut c);
            my.push(c);
        }
        let kr: Vec<Vec<T>> = (0..b)
            .map(|i| (0..b).map(|j| dot(&y[i], &ky[j])).collect())
            .collect();
        let mr: Vec<Vec<T>> = (0..b)
            .map(|i| (0..b).map(|j| dot(&y[i], &my[j])).collect())
            .collect();
        let (mvals, mvecs) = jacobi_eigen(mr);
        // W = V diag(1/sqrt(μ)) whitens M; solve the standard problem WᵀKW.
        let w: Vec<Vec<T>> = (0..b)
            .map(|i| (0..b).map(|j| mvecs[j][i] / mvals[j].sqrt()).collect())
            .collect();
        let mut kw = vec![vec![T::zero(); b]; b];
        for i in 0..b {
            for j in 0..b {
                let mut s = T::zero();
                for r in 0..b {
                    for c in 0..b {
                        s += w[r][i] * kr[r][c] * w[c][j];
                    }
                }
                kw[i][j] = s;
            }
        }
        let (vals, vecs) = jacobi_eigen(kw);
        x = (0..b)
            .map(|col| {
                let coef: Vec<T> = (0..b)
                    .map(|r| (0..b).map(|c| w[r][c] * vecs[col][c]).sum())
                    .collect();
                (0..n)
                    .map(|i| (0..b).map(|r| coef[r] * y[r][i]).sum())
                    .collect()
            })
            .collect();
        let done = (0..count).all(|i| ((vals[i] - prev[i]) / vals[i]).abs() <= rtol);
        prev.copy_from_slice(&vals[..count]);
        if done {
            x.truncate(count);
            return Ok((prev, x));
        }
    }
    Err(Error::NonConvergence {
        iterations: 500,
        best: prev[0].to_f64_lossy(),
        context: "block inverse iteration".into(),
    })
}

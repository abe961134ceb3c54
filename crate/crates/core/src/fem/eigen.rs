//! Discrete eigenpairs by minimising Rayleigh quotients.
//!
//! The first eigenvalue minimises `(1/p) ln(∫ (|∇u|² + ε²)^{p/2} / ∫ |u|^p)`
//! over P1 fields. The second minimises a smoothed `max(ln R(u⁺), ln R(u⁻))`
//! whose sharpness is raised in stages. Either run starts from the linear eigenvectors at
//! `p = 2` and follows `p` to the target in steps of at most `p_step`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::geometry::{pack_two_disks_sector_seeded, SectorSpec};
use crate::optim::{lbfgs, LbfgsOptions};
use crate::scalar::Real;

use super::energy::Assembly;
use super::field::{p_rayleigh, p_rayleigh_parts, ScalarField};
use super::linear::{lowest_eigenpairs, stiffness_mass};
use super::mesh::{mesh_sector, Mesh};

/// Supported exponents for the 2D solvers.
pub const FEM_P_RANGE: (f64, f64) = (1.1, 30.0);

/// Knobs of the descent.
#[derive(Debug, Clone)]
pub struct FemOptions<T> {
    /// Largest change of `p` between continuation stages.
    pub p_step: T,
    /// Regularisation used on the way to the target exponent.
    pub stage_eps: T,
    /// Regularisation schedule at the target exponent.
    pub eps_schedule: Vec<T>,
    pub max_iter: usize,
    /// Seed for the randomised two-bump start.
    pub seed: u64,
}

impl<T: Real> Default for FemOptions<T> {
    fn default() -> Self {
        Self {
            p_step: T::lit(0.5),
            stage_eps: T::lit(1e-4),
            eps_schedule: vec![T::lit(1e-2), T::lit(1e-4), T::lit(1e-6)],
            max_iter: 20000,
            seed: 0,
        }
    }
}

/// A computed eigenpair and the run that produced it.
#[derive(Debug, Clone)]
pub struct FemSolution<T> {
    pub estimate: EigenEstimate<T>,
    pub field: ScalarField<T>,
    /// Accepted objective values of the final descent (non-increasing).
    pub history: Vec<T>,
    /// `(p, value)` after each continuation stage.
    pub stages: Vec<(T, T)>,
}

/// Where a two-bump run started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondSeed {
    /// Continuation from the second linear eigenvector.
    Continuation,
    /// Bumps on the two disks of the best two-disk packing.
    Packing,
    /// Opposite signs on the two halves of the bisector split.
    Bisector,
}

/// Second eigenpair with the balance data of the two-bump run.
#[derive(Debug, Clone)]
pub struct SecondSolution<T> {
    pub solution: FemSolution<T>,
    pub r_plus: T,
    pub r_minus: T,
    pub theta: T,
    pub seed: SecondSeed,
    /// `(seed, value)` for every start that finished.
    pub candidates: Vec<(SecondSeed, T)>,
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p >= T::lit(FEM_P_RANGE.0)) || !(p <= T::lit(FEM_P_RANGE.1)) {
        return invalid(format!(
            "p = {p} outside the 2D solver range [{}, {}]",
            FEM_P_RANGE.0, FEM_P_RANGE.1
        ));
    }
    Ok(())
}

/// Exponents visited from `from` to `to` in equal steps of at most `step`.
fn stages<T: Real>(from: T, to: T, step: T) -> Vec<T> {
    let n = ((to - from).abs() / step)
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    (1..=n)
        .map(|j| from + (to - from) * T::from_usize_lossy(j) / T::from_usize_lossy(n))
        .collect()
}

fn normalise<T: Real>(x: &mut [T]) {
    let m = x.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    if m > T::zero() {
        for v in x.iter_mut() {
            *v /= m;
        }
    }
}

fn lbfgs_opts<T: Real>(max_iter: usize) -> LbfgsOptions<T> {
    LbfgsOptions {
        max_iter,
        gtol: T::lit(1e-9),
        ftol: T::lit(1e-11),
        patience: 10,
        ..LbfgsOptions::default()
    }
}

struct Descent<T> {
    x: Vec<T>,
    history: Vec<T>,
    iterations: usize,
    converged: bool,
}

fn descend_first<T: Real>(
    asm: &Assembly<T>,
    x0: &[T],
    p: T,
    eps: T,
    max_iter: usize,
) -> Descent<T> {
    let mut grads: [Vec<T>; 4] = Default::default();
    let mut f = |x: &[T], g: &mut [T]| -> T {
        let u = asm.expand(x);
        let t = asm.parts(&u, p, eps, Some(&mut grads));
        let (e, m) = (t[0] + t[2], t[1] + t[3]);
        if !(m > T::zero()) || !(e > T::zero()) {
            return T::infinity();
        }
        for (i, &v) in asm.free.iter().enumerate() {
            g[i] = ((grads[0][v] + grads[2][v]) / e - (grads[1][v] + grads[3][v]) / m) / p;
        }
        (e.ln() - m.ln()) / p
    };
    let r = lbfgs(&mut f, x0, lbfgs_opts(max_iter));
    let mut x = r.x;
    normalise(&mut x);
    Descent {
        x,
        history: r.history,
        iterations: r.iterations,
        converged: r.converged,
    }
}

/// Smoothed `max(ln R⁺, ln R⁻)` with sharpness `q`.
fn descend_two_bump<T: Real>(
    asm: &Assembly<T>,
    x0: &[T],
    p: T,
    eps: T,
    q: T,
    max_iter: usize,
) -> Descent<T> {
    let mut grads: [Vec<T>; 4] = Default::default();
    let mut f = |x: &[T], g: &mut [T]| -> T {
        let u = asm.expand(x);
        let t = asm.parts(&u, p, eps, Some(&mut grads));
        if t.iter().any(|v| !(*v > T::zero())) {
            return T::infinity();
        }
        let lp = t[0].ln() - t[1].ln();
        let lm = t[2].ln() - t[3].ln();
        let top = lp.max(lm);
        let ep = (q * (lp - top)).exp();
        let em = (q * (lm - top)).exp();
        let (a, b) = (ep / (ep + em), em / (ep + em));
        for (i, &v) in asm.free.iter().enumerate() {
            g[i] = a * (grads[0][v] / t[0] - grads[1][v] / t[1])
                + b * (grads[2][v] / t[2] - grads[3][v] / t[3]);
        }
        top + (ep + em).ln() / q
    };
    let r = lbfgs(&mut f, x0, lbfgs_opts(max_iter));
    let mut x = r.x;
    normalise(&mut x);
    Descent {
        x,
        history: r.history,
        iterations: r.iterations,
        converged: r.converged,
    }
}

/// Lowest linear eigenvectors on the free vertices, positive first one.
fn linear_start<T: Real>(asm: &Assembly<T>, count: usize) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let (k, m) = stiffness_mass(asm);
    let (vals, mut vecs) = lowest_eigenpairs(
        &k,
        &m,
        count,
        T::lit(1e-12).max(T::epsilon() * T::lit(64.0)),
    )?;
    for v in vecs.iter_mut() {
        let s: T = v.iter().copied().sum();
        if s < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        normalise(v);
    }
    Ok((vals, vecs))
}

/// Lowest `count` eigenpairs of the P1 Dirichlet Laplacian (`p = 2`) on
/// `mesh`, each field scaled to `max |u| = 1` with a positive sum.
pub fn linear_eigenpairs<T: Real>(
    mesh: Arc<Mesh<T>>,
    count: usize,
) -> Result<Vec<(T, ScalarField<T>)>> {
    if count == 0 {
        return invalid("count must be positive");
    }
    let asm = Assembly::new(mesh.clone());
    let (vals, vecs) = linear_start(&asm, count)?;
    vals.into_iter()
        .zip(vecs)
        .map(|(v, x)| Ok((v, ScalarField::new(mesh.clone(), asm.expand(&x))?)))
        .collect()
}

/// Initial state of a first-eigenvalue run.
#[derive(Debug, Clone)]
pub struct WarmStart<T> {
    pub p: T,
    pub field: ScalarField<T>,
}

/// `τ_k(p)`: first Dirichlet eigenvalue of the sector of aperture `π/k`.
pub fn first_eigen_sector<T: Real>(
    p: T,
    spec: SectorSpec<T>,
    h: T,
) -> Result<(EigenEstimate<T>, ScalarField<T>)> {
    let mesh = mesh_sector(spec, h)?;
    let s = first_eigen_on(p, mesh, &FemOptions::default(), None)?;
    Ok((s.estimate, s.field))
}

/// First eigenpair on a given mesh, optionally continuing from a previous
/// solution instead of the linear problem.
pub fn first_eigen_on<T: Real>(
    p: T,
    mesh: Arc<Mesh<T>>,
    opts: &FemOptions<T>,
    warm: Option<&WarmStart<T>>,
) -> Result<FemSolution<T>> {
    check_p(p)?;
    let asm = Assembly::new(mesh.clone());
    let (p0, mut x) = match warm {
        Some(w) => {
            check_p(w.p)?;
            (w.p, asm.restrict(&w.field.transfer(mesh.clone()).values))
        }
        None => (T::lit(2.0), linear_start(&asm, 1)?.1.swap_remove(0)),
    };
    let mut iterations = 0;
    let mut recorded = Vec::new();
    if p != p0 {
        let path = stages(p0, p, opts.p_step);
        for &q in &path[..path.len() - 1] {
            let d = descend_first(&asm, &x, q, opts.stage_eps, opts.max_iter);
            iterations += d.iterations;
            x = d.x;
            let f = ScalarField::new(mesh.clone(), asm.expand(&x))?;
            recorded.push((q, p_rayleigh(&f, q)?));
        }
    }
    let mut history = Vec::new();
    let mut last = None;
    let mut change = T::zero();
    let mut converged = true;
    if p == T::lit(2.0) && warm.is_none() {
        // The linear eigenvector is already the minimiser.
        history.push(T::zero());
    } else {
        for &eps in &opts.eps_schedule {
            let d = descend_first(&asm, &x, p, eps, opts.max_iter);
            iterations += d.iterations;
            converged = d.converged;
            x = d.x;
            history = d.history;
            let f = ScalarField::new(mesh.clone(), asm.expand(&x))?;
            let v = p_rayleigh(&f, p)?;
            if let Some(prev) = last {
                change = (v - prev).abs();
            }
            last = Some(v);
        }
    }
    let field = ScalarField::new(mesh.clone(), asm.expand(&x))?;
    let value = p_rayleigh(&field, p)?;
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            best: value.to_f64_lossy(),
            context: format!("first eigenvalue descent at p = {p}"),
        });
    }
    recorded.push((p, value));
    let tol = change.max(value * T::lit(1e-8));
    Ok(FemSolution {
        estimate: EigenEstimate::new(value, Method::Fem, tol, iterations),
        field,
        history,
        stages: recorded,
    })
}

struct TwoBump<T> {
    x: Vec<T>,
    /// Weight of the positive part in the final smoothed maximum.
    theta: T,
    r_plus: T,
    r_minus: T,
    history: Vec<T>,
    iterations: usize,
}

/// Sharpness schedule of the smoothed maximum.
const SHARPNESS: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];

fn two_bump_stage<T: Real>(
    asm: &Assembly<T>,
    x0: &[T],
    p: T,
    eps: T,
    sharp: &[f64],
    opts: &FemOptions<T>,
) -> Result<TwoBump<T>> {
    let mut x = x0.to_vec();
    let mut iterations = 0;
    let mut history = Vec::new();
    let mut q = T::one();
    for &s in sharp {
        q = T::lit(s);
        let d = descend_two_bump(asm, &x, p, eps, q, opts.max_iter);
        iterations += d.iterations;
        x = d.x;
        history = d.history;
    }
    let t = asm.parts(&asm.expand(&x), p, eps, None);
    if t.iter().any(|v| !(*v > T::zero())) {
        return Err(Error::NonConvergence {
            iterations,
            best: f64::NAN,
            context: "two-bump field collapsed to one sign".into(),
        });
    }
    let (rp, rm) = (t[0] / t[1], t[2] / t[3]);
    let d = q * (rp.ln() - rm.ln());
    let theta = T::one() / (T::one() + (-d).exp());
    Ok(TwoBump {
        x,
        theta,
        r_plus: rp,
        r_minus: rm,
        history,
        iterations,
    })
}

/// `(p, ε)` of every stage that was run.
type Stages<T> = Vec<(T, T)>;

/// Runs the two-bump problem from `x0` at exponent `p0` to `p`.
fn two_bump_from<T: Real>(
    asm: &Assembly<T>,
    x0: Vec<T>,
    p0: T,
    p: T,
    opts: &FemOptions<T>,
) -> Result<(TwoBump<T>, Stages<T>)> {
    let mut x = x0;
    let mut iterations = 0;
    let mut recorded = Vec::new();
    if p != p0 {
        let path = stages(p0, p, opts.p_step);
        for &q in &path[..path.len() - 1] {
            let b = two_bump_stage(asm, &x, q, opts.stage_eps, &SHARPNESS[1..3], opts)?;
            iterations += b.iterations;
            x = b.x;
            recorded.push((q, b.r_plus.max(b.r_minus)));
        }
    }
    let mut out = None;
    let n = opts.eps_schedule.len();
    for (i, &eps) in opts.eps_schedule.iter().enumerate() {
        let sharp = if i + 1 == n {
            &SHARPNESS[..]
        } else {
            &SHARPNESS[..2]
        };
        let b = two_bump_stage(asm, &x, p, eps, sharp, opts)?;
        iterations += b.iterations;
        x = b.x.clone();
        out = Some(b);
    }
    let mut b =
        out.ok_or_else(|| Error::InvalidArgument("empty regularisation schedule".into()))?;
    b.iterations = iterations;
    recorded.push((p, b.r_plus.max(b.r_minus)));
    Ok((b, recorded))
}

/// Seed fields for the non-continuation starts.
fn seed_field<T: Real>(mesh: &Arc<Mesh<T>>, seed: SecondSeed, rng_seed: u64) -> Result<Vec<T>> {
    let spec = mesh.spec;
    match seed {
        SecondSeed::Packing => {
            let pack = pack_two_disks_sector_seeded(spec, rng_seed)?;
            // Bumps without compact support: a vertex value of exactly zero is
            // a kink of the clipped energy and stalls the descent.
            let r = pack.radius;
            let (c1, c2) = (pack.centers[0], pack.centers[1]);
            let bump = |x: [T; 2], c: [T; 2]| {
                let d2 = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (r * r);
                (-d2).exp()
            };
            let f = ScalarField::from_fn(mesh.clone(), |x| bump(x, c1) - bump(x, c2));
            Ok(f.values)
        }
        SecondSeed::Bisector => {
            let f = ScalarField::from_fn(mesh.clone(), |x| {
                let rho = x[0].hypot(x[1]);
                let th = x[1].atan2(x[0]) * spec.k;
                let tilt = T::lit(1e-3) * th.cos();
                (T::one() - rho) * rho * ((th * T::lit(2.0)).sin() + tilt)
            });
            Ok(f.values)
        }
        SecondSeed::Continuation => invalid("continuation seed is built from the linear problem"),
    }
}

/// Upper-bound estimate of the second eigenvalue of the sector of aperture
/// `π/k`, returned with its sign-changing eigenfunction.
pub fn second_eigen_sector<T: Real>(
    p: T,
    spec: SectorSpec<T>,
    h: T,
) -> Result<(EigenEstimate<T>, ScalarField<T>)> {
    let mesh = mesh_sector(spec, h)?;
    let s = second_eigen_on(p, mesh, &FemOptions::default())?;
    Ok((s.solution.estimate, s.solution.field))
}

/// Second eigenpair on a given mesh: the best of the continuation branch
/// and the packing and bisector starts.
pub fn second_eigen_on<T: Real>(
    p: T,
    mesh: Arc<Mesh<T>>,
    opts: &FemOptions<T>,
) -> Result<SecondSolution<T>> {
    let mut best: Option<SecondSolution<T>> = None;
    let mut candidates = Vec::new();
    let mut last_err = None;
    for seed in [
        SecondSeed::Continuation,
        SecondSeed::Packing,
        SecondSeed::Bisector,
    ] {
        match second_eigen_seeded(p, mesh.clone(), opts, seed) {
            Ok(s) => {
                let v = s.solution.estimate.value;
                candidates.push((seed, v));
                if best
                    .as_ref()
                    .is_none_or(|b| v < b.solution.estimate.value)
                {
                    best = Some(s);
                }
            }
            Err(e @ Error::InvalidArgument(_)) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    let mut best = best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::Internal("no two-bump start finished".into()))
    })?;
    best.candidates = candidates;
    Ok(best)
}

/// Second eigenpair from a single start.
pub fn second_eigen_seeded<T: Real>(
    p: T,
    mesh: Arc<Mesh<T>>,
    opts: &FemOptions<T>,
    seed: SecondSeed,
) -> Result<SecondSolution<T>> {
    check_p(p)?;
    let asm = Assembly::new(mesh.clone());
    let (b, recorded) = match seed {
        SecondSeed::Continuation => {
            let (_, mut v) = linear_start(&asm, 2)?;
            two_bump_from(&asm, v.swap_remove(1), T::lit(2.0), p, opts)?
        }
        _ => {
            let u = seed_field(&mesh, seed, opts.seed)?;
            two_bump_from(&asm, asm.restrict(&u), p, p, opts)?
        }
    };
    let field = ScalarField::new(mesh.clone(), asm.expand(&b.x))?;
    let (rp, rm) = p_rayleigh_parts(&field, p)?;
    let value = rp.max(rm);
    let tol = (rp - rm).abs().max(value * T::lit(1e-8));
    Ok(SecondSolution {
        solution: FemSolution {
            estimate: EigenEstimate::new(value, Method::Fem, tol, b.iterations),
            field,
            history: b.history,
            stages: recorded,
        },
        r_plus: rp,
        r_minus: rm,
        theta: b.theta,
        seed,
        candidates: vec![(seed, value)],
    })
}

//! Embedded Dormand–Prince 5(4) integrator for two-component systems.
//!
//! The radial problems only ever need a planar state `(u, w)`, so the
//! integrator is specialised to `[T; 2]`. Dense output is obtained by
//! re-stepping: a single RK step of length `s <= h` from the left end of an
//! accepted step has the same local order as the step itself.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) type State<T> = [T; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights minus 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Control flow returned by the per-step observer.
pub(crate) enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Dopri5<T> {
    pub tol: T,
    pub max_steps: usize,
}

struct Trial<T> {
    y: State<T>,
    err: T,
}

impl<T: Real> Dopri5<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            max_steps: 2_000_000,
        }
    }

    fn trial<F>(&self, f: &F, t: T, y: &State<T>, h: T) -> Trial<T>
    where
        F: Fn(T, &State<T>) -> State<T>,
    {
        let mut k = [[T::zero(); 2]; 7];
        k[0] = f(t, y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = T::lit(A[s][j]);
                if a != T::zero() {
                    ys[0] += h * a * kj[0];
                    ys[1] += h * a * kj[1];
                }
            }
            k[s] = f(t + h * T::lit(C[s]), &ys);
        }
        // The 7th stage is evaluated at the 5th-order solution (FSAL row).
        let mut y5 = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = T::lit(A[6][j]);
            y5[0] += h * b * kj[0];
            y5[1] += h * b * kj[1];
        }
        let mut err = T::zero();
        for i in 0..2 {
            let mut e = T::zero();
            for (j, kj) in k.iter().enumerate() {
                e += T::lit(E[j]) * kj[i];
            }
            let scale = self.tol + self.tol * y[i].abs().max(y5[i].abs());
            err = err.max((h * e).abs() / scale);
        }
        Trial { y: y5, err }
    }

    /// Value at `t + s` from the state `y` at `t`, using one step.
    pub fn restep<F>(&self, f: &F, t: T, y: &State<T>, s: T) -> State<T>
    where
        F: Fn(T, &State<T>) -> State<T>,
    {
        if s == T::zero() {
            return *y;
        }
        self.trial(f, t, y, s).y
    }

    /// Integrates from `t0` towards `t_end`, calling `observe(t_prev, y_prev,
    /// t, y, h)` after every accepted step. Returns the last accepted state.
    pub fn integrate<F, O>(
        &self,
        f: &F,
        t0: T,
        y0: State<T>,
        t_end: T,
        h0: T,
        mut observe: O,
    ) -> Result<(T, State<T>)>
    where
        F: Fn(T, &State<T>) -> State<T>,
        O: FnMut(T, &State<T>, T, &State<T>) -> Result<Flow>,
    {
        let mut t = t0;
        let mut y = y0;
        let mut h = h0.min(t_end - t0);
        let safety = T::lit(0.9);
        let fifth = T::lit(0.2);
        let eps = T::epsilon();
        for _ in 0..self.max_steps {
            if t >= t_end {
                return Ok((t, y));
            }
            if t + h > t_end {
                h = t_end - t;
            }
            let h_min = T::lit(64.0) * eps * (T::one() + t.abs());
            let trial = self.trial(f, t, &y, h);
            let ok = trial.err <= T::one() && trial.y.iter().all(|v| v.is_finite());
            let factor = if trial.err.is_finite() && trial.err > T::zero() {
                (safety * trial.err.powf(-fifth))
                    .min(T::lit(5.0))
                    .max(fifth)
            } else if trial.err == T::zero() {
                T::lit(5.0)
            } else {
                fifth
            };
            if ok {
                let t_new = t + h;
                let flow = observe(t, &y, t_new, &trial.y)?;
                t = t_new;
                y = trial.y;
                if let Flow::Stop = flow {
                    return Ok((t, y));
                }
                h *= factor;
            } else {
                h *= factor.min(T::lit(0.5));
                if h < h_min {
                    return Err(Error::StepUnderflow {
                        radius: t.to_f64_lossy(),
                    });
                }
            }
        }
        Err(Error::Resource(format!(
            "integrator exceeded {} steps",
            self.max_steps
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &State<f64>| [y[1], -y[0]];
        let ode = Dopri5::new(1e-12);
        let (t, y) = ode
            .integrate(
                &f,
                0.0,
                [1.0, 0.0],
                std::f64::consts::TAU,
                1e-3,
                |_, _, _, _| Ok(Flow::Continue),
            )
            .unwrap();
        assert!((t - std::f64::consts::TAU).abs() < 1e-14);
        assert!((y[0] - 1.0).abs() < 1e-9, "{y:?}");
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn restep_matches_exact_solution() {
        let f = |_t: f64, y: &State<f64>| [y[0], 0.0];
        let ode = Dopri5::new(1e-10);
        let y = ode.restep(&f, 0.0, &[1.0, 0.0], 0.1);
        assert!((y[0] - 0.1f64.exp()).abs() < 1e-9);
    }
}

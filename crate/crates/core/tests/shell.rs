use pspectra::bessel::bessel_zero;
use pspectra::radial::{radial_eigenvalue, Params};
use pspectra::shell::*;

fn planar(p: f64) -> Params<f64> {
    Params::<f64>::planar(p).unwrap()
}

/// Smallest eigenvalue of `-(r u')' = λ r u` on `(a, b)`, `u(a)=u(b)=0`,
/// by second-order finite differences. The symmetric tridiagonal pencil
/// is reduced to a standard problem and solved by Sturm bisection.
fn fd_shell_p2(a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let m = n - 1;
    let r = |i: usize| a + i as f64 * h;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    for i in 1..=m {
        let (rm, rp) = (r(i) - h / 2.0, r(i) + h / 2.0);
        let wi = r(i);
        diag[i - 1] = (rm + rp) / (h * h) / wi;
        if i < m {
            let wj = r(i + 1);
            off[i - 1] = -rp / (h * h) / (wi * wj).sqrt();
        }
    }
    let count_below = |x: f64| {
        let mut c = 0;
        let mut d = 1.0;
        for i in 0..m {
            let o = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            d = diag[i] - x - if i > 0 { o / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                c += 1;
            }
        }
        c
    };
    let (mut lo, mut hi) = (0.0, 4.0 * diag.iter().cloned().fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ball_scaling() {
    let j01 = bessel_zero::<f64>(0, 1).unwrap().alpha;
    let one = first_eigen_ball(&planar(2.0), 1.0).unwrap().value;
    assert!((one - j01 * j01).abs() < 1e-8);
    let half = first_eigen_ball(&planar(2.0), 0.5).unwrap().value;
    assert!((half / one - 4.0).abs() < 1e-12);
    let p3 = planar(3.0);
    let r = first_eigen_ball(&p3, 0.5).unwrap().value / first_eigen_ball(&p3, 1.0).unwrap().value;
    assert!((r - 8.0f64).abs() < 1e-12);
    assert!(first_eigen_ball(&p3, 0.0).is_err());
    assert!(first_eigen_ball(&p3, 1.1).is_err());
}

#[test]
fn shell_matches_finite_differences() {
    let v = first_eigen_shell(&planar(2.0), 0.5, 1.0).unwrap().value;
    // Richardson extrapolation of two second-order grids.
    let f1 = fd_shell_p2(0.5, 1.0, 2000);
    let f2 = fd_shell_p2(0.5, 1.0, 4000);
    let oracle = (4.0 * f2 - f1) / 3.0;
    assert!(((v - oracle) / oracle).abs() < 1e-4, "{v} vs {oracle}");
    assert!(((v - f2) / f2).abs() < 1e-4);
}

#[test]
fn second_nodal_annulus_is_j02_squared() {
    let j01 = bessel_zero::<f64>(0, 1).unwrap().alpha;
    let j02 = bessel_zero::<f64>(0, 2).unwrap().alpha;
    let v = first_eigen_shell(&planar(2.0), j01 / j02, 1.0)
        .unwrap()
        .value;
    assert!((v - j02 * j02).abs() < 1e-6);
    assert!((v - 30.4713).abs() < 1e-3);
}

#[test]
fn strict_domain_monotonicity() {
    for p in [1.5, 2.0, 4.0] {
        let params = planar(p);
        let wide = first_eigen_shell(&params, 0.3, 0.9).unwrap().value;
        let narrow = first_eigen_shell(&params, 0.45, 0.75).unwrap().value;
        assert!(narrow > wide * 2f64.powf(p) * 0.9, "p={p}");
        let nested = first_eigen_shell(&params, 0.31, 0.9).unwrap().value;
        assert!(nested > wide);
    }
}

#[test]
fn shell_argument_errors() {
    let params = planar(2.0);
    assert!(first_eigen_shell(&params, 0.0, 1.0).is_err());
    assert!(first_eigen_shell(&params, 0.5, 0.5).is_err());
    assert!(first_eigen_shell(&params, 0.5, 1.5).is_err());
}

#[test]
fn partition_p2() {
    let (e, part) = partition_minmax(&planar(2.0), 2).unwrap();
    assert!((e.value - 30.4713).abs() < 1e-3);
    assert!((part.radii[0] - 0.43565).abs() < 1e-5);
    let (e3, part3) = partition_minmax(&planar(2.0), 3).unwrap();
    assert!((e3.value - 8.65372f64.powi(2)).abs() < 1e-3);
    assert_eq!(part3.k, 3);
    let vals = partition_values(&planar(2.0), &part3).unwrap();
    let (mn, mx) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!((mx - mn) / mx < 1e-3);
}

#[test]
fn partition_agrees_with_shooting() {
    for p in [1.5, 2.0, 3.0, 5.0] {
        let params = planar(p);
        for k in 2..=4 {
            let mu = radial_eigenvalue(&params, k).unwrap().value;
            let (e, part) = partition_minmax(&params, k).unwrap();
            assert!(
                ((e.value - mu) / mu).abs() < 1e-4,
                "p={p} k={k}: {} vs {mu}",
                e.value
            );
            let vals = partition_values(&params, &part).unwrap();
            for v in vals {
                assert!(((v - e.value) / e.value).abs() < 1e-3);
            }
        }
    }
}

#[test]
fn pinf_bound() {
    assert_eq!(analytic_upper_bound_pinf(2.0, 2).unwrap(), 54.0);
    for p in [1.5, 3.0, 20.0, 100.0] {
        let v: f64 = analytic_upper_bound_pinf(p, 1).unwrap();
        assert!((v - (p + 1.0) * (p + 2.0) / 2.0).abs() < 1e-9 * v);
    }
    let root = |p: f64| analytic_upper_bound_pinf(p, 1).unwrap().powf(1.0 / p);
    assert!(root(1000.0) < 1.02 && root(1000.0) > 1.0);
    let b10: f64 = analytic_upper_bound_pinf(10.0, 2).unwrap();
    assert!((b10 - 3f64.powi(10) * 66.0).abs() < 1e-6);
    assert!((b10.powf(0.1) - 4.56).abs() < 0.01);
    let mu = radial_eigenvalue(&planar(10.0), 2).unwrap().value;
    assert!(b10 >= mu);
}

#[test]
fn p1_bound() {
    let near = |p: f64| analytic_upper_bound_p1(p, 2, p - 1.0).unwrap();
    assert!((near(1.0001) - 4.0).abs() < 0.01);
    assert!((near(1.000001) - 4.0).abs() < 1e-4);
    let b: f64 = analytic_upper_bound_p1(1.1, 1, 0.1).unwrap();
    assert!(b.is_finite() && b >= radial_eigenvalue(&planar(1.1), 1).unwrap().value);
    // 2·3^1.2 / (0.2^0.2 · 0.6)
    let v = analytic_upper_bound_p1(1.2, 3, 0.2).unwrap();
    assert!((v - 2.0 * 3f64.powf(1.2) / (0.2f64.powf(0.2) * 0.6)).abs() < 1e-12);
    assert!((v - 17.19).abs() < 0.01);
    assert!(v >= radial_eigenvalue(&planar(1.2), 3).unwrap().value);
    assert!(analytic_upper_bound_p1(1.2, 3, 0.5).is_err());
}

#[test]
fn bounds_dominate_shooting() {
    for p in [1.2, 1.5, 2.0, 3.0, 6.0, 12.0] {
        for k in 1..=4 {
            let mu = radial_eigenvalue(&planar(p), k).unwrap().value;
            assert!(analytic_upper_bound_pinf(p, k).unwrap() >= mu);
            for eps in [0.05, 0.2, 0.4] {
                assert!(
                    analytic_upper_bound_p1(p, k, eps).unwrap() >= mu,
                    "p={p} k={k} eps={eps}"
                );
            }
        }
    }
}

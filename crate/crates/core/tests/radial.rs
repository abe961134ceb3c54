use pspectra::error::Error;
use pspectra::radial::*;

/// J_0 by its power series; accurate to ~1e-15 for x <= 6.
fn j0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let q = -x * x / 4.0;
    for m in 1..80 {
        term *= q / (m as f64 * m as f64);
        sum += term;
    }
    sum
}

/// Independent bisection on the series.
fn j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if j0_series(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn matches_bessel_j0_pointwise() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let sol = solve_cauchy(&params, 3.0, 1e-10).unwrap();
    for (r, u) in sol.grid.iter().zip(&sol.u) {
        assert!((u - j0_series(*r)).abs() <= 1e-8, "r = {r}");
    }
    for i in 0..=30 {
        let r = 0.1 * i as f64;
        let u = sol.eval(r).unwrap()[0];
        assert!((u - j0_series(r)).abs() <= 1e-8, "r = {r}");
    }
}

#[test]
fn initial_condition_at_origin() {
    for p in [1.3, 2.0, 4.5] {
        let params = Params::<f64>::new(p, 3).unwrap();
        let sol = solve_cauchy(&params, 1.0, 1e-10).unwrap();
        assert_eq!(sol.grid[0], 0.0);
        assert_eq!(sol.u[0], 1.0);
        assert_eq!(sol.w[0], 0.0);
        assert_eq!(sol.eval(0.0).unwrap(), [1.0, 0.0]);
        assert!(1.0 - sol.u[1] < 1e-4 && sol.u[1] <= 1.0);
    }
}

#[test]
fn first_zero_of_j0() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let sol = shoot(&params, 1, 1e-12).unwrap();
    assert!((sol.zeros[0] - j0_first_zero()).abs() < 1e-9);
    assert!((sol.zeros[0] - 2.40483).abs() < 1e-5);
}

#[test]
fn first_five_zeros_of_j0() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let sol = shoot(&params, 5, 1e-12).unwrap();
    let z = zeros_of_phi(&sol, 5).unwrap();
    assert!((z[2] - 8.65372).abs() < 1e-5);
    assert!((z[3] - 11.79153).abs() < 1e-5);
    assert!((z[4] - 14.93091).abs() < 1e-5);
}

#[test]
fn too_many_zeros_requested_is_a_resource_error() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let sol = solve_cauchy(&params, 3.0, 1e-10).unwrap();
    assert!(matches!(zeros_of_phi(&sol, 2), Err(Error::Resource(_))));
}

#[test]
fn invalid_params() {
    assert!(Params::<f64>::new(1.0, 2).is_err());
    assert!(Params::<f64>::new(2.0, 1).is_err());
    let p = Params::<f64>::new(1.01, 2).unwrap();
    assert!(radial_eigenvalue(&p, 1).is_err());
    let p = Params::<f64>::new(2.0, 2).unwrap();
    assert!(solve_cauchy(&p, 1.0, 0.0).is_err());
    assert!(radial_eigenvalue(&p, 0).is_err());
}

#[test]
fn squares_of_bessel_zeros() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let mu1 = radial_eigenvalue(&params, 1).unwrap().value;
    let mu2 = radial_eigenvalue(&params, 2).unwrap().value;
    assert!((mu1 - 5.78319).abs() < 1e-4);
    assert!((mu2 - 30.4713).abs() < 1e-3);
}

#[test]
fn second_eigenfunction_changes_sign_at_zero_ratio() {
    let params = Params::<f64>::new(2.0, 2).unwrap();
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let prof = radial_eigenfunction(&params, 2, &grid).unwrap();
    assert_eq!(prof.interior_sign_changes(), 1);
    let idx = prof.values.iter().position(|v| *v < 0.0).unwrap();
    assert!((grid[idx] - 0.43565).abs() < 1.5e-3);
}

#[test]
fn first_eigenfunction_is_positive() {
    for p in [1.5, 2.0, 3.0, 7.0] {
        let params = Params::<f64>::new(p, 2).unwrap();
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let prof = radial_eigenfunction(&params, 1, &grid).unwrap();
        assert!(prof.values[..200].iter().all(|v| *v > 0.0), "p = {p}");
        assert_eq!(prof.values[200], 0.0);
    }
}

#[test]
fn p3_second_eigenfunction_has_one_interior_zero() {
    let params = Params::<f64>::new(3.0, 2).unwrap();
    let grid: Vec<f64> = (0..=500).map(|i| i as f64 / 500.0).collect();
    let prof = radial_eigenfunction(&params, 2, &grid).unwrap();
    assert_eq!(prof.interior_sign_changes(), 1);
}

#[test]
fn single_precision_instantiation() {
    let params = Params::<f32>::new(2.0, 2).unwrap();
    let sol = solve_cauchy(&params, 3.0, 1e-6).unwrap();
    assert!((sol.zeros[0] - 2.40483).abs() < 1e-3);
}

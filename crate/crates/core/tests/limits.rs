use std::collections::BTreeSet;

use pspectra::limits::*;

#[test]
fn mu_limit_values() {
    assert_eq!(mu_limits(2).unwrap(), (4, 3));
    assert_eq!(mu_limits(1).unwrap(), (2, 1));
    assert_eq!(mu_limits(5).unwrap(), (10, 9));
    assert!(mu_limits(0).is_err());
}

#[test]
fn tau_limit_values() {
    let (a, b) = tau_limits(1.0f64).unwrap();
    assert!((a - 3.15429).abs() < 1e-5 && (b - 2.0).abs() < 1e-14);
    let (a, b) = tau_limits(2.0f64).unwrap();
    assert!((a - 4.32715).abs() < 1e-5 && (b - 2.41421).abs() < 1e-5);
    let (a, b) = tau_limits(3.0f64).unwrap();
    assert!((a - 5.39858).abs() < 1e-5 && (b - 3.0).abs() < 1e-14);
    assert!(tau_limits(0.9f64).is_err());
}

#[test]
fn tau_pinf_limit_increasing() {
    let mut prev = 0.0;
    for i in 0..=490 {
        let v = tau_limits::<f64>(1.0 + i as f64 * 0.1).unwrap().1;
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn niven() {
    let one: BTreeSet<_> = [(2, 3)].into_iter().collect();
    assert_eq!(niven_coincidence(100, 100).unwrap(), one);
    assert_eq!(niven_coincidence(10_000, 10_000).unwrap(), one);
    assert!(niven_coincidence(1, 100).unwrap().is_empty());
    assert_eq!((std::f64::consts::PI / 6.0).sin(), 0.49999999999999994);
    assert!(niven_coincidence(10_001, 1).is_err());
}

#[test]
fn nk_table() {
    let table = [5, 8, 11, 14, 17, 20, 24, 27, 30, 33, 36, 39, 42, 46];
    for (i, want) in table.iter().enumerate() {
        assert_eq!(nk_index(i + 3).unwrap(), *want);
    }
    assert!(nk_index(2).is_err());
}

#[test]
fn sine_inequality() {
    assert!(theorem4_sine_inequality(5).unwrap());
    assert!(theorem4_sine_inequality(100).unwrap());
    for n in 1..=1000 {
        assert!(theorem4_sine_inequality(n).unwrap(), "n={n}");
    }
    assert!(theorem4_sine_inequality(0).is_err());
}

#[test]
fn certificates() {
    let c = crossing_certificate(3, 5).unwrap();
    assert_eq!((c.sign_at_p2, c.sign_at_inf), (-1, 1));
    assert_eq!(c.conclusion, Conclusion::CrossingAbove2);
    assert_eq!(c.bracket, Some((2.0, None)));

    let c = crossing_certificate(2, 2).unwrap();
    assert_eq!((c.sign_at_p1, c.sign_at_p2), (-1, 1));
    assert_eq!(c.conclusion, Conclusion::CrossingBelow2);
    assert_eq!(c.bracket, Some((1.0, Some(2.0))));

    let c = crossing_certificate(2, 3).unwrap();
    assert_eq!(c.sign_at_inf, 0);

    for k in 3..=16 {
        let c = crossing_certificate(k, nk_index(k).unwrap()).unwrap();
        assert_eq!((c.sign_at_p2, c.sign_at_inf), (-1, 1), "k={k}");
        let route = if k >= 6 { Route::Bounds } else { Route::Direct };
        assert_eq!(c.route, route, "k={k}");
    }
    // Below the bound range, or where the bounds say nothing, the zeros decide.
    let c = crossing_certificate(20, 14).unwrap();
    assert_eq!(c.route, Route::Direct);
    assert_eq!(c.sign_at_p2, 1);
    for k in [25, 60, 200] {
        let c = crossing_certificate(k, nk_index(k).unwrap()).unwrap();
        assert_eq!(c.route, Route::Bounds);
        assert_eq!((c.sign_at_p2, c.sign_at_inf), (-1, 1), "k={k}");
    }
}

#[test]
fn radial_roots_approach_their_limits_from_above() {
    use pspectra::radial::{radial_eigenvalues, Params};
    let roots = |p: f64| -> Vec<f64> {
        radial_eigenvalues(&Params::planar(p).unwrap(), 3)
            .unwrap()
            .iter()
            .map(|v| v.powf(1.0 / p))
            .collect()
    };
    let (a, b) = (roots(20.0), roots(40.0));
    for k in 1..=3 {
        let lim = mu_limits(k).unwrap().1 as f64;
        assert!(
            b[k - 1] > lim && b[k - 1] < a[k - 1],
            "k={k}: {} {}",
            a[k - 1],
            b[k - 1]
        );
        // Slow convergence: still more than 5% away at p = 40.
        assert!(b[k - 1] < 1.2 * lim);
    }
}

#[test]
fn half_disk_root_decreases_toward_two() {
    use pspectra::fem::first_eigen_sector;
    use pspectra::geometry::SectorSpec;
    let spec = SectorSpec::<f64>::new(1.0).unwrap();
    let r: Vec<f64> = [4.0f64, 10.0]
        .iter()
        .map(|&p| {
            first_eigen_sector(p, spec, 0.08)
                .unwrap()
                .0
                .value
                .powf(1.0 / p)
        })
        .collect();
    let lim = tau_limits(1.0).unwrap().1;
    assert!(r[1] < r[0] && r[1] > lim, "{r:?}");
}

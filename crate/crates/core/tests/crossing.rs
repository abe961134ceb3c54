use std::sync::Arc;

use pspectra::bessel::bessel_zero;
use pspectra::crossing::*;
use pspectra::error::{Error, Result};
use pspectra::estimate::{EigenEstimate, Method};

fn exact(v: f64, tol: f64) -> Result<EigenEstimate<f64>> {
    Ok(EigenEstimate::new(v, Method::LimitFormula, tol, 0))
}

#[test]
fn linear_curves_cross_at_three() {
    let r = find_crossing(
        &mut |p: f64| exact(2.0 * p - 1.0, 1e-3),
        &mut |p: f64| exact(0.5 * p + 3.5, 1e-3),
        1.0,
        10.0,
        1e-6,
    )
    .unwrap();
    assert!((r.p_star - 3.0).abs() <= 1e-6);
    assert!(r.bracket.0 <= 3.0 && 3.0 <= r.bracket.1);
    assert!(r.bracket.1 - r.bracket.0 <= 1e-6);
    assert_eq!(r.signs, (-1, 1));
    assert!(r.residual_within_tolerance());
    assert_eq!(r.evaluations, r.history.len());
}

#[test]
fn bisection_does_not_need_monotone_curves() {
    // f − g = sin(3p) on [0.5, 1.5] changes sign once, at π/3, but is not monotone.
    let r = find_crossing(
        &mut |p: f64| exact((3.0 * p).sin(), 1e-6),
        &mut |_| exact(0.0, 0.0),
        0.5,
        1.5,
        1e-9,
    )
    .unwrap();
    assert!((r.p_star - std::f64::consts::FRAC_PI_3).abs() < 1e-9);
}

#[test]
fn identical_curves_are_rejected() {
    let e = find_crossing(
        &mut |p: f64| exact(p * p, 0.0),
        &mut |p: f64| exact(p * p, 0.0),
        1.0,
        2.0,
        1e-3,
    );
    assert!(matches!(e, Err(Error::InvalidArgument(_))));
    let e = find_crossing(
        &mut |p: f64| exact(p, 0.0),
        &mut |_| exact(-1.0, 0.0),
        1.0,
        2.0,
        1e-3,
    );
    assert!(matches!(e, Err(Error::InvalidArgument(_))));
    let e = find_crossing(
        &mut |p: f64| exact(p, 0.0),
        &mut |_| exact(1.5, 0.0),
        2.0,
        1.0,
        1e-3,
    );
    assert!(matches!(e, Err(Error::InvalidArgument(_))));
}

#[test]
fn failure_mid_run_keeps_the_bracket() {
    let mut calls = 0;
    let e = find_crossing(
        &mut |p: f64| {
            calls += 1;
            if calls > 4 {
                Err(Error::Resource("budget".into()))
            } else {
                exact(p, 0.0)
            }
        },
        &mut |_| exact(1.3, 0.0),
        1.0,
        2.0,
        1e-6,
    )
    .unwrap_err();
    match e {
        Error::PartialBracket { lo, hi, source } => {
            assert!(
                lo <= 1.3 && 1.3 <= hi && hi - lo <= 0.25 + 1e-12,
                "[{lo}, {hi}]"
            );
            assert_eq!(*source, Error::Resource("budget".into()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn endpoint_root_is_returned() {
    let r = find_crossing(
        &mut |p: f64| exact(p - 1.0, 0.0),
        &mut |_| exact(0.0, 0.0),
        1.0,
        2.0,
        1e-3,
    )
    .unwrap();
    assert_eq!(r.p_star, 1.0);
}

#[test]
fn cache_reuses_solutions() {
    let cache = TauCache::<f64>::default();
    assert!(cache.is_empty());
    let a = cache.solve(2.5, 2.0, 0.1).unwrap();
    let b = cache.solve(2.5, 2.0, 0.1).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    let c = cache.solve(3.0, 2.0, 0.1).unwrap();
    assert!(c.estimate.value > a.estimate.value);
    assert_eq!(cache.len(), 2);
    let t = cache.tau(2.5, 2.0, 0.1).unwrap();
    assert_eq!(t.value, a.estimate.value);
    assert!(t.tol > 0.0);
    assert_eq!(cache.len(), 3);
}

#[test]
fn theorem4_base_values_for_k4() {
    let cache = TauCache::<f64>::default();
    let r = theorem4_crossing(&cache, 4, 0.04, 1e-2).unwrap();
    assert_eq!(r.n, 8);
    assert_eq!(
        (r.certificate.sign_at_p2, r.certificate.sign_at_inf),
        (-1, 1)
    );
    let (p, mu, tau) = r.scan[0];
    assert_eq!(p, 2.0);
    let a04 = bessel_zero::<f64>(0, 4).unwrap().alpha;
    let a81 = bessel_zero::<f64>(8, 1).unwrap().alpha;
    assert!((mu / (a04 * a04) - 1.0).abs() < 1e-6, "{mu}");
    assert!((tau / (a81 * a81) - 1.0).abs() < 0.02, "{tau}");
    assert!(mu < tau);
    let c = r.crossing.expect("sign change in the solvable range");
    assert!(c.p_star > 2.0 && c.p_star < 30.0);
    assert!(c.residual_within_tolerance());
}

#[test]
fn theorem4_range() {
    let cache = TauCache::<f64>::default();
    assert!(theorem4_crossing(&cache, 2, 0.05, 1e-2).is_err());
    assert!(theorem4_crossing(&cache, 5, 0.05, 1e-2).is_err());
    let r = theorem4_crossing(&cache, 3, 0.05, 1e-2).unwrap();
    assert_eq!(r.n, 5);
    assert!(r.base.direct_holds);
    let c = r.crossing.unwrap();
    assert!(c.bracket.0 >= 2.0 && c.signs == (-1, 1));
}

#[test]
fn multiplicity_three_point_on_coarse_meshes() {
    let cache = TauCache::<f64>::default();
    let opts = Mult3Options {
        tol: 1e-2,
        h: (0.1, 0.05),
        ..Mult3Options::default()
    };
    let r = corollary_mult3(&cache, &opts).unwrap();
    for c in [&r.coarse, &r.fine] {
        assert_eq!(c.signs, (-1, 1));
        assert!(c.p_star > 1.2 && c.p_star < 2.0);
        assert!(c.residual_within_tolerance());
    }
    assert!(r.mesh_delta <= 0.05, "{}", r.mesh_delta);
    let (_, mu, tau) = r.probe;
    assert!(mu < tau);
    let json = serde_json::to_value(&r).unwrap();
    assert!(json["fine"]["p_star"].is_number());
}

use std::sync::Arc;

use proptest::prelude::*;

use pspectra::bessel::bessel_zero;
use pspectra::crossing::find_crossing;
use pspectra::estimate::{EigenEstimate, Method};
use pspectra::fem::{mesh_sector, p_rayleigh, ScalarField};
use pspectra::geometry::{
    inner_parallel_area, pack_constrained, sector_cheeger, sector_inradius, SectorSpec, SplitKind,
};
use pspectra::limits::{nk_index, tau_limits, theorem4_sine_inequality};
use pspectra::radial::{radial_eigenvalues, Params};
use pspectra::shell::first_eigen_ball;
use pspectra::sweep::parse_grid;

fn small_mesh() -> Arc<pspectra::SectorMesh> {
    mesh_sector(SectorSpec::new(2.0).unwrap(), 0.15).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cheeger_grows_as_the_sector_narrows(a in 1.0f64..20.0, d in 0.05f64..5.0) {
        let h1 = sector_cheeger(SectorSpec::new(a).unwrap()).h;
        let h2 = sector_cheeger(SectorSpec::new(a + d).unwrap()).h;
        prop_assert!(h1 < h2);
    }

    #[test]
    fn cheeger_below_the_whole_sector_ratio(k in 1.0f64..30.0) {
        let spec = SectorSpec::new(k).unwrap();
        let c = sector_cheeger(spec);
        prop_assert!(c.h <= spec.perimeter() / spec.area());
        let gap = inner_parallel_area(spec, c.radius).unwrap() - std::f64::consts::PI * c.radius * c.radius;
        prop_assert!(gap.abs() <= 1e-10);
    }

    #[test]
    fn parallel_area_shrinks(k in 1.0f64..10.0, s in 0.0f64..0.98, t in 0.0f64..0.98) {
        let spec = SectorSpec::new(k).unwrap();
        let r = sector_inradius(spec);
        let (lo, hi) = (s.min(t) * r, s.max(t) * r);
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(inner_parallel_area(spec, lo).unwrap() > inner_parallel_area(spec, hi).unwrap());
    }

    #[test]
    fn pinf_sector_limit_grows(a in 1.0f64..50.0, d in 0.01f64..10.0) {
        prop_assert!(tau_limits(a).unwrap().1 < tau_limits(a + d).unwrap().1);
    }

    #[test]
    fn constrained_packings_stay_below_the_inradius(k in 1.0f64..12.0) {
        let spec = SectorSpec::new(k).unwrap();
        for split in [SplitKind::Concentric, SplitKind::Bisector] {
            let r = pack_constrained(spec, split);
            prop_assert!(r.radius > 0.0 && r.radius < sector_inradius(spec));
            prop_assert!(r.min_slack(spec) >= -1e-10);
        }
    }

    #[test]
    fn crossing_of_random_lines(a in -5.0f64..5.0, b in -5.0f64..5.0, root in 1.1f64..9.9) {
        prop_assume!((a - b).abs() > 0.1);
        let f = move |p: f64| Ok(EigenEstimate::new(a * (p - root), Method::LimitFormula, 1e-9, 0));
        let g = move |p: f64| Ok(EigenEstimate::new(b * (p - root), Method::LimitFormula, 1e-9, 0));
        let r = find_crossing(&mut { f }, &mut { g }, 1.0, 10.0, 1e-8).unwrap();
        prop_assert!(r.bracket.0 <= root + 1e-12 && root <= r.bracket.1 + 1e-12);
        prop_assert!((r.p_star - root).abs() <= 1e-8);
    }

    #[test]
    fn bessel_zeros_interlace(n in 0usize..40, k in 1usize..15) {
        let a = bessel_zero::<f64>(n, k).unwrap().alpha;
        let b = bessel_zero::<f64>(n + 1, k).unwrap().alpha;
        let c = bessel_zero::<f64>(n, k + 1).unwrap().alpha;
        prop_assert!(a < b && b < c);
    }

    #[test]
    fn nk_index_steps_by_three_or_four(k in 3usize..500) {
        let d = nk_index(k + 1).unwrap() - nk_index(k).unwrap();
        prop_assert!(d == 3 || d == 4);
        prop_assert!(theorem4_sine_inequality(nk_index(k).unwrap()).unwrap());
    }

    #[test]
    fn grids_have_the_requested_ends(lo in 1.1f64..10.0, w in 0.1f64..10.0, n in 2usize..50) {
        let g = parse_grid(&format!("{lo}:{}:{n}", lo + w)).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], lo);
        prop_assert!((g[n - 1] - (lo + w)).abs() < 1e-12);
        prop_assert!(g.windows(2).all(|x| x[0] < x[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn radial_spectrum_increases(p in 1.2f64..20.0, dim in 2usize..4) {
        let mu = radial_eigenvalues(&Params::new(p, dim).unwrap(), 4).unwrap();
        prop_assert!(mu.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ball_eigenvalue_scales(p in 1.2f64..10.0, r in 0.1f64..1.0) {
        let params = Params::planar(p).unwrap();
        let whole = first_eigen_ball(&params, 1.0).unwrap().value;
        let part = first_eigen_ball(&params, r).unwrap().value;
        prop_assert!((part * r.powf(p) / whole - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant(
        p in 1.2f64..8.0,
        c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        a in -3.0f64..3.0,
        b in 0.5f64..4.0,
    ) {
        let u = ScalarField::from_fn(small_mesh(), |x| (1.0 - x[0] * x[0] - x[1] * x[1]) * (1.0 + a * x[0] + b * x[1] * x[1]));
        prop_assume!(u.values.iter().any(|v| *v != 0.0));
        let v = ScalarField::new(u.mesh.clone(), u.values.iter().map(|t| c * t).collect()).unwrap();
        let (ru, rv) = (p_rayleigh(&u, p).unwrap(), p_rayleigh(&v, p).unwrap());
        prop_assert!(ru > 0.0);
        prop_assert!((ru / rv - 1.0).abs() < 1e-10);
    }
}

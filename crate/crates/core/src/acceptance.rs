//! End-to-end checks of the computed constants, crossings and nodal sets.
//!
//! Each criterion runs at its stated tolerance and time budget and reports
//! a single pass or fail with the numbers behind it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::bessel::bessel_zero;
use crate::crossing::{corollary_mult3, Mult3Options, TauCache};
use crate::error::{invalid, Result};
use crate::fem::{
    assemble_disk_eigenfunction, classify_nodal, count_nodal_domains, default_nodal_tol,
    first_eigen_sector, linear_eigenpairs, mesh_sector, nodal_curve, second_eigen_on, FemOptions,
    NodalTag,
};
use crate::geometry::{
    pack_constrained, pack_two_disks_sector, sector_cheeger, SectorSpec, SplitKind,
};
use crate::limits::{crossing_certificate, niven_coincidence, nk_index, tau_limits, Route};
use crate::radial::{radial_eigenvalue, radial_eigenvalues, Params};
use crate::shell::{first_eigen_ball, partition_minmax};
use crate::sweep::fig3_sweep;

/// Number of criteria.
pub const CRITERIA: usize = 13;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Wall-clock budget in seconds.
    pub budget: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8.2}s / {:<6} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget,
            self.detail
        )
    }
}

const NAMES: [(&str, f64); CRITERIA] = [
    ("cheeger limits", 0.1),
    ("p to infinity limits", 0.1),
    ("bessel zeros", 0.1),
    ("packing constants", 5.0),
    ("triple agreement at p=2", 10.0),
    ("radial trends in p", 30.0),
    ("niven coincidence", 1.0),
    ("n(k) table", 0.1),
    ("fem at p=2", 120.0),
    ("multiplicity-three crossing", 600.0),
    ("crossing certificates", 5.0),
    ("nodal set of second mode", 900.0),
    ("ordering invariants", 600.0),
];

/// Collects sub-check outcomes and their description.
#[derive(Default)]
struct Checks {
    ok: bool,
    detail: String,
    started: bool,
}

impl Checks {
    fn new() -> Self {
        Self {
            ok: true,
            ..Self::default()
        }
    }

    fn check(&mut self, ok: bool, msg: impl AsRef<str>) {
        if self.started {
            self.detail.push_str("; ");
        }
        self.started = true;
        if !ok {
            self.detail.push_str("FAILED ");
        }
        self.detail.push_str(msg.as_ref());
        self.ok &= ok;
    }
}

/// Runs criterion `id` (1-based). `threads` is the worker count for the
/// parameter sweep.
pub fn run_criterion(id: usize, threads: usize) -> Result<CriterionResult> {
    if id == 0 || id > CRITERIA {
        return invalid(format!("criterion {id} outside 1..={CRITERIA}"));
    }
    let (name, budget) = NAMES[id - 1];
    let start = Instant::now();
    let mut c = Checks::new();
    let outcome = match id {
        1 => cheeger(&mut c),
        2 => pinf_limits(&mut c),
        3 => zeros(&mut c),
        4 => packing(&mut c),
        5 => triple(&mut c),
        6 => trends(&mut c),
        7 => niven(&mut c),
        8 => nk_table(&mut c),
        9 => fem_p2(&mut c),
        10 => mult3(&mut c),
        11 => certificates(&mut c),
        12 => nodal(&mut c),
        _ => ordering(&mut c, threads),
    };
    if let Err(e) = outcome {
        c.check(false, format!("error: {e}"));
    }
    let seconds = start.elapsed().as_secs_f64();
    c.check(seconds <= budget, format!("time {seconds:.2}s"));
    Ok(CriterionResult {
        id,
        name,
        passed: c.ok,
        detail: c.detail,
        seconds,
        budget,
    })
}

/// Runs every criterion in order.
pub fn run_all(threads: usize) -> Vec<CriterionResult> {
    (1..=CRITERIA)
        .map(|id| run_criterion(id, threads).expect("id in range"))
        .collect()
}

fn near(c: &mut Checks, label: &str, got: f64, want: f64, tol: f64) {
    c.check(
        (got - want).abs() <= tol,
        format!("{label} {got:.6} vs {want}"),
    );
}

fn cheeger(c: &mut Checks) -> Result<()> {
    for (k, want) in [(1.0, 3.15429), (2.0, 4.32715), (3.0, 5.39858)] {
        let h = sector_cheeger(SectorSpec::new(k)?).h;
        near(c, &format!("h(k={k})"), h, want, 1e-4);
    }
    Ok(())
}

fn pinf_limits(c: &mut Checks) -> Result<()> {
    for (k, want) in [(1.0, 2.0), (2.0, 2.41421), (3.0, 3.0)] {
        near(c, &format!("k={k}"), tau_limits(k)?.1, want, 1e-5);
    }
    Ok(())
}

fn zeros(c: &mut Checks) -> Result<()> {
    let table = [
        (0, 3, 8.65372),
        (5, 1, 8.77148),
        (0, 4, 11.79153),
        (8, 1, 12.22509),
        (0, 5, 14.93091),
        (11, 1, 15.58984),
        (14, 1, 18.89999),
    ];
    for (n, k, want) in table {
        near(
            c,
            &format!("a({n},{k})"),
            bessel_zero::<f64>(n, k)?.alpha,
            want,
            1e-4,
        );
    }
    Ok(())
}

fn packing(c: &mut Checks) -> Result<()> {
    let spec = SectorSpec::new(4.0)?;
    near(
        c,
        "free",
        pack_two_disks_sector(spec)?.radius,
        0.18096,
        1e-4,
    );
    let conc = pack_constrained(spec, SplitKind::Concentric).radius;
    near(c, "concentric", conc, 0.17815, 1e-4);
    let s = (std::f64::consts::PI / 8.0).sin();
    let closed = s / (1.0 + 3.0 * s);
    c.check(
        (conc - closed).abs() <= 1e-10,
        format!("closed form gap {:.1e}", (conc - closed).abs()),
    );
    near(
        c,
        "bisector",
        pack_constrained(spec, SplitKind::Bisector).radius,
        0.16324,
        1e-4,
    );
    Ok(())
}

fn triple(c: &mut Checks) -> Result<()> {
    let params = Params::planar(2.0)?;
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let shoot = radial_eigenvalue(&params, k)?.value;
        let part = if k == 1 {
            first_eigen_ball(&params, 1.0)?.value
        } else {
            partition_minmax(&params, k)?.0.value
        };
        let a = bessel_zero::<f64>(0, k)?.alpha;
        let bessel = a * a;
        for (x, y) in [(shoot, part), (shoot, bessel), (part, bessel)] {
            worst = worst.max((x - y).abs() / y);
        }
    }
    c.check(worst <= 1e-4, format!("largest relative gap {worst:.2e}"));
    Ok(())
}

fn trends(c: &mut Checks) -> Result<()> {
    let mu2 = |p: f64| -> Result<f64> { Ok(radial_eigenvalue(&Params::planar(p)?, 2)?.value) };
    let low: Vec<f64> = [1.3, 1.2, 1.1]
        .iter()
        .map(|&p| mu2(p))
        .collect::<Result<_>>()?;
    c.check(
        low[0] > low[1] && low[1] > low[2] && low[2] > 4.0,
        format!(
            "mu2 at 1.3, 1.2, 1.1 = {:.4}, {:.4}, {:.4} decreasing to 4",
            low[0], low[1], low[2]
        ),
    );
    let rel = (low[2] - 4.0) / 4.0;
    c.check(
        rel <= 0.12,
        format!("mu2(1.1) off 4 by {:.1}% (limit 12%)", 100.0 * rel),
    );
    let high: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&p| mu2(p).map(|v| v.powf(1.0 / p)))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = high.iter().map(|v| (v - 3.0).abs()).collect();
    c.check(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        format!(
            "roots at 10, 20, 40 = {:.4}, {:.4}, {:.4} approaching 3",
            high[0], high[1], high[2]
        ),
    );
    let rel = gaps[2] / 3.0;
    c.check(
        rel <= 0.05,
        format!("root at 40 off 3 by {:.1}% (limit 5%)", 100.0 * rel),
    );
    Ok(())
}

fn niven(c: &mut Checks) -> Result<()> {
    let got = niven_coincidence(1000, 1000)?;
    c.check(got == BTreeSet::from([(2, 3)]), format!("pairs {got:?}"));
    Ok(())
}

fn nk_table(c: &mut Checks) -> Result<()> {
    let want = [5, 8, 11, 14, 17, 20, 24, 27, 30, 33, 36, 39, 42, 46];
    let got: Vec<usize> = (3..=16).map(nk_index).collect::<Result<_>>()?;
    c.check(got == want, format!("{got:?}"));
    Ok(())
}

fn fem_p2(c: &mut Checks) -> Result<()> {
    for k in 1..=4 {
        let (est, _) = first_eigen_sector(2.0, SectorSpec::new(k as f64)?, 0.02)?;
        let a = bessel_zero::<f64>(k, 1)?.alpha;
        let rel = (est.value - a * a) / (a * a);
        c.check(
            rel.abs() <= 0.02,
            format!(
                "tau{k}(2) {:.4} vs {:.4} ({:+.3}%)",
                est.value,
                a * a,
                100.0 * rel
            ),
        );
    }
    Ok(())
}

fn mult3(c: &mut Checks) -> Result<()> {
    let cache = TauCache::<f64>::default();
    let opts = Mult3Options::default();
    let r = corollary_mult3(&cache, &opts)?;
    let f = &r.fine;
    c.check(
        f.p_star > 1.0 && f.p_star < 2.0,
        format!(
            "p2 = {:.5} in ({:.5}, {:.5})",
            f.p_star, f.bracket.0, f.bracket.1
        ),
    );
    c.check(
        f.signs == (-1, 1),
        format!("signs at {} and {}: {:?}", opts.lo, opts.hi, f.signs),
    );
    c.check(
        r.coarse.signs == (-1, 1),
        format!("coarse signs {:?}", r.coarse.signs),
    );
    c.check(
        f.residual_within_tolerance(),
        format!("residual {:.2e} within {:.2e}", f.residual, f.tolerance),
    );
    c.check(
        r.mesh_delta <= 0.05,
        format!("mesh delta {:.4}", r.mesh_delta),
    );
    Ok(())
}

fn certificates(c: &mut Checks) -> Result<()> {
    let mut bad = Vec::new();
    for k in 3..=16 {
        let cert = crossing_certificate(k, nk_index(k)?)?;
        let route = if k >= 6 { Route::Bounds } else { Route::Direct };
        if cert.sign_at_p2 != -1 || cert.sign_at_inf != 1 || cert.route != route {
            bad.push(k);
        }
    }
    c.check(bad.is_empty(), format!("k = 3..=16, mismatches {bad:?}"));
    Ok(())
}

fn nodal(c: &mut Checks) -> Result<()> {
    let h = 0.02;
    let tol = default_nodal_tol(h);
    let mesh = mesh_sector(SectorSpec::new(4.0)?, h)?;
    let opts = FemOptions::default();

    let hi = second_eigen_on(15.0, mesh.clone(), &opts)?;
    let cls = classify_nodal(&nodal_curve(&hi.solution.field)?, mesh.spec, tol)?;
    c.check(
        cls.tag == NodalTag::Other && cls.radial_residual > tol && cls.arc_residual > tol,
        format!(
            "p=15 {:?}, radial {:.4}, arc {:.4}, 2h {tol}",
            cls.tag, cls.radial_residual, cls.arc_residual
        ),
    );
    let domains = count_nodal_domains(&assemble_disk_eigenfunction(&hi.solution.field)?);
    c.check(
        domains == 16,
        format!("{domains} nodal domains on the disk"),
    );

    let lin = linear_eigenpairs(mesh.clone(), 2)?;
    let oracle = classify_nodal(&nodal_curve(&lin[1].1)?, mesh.spec, tol)?;
    let two = second_eigen_on(2.0, mesh.clone(), &opts)?;
    let got = classify_nodal(&nodal_curve(&two.solution.field)?, mesh.spec, tol)?;
    c.check(
        got.tag == oracle.tag && got.tag != NodalTag::Other,
        format!("p=2 {:?} vs linear {:?}", got.tag, oracle.tag),
    );
    Ok(())
}

fn ordering(c: &mut Checks, threads: usize) -> Result<()> {
    let grid = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
    let rows = fig3_sweep(&grid, 0.05, threads)?;
    let bad: Vec<f64> = rows
        .iter()
        .filter(|r| !r.sector_order_holds())
        .map(|r| r.p)
        .collect();
    c.check(
        bad.is_empty(),
        format!("sector order at {} p values, broken at {bad:?}", rows.len()),
    );

    let mut bad = String::new();
    for p in [1.2, 2.0, 5.0, 12.0] {
        let mu = radial_eigenvalues(&Params::planar(p)?, 5)?;
        if !mu.windows(2).all(|w| w[0] < w[1]) {
            let _ = write!(bad, " p={p}");
        }
    }
    c.check(bad.is_empty(), format!("mu_k increasing in k{bad}"));

    let mut broken = 0;
    for n in 0..20 {
        for k in 1..10 {
            let a = bessel_zero::<f64>(n, k)?.alpha;
            let b = bessel_zero::<f64>(n + 1, k)?.alpha;
            let a2 = bessel_zero::<f64>(n, k + 1)?.alpha;
            if !(a < b && b < a2) {
                broken += 1;
            }
        }
    }
    c.check(
        broken == 0,
        format!("bessel interlacing, {broken} violations"),
    );
    Ok(())
}

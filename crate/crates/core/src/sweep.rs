//! The `p`-sweep of the lowest disk eigenvalues raised to `1/p`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fem::{first_eigen_on, mesh_sector, FemOptions, WarmStart, FEM_P_RANGE};
use crate::geometry::SectorSpec;
use crate::radial::{radial_eigenvalues, Params};
use crate::scalar::Real;

/// One row of the sweep; every entry is an eigenvalue to the power `1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row<T> {
    pub p: T,
    /// `τ_1`: two nodal domains split by a diameter.
    pub lambda_ominus: T,
    /// `τ_2`: four sectors.
    pub lambda_oplus: T,
    /// `μ_2`: disk and annulus.
    pub lambda_ocirc: T,
    /// `τ_3`: six sectors.
    pub lambda_oast: T,
    pub mu1: T,
}

/// Grid points per continuation run.
const RUN: usize = 4;

/// Column names of the CSV form, in row order.
pub const FIG3_COLUMNS: [&str; 6] = [
    "p",
    "lambda_ominus",
    "lambda_oplus",
    "lambda_ocirc",
    "lambda_oast",
    "mu1",
];

impl<T: Real> Fig3Row<T> {
    pub fn values(&self) -> [T; 6] {
        [
            self.p,
            self.lambda_ominus,
            self.lambda_oplus,
            self.lambda_ocirc,
            self.lambda_oast,
            self.mu1,
        ]
    }

    /// `λ_⊖ < λ_⊕ < λ_⊛`.
    pub fn sector_order_holds(&self) -> bool {
        self.lambda_ominus < self.lambda_oplus && self.lambda_oplus < self.lambda_oast
    }
}

/// `n` equally spaced points from `lo` to `hi`, parsed from `lo:hi:n`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return invalid(format!("grid must look like lo:hi:n, got {spec:?}"));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("{s:?}: {e}")))
    };
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("{:?}: {e}", parts[2])))?;
    if n == 0 || !(lo <= hi) || (n == 1 && lo != hi) {
        return invalid(format!("bad grid {spec:?}"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// Computes the sweep on `grid` with sector meshes of size `h`, spread over
/// `threads` workers. Rows come back sorted by `p`.
pub fn fig3_sweep<T: Real>(grid: &[T], h: T, threads: usize) -> Result<Vec<Fig3Row<T>>> {
    if grid.is_empty() {
        return invalid("empty p grid");
    }
    let mut ps: Vec<T> = grid.to_vec();
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ps.dedup();
    for &p in &ps {
        if !(p >= T::lit(FEM_P_RANGE.0)) || !(p <= T::lit(FEM_P_RANGE.1)) {
            return invalid(format!(
                "p = {p} outside [{}, {}]",
                FEM_P_RANGE.0, FEM_P_RANGE.1
            ));
        }
    }
    let threads = threads.max(1);
    // Jobs: each sector family over a run of at most RUN grid points,
    // continued in p from one point to the next. The split does not depend
    // on the thread count, so neither do the results.
    let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
    for k in 1..=3 {
        for a in (0..ps.len()).step_by(RUN) {
            jobs.push((k, a, (a + RUN).min(ps.len())));
        }
    }
    let meshes = (1..=3)
        .map(|k| mesh_sector(SectorSpec::new(T::from_usize_lossy(k))?, h))
        .collect::<Result<Vec<_>>>()?;
    let tau: Mutex<Vec<Vec<Option<T>>>> = Mutex::new(vec![vec![None; ps.len()]; 3]);
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let next = AtomicUsize::new(0);
    let opts = FemOptions::default();
    std::thread::scope(|s| {
        for _ in 0..threads.min(jobs.len()) {
            s.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(k, a, b)) = jobs.get(j) else { break };
                let mut warm: Option<WarmStart<T>> = None;
                for i in a..b {
                    let w = warm
                        .as_ref()
                        .filter(|w| (w.p - ps[i]).abs() < (ps[i] - T::lit(2.0)).abs());
                    match first_eigen_on(ps[i], meshes[k - 1].clone(), &opts, w) {
                        Ok(sol) => {
                            if let Ok(mut t) = tau.lock() {
                                t[k - 1][i] = Some(sol.estimate.value);
                            }
                            warm = Some(WarmStart {
                                p: ps[i],
                                field: sol.field,
                            });
                        }
                        Err(e) => {
                            if let Ok(mut f) = failure.lock() {
                                f.get_or_insert(e);
                            }
                            return;
                        }
                    }
                }
            });
        }
    });
    if let Some(e) = failure
        .into_inner()
        .map_err(|_| Error::Internal("worker panicked".into()))?
    {
        return Err(e);
    }
    let tau = tau
        .into_inner()
        .map_err(|_| Error::Internal("worker panicked".into()))?;
    let mut rows = Vec::with_capacity(ps.len());
    for (i, &p) in ps.iter().enumerate() {
        let mu = radial_eigenvalues(&Params::new(p, 2)?, 2)?;
        let get = |k: usize| {
            tau[k][i].ok_or_else(|| Error::Internal(format!("missing τ_{} at p = {p}", k + 1)))
        };
        let root = |v: T| v.powf(T::one() / p);
        rows.push(Fig3Row {
            p,
            lambda_ominus: root(get(0)?),
            lambda_oplus: root(get(1)?),
            lambda_ocirc: root(mu[1]),
            lambda_oast: root(get(2)?),
            mu1: root(mu[0]),
        });
    }
    Ok(rows)
}

/// CSV with a header row.
pub fn fig3_csv<T: Real>(rows: &[Fig3Row<T>]) -> String {
    let mut out = FIG3_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r
            .values()
            .iter()
            .map(|v| format!("{:.5e}", v.to_f64_lossy()))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Minimal SVG line plot of the five curves against `p`.
pub fn fig3_svg<T: Real>(rows: &[Fig3Row<T>]) -> String {
    let (w, h, m) = (640.0, 420.0, 50.0);
    let data: Vec<[f64; 6]> = rows
        .iter()
        .map(|r| r.values().map(|v| v.to_f64_lossy()))
        .collect();
    let xs = || data.iter().map(|d| d[0]);
    let ys = || data.iter().flat_map(|d| d[1..].iter().copied());
    let (x0, x1) = (
        xs().fold(f64::INFINITY, f64::min),
        xs().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = (
        ys().fold(f64::INFINITY, f64::min).min(0.0),
        ys().fold(f64::NEG_INFINITY, f64::max),
    );
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * m);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#7f7f7f"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    s.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        b = h - m,
        r = w - m
    ));
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"{anchor}\">{x:.3}</text>\n",
            sx(x),
            h - m + 16.0
        ));
    }
    for y in [y0, y1] {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">{y:.3}</text>\n",
            m - 4.0,
            sy(y) + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">p</text>\n",
        w / 2.0,
        h - 10.0
    ));
    for (c, name) in FIG3_COLUMNS[1..].iter().enumerate() {
        let pts: Vec<String> = data
            .iter()
            .map(|d| format!("{:.2},{:.2}", sx(d[0]), sy(d[c + 1])))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>{name}</title></polyline>\n",
            colors[c],
            pts.join(" ")
        ));
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"{}\">{name}</text>\n",
            w - m - 110.0,
            m + 14.0 * c as f64,
            colors[c]
        ));
    }
    s.push_str("</svg>\n");
    s
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pspectra::acceptance::{run_criterion, CRITERIA};
use pspectra::bessel::{bessel_zero, disk_spectrum_p2};
use pspectra::crossing::{corollary_mult3, theorem4_crossing, Mult3Options, TauCache};
use pspectra::fem::{
    assemble_disk_eigenfunction, classify_nodal, count_nodal_domains, default_nodal_tol,
    first_eigen_on, mesh_sector, nodal_curve, second_eigen_on, FemOptions,
};
use pspectra::geometry::{
    pack_constrained, pack_two_disks_sector_seeded, sector_cheeger, SectorSpec, SplitKind,
};
use pspectra::limits::{mu_limits, niven_coincidence, tau_limits};
use pspectra::radial::{radial_eigenvalues, Params};
use pspectra::shell::partition_minmax;
use pspectra::sweep::{fig3_csv, fig3_svg, fig3_sweep, parse_grid};

mod fmt;
use fmt::sig;

/// Dirichlet p-Laplacian eigenvalues on the disk, the ball and sectors.
#[derive(Parser)]
#[command(name = "pspectra", version)]
struct Cli {
    /// Directory for JSON, CSV and SVG outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the randomised optimiser starts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Radial eigenvalues μ_1..μ_k of the unit ball.
    Radial {
        #[arg(long)]
        p: f64,
        #[arg(long = "N", default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        k: usize,
    },
    /// μ_k as the min-max over partitions into k shells.
    Partition {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[arg(long = "N", default_value_t = 2)]
        dim: usize,
    },
    /// Zero α_{n,k} of J_n.
    Bessel {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Lowest distinct Dirichlet eigenvalues of the unit disk at p = 2.
    SpectrumP2 {
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Cheeger constant of the sector of aperture π/k.
    Cheeger {
        #[arg(long = "sector-k")]
        k: f64,
    },
    /// p → 1 and p → ∞ limits for k = 1..k_max and the matching pairs.
    Limits {
        #[arg(long = "k-max")]
        k_max: usize,
    },
    /// Two equal disjoint disks in the sector of aperture π/k.
    Pack {
        #[arg(long = "angle-k")]
        k: f64,
        #[arg(long, value_enum, default_value_t = Constraint::Free)]
        constraint: Constraint,
    },
    /// First or second eigenvalue of a sector by finite elements.
    SectorEigen {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, default_value_t = 0.04)]
        h: f64,
    },
    /// Shape of the nodal line of the second sector eigenfunction.
    NodalClassify {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.04)]
        h: f64,
    },
    /// Crossings of eigenvalue curves in p.
    Crossing {
        #[command(subcommand)]
        which: CrossingCmd,
    },
    /// Sweep of the lowest disk eigenvalues raised to 1/p.
    Fig3 {
        /// `lo:hi:n`.
        #[arg(long = "p-grid", default_value = "1.2:10:18")]
        grid: String,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
    },
    /// Runs the acceptance checks and prints a pass/fail table.
    Verify {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum CrossingCmd {
    /// Where μ_2 meets τ_2, below p = 2.
    Mult3 {
        #[arg(long, default_value_t = 1.2)]
        lo: f64,
        #[arg(long, default_value_t = 2.0)]
        hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long = "h-coarse", default_value_t = 0.04)]
        h_coarse: f64,
        #[arg(long = "h-fine", default_value_t = 0.02)]
        h_fine: f64,
    },
    /// Where μ_k meets τ_{n(k)}, above p = 2.
    Theorem4 {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.04)]
        h: f64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Constraint {
    Free,
    ConcentricSplit,
    BisectorSplit,
}

fn threads() -> usize {
    std::env::var("PSPECTRA_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    write(
        dir,
        &format!("{name}.json"),
        &serde_json::to_string_pretty(value)?,
    )
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_path();
    let opts = FemOptions {
        seed: cli.seed,
        ..FemOptions::default()
    };
    match cli.cmd {
        Cmd::Radial { p, dim, k } => {
            let mu = radial_eigenvalues(&Params::new(p, dim)?, k)?;
            for (i, v) in mu.iter().enumerate() {
                println!(
                    "mu_{} = {}  (1/p power {})",
                    i + 1,
                    sig(*v),
                    sig(v.powf(1.0 / p))
                );
            }
            write_json(out, "radial", &json!({ "p": p, "N": dim, "mu": mu }))?;
        }
        Cmd::Partition { p, k, dim } => {
            let (est, part) = partition_minmax(&Params::new(p, dim)?, k)?;
            println!("mu_{k} = {}", sig(est.value));
            let radii: Vec<String> = part.radii.iter().map(|r| sig(*r)).collect();
            println!("radii = {}", radii.join(", "));
            write_json(
                out,
                "partition",
                &json!({ "p": p, "N": dim, "k": k, "estimate": est, "partition": part }),
            )?;
        }
        Cmd::Bessel { n, k } => {
            let z = bessel_zero::<f64>(n, k)?;
            println!("alpha_{{{n},{k}}} = {}", sig(z.alpha));
            write_json(out, "bessel", &z)?;
        }
        Cmd::SpectrumP2 { count } => {
            let s = disk_spectrum_p2::<f64>(count)?;
            for e in &s {
                println!(
                    "{}  n={} k={} multiplicity {}",
                    sig(e.value),
                    e.n,
                    e.k,
                    e.multiplicity
                );
            }
            write_json(out, "spectrum-p2", &s)?;
        }
        Cmd::Cheeger { k } => {
            let c = sector_cheeger(SectorSpec::new(k)?);
            println!("h = {}  r = {}", sig(c.h), sig(c.radius));
            write_json(
                out,
                "cheeger",
                &json!({ "k": k, "h": c.h, "radius": c.radius }),
            )?;
        }
        Cmd::Limits { k_max } => {
            println!("k  mu(p->1)  mu^(1/p)(p->inf)  tau(p->1)  tau^(1/p)(p->inf)");
            let mut rows = Vec::new();
            for k in 1..=k_max {
                let (m1, minf) = mu_limits(k)?;
                let (t1, tinf) = tau_limits(k as f64)?;
                println!("{k}  {m1}  {minf}  {}  {}", sig(t1), sig(tinf));
                rows.push(json!({ "k": k, "mu": [m1, minf], "tau": [t1, tinf] }));
            }
            let pairs = niven_coincidence(k_max.min(10_000), 1000)?;
            println!("coinciding limits (k, n): {pairs:?}");
            write_json(
                out,
                "limits",
                &json!({ "rows": rows, "coincidences": pairs }),
            )?;
        }
        Cmd::Pack { k, constraint } => {
            let spec = SectorSpec::new(k)?;
            let r = match constraint {
                Constraint::Free => pack_two_disks_sector_seeded(spec, cli.seed)?,
                Constraint::ConcentricSplit => pack_constrained(spec, SplitKind::Concentric),
                Constraint::BisectorSplit => pack_constrained(spec, SplitKind::Bisector),
            };
            println!("radius = {}", sig(r.radius));
            for c in &r.centers {
                println!("center ({}, {})", sig(c[0]), sig(c[1]));
            }
            write_json(out, "pack", &r)?;
        }
        Cmd::SectorEigen { p, k, which, h } => {
            let mesh = mesh_sector(SectorSpec::new(k)?, h)?;
            let (est, field, extra) = if which == 1 {
                let s = first_eigen_on(p, mesh, &opts, None)?;
                (s.estimate, s.field, json!(null))
            } else {
                let s = second_eigen_on(p, mesh, &opts)?;
                let extra = json!({ "r_plus": s.r_plus, "r_minus": s.r_minus, "seed": s.seed, "candidates": s.candidates });
                (s.solution.estimate, s.solution.field, extra)
            };
            let label = if which == 1 {
                "value"
            } else {
                "upper-bound estimate"
            };
            println!(
                "lambda_{which} {label} = {}  (1/p power {})",
                sig(est.value),
                sig(est.value.powf(1.0 / p))
            );
            write_json(
                out,
                "sector-eigen",
                &json!({ "p": p, "k": k, "h": h, "which": which, "estimate": est, "second": extra, "field": field }),
            )?;
        }
        Cmd::NodalClassify { p, k, h } => {
            let mesh = mesh_sector(SectorSpec::new(k)?, h)?;
            let s = second_eigen_on(p, mesh.clone(), &opts)?;
            let curve = nodal_curve(&s.solution.field)?;
            let cls = classify_nodal(&curve, mesh.spec, default_nodal_tol(h))?;
            println!(
                "{:?}: radial residual {}, arc residual {}, tol {}",
                cls.tag,
                sig(cls.radial_residual),
                sig(cls.arc_residual),
                sig(cls.tol)
            );
            let domains = if k.fract() == 0.0 {
                let d = count_nodal_domains(&assemble_disk_eigenfunction(&s.solution.field)?);
                println!("nodal domains of the reflected disk function: {d}");
                Some(d)
            } else {
                None
            };
            write_json(
                out,
                "nodal-classify",
                &json!({ "p": p, "k": k, "h": h, "estimate": s.solution.estimate, "classification": cls, "curve": curve, "disk_domains": domains }),
            )?;
        }
        Cmd::Crossing { which } => {
            let cache = TauCache::new(opts);
            match which {
                CrossingCmd::Mult3 {
                    lo,
                    hi,
                    tol,
                    h_coarse,
                    h_fine,
                } => {
                    let o = Mult3Options {
                        lo,
                        hi,
                        tol,
                        h: (h_coarse, h_fine),
                        ..Mult3Options::default()
                    };
                    let r = corollary_mult3(&cache, &o)?;
                    for (name, c, h) in [("coarse", &r.coarse, h_coarse), ("fine", &r.fine, h_fine)]
                    {
                        println!(
                            "{name} (h={h}): p2 = {} in ({}, {}), residual {}",
                            sig(c.p_star),
                            sig(c.bracket.0),
                            sig(c.bracket.1),
                            sig(c.residual)
                        );
                    }
                    println!("mesh sensitivity {}", sig(r.mesh_delta));
                    let (pp, mu, tau) = r.probe;
                    println!("at p={pp}: mu_2 = {}, tau_2 = {}", sig(mu), sig(tau));
                    write_json(out, "crossing-mult3", &r)?;
                }
                CrossingCmd::Theorem4 { k, h, tol } => {
                    let r = theorem4_crossing(&cache, k, h, tol)?;
                    println!(
                        "k={k} n={}: signs {} at p=2, {} at infinity ({:?})",
                        r.n,
                        r.certificate.sign_at_p2,
                        r.certificate.sign_at_inf,
                        r.certificate.conclusion
                    );
                    for (p, mu, tau) in &r.scan {
                        println!("p={}  mu={}  tau={}", sig(*p), sig(*mu), sig(*tau));
                    }
                    match &r.crossing {
                        Some(c) => println!(
                            "p_k = {} in ({}, {})",
                            sig(c.p_star),
                            sig(c.bracket.0),
                            sig(c.bracket.1)
                        ),
                        None => println!(
                            "no sign change up to p=30; existence rests on the certificate"
                        ),
                    }
                    write_json(out, "crossing-theorem4", &r)?;
                }
            }
        }
        Cmd::Fig3 { grid, h } => {
            let ps = parse_grid(&grid)?;
            let rows = fig3_sweep(&ps, h, threads())?;
            let csv = fig3_csv(&rows);
            print!("{csv}");
            write(out, "fig3.csv", &csv)?;
            write(out, "fig3.svg", &fig3_svg(&rows))?;
            write_json(out, "fig3", &rows)?;
        }
        Cmd::Verify { only } => {
            let ids: Vec<usize> = if only.is_empty() {
                (1..=CRITERIA).collect()
            } else {
                only
            };
            let mut results = Vec::new();
            for id in ids {
                let r = run_criterion(id, threads())?;
                println!("{}", r.line());
                results.push(r);
            }
            let passed = results.iter().filter(|r| r.passed).count();
            println!("passed {passed}/{}", results.len());
            write_json(out, "verify", &results)?;
            return Ok(passed == results.len());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

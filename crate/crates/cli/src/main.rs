//! `hemirobin` — command-line front end for the spherical-cap eigenvalue
//! library: spectrum sweeps, cluster and gap tables, spacing statistics,
//! general cap scans, secular-function plot data, and the verification
//! suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure. Output is deterministic: the same configuration
//! produces byte-identical files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use hemirobin::cap::{cap_spacing_of, cap_spectrum, BoundaryCondition, CapProblem};
use hemirobin::io::{
    fmt_f64, read_spectrum_csv, write_cap_csv, write_gap_table, write_histogram_csv,
    write_secular_plot, write_spectrum_csv,
};
use hemirobin::secular::{secular_s, SecularPoint};
use hemirobin::spectrum::{
    build_spectrum, gap_asymptotic, neumann_cluster, robin_cluster, Cluster,
};
use hemirobin::stats::{
    cluster_gap_mean, spacing_distribution, szego_cdf, szego_ks_distance, BinSpec, GapSample,
};
use hemirobin::verify::{run_all, run_criterion, CRITERIA_COUNT};
use hemirobin::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hemirobin",
    version,
    about = "Laplace eigenvalues of spherical caps with Robin/Neumann/Dirichlet edges",
    after_help = "Relative --output paths resolve under $HEMIROBIN_OUTDIR when it is set."
)]
struct Cli {
    /// Cap the worker thread count (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Dirichlet,
    Neumann,
    Robin,
}

#[derive(Subcommand)]
enum Command {
    /// Hemisphere spectrum: every eigenvalue with window index up to ell-max.
    Spectrum {
        /// Boundary parameter (0 gives the exact Neumann reference).
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        ell_max: u32,
    },
    /// One summary row per cluster: extent, index range, mean gap.
    Clusters {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        ell_max: u32,
    },
    /// Gap table of one cluster: exact vs first-order prediction per order.
    Gaps {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        ell: u32,
    },
    /// Empirical CDF of one cluster's scaled gaps against the limit law.
    Szego {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        ell: u32,
    },
    /// Histogram of unit-mean-normalized nearest-neighbor spacings.
    Spacings {
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        sigma: Option<f64>,
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        ell_max: Option<u32>,
        /// Re-ingest a spectrum CSV instead of recomputing it.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of finite histogram bins on [0, 5].
        #[arg(long, default_value_t = 100)]
        bins: usize,
    },
    /// General cap: all eigenvalues with degree below nu-max.
    Cap {
        /// Opening angle (radians unless --degrees).
        #[arg(long)]
        theta0: f64,
        /// Interpret --theta0 in degrees.
        #[arg(long)]
        degrees: bool,
        #[arg(long, value_enum)]
        bc: BcArg,
        /// Robin boundary parameter (required and only valid with --bc robin).
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        nu_max: f64,
    },
    /// Sample the hemisphere secular function S_m on a pole-skipping grid.
    SecularPlot {
        #[arg(long)]
        m: u32,
        /// Upper end of the degree grid (default: m + 8).
        #[arg(long)]
        nu_max: Option<f64>,
    },
    /// Run the numbered verification suite; exit 1 if any check fails.
    Verify {
        /// Run a single check (1-based) instead of the whole suite.
        #[arg(long)]
        criterion: Option<u32>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} worker threads: {e}");
            std::process::exit(2);
        }
    }
    match run(&cli) {
        Ok(()) => {}
        // A closed stdout (e.g. piping into `head`) is the reader's choice,
        // not a failure of ours: follow the Unix convention and leave quietly.
        Err(e) if is_broken_pipe(&e) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn is_broken_pipe(e: &Error) -> bool {
    matches!(e, Error::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
}

/// 2 for configuration problems the caller can fix, 3 for runtime failures.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_)
        | Error::Parse(_)
        | Error::InsufficientSample { .. }
        | Error::MismatchedSpectra(_)
        | Error::EmptyCluster { .. } => 2,
        Error::NonConvergence(_) | Error::Bracket(_) | Error::Overflow(_) | Error::Io(_) => 3,
    }
}

fn resolve_output(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("HEMIROBIN_OUTDIR") {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

fn with_writer(
    output: &Option<PathBuf>,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match output {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            let mut w = BufWriter::new(File::create(&p)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cluster_of(ell: u32, sigma: f64) -> Result<Cluster> {
    if sigma == 0.0 {
        Ok(neumann_cluster(ell))
    } else {
        robin_cluster(ell, sigma)
    }
}

fn json_out<W: Write + ?Sized>(w: &mut W, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| {
        if e.is_io() {
            Error::Io(std::io::Error::new(e.io_error_kind().unwrap(), e))
        } else {
            Error::Parse(format!("JSON encoding failed: {e}"))
        }
    })?;
    writeln!(w)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let format = cli.format;
    match &cli.command {
        Command::Spectrum { sigma, ell_max } => {
            let spectrum = build_spectrum(*sigma, *ell_max)?;
            with_writer(&cli.output, |w| match format {
                Format::Csv => write_spectrum_csv(w, &spectrum),
                Format::Json => {
                    let v = serde_json::to_value(&spectrum)
                        .map_err(|e| Error::Parse(format!("JSON encoding failed: {e}")))?;
                    json_out(w, &v)
                }
            })
        }
        Command::Clusters { sigma, ell_max } => {
            let clusters: Vec<Cluster> = (0..=*ell_max)
                .map(|ell| cluster_of(ell, *sigma))
                .collect::<Result<_>>()?;
            with_writer(&cli.output, |w| match format {
                Format::Csv => {
                    writeln!(w, "ell,size,start_index,lambda_min,lambda_max,gap_mean")?;
                    for c in &clusters {
                        let mean = cluster_gap_mean(c)?;
                        writeln!(
                            w,
                            "{},{},{},{},{},{}",
                            c.ell,
                            c.len(),
                            c.start_index,
                            fmt_f64(c.entries[0].lambda),
                            fmt_f64(c.top_order().lambda),
                            fmt_f64(mean)
                        )?;
                    }
                    Ok(())
                }
                Format::Json => {
                    let rows = clusters
                        .iter()
                        .map(|c| {
                            Ok(serde_json::json!({
                                "ell": c.ell,
                                "size": c.len(),
                                "start_index": c.start_index,
                                "lambda_min": c.entries[0].lambda,
                                "lambda_max": c.top_order().lambda,
                                "gap_mean": cluster_gap_mean(c)?,
                            }))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    json_out(w, &serde_json::Value::Array(rows))
                }
            })
        }
        Command::Gaps { sigma, ell } => {
            let cluster = cluster_of(*ell, *sigma)?;
            with_writer(&cli.output, |w| match format {
                Format::Csv => write_gap_table(w, &cluster),
                Format::Json => {
                    let rows = cluster
                        .entries
                        .iter()
                        .map(|r| {
                            Ok(serde_json::json!({
                                "ell": r.ell,
                                "m": r.m,
                                "gap_exact": r.rn_gap,
                                "gap_asymptotic": gap_asymptotic(r.ell, r.m, r.sigma)?,
                            }))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    json_out(w, &serde_json::Value::Array(rows))
                }
            })
        }
        Command::Szego { sigma, ell } => {
            let cluster = cluster_of(*ell, *sigma)?;
            let sample = GapSample::from_cluster(&cluster)?;
            let ks = szego_ks_distance(&sample)?;
            // Same sample the KS distance uses: drop the extreme order, sort.
            let mut gaps = sample.gaps[..sample.gaps.len() - 1].to_vec();
            gaps.sort_by(f64::total_cmp);
            with_writer(&cli.output, |w| match format {
                Format::Csv => {
                    writeln!(w, "gap,empirical_cdf,limit_cdf")?;
                    let n = gaps.len() as f64;
                    for (i, &g) in gaps.iter().enumerate() {
                        writeln!(
                            w,
                            "{},{},{}",
                            fmt_f64(g),
                            fmt_f64((i + 1) as f64 / n),
                            fmt_f64(szego_cdf(g, *sigma))
                        )?;
                    }
                    Ok(())
                }
                Format::Json => json_out(
                    w,
                    &serde_json::json!({
                        "ell": ell,
                        "sigma": sigma,
                        "n": gaps.len(),
                        "ks": ks,
                    }),
                ),
            })
        }
        Command::Spacings {
            sigma,
            ell_max,
            input,
            bins,
        } => {
            let spectrum = match input {
                Some(path) => read_spectrum_csv(BufReader::new(File::open(path)?))?,
                None => {
                    // clap guarantees both are present when --input is absent.
                    build_spectrum(sigma.unwrap(), ell_max.unwrap())?
                }
            };
            let hist = spacing_distribution(&spectrum, &BinSpec::new(*bins, 5.0)?)?;
            with_writer(&cli.output, |w| match format {
                Format::Csv => write_histogram_csv(w, &hist),
                Format::Json => {
                    let v = serde_json::to_value(&hist)
                        .map_err(|e| Error::Parse(format!("JSON encoding failed: {e}")))?;
                    json_out(w, &v)
                }
            })
        }
        Command::Cap {
            theta0,
            degrees,
            bc,
            sigma,
            nu_max,
        } => {
            let theta0 = if *degrees {
                theta0.to_radians()
            } else {
                *theta0
            };
            let bc = match (bc, sigma) {
                (BcArg::Dirichlet, None) => BoundaryCondition::Dirichlet,
                (BcArg::Neumann, None) => BoundaryCondition::Neumann,
                (BcArg::Robin, Some(s)) => BoundaryCondition::Robin(*s),
                (BcArg::Robin, None) => {
                    return Err(Error::Domain(
                        "--bc robin requires --sigma".to_string(),
                    ))
                }
                (_, Some(_)) => {
                    return Err(Error::Domain(
                        "--sigma only applies to --bc robin".to_string(),
                    ))
                }
            };
            let problem = CapProblem::new(theta0, bc, *nu_max)?;
            let spec = cap_spectrum(&problem)?;
            for warning in &spec.warnings {
                eprintln!("warning: {warning}");
            }
            with_writer(&cli.output, |w| match format {
                Format::Csv => write_cap_csv(w, &spec),
                Format::Json => {
                    let ks = match cap_spacing_of(&spec) {
                        Ok((_, ks)) => serde_json::json!(ks),
                        Err(Error::InsufficientSample { .. }) => serde_json::Value::Null,
                        Err(e) => return Err(e),
                    };
                    json_out(
                        w,
                        &serde_json::json!({
                            "theta0": problem.theta0,
                            "bc": problem.bc,
                            "nu_max": problem.nu_max,
                            "total": spec.eigenvalues.len(),
                            "counts_per_m": spec.counts_per_m,
                            "spacing_ks_exponential": ks,
                            "warnings": spec.warnings,
                        }),
                    )
                }
            })
        }
        Command::SecularPlot { m, nu_max } => {
            let nu_max = nu_max.unwrap_or(*m as f64 + 8.0);
            with_writer(&cli.output, |w| match format {
                Format::Csv => write_secular_plot(w, *m, 0.0, nu_max, 0.01),
                Format::Json => {
                    let mut nu_col = Vec::new();
                    let mut s_col = Vec::new();
                    let n = (nu_max / 0.01).floor() as usize + 1;
                    for k in 0..n {
                        let nu = k as f64 * 0.01;
                        if let SecularPoint::Finite(s) = secular_s(nu, *m)? {
                            if s.is_finite() {
                                nu_col.push(nu);
                                s_col.push(s);
                            }
                        }
                    }
                    json_out(
                        w,
                        &serde_json::json!({ "m": m, "nu": nu_col, "s_m": s_col }),
                    )
                }
            })
        }
        Command::Verify { criterion } => {
            let reports = match criterion {
                Some(id) => {
                    if !(1..=CRITERIA_COUNT).contains(id) {
                        return Err(Error::Domain(format!(
                            "criterion must be 1..={CRITERIA_COUNT}, got {id}"
                        )));
                    }
                    vec![run_criterion(*id)]
                }
                None => run_all(),
            };
            let mut all_pass = true;
            for r in &reports {
                println!("{}", r.line());
                all_pass &= r.passed;
            }
            if !all_pass {
                std::process::exit(1);
            }
            Ok(())
        }
    }
}

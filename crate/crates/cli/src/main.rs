//! Command-line front end: computes ring concurrences by every method,
//! persists records, and emits figure/table data.

mod cache;
mod records;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use records::{
    mask_string, AmplitudeEntry, BasisDump, BasisElementRecord, BasisNecklaceRecord, ResultRecord,
    SweepPointRecord, SweepRecord, TableRow,
};
use ringconc_core::basis::SymmetricBasis;
use ringconc_core::oracle::{optimize_direct, OracleOptions};
use ringconc_core::rdm::AmplitudeVector;
use ringconc_core::{lagrange, ow, qneighbor, stability, xxz};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "ringconc",
    version,
    about = "Maximal pairwise concurrence of translationally invariant qubit rings"
)]
struct Cli {
    /// Write output here instead of stdout (a directory for `figures`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Skip reading and writing the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory (overrides RINGCONC_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for batch commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format where both are supported.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GridArg {
    /// Logarithmic s-grid as lo:hi:points.
    #[arg(long, value_parser = parse_grid)]
    s_grid: Option<GridSpec>,
}

#[derive(Clone, Debug)]
struct GridSpec {
    grid: xxz::SweepGrid,
    label: String,
}

fn parse_grid(raw: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err("expected lo:hi:points".into());
    }
    let s_min: f64 = parts[0].parse().map_err(|_| "bad lower bound")?;
    let s_max: f64 = parts[1].parse().map_err(|_| "bad upper bound")?;
    let points: usize = parts[2].parse().map_err(|_| "bad point count")?;
    if !(s_min > 0.0 && s_max > s_min) || points < 2 {
        return Err("grid needs 0 < lo < hi and points >= 2".into());
    }
    Ok(GridSpec {
        grid: xxz::SweepGrid {
            s_min,
            s_max,
            points,
            ..xxz::SweepGrid::default()
        },
        label: raw.to_string(),
    })
}

impl GridSpec {
    fn default_spec() -> Self {
        GridSpec {
            grid: xxz::SweepGrid::default(),
            label: "default".to_string(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Restricted problem (no adjacent up-spins): eigenproblem value.
    Ow {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
    },
    /// Exact maximal nearest-neighbor concurrence via the s-sweep.
    Exact {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Full s-sweep record with every evaluated point.
    Sweep {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        grid: GridArg,
    },
    /// First-order stability of the restricted solution. With --n/--p a
    /// single record; otherwise a CSV table up to --n-max.
    Stability {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 16)]
        n_max: u32,
    },
    /// Multiplier method for p = 2, N >= 8.
    Lagrange {
        #[arg(long)]
        n: u32,
    },
    /// Direct nonlinear multistart oracle.
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Maximal qth-neighbor concurrence via the subring reduction.
    Qneighbor {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u32,
    },
    /// Reproduces the p = 2 table (N = 2..12).
    Table,
    /// Emits fig1.csv, fig2.csv, fig3.csv into --out (or the working dir).
    Figures {
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// Dumps the reflection-even momentum-0 basis as JSON.
    BasisDump {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u32,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    if let Err(err) = run(&cli) {
        let (code, kind) = classify(&err);
        let diagnostic = serde_json::json!({
            "error": kind,
            "message": format!("{err:#}"),
        });
        eprintln!("{diagnostic}");
        std::process::exit(code);
    }
}

fn classify(err: &anyhow::Error) -> (i32, &'static str) {
    match err.downcast_ref::<ringconc_core::Error>() {
        Some(ringconc_core::Error::Numerical(_)) => (3, "numerical"),
        Some(_) => (2, "usage"),
        None => (3, "io"),
    }
}

struct CacheOpts<'a> {
    dir: PathBuf,
    enabled: bool,
    _marker: std::marker::PhantomData<&'a ()>,
}

fn run(cli: &Cli) -> Result<()> {
    let cache = CacheOpts {
        dir: cache::resolve_dir(cli.cache_dir.as_deref()),
        enabled: !cli.no_cache,
        _marker: std::marker::PhantomData,
    };
    match &cli.command {
        Command::Ow { n, p } => {
            let key = cache::key("ow", &[("n", n.to_string()), ("p", p.to_string())]);
            let payload = cached(&cache, &key, || {
                let start = Instant::now();
                let solution = ow::ow_solve(*n, *p)?;
                let mut record = ResultRecord::new("ow", *n, *p, 1, solution.concurrence());
                record.amplitudes = Some(
                    solution
                        .necklaces()
                        .iter()
                        .zip(solution.amplitudes())
                        .map(|(neck, &a)| AmplitudeEntry {
                            gaps: neck.gap_signature().to_vec(),
                            value: a,
                        })
                        .collect(),
                );
                record.runtime_ms = start.elapsed().as_millis() as u64;
                to_json(&record)
            })?;
            emit_record(cli, &payload)
        }
        Command::Exact { n, p, grid } => {
            let spec = grid.s_grid.clone().unwrap_or_else(GridSpec::default_spec);
            let key = cache::key(
                "exact",
                &[
                    ("n", n.to_string()),
                    ("p", p.to_string()),
                    ("grid", spec.label.clone()),
                ],
            );
            let payload = cached(&cache, &key, || {
                let start = Instant::now();
                let mut record = exact_record(*n, *p, &spec)?;
                record.runtime_ms = start.elapsed().as_millis() as u64;
                to_json(&record)
            })?;
            emit_record(cli, &payload)
        }
        Command::Sweep { n, p, grid } => {
            let spec = grid.s_grid.clone().unwrap_or_else(GridSpec::default_spec);
            let key = cache::key(
                "sweep",
                &[
                    ("n", n.to_string()),
                    ("p", p.to_string()),
                    ("grid", spec.label.clone()),
                ],
            );
            let payload = cached(&cache, &key, || {
                let record = sweep_record(*n, *p, &spec)?;
                to_json(&record)
            })?;
            emit(cli.out.as_deref(), &payload)
        }
        Command::Stability { n, p, n_max } => match (n, p) {
            (Some(n), Some(p)) => {
                let key = cache::key("stability", &[("n", n.to_string()), ("p", p.to_string())]);
                let payload = cached(&cache, &key, || {
                    let start = Instant::now();
                    let verdict = stability::stability_test(*n, *p)?;
                    let ow_value = ow::ow_solve(*n, *p)?.concurrence();
                    let mut record = ResultRecord::new("stability", *n, *p, 1, ow_value);
                    record.lhs = Some(verdict.lhs);
                    record.rhs = Some(verdict.rhs);
                    record.locally_optimal = Some(verdict.locally_optimal);
                    record.runtime_ms = start.elapsed().as_millis() as u64;
                    to_json(&record)
                })?;
                emit_record(cli, &payload)
            }
            (None, None) => {
                let mut lines = vec!["n,p,lhs,rhs,locally_optimal,marginal".to_string()];
                let mut jobs = Vec::new();
                for p in 2..=n_max / 2 {
                    for n in (2 * p)..=*n_max {
                        if gcd(n, p) == 1 {
                            jobs.push((n, p));
                        }
                    }
                }
                let rows: Result<Vec<String>> = jobs
                    .par_iter()
                    .map(|&(n, p)| {
                        let v = stability::stability_test(n, p)?;
                        Ok(format!(
                            "{n},{p},{:.17e},{:.17e},{},{}",
                            v.lhs, v.rhs, v.locally_optimal, v.marginal
                        ))
                    })
                    .collect();
                lines.extend(rows?);
                lines.push(String::new());
                emit(cli.out.as_deref(), &lines.join("\n"))
            }
            _ => Err(anyhow!(ringconc_core::Error::Domain(
                "stability needs both --n and --p, or neither".into()
            ))),
        },
        Command::Lagrange { n } => {
            let key = cache::key("lagrange", &[("n", n.to_string())]);
            let payload = cached(&cache, &key, || {
                let start = Instant::now();
                let solution = lagrange::lagrange_solve(*n)?;
                let mut record = ResultRecord::new("lagrange", *n, 2, 1, solution.concurrence());
                record.lambda = Some(solution.lambda());
                record.amplitudes = Some(amplitude_entries(solution.amplitudes()));
                record.runtime_ms = start.elapsed().as_millis() as u64;
                to_json(&record)
            })?;
            emit_record(cli, &payload)
        }
        Command::Oracle {
            n,
            p,
            q,
            seed,
            restarts,
        } => {
            let key = cache::key(
                "oracle",
                &[
                    ("n", n.to_string()),
                    ("p", p.to_string()),
                    ("q", q.to_string()),
                    ("seed", seed.to_string()),
                    ("restarts", restarts.to_string()),
                ],
            );
            let payload = cached(&cache, &key, || {
                let start = Instant::now();
                let opts = OracleOptions {
                    restarts: *restarts,
                    seed: *seed,
                    ..OracleOptions::default()
                };
                let (c, amplitudes) = optimize_direct(*n, *p, *q, &opts)?;
                let mut record = ResultRecord::new("oracle", *n, *p, *q, c);
                record.amplitudes = Some(amplitude_entries(&amplitudes));
                record.seed = Some(*seed);
                record.runtime_ms = start.elapsed().as_millis() as u64;
                to_json(&record)
            })?;
            emit_record(cli, &payload)
        }
        Command::Qneighbor { n, q } => {
            let key = cache::key("qneighbor", &[("n", n.to_string()), ("q", q.to_string())]);
            let payload = cached(&cache, &key, || {
                let start = Instant::now();
                let result = qneighbor::qth_neighbor_max(*n, *q)?;
                let p_witness = result.plan.subring_count * result.subring_ups;
                let mut record = ResultRecord::new("qneighbor", *n, p_witness, *q, result.c);
                record.subring_count = Some(result.plan.subring_count);
                record.subring_size = Some(result.plan.subring_size);
                record.subring_ups = Some(result.subring_ups);
                record.amplitudes = Some(amplitude_entries(&result.subring_amplitudes));
                record.runtime_ms = start.elapsed().as_millis() as u64;
                to_json(&record)
            })?;
            emit_record(cli, &payload)
        }
        Command::Table => {
            let rows: Result<Vec<TableRow>> = (2..=12u32)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&n| table_row(n))
                .collect();
            let rows = rows?;
            match cli.format {
                Format::Json => emit(cli.out.as_deref(), &to_json(&rows)?),
                Format::Csv => {
                    let mut lines = vec!["n,p,c_exact,c_closed_form,coefficients".to_string()];
                    for row in rows {
                        let closed = row
                            .c_closed_form
                            .map(|c| format!("{c:.17e}"))
                            .unwrap_or_default();
                        let coeffs = row
                            .coefficients
                            .iter()
                            .map(|e| {
                                let gaps: Vec<String> =
                                    e.gaps.iter().map(|g| g.to_string()).collect();
                                format!("a_{}={:.10}", gaps.join("."), e.value)
                            })
                            .collect::<Vec<_>>()
                            .join(";");
                        lines.push(format!(
                            "{},{},{:.17e},{},{}",
                            row.n, row.p, row.c_exact, closed, coeffs
                        ));
                    }
                    lines.push(String::new());
                    emit(cli.out.as_deref(), &lines.join("\n"))
                }
            }
        }
        Command::Figures { n_max } => figures(cli, *n_max),
        Command::BasisDump { n, p } => {
            let basis = SymmetricBasis::build(*n, *p).map_err(anyhow::Error::from)?;
            let dump = BasisDump {
                n: *n,
                p: *p,
                necklace_count: basis.necklaces().len(),
                dimension: basis.len(),
                elements: basis
                    .elements()
                    .iter()
                    .map(|elem| BasisElementRecord {
                        representative: mask_string(elem.representative(), *n),
                        orbit_size: elem.orbit_size(),
                        pair_count: elem.pair_count(),
                        members: elem
                            .members()
                            .iter()
                            .map(|&m| {
                                let neck = &basis.necklaces()[m];
                                BasisNecklaceRecord {
                                    gaps: neck.gap_signature().to_vec(),
                                    representative: mask_string(neck.representative().bits(), *n),
                                    period: neck.period(),
                                }
                            })
                            .collect(),
                    })
                    .collect(),
            };
            emit(cli.out.as_deref(), &to_json(&dump)?)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut payload = serde_json::to_string_pretty(value)?;
    payload.push('\n');
    Ok(payload)
}

fn cached(
    cache: &CacheOpts,
    key: &str,
    compute: impl FnOnce() -> Result<String>,
) -> Result<String> {
    if cache.enabled {
        if let Some(hit) = cache::load(&cache.dir, key) {
            return Ok(hit);
        }
    }
    let payload = compute()?;
    if cache.enabled {
        cache::store(&cache.dir, key, &payload)?;
    }
    Ok(payload)
}

fn amplitude_entries(amplitudes: &AmplitudeVector) -> Vec<AmplitudeEntry> {
    amplitudes
        .necklace_coefficients()
        .into_iter()
        .map(|(gaps, value)| AmplitudeEntry { gaps, value })
        .collect()
}

fn sweep_record(n: u32, p: u32, spec: &GridSpec) -> Result<SweepRecord> {
    let start = Instant::now();
    let result = xxz::sweep(n, p, &spec.grid)?;
    Ok(SweepRecord {
        n,
        p,
        s_grid: spec.label.clone(),
        s_opt: result.s_opt,
        c_max: result.c_max,
        ow_limit: result.ow_limit,
        ow_is_best: result.ow_is_best,
        amplitudes: amplitude_entries(&result.optimal_amplitudes),
        points: result
            .points
            .iter()
            .map(|pt| {
                SweepPointRecord::from_parts(
                    pt.s,
                    pt.ground_energy,
                    pt.linearized,
                    &pt.rdm,
                    pt.concurrence,
                )
            })
            .collect(),
        runtime_ms: start.elapsed().as_millis() as u64,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn exact_record(n: u32, p: u32, spec: &GridSpec) -> Result<ResultRecord> {
    if p > n {
        return Err(anyhow!(ringconc_core::Error::Domain(format!(
            "p = {p} exceeds N = {n}"
        ))));
    }
    let reduced = p.min(n - p);
    if reduced == 0 {
        return Ok(ResultRecord::new("exact", n, p, 1, 0.0));
    }
    let sweep = sweep_record(n, reduced, spec)?;
    let mut record = ResultRecord::new("exact", n, p, 1, sweep.c_max);
    record.s_opt = Some(sweep.s_opt);
    record.amplitudes = Some(sweep.amplitudes);
    Ok(record)
}

fn table_row(n: u32) -> Result<TableRow> {
    let spec = GridSpec::default_spec();
    let record = exact_record(n, 2, &spec)?;
    let reduced = 2u32.min(n.saturating_sub(2));
    let closed = if reduced >= 1 && 2 * reduced <= n {
        ow::ow_closed_form(n, reduced).ok()
    } else {
        None
    };
    Ok(TableRow {
        n,
        p: 2,
        c_exact: record.c,
        c_closed_form: closed,
        coefficients: record.amplitudes.unwrap_or_default(),
    })
}

fn figures(cli: &Cli, n_max: u32) -> Result<()> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating figure directory {}", dir.display()))?;
    let spec = GridSpec::default_spec();

    // Sweeps shared by fig1 (C_max) and fig3 (s_opt).
    let mut jobs = Vec::new();
    for n in 4..=n_max {
        for p in 1..=n / 2 {
            jobs.push((n, p));
        }
    }
    let sweeps: Result<Vec<SweepRecord>> = jobs
        .par_iter()
        .map(|&(n, p)| sweep_record(n, p, &spec))
        .collect();
    let sweeps = sweeps?;

    let mut fig1 = vec!["n,p,c_max".to_string()];
    let mut fig3 = vec!["n,p,s_opt".to_string()];
    for record in &sweeps {
        fig1.push(format!("{},{},{:.17e}", record.n, record.p, record.c_max));
        fig3.push(format!("{},{},{:.17e}", record.n, record.p, record.s_opt));
    }
    fig1.push(String::new());
    fig3.push(String::new());
    std::fs::write(dir.join("fig1.csv"), fig1.join("\n"))?;
    std::fs::write(dir.join("fig3.csv"), fig3.join("\n"))?;

    // fig2: restricted value vs exact, with the first-order verdict where
    // defined (gcd(p, N) = 1).
    let mut fig2_jobs = Vec::new();
    for p in 2..=7u32.min(n_max / 2) {
        for n in (2 * p)..=n_max {
            fig2_jobs.push((n, p));
        }
    }
    let fig2_rows: Result<Vec<String>> = fig2_jobs
        .par_iter()
        .map(|&(n, p)| {
            let c_ow = ow::ow_solve(n, p)?.concurrence();
            let c_exact = sweeps
                .iter()
                .find(|r| r.n == n && r.p == p)
                .map(|r| r.c_max)
                .ok_or_else(|| anyhow!("missing sweep for N={n} p={p}"))?;
            let improves = if p >= 2 && gcd(n, p) == 1 {
                let verdict = stability::stability_test(n, p)?;
                (!verdict.locally_optimal).to_string()
            } else {
                String::new()
            };
            Ok(format!("{n},{p},{c_ow:.17e},{improves},{c_exact:.17e}"))
        })
        .collect();
    let mut fig2 = vec!["n,p,c_ow,perturbation_improves,c_exact".to_string()];
    fig2.extend(fig2_rows?);
    fig2.push(String::new());
    std::fs::write(dir.join("fig2.csv"), fig2.join("\n"))?;
    Ok(())
}

fn emit_record(cli: &Cli, json_payload: &str) -> Result<()> {
    match cli.format {
        Format::Json => emit(cli.out.as_deref(), json_payload),
        Format::Csv => {
            let record: ResultRecord = serde_json::from_str(json_payload)?;
            let csv = format!("{}\n{}\n", ResultRecord::csv_header(), record.csv_row());
            emit(cli.out.as_deref(), &csv)
        }
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

//! Command-line interface: generate reference point sets, count obstacle
//! structures, run certified selectors, query the exact oracles, and drive
//! the scaling experiments.
//!
//! Exit codes: 0 on success, 1 on precondition violations (bad parameters,
//! malformed input, oracle budget refusals), 2 on internal certification
//! failures.

use clap::{Parser, Subcommand, ValueEnum};
use gpselect::harness::{self, Value};
use gpselect::oracle::{self, OracleBudget};
use gpselect::selectors::{self, SelectionResult};
use gpselect::{detectors, generators, Error, PointSet};
use num_rational::Ratio;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gpselect", version, about = "Subset selection in planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference point set and write it in the text format.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        /// Grid width (grid) or cluster count per side (clusters).
        #[arg(long)]
        w: Option<i64>,
        /// Grid height.
        #[arg(long)]
        h: Option<i64>,
        /// Point count (parabola, sidon) or cube side (sample3d).
        #[arg(long)]
        n: Option<i64>,
        /// Clusters per side (clusters).
        #[arg(long)]
        k: Option<i64>,
        /// Collinear points per cluster (clusters).
        #[arg(long)]
        s: Option<i64>,
        /// Grid half-width / outer radius (annulus, jarnik).
        #[arg(long)]
        m: Option<i64>,
        /// Annulus radial width as `p` or `p/q`.
        #[arg(long)]
        x: Option<String>,
        /// Retention exponent alpha as `p/q` (sample3d).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count obstacles: writes one CSV line `n,s_max,triples,trapezoids,descending_pairs`.
    Count {
        #[arg(long, name = "in")]
        input: PathBuf,
    },
    /// Run a certified selector and write the chosen subset plus a trace line.
    Select {
        #[arg(long, value_enum)]
        method: SelectMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Retention probability `p/q` (sample-gp).
        #[arg(long)]
        prob: Option<String>,
        /// Input point set (all methods except annulus).
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        /// Grid half-width (annulus).
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact small-instance oracles.
    Oracle {
        #[arg(long, value_enum)]
        op: OracleOp,
        #[arg(long, name = "in")]
        input: PathBuf,
        /// Ramsey parameter s.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 24)]
        max_points: usize,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
    },
    /// Run a registered experiment and emit CSV records.
    Experiment {
        /// Experiment id; see --list.
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power-law exponent to two CSV columns on log-log axes.
    Fit {
        #[arg(long, name = "in")]
        input: PathBuf,
        #[arg(long, default_value = "n")]
        x_col: String,
        #[arg(long, default_value = "subset_size")]
        y_col: String,
        /// Average y over rows sharing an x before fitting.
        #[arg(long)]
        mean: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Grid,
    Parabola,
    Sidon,
    Clusters,
    Annulus,
    Jarnik,
    Sample3d,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectMethod {
    GreedyGp,
    SampleGp,
    Monotone,
    MonotoneGp,
    Annulus,
    Slopes,
    Color,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleOp {
    Triples,
    Trapezoids,
    MaxGp,
    MaxMonotoneGp,
    MaxSlopes,
    Ramsey,
}

fn parse_ratio_i64(s: &str) -> Result<Ratio<i64>, Error> {
    let parse = |t: &str| {
        t.parse::<i64>()
            .map_err(|_| Error::InvalidParameter(format!("bad number {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(parse(s)?)),
        Some((num, den)) => {
            let den = parse(den)?;
            if den == 0 {
                return Err(Error::InvalidParameter("zero denominator".into()));
            }
            Ok(Ratio::new(parse(num)?, den))
        }
    }
}

fn parse_ratio_u64(s: &str) -> Result<Ratio<u64>, Error> {
    let r = parse_ratio_i64(s)?;
    if *r.numer() < 0 {
        return Err(Error::InvalidParameter("probability must be positive".into()));
    }
    Ok(Ratio::new(*r.numer() as u64, *r.denom() as u64))
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing required flag --{flag}")))
}

fn emit_point_set(set: &PointSet, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => harness::write_point_set_file(set, path),
        None => harness::write_point_set(set, std::io::stdout().lock()),
    }
}

fn run_generate(
    kind: GenerateKind,
    w: Option<i64>,
    h: Option<i64>,
    n: Option<i64>,
    k: Option<i64>,
    s: Option<i64>,
    m: Option<i64>,
    x: Option<String>,
    alpha: Option<String>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let set = match kind {
        GenerateKind::Grid => generators::grid(require(w, "w")?, require(h, "h")?)?,
        GenerateKind::Parabola => generators::parabola_set(require(n, "n")?)?,
        GenerateKind::Sidon => generators::sidon_parabola_set(require(n, "n")?)?,
        GenerateKind::Clusters => {
            generators::perturbed_cluster_grid(require(k, "k")?, require(s, "s")?, seed)?
        }
        GenerateKind::Annulus => {
            let x = parse_ratio_i64(&require(x, "x")?)?;
            generators::annulus_sector(require(m, "m")?, x)?
        }
        GenerateKind::Jarnik => generators::jarnik_arc(require(m, "m")?)?,
        GenerateKind::Sample3d => {
            let alpha = parse_ratio_i64(&require(alpha, "alpha")?)?;
            generators::grid3_projected_sample(require(n, "n")?, alpha, seed)?
        }
    };
    emit_point_set(&set, out.as_ref())
}

fn run_count(input: PathBuf) -> Result<(), Error> {
    let set = harness::read_point_set(&input)?;
    let s_max = if set.len() >= 2 {
        detectors::line_statistics(&set)?.s_max() as u64
    } else {
        set.len() as u64
    };
    let report = detectors::obstacle_report(&set, false);
    println!(
        "{},{},{},{},{}",
        set.len(),
        s_max,
        report.collinear_triples,
        report.trapezoids,
        report.descending_pairs
    );
    Ok(())
}

fn print_trace(result: &SelectionResult) {
    println!(
        "sampled={},obstacles={},deletions={},final={}",
        result.trace.sampled,
        result.trace.obstacles,
        result.trace.deletions,
        result.chosen.len()
    );
}

fn run_select(
    method: SelectMethod,
    seed: u64,
    prob: Option<String>,
    input: Option<PathBuf>,
    m: Option<i64>,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let read_input = |input: &Option<PathBuf>| -> Result<PointSet, Error> {
        harness::read_point_set(require(input.as_ref(), "in")?)
    };
    match method {
        SelectMethod::Color => {
            let set = read_input(&input)?;
            let coloring = selectors::gp_coloring(&set)?;
            if let Some(path) = out {
                let mut buf = Vec::new();
                for (i, class) in coloring.classes.iter().enumerate() {
                    use std::io::Write;
                    writeln!(buf, "# class {i}").map_err(Error::from)?;
                    harness::write_point_set(class, &mut buf)?;
                }
                std::fs::write(path, buf)?;
            }
            println!(
                "sampled={},obstacles=0,deletions=0,final={},colors_used={}",
                set.len(),
                set.len(),
                coloring.colors_used
            );
            Ok(())
        }
        _ => {
            let result = match method {
                SelectMethod::GreedyGp => {
                    selectors::greedy_general_position(&read_input(&input)?, seed)?
                }
                SelectMethod::SampleGp => {
                    let prob = parse_ratio_u64(&require(prob, "prob")?)?;
                    selectors::sample_delete_general_position(&read_input(&input)?, prob, seed)?
                }
                SelectMethod::Monotone => selectors::longest_monotone(&read_input(&input)?)?,
                SelectMethod::MonotoneGp => {
                    selectors::monotone_gp_two_stage(&read_input(&input)?, seed)?
                }
                SelectMethod::Annulus => selectors::annulus_monotone_gp(require(m, "m")?, seed)?,
                SelectMethod::Slopes => {
                    selectors::distinct_slopes_select(&read_input(&input)?, seed)?
                }
                SelectMethod::Color => unreachable!(),
            };
            emit_point_set(&result.chosen, out.as_ref())?;
            print_trace(&result);
            Ok(())
        }
    }
}

fn run_oracle(
    op: OracleOp,
    input: PathBuf,
    s: Option<usize>,
    max_points: usize,
    max_nodes: u64,
) -> Result<(), Error> {
    let set = harness::read_point_set(&input)?;
    let budget = OracleBudget {
        max_points,
        max_nodes,
    };
    match op {
        OracleOp::Triples => println!("{}", oracle::triples_bruteforce(&set)?),
        OracleOp::Trapezoids => println!("{}", oracle::trapezoids_bruteforce(&set)?),
        OracleOp::MaxGp => {
            let best = oracle::max_general_position_exact(&set, &budget)?;
            println!("# size {}", best.len());
            harness::write_point_set(&best, std::io::stdout().lock())?;
        }
        OracleOp::MaxMonotoneGp => {
            let best = oracle::max_monotone_gp_exact(&set, &budget)?;
            println!("# size {}", best.len());
            harness::write_point_set(&best, std::io::stdout().lock())?;
        }
        OracleOp::MaxSlopes => {
            let best = oracle::max_distinct_slopes_exact(&set, &budget)?;
            println!("# size {}", best.len());
            harness::write_point_set(&best, std::io::stdout().lock())?;
        }
        OracleOp::Ramsey => {
            let s = require(s, "s")?;
            println!("{}", oracle::ramsey_witness_check(&set, s, &budget)?);
        }
    }
    Ok(())
}

fn run_experiment_cmd(id: Option<String>, list: bool, out: Option<PathBuf>) -> Result<(), Error> {
    if list {
        for id in harness::EXPERIMENTS {
            println!("{id}");
        }
        return Ok(());
    }
    let id = require(id, "id")?;
    let records = harness::run_experiment(&id)?;
    match out {
        Some(path) => harness::write_csv_file(&records, &path)?,
        None => harness::write_csv(&records, std::io::stdout().lock())?,
    }
    let elapsed: f64 = records
        .iter()
        .filter_map(|r| r.measured.get("elapsed_ms").map(Value::as_f64))
        .sum();
    eprintln!("{} records in {:.0} ms", records.len(), elapsed);
    Ok(())
}

fn run_fit(input: PathBuf, x_col: String, y_col: String, mean: bool) -> Result<(), Error> {
    let fit = harness::fit_from_csv(&input, &x_col, &y_col, mean)?;
    println!(
        "slope={:.6},intercept={:.6},r_squared={:.6}",
        fit.slope, fit.intercept, fit.r_squared
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate {
            kind,
            w,
            h,
            n,
            k,
            s,
            m,
            x,
            alpha,
            seed,
            out,
        } => run_generate(kind, w, h, n, k, s, m, x, alpha, seed, out),
        Command::Count { input } => run_count(input),
        Command::Select {
            method,
            seed,
            prob,
            input,
            m,
            out,
        } => run_select(method, seed, prob, input, m, out),
        Command::Oracle {
            op,
            input,
            s,
            max_points,
            max_nodes,
        } => run_oracle(op, input, s, max_points, max_nodes),
        Command::Experiment { id, list, out } => run_experiment_cmd(id, list, out),
        Command::Fit {
            input,
            x_col,
            y_col,
            mean,
        } => run_fit(input, x_col, y_col, mean),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Certification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

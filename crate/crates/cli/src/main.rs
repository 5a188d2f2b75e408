#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use expchar::equidist::{
    default_grid, density_distance, lhs_density, rhs_density, sample_lhs, sample_rhs, Characterization,
    DistanceReport, DEFAULT_GRID_LEVEL, DEFAULT_GRID_POINTS,
};
use expchar::gof::{critical_value_table, p_value, power_study_all, PowerResult, TestResult};
use expchar::identities::{verify_all_identities, IdentityReport, DEFAULT_MAX_R};
use expchar::maclaurin::{check_kernel_closed_forms, check_maclaurin_condition, ConditionReport, KernelReport};
use expchar::streams::{replication_rng, Domain};
use expchar::vstat::StatisticId;
use expchar::{parse_model, Error, Model};

/// Exit status when a check fails or a test rejects.
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "expchar", version, about = "Median-of-three characterizations of the exponential law: checks and tests")]
struct Cli {
    /// Worker cap; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the three combinatorial identities in exact arithmetic.
    VerifyIdentities {
        #[arg(long, default_value_t = DEFAULT_MAX_R)]
        max_r: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Compare left- and right-hand densities of an identity on a grid.
    VerifyDensity {
        /// t1, t2, t3 or conjecture:k,n
        #[arg(long)]
        theorem: Characterization,
        #[arg(long, default_value = "exp:1", value_parser = model_arg)]
        dist: Model,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Grid upper end as a quantile level of the right-hand law.
        #[arg(long, default_value_t = DEFAULT_GRID_LEVEL)]
        grid_quantile: f64,
        #[arg(long, default_value_t = 1e-9)]
        quad_tol: f64,
        /// Pass iff the sup distance is below this.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Check f⁽ᵏ⁾(0) = (−1)ᵏ f(0)ᵏ⁺¹ and the derived kernel closed forms.
    CheckMaclaurin {
        #[arg(long, value_parser = model_arg)]
        dist: Model,
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Draw from either side of an identity, one value per line.
    Sample {
        #[arg(long)]
        theorem: Characterization,
        #[arg(long, value_enum, default_value_t = Side::Lhs)]
        side: Side,
        #[arg(long, default_value = "exp:1", value_parser = model_arg)]
        dist: Model,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo goodness-of-fit test of exponentiality for a data file.
    GofTest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "T1-L2")]
        statistic: StatisticId,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
    /// Rejection rates against an alternative over a grid of n and alpha.
    PowerStudy {
        /// Alternative model.
        #[arg(long, value_parser = model_arg)]
        dist: Model,
        /// Restrict to one statistic (default: all six).
        #[arg(long)]
        statistic: Option<StatisticId>,
        #[arg(long, value_delimiter = ',', default_value = "100")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
    /// Simulated critical values of a statistic under Exp(1).
    CriticalValues {
        #[arg(long)]
        statistic: StatisticId,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.01")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[command(flatten)]
        run: Run,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Run {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    Lhs,
    Rhs,
}

fn model_arg(s: &str) -> Result<Model, Error> {
    parse_model(s)
}

/// A finished command: its primary output and whether the check passed.
struct Report {
    body: String,
    pass: bool,
    /// Extra line for stderr (e.g. the seed of a plain-text sample).
    note: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureFailure { .. } | Error::GridMismatch(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// JSON body carrying the statement a check exercises next to the report.
#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    paper_ref: &'a str,
    #[serde(flatten)]
    report: T,
}

fn json<T: Serialize>(paper_ref: &str, report: T) -> String {
    let mut s = serde_json::to_string_pretty(&Tagged { paper_ref, report }).expect("reports serialize");
    s.push('\n');
    s
}

fn require_json(format: Option<Format>, command: &str) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => Err(Failure::Usage(format!("{command} has no CSV output"))),
        _ => Ok(()),
    }
}

fn verify_identities(max_r: u32, format: Option<Format>) -> Result<Report, Failure> {
    let report: IdentityReport = verify_all_identities(max_r)?;
    let pass = report.all_equal && report.closed_forms_integral;
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json("binomial sums equal 3^r - 2^r and the analogous closed forms", &report),
        Format::Csv => {
            let mut s = String::from("identity,r,lhs,rhs,closedForm,equal\n");
            for (name, rows) in [("t1", &report.t1), ("t2", &report.t2), ("t3", &report.t3)] {
                for v in rows {
                    let _ = writeln!(s, "{name},{},{},{},{},{}", v.r, v.lhs, v.rhs, v.closed_form, v.equal);
                }
            }
            s
        }
    };
    Ok(Report { body, pass, note: None })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DensityOutput {
    characterization: String,
    dist: String,
    grid_quantile: f64,
    quad_tol: f64,
    threshold: f64,
    #[serde(flatten)]
    distance: DistanceReport,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn verify_density(
    spec: Characterization,
    dist: &Model,
    points: usize,
    level: f64,
    quad_tol: f64,
    threshold: f64,
    format: Option<Format>,
) -> Result<Report, Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Usage(format!("threshold must be positive, got {threshold}")));
    }
    let grid = default_grid(spec, dist.as_ref(), points, level)?;
    let lhs = lhs_density(spec, dist.as_ref(), &grid, quad_tol)?;
    let rhs = rhs_density(spec, dist.as_ref(), &grid)?;
    let distance = density_distance(&lhs, &rhs)?;
    let pass = distance.sup_distance < threshold;
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(
            &spec.statement(),
            DensityOutput {
                characterization: spec.to_string(),
                dist: dist.name(),
                grid_quantile: level,
                quad_tol,
                threshold,
                distance,
                pass,
            },
        ),
        Format::Csv => {
            let mut s = String::from("x,lhs,rhs\n");
            for ((x, l), r) in grid.iter().zip(&lhs.values).zip(&rhs.values) {
                let _ = writeln!(s, "{x},{l},{r}");
            }
            s
        }
    };
    Ok(Report { body, pass, note: None })
}

#[derive(Serialize)]
struct MaclaurinOutput {
    condition: ConditionReport,
    kernels: KernelReport,
}

fn check_maclaurin(dist: &Model, k_max: usize, tol: f64, format: Option<Format>) -> Result<Report, Failure> {
    let condition = check_maclaurin_condition(dist.as_ref(), k_max, tol)?;
    let kernels = check_kernel_closed_forms(dist.as_ref(), k_max, tol)?;
    let pass = condition.pass;
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(
            "f^(k)(0) = (-1)^k f(0)^(k+1) for every k >= 1",
            MaclaurinOutput { condition, kernels },
        ),
        Format::Csv => {
            let mut s = String::from("k,conditionResidual,gResidual,hResidual\n");
            for (i, r) in condition.residuals.iter().enumerate() {
                let _ = writeln!(s, "{},{r},{},{}", i + 1, kernels.g[i].residual, kernels.h[i].residual);
            }
            s
        }
    };
    Ok(Report { body, pass, note: None })
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    characterization: String,
    side: Side,
    dist: String,
    seed: u64,
    values: &'a [f64],
}

fn sample(spec: Characterization, side: Side, dist: &Model, m: usize, seed: u64, format: Option<Format>) -> Result<Report, Failure> {
    let mut rng = replication_rng(seed, Domain::Alternative, 0);
    let values = match side {
        Side::Lhs => sample_lhs(spec, dist.as_ref(), &mut rng, m)?,
        Side::Rhs => sample_rhs(spec, dist.as_ref(), &mut rng, m)?,
    };
    let (body, note) = match format {
        Some(Format::Json) => (
            json(
                &spec.statement(),
                SampleOutput {
                    characterization: spec.to_string(),
                    side,
                    dist: dist.name(),
                    seed,
                    values: &values,
                },
            ),
            None,
        ),
        _ => {
            let mut s = String::new();
            for v in &values {
                let _ = writeln!(s, "{v}");
            }
            (s, Some(format!("seed: {seed}")))
        }
    };
    Ok(Report { body, pass: true, note })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GofOutput {
    #[serde(flatten)]
    result: TestResult,
    alpha: f64,
    reject: bool,
}

fn gof_test(
    input: &std::path::Path,
    id: StatisticId,
    alpha: f64,
    reps: usize,
    seed: u64,
    format: Option<Format>,
) -> Result<Report, Failure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let sample = expchar::data::read_sample(input)?;
    let result = p_value(id, &sample, reps, seed, None)?;
    let reject = result.p_value < alpha;
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(&id.theorem.characterization().statement(), GofOutput { result, alpha, reject }),
        Format::Csv => format!(
            "# seed={seed}\nstatisticId,n,statValue,pValue,mcReps,alpha,reject\n{},{},{},{},{},{alpha},{reject}\n",
            result.statistic_id, result.n, result.stat_value, result.p_value, result.mc_reps
        ),
    };
    Ok(Report { body, pass: !reject, note: None })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PowerOutput<'a> {
    seed: u64,
    mc_reps: usize,
    results: &'a [PowerResult],
}

fn power(
    dist: &Model,
    only: Option<StatisticId>,
    ns: &[usize],
    alphas: &[f64],
    reps: usize,
    seed: u64,
    format: Option<Format>,
) -> Result<Report, Failure> {
    let mut rows: Vec<PowerResult> = Vec::new();
    for &n in ns {
        for &alpha in alphas {
            let all = power_study_all(dist.as_ref(), n, alpha, reps, seed, None)?;
            rows.extend(all.into_iter().filter(|r| only.is_none_or(|id| r.statistic_id == id)));
        }
    }
    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!("# seed={seed}, mcReps={reps}\n{}\n", PowerResult::csv_header());
            for r in &rows {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        Format::Json => json(
            "the statistics yield consistent tests of exponentiality",
            PowerOutput {
                seed,
                mc_reps: reps,
                results: &rows,
            },
        ),
    };
    Ok(Report { body, pass: true, note: None })
}

fn critical_values(id: StatisticId, n: usize, alphas: &[f64], reps: usize, seed: u64, format: Option<Format>) -> Result<Report, Failure> {
    require_json(format, "critical-values")?;
    let table = critical_value_table(id, n, alphas, reps, seed, None)?;
    let body = json(&id.theorem.characterization().statement(), table);
    Ok(Report { body, pass: true, note: None })
}

fn set_threads(threads: Option<u64>) -> Result<(), Failure> {
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(Report, Option<PathBuf>), Failure> {
    set_threads(cli.threads)?;
    let (report, output) = match cli.command {
        Command::VerifyIdentities { max_r, out } => (verify_identities(max_r, out.format)?, out.output),
        Command::VerifyDensity {
            theorem,
            dist,
            grid_points,
            grid_quantile,
            quad_tol,
            threshold,
            out,
        } => (
            verify_density(theorem, &dist, grid_points, grid_quantile, quad_tol, threshold, out.format)?,
            out.output,
        ),
        Command::CheckMaclaurin { dist, k_max, tol, out } => (check_maclaurin(&dist, k_max, tol, out.format)?, out.output),
        Command::Sample {
            theorem,
            side,
            dist,
            m,
            run,
            out,
        } => {
            (sample(theorem, side, &dist, m, run.seed, out.format)?, out.output)
        }
        Command::GofTest {
            input,
            statistic,
            alpha,
            reps,
            run,
            out,
        } => {
            (gof_test(&input, statistic, alpha, reps, run.seed, out.format)?, out.output)
        }
        Command::PowerStudy {
            dist,
            statistic,
            n,
            alpha,
            reps,
            run,
            out,
        } => {
            (power(&dist, statistic, &n, &alpha, reps, run.seed, out.format)?, out.output)
        }
        Command::CriticalValues {
            statistic,
            n,
            alpha,
            reps,
            run,
            out,
        } => {
            (critical_values(statistic, n, &alpha, reps, run.seed, out.format)?, out.output)
        }
    };
    Ok((report, output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Output is only written once the whole report exists.
    let (report, output) = match execute(cli) {
        Ok(done) => done,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if let Some(note) = &report.note {
        eprintln!("{note}");
    }
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &report.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{}", report.body),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

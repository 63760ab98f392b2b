//! Command-line harness for incidence experiments over prime fields.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when the invariant
//! suites report a failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpconics::apps::{
    self, beck_conic_count, distance_set, pinned_distance_best_with, polynomial_image_check,
    DistancePolynomial,
};
use fpconics::checks;
use fpconics::harness::{
    self, bench_counting, emit, parse_config, random_point_set, ExperimentConfig, HarnessError,
    ReportFormat,
};
use num_traits::ToPrimitive;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "fpconics",
    version,
    about = "Exact incidence counting, bound comparison, and distance-set \
             experiments over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> ReportFormat {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// Experiment selection shared by `incidence` and `rich`. Flags override
/// config-file values key by key.
#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration file (flat `key = value` lines).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Field modulus p (an odd prime).
    #[arg(long)]
    prime: Option<u64>,
    /// RNG seed; trial i draws from substream i.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads for trial execution.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Suppress wall-time columns so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Point generator: uniform | cartesian | on-curve | coset.
    #[arg(long)]
    generator: Option<String>,
    /// Point count for uniform and on-curve generators.
    #[arg(long)]
    count: Option<usize>,
    /// |A| for cartesian and coset generators.
    #[arg(long)]
    size_a: Option<usize>,
    /// |B| for cartesian and coset generators.
    #[arg(long)]
    size_b: Option<usize>,
    /// Curve kind for the on-curve generator.
    #[arg(long)]
    curve: Option<String>,
    /// Family generator: random | coefficient-product.
    #[arg(long)]
    family: Option<String>,
    /// Curve kind for the random family generator.
    #[arg(long)]
    family_kind: Option<String>,
    /// Family size for the random family generator.
    #[arg(long)]
    family_count: Option<usize>,
    /// Per-coefficient set size for the coefficient-product generator.
    #[arg(long)]
    set_size: Option<usize>,
    /// Comma-separated stable bound names to evaluate per row.
    #[arg(long)]
    bounds: Option<String>,
    /// Richness threshold for k-dependent bounds (and for `rich`).
    #[arg(long)]
    k: Option<u64>,
}

impl ExperimentArgs {
    /// Merge the config file (if any) with flag overrides; flags win.
    fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut text = match &self.config {
            Some(path) => fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
            None => String::new(),
        };
        text.push('\n');
        let mut push = |key: &str, value: String| {
            let _ = writeln!(text, "{key} = {value}");
        };
        if let Some(v) = self.prime {
            push("prime", v.to_string());
        }
        if let Some(v) = self.seed {
            push("seed", v.to_string());
        }
        if let Some(v) = self.trials {
            push("trials", v.to_string());
        }
        if let Some(v) = self.threads {
            push("threads", v.to_string());
        }
        if let Some(v) = &self.generator {
            push("generator", v.clone());
        }
        if let Some(v) = self.count {
            push("count", v.to_string());
        }
        if let Some(v) = self.size_a {
            push("size-a", v.to_string());
        }
        if let Some(v) = self.size_b {
            push("size-b", v.to_string());
        }
        if let Some(v) = &self.curve {
            push("curve", v.clone());
        }
        if let Some(v) = &self.family {
            push("family", v.clone());
        }
        if let Some(v) = &self.family_kind {
            push("family-kind", v.clone());
        }
        if let Some(v) = self.family_count {
            push("family-count", v.to_string());
        }
        if let Some(v) = self.set_size {
            push("set-size", v.to_string());
        }
        if let Some(v) = &self.bounds {
            push("bounds", v.clone());
        }
        if let Some(v) = self.k {
            push("k", v.to_string());
        }
        if self.no_timing {
            push("timing", "false".to_string());
        }
        Ok(parse_config(&text)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count incidences per trial, histogram richness, and compare bounds.
    Incidence {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate k-rich curves per trial (requires --k or the config key).
    Rich {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the exhaustive verification suites; exits 2 on any failure.
    Invariants {
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Best-pin distance values f(pin − E) over seeded random planar sets.
    Pinned {
        /// Field modulus p (an odd prime).
        #[arg(long)]
        prime: u64,
        /// |E|, the planar set size.
        #[arg(long)]
        count: usize,
        /// Distance polynomial.
        #[arg(long, value_enum, default_value = "sum-squares")]
        poly: Poly,
        /// Evaluate even when p is not 3 mod 4.
        #[arg(long)]
        override_congruence: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Suppress the wall-time column.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Polynomial image f(E) with its sumset-based lower bound.
    Image {
        /// Field modulus p (an odd prime).
        #[arg(long)]
        prime: u64,
        /// |E|.
        #[arg(long)]
        size_e: usize,
        /// |F|.
        #[arg(long)]
        size_f: usize,
        /// Distance polynomial.
        #[arg(long, value_enum, default_value = "product")]
        poly: Poly,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Suppress the wall-time column.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quadrance distance set between two seeded random sets in F_p^d.
    Distset {
        /// Field modulus p (an odd prime).
        #[arg(long)]
        prime: u64,
        /// Ambient dimension d.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// |E|.
        #[arg(long)]
        size_e: usize,
        /// |F|.
        #[arg(long)]
        size_f: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Suppress the wall-time column.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count conics through at least five points of a seeded random set.
    Beck {
        /// Field modulus p (an odd prime).
        #[arg(long)]
        prime: u64,
        /// |P|; five-subset enumeration is practical up to about 40.
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Suppress the wall-time column.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Time the optimized counting kernel on a uniform random instance.
    Bench {
        /// Field modulus p (an odd prime); defaults to 2³¹ − 1.
        #[arg(long, default_value_t = 2_147_483_647)]
        prime: u64,
        /// Number of points.
        #[arg(long, default_value_t = 10_000)]
        size_p: usize,
        /// Number of conics.
        #[arg(long, default_value_t = 10_000)]
        size_c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for the counting kernel.
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
        /// Repeat the measurement this many times on the same instance.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Poly {
    /// (x₁ − y₁)² + (x₂ − y₂)²
    SumSquares,
    /// (x₁ − y₁)(x₂ − y₂)
    Product,
    /// (x₂ − y₂) + (x₁ − y₁)²
    ParabolaDist,
}

impl Poly {
    fn to_polynomial(self) -> DistancePolynomial {
        match self {
            Poly::SumSquares => DistancePolynomial::SumSquares,
            Poly::Product => DistancePolynomial::Product,
            Poly::ParabolaDist => DistancePolynomial::ParabolaDist,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Poly::SumSquares => "sum-squares",
            Poly::Product => "product",
            Poly::ParabolaDist => "parabola-dist",
        }
    }
}

enum CliError {
    Usage(String),
    InvariantFailure(u64),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<apps::AppError> for CliError {
    fn from(e: apps::AppError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

// ---- generic table emission for the application subcommands -------------

enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.6}"),
            Cell::Text(s) => csv_escape(s),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => match u64::try_from(*v) {
                Ok(small) => serde_json::json!(small),
                Err(_) => serde_json::json!(v.to_string()),
            },
            Cell::Float(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    /// Drop the named column entirely (used for wallMs under --no-timing).
    fn drop_column(&mut self, name: &str) {
        if let Some(i) = self.columns.iter().position(|c| *c == name) {
            self.columns.remove(i);
            for row in &mut self.rows {
                row.remove(i);
            }
        }
    }

    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    debug_assert_eq!(row.len(), self.columns.len());
                    out.push_str(
                        &row.iter().map(Cell::csv).collect::<Vec<_>>().join(","),
                    );
                    out.push('\n');
                }
                out
            }
            ReportFormat::Json => {
                let array: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (name, cell) in self.columns.iter().zip(row) {
                            obj.insert(name.to_string(), cell.json());
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_string_pretty(&array).expect("plain data");
                out.push('\n');
                out
            }
        }
    }
}

fn write_report(output: &OutputArgs, body: String) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn point_label(pt: &fpconics::proj::AffinePoint) -> String {
    let coords: Vec<String> = pt.coords().iter().map(|c| c.value().to_string()).collect();
    format!("({})", coords.join(","))
}

// ---- subcommand bodies ---------------------------------------------------

fn cmd_incidence(exp: &ExperimentArgs, output: &OutputArgs) -> Result<(), CliError> {
    let config = exp.to_config()?;
    let rows = harness::run(&config)?;
    write_report(output, emit(&rows, output.format.into()))
}

fn cmd_rich(exp: &ExperimentArgs, output: &OutputArgs) -> Result<(), CliError> {
    let config = exp.to_config()?;
    let k = config
        .richness
        .ok_or_else(|| CliError::Usage("rich needs a threshold: pass --k".to_string()))?;
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "sizeP",
        "sizeC",
        "k",
        "richCount",
        "incidences",
        "maxRichness",
        "histogram",
        "wallMs",
    ]);
    for trial in 0..config.trials {
        let (points, family) = harness::generate_trial(&config, trial)?;
        let started = Instant::now();
        let profile = fpconics::incidence::incidence_histogram(&points, &family)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let rich = fpconics::incidence::rich_curves(&points, &family, k)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(config.prime.into()),
            Cell::Int(points.len() as u128),
            Cell::Int(family.len() as u128),
            Cell::Int(k.into()),
            Cell::Int(rich.family.len() as u128),
            Cell::Int(profile.total.into()),
            Cell::Int(profile.max_richness().into()),
            Cell::Text(profile.compact()),
            Cell::Float(wall_ms),
        ]);
    }
    if !config.timing {
        table.drop_column("wallMs");
    }
    write_report(output, table.render(output.format.into()))
}

fn cmd_invariants(seed: u64) -> Result<(), CliError> {
    let reports = checks::run_all(seed);
    let mut failures = 0u64;
    for r in &reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("invariant {}: {verdict} — {}", r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        Err(CliError::InvariantFailure(failures))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_pinned(
    prime: u64,
    count: usize,
    poly: Poly,
    override_congruence: bool,
    seed: u64,
    trials: u64,
    no_timing: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "sizeE",
        "poly",
        "pin",
        "valueCount",
        "ratio",
        "violations",
        "wallMs",
    ]);
    let polynomial = poly.to_polynomial();
    for trial in 0..trials {
        let e = random_point_set(prime, 2, count, seed, trial)?;
        let started = Instant::now();
        let result = pinned_distance_best_with(&e, &polynomial, override_congruence)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(prime.into()),
            Cell::Int(count as u128),
            Cell::Text(poly.label().to_string()),
            Cell::Text(point_label(&result.pin)),
            Cell::Int(result.values.len() as u128),
            Cell::Float(result.ratio),
            Cell::Text(result.violations.join("; ")),
            Cell::Float(wall_ms),
        ]);
    }
    if no_timing {
        table.drop_column("wallMs");
    }
    write_report(output, table.render(output.format.into()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_image(
    prime: u64,
    size_e: usize,
    size_f: usize,
    poly: Poly,
    seed: u64,
    trials: u64,
    no_timing: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "sizeE",
        "sizeF",
        "poly",
        "imageSize",
        "sumsetSize",
        "prunedE",
        "boundValue",
        "ratio",
        "violations",
        "wallMs",
    ]);
    let polynomial = poly.to_polynomial();
    for trial in 0..trials {
        let e = random_point_set(prime, 2, size_e, seed, 2 * trial)?;
        let f_set = random_point_set(prime, 2, size_f, seed, 2 * trial + 1)?;
        let started = Instant::now();
        let result = polynomial_image_check(&e, &f_set, &polynomial)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(prime.into()),
            Cell::Int(size_e as u128),
            Cell::Int(size_f as u128),
            Cell::Text(poly.label().to_string()),
            Cell::Int(result.image.len() as u128),
            Cell::Int(result.sumset.len() as u128),
            Cell::Int(result.pruned_e.len() as u128),
            Cell::Float(result.bound.total_f64()),
            Cell::Float(result.ratio),
            Cell::Text(result.violations.join("; ")),
            Cell::Float(wall_ms),
        ]);
    }
    if no_timing {
        table.drop_column("wallMs");
    }
    write_report(output, table.render(output.format.into()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_distset(
    prime: u64,
    dim: usize,
    size_e: usize,
    size_f: usize,
    seed: u64,
    trials: u64,
    no_timing: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "dim",
        "sizeE",
        "sizeF",
        "distanceCount",
        "bestPin",
        "bestPinnedCount",
        "wallMs",
    ]);
    for trial in 0..trials {
        let e = random_point_set(prime, dim, size_e, seed, 2 * trial)?;
        let f_set = random_point_set(prime, dim, size_f, seed, 2 * trial + 1)?;
        let started = Instant::now();
        let result = distance_set(&e, &f_set, dim)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(prime.into()),
            Cell::Int(dim as u128),
            Cell::Int(size_e as u128),
            Cell::Int(size_f as u128),
            Cell::Int(result.distances.len() as u128),
            Cell::Text(
                result
                    .best_pin
                    .as_ref()
                    .map(point_label)
                    .unwrap_or_default(),
            ),
            Cell::Int(result.best_pinned.len() as u128),
            Cell::Float(wall_ms),
        ]);
    }
    if no_timing {
        table.drop_column("wallMs");
    }
    write_report(output, table.render(output.format.into()))
}

fn cmd_beck(
    prime: u64,
    count: usize,
    seed: u64,
    trials: u64,
    no_timing: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "sizeP",
        "maxCollinear",
        "conicCount",
        "gpFiveTuples",
        "beckLower",
        "notes",
        "wallMs",
    ]);
    for trial in 0..trials {
        let p_set = random_point_set(prime, 2, count, seed, trial)?;
        let started = Instant::now();
        let report = beck_conic_count(&p_set)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(prime.into()),
            Cell::Int(count as u128),
            Cell::Int(report.max_collinear.into()),
            Cell::Int(report.conic_count.into()),
            Cell::Int(report.gp_five_tuples),
            Cell::Float(report.lower_bound_value.to_f64().unwrap_or(f64::NAN)),
            Cell::Text(report.notes.join("; ")),
            Cell::Float(wall_ms),
        ]);
    }
    if no_timing {
        table.drop_column("wallMs");
    }
    write_report(output, table.render(output.format.into()))
}

fn cmd_bench(
    prime: u64,
    size_p: usize,
    size_c: usize,
    seed: u64,
    threads: Option<usize>,
    trials: u64,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let mut table = Table::new(vec![
        "trial",
        "prime",
        "sizeP",
        "sizeC",
        "threads",
        "incidences",
        "wallS",
        "pairsPerSec",
    ]);
    for trial in 0..trials {
        let report = bench_counting(prime, size_p, size_c, seed, threads)?;
        let pairs = report.size_p as f64 * report.size_c as f64;
        table.rows.push(vec![
            Cell::Int(trial.into()),
            Cell::Int(prime.into()),
            Cell::Int(report.size_p as u128),
            Cell::Int(report.size_c as u128),
            Cell::Int(report.threads as u128),
            Cell::Int(report.incidences.into()),
            Cell::Float(report.wall_s),
            Cell::Float(pairs / report.wall_s.max(1e-12)),
        ]);
    }
    write_report(output, table.render(output.format.into()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Incidence { exp, output } => cmd_incidence(&exp, &output),
        Command::Rich { exp, output } => cmd_rich(&exp, &output),
        Command::Invariants { seed } => cmd_invariants(seed),
        Command::Pinned {
            prime,
            count,
            poly,
            override_congruence,
            seed,
            trials,
            no_timing,
            output,
        } => cmd_pinned(
            prime,
            count,
            poly,
            override_congruence,
            seed,
            trials,
            no_timing,
            &output,
        ),
        Command::Image {
            prime,
            size_e,
            size_f,
            poly,
            seed,
            trials,
            no_timing,
            output,
        } => cmd_image(prime, size_e, size_f, poly, seed, trials, no_timing, &output),
        Command::Distset {
            prime,
            dim,
            size_e,
            size_f,
            seed,
            trials,
            no_timing,
            output,
        } => cmd_distset(prime, dim, size_e, size_f, seed, trials, no_timing, &output),
        Command::Beck {
            prime,
            count,
            seed,
            trials,
            no_timing,
            output,
        } => cmd_beck(prime, count, seed, trials, no_timing, &output),
        Command::Bench {
            prime,
            size_p,
            size_c,
            seed,
            threads,
            trials,
            output,
        } => cmd_bench(prime, size_p, size_c, seed, threads, trials, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors.
            let is_usage = e.use_stderr();
            let _ = e.print();
            return if is_usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::InvariantFailure(n)) => {
            eprintln!("error: {n} invariant suite(s) failed");
            ExitCode::from(2)
        }
    }
}

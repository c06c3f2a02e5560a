//! `healthroute` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use healthroute_core::bench::{emit_report, run_bench, BenchSpec, ReportFormat};
use healthroute_core::planner::{Algorithm, RouteRequest, RouteResult, DEFAULT_ALPHA};
use healthroute_core::risk::{HeuristicVariant, PatientProfile};
use healthroute_core::scenario::{generate_grid, load_scenario_file, save_scenario, GeneratorParams, Preset};
use serde::Serialize;

use crate::documents::{self, parse_json, CompareDocument};
use crate::error::ServiceError;
use crate::http::{self, AppState, ServiceConfig, DEFAULT_BODY_LIMIT, DEFAULT_CORS_ORIGIN};

/// Exit status for a successful command.
pub const EXIT_OK: i32 = 0;
/// Exit status for errors, including flag validation.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when origin and destination are not connected.
pub const EXIT_NO_ROUTE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "healthroute", version, about = "Exposure-aware route planning for asthma patients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan one route and print the result document.
    Route(RouteArgs),
    /// Plan the same request with every model.
    Compare(CompareArgs),
    /// Generate a synthetic grid scenario.
    Generate(GenerateArgs),
    /// Run a benchmark spec and write the report.
    Bench(BenchArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct RequestArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// JSON file holding a patient profile.
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Departure time in seconds.
    #[arg(long, default_value_t = 0.0)]
    at: f64,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Debug, Args)]
struct RouteArgs {
    #[command(flatten)]
    request: RequestArgs,
    #[arg(long, default_value_t = HeuristicVariant::Combined)]
    variant: HeuristicVariant,
    #[arg(long, default_value_t = Algorithm::Astar)]
    algorithm: Algorithm,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    request: RequestArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Baseline,
    SpringPollen,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Baseline => Preset::Baseline,
            PresetArg::SpringPollen => Preset::SpringPollen,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10)]
    rows: usize,
    #[arg(long, default_value_t = 10)]
    cols: usize,
    #[arg(long, default_value_t = 100.0)]
    cell_m: f64,
    /// Zone side length in grid cells.
    #[arg(long, default_value_t = 3)]
    zone_cell: usize,
    #[arg(long, default_value_t = 4)]
    frames: usize,
    #[arg(long, default_value_t = 900.0)]
    frame_interval_s: f64,
    #[arg(long, default_value_t = 2)]
    hotspots: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PresetArg::Baseline)]
    preset: PresetArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Bench spec; scenario paths in it are relative to the spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Scenario file to preload; repeat for several.
    #[arg(long = "scenario", required = true)]
    scenarios: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    default_alpha: f64,
    /// Maximum request body size in bytes.
    #[arg(long, default_value_t = DEFAULT_BODY_LIMIT)]
    body_limit: usize,
    /// Tracing filter, e.g. `info` or `healthroute_service=debug`.
    #[arg(long, default_value = "info")]
    log_level: String,
    /// Allowed CORS origin; repeat for several.
    #[arg(long = "cors-origin", default_values_t = [DEFAULT_CORS_ORIGIN.to_owned()])]
    cors_origins: Vec<String>,
}

impl From<ServeArgs> for ServiceConfig {
    fn from(a: ServeArgs) -> Self {
        ServiceConfig {
            bind: a.bind,
            scenarios: a.scenarios,
            default_alpha: a.default_alpha,
            body_limit: a.body_limit,
            log_level: a.log_level,
            cors_origins: a.cors_origins,
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::Route(args) => {
            let output = args.request.output;
            report(run_route(args, out), output, out, err)
        }
        Command::Compare(args) => {
            let output = args.request.output;
            report(run_compare(args, out), output, out, err)
        }
        Command::Generate(args) => report(run_generate(args, out), Output::Text, out, err),
        Command::Bench(args) => report(run_bench_cmd(args, out, err), Output::Text, out, err),
        Command::Serve(args) => report(run_serve(args.into()), Output::Text, out, err),
    }
}

/// Maps a command result to an exit status, printing errors as JSON on
/// stdout when requested and always as a diagnostic on stderr.
fn report(result: Result<(), ServiceError>, output: Output, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Err(e) = result else { return EXIT_OK };
    if output == Output::Json {
        let _ = writeln!(out, "{}", to_json(&e.body()));
    }
    let _ = writeln!(err, "error: {e}");
    match e {
        ServiceError::NoRoute(_) => EXIT_NO_ROUTE,
        _ => EXIT_ERROR,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize to JSON")
}

fn read(path: &Path) -> Result<Vec<u8>, ServiceError> {
    std::fs::read(path).map_err(|source| ServiceError::Io { path: path.display().to_string(), source })
}

fn write_output(path: Option<&Path>, contents: &str, out: &mut dyn Write) -> Result<(), ServiceError> {
    let io = |p: &Path, source| ServiceError::Io { path: p.display().to_string(), source };
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| io(p, e)),
        None => out.write_all(contents.as_bytes()).map_err(|e| io(Path::new("<stdout>"), e)),
    }
}

fn load_profile(path: &Path) -> Result<PatientProfile, ServiceError> {
    parse_json(&read(path)?).map_err(|e| match e {
        ServiceError::InvalidRequest { message, mut detail } => {
            detail["file"] = path.display().to_string().into();
            ServiceError::InvalidRequest { message: format!("{}: {message}", path.display()), detail }
        }
        other => other,
    })
}

fn request_from(args: &RequestArgs) -> Result<RouteRequest, ServiceError> {
    let mut request = RouteRequest::new(args.from.clone(), args.to.clone(), load_profile(&args.profile)?);
    request.alpha = args.alpha;
    request.depart_t = args.at;
    Ok(request)
}

fn run_route(args: RouteArgs, out: &mut dyn Write) -> Result<(), ServiceError> {
    let scenario = load_scenario_file(&args.request.scenario)?;
    let mut request = request_from(&args.request)?;
    request.variant = args.variant;
    request.algorithm = args.algorithm;
    let result = documents::route(&request, &scenario)?;
    let text = match args.request.output {
        Output::Json => to_json(&result) + "\n",
        Output::Text => route_text(&result),
    };
    write_output(None, &text, out)
}

fn run_compare(args: CompareArgs, out: &mut dyn Write) -> Result<(), ServiceError> {
    let scenario = load_scenario_file(&args.request.scenario)?;
    let document = documents::compare(&request_from(&args.request)?, &scenario)?;
    let text = match args.request.output {
        Output::Json => to_json(&document) + "\n",
        Output::Text => compare_text(&document),
    };
    write_output(None, &text, out)
}

fn run_generate(args: GenerateArgs, out: &mut dyn Write) -> Result<(), ServiceError> {
    let params = GeneratorParams {
        rows: args.rows,
        cols: args.cols,
        cell_m: args.cell_m,
        zone_cell: args.zone_cell,
        frames: args.frames,
        frame_interval_s: args.frame_interval_s,
        hotspot_count: args.hotspots,
        seed: args.seed,
        preset: args.preset.into(),
    };
    let scenario = generate_grid(&params)?;
    write_output(args.out.as_deref(), &save_scenario(&scenario), out)
}

fn run_bench_cmd(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), ServiceError> {
    let spec: BenchSpec = parse_json(&read(&args.spec)?)?;
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let scenarios = spec.scenarios.iter().map(|p| load_scenario_file(base.join(p))).collect::<Result<Vec<_>, _>>()?;
    let report = run_bench(&spec, &scenarios)?;
    for f in &report.failures {
        let _ = writeln!(
            err,
            "warning: {} {} -> {} ({}, alpha {}): {}",
            f.scenario, f.src, f.dest, f.model, f.alpha, f.reason
        );
    }
    write_output(args.out.as_deref(), &emit_report(&report, args.format)?, out)
}

fn run_serve(config: ServiceConfig) -> Result<(), ServiceError> {
    config.validate()?;
    let filter = tracing_subscriber::EnvFilter::try_new(&config.log_level).map_err(|e| {
        ServiceError::invalid(format!("invalid log level: {e}"), serde_json::json!({ "path": "log_level" }))
    })?;
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
    let state = AppState::load(&config)?;
    let app = http::router(state, config.body_limit, &config.cors_origins);
    let io = |source| ServiceError::Io { path: config.bind.to_string(), source };
    let runtime = tokio::runtime::Runtime::new().map_err(io)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.bind).await.map_err(io)?;
        tracing::info!("listening on {}", listener.local_addr().map_err(io)?);
        http::serve(listener, app).await.map_err(io)
    })
}

fn route_text(r: &RouteResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}  distance {:.2} m  risk cost {:.2}  total cost {:.2}  travel time {:.1} s  ({}, {}, alpha {})",
        r.path.join(" -> "),
        r.total_distance_m,
        r.total_risk_cost,
        r.total_cost,
        r.travel_time_s,
        r.algorithm,
        r.variant,
        r.alpha,
    );
    let _ = writeln!(
        s,
        "{:<12} {:<12} {:<10} {:>10} {:>8} {:>10} {:>8}",
        "from", "to", "zone", "length_m", "risk", "cost", "time_s"
    );
    for e in &r.per_edge {
        let _ = writeln!(
            s,
            "{:<12} {:<12} {:<10} {:>10.2} {:>8.4} {:>10.2} {:>8.1}",
            e.from, e.to, e.zone, e.length_m, e.risk.total, e.cost, e.travel_time_s
        );
    }
    s
}

fn compare_text(d: &CompareDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} -> {}  alpha {}  depart {} s", d.origin, d.dest, d.alpha, d.depart_t);
    let _ = writeln!(s, "{:<44} {:>10} {:>10} {:>10} {:>8}  path", "model", "dist_m", "risk_cost", "total", "time_s");
    for row in &d.results {
        let r = &row.route;
        let _ = writeln!(
            s,
            "{:<44} {:>10.2} {:>10.2} {:>10.2} {:>8.1}  {}",
            row.model.label(),
            r.total_distance_m,
            r.total_risk_cost,
            r.total_cost,
            r.travel_time_s,
            r.path.join(" -> ")
        );
    }
    s
}

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use multigof::statistics::parse_methods;
use multigof::studies::{
    anova_demo, power_study, summarize, type1_study, PowerConfig, Type1Config, DEFAULT_ALPHAS,
};
use multigof::{run_test, Histogram, MethodId, NullModel, Sample, StatConfig, TestConfig};
use multigof_cli::data::read_sample;
use multigof_cli::error::CliResult;
use multigof_cli::output::{self, Format};
use multigof_cli::spec::LoadedSpec;
use multigof_cli::{plot, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "multigof",
    version,
    about = "Simultaneous goodness-of-fit testing"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a data file against a null distribution.
    Test(TestArgs),
    /// Type I error study.
    Type1(Type1Args),
    /// Power study from a TOML study specification.
    Power(PowerArgs),
    /// Minimum p-value adjustment of all pairwise group comparisons.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Methods, comma separated (default: all that apply).
    #[arg(long)]
    methods: Option<String>,
    /// Bins of the EqualSize and EqualProb chi-square tests.
    #[arg(long)]
    nbins: Option<usize>,
    /// Master seed; drawn from system entropy and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct TestArgs {
    /// One value per line, or a histogram with the header `edges,counts`.
    data: PathBuf,
    #[arg(long)]
    null: String,
    /// Null parameters, comma separated; starting values when estimating.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    params: Vec<f64>,
    /// Estimate the null parameters from the data.
    #[arg(long)]
    estimate: bool,
    /// Simulation rows.
    #[arg(long = "B", default_value_t = multigof::adjust::DEFAULT_B)]
    b: usize,
    /// Simulate Poisson(lambda) sample sizes.
    #[arg(long)]
    lambda: Option<f64>,
    /// Levels to report decisions at.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    alpha: Vec<f64>,
    /// Bin raw data with these edges before testing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bin_edges: Option<Vec<f64>>,
    /// Build the adjustment curve from an independent batch.
    #[arg(long)]
    fresh_batch: bool,
    /// Report file (default: standard output only).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Type1Args {
    /// Study specification with `[[cell]]` entries (default: built-in grid).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PowerArgs {
    /// Study specification.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write one SVG per case.
    #[arg(long)]
    plots: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 100)]
    n_obs: usize,
    #[arg(long, default_value_t = 5)]
    groups: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write an SVG figure.
    #[arg(long)]
    plots: bool,
}

fn resolve_seed(flag: Option<u64>, spec: Option<u64>) -> u64 {
    flag.or(spec).unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        eprintln!("seed: {seed}");
        seed
    })
}

fn methods(list: &Option<String>) -> CliResult<Vec<MethodId>> {
    match list {
        Some(l) => {
            let m = parse_methods(l)?;
            if m.is_empty() {
                return Err(CliError::config("empty method list"));
            }
            Ok(m)
        }
        None => Ok(MethodId::ALL.to_vec()),
    }
}

fn stat_config(nbins: Option<usize>) -> CliResult<StatConfig> {
    let mut stat = StatConfig::default();
    if let Some(k) = nbins {
        if k < 2 {
            return Err(CliError::config("--nbins must be at least 2"));
        }
        stat.nbins = k;
    }
    Ok(stat)
}

fn check_alphas(alphas: &[f64]) -> CliResult<()> {
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(CliError::config("alpha levels must lie in (0, 1)"));
    }
    Ok(())
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

fn cmd_test(args: TestArgs) -> CliResult<()> {
    check_alphas(&args.alpha)?;
    let model = NullModel::from_name(&args.null, args.params.clone(), args.estimate)?;
    let methods = methods(&args.common.methods)?;
    let stat = stat_config(args.common.nbins)?;
    let mut sample = read_sample(&args.data)?;
    if let Some(edges) = args.bin_edges {
        sample = match sample {
            Sample::Raw(x) => Sample::Binned(Histogram::from_data(edges, &x)?),
            Sample::Binned(_) => {
                return Err(CliError::config("--bin-edges applies to raw data only"))
            }
        };
    }
    let config = TestConfig {
        b: args.b,
        lambda: args.lambda,
        seed: resolve_seed(args.common.seed, None),
        stat,
        fresh_minp_batch: args.fresh_batch,
    };
    let report = run_test(&sample, &model, &methods, &config)?;
    let mut out = String::new();

    writeln!(out, "rc = {}", report.rc).unwrap();
    writeln!(out, "seed = {}", report.seed).unwrap();
    writeln!(
        out,
        "{:<10} {:>14} {:>10}",
        "method", "statistic", "p-value"
    )
    .unwrap();
    for row in output::report_rows(&report) {
        let stat = row.statistic.map_or(String::new(), |v| format!("{v:.6}"));
        writeln!(out, "{:<10} {:>14} {:>10.4}", row.method, stat, row.pvalue).unwrap();
    }
    for (m, why) in &report.disabled {
        writeln!(out, "skipped {m}: {why}").unwrap();
    }
    for a in &args.alpha {
        let verdict = if report.rc <= *a {
            "reject"
        } else {
            "do not reject"
        };
        writeln!(out, "alpha {a}: {verdict}").unwrap();
    }
    if let Some(path) = &args.out {
        let format = args.common.format.unwrap_or(Format::Json);
        write(path, &output::format_report(&report, format)?)?;
    }
    emit(&out)
}

/// Write to standard output; a closed pipe is not an error.
fn emit(text: &str) -> CliResult<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::runtime(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn load_spec(path: &Path) -> CliResult<LoadedSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::unreadable(format!("{}: {e}", path.display())))?;
    LoadedSpec::parse(&text)
}

fn cmd_type1(args: Type1Args) -> CliResult<()> {
    let spec = match &args.spec {
        Some(p) => load_spec(p)?,
        None => LoadedSpec::parse("")?,
    };
    let alphas = args
        .alpha
        .or_else(|| spec.spec.alphas.clone())
        .unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    check_alphas(&alphas)?;
    let config = Type1Config {
        cells: spec.type1_cells()?,
        alphas,
        b: args
            .b
            .or(spec.spec.b)
            .unwrap_or(multigof::adjust::DEFAULT_B),
        reps: args.reps.or(spec.spec.reps).unwrap_or(1000),
        methods: methods(&args.common.methods)?,
        seed: resolve_seed(args.common.seed, spec.spec.seed),
        stat: stat_config(args.common.nbins)?,
    };
    let table = type1_study(&config)?;
    let text = match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::format_type1(&table)?,
        Format::Json => output::to_json(&table)?,
    };
    match &args.out {
        Some(p) => write(p, &text),
        None => emit(&text),
    }
}

fn cmd_power(args: PowerArgs) -> CliResult<()> {
    let spec = load_spec(&args.spec)?;
    let mut cases = spec.power_cases()?;
    if args.common.methods.is_some() {
        let m = methods(&args.common.methods)?;
        for c in &mut cases {
            c.methods = m.clone();
        }
    }
    let defaults = PowerConfig::default();
    let config = PowerConfig {
        b: args.b.or(spec.spec.b).unwrap_or(defaults.b),
        reps: args.reps.or(spec.spec.reps).unwrap_or(defaults.reps),
        alphas: args
            .alpha
            .or_else(|| spec.spec.alphas.clone())
            .unwrap_or(defaults.alphas),
        seed: resolve_seed(args.common.seed, spec.spec.seed),
        stat: stat_config(args.common.nbins)?,
    };
    check_alphas(&config.alphas)?;
    let mut results = Vec::with_capacity(cases.len());
    for (ci, case) in cases.iter().enumerate() {
        let t = Instant::now();
        let r = power_study(ci, case, &config)?;
        for (m, why) in &r.disabled {
            eprintln!("{}: skipped {m}: {why}", case.name);
        }
        eprintln!("{}: {:.1}s", case.name, t.elapsed().as_secs_f64());
        results.push(r);
    }
    let summaries = config
        .alphas
        .iter()
        .map(|&a| summarize(&results, a))
        .collect::<multigof::Result<Vec<_>>>()?;

    let format = args.common.format.unwrap_or(Format::Csv);
    match format {
        Format::Csv => {
            let rows = output::power_rows(&results);
            write(&args.out.join("power.csv"), &output::write_rows(&rows)?)?;
            let rows: Vec<_> = summaries.iter().flat_map(output::summary_rows).collect();
            write(&args.out.join("summary.csv"), &output::write_rows(&rows)?)?;
        }
        Format::Json => {
            write(&args.out.join("power.json"), &output::to_json(&results)?)?;
            write(
                &args.out.join("summary.json"),
                &output::to_json(&summaries)?,
            )?;
        }
    }
    if args.plots {
        for r in &results {
            for (ai, a) in r.alphas.iter().enumerate() {
                let name = if r.alphas.len() == 1 {
                    format!("{}.svg", r.case)
                } else {
                    format!("{}_alpha{a}.svg", r.case)
                };
                write(&args.out.join(name), &plot::power_svg(r, ai))?;
            }
        }
    }
    let mut out = String::new();
    for s in &summaries {
        writeln!(out, "alpha {}: mean power", s.alpha).unwrap();
        let mut v: Vec<_> = s.mean_power.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
        for (m, p) in v {
            writeln!(out, "  {m:<10} {p:.4}").unwrap();
        }
    }
    emit(&out)
}

fn cmd_demo(args: DemoArgs) -> CliResult<()> {
    if args.groups < 2 {
        return Err(CliError::config("--groups must be at least 2"));
    }
    let seed = resolve_seed(args.seed, None);
    let demo = anova_demo(args.n_obs, args.groups, args.reps, seed)?;
    match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let minima = output::demo_minima_rows(&demo);
            write(
                &args.out.join("demo_minima.csv"),
                &output::write_rows(&minima)?,
            )?;
            let curve = output::demo_curve_rows(&demo);
            write(
                &args.out.join("demo_curve.csv"),
                &output::write_rows(&curve)?,
            )?;
        }
        Format::Json => write(&args.out.join("demo.json"), &output::to_json(&demo)?)?,
    }
    if args.plots {
        write(&args.out.join("demo.svg"), &plot::demo_svg(&demo))?;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut out = String::new();
    writeln!(out, "comparisons = {}", demo.comparisons).unwrap();
    writeln!(out, "mean raw minimum = {:.4}", mean(&demo.raw)).unwrap();
    writeln!(out, "mean adjusted = {:.4}", mean(&demo.adjusted)).unwrap();
    emit(&out)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Type1(a) => cmd_type1(a),
        Command::Power(a) => cmd_power(a),
        Command::Demo(a) => cmd_demo(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(multigof_cli::Failure::InvalidConfig.code())
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.code())
        }
    }
}

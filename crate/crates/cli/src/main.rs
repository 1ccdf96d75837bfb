use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use ifs_chaos::constructions::{
    build_schedule, choose_base_map, slow_driver, RateFunction, ScheduleLimits, DEFAULT_MIN_OUTSIDE,
};
use ifs_chaos::harness::format::{g17, g17_opt, point};
use ifs_chaos::harness::{
    parse_config, preset, run_experiment, summary, ExperimentConfig, PRESET_NAMES,
};
use ifs_chaos::ifs::DEFAULT_POINT_BUDGET;
use ifs_chaos::metrics::{box_dimension, log_rate, recovery_times};
use ifs_chaos::words::{
    champernowne, example4_driver, format_symbols, infinite_de_bruijn, random_driver,
    word_coverage, DEFAULT_COVERAGE_CAP,
};
use ifs_chaos::{AttractorCloud, DriverStream, Error, IfsSystem, Result};

const CAP_EXCEEDED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ifs-chaos",
    version,
    about = "Deterministic chaos game experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Output directory for written tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for cached attractor clouds.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Orbit step cap for recovery searches.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Seed for random drivers.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect attractor clouds.
    #[command(subcommand)]
    Cloud(CloudCmd),
    /// Emit driver symbols or word-coverage statistics.
    #[command(subcommand)]
    Driver(DriverCmd),
    /// Recovery times of one driver for several radii.
    Recover(RecoverArgs),
    /// Box-counting dimension estimate.
    Dim(DimArgs),
    /// Slow-driver block schedule as CSV.
    Schedule(ScheduleArgs),
    /// Run presets or configuration files.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum CloudCmd {
    /// Build a cloud, store it in the cache and optionally dump its points.
    Build {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        resolution: f64,
        #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
        budget: usize,
    },
    /// Describe a cached cloud file.
    Info { path: PathBuf },
}

#[derive(Args)]
struct IfsArg {
    /// cantor, segment, sierpinski, example4, single-point, or a config file.
    #[arg(long, default_value = "cantor")]
    ifs: String,
}

#[derive(Subcommand)]
enum DriverCmd {
    /// Print the first N symbols.
    Emit {
        #[command(flatten)]
        driver: DriverArg,
        #[arg(short = 'n', long, default_value_t = 64)]
        count: usize,
        /// Also print `m,n_i_m` for m = 1..=M.
        #[arg(long)]
        stats: Option<usize>,
    },
    /// Print `m,n_i_m` for m = 1..=M.
    Stats {
        #[command(flatten)]
        driver: DriverArg,
        #[arg(short = 'm', long)]
        max_m: usize,
    },
}

#[derive(Args)]
struct DriverArg {
    /// champernowne, de-bruijn, random or example4.
    #[arg(long, default_value = "champernowne")]
    kind: String,
    /// Alphabet size.
    #[arg(short = 'k', long, default_value_t = 2)]
    alphabet: usize,
    /// Exponent for the example4 driver.
    #[arg(long, default_value_t = 1.0)]
    z: f64,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    ifs: IfsArg,
    #[command(flatten)]
    driver: DriverArg,
    /// Start point, comma separated; repeatable.
    #[arg(long = "x0", required = true)]
    x0: Vec<String>,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long)]
    resolution: f64,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    ifs: IfsArg,
    #[arg(long)]
    resolution: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    m_lo: u32,
    #[arg(long, default_value_t = 12)]
    m_hi: u32,
}

#[derive(Args)]
struct ScheduleArgs {
    #[command(flatten)]
    ifs: IfsArg,
    /// power:Z, iterexp:N or bounding:X0.
    #[arg(long, default_value = "power:1")]
    psi: String,
    #[arg(long, default_value_t = 1e-8)]
    resolution: f64,
    #[arg(long, default_value_t = 5)]
    k_max: usize,
    #[arg(long, default_value_t = 5_000_000)]
    step_cap: u64,
    /// Stream the first N driver symbols instead of the table.
    #[arg(long)]
    emit: Option<usize>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a preset by name or a configuration file.
    Run { target: String },
    /// List preset names.
    List,
    /// Print a preset's configuration.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Cloud(CloudCmd::Build {
            ifs,
            resolution,
            budget,
        }) => {
            let ifs = load_ifs(&ifs.ifs)?;
            let (cloud, hit) =
                AttractorCloud::load_or_build(&ifs, resolution, budget, g.cache.as_deref())?;
            describe_cloud(&mut out, &cloud)?;
            writeln!(out, "cache      {}", if hit { "hit" } else { "miss" })?;
            if let Some(dir) = &g.out {
                fs::create_dir_all(dir)?;
                let mut dat = String::new();
                for p in cloud.points() {
                    dat.push_str(&point(p));
                    dat.push('\n');
                }
                fs::write(dir.join("cloud.dat"), dat)?;
            }
            0
        }
        Command::Cloud(CloudCmd::Info { path }) => {
            let cloud = AttractorCloud::read_cache(&path)?;
            describe_cloud(&mut out, &cloud)?;
            0
        }
        Command::Driver(DriverCmd::Emit {
            driver,
            count,
            stats,
        }) => {
            let mut d = make_driver(&driver, g.seed.unwrap_or(0))?;
            let symbols = d.take(count)?;
            writeln!(out, "{}", format_symbols(&symbols, d.alphabet()))?;
            if let Some(max_m) = stats {
                write_stats(
                    &mut out,
                    &make_driver(&driver, g.seed.unwrap_or(0))?,
                    max_m,
                    g.cap,
                )?
            } else {
                0
            }
        }
        Command::Driver(DriverCmd::Stats { driver, max_m }) => write_stats(
            &mut out,
            &make_driver(&driver, g.seed.unwrap_or(0))?,
            max_m,
            g.cap,
        )?,
        Command::Recover(args) => recover(&mut out, g, args)?,
        Command::Dim(args) => {
            let ifs = load_ifs(&args.ifs.ifs)?;
            let (cloud, _) = AttractorCloud::load_or_build(
                &ifs,
                args.resolution,
                DEFAULT_POINT_BUDGET,
                g.cache.as_deref(),
            )?;
            let d = box_dimension(&cloud, args.a, args.r, args.m_lo, args.m_hi)?;
            writeln!(out, "b_m,lower,upper,rate_lower,rate_upper")?;
            for (b, c) in &d.samples {
                let x = (1.0 / b).ln();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    g17(*b),
                    c.lower,
                    c.upper,
                    g17((c.lower as f64).ln() / x),
                    g17((c.upper as f64).ln() / x)
                )?;
            }
            eprintln!(
                "dimension {} (bracket [{}, {}])",
                g17(d.value),
                g17(d.bracket.0),
                g17(d.bracket.1)
            );
            0
        }
        Command::Schedule(args) => schedule(&mut out, g, args)?,
        Command::Experiment(ExperimentCmd::List) => {
            for name in PRESET_NAMES {
                writeln!(out, "{name}")?;
            }
            0
        }
        Command::Experiment(ExperimentCmd::Show { name }) => {
            let c = preset(&name).ok_or_else(|| unknown_preset(&name))?;
            write!(out, "{}", c.to_toml())?;
            0
        }
        Command::Experiment(ExperimentCmd::Run { target }) => {
            let mut config = load_experiment(&target)?;
            if let Some(dir) = &g.out {
                config.output.dir = Some(dir.clone());
            }
            if let Some(dir) = &g.cache {
                config.output.cache = Some(dir.clone());
            }
            if let Some(cap) = g.cap {
                config.caps.orbit = cap;
            }
            if let Some(seed) = g.seed {
                config.seed = seed;
            }
            let report = run_experiment(&config)?;
            write!(out, "{}", summary(&report))?;
            for (phase, t) in &report.timings {
                eprintln!("{phase:<10} {:.3} s", t.as_secs_f64());
            }
            if report.capped() > 0 {
                CAP_EXCEEDED
            } else {
                0
            }
        }
    };
    out.flush()?;
    Ok(code)
}

fn unknown_preset(name: &str) -> Error {
    Error::Config(vec![format!(
        "`{name}` is neither a preset ({}) nor a readable file",
        PRESET_NAMES.join(", ")
    )])
}

fn load_experiment(target: &str) -> Result<ExperimentConfig> {
    if let Some(c) = preset(target) {
        return Ok(c);
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(unknown_preset(target));
    }
    parse_config(&fs::read_to_string(path)?)
}

fn load_ifs(name: &str) -> Result<IfsSystem> {
    Ok(match name {
        "cantor" => IfsSystem::cantor(),
        "segment" => IfsSystem::segment(),
        "sierpinski" => IfsSystem::sierpinski(),
        "example4" => IfsSystem::example4(),
        "single-point" => IfsSystem::single_point(),
        other => load_experiment(other)?.ifs.build()?,
    })
}

fn make_driver(arg: &DriverArg, seed: u64) -> Result<DriverStream> {
    match arg.kind.as_str() {
        "champernowne" => champernowne(arg.alphabet),
        "de-bruijn" | "de_bruijn" => infinite_de_bruijn(arg.alphabet),
        "random" => random_driver(arg.alphabet, seed),
        "example4" => example4_driver(arg.z),
        other => Err(Error::InvalidInput(format!(
            "unknown driver `{other}` (champernowne, de-bruijn, random, example4)"
        ))),
    }
}

fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a number")))
        })
        .collect()
}

fn describe_cloud(out: &mut impl Write, cloud: &AttractorCloud) -> Result<()> {
    writeln!(out, "points     {}", cloud.len())?;
    writeln!(out, "dimension  {}", cloud.dim())?;
    writeln!(out, "resolution {}", g17(cloud.resolution()))?;
    writeln!(out, "depth      {}", cloud.depth())?;
    writeln!(
        out,
        "diameter   [{}, {}]",
        g17(cloud.diam_lower()),
        g17(cloud.diam_upper())
    )?;
    Ok(())
}

fn write_stats(
    out: &mut impl Write,
    driver: &DriverStream,
    max_m: usize,
    cap: Option<u64>,
) -> Result<u8> {
    let cap = cap.unwrap_or(DEFAULT_COVERAGE_CAP);
    writeln!(out, "m,n_i_m")?;
    let mut code = 0;
    for m in 1..=max_m {
        let stat = word_coverage(driver, m, cap)?;
        match stat.n_of_m {
            Some(n) => writeln!(out, "{m},{n}")?,
            None => {
                writeln!(out, "{m},")?;
                code = CAP_EXCEEDED;
            }
        }
    }
    Ok(code)
}

fn recover(out: &mut impl Write, g: &Global, args: RecoverArgs) -> Result<u8> {
    let ifs = load_ifs(&args.ifs.ifs)?;
    let (cloud, _) = AttractorCloud::load_or_build(
        &ifs,
        args.resolution,
        DEFAULT_POINT_BUDGET,
        g.cache.as_deref(),
    )?;
    let driver = make_driver(&args.driver, g.seed.unwrap_or(0))?;
    let cap = g.cap.unwrap_or(100_000_000);
    writeln!(out, "driver,x0,eps,n,guard,log_rate")?;
    let mut code = 0;
    for x0 in &args.x0 {
        let x0 = parse_point(x0)?;
        for r in recovery_times(&ifs, &driver, &x0, &args.eps, &cloud, cap, false)? {
            if r.n.is_none() {
                code = CAP_EXCEEDED;
            }
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.driver,
                point(&r.x0),
                g17(r.eps),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                g17(r.guard),
                g17_opt(r.n.and_then(|n| log_rate(n, r.eps)))
            )?;
        }
    }
    Ok(code)
}

fn parse_psi(text: &str, ifs: &IfsSystem, cloud: &AttractorCloud) -> Result<RateFunction> {
    let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
    let bad = || {
        Error::InvalidInput(format!(
            "cannot parse psi `{text}` (power:Z, iterexp:N, bounding:X0)"
        ))
    };
    match kind {
        "power" => RateFunction::power(arg.parse().map_err(|_| bad())?),
        "iterexp" => RateFunction::iterexp(arg.parse().map_err(|_| bad())?),
        "bounding" => RateFunction::bounding(ifs, cloud, &parse_point(arg)?),
        _ => Err(bad()),
    }
}

fn schedule(out: &mut impl Write, g: &Global, args: ScheduleArgs) -> Result<u8> {
    let ifs = load_ifs(&args.ifs.ifs)?;
    let (cloud, _) = AttractorCloud::load_or_build(
        &ifs,
        args.resolution,
        DEFAULT_POINT_BUDGET,
        g.cache.as_deref(),
    )?;
    let psi = parse_psi(&args.psi, &ifs, &cloud)?;
    let base = choose_base_map(&ifs, &cloud, DEFAULT_MIN_OUTSIDE)?;
    let limits = ScheduleLimits {
        k_max: args.k_max,
        step_cap: args.step_cap,
    };
    let s = Arc::new(build_schedule(&ifs, &cloud, &psi, &base, limits)?);
    if let Some(why) = &s.truncated {
        eprintln!("schedule stopped early: {why}");
    }
    if let Some(n) = args.emit {
        let mut d = slow_driver(s, champernowne(ifs.len())?)?;
        let symbols = d.take(n)?;
        writeln!(out, "{}", format_symbols(&symbols, ifs.len()))?;
        return Ok(0);
    }
    writeln!(out, "k,m,p,n_hat,v")?;
    for e in &s.entries {
        writeln!(out, "{},{},{},{},{}", e.k, e.m, e.p, e.n_hat, e.v)?;
    }
    Ok(0)
}

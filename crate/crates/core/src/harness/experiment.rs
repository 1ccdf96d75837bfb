//! Running a configured experiment and writing its tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::config::{CloudSpec, DriverSpec, EpsSpec, ExperimentConfig, PsiSpec, TailKind};
use super::format::{g17, g17_opt, point};
use crate::constructions::{
    build_schedule, choose_base_map, slow_driver, RateFunction, Schedule, ScheduleLimits,
};
use crate::error::{Error, Result};
use crate::ifs::{AttractorCloud, IfsSystem};
use crate::metrics::{
    box_dimension, covering_estimate, iterated_log_rate, key_inequality_check, log_rate,
    rate_ratio, recovery_times, CoverEstimate, DimensionEstimate, RecoveryRecord,
};
use crate::words::{
    champernowne, example4_driver, infinite_de_bruijn, random_driver, DriverStream, Word,
};

/// Everything an experiment needs before the recovery sweep.
pub struct Prepared {
    pub ifs: IfsSystem,
    pub cloud: AttractorCloud,
    pub cache_hit: bool,
    pub driver: DriverStream,
    pub schedule: Option<Arc<Schedule>>,
    /// Reference rate for `n/ψ(ε)` diagnostics, when the driver has one.
    pub psi: Option<RateFunction>,
}

/// Rate diagnostics for one recovery record.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub log_rate: Option<f64>,
    /// `ln ln n / ln(1/ε)`.
    pub loglog_rate: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// Canonical TOML of `config` without its output paths.
    pub config_echo: String,
    pub cloud_len: usize,
    pub resolution: f64,
    pub diam: (f64, f64),
    pub cache_hit: bool,
    pub driver: String,
    pub records: Vec<RecoveryRecord>,
    /// One row per record.
    pub rates: Vec<RateRow>,
    /// One estimate per distinct radius, largest radius first.
    pub covers: Vec<CoverEstimate>,
    /// Indices into `records` failing `n + 1 ≥ lower`.
    pub key_violations: Vec<usize>,
    pub dimension: Option<DimensionEstimate>,
    pub schedule: Option<Arc<Schedule>>,
    pub psi: Option<RateFunction>,
    /// Wall-clock time per phase. Not part of any written file.
    pub timings: Vec<(&'static str, Duration)>,
}

impl RunReport {
    pub fn cover_at(&self, eps: f64) -> Option<&CoverEstimate> {
        self.covers.iter().find(|c| c.eps == eps)
    }

    /// Records started at `x0`, in sweep order.
    pub fn records_for<'a>(
        &'a self,
        x0: &'a [f64],
    ) -> impl Iterator<Item = &'a RecoveryRecord> + 'a {
        self.records.iter().filter(move |r| r.x0 == x0)
    }

    pub fn capped(&self) -> usize {
        self.records.iter().filter(|r| r.n.is_none()).count()
    }
}

/// Builds the cloud (through the cache when configured) and the driver.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    let ifs = config.ifs.build()?;
    let (cloud, cache_hit) = build_cloud(config, &ifs).map_err(|e| e.in_phase("cloud"))?;
    let (driver, schedule, psi) =
        build_driver(config, &ifs, &cloud).map_err(|e| e.in_phase("driver"))?;
    Ok(Prepared {
        ifs,
        cloud,
        cache_hit,
        driver,
        schedule,
        psi,
    })
}

fn build_cloud(config: &ExperimentConfig, ifs: &IfsSystem) -> Result<(AttractorCloud, bool)> {
    match &config.cloud {
        CloudSpec::Sampled {
            resolution,
            point_budget,
        } => AttractorCloud::load_or_build(
            ifs,
            *resolution,
            *point_budget,
            config.output.cache.as_deref(),
        ),
        CloudSpec::Example4Fixture { n_max } => Ok((example4_fixture(*n_max)?, false)),
        CloudSpec::Points { points, resolution } => {
            let dim = ifs.dim();
            let coords = points.iter().flatten().copied().collect();
            Ok((
                AttractorCloud::from_exact_points(dim, coords, *resolution)?,
                false,
            ))
        }
    }
}

/// `{0} ∪ {2^-n : 0 ≤ n ≤ n_max}` with resolution `2^-n_max`.
pub fn example4_fixture(n_max: u32) -> Result<AttractorCloud> {
    let mut coords = vec![0.0];
    coords.extend((0..=n_max as i32).map(|n| 0.5f64.powi(n)));
    AttractorCloud::from_exact_points(1, coords, 0.5f64.powi(n_max as i32))
}

type BuiltDriver = (DriverStream, Option<Arc<Schedule>>, Option<RateFunction>);

fn build_driver(
    config: &ExperimentConfig,
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
) -> Result<BuiltDriver> {
    let k = ifs.len();
    Ok(match &config.driver {
        DriverSpec::Champernowne {} => (champernowne(k)?, None, None),
        DriverSpec::DeBruijn {} => (infinite_de_bruijn(k)?, None, None),
        DriverSpec::Example4 { z } => (example4_driver(*z)?, None, Some(RateFunction::power(*z)?)),
        DriverSpec::Random {} => (random_driver(k, config.seed)?, None, None),
        DriverSpec::Literal { symbols } => (
            DriverStream::literal(Word::new(symbols.clone(), k)?),
            None,
            None,
        ),
        DriverSpec::Slow {
            psi,
            k_max,
            step_cap,
            min_outside,
            tail,
        } => {
            let psi = match psi {
                PsiSpec::Bounding { x0 } => RateFunction::bounding(ifs, cloud, x0)?,
                other => other.to_rate_without_cloud()?,
            };
            let base = choose_base_map(ifs, cloud, *min_outside)?;
            let limits = ScheduleLimits {
                k_max: *k_max,
                step_cap: *step_cap,
            };
            let schedule = Arc::new(build_schedule(ifs, cloud, &psi, &base, limits)?);
            let tail = match tail {
                TailKind::Champernowne => champernowne(k)?,
                TailKind::DeBruijn => infinite_de_bruijn(k)?,
                TailKind::Random => random_driver(k, config.seed)?,
            };
            (
                slow_driver(schedule.clone(), tail)?,
                Some(schedule),
                Some(psi),
            )
        }
    })
}

/// Radii swept for start point `x0`, largest first.
pub fn eps_for(
    config: &ExperimentConfig,
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    schedule: Option<&Schedule>,
    x0: &[f64],
) -> Result<Vec<f64>> {
    Ok(match &config.eps {
        EpsSpec::Geometric { a, r, m_lo, m_hi } => {
            (*m_lo..=*m_hi).map(|m| a * r.powi(m as i32)).collect()
        }
        EpsSpec::List { values } => values.clone(),
        EpsSpec::Chain { m_lo, m_hi } => {
            let base = cloud.diam_upper() + cloud.distance_to(x0);
            (*m_lo..=*m_hi)
                .map(|m| ifs.lip_max().powi(m as i32) * base + cloud.resolution())
                .collect()
        }
        EpsSpec::Schedule {} => {
            let s = schedule.ok_or_else(|| {
                Error::InvalidInput("eps kind schedule needs a slow driver".into())
            })?;
            (1..=s.entries.len()).map(|k| s.eps(k)).collect()
        }
    })
}

/// Runs the whole experiment. When `config.output.dir` is set the tables
/// are written there as well.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        let now = Instant::now();
        timings.push((name, now - clock));
        clock = now;
    };

    config.validate()?;
    let ifs = config.ifs.build()?;
    let (cloud, cache_hit) = build_cloud(config, &ifs).map_err(|e| e.in_phase("cloud"))?;
    lap("cloud", &mut timings);
    let (driver, schedule, psi) =
        build_driver(config, &ifs, &cloud).map_err(|e| e.in_phase("driver"))?;
    lap("driver", &mut timings);

    let eps_lists: Vec<Vec<f64>> = config
        .x0
        .iter()
        .map(|x0| eps_for(config, &ifs, &cloud, schedule.as_deref(), x0))
        .collect::<Result<_>>()
        .map_err(|e| e.in_phase("eps"))?;
    let records =
        sweep(config, &ifs, &cloud, &driver, &eps_lists).map_err(|e| e.in_phase("recovery"))?;
    lap("recovery", &mut timings);

    let mut radii: Vec<f64> = records.iter().map(|r| r.eps).collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    let covers = radii
        .iter()
        .map(|&eps| covering_estimate(cloud.coords(), cloud.dim(), eps))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_phase("cover"))?;
    let cover_of = |eps: f64| {
        covers
            .iter()
            .find(|c| c.eps == eps)
            .expect("every radius has a cover")
    };
    let key_violations = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !key_inequality_check(r, cover_of(r.eps)))
        .map(|(i, _)| i)
        .collect();
    let rates = records
        .iter()
        .map(|r| rate_row(r, psi.as_ref()))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_phase("rates"))?;
    lap("cover", &mut timings);

    let dimension = config
        .dimension
        .map(|s| box_dimension(&cloud, s.a, s.r, s.m_lo, s.m_hi))
        .transpose()
        .map_err(|e| e.in_phase("dimension"))?;
    lap("dimension", &mut timings);

    let report = RunReport {
        config: config.clone(),
        config_echo: echo(config),
        cloud_len: cloud.len(),
        resolution: cloud.resolution(),
        diam: (cloud.diam_lower(), cloud.diam_upper()),
        cache_hit,
        driver: driver.label().to_string(),
        records,
        rates,
        covers,
        key_violations,
        dimension,
        schedule,
        psi,
        timings,
    };
    if let Some(dir) = &config.output.dir {
        write_report(&report, dir).map_err(|e| e.in_phase("report"))?;
    }
    Ok(report)
}

fn echo(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.output = Default::default();
    c.to_toml()
}

/// One orbit pass per start point, run on separate threads; records keep
/// the configured order.
fn sweep(
    config: &ExperimentConfig,
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    driver: &DriverStream,
    eps_lists: &[Vec<f64>],
) -> Result<Vec<RecoveryRecord>> {
    let cap = config.caps.orbit;
    let certify = config.caps.certify;
    let results: Vec<Result<Vec<RecoveryRecord>>> = std::thread::scope(|s| {
        let handles: Vec<_> = config
            .x0
            .iter()
            .zip(eps_lists)
            .map(|(x0, eps)| {
                let driver = driver.clone();
                s.spawn(move || recovery_times(ifs, &driver, x0, eps, cloud, cap, certify))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Invariant("recovery worker panicked".into())))
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn rate_row(r: &RecoveryRecord, psi: Option<&RateFunction>) -> Result<RateRow> {
    let Some(n) = r.n else {
        return Ok(RateRow {
            log_rate: None,
            loglog_rate: None,
            ratio: None,
        });
    };
    let loglog = iterated_log_rate(n, r.eps, 2);
    let ratio = match psi.map(|p| rate_ratio(n, p, r.eps)) {
        Some(Ok(v)) => Some(v),
        Some(Err(Error::Overflow { .. })) | None => None,
        Some(Err(e)) => return Err(e),
    };
    Ok(RateRow {
        log_rate: log_rate(n, r.eps),
        loglog_rate: loglog.is_finite().then_some(loglog),
        ratio,
    })
}

/// Writes every table of `report` into `dir` and returns the paths written.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };

    put("config.toml", report.config_echo.clone())?;

    let mut rows = vec![svec(&["driver", "x0", "eps", "n", "guard", "log_rate"])];
    for (r, rate) in report.records.iter().zip(&report.rates) {
        rows.push(vec![
            r.driver.clone(),
            point(&r.x0),
            g17(r.eps),
            opt_u64(r.n),
            g17(r.guard),
            g17_opt(rate.log_rate),
        ]);
    }
    put("recovery.csv", csv_text(&rows)?)?;

    if report.config.caps.certify {
        let mut rows = vec![svec(&["driver", "x0", "eps", "n", "n_outer", "outer_eps"])];
        for r in &report.records {
            rows.push(vec![
                r.driver.clone(),
                point(&r.x0),
                g17(r.eps),
                opt_u64(r.n),
                opt_u64(r.n_outer.flatten()),
                g17(r.eps - r.guard),
            ]);
        }
        put("certified.csv", csv_text(&rows)?)?;
    }

    let mut rows = vec![svec(&["eps", "lower", "upper"])];
    for c in &report.covers {
        rows.push(vec![g17(c.eps), c.lower.to_string(), c.upper.to_string()]);
    }
    put("cover.csv", csv_text(&rows)?)?;

    let mut rows = vec![svec(&[
        "driver",
        "x0",
        "eps",
        "n",
        "log_rate",
        "loglog_rate",
        "psi",
        "rate_ratio",
        "packing_lower",
        "key_ok",
    ])];
    for (i, (r, rate)) in report.records.iter().zip(&report.rates).enumerate() {
        let cover = report.cover_at(r.eps).expect("every radius has a cover");
        rows.push(vec![
            r.driver.clone(),
            point(&r.x0),
            g17(r.eps),
            opt_u64(r.n),
            g17_opt(rate.log_rate),
            g17_opt(rate.loglog_rate),
            report
                .psi
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_default(),
            g17_opt(rate.ratio),
            cover.lower.to_string(),
            (!report.key_violations.contains(&i)).to_string(),
        ]);
    }
    put("rates.csv", csv_text(&rows)?)?;

    if let Some(d) = &report.dimension {
        let mut rows = vec![svec(&["b_m", "lower", "upper", "rate_lower", "rate_upper"])];
        for (b, c) in &d.samples {
            let x = (1.0 / b).ln();
            rows.push(vec![
                g17(*b),
                c.lower.to_string(),
                c.upper.to_string(),
                g17((c.lower as f64).ln() / x),
                g17((c.upper as f64).ln() / x),
            ]);
        }
        put("dimension.csv", csv_text(&rows)?)?;
        let mut dat = String::from("# ln(1/b_m) ln(lower) ln(upper)\n");
        for (b, c) in &d.samples {
            let _ = writeln!(
                dat,
                "{} {} {}",
                g17((1.0 / b).ln()),
                g17((c.lower as f64).ln()),
                g17((c.upper as f64).ln())
            );
        }
        put("dimension.dat", dat)?;
    }

    if let Some(s) = &report.schedule {
        let mut rows = vec![svec(&["k", "m", "p", "n_hat", "v"])];
        for e in &s.entries {
            rows.push(vec![
                e.k.to_string(),
                e.m.to_string(),
                e.p.to_string(),
                e.n_hat.to_string(),
                e.v.to_string(),
            ]);
        }
        put("schedule.csv", csv_text(&rows)?)?;
        let mut rows = vec![svec(&["m", "c_m", "n_hat", "ratio", "admissible"])];
        for t in &s.trend {
            rows.push(vec![
                t.m.to_string(),
                g17(t.c_m),
                t.n_hat.to_string(),
                g17_opt(t.ratio),
                t.admissible.to_string(),
            ]);
        }
        put("trend.csv", csv_text(&rows)?)?;
    }

    let mut dat = String::from("# eps n log_rate, one block per start point\n");
    for (i, x0) in report.config.x0.iter().enumerate() {
        if i > 0 {
            dat.push_str("\n\n");
        }
        let _ = writeln!(dat, "# x0 = {}", point(x0));
        for (r, rate) in report
            .records
            .iter()
            .zip(&report.rates)
            .filter(|(r, _)| &r.x0 == x0)
        {
            let _ = writeln!(
                dat,
                "{} {} {}",
                g17(r.eps),
                r.n.map_or("NaN".to_string(), |n| n.to_string()),
                rate.log_rate.map_or("NaN".to_string(), g17)
            );
        }
    }
    put("recovery.dat", dat)?;

    let mut dat = String::from("# eps lower upper\n");
    for c in &report.covers {
        let _ = writeln!(dat, "{} {} {}", g17(c.eps), c.lower, c.upper);
    }
    put("cover.dat", dat)?;

    put("summary.txt", summary(report))?;
    Ok(written)
}

/// Human-readable digest; contains nothing that varies between runs.
pub fn summary(report: &RunReport) -> String {
    let c = &report.config;
    let mut s = String::new();
    let _ = writeln!(s, "experiment   {}", c.name);
    let _ = writeln!(
        s,
        "maps         {} in dimension {}",
        c.ifs.maps.len(),
        c.ifs.maps[0].offset.len()
    );
    let _ = writeln!(s, "driver       {}", report.driver);
    let _ = writeln!(s, "seed         {}", c.seed);
    let _ = writeln!(
        s,
        "cloud        {} points, resolution {}, diameter in [{}, {}]",
        report.cloud_len,
        g17(report.resolution),
        g17(report.diam.0),
        g17(report.diam.1)
    );
    let _ = writeln!(
        s,
        "records      {} ({} reached the cap of {})",
        report.records.len(),
        report.capped(),
        c.caps.orbit
    );
    let _ = writeln!(s, "key check    {} violations", report.key_violations.len());
    for x0 in &c.x0 {
        let rates: Vec<String> = report
            .records
            .iter()
            .zip(&report.rates)
            .filter(|(r, _)| &r.x0 == x0)
            .map(|(_, rate)| rate.log_rate.map_or("-".into(), |v| format!("{v:.4}")))
            .collect();
        let _ = writeln!(s, "log_rate     x0 = {}: {}", point(x0), rates.join(" "));
    }
    if let Some(d) = &report.dimension {
        let _ = writeln!(
            s,
            "dimension    {} (bracket [{}, {}], liminf proxy {}, {} scales)",
            g17(d.value),
            g17(d.bracket.0),
            g17(d.bracket.1),
            g17(d.liminf_proxy),
            d.samples.len()
        );
    }
    if let Some(sch) = &report.schedule {
        let _ = writeln!(
            s,
            "schedule     psi {}, base map {}, {} blocks, total length {}",
            sch.psi,
            sch.base.i_star,
            sch.entries.len(),
            sch.total_len()
        );
        if let Some(why) = &sch.truncated {
            let _ = writeln!(s, "truncated    {why}");
        }
    }
    s
}

fn svec(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn opt_u64(n: Option<u64>) -> String {
    n.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_text(rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row)
            .map_err(|e| Error::Invariant(format!("csv encoding failed: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Invariant(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(format!("csv output is not UTF-8: {e}")))
}

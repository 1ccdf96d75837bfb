//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Exits nonzero when
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ifs_chaos::constructions::{build_sigma, slow_driver, RateFunction, Schedule};
use ifs_chaos::harness::{
    prepare, preset, run_experiment, CloudSpec, ExperimentConfig, RunReport, PRESET_NAMES,
};
use ifs_chaos::ifs::{directed_hausdorff, run_orbit, DEFAULT_POINT_BUDGET};
use ifs_chaos::metrics::{
    box_dimension, key_inequality_check, log_rate, rate_ratio, recovery_time, recovery_times,
};
use ifs_chaos::words::{
    alpha, champernowne, de_bruijn_word, example4_driver, infinite_de_bruijn, random_driver,
    word_coverage, DEFAULT_COVERAGE_CAP,
};
use ifs_chaos::{AffineMap, AttractorCloud, DriverStream, IfsSystem, Result};

use common::*;

#[derive(Default)]
struct Outcome {
    ok: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            ok: true,
            details: Vec::new(),
        }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    fn require(&mut self, cond: bool, line: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.details.push(line.into());
        }
    }
}

/// Property results gathered while the criteria run, reported by the last one.
#[derive(Default)]
struct Ctx {
    props: Vec<(&'static str, std::result::Result<(), String>)>,
}

impl Ctx {
    fn prop(&mut self, name: &'static str, failures: &[String]) {
        let res = match failures {
            [] => Ok(()),
            [first, ..] => Err(format!("{} violation(s), first: {first}", failures.len())),
        };
        self.props.push((name, res));
    }
}

fn ints(n: &Option<u64>) -> String {
    n.map_or("capped".into(), |v| v.to_string())
}

// ---- 1 ----

fn separating_closed_forms(_: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    for (name, z, ks) in [
        ("example4-z1", 1.0, 3..=12u64),
        ("example4-z05", 0.5, 10..=16),
    ] {
        let report = run_experiment(&preset(name).unwrap())?;
        let (mut total, mut matched) = (0, 0);
        for k in ks {
            let eps = 0.5f64.powi(k as i32);
            let (from_one, from_zero) = example4_formulas(k, z);
            for (x0, want) in [(1.0, from_one), (0.0, from_zero)] {
                let got = report
                    .records
                    .iter()
                    .find(|r| r.x0 == [x0] && r.eps == eps)
                    .and_then(|r| r.n);
                total += 1;
                if got == Some(want) {
                    matched += 1;
                }
                out.require(
                    got == Some(want),
                    format!("z={z} k={k} x0={x0}: n={}, closed form {want}", ints(&got)),
                );
            }
        }
        out.note(format!(
            "z={z}: {matched}/{total} recovery times equal the closed forms"
        ));
    }
    Ok(out)
}

// ---- 2 ----

fn champernowne_word_bound(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut failures = Vec::new();
    for (k, max_m) in [(2usize, 10usize), (3, 6)] {
        let d = champernowne(k)?;
        for m in 1..=max_m {
            let n = word_coverage(&d, m, DEFAULT_COVERAGE_CAP)?.n_of_m;
            let bound = champernowne_bound(k as u128, m as u32);
            let ok = n.is_some_and(|n| n as u128 <= bound);
            out.require(ok, format!("K={k} m={m}: n={}, bound {bound}", ints(&n)));
            if !ok {
                failures.push(format!("K={k} m={m}"));
            }
        }
        out.note(format!("K={k}: m = 1..={max_m} checked"));
    }
    // The property asks for every feasible m; extend the range here.
    for (k, lo, hi) in [(2usize, 11usize, 16usize), (3, 7, 10)] {
        let d = champernowne(k)?;
        for m in lo..=hi {
            let n = word_coverage(&d, m, DEFAULT_COVERAGE_CAP)?.n_of_m;
            if !n.is_some_and(|n| n as u128 <= champernowne_bound(k as u128, m as u32)) {
                failures.push(format!("K={k} m={m}: n={}", ints(&n)));
            }
        }
    }
    ctx.prop("word_drivers: Champernowne closed-form bound", &failures);
    Ok(out)
}

// ---- 3 ----

fn de_bruijn_optimality(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    for (k, max_m) in [(2usize, 12usize), (3, 8)] {
        for m in 1..=max_m {
            let w = de_bruijn_word(k, m)?;
            let optimum = k.pow(m as u32) + m - 1;
            let counts = window_counts(w.symbols(), m);
            out.require(
                w.len() == optimum,
                format!("K={k} m={m}: length {} != {optimum}", w.len()),
            );
            out.require(
                counts.len() == k.pow(m as u32) && counts.values().all(|&c| c == 1),
                format!("K={k} m={m}: some word repeats or is missing"),
            );
        }
        out.note(format!(
            "K={k}: words of order 1..={max_m} have length K^m+m-1, every m-word once"
        ));
    }
    let mut failures = Vec::new();
    for (k, orders) in [
        (2usize, vec![2usize, 4, 6, 8, 10, 12]),
        (3, (1..=8).collect()),
    ] {
        let top = *orders.last().unwrap();
        let long = infinite_de_bruijn(k)?.take(k.pow(top as u32) + top - 1)?;
        for m in orders {
            let len = k.pow(m as u32) + m - 1;
            let short = infinite_de_bruijn(k)?.take(len)?;
            let counts = window_counts(&long[..len], m);
            let ok = long[..len] == short[..]
                && counts.len() == k.pow(m as u32)
                && counts.values().all(|&c| c == 1);
            out.require(
                ok,
                format!("infinite K={k}: order {m} prefix changed after extending to order {top}"),
            );
            if !ok {
                failures.push(format!("K={k} order {m}"));
            }
        }
        out.note(format!(
            "infinite K={k}: prefixes stable through order {top}"
        ));
    }
    ctx.prop(
        "word_drivers: infinite de Bruijn prefix stability",
        &failures,
    );
    Ok(out)
}

// ---- 4 ----

fn champernowne_fast_rate(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let report = run_experiment(&preset("cantor-champernowne").unwrap())?;
    let bound = 2f64.ln() / 3f64.ln() + 0.1;
    let mut over_bound = Vec::new();
    for x0 in [0.0, 1.0, 5.0] {
        let mut line = format!("x0={x0}:");
        for m in 8..=12 {
            let eps = 3f64.powi(-m);
            let rec = report
                .records
                .iter()
                .position(|r| r.x0 == [x0] && (r.eps / eps - 1.0).abs() < 1e-12);
            let Some(i) = rec else {
                out.require(false, format!("x0={x0} m={m}: no record"));
                continue;
            };
            let n = report.records[i].n;
            let lr = n.and_then(|n| log_rate(n, report.records[i].eps));
            line += &format!(
                " m={m} n={} rate={}",
                ints(&n),
                lr.map_or("-".into(), |v| format!("{v:.4}"))
            );
            if !lr.is_some_and(|v| (0.55..=0.74).contains(&v)) {
                out.ok = false;
                line += " (outside)";
            }
            if !lr.is_some_and(|v| v <= bound) {
                over_bound.push(format!(
                    "x0={x0} m={m}: {} > {bound:.4}",
                    lr.map_or("-".into(), |v| format!("{v:.4}"))
                ));
            }
        }
        out.note(line);
    }
    ctx.prop(
        "metrics: Champernowne fast rate (log_rate <= ln2/ln3 + 0.1)",
        &over_bound,
    );
    Ok(out)
}

// ---- 5 ----

fn key_inequality(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut failures = Vec::new();
    for name in &PRESET_NAMES[..4] {
        let report = run_experiment(&preset(name).unwrap())?;
        let mut violations = 0;
        for r in &report.records {
            let ok = report
                .cover_at(r.eps)
                .is_some_and(|c| key_inequality_check(r, c));
            if !ok {
                violations += 1;
                failures.push(format!("{name} x0={:?} eps={}", r.x0, r.eps));
            }
        }
        out.require(
            violations == 0 && report.key_violations.is_empty(),
            format!("{name}: {violations} violation(s)"),
        );
        out.note(format!(
            "{name}: {} records, {} capped, {violations} violations",
            report.records.len(),
            report.capped()
        ));
        out.require(
            report.capped() == 0,
            format!("{name}: capped records cannot be checked"),
        );
    }
    ctx.prop("metrics: key inequality over the preset sweeps", &failures);
    Ok(out)
}

// ---- 6 ----

fn covering_word_coverage(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let ifs = IfsSystem::cantor();
    let cloud = AttractorCloud::build(&ifs, 1e-6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut starts = Vec::new();
    while starts.len() < 10 {
        let x: f64 = rng.random_range(-1.0..=2.0);
        if cloud.distance_to(&[x]) <= 1.0 {
            starts.push(x);
        }
    }
    let mut failures = Vec::new();
    for m in 2..=8usize {
        let c_m = ifs.lip_max().powi(m as i32) * (cloud.diam_upper() + 1.0);
        let sigma = build_sigma(&ifs, c_m, m)?;
        let radius = 3.0 * c_m + cloud.resolution();
        let mut missed = 0;
        for &x0 in &starts {
            let mut d = DriverStream::literal(sigma.word.clone());
            let orbit = run_orbit(&ifs, &mut d, &[x0], sigma.word.len())?;
            if !covers_brute(cloud.coords(), orbit.coords(), 1, radius) {
                missed += 1;
                failures.push(format!("m={m} x0={x0}"));
            }
        }
        out.require(
            missed == 0,
            format!("m={m}: {missed} of 10 starts leave cloud points uncovered"),
        );
        out.note(format!(
            "m={m}: |sigma|={} radius={radius:.3e}",
            sigma.word.len()
        ));
    }
    ctx.prop(
        "constructions: covering word orbits cover at 3C_m + resolution",
        &failures,
    );
    Ok(out)
}

// ---- 7 ----

struct SlowRun {
    ifs: IfsSystem,
    cloud: AttractorCloud,
    schedule: Arc<Schedule>,
    psi: RateFunction,
}

fn slow_bracketing(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let config = preset("slow-power-z1").unwrap();
    let p = prepare(&config)?;
    let run = SlowRun {
        ifs: p.ifs,
        cloud: p.cloud,
        schedule: p.schedule.expect("slow preset has a schedule"),
        psi: p.psi.expect("slow preset has a rate"),
    };
    let s = &run.schedule;
    out.require(
        s.entries.len() >= 3,
        format!("only {} scheduled blocks", s.entries.len()),
    );
    out.require(
        s.total_len() <= 5_000_000,
        format!("schedule length {} exceeds the cap", s.total_len()),
    );
    out.note(format!("{} blocks, v = {}", s.entries.len(), s.total_len()));

    let eps: Vec<f64> = (1..=s.entries.len()).map(|k| s.eps(k)).collect();
    let starts: Vec<f64> = [-1.0, -0.5, 0.0, 0.3, 0.5, 1.0, 1.5, 2.0]
        .into_iter()
        .filter(|&x| run.cloud.distance_to(&[x]) <= 1.0)
        .collect();
    let mut ratios = vec![Vec::new(); starts.len()];
    let (mut bracket_fail, mut claim_fail) = (Vec::new(), Vec::new());
    for (i, &x0) in starts.iter().enumerate() {
        let recs = recovery_times(
            &run.ifs,
            &p.driver,
            &[x0],
            &eps,
            &run.cloud,
            s.total_len() + 10,
            false,
        )?;
        for (e, r) in s.entries.iter().zip(&recs) {
            let lo = e.v_before() + e.p;
            let hi = lo + e.m as u64 * e.n_hat;
            let inside = r.n.is_some_and(|n| lo <= n && n <= hi);
            out.require(
                inside,
                format!("x0={x0} k={}: {lo} <= {} <= {hi} fails", e.k, ints(&r.n)),
            );
            if !inside {
                bracket_fail.push(format!("x0={x0} k={}", e.k));
            }
            if let Some(n) = r.n {
                ratios[i].push(rate_ratio(n, &run.psi, r.eps)?);
            }
        }
    }
    for e in &s.entries {
        let target = run.psi.eval(s.eps(e.k))?;
        let ok = (e.p as f64 - target).abs() <= 1.0;
        out.require(ok, format!("k={}: p={} vs psi={target}", e.k, e.p));
        if !ok {
            claim_fail.push(format!("k={}", e.k));
        }
        let col: Vec<f64> = ratios
            .iter()
            .filter_map(|r| r.get(e.k - 1).copied())
            .collect();
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        out.note(format!(
            "k={}: m={} p={} v={} N^={} rate_ratio in [{lo:.4}, {hi:.4}]",
            e.k, e.m, e.p, e.v, e.n_hat
        ));
        out.require(
            lo >= 0.95 && hi <= 1.7,
            format!("k={}: rate_ratio outside [0.95, 1.7]", e.k),
        );
    }
    for (x0, r) in starts.iter().zip(&ratios) {
        out.require(
            r.windows(2).all(|w| w[1] <= w[0]),
            format!("x0={x0}: rate_ratio increases: {r:?}"),
        );
    }
    ctx.prop(
        "constructions: slow driver brackets recovery times",
        &bracket_fail,
    );
    ctx.prop("constructions: |p_k - psi(3C_m)| <= 1", &claim_fail);

    let proxy: Vec<f64> = s
        .entries
        .iter()
        .map(|e| (e.m as f64 + 1.0) * e.n_hat as f64 / e.p as f64)
        .collect();
    let proxy_fail: Vec<String> = proxy
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] >= w[0])
        .map(|(i, w)| format!("k={}: {} -> {}", i + 2, w[0], w[1]))
        .collect();
    ctx.prop("constructions: (m+1)N^/p strictly decreasing", &proxy_fail);

    let mut pull_fail = Vec::new();
    let lip = run.ifs.lip_max();
    for &x0 in &starts {
        let r0 = run.cloud.distance_to(&[x0]);
        let mut d = slow_driver(run.schedule.clone(), champernowne(2)?)?;
        let orbit = run_orbit(&run.ifs, &mut d, &[x0], 400)?;
        for (n, q) in orbit.points().enumerate() {
            let bound = lip.powi(n as i32) * r0 + run.cloud.resolution();
            if run.cloud.distance_to(q) > bound * (1.0 + 1e-9) + 1e-15 {
                pull_fail.push(format!("x0={x0} n={n}"));
            }
        }
    }
    ctx.prop(
        "constructions: orbits pulled towards the attractor",
        &pull_fail,
    );
    Ok(out)
}

// ---- 8 ----

fn box_dimensions(_: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let cases = [
        ("segment", IfsSystem::segment(), 1e-5, 0.5, 14, 1.0, 0.05),
        (
            "cantor",
            IfsSystem::cantor(),
            1e-7,
            1.0 / 3.0,
            13,
            2f64.ln() / 3f64.ln(),
            0.05,
        ),
        (
            "single point",
            IfsSystem::single_point(),
            1e-6,
            0.5,
            12,
            0.0,
            0.0,
        ),
    ];
    for (name, ifs, res, r, m_hi, want, tol) in cases {
        let cloud = AttractorCloud::build(&ifs, res)?;
        let d = box_dimension(&cloud, 1.0, r, 1, m_hi)?;
        out.note(format!(
            "{name}: {:.5} (bracket [{:.5}, {:.5}], target {want:.4})",
            d.value, d.bracket.0, d.bracket.1
        ));
        let ok = if tol == 0.0 {
            d.value == want
        } else {
            (d.value - want).abs() <= tol
        };
        out.require(
            ok,
            format!("{name}: {} not within {tol} of {want}", d.value),
        );
    }
    Ok(out)
}

// ---- 9 ----

fn de_bruijn_chain(ctx: &mut Ctx) -> Result<Outcome> {
    let mut out = Outcome::new();
    let (mut chain_fail, mut rate_fail) = (Vec::new(), Vec::new());

    let report = run_experiment(&preset("sierpinski-debruijn").unwrap())?;
    let d3 = infinite_de_bruijn(3)?;
    let word_n: Vec<u64> = (1..=9)
        .map(|m| word_coverage(&d3, m, DEFAULT_COVERAGE_CAP).map(|c| c.n_of_m.unwrap()))
        .collect::<Result<_>>()?;
    for x0 in &report.config.x0 {
        for (i, r) in report.records_for(x0).enumerate() {
            let m = i + 1;
            let top = 3u64.pow(m as u32) + m as u64 - 1;
            let ok = r.n.is_some_and(|n| n <= word_n[i]) && word_n[i] <= top;
            out.require(
                ok,
                format!(
                    "K=3 x0={x0:?} m={m}: n={} word={} top={top}",
                    ints(&r.n),
                    word_n[i]
                ),
            );
            if !ok {
                chain_fail.push(format!("sierpinski x0={x0:?} m={m}"));
            }
            if !r
                .n
                .is_some_and(|n| n as f64 <= (alpha(3) as f64 + 0.5) * 3f64.powi(m as i32))
            {
                rate_fail.push(format!("sierpinski x0={x0:?} m={m}"));
            }
        }
    }
    out.note(format!(
        "K=3 m=1..=9: {} records, n_i(m) = {:?}",
        report.records.len(),
        word_n
    ));

    let report = run_experiment(&preset("cantor-debruijn").unwrap())?;
    let d2 = infinite_de_bruijn(2)?;
    let mut worst = 0.0f64;
    for x0 in &report.config.x0 {
        for (i, r) in report.records_for(x0).enumerate() {
            let m = i + 2;
            let word = word_coverage(&d2, m, DEFAULT_COVERAGE_CAP)?.n_of_m.unwrap();
            if !r.n.is_some_and(|n| n <= word) {
                chain_fail.push(format!("cantor x0={x0:?} m={m}"));
            }
            let rate_ok =
                r.n.is_some_and(|n| n as f64 <= (alpha(2) as f64 + 0.5) * 2f64.powi(m as i32));
            if !rate_ok {
                rate_fail.push(format!("cantor x0={x0:?} m={m}"));
            }
            if m % 2 == 0 {
                out.require(
                    rate_ok,
                    format!("K=2 x0={x0:?} m={m}: n={} > 2.5*2^m", ints(&r.n)),
                );
                if let Some(n) = r.n {
                    worst = worst.max(n as f64 / 2f64.powi(m as i32));
                }
            }
        }
    }
    out.require(alpha(2) == 2, format!("alpha(2) = {}", alpha(2)));
    out.note(format!("K=2 even m <= 12: largest n/2^m = {worst:.3}"));

    // Champernowne side of the chain property.
    for (ifs, res, max_m, starts) in [
        (
            IfsSystem::cantor(),
            1e-6,
            12u32,
            vec![vec![0.0], vec![0.4], vec![3.0]],
        ),
        (
            IfsSystem::sierpinski(),
            3e-3,
            7,
            vec![vec![0.0, 0.0], vec![2.0, -1.0]],
        ),
    ] {
        let cloud = AttractorCloud::build(&ifs, res)?;
        let d = champernowne(ifs.len())?;
        for x0 in &starts {
            let base = cloud.diam_upper() + cloud.distance_to(x0);
            let eps: Vec<f64> = (1..=max_m)
                .map(|m| ifs.lip_max().powi(m as i32) * base + cloud.resolution())
                .collect();
            let recs = recovery_times(&ifs, &d, x0, &eps, &cloud, 1 << 24, false)?;
            for (m, r) in (1..=max_m).zip(&recs) {
                let word = word_coverage(&d, m as usize, DEFAULT_COVERAGE_CAP)?
                    .n_of_m
                    .unwrap();
                if !r.n.is_some_and(|n| n <= word) {
                    chain_fail.push(format!("champernowne K={} x0={x0:?} m={m}", ifs.len()));
                }
            }
        }
    }
    ctx.prop(
        "metrics: c_m chain n(c_m + resolution) <= n_i(m)",
        &chain_fail,
    );
    ctx.prop("metrics: de Bruijn rate n <= (alpha+0.5) K^m", &rate_fail);
    Ok(out)
}

// ---- 10 ----

fn shear() -> IfsSystem {
    IfsSystem::new(vec![
        AffineMap::new(vec![vec![0.5, 0.3], vec![0.0, 0.4]], vec![0.0, 0.0]).unwrap(),
        AffineMap::new(vec![vec![0.4, 0.0], vec![-0.2, 0.5]], vec![1.0, 0.0]).unwrap(),
        AffineMap::new(vec![vec![0.3, 0.1], vec![0.1, 0.3]], vec![0.3, 1.0]).unwrap(),
    ])
    .unwrap()
}

fn systems() -> Vec<IfsSystem> {
    vec![
        IfsSystem::cantor(),
        IfsSystem::segment(),
        IfsSystem::example4(),
        IfsSystem::sierpinski(),
        shear(),
    ]
}

fn ifs_properties(ctx: &mut Ctx) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let dist = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    };

    let mut failures = Vec::new();
    for ifs in systems() {
        let cloud = AttractorCloud::build(&ifs, 1e-3)?;
        let bbox: Vec<(f64, f64)> = (0..ifs.dim())
            .map(|j| {
                cloud
                    .points()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                        (a.min(p[j]), b.max(p[j]))
                    })
            })
            .collect();
        for (i, map) in ifs.maps().iter().enumerate() {
            for _ in 0..1000 {
                let x: Vec<f64> = bbox
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect();
                let y: Vec<f64> = bbox
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect();
                if dist(&map.image(&x), &map.image(&y)) > map.lip() * dist(&x, &y) * (1.0 + 1e-9) {
                    failures.push(format!("map {i} at {x:?}, {y:?}"));
                }
            }
        }
    }
    ctx.prop("ifs_core: contraction audit", &failures);

    let mut failures = Vec::new();
    for ifs in systems() {
        let depths = if ifs.len() == 3 { 1..7 } else { 1..11 };
        for m in depths {
            let coarse = AttractorCloud::at_depth(&ifs, m, DEFAULT_POINT_BUDGET)?;
            let fine = AttractorCloud::at_depth(&ifs, m + 1, DEFAULT_POINT_BUDGET)?;
            let h = directed_hausdorff(fine.coords(), coarse.coords(), ifs.dim(), None)?;
            if h > ifs.lip_max().powi(m as i32) * coarse.diam_upper() * (1.0 + 1e-12) {
                failures.push(format!("K={} m={m}: {h}", ifs.len()));
            }
        }
    }
    ctx.prop(
        "ifs_core: refinement stays within the coarse cover",
        &failures,
    );

    let mut failures = Vec::new();
    for case in 0..32u64 {
        let ifs = shear();
        let x0 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let n = rng.random_range(0..2000);
        let a = run_orbit(&ifs, &mut random_driver(3, case)?, &x0, n)?;
        let b = run_orbit(&ifs, &mut random_driver(3, case)?, &x0, n)?;
        let bits =
            |o: &ifs_chaos::Orbit| o.coords().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        if bits(&a) != bits(&b) || a.driver_prefix() != b.driver_prefix() {
            failures.push(format!("seed {case}"));
        }
    }
    ctx.prop("ifs_core: orbits are bit-identical", &failures);

    let mut failures = Vec::new();
    for ifs in systems() {
        let mut prev = 0.0;
        for m in 0..8 {
            let c = AttractorCloud::at_depth(&ifs, m, DEFAULT_POINT_BUDGET)?;
            if c.diam_lower() < prev {
                failures.push(format!("K={} depth {m}", ifs.len()));
            }
            prev = c.diam_lower();
        }
    }
    ctx.prop("ifs_core: diam_lower monotone in depth", &failures);
    Ok(())
}

fn word_properties(ctx: &mut Ctx) -> Result<()> {
    let mut failures = Vec::new();
    let drivers2 = [
        champernowne(2)?,
        infinite_de_bruijn(2)?,
        random_driver(2, 5)?,
        example4_driver(0.05)?,
    ];
    for d in &drivers2 {
        for m in 1..=8 {
            if let Some(n) = word_coverage(d, m, 1 << 28)?.n_of_m {
                if n < (1u64 << m) + m as u64 - 1 {
                    failures.push(format!("{} m={m}", d.label()));
                }
            }
        }
    }
    for d in [
        champernowne(3)?,
        infinite_de_bruijn(3)?,
        random_driver(3, 9)?,
    ] {
        for m in 1..=6 {
            if word_coverage(&d, m, 1 << 28)?
                .n_of_m
                .is_some_and(|n| n < 3u64.pow(m as u32) + m as u64 - 1)
            {
                failures.push(format!("{} m={m}", d.label()));
            }
        }
    }
    for (k, max_m) in [(2usize, 12usize), (3, 8), (4, 5)] {
        for m in 1..=max_m {
            let w = de_bruijn_word(k, m)?;
            let n = word_coverage(&DriverStream::literal(w), m, DEFAULT_COVERAGE_CAP)?.n_of_m;
            if n != Some((k.pow(m as u32) + m - 1) as u64) {
                failures.push(format!("de Bruijn K={k} m={m}: {}", ints(&n)));
            }
        }
    }
    ctx.prop(
        "word_drivers: de Bruijn optimal, no driver beats it",
        &failures,
    );

    let mut failures = Vec::new();
    let s = example4_driver(1.0)?.take(500_000)?;
    for (i, &sym) in s.iter().enumerate() {
        if sym != example4_z1_symbol(i as u64 + 1) {
            failures.push(format!("position {}", i + 1));
        }
    }
    ctx.prop("word_drivers: separating driver block layout", &failures);

    let mut failures = Vec::new();
    let drivers = [
        champernowne(2)?,
        champernowne(3)?,
        infinite_de_bruijn(2)?,
        infinite_de_bruijn(3)?,
        random_driver(2, 1)?,
        random_driver(3, 2)?,
        example4_driver(1.0)?,
        example4_driver(0.1)?,
    ];
    for d in &drivers {
        let mut prev = 0;
        for m in 1..=8 {
            let Some(n) = word_coverage(d, m, 1 << 26)?.n_of_m else {
                break;
            };
            if n < prev {
                failures.push(format!("{} m={m}", d.label()));
            }
            prev = n;
        }
    }
    ctx.prop("word_drivers: word coverage monotone in m", &failures);
    Ok(())
}

fn metric_properties(ctx: &mut Ctx) -> Result<()> {
    // Recovery soundness: brute re-simulation in one dimension, quadratic
    // coverage checks in two.
    let mut failures = Vec::new();
    let ifs = IfsSystem::cantor();
    let cloud = AttractorCloud::build(&ifs, 1e-4)?;
    let maps = [(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)];
    for d in [
        champernowne(2)?,
        infinite_de_bruijn(2)?,
        random_driver(2, 3)?,
    ] {
        for x0 in [-2.0, -0.4, 0.0, 0.37, 1.0, 2.9] {
            for j in 1..=6 {
                let eps = 3f64.powi(-j) * 0.9;
                let n = recovery_time(&ifs, &d, &[x0], eps, &cloud, 1 << 22)?
                    .n
                    .unwrap() as usize;
                let symbols = d.clone().take(n + 1)?;
                if brute_recovery_1d(&maps, &symbols, x0, eps, cloud.coords()) != Some(n) {
                    failures.push(format!("{} x0={x0} eps={eps}", d.label()));
                }
            }
        }
    }
    let ifs = IfsSystem::sierpinski();
    let cloud = AttractorCloud::build(&ifs, 1e-2)?;
    for d in [champernowne(3)?, infinite_de_bruijn(3)?] {
        for x0 in [[0.0, 0.0], [0.7, 0.1], [-1.0, 2.0]] {
            for j in 1..=4 {
                let eps = 0.5f64.powi(j);
                let n = recovery_time(&ifs, &d, &x0, eps, &cloud, 1 << 22)?
                    .n
                    .unwrap() as usize;
                let orbit = run_orbit(&ifs, &mut d.clone(), &x0, n)?;
                let covers_at_n = covers_brute(cloud.coords(), orbit.coords(), 2, eps);
                let covers_before =
                    n > 0 && covers_brute(cloud.coords(), &orbit.coords()[..2 * n], 2, eps);
                if !covers_at_n || covers_before {
                    failures.push(format!("{} x0={x0:?} eps={eps}", d.label()));
                }
            }
        }
    }
    ctx.prop("metrics: recovery times are exactly minimal", &failures);

    let ifs = IfsSystem::example4();
    let cloud = ifs_chaos::harness::example4_fixture(15)?;
    let d = example4_driver(1.0)?;
    let starts = [-1.0, 0.0, 0.1, 0.3, 0.6, 1.0, 2.0];
    let eps: Vec<f64> = (3..=12).map(|k| 0.5f64.powi(k)).collect();
    let mut failures = Vec::new();
    let mut per_start = Vec::new();
    for &x0 in &starts {
        per_start.push(recovery_times(
            &ifs,
            &d,
            &[x0],
            &eps,
            &cloud,
            1 << 20,
            false,
        )?);
    }
    for (i, k) in (3..=12).enumerate() {
        let worst = per_start
            .iter()
            .map(|recs| (log_rate(recs[i].n.unwrap(), recs[i].eps).unwrap() - 1.0).abs())
            .fold(0.0f64, f64::max);
        let kf = k as f64;
        let bound = (kf + 1.0).ln() / (kf * 2f64.ln()) + 2.0 / kf + 0.02;
        if worst > bound {
            failures.push(format!("k={k}: {worst} > {bound}"));
        }
    }
    ctx.prop("metrics: separating driver log_rate trend", &failures);

    // Geometric mid-points between consecutive radii.
    let psi = RateFunction::power(1.0)?;
    let mid: Vec<f64> = (3..=12).map(|k| 0.5f64.powf(k as f64 + 0.5)).collect();
    let mut inf_ratio = Vec::new();
    for (i, _) in mid.iter().enumerate() {
        let mut lowest = f64::INFINITY;
        for &x0 in &starts {
            let r = recovery_time(&ifs, &d, &[x0], mid[i], &cloud, 1 << 20)?;
            lowest = lowest.min(rate_ratio(r.n.unwrap(), &psi, mid[i])?);
        }
        inf_ratio.push(lowest);
    }
    let mut failures: Vec<String> = inf_ratio
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] <= w[0])
        .map(|(i, w)| format!("k={}: {:.3} -> {:.3}", i + 4, w[0], w[1]))
        .collect();
    let shown: Vec<String> = inf_ratio.iter().map(|v| format!("{v:.3}")).collect();
    let last = *inf_ratio.last().unwrap();
    if last <= 10.0 {
        failures.insert(
            0,
            format!(
                "inf ratio at k=12 is {last:.3}, not above 10 (k=3..=12: {})",
                shown.join(" ")
            ),
        );
    }
    ctx.prop("metrics: separating driver outpaces psi_z", &failures);
    Ok(())
}

type Files = Vec<(String, Vec<u8>)>;

fn files(dir: &Path) -> Files {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn run_to(
    mut config: ExperimentConfig,
    dir: &Path,
    cache: Option<&Path>,
) -> Result<(RunReport, Files)> {
    config.output.dir = Some(dir.to_path_buf());
    config.output.cache = cache.map(Path::to_path_buf);
    let report = run_experiment(&config)?;
    Ok((report, files(dir)))
}

fn harness_properties(ctx: &mut Ctx) -> Result<()> {
    let mut failures = Vec::new();
    for name in PRESET_NAMES {
        let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
        let (_, fa) = run_to(preset(name).unwrap(), a.path(), None)?;
        let (_, fb) = run_to(preset(name).unwrap(), b.path(), None)?;
        if fa != fb || fa.is_empty() {
            failures.push(name.to_string());
        }
    }
    ctx.prop(
        "harness: repeated preset runs are byte-identical",
        &failures,
    );

    let mut failures = Vec::new();
    let cache = tempfile::tempdir()?;
    for name in ["segment-dimension", "sierpinski-debruijn"] {
        let mut config = preset(name).unwrap();
        if name == "segment-dimension" {
            config.cloud = CloudSpec::Sampled {
                resolution: 1e-4,
                point_budget: 1 << 20,
            };
        }
        let (cold, warm, plain) = (
            tempfile::tempdir()?,
            tempfile::tempdir()?,
            tempfile::tempdir()?,
        );
        let (r1, f1) = run_to(config.clone(), cold.path(), Some(cache.path()))?;
        let (r2, f2) = run_to(config.clone(), warm.path(), Some(cache.path()))?;
        let (_, f3) = run_to(config, plain.path(), None)?;
        if r1.cache_hit || !r2.cache_hit || f1 != f2 || f1 != f3 {
            failures.push(name.to_string());
        }
    }
    ctx.prop("harness: warm cache equals cold run", &failures);
    Ok(())
}

fn property_suite(ctx: &mut Ctx) -> Result<Outcome> {
    ifs_properties(ctx)?;
    word_properties(ctx)?;
    metric_properties(ctx)?;
    harness_properties(ctx)?;
    let mut out = Outcome::new();
    for (name, res) in &ctx.props {
        match res {
            Ok(()) => out.note(format!("ok      {name}")),
            Err(e) => {
                out.ok = false;
                out.note(format!("FAILED  {name}: {e}"));
            }
        }
    }
    let failed = ctx.props.iter().filter(|(_, r)| r.is_err()).count();
    out.note(format!("{} properties, {failed} failing", ctx.props.len()));
    Ok(out)
}

type Criterion = fn(&mut Ctx) -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<u64>, Criterion); 10] = [
        (
            1,
            "separating driver recovery times equal the closed forms",
            Some(10),
            separating_closed_forms,
        ),
        (
            2,
            "Champernowne word coverage within the closed-form bound",
            Some(5),
            champernowne_word_bound,
        ),
        (
            3,
            "de Bruijn words are optimal and prefixes stable",
            Some(30),
            de_bruijn_optimality,
        ),
        (
            4,
            "Cantor/Champernowne log_rate within [0.55, 0.74]",
            Some(120),
            champernowne_fast_rate,
        ),
        (
            5,
            "key inequality holds on presets 1-4",
            None,
            key_inequality,
        ),
        (
            6,
            "covering word orbits cover the Cantor cloud",
            Some(30),
            covering_word_coverage,
        ),
        (
            7,
            "slow driver bracketing, repetition counts and rate ratios",
            Some(300),
            slow_bracketing,
        ),
        (
            8,
            "box dimension of segment, Cantor set and single point",
            Some(60),
            box_dimensions,
        ),
        (
            9,
            "de Bruijn c_m chain and rate bounds",
            Some(120),
            de_bruijn_chain,
        ),
        (10, "module property suite", None, property_suite),
    ];
    let mut ctx = Ctx::default();
    let mut failed = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let result = check(&mut ctx);
        let elapsed = start.elapsed();
        let mut out = result.unwrap_or_else(|e| Outcome {
            ok: false,
            details: vec![format!("error: {e}")],
        });
        let timing = match limit {
            Some(s) => {
                let within = elapsed < Duration::from_secs(s);
                out.require(
                    within,
                    format!("runtime {:.1} s exceeds {s} s", elapsed.as_secs_f64()),
                );
                format!("{:.2} s, limit {s} s", elapsed.as_secs_f64())
            }
            None => format!("{:.2} s", elapsed.as_secs_f64()),
        };
        if !out.ok {
            failed += 1;
        }
        println!(
            "[{}] {id}. {title} ({timing})",
            if out.ok { "PASS" } else { "FAIL" }
        );
        for line in &out.details {
            println!("    {line}");
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

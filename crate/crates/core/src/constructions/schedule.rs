use crate::error::{Error, Result};
use crate::ifs::geometry::distance;
use crate::ifs::{AttractorCloud, IfsSystem};
use crate::metrics::covering_estimate;
use crate::words::Word;

use super::base::BaseMapChoice;
use super::rate::RateFunction;
use super::sigma::{build_sigma, CoveringWord, SIGMA_BUDGET};

/// Limits for [`build_schedule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleLimits {
    pub k_max: usize,
    /// Largest admissible `v(k)`, the total length of the scheduled blocks.
    pub step_cap: u64,
}

/// One block `(i_*)^{p_k} σ_{m_k}` of the slow driver.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub k: usize,
    pub m: usize,
    pub p: u64,
    pub sigma: Word,
    pub n_hat: u64,
    /// `v(k)`: position of the last symbol of this block.
    pub v: u64,
}

impl ScheduleEntry {
    pub fn block_len(&self) -> u64 {
        self.p + self.sigma.len() as u64
    }

    /// `v(k − 1)`.
    pub fn v_before(&self) -> u64 {
        self.v - self.block_len()
    }
}

/// Value of the trend ratio `m·N̂(C_m)/ψ(3C_m)` at one sampled depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendSample {
    pub m: usize,
    pub c_m: f64,
    pub n_hat: u64,
    /// `None` when `ψ(3C_m)` overflows.
    pub ratio: Option<f64>,
    pub admissible: bool,
}

#[derive(Debug, Clone)]
pub struct Schedule {
    pub psi: RateFunction,
    pub base: BaseMapChoice,
    pub entries: Vec<ScheduleEntry>,
    /// `diam_upper + 1`, so that `C_m = L^m·scale`.
    pub scale: f64,
    pub lip: f64,
    pub trend: Vec<TrendSample>,
    /// Why the schedule stopped before `k_max`, if it did.
    pub truncated: Option<String>,
}

impl Schedule {
    /// `C_m = L^m·(diam_upper + 1)`.
    pub fn c_of(&self, m: usize) -> f64 {
        c_of(self.lip, self.scale, m)
    }

    /// `ε_k = 3C_{m_k}` for the 1-based block index `k`.
    pub fn eps(&self, k: usize) -> f64 {
        3.0 * self.c_of(self.entries[k - 1].m)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }

    pub fn total_len(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.v)
    }
}

fn c_of(lip: f64, scale: f64, m: usize) -> f64 {
    lip.powi(m as i32) * scale
}

struct Depth {
    m: usize,
    c_m: f64,
    sigma: CoveringWord,
    ratio: Option<f64>,
}

/// Chooses depths `m_1 < m_2 < …` and repetition counts `p_k = ⌈ψ(3C_{m_k})⌉`.
///
/// Depths are drawn from the window where `C_m` is at least the cloud
/// resolution and `K^m` addresses can be enumerated, keeping those where
/// `m·N̂(C_m)/ψ(3C_m)` exceeds every later value in the window. `m_1` is
/// the first with `C_{m_1} < δ/2`; each later depth is the first satisfying `m_{k+1} > m_k + k`, a packing bound for the
/// cloud at `C_m` above `v(k)`, and a packing bound for the cloud outside
/// `B(x_*, δ)` at `3C_m` above `v(k) + m_1 + 1`.
pub fn build_schedule(
    ifs: &IfsSystem,
    cloud: &AttractorCloud,
    psi: &RateFunction,
    base: &BaseMapChoice,
    limits: ScheduleLimits,
) -> Result<Schedule> {
    if limits.k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    if cloud.dim() != ifs.dim() || base.x_star.len() != ifs.dim() {
        return Err(Error::InvalidInput(
            "schedule inputs disagree on dimension".into(),
        ));
    }
    let lip = ifs.lip_max();
    let scale = cloud.diam_upper() + 1.0;
    let k = ifs.len() as u64;

    let mut samples: Vec<(TrendSample, CoveringWord)> = Vec::new();
    for m in 1usize.. {
        let c_m = c_of(lip, scale, m);
        let fits = k.checked_pow(m as u32).is_some_and(|t| t <= SIGMA_BUDGET);
        if c_m < cloud.resolution() || !fits {
            break;
        }
        let sigma = build_sigma(ifs, c_m, m)?;
        let ratio = match psi.eval(3.0 * c_m) {
            Ok(v) => Some(m as f64 * sigma.n_hat as f64 / v),
            Err(Error::Overflow { .. }) => None,
            Err(e) => return Err(e),
        };
        let sample = TrendSample {
            m,
            c_m,
            n_hat: sigma.n_hat as u64,
            ratio,
            admissible: false,
        };
        samples.push((sample, sigma));
    }
    let window = samples.len();
    if window == 0 {
        return Err(Error::InvalidInput(
            "cloud resolution is too coarse for any schedule depth".into(),
        ));
    }
    // Admissible depths are those the ratio never climbs back above later in
    // the window, so the admissible ratios form a strictly decreasing sequence.
    let mut later_max = f64::NEG_INFINITY;
    for (t, _) in samples.iter_mut().rev() {
        let r = t.ratio.unwrap_or(0.0);
        t.admissible = r > later_max || (r == 0.0 && later_max <= 0.0);
        later_max = later_max.max(r);
    }
    let head = (2 * window).div_ceil(3).max(1);
    let head_min = samples[..head]
        .iter()
        .map(|(t, _)| t.ratio.unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    let tail_value = samples[window - 1].0.ratio.unwrap_or(0.0);
    if window < 2 || tail_value >= head_min {
        let ratios: Vec<String> = samples
            .iter()
            .map(|(t, _)| match t.ratio {
                Some(r) => format!("m={}: {r:.4e}", t.m),
                None => format!("m={}: overflow", t.m),
            })
            .collect();
        return Err(Error::PsiTooSlow(format!(
            "m*N(C_m)/psi(3C_m) does not fall below its early minimum by m = {window}: [{}]",
            ratios.join(", ")
        )));
    }
    let trend: Vec<TrendSample> = samples.iter().map(|(t, _)| *t).collect();
    let depths: Vec<Depth> = samples
        .into_iter()
        .filter(|(t, _)| t.admissible)
        .map(|(t, sigma)| Depth {
            m: t.m,
            c_m: t.c_m,
            sigma,
            ratio: t.ratio,
        })
        .collect();

    let outside: Vec<f64> = cloud
        .points()
        .filter(|p| distance(p, &base.x_star) > base.delta)
        .flatten()
        .copied()
        .collect();
    let half_delta = base.delta / 2.0;
    let mut entries: Vec<ScheduleEntry> = Vec::new();
    let mut truncated = None;
    let mut v = 0u64;
    let mut m1 = 0usize;
    let mut cursor = 0usize;
    while entries.len() < limits.k_max {
        let kk = entries.len();
        let mut chosen = None;
        while cursor < depths.len() {
            let d = &depths[cursor];
            cursor += 1;
            let ok = if kk == 0 {
                d.c_m < half_delta
            } else {
                let prev = &entries[kk - 1];
                d.m > prev.m + kk
                    && covering_estimate(cloud.coords(), cloud.dim(), d.c_m)?.lower > v
                    && !outside.is_empty()
                    && covering_estimate(&outside, cloud.dim(), 3.0 * d.c_m)?.lower
                        > v + m1 as u64 + 1
            };
            if ok {
                chosen = Some(cursor - 1);
                break;
            }
        }
        let Some(idx) = chosen else {
            truncated = Some(format!(
                "no admissible depth for block {} within the sampled window m <= {window}",
                kk + 1
            ));
            break;
        };
        let d = &depths[idx];
        if d.ratio.is_none() {
            truncated = Some(format!("psi overflows at depth {} (block {})", d.m, kk + 1));
            break;
        }
        let psi_val = psi.eval(3.0 * d.c_m)?;
        let p = psi_val.ceil();
        let n_hat = d.sigma.n_hat as u64;
        let block = p + (d.m as u64 * n_hat) as f64;
        if !(v as f64 + block <= limits.step_cap as f64) {
            truncated = Some(format!(
                "block {} needs {block} steps, cap {} leaves {}",
                kk + 1,
                limits.step_cap,
                limits.step_cap.saturating_sub(v)
            ));
            break;
        }
        let p = p as u64;
        v += p + d.m as u64 * n_hat;
        if kk == 0 {
            m1 = d.m;
        }
        entries.push(ScheduleEntry {
            k: kk + 1,
            m: d.m,
            p,
            sigma: d.sigma.word.clone(),
            n_hat,
            v,
        });
    }
    if entries.is_empty() {
        return Err(Error::Budget(format!(
            "no schedule block fits: {}",
            truncated.unwrap_or_default()
        )));
    }
    Ok(Schedule {
        psi: psi.clone(),
        base: base.clone(),
        entries,
        scale,
        lip,
        trend,
        truncated,
    })
}

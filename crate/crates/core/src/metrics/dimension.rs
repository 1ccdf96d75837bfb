use super::cover::{covering_estimate, CoverEstimate};
use crate::error::{Error, Result};
use crate::ifs::AttractorCloud;

/// Scales `b_m = a·r^m` for `m_lo ..= m_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSchedule {
    pub a: f64,
    pub r: f64,
    pub m_lo: u32,
    pub m_hi: u32,
}

impl ScaleSchedule {
    pub fn scale(&self, m: u32) -> f64 {
        self.a * self.r.powi(m as i32)
    }
}

/// Box-counting estimate over a geometric scale window.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    /// Least-squares slope of `ln upper` against `ln(1/b_m)`.
    pub value: f64,
    /// Slopes of the lower and upper curves, smaller first.
    pub bracket: (f64, f64),
    /// `min_m ln(upper_m)/ln(1/b_m)` over the window.
    pub liminf_proxy: f64,
    pub schedule: ScaleSchedule,
    /// `(b_m, estimate)` for every scale kept in the window.
    pub samples: Vec<(f64, CoverEstimate)>,
}

impl DimensionEstimate {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Keeps scales with `2·resolution < b_m < 1` and fits the covering curves.
pub fn box_dimension(
    cloud: &AttractorCloud,
    a: f64,
    r: f64,
    m_lo: u32,
    m_hi: u32,
) -> Result<DimensionEstimate> {
    if !(r > 0.0 && r < 1.0) || !(a > 0.0 && a.is_finite()) || m_lo > m_hi {
        return Err(Error::InvalidInput(format!(
            "scale schedule a={a}, r={r}, m={m_lo}..={m_hi} is invalid"
        )));
    }
    let schedule = ScaleSchedule { a, r, m_lo, m_hi };
    let floor = 2.0 * cloud.resolution();
    let mut samples = Vec::new();
    for m in m_lo..=m_hi {
        let b = schedule.scale(m);
        if b > floor && b < 1.0 {
            samples.push((b, covering_estimate(cloud.coords(), cloud.dim(), b)?));
        }
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no scale in the window lies in ({floor}, 1)"
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|(b, _)| (1.0 / b).ln()).collect();
    let upper: Vec<f64> = samples.iter().map(|(_, c)| (c.upper as f64).ln()).collect();
    let lower: Vec<f64> = samples.iter().map(|(_, c)| (c.lower as f64).ln()).collect();
    let liminf_proxy = upper
        .iter()
        .zip(&xs)
        .map(|(u, x)| u / x)
        .fold(f64::INFINITY, f64::min);
    let (value, slope_lower) = if samples.len() == 1 {
        (liminf_proxy, lower[0] / xs[0])
    } else {
        (slope(&xs, &upper), slope(&xs, &lower))
    };
    Ok(DimensionEstimate {
        value,
        bracket: (value.min(slope_lower), value.max(slope_lower)),
        liminf_proxy,
        schedule,
        samples,
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

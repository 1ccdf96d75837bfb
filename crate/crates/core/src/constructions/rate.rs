use std::fmt;

use crate::error::{Error, Result};
use crate::ifs::{AttractorCloud, IfsSystem};
use crate::words::alpha;

/// A rate function `ψ` with `ψ(ε) → ∞` as `ε → 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum RateFunction {
    /// `(1/ε)^z`.
    Power { z: f64 },
    /// `exp^{(n−1)}(1/ε)`; `n = 1` is `1/ε`.
    IterExp { n: u32 },
    /// `K·α·base^q·(1/ε)^q`.
    Bounding {
        k: usize,
        alpha: f64,
        base: f64,
        exponent: f64,
    },
    /// Log-log interpolation through `(ε, ψ(ε))` samples, extended linearly in
    /// log-log coordinates past both ends.
    Table { points: Vec<(f64, f64)> },
}

impl RateFunction {
    pub fn power(z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "power rate needs z > 0, got {z}"
            )));
        }
        Ok(Self::Power { z })
    }

    pub fn iterexp(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "iterated exponential needs n >= 1".into(),
            ));
        }
        Ok(Self::IterExp { n })
    }

    /// The bounding rate for starting point `x0`: `base = diam A + d(x0, A)`
    /// taken from the cloud's upper bounds, `q = ln K / ln(1/L)`. With
    /// `c_m = L^m·base` it satisfies `ψ(c_{m−1}) = K^m·α(K)`.
    pub fn bounding(ifs: &IfsSystem, cloud: &AttractorCloud, x0: &[f64]) -> Result<Self> {
        ifs.check_point(x0)?;
        let k = ifs.len();
        let base = cloud.diam_upper() + cloud.distance_to(x0) + cloud.resolution();
        let exponent = (k as f64).ln() / (1.0 / ifs.lip_max()).ln();
        let rate = Self::Bounding {
            k,
            alpha: alpha(k) as f64,
            base,
            exponent,
        };
        rate.validate()?;
        Ok(rate)
    }

    pub fn table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "rate table needs at least two points".into(),
            ));
        }
        if points
            .iter()
            .any(|&(e, v)| !(e > 0.0 && v > 0.0 && e.is_finite() && v.is_finite()))
        {
            return Err(Error::InvalidInput(
                "rate table entries must be positive and finite".into(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("rate table has repeated eps".into()));
        }
        let rate = Self::Table { points };
        rate.validate()?;
        Ok(rate)
    }

    /// `ψ(ε)`, or [`Error::Overflow`] when it is not representable.
    pub fn eval(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::InvalidInput(format!(
                "rate evaluated at eps = {eps}"
            )));
        }
        let v = match self {
            Self::Power { z } => (1.0 / eps).powf(*z),
            Self::IterExp { n } => {
                let mut v = 1.0 / eps;
                for _ in 1..*n {
                    v = v.exp();
                    if !v.is_finite() {
                        break;
                    }
                }
                v
            }
            Self::Bounding {
                k,
                alpha,
                base,
                exponent,
            } => *k as f64 * alpha * (base / eps).powf(*exponent),
            Self::Table { points } => {
                let x = eps.ln();
                let i = points
                    .partition_point(|p| p.0 < eps)
                    .clamp(1, points.len() - 1);
                let (e0, v0) = points[i - 1];
                let (e1, v1) = points[i];
                let t = (x - e0.ln()) / (e1.ln() - e0.ln());
                (v0.ln() + t * (v1.ln() - v0.ln())).exp()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow { eps })
        }
    }

    /// Checks by sampling that `ψ` is positive and grows without bound as
    /// `ε` shrinks. Overflow counts as growth.
    pub fn validate(&self) -> Result<()> {
        let mut prev = 0.0f64;
        let mut first = None;
        for j in 1..=12 {
            let eps = 10f64.powi(-j);
            match self.eval(eps) {
                Ok(v) => {
                    if !(v > 0.0) || v < prev {
                        return Err(Error::InvalidInput(format!(
                            "rate function {self} is not increasing as eps -> 0 (at eps = {eps:e})"
                        )));
                    }
                    first.get_or_insert(v);
                    prev = v;
                }
                Err(Error::Overflow { .. }) => return Ok(()),
                Err(e) => return Err(e),
            }
        }
        match first {
            Some(f) if prev > f => Ok(()),
            _ => Err(Error::InvalidInput(format!(
                "rate function {self} does not grow"
            ))),
        }
    }
}

impl fmt::Display for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { z } => write!(f, "power(z={z})"),
            Self::IterExp { n } => write!(f, "iterexp(n={n})"),
            Self::Bounding {
                k,
                alpha,
                base,
                exponent,
            } => {
                write!(f, "bounding(K={k},alpha={alpha},base={base},q={exponent})")
            }
            Self::Table { points } => write!(f, "table({} points)", points.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let p = RateFunction::power(2.0).unwrap();
        assert!((p.eval(0.1).unwrap() - 100.0).abs() < 1e-9);
        let e1 = RateFunction::iterexp(1).unwrap();
        assert!((e1.eval(0.25).unwrap() - 4.0).abs() < 1e-12);
        let e2 = RateFunction::iterexp(2).unwrap();
        let eps = 1.0 / 1e6f64.ln();
        assert!((e2.eval(eps).unwrap() / 1e6 - 1.0).abs() < 1e-9);
        let e3 = RateFunction::iterexp(3).unwrap();
        assert!(matches!(e3.eval(1e-3), Err(Error::Overflow { .. })));
        assert!(RateFunction::power(0.0).is_err());
        assert!(RateFunction::iterexp(0).is_err());
    }

    #[test]
    fn bounding_hits_k_to_the_m_alpha() {
        let cantor = IfsSystem::cantor();
        let cloud = AttractorCloud::build(&cantor, 1e-4).unwrap();
        let psi = RateFunction::bounding(&cantor, &cloud, &[0.0]).unwrap();
        let RateFunction::Bounding { base, .. } = psi else {
            unreachable!()
        };
        for m in 1..10 {
            let c = (1.0f64 / 3.0).powi(m - 1) * base;
            let expect = 2f64.powi(m) * 2.0;
            assert!((psi.eval(c).unwrap() / expect - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn table_interpolates_in_log_log() {
        let t = RateFunction::table(vec![(1e-2, 100.0), (1e-1, 10.0)]).unwrap();
        assert!((t.eval(10f64.powf(-1.5)).unwrap() - 10f64.powf(1.5)).abs() < 1e-9);
        assert!((t.eval(1e-3).unwrap() - 1000.0).abs() < 1e-6);
        assert!(RateFunction::table(vec![(1e-2, 1.0), (1e-1, 10.0)]).is_err());
    }
}

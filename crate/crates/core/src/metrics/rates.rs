use super::cover::CoverEstimate;
use super::recovery::RecoveryRecord;
use crate::constructions::RateFunction;
use crate::error::Result;

/// `ln n / ln(1/ε)`, undefined for `n = 0`.
pub fn log_rate(n: u64, eps: f64) -> Option<f64> {
    (n >= 1).then(|| (n as f64).ln() / (1.0 / eps).ln())
}

/// `ln^{(order)}(n) / ln(1/ε)`, with `−∞` when the iterated logarithm leaves
/// its domain.
pub fn iterated_log_rate(n: u64, eps: f64, order: u32) -> f64 {
    let mut v = n as f64;
    for _ in 0..order {
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        v = v.ln();
    }
    v / (1.0 / eps).ln()
}

/// `n / ψ(ε)`.
pub fn rate_ratio(n: u64, psi: &RateFunction, eps: f64) -> Result<f64> {
    Ok(n as f64 / psi.eval(eps)?)
}

/// `n + 1 ≥ lower`: a recovery time can never undercut the packing bound.
/// Records without a finite `n` pass trivially.
pub fn key_inequality_check(record: &RecoveryRecord, cover: &CoverEstimate) -> bool {
    match record.n {
        Some(n) => n + 1 >= cover.lower,
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_rates() {
        assert_eq!(log_rate(8, 0.5), Some(3.0));
        assert_eq!(log_rate(1, 0.3), Some(0.0));
        assert_eq!(log_rate(0, 0.3), None);
        let v = iterated_log_rate(1619, (-1.0f64).exp(), 2);
        assert!((v - 2.0).abs() < 0.01);
        assert_eq!(iterated_log_rate(2, 0.1, 3), f64::NEG_INFINITY);
        assert_eq!(iterated_log_rate(37, 0.1, 1), log_rate(37, 0.1).unwrap());
    }

    #[test]
    fn ratios() {
        let p1 = RateFunction::power(1.0).unwrap();
        let r = rate_ratio(1000, &p1, 1e-3).unwrap();
        assert!((1.0..=1.001).contains(&r));
        let p2 = RateFunction::power(2.0).unwrap();
        assert!((rate_ratio(50, &p2, 0.1).unwrap() - 0.5).abs() < 1e-12);
        let e2 = RateFunction::iterexp(2).unwrap();
        let r = rate_ratio(1_000_000, &e2, 1.0 / 1e6f64.ln()).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn key_inequality() {
        let rec = |n| RecoveryRecord {
            driver: "t".into(),
            x0: vec![0.0],
            eps: 0.1,
            n,
            guard: 0.0,
            n_outer: None,
            cap: 10,
        };
        let cover = |lower| CoverEstimate {
            eps: 0.1,
            lower,
            upper: lower,
        };
        assert!(key_inequality_check(&rec(Some(0)), &cover(1)));
        assert!(!key_inequality_check(&rec(Some(0)), &cover(2)));
    }
}

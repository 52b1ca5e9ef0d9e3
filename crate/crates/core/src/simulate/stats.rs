//! Summary statistics for replicate tables.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn se(x: &[f64]) -> f64 {
    sd(x) / (x.len() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub n: usize,
    /// Mean of `a - b`.
    pub mean_diff: f64,
    pub t: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Paired two-sided t-test of `a` against `b`.
///
/// All-zero differences give `t = 0, p = 1`; constant nonzero differences
/// give an infinite statistic with `p = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> PairedTest {
    assert_eq!(a.len(), b.len(), "paired test needs equal lengths");
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let m = mean(&d);
    if n < 2 {
        return PairedTest {
            n,
            mean_diff: m,
            t: f64::NAN,
            p_value: f64::NAN,
        };
    }
    let s = se(&d);
    if s == 0.0 {
        let (t, p) = if m == 0.0 {
            (0.0, 1.0)
        } else {
            (m.signum() * f64::INFINITY, 0.0)
        };
        return PairedTest {
            n,
            mean_diff: m,
            t,
            p_value: p,
        };
    }
    let t = m / s;
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df > 0");
    let p = 2.0 * dist.cdf(-t.abs());
    PairedTest {
        n,
        mean_diff: m,
        t,
        p_value: p,
    }
}

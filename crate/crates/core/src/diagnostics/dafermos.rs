//! Entropy production rates and the Dafermos admissibility order.

use crate::error::{Error, Result};

/// Samples closer than this in time are treated as the same instant.
const TIME_MATCH: f64 = 1e-9;

fn sample_index(series: &[(f64, f64)], t: f64) -> Option<usize> {
    series
        .iter()
        .position(|&(s, _)| (s - t).abs() <= TIME_MATCH * t.abs().max(1.0))
}

/// Forward difference `(s[i + w] - s[i]) / (t[i + w] - t[i])` where `t[i] = t`.
pub fn entropy_production_rate(series: &[(f64, f64)], t: f64, window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::Series("rate window must be positive".into()));
    }
    let i = sample_index(series, t)
        .ok_or_else(|| Error::OutOfRange(format!("t = {t} is not a sample time of the series")))?;
    let (t0, s0) = series[i];
    let &(t1, s1) = series.get(i + window).ok_or_else(|| {
        Error::Series(format!(
            "series ends {} samples after t = {t}, window is {window}",
            series.len() - 1 - i
        ))
    })?;
    Ok((s1 - s0) / (t1 - t0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DafermosOrder {
    /// `b` produces strictly more entropy at the matching time.
    APrecedesB,
    BPrecedesA,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DafermosVerdict {
    pub order: DafermosOrder,
    pub rate_a: f64,
    pub rate_b: f64,
    /// False when the series disagree before `t_match`.
    pub agree_before: bool,
}

/// Compares two total-entropy series that coincide up to `t_match`.
pub fn dafermos_compare(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    t_match: f64,
    tol: f64,
    window: usize,
) -> Result<DafermosVerdict> {
    let rate_a = entropy_production_rate(a, t_match, window)?;
    let rate_b = entropy_production_rate(b, t_match, window)?;
    let mut agree_before = true;
    for &(t, sa) in a
        .iter()
        .take_while(|&&(t, _)| t <= t_match + TIME_MATCH * t_match.abs().max(1.0))
    {
        match sample_index(b, t) {
            Some(k) if (b[k].1 - sa).abs() <= tol => {}
            _ => agree_before = false,
        }
    }
    let order = if !agree_before {
        DafermosOrder::Incomparable
    } else if rate_b > rate_a {
        DafermosOrder::APrecedesB
    } else if rate_a > rate_b {
        DafermosOrder::BPrecedesA
    } else {
        DafermosOrder::Incomparable
    };
    Ok(DafermosVerdict {
        order,
        rate_a,
        rate_b,
        agree_before,
    })
}

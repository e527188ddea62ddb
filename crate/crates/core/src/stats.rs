//! Goodness-of-fit statistics and histogram binning.

use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson χ² test of `observed` counts against cell probabilities.
/// Cells with expected count below `min_expected` are pooled into one.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::DimensionMismatch { expected: probs.len(), got: observed.len() });
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::Empty);
    }
    let n = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * n;
        if e < min_expected {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    } else if pooled_obs > 0.0 {
        stat = f64::INFINITY;
    }
    if cells < 2 {
        return Err(Error::Empty);
    }
    let dof = cells - 1;
    let p_value = if stat.is_finite() {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat)
    } else {
        0.0
    };
    Ok(ChiSquare { statistic: stat, dof, p_value })
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsTest> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    let p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
    Ok(KsTest { statistic: d, p_value })
}

/// Total-variation distance between the empirical law of `counts` and
/// Poisson(`mean`).
pub fn tv_distance_poisson(counts: &[u64], mean: f64) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::Empty);
    }
    let max = *counts.iter().max().unwrap();
    let mut freq = vec![0u64; max as usize + 1];
    for &c in counts {
        freq[c as usize] += 1;
    }
    let n = counts.len() as f64;
    let mut tv = 0.0;
    let mut covered = 0.0;
    for (k, &f) in freq.iter().enumerate() {
        let p = poisson_pmf(k as u64, mean);
        covered += p;
        tv += (f as f64 / n - p).abs();
    }
    tv += (1.0 - covered).max(0.0);
    Ok(0.5 * tv)
}

pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    Poisson::new(mean).expect("positive mean").pmf(k)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Histogram with equal-width bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub rule: &'static str,
}

impl Histogram {
    /// Freedman–Diaconis width `2·IQR·n^{-1/3}`; falls back to a single bin
    /// for degenerate data.
    pub fn freedman_diaconis(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        let mut xs = samples.to_vec();
        xs.sort_by(f64::total_cmp);
        let (lo, hi) = (xs[0], *xs.last().unwrap());
        let iqr = quantile(&xs, 0.75) - quantile(&xs, 0.25);
        let width = 2.0 * iqr / (xs.len() as f64).cbrt();
        let bins = if width > 0.0 && hi > lo {
            (((hi - lo) / width).ceil() as usize).clamp(1, 10_000)
        } else {
            1
        };
        let span = if hi > lo { hi - lo } else { 1.0 };
        let edges: Vec<f64> = (0..=bins).map(|i| lo + span * i as f64 / bins as f64).collect();
        let mut counts = vec![0u64; bins];
        for &x in &xs {
            let i = (((x - lo) / span) * bins as f64).floor() as usize;
            counts[i.min(bins - 1)] += 1;
        }
        Ok(Self { edges, counts, rule: "freedman-diaconis" })
    }

    /// Columns `lo,hi,count,density,reference`, `reference` being the
    /// density of the supplied overlay at the bin centre.
    pub fn write_csv<W: Write>(&self, w: W, overlay: impl Fn(f64) -> f64) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wr.write_record(["lo", "hi", "count", "density", "reference"])?;
        let n: u64 = self.counts.iter().sum();
        for (i, &c) in self.counts.iter().enumerate() {
            let (lo, hi) = (self.edges[i], self.edges[i + 1]);
            let density = c as f64 / (n as f64 * (hi - lo));
            wr.write_record([
                format!("{lo:.12e}"),
                format!("{hi:.12e}"),
                c.to_string(),
                format!("{density:.12e}"),
                format!("{:.12e}", overlay(0.5 * (lo + hi))),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Count histogram with its Poisson overlay, columns `count,observed,expected`.
pub fn write_count_histogram<W: Write>(w: W, counts: &[u64], mean: f64) -> Result<()> {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut freq = vec![0u64; max as usize + 1];
    for &c in counts {
        freq[c as usize] += 1;
    }
    let n = counts.len() as f64;
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(["count", "observed", "expected"])?;
    for (k, &f) in freq.iter().enumerate() {
        wr.write_record([
            k.to_string(),
            f.to_string(),
            format!("{:.6}", n * poisson_pmf(k as u64, mean)),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

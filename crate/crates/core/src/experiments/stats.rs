use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("statistic needs two nonempty samples")]
pub struct EmptySample;

/// Combined sample sizes up to this use exact permutation p-values.
pub const EXACT_LIMIT: usize = 12;

/// Effect size and significance of one pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonStats {
    pub a12: f64,
    /// U of the first sample: pairs it wins plus half the ties.
    pub u_statistic: f64,
    pub p_value: f64,
    pub median_a: f64,
    pub median_b: f64,
}

/// Probability that a draw from `xs` exceeds one from `ys`, ties counting
/// one half.
pub fn vargha_delaney(xs: &[f64], ys: &[f64]) -> Result<f64, EmptySample> {
    if xs.is_empty() || ys.is_empty() {
        return Err(EmptySample);
    }
    Ok(u_first(xs, ys) / (xs.len() * ys.len()) as f64)
}

fn u_first(xs: &[f64], ys: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in xs {
        for y in ys {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided Mann-Whitney U test. Returns (U of `xs`, p-value).
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), EmptySample> {
    if xs.is_empty() || ys.is_empty() {
        return Err(EmptySample);
    }
    let u = u_first(xs, ys);
    let p = if xs.len() + ys.len() <= EXACT_LIMIT {
        exact_p(xs, ys, u)
    } else {
        normal_p(xs, ys, u)
    };
    Ok((u, p.clamp(0.0, 1.0)))
}

/// Share of all relabellings of the pooled sample whose U lies at least as
/// far from its mean as the observed one.
fn exact_p(xs: &[f64], ys: &[f64], observed: f64) -> f64 {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let n = pooled.len();
    let n1 = xs.len();
    let mean = (n1 * ys.len()) as f64 / 2.0;
    let target = (observed - mean).abs() - 1e-9;
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let (mut a, mut b) = (Vec::with_capacity(n1), Vec::with_capacity(n - n1));
        for (i, v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a.push(*v);
            } else {
                b.push(*v);
            }
        }
        total += 1;
        if (u_first(&a, &b) - mean).abs() >= target {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

/// Normal approximation with tie and continuity corrections.
fn normal_p(xs: &[f64], ys: &[f64], u: f64) -> f64 {
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let n = n1 + n2;
    let mut pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let mean = n1 * n2 / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    2.0 * (1.0 - standard.cdf(z))
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn compare(xs: &[f64], ys: &[f64]) -> Result<ComparisonStats, EmptySample> {
    let (u_statistic, p_value) = mann_whitney_u(xs, ys)?;
    Ok(ComparisonStats {
        a12: vargha_delaney(xs, ys)?,
        u_statistic,
        p_value,
        median_a: median(xs),
        median_b: median(ys),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a12_examples() {
        assert_eq!(vargha_delaney(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), 0.5);
        assert_eq!(vargha_delaney(&[1.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(vargha_delaney(&[3.0, 1.0], &[2.0, 2.0]).unwrap(), 0.5);
        assert_eq!(vargha_delaney(&[], &[1.0]), Err(EmptySample));
    }

    #[test]
    fn separated_samples_are_significant() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys: Vec<f64> = (11..=20).map(f64::from).collect();
        let (u, p) = mann_whitney_u(&xs, &ys).unwrap();
        assert_eq!(u, 0.0);
        assert!(p < 0.001, "{p}");
    }

    #[test]
    fn identical_samples_are_not() {
        let xs = [0.5, 0.7, 0.7, 0.9, 1.0, 0.2, 0.3, 0.3, 0.8, 0.4];
        let (_, p) = mann_whitney_u(&xs, &xs).unwrap();
        assert!((p - 1.0).abs() < 0.01);
        let (_, p) = mann_whitney_u(&xs[..3], &xs[..3]).unwrap();
        assert_eq!(p, 1.0);
        let (_, p) = mann_whitney_u(&[1.0; 20], &[1.0; 20]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn single_elements_use_the_exact_path() {
        assert_eq!(mann_whitney_u(&[1.0], &[2.0]).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn small_exact_value() {
        // all three of xs below both ys: only 2 of the 10 splits are as extreme
        let (u, p) = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0]).unwrap();
        assert_eq!(u, 0.0);
        assert!((p - 0.2).abs() < 1e-12);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}

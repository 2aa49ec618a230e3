//! Effect size, signed-rank test, medians and ECDFs over EXAM values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptyInput,
    #[error("all paired differences are zero")]
    AllDifferencesZero,
}

/// Largest number of nonzero differences handled by exact enumeration.
pub const EXACT_LIMIT: usize = 25;

/// `(#{x > y} - #{x < y}) / (|xs| |ys|)` over all pairs.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut greater, mut less) = (0i64, 0i64);
    for &x in xs {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        greater += below as i64;
        less += (sorted.len() - not_above) as i64;
    }
    Ok((greater - less) as f64 / (xs.len() * ys.len()) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedRank {
    /// Nonzero differences used.
    pub n: usize,
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// One-sided Wilcoxon signed-rank test of `a < b` on paired samples.
///
/// Zero differences are dropped; tied magnitudes get average ranks.
pub fn wilcoxon_one_sided(pairs: &[(f64, f64)]) -> Result<SignedRank, StatsError> {
    let diffs: Vec<f64> = pairs.iter().map(|&(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(StatsError::AllDifferencesZero);
    }
    let n = diffs.len();
    let (doubled, ties) = doubled_ranks(&diffs);
    let w2: u64 = diffs
        .iter()
        .zip(&doubled)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let w_plus = w2 as f64 / 2.0;

    if n <= EXACT_LIMIT {
        let counts = sign_sum_distribution(&doubled);
        let at_most: f64 = counts[..=w2 as usize].iter().sum();
        let p = at_most / 2f64.powi(n as i32);
        return Ok(SignedRank {
            n,
            w_plus,
            p_value: p,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let z = (w_plus - mean + 0.5) / var.sqrt();
    Ok(SignedRank {
        n,
        w_plus,
        p_value: normal_cdf(z).min(1.0),
        exact: false,
    })
}

/// Twice the average rank of each `|d|` (always an integer), plus tie group
/// sizes.
fn doubled_ranks(diffs: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0u64; diffs.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mag = diffs[order[start]].abs();
        let mut end = start;
        while end < order.len() && diffs[order[end]].abs() == mag {
            end += 1;
        }
        // ranks start+1 ..= end, doubled average = start + 1 + end
        for &i in &order[start..end] {
            ranks[i] = (start + 1 + end) as u64;
        }
        ties.push((end - start) as u64);
        start = end;
    }
    (ranks, ties)
}

/// `counts[s]` = number of sign patterns whose positive ranks sum to `s`.
fn sign_sum_distribution(doubled: &[u64]) -> Vec<f64> {
    let total: u64 = doubled.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Complementary error function, Chebyshev fit with fractional error below
/// 1.2e-7 everywhere.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Distinct sorted values with the fraction of the sample at or below each.
pub fn ecdf(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, x) in v.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = frac,
            _ => out.push((*x, frac)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_delta(xs: &[f64], ys: &[f64]) -> f64 {
        let mut s = 0i64;
        for x in xs {
            for y in ys {
                s += (x > y) as i64 - (x < y) as i64;
            }
        }
        s as f64 / (xs.len() * ys.len()) as f64
    }

    /// P(W+ <= observed) by listing every sign assignment, with average ranks
    /// computed independently in floating point.
    fn brute_wilcoxon(pairs: &[(f64, f64)]) -> f64 {
        let d: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
        let n = d.len();
        let rank = |i: usize| {
            let m = d[i].abs();
            let below = d.iter().filter(|x| x.abs() < m).count() as f64;
            let equal = d.iter().filter(|x| x.abs() == m).count() as f64;
            below + (equal + 1.0) / 2.0
        };
        let ranks: Vec<f64> = (0..n).map(rank).collect();
        let observed: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks[i]).sum();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if w <= observed + 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn delta_examples() {
        // pairs: 1<2, 1<3, 2=2, 2<3
        assert_eq!(cliffs_delta(&[1.0, 2.0], &[2.0, 3.0]).unwrap(), -0.75);
        assert_eq!(cliffs_delta(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), -1.0);
        assert_eq!(cliffs_delta(&[3.0, 1.0, 2.0], &[2.0, 3.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cliffs_delta(&[], &[1.0]), Err(StatsError::EmptyInput));
    }

    #[test]
    fn wilcoxon_examples() {
        let neg = vec![(1.0, 2.0); 5];
        assert_eq!(wilcoxon_one_sided(&neg).unwrap().p_value, 0.03125);
        let pos = vec![(2.0, 1.0); 5];
        assert!(wilcoxon_one_sided(&pos).unwrap().p_value >= 0.96875);
        assert_eq!(
            wilcoxon_one_sided(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(StatsError::AllDifferencesZero)
        );
    }

    #[test]
    fn wilcoxon_normal_path_is_close_to_exact_tail() {
        // 30 equal negative differences: far in the lower tail
        let pairs = vec![(0.0, 1.0); 30];
        let r = wilcoxon_one_sided(&pairs).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-5);
        // symmetric-looking sample sits near the middle
        let pairs: Vec<(f64, f64)> = (1..=30)
            .map(|i| if i % 2 == 0 { (i as f64, 0.0) } else { (0.0, i as f64) })
            .collect();
        let r = wilcoxon_one_sided(&pairs).unwrap();
        assert!((r.p_value - 0.5).abs() < 0.1, "{}", r.p_value);
    }

    #[test]
    fn erfc_reference_values() {
        assert!((erfc(0.0) - 1.0).abs() < 1e-7);
        assert!((erfc(1.0) - 0.157_299_207_050_285_1).abs() < 1e-7);
        assert!((erfc(-1.0) - 1.842_700_792_949_715).abs() < 1e-7);
    }

    #[test]
    fn median_and_ecdf() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(ecdf(&[2.0, 1.0, 2.0, 4.0]), vec![(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]);
        assert!(ecdf(&[]).is_empty());
    }

    fn small_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0u8..8).prop_map(|v| v as f64 * 12.5), 1..12)
    }

    proptest! {
        #[test]
        fn delta_is_antisymmetric_and_matches_pair_count(xs in small_values(), ys in small_values()) {
            let d = cliffs_delta(&xs, &ys).unwrap();
            prop_assert_eq!(d, -cliffs_delta(&ys, &xs).unwrap());
            prop_assert_eq!(d, brute_delta(&xs, &ys));
            prop_assert!((-1.0..=1.0).contains(&d));
        }

        #[test]
        fn exact_wilcoxon_matches_enumeration(
            pairs in prop::collection::vec((0u8..6, 0u8..6), 1..=10)
        ) {
            let pairs: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
            match wilcoxon_one_sided(&pairs) {
                Ok(r) => prop_assert!((r.p_value - brute_wilcoxon(&pairs)).abs() < 1e-12),
                Err(e) => {
                    prop_assert_eq!(e, StatsError::AllDifferencesZero);
                    prop_assert!(pairs.iter().all(|(a, b)| a == b));
                }
            }
        }

        #[test]
        fn ecdf_is_monotone_and_ends_at_one(xs in small_values()) {
            let e = ecdf(&xs);
            prop_assert!(e.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
            prop_assert_eq!(e.last().unwrap().1, 1.0);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::Scores;
use crate::runner::{ExecutionMatrix, Outcome};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub ef: u64,
    pub ep: u64,
    pub nf: u64,
    pub np: u64,
}

/// Coverage spectrum of the original program's row. Timed-out cells carry
/// no verdict and are left out; crashes count as failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub counts: Vec<SpectrumCounts>,
    pub passed: u64,
    pub failed: u64,
}

impl Spectrum {
    pub fn tests(&self) -> u64 {
        self.passed + self.failed
    }

    /// SBFL cannot separate statements without both a passing and a failing
    /// test, and never with a single test.
    pub fn is_degenerate(&self) -> bool {
        self.passed == 0 || self.failed == 0 || self.tests() == 1
    }
}

pub fn spectrum(matrix: &ExecutionMatrix, statements: usize) -> Spectrum {
    let mut counts = vec![SpectrumCounts::default(); statements];
    let (mut passed, mut failed) = (0, 0);
    for v in &matrix.original().verdicts {
        if v.outcome == Outcome::Timeout {
            continue;
        }
        let fail = v.outcome.is_failure();
        if fail {
            failed += 1;
        } else {
            passed += 1;
        }
        for (s, c) in counts.iter_mut().enumerate() {
            match (v.covered.contains(&s), fail) {
                (true, true) => c.ef += 1,
                (true, false) => c.ep += 1,
                (false, true) => c.nf += 1,
                (false, false) => c.np += 1,
            }
        }
    }
    Spectrum {
        counts,
        passed,
        failed,
    }
}

/// `ef / sqrt((ef+nf)(ef+ep))`, evaluated as the root of one exact ratio.
pub fn ochiai_scores(spectrum: &Spectrum) -> Scores {
    let values = spectrum
        .counts
        .iter()
        .map(|c| {
            let denom = (c.ef + c.nf) * (c.ef + c.ep);
            if c.ef == 0 || denom == 0 {
                0.0
            } else {
                ((c.ef * c.ef) as f64 / denom as f64).sqrt()
            }
        })
        .collect();
    Scores {
        values,
        degenerate: spectrum.is_degenerate(),
    }
}

/// `(ef/F) / (ef/F + ep/P)` rewritten as `ef*P / (ef*P + ep*F)`, with each
/// ratio taken as 0 when its denominator is 0.
pub fn tarantula_scores(spectrum: &Spectrum) -> Scores {
    let values = spectrum
        .counts
        .iter()
        .map(|c| {
            let failed = c.ef + c.nf;
            let passed = c.ep + c.np;
            if c.ef == 0 || failed == 0 {
                return 0.0;
            }
            if passed == 0 {
                // ep/P is 0, so the ratio is (ef/F) / (ef/F)
                return 1.0;
            }
            let num = c.ef * passed;
            let den = num + c.ep * failed;
            num as f64 / den as f64
        })
        .collect();
    Scores {
        values,
        degenerate: spectrum.is_degenerate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(ef: u64, ep: u64, nf: u64, np: u64) -> Spectrum {
        Spectrum {
            counts: vec![SpectrumCounts { ef, ep, nf, np }],
            passed: ep + np,
            failed: ef + nf,
        }
    }

    #[test]
    fn single_failing_covering_test() {
        let s = single(1, 0, 0, 0);
        assert_eq!(ochiai_scores(&s).values, vec![1.0]);
        assert_eq!(tarantula_scores(&s).values, vec![1.0]);
        assert!(ochiai_scores(&s).degenerate);
    }

    #[test]
    fn zero_numerator() {
        let s = single(0, 3, 2, 1);
        assert_eq!(ochiai_scores(&s).values, vec![0.0]);
        assert_eq!(tarantula_scores(&s).values, vec![0.0]);
        assert!(!ochiai_scores(&s).degenerate);
    }

    #[test]
    fn one_pass_one_fail_both_covering() {
        let s = single(1, 1, 0, 0);
        let o = ochiai_scores(&s).values[0];
        assert!((o - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(tarantula_scores(&s).values, vec![0.5]);
    }

    #[test]
    fn equal_ratios_tie_exactly() {
        // 1/sqrt(2) reached from two different count vectors
        let a = single(1, 1, 0, 0);
        let b = single(2, 2, 0, 0);
        assert_eq!(ochiai_scores(&a).values, ochiai_scores(&b).values);
        let a = single(1, 1, 1, 1);
        let b = single(3, 3, 3, 3);
        assert_eq!(tarantula_scores(&a).values, tarantula_scores(&b).values);
    }
}

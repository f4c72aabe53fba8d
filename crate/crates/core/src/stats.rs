//! Monte Carlo summaries and comparison verdicts.

use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub ci95: (f64, f64),
}

impl EstimateCI {
    pub fn new(mean: f64, std_error: f64, n_paths: usize) -> Self {
        EstimateCI {
            mean,
            std_error,
            n_paths,
            ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        }
    }

    /// A deterministic value (standard error 0).
    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0, 0)
    }

    /// Mean and standard error of i.i.d. samples, summed pairwise so the
    /// result does not depend on how the samples were produced.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self::new(f64::NAN, f64::NAN, 0);
        }
        let mean = pairwise_sum(samples) / n as f64;
        if n == 1 {
            return Self::new(mean, 0.0, 1);
        }
        let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        Self::new(mean, (var / n as f64).sqrt(), n)
    }
}

/// Recursive pairwise summation over a fixed split, so the rounding pattern
/// depends only on the slice contents.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Default threshold, in combined standard errors.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 3.0;
/// Default absolute threshold between two deterministic values.
pub const DEFAULT_EXACT_THRESHOLD: f64 = 1e-6;

/// Outcome of comparing two estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub lhs: EstimateCI,
    pub rhs: EstimateCI,
    /// Difference over the combined standard error; `0` for equal values and
    /// `±∞` for distinct deterministic values.
    pub z_score: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `pass ⟺ |lhs − rhs| ≤ threshold·√(se_l² + se_r²)`.
///
/// When both sides are deterministic the combined error is zero and the
/// threshold is read as an absolute tolerance; see [`compare_auto`].
pub fn compare_estimates(lhs: EstimateCI, rhs: EstimateCI, threshold: f64) -> ComparisonVerdict {
    let diff = lhs.mean - rhs.mean;
    let se = lhs.std_error.hypot(rhs.std_error);
    let z_score = if diff == 0.0 { 0.0 } else { diff / se };
    let pass = diff.abs() <= threshold * se;
    ComparisonVerdict {
        lhs,
        rhs,
        z_score,
        threshold,
        pass,
    }
}

/// Statistical comparison at `sigma` combined errors, or an absolute
/// comparison at `exact_tol` when both sides are deterministic.
pub fn compare_auto(lhs: EstimateCI, rhs: EstimateCI, sigma: f64, exact_tol: f64) -> ComparisonVerdict {
    if lhs.std_error == 0.0 && rhs.std_error == 0.0 {
        let diff = lhs.mean - rhs.mean;
        ComparisonVerdict {
            lhs,
            rhs,
            z_score: if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY },
            threshold: exact_tol,
            pass: diff.abs() <= exact_tol,
        }
    } else {
        compare_estimates(lhs, rhs, sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn verdict_examples() {
        let v = compare_estimates(EstimateCI::exact(0.3), EstimateCI::exact(0.3), 3.0);
        assert!(v.pass);
        assert_eq!(v.z_score, 0.0);

        let a = EstimateCI::new(0.5, 0.01, 1000);
        let b = EstimateCI::new(0.5 + 5.0 * 0.01f64.hypot(0.01), 0.01, 1000);
        assert!(!compare_estimates(a, b, 3.0).pass);

        let mc = EstimateCI::new(0.83, 0.001, 100_000);
        let v = compare_estimates(mc, EstimateCI::exact(0.8305), 3.0);
        assert!(v.pass && (v.z_score + 0.5).abs() < 1e-9);
    }

    #[test]
    fn auto_uses_absolute_tolerance_for_exact_values() {
        let v = compare_auto(EstimateCI::exact(1.0), EstimateCI::exact(1.0 + 5e-7), 3.0, 1e-6);
        assert!(v.pass);
        let v = compare_auto(EstimateCI::exact(1.0), EstimateCI::exact(1.0 + 5e-6), 3.0, 1e-6);
        assert!(!v.pass);
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let e = EstimateCI::from_samples(&[1.0; 500]);
        assert_eq!((e.mean, e.std_error, e.n_paths), (1.0, 0.0, 500));
        assert_eq!(e.ci95, (1.0, 1.0));
    }

    proptest! {
        #[test]
        fn ci_brackets_mean(xs in prop::collection::vec(0.0f64..1.0, 2..300)) {
            let e = EstimateCI::from_samples(&xs);
            prop_assert!(e.std_error >= 0.0);
            prop_assert!(e.ci95.0 <= e.mean && e.mean <= e.ci95.1);
            prop_assert!((e.ci95.1 - e.mean - 1.96 * e.std_error).abs() < 1e-12);
        }

        #[test]
        fn pairwise_sum_is_accurate(xs in prop::collection::vec(-1e3f64..1e3, 0..2000)) {
            let naive: f64 = xs.iter().sum();
            prop_assert!((pairwise_sum(&xs) - naive).abs() < 1e-8);
        }
    }
}

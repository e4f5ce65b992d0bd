//! Small statistics helpers: moments, quantiles, ordinary least squares,
//! and the rank-sum test used by the analysis reports.

use crate::numerics::NumericsError;
use crate::scalar::Scalar;

pub fn mean<S: Scalar>(xs: &[S]) -> S {
    let n = S::of(xs.len() as f64);
    xs.iter().copied().sum::<S>() / n
}

/// Population variance (divide by n).
pub fn variance_population<S: Scalar>(xs: &[S]) -> S {
    let m = mean(xs);
    let n = S::of(xs.len() as f64);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<S>() / n
}

pub fn stddev_population<S: Scalar>(xs: &[S]) -> S {
    variance_population(xs).sqrt()
}

/// Linearly interpolated quantile of a sorted slice (type-7 convention).
pub fn quantile_sorted<S: Scalar>(sorted: &[S], q: f64) -> S {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = S::of(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn median<S: Scalar>(xs: &[S]) -> S {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
    quantile_sorted(&sorted, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression<S> {
    pub slope: S,
    pub intercept: S,
    /// Pearson correlation; zero when the responses are constant.
    pub r: S,
}

/// Ordinary least squares of `ys` against `xs`.
pub fn linear_regression<S: Scalar>(xs: &[S], ys: &[S]) -> Result<Regression<S>, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::DegenerateInput("xs and ys lengths differ"));
    }
    if xs.len() < 2 {
        return Err(NumericsError::DegenerateInput("need at least two points"));
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    let mut syy = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == S::zero() {
        return Err(NumericsError::DegenerateInput("xs are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r = if syy == S::zero() { S::zero() } else { sxy / (sxx * syy).sqrt() };
    Ok(Regression { slope, intercept, r })
}

#[derive(Debug, Clone, Copy)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value from the tie-corrected normal approximation.
    pub p: f64,
}

/// Two-sided Mann–Whitney rank-sum test via the normal approximation
/// with tie correction (no continuity correction).
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, NumericsError> {
    if a.is_empty() || b.is_empty() {
        return Err(NumericsError::DegenerateInput("empty sample"));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&x| (x, 0usize))
        .chain(b.iter().map(|&x| (x, 1usize)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("comparable fitness"));

    // Average ranks over tie groups.
    let n = pooled.len();
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = avg_rank;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let r1: f64 = pooled
        .iter()
        .zip(&ranks)
        .filter(|((_, grp), _)| *grp == 0)
        .map(|(_, &r)| r)
        .sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;

    let nt = n1 + n2;
    let mean_u = n1 * n2 / 2.0;
    let var_u = n1 * n2 / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if var_u <= 0.0 {
        // Every observation tied: no evidence either way.
        return Ok(MannWhitney { u: u1, z: 0.0, p: 1.0 });
    }
    let z = (u1 - mean_u) / var_u.sqrt();
    let p = libm::erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok(MannWhitney { u: u1, z, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regression_perfect_line() {
        let r = linear_regression(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert_relative_eq!(r.slope, 2.0);
        assert_relative_eq!(r.intercept, 0.0);
        assert_relative_eq!(r.r, 1.0);
    }

    #[test]
    fn regression_constant_response() {
        let r = linear_regression(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_relative_eq!(r.slope, 0.0);
        assert_relative_eq!(r.r, 0.0);
    }

    #[test]
    fn regression_degenerate_xs() {
        assert!(linear_regression(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(linear_regression(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn regression_matches_normal_equations_oracle() {
        // 20-point synthetic cloud with a deterministic pseudo-noise term.
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37 - 3.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| 1.7 * x - 0.4 + ((i * 2654435761) % 1000) as f64 / 1000.0 - 0.5)
            .collect();
        let got = linear_regression(&xs, &ys).unwrap();

        // Normal equations solved directly: [n Σx; Σx Σx²] β = [Σy; Σxy].
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let det = n * sxx - sx * sx;
        let intercept = (sy * sxx - sx * sxy) / det;
        let slope = (n * sxy - sx * sy) / det;

        assert!((got.slope - slope).abs() < 1e-10);
        assert!((got.intercept - intercept).abs() < 1e-10);
    }

    #[test]
    fn quantiles_and_median() {
        let sorted = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(quantile_sorted(&sorted, 0.0), 1.0);
        assert_relative_eq!(quantile_sorted(&sorted, 1.0), 4.0);
        assert_relative_eq!(quantile_sorted(&sorted, 0.5), 2.5);
        assert_relative_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn rank_sum_identical_samples_is_a_tie() {
        let mw = mann_whitney_u(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!(mw.p > 0.99);
    }

    #[test]
    fn rank_sum_disjoint_samples_is_extreme() {
        let mw = mann_whitney_u(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]).unwrap();
        // All 9 pairwise comparisons favour b: U for the first sample is 0.
        assert_eq!(mw.u, 0.0);
        assert!(mw.p < 0.05, "p = {}", mw.p);
    }
}

//! Small statistics helpers: binomial intervals and the chi-square tail.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // the endpoints are exactly 0 and 1 at the extremes; rounding can miss them
    Interval {
        lo: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
        hi: if successes == trials { 1.0 } else { (centre + half).min(1.0) },
    }
}

/// Binomial standard deviation of a rate estimate at true rate `p`.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    libm::sqrt(p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / trials as f64)
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let ln_pre = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        // series for P(a, x)
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..1000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (1.0 - sum * libm::exp(ln_pre)).max(0.0)
    } else {
        // modified Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        libm::exp(ln_pre) * h
    }
}

/// Survival function of the chi-square distribution with `dof` degrees of freedom.
pub fn chi2_sf(stat: f64, dof: usize) -> f64 {
    gamma_q(dof as f64 / 2.0, stat / 2.0)
}

/// Pearson statistic of `counts` against the uniform distribution and its p-value.
pub fn chi2_uniform(counts: &[usize]) -> (f64, f64) {
    let n: usize = counts.iter().sum();
    let expect = n as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expect) * (c as f64 - expect) / expect).sum();
    (stat, chi2_sf(stat, counts.len() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chi2_tail_matches_reference_values() {
        // scipy.stats.chi2.sf
        let cases = [
            (3.0, 1, 0.08326451666355042),
            (124.0, 124, 0.4831099678792378),
            (150.0, 124, 0.05596232625637963),
            (0.5, 4, 0.9735009788392561),
            (40.0, 10, 1.694474393006737e-05),
            (10.0, 10, 0.44049328506521257),
        ];
        for (x, k, want) in cases {
            let got = chi2_sf(x, k);
            assert!((got - want).abs() < 1e-9 * want.max(1e-3), "sf({x}, {k}) = {got}, want {want}");
        }
    }

    #[test]
    fn wilson_reference_values() {
        // statsmodels proportion_confint(method="wilson")
        let i = wilson_interval(8, 10, Z95);
        assert!((i.lo - 0.49016247153664183).abs() < 1e-9);
        assert!((i.hi - 0.9433178485456247).abs() < 1e-9);
        let all = wilson_interval(100, 100, Z95);
        assert!((all.hi - 1.0).abs() < 1e-12 && all.lo > 0.96);
    }

    proptest! {
        #[test]
        fn wilson_contains_the_point_estimate(s in 0usize..500, extra in 0usize..500) {
            let n = s + extra;
            prop_assume!(n > 0);
            let i = wilson_interval(s, n, Z95);
            prop_assert!(0.0 <= i.lo && i.lo <= i.hi && i.hi <= 1.0);
            prop_assert!(i.contains(s as f64 / n as f64));
        }

        #[test]
        fn chi2_sf_is_decreasing(x in 0.0f64..200.0, dx in 0.01f64..10.0, k in 1usize..150) {
            prop_assert!(chi2_sf(x + dx, k) <= chi2_sf(x, k) + 1e-12);
        }
    }
}

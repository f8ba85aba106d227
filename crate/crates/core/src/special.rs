//! Special functions: complementary error function, Poisson windows and
//! the binary entropy.

use crate::error::{check_non_negative, check_probability, Error, Result};

/// Means above this are evaluated term-by-term in log space.
const LOG_SPACE_MEAN: f64 = 50.0;

/// Complementary error function.
///
/// Backed by the `libm` port of the FreeBSD implementation (sub-ulp error).
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Upper tail of a normal variable: `P(X >= t)` for `X ~ N(mean, sd^2)`.
#[inline]
pub fn normal_upper_tail(t: f64, mean: f64, sd: f64) -> f64 {
    0.5 * erfc((t - mean) / (sd * std::f64::consts::SQRT_2))
}

/// Probability mass `P(N = n)` for a Poisson variable with the given mean.
pub fn poisson_pmf(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if mean > LOG_SPACE_MEAN {
        let n = f64::from(n);
        (-mean + n * mean.ln() - libm::lgamma(n + 1.0)).exp()
    } else {
        let mut p = (-mean).exp();
        for k in 1..=n {
            p *= mean / f64::from(k);
        }
        p
    }
}

/// Iterator over consecutive Poisson probabilities starting at `start`.
struct PmfTerms {
    mean: f64,
    n: u32,
    current: f64,
    log_space: bool,
}

impl PmfTerms {
    fn new(mean: f64, start: u32) -> Self {
        Self {
            mean,
            n: start,
            current: poisson_pmf(mean, start),
            log_space: mean > LOG_SPACE_MEAN,
        }
    }
}

impl Iterator for PmfTerms {
    type Item = (u32, f64);

    fn next(&mut self) -> Option<(u32, f64)> {
        let item = (self.n, self.current);
        self.n = self.n.checked_add(1)?;
        self.current = if self.log_space {
            poisson_pmf(self.mean, self.n)
        } else {
            self.current * self.mean / f64::from(self.n)
        };
        Some(item)
    }
}

/// `P(n_lo <= N <= n_hi)` for `N ~ Poisson(mean)`; `n_hi = None` means no
/// upper limit.
///
/// Finite windows are summed directly. An open upper tail is taken as the
/// complement of the lower sum when that sum is below one half, and summed
/// term by term otherwise, so small tails keep full relative precision.
pub fn poisson_window(mean: f64, n_lo: u32, n_hi: Option<u32>) -> Result<f64> {
    check_non_negative("mean", mean)?;
    if let Some(hi) = n_hi {
        if hi < n_lo {
            return Err(Error::InvalidConfig(format!(
                "poisson window [{n_lo}, {hi}] is empty"
            )));
        }
        return Ok(PmfTerms::new(mean, n_lo)
            .take((hi - n_lo) as usize + 1)
            .map(|(_, p)| p)
            .sum::<f64>()
            .min(1.0));
    }
    if n_lo == 0 {
        return Ok(1.0);
    }
    let below: f64 = PmfTerms::new(mean, 0)
        .take(n_lo as usize)
        .map(|(_, p)| p)
        .sum();
    if below < 0.5 {
        return Ok((1.0 - below).max(0.0));
    }
    Ok(upper_tail_direct(mean, n_lo))
}

fn upper_tail_direct(mean: f64, n_lo: u32) -> f64 {
    let mut sum = 0.0;
    for (n, p) in PmfTerms::new(mean, n_lo) {
        sum += p;
        if f64::from(n) > mean && p <= sum * 1e-18 {
            break;
        }
        if p == 0.0 && f64::from(n) > mean {
            break;
        }
    }
    sum.min(1.0)
}

/// Binary Shannon entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(binary_entropy_unchecked(p))
}

pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

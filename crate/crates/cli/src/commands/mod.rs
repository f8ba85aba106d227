pub mod error_rates;
pub mod keyrate;
pub mod montecarlo;
pub mod tradeoff;

use crate::UsageError;

/// Checks that every mean photon number in `grid` is non-negative.
pub fn check_alpha_sq(grid: &[f64]) -> Result<(), UsageError> {
    match grid.iter().find(|a| **a < 0.0) {
        Some(a) => Err(UsageError(format!("alpha^2 must be non-negative, got {a}"))),
        None => Ok(()),
    }
}

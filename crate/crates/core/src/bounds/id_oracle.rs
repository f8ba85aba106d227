//! Numerical optimum of intermediate discrimination: the smallest
//! conditional error over all three-outcome POVMs whose inconclusive rate
//! is fixed.
//!
//! The search runs over the inconclusive element `P?` only. Writing
//! `M = 1 - P?` and `S = M^{1/2}`, every split `P1 + P2 = M` has the form
//! `P1 = S Q S`, `P2 = S (1 - Q) S` with `0 <= Q <= 1`. The error
//! `p1 <-|P2|-> + p2 <+|P1|+>` is affine in `Q` and its minimum is
//! `p1 tr(S rho_- S) + sum of the negative eigenvalues of
//! S (p2 rho_+ - p1 rho_-) S`, attained by the projector on the negative
//! eigenspace. The outer search over `P?` uses multi-start Nelder-Mead on an
//! eigen-parameterization that satisfies the inconclusive constraint
//! exactly, and the optimum is certified by random perturbation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::usd_inconclusive_rate;
use crate::error::{check_probability, Error, Result};
use crate::optimize::nelder_mead;
use crate::signal::SignalEnsemble;

pub type Matrix2x2 = [[f64; 2]; 2];

/// One point of the optimal intermediate-discrimination curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdBoundPoint {
    pub p_inc: f64,
    pub p_err_min: f64,
    /// Guess-minus, guess-plus and inconclusive elements in the orthonormal
    /// basis `e1 = |+a>`, `e2 = (|-a> - o|+a>) / sqrt(1 - o^2)`.
    pub povm: [Matrix2x2; 3],
}

/// Search settings for [`optimal_id_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdOracleOptions {
    /// Dimension of the Hilbert space the POVM lives in (2 = the signal span).
    pub dimension: usize,
    pub starts: usize,
    pub seed: u64,
    pub objective_tol: f64,
    /// Perturbation radius used for certification.
    pub certify_radius: f64,
    /// Largest improvement a perturbation may find before the optimum is
    /// rejected.
    pub certify_slack: f64,
}

impl Default for IdOracleOptions {
    fn default() -> Self {
        Self {
            dimension: 2,
            starts: 16,
            seed: 0x1d_b0_0d,
            objective_tol: 1e-10,
            certify_radius: 1e-4,
            certify_slack: 1e-7,
        }
    }
}

/// Smallest conditional error at inconclusive rate `p_inc_target`.
pub fn optimal_id_bound(ensemble: &SignalEnsemble, p_inc_target: f64) -> Result<IdBoundPoint> {
    optimal_id_bound_with(ensemble, p_inc_target, &IdOracleOptions::default())
}

pub fn optimal_id_bound_with(
    ensemble: &SignalEnsemble,
    p_inc_target: f64,
    options: &IdOracleOptions,
) -> Result<IdBoundPoint> {
    check_probability("p_inc_target", p_inc_target)?;
    let limit = usd_inconclusive_rate(ensemble);
    if p_inc_target > limit + 1e-12 {
        return Err(Error::InfeasibleTarget {
            target: p_inc_target,
            limit,
        });
    }
    if p_inc_target >= 1.0 {
        return Err(Error::Undefined("no conclusive outcomes at p_inc = 1"));
    }
    if options.dimension < 2 {
        return Err(Error::InvalidConfig(
            "POVM dimension must be at least 2".into(),
        ));
    }
    let problem = Problem::new(ensemble, p_inc_target, options.dimension);
    let n_params = problem.n_params();

    let runs: Vec<(Vec<f64>, f64)> = (0..options.starts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(k as u64);
            let start: Vec<f64> = (0..n_params)
                .map(|_| rng.random_range(0.0..std::f64::consts::PI))
                .collect();
            let objective = |p: &[f64]| problem.objective(p);
            let mut best = nelder_mead(objective, &start, 0.3, options.objective_tol * 1e-3, 4000);
            // Restarting from the incumbent escapes premature collapse.
            for _ in 0..3 {
                let again =
                    nelder_mead(objective, &best.x, 0.05, options.objective_tol * 1e-3, 4000);
                let improved = again.value < best.value - 1e-15;
                if again.value <= best.value {
                    best = again;
                }
                if !improved {
                    break;
                }
            }
            (best.x, best.value)
        })
        .collect();

    // Lowest objective wins; ties go to the earliest start.
    let (mut params, mut value) = runs
        .into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one start");

    let conclusive = 1.0 - p_inc_target;
    let mut certified = false;
    for round in 0..4 {
        match problem.find_improvement(&params, value, options, round) {
            None => {
                certified = true;
                break;
            }
            Some((p, v)) => {
                let polished = nelder_mead(
                    |q: &[f64]| problem.objective(q),
                    &p,
                    0.01,
                    options.objective_tol * 1e-3,
                    4000,
                );
                (params, value) = if polished.value < v {
                    (polished.x, polished.value)
                } else {
                    (p, v)
                };
            }
        }
    }
    if !certified {
        return Err(Error::Numerical(format!(
            "intermediate-discrimination optimum at p_inc = {p_inc_target} failed certification"
        )));
    }

    let povm = problem.povm(&params);
    Ok(IdBoundPoint {
        p_inc: p_inc_target,
        p_err_min: (value / conclusive).clamp(0.0, 1.0),
        povm,
    })
}

struct Problem {
    dim: usize,
    prior_minus: f64,
    target: f64,
    rho_minus: DMatrix<f64>,
    cost: DMatrix<f64>,
    rho_avg: DMatrix<f64>,
}

impl Problem {
    fn new(ensemble: &SignalEnsemble, target: f64, dim: usize) -> Self {
        let o = (-2.0 * ensemble.mean_photons()).exp();
        let mut plus = DVector::zeros(dim);
        plus[0] = 1.0;
        let mut minus = DVector::zeros(dim);
        minus[0] = o;
        minus[1] = (1.0 - o * o).max(0.0).sqrt();
        let rho_plus = &plus * plus.transpose();
        let rho_minus = &minus * minus.transpose();
        let (p1, p2) = (ensemble.prior_minus(), ensemble.prior_plus());
        Self {
            dim,
            prior_minus: p1,
            target,
            cost: &rho_plus * p2 - &rho_minus * p1,
            rho_avg: &rho_minus * p1 + &rho_plus * p2,
            rho_minus,
        }
    }

    fn n_rotation_params(&self) -> usize {
        self.dim * (self.dim - 1) / 2
    }

    fn n_params(&self) -> usize {
        self.n_rotation_params() + self.dim
    }

    /// Orthogonal frame as a product of Givens rotations.
    fn rotation(&self, angles: &[f64]) -> DMatrix<f64> {
        let mut r = DMatrix::identity(self.dim, self.dim);
        let mut k = 0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let (s, c) = angles[k].sin_cos();
                let mut g = DMatrix::identity(self.dim, self.dim);
                g[(i, i)] = c;
                g[(j, j)] = c;
                g[(i, j)] = -s;
                g[(j, i)] = s;
                r = g * r;
                k += 1;
            }
        }
        r
    }

    /// Eigenvalues of `P?` in the frame, scaled so the inconclusive rate
    /// hits the target exactly. `None` when the shape cannot reach it.
    fn inconclusive_spectrum(&self, weights: &[f64], frame: &DMatrix<f64>) -> Option<Vec<f64>> {
        let q: Vec<f64> = (0..self.dim)
            .map(|i| {
                let v = frame.column(i);
                (v.transpose() * &self.rho_avg * v)[(0, 0)].max(0.0)
            })
            .collect();
        let u: Vec<f64> = weights.iter().map(|w| w.sin().powi(2)).collect();
        if self.target <= 0.0 {
            return Some(vec![0.0; self.dim]);
        }
        // Solve sum_i q_i min(1, tau u_i) = target; piecewise linear in tau.
        let mut order: Vec<usize> = (0..self.dim).filter(|&i| u[i] > 0.0).collect();
        order.sort_by(|&a, &b| u[b].total_cmp(&u[a]));
        let mut saturated = 0.0;
        for (pos, &i) in order.iter().enumerate() {
            let slope: f64 = order[pos..].iter().map(|&j| q[j] * u[j]).sum();
            let tau_break = 1.0 / u[i];
            if saturated + slope * tau_break >= self.target {
                if slope <= 0.0 {
                    return None;
                }
                let tau = (self.target - saturated) / slope;
                return Some(u.iter().map(|&ui| (tau * ui).min(1.0)).collect());
            }
            saturated += q[i];
        }
        None
    }

    /// Minimal unconditional error for the `P?` encoded by `params`.
    fn objective(&self, params: &[f64]) -> f64 {
        match self.evaluate(params) {
            Some((value, _)) => value,
            None => 10.0,
        }
    }

    fn evaluate(&self, params: &[f64]) -> Option<(f64, [DMatrix<f64>; 3])> {
        let nr = self.n_rotation_params();
        let frame = self.rotation(&params[..nr]);
        let spectrum = self.inconclusive_spectrum(&params[nr..], &frame)?;
        let diag = |f: &dyn Fn(f64) -> f64| {
            let d = DMatrix::from_diagonal(&DVector::from_iterator(
                self.dim,
                spectrum.iter().map(|&c| f(c)),
            ));
            &frame * d * frame.transpose()
        };
        let p_inc = diag(&|c| c);
        let sqrt_m = diag(&|c| (1.0 - c).max(0.0).sqrt());
        let k = &sqrt_m * &self.cost * &sqrt_m;
        let eig = SymmetricEigen::new(k);
        let mut projector = DMatrix::zeros(self.dim, self.dim);
        let mut negative = 0.0;
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < 0.0 {
                negative += lambda;
                let v = eig.eigenvectors.column(i);
                projector += v * v.transpose();
            }
        }
        let base = self.prior_minus * (&sqrt_m * &self.rho_minus * &sqrt_m).trace();
        let guess_minus = &sqrt_m * &projector * &sqrt_m;
        let m = DMatrix::identity(self.dim, self.dim) - &p_inc;
        let guess_plus = &m - &guess_minus;
        Some((base + negative, [guess_minus, guess_plus, p_inc]))
    }

    /// Random and axis perturbations of radius `certify_radius`; returns the
    /// best one if it beats `value` by more than the slack.
    fn find_improvement(
        &self,
        params: &[f64],
        value: f64,
        options: &IdOracleOptions,
        round: usize,
    ) -> Option<(Vec<f64>, f64)> {
        let n = params.len();
        let conclusive = 1.0 - self.target;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0xce27);
        rng.set_stream(round as u64);
        let mut directions: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                directions.push(d);
            }
        }
        for _ in 0..64 {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            directions.push(d.into_iter().map(|x| x / norm).collect());
        }
        directions
            .into_iter()
            .filter_map(|d| {
                let p: Vec<f64> = params
                    .iter()
                    .zip(&d)
                    .map(|(x, dx)| x + options.certify_radius * dx)
                    .collect();
                let (v, _) = self.evaluate(&p)?;
                Some((p, v))
            })
            .filter(|(_, v)| (value - v) / conclusive > options.certify_slack)
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn povm(&self, params: &[f64]) -> [Matrix2x2; 3] {
        let (_, elements) = self
            .evaluate(params)
            .expect("certified parameters are feasible");
        let to_2x2 = |m: &DMatrix<f64>| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
        [
            to_2x2(&elements[0]),
            to_2x2(&elements[1]),
            to_2x2(&elements[2]),
        ]
    }
}

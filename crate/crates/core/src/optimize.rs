//! Small derivative-free optimizers: golden-section search, bisection, a
//! scan-then-refine wrapper for objectives that are not known to be
//! unimodal, and Nelder-Mead for the low-dimensional POVM search.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizer of a scalar function on an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search on `[lo, hi]` for `steps` bracket reductions, or
/// until the bracket is narrower than `tol`.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, steps: usize, tol: f64) -> ScalarMinimum
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..steps {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // Report the best point seen among the final candidates and endpoints.
    [(c, fc), (d, fd), (a, f(a)), (b, f(b))].into_iter().fold(
        ScalarMinimum { x: c, value: fc },
        |best, (x, v)| {
            if v < best.value {
                ScalarMinimum { x, value: v }
            } else {
                best
            }
        },
    )
}

/// Outcome of a scan-then-refine minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMinimum {
    pub x: f64,
    pub value: f64,
    /// Number of strict interior local minima seen in the pre-scan.
    pub local_minima: usize,
    /// Whether the objective was constant on the scan grid.
    pub flat: bool,
}

/// Grid scan of `points` samples over `[lo, hi]` followed by golden-section
/// refinement around the best sample.
///
/// Ties on the grid go to the smallest abscissa; a flat objective returns
/// `lo`.
pub fn scan_then_refine<F>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
    steps: usize,
    tol: f64,
) -> ScanMinimum
where
    F: Fn(f64) -> f64,
{
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, f(x))
        })
        .collect();
    let (best_i, &(best_x, best_v)) = samples
        .iter()
        .enumerate()
        .fold(
            None,
            |acc: Option<(usize, &(f64, f64))>, (i, s)| match acc {
                Some((_, b)) if b.1 <= s.1 => acc,
                _ => Some((i, s)),
            },
        )
        .expect("non-empty scan");
    let worst = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let local_minima = samples
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .count();
    if worst - best_v <= 1e-15 * best_v.abs().max(1.0) {
        return ScanMinimum {
            x: lo,
            value: samples[0].1,
            local_minima: 0,
            flat: true,
        };
    }
    let a = if best_i == 0 { lo } else { best_x - step };
    let b = if best_i + 1 == points {
        hi
    } else {
        best_x + step
    };
    let refined = golden_section(&f, a, b, steps, tol);
    let (x, value) = if refined.value <= best_v {
        (refined.x, refined.value)
    } else {
        (best_x, best_v)
    };
    ScanMinimum {
        x,
        value,
        local_minima,
        flat: false,
    }
}

/// Root of a monotone function by bisection on `[lo, hi]`.
///
/// Stops once `|f| <= f_tol` or the bracket collapses to machine precision.
pub fn bisect<F>(f: F, lo: f64, hi: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa.abs() <= f_tol {
        return Ok(a);
    }
    if fb.abs() <= f_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "bisection bracket [{lo}, {hi}] does not straddle a root"
        )));
    }
    let rising = fb > fa;
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm.abs() <= f_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Result of a Nelder-Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead simplex minimization with the adaptive coefficients of Gao
/// and Han, which behave better than the textbook ones in a few dimensions.
pub fn nelder_mead<F>(
    f: F,
    start: &[f64],
    initial_step: f64,
    f_tol: f64,
    max_iter: usize,
) -> SimplexMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let nf = n as f64;
    let (reflect, expand) = (1.0, 1.0 + 2.0 / nf);
    let (contract, shrink) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += initial_step;
        let v = f(&p);
        simplex.push((p, v));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= f_tol && size <= 1e-9 {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let reflected = combine(&centroid, &worst, -reflect);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst, -expand);
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (candidate, fc) = if fr < simplex[n].1 {
            let outside = combine(&centroid, &worst, -contract);
            let fo = f(&outside);
            (outside, fo)
        } else {
            let inside = combine(&centroid, &worst, contract);
            let fi = f(&inside);
            (inside, fi)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (candidate, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let p = combine(&best, &vertex.0, shrink);
            let v = f(&p);
            *vertex = (p, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexMinimum {
        x,
        value,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = golden_section(|x| (x - 1.234).powi(2), 0.0, 5.0, 80, 1e-12);
        assert!((m.x - 1.234).abs() < 1e-6);
    }

    #[test]
    fn golden_handles_boundary_minimum() {
        let m = golden_section(|x| x, 0.0, 1.0, 80, 1e-12);
        assert!(m.x.abs() < 1e-9);
    }

    #[test]
    fn scan_picks_global_minimum_of_multimodal_function() {
        let f = |x: f64| (3.0 * x).cos() + 0.1 * x;
        let m = scan_then_refine(f, 0.0, 10.0, 200, 60, 1e-12);
        // Global minimum near x = pi/3 (cos = -1 at 3x = pi).
        let expected = golden_section(f, 0.9, 1.2, 100, 1e-14);
        assert!((m.x - expected.x).abs() < 1e-6);
        assert!(m.local_minima >= 3);
        assert!(!m.flat);
    }

    #[test]
    fn scan_flat_objective_returns_lower_end() {
        let m = scan_then_refine(|_| 0.5, 0.0, 3.0, 50, 40, 1e-9);
        assert!(m.flat);
        assert_eq!(m.x, 0.0);
    }

    #[test]
    fn bisection_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 1e-16, 20_000);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5);
    }
}

//! Derivative-free minimizers for the autoencoder baseline, driven by a
//! hard budget of objective evaluations.
//!
//! Two methods are provided. [`nelder_mead`] is the classic simplex
//! search with restart-on-stall. [`rotosolve`] is a coordinate-descent
//! scheme for objectives that are exactly sinusoidal in each coordinate
//! (true for expectation values parameterized by single-qubit rotation
//! angles): three evaluations per coordinate determine the coordinate-wise
//! optimum in closed form, which makes it far more evaluation-efficient
//! than a simplex on wide parameter vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// Best objective seen after each evaluation (non-increasing).
    pub best_trace: Vec<f64>,
}

struct Budget<F: FnMut(&[f64]) -> f64> {
    f: F,
    remaining: usize,
    best_value: f64,
    best_point: Vec<f64>,
    trace: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Budget<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let v = (self.f)(x);
        if v < self.best_value {
            self.best_value = v;
            self.best_point = x.to_vec();
        }
        self.trace.push(self.best_value);
        Some(v)
    }

    fn finish(self) -> OptimResult {
        let evaluations = self.trace.len();
        OptimResult {
            best_point: self.best_point,
            best_value: if evaluations == 0 {
                f64::NAN
            } else {
                self.best_value
            },
            evaluations,
            best_trace: self.trace,
        }
    }
}

/// Nelder–Mead simplex minimization with a fixed evaluation budget.
///
/// When the simplex stalls (negligible spread in objective values) and
/// budget remains, the search restarts from the best point with a fresh,
/// randomly oriented simplex at half the previous scale.
pub fn nelder_mead(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    budget: usize,
    seed: u64,
    initial_scale: f64,
) -> OptimResult {
    let mut budget = Budget {
        f,
        remaining: budget,
        best_value: f64::INFINITY,
        best_point: x0.to_vec(),
        trace: Vec::with_capacity(budget),
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut scale = initial_scale;
    let mut evaluations_done = false;

    'restarts: while budget.remaining > 0 {
        // simplex around the incumbent best (x0 on the first pass)
        let center = if evaluations_done {
            budget.best_point.clone()
        } else {
            x0.to_vec()
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        match budget.eval(&center) {
            Some(v) => simplex.push((center.clone(), v)),
            None => break,
        }
        evaluations_done = true;
        for i in 0..n {
            let mut p = center.clone();
            if simplex.len() == 1 && scale == initial_scale {
                p[i] += scale;
            } else {
                for pj in p.iter_mut() {
                    *pj += scale * (rng.gen::<f64>() - 0.5);
                }
            }
            match budget.eval(&p) {
                Some(v) => simplex.push((p, v)),
                None => break 'restarts,
            }
        }

        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
            let spread = simplex[n].1 - simplex[0].1;
            if spread < 1e-12 {
                scale *= 0.5;
                continue 'restarts;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].clone();
            let reflected: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + alpha * (c - w))
                .collect();
            let fr = match budget.eval(&reflected) {
                Some(v) => v,
                None => break 'restarts,
            };
            if fr < simplex[0].1 {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&reflected)
                    .map(|(c, r)| c + gamma * (r - c))
                    .collect();
                match budget.eval(&expanded) {
                    Some(fe) if fe < fr => simplex[n] = (expanded, fe),
                    Some(_) => simplex[n] = (reflected, fr),
                    None => break 'restarts,
                }
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
            } else {
                // contraction, outside or inside of the worst point
                let (toward, bound) = if fr < worst.1 {
                    (reflected.clone(), fr)
                } else {
                    (worst.0.clone(), worst.1)
                };
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(&toward)
                    .map(|(c, t)| c + rho * (t - c))
                    .collect();
                match budget.eval(&contracted) {
                    Some(fc) if fc < bound => simplex[n] = (contracted, fc),
                    Some(_) => {
                        // shrink toward the best vertex
                        let best = simplex[0].0.clone();
                        for vertex in simplex.iter_mut().skip(1) {
                            let shrunk: Vec<f64> = best
                                .iter()
                                .zip(&vertex.0)
                                .map(|(b, v)| b + sigma * (v - b))
                                .collect();
                            match budget.eval(&shrunk) {
                                Some(fv) => *vertex = (shrunk, fv),
                                None => break 'restarts,
                            }
                        }
                    }
                    None => break 'restarts,
                }
            }
        }
    }

    budget.finish()
}

/// Closed-form coordinate descent for objectives sinusoidal in each
/// coordinate. Deterministic: sweeps coordinates in order until the
/// budget is exhausted or a full sweep brings no improvement.
pub fn rotosolve(f: impl FnMut(&[f64]) -> f64, x0: &[f64], budget: usize) -> OptimResult {
    let mut budget = Budget {
        f,
        remaining: budget,
        best_value: f64::INFINITY,
        best_point: x0.to_vec(),
        trace: Vec::with_capacity(budget),
    };
    let mut x = x0.to_vec();
    let mut current = match budget.eval(&x) {
        Some(v) => v,
        None => return budget.finish(),
    };

    'sweeps: loop {
        let mut improved = false;
        for i in 0..x.len() {
            if budget.remaining < 2 {
                break 'sweeps;
            }
            let base = x[i];
            x[i] = base + std::f64::consts::FRAC_PI_2;
            let fp = budget.eval(&x).expect("budget checked");
            x[i] = base - std::f64::consts::FRAC_PI_2;
            let fm = budget.eval(&x).expect("budget checked");
            // f(base + d) = A cos d + B sin d + C with
            // A = f0 - (fp+fm)/2, B = (fp-fm)/2; the minimum is at
            // d = atan2(-B, -A).
            let mut theta = base + (-(fp - fm) / 2.0).atan2(-(current - (fp + fm) / 2.0));
            if theta > std::f64::consts::PI {
                theta -= 2.0 * std::f64::consts::PI;
            }
            if theta < -std::f64::consts::PI {
                theta += 2.0 * std::f64::consts::PI;
            }
            x[i] = theta;
            match budget.eval(&x) {
                Some(v) => {
                    if v < current - 1e-15 {
                        improved = true;
                    }
                    current = v;
                }
                None => break 'sweeps,
            }
        }
        if !improved {
            break;
        }
    }
    budget.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn nelder_mead_minimizes_quadratics() {
        let result = nelder_mead(sphere, &[1.0, -2.0, 0.5], 500, 7, 1.0);
        assert!(result.best_value < 1e-6, "best {}", result.best_value);
        assert!(result.evaluations <= 500);
    }

    #[test]
    fn nelder_mead_respects_budget_and_traces_monotone() {
        let result = nelder_mead(sphere, &[3.0, 3.0], 40, 1, 1.0);
        assert_eq!(result.evaluations, 40);
        assert_eq!(result.best_trace.len(), 40);
        for w in result.best_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn zero_budget_returns_initial_point() {
        let result = nelder_mead(sphere, &[1.0, 2.0], 0, 1, 1.0);
        assert_eq!(result.best_point, vec![1.0, 2.0]);
        assert_eq!(result.evaluations, 0);
        let result = rotosolve(sphere, &[1.0, 2.0], 0);
        assert_eq!(result.best_point, vec![1.0, 2.0]);
        assert_eq!(result.evaluations, 0);
    }

    #[test]
    fn rotosolve_solves_sinusoidal_objectives() {
        // sum of shifted cosines: exact coordinate-wise minimum at pi - shift
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, &v)| (v + 0.3 * i as f64).cos()).sum::<f64>();
        let result = rotosolve(f, &vec![0.0; 6], 100);
        assert!(
            result.best_value < -6.0 + 1e-9,
            "best {}",
            result.best_value
        );
    }

    #[test]
    fn rotosolve_is_deterministic() {
        let f = |x: &[f64]| x.iter().map(|v| v.cos()).sum::<f64>();
        let a = rotosolve(f, &[0.1, 0.2, 0.3], 50);
        let b = rotosolve(f, &[0.1, 0.2, 0.3], 50);
        assert_eq!(a.best_point, b.best_point);
        assert_eq!(a.best_trace, b.best_trace);
    }
}

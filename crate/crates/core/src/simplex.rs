//! Maximization of `½ QᵀΣQ` over the probability simplex for a symmetric
//! matrix `Σ` with zero diagonal.
//!
//! The problem is an indefinite quadratic program; the grid search is
//! exhaustive (and used as an oracle), projected gradient is a multistart
//! heuristic.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symmetric `n x n` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let v = f(a, b);
                data[a * n + b] = v;
                data[b * n + a] = v;
            }
        }
        SymMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    /// `½ QᵀΣQ`. Zero-weight rows are skipped so `-inf` entries outside the
    /// support do not poison the sum.
    pub fn form(&self, q: &[f64]) -> f64 {
        let mut total = 0.0;
        for a in 0..self.n {
            if q[a] == 0.0 {
                continue;
            }
            for b in a + 1..self.n {
                if q[b] != 0.0 {
                    total += q[a] * q[b] * self.get(a, b);
                }
            }
        }
        total
    }

    fn gradient(&self, q: &[f64], g: &mut [f64]) {
        for a in 0..self.n {
            g[a] = (0..self.n).map(|b| self.get(a, b) * q[b]).sum();
        }
    }

    /// Restriction to the given index subset.
    pub fn restrict(&self, idx: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

/// Best point found by an optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub q: Vec<f64>,
    pub value: f64,
    /// Starts (projected gradient) or grid points (grid) evaluated.
    pub evaluations: usize,
}

fn better(value: f64, q: &[f64], best: &Option<QpSolution>) -> bool {
    match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && q < b.q.as_slice()),
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

/// Exhaustive search over `{k / resolution}` compositions.
pub fn maximize_grid(m: &SymMatrix, resolution: u32) -> QpSolution {
    let n = m.dim();
    let mut counts = vec![0u32; n];
    let mut best: Option<QpSolution> = None;
    let mut evaluations = 0;
    let mut q = vec![0.0; n];
    compositions(n, resolution, &mut counts, 0, resolution, &mut |c| {
        for (qi, &ci) in q.iter_mut().zip(c) {
            *qi = ci as f64 / resolution as f64;
        }
        evaluations += 1;
        let v = m.form(&q);
        if better(v, &q, &best) {
            best = Some(QpSolution {
                q: q.clone(),
                value: v,
                evaluations: 0,
            });
        }
    });
    let mut best = best.expect("the simplex grid is nonempty");
    best.evaluations = evaluations;
    best
}

fn compositions(n: usize, total: u32, counts: &mut [u32], i: usize, left: u32, f: &mut impl FnMut(&[u32])) {
    if i + 1 == n {
        counts[i] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[i] = k;
        compositions(n, total, counts, i + 1, left - k, f);
    }
}

/// Settings for [`maximize_pg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgOptions {
    /// Minimum number of starting points.
    pub starts: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PgOptions {
    fn default() -> Self {
        PgOptions {
            starts: 32,
            tol: 1e-10,
            max_iterations: 5_000,
            seed: 0,
        }
    }
}

/// Projected gradient ascent with step halving from vertices, the uniform
/// point, pair midpoints, random points and any `warm` starts.
pub fn maximize_pg(m: &SymMatrix, opts: &PgOptions, warm: &[Vec<f64>]) -> QpSolution {
    let n = m.dim();
    let mut starts: Vec<Vec<f64>> = warm.to_vec();
    for a in 0..n {
        let mut v = vec![0.0; n];
        v[a] = 1.0;
        starts.push(v);
    }
    starts.push(vec![1.0 / n as f64; n]);
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![0.0; n];
            v[a] = 0.5;
            v[b] = 0.5;
            starts.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(n + 1) {
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        starts.push(e.iter().map(|x| x / s).collect());
    }

    let scale = (0..n * n).map(|i| m.data[i].abs()).fold(0.0, f64::max).max(1e-12);
    let mut best: Option<QpSolution> = None;
    let mut g = vec![0.0; n];
    for start in &starts {
        let mut q = start.clone();
        let mut value = m.form(&q);
        let mut step = 1.0 / scale;
        for _ in 0..opts.max_iterations {
            m.gradient(&q, &mut g);
            let mut improved = false;
            while step > 1e-14 / scale {
                let trial: Vec<f64> = q.iter().zip(&g).map(|(x, d)| x + step * d).collect();
                let trial = project_to_simplex(&trial);
                let tv = m.form(&trial);
                if tv > value {
                    let moved = trial.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
                    let gain = tv - value;
                    q = trial;
                    value = tv;
                    improved = gain > opts.tol || moved > opts.tol;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if better(value, &q, &best) {
            best = Some(QpSolution {
                q,
                value,
                evaluations: 0,
            });
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = starts.len();
    best
}

/// Best two-point distribution: `max(0, max_{a<b} Σ_{ab} / 4)`.
pub fn maximize_two_point(m: &SymMatrix) -> QpSolution {
    let n = m.dim();
    let mut q = vec![0.0; n];
    q[0] = 1.0;
    let mut best = QpSolution {
        q,
        value: 0.0,
        evaluations: 0,
    };
    for a in 0..n {
        for b in a + 1..n {
            let v = m.get(a, b) / 4.0;
            best.evaluations += 1;
            if v > best.value {
                let mut q = vec![0.0; n];
                q[a] = 0.5;
                q[b] = 0.5;
                best.q = q;
                best.value = v;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_to_simplex(&[0.8, 0.8, -1.0]);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);
        assert_eq!(p[2], 0.0);
        let p = project_to_simplex(&[0.2, 0.3, 0.5]);
        assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_by_two_uniform() {
        let m = SymMatrix::from_fn(2, |_, _| 0.287682);
        let g = maximize_grid(&m, 200);
        assert_abs_diff_eq!(g.value, 0.287682 / 4.0, epsilon = 1e-15);
        let p = maximize_pg(&m, &PgOptions::default(), &[]);
        assert_abs_diff_eq!(p.value, g.value, epsilon = 1e-12);
        assert_abs_diff_eq!(p.q[0], 0.5, epsilon = 1e-6);
        assert!(p.evaluations >= 32);
    }

    #[test]
    fn dominant_pair_gives_two_point_support() {
        let m = SymMatrix::from_fn(3, |a, b| if (a, b) == (0, 2) { 4.0 } else { -1.0 });
        let t = maximize_two_point(&m);
        assert_eq!(t.q, vec![0.5, 0.0, 0.5]);
        assert_eq!(t.value, 1.0);
        let p = maximize_pg(&m, &PgOptions::default(), &[]);
        assert_abs_diff_eq!(p.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_input() {
        let m = SymMatrix::from_fn(1, |_, _| 0.0);
        assert_eq!(maximize_grid(&m, 200).value, 0.0);
        assert_eq!(maximize_pg(&m, &PgOptions::default(), &[]).q, vec![1.0]);
        assert_eq!(maximize_two_point(&m).value, 0.0);
    }

    #[test]
    fn interior_optimum_of_three() {
        let m = SymMatrix::from_fn(3, |_, _| 1.0);
        let p = maximize_pg(&m, &PgOptions::default(), &[]);
        assert_abs_diff_eq!(p.value, 1.0 / 3.0, epsilon = 1e-10);
        let g = maximize_grid(&m, 200);
        assert!(g.value <= p.value + 1e-12 && p.value - g.value < 1e-4);
    }
}

//! Quadrature on the ordered simplex `0 <= t_1 <= ... <= t_M <= 1`.

use crate::linalg::expm_real;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How simplex integrals of heat-semigroup products are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Quadrature {
    /// Closed form through divided differences of the exponential.
    #[default]
    Exact,
    /// Duffy-mapped tensor Gauss-Legendre with the given points per axis.
    Gauss(usize),
    /// Sorted Halton points with the given sample count.
    QuasiMonteCarlo(usize),
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// A point set on the ordered simplex with weights summing to `1/M!`.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Tensor Gauss rule pulled back by `t_M = u_M`, `t_a = u_a t_{a+1}`.
    pub fn gauss(dim: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let total = order.pow(dim as u32);
        for flat in 0..total {
            let mut idx = flat;
            let mut u = vec![0.0; dim];
            let mut wt = 1.0;
            for ua in u.iter_mut() {
                *ua = x[idx % order];
                wt *= w[idx % order];
                idx /= order;
            }
            let mut t = vec![0.0; dim];
            let mut upper = 1.0;
            for a in (0..dim).rev() {
                t[a] = u[a] * upper;
                if a > 0 {
                    wt *= t[a];
                }
                upper = t[a];
            }
            points.push(t);
            weights.push(wt);
        }
        if dim == 0 {
            return Self { dim, points: vec![vec![]], weights: vec![1.0] };
        }
        Self { dim, points, weights }
    }

    /// Sorted Halton points, each with weight `1/(M! S)`.
    pub fn quasi_monte_carlo(dim: usize, samples: usize) -> Self {
        if dim == 0 {
            return Self { dim, points: vec![vec![]], weights: vec![1.0] };
        }
        const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
        let fact: f64 = (1..=dim).map(|k| k as f64).product();
        let points = (1..=samples as u64)
            .map(|i| {
                let mut t: Vec<f64> = PRIMES[..dim].iter().map(|&p| radical_inverse(i, p)).collect();
                t.sort_by(|a, b| a.partial_cmp(b).unwrap());
                t
            })
            .collect();
        Self { dim, points, weights: vec![1.0 / (fact * samples as f64); samples] }
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// `int_{Delta_M} exp(-sum_a s_a mu_a) dt` where `s_0 = t_1`,
/// `s_a = t_{a+1} - t_a` and `s_M = 1 - t_M` are the segment lengths.
///
/// Equals the `(0, M)` entry of `exp(J)` with `J` upper bidiagonal, diagonal
/// `-mu` and unit superdiagonal (Hermite-Genocchi). The minimum is factored
/// out so the exponential is taken of a matrix with nonpositive diagonal.
pub fn simplex_exp_integral(mu: &[f64]) -> f64 {
    let m = mu.len();
    let lo = mu.iter().cloned().fold(f64::INFINITY, f64::min);
    if m == 1 {
        return (-lo).exp();
    }
    let mut j = DMatrix::<f64>::zeros(m, m);
    for a in 0..m {
        j[(a, a)] = -(mu[a] - lo);
        if a + 1 < m {
            j[(a, a + 1)] = 1.0;
        }
    }
    (-lo).exp() * expm_real(&j)[(0, m - 1)]
}

/// Same integral evaluated with a point rule.
pub fn simplex_exp_integral_rule(mu: &[f64], rule: &SimplexRule) -> f64 {
    let m = mu.len() - 1;
    rule.integrate(|t| {
        let mut prev = 0.0;
        let mut e = 0.0;
        for a in 0..m {
            e += (t[a] - prev) * mu[a];
            prev = t[a];
        }
        e += (1.0 - prev) * mu[m];
        (-e).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rules_have_simplex_volume() {
        for dim in 0..=4 {
            let fact: f64 = (1..=dim).map(|k| k as f64).product();
            let g = SimplexRule::gauss(dim, 6);
            assert!((g.weights.iter().sum::<f64>() - 1.0 / fact).abs() < 1e-14);
            let q = SimplexRule::quasi_monte_carlo(dim, 100);
            assert!((q.weights.iter().sum::<f64>() - 1.0 / fact).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_matches_closed_forms() {
        // M = 1: (e^{-a} - e^{-b}) / (b - a)
        let (a, b): (f64, f64) = (0.4, 3.0);
        let want = ((-a).exp() - (-b).exp()) / (b - a);
        assert!((simplex_exp_integral(&[a, b]) - want).abs() < 1e-15);
        // equal exponents: e^{-a} / M!
        assert!((simplex_exp_integral(&[a, a, a]) - (-a).exp() / 2.0).abs() < 1e-15);
        // repeated end points with a distinct middle: t e^{-a t}-type formula
        let v = simplex_exp_integral(&[a, b, a]);
        let d = b - a;
        let want = (-a).exp() * ((-d).exp() + d - 1.0) / (d * d);
        assert!((v - want).abs() < 1e-14, "{v} {want}");
    }

    #[test]
    fn gauss_converges_to_exact() {
        let mu = [0.0, 39.5, 19.7, 0.0];
        let exact = simplex_exp_integral(&mu);
        let errs: Vec<f64> = [4, 8, 12, 16]
            .iter()
            .map(|&o| (simplex_exp_integral_rule(&mu, &SimplexRule::gauss(3, o)) - exact).abs())
            .collect();
        assert!(errs.windows(2).all(|e| e[1] < e[0]), "{errs:?}");
        assert!(errs[3] < 1e-6 * exact.abs().max(1e-3), "{errs:?}");
    }
}

//! Shared helpers for the integration suites: independent numeric oracles
//! and RKHS test-function generators. Everything here stays deliberately
//! separate from the library's own linear algebra.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use wdrbo::kernel::KernelSpec;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// A random RKHS member `f = sum_i w_i k(., a_i)` rescaled to the requested
/// norm. Returns the anchor points and weights; evaluate with [`rkhs_eval`].
pub fn rkhs_function(
    kernel: &KernelSpec,
    dim: usize,
    n_anchors: usize,
    norm: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let anchors: Vec<Vec<f64>> = (0..n_anchors)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let mut weights: Vec<f64> = (0..n_anchors)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    // ||f||_H^2 = w^T K w.
    let mut norm_sq = 0.0;
    for i in 0..n_anchors {
        for j in 0..n_anchors {
            norm_sq +=
                weights[i] * weights[j] * kernel.eval(&anchors[i], &anchors[j]).unwrap();
        }
    }
    let scale = norm / norm_sq.sqrt().max(1e-12);
    for w in weights.iter_mut() {
        *w *= scale;
    }
    (anchors, weights)
}

pub fn rkhs_eval(kernel: &KernelSpec, anchors: &[Vec<f64>], weights: &[f64], z: &[f64]) -> f64 {
    anchors
        .iter()
        .zip(weights)
        .map(|(a, w)| w * kernel.eval(z, a).unwrap())
        .sum()
}

/// Inverse standard-normal CDF (Acklam's rational approximation, ~1e-9
/// absolute error); used by quadrature oracles.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}

/// Midpoint-quantile grid of `N(mean, std)`: the `n` values at probabilities
/// `(i + 0.5) / n`. Averaging a function over it is a deterministic
/// quadrature of the normal expectation.
pub fn normal_quantile_grid(mean: f64, std: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| mean + std * inverse_normal_cdf((i as f64 + 0.5) / n as f64))
        .collect()
}

#[test]
fn quantile_grid_moments() {
    let g = normal_quantile_grid(0.6, 0.2, 4001);
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    let var = g.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / g.len() as f64;
    assert!((mean - 0.6).abs() < 1e-6);
    assert!((var - 0.04).abs() < 2e-4);
}

#[test]
fn jacobi_on_known_matrix() {
    // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
    let mut e = jacobi_eigenvalues(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    e.sort_by(f64::total_cmp);
    assert!((e[0] - 1.0).abs() < 1e-10);
    assert!((e[1] - 3.0).abs() < 1e-10);
}

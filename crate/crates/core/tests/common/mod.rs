#![allow(dead_code)]

use diva_core::{Dataset, Matrix, SampleWeights};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random features with one-hot labels drawn uniformly over `k` classes.
pub fn random_dataset(rng: &mut StdRng, n: usize, m: usize, k: usize) -> Dataset {
    let z = random_matrix(rng, n, m);
    let classes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Dataset::from_classes(z, &classes, k).unwrap()
}

pub fn random_weights(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> SampleWeights {
    SampleWeights::new((0..n).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
pub fn dense_inverse(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a[(i, j)]
        } else if j - n == i {
            1.0
        } else {
            0.0
        }
    });
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| aug[(x, col)].abs().total_cmp(&aug[(y, col)].abs()))
            .unwrap();
        for j in 0..2 * n {
            let t = aug[(col, j)];
            aug[(col, j)] = aug[(pivot, j)];
            aug[(pivot, j)] = t;
        }
        let p = aug[(col, col)];
        for j in 0..2 * n {
            aug[(col, j)] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = aug[(i, col)];
                for j in 0..2 * n {
                    aug[(i, j)] -= f * aug[(col, j)];
                }
            }
        }
    }
    Matrix::from_fn(n, n, |i, j| aug[(i, j + n)])
}

/// `(Zᵀ D Z + λI)⁻¹` formed explicitly.
pub fn explicit_c(data: &Dataset, alpha: &[f64], lambda: f64) -> Matrix {
    let z = data.features();
    let m = data.m();
    let mut k = Matrix::zeros(m, m);
    for i in 0..data.n() {
        for p in 0..m {
            for q in 0..m {
                k[(p, q)] += alpha[i] * z[(i, p)] * z[(i, q)];
            }
        }
    }
    for p in 0..m {
        k[(p, p)] += lambda;
    }
    dense_inverse(&k)
}

/// Elementwise relative error `|a − b| / max(|a|, |b|, floor)`; the floor is
/// `1e-6 · max|b|` so coordinates that are zero up to rounding are judged on
/// an absolute scale.
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-6 * scale).max(1e-300);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use slopebound::data::Dataset;
use slopebound::linalg::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn centered(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    slopebound::linalg::center(&normal_vec(rng, n))
}

/// How a synthetic covariate relates to `x` and `y`.
#[derive(Debug, Clone, Copy)]
pub enum Role {
    Confounder,
    Instrument,
    Prognostic,
    Noise,
}

/// Random dataset whose covariates mix confounder-, instrument-,
/// prognostic- and noise-like roles, with a shared factor to induce
/// correlation among covariates.
pub fn mixed_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let factor = normal_vec(rng, n);
    let share: f64 = rng.gen_range(0.0..0.9);
    let mut s = Vec::with_capacity(p);
    let mut x = normal_vec(rng, n);
    let mut y = normal_vec(rng, n);
    let effect: f64 = rng.gen_range(-1.0..1.0);
    for _ in 0..p {
        let own = normal_vec(rng, n);
        let col: Vec<f64> = own
            .iter()
            .zip(&factor)
            .map(|(o, f)| (1.0 - share) * o + share * f)
            .collect();
        let role = match rng.gen_range(0..4) {
            0 => Role::Confounder,
            1 => Role::Instrument,
            2 => Role::Prognostic,
            _ => Role::Noise,
        };
        let a: f64 = rng.gen_range(0.3..1.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b: f64 = rng.gen_range(0.3..1.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let (ax, by) = match role {
            Role::Confounder => (a, b),
            Role::Instrument => (a, 0.0),
            Role::Prognostic => (0.0, b),
            Role::Noise => (0.0, 0.0),
        };
        for i in 0..n {
            x[i] += ax * col[i];
            y[i] += by * col[i];
        }
        s.push(col);
    }
    for i in 0..n {
        y[i] += effect * x[i];
    }
    Dataset::from_columns(y, x, Matrix::unlabeled(s).unwrap()).unwrap()
}

/// Covariates driven by a few strong common factors, only weakly tied to
/// `x` and `y`.
pub fn correlated_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let factors: Vec<Vec<f64>> = (0..3).map(|_| normal_vec(rng, n)).collect();
    let s: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let f = &factors[j % 3];
            let own = normal_vec(rng, n);
            f.iter().zip(&own).map(|(a, b)| a + 0.3 * b).collect()
        })
        .collect();
    let mut x = normal_vec(rng, n);
    let mut y = normal_vec(rng, n);
    for i in 0..n {
        x[i] += 0.3 * factors[0][i];
        y[i] += 0.8 * x[i] + 0.2 * factors[1][i];
    }
    Dataset::from_columns(y, x, Matrix::unlabeled(s).unwrap()).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

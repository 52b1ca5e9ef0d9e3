#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use srl_core::data::{Dataset, Family};
use srl_core::expand::{expand, ExpansionSpec};
use srl_core::GroupedDesign;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian features, sparse truth, gaussian or logistic response.
pub fn random_dataset(n: usize, p: usize, family: Family, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x = Array2::from_shape_fn((n, p), |_| normal.sample(&mut r));
    let beta: Vec<f64> = (0..p)
        .map(|j| {
            if j % 3 == 0 {
                normal.sample(&mut r)
            } else {
                0.0
            }
        })
        .collect();
    let y = Array1::from_shape_fn(n, |i| {
        let eta: f64 = 0.3 + (0..p).map(|j| x[[i, j]] * beta[j]).sum::<f64>();
        match family {
            Family::Gaussian => eta + normal.sample(&mut r),
            Family::Binomial => {
                let prob = 1.0 / (1.0 + (-eta).exp());
                if r.random::<f64>() < prob {
                    1.0
                } else {
                    0.0
                }
            }
        }
    });
    Dataset::with_default_names(y, x, family).unwrap()
}

pub fn main_design(ds: &Dataset) -> GroupedDesign {
    expand(ds.x.view(), &ds.feature_names, ExpansionSpec::none()).unwrap()
}

/// Two groups over a main-effects design: first half and second half of the columns.
pub fn two_group_design(ds: &Dataset) -> GroupedDesign {
    let mut d = main_design(ds);
    let q = d.n_columns();
    let half = q / 2;
    d.groups = vec![
        srl_core::data::Group {
            id: 1,
            label: "a".into(),
            columns: (0..half).collect(),
        },
        srl_core::data::Group {
            id: 2,
            label: "b".into(),
            columns: (half..q).collect(),
        },
    ];
    d.column_group = (0..q).map(|j| usize::from(j >= half)).collect();
    d
}

/// Proximal-gradient (FISTA) solver for the gaussian weighted lasso, used as
/// an independent reference for coordinate descent.
pub fn fista_gaussian(z: &Array2<f64>, y: &[f64], weights: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let (n, q) = z.dim();
    let nf = n as f64;
    let ybar = y.iter().sum::<f64>() / nf;
    let zbar: Vec<f64> = (0..q).map(|j| z.column(j).sum() / nf).collect();
    let zc = Array2::from_shape_fn((n, q), |(i, j)| z[[i, j]] - zbar[j]);
    let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();
    // Lipschitz constant of the smooth part: largest eigenvalue of Zc'Zc / n.
    let gram = zc.t().dot(&zc) / nf;
    let mut v = vec![1.0; q];
    let mut lip = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..q)
            .map(|i| (0..q).map(|j| gram[[i, j]] * v[j]).sum())
            .collect();
        lip = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        v = w.iter().map(|a| a / lip).collect();
    }
    let step = 1.0 / (lip * 1.0001);
    let grad = |b: &[f64]| -> Vec<f64> {
        let r: Vec<f64> = (0..n)
            .map(|i| yc[i] - (0..q).map(|j| zc[[i, j]] * b[j]).sum::<f64>())
            .collect();
        (0..q)
            .map(|j| -(0..n).map(|i| zc[[i, j]] * r[i]).sum::<f64>() / nf)
            .collect()
    };
    let prox = |u: f64, t: f64| u.signum() * (u.abs() - t).max(0.0);
    let mut beta = vec![0.0; q];
    let mut mom = beta.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let g = grad(&mom);
        let next: Vec<f64> = (0..q)
            .map(|j| {
                if weights[j].is_infinite() {
                    0.0
                } else {
                    prox(mom[j] - step * g[j], step * lambda * weights[j])
                }
            })
            .collect();
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let diff = next
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        mom = (0..q)
            .map(|j| next[j] + (t - 1.0) / t_next * (next[j] - beta[j]))
            .collect();
        beta = next;
        t = t_next;
        if diff < 1e-14 {
            break;
        }
    }
    let intercept = ybar - beta.iter().zip(&zbar).map(|(b, m)| b * m).sum::<f64>();
    (beta, intercept)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

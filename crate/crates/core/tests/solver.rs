mod common;

use common::*;
use ndarray::Array2;
use srl_core::data::Family;
use srl_core::penalty::PenaltySpec;
use srl_core::solver::{
    fit_path, fit_path_matrix, fit_path_with_lambdas, kkt_violations, lambda_max, predict,
    CoordinateDescent, SolverConfig,
};

#[test]
fn gaussian_path_matches_proximal_gradient_oracle() {
    let ds = random_dataset(50, 8, Family::Gaussian, 101);
    let design = main_design(&ds);
    let y = ds.y.to_vec();
    let pen = PenaltySpec::lasso(&design.group_sizes());
    let cfg = SolverConfig {
        tol: 1e-10,
        ..SolverConfig::default()
    };
    let fit = fit_path(&design, &y, &pen, Family::Gaussian, &cfg).unwrap();
    let weights = vec![1.0; 8];
    for &k in &[10, 40, 80] {
        let (beta, b0) = fista_gaussian(&design.z, &y, &weights, fit.lambdas[k]);
        let diff = max_abs_diff(&beta, &fit.betas[k]);
        assert!(diff < 1e-6, "lambda index {k}: max coefficient gap {diff}");
        assert!((b0 - fit.intercepts[k]).abs() < 1e-6);
    }
}

#[test]
fn weighted_path_matches_oracle() {
    let ds = random_dataset(50, 8, Family::Gaussian, 7);
    let design = two_group_design(&ds);
    let y = ds.y.to_vec();
    let pen = PenaltySpec::srl(&[4, 40], 0.5).unwrap();
    let pen = PenaltySpec {
        group_sizes: design.group_sizes(),
        ..pen
    };
    let cfg = SolverConfig {
        tol: 1e-10,
        ..SolverConfig::default()
    };
    let fit = fit_path(&design, &y, &pen, Family::Gaussian, &cfg).unwrap();
    let w = pen.column_weights(&design).unwrap();
    for &k in &[20, 60, 99] {
        let (beta, _) = fista_gaussian(&design.z, &y, &w, fit.lambdas[k]);
        assert!(max_abs_diff(&beta, &fit.betas[k]) < 1e-6);
    }
}

#[test]
fn null_model_at_lambda_max() {
    for family in [Family::Gaussian, Family::Binomial] {
        let ds = random_dataset(40, 6, family, 3);
        let design = main_design(&ds);
        let y = ds.y.to_vec();
        let pen = PenaltySpec::lasso(&design.group_sizes());
        let fit = fit_path(&design, &y, &pen, family, &SolverConfig::default()).unwrap();
        assert!(fit.betas[0].iter().all(|b| *b == 0.0));
        assert_eq!(fit.df[0], 0);
        let ybar = y.iter().sum::<f64>() / y.len() as f64;
        let expect = match family {
            Family::Gaussian => ybar,
            Family::Binomial => (ybar / (1.0 - ybar)).ln(),
        };
        assert!((fit.intercepts[0] - expect).abs() < 1e-12);
        assert_eq!(
            fit.lambdas[0],
            lambda_max(&design, &y, &pen, family).unwrap()
        );
        assert!(kkt_violations(&fit, &design, &y, &pen, 0, 1e-8)
            .unwrap()
            .is_empty());
        // just below lambda_max something enters
        assert!(fit.df[1] >= 1);
    }
}

#[test]
fn grid_shape() {
    let ds = random_dataset(30, 5, Family::Gaussian, 5);
    let design = main_design(&ds);
    let y = ds.y.to_vec();
    let pen = PenaltySpec::lasso(&design.group_sizes());
    let fit = fit_path(
        &design,
        &y,
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(fit.len(), 100);
    assert!(fit.lambdas.windows(2).all(|w| w[0] > w[1]));
    assert!((fit.lambdas[99] / fit.lambdas[0] - 1e-4).abs() < 1e-12);
    // q >= n uses the larger ratio
    let wide = random_dataset(10, 12, Family::Gaussian, 5);
    let d = main_design(&wide);
    let f = fit_path(
        &d,
        &wide.y.to_vec(),
        &PenaltySpec::lasso(&d.group_sizes()),
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    assert!((f.lambdas[99] / f.lambdas[0] - 1e-3).abs() < 1e-12);
    for (k, beta) in fit.betas.iter().enumerate() {
        assert_eq!(fit.df[k], beta.iter().filter(|b| **b != 0.0).count());
    }
}

#[test]
fn kkt_certificate_on_random_instances() {
    let mut checked = 0;
    for family in [Family::Gaussian, Family::Binomial] {
        for &n in &[30usize, 100] {
            for &q in &[5usize, 60] {
                for seed in 0..3 {
                    let ds = random_dataset(n, q, family, 1000 + seed + n as u64 * 7 + q as u64);
                    let design = two_group_design(&ds);
                    let y = ds.y.to_vec();
                    let pen = PenaltySpec::srl(&design.group_sizes(), 0.5).unwrap();
                    let fit =
                        fit_path(&design, &y, &pen, family, &SolverConfig::default()).unwrap();
                    for k in 0..fit.len() {
                        if !fit.converged[k] || fit.saturated[k] {
                            continue;
                        }
                        let v = kkt_violations(&fit, &design, &y, &pen, k, 1e-6).unwrap();
                        assert!(
                            v.is_empty(),
                            "{family} n={n} q={q} seed={seed} k={k}: {v:?}"
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1500, "only {checked} converged points certified");
}

#[test]
fn perturbed_solution_violates_kkt() {
    let ds = random_dataset(50, 8, Family::Gaussian, 17);
    let design = main_design(&ds);
    let y = ds.y.to_vec();
    let pen = PenaltySpec::lasso(&design.group_sizes());
    let mut fit = fit_path(
        &design,
        &y,
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(kkt_violations(&fit, &design, &y, &pen, 30, 1e-6)
        .unwrap()
        .is_empty());
    fit.betas[30][2] += 0.1;
    assert!(!kkt_violations(&fit, &design, &y, &pen, 30, 1e-6)
        .unwrap()
        .is_empty());
    assert!(kkt_violations(&fit, &design, &y, &pen, 500, 1e-6).is_err());
}

#[test]
fn weighted_equals_rescaled_plain_lasso() {
    for seed in 0..5 {
        let ds = random_dataset(50, 8, Family::Gaussian, 200 + seed);
        let design = two_group_design(&ds);
        let y = ds.y.to_vec();
        let pen = PenaltySpec::custom(&design.group_sizes(), &[1.0, 3.7]).unwrap();
        let w = pen.column_weights(&design).unwrap();
        let cfg = SolverConfig::default();
        let weighted = fit_path(&design, &y, &pen, Family::Gaussian, &cfg).unwrap();
        let (n, q) = design.z.dim();
        let rescaled = Array2::from_shape_fn((n, q), |(i, j)| design.z[[i, j]] / w[j]);
        let plain = fit_path_matrix(
            rescaled.view(),
            &y,
            &vec![1.0; q],
            Family::Gaussian,
            &cfg,
            None,
        )
        .unwrap();
        assert_eq!(weighted.len(), plain.len());
        for k in 0..weighted.len() {
            assert!((weighted.lambdas[k] - plain.lambdas[k]).abs() <= 1e-12 * weighted.lambdas[k]);
            let back: Vec<f64> = plain.betas[k].iter().zip(&w).map(|(b, w)| b / w).collect();
            let gap = max_abs_diff(&back, &weighted.betas[k]);
            assert!(gap < 1e-8, "seed {seed} k {k}: {gap}");
        }
    }
}

#[test]
fn gamma_zero_srl_is_lasso() {
    for seed in 0..3 {
        let ds = random_dataset(40, 10, Family::Gaussian, 300 + seed);
        let design = two_group_design(&ds);
        let y = ds.y.to_vec();
        let cfg = SolverConfig::default();
        let srl = fit_path(
            &design,
            &y,
            &PenaltySpec::srl(&design.group_sizes(), 0.0).unwrap(),
            Family::Gaussian,
            &cfg,
        )
        .unwrap();
        let lasso = fit_path(
            &design,
            &y,
            &PenaltySpec::lasso(&design.group_sizes()),
            Family::Gaussian,
            &cfg,
        )
        .unwrap();
        assert_eq!(srl.lambdas, lasso.lambdas);
        for k in 0..srl.len() {
            assert!(max_abs_diff(&srl.betas[k], &lasso.betas[k]) <= 1e-12);
        }
    }
}

#[test]
fn scaling_weights_and_lambda_jointly_is_invariant() {
    let ds = random_dataset(50, 8, Family::Gaussian, 55);
    let design = two_group_design(&ds);
    let y = ds.y.to_vec();
    let base = PenaltySpec::srl(&design.group_sizes(), 0.5).unwrap();
    let c = 4.5;
    let scaled = PenaltySpec::custom(
        &design.group_sizes(),
        &base.weights.iter().map(|w| w * c).collect::<Vec<_>>(),
    )
    .unwrap();
    let cfg = SolverConfig::default();
    let a = fit_path(&design, &y, &base, Family::Gaussian, &cfg).unwrap();
    let b = fit_path(&design, &y, &scaled, Family::Gaussian, &cfg).unwrap();
    for k in 0..a.len() {
        assert!((a.lambdas[k] / c - b.lambdas[k]).abs() < 1e-12 * a.lambdas[k]);
        assert!(max_abs_diff(&a.betas[k], &b.betas[k]) < 1e-8);
    }
}

#[test]
fn warm_start_matches_cold_start() {
    for family in [Family::Gaussian, Family::Binomial] {
        let ds = random_dataset(60, 12, family, 77);
        let design = main_design(&ds);
        let y = ds.y.to_vec();
        let pen = PenaltySpec::lasso(&design.group_sizes());
        let cfg = SolverConfig::default();
        let path = fit_path(&design, &y, &pen, family, &cfg).unwrap();
        for &k in &[5, 25, 50, 90] {
            let cold =
                fit_path_with_lambdas(&design, &y, &pen, family, &cfg, &[path.lambdas[k]]).unwrap();
            let gap = max_abs_diff(&cold.betas[0], &path.betas[k]);
            assert!(gap < 1e-6, "{family} k={k}: {gap}");
        }
    }
}

#[test]
fn objective_never_increases_across_sweeps() {
    let ds = random_dataset(50, 15, Family::Gaussian, 91);
    let design = main_design(&ds);
    let y = ds.y.to_vec();
    let (n, q) = design.z.dim();
    let x: Vec<f64> = design.z.t().iter().copied().collect();
    let pen = vec![1.0; q];
    let lmax =
        srl_core::solver::lambda_max_matrix(design.z.view(), &y, &pen, Family::Gaussian).unwrap();
    for &frac in &[0.5, 0.1, 0.005] {
        let mut cd = CoordinateDescent::new(&x, n, &pen, None, &y, lmax * frac, vec![0.0; q], 0.0);
        let mut prev = cd.objective();
        for _ in 0..200 {
            cd.sweep();
            let obj = cd.objective();
            assert!(
                obj <= prev + 1e-14 * prev.abs(),
                "objective rose from {prev} to {obj}"
            );
            prev = obj;
        }
    }
}

#[test]
fn predictions_reproduce_fitted_values_and_deviance() {
    for family in [Family::Gaussian, Family::Binomial] {
        let ds = random_dataset(80, 6, family, 12);
        let design = srl_core::expand::expand_interactions(&ds).unwrap();
        let y = ds.y.to_vec();
        let pen = PenaltySpec::srl(&design.group_sizes(), 0.5).unwrap();
        let fit = fit_path(&design, &y, &pen, family, &SolverConfig::default()).unwrap();
        for k in [0, 10, 50, 99] {
            let pred = predict(&fit, k, ds.x.view(), &design).unwrap();
            let fitted = srl_core::solver::predict_standardized(&fit, k, design.z.view()).unwrap();
            assert!(max_abs_diff(&pred, &fitted) < 1e-10);
            let dev: f64 = match family {
                Family::Gaussian => y.iter().zip(&pred).map(|(y, p)| (y - p).powi(2)).sum(),
                Family::Binomial => {
                    -2.0 * y
                        .iter()
                        .zip(&pred)
                        .map(|(y, p)| y * p.ln() + (1.0 - y) * (1.0 - p).ln())
                        .sum::<f64>()
                }
            };
            assert!(
                (dev - fit.deviance[k]).abs() < 1e-8 * dev.max(1.0),
                "{family} k={k}"
            );
            if family == Family::Binomial {
                assert!(pred.iter().all(|p| *p > 0.0 && *p < 1.0));
            }
        }
        assert!(predict(&fit, 0, ds.x.slice(ndarray::s![.., 0..5]), &design).is_err());
    }
}

#[test]
fn null_model_predictions() {
    let mut ds = random_dataset(40, 3, Family::Binomial, 8);
    for (i, v) in ds.y.iter_mut().enumerate() {
        *v = if i % 4 == 0 { 1.0 } else { 0.0 };
    }
    let design = main_design(&ds);
    let pen = PenaltySpec::lasso(&design.group_sizes());
    let fit = fit_path(
        &design,
        &ds.y.to_vec(),
        &pen,
        Family::Binomial,
        &SolverConfig::default(),
    )
    .unwrap();
    let p = predict(&fit, 0, ds.x.view(), &design).unwrap();
    assert!(p.iter().all(|v| (v - 0.25).abs() < 1e-12));

    let g = random_dataset(40, 3, Family::Gaussian, 8);
    let design = main_design(&g);
    let fit = fit_path(
        &design,
        &g.y.to_vec(),
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    let ybar = g.y.mean().unwrap();
    assert!(predict(&fit, 0, g.x.view(), &design)
        .unwrap()
        .iter()
        .all(|v| (v - ybar).abs() < 1e-12));
}

#[test]
fn infinite_weight_group_stays_at_zero() {
    let ds = random_dataset(50, 8, Family::Gaussian, 23);
    let design = two_group_design(&ds);
    let y = ds.y.to_vec();
    let pen = PenaltySpec::custom(&design.group_sizes(), &[1.0, f64::INFINITY]).unwrap();
    let fit = fit_path(
        &design,
        &y,
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    for k in 0..fit.len() {
        assert!(fit.betas[k][4..].iter().all(|b| *b == 0.0));
        if fit.converged[k] {
            assert!(kkt_violations(&fit, &design, &y, &pen, k, 1e-6)
                .unwrap()
                .is_empty());
        }
    }
    assert!(fit.df.last().copied().unwrap() == 4);
}

#[test]
fn fit_path_json_round_trip() {
    let ds = random_dataset(30, 5, Family::Gaussian, 2);
    let design = main_design(&ds);
    let pen = PenaltySpec::lasso(&design.group_sizes());
    let fit = fit_path(
        &design,
        &ds.y.to_vec(),
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
    )
    .unwrap();
    let back = srl_core::solver::FitPath::from_json(&fit.to_json().unwrap()).unwrap();
    assert_eq!(back, fit);
}

#[test]
fn dimension_errors() {
    let ds = random_dataset(30, 5, Family::Gaussian, 2);
    let design = main_design(&ds);
    let pen = PenaltySpec::lasso(&design.group_sizes());
    assert!(fit_path(
        &design,
        &ds.y.to_vec()[..20],
        &pen,
        Family::Gaussian,
        &SolverConfig::default()
    )
    .is_err());
    let bad = PenaltySpec::lasso(&[2, 3]);
    assert!(fit_path(
        &design,
        &ds.y.to_vec(),
        &bad,
        Family::Gaussian,
        &SolverConfig::default()
    )
    .is_err());
    assert!(fit_path_with_lambdas(
        &design,
        &ds.y.to_vec(),
        &pen,
        Family::Gaussian,
        &SolverConfig::default(),
        &[0.1, 0.2]
    )
    .is_err());
}

use nalgebra::DMatrix;
use nfg_core::ensembles::{random_graph, realization_seed};
use nfg_core::gaussian::{
    dual_precision, dual_vertex_covariance, dual_vertex_variances, exact_variances, gibbs_gaussian,
    gibbs_gaussian_dual, map_variance_dual_to_primal, primal_precision, Cholesky, DenseMatrix, GmrfModel,
};
use nfg_core::samplers::SamplerConfig;
use nfg_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_nalgebra(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m.get(i, j))
}

fn truncate_sig(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    ((x * scale) + 1e-9).trunc() / scale
}

#[test]
fn torus_variances_at_four_significant_figures() {
    let g = Graph::grid(15, 15, true).unwrap();
    for (s, quoted) in [(1.0f64, 0.5589f64), (20.0, 20.2046), (40.0, 23.5498)] {
        let m = GmrfModel::new(g.clone(), s, 5.0).unwrap();
        let v = exact_variances(&primal_precision(&m)).unwrap();
        // Translation invariance of the torus makes every vertex identical.
        assert!(v.iter().all(|&x| (x - v[0]).abs() < 1e-10));
        assert_eq!(truncate_sig(v[0], 4), truncate_sig(quoted, 4), "s={s}: {}", v[0]);
        let mapped = map_variance_dual_to_primal(5.0, dual_vertex_variances(&m).unwrap()[0]).unwrap();
        assert!((mapped - v[0]).abs() < 1e-10);
    }
}

#[test]
fn woodbury_identity_on_random_graphs() {
    for i in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(realization_seed(8, i));
        let g = random_graph(&mut rng, 50, 90).unwrap();
        let (s, sigma) = (rng.random_range(0.2..5.0), rng.random_range(0.2..5.0));
        let m = GmrfModel::new(g, s, sigma).unwrap();
        let p = to_nalgebra(&primal_precision(&m));
        let p_inv = p.try_inverse().unwrap();
        let cov = dual_vertex_covariance(&m).unwrap();
        let s2 = sigma * sigma;
        for a in 0..cov.dim() {
            for b in 0..cov.dim() {
                let delta = if a == b { 1.0 } else { 0.0 };
                let w = s2 * (delta - s2 * cov.get(a, b));
                assert!((w - p_inv[(a, b)]).abs() < 1e-10, "graph {i} ({a}, {b})");
            }
        }
    }
}

#[test]
fn precisions_are_spd_and_symmetric() {
    for i in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(realization_seed(9, i));
        let g = random_graph(&mut rng, 30, 60).unwrap();
        let m = GmrfModel::new(g, rng.random_range(0.01..10.0), rng.random_range(0.01..10.0)).unwrap();
        for q in [primal_precision(&m), dual_precision(&m)] {
            assert!(q.max_asymmetry() < 1e-12);
            assert!(Cholesky::new(&q).is_ok());
            let eig = to_nalgebra(&q).symmetric_eigenvalues();
            assert!(eig.iter().all(|&x| x > 0.0));
        }
    }
}

#[test]
fn exact_variances_match_nalgebra_inverse() {
    let m = GmrfModel::new(Graph::grid(4, 5, false).unwrap(), 0.7, 2.1).unwrap();
    let p = primal_precision(&m);
    let inv = to_nalgebra(&p).try_inverse().unwrap();
    for (k, v) in exact_variances(&p).unwrap().iter().enumerate() {
        assert!((v - inv[(k, k)]).abs() < 1e-12);
    }
}

#[test]
fn gibbs_estimator_is_unbiased_over_seeds() {
    let m = GmrfModel::new(Graph::ring(5).unwrap(), 1.0, 1.5).unwrap();
    let p = primal_precision(&m);
    let exact = exact_variances(&p).unwrap()[0];
    let estimates: Vec<f64> = (0..50)
        .map(|s| gibbs_gaussian(&p, &SamplerConfig { seed: s, samples: 400, ..Default::default() }).unwrap().variances[0])
        .collect();
    let mean = estimates.iter().sum::<f64>() / 50.0;
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0;
    let se = (var / 50.0).sqrt();
    assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
}

#[test]
fn dual_chain_then_map_at_large_s() {
    let m = GmrfModel::new(Graph::grid(15, 15, true).unwrap(), 40.0, 5.0).unwrap();
    let exact = exact_variances(&primal_precision(&m)).unwrap()[0];
    let est = gibbs_gaussian_dual(&m, &SamplerConfig { seed: 1, samples: 100, ..Default::default() }).unwrap();
    let vv = est.vertex_variances.unwrap();
    let pooled = vv.iter().sum::<f64>() / vv.len() as f64;
    let mapped = map_variance_dual_to_primal(5.0, pooled).unwrap();
    assert!((mapped - exact).abs() / exact <= 5e-3);
}

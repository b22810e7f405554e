use nfg_core::ensembles::{random_model, realization_seed, EnsembleConfig};
use nfg_core::oracle::{
    betti_scale, duality_check, duality_check_with, duality_scale, exact_dual, exact_primal, extrinsic_sums,
    intermediate_dual_partition, Oracle,
};
use nfg_core::{dualize, ising_model, potts_model, Graph, PrimalNfg};
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(seed: u64) -> PrimalNfg<f64> {
    let cfg = EnsembleConfig {
        max_vertices: 6,
        max_edges: 9,
        ..EnsembleConfig::mixed()
    };
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_functions_agree_up_to_q_pow_edges(seed in any::<u64>()) {
        prop_assert!(duality_check(&small(seed)).unwrap() < 1e-10);
    }

    #[test]
    fn marginals_sum_to_one(seed in any::<u64>()) {
        let p = small(seed);
        for sums in [exact_primal(&p).unwrap(), exact_dual(&dualize(&p)).unwrap()] {
            for m in sums.edge_marginals().unwrap().iter().chain(&sums.vertex_marginals().unwrap()) {
                prop_assert!((m.sum() - Complex::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sum_product_rule_per_edge(seed in any::<u64>()) {
        let p = small(seed);
        let o = Oracle::default();
        let z = o.exact_primal(&p).unwrap().z;
        for e in 0..p.graph().num_edges() {
            let s = extrinsic_sums(&p, e, o).unwrap();
            let recon: Complex<f64> = s.iter().zip(p.edge_factor(e).values()).map(|(a, b)| a * b).sum();
            prop_assert!((recon - z).norm() / z.norm() < 1e-10);
        }
    }
}

#[test]
fn intermediate_model_identity() {
    let o = Oracle::default();
    for i in 0..10 {
        let p = small(realization_seed(3, i));
        let alpha = duality_scale(&p).unwrap();
        for e in 0..p.graph().num_edges() {
            let s = extrinsic_sums(&p, e, o).unwrap();
            for (a, sa) in s.iter().enumerate() {
                let zi = intermediate_dual_partition(&p, e, a, o).unwrap();
                assert!((zi / alpha - sa).norm() / sa.norm() < 1e-10, "model {i} edge {e} a={a}");
            }
        }
    }
}

#[test]
fn betti_power_is_not_the_dft_scale_on_cyclic_graphs() {
    let tri = ising_model(Graph::ring(3).unwrap(), &[0.5; 3], &[0.0; 3]).unwrap();
    assert_eq!(betti_scale::<f64>(&tri).unwrap(), 2.0);
    assert_eq!(duality_scale::<f64>(&tri).unwrap(), 8.0);
    let wrong = duality_check_with(&tri, 2.0, Oracle::default()).unwrap();
    assert!((wrong - 3.0).abs() < 1e-12);
}

#[test]
fn larger_grid_with_potts_factors() {
    let g = Graph::grid(2, 3, false).unwrap();
    let p = potts_model(g, 3, &[0.3, 0.7, 0.1, 0.9, 0.5, 0.2, 0.4], &[0.0; 6]).unwrap();
    assert!(duality_check(&p).unwrap() < 1e-12);
}

#[test]
fn budget_refusal_is_an_error() {
    let p = ising_model(Graph::grid(6, 6, true).unwrap(), &[0.3; 72], &[0.15; 36]).unwrap();
    assert!(matches!(exact_primal(&p), Err(nfg_core::Error::BudgetExceeded { .. })));
    assert!(Oracle::with_budget(1 << 10).exact_primal(&p).is_err());
}

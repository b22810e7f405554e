use nfg_core::oracle::{chain_ising_marginals, exact_dual, exact_primal, ring_potts_marginals, Boundary};
use nfg_core::{dualize, ising_lower_bounds, ising_model, potts_model, Graph};

fn beta_grid() -> impl Iterator<Item = f64> {
    (1..=20).map(|k| k as f64 * 0.1)
}

#[test]
fn ising_chains_and_rings_match_enumeration() {
    for n in 1..=8 {
        for j in beta_grid() {
            let couplings: Vec<f64> = (0..n).map(|e| j * (1.0 + 0.1 * e as f64)).collect();
            let free = chain_ising_marginals(Boundary::Free, &couplings).unwrap();
            let p = ising_model(Graph::path(n + 1).unwrap(), &couplings, &vec![0.0; n + 1]).unwrap();
            let (ep, ed) = (exact_primal(&p).unwrap(), exact_dual(&dualize(&p)).unwrap());
            for e in 0..n {
                assert!(free.edge_primal[e].max_abs_diff(&ep.edge_marginal(e).unwrap()) < 1e-12);
                assert!(free.edge_dual[e].max_abs_diff(&ed.edge_marginal(e).unwrap()) < 1e-12);
                let (bound, _) = ising_lower_bounds(couplings[e]);
                assert!((free.edge_primal[e].get(0).re - bound).abs() < 1e-12);
            }
            for v in 0..=n {
                assert!(free.vertex_primal[v].max_abs_diff(&ep.vertex_marginal(v).unwrap()) < 1e-12);
            }
            if n >= 3 {
                let ring = chain_ising_marginals(Boundary::Periodic, &couplings).unwrap();
                let p = ising_model(Graph::ring(n).unwrap(), &couplings, &vec![0.0; n]).unwrap();
                let (ep, ed) = (exact_primal(&p).unwrap(), exact_dual(&dualize(&p)).unwrap());
                for e in 0..n {
                    assert!(ring.edge_primal[e].max_abs_diff(&ep.edge_marginal(e).unwrap()) < 1e-12, "n={n} j={j}");
                    assert!(ring.edge_dual[e].max_abs_diff(&ed.edge_marginal(e).unwrap()) < 1e-12, "n={n} j={j}");
                }
            }
        }
    }
}

#[test]
fn signed_ising_ring_matches_enumeration() {
    let couplings = [0.7, -0.4, 1.1, -0.9, 0.3];
    let ring = chain_ising_marginals(Boundary::Periodic, &couplings).unwrap();
    let p = ising_model(Graph::ring(5).unwrap(), &couplings, &[0.0; 5]).unwrap();
    let ed = exact_dual(&dualize(&p)).unwrap();
    for e in 0..5 {
        assert!(ring.edge_dual[e].max_abs_diff(&ed.edge_marginal(e).unwrap()) < 1e-12);
    }
}

#[test]
fn potts_rings_match_enumeration() {
    for q in [2, 3, 4] {
        for n in 3..=8 {
            for j in beta_grid() {
                let (mp, md) = ring_potts_marginals(q, j, n).unwrap();
                let p = potts_model(Graph::ring(n).unwrap(), q, &vec![j; n], &vec![0.0; n]).unwrap();
                let (ep, ed) = (exact_primal(&p).unwrap(), exact_dual(&dualize(&p)).unwrap());
                assert!(mp.max_abs_diff(&ep.edge_marginal(0).unwrap()) < 1e-12, "q={q} n={n} j={j}");
                assert!(md.max_abs_diff(&ed.edge_marginal(0).unwrap()) < 1e-12, "q={q} n={n} j={j}");
            }
        }
    }
}

#[test]
fn long_ring_stays_finite() {
    let ring = chain_ising_marginals(Boundary::Periodic, &vec![0.8f64; 5000]).unwrap();
    assert!(ring.edge_primal[0].values().iter().all(|x| x.re.is_finite()));
    let (mp, _) = ring_potts_marginals(3, 0.8f64, 5000).unwrap();
    assert!((mp.sum().re - 1.0).abs() < 1e-12);
}

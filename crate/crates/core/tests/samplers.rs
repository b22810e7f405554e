use nfg_core::oracle::{exact_dual, exact_primal};
use nfg_core::samplers::{
    estimate_primal_via_dual, gibbs_dual, gibbs_primal, swp, swp_weight, DualMethod, SamplerConfig, SubgraphState,
    SwpChain,
};
use nfg_core::{dualize, ising_model, BpConfig, Graph, Marginal};

fn cfg(seed: u64, samples: usize) -> SamplerConfig {
    SamplerConfig {
        seed,
        samples,
        ..Default::default()
    }
}

#[test]
fn swp_visits_subgraphs_in_proportion_to_weight() {
    let p = ising_model(Graph::path(4).unwrap(), &[0.6, 0.9, 0.4], &[0.3, 0.2, 0.5, 0.1]).unwrap();
    let g = p.graph().clone();
    let weights: Vec<f64> = (0..8u64)
        .map(|mask| {
            let mut s = SubgraphState::empty(&g);
            for e in 0..3 {
                if mask & (1 << e) != 0 {
                    s.toggle(&g, e);
                }
            }
            swp_weight(&p, &s)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut chain = SwpChain::new(&p, 17).unwrap();
    for _ in 0..10_000 {
        chain.step();
    }
    let n = 1_000_000usize;
    let mut hist = [0u64; 8];
    for _ in 0..n {
        chain.step();
        hist[chain.state().index() as usize] += 1;
    }
    for (k, &w) in weights.iter().enumerate() {
        let target = w / total;
        let sd = (target * (1.0 - target) / n as f64).sqrt();
        let got = hist[k] as f64 / n as f64;
        assert!((got - target).abs() < 3.0 * sd, "state {k}: {got} vs {target}");
    }
}

#[test]
fn samplers_are_deterministic() {
    let p = ising_model(Graph::grid(3, 3, true).unwrap(), &[0.4; 18], &[0.15; 9]).unwrap();
    let d = dualize(&p);
    let c = cfg(99, 300);
    assert_eq!(gibbs_primal(&p, &c).unwrap().edge, gibbs_primal(&p, &c).unwrap().edge);
    assert_eq!(gibbs_dual(&d, &c).unwrap().vertex, gibbs_dual(&d, &c).unwrap().vertex);
    assert_eq!(swp(&p, &c).unwrap().edge, swp(&p, &c).unwrap().edge);
    assert_ne!(swp(&p, &c).unwrap().edge, swp(&p, &cfg(100, 300)).unwrap().edge);
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn error(est: &[Marginal<f64>], exact: &[Marginal<f64>]) -> f64 {
    est.iter().zip(exact).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
}

#[test]
fn more_samples_give_smaller_median_error() {
    let p = ising_model(Graph::ring(4).unwrap(), &[0.5, 0.7, 0.3, 0.6], &[0.2; 4]).unwrap();
    let d = dualize(&p);
    let ep = exact_primal(&p).unwrap().edge_marginals().unwrap();
    let ed = exact_dual(&d).unwrap().edge_marginals().unwrap();
    type Run = Box<dyn Fn(SamplerConfig) -> Vec<Marginal<f64>>>;
    let runs: Vec<(&str, Run, &Vec<Marginal<f64>>)> = vec![
        ("gibbs_primal", Box::new({ let p = p.clone(); move |c| gibbs_primal(&p, &c).unwrap().edge }), &ep),
        ("gibbs_dual", Box::new({ let d = d.clone(); move |c| gibbs_dual(&d, &c).unwrap().edge }), &ed),
        ("swp", Box::new({ let p = p.clone(); move |c| swp(&p, &c).unwrap().edge }), &ed),
    ];
    for (name, run, exact) in &runs {
        let errs = |n: usize| median((0..20).map(|s| error(&run(cfg(s, n)), exact)).collect());
        let (coarse, fine) = (errs(500), errs(5000));
        assert!(fine < coarse, "{name}: {fine} !< {coarse}");
    }
}

#[test]
fn primal_via_dual_paths_agree_with_oracle() {
    let p = ising_model(Graph::grid(3, 3, true).unwrap(), &[0.3; 18], &[0.2; 9]).unwrap();
    let exact = exact_primal(&p).unwrap();
    for (method, tol) in [(DualMethod::Swp, 2e-2), (DualMethod::GibbsDual, 2e-2), (DualMethod::BpDual(BpConfig::default()), 5e-2)] {
        let out = estimate_primal_via_dual(&p, method, &cfg(4, 50_000)).unwrap();
        assert!(out.converged);
        for e in 0..18 {
            let err = out.edge[e].max_abs_diff(&exact.edge_marginal(e).unwrap());
            assert!(err < tol, "{method:?} edge {e}: {err}");
        }
        for v in 0..9 {
            let m = out.vertex[v].as_ref().expect("field makes every vertex map regular");
            assert!(m.max_abs_diff(&exact.vertex_marginal(v).unwrap()) < tol);
        }
    }
}

#[test]
fn free_chain_via_dual_gibbs_is_the_closed_form() {
    let js = [0.3f64, 0.8, 1.5];
    let p = ising_model(Graph::path(4).unwrap(), &js, &[0.0; 4]).unwrap();
    let out = estimate_primal_via_dual(&p, DualMethod::GibbsDual, &cfg(0, 1000)).unwrap();
    for (e, &j) in js.iter().enumerate() {
        let target = j.exp() / (2.0 * j.cosh());
        assert!((out.edge[e].get(0).re - target).abs() < 1e-12);
    }
    assert!(out.vertex.iter().all(Option::is_none));
}

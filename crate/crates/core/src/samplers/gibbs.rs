use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{draw, Counts, Estimates, SamplerConfig, Scan};
use crate::error::{Error, Result};
use crate::factor::{Domain, Factor};
use crate::model::{DualNfg, PrimalNfg};
use crate::scalar::Scalar;

fn real_tables<T: Scalar>(fs: &[Factor<T>]) -> Vec<Vec<T>> {
    fs.iter().map(Factor::real_parts).collect()
}

/// Heat-bath Gibbs over the vertex variables, starting from all zeros.
/// Records `x_v` and `y_e = x_tail - x_head` after every retained sweep.
pub fn gibbs_primal<T: Scalar>(p: &PrimalNfg<T>, cfg: &SamplerConfig) -> Result<Estimates<T>> {
    cfg.validate()?;
    if !p.is_nonnegative() {
        return Err(Error::SamplerRefused(
            "primal Gibbs needs nonnegative factors".into(),
        ));
    }
    let g = p.graph();
    let q = p.q();
    let (n, ne) = (g.num_vertices(), g.num_edges());
    let psi = real_tables(p.edge_factors());
    let phi = real_tables(p.vertex_factors());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = vec![0usize; n];
    let mut w = vec![T::zero(); q];
    let mut update = |v: usize, x: &mut [usize], rng: &mut ChaCha8Rng| {
        for (a, wa) in w.iter_mut().enumerate() {
            let mut acc = phi[v][a];
            for &(e, sign) in g.incident(v) {
                let (t, h) = g.edge(e);
                let other = if sign > 0 { x[h] } else { x[t] };
                let y = if sign > 0 { (a + q - other) % q } else { (other + q - a) % q };
                acc = acc * psi[e][y];
            }
            *wa = acc;
        }
        x[v] = draw(rng, &w);
    };
    let mut counts = Counts::new(q, ne, n);
    let mut y = vec![0usize; ne];
    let burn = cfg.burn_in_for(n);
    let total = burn + cfg.samples * cfg.thinning;
    for sweep in 0..total {
        for i in 0..n {
            let v = match cfg.scan {
                Scan::Systematic => i,
                Scan::Random => rng.random_range(0..n),
            };
            update(v, &mut x, &mut rng);
        }
        if sweep >= burn && (sweep - burn + 1) % cfg.thinning == 0 {
            for (ye, &(t, h)) in y.iter_mut().zip(g.edges()) {
                *ye = (x[t] + q - x[h]) % q;
            }
            counts.record(&y, &x);
        }
    }
    counts.into_estimates(Domain::Primal)
}

/// Heat-bath Gibbs over the dual edge variables of a nonnegative dual model.
///
/// Each sweep updates every edge given the rest, then resamples the shift
/// `y~ + k c` along each fundamental cycle `c`. The cycle moves keep `x~`
/// fixed, which single-edge moves cannot do when `phi~` is a delta (zero field).
pub fn gibbs_dual<T: Scalar>(d: &DualNfg<T>, cfg: &SamplerConfig) -> Result<Estimates<T>> {
    cfg.validate()?;
    if !d.is_nonnegative() {
        return Err(Error::SamplerRefused(
            "dual model has negative or complex factors; its marginal functions are not \
             probabilities, use dual BP instead"
                .into(),
        ));
    }
    let g = d.graph();
    let q = d.q();
    let (nv, ne) = (g.num_vertices(), g.num_edges());
    let psi = real_tables(d.edge_factors());
    let phi = real_tables(d.vertex_factors());
    let cycles = g.fundamental_cycles();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut y = vec![0usize; ne];
    let mut x = vec![0usize; nv];
    let mut w = vec![T::zero(); q];
    let mut counts = Counts::new(q, ne, nv);
    let burn = cfg.burn_in_for(ne);
    let total = burn + cfg.samples * cfg.thinning;
    for sweep in 0..total {
        for i in 0..ne {
            let e = match cfg.scan {
                Scan::Systematic => i,
                Scan::Random => rng.random_range(0..ne),
            };
            let (t, h) = g.edge(e);
            let b = y[e];
            for (a, wa) in w.iter_mut().enumerate() {
                let xt = (x[t] + a + q - b) % q;
                let xh = (x[h] + b + q - a) % q;
                *wa = psi[e][a] * phi[t][xt] * phi[h][xh];
            }
            let a = draw(&mut rng, &w);
            x[t] = (x[t] + a + q - b) % q;
            x[h] = (x[h] + b + q - a) % q;
            y[e] = a;
        }
        for c in &cycles {
            for (k, wk) in w.iter_mut().enumerate() {
                *wk = c.iter().fold(T::one(), |acc, &(e, s)| {
                    let ye = if s > 0 { (y[e] + k) % q } else { (y[e] + q - k) % q };
                    acc * psi[e][ye]
                });
            }
            let k = draw(&mut rng, &w);
            for &(e, s) in c {
                y[e] = if s > 0 { (y[e] + k) % q } else { (y[e] + q - k) % q };
            }
        }
        if sweep >= burn && (sweep - burn + 1) % cfg.thinning == 0 {
            counts.record(&y, &x);
        }
    }
    counts.into_estimates(Domain::Dual)
}

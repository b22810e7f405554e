//! Loopy sum-product on primal and dual models.
//!
//! Both domains reduce to the same shape: variables carry a unary table and
//! every factor is a table over a signed sum of its variables. In the primal,
//! variables are vertices and edge factors read `x_tail - x_head`; in the dual,
//! variables are edges and vertex factors read `sum_e M[e][v] y~_e`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::factor::{transform, Domain, Location};
use crate::marginal::Marginal;
use crate::model::{DomainTag, Nfg};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Every message is recomputed from the previous iteration's messages.
    Flooding,
    /// Factors are visited in index order and use the freshest messages.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    /// Weight on the previous message, in `[0, 1)`.
    pub damping: f64,
    /// Stop once the largest absolute message change falls below this.
    pub tol: f64,
    pub max_iters: usize,
    pub schedule: Schedule,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-9,
            max_iters: 10_000,
            schedule: Schedule::Flooding,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::OutOfRange(format!(
                "damping {} not in [0, 1)",
                self.damping
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::OutOfRange(format!("tol {} must be positive", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BpResult<T> {
    pub domain: Domain,
    pub edge_beliefs: Vec<Marginal<T>>,
    pub vertex_beliefs: Vec<Marginal<T>>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl<T: Scalar> BpResult<T> {
    pub fn belief(&self, loc: Location) -> &Marginal<T> {
        match loc {
            Location::Edge(e) => &self.edge_beliefs[e],
            Location::Vertex(v) => &self.vertex_beliefs[v],
        }
    }
}

type Msg<T> = Vec<Complex<T>>;

struct SumGraph<T> {
    q: usize,
    unary: Vec<Msg<T>>,
    var_loc: Vec<Location>,
    tables: Vec<Msg<T>>,
    factor_loc: Vec<Location>,
    /// Per factor: `(variable, sign)`.
    scope: Vec<Vec<(usize, i8)>>,
    /// Per variable: `(factor, slot in that factor's scope)`.
    adj: Vec<Vec<(usize, usize)>>,
}

impl<T: Scalar> SumGraph<T> {
    fn from_model<D: DomainTag>(m: &Nfg<T, D>) -> Self {
        let g = m.graph();
        let q = m.q();
        let edge_tab: Vec<Msg<T>> = m.edge_factors().iter().map(|f| f.values().to_vec()).collect();
        let vert_tab: Vec<Msg<T>> = m.vertex_factors().iter().map(|f| f.values().to_vec()).collect();
        let (unary, var_loc, tables, factor_loc, scope) = match D::DOMAIN {
            Domain::Primal => (
                vert_tab,
                (0..g.num_vertices()).map(Location::Vertex).collect::<Vec<_>>(),
                edge_tab,
                (0..g.num_edges()).map(Location::Edge).collect::<Vec<_>>(),
                g.edges().iter().map(|&(t, h)| vec![(t, 1), (h, -1)]).collect::<Vec<_>>(),
            ),
            Domain::Dual => (
                edge_tab,
                (0..g.num_edges()).map(Location::Edge).collect(),
                vert_tab,
                (0..g.num_vertices()).map(Location::Vertex).collect(),
                (0..g.num_vertices()).map(|v| g.incident(v).to_vec()).collect(),
            ),
        };
        let mut adj = vec![Vec::new(); unary.len()];
        for (f, sc) in scope.iter().enumerate() {
            for (k, &(i, _)) in sc.iter().enumerate() {
                adj[i].push((f, k));
            }
        }
        Self {
            q,
            unary,
            var_loc,
            tables,
            factor_loc,
            scope,
            adj,
        }
    }
}

fn zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Scales by `1 / sum|m|` and rotates so that `sum m` is positive real.
fn normalize<T: Scalar>(m: &mut [Complex<T>], loc: Location) -> Result<()> {
    let l1: T = m.iter().map(|v| v.norm()).fold(T::zero(), |a, b| a + b);
    if !(l1 > T::min_positive_value()) || !l1.is_finite() {
        return Err(Error::DegenerateMessage(loc));
    }
    let inv = T::one() / l1;
    m.iter_mut().for_each(|v| *v = *v * inv);
    let s = m.iter().fold(zero::<T>(), |a, &b| a + b);
    let n = s.norm();
    if n > T::lit(1e-300) {
        let phase = s.conj() / n;
        m.iter_mut().for_each(|v| *v = *v * phase);
    }
    Ok(())
}

/// `nu(z) = mu(x)` with `z = sign * x`.
fn signed<T: Scalar>(mu: &[Complex<T>], sign: i8) -> Msg<T> {
    if sign >= 0 {
        return mu.to_vec();
    }
    let q = mu.len();
    (0..q).map(|z| mu[(q - z) % q]).collect()
}

struct State<T> {
    f2v: Vec<Vec<Msg<T>>>,
}

impl<T: Scalar> State<T> {
    fn var_to_factor(&self, g: &SumGraph<T>, i: usize, exclude: (usize, usize)) -> Result<Msg<T>> {
        let mut out = g.unary[i].clone();
        for &(f, k) in &g.adj[i] {
            if (f, k) == exclude {
                continue;
            }
            for (o, m) in out.iter_mut().zip(&self.f2v[f][k]) {
                *o = *o * m;
            }
        }
        normalize(&mut out, g.var_loc[i])?;
        Ok(out)
    }

    fn incoming(&self, g: &SumGraph<T>, f: usize) -> Result<Vec<Msg<T>>> {
        g.scope[f]
            .iter()
            .enumerate()
            .map(|(k, &(i, s))| Ok(transform(&signed(&self.var_to_factor(g, i, (f, k))?, s), false)))
            .collect()
    }

    /// New outgoing messages of factor `f`, from spectra of its incoming messages.
    fn factor_out(&self, g: &SumGraph<T>, f: usize) -> Result<Vec<Msg<T>>> {
        let q = g.q;
        let spectra = self.incoming(g, f)?;
        let d = spectra.len();
        let one = Complex::new(T::one(), T::zero());
        // Prefix/suffix products avoid dividing by spectral zeros.
        let mut prefix = vec![vec![one; q]; d + 1];
        let mut suffix = vec![vec![one; q]; d + 1];
        for k in 0..d {
            for a in 0..q {
                prefix[k + 1][a] = prefix[k][a] * spectra[k][a];
                suffix[d - k - 1][a] = suffix[d - k][a] * spectra[d - k - 1][a];
            }
        }
        let table = &g.tables[f];
        (0..d)
            .map(|k| {
                let loo: Msg<T> = (0..q).map(|a| prefix[k][a] * suffix[k + 1][a]).collect();
                let dist = transform(&loo, true);
                let sign = g.scope[f][k].1;
                let mut out: Msg<T> = (0..q)
                    .map(|x| {
                        let sx = if sign >= 0 { x } else { (q - x) % q };
                        (0..q).fold(zero::<T>(), |acc, s| acc + table[(sx + s) % q] * dist[s])
                    })
                    .collect();
                normalize(&mut out, g.factor_loc[f])?;
                Ok(out)
            })
            .collect()
    }

    fn update_factor(&mut self, f: usize, fresh: Vec<Msg<T>>, damping: T) -> T {
        let mut residual = T::zero();
        for (k, new) in fresh.into_iter().enumerate() {
            let old = &mut self.f2v[f][k];
            for (o, n) in old.iter_mut().zip(new) {
                let v = n * (T::one() - damping) + *o * damping;
                residual = residual.max((v - *o).norm());
                *o = v;
            }
        }
        residual
    }
}

fn beliefs<T: Scalar>(g: &SumGraph<T>, st: &State<T>, domain: Domain) -> Result<(Vec<Marginal<T>>, Vec<Marginal<T>>)> {
    let q = g.q;
    let var_beliefs = (0..g.unary.len())
        .map(|i| {
            let mut b = g.unary[i].clone();
            for &(f, k) in &g.adj[i] {
                for (o, m) in b.iter_mut().zip(&st.f2v[f][k]) {
                    *o = *o * m;
                }
            }
            normalize(&mut b, g.var_loc[i])?;
            Marginal::from_sums(&b, g.var_loc[i], domain)
        })
        .collect::<Result<Vec<_>>>()?;
    let factor_beliefs = (0..g.tables.len())
        .map(|f| {
            let spectra = st.incoming(g, f)?;
            let mut prod = vec![Complex::new(T::one(), T::zero()); q];
            for s in &spectra {
                for (p, v) in prod.iter_mut().zip(s) {
                    *p = *p * v;
                }
            }
            let dist = transform(&prod, true);
            let mut b: Msg<T> = dist.iter().zip(&g.tables[f]).map(|(d, t)| d * t).collect();
            normalize(&mut b, g.factor_loc[f])?;
            Marginal::from_sums(&b, g.factor_loc[f], domain)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((var_beliefs, factor_beliefs))
}

/// Runs sum-product to convergence or `max_iters`. A run that stops without
/// converging still returns its beliefs with `converged = false`.
pub fn run_bp<T: Scalar, D: DomainTag>(model: &Nfg<T, D>, cfg: &BpConfig) -> Result<BpResult<T>> {
    cfg.validate()?;
    let g = SumGraph::from_model(model);
    let q = g.q;
    let uniform = Complex::new(T::one() / T::from_usize_lossy(q), T::zero());
    let mut st = State {
        f2v: g.scope.iter().map(|sc| vec![vec![uniform; q]; sc.len()]).collect(),
    };
    let damping = T::lit(cfg.damping);
    let tol = T::lit(cfg.tol);
    let mut residual = T::infinity();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        residual = T::zero();
        match cfg.schedule {
            Schedule::Flooding => {
                let fresh = (0..g.tables.len())
                    .map(|f| st.factor_out(&g, f))
                    .collect::<Result<Vec<_>>>()?;
                for (f, out) in fresh.into_iter().enumerate() {
                    residual = residual.max(st.update_factor(f, out, damping));
                }
            }
            Schedule::Sequential => {
                for f in 0..g.tables.len() {
                    let out = st.factor_out(&g, f)?;
                    residual = residual.max(st.update_factor(f, out, damping));
                }
            }
        }
        if residual < tol {
            converged = true;
            break;
        }
    }
    let (var_b, fac_b) = beliefs(&g, &st, D::DOMAIN)?;
    let (edge_beliefs, vertex_beliefs) = match D::DOMAIN {
        Domain::Primal => (fac_b, var_b),
        Domain::Dual => (var_b, fac_b),
    };
    Ok(BpResult {
        domain: D::DOMAIN,
        edge_beliefs,
        vertex_beliefs,
        converged,
        iterations,
        residual: residual.as_f64(),
    })
}

/// `|est(0) - exact(0)| / |exact(0)|`.
pub fn relative_error<T: Scalar>(estimate: &Marginal<T>, exact: &Marginal<T>) -> T {
    (estimate.get(0) - exact.get(0)).norm() / exact.get(0).norm()
}

/// `sum_a |est(a) - exact(a)|`.
pub fn l1_error<T: Scalar>(estimate: &Marginal<T>, exact: &Marginal<T>) -> T {
    estimate
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).norm())
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{dualize, ising_model, potts_model};
    use crate::oracle::{exact_dual, exact_primal};

    fn exact_cfg() -> BpConfig {
        BpConfig {
            damping: 0.0,
            tol: 1e-13,
            ..BpConfig::default()
        }
    }

    #[test]
    fn relative_error_examples() {
        let a = Marginal::from_real(&[0.9f64, 0.1], Location::Edge(0), Domain::Primal).unwrap();
        let b = Marginal::from_real(&[1.0f64, 0.0], Location::Edge(0), Domain::Primal).unwrap();
        assert!((relative_error(&a, &b) - 0.1).abs() < 1e-15);
        assert_eq!(relative_error(&a, &a), 0.0);
        assert!((l1_error(&a, &b) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn exact_on_chain_both_domains() {
        let g = Graph::path(6).unwrap();
        let p = ising_model(g.clone(), &[0.3, -0.5, 0.9, 0.2, 1.1], &[0.1, 0.0, -0.2, 0.3, 0.0, 0.05])
            .unwrap();
        let d = dualize(&p);
        let ep = exact_primal(&p).unwrap();
        let ed = exact_dual(&d).unwrap();
        let rp = run_bp(&p, &exact_cfg()).unwrap();
        let rd = run_bp(&d, &exact_cfg()).unwrap();
        assert!(rp.converged && rd.converged);
        assert!(rp.iterations <= g.diameter() + 1, "{} iterations", rp.iterations);
        for e in 0..5 {
            assert!(rp.edge_beliefs[e].max_abs_diff(&ep.edge_marginal(e).unwrap()) < 1e-10);
            assert!(rd.edge_beliefs[e].max_abs_diff(&ed.edge_marginal(e).unwrap()) < 1e-10);
        }
        for v in 0..6 {
            assert!(rp.vertex_beliefs[v].max_abs_diff(&ep.vertex_marginal(v).unwrap()) < 1e-10);
            assert!(rd.vertex_beliefs[v].max_abs_diff(&ed.vertex_marginal(v).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn signed_dual_exact_on_tree() {
        let p = potts_model(Graph::path(5).unwrap(), 3, &[0.5, -0.25, 0.8, -0.4], &[0.2, 0.0, 0.1, 0.3, 0.0])
            .unwrap();
        let d = dualize(&p);
        assert!(!d.is_nonnegative());
        let ed = exact_dual(&d).unwrap();
        let r = run_bp(&d, &exact_cfg()).unwrap();
        assert!(r.converged);
        for e in 0..4 {
            assert!(r.edge_beliefs[e].max_abs_diff(&ed.edge_marginal(e).unwrap()) < 1e-10);
        }
        for v in 0..5 {
            assert!(r.vertex_beliefs[v].max_abs_diff(&ed.vertex_marginal(v).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn signed_dual_on_frustrated_triangle_converges() {
        let p = potts_model(Graph::ring(3).unwrap(), 3, &[0.5, -0.25, 0.5], &[0.0; 3]).unwrap();
        let r = run_bp(&dualize(&p), &BpConfig::default()).unwrap();
        assert!(r.converged);
        for m in &r.edge_beliefs {
            assert!((m.sum() - Complex::new(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn damping_does_not_move_fixed_point() {
        let g = Graph::grid(3, 3, true).unwrap();
        let js: Vec<f64> = (0..18).map(|i| 0.1 + 0.01 * i as f64).collect();
        let p = ising_model(g, &js, &[0.1; 9]).unwrap();
        let a = run_bp(&p, &BpConfig { damping: 0.0, ..BpConfig::default() }).unwrap();
        let b = run_bp(&p, &BpConfig::default()).unwrap();
        let c = run_bp(&p, &BpConfig { schedule: Schedule::Sequential, ..BpConfig::default() }).unwrap();
        assert!(a.converged && b.converged && c.converged);
        for e in 0..18 {
            assert!(a.edge_beliefs[e].max_abs_diff(&b.edge_beliefs[e]) < 1e-6);
            assert!(a.edge_beliefs[e].max_abs_diff(&c.edge_beliefs[e]) < 1e-6);
        }
        for m in a.edge_beliefs.iter().chain(&a.vertex_beliefs) {
            assert!((m.sum().re - 1.0).abs() < 1e-9 && m.sum().im.abs() < 1e-9);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let js: Vec<f64> = (0..18).map(|i| 0.2 + 0.03 * i as f64).collect();
        let p = ising_model(Graph::grid(3, 3, true).unwrap(), &js, &[0.1; 9]).unwrap();
        let r = run_bp(&p, &BpConfig { max_iters: 1, ..BpConfig::default() }).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.residual > 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let p = ising_model(Graph::path(2).unwrap(), &[0.4], &[0.0; 2]).unwrap();
        assert!(run_bp(&p, &BpConfig { damping: 1.0, ..BpConfig::default() }).is_err());
        assert!(run_bp(&p, &BpConfig { tol: 0.0, ..BpConfig::default() }).is_err());
    }

    #[test]
    fn zero_message_is_degenerate() {
        use crate::factor::Factor;
        use crate::graph::Alphabet;
        use crate::model::DualNfg;
        // The edge forces y~ = 1 while both leaf vertices force x~ = 0.
        let edge = Factor::from_real(&[0.0f64, 1.0], Location::Edge(0), Domain::Dual).unwrap();
        let vert = |v| Factor::from_real(&[1.0f64, 0.0], Location::Vertex(v), Domain::Dual).unwrap();
        let d = DualNfg::new(Graph::path(2).unwrap(), Alphabet::binary(), vec![edge], vec![vert(0), vert(1)])
            .unwrap();
        let err = run_bp(&d, &exact_cfg()).unwrap_err();
        assert!(matches!(err, Error::DegenerateMessage(_)), "{err:?}");
    }
}

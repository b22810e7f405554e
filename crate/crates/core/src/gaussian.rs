//! Thin-membrane Gaussian model: `f_p(x) ~ exp(-|Mx|^2 / 2s^2 - |x|^2 / 2 sigma^2)`.
//!
//! Its dual density over edge variables has precision `s^2 I + sigma^2 M M^T`,
//! and the dual vertex statistic is `x~ = M^T y~`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{build_incidence, Graph, IncidenceMatrix};
use crate::samplers::{SamplerConfig, Scan};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct GmrfModel<T> {
    graph: Graph,
    incidence: IncidenceMatrix,
    s: T,
    sigma: T,
}

impl<T: Scalar> GmrfModel<T> {
    pub fn new(graph: Graph, s: T, sigma: T) -> Result<Self> {
        if !(s > T::zero()) || !(sigma > T::zero()) {
            return Err(Error::OutOfRange(format!(
                "s = {s} and sigma = {sigma} must both be positive"
            )));
        }
        Ok(Self {
            incidence: build_incidence(&graph),
            graph,
            s,
            sigma,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn incidence(&self) -> &IncidenceMatrix {
        &self.incidence
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + v;
    }

    pub fn max_asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }
}

/// `M^T M / s^2 + I / sigma^2`, dimension `|V|`.
pub fn primal_precision<T: Scalar>(m: &GmrfModel<T>) -> DenseMatrix<T> {
    let n = m.graph.num_vertices();
    let mut p = DenseMatrix::zeros(n);
    let inv_s2 = T::one() / (m.s * m.s);
    for &(t, h) in m.graph.edges() {
        p.add(t, t, inv_s2);
        p.add(h, h, inv_s2);
        p.add(t, h, -inv_s2);
        p.add(h, t, -inv_s2);
    }
    let inv_sig2 = T::one() / (m.sigma * m.sigma);
    for v in 0..n {
        p.add(v, v, inv_sig2);
    }
    p
}

/// `s^2 I + sigma^2 M M^T`, dimension `|E|`.
pub fn dual_precision<T: Scalar>(m: &GmrfModel<T>) -> DenseMatrix<T> {
    let ne = m.graph.num_edges();
    let mut q = DenseMatrix::zeros(ne);
    let sig2 = m.sigma * m.sigma;
    for v in 0..m.graph.num_vertices() {
        let inc = m.graph.incident(v);
        for &(e, a) in inc {
            for &(f, b) in inc {
                q.add(e, f, sig2 * T::lit((a * b) as f64));
            }
        }
    }
    let s2 = m.s * m.s;
    for e in 0..ne {
        q.add(e, e, s2);
    }
    q
}

/// Lower-triangular factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.n;
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite(j));
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(Self { l })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l.get(k, i) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        y
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.l.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut unit = vec![T::zero(); n];
        for j in 0..n {
            unit[j] = T::one();
            let col = self.solve(&unit);
            for (i, &v) in col.iter().enumerate() {
                inv.set(i, j, v);
            }
            unit[j] = T::zero();
        }
        inv
    }
}

/// Diagonal of `precision^-1`.
pub fn exact_variances<T: Scalar>(precision: &DenseMatrix<T>) -> Result<Vec<T>> {
    let inv = Cholesky::new(precision)?.inverse();
    Ok((0..inv.n).map(|i| inv.get(i, i)).collect())
}

/// `Var(x~_v)` under the dual density: the diagonal of `M^T Q^-1 M`.
pub fn dual_vertex_variances<T: Scalar>(m: &GmrfModel<T>) -> Result<Vec<T>> {
    let chol = Cholesky::new(&dual_precision(m))?;
    let ne = m.graph.num_edges();
    (0..m.graph.num_vertices())
        .map(|v| {
            let mut col = vec![T::zero(); ne];
            for &(e, s) in m.graph.incident(v) {
                col[e] = T::lit(s as f64);
            }
            let z = chol.solve(&col);
            Ok(col.iter().zip(&z).fold(T::zero(), |a, (&c, &zz)| a + c * zz))
        })
        .collect()
}

/// `M^T Q^-1 M` as a dense `|V| x |V|` matrix.
pub fn dual_vertex_covariance<T: Scalar>(m: &GmrfModel<T>) -> Result<DenseMatrix<T>> {
    let chol = Cholesky::new(&dual_precision(m))?;
    let (nv, ne) = (m.graph.num_vertices(), m.graph.num_edges());
    let cols: Vec<Vec<T>> = (0..nv)
        .map(|v| {
            let mut col = vec![T::zero(); ne];
            for &(e, s) in m.graph.incident(v) {
                col[e] = T::lit(s as f64);
            }
            col
        })
        .collect();
    let mut out = DenseMatrix::zeros(nv);
    for (j, cj) in cols.iter().enumerate() {
        let z = chol.solve(cj);
        for (i, ci) in cols.iter().enumerate() {
            out.set(i, j, ci.iter().zip(&z).fold(T::zero(), |a, (&c, &zz)| a + c * zz));
        }
    }
    Ok(out)
}

/// `sigma^2 (1 - sigma^2 var_d)`: the primal vertex variance implied by a dual one.
pub fn map_variance_dual_to_primal<T: Scalar>(sigma: T, var_d: T) -> Result<T> {
    let s2 = sigma * sigma;
    let k = s2 * var_d;
    if !(k < T::one()) {
        return Err(Error::OutOfRange(format!(
            "sigma^2 * var_d = {k} >= 1 leaves no positive primal variance"
        )));
    }
    Ok(s2 * (T::one() - k))
}

/// Heat-bath Gibbs chain for a zero-mean Gaussian with the given precision.
#[derive(Debug, Clone)]
pub struct GaussianGibbs<T> {
    diag: Vec<T>,
    neighbours: Vec<Vec<(usize, T)>>,
    state: Vec<T>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> GaussianGibbs<T> {
    pub fn new(precision: &DenseMatrix<T>, seed: u64) -> Result<Self> {
        let n = precision.dim();
        let mut diag = Vec::with_capacity(n);
        let mut neighbours = Vec::with_capacity(n);
        for i in 0..n {
            let d = precision.get(i, i);
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite(i));
            }
            diag.push(d);
            neighbours.push(
                (0..n)
                    .filter(|&j| j != i && precision.get(i, j) != T::zero())
                    .map(|j| (j, precision.get(i, j)))
                    .collect(),
            );
        }
        Ok(Self {
            diag,
            neighbours,
            state: vec![T::zero(); n],
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &[T] {
        &self.state
    }

    fn update(&mut self, i: usize) {
        let s = self.neighbours[i]
            .iter()
            .fold(T::zero(), |a, &(j, p)| a + p * self.state[j]);
        let mean = -s / self.diag[i];
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.state[i] = mean + T::lit(z) / self.diag[i].sqrt();
    }

    pub fn sweep(&mut self, scan: Scan) {
        let n = self.state.len();
        for i in 0..n {
            let k = match scan {
                Scan::Systematic => i,
                Scan::Random => rand::Rng::random_range(&mut self.rng, 0..n),
            };
            self.update(k);
        }
    }
}

/// Mean-of-squares variance estimates from one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEstimates<T> {
    /// Per sampled coordinate (vertices for the primal, edges for the dual).
    pub variances: Vec<T>,
    /// Dual runs only: per-vertex variance of `x~ = M^T y~`.
    pub vertex_variances: Option<Vec<T>>,
    pub samples: usize,
}

fn run_chain<T: Scalar>(
    precision: &DenseMatrix<T>,
    cfg: &SamplerConfig,
    observe: Option<&Graph>,
    checkpoints: &[usize],
) -> Result<Vec<GaussianEstimates<T>>> {
    cfg.validate()?;
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints.first() == Some(&0) {
        return Err(Error::OutOfRange("checkpoints must be positive and strictly increasing".into()));
    }
    let mut chain = GaussianGibbs::new(precision, cfg.seed)?;
    let n = precision.dim();
    let burn = cfg.burn_in_for(n);
    for _ in 0..burn {
        chain.sweep(cfg.scan);
    }
    let mut sq = vec![T::zero(); n];
    let mut vsq = observe.map(|g| vec![T::zero(); g.num_vertices()]);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let last = checkpoints.last().copied().unwrap_or(0);
    for t in 1..=last {
        for _ in 0..cfg.thinning {
            chain.sweep(cfg.scan);
        }
        for (a, &x) in sq.iter_mut().zip(chain.state()) {
            *a = *a + x * x;
        }
        if let (Some(g), Some(acc)) = (observe, vsq.as_mut()) {
            for (v, a) in acc.iter_mut().enumerate() {
                let xv = g.incident(v).iter().fold(T::zero(), |s, &(e, sign)| {
                    s + T::lit(sign as f64) * chain.state()[e]
                });
                *a = *a + xv * xv;
            }
        }
        if next.peek() == Some(&&t) {
            next.next();
            let k = T::from_usize_lossy(t);
            out.push(GaussianEstimates {
                variances: sq.iter().map(|&x| x / k).collect(),
                vertex_variances: vsq.as_ref().map(|v| v.iter().map(|&x| x / k).collect()),
                samples: t,
            });
        }
    }
    Ok(out)
}

fn single<T>(mut trace: Vec<GaussianEstimates<T>>) -> GaussianEstimates<T> {
    trace.pop().expect("one checkpoint requested")
}

/// Gibbs on an arbitrary precision matrix.
pub fn gibbs_gaussian<T: Scalar>(precision: &DenseMatrix<T>, cfg: &SamplerConfig) -> Result<GaussianEstimates<T>> {
    run_chain(precision, cfg, None, &[cfg.samples]).map(single)
}

/// Gibbs on the dual density, also reporting `Var(x~_v)`.
pub fn gibbs_gaussian_dual<T: Scalar>(m: &GmrfModel<T>, cfg: &SamplerConfig) -> Result<GaussianEstimates<T>> {
    run_chain(&dual_precision(m), cfg, Some(&m.graph), &[cfg.samples]).map(single)
}

/// Running estimates of a primal chain after each of `checkpoints` samples;
/// `cfg.samples` is ignored.
pub fn gibbs_gaussian_trace<T: Scalar>(
    precision: &DenseMatrix<T>,
    cfg: &SamplerConfig,
    checkpoints: &[usize],
) -> Result<Vec<GaussianEstimates<T>>> {
    run_chain(precision, cfg, None, checkpoints)
}

/// Dual counterpart of [`gibbs_gaussian_trace`].
pub fn gibbs_gaussian_dual_trace<T: Scalar>(
    m: &GmrfModel<T>,
    cfg: &SamplerConfig,
    checkpoints: &[usize],
) -> Result<Vec<GaussianEstimates<T>>> {
    run_chain(&dual_precision(m), cfg, Some(&m.graph), checkpoints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_precisions() {
        let iso = GmrfModel::new(Graph::new(1, vec![]).unwrap(), 1.0f64, 2.0).unwrap();
        assert_eq!(primal_precision(&iso).get(0, 0), 0.25);
        let path = GmrfModel::new(Graph::path(2).unwrap(), 1.0f64, 1.0).unwrap();
        let p = primal_precision(&path);
        assert_eq!(p.data, vec![2.0, -1.0, -1.0, 2.0]);
        let one = GmrfModel::new(Graph::path(2).unwrap(), 1.5f64, 0.5).unwrap();
        assert_abs_diff_eq!(dual_precision(&one).get(0, 0), 2.25 + 2.0 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(GmrfModel::new(Graph::path(2).unwrap(), 0.0f64, 1.0).is_err());
        assert!(GmrfModel::new(Graph::path(2).unwrap(), 1.0f64, -1.0).is_err());
    }

    #[test]
    fn cholesky_inverse() {
        let m = GmrfModel::new(Graph::grid(3, 3, true).unwrap(), 0.7f64, 1.3).unwrap();
        let p = primal_precision(&m);
        let inv = Cholesky::new(&p).unwrap().inverse();
        for i in 0..9 {
            for j in 0..9 {
                let v: f64 = (0..9).map(|k| p.get(i, k) * inv.get(k, j)).sum();
                assert_abs_diff_eq!(v, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
        let mut bad = DenseMatrix::zeros(2);
        bad.set(0, 0, 1.0f64);
        bad.set(1, 1, -1.0);
        assert!(matches!(Cholesky::new(&bad), Err(Error::NotPositiveDefinite(1))));
    }

    #[test]
    fn variance_map() {
        assert_eq!(map_variance_dual_to_primal(2.0f64, 0.0).unwrap(), 4.0);
        assert!(map_variance_dual_to_primal(2.0f64, 0.25).is_err());
        let m = GmrfModel::new(Graph::ring(5).unwrap(), 0.8f64, 1.7).unwrap();
        let vp = exact_variances(&primal_precision(&m)).unwrap();
        let vd = dual_vertex_variances(&m).unwrap();
        for (a, b) in vp.iter().zip(&vd) {
            assert_abs_diff_eq!(*a, map_variance_dual_to_primal(1.7, *b).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn two_vertex_gibbs() {
        let m = GmrfModel::new(Graph::path(2).unwrap(), 1.0f64, 1.0).unwrap();
        let p = primal_precision(&m);
        let exact = exact_variances(&p).unwrap();
        let est = gibbs_gaussian(&p, &SamplerConfig { seed: 3, samples: 100_000, ..Default::default() })
            .unwrap();
        for (a, b) in est.variances.iter().zip(&exact) {
            assert!((a - b).abs() / b < 0.05);
        }
    }

    #[test]
    fn dual_gibbs_reports_vertex_statistic() {
        let m = GmrfModel::new(Graph::ring(4).unwrap(), 1.0f64, 1.0).unwrap();
        let est = gibbs_gaussian_dual(&m, &SamplerConfig { seed: 1, samples: 50_000, ..Default::default() })
            .unwrap();
        let exact = dual_vertex_variances(&m).unwrap();
        for (a, b) in est.vertex_variances.unwrap().iter().zip(&exact) {
            assert!((a - b).abs() / b < 0.05);
        }
    }

    #[test]
    fn trace_checkpoints_match_single_runs() {
        let m = GmrfModel::new(Graph::ring(4).unwrap(), 0.8f64, 1.3).unwrap();
        let cfg = SamplerConfig { seed: 3, burn_in: Some(0), ..Default::default() };
        let trace = gibbs_gaussian_dual_trace(&m, &cfg, &[1, 7, 20]).unwrap();
        assert_eq!(trace.iter().map(|t| t.samples).collect::<Vec<_>>(), vec![1, 7, 20]);
        let direct = gibbs_gaussian_dual(&m, &SamplerConfig { samples: 7, ..cfg }).unwrap();
        assert_eq!(trace[1], direct);
        assert!(gibbs_gaussian_trace(&primal_precision(&m), &cfg, &[3, 3]).is_err());
    }
}

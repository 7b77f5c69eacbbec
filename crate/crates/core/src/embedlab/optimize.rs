//! Minimizing the embedding ratio by projected gradient descent.
//!
//! The ratio is invariant under translating and scaling `f`, so iterates are
//! kept centred with pair average 1 and the descent runs on the quotient.
//! For `p < 2` the norm is smoothed as `Σ (s² + ε)^{p/2}` (entries for ℓ_p,
//! singular values for S_p); the reported value is always the exact ratio at
//! the returned witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{embedding_ratio, VertexEmbedding, Target};
use crate::error::{Error, Result};
use crate::graphs::RegularGraph;
use crate::numlin::{check_exponent, gaussian_matrix, svd, Complex64, ComplexMatrix};
use crate::rng::{real_normal, substream};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub grad_tol: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            restarts: 4,
            max_iters: 300,
            initial_step: 1.0,
            backtrack: 0.5,
            grad_tol: 1e-9,
            epsilon: 1e-10,
            seed: 0,
        }
    }
}

impl EmbedConfig {
    fn validate(&self, p: f64) -> Result<()> {
        check_exponent(p)?;
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameters("restarts and max_iters must be >= 1".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || !(self.initial_step > 0.0) || !(self.grad_tol > 0.0)
        {
            return Err(Error::InvalidParameters(
                "backtrack must lie in (0, 1); initial_step and grad_tol must be > 0".into(),
            ));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidParameters("epsilon must be >= 0".into()));
        }
        if p < 2.0 && self.epsilon == 0.0 {
            return Err(Error::NonSmoothConfiguration { p });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEstimate {
    /// Exact ratio at `witness`; an upper bound on the embedding expansion.
    pub value: f64,
    pub witness: VertexEmbedding,
    pub restarts: usize,
    /// Accepted descent steps over all restarts.
    pub iterations: usize,
}

/// Upper bound on the ℓ_p embedding expansion with images in `R^m`.
///
/// Restart 0 starts from a Fiedler vector (optimal for `p = 2`); the others
/// from Gaussian points. Every final iterate is also rounded to its best
/// threshold cut along each coordinate, since cut embeddings are feasible and
/// for `p = 1` the best one is optimal along that line.
pub fn lp_expansion_estimate(g: &RegularGraph, p: f64, m: usize, cfg: &EmbedConfig) -> Result<EmbeddingEstimate> {
    cfg.validate(p)?;
    let prob = Problem::new(g, Target::VectorLp, p, m, cfg)?;
    let n = g.n();
    let runs: Vec<Run> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                fiedler_start(g, m)?
            } else {
                let mut rng = substream(cfg.seed, r as u64);
                (0..n)
                    .map(|_| ComplexMatrix::from_fn(m, 1, |_, _| Complex64::new(real_normal(&mut rng), 0.0)))
                    .collect()
            };
            prob.descend(start, cfg, r)
        })
        .collect::<Result<_>>()?;

    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mut candidates: Vec<VertexEmbedding> = Vec::new();
    for run in &runs {
        candidates.push(VertexEmbedding::vectors(p, to_vectors(&run.best))?);
        for l in 0..m {
            let coordinate: Vec<f64> = run.best.iter().map(|x| x[(l, 0)].re).collect();
            if let Some(cut) = best_threshold_cut(g, &coordinate) {
                let images = (0..n)
                    .map(|i| {
                        let mut v = vec![0.0; m];
                        v[0] = f64::from(u8::from(cut[i]));
                        v
                    })
                    .collect();
                candidates.push(VertexEmbedding::vectors(p, images)?);
            }
        }
    }
    pick_best(g, candidates, cfg.restarts, iterations)
}

/// Upper bound on the S_p embedding expansion with images in `m × m`
/// complex matrices.
///
/// Restart 0 starts at the diagonal lift of the ℓ_p estimate, which has the
/// same ratio, so the result never exceeds the ℓ_p estimate.
pub fn sp_expansion_estimate(g: &RegularGraph, p: f64, m: usize, cfg: &EmbedConfig) -> Result<EmbeddingEstimate> {
    cfg.validate(p)?;
    let prob = Problem::new(g, Target::MatrixSp, p, m, cfg)?;
    let lp = lp_expansion_estimate(g, p, m, cfg)?;
    let lifted = lp.witness.diagonal_lift()?;
    let n = g.n();
    let runs: Vec<Run> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                lifted.points().to_vec()
            } else {
                let mut rng = substream(cfg.seed, r as u64);
                (0..n).map(|_| gaussian_matrix(m, m, &mut rng)).collect()
            };
            prob.descend(start, cfg, r)
        })
        .collect::<Result<_>>()?;
    let iterations = lp.iterations + runs.iter().map(|r| r.iterations).sum::<usize>();
    let mut candidates = vec![lifted];
    for run in runs {
        candidates.push(VertexEmbedding::matrices(p, run.best)?);
    }
    pick_best(g, candidates, cfg.restarts, iterations)
}

fn pick_best(
    g: &RegularGraph,
    candidates: Vec<VertexEmbedding>,
    restarts: usize,
    iterations: usize,
) -> Result<EmbeddingEstimate> {
    let mut best: Option<(f64, VertexEmbedding)> = None;
    for f in candidates {
        let value = match embedding_ratio(g, &f) {
            Ok(v) => v,
            Err(Error::DegenerateEmbedding) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, f));
        }
    }
    let (value, witness) = best.ok_or(Error::DegenerateEmbedding)?;
    Ok(EmbeddingEstimate {
        value,
        witness,
        restarts,
        iterations,
    })
}

fn to_vectors(points: &[ComplexMatrix]) -> Vec<Vec<f64>> {
    points.iter().map(|x| x.as_slice().iter().map(|z| z.re).collect()).collect()
}

/// Best sweep cut `{i : x_i ≤ θ}` over thresholds, by cut ratio
/// `|∂S| n² / (|E| · 2|S||S̄|)`; `None` when `x` is constant.
fn best_threshold_cut(g: &RegularGraph, x: &[f64]) -> Option<Vec<bool>> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut inside = vec![false; n];
    let mut boundary: i64 = 0;
    let mut best: Option<(f64, usize)> = None;
    for (size, &v) in order.iter().enumerate().take(n - 1) {
        // moving v inside: edges to inside vertices stop crossing, others start
        for (w, &c) in g.adjacency()[v].iter().enumerate() {
            if w != v {
                boundary += if inside[w] { -(c as i64) } else { c as i64 };
            }
        }
        inside[v] = true;
        let s = (size + 1) as f64;
        // only cut between distinct values
        if x[v] == x[order[size + 1]] {
            continue;
        }
        let ratio = boundary as f64 / (s * (n as f64 - s));
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, size + 1));
        }
    }
    let (_, size) = best?;
    let mut cut = vec![false; n];
    for &v in &order[..size] {
        cut[v] = true;
    }
    Some(cut)
}

fn fiedler_start(g: &RegularGraph, m: usize) -> Result<Vec<ComplexMatrix>> {
    let n = g.n();
    let spec = svd(&ComplexMatrix::from_real_rows(&g.laplacian())?)?;
    let u = spec.u.expect("vectors requested");
    let col = u.column(n - 2);
    // L is real, so real and imaginary parts are both eigenvectors
    let re: Vec<f64> = col.iter().map(|z| z.re).collect();
    let im: Vec<f64> = col.iter().map(|z| z.im).collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    let v = if norm(&re) >= norm(&im) { re } else { im };
    Ok(v
        .iter()
        .map(|&a| ComplexMatrix::from_fn(m, 1, |l, _| Complex64::new(if l == 0 { a } else { 0.0 }, 0.0)))
        .collect())
}

struct Problem {
    target: Target,
    p: f64,
    eps: f64,
    n: usize,
    /// `(i, j, weight / |E|)` with `i < j`.
    edges: Vec<(usize, usize, f64)>,
}

struct Run {
    best: Vec<ComplexMatrix>,
    iterations: usize,
}

impl Problem {
    fn new(g: &RegularGraph, target: Target, p: f64, m: usize, cfg: &EmbedConfig) -> Result<Self> {
        g.require_symmetric()?;
        if g.n() < 2 {
            return Err(Error::InvalidParameters("need at least two vertices".into()));
        }
        if !g.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        if m == 0 {
            return Err(Error::InvalidDimension("target dimension m = 0".into()));
        }
        let e = g.edge_count();
        Ok(Problem {
            target,
            p,
            eps: if p < 2.0 { cfg.epsilon } else { 0.0 },
            n: g.n(),
            edges: g.edges().into_iter().map(|(i, j, c)| (i, j, c as f64 / e)).collect(),
        })
    }

    /// Smoothed `‖x‖^p` and, on request, its gradient.
    fn phi(&self, x: &ComplexMatrix, eps: f64, grad: bool) -> Result<(f64, Option<ComplexMatrix>)> {
        let p = self.p;
        let weight = |s2: f64| -> (f64, f64) {
            if p == 2.0 {
                (s2 + eps, 2.0)
            } else if p == 1.0 {
                let r = (s2 + eps).sqrt();
                (r, if r > 0.0 { 1.0 / r } else { 0.0 })
            } else {
                let base = s2 + eps;
                let w = if base > 0.0 { p * base.powf(p / 2.0 - 1.0) } else { 0.0 };
                (base.powf(p / 2.0), w)
            }
        };
        match self.target {
            Target::VectorLp => {
                let mut value = 0.0;
                let mut g = grad.then(|| x.clone());
                for (idx, z) in x.as_slice().iter().enumerate() {
                    let (v, w) = weight(z.norm_sqr());
                    value += v;
                    if let Some(g) = g.as_mut() {
                        g.as_mut_slice()[idx] = z * w;
                    }
                }
                Ok((value, g))
            }
            Target::MatrixSp => {
                if !grad {
                    let s = crate::numlin::singular_values(x)?;
                    return Ok((s.iter().map(|s| weight(s * s).0).sum(), None));
                }
                let spec = svd(x)?;
                let (u, v) = (spec.u.as_ref().unwrap(), spec.v.as_ref().unwrap());
                let mut value = 0.0;
                let mut uw = u.clone();
                for (l, &s) in spec.values.iter().enumerate() {
                    let (val, w) = weight(s * s);
                    value += val;
                    for i in 0..uw.rows() {
                        uw[(i, l)] *= s * w;
                    }
                }
                Ok((value, Some(uw.matmul(&v.adjoint())?)))
            }
        }
    }

    /// Edge average `N` with smoothing `eps`.
    fn edge_average(&self, x: &[ComplexMatrix], eps: f64) -> Result<f64> {
        let mut num = 0.0;
        for &(i, j, w) in &self.edges {
            num += w * self.phi(&(&x[i] - &x[j]), eps, false)?.0;
        }
        Ok(num)
    }

    /// Pair average `D` with smoothing `eps`.
    fn pair_average(&self, x: &[ComplexMatrix], eps: f64) -> Result<f64> {
        let n = self.n;
        let mut den = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                den += self.phi(&(&x[i] - &x[j]), eps, false)?.0;
            }
        }
        Ok(2.0 * den / (n * n) as f64)
    }

    /// Smoothed `N / D` and its gradient.
    fn ratio_and_gradient(&self, x: &[ComplexMatrix]) -> Result<(f64, Vec<ComplexMatrix>)> {
        let n = self.n;
        let one = Complex64::new(1.0, 0.0);
        let zero = || ComplexMatrix::zeros(x[0].rows(), x[0].cols());
        let mut gn: Vec<ComplexMatrix> = (0..n).map(|_| zero()).collect();
        let mut gd: Vec<ComplexMatrix> = (0..n).map(|_| zero()).collect();
        let mut num = 0.0;
        for &(i, j, w) in &self.edges {
            let (v, g) = self.phi(&(&x[i] - &x[j]), self.eps, true)?;
            let g = g.unwrap();
            num += w * v;
            gn[i].axpy(one * w, &g);
            gn[j].axpy(-one * w, &g);
        }
        let scale = 2.0 / (n * n) as f64;
        let mut den = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let (v, g) = self.phi(&(&x[i] - &x[j]), self.eps, true)?;
                let g = g.unwrap();
                den += v;
                gd[i].axpy(one * scale, &g);
                gd[j].axpy(-one * scale, &g);
            }
        }
        den *= scale;
        if !(den > 0.0) {
            return Err(Error::DegenerateEmbedding);
        }
        let r = num / den;
        let grad = gn
            .into_iter()
            .zip(gd)
            .map(|(a, b)| {
                let mut out = a;
                out.axpy(Complex64::new(-r, 0.0), &b);
                out.scale_real(1.0 / den)
            })
            .collect();
        Ok((r, grad))
    }

    /// Centre, then scale to unit (smoothing-free) pair average.
    fn normalize(&self, mut x: Vec<ComplexMatrix>) -> Option<Vec<ComplexMatrix>> {
        let n = self.n as f64;
        let mut mean = ComplexMatrix::zeros(x[0].rows(), x[0].cols());
        for xi in &x {
            mean.axpy(Complex64::new(1.0 / n, 0.0), xi);
        }
        for xi in &mut x {
            xi.axpy(Complex64::new(-1.0, 0.0), &mean);
        }
        let den = self.pair_average(&x, 0.0).ok()?;
        if !(den > 0.0) || !den.is_finite() {
            return None;
        }
        let s = den.powf(-1.0 / self.p);
        Some(x.into_iter().map(|xi| xi.scale_real(s)).collect())
    }

    /// Exact (unsmoothed) ratio `N / D`, without the `1/p` root.
    fn exact(&self, x: &[ComplexMatrix]) -> Result<f64> {
        Ok(self.edge_average(x, 0.0)? / self.pair_average(x, 0.0)?)
    }

    fn descend(&self, start: Vec<ComplexMatrix>, cfg: &EmbedConfig, restart: usize) -> Result<Run> {
        let mut x = self
            .normalize(start)
            .ok_or(Error::NumericalFailure { restart, detail: "degenerate starting embedding".into() })?;
        let smoothed = self.eps > 0.0;
        let mut best = (if smoothed { self.exact(&x)? } else { f64::INFINITY }, x.clone());
        let mut step = cfg.initial_step;
        let mut iterations = 0;
        while iterations < cfg.max_iters {
            let (r, g) = self.ratio_and_gradient(&x)?;
            if !r.is_finite() {
                return Err(Error::NumericalFailure {
                    restart,
                    detail: format!("non-finite ratio at iteration {iterations}"),
                });
            }
            if !smoothed && r < best.0 {
                best = (r, x.clone());
            }
            let gnorm2: f64 = g.iter().map(ComplexMatrix::frobenius_norm_sqr).sum();
            if gnorm2.sqrt() < cfg.grad_tol {
                break;
            }
            let mut accepted = None;
            while step >= MIN_STEP {
                let trial: Vec<ComplexMatrix> = x
                    .iter()
                    .zip(&g)
                    .map(|(xi, gi)| {
                        let mut t = xi.clone();
                        t.axpy(Complex64::new(-step, 0.0), gi);
                        t
                    })
                    .collect();
                if let Some(trial) = self.normalize(trial) {
                    let rt = self.edge_average(&trial, self.eps)? / self.pair_average(&trial, self.eps)?;
                    if rt.is_finite() && rt <= r - ARMIJO * step * gnorm2 {
                        accepted = Some((rt, trial));
                        break;
                    }
                }
                step *= cfg.backtrack;
            }
            let Some((rt, next)) = accepted else { break };
            x = next;
            iterations += 1;
            if smoothed {
                let exact = self.exact(&x)?;
                if exact < best.0 {
                    best = (exact, x.clone());
                }
            } else if rt < best.0 {
                best = (rt, x.clone());
            }
            step = (step / cfg.backtrack).min(cfg.initial_step * 1e6);
        }
        Ok(Run { best: best.1, iterations })
    }
}

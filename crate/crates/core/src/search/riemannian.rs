use rayon::prelude::*;

use super::{effective_p, minimize_coordinate, ExpansionEstimate, Mode, SearchConfig, Strategy, Witness};
use crate::channels::{expansion_ratio, BistochasticTuple, Subspace};
use crate::error::{Error, Result};
use crate::numlin::{check_exponent, orthonormalize, singular_values, svd, Complex64, ComplexMatrix};
use crate::rng::substream2;

/// Coordinate warm starts are only computed up to this size.
const WARM_START_LIMIT: usize = 16;
/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;

/// Smoothed objective and gradient at an orthonormal basis.
pub fn objective_and_gradient(
    t: &BistochasticTuple,
    q: &Subspace,
    p: f64,
    eps: f64,
) -> Result<(f64, ComplexMatrix)> {
    objective_and_gradient_at(t, q.basis(), p, eps)
}

/// `f(Q) = Σ_i Σ_l (σ_l(R_i)² + ε)^{p/2}` with `R_i = P B_i (Id − P)`,
/// `P = Q Q*`, summed over all `n` singular values of each `R_i`.
///
/// `Q` need not be orthonormal; `P` is always taken to be `Q Q*`, which is
/// what makes finite differences in arbitrary directions meaningful. The
/// gradient `G` satisfies `df = Re Tr[G* dQ]`.
pub fn objective_and_gradient_at(
    t: &BistochasticTuple,
    q: &ComplexMatrix,
    p: f64,
    eps: f64,
) -> Result<(f64, ComplexMatrix)> {
    let (n, proj, complement) = setup(t, q, p, eps)?;
    let mut value = 0.0;
    let mut c_total = ComplexMatrix::zeros(n, n);
    for b in t.matrices() {
        let r = &(&proj * b) * &complement;
        let spec = svd(&r)?;
        let (u, w) = (spec.u.as_ref().unwrap(), spec.v.as_ref().unwrap());
        let mut weights = Vec::with_capacity(spec.values.len());
        for &s in &spec.values {
            let base = s * s + eps;
            value += base.powf(p / 2.0);
            weights.push(if s > 0.0 { p * s * base.powf(p / 2.0 - 1.0) } else { 0.0 });
        }
        // M = U diag(w) W*; scale the columns of U first
        let mut uw = u.clone();
        for i in 0..uw.rows() {
            for (l, &wl) in weights.iter().enumerate() {
                uw[(i, l)] *= wl;
            }
        }
        let m_adj = w.matmul(&uw.adjoint())?; // M* = W diag(w) U*
        let c = &(&(b * &complement) * &m_adj) - &(&(&m_adj * &proj) * b);
        c_total.axpy(Complex64::new(1.0, 0.0), &c);
    }
    let sym = &c_total + &c_total.adjoint();
    Ok((value, &sym * q))
}

fn objective_at(t: &BistochasticTuple, q: &ComplexMatrix, p: f64, eps: f64) -> Result<f64> {
    let (_, proj, complement) = setup(t, q, p, eps)?;
    let mut value = 0.0;
    for b in t.matrices() {
        let r = &(&proj * b) * &complement;
        value += singular_values(&r)?
            .iter()
            .map(|s| (s * s + eps).powf(p / 2.0))
            .sum::<f64>();
    }
    Ok(value)
}

fn setup(
    t: &BistochasticTuple,
    q: &ComplexMatrix,
    p: f64,
    eps: f64,
) -> Result<(usize, ComplexMatrix, ComplexMatrix)> {
    check_exponent(p)?;
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameters(format!("smoothing must be finite and >= 0, got {eps}")));
    }
    if eps == 0.0 && p < 2.0 {
        return Err(Error::NonSmoothConfiguration { p });
    }
    let n = t.n();
    if q.rows() != n {
        return Err(Error::ShapeMismatch(format!("basis has {} rows, tuple acts on C^{n}", q.rows())));
    }
    let proj = q.matmul(&q.adjoint())?;
    let complement = &ComplexMatrix::identity(n) - &proj;
    Ok((n, proj, complement))
}

/// One descent run: its final basis and the objective at every accepted
/// iterate (nonincreasing by the Armijo condition).
#[derive(Debug, Clone, PartialEq)]
pub struct DescentRun {
    pub basis: ComplexMatrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient descent with backtracking and QR retraction.
pub fn descend(
    t: &BistochasticTuple,
    p: f64,
    eps: f64,
    start: &Subspace,
    cfg: &SearchConfig,
    restart: usize,
) -> Result<DescentRun> {
    let fail = |detail: String| Error::NumericalFailure { restart, detail };
    let mut q = start.basis().clone();
    let mut trace = Vec::new();
    let mut step = cfg.initial_step;
    let mut converged = false;
    let mut iterations = 0;
    loop {
        let (f, g) = objective_and_gradient_at(t, &q, p, eps)?;
        if !f.is_finite() || !g.is_finite() {
            return Err(fail(format!("non-finite objective at iteration {iterations}")));
        }
        trace.push(f);
        // tangent projection: ξ = G − Q herm(Q* G)
        let qg = q.adjoint_mul(&g)?;
        let herm = (&qg + &qg.adjoint()).scale_real(0.5);
        let xi = &g - &(&q * &herm);
        let gnorm2 = xi.frobenius_norm_sqr();
        if gnorm2.sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        if iterations == cfg.max_iters {
            break;
        }
        let mut accepted = None;
        while step >= MIN_STEP {
            let mut trial = q.clone();
            trial.axpy(Complex64::new(-step, 0.0), &xi);
            if let Ok(candidate) = orthonormalize(&trial) {
                let fc = objective_at(t, &candidate, p, eps)?;
                if fc.is_finite() && fc <= f - ARMIJO * step * gnorm2 {
                    accepted = Some(candidate);
                    break;
                }
            }
            step *= cfg.backtrack;
        }
        match accepted {
            Some(next) => q = next,
            None => {
                // no decrease at machine-level step sizes: stationary in practice
                converged = true;
                break;
            }
        }
        iterations += 1;
        step = (step / cfg.backtrack).min(cfg.initial_step * 1e6);
    }
    Ok(DescentRun {
        basis: q,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Multi-restart descent for each admissible dimension `k`.
///
/// Restart `r` at dimension `k` starts from a Haar subspace drawn from
/// substream `(k, r)`; for `n ≤ 16` restart 0 instead starts at the best
/// coordinate subspace of dimension `k`, so the result never exceeds the
/// coordinate minimum. The quantum ratio is minimized through its S_2 form.
pub fn minimize_riemannian(
    t: &BistochasticTuple,
    p: f64,
    mode: Mode,
    cfg: &SearchConfig,
) -> Result<ExpansionEstimate> {
    cfg.validate()?;
    if mode == Mode::Dim {
        return Err(Error::InfeasibleConfiguration(
            "the dimension ratio is piecewise constant; use coordinate-exhaustive or random-sample".into(),
        ));
    }
    let n = t.n();
    let p_eff = effective_p(mode, p);
    check_exponent(p_eff)?;
    let eps = if p_eff < 2.0 { cfg.epsilon } else { 0.0 };
    if eps == 0.0 && p_eff < 2.0 {
        return Err(Error::NonSmoothConfiguration { p: p_eff });
    }
    let kind = mode.ratio_kind(p);

    let jobs: Vec<(usize, usize)> = cfg
        .dims(n)?
        .into_iter()
        .flat_map(|k| (0..cfg.restarts).map(move |r| (k, r)))
        .collect();
    let runs: Vec<(f64, Subspace, usize)> = jobs
        .par_iter()
        .map(|&(k, r)| {
            let start = if r == 0 && n <= WARM_START_LIMIT {
                minimize_coordinate(t, p_eff, Mode::Sp, Some(k))?.witness_subspace(n)?
            } else {
                Subspace::haar_from(n, k, &mut substream2(cfg.seed, k as u64, r as u64))?
            };
            let run = descend(t, p_eff, eps, &start, cfg, r)?;
            let v = Subspace::spanned_by(&run.basis)?;
            let value = expansion_ratio(t, &v, kind)?.value;
            if !value.is_finite() {
                return Err(Error::NumericalFailure {
                    restart: r,
                    detail: "non-finite ratio at the final iterate".into(),
                });
            }
            Ok((value, v, run.iterations))
        })
        .collect::<Result<_>>()?;

    let iterations = runs.iter().map(|r| r.2).sum();
    let (value, best, _) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("dims() is never empty");
    Ok(ExpansionEstimate {
        value,
        k: best.dim(),
        witness: Witness::Subspace {
            basis: best.basis().clone(),
        },
        p: p_eff,
        mode,
        strategy: Strategy::Riemannian,
        evaluations: iterations,
        seed: cfg.seed,
    })
}

//! Embedding-based expansion: the ratio of an embedding `f` of a graph into
//! ℓ_p or S_p, estimators for its minimum, distortion audits, and the
//! lower bound `D ≥ h / R_ρ`.

mod harness;
mod optimize;

pub use harness::{lower_bound_experiment, schatten_comparison, HSource, LowerBoundRow, SchattenComparison};
pub use optimize::{lp_expansion_estimate, sp_expansion_estimate, EmbedConfig, EmbeddingEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{metric_ratio_r, shortest_path_metric, MetricMatrix, RegularGraph};
use crate::numlin::{check_exponent, singular_values, spectrum_pow_sum, Complex64, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Real vectors in `R^m` with the ℓ_p norm.
    VectorLp,
    /// Complex `m × m` matrices with the Schatten-p norm.
    MatrixSp,
}

/// A map from the `n` vertices into ℓ_p^m or S_p^m.
///
/// Vector images are stored as `m × 1` real-valued matrices so that both
/// targets share one representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingWire", into = "EmbeddingWire")]
pub struct VertexEmbedding {
    target: Target,
    p: f64,
    m: usize,
    points: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingWire {
    pub n: usize,
    pub target: Target,
    pub p: f64,
    pub m: usize,
    pub images: ImagesWire,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImagesWire {
    Vectors(Vec<Vec<f64>>),
    Matrices(Vec<ComplexMatrix>),
}

impl TryFrom<EmbeddingWire> for VertexEmbedding {
    type Error = Error;

    fn try_from(w: EmbeddingWire) -> Result<Self> {
        let f = match (w.target, w.images) {
            (Target::VectorLp, ImagesWire::Vectors(v)) => VertexEmbedding::vectors(w.p, v)?,
            (Target::MatrixSp, ImagesWire::Matrices(m)) => VertexEmbedding::matrices(w.p, m)?,
            (target, _) => {
                return Err(Error::InvalidParameters(format!("images do not match target {target:?}")));
            }
        };
        if f.n() != w.n || f.m != w.m {
            return Err(Error::ShapeMismatch(format!(
                "header claims n = {}, m = {} but images give n = {}, m = {}",
                w.n,
                w.m,
                f.n(),
                f.m
            )));
        }
        Ok(f)
    }
}

impl From<VertexEmbedding> for EmbeddingWire {
    fn from(f: VertexEmbedding) -> Self {
        let images = match f.target {
            Target::VectorLp => ImagesWire::Vectors((0..f.n()).map(|i| f.vector(i)).collect()),
            Target::MatrixSp => ImagesWire::Matrices(f.points.clone()),
        };
        EmbeddingWire {
            n: f.n(),
            target: f.target,
            p: f.p,
            m: f.m,
            images,
        }
    }
}

impl VertexEmbedding {
    pub fn vectors(p: f64, images: Vec<Vec<f64>>) -> Result<Self> {
        check_exponent(p)?;
        let m = images.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::InvalidDimension("vector images need n >= 1 and m >= 1".into()));
        }
        let points = images
            .into_iter()
            .map(|v| {
                if v.len() != m {
                    return Err(Error::ShapeMismatch(format!("image of length {} among length {m}", v.len())));
                }
                ComplexMatrix::from_vec(m, 1, v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexEmbedding {
            target: Target::VectorLp,
            p,
            m,
            points,
        })
    }

    pub fn matrices(p: f64, images: Vec<ComplexMatrix>) -> Result<Self> {
        check_exponent(p)?;
        let m = images.first().map_or(0, ComplexMatrix::rows);
        if m == 0 {
            return Err(Error::InvalidDimension("matrix images need n >= 1 and m >= 1".into()));
        }
        if let Some(bad) = images.iter().find(|x| x.rows() != m || x.cols() != m) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} image among {m}x{m} images",
                bad.rows(),
                bad.cols()
            )));
        }
        if images.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite image".into()));
        }
        Ok(VertexEmbedding {
            target: Target::MatrixSp,
            p,
            m,
            points: images,
        })
    }

    /// `diag(f(i))` for a vector embedding: the isometric copy of ℓ_p^m in S_p^m.
    pub fn diagonal_lift(&self) -> Result<Self> {
        if self.target != Target::MatrixSp {
            let images = (0..self.n()).map(|i| ComplexMatrix::diag_real(&self.vector(i))).collect();
            Self::matrices(self.p, images)
        } else {
            Ok(self.clone())
        }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn points(&self) -> &[ComplexMatrix] {
        &self.points
    }

    /// Image of vertex `i` as a real vector (real parts for matrix targets,
    /// read row-major).
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.points[i].as_slice().iter().map(|z| z.re).collect()
    }

    /// `‖f(i) − f(j)‖^p` in the target norm.
    pub fn distance_pow(&self, i: usize, j: usize) -> Result<f64> {
        norm_pow(self.target, &(&self.points[i] - &self.points[j]), self.p)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.distance_pow(i, j)?.powf(1.0 / self.p))
    }

    /// Same images, scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        VertexEmbedding {
            points: self.points.iter().map(|x| x.scale_real(s)).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn norm_pow(target: Target, x: &ComplexMatrix, p: f64) -> Result<f64> {
    match target {
        Target::VectorLp => Ok(x.as_slice().iter().map(|z| z.norm().powf(p)).sum()),
        Target::MatrixSp => Ok(spectrum_pow_sum(&singular_values(x)?, p)),
    }
}

fn check_graph(g: &RegularGraph, f: &VertexEmbedding) -> Result<()> {
    g.require_symmetric()?;
    if f.n() != g.n() {
        return Err(Error::ShapeMismatch(format!(
            "embedding of {} points for a graph on {} vertices",
            f.n(),
            g.n()
        )));
    }
    Ok(())
}

/// `((1/|E|) Σ_E ‖f(i)−f(j)‖^p / ((1/n²) Σ_{i,j} ‖f(i)−f(j)‖^p))^{1/p}`.
pub fn embedding_ratio(g: &RegularGraph, f: &VertexEmbedding) -> Result<f64> {
    check_graph(g, f)?;
    let n = g.n();
    let mut edge_sum = 0.0;
    for (i, j, mult) in g.edges() {
        edge_sum += mult as f64 * f.distance_pow(i, j)?;
    }
    let mut pair_sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            pair_sum += 2.0 * f.distance_pow(i, j)?;
        }
    }
    if !(pair_sum > 0.0) {
        return Err(Error::DegenerateEmbedding);
    }
    let num = edge_sum / g.edge_count();
    let den = pair_sum / (n * n) as f64;
    Ok((num / den).powf(1.0 / f.p))
}

/// Distortion of `f` against a metric, or the first pair `(x, y)` with
/// `ρ(x, y) > 0` whose images coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum DistortionReport {
    Finite {
        distortion: f64,
        expansion: f64,
        contraction: f64,
        expansion_pair: (usize, usize),
        contraction_pair: (usize, usize),
    },
    Infinite {
        pair: (usize, usize),
    },
}

impl DistortionReport {
    pub fn value(&self) -> f64 {
        match self {
            DistortionReport::Finite { distortion, .. } => *distortion,
            DistortionReport::Infinite { .. } => f64::INFINITY,
        }
    }
}

/// `D = max ‖f(x)−f(y)‖/ρ(x,y) · max ρ(x,y)/‖f(x)−f(y)‖` over pairs `x < y`.
pub fn distortion(f: &VertexEmbedding, rho: &MetricMatrix) -> Result<DistortionReport> {
    let n = f.n();
    if rho.n != n {
        return Err(Error::ShapeMismatch(format!("metric on {} points, embedding of {n}", rho.n)));
    }
    if n < 2 {
        return Err(Error::DegenerateMetric("need at least two points".into()));
    }
    let mut expansion = (0.0f64, (0, 1));
    let mut contraction = (0.0f64, (0, 1));
    for x in 0..n {
        for y in (x + 1)..n {
            let r = rho.get(x, y);
            if !(r > 0.0) {
                return Err(Error::DegenerateMetric(format!("ρ({x}, {y}) = {r}; distinct points need ρ > 0")));
            }
            let dist = f.distance(x, y)?;
            if dist == 0.0 {
                return Ok(DistortionReport::Infinite { pair: (x, y) });
            }
            if dist / r > expansion.0 {
                expansion = (dist / r, (x, y));
            }
            if r / dist > contraction.0 {
                contraction = (r / dist, (x, y));
            }
        }
    }
    Ok(DistortionReport::Finite {
        distortion: expansion.0 * contraction.0,
        expansion: expansion.0,
        contraction: contraction.0,
        expansion_pair: expansion.1,
        contraction_pair: contraction.1,
    })
}

/// `h_est / R_ρ(G)` with `ρ` the shortest-path metric of `G`.
///
/// This is a lower bound on the distortion of any embedding of `ρ` into the
/// target only if `h_est` is itself a lower bound on the embedding expansion
/// (exact for the cut oracle at `p = 1` and the spectral value at `p = 2`).
pub fn distortion_lower_bound(g: &RegularGraph, p: f64, h_est: f64) -> Result<f64> {
    let rho = shortest_path_metric(g)?;
    Ok(h_est / metric_ratio_r(g, &rho, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, build_cycle};

    fn square() -> VertexEmbedding {
        VertexEmbedding::vectors(1.0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn square_corners_on_c4() {
        let g = build_cycle(4).unwrap();
        assert_eq!(embedding_ratio(&g, &square()).unwrap(), 1.0);
        let rho = shortest_path_metric(&g).unwrap();
        let rep = distortion(&square(), &rho).unwrap();
        assert_eq!(rep.value(), 1.0);
        assert_eq!(distortion(&square().scaled(17.0), &rho).unwrap().value(), 1.0);
    }

    #[test]
    fn coincident_images_give_infinite_distortion() {
        let f = VertexEmbedding::vectors(1.0, vec![vec![0.0], vec![1.0], vec![2.0], vec![1.0]]).unwrap();
        let rho = shortest_path_metric(&build_cycle(4).unwrap()).unwrap();
        assert_eq!(distortion(&f, &rho).unwrap(), DistortionReport::Infinite { pair: (1, 3) });
    }

    #[test]
    fn constant_embedding_is_degenerate() {
        let f = VertexEmbedding::vectors(2.0, vec![vec![1.0]; 4]).unwrap();
        assert_eq!(embedding_ratio(&build_complete(4).unwrap(), &f), Err(Error::DegenerateEmbedding));
    }

    #[test]
    fn lower_bound_examples() {
        assert!((distortion_lower_bound(&build_cycle(8).unwrap(), 1.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        let k4 = build_complete(4).unwrap();
        assert!((distortion_lower_bound(&k4, 1.0, 4.0 / 3.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_lift_preserves_distances() {
        let f = square();
        let lifted = f.diagonal_lift().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((f.distance(i, j).unwrap() - lifted.distance(i, j).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for f in [square(), square().diagonal_lift().unwrap()] {
            let back: VertexEmbedding = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
            assert_eq!(back, f);
        }
        let bad = r#"{"n": 3, "target": "vector-lp", "p": 1, "m": 1, "images": [[0], [1]]}"#;
        assert!(serde_json::from_str::<VertexEmbedding>(bad).is_err());
    }
}

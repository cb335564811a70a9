//! Euclidean objects: barycenters of embedded measures, polytopes given by
//! vertices, their Hausdorff metric, and the min-norm-point map `π`.
//!
//! `π` is computed with Wolfe's nearest-point algorithm. The affine
//! subproblems are solved by SVD least squares, which stays stable when the
//! active set is close to affinely dependent.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspace::ConvexMeasureSet;
use crate::metric::euclidean_distance;

/// Vertex-described element of `cc(Rⁿ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<RawPolytope> for Polytope {
    type Error = Error;

    fn try_from(raw: RawPolytope) -> Result<Self> {
        Polytope::new(raw.dim, raw.vertices)
    }
}

impl Polytope {
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("polytope dimension must be >= 1".into()));
        }
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("polytope needs a vertex".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "vertex of length {} in a {dim}-dimensional polytope",
                v.len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite vertex coordinate".into()));
        }
        Ok(Self { dim, vertices })
    }

    /// Infers the dimension from the first vertex.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        Self::new(dim, vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }
}

/// A probability vector on finitely many points of `Rⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedMeasure {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl EmbeddedMeasure {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::Validation(format!(
                "{} points with {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Validation("points of mixed dimension".into()));
        }
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::Validation("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("weights sum to {total}")));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `Σ wᵢ xᵢ`.
pub fn barycenter(mu: &EmbeddedMeasure) -> Vec<f64> {
    let dim = mu.points[0].len();
    let mut b = vec![0.0; dim];
    for (p, w) in mu.points.iter().zip(&mu.weights) {
        for (acc, x) in b.iter_mut().zip(p) {
            *acc += w * x;
        }
    }
    b
}

/// Nearest point of a vertex hull to the origin, with its convex weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestPoint {
    pub point: Vec<f64>,
    /// Vertices carrying positive weight in `point`.
    pub active: Vec<usize>,
    pub weights: Vec<f64>,
    /// Major iterations.
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[Vec<f64>], active: &[usize], w: &[f64]) -> Vec<f64> {
    let dim = points[active[0]].len();
    let mut x = vec![0.0; dim];
    for (&i, wi) in active.iter().zip(w) {
        for (acc, p) in x.iter_mut().zip(&points[i]) {
            *acc += wi * p;
        }
    }
    x
}

/// Affine coefficients (summing to 1) of the min-norm point of the affine
/// hull of `active`.
fn affine_min_norm(points: &[Vec<f64>], active: &[usize]) -> Vec<f64> {
    let m = active.len();
    if m == 1 {
        return vec![1.0];
    }
    let base = &points[active[0]];
    let dim = base.len();
    let d = DMatrix::from_fn(dim, m - 1, |r, c| points[active[c + 1]][r] - base[r]);
    let rhs = DVector::from_fn(dim, |r, _| -base[r]);
    let svd = d.svd(true, true);
    let smax = svd.singular_values.max();
    let beta = svd
        .solve(&rhs, 1e-13 * smax.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(m - 1));
    let mut alpha = Vec::with_capacity(m);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter().copied());
    alpha
}

const MAX_MAJOR: usize = 10_000;

/// Wolfe's algorithm on an explicit point list.
pub fn nearest_point_to_origin(points: &[Vec<f64>]) -> NearestPoint {
    let scale = points.iter().map(|p| dot(p, p)).fold(1.0, f64::max);
    let tol = 1e-14 * scale;

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .expect("nonempty point list");
    let mut active = vec![start];
    let mut w = vec![1.0];
    let mut x = points[start].clone();
    let mut iterations = 0;

    while iterations < MAX_MAJOR {
        iterations += 1;
        let (j, xj) = (0..points.len())
            .map(|k| (k, dot(&x, &points[k])))
            .fold((usize::MAX, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
        if dot(&x, &x) - xj <= tol || active.contains(&j) {
            break;
        }
        active.push(j);
        w.push(0.0);

        loop {
            let alpha = affine_min_norm(points, &active);
            if alpha.iter().all(|&a| a > 1e-15) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (wi, ai) in w.iter().zip(&alpha) {
                if *ai <= 1e-15 {
                    let denom = wi - ai;
                    let t = if denom > 0.0 { wi / denom } else { 0.0 };
                    theta = theta.min(t);
                }
            }
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = theta * ai + (1.0 - theta) * *wi;
            }
            // drop the vertices whose weight reached zero (at least one does)
            let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
            let cut = min_w.max(1e-15);
            let mut keep_a = Vec::with_capacity(active.len());
            let mut keep_w = Vec::with_capacity(active.len());
            for (&i, &wi) in active.iter().zip(&w) {
                if wi > cut {
                    keep_a.push(i);
                    keep_w.push(wi);
                }
            }
            if keep_a.is_empty() {
                // all weights equal and tiny; cannot happen for a convex combination
                keep_a.push(active[0]);
                keep_w.push(1.0);
            }
            let total: f64 = keep_w.iter().sum();
            keep_w.iter_mut().for_each(|v| *v /= total);
            active = keep_a;
            w = keep_w;
            if active.len() == 1 {
                break;
            }
        }
        x = combine(points, &active, &w);
    }

    NearestPoint {
        point: x,
        active,
        weights: w,
        iterations,
    }
}

/// `π(A)`: the point of `hull(A)` of least Euclidean norm.
pub fn min_norm_point(a: &Polytope) -> Vec<f64> {
    nearest_point_to_origin(&a.vertices).point
}

/// Nearest point of `hull(A)` to `q`.
pub fn nearest_point(a: &Polytope, q: &[f64]) -> Vec<f64> {
    let shifted: Vec<Vec<f64>> = a
        .vertices
        .iter()
        .map(|v| v.iter().zip(q).map(|(x, y)| x - y).collect())
        .collect();
    let y = nearest_point_to_origin(&shifted).point;
    y.iter().zip(q).map(|(a, b)| a + b).collect()
}

fn directed_polytopes(a: &Polytope, b: &Polytope) -> f64 {
    a.vertices
        .iter()
        .map(|v| euclidean_distance(v, &nearest_point(b, v)))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two polytopes; the maximum of the distance to
/// a convex set over a hull is attained at a vertex.
pub fn hausdorff_polytopes(a: &Polytope, b: &Polytope) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::InvalidArgument(format!(
            "polytopes of dimension {} and {}",
            a.dim, b.dim
        )));
    }
    Ok(directed_polytopes(a, b).max(directed_polytopes(b, a)))
}

/// Polytope spanned by the barycenters of the generators; `coords[i]` are
/// the Euclidean coordinates of point `i` of the underlying space.
pub fn barycenter_image(a: &ConvexMeasureSet<'_>, coords: &[Vec<f64>]) -> Result<Polytope> {
    if coords.len() != a.space().len() {
        return Err(Error::InvalidArgument(format!(
            "{} coordinate vectors for a {}-point space",
            coords.len(),
            a.space().len()
        )));
    }
    let mut dim = None;
    let mut vertices = Vec::with_capacity(a.generators().len());
    for g in a.generators() {
        let support = g.support();
        for &i in &support {
            let d = coords[i].len();
            if d == 0 {
                return Err(Error::InvalidArgument(format!(
                    "support point {} has no coordinates",
                    a.space().label(i)
                )));
            }
            match dim {
                None => dim = Some(d),
                Some(e) if e != d => {
                    return Err(Error::InvalidArgument(format!(
                        "support point {} has {d} coordinates, expected {e}",
                        a.space().label(i)
                    )))
                }
                _ => {}
            }
        }
        let mu = EmbeddedMeasure {
            points: support.iter().map(|&i| coords[i].clone()).collect(),
            weights: support.iter().map(|&i| g.weights()[i]).collect(),
        };
        vertices.push(barycenter(&mu));
    }
    Polytope::new(dim.unwrap_or(0), vertices)
}

/// Families of polytope pairs sampled by [`pi_lemma_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `B = A`; every ratio is undefined.
    Identical { dim: usize, max_vertices: usize, scale: f64 },
    /// `A = {p}`, `B = {p + v}`.
    TranslatedSingletons { dim: usize, scale: f64 },
    /// Random `A`, `B` a vertex-wise perturbation of `A`.
    Perturbed {
        dim: usize,
        max_vertices: usize,
        scale: f64,
        noise: f64,
    },
    /// Planar segments from `(0,1)`: `A` horizontal, `B` tilted down.
    TiltedSegments { max_length: f64, max_drop: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    /// `None` for the fixed probe pair.
    pub trial: Option<usize>,
    pub a: Polytope,
    pub b: Polytope,
    pub pi_a: Vec<f64>,
    pub pi_b: Vec<f64>,
    pub hausdorff: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub family: ProbeFamily,
    pub seed: u64,
    pub trials: usize,
    pub skipped: usize,
    pub fixed: ProbeRecord,
    /// All sampled pairs with a defined ratio, in trial order.
    pub records: Vec<ProbeRecord>,
    /// Largest ratio over sampled pairs only.
    pub family_max_ratio: Option<f64>,
    /// Largest ratio including the fixed pair, and its record.
    pub max_ratio: f64,
    pub witness: ProbeRecord,
    /// `max_ratio > 1 + 1e-9`: `π` is not short on the probed pairs.
    pub shortness_violated: bool,
}

/// Hausdorff distances at or below this are treated as zero.
const DEGENERATE_HAUSDORFF: f64 = 1e-12;

/// `A = hull{(0,1), (0.1,1)}`, `B = hull{(0,1), (0.1,0.99)}`.
pub fn fixed_probe_pair() -> (Polytope, Polytope) {
    (
        Polytope::new(2, vec![vec![0.0, 1.0], vec![0.1, 1.0]]).expect("valid"),
        Polytope::new(2, vec![vec![0.0, 1.0], vec![0.1, 0.99]]).expect("valid"),
    )
}

fn probe_pair(trial: Option<usize>, a: Polytope, b: Polytope) -> Option<ProbeRecord> {
    let hausdorff = hausdorff_polytopes(&a, &b).ok()?;
    if hausdorff <= DEGENERATE_HAUSDORFF {
        return None;
    }
    let pi_a = min_norm_point(&a);
    let pi_b = min_norm_point(&b);
    let ratio = euclidean_distance(&pi_a, &pi_b) / hausdorff;
    Some(ProbeRecord {
        trial,
        a,
        b,
        pi_a,
        pi_b,
        hausdorff,
        ratio,
    })
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect()
}

fn sample_pair(family: &ProbeFamily, rng: &mut ChaCha8Rng) -> Result<(Polytope, Polytope)> {
    Ok(match *family {
        ProbeFamily::Identical {
            dim,
            max_vertices,
            scale,
        } => {
            let nv = rng.gen_range(1..=max_vertices.max(1));
            let a = Polytope::new(dim, (0..nv).map(|_| random_point(rng, dim, scale)).collect())?;
            (a.clone(), a)
        }
        ProbeFamily::TranslatedSingletons { dim, scale } => {
            let p = random_point(rng, dim, scale);
            let v = random_point(rng, dim, scale);
            let q = p.iter().zip(&v).map(|(x, y)| x + y).collect();
            (Polytope::new(dim, vec![p])?, Polytope::new(dim, vec![q])?)
        }
        ProbeFamily::Perturbed {
            dim,
            max_vertices,
            scale,
            noise,
        } => {
            let nv = rng.gen_range(1..=max_vertices.max(1));
            let shift = random_point(rng, dim, 2.0 * scale);
            let verts: Vec<Vec<f64>> = (0..nv)
                .map(|_| {
                    random_point(rng, dim, scale)
                        .iter()
                        .zip(&shift)
                        .map(|(x, s)| x + s)
                        .collect()
                })
                .collect();
            let moved = verts
                .iter()
                .map(|v| {
                    let e = random_point(rng, dim, noise);
                    v.iter().zip(&e).map(|(x, y)| x + y).collect()
                })
                .collect();
            (Polytope::new(dim, verts)?, Polytope::new(dim, moved)?)
        }
        ProbeFamily::TiltedSegments {
            max_length,
            max_drop,
        } => {
            let len = rng.gen_range(0.0..max_length).max(1e-6);
            let drop = rng.gen_range(0.0..max_drop).max(1e-9);
            (
                Polytope::new(2, vec![vec![0.0, 1.0], vec![len, 1.0]])?,
                Polytope::new(2, vec![vec![0.0, 1.0], vec![len, 1.0 - drop]])?,
            )
        }
    })
}

/// Measures `‖π(A) − π(B)‖ / d_H(A, B)` on sampled pairs plus the fixed
/// probe pair. Trial `t` draws from a ChaCha stream `t` of `seed`.
pub fn pi_lemma_probe(trials: usize, seed: u64, family: &ProbeFamily) -> Result<ProbeReport> {
    if trials < 1 {
        return Err(Error::InvalidArgument("probe needs at least one trial".into()));
    }
    let (fa, fb) = fixed_probe_pair();
    let fixed = probe_pair(None, fa, fb).expect("fixed pair is non-degenerate");

    let sampled: Vec<Option<ProbeRecord>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let (a, b) = sample_pair(family, &mut rng)?;
            Ok(probe_pair(Some(t), a, b))
        })
        .collect::<Result<_>>()?;
    let skipped = sampled.iter().filter(|r| r.is_none()).count();
    let records: Vec<ProbeRecord> = sampled.into_iter().flatten().collect();

    let family_best = records
        .iter()
        .fold(None::<&ProbeRecord>, |acc, r| match acc {
            Some(b) if b.ratio >= r.ratio => Some(b),
            _ => Some(r),
        });
    let family_max_ratio = family_best.map(|r| r.ratio);
    let witness = match family_best {
        Some(r) if r.ratio > fixed.ratio => r.clone(),
        _ => fixed.clone(),
    };
    Ok(ProbeReport {
        family: family.clone(),
        seed,
        trials,
        skipped,
        max_ratio: witness.ratio,
        shortness_violated: witness.ratio > 1.0 + 1e-9,
        witness,
        fixed,
        records,
        family_max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[&[f64]]) -> Polytope {
        Polytope::from_vertices(v.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    /// Minimizes `‖a + t (b - a)‖` over a grid of `t ∈ [0, 1]`.
    fn segment_grid_oracle(a: &[f64], b: &[f64], step: f64) -> Vec<f64> {
        let n = (1.0 / step).round() as usize;
        let mut best = (f64::INFINITY, a.to_vec());
        for s in 0..=n {
            let t = s as f64 / n as f64;
            let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
            let nn = dot(&p, &p);
            if nn < best.0 {
                best = (nn, p);
            }
        }
        best.1
    }

    #[test]
    fn barycenter_examples() {
        let single = EmbeddedMeasure::new(vec![vec![1.5, -2.0]], vec![1.0]).unwrap();
        assert_eq!(barycenter(&single), vec![1.5, -2.0]);
        let two = EmbeddedMeasure::new(vec![vec![0.0, 0.0], vec![4.0, 0.0]], vec![0.25, 0.75]).unwrap();
        assert_eq!(barycenter(&two), vec![3.0, 0.0]);
        let square = EmbeddedMeasure::new(
            vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]],
            vec![0.25; 4],
        )
        .unwrap();
        assert_eq!(barycenter(&square), vec![0.0, 0.0]);
    }

    #[test]
    fn min_norm_of_hull_containing_origin() {
        let p = poly(&[&[1.0, 1.0], &[-1.0, 1.0], &[0.0, -2.0]]);
        let y = min_norm_point(&p);
        assert!(y.iter().all(|c| c.abs() < 1e-12), "{y:?}");
    }

    #[test]
    fn min_norm_on_segments_matches_grid() {
        let y = min_norm_point(&poly(&[&[-1.0, 0.0], &[0.0, 1.0]]));
        let g = segment_grid_oracle(&[-1.0, 0.0], &[0.0, 1.0], 1e-6);
        assert!((y[0] + 0.5).abs() < 1e-12 && (y[1] - 0.5).abs() < 1e-12);
        assert!(euclidean_distance(&y, &g) < 1e-6);

        let y = min_norm_point(&poly(&[&[0.0, 1.0], &[0.1, 0.99]]));
        let g = segment_grid_oracle(&[0.0, 1.0], &[0.1, 0.99], 1e-6);
        assert!(euclidean_distance(&y, &g) < 1e-6);
        assert!((y[0] - 0.0990).abs() < 1e-4 && (y[1] - 0.9901).abs() < 1e-4);
    }

    #[test]
    fn hausdorff_polytope_examples() {
        let (a, b) = fixed_probe_pair();
        assert_eq!(hausdorff_polytopes(&a, &a).unwrap(), 0.0);
        let p = poly(&[&[1.0, 2.0]]);
        let q = poly(&[&[4.0, 6.0]]);
        assert!((hausdorff_polytopes(&p, &q).unwrap() - 5.0).abs() < 1e-12);
        // grid oracle over both segments
        let n = 2000;
        let pts = |s: &Polytope| -> Vec<Vec<f64>> {
            (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    let (u, v) = (&s.vertices()[0], &s.vertices()[1]);
                    u.iter().zip(v).map(|(x, y)| x + t * (y - x)).collect()
                })
                .collect()
        };
        let (pa, pb) = (pts(&a), pts(&b));
        let dir = |x: &[Vec<f64>], y: &[Vec<f64>]| {
            x.iter()
                .map(|p| y.iter().map(|q| euclidean_distance(p, q)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let grid = dir(&pa, &pb).max(dir(&pb, &pa));
        let h = hausdorff_polytopes(&a, &b).unwrap();
        assert!((grid - 0.01).abs() < 1e-6);
        assert!((h - 0.01).abs() < 1e-12, "{h}");
        assert!(hausdorff_polytopes(&a, &poly(&[&[0.0, 0.0, 0.0]])).is_err());
    }

    #[test]
    fn variational_certificate_on_a_tetrahedron() {
        let p = poly(&[&[1.0, 2.0, 3.0], &[2.0, -1.0, 2.5], &[0.5, 0.5, 4.0], &[3.0, 3.0, 1.0]]);
        let y = min_norm_point(&p);
        for v in p.vertices() {
            let vi: Vec<f64> = v.iter().zip(&y).map(|(a, b)| a - b).collect();
            assert!(dot(&y, &vi) >= -1e-9);
        }
    }

    #[test]
    fn probe_reports_fixed_pair_violation() {
        let r = pi_lemma_probe(
            4,
            1,
            &ProbeFamily::Identical {
                dim: 2,
                max_vertices: 3,
                scale: 1.0,
            },
        )
        .unwrap();
        assert_eq!(r.skipped, 4);
        assert!(r.records.is_empty());
        assert!(r.family_max_ratio.is_none());
        assert!((r.fixed.ratio - 9.95).abs() < 0.01, "{}", r.fixed.ratio);
        assert!(r.shortness_violated);
        assert!(pi_lemma_probe(0, 1, &r.family).is_err());
    }

    #[test]
    fn polytope_validation() {
        assert!(Polytope::new(2, vec![]).is_err());
        assert!(Polytope::new(2, vec![vec![1.0]]).is_err());
        assert!(serde_json::from_str::<Polytope>(r#"{"dim":2,"vertices":[[1,2,3]]}"#).is_err());
        let p: Polytope = serde_json::from_str(r#"{"dim":2,"vertices":[[1,2]]}"#).unwrap();
        assert_eq!(p.vertices(), &[vec![1.0, 2.0]]);
    }
}

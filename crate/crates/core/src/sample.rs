//! Seeded random instances shared by the suites, tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::euclid::Polytope;
use crate::metric::{euclidean_distance, FiniteMetricSpace};

/// Stream `stream` of the ChaCha generator seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn random_points(rng: &mut impl Rng, count: usize, dim: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect())
        .collect()
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// `count` random points of `[-scale, scale]^dim` with the Euclidean metric.
/// Points are resampled until pairwise distinct.
pub fn random_euclidean_space(
    rng: &mut impl Rng,
    count: usize,
    dim: usize,
    scale: f64,
) -> Result<(FiniteMetricSpace, Vec<Vec<f64>>)> {
    let mut pts = random_points(rng, count, dim, scale);
    for i in 0..count {
        while pts[..i].iter().any(|p| euclidean_distance(p, &pts[i]) < 1e-6 * scale) {
            pts[i] = random_points(rng, 1, dim, scale).remove(0);
        }
    }
    let space = FiniteMetricSpace::euclidean(labels("x", count), &pts)?;
    Ok((space, pts))
}

/// Probability vector on `n` points; each point is dropped with probability
/// `sparsity`, keeping at least one.
pub fn random_weights(rng: &mut impl Rng, n: usize, sparsity: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(sparsity) {
                0.0
            } else {
                rng.gen_range(0.01..1.0)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    // absorb rounding so the sum is within the measure tolerance
    let drift = 1.0 - w.iter().sum::<f64>();
    if let Some(m) = w.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *m += drift;
    }
    w
}

/// A random map between random spaces that is short by construction: the
/// source metric is `max(d₀, d_target ∘ f)` for a Euclidean `d₀`.
pub struct ShortMapInstance {
    pub source: FiniteMetricSpace,
    pub target: FiniteMetricSpace,
    pub assignment: Vec<usize>,
}

pub fn short_map_instance(rng: &mut impl Rng, source_len: usize, target_len: usize) -> Result<ShortMapInstance> {
    let (target, _) = random_euclidean_space(rng, target_len, 2, 5.0)?;
    let (base, _) = random_euclidean_space(rng, source_len, 2, 5.0)?;
    let assignment: Vec<usize> = (0..source_len).map(|_| rng.gen_range(0..target_len)).collect();
    let source = FiniteMetricSpace::from_fn(labels("s", source_len), |i, j| {
        base.dist(i, j).max(target.dist(assignment[i], assignment[j]))
    })?;
    Ok(ShortMapInstance {
        source,
        target,
        assignment,
    })
}

pub fn random_polytope(rng: &mut impl Rng, dim: usize, vertices: usize, scale: f64) -> Result<Polytope> {
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect();
    let verts = random_points(rng, vertices, dim, scale)
        .into_iter()
        .map(|v| v.iter().zip(&shift).map(|(a, b)| a + b).collect())
        .collect();
    Polytope::new(dim, verts)
}

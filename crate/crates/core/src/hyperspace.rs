//! Convex sets of measures given by finitely many generators, and the
//! Hausdorff metric they inherit from the Kantorovich metric.
//!
//! The distance from a measure to a hull is one LP over the mixture
//! coefficients and the coupling together: both marginal constraints are
//! linear in the pair. Since `ν ↦ dist(ν, hull B)` is convex, the directed
//! Hausdorff distance from `hull A` is attained at a generator of `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::Lp;
use crate::metric::{same_space, FiniteMetricSpace, PointMap, TOL};
use crate::transport::{kantorovich, pushforward, DiscreteMeasure};

#[derive(Debug, Clone)]
pub struct ConvexMeasureSet<'a> {
    space: &'a FiniteMetricSpace,
    generators: Vec<DiscreteMeasure<'a>>,
}

impl<'a> ConvexMeasureSet<'a> {
    /// Exact duplicates are dropped; call [`Self::canonicalize`] to also drop
    /// generators inside the hull of the others.
    pub fn new(generators: Vec<DiscreteMeasure<'a>>) -> Result<Self> {
        let space = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("convex set needs a generator".into()))?
            .space();
        if generators.iter().any(|g| !same_space(space, g.space())) {
            return Err(Error::InvalidArgument(
                "generators live on different spaces".into(),
            ));
        }
        let mut kept: Vec<DiscreteMeasure<'a>> = Vec::with_capacity(generators.len());
        for g in generators {
            if !kept.iter().any(|k| same_weights(k, &g)) {
                kept.push(g);
            }
        }
        Ok(Self {
            space,
            generators: kept,
        })
    }

    pub fn singleton(mu: DiscreteMeasure<'a>) -> Self {
        Self {
            space: mu.space(),
            generators: vec![mu],
        }
    }

    pub fn dirac(space: &'a FiniteMetricSpace, i: usize) -> Result<Self> {
        Ok(Self::singleton(DiscreteMeasure::dirac(space, i)?))
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn generators(&self) -> &[DiscreteMeasure<'a>] {
        &self.generators
    }

    /// Weight vectors of the generators, the JSON `generators` field.
    pub fn generator_weights(&self) -> Vec<Vec<f64>> {
        self.generators.iter().map(|g| g.weights().to_vec()).collect()
    }

    /// Minimal generator list for the same hull: generators at distance
    /// `≤ TOL` from the hull of the remaining ones are removed in order.
    pub fn canonicalize(&self) -> Result<Self> {
        let mut gens = self.generators.clone();
        let mut i = 0;
        while i < gens.len() {
            if gens.len() > 1 {
                let rest: Vec<DiscreteMeasure<'a>> = gens
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                let hull = ConvexMeasureSet {
                    space: self.space,
                    generators: rest,
                };
                if dist_point_to_hull(&gens[i], &hull)?.value <= TOL {
                    gens.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        Ok(Self {
            space: self.space,
            generators: gens,
        })
    }
}

fn same_weights(a: &DiscreteMeasure<'_>, b: &DiscreteMeasure<'_>) -> bool {
    a.weights()
        .iter()
        .zip(b.weights())
        .all(|(x, y)| (x - y).abs() <= 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullDistance {
    pub value: f64,
    /// Mixture of the hull's generators nearest to the query measure.
    pub mixture: Vec<f64>,
}

/// `min { d̂(μ, ν) : ν ∈ hull(B) }` as a single LP.
pub fn dist_point_to_hull(
    mu: &DiscreteMeasure<'_>,
    hull: &ConvexMeasureSet<'_>,
) -> Result<HullDistance> {
    if !same_space(mu.space(), hull.space) {
        return Err(Error::InvalidArgument(
            "measure and convex set live on different spaces".into(),
        ));
    }
    if hull.generators.len() == 1 {
        return Ok(HullDistance {
            value: kantorovich(mu, &hull.generators[0])?.value,
            mixture: vec![1.0],
        });
    }
    let space = hull.space;
    let rows = mu.support();
    let mut in_cols = vec![false; space.len()];
    for g in &hull.generators {
        for i in g.support() {
            in_cols[i] = true;
        }
    }
    let cols: Vec<usize> = (0..space.len()).filter(|&i| in_cols[i]).collect();

    let mut lp = Lp::minimize();
    let lambda: Vec<_> = hull
        .generators
        .iter()
        .map(|_| lp.var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let plan: Vec<Vec<_>> = rows
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| lp.var(space.dist(i, j), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();

    let simplex: Vec<_> = lambda.iter().map(|&v| (v, 1.0)).collect();
    lp.eq(&simplex, 1.0);
    for (r, &i) in rows.iter().enumerate() {
        let terms: Vec<_> = plan[r].iter().map(|&v| (v, 1.0)).collect();
        lp.eq(&terms, mu.weights()[i]);
    }
    for (c, &j) in cols.iter().enumerate() {
        let mut terms: Vec<_> = plan.iter().map(|row| (row[c], 1.0)).collect();
        for (g, &l) in hull.generators.iter().zip(&lambda) {
            let w = g.weights()[j];
            if w != 0.0 {
                terms.push((l, -w));
            }
        }
        lp.eq(&terms, 0.0);
    }

    let sol = lp.solve(&lambda)?;
    let mut mixture: Vec<f64> = sol.values.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = mixture.iter().sum();
    mixture.iter_mut().for_each(|x| *x /= total);
    Ok(HullDistance {
        value: sol.objective.max(0.0),
        mixture,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffCcp {
    pub value: f64,
    /// `max` over generators of `A` of their distance to `hull(B)`.
    pub a_to_b: f64,
    pub b_to_a: f64,
    /// Generator index attaining each directed distance.
    pub a_witness: usize,
    pub b_witness: usize,
}

fn directed(a: &ConvexMeasureSet<'_>, b: &ConvexMeasureSet<'_>) -> Result<(f64, usize)> {
    let mut best = (0.0, 0);
    for (i, g) in a.generators.iter().enumerate() {
        let d = dist_point_to_hull(g, b)?.value;
        if d > best.0 {
            best = (d, i);
        }
    }
    Ok(best)
}

pub fn hausdorff_ccp(a: &ConvexMeasureSet<'_>, b: &ConvexMeasureSet<'_>) -> Result<HausdorffCcp> {
    if !same_space(a.space, b.space) {
        return Err(Error::InvalidArgument(
            "Hausdorff distance between sets on different spaces".into(),
        ));
    }
    let (ab, ba) = rayon::join(|| directed(a, b), || directed(b, a));
    let ((a_to_b, a_witness), (b_to_a, b_witness)) = (ab?, ba?);
    Ok(HausdorffCcp {
        value: a_to_b.max(b_to_a),
        a_to_b,
        b_to_a,
        a_witness,
        b_witness,
    })
}

/// Image of a hull under the pushforward, canonicalized.
pub fn ccp_pushforward<'b>(
    f: &PointMap<'b>,
    a: &ConvexMeasureSet<'_>,
) -> Result<ConvexMeasureSet<'b>> {
    let gens = a
        .generators
        .iter()
        .map(|g| pushforward(f, g))
        .collect::<Result<Vec<_>>>()?;
    ConvexMeasureSet::new(gens)?.canonicalize()
}

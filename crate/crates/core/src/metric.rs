//! Finite metric spaces and the diagnostics run on them: metric axioms,
//! `(λ, ε)`-Lipschitz constants of maps, `C`-chain components and the
//! maximal metric glued from partial metrics.
//!
//! All checks use the absolute tolerance [`TOL`]. Properness is vacuous for
//! finite spaces and has no corresponding operation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for metric-axiom and shortness checks.
pub const TOL: f64 = 1e-9;

/// Number of axiom violations kept verbatim in an [`AxiomReport`].
const MAX_RECORDED_VIOLATIONS: usize = 64;

/// A labeled point set with a full distance matrix.
///
/// Construction only checks the shape of the input; use [`verify_metric`]
/// to check the axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<RawSpace> for FiniteMetricSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        FiniteMetricSpace::new(raw.labels, raw.dist)
    }
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if labels.len() != n {
            return Err(Error::Structural(format!(
                "{} labels for a {n}-row matrix",
                labels.len()
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|d| !d.is_finite()) {
                return Err(Error::Structural(format!("entry ({i},{j}) is not finite")));
            }
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if let Some(prev) = seen.insert(l.as_str(), i) {
                return Err(Error::Structural(format!(
                    "label {l:?} used by points {prev} and {i}"
                )));
            }
        }
        Ok(Self { labels, dist })
    }

    /// Builds a space from a distance function evaluated on `i < j` and
    /// mirrored, so the result is symmetric by construction.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<Self> {
        let n = labels.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| f(i, j)).collect())
            .collect();
        let mut dist = vec![vec![0.0; n]; n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, d) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        Self::new(labels, dist)
    }

    /// Euclidean distances between the given points.
    pub fn euclidean(labels: Vec<String>, points: &[Vec<f64>]) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::Structural(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        Self::from_fn(labels, |i, j| euclidean_distance(&points[i], &points[j]))
    }

    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            dist: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    /// The same distances under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        Self::new(labels, self.dist.clone())
    }

    /// Restriction to `indices`, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = indices
            .iter()
            .map(|&i| indices.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        Self { labels, dist }
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let d = a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomViolation {
    NonzeroDiagonal { i: usize, value: f64 },
    NonPositive { i: usize, j: usize, value: f64 },
    /// `d(i,k) > d(i,j) + d(j,k)`; `j` is the intermediate point.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub pass: bool,
    /// Total number of violations found.
    pub violation_count: usize,
    /// The first violations in `(i, j, k)` scan order.
    pub violations: Vec<AxiomViolation>,
    pub tolerance: f64,
}

/// Checks the metric axioms within [`TOL`].
///
/// Asymmetric input is a structural error, not an axiom failure.
pub fn verify_metric(space: &FiniteMetricSpace) -> Result<AxiomReport> {
    let n = space.len();
    for i in 0..n {
        for j in i + 1..n {
            if (space.dist(i, j) - space.dist(j, i)).abs() > TOL {
                return Err(Error::Structural(format!(
                    "asymmetric entries ({i},{j}): {} vs {}",
                    space.dist(i, j),
                    space.dist(j, i)
                )));
            }
        }
    }

    let per_row: Vec<Vec<AxiomViolation>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let d_ii = space.dist(i, i);
            if d_ii.abs() > TOL {
                out.push(AxiomViolation::NonzeroDiagonal { i, value: d_ii });
            }
            for j in 0..n {
                if j != i && i < j && space.dist(i, j) <= TOL {
                    out.push(AxiomViolation::NonPositive {
                        i,
                        j,
                        value: space.dist(i, j),
                    });
                }
            }
            let row_i = &space.dist[i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let row_j = &space.dist[j];
                for k in i + 1..n {
                    if k == j {
                        continue;
                    }
                    let excess = row_i[k] - (row_i[j] + row_j[k]);
                    if excess > TOL {
                        out.push(AxiomViolation::Triangle { i, j, k, excess });
                    }
                }
            }
            out
        })
        .collect();

    let violation_count = per_row.iter().map(Vec::len).sum();
    let violations = per_row
        .into_iter()
        .flatten()
        .take(MAX_RECORDED_VIOLATIONS)
        .collect();
    Ok(AxiomReport {
        pass: violation_count == 0,
        violation_count,
        violations,
        tolerance: TOL,
    })
}

/// A total map between the point sets of two finite metric spaces.
#[derive(Debug, Clone)]
pub struct PointMap<'a> {
    source: &'a FiniteMetricSpace,
    target: &'a FiniteMetricSpace,
    assignment: Vec<usize>,
}

impl<'a> PointMap<'a> {
    pub fn new(
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries, source has {} points",
                assignment.len(),
                source.len()
            )));
        }
        if let Some((i, &y)) = assignment
            .iter()
            .enumerate()
            .find(|(_, &y)| y >= target.len())
        {
            return Err(Error::InvalidArgument(format!(
                "point {i} maps to {y}, target has {} points",
                target.len()
            )));
        }
        Ok(Self {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(space: &'a FiniteMetricSpace) -> Self {
        Self {
            source: space,
            target: space,
            assignment: (0..space.len()).collect(),
        }
    }

    pub fn constant(
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        y: usize,
    ) -> Result<Self> {
        Self::new(source, target, vec![y; source.len()])
    }

    pub fn source(&self) -> &'a FiniteMetricSpace {
        self.source
    }

    pub fn target(&self) -> &'a FiniteMetricSpace {
        self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &PointMap<'a>) -> Result<PointMap<'a>> {
        if !same_space(self.target, then.source) {
            return Err(Error::InvalidArgument(
                "composition: target of the first map is not the source of the second".into(),
            ));
        }
        Ok(PointMap {
            source: self.source,
            target: then.target,
            assignment: self.assignment.iter().map(|&y| then.apply(y)).collect(),
        })
    }
}

pub(crate) fn same_space(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
    std::ptr::eq(a, b) || a == b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub epsilon: f64,
    pub lambda_star: f64,
    /// Lexicographically smallest source pair attaining `lambda_star`.
    pub witness_pair: (usize, usize),
}

/// Least `λ` such that `f` is `(λ, ε)`-Lipschitz on its finite source.
pub fn lipschitz_constant(f: &PointMap<'_>, epsilon: f64) -> Result<LipschitzReport> {
    let target = f.target();
    lipschitz_with(f.source(), |i, j| target.dist(f.apply(i), f.apply(j)), epsilon)
}

/// Same as [`lipschitz_constant`] for a map whose image distances are given
/// directly, e.g. a map into Euclidean space.
pub fn lipschitz_with(
    source: &FiniteMetricSpace,
    image_dist: impl Fn(usize, usize) -> f64,
    epsilon: f64,
) -> Result<LipschitzReport> {
    if source.len() < 2 {
        return Err(Error::InvalidArgument(
            "Lipschitz constant needs at least 2 source points".into(),
        ));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} < 0")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut witness = (0, 1);
    for i in 0..source.len() {
        for j in i + 1..source.len() {
            let ratio = ((image_dist(i, j) - epsilon) / source.dist(i, j)).max(0.0);
            if ratio > best {
                best = ratio;
                witness = (i, j);
            }
        }
    }
    Ok(LipschitzReport {
        epsilon,
        lambda_star: best,
        witness_pair: witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    #[serde(rename = "C")]
    pub c: f64,
    /// Components ordered by their smallest index, members ascending.
    pub components: Vec<Vec<usize>>,
    pub diameters: Vec<f64>,
    pub max_diameter: f64,
    /// Pair realizing `max_diameter`.
    pub witness_pair: (usize, usize),
}

/// Partitions the space into classes joined by `C`-chains.
///
/// Gaps up to `C + TOL` count as links.
pub fn chain_components(space: &FiniteMetricSpace, c: f64) -> Result<ChainReport> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidArgument(format!("chain scale C = {c} must be > 0")));
    }
    let n = space.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if space.dist(i, j) <= c + TOL {
                uf.union(i, j);
            }
        }
    }
    let components = uf.classes();
    let mut diameters = Vec::with_capacity(components.len());
    let mut max_diameter = 0.0;
    let mut witness_pair = (0, 0);
    for comp in &components {
        let mut diam = 0.0;
        let mut w = (comp[0], comp[0]);
        for (a, &i) in comp.iter().enumerate() {
            for &j in &comp[a + 1..] {
                if space.dist(i, j) > diam {
                    diam = space.dist(i, j);
                    w = (i, j);
                }
            }
        }
        if diam > max_diameter {
            max_diameter = diam;
            witness_pair = w;
        }
        diameters.push(diam);
    }
    Ok(ChainReport {
        c,
        components,
        diameters,
        max_diameter,
        witness_pair,
    })
}

/// A pair where the glued metric is strictly below a supplied distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub part: usize,
    pub a: String,
    pub b: String,
    pub supplied: f64,
    pub glued: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueResult {
    pub space: FiniteMetricSpace,
    pub disagreements: Vec<Disagreement>,
}

/// The largest metric dominated by every supplied partial distance.
///
/// Points are identified by label; the output lists labels in order of first
/// appearance. Distances are shortest paths in the union multigraph, so where
/// parts conflict the smaller value wins and the conflict is reported.
pub fn glue_maximal(parts: &[FiniteMetricSpace]) -> Result<GlueResult> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let part_idx: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| {
            p.labels()
                .iter()
                .map(|l| {
                    *index.entry(l.as_str()).or_insert_with(|| {
                        labels.push(l.clone());
                        labels.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    let n = labels.len();
    let mut weight = vec![vec![f64::INFINITY; n]; n];
    let mut uf = UnionFind::new(n);
    for (i, row) in weight.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (p, idx) in parts.iter().zip(&part_idx) {
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                let (u, v) = (idx[a], idx[b]);
                let d = p.dist(a, b);
                if d < weight[u][v] {
                    weight[u][v] = d;
                    weight[v][u] = d;
                }
                uf.union(u, v);
            }
        }
    }
    let classes = uf.classes();
    if classes.len() > 1 {
        return Err(Error::Disconnected {
            classes: classes
                .iter()
                .map(|c| c.iter().map(|&i| labels[i].clone()).collect())
                .collect(),
        });
    }

    let mut dist: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| dense_dijkstra(&weight, s))
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = dist[i][j].min(dist[j][i]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    let mut disagreements = Vec::new();
    for (pi, (p, idx)) in parts.iter().zip(&part_idx).enumerate() {
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                let glued = dist[idx[a]][idx[b]];
                let supplied = p.dist(a, b);
                if glued < supplied - TOL {
                    disagreements.push(Disagreement {
                        part: pi,
                        a: p.label(a).to_string(),
                        b: p.label(b).to_string(),
                        supplied,
                        glued,
                    });
                }
            }
        }
    }

    Ok(GlueResult {
        space: FiniteMetricSpace::new(labels, dist)?,
        disagreements,
    })
}

/// O(n²) Dijkstra on a dense weight matrix (`INFINITY` = no edge).
fn dense_dijkstra(weight: &[Vec<f64>], source: usize) -> Vec<f64> {
    let n = weight.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = &weight[u];
        for v in 0..n {
            let cand = best + row[v];
            if !done[v] && cand < dist[v] {
                dist[v] = cand;
            }
        }
    }
    dist
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so class representatives are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Classes ordered by smallest member, members ascending.
    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            let s = *slot.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[s].push(i);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn line(points: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(labels(points.len()), |i, j| (points[i] - points[j]).abs())
            .unwrap()
    }

    #[test]
    fn equilateral_passes() {
        let s = FiniteMetricSpace::from_fn(labels(3), |_, _| 1.0).unwrap();
        assert!(verify_metric(&s).unwrap().pass);
    }

    #[test]
    fn triangle_violation_is_reported_as_triple() {
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 5.0],
                vec![1.0, 0.0, 1.0],
                vec![5.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let r = verify_metric(&s).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violation_count, 1);
        assert!(matches!(
            r.violations[0],
            AxiomViolation::Triangle { i: 0, j: 1, k: 2, .. }
        ));
    }

    #[test]
    fn asymmetric_and_non_square_are_structural() {
        let s = FiniteMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(verify_metric(&s), Err(Error::Structural(_))));
        let e = FiniteMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![1.0]]);
        assert!(matches!(e, Err(Error::Structural(_))));
        let e = FiniteMetricSpace::new(labels(1), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(e, Err(Error::Structural(_))));
    }

    #[test]
    fn zero_off_diagonal_fails_axioms() {
        let s = FiniteMetricSpace::from_fn(labels(2), |_, _| 0.0).unwrap();
        let r = verify_metric(&s).unwrap();
        assert!(!r.pass);
        assert!(matches!(r.violations[0], AxiomViolation::NonPositive { i: 0, j: 1, .. }));
    }

    #[test]
    fn identity_and_constant_lipschitz() {
        let s = line(&[0.0, 1.0, 3.0, 7.0]);
        let id = PointMap::identity(&s);
        let r = lipschitz_constant(&id, 0.0).unwrap();
        assert_eq!(r.lambda_star, 1.0);
        assert_eq!(r.witness_pair, (0, 1));
        let c = PointMap::constant(&s, &s, 2).unwrap();
        for eps in [0.0, 0.5, 10.0] {
            assert_eq!(lipschitz_constant(&c, eps).unwrap().lambda_star, 0.0);
        }
    }

    #[test]
    fn lipschitz_needs_two_points() {
        let s = line(&[0.0]);
        assert!(lipschitz_constant(&PointMap::identity(&s), 0.0).is_err());
    }

    #[test]
    fn lipschitz_witness_is_smallest_pair_on_ties() {
        let s = line(&[0.0, 1.0, 2.0]);
        let doubled = line(&[0.0, 2.0, 4.0]);
        let f = PointMap::new(&s, &doubled, vec![0, 1, 2]).unwrap();
        let r = lipschitz_constant(&f, 0.0).unwrap();
        assert_eq!(r.lambda_star, 2.0);
        assert_eq!(r.witness_pair, (0, 1));
        // ε = 1 favours the long pair: (4 - 1)/2 > (2 - 1)/1
        let r = lipschitz_constant(&f, 1.0).unwrap();
        assert_eq!(r.witness_pair, (0, 2));
        assert_eq!(r.lambda_star, 1.5);
    }

    #[test]
    fn chains_on_a_line() {
        let s = line(&[0.0, 1.0, 5.0, 6.0]);
        let r = chain_components(&s, 1.0).unwrap();
        assert_eq!(r.components, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(r.max_diameter, 1.0);
        let r = chain_components(&s, 6.0).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.max_diameter, s.diameter());
        assert!(chain_components(&s, 0.0).is_err());
        assert!(chain_components(&s, -1.0).is_err());
    }

    #[test]
    fn glue_single_path() {
        let ab = FiniteMetricSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 2.0).unwrap();
        let bc = FiniteMetricSpace::from_fn(vec!["b".into(), "c".into()], |_, _| 2.0).unwrap();
        let g = glue_maximal(&[ab, bc]).unwrap();
        assert_eq!(g.space.labels(), &["a", "b", "c"]);
        assert_eq!(g.space.dist(0, 2), 4.0);
        assert!(g.disagreements.is_empty());
    }

    #[test]
    fn glue_is_idempotent_on_a_metric() {
        let s = line(&[0.0, 1.0, 3.0, 7.0]);
        let g = glue_maximal(std::slice::from_ref(&s)).unwrap();
        assert_eq!(g.space, s);
        assert!(g.disagreements.is_empty());
    }

    #[test]
    fn glue_reports_conflicts_and_disconnection() {
        let long = FiniteMetricSpace::from_fn(vec!["a".into(), "c".into()], |_, _| 10.0).unwrap();
        let ab = FiniteMetricSpace::from_fn(vec!["a".into(), "b".into()], |_, _| 1.0).unwrap();
        let bc = FiniteMetricSpace::from_fn(vec!["b".into(), "c".into()], |_, _| 1.0).unwrap();
        let g = glue_maximal(&[long, ab.clone(), bc]).unwrap();
        assert_eq!(g.space.dist(0, 1), 2.0);
        assert_eq!(g.disagreements.len(), 1);
        assert_eq!(g.disagreements[0].supplied, 10.0);

        let de = FiniteMetricSpace::from_fn(vec!["d".into(), "e".into()], |_, _| 1.0).unwrap();
        match glue_maximal(&[ab, de]) {
            Err(Error::Disconnected { classes }) => {
                assert_eq!(classes, vec![vec!["a", "b"], vec!["d", "e"]])
            }
            other => panic!("expected disconnection, got {other:?}"),
        }
    }

    #[test]
    fn spaces_round_trip_through_json() {
        let s = line(&[0.0, 1.5, 4.0]);
        let json = serde_json::to_string(&s).unwrap();
        let back: FiniteMetricSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"labels":["a"],"dist":[[0,1],[1,0]]}"#;
        assert!(serde_json::from_str::<FiniteMetricSpace>(bad).is_err());
    }
}

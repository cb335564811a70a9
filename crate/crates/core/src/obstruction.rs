//! Lower bounds on the Lipschitz constant of retractions of a finite space
//! onto its Euclidean part, and the composed map built from an extension.
//!
//! For a placement `r` of the free points (anchors fixed at their
//! coordinates) the objective is
//!
//! ```text
//! λ(r) = max over pairs (w, w') of max(0, (‖r(w) − r(w')‖ − ε) / d(w, w'))
//! ```
//!
//! which is convex in `r`. It is minimized by projected subgradient descent
//! with Polyak steps. A lower bound comes from a cutting-plane LP: for any
//! unit vector `g`, `‖u‖ ≥ ⟨g, u⟩`, so every pair term dominates a linear
//! function of the placement, and the minimum of the max of those cuts bounds
//! the true minimum from below.
//!
//! Iterates live in the bounding box of the anchors: clamping coordinates
//! to that box is 1-Lipschitz and fixes every anchor, so it never increases
//! the objective and the box contains a minimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{barycenter_image, min_norm_point};
use crate::hyperspace::{ccp_pushforward, ConvexMeasureSet};
use crate::lp::Lp;
use crate::metric::{
    euclidean_distance, lipschitz_with, same_space, verify_metric, FiniteMetricSpace, LipschitzReport,
    PointMap,
};
use crate::spaces::{AssemblyKind, SpaceAssembly};

/// A finite space split into anchors with fixed images in `Rⁿ` and free
/// points to be placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionInstance {
    space: FiniteMetricSpace,
    dim: usize,
    anchors: Vec<usize>,
    anchor_coords: Vec<Vec<f64>>,
    free: Vec<usize>,
    /// Starting placement of the free points, parallel to `free`.
    seeds: Vec<Vec<f64>>,
    epsilon: f64,
}

impl RetractionInstance {
    /// `anchors` and `free` pair point indices with coordinates; free
    /// coordinates are the starting placement.
    pub fn new(
        space: FiniteMetricSpace,
        anchors: Vec<(usize, Vec<f64>)>,
        free: Vec<(usize, Vec<f64>)>,
        epsilon: f64,
    ) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidArgument("retraction needs an anchor".into()));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} < 0")));
        }
        let dim = anchors[0].1.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("anchor without coordinates".into()));
        }
        let mut seen = vec![false; space.len()];
        for (i, c) in anchors.iter().chain(&free) {
            if *i >= space.len() {
                return Err(Error::InvalidArgument(format!("point {i} out of range")));
            }
            if seen[*i] {
                return Err(Error::InvalidArgument(format!(
                    "point {} listed twice",
                    space.label(*i)
                )));
            }
            seen[*i] = true;
            if c.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "point {} has {} coordinates, expected {dim}",
                    space.label(*i),
                    c.len()
                )));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "point {} is neither anchor nor free",
                space.label(i)
            )));
        }
        let (anchors, anchor_coords) = anchors.into_iter().unzip();
        let (free, seeds) = free.into_iter().unzip();
        Ok(Self {
            space,
            dim,
            anchors,
            anchor_coords,
            free,
            seeds,
            epsilon,
        })
    }

    /// Anchors are the Euclidean part of an `X_N` assembly; inner graph
    /// vertices start at their own integer coordinates.
    pub fn from_assembly(assembly: &SpaceAssembly, epsilon: f64) -> Result<Self> {
        if assembly.kind != AssemblyKind::XN {
            return Err(Error::InvalidArgument(format!(
                "retraction instances come from X_N assemblies, got {:?}",
                assembly.kind
            )));
        }
        let coords = assembly.coords();
        let anchors = assembly.anchors().into_iter().map(|i| (i, coords[i].clone())).collect();
        let free = assembly.free().into_iter().map(|i| (i, coords[i].clone())).collect();
        Self::new(assembly.space.clone(), anchors, free, epsilon)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} < 0")));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Objective at a placement of the free points (parallel to `free`).
    pub fn objective(&self, placement: &[Vec<f64>]) -> Result<f64> {
        if placement.len() != self.free.len() || placement.iter().any(|p| p.len() != self.dim) {
            return Err(Error::InvalidArgument("placement does not match the free points".into()));
        }
        let problem = Problem::new(self);
        let x: Vec<f64> = placement.iter().flatten().copied().collect();
        Ok(problem.evaluate(&x).0.max(problem.anchor_bound))
    }
}

/// Starting placement of the free points.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Initialization {
    /// The coordinates supplied with the instance.
    #[default]
    Own,
    /// Every free point at the centroid of the anchors.
    AnchorCentroid,
    /// Supplied coordinates scaled by a factor.
    Scaled { factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub init: Initialization,
    pub max_iterations: usize,
    /// Gap at or below which the result counts as converged.
    pub gap_tolerance: f64,
    /// Descent stops early once the gap reaches this.
    pub target_gap: f64,
    /// Iterations between certificate rounds.
    pub certificate_every: usize,
    /// Cutting-plane solves per certificate round.
    pub certificate_rounds: usize,
    /// Largest number of cuts kept in the certificate LP.
    pub max_cuts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            init: Initialization::Own,
            max_iterations: 20_000,
            gap_tolerance: 1e-3,
            target_gap: 1e-7,
            certificate_every: 200,
            certificate_rounds: 4,
            max_cuts: 2_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// Iteration budget exhausted; `lambda_min` is still an upper bound.
    Unconverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedPoint {
    pub label: String,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionResult {
    pub epsilon: f64,
    /// Objective at `placement`.
    pub lambda_min: f64,
    pub placement: Vec<PlacedPoint>,
    /// Certified lower bound on the minimum over all placements.
    pub lower_bound: f64,
    pub gap: f64,
    /// The anchor pairs alone force at least this value.
    pub anchor_bound: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Free(usize),
    Anchor(usize),
}

#[derive(Debug, Clone, Copy)]
struct Term {
    a: Slot,
    b: Slot,
    inv_d: f64,
}

/// `z ≥ inv_d · (⟨g, r(a) − r(b)⟩ − ε)`.
#[derive(Debug, Clone)]
struct Cut {
    term: usize,
    dir: Vec<f64>,
}

struct Problem<'a> {
    inst: &'a RetractionInstance,
    terms: Vec<Term>,
    anchor_bound: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(inst: &'a RetractionInstance) -> Self {
        let n = inst.space.len();
        let mut slot = vec![Slot::Anchor(0); n];
        for (a, &i) in inst.anchors.iter().enumerate() {
            slot[i] = Slot::Anchor(a);
        }
        for (f, &i) in inst.free.iter().enumerate() {
            slot[i] = Slot::Free(f);
        }
        let mut terms = Vec::new();
        let mut anchor_bound = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let d = inst.space.dist(i, j);
                match (slot[i], slot[j]) {
                    (Slot::Anchor(a), Slot::Anchor(b)) => {
                        let e = euclidean_distance(&inst.anchor_coords[a], &inst.anchor_coords[b]);
                        anchor_bound = anchor_bound.max(((e - inst.epsilon) / d).max(0.0));
                    }
                    (a, b) => terms.push(Term {
                        a,
                        b,
                        inv_d: 1.0 / d,
                    }),
                }
            }
        }
        let dim = inst.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for c in &inst.anchor_coords {
            for (t, &x) in c.iter().enumerate() {
                lo[t] = lo[t].min(x);
                hi[t] = hi[t].max(x);
            }
        }
        Self {
            inst,
            terms,
            anchor_bound,
            lo,
            hi,
        }
    }

    fn point<'x>(&'x self, x: &'x [f64], s: Slot) -> &'x [f64] {
        let dim = self.inst.dim;
        match s {
            Slot::Free(f) => &x[f * dim..(f + 1) * dim],
            Slot::Anchor(a) => &self.inst.anchor_coords[a],
        }
    }

    fn term_value(&self, x: &[f64], t: &Term) -> f64 {
        let e = euclidean_distance(self.point(x, t.a), self.point(x, t.b));
        ((e - self.inst.epsilon) * t.inv_d).max(0.0)
    }

    /// Largest pair term and the first term attaining it.
    fn evaluate(&self, x: &[f64]) -> (f64, Option<usize>) {
        let mut best = (0.0, None);
        for (idx, t) in self.terms.iter().enumerate() {
            let v = self.term_value(x, t);
            if v > best.0 {
                best = (v, Some(idx));
            }
        }
        best
    }

    fn direction(&self, x: &[f64], t: &Term) -> Vec<f64> {
        let (p, q) = (self.point(x, t.a), self.point(x, t.b));
        let u: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            u.iter().map(|v| v / norm).collect()
        } else {
            let mut e = vec![0.0; u.len()];
            e[0] = 1.0;
            e
        }
    }

    fn project(&self, x: &mut [f64]) {
        let dim = self.inst.dim;
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i % dim], self.hi[i % dim]);
        }
    }

    fn initial(&self, init: Initialization) -> Vec<f64> {
        let k = self.inst.anchor_coords.len() as f64;
        let centroid: Vec<f64> = (0..self.inst.dim)
            .map(|t| self.inst.anchor_coords.iter().map(|c| c[t]).sum::<f64>() / k)
            .collect();
        let mut x: Vec<f64> = match init {
            Initialization::Own => self.inst.seeds.iter().flatten().copied().collect(),
            Initialization::AnchorCentroid => {
                self.inst.seeds.iter().flat_map(|_| centroid.iter().copied()).collect()
            }
            Initialization::Scaled { factor } => {
                self.inst.seeds.iter().flatten().map(|v| v * factor).collect()
            }
        };
        self.project(&mut x);
        x
    }

    /// Cuts for the terms within `window` of the current maximum.
    fn cuts_at(&self, x: &[f64], f: f64, window: f64, limit: usize) -> Vec<Cut> {
        let mut near: Vec<(usize, f64)> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (i, self.term_value(x, t)))
            .filter(|&(_, v)| v > 0.0 && v >= f - window)
            .collect();
        near.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        near.truncate(limit);
        near.into_iter()
            .map(|(i, _)| Cut {
                term: i,
                dir: self.direction(x, &self.terms[i]),
            })
            .collect()
    }

    /// Minimum of the cut model over the box, with its minimizer.
    fn cut_model_minimum(&self, cuts: &[Cut]) -> Result<(f64, Vec<f64>)> {
        let dim = self.inst.dim;
        let mut lp = Lp::minimize();
        let z = lp.var(1.0, (self.anchor_bound, f64::INFINITY));
        let vars: Vec<_> = (0..self.inst.free.len() * dim)
            .map(|i| lp.var(0.0, (self.lo[i % dim], self.hi[i % dim])))
            .collect();
        for cut in cuts {
            let t = &self.terms[cut.term];
            // z - inv_d <g, r(a) - r(b)> >= -inv_d eps, anchors moved to the right side
            let mut row = vec![(z, 1.0)];
            let mut rhs = -t.inv_d * self.inst.epsilon;
            for (slot, sign) in [(t.a, 1.0), (t.b, -1.0)] {
                match slot {
                    Slot::Free(f) => {
                        for (c, g) in cut.dir.iter().enumerate() {
                            row.push((vars[f * dim + c], -sign * t.inv_d * g));
                        }
                    }
                    Slot::Anchor(a) => {
                        let p = &self.inst.anchor_coords[a];
                        rhs += sign * t.inv_d * cut.dir.iter().zip(p).map(|(g, v)| g * v).sum::<f64>();
                    }
                }
            }
            lp.ge(&row, rhs);
        }
        let mut all = vec![z];
        all.extend(&vars);
        let sol = lp.solve(&all)?;
        Ok((sol.values[0].max(self.anchor_bound), sol.values[1..].to_vec()))
    }
}

/// Minimizes the retraction objective and certifies a lower bound.
pub fn retraction_lower_bound(inst: &RetractionInstance, opts: &SolverOptions) -> Result<ObstructionResult> {
    let report = verify_metric(&inst.space)?;
    if !report.pass {
        return Err(Error::Validation(format!(
            "instance is not a metric: {} axiom violations",
            report.violation_count
        )));
    }
    let problem = Problem::new(inst);
    let finish = |x: &[f64], f: f64, lb: f64, iterations: usize| {
        let lb = lb.min(f);
        let gap = f - lb;
        ObstructionResult {
            epsilon: inst.epsilon,
            lambda_min: f,
            placement: inst
                .free
                .iter()
                .enumerate()
                .map(|(k, &i)| PlacedPoint {
                    label: inst.space.label(i).to_string(),
                    coords: x[k * inst.dim..(k + 1) * inst.dim].to_vec(),
                })
                .collect(),
            lower_bound: lb,
            gap,
            anchor_bound: problem.anchor_bound,
            iterations,
            status: if gap <= opts.gap_tolerance {
                SolveStatus::Converged
            } else {
                SolveStatus::Unconverged
            },
        }
    };

    let mut x = problem.initial(opts.init);
    let value = |x: &[f64]| {
        let (v, arg) = problem.evaluate(x);
        if v > problem.anchor_bound {
            (v, arg)
        } else {
            (problem.anchor_bound, None)
        }
    };
    let (mut f_best, _) = value(&x);
    let mut best = x.clone();
    let mut lb = problem.anchor_bound;
    if problem.terms.is_empty() {
        return Ok(finish(&best, f_best, f_best, 0));
    }

    let mut cuts: Vec<Cut> = Vec::new();
    let cut_limit = 2 * inst.free.len() * inst.dim + 16;
    let mut delta = (0.5 * (f_best - lb)).max(1e-9);
    let patience = 50;
    let mut since_improve = 0;
    let mut iterations = 0;

    // Cutting-plane round: raises the lower bound and may supply a better
    // placement.
    let certify = |best: &mut Vec<f64>, f_best: &mut f64, lb: &mut f64, cuts: &mut Vec<Cut>| -> Result<()> {
        let window = (0.05 * *f_best).max(*f_best - *lb);
        cuts.extend(problem.cuts_at(best, *f_best, window, cut_limit));
        if cuts.len() > opts.max_cuts {
            let drop = cuts.len() - opts.max_cuts;
            cuts.drain(..drop);
        }
        let (model, y) = problem.cut_model_minimum(cuts)?;
        *lb = lb.max(model).min(*f_best);
        let (fy, _) = value(&y);
        cuts.extend(problem.cuts_at(&y, fy, 0.05 * fy, cut_limit));
        if fy < *f_best {
            *f_best = fy;
            *best = y;
        }
        Ok(())
    };

    while iterations < opts.max_iterations {
        iterations += 1;
        let (f, arg) = value(&x);
        if f < f_best {
            if f < f_best - 0.1 * delta {
                since_improve = 0;
            }
            f_best = f;
            best.clone_from(&x);
        } else {
            since_improve += 1;
        }
        let Some(t) = arg else {
            // the anchor bound is attained, nothing can do better
            lb = f_best;
            break;
        };
        if f_best - lb <= opts.target_gap {
            break;
        }

        let term = &problem.terms[t];
        let g = problem.direction(&x, term);
        cuts.push(Cut { term: t, dir: g.clone() });

        if iterations % opts.certificate_every == 0 {
            for _ in 0..opts.certificate_rounds {
                certify(&mut best, &mut f_best, &mut lb, &mut cuts)?;
                if f_best - lb <= opts.target_gap {
                    break;
                }
            }
            if f_best - lb <= opts.target_gap {
                break;
            }
            delta = (0.5 * (f_best - lb)).max(1e-12);
            x.clone_from(&best);
            since_improve = 0;
            continue;
        }

        let dim = inst.dim;
        // the subgradient is ±inv_d·g on the free endpoints
        let free_ends = [term.a, term.b].iter().filter(|s| matches!(s, Slot::Free(_))).count();
        let grad_sq = free_ends as f64 * term.inv_d * term.inv_d;
        let target = (f_best - delta).max(lb);
        let step = (f - target) / grad_sq;
        for (slot, sign) in [(term.a, 1.0), (term.b, -1.0)] {
            if let Slot::Free(k) = slot {
                for c in 0..dim {
                    x[k * dim + c] -= step * sign * term.inv_d * g[c];
                }
            }
        }
        problem.project(&mut x);

        if since_improve >= patience {
            delta = (0.5 * delta).max(1e-12);
            since_improve = 0;
            x.clone_from(&best);
        }
    }

    for _ in 0..opts.certificate_rounds.max(1) {
        if f_best - lb <= opts.target_gap {
            break;
        }
        certify(&mut best, &mut f_best, &mut lb, &mut cuts)?;
    }
    Ok(finish(&best, f_best, lb, iterations))
}

/// Output of [`composed_retraction`]: the image in `Rⁿ` of every point and
/// the measured `λ*(ε)` of that table against the assembly metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedRetraction {
    pub table: Vec<Vec<f64>>,
    pub lipschitz: LipschitzReport,
}

/// First `n` coordinates, zero-padded.
fn project_to(n: usize, c: &[f64]) -> Vec<f64> {
    (0..n).map(|i| c.get(i).copied().unwrap_or(0.0)).collect()
}

/// Evaluates `x ↦ π(b(ccP(p_n)(F(x))))`, where `F(x) = extension[x]` is a
/// hull of measures on the assembly space and `p_n` keeps the first `n`
/// coordinates of each point.
pub fn composed_retraction(
    extension: &[ConvexMeasureSet<'_>],
    n: usize,
    assembly: &SpaceAssembly,
    epsilon: f64,
) -> Result<ComposedRetraction> {
    if n == 0 {
        return Err(Error::InvalidArgument("target dimension must be >= 1".into()));
    }
    if extension.len() != assembly.space.len() {
        return Err(Error::InvalidArgument(format!(
            "extension defined on {} points, assembly has {}",
            extension.len(),
            assembly.space.len()
        )));
    }
    if let Some(i) = assembly.points.iter().position(|p| p.coords.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "point {} has no coordinates",
            assembly.space.label(i)
        )));
    }

    // image of p_n as a Euclidean space on its distinct points
    let mut image_coords: Vec<Vec<f64>> = Vec::new();
    let mut assignment = Vec::with_capacity(assembly.points.len());
    for p in &assembly.points {
        let q = project_to(n, &p.coords);
        let idx = match image_coords.iter().position(|c| c == &q) {
            Some(i) => i,
            None => {
                image_coords.push(q);
                image_coords.len() - 1
            }
        };
        assignment.push(idx);
    }
    let labels = (0..image_coords.len()).map(|i| format!("p{i}")).collect();
    let image = FiniteMetricSpace::euclidean(labels, &image_coords)?;
    let p_n = PointMap::new(&assembly.space, &image, assignment)?;

    let table = extension
        .iter()
        .map(|a| {
            if !same_space(a.space(), &assembly.space) {
                return Err(Error::InvalidArgument(
                    "extension values must be hulls of measures on the assembly space".into(),
                ));
            }
            let pushed = ccp_pushforward(&p_n, a)?;
            Ok(min_norm_point(&barycenter_image(&pushed, &image_coords)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let lipschitz = lipschitz_with(
        &assembly.space,
        |i, j| euclidean_distance(&table[i], &table[j]),
        epsilon,
    )?;
    Ok(ComposedRetraction { table, lipschitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{AssemblyParams, PointInfo, Provenance};

    fn toy() -> RetractionInstance {
        let labels = vec!["s1".into(), "s2".into(), "v".into()];
        let d = vec![
            vec![0.0, 2.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let space = FiniteMetricSpace::new(labels, d).unwrap();
        RetractionInstance::new(
            space,
            vec![(0, vec![0.0, 0.0]), (1, vec![4.0, 0.0])],
            vec![(2, vec![1.0, 1.0])],
            0.0,
        )
        .unwrap()
    }

    /// Grid search over `r(v)` in `[0,4] × [-2,2]` at step `h`.
    fn toy_grid_oracle(h: f64) -> (f64, Vec<f64>) {
        let inst = toy();
        let steps = (4.0 / h).round() as i64;
        let mut best = (f64::INFINITY, vec![]);
        for a in 0..=steps {
            for b in -steps / 2..=steps / 2 {
                let p = vec![a as f64 * h, b as f64 * h];
                let f = inst.objective(std::slice::from_ref(&p)).unwrap();
                if f < best.0 {
                    best = (f, p);
                }
            }
        }
        best
    }

    #[test]
    fn toy_instance_matches_grid() {
        let r = retraction_lower_bound(&toy(), &SolverOptions::default()).unwrap();
        let (g, p) = toy_grid_oracle(1e-2);
        assert!((r.lambda_min - 2.0).abs() < 1e-3, "{r:?}");
        assert!((r.lambda_min - g).abs() < 1e-3);
        assert!(euclidean_distance(&p, &[2.0, 0.0]) < 1e-9);
        let c = &r.placement[0].coords;
        assert!(euclidean_distance(c, &[2.0, 0.0]) < 1e-3, "{c:?}");
        assert_eq!(r.status, SolveStatus::Converged);
    }

    #[test]
    fn anchors_only_give_identity() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 4.0]];
        let space = FiniteMetricSpace::euclidean(vec!["a".into(), "b".into(), "c".into()], &pts).unwrap();
        let inst = RetractionInstance::new(space, pts.into_iter().enumerate().collect(), vec![], 0.0).unwrap();
        let r = retraction_lower_bound(&inst, &SolverOptions::default()).unwrap();
        assert!((r.lambda_min - 1.0).abs() < 1e-12);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn instance_validation() {
        let space = toy().space.clone();
        assert!(RetractionInstance::new(space.clone(), vec![], vec![], 0.0).is_err());
        assert!(RetractionInstance::new(space.clone(), vec![(0, vec![0.0])], vec![], 0.0).is_err());
        assert!(RetractionInstance::new(
            space,
            vec![(0, vec![0.0]), (1, vec![1.0])],
            vec![(2, vec![0.0])],
            -1.0
        )
        .is_err());
    }

    #[test]
    fn non_metric_is_rejected() {
        let d = vec![
            vec![0.0, 5.0, 1.0],
            vec![5.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let space = FiniteMetricSpace::new(vec!["a".into(), "b".into(), "c".into()], d).unwrap();
        let inst = RetractionInstance::new(
            space,
            vec![(0, vec![0.0]), (1, vec![5.0])],
            vec![(2, vec![0.0])],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            retraction_lower_bound(&inst, &SolverOptions::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn epsilon_lowers_the_minimum() {
        let mut prev = f64::INFINITY;
        for eps in [0.0, 1.0, 5.0] {
            let r = retraction_lower_bound(&toy().with_epsilon(eps).unwrap(), &SolverOptions::default()).unwrap();
            assert!(r.lambda_min <= prev + 1e-9);
            prev = r.lambda_min;
        }
        assert_eq!(prev, 0.0);
    }

    fn euclidean_assembly(pts: &[Vec<f64>]) -> SpaceAssembly {
        let labels = (0..pts.len()).map(|i| format!("e{i}")).collect();
        SpaceAssembly {
            kind: AssemblyKind::XN,
            params: AssemblyParams::new(vec![2], vec![1]),
            space: FiniteMetricSpace::euclidean(labels, pts).unwrap(),
            points: pts
                .iter()
                .map(|c| PointInfo {
                    tag: Provenance::EuclideanSample,
                    level: None,
                    coords: c.clone(),
                })
                .collect(),
            disagreements: vec![],
        }
    }

    #[test]
    fn dirac_extension_is_an_isometry_on_anchors() {
        let asm = euclidean_assembly(&[vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 1.0]]);
        let ext: Vec<_> = (0..3).map(|i| ConvexMeasureSet::dirac(&asm.space, i).unwrap()).collect();
        let out = composed_retraction(&ext, 2, &asm, 0.0).unwrap();
        assert_eq!(out.table, asm.coords());
        assert!((out.lipschitz.lambda_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_extension_is_constant() {
        let asm = euclidean_assembly(&[vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 1.0]]);
        let hull = ConvexMeasureSet::new(vec![
            crate::transport::DiscreteMeasure::dirac(&asm.space, 1).unwrap(),
            crate::transport::DiscreteMeasure::dirac(&asm.space, 2).unwrap(),
        ])
        .unwrap();
        let ext = vec![hull.clone(), hull.clone(), hull];
        let out = composed_retraction(&ext, 2, &asm, 0.0).unwrap();
        assert!(out.table.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(out.lipschitz.lambda_star, 0.0);
        assert!(composed_retraction(&ext[..2], 2, &asm, 0.0).is_err());
    }
}

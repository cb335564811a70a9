//! The hypercube-corner graphs `G(n,k)`, the ambient metric on leveled
//! Euclidean slices, and finite truncations of the spaces glued from them.
//!
//! `G(n,k)` has inner vertices `I` (every coordinate `±k`) and outer
//! vertices `T` (every coordinate `±2k`). `{x, y}` is an edge when the
//! Euclidean distance is exactly `2k` or one endpoint is twice the other;
//! edges are weighted by their L∞ length.
//!
//! Two indexing schemes are supported. [`Scheme::General`] uses `G(n,k)` at
//! level `n`. [`Scheme::Squared`] uses `G(n², k²)` at level `n²` for `k ≥ n`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{euclidean_distance, glue_maximal, Disagreement, FiniteMetricSpace};

pub const DEFAULT_VERTEX_BUDGET: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnkEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// The graph `G(n,k)`. Vertices `0..2ⁿ` are inner corners, `2ⁿ..2ⁿ⁺¹`
/// outer corners; in both halves corner `m` has coordinate `i` negative iff
/// bit `i` of `m` is set, so outer vertex `2ⁿ + m` is twice inner vertex `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnkGraph {
    pub n: usize,
    pub k: usize,
    pub inner: Vec<Vec<i64>>,
    pub outer: Vec<Vec<i64>>,
    pub edges: Vec<GnkEdge>,
}

impl GnkGraph {
    pub fn vertex_count(&self) -> usize {
        self.inner.len() + self.outer.len()
    }

    pub fn vertex(&self, v: usize) -> &[i64] {
        let h = self.inner.len();
        if v < h {
            &self.inner[v]
        } else {
            &self.outer[v - h]
        }
    }

    pub fn is_inner(&self, v: usize) -> bool {
        v < self.inner.len()
    }

    pub fn label(&self, v: usize) -> String {
        let tag = if self.is_inner(v) { "I" } else { "T" };
        format!("{tag}{}", fmt_int_coords(self.vertex(v)))
    }

    pub fn coords_f64(&self, v: usize) -> Vec<f64> {
        self.vertex(v).iter().map(|&c| c as f64).collect()
    }
}

fn corners(n: usize, c: i64) -> Vec<Vec<i64>> {
    (0..1usize << n)
        .map(|m| (0..n).map(|i| if (m >> i) & 1 == 1 { -c } else { c }).collect())
        .collect()
}

pub fn build_gnk(n: usize, k: usize) -> Result<GnkGraph> {
    build_gnk_with_budget(n, k, DEFAULT_VERTEX_BUDGET)
}

pub fn build_gnk_with_budget(n: usize, k: usize, vertex_budget: usize) -> Result<GnkGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("G(n,k) needs n >= 2, got {n}")));
    }
    if k < 1 {
        return Err(Error::InvalidArgument("G(n,k) needs k >= 1".into()));
    }
    if n + 1 >= usize::BITS as usize || (1usize << (n + 1)) > vertex_budget {
        return Err(Error::Budget {
            what: format!("G({n},{k}) vertices"),
            requested: if n + 1 >= usize::BITS as usize {
                usize::MAX
            } else {
                1 << (n + 1)
            },
            limit: vertex_budget,
        });
    }
    let kk = k as i64;
    let inner = corners(n, kk);
    let outer = corners(n, 2 * kk);
    let all: Vec<&Vec<i64>> = inner.iter().chain(outer.iter()).collect();
    let two_k_sq = 4 * kk * kk;

    let edges: Vec<GnkEdge> = (0..all.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let all = &all;
            (a + 1..all.len()).filter_map(move |b| {
                let (x, y) = (all[a], all[b]);
                let sq: i64 = x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum();
                let doubled = x.iter().zip(y).all(|(p, q)| *q == 2 * p)
                    || x.iter().zip(y).all(|(p, q)| *p == 2 * q);
                (sq == two_k_sq || doubled).then(|| GnkEdge {
                    a,
                    b,
                    weight: x.iter().zip(y).map(|(p, q)| (p - q).abs()).max().unwrap_or(0) as f64,
                })
            })
        })
        .collect();

    Ok(GnkGraph {
        n,
        k,
        inner,
        outer,
        edges,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn sparse_dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    dist
}

/// Shortest-path metric of the weighted graph, labeled `I(..)` / `T(..)`.
pub fn gnk_metric(g: &GnkGraph) -> Result<FiniteMetricSpace> {
    let nv = g.vertex_count();
    let mut adj = vec![Vec::new(); nv];
    for e in &g.edges {
        adj[e.a].push((e.b, e.weight));
        adj[e.b].push((e.a, e.weight));
    }
    let dist: Vec<Vec<f64>> = (0..nv)
        .into_par_iter()
        .map(|s| sparse_dijkstra(&adj, s))
        .collect();
    let labels: Vec<String> = (0..nv).map(|v| g.label(v)).collect();
    if let Some(row0) = dist.first() {
        if row0.iter().any(|d| d.is_infinite()) {
            let (reached, unreached): (Vec<usize>, Vec<usize>) =
                (0..nv).partition(|&v| row0[v].is_finite());
            return Err(Error::Disconnected {
                classes: vec![
                    reached.iter().map(|&v| labels[v].clone()).collect(),
                    unreached.iter().map(|&v| labels[v].clone()).collect(),
                ],
            });
        }
    }
    FiniteMetricSpace::new(labels, dist)
}

/// A point of the leveled ambient space: a level and a Euclidean vector,
/// shorter vectors zero-padded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XPoint {
    pub level: f64,
    pub coords: Vec<f64>,
}

/// `sqrt(|m - n|² + ‖u - v‖²)`.
pub fn xprime_distance(p: &XPoint, q: &XPoint) -> f64 {
    let dl = p.level - q.level;
    let e = euclidean_distance(&p.coords, &q.coords);
    (dl * dl + e * e).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyKind {
    XprimeSlice,
    XTrunc,
    YTrunc,
    XN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    General,
    Squared,
}

/// Euclidean sample used for `X_N` anchors and ambient slices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSpec {
    /// Outer corners of the included graphs and the origin.
    Minimal,
    /// `Minimal` plus midpoints of the edges of each outer cube.
    #[default]
    Default,
    /// `Default` plus the lattice `spacing · {-half_width..=half_width}ᴺ`.
    Lattice { spacing: f64, half_width: usize },
    /// Exactly these points.
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyParams {
    pub n_range: Vec<usize>,
    pub k_range: Vec<usize>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub sample: SampleSpec,
    #[serde(default = "default_budget")]
    pub vertex_budget: usize,
}

fn default_budget() -> usize {
    DEFAULT_VERTEX_BUDGET
}

impl AssemblyParams {
    pub fn new(n_range: Vec<usize>, k_range: Vec<usize>) -> Self {
        Self {
            n_range,
            k_range,
            scheme: Scheme::General,
            sample: SampleSpec::Default,
            vertex_budget: DEFAULT_VERTEX_BUDGET,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_sample(mut self, sample: SampleSpec) -> Self {
        self.sample = sample;
        self
    }

    fn level(&self, n: usize) -> u64 {
        match self.scheme {
            Scheme::General => n as u64,
            Scheme::Squared => (n * n) as u64,
        }
    }

    /// `(dimension, k, level)` of every included graph.
    pub fn graphs(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for &n in &self.n_range {
            for &k in &self.k_range {
                match self.scheme {
                    Scheme::General => out.push((n, k, n as u64)),
                    Scheme::Squared if k >= n => out.push((n * n, k * k, (n * n) as u64)),
                    Scheme::Squared => {}
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    XprimeSample { level: u64 },
    /// Outer corner of `G(n,k)`; in `X_N` this is also a Euclidean anchor.
    Outer { n: usize, k: usize, level: Option<u64> },
    Inner { n: usize, k: usize, level: Option<u64> },
    /// Euclidean sample point of `X_N` that is not a graph vertex.
    EuclideanSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointInfo {
    pub tag: Provenance,
    /// `None` for points of the Euclidean part of `X_N`.
    pub level: Option<u64>,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceAssembly {
    pub kind: AssemblyKind,
    pub params: AssemblyParams,
    pub space: FiniteMetricSpace,
    /// Parallel to the points of `space`.
    pub points: Vec<PointInfo>,
    /// Pairs where gluing shortened a supplied distance.
    pub disagreements: Vec<Disagreement>,
}

impl SpaceAssembly {
    /// Points whose image a retraction must fix: the Euclidean part of `X_N`.
    pub fn anchors(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| {
                matches!(
                    self.points[i].tag,
                    Provenance::EuclideanSample | Provenance::Outer { .. }
                )
            })
            .collect()
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| matches!(self.points[i].tag, Provenance::Inner { .. }))
            .collect()
    }

    pub fn coords(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.coords.clone()).collect()
    }
}

pub(crate) fn fmt_coords(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|x| format!("{}", x + 0.0)).collect();
    format!("({})", parts.join(","))
}

fn fmt_int_coords(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn coord_key(c: &[f64]) -> Vec<u64> {
    c.iter().map(|x| (x + 0.0).to_bits()).collect()
}

/// Sample of `R^dim` for the given graphs, deduplicated, first occurrence wins.
fn sample_points(dim: usize, spec: &SampleSpec, graphs: &[GnkGraph], budget: usize) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    if let SampleSpec::Explicit(given) = spec {
        pts.extend(given.iter().cloned());
    } else {
        for g in graphs {
            for v in &g.outer {
                pts.push(v.iter().map(|&c| c as f64).collect());
            }
        }
        pts.push(vec![0.0; dim]);
        if !matches!(spec, SampleSpec::Minimal) {
            for g in graphs {
                for (a, u) in g.outer.iter().enumerate() {
                    for w in &g.outer[a + 1..] {
                        let differing = u.iter().zip(w).filter(|(p, q)| p != q).count();
                        if differing == 1 {
                            pts.push(
                                u.iter()
                                    .zip(w)
                                    .map(|(&p, &q)| if p == q { p as f64 } else { 0.0 })
                                    .collect(),
                            );
                        }
                    }
                }
            }
        }
        if let SampleSpec::Lattice {
            spacing,
            half_width,
        } = spec
        {
            if spacing.is_nan() || *spacing <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "lattice spacing {spacing} must be > 0"
                )));
            }
            let side = 2 * half_width + 1;
            let count = side.checked_pow(dim as u32).unwrap_or(usize::MAX);
            if count > budget {
                return Err(Error::Budget {
                    what: format!("lattice sample in R^{dim}"),
                    requested: count,
                    limit: budget,
                });
            }
            for idx in 0..count {
                let mut rem = idx;
                let p: Vec<f64> = (0..dim)
                    .map(|_| {
                        let d = rem % side;
                        rem /= side;
                        (d as f64 - *half_width as f64) * spacing
                    })
                    .collect();
                pts.push(p);
            }
        }
    }
    if let Some(bad) = pts.iter().find(|p| p.len() != dim) {
        return Err(Error::InvalidArgument(format!(
            "sample point {} is not in R^{dim}",
            fmt_coords(bad)
        )));
    }
    let mut seen = HashSet::new();
    pts.retain(|p| seen.insert(coord_key(p)));
    Ok(pts)
}

pub fn build_assembly(kind: AssemblyKind, params: &AssemblyParams) -> Result<SpaceAssembly> {
    let specs = params.graphs();
    let graphs: Vec<GnkGraph> = specs
        .iter()
        .map(|&(n, k, _)| build_gnk_with_budget(n, k, params.vertex_budget))
        .collect::<Result<_>>()?;

    match kind {
        AssemblyKind::XprimeSlice => build_xprime_slice(params, &specs, &graphs),
        AssemblyKind::XTrunc => {
            let (space, points) = x_trunc(&specs, &graphs)?;
            Ok(SpaceAssembly {
                kind,
                params: params.clone(),
                space,
                points,
                disagreements: Vec::new(),
            })
        }
        AssemblyKind::YTrunc => build_y_trunc(params, &specs, &graphs),
        AssemblyKind::XN => build_x_n(params, &specs, &graphs),
    }
}

fn build_xprime_slice(
    params: &AssemblyParams,
    specs: &[(usize, usize, u64)],
    graphs: &[GnkGraph],
) -> Result<SpaceAssembly> {
    let mut xps = Vec::new();
    let mut points = Vec::new();
    for &n in &params.n_range {
        let level = params.level(n);
        let own: Vec<GnkGraph> = specs
            .iter()
            .zip(graphs)
            .filter(|((d, _, _), _)| *d == n)
            .map(|(_, g)| g.clone())
            .collect();
        for p in sample_points(n, &params.sample, &own, params.vertex_budget)? {
            xps.push(XPoint {
                level: level as f64,
                coords: p.clone(),
            });
            points.push(PointInfo {
                tag: Provenance::XprimeSample { level },
                level: Some(level),
                coords: p,
            });
        }
    }
    let labels = xps
        .iter()
        .map(|p| format!("L{}:{}", p.level, fmt_coords(&p.coords)))
        .collect();
    let space = FiniteMetricSpace::from_fn(labels, |i, j| xprime_distance(&xps[i], &xps[j]))?;
    Ok(SpaceAssembly {
        kind: AssemblyKind::XprimeSlice,
        params: params.clone(),
        space,
        points,
        disagreements: Vec::new(),
    })
}

fn outer_label(level: u64, k: usize, coords: &[i64]) -> String {
    format!("L{level}:k{k}:T{}", fmt_int_coords(coords))
}

fn inner_label(level: u64, k: usize, coords: &[i64]) -> String {
    format!("L{level}:k{k}:I{}", fmt_int_coords(coords))
}

fn x_trunc(
    specs: &[(usize, usize, u64)],
    graphs: &[GnkGraph],
) -> Result<(FiniteMetricSpace, Vec<PointInfo>)> {
    let mut labels = Vec::new();
    let mut xps = Vec::new();
    let mut points = Vec::new();
    for (&(n, k, level), g) in specs.iter().zip(graphs) {
        for v in &g.outer {
            let coords: Vec<f64> = v.iter().map(|&c| c as f64).collect();
            labels.push(outer_label(level, k, v));
            xps.push(XPoint {
                level: level as f64,
                coords: coords.clone(),
            });
            points.push(PointInfo {
                tag: Provenance::Outer {
                    n,
                    k,
                    level: Some(level),
                },
                level: Some(level),
                coords,
            });
        }
    }
    let space = FiniteMetricSpace::from_fn(labels, |i, j| xprime_distance(&xps[i], &xps[j]))?;
    Ok((space, points))
}

fn build_y_trunc(
    params: &AssemblyParams,
    specs: &[(usize, usize, u64)],
    graphs: &[GnkGraph],
) -> Result<SpaceAssembly> {
    let (xs, xpoints) = x_trunc(specs, graphs)?;
    let mut info: HashMap<String, PointInfo> = xs
        .labels()
        .iter()
        .cloned()
        .zip(xpoints)
        .collect();
    let mut parts = vec![xs];
    for (&(n, k, level), g) in specs.iter().zip(graphs) {
        let metric = gnk_metric(g)?;
        let labels: Vec<String> = (0..g.vertex_count())
            .map(|v| {
                if g.is_inner(v) {
                    let l = inner_label(level, k, g.vertex(v));
                    info.insert(
                        l.clone(),
                        PointInfo {
                            tag: Provenance::Inner {
                                n,
                                k,
                                level: Some(level),
                            },
                            level: Some(level),
                            coords: g.coords_f64(v),
                        },
                    );
                    l
                } else {
                    outer_label(level, k, g.vertex(v))
                }
            })
            .collect();
        parts.push(metric.relabel(labels)?);
    }
    let glued = glue_maximal(&parts)?;
    let points = glued
        .space
        .labels()
        .iter()
        .map(|l| info[l].clone())
        .collect();
    Ok(SpaceAssembly {
        kind: AssemblyKind::YTrunc,
        params: params.clone(),
        space: glued.space,
        points,
        disagreements: glued.disagreements,
    })
}

fn build_x_n(
    params: &AssemblyParams,
    specs: &[(usize, usize, u64)],
    graphs: &[GnkGraph],
) -> Result<SpaceAssembly> {
    let dims: HashSet<usize> = params.n_range.iter().copied().collect();
    if dims.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "X_N needs exactly one n, got {:?}",
            params.n_range
        )));
    }
    let dim = match params.scheme {
        Scheme::General => params.n_range[0],
        Scheme::Squared => params.n_range[0] * params.n_range[0],
    };
    let sample = sample_points(dim, &params.sample, graphs, params.vertex_budget)?;
    let present: HashSet<Vec<u64>> = sample.iter().map(|p| coord_key(p)).collect();
    let mut missing = Vec::new();
    let origin = vec![0.0; dim];
    if !present.contains(&coord_key(&origin)) {
        missing.push(fmt_coords(&origin));
    }
    for g in graphs {
        for v in &g.outer {
            let c: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            if !present.contains(&coord_key(&c)) {
                missing.push(fmt_coords(&c));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Precondition { missing });
    }

    let corner_of: HashMap<Vec<u64>, (usize, usize)> = specs
        .iter()
        .zip(graphs)
        .flat_map(|(&(n, k, _), g)| {
            g.outer
                .iter()
                .map(move |v| (coord_key(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()), (n, k)))
        })
        .collect();

    let mut info: HashMap<String, PointInfo> = HashMap::new();
    let e_labels: Vec<String> = sample
        .iter()
        .map(|p| {
            let l = format!("E{}", fmt_coords(p));
            let tag = match corner_of.get(&coord_key(p)) {
                Some(&(n, k)) => Provenance::Outer { n, k, level: None },
                None => Provenance::EuclideanSample,
            };
            info.insert(
                l.clone(),
                PointInfo {
                    tag,
                    level: None,
                    coords: p.clone(),
                },
            );
            l
        })
        .collect();
    let mut parts = vec![FiniteMetricSpace::euclidean(e_labels, &sample)?];
    for (&(n, k, _), g) in specs.iter().zip(graphs) {
        let metric = gnk_metric(g)?;
        let labels: Vec<String> = (0..g.vertex_count())
            .map(|v| {
                let c = g.coords_f64(v);
                if g.is_inner(v) {
                    let l = format!("k{k}:I{}", fmt_int_coords(g.vertex(v)));
                    info.insert(
                        l.clone(),
                        PointInfo {
                            tag: Provenance::Inner { n, k, level: None },
                            level: None,
                            coords: c,
                        },
                    );
                    l
                } else {
                    format!("E{}", fmt_coords(&c))
                }
            })
            .collect();
        parts.push(metric.relabel(labels)?);
    }
    let glued = glue_maximal(&parts)?;
    let points = glued
        .space
        .labels()
        .iter()
        .map(|l| info[l].clone())
        .collect();
    Ok(SpaceAssembly {
        kind: AssemblyKind::XN,
        params: params.clone(),
        space: glued.space,
        points,
        disagreements: glued.disagreements,
    })
}

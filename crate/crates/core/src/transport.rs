//! Discrete probability measures and the Kantorovich metric.
//!
//! The primal problem is solved by a transportation simplex on the supports
//! (north-west corner start, Dantzig pricing with a Bland fallback after a
//! run of degenerate pivots). The optimal row/column potentials are turned
//! into a short test function on the whole space by a c-transform,
//! `φ(x) = min_j d(x, j) - v_j`, which certifies the primal value from the
//! dual side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{same_space, FiniteMetricSpace, PointMap};

/// Weight sums within this distance of 1 are renormalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiscreteMeasure<'a> {
    space: &'a FiniteMetricSpace,
    weights: Vec<f64>,
}

impl<'a> DiscreteMeasure<'a> {
    pub fn new(space: &'a FiniteMetricSpace, mut weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Validation(format!(
                "{} weights for a {}-point space",
                weights.len(),
                space.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < -WEIGHT_SUM_TOL)
        {
            return Err(Error::Validation(format!("weight {i} = {w} is not a mass")));
        }
        for w in &mut weights {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        if total != 1.0 {
            for w in &mut weights {
                *w /= total;
            }
        }
        Ok(Self { space, weights })
    }

    pub fn dirac(space: &'a FiniteMetricSpace, i: usize) -> Result<Self> {
        if i >= space.len() {
            return Err(Error::InvalidArgument(format!(
                "Dirac at {i} outside a {}-point space",
                space.len()
            )));
        }
        let mut w = vec![0.0; space.len()];
        w[i] = 1.0;
        Ok(Self { space, weights: w })
    }

    /// Convex combination `Σ cᵢ μᵢ` of measures on one space.
    pub fn mixture(parts: &[(f64, &DiscreteMeasure<'a>)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1;
        let mut w = vec![0.0; first.space.len()];
        for (c, m) in parts {
            if !same_space(first.space, m.space) {
                return Err(Error::InvalidArgument("mixture of measures on different spaces".into()));
            }
            for (acc, x) in w.iter_mut().zip(&m.weights) {
                *acc += c * x;
            }
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("mixture coefficients sum to {total}")));
        }
        w.iter_mut().for_each(|x| *x /= total);
        Self::new(first.space, w)
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weights[i] > 0.0)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    /// `coupling[i][j]` is the mass moved from point `i` to point `j`.
    pub coupling: Vec<Vec<f64>>,
    pub cost: f64,
}

/// A short function on the space and its value `Σ φ (μ - ν)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPotential {
    pub phi: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kantorovich {
    pub value: f64,
    pub plan: TransportPlan,
    pub potential: DualPotential,
    pub duality_gap: f64,
}

/// Kantorovich distance with a primal coupling and a dual potential.
pub fn kantorovich(mu: &DiscreteMeasure<'_>, nu: &DiscreteMeasure<'_>) -> Result<Kantorovich> {
    if !same_space(mu.space, nu.space) {
        return Err(Error::InvalidArgument(
            "Kantorovich distance between measures on different spaces".into(),
        ));
    }
    let space = mu.space;
    let rows = mu.support();
    let cols = nu.support();
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weights[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weights[j]).collect();
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| space.dist(i, j)).collect())
        .collect();

    let solved = TransportSimplex::new(&supply, &demand, &cost).solve()?;

    let n = space.len();
    let mut coupling = vec![vec![0.0; n]; n];
    let mut primal = 0.0;
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            let x = solved.flow[r][c];
            if x > 0.0 {
                coupling[i][j] = x;
                primal += x * cost[r][c];
            }
        }
    }

    let phi: Vec<f64> = (0..n)
        .map(|x| {
            cols.iter()
                .zip(&solved.v)
                .map(|(&j, vj)| space.dist(x, j) - vj)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let dual = phi
        .iter()
        .zip(mu.weights.iter().zip(&nu.weights))
        .map(|(p, (a, b))| p * (a - b))
        .sum::<f64>()
        .abs();

    Ok(Kantorovich {
        value: primal,
        duality_gap: (primal - dual).abs(),
        plan: TransportPlan {
            coupling,
            cost: primal,
        },
        potential: DualPotential { phi, value: dual },
    })
}

/// Image measure: the weight of `y` is the mass of its fiber.
pub fn pushforward<'a>(
    f: &PointMap<'a>,
    mu: &DiscreteMeasure<'_>,
) -> Result<DiscreteMeasure<'a>> {
    if !same_space(f.source(), mu.space) {
        return Err(Error::InvalidArgument(
            "pushforward of a measure not on the map's source".into(),
        ));
    }
    let mut w = vec![0.0; f.target().len()];
    for (i, &m) in mu.weights.iter().enumerate() {
        w[f.apply(i)] += m;
    }
    DiscreteMeasure::new(f.target(), w)
}

struct Solved {
    flow: Vec<Vec<f64>>,
    v: Vec<f64>,
}

struct TransportSimplex<'c> {
    supply: &'c [f64],
    demand: &'c [f64],
    cost: &'c [Vec<f64>],
    flow: Vec<Vec<f64>>,
    basic: Vec<Vec<bool>>,
    basis: Vec<(usize, usize)>,
}

impl<'c> TransportSimplex<'c> {
    fn new(supply: &'c [f64], demand: &'c [f64], cost: &'c [Vec<f64>]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut s = Self {
            supply,
            demand,
            cost,
            flow: vec![vec![0.0; n]; m],
            basic: vec![vec![false; n]; m],
            basis: Vec::with_capacity(m + n - 1),
        };
        s.north_west_corner();
        s
    }

    fn north_west_corner(&mut self) {
        let (m, n) = (self.supply.len(), self.demand.len());
        let mut ra = self.supply.to_vec();
        let mut rb = self.demand.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let q = ra[i].min(rb[j]);
            self.flow[i][j] = q;
            self.basic[i][j] = true;
            self.basis.push((i, j));
            ra[i] -= q;
            rb[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 || (j < n - 1 && ra[i] > 0.0) {
                j += 1;
            } else {
                i += 1;
            }
        }
    }

    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.supply.len(), self.demand.len());
        let mut row_adj = vec![Vec::new(); m];
        let mut col_adj = vec![Vec::new(); n];
        for &(i, j) in &self.basis {
            row_adj[i].push(j);
            col_adj[j].push(i);
        }
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        // node ids: rows 0..m, cols m..m+n
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if node < m {
                for &j in &row_adj[node] {
                    if v[j].is_nan() {
                        v[j] = self.cost[node][j] - u[node];
                        stack.push(m + j);
                    }
                }
            } else {
                let j = node - m;
                for &i in &col_adj[j] {
                    if u[i].is_nan() {
                        u[i] = self.cost[i][j] - v[j];
                        stack.push(i);
                    }
                }
            }
        }
        (u, v)
    }

    /// Basic cells on the tree path from row `from` to column `to`.
    fn tree_path(&self, from: usize, to: usize) -> Vec<(usize, usize)> {
        let (m, n) = (self.supply.len(), self.demand.len());
        let mut adj = vec![Vec::new(); m + n];
        for &(i, j) in &self.basis {
            adj[i].push(m + j);
            adj[m + j].push(i);
        }
        let mut prev = vec![usize::MAX; m + n];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(x) = queue.pop_front() {
            if x == m + to {
                break;
            }
            for &y in &adj[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = m + to;
        while x != from {
            let p = prev[x];
            path.push(if p < m { (p, x - m) } else { (x, p - m) });
            x = p;
        }
        path.reverse();
        path
    }

    fn solve(mut self) -> Result<Solved> {
        let (m, n) = (self.supply.len(), self.demand.len());
        let cmax = self
            .cost
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(0.0, f64::max);
        let tol = 1e-12 * (1.0 + cmax);
        let max_iter = 10_000 + 50 * m * n;
        let mut degenerate_run = 0usize;

        for _ in 0..max_iter {
            let (u, v) = self.potentials();
            let bland = degenerate_run > m + n;
            let mut entering = None;
            let mut best = -tol;
            'scan: for i in 0..m {
                for j in 0..n {
                    if self.basic[i][j] {
                        continue;
                    }
                    let r = self.cost[i][j] - u[i] - v[j];
                    if r < best {
                        entering = Some((i, j));
                        if bland {
                            break 'scan;
                        }
                        best = r;
                    }
                }
            }
            let Some((ei, ej)) = entering else {
                return Ok(Solved { flow: self.flow, v });
            };

            let path = self.tree_path(ei, ej);
            // path cells alternate -, +, -, ... starting next to the entering row
            let mut theta = f64::INFINITY;
            let mut leaving = (usize::MAX, usize::MAX);
            for &(i, j) in path.iter().step_by(2) {
                let x = self.flow[i][j];
                if x < theta || (x == theta && (i, j) < leaving) {
                    theta = x;
                    leaving = (i, j);
                }
            }
            for (p, &(i, j)) in path.iter().enumerate() {
                if p % 2 == 0 {
                    self.flow[i][j] -= theta;
                } else {
                    self.flow[i][j] += theta;
                }
            }
            self.flow[ei][ej] = theta;
            self.flow[leaving.0][leaving.1] = 0.0;
            self.basic[leaving.0][leaving.1] = false;
            self.basic[ei][ej] = true;
            let slot = self
                .basis
                .iter()
                .position(|&c| c == leaving)
                .expect("leaving cell is basic");
            self.basis[slot] = (ei, ej);

            if theta > 0.0 {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
        Err(Error::Lp(format!(
            "transportation simplex did not converge in {max_iter} pivots"
        )))
    }
}

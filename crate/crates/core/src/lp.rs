//! Thin wrapper over `microlp` for the joint hull LPs and certificate cuts.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

pub(crate) struct Lp {
    problem: Problem,
}

pub(crate) struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

impl Lp {
    pub fn minimize() -> Self {
        Self {
            problem: Problem::new(OptimizationDirection::Minimize),
        }
    }

    pub fn var(&mut self, cost: f64, bounds: (f64, f64)) -> Variable {
        self.problem.add_var(cost, bounds)
    }

    pub fn eq(&mut self, terms: &[(Variable, f64)], rhs: f64) {
        self.problem.add_constraint(expr(terms), ComparisonOp::Eq, rhs);
    }

    pub fn ge(&mut self, terms: &[(Variable, f64)], rhs: f64) {
        self.problem.add_constraint(expr(terms), ComparisonOp::Ge, rhs);
    }

    pub fn solve(&self, vars: &[Variable]) -> Result<LpSolution> {
        let outcome = self.problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let sol = outcome
            .into_solution()
            .map_err(|_| Error::Lp("solve interrupted".into()))?;
        Ok(LpSolution {
            objective: sol.objective(),
            values: vars.iter().map(|&v| sol.var_value(v)).collect(),
        })
    }
}

fn expr(terms: &[(Variable, f64)]) -> LinearExpr {
    let mut e = LinearExpr::empty();
    for &(v, c) in terms {
        e.add(v, c);
    }
    e
}

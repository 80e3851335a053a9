//! Uniform check/report schema: every verification in the crate reduces to a
//! named residual with a pass/fail verdict at the active tolerance.

use crate::scalar::{Scalar, Tol};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

/// Accumulates named residual checks. In the exact backend a check passes
/// only with residual exactly zero; in the floating backend the tolerance
/// contract applies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checks {
    pub exact: bool,
    pub tol: Tol,
    pub list: Vec<Check>,
}

impl Checks {
    pub fn new<S: Scalar>(tol: Tol) -> Self {
        Checks { exact: S::EXACT, tol, list: Vec::new() }
    }

    pub fn add(&mut self, name: &str, residual: f64) -> bool {
        let pass = if self.exact { residual == 0.0 } else { self.tol.is_zero(residual) };
        self.list.push(Check { name: name.to_string(), residual, pass });
        pass
    }

    /// Residual-free boolean check (reported as residual 0 or 1).
    pub fn add_bool(&mut self, name: &str, ok: bool) -> bool {
        self.list.push(Check {
            name: name.to_string(),
            residual: if ok { 0.0 } else { 1.0 },
            pass: ok,
        });
        ok
    }

    pub fn extend(&mut self, other: Checks) {
        self.list.extend(other.list);
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: Checks) {
        for c in other.list {
            self.list.push(Check { name: format!("{prefix}.{}", c.name), ..c });
        }
    }

    pub fn all_pass(&self) -> bool {
        self.list.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.list.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.list.iter().filter(|c| !c.pass).collect()
    }
}

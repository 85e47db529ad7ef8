//! Constraint evaluation and configuration search.

mod eval;
mod reach;
mod search;

use serde::Serialize;

use crate::model::Configuration;

pub use eval::{check_configuration, evaluate, Binding, BoundEntity, Verdict, Violation};
pub use reach::{strongly_connected_reachability, Reachability};
pub use search::{solve, solve_incremental};


#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_solutions: usize,
    /// Defaults to the number of available hosts.
    pub max_instances_per_type: Option<usize>,
    /// Zero keeps hosts in goal order; any other value shuffles the host
    /// order the search walks through.
    pub seed: u64,
    pub node_budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_solutions: 1,
            max_instances_per_type: None,
            seed: 0,
            node_budget: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Sat,
    Unsat,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub solutions: Vec<Configuration>,
    pub nodes_explored: u64,
}

impl SolveResult {
    pub fn first(&self) -> Option<&Configuration> {
        self.solutions.first()
    }
}

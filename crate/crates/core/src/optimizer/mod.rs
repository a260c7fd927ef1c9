//! Modified NSGA-II over variable-length BS layouts with an optional FAP
//! selection part.

mod nsga2;
mod operators;
mod sorting;

pub use nsga2::{
    init_population, nsga2_run, rank_population, select_survivors, HistoryRow, Member, PlanMode,
    Problem, RankedPopulation, RunResult, Score,
};
pub use operators::{
    binary_crossover, binary_mutation, real_crossover, real_crossover_traced, real_mutation,
    CrossoverMode, CrossoverTrace, OperatorError,
};
pub use sorting::{crowding_distance, dominates, non_dominated_sort};

use serde::{Deserialize, Serialize};

use crate::backhaul::FiberAssignmentMode;
use crate::eval::{Deployment, PenaltyParams};

/// How crossover aligns parents with different BS counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DimPolicy {
    /// Drop a random subset from the longer parent.
    #[default]
    MinDim,
    /// Pad the shorter parent with random positions.
    MaxDim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParentSelection {
    #[default]
    Uniform,
    /// Binary tournament on (front, crowding).
    Tournament,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub n_pop: usize,
    pub n_iterations: usize,
    /// Blend overshoot of the real crossover.
    pub epsilon: f64,
    /// Mutation std as a fraction of the area extent.
    pub mutation_rate: f64,
    pub crossover_pool_fraction: f64,
    pub mutation_pool_fraction: f64,
    pub dim_policy: DimPolicy,
    /// Probability that a mutation adds or removes one BS instead of moving one.
    pub structural_mutation_prob: f64,
    pub selection: ParentSelection,
    pub fiber_assignment: FiberAssignmentMode,
    pub penalty_inequality: f64,
    pub penalty_equality: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            n_pop: 100,
            n_iterations: 200,
            epsilon: 0.15,
            mutation_rate: 0.15,
            crossover_pool_fraction: 0.9,
            mutation_pool_fraction: 0.4,
            dim_policy: DimPolicy::MinDim,
            structural_mutation_prob: 0.1,
            selection: ParentSelection::Uniform,
            fiber_assignment: FiberAssignmentMode::Repair,
            penalty_inequality: 1.0e6,
            penalty_equality: 1.0e6,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_pop == 0 {
            return Err("ga.n_pop must be at least 1".into());
        }
        for (name, v) in [
            ("crossover_pool_fraction", self.crossover_pool_fraction),
            ("mutation_pool_fraction", self.mutation_pool_fraction),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(format!("ga.{name} must lie in (0, 1]"));
            }
        }
        if !(self.epsilon >= 0.0 && self.mutation_rate >= 0.0) {
            return Err("ga.epsilon and ga.mutation_rate must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.structural_mutation_prob) {
            return Err("ga.structural_mutation_prob must lie in [0, 1]".into());
        }
        if !(self.penalty_inequality >= 0.0 && self.penalty_equality >= 0.0) {
            return Err("ga penalty coefficients must be >= 0".into());
        }
        Ok(())
    }

    pub fn penalty(&self) -> PenaltyParams {
        PenaltyParams {
            sigma_inequality: self.penalty_inequality,
            sigma_equality: self.penalty_equality,
        }
    }

    pub fn n_children(&self) -> usize {
        (self.crossover_pool_fraction * self.n_pop as f64).round() as usize
    }

    pub fn n_mutants(&self) -> usize {
        (self.mutation_pool_fraction * self.n_pop as f64).round() as usize
    }
}

/// One individual: BS layout plus, in joint mode, FAP selection and
/// (optionally) one FAP gene per W-BS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub deployment: Deployment,
    #[serde(default)]
    pub z: Vec<bool>,
    /// Per-W-BS FAP index; empty unless fiber assignment is evolved.
    #[serde(default)]
    pub fap_genes: Vec<usize>,
}

impl Chromosome {
    pub fn cell(deployment: Deployment) -> Self {
        Self {
            deployment,
            z: Vec::new(),
            fap_genes: Vec::new(),
        }
    }

    pub fn n_total(&self) -> usize {
        self.deployment.n_total()
    }
}

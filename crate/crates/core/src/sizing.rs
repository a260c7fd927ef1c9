//! Closed-form sizing that seeds the optimizer: users per BS, BSs needed for
//! capacity per subarea, BSs needed for coverage, and the initial BS count.

use serde::{Deserialize, Serialize};

use crate::scenario::{CapacityParams, Scenario, M2_PER_KM2};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizingReport {
    pub users_per_bs: u64,
    pub per_subarea_bs: Vec<u64>,
    pub n_cap: u64,
    pub n_cov: u64,
    /// `max(n_cap, n_cov)`.
    pub n_init: u64,
}

impl SizingReport {
    /// A BS that cannot host a single user makes the plan infeasible.
    pub fn is_feasible(&self) -> bool {
        self.users_per_bs > 0
    }
}

/// `floor(N_s·BW_s / (RB_th·BW_RB))`.
pub fn users_per_bs(capacity: &CapacityParams) -> u64 {
    let ratio = capacity.bs_budget_hz() / capacity.min_user_bw_hz();
    // guard against ratios like 239.99999999 from float division
    (ratio + 1e-9).floor() as u64
}

/// BSs needed per subarea for capacity, and their sum. Requires
/// `users_per_bs ≥ 1`.
pub fn capacity_bs_counts(scenario: &Scenario, users_per_bs: u64) -> (Vec<u64>, u64) {
    assert!(users_per_bs >= 1, "users_per_bs must be at least 1");
    let per: Vec<u64> = scenario
        .subareas
        .iter()
        .map(|s| match s.user_count {
            Some(n) => n.div_ceil(users_per_bs),
            None => ceil_tol(s.expected_users() / users_per_bs as f64),
        })
        .collect();
    let total = per.iter().sum();
    (per, total)
}

/// Hexagonal cell area `(3√3/2)·R²` in m².
pub fn hex_cell_area_m2(cell_radius_m: f64) -> f64 {
    1.5 * 3f64.sqrt() * cell_radius_m * cell_radius_m
}

/// `ceil(S_T / S_BS)`.
pub fn coverage_bs_count(scenario: &Scenario) -> u64 {
    let s_bs_km2 = hex_cell_area_m2(scenario.capacity.cell_radius_m) / M2_PER_KM2;
    ceil_tol(scenario.total_area_km2() / s_bs_km2)
}

fn ceil_tol(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

/// Full sizing pass. When no BS can host a user, capacity counts are reported
/// as zero and the report is flagged infeasible.
pub fn size(scenario: &Scenario) -> SizingReport {
    let upb = users_per_bs(&scenario.capacity);
    let (per_subarea_bs, n_cap) = if upb == 0 {
        (vec![0; scenario.subareas.len()], 0)
    } else {
        capacity_bs_counts(scenario, upb)
    };
    let n_cov = coverage_bs_count(scenario);
    SizingReport {
        users_per_bs: upb,
        per_subarea_bs,
        n_cap,
        n_cov,
        n_init: n_cap.max(n_cov),
    }
}

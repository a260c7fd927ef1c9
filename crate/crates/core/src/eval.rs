//! Evaluation of one candidate deployment: association, coverage indicators,
//! bandwidth allocation, the unsatisfied-user and cost objectives, every
//! cell-planning constraint, and penalty-augmented objectives.

use serde::{Deserialize, Serialize};

use crate::backhaul::{self, FiberAssignmentMode, FiberReport};
use crate::geometry::{Point, Rect};
use crate::radio::{self, LinkKind, LinkModel, MeanSinr};
use crate::scenario::{CapacityParams, CostParams, PixelGrid, RadioParams, Scenario, UserSet};

/// BS positions. W-BSs come first when the two lists are viewed as one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub wbs: Vec<Point>,
    pub ubs: Vec<Point>,
}

impl Deployment {
    pub fn new(wbs: Vec<Point>, ubs: Vec<Point>) -> Self {
        Self { wbs, ubs }
    }

    pub fn n_total(&self) -> usize {
        self.wbs.len() + self.ubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_total() == 0
    }

    /// Position of BS `i` in the combined W-then-U indexing.
    pub fn bs(&self, i: usize) -> Point {
        if i < self.wbs.len() {
            self.wbs[i]
        } else {
            self.ubs[i - self.wbs.len()]
        }
    }

    pub fn is_wbs(&self, i: usize) -> bool {
        i < self.wbs.len()
    }

    pub fn all(&self) -> impl Iterator<Item = &Point> + '_ {
        self.wbs.iter().chain(self.ubs.iter())
    }

    pub fn within(&self, bounds: &Rect) -> bool {
        self.all().all(|p| bounds.contains(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterferenceMode {
    #[default]
    NoiseLimited,
    Interference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalSettings {
    /// Deterministic obstacle blockage on the pixel grid.
    pub blockage: bool,
    pub interference: InterferenceMode,
}

/// Nearest-BS association with optional blockage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Association {
    /// Serving BS per user (combined index); `None` when every BS is blocked.
    pub user_to_bs: Vec<Option<usize>>,
    pub user_distance: Vec<f64>,
    /// Serving BS per pixel; `None` for excluded pixels.
    pub pixel_to_bs: Vec<Option<usize>>,
    pub pixel_distance: Vec<f64>,
    /// Pixels that take part in the coverage constraint.
    pub pixel_counted: Vec<bool>,
    /// Serving W-BS per U-BS (index into `wbs`).
    pub ubs_to_wbs: Vec<Option<usize>>,
    pub ubs_distance: Vec<f64>,
}

impl Association {
    pub fn orphan_ubs(&self) -> usize {
        self.ubs_to_wbs.iter().filter(|a| a.is_none()).count()
    }
}

/// Nearest candidate to `p`, lowest index on ties, skipping blocked links
/// when `grid` is given.
fn nearest(p: &Point, candidates: &[Point], grid: Option<&PixelGrid>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let d2 = p.distance_sq(c);
        if best.is_some_and(|(_, b)| d2 >= b) {
            continue;
        }
        if let Some(g) = grid {
            if !radio::line_of_sight(p, c, g) {
                continue;
            }
        }
        best = Some((i, d2));
    }
    best.map(|(i, d2)| (i, d2.sqrt()))
}

/// Associates users and pixels to their nearest BS and every U-BS to its
/// nearest W-BS. With blockage on, blocked links count as infinitely long;
/// a pixel no BS can reach is dropped from the coverage constraint, while an
/// unreachable U-BS stays and is left without a W-BS.
pub fn associate(
    deployment: &Deployment,
    users: &UserSet,
    grid: &PixelGrid,
    blockage: bool,
) -> Association {
    let los_grid = (blockage && grid.has_obstacles()).then_some(grid);
    let all: Vec<Point> = deployment.all().copied().collect();

    let mut user_to_bs = Vec::with_capacity(users.len());
    let mut user_distance = Vec::with_capacity(users.len());
    for p in &users.positions {
        let hit = nearest(p, &all, los_grid);
        user_to_bs.push(hit.map(|h| h.0));
        user_distance.push(hit.map_or(f64::INFINITY, |h| h.1));
    }

    let mut pixel_to_bs = Vec::with_capacity(grid.len());
    let mut pixel_distance = Vec::with_capacity(grid.len());
    let mut pixel_counted = Vec::with_capacity(grid.len());
    for (c, &static_excluded) in grid.centers.iter().zip(&grid.excluded) {
        let hit = if static_excluded {
            None
        } else {
            nearest(c, &all, los_grid)
        };
        // unreachable only means excluded when blockage caused it
        let counted = !static_excluded && (hit.is_some() || los_grid.is_none() || all.is_empty());
        pixel_to_bs.push(hit.map(|h| h.0));
        pixel_distance.push(hit.map_or(f64::INFINITY, |h| h.1));
        pixel_counted.push(counted);
    }

    let mut ubs_to_wbs = Vec::with_capacity(deployment.ubs.len());
    let mut ubs_distance = Vec::with_capacity(deployment.ubs.len());
    for u in &deployment.ubs {
        let hit = nearest(u, &deployment.wbs, los_grid);
        ubs_to_wbs.push(hit.map(|h| h.0));
        ubs_distance.push(hit.map_or(f64::INFINITY, |h| h.1));
    }

    Association {
        user_to_bs,
        user_distance,
        pixel_to_bs,
        pixel_distance,
        pixel_counted,
        ubs_to_wbs,
        ubs_distance,
    }
}

/// Coverage indicators and the mean SINR of each served link.
#[derive(Debug, Clone, PartialEq)]
pub struct Indicators {
    pub user: Vec<bool>,
    pub user_sinr: Vec<Option<MeanSinr>>,
    pub pixel: Vec<bool>,
    pub backhaul: Vec<bool>,
    pub backhaul_sinr: Vec<Option<MeanSinr>>,
}

/// Interference at `p` from every BS except those in `skip`.
fn interference_at(
    p: &Point,
    deployment: &Deployment,
    skip: &[usize],
    radio: &RadioParams,
    los_grid: Option<&PixelGrid>,
) -> f64 {
    deployment
        .all()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k))
        .map(|(_, q)| {
            let blocked = los_grid.is_some_and(|g| !radio::line_of_sight(p, q, g));
            radio::interference_power_w(radio, radio.p_a_w, p.distance(q), blocked)
        })
        .sum()
}

/// Υ per user, pixel and U-BS: the associated link clears its SINR threshold
/// with probability at least ϱ_th.
pub fn coverage_indicators(
    deployment: &Deployment,
    association: &Association,
    users: &UserSet,
    grid: &PixelGrid,
    radio: &RadioParams,
    settings: EvalSettings,
) -> Indicators {
    let access = LinkModel::new(radio, LinkKind::Access);
    let backhaul = LinkModel::new(radio, LinkKind::Backhaul);
    let los_grid = (settings.blockage && grid.has_obstacles()).then_some(grid);
    let with_interference = settings.interference == InterferenceMode::Interference;
    let access_sigma = radio.sigma(LinkKind::Access);
    let access_gamma = radio.gamma_th_db(LinkKind::Access);
    let access_rho = radio.rho_th(LinkKind::Access);

    let access_link = |p: &Point, serving: Option<usize>, d: f64| -> Option<MeanSinr> {
        let b = serving?;
        let i = if with_interference {
            interference_at(p, deployment, &[b], radio, los_grid)
        } else {
            0.0
        };
        Some(access.mean_sinr(d, false, i))
    };
    let covered = |m: &Option<MeanSinr>| {
        m.is_some_and(|m| m.coverage_probability(access_gamma, access_sigma) >= access_rho)
    };

    let user_sinr: Vec<Option<MeanSinr>> = users
        .positions
        .iter()
        .zip(&association.user_to_bs)
        .zip(&association.user_distance)
        .map(|((p, &b), &d)| access_link(p, b, d))
        .collect();
    let user = user_sinr.iter().map(covered).collect();

    let pixel = grid
        .centers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            association.pixel_counted[i]
                && covered(&access_link(
                    c,
                    association.pixel_to_bs[i],
                    association.pixel_distance[i],
                ))
        })
        .collect();

    let n_w = deployment.wbs.len();
    let backhaul_sinr: Vec<Option<MeanSinr>> = deployment
        .ubs
        .iter()
        .enumerate()
        .map(|(u, p)| {
            let w = association.ubs_to_wbs[u]?;
            let i = if with_interference {
                interference_at(p, deployment, &[w, n_w + u], radio, los_grid)
            } else {
                0.0
            };
            Some(backhaul.mean_sinr(association.ubs_distance[u], false, i))
        })
        .collect();
    let bh_sigma = radio.sigma(LinkKind::Backhaul);
    let bh_gamma = radio.gamma_th_db(LinkKind::Backhaul);
    let bh_rho = radio.rho_th(LinkKind::Backhaul);
    let backhaul = backhaul_sinr
        .iter()
        .map(|m| m.is_some_and(|m| m.coverage_probability(bh_gamma, bh_sigma) >= bh_rho))
        .collect();

    Indicators {
        user,
        user_sinr,
        pixel,
        backhaul,
        backhaul_sinr,
    }
}

/// Bandwidth a covered user needs: enough resource blocks to reach its
/// demand at the mean SINR, never fewer than `rb_th`.
pub fn required_bandwidth_hz(demand_bps: f64, sinr_linear: f64, capacity: &CapacityParams) -> f64 {
    let floor = capacity.min_user_bw_hz();
    let se = (1.0 + sinr_linear).log2();
    if !(se > 0.0) {
        return f64::INFINITY;
    }
    let rb = capacity.bw_rb_hz;
    let mut blocks = (demand_bps / (se * rb)).ceil();
    if blocks * rb * se < demand_bps {
        blocks += 1.0;
    }
    (blocks * rb).max(floor)
}

/// Allocated bandwidth and the resulting rate per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub bw_hz: Vec<f64>,
    pub rate_bps: Vec<f64>,
}

/// Greedy allocation, cheapest user first, inside each W-BS tree.
///
/// A tree is a W-BS plus the U-BSs it backhauls. Each BS has `N_s·BW_s`; a
/// W-BS's budget also carries the access traffic of its U-BSs. Users of a
/// U-BS without working backhaul get nothing.
pub fn allocate_bandwidth(
    deployment: &Deployment,
    association: &Association,
    indicators: &Indicators,
    users: &UserSet,
    capacity: &CapacityParams,
) -> Allocation {
    let n_w = deployment.wbs.len();
    let n_bs = deployment.n_total();
    let budget = capacity.bs_budget_hz();
    let mut bw = vec![0.0; users.len()];

    // tree root per BS, None for U-BSs without backhaul
    let root: Vec<Option<usize>> = (0..n_bs)
        .map(|b| {
            if b < n_w {
                Some(b)
            } else {
                let u = b - n_w;
                association.ubs_to_wbs[u].filter(|_| indicators.backhaul[u])
            }
        })
        .collect();

    let mut required: Vec<(f64, usize)> = Vec::new();
    for n in 0..users.len() {
        if !indicators.user[n] {
            continue;
        }
        let Some(b) = association.user_to_bs[n] else {
            continue;
        };
        if root[b].is_none() {
            continue;
        }
        let sinr = indicators.user_sinr[n].map_or(0.0, |m| m.mixture_linear());
        required.push((required_bandwidth_hz(users.demands[n], sinr, capacity), n));
    }
    required.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut bs_left = vec![budget; n_bs];
    let mut tree_left = vec![budget; n_w];
    for (need, n) in required {
        let b = association.user_to_bs[n].expect("filtered above");
        let w = root[b].expect("filtered above");
        if need <= bs_left[b] && need <= tree_left[w] {
            bs_left[b] -= need;
            if b != w {
                tree_left[w] -= need;
            } else {
                tree_left[w] = bs_left[b];
            }
            bw[n] = need;
        }
    }

    let rate_bps = (0..users.len())
        .map(|n| {
            let sinr = indicators.user_sinr[n].map_or(0.0, |m| m.mixture_linear());
            bw[n] * (1.0 + sinr).log2()
        })
        .collect();
    Allocation { bw_hz: bw, rate_bps }
}

/// Number of users whose rate falls short of their demand.
pub fn objective_f1(rates: &[f64], demands: &[f64]) -> u64 {
    rates
        .iter()
        .zip(demands)
        .filter(|(r, d)| r < d)
        .count() as u64
}

/// BS deployment cost.
pub fn objective_f2(deployment: &Deployment, costs: &CostParams) -> f64 {
    deployment.wbs.len() as f64 * costs.c_w + deployment.ubs.len() as f64 * costs.c_u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Inequality,
    Equality,
}

/// One constraint's violation: `magnitude` in the constraint's own units and
/// `relative` normalized for penalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintViolation {
    pub name: String,
    pub kind: ConstraintKind,
    pub magnitude: f64,
    pub relative: f64,
}

impl ConstraintViolation {
    /// `lhs ≥ rhs`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64) -> Self {
        let (magnitude, relative) = if rhs > 0.0 {
            ((rhs - lhs).max(0.0), (1.0 - lhs / rhs).max(0.0))
        } else {
            (0.0, 0.0)
        };
        Self {
            name: name.to_string(),
            kind: ConstraintKind::Inequality,
            magnitude,
            relative,
        }
    }

    /// Sum of `lhs_i ≤ limit` over several entities.
    pub fn at_most_each(name: &str, values: impl Iterator<Item = f64>, limit: f64) -> Self {
        let mut magnitude = 0.0;
        let mut relative = 0.0;
        for v in values {
            if v > limit {
                magnitude += v - limit;
                relative += if limit > 0.0 { v / limit - 1.0 } else { v };
            }
        }
        Self {
            name: name.to_string(),
            kind: ConstraintKind::Inequality,
            magnitude,
            relative,
        }
    }

    /// Sum of `|1 − x_i|` over entities that must each equal one.
    pub fn equal_one_each(name: &str, values: impl Iterator<Item = f64>) -> Self {
        let dev: f64 = values.map(|v| (1.0 - v).abs()).sum();
        Self {
            name: name.to_string(),
            kind: ConstraintKind::Equality,
            magnitude: dev,
            relative: dev,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        self.relative == 0.0
    }
}

pub const PIXEL_COVERAGE: &str = "pixel_coverage";
pub const UBS_BACKHAUL: &str = "ubs_backhaul";
pub const WBS_FANOUT: &str = "wbs_fanout";
pub const UBS_BANDWIDTH: &str = "ubs_bandwidth";
pub const WBS_BANDWIDTH: &str = "wbs_bandwidth";
pub const SERVED_USERS: &str = "served_users";

/// The six cell-planning constraints.
pub fn evaluate_constraints(
    deployment: &Deployment,
    association: &Association,
    indicators: &Indicators,
    bw_alloc: &[f64],
    capacity: &CapacityParams,
) -> Vec<ConstraintViolation> {
    let n_w = deployment.wbs.len();
    let n_u = deployment.ubs.len();

    let counted = association.pixel_counted.iter().filter(|&&c| c).count();
    let covered = indicators.pixel.iter().filter(|&&c| c).count();
    let pixel = ConstraintViolation::at_least(
        PIXEL_COVERAGE,
        covered as f64,
        capacity.delta_cov * counted as f64,
    );

    // Σ_w Υ^w_u for each U-BS; association is one-hot so this is Υ of its W-BS
    let backhaul = ConstraintViolation::equal_one_each(
        UBS_BACKHAUL,
        (0..n_u).map(|u| {
            let ok = association.ubs_to_wbs[u].is_some() && indicators.backhaul[u];
            if ok {
                1.0
            } else {
                0.0
            }
        }),
    );

    let mut fanout = vec![0.0; n_w];
    for u in 0..n_u {
        if let Some(w) = association.ubs_to_wbs[u] {
            if indicators.backhaul[u] {
                fanout[w] += 1.0;
            }
        }
    }
    let fan = ConstraintViolation::at_most_each(
        WBS_FANOUT,
        fanout.iter().copied(),
        capacity.n_lim as f64,
    );

    let mut per_bs = vec![0.0; deployment.n_total()];
    for (n, &b) in association.user_to_bs.iter().enumerate() {
        if let (Some(b), true) = (b, indicators.user[n]) {
            per_bs[b] += bw_alloc[n];
        }
    }
    let budget = capacity.bs_budget_hz();
    let ubs_bw = ConstraintViolation::at_most_each(
        UBS_BANDWIDTH,
        per_bs[n_w..].iter().copied(),
        budget,
    );
    let mut tree = per_bs[..n_w].to_vec();
    for u in 0..n_u {
        if let (Some(w), true) = (association.ubs_to_wbs[u], indicators.backhaul[u]) {
            tree[w] += per_bs[n_w + u];
        }
    }
    let wbs_bw = ConstraintViolation::at_most_each(WBS_BANDWIDTH, tree.into_iter(), budget);

    let served = indicators.user.iter().filter(|&&c| c).count();
    let cap = ConstraintViolation::at_least(
        SERVED_USERS,
        served as f64,
        capacity.delta_cap * indicators.user.len() as f64,
    );

    vec![pixel, backhaul, fan, ubs_bw, wbs_bw, cap]
}

/// Violation coefficients for inequality and equality constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub sigma_inequality: f64,
    pub sigma_equality: f64,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self {
            sigma_inequality: 1.0e6,
            sigma_equality: 1.0e6,
        }
    }
}

/// Total penalty term added to every objective.
pub fn penalty_term(violations: &[ConstraintViolation], cfg: &PenaltyParams) -> f64 {
    violations
        .iter()
        .map(|v| match v.kind {
            ConstraintKind::Inequality => cfg.sigma_inequality * v.relative,
            ConstraintKind::Equality => cfg.sigma_equality * v.relative,
        })
        .sum()
}

/// Adds the same penalty term to each objective.
pub fn penalize(
    objectives: &[f64],
    violations: &[ConstraintViolation],
    cfg: &PenaltyParams,
) -> Vec<f64> {
    let p = penalty_term(violations, cfg);
    objectives.iter().map(|f| f + p).collect()
}

/// Everything computed for one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub association: Association,
    pub indicators: Indicators,
    pub allocation: Allocation,
    pub f1: u64,
    pub f2: f64,
    pub fiber: Option<FiberReport>,
    /// `[F1, F2]`, or `[F1, F2 + F3]` with fiber planning.
    pub objectives: Vec<f64>,
    pub violations: Vec<ConstraintViolation>,
    pub penalty: f64,
    pub penalized_objectives: Vec<f64>,
}

impl EvaluationReport {
    pub fn is_feasible(&self) -> bool {
        self.penalty == 0.0
    }

    pub fn f3(&self) -> Option<f64> {
        self.fiber.as_ref().map(|f| f.cost.total)
    }

    /// Mean SINR (dB) per user at its serving BS; `-inf` when unassociated.
    pub fn user_sinr_db(&self) -> Vec<f64> {
        self.indicators
            .user_sinr
            .iter()
            .map(|m| m.map_or(f64::NEG_INFINITY, |m| m.mixture_db()))
            .collect()
    }

    /// U-BS → W-BS backhaul links in use.
    pub fn backhaul_links(&self) -> Vec<(usize, usize)> {
        self.association
            .ubs_to_wbs
            .iter()
            .enumerate()
            .filter_map(|(u, w)| w.map(|w| (u, w)))
            .collect()
    }
}

/// Fiber input for joint planning.
#[derive(Debug, Clone, Copy)]
pub struct FiberInput<'a> {
    /// FAP selection.
    pub z: &'a [bool],
    /// Evolved FAP index per W-BS, used by [`FiberAssignmentMode::Genetic`].
    pub genes: Option<&'a [usize]>,
    pub mode: FiberAssignmentMode,
}

/// Shared read-only evaluation context.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub scenario: &'a Scenario,
    pub users: &'a UserSet,
    pub grid: &'a PixelGrid,
    pub settings: EvalSettings,
    pub penalty: PenaltyParams,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        scenario: &'a Scenario,
        users: &'a UserSet,
        grid: &'a PixelGrid,
        settings: EvalSettings,
    ) -> Self {
        Self {
            scenario,
            users,
            grid,
            settings,
            penalty: scenario.ga.penalty(),
        }
    }

    /// Cell planning evaluation (`[F1, F2]`), with fiber planning on top when
    /// `fiber` is given.
    pub fn evaluate(&self, deployment: &Deployment, fiber: Option<FiberInput<'_>>) -> EvaluationReport {
        let sc = self.scenario;
        let association = associate(deployment, self.users, self.grid, self.settings.blockage);
        let indicators = coverage_indicators(
            deployment,
            &association,
            self.users,
            self.grid,
            &sc.radio,
            self.settings,
        );
        let allocation =
            allocate_bandwidth(deployment, &association, &indicators, self.users, &sc.capacity);
        let f1 = objective_f1(&allocation.rate_bps, &self.users.demands);
        let f2 = objective_f2(deployment, &sc.costs);
        let mut violations = evaluate_constraints(
            deployment,
            &association,
            &indicators,
            &allocation.bw_hz,
            &sc.capacity,
        );

        let fiber = fiber.map(|input| {
            let report = backhaul::plan_fiber(
                &deployment.wbs,
                &sc.faps,
                sc.central_office(),
                &sc.costs,
                input,
            );
            violations.extend(report.violations.iter().cloned());
            report
        });
        let objectives = match &fiber {
            Some(f) => vec![f1 as f64, backhaul::objective_f2_joint(f2, f.cost.total)],
            None => vec![f1 as f64, f2],
        };
        let penalty = penalty_term(&violations, &self.penalty);
        let penalized_objectives = objectives.iter().map(|f| f + penalty).collect();
        EvaluationReport {
            association,
            indicators,
            allocation,
            f1,
            f2,
            fiber,
            objectives,
            violations,
            penalty,
            penalized_objectives,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_pixel_grid, AreaSection, Subarea};

    pub(crate) fn scenario(obstacles: Vec<Rect>) -> Scenario {
        Scenario {
            name: "unit".into(),
            area: AreaSection {
                x_min: 0.0,
                x_max: 200.0,
                y_min: 0.0,
                y_max: 200.0,
                central_office: None,
                rng_seed: 0,
                pixel_size_m: 10.0,
            },
            subareas: vec![Subarea {
                region: Rect::new(0.0, 200.0, 0.0, 200.0),
                holes: vec![],
                lambda: None,
                user_count: Some(0),
                demand_bps: None,
            }],
            obstacles,
            faps: vec![],
            radio: RadioParams::default(),
            capacity: CapacityParams::default(),
            costs: CostParams::default(),
            ga: Default::default(),
        }
    }

    fn users_at(points: &[Point], demand: f64) -> UserSet {
        UserSet {
            positions: points.to_vec(),
            demands: vec![demand; points.len()],
            subarea: vec![0; points.len()],
        }
    }

    #[test]
    fn single_bs_takes_everyone_and_ties_go_low() {
        let sc = scenario(vec![]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[Point::new(5.0, 5.0), Point::new(190.0, 150.0)], 1.0);
        let dep = Deployment::new(vec![Point::new(100.0, 100.0)], vec![]);
        let a = associate(&dep, &users, &grid, false);
        assert_eq!(a.user_to_bs, vec![Some(0), Some(0)]);

        let dep = Deployment::new(vec![Point::new(0.0, 0.0)], vec![Point::new(20.0, 0.0)]);
        let tie = users_at(&[Point::new(10.0, 0.0)], 1.0);
        assert_eq!(associate(&dep, &tie, &grid, false).user_to_bs, vec![Some(0)]);
    }

    #[test]
    fn required_bandwidth_floor_binds_at_high_sinr() {
        let c = CapacityParams::default();
        assert_eq!(required_bandwidth_hz(180.0e6, 1.0e6, &c), 50.0e6);
        // low SINR needs more than the floor, rounded up to whole blocks
        let bw = required_bandwidth_hz(180.0e6, 1.0, &c);
        assert_eq!(bw, 180.0e6);
        let bw = required_bandwidth_hz(180.0e6, 2.0, &c);
        assert_eq!(bw % 1.0e6, 0.0);
        assert!(bw * 3f64.log2() >= 180.0e6);
    }

    #[test]
    fn capacity_limits_served_users() {
        let sc = scenario(vec![]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&vec![Point::new(101.0, 100.0); 300], 180.0e6);
        let dep = Deployment::new(vec![Point::new(100.0, 100.0)], vec![]);
        let ev = Evaluator::new(&sc, &users, &grid, EvalSettings::default());
        let r = ev.evaluate(&dep, None);
        let served = r.allocation.bw_hz.iter().filter(|&&b| b > 0.0).count();
        assert_eq!(served, 240);
        assert_eq!(r.f1, 60);
        assert_eq!(
            r.violations.iter().find(|v| v.name == WBS_BANDWIDTH).unwrap().magnitude,
            0.0
        );
    }

    #[test]
    fn zero_users_zero_allocation() {
        let sc = scenario(vec![]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[], 1.0);
        let dep = Deployment::new(vec![Point::new(100.0, 100.0)], vec![]);
        let r = Evaluator::new(&sc, &users, &grid, EvalSettings::default()).evaluate(&dep, None);
        assert!(r.allocation.bw_hz.is_empty());
        assert_eq!(r.f1, 0);
    }

    #[test]
    fn f1_and_f2_examples() {
        assert_eq!(objective_f1(&[2.0, 3.0], &[1.0, 3.0]), 0);
        assert_eq!(objective_f1(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]), 3);
        let costs = CostParams::default();
        let p = Point::new(0.0, 0.0);
        assert_eq!(objective_f2(&Deployment::new(vec![p; 3], vec![p; 7]), &costs), 13.0);
        assert_eq!(objective_f2(&Deployment::default(), &costs), 0.0);
        assert_eq!(objective_f2(&Deployment::new(vec![p; 10], vec![]), &costs), 20.0);
    }

    #[test]
    fn fanout_violation_counts_excess() {
        let sc = scenario(vec![]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[], 1.0);
        let w = Point::new(100.0, 100.0);
        // four U-BSs a few meters away keep their backhaul
        let ubs = vec![
            Point::new(103.0, 100.0),
            Point::new(97.0, 100.0),
            Point::new(100.0, 103.0),
            Point::new(100.0, 97.0),
        ];
        let dep = Deployment::new(vec![w], ubs);
        let a = associate(&dep, &users, &grid, false);
        let ind = coverage_indicators(&dep, &a, &users, &grid, &sc.radio, EvalSettings::default());
        assert!(ind.backhaul.iter().all(|&b| b));
        let v = evaluate_constraints(&dep, &a, &ind, &[], &sc.capacity);
        let fan = v.iter().find(|v| v.name == WBS_FANOUT).unwrap();
        assert_eq!(fan.magnitude, 1.0);
        assert!(v.iter().find(|v| v.name == UBS_BACKHAUL).unwrap().is_satisfied());
    }

    #[test]
    fn orphan_ubs_is_an_equality_violation() {
        let sc = scenario(vec![]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[Point::new(50.0, 50.0)], 1.0);
        let dep = Deployment::new(vec![], vec![Point::new(50.0, 50.0), Point::new(150.0, 150.0)]);
        let a = associate(&dep, &users, &grid, false);
        assert_eq!(a.orphan_ubs(), 2);
        let ind = coverage_indicators(&dep, &a, &users, &grid, &sc.radio, EvalSettings::default());
        let alloc = allocate_bandwidth(&dep, &a, &ind, &users, &sc.capacity);
        assert_eq!(alloc.bw_hz, vec![0.0]);
        let v = evaluate_constraints(&dep, &a, &ind, &alloc.bw_hz, &sc.capacity);
        let eq = v.iter().find(|v| v.name == UBS_BACKHAUL).unwrap();
        assert_eq!(eq.kind, ConstraintKind::Equality);
        assert_eq!(eq.magnitude, 2.0);
    }

    #[test]
    fn coverage_shortfall_arithmetic() {
        let v = ConstraintViolation::at_least(PIXEL_COVERAGE, 80.0, 0.9 * 100.0);
        assert!((v.magnitude - 10.0).abs() < 1e-12);
        let half = ConstraintViolation::at_least(PIXEL_COVERAGE, 45.0, 90.0);
        assert_eq!(half.relative, 0.5);
        let cfg = PenaltyParams::default();
        assert_eq!(penalize(&[3.0, 7.0], &[half.clone()], &cfg), vec![500_003.0, 500_007.0]);
        let double = PenaltyParams {
            sigma_inequality: 2.0e6,
            sigma_equality: 2.0e6,
        };
        assert_eq!(penalty_term(&[half.clone()], &double), 2.0 * penalty_term(&[half], &cfg));
        let ok = ConstraintViolation::at_least(PIXEL_COVERAGE, 95.0, 90.0);
        assert_eq!(penalize(&[3.0, 7.0], &[ok], &cfg), vec![3.0, 7.0]);
    }

    #[test]
    fn rho_zero_covers_every_associated_entity() {
        let mut sc = scenario(vec![]);
        sc.radio.rho_th_access = 0.0;
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[Point::new(1.0, 1.0), Point::new(199.0, 199.0)], 1.0);
        let dep = Deployment::new(vec![Point::new(0.0, 0.0)], vec![]);
        let a = associate(&dep, &users, &grid, false);
        let ind = coverage_indicators(&dep, &a, &users, &grid, &sc.radio, EvalSettings::default());
        assert!(ind.user.iter().all(|&c| c));
        assert!(ind.pixel.iter().all(|&c| c));
    }

    #[test]
    fn blocked_pixels_are_excluded_or_rerouted() {
        // wall splits the area; a BS on each side
        let sc = scenario(vec![Rect::new(90.0, 110.0, 0.0, 200.0)]);
        let grid = build_pixel_grid(&sc, 10.0).unwrap();
        let users = users_at(&[Point::new(150.0, 100.0)], 1.0);
        let dep = Deployment::new(vec![Point::new(20.0, 100.0)], vec![]);
        let a = associate(&dep, &users, &grid, true);
        assert_eq!(a.user_to_bs, vec![None]);
        let walls = grid.excluded.iter().filter(|&&e| e).count();
        assert_eq!(walls, 40);
        // right half unreachable → excluded; left half counted
        let counted = a.pixel_counted.iter().filter(|&&c| c).count();
        assert_eq!(counted, 9 * 20);
        let a_off = associate(&dep, &users, &grid, false);
        assert_eq!(a_off.user_to_bs, vec![Some(0)]);
    }
}

//! Fiber backhaul for W-BSs: FAP selection, W-BS→FAP assignment and the
//! resulting fiber cost.

use serde::{Deserialize, Serialize};

use crate::eval::{ConstraintKind, ConstraintViolation, FiberInput};
use crate::geometry::Point;
use crate::scenario::CostParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberAssignmentMode {
    /// Assignment derived from the selection by a capacity-aware greedy repair.
    #[default]
    Repair,
    /// Assignment evolved as one FAP gene per W-BS.
    Genetic,
}

/// Fiber cost split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FiberCost {
    /// W-BS→FAP distribution fiber.
    pub distribution: f64,
    /// Splitter installation at selected FAPs.
    pub splitters: f64,
    /// FAP→central office feeder fiber.
    pub feeder: f64,
    pub total: f64,
}

/// A fiber plan and its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    /// FAP per W-BS; `None` when no FAP had room left.
    pub assignment: Vec<Option<usize>>,
    /// Selected FAPs (pay splitter and feeder).
    pub selected: Vec<bool>,
    pub cost: FiberCost,
    pub violations: Vec<ConstraintViolation>,
}

pub const FIBER_ASSIGNMENT: &str = "fiber_assignment";
pub const FAP_CAPACITY: &str = "fap_capacity";
pub const FAP_SELECTION: &str = "fap_selection";

/// Fiber cost of an assignment and selection.
pub fn fiber_cost(
    wbs: &[Point],
    faps: &[Point],
    central_office: Point,
    assignment: &[Option<usize>],
    selected: &[bool],
    costs: &CostParams,
) -> FiberCost {
    let distribution: f64 = wbs
        .iter()
        .zip(assignment)
        .filter_map(|(w, a)| a.map(|f| costs.c_d * w.distance(&faps[f])))
        .sum();
    let mut splitters = 0.0;
    let mut feeder = 0.0;
    for (f, _) in selected.iter().enumerate().filter(|(_, &s)| s) {
        splitters += costs.c_s;
        feeder += costs.c_f * faps[f].distance(&central_office);
    }
    FiberCost {
        distribution,
        splitters,
        feeder,
        total: distribution + splitters + feeder,
    }
}

/// Greedy assignment. W-BSs closest to any FAP go first; each takes the
/// nearest selected FAP with room, else the nearest unselected FAP with
/// room, which then becomes selected. `selected` is updated in place.
pub fn repair_with_selection(
    wbs: &[Point],
    faps: &[Point],
    capacity: u32,
    selected: &mut [bool],
) -> Vec<Option<usize>> {
    let mut load = vec![0u32; faps.len()];
    let mut assignment = vec![None; wbs.len()];
    let nearest_any = |w: &Point| {
        faps.iter()
            .map(|f| w.distance_sq(f))
            .fold(f64::INFINITY, f64::min)
    };
    let mut order: Vec<(f64, usize)> = wbs.iter().map(nearest_any).zip(0..).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (_, w) in order {
        let pick = |want_selected: bool, selected: &[bool], load: &[u32]| {
            let mut best: Option<(usize, f64)> = None;
            for (f, fp) in faps.iter().enumerate() {
                if selected[f] != want_selected || load[f] >= capacity {
                    continue;
                }
                let d = wbs[w].distance_sq(fp);
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((f, d));
                }
            }
            best.map(|b| b.0)
        };
        let choice = pick(true, selected, &load).or_else(|| pick(false, selected, &load));
        if let Some(f) = choice {
            selected[f] = true;
            load[f] += 1;
            assignment[w] = Some(f);
        }
    }
    assignment
}

/// Greedy assignment with no prior selection.
pub fn repair_assignment(
    wbs: &[Point],
    faps: &[Point],
    capacity: u32,
) -> (Vec<Option<usize>>, Vec<bool>) {
    let mut selected = vec![false; faps.len()];
    let assignment = repair_with_selection(wbs, faps, capacity, &mut selected);
    (assignment, selected)
}

/// Merged cost objective when fiber is planned jointly.
pub fn objective_f2_joint(f2: f64, f3: f64) -> f64 {
    f2 + f3
}

/// Builds and scores the fiber plan for `wbs`.
pub fn plan_fiber(
    wbs: &[Point],
    faps: &[Point],
    central_office: Point,
    costs: &CostParams,
    input: FiberInput<'_>,
) -> FiberReport {
    let cap = costs.splitter_capacity;
    let mut selected: Vec<bool> = (0..faps.len())
        .map(|f| input.z.get(f).copied().unwrap_or(false))
        .collect();
    let mut violations = Vec::new();

    let assignment = match (input.mode, input.genes) {
        (FiberAssignmentMode::Genetic, Some(genes)) if !faps.is_empty() => {
            let assignment: Vec<Option<usize>> = (0..wbs.len())
                .map(|w| Some(genes.get(w).copied().unwrap_or(0).min(faps.len() - 1)))
                .collect();
            let mut load = vec![0.0; faps.len()];
            let mut unselected = 0.0;
            for f in assignment.iter().flatten() {
                load[*f] += 1.0;
                if !selected[*f] {
                    unselected += 1.0;
                }
            }
            violations.push(ConstraintViolation::at_most_each(
                FAP_CAPACITY,
                load.into_iter(),
                cap as f64,
            ));
            let n_w = wbs.len().max(1) as f64;
            violations.push(ConstraintViolation {
                name: FAP_SELECTION.to_string(),
                kind: ConstraintKind::Inequality,
                magnitude: unselected,
                relative: unselected / n_w,
            });
            assignment
        }
        _ => repair_with_selection(wbs, faps, cap, &mut selected),
    };

    violations.push(ConstraintViolation::equal_one_each(
        FIBER_ASSIGNMENT,
        assignment.iter().map(|a| if a.is_some() { 1.0 } else { 0.0 }),
    ));
    let cost = fiber_cost(wbs, faps, central_office, &assignment, &selected, costs);
    FiberReport {
        assignment,
        selected,
        cost,
        violations,
    }
}

/// Human-readable fiber plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberExport {
    pub central_office: Point,
    pub selected_faps: Vec<SelectedFap>,
    pub links: Vec<FiberLink>,
    pub cost: FiberCost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFap {
    pub fap: usize,
    pub position: Point,
    pub feeder_length_m: f64,
    pub wbs_count: usize,
}

/// Distribution fiber from a W-BS to its FAP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberLink {
    pub wbs: usize,
    pub fap: Option<usize>,
    pub length_m: Option<f64>,
}

impl FiberExport {
    pub fn new(report: &FiberReport, wbs: &[Point], faps: &[Point], central_office: Point) -> Self {
        let selected_faps = report
            .selected
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(f, _)| SelectedFap {
                fap: f,
                position: faps[f],
                feeder_length_m: faps[f].distance(&central_office),
                wbs_count: report.assignment.iter().filter(|a| **a == Some(f)).count(),
            })
            .collect();
        let links = report
            .assignment
            .iter()
            .enumerate()
            .map(|(w, a)| FiberLink {
                wbs: w,
                fap: *a,
                length_m: a.map(|f| wbs[w].distance(&faps[f])),
            })
            .collect();
        Self {
            central_office,
            selected_faps,
            links,
            cost: report.cost,
        }
    }
}

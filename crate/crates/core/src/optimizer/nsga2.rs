//! Population initialization, ranking, survivor selection and the main loop.

use std::cmp::Ordering;

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operators::{
    binary_crossover, binary_mutation, real_crossover, real_mutation, UNSET_GENE,
};
use super::sorting::{crowding_distance, non_dominated_sort};
use super::{Chromosome, GaParams, ParentSelection};
use crate::backhaul::FiberAssignmentMode;
use crate::eval::{Deployment, EvaluationReport, Evaluator, FiberInput};
use crate::geometry::{Point, Rect};
use crate::sizing::SizingReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    /// Objectives `[F1, F2]`.
    #[default]
    Cell,
    /// Objectives `[F1, F2 + F3]` with FAP selection evolved alongside.
    Joint,
}

/// Compact evaluation result kept per population member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub objectives: Vec<f64>,
    pub penalized: Vec<f64>,
    pub penalty: f64,
    pub f1: u64,
    pub f2: f64,
    pub f3: Option<f64>,
    pub n_wbs: usize,
    pub n_ubs: usize,
}

impl Score {
    pub fn from_report(report: &EvaluationReport, deployment: &Deployment) -> Self {
        Self {
            objectives: report.objectives.clone(),
            penalized: report.penalized_objectives.clone(),
            penalty: report.penalty,
            f1: report.f1,
            f2: report.f2,
            f3: report.f3(),
            n_wbs: deployment.wbs.len(),
            n_ubs: deployment.ubs.len(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.penalty == 0.0
    }

    pub fn n_total(&self) -> usize {
        self.n_wbs + self.n_ubs
    }
}

/// Planning problem: evaluation context plus the decoding rules for a mode.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub evaluator: Evaluator<'a>,
    pub mode: PlanMode,
    pub sizing: SizingReport,
}

impl<'a> Problem<'a> {
    pub fn new(evaluator: Evaluator<'a>, mode: PlanMode, sizing: SizingReport) -> Self {
        Self {
            evaluator,
            mode,
            sizing,
        }
    }

    pub fn bounds(&self) -> Rect {
        self.evaluator.scenario.bounds()
    }

    fn faps(&self) -> &[Point] {
        &self.evaluator.scenario.faps
    }

    fn fiber_mode(&self) -> FiberAssignmentMode {
        self.evaluator.scenario.ga.fiber_assignment
    }

    fn evolves_genes(&self) -> bool {
        self.mode == PlanMode::Joint
            && self.fiber_mode() == FiberAssignmentMode::Genetic
            && !self.faps().is_empty()
    }

    /// Smallest BS total any chromosome may shrink to.
    pub fn min_total(&self) -> usize {
        (self.sizing.n_cap as usize).max(1)
    }

    /// Makes the binary parts consistent with the layout: `z` has one bit per
    /// FAP and, when assignment is evolved, every W-BS has a valid FAP gene.
    pub fn normalize(&self, c: &mut Chromosome) {
        let n_f = self.faps().len();
        if self.mode == PlanMode::Joint {
            c.z.resize(n_f, false);
        } else {
            c.z.clear();
        }
        if !self.evolves_genes() {
            c.fap_genes.clear();
            return;
        }
        c.fap_genes.resize(c.deployment.wbs.len(), UNSET_GENE);
        for (g, w) in c.fap_genes.iter_mut().zip(&c.deployment.wbs) {
            if *g >= n_f {
                *g = nearest_index(w, self.faps());
            }
        }
    }

    pub fn evaluate(&self, c: &Chromosome) -> EvaluationReport {
        let fiber = (self.mode == PlanMode::Joint).then(|| FiberInput {
            z: &c.z,
            genes: self.evolves_genes().then_some(c.fap_genes.as_slice()),
            mode: self.fiber_mode(),
        });
        self.evaluator.evaluate(&c.deployment, fiber)
    }

    pub fn score(&self, c: &Chromosome) -> Score {
        Score::from_report(&self.evaluate(c), &c.deployment)
    }
}

fn nearest_index(p: &Point, candidates: &[Point]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let d = p.distance_sq(c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub chromosome: Chromosome,
    pub score: Score,
}

/// Members ordered by front, then crowding descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPopulation {
    pub members: Vec<Member>,
    /// Zero-based front per member.
    pub front: Vec<usize>,
    pub crowding: Vec<f64>,
}

impl RankedPopulation {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn first_front(&self) -> Vec<&Member> {
        self.members
            .iter()
            .zip(&self.front)
            .filter(|(_, &f)| f == 0)
            .map(|(m, _)| m)
            .collect()
    }
}

/// `(front, crowding)` order: lower front first, then larger crowding.
fn rank_order(fa: usize, ca: f64, fb: usize, cb: f64) -> Ordering {
    fa.cmp(&fb).then(cb.total_cmp(&ca))
}

/// Fronts and crowding for every member, in input order.
fn fronts_and_crowding(members: &[Member]) -> (Vec<usize>, Vec<f64>) {
    let objectives: Vec<Vec<f64>> = members.iter().map(|m| m.score.penalized.clone()).collect();
    let mut front = vec![0; members.len()];
    let mut crowding = vec![0.0; members.len()];
    for (k, idx) in non_dominated_sort(&objectives).into_iter().enumerate() {
        let vecs: Vec<Vec<f64>> = idx.iter().map(|&i| objectives[i].clone()).collect();
        for (&i, d) in idx.iter().zip(crowding_distance(&vecs)) {
            front[i] = k;
            crowding[i] = d;
        }
    }
    (front, crowding)
}

/// Sorts members by front and crowding (input order breaks ties).
pub fn rank_population(members: Vec<Member>) -> RankedPopulation {
    let (front, crowding) = fronts_and_crowding(&members);
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| rank_order(front[a], crowding[a], front[b], crowding[b]).then(a.cmp(&b)));
    let mut slots: Vec<Option<Member>> = members.into_iter().map(Some).collect();
    RankedPopulation {
        members: order.iter().map(|&i| slots[i].take().expect("each index once")).collect(),
        front: order.iter().map(|&i| front[i]).collect(),
        crowding: order.iter().map(|&i| crowding[i]).collect(),
    }
}

/// The `n` best members of `combined`, re-ranked among themselves.
pub fn select_survivors(combined: Vec<Member>, n: usize) -> RankedPopulation {
    let mut ranked = rank_population(combined);
    ranked.members.truncate(n);
    rank_population(ranked.members)
}

/// Random initial population centred on the sized BS count.
pub fn init_population<R: Rng>(problem: &Problem<'_>, params: &GaParams, rng: &mut R) -> Vec<Chromosome> {
    let bounds = problem.bounds();
    let n_init = problem.sizing.n_init as usize;
    let floor = problem.min_total();
    let jitter = ((0.2 * n_init as f64).round() as usize).max(1);
    let n_f = problem.faps().len();
    (0..params.n_pop)
        .map(|_| {
            let lo = n_init.saturating_sub(jitter).max(floor);
            let hi = (n_init + jitter).max(lo);
            let total = rng.random_range(lo..=hi);
            let n_w = rng.random_range(floor.min(total)..=total).max(1);
            let mut pts = || {
                Point::new(
                    rng.random_range(bounds.x_min..=bounds.x_max),
                    rng.random_range(bounds.y_min..=bounds.y_max),
                )
            };
            let wbs: Vec<Point> = (0..n_w).map(|_| pts()).collect();
            let ubs: Vec<Point> = (n_w..total).map(|_| pts()).collect();
            let mut c = Chromosome::cell(Deployment::new(wbs, ubs));
            if problem.mode == PlanMode::Joint {
                c.z = (0..n_f).map(|_| rng.random_bool(0.5)).collect();
                if problem.evolves_genes() {
                    c.fap_genes = (0..n_w).map(|_| rng.random_range(0..n_f)).collect();
                }
            }
            c
        })
        .collect()
}

/// Per-iteration population summary over penalized objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub best_f1: f64,
    pub median_f1: f64,
    pub best_f2: f64,
    pub median_f2: f64,
    pub feasible: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn summarize(iteration: usize, pop: &RankedPopulation) -> HistoryRow {
    let col = |k: usize| -> Vec<f64> { pop.members.iter().map(|m| m.score.penalized[k]).collect() };
    let (f1, f2) = (col(0), col(1));
    HistoryRow {
        iteration,
        best_f1: f1.iter().copied().fold(f64::INFINITY, f64::min),
        median_f1: median(f1),
        best_f2: f2.iter().copied().fold(f64::INFINITY, f64::min),
        median_f2: median(f2),
        feasible: pop.members.iter().filter(|m| m.score.is_feasible()).count(),
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub population: RankedPopulation,
    pub history: Vec<HistoryRow>,
    pub evaluations: usize,
}

fn pick_parent<'p, R: Rng>(
    pop: &'p RankedPopulation,
    selection: ParentSelection,
    rng: &mut R,
) -> &'p Member {
    let a = rng.random_range(0..pop.len());
    match selection {
        ParentSelection::Uniform => &pop.members[a],
        ParentSelection::Tournament => {
            let b = rng.random_range(0..pop.len());
            let better = match rank_order(pop.front[a], pop.crowding[a], pop.front[b], pop.crowding[b]) {
                Ordering::Greater => b,
                _ => a,
            };
            &pop.members[better]
        }
    }
}

fn evaluate_all(problem: &Problem<'_>, chromosomes: Vec<Chromosome>) -> Vec<Member> {
    chromosomes
        .into_par_iter()
        .map(|chromosome| {
            let score = problem.score(&chromosome);
            Member { chromosome, score }
        })
        .collect()
}

/// Runs the optimizer. Variation runs sequentially on one seeded stream and
/// evaluation is pure, so results do not depend on the thread count.
pub fn nsga2_run(problem: &Problem<'_>, params: &GaParams, seed: u64) -> RunResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = problem.bounds();
    let joint = problem.mode == PlanMode::Joint;
    let n_f = problem.faps().len();

    let mut init = init_population(problem, params, &mut rng);
    for c in &mut init {
        problem.normalize(c);
    }
    let mut evaluations = init.len();
    let mut pop = rank_population(evaluate_all(problem, init));
    let mut history = vec![summarize(0, &pop)];
    if pop.is_empty() {
        return RunResult {
            population: pop,
            history,
            evaluations,
        };
    }

    let n_c = params.n_children();
    let n_m = params.n_mutants();
    for it in 1..=params.n_iterations {
        let mut offspring = Vec::with_capacity(n_c + n_m + 1);
        while offspring.len() < n_c {
            let p1 = &pick_parent(&pop, params.selection, &mut rng).chromosome;
            let p2 = &pick_parent(&pop, params.selection, &mut rng).chromosome;
            let (mut c1, mut c2) =
                real_crossover(p1, p2, params.epsilon, params.dim_policy, &bounds, &mut rng)
                    .unwrap_or_else(|_| (p1.clone(), p2.clone()));
            if joint {
                c1.z = binary_crossover(&p1.z, &p2.z, &mut rng).unwrap_or_else(|_| p1.z.clone());
                c2.z = binary_crossover(&p2.z, &p1.z, &mut rng).unwrap_or_else(|_| p2.z.clone());
            }
            offspring.push(c1);
            if offspring.len() < n_c {
                offspring.push(c2);
            }
        }
        for _ in 0..n_m {
            let parent = &pop.members[rng.random_range(0..pop.len())].chromosome;
            let mut m = real_mutation(
                parent,
                params.mutation_rate,
                &bounds,
                params.structural_mutation_prob,
                problem.min_total(),
                &mut rng,
            );
            if joint {
                m.z = binary_mutation(&m.z, &mut rng);
                if problem.evolves_genes() && !m.fap_genes.is_empty() {
                    let i = rng.random_range(0..m.fap_genes.len());
                    m.fap_genes[i] = rng.random_range(0..n_f);
                }
            }
            offspring.push(m);
        }
        for c in &mut offspring {
            problem.normalize(c);
        }
        evaluations += offspring.len();
        let mut combined = pop.members;
        combined.extend(evaluate_all(problem, offspring));
        pop = select_survivors(combined, params.n_pop);
        let row = summarize(it, &pop);
        if it % 10 == 0 || it == params.n_iterations {
            info!(
                "iteration {it}: best F1 {:.0}, best F2 {:.3}, {} feasible",
                row.best_f1, row.best_f2, row.feasible
            );
        } else {
            debug!("iteration {it}: {row:?}");
        }
        history.push(row);
    }
    RunResult {
        population: pop,
        history,
        evaluations,
    }
}

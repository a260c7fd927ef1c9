//! Subcommand implementations.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use log::info;
use serde::Serialize;

use cellplan::backhaul::FiberExport;
use cellplan::eval::ConstraintViolation;
use cellplan::optimizer::{nsga2_run, PlanMode, Problem};
use cellplan::scenario::{build_pixel_grid, sample_users, PixelGrid, UserSet};
use cellplan::seeds::{self, derive_seed};
use cellplan::sizing::{size, SizingReport};
use cellplan::{
    load_scenario, scenarios, EvalSettings, EvaluationReport, Evaluator, InterferenceMode,
    Scenario,
};

use crate::output::{
    cdf_csv, history_csv, median, pareto_csv, users_csv, write_json, BackhaulLink, Layout,
    Manifest, ParetoRow,
};
use crate::{
    svg, Failure, JointArgs, LayoutArgs, OnOff, PlanArgs, RadioArgs, ScenarioArgs, SizingArgs,
    EXIT_FIBER, EXIT_INVALID, EXIT_SIZING,
};

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(EXIT_INVALID, e)
}

/// Scenario from a file path or bundled name, with overrides applied.
fn load(args: &ScenarioArgs) -> Result<Scenario, Failure> {
    let path = Path::new(&args.scenario);
    let mut scenario = if path.exists() {
        load_scenario(path).map_err(invalid)?
    } else {
        match scenarios::bundled(&args.scenario) {
            Some(r) => r.map_err(invalid)?,
            None => {
                let names: Vec<&str> = scenarios::names().collect();
                return Err(invalid(anyhow!(
                    "no scenario file or bundled scenario named '{}' (bundled: {})",
                    args.scenario,
                    names.join(", ")
                )));
            }
        }
    };
    if let Some(n) = args.users {
        scenario = scenario.with_user_total(n);
    }
    if let Some(px) = args.pixel_size {
        scenario.area.pixel_size_m = px;
    }
    scenario.validate().map_err(invalid)?;
    Ok(scenario)
}

fn settings(radio: &RadioArgs, scenario: &Scenario, base: Option<EvalSettings>) -> EvalSettings {
    let base = base.unwrap_or(EvalSettings {
        blockage: scenario.blockage_available(),
        interference: InterferenceMode::NoiseLimited,
    });
    EvalSettings {
        blockage: radio.blockage.map_or(base.blockage, |b| b == OnOff::On),
        interference: radio.mode.map_or(base.interference, Into::into),
    }
}

fn grid(scenario: &Scenario) -> Result<PixelGrid, Failure> {
    build_pixel_grid(scenario, scenario.area.pixel_size_m).map_err(invalid)
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// `plan` and `jointplan`.
pub fn plan(a: &PlanArgs, joint: Option<&JointArgs>) -> Result<(), Failure> {
    let start = Instant::now();
    let mut scenario = load(&a.scenario)?;
    let seed = a.seed.unwrap_or(scenario.area.rng_seed);
    let mode = if joint.is_some() {
        PlanMode::Joint
    } else {
        PlanMode::Cell
    };
    if let Some(j) = joint {
        if let Some(n) = j.random_faps {
            scenario = scenario.with_random_faps(n, derive_seed(seed, seeds::FAPS));
        }
        if let Some(f) = j.fiber_assignment {
            scenario.ga.fiber_assignment = f.into();
        }
    }
    if let Some(n) = a.iters {
        scenario.ga.n_iterations = n;
    }
    if let Some(n) = a.pop {
        scenario.ga.n_pop = n;
    }
    scenario.validate().map_err(invalid)?;

    let sizing = size(&scenario);
    if !sizing.is_feasible() {
        return Err(Failure::new(
            EXIT_SIZING,
            anyhow!("a single BS cannot serve even one user at the minimum bandwidth"),
        ));
    }
    if mode == PlanMode::Joint {
        let room = scenario.costs.splitter_capacity as u64 * scenario.faps.len() as u64;
        if scenario.faps.is_empty() || sizing.n_cap > room {
            return Err(Failure::new(
                EXIT_FIBER,
                anyhow!(
                    "{} FAPs with {} ports each cannot connect the {} W-BSs capacity needs",
                    scenario.faps.len(),
                    scenario.costs.splitter_capacity,
                    sizing.n_cap
                ),
            ));
        }
    }

    let settings = settings(&a.radio, &scenario, None);
    let user_seed = derive_seed(seed, seeds::USERS);
    let optimizer_seed = derive_seed(seed, seeds::OPTIMIZER);
    let users = sample_users(&scenario, user_seed);
    let grid = grid(&scenario)?;
    info!(
        "{}: {} users, {} pixels, sizing {:?}",
        scenario.name,
        users.len(),
        grid.len(),
        sizing
    );
    let evaluator = Evaluator::new(&scenario, &users, &grid, settings);
    let problem = Problem::new(evaluator, mode, sizing.clone());
    let result = nsga2_run(&problem, &scenario.ga, optimizer_seed);

    let mut front: Vec<(usize, &cellplan::optimizer::Member)> =
        result.population.first_front().into_iter().enumerate().collect();
    front.sort_by(|(ia, a), (ib, b)| {
        let (sa, sb) = (&a.score, &b.score);
        sa.penalized[1]
            .total_cmp(&sb.penalized[1])
            .then(sa.penalized[0].total_cmp(&sb.penalized[0]))
            .then(sa.n_total().cmp(&sb.n_total()))
            .then(ia.cmp(ib))
    });

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut rows = Vec::with_capacity(front.len());
    for (k, (_, m)) in front.iter().enumerate() {
        let report = problem.evaluate(&m.chromosome);
        let layout = Layout::new(
            k,
            mode,
            settings,
            seed,
            user_seed,
            &m.chromosome,
            &report,
            &scenario,
        );
        write_json(&a.out.join(format!("layout-{k}.json")), &layout)?;
        if a.svg {
            fs::write(
                a.out.join(format!("layout-{k}.svg")),
                svg::render(&layout, Some(&users)),
            )?;
        }
        rows.push(ParetoRow {
            solution: k,
            score: m.score.clone(),
        });
    }
    fs::write(a.out.join("pareto.csv"), pareto_csv(&rows, mode == PlanMode::Joint))?;
    fs::write(a.out.join("history.csv"), history_csv(&result.history))?;

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command_line(),
        scenario: a.scenario.scenario.clone(),
        scenario_name: scenario.name.clone(),
        plan_mode: mode,
        seed,
        user_seed,
        optimizer_seed,
        users_override: a.scenario.users,
        pixel_size_override: a.scenario.pixel_size,
        random_faps: joint.and_then(|j| j.random_faps),
        settings,
        ga: scenario.ga.clone(),
        n_users: users.len(),
        sizing,
        evaluations: result.evaluations,
        pareto_size: rows.len(),
        out: a.out.display().to_string(),
        duration_s: start.elapsed().as_secs_f64(),
    };
    write_json(&a.out.join("manifest.json"), &manifest)?;

    let feasible = rows.iter().filter(|r| r.score.is_feasible()).count();
    println!(
        "{} solutions on the first front ({} feasible), written to {}",
        rows.len(),
        feasible,
        a.out.display()
    );
    for r in &rows {
        let s = &r.score;
        println!(
            "  #{:<3} F1 {:>5}  cost {:>9.3}  penalty {:>12}  W-BS {:>3}  U-BS {:>3}",
            r.solution, s.f1, s.objectives[1], s.penalty, s.n_wbs, s.n_ubs
        );
    }
    Ok(())
}

/// A layout re-evaluated under possibly different settings.
struct Reevaluated {
    layout: Layout,
    settings: EvalSettings,
    users: UserSet,
    grid: PixelGrid,
    sizing: SizingReport,
}

impl Reevaluated {
    fn load(a: &LayoutArgs) -> Result<Self, Failure> {
        let layout = Layout::read(&a.layout).map_err(invalid)?;
        let settings = settings(&a.radio, &layout.scenario, Some(layout.settings));
        let users = sample_users(&layout.scenario, layout.user_seed);
        let grid = grid(&layout.scenario)?;
        let sizing = size(&layout.scenario);
        Ok(Self {
            layout,
            settings,
            users,
            grid,
            sizing,
        })
    }

    fn evaluate(&self, settings: EvalSettings) -> EvaluationReport {
        let evaluator = Evaluator::new(&self.layout.scenario, &self.users, &self.grid, settings);
        Problem::new(evaluator, self.layout.plan_mode, self.sizing.clone())
            .evaluate(&self.layout.chromosome)
    }
}

#[derive(Debug, Serialize)]
struct EvaluationSummary {
    objectives: Vec<f64>,
    penalized_objectives: Vec<f64>,
    penalty: f64,
    feasible: bool,
    /// Objectives equal the ones stored in the layout.
    matches_layout: bool,
    f1: u64,
    f2: f64,
    f3: Option<f64>,
    settings: EvalSettings,
    n_users: usize,
    covered_users: usize,
    satisfied_users: usize,
    counted_pixels: usize,
    covered_pixels: usize,
    n_wbs: usize,
    n_ubs: usize,
    violations: Vec<ConstraintViolation>,
    backhaul_links: Vec<BackhaulLink>,
    fiber: Option<FiberExport>,
}

pub fn evaluate(a: &LayoutArgs) -> Result<(), Failure> {
    let r = Reevaluated::load(a)?;
    let report = r.evaluate(r.settings);
    let sc = &r.layout.scenario;
    let d = &r.layout.chromosome.deployment;
    let fresh = Layout::new(
        r.layout.solution,
        r.layout.plan_mode,
        r.settings,
        r.layout.seed,
        r.layout.user_seed,
        &r.layout.chromosome,
        &report,
        sc,
    );
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count();
    let summary = EvaluationSummary {
        objectives: report.objectives.clone(),
        penalized_objectives: report.penalized_objectives.clone(),
        penalty: report.penalty,
        feasible: report.is_feasible(),
        matches_layout: report.objectives == r.layout.objectives
            && report.penalty == r.layout.penalty,
        f1: report.f1,
        f2: report.f2,
        f3: report.f3(),
        settings: r.settings,
        n_users: r.users.len(),
        covered_users: count(&report.indicators.user),
        satisfied_users: r.users.len() - report.f1 as usize,
        counted_pixels: count(&report.association.pixel_counted),
        covered_pixels: count(&report.indicators.pixel),
        n_wbs: d.wbs.len(),
        n_ubs: d.ubs.len(),
        violations: report.violations.clone(),
        backhaul_links: fresh.backhaul_links.clone(),
        fiber: fresh.fiber.clone(),
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_json(&a.out.join("report.json"), &summary)?;
    fs::write(a.out.join("users.csv"), users_csv(&r.users, &report))?;
    if a.svg {
        fs::write(a.out.join("layout.svg"), svg::render(&fresh, Some(&r.users)))?;
    }
    println!(
        "F1 {}  cost {}  penalty {}  feasible {}  matches layout {}",
        summary.f1,
        summary.objectives[1],
        summary.penalty,
        summary.feasible,
        summary.matches_layout
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct CoverageSummary {
    settings: EvalSettings,
    n_users: usize,
    median_sinr_db: Option<f64>,
    median_snr_db: Option<f64>,
    median_rate_bps: Option<f64>,
}

pub fn coverage(a: &LayoutArgs) -> Result<(), Failure> {
    let r = Reevaluated::load(a)?;
    let report = r.evaluate(r.settings);
    let sinr = report.user_sinr_db();
    let snr = if r.settings.interference == InterferenceMode::NoiseLimited {
        sinr.clone()
    } else {
        r.evaluate(EvalSettings {
            interference: InterferenceMode::NoiseLimited,
            ..r.settings
        })
        .user_sinr_db()
    };
    let rate = &report.allocation.rate_bps;
    let summary = CoverageSummary {
        settings: r.settings,
        n_users: r.users.len(),
        median_sinr_db: median(&sinr),
        median_snr_db: median(&snr),
        median_rate_bps: median(rate),
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    fs::write(a.out.join("cdf.csv"), cdf_csv(&sinr, &snr, rate))?;
    write_json(&a.out.join("coverage.json"), &summary)?;
    println!(
        "median SINR {:?} dB, median SNR {:?} dB over {} users",
        summary.median_sinr_db, summary.median_snr_db, summary.n_users
    );
    Ok(())
}

pub fn sizing(a: &SizingArgs) -> Result<(), Failure> {
    let scenario = load(&a.scenario)?;
    let report = size(&scenario);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?
    );
    if !report.is_feasible() {
        return Err(Failure::new(
            EXIT_SIZING,
            anyhow!("a single BS cannot serve even one user at the minimum bandwidth"),
        ));
    }
    Ok(())
}

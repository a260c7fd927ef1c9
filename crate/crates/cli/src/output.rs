//! File formats written and read by the CLI.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use cellplan::backhaul::FiberExport;
use cellplan::optimizer::{Chromosome, GaParams, HistoryRow, PlanMode, Score};
use cellplan::scenario::UserSet;
use cellplan::sizing::SizingReport;
use cellplan::{EvalSettings, EvaluationReport, Point, Scenario};

/// One BS in a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsEntry {
    pub id: usize,
    pub role: String,
    pub position: Point,
}

/// U-BS→W-BS wireless backhaul link (combined BS ids).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackhaulLink {
    pub ubs: usize,
    pub wbs: usize,
    pub length_m: f64,
    pub covered: bool,
}

/// A solution with everything needed to re-evaluate it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub solution: usize,
    pub plan_mode: PlanMode,
    pub settings: EvalSettings,
    pub seed: u64,
    pub user_seed: u64,
    pub objectives: Vec<f64>,
    pub penalized_objectives: Vec<f64>,
    pub penalty: f64,
    pub f1: u64,
    pub f2: f64,
    pub f3: Option<f64>,
    pub base_stations: Vec<BsEntry>,
    pub backhaul_links: Vec<BackhaulLink>,
    pub fiber: Option<FiberExport>,
    pub chromosome: Chromosome,
    pub scenario: Scenario,
}

impl Layout {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        solution: usize,
        plan_mode: PlanMode,
        settings: EvalSettings,
        seed: u64,
        user_seed: u64,
        chromosome: &Chromosome,
        report: &EvaluationReport,
        scenario: &Scenario,
    ) -> Self {
        let d = &chromosome.deployment;
        let n_w = d.wbs.len();
        let base_stations = d
            .all()
            .enumerate()
            .map(|(id, p)| BsEntry {
                id,
                role: if id < n_w { "wbs" } else { "ubs" }.to_string(),
                position: *p,
            })
            .collect();
        let backhaul_links = report
            .backhaul_links()
            .into_iter()
            .map(|(u, w)| BackhaulLink {
                ubs: n_w + u,
                wbs: w,
                length_m: report.association.ubs_distance[u],
                covered: report.indicators.backhaul[u],
            })
            .collect();
        let fiber = report
            .fiber
            .as_ref()
            .map(|f| FiberExport::new(f, &d.wbs, &scenario.faps, scenario.central_office()));
        Self {
            solution,
            plan_mode,
            settings,
            seed,
            user_seed,
            objectives: report.objectives.clone(),
            penalized_objectives: report.penalized_objectives.clone(),
            penalty: report.penalty,
            f1: report.f1,
            f2: report.f2,
            f3: report.f3(),
            base_stations,
            backhaul_links,
            fiber,
            chromosome: chromosome.clone(),
            scenario: scenario.clone(),
        }
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let layout: Layout =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        layout
            .scenario
            .validate()
            .with_context(|| format!("scenario embedded in {}", path.display()))?;
        Ok(layout)
    }
}

/// Everything that determined a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario: String,
    pub scenario_name: String,
    pub plan_mode: PlanMode,
    pub seed: u64,
    pub user_seed: u64,
    pub optimizer_seed: u64,
    pub users_override: Option<u64>,
    pub pixel_size_override: Option<f64>,
    pub random_faps: Option<usize>,
    pub settings: EvalSettings,
    pub ga: GaParams,
    pub n_users: usize,
    pub sizing: SizingReport,
    pub evaluations: usize,
    pub pareto_size: usize,
    pub out: String,
    pub duration_s: f64,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// One front member as exported.
#[derive(Debug, Clone)]
pub struct ParetoRow {
    pub solution: usize,
    pub score: Score,
}

pub fn pareto_csv(rows: &[ParetoRow], joint: bool) -> String {
    let mut s = String::from(if joint {
        "solution,f1,f2,f3,f2_total,penalty,n_wbs,n_ubs\n"
    } else {
        "solution,f1,f2,penalty,n_wbs,n_ubs\n"
    });
    for r in rows {
        let sc = &r.score;
        if joint {
            let f3 = sc.f3.unwrap_or(0.0);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.solution, sc.f1, sc.f2, f3, sc.objectives[1], sc.penalty, sc.n_wbs, sc.n_ubs
            );
        } else {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.solution, sc.f1, sc.f2, sc.penalty, sc.n_wbs, sc.n_ubs
            );
        }
    }
    s
}

pub fn history_csv(rows: &[HistoryRow]) -> String {
    let mut s = String::from("iteration,best_f1,median_f1,best_f2,median_f2,feasible\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iteration, r.best_f1, r.median_f1, r.best_f2, r.median_f2, r.feasible
        );
    }
    s
}

pub fn users_csv(users: &UserSet, report: &EvaluationReport) -> String {
    let mut s = String::from("id,x,y,bs,covered,bw_hz,rate_bps,satisfied\n");
    for n in 0..users.len() {
        let p = users.positions[n];
        let bs = report.association.user_to_bs[n].map_or(String::new(), |b| b.to_string());
        let rate = report.allocation.rate_bps[n];
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            n,
            p.x,
            p.y,
            bs,
            report.indicators.user[n],
            report.allocation.bw_hz[n],
            rate,
            rate >= users.demands[n]
        );
    }
    s
}

/// Fraction of `values` at or above `x`.
fn tail_fraction(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let below = sorted.partition_point(|v| *v < x);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// Long-form tail curves: `curve,x,fraction` for SINR and SNR (dB) and rate (bps).
pub fn cdf_csv(sinr_db: &[f64], snr_db: &[f64], rate_bps: &[f64]) -> String {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (sinr, snr, rate) = (sorted(sinr_db), sorted(snr_db), sorted(rate_bps));
    let mut s = String::from("curve,x,fraction\n");
    for (name, values) in [("sinr_db", &sinr), ("snr_db", &snr)] {
        for i in 0..=240 {
            let x = -20.0 + 0.5 * i as f64;
            let _ = writeln!(s, "{name},{x},{}", tail_fraction(values, x));
        }
    }
    let max_rate = rate.last().copied().unwrap_or(0.0).max(1.0);
    for i in 0..=200 {
        let x = max_rate * i as f64 / 200.0;
        let _ = writeln!(s, "rate_bps,{x},{}", tail_fraction(&rate, x));
    }
    s
}

/// Median of finite values; `None` when there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_fraction_is_monotone() {
        let v = [1.0, 2.0, 2.0, 5.0];
        assert_eq!(tail_fraction(&v, 0.0), 1.0);
        assert_eq!(tail_fraction(&v, 2.0), 0.75);
        assert_eq!(tail_fraction(&v, 6.0), 0.0);
    }

    #[test]
    fn median_skips_non_finite() {
        assert_eq!(median(&[f64::NEG_INFINITY, 1.0, 3.0]), Some(2.0));
        assert_eq!(median(&[]), None);
    }
}

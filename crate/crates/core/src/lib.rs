//! Two-tier mmWave cell planning: W-BSs on fiber, U-BSs on in-band wireless
//! backhaul, optional fiber planning over existing access points, all driven
//! by a modified NSGA-II over (unsatisfied users, cost).

pub mod backhaul;
pub mod eval;
pub mod geometry;
pub mod optimizer;
pub mod radio;
pub mod scenario;
pub mod scenarios;
pub mod seeds;
pub mod sizing;
pub mod units;

pub use eval::{Deployment, EvalSettings, EvaluationReport, Evaluator, InterferenceMode};
pub use geometry::{Point, Rect};
pub use scenario::{load_scenario, Scenario, ScenarioError};

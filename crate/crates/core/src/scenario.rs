//! Planning scenarios: area geometry, user subareas, obstacles, fiber access
//! points and every parameter table, plus user sampling and the pixel grid.

use std::path::Path;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Rect};
use crate::optimizer::GaParams;

/// Square meters per square kilometer.
pub const M2_PER_KM2: f64 = 1.0e6;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(msg.into()))
}

/// Outer rectangle of the planning area plus run-level geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaSection {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Defaults to the middle of the area.
    #[serde(default)]
    pub central_office: Option<Point>,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_pixel_size")]
    pub pixel_size_m: f64,
}

fn default_pixel_size() -> f64 {
    10.0
}

/// A region with its own user distribution.
///
/// `holes` carves rectangles out of `region`, which is how a ring around a
/// dense core is expressed with rectangles only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subarea {
    pub region: Rect,
    #[serde(default)]
    pub holes: Vec<Rect>,
    /// Users per km².
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Fixed user count; authoritative over `lambda` when both are present.
    #[serde(default)]
    pub user_count: Option<u64>,
    /// Per-user demanded rate override for users of this subarea (bps).
    #[serde(default)]
    pub demand_bps: Option<f64>,
}

impl Subarea {
    /// Area in m².
    pub fn area_m2(&self) -> f64 {
        self.region.area() - self.holes.iter().map(Rect::area).sum::<f64>()
    }

    pub fn area_km2(&self) -> f64 {
        self.area_m2() / M2_PER_KM2
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.region.contains(p) && !self.holes.iter().any(|h| h.contains_strictly(p))
    }

    /// Expected number of users: the fixed count when given, else λ·S.
    pub fn expected_users(&self) -> f64 {
        match (self.user_count, self.lambda) {
            (Some(n), _) => n as f64,
            (None, Some(l)) => l * self.area_km2(),
            (None, None) => 0.0,
        }
    }

    /// Density in users/km², derived from the count when only that is given.
    pub fn density(&self) -> f64 {
        match (self.user_count, self.lambda) {
            (_, Some(l)) => l,
            (Some(n), None) => n as f64 / self.area_km2(),
            (None, None) => 0.0,
        }
    }
}

/// A per-link-state parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePair {
    pub los: f64,
    pub nlos: f64,
}

/// Access and backhaul variants of a per-state parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTable {
    pub access: StatePair,
    pub backhaul: StatePair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    /// Path loss at 1 m (dB).
    pub alpha_db: f64,
    pub beta: LinkTable,
    /// Lognormal shadowing standard deviation (dB).
    pub sigma_db: LinkTable,
    /// Blockage rate of the LOS probability model (1/m).
    pub a_los: f64,
    pub p_a_w: f64,
    pub p_b_w: f64,
    pub ag_bs_access_dbi: f64,
    pub ag_bs_backhaul_dbi: f64,
    pub ag_ue_dbi: f64,
    /// Side-lobe gain applied at both ends of interfering links.
    pub side_lobe_gain_dbi: f64,
    pub noise_figure_db: f64,
    /// Bandwidth over which thermal noise is integrated.
    pub noise_bandwidth_hz: f64,
    /// Residual self-interference fraction of the access power.
    pub tau: f64,
    pub gamma_th_access_db: f64,
    pub gamma_th_backhaul_db: f64,
    pub rho_th_access: f64,
    pub rho_th_backhaul: f64,
    pub h_ue_m: f64,
    pub h_bs_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            alpha_db: 70.0,
            beta: LinkTable {
                access: StatePair { los: 2.0, nlos: 3.3 },
                backhaul: StatePair { los: 2.0, nlos: 3.5 },
            },
            sigma_db: LinkTable {
                access: StatePair { los: 5.2, nlos: 7.2 },
                backhaul: StatePair { los: 4.2, nlos: 7.9 },
            },
            a_los: 0.006,
            p_a_w: 1.0,
            p_b_w: 1.26,
            ag_bs_access_dbi: 18.0,
            ag_bs_backhaul_dbi: 52.0,
            ag_ue_dbi: 18.0,
            side_lobe_gain_dbi: 0.0,
            noise_figure_db: 10.0,
            noise_bandwidth_hz: 50.0e6,
            tau: 1.0e-5,
            gamma_th_access_db: 10.0,
            gamma_th_backhaul_db: 55.0,
            rho_th_access: 0.9,
            rho_th_backhaul: 0.9,
            h_ue_m: 1.5,
            h_bs_m: 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityParams {
    pub n_sectors: u32,
    pub bw_sector_hz: f64,
    pub bw_rb_hz: f64,
    /// Minimum resource blocks per user.
    pub rb_th: u32,
    /// Default demanded rate per user (bps).
    pub r_demand_bps: f64,
    /// Maximum number of U-BSs one W-BS may backhaul.
    pub n_lim: u32,
    pub delta_cov: f64,
    pub delta_cap: f64,
    pub cell_radius_m: f64,
    /// Carried for completeness; no computation reads it.
    pub omega: f64,
}

impl Default for CapacityParams {
    fn default() -> Self {
        Self {
            n_sectors: 3,
            bw_sector_hz: 4.0e9,
            bw_rb_hz: 1.0e6,
            rb_th: 50,
            r_demand_bps: 180.0e6,
            n_lim: 3,
            delta_cov: 0.9,
            delta_cap: 0.9,
            cell_radius_m: 100.0,
            omega: 1.0 / 3.0,
        }
    }
}

impl CapacityParams {
    /// Total bandwidth of one BS over all sectors.
    pub fn bs_budget_hz(&self) -> f64 {
        self.n_sectors as f64 * self.bw_sector_hz
    }

    /// Minimum bandwidth dedicated to a served user.
    pub fn min_user_bw_hz(&self) -> f64 {
        self.rb_th as f64 * self.bw_rb_hz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    pub c_w: f64,
    pub c_u: f64,
    /// Splitter installation / FAP activation.
    pub c_s: f64,
    /// Feeder fiber per meter.
    pub c_f: f64,
    /// Distribution fiber per meter.
    pub c_d: f64,
    /// Maximum W-BSs per FAP.
    pub splitter_capacity: u32,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            c_w: 2.0,
            c_u: 1.0,
            c_s: 0.05,
            c_f: 0.01,
            c_d: 0.02,
            splitter_capacity: 4,
        }
    }
}

/// A validated planning scenario. Immutable once loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub area: AreaSection,
    #[serde(default)]
    pub subareas: Vec<Subarea>,
    #[serde(default)]
    pub obstacles: Vec<Rect>,
    #[serde(default)]
    pub faps: Vec<Point>,
    #[serde(default)]
    pub radio: RadioParams,
    #[serde(default)]
    pub capacity: CapacityParams,
    #[serde(default)]
    pub costs: CostParams,
    #[serde(default)]
    pub ga: GaParams,
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&text)
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(self.area.x_min, self.area.x_max, self.area.y_min, self.area.y_max)
    }

    pub fn central_office(&self) -> Point {
        self.area
            .central_office
            .unwrap_or_else(|| self.bounds().center())
    }

    /// Total area S_T in km².
    pub fn total_area_km2(&self) -> f64 {
        self.bounds().area() / M2_PER_KM2
    }

    pub fn has_fiber_planning(&self) -> bool {
        !self.faps.is_empty()
    }

    pub fn blockage_available(&self) -> bool {
        !self.obstacles.is_empty()
    }

    /// Expected user total over all subareas.
    pub fn expected_users(&self) -> f64 {
        self.subareas.iter().map(Subarea::expected_users).sum()
    }

    /// Copy with every subarea's population rescaled so the expected total is
    /// `total_users` (counts are rounded, densities scaled).
    pub fn with_user_total(&self, total_users: u64) -> Scenario {
        let current = self.expected_users();
        let mut out = self.clone();
        if current <= 0.0 {
            return out;
        }
        let factor = total_users as f64 / current;
        for s in &mut out.subareas {
            if let Some(n) = s.user_count {
                s.user_count = Some((n as f64 * factor).round() as u64);
            }
            if let Some(l) = s.lambda {
                s.lambda = Some(l * factor);
            }
        }
        out
    }

    /// Copy whose FAPs are replaced by `n` uniform random points.
    pub fn with_random_faps(&self, n: usize, seed: u64) -> Scenario {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = self.bounds();
        let mut out = self.clone();
        out.faps = (0..n)
            .map(|_| {
                Point::new(
                    rng.random_range(b.x_min..=b.x_max),
                    rng.random_range(b.y_min..=b.y_max),
                )
            })
            .collect();
        out
    }

    /// Checks every structural and parameter invariant.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bounds = self.bounds();
        if !bounds.is_well_formed() {
            return invalid("area bounds must be finite with x_max > x_min and y_max > y_min");
        }
        if !(self.area.pixel_size_m > 0.0) {
            return invalid("area.pixel_size_m must be positive");
        }
        if let Some(co) = self.area.central_office {
            if !bounds.contains(&co) {
                return invalid("central office lies outside the area bounds");
            }
        }

        for (i, s) in self.subareas.iter().enumerate() {
            if !s.region.is_well_formed() {
                return invalid(format!("subarea {i}: region is degenerate"));
            }
            if !bounds.contains_rect(&s.region) {
                return invalid(format!("subarea {i}: region lies outside the area bounds"));
            }
            for (h, hole) in s.holes.iter().enumerate() {
                if !hole.is_well_formed() || !s.region.contains_rect(hole) {
                    return invalid(format!("subarea {i}: hole {h} is not inside its region"));
                }
                for other in &s.holes[h + 1..] {
                    if hole.intersection(other).is_some() {
                        return invalid(format!("subarea {i}: holes overlap"));
                    }
                }
            }
            if s.area_m2() <= 0.0 {
                return invalid(format!("subarea {i}: holes cover the whole region"));
            }
            if s.user_count.is_none() && s.lambda.is_none() {
                return invalid(format!("subarea {i}: one of user_count or lambda is required"));
            }
            if let Some(l) = s.lambda {
                if !(l.is_finite() && l >= 0.0) {
                    return invalid(format!("subarea {i}: lambda must be a finite value >= 0"));
                }
                if let Some(n) = s.user_count {
                    let implied = l * s.area_km2();
                    if (implied - n as f64).abs() > 0.5 + 0.01 * n as f64 {
                        warn!(
                            "subarea {i}: lambda {l} over {:.4} km² implies {implied:.1} users, \
                             user_count {n} is used",
                            s.area_km2()
                        );
                    }
                }
            }
            if let Some(d) = s.demand_bps {
                if !(d.is_finite() && d > 0.0) {
                    return invalid(format!("subarea {i}: demand_bps must be positive"));
                }
            }
        }
        for i in 0..self.subareas.len() {
            for j in i + 1..self.subareas.len() {
                if !subareas_disjoint(&self.subareas[i], &self.subareas[j]) {
                    return invalid(format!("subareas {i} and {j} overlap"));
                }
            }
        }

        for (i, o) in self.obstacles.iter().enumerate() {
            if !o.is_well_formed() || !bounds.contains_rect(o) {
                return invalid(format!("obstacle {i} is degenerate or outside the area bounds"));
            }
        }
        for (i, f) in self.faps.iter().enumerate() {
            if !bounds.contains(f) {
                return invalid(format!("FAP {i} lies outside the area bounds"));
            }
        }

        self.validate_radio()?;
        self.validate_capacity()?;
        self.validate_costs()?;
        self.ga.validate().map_err(ScenarioError::Invalid)
    }

    fn validate_radio(&self) -> Result<(), ScenarioError> {
        let r = &self.radio;
        if !(0.0..=1.0).contains(&r.tau) {
            return invalid("radio.tau must lie in [0, 1]");
        }
        for (name, v) in [
            ("rho_th_access", r.rho_th_access),
            ("rho_th_backhaul", r.rho_th_backhaul),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return invalid(format!("radio.{name} must lie in (0, 1)"));
            }
        }
        if !(r.p_a_w > 0.0 && r.p_b_w > 0.0) {
            return invalid("radio transmit powers must be positive");
        }
        if !(r.noise_bandwidth_hz > 0.0) {
            return invalid("radio.noise_bandwidth_hz must be positive");
        }
        if !(r.a_los >= 0.0) {
            return invalid("radio.a_los must be >= 0");
        }
        let pairs = [r.beta.access, r.beta.backhaul, r.sigma_db.access, r.sigma_db.backhaul];
        if pairs
            .iter()
            .any(|p| !(p.los.is_finite() && p.nlos.is_finite() && p.los >= 0.0 && p.nlos >= 0.0))
        {
            return invalid("radio beta/sigma tables need finite non-negative LOS and NLOS values");
        }
        Ok(())
    }

    fn validate_capacity(&self) -> Result<(), ScenarioError> {
        let c = &self.capacity;
        if c.n_sectors == 0 || !(c.bw_sector_hz > 0.0) || !(c.bw_rb_hz > 0.0) || c.rb_th == 0 {
            return invalid("capacity: sectors, bandwidths and rb_th must be positive");
        }
        if !(c.r_demand_bps > 0.0) {
            return invalid("capacity.r_demand_bps must be positive");
        }
        for (name, v) in [("delta_cov", c.delta_cov), ("delta_cap", c.delta_cap)] {
            if !(v > 0.0 && v <= 1.0) {
                return invalid(format!("capacity.{name} must lie in (0, 1]"));
            }
        }
        if !(c.cell_radius_m > 0.0) {
            return invalid("capacity.cell_radius_m must be positive");
        }
        Ok(())
    }

    fn validate_costs(&self) -> Result<(), ScenarioError> {
        let k = &self.costs;
        if [k.c_w, k.c_u, k.c_s, k.c_f, k.c_d]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return invalid("costs must be finite and >= 0");
        }
        if k.splitter_capacity == 0 {
            return invalid("costs.splitter_capacity must be >= 1");
        }
        Ok(())
    }
}

/// Two subareas are disjoint when their regions' overlap sits inside a hole
/// of one of them.
fn subareas_disjoint(a: &Subarea, b: &Subarea) -> bool {
    match a.region.intersection(&b.region) {
        None => true,
        Some(overlap) => a
            .holes
            .iter()
            .chain(b.holes.iter())
            .any(|h| h.contains_rect(&overlap)),
    }
}

/// Sampled user realization.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    pub positions: Vec<Point>,
    /// Demanded rate per user (bps).
    pub demands: Vec<f64>,
    /// Index of the generating subarea per user.
    pub subarea: Vec<usize>,
}

impl UserSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

const MAX_PLACEMENT_TRIES: usize = 100_000;

/// Draws one user realization. Fixed-count subareas get exactly that many
/// users; density subareas get a Poisson(λ·S) count. Positions are uniform
/// over the subarea and never inside an obstacle.
pub fn sample_users(scenario: &Scenario, seed: u64) -> UserSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = UserSet {
        positions: Vec::new(),
        demands: Vec::new(),
        subarea: Vec::new(),
    };
    for (idx, s) in scenario.subareas.iter().enumerate() {
        let count = match (s.user_count, s.lambda) {
            (Some(n), _) => n,
            (None, Some(l)) => {
                let mean = l * s.area_km2();
                if mean > 0.0 {
                    Poisson::new(mean)
                        .map(|p| p.sample(&mut rng) as u64)
                        .unwrap_or(0)
                } else {
                    0
                }
            }
            (None, None) => 0,
        };
        let demand = s.demand_bps.unwrap_or(scenario.capacity.r_demand_bps);
        for _ in 0..count {
            let p = place_in_subarea(&mut rng, s, &scenario.obstacles);
            users.positions.push(p);
            users.demands.push(demand);
            users.subarea.push(idx);
        }
    }
    users
}

fn place_in_subarea(rng: &mut ChaCha8Rng, s: &Subarea, obstacles: &[Rect]) -> Point {
    let r = &s.region;
    let mut last = r.center();
    for _ in 0..MAX_PLACEMENT_TRIES {
        let p = Point::new(
            rng.random_range(r.x_min..=r.x_max),
            rng.random_range(r.y_min..=r.y_max),
        );
        last = p;
        if s.contains(&p) && !obstacles.iter().any(|o| o.contains_strictly(&p)) {
            return p;
        }
    }
    warn!("subarea is almost fully blocked; placing a user inside an obstacle");
    last
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("pixel size {0} m must be positive")]
    NonPositive(f64),
    #[error("pixel size {size} m exceeds the area extent {extent} m")]
    TooLarge { size: f64, extent: f64 },
}

/// Regular pixel grid over the area. Pixel `(ix, iy)` has index `iy·nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    pub pixel_size_m: f64,
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    pub centers: Vec<Point>,
    /// Pixels whose center lies strictly inside an obstacle.
    pub excluded: Vec<bool>,
}

/// Tiles the area with square pixels; a trailing partial row/column is dropped.
pub fn build_pixel_grid(scenario: &Scenario, pixel_size_m: f64) -> Result<PixelGrid, GridError> {
    if !(pixel_size_m > 0.0) {
        return Err(GridError::NonPositive(pixel_size_m));
    }
    let b = scenario.bounds();
    let extent = b.width().min(b.height());
    if pixel_size_m > extent {
        return Err(GridError::TooLarge {
            size: pixel_size_m,
            extent,
        });
    }
    // tolerate float noise when the extent is an exact multiple
    let nx = (b.width() / pixel_size_m + 1e-9).floor() as usize;
    let ny = (b.height() / pixel_size_m + 1e-9).floor() as usize;
    let mut centers = Vec::with_capacity(nx * ny);
    let mut excluded = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = Point::new(
                b.x_min + (ix as f64 + 0.5) * pixel_size_m,
                b.y_min + (iy as f64 + 0.5) * pixel_size_m,
            );
            excluded.push(scenario.obstacles.iter().any(|o| o.contains_strictly(&c)));
            centers.push(c);
        }
    }
    Ok(PixelGrid {
        pixel_size_m,
        origin: Point::new(b.x_min, b.y_min),
        nx,
        ny,
        centers,
        excluded,
    })
}

impl PixelGrid {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Cell holding `p`; points on or beyond the last edge map to the last cell.
    pub fn cell_of(&self, p: &Point) -> (i64, i64) {
        let fx = ((p.x - self.origin.x) / self.pixel_size_m).floor() as i64;
        let fy = ((p.y - self.origin.y) / self.pixel_size_m).floor() as i64;
        (
            fx.clamp(0, self.nx as i64 - 1),
            fy.clamp(0, self.ny as i64 - 1),
        )
    }

    pub fn index(&self, ix: i64, iy: i64) -> usize {
        iy as usize * self.nx + ix as usize
    }

    pub fn is_obstacle(&self, ix: i64, iy: i64) -> bool {
        self.excluded[self.index(ix, iy)]
    }

    pub fn has_obstacles(&self) -> bool {
        self.excluded.iter().any(|&e| e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario {
            name: "t".into(),
            area: AreaSection {
                x_min: 0.0,
                x_max: 500.0,
                y_min: 0.0,
                y_max: 500.0,
                central_office: None,
                rng_seed: 1,
                pixel_size_m: 10.0,
            },
            subareas: vec![Subarea {
                region: Rect::new(0.0, 500.0, 0.0, 500.0),
                holes: vec![Rect::new(200.0, 300.0, 200.0, 300.0)],
                lambda: None,
                user_count: Some(600),
                demand_bps: None,
            }],
            obstacles: vec![],
            faps: vec![],
            radio: RadioParams::default(),
            capacity: CapacityParams::default(),
            costs: CostParams::default(),
            ga: GaParams::default(),
        }
    }

    #[test]
    fn subarea_outside_bounds_is_rejected() {
        let mut s = base();
        s.subareas[0].region = Rect::new(0.0, 600.0, 0.0, 500.0);
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
    }

    #[test]
    fn overlapping_subareas_are_rejected_unless_carved_out() {
        let mut s = base();
        s.subareas.push(Subarea {
            region: Rect::new(200.0, 300.0, 200.0, 300.0),
            holes: vec![],
            lambda: Some(15384.0),
            user_count: None,
            demand_bps: None,
        });
        assert!(s.validate().is_ok());
        s.subareas[1].region = Rect::new(150.0, 300.0, 200.0, 300.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn empty_obstacles_and_faps_are_valid() {
        let s = base();
        s.validate().unwrap();
        assert!(!s.blockage_available());
        assert!(!s.has_fiber_planning());
        assert_eq!(s.central_office(), Point::new(250.0, 250.0));
    }

    #[test]
    fn parameter_invariants() {
        let mut s = base();
        s.radio.tau = 1.5;
        assert!(s.validate().is_err());
        let mut s = base();
        s.capacity.delta_cov = 0.0;
        assert!(s.validate().is_err());
        let mut s = base();
        s.costs.splitter_capacity = 0;
        assert!(s.validate().is_err());
        let mut s = base();
        s.faps.push(Point::new(-1.0, 3.0));
        assert!(s.validate().is_err());
    }

    #[test]
    fn fixed_count_sampling_is_exact_and_contained() {
        let s = base();
        for seed in 0..5 {
            let u = sample_users(&s, seed);
            assert_eq!(u.len(), 600);
            assert!(u.positions.iter().all(|p| s.subareas[0].contains(p)));
            assert!(u.demands.iter().all(|&d| d == 180.0e6));
        }
        assert_eq!(sample_users(&s, 9), sample_users(&s, 9));
    }

    #[test]
    fn zero_density_gives_no_users() {
        let mut s = base();
        s.subareas[0].user_count = None;
        s.subareas[0].lambda = Some(0.0);
        assert!(sample_users(&s, 3).is_empty());
    }

    #[test]
    fn users_avoid_obstacles() {
        let mut s = base();
        s.obstacles.push(Rect::new(0.0, 200.0, 0.0, 500.0));
        let u = sample_users(&s, 4);
        assert!(u.positions.iter().all(|p| p.x >= 200.0));
    }

    #[test]
    fn grid_counts_and_exclusion() {
        let mut s = base();
        let g = build_pixel_grid(&s, 10.0).unwrap();
        assert_eq!(g.len(), 2500);
        assert!(!g.has_obstacles());
        s.obstacles.push(Rect::new(100.0, 120.0, 100.0, 120.0));
        let g = build_pixel_grid(&s, 10.0).unwrap();
        assert_eq!(g.excluded.iter().filter(|&&e| e).count(), 4);
        let (ix, iy) = g.cell_of(&Point::new(105.0, 115.0));
        assert!(g.is_obstacle(ix, iy));
        // partial trailing pixels are dropped
        let g = build_pixel_grid(&s, 30.0).unwrap();
        assert_eq!((g.nx, g.ny), (16, 16));
        assert!(matches!(
            build_pixel_grid(&s, 600.0),
            Err(GridError::TooLarge { .. })
        ));
    }

    #[test]
    fn rescaling_users() {
        let s = base().with_user_total(200);
        assert_eq!(s.subareas[0].user_count, Some(200));
    }
}

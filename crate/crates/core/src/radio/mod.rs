//! Link-level physics: path loss, LOS probability, thermal noise, access and
//! self-backhaul SINR, and the probability that a link clears its detection
//! threshold under lognormal shadowing.

mod los;

pub use los::{bresenham_cells, line_of_sight};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::scenario::{RadioParams, StatePair};
use crate::units::{db_to_lin, lin_to_db, watts_to_dbm};

/// Thermal noise density (dBm/Hz).
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkState {
    Los,
    Nlos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Access,
    Backhaul,
}

impl StatePair {
    pub fn get(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.los,
            LinkState::Nlos => self.nlos,
        }
    }
}

impl RadioParams {
    pub fn beta(&self, kind: LinkKind) -> StatePair {
        match kind {
            LinkKind::Access => self.beta.access,
            LinkKind::Backhaul => self.beta.backhaul,
        }
    }

    pub fn sigma(&self, kind: LinkKind) -> StatePair {
        match kind {
            LinkKind::Access => self.sigma_db.access,
            LinkKind::Backhaul => self.sigma_db.backhaul,
        }
    }

    pub fn gamma_th_db(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Access => self.gamma_th_access_db,
            LinkKind::Backhaul => self.gamma_th_backhaul_db,
        }
    }

    pub fn rho_th(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Access => self.rho_th_access,
            LinkKind::Backhaul => self.rho_th_backhaul,
        }
    }

    pub fn noise_w(&self) -> f64 {
        crate::units::dbm_to_watts(noise_power_dbm(self.noise_bandwidth_hz, self.noise_figure_db))
    }
}

/// Path loss in dB. Distances below 1 m are clamped to 1 m.
pub fn path_loss_db(
    radio: &RadioParams,
    distance_m: f64,
    state: LinkState,
    kind: LinkKind,
    shadowing_db: f64,
) -> f64 {
    let d = distance_m.max(1.0);
    radio.alpha_db + 10.0 * radio.beta(kind).get(state) * d.log10() + shadowing_db
}

/// Probability that a link of length `distance_m` is LOS.
pub fn p_los(distance_m: f64, a_los: f64) -> f64 {
    (-a_los * distance_m.max(0.0)).exp()
}

pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + lin_to_db(bandwidth_hz) + noise_figure_db
}

/// Standard normal upper tail.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Everything needed to evaluate one link's SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub distance_m: f64,
    pub kind: LinkKind,
    pub state: LinkState,
    /// `τ·P_a` on backhaul links, zero on access links.
    pub self_interference_w: f64,
    pub external_interference_w: f64,
}

impl LinkBudget {
    /// Access link from a BS to a user.
    pub fn access(radio: &RadioParams, distance_m: f64, state: LinkState) -> Self {
        Self {
            tx_power_w: radio.p_a_w,
            tx_gain_dbi: radio.ag_bs_access_dbi,
            rx_gain_dbi: radio.ag_ue_dbi,
            distance_m,
            kind: LinkKind::Access,
            state,
            self_interference_w: 0.0,
            external_interference_w: 0.0,
        }
    }

    /// IBFD backhaul link from a W-BS to a U-BS.
    pub fn backhaul(radio: &RadioParams, distance_m: f64, state: LinkState) -> Self {
        Self {
            tx_power_w: radio.p_b_w,
            tx_gain_dbi: radio.ag_bs_backhaul_dbi,
            rx_gain_dbi: radio.ag_bs_backhaul_dbi,
            distance_m,
            kind: LinkKind::Backhaul,
            state,
            self_interference_w: radio.tau * radio.p_a_w,
            external_interference_w: 0.0,
        }
    }

    pub fn with_interference(mut self, interference_w: f64) -> Self {
        self.external_interference_w = interference_w;
        self
    }

    fn received_w(&self, radio: &RadioParams) -> f64 {
        let pl = path_loss_db(radio, self.distance_m, self.state, self.kind, 0.0);
        self.tx_power_w * db_to_lin(self.tx_gain_dbi + self.rx_gain_dbi - pl)
    }
}

/// Linear SINR of a BS→user link.
pub fn sinr_access_linear(radio: &RadioParams, budget: &LinkBudget, noise_w: f64) -> f64 {
    debug_assert_eq!(budget.kind, LinkKind::Access);
    budget.received_w(radio) / (noise_w + budget.external_interference_w)
}

/// Linear SINR of a W-BS→U-BS link, including residual self-interference.
pub fn sinr_backhaul_linear(radio: &RadioParams, budget: &LinkBudget, noise_w: f64) -> f64 {
    debug_assert_eq!(budget.kind, LinkKind::Backhaul);
    budget.received_w(radio)
        / (noise_w + budget.self_interference_w + budget.external_interference_w)
}

/// Mean (shadowing-free) SINR of a link under both channel states, with the
/// LOS probability that mixes them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSinr {
    pub p_los: f64,
    pub los_db: f64,
    pub nlos_db: f64,
}

impl MeanSinr {
    /// Deterministic mixture-mean SINR in dB, used for rates and reporting.
    pub fn mixture_db(&self) -> f64 {
        if self.p_los <= 0.0 {
            return self.nlos_db;
        }
        self.p_los * self.los_db + (1.0 - self.p_los) * self.nlos_db
    }

    pub fn mixture_linear(&self) -> f64 {
        db_to_lin(self.mixture_db())
    }

    /// `P(Γ ≥ γ_th)` over the LOS/NLOS mixture with lognormal shadowing.
    pub fn coverage_probability(&self, gamma_th_db: f64, sigma: StatePair) -> f64 {
        let tail = |mean: f64, s: f64| {
            if s > 0.0 {
                q_function((gamma_th_db - mean) / s)
            } else if mean >= gamma_th_db {
                1.0
            } else {
                0.0
            }
        };
        let nlos = tail(self.nlos_db, sigma.nlos);
        if self.p_los <= 0.0 {
            return nlos;
        }
        self.p_los * tail(self.los_db, sigma.los) + (1.0 - self.p_los) * nlos
    }
}

/// Builds mean SINRs for one link kind; caches the constant part of the budget.
#[derive(Debug, Clone)]
pub struct LinkModel {
    kind: LinkKind,
    alpha_db: f64,
    beta: StatePair,
    a_los: f64,
    /// Transmit power plus both antenna gains (dBm).
    eirp_rx_dbm: f64,
    /// Noise plus self-interference (W).
    floor_w: f64,
}

impl LinkModel {
    pub fn new(radio: &RadioParams, kind: LinkKind) -> Self {
        let budget = match kind {
            LinkKind::Access => LinkBudget::access(radio, 1.0, LinkState::Los),
            LinkKind::Backhaul => LinkBudget::backhaul(radio, 1.0, LinkState::Los),
        };
        Self {
            kind,
            alpha_db: radio.alpha_db,
            beta: radio.beta(kind),
            a_los: radio.a_los,
            eirp_rx_dbm: watts_to_dbm(budget.tx_power_w) + budget.tx_gain_dbi + budget.rx_gain_dbi,
            floor_w: radio.noise_w() + budget.self_interference_w,
        }
    }

    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    /// Mean SINR at `distance_m`. `blocked` forces the NLOS state.
    pub fn mean_sinr(&self, distance_m: f64, blocked: bool, interference_w: f64) -> MeanSinr {
        let log_d = distance_m.max(1.0).log10();
        let denom_dbm = watts_to_dbm(self.floor_w + interference_w);
        let base = self.eirp_rx_dbm - self.alpha_db - denom_dbm;
        MeanSinr {
            p_los: if blocked { 0.0 } else { p_los(distance_m, self.a_los) },
            los_db: base - 10.0 * self.beta.los * log_d,
            nlos_db: base - 10.0 * self.beta.nlos * log_d,
        }
    }
}

/// Received power (W) of an interfering transmitter, with side-lobe gain at
/// both ends and the path loss taken at its LOS/NLOS mixture mean in dB.
pub fn interference_power_w(
    radio: &RadioParams,
    tx_power_w: f64,
    distance_m: f64,
    blocked: bool,
) -> f64 {
    let kind = LinkKind::Access;
    let pl_nlos = path_loss_db(radio, distance_m, LinkState::Nlos, kind, 0.0);
    let pl = if blocked {
        pl_nlos
    } else {
        let p = p_los(distance_m, radio.a_los);
        p * path_loss_db(radio, distance_m, LinkState::Los, kind, 0.0) + (1.0 - p) * pl_nlos
    };
    tx_power_w * db_to_lin(2.0 * radio.side_lobe_gain_dbi - pl)
}

/// Monte Carlo estimate of `P(Γ ≥ γ_th)` by sampling the channel state and
/// the shadowing term. Used to cross-check the closed form.
pub fn monte_carlo_coverage<R: Rng>(
    mean: &MeanSinr,
    gamma_th_db: f64,
    sigma: StatePair,
    draws: usize,
    rng: &mut R,
) -> f64 {
    let los = Normal::new(0.0, sigma.los).expect("sigma must be finite and >= 0");
    let nlos = Normal::new(0.0, sigma.nlos).expect("sigma must be finite and >= 0");
    let mut hits = 0usize;
    for _ in 0..draws {
        let is_los = rng.random::<f64>() < mean.p_los;
        let sinr_db = if is_los {
            mean.los_db - los.sample(rng)
        } else {
            mean.nlos_db - nlos.sample(rng)
        };
        if sinr_db >= gamma_th_db {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

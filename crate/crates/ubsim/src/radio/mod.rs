//! Monte-Carlo link-budget engine: propagation, link budget arithmetic,
//! the CQI spectral-efficiency table, and capacity lookup construction.

pub mod lookup;
pub mod propagation;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::Generation;
use crate::country::Geotype;
use crate::error::Result;

pub use lookup::{
    build_lookup, default_isd_grid, read_lookup_csv, required_site_density,
    simulate_capacity_lookup, site_density_from_isd, write_lookup_csv, BandDiagnostic,
    CapacityLookup, LookupRow, LookupSettings,
};

/// Boltzmann's constant, J/K.
pub const BOLTZMANN: f64 = 1.38e-23;
/// Reference temperature, K.
pub const TEMPERATURE_K: f64 = 290.0;

/// Link budget parameters. Defaults are the baseline simulation values:
/// 40 dBm transmit power, 16 dB antenna gain, three sectors, 30 m mast,
/// 1.5 m receiver, 50% indoor probability, 500 m line-of-sight cutoff,
/// log-normal building penetration of mean 12 dB and sigma 8 dB.
#[derive(Debug, Clone)]
pub struct LinkBudgetParams {
    pub tx_power_dbm: f64,
    pub tx_gain_db: f64,
    pub tx_losses_db: f64,
    pub rx_gain_db: f64,
    pub rx_losses_db: f64,
    pub noise_figure_db: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub sectors: u32,
    pub indoor_probability: f64,
    pub los_cutoff_m: f64,
    pub penetration_mu_db: f64,
    pub penetration_sigma_db: f64,
    /// When set, replaces the per-environment shadow-fading sigma
    /// (0 disables shadow fading entirely).
    pub shadow_sigma_override: Option<f64>,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        LinkBudgetParams {
            tx_power_dbm: 40.0,
            tx_gain_db: 16.0,
            tx_losses_db: 1.0,
            rx_gain_db: 0.0,
            rx_losses_db: 4.0,
            noise_figure_db: 1.5,
            tx_height_m: 30.0,
            rx_height_m: 1.5,
            sectors: 3,
            indoor_probability: 0.5,
            los_cutoff_m: 500.0,
            penetration_mu_db: 12.0,
            penetration_sigma_db: 8.0,
            shadow_sigma_override: None,
        }
    }
}

impl LinkBudgetParams {
    pub fn shadow_sigma(&self, geotype: Geotype, freq_mhz: f64, d_m: f64, los: bool) -> f64 {
        self.shadow_sigma_override.unwrap_or_else(|| {
            propagation::shadow_sigma_db(
                geotype,
                freq_mhz,
                d_m,
                self.tx_height_m,
                self.rx_height_m,
                los,
            )
        })
    }
}

/// Stochastic path loss for one link: the TR 38.901 median term, a
/// log-normal shadow-fading draw with the per-environment sigma, and a
/// log-normal building-penetration draw applied with the indoor
/// probability.
pub fn path_loss(
    freq_mhz: f64,
    distance_m: f64,
    geotype: Geotype,
    los: bool,
    rng: &mut impl Rng,
    params: &LinkBudgetParams,
) -> Result<f64> {
    let median = propagation::median_path_loss_db(
        geotype,
        freq_mhz,
        distance_m,
        params.tx_height_m,
        params.rx_height_m,
        los,
    )?;
    let sigma = params.shadow_sigma(geotype, freq_mhz, distance_m, los);
    let shadow = if sigma > 0.0 {
        Normal::new(0.0, sigma).unwrap().sample(rng)
    } else {
        0.0
    };
    let indoor = rng.random::<f64>() < params.indoor_probability;
    let penetration = if indoor {
        Normal::new(params.penetration_mu_db, params.penetration_sigma_db)
            .unwrap()
            .sample(rng)
    } else {
        0.0
    };
    Ok(median + shadow + penetration)
}

/// Received power at the user: EIRP minus path loss plus receiver
/// gain/losses.
pub fn received_power_dbm(params: &LinkBudgetParams, path_loss_db: f64) -> f64 {
    params.tx_power_dbm + params.tx_gain_db - params.tx_losses_db - path_loss_db
        + params.rx_gain_db
        - params.rx_losses_db
}

/// Thermal noise over a bandwidth: 10 log10(k·T·1000) + NF + 10 log10(BW).
pub fn noise_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    debug_assert!(bandwidth_hz > 0.0);
    10.0 * (BOLTZMANN * TEMPERATURE_K * 1000.0).log10()
        + noise_figure_db
        + 10.0 * bandwidth_hz.log10()
}

/// Signal-to-interference-plus-noise ratio in dB, computed in linear
/// milliwatts.
pub fn sinr_db(signal_dbm: f64, interferers_dbm: &[f64], noise_dbm: f64) -> f64 {
    let to_mw = |dbm: f64| 10f64.powf(dbm / 10.0);
    let interference: f64 = interferers_dbm.iter().map(|&i| to_mw(i)).sum();
    10.0 * (to_mw(signal_dbm) / (interference + to_mw(noise_dbm))).log10()
}

/// CQI table: SINR threshold (dB), 4G spectral efficiency (MIMO 2x2)
/// and 5G spectral efficiency (MIMO 4x4), bits/Hz.
pub const SE_TABLE: [(f64, f64, f64); 15] = [
    (-6.7, 0.3, 0.15),
    (-4.7, 0.46, 1.02),
    (-2.3, 0.74, 2.21),
    (0.2, 1.2, 3.2),
    (2.4, 1.6, 4.0),
    (4.3, 2.2, 5.41),
    (5.9, 2.8, 6.2),
    (8.1, 3.8, 8.0),
    (10.3, 4.8, 9.5),
    (11.7, 5.4, 11.0),
    (14.1, 6.6, 14.0),
    (16.3, 7.8, 16.0),
    (18.7, 9.0, 19.0),
    (21.0, 10.2, 22.0),
    (22.7, 11.4, 25.0),
];

/// Spectral efficiency achieved at a SINR: the highest CQI row whose
/// threshold is not above the input. Below CQI 1 the link is in outage
/// and carries nothing; at or above CQI 15 the top rate applies.
pub fn se_from_sinr(sinr_db: f64, generation: Generation) -> f64 {
    let mut se = 0.0;
    for &(threshold, se_4g, se_5g) in SE_TABLE.iter() {
        if sinr_db >= threshold {
            se = match generation {
                Generation::FourG => se_4g,
                Generation::FiveGNsa => se_5g,
            };
        } else {
            break;
        }
    }
    se
}

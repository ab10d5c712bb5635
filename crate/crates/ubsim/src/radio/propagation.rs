//! TR 38.901 path-loss models: UMa for urban and suburban areas, RMa
//! for rural. Valid for carrier frequencies of 0.5-100 GHz.
//!
//! The standard tabulates each model up to 5 km (UMa) or 10 km (RMa)
//! 2-D distance; beyond that the final distance branch is extrapolated,
//! which is the usual practice for wide-area assessment. Distances
//! below the 10 m validity floor are clamped to 10 m.

use crate::country::Geotype;
use crate::error::{ModelError, Result};

const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Average building height (m) and street width (m) for RMa.
const RMA_BUILDING_HEIGHT_M: f64 = 5.0;
const RMA_STREET_WIDTH_M: f64 = 20.0;
/// UMa effective environment height (m), valid for UE heights <= 13 m.
const UMA_EFFECTIVE_ENV_HEIGHT_M: f64 = 1.0;

fn validate(freq_mhz: f64, d2d_m: f64) -> Result<()> {
    if !(500.0..=100_000.0).contains(&freq_mhz) {
        return Err(ModelError::FrequencyRange(freq_mhz));
    }
    if d2d_m <= 0.0 || !d2d_m.is_finite() {
        return Err(ModelError::DistanceRange(d2d_m));
    }
    Ok(())
}

fn d3d(d2d_m: f64, tx_h_m: f64, rx_h_m: f64) -> f64 {
    (d2d_m * d2d_m + (tx_h_m - rx_h_m).powi(2)).sqrt()
}

/// UMa LOS breakpoint distance, m. Uses effective antenna heights with
/// an environment height of 1 m.
fn uma_breakpoint_m(freq_hz: f64, tx_h_m: f64, rx_h_m: f64) -> f64 {
    let h_bs = (tx_h_m - UMA_EFFECTIVE_ENV_HEIGHT_M).max(0.0);
    let h_ut = (rx_h_m - UMA_EFFECTIVE_ENV_HEIGHT_M).max(0.0);
    4.0 * h_bs * h_ut * freq_hz / SPEED_OF_LIGHT
}

/// RMa LOS breakpoint distance, m (full antenna heights).
fn rma_breakpoint_m(freq_hz: f64, tx_h_m: f64, rx_h_m: f64) -> f64 {
    2.0 * std::f64::consts::PI * tx_h_m * rx_h_m * freq_hz / SPEED_OF_LIGHT
}

fn uma_los(fc_ghz: f64, d2d_m: f64, d3d_m: f64, bp_m: f64, tx_h_m: f64, rx_h_m: f64) -> f64 {
    if d2d_m <= bp_m {
        28.0 + 22.0 * d3d_m.log10() + 20.0 * fc_ghz.log10()
    } else {
        28.0 + 40.0 * d3d_m.log10() + 20.0 * fc_ghz.log10()
            - 9.0 * (bp_m.powi(2) + (tx_h_m - rx_h_m).powi(2)).log10()
    }
}

fn uma_nlos(fc_ghz: f64, d3d_m: f64, rx_h_m: f64) -> f64 {
    13.54 + 39.08 * d3d_m.log10() + 20.0 * fc_ghz.log10() - 0.6 * (rx_h_m - 1.5)
}

fn rma_los(fc_ghz: f64, d3d_m: f64, bp_m: f64) -> f64 {
    let h = RMA_BUILDING_HEIGHT_M;
    let pl1 = |d: f64| {
        20.0 * (40.0 * std::f64::consts::PI * d * fc_ghz / 3.0).log10()
            + (0.03 * h.powf(1.72)).min(10.0) * d.log10()
            - (0.044 * h.powf(1.72)).min(14.77)
            + 0.002 * h.log10() * d
    };
    if d3d_m <= bp_m {
        pl1(d3d_m)
    } else {
        pl1(bp_m) + 40.0 * (d3d_m / bp_m).log10()
    }
}

fn rma_nlos(fc_ghz: f64, d3d_m: f64, tx_h_m: f64, rx_h_m: f64) -> f64 {
    let h = RMA_BUILDING_HEIGHT_M;
    let w = RMA_STREET_WIDTH_M;
    161.04 - 7.1 * w.log10() + 7.5 * h.log10()
        - (24.37 - 3.7 * (h / tx_h_m).powi(2)) * tx_h_m.log10()
        + (43.42 - 3.1 * tx_h_m.log10()) * (d3d_m.log10() - 3.0)
        + 20.0 * fc_ghz.log10()
        - (3.2 * (11.75 * rx_h_m).log10().powi(2) - 4.97)
}

/// Median (deterministic) path loss in dB for the mapped environment.
/// NLOS values are floored at the LOS loss, as the standard requires.
pub fn median_path_loss_db(
    geotype: Geotype,
    freq_mhz: f64,
    distance_m: f64,
    tx_h_m: f64,
    rx_h_m: f64,
    los: bool,
) -> Result<f64> {
    validate(freq_mhz, distance_m)?;
    let d2d = distance_m.max(10.0);
    let d3 = d3d(d2d, tx_h_m, rx_h_m);
    let fc_ghz = freq_mhz / 1000.0;
    let freq_hz = freq_mhz * 1e6;

    let pl = match geotype {
        Geotype::Urban | Geotype::Suburban => {
            let bp = uma_breakpoint_m(freq_hz, tx_h_m, rx_h_m);
            let los_pl = uma_los(fc_ghz, d2d, d3, bp, tx_h_m, rx_h_m);
            if los {
                los_pl
            } else {
                los_pl.max(uma_nlos(fc_ghz, d3, rx_h_m))
            }
        }
        Geotype::Rural => {
            let bp = rma_breakpoint_m(freq_hz, tx_h_m, rx_h_m);
            let los_pl = rma_los(fc_ghz, d3, bp);
            if los {
                los_pl
            } else {
                los_pl.max(rma_nlos(fc_ghz, d3, tx_h_m, rx_h_m))
            }
        }
    };
    Ok(pl)
}

/// Shadow-fading standard deviation in dB for the environment and
/// propagation state (TR 38.901 table values; RMa LOS switches from 4
/// to 6 dB past the breakpoint).
pub fn shadow_sigma_db(
    geotype: Geotype,
    freq_mhz: f64,
    distance_m: f64,
    tx_h_m: f64,
    rx_h_m: f64,
    los: bool,
) -> f64 {
    match (geotype, los) {
        (Geotype::Urban | Geotype::Suburban, true) => 4.0,
        (Geotype::Urban | Geotype::Suburban, false) => 6.0,
        (Geotype::Rural, true) => {
            let bp = rma_breakpoint_m(freq_mhz * 1e6, tx_h_m, rx_h_m);
            if distance_m.max(10.0) <= bp {
                4.0
            } else {
                6.0
            }
        }
        (Geotype::Rural, false) => 8.0,
    }
}

//! Demand estimation: smartphone users, revenue density and traffic
//! density per area and study year, plus NPV discounting.
//!
//! Users are real-valued throughout; areas are statistical aggregates,
//! not enumerations of people.

use crate::config::{ModelConfig, Scenario};
use crate::country::{LocalArea, RegionRecord};
use crate::error::{ModelError, Result};

/// Consumption tier assigned from nightlight luminosity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArpuTier {
    Low,
    Mid,
    High,
}

impl std::fmt::Display for ArpuTier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArpuTier::Low => write!(f, "low"),
            ArpuTier::Mid => write!(f, "mid"),
            ArpuTier::High => write!(f, "high"),
        }
    }
}

/// Demand state of one area in one study year.
#[derive(Debug, Clone)]
pub struct DemandPoint {
    pub area_id: String,
    pub year: u32,
    pub sp_users: f64,
    pub cell_users: f64,
    /// $/km²/year.
    pub revenue_usd_km2: f64,
    /// Mbps/km².
    pub traffic_mbps_km2: f64,
    pub arpu_tier: ArpuTier,
}

/// Smartphone users addressable by one operator:
/// population · cellpen · sppen / networks.
pub fn smartphone_users(population: f64, cellpen: f64, sppen: f64, networks: u32) -> f64 {
    population * cellpen * sppen / networks as f64
}

/// Total cellular users addressable by one operator.
pub fn cellular_users(population: f64, cellpen: f64, networks: u32) -> f64 {
    population * cellpen / networks as f64
}

/// Luminosity above 3 DN marks the high tier, below 1 DN the low tier,
/// anything between the middle tier.
pub fn arpu_tier_from_luminosity(dn: f64) -> Result<ArpuTier> {
    if !(0.0..=64.0).contains(&dn) {
        return Err(ModelError::Invariant(format!(
            "luminosity_dn in [0, 64] (got {dn})"
        )));
    }
    Ok(if dn > 3.0 {
        ArpuTier::High
    } else if dn < 1.0 {
        ArpuTier::Low
    } else {
        ArpuTier::Mid
    })
}

/// Annualized revenue per km²: both smartphone and cell-only users pay
/// the area's tier ARPU; `arpu_monthly` is $/user/month.
pub fn revenue_density(
    sp_users: f64,
    cell_users: f64,
    arpu_monthly: f64,
    area_km2: f64,
) -> f64 {
    debug_assert!(area_km2 > 0.0);
    debug_assert!(cell_users >= sp_users);
    let cell_only = cell_users - sp_users;
    12.0 * (sp_users * arpu_monthly + cell_only * arpu_monthly) / area_km2
}

/// Busy-hour data traffic per km², Mbps: each smartphone user demands
/// the scenario target, derated by the overbooking factor.
pub fn traffic_density(sp_users: f64, target_mbps: f64, obf: f64, area_km2: f64) -> f64 {
    debug_assert!(obf >= 1.0);
    debug_assert!(area_km2 > 0.0);
    (sp_users * target_mbps / obf) / area_km2
}

/// Net present value of a cashflow series indexed from year 0; year 0
/// is undiscounted.
pub fn npv(cashflows: &[f64], rate: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&rate));
    cashflows
        .iter()
        .enumerate()
        .map(|(t, &cf)| cf / (1.0 + rate).powi(t as i32))
        .sum()
}

/// One demand point per study year for an area. The consumption tier is
/// fixed per area from its luminosity.
pub fn demand_series(
    area: &LocalArea,
    region: &RegionRecord,
    config: &ModelConfig,
    scenario: &Scenario,
) -> Result<Vec<DemandPoint>> {
    let tier = arpu_tier_from_luminosity(area.luminosity_dn)?;
    let arpu = region.arpu_for(tier);
    let target = scenario.target_for(area.geotype);
    let mut points = Vec::with_capacity(config.n_study_years());
    for year in config.study_years() {
        let cellpen = region.cellpen(year)?;
        let sppen = region.sppen(year)?;
        let sp_users = smartphone_users(area.population, cellpen, sppen, config.networks);
        let cell_users = cellular_users(area.population, cellpen, config.networks);
        points.push(DemandPoint {
            area_id: area.area_id.clone(),
            year,
            sp_users,
            cell_users,
            revenue_usd_km2: revenue_density(sp_users, cell_users, arpu, area.area_km2),
            traffic_mbps_km2: traffic_density(
                sp_users,
                target,
                config.overbooking_factor,
                area.area_km2,
            ),
            arpu_tier: tier,
        });
    }
    Ok(points)
}

/// NPV of an area's revenue over the study period, $.
pub fn revenue_npv(points: &[DemandPoint], area_km2: f64, discount_rate: f64) -> f64 {
    let flows: Vec<f64> = points.iter().map(|p| p.revenue_usd_km2 * area_km2).collect();
    npv(&flows, discount_rate)
}

//! Synthetic country generator for desk-scale runs.
//!
//! Stands in for the remote-sensing extraction pipeline: populations are
//! drawn from a log-normal plain plus Gaussian city kernels on a square
//! 1 km grid, luminosity correlates with density, and regional records
//! (towers, coverage, ARPU tiers, spectrum prices, penetration ramps)
//! are jittered around realistic values. Everything is a pure function
//! of the seed.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;

use crate::config::ModelConfig;
use crate::country::{BackhaulMix, Country, LocalArea, RegionRecord};
use crate::error::{ModelError, Result};
use crate::rng::stream;

const REGION_TAG: u64 = 0x5267;
const CELL_TAG: u64 = 0x6365;

/// Knobs for the generator. Defaults produce a mid-income country whose
/// densities stay inside the serveable range of the baseline capacity
/// lookup under every scenario. Regions are heterogeneous: each draws an
/// urbanization level that scales its city kernels, wealth, smartphone
/// uptake and fiber share, giving urban telecom zones with dense fiber
/// points of presence and rural zones with long backhaul runs.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub n_regions: u32,
    /// ln-median of the rural density plain, persons/km².
    pub plain_ln_median: f64,
    /// Sigma of the plain's log-normal draw.
    pub plain_sigma: f64,
    /// Regional jitter applied to the plain's ln-median.
    pub regional_sigma: f64,
    /// Urbanization draw range per region; scales everything below.
    pub urbanization_range: (f64, f64),
    /// City kernels per region at full urbanization.
    pub max_kernels_per_region: u32,
    /// Kernel peak density at full urbanization, persons/km².
    pub kernel_peak_max: f64,
    pub kernel_radius_km_range: (f64, f64),
    /// Hard cap on density, persons/km².
    pub max_density: f64,
    /// Population coverage range per region, percent.
    pub coverage_pct_range: (f64, f64),
    /// One existing tower per this many covered people.
    pub people_per_tower: f64,
    /// Mid-tier monthly ARPU range, $.
    pub arpu_mid_range: (f64, f64),
    /// Coverage / capacity spectrum price ranges, $/MHz/capita, scaled
    /// by regional wealth.
    pub spectrum_cov_range: (f64, f64),
    pub spectrum_cap_range: (f64, f64),
    /// Cellular and smartphone penetration ramps over the study period.
    pub cellpen_start: f64,
    pub cellpen_end: f64,
    pub sppen_start: f64,
    pub sppen_end: f64,
    /// Fiber backhaul share at full urbanization; the microwave share
    /// absorbs the remainder of the mix.
    pub fiber_share_max: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_regions: 8,
            plain_ln_median: 25.0f64.ln(),
            plain_sigma: 1.1,
            regional_sigma: 0.5,
            urbanization_range: (0.15, 1.0),
            max_kernels_per_region: 12,
            kernel_peak_max: 380.0,
            kernel_radius_km_range: (1.5, 3.5),
            max_density: 380.0,
            coverage_pct_range: (52.0, 64.0),
            people_per_tower: 85.0,
            arpu_mid_range: (8.0, 11.0),
            spectrum_cov_range: (0.5, 1.6),
            spectrum_cap_range: (0.05, 0.28),
            cellpen_start: 0.60,
            cellpen_end: 0.80,
            sppen_start: 0.25,
            sppen_end: 0.45,
            fiber_share_max: 0.35,
        }
    }
}

/// Geotype and settlement thresholds matched to the synthetic density
/// scale. The paper's segmentation gives no thresholds; these keep a
/// meaningful urban/suburban/rural split below the generator's density
/// cap.
pub fn recommended_config() -> ModelConfig {
    ModelConfig {
        urban_density_threshold: 300.0,
        suburban_density_threshold: 120.0,
        cell_threshold: 120.0,
        settlement_threshold: 1000.0,
        core_pop_threshold: 1500.0,
        ..ModelConfig::default()
    }
}

struct RegionDraw {
    plain_mu: f64,
    kernels: Vec<(f64, f64, f64, f64)>, // (x, y, peak, radius)
    wealth: f64,
    urbanization: f64,
}

fn uniform_in(rng: &mut impl Rng, range: (f64, f64)) -> f64 {
    range.0 + (range.1 - range.0) * rng.random::<f64>()
}

/// Luminosity digital number from density: dark below ~30 persons/km²,
/// rising logarithmically, saturating at 64. Noise keeps the tier
/// boundaries fuzzy, as nightlight data is.
fn luminosity_dn(density: f64, noise: f64) -> f64 {
    let dn = if density > 29.4 {
        0.972 * (density / 29.4).log2()
    } else {
        0.0
    };
    (dn + 0.7 * noise).clamp(0.0, 64.0).round()
}

/// Generate a reproducible synthetic country of `n_areas` 1 km² cells.
pub fn generate_synthetic_country(
    seed: u64,
    n_areas: u32,
    params: &SynthParams,
    config: &ModelConfig,
) -> Result<(Vec<RegionRecord>, Vec<LocalArea>)> {
    if n_areas < 10 {
        return Err(ModelError::Invariant("n_areas >= 10".into()));
    }
    if params.n_regions < 1 {
        return Err(ModelError::Invariant("n_regions >= 1".into()));
    }
    let side = (n_areas as f64).sqrt().ceil() as u32;
    let n_regions = params.n_regions.min(side);
    let region_of = |x: u32| -> usize {
        ((x as u64 * n_regions as u64) / side as u64).min(n_regions as u64 - 1) as usize
    };

    // Per-region structural draws.
    let mut region_draws = Vec::with_capacity(n_regions as usize);
    for r in 0..n_regions {
        let mut rng = stream(seed, &[REGION_TAG, r as u64]);
        let z: f64 = StandardNormal.sample(&mut rng);
        let urbanization = uniform_in(&mut rng, params.urbanization_range);
        // Rural zones have thinner plains as well as fewer cities.
        let plain_mu = params.plain_ln_median
            + (0.25 + 0.75 * urbanization).ln()
            + params.regional_sigma * z;
        let x_lo = (r as f64 / n_regions as f64) * side as f64;
        let x_hi = ((r + 1) as f64 / n_regions as f64) * side as f64;
        let n_kernels = (params.max_kernels_per_region as f64 * urbanization).round() as u32;
        let kernels = (0..n_kernels)
            .map(|_| {
                (
                    uniform_in(&mut rng, (x_lo, x_hi)),
                    uniform_in(&mut rng, (0.0, side as f64)),
                    uniform_in(&mut rng, (0.5, 1.0)) * params.kernel_peak_max * (0.4 + 0.6 * urbanization),
                    uniform_in(&mut rng, params.kernel_radius_km_range),
                )
            })
            .collect();
        // Urban zones are wealthier, as telecom-circle data shows.
        let wealth = (0.75 + 0.5 * urbanization) * uniform_in(&mut rng, (0.9, 1.1));
        region_draws.push(RegionDraw {
            plain_mu,
            kernels,
            wealth,
            urbanization,
        });
    }

    // Cells.
    let mut areas = Vec::with_capacity(n_areas as usize);
    let mut region_pop = vec![0.0f64; n_regions as usize];
    for idx in 0..n_areas {
        let gx = idx % side;
        let gy = idx / side;
        let region = region_of(gx);
        let draw = &region_draws[region];
        let mut rng = stream(seed, &[CELL_TAG, idx as u64]);
        let z_plain: f64 = StandardNormal.sample(&mut rng);
        let z_kernel: f64 = StandardNormal.sample(&mut rng);
        let z_lum: f64 = StandardNormal.sample(&mut rng);

        let (x, y) = (gx as f64, gy as f64);
        let plain = (draw.plain_mu + params.plain_sigma * z_plain).exp();
        let mut kernel_sum = 0.0;
        for &(kx, ky, peak, radius) in &draw.kernels {
            let d2 = (x - kx).powi(2) + (y - ky).powi(2);
            kernel_sum += peak * (-d2 / (2.0 * radius * radius)).exp();
        }
        let density = (plain + kernel_sum * (0.35 * z_kernel).exp()).min(params.max_density);
        let population = density.round().max(0.0);

        let region_id = format!("R{region}");
        let mut area = LocalArea::new(
            &format!("c{idx:06}"),
            &region_id,
            population,
            1.0,
            luminosity_dn(population, z_lum),
            config,
        )?;
        area.x_km = Some(x);
        area.y_km = Some(y);
        areas.push(area);
        region_pop[region] += population;
    }

    // Regional records.
    let mut regions = Vec::with_capacity(n_regions as usize);
    for r in 0..n_regions {
        let mut rng = stream(seed, &[REGION_TAG, r as u64, 1]);
        let wealth = region_draws[r as usize].wealth;
        let urbanization = region_draws[r as usize].urbanization;
        let coverage_pct = uniform_in(&mut rng, params.coverage_pct_range);
        let covered_pop = region_pop[r as usize] * coverage_pct / 100.0;
        let total_towers = ((covered_pop / params.people_per_tower).round() as u32).max(1);

        let arpu_mid = uniform_in(&mut rng, params.arpu_mid_range) * wealth;
        let (cell_jit, sp_jit) = (
            uniform_in(&mut rng, (-0.03, 0.03)),
            uniform_in(&mut rng, (-0.03, 0.03)),
        );
        // Smartphone uptake lags in rural zones.
        let sp_scale = 0.85 + 0.15 * urbanization;
        let mut cellpen_by_year = BTreeMap::new();
        let mut sppen_by_year = BTreeMap::new();
        let n_years = config.n_study_years().max(2) as f64;
        for (i, year) in config.study_years().enumerate() {
            let t = i as f64 / (n_years - 1.0);
            let cp = params.cellpen_start + (params.cellpen_end - params.cellpen_start) * t;
            let sp = params.sppen_start + (params.sppen_end - params.sppen_start) * t;
            cellpen_by_year.insert(year, (cp + cell_jit).clamp(0.0, 1.0));
            sppen_by_year.insert(year, (sp * sp_scale + sp_jit).clamp(0.0, 1.0));
        }

        let fiber = 0.002 + (params.fiber_share_max - 0.002) * urbanization.powi(3);
        let record = RegionRecord {
            region_id: format!("R{r}"),
            total_towers,
            coverage_pct,
            cellpen_by_year,
            sppen_by_year,
            arpu_low: 0.45 * arpu_mid,
            arpu_mid,
            arpu_high: 1.7 * arpu_mid,
            spectrum_price_coverage: uniform_in(&mut rng, params.spectrum_cov_range) * wealth,
            spectrum_price_capacity: uniform_in(&mut rng, params.spectrum_cap_range) * wealth,
            backhaul_mix: BackhaulMix {
                fiber,
                copper: 0.03,
                microwave: 0.95 - fiber,
                satellite: 0.02,
            },
        };
        record.validate(config)?;
        regions.push(record);
    }

    Ok((regions, areas))
}

/// Existing long-distance fiber for a synthetic country: two trunk
/// polylines crossing the grid (the stand-in for digitized network
/// maps). Settlements near them become core nodes.
pub fn synthetic_core_edges(n_areas: u32) -> Vec<Vec<(f64, f64)>> {
    let side = (n_areas as f64).sqrt().ceil();
    vec![
        vec![(0.0, side * 0.35), (side, side * 0.35)],
        vec![(side * 0.55, 0.0), (side * 0.55, side)],
    ]
}

/// Convenience wrapper building a full [`Country`].
pub fn synthetic_country(
    seed: u64,
    n_areas: u32,
    params: &SynthParams,
    config: &ModelConfig,
) -> Result<Country> {
    let (regions, areas) = generate_synthetic_country(seed, n_areas, params, config)?;
    Ok(Country {
        regions,
        areas,
        adjacency: None,
    })
}

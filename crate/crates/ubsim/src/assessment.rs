//! Full-sweep orchestration: population deciles, per-decile network
//! dimensioning, cost vs revenue, cross-subsidization, the viability
//! frontier and the spectrum-price sensitivity grid.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::config::{Generation, ModelConfig, Scenario, Strategy};
use crate::cost::{
    backhaul_cost, cost_stack, discount_capex_opex, site_cost, spectrum_cost, CostBreakdown,
    SiteKind, UnitCosts,
};
use crate::country::Country;
use crate::demand;
use crate::error::{ModelError, Result};
use crate::radio::{required_site_density, CapacityLookup};
use crate::supply::{self, FiberNetwork, SitePortfolio};

/// Outcome for one population decile under one (scenario, strategy).
#[derive(Debug, Clone)]
pub struct DecileResult {
    /// 1 = densest tenth of the population.
    pub decile: u8,
    pub population: f64,
    pub area_km2: f64,
    pub new_sites: u64,
    pub upgraded_sites: u64,
    pub cost: CostBreakdown,
    pub revenue_npv: f64,
    pub cumulative_cost: f64,
    pub cumulative_revenue: f64,
    pub viable: bool,
    pub subsidy_required: f64,
    /// NPV cost per final-year smartphone user.
    pub cost_per_user: f64,
}

/// One row of the spectrum sensitivity sweep.
#[derive(Debug, Clone)]
pub struct SensitivityRow {
    pub scenario: String,
    pub strategy: String,
    pub spectrum_price_scalar: f64,
    pub max_viable_coverage_pct: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SensitivityGrid {
    pub rows: Vec<SensitivityRow>,
}

/// Assign areas to ten equal-population deciles, densest first. Returns
/// 1-based decile labels aligned with the input order. An area belongs
/// to the bin where its cumulative population range starts.
pub fn assign_deciles(areas: &[crate::country::LocalArea]) -> Result<Vec<u8>> {
    let total: f64 = areas.iter().map(|a| a.population).sum();
    if areas.is_empty() || total <= 0.0 {
        return Err(ModelError::EmptyInput("decile assignment".into()));
    }
    let mut order: Vec<usize> = (0..areas.len()).collect();
    order.sort_by(|&a, &b| {
        areas[b]
            .pop_density
            .partial_cmp(&areas[a].pop_density)
            .unwrap()
            .then_with(|| areas[a].area_id.cmp(&areas[b].area_id))
    });
    let mut labels = vec![0u8; areas.len()];
    let mut cum = 0.0;
    for &i in &order {
        let bin = ((cum / total) * 10.0).floor().min(9.0) as u8;
        labels[i] = bin + 1;
        cum += areas[i].population;
    }
    Ok(labels)
}

/// Country with supply-side state resolved: portfolios, fiber design,
/// decile labels and per-region backhaul geometry. Independent of
/// scenario, strategy and spectrum prices.
#[derive(Debug, Clone)]
pub struct PreparedCountry {
    pub country: Country,
    pub portfolios: Vec<SitePortfolio>,
    pub fiber: FiberNetwork,
    pub deciles: Vec<u8>,
    /// Mean site-to-PoP distance per region, km.
    pub backhaul_distance_km: BTreeMap<String, f64>,
    /// Year-0 core+regional fiber capex share per area, $.
    pub core_capex_share: Vec<f64>,
    /// Regions with no reachable core node (fallback backhaul pricing).
    pub isolated_regions: Vec<String>,
}

/// Run the supply pipeline once: tower disaggregation per region,
/// technology and backhaul allocation, settlement extraction, fiber
/// design and decile assignment.
pub fn prepare_country(
    country: Country,
    config: &ModelConfig,
    existing_core_edges: &[Vec<(f64, f64)>],
    unit_costs: &UnitCosts,
) -> Result<PreparedCountry> {
    let deciles = assign_deciles(&country.areas)?;

    // Portfolios are built per region so regional tower totals hold.
    let mut portfolios: Vec<Option<SitePortfolio>> = vec![None; country.areas.len()];
    for region in &country.regions {
        let idx: Vec<usize> = (0..country.areas.len())
            .filter(|&i| country.areas[i].region_id == region.region_id)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let region_areas: Vec<crate::country::LocalArea> =
            idx.iter().map(|&i| country.areas[i].clone()).collect();
        let mix = region.backhaul_mix;
        let built = supply::build_portfolios(
            &region_areas,
            region.total_towers,
            region.coverage_pct,
            [config.gen_share_4g, config.gen_share_3g, config.gen_share_2g],
            [mix.fiber, mix.copper, mix.microwave, mix.satellite],
        )?;
        for (k, &i) in idx.iter().enumerate() {
            portfolios[i] = Some(built[k].clone());
        }
    }
    let portfolios: Vec<SitePortfolio> = portfolios
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ModelError::EmptyInput("site portfolios".into()))?;

    let settlements = supply::build_settlements(
        &country.areas,
        config.cell_threshold,
        config.settlement_threshold,
        country.adjacency.as_deref(),
    );
    let fiber = supply::design_fiber(
        &settlements,
        existing_core_edges,
        config.core_pop_threshold,
        config.core_edge_buffer_km,
    );

    // Region geometry: PoP density gives the mean backhaul distance;
    // new fiber capex is split over areas by population. Fiber points
    // of presence are the connected settlements plus existing sites
    // already on fiber backhaul.
    let mut nodes = fiber.fiber_nodes_by_region();
    for (i, p) in portfolios.iter().enumerate() {
        if p.sites_by_backhaul[0] > 0 {
            *nodes
                .entry(country.areas[i].region_id.clone())
                .or_insert(0) += p.sites_by_backhaul[0];
        }
    }
    let km = fiber.new_km_by_region();
    let mut region_area_km2: BTreeMap<String, f64> = BTreeMap::new();
    let mut region_pop: BTreeMap<String, f64> = BTreeMap::new();
    for a in &country.areas {
        *region_area_km2.entry(a.region_id.clone()).or_insert(0.0) += a.area_km2;
        *region_pop.entry(a.region_id.clone()).or_insert(0.0) += a.population;
    }

    let mut backhaul_distance_km = BTreeMap::new();
    let mut region_core_capex: BTreeMap<String, f64> = BTreeMap::new();
    for region in &country.regions {
        let id = &region.region_id;
        let area = region_area_km2.get(id).copied().unwrap_or(0.0).max(1.0);
        let n = nodes.get(id).copied().unwrap_or(0).max(1);
        let distance = supply::mean_backhaul_distance(n as f64 / area)?;
        backhaul_distance_km.insert(id.clone(), distance);

        let (core_km, regional_km) = km.get(id).copied().unwrap_or((0.0, 0.0));
        // Newly connected settlements become regional nodes; a new core
        // edge lands one core node.
        let new_regional_nodes = fiber
            .new_edges
            .iter()
            .filter(|e| {
                e.kind == supply::EdgeKind::Regional
                    && fiber
                        .settlements
                        .iter()
                        .any(|s| s.settlement_id == e.from_id && &s.region_id == id)
            })
            .count() as f64;
        let new_core_nodes = fiber
            .new_edges
            .iter()
            .filter(|e| {
                e.kind == supply::EdgeKind::Core
                    && fiber
                        .settlements
                        .iter()
                        .any(|s| s.settlement_id == e.from_id && &s.region_id == id)
            })
            .count() as f64;
        let capex = core_km * 1000.0 * unit_costs.core_fiber_m
            + new_core_nodes * unit_costs.core_node
            + regional_km * 1000.0 * unit_costs.regional_fiber_m
            + new_regional_nodes * unit_costs.regional_node;
        region_core_capex.insert(id.clone(), capex);
    }

    let core_capex_share: Vec<f64> = country
        .areas
        .iter()
        .map(|a| {
            let pop = region_pop.get(&a.region_id).copied().unwrap_or(0.0);
            let capex = region_core_capex.get(&a.region_id).copied().unwrap_or(0.0);
            if pop > 0.0 {
                capex * a.population / pop
            } else {
                0.0
            }
        })
        .collect();

    let isolated_regions = fiber.isolated_regions.clone();
    Ok(PreparedCountry {
        country,
        portfolios,
        fiber,
        deciles,
        backhaul_distance_km,
        core_capex_share,
        isolated_regions,
    })
}

/// Dimensioning outcome for one area.
#[derive(Debug, Clone, Copy, Default)]
pub struct AreaDimension {
    pub required_sites: f64,
    pub free_sites: f64,
    pub upgraded_sites: f64,
    pub new_sites: f64,
}

/// Size one area for its peak-year traffic: the required site density
/// comes from the lookup, existing sites are consumed first (4G sites
/// carry the 4G strategy for free; under 5G NSA every active site takes
/// the upgrade bundle), and the shortfall is built greenfield.
pub fn dimension_area(
    peak_traffic_mbps_km2: f64,
    area_km2: f64,
    area_id: &str,
    portfolio: &SitePortfolio,
    generation: Generation,
    rows: &[crate::radio::LookupRow],
) -> Result<AreaDimension> {
    let density = required_site_density(rows, peak_traffic_mbps_km2).map_err(|sig| {
        ModelError::Unserveable {
            area: area_id.to_string(),
            demand_mbps_km2: sig.demand_mbps_km2,
            max_capacity_mbps_km2: sig.max_capacity_mbps_km2,
        }
    })?;
    let required = density * area_km2;
    let existing = portfolio.existing_sites as f64;
    let (free, upgraded) = match generation {
        Generation::FourG => {
            let free = required.min(portfolio.sites_by_generation[0] as f64);
            let upgradable = existing - portfolio.sites_by_generation[0] as f64;
            let upgraded = (required - free).clamp(0.0, upgradable.max(0.0));
            (free, upgraded)
        }
        Generation::FiveGNsa => (0.0, required.min(existing)),
    };
    let new = (required - free - upgraded).max(0.0);
    Ok(AreaDimension {
        required_sites: required,
        free_sites: free,
        upgraded_sites: upgraded,
        new_sites: new,
    })
}

/// Cost/revenue aggregates per decile before the stack percentages and
/// the spectrum scalar are applied. One cell = (scenario, strategy).
#[derive(Debug, Clone)]
pub struct DimensionedCell {
    pub scenario: String,
    pub strategy: Strategy,
    pub population: [f64; 10],
    pub area_km2: [f64; 10],
    pub ran_npv: [f64; 10],
    pub backhaul_npv: [f64; 10],
    pub core_npv: [f64; 10],
    /// Spectrum outlay at scalar 1.0.
    pub spectrum_base: [f64; 10],
    pub revenue_npv: [f64; 10],
    pub new_sites: [f64; 10],
    pub upgraded_sites: [f64; 10],
    pub final_year_sp_users: [f64; 10],
}

/// Dimension every area of the prepared country for one scenario and
/// strategy and aggregate NPV costs per decile.
pub fn dimension_cell(
    scenario: &Scenario,
    strategy: &Strategy,
    prepared: &PreparedCountry,
    config: &ModelConfig,
    lookup: &CapacityLookup,
    costs: &UnitCosts,
) -> Result<DimensionedCell> {
    strategy.validate()?;
    let n_years = config.n_study_years();
    let isolated = &prepared.isolated_regions;

    let mut cell = DimensionedCell {
        scenario: scenario.name.clone(),
        strategy: strategy.clone(),
        population: [0.0; 10],
        area_km2: [0.0; 10],
        ran_npv: [0.0; 10],
        backhaul_npv: [0.0; 10],
        core_npv: [0.0; 10],
        spectrum_base: [0.0; 10],
        revenue_npv: [0.0; 10],
        new_sites: [0.0; 10],
        upgraded_sites: [0.0; 10],
        final_year_sp_users: [0.0; 10],
    };

    for (i, area) in prepared.country.areas.iter().enumerate() {
        let d = (prepared.deciles[i] - 1) as usize;
        let region = prepared
            .country
            .region(&area.region_id)
            .ok_or_else(|| ModelError::DanglingRegion {
                area: area.area_id.clone(),
                region: area.region_id.clone(),
            })?;
        let series = demand::demand_series(area, region, config, scenario)?;
        let peak_traffic = series
            .iter()
            .map(|p| p.traffic_mbps_km2)
            .fold(0.0f64, f64::max);
        let rows = lookup.rows(strategy.generation, area.geotype)?;
        let dim = dimension_area(
            peak_traffic,
            area.area_km2,
            &area.area_id,
            &prepared.portfolios[i],
            strategy.generation,
            rows,
        )?;

        // RAN: capex in year 0, opex every study year.
        let greenfield = site_cost(SiteKind::Greenfield, area.geotype, costs);
        let upgrade = site_cost(SiteKind::Upgrade, area.geotype, costs);
        let ran_capex = dim.new_sites * greenfield.capex + dim.upgraded_sites * upgrade.capex;
        let ran_opex =
            dim.new_sites * greenfield.annual_opex + dim.upgraded_sites * upgrade.annual_opex;
        let ran_npv = discount_capex_opex(
            &[ran_capex],
            &vec![ran_opex; n_years],
            config.discount_rate,
            config.wacc,
        );

        // Backhaul: one link per new or strategy-upgraded site.
        let linked_sites = dim.new_sites + dim.upgraded_sites;
        let distance = prepared
            .backhaul_distance_km
            .get(&area.region_id)
            .copied()
            .unwrap_or(0.0);
        let per_link = if isolated.contains(&area.region_id) {
            costs.wireless_link_large
        } else {
            backhaul_cost(strategy.backhaul, distance, area.geotype, costs)
        };
        let backhaul_npv = discount_capex_opex(
            &[linked_sites * per_link],
            &[],
            config.discount_rate,
            config.wacc,
        );

        // Core/regional fiber share, year-0 capex.
        let core_npv = discount_capex_opex(
            &[prepared.core_capex_share[i]],
            &[],
            config.discount_rate,
            config.wacc,
        );

        // Spectrum: year-0 license outlay, no financing gross-up.
        let spectrum = spectrum_cost(
            &strategy.bands,
            region.spectrum_price_coverage,
            region.spectrum_price_capacity,
            area.population,
            1.0,
        );

        let revenue = demand::revenue_npv(&series, area.area_km2, config.discount_rate);

        cell.population[d] += area.population;
        cell.area_km2[d] += area.area_km2;
        cell.ran_npv[d] += ran_npv;
        cell.backhaul_npv[d] += backhaul_npv;
        cell.core_npv[d] += core_npv;
        cell.spectrum_base[d] += spectrum;
        cell.revenue_npv[d] += revenue;
        cell.new_sites[d] += dim.new_sites;
        cell.upgraded_sites[d] += dim.upgraded_sites;
        cell.final_year_sp_users[d] += series.last().map(|p| p.sp_users).unwrap_or(0.0);
    }
    Ok(cell)
}

/// Apply the cost stack, cross-subsidy and cumulative bookkeeping to a
/// dimensioned cell at one spectrum-price scalar.
pub fn assess_cell(
    cell: &DimensionedCell,
    config: &ModelConfig,
    spectrum_scalar: f64,
) -> Vec<DecileResult> {
    let mut results: Vec<DecileResult> = (0..10)
        .map(|d| {
            let cost = cost_stack(
                cell.ran_npv[d],
                cell.backhaul_npv[d],
                cell.core_npv[d],
                cell.spectrum_base[d] * spectrum_scalar,
                config.admin_pct,
                config.tax_rate_pct,
                config.profit_margin_pct,
                config.tax_base,
            );
            let users = cell.final_year_sp_users[d];
            DecileResult {
                decile: (d + 1) as u8,
                population: cell.population[d],
                area_km2: cell.area_km2[d],
                new_sites: cell.new_sites[d].ceil() as u64,
                upgraded_sites: cell.upgraded_sites[d].ceil() as u64,
                cost_per_user: if users > 0.0 { cost.total / users } else { 0.0 },
                cost,
                revenue_npv: cell.revenue_npv[d],
                cumulative_cost: 0.0,
                cumulative_revenue: 0.0,
                viable: false,
                subsidy_required: 0.0,
            }
        })
        .collect();

    cross_subsidize(&mut results, config.excess_profit_threshold_pct);

    let mut cum_cost = 0.0;
    let mut cum_rev = 0.0;
    for r in results.iter_mut() {
        cum_cost += r.cost.total;
        cum_rev += r.revenue_npv;
        r.cumulative_cost = cum_cost;
        r.cumulative_revenue = cum_rev;
    }
    results
}

/// Reallocate excess profit to unviable deciles. A viable decile's
/// surplus above `threshold_pct` margin over cost enters a pool applied
/// densest-first; what the pool cannot cover remains as the required
/// state subsidy. Sets `viable` and `subsidy_required`.
pub fn cross_subsidize(results: &mut [DecileResult], threshold_pct: f64) {
    let mut pool = 0.0;
    for r in results.iter() {
        if r.revenue_npv >= r.cost.total {
            pool += (r.revenue_npv - r.cost.total * (1.0 + threshold_pct / 100.0)).max(0.0);
        }
    }
    for r in results.iter_mut() {
        if r.revenue_npv >= r.cost.total {
            r.viable = true;
            r.subsidy_required = 0.0;
        } else {
            let shortfall = r.cost.total - r.revenue_npv;
            let transfer = shortfall.min(pool);
            pool -= transfer;
            r.subsidy_required = shortfall - transfer;
            // Covered up to rounding noise counts as covered.
            r.viable = shortfall - transfer <= 1e-9 * r.cost.total.max(1.0);
            if r.viable {
                r.subsidy_required = 0.0;
            }
        }
    }
}

/// Largest prefix of viable deciles, as percent population coverage.
pub fn viability_frontier(results: &[DecileResult]) -> f64 {
    let mut frontier = 0;
    for r in results {
        if r.viable {
            frontier = r.decile;
        } else {
            break;
        }
    }
    frontier as f64 * 10.0
}

/// Run one (scenario, strategy) cell end to end at a spectrum scalar.
pub fn run_assessment(
    scenario: &Scenario,
    strategy: &Strategy,
    prepared: &PreparedCountry,
    config: &ModelConfig,
    lookup: &CapacityLookup,
    costs: &UnitCosts,
    spectrum_scalar: f64,
) -> Result<Vec<DecileResult>> {
    let cell = dimension_cell(scenario, strategy, prepared, config, lookup, costs)?;
    Ok(assess_cell(&cell, config, spectrum_scalar))
}

/// The full sweep: every (scenario, strategy) dimensioned once in
/// parallel, then assessed at each spectrum-price scalar. Returns the
/// baseline (scalar 1.0 or the first scalar) decile tables and the
/// sensitivity grid.
pub fn run_sweep(
    scenarios: &[Scenario],
    strategies: &[Strategy],
    scalars: &[f64],
    prepared: &PreparedCountry,
    config: &ModelConfig,
    lookup: &CapacityLookup,
    costs: &UnitCosts,
) -> Result<(Vec<(String, String, Vec<DecileResult>)>, SensitivityGrid)> {
    for &s in scalars {
        if !(0.0..=1.0).contains(&s) {
            return Err(ModelError::Invariant("spectrum scalars in [0, 1]".into()));
        }
    }
    let combos: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|i| (0..strategies.len()).map(move |j| (i, j)))
        .collect();
    let cells: Result<Vec<DimensionedCell>> = combos
        .par_iter()
        .map(|&(i, j)| {
            dimension_cell(&scenarios[i], &strategies[j], prepared, config, lookup, costs)
        })
        .collect();
    let cells = cells?;

    let baseline_scalar = scalars
        .iter()
        .copied()
        .find(|&s| s == 1.0)
        .unwrap_or_else(|| scalars.first().copied().unwrap_or(1.0));

    let mut decile_tables = Vec::with_capacity(cells.len());
    let mut grid = SensitivityGrid::default();
    for cell in &cells {
        let baseline = assess_cell(cell, config, baseline_scalar);
        decile_tables.push((cell.scenario.clone(), cell.strategy.label(), baseline));
        for &scalar in scalars {
            let results = assess_cell(cell, config, scalar);
            grid.rows.push(SensitivityRow {
                scenario: cell.scenario.clone(),
                strategy: cell.strategy.label(),
                spectrum_price_scalar: scalar,
                max_viable_coverage_pct: viability_frontier(&results),
            });
        }
    }
    Ok((decile_tables, grid))
}

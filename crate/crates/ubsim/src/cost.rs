//! Network costing: per-site component costs, backhaul by distance
//! class, spectrum licensing, the admin/tax/profit stack and NPV
//! discounting with a WACC financing premium on capital expenditure.

use std::path::Path;

use crate::config::{BackhaulFamily, SpectrumBand, TaxBase};
use crate::country::Geotype;
use crate::error::{ModelError, Result};

/// Unit costs in USD. Defaults are the baseline macro-site price book.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCosts {
    pub sector_antenna: f64,
    pub remote_radio_unit: f64,
    pub io_fronthaul: f64,
    pub processing: f64,
    pub io_s1_x2: f64,
    pub control_unit: f64,
    pub cooling_fans: f64,
    pub power_supply: f64,
    pub battery_system: f64,
    pub bbu_cabinet: f64,
    pub tower: f64,
    pub civil_materials: f64,
    pub transportation: f64,
    pub installation: f64,
    pub site_rental_urban: f64,
    pub site_rental_suburban: f64,
    pub site_rental_rural: f64,
    pub router: f64,
    pub wireless_link_small: f64,
    pub wireless_link_medium: f64,
    pub wireless_link_large: f64,
    /// $ per metre of access fiber by geotype.
    pub fiber_urban_m: f64,
    pub fiber_suburban_m: f64,
    pub fiber_rural_m: f64,
    /// $ per metre of regional fiber and per regional node.
    pub regional_fiber_m: f64,
    pub regional_node: f64,
    /// $ per metre of core fiber and per core node.
    pub core_fiber_m: f64,
    pub core_node: f64,
}

impl Default for UnitCosts {
    fn default() -> Self {
        UnitCosts {
            sector_antenna: 1_500.0,
            remote_radio_unit: 3_500.0,
            io_fronthaul: 1_500.0,
            processing: 1_500.0,
            io_s1_x2: 1_500.0,
            control_unit: 2_000.0,
            cooling_fans: 250.0,
            power_supply: 250.0,
            battery_system: 10_000.0,
            bbu_cabinet: 200.0,
            tower: 5_000.0,
            civil_materials: 5_000.0,
            transportation: 5_000.0,
            installation: 5_000.0,
            site_rental_urban: 15_000.0,
            site_rental_suburban: 5_000.0,
            site_rental_rural: 1_000.0,
            router: 2_000.0,
            wireless_link_small: 20_000.0,
            wireless_link_medium: 30_000.0,
            wireless_link_large: 60_000.0,
            fiber_urban_m: 20.0,
            fiber_suburban_m: 10.0,
            fiber_rural_m: 5.0,
            regional_fiber_m: 2.0,
            regional_node: 100_000.0,
            core_fiber_m: 4.0,
            core_node: 50_000.0,
        }
    }
}

impl UnitCosts {
    pub fn site_rental(&self, geotype: Geotype) -> f64 {
        match geotype {
            Geotype::Urban => self.site_rental_urban,
            Geotype::Suburban => self.site_rental_suburban,
            Geotype::Rural => self.site_rental_rural,
        }
    }

    /// Three-sector equipment bundle: everything on the mast and in the
    /// cabinet, including the site router.
    pub fn equipment_bundle(&self) -> f64 {
        3.0 * self.sector_antenna
            + 3.0 * self.remote_radio_unit
            + self.io_fronthaul
            + self.processing
            + self.io_s1_x2
            + self.control_unit
            + self.cooling_fans
            + self.power_supply
            + self.battery_system
            + self.bbu_cabinet
            + self.router
    }

    /// Override defaults from a `component,value` CSV; absent rows keep
    /// their defaults.
    pub fn with_overrides_csv(path: &Path) -> Result<UnitCosts> {
        let mut costs = UnitCosts::default();
        let file_label = path.display().to_string();
        let mut reader = csv::Reader::from_path(path)?;
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let name = record.get(0).map(str::trim).unwrap_or_default().to_string();
            let value: f64 = record
                .get(1)
                .map(str::trim)
                .unwrap_or_default()
                .parse()
                .map_err(|_| ModelError::Schema {
                    file: file_label.clone(),
                    row,
                    column: "value".into(),
                    message: "cannot parse value".into(),
                })?;
            if value < 0.0 {
                return Err(ModelError::Invariant(format!(
                    "unit cost `{name}` must be >= 0"
                )));
            }
            let slot = match name.as_str() {
                "sector_antenna" => &mut costs.sector_antenna,
                "remote_radio_unit" => &mut costs.remote_radio_unit,
                "io_fronthaul" => &mut costs.io_fronthaul,
                "processing" => &mut costs.processing,
                "io_s1_x2" => &mut costs.io_s1_x2,
                "control_unit" => &mut costs.control_unit,
                "cooling_fans" => &mut costs.cooling_fans,
                "power_supply" => &mut costs.power_supply,
                "battery_system" => &mut costs.battery_system,
                "bbu_cabinet" => &mut costs.bbu_cabinet,
                "tower" => &mut costs.tower,
                "civil_materials" => &mut costs.civil_materials,
                "transportation" => &mut costs.transportation,
                "installation" => &mut costs.installation,
                "site_rental_urban" => &mut costs.site_rental_urban,
                "site_rental_suburban" => &mut costs.site_rental_suburban,
                "site_rental_rural" => &mut costs.site_rental_rural,
                "router" => &mut costs.router,
                "wireless_link_small" => &mut costs.wireless_link_small,
                "wireless_link_medium" => &mut costs.wireless_link_medium,
                "wireless_link_large" => &mut costs.wireless_link_large,
                "fiber_urban_m" => &mut costs.fiber_urban_m,
                "fiber_suburban_m" => &mut costs.fiber_suburban_m,
                "fiber_rural_m" => &mut costs.fiber_rural_m,
                "regional_fiber_m" => &mut costs.regional_fiber_m,
                "regional_node" => &mut costs.regional_node,
                "core_fiber_m" => &mut costs.core_fiber_m,
                "core_node" => &mut costs.core_node,
                other => {
                    return Err(ModelError::Schema {
                        file: file_label.clone(),
                        row,
                        column: "component".into(),
                        message: format!("unknown component `{other}`"),
                    })
                }
            };
            *slot = value;
        }
        Ok(costs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    Greenfield,
    Upgrade,
}

/// Capex and annual opex for one site build or upgrade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteCost {
    pub capex: f64,
    pub annual_opex: f64,
}

/// Cost one site. Greenfield builds pay the full equipment bundle plus
/// tower, civil works, transport and installation; upgrades reuse the
/// passive infrastructure and skip tower/civil/transport. Annual opex is
/// the geotype site rental plus 10% of the capital spent, covering site
/// operations; rental applies only to new builds (existing sites already
/// pay it).
pub fn site_cost(kind: SiteKind, geotype: Geotype, costs: &UnitCosts) -> SiteCost {
    let equipment = costs.equipment_bundle();
    match kind {
        SiteKind::Greenfield => {
            let capex = equipment
                + costs.tower
                + costs.civil_materials
                + costs.transportation
                + costs.installation;
            SiteCost {
                capex,
                annual_opex: costs.site_rental(geotype) + 0.10 * capex,
            }
        }
        SiteKind::Upgrade => {
            let capex = equipment + costs.installation;
            SiteCost {
                capex,
                annual_opex: 0.10 * capex,
            }
        }
    }
}

/// Backhaul capex for one site link. Wireless links are sized by
/// distance: under 15 km small, 15-30 km medium, over 30 km large.
/// Fiber is trenched at the geotype rate per metre.
pub fn backhaul_cost(
    family: BackhaulFamily,
    distance_km: f64,
    geotype: Geotype,
    costs: &UnitCosts,
) -> f64 {
    debug_assert!(distance_km >= 0.0);
    match family {
        BackhaulFamily::Wireless => {
            if distance_km < 15.0 {
                costs.wireless_link_small
            } else if distance_km <= 30.0 {
                costs.wireless_link_medium
            } else {
                costs.wireless_link_large
            }
        }
        BackhaulFamily::Fiber => {
            let per_m = match geotype {
                Geotype::Urban => costs.fiber_urban_m,
                Geotype::Suburban => costs.fiber_suburban_m,
                Geotype::Rural => costs.fiber_rural_m,
            };
            distance_km * 1000.0 * per_m
        }
    }
}

/// Spectrum licensing outlay: sum over bands of price x bandwidth x
/// population, with sub-1 GHz bands at the coverage price and the rest
/// at the capacity price. Prices are $/MHz/capita; `price_scalar`
/// implements sensitivity sweeps.
pub fn spectrum_cost(
    bands: &[SpectrumBand],
    coverage_price: f64,
    capacity_price: f64,
    population: f64,
    price_scalar: f64,
) -> f64 {
    debug_assert!(population >= 0.0);
    bands
        .iter()
        .map(|b| {
            let price = if b.is_coverage() {
                coverage_price
            } else {
                capacity_price
            };
            price * price_scalar * b.bandwidth_mhz * population
        })
        .sum()
}

/// Full cost decomposition for one area or decile, all NPV USD.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostBreakdown {
    pub ran: f64,
    pub backhaul: f64,
    pub core: f64,
    pub admin: f64,
    pub spectrum: f64,
    pub tax: f64,
    pub profit: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn network(&self) -> f64 {
        self.ran + self.backhaul + self.core
    }

    /// The decomposition must add up.
    pub fn check_additivity(&self) -> Result<()> {
        let sum = self.network() + self.admin + self.spectrum + self.tax + self.profit;
        let scale = self.total.abs().max(1.0);
        if (sum - self.total).abs() / scale > 1e-6 {
            return Err(ModelError::Invariant(format!(
                "cost breakdown additivity: components {sum} vs total {}",
                self.total
            )));
        }
        Ok(())
    }

    pub fn add(&mut self, other: &CostBreakdown) {
        self.ran += other.ran;
        self.backhaul += other.backhaul;
        self.core += other.core;
        self.admin += other.admin;
        self.spectrum += other.spectrum;
        self.tax += other.tax;
        self.profit += other.profit;
        self.total += other.total;
    }
}

/// Assemble the private cost stack on top of network and spectrum
/// outlays: admin as a fraction of network cost, corporation tax, and
/// the profit margin on network, spectrum and tax.
///
/// With `TaxBase::Profit` the tax and profit equations become mutually
/// dependent (profit includes tax, tax applies to profit); the closed
/// form `tax = t·m·(network + spectrum) / (1 - t·m)` resolves them.
pub fn cost_stack(
    ran: f64,
    backhaul: f64,
    core: f64,
    spectrum: f64,
    admin_pct: f64,
    tax_rate_pct: f64,
    profit_margin_pct: f64,
    tax_base: TaxBase,
) -> CostBreakdown {
    let network = ran + backhaul + core;
    let admin = network * admin_pct;
    let t = tax_rate_pct / 100.0;
    let m = profit_margin_pct / 100.0;
    let tax = match tax_base {
        TaxBase::Network => network * t,
        TaxBase::Profit => t * m * (network + spectrum) / (1.0 - t * m),
    };
    let profit = (network + spectrum + tax) * m;
    let total = network + admin + spectrum + tax + profit;
    CostBreakdown {
        ran,
        backhaul,
        core,
        admin,
        spectrum,
        tax,
        profit,
        total,
    }
}

/// NPV of a capex/opex plan: each year's capex carries a WACC financing
/// premium (capex·(1+wacc)), then all flows discount at the model rate.
pub fn discount_capex_opex(
    capex_by_year: &[f64],
    opex_by_year: &[f64],
    discount_rate: f64,
    wacc: f64,
) -> f64 {
    let years = capex_by_year.len().max(opex_by_year.len());
    let flows: Vec<f64> = (0..years)
        .map(|t| {
            capex_by_year.get(t).copied().unwrap_or(0.0) * (1.0 + wacc)
                + opex_by_year.get(t).copied().unwrap_or(0.0)
        })
        .collect();
    crate::demand::npv(&flows, discount_rate)
}

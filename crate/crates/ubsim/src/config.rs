//! Model configuration: study parameters, scenarios, strategies and
//! spectrum portfolios.
//!
//! The config file format is flat `key=value` text, `#` for comments.
//! Unknown keys are errors so typos cannot silently fall back to
//! defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{ModelError, Result};

/// Which cost Eq. the corporation tax applies to. `Network` taxes the
/// network investment directly; `Profit` taxes the profit margin (the
/// two readings circulate in regulatory practice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaxBase {
    #[default]
    Network,
    Profit,
}

impl FromStr for TaxBase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "network" => Ok(TaxBase::Network),
            "profit" => Ok(TaxBase::Profit),
            other => Err(format!("unknown tax base `{other}` (network|profit)")),
        }
    }
}

/// Global model parameters. Defaults follow the baseline application:
/// 2020-2030 study period, 5% discount rate, 10% WACC, 20% admin,
/// 22% corporation tax, overbooking factor 20, 50% traffic load.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub study_start_year: u32,
    pub study_end_year: u32,
    /// Fraction per year, e.g. 0.05.
    pub discount_rate: f64,
    /// Weighted average cost of capital, fraction per year.
    pub wacc: f64,
    /// MNO administration as a fraction of network cost, e.g. 0.2.
    pub admin_pct: f64,
    /// Corporation tax rate in percent, e.g. 22.0.
    pub tax_rate_pct: f64,
    /// Fair profit margin in percent, e.g. 20.0.
    pub profit_margin_pct: f64,
    /// Profit above this margin (percent) is pooled for cross-subsidy.
    pub excess_profit_threshold_pct: f64,
    /// Overbooking factor; divides per-user capacity targets.
    pub overbooking_factor: f64,
    /// Number of competing operators sharing the user base.
    pub networks: u32,
    /// Fraction of theoretical capacity usable for traffic, percent.
    pub traffic_load_pct: f64,
    /// Percentile of the spectral-efficiency sample distribution used
    /// when building capacity lookups, in (0, 100).
    pub confidence_percentile: f64,
    pub rng_seed: u64,
    pub tax_base: TaxBase,

    /// Areas denser than this are urban (persons/km2).
    pub urban_density_threshold: f64,
    /// Areas denser than this (and not urban) are suburban.
    pub suburban_density_threshold: f64,
    /// Per-region overrides of the two geotype thresholds.
    pub geotype_overrides: BTreeMap<String, (f64, f64)>,

    /// Settlement layer: minimum cell density (persons/km2).
    pub cell_threshold: f64,
    /// Settlement layer: minimum agglomeration population.
    pub settlement_threshold: f64,
    /// Settlements above this population join the fiber network.
    pub core_pop_threshold: f64,
    /// Settlements within this distance of an existing core edge are
    /// treated as already having a core node (km).
    pub core_edge_buffer_km: f64,

    /// National shares of existing sites by generation; densest sites
    /// get the newest generation first. Must sum to 1.
    pub gen_share_4g: f64,
    pub gen_share_3g: f64,
    pub gen_share_2g: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            study_start_year: 2020,
            study_end_year: 2030,
            discount_rate: 0.05,
            wacc: 0.10,
            admin_pct: 0.20,
            tax_rate_pct: 22.0,
            profit_margin_pct: 20.0,
            excess_profit_threshold_pct: 10.0,
            overbooking_factor: 20.0,
            networks: 4,
            traffic_load_pct: 50.0,
            confidence_percentile: 50.0,
            rng_seed: 1,
            tax_base: TaxBase::Network,
            urban_density_threshold: 1500.0,
            suburban_density_threshold: 500.0,
            geotype_overrides: BTreeMap::new(),
            cell_threshold: 500.0,
            settlement_threshold: 1000.0,
            core_pop_threshold: 10_000.0,
            core_edge_buffer_km: 2.0,
            gen_share_4g: 0.55,
            gen_share_3g: 0.28,
            gen_share_2g: 0.17,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.study_end_year <= self.study_start_year {
            return Err(ModelError::Invariant(
                "study_end_year > study_start_year".into(),
            ));
        }
        for (name, v) in [("discount_rate", self.discount_rate), ("wacc", self.wacc)] {
            if !(0.0..1.0).contains(&v) {
                return Err(ModelError::Invariant(format!("{name} in [0, 1)")));
            }
        }
        if self.overbooking_factor < 1.0 {
            return Err(ModelError::Invariant("overbooking_factor >= 1".into()));
        }
        if self.networks < 1 {
            return Err(ModelError::Invariant("networks >= 1".into()));
        }
        if !(self.confidence_percentile > 0.0 && self.confidence_percentile < 100.0) {
            return Err(ModelError::Invariant(
                "confidence_percentile in (0, 100)".into(),
            ));
        }
        for (name, v) in [
            ("admin_pct", self.admin_pct),
            ("tax_rate_pct", self.tax_rate_pct),
            ("profit_margin_pct", self.profit_margin_pct),
            ("excess_profit_threshold_pct", self.excess_profit_threshold_pct),
            ("traffic_load_pct", self.traffic_load_pct),
        ] {
            if v < 0.0 {
                return Err(ModelError::Invariant(format!("{name} >= 0")));
            }
        }
        if self.suburban_density_threshold > self.urban_density_threshold {
            return Err(ModelError::Invariant(
                "suburban_density_threshold <= urban_density_threshold".into(),
            ));
        }
        let share_sum = self.gen_share_4g + self.gen_share_3g + self.gen_share_2g;
        if (share_sum - 1.0).abs() > 1e-9 {
            return Err(ModelError::Invariant(
                "generation shares sum to 1".into(),
            ));
        }
        Ok(())
    }

    /// Inclusive study years, start..=end.
    pub fn study_years(&self) -> impl Iterator<Item = u32> + Clone {
        self.study_start_year..=self.study_end_year
    }

    pub fn n_study_years(&self) -> usize {
        (self.study_end_year - self.study_start_year + 1) as usize
    }

    /// Geotype thresholds for a region, honoring per-region overrides.
    pub fn thresholds_for(&self, region_id: &str) -> (f64, f64) {
        self.geotype_overrides
            .get(region_id)
            .copied()
            .unwrap_or((self.urban_density_threshold, self.suburban_density_threshold))
    }
}

/// Per-user capacity targets by settlement pattern, in Mbps.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub target_mbps_urban: f64,
    pub target_mbps_suburban: f64,
    pub target_mbps_rural: f64,
}

impl Scenario {
    pub fn new(name: &str, urban: f64, suburban: f64, rural: f64) -> Result<Self> {
        let s = Scenario {
            name: name.to_string(),
            target_mbps_urban: urban,
            target_mbps_suburban: suburban,
            target_mbps_rural: rural,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_mbps_rural <= 0.0 {
            return Err(ModelError::Invariant("scenario targets > 0".into()));
        }
        if self.target_mbps_urban < self.target_mbps_suburban
            || self.target_mbps_suburban < self.target_mbps_rural
        {
            return Err(ModelError::Invariant(
                "scenario targets ordered urban >= suburban >= rural".into(),
            ));
        }
        Ok(())
    }

    pub fn target_for(&self, geotype: crate::country::Geotype) -> f64 {
        use crate::country::Geotype::*;
        match geotype {
            Urban => self.target_mbps_urban,
            Suburban => self.target_mbps_suburban,
            Rural => self.target_mbps_rural,
        }
    }

    /// The three baseline scenarios: 25/10/2, 50/20/5 and 100/30/10 Mbps
    /// for urban/suburban/rural.
    pub fn baseline() -> Vec<Scenario> {
        vec![
            Scenario::new("S1", 25.0, 10.0, 2.0).unwrap(),
            Scenario::new("S2", 50.0, 20.0, 5.0).unwrap(),
            Scenario::new("S3", 100.0, 30.0, 10.0).unwrap(),
        ]
    }

    pub fn by_name(name: &str) -> Option<Scenario> {
        Scenario::baseline().into_iter().find(|s| s.name == name)
    }
}

/// Radio access generation under assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generation {
    FourG,
    FiveGNsa,
}

impl fmt::Display for Generation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generation::FourG => write!(f, "4G"),
            Generation::FiveGNsa => write!(f, "5G-NSA"),
        }
    }
}

impl FromStr for Generation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "4G" => Ok(Generation::FourG),
            "5G-NSA" | "5G" => Ok(Generation::FiveGNsa),
            other => Err(format!("unknown generation `{other}` (4G|5G-NSA)")),
        }
    }
}

/// MIMO order; tied to the generation (4G is 2x2, 5G NSA is 4x4). The
/// capacity gain is carried by the per-generation spectral-efficiency
/// columns of the CQI table, so this enum is descriptive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mimo {
    TwoByTwo,
    FourByFour,
}

impl Mimo {
    pub fn for_generation(generation: Generation) -> Mimo {
        match generation {
            Generation::FourG => Mimo::TwoByTwo,
            Generation::FiveGNsa => Mimo::FourByFour,
        }
    }
}

impl fmt::Display for Mimo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mimo::TwoByTwo => write!(f, "2x2"),
            Mimo::FourByFour => write!(f, "4x4"),
        }
    }
}

/// Backhaul family of a strategy: point-to-point wireless units or
/// trenched fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackhaulFamily {
    Wireless,
    Fiber,
}

impl fmt::Display for BackhaulFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackhaulFamily::Wireless => write!(f, "wireless"),
            BackhaulFamily::Fiber => write!(f, "fiber"),
        }
    }
}

impl FromStr for BackhaulFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wireless" => Ok(BackhaulFamily::Wireless),
            "fiber" => Ok(BackhaulFamily::Fiber),
            other => Err(format!("unknown backhaul `{other}` (wireless|fiber)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Duplex {
    Fdd,
    Tdd,
}

/// One licensed carrier. `bandwidth_mhz` is the usable downlink channel
/// (the downlink half of an FDD pair, the full channel for TDD).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBand {
    pub frequency_mhz: f64,
    pub bandwidth_mhz: f64,
    pub duplex: Duplex,
    /// Downlink share of a TDD frame (4:1 => 0.8). Unused for FDD.
    pub tdd_dl_fraction: f64,
    pub generation: Generation,
}

impl SpectrumBand {
    pub fn validate(&self) -> Result<()> {
        if !(500.0..=100_000.0).contains(&self.frequency_mhz) {
            return Err(ModelError::FrequencyRange(self.frequency_mhz));
        }
        if self.bandwidth_mhz <= 0.0 {
            return Err(ModelError::Invariant("band bandwidth > 0".into()));
        }
        Ok(())
    }

    /// Bandwidth actually carrying downlink traffic, MHz.
    pub fn effective_dl_mhz(&self) -> f64 {
        match self.duplex {
            Duplex::Fdd => self.bandwidth_mhz,
            Duplex::Tdd => self.bandwidth_mhz * self.tdd_dl_fraction,
        }
    }

    /// Sub-1 GHz bands are priced as coverage spectrum, the rest as
    /// capacity spectrum.
    pub fn is_coverage(&self) -> bool {
        self.frequency_mhz < 1000.0
    }

    /// The baseline five-band portfolio: 850/1800/2300 MHz FDD for 4G,
    /// 700 MHz FDD and 3500 MHz TDD (4:1) for 5G.
    pub fn baseline_portfolio() -> Vec<SpectrumBand> {
        let fdd = |frequency_mhz: f64, bandwidth_mhz: f64, generation| SpectrumBand {
            frequency_mhz,
            bandwidth_mhz,
            duplex: Duplex::Fdd,
            tdd_dl_fraction: 0.8,
            generation,
        };
        vec![
            fdd(850.0, 2.5, Generation::FourG),
            fdd(1800.0, 2.5, Generation::FourG),
            fdd(2300.0, 15.0, Generation::FourG),
            fdd(700.0, 5.0, Generation::FiveGNsa),
            SpectrumBand {
                frequency_mhz: 3500.0,
                bandwidth_mhz: 50.0,
                duplex: Duplex::Tdd,
                tdd_dl_fraction: 0.8,
                generation: Generation::FiveGNsa,
            },
        ]
    }
}

/// A deployment strategy: which radio generation is rolled out and how
/// new sites reach the fiber network.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub generation: Generation,
    pub backhaul: BackhaulFamily,
    pub bands: Vec<SpectrumBand>,
    pub mimo: Mimo,
}

impl Strategy {
    pub fn new(generation: Generation, backhaul: BackhaulFamily) -> Strategy {
        Strategy {
            generation,
            backhaul,
            bands: SpectrumBand::baseline_portfolio()
                .into_iter()
                .filter(|b| b.generation == generation)
                .collect(),
            mimo: Mimo::for_generation(generation),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = Mimo::for_generation(self.generation);
        if self.mimo != expected {
            return Err(ModelError::Invariant(format!(
                "{} strategies use MIMO {expected}",
                self.generation
            )));
        }
        if self.bands.is_empty() {
            return Err(ModelError::EmptyInput("strategy band list".into()));
        }
        for b in &self.bands {
            b.validate()?;
            if b.generation != self.generation {
                return Err(ModelError::Invariant(
                    "strategy bands belong to the strategy generation".into(),
                ));
            }
        }
        Ok(())
    }

    /// Stable label used in CSV outputs, e.g. `4G_wireless`.
    pub fn label(&self) -> String {
        let gen = match self.generation {
            Generation::FourG => "4G",
            Generation::FiveGNsa => "5G-NSA",
        };
        format!("{gen}_{}", self.backhaul)
    }

    /// The four baseline strategies: {4G, 5G-NSA} x {wireless, fiber}.
    pub fn baseline() -> Vec<Strategy> {
        vec![
            Strategy::new(Generation::FourG, BackhaulFamily::Wireless),
            Strategy::new(Generation::FourG, BackhaulFamily::Fiber),
            Strategy::new(Generation::FiveGNsa, BackhaulFamily::Wireless),
            Strategy::new(Generation::FiveGNsa, BackhaulFamily::Fiber),
        ]
    }

    pub fn by_label(label: &str) -> Option<Strategy> {
        Strategy::baseline().into_iter().find(|s| s.label() == label)
    }
}

/// Parse flat `key=value` config text. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ModelConfig> {
    let mut cfg = ModelConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ModelError::BadConfigValue {
                key: format!("line {}", lineno + 1),
                message: format!("expected key=value, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn apply_key(cfg: &mut ModelConfig, key: &str, value: &str) -> Result<()> {
    fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
        value.parse().map_err(|_| ModelError::BadConfigValue {
            key: key.to_string(),
            message: format!("cannot parse `{value}`"),
        })
    }

    // Per-region geotype threshold overrides:
    //   geotype_override.<region_id> = <urban_thr>,<suburban_thr>
    if let Some(region) = key.strip_prefix("geotype_override.") {
        let Some((u, s)) = value.split_once(',') else {
            return Err(ModelError::BadConfigValue {
                key: key.to_string(),
                message: "expected `<urban_thr>,<suburban_thr>`".into(),
            });
        };
        let u: f64 = num(key, u.trim())?;
        let s: f64 = num(key, s.trim())?;
        cfg.geotype_overrides.insert(region.to_string(), (u, s));
        return Ok(());
    }

    match key {
        "study_start_year" => cfg.study_start_year = num(key, value)?,
        "study_end_year" => cfg.study_end_year = num(key, value)?,
        "discount_rate" => cfg.discount_rate = num(key, value)?,
        "wacc" => cfg.wacc = num(key, value)?,
        "admin_pct" => cfg.admin_pct = num(key, value)?,
        "tax_rate_pct" => cfg.tax_rate_pct = num(key, value)?,
        "profit_margin_pct" => cfg.profit_margin_pct = num(key, value)?,
        "excess_profit_threshold_pct" => cfg.excess_profit_threshold_pct = num(key, value)?,
        "overbooking_factor" => cfg.overbooking_factor = num(key, value)?,
        "networks" => cfg.networks = num(key, value)?,
        "traffic_load_pct" => cfg.traffic_load_pct = num(key, value)?,
        "confidence_percentile" => cfg.confidence_percentile = num(key, value)?,
        "rng_seed" => cfg.rng_seed = num(key, value)?,
        "tax_base" => {
            cfg.tax_base = value.parse().map_err(|e: String| ModelError::BadConfigValue {
                key: key.to_string(),
                message: e,
            })?
        }
        "urban_density_threshold" => cfg.urban_density_threshold = num(key, value)?,
        "suburban_density_threshold" => cfg.suburban_density_threshold = num(key, value)?,
        "cell_threshold" => cfg.cell_threshold = num(key, value)?,
        "settlement_threshold" => cfg.settlement_threshold = num(key, value)?,
        "core_pop_threshold" => cfg.core_pop_threshold = num(key, value)?,
        "core_edge_buffer_km" => cfg.core_edge_buffer_km = num(key, value)?,
        "gen_share_4g" => cfg.gen_share_4g = num(key, value)?,
        "gen_share_3g" => cfg.gen_share_3g = num(key, value)?,
        "gen_share_2g" => cfg.gen_share_2g = num(key, value)?,
        other => return Err(ModelError::UnknownKey(other.to_string())),
    }
    Ok(())
}

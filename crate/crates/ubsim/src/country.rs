//! Country data: local statistical areas and regional records, with CSV
//! ingest and full invariant validation.
//!
//! `areas.csv` columns: `area_id,region_id,population,area_km2,luminosity_dn`
//! plus optional `x_km,y_km` grid coordinates.
//!
//! `regions.csv` columns: `region_id,total_towers,coverage_pct,arpu_low,
//! arpu_mid,arpu_high,spec_price_cov,spec_price_cap,bh_fiber,bh_copper,
//! bh_microwave,bh_satellite` plus one `cellpen_YYYY` and one `sppen_YYYY`
//! column per study year.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write as _;
use std::path::Path;

use crate::config::ModelConfig;
use crate::error::{ModelError, Result};

/// Settlement pattern of an area, assigned from population density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geotype {
    Urban,
    Suburban,
    Rural,
}

impl fmt::Display for Geotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geotype::Urban => write!(f, "urban"),
            Geotype::Suburban => write!(f, "suburban"),
            Geotype::Rural => write!(f, "rural"),
        }
    }
}

impl Geotype {
    pub const ALL: [Geotype; 3] = [Geotype::Urban, Geotype::Suburban, Geotype::Rural];

    pub fn from_density(density: f64, urban_threshold: f64, suburban_threshold: f64) -> Geotype {
        if density > urban_threshold {
            Geotype::Urban
        } else if density > suburban_threshold {
            Geotype::Suburban
        } else {
            Geotype::Rural
        }
    }
}

/// One 1 km² local statistical area.
#[derive(Debug, Clone)]
pub struct LocalArea {
    pub area_id: String,
    pub region_id: String,
    pub population: f64,
    pub area_km2: f64,
    /// Nightlight digital number, 0-64.
    pub luminosity_dn: f64,
    pub geotype: Geotype,
    /// persons/km², derived as population / area_km2.
    pub pop_density: f64,
    /// Abstract grid coordinates, km. Present for synthetic countries
    /// and when the areas file carries x_km/y_km columns.
    pub x_km: Option<f64>,
    pub y_km: Option<f64>,
}

impl LocalArea {
    pub fn new(
        area_id: &str,
        region_id: &str,
        population: f64,
        area_km2: f64,
        luminosity_dn: f64,
        config: &ModelConfig,
    ) -> Result<LocalArea> {
        if population < 0.0 {
            return Err(ModelError::Invariant(format!(
                "area `{area_id}`: population >= 0"
            )));
        }
        if area_km2 <= 0.0 {
            return Err(ModelError::Invariant(format!(
                "area `{area_id}`: area_km2 > 0"
            )));
        }
        if !(0.0..=64.0).contains(&luminosity_dn) {
            return Err(ModelError::Invariant(format!(
                "area `{area_id}`: luminosity_dn in [0, 64]"
            )));
        }
        let pop_density = population / area_km2;
        let (urban_thr, suburban_thr) = config.thresholds_for(region_id);
        Ok(LocalArea {
            area_id: area_id.to_string(),
            region_id: region_id.to_string(),
            population,
            area_km2,
            luminosity_dn,
            geotype: Geotype::from_density(pop_density, urban_thr, suburban_thr),
            pop_density,
            x_km: None,
            y_km: None,
        })
    }
}

/// Fractions of existing sites on each backhaul technology; sums to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackhaulMix {
    pub fiber: f64,
    pub copper: f64,
    pub microwave: f64,
    pub satellite: f64,
}

impl BackhaulMix {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.fiber, self.copper, self.microwave, self.satellite];
        if parts.iter().any(|&p| p < 0.0) {
            return Err(ModelError::Invariant("backhaul mix fractions >= 0".into()));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ModelError::Invariant(format!(
                "backhaul mix sums to 1 (got {sum})"
            )));
        }
        Ok(())
    }
}

/// National statistics for one region (telecom zone).
#[derive(Debug, Clone)]
pub struct RegionRecord {
    pub region_id: String,
    pub total_towers: u32,
    /// Percent of the region population covered by existing sites.
    pub coverage_pct: f64,
    /// Cellular penetration (fraction of population) per study year.
    pub cellpen_by_year: BTreeMap<u32, f64>,
    /// Smartphone penetration (fraction of cellular users) per year.
    pub sppen_by_year: BTreeMap<u32, f64>,
    /// Monthly ARPU by consumption tier, $/user/month.
    pub arpu_low: f64,
    pub arpu_mid: f64,
    pub arpu_high: f64,
    /// Auction-derived spectrum prices, $/MHz/capita.
    pub spectrum_price_coverage: f64,
    pub spectrum_price_capacity: f64,
    pub backhaul_mix: BackhaulMix,
}

impl RegionRecord {
    pub fn validate(&self, config: &ModelConfig) -> Result<()> {
        if !(0.0..=100.0).contains(&self.coverage_pct) {
            return Err(ModelError::Invariant(format!(
                "region `{}`: coverage_pct in [0, 100]",
                self.region_id
            )));
        }
        if !(self.arpu_low <= self.arpu_mid && self.arpu_mid <= self.arpu_high) {
            return Err(ModelError::Invariant(format!(
                "region `{}`: arpu_low <= arpu_mid <= arpu_high",
                self.region_id
            )));
        }
        self.backhaul_mix.validate().map_err(|e| {
            ModelError::Invariant(format!("region `{}`: {e}", self.region_id))
        })?;
        for year in config.study_years() {
            for (series, name) in [
                (&self.cellpen_by_year, "cellpen"),
                (&self.sppen_by_year, "sppen"),
            ] {
                match series.get(&year) {
                    None => {
                        return Err(ModelError::MissingPenetrationYear {
                            region: self.region_id.clone(),
                            year,
                        })
                    }
                    Some(&v) if !(0.0..=1.0).contains(&v) => {
                        return Err(ModelError::Invariant(format!(
                            "region `{}`: {name}_{year} in [0, 1]",
                            self.region_id
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn cellpen(&self, year: u32) -> Result<f64> {
        self.cellpen_by_year.get(&year).copied().ok_or_else(|| {
            ModelError::MissingPenetrationYear {
                region: self.region_id.clone(),
                year,
            }
        })
    }

    pub fn sppen(&self, year: u32) -> Result<f64> {
        self.sppen_by_year.get(&year).copied().ok_or_else(|| {
            ModelError::MissingPenetrationYear {
                region: self.region_id.clone(),
                year,
            }
        })
    }

    pub fn arpu_for(&self, tier: crate::demand::ArpuTier) -> f64 {
        use crate::demand::ArpuTier::*;
        match tier {
            Low => self.arpu_low,
            Mid => self.arpu_mid,
            High => self.arpu_high,
        }
    }
}

/// A loaded or generated country: regions plus areas, with optional
/// explicit adjacency for the settlement layer.
#[derive(Debug, Clone)]
pub struct Country {
    pub regions: Vec<RegionRecord>,
    pub areas: Vec<LocalArea>,
    /// Explicit adjacency pairs (area_id_a, area_id_b); when absent,
    /// 4-neighborhood is inferred from grid coordinates.
    pub adjacency: Option<Vec<(String, String)>>,
}

impl Country {
    pub fn region(&self, region_id: &str) -> Option<&RegionRecord> {
        self.regions.iter().find(|r| r.region_id == region_id)
    }

    pub fn total_population(&self) -> f64 {
        self.areas.iter().map(|a| a.population).sum()
    }
}

struct Header {
    index: HashMap<String, usize>,
    file: String,
}

impl Header {
    fn new(file: &str, headers: &csv::StringRecord) -> Header {
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        Header {
            index,
            file: file.to_string(),
        }
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| ModelError::Schema {
            file: self.file.clone(),
            row: 0,
            column: name.to_string(),
            message: "required column missing from header".into(),
        })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, row: usize, name: &str) -> Result<&'r str> {
        let idx = self.col(name)?;
        record.get(idx).map(str::trim).ok_or_else(|| ModelError::Schema {
            file: self.file.clone(),
            row,
            column: name.to_string(),
            message: "row is shorter than the header".into(),
        })
    }

    fn parse_f64(&self, record: &csv::StringRecord, row: usize, name: &str) -> Result<f64> {
        let raw = self.get(record, row, name)?;
        raw.parse().map_err(|_| ModelError::Schema {
            file: self.file.clone(),
            row,
            column: name.to_string(),
            message: format!("cannot parse `{raw}` as a number"),
        })
    }
}

/// Load areas, regions and the model config; validates every invariant,
/// resolves region references and derives densities and geotypes.
pub fn load_country(
    areas_file: &Path,
    regions_file: &Path,
    config_file: &Path,
) -> Result<(ModelConfig, Vec<RegionRecord>, Vec<LocalArea>)> {
    let config = crate::config::load_config(config_file)?;
    let regions = load_regions(regions_file, &config)?;
    let areas = load_areas(areas_file, &regions, &config)?;
    Ok((config, regions, areas))
}

pub fn load_regions(path: &Path, config: &ModelConfig) -> Result<Vec<RegionRecord>> {
    let file_label = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let header = Header::new(&file_label, reader.headers()?);

    let mut regions = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let region_id = header.get(&record, row, "region_id")?.to_string();
        if !seen.insert(region_id.clone()) {
            return Err(ModelError::Schema {
                file: file_label.clone(),
                row,
                column: "region_id".into(),
                message: format!("duplicate region id `{region_id}`"),
            });
        }

        let total_towers = header.parse_f64(&record, row, "total_towers")? as u32;
        let mut cellpen_by_year = BTreeMap::new();
        let mut sppen_by_year = BTreeMap::new();
        for year in config.study_years() {
            cellpen_by_year.insert(
                year,
                header.parse_f64(&record, row, &format!("cellpen_{year}"))?,
            );
            sppen_by_year.insert(
                year,
                header.parse_f64(&record, row, &format!("sppen_{year}"))?,
            );
        }

        let region = RegionRecord {
            region_id,
            total_towers,
            coverage_pct: header.parse_f64(&record, row, "coverage_pct")?,
            cellpen_by_year,
            sppen_by_year,
            arpu_low: header.parse_f64(&record, row, "arpu_low")?,
            arpu_mid: header.parse_f64(&record, row, "arpu_mid")?,
            arpu_high: header.parse_f64(&record, row, "arpu_high")?,
            spectrum_price_coverage: header.parse_f64(&record, row, "spec_price_cov")?,
            spectrum_price_capacity: header.parse_f64(&record, row, "spec_price_cap")?,
            backhaul_mix: BackhaulMix {
                fiber: header.parse_f64(&record, row, "bh_fiber")?,
                copper: header.parse_f64(&record, row, "bh_copper")?,
                microwave: header.parse_f64(&record, row, "bh_microwave")?,
                satellite: header.parse_f64(&record, row, "bh_satellite")?,
            },
        };
        region.validate(config)?;
        regions.push(region);
    }
    if regions.is_empty() {
        return Err(ModelError::EmptyInput(file_label));
    }
    Ok(regions)
}

pub fn load_areas(
    path: &Path,
    regions: &[RegionRecord],
    config: &ModelConfig,
) -> Result<Vec<LocalArea>> {
    let file_label = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let header = Header::new(&file_label, reader.headers()?);
    let has_coords = header.index.contains_key("x_km") && header.index.contains_key("y_km");
    let known_regions: HashSet<&str> = regions.iter().map(|r| r.region_id.as_str()).collect();

    let mut areas = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let area_id = header.get(&record, row, "area_id")?.to_string();
        if !seen.insert(area_id.clone()) {
            return Err(ModelError::Schema {
                file: file_label.clone(),
                row,
                column: "area_id".into(),
                message: format!("duplicate area id `{area_id}`"),
            });
        }
        let region_id = header.get(&record, row, "region_id")?.to_string();
        if !known_regions.contains(region_id.as_str()) {
            return Err(ModelError::DanglingRegion {
                area: area_id,
                region: region_id,
            });
        }
        let mut area = LocalArea::new(
            &area_id,
            &region_id,
            header.parse_f64(&record, row, "population")?,
            header.parse_f64(&record, row, "area_km2")?,
            header.parse_f64(&record, row, "luminosity_dn")?,
            config,
        )?;
        if has_coords {
            area.x_km = Some(header.parse_f64(&record, row, "x_km")?);
            area.y_km = Some(header.parse_f64(&record, row, "y_km")?);
        }
        areas.push(area);
    }
    if areas.is_empty() {
        return Err(ModelError::EmptyInput(file_label));
    }
    Ok(areas)
}

/// Optional explicit adjacency file: `area_id_a,area_id_b` per row.
pub fn load_adjacency(path: &Path) -> Result<Vec<(String, String)>> {
    let file_label = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let header = Header::new(&file_label, reader.headers()?);
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        pairs.push((
            header.get(&record, row, "area_id_a")?.to_string(),
            header.get(&record, row, "area_id_b")?.to_string(),
        ));
    }
    Ok(pairs)
}

/// Write areas back out in the ingest schema (used by the synthetic
/// generator and round-trip tests). Populations are written with full
/// round-trip precision.
pub fn write_areas(path: &Path, areas: &[LocalArea]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let coords = areas.iter().all(|a| a.x_km.is_some() && a.y_km.is_some());
    if coords {
        writeln!(out, "area_id,region_id,population,area_km2,luminosity_dn,x_km,y_km")?;
    } else {
        writeln!(out, "area_id,region_id,population,area_km2,luminosity_dn")?;
    }
    for a in areas {
        if coords {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                a.area_id,
                a.region_id,
                a.population,
                a.area_km2,
                a.luminosity_dn,
                a.x_km.unwrap(),
                a.y_km.unwrap()
            )?;
        } else {
            writeln!(
                out,
                "{},{},{},{},{}",
                a.area_id, a.region_id, a.population, a.area_km2, a.luminosity_dn
            )?;
        }
    }
    Ok(())
}

pub fn write_regions(path: &Path, regions: &[RegionRecord], config: &ModelConfig) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut header = String::from(
        "region_id,total_towers,coverage_pct,arpu_low,arpu_mid,arpu_high,\
         spec_price_cov,spec_price_cap,bh_fiber,bh_copper,bh_microwave,bh_satellite",
    );
    for year in config.study_years() {
        header.push_str(&format!(",cellpen_{year}"));
    }
    for year in config.study_years() {
        header.push_str(&format!(",sppen_{year}"));
    }
    writeln!(out, "{header}")?;
    for r in regions {
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.region_id,
            r.total_towers,
            r.coverage_pct,
            r.arpu_low,
            r.arpu_mid,
            r.arpu_high,
            r.spectrum_price_coverage,
            r.spectrum_price_capacity,
            r.backhaul_mix.fiber,
            r.backhaul_mix.copper,
            r.backhaul_mix.microwave,
            r.backhaul_mix.satellite
        );
        for year in config.study_years() {
            line.push_str(&format!(",{}", r.cellpen_by_year[&year]));
        }
        for year in config.study_years() {
            line.push_str(&format!(",{}", r.sppen_by_year[&year]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

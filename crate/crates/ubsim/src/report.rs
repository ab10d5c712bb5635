//! Result tables and the run manifest.
//!
//! Outputs are plain CSV, stable-sorted so diffs are meaningful, with
//! monetary values rounded to 2 decimals. The manifest records input
//! hashes so identical inputs are recognizable at a glance.

use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::assessment::{DecileResult, SensitivityGrid};
use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn fmt_money(v: f64) -> String {
    format!("{:.2}", v)
}

/// `decile_results.csv`: one row per (scenario, strategy, decile).
pub fn write_decile_results_csv(
    path: &Path,
    tables: &[(String, String, Vec<DecileResult>)],
) -> Result<()> {
    let mut tables: Vec<&(String, String, Vec<DecileResult>)> = tables.iter().collect();
    tables.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        out,
        "scenario,strategy,decile,population,area_km2,new_sites,upgraded_sites,\
         ran,backhaul,core,admin,spectrum,tax,profit,total_cost,revenue,\
         cum_cost,cum_revenue,viable,subsidy,cost_per_user"
    )?;
    for (scenario, strategy, results) in tables {
        for r in results {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                scenario,
                strategy,
                r.decile,
                r.population,
                r.area_km2,
                r.new_sites,
                r.upgraded_sites,
                fmt_money(r.cost.ran),
                fmt_money(r.cost.backhaul),
                fmt_money(r.cost.core),
                fmt_money(r.cost.admin),
                fmt_money(r.cost.spectrum),
                fmt_money(r.cost.tax),
                fmt_money(r.cost.profit),
                fmt_money(r.cost.total),
                fmt_money(r.revenue_npv),
                fmt_money(r.cumulative_cost),
                fmt_money(r.cumulative_revenue),
                r.viable,
                fmt_money(r.subsidy_required),
                fmt_money(r.cost_per_user),
            )?;
        }
    }
    Ok(())
}

/// `sensitivity.csv`: one row per (scenario, strategy, scalar).
pub fn write_sensitivity_csv(path: &Path, grid: &SensitivityGrid) -> Result<()> {
    let mut rows: Vec<_> = grid.rows.iter().collect();
    rows.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then_with(|| a.strategy.cmp(&b.strategy))
            .then_with(|| {
                b.spectrum_price_scalar
                    .partial_cmp(&a.spectrum_price_scalar)
                    .unwrap()
            })
    });
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "scenario,strategy,spectrum_scalar,max_viable_coverage_pct")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.scenario, r.strategy, r.spectrum_price_scalar, r.max_viable_coverage_pct
        )?;
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256_hex(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Inputs recorded by the manifest.
pub struct ManifestInputs<'a> {
    pub seed: u64,
    pub config_text: &'a str,
    /// (label, sha256 hex) of every input file.
    pub input_hashes: Vec<(String, String)>,
    /// (output name, row count) of every table written.
    pub row_counts: Vec<(String, usize)>,
}

/// Write `manifest.txt`. Identical inputs and seed produce identical
/// hash lines; the timestamp line documents when the run happened and is
/// the only non-reproducible field.
pub fn write_manifest(path: &Path, inputs: &ManifestInputs) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "tool_version: {TOOL_VERSION}")?;
    writeln!(out, "seed: {}", inputs.seed)?;
    writeln!(out, "config_sha256: {}", sha256_hex(inputs.config_text.as_bytes()))?;
    for (label, hash) in &inputs.input_hashes {
        writeln!(out, "input_sha256 {label}: {hash}")?;
    }
    for (name, rows) in &inputs.row_counts {
        writeln!(out, "rows {name}: {rows}")?;
    }
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "timestamp_unix: {now}")?;
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ubsim::assessment::{prepare_country, run_sweep};
use ubsim::config::{ModelConfig, Scenario, Strategy};
use ubsim::cost::UnitCosts;
use ubsim::country::{Country, Geotype};
use ubsim::error::ModelError;
use ubsim::radio::{build_lookup, read_lookup_csv, write_lookup_csv, LookupSettings};
use ubsim::report;
use ubsim::synth::{self, SynthParams};

/// Techno-economic assessment of 4G/5G universal-broadband strategies.
#[derive(Parser)]
#[command(name = "ubsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full demand/supply/capacity/cost/viability sweep and
    /// write decile_results.csv, sensitivity.csv, capacity_lookup.csv
    /// and manifest.txt.
    Run(RunArgs),
    /// Build and write only the capacity lookup (cacheable input for
    /// later runs).
    Lookup(LookupArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Model config file (flat key=value); flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Capacity percentile in (0,100); overrides the config file.
    #[arg(long)]
    percentile: Option<f64>,
    /// Monte-Carlo samples per ISD grid point.
    #[arg(long, default_value_t = 1000)]
    samples: u32,
    /// Worker threads (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Strategies to evaluate (labels like 4G_wireless).
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Areas CSV (requires --regions-csv).
    #[arg(long, requires = "regions_csv", conflicts_with = "synthetic")]
    areas_csv: Option<PathBuf>,
    /// Regions CSV (requires --areas-csv).
    #[arg(long, requires = "areas_csv")]
    regions_csv: Option<PathBuf>,
    /// Optional explicit adjacency CSV (area_id_a,area_id_b).
    #[arg(long)]
    adjacency_csv: Option<PathBuf>,
    /// Generate a synthetic country instead of loading CSVs.
    #[arg(long)]
    synthetic: bool,
    /// Number of synthetic areas.
    #[arg(long, default_value_t = 10_000)]
    areas: u32,
    /// Scenarios to evaluate (S1,S2,S3).
    #[arg(long, value_delimiter = ',')]
    scenarios: Option<Vec<String>>,
    /// Spectrum price scalars for the sensitivity sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 0.8, 0.6, 0.4, 0.2, 0.0])]
    spectrum_scalars: Vec<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Reuse (or create) a cached capacity lookup CSV.
    #[arg(long)]
    lookup_cache: Option<PathBuf>,
    /// Unit cost overrides CSV (component,value).
    #[arg(long)]
    unit_costs_csv: Option<PathBuf>,
}

#[derive(Args)]
struct LookupArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output CSV path.
    #[arg(long, default_value = "capacity_lookup.csv")]
    out: PathBuf,
    /// Geotypes to simulate.
    #[arg(long, value_delimiter = ',', default_values_t = vec!["urban".to_string(), "suburban".to_string(), "rural".to_string()])]
    geotypes: Vec<String>,
}

fn effective_config(common: &CommonArgs, synthetic: bool) -> Result<ModelConfig, ModelError> {
    let mut config = match &common.config {
        Some(path) => ubsim::config::load_config(path)?,
        None if synthetic => synth::recommended_config(),
        None => ModelConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.rng_seed = seed;
    }
    if let Some(p) = common.percentile {
        config.confidence_percentile = p;
    }
    config.validate()?;
    Ok(config)
}

fn parse_strategies(names: &Option<Vec<String>>) -> Result<Vec<Strategy>, ModelError> {
    match names {
        None => Ok(Strategy::baseline()),
        Some(labels) => labels
            .iter()
            .map(|l| {
                Strategy::by_label(l).ok_or_else(|| ModelError::BadConfigValue {
                    key: "--strategies".into(),
                    message: format!("unknown strategy `{l}`"),
                })
            })
            .collect(),
    }
}

fn parse_scenarios(names: &Option<Vec<String>>) -> Result<Vec<Scenario>, ModelError> {
    match names {
        None => Ok(Scenario::baseline()),
        Some(labels) => labels
            .iter()
            .map(|l| {
                Scenario::by_name(l).ok_or_else(|| ModelError::BadConfigValue {
                    key: "--scenarios".into(),
                    message: format!("unknown scenario `{l}`"),
                })
            })
            .collect(),
    }
}

fn parse_geotypes(names: &[String]) -> Result<Vec<Geotype>, ModelError> {
    names
        .iter()
        .map(|g| match g.as_str() {
            "urban" => Ok(Geotype::Urban),
            "suburban" => Ok(Geotype::Suburban),
            "rural" => Ok(Geotype::Rural),
            other => Err(ModelError::BadConfigValue {
                key: "--geotypes".into(),
                message: format!("unknown geotype `{other}`"),
            }),
        })
        .collect()
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // Ignore the error if a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn lookup_settings(config: &ModelConfig, samples: u32) -> LookupSettings {
    LookupSettings {
        samples_per_isd: samples,
        percentile: config.confidence_percentile,
        seed: config.rng_seed,
        traffic_load_pct: config.traffic_load_pct,
        ..LookupSettings::default()
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), ModelError> {
    init_threads(args.common.threads);
    let config = effective_config(&args.common, args.synthetic)?;
    let strategies = parse_strategies(&args.common.strategies)?;
    let scenarios = parse_scenarios(&args.scenarios)?;
    let costs = match &args.unit_costs_csv {
        Some(path) => UnitCosts::with_overrides_csv(path)?,
        None => UnitCosts::default(),
    };

    std::fs::create_dir_all(&args.out)?;

    // Country: either synthesized (and persisted for reproducibility)
    // or loaded from the ingest schema.
    let mut input_hashes: Vec<(String, String)> = Vec::new();
    let (country, core_edges) = if args.synthetic {
        let country =
            synth::synthetic_country(config.rng_seed, args.areas, &SynthParams::default(), &config)?;
        let areas_path = args.out.join("areas.csv");
        let regions_path = args.out.join("regions.csv");
        ubsim::country::write_areas(&areas_path, &country.areas)?;
        ubsim::country::write_regions(&regions_path, &country.regions, &config)?;
        input_hashes.push(("areas.csv".into(), report::file_sha256_hex(&areas_path)?));
        input_hashes.push(("regions.csv".into(), report::file_sha256_hex(&regions_path)?));
        (country, synth::synthetic_core_edges(args.areas))
    } else {
        let (Some(areas_path), Some(regions_path)) = (&args.areas_csv, &args.regions_csv) else {
            return Err(ModelError::BadConfigValue {
                key: "--areas-csv/--regions-csv".into(),
                message: "either --synthetic or both CSV paths are required".into(),
            });
        };
        let regions = ubsim::country::load_regions(regions_path, &config)?;
        let areas = ubsim::country::load_areas(areas_path, &regions, &config)?;
        let adjacency = match &args.adjacency_csv {
            Some(p) => {
                input_hashes.push((p.display().to_string(), report::file_sha256_hex(p)?));
                Some(ubsim::country::load_adjacency(p)?)
            }
            None => None,
        };
        input_hashes.push((areas_path.display().to_string(), report::file_sha256_hex(areas_path)?));
        input_hashes.push((
            regions_path.display().to_string(),
            report::file_sha256_hex(regions_path)?,
        ));
        let country = Country {
            regions,
            areas,
            adjacency,
        };
        // Loaded countries carry no digitized trunk map; treat each
        // region's largest settlement as an existing core node.
        let settlements = ubsim::supply::build_settlements(
            &country.areas,
            config.cell_threshold,
            config.settlement_threshold,
            country.adjacency.as_deref(),
        );
        let mut core_points: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut regions_seen: Vec<&str> = Vec::new();
        for s in &settlements {
            let best = settlements
                .iter()
                .filter(|t| t.region_id == s.region_id)
                .max_by(|a, b| a.population.partial_cmp(&b.population).unwrap())
                .unwrap();
            if !regions_seen.contains(&s.region_id.as_str()) {
                regions_seen.push(&s.region_id);
                core_points.push(vec![(best.x_km, best.y_km)]);
            }
        }
        (country, core_points)
    };

    let prepared = prepare_country(country, &config, &core_edges, &costs)?;

    // Capacity lookup: cached when requested.
    let settings = lookup_settings(&config, args.common.samples);
    let lookup = match &args.lookup_cache {
        Some(path) if path.exists() => read_lookup_csv(path)?,
        maybe_path => {
            let lookup = build_lookup(&strategies, &Geotype::ALL, &settings)?;
            if let Some(path) = maybe_path {
                write_lookup_csv(&lookup, path)?;
            }
            lookup
        }
    };

    let (tables, grid) = run_sweep(
        &scenarios,
        &strategies,
        &args.spectrum_scalars,
        &prepared,
        &config,
        &lookup,
        &costs,
    )?;

    let decile_path = args.out.join("decile_results.csv");
    let sensitivity_path = args.out.join("sensitivity.csv");
    let lookup_path = args.out.join("capacity_lookup.csv");
    report::write_decile_results_csv(&decile_path, &tables)?;
    report::write_sensitivity_csv(&sensitivity_path, &grid)?;
    write_lookup_csv(&lookup, &lookup_path)?;

    let decile_rows = tables.iter().map(|(_, _, r)| r.len()).sum::<usize>();
    let config_text = match &args.common.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    report::write_manifest(
        &args.out.join("manifest.txt"),
        &report::ManifestInputs {
            seed: config.rng_seed,
            config_text: &config_text,
            input_hashes,
            row_counts: vec![
                ("decile_results.csv".into(), decile_rows),
                ("sensitivity.csv".into(), grid.rows.len()),
                (
                    "capacity_lookup.csv".into(),
                    count_lines(&lookup_path)?.saturating_sub(1),
                ),
            ],
        },
    )?;

    eprintln!(
        "wrote {} decile rows, {} sensitivity rows to {}",
        decile_rows,
        grid.rows.len(),
        args.out.display()
    );
    Ok(())
}

fn count_lines(path: &Path) -> Result<usize, ModelError> {
    Ok(std::fs::read_to_string(path)?.lines().count())
}

fn cmd_lookup(args: &LookupArgs) -> Result<(), ModelError> {
    init_threads(args.common.threads);
    let config = effective_config(&args.common, true)?;
    let strategies = parse_strategies(&args.common.strategies)?;
    let geotypes = parse_geotypes(&args.geotypes)?;
    let settings = lookup_settings(&config, args.common.samples);
    let lookup = build_lookup(&strategies, &geotypes, &settings)?;
    write_lookup_csv(&lookup, &args.out)?;
    eprintln!("wrote lookup to {}", args.out.display());
    Ok(())
}

/// Exit 1 for validation problems, 2 for runtime failures such as
/// demand that cannot be served at the maximum tabulated density.
fn exit_code_for(err: &ModelError) -> u8 {
    match err {
        ModelError::Unserveable { .. } | ModelError::MissingLookupKey(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Lookup(args) => cmd_lookup(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

use thiserror::Error;

/// Errors raised anywhere in the model pipeline.
///
/// Validation problems (bad input files, violated invariants) are kept
/// distinct from runtime failures (an area whose demand cannot be served
/// at the maximum tabulated site density) so the CLI can map them to
/// different exit codes.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A CSV cell failed schema validation. `row` is 1-based and counts
    /// data rows (the header is row 0).
    #[error("{file}: row {row}, column `{column}`: {message}")]
    Schema {
        file: String,
        row: usize,
        column: String,
        message: String,
    },

    /// A domain invariant does not hold; the message names the invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// An area row references a region id absent from the regions file.
    #[error("area `{area}` references unknown region `{region}`")]
    DanglingRegion { area: String, region: String },

    /// Config files reject keys they do not understand.
    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("config key `{key}`: {message}")]
    BadConfigValue { key: String, message: String },

    /// Penetration series must cover every study year.
    #[error("region `{region}`: penetration series missing study year {year}")]
    MissingPenetrationYear { region: String, year: u32 },

    /// Demand in an area exceeds what the densest tabulated deployment
    /// can carry. Never silently clipped.
    #[error(
        "area `{area}`: demand {demand_mbps_km2:.3} Mbps/km2 exceeds the maximum \
         tabulated capacity {max_capacity_mbps_km2:.3} Mbps/km2 (unserveable at max density)"
    )]
    Unserveable {
        area: String,
        demand_mbps_km2: f64,
        max_capacity_mbps_km2: f64,
    },

    /// Propagation model validity is 0.5-100 GHz.
    #[error("frequency {0} MHz outside propagation model validity (500-100000 MHz)")]
    FrequencyRange(f64),

    #[error("distance {0} m outside propagation model validity (must be > 0)")]
    DistanceRange(f64),

    /// A capacity lookup was queried for a key it does not contain.
    #[error("capacity lookup has no entry for {0}")]
    MissingLookupKey(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

//! Techno-economic assessment of 4G/5G universal-broadband strategies.
//!
//! The model works over a country represented as 1 km² local statistical
//! areas, each carrying population, nightlight luminosity and a geotype.
//! A demand layer converts population into smartphone users, revenue and
//! traffic per area and year; a supply layer disaggregates national tower
//! counts, allocates backhaul technologies and designs least-cost fiber;
//! a Monte-Carlo link-budget engine turns spectrum portfolios into a
//! capacity lookup; and a cost layer prices the resulting network with
//! NPV discounting, spectrum fees, tax and profit. The assessment layer
//! sweeps scenarios, strategies and spectrum-price scalars and reports
//! per-decile viability.
//!
//! See the `book/` directory for a guided tour; every code snippet there
//! is compiled and run as a doctest of this crate.

pub mod assessment;
pub mod config;
pub mod cost;
pub mod country;
pub mod demand;
pub mod error;
pub mod radio;
pub mod report;
pub mod rng;
pub mod supply;
pub mod synth;

mod book;

pub use config::{
    BackhaulFamily, Duplex, Generation, Mimo, ModelConfig, Scenario, SpectrumBand, Strategy,
    TaxBase,
};
pub use country::{Country, Geotype, LocalArea, RegionRecord};
pub use error::{ModelError, Result};

//! Seeded sampling campaigns, tightness sweeps and by-name bound evaluation.

mod campaign;
mod config;
mod eval;
mod registry;
pub mod sampling;
mod tightness;

pub use campaign::{run_campaign, tally, write_reports, Tally};
pub use config::{CampaignConfig, EnergyCap, OscillatorSampling, OutputFormat, OutputSpec};
pub use eval::{evaluate_named, parse_params, NAMED};
pub use registry::{bound_index, run_trial, split_dim, stream_id, BOUNDS};
pub use tightness::{parse_grid, tightness_sweep, write_rows_csv, TightnessRow};

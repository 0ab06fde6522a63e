//! Configuration, field files, time series and reports.

mod config;
mod ovf;
mod report;
mod series;

pub use config::{
    parse_config, DecayConfig, DispersionConfig, InitConfig, OutputConfig, RunConfig, TimeConfig, COMMANDS,
};
pub use ovf::{decode_field, encode_field, read_field, write_field, MAGIC, VERSION};
pub use report::{dispersion_csv, emit_reports, DecayReport, NormReport};
pub use series::{SeriesMetadata, TimeSeries};

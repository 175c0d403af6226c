//! Scenario files, metric output and the built-in reference scenarios.

pub mod config;
pub mod metrics;

pub use config::{parse_scenario, ConfigError, Scenario};
pub use metrics::{
    emit_records, parse_records, read_records, AtomicFile, BenchRecord, Format, MetricsRecord, MetricsWriter,
    RecordWriter, Schema, SweepRecord,
};

/// Reference scenarios shipped with the binary, by name.
pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    ("walker_delta_2x40", include_str!("../../scenarios/walker_delta_2x40.toml")),
    ("walker_delta_5x40", include_str!("../../scenarios/walker_delta_5x40.toml")),
    ("walker_delta", include_str!("../../scenarios/walker_delta.toml")),
];

pub fn builtin_scenario(name: &str) -> Option<&'static str> {
    BUILTIN_SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

//! Shared fixtures for the pipeline benchmarks. The interesting code lives
//! in `benches/`.

use mesoscale::experiment::ExperimentConfig;

/// Reference-sized spin config scaled down to a handful of trials so a
/// bench iteration stays in the millisecond range.
pub fn bench_ising_config() -> ExperimentConfig {
    let mut config = ExperimentConfig::ising_reference(17);
    config.trials_per_scale = 4;
    config.replicates = 2;
    config.scales = vec![8];
    config
}

pub fn bench_abm_config() -> ExperimentConfig {
    let mut config = ExperimentConfig::abm_reference(17);
    config.trials_per_scale = 4;
    config.replicates = 2;
    config.scales = vec![8];
    config
}

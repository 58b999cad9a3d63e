//! Episode orchestration, evaluation, transfer sweeps, metrics output,
//! experiment configuration, and the environment server for external
//! trainers.

pub mod config;
mod episode;
pub mod protocol;
mod report;
pub mod server;

pub use episode::{
    evaluate_policy, evaluate_with, run_episode, run_episode_on, Aggregate, EpisodeConfig, EpisodeRow, GraphSource,
    PolicyFactory, PolicyKind, PolicySpec, ResampleRule, RunReport, Seeds, Stat, DEFAULT_STEPS,
};
pub use report::{
    summary_json, transfer_sweep, write_episode_csv, write_run_outputs, write_sweep_csv, SweepConfig, SweepRow,
    EPISODE_COLUMNS,
};

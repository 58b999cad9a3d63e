//! Numerical graphon machinery: discretized operators, WRNN evaluation,
//! signal induction, bound constants, and transferability checks.

mod bounds;
mod checks;
mod kernel;
mod lab;

pub use bounds::{
    band_constants, filter_constants, lipschitz_constant, low_band_response, normalize_filters, BoundComponents,
};
pub use checks::{
    action_distance, action_outputs, action_transfer_check, default_signals, limit_action_density, median,
    median_by_m, output_transfer_check, spectral_norm, write_transfer_csv, ActionCheckConfig, ActionOutputs,
    CheckKind, ConstantOverrides, OutputCheckConfig, TransferRecord, DEFAULT_EPSILON, DEFAULT_RESOLUTION,
    REPORT_COLUMNS,
};
pub use kernel::{
    induce_signal, kernel_distance, sample_signal, wrnn_forward, DiscretizedKernel, FourierTerm, GraphonSignal,
    SignalFn, StepSignal, TestSignal,
};
pub use lab::{lab_network, run_lab, LabConfig};

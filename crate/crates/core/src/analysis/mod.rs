//! Experiment harness: spectra, settling metrics, quadratic costs, the
//! initial-condition stability grid and paired controller runs.

mod compare;
mod cost;
mod export;
mod grid;
mod settling;
mod spectrum;

pub use compare::{compare_controllers, Comparison};
pub use cost::{linear_state, quadratic_cost, simulate_linear, trajectory_cost, LinearRun};
pub use export::{fmt_f64, planar_trajectory_csv, spatial_trajectory_csv, sweep_csv};
pub use grid::{stability_grid, GridCell, GridOptions, GridSpec, RateDirection, StabilityGridReport};
pub use settling::{settling_time, settling_time_of, DEFAULT_SETTLING_THRESHOLD};
pub use spectrum::{
    power_spectrum, power_spectrum_timed, Peak, Spectrum, PEAK_SEPARATION_BINS, PEAK_THRESHOLD,
};

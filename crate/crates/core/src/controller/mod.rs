//! IMU-only damping control laws, the low-pass mode separator and the
//! full-twist benchmark controller.

mod filter;
mod laws;

pub use filter::{FilterValue, LowPassFilter};
pub use laws::{
    cutoff_frequency, damping_wrench_3d, damping_wrench_planar, ideal_wrench, AnyController,
    ControlLaw, Cutoff, DampingGains, GyroNoise, IdealController, ImuSample, PassiveController,
    ProposedController, Saturation, DEFAULT_YAW_GAIN, HARDWARE_CUTOFF_HZ, PAPER_GAINS,
};

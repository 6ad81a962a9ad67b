use crate::dynamics::{Sample, Trajectory};
use crate::{Error, Result};

/// Default band, as a fraction of the peak magnitude.
pub const DEFAULT_SETTLING_THRESHOLD: f64 = 0.05;

/// First time after which `|signal|` stays within `threshold · max|signal|`
/// for the rest of the record. `None` if the last sample is still outside
/// the band. An identically zero signal settles at 0.
pub fn settling_time(signal: &[f64], dt: f64, threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::param("threshold", format!("must lie in (0, 1), got {threshold}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", "must be finite and > 0"));
    }
    let peak = signal.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(Some(0.0));
    }
    let band = threshold * peak;
    match signal.iter().rposition(|v| v.abs() > band) {
        None => Ok(Some(0.0)),
        Some(i) if i + 1 == signal.len() => Ok(None),
        Some(i) => Ok(Some((i + 1) as f64 * dt)),
    }
}

/// Settling time of a channel of a trajectory, measured from its first
/// sample.
pub fn settling_time_of<const N: usize>(
    traj: &Trajectory<N>,
    select: impl Fn(&Sample<N>) -> f64,
    threshold: f64,
) -> Result<Option<f64>> {
    settling_time(&traj.series(select), traj.dt, threshold)
}

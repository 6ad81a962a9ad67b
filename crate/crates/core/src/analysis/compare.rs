use nalgebra::SVector;
use rayon::prelude::*;

use crate::controller::{AnyController, ControlLaw};
use crate::dynamics::{Plant, Simulation, Trajectory};
use crate::{Error, Result};

/// Paired runs of several controllers on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<const N: usize> {
    pub names: Vec<String>,
    pub runs: Vec<Trajectory<N>>,
}

impl<const N: usize> Comparison<N> {
    pub fn get(&self, name: &str) -> Option<&Trajectory<N>> {
        self.names.iter().position(|n| n == name).map(|i| &self.runs[i])
    }

    /// One row per time step; each controller contributes a column group
    /// prefixed with its name.
    pub fn to_csv(&self) -> String {
        const COLUMNS: [&str; 7] = ["theta", "wb", "wb_lp", "vb", "F", "T", "energy"];
        let mut header = vec!["t".to_string()];
        for name in &self.names {
            header.extend(COLUMNS.iter().map(|c| format!("{name}_{c}")));
        }
        let mut out = header.join(",");
        out.push('\n');
        let rows = self.runs.iter().map(|r| r.len()).min().unwrap_or(0);
        let f = super::fmt_f64;
        for i in 0..rows {
            let mut line = vec![f(self.runs[0].samples[i].t)];
            for run in &self.runs {
                let s = &run.samples[i];
                line.extend(
                    [
                        s.tilt.y,
                        s.twist.w_b(),
                        s.filtered_rate.y,
                        s.twist.v_b(),
                        s.control.planar_force(),
                        s.control.planar_torque(),
                        s.energy,
                    ]
                    .map(f),
                );
            }
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Runs every controller from the same initial state under the same
/// disturbances. Controllers are reset first; runs execute in parallel.
pub fn compare_controllers<P: Plant<N>, const N: usize>(
    sim: &Simulation<'_, P>,
    x0: SVector<f64, N>,
    controllers: Vec<(String, AnyController)>,
) -> Result<Comparison<N>> {
    if controllers.is_empty() {
        return Err(Error::param("controllers", "need at least one"));
    }
    let mut names: Vec<&String> = controllers.iter().map(|(n, _)| n).collect();
    names.sort();
    names.dedup();
    if names.len() != controllers.len() {
        return Err(Error::param("controllers", "names must be unique"));
    }
    let runs = controllers
        .into_par_iter()
        .map(|(name, mut c)| {
            c.reset();
            sim.run(x0, &mut c).map(|t| (name, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let (names, runs) = runs.into_iter().unzip();
    Ok(Comparison { names, runs })
}

//! Summary statistics over strategy-frequency time series.

use thiserror::Error;

use crate::agent::AbmTrajectory;
use crate::dynamics::Trajectory;

/// ODE frequencies never reach a vertex in finite time.
pub const ODE_FIXATION: f64 = 1.0 - 1e-6;

/// Deviations from the window mean at or below this are treated as on-mean.
const CROSSING_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("trajectory is empty")]
    Empty,
    #[error("window fraction {0} must lie in (0, 1]")]
    Window(f64),
    #[error("trajectories have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("time stamps differ at sample {0}")]
    GridMismatch(usize),
}

/// A three-strategy frequency series.
pub trait FrequencySeries {
    fn frequencies(&self) -> Vec<[f64; 3]>;
    /// A component at or above this value counts as fixation.
    fn fixation_threshold(&self) -> f64;
}

impl FrequencySeries for Trajectory {
    fn frequencies(&self) -> Vec<[f64; 3]> {
        self.states.iter().map(|s| s.as_array()).collect()
    }

    fn fixation_threshold(&self) -> f64 {
        ODE_FIXATION
    }
}

impl FrequencySeries for AbmTrajectory {
    fn frequencies(&self) -> Vec<[f64; 3]> {
        self.rows.iter().map(|r| r.fractions).collect()
    }

    // count == M
    fn fixation_threshold(&self) -> f64 {
        1.0
    }
}

impl FrequencySeries for [[f64; 3]] {
    fn frequencies(&self) -> Vec<[f64; 3]> {
        self.to_vec()
    }

    fn fixation_threshold(&self) -> f64 {
        ODE_FIXATION
    }
}

impl FrequencySeries for Vec<[f64; 3]> {
    fn frequencies(&self) -> Vec<[f64; 3]> {
        self.clone()
    }

    fn fixation_threshold(&self) -> f64 {
        ODE_FIXATION
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub time_means: [f64; 3],
    /// Number of times each series crosses its own window mean.
    pub oscillation_counts: [usize; 3],
    /// Strategy index fixated at the final sample.
    pub fixated: Option<usize>,
    pub amplitude: [f64; 3],
    pub minimum: [f64; 3],
}

/// Number of sign changes of `v - mean`, ignoring samples on the mean.
pub fn mean_crossings(values: &[f64], mean: f64) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for &v in values {
        let d = v - mean;
        let sign = if d > CROSSING_EPS {
            1
        } else if d < -CROSSING_EPS {
            -1
        } else {
            continue;
        };
        if last != 0 && sign != last {
            count += 1;
        }
        last = sign;
    }
    count
}

fn tail(len: usize, window: f64) -> Result<usize, AnalysisError> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(AnalysisError::Window(window));
    }
    let keep = ((len as f64 * window).ceil() as usize).clamp(1, len);
    Ok(len - keep)
}

/// Statistics over the trailing `window` fraction of the series.
pub fn stats<T: FrequencySeries + ?Sized>(traj: &T, window: f64) -> Result<TrajectoryStats, AnalysisError> {
    let rows = traj.frequencies();
    if rows.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let rows = &rows[tail(rows.len(), window)?..];
    let n = rows.len() as f64;

    let mut time_means = [0.0; 3];
    let mut oscillation_counts = [0; 3];
    let mut amplitude = [0.0; 3];
    let mut minimum = [0.0; 3];
    for i in 0..3 {
        let series: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        let mean = series.iter().sum::<f64>() / n;
        let (lo, hi) = series
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        time_means[i] = mean;
        oscillation_counts[i] = mean_crossings(&series, mean);
        amplitude[i] = hi - lo;
        minimum[i] = lo;
    }
    let last = rows[rows.len() - 1];
    let threshold = traj.fixation_threshold();
    let fixated = (0..3).find(|&i| last[i] >= threshold);
    Ok(TrajectoryStats {
        time_means,
        oscillation_counts,
        fixated,
        amplitude,
        minimum,
    })
}

/// Mean L1 distance between matched samples of two trajectories.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<f64, AnalysisError> {
    if a.len() != b.len() || a.times.len() != b.times.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(AnalysisError::Empty);
    }
    for (k, (ta, tb)) in a.times.iter().zip(&b.times).enumerate() {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(tb.abs()).max(1.0) {
            return Err(AnalysisError::GridMismatch(k));
        }
    }
    let total: f64 = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(s, t)| {
            let (u, v) = (s.as_array(), t.as_array());
            (0..3).map(|i| (u[i] - v[i]).abs()).sum::<f64>()
        })
        .sum();
    Ok(total / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::SimplexState;
    use std::f64::consts::PI;

    #[test]
    fn constant_vertex() {
        let t = Trajectory::constant(SimplexState::vertex(2), 0.1, 50);
        let s = stats(&t, 1.0).unwrap();
        assert_eq!(s.fixated, Some(2));
        assert_eq!(s.oscillation_counts, [0; 3]);
        assert_eq!(s.amplitude, [0.0; 3]);
        assert_eq!(s.time_means, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn sinusoid_three_periods() {
        let rows: Vec<[f64; 3]> = (0..3000)
            .map(|k| {
                let w = 0.1 * (2.0 * PI * 3.0 * k as f64 / 3000.0 + 0.3).sin();
                [1.0 / 3.0 + w, 1.0 / 3.0 - w, 1.0 / 3.0]
            })
            .collect();
        let s = stats(&rows, 1.0).unwrap();
        assert_eq!(s.oscillation_counts, [6, 6, 0]);
        assert_eq!(s.fixated, None);
        assert!((s.amplitude[0] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn bad_inputs() {
        let empty: Vec<[f64; 3]> = Vec::new();
        assert_eq!(stats(&empty, 1.0), Err(AnalysisError::Empty));
        let one = vec![[1.0, 0.0, 0.0]];
        assert_eq!(stats(&one, 0.0), Err(AnalysisError::Window(0.0)));
        assert_eq!(stats(&one, 1.5), Err(AnalysisError::Window(1.5)));
        assert!(stats(&one, 1e-9).is_ok());
    }

    #[test]
    fn distances() {
        let a = Trajectory::constant(SimplexState::vertex(0), 0.5, 10);
        let b = Trajectory::constant(SimplexState::vertex(1), 0.5, 10);
        assert_eq!(trajectory_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(trajectory_distance(&a, &b).unwrap(), 2.0);
        let c = Trajectory::constant(SimplexState::vertex(1), 0.25, 10);
        assert_eq!(trajectory_distance(&a, &c), Err(AnalysisError::GridMismatch(1)));
        let d = Trajectory::constant(SimplexState::vertex(1), 0.5, 9);
        assert!(matches!(trajectory_distance(&a, &d), Err(AnalysisError::LengthMismatch(..))));
    }

    #[test]
    fn abm_fixation_needs_full_count() {
        use crate::agent::{AbmRow, AbmTrajectory};
        let row = |f: [f64; 3]| AbmRow { generation: 0, fractions: f, mean_payoff: 0.0 };
        let t = AbmTrajectory { population: 100, rows: vec![row([0.99, 0.01, 0.0])] };
        assert_eq!(stats(&t, 1.0).unwrap().fixated, None);
        let t = AbmTrajectory { population: 100, rows: vec![row([0.0, 0.0, 1.0])] };
        assert_eq!(stats(&t, 1.0).unwrap().fixated, Some(2));
    }
}

//! Per-step time series shared by the full simulator and the reduced
//! recursion.
//!
//! Each record carries the marked/unmarked relative probabilities, the
//! internal-graph norm, and the three arc-class representatives
//! `(a_t, b_t, c_t)`, so any downstream consumer can cross-check the two
//! computational paths against each other.

use serde::{Deserialize, Serialize};

/// One time step of an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Time step.
    pub t: usize,
    /// Relative probability of the marked vertex. Zero at `t = 0`, where the
    /// internal field vanishes and the normalized value is undefined.
    pub nu_marked: f64,
    /// Relative probability of any single unmarked vertex (all unmarked
    /// vertices are equivalent by symmetry).
    pub nu_unmarked: f64,
    /// `ℓ²` norm of the state restricted to internal arcs.
    pub norm_kn: f64,
    /// Common amplitude on arcs into the marked vertex.
    pub a: f64,
    /// Common amplitude on arcs out of the marked vertex.
    pub b: f64,
    /// Common amplitude on arcs avoiding the marked vertex.
    pub c: f64,
}

/// A recorded evolution for one model size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    /// Number of internal vertices `N`.
    pub n_vertices: usize,
    /// Records for `t = 0 ..= t_max`, in order.
    pub records: Vec<StepRecord>,
}

impl TimeSeries {
    pub fn new(n_vertices: usize) -> Self {
        TimeSeries {
            n_vertices,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The marked-vertex probability column.
    pub fn nu_marked(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.nu_marked).collect()
    }

    /// Largest absolute difference between the `nu_marked` columns of two
    /// series, over their common length.
    pub fn max_nu_deviation(&self, other: &TimeSeries) -> f64 {
        self.records
            .iter()
            .zip(&other.records)
            .map(|(x, y)| (x.nu_marked - y.nu_marked).abs())
            .fold(0.0, f64::max)
    }
}

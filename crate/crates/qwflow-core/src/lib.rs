//! Simulator and spectral toolkit for a discrete-time coined walk with
//! constant inflow and outflow on the complete graph `K_N` with one marked
//! vertex.
//!
//! Three mutually cross-checking computational paths are provided:
//!
//! * [`graph`] — the full arc-space scattering dynamics on `K_N` with a
//!   semi-infinite tail attached to every vertex;
//! * [`reduced`] — the exact 3-dimensional recursion on the symmetry
//!   classes of arcs (into, out of, and avoiding the marked vertex);
//! * [`spectral`] — the closed form of the reduced dynamics through the
//!   eigendecomposition of its non-normal update matrix.
//!
//! [`analysis`] builds the long-time observables on top (stationary
//! probability, mixing times with certified horizons, pulsation peaks),
//! and [`export`] fixes the deterministic CSV/JSON output contracts used
//! by the `qwflow` binary.

pub mod analysis;
pub mod error;
pub mod export;
pub mod graph;
pub mod reduced;
pub mod series;
pub mod spectral;

pub use analysis::{
    default_peak_window, detect_peaks, limit_marked_probability, limit_unmarked_probability,
    mixing_time, pulsation_formula, pulsation_formula_error, refined_pulsation_formula,
    refined_pulsation_formula_error, MixingResult, PulsationReport,
};
pub use error::{Error, Result};
pub use graph::{evolve, ModelConfig, TailMode};
pub use reduced::{
    b_vector, evolve_reduced, nu_marked, nu_unmarked, reduced_step, stationary_state, t_matrix,
    Epsilon, ReducedState,
};
pub use series::{StepRecord, TimeSeries};
pub use spectral::{
    approx_alpha, closed_form_alpha, decompose, fit_perturbation, unperturbed_data, Branch,
    PerturbationFit, SpectralDecomp,
};

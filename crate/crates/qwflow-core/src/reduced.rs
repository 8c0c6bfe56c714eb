//! The 3-dimensional invariant-subspace recursion.
//!
//! On the complete graph with one marked vertex the walk restricted to the
//! internal arcs has a three-dimensional invariant subspace spanned by the
//! arc classes (into / out of / avoiding the marked vertex). This module
//! implements the raw class recursion `(a_t, b_t, c_t)`, its normalization
//! `α_t` whose Euclidean norm equals the internal-graph `ℓ²` norm, the affine
//! update `α_{t+1} = T(ε) α_t + b_ε` with `ε = √(2/N)`, and the stationary
//! fixed point.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::series::{StepRecord, TimeSeries};

/// Largest admissible perturbation parameter, attained at `N = 3`.
pub const EPS_MAX: f64 = 0.816_496_580_927_726_1; // sqrt(2/3)

/// The perturbation parameter `ε = √(2/N)` together with the vertex count it
/// came from, so class-size weights never re-derive `N` from a rounded `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon {
    value: f64,
    n_vertices: usize,
}

impl Epsilon {
    /// Builds `ε = √(2/N)`. Requires `N ≥ 3` so all three arc classes are
    /// nonempty.
    pub fn from_n(n_vertices: usize) -> Result<Self> {
        if n_vertices < 3 {
            return Err(Error::Config(format!(
                "need at least 3 vertices, got {n_vertices}"
            )));
        }
        Ok(Epsilon {
            value: (2.0 / n_vertices as f64).sqrt(),
            n_vertices,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn n(&self) -> usize {
        self.n_vertices
    }

    /// Diagonal weights `(√(N−1), √(N−1), √((N−1)(N−2)))` linking the class
    /// representatives to the normalized coordinates.
    pub fn weights(&self) -> Vector3<f64> {
        let n = self.n_vertices as f64;
        Vector3::new(
            (n - 1.0).sqrt(),
            (n - 1.0).sqrt(),
            ((n - 1.0) * (n - 2.0)).sqrt(),
        )
    }
}

/// Normalized reduced state `α_t` plus its time stamp.
///
/// The stationary state uses `time == usize::MAX` as an "infinite time"
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub alpha: Vector3<f64>,
    pub time: usize,
}

impl ReducedState {
    /// The zero initial state.
    pub fn initial() -> Self {
        ReducedState {
            alpha: Vector3::zeros(),
            time: 0,
        }
    }

    /// Class representatives `(a, b, c)` recovered through the diagonal
    /// weights.
    pub fn to_class_amplitudes(&self, eps: &Epsilon) -> (f64, f64, f64) {
        let w = eps.weights();
        (
            self.alpha[0] / w[0],
            self.alpha[1] / w[1],
            self.alpha[2] / w[2],
        )
    }
}

/// The update matrix
/// `T(ε) = [0, −1+ε², √(2ε²(1−ε²)); −1+ε², 0, 0; 0, √(2ε²(1−ε²)), 1−2ε²]`.
///
/// `ε = 0` is allowed and yields the unperturbed limit (whose `(3,3)` entry
/// is 1, consistent with spectrum `{−1, 1, 1}`).
pub fn t_matrix(eps: f64) -> Matrix3<f64> {
    let e2 = eps * eps;
    let s = (2.0 * e2 * (1.0 - e2)).sqrt();
    Matrix3::new(
        0.0,        -1.0 + e2, s,
        -1.0 + e2,  0.0,       0.0,
        0.0,        s,         1.0 - 2.0 * e2,
    )
}

/// The affine inflow term `b_ε = (ε√(2−ε²), −ε√(2−ε²), √(4−6ε²+2ε⁴))`.
pub fn b_vector(eps: f64) -> Vector3<f64> {
    let e2 = eps * eps;
    let head = eps * (2.0 - e2).sqrt();
    Vector3::new(head, -head, (4.0 - 6.0 * e2 + 2.0 * e2 * e2).sqrt())
}

/// One step of the normalized recursion `α_{t+1} = T(ε) α_t + b_ε`.
pub fn reduced_step(state: &ReducedState, eps: &Epsilon) -> ReducedState {
    ReducedState {
        alpha: t_matrix(eps.value()) * state.alpha + b_vector(eps.value()),
        time: state.time + 1,
    }
}

/// One step of the raw class recursion,
/// `(a,b,c) ↦ M (a,b,c) + (2/N)(1,−1,1)` with
/// `M = [0, −1+2/N, 2−4/N; −1+2/N, 0, 0; 0, 2/N, 1−4/N]`.
pub fn unnormalized_step(a: f64, b: f64, c: f64, n_vertices: usize) -> (f64, f64, f64) {
    let n = n_vertices as f64;
    let q = 2.0 / n;
    (
        (-1.0 + q) * b + (2.0 - 2.0 * q) * c + q,
        (-1.0 + q) * a - q,
        q * b + (1.0 - 2.0 * q) * c + q,
    )
}

/// The stationary fixed point `α_∞ = (I − T(ε))⁻¹ b_ε`, solved directly.
///
/// Returns the state with the `usize::MAX` time sentinel. Fails if the solve
/// is singular (only at the unperturbed limit `ε = 0`, which is outside
/// `Epsilon`'s range) or if the fixed-point residual exceeds `1e−12`
/// relative to the state norm.
pub fn stationary_state(eps: &Epsilon) -> Result<ReducedState> {
    solve_stationary(eps.value()).map(|alpha| ReducedState {
        alpha,
        time: usize::MAX,
    })
}

/// Fixed-point solve for a raw `ε`; `ε = 0` has no fixed point.
pub fn solve_stationary(eps: f64) -> Result<Vector3<f64>> {
    if eps <= 0.0 {
        return Err(Error::SingularSolve(
            "no fixed point at unperturbed limit".into(),
        ));
    }
    let t = t_matrix(eps);
    let b = b_vector(eps);
    let system = Matrix3::identity() - t;
    let alpha = system
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularSolve(format!("I - T(eps) singular at eps = {eps}")))?;
    let residual = (t * alpha + b - alpha).norm();
    if residual > 1e-12 * (1.0 + alpha.norm()) {
        return Err(Error::Numeric(format!(
            "fixed-point residual {residual:.3e} out of tolerance at eps = {eps}"
        )));
    }
    Ok(alpha)
}

/// Relative probability of the marked vertex, `α(1)² / ‖α‖²`.
pub fn nu_marked(state: &ReducedState) -> Result<f64> {
    let norm_sq = state.alpha.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::Numeric(
            "relative probability undefined for the zero state".into(),
        ));
    }
    Ok(state.alpha[0] * state.alpha[0] / norm_sq)
}

/// Relative probability of one unmarked vertex,
/// `(α(2)² + α(3)²) / ((N−1) ‖α‖²)`; the `N−1` unmarked vertices share the
/// complement of the marked-vertex probability equally.
pub fn nu_unmarked(state: &ReducedState, eps: &Epsilon) -> Result<f64> {
    let nu = nu_marked(state)?;
    Ok((1.0 - nu) / (eps.n() as f64 - 1.0))
}

/// Runs the reduced recursion for `t = 0 ..= t_max`, recording the same
/// observables as the full simulator.
pub fn evolve_reduced(eps: &Epsilon, t_max: usize) -> TimeSeries {
    let t = t_matrix(eps.value());
    let b = b_vector(eps.value());
    let w = eps.weights();
    let n = eps.n() as f64;
    let mut series = TimeSeries::new(eps.n());
    let mut alpha = Vector3::zeros();
    for step in 0..=t_max {
        if step > 0 {
            alpha = t * alpha + b;
        }
        let norm_sq = alpha.norm_squared();
        let (nu_m, nu_u) = if norm_sq > 0.0 {
            let nu = alpha[0] * alpha[0] / norm_sq;
            (nu, (1.0 - nu) / (n - 1.0))
        } else {
            (0.0, 0.0)
        };
        series.records.push(StepRecord {
            t: step,
            nu_marked: nu_m,
            nu_unmarked: nu_u,
            norm_kn: norm_sq.sqrt(),
            a: alpha[0] / w[0],
            b: alpha[1] / w[1],
            c: alpha[2] / w[2],
        });
    }
    series
}

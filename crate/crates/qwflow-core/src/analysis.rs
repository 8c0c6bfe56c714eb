//! Long-time observables: the stationary marked-vertex probability, mixing
//! times with certified horizons, envelope slopes, and the pulsation
//! profile with peak detection.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduced::{
    nu_marked, nu_unmarked, reduced_step, stationary_state, Epsilon, ReducedState,
};
use crate::series::TimeSeries;
use crate::spectral::{decompose, Branch};

/// Stationary relative probability at the marked vertex.
pub fn limit_marked_probability(n: usize) -> Result<f64> {
    let eps = Epsilon::from_n(n)?;
    nu_marked(&stationary_state(&eps)?)
}

/// Stationary relative probability at any one unmarked vertex.
pub fn limit_unmarked_probability(n: usize) -> Result<f64> {
    let eps = Epsilon::from_n(n)?;
    nu_unmarked(&stationary_state(&eps)?, &eps)
}

/// Outcome of a mixing-time computation.
///
/// `t_theta` is the last step at which the distance to the stationary state
/// is still at least `e^{−θ}`; all later steps up to the horizon are below,
/// and `converged` certifies (via the spectral tail bound) that every step
/// beyond the horizon is below as well.
#[derive(Debug, Clone, Serialize)]
pub struct MixingResult {
    pub n_vertices: usize,
    pub theta: f64,
    pub t_theta: usize,
    pub horizon_used: usize,
    pub converged: bool,
}

/// Index (1-based step) of the last entry with `d ≥ bound`; `0` when every
/// entry is already below the bound. `distances[k]` is the distance after
/// step `k + 1`.
pub fn last_violation_index(distances: &[f64], bound: f64) -> usize {
    distances
        .iter()
        .rposition(|&d| d >= bound)
        .map(|k| k + 1)
        .unwrap_or(0)
}

/// Mixing time to accuracy `e^{−θ}` with a certified iteration horizon.
///
/// The horizon is `⌈horizon_factor · N ln N⌉`; after scanning it, the
/// spectral tail bound `C ρ^{t}` (with `C = Σ ‖P_i b‖ / |1 − λ_i|` and `ρ`
/// the spectral radius) certifies whether the distance can ever rise above
/// the bound again. `converged = false` means the horizon was too short to
/// rule that out, not that the scan itself failed.
pub fn mixing_time(n: usize, theta: f64, horizon_factor: f64) -> Result<MixingResult> {
    let eps = Epsilon::from_n(n)?;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "theta must be positive and finite, got {theta}"
        )));
    }
    if !(horizon_factor >= 2.0 && horizon_factor.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon_factor must be at least 2, got {horizon_factor}"
        )));
    }
    let bound = (-theta).exp();
    let nf = n as f64;
    let horizon = (horizon_factor * nf * nf.ln()).ceil() as usize;

    let target = stationary_state(&eps)?.alpha;
    let mut state = ReducedState::initial();
    let mut t_theta = 0usize;
    for t in 1..=horizon {
        state = reduced_step(&state, &eps);
        if (target - state.alpha).norm() >= bound {
            t_theta = t;
        }
    }

    let decomp = decompose(eps.value())?;
    let mut tail_coeff = 0.0;
    for branch in Branch::ALL {
        let lam = decomp.eigenvalue(branch);
        tail_coeff += decomp.projected_inflow(branch).norm() / (Complex64::ONE - lam).norm();
    }
    let rho = decomp.spectral_radius();
    let converged = tail_coeff * rho.powi(horizon as i32 + 1) < bound;

    Ok(MixingResult {
        n_vertices: n,
        theta,
        t_theta,
        horizon_used: horizon,
        converged,
    })
}

/// Distances `d_t = ‖α_∞ − α_t‖` for `t = 0..=t_max`.
pub fn distance_series(n: usize, t_max: usize) -> Result<Vec<f64>> {
    let eps = Epsilon::from_n(n)?;
    let target = stationary_state(&eps)?.alpha;
    let mut state = ReducedState::initial();
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(target.norm());
    for _ in 1..=t_max {
        state = reduced_step(&state, &eps);
        out.push((target - state.alpha).norm());
    }
    Ok(out)
}

/// Least-squares slope of `ln values[t]` over `t ∈ [t0, t1]` (per step).
pub fn fit_log_slope(values: &[f64], t0: usize, t1: usize) -> Result<f64> {
    if t0 >= t1 || t1 >= values.len() {
        return Err(Error::InvalidArgument(format!(
            "slope window [{t0}, {t1}] does not fit a series of length {}",
            values.len()
        )));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let count = (t1 - t0 + 1) as f64;
    for t in t0..=t1 {
        if values[t] <= 0.0 {
            return Err(Error::Numeric(format!(
                "cannot fit a log slope through non-positive value at t = {t}"
            )));
        }
        let x = t as f64;
        let y = values[t].ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = count * sxx - sx * sx;
    if denom.abs() < f64::EPSILON {
        return Err(Error::Numeric("degenerate slope window".into()));
    }
    Ok((count * sxy - sx * sy) / denom)
}

/// The damped-oscillation profile for the marked-vertex probability,
/// `ν(t) = (1/2)(1 − c cos(t√(2/N)))² / (1 + c²)` with `c = e^{−(5/2)t/N}`.
pub fn pulsation_formula(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let c = (-2.5 * t / nf).exp();
    let phase = t * (2.0 / nf).sqrt();
    0.5 * (1.0 - c * phase.cos()).powi(2) / (1.0 + c * c)
}

/// Refit of the profile with the envelope decaying at the conjugate-pair
/// modulus rate and the normalizer matching the same two-branch
/// interference: `ν(t) = (1/2)(1 − c cos εt)² / (1 − 2c cos εt + c²)` with
/// `c = e^{−(3/4)ε²t}`. Tracks the exact dynamics much more closely than
/// [`pulsation_formula`].
pub fn refined_pulsation_formula(t: f64, n: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let eps_sq = 2.0 / nf;
    let c = (-0.75 * eps_sq * t).exp();
    let cos = (t * eps_sq.sqrt()).cos();
    let denom = 1.0 - 2.0 * c * cos + c * c;
    0.5 * (1.0 - c * cos).powi(2) / denom
}

/// Peak structure of a probability time series.
#[derive(Debug, Clone, Serialize)]
pub struct PulsationReport {
    pub peak_times: Vec<usize>,
    pub peak_values: Vec<f64>,
    /// Mean gap between consecutive detected peaks in the pulsation window
    /// `t ≤ N`; `None` when fewer than two peaks fall in that window.
    pub fitted_period: Option<f64>,
    /// `2π/ε = 2π √(N/2)`.
    pub predicted_period: f64,
    /// `π/ε`.
    pub predicted_first_peak: f64,
}

/// Default detection window: half the predicted period, rounded up. A
/// narrower window admits the secondary mid-period bump, whose topographic
/// prominence exceeds the main peaks'; half a period is the smallest width
/// that sees the next main peak from it.
pub fn default_peak_window(n: usize) -> usize {
    let eps = (2.0 / n as f64).sqrt();
    (std::f64::consts::PI / eps).ceil() as usize
}

/// Base elevation on one side of a candidate peak: the minimum reached
/// while walking away until strictly higher ground (or the series edge).
fn side_base(nu: &[f64], t: usize, step: i64) -> f64 {
    let mut best = nu[t];
    let mut i = t as i64 + step;
    while i >= 0 && (i as usize) < nu.len() {
        let v = nu[i as usize];
        if v > nu[t] {
            break;
        }
        best = best.min(v);
        i += step;
    }
    best
}

/// Detects pulsation peaks.
///
/// A step `t` is a peak when it is the earliest maximum of the window
/// `[t − window, t + window]` (clipped on the left, required in full on the
/// right so edge artifacts cannot be promoted) and its topographic
/// prominence is at least 5 % of the series range. The series must cover
/// the pulsation window `t ≤ N`.
pub fn detect_peaks(series: &TimeSeries, window: usize) -> Result<PulsationReport> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = series.n_vertices;
    if series.len() <= n {
        return Err(Error::InvalidArgument(format!(
            "series of length {} does not cover the pulsation window t ≤ {n}",
            series.len()
        )));
    }
    let eps = Epsilon::from_n(n)?;
    let nu = series.nu_marked();
    let len = nu.len();
    let max = nu.iter().cloned().fold(f64::MIN, f64::max);
    let min = nu.iter().cloned().fold(f64::MAX, f64::min);
    let threshold = 0.05 * (max - min);

    let mut peak_times = Vec::new();
    let mut peak_values = Vec::new();
    if max > min {
        for t in 1..len - 1 {
            if t + window > len - 1 {
                break;
            }
            let lo = t.saturating_sub(window);
            let hi = t + window;
            let mut argmax = lo;
            for k in lo + 1..=hi {
                if nu[k] > nu[argmax] {
                    argmax = k;
                }
            }
            if argmax != t {
                continue;
            }
            let base = side_base(&nu, t, -1).max(side_base(&nu, t, 1));
            if nu[t] - base >= threshold {
                peak_times.push(t);
                peak_values.push(nu[t]);
            }
        }
    }

    let in_window: Vec<usize> = peak_times.iter().cloned().filter(|&t| t <= n).collect();
    let fitted_period = if in_window.len() >= 2 {
        let span = (in_window[in_window.len() - 1] - in_window[0]) as f64;
        Some(span / (in_window.len() - 1) as f64)
    } else {
        None
    };

    let period = 2.0 * std::f64::consts::PI / eps.value();
    Ok(PulsationReport {
        peak_times,
        peak_values,
        fitted_period,
        predicted_period: period,
        predicted_first_peak: period / 2.0,
    })
}

fn profile_error(n: usize, t_max: usize, profile: impl Fn(f64, usize) -> f64) -> Result<f64> {
    let eps = Epsilon::from_n(n)?;
    if t_max > n {
        return Err(Error::InvalidArgument(format!(
            "profile comparison is confined to the pulsation window t ≤ {n}, got t_max = {t_max}"
        )));
    }
    let mut state = ReducedState::initial();
    // the zero initial state has no arc weight anywhere: ν_0 = 0
    let mut worst = profile(0.0, n).abs();
    for t in 1..=t_max {
        state = reduced_step(&state, &eps);
        worst = worst.max((nu_marked(&state)? - profile(t as f64, n)).abs());
    }
    Ok(worst)
}

/// Maximum deviation of [`pulsation_formula`] from the exact dynamics over
/// `t ≤ t_max` (preconditioned on `t_max ≤ N`).
pub fn pulsation_formula_error(n: usize, t_max: usize) -> Result<f64> {
    profile_error(n, t_max, pulsation_formula)
}

/// Maximum deviation of [`refined_pulsation_formula`] from the exact
/// dynamics over `t ≤ t_max` (preconditioned on `t_max ≤ N`).
pub fn refined_pulsation_formula_error(n: usize, t_max: usize) -> Result<f64> {
    profile_error(n, t_max, refined_pulsation_formula)
}

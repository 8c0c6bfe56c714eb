//! Exact finite simulation of the hedgehog graph: the complete graph `K_N`
//! with a semi-infinite tail glued to every vertex.
//!
//! The walk lives on arcs. Internal vertices scatter with the Grover coin
//! `Gr(N) = (2/N)J − I`, the marked vertex applies `−Gr(N)`, and tail
//! vertices apply `Gr(2) = σ_X`, which is free transport. Two tail
//! realizations are provided: `TruncatedTails` carries explicit tail arcs of
//! length `t_max + 1` (exact by finite propagation speed), while
//! `SourceSink` keeps only the internal arcs, injects amplitude 1 from each
//! tail every step, and discards outflow. The two are equivalent on internal
//! arcs for every step within the horizon; that equivalence is a tested
//! invariant, not an assumption.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{StepRecord, TimeSeries};

/// How the semi-infinite tails are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// Explicit tail arcs, truncated at length `t_max + 1`.
    TruncatedTails,
    /// Constant inflow, discarded outflow; state size independent of `t_max`.
    SourceSink,
}

/// Full-simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    /// Number of internal vertices `N ≥ 3`.
    pub n_vertices: usize,
    /// Index of the marked vertex, in `[0, N)`.
    pub marked: usize,
    /// Time horizon.
    pub t_max: usize,
    pub tail_mode: TailMode,
}

impl ModelConfig {
    pub fn new(n_vertices: usize, marked: usize, t_max: usize, tail_mode: TailMode) -> Result<Self> {
        let config = ModelConfig {
            n_vertices,
            marked,
            t_max,
            tail_mode,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vertices < 3 {
            return Err(Error::Config(format!(
                "need at least 3 vertices for the three arc classes, got {}",
                self.n_vertices
            )));
        }
        if self.marked >= self.n_vertices {
            return Err(Error::Config(format!(
                "marked vertex {} out of range for N = {}",
                self.marked, self.n_vertices
            )));
        }
        Ok(())
    }
}

/// Symmetry class of an internal arc relative to the marked vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    /// Terminates at the marked vertex.
    Plus,
    /// Originates at the marked vertex.
    Minus,
    /// Avoids the marked vertex.
    Zero,
}

/// Dense arc enumeration: internal arcs first, then inward tail arcs, then
/// outward tail arcs.
#[derive(Debug, Clone)]
pub struct ArcIndex {
    pub n_vertices: usize,
    pub marked: usize,
    /// Tail truncation length (1 in source-sink mode).
    pub tail_len: usize,
    pub tail_mode: TailMode,
}

/// Builds the arc enumeration for a configuration. Truncation length
/// `t_max + 1` guarantees nothing reflected or missing at the boundary can
/// reach the internal graph within `t_max` steps.
pub fn build_arc_index(config: &ModelConfig) -> Result<ArcIndex> {
    config.validate()?;
    let tail_len = match config.tail_mode {
        TailMode::TruncatedTails => config.t_max + 1,
        TailMode::SourceSink => 1,
    };
    Ok(ArcIndex {
        n_vertices: config.n_vertices,
        marked: config.marked,
        tail_len,
        tail_mode: config.tail_mode,
    })
}

impl ArcIndex {
    pub fn internal_count(&self) -> usize {
        self.n_vertices * (self.n_vertices - 1)
    }

    pub fn tail_count(&self) -> usize {
        2 * self.n_vertices * self.tail_len
    }

    pub fn total_count(&self) -> usize {
        self.internal_count() + self.tail_count()
    }

    /// Index of the internal arc `origin → terminus`.
    pub fn internal(&self, origin: usize, terminus: usize) -> usize {
        debug_assert!(origin != terminus);
        let off = if terminus < origin {
            terminus
        } else {
            terminus - 1
        };
        origin * (self.n_vertices - 1) + off
    }

    /// Index of the inward tail arc of vertex `u` whose terminus sits at
    /// distance `d` from the internal graph (`d = 0` ends at `u` itself).
    pub fn tail_in(&self, u: usize, d: usize) -> usize {
        debug_assert!(d < self.tail_len);
        self.internal_count() + u * self.tail_len + d
    }

    /// Index of the outward tail arc of vertex `u` at distance `d`.
    pub fn tail_out(&self, u: usize, d: usize) -> usize {
        debug_assert!(d < self.tail_len);
        self.internal_count() + self.n_vertices * self.tail_len + u * self.tail_len + d
    }

    /// Index of the reversed arc, resolvable in O(1) for every arc.
    pub fn inverse(&self, idx: usize) -> usize {
        let ic = self.internal_count();
        if idx < ic {
            let origin = idx / (self.n_vertices - 1);
            let off = idx % (self.n_vertices - 1);
            let terminus = if off < origin { off } else { off + 1 };
            self.internal(terminus, origin)
        } else if idx < ic + self.n_vertices * self.tail_len {
            idx + self.n_vertices * self.tail_len
        } else {
            idx - self.n_vertices * self.tail_len
        }
    }

    /// Symmetry class of an internal arc.
    pub fn class_of(&self, origin: usize, terminus: usize) -> ArcClass {
        if terminus == self.marked {
            ArcClass::Plus
        } else if origin == self.marked {
            ArcClass::Minus
        } else {
            ArcClass::Zero
        }
    }

    /// Two smallest unmarked vertices, used as class representatives.
    fn representatives(&self) -> (usize, usize) {
        let mut reps = (0..self.n_vertices).filter(|&u| u != self.marked);
        (reps.next().unwrap(), reps.next().unwrap())
    }
}

/// The walk state: one complex amplitude per indexed arc.
///
/// The dynamics of this model is real-valued; complex storage lets the
/// spectral machinery share kernels, and reality is a checked property.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcField {
    pub amplitudes: Vec<Complex64>,
    pub time: usize,
}

impl ArcField {
    /// `ℓ²` norm over every indexed arc.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute imaginary part over all arcs.
    pub fn max_imag(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}

/// The inflow initial state: amplitude 1 on every inward tail arc, zero
/// elsewhere.
pub fn initial_state(index: &ArcIndex) -> ArcField {
    let mut amplitudes = vec![Complex64::ZERO; index.total_count()];
    for u in 0..index.n_vertices {
        for d in 0..index.tail_len {
            amplitudes[index.tail_in(u, d)] = Complex64::ONE;
        }
    }
    ArcField {
        amplitudes,
        time: 0,
    }
}

/// One evolution step: Grover scattering at internal vertices (sign-flipped
/// at the marked one), free transport along tails.
pub fn step(field: &ArcField, config: &ModelConfig, index: &ArcIndex) -> Result<ArcField> {
    if config.tail_mode == TailMode::TruncatedTails && field.time >= config.t_max {
        return Err(Error::Horizon {
            step: field.time + 1,
            horizon: config.t_max,
        });
    }
    let n = index.n_vertices;
    let coin = Complex64::new(2.0 / n as f64, 0.0);
    let old = &field.amplitudes;
    let mut new = vec![Complex64::ZERO; old.len()];

    for u in 0..n {
        // Sum of all amplitudes terminating at u: N−1 internal plus one tail.
        let mut s = old[index.tail_in(u, 0)];
        for v in 0..n {
            if v != u {
                s += old[index.internal(v, u)];
            }
        }
        let sign = if u == index.marked { -1.0 } else { 1.0 };
        let fed = coin * s;
        for w in 0..n {
            if w != u {
                new[index.internal(u, w)] = sign * (fed - old[index.internal(w, u)]);
            }
        }
        new[index.tail_out(u, 0)] = sign * (fed - old[index.tail_in(u, 0)]);
    }

    match config.tail_mode {
        TailMode::TruncatedTails => {
            // Free transport: inward arcs shift toward the graph (zero fill
            // at the truncation boundary), outward arcs shift away.
            for u in 0..n {
                for d in 0..index.tail_len - 1 {
                    new[index.tail_in(u, d)] = old[index.tail_in(u, d + 1)];
                }
                new[index.tail_in(u, index.tail_len - 1)] = Complex64::ZERO;
                for d in (1..index.tail_len).rev() {
                    new[index.tail_out(u, d)] = old[index.tail_out(u, d - 1)];
                }
            }
        }
        TailMode::SourceSink => {
            // Constant unit inflow; the freshly written tail_out slot is the
            // discarded outflow of this step.
            for u in 0..n {
                new[index.tail_in(u, 0)] = Complex64::ONE;
            }
        }
    }

    Ok(ArcField {
        amplitudes: new,
        time: field.time + 1,
    })
}

/// Relative finding probabilities of vertex `u`: the unnormalized
/// `ν̃(u) = Σ |ψ(a)|²` over internal arcs terminating at `u`, and the
/// normalized `ν(u) = ν̃(u) / Σ_v ν̃(v)` when the internal field is nonzero.
pub fn relative_prob(field: &ArcField, index: &ArcIndex, u: usize) -> (f64, Option<f64>) {
    let nutil_u = nutil(field, index, u);
    let total: f64 = (0..index.n_vertices).map(|v| nutil(field, index, v)).sum();
    let nu = if total > 0.0 {
        Some(nutil_u / total)
    } else {
        None
    };
    (nutil_u, nu)
}

fn nutil(field: &ArcField, index: &ArcIndex, u: usize) -> f64 {
    (0..index.n_vertices)
        .filter(|&v| v != u)
        .map(|v| field.amplitudes[index.internal(v, u)].norm_sqr())
        .sum()
}

/// Largest within-class amplitude deviation over the three internal arc
/// classes; zero when the state respects the symmetry exactly.
pub fn class_spread(field: &ArcField, index: &ArcIndex) -> f64 {
    let (r0, r1) = index.representatives();
    let reps = [
        field.amplitudes[index.internal(r0, index.marked)],
        field.amplitudes[index.internal(index.marked, r0)],
        field.amplitudes[index.internal(r0, r1)],
    ];
    let mut spread: f64 = 0.0;
    for o in 0..index.n_vertices {
        for t in 0..index.n_vertices {
            if o == t {
                continue;
            }
            let rep = match index.class_of(o, t) {
                ArcClass::Plus => reps[0],
                ArcClass::Minus => reps[1],
                ArcClass::Zero => reps[2],
            };
            spread = spread.max((field.amplitudes[index.internal(o, t)] - rep).norm());
        }
    }
    spread
}

/// Drives `step` over `t = 0 ..= t_max`, recording the marked/unmarked
/// probabilities, the internal norm, and the class representatives.
pub fn evolve(config: &ModelConfig) -> Result<TimeSeries> {
    let index = build_arc_index(config)?;
    let (r0, _) = index.representatives();
    let n = config.n_vertices as f64;
    let mut field = initial_state(&index);
    let mut series = TimeSeries::new(config.n_vertices);

    for t in 0..=config.t_max {
        if t > 0 {
            field = step(&field, config, &index)?;
        }
        let marked_nutil = nutil(&field, &index, config.marked);
        let total: f64 = (0..index.n_vertices)
            .map(|v| nutil(&field, &index, v))
            .sum();
        let (nu_m, nu_u) = if total > 0.0 {
            let nu = marked_nutil / total;
            (nu, (1.0 - nu) / (n - 1.0))
        } else {
            (0.0, 0.0)
        };
        series.records.push(StepRecord {
            t,
            nu_marked: nu_m,
            nu_unmarked: nu_u,
            norm_kn: total.sqrt(),
            a: field.amplitudes[index.internal(r0, index.marked)].re,
            b: field.amplitudes[index.internal(index.marked, r0)].re,
            c: field.amplitudes[index.internal(r0, index.representatives().1)].re,
        });
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn config(n: usize, t_max: usize, mode: TailMode) -> ModelConfig {
        ModelConfig::new(n, 0, t_max, mode).unwrap()
    }

    // ─── Index construction ─────────────────────────────────────────────

    #[test]
    fn rejects_invalid_configurations() {
        assert!(ModelConfig::new(2, 0, 5, TailMode::SourceSink).is_err());
        assert!(ModelConfig::new(5, 5, 5, TailMode::SourceSink).is_err());
        assert!(ModelConfig::new(5, 4, 5, TailMode::SourceSink).is_ok());
    }

    #[test]
    fn arc_counts_smallest_graph() {
        // N = 3 with tails of length 2: 6 internal + 12 tail arcs.
        let index = build_arc_index(&config(3, 1, TailMode::TruncatedTails)).unwrap();
        assert_eq!(index.tail_len, 2);
        assert_eq!(index.internal_count(), 6);
        assert_eq!(index.tail_count(), 12);
        assert_eq!(index.total_count(), 18);
    }

    #[test]
    fn internal_arc_count_n_100() {
        let index = build_arc_index(&config(100, 0, TailMode::SourceSink)).unwrap();
        assert_eq!(index.internal_count(), 9_900);
    }

    #[test]
    fn class_sizes_smallest_graph() {
        let index = build_arc_index(&config(3, 0, TailMode::SourceSink)).unwrap();
        let mut counts = [0usize; 3];
        for o in 0..3 {
            for t in 0..3 {
                if o != t {
                    match index.class_of(o, t) {
                        ArcClass::Plus => counts[0] += 1,
                        ArcClass::Minus => counts[1] += 1,
                        ArcClass::Zero => counts[2] += 1,
                    }
                }
            }
        }
        assert_eq!(counts, [2, 2, 2]);
    }

    #[test]
    fn index_is_a_bijection_with_o1_inverse() {
        let index = build_arc_index(&config(5, 3, TailMode::TruncatedTails)).unwrap();
        let mut seen = vec![false; index.total_count()];
        for o in 0..5 {
            for t in 0..5 {
                if o != t {
                    let idx = index.internal(o, t);
                    assert!(!seen[idx]);
                    seen[idx] = true;
                    assert_eq!(index.inverse(idx), index.internal(t, o));
                    assert_eq!(index.inverse(index.inverse(idx)), idx);
                }
            }
        }
        for u in 0..5 {
            for d in 0..index.tail_len {
                for idx in [index.tail_in(u, d), index.tail_out(u, d)] {
                    assert!(!seen[idx]);
                    seen[idx] = true;
                }
                assert_eq!(index.inverse(index.tail_in(u, d)), index.tail_out(u, d));
                assert_eq!(index.inverse(index.tail_out(u, d)), index.tail_in(u, d));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    // ─── Initial state ──────────────────────────────────────────────────

    #[test]
    fn initial_state_is_unit_inflow_only() {
        let index = build_arc_index(&config(3, 1, TailMode::TruncatedTails)).unwrap();
        let field = initial_state(&index);
        let ones = field
            .amplitudes
            .iter()
            .filter(|z| **z == Complex64::ONE)
            .count();
        let zeros = field
            .amplitudes
            .iter()
            .filter(|z| **z == Complex64::ZERO)
            .count();
        assert_eq!(ones, 6); // 2 inward arcs per tail × 3 tails
        assert_eq!(ones + zeros, index.total_count());
        for u in 0..3 {
            let (nutil_u, nu) = relative_prob(&field, &index, u);
            assert_eq!(nutil_u, 0.0);
            assert!(nu.is_none());
        }
        assert_eq!(field.time, 0);
    }

    // ─── Single-step scattering ─────────────────────────────────────────

    #[test]
    fn one_step_from_inflow_at_n_100() {
        let cfg = config(100, 3, TailMode::SourceSink);
        let index = build_arc_index(&cfg).unwrap();
        let field = step(&initial_state(&index), &cfg, &index).unwrap();
        // Every arc out of an unmarked vertex carries 2/N; out of the marked
        // vertex, −2/N.
        assert_abs_diff_eq!(field.amplitudes[index.internal(5, 9)].re, 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(field.amplitudes[index.internal(0, 9)].re, -0.02, epsilon = 1e-15);
        for u in 0..100 {
            let (nutil_u, nu) = relative_prob(&field, &index, u);
            assert_abs_diff_eq!(nutil_u, 0.0396, epsilon = 1e-12);
            assert_abs_diff_eq!(nu.unwrap(), 0.01, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalized_probabilities_sum_to_one_when_defined() {
        let cfg = config(7, 10, TailMode::SourceSink);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for _ in 0..10 {
            field = step(&field, &cfg, &index).unwrap();
        }
        let total: f64 = (0..7)
            .map(|u| relative_prob(&field, &index, u).1.unwrap())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tail_transport_is_a_swap() {
        // Gr(2) on a tail vertex swaps the inward and outward amplitudes
        // passing through it: amplitudes shift one slot per step.
        let cfg = config(3, 3, TailMode::TruncatedTails);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for z in field.amplitudes.iter_mut() {
            *z = Complex64::ZERO;
        }
        field.amplitudes[index.tail_in(1, 2)] = Complex64::new(0.6, 0.0);
        field.amplitudes[index.tail_out(1, 0)] = Complex64::new(-0.8, 0.0);
        let next = step(&field, &cfg, &index).unwrap();
        assert_abs_diff_eq!(next.amplitudes[index.tail_in(1, 1)].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(next.amplitudes[index.tail_out(1, 1)].re, -0.8, epsilon = 1e-15);
        assert_eq!(next.amplitudes[index.tail_in(1, 2)], Complex64::ZERO);
        assert_eq!(next.amplitudes[index.tail_out(1, 0)], Complex64::ZERO);
    }

    #[test]
    fn local_unitarity_of_one_step() {
        // A compactly supported field away from the truncation boundary
        // keeps its ℓ² norm to 1e−12.
        let cfg = config(6, 4, TailMode::TruncatedTails);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for z in field.amplitudes.iter_mut() {
            *z = Complex64::ZERO;
        }
        let mut seed = 0.37_f64;
        for o in 0..6 {
            for t in 0..6 {
                if o != t {
                    seed = (seed * 997.0).fract();
                    field.amplitudes[index.internal(o, t)] =
                        Complex64::new(seed - 0.5, (1.0 - seed) * 0.25);
                }
            }
        }
        let before = field.norm();
        let after = step(&field, &cfg, &index).unwrap().norm();
        assert_abs_diff_eq!(before, after, epsilon = 1e-12);
    }

    #[test]
    fn horizon_is_enforced_for_truncated_tails() {
        let cfg = config(4, 2, TailMode::TruncatedTails);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for _ in 0..2 {
            field = step(&field, &cfg, &index).unwrap();
        }
        assert!(matches!(
            step(&field, &cfg, &index),
            Err(Error::Horizon { step: 3, horizon: 2 })
        ));
    }

    #[test]
    fn tail_freeness_of_the_inflow_front() {
        let cfg = config(4, 5, TailMode::TruncatedTails);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for t in 1..=3usize {
            field = step(&field, &cfg, &index).unwrap();
            for u in 0..4 {
                for d in 0..index.tail_len {
                    if d + t < index.tail_len {
                        assert_eq!(field.amplitudes[index.tail_in(u, d)], Complex64::ONE);
                    }
                }
            }
        }
    }

    // ─── Whole evolutions ───────────────────────────────────────────────

    #[test]
    fn tail_modes_agree_on_internal_arcs() {
        let t_max = 12;
        let cfg_t = config(10, t_max, TailMode::TruncatedTails);
        let cfg_s = config(10, t_max, TailMode::SourceSink);
        let idx_t = build_arc_index(&cfg_t).unwrap();
        let idx_s = build_arc_index(&cfg_s).unwrap();
        let mut f_t = initial_state(&idx_t);
        let mut f_s = initial_state(&idx_s);
        for _ in 0..t_max {
            f_t = step(&f_t, &cfg_t, &idx_t).unwrap();
            f_s = step(&f_s, &cfg_s, &idx_s).unwrap();
            for o in 0..10 {
                for t in 0..10 {
                    if o != t {
                        let d = (f_t.amplitudes[idx_t.internal(o, t)]
                            - f_s.amplitudes[idx_s.internal(o, t)])
                        .norm();
                        assert!(d < 1e-12, "internal arcs diverged by {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn class_constancy_along_the_evolution() {
        let cfg = config(10, 30, TailMode::SourceSink);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for _ in 0..30 {
            field = step(&field, &cfg, &index).unwrap();
            assert!(class_spread(&field, &index) < 1e-13);
        }
    }

    #[test]
    fn physical_states_stay_real() {
        let cfg = config(10, 25, TailMode::SourceSink);
        let index = build_arc_index(&cfg).unwrap();
        let mut field = initial_state(&index);
        for _ in 0..25 {
            field = step(&field, &cfg, &index).unwrap();
        }
        assert!(field.max_imag() < 1e-10);
    }

    #[test]
    fn marked_vertex_choice_is_immaterial() {
        let a = evolve(&ModelConfig::new(10, 0, 12, TailMode::SourceSink).unwrap()).unwrap();
        let b = evolve(&ModelConfig::new(10, 5, 12, TailMode::SourceSink).unwrap()).unwrap();
        assert!(a.max_nu_deviation(&b) < 1e-12);
    }

    #[test]
    fn evolve_zero_horizon_has_one_record() {
        let series = evolve(&config(5, 0, TailMode::SourceSink)).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series.records[0].t, 0);
        assert_eq!(series.records[0].norm_kn, 0.0);
    }
}

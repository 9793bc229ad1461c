//! Measurement by roulette-wheel selection.
//!
//! A measurement of the reduced state first spins a four-slot wheel weighted
//! by the class probabilities. The walker's vertex is then an equal
//! superposition over the marked set (classes `aa`, `ab`) or over the unmarked
//! vertices (`ba`, `bb`), so the second stage draws a label uniformly from the
//! corresponding side.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lackadaisical::{BasisClass, ReducedState};
use crate::scalar::Scalar;
use crate::search_space::{MarkedSet, VertexLabel, Window};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WheelOutcome<T> {
    pub index: usize,
    /// Normalized probability of the selected slot.
    pub probability: T,
}

/// Picks slot `i` with probability `weights[i] / Σ weights` by inverting the
/// cumulative sum at one uniform draw.
pub fn roulette_select<T: Scalar, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> Result<WheelOutcome<T>> {
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut total = 0.0f64;
    for w in weights {
        let w = w.as_f64();
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWheel);
        }
        total += w;
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::InvalidWheel);
    }
    let spin = rng.random::<f64>() * total;
    let mut index = cumulative.partition_point(|&c| c <= spin);
    if index == weights.len() {
        // spin rounded up to the total; fall back to the last non-empty slot
        index = weights.iter().rposition(|w| w.as_f64() > 0.0).expect("positive total");
    }
    Ok(WheelOutcome { index, probability: T::lit(weights[index].as_f64() / total) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub class: BasisClass,
    pub label: VertexLabel,
}

/// Two-stage measurement: class by roulette, then a uniform label on the
/// marked side (`aa`, `ab`) or the unmarked side (`ba`, `bb`).
///
/// The class draw comes from `class_rng` and the label draw from `label_rng`.
pub fn measure_cascade<T: Scalar, R1: Rng + ?Sized, R2: Rng + ?Sized>(
    s: &ReducedState<T>,
    marked: &MarkedSet,
    win: &Window<T>,
    class_rng: &mut R1,
    label_rng: &mut R2,
) -> Result<Measurement> {
    let params = s.params();
    if marked.k() != params.k() {
        return Err(Error::InconsistentMarked { expected: params.k(), found: marked.k() });
    }
    if win.vertex_count() != params.n() {
        return Err(Error::InvalidParams(format!(
            "window has {} vertices but the walk has N = {}",
            win.vertex_count(),
            params.n()
        )));
    }
    let outcome = roulette_select(&s.probabilities(), class_rng)?;
    let class = BasisClass::from_index(outcome.index).expect("four classes");
    let label = if class.is_success() {
        marked.positions()[label_rng.random_range(0..marked.positions().len())]
    } else {
        let rank = label_rng.random_range(0..params.n() - params.k());
        marked.nth_unmarked(win, rank).expect("rank below unmarked count")
    };
    Ok(Measurement { class, label })
}

//! The 2-2-1 sigmoid perceptron for XOR.
//!
//! Of its nine weights, the six hidden-layer weights and the output bias are
//! drawn at random and frozen ([`FixedWeights`]); the two output-neuron input
//! weights are what the walk searches for.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_FIXED_WEIGHTS};
use crate::scalar::Scalar;

/// `(input bits, target)` for the four XOR patterns.
pub const XOR_PATTERNS: [([bool; 2], bool); 4] = [
    ([false, false], false),
    ([false, true], true),
    ([true, false], true),
    ([true, true], false),
];

pub fn sigmoid<T: Scalar>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpWeights<T> {
    /// `hidden[j][i]` connects input `i` to hidden neuron `j`.
    pub hidden: [[T; 2]; 2],
    pub hidden_bias: [T; 2],
    pub out_w: [T; 2],
    pub out_b: T,
}

/// The seven weights that stay frozen during the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedWeights<T> {
    pub hidden: [[T; 2]; 2],
    pub hidden_bias: [T; 2],
    pub out_b: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport<T> {
    pub epochs: u64,
    pub final_error: T,
    pub converged: bool,
}

impl<T: Scalar> MlpWeights<T> {
    pub fn zeros() -> Self {
        Self::from_array([T::zero(); 9])
    }

    pub fn from_parts(fixed: &FixedWeights<T>, out_w: [T; 2]) -> Self {
        Self { hidden: fixed.hidden, hidden_bias: fixed.hidden_bias, out_w, out_b: fixed.out_b }
    }

    pub fn fixed(&self) -> FixedWeights<T> {
        FixedWeights { hidden: self.hidden, hidden_bias: self.hidden_bias, out_b: self.out_b }
    }

    /// Order: hidden (row-major), hidden_bias, out_w, out_b.
    pub fn to_array(&self) -> [T; 9] {
        let [[a, b], [c, d]] = self.hidden;
        let [e, f] = self.hidden_bias;
        let [g, h] = self.out_w;
        [a, b, c, d, e, f, g, h, self.out_b]
    }

    pub fn from_array(v: [T; 9]) -> Self {
        Self { hidden: [[v[0], v[1]], [v[2], v[3]]], hidden_bias: [v[4], v[5]], out_w: [v[6], v[7]], out_b: v[8] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    fn hidden_activations(&self, input: [bool; 2]) -> [T; 2] {
        let x = input.map(|b| if b { T::one() } else { T::zero() });
        std::array::from_fn(|j| sigmoid(self.hidden_bias[j] + self.hidden[j][0] * x[0] + self.hidden[j][1] * x[1]))
    }

    fn output_from_hidden(&self, h: [T; 2]) -> T {
        sigmoid(self.out_b + self.out_w[0] * h[0] + self.out_w[1] * h[1])
    }

    pub fn forward(&self, input: [bool; 2]) -> Result<T> {
        if !self.is_finite() {
            return Err(Error::NonFiniteWeights);
        }
        Ok(self.output_from_hidden(self.hidden_activations(input)))
    }

    /// Every pattern's output lies strictly within `margin` of its target.
    pub fn is_solution(&self, margin: T) -> bool {
        self.is_finite()
            && XOR_PATTERNS.iter().all(|&(x, t)| {
                let y = self.output_from_hidden(self.hidden_activations(x));
                (y - target::<T>(t)).abs() < margin
            })
    }

    /// Mean squared error over the four patterns.
    pub fn mse(&self) -> T {
        let sum = XOR_PATTERNS.iter().fold(T::zero(), |acc, &(x, t)| {
            let e = self.output_from_hidden(self.hidden_activations(x)) - target::<T>(t);
            acc + e * e
        });
        sum / T::lit(4.0)
    }

    /// Gradient of [`mse`](Self::mse), laid out like the weights.
    pub fn mse_gradient(&self) -> Self {
        let mut g = [T::zero(); 9];
        let quarter = T::lit(0.25);
        let two = T::lit(2.0);
        for &(x, t) in &XOR_PATTERNS {
            let xin = x.map(|b| if b { T::one() } else { T::zero() });
            let h = self.hidden_activations(x);
            let y = self.output_from_hidden(h);
            // dE/dz_out for E = (y - t)^2 / 4
            let d_out = quarter * two * (y - target::<T>(t)) * y * (T::one() - y);
            g[6] = g[6] + d_out * h[0];
            g[7] = g[7] + d_out * h[1];
            g[8] = g[8] + d_out;
            for j in 0..2 {
                let d_h = d_out * self.out_w[j] * h[j] * (T::one() - h[j]);
                g[2 * j] = g[2 * j] + d_h * xin[0];
                g[2 * j + 1] = g[2 * j + 1] + d_h * xin[1];
                g[4 + j] = g[4 + j] + d_h;
            }
        }
        Self::from_array(g)
    }
}

fn target<T: Scalar>(t: bool) -> T {
    if t {
        T::one()
    } else {
        T::zero()
    }
}

pub fn forward<T: Scalar>(w: &MlpWeights<T>, input: [bool; 2]) -> Result<T> {
    w.forward(input)
}

pub fn is_solution<T: Scalar>(w: &MlpWeights<T>, margin: T) -> bool {
    w.is_solution(margin)
}

/// Seven values uniform on `range`, drawn from the fixed-weight stream of `seed`.
///
/// Draw order: `hidden` row-major, `hidden_bias`, `out_b`.
pub fn generate_fixed_weights<T: Scalar>(seed: u64, range: Interval<T>) -> Result<FixedWeights<T>> {
    let (lo, hi) = (range.lo.as_f64(), range.hi.as_f64());
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyInterval { lo, hi });
    }
    let mut rng = stream_rng(seed, STREAM_FIXED_WEIGHTS);
    let mut draw = || T::lit(rng.random_range(lo..hi));
    let hidden = [[draw(), draw()], [draw(), draw()]];
    let hidden_bias = [draw(), draw()];
    let out_b = draw();
    Ok(FixedWeights { hidden, hidden_bias, out_b })
}

/// Full-batch gradient descent on the mean squared error.
///
/// Each epoch first checks the current weights; training stops as soon as
/// they solve XOR within `margin`, so weights that already solve it report
/// `epochs = 1`. Otherwise an update is applied and the next epoch begins,
/// up to `max_epochs` epochs (at least one check is always made).
pub fn train_backprop<T: Scalar>(w: &MlpWeights<T>, rate: T, max_epochs: u64, margin: T) -> TrainReport<T> {
    let mut current = *w;
    let mut epoch = 1;
    loop {
        if current.is_solution(margin) {
            return TrainReport { epochs: epoch, final_error: current.mse(), converged: true };
        }
        if epoch >= max_epochs {
            return TrainReport { epochs: epoch, final_error: current.mse(), converged: false };
        }
        let g = current.mse_gradient().to_array();
        let mut v = current.to_array();
        for (vi, gi) in v.iter_mut().zip(g) {
            *vi = *vi - rate * gi;
        }
        current = MlpWeights::from_array(v);
        epoch += 1;
    }
}

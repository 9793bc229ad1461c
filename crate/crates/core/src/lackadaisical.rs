//! Lackadaisical quantum walk search on the complete graph with one self-loop
//! per vertex.
//!
//! The walker lives on directed edges `v → w` (the self-loop `v → v` included,
//! so every vertex has `N` outgoing edges). One step applies the Grover
//! diffusion coin `2|s⟩⟨s| − I` at every unmarked vertex and its negation at
//! every marked vertex, then the flip-flop shift `|v → w⟩ ↦ |w → v⟩`.
//!
//! Grouping edges by the marked/unmarked status of their endpoints gives the
//! four equal-superposition states `|aa⟩, |ab⟩, |ba⟩, |bb⟩`, whose span is
//! invariant under the step. [`ReducedState`] evolves in that 4-dimensional
//! space and scales to millions of vertices; [`EdgeState`] materializes all
//! `N²` edge amplitudes and serves as the check on the reduced matrix.

use std::fmt;
use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::walk_core::ComplexMatrix;

/// The four reduced basis states, in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisClass {
    Aa,
    Ab,
    Ba,
    Bb,
}

impl BasisClass {
    pub const ALL: [BasisClass; 4] = [BasisClass::Aa, BasisClass::Ab, BasisClass::Ba, BasisClass::Bb];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Whether the walker sits on a marked vertex.
    pub fn is_success(self) -> bool {
        matches!(self, BasisClass::Aa | BasisClass::Ab)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BasisClass::Aa => "aa",
            BasisClass::Ab => "ab",
            BasisClass::Ba => "ba",
            BasisClass::Bb => "bb",
        }
    }
}

impl fmt::Display for BasisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Vertex count `n`, marked count `k` and self-loops per vertex `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParams {
    n: u64,
    k: u64,
    l: u32,
}

impl GraphParams {
    /// Only `l = 1` is simulated; the reduced basis is exact for that case.
    pub fn new(n: u64, k: u64, l: u32) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::InvalidParams(format!("need 1 <= k < N, got N = {n}, k = {k}")));
        }
        if l != 1 {
            return Err(Error::InvalidParams(format!("only l = 1 self-loop is supported, got l = {l}")));
        }
        Ok(Self { n, k, l })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }
}

/// `π √N / √(2(2k + l − 1))`, the time of the first success maximum.
pub fn optimal_time(n: u64, k: u64, l: u32) -> f64 {
    let denom = 2.0 * (2.0 * k as f64 + f64::from(l) - 1.0);
    std::f64::consts::PI / denom.sqrt() * (n as f64).sqrt()
}

/// Number of walk steps to run before measuring: the iteration count of
/// `for j in 1..=t`, i.e. `⌊optimal_time⌋`.
pub fn optimal_steps(p: &GraphParams) -> u64 {
    optimal_time(p.n, p.k, p.l).floor() as u64
}

/// Coefficients on `(|aa⟩, |ab⟩, |ba⟩, |bb⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState<T> {
    amps: [Complex<T>; 4],
    params: GraphParams,
    time: u64,
}

impl<T: Scalar> ReducedState<T> {
    pub fn new(amps: [Complex<T>; 4], params: GraphParams) -> Self {
        Self { amps, params, time: 0 }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 4] {
        &self.amps
    }

    pub fn amplitude(&self, class: BasisClass) -> Complex<T> {
        self.amps[class.index()]
    }

    pub fn params(&self) -> GraphParams {
        self.params
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn probabilities(&self) -> [T; 4] {
        self.amps.map(|a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> T {
        self.probabilities().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// `|a_aa|² + |a_ab|²`.
    pub fn success_probability(&self) -> T {
        self.amps[0].norm_sqr() + self.amps[1].norm_sqr()
    }
}

/// `(k, √(k(N−k)), √(k(N−k)), N−k) / N`.
pub fn initial_reduced_state<T: Scalar>(p: &GraphParams) -> ReducedState<T> {
    let n = T::from_count(p.n);
    let k = T::from_count(p.k);
    let rest = T::from_count(p.n - p.k);
    let cross = (k * rest).sqrt() / n;
    let re = |v: T| Complex::new(v, T::zero());
    ReducedState::new([re(k / n), re(cross), re(cross), re(rest / n)], *p)
}

/// One step applied to reduced coefficients, computed edge class by edge class.
///
/// Every edge in a class carries the same amplitude, so the coin's mean over a
/// vertex's `N` outgoing edges is a two-term sum.
fn reduced_image<T: Scalar>(p: &GraphParams, x: [Complex<T>; 4]) -> [Complex<T>; 4] {
    let n = T::from_count(p.n);
    let k = T::from_count(p.k);
    let rest = T::from_count(p.n - p.k);
    let cross = (k * rest).sqrt();
    let two = T::lit(2.0);

    // per-edge amplitudes
    let e_aa = x[0] / k;
    let e_ab = x[1] / cross;
    let e_ba = x[2] / cross;
    let e_bb = x[3] / rest;

    // negated Grover coin at marked vertices
    let mean_a = (e_aa * k + e_ab * rest) / n;
    let c_aa = e_aa - mean_a * two;
    let c_ab = e_ab - mean_a * two;
    // Grover coin at unmarked vertices
    let mean_b = (e_ba * k + e_bb * rest) / n;
    let c_ba = mean_b * two - e_ba;
    let c_bb = mean_b * two - e_bb;

    // flip-flop: a → b edges become b → a edges and vice versa
    [c_aa * k, c_ba * cross, c_ab * cross, c_bb * rest]
}

/// Matrix of one walk step restricted to the reduced basis. Entries are real.
pub fn reduced_step_matrix<T: Scalar>(p: &GraphParams) -> ComplexMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let columns: Vec<[Complex<T>; 4]> = (0..4)
        .map(|j| {
            let mut e = [zero; 4];
            e[j] = one;
            reduced_image(p, e)
        })
        .collect();
    let data = (0..4).flat_map(|i| columns.iter().map(move |c| c[i])).collect();
    ComplexMatrix::new(4, 4, data).expect("4x4")
}

pub fn evolve_reduced<T: Scalar>(s: &ReducedState<T>, steps: u64) -> ReducedState<T> {
    let m = reduced_step_matrix::<T>(&s.params);
    let mut amps = s.amps;
    for _ in 0..steps {
        let next = m.apply(&amps).expect("4-vector");
        amps.copy_from_slice(&next);
    }
    ReducedState { amps, params: s.params, time: s.time + steps }
}

pub fn success_probability<T: Scalar>(s: &ReducedState<T>) -> T {
    s.success_probability()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow<T> {
    pub step: u64,
    pub probabilities: [T; 4],
}

impl<T: Scalar> TrajectoryRow<T> {
    pub fn success(&self) -> T {
        self.probabilities[0] + self.probabilities[1]
    }
}

/// Class probabilities at steps `0..=t_max` from the initial state.
pub fn success_trajectory<T: Scalar>(p: &GraphParams, t_max: u64) -> Vec<TrajectoryRow<T>> {
    let m = reduced_step_matrix::<T>(p);
    let mut amps = *initial_reduced_state::<T>(p).amplitudes();
    let mut rows = Vec::with_capacity(t_max as usize + 1);
    for step in 0..=t_max {
        rows.push(TrajectoryRow { step, probabilities: amps.map(|a| a.norm_sqr()) });
        if step < t_max {
            let next = m.apply(&amps).expect("4-vector");
            amps.copy_from_slice(&next);
        }
    }
    rows
}

/// First step attaining the largest success probability.
pub fn peak_step<T: Scalar>(rows: &[TrajectoryRow<T>]) -> Option<u64> {
    rows.iter()
        .fold(None, |best: Option<&TrajectoryRow<T>>, r| match best {
            Some(b) if b.success() >= r.success() => Some(b),
            _ => Some(r),
        })
        .map(|r| r.step)
}

pub fn write_trajectory_csv<T: Scalar, W: Write>(rows: &[TrajectoryRow<T>], mut out: W) -> Result<()> {
    writeln!(out, "step,p_aa,p_ab,p_ba,p_bb,p_success")?;
    for r in rows {
        let [aa, ab, ba, bb] = r.probabilities;
        writeln!(out, "{},{aa:?},{ab:?},{ba:?},{bb:?},{:?}", r.step, r.success())?;
    }
    Ok(())
}

/// Full edge-space state on the complete graph: `N²` amplitudes indexed
/// `v * N + w` for the directed edge `v → w`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeState<T> {
    n: usize,
    marked: Vec<bool>,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> EdgeState<T> {
    pub fn new(n: usize, marked: &[usize], amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != n * n {
            return Err(Error::Dimension(format!("{} amplitudes for N = {n}", amps.len())));
        }
        let mut flags = vec![false; n];
        for &v in marked {
            if v >= n {
                return Err(Error::InvalidParams(format!("marked vertex {v} outside [0, {n})")));
            }
            flags[v] = true;
        }
        Ok(Self { n, marked: flags, amps })
    }

    /// Equal amplitude on every directed edge.
    pub fn uniform(n: usize, marked: &[usize]) -> Result<Self> {
        let a = Complex::new(T::one() / T::from_count(n as u64), T::zero());
        Self::new(n, marked, vec![a; n * n])
    }

    /// Embeds reduced coefficients as equal superpositions over each edge class.
    pub fn from_reduced(s: &ReducedState<T>, marked: &[usize]) -> Result<Self> {
        let n = s.params.n as usize;
        let k = s.params.k as usize;
        let mut state = Self::new(n, marked, vec![Complex::new(T::zero(), T::zero()); n * n])?;
        let found = state.marked_count();
        if found != k {
            return Err(Error::InconsistentMarked { expected: k as u64, found: found as u64 });
        }
        let scale = class_scales::<T>(n, k);
        for v in 0..n {
            for w in 0..n {
                let c = state.class_of(v, w);
                state.amps[v * n + w] = s.amps[c.index()] / scale[c.index()];
            }
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn amplitude(&self, from: usize, to: usize) -> Complex<T> {
        self.amps[from * self.n + to]
    }

    pub fn class_of(&self, from: usize, to: usize) -> BasisClass {
        match (self.marked[from], self.marked[to]) {
            (true, true) => BasisClass::Aa,
            (true, false) => BasisClass::Ab,
            (false, true) => BasisClass::Ba,
            (false, false) => BasisClass::Bb,
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn step(&self) -> Self {
        let n = self.n;
        let two = T::lit(2.0);
        let inv_n = T::one() / T::from_count(n as u64);
        let mut coined = self.amps.clone();
        for v in 0..n {
            let row = &mut coined[v * n..(v + 1) * n];
            let mean = row.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &a| acc + a) * inv_n;
            for a in row.iter_mut() {
                *a = if self.marked[v] { *a - mean * two } else { mean * two - *a };
            }
        }
        let mut amps = coined.clone();
        for v in 0..n {
            for w in 0..n {
                amps[w * n + v] = coined[v * n + w];
            }
        }
        Self { n, marked: self.marked.clone(), amps }
    }

    /// Total probability on each edge class.
    pub fn class_probabilities(&self) -> [T; 4] {
        let mut p = [T::zero(); 4];
        for v in 0..self.n {
            for w in 0..self.n {
                let c = self.class_of(v, w).index();
                p[c] = p[c] + self.amplitude(v, w).norm_sqr();
            }
        }
        p
    }

    /// Projection onto the reduced basis, and the norm of what lies outside it.
    ///
    /// Requires `1 <= k < N`.
    pub fn project(&self) -> Result<([Complex<T>; 4], T)> {
        let n = self.n;
        let k = self.marked_count();
        if k == 0 || k >= n {
            return Err(Error::InvalidParams(format!("projection needs 1 <= k < N, got k = {k}")));
        }
        let scale = class_scales::<T>(n, k);
        let mut coeffs = [Complex::new(T::zero(), T::zero()); 4];
        for v in 0..n {
            for w in 0..n {
                let c = self.class_of(v, w).index();
                coeffs[c] = coeffs[c] + self.amplitude(v, w) / scale[c];
            }
        }
        let mut leak = T::zero();
        for v in 0..n {
            for w in 0..n {
                let c = self.class_of(v, w).index();
                leak = leak + (self.amplitude(v, w) - coeffs[c] / scale[c]).norm_sqr();
            }
        }
        Ok((coeffs, leak.sqrt()))
    }
}

/// Per-edge normalization of each class: `√(edges in class)`.
fn class_scales<T: Scalar>(n: usize, k: usize) -> [T; 4] {
    let rest = T::from_count((n - k) as u64);
    let k = T::from_count(k as u64);
    let cross = (k * rest).sqrt();
    [k, cross, cross, rest]
}

pub fn full_space_step<T: Scalar>(s: &EdgeState<T>) -> EdgeState<T> {
    s.step()
}

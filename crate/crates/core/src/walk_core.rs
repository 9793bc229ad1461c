//! Discrete-time coined quantum walks on the line and on the square lattice.
//!
//! A walk step is `U = S (C ⊗ I)`: the Hadamard coin `C` mixes the internal
//! coin state at every site, then the shift `S` moves coin `0` one site to
//! the right and coin `1` one site to the left (independently per axis on the
//! lattice, with coin `H ⊗ H`).
//!
//! States are stored densely over `[-r, r]` (or its square) where `r` is the
//! current support radius. Starting from a localized state the radius equals
//! the step count, so storage never exceeds what the walk can reach.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_CLASSICAL_WALK};
use crate::scalar::Scalar;

pub type ComplexAmplitude<T> = Complex<T>;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.cols + col]
    }

    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![zero; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    data[i * other.cols + j] = data[i * other.cols + j] + a * other.get(k, j);
                }
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data })
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self.get(i, j) * v[j])
            })
            .collect())
    }

    /// Largest entry modulus of `self - I`.
    fn max_deviation_from_identity(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { T::one() } else { T::zero() };
                let d = (self.get(i, j) - Complex::new(target, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// The Hadamard coin `(1/√2) [[1, 1], [1, -1]]`.
pub fn hadamard_coin<T: Scalar>() -> ComplexMatrix<T> {
    let h = T::FRAC_1_SQRT_2();
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

/// `true` iff both `M M†` and `M† M` are within `tol` (max-norm) of the identity.
pub fn check_unitary<T: Scalar>(m: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let adj = m.adjoint();
    let left = m.matmul(&adj)?.max_deviation_from_identity();
    let right = adj.matmul(m)?.max_deviation_from_identity();
    Ok(left <= tol && right <= tol)
}

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Coin state `(|0⟩ - i|1⟩)/√2`, whose walk spreads symmetrically.
pub fn symmetric_coin<T: Scalar>() -> [Complex<T>; 2] {
    let h = T::FRAC_1_SQRT_2();
    [Complex::new(h, T::zero()), Complex::new(T::zero(), -h)]
}

/// Coined walk on the integer line.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector1D<T> {
    radius: usize,
    // amps[coin][n + radius]
    amps: [Vec<Complex<T>>; 2],
    time: u64,
}

impl<T: Scalar> StateVector1D<T> {
    /// State localized at the origin with the given coin amplitudes.
    pub fn localized(coin: [Complex<T>; 2]) -> Self {
        Self { radius: 0, amps: [vec![coin[0]], vec![coin[1]]], time: 0 }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Positions outside this radius have zero amplitude.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn amplitude(&self, coin: usize, position: i64) -> Complex<T> {
        let r = self.radius as i64;
        if coin > 1 || position.abs() > r {
            return czero();
        }
        self.amps[coin][(position + r) as usize]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().flatten().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn step(&self) -> Self {
        let h = T::FRAC_1_SQRT_2();
        let radius = self.radius + 1;
        let width = 2 * radius + 1;
        let mut amps = [vec![czero(); width], vec![czero(); width]];
        for (i, (&a0, &a1)) in self.amps[0].iter().zip(&self.amps[1]).enumerate() {
            // old index i sits at position i - r; in the new layout that is i + 1.
            let up = (a0 + a1) * h;
            let down = (a0 - a1) * h;
            amps[0][i + 2] = up;
            amps[1][i] = down;
        }
        Self { radius, amps, time: self.time + 1 }
    }

    pub fn evolve(&self, steps: u64) -> Self {
        (0..steps).fold(self.clone(), |s, _| s.step())
    }

    pub fn distribution(&self) -> Distribution1D<T> {
        let r = self.radius as i64;
        let entries = self.amps[0]
            .iter()
            .zip(&self.amps[1])
            .enumerate()
            .filter_map(|(i, (a0, a1))| {
                let p = a0.norm_sqr() + a1.norm_sqr();
                (p > T::zero()).then_some((i as i64 - r, p))
            })
            .collect();
        Distribution1D { entries }
    }
}

/// `(|0⟩ - i|1⟩)/√2 ⊗ |0⟩`.
pub fn symmetric_initial_1d<T: Scalar>() -> StateVector1D<T> {
    StateVector1D::localized(symmetric_coin())
}

pub fn step_1d<T: Scalar>(s: &StateVector1D<T>) -> StateVector1D<T> {
    s.step()
}

/// Coined walk on the square lattice with coin register `(i_x, i_y)`.
///
/// Coin index `c = 2 i_x + i_y`; coin bit `0` moves the matching axis by `+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector2D<T> {
    radius: usize,
    // amps[coin][(x + r) * width + (y + r)]
    amps: [Vec<Complex<T>>; 4],
    time: u64,
}

impl<T: Scalar> StateVector2D<T> {
    pub fn localized(coin: [Complex<T>; 4]) -> Self {
        Self { radius: 0, amps: coin.map(|c| vec![c]), time: 0 }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn width(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn amplitude(&self, coin: (usize, usize), position: (i64, i64)) -> Complex<T> {
        let r = self.radius as i64;
        let (x, y) = position;
        if coin.0 > 1 || coin.1 > 1 || x.abs() > r || y.abs() > r {
            return czero();
        }
        let idx = (x + r) as usize * self.width() + (y + r) as usize;
        self.amps[2 * coin.0 + coin.1][idx]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().flatten().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn step(&self) -> Self {
        let h = T::FRAC_1_SQRT_2();
        let half = h * h;
        let old_w = self.width();
        let radius = self.radius + 1;
        let w = 2 * radius + 1;
        let mut amps: [Vec<Complex<T>>; 4] = std::array::from_fn(|_| vec![czero(); w * w]);
        for ox in 0..old_w {
            for oy in 0..old_w {
                let i = ox * old_w + oy;
                let [a00, a01, a10, a11] = [self.amps[0][i], self.amps[1][i], self.amps[2][i], self.amps[3][i]];
                // H ⊗ H
                let b00 = (a00 + a01 + a10 + a11) * half;
                let b01 = (a00 - a01 + a10 - a11) * half;
                let b10 = (a00 + a01 - a10 - a11) * half;
                let b11 = (a00 - a01 - a10 + a11) * half;
                // old (ox, oy) is new (ox + 1, oy + 1); shift by ±1 per axis.
                amps[0][(ox + 2) * w + (oy + 2)] = b00;
                amps[1][(ox + 2) * w + oy] = b01;
                amps[2][ox * w + (oy + 2)] = b10;
                amps[3][ox * w + oy] = b11;
            }
        }
        Self { radius, amps, time: self.time + 1 }
    }

    pub fn evolve(&self, steps: u64) -> Self {
        (0..steps).fold(self.clone(), |s, _| s.step())
    }

    pub fn distribution(&self) -> Distribution2D<T> {
        let r = self.radius as i64;
        let w = self.width();
        let mut entries = BTreeMap::new();
        for i in 0..w * w {
            let p = self.amps.iter().fold(T::zero(), |acc, a| acc + a[i].norm_sqr());
            if p > T::zero() {
                entries.insert(((i / w) as i64 - r, (i % w) as i64 - r), p);
            }
        }
        Distribution2D { entries }
    }
}

/// Product of the symmetric coin state in both coin qubits, at the origin.
pub fn symmetric_initial_2d<T: Scalar>() -> StateVector2D<T> {
    let [c0, c1] = symmetric_coin::<T>();
    StateVector2D::localized([c0 * c0, c0 * c1, c1 * c0, c1 * c1])
}

pub fn step_2d<T: Scalar>(s: &StateVector2D<T>) -> StateVector2D<T> {
    s.step()
}

/// Probability mass over integer positions on the line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Distribution1D<T> {
    entries: BTreeMap<i64, T>,
}

impl<T: Scalar> Distribution1D<T> {
    pub fn from_entries(entries: impl IntoIterator<Item = (i64, T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, p) in entries {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::Dimension(format!("invalid probability {p} at position {n}")));
            }
            let slot = map.entry(n).or_insert_with(T::zero);
            *slot = *slot + p;
        }
        Ok(Self { entries: map })
    }

    pub fn get(&self, position: i64) -> T {
        self.entries.get(&position).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.entries.iter().map(|(&n, &p)| (n, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> T {
        self.entries.values().fold(T::zero(), |acc, &p| acc + p)
    }

    /// Largest `|P(n) - P(-n)|`.
    pub fn max_asymmetry(&self) -> T {
        self.entries
            .iter()
            .map(|(&n, &p)| (p - self.get(-n)).abs())
            .fold(T::zero(), T::max)
    }

    /// `position,probability` rows, one per nonzero entry.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "position,probability")?;
        for (n, p) in self.iter() {
            writeln!(out, "{n},{p:?}")?;
        }
        Ok(())
    }
}

/// Probability mass over lattice sites.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Distribution2D<T> {
    entries: BTreeMap<(i64, i64), T>,
}

impl<T: Scalar> Distribution2D<T> {
    pub fn get(&self, x: i64, y: i64) -> T {
        self.entries.get(&(x, y)).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), T)> + '_ {
        self.entries.iter().map(|(&pos, &p)| (pos, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> T {
        self.entries.values().fold(T::zero(), |acc, &p| acc + p)
    }

    pub fn marginal_x(&self) -> Distribution1D<T> {
        let mut entries = BTreeMap::new();
        for (&(x, _), &p) in &self.entries {
            let slot = entries.entry(x).or_insert_with(T::zero);
            *slot = *slot + p;
        }
        Distribution1D { entries }
    }

    pub fn marginal_y(&self) -> Distribution1D<T> {
        let mut entries = BTreeMap::new();
        for (&(_, y), &p) in &self.entries {
            let slot = entries.entry(y).or_insert_with(T::zero);
            *slot = *slot + p;
        }
        Distribution1D { entries }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,probability")?;
        for ((x, y), p) in self.iter() {
            writeln!(out, "{x},{y},{p:?}")?;
        }
        Ok(())
    }
}

/// `√(E[n²] − E[n]²)`, normalizing by the total mass.
pub fn position_stddev<T: Scalar>(d: &Distribution1D<T>) -> Result<T> {
    let total = d.total();
    if d.is_empty() || total <= T::zero() {
        return Err(Error::EmptyDistribution);
    }
    let (m1, m2) = d.iter().fold((T::zero(), T::zero()), |(m1, m2), (n, p)| {
        let x = T::from_i64(n).expect("position fits scalar");
        (m1 + p * x, m2 + p * x * x)
    });
    let mean = m1 / total;
    let var = m2 / total - mean * mean;
    Ok(var.max(T::zero()).sqrt())
}

/// Monte-Carlo distribution of the fair ±1 random walk after `steps` steps.
///
/// Each trial flips `steps` fair coins, drawn 64 at a time from the
/// generator's bits.
pub fn classical_walk_baseline(steps: u64, trials: u64, seed: u64) -> Result<Distribution1D<f64>> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let mut rng = stream_rng(seed, STREAM_CLASSICAL_WALK);
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for _ in 0..trials {
        let mut heads = 0u64;
        let mut left = steps;
        while left > 0 {
            let take = left.min(64);
            let bits: u64 = rng.random();
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            heads += u64::from((bits & mask).count_ones());
            left -= take;
        }
        *counts.entry(2 * heads as i64 - steps as i64).or_default() += 1;
    }
    let total = trials as f64;
    Ok(Distribution1D { entries: counts.into_iter().map(|(n, c)| (n, c as f64 / total)).collect() })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

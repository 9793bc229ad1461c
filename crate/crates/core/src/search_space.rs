//! Grid windows over the searched weight pair, and exhaustive counting of the
//! grid points whose weights solve XOR.
//!
//! A window of width `W` covers `x ∈ [−⌊W/2⌋, −⌊W/2⌋ + W − 1]` (likewise `y`),
//! and the vertex at `(x, y)` stands for the output weights `(Δp·x, Δp·y)`.
//! Vertices are indexed in lexicographic `(x, y)` order.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{FixedWeights, MlpWeights};
use crate::scalar::Scalar;

/// Grid position a vertex represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexLabel {
    pub x: i64,
    pub y: i64,
}

impl VertexLabel {
    pub fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    width: u32,
    height: u32,
    dp: T,
}

impl<T: Scalar> Window<T> {
    pub fn new(width: u32, height: u32, dp: T) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidWindow(format!("extent {width}x{height} is empty")));
        }
        if !(dp > T::zero()) || !dp.is_finite() {
            return Err(Error::InvalidWindow(format!("dp must be positive and finite, got {dp}")));
        }
        Ok(Self { width, height, dp })
    }

    pub fn square(width: u32, dp: T) -> Result<Self> {
        Self::new(width, width, dp)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dp(&self) -> T {
        self.dp
    }

    pub fn vertex_count(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }

    pub fn x_range(&self) -> std::ops::RangeInclusive<i64> {
        let lo = -i64::from(self.width / 2);
        lo..=lo + i64::from(self.width) - 1
    }

    pub fn y_range(&self) -> std::ops::RangeInclusive<i64> {
        let lo = -i64::from(self.height / 2);
        lo..=lo + i64::from(self.height) - 1
    }

    pub fn contains(&self, label: VertexLabel) -> bool {
        self.x_range().contains(&label.x) && self.y_range().contains(&label.y)
    }

    pub fn index_of(&self, label: VertexLabel) -> Option<u64> {
        if !self.contains(label) {
            return None;
        }
        let col = (label.x - self.x_range().start()) as u64;
        let row = (label.y - self.y_range().start()) as u64;
        Some(col * u64::from(self.height) + row)
    }

    pub fn label_at(&self, index: u64) -> Option<VertexLabel> {
        if index >= self.vertex_count() {
            return None;
        }
        let h = u64::from(self.height);
        Some(VertexLabel::new(self.x_range().start() + (index / h) as i64, self.y_range().start() + (index % h) as i64))
    }

    pub fn labels(&self) -> impl Iterator<Item = VertexLabel> + '_ {
        let ys = self.y_range();
        self.x_range().flat_map(move |x| ys.clone().map(move |y| VertexLabel::new(x, y)))
    }

    /// `(Δp·x, Δp·y)`.
    pub fn vertex_to_weights(&self, label: VertexLabel) -> Result<(T, T)> {
        if !self.contains(label) {
            return Err(Error::OutOfWindow { x: label.x, y: label.y });
        }
        let to = |v: i64| T::from_i64(v).expect("grid coordinate fits scalar") * self.dp;
        Ok((to(label.x), to(label.y)))
    }

    /// Nearest grid label for a weight pair; inverse of [`vertex_to_weights`](Self::vertex_to_weights).
    pub fn weights_to_label(&self, w1: T, w2: T) -> VertexLabel {
        let to = |w: T| (w / self.dp).round().to_i64().expect("weight within i64 grid");
        VertexLabel::new(to(w1), to(w2))
    }
}

pub fn vertex_to_weights<T: Scalar>(win: &Window<T>, label: VertexLabel) -> Result<(T, T)> {
    win.vertex_to_weights(label)
}

/// Grid positions whose weights solve XOR, sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSet {
    positions: Vec<VertexLabel>,
}

impl MarkedSet {
    pub fn from_positions(mut positions: Vec<VertexLabel>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        Self { positions }
    }

    pub fn k(&self) -> u64 {
        self.positions.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[VertexLabel] {
        &self.positions
    }

    pub fn contains(&self, label: VertexLabel) -> bool {
        self.positions.binary_search(&label).is_ok()
    }

    /// `rank`-th window label (in index order) that is not in the set.
    ///
    /// All positions must lie inside `win`.
    pub fn nth_unmarked<T: Scalar>(&self, win: &Window<T>, rank: u64) -> Option<VertexLabel> {
        if rank >= win.vertex_count().checked_sub(self.k())? {
            return None;
        }
        // Marked indices m_j are increasing, so m_j - j is non-decreasing and
        // counts the unmarked indices below m_j.
        let (mut lo, mut hi) = (0usize, self.positions.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let m = win.index_of(self.positions[mid]).expect("marked label inside window");
            if m - mid as u64 <= rank {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        win.label_at(rank + lo as u64)
    }

    /// `x,y` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y")?;
        for p in &self.positions {
            writeln!(out, "{},{}", p.x, p.y)?;
        }
        Ok(())
    }
}

/// Evaluates the XOR predicate at every grid point of the window.
pub fn enumerate_marked<T: Scalar>(win: &Window<T>, fixed: &FixedWeights<T>, margin: T) -> MarkedSet {
    enumerate_marked_threaded(win, fixed, margin, 1)
}

/// As [`enumerate_marked`], splitting the `x` columns across `threads` workers.
pub fn enumerate_marked_threaded<T: Scalar>(
    win: &Window<T>,
    fixed: &FixedWeights<T>,
    margin: T,
    threads: usize,
) -> MarkedSet {
    let xs: Vec<i64> = win.x_range().collect();
    let scan = |cols: &[i64]| -> Vec<VertexLabel> {
        let mut found = Vec::new();
        for &x in cols {
            for y in win.y_range() {
                let label = VertexLabel::new(x, y);
                let (w1, w2) = win.vertex_to_weights(label).expect("label from window");
                if MlpWeights::from_parts(fixed, [w1, w2]).is_solution(margin) {
                    found.push(label);
                }
            }
        }
        found
    };
    let threads = threads.max(1).min(xs.len());
    let positions = if threads == 1 {
        scan(&xs)
    } else {
        let chunk = xs.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = xs.chunks(chunk).map(|c| s.spawn(move || scan(c))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
        })
    };
    MarkedSet::from_positions(positions)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionCount<T> {
    pub dp: T,
    pub window: u32,
    pub count: u64,
}

/// Marked-set size for every `(Δp, square window)` pair, Δp-major.
pub fn solution_count_table<T: Scalar>(
    windows: &[u32],
    dps: &[T],
    fixed: &FixedWeights<T>,
    margin: T,
    threads: usize,
) -> Result<Vec<SolutionCount<T>>> {
    let mut table = Vec::with_capacity(windows.len() * dps.len());
    for &dp in dps {
        for &w in windows {
            let win = Window::square(w, dp)?;
            let count = enumerate_marked_threaded(&win, fixed, margin, threads).k();
            table.push(SolutionCount { dp, window: w, count });
        }
    }
    Ok(table)
}

pub fn write_solution_table_csv<T: Scalar, W: Write>(table: &[SolutionCount<T>], mut out: W) -> Result<()> {
    writeln!(out, "dp,window,count")?;
    for row in table {
        writeln!(out, "{:?},{},{}", row.dp, row.window, row.count)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{generate_fixed_weights, Interval};
    use approx::assert_abs_diff_eq;

    fn fixed(seed: u64) -> FixedWeights<f64> {
        generate_fixed_weights(seed, Interval { lo: -1.0, hi: 1.0 }).unwrap()
    }

    #[test]
    fn window_geometry() {
        let w = Window::square(512, 0.05).unwrap();
        assert_eq!(w.x_range(), -256..=255);
        assert_eq!(w.vertex_count(), 262_144);
        let odd = Window::new(3, 1, 1.0).unwrap();
        assert_eq!(odd.x_range(), -1..=1);
        assert_eq!(odd.y_range(), 0..=0);
        assert!(Window::new(0, 3, 1.0).is_err());
        assert!(Window::new(3, 3, 0.0).is_err());
        assert!(Window::new(3, 3, f64::NAN).is_err());
    }

    #[test]
    fn weights_from_labels() {
        let w = Window::square(512, 0.05).unwrap();
        let (a, b) = w.vertex_to_weights(VertexLabel::new(-43, 32)).unwrap();
        assert_abs_diff_eq!(a, -2.15, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.6, epsilon = 1e-12);
        assert_eq!(w.vertex_to_weights(VertexLabel::new(0, 0)).unwrap(), (0.0, 0.0));
        let fine = Window::square(512, 0.0005).unwrap();
        let (a, b) = fine.vertex_to_weights(VertexLabel::new(100, -200)).unwrap();
        assert_abs_diff_eq!(a, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b, -0.1, epsilon = 1e-15);
        assert!(matches!(
            w.vertex_to_weights(VertexLabel::new(256, 0)),
            Err(Error::OutOfWindow { x: 256, y: 0 })
        ));
    }

    #[test]
    fn index_order_is_lexicographic() {
        let w = Window::new(4, 3, 0.1).unwrap();
        let labels: Vec<_> = w.labels().collect();
        assert_eq!(labels.len(), 12);
        assert!(labels.windows(2).all(|p| p[0] < p[1]));
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(w.index_of(*l), Some(i as u64));
            assert_eq!(w.label_at(i as u64), Some(*l));
        }
        assert_eq!(w.label_at(12), None);
    }

    #[test]
    fn nth_unmarked_skips_members() {
        let w = Window::new(4, 3, 0.1).unwrap();
        let all: Vec<_> = w.labels().collect();
        let marked = MarkedSet::from_positions(vec![all[0], all[5], all[6], all[11]]);
        let expected: Vec<_> = all.iter().copied().filter(|l| !marked.contains(*l)).collect();
        for (r, e) in expected.iter().enumerate() {
            assert_eq!(marked.nth_unmarked(&w, r as u64), Some(*e));
        }
        assert_eq!(marked.nth_unmarked(&w, expected.len() as u64), None);
    }

    #[test]
    fn tight_margin_marks_nothing() {
        let win = Window::square(16, 0.5).unwrap();
        assert!(enumerate_marked(&win, &fixed(1), 1e-9).is_empty());
    }

    #[test]
    fn origin_with_zero_weights_is_unmarked() {
        let win = Window::square(1, 0.05).unwrap();
        let zero = MlpWeights::<f64>::zeros().fixed();
        assert_eq!(enumerate_marked(&win, &zero, 0.5).k(), 0);
    }

    #[test]
    fn threaded_scan_matches_serial() {
        let win = Window::square(64, 0.25).unwrap();
        for seed in 0..6 {
            let f = fixed(seed);
            assert_eq!(enumerate_marked(&win, &f, 0.5), enumerate_marked_threaded(&win, &f, 0.5, 4));
        }
    }

    #[test]
    fn count_table_layout() {
        let table = solution_count_table(&[8, 16], &[0.5, 0.25], &fixed(0), 0.5, 1).unwrap();
        assert_eq!(table.len(), 4);
        assert_eq!((table[0].dp, table[0].window), (0.5, 8));
        assert_eq!((table[1].dp, table[1].window), (0.5, 16));
        let mut buf = Vec::new();
        write_solution_table_csv(&table, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("dp,window,count\n0.5,8,"));
    }
}

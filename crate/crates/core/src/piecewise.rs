//! Left-open, right-closed piecewise-constant functions of time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A step function on `[0, ∞)`.
///
/// `values[i]` applies on `(breaks[i-1], breaks[i]]` with `breaks[-1] = 0`.
/// Past the last break the last value continues; callers that must not
/// extrapolate check [`PiecewiseConstant::horizon`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(Error::input(format!(
                "step function needs matching non-empty grids ({} breaks, {} values)",
                breaks.len(),
                values.len()
            )));
        }
        if !(breaks[0] > 0.0) {
            return Err(Error::ordering("first break must be positive"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ordering("breaks must be strictly increasing"));
        }
        if values.iter().chain(&breaks).any(|v| !v.is_finite()) {
            return Err(Error::input("step function contains non-finite entries"));
        }
        Ok(Self { breaks, values })
    }

    /// A single value on `(0, horizon]`.
    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![horizon], vec![value])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Index of the piece containing `t` (right-closed), clamped to the last.
    fn piece(&self, t: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b < t);
        i.min(self.values.len() - 1)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.piece(t)]
    }

    /// Iterates over the pieces overlapping `[a, b]` as `(start, end, value)`,
    /// extending the last value beyond the horizon.
    pub fn segments(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.values.len();
        (0..n).filter_map(move |i| {
            let lo = if i == 0 { 0.0 } else { self.breaks[i - 1] };
            let hi = if i + 1 == n {
                f64::INFINITY
            } else {
                self.breaks[i]
            };
            let s = lo.max(a);
            let e = hi.min(b);
            (e > s).then_some((s, e, self.values[i]))
        })
    }

    /// `∫_a^b v(u) du` for `a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.segments(a, b).map(|(s, e, v)| v * (e - s)).sum()
    }

    /// `∫_a^b exp(-k (b - u)) v(u) du`, the mean-reversion weighted integral.
    pub fn decayed_integral(&self, a: f64, b: f64, k: f64) -> f64 {
        self.segments(a, b)
            .map(|(s, e, v)| v * (-k * (b - e)).exp() * crate::math::decay_integral(k, e - s))
            .sum()
    }

    /// Pointwise combination on the union of both break grids.
    pub fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut grid: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let values = grid
            .iter()
            .map(|&t| f(self.value_at(t), other.value_at(t)))
            .collect();
        Self {
            breaks: grid,
            values,
        }
    }

    /// Breaks falling strictly inside `(a, b)`.
    pub fn interior_breaks(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        self.breaks.iter().copied().filter(move |&t| t > a && t < b)
    }
}

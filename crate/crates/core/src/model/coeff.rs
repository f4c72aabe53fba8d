//! Piecewise-constant, right-continuous rate functions on `[0, ∞)`.

use serde::{Serialize, Serializer};

use crate::error::CoeffError;

/// A nonnegative step function with exact integrals.
///
/// Segment `i` covers `[breaks[i], breaks[i + 1])`; the last segment extends
/// to infinity. Cumulative integrals at each breakpoint are cached so that
/// `integral` and `inverse_integral` are `O(log segments)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self, CoeffError> {
        if breaks.is_empty() {
            return Err(CoeffError::Empty);
        }
        if breaks.len() != values.len() {
            return Err(CoeffError::LengthMismatch {
                breaks: breaks.len(),
                values: values.len(),
            });
        }
        if breaks[0] != 0.0 {
            return Err(CoeffError::FirstBreakNotZero(breaks[0]));
        }
        for (i, w) in breaks.windows(2).enumerate() {
            if !w[1].is_finite() || w[1] <= w[0] {
                return Err(CoeffError::NotIncreasing { index: i + 1 });
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(CoeffError::BadValue { segment: i, value: v });
            }
        }
        let mut cum = Vec::with_capacity(breaks.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 1..breaks.len() {
            acc += values[i - 1] * (breaks[i] - breaks[i - 1]);
            cum.push(acc);
        }
        Ok(Self { breaks, values, cum })
    }

    /// Constant rate `value` on `[0, ∞)`.
    ///
    /// # Panics
    /// If `value` is negative or not finite.
    pub fn constant(value: f64) -> Self {
        Self::new(vec![0.0], vec![value]).expect("constant rate must be finite and nonnegative")
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Smallest value taken on `[0, horizon]`.
    pub fn min_on(&self, horizon: f64) -> f64 {
        self.breaks
            .iter()
            .zip(&self.values)
            .filter(|(&b, _)| b <= horizon)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_on(&self, horizon: f64) -> f64 {
        self.breaks
            .iter()
            .zip(&self.values)
            .filter(|(&b, _)| b <= horizon)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max)
    }

    #[inline]
    pub fn segment(&self, t: f64) -> usize {
        self.breaks.partition_point(|&b| b <= t).saturating_sub(1)
    }

    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.segment(t)]
    }

    /// Exact `∫₀ᵗ f(s) ds` for `t ≥ 0`.
    #[inline]
    pub fn integral(&self, t: f64) -> f64 {
        let i = self.segment(t);
        self.cum[i] + self.values[i] * (t - self.breaks[i])
    }

    /// `∫ₐᵇ f(s) ds`, zero when `b ≤ a`.
    #[inline]
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            0.0
        } else {
            self.integral(b) - self.integral(a)
        }
    }

    /// Smallest `t` with `∫₀ᵗ f = h`, or `∞` if the integral never reaches `h`.
    pub fn inverse_integral(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        // last segment whose cumulative start is < h
        let i = self.cum.partition_point(|&c| c < h).saturating_sub(1);
        let v = self.values[i];
        let rest = h - self.cum[i];
        if v > 0.0 {
            let t = self.breaks[i] + rest / v;
            match self.breaks.get(i + 1) {
                Some(&next) if t > next => next,
                _ => t,
            }
        } else {
            // zero-rate segment: only the tail matters
            if i + 1 == self.breaks.len() {
                f64::INFINITY
            } else {
                self.breaks[i + 1]
            }
        }
    }
}

impl Serialize for PiecewiseConstant {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        if self.breaks.len() == 1 {
            return serializer.serialize_f64(self.values[0]);
        }
        let mut st = serializer.serialize_struct("PiecewiseConstant", 2)?;
        st.serialize_field("breaks", &self.breaks)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

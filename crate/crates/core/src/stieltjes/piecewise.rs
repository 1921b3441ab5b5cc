use crate::error::{Error, Result};

/// Continuous piecewise-linear interpolant through `(knots[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidFunction(
                "piecewise-linear function needs at least two knots".into(),
            ));
        }
        if knots.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidFunction("knots and values must be finite".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("knots must be strictly increasing".into()));
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index `i` of the segment `[knots[i], knots[i+1]]` containing `t`.
    pub(crate) fn segment(&self, t: f64) -> usize {
        let last = self.knots.len() - 2;
        match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if t <= t0 {
            return v0;
        }
        if t >= t1 {
            return v1;
        }
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    /// Same interpolant with every value shifted by `-shift`.
    pub(crate) fn shifted(&self, shift: f64) -> Self {
        Self {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| v - shift).collect(),
        }
    }

    /// Cumulative (positive, negative) variation from the first knot up to `t`.
    pub(crate) fn jordan_parts(&self, t: f64) -> (f64, f64) {
        let seg = self.segment(t);
        let mut pos = 0.0;
        let mut neg = 0.0;
        for i in 0..seg {
            let d = self.values[i + 1] - self.values[i];
            if d > 0.0 {
                pos += d;
            } else {
                neg -= d;
            }
        }
        let d = self.eval(t) - self.values[seg];
        if d > 0.0 {
            pos += d;
        } else {
            neg -= d;
        }
        (pos, neg)
    }

    pub(crate) fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub(crate) fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub(crate) fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

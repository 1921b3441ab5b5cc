use crate::error::{Error, Result};

/// `Σᵢ cᵢ 1_{[tᵢ₋₁, tᵢ)}` with `t₀ < t₁ < … < tₙ`; zero outside `[t₀, tₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    partition: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(partition: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || partition.len() != values.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "step function needs n >= 1 values and n + 1 partition points, got {} and {}",
                values.len(),
                partition.len()
            )));
        }
        if partition.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidFunction("step function entries must be finite".into()));
        }
        if partition.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("step partition must be strictly increasing".into()));
        }
        Ok(Self { partition, values })
    }

    /// `1_{[from, to)}`.
    pub fn indicator(from: f64, to: f64) -> Result<Self> {
        Self::new(vec![from, to], vec![1.0])
    }

    pub fn constant(from: f64, to: f64, c: f64) -> Result<Self> {
        Self::new(vec![from, to], vec![c])
    }

    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.partition[0], self.partition[self.partition.len() - 1])
    }

    pub fn value(&self, t: f64) -> f64 {
        let p = self.partition.partition_point(|&x| x <= t);
        if p == 0 || p == self.partition.len() {
            0.0
        } else {
            self.values[p - 1]
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            partition: self.partition.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `α·self + β·other` on the common refinement of both partitions.
    pub fn combine(&self, alpha: f64, other: &StepFunction, beta: f64) -> Self {
        let mut points: Vec<f64> = self.partition.iter().chain(&other.partition).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let values = points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                alpha * self.value(mid) + beta * other.value(mid)
            })
            .collect();
        Self { partition: points, values }
    }

    /// Pointwise product on the common refinement.
    pub fn product(&self, other: &StepFunction) -> Self {
        let mut points: Vec<f64> = self.partition.iter().chain(&other.partition).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let values = points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.value(mid) * other.value(mid)
            })
            .collect();
        Self { partition: points, values }
    }

    /// Restriction to `[s, t]`, or `None` if the supports do not overlap.
    pub fn restrict(&self, s: f64, t: f64) -> Option<Self> {
        let (start, end) = self.support();
        let lo = start.max(s);
        let hi = end.min(t);
        if lo >= hi {
            return None;
        }
        let mut partition = vec![lo];
        let mut values = Vec::new();
        for (i, &c) in self.values.iter().enumerate() {
            let right = self.partition[i + 1];
            if right <= lo {
                continue;
            }
            values.push(c);
            if right >= hi {
                break;
            }
            partition.push(right);
        }
        partition.push(hi);
        Some(Self { partition, values })
    }

    /// Canonical form: adjacent pieces with equal values merged.
    pub fn merged(&self) -> Self {
        let mut partition = vec![self.partition[0]];
        let mut values: Vec<f64> = Vec::new();
        for (i, &c) in self.values.iter().enumerate() {
            if values.last() == Some(&c) {
                *partition.last_mut().unwrap() = self.partition[i + 1];
            } else {
                values.push(c);
                partition.push(self.partition[i + 1]);
            }
        }
        Self { partition, values }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.values.iter().all(|&v| v <= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_pieces() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(f.value(-0.1), 0.0);
        assert_eq!(f.value(0.0), 1.0);
        assert_eq!(f.value(0.5), 2.0);
        assert_eq!(f.value(1.0), 0.0);
    }

    #[test]
    fn restriction_and_merge() {
        let f = StepFunction::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], vec![0.5, -0.5, 2.0]).unwrap();
        let r = f.restrict(0.25, 0.5).unwrap();
        assert_eq!(r.partition(), &[0.25, 1.0 / 3.0, 0.5]);
        assert_eq!(r.values(), &[0.5, -0.5]);
        assert!(f.restrict(1.0, 2.0).is_none());
        let g = StepFunction::new(vec![0.0, 0.25, 0.5, 1.0], vec![1.0, 1.0, 3.0]).unwrap();
        let m = g.merged();
        assert_eq!(m.partition(), &[0.0, 0.5, 1.0]);
        assert_eq!(m.values(), &[1.0, 3.0]);
    }

    #[test]
    fn combine_on_common_refinement() {
        let f = StepFunction::indicator(0.0, 0.5).unwrap();
        let g = StepFunction::indicator(0.25, 1.0).unwrap();
        let h = f.combine(2.0, &g, -1.0);
        assert_eq!(h.partition(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(h.values(), &[2.0, 1.0, -1.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(StepFunction::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }
}

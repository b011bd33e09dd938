//! Probability vectors over the synaptic-current states `{0, ..., K}`.

use thiserror::Error;

pub(crate) const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("probabilities must be nonnegative (entry {index} = {value})")]
    Negative { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within {tol}")]
    Mass { sum: f64, tol: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
}

/// The law of the synaptic current conditioned on `K` selective presynaptic
/// neurons: `K + 1` nonnegative entries summing to one within `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistVec {
    probs: Vec<f64>,
}

impl DistVec {
    pub fn new(probs: Vec<f64>) -> Result<Self, DistError> {
        for (index, &value) in probs.iter().enumerate() {
            if value < 0.0 {
                return Err(DistError::Negative { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(DistError::Mass {
                sum,
                tol: MASS_TOLERANCE,
            });
        }
        Ok(Self { probs })
    }

    /// Point mass at `state` on `{0, ..., k}`.
    pub fn point_mass(k: usize, state: usize) -> Self {
        assert!(state <= k);
        let mut probs = vec![0.0; k + 1];
        probs[state] = 1.0;
        Self { probs }
    }

    /// Uniform law on `{0, ..., k}`.
    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / (k as f64 + 1.0); k + 1],
        }
    }

    pub(crate) fn from_unchecked(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    /// Largest state, `K`.
    pub fn k(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, p)| j as f64 * p)
            .sum()
    }

    /// `P(X > theta)`.
    pub fn tail_above(&self, theta: i64) -> f64 {
        if theta < 0 {
            return 1.0;
        }
        let start = theta as usize + 1;
        if start >= self.probs.len() {
            return 0.0;
        }
        self.probs[start..].iter().sum()
    }

    /// `P(X <= theta)`.
    pub fn head_through(&self, theta: i64) -> f64 {
        if theta < 0 {
            return 0.0;
        }
        let end = (theta as usize + 1).min(self.probs.len());
        self.probs[..end].iter().sum()
    }
}

/// Total-variation distance `0.5 * sum |a_l - b_l|`, in `[0, 1]`.
pub fn tv_distance(a: &DistVec, b: &DistVec) -> Result<f64, DistError> {
    if a.len() != b.len() {
        return Err(DistError::Dimension {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(tv_slices(a.as_slice(), b.as_slice()))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_distributions_have_zero_distance() {
        let v = DistVec::uniform(7);
        assert_eq!(tv_distance(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_point_masses_have_distance_one() {
        let a = DistVec::point_mass(9, 0);
        let b = DistVec::point_mass(9, 9);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DistVec::uniform(3);
        let b = DistVec::uniform(4);
        assert!(tv_distance(&a, &b).is_err());
    }

    #[test]
    fn mass_violations_are_rejected() {
        assert!(DistVec::new(vec![0.5, 0.4]).is_err());
        assert!(DistVec::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(DistVec::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn tails_cover_boundaries() {
        let v = DistVec::uniform(3);
        assert_eq!(v.tail_above(-1), 1.0);
        assert_eq!(v.tail_above(3), 0.0);
        assert_eq!(v.head_through(-1), 0.0);
        assert_eq!(v.head_through(3), 1.0);
        approx::assert_relative_eq!(v.tail_above(1), 0.5);
    }
}

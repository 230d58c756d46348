//! One-dimensional Wasserstein distance on integer supports.

use crate::error::{Error, Result};
use crate::spectrum::NormalizedSpectrum;

const MASS_TOLERANCE: f64 = 1e-9;

/// Probability mass on the support points `1..=n` (unit spacing).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    mass: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument(
                "distribution mass must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "distribution mass sums to {total}, expected 1"
            )));
        }
        Ok(Self { mass })
    }

    /// Unit mass at `index` (0-based) of an `n`-point support.
    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "point mass index {index} outside support of size {n}"
            )));
        }
        let mut mass = vec![0.0; n];
        mass[index] = 1.0;
        Self::new(mass)
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }
}

impl From<NormalizedSpectrum> for DiscreteDistribution {
    fn from(s: NormalizedSpectrum) -> Self {
        Self {
            mass: s.into_entries(),
        }
    }
}

impl From<&NormalizedSpectrum> for DiscreteDistribution {
    fn from(s: &NormalizedSpectrum) -> Self {
        Self {
            mass: s.entries().to_vec(),
        }
    }
}

/// Running prefix sums of the mass.
pub fn cdf(dist: &DiscreteDistribution) -> Vec<f64> {
    dist.mass
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m;
            Some(*acc)
        })
        .collect()
}

/// `sum_d |CDF_p(d) - CDF_q(d)|`, the earth mover's distance for cost
/// `|x - y|` with unit spacing between support points.
pub fn wasserstein_1d(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    let mut cp = 0.0;
    let mut cq = 0.0;
    let mut total = 0.0;
    for (a, b) in p.mass.iter().zip(&q.mass) {
        cp += a;
        cq += b;
        total += (cp - cq).abs();
    }
    Ok(total)
}

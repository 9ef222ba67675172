use alloc::vec::Vec;
use core::ops::Deref;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::math::powf;

/// A finite nonincreasing sequence of weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Strictly positive, nonincreasing entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(domain!("weights must be finite and > 0, found {bad}"));
        }
        Self::check_sorted(&entries)?;
        Ok(WeightVector(entries))
    }

    /// Nonnegative, nonincreasing, not identically zero.
    pub fn new_nonneg(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(domain!("weights must be finite and ≥ 0, found {bad}"));
        }
        if entries.first().is_none_or(|&w| w == 0.0) {
            return Err(domain!("weight vector must be nonempty and not identically zero"));
        }
        Self::check_sorted(&entries)?;
        Ok(WeightVector(entries))
    }

    /// `w_i = (n/i)^{1/q}`, `i = 1..=n`.
    pub fn generated(n: usize, q: f64) -> Self {
        let w = (1..=n).map(|i| powf(n as f64 / i as f64, 1.0 / q)).collect();
        WeightVector(w)
    }

    fn check_sorted(entries: &[f64]) -> Result<()> {
        match entries.windows(2).position(|w| w[0] < w[1]) {
            Some(i) => Err(domain!(
                "weights must be nonincreasing: w[{i}] = {} < w[{}] = {}",
                entries[i],
                i + 1,
                entries[i + 1]
            )),
            None => Ok(()),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for WeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

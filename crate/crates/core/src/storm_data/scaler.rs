use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, N_FEATURES};
use crate::error::{Error, Result};

/// Per-feature min-max normalization fitted on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: [f64; N_FEATURES],
    pub max: [f64; N_FEATURES],
}

impl Scaler {
    /// Componentwise min and max over `features`.
    pub fn fit(features: &[FeatureVector]) -> Result<Self> {
        let first = features
            .first()
            .ok_or_else(|| Error::invalid("cannot fit a scaler on zero feature vectors"))?;
        let mut min = first.to_array();
        let mut max = min;
        for v in &features[1..] {
            for (i, x) in v.to_array().into_iter().enumerate() {
                min[i] = min[i].min(x);
                max[i] = max[i].max(x);
            }
        }
        Ok(Scaler { min, max })
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..N_FEATURES {
            if !(self.min[i].is_finite() && self.max[i].is_finite() && self.min[i] <= self.max[i]) {
                return Err(Error::validation(format!(
                    "scaler feature {i}: min {} / max {} invalid",
                    self.min[i], self.max[i]
                )));
            }
        }
        Ok(())
    }

    /// Maps feature `i` into `[0, 1]`, clamping values outside the fitted
    /// range. A constant feature maps to 0.
    pub fn normalize(&self, i: usize, x: f64) -> f64 {
        let span = self.max[i] - self.min[i];
        if span == 0.0 {
            return 0.0;
        }
        ((x - self.min[i]) / span).clamp(0.0, 1.0)
    }

    /// Inverse of [`Scaler::normalize`] without clamping, so model outputs
    /// outside `[0, 1]` map to degrees beyond the training range.
    pub fn denormalize(&self, i: usize, y: f64) -> f64 {
        y * (self.max[i] - self.min[i]) + self.min[i]
    }

    /// Width of the fitted range of feature `i`; converts normalized spreads
    /// into physical units.
    pub fn span(&self, i: usize) -> f64 {
        self.max[i] - self.min[i]
    }

    pub fn apply(&self, v: &FeatureVector, invert: bool) -> FeatureVector {
        let mut a = v.to_array();
        for (i, x) in a.iter_mut().enumerate() {
            *x = if invert {
                self.denormalize(i, *x)
            } else {
                self.normalize(i, *x)
            };
        }
        FeatureVector::from_array(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(x: f64) -> FeatureVector {
        FeatureVector::from_array([x; N_FEATURES])
    }

    #[test]
    fn fit_takes_extremes() {
        let s = Scaler::fit(&[fv(20.0), fv(10.0), fv(30.0)]).unwrap();
        assert_eq!(s.min, [10.0; N_FEATURES]);
        assert_eq!(s.max, [30.0; N_FEATURES]);
    }

    #[test]
    fn single_vector_is_degenerate() {
        let v = FeatureVector::from_array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = Scaler::fit(&[v]).unwrap();
        assert_eq!(s.min, s.max);
        assert_eq!(s.apply(&v, false), fv(0.0));
    }

    #[test]
    fn union_of_two_storms() {
        let a = [
            FeatureVector::from_array([1.0, 5.0, 0.0, 0.0, 0.0, 0.0]),
            FeatureVector::from_array([2.0, -5.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        let b = [FeatureVector::from_array([-1.0, 3.0, 9.0, 0.0, 0.0, 0.0])];
        let all: Vec<_> = a.iter().chain(b.iter()).copied().collect();
        let s = Scaler::fit(&all).unwrap();
        assert_eq!(s.min, [-1.0, -5.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.max, [2.0, 5.0, 9.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(Scaler::fit(&[]).is_err());
    }

    #[test]
    fn forward_values() {
        let s = Scaler::fit(&[fv(10.0), fv(30.0)]).unwrap();
        assert_eq!(s.apply(&fv(20.0), false), fv(0.5));
        assert_eq!(s.apply(&fv(10.0), false), fv(0.0));
        assert_eq!(s.apply(&fv(50.0), false), fv(1.0));
        assert_eq!(s.apply(&fv(-5.0), false), fv(0.0));
        let back = s.apply(&s.apply(&fv(17.3), false), true);
        assert!((back.lat - 17.3).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn round_trip_in_range(lo in -500.0f64..500.0, width in 1e-3f64..1000.0, t in 0.0f64..=1.0) {
            let hi = lo + width;
            let s = Scaler::fit(&[fv(lo), fv(hi)]).unwrap();
            let x = lo + t * width;
            let back = s.apply(&s.apply(&fv(x), false), true);
            for y in back.to_array() {
                prop_assert!((y - x).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}

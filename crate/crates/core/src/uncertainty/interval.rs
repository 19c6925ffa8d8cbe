use serde::{Deserialize, Serialize};

use super::ensemble::PredictionEnsemble;
use crate::error::{Error, Result};
use crate::storm_data::features::{LAT, LON};
use crate::storm_data::Scaler;

/// Credible levels reported by default, in percent.
pub const DEFAULT_LEVELS: [f64; 5] = [67.0, 90.0, 95.0, 98.0, 99.0];

/// Standard normal quantile `Phi^-1(p)` by Wichura's AS 241 rational
/// approximation (relative error about 1e-16).
#[allow(clippy::excessive_precision)]
pub fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                + 67265.770927008700853)
                * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                + 39307.89580009271061)
                * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                + 0.0151986665636164571966)
                * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                + 1.8463183175100546818e-5)
                * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Half-width multiplier of a two-sided central interval holding `level`
/// percent of a normal distribution.
pub fn z_for_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 100.0) {
        return Err(Error::invalid(format!("credible level {level} outside (0, 100)")));
    }
    Ok(inverse_normal_cdf((1.0 + level / 100.0) / 2.0))
}

/// Axis-aligned band `mean +- z * std` for latitude and longitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleBand {
    pub level: f64,
    pub z: f64,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl CredibleBand {
    pub fn contains(&self, coordinate: usize, value: f64) -> bool {
        self.lower[coordinate] <= value && value <= self.upper[coordinate]
    }

    /// The same band with its bounds mapped back to degrees.
    pub fn to_degrees(&self, scaler: &Scaler) -> CredibleBand {
        let map = |v: [f64; 2]| [scaler.denormalize(LAT, v[0]), scaler.denormalize(LON, v[1])];
        CredibleBand {
            lower: map(self.lower),
            upper: map(self.upper),
            ..*self
        }
    }
}

pub fn credible_band(ensemble: &PredictionEnsemble, level: f64) -> Result<CredibleBand> {
    let z = z_for_level(level)?;
    let mut lower = [0.0; 2];
    let mut upper = [0.0; 2];
    for c in 0..2 {
        let half = z * ensemble.std[c];
        lower[c] = ensemble.mean[c] - half;
        upper[c] = ensemble.mean[c] + half;
    }
    Ok(CredibleBand {
        level,
        z,
        lower,
        upper,
    })
}

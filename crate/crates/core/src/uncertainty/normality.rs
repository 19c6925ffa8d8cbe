//! D'Agostino-Pearson omnibus test of normality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sample for which the kurtosis transform is trusted.
pub const MIN_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityTest {
    #[serde(rename = "K2")]
    pub k2: f64,
    pub p: f64,
}

/// Normal deviate of the sample skewness (D'Agostino 1970).
fn skew_z(n: f64, b1: f64) -> f64 {
    let y = b1 * ((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    delta * (y / alpha).asinh()
}

/// Normal deviate of the sample kurtosis (Anscombe & Glynn 1983).
fn kurtosis_z(n: f64, b2: f64) -> f64 {
    let mean = 3.0 * (n - 1.0) / (n + 1.0);
    let var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0).powi(2) * (n + 3.0) * (n + 5.0));
    let x = (b2 - mean) / var.sqrt();
    let sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * (6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0
        + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    (term1 - term2) / (2.0 / (9.0 * a)).sqrt()
}

/// `K^2 = Z_skew^2 + Z_kurt^2` with its chi-square (2 dof) upper tail
/// probability `exp(-K^2 / 2)`.
pub fn dagostino_k2(values: &[f64]) -> Result<NormalityTest> {
    let n = values.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_SAMPLES,
            given: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normality test input".into()));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    // rounding noise of a constant sample stays within a few ulps of the mean
    if m2 == 0.0 || m2.sqrt() <= 4.0 * f64::EPSILON * mean.abs() {
        return Err(Error::ZeroVariance);
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let k2 = skew_z(nf, skew).powi(2) + kurtosis_z(nf, kurt).powi(2);
    Ok(NormalityTest {
        k2,
        p: (-k2 / 2.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_has_no_variance() {
        assert!(matches!(dagostino_k2(&[3.5; 40]), Err(Error::ZeroVariance)));
        assert!(matches!(dagostino_k2(&[0.1; 33]), Err(Error::ZeroVariance)));
    }

    #[test]
    fn nineteen_is_too_few() {
        let v: Vec<f64> = (0..19).map(f64::from).collect();
        assert!(matches!(
            dagostino_k2(&v),
            Err(Error::InsufficientData { needed: 20, given: 19 })
        ));
        let v: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(dagostino_k2(&v).is_ok());
    }

    #[test]
    fn p_value_is_chi_square_tail() {
        let v: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64).collect();
        let r = dagostino_k2(&v).unwrap();
        assert!(r.k2 > 0.0);
        assert_eq!(r.p, (-r.k2 / 2.0).exp());
    }

    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }

        fn normal(&mut self) -> f64 {
            let u1 = 1.0 - self.next();
            let u2 = self.next();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }

    fn reference_sample(seed: u64) -> Vec<f64> {
        let mut g = Lcg(seed);
        (0..100)
            .map(|_| {
                let z = g.normal();
                match seed {
                    4 => z * z,
                    5 => z.exp(),
                    _ => z,
                }
            })
            .collect()
    }

    // scipy.stats.normaltest on the same draws.
    const REFERENCE: [(u64, f64, f64, f64); 5] = [
        (1, 5.415942895668081, 0.06667191709128598, -1.0472394723915035),
        (2, 0.7171072043557858, 0.6986861737342707, 1.4832472184359768),
        (3, 2.797527127580113, 0.24690205393037296, -0.22206456694489596),
        (4, 63.98228333360119, 1.2776847296608581e-14, 0.014703876541362949),
        (5, 102.37545014583266, 5.881030878088667e-23, 3.1494814726441374),
    ];

    #[test]
    fn matches_reference_statistics() {
        for (seed, k2, p, first) in REFERENCE {
            let xs = reference_sample(seed);
            assert!((xs[0] - first).abs() < 1e-12, "seed {seed} draw {}", xs[0]);
            let t = dagostino_k2(&xs).unwrap();
            assert!((t.k2 - k2).abs() <= 1e-6, "seed {seed}: {} vs {k2}", t.k2);
            assert!((t.p - p).abs() <= 1e-6, "seed {seed}: {} vs {p}", t.p);
        }
    }
}

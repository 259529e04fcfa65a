//! Smooth nonnegative weights with closed-form Fourier transforms.
//!
//! The Fourier transform convention is Φ̂(ξ) = ∫ Φ(x) e^{-2πixξ} dx.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for every lattice-sum truncation.
pub const LATTICE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// Φ(x) = exp(-π (x/s)^2), Φ̂(ξ) = s exp(-π s^2 ξ^2).
    Gaussian { scale: f64 },
}

impl WeightSpec {
    pub fn gaussian(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "Gaussian scale must be positive, got {scale}"
            )));
        }
        Ok(WeightSpec::Gaussian { scale })
    }

    pub fn scale(&self) -> f64 {
        match *self {
            WeightSpec::Gaussian { scale } => scale,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            WeightSpec::Gaussian { scale } => {
                let u = x / scale;
                (-PI * u * u).exp()
            }
        }
    }

    #[inline]
    pub fn fourier(&self, xi: f64) -> f64 {
        match *self {
            WeightSpec::Gaussian { scale } => {
                let u = scale * xi;
                scale * (-PI * u * u).exp()
            }
        }
    }

    pub fn fourier_at_zero(&self) -> f64 {
        self.fourier(0.0)
    }

    /// Radius beyond which `value` is at most `tol` (exact root of Φ(x) = tol).
    pub fn truncation_radius(&self, tol: f64) -> f64 {
        match *self {
            WeightSpec::Gaussian { scale } => {
                if tol >= 1.0 {
                    0.0
                } else {
                    scale * ((1.0 / tol).ln() / PI).sqrt()
                }
            }
        }
    }

    /// Radius beyond which `fourier` is at most `tol`.
    pub fn fourier_truncation_radius(&self, tol: f64) -> f64 {
        match *self {
            WeightSpec::Gaussian { scale } => {
                if tol >= scale {
                    0.0
                } else {
                    ((scale / tol).ln() / PI).sqrt() / scale
                }
            }
        }
    }
}

/// Σ_{|k| <= radius} g(k), accumulated from the tails inward.
fn symmetric_lattice_sum(radius: f64, g: impl Fn(f64) -> f64) -> f64 {
    let kmax = radius.floor() as i64;
    let mut acc = 0.0;
    for k in (1..=kmax).rev() {
        let k = k as f64;
        acc += g(k) + g(-k);
    }
    acc + g(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

/// Σ_n Φ(n) against Σ_n Φ̂(n).
pub fn poisson_check(w: &WeightSpec) -> PoissonCheck {
    let lhs = symmetric_lattice_sum(w.truncation_radius(LATTICE_TOL), |x| w.value(x));
    let rhs = symmetric_lattice_sum(w.fourier_truncation_radius(LATTICE_TOL), |x| w.fourier(x));
    PoissonCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidueClass {
    All,
    /// x ≡ residue mod modulus
    Congruent {
        residue: u64,
        modulus: u64,
    },
    /// gcd(x, p) = 1
    CoprimeTo(u64),
}

impl ResidueClass {
    #[inline]
    pub fn contains(&self, x: i64) -> bool {
        match *self {
            ResidueClass::All => true,
            ResidueClass::Congruent { residue, modulus } => {
                x.rem_euclid(modulus as i64) as u64 == residue % modulus
            }
            ResidueClass::CoprimeTo(p) => x % p as i64 != 0,
        }
    }
}

/// Σ_{x in class} Φ(x/N), truncated where Φ drops below 1e-15.
pub fn weighted_lattice_sum(w: &WeightSpec, n_scale: f64, class: ResidueClass) -> Result<f64> {
    if n_scale.is_nan() || n_scale < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "N must be >= 1, got {n_scale}"
        )));
    }
    let radius = n_scale * w.truncation_radius(LATTICE_TOL);
    Ok(symmetric_lattice_sum(radius, |x| {
        if class.contains(x as i64) {
            w.value(x / n_scale)
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        let g1 = WeightSpec::gaussian(1.0).unwrap();
        assert_eq!(g1.value(0.0), 1.0);
        assert_eq!(g1.fourier_at_zero(), 1.0);
        assert_eq!(WeightSpec::gaussian(2.0).unwrap().fourier_at_zero(), 2.0);
        let r = g1.truncation_radius(1e-12);
        assert!(r <= 3.0 && (g1.value(r) - 1e-12).abs() < 1e-24);
        assert!(g1.value(3.0) < 5.3e-13);
        assert!(WeightSpec::gaussian(0.0).is_err());
        assert!(WeightSpec::gaussian(-1.0).is_err());
    }

    #[test]
    fn nonnegative_on_grid() {
        for s in [0.5, 1.0, 2.0, 5.0] {
            let w = WeightSpec::gaussian(s).unwrap();
            for i in -4000..=4000 {
                let x = i as f64 * 0.01;
                assert!(w.value(x) >= 0.0);
                assert!(w.fourier(x) >= 0.0);
            }
        }
    }

    #[test]
    fn poisson_examples() {
        let c = poisson_check(&WeightSpec::gaussian(1.0).unwrap());
        assert!((c.lhs - 1.086_434_811_213_308).abs() < 1e-12, "{c:?}");
        assert!(c.diff <= 1e-12);

        let c2 = poisson_check(&WeightSpec::gaussian(2.0).unwrap());
        assert!((c2.lhs - 2.000_013_9).abs() < 1e-7, "{c2:?}");
        let e = (-PI).exp();
        let series = 1.0
            + 2.0 * (-PI / 4.0).exp()
            + 2.0 * e
            + 2.0 * (-9.0 * PI / 4.0).exp()
            + 2.0 * e.powi(4)
            + 2.0 * (-25.0 * PI / 4.0).exp()
            + 2.0 * e.powi(9);
        assert!((c2.lhs - series).abs() < 1e-12);

        let half = poisson_check(&WeightSpec::gaussian(0.5).unwrap());
        assert!((half.rhs - c2.lhs / 2.0).abs() < 1e-12);
        for s in [0.5, 1.0, 2.0, 5.0] {
            assert!(poisson_check(&WeightSpec::gaussian(s).unwrap()).diff <= 1e-12);
        }
    }

    #[test]
    fn lattice_sums() {
        let w = WeightSpec::gaussian(1.0).unwrap();
        let all = weighted_lattice_sum(&w, 1000.0, ResidueClass::All).unwrap();
        assert!((all / 1000.0 - 1.0).abs() < 1e-6);
        let coprime = weighted_lattice_sum(&w, 1000.0, ResidueClass::CoprimeTo(7)).unwrap();
        assert!((coprime / (1000.0 * 6.0 / 7.0) - 1.0).abs() < 1e-6);
        let trivial = weighted_lattice_sum(
            &w,
            37.5,
            ResidueClass::Congruent {
                residue: 0,
                modulus: 1,
            },
        )
        .unwrap();
        assert_eq!(
            trivial,
            weighted_lattice_sum(&w, 37.5, ResidueClass::All).unwrap()
        );
        for n in [100.0, 250.0, 1234.5] {
            let s = weighted_lattice_sum(&w, n, ResidueClass::All).unwrap();
            assert!((s / (n * w.fourier_at_zero()) - 1.0).abs() <= 1e-6);
        }
        assert!(weighted_lattice_sum(&w, 0.5, ResidueClass::All).is_err());
    }
}

//! Counting solutions of x1^2 + x2^2 ≡ x3^2 mod p^n with unit coordinates.
//!
//! `count_smoothed` measures the weighted sum
//! T = Σ Φ(x1/N) Φ(x2/N) Φ(x3/N) over unit solutions, and
//! `predict_main_term` gives Φ̂(0)^3 (p - s(p))(p - 1)/p^2 · N^3/p^n.
//! The exact integer paths (box counts, Pythagorean triples, r2) never go
//! through floating point.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::s_of_p;
use crate::error::{Error, Result};
use crate::modulus::PrimePowerModulus;
use crate::reduce::{chunked_sum, Neumaier};
use crate::weights::WeightSpec;

/// Bucket tables are held in memory for q up to this bound.
pub const BUCKET_LIMIT: u64 = 1 << 26;
/// Largest number of lattice points visited by the triple loop.
pub const TRIPLE_LOOP_LIMIT: u64 = 1_000_000_000;
/// Largest box half-width for the exact box count.
pub const BOX_LIMIT: u64 = 20_000;
pub const PYTHAGOREAN_LIMIT: u64 = 10_000_000;
pub const DUAL_LIMIT: u64 = 10_000;
/// Default box cutoff, in units of N, for Gaussian weights.
pub const DEFAULT_CUTOFF: f64 = 3.5;

const ROW_CHUNK: u64 = 16;
const NO_ROOT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    TripleLoop,
    SqrtBucket,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::TripleLoop => "triple-loop",
            CountMethod::SqrtBucket => "sqrt-bucket",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountConfig {
    pub modulus: PrimePowerModulus,
    /// Box scale N.
    pub n_scale: f64,
    pub weight: WeightSpec,
    /// Coordinates are summed over |x| <= cutoff · N.
    pub cutoff: f64,
    pub method: CountMethod,
}

impl CountConfig {
    pub fn new(
        modulus: PrimePowerModulus,
        n_scale: f64,
        weight: WeightSpec,
        cutoff: f64,
        method: CountMethod,
    ) -> Result<Self> {
        if modulus.p() <= 5 {
            return Err(Error::SmallPrime(modulus.p()));
        }
        if !(n_scale >= 1.0 && n_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "N must be >= 1, got {n_scale}"
            )));
        }
        let min_cutoff = weight.truncation_radius(1e-12);
        if cutoff.is_nan() || cutoff < min_cutoff {
            return Err(Error::InvalidConfig(format!(
                "cutoff {cutoff} is below the weight's truncation radius {min_cutoff:.4}"
            )));
        }
        Ok(Self {
            modulus,
            n_scale,
            weight,
            cutoff,
            method,
        })
    }

    /// Gaussian weight of scale 1, cutoff 3.5, sqrt-bucket.
    pub fn standard(modulus: PrimePowerModulus, n_scale: f64) -> Result<Self> {
        Self::new(
            modulus,
            n_scale,
            WeightSpec::gaussian(1.0)?,
            DEFAULT_CUTOFF,
            CountMethod::SqrtBucket,
        )
    }

    /// Largest coordinate visited.
    pub fn bound(&self) -> u64 {
        (self.cutoff * self.n_scale).floor() as u64
    }

    /// log N / log q
    pub fn nu(&self) -> f64 {
        self.n_scale.ln() / (self.modulus.q() as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    #[serde(rename = "N")]
    pub n_scale: f64,
    pub nu: f64,
    pub weight: WeightSpec,
    pub phi_scale: f64,
    pub cutoff: f64,
    pub method: CountMethod,
    #[serde(rename = "measured_T")]
    pub measured_t: f64,
    #[serde(rename = "predicted_T0")]
    pub predicted_t0: f64,
    pub ratio: f64,
    /// measured_T - predicted_T0
    pub error_term: f64,
    /// Upper bound on a single dropped weight factor at the box edge.
    pub truncation_weight: f64,
    pub exact_box_count: Option<u64>,
    pub wall_time_s: f64,
}

/// Φ̂(0)^3 (p - s(p))(p - 1)/p^2 · N^3 / p^n
pub fn predict_main_term(cfg: &CountConfig) -> Result<f64> {
    let p = cfg.modulus.p();
    if p <= 5 {
        return Err(Error::SmallPrime(p));
    }
    let pf = p as f64;
    let density = ((p - s_of_p(p)) * (p - 1)) as f64 / (pf * pf);
    Ok(
        cfg.weight.fourier_at_zero().powi(3) * density * cfg.n_scale.powi(3)
            / cfg.modulus.q() as f64,
    )
}

fn weight_table(cfg: &CountConfig) -> Vec<f64> {
    (0..=cfg.bound())
        .map(|x| cfg.weight.value(x as f64 / cfg.n_scale))
        .collect()
}

/// For each residue c mod q, the smaller unit square root of c, or NO_ROOT.
fn root_table(m: &PrimePowerModulus) -> Vec<u32> {
    let (p, q) = (m.p(), m.q());
    let mut roots = vec![NO_ROOT; q as usize];
    for x in (1..=(q - 1) / 2).filter(|x| x % p != 0) {
        roots[(x * x % q) as usize] = x as u32;
    }
    roots
}

/// Visit x3 in [1, bound] with x3 ≡ ±root mod q.
#[inline]
fn for_each_positive_root(root: u64, q: u64, bound: u64, mut f: impl FnMut(u64)) {
    for start in [root, q - root] {
        let mut x3 = start;
        while x3 <= bound {
            f(x3);
            x3 += q;
        }
    }
}

fn smoothed_sqrt_bucket(cfg: &CountConfig) -> Result<f64> {
    let m = cfg.modulus;
    let (p, q) = (m.p(), m.q());
    if q > BUCKET_LIMIT {
        return Err(Error::TooLarge(format!(
            "sqrt-bucket needs q <= 2^26, got {q}"
        )));
    }
    let bound = cfg.bound();
    let w = weight_table(cfg);
    let roots = root_table(&m);
    // Every coordinate is a nonzero unit, so the eight sign patterns are summed
    // once over the positive octant.
    let octant = chunked_sum(bound, ROW_CHUNK, |rows| {
        let mut acc = Neumaier::default();
        for x1 in rows.map(|i| i + 1).filter(|x| x % p != 0) {
            let sq1 = x1 * x1 % q;
            let mut row = Neumaier::default();
            for x2 in (1..=bound).filter(|x| x % p != 0) {
                let c = (sq1 + x2 * x2 % q) % q;
                let root = roots[c as usize];
                if root == NO_ROOT {
                    continue;
                }
                let mut column = 0.0;
                for_each_positive_root(root as u64, q, bound, |x3| column += w[x3 as usize]);
                if column != 0.0 {
                    row.add(w[x2 as usize] * column);
                }
            }
            acc.add(w[x1 as usize] * row.value());
        }
        acc.value()
    });
    Ok(8.0 * octant)
}

fn smoothed_triple_loop(cfg: &CountConfig) -> Result<f64> {
    let m = cfg.modulus;
    let (p, q) = (m.p() as i64, m.q() as i64);
    let bound = cfg.bound() as i64;
    let side = (2 * bound + 1) as u64;
    if side.saturating_pow(3) > TRIPLE_LOOP_LIMIT {
        return Err(Error::TooLarge(format!(
            "triple loop over {side}^3 points exceeds {TRIPLE_LOOP_LIMIT}"
        )));
    }
    let w = weight_table(cfg);
    let weight = |x: i64| w[x.unsigned_abs() as usize];
    Ok(chunked_sum(side, 1, |rows| {
        let mut acc = Neumaier::default();
        for x1 in rows.map(|i| i as i64 - bound).filter(|x| x % p != 0) {
            for x2 in (-bound..=bound).filter(|x| x % p != 0) {
                for x3 in (-bound..=bound).filter(|x| x % p != 0) {
                    if (x1 * x1 + x2 * x2 - x3 * x3).rem_euclid(q) == 0 {
                        acc.add(weight(x1) * weight(x2) * weight(x3));
                    }
                }
            }
        }
        acc.value()
    }))
}

/// Measure T for the configuration and compare it with the main term.
pub fn count_smoothed(cfg: &CountConfig) -> Result<CountReport> {
    let start = Instant::now();
    let measured = match cfg.method {
        CountMethod::SqrtBucket => smoothed_sqrt_bucket(cfg)?,
        CountMethod::TripleLoop => smoothed_triple_loop(cfg)?,
    };
    let predicted = predict_main_term(cfg)?;
    let m = cfg.modulus;
    Ok(CountReport {
        p: m.p(),
        n: m.n(),
        q: m.q(),
        n_scale: cfg.n_scale,
        nu: cfg.nu(),
        weight: cfg.weight,
        phi_scale: cfg.weight.scale(),
        cutoff: cfg.cutoff,
        method: cfg.method,
        measured_t: measured,
        predicted_t0: predicted,
        ratio: if predicted > 0.0 {
            measured / predicted
        } else {
            f64::NAN
        },
        error_term: measured - predicted,
        truncation_weight: cfg.weight.value(cfg.cutoff),
        exact_box_count: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Number of unit solutions with max |x_i| <= N.
pub fn count_box_exact(m: &PrimePowerModulus, n_box: u64) -> Result<u64> {
    let (p, q) = (m.p(), m.q());
    if q > BUCKET_LIMIT || n_box > BOX_LIMIT {
        return Err(Error::TooLarge(format!(
            "exact box count needs q <= 2^26 and N <= {BOX_LIMIT}"
        )));
    }
    let roots = root_table(m);
    let octant: u64 = (1..=n_box)
        .into_par_iter()
        .filter(|x| x % p != 0)
        .map(|x1| {
            let sq1 = x1 * x1 % q;
            let mut count = 0u64;
            for x2 in (1..=n_box).filter(|x| x % p != 0) {
                let root = roots[((sq1 + x2 * x2 % q) % q) as usize];
                if root != NO_ROOT {
                    for_each_positive_root(root as u64, q, n_box, |_| count += 1);
                }
            }
            count
        })
        .sum();
    Ok(8 * octant)
}

/// Unit solutions of the equation x1^2 + x2^2 = x3^2 with max |x_i| <= N.
pub fn count_box_equation(p: u64, n_box: u64) -> u64 {
    let octant: u64 = (1..=n_box)
        .into_par_iter()
        .filter(|x| x % p != 0)
        .map(|x1| {
            (1..=n_box)
                .filter(|x2| x2 % p != 0)
                .filter(|x2| {
                    let s = x1 * x1 + x2 * x2;
                    let x3 = s.isqrt();
                    x3 * x3 == s && x3 <= n_box && x3 % p != 0
                })
                .count() as u64
        })
        .sum();
    8 * octant
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub congruence_count: u64,
    pub equation_count: u64,
    pub equal: bool,
}

/// Below N = √(q/2) every congruence solution in the box is an exact triple.
pub fn transition_check(m: &PrimePowerModulus, n_box: u64) -> Result<TransitionReport> {
    if 2 * (n_box as u128).pow(2) >= m.q() as u128 {
        return Err(Error::RangeViolation { n_box, q: m.q() });
    }
    let congruence_count = count_box_exact(m, n_box)?;
    let equation_count = count_box_equation(m.p(), n_box);
    Ok(TransitionReport {
        congruence_count,
        equation_count,
        equal: congruence_count == equation_count,
    })
}

/// Number of ordered (a, b) in Z^2 with a^2 + b^2 = m.
pub fn r2(m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    let mut rest = m;
    let mut count = 4u64;
    let mut d = 2u64;
    while (d as u128) * (d as u128) <= rest as u128 {
        if rest.is_multiple_of(d) {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            match d % 4 {
                1 => count *= e + 1,
                3 if e % 2 == 1 => return 0,
                _ => {}
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        match rest % 4 {
            1 => count *= 2,
            3 => return 0,
            _ => {}
        }
    }
    count
}

/// #{(x1, x2, x3) in Z^3 : x1^2 + x2^2 = x3^2, |x3| <= N} = 1 + 2 Σ_{m=1}^{N} r2(m^2).
pub fn count_pythagorean(n_box: u64) -> Result<u64> {
    if n_box > PYTHAGOREAN_LIMIT {
        return Err(Error::TooLarge(format!(
            "N = {n_box} > {PYTHAGOREAN_LIMIT}"
        )));
    }
    let n = n_box as usize;
    // Smallest prime factor sieve; r2(m^2) = 4 Π_{p ≡ 1 mod 4} (2 e_p + 1).
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            for j in (i..=n).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    let sum: u64 = (1..=n)
        .into_par_iter()
        .map(|mut m| {
            let mut h = 4u64;
            while m > 1 {
                let p = spf[m] as usize;
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                if p % 4 == 1 {
                    h *= 2 * e + 1;
                }
            }
            h
        })
        .sum();
    Ok(1 + 2 * sum)
}

/// (8/π) N log N
pub fn pythagorean_asymptotic(n_box: u64) -> f64 {
    let n = n_box as f64;
    8.0 / PI * n * n.ln()
}

/// Nonzero (l1, l2, l3) with |l_i| <= L and l1^2 + l2^2 ≡ l3^2 mod m.
pub fn dual_triple_count(l_box: u64, m: &PrimePowerModulus) -> Result<u64> {
    if l_box > DUAL_LIMIT {
        return Err(Error::TooLarge(format!("L = {l_box} > {DUAL_LIMIT}")));
    }
    let q = m.q();
    let l = l_box as i64;
    let square = |x: i64| (x * x) as u64 % q;
    // Histogram of l3^2 mod q over the box.
    let mut hist: HashMap<u64, u64> = HashMap::new();
    for l3 in -l..=l {
        *hist.entry(square(l3)).or_default() += 1;
    }
    let total: u64 = (-l..=l)
        .into_par_iter()
        .map(|l1| {
            let s1 = square(l1);
            (-l..=l)
                .map(|l2| hist.get(&((s1 + square(l2)) % q)).copied().unwrap_or(0))
                .sum::<u64>()
        })
        .sum();
    // Remove the origin, which always solves the congruence.
    Ok(total - 1)
}

/// Nonzero exact triples with all |l_i| <= L.
pub fn dual_triple_count_equation(l_box: u64) -> Result<u64> {
    Ok(count_pythagorean(l_box)? - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn brute_box(m: &PrimePowerModulus, n_box: i64) -> u64 {
        let (p, q) = (m.p() as i64, m.q() as i64);
        let mut c = 0;
        for x1 in -n_box..=n_box {
            for x2 in -n_box..=n_box {
                for x3 in -n_box..=n_box {
                    if x1 % p != 0
                        && x2 % p != 0
                        && x3 % p != 0
                        && (x1 * x1 + x2 * x2 - x3 * x3).rem_euclid(q) == 0
                    {
                        c += 1;
                    }
                }
            }
        }
        c
    }

    fn brute_r2(m: u64) -> u64 {
        let top = m.isqrt() as i64;
        let mut c = 0;
        for a in -top..=top {
            let rest = m - (a * a) as u64;
            let b = rest.isqrt();
            if b * b == rest {
                c += if b == 0 { 1 } else { 2 };
            }
        }
        c
    }

    #[test]
    fn predict_examples() {
        let cfg = CountConfig::standard(md(7, 6), 3545.0).unwrap();
        let t0 = predict_main_term(&cfg).unwrap();
        let expected = 24.0 / 49.0 * 3545f64.powi(3) / 117_649.0;
        assert!((t0 - expected).abs() < 1e-9 * expected);
        assert!((t0 - 1.8547e5).abs() < 5.0);

        let cfg = CountConfig::standard(md(13, 4), 1000.0).unwrap();
        let t0 = predict_main_term(&cfg).unwrap();
        assert!((t0 - 96.0 / 169.0 * 1e9 / 28_561.0).abs() < 1e-6);
        assert!((t0 - 1.9889e4).abs() < 1.0);

        let scaled = CountConfig::new(
            md(13, 4),
            1000.0,
            WeightSpec::gaussian(2.0).unwrap(),
            8.0,
            CountMethod::SqrtBucket,
        )
        .unwrap();
        let ratio = predict_main_term(&scaled).unwrap() / t0;
        assert!((ratio - 8.0).abs() < 1e-12);
    }

    #[test]
    fn prediction_scales_exactly() {
        for (p, n) in [(7, 2), (11, 3), (13, 4)] {
            let base = predict_main_term(&CountConfig::standard(md(p, n), 10.0).unwrap()).unwrap();
            let big = predict_main_term(&CountConfig::standard(md(p, n), 20.0).unwrap()).unwrap();
            assert!((big / base - 8.0).abs() < 1e-12);
            let up =
                predict_main_term(&CountConfig::standard(md(p, n + 1), 10.0).unwrap()).unwrap();
            assert!((base / up - p as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            CountConfig::standard(md(5, 3), 100.0),
            Err(Error::SmallPrime(5))
        );
        assert!(CountConfig::standard(md(7, 3), 0.5).is_err());
        let w = WeightSpec::gaussian(1.0).unwrap();
        assert!(CountConfig::new(md(7, 3), 10.0, w, 2.0, CountMethod::SqrtBucket).is_err());
    }

    #[test]
    fn methods_agree_small() {
        for (p, n, big_n) in [
            (7, 1, 3.0),
            (7, 2, 5.0),
            (7, 3, 8.0),
            (11, 2, 6.5),
            (13, 1, 4.0),
        ] {
            let mut cfg = CountConfig::standard(md(p, n), big_n).unwrap();
            let bucket = count_smoothed(&cfg).unwrap();
            cfg.method = CountMethod::TripleLoop;
            let triple = count_smoothed(&cfg).unwrap();
            let rel = (bucket.measured_t - triple.measured_t).abs() / triple.measured_t;
            assert!(
                rel <= 1e-9,
                "p={p} n={n}: {} vs {}",
                bucket.measured_t,
                triple.measured_t
            );
        }
    }

    #[test]
    fn vanishing_weight_gives_zero() {
        let w = WeightSpec::gaussian(1e-3).unwrap();
        let cfg = CountConfig::new(md(7, 1), 3.0, w, 3.5, CountMethod::TripleLoop).unwrap();
        assert_eq!(count_smoothed(&cfg).unwrap().measured_t, 0.0);
    }

    #[test]
    fn box_counts() {
        assert_eq!(count_box_exact(&md(7, 2), 4).unwrap(), 0);
        assert_eq!(count_box_exact(&md(7, 1), 0).unwrap(), 0);
        let c = count_box_exact(&md(7, 2), 10).unwrap();
        assert_eq!(c, brute_box(&md(7, 2), 10));
        assert!(c >= 32);
        for (p, n) in [(7, 2), (7, 3), (7, 4), (11, 2), (13, 2)] {
            for n_box in [1, 7, 13, 25] {
                assert_eq!(
                    count_box_exact(&md(p, n), n_box).unwrap(),
                    brute_box(&md(p, n), n_box as i64)
                );
            }
        }
    }

    #[test]
    fn transition_examples() {
        let r = transition_check(&md(7, 2), 4).unwrap();
        assert_eq!(
            (r.congruence_count, r.equation_count, r.equal),
            (0, 0, true)
        );
        assert_eq!(
            transition_check(&md(7, 2), 10),
            Err(Error::RangeViolation { n_box: 10, q: 49 })
        );
        let r = transition_check(&md(7, 6), 200).unwrap();
        assert!(r.equal && r.congruence_count > 0);
    }

    #[test]
    fn r2_values() {
        assert_eq!(r2(0), 1);
        assert_eq!(r2(25), 12);
        assert_eq!(r2(3), 0);
        assert_eq!(r2(2), 4);
        assert_eq!(r2(1_000_000_007 * 13), 0);
        for m in 0..=10_000 {
            assert_eq!(r2(m), brute_r2(m), "m = {m}");
        }
    }

    #[test]
    fn pythagorean_small() {
        assert_eq!(count_pythagorean(0).unwrap(), 1);
        assert_eq!(count_pythagorean(5).unwrap(), 57);
        let mut prev = 0;
        for n in 0..200u64 {
            let direct = 1 + 2 * (1..=n).map(|m| r2(m * m)).sum::<u64>();
            let c = count_pythagorean(n).unwrap();
            assert_eq!(c, direct);
            assert!(c >= prev);
            prev = c;
        }
        assert!(count_pythagorean(PYTHAGOREAN_LIMIT + 1).is_err());
    }

    #[test]
    fn dual_counts() {
        assert_eq!(dual_triple_count(5, &md(7, 6)).unwrap(), 56);
        assert_eq!(dual_triple_count_equation(5).unwrap(), 56);
        let cong = dual_triple_count(3, &md(7, 1)).unwrap();
        assert!(cong > dual_triple_count_equation(3).unwrap());
        assert_eq!(dual_triple_count(0, &md(7, 1)).unwrap(), 0);
        // Below √(q/2) the congruence is the equation.
        for (l, m) in [(12, md(7, 3)), (25, md(11, 3)), (9, md(13, 2))] {
            assert!(2 * l * l < m.q());
            assert_eq!(
                dual_triple_count(l, &m).unwrap(),
                dual_triple_count_equation(l).unwrap()
            );
        }
    }
}

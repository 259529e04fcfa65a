//! Complete exponential sums modulo prime powers.
//!
//! Two independent routes are provided for S_α(f; p^n), the sum of
//! e_{p^n}(f(x)) over x ≡ α mod p: a termwise brute force that works for any
//! rational function, and the stationary-phase closed form valid when
//! r = ord_p(f') <= n - 2 and α is a non-root or a simple root of p^{-r} f'
//! modulo p. The remaining functions specialize to the circle phase
//! f(t) = x3 (k1 (1 - t^2) + 2 k2 t) / (1 + t^2).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{canonical_sqrt, inv_mod_u64, jacobi_symbol, valuation};
use crate::circle::is_admissible;
use crate::error::{Error, Result};
use crate::modulus::{PrimePowerModulus, Residue};
use crate::poly::{Poly, RationalFunction};
use crate::reduce::chunked_sum;
use crate::weights::WeightSpec;

/// Largest modulus accepted by the termwise evaluators.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;
/// Largest modulus accepted by the brute-force Gauss sum.
pub const GAUSS_LIMIT: u64 = 1_000_000;

const CHUNK: u64 = 4096;

/// e_q(z) = exp(2πi z / q), with z reduced exactly before the phase is formed.
#[inline]
pub fn e_q(z: i128, q: u64) -> Complex64 {
    let z = z.rem_euclid(q as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * z / q as f64)
}

pub fn additive_character(z: &Residue) -> Complex64 {
    e_q(z.value() as i128, z.modulus().q())
}

/// Tolerance for comparing two evaluations of a sum modulo q.
pub fn tolerance(q: u64) -> f64 {
    1e-9 * (q as f64).sqrt()
}

fn require_odd(q: u64) -> Result<()> {
    if q.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("modulus {q} must be odd")));
    }
    Ok(())
}

/// G_q = Σ_{x=1}^{q} e_q(x^2), summed termwise.
pub fn gauss_sum_bruteforce(q: u64) -> Result<Complex64> {
    require_odd(q)?;
    if q > GAUSS_LIMIT {
        return Err(Error::TooLarge(format!(
            "Gauss sum modulus {q} > {GAUSS_LIMIT}"
        )));
    }
    Ok(chunked_sum(q, CHUNK, |range| {
        range
            .map(|x| e_q((x as i128 * x as i128) % q as i128, q))
            .sum()
    }))
}

/// √q for q ≡ 1 mod 4 and i√q for q ≡ 3 mod 4.
pub fn gauss_sum_closed(q: u64) -> Result<Complex64> {
    require_odd(q)?;
    let root = (q as f64).sqrt();
    Ok(if q % 4 == 1 {
        Complex64::new(root, 0.0)
    } else {
        Complex64::new(0.0, root)
    })
}

/// Σ_{x ≡ α mod p, 1 <= x <= p^n} e_{p^n}(f(x)).
pub fn s_alpha_bruteforce(
    f: &RationalFunction,
    alpha: i128,
    m: &PrimePowerModulus,
) -> Result<Complex64> {
    let (p, q) = (m.p(), m.q());
    if q > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "modulus {q} > {BRUTE_FORCE_LIMIT}"
        )));
    }
    if f.denominator().eval_mod(alpha, p) == 0 {
        return Err(Error::DenominatorNotUnit { p });
    }
    let base = alpha.rem_euclid(p as i128);
    // F2(x) ≡ F2(α) mod p along the class, so every term is defined.
    Ok(chunked_sum(q / p, CHUNK, |range| {
        range
            .map(|j| {
                let x = base + j as i128 * p as i128;
                e_q(f.eval_mod_raw(x, p, q).unwrap() as i128, q)
            })
            .sum()
    }))
}

/// Which branch of the closed form applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum CochraneCase {
    /// p^{-r} f'(α) is a unit: the sum is exactly zero.
    Vanishing,
    /// α is a simple root; `alpha_star` is its lift modulo p^{lift_exponent}.
    SimpleRoot {
        alpha_star: u64,
        lift_exponent: u32,
        /// (A(α)/p) when n - r is odd.
        legendre_a: Option<i8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CochraneValue {
    pub case: CochraneCase,
    /// ord_p(f')
    pub r: u32,
    pub value: Complex64,
}

/// Lift a simple root of `g` modulo p to a root modulo p^k.
fn hensel_lift_root(g: &Poly, root: u64, p: u64, k: u32) -> u64 {
    let dg = g.derivative();
    let mut x = root as i128;
    let mut modulus = p;
    for _ in 1..k {
        modulus *= p;
        let val = g.eval_mod(x, modulus) as i128;
        let slope = dg.eval_mod(x, modulus) as i128;
        let inv = inv_mod_u64(slope, modulus).expect("simple root has unit slope");
        x = (x - val * inv as i128).rem_euclid(modulus as i128);
    }
    x as u64
}

/// Closed-form S_α(f; p^n) for non-roots and simple roots of p^{-r} f' mod p.
pub fn s_alpha_cochrane(
    f: &RationalFunction,
    alpha: i128,
    m: &PrimePowerModulus,
) -> Result<CochraneValue> {
    let (p, n, q) = (m.p(), m.n(), m.q());
    let violated = |msg: String| Err(Error::HypothesisViolated(msg));
    if n < 2 {
        return violated(format!("n = {n} < 2"));
    }
    if f.denominator().eval_mod(alpha, p) == 0 {
        return violated(format!("denominator vanishes at α = {alpha} mod {p}"));
    }
    let fp = f.derivative();
    let r = match fp.ord_p(p) {
        None => return violated("f' is identically zero".into()),
        Some(r) if r < 0 || r > n as i64 - 2 => {
            return violated(format!("r = ord_p(f') = {r} exceeds n - 2 = {}", n - 2))
        }
        Some(r) => r as u32,
    };
    let pr = (p as i128).pow(r);
    // p^{-r} f' = g / F2^2 with F2 a unit at α, so roots of g decide everything.
    let g = fp
        .numerator()
        .div_exact(pr)
        .expect("p^r divides the numerator content");
    let alpha_p = alpha.rem_euclid(p as i128);
    if g.eval_mod(alpha_p, p) != 0 {
        return Ok(CochraneValue {
            case: CochraneCase::Vanishing,
            r,
            value: Complex64::new(0.0, 0.0),
        });
    }
    if g.derivative().eval_mod(alpha_p, p) == 0 {
        return violated(format!("α = {alpha} is a multiple root of p^-r f' mod {p}"));
    }
    let lift_exponent = (n - r).div_ceil(2);
    let alpha_star = hensel_lift_root(&g, alpha_p as u64, p, lift_exponent);
    let phase = e_q(f.eval_mod_raw(alpha_star as i128, p, q)? as i128, q);
    let magnitude = (p as f64).powf((n + r) as f64 / 2.0);
    let mut value = phase * magnitude;
    let mut legendre_a = None;
    if (n - r) % 2 == 1 {
        let second = fp
            .derivative()
            .div_numerator_exact(pr)
            .ok_or_else(|| Error::HypothesisViolated("p^r does not divide f''".into()))?;
        let a = 2 * second.eval_mod_raw(alpha_star as i128, p, p)? as i128;
        let symbol = jacobi_symbol(a, p);
        if symbol == 0 {
            return violated("A(α) is divisible by p".into());
        }
        legendre_a = Some(symbol);
        value *= symbol as f64 * gauss_sum_closed(p)? / (p as f64).sqrt();
    }
    Ok(CochraneValue {
        case: CochraneCase::SimpleRoot {
            alpha_star,
            lift_exponent,
            legendre_a,
        },
        r,
        value,
    })
}

/// f(t) = x3 (k1 (1 - t^2) + 2 k2 t) / (1 + t^2)
pub fn circle_phase(k1: i64, k2: i64, x3: i64) -> RationalFunction {
    let (k1, k2, x3) = (k1 as i128, k2 as i128, x3 as i128);
    RationalFunction::new(
        Poly::new(vec![x3 * k1, 2 * x3 * k2, -x3 * k1]),
        Poly::new(vec![1, 0, 1]),
    )
    .expect("1 + t^2 is nonzero")
}

/// Frequencies (k1, k2) = p^r (l1, l2) with p^r = gcd(k1, k2, p^n), and x3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSumSpec {
    pub k1: i64,
    pub k2: i64,
    pub x3: i64,
    pub modulus: PrimePowerModulus,
    pub r: u32,
    pub l1: i64,
    pub l2: i64,
    /// l1^2 + l2^2
    pub d: i128,
}

impl ExpSumSpec {
    pub fn new(k1: i64, k2: i64, x3: i64, modulus: PrimePowerModulus) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(Error::DegenerateFrequency);
        }
        let p = modulus.p();
        if !modulus.is_unit(x3 as i128) {
            return Err(Error::UnitRequired { a: x3 as i128, p });
        }
        let v = |k: i64| valuation(k as i128, p).unwrap_or(u32::MAX);
        let r = v(k1).min(v(k2)).min(modulus.n());
        let pr = (p as i64).pow(r);
        let (l1, l2) = (k1 / pr, k2 / pr);
        Ok(Self {
            k1,
            k2,
            x3,
            modulus,
            r,
            l1,
            l2,
            d: l1 as i128 * l1 as i128 + l2 as i128 * l2 as i128,
        })
    }

    /// p^{n - r}, the level at which α* and √D live.
    pub fn reduced_modulus(&self) -> Result<PrimePowerModulus> {
        if self.r >= self.modulus.n() {
            return Err(Error::HypothesisViolated(format!(
                "r = {} leaves no levels below n = {}",
                self.r,
                self.modulus.n()
            )));
        }
        self.modulus.with_exponent(self.modulus.n() - self.r)
    }

    pub fn phase(&self) -> RationalFunction {
        circle_phase(self.k1, self.k2, self.x3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply(self, v: i128) -> i128 {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyRoots {
    pub roots: Vec<u64>,
    /// The single root is a double root (forces p | D).
    pub double_root: bool,
}

/// Roots α mod p of 2 l1 α ≡ l2 (1 - α^2).
pub fn key_congruence_roots(l1: i64, l2: i64, p: u64) -> Result<KeyRoots> {
    let pi = p as i128;
    for l in [l1, l2] {
        if (l as i128).rem_euclid(pi) == 0 {
            return Err(Error::UnitRequired { a: l as i128, p });
        }
    }
    let (l1, l2) = (l1 as i128, l2 as i128);
    let roots: Vec<u64> = (0..p)
        .filter(|&a| {
            let a = a as i128;
            (l2 * (1 - a * a) - 2 * l1 * a).rem_euclid(pi) == 0
        })
        .collect();
    let d = l1 * l1 + l2 * l2;
    let double_root = roots.len() == 1 && d.rem_euclid(pi) == 0;
    Ok(KeyRoots { roots, double_root })
}

/// α* = (-l1 ± √D) / l2 modulo `m`, √D the canonical root.
pub fn alpha_star(l1: i64, l2: i64, m: &PrimePowerModulus, sign: Sign) -> Result<Residue> {
    let p = m.p();
    let (l1, l2) = (l1 as i128, l2 as i128);
    if !m.is_unit(l1 * l2) {
        return Err(Error::UnitRequired { a: l1 * l2, p });
    }
    let d = l1 * l1 + l2 * l2;
    if !m.is_unit(d) {
        return Err(Error::NotResidue(d, p));
    }
    let root = canonical_sqrt(d, m)?.value() as i128;
    let inv = inv_mod_u64(l2, m.q()).expect("l2 is a unit") as i128;
    Ok(m.residue((sign.apply(root) - l1).rem_euclid(m.q() as i128) * inv))
}

/// Both sides of e_{p^n}(f(α*)) = e_{p^{n-r}}(±x3 √D).
pub fn phase_identity_check(spec: &ExpSumSpec, sign: Sign) -> Result<(Complex64, Complex64)> {
    let m = spec.modulus;
    let reduced = spec.reduced_modulus()?;
    let a = alpha_star(spec.l1, spec.l2, &reduced, sign)?;
    let lhs_value = spec.phase().eval_mod_raw(a.value() as i128, m.p(), m.q())?;
    let lhs = e_q(lhs_value as i128, m.q());
    let root = canonical_sqrt(spec.d, &reduced)?.value() as i128;
    let rhs = e_q(sign.apply(spec.x3 as i128 * root), reduced.q());
    Ok((lhs, rhs))
}

/// (A(α)/p) with A(α) = 2 p^{-r} f''(α*), computed from the second derivative.
pub fn a_alpha_symbol(spec: &ExpSumSpec, sign: Sign) -> Result<i8> {
    let p = spec.modulus.p();
    let reduced = spec.reduced_modulus()?;
    let a = alpha_star(spec.l1, spec.l2, &reduced, sign)?;
    let pr = (p as i128).pow(spec.r);
    let second = spec
        .phase()
        .derivative()
        .derivative()
        .div_numerator_exact(pr)
        .ok_or_else(|| Error::HypothesisViolated("p^r does not divide f''".into()))?;
    let v = second.eval_mod_raw(a.value() as i128, p, p)? as i128;
    Ok(jacobi_symbol(2 * v, p))
}

/// The same symbol from the closed form A(α) = -2 x3 l2^4 / (σ (l1 - σ)^2),
/// σ = ±√D the branch's signed root, so (A(α)/p) = (-2 x3 σ / p).
///
/// This equals (2 x3 √D / p) only for the minus branch or p ≡ 1 mod 4.
pub fn a_alpha_symbol_closed(spec: &ExpSumSpec, sign: Sign) -> Result<i8> {
    let p = spec.modulus.p();
    let reduced = spec.reduced_modulus()?;
    let root = canonical_sqrt(spec.d, &reduced)?.value() as i128;
    Ok(jacobi_symbol(-2 * spec.x3 as i128 * sign.apply(root), p))
}

fn unit_sqrt_d(levels: u32, x3: i64, d: i128, p: u64) -> Result<(PrimePowerModulus, i128)> {
    let m = PrimePowerModulus::new(p, levels)?;
    if !m.is_unit(x3 as i128 * d) {
        return Err(Error::UnitRequired {
            a: x3 as i128 * d,
            p,
        });
    }
    let root = canonical_sqrt(d, &m)?.value() as i128;
    Ok((m, root))
}

/// C_{n-r}(x3, D): 1 for an even number of levels, (2 x3 √D / p) G_p / √p for odd.
pub fn c_factor(levels: u32, x3: i64, d: i128, p: u64) -> Result<Complex64> {
    let (_, root) = unit_sqrt_d(levels, x3, d, p)?;
    if levels.is_multiple_of(2) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let symbol = jacobi_symbol(2 * x3 as i128 * root, p) as f64;
    Ok(symbol * gauss_sum_closed(p)? / (p as f64).sqrt())
}

/// (G_{p^L} / p^{L/2}) (2 x3 √D / p^L), valid for either parity of L.
pub fn c_factor_unified(levels: u32, x3: i64, d: i128, p: u64) -> Result<Complex64> {
    let (m, root) = unit_sqrt_d(levels, x3, d, p)?;
    let symbol = jacobi_symbol(2 * x3 as i128 * root, m.q()) as f64;
    Ok(symbol * gauss_sum_closed(m.q())? / (m.q() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsumMode {
    Bruteforce,
    Closed,
}

/// The residues α in [1, p] with α^2 ≢ 0, ±1 mod p.
pub fn admissible_alphas(p: u64) -> impl Iterator<Item = u64> {
    (1..=p).filter(move |&a| is_admissible(a, p))
}

/// E(k1, k2, x3; p^n) = Σ over admissible t of e_{p^n}(f(t)).
pub fn e_sum(spec: &ExpSumSpec, mode: EsumMode) -> Result<Complex64> {
    let m = spec.modulus;
    let f = spec.phase();
    let (p, q) = (m.p(), m.q());
    match mode {
        EsumMode::Bruteforce => {
            if q > BRUTE_FORCE_LIMIT {
                return Err(Error::TooLarge(format!(
                    "modulus {q} > {BRUTE_FORCE_LIMIT}"
                )));
            }
            Ok(chunked_sum(q, CHUNK, |range| {
                range
                    .filter(|&t| is_admissible(t, p))
                    .map(|t| e_q(f.eval_mod_raw(t as i128, p, q).unwrap() as i128, q))
                    .sum()
            }))
        }
        EsumMode::Closed => admissible_alphas(p)
            .map(|a| s_alpha_cochrane(&f, a as i128, &m).map(|v| v.value))
            .sum(),
    }
}

/// F_{n-r}(D) = (2√D / p^L) Σ_{l1^2 + l2^2 = D, p ∤ l1 l2} Φ̂(l1 N / p^L) Φ̂(l2 N / p^L).
///
/// Zero when D is not a unit quadratic residue modulo p.
pub fn f_weight(d: u64, levels: u32, n_scale: f64, w: &WeightSpec, p: u64) -> Result<f64> {
    let m = PrimePowerModulus::new(p, levels)?;
    let d_i = d as i128;
    if !m.is_unit(d_i) || jacobi_symbol(d_i, p) != 1 {
        return Ok(0.0);
    }
    let root = canonical_sqrt(d_i, &m)?.value() as i128;
    let symbol = jacobi_symbol(2 * root, m.q()) as f64;
    let scale = n_scale / m.q() as f64;
    let mut acc = 0.0;
    for (l1, l2) in lattice_points(d) {
        if m.is_unit(l1 as i128 * l2 as i128) {
            acc += w.fourier(l1 as f64 * scale) * w.fourier(l2 as f64 * scale);
        }
    }
    Ok(symbol * acc)
}

/// All (l1, l2) in Z^2 with l1^2 + l2^2 = d.
pub fn lattice_points(d: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let top = d.isqrt() as i64;
    for l1 in -top..=top {
        let rest = d - (l1 * l1) as u64;
        let l2 = rest.isqrt();
        if l2 * l2 == rest {
            out.push((l1, l2 as i64));
            if l2 != 0 {
                out.push((l1, -(l2 as i64)));
            }
        }
    }
    out
}

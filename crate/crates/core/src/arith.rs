//! Exact arithmetic modulo odd prime powers.

use crate::error::{Error, Result};
use crate::modulus::{PrimePowerModulus, Residue};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// p-adic valuation of a nonzero integer; `None` stands for +infinity.
pub fn valuation(a: i128, p: u64) -> Option<u32> {
    if a == 0 {
        return None;
    }
    let p = p as i128;
    let mut a = a;
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    Some(v)
}

/// Inverse of `a` modulo an arbitrary `m > 1` by extended Euclid.
pub fn inv_mod_u64(a: i128, m: u64) -> Option<u64> {
    let m_i = m as i128;
    let (mut old_r, mut r) = (a.rem_euclid(m_i), m_i);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m_i) as u64)
}

/// Multiplicative inverse of `a` modulo q = p^n.
pub fn inv_mod(a: i128, m: &PrimePowerModulus) -> Result<Residue> {
    if !m.is_unit(a) {
        return Err(Error::NotInvertible { a, q: m.q() });
    }
    let r = inv_mod_u64(a, m.q()).ok_or(Error::NotInvertible { a, q: m.q() })?;
    Ok(m.residue(r as i128))
}

/// Jacobi symbol (a/m) for odd m >= 1. Returns 0 when gcd(a, m) > 1.
pub fn jacobi_symbol(a: i128, m: u64) -> i8 {
    assert!(m % 2 == 1, "Jacobi symbol needs an odd modulus, got {m}");
    let mut a = a.rem_euclid(m as i128) as u64;
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Tonelli-Shanks square root of a quadratic residue `a` modulo an odd prime.
fn tonelli_shanks(a: u64, p: u64) -> u64 {
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut s = 0;
    let mut odd = p - 1;
    while odd.is_multiple_of(2) {
        odd /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| jacobi_symbol(z as i128, p) == -1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod(z, odd, p);
    let mut t = pow_mod(a, odd, p);
    let mut root = pow_mod(a, odd.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        root = mul_mod(root, b, p);
    }
    root
}

/// Both square roots of the unit `a` modulo p^n, smaller representative first.
///
/// Returns `Ok(None)` when `a` is a non-residue modulo p.
pub fn sqrt_mod(a: i128, m: &PrimePowerModulus) -> Result<Option<(Residue, Residue)>> {
    let p = m.p();
    if !m.is_unit(a) {
        return Err(Error::UnitRequired { a, p });
    }
    if jacobi_symbol(a, p) != 1 {
        return Ok(None);
    }
    let mut x = tonelli_shanks(a.rem_euclid(p as i128) as u64, p);
    // Newton step x <- x - (x^2 - a) / (2x) doubles the precision each round.
    let mut level = 1u32;
    while level < m.n() {
        level = (2 * level).min(m.n());
        let modulus = p.pow(level);
        let x_i = x as i128;
        let a_mod = a.rem_euclid(modulus as i128);
        let f = (x_i * x_i - a_mod).rem_euclid(modulus as i128);
        let inv = inv_mod_u64(2 * x_i, modulus).expect("2x is a unit");
        x = (x_i - f * inv as i128).rem_euclid(modulus as i128) as u64;
    }
    let other = (m.q() - x) % m.q();
    let (lo, hi) = if x <= other { (x, other) } else { (other, x) };
    Ok(Some((m.residue(lo as i128), m.residue(hi as i128))))
}

/// The square root of `a` modulo p^n with the smaller representative.
pub fn canonical_sqrt(a: i128, m: &PrimePowerModulus) -> Result<Residue> {
    sqrt_mod(a, m)?
        .map(|(lo, _)| lo)
        .ok_or(Error::NotResidue(a, m.p()))
}

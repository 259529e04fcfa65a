//! Odd prime-power moduli and residues modulo them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus. Products of two residues stay below 2^62.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m.is_multiple_of(2) {
        return m == 2;
    }
    let mut d = 3u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The modulus q = p^n for an odd prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ModulusParts")]
pub struct PrimePowerModulus {
    p: u64,
    n: u32,
    q: u64,
}

#[derive(Deserialize)]
struct ModulusParts {
    p: u64,
    n: u32,
}

impl TryFrom<ModulusParts> for PrimePowerModulus {
    type Error = Error;

    fn try_from(parts: ModulusParts) -> Result<Self> {
        Self::new(parts.p, parts.n)
    }
}

impl PrimePowerModulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroExponent);
        }
        let mut q = 1u64;
        for _ in 0..n {
            q = q
                .checked_mul(p)
                .filter(|&v| v <= MAX_MODULUS)
                .ok_or(Error::ModulusTooLarge { p, n })?;
        }
        Ok(Self { p, n, q })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The modulus p^k sharing this prime.
    pub fn with_exponent(&self, k: u32) -> Result<Self> {
        Self::new(self.p, k)
    }

    /// Canonical representative of `a` in [0, q).
    #[inline]
    pub fn reduce(&self, a: i128) -> u64 {
        a.rem_euclid(self.q as i128) as u64
    }

    #[inline]
    pub fn is_unit(&self, a: i128) -> bool {
        a.rem_euclid(self.p as i128) != 0
    }

    pub fn residue(&self, a: i128) -> Residue {
        Residue {
            value: self.reduce(a),
            modulus: *self,
        }
    }
}

/// An element of Z/qZ tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn new(a: i128, modulus: PrimePowerModulus) -> Self {
        modulus.residue(a)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.modulus.p)
    }

    fn check(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.q, other.modulus.q));
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(self
            .modulus
            .residue(self.value as i128 + other.value as i128))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(self
            .modulus
            .residue(self.value as i128 - other.value as i128))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(self
            .modulus
            .residue(self.value as i128 * other.value as i128))
    }

    pub fn neg(&self) -> Residue {
        self.modulus.residue(-(self.value as i128))
    }
}

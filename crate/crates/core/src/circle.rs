//! Unit-coordinate points on y1^2 + y2^2 = 1 modulo p^n, their rational
//! parametrization by t, and Hensel lifting of ternary solutions.

use rayon::prelude::*;

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::modulus::{PrimePowerModulus, Residue};

/// Largest modulus for the exhaustive double-loop enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Number of residues mod p excluded as parameters: 0, +-1, and the roots of t^2 = -1.
pub fn s_of_p(p: u64) -> u64 {
    assert!(p > 2 && p % 2 == 1, "s(p) needs an odd prime, got {p}");
    if p % 4 == 1 {
        5
    } else {
        3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleParamPoint {
    pub t: Residue,
    pub y1: Residue,
    pub y2: Residue,
}

impl CircleParamPoint {
    pub fn modulus(&self) -> PrimePowerModulus {
        self.t.modulus()
    }

    pub fn pair(&self) -> (u64, u64) {
        (self.y1.value(), self.y2.value())
    }
}

/// gcd(t (1 - t^2)(1 + t^2), p) = 1
pub fn is_admissible(t: u64, p: u64) -> bool {
    let t = t % p;
    let t2 = t * t % p;
    t != 0 && t2 != 1 && !(t2 + 1).is_multiple_of(p)
}

pub fn param_point(t: &Residue, m: &PrimePowerModulus) -> Result<CircleParamPoint> {
    let t = m.residue(t.value() as i128);
    let tv = t.value() as i128;
    if !is_admissible(t.value(), m.p()) {
        return Err(Error::InadmissibleParameter {
            t: t.value(),
            p: m.p(),
        });
    }
    let t2 = tv * tv;
    let inv = inv_mod(1 + t2, m)?.value() as i128;
    Ok(CircleParamPoint {
        t,
        y1: m.residue((1 - t2).rem_euclid(m.q() as i128) * inv),
        y2: m.residue(2 * tv * inv),
    })
}

/// t = y2 / (1 + y1), the inverse of the parametrization.
pub fn inverse_param(y1: u64, y2: u64, m: &PrimePowerModulus) -> Result<Residue> {
    let q = m.q() as i128;
    let (a, b) = (m.reduce(y1 as i128) as i128, m.reduce(y2 as i128) as i128);
    let on_circle = (a * a + b * b - 1).rem_euclid(q) == 0;
    if !on_circle || !m.is_unit(a) || !m.is_unit(b) {
        return Err(Error::InvalidPoint { y1, y2 });
    }
    let inv = inv_mod(1 + a, m).map_err(|_| Error::InvalidPoint { y1, y2 })?;
    Ok(m.residue(b * inv.value() as i128))
}

/// All admissible t in [0, q), ascending.
pub fn enumerate_admissible_t(m: &PrimePowerModulus) -> Vec<Residue> {
    let p = m.p();
    (0..m.q())
        .filter(|&t| is_admissible(t, p))
        .map(|t| m.residue(t as i128))
        .collect()
}

/// All unit pairs (y1, y2) with y1^2 + y2^2 = 1 mod q, by direct search.
///
/// For each unit y1 the residue 1 - y1^2 is scanned against a square table,
/// so the cost is O(q) table work plus the output size.
pub fn enumerate_circle_solutions(m: &PrimePowerModulus) -> Result<Vec<(u64, u64)>> {
    let q = m.q();
    if q > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(format!(
            "exhaustive circle enumeration needs q <= {EXHAUSTIVE_LIMIT}, got {q}"
        )));
    }
    let p = m.p();
    // roots[c] lists every unit y2 with y2^2 = c.
    let mut roots: Vec<Vec<u64>> = vec![Vec::new(); q as usize];
    for y in (1..q).filter(|y| y % p != 0) {
        roots[(y * y % q) as usize].push(y);
    }
    let out = (1..q)
        .into_par_iter()
        .filter(|y1| y1 % p != 0)
        .flat_map_iter(|y1| {
            let c = (1 + q - y1 * y1 % q) % q;
            roots[c as usize].iter().map(move |&y2| (y1, y2))
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolutionTriple {
    pub x1: i64,
    pub x2: i64,
    pub x3: i64,
    pub modulus: PrimePowerModulus,
}

impl SolutionTriple {
    pub fn new(x1: i64, x2: i64, x3: i64, modulus: PrimePowerModulus) -> Result<Self> {
        let s = Self {
            x1,
            x2,
            x3,
            modulus,
        };
        s.validate()?;
        Ok(s)
    }

    fn form(&self) -> i128 {
        let (a, b, c) = (self.x1 as i128, self.x2 as i128, self.x3 as i128);
        a * a + b * b - c * c
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.modulus;
        let units = [self.x1, self.x2, self.x3]
            .iter()
            .all(|&x| m.is_unit(x as i128));
        if !units || self.form().rem_euclid(m.q() as i128) != 0 {
            return Err(Error::InvalidSolution {
                x1: self.x1,
                x2: self.x2,
                x3: self.x3,
                q: m.q(),
            });
        }
        Ok(())
    }
}

/// Every lift x_i + k_i p^n (k_i in [0, p)) solving the congruence mod p^{n+1}.
///
/// The lifts are found by solving the linear congruence
/// (x1^2 + x2^2 - x3^2)/p^n + 2 x1 k1 + 2 x2 k2 - 2 x3 k3 = 0 mod p
/// for k3 given (k1, k2); 2 x3 is a unit so there are exactly p^2 lifts.
pub fn hensel_lift_solution(s: &SolutionTriple) -> Result<Vec<SolutionTriple>> {
    s.validate()?;
    let m = s.modulus;
    let up = m.with_exponent(m.n() + 1)?;
    let p = m.p() as i128;
    let q = m.q() as i128;
    let c = (s.form() / q).rem_euclid(p);
    let inv = inv_mod(2 * s.x3 as i128, &up.with_exponent(1)?)?.value() as i128;
    let mut out = Vec::with_capacity((p * p) as usize);
    for k1 in 0..p {
        for k2 in 0..p {
            let rhs = c + 2 * s.x1 as i128 * k1 + 2 * s.x2 as i128 * k2;
            let k3 = (rhs * inv).rem_euclid(p);
            out.push(SolutionTriple {
                x1: (s.x1 as i128 + k1 * q) as i64,
                x2: (s.x2 as i128 + k2 * q) as i64,
                x3: (s.x3 as i128 + k3 * q) as i64,
                modulus: up,
            });
        }
    }
    Ok(out)
}

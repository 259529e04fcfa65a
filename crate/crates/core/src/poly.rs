//! Integer polynomials and rational functions F1/F2 over Z.
//!
//! Representations are kept exactly as built: the quotient-rule derivative
//! does not cancel common factors, and `ord_p` is read off the stored
//! numerator and denominator.

use std::fmt;

use crate::arith::{inv_mod_u64, valuation};
use crate::error::{Error, Result};
use crate::modulus::{PrimePowerModulus, Residue};

/// Dense polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<i128>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: i128) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as i128)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0)
                        - other.coeffs.get(i).copied().unwrap_or(0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: i128) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Divide every coefficient by `d`, or `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: i128) -> Option<Poly> {
        self.coeffs
            .iter()
            .map(|&a| (a % d == 0).then(|| a / d))
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }

    /// Largest k with p^k dividing every coefficient; `None` for the zero polynomial.
    pub fn ord_p(&self, p: u64) -> Option<u32> {
        self.coeffs.iter().filter_map(|&c| valuation(c, p)).min()
    }

    /// Horner evaluation modulo `m`, result in [0, m).
    pub fn eval_mod(&self, x: i128, m: u64) -> u64 {
        let m_i = m as i128;
        let x = x.rem_euclid(m_i);
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &c| (acc * x + c.rem_euclid(m_i)) % m_i) as u64
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// f = F1 / F2 with integer polynomials and F2 nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(num: Poly) -> Self {
        Self {
            num,
            den: Poly::constant(1),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// ord_p(F1) - ord_p(F2), `None` when F1 is zero (+infinity).
    pub fn ord_p(&self, p: u64) -> Option<i64> {
        let top = self.num.ord_p(p)? as i64;
        let bottom = self.den.ord_p(p).expect("denominator is nonzero") as i64;
        Some(top - bottom)
    }

    /// Quotient rule (F1'F2 - F1F2') / F2^2 with no cancellation.
    pub fn derivative(&self) -> RationalFunction {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalFunction {
            num,
            den: self.den.mul(&self.den),
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    /// Divide the numerator by the integer `d` exactly.
    pub fn div_numerator_exact(&self, d: i128) -> Option<RationalFunction> {
        Some(RationalFunction {
            num: self.num.div_exact(d)?,
            den: self.den.clone(),
        })
    }

    /// F1(x) * F2(x)^{-1} modulo `m`, which must be a power of `p`.
    pub fn eval_mod_raw(&self, x: i128, p: u64, m: u64) -> Result<u64> {
        let d = self.den.eval_mod(x, m);
        if d.is_multiple_of(p) {
            return Err(Error::DenominatorNotUnit { p });
        }
        let inv = inv_mod_u64(d as i128, m).ok_or(Error::DenominatorNotUnit { p })?;
        let n = self.num.eval_mod(x, m);
        Ok(((n as u128 * inv as u128) % m as u128) as u64)
    }

    pub fn eval_mod(&self, x: &Residue, m: &PrimePowerModulus) -> Result<Residue> {
        let v = self.eval_mod_raw(x.value() as i128, m.p(), m.q())?;
        Ok(m.residue(v as i128))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// ord_p of a rational function, free-function form.
pub fn ord_p_rational(f: &RationalFunction, p: u64) -> Option<i64> {
    f.ord_p(p)
}

/// Exact modular evaluation F1(x)/F2(x) mod q.
pub fn eval_rational_mod(
    f: &RationalFunction,
    x: &Residue,
    m: &PrimePowerModulus,
) -> Result<Residue> {
    f.eval_mod(x, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rf(num: Vec<i128>, den: Vec<i128>) -> RationalFunction {
        RationalFunction::new(Poly::new(num), Poly::new(den)).unwrap()
    }

    fn md(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    #[test]
    fn ord_p_examples() {
        assert_eq!(rf(vec![49, 0, 7], vec![1]).ord_p(7), Some(1));
        assert_eq!(rf(vec![1, 1], vec![1]).ord_p(7), Some(0));
        assert_eq!(rf(vec![0, 7], vec![49]).ord_p(7), Some(-1));
        assert_eq!(rf(vec![], vec![3]).ord_p(7), None);
        assert_eq!(
            RationalFunction::new(Poly::new(vec![1]), Poly::zero()),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn eval_examples() {
        let circle_x = rf(vec![1, 0, -1], vec![1, 0, 1]);
        let t = md(7, 1).residue(2);
        assert_eq!(
            eval_rational_mod(&circle_x, &t, &md(7, 1)).unwrap().value(),
            5
        );

        let ident = rf(vec![0, 1], vec![1]);
        assert_eq!(
            ident
                .eval_mod(&md(7, 2).residue(3), &md(7, 2))
                .unwrap()
                .value(),
            3
        );

        // 1 + 5^2 = 26 = 0 mod 13
        let recip = rf(vec![1], vec![1, 0, 1]);
        assert_eq!(
            recip.eval_mod(&md(13, 1).residue(5), &md(13, 1)),
            Err(Error::DenominatorNotUnit { p: 13 })
        );
        assert!(recip.eval_mod(&md(7, 1).residue(5), &md(7, 1)).is_ok());
    }

    #[test]
    fn derivative_examples() {
        let sq = RationalFunction::polynomial(Poly::new(vec![0, 0, 1]));
        let d = sq.derivative();
        assert_eq!(d.numerator(), &Poly::new(vec![0, 2]));
        assert_eq!(d.denominator(), &Poly::constant(1));

        let y1 = rf(vec![1, 0, -1], vec![1, 0, 1]).derivative();
        assert_eq!(y1.numerator(), &Poly::new(vec![0, -4]));
        assert_eq!(y1.denominator(), &Poly::new(vec![1, 0, 2, 0, 1]));

        // x3 (k1 (1 - t^2) + 2 k2 t) / (1 + t^2) at k1 = k2 = x3 = 1
        let f = rf(vec![1, 2, -1], vec![1, 0, 1]).derivative();
        assert_eq!(f.numerator(), &Poly::new(vec![2, -4, -2]));
        assert_eq!(f.denominator(), &Poly::new(vec![1, 0, 2, 0, 1]));
        assert_eq!(f.numerator().to_string(), "-2*t^2 - 4*t + 2");
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-9i128..10, 1..5).prop_map(Poly::new)
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_difference(
            num in small_poly(),
            den in small_poly(),
            x in -20i32..20,
        ) {
            prop_assume!(!den.is_zero());
            let f = RationalFunction::new(num, den).unwrap();
            let x = x as f64 + 0.25;
            let d = f.den.eval_f64(x);
            prop_assume!(d.abs() > 0.5);
            let h = 1e-4;
            let fd = (f.eval_f64(x + h) - f.eval_f64(x - h)) / (2.0 * h);
            let exact = f.derivative().eval_f64(x);
            prop_assert!((fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()), "{fd} vs {exact}");
        }

        #[test]
        fn ord_p_is_additive(
            a in small_poly(), b in small_poly(), c in small_poly(), d in small_poly(),
            sa in 0u32..3, sb in 0u32..3, pi in 0usize..3,
        ) {
            prop_assume!(!b.is_zero() && !d.is_zero());
            let p = [3u64, 5, 7][pi];
            let f = RationalFunction::new(a.scale((p as i128).pow(sa)), b).unwrap();
            let g = RationalFunction::new(c, d.scale((p as i128).pow(sb))).unwrap();
            let fg = f.mul(&g);
            match (f.ord_p(p), g.ord_p(p)) {
                (Some(x), Some(y)) => prop_assert_eq!(fg.ord_p(p), Some(x + y)),
                _ => prop_assert_eq!(fg.ord_p(p), None),
            }
        }
    }
}

//! Dense univariate polynomials over ℤ, with the rational and modular helpers
//! needed for exact root counting and irreducibility sieving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients in ascending degree order. The zero
/// polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From coefficients listed highest degree first.
    pub fn from_desc(coeffs_desc: Vec<BigInt>) -> Self {
        let mut c = coeffs_desc;
        c.reverse();
        Self::new(c)
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `t^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeffs_desc(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Division by a monic divisor over ℤ; returns (quotient, remainder).
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate().take(dd) {
                rem[i - dd + j] -= &c * dc;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient by a monic divisor, or `None` if it does not divide.
    pub fn exact_div_monic(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem_monic(divisor);
        r.is_zero().then_some(q)
    }

    /// Palindromic coefficients: `t^deg · φ(1/t) = φ(t)`.
    pub fn is_reciprocal(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    /// Sign of the value at a rational point, evaluated exactly.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        sign_of(&self.eval_scaled(x.numer(), x.denom()))
    }

    /// `den^deg · φ(num/den)` as an integer (den > 0 keeps the sign).
    pub fn eval_scaled(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let Some(deg) = self.degree() else { return BigInt::zero() };
        // Horner on the homogenized form Σ c_i num^i den^(deg-i)
        let mut acc = BigInt::zero();
        if den.is_one() {
            for c in self.coeffs.iter().rev() {
                acc = acc * num + c;
            }
            return acc;
        }
        let mut dp = vec![BigInt::one(); deg + 1];
        for i in 1..=deg {
            dp[i] = &dp[i - 1] * den;
        }
        for i in (0..=deg).rev() {
            acc = acc * num + &self.coeffs[i] * &dp[deg - i];
        }
        acc
    }


    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval_scaled(&BigInt::from(x), &BigInt::one())
    }

    /// `φ(-t)`
    pub fn reflect_argument(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Number of sign changes in the coefficient sequence (zeros skipped).
    pub fn sign_variations(&self) -> usize {
        let signs: Vec<i32> = self.coeffs.iter().map(sign_of).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn to_rational(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Cauchy bound `1 + max |c_i / c_n|` (rounded up to an integer).
    pub fn cauchy_bound(&self) -> BigInt {
        let lead = self.leading().expect("nonzero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
        BigInt::one() + m.div_ceil(&lead)
    }
}

pub(crate) fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// JSON form: `{"coeffs_desc": ["1", "-993", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyJson {
    pub coeffs_desc: Vec<String>,
}

impl From<&IntPolynomial> for PolyJson {
    fn from(p: &IntPolynomial) -> Self {
        PolyJson { coeffs_desc: p.coeffs_desc().iter().map(|c| c.to_string()).collect() }
    }
}

impl TryFrom<&PolyJson> for IntPolynomial {
    type Error = Error;

    fn try_from(j: &PolyJson) -> Result<Self> {
        let c = j
            .coeffs_desc
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|e| Error::Format(format!("coefficient {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPolynomial::from_desc(c))
    }
}

/// Polynomial over ℚ, ascending coefficients, used for Sturm chains and gcds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    c: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        RatPoly { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c.iter().enumerate().skip(1).map(|(i, x)| x * BigRational::from_integer(i.into())).collect(),
        )
    }

    pub fn neg(&self) -> Self {
        RatPoly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::new(vec![]), self.clone());
        }
        let lead_inv = d.c[dd].recip();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let f = std::mem::take(&mut r[i]) * &lead_inv;
            if f.is_zero() {
                continue;
            }
            for j in 0..dd {
                let t = &f * &d.c[j];
                r[i - dd + j] -= t;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.recip();
                RatPoly { c: self.c.iter().map(|x| x * &inv).collect() }
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        if acc.is_positive() {
            1
        } else if acc.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Sign of the polynomial as `x → +∞` (`pos = true`) or `x → -∞`.
    pub fn sign_at_infinity(&self, pos: bool) -> i32 {
        match self.c.last() {
            None => 0,
            Some(l) => {
                let s = if l.is_positive() { 1 } else { -1 };
                if pos || self.c.len() % 2 == 1 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// Clears denominators and content, keeping the sign of the leading term.
    pub fn to_primitive_int(&self) -> IntPolynomial {
        let l = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.c.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
        let p = IntPolynomial::new(ints);
        let g = p.content();
        if g.is_zero() || g.is_one() {
            return p;
        }
        IntPolynomial::new(p.coeffs().iter().map(|x| x / &g).collect())
    }
}

/// Polynomials over 𝔽_ℓ for a word-size prime ℓ (ascending, normalized).
pub(crate) mod modp {
    pub type Poly = Vec<u64>;

    fn trim(p: &mut Poly) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    pub fn mul_mod(a: u64, b: u64, l: u64) -> u64 {
        ((a as u128 * b as u128) % l as u128) as u64
    }

    pub fn pow_mod(mut b: u64, mut e: u64, l: u64) -> u64 {
        let mut r = 1 % l;
        b %= l;
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(r, b, l);
            }
            b = mul_mod(b, b, l);
            e >>= 1;
        }
        r
    }

    pub fn inv(a: u64, l: u64) -> u64 {
        pow_mod(a, l - 2, l)
    }

    pub fn sub(a: &Poly, b: &Poly, l: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + l - y) % l
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &Poly, b: &Poly, l: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, l)) % l;
            }
        }
        trim(&mut out);
        out
    }

    pub fn rem(a: &Poly, m: &Poly, l: u64) -> Poly {
        let dm = m.len() - 1;
        let mut r = a.clone();
        let li = inv(m[dm], l);
        while r.len() > dm {
            let top = r.len() - 1;
            let f = mul_mod(r[top], li, l);
            if f != 0 {
                for j in 0..=dm {
                    let t = mul_mod(f, m[j], l);
                    r[top - dm + j] = (r[top - dm + j] + l - t) % l;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn div_exact(a: &Poly, m: &Poly, l: u64) -> Poly {
        let dm = m.len() - 1;
        let mut r = a.clone();
        let li = inv(m[dm], l);
        let mut q = vec![0u64; a.len().saturating_sub(dm)];
        while r.len() > dm {
            let top = r.len() - 1;
            let f = mul_mod(r[top], li, l);
            q[top - dm] = f;
            for j in 0..=dm {
                let t = mul_mod(f, m[j], l);
                r[top - dm + j] = (r[top - dm + j] + l - t) % l;
            }
            r.pop();
        }
        trim(&mut q);
        q
    }

    pub fn gcd(a: &Poly, b: &Poly, l: u64) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = rem(&a, &b, l);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let li = inv(lead, l);
            for x in a.iter_mut() {
                *x = mul_mod(*x, li, l);
            }
        }
        a
    }

    pub fn derivative(a: &Poly, l: u64) -> Poly {
        let mut out: Poly = a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % l, l)).collect();
        trim(&mut out);
        out
    }

    pub fn powmod_poly(base: &Poly, mut e: u64, m: &Poly, l: u64) -> Poly {
        let mut result: Poly = vec![1];
        let mut b = rem(base, m, l);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, l), m, l);
            }
            b = rem(&mul(&b, &b, l), m, l);
            e >>= 1;
        }
        result
    }

    /// Distinct-degree factorization of a squarefree monic polynomial:
    /// returns the degrees of its irreducible factors (with repetition).
    pub fn factor_degrees(f: &Poly, l: u64) -> Vec<usize> {
        let mut f = f.clone();
        let mut degrees = Vec::new();
        let x: Poly = vec![0, 1];
        let mut h = rem(&x, &f, l);
        let mut i = 0usize;
        while f.len() > 1 {
            i += 1;
            if 2 * i > f.len() - 1 {
                degrees.push(f.len() - 1);
                break;
            }
            h = powmod_poly(&h, l, &f, l);
            let g = gcd(&f, &sub(&h, &x, l), l);
            if g.len() > 1 {
                let dg = g.len() - 1;
                degrees.extend(std::iter::repeat_n(i, dg / i));
                f = div_exact(&f, &g, l);
                h = rem(&h, &f, l);
            }
        }
        degrees
    }
}

/// Reduces an integer polynomial mod a prime ℓ.
pub(crate) fn reduce_mod(p: &IntPolynomial, l: u64) -> modp::Poly {
    let lb = BigInt::from(l);
    let mut out: modp::Poly = p.coeffs().iter().map(|c| c.mod_floor(&lb).to_u64().unwrap()).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_degree() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(IntPolynomial::from_i64(&[0, 0]).is_zero());
        assert_eq!(IntPolynomial::zero().degree(), None);
    }

    #[test]
    fn eval_scaled_rational_point() {
        // t^2 - 3t + 1 at 5/2: 25/4 - 15/2 + 1 = -1/4 → scaled by 4: -1
        let p = IntPolynomial::from_i64(&[1, -3, 1]);
        assert_eq!(p.eval_scaled(&5.into(), &2.into()), BigInt::from(-1));
        assert_eq!(p.eval_i64(3), BigInt::from(1));
    }

    #[test]
    fn monic_division() {
        let p = IntPolynomial::x_pow_minus_one(6);
        let d = IntPolynomial::from_i64(&[-1, 1]);
        let q = p.exact_div_monic(&d).unwrap();
        assert_eq!(q, IntPolynomial::from_i64(&[1, 1, 1, 1, 1, 1]));
        assert!(IntPolynomial::from_i64(&[1, 0, 1]).exact_div_monic(&d).is_none());
    }

    #[test]
    fn display_format() {
        let p = IntPolynomial::from_i64(&[1, -993, 0, 1]);
        assert_eq!(p.to_string(), "t^3 - 993t + 1");
    }

    #[test]
    fn json_round_trip() {
        let p = IntPolynomial::from_i64(&[1, -993, -1152, 1]);
        let j = PolyJson::from(&p);
        assert_eq!(j.coeffs_desc, vec!["1", "-1152", "-993", "1"]);
        assert_eq!(IntPolynomial::try_from(&j).unwrap(), p);
    }

    #[test]
    fn modp_factor_degrees() {
        // t^2 + t + 1 is irreducible mod 2
        assert_eq!(modp::factor_degrees(&vec![1, 1, 1], 2), vec![2]);
        // (t-1)(t-2)(t^2+1) mod 3 → degrees 1,1,2
        let f = modp::mul(&modp::mul(&vec![2, 1], &vec![1, 1], 3), &vec![1, 0, 1], 3);
        let mut d = modp::factor_degrees(&f, 3);
        d.sort();
        assert_eq!(d, vec![1, 1, 2]);
    }
}

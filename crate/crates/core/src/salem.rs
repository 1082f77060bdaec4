//! Exact certification of Salem polynomials.
//!
//! Root locations are decided on the trace polynomial `Q` with
//! `φ(t) = t^d·Q(t + 1/t)`: roots of `φ` on the unit circle (other than ±1)
//! become roots of `Q` in `(−2, 2)`, and a real pair `λ, 1/λ` with `λ > 1`
//! becomes one root of `Q` in `(2, ∞)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{modp, reduce_mod, IntPolynomial, PolyJson};

pub const DEFAULT_PRIME_BUDGET: usize = 25;
pub const DEFAULT_ROOT_TOL: f64 = 1e-15;

const SQUAREFREE_PROBE_PRIMES: usize = 64;

pub fn is_reciprocal(phi: &IntPolynomial) -> bool {
    !phi.is_zero() && phi.is_reciprocal()
}

/// `Q` of degree `d` with `φ(t) = t^d·Q(t + 1/t)` for reciprocal `φ` of
/// degree `2d`.
pub fn trace_polynomial(phi: &IntPolynomial) -> Result<IntPolynomial> {
    let deg = phi.degree().ok_or(Error::NotReciprocal)?;
    if deg % 2 == 1 || !phi.is_reciprocal() {
        return Err(Error::NotReciprocal);
    }
    let d = deg / 2;
    // T_k(s) = t^k + t^{-k}: T_0 = 2, T_1 = s, T_{k+1} = s·T_k − T_{k−1}
    let s = IntPolynomial::from_i64(&[0, 1]);
    let mut prev = IntPolynomial::from_i64(&[2]);
    let mut cur = s.clone();
    let mut q = IntPolynomial::new(vec![phi.coeff(d)]);
    for k in 1..=d {
        q = q.add(&cur.scale(&phi.coeff(d + k)));
        let next = s.mul(&cur).add(&prev.scale(&BigInt::from(-1)));
        prev = cur;
        cur = next;
    }
    Ok(q)
}

/// Inverse of [`trace_polynomial`]: `t^d·Q(t + 1/t)`.
pub fn expand_trace_polynomial(q: &IntPolynomial) -> IntPolynomial {
    let Some(d) = q.degree() else { return IntPolynomial::zero() };
    let mut out = vec![BigInt::zero(); 2 * d + 1];
    for (j, c) in q.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut binom = BigInt::one();
        for i in 0..=j {
            out[d + j - 2 * i] += c * &binom;
            binom = binom * BigInt::from(j - i) / BigInt::from(i + 1);
        }
    }
    IntPolynomial::new(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealBound {
    NegInf,
    At(BigRational),
    PosInf,
}

impl RealBound {
    pub fn int(x: i64) -> Self {
        RealBound::At(BigRational::from_integer(x.into()))
    }
}

/// Sturm chain `p₀ = q/gcd(q,q′)`, `p₁ = p₀′`, `p_{k+1} = −rem(p_{k−1}, p_k)`,
/// computed with integer pseudo-remainders and kept primitive with positive
/// rescaling.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPolynomial>,
    squarefree: bool,
}

/// `(quotient, remainder)` of `c·a` by `b` with `c = |lc(b)|^k` the
/// smallest such power making the division integral.
fn pseudo_div(a: &IntPolynomial, b: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
    let db = b.degree().expect("nonzero divisor");
    let lc = b.leading().expect("nonzero divisor").clone();
    let lc_abs = lc.abs();
    let mut r: Vec<BigInt> = a.coeffs().to_vec();
    let mut quot: Vec<BigInt> = vec![BigInt::zero(); r.len().saturating_sub(db).max(1)];
    let bc = b.coeffs();
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let c = r[top].clone();
        if c.is_zero() {
            r.pop();
            continue;
        }
        let shift = top - db;
        let g = c.gcd(&lc_abs);
        let mult = &lc_abs / &g;
        let factor = &c / &g * sign_bigint(&lc);
        if !mult.is_one() {
            for x in r.iter_mut() {
                *x *= &mult;
            }
            for x in quot.iter_mut() {
                *x *= &mult;
            }
        }
        for (i, y) in bc.iter().enumerate() {
            r[shift + i] -= &factor * y;
        }
        quot[shift] += &factor;
        r.pop();
    }
    (IntPolynomial::new(quot), IntPolynomial::new(r))
}

fn sign_bigint(x: &BigInt) -> BigInt {
    if x.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    }
}

/// `p / content(p)` with a positive content.
fn primitive(p: &IntPolynomial) -> IntPolynomial {
    let c = p.content().abs();
    if c.is_zero() || c.is_one() {
        return p.clone();
    }
    IntPolynomial::new(p.coeffs().iter().map(|x| x / &c).collect())
}

fn sturm_sequence(base: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut chain = vec![base.clone()];
    let d = base.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(primitive(&d));
    loop {
        let (_, r) = pseudo_div(&chain[chain.len() - 2], &chain[chain.len() - 1]);
        if r.is_zero() {
            return chain;
        }
        chain.push(primitive(&r.scale(&BigInt::from(-1))));
    }
}

impl SturmChain {
    pub fn new(q: &IntPolynomial) -> Self {
        let chain = sturm_sequence(q);
        let last = chain.last().expect("nonempty");
        if last.degree().unwrap_or(0) == 0 {
            return SturmChain { chain, squarefree: true };
        }
        let (quot, _) = pseudo_div(q, last);
        SturmChain { chain: sturm_sequence(&primitive(&quot)), squarefree: false }
    }

    pub fn is_squarefree(&self) -> bool {
        self.squarefree
    }

    fn variations(&self, x: &RealBound) -> usize {
        let signs: Vec<i32> = self
            .chain
            .iter()
            .map(|p| match x {
                RealBound::NegInf => {
                    let s = crate::poly::sign_of(p.leading().expect("nonzero"));
                    if p.degree().unwrap_or(0) % 2 == 0 {
                        s
                    } else {
                        -s
                    }
                }
                RealBound::PosInf => crate::poly::sign_of(p.leading().expect("nonzero")),
                RealBound::At(v) => p.sign_at(v),
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in the open interval `(a, b)`.
    pub fn count(&self, a: &RealBound, b: &RealBound) -> usize {
        let va = self.variations(a);
        let vb = self.variations(b);
        let half_open = va.saturating_sub(vb);
        let at_b = match b {
            RealBound::At(v) => usize::from(self.chain[0].sign_at(v) == 0),
            _ => 0,
        };
        half_open - at_b.min(half_open)
    }
}

/// Number of distinct real roots of `q` in the open interval `(a, b)`.
pub fn sturm_count(q: &IntPolynomial, a: &RealBound, b: &RealBound) -> usize {
    SturmChain::new(q).count(a, b)
}

fn euler_phi(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `Φ_n = ∏_{d|n} (t^d − 1)^{μ(n/d)}`.
pub fn cyclotomic(n: usize) -> IntPolynomial {
    let divisors: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut p = IntPolynomial::one();
    for &d in &divisors {
        if mobius(n / d) == 1 {
            p = p.mul(&IntPolynomial::x_pow_minus_one(d));
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            p = p.exact_div_monic(&IntPolynomial::x_pow_minus_one(d)).expect("Möbius product is exact");
        }
    }
    p
}

/// `(n, Φ_n)` for every `n` with `φ(n) ≤ max_degree`, in increasing `n`.
pub fn cyclotomic_polynomials(max_degree: usize) -> Vec<(usize, IntPolynomial)> {
    // φ(n) ≥ √(n/2), so n ≤ 2·max_degree² covers every candidate
    let limit = 2 * max_degree * max_degree + 2;
    (1..=limit).filter(|&n| euler_phi(n) <= max_degree).map(|n| (n, cyclotomic(n))).collect()
}

/// Whether no cyclotomic polynomial divides `phi`, with the list of `n`
/// tested.
pub fn cyclotomic_free(phi: &IntPolynomial) -> (bool, Vec<usize>) {
    let deg = phi.degree().unwrap_or(0);
    let mut tested = Vec::new();
    for (n, c) in cyclotomic_polynomials(deg) {
        tested.push(n);
        if phi.div_rem_monic(&c).1.is_zero() {
            return (false, tested);
        }
    }
    (true, tested)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SieveOutcome {
    ProvedIrreducible { primes: Vec<u64> },
    Inconclusive { primes: Vec<u64> },
}

/// Intersects the possible degrees of a proper factor over successive
/// primes; an empty intersection proves irreducibility over ℚ.
pub fn degree_pattern_sieve(phi: &IntPolynomial, prime_budget: usize) -> Result<SieveOutcome> {
    let deg = phi.degree().ok_or(Error::NotSquarefree)?;
    if deg == 0 {
        return Err(Error::InvalidParams("constant polynomial".into()));
    }
    let lead = phi.leading().expect("nonzero").clone();
    let mut possible: Vec<bool> = (0..=deg).map(|k| k >= 1 && k < deg).collect();
    let mut used = Vec::new();
    let mut l: u64 = 1;
    let mut tried = 0usize;
    while used.len() < prime_budget {
        // a squarefree reduction at one prime already proves φ squarefree
        if used.is_empty() && tried == SQUAREFREE_PROBE_PRIMES && !SturmChain::new(phi).is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        l = next_prime(l);
        tried += 1;
        if (&lead % BigInt::from(l)).is_zero() {
            continue;
        }
        let mut f = reduce_mod(phi, l);
        let inv = modp::inv(*f.last().expect("leading coefficient survives"), l);
        f = f.iter().map(|&c| modp::mul_mod(c, inv, l)).collect();
        let g = modp::gcd(&f, &modp::derivative(&f, l), l);
        if g.len() > 1 {
            continue;
        }
        used.push(l);
        let degrees = modp::factor_degrees(&f, l);
        let mut sums = vec![false; deg + 1];
        sums[0] = true;
        for &d in &degrees {
            for s in (d..=deg).rev() {
                if sums[s - d] {
                    sums[s] = true;
                }
            }
        }
        for k in 0..=deg {
            possible[k] &= sums[k];
        }
        if !possible.iter().any(|&b| b) {
            return Ok(SieveOutcome::ProvedIrreducible { primes: used });
        }
    }
    Ok(SieveOutcome::Inconclusive { primes: used })
}

fn next_prime(after: u64) -> u64 {
    let mut n = after + 1;
    while !crate::rs::is_prime(n) {
        n += 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SalemContext {
    /// Characteristic polynomial of a lattice isometry of a K3 surface.
    FromK3Automorphism,
    Standalone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Irreducibility {
    SieveProved,
    ContextImplied,
}

impl fmt::Display for Irreducibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Irreducibility::SieveProved => "sieve-proved",
            Irreducibility::ContextImplied => "context-implied",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    OddOrSmallDegree,
    NotMonic,
    NotReciprocal,
    TraceNotSquarefree,
    RootCounts { above_two: usize, inside: usize, expected_inside: usize },
    Cyclotomic(usize),
    IrreducibilityUnresolved,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::OddOrSmallDegree => write!(f, "degree is odd or below 2"),
            Rejection::NotMonic => write!(f, "polynomial is not monic"),
            Rejection::NotReciprocal => write!(f, "polynomial is not reciprocal"),
            Rejection::TraceNotSquarefree => write!(f, "trace polynomial has a repeated root"),
            Rejection::RootCounts { above_two, inside, expected_inside } => write!(
                f,
                "trace polynomial has {above_two} roots in (2,inf) and {inside} in (-2,2), expected 1 and {expected_inside}"
            ),
            Rejection::Cyclotomic(n) => write!(f, "divisible by the cyclotomic polynomial Phi_{n}"),
            Rejection::IrreducibilityUnresolved => write!(f, "irreducibility not established"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SalemCertificate {
    pub poly: IntPolynomial,
    pub trace_poly: IntPolynomial,
    pub lambda_lo: BigRational,
    pub lambda_hi: BigRational,
    pub entropy: f64,
    pub entropy_error: f64,
    pub irreducibility: Irreducibility,
    pub sieve_primes: Vec<u64>,
    pub cyclotomic_tested: Vec<usize>,
}

impl SalemCertificate {
    pub fn lambda(&self) -> f64 {
        ln_rational(&((&self.lambda_lo + &self.lambda_hi) / BigRational::from_integer(2.into()))).exp()
    }

    pub fn lambda_string(&self) -> String {
        format_sci(&((&self.lambda_lo + &self.lambda_hi) / BigRational::from_integer(2.into())), 10)
    }
}

/// Full check; `Ok(Err(_))` is a clean rejection.
pub fn salem_check(
    phi: &IntPolynomial,
    context: SalemContext,
    prime_budget: usize,
    root_tol: f64,
) -> Result<std::result::Result<SalemCertificate, Rejection>> {
    let Some(deg) = phi.degree() else { return Ok(Err(Rejection::OddOrSmallDegree)) };
    if deg < 2 || deg % 2 == 1 {
        return Ok(Err(Rejection::OddOrSmallDegree));
    }
    if !phi.is_monic() {
        return Ok(Err(Rejection::NotMonic));
    }
    if !phi.is_reciprocal() {
        return Ok(Err(Rejection::NotReciprocal));
    }
    let q = trace_polynomial(phi)?;
    let chain = SturmChain::new(&q);
    if !chain.is_squarefree() {
        return Ok(Err(Rejection::TraceNotSquarefree));
    }
    let above_two = chain.count(&RealBound::int(2), &RealBound::PosInf);
    let inside = chain.count(&RealBound::int(-2), &RealBound::int(2));
    let d = deg / 2;
    if above_two != 1 || inside != d - 1 {
        return Ok(Err(Rejection::RootCounts { above_two, inside, expected_inside: d - 1 }));
    }
    let (free, tested) = cyclotomic_free(phi);
    if !free {
        return Ok(Err(Rejection::Cyclotomic(*tested.last().expect("nonempty on failure"))));
    }
    let (irreducibility, sieve_primes) = match degree_pattern_sieve(phi, prime_budget)? {
        SieveOutcome::ProvedIrreducible { primes } => (Irreducibility::SieveProved, primes),
        SieveOutcome::Inconclusive { primes } => match context {
            SalemContext::FromK3Automorphism => (Irreducibility::ContextImplied, primes),
            SalemContext::Standalone => return Ok(Err(Rejection::IrreducibilityUnresolved)),
        },
    };
    // the unique root in (1, ∞) is simple, so φ changes sign there
    let lo = BigRational::one();
    let hi = BigRational::from_integer(phi.cauchy_bound());
    let (lo, hi) = bisect_sign_change(phi, lo, hi, root_tol);
    let mid = (&lo + &hi) / BigRational::from_integer(2.into());
    let entropy = ln_rational(&mid);
    let entropy_error = rat_to_f64_ratio(&(&hi - &lo), &lo) + 1e-15 * entropy.abs().max(1.0);
    Ok(Ok(SalemCertificate {
        poly: phi.clone(),
        trace_poly: q,
        lambda_lo: lo,
        lambda_hi: hi,
        entropy,
        entropy_error,
        irreducibility,
        sieve_primes,
        cyclotomic_tested: tested,
    }))
}

/// Bisection on `(lo, hi)` with `φ(lo)·φ(hi) < 0` until `hi − lo ≤ tol·lo`.
fn bisect_sign_change(phi: &IntPolynomial, mut lo: BigRational, mut hi: BigRational, tol: f64) -> (BigRational, BigRational) {
    let s_lo = phi.sign_at(&lo);
    debug_assert!(s_lo * phi.sign_at(&hi) < 0);
    let two = BigRational::from_integer(2.into());
    let tol = tol.max(1e-300);
    loop {
        if rat_to_f64_ratio(&(&hi - &lo), &lo) <= tol {
            return (lo, hi);
        }
        // geometric midpoint estimate while the bracket spans orders of magnitude
        let mid = if hi > (&lo * BigRational::from_integer(1024.into())) {
            let bits = (hi.to_integer().bits() + lo.to_integer().bits().max(1)) / 2;
            BigRational::from_integer(BigInt::one() << bits)
        } else {
            (&lo + &hi) / &two
        };
        let mid = if mid <= lo || mid >= hi { (&lo + &hi) / &two } else { mid };
        let s = phi.sign_at(&mid);
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Enclosure of the largest real root, which must exceed 1, with relative
/// width at most `tol`; returns `(lo, hi, approx, entropy)`.
pub fn leading_root(phi: &IntPolynomial, tol: f64) -> Result<(BigRational, BigRational, f64, f64)> {
    if phi.degree().unwrap_or(0) == 0 {
        return Err(Error::NoRootAboveOne);
    }
    let chain = SturmChain::new(phi);
    let one = RealBound::int(1);
    if chain.count(&one, &RealBound::PosInf) == 0 {
        return Err(Error::NoRootAboveOne);
    }
    let p = &chain.chain[0];
    let mut lo = BigRational::one();
    let mut hi = BigRational::from_integer(p.cauchy_bound());
    let two = BigRational::from_integer(2.into());
    // shrink until only the largest root lies above lo
    while chain.count(&RealBound::At(lo.clone()), &RealBound::PosInf) > 1 || p.sign_at(&lo) * p.sign_at(&hi) >= 0 {
        let mid = (&lo + &hi) / &two;
        let above = chain.count(&RealBound::At(mid.clone()), &RealBound::PosInf);
        if above == 0 && p.sign_at(&mid) == 0 {
            let x = ln_rational(&mid);
            return Ok((mid.clone(), mid, x.exp(), x));
        }
        if above > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (lo, hi) = bisect_sign_change(p, lo, hi, tol);
    let x = ln_rational(&((&lo + &hi) / &two));
    Ok((lo, hi, x.exp(), x))
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().expect("60-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "log of a non-positive number");
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// `a / b` as a float, robust to huge numerators and denominators.
fn rat_to_f64_ratio(a: &BigRational, b: &BigRational) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let r = a / b;
    (ln_rational(&r.abs())).exp() * if r.is_negative() { -1.0 } else { 1.0 }
}

/// Scientific notation with `digits` significant digits (truncated).
pub fn format_sci(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let x = x.abs();
    let mut e = (ln_rational(&x) / std::f64::consts::LN_10).floor() as i64;
    let ten = BigInt::from(10);
    let scaled = |e: i64| -> BigInt {
        let k = digits as i64 - 1 - e;
        let v = if k >= 0 {
            &x * BigRational::from_integer(ten.pow(k as u32))
        } else {
            &x / BigRational::from_integer(ten.pow((-k) as u32))
        };
        v.to_integer()
    };
    let mut m = scaled(e);
    let low = ten.pow(digits as u32 - 1);
    let high = ten.pow(digits as u32);
    while m >= high {
        e += 1;
        m = scaled(e);
    }
    while m < low {
        e -= 1;
        m = scaled(e);
    }
    let s = m.to_string();
    let mantissa = if digits > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
    format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, e)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub coeffs_desc: Vec<String>,
    pub lambda_lo: String,
    pub lambda_hi: String,
    pub lambda: String,
    pub entropy: String,
    pub entropy_error: String,
    pub irreducibility: Irreducibility,
    pub sieve_primes: Vec<String>,
    pub cyclotomic_tested: Vec<String>,
}

impl From<&SalemCertificate> for CertificateJson {
    fn from(c: &SalemCertificate) -> Self {
        CertificateJson {
            coeffs_desc: PolyJson::from(&c.poly).coeffs_desc,
            lambda_lo: c.lambda_lo.to_string(),
            lambda_hi: c.lambda_hi.to_string(),
            lambda: c.lambda_string(),
            entropy: format!("{:.12}", c.entropy),
            entropy_error: format!("{:e}", c.entropy_error),
            irreducibility: c.irreducibility,
            sieve_primes: c.sieve_primes.iter().map(u64::to_string).collect(),
            cyclotomic_tested: c.cyclotomic_tested.iter().map(usize::to_string).collect(),
        }
    }
}

impl CertificateJson {
    pub fn polynomial(&self) -> Result<IntPolynomial> {
        IntPolynomial::try_from(&PolyJson { coeffs_desc: self.coeffs_desc.clone() })
    }

    pub fn bounds(&self) -> Result<(BigRational, BigRational)> {
        let parse = |s: &str| s.parse::<BigRational>().map_err(|_| Error::Format(format!("not a rational: {s}")));
        Ok((parse(&self.lambda_lo)?, parse(&self.lambda_hi)?))
    }
}

/// Sign of `phi` at the bounds of a stored enclosure differ (or one is an
/// exact root).
pub fn enclosure_is_valid(phi: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> bool {
    lo <= hi && lo > &BigRational::one() && phi.sign_at(lo) * phi.sign_at(hi) <= 0
}

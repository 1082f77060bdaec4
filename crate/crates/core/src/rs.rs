//! Rudakov–Shafarevich lattices `Λ⁻_{p,σ}` and random vectors of norm 2.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chamber::AmpleList;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector};
use crate::linalg::{determinant, inverse_rational, IntMatrix};

pub const RANK: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsParams {
    pub p: i64,
    pub sigma: u32,
    pub q: i64,
    pub gamma: i64,
}

impl RsParams {
    pub fn new(p: i64, sigma: u32) -> Result<Self> {
        check_p_sigma(p, sigma)?;
        let (q, gamma) = find_q_gamma(p)?;
        Ok(RsParams { p, sigma, q, gamma })
    }

    pub fn with_q_gamma(p: i64, sigma: u32, q: i64, gamma: i64) -> Result<Self> {
        check_p_sigma(p, sigma)?;
        let params = RsParams { p, sigma, q, gamma };
        params.validate()?;
        Ok(params)
    }

    /// `p′`: 1 when the hyperbolic summand is `U`, `p` when it is `U^{(p)}`.
    pub fn p_prime(&self) -> i64 {
        if self.sigma.is_multiple_of(2) {
            self.p
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q, g) = (self.p, self.q, self.gamma);
        if !is_prime(q as u64) || q % 8 != 3 {
            return Err(Error::InvalidParams(format!("q = {q} is not a prime congruent to 3 mod 8")));
        }
        if legendre(-q, p) != -1 {
            return Err(Error::InvalidParams(format!("(-{q}|{p}) != -1")));
        }
        if !(0..q).contains(&g) || (g * g + p) % q != 0 {
            return Err(Error::InvalidParams(format!("gamma = {g} does not satisfy gamma^2 + p = 0 mod q")));
        }
        Ok(())
    }
}

fn check_p_sigma(p: i64, sigma: u32) -> Result<()> {
    if p < 3 || !is_prime(p as u64) {
        return Err(Error::InvalidParams(format!("p = {p} is not an odd prime")));
    }
    if !(1..=10).contains(&sigma) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} outside 1..=10")));
    }
    Ok(())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(base: i64, mut e: u64, m: i64) -> i64 {
    let m128 = m as i128;
    let mut b = (base as i128).rem_euclid(m128);
    let mut acc: i128 = 1 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as i64
}

/// Legendre symbol `(a|p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: i64) -> i64 {
    match pow_mod(a, ((p - 1) / 2) as u64, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Smallest prime `q ≡ 3 mod 8` with `(−q|p) = −1`, and smallest `γ ∈ [0,q)`
/// with `γ² + p ≡ 0 mod q`.
pub fn find_q_gamma(p: i64) -> Result<(i64, i64)> {
    if p < 3 || !is_prime(p as u64) {
        return Err(Error::InvalidParams(format!("p = {p} is not an odd prime")));
    }
    let mut q = 3;
    while q < 1_000_000 {
        if q != p && is_prime(q as u64) && legendre(-q, p) == -1 {
            if let Some(g) = (0..q).find(|g| (g * g + p) % q == 0) {
                return Ok((q, g));
            }
        }
        q += 8;
    }
    Err(Error::Exhausted(format!("no auxiliary prime found for p = {p}")))
}

/// Gram of `H^{(−p)}`, even negative definite of rank 4 and determinant `p²`.
pub fn gram_h(params: &RsParams) -> Result<IntMatrix> {
    params.validate()?;
    let (p, q, g) = (params.p, params.q, params.gamma);
    let h = IntMatrix::from_rows(&[
        [-2, -1, 0, 0],
        [-1, -(q + 1) / 2, 0, -g],
        [0, 0, -p * (q + 1) / 2, -p],
        [0, -g, -p, -2 * (p + g * g) / q],
    ]);
    let neg = -&h;
    for s in 1..=4 {
        let minor = IntMatrix::from_big_rows((0..s).map(|i| neg.row(i)[..s].to_vec()).collect())?;
        if !determinant(&minor)?.is_positive() {
            return Err(Error::InvalidLattice("H block is not negative definite".into()));
        }
    }
    if determinant(&h)? != BigInt::from(p) * p {
        return Err(Error::InvalidLattice("H block has the wrong discriminant".into()));
    }
    Ok(h)
}

const E8_EDGES: [(usize, usize); 7] = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (0, 3)];

/// Negative definite `E₈` Gram scaled by `|scale|`: chain `e₂–…–e₈` with
/// `e₁` attached to `e₄`.
pub fn gram_e8(scale: i64) -> Result<IntMatrix> {
    if scale >= 0 {
        return Err(Error::InvalidParams(format!("E8 scale must be negative, got {scale}")));
    }
    let s = -scale;
    let mut m = IntMatrix::zeros(8, 8);
    for i in 0..8 {
        m.set(i, i, BigInt::from(-2 * s));
    }
    for &(i, j) in &E8_EDGES {
        m.set(i, j, BigInt::from(s));
        m.set(j, i, BigInt::from(s));
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    UPair,
    HBlock,
    E8Block,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisTag {
    pub kind: BlockKind,
    pub block: usize,
    pub index: usize,
    pub scale: i64,
}

/// `Λ⁻_{p,σ}` in the basis `u₁, u₂, η₁…η₄, e₁…e₈, e′₁…e′₈`.
#[derive(Clone, Debug)]
pub struct RsLattice {
    pub lattice: Lattice,
    pub tags: Vec<BasisTag>,
    pub params: RsParams,
}

impl RsLattice {
    /// `h₀ = u₁ + u₂`.
    pub fn h0(&self) -> LatticeVector {
        let mut v = LatticeVector::zero(RANK);
        v.0[0] = 1;
        v.0[1] = 1;
        v
    }

    pub fn p(&self) -> i64 {
        self.params.p
    }

    pub fn sigma(&self) -> u32 {
        self.params.sigma
    }

    /// Offset of the first vector of the `k`-th `E₈` summand (0 or 1).
    pub fn e8_offset(k: usize) -> usize {
        6 + 8 * k
    }

    /// Vector `a·u₁ + b·u₂ + n` with `n` in the negative definite part.
    pub fn compose(a: i64, b: i64, n: &[i64]) -> LatticeVector {
        let mut v = Vec::with_capacity(RANK);
        v.push(a);
        v.push(b);
        v.extend_from_slice(n);
        LatticeVector(v)
    }
}

/// `(U is scaled, E₈ summands, three copies of H)` by σ; E₈ codes are
/// 1 for `E₈^{(−1)}`, −1 for `E₈^{(−p)}`, 0 for absent.
fn layout(sigma: u32) -> (bool, [i64; 2], bool) {
    match sigma {
        1 => (false, [1, 1], false),
        2 => (true, [1, 1], false),
        3 => (false, [0, 1], true),
        4 => (true, [0, 1], true),
        5 => (false, [1, -1], false),
        6 => (true, [1, -1], false),
        7 => (false, [0, -1], true),
        8 => (true, [0, -1], true),
        9 => (false, [-1, -1], false),
        10 => (true, [-1, -1], false),
        _ => unreachable!("sigma validated"),
    }
}

pub fn build_lambda(p: i64, sigma: u32) -> Result<RsLattice> {
    build_lambda_with(RsParams::new(p, sigma)?)
}

pub fn build_lambda_with(params: RsParams) -> Result<RsLattice> {
    let (p, sigma) = (params.p, params.sigma);
    check_p_sigma(p, sigma)?;
    let (scaled_u, e8s, triple_h) = layout(sigma);
    let pp = if scaled_u { p } else { 1 };
    let h = gram_h(&params)?;
    let mut blocks = vec![IntMatrix::from_rows(&[[0, pp], [pp, 0]])];
    let mut tags = vec![
        BasisTag { kind: BlockKind::UPair, block: 0, index: 0, scale: pp },
        BasisTag { kind: BlockKind::UPair, block: 0, index: 1, scale: pp },
    ];
    let h_count = if triple_h { 3 } else { 1 };
    for b in 0..h_count {
        blocks.push(h.clone());
        tags.extend((0..4).map(|i| BasisTag { kind: BlockKind::HBlock, block: b, index: i, scale: -p }));
    }
    let mut e8_block = 0;
    for code in e8s {
        let scale = match code {
            0 => continue,
            1 => -1,
            _ => -p,
        };
        blocks.push(gram_e8(scale)?);
        tags.extend((0..8).map(|i| BasisTag { kind: BlockKind::E8Block, block: e8_block, index: i, scale }));
        e8_block += 1;
    }
    let gram = IntMatrix::block_diag(&blocks);
    debug_assert_eq!(gram.rows(), RANK);
    let mut anchor = LatticeVector::zero(RANK);
    anchor.0[0] = 1;
    anchor.0[1] = 1;
    let lattice = Lattice::hyperbolic(gram, anchor)?;
    let expected = BigInt::from(p).pow(2 * sigma);
    if lattice.abs_det() != expected {
        return Err(Error::InvalidLattice(format!("|det| is not p^{}", 2 * sigma)));
    }
    Ok(RsLattice { lattice, tags, params })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub initial_bound: i64,
    pub widen_every: usize,
    pub max_attempts: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { initial_bound: 2, widen_every: 64, max_attempts: 1 << 20 }
    }
}

/// `v = a·u₁ + b·u₂ + n` with `n` random in the negative definite part and
/// `ab = (2 − ⟨n,n⟩)/(2p′)`, so that `⟨v,v⟩ = 2`. For `U′ = U^(p)` the
/// normal form `b = 1` is used; for `U′ = U`, `b` is a random positive
/// divisor, since `b = 1` would put `u₁` into `ℱ(v)`.
pub fn random_square2<R: Rng>(rs: &RsLattice, rng: &mut R, config: &SampleConfig) -> Result<LatticeVector> {
    let pp = rs.params.p_prime() as i128;
    let mut bound = config.initial_bound.max(1);
    let mut v = LatticeVector::zero(RANK);
    v.0[1] = 1;
    for attempt in 0..config.max_attempts {
        if attempt > 0 && config.widen_every > 0 && attempt % config.widen_every == 0 {
            bound = bound.saturating_mul(2);
        }
        for x in v.0[2..].iter_mut() {
            *x = rng.gen_range(-bound..=bound);
        }
        v.0[0] = 0;
        v.0[1] = 0;
        let nn = rs.lattice.norm(&v) as i128;
        let num = 2 - nn;
        if num % (2 * pp) != 0 {
            continue;
        }
        let Some(m) = (num / (2 * pp)).to_i64() else { continue };
        let b = if pp == 1 && m != 0 {
            let divs = divisors(m.unsigned_abs());
            divs[rng.gen_range(0..divs.len())] as i64
        } else {
            1
        };
        v.0[0] = m / b;
        v.0[1] = b;
        debug_assert_eq!(rs.lattice.norm(&v), 2);
        return Ok(v);
    }
    Err(Error::Exhausted(format!("no norm-2 vector in {} draws", config.max_attempts)))
}

fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `[h₀, p·e₁^∨, …, p·e₂₂^∨]`.
pub fn standard_ample_list(rs: &RsLattice, h0: LatticeVector) -> Result<AmpleList> {
    let rhos = scaled_dual_basis(&rs.lattice, rs.params.p)?;
    AmpleList::new(&rs.lattice, h0, rhos)
}

/// Rows `p·G⁻¹`, i.e. the vectors `p·e_i^∨` in the basis `e_j`.
pub fn scaled_dual_basis(lattice: &Lattice, p: i64) -> Result<Vec<LatticeVector>> {
    let inv = inverse_rational(lattice.gram())?;
    let scale = BigInt::from(p);
    inv.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let coords = row
                .into_iter()
                .map(|x| {
                    let y = x * num_rational::BigRational::from_integer(scale.clone());
                    if !y.is_integer() {
                        return Err(Error::NonIntegral(format!("p·e_{}^∨", i + 1)));
                    }
                    y.to_integer().to_i64().ok_or_else(|| Error::NonIntegral("dual entry overflow".into()))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok(LatticeVector(coords))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub p: String,
    pub sigma: String,
    pub q: String,
    pub gamma: String,
    pub gram: Vec<Vec<String>>,
    pub tags: Vec<BasisTag>,
}

impl From<&RsLattice> for LatticeJson {
    fn from(rs: &RsLattice) -> Self {
        LatticeJson {
            p: rs.params.p.to_string(),
            sigma: rs.params.sigma.to_string(),
            q: rs.params.q.to_string(),
            gamma: rs.params.gamma.to_string(),
            gram: rs.lattice.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            tags: rs.tags.clone(),
        }
    }
}

impl TryFrom<&LatticeJson> for RsLattice {
    type Error = Error;

    fn try_from(j: &LatticeJson) -> Result<Self> {
        let parse = |s: &str| s.parse::<i64>().map_err(|_| Error::Format(format!("not an integer: {s}")));
        let params = RsParams::with_q_gamma(parse(&j.p)?, parse(&j.sigma)? as u32, parse(&j.q)?, parse(&j.gamma)?)?;
        let rs = build_lambda_with(params)?;
        let gram: Vec<Vec<BigInt>> = j
            .gram
            .iter()
            .map(|r| r.iter().map(|s| s.parse::<BigInt>().map_err(|_| Error::Format(format!("not an integer: {s}")))).collect())
            .collect::<Result<_>>()?;
        if gram != rs.lattice.gram().to_rows() {
            return Err(Error::Format("Gram matrix does not match the parameters".into()));
        }
        Ok(rs)
    }
}

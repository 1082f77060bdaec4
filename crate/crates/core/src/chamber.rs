//! Ample lists, the lexicographic positivity order they induce, the
//! fundamental chamber `D(𝒂)` and reflection into it.

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{set_r, set_s, set_s_is_empty};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector};

pub const DEFAULT_TIE_RETRIES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexSign {
    Positive,
    Zero,
    Negative,
}

/// `[h₀, ρ₁, …, ρ_K]`. Extending the list with further vectors keeps the
/// positive root system of `ℛ(h₀)`, so the cache is shared by extensions.
#[derive(Clone)]
pub struct AmpleList {
    h0: LatticeVector,
    rhos: Vec<LatticeVector>,
    rows: Vec<Vec<i64>>,
    positive: Arc<OnceLock<Vec<LatticeVector>>>,
}

impl std::fmt::Debug for AmpleList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmpleList").field("h0", &self.h0).field("rhos", &self.rhos.len()).finish()
    }
}

impl AmpleList {
    pub fn new(lattice: &Lattice, h0: LatticeVector, rhos: Vec<LatticeVector>) -> Result<Self> {
        lattice.check_dim(&h0)?;
        for r in &rhos {
            lattice.check_dim(r)?;
        }
        if lattice.norm(&h0) <= 0 {
            return Err(Error::NotPositive);
        }
        let rows = std::iter::once(&h0).chain(&rhos).map(|v| lattice.pairing_row(v)).collect();
        Ok(AmpleList { h0, rhos, rows, positive: Arc::new(OnceLock::new()) })
    }

    pub fn h0(&self) -> &LatticeVector {
        &self.h0
    }

    pub fn rhos(&self) -> &[LatticeVector] {
        &self.rhos
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(⟨h₀,x⟩, ⟨ρ₁,x⟩, …)`.
    pub fn pairings(&self, x: &LatticeVector) -> Vec<i128> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(&x.0).map(|(a, b)| *a as i128 * *b as i128).sum())
            .collect()
    }

    pub fn lex_sign(&self, x: &LatticeVector) -> LexSign {
        for row in &self.rows {
            let s: i128 = row.iter().zip(&x.0).map(|(a, b)| *a as i128 * *b as i128).sum();
            match s.cmp(&0) {
                Ordering::Greater => return LexSign::Positive,
                Ordering::Less => return LexSign::Negative,
                Ordering::Equal => {}
            }
        }
        LexSign::Zero
    }

    fn extended(&self, lattice: &Lattice, rho: LatticeVector) -> Self {
        let mut out = self.clone();
        out.rows.push(lattice.pairing_row(&rho));
        out.rhos.push(rho);
        out
    }

    /// `ℛ⁺(𝒂)`, computed on first use.
    pub fn positive_roots(&self, lattice: &Lattice) -> Result<&[LatticeVector]> {
        if let Some(v) = self.positive.get() {
            return Ok(v);
        }
        let mut pos = Vec::new();
        for r in set_r(lattice, &self.h0)? {
            match self.lex_sign(&r) {
                LexSign::Positive => pos.push(r),
                LexSign::Negative => {}
                LexSign::Zero => return Err(Error::InvalidParams("list is not ample".into())),
            }
        }
        let _ = self.positive.set(pos);
        Ok(self.positive.get().expect("initialized above"))
    }
}

pub fn lex_sign(a: &AmpleList, x: &LatticeVector) -> LexSign {
    a.lex_sign(x)
}

pub fn is_ample_list(lattice: &Lattice, a: &AmpleList) -> Result<bool> {
    if lattice.norm(a.h0()) <= 0 {
        return Ok(false);
    }
    Ok(set_r(lattice, a.h0())?.iter().all(|r| a.lex_sign(r) != LexSign::Zero))
}

pub fn positive_roots_at<'a>(lattice: &Lattice, a: &'a AmpleList) -> Result<&'a [LatticeVector]> {
    a.positive_roots(lattice)
}

/// Membership in `D(𝒂)`: no root separates `v` from `h₀`, and `v` pairs
/// nonnegatively with `ℛ⁺(𝒂)`.
pub fn chamber_contains(lattice: &Lattice, a: &AmpleList, v: &LatticeVector) -> Result<bool> {
    lattice.check_dim(v)?;
    if lattice.norm(v) <= 0 || lattice.inner(v, a.h0()) <= 0 {
        return Err(Error::NotPositive);
    }
    if !set_s_is_empty(lattice, a.h0(), v)? {
        return Ok(false);
    }
    Ok(a.positive_roots(lattice)?.iter().all(|r| lattice.inner(v, r) >= 0))
}

/// Ordered (−2)-vectors; applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionWord(pub Vec<LatticeVector>);

impl ReflectionWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, lattice: &Lattice, v: &LatticeVector) -> Result<LatticeVector> {
        let mut x = v.clone();
        for r in &self.0 {
            x = lattice.reflect(r, &x)?;
        }
        Ok(x)
    }
}

#[derive(Clone, Debug)]
pub struct ChamberImage {
    pub h: LatticeVector,
    pub word: ReflectionWord,
    pub list: AmpleList,
}

/// Reflect `v` into `D(𝒂)`.
///
/// The walls met along the segment from `v` towards the chamber are the
/// roots of `𝒮(h₀,v)` and those of `ℛ⁺(𝒂)` pairing negatively with `v`.
/// Each root `r` is met at a parameter inversely proportional to
/// `𝒕 = (−1/⟨v,r⟩)·(⟨h₀,r⟩, ⟨ρ₁,r⟩, …)`, so the reflections are applied in
/// decreasing lexicographic order of `𝒕`. Equal tuples are separated by
/// appending random vectors to the list.
pub fn send_to_chamber<R: Rng>(
    lattice: &Lattice,
    a: &AmpleList,
    v: &LatticeVector,
    rng: &mut R,
    max_retries: usize,
) -> Result<ChamberImage> {
    lattice.check_dim(v)?;
    if lattice.norm(v) <= 0 || lattice.inner(v, a.h0()) <= 0 {
        return Err(Error::NotPositive);
    }
    let mut roots = set_s(lattice, a.h0(), v)?;
    roots.extend(a.positive_roots(lattice)?.iter().filter(|r| lattice.inner(v, r) < 0).cloned());
    let mut list = a.clone();
    let mut attempt = 0;
    loop {
        let mut keyed: Vec<(Vec<i128>, i128, LatticeVector)> =
            roots.iter().map(|r| (list.pairings(r), -(lattice.inner(v, r) as i128), r.clone())).collect();
        keyed.sort_by(|x, y| cmp_scaled(&y.0, y.1, &x.0, x.1));
        let tie = keyed.windows(2).any(|w| cmp_scaled(&w[0].0, w[0].1, &w[1].0, w[1].1) == Ordering::Equal);
        if !tie {
            let word = ReflectionWord(keyed.into_iter().map(|k| k.2).collect());
            let h = word.apply(lattice, v)?;
            return Ok(ChamberImage { h, word, list });
        }
        if attempt == max_retries {
            return Err(Error::Exhausted(format!("tie-breaking vectors after {max_retries} attempts")));
        }
        attempt += 1;
        list = list.extended(lattice, random_tiebreaker(lattice.rank(), rng));
    }
}

/// Compare `x/s` with `y/t` lexicographically (`s, t > 0`).
fn cmp_scaled(x: &[i128], s: i128, y: &[i128], t: i128) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match (a * t).cmp(&(b * s)) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn random_tiebreaker<R: Rng>(rank: usize, rng: &mut R) -> LatticeVector {
    loop {
        let v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().any(|&x| x != 0) {
            return LatticeVector(v);
        }
    }
}

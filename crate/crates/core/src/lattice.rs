//! Even lattices given by a Gram matrix in a fixed basis, with reflections in
//! (−2)-vectors and isometry checks.
//!
//! Vectors are integer coordinate rows. Isometries act from the right:
//! `x ↦ x·M`, and `M` is an isometry iff `M·G·Mᵀ = G`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{char_poly, determinant, IntMatrix};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    /// `self + k·other`
    pub fn add_scaled(&self, k: i64, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn from_big(v: &[BigInt]) -> Result<Self> {
        v.iter()
            .map(|x| x.to_i64().ok_or_else(|| Error::Format(format!("coordinate {x} exceeds 64 bits"))))
            .collect::<Result<Vec<_>>>()
            .map(LatticeVector)
    }

    /// `self · m` for a square matrix acting from the right.
    pub fn apply(&self, m: &IntMatrix) -> Result<Self> {
        Self::from_big(&m.left_mul_vec(&self.to_big())?)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct Lattice {
    gram: IntMatrix,
    gram_i64: Vec<i64>,
    rank: usize,
    cone_anchor: Option<LatticeVector>,
}

impl Lattice {
    /// A nondegenerate even lattice. The Gram matrix must be symmetric with
    /// even diagonal and nonzero determinant; entries must fit in 64 bits.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: gram.rows(), cols: gram.cols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidLattice("Gram matrix is not symmetric".into()));
        }
        let rank = gram.rows();
        if (0..rank).any(|i| gram.get(i, i).bit(0)) {
            return Err(Error::InvalidLattice("odd diagonal entry (lattice is not even)".into()));
        }
        if determinant(&gram)?.is_zero() {
            return Err(Error::InvalidLattice("degenerate form".into()));
        }
        let gram_i64 = gram
            .to_i64_rows()
            .ok_or_else(|| Error::InvalidLattice("Gram entries exceed 64 bits".into()))?
            .concat();
        Ok(Lattice { gram, gram_i64, rank, cone_anchor: None })
    }

    /// A hyperbolic lattice (signature (1, rank−1), verified exactly) with
    /// the positive cone selected by `anchor`.
    pub fn hyperbolic(gram: IntMatrix, anchor: LatticeVector) -> Result<Self> {
        let mut l = Self::new(gram)?;
        let (pos, neg) = l.signature()?;
        if pos != 1 || neg != l.rank - 1 {
            return Err(Error::InvalidLattice(format!("signature ({pos}, {neg}) is not hyperbolic")));
        }
        l.set_anchor(anchor)?;
        Ok(l)
    }

    pub fn set_anchor(&mut self, anchor: LatticeVector) -> Result<()> {
        self.check_dim(&anchor)?;
        if self.norm(&anchor) <= 0 {
            return Err(Error::NotPositive);
        }
        self.cone_anchor = Some(anchor);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> i64 {
        self.gram_i64[i * self.rank + j]
    }

    pub fn cone_anchor(&self) -> Option<&LatticeVector> {
        self.cone_anchor.as_ref()
    }

    /// Signature `(positive, negative)` by Descartes' rule applied to the
    /// characteristic polynomial of the Gram matrix. The polynomial is
    /// real-rooted, so sign variations count roots exactly.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let cp = char_poly(&self.gram)?;
        let pos = cp.sign_variations();
        let neg = cp.reflect_argument().sign_variations();
        Ok((pos, neg))
    }

    pub fn check_dim(&self, x: &LatticeVector) -> Result<()> {
        if x.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: x.len() });
        }
        Ok(())
    }

    /// The linear functional `x ↦ ⟨x, v⟩` as a coefficient row `G·vᵀ`.
    pub fn pairing_row(&self, v: &LatticeVector) -> Vec<i64> {
        (0..self.rank)
            .map(|i| {
                let row = &self.gram_i64[i * self.rank..(i + 1) * self.rank];
                let s: i128 = row.iter().zip(&v.0).map(|(&g, &y)| g as i128 * y as i128).sum();
                narrow(s)
            })
            .collect()
    }

    /// `⟨x, y⟩`; panics on dimension mismatch (see [`Lattice::checked_inner`]).
    pub fn inner(&self, x: &LatticeVector, y: &LatticeVector) -> i64 {
        assert_eq!(x.len(), self.rank, "dimension mismatch");
        assert_eq!(y.len(), self.rank, "dimension mismatch");
        let n = self.rank;
        let mut s: i128 = 0;
        for i in 0..n {
            let xi = x.0[i];
            if xi == 0 {
                continue;
            }
            let row = &self.gram_i64[i * n..(i + 1) * n];
            let t: i128 = row.iter().zip(&y.0).map(|(&g, &b)| g as i128 * b as i128).sum();
            s += xi as i128 * t;
        }
        narrow(s)
    }

    pub fn checked_inner(&self, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.inner(x, y))
    }

    pub fn norm(&self, x: &LatticeVector) -> i64 {
        self.inner(x, x)
    }

    /// Reflection `s_r(x) = x + ⟨x, r⟩·r` in a (−2)-vector.
    pub fn reflect(&self, r: &LatticeVector, x: &LatticeVector) -> Result<LatticeVector> {
        self.check_dim(r)?;
        self.check_dim(x)?;
        let rr = self.norm(r);
        if rr != -2 {
            return Err(Error::NotRoot(rr));
        }
        Ok(x.add_scaled(self.inner(x, r), r))
    }

    /// Matrix of the reflection in `r`, acting on rows from the right.
    pub fn reflection_matrix(&self, r: &LatticeVector) -> Result<IntMatrix> {
        let rows: Result<Vec<Vec<i64>>> =
            (0..self.rank).map(|i| self.reflect(r, &LatticeVector::unit(self.rank, i)).map(|v| v.0)).collect();
        Ok(IntMatrix::from_rows(&rows?))
    }

    pub fn is_isometry(&self, m: &IntMatrix) -> bool {
        if m.rows() != self.rank || m.cols() != self.rank {
            return false;
        }
        &(m * &self.gram) * &m.transpose() == self.gram
    }

    /// `⟨v,v⟩ > 0` and `⟨v, anchor⟩ > 0`.
    pub fn in_positive_cone(&self, v: &LatticeVector) -> Result<bool> {
        let anchor = self.cone_anchor.as_ref().ok_or(Error::NoConeAnchor)?;
        self.check_dim(v)?;
        Ok(self.norm(v) > 0 && self.inner(v, anchor) > 0)
    }

    /// Even check over the basis.
    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.gram_entry(i, i) % 2 == 0)
    }

    pub fn abs_det(&self) -> BigInt {
        determinant(&self.gram).expect("square gram").abs()
    }
}

fn narrow(s: i128) -> i64 {
    i64::try_from(s).expect("lattice inner product exceeds 64 bits")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u_plus_root() -> Lattice {
        Lattice::new(IntMatrix::from_rows(&[[0, 1, 0], [1, 0, 0], [0, 0, -2]])).unwrap()
    }

    #[test]
    fn inner_on_hyperbolic_plane() {
        let u = Lattice::new(IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!(u.inner(&vec![1, 0].into(), &vec![0, 1].into()), 1);
        assert_eq!(u.inner(&vec![3, -4].into(), &LatticeVector::zero(2)), 0);
        assert!(matches!(
            u.checked_inner(&vec![1, 0, 0].into(), &vec![0, 1].into()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reflection_cases() {
        let l = u_plus_root();
        let r: LatticeVector = vec![0, 0, 1].into();
        assert_eq!(l.reflect(&r, &r).unwrap(), r.neg());
        let x: LatticeVector = vec![1, 1, 0].into();
        assert_eq!(l.reflect(&r, &x).unwrap(), x);
        assert_eq!(l.reflect(&r, &vec![1, 1, 1].into()).unwrap(), vec![1, 1, -1].into());
        assert!(matches!(l.reflect(&vec![1, 1, 0].into(), &x), Err(Error::NotRoot(2))));
    }

    #[test]
    fn isometry_checks() {
        let u = Lattice::new(IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert!(u.is_isometry(&IntMatrix::identity(2)));
        assert!(!u.is_isometry(&IntMatrix::from_rows(&[[2, 0], [0, 2]])));
        assert!(u.is_isometry(&IntMatrix::from_rows(&[[0, 1], [1, 0]])));
        let l = u_plus_root();
        assert!(l.is_isometry(&l.reflection_matrix(&vec![0, 0, 1].into()).unwrap()));
    }

    #[test]
    fn positive_cone() {
        let mut u = Lattice::new(IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert!(matches!(u.in_positive_cone(&vec![1, 1].into()), Err(Error::NoConeAnchor)));
        u.set_anchor(vec![1, 1].into()).unwrap();
        assert!(u.in_positive_cone(&vec![1, 1].into()).unwrap());
        assert!(!u.in_positive_cone(&vec![-1, -1].into()).unwrap());
        assert!(!u.in_positive_cone(&vec![1, 0].into()).unwrap());
    }

    #[test]
    fn construction_rejects_bad_grams() {
        assert!(Lattice::new(IntMatrix::from_rows(&[[1, 0], [0, 2]])).is_err());
        assert!(Lattice::new(IntMatrix::from_rows(&[[2, 1], [0, 2]])).is_err());
        assert!(Lattice::new(IntMatrix::from_rows(&[[2, 2], [2, 2]])).is_err());
        let g = IntMatrix::from_rows(&[[2, 0], [0, 2]]);
        assert!(Lattice::hyperbolic(g, vec![1, 0].into()).is_err());
    }

    #[test]
    fn signature_of_small_lattices() {
        let l = u_plus_root();
        assert_eq!(l.signature().unwrap(), (1, 2));
        let l = Lattice::new(IntMatrix::from_rows(&[[-2, 1], [1, -2]])).unwrap();
        assert_eq!(l.signature().unwrap(), (0, 2));
    }
}

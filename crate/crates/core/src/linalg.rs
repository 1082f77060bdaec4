//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; no floating point is
//! involved. Matrices are dense and row-major.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParams("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small-integer rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged matrix rows");
            data.extend(row.as_ref().iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Format("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Block-diagonal sum of square blocks.
    pub fn block_diag(blocks: &[IntMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            assert!(b.is_square());
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.data[(off + i) * n + off + j] = b.get(i, j).clone();
                }
            }
            off += b.rows;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows as `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut data = vec![BigInt::zero(); n * m];
        for i in 0..n {
            let out = &mut data[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(l)) {
                    if !b.is_zero() {
                        *o += a * b;
                    }
                }
            }
        }
        Ok(IntMatrix { rows: n, cols: m, data })
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.row(i)) {
                *o += a * b;
            }
        }
        Ok(out)
    }

    pub fn max_abs_bits(&self) -> u64 {
        self.data.iter().map(|x| x.bits()).max().unwrap_or(0)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;

    fn neg(self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatVector(pub Vec<BigRational>);

impl RatVector {
    pub fn from_ints(v: &[i64]) -> Self {
        RatVector(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigInt>> = m.to_rows();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                let (q, r) = num.div_rem(&prev);
                if !r.is_zero() {
                    return Err(Error::InexactDivision("Bareiss step".into()));
                }
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// Characteristic polynomial `det(tI - m)` by Faddeev–LeVerrier.
///
/// Each coefficient is `-tr(A M_k) / k`; the division is exact over the
/// integers and is checked.
pub fn char_poly(m: &IntMatrix) -> Result<IntPolynomial> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        for i in 0..n {
            let idx = i * n + i;
            mk.data[idx] += &coeffs[n - k + 1];
        }
        let amk = m * &mk;
        let tr = amk.trace();
        let (q, r) = tr.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(Error::InexactDivision(format!("Faddeev-LeVerrier step {k}")));
        }
        coeffs[n - k] = -q;
        mk = amk;
    }
    Ok(IntPolynomial::new(coeffs))
}

#[derive(Clone, Debug)]
pub struct LllOutput {
    pub gram: IntMatrix,
    /// Rows are the reduced basis vectors in terms of the input basis.
    pub transform: IntMatrix,
}

/// Integral LLL (Cohen, Alg. 2.6.7) on a positive definite Gram matrix with
/// δ = 3/4. Returns the reduced Gram and the unimodular transform `T` with
/// `reduced = T · gram · Tᵀ`.
pub fn lll_reduce(gram: &IntMatrix) -> Result<LllOutput> {
    if !gram.is_square() {
        return Err(Error::NotSquare { rows: gram.rows, cols: gram.cols });
    }
    if !gram.is_symmetric() {
        return Err(Error::InvalidParams("Gram matrix is not symmetric".into()));
    }
    let n = gram.rows;
    let mut g = gram.to_rows();
    let mut h = IntMatrix::identity(n).to_rows();
    // d[i+1] is the i-th Gram–Schmidt denominator; d[0] = 1.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = g[0][0].clone();
    if !d[1].is_positive() {
        return Err(Error::Indefinite);
    }
    if n == 1 {
        return Ok(LllOutput { gram: gram.clone(), transform: IntMatrix::identity(1) });
    }

    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = g[k][j].clone();
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::Indefinite);
                    }
                    d[k + 1] = u;
                }
            }
        }
        loop {
            reduce(k, k - 1, &mut g, &mut h, &mut lam, &d);
            let lhs = BigInt::from(4) * &d[k + 1] * &d[k - 1];
            let rhs = BigInt::from(3) * &d[k] * &d[k] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                swap(k, kmax, &mut g, &mut h, &mut lam, &mut d);
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k.saturating_sub(1)).rev() {
                    reduce(k, l, &mut g, &mut h, &mut lam, &d);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(LllOutput {
        gram: IntMatrix::from_big_rows(g)?,
        transform: IntMatrix::from_big_rows(h)?,
    })
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    // nearest integer to num/den, den > 0
    let two = BigInt::from(2);
    (num * &two + den).div_floor(&(den * &two))
}

fn reduce(
    k: usize,
    l: usize,
    g: &mut [Vec<BigInt>],
    h: &mut [Vec<BigInt>],
    lam: &mut [Vec<BigInt>],
    d: &[BigInt],
) {
    let dl = &d[l + 1];
    if (&lam[k][l] * BigInt::from(2)).abs() <= *dl {
        return;
    }
    let q = round_div(&lam[k][l], dl);
    let n = g.len();
    let row_l = g[l].clone();
    for j in 0..n {
        g[k][j] -= &q * &row_l[j];
    }
    let gkl = g[k][l].clone();
    g[k][k] -= &q * &gkl;
    for j in 0..n {
        if j != k {
            g[j][k] = g[k][j].clone();
        }
    }
    let hl = h[l].clone();
    for (x, y) in h[k].iter_mut().zip(&hl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * dl;
    for i in 0..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

fn swap(
    k: usize,
    kmax: usize,
    g: &mut [Vec<BigInt>],
    h: &mut [Vec<BigInt>],
    lam: &mut [Vec<BigInt>],
    d: &mut [BigInt],
) {
    g.swap(k, k - 1);
    for row in g.iter_mut() {
        row.swap(k, k - 1);
    }
    h.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = b;
}

/// Solves `m · x = rhs` exactly over the rationals.
pub fn solve_exact(m: &IntMatrix, rhs: &RatVector) -> Result<RatVector> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch { expected: m.rows, got: rhs.len() });
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.push(rhs.0[i].clone());
            row
        })
        .collect();
    gauss_jordan(&mut a, n, 1)?;
    Ok(RatVector(a.into_iter().map(|mut row| row.pop().unwrap()).collect()))
}

/// Inverse of a square integer matrix over the rationals.
pub fn inverse_rational(m: &IntMatrix) -> Result<Vec<Vec<BigRational>>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    gauss_jordan(&mut a, n, n)?;
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn gauss_jordan(a: &mut [Vec<BigRational>], n: usize, extra: usize) -> Result<()> {
    let width = n + extra;
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..width {
            a[col][j] = &a[col][j] * &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..width {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    Ok(())
}

/// Indices of a maximal linearly independent subset of `rows` (greedy, in
/// order), together with, for each dropped row, its coefficients in terms of
/// the kept rows.
pub fn independent_rows(rows: &[Vec<BigRational>]) -> (Vec<usize>, Vec<(usize, Vec<BigRational>)>) {
    let mut kept: Vec<usize> = Vec::new();
    // echelon rows with their expression as combinations of kept rows
    let mut echelon: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    let mut dropped = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        let mut combo = vec![BigRational::zero(); kept.len()];
        for (pivot, erow, ecombo) in &echelon {
            if r[*pivot].is_zero() {
                continue;
            }
            let f = r[*pivot].clone() / &erow[*pivot];
            for (x, y) in r.iter_mut().zip(erow) {
                *x -= &f * y;
            }
            for (x, y) in combo.iter_mut().zip(ecombo) {
                *x += &f * y;
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                let mut ecombo = combo.iter().map(|x| -x).collect::<Vec<_>>();
                ecombo.push(BigRational::one());
                for (_, _, c) in echelon.iter_mut() {
                    c.push(BigRational::zero());
                }
                kept.push(idx);
                echelon.push((pivot, r, ecombo));
            }
            None => dropped.push((idx, combo)),
        }
    }
    (kept, dropped)
}

/// Column-style Hermite reduction of a full-row-rank integer matrix `a`
/// (m×n, m ≤ n): returns `(h, u)` with `u` unimodular (n×n) and
/// `a · u = [h | 0]`, `h` lower triangular with positive diagonal.
pub fn column_hermite(a: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let (m, n) = (a.rows, a.cols);
    if m > n {
        return Err(Error::InvalidParams("more constraints than columns".into()));
    }
    let mut w = a.to_rows();
    // u stored column-major: ucols[j] is column j
    let mut ucols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for i in 0..m {
        if w[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !w[i][j].is_zero()) {
                swap_cols(&mut w, &mut ucols, i, j);
            } else {
                return Err(Error::Singular);
            }
        }
        for j in i + 1..n {
            if w[i][j].is_zero() {
                continue;
            }
            let x = w[i][i].clone();
            let y = w[i][j].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let xg = &x / &g;
            let yg = &y / &g;
            for row in w.iter_mut() {
                let (ci, cj) = (row[i].clone(), row[j].clone());
                row[i] = &s * &ci + &t * &cj;
                row[j] = -&yg * &ci + &xg * &cj;
            }
            let (ci, cj) = (ucols[i].clone(), ucols[j].clone());
            for r in 0..n {
                ucols[i][r] = &s * &ci[r] + &t * &cj[r];
                ucols[j][r] = -&yg * &ci[r] + &xg * &cj[r];
            }
        }
        if w[i][i].is_negative() {
            for row in w.iter_mut() {
                row[i] = -&row[i];
            }
            for x in ucols[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let h: Vec<Vec<BigInt>> = w.iter().map(|row| row[..m].to_vec()).collect();
    let u: Vec<Vec<BigInt>> = (0..n).map(|r| (0..n).map(|c| ucols[c][r].clone()).collect()).collect();
    Ok((IntMatrix::from_big_rows(h)?, IntMatrix::from_big_rows(u)?))
}

fn swap_cols(w: &mut [Vec<BigInt>], ucols: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in w.iter_mut() {
        row.swap(i, j);
    }
    ucols.swap(i, j);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&IntMatrix::identity(2)).unwrap(), big(1));
        assert_eq!(determinant(&IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap(), big(-1));
        assert_eq!(determinant(&IntMatrix::from_rows(&[[2, 1], [4, 2]])).unwrap(), big(0));
        assert!(matches!(
            determinant(&IntMatrix::from_rows(&[[1, 2, 3]])),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn cofactor(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                        .collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * cofactor(&minor)
                })
                .sum()
        }
        let m = vec![
            vec![-2, -1, 0, 0],
            vec![-1, -6, 0, -2],
            vec![0, 0, -42, -7],
            vec![0, -2, -7, -2],
        ];
        assert_eq!(cofactor(&m), 49);
        assert_eq!(determinant(&IntMatrix::from_rows(&m)).unwrap(), big(49));
    }

    #[test]
    fn char_poly_small_cases() {
        let p = char_poly(&IntMatrix::identity(2)).unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[1, -2, 1]));
        let p = char_poly(&IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn lll_trivial_inputs() {
        let out = lll_reduce(&IntMatrix::from_rows(&[[2]])).unwrap();
        assert_eq!(out.gram, IntMatrix::from_rows(&[[2]]));
        assert_eq!(out.transform, IntMatrix::identity(1));

        let g = IntMatrix::from_rows(&[[2, 1], [1, 2]]);
        let out = lll_reduce(&g).unwrap();
        assert_eq!(determinant(&out.transform).unwrap().abs(), big(1));
        assert_eq!(&(&out.transform * &g) * &out.transform.transpose(), out.gram);
    }

    #[test]
    fn lll_rejects_indefinite() {
        let g = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert!(matches!(lll_reduce(&g), Err(Error::Indefinite)));
        let g = IntMatrix::from_rows(&[[2, 0], [0, -2]]);
        assert!(matches!(lll_reduce(&g), Err(Error::Indefinite)));
    }

    #[test]
    fn lll_reduces_skewed_basis() {
        // basis (1,0),(1000,1) of Z^2 with the standard form
        let g = IntMatrix::from_rows(&[[1, 1000], [1000, 1_000_001]]);
        let out = lll_reduce(&g).unwrap();
        assert_eq!(out.gram, IntMatrix::from_rows(&[[1, 0], [0, 1]]));
    }

    #[test]
    fn solve_exact_cases() {
        let x = solve_exact(&IntMatrix::identity(3), &RatVector::from_ints(&[4, -5, 6])).unwrap();
        assert_eq!(x, RatVector::from_ints(&[4, -5, 6]));
        let x = solve_exact(&IntMatrix::from_rows(&[[2, 0], [0, 2]]), &RatVector::from_ints(&[1, 1])).unwrap();
        let half = BigRational::new(big(1), big(2));
        assert_eq!(x, RatVector(vec![half.clone(), half]));
        assert!(matches!(
            solve_exact(&IntMatrix::from_rows(&[[1, 2], [2, 4]]), &RatVector::from_ints(&[1, 1])),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn hermite_kernel() {
        let a = IntMatrix::from_rows(&[[2, 4, 6], [0, 3, 3]]);
        let (h, u) = column_hermite(&a).unwrap();
        assert_eq!(determinant(&u).unwrap().abs(), big(1));
        let au = &a * &u;
        for i in 0..2 {
            assert!(au.get(i, 2).is_zero());
            assert_eq!(au.get(i, 0), h.get(i, 0));
            assert_eq!(au.get(i, 1), h.get(i, 1));
        }
        assert!(h.get(0, 1).is_zero());
    }

    #[test]
    fn independent_rows_detects_dependency() {
        let r = |v: &[i64]| RatVector::from_ints(v).0;
        let rows = vec![r(&[1, 0, 1]), r(&[0, 1, 1]), r(&[2, 3, 5])];
        let (kept, dropped) = independent_rows(&rows);
        assert_eq!(kept, vec![0, 1]);
        assert_eq!(dropped.len(), 1);
        let (idx, combo) = &dropped[0];
        assert_eq!(*idx, 2);
        assert_eq!(combo, &r(&[2, 3]));
    }
}

//! Enumeration of lattice vectors with prescribed inner products against a
//! few fixed vectors and a prescribed square norm.
//!
//! A solution `x` splits as `p + y` where `p` is the rational projection to
//! the span of the constraint vectors (fixed by the prescribed products) and
//! `y` lies in the orthogonal complement. When the span contains a positive
//! vector the complement is negative definite, so the admissible `y` form the
//! integer points of an ellipsoid shell, found by Fincke–Pohst enumeration
//! over an LLL-reduced basis of the kernel lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector};
use crate::linalg::{column_hermite, independent_rows, inverse_rational, lll_reduce, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub against: LatticeVector,
    pub value: i64,
}

impl LinearConstraint {
    pub fn new(against: LatticeVector, value: i64) -> Self {
        LinearConstraint { against, value }
    }
}

/// Precomputed data for repeated enumeration against one set of constraint
/// vectors with varying prescribed values.
pub struct AffineSlicer<'a> {
    lattice: &'a Lattice,
    kept: Vec<usize>,
    dropped: Vec<(usize, Vec<BigRational>)>,
    /// Lower-triangular Hermite block of the constraint functionals.
    hermite: Vec<Vec<i128>>,
    /// Lattice vectors whose combinations give particular solutions.
    particular: Vec<Vec<i128>>,
    /// Reduced basis of the kernel lattice (rows).
    kernel: Vec<Vec<i64>>,
    /// Inverse Gram of the kept constraint vectors.
    span_gram_inv: Vec<Vec<BigRational>>,
    /// Center of the ellipsoid as a linear function of the Hermite solution.
    center_map: Vec<Vec<f64>>,
    /// Fincke–Pohst completed-square form of the positive definite kernel form.
    form: Vec<Vec<f64>>,
}

impl<'a> AffineSlicer<'a> {
    pub fn new(lattice: &'a Lattice, vectors: &[LatticeVector]) -> Result<Self> {
        Self::build(lattice, vectors, true)
    }

    /// Same as [`AffineSlicer::new`] but skips the LLL step (test hook for
    /// reduction-independence checks).
    #[doc(hidden)]
    pub fn new_unreduced(lattice: &'a Lattice, vectors: &[LatticeVector]) -> Result<Self> {
        Self::build(lattice, vectors, false)
    }

    fn build(lattice: &'a Lattice, vectors: &[LatticeVector], reduce: bool) -> Result<Self> {
        let n = lattice.rank();
        if vectors.is_empty() {
            return Err(Error::InfiniteSet);
        }
        for v in vectors {
            lattice.check_dim(v)?;
        }
        let rows: Vec<Vec<BigRational>> = vectors
            .iter()
            .map(|v| v.0.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        let (kept, dropped) = independent_rows(&rows);
        let m = kept.len();

        let span_gram = IntMatrix::from_rows(
            &kept
                .iter()
                .map(|&i| kept.iter().map(|&j| lattice.inner(&vectors[i], &vectors[j])).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let span_gram_inv = inverse_rational(&span_gram).map_err(|_| Error::InfiniteSet)?;

        let functionals =
            IntMatrix::from_rows(&kept.iter().map(|&i| lattice.pairing_row(&vectors[i])).collect::<Vec<_>>());
        let (h, u) = column_hermite(&functionals)?;
        let hermite: Vec<Vec<i128>> =
            (0..m).map(|i| (0..m).map(|j| to_i128(h.get(i, j))).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let ucols = |j: usize| (0..n).map(|r| u.get(r, j).clone()).collect::<Vec<BigInt>>();

        let k = n - m;
        let mut kernel: Vec<Vec<i64>> = Vec::with_capacity(k);
        let mut q_exact = IntMatrix::zeros(1, 1);
        if k > 0 {
            let kbasis =
                IntMatrix::from_big_rows((m..n).map(ucols).collect()).expect("kernel basis rows");
            let kg = &(&kbasis * lattice.gram()) * &kbasis.transpose();
            let q = -&kg;
            let (q_red, basis) = if reduce {
                let out = lll_reduce(&q).map_err(|e| match e {
                    Error::Indefinite => Error::InfiniteSet,
                    other => other,
                })?;
                (out.gram, &out.transform * &kbasis)
            } else {
                if !is_positive_definite(&q)? {
                    return Err(Error::InfiniteSet);
                }
                (q, kbasis)
            };
            kernel = basis
                .to_i64_rows()
                .ok_or_else(|| Error::InvalidParams("kernel basis exceeds 64 bits".into()))?;
            q_exact = q_red;
        }

        // Particular-solution generators, shifted by kernel vectors so that
        // each sits near the origin of its own affine slice.
        let mut particular: Vec<Vec<i128>> = Vec::with_capacity(m);
        let mut center_map = vec![vec![0f64; m]; k];
        let q_inv = if k > 0 { Some(inverse_rational(&q_exact)?) } else { None };
        for i in 0..m {
            let mut gen: Vec<BigInt> = ucols(i);
            if let Some(q_inv) = &q_inv {
                let c = kernel_center(lattice, &gen, &kernel, q_inv);
                for (j, cj) in c.iter().enumerate() {
                    let r = cj.round().to_integer();
                    if !r.is_zero() {
                        for (g, b) in gen.iter_mut().zip(&kernel[j]) {
                            *g += &r * BigInt::from(*b);
                        }
                    }
                }
                let c = kernel_center(lattice, &gen, &kernel, q_inv);
                for j in 0..k {
                    center_map[j][i] = rat_to_f64(&c[j]);
                }
            }
            particular.push(gen.iter().map(to_i128).collect::<Result<Vec<_>>>()?);
        }

        let form = if k > 0 { completed_square(&q_exact) } else { Vec::new() };

        Ok(AffineSlicer { lattice, kept, dropped, hermite, particular, kernel, span_gram_inv, center_map, form })
    }

    /// Hermite coordinates and particular solution for the kept values, or
    /// `None` when no integer vector attains them.
    fn particular_solution(&self, kept_values: &[i128]) -> Option<(Vec<i128>, Vec<i128>)> {
        let m = self.hermite.len();
        let mut y = vec![0i128; m];
        for i in 0..m {
            let mut rhs = kept_values[i];
            for j in 0..i {
                rhs -= self.hermite[i][j] * y[j];
            }
            let d = self.hermite[i][i];
            if rhs % d != 0 {
                return None;
            }
            y[i] = rhs / d;
        }
        let n = self.lattice.rank();
        let mut x0 = vec![0i128; n];
        for (yi, gen) in y.iter().zip(&self.particular) {
            for (x, g) in x0.iter_mut().zip(gen) {
                *x += yi * g;
            }
        }
        Some((y, x0))
    }

    fn consistent_values(&self, values: &[i64]) -> Option<Vec<i128>> {
        for (idx, combo) in &self.dropped {
            let mut s = BigRational::zero();
            for (c, &k) in combo.iter().zip(&self.kept) {
                s += c * BigRational::from_integer(values[k].into());
            }
            if s != BigRational::from_integer(values[*idx].into()) {
                return None;
            }
        }
        Some(self.kept.iter().map(|&k| values[k] as i128).collect())
    }

    /// Norm of the projection to the constraint span for the kept values.
    fn span_norm(&self, kept_values: &[i128]) -> BigRational {
        let a: Vec<BigRational> = kept_values.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let mut s = BigRational::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                s += ai * &self.span_gram_inv[i][j] * aj;
            }
        }
        s
    }

    /// All `x` with `⟨x, v_i⟩ = values[i]` and `⟨x,x⟩ = d`, sorted.
    pub fn enumerate(&self, values: &[i64], d: i64) -> Result<Vec<LatticeVector>> {
        if values.len() != self.kept.len() + self.dropped.len() {
            return Err(Error::DimensionMismatch { expected: self.kept.len() + self.dropped.len(), got: values.len() });
        }
        let mut out = Vec::new();
        let Some(kv) = self.consistent_values(values) else { return Ok(out) };
        let residual = self.span_norm(&kv) - BigRational::from_integer(d.into());
        if residual.is_negative() {
            return Ok(out);
        }
        let Some((y, x0)) = self.particular_solution(&kv) else { return Ok(out) };
        self.collect(&y, &x0, rat_to_f64(&residual), d, &mut out);
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Enumeration with a caller-supplied residual radius; the caller
    /// guarantees the radius is at least the exact residual.
    fn enumerate_with_radius(&self, kept_values: &[i128], radius: f64, d: i64, out: &mut Vec<LatticeVector>) {
        if let Some((y, x0)) = self.particular_solution(kept_values) {
            self.collect(&y, &x0, radius, d, out);
        }
    }

    fn collect(&self, y: &[i128], x0: &[i128], radius: f64, d: i64, out: &mut Vec<LatticeVector>) {
        let n = self.lattice.rank();
        let k = self.kernel.len();
        let mut check = |z: &[i64]| {
            let mut x: Vec<i128> = x0.to_vec();
            for (zj, b) in z.iter().zip(&self.kernel) {
                if *zj != 0 {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += *zj as i128 * *bi as i128;
                    }
                }
            }
            let Some(x) = x.into_iter().map(|v| i64::try_from(v).ok()).collect::<Option<Vec<i64>>>() else {
                return;
            };
            let x = LatticeVector(x);
            if self.lattice.norm(&x) == d {
                out.push(x);
            }
        };
        if k == 0 {
            check(&[]);
            return;
        }
        let center: Vec<f64> = (0..k)
            .map(|j| self.center_map[j].iter().zip(y).map(|(c, &yi)| c * yi as f64).sum())
            .collect();
        let bound = radius + 1e-7 * radius.abs().max(1.0);
        debug_assert_eq!(self.kernel[0].len(), n);
        fincke_pohst(&self.form, &center, bound, &mut check);
    }
}

fn is_positive_definite(q: &IntMatrix) -> Result<bool> {
    use crate::linalg::determinant;
    let n = q.rows();
    for s in 1..=n {
        let rows: Vec<Vec<BigInt>> = (0..s).map(|i| q.row(i)[..s].to_vec()).collect();
        if !determinant(&IntMatrix::from_big_rows(rows)?)?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rational kernel coordinates `c = Q⁻¹ w`, `w_j = ⟨x, b_j⟩`.
fn kernel_center(lattice: &Lattice, x: &[BigInt], kernel: &[Vec<i64>], q_inv: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = lattice.rank();
    let gx: Vec<BigInt> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(lattice.gram_entry(i, j)) * &x[j]).sum())
        .collect();
    let w: Vec<BigRational> = kernel
        .iter()
        .map(|b| BigRational::from_integer(b.iter().zip(&gx).map(|(bi, g)| BigInt::from(*bi) * g).sum()))
        .collect();
    q_inv.iter().map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum()).collect()
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::InvalidParams("intermediate value exceeds 128 bits".into()))
}

pub(crate) fn rat_to_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // rescale huge values
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let a = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let b = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

/// Completed-square decomposition `Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
fn completed_square(q: &IntMatrix) -> Vec<Vec<f64>> {
    let k = q.rows();
    let mut a: Vec<Vec<f64>> = (0..k).map(|i| q.row(i).iter().map(|x| x.to_f64().unwrap()).collect()).collect();
    for i in 0..k {
        for j in i + 1..k {
            a[j][i] = a[i][j];
            a[i][j] /= a[i][i];
        }
        for l in i + 1..k {
            for j in l..k {
                a[l][j] -= a[l][i] * a[i][j];
            }
        }
    }
    a
}

/// Depth-first enumeration of integer `z` with `Q(z − c) ≤ bound`, last
/// coordinate outermost.
fn fincke_pohst(form: &[Vec<f64>], center: &[f64], bound: f64, visit: &mut dyn FnMut(&[i64])) {
    let k = form.len();
    let mut z = vec![0i64; k];
    recurse(form, center, k - 1, bound, &mut z, visit);
}

fn recurse(form: &[Vec<f64>], center: &[f64], i: usize, budget: f64, z: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
    let k = form.len();
    let mut cen = center[i];
    for j in i + 1..k {
        cen -= form[i][j] * (z[j] as f64 - center[j]);
    }
    let qii = form[i][i];
    let r = (budget.max(0.0) / qii).sqrt();
    let lo = (cen - r - 1e-9).ceil() as i64;
    let hi = (cen + r + 1e-9).floor() as i64;
    for zi in lo..=hi {
        let t = zi as f64 - cen;
        let rest = budget - qii * t * t;
        if rest < -1e-7 * budget.abs().max(1.0) {
            continue;
        }
        z[i] = zi;
        if i == 0 {
            visit(z);
        } else {
            recurse(form, center, i - 1, rest, z, visit);
        }
    }
    z[i] = 0;
}

/// `{x : ⟨x, v_i⟩ = a_i ∀i, ⟨x,x⟩ = d}` in canonical (sorted) order.
pub fn enumerate_constrained(
    lattice: &Lattice,
    constraints: &[LinearConstraint],
    d: i64,
) -> Result<Vec<LatticeVector>> {
    let vectors: Vec<LatticeVector> = constraints.iter().map(|c| c.against.clone()).collect();
    let values: Vec<i64> = constraints.iter().map(|c| c.value).collect();
    AffineSlicer::new(lattice, &vectors)?.enumerate(&values, d)
}

fn require_positive(lattice: &Lattice, v: &LatticeVector) -> Result<()> {
    lattice.check_dim(v)?;
    if lattice.norm(v) <= 0 {
        return Err(Error::NotPositive);
    }
    if let Some(anchor) = lattice.cone_anchor() {
        if lattice.inner(v, anchor) <= 0 {
            return Err(Error::NotPositive);
        }
    }
    Ok(())
}

/// `ℛ(v) = {r : ⟨r,v⟩ = 0, ⟨r,r⟩ = −2}`.
pub fn set_r(lattice: &Lattice, v: &LatticeVector) -> Result<Vec<LatticeVector>> {
    require_positive(lattice, v)?;
    enumerate_constrained(lattice, &[LinearConstraint::new(v.clone(), 0)], -2)
}

/// `ℱ(v) = {f : ⟨f,v⟩ = 1, ⟨f,f⟩ = 0}`.
pub fn set_f(lattice: &Lattice, v: &LatticeVector) -> Result<Vec<LatticeVector>> {
    require_positive(lattice, v)?;
    enumerate_constrained(lattice, &[LinearConstraint::new(v.clone(), 1)], 0)
}

/// `ℛ(v) = ∅` and `ℱ(v) = ∅`, checked together on one slicer.
pub fn r_and_f_empty(lattice: &Lattice, v: &LatticeVector) -> Result<bool> {
    require_positive(lattice, v)?;
    let slicer = AffineSlicer::new(lattice, std::slice::from_ref(v))?;
    Ok(slicer.enumerate(&[0], -2)?.is_empty() && slicer.enumerate(&[1], 0)?.is_empty())
}

/// `𝒮(u,v) = {r : ⟨r,u⟩ > 0, ⟨r,v⟩ < 0, ⟨r,r⟩ = −2}`.
pub fn set_s(lattice: &Lattice, u: &LatticeVector, v: &LatticeVector) -> Result<Vec<LatticeVector>> {
    separating(lattice, u, v, -2, false)
}

/// Whether `𝒮(u,v)` is empty, stopping at the first element found.
pub fn set_s_is_empty(lattice: &Lattice, u: &LatticeVector, v: &LatticeVector) -> Result<bool> {
    Ok(separating(lattice, u, v, -2, true)?.is_empty())
}

/// `{x : ⟨x,u⟩ > 0, ⟨x,v⟩ < 0, ⟨x,x⟩ = d}` for negative `d`.
///
/// The pair `(a, b) = (⟨x,u⟩, ⟨x,v⟩)` fixes the projection of `x` to
/// span{u, v}; that projection has norm `(v²a² − 2⟨u,v⟩ab + u²b²)/Δ` with
/// `Δ = u²v² − ⟨u,v⟩² < 0`, and must be at least `d` because the complement
/// is negative definite. With `ab < 0` every term is nonnegative, so `a`
/// and `|b|` are bounded.
pub fn separating(
    lattice: &Lattice,
    u: &LatticeVector,
    v: &LatticeVector,
    d: i64,
    stop_at_first: bool,
) -> Result<Vec<LatticeVector>> {
    require_positive(lattice, u)?;
    require_positive(lattice, v)?;
    if d >= 0 {
        return Err(Error::InvalidParams("separating set needs a negative norm".into()));
    }
    let uu = lattice.norm(u) as i128;
    let vv = lattice.norm(v) as i128;
    let uv = lattice.inner(u, v) as i128;
    if uv <= 0 {
        return Err(Error::NotPositive);
    }
    let delta = uu * vv - uv * uv;
    if delta == 0 {
        // v = λu with λ > 0: the sign conditions contradict each other
        return Ok(Vec::new());
    }
    let slicer = AffineSlicer::new(lattice, &[u.clone(), v.clone()])?;
    // Region: vv·a² + uu·b² + 2·uv·a·|b| ≤ −d·(uv² − uu·vv) =: cap
    let cap = (-d as i128) * (-delta);
    let mut out = Vec::new();
    let mut a: i128 = 1;
    while vv * a * a <= cap {
        let mut bb: i128 = 1;
        loop {
            let lhs = vv * a * a + uu * bb * bb + 2 * uv * a * bb;
            if lhs > cap {
                break;
            }
            // residual = span_norm − d = (num + (−d)·Δ)/Δ with num = lhs
            let radius = (lhs + (-d as i128) * delta) as f64 / delta as f64;
            slicer.enumerate_with_radius(&[a, -bb], radius.max(0.0), d, &mut out);
            if stop_at_first && !out.is_empty() {
                return Ok(out);
            }
            bb += 1;
        }
        a += 1;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Every vector in the box `[−bound, bound]^rank` satisfying `pred`.
/// Test oracle only; limited to rank ≤ 5.
pub fn brute_force_oracle(
    lattice: &Lattice,
    bound: i64,
    pred: impl Fn(&LatticeVector) -> bool,
) -> Result<Vec<LatticeVector>> {
    let n = lattice.rank();
    if n > 5 {
        return Err(Error::InvalidParams(format!("brute force oracle limited to rank 5, got {n}")));
    }
    let bound = bound.abs();
    let mut out = Vec::new();
    let mut x = vec![-bound; n];
    loop {
        let v = LatticeVector(x.clone());
        if pred(&v) {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return Ok(out);
            }
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = -bound;
            i += 1;
        }
    }
}

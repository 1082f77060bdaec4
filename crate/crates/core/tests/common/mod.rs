#![allow(dead_code)]

use k3salem::enumerate::{brute_force_oracle, enumerate_constrained, set_f, set_r, set_s, LinearConstraint};
use k3salem::linalg::inverse_rational;
use k3salem::salem::trace_polynomial;
use k3salem::{IntMatrix, IntPolynomial, Lattice, LatticeVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use std::collections::BTreeMap;

pub fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// Even hyperbolic Gram `Pᵀ·B·P` with a block-diagonal base `B` and a small
/// unimodular `P`.
pub fn hyperbolic_gram(rank: usize, diag: &[i64], scale: i64, ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0i64; rank]; rank];
    if scale > 0 {
        b[0][1] = scale;
        b[1][0] = scale;
        for i in 2..rank {
            b[i][i] = -2 * diag[i];
        }
    } else {
        b[0][0] = 2 * diag[0];
        for i in 1..rank {
            b[i][i] = -2 * diag[i];
        }
    }
    let mut p: Vec<Vec<i64>> = (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, k) in ops {
        let (i, j) = (i % rank, j % rank);
        if i != j {
            for c in 0..rank {
                p[i][c] += k * p[j][c];
            }
        }
    }
    let mut g = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        for j in 0..rank {
            let mut s = 0;
            for a in 0..rank {
                for c in 0..rank {
                    s += p[i][a] * b[a][c] * p[j][c];
                }
            }
            g[i][j] = s;
        }
    }
    g
}

/// Coordinate bound for vectors `x` with `Q_h(x) ≤ q`, where
/// `Q_h(x) = 2⟨x,h⟩²/h² − ⟨x,x⟩` is the majorant at `h` and
/// `(Q_h)⁻¹ = 2hhᵀ/h² − G⁻¹`.
pub fn majorant_bound(l: &Lattice, ginv: &[Vec<f64>], hs: &[LatticeVector], q: f64) -> i64 {
    let mut worst: f64 = 0.0;
    for h in hs {
        let hh = l.norm(h) as f64;
        for i in 0..l.rank() {
            let d = 2.0 * (h.0[i] as f64).powi(2) / hh - ginv[i][i];
            worst = worst.max(d);
        }
    }
    ((q * worst * 1.05).sqrt()).ceil() as i64 + 1
}

/// `s·A + t·B`.
pub fn combine(a: &IntMatrix, s: &BigInt, b: &IntMatrix, t: &BigInt) -> IntMatrix {
    let rows = a
        .to_rows()
        .into_iter()
        .zip(b.to_rows())
        .map(|(x, y)| x.iter().zip(&y).map(|(p, q)| s * p + t * q).collect())
        .collect();
    IntMatrix::from_big_rows(rows).unwrap()
}

pub fn ginv_f64(l: &Lattice) -> Vec<Vec<f64>> {
    inverse_rational(l.gram()).unwrap().iter().map(|r| r.iter().map(to_f64).collect()).collect()
}


/// Random even hyperbolic lattice of rank 2..=4 with a positive vector `v`
/// and a second positive vector `u` in the same cone.
pub fn random_hyperbolic_case<R: Rng>(rng: &mut R) -> Option<(Lattice, LatticeVector, LatticeVector)> {
    let rank = rng.gen_range(2..=4);
    let diag: Vec<i64> = (0..4).map(|_| rng.gen_range(1..=3)).collect();
    let scale = rng.gen_range(0..=2);
    let ops: Vec<(usize, usize, i64)> =
        (0..rng.gen_range(0..4)).map(|_| (rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(-1..=1))).collect();
    let gram = IntMatrix::from_rows(&hyperbolic_gram(rank, &diag, scale, &ops));
    let plain = Lattice::new(gram.clone()).ok()?;
    let v = LatticeVector((0..rank).map(|_| rng.gen_range(-3..=3)).collect());
    let mut u = LatticeVector((0..rank).map(|_| rng.gen_range(-3..=3)).collect());
    if plain.norm(&v) <= 0 || plain.norm(&u) <= 0 {
        return None;
    }
    if plain.inner(&u, &v) < 0 {
        u = u.neg();
    }
    if plain.inner(&u, &v) <= 0 {
        return None;
    }
    let l = Lattice::hyperbolic(gram, v.clone()).ok()?;
    Some((l, v, u))
}

/// Compares ℛ(v), ℱ(v) and 𝒮(u, v) with exhaustive box enumeration.
pub fn compare_with_brute_force(l: &Lattice, v: &LatticeVector, u: &LatticeVector) -> Result<(), String> {
    let ginv = ginv_f64(l);
    let vv = l.norm(v) as f64;
    let err = |e: k3salem::Error| e.to_string();
    let b_r = majorant_bound(l, &ginv, std::slice::from_ref(v), 2.0);
    let oracle = brute_force_oracle(l, b_r, |x| l.norm(x) == -2 && l.inner(x, v) == 0).map_err(err)?;
    if set_r(l, v).map_err(err)? != oracle {
        return Err(format!("R differs for {v:?}"));
    }
    let b_f = majorant_bound(l, &ginv, std::slice::from_ref(v), 2.0 / vv);
    let oracle = brute_force_oracle(l, b_f, |x| l.norm(x) == 0 && l.inner(x, v) == 1).map_err(err)?;
    if set_f(l, v).map_err(err)? != oracle {
        return Err(format!("F differs for {v:?}"));
    }
    let path: Vec<LatticeVector> = (0..=64)
        .map(|t| LatticeVector((0..l.rank()).map(|i| (64 - t) * u.0[i] + t * v.0[i]).collect()))
        .collect();
    let b_s = majorant_bound(l, &ginv, &path, 2.0) + 1;
    let oracle =
        brute_force_oracle(l, b_s, |x| l.norm(x) == -2 && l.inner(x, u) > 0 && l.inner(x, v) < 0).map_err(err)?;
    if set_s(l, u, v).map_err(err)? != oracle {
        return Err(format!("S differs for {u:?}, {v:?}"));
    }
    for c in 0..=2i64 {
        for d in [-4i64, -2, 0] {
            let q = 2.0 * (c * c) as f64 / vv - d as f64;
            let b = majorant_bound(l, &ginv, std::slice::from_ref(v), q);
            let oracle = brute_force_oracle(l, b, |x| l.norm(x) == d && l.inner(x, v) == c).map_err(err)?;
            let got = enumerate_constrained(l, &[LinearConstraint::new(v.clone(), c)], d).map_err(err)?;
            if got != oracle {
                return Err(format!("constrained enumeration differs for {v:?}, value {c}, norm {d}"));
            }
        }
    }
    Ok(())
}

fn small_rows(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_i128().expect("entry fits")).collect()).collect()
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = b[0].len();
    a.iter().map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}

/// `M² = I`, `M G Mᵀ = G` and `h M = h`, computed with plain integer loops.
pub fn involution_invariants(l: &Lattice, h: &LatticeVector, m: &IntMatrix) -> Result<(), String> {
    let mm = small_rows(m);
    let g = small_rows(l.gram());
    let n = g.len();
    let id: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    if mat_mul(&mm, &mm) != id {
        return Err("M^2 != I".into());
    }
    let mt: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| mm[j][i]).collect()).collect();
    if mat_mul(&mat_mul(&mm, &g), &mt) != g {
        return Err("M G M^T != G".into());
    }
    let hm: Vec<i128> = (0..n).map(|j| (0..n).map(|i| i128::from(h.0[i]) * mm[i][j]).sum()).collect();
    if hm.iter().zip(&h.0).any(|(a, &b)| *a != i128::from(b)) {
        return Err("h M != h".into());
    }
    Ok(())
}

fn totient(n: usize) -> usize {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count()
}

/// `Φ_n` by dividing `xⁿ − 1` by `Φ_d` for the proper divisors `d`.
pub fn cyclotomic_by_division(n: usize, cache: &mut BTreeMap<usize, IntPolynomial>) -> IntPolynomial {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    let mut p = IntPolynomial::x_pow_minus_one(n);
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let c = cyclotomic_by_division(d, cache);
        p = p.exact_div_monic(&c).expect("cyclotomic divides");
    }
    cache.insert(n, p.clone());
    p
}

/// Orders `n` with `Φ_n` dividing `phi`, over every `n` with `deg Φ_n ≤ deg phi`.
pub fn cyclotomic_orders(phi: &IntPolynomial) -> Vec<usize> {
    let d = phi.degree().unwrap_or(0);
    let mut cache = BTreeMap::new();
    // totient(n) ≥ √n for n > 6
    (1..=(d * d).max(6))
        .filter(|&n| totient(n) <= d)
        .filter(|&n| phi.div_rem_monic(&cyclotomic_by_division(n, &mut cache)).1.is_zero())
        .collect()
}

/// Salem root pattern: the trace polynomial has one root in `(2, ∞)` and
/// all others in `(−2, 2)`, found by exact sign changes on a grid.
pub fn salem_root_pattern(phi: &IntPolynomial) -> Result<(), String> {
    if !phi.is_reciprocal() {
        return Err("not reciprocal".into());
    }
    let q = trace_polynomial(phi).map_err(|e| e.to_string())?;
    let deg = q.degree().unwrap_or(0);
    let steps = 1i64 << 14;
    let mut inside = 0;
    let mut prev = q.sign_at(&BigRational::from_integer((-2).into()));
    if prev == 0 {
        return Err("root at -2".into());
    }
    for k in 1..=steps {
        let x = BigRational::new(BigInt::from(4 * k - 2 * steps), BigInt::from(steps));
        let s = q.sign_at(&x);
        if s == 0 {
            if k == steps {
                return Err("root at 2".into());
            }
            continue;
        }
        if s != prev {
            inside += 1;
        }
        prev = s;
    }
    let at_inf = if q.leading().is_some_and(|c| c.is_positive()) { 1 } else { -1 };
    let outside = usize::from(prev != at_inf);
    if inside + 1 != deg || outside != 1 {
        return Err(format!("{inside} sign changes in (-2,2), {outside} beyond 2, degree {deg}"));
    }
    Ok(())
}

/// Leading real root of a polynomial by bisection on `[lo, hi]` in floating
/// point, assuming one sign change there.
pub fn bisect_root(phi: &IntPolynomial, mut lo: f64, mut hi: f64) -> f64 {
    let sign = |x: f64| {
        let r = BigRational::from_float(x).expect("finite");
        phi.sign_at(&r)
    };
    let s_lo = sign(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sign(mid) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|det G|` and whether `p·G⁻¹` is integral.
pub fn discriminant_data(l: &Lattice, p: i64) -> (BigInt, bool) {
    let inv = inverse_rational(l.gram()).expect("nondegenerate");
    let scaled = BigRational::from_integer(p.into());
    let integral = inv.iter().flatten().all(|x| (x * &scaled).is_integer());
    (l.abs_det(), integral)
}

/// Invariants of an accepted search result: every involution, the word
/// length, and the Salem polynomial oracles.
pub fn accepted_result_invariants(r: &k3salem::pipeline::SearchResult) -> Result<(), String> {
    let rs = k3salem::rs::build_lambda_with(r.params).map_err(|e| e.to_string())?;
    for (i, rec) in r.involutions.iter().enumerate() {
        involution_invariants(&rs.lattice, &rec.h, &rec.matrix).map_err(|e| format!("involution {i}: {e}"))?;
    }
    if r.word.is_empty() || r.word.len() > 22 {
        return Err(format!("word length {}", r.word.len()));
    }
    if r.charpoly.degree() != Some(22) {
        return Err("degree is not 22".into());
    }
    salem_root_pattern(&r.charpoly)?;
    let orders = cyclotomic_orders(&r.charpoly);
    if !orders.is_empty() {
        return Err(format!("cyclotomic factors of orders {orders:?}"));
    }
    Ok(())
}

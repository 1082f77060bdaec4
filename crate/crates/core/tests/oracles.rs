mod common;

use common::{combine, compare_with_brute_force, ginv_f64, hyperbolic_gram, majorant_bound};
use k3salem::chamber::{lex_sign, AmpleList, LexSign};
use k3salem::enumerate::{brute_force_oracle, set_f, set_r, set_s, AffineSlicer};
use k3salem::linalg::{char_poly, determinant, lll_reduce};
use k3salem::poly::IntPolynomial;
use k3salem::salem::{expand_trace_polynomial, sturm_count, trace_polynomial, RealBound};
use k3salem::{IntMatrix, Lattice, LatticeVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn lattice_strategy() -> impl Strategy<Value = (Lattice, LatticeVector, LatticeVector)> {
    (2usize..=4, prop::collection::vec(1i64..=3, 4), 0i64..=2, prop::collection::vec((0usize..4, 0usize..4, -1i64..=1), 0..4))
        .prop_flat_map(|(rank, diag, scale, ops)| {
            let g = hyperbolic_gram(rank, &diag, scale, &ops);
            let vs = prop::collection::vec(-3i64..=3, rank);
            let us = prop::collection::vec(-3i64..=3, rank);
            (Just(g), vs, us)
        })
        .prop_filter_map("needs positive vectors", |(g, v, u)| {
            let gram = IntMatrix::from_rows(&g);
            let plain = Lattice::new(gram.clone()).ok()?;
            let v = LatticeVector(v);
            let u = LatticeVector(u);
            if plain.norm(&v) <= 0 || plain.norm(&u) <= 0 {
                return None;
            }
            let u = if plain.inner(&u, &v) < 0 { u.neg() } else { u };
            if plain.inner(&u, &v) <= 0 {
                return None;
            }
            let l = Lattice::hyperbolic(gram, v.clone()).ok()?;
            Some((l, v, u))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, max_global_rejects: 1 << 16, ..ProptestConfig::default() })]

    #[test]
    fn roots_and_isotropic_sets_match_brute_force((l, v, _u) in lattice_strategy()) {
        let ginv = ginv_f64(&l);
        let vv = l.norm(&v) as f64;
        let b_r = majorant_bound(&l, &ginv, std::slice::from_ref(&v), 2.0);
        let b_f = majorant_bound(&l, &ginv, std::slice::from_ref(&v), 2.0 / vv);
        let oracle_r = brute_force_oracle(&l, b_r, |x| l.norm(x) == -2 && l.inner(x, &v) == 0).unwrap();
        let oracle_f = brute_force_oracle(&l, b_f, |x| l.norm(x) == 0 && l.inner(x, &v) == 1).unwrap();
        let r = set_r(&l, &v).unwrap();
        prop_assert_eq!(&r, &oracle_r);
        prop_assert_eq!(set_f(&l, &v).unwrap(), oracle_f);
        let mut negated: Vec<LatticeVector> = r.iter().map(LatticeVector::neg).collect();
        negated.sort();
        prop_assert_eq!(negated, r);
    }

    #[test]
    fn separating_roots_match_brute_force((l, v, u) in lattice_strategy()) {
        let ginv = ginv_f64(&l);
        let path: Vec<LatticeVector> = (0..=64)
            .map(|t| LatticeVector((0..l.rank()).map(|i| (64 - t) * u.0[i] + t * v.0[i]).collect()))
            .collect();
        let bound = majorant_bound(&l, &ginv, &path, 2.0) + 1;
        let oracle = brute_force_oracle(&l, bound, |x| l.norm(x) == -2 && l.inner(x, &u) > 0 && l.inner(x, &v) < 0).unwrap();
        let s = set_s(&l, &u, &v).unwrap();
        prop_assert_eq!(&s, &oracle);
        let mut swapped: Vec<LatticeVector> = set_s(&l, &v, &u).unwrap().iter().map(LatticeVector::neg).collect();
        swapped.sort();
        prop_assert_eq!(swapped, s);
    }

    #[test]
    fn constrained_enumeration_matches_brute_force((l, v, u) in lattice_strategy()) {
        if let Err(e) = compare_with_brute_force(&l, &v, &u) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn enumeration_independent_of_reduction((l, v, u) in lattice_strategy(), c in -2i64..=2, d in -4i64..=0) {
        let both = [v.clone(), u.clone()];
        let reduced = AffineSlicer::new(&l, &both);
        let raw = AffineSlicer::new_unreduced(&l, &both);
        match (reduced, raw) {
            (Ok(a), Ok(b)) => {
                let lhs = a.enumerate(&[c, c + 1], d);
                let rhs = b.enumerate(&[c, c + 1], d);
                match (lhs, rhs) {
                    (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                    (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
                }
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn lex_sign_is_antisymmetric((l, v, u) in lattice_strategy(), x in prop::collection::vec(-4i64..=4, 4)) {
        let rank = l.rank();
        let rhos: Vec<LatticeVector> = (0..rank).map(|i| LatticeVector::unit(rank, i)).chain(std::iter::once(u)).collect();
        let a = AmpleList::new(&l, v, rhos).unwrap();
        let x = LatticeVector(x[..rank].to_vec());
        let s = lex_sign(&a, &x);
        let t = lex_sign(&a, &x.neg());
        match s {
            LexSign::Zero => prop_assert_eq!(t, LexSign::Zero),
            LexSign::Positive => prop_assert_eq!(t, LexSign::Negative),
            LexSign::Negative => prop_assert_eq!(t, LexSign::Positive),
        }
        prop_assert_eq!(s == LexSign::Zero, x.is_zero());
    }

    #[test]
    fn reflections_are_involutive_isometries((l, v, _u) in lattice_strategy(), x in prop::collection::vec(-5i64..=5, 4)) {
        let x = LatticeVector(x[..l.rank()].to_vec());
        for r in set_r(&l, &v).unwrap().iter().take(4) {
            let y = l.reflect(r, &x).unwrap();
            prop_assert_eq!(l.reflect(r, &y).unwrap(), x.clone());
            prop_assert_eq!(l.norm(&y), l.norm(&x));
            prop_assert!(l.is_isometry(&l.reflection_matrix(r).unwrap()));
        }
    }

    #[test]
    fn characteristic_polynomial_oracles(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 5), 5), n in 1usize..=5) {
        let m = IntMatrix::from_rows(&rows[..n].iter().map(|r| r[..n].to_vec()).collect::<Vec<_>>());
        let cp = char_poly(&m).unwrap();
        prop_assert_eq!(cp.degree(), Some(n));
        // χ(t) = det(tI − M) at integer points
        for t in -3i64..=3 {
            let shifted = combine(&IntMatrix::identity(n), &BigInt::from(t), &m, &BigInt::from(-1));
            prop_assert_eq!(cp.eval_i64(t), determinant(&shifted).unwrap());
        }
        // Cayley–Hamilton
        let mut acc = IntMatrix::zeros(n, n);
        for c in cp.coeffs().iter().rev() {
            acc = combine(&(&acc * &m), &BigInt::from(1), &IntMatrix::identity(n), c);
        }
        prop_assert!(acc.to_rows().iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn lll_preserves_the_lattice(rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 4)) {
        // positive definite Gram AᵀA + I
        let a = IntMatrix::from_rows(&rows);
        let one = BigInt::from(1);
        let g = combine(&(&a.transpose() * &a), &one, &IntMatrix::identity(4), &one);
        let out = lll_reduce(&g).unwrap();
        let t = &out.transform;
        prop_assert_eq!(determinant(t).unwrap().magnitude().clone(), 1u32.into());
        prop_assert_eq!(&(&(t * &g) * &t.transpose()), &out.gram);
        prop_assert_eq!(determinant(&out.gram).unwrap(), determinant(&g).unwrap());
    }

    #[test]
    fn trace_polynomial_round_trip(q in prop::collection::vec(-20i64..=20, 1..8)) {
        let mut q = q;
        q.push(1);
        let q = IntPolynomial::from_i64(&q);
        let phi = expand_trace_polynomial(&q);
        prop_assert!(phi.is_reciprocal());
        prop_assert_eq!(trace_polynomial(&phi).unwrap(), q);
    }

    #[test]
    fn sturm_counts_match_sign_scan(roots in prop::collection::btree_set(-24i64..=24, 1..6), extra in 0i64..=3) {
        // roots at k/8, separated by at least 1/8; optional irreducible x² + extra + 1
        let mut p = IntPolynomial::from_i64(&[1]);
        for &r in &roots {
            p = p.mul(&IntPolynomial::from_i64(&[-r, 8]));
        }
        if extra > 0 {
            p = p.mul(&IntPolynomial::from_i64(&[extra + 1, 0, 1]));
        }
        let (a, b) = (-2i64, 2i64);
        let count = sturm_count(&p, &RealBound::int(a), &RealBound::int(b));
        // sign scan at the midpoints (2k+1)/32: roots sit on multiples of 1/8
        let mut changes = 0;
        let mut prev = 0;
        for k in (32 * a / 2)..(32 * b / 2) {
            let s = p.sign_at(&BigRational::new((2 * k + 1).into(), 32.into()));
            if prev != 0 && s != prev {
                changes += 1;
            }
            prev = s;
        }
        let expected = roots.iter().filter(|&&r| 8 * a < r && r < 8 * b).count();
        prop_assert_eq!(count, expected);
        prop_assert_eq!(changes, expected);
    }
}

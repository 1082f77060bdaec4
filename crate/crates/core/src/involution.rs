//! Double plane involutions: the exceptional ADE configuration of a
//! degree-2 polarization, the Galois action on it and the matrix `M(h)`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chamber::{chamber_contains, AmpleList, LexSign};
use crate::enumerate::{set_f, set_r};
use crate::error::{Error, Result};
use crate::io::{parse_int_matrix, parse_int_vector, IntLike};
use crate::lattice::{Lattice, LatticeVector};
use crate::linalg::{independent_rows, inverse_rational, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdeType {
    A(usize),
    D(usize),
    E(usize),
}

impl AdeType {
    pub fn rank(&self) -> usize {
        match *self {
            AdeType::A(n) | AdeType::D(n) | AdeType::E(n) => n,
        }
    }

    /// Number of roots of the root system.
    pub fn root_count(&self) -> usize {
        match *self {
            AdeType::A(n) => n * (n + 1),
            AdeType::D(n) => 2 * n * (n - 1),
            AdeType::E(6) => 72,
            AdeType::E(7) => 126,
            AdeType::E(8) => 240,
            AdeType::E(_) => unreachable!("E types have rank 6, 7 or 8"),
        }
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(n) => write!(f, "A{n}"),
            AdeType::D(n) => write!(f, "D{n}"),
            AdeType::E(n) => write!(f, "E{n}"),
        }
    }
}

/// One connected configuration; `roots[i]` carries label `i+1` of the
/// standard diagram (`a_i`, `d_i` or `e_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdeComponent {
    pub kind: AdeType,
    pub roots: Vec<LatticeVector>,
}

/// Tie-break between symmetric labelings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LexSmallest,
    LexLargest,
}

#[derive(Clone, Debug)]
pub struct InvolutionRecord {
    pub h: LatticeVector,
    pub components: Vec<AdeComponent>,
    pub matrix: IntMatrix,
    pub singularities: String,
}

impl InvolutionRecord {
    pub fn check_invariants(&self, lattice: &Lattice) -> Result<()> {
        check_involution(lattice, &self.h, &self.matrix)
    }
}

pub fn check_involution(lattice: &Lattice, h: &LatticeVector, m: &IntMatrix) -> Result<()> {
    if lattice.norm(h) != 2 {
        return Err(Error::PropertyFailed("polarization does not have norm 2".into()));
    }
    if (m * m) != IntMatrix::identity(lattice.rank()) {
        return Err(Error::PropertyFailed("M^2 != I".into()));
    }
    if !lattice.is_isometry(m) {
        return Err(Error::PropertyFailed("M G M^T != G".into()));
    }
    if &h.apply(m)? != h {
        return Err(Error::PropertyFailed("h M != h".into()));
    }
    Ok(())
}

/// `h ∈ D(𝒂)` and `ℱ(h) = ∅`.
pub fn is_polarization_deg2(lattice: &Lattice, a: &AmpleList, h: &LatticeVector) -> Result<bool> {
    if lattice.norm(h) != 2 {
        return Err(Error::InvalidParams(format!("polarization must have norm 2, got {}", lattice.norm(h))));
    }
    Ok(chamber_contains(lattice, a, h)? && set_f(lattice, h)?.is_empty())
}

/// `ℛ⁺(h)`: the roots orthogonal to `h` with positive lexicographic sign.
pub fn positive_roots_of(lattice: &Lattice, a: &AmpleList, h: &LatticeVector) -> Result<Vec<LatticeVector>> {
    let mut out = Vec::new();
    for r in set_r(lattice, h)? {
        match a.lex_sign(&r) {
            LexSign::Positive => out.push(r),
            LexSign::Negative => {}
            LexSign::Zero => return Err(Error::InvalidParams("ample list does not separate ℛ(h)".into())),
        }
    }
    Ok(out)
}

/// Indecomposable elements of a positive system: those that are not the sum
/// of two positive roots.
pub fn simple_roots(positive: &[LatticeVector]) -> Vec<LatticeVector> {
    let set: HashSet<&LatticeVector> = positive.iter().collect();
    let mut decomposable: HashSet<LatticeVector> = HashSet::new();
    for (i, x) in positive.iter().enumerate() {
        for y in &positive[i + 1..] {
            let s = x.add(y);
            if set.contains(&s) {
                decomposable.insert(s);
            }
        }
    }
    let mut out: Vec<LatticeVector> = positive.iter().filter(|r| !decomposable.contains(*r)).cloned().collect();
    out.sort();
    out
}

/// Successive detection in increasing order of pairings with the ample
/// list: a root is new unless subtracting an already detected root leaves
/// a positive root.
pub fn simple_roots_incremental(a: &AmpleList, positive: &[LatticeVector]) -> Vec<LatticeVector> {
    let mut ordered: Vec<(Vec<i128>, &LatticeVector)> = positive.iter().map(|r| (a.pairings(r), r)).collect();
    ordered.sort();
    let set: HashSet<&LatticeVector> = positive.iter().collect();
    let mut found: Vec<LatticeVector> = Vec::new();
    for (_, r) in ordered {
        if !found.iter().any(|e| set.contains(&r.sub(e))) {
            found.push(r.clone());
        }
    }
    found.sort();
    found
}

/// `𝓔(h)` split into labeled connected components, sorted by type.
pub fn exceptional_classes(
    lattice: &Lattice,
    a: &AmpleList,
    h: &LatticeVector,
    tie: TieBreak,
) -> Result<Vec<AdeComponent>> {
    let positive = positive_roots_of(lattice, a, h)?;
    let simple = simple_roots(&positive);
    if cfg!(debug_assertions) {
        debug_assert_eq!(simple, simple_roots_incremental(a, &positive));
    }
    components_of(lattice, &simple, tie)
}

pub fn components_of(lattice: &Lattice, simple: &[LatticeVector], tie: TieBreak) -> Result<Vec<AdeComponent>> {
    let n = simple.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            match lattice.inner(&simple[i], &simple[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                x => return Err(Error::NotAde(format!("simple roots pair to {x}"))),
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let roots: Vec<LatticeVector> = comp.iter().map(|&i| simple[i].clone()).collect();
        out.push(classify_component(lattice, &roots, tie)?);
    }
    out.sort_by(|x, y| x.kind.cmp(&y.kind).then_with(|| x.roots.cmp(&y.roots)));
    Ok(out)
}

/// Type and standard labels of a connected set of simple roots.
pub fn classify_component(lattice: &Lattice, roots: &[LatticeVector], tie: TieBreak) -> Result<AdeComponent> {
    let n = roots.len();
    if n == 0 {
        return Err(Error::NotAde("empty component".into()));
    }
    let mut adj = vec![Vec::new(); n];
    let mut edges = 0;
    for i in 0..n {
        if lattice.norm(&roots[i]) != -2 {
            return Err(Error::NotAde("component contains a non-root".into()));
        }
        for j in i + 1..n {
            match lattice.inner(&roots[i], &roots[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                    edges += 1;
                }
                x => return Err(Error::NotAde(format!("roots pair to {x}"))),
            }
        }
    }
    if edges != n - 1 {
        return Err(Error::NotAde("diagram is not a tree".into()));
    }
    if adj.iter().any(|a| a.len() > 3) {
        return Err(Error::NotAde("node of degree at least 4".into()));
    }
    let branches: Vec<usize> = (0..n).filter(|&i| adj[i].len() == 3).collect();
    let prefer = |x: &[usize], y: &[usize]| -> bool {
        // whether x should be chosen over y
        let kx: Vec<&LatticeVector> = x.iter().map(|&i| &roots[i]).collect();
        let ky: Vec<&LatticeVector> = y.iter().map(|&i| &roots[i]).collect();
        match tie {
            TieBreak::LexSmallest => kx <= ky,
            TieBreak::LexLargest => kx >= ky,
        }
    };
    let walk = |from: usize, first: usize| -> Vec<usize> {
        let mut path = vec![first];
        let (mut prev, mut cur) = (from, first);
        loop {
            let next: Vec<usize> = adj[cur].iter().copied().filter(|&j| j != prev).collect();
            match next.as_slice() {
                [] => return path,
                [nx] => {
                    path.push(*nx);
                    prev = cur;
                    cur = *nx;
                }
                _ => unreachable!("single branch node"),
            }
        }
    };
    let order: Vec<usize>;
    let kind;
    match branches.as_slice() {
        [] => {
            let ends: Vec<usize> = (0..n).filter(|&i| adj[i].len() <= 1).collect();
            let chain = |s: usize| -> Vec<usize> {
                if n == 1 {
                    vec![s]
                } else {
                    let mut p = vec![s];
                    p.extend(walk(s, adj[s][0]));
                    p
                }
            };
            let forward = chain(ends[0]);
            let mut backward = forward.clone();
            backward.reverse();
            // compare by the first label only, as the direction is fixed by it
            order = if prefer(&forward[..1], &backward[..1]) { forward } else { backward };
            kind = AdeType::A(n);
        }
        [b] => {
            let b = *b;
            let mut arms: Vec<Vec<usize>> = adj[b].iter().map(|&j| walk(b, j)).collect();
            arms.sort_by_key(|a| a.len());
            let lens: Vec<usize> = arms.iter().map(|a| a.len()).collect();
            let pick_pair = |x: Vec<usize>, y: Vec<usize>| if prefer(&x, &y) { (x, y) } else { (y, x) };
            match lens.as_slice() {
                [1, 1, k] => {
                    let (mut shorts, long): (Vec<Vec<usize>>, Vec<usize>) = if *k == 1 {
                        // D4: the long arm is the least preferred of the three
                        let mut all = arms.clone();
                        all.sort_by(|x, y| {
                            if prefer(x, y) {
                                std::cmp::Ordering::Less
                            } else {
                                std::cmp::Ordering::Greater
                            }
                        });
                        let long = all.pop().unwrap();
                        (all, long)
                    } else {
                        (vec![arms[0].clone(), arms[1].clone()], arms[2].clone())
                    };
                    let (d1, d2) = pick_pair(shorts.remove(0), shorts.remove(0));
                    let mut o = vec![d1[0], d2[0], b];
                    o.extend(long);
                    order = o;
                    kind = AdeType::D(n);
                }
                [1, 2, k @ 2..=4] => {
                    let (mid, long) = if *k == 2 {
                        pick_pair(arms[1].clone(), arms[2].clone())
                    } else {
                        (arms[1].clone(), arms[2].clone())
                    };
                    // e1, then e2–e3 with e3 next to e4, then e4 and the long arm
                    order = [vec![arms[0][0], mid[1], mid[0], b], long].concat();
                    kind = AdeType::E(n);
                }
                _ => return Err(Error::NotAde(format!("branch arms {lens:?}"))),
            }
        }
        _ => return Err(Error::NotAde("more than one branch node".into())),
    }
    Ok(AdeComponent { kind, roots: order.into_iter().map(|i| roots[i].clone()).collect() })
}

/// Image index of label `i` (0-based) under the Galois involution.
pub fn tau_action(kind: AdeType) -> Vec<usize> {
    let n = kind.rank();
    let mut perm: Vec<usize> = (0..n).collect();
    match kind {
        AdeType::A(_) => perm.reverse(),
        AdeType::D(m) if m % 2 == 1 => perm.swap(0, 1),
        AdeType::D(_) => {}
        AdeType::E(6) => {
            for i in 2..=6 {
                perm[i - 1] = 8 - i - 1;
            }
        }
        AdeType::E(_) => {}
    }
    perm
}

/// `M(h) = 2·P_W − I` where `W` is spanned by `h` and all `r + r^τ`.
pub fn involution_matrix(lattice: &Lattice, h: &LatticeVector, components: &[AdeComponent]) -> Result<IntMatrix> {
    let mut spanning: Vec<LatticeVector> = vec![h.clone()];
    for c in components {
        let perm = tau_action(c.kind);
        for (i, r) in c.roots.iter().enumerate() {
            spanning.push(r.add(&c.roots[perm[i]]));
        }
    }
    let rows: Vec<Vec<BigRational>> =
        spanning.iter().map(|v| v.0.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let (kept, _) = independent_rows(&rows);
    let basis: Vec<LatticeVector> = kept.into_iter().map(|i| spanning[i].clone()).collect();
    projection_reflection(lattice, &basis)
}

/// `2·P_W − I` for `W` spanned by the independent rows `basis`.
fn projection_reflection(lattice: &Lattice, basis: &[LatticeVector]) -> Result<IntMatrix> {
    let n = lattice.rank();
    let b = IntMatrix::from_rows(&basis.iter().map(|v| v.0.clone()).collect::<Vec<_>>());
    let gb = lattice.gram() * &b.transpose(); // n × w
    let gw = &b * &gb;
    let gw_inv = inverse_rational(&gw).map_err(|_| Error::Singular)?;
    let w = basis.len();
    // t = G Bᵀ G_W⁻¹ (n × w, rational)
    let mut t = vec![vec![BigRational::zero(); w]; n];
    for i in 0..n {
        for k in 0..w {
            let x = gb.get(i, k);
            if x.is_zero() {
                continue;
            }
            let xr = BigRational::from_integer(x.clone());
            for j in 0..w {
                t[i][j] += &xr * &gw_inv[k][j];
            }
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = BigRational::zero();
            for k in 0..w {
                let bk = b.get(k, j);
                if !bk.is_zero() {
                    s += &t[i][k] * BigRational::from_integer(bk.clone());
                }
            }
            let mut v = &two * s;
            if i == j {
                v -= BigRational::one();
            }
            if !v.is_integer() {
                return Err(Error::NonIntegral(format!("M({i},{j}) = {v}")));
            }
            m.set(i, j, v.to_integer());
        }
    }
    Ok(m)
}

/// `x ↦ ⟨x,h⟩h − x`.
pub fn smooth_branch_matrix(lattice: &Lattice, h: &LatticeVector) -> Result<IntMatrix> {
    if lattice.norm(h) != 2 {
        return Err(Error::InvalidParams("polarization must have norm 2".into()));
    }
    let n = lattice.rank();
    let gh = lattice.pairing_row(h);
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = gh[i] as i128 * h.0[j] as i128;
            if i == j {
                v -= 1;
            }
            m.set(i, j, BigInt::from(v));
        }
    }
    Ok(m)
}

/// Canonical type sum such as `2A1+A7+A9`.
pub fn singularity_string(components: &[AdeComponent]) -> String {
    let mut counts: BTreeMap<AdeType, usize> = BTreeMap::new();
    for c in components {
        *counts.entry(c.kind).or_default() += 1;
    }
    if counts.is_empty() {
        return "smooth".into();
    }
    counts
        .into_iter()
        .map(|(k, c)| if c == 1 { k.to_string() } else { format!("{c}{k}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// Full record for a polarization in `D(𝒂)`.
pub fn involution_record(lattice: &Lattice, a: &AmpleList, h: &LatticeVector) -> Result<InvolutionRecord> {
    let components = exceptional_classes(lattice, a, h, TieBreak::default())?;
    let matrix = if components.is_empty() {
        smooth_branch_matrix(lattice, h)?
    } else {
        involution_matrix(lattice, h, &components)?
    };
    let record = InvolutionRecord { h: h.clone(), singularities: singularity_string(&components), components, matrix };
    record.check_invariants(lattice)?;
    Ok(record)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvolutionJson {
    pub h: Vec<IntLike>,
    pub singularities: String,
    pub matrix: Vec<Vec<IntLike>>,
}

impl From<&InvolutionRecord> for InvolutionJson {
    fn from(r: &InvolutionRecord) -> Self {
        InvolutionJson {
            h: r.h.0.iter().map(|&x| IntLike::from(x)).collect(),
            singularities: r.singularities.clone(),
            matrix: r.matrix.to_rows().into_iter().map(|row| row.into_iter().map(IntLike::from).collect()).collect(),
        }
    }
}

impl InvolutionJson {
    /// Matrix and polarization; ADE labels are not serialized.
    pub fn parts(&self) -> Result<(LatticeVector, IntMatrix)> {
        Ok((parse_int_vector(&self.h)?, parse_int_matrix(&self.matrix)?))
    }
}

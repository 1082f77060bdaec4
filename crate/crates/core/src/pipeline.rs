//! End-to-end searches: involution pools, random words of involutions with
//! an irreducible Salem characteristic polynomial, the explicit σ = 10
//! construction, the `p = 7` example and entropy sweeps.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chamber::{send_to_chamber, AmpleList, DEFAULT_TIE_RETRIES};
use crate::enumerate::{r_and_f_empty, set_f, set_r, set_s_is_empty, AffineSlicer};
use crate::error::{Error, Result};
use crate::involution::{check_involution, involution_record, is_polarization_deg2, smooth_branch_matrix, InvolutionJson, InvolutionRecord};
use crate::io::IntLike;
use crate::lattice::LatticeVector;
use crate::linalg::{char_poly, IntMatrix};
use crate::poly::{IntPolynomial, PolyJson};
use crate::reference::{x7_reference, Sigma10Vector};
use crate::rs::{build_lambda_with, gram_h, random_square2, standard_ample_list, RsLattice, RsParams, SampleConfig, RANK};
use crate::salem::{
    enclosure_is_valid, salem_check, CertificateJson, Rejection, SalemCertificate, SalemContext, DEFAULT_PRIME_BUDGET,
    DEFAULT_ROOT_TOL,
};

pub const MAX_WORD_LENGTH: usize = 22;

/// Largest `a` in `(a, 1, v)` drawn by the σ = 10 search.
pub const SIGMA10_MAX_A: i64 = 3;

/// Candidates drawn per parallel (iv) check, independent of the thread count.
const SIGMA10_DRAW_BATCH: usize = 64;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub p: i64,
    pub sigma: u32,
    pub seed: u64,
    pub pool_size: usize,
    pub max_word_length: usize,
    pub trial_budget: u64,
    pub time_budget: Option<Duration>,
    pub q_gamma: Option<(i64, i64)>,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    pub sample: SampleConfig,
    /// Candidate vectors drawn while filling the pool.
    pub pool_attempts: usize,
    pub prime_budget: usize,
    pub root_tol: f64,
}

impl SearchConfig {
    pub fn new(p: i64, sigma: u32, seed: u64) -> Self {
        SearchConfig {
            p,
            sigma,
            seed,
            pool_size: 64,
            max_word_length: MAX_WORD_LENGTH,
            trial_budget: 100_000,
            time_budget: None,
            q_gamma: None,
            threads: 0,
            sample: SampleConfig::default(),
            pool_attempts: 4096,
            prime_budget: DEFAULT_PRIME_BUDGET,
            root_tol: DEFAULT_ROOT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_WORD_LENGTH).contains(&self.max_word_length) {
            return Err(Error::InvalidParams(format!(
                "maximal word length must lie in 2..={MAX_WORD_LENGTH}, got {}",
                self.max_word_length
            )));
        }
        if self.pool_size == 0 {
            return Err(Error::InvalidParams("pool size must be positive".into()));
        }
        self.params().map(|_| ())
    }

    pub fn params(&self) -> Result<RsParams> {
        match self.q_gamma {
            Some((q, g)) => RsParams::with_q_gamma(self.p, self.sigma, q, g),
            None => RsParams::new(self.p, self.sigma),
        }
    }
}

/// Independent stream seeds derived from a master seed (splitmix64).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn batch_size(threads: usize) -> usize {
    let t = if threads == 0 { rayon::current_num_threads() } else { threads };
    t.max(1) * 4
}

pub struct Pool {
    pub rs: RsLattice,
    pub ample: AmpleList,
    pub records: Vec<InvolutionRecord>,
    pub attempts: usize,
}

/// Lattice and ample list `[h₀, p·e₁^∨, …]` with `h₀ = u₁ + u₂`.
pub fn search_context(config: &SearchConfig) -> Result<(RsLattice, AmpleList)> {
    let rs = build_lambda_with(config.params()?)?;
    let ample = standard_ample_list(&rs, rs.h0())?;
    ample.positive_roots(&rs.lattice)?;
    Ok((rs, ample))
}

fn pool_candidate(rs: &RsLattice, ample: &AmpleList, config: &SearchConfig, index: u64) -> Result<Option<InvolutionRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1, index));
    let mut v = random_square2(rs, &mut rng, &config.sample)?;
    if rs.lattice.inner(&v, ample.h0()) < 0 {
        v = v.neg();
    }
    if !set_f(&rs.lattice, &v)?.is_empty() {
        return Ok(None);
    }
    let img = match send_to_chamber(&rs.lattice, ample, &v, &mut rng, DEFAULT_TIE_RETRIES) {
        Ok(img) => img,
        Err(Error::Exhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    involution_record(&rs.lattice, ample, &img.h).map(Some)
}

/// Draws norm-2 vectors, moves them into `D(𝒂)` and keeps the distinct
/// polarizations with their involution matrices.
pub fn generate_involution_pool(config: &SearchConfig) -> Result<Pool> {
    config.validate()?;
    let (rs, ample) = search_context(config)?;
    let start = Instant::now();
    let batch = batch_size(config.threads);
    let (records, attempts) = with_threads(config.threads, || -> Result<(Vec<InvolutionRecord>, usize)> {
        let mut records: Vec<InvolutionRecord> = Vec::new();
        let mut seen: HashSet<LatticeVector> = HashSet::new();
        let mut next = 0usize;
        let mut used = 0usize;
        while records.len() < config.pool_size && next < config.pool_attempts {
            if config.time_budget.is_some_and(|t| start.elapsed() > t) {
                break;
            }
            let end = (next + batch).min(config.pool_attempts);
            let results: Vec<Result<Option<InvolutionRecord>>> =
                (next..end).into_par_iter().map(|i| pool_candidate(&rs, &ample, config, i as u64)).collect();
            for (i, r) in (next..end).zip(results) {
                if records.len() == config.pool_size {
                    break;
                }
                used = i + 1;
                if let Some(rec) = r? {
                    if seen.insert(rec.h.clone()) {
                        records.push(rec);
                    }
                }
            }
            next = end;
        }
        Ok((records, used))
    })??;
    if records.len() < 2 {
        return Err(Error::Exhausted(format!("only {} involutions after {attempts} draws", records.len())));
    }
    Ok(Pool { rs, ample, records, attempts })
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub params: RsParams,
    pub seed: u64,
    pub trial: u64,
    /// Indices into `involutions`, multiplied left to right.
    pub word: Vec<usize>,
    pub pool_indices: Vec<usize>,
    pub involutions: Vec<InvolutionRecord>,
    pub charpoly: IntPolynomial,
    pub certificate: SalemCertificate,
    pub base_k: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub trials: u64,
    pub elapsed: Duration,
    pub rejections: BTreeMap<String, u64>,
}

pub enum SearchOutcome {
    Accepted(Box<SearchResult>, SearchStats),
    Exhausted(SearchStats),
}

/// Product `M_{i₁}⋯M_{i_ν}`.
pub fn word_product(matrices: &[&IntMatrix]) -> IntMatrix {
    let n = matrices.first().map(|m| m.rows()).unwrap_or(RANK);
    matrices.iter().fold(IntMatrix::identity(n), |acc, m| &acc * *m)
}

fn rejection_key(r: &Rejection) -> String {
    match r {
        Rejection::RootCounts { .. } => "root-counts".into(),
        Rejection::Cyclotomic(_) => "cyclotomic".into(),
        other => other.to_string(),
    }
}

fn trial_word(config: &SearchConfig, pool_len: usize, trial: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 2, trial));
    let len = rng.gen_range(2..=config.max_word_length);
    // adjacent letters differ, since each generator is an involution
    let mut word: Vec<usize> = Vec::with_capacity(len);
    for _ in 0..len {
        let next = match word.last() {
            Some(&prev) => (prev + rng.gen_range(1..pool_len)) % pool_len,
            None => rng.gen_range(0..pool_len),
        };
        word.push(next);
    }
    word
}

type TrialOutcome = std::result::Result<(IntPolynomial, SalemCertificate), Rejection>;

fn run_trial(pool: &Pool, config: &SearchConfig, word: &[usize]) -> Result<TrialOutcome> {
    let mats: Vec<&IntMatrix> = word.iter().map(|&i| &pool.records[i].matrix).collect();
    let m = word_product(&mats);
    let cp = char_poly(&m)?;
    Ok(salem_check(&cp, SalemContext::FromK3Automorphism, config.prime_budget, config.root_tol)?.map(|c| (cp, c)))
}

/// Random words over the pool until the characteristic polynomial of the
/// product is an irreducible Salem polynomial of degree 22. The accepted
/// word is the one with the smallest trial index, independent of threads.
pub fn search_irreducible_salem(config: &SearchConfig, pool: &Pool) -> Result<SearchOutcome> {
    config.validate()?;
    if pool.records.len() < 2 {
        return Err(Error::InvalidParams("the involution pool needs at least two members".into()));
    }
    let start = Instant::now();
    let batch = batch_size(config.threads) as u64 * 4;
    with_threads(config.threads, || -> Result<SearchOutcome> {
        let mut stats = SearchStats::default();
        let mut next = 0u64;
        while next < config.trial_budget {
            if config.time_budget.is_some_and(|t| start.elapsed() > t) {
                break;
            }
            let end = (next + batch).min(config.trial_budget);
            let results: Vec<(u64, Vec<usize>, Result<TrialOutcome>)> = (next..end)
                .into_par_iter()
                .map(|t| {
                    let word = trial_word(config, pool.records.len(), t);
                    let out = run_trial(pool, config, &word);
                    (t, word, out)
                })
                .collect();
            next = end;
            for (t, word, out) in results {
                stats.trials += 1;
                match out? {
                    Ok((cp, cert)) => {
                        stats.elapsed = start.elapsed();
                        let result = assemble_result(pool, config, t, &word, cp, cert);
                        return Ok(SearchOutcome::Accepted(Box::new(result), stats));
                    }
                    Err(r) => *stats.rejections.entry(rejection_key(&r)).or_default() += 1,
                }
            }
        }
        stats.elapsed = start.elapsed();
        Ok(SearchOutcome::Exhausted(stats))
    })?
}

fn assemble_result(
    pool: &Pool,
    config: &SearchConfig,
    trial: u64,
    word: &[usize],
    charpoly: IntPolynomial,
    certificate: SalemCertificate,
) -> SearchResult {
    let mut pool_indices: Vec<usize> = word.to_vec();
    pool_indices.sort_unstable();
    pool_indices.dedup();
    let local: Vec<usize> = word.iter().map(|i| pool_indices.binary_search(i).expect("present")).collect();
    SearchResult {
        params: pool.rs.params,
        seed: config.seed,
        trial,
        word: local,
        involutions: pool_indices.iter().map(|&i| pool.records[i].clone()).collect(),
        pool_indices,
        charpoly,
        certificate,
        base_k: None,
    }
}

/// Pool generation followed by the word search.
pub fn run_search(config: &SearchConfig) -> Result<SearchOutcome> {
    let pool = generate_involution_pool(config)?;
    search_irreducible_salem(config, &pool)
}

// ---------------------------------------------------------------------------
// σ = 10

#[derive(Clone, Debug)]
pub enum Sigma10Source {
    Vectors(Vec<Sigma10Vector>),
    Search { seed: u64, max_attempts: usize },
}

#[derive(Clone, Debug)]
pub struct Sigma10Config {
    pub p: i64,
    pub source: Sigma10Source,
    /// 1-based index of the base vector used for the extensions; `None`
    /// tries all six in order.
    pub base_k: Option<usize>,
    pub q_gamma: Option<(i64, i64)>,
    pub prime_budget: usize,
    pub root_tol: f64,
    pub threads: usize,
}

impl Sigma10Config {
    pub fn new(p: i64, source: Sigma10Source) -> Self {
        Sigma10Config {
            p,
            source,
            base_k: None,
            q_gamma: None,
            prime_budget: DEFAULT_PRIME_BUDGET,
            root_tol: DEFAULT_ROOT_TOL,
            threads: 0,
        }
    }

    pub fn lattice(&self) -> Result<RsLattice> {
        let params = match self.q_gamma {
            Some((q, g)) => RsParams::with_q_gamma(self.p, 10, q, g)?,
            None => RsParams::new(self.p, 10)?,
        };
        build_lambda_with(params)
    }
}

/// `(a, 1, v)`: `a·u₁ + u₂ + v` with `v` in the `H` summand.
pub fn sigma10_vector(x: &Sigma10Vector) -> LatticeVector {
    let mut n = vec![0i64; RANK - 2];
    n[..4].copy_from_slice(&x.v);
    RsLattice::compose(x.a, 1, &n)
}

/// `h₁…h₆` followed by `(a_k+1, 1, v_k) + e_ν` and `(a_k+1, 1, v_k) + e′_ν`.
pub fn sigma10_family(base: &[Sigma10Vector], k: usize) -> Result<Vec<LatticeVector>> {
    if base.len() != 6 {
        return Err(Error::InvalidParams(format!("expected six base vectors, got {}", base.len())));
    }
    if !(1..=6).contains(&k) {
        return Err(Error::InvalidParams(format!("base index must lie in 1..=6, got {k}")));
    }
    let mut out: Vec<LatticeVector> = base.iter().map(sigma10_vector).collect();
    let shifted = sigma10_vector(&Sigma10Vector { a: base[k - 1].a + 1, v: base[k - 1].v });
    for block in 0..2 {
        for nu in 0..8 {
            let mut h = shifted.clone();
            h.0[RsLattice::e8_offset(block) + nu] += 1;
            out.push(h);
        }
    }
    Ok(out)
}

/// Checks (i) norm 2, (iv) `ℛ(h_i) = ℱ(h_i) = ∅`, (ii) `⟨h₁,h_i⟩ > 0` and
/// (iii) `𝒮(h₁,h_i) = ∅`; reports the first failing index (1-based).
pub fn sigma10_check_properties(rs: &RsLattice, hs: &[LatticeVector]) -> Result<()> {
    let l = &rs.lattice;
    let Some(h1) = hs.first() else { return Err(Error::InvalidParams("no vectors".into())) };
    let failures: Vec<Option<String>> = hs
        .par_iter()
        .enumerate()
        .map(|(i, h)| -> Result<Option<String>> {
            let idx = i + 1;
            if l.norm(h) != 2 {
                return Ok(Some(format!("(i) fails for h{idx}: norm {}", l.norm(h))));
            }
            if !r_and_f_empty(l, h)? {
                return Ok(Some(format!("(iv) fails for h{idx}")));
            }
            if i > 0 {
                if l.inner(h1, h) <= 0 {
                    return Ok(Some(format!("(ii) fails for h{idx}")));
                }
                if !set_s_is_empty(l, h1, h)? {
                    return Ok(Some(format!("(iii) fails for h{idx}")));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    match failures.into_iter().flatten().next() {
        Some(msg) => Err(Error::PropertyFailed(msg)),
        None => Ok(()),
    }
}

/// Property (v): the product of the 22 smooth involutions in order.
pub fn sigma10_salem(
    rs: &RsLattice,
    hs: &[LatticeVector],
    config: &Sigma10Config,
) -> Result<(Vec<InvolutionRecord>, IntPolynomial, std::result::Result<SalemCertificate, Rejection>)> {
    let records: Vec<InvolutionRecord> = hs
        .iter()
        .map(|h| {
            let m = smooth_branch_matrix(&rs.lattice, h)?;
            check_involution(&rs.lattice, h, &m)?;
            Ok(InvolutionRecord { h: h.clone(), components: vec![], matrix: m, singularities: "smooth".into() })
        })
        .collect::<Result<_>>()?;
    let m = word_product(&records.iter().map(|r| &r.matrix).collect::<Vec<_>>());
    let cp = char_poly(&m)?;
    let cert = salem_check(&cp, SalemContext::FromK3Automorphism, config.prime_budget, config.root_tol)?;
    Ok((records, cp, cert))
}

#[derive(Clone, Debug)]
pub struct Sigma10Outcome {
    pub result: SearchResult,
    pub base_k: usize,
    pub vectors: Vec<Sigma10Vector>,
    /// Per tried base index, the reason it was rejected.
    pub rejected_k: Vec<(usize, String)>,
}

/// Properties (i) and (ii), which need no enumeration.
fn cheap_property_failure(rs: &RsLattice, hs: &[LatticeVector]) -> Option<String> {
    let l = &rs.lattice;
    for (i, h) in hs.iter().enumerate() {
        if l.norm(h) != 2 {
            return Some(format!("(i) fails for h{}: norm {}", i + 1, l.norm(h)));
        }
        if i > 0 && l.inner(&hs[0], h) <= 0 {
            return Some(format!("(ii) fails for h{}", i + 1));
        }
    }
    None
}

/// Tries each base index: (i), (ii), then (v), then the enumeration-based
/// (iii) and (iv).
fn try_base_choices(
    rs: &RsLattice,
    base: &[Sigma10Vector],
    config: &Sigma10Config,
) -> Result<std::result::Result<Sigma10Outcome, Vec<(usize, String)>>> {
    let ks: Vec<usize> = match config.base_k {
        Some(k) => vec![k],
        None => (1..=6).collect(),
    };
    let mut rejected = Vec::new();
    for k in ks {
        let hs = sigma10_family(base, k)?;
        if let Some(msg) = cheap_property_failure(rs, &hs) {
            rejected.push((k, msg));
            continue;
        }
        let (records, cp, cert) = sigma10_salem(rs, &hs, config)?;
        let cert = match cert {
            Ok(cert) => cert,
            Err(r) => {
                rejected.push((k, format!("(v) fails: {r}")));
                continue;
            }
        };
        match sigma10_check_properties(rs, &hs) {
            Ok(()) => {}
            Err(Error::PropertyFailed(msg)) => {
                rejected.push((k, msg));
                continue;
            }
            Err(e) => return Err(e),
        }
        let n = records.len();
        let result = SearchResult {
            params: rs.params,
            seed: match config.source {
                Sigma10Source::Search { seed, .. } => seed,
                Sigma10Source::Vectors(_) => 0,
            },
            trial: 0,
            word: (0..n).collect(),
            pool_indices: (0..n).collect(),
            involutions: records,
            charpoly: cp,
            certificate: cert,
            base_k: Some(k),
        };
        return Ok(Ok(Sigma10Outcome { result, base_k: k, vectors: base.to_vec(), rejected_k: rejected }));
    }
    Ok(Err(rejected))
}

/// Builds the 22 smooth polarizations and certifies the Salem property of
/// their product, either from given vectors or from a seeded search.
pub fn sigma10_construct(config: &Sigma10Config) -> Result<Sigma10Outcome> {
    let rs = config.lattice()?;
    with_threads(config.threads, || match &config.source {
        Sigma10Source::Vectors(base) => match try_base_choices(&rs, base, config)? {
            Ok(out) => Ok(out),
            Err(rejected) => Err(Error::PropertyFailed(
                rejected.iter().map(|(k, m)| format!("k={k}: {m}")).collect::<Vec<_>>().join("; "),
            )),
        },
        Sigma10Source::Search { seed, max_attempts } => sigma10_search(&rs, config, *seed, *max_attempts),
    })?
}

/// Seeded stream of vectors `(a, 1, v)` of norm 2. Each draw picks a random
/// `a ≤ max_a` and a random slice `⟨x, η₁⟩ = c`, enumerates the slice
/// exactly on first visit, and takes one of its vectors at random.
struct Sigma10Stream<'a> {
    rs: &'a RsLattice,
    slicer: AffineSlicer<'a>,
    rng: ChaCha8Rng,
    /// Per `a`: unvisited slice values and partially consumed slices.
    fresh: Vec<Vec<i64>>,
    open: Vec<Vec<Vec<Sigma10Vector>>>,
}

impl<'a> Sigma10Stream<'a> {
    fn new(rs: &'a RsLattice, seed: u64, max_a: i64) -> Result<Self> {
        let mut against = vec![LatticeVector::unit(RANK, 0), LatticeVector::unit(RANK, 1), LatticeVector::unit(RANK, 2)];
        against.extend((6..RANK).map(|i| LatticeVector::unit(RANK, i)));
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3, 0));
        let fresh: Vec<Vec<i64>> = (1..=max_a)
            .map(|a| {
                // |⟨x, η₁⟩|² ≤ |η₁²|·|v²| = 2(2pa − 2)
                let bound = ((4 * (rs.params.p * a - 1)) as f64).sqrt().floor() as i64;
                let mut cs: Vec<i64> = (-bound..=bound).collect();
                cs.shuffle(&mut rng);
                cs
            })
            .collect();
        let open = vec![Vec::new(); fresh.len()];
        Ok(Sigma10Stream { rs, slicer: AffineSlicer::new(&rs.lattice, &against)?, rng, fresh, open })
    }

    fn enumerate_slice(&self, a: i64, c: i64) -> Result<Vec<Sigma10Vector>> {
        let p = self.rs.params.p;
        let mut values = vec![p, a * p, c];
        values.extend(std::iter::repeat_n(0, RANK - 6));
        Ok(self
            .slicer
            .enumerate(&values, 2)?
            .into_iter()
            .map(|x| Sigma10Vector { a: x.0[0], v: [x.0[2], x.0[3], x.0[4], x.0[5]] })
            .collect())
    }

    fn draw(&mut self) -> Result<Option<Sigma10Vector>> {
        loop {
            let live: Vec<usize> =
                (0..self.fresh.len()).filter(|&i| !self.fresh[i].is_empty() || !self.open[i].is_empty()).collect();
            let Some(&i) = live.choose(&mut self.rng) else { return Ok(None) };
            let n_open = self.open[i].len();
            let slot = self.rng.gen_range(0..n_open + self.fresh[i].len());
            let j = if slot < n_open {
                slot
            } else {
                let c = self.fresh[i].pop().expect("nonempty");
                let mut found = self.enumerate_slice(i as i64 + 1, c)?;
                if found.is_empty() {
                    continue;
                }
                found.shuffle(&mut self.rng);
                self.open[i].push(found);
                n_open
            };
            let x = self.open[i][j].pop().expect("slices are nonempty");
            if self.open[i][j].is_empty() {
                self.open[i].swap_remove(j);
            }
            return Ok(Some(x));
        }
    }

    fn take(&mut self, n: usize) -> Result<Vec<Sigma10Vector>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.draw()? {
                Some(x) => out.push(x),
                None => break,
            }
        }
        Ok(out)
    }
}

/// Draws candidates passing (iv), then for each anchor `h₁` in draw order
/// greedily adds compatible vectors; a full set of six is tested with every
/// base index before its last member is replaced. The candidate set doubles
/// until `max_attempts` vectors have been drawn.
fn sigma10_search(rs: &RsLattice, config: &Sigma10Config, seed: u64, max_attempts: usize) -> Result<Sigma10Outcome> {
    let l = &rs.lattice;
    let mut stream = Sigma10Stream::new(rs, seed, SIGMA10_MAX_A)?;
    let mut cands: Vec<Sigma10Vector> = Vec::new();
    let mut tried_anchors = 0usize;
    let mut target = 16usize;
    let mut drawn = 0usize;
    loop {
        let mut exhausted = false;
        while cands.len() < target && drawn < max_attempts {
            let chunk = stream.take(SIGMA10_DRAW_BATCH.min(max_attempts - drawn))?;
            if chunk.is_empty() {
                exhausted = true;
                break;
            }
            drawn += chunk.len();
            let keep: Vec<bool> =
                chunk.par_iter().map(|c| r_and_f_empty(l, &sigma10_vector(c))).collect::<Result<_>>()?;
            cands.extend(chunk.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c));
        }
        for anchor in tried_anchors..cands.len() {
            let h1 = sigma10_vector(&cands[anchor]);
            let compatible: Vec<bool> = cands
                .par_iter()
                .enumerate()
                .map(|(j, c)| {
                    if j == anchor {
                        return Ok(false);
                    }
                    let h = sigma10_vector(c);
                    Ok(l.inner(&h1, &h) > 0 && set_s_is_empty(l, &h1, &h)?)
                })
                .collect::<Result<_>>()?;
            let mut chosen = vec![cands[anchor].clone()];
            for (j, c) in cands.iter().enumerate() {
                if !compatible[j] {
                    continue;
                }
                chosen.push(c.clone());
                if chosen.len() == 6 {
                    if let Ok(out) = try_base_choices(rs, &chosen, config)? {
                        return Ok(out);
                    }
                    chosen.pop();
                }
            }
        }
        tried_anchors = cands.len();
        if exhausted || drawn >= max_attempts {
            break;
        }
        target *= 2;
    }
    Err(Error::Exhausted(format!("no σ=10 construction for p = {} in {drawn} draws", rs.params.p)))
}

// ---------------------------------------------------------------------------
// p = 7 worked example

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn first_difference(a: &IntMatrix, b: &IntMatrix) -> String {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return format!("shape {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols());
    }
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a.get(i, j) != b.get(i, j) {
                return format!("entry ({i},{j}): {} vs {}", a.get(i, j), b.get(i, j));
            }
        }
    }
    "equal".into()
}

/// Reconstructs the `p = 7`, `σ = 1` example and compares every step with
/// the embedded reference data.
pub fn verify_worked_example() -> Result<Report> {
    let reference = x7_reference()?;
    let mut report = Report::default();
    let params = RsParams::new(reference.p, reference.sigma)?;
    let h = gram_h(&params)?;
    report.push("H(-7) Gram", h == reference.h_gram, first_difference(&h, &reference.h_gram));
    let rs = build_lambda_with(params)?;
    let l = &rs.lattice;
    let h0 = reference.h0.clone();
    let roots = set_r(l, &h0)?;
    report.push("|R(h0)|", roots.len() == reference.r_h0_count, format!("{} roots", roots.len()));
    let f0 = set_f(l, &h0)?;
    report.push("h0 is not a polarization", !f0.is_empty(), format!("|F(h0)| = {}", f0.len()));
    let ample = standard_ample_list(&rs, h0)?;
    let mut matrices = Vec::new();
    for (i, pol) in reference.polarizations.iter().enumerate() {
        let n = i + 1;
        let is_pol = is_polarization_deg2(l, &ample, &pol.h)?;
        report.push(format!("h{n} in D(a), F(h{n}) empty"), is_pol, "");
        let rec = involution_record(l, &ample, &pol.h)?;
        report.push(
            format!("h{n} singularities"),
            rec.singularities == pol.singularities,
            format!("{} (expected {})", rec.singularities, pol.singularities),
        );
        report.push(format!("M(h{n})"), rec.matrix == pol.matrix, first_difference(&rec.matrix, &pol.matrix));
        matrices.push(rec.matrix);
    }
    let product = word_product(&matrices.iter().collect::<Vec<_>>());
    let cp = char_poly(&product)?;
    report.push("characteristic polynomial", cp == reference.charpoly, cp.to_string());
    match salem_check(&cp, SalemContext::Standalone, DEFAULT_PRIME_BUDGET, DEFAULT_ROOT_TOL)? {
        Ok(cert) => {
            let lambda = cert.lambda();
            report.push("Salem polynomial", true, cert.irreducibility.to_string());
            report.push(
                "leading root",
                (lambda - reference.lambda).abs() <= 1e-4,
                format!("{lambda:.8} (expected {})", reference.lambda),
            );
        }
        Err(r) => report.push("Salem polynomial", false, r.to_string()),
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// entropy sweep

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: i64,
    pub log_p: f64,
    pub lambda: String,
    pub entropy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFits {
    /// entropy = ln λ against ln p (identical for log10 λ against log10 p).
    pub natural: LinearFit,
    /// ln λ against log10 p.
    pub entropy_vs_log10_p: LinearFit,
    /// log10 λ against ln p.
    pub log10_lambda_vs_ln_p: LinearFit,
}

#[derive(Clone, Debug, Default)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(i64, String)>,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some(LinearFit { slope, intercept: my - slope * mx })
}

impl Sweep {
    pub fn fits(&self) -> Option<SweepFits> {
        let ln10 = std::f64::consts::LN_10;
        let xs: Vec<f64> = self.rows.iter().map(|r| r.log_p).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.entropy).collect();
        let natural = least_squares(&xs, &ys)?;
        let x10: Vec<f64> = xs.iter().map(|x| x / ln10).collect();
        let y10: Vec<f64> = ys.iter().map(|y| y / ln10).collect();
        Some(SweepFits {
            entropy_vs_log10_p: least_squares(&x10, &ys)?,
            log10_lambda_vs_ln_p: least_squares(&xs, &y10)?,
            natural,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,log_p,lambda_str,entropy\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.12},{},{:.12}\n", r.p, r.log_p, r.lambda, r.entropy));
        }
        s
    }
}

/// Runs the σ = 10 search for every prime; failures are recorded and the
/// sweep continues.
pub fn entropy_sweep(primes: &[i64], seed: u64, max_attempts: usize, threads: usize) -> Sweep {
    let mut sweep = Sweep::default();
    for &p in primes {
        let mut config = Sigma10Config::new(p, Sigma10Source::Search { seed: derive_seed(seed, 4, p as u64), max_attempts });
        config.threads = threads;
        match sigma10_construct(&config) {
            Ok(out) => {
                let c = &out.result.certificate;
                sweep.rows.push(SweepRow { p, log_p: (p as f64).ln(), lambda: c.lambda_string(), entropy: c.entropy });
            }
            Err(e) => sweep.failures.push((p, e.to_string())),
        }
    }
    sweep
}

// ---------------------------------------------------------------------------
// persistence and re-verification

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResultJson {
    pub p: IntLike,
    pub sigma: IntLike,
    pub q: IntLike,
    pub gamma: IntLike,
    pub seed: IntLike,
    pub trial: IntLike,
    pub word: Vec<IntLike>,
    pub pool_indices: Vec<IntLike>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_k: Option<IntLike>,
    pub involutions: Vec<InvolutionJson>,
    pub charpoly: PolyJson,
    pub certificate: CertificateJson,
    pub version: String,
}

impl From<&SearchResult> for SearchResultJson {
    fn from(r: &SearchResult) -> Self {
        let int = |x: i64| IntLike::from(x);
        SearchResultJson {
            p: int(r.params.p),
            sigma: int(r.params.sigma as i64),
            q: int(r.params.q),
            gamma: int(r.params.gamma),
            seed: IntLike(r.seed.into()),
            trial: IntLike(r.trial.into()),
            word: r.word.iter().map(|&i| int(i as i64)).collect(),
            pool_indices: r.pool_indices.iter().map(|&i| int(i as i64)).collect(),
            base_k: r.base_k.map(|k| int(k as i64)),
            involutions: r.involutions.iter().map(InvolutionJson::from).collect(),
            charpoly: PolyJson::from(&r.charpoly),
            certificate: CertificateJson::from(&r.certificate),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

fn small(x: &IntLike, what: &str) -> Result<i64> {
    use num_traits::ToPrimitive;
    x.0.to_i64().ok_or_else(|| Error::Format(format!("{what} out of range")))
}

/// Re-multiplies the stored matrices, re-derives the characteristic
/// polynomial and the certificate, and compares with the stored values.
pub fn verify_result(j: &SearchResultJson) -> Result<Report> {
    let mut report = Report::default();
    let params = RsParams::with_q_gamma(
        small(&j.p, "p")?,
        small(&j.sigma, "sigma")? as u32,
        small(&j.q, "q")?,
        small(&j.gamma, "gamma")?,
    )?;
    let rs = build_lambda_with(params)?;
    let mut mats = Vec::with_capacity(j.involutions.len());
    for (i, inv) in j.involutions.iter().enumerate() {
        let (h, m) = inv.parts()?;
        if m.rows() != RANK || m.cols() != RANK || h.len() != RANK {
            return Err(Error::Format(format!("involution {i} has the wrong size")));
        }
        let ok = check_involution(&rs.lattice, &h, &m);
        report.push(format!("involution {i}"), ok.is_ok(), ok.err().map(|e| e.to_string()).unwrap_or_default());
        mats.push(m);
    }
    let word: Vec<usize> = j.word.iter().map(|x| small(x, "word index").map(|v| v as usize)).collect::<Result<_>>()?;
    if word.iter().any(|&i| i >= mats.len()) {
        return Err(Error::Format("word refers to a missing involution".into()));
    }
    report.push("word length", (1..=MAX_WORD_LENGTH).contains(&word.len()), format!("{}", word.len()));
    let product = word_product(&word.iter().map(|&i| &mats[i]).collect::<Vec<_>>());
    let cp = char_poly(&product)?;
    let stored = IntPolynomial::try_from(&j.charpoly)?;
    report.push("characteristic polynomial", cp == stored, "");
    let cert_poly = j.certificate.polynomial()?;
    report.push("certificate polynomial", cert_poly == cp, "");
    match salem_check(&cp, SalemContext::FromK3Automorphism, DEFAULT_PRIME_BUDGET, DEFAULT_ROOT_TOL)? {
        Ok(cert) => {
            report.push("Salem polynomial", true, cert.irreducibility.to_string());
            let (lo, hi) = j.certificate.bounds()?;
            report.push("root enclosure", enclosure_is_valid(&cp, &lo, &hi), format!("[{lo}, {hi}]"));
            report.push(
                "irreducibility status",
                cert.irreducibility == j.certificate.irreducibility,
                format!("{} vs {}", cert.irreducibility, j.certificate.irreducibility),
            );
        }
        Err(r) => report.push("Salem polynomial", false, r.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct() {
        let a: HashSet<u64> = (0..1000).map(|i| derive_seed(7, 1, i)).collect();
        assert_eq!(a.len(), 1000);
        assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
    }

    #[test]
    fn config_validation() {
        let mut c = SearchConfig::new(7, 1, 0);
        c.validate().unwrap();
        c.max_word_length = 23;
        assert!(c.validate().is_err());
        c.max_word_length = 1;
        assert!(c.validate().is_err());
        assert!(SearchConfig::new(8, 1, 0).validate().is_err());
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 19.1 + 21.8 * x).collect();
        let f = least_squares(&xs, &ys).unwrap();
        assert!((f.slope - 21.8).abs() < 1e-9 && (f.intercept - 19.1).abs() < 1e-9);
        assert!(least_squares(&[1.0], &[1.0]).is_none());
        let empty = Sweep::default();
        assert!(empty.fits().is_none());
        assert_eq!(empty.to_csv(), "p,log_p,lambda_str,entropy\n");
    }

    #[test]
    fn family_shape() {
        let base: Vec<Sigma10Vector> = (0..6).map(|i| Sigma10Vector { a: i, v: [i, 0, 0, 0] }).collect();
        let fam = sigma10_family(&base, 2).unwrap();
        assert_eq!(fam.len(), 22);
        assert_eq!(fam[6].0[0], 2);
        assert_eq!(fam[6].0[6], 1);
        assert_eq!(fam[21].0[21], 1);
        assert!(sigma10_family(&base, 7).is_err());
        assert!(sigma10_family(&base[..5], 1).is_err());
    }
}

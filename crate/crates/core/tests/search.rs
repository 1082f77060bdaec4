mod common;

use common::{accepted_result_invariants, involution_invariants};
use k3salem::pipeline::{
    entropy_sweep, generate_involution_pool, search_irreducible_salem, sigma10_construct, verify_result, SearchConfig,
    SearchOutcome, SearchResult, SearchResultJson, Sigma10Config, Sigma10Source,
};
use k3salem::rs::build_lambda;
use std::time::{Duration, Instant};

fn sigma1_config(p: i64, seed: u64, threads: usize) -> SearchConfig {
    let mut c = SearchConfig::new(p, 1, seed);
    c.pool_size = 8;
    c.trial_budget = 20_000;
    c.time_budget = Some(Duration::from_secs(15 * 60));
    c.threads = threads;
    c
}

fn accepted(config: &SearchConfig) -> SearchResult {
    let pool = generate_involution_pool(config).unwrap();
    let rs = build_lambda(config.p, config.sigma).unwrap();
    for rec in &pool.records {
        involution_invariants(&rs.lattice, &rec.h, &rec.matrix).unwrap();
    }
    match search_irreducible_salem(config, &pool).unwrap() {
        SearchOutcome::Accepted(r, _) => *r,
        SearchOutcome::Exhausted(stats) => panic!("p={} exhausted: {stats:?}", config.p),
    }
}

fn sigma10(p: i64, seed: u64, threads: usize) -> k3salem::pipeline::Sigma10Outcome {
    let mut config = Sigma10Config::new(p, Sigma10Source::Search { seed, max_attempts: 200_000 });
    config.threads = threads;
    sigma10_construct(&config).unwrap()
}

#[test]
fn sigma1_searches_are_accepted() {
    for p in [3i64, 5, 7, 13] {
        let start = Instant::now();
        let r = accepted(&sigma1_config(p, 1, 0));
        accepted_result_invariants(&r).unwrap_or_else(|e| panic!("p={p}: {e}"));
        assert!(r.certificate.lambda() > 1.0);
        let report = verify_result(&SearchResultJson::from(&r)).unwrap();
        assert!(report.all_passed(), "p={p}: {report:?}");
        assert!(start.elapsed() < Duration::from_secs(15 * 60));
    }
}

#[test]
fn sigma10_searches_are_accepted() {
    for p in [11i64, 13] {
        let start = Instant::now();
        let out = sigma10(p, 1, 0);
        assert_eq!(out.vectors.len(), 6);
        assert!((1..=6).contains(&out.base_k));
        assert_eq!(out.result.involutions.len(), 22);
        accepted_result_invariants(&out.result).unwrap_or_else(|e| panic!("p={p}: {e}"));
        let report = verify_result(&SearchResultJson::from(&out.result)).unwrap();
        assert!(report.all_passed(), "p={p}: {report:?}");
        assert!(start.elapsed() < Duration::from_secs(15 * 60));
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let one = generate_involution_pool(&sigma1_config(5, 3, 1)).unwrap();
    let many = generate_involution_pool(&sigma1_config(5, 3, 4)).unwrap();
    assert_eq!(one.attempts, many.attempts);
    assert_eq!(
        one.records.iter().map(|r| &r.h).collect::<Vec<_>>(),
        many.records.iter().map(|r| &r.h).collect::<Vec<_>>()
    );

    let a = accepted(&sigma1_config(7, 3, 1));
    let b = accepted(&sigma1_config(7, 3, 4));
    assert_eq!(a.trial, b.trial);
    assert_eq!(a.word, b.word);
    assert_eq!(a.pool_indices, b.pool_indices);
    assert_eq!(a.charpoly, b.charpoly);

    let x = sigma10(11, 2, 1);
    let y = sigma10(11, 2, 3);
    assert_eq!(x.vectors, y.vectors);
    assert_eq!(x.base_k, y.base_k);
    assert_eq!(x.result.charpoly, y.result.charpoly);
}

#[test]
fn different_seeds_give_different_pools() {
    let a = generate_involution_pool(&sigma1_config(5, 1, 0)).unwrap();
    let b = generate_involution_pool(&sigma1_config(5, 2, 0)).unwrap();
    let ha: Vec<_> = a.records.iter().map(|r| r.h.clone()).collect();
    let hb: Vec<_> = b.records.iter().map(|r| r.h.clone()).collect();
    assert_ne!(ha, hb);
}

#[test]
fn stored_results_survive_json_and_detect_tampering() {
    let r = accepted(&sigma1_config(7, 1, 0));
    let text = serde_json::to_string(&SearchResultJson::from(&r)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["p"], "7");
    assert!(value["charpoly"]["coeffs_desc"][0].is_string());
    let parsed: SearchResultJson = serde_json::from_str(&text).unwrap();
    assert!(verify_result(&parsed).unwrap().all_passed());

    let mut bad_poly = parsed.clone();
    bad_poly.charpoly.coeffs_desc[3] = "12345".into();
    assert!(!verify_result(&bad_poly).unwrap().all_passed());

    let mut bad_matrix = parsed.clone();
    let entry = &mut bad_matrix.involutions[0].matrix[2][5];
    entry.0 += 1;
    assert!(!verify_result(&bad_matrix).unwrap().all_passed());

    let mut bad_word = parsed.clone();
    bad_word.word.push(99.into());
    assert!(verify_result(&bad_word).is_err());

    let mut long_word = parsed;
    let w = long_word.word.clone();
    long_word.word = w.iter().cycle().take(24).cloned().collect();
    assert!(!verify_result(&long_word).unwrap().all_passed());
}

#[test]
fn small_sweep_writes_csv_and_fits() {
    let sweep = entropy_sweep(&[11, 13, 17], 1, 200_000, 0);
    assert!(sweep.failures.is_empty(), "{:?}", sweep.failures);
    assert_eq!(sweep.rows.len(), 3);
    let csv = sweep.to_csv();
    assert!(csv.starts_with("p,log_p,lambda_str,entropy\n"));
    assert_eq!(csv.lines().count(), 4);
    for row in &sweep.rows {
        assert!(row.entropy > 0.0);
        assert!((row.log_p - (row.p as f64).ln()).abs() < 1e-12);
    }
    let fits = sweep.fits().unwrap();
    let ln10 = std::f64::consts::LN_10;
    assert!((fits.entropy_vs_log10_p.slope - fits.natural.slope * ln10).abs() < 1e-6);
    assert!((fits.log10_lambda_vs_ln_p.slope - fits.natural.slope / ln10).abs() < 1e-6);
}

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use dhub_core::dataset::{all_violations, Dataset};
use dhub_core::region::COUNTRY_POOL;
use dhub_core::synth::{self, generate, GenConfig};
use dhub_core::*;
use proptest::prelude::*;
use sha2::{Digest, Sha256};

/// Compares against a file under tests/golden, or rewrites it when
/// `DHUB_BLESS=1` is set.
fn golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("DHUB_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{} differs", path.display());
}

fn small_config() -> GenConfig {
    GenConfig { seed: 7, n_orgs: 6, n_challenges: 3, n_solutions: 3, ..GenConfig::default() }
}

#[test]
fn seed42_role_counts() {
    assert_eq!(seed42().role_counts(), [88, 95, 67]);
}

#[test]
fn hundred_challenges_split_by_domain() {
    let ds = generate(&GenConfig { n_challenges: 100, ..GenConfig::default() }).unwrap();
    let mut counts: BTreeMap<Domain, usize> = BTreeMap::new();
    for c in &ds.challenges {
        *counts.entry(c.domain).or_default() += 1;
    }
    let got: Vec<usize> = Domain::ALL.iter().map(|d| counts.get(d).copied().unwrap_or(0)).collect();
    assert_eq!(got, [30, 20, 20, 15, 15]);
}

#[test]
fn country_pool_has_45_codes_and_all_are_used() {
    let pool: BTreeSet<&str> = COUNTRY_POOL.iter().copied().collect();
    assert_eq!(pool.len(), 45);
    let ds = seed42();
    let used: BTreeSet<&str> = ds.organizations.iter().map(|o| o.country.as_str()).collect();
    assert_eq!(used, pool);
}

#[test]
fn seed42_is_valid_and_closed() {
    let ds = seed42();
    assert!(all_violations(&ds.records()).is_empty());
    assert_eq!(Dataset::from_json(&ds.to_json()).unwrap(), ds);
    for c in &ds.challenges {
        let d = ds.get_org(&c.deployer_id).unwrap();
        assert_eq!(d.role, OrgRole::Deployer);
        assert_eq!(c.country, d.country);
    }
    for s in &ds.solutions {
        assert_eq!(ds.get_org(&s.provider_id).unwrap().role, OrgRole::Provider);
    }
}

#[test]
fn seed42_ranges() {
    let ds = seed42();
    for c in &ds.challenges {
        let b = c.budget_usd.as_f64();
        assert!((synth::BUDGET_RANGE_USD.0..=synth::BUDGET_RANGE_USD.1).contains(&b), "{}", c.id);
        assert!((synth::WINDOW_RANGE_MONTHS.0..=synth::WINDOW_RANGE_MONTHS.1).contains(&c.window_months));
        assert!((synth::POPULATION_RANGE.0..=synth::POPULATION_RANGE.1).contains(&c.affected_population));
        assert!((1..=3).contains(&c.required_tags.len()));
    }
    for s in &ds.solutions {
        let cost = s.cost_usd.as_f64();
        assert!((synth::COST_RANGE_USD.0..=synth::COST_RANGE_USD.1).contains(&cost), "{}", s.id);
        assert!((synth::LEAD_RANGE_MONTHS.0..=synth::LEAD_RANGE_MONTHS.1).contains(&s.lead_time_months));
        assert!(s.deployments_successful <= s.deployments_completed);
        assert!(s.deployments_completed <= synth::COMPLETED_RANGE.1);
    }
}

#[test]
fn export_is_byte_stable() {
    let a = generate(&GenConfig::default()).unwrap().to_json();
    let b = generate(&GenConfig::default()).unwrap().to_json();
    assert_eq!(a, b);
    let hex: String = Sha256::digest(a.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    golden("seed42.sha256", &format!("{hex}\n"));
}

#[test]
fn small_export_matches_golden_file() {
    golden("seed7_small.json", &generate(&small_config()).unwrap().to_json());
}

#[test]
fn different_seeds_differ() {
    let a = generate(&GenConfig::with_seed(1)).unwrap();
    let b = generate(&GenConfig::with_seed(2)).unwrap();
    assert_ne!(a.organizations, b.organizations);
}

#[test]
fn too_few_orgs_is_a_config_error() {
    let err = generate(&GenConfig { n_orgs: 2, ..GenConfig::default() }).unwrap_err();
    assert!(matches!(err, SynthError::Config(_)), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_seed_generates_a_valid_closed_dataset(
        seed in any::<u64>(),
        n_orgs in 3u64..60,
        n_challenges in 0u64..30,
        n_solutions in 0u64..30,
    ) {
        let cfg = GenConfig { seed, n_orgs, n_challenges, n_solutions, ..GenConfig::default() };
        let ds = generate(&cfg).unwrap();
        prop_assert_eq!(ds.organizations.len() as u64, n_orgs);
        prop_assert_eq!(ds.challenges.len() as u64, n_challenges);
        prop_assert_eq!(ds.solutions.len() as u64, n_solutions);
        let v = all_violations(&ds.records());
        prop_assert!(v.is_empty(), "{:?}", v);
        prop_assert_eq!(generate(&cfg).unwrap(), ds);
    }
}

//! Seeded synthetic ecosystems.
//!
//! The random stream is ChaCha20 (RFC 8439 block function) seeded through
//! `SeedableRng::seed_from_u64`, consumed only through `next_u64`. All
//! sampling on top of that stream is defined in this module, so the output
//! depends on nothing but the config.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::apportion::quota_split_or_empty;
use crate::dataset::{Dataset, Meta};
use crate::error::SynthError;
use crate::model::{
    Challenge, ChallengeStatus, Coverage, Domain, EntityKind, OrgRole, Organization, ScaleTier,
    Solution, Usd,
};
use crate::region::{region_of, COUNTRY_POOL};

pub const GENERATOR_VERSION: &str = "dhub-synth/1";

pub const ROLE_SHARES: [(OrgRole, u32); 3] =
    [(OrgRole::Deployer, 35), (OrgRole::Provider, 38), (OrgRole::Financier, 27)];

pub const DOMAIN_SHARES: [(Domain, u32); 5] = [
    (Domain::Agriculture, 30),
    (Domain::Water, 20),
    (Domain::Energy, 20),
    (Domain::Health, 15),
    (Domain::Education, 15),
];

pub const BUDGET_RANGE_USD: (f64, f64) = (1e4, 1e7);
pub const COST_RANGE_USD: (f64, f64) = (1e4, 5e6);
pub const WINDOW_RANGE_MONTHS: (u32, u32) = (3, 36);
pub const LEAD_RANGE_MONTHS: (u32, u32) = (1, 24);
pub const POPULATION_RANGE: (u64, u64) = (1_000, 5_000_000);
pub const VERIFIED_PROBABILITY: f64 = 0.6;
pub const COMPLETED_RANGE: (u32, u32) = (0, 12);
pub const SUCCESS_PROBABILITY: f64 = 0.75;
pub const GLOBAL_COVERAGE_PROBABILITY: f64 = 0.15;
pub const CROSS_DOMAIN_TAG_PROBABILITY: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n_orgs: u64,
    pub n_challenges: u64,
    pub n_solutions: u64,
    pub country_pool_size: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 42, n_orgs: 250, n_challenges: 120, n_solutions: 150, country_pool_size: COUNTRY_POOL.len() }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig { seed, ..GenConfig::default() }
    }
}

/// Sampling primitives over a 64-bit stream.
struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Uniform in [0, 1) from the top 53 bits.
    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, n) by rejection, n ≥ 1.
    fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    fn int_in(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (lo.ln(), hi.ln());
        (a + self.unit() * (b - a)).exp().clamp(lo, hi)
    }

    fn log_uniform_int(&mut self, lo: u64, hi: u64) -> u64 {
        (self.log_uniform(lo as f64, hi as f64).floor() as u64).clamp(lo, hi)
    }

    fn money(&mut self, (lo, hi): (f64, f64)) -> Usd {
        let lo_c = Usd::from_f64(lo).cents();
        let hi_c = Usd::from_f64(hi).cents();
        Usd::from_cents(Usd::from_f64(self.log_uniform(lo, hi)).cents().clamp(lo_c, hi_c))
    }

    fn binomial(&mut self, trials: u32, p: f64) -> u32 {
        (0..trials).filter(|_| self.bernoulli(p)).count() as u32
    }

    /// Fisher–Yates, walking down from the last index.
    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// `k` distinct items in draw order.
    fn choose<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        let mut idx: Vec<usize> = (0..items.len()).collect();
        self.shuffle(&mut idx);
        idx.into_iter().take(k).map(|i| items[i].clone()).collect()
    }
}

/// Capability vocabulary per domain; some tags deliberately recur across domains.
pub fn domain_vocabulary(domain: Domain) -> &'static [&'static str] {
    match domain {
        Domain::Agriculture => &[
            "irrigation", "solar", "drip", "seeds", "soil testing", "cold storage",
            "mechanization", "agroforestry",
        ],
        Domain::Water => &[
            "filtration", "boreholes", "desalination", "sanitation", "rainwater harvesting",
            "water quality monitoring", "pumps", "solar",
        ],
        Domain::Energy => &[
            "solar", "mini-grids", "clean cookstoves", "battery storage", "wind", "biogas",
            "energy efficiency", "pay-as-you-go",
        ],
        Domain::Health => &[
            "telemedicine", "diagnostics", "vaccines", "cold storage", "maternal care",
            "mobile clinics", "supply chain", "data systems",
        ],
        Domain::Education => &[
            "e-learning", "teacher training", "connectivity", "tablets", "literacy",
            "vocational training", "school meals", "data systems",
        ],
    }
}

const NAME_HEADS: [&str; 12] = [
    "Green", "Blue", "Rising", "Open", "Bright", "United", "Sahel", "Delta", "Highland",
    "Coastal", "Harvest", "Pioneer",
];
const NAME_CORES: [&str; 10] = [
    "Futures", "Bridge", "Horizons", "Roots", "Commons", "Pathways", "Link", "Works",
    "Alliance", "Frontier",
];

fn name_suffix(role: OrgRole) -> &'static [&'static str] {
    match role {
        OrgRole::Deployer => &["Agency", "Ministry Unit", "Cooperative", "County Office", "Foundation"],
        OrgRole::Provider => &["Technologies", "Solutions", "Labs", "Systems", "Enterprises"],
        OrgRole::Financier => &["Fund", "Capital", "Development Bank", "Trust", "Impact Partners"],
    }
}

fn base_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn distributions() -> BTreeMap<String, String> {
    let entries = [
        ("rng", "ChaCha20 seeded via seed_from_u64; uniform floats use the top 53 bits of next_u64; bounded integers use rejection sampling".to_string()),
        ("roles", "exact largest-remainder quota: Deployer 35, Provider 38, Financier 27 (percent)".to_string()),
        ("challenge_domains", "exact largest-remainder quota: Agriculture 30, Water 20, Energy 20, Health 15, Education 15 (percent), then shuffled".to_string()),
        ("solution_domains", "same quota as challenge_domains, applied independently".to_string()),
        ("countries", format!("round-robin over a fixed {}-country pool, then shuffled; challenge country = its deployer's country", COUNTRY_POOL.len())),
        ("budget_usd", format!("log-uniform [{:.0}, {:.0}]", BUDGET_RANGE_USD.0, BUDGET_RANGE_USD.1)),
        ("cost_usd", format!("log-uniform [{:.0}, {:.0}]", COST_RANGE_USD.0, COST_RANGE_USD.1)),
        ("window_months", format!("uniform integer [{}, {}]", WINDOW_RANGE_MONTHS.0, WINDOW_RANGE_MONTHS.1)),
        ("lead_time_months", format!("uniform integer [{}, {}]", LEAD_RANGE_MONTHS.0, LEAD_RANGE_MONTHS.1)),
        ("population", format!("log-uniform integer [{}, {}] for affected_population and capacity_population", POPULATION_RANGE.0, POPULATION_RANGE.1)),
        ("verified", format!("Bernoulli({VERIFIED_PROBABILITY})")),
        ("history", format!("completed uniform integer [{}, {}], successful Binomial(completed, {SUCCESS_PROBABILITY})", COMPLETED_RANGE.0, COMPLETED_RANGE.1)),
        ("coverage", format!("GLOBAL with probability {GLOBAL_COVERAGE_PROBABILITY}, else provider country plus 0-3 pool countries")),
    ];
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn expand<L: Copy>(counts: &[(L, u64)]) -> Vec<L> {
    counts.iter().flat_map(|(l, n)| std::iter::repeat_n(*l, *n as usize)).collect()
}

pub fn generate(config: &GenConfig) -> Result<Dataset, SynthError> {
    if config.n_orgs < 3 {
        return Err(SynthError::Config(format!("n_orgs must be at least 3, got {}", config.n_orgs)));
    }
    if config.country_pool_size != COUNTRY_POOL.len() {
        return Err(SynthError::Config(format!(
            "country_pool_size is fixed at {}, got {}",
            COUNTRY_POOL.len(),
            config.country_pool_size
        )));
    }
    let role_counts = quota_split_or_empty(config.n_orgs, &ROLE_SHARES)?;
    let count_of = |role| role_counts.iter().find(|(r, _)| *r == role).map_or(0, |(_, n)| *n);
    if config.n_challenges > 0 && count_of(OrgRole::Deployer) == 0 {
        return Err(SynthError::Config("challenges requested but no Deployers generated".into()));
    }
    if config.n_solutions > 0 && count_of(OrgRole::Provider) == 0 {
        return Err(SynthError::Config("solutions requested but no Providers generated".into()));
    }

    let mut s = Sampler::new(config.seed);

    let mut roles = expand(&role_counts);
    s.shuffle(&mut roles);
    let mut countries: Vec<&str> = (0..config.n_orgs as usize).map(|i| COUNTRY_POOL[i % COUNTRY_POOL.len()]).collect();
    s.shuffle(&mut countries);

    let minutes_per_year = 365 * 24 * 60;
    let organizations: Vec<Organization> = roles
        .iter()
        .zip(&countries)
        .enumerate()
        .map(|(i, (&role, &country))| {
            let name = format!("{} {} {}", s.pick(&NAME_HEADS), s.pick(&NAME_CORES), s.pick(name_suffix(role)));
            let mut domains = BTreeSet::from([*s.pick(&Domain::ALL)]);
            if s.bernoulli(0.35) {
                domains.insert(*s.pick(&Domain::ALL));
            }
            Organization {
                id: EntityKind::Organization.format_id(i as u64 + 1),
                name,
                role,
                country: country.to_string(),
                region: region_of(country).expect("pool codes are well formed").to_string(),
                domains,
                verified: s.bernoulli(VERIFIED_PROBABILITY),
                scale_tier: *s.pick(&ScaleTier::ALL),
                created_at: base_time() + Duration::minutes(s.below(minutes_per_year) as i64),
            }
        })
        .collect();

    let deployers: Vec<&Organization> = organizations.iter().filter(|o| o.role == OrgRole::Deployer).collect();
    let providers: Vec<&Organization> = organizations.iter().filter(|o| o.role == OrgRole::Provider).collect();

    let mut challenge_domains = expand(&quota_split_or_empty(config.n_challenges, &DOMAIN_SHARES)?);
    s.shuffle(&mut challenge_domains);
    let challenges: Vec<Challenge> = challenge_domains
        .iter()
        .enumerate()
        .map(|(i, &domain)| {
            let deployer = *s.pick(&deployers);
            let k = s.int_in(1, 3) as usize;
            let tags = s.choose(domain_vocabulary(domain), k);
            let title = format!("{} need in {} ({})", capitalize(tags[0]), deployer.country, domain.tag());
            Challenge {
                id: EntityKind::Challenge.format_id(i as u64 + 1),
                deployer_id: deployer.id.clone(),
                title,
                domain,
                country: deployer.country.clone(),
                required_tags: tags.iter().map(|t| t.to_string()).collect(),
                affected_population: s.log_uniform_int(POPULATION_RANGE.0, POPULATION_RANGE.1),
                budget_usd: s.money(BUDGET_RANGE_USD),
                window_months: s.int_in(WINDOW_RANGE_MONTHS.0.into(), WINDOW_RANGE_MONTHS.1.into()) as u32,
                status: ChallengeStatus::Open,
                intake_answers: Vec::new(),
            }
        })
        .collect();

    let mut solution_domains = expand(&quota_split_or_empty(config.n_solutions, &DOMAIN_SHARES)?);
    s.shuffle(&mut solution_domains);
    let solutions: Vec<Solution> = solution_domains
        .iter()
        .enumerate()
        .map(|(i, &domain)| {
            let provider = *s.pick(&providers);
            let k = s.int_in(2, 4) as usize;
            let mut tags: BTreeSet<String> =
                s.choose(domain_vocabulary(domain), k).into_iter().map(str::to_string).collect();
            if s.bernoulli(CROSS_DOMAIN_TAG_PROBABILITY) {
                let other = *s.pick(&Domain::ALL);
                tags.insert(s.pick(domain_vocabulary(other)).to_string());
            }
            let coverage = if s.bernoulli(GLOBAL_COVERAGE_PROBABILITY) {
                Coverage::Global
            } else {
                let mut set = BTreeSet::from([provider.country.clone()]);
                let extra = s.int_in(0, 3);
                for _ in 0..extra {
                    set.insert(s.pick(&COUNTRY_POOL).to_string());
                }
                Coverage::Countries(set)
            };
            let cost_usd = s.money(COST_RANGE_USD);
            let lead_time_months = s.int_in(LEAD_RANGE_MONTHS.0.into(), LEAD_RANGE_MONTHS.1.into()) as u32;
            let capacity_population = s.log_uniform_int(POPULATION_RANGE.0, POPULATION_RANGE.1);
            let completed = s.int_in(COMPLETED_RANGE.0.into(), COMPLETED_RANGE.1.into()) as u32;
            let successful = s.binomial(completed, SUCCESS_PROBABILITY);
            let lead_tag = tags.iter().next().cloned().unwrap_or_default();
            Solution {
                id: EntityKind::Solution.format_id(i as u64 + 1),
                provider_id: provider.id.clone(),
                title: format!("{} offering by {}", capitalize(&lead_tag), provider.name),
                domain,
                tags,
                coverage,
                cost_usd,
                lead_time_months,
                capacity_population,
                deployments_completed: completed,
                deployments_successful: successful,
            }
        })
        .collect();

    Ok(Dataset {
        meta: Meta {
            generator_version: GENERATOR_VERSION.to_string(),
            seed: Some(config.seed),
            config: Some(*config),
            distributions: distributions(),
        },
        organizations,
        challenges,
        solutions,
    })
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chacha_matches_published_keystream() {
        // all-zero key and nonce, block 0: keystream starts 76 b8 e0 ad a0 f1 3d 90
        let mut rng = ChaCha20Rng::from_seed([0u8; 32]);
        assert_eq!(rng.next_u64(), u64::from_le_bytes([0x76, 0xb8, 0xe0, 0xad, 0xa0, 0xf1, 0x3d, 0x90]));
    }

    #[test]
    fn seeded_stream_is_pinned() {
        let mut s = Sampler::new(42);
        let first: Vec<u64> = (0..2).map(|_| s.rng.next_u64()).collect();
        assert_eq!(first, PINNED_SEED42);
    }

    const PINNED_SEED42: [u64; 2] = [9_482_535_800_248_027_256, 7_566_832_397_956_113_305];

    #[test]
    fn samplers_stay_in_range() {
        let mut s = Sampler::new(9);
        for _ in 0..5_000 {
            let u = s.unit();
            assert!((0.0..1.0).contains(&u));
            assert!(s.below(7) < 7);
            let v = s.int_in(3, 36);
            assert!((3..=36).contains(&v));
            let p = s.log_uniform_int(1_000, 5_000_000);
            assert!((1_000..=5_000_000).contains(&p));
            let m = s.money(COST_RANGE_USD);
            assert!(m.cents() >= 1_000_000 && m.cents() <= 500_000_000);
            let c = s.int_in(0, 12) as u32;
            assert!(s.binomial(c, 0.75) <= c);
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut s = Sampler::new(1);
        let mut v: Vec<u32> = (0..50).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }

    #[test]
    fn tiny_org_counts_are_config_errors() {
        for n in [0, 1, 2] {
            let cfg = GenConfig { n_orgs: n, ..GenConfig::default() };
            assert!(matches!(generate(&cfg), Err(SynthError::Config(_))), "n_orgs = {n}");
        }
    }

    #[test]
    fn pool_size_is_fixed() {
        let cfg = GenConfig { country_pool_size: 44, ..GenConfig::default() };
        assert!(matches!(generate(&cfg), Err(SynthError::Config(_))));
    }

    #[test]
    fn three_orgs_cover_every_role() {
        let ds = generate(&GenConfig { n_orgs: 3, n_challenges: 5, n_solutions: 5, ..GenConfig::default() }).unwrap();
        assert_eq!(ds.role_counts(), [1, 1, 1]);
    }

    #[test]
    fn zero_counts_allowed() {
        let ds = generate(&GenConfig { n_challenges: 0, n_solutions: 0, ..GenConfig::default() }).unwrap();
        assert!(ds.challenges.is_empty() && ds.solutions.is_empty());
    }

    #[test]
    fn vocabularies_are_normalized() {
        for d in Domain::ALL {
            for t in domain_vocabulary(d) {
                assert_eq!(crate::model::normalize_tag(t), *t);
            }
        }
    }
}

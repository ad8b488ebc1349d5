//! Measurement routines shared by the command-line harness and the
//! acceptance tests. Every routine is deterministic given its seeds.

use crate::arith::{bits_for, ceil_exact, ceil_log2};
use crate::backyard::{bin_capacity, overflow_count, BackyardDict, BackyardParams};
use crate::error::{Error, Result};
use crate::filter::{Membership, MembershipFilter};
use crate::hash_family::KWiseHash;
use crate::permutations::{truncate_universe, Chop, ChoppedPerm, Permutation};
use crate::ranked::info_bound;
use crate::succinct::{SuccinctDict, SuccinctParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

pub const REPORT_SCHEMA: u32 = 1;

/// A dictionary under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Backyard(BackyardParams),
    Succinct(SuccinctParams),
}

impl Target {
    pub fn capacity(&self) -> u64 {
        match self {
            Target::Backyard(p) => p.n,
            Target::Succinct(p) => p.n,
        }
    }

    pub fn universe(&self) -> u64 {
        match self {
            Target::Backyard(p) => p.u,
            Target::Succinct(p) => p.u,
        }
    }

    /// Step budgets for insert, lookup and delete.
    pub fn budgets(&self) -> [u64; 3] {
        match self {
            Target::Backyard(p) => [
                p.insert_step_budget(),
                p.lookup_step_budget(),
                p.delete_step_budget(),
            ],
            Target::Succinct(p) => [
                p.insert_step_budget(),
                p.lookup_step_budget(),
                p.delete_step_budget(),
            ],
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Backyard(p) => {
                format!("backyard/{:?}/{:?}", p.bin_mode, p.cuckoo_mode).to_lowercase()
            }
            Target::Succinct(p) => format!("succinct/{:?}", p.backend).to_lowercase(),
        }
    }
}

enum Dict {
    Backyard(BackyardDict),
    Succinct(SuccinctDict),
}

impl Dict {
    fn new(t: &Target, seed: u64) -> Result<Self> {
        Ok(match t {
            Target::Backyard(p) => Dict::Backyard(BackyardDict::new(p.clone(), seed)?),
            Target::Succinct(p) => Dict::Succinct(SuccinctDict::new(p.clone(), seed)?),
        })
    }

    fn insert(&mut self, x: u64) -> Result<()> {
        match self {
            Dict::Backyard(d) => d.insert(x),
            Dict::Succinct(d) => d.insert(x),
        }
    }

    fn delete(&mut self, x: u64) -> Result<bool> {
        match self {
            Dict::Backyard(d) => d.delete(x),
            Dict::Succinct(d) => d.delete(x),
        }
    }

    fn contains(&self, x: u64) -> bool {
        match self {
            Dict::Backyard(d) => d.contains(x),
            Dict::Succinct(d) => d.contains(x),
        }
    }

    fn len(&self) -> u64 {
        match self {
            Dict::Backyard(d) => d.len(),
            Dict::Succinct(d) => d.len(),
        }
    }

    fn steps(&self) -> u64 {
        match self {
            Dict::Backyard(d) => d.steps(),
            Dict::Succinct(d) => d.steps(),
        }
    }

    /// Cuckoo and bin queue lengths (high-water marks for the succinct
    /// dictionary).
    fn queues(&self) -> (usize, usize) {
        match self {
            Dict::Backyard(d) => (d.cuckoo().queue_len(), d.first_level().queue_len()),
            Dict::Succinct(d) => d.queue_high_water(),
        }
    }

    fn second_level(&self) -> u64 {
        match self {
            Dict::Backyard(d) => d.second_level_len(),
            Dict::Succinct(d) => d.second_level_len(),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        match self {
            Dict::Backyard(d) => d.check_invariants(),
            Dict::Succinct(d) => d.check_invariants(),
        }
    }
}

/// Outcome of one model-checked operation sequence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub target: String,
    pub seed: u64,
    pub ops: u64,
    pub inserts: u64,
    pub lookups: u64,
    pub deletes: u64,
    pub mismatches: u64,
    pub invariant_failures: u64,
    pub structural_failure: Option<String>,
    pub budget_violations: u64,
    pub step_budgets: [u64; 3],
    pub max_steps: [u64; 3],
    pub cuckoo_queue_high_water: u64,
    pub bin_queue_high_water: u64,
    pub max_second_level: u64,
    pub final_len: u64,
}

impl FuzzReport {
    /// No mismatch, invariant or budget breach, and no failure.
    pub fn clean(&self) -> bool {
        self.mismatches == 0
            && self.invariant_failures == 0
            && self.budget_violations == 0
            && self.structural_failure.is_none()
    }
}

/// Live keys with constant-time removal of a random element.
#[derive(Default)]
struct LiveSet {
    keys: Vec<u64>,
    pos: HashMap<u64, usize>,
}

impl LiveSet {
    fn contains(&self, x: u64) -> bool {
        self.pos.contains_key(&x)
    }

    fn insert(&mut self, x: u64) {
        if !self.pos.contains_key(&x) {
            self.pos.insert(x, self.keys.len());
            self.keys.push(x);
        }
    }

    fn remove(&mut self, x: u64) -> bool {
        let Some(i) = self.pos.remove(&x) else {
            return false;
        };
        let last = self.keys.pop().expect("non-empty");
        if i < self.keys.len() {
            self.keys[i] = last;
            self.pos.insert(last, i);
        }
        true
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> Option<u64> {
        (!self.keys.is_empty()).then(|| self.keys[rng.gen_range(0..self.keys.len())])
    }

    fn len(&self) -> u64 {
        self.keys.len() as u64
    }
}

/// Runs `ops` random operations against a set model. The mix fills the
/// dictionary to capacity and then churns near it; it includes duplicate
/// inserts, deletes of absent keys and lookups of both kinds.
pub fn ops_fuzz(target: &Target, ops: u64, seed: u64) -> Result<FuzzReport> {
    ops_fuzz_with(target, ops, seed, 0)
}

/// As [`ops_fuzz`], also checking structural invariants every
/// `check_every` operations (0 disables).
pub fn ops_fuzz_with(target: &Target, ops: u64, seed: u64, check_every: u64) -> Result<FuzzReport> {
    let mut dict = Dict::new(target, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (n, u) = (target.capacity(), target.universe());
    let budgets = target.budgets();
    let mut model = LiveSet::default();
    let mut rep = FuzzReport {
        target: target.label(),
        seed,
        step_budgets: budgets,
        ..FuzzReport::default()
    };
    let note = |rep: &mut FuzzReport, kind: usize, steps: u64| {
        rep.max_steps[kind] = rep.max_steps[kind].max(steps);
        if steps > budgets[kind] {
            rep.budget_violations += 1;
        }
    };
    for i in 0..ops {
        let roll = rng.gen_range(0..100);
        let before = dict.steps();
        let outcome: Result<()> = if roll < 50 {
            // insert: fresh key while below capacity, a duplicate otherwise
            let x = if roll < 45 && model.len() < n {
                rng.gen_range(0..u)
            } else {
                model.pick(&mut rng).unwrap_or_else(|| rng.gen_range(0..u))
            };
            if model.len() >= n && !model.contains(x) {
                rep.ops += 1;
                continue;
            }
            rep.inserts += 1;
            let r = dict.insert(x);
            if r.is_ok() {
                model.insert(x);
            }
            note(&mut rep, 0, dict.steps() - before);
            r
        } else if roll < 70 {
            let x = if roll < 65 {
                model.pick(&mut rng).unwrap_or_else(|| rng.gen_range(0..u))
            } else {
                rng.gen_range(0..u)
            };
            rep.deletes += 1;
            let r = dict.delete(x);
            if let Ok(removed) = r {
                if removed != model.remove(x) {
                    rep.mismatches += 1;
                }
            }
            note(&mut rep, 2, dict.steps() - before);
            r.map(|_| ())
        } else {
            let x = if roll < 85 {
                model.pick(&mut rng).unwrap_or(0)
            } else {
                rng.gen_range(0..u)
            };
            rep.lookups += 1;
            if dict.contains(x) != model.contains(x) {
                rep.mismatches += 1;
            }
            note(&mut rep, 1, dict.steps() - before);
            Ok(())
        };
        rep.ops += 1;
        let (cq, bq) = dict.queues();
        rep.cuckoo_queue_high_water = rep.cuckoo_queue_high_water.max(cq as u64);
        rep.bin_queue_high_water = rep.bin_queue_high_water.max(bq as u64);
        rep.max_second_level = rep.max_second_level.max(dict.second_level());
        if let Err(e) = outcome {
            if e.is_structural() {
                rep.structural_failure = Some(e.to_string());
                break;
            }
            rep.mismatches += 1;
        }
        if dict.len() != model.len() {
            rep.mismatches += 1;
        }
        if check_every > 0 && (i + 1) % check_every == 0 && dict.check().is_err() {
            rep.invariant_failures += 1;
        }
    }
    if rep.structural_failure.is_none() && dict.check().is_err() {
        rep.invariant_failures += 1;
    }
    rep.final_len = dict.len();
    Ok(rep)
}

/// Which first-level map an overflow trial uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstLevelMap {
    /// `k`-wise polynomial hash.
    Functions,
    /// Truly random permutation, chopped into bins.
    Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverflowRow {
    pub map: FirstLevelMap,
    pub seed: u64,
    pub n: u64,
    pub eps: f64,
    pub d: u64,
    pub m: u64,
    pub overflow: u64,
    pub limit: u64,
    pub within: bool,
}

/// Universe for the permutation variant; small enough for an explicit table.
pub const OVERFLOW_PERM_UNIVERSE: u64 = 1 << 20;

fn distinct_keys<R: Rng>(n: u64, u: u64, rng: &mut R) -> Vec<u64> {
    let mut seen = std::collections::HashSet::with_capacity(n as usize);
    let mut out = Vec::with_capacity(n as usize);
    while (out.len() as u64) < n {
        let x = rng.gen_range(0..u);
        if seen.insert(x) {
            out.push(x);
        }
    }
    out
}

/// First-level overflow of a random `n`-set against the limit `eps n / 16`.
pub fn overflow_trial(
    map: FirstLevelMap,
    n: u64,
    eps: f64,
    c: f64,
    seed: u64,
) -> Result<OverflowRow> {
    let d = bin_capacity(eps, c)?;
    let m = ceil_exact((1.0 + eps / 2.0) * n as f64 / d as f64).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let overflow = match map {
        FirstLevelMap::Functions => {
            let u = crate::backyard::DEFAULT_UNIVERSE;
            let k = crate::backyard::MAX_H0_INDEPENDENCE.min(n as usize);
            let h0 = KWiseHash::sample(k, u, m, &mut rng)?;
            let keys = distinct_keys(n, u, &mut rng);
            overflow_count(keys.iter().map(|&x| h0.hash(x)), m, d)
        }
        FirstLevelMap::Permutation => {
            let u = OVERFLOW_PERM_UNIVERSE.max(n);
            let (kept, _) = truncate_universe(u, m)?;
            let chop = ChoppedPerm::new(Permutation::sample_random(kept, &mut rng)?, m, kept)?;
            let keys = distinct_keys(n, kept, &mut rng);
            let bins = keys.iter().map(|&x| match chop.chop(x) {
                Ok(Chop::Slot { bin, .. }) => bin,
                _ => unreachable!("keys are inside the chopped range"),
            });
            overflow_count(bins, m, d)
        }
    };
    let limit = (eps * n as f64 / 16.0).floor() as u64;
    Ok(OverflowRow {
        map,
        seed,
        n,
        eps,
        d,
        m,
        overflow,
        limit,
        within: overflow <= limit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueRow {
    pub seed: u64,
    pub n: u64,
    pub moves: u32,
    pub ops: u64,
    pub cuckoo_queue_high_water: u64,
    pub bin_queue_high_water: u64,
    pub limit: u64,
    pub within: bool,
    pub structural_failure: Option<String>,
    pub mismatches: u64,
}

/// `4 log2 n`.
pub fn queue_limit(n: u64) -> u64 {
    4 * ceil_log2(n.max(2)) as u64
}

/// Queue high-water marks of one fuzz run over a backyard dictionary.
pub fn queue_trial(params: &BackyardParams, ops: u64, seed: u64) -> Result<QueueRow> {
    let rep = ops_fuzz(&Target::Backyard(params.clone()), ops, seed)?;
    let limit = queue_limit(params.n);
    Ok(QueueRow {
        seed,
        n: params.n,
        moves: params.moves,
        ops: rep.ops,
        cuckoo_queue_high_water: rep.cuckoo_queue_high_water,
        bin_queue_high_water: rep.bin_queue_high_water,
        limit,
        within: rep.cuckoo_queue_high_water <= limit
            && rep.bin_queue_high_water <= limit
            && rep.structural_failure.is_none(),
        structural_failure: rep.structural_failure,
        mismatches: rep.mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RehashRow {
    pub d: u32,
    pub seed: u64,
    pub inserts: u64,
    pub rehashes: u64,
    pub collision_rehashes: u64,
    pub forced_rehashes: u64,
    pub rate: f64,
    pub sigma: f64,
    pub limit: f64,
    pub within: bool,
}

/// Fills perfect-hash bins of capacity `d` with random identities until
/// `inserts` inserts have run and counts inserts that trigger a rehash.
pub fn rehash_trial(d: u32, inserts: u64, seed: u64) -> Result<RehashRow> {
    let m = inserts.div_ceil(d as u64);
    let id_universe = 1u64 << 40;
    let mut bins =
        crate::bins::PhfBins::new(m, d, bits_for(id_universe), id_universe, u32::MAX, 64, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e48);
    let mut done = 0;
    'fill: for bin in 0..m {
        let mut k = 0;
        while k < d {
            if done == inserts {
                break 'fill;
            }
            let id = rng.gen_range(0..id_universe);
            if bins.contains(bin, id) {
                continue;
            }
            bins.insert(bin, id)?;
            k += 1;
            done += 1;
        }
    }
    let s = bins.stats();
    let rate = s.insert_rehashes as f64 / done as f64;
    let p = 3.0 / d as f64;
    let sigma = (p * (1.0 - p) / done as f64).sqrt();
    let limit = p + 3.0 * sigma;
    Ok(RehashRow {
        d,
        seed,
        inserts: done,
        rehashes: s.insert_rehashes,
        collision_rehashes: s.collision_rehashes,
        forced_rehashes: s.forced_rehashes,
        rate,
        sigma,
        limit,
        within: rate <= limit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordsRow {
    pub n: u64,
    pub eps: f64,
    pub d: u64,
    pub m: u64,
    pub bin_words: u64,
    pub cuckoo_words: u64,
    pub core: u64,
    pub limit: u64,
    pub descriptor_words: u64,
    pub within: bool,
}

/// Word accounting of a freshly allocated backyard dictionary.
pub fn space_words(n: u64, eps: f64, c: f64, seed: u64) -> Result<WordsRow> {
    let p = BackyardParams::derive(n, eps, c)?;
    let dict = BackyardDict::new(p.clone(), seed)?;
    let w = dict.space_words();
    Ok(WordsRow {
        n,
        eps,
        d: p.d,
        m: p.m,
        bin_words: w.bin_cells,
        cuckoo_words: w.cuckoo_budget,
        core: w.core,
        limit: w.limit,
        descriptor_words: w.descriptor_words,
        within: w.core <= w.limit && 2 * p.r <= p.cuckoo_words,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitsRow {
    pub u: u64,
    pub n: u64,
    pub eps: f64,
    pub seed: u64,
    pub stored: u64,
    pub bits_first_level: u64,
    pub bits_second_level: u64,
    pub bits_side: u64,
    pub bits_counters: u64,
    pub bits_hash_descriptors: u64,
    pub bits_total: u64,
    pub info_bound: u64,
    pub limit: f64,
    pub ratio: f64,
    pub within: bool,
}

/// Fills a succinct dictionary with `n` random keys and audits its bits
/// against `(1 + 3 eps) B(u, n)`.
pub fn space_bits(params: &SuccinctParams, seed: u64) -> Result<BitsRow> {
    let mut d = SuccinctDict::new(params.clone(), seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb175);
    for x in distinct_keys(params.n, params.u, &mut rng) {
        d.insert(x)?;
    }
    let a = d.bits_used();
    let limit = (1.0 + 3.0 * params.eps) * a.info_bound as f64;
    Ok(BitsRow {
        u: params.u,
        n: params.n,
        eps: params.eps,
        seed,
        stored: d.len(),
        bits_first_level: a.bits_first_level,
        bits_second_level: a.bits_second_level,
        bits_side: a.bits_side,
        bits_counters: a.bits_counters,
        bits_hash_descriptors: a.bits_hash_descriptors,
        bits_total: a.bits_total,
        info_bound: a.info_bound,
        limit,
        ratio: a.ratio,
        within: a.bits_total as f64 <= limit,
    })
}

/// `ceil(log2 C(u, n))` as a report row.
pub fn info_bound_row(u: u64, n: u64) -> (u64, u64, u64) {
    (u, n, info_bound(u, n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FprRow {
    pub seed: u64,
    pub n: u64,
    pub delta: f64,
    pub queries: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub fpr: f64,
    pub sigma: f64,
    pub bits: u64,
    pub bits_per_element: f64,
    pub bits_limit: f64,
}

/// `1.25 n log2(1/delta) + 64 n^0.95` plus the hash descriptor.
pub fn filter_bits_limit(n: u64, delta: f64, descriptor_bits: u64) -> f64 {
    1.25 * n as f64 * (1.0 / delta).log2() + 64.0 * (n as f64).powf(0.95) + descriptor_bits as f64
}

/// Builds a filter over `n` random keys and measures false positives on
/// `queries` fresh non-members.
pub fn fpr_trial(n: u64, delta: f64, queries: u64, seed: u64) -> Result<FprRow> {
    let mut f = MembershipFilter::new(n, delta, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf11e);
    let u = f.universe();
    let keys = distinct_keys(n, u, &mut rng);
    for &x in &keys {
        match f.insert(x) {
            Ok(()) | Err(Error::Capacity(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let false_negatives = keys
        .iter()
        .filter(|&&x| f.query(x) == Membership::DefinitelyAbsent)
        .count() as u64;
    let members: std::collections::HashSet<u64> = keys.into_iter().collect();
    let mut false_positives = 0;
    let mut asked = 0;
    while asked < queries {
        let x = rng.gen_range(0..u);
        if members.contains(&x) {
            continue;
        }
        asked += 1;
        false_positives += (f.query(x) == Membership::MaybePresent) as u64;
    }
    let bits = f.bits();
    Ok(FprRow {
        seed,
        n,
        delta,
        queries,
        false_positives,
        false_negatives,
        fpr: false_positives as f64 / queries as f64,
        sigma: (delta * (1.0 - delta) / queries as f64).sqrt(),
        bits,
        bits_per_element: bits as f64 / n as f64,
        bits_limit: filter_bits_limit(n, delta, f.hash().descriptor_bits()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub target: String,
    pub seed: u64,
    pub op: String,
    pub count: u64,
    pub nanos: u64,
    pub ns_per_op: f64,
}

/// Times `ops` inserts (up to capacity), then `ops` lookups and `ops`
/// deletes. Operation counts depend only on the inputs.
pub fn bench(target: &Target, ops: u64, seed: u64) -> Result<Vec<BenchRow>> {
    let mut dict = Dict::new(target, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbe4c);
    let u = target.universe();
    let keys = distinct_keys(ops.min(target.capacity()), u, &mut rng);
    let probes: Vec<u64> = (0..ops)
        .map(|i| {
            if i % 2 == 0 {
                keys[(i / 2) as usize % keys.len()]
            } else {
                rng.gen_range(0..u)
            }
        })
        .collect();
    let row = |op: &str, count: u64, t: Instant| {
        let nanos = t.elapsed().as_nanos() as u64;
        BenchRow {
            target: target.label(),
            seed,
            op: op.into(),
            count,
            nanos,
            ns_per_op: nanos as f64 / count.max(1) as f64,
        }
    };
    let t = Instant::now();
    for &x in &keys {
        dict.insert(x)?;
    }
    let mut rows = vec![row("insert", keys.len() as u64, t)];
    let t = Instant::now();
    let mut hits = 0u64;
    for &x in &probes {
        hits += dict.contains(x) as u64;
    }
    std::hint::black_box(hits);
    rows.push(row("lookup", probes.len() as u64, t));
    let t = Instant::now();
    for &x in &keys {
        dict.delete(x)?;
    }
    rows.push(row("delete", keys.len() as u64, t));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backyard::{CuckooMode, Overrides};
    use crate::bins::BinMode;

    fn small(bins: BinMode, ck: CuckooMode) -> Target {
        let o = Overrides {
            universe: Some(1 << 24),
            ..Overrides::default()
        };
        Target::Backyard(
            BackyardParams::derive_with(2048, 0.25, 2.0, &o)
                .unwrap()
                .with_bin_mode(bins)
                .with_cuckoo_mode(ck),
        )
    }

    #[test]
    fn fuzz_reports_are_clean_and_deterministic() {
        for bins in [BinMode::Plain, BinMode::PerfectHash] {
            for ck in [CuckooMode::Functions, CuckooMode::Permutations] {
                let t = small(bins, ck);
                let a = ops_fuzz_with(&t, 20_000, 3, 2_000).unwrap();
                assert!(a.clean(), "{a:?}");
                assert!(a.final_len > 1500);
                assert_eq!(a, ops_fuzz_with(&t, 20_000, 3, 2_000).unwrap());
            }
        }
        let s = Target::Succinct(SuccinctParams::derive(1 << 16, 1 << 10, 0.9, 0.25).unwrap());
        assert!(ops_fuzz(&s, 20_000, 1).unwrap().clean());
    }

    #[test]
    fn empty_run_is_trivially_clean() {
        let r = ops_fuzz(&small(BinMode::Plain, CuckooMode::Functions), 0, 0).unwrap();
        assert!(r.clean() && r.ops == 0 && r.final_len == 0);
    }

    #[test]
    fn starved_cuckoo_queue_fails_and_reports() {
        let o = Overrides {
            universe: Some(1 << 24),
            moves: Some(0),
            ..Overrides::default()
        };
        let p = BackyardParams::derive_with(2048, 0.25, 2.0, &o).unwrap();
        let r = ops_fuzz(&Target::Backyard(p.clone()), 50_000, 2).unwrap();
        assert!(r.structural_failure.is_some());
        assert_eq!(r.cuckoo_queue_high_water, p.cuckoo_queue_capacity as u64);
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn generous_moves_keep_queue_short() {
        let o = Overrides {
            universe: Some(1 << 24),
            moves: Some(1000),
            ..Overrides::default()
        };
        let p = BackyardParams::derive_with(2048, 0.25, 2.0, &o).unwrap();
        let r = ops_fuzz(&Target::Backyard(p), 20_000, 2).unwrap();
        assert!(r.cuckoo_queue_high_water <= 1, "{r:?}");
    }

    #[test]
    fn overflow_examples() {
        for map in [FirstLevelMap::Functions, FirstLevelMap::Permutation] {
            let r = overflow_trial(map, 4096, 0.25, 2.0, 1).unwrap();
            assert_eq!((r.d, r.m, r.limit), (64, 72, 64));
            assert!(r.overflow < 4096);
        }
        // n <= d: nothing can overflow
        let r = overflow_trial(FirstLevelMap::Functions, 60, 0.25, 2.0, 1).unwrap();
        assert_eq!(r.overflow, 0);
    }

    #[test]
    fn queue_limit_is_four_log_n() {
        assert_eq!(queue_limit(1 << 15), 60);
        assert_eq!(queue_limit(1024), 40);
        assert_eq!(queue_limit(1000), 40);
    }

    #[test]
    fn words_and_bits_rows() {
        let w = space_words(1 << 16, 0.25, 2.0, 0).unwrap();
        assert_eq!((w.core, w.limit), (77824, 81920));
        assert!(w.within && w.descriptor_words > 0);
        assert_eq!(info_bound_row(16, 4), (16, 4, 11));
    }

    #[test]
    fn fpr_row_counts() {
        let r = fpr_trial(500, 0.05, 20_000, 4).unwrap();
        assert_eq!(r.false_negatives, 0);
        assert!(r.fpr < 0.1);
        assert!((r.bits as f64) < r.bits_limit);
    }

    #[test]
    fn bench_counts_follow_config() {
        let rows = bench(&small(BinMode::Plain, CuckooMode::Functions), 1000, 1).unwrap();
        let counts: Vec<u64> = rows.iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![1000, 1000, 1000]);
    }
}

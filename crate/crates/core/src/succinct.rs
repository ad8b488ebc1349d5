//! Succinct dictionary: a one-round Feistel split sends each key to one of
//! `m_outer` outer bins; inside an outer bin the remaining part of the key
//! is stored by quotient, through a chopped permutation for the first level
//! and two permutations for the cuckoo level. The three permutations are
//! shared by all outer bins.

use crate::arith::{bits_for, ceil_exact, ceil_log2};
use crate::backyard::{bin_capacity, DEFAULT_BIN_STEPS, DEFAULT_C};
use crate::bins::{
    default_queue_capacity as bin_queue_capacity, BinInsert, BinMode, BinTable, FirstLevel, PhfBins,
};
use crate::bitpack::BitVec;
use crate::cuckoo::{self, Cuckoo, CuckooHashing, KickBack};
use crate::error::{Error, Result};
use crate::hash_family::KWiseHash;
use crate::meter::Meter;
use crate::permutations::{
    nr_unit_delta, truncate_universe, Chop, ChoppedPerm, FeistelMode, FeistelPerm, PermMode,
    MAX_RANDOM_PERM_SIZE,
};
use crate::ranked::{info_bound, RankedBins};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const DEFAULT_GAMMA: f64 = 0.9;
pub const DEFAULT_EPS: f64 = 0.25;
pub const MAX_OUTER_INDEPENDENCE: u64 = 64;
/// Largest single-unit dependence accepted when choosing `k`.
pub const MAX_UNIT_DELTA: f64 = 0.125;

/// How first-level bins store their quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinBackend {
    /// One fixed-width cell per slot.
    Cells(BinMode),
    /// One subset rank per bin.
    Ranked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccinctParams {
    pub u: u64,
    pub n: u64,
    pub gamma: f64,
    pub eps: f64,
    pub c: f64,
    pub m_outer: u64,
    /// Largest population an outer bin may reach.
    pub d_outer: u64,
    /// Independence of the Feistel round function.
    pub outer_k: usize,
    /// Keys below `u0 = m_outer * bin_universe` are split; the rest sit in
    /// a side bitmap.
    pub bin_universe: u64,
    pub d: u64,
    pub m: u64,
    pub ell: u64,
    pub r: u64,
    pub delta_fill: f64,
    pub moves: u32,
    pub bin_steps: u32,
    pub backend: BinBackend,
    pub perm_mode: PermMode,
    pub bin_queue_capacity: usize,
    pub cuckoo_queue_capacity: usize,
}

/// `mean + 4 sqrt(mean ln m)`, capped at `n`; `n` for a single bin.
pub fn outer_capacity(n: u64, m_outer: u64) -> u64 {
    if m_outer <= 1 {
        return n;
    }
    let mean = n as f64 / m_outer as f64;
    ceil_exact(mean + 4.0 * (mean * (m_outer as f64).ln()).sqrt()).clamp(1, n)
}

/// Truly random tables for small per-bin universes, otherwise [`nr_mode`].
pub fn default_perm_mode(bin_universe: u64, k: usize) -> PermMode {
    if bin_universe <= MAX_RANDOM_PERM_SIZE {
        return PermMode::TrulyRandom;
    }
    nr_mode(bin_universe, k)
}

/// Naor-Reingold units over `[0, bin_universe)` with the largest
/// independence up to `k` whose single-unit dependence is at most
/// [`MAX_UNIT_DELTA`].
pub fn nr_mode(bin_universe: u64, k: usize) -> PermMode {
    let w = bits_for(bin_universe).next_multiple_of(2);
    let mut k = k.max(2);
    while k > 2 && nr_unit_delta(k, w) > MAX_UNIT_DELTA {
        k -= 1;
    }
    PermMode::NaorReingold {
        k,
        delta_target: PermMode::DEFAULT_DELTA_TARGET,
    }
}

/// Largest per-bin universe given explicit tables by [`compact_perm_mode`].
pub const COMPACT_TABLE_LIMIT: u64 = 1 << 12;

/// Permutations with short descriptors: explicit tables only for tiny
/// universes, otherwise composed units with `k <= 4`.
pub fn compact_perm_mode(bin_universe: u64) -> PermMode {
    if bin_universe <= COMPACT_TABLE_LIMIT {
        return PermMode::TrulyRandom;
    }
    nr_mode(bin_universe, PermMode::DEFAULT_NR_K)
}

impl SuccinctParams {
    pub fn derive(u: u64, n: u64, gamma: f64, eps: f64) -> Result<Self> {
        if n == 0 || u < n {
            return Err(Error::param("need u >= n >= 1"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::param(format!("gamma = {gamma} is outside [0, 1]")));
        }
        let d_full = bin_capacity(eps, DEFAULT_C)?;
        let m_outer = ceil_exact((n as f64).powf(gamma))
            .max(1)
            .next_power_of_two();
        if m_outer > u {
            return Err(Error::param("more outer bins than universe values"));
        }
        let bin_universe = u / m_outer;
        let d_outer = outer_capacity(n, m_outer);
        let d = d_full.min(ceil_exact((1.0 + eps) * d_outer as f64)).max(1);
        let m = ceil_exact((1.0 + eps / 2.0) * d_outer as f64 / d as f64).max(1);
        let ell = ceil_exact(eps * d_outer as f64 / 16.0).max(1);
        let delta_fill = cuckoo::DEFAULT_DELTA_FILL;
        let r = cuckoo::table_size(ell, delta_fill)?;
        if m > bin_universe || r > bin_universe {
            return Err(Error::param(format!(
                "per-bin universe {bin_universe} is smaller than the inner tables"
            )));
        }
        let k = d_outer.clamp(2, MAX_OUTER_INDEPENDENCE) as usize;
        Ok(SuccinctParams {
            u,
            n,
            gamma,
            eps,
            c: DEFAULT_C,
            m_outer,
            d_outer,
            outer_k: k,
            bin_universe,
            d,
            m,
            ell,
            r,
            delta_fill,
            moves: cuckoo::DEFAULT_MOVES,
            bin_steps: DEFAULT_BIN_STEPS,
            backend: BinBackend::Cells(BinMode::Plain),
            perm_mode: default_perm_mode(bin_universe, k),
            bin_queue_capacity: bin_queue_capacity(d_outer),
            cuckoo_queue_capacity: cuckoo::default_queue_capacity(ell),
        })
    }

    pub fn with_backend(mut self, backend: BinBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_perm_mode(mut self, mode: PermMode) -> Self {
        self.perm_mode = mode;
        self
    }

    pub fn split_universe(&self) -> u64 {
        self.m_outer * self.bin_universe
    }

    pub fn insert_step_budget(&self) -> u64 {
        let (d, l) = (self.d, self.moves as u64);
        match self.backend {
            BinBackend::Cells(BinMode::Plain) => 2 * (d + 1) + 20 + l * (d + 8),
            BinBackend::Cells(BinMode::PerfectHash) => {
                20 + self.bin_steps as u64 + 6 * l + ceil_log2(d) as u64
            }
            BinBackend::Ranked => 3 * (d + 1) + 20 + l * (2 * d + 10),
        }
    }

    pub fn lookup_step_budget(&self) -> u64 {
        match self.backend {
            BinBackend::Cells(BinMode::PerfectHash) => 12,
            _ => self.d + 9,
        }
    }

    pub fn delete_step_budget(&self) -> u64 {
        match self.backend {
            BinBackend::Cells(BinMode::Plain) => 2 * self.d + 12,
            BinBackend::Cells(BinMode::PerfectHash) => {
                20 + self.bin_steps as u64 + ceil_log2(self.d) as u64
            }
            BinBackend::Ranked => 2 * self.d + 14,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
enum InnerBins {
    Cells(FirstLevel),
    Ranked(RankedBins),
}

impl InnerBins {
    fn has_vacancy(&self, bin: u64) -> bool {
        match self {
            InnerBins::Cells(f) => f.has_vacancy(bin),
            InnerBins::Ranked(r) => r.has_vacancy(bin),
        }
    }

    fn place(&mut self, bin: u64, q: u64) -> Result<()> {
        match self {
            InnerBins::Cells(f) => f.place(bin, q),
            InnerBins::Ranked(r) => match r.insert(bin, q)? {
                BinInsert::Inserted(_) => Ok(()),
                BinInsert::Full => Err(Error::Structural(format!("bin {bin} unexpectedly full"))),
            },
        }
    }

    fn contains(&self, bin: u64, q: u64) -> bool {
        match self {
            InnerBins::Cells(f) => f.contains(bin, q),
            InnerBins::Ranked(r) => r.contains(bin, q),
        }
    }

    fn remove(&mut self, bin: u64, q: u64) -> Result<bool> {
        match self {
            InnerBins::Cells(f) => f.remove(bin, q),
            InnerBins::Ranked(r) => Ok(r.delete(bin, q)),
        }
    }

    fn drive(&mut self) -> Result<u64> {
        match self {
            InnerBins::Cells(f) => f.drive(),
            InnerBins::Ranked(_) => Ok(0),
        }
    }

    fn members(&self, bin: u64) -> Vec<u64> {
        match self {
            InnerBins::Cells(f) => f.members(bin),
            InnerBins::Ranked(r) => r.decode(bin),
        }
    }

    fn queue_len(&self) -> usize {
        match self {
            InnerBins::Cells(f) => f.queue_len(),
            InnerBins::Ranked(_) => 0,
        }
    }

    fn steps(&self) -> u64 {
        match self {
            InnerBins::Cells(f) => f.steps(),
            InnerBins::Ranked(r) => r.steps(),
        }
    }

    fn bits(&self) -> u64 {
        match self {
            InnerBins::Cells(f) => f.bits(),
            InnerBins::Ranked(r) => r.bits(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InnerDict {
    bins: InnerBins,
    cuckoo: Cuckoo,
    /// Keys in `[kept, bin_universe)`.
    side: BitVec,
    len: u64,
}

impl InnerDict {
    fn steps(&self) -> u64 {
        self.bins.steps() + self.cuckoo.steps()
    }
}

struct QuotientHook<'a> {
    bins: &'a mut InnerBins,
    chop: &'a ChoppedPerm,
    meter: &'a Meter,
}

impl KickBack for QuotientHook<'_> {
    fn try_place(&mut self, key: u64) -> Result<bool> {
        self.meter.tick(1);
        match self.chop.chop(key)? {
            Chop::Slot { bin, quotient } if self.bins.has_vacancy(bin) => {
                self.bins.place(bin, quotient)?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

/// Bit-level footprint against the information bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceAudit {
    pub bits_first_level: u64,
    pub bits_second_level: u64,
    pub bits_side: u64,
    pub bits_counters: u64,
    pub bits_hash_descriptors: u64,
    pub bits_total: u64,
    pub info_bound: u64,
    pub ratio: f64,
}

/// Outer-bin loads of a key set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub max_load: u64,
    /// `histogram[l]` is the number of bins holding exactly `l` keys.
    pub histogram: Vec<u64>,
}

pub fn outer_bin_load_stats<I: IntoIterator<Item = u64>>(f: &FeistelPerm, keys: I) -> LoadStats {
    let mut loads = vec![0u64; f.left_size() as usize];
    for x in keys {
        loads[(f.apply(x) / f.right_size()) as usize] += 1;
    }
    let max_load = loads.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; max_load as usize + 1];
    for &l in &loads {
        histogram[l as usize] += 1;
    }
    LoadStats {
        max_load,
        histogram,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuccinctDict {
    params: SuccinctParams,
    outer: FeistelPerm,
    chop: ChoppedPerm,
    hashing: Arc<CuckooHashing>,
    /// Inner keys at or above this go to the inner side bitmap.
    inner_kept: u64,
    inner: Vec<InnerDict>,
    /// Keys in `[u0, u)`.
    side: BitVec,
    len: u64,
    second_len: u64,
    cuckoo_queue_high: usize,
    bin_queue_high: usize,
    failed: bool,
    #[serde(skip)]
    meter: Meter,
}

impl SuccinctDict {
    pub fn new(params: SuccinctParams, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = &params;
        let n_in = p.bin_universe;
        let f = if p.m_outer == 1 {
            KWiseHash::zero(n_in, 1)?
        } else {
            KWiseHash::sample(p.outer_k, n_in, p.m_outer, &mut rng)?
        };
        let outer = FeistelPerm::new(f, p.m_outer, n_in, FeistelMode::Xor)?;
        let (u1, _) = truncate_universe(n_in, p.m)?;
        let (u2, _) = truncate_universe(n_in, p.r)?;
        let chop = ChoppedPerm::new(p.perm_mode.sample(u1, &mut rng)?, p.m, n_in)?;
        let p1 = p.perm_mode.sample(u2, &mut rng)?;
        let p2 = p.perm_mode.sample(u2, &mut rng)?;
        let hashing = Arc::new(CuckooHashing::permutations(p1, p2, p.r)?);
        let inner_kept = u1.min(u2);
        let q = chop.quotient_range();
        let mut inner = Vec::with_capacity(p.m_outer as usize);
        for _ in 0..p.m_outer {
            let bins = match p.backend {
                BinBackend::Cells(BinMode::Plain) => InnerBins::Cells(FirstLevel::Plain(
                    BinTable::new(p.m, p.d as u32, bits_for(q))?,
                )),
                BinBackend::Cells(BinMode::PerfectHash) => {
                    InnerBins::Cells(FirstLevel::Phf(PhfBins::new(
                        p.m,
                        p.d as u32,
                        bits_for(q),
                        q,
                        p.bin_steps,
                        p.bin_queue_capacity,
                        rng.gen(),
                    )?))
                }
                BinBackend::Ranked => InnerBins::Ranked(RankedBins::new(p.m, p.d, q)?),
            };
            inner.push(InnerDict {
                bins,
                cuckoo: Cuckoo::new(p.ell, hashing.clone(), p.moves, p.cuckoo_queue_capacity)?,
                side: BitVec::zeros(n_in - inner_kept),
                len: 0,
            });
        }
        let side = BitVec::zeros(p.u - p.split_universe());
        Ok(SuccinctDict {
            params,
            outer,
            chop,
            hashing,
            inner_kept,
            inner,
            side,
            len: 0,
            second_len: 0,
            cuckoo_queue_high: 0,
            bin_queue_high: 0,
            failed: false,
            meter: Meter::default(),
        })
    }

    /// Re-links the shared cuckoo permutations after deserialization.
    pub fn relink(&mut self) -> Result<()> {
        for b in &mut self.inner {
            b.cuckoo.share_hashing(self.hashing.clone())?;
        }
        Ok(())
    }

    pub fn params(&self) -> &SuccinctParams {
        &self.params
    }

    pub fn outer(&self) -> &FeistelPerm {
        &self.outer
    }

    pub fn chopped(&self) -> &ChoppedPerm {
        &self.chop
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn steps(&self) -> u64 {
        self.meter.total()
    }

    /// Population of each outer bin.
    pub fn outer_loads(&self) -> Vec<u64> {
        self.inner.iter().map(|b| b.len).collect()
    }

    /// Longest cuckoo queue and longest bin queue seen in any outer bin.
    pub fn queue_high_water(&self) -> (usize, usize) {
        (self.cuckoo_queue_high, self.bin_queue_high)
    }

    pub fn second_level_len(&self) -> u64 {
        self.second_len
    }

    fn route(&self, x: u64) -> Option<(usize, u64)> {
        self.meter.tick(1);
        if x >= self.params.split_universe() {
            return None;
        }
        let y = self.outer.apply(x);
        let n_in = self.params.bin_universe;
        Some(((y / n_in) as usize, y % n_in))
    }

    /// Charges the work done inside outer bin `b` since `steps0` and
    /// refreshes the second-level counters.
    fn account(&mut self, b: usize, steps0: u64, cuckoo0: u64) {
        let inner = &self.inner[b];
        self.meter.tick(inner.steps() - steps0);
        self.second_len = self.second_len + inner.cuckoo.len() - cuckoo0;
        self.cuckoo_queue_high = self.cuckoo_queue_high.max(inner.cuckoo.queue_len());
        self.bin_queue_high = self.bin_queue_high.max(inner.bins.queue_len());
    }

    fn contains_at(&self, b: usize, xr: u64) -> bool {
        let inner = &self.inner[b];
        if xr >= self.inner_kept {
            return inner.side.get(xr - self.inner_kept);
        }
        let s0 = inner.steps();
        let hit = match self.chop.chop(xr) {
            Ok(Chop::Slot { bin, quotient }) => {
                inner.bins.contains(bin, quotient) || inner.cuckoo.contains(xr)
            }
            _ => false,
        };
        self.meter.tick(inner.steps() - s0);
        hit
    }

    pub fn contains(&self, x: u64) -> bool {
        if x >= self.params.u {
            return false;
        }
        match self.route(x) {
            Some((b, xr)) => self.contains_at(b, xr),
            None => self.side.get(x - self.params.split_universe()),
        }
    }

    fn fail<T>(&mut self, e: Error) -> Result<T> {
        if e.is_structural() {
            self.failed = true;
        }
        Err(e)
    }

    pub fn insert(&mut self, x: u64) -> Result<()> {
        if self.failed {
            return Err(Error::Failed);
        }
        if x >= self.params.u {
            return Err(Error::Domain {
                value: x,
                size: self.params.u,
            });
        }
        let Some((b, xr)) = self.route(x) else {
            let i = x - self.params.split_universe();
            if !self.side.get(i) {
                if self.len >= self.params.n {
                    return Err(Error::Capacity(self.params.n));
                }
                self.side.set(i, true);
                self.len += 1;
            }
            return Ok(());
        };
        if self.contains_at(b, xr) {
            return Ok(());
        }
        if self.len >= self.params.n {
            return Err(Error::Capacity(self.params.n));
        }
        if self.inner[b].len >= self.params.d_outer {
            return self.fail(Error::Structural(format!(
                "outer bin {b} already holds {} keys",
                self.params.d_outer
            )));
        }
        let kept = self.inner_kept;
        let inner = &mut self.inner[b];
        if xr >= kept {
            inner.side.set(xr - kept, true);
            inner.len += 1;
            self.len += 1;
            return Ok(());
        }
        let (s0, c0) = (inner.steps(), inner.cuckoo.len());
        let res = match self.chop.chop(xr) {
            Ok(Chop::Slot { bin, quotient }) => {
                let res = if inner.bins.has_vacancy(bin) {
                    inner.bins.place(bin, quotient).and_then(|_| {
                        let mut hook = QuotientHook {
                            bins: &mut inner.bins,
                            chop: &self.chop,
                            meter: &self.meter,
                        };
                        inner.cuckoo.drive(&mut hook)
                    })
                } else {
                    let mut hook = QuotientHook {
                        bins: &mut inner.bins,
                        chop: &self.chop,
                        meter: &self.meter,
                    };
                    inner.cuckoo.insert(xr, &mut hook)
                };
                res.and_then(|_| inner.bins.drive().map(|_| ()))
            }
            Ok(Chop::Ignored) => Err(Error::Structural("key beyond the chopped range".into())),
            Err(e) => Err(e),
        };
        self.account(b, s0, c0);
        match res {
            Ok(()) => {
                self.inner[b].len += 1;
                self.len += 1;
                Ok(())
            }
            Err(e) => {
                if self.contains_at(b, xr) {
                    self.inner[b].len += 1;
                    self.len += 1;
                }
                self.fail(e)
            }
        }
    }

    pub fn delete(&mut self, x: u64) -> Result<bool> {
        if self.failed {
            return Err(Error::Failed);
        }
        if x >= self.params.u {
            return Ok(false);
        }
        let Some((b, xr)) = self.route(x) else {
            let i = x - self.params.split_universe();
            let was = self.side.get(i);
            self.side.set(i, false);
            self.len -= was as u64;
            return Ok(was);
        };
        let kept = self.inner_kept;
        let inner = &mut self.inner[b];
        let (s0, c0) = (inner.steps(), inner.cuckoo.len());
        let removed = if xr >= kept {
            let was = inner.side.get(xr - kept);
            inner.side.set(xr - kept, false);
            Ok(was)
        } else {
            match self.chop.chop(xr)? {
                Chop::Slot { bin, quotient } => match inner.bins.remove(bin, quotient) {
                    Ok(true) => Ok(true),
                    Ok(false) => Ok(inner.cuckoo.delete(xr)),
                    Err(e) => Err(e),
                },
                Chop::Ignored => Ok(false),
            }
        };
        let removed = removed.and_then(|r| inner.bins.drive().map(|_| r));
        self.account(b, s0, c0);
        match removed {
            Ok(r) => {
                self.inner[b].len -= r as u64;
                self.len -= r as u64;
                Ok(r)
            }
            Err(e) => {
                if !self.contains_at(b, xr) && self.inner[b].len > 0 {
                    self.inner[b].len -= 1;
                    self.len -= 1;
                }
                self.fail(e)
            }
        }
    }

    /// Every member, rebuilt from its stored quotient.
    pub fn members(&self) -> Vec<u64> {
        let n_in = self.params.bin_universe;
        let mut out = Vec::with_capacity(self.len as usize);
        for (b, inner) in self.inner.iter().enumerate() {
            let full = |xr: u64| self.outer.invert(b as u64 * n_in + xr);
            for bin in 0..self.params.m {
                for q in inner.bins.members(bin) {
                    out.push(full(
                        self.chop.unchop(bin, q).expect("stored quotient in range"),
                    ));
                }
            }
            out.extend(inner.cuckoo.members().into_iter().map(full));
            out.extend(
                (0..inner.side.len())
                    .filter(|&i| inner.side.get(i))
                    .map(|i| full(i + self.inner_kept)),
            );
        }
        let base = self.params.split_universe();
        out.extend(
            (0..self.side.len())
                .filter(|&i| self.side.get(i))
                .map(|i| i + base),
        );
        out
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let members = self.members();
        if members.len() as u64 != self.len {
            return Err(format!("{} members but length {}", members.len(), self.len));
        }
        let mut sorted = members.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != members.len() {
            return Err("a key is stored in two places".into());
        }
        for (b, inner) in self.inner.iter().enumerate() {
            if inner.len > self.params.d_outer {
                return Err(format!("outer bin {b} holds {} keys", inner.len));
            }
            for bin in 0..self.params.m {
                let mut qs = inner.bins.members(bin);
                let k = qs.len();
                qs.sort_unstable();
                qs.dedup();
                if qs.len() != k {
                    return Err(format!("repeated quotient in bin {bin} of outer bin {b}"));
                }
            }
            inner.cuckoo.check_invariants()?;
        }
        if members.iter().any(|&x| !self.contains(x)) {
            return Err("a member is not found by lookup".into());
        }
        Ok(())
    }

    pub fn bits_used(&self) -> SpaceAudit {
        let p = &self.params;
        let bits_first_level: u64 = self.inner.iter().map(|b| b.bins.bits()).sum();
        let bits_second_level: u64 = self.inner.iter().map(|b| b.cuckoo.bits()).sum();
        let bits_side = self.side.len() + self.inner.iter().map(|b| b.side.len()).sum::<u64>();
        let bits_counters = p.m_outer * bits_for(p.d_outer + 1) as u64;
        let outer_bits = if p.m_outer == 1 {
            0
        } else {
            self.outer.round_function().descriptor_bits()
        };
        let bits_hash_descriptors =
            outer_bits + self.chop.inner().descriptor_bits() + self.hashing.descriptor_bits();
        let bits_total = bits_first_level
            + bits_second_level
            + bits_side
            + bits_counters
            + bits_hash_descriptors;
        let info_bound = info_bound(p.u, p.n);
        SpaceAudit {
            bits_first_level,
            bits_second_level,
            bits_side,
            bits_counters,
            bits_hash_descriptors,
            bits_total,
            info_bound,
            ratio: bits_total as f64 / info_bound.max(1) as f64,
        }
    }
}

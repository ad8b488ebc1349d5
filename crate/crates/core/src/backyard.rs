//! Two-level dictionary: `k`-wise hashing into bins of capacity `d`, with
//! overflow handled by a de-amortized cuckoo table whose moves first try to
//! send each element back to its bin.

use crate::arith::{bits_for, ceil_exact, ceil_log2};
use crate::bins::{
    default_queue_capacity as bin_queue_capacity, BinMode, BinTable, FirstLevel, PhfBins,
};
use crate::bitpack::BitVec;
use crate::cuckoo::{self, Cuckoo, CuckooHashing, KickBack};
use crate::error::{Error, Result};
use crate::hash_family::KWiseHash;
use crate::meter::Meter;
use crate::permutations::{truncate_universe, PermMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default key universe, the Mersenne prime `2^61 - 1`.
pub const DEFAULT_UNIVERSE: u64 = crate::arith::MERSENNE_61;
pub const DEFAULT_C: f64 = 2.0;
pub const DEFAULT_BIN_STEPS: u32 = 32;
pub const MAX_H0_INDEPENDENCE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuckooMode {
    Functions,
    Permutations,
}

/// `d = ceil(c log2(1/eps) / eps^2)`.
pub fn bin_capacity(eps: f64, c: f64) -> Result<u64> {
    check_eps(eps)?;
    if !(c > 0.0) {
        return Err(Error::param("overflow constant c must be positive"));
    }
    Ok(ceil_exact(c * (1.0 / eps).log2() / (eps * eps)).max(1))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps = {eps} is outside (0, 1)")));
    }
    Ok(())
}

/// Values that replace derived parameters; `None` keeps the formula.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub d: Option<u64>,
    pub m: Option<u64>,
    pub ell: Option<u64>,
    pub k: Option<usize>,
    pub moves: Option<u32>,
    pub bin_steps: Option<u32>,
    pub delta_fill: Option<f64>,
    pub universe: Option<u64>,
    /// Skip the `(1 + eps) n` word check (small test instances).
    pub relax_space: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackyardParams {
    pub n: u64,
    pub u: u64,
    pub eps: f64,
    pub c: f64,
    pub d: u64,
    pub m: u64,
    pub ell: u64,
    pub cuckoo_words: u64,
    pub r: u64,
    pub delta_fill: f64,
    pub moves: u32,
    pub bin_steps: u32,
    pub k: usize,
    pub bin_mode: BinMode,
    pub cuckoo_mode: CuckooMode,
    pub perm_mode: PermMode,
    pub bin_queue_capacity: usize,
    pub cuckoo_queue_capacity: usize,
}

impl BackyardParams {
    pub fn derive(n: u64, eps: f64, c: f64) -> Result<Self> {
        Self::derive_with(n, eps, c, &Overrides::default())
    }

    pub fn derive_with(n: u64, eps: f64, c: f64, o: &Overrides) -> Result<Self> {
        check_eps(eps)?;
        if n == 0 {
            return Err(Error::param("capacity n must be at least 1"));
        }
        let d = match o.d {
            Some(d) => d,
            None => bin_capacity(eps, c)?,
        };
        if d == 0 || d > u16::MAX as u64 {
            return Err(Error::param("bin capacity must be in [1, 65535]"));
        }
        let m =
            o.m.unwrap_or_else(|| ceil_exact((1.0 + eps / 2.0) * n as f64 / d as f64))
                .max(1);
        let ell = o
            .ell
            .unwrap_or_else(|| ceil_exact(eps * n as f64 / 16.0))
            .max(1);
        let cuckoo_words = ceil_exact(eps * n as f64 / 4.0);
        let delta_fill = o.delta_fill.unwrap_or(cuckoo::DEFAULT_DELTA_FILL);
        let r = cuckoo::table_size(ell, delta_fill)?;
        let u = o.universe.unwrap_or(DEFAULT_UNIVERSE);
        if u < n {
            return Err(Error::param("universe smaller than capacity"));
        }
        let p = BackyardParams {
            n,
            u,
            eps,
            c,
            d,
            m,
            ell,
            cuckoo_words,
            r,
            delta_fill,
            moves: o.moves.unwrap_or(cuckoo::DEFAULT_MOVES),
            bin_steps: o.bin_steps.unwrap_or(DEFAULT_BIN_STEPS),
            k: o.k.unwrap_or(MAX_H0_INDEPENDENCE.min(n as usize)).max(1),
            bin_mode: BinMode::Plain,
            cuckoo_mode: CuckooMode::Functions,
            perm_mode: PermMode::Auto,
            bin_queue_capacity: bin_queue_capacity(n),
            cuckoo_queue_capacity: cuckoo::default_queue_capacity(ell),
        };
        if !o.relax_space {
            p.check_space()?;
        }
        Ok(p)
    }

    pub fn with_bin_mode(mut self, mode: BinMode) -> Self {
        self.bin_mode = mode;
        self
    }

    pub fn with_cuckoo_mode(mut self, mode: CuckooMode) -> Self {
        self.cuckoo_mode = mode;
        self
    }

    pub fn with_perm_mode(mut self, mode: PermMode) -> Self {
        self.perm_mode = mode;
        self
    }

    /// First-level cells plus the cuckoo word budget.
    pub fn core_words(&self) -> u64 {
        self.m * self.d + self.cuckoo_words
    }

    /// `floor((1 + eps) n)`.
    pub fn word_limit(&self) -> u64 {
        let x = (1.0 + self.eps) * self.n as f64;
        let r = x.round();
        if (x - r).abs() <= 1e-9 * x {
            r as u64
        } else {
            x.floor() as u64
        }
    }

    pub fn check_space(&self) -> Result<()> {
        if self.core_words() > self.word_limit() {
            return Err(Error::param(format!(
                "{} core words exceed (1 + eps) n = {}",
                self.core_words(),
                self.word_limit()
            )));
        }
        if 2 * self.r > self.cuckoo_words {
            return Err(Error::param(format!(
                "cuckoo tables need {} words, budget is {}",
                2 * self.r,
                self.cuckoo_words
            )));
        }
        Ok(())
    }

    /// Step bound for one insert.
    pub fn insert_step_budget(&self) -> u64 {
        let moves = self.moves as u64;
        match self.bin_mode {
            BinMode::Plain => 2 * (self.d + 1) + 16 + moves * (self.d + 8),
            BinMode::PerfectHash => {
                16 + self.bin_steps as u64 + 6 * moves + ceil_log2(self.d) as u64
            }
        }
    }

    pub fn lookup_step_budget(&self) -> u64 {
        match self.bin_mode {
            BinMode::Plain => self.d + 5,
            BinMode::PerfectHash => 8,
        }
    }

    pub fn delete_step_budget(&self) -> u64 {
        match self.bin_mode {
            BinMode::Plain => 2 * self.d + 8,
            BinMode::PerfectHash => 16 + self.bin_steps as u64 + ceil_log2(self.d) as u64,
        }
    }
}

/// Number of elements that find their bin already holding `d` others,
/// given the bin of every element.
pub fn overflow_count<I: IntoIterator<Item = u64>>(bins: I, m: u64, d: u64) -> u64 {
    let mut load = vec![0u64; m as usize];
    let mut over = 0;
    for b in bins {
        let l = &mut load[b as usize];
        if *l >= d {
            over += 1;
        }
        *l += 1;
    }
    over
}

/// Word counts of the allocated structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceWords {
    pub bin_cells: u64,
    pub cuckoo_cells: u64,
    pub cuckoo_queue: u64,
    pub cuckoo_budget: u64,
    pub descriptor_words: u64,
    pub side_words: u64,
    pub core: u64,
    pub limit: u64,
}

struct BinHook<'a> {
    first: &'a mut FirstLevel,
    h0: &'a KWiseHash,
    meter: &'a Meter,
}

impl KickBack for BinHook<'_> {
    fn try_place(&mut self, key: u64) -> Result<bool> {
        self.meter.tick(1);
        let bin = self.h0.hash(key);
        if self.first.has_vacancy(bin) {
            self.first.place(bin, key)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

/// Where a member currently lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Bin(u64),
    CuckooTable(usize),
    CuckooQueue,
    Side,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BackyardDict {
    params: BackyardParams,
    h0: KWiseHash,
    first: FirstLevel,
    cuckoo: Cuckoo,
    /// Keys at or above the cuckoo permutation universe.
    side: Option<BitVec>,
    side_base: u64,
    len: u64,
    failed: bool,
    #[serde(skip)]
    meter: Meter,
}

impl BackyardDict {
    pub fn new(params: BackyardParams, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = &params;
        let h0 = KWiseHash::sample(p.k, p.u, p.m, &mut rng)?;
        let cell_bits = bits_for(p.u);
        let first = match p.bin_mode {
            BinMode::Plain => FirstLevel::Plain(BinTable::new(p.m, p.d as u32, cell_bits)?),
            BinMode::PerfectHash => FirstLevel::Phf(PhfBins::new(
                p.m,
                p.d as u32,
                cell_bits,
                p.u,
                p.bin_steps,
                p.bin_queue_capacity,
                rng.gen(),
            )?),
        };
        let (hashing, side, side_base) = match p.cuckoo_mode {
            CuckooMode::Functions => {
                let k = p.k.max(2);
                (
                    CuckooHashing::sample_functions(k, p.u, p.r, &mut rng)?,
                    None,
                    p.u,
                )
            }
            CuckooMode::Permutations => {
                let (u2, ignored) = truncate_universe(p.u, p.r)?;
                let p1 = p.perm_mode.sample(u2, &mut rng)?;
                let p2 = p.perm_mode.sample(u2, &mut rng)?;
                let side =
                    (!ignored.is_empty()).then(|| BitVec::zeros(ignored.end - ignored.start));
                (CuckooHashing::permutations(p1, p2, p.r)?, side, u2)
            }
        };
        let cuckoo = Cuckoo::new(p.ell, Arc::new(hashing), p.moves, p.cuckoo_queue_capacity)?;
        Ok(BackyardDict {
            params,
            h0,
            first,
            cuckoo,
            side,
            side_base,
            len: 0,
            failed: false,
            meter: Meter::default(),
        })
    }

    /// Replaces `h0`; only allowed while empty.
    pub fn set_first_hash(&mut self, h0: KWiseHash) -> Result<()> {
        if self.len != 0 {
            return Err(Error::param(
                "first-level hash can only be replaced while empty",
            ));
        }
        if h0.range() != self.params.m || h0.universe() != self.params.u {
            return Err(Error::param("first-level hash must map [u] to [m]"));
        }
        self.h0 = h0;
        Ok(())
    }

    pub fn params(&self) -> &BackyardParams {
        &self.params
    }

    pub fn first_hash(&self) -> &KWiseHash {
        &self.h0
    }

    pub fn first_level(&self) -> &FirstLevel {
        &self.first
    }

    pub fn cuckoo(&self) -> &Cuckoo {
        &self.cuckoo
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

    /// Total unit steps performed so far.
    pub fn steps(&self) -> u64 {
        self.meter.total() + self.first.steps() + self.cuckoo.steps()
    }

    fn check_key(&self, x: u64) -> Result<()> {
        if x >= self.params.u {
            return Err(Error::Domain {
                value: x,
                size: self.params.u,
            });
        }
        Ok(())
    }

    fn bin_of(&self, x: u64) -> u64 {
        self.meter.tick(1);
        self.h0.hash(x)
    }

    fn is_side(&self, x: u64) -> bool {
        x >= self.side_base
    }

    pub fn contains(&self, x: u64) -> bool {
        if x >= self.params.u {
            return false;
        }
        if self.is_side(x) {
            self.meter.tick(1);
            return self
                .side
                .as_ref()
                .is_some_and(|s| s.get(x - self.side_base));
        }
        self.first.contains(self.bin_of(x), x) || self.cuckoo.contains(x)
    }

    pub fn locate(&self, x: u64) -> Option<Location> {
        if x >= self.params.u {
            return None;
        }
        if self.is_side(x) {
            return self
                .side
                .as_ref()
                .is_some_and(|s| s.get(x - self.side_base))
                .then_some(Location::Side);
        }
        let bin = self.h0.hash(x);
        if self.first.contains(bin, x) {
            return Some(Location::Bin(bin));
        }
        match self.cuckoo.position(x)? {
            Some(b) => Some(Location::CuckooTable(b)),
            None => Some(Location::CuckooQueue),
        }
    }

    fn fail<T>(&mut self, e: Error) -> Result<T> {
        if e.is_structural() {
            self.failed = true;
        }
        Err(e)
    }

    /// Inserts `x`; a present key is left alone.
    pub fn insert(&mut self, x: u64) -> Result<()> {
        if self.failed {
            return Err(Error::Failed);
        }
        self.check_key(x)?;
        if self.contains(x) {
            return Ok(());
        }
        if self.len >= self.params.n {
            return Err(Error::Capacity(self.params.n));
        }
        if self.is_side(x) {
            let base = self.side_base;
            self.side
                .as_mut()
                .expect("side range exists")
                .set(x - base, true);
            self.meter.tick(1);
            self.len += 1;
            return Ok(());
        }
        let bin = self.bin_of(x);
        let res = if self.first.has_vacancy(bin) {
            self.first.place(bin, x).and_then(|_| {
                let mut hook = BinHook {
                    first: &mut self.first,
                    h0: &self.h0,
                    meter: &self.meter,
                };
                self.cuckoo.drive(&mut hook)
            })
        } else {
            let mut hook = BinHook {
                first: &mut self.first,
                h0: &self.h0,
                meter: &self.meter,
            };
            self.cuckoo.insert(x, &mut hook)
        };
        let res = res.and_then(|_| self.first.drive().map(|_| ()));
        match res {
            Ok(()) => {
                self.len += 1;
                Ok(())
            }
            Err(e) => {
                // the key is stored even when the queue overflowed
                if self.locate(x).is_some() {
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
        if self.is_side(x) {
            self.meter.tick(1);
            let base = self.side_base;
            let s = self.side.as_mut().expect("side range exists");
            let was = s.get(x - base);
            s.set(x - base, false);
            self.len -= was as u64;
            return Ok(was);
        }
        let bin = self.bin_of(x);
        let removed = match self.first.remove(bin, x) {
            Ok(true) => true,
            Ok(false) => self.cuckoo.delete(x),
            Err(e) => {
                self.len -= 1;
                return self.fail(e);
            }
        };
        self.len -= removed as u64;
        if let Err(e) = self.first.drive() {
            return self.fail(e);
        }
        Ok(removed)
    }

    /// Keys currently held by the cuckoo level (tables and queue).
    pub fn second_level_len(&self) -> u64 {
        self.cuckoo.len()
    }

    pub fn space_words(&self) -> SpaceWords {
        let p = &self.params;
        let desc_bits = self.h0.descriptor_bits() + self.cuckoo.hashing().descriptor_bits();
        let side_bits = self.side.as_ref().map_or(0, |s| s.len());
        SpaceWords {
            bin_cells: p.m * p.d,
            cuckoo_cells: 2 * p.r,
            cuckoo_queue: p.cuckoo_queue_capacity as u64,
            cuckoo_budget: p.cuckoo_words,
            descriptor_words: desc_bits.div_ceil(64),
            side_words: side_bits.div_ceil(64),
            core: p.core_words(),
            limit: p.word_limit(),
        }
    }

    /// Allocated bits: bins, cuckoo tables and queue, side bitmap and
    /// hash descriptors.
    pub fn bits(&self) -> u64 {
        self.first.bits()
            + self.cuckoo.bits()
            + self.side.as_ref().map_or(0, |s| s.len())
            + self.h0.descriptor_bits()
            + self.cuckoo.hashing().descriptor_bits()
    }

    /// Every member, in no particular order.
    pub fn members(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len as usize);
        for bin in 0..self.params.m {
            match &self.first {
                FirstLevel::Plain(t) => out.extend(t.ids(bin)),
                FirstLevel::Phf(p) => out.extend(p.members(bin)),
            }
        }
        out.extend(self.cuckoo.members());
        if let Some(s) = &self.side {
            out.extend(
                (0..s.len())
                    .filter(|&i| s.get(i))
                    .map(|i| i + self.side_base),
            );
        }
        out
    }

    /// Checks single location per member, bin placement and counts.
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
        for bin in 0..self.params.m {
            if let FirstLevel::Plain(t) = &self.first {
                for id in t.ids(bin) {
                    if self.h0.hash(id) != bin {
                        return Err(format!("key {id} in bin {bin} but hashes elsewhere"));
                    }
                }
            }
        }
        if let FirstLevel::Phf(p) = &self.first {
            p.check_invariants()?;
        }
        self.cuckoo.check_invariants()
    }
}

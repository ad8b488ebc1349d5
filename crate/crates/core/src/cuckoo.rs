//! De-amortized cuckoo hashing.
//!
//! Two tables of `r` cells and a FIFO queue of pending `(key, table)` pairs.
//! Every insert appends to the back of the queue and then performs at most
//! `L` moves starting from the head. An element still in flight after `L`
//! moves goes back to the head. A walk that closes a second cycle sends its
//! current element to the back of the queue.
//!
//! In permutation mode the tables store only the low part of `pi_b(x)`; the
//! high part is the cell index, so an evicted key is rebuilt by inverting
//! `pi_b`.

use crate::arith::{bits_for, ceil_exact, ceil_log2};
use crate::bitpack::{BitVec, PackedArray};
use crate::error::{Error, Result};
use crate::hash_family::KWiseHash;
use crate::meter::Meter;
use crate::permutations::Permutation;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

pub const DEFAULT_DELTA_FILL: f64 = 0.2;
pub const DEFAULT_MOVES: u32 = 10;

/// Called on every element before it is moved. Returning `true` means the
/// element was stored elsewhere and leaves the cuckoo structure.
pub trait KickBack {
    fn try_place(&mut self, key: u64) -> Result<bool>;
}

/// Hook that never takes an element.
pub struct NoKickBack;

impl KickBack for NoKickBack {
    fn try_place(&mut self, _key: u64) -> Result<bool> {
        Ok(false)
    }
}

/// `r = ceil((1 + delta_fill) * ell)`.
pub fn table_size(ell: u64, delta_fill: f64) -> Result<u64> {
    if ell == 0 {
        return Err(Error::param("cuckoo capacity must be at least 1"));
    }
    if !(delta_fill > 0.0) {
        return Err(Error::param("fill slack must be positive"));
    }
    Ok(ceil_exact((1.0 + delta_fill) * ell as f64))
}

/// Default queue capacity `4 * ceil(log2 ell) + 4`.
pub fn default_queue_capacity(ell: u64) -> usize {
    4 * ceil_log2(ell.max(1)) as usize + 4
}

/// The two hash choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CuckooHashing {
    /// Independent `k`-wise functions into `[r]`; cells hold whole keys.
    Functions { h1: KWiseHash, h2: KWiseHash },
    /// Permutations of `[0, universe)` with `r | universe`; cells hold
    /// `pi_b(x) mod (universe / r)`.
    Permutations {
        p1: Permutation,
        p2: Permutation,
        r: u64,
    },
}

impl CuckooHashing {
    pub fn sample_functions<R: Rng + ?Sized>(
        k: usize,
        universe: u64,
        r: u64,
        rng: &mut R,
    ) -> Result<Self> {
        Ok(CuckooHashing::Functions {
            h1: KWiseHash::sample(k, universe, r, rng)?,
            h2: KWiseHash::sample(k, universe, r, rng)?,
        })
    }

    pub fn permutations(p1: Permutation, p2: Permutation, r: u64) -> Result<Self> {
        let u = p1.size();
        if p2.size() != u {
            return Err(Error::param("cuckoo permutations must share a universe"));
        }
        if r == 0 || u % r != 0 {
            return Err(Error::param(format!(
                "table size {r} does not divide universe {u}"
            )));
        }
        Ok(CuckooHashing::Permutations { p1, p2, r })
    }

    pub fn universe(&self) -> u64 {
        match self {
            CuckooHashing::Functions { h1, .. } => h1.universe(),
            CuckooHashing::Permutations { p1, .. } => p1.size(),
        }
    }

    pub fn table_size(&self) -> u64 {
        match self {
            CuckooHashing::Functions { h1, .. } => h1.range(),
            CuckooHashing::Permutations { r, .. } => *r,
        }
    }

    /// Width of a stored cell.
    pub fn cell_bits(&self) -> u32 {
        match self {
            CuckooHashing::Functions { h1, .. } => bits_for(h1.universe()),
            CuckooHashing::Permutations { p1, r, .. } => bits_for(p1.size() / r),
        }
    }

    /// Cell index and stored value of `x` in table `b` (0 or 1).
    #[inline]
    pub fn locate(&self, x: u64, b: usize) -> (u64, u64) {
        match self {
            CuckooHashing::Functions { h1, h2 } => {
                let h = if b == 0 { h1 } else { h2 };
                (h.hash(x), x)
            }
            CuckooHashing::Permutations { p1, p2, r } => {
                let p = if b == 0 { p1 } else { p2 };
                let q = p.size() / r;
                let y = p.apply(x);
                (y / q, y % q)
            }
        }
    }

    /// Key stored as `value` in cell `idx` of table `b`.
    #[inline]
    pub fn reconstruct(&self, b: usize, idx: u64, value: u64) -> u64 {
        match self {
            CuckooHashing::Functions { .. } => value,
            CuckooHashing::Permutations { p1, p2, r } => {
                let p = if b == 0 { p1 } else { p2 };
                let q = p.size() / r;
                p.invert(idx * q + value)
            }
        }
    }

    pub fn descriptor_bits(&self) -> u64 {
        match self {
            CuckooHashing::Functions { h1, h2 } => h1.descriptor_bits() + h2.descriptor_bits(),
            CuckooHashing::Permutations { p1, p2, .. } => {
                p1.descriptor_bits() + p2.descriptor_bits()
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuckooStats {
    pub inserts: u64,
    pub moves: u64,
    pub kickbacks: u64,
    pub second_cycles: u64,
    pub queue_high_water: u64,
    pub failures: u64,
    /// Largest population seen; may exceed the sizing capacity.
    pub max_len: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cuckoo {
    ell: u64,
    r: u64,
    moves: u32,
    hashing: Arc<CuckooHashing>,
    cells: [PackedArray; 2],
    occupied: [BitVec; 2],
    /// `(key, table, generation)`; entries whose generation no longer
    /// matches the index were deleted and are skipped.
    queue: VecDeque<(u64, u8, u64)>,
    index: BTreeMap<u64, u64>,
    next_gen: u64,
    walk_head: Option<(u64, u64)>,
    cdm: BTreeSet<(u64, u8)>,
    cycle_closed: bool,
    queue_capacity: usize,
    failed: bool,
    in_tables: u64,
    stats: CuckooStats,
    #[serde(skip)]
    meter: Meter,
}

impl Cuckoo {
    pub fn new(
        ell: u64,
        hashing: Arc<CuckooHashing>,
        moves: u32,
        queue_capacity: usize,
    ) -> Result<Self> {
        if ell == 0 {
            return Err(Error::param("cuckoo capacity must be at least 1"));
        }
        if queue_capacity == 0 {
            return Err(Error::param("cuckoo queue capacity must be at least 1"));
        }
        let r = hashing.table_size();
        if r == 0 {
            return Err(Error::param("cuckoo tables need at least one cell"));
        }
        let w = hashing.cell_bits();
        Ok(Cuckoo {
            ell,
            r,
            moves,
            cells: [PackedArray::new(r, w), PackedArray::new(r, w)],
            occupied: [BitVec::zeros(r), BitVec::zeros(r)],
            hashing,
            queue: VecDeque::new(),
            index: BTreeMap::new(),
            next_gen: 0,
            walk_head: None,
            cdm: BTreeSet::new(),
            cycle_closed: false,
            queue_capacity,
            failed: false,
            in_tables: 0,
            stats: CuckooStats::default(),
            meter: Meter::default(),
        })
    }

    /// Function mode with `r = ceil((1 + delta_fill) ell)` and default queue.
    pub fn with_functions<R: Rng + ?Sized>(
        ell: u64,
        delta_fill: f64,
        k: usize,
        universe: u64,
        moves: u32,
        rng: &mut R,
    ) -> Result<Self> {
        let r = table_size(ell, delta_fill)?;
        let h = CuckooHashing::sample_functions(k, universe, r, rng)?;
        Cuckoo::new(ell, Arc::new(h), moves, default_queue_capacity(ell))
    }

    pub fn capacity(&self) -> u64 {
        self.ell
    }

    pub fn table_size(&self) -> u64 {
        self.r
    }

    pub fn moves_per_insert(&self) -> u32 {
        self.moves
    }

    pub fn set_moves(&mut self, moves: u32) {
        self.moves = moves;
    }

    pub fn hashing(&self) -> &Arc<CuckooHashing> {
        &self.hashing
    }

    /// Replaces the hashing with an equal shared instance.
    pub fn share_hashing(&mut self, hashing: Arc<CuckooHashing>) -> Result<()> {
        if *hashing != *self.hashing {
            return Err(Error::param("replacement hashing differs"));
        }
        self.hashing = hashing;
        Ok(())
    }

    pub fn stats(&self) -> &CuckooStats {
        &self.stats
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn queue_len(&self) -> usize {
        self.index.len()
    }

    pub fn queue_capacity(&self) -> usize {
        self.queue_capacity
    }

    pub fn len(&self) -> u64 {
        self.in_tables + self.index.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> u64 {
        self.meter.total()
    }

    fn check_key(&self, x: u64) -> Result<()> {
        let u = self.hashing.universe();
        if x >= u {
            return Err(Error::Domain { value: x, size: u });
        }
        Ok(())
    }

    fn table_slot(&self, x: u64) -> Option<(usize, u64)> {
        for b in 0..2 {
            let (idx, v) = self.hashing.locate(x, b);
            if self.occupied[b].get(idx) && self.cells[b].get(idx) == v {
                return Some((b, idx));
            }
        }
        None
    }

    pub fn contains(&self, x: u64) -> bool {
        self.meter.tick(3);
        if x >= self.hashing.universe() {
            return false;
        }
        self.table_slot(x).is_some() || self.index.contains_key(&x)
    }

    /// Where `x` currently sits: `Some(Some(b))` in table `b`, `Some(None)`
    /// in the queue.
    pub fn position(&self, x: u64) -> Option<Option<usize>> {
        if let Some((b, _)) = self.table_slot(x) {
            return Some(Some(b));
        }
        self.index.contains_key(&x).then_some(None)
    }

    pub fn delete(&mut self, x: u64) -> bool {
        self.meter.tick(3);
        if x >= self.hashing.universe() {
            return false;
        }
        if let Some((b, idx)) = self.table_slot(x) {
            self.occupied[b].set(idx, false);
            self.in_tables -= 1;
            return true;
        }
        self.index.remove(&x).is_some()
    }

    fn enqueue_back(&mut self, x: u64, b: u8) -> Result<()> {
        if self.index.len() >= self.queue_capacity {
            self.failed = true;
            self.stats.failures += 1;
            return Err(Error::Structural(format!(
                "cuckoo queue exceeded its capacity of {}",
                self.queue_capacity
            )));
        }
        let gen = self.next_gen;
        self.next_gen += 1;
        self.queue.push_back((x, b, gen));
        self.index.insert(x, gen);
        self.stats.queue_high_water = self.stats.queue_high_water.max(self.index.len() as u64);
        self.meter.tick(1);
        Ok(())
    }

    fn enqueue_head(&mut self, x: u64, b: u8) {
        let gen = self.next_gen;
        self.next_gen += 1;
        self.queue.push_front((x, b, gen));
        self.index.insert(x, gen);
        self.walk_head = Some((x, gen));
        self.stats.queue_high_water = self.stats.queue_high_water.max(self.index.len() as u64);
        self.meter.tick(1);
    }

    fn reset_cdm(&mut self) {
        self.cdm.clear();
        self.cycle_closed = false;
    }

    /// True when `(y, b)` repeats after the walk already closed one cycle.
    /// The first repeat closes a cycle and restarts the record.
    fn second_cycle(&mut self, y: u64, b: u8) -> bool {
        if !self.cdm.contains(&(y, b)) {
            return false;
        }
        if self.cycle_closed {
            return true;
        }
        self.cycle_closed = true;
        self.cdm.clear();
        false
    }

    /// Adds `x` at the back of the queue and performs up to `L` moves.
    /// Inserting a present key does nothing.
    pub fn insert(&mut self, x: u64, hook: &mut dyn KickBack) -> Result<()> {
        if self.failed {
            return Err(Error::Failed);
        }
        self.check_key(x)?;
        if self.contains(x) {
            return Ok(());
        }
        self.stats.inserts += 1;
        self.enqueue_back(x, 0)?;
        self.stats.max_len = self.stats.max_len.max(self.len());
        self.run(hook)
    }

    /// Performs up to `L` moves without adding anything.
    pub fn drive(&mut self, hook: &mut dyn KickBack) -> Result<()> {
        if self.failed {
            return Err(Error::Failed);
        }
        if self.index.is_empty() {
            return Ok(());
        }
        self.run(hook)
    }

    fn run(&mut self, hook: &mut dyn KickBack) -> Result<()> {
        let mut cur: Option<(u64, u8)> = None;
        for _ in 0..self.moves {
            self.meter.tick(1);
            let (y, b) = match cur {
                Some(c) => c,
                None => {
                    let Some((y, b, gen)) = self.queue.pop_front() else {
                        break;
                    };
                    if self.index.get(&y) != Some(&gen) {
                        continue;
                    }
                    self.index.remove(&y);
                    if self.walk_head != Some((y, gen)) {
                        self.reset_cdm();
                    }
                    self.walk_head = None;
                    (y, b)
                }
            };
            self.stats.moves += 1;
            if hook.try_place(y)? {
                self.stats.kickbacks += 1;
                self.reset_cdm();
                cur = None;
                continue;
            }
            let t = b as usize;
            let (idx, v) = self.hashing.locate(y, t);
            if !self.occupied[t].get(idx) {
                self.cells[t].set(idx, v);
                self.occupied[t].set(idx, true);
                self.in_tables += 1;
                self.reset_cdm();
                cur = None;
            } else if self.second_cycle(y, b) {
                self.stats.second_cycles += 1;
                self.reset_cdm();
                cur = None;
                self.enqueue_back(y, b)?;
            } else {
                let z = self.hashing.reconstruct(t, idx, self.cells[t].get(idx));
                self.cells[t].set(idx, v);
                self.cdm.insert((y, b));
                cur = Some((z, 1 - b));
            }
        }
        if let Some((y, b)) = cur {
            self.enqueue_head(y, b);
        }
        Ok(())
    }

    /// Full key held in cell `idx` of table `b`, if occupied.
    pub fn reconstruct(&self, b: usize, idx: u64) -> Option<u64> {
        self.occupied[b]
            .get(idx)
            .then(|| self.hashing.reconstruct(b, idx, self.cells[b].get(idx)))
    }

    /// All members, tables first then the queue.
    pub fn members(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for b in 0..2 {
            for idx in 0..self.r {
                if let Some(x) = self.reconstruct(b, idx) {
                    out.push(x);
                }
            }
        }
        out.extend(self.index.keys().copied());
        out
    }

    /// Largest number of unit steps one insert may take, excluding hook work.
    pub fn insert_step_bound(&self) -> u64 {
        // membership check, enqueue, moves, and a re-enqueue at the end
        3 + 1 + self.moves as u64 + 1
    }

    /// Tables with occupancy bits plus the queue at full capacity.
    pub fn bits(&self) -> u64 {
        let w = self.hashing.cell_bits() as u64;
        let key_bits = bits_for(self.hashing.universe()) as u64;
        2 * self.r * (w + 1) + self.queue_capacity as u64 * (key_bits + 1)
    }

    /// Checks that every member has exactly one location and that cells
    /// sit at their canonical index.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        let mut in_tables = 0;
        for b in 0..2 {
            for idx in 0..self.r {
                if let Some(x) = self.reconstruct(b, idx) {
                    if self.hashing.locate(x, b).0 != idx {
                        return Err(format!("key {x} off its cell in table {b}"));
                    }
                    if !seen.insert(x) {
                        return Err(format!("key {x} stored twice"));
                    }
                    in_tables += 1;
                }
            }
        }
        if in_tables != self.in_tables {
            return Err("table count drifted".into());
        }
        for x in self.index.keys() {
            if !seen.insert(*x) {
                return Err(format!("key {x} both queued and stored"));
            }
        }
        if self.index.len() > self.queue_capacity {
            return Err("queue over capacity".into());
        }
        Ok(())
    }
}

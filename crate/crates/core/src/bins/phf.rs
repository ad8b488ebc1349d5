//! Perfect-hashed bins with a single de-amortization queue.
//!
//! Each bin keeps a pairwise hash `h` into `[d^2]` and a sorted association
//! list `g` from hash values to slots. Inserts are queued and finished a few
//! unit steps at a time. A rehash of one bin (on a collision, or after `nu`
//! updates) runs as a phased state machine in the same step currency:
//! copy the live cells out, resample `h` until it is injective on them,
//! clear the bin, copy back while rebuilding `g`. At most one bin is being
//! rehashed at any moment.

use super::BinTable;
use crate::arith::{bits_for, ceil_log2};
use crate::error::{Error, Result};
use crate::hash_family::PairwiseHash;
use crate::meter::Meter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Per-bin perfect hash descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectBinHash {
    h: PairwiseHash,
    g: Vec<(u32, u16)>,
    nu: u16,
    updates: u16,
}

impl PerfectBinHash {
    pub fn sample<R: Rng + ?Sized>(id_universe: u64, d: u32, rng: &mut R) -> Result<Self> {
        let h = PairwiseHash::sample(id_universe, d as u64 * d as u64, rng)?;
        let nu = rng.gen_range(1..=d) as u16;
        Ok(PerfectBinHash::from_parts(h, nu))
    }

    pub fn from_parts(h: PairwiseHash, nu: u16) -> Self {
        PerfectBinHash {
            h,
            g: Vec::new(),
            nu: nu.max(1),
            updates: 0,
        }
    }

    pub fn hash(&self) -> &PairwiseHash {
        &self.h
    }

    #[inline]
    pub fn r(&self, id: u64) -> u32 {
        self.h.hash(id) as u32
    }

    pub fn probe(&self, r: u32) -> Option<u16> {
        self.g
            .binary_search_by_key(&r, |e| e.0)
            .ok()
            .map(|i| self.g[i].1)
    }

    fn unlink(&mut self, r: u32) {
        if let Ok(i) = self.g.binary_search_by_key(&r, |e| e.0) {
            self.g.remove(i);
        }
    }

    fn link(&mut self, r: u32, slot: u16) {
        match self.g.binary_search_by_key(&r, |e| e.0) {
            Ok(_) => panic!("g already maps {r}"),
            Err(i) => self.g.insert(i, (r, slot)),
        }
    }

    pub fn entries(&self) -> &[(u32, u16)] {
        &self.g
    }

    pub fn nu(&self) -> u16 {
        self.nu
    }

    pub fn updates(&self) -> u16 {
        self.updates
    }

    /// `h` coefficients plus `g` laid out as `d` pairs of a hash value in
    /// `[d^2]` and a slot in `[d]`. The rehash counter is accounted with
    /// the other per-bin counters.
    pub fn descriptor_bits(&self, d: u32) -> u64 {
        let d64 = d as u64;
        self.h.descriptor_bits() + d64 * (bits_for(d64 * d64) + bits_for(d64)) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum BinOp {
    Insert { bin: u64, id: u64, gen: u64 },
    Rehash { bin: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum InsertStage {
    Hash,
    Write { r: u32 },
    Link { r: u32, slot: u16 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Phase {
    CopyOut,
    Resample,
    Clear,
    CopyBack,
    Finish,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Rehash {
    bin: u64,
    phase: Phase,
    cursor: u32,
    /// Queued insert folded into this rehash: (id, gen, staging index).
    trigger: Option<(u64, u64, Option<u32>)>,
    staging: Vec<u64>,
    dead: Vec<bool>,
    from_slot: Vec<Option<u32>>,
    new_h: Option<PairwiseHash>,
    rvals: Vec<u32>,
    rmap: BTreeMap<u32, u32>,
    new_g: Vec<(u32, u16)>,
}

impl Rehash {
    fn staging_index(&self, id: u64) -> Option<u32> {
        let h = self.new_h.as_ref()?;
        let j = *self.rmap.get(&(h.hash(id) as u32))?;
        (self.staging[j as usize] == id && !self.dead[j as usize]).then_some(j)
    }

    fn uses_staging(&self) -> bool {
        matches!(self.phase, Phase::Clear | Phase::CopyBack | Phase::Finish)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
enum Active {
    Insert {
        bin: u64,
        id: u64,
        gen: u64,
        stage: InsertStage,
    },
    Rehash(Box<Rehash>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhfStats {
    /// Queued inserts that reached the head of the queue.
    pub inserts_processed: u64,
    /// Inserts whose processing started a rehash of their bin.
    pub insert_rehashes: u64,
    pub collision_rehashes: u64,
    pub forced_rehashes: u64,
    pub rehashes: u64,
    pub resamples: u64,
    pub max_resamples: u64,
    pub queue_high_water: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhfBins {
    table: BinTable,
    phf: Vec<PerfectBinHash>,
    live: Vec<u16>,
    pending: Vec<u16>,
    scheduled: Vec<bool>,
    queue: VecDeque<BinOp>,
    index: BTreeMap<(u64, u64), u64>,
    next_gen: u64,
    active: Option<Active>,
    id_universe: u64,
    steps_per_op: u32,
    queue_capacity: usize,
    resamples_now: u64,
    rng: ChaCha8Rng,
    stats: PhfStats,
}

impl PhfBins {
    pub fn new(
        m: u64,
        d: u32,
        cell_bits: u32,
        id_universe: u64,
        steps_per_op: u32,
        queue_capacity: usize,
        seed: u64,
    ) -> Result<Self> {
        if steps_per_op == 0 {
            return Err(Error::param("bin queue step budget must be at least 1"));
        }
        if queue_capacity == 0 {
            return Err(Error::param("bin queue capacity must be at least 1"));
        }
        if cell_bits < 64 && id_universe > 1u64 << cell_bits {
            return Err(Error::param("identity universe exceeds cell width"));
        }
        let table = BinTable::new(m, d, cell_bits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phf = (0..m)
            .map(|_| PerfectBinHash::sample(id_universe, d, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhfBins {
            table,
            phf,
            live: vec![0; m as usize],
            pending: vec![0; m as usize],
            scheduled: vec![false; m as usize],
            queue: VecDeque::new(),
            index: BTreeMap::new(),
            next_gen: 0,
            active: None,
            id_universe,
            steps_per_op,
            queue_capacity,
            resamples_now: 0,
            rng,
            stats: PhfStats::default(),
        })
    }

    pub fn bins(&self) -> u64 {
        self.table.bins()
    }

    pub fn capacity(&self) -> u32 {
        self.table.capacity()
    }

    pub fn steps_per_op(&self) -> u32 {
        self.steps_per_op
    }

    pub fn queue_capacity(&self) -> usize {
        self.queue_capacity
    }

    pub fn stats(&self) -> &PhfStats {
        &self.stats
    }

    pub fn descriptor(&self, bin: u64) -> &PerfectBinHash {
        &self.phf[bin as usize]
    }

    /// Replaces the descriptor of an empty, idle bin.
    pub fn set_descriptor(&mut self, bin: u64, pbh: PerfectBinHash) -> Result<()> {
        if self.reserved(bin) != 0 || self.rehashing() == Some(bin) {
            return Err(Error::param(
                "descriptor can only be replaced on an empty bin",
            ));
        }
        if pbh.h.range() != self.capacity() as u64 * self.capacity() as u64 {
            return Err(Error::param("descriptor hash must map into [d^2]"));
        }
        self.phf[bin as usize] = pbh;
        Ok(())
    }

    /// Live and queued identities of `bin`; capacity is checked against
    /// this total.
    pub fn reserved(&self, bin: u64) -> u32 {
        let b = bin as usize;
        self.live[b] as u32 + self.pending[b] as u32
    }

    pub fn has_vacancy(&self, bin: u64) -> bool {
        self.meter().tick(1);
        self.reserved(bin) < self.capacity()
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len() + self.active.is_some() as usize
    }

    pub fn rehashing(&self) -> Option<u64> {
        match &self.active {
            Some(Active::Rehash(rh)) => Some(rh.bin),
            _ => None,
        }
    }

    fn meter(&self) -> &Meter {
        self.table.meter()
    }

    pub fn steps(&self) -> u64 {
        self.meter().total()
    }

    fn push(&mut self, op: BinOp) -> Result<()> {
        if self.queue_len() >= self.queue_capacity {
            return Err(Error::Structural(format!(
                "bin queue exceeded its capacity of {}",
                self.queue_capacity
            )));
        }
        self.queue.push_back(op);
        self.stats.queue_high_water = self.stats.queue_high_water.max(self.queue_len() as u64);
        self.meter().tick(1);
        Ok(())
    }

    /// Queues `id` for insertion into `bin`. The caller has checked for a
    /// vacancy and for duplicates; the element is visible at once.
    pub fn enqueue_insert(&mut self, bin: u64, id: u64) -> Result<()> {
        if bin >= self.bins() {
            return Err(Error::Domain {
                value: bin,
                size: self.bins(),
            });
        }
        if id >= self.id_universe {
            return Err(Error::Domain {
                value: id,
                size: self.id_universe,
            });
        }
        if self.reserved(bin) >= self.capacity() {
            return Err(Error::Structural(format!("bin {bin} has no vacancy")));
        }
        let gen = self.next_gen;
        self.push(BinOp::Insert { bin, id, gen })?;
        self.next_gen += 1;
        self.index.insert((bin, id), gen);
        self.pending[bin as usize] += 1;
        Ok(())
    }

    /// Inserts and then runs one operation's budget of queue work.
    pub fn insert(&mut self, bin: u64, id: u64) -> Result<()> {
        self.enqueue_insert(bin, id)?;
        self.process_queue(self.steps_per_op as u64)?;
        Ok(())
    }

    /// Slot of a live, settled element found through the current `h` and `g`.
    fn settled_slot(&self, bin: u64, id: u64) -> Option<u32> {
        let pbh = &self.phf[bin as usize];
        let slot = pbh.probe(pbh.r(id))? as u32;
        (self.table.is_occupied(bin, slot) && self.table.read(bin, slot) == id).then_some(slot)
    }

    pub fn contains(&self, bin: u64, id: u64) -> bool {
        self.meter().tick(3);
        if self.index.contains_key(&(bin, id)) {
            return true;
        }
        if let Some(Active::Rehash(rh)) = &self.active {
            if rh.bin == bin && rh.uses_staging() {
                return rh.staging_index(id).is_some();
            }
        }
        self.settled_slot(bin, id).is_some()
    }

    pub fn delete(&mut self, bin: u64, id: u64) -> Result<bool> {
        self.meter().tick(3);
        let b = bin as usize;
        if let Some(gen) = self.index.remove(&(bin, id)) {
            // queued or in flight; cancel lazily
            self.pending[b] -= 1;
            match &mut self.active {
                Some(Active::Insert {
                    bin: ab,
                    id: aid,
                    gen: ag,
                    stage,
                }) if *ab == bin && *aid == id && *ag == gen => {
                    if let InsertStage::Link { slot, .. } = *stage {
                        self.table.set_occupied(bin, slot as u32, false);
                    }
                    self.active = None;
                }
                Some(Active::Rehash(rh)) if rh.bin == bin => {
                    if let Some((tid, tgen, pos)) = rh.trigger {
                        if tid == id && tgen == gen {
                            match pos {
                                Some(j) => kill_staged(&mut self.table, rh, j),
                                None => rh.trigger = None,
                            }
                        }
                    }
                }
                _ => {}
            }
            return Ok(true);
        }
        if let Some(Active::Rehash(rh)) = &mut self.active {
            if rh.bin == bin {
                if rh.uses_staging() {
                    return Ok(match rh.staging_index(id) {
                        Some(j) => {
                            kill_staged(&mut self.table, rh, j);
                            self.live[b] -= 1;
                            true
                        }
                        None => false,
                    });
                }
                // old layout still live: release the cell, and drop the
                // staged copy if it was already taken
                let pbh = &mut self.phf[b];
                let r = pbh.r(id);
                let found = pbh
                    .probe(r)
                    .map(|s| s as u32)
                    .filter(|&s| self.table.is_occupied(bin, s) && self.table.read(bin, s) == id);
                return Ok(match found {
                    Some(s) => {
                        self.table.set_occupied(bin, s, false);
                        pbh.unlink(r);
                        self.live[b] -= 1;
                        if let Some(j) = rh.from_slot[s as usize] {
                            rh.dead[j as usize] = true;
                        }
                        true
                    }
                    None => false,
                });
            }
        }
        let Some(slot) = self.settled_slot(bin, id) else {
            return Ok(false);
        };
        self.table.set_occupied(bin, slot, false);
        let pbh = &mut self.phf[b];
        let r = pbh.r(id);
        pbh.unlink(r);
        self.live[b] -= 1;
        self.bump_updates(bin)?;
        Ok(true)
    }

    /// Runs up to `budget` unit steps of queued work; returns steps used.
    pub fn process_queue(&mut self, budget: u64) -> Result<u64> {
        let mut used = 0;
        while used < budget {
            if self.active.is_none() {
                let Some(op) = self.queue.pop_front() else {
                    break;
                };
                used += 1;
                self.activate(op);
                continue;
            }
            self.step()?;
            used += 1;
        }
        self.meter().tick(used);
        Ok(used)
    }

    /// Drains the queue completely.
    pub fn flush(&mut self) -> Result<u64> {
        let mut total = 0;
        while self.queue_len() > 0 {
            total += self.process_queue(u64::MAX)?;
        }
        Ok(total)
    }

    fn activate(&mut self, op: BinOp) {
        match op {
            BinOp::Insert { bin, id, gen } => {
                if self.index.get(&(bin, id)) == Some(&gen) {
                    self.stats.inserts_processed += 1;
                    self.active = Some(Active::Insert {
                        bin,
                        id,
                        gen,
                        stage: InsertStage::Hash,
                    });
                }
            }
            BinOp::Rehash { bin } => {
                if self.scheduled[bin as usize] {
                    self.start_rehash(bin, None, false);
                }
            }
        }
    }

    fn start_rehash(&mut self, bin: u64, trigger: Option<(u64, u64)>, collision: bool) {
        self.stats.rehashes += 1;
        if collision {
            self.stats.collision_rehashes += 1;
        } else {
            self.stats.forced_rehashes += 1;
        }
        if trigger.is_some() {
            self.stats.insert_rehashes += 1;
        }
        self.resamples_now = 0;
        let d = self.capacity() as usize;
        self.active = Some(Active::Rehash(Box::new(Rehash {
            bin,
            phase: Phase::CopyOut,
            cursor: 0,
            trigger: trigger.map(|(id, gen)| (id, gen, None)),
            staging: Vec::with_capacity(d),
            dead: Vec::with_capacity(d),
            from_slot: vec![None; d],
            new_h: None,
            rvals: Vec::with_capacity(d),
            rmap: BTreeMap::new(),
            new_g: Vec::with_capacity(d),
        })));
    }

    /// One unit step of the active item.
    fn step(&mut self) -> Result<()> {
        match self.active.take() {
            Some(Active::Insert {
                bin,
                id,
                gen,
                stage,
            }) => self.step_insert(bin, id, gen, stage)?,
            Some(Active::Rehash(rh)) => self.step_rehash(rh),
            None => {}
        }
        Ok(())
    }

    fn bump_updates(&mut self, bin: u64) -> Result<()> {
        let b = bin as usize;
        let pbh = &mut self.phf[b];
        pbh.updates = pbh.updates.saturating_add(1);
        if pbh.updates >= pbh.nu && !self.scheduled[b] {
            self.scheduled[b] = true;
            self.push(BinOp::Rehash { bin })?;
        }
        Ok(())
    }

    fn step_insert(&mut self, bin: u64, id: u64, gen: u64, stage: InsertStage) -> Result<()> {
        let b = bin as usize;
        match stage {
            InsertStage::Hash => {
                let pbh = &self.phf[b];
                let r = pbh.r(id);
                if pbh.probe(r).is_some() {
                    self.start_rehash(bin, Some((id, gen)), true);
                } else if pbh.updates + 1 >= pbh.nu {
                    self.start_rehash(bin, Some((id, gen)), false);
                } else {
                    self.active = Some(Active::Insert {
                        bin,
                        id,
                        gen,
                        stage: InsertStage::Write { r },
                    });
                }
            }
            InsertStage::Write { r } => {
                let slot = self
                    .table
                    .first_free(bin)
                    .expect("reserved count keeps a free slot");
                self.table.write(bin, slot, id);
                self.table.set_occupied(bin, slot, true);
                self.active = Some(Active::Insert {
                    bin,
                    id,
                    gen,
                    stage: InsertStage::Link {
                        r,
                        slot: slot as u16,
                    },
                });
            }
            InsertStage::Link { r, slot } => {
                self.phf[b].link(r, slot);
                self.index.remove(&(bin, id));
                self.pending[b] -= 1;
                self.live[b] += 1;
                self.bump_updates(bin)?;
            }
        }
        Ok(())
    }

    fn step_rehash(&mut self, mut rh: Box<Rehash>) {
        let bin = rh.bin;
        let b = bin as usize;
        let d = self.capacity();
        match rh.phase {
            Phase::CopyOut => {
                let s = rh.cursor;
                if self.table.is_occupied(bin, s) {
                    rh.from_slot[s as usize] = Some(rh.staging.len() as u32);
                    rh.staging.push(self.table.read(bin, s));
                    rh.dead.push(false);
                }
                rh.cursor += 1;
                if rh.cursor == d {
                    if let Some((id, gen, _)) = rh.trigger {
                        if self.index.get(&(bin, id)) == Some(&gen) {
                            rh.trigger = Some((id, gen, Some(rh.staging.len() as u32)));
                            rh.staging.push(id);
                            rh.dead.push(false);
                        } else {
                            rh.trigger = None;
                        }
                    }
                    rh.phase = Phase::Resample;
                    rh.cursor = 0;
                }
            }
            Phase::Resample => match &rh.new_h {
                None => {
                    let universe = self.id_universe;
                    rh.new_h = Some(
                        PairwiseHash::sample(universe, d as u64 * d as u64, &mut self.rng)
                            .expect("parameters validated at construction"),
                    );
                    rh.rmap.clear();
                    rh.rvals.clear();
                    rh.cursor = 0;
                    self.stats.resamples += 1;
                    self.resamples_now += 1;
                    self.stats.max_resamples = self.stats.max_resamples.max(self.resamples_now);
                    if rh.staging.is_empty() {
                        rh.phase = Phase::Clear;
                    }
                }
                Some(h) => {
                    let j = rh.cursor;
                    let r = h.hash(rh.staging[j as usize]) as u32;
                    rh.rvals.push(r);
                    if !rh.dead[j as usize] && rh.rmap.insert(r, j).is_some() {
                        rh.new_h = None;
                    } else {
                        rh.cursor += 1;
                        if rh.cursor as usize == rh.staging.len() {
                            // dead entries may share values; drop them from the map
                            rh.rmap.retain(|_, v| !rh.dead[*v as usize]);
                            rh.phase = Phase::Clear;
                            rh.cursor = 0;
                        }
                    }
                }
            },
            Phase::Clear => {
                let from = rh.cursor;
                let to = (from + 64).min(d);
                self.table.clear_occupancy(bin, from, to);
                rh.cursor = to;
                if to == d {
                    rh.phase = Phase::CopyBack;
                    rh.cursor = 0;
                }
            }
            Phase::CopyBack => {
                let j = rh.cursor;
                if !rh.dead[j as usize] {
                    self.table.write(bin, j, rh.staging[j as usize]);
                    self.table.set_occupied(bin, j, true);
                    let r = rh.rvals[j as usize];
                    let pos = rh.new_g.partition_point(|e| e.0 < r);
                    rh.new_g.insert(pos, (r, j as u16));
                }
                rh.cursor += 1;
                if rh.cursor as usize == rh.staging.len() {
                    rh.phase = Phase::Finish;
                }
            }
            Phase::Finish => {
                let nu = self.rng.gen_range(1..=d) as u16;
                let mut pbh = PerfectBinHash::from_parts(rh.new_h.take().expect("sampled"), nu);
                pbh.g = std::mem::take(&mut rh.new_g);
                self.phf[b] = pbh;
                if let Some((id, gen, _)) = rh.trigger {
                    if self.index.get(&(bin, id)) == Some(&gen) {
                        self.index.remove(&(bin, id));
                        self.pending[b] -= 1;
                    }
                }
                self.live[b] = rh.dead.iter().filter(|&&x| !x).count() as u16;
                self.scheduled[b] = false;
                return;
            }
        }
        if rh.phase == Phase::CopyBack && rh.staging.is_empty() {
            rh.phase = Phase::Finish;
        }
        self.active = Some(Active::Rehash(rh));
    }

    /// Identities currently visible in `bin`.
    pub fn members(&self, bin: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .index
            .range((bin, 0)..=(bin, u64::MAX))
            .map(|(&(_, id), _)| id)
            .collect();
        match &self.active {
            Some(Active::Rehash(rh)) if rh.bin == bin && rh.uses_staging() => {
                out.extend(
                    rh.staging
                        .iter()
                        .zip(&rh.dead)
                        .filter(|(_, &dead)| !dead)
                        .map(|(&id, _)| id)
                        .filter(|id| !self.index.contains_key(&(bin, *id))),
                );
            }
            _ => {
                let d = self.capacity();
                for s in 0..d {
                    if self.table.is_occupied(bin, s) {
                        let id = self.table.read(bin, s);
                        if self.settled_slot(bin, id) == Some(s) {
                            out.push(id);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Cells and occupancy bitmap, per-bin descriptors and counters, and
    /// the queue at full capacity.
    pub fn bits(&self) -> u64 {
        let m = self.bins();
        let d = self.capacity() as u64;
        let counter = bits_for(d + 1) as u64;
        let descriptors: u64 = self.phf.iter().map(|p| p.descriptor_bits(d as u32)).sum();
        let op_bits = 1 + bits_for(m) as u64 + bits_for(self.id_universe) as u64;
        self.table.cell_payload_bits()
            + descriptors
            + m * (3 * counter + 1)
            + self.queue_capacity as u64 * op_bits
    }

    /// Worst-case unit steps charged to one external insert.
    pub fn insert_step_bound(&self) -> u64 {
        // vacancy check, enqueue, queue work, and a g search
        2 + self.steps_per_op as u64 + ceil_log2(self.capacity() as u64) as u64
    }
}

fn kill_staged(table: &mut BinTable, rh: &mut Rehash, j: u32) {
    rh.dead[j as usize] = true;
    if rh.phase == Phase::CopyBack || rh.phase == Phase::Finish {
        if j < rh.cursor || rh.phase == Phase::Finish {
            table.set_occupied(rh.bin, j, false);
            let r = rh.rvals[j as usize];
            if let Ok(i) = rh.new_g.binary_search_by_key(&r, |e| e.0) {
                if rh.new_g[i].1 as u32 == j {
                    rh.new_g.remove(i);
                }
            }
        }
    }
    let r = rh.rvals.get(j as usize).copied();
    if let Some(r) = r {
        if rh.rmap.get(&r) == Some(&j) {
            rh.rmap.remove(&r);
        }
    }
}

/// Default queue capacity `4 * ceil(log2 n)`.
pub fn default_queue_capacity(n: u64) -> usize {
    (4 * ceil_log2(n.max(2))) as usize
}

impl PhfBins {
    /// Checks the structural invariants; used by tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let d = self.capacity();
        for bin in 0..self.bins() {
            let b = bin as usize;
            if self.reserved(bin) > d {
                return Err(format!("bin {bin} over capacity"));
            }
            if self.rehashing() == Some(bin) {
                continue;
            }
            let pbh = &self.phf[b];
            let mut slots: Vec<u16> = pbh.g.iter().map(|e| e.1).collect();
            slots.sort_unstable();
            slots.dedup();
            if slots.len() != pbh.g.len() {
                return Err(format!("g not injective in bin {bin}"));
            }
            let mut live = 0;
            for s in 0..d {
                if self.table.is_occupied(bin, s) {
                    let id = self.table.read(bin, s);
                    if pbh.probe(pbh.r(id)) == Some(s as u16) {
                        live += 1;
                    } else if !matches!(self.active, Some(Active::Insert { bin: ab, .. }) if ab == bin)
                    {
                        return Err(format!("slot {s} of bin {bin} not reachable through g"));
                    }
                }
            }
            if live != self.live[b] {
                return Err(format!(
                    "live count of bin {bin} is {} but {live} reachable",
                    self.live[b]
                ));
            }
            if pbh.updates >= pbh.nu && !self.scheduled[b] {
                return Err(format!("bin {bin} passed its rehash threshold"));
            }
        }
        Ok(())
    }
}

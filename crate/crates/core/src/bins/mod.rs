//! First-level bins of fixed capacity `d`.
//!
//! Two layouts share the same packed cell array: plain bins scanned
//! linearly, and perfect-hashed bins ([`PhfBins`]) whose updates are
//! de-amortized through a single queue shared by all bins.

mod phf;

pub use phf::{default_queue_capacity, PerfectBinHash, PhfBins, PhfStats};

use crate::arith::bits_for;
use crate::bitpack::{BitVec, PackedArray};
use crate::error::{Error, Result};
use crate::meter::Meter;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinMode {
    Plain,
    PerfectHash,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinInsert {
    Inserted(u32),
    Full,
}

/// `m` bins of `d` cells, each cell `cell_bits` wide, plus an occupancy
/// bitmap and per-bin load counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BinTable {
    m: u64,
    d: u32,
    cells: PackedArray,
    occupied: BitVec,
    load: Vec<u16>,
    #[serde(skip)]
    meter: Meter,
}

impl BinTable {
    pub fn new(m: u64, d: u32, cell_bits: u32) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::param("bin table needs m >= 1 and d >= 1"));
        }
        if d > u16::MAX as u32 {
            return Err(Error::param("bin capacity above 65535"));
        }
        if cell_bits > 64 {
            return Err(Error::param("cells are at most 64 bits"));
        }
        let cells = m
            .checked_mul(d as u64)
            .ok_or_else(|| Error::param("bin table too large"))?;
        Ok(BinTable {
            m,
            d,
            cells: PackedArray::new(cells, cell_bits),
            occupied: BitVec::zeros(cells),
            load: vec![0; m as usize],
            meter: Meter::default(),
        })
    }

    pub fn bins(&self) -> u64 {
        self.m
    }

    pub fn capacity(&self) -> u32 {
        self.d
    }

    pub fn cell_bits(&self) -> u32 {
        self.cells.width()
    }

    #[inline]
    fn base(&self, bin: u64) -> u64 {
        bin * self.d as u64
    }

    pub fn load(&self, bin: u64) -> u32 {
        self.load[bin as usize] as u32
    }

    pub fn has_vacancy(&self, bin: u64) -> bool {
        self.meter.tick(1);
        (self.load[bin as usize] as u32) < self.d
    }

    pub fn lookup(&self, bin: u64, id: u64) -> Option<u32> {
        let base = self.base(bin);
        let mut probes = 1;
        let mut found = None;
        for s in 0..self.d as u64 {
            if self.occupied.get(base + s) {
                probes += 1;
                if self.cells.get(base + s) == id {
                    found = Some(s as u32);
                    break;
                }
            }
        }
        self.meter.tick(probes);
        found
    }

    /// Stores `id` in the lowest free slot of `bin`.
    pub fn insert(&mut self, bin: u64, id: u64) -> Result<BinInsert> {
        self.check_bin(bin)?;
        if self.lookup(bin, id).is_some() {
            return Err(Error::Duplicate(id));
        }
        if self.load[bin as usize] as u32 >= self.d {
            return Ok(BinInsert::Full);
        }
        let base = self.base(bin);
        let slot = self
            .occupied
            .first_zero(base, base + self.d as u64)
            .expect("load below capacity implies a free slot")
            - base;
        self.write(bin, slot as u32, id);
        self.occupied.set(base + slot, true);
        self.load[bin as usize] += 1;
        self.meter.tick(2);
        Ok(BinInsert::Inserted(slot as u32))
    }

    pub fn delete(&mut self, bin: u64, id: u64) -> bool {
        match self.lookup(bin, id) {
            Some(slot) => {
                self.occupied.set(self.base(bin) + slot as u64, false);
                self.load[bin as usize] -= 1;
                self.meter.tick(1);
                true
            }
            None => false,
        }
    }

    pub fn ids(&self, bin: u64) -> impl Iterator<Item = u64> + '_ {
        let base = self.base(bin);
        (0..self.d as u64)
            .filter(move |&s| self.occupied.get(base + s))
            .map(move |s| self.cells.get(base + s))
    }

    fn check_bin(&self, bin: u64) -> Result<()> {
        if bin >= self.m {
            return Err(Error::Domain {
                value: bin,
                size: self.m,
            });
        }
        Ok(())
    }

    // Raw slot access for the perfect-hash layout, which keeps its own counts.

    #[inline]
    pub(crate) fn read(&self, bin: u64, slot: u32) -> u64 {
        self.cells.get(self.base(bin) + slot as u64)
    }

    #[inline]
    pub(crate) fn write(&mut self, bin: u64, slot: u32, id: u64) {
        let b = self.base(bin);
        self.cells.set(b + slot as u64, id)
    }

    #[inline]
    pub(crate) fn is_occupied(&self, bin: u64, slot: u32) -> bool {
        self.occupied.get(self.base(bin) + slot as u64)
    }

    #[inline]
    pub(crate) fn set_occupied(&mut self, bin: u64, slot: u32, v: bool) {
        let b = self.base(bin);
        self.occupied.set(b + slot as u64, v)
    }

    pub(crate) fn first_free(&self, bin: u64) -> Option<u32> {
        let base = self.base(bin);
        self.occupied
            .first_zero(base, base + self.d as u64)
            .map(|s| (s - base) as u32)
    }

    pub(crate) fn clear_occupancy(&mut self, bin: u64, from: u32, to: u32) {
        let b = self.base(bin);
        self.occupied.clear_range(b + from as u64, b + to as u64)
    }

    /// Cells, occupancy bitmap and load counters.
    pub fn bits(&self) -> u64 {
        self.cell_payload_bits() + self.m * bits_for(self.d as u64 + 1) as u64
    }

    /// Cells plus occupancy bitmap only.
    pub(crate) fn cell_payload_bits(&self) -> u64 {
        self.cells.payload_bits() + self.occupied.len()
    }

    pub fn steps(&self) -> u64 {
        self.meter.total()
    }

    pub(crate) fn meter(&self) -> &Meter {
        &self.meter
    }
}

/// First-level storage in either layout, with the operations the
/// dictionaries need.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum FirstLevel {
    Plain(BinTable),
    Phf(PhfBins),
}

impl FirstLevel {
    pub fn bins(&self) -> u64 {
        match self {
            FirstLevel::Plain(t) => t.bins(),
            FirstLevel::Phf(p) => p.bins(),
        }
    }

    pub fn capacity(&self) -> u32 {
        match self {
            FirstLevel::Plain(t) => t.capacity(),
            FirstLevel::Phf(p) => p.capacity(),
        }
    }

    pub fn has_vacancy(&self, bin: u64) -> bool {
        match self {
            FirstLevel::Plain(t) => t.has_vacancy(bin),
            FirstLevel::Phf(p) => p.has_vacancy(bin),
        }
    }

    /// Places `id` in `bin`, which must have a vacancy. In perfect-hash
    /// layout the element is queued and becomes visible immediately.
    pub fn place(&mut self, bin: u64, id: u64) -> Result<()> {
        match self {
            FirstLevel::Plain(t) => match t.insert(bin, id)? {
                BinInsert::Inserted(_) => Ok(()),
                BinInsert::Full => Err(Error::Structural(format!("bin {bin} unexpectedly full"))),
            },
            FirstLevel::Phf(p) => p.enqueue_insert(bin, id),
        }
    }

    pub fn contains(&self, bin: u64, id: u64) -> bool {
        match self {
            FirstLevel::Plain(t) => t.lookup(bin, id).is_some(),
            FirstLevel::Phf(p) => p.contains(bin, id),
        }
    }

    pub fn remove(&mut self, bin: u64, id: u64) -> Result<bool> {
        match self {
            FirstLevel::Plain(t) => Ok(t.delete(bin, id)),
            FirstLevel::Phf(p) => p.delete(bin, id),
        }
    }

    /// Runs one operation's worth of deferred bin work.
    pub fn drive(&mut self) -> Result<u64> {
        match self {
            FirstLevel::Plain(_) => Ok(0),
            FirstLevel::Phf(p) => p.process_queue(p.steps_per_op() as u64),
        }
    }

    pub fn queue_len(&self) -> usize {
        match self {
            FirstLevel::Plain(_) => 0,
            FirstLevel::Phf(p) => p.queue_len(),
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            FirstLevel::Plain(t) => t.steps(),
            FirstLevel::Phf(p) => p.steps(),
        }
    }

    pub fn bits(&self) -> u64 {
        match self {
            FirstLevel::Plain(t) => t.bits(),
            FirstLevel::Phf(p) => p.bits(),
        }
    }

    /// Number of stored (or queued) identities in `bin`.
    pub fn occupancy(&self, bin: u64) -> u32 {
        match self {
            FirstLevel::Plain(t) => t.load(bin),
            FirstLevel::Phf(p) => p.reserved(bin),
        }
    }

    pub fn phf(&self) -> Option<&PhfBins> {
        match self {
            FirstLevel::Plain(_) => None,
            FirstLevel::Phf(p) => Some(p),
        }
    }

    /// Identities held by `bin`, including queued ones.
    pub fn members(&self, bin: u64) -> Vec<u64> {
        match self {
            FirstLevel::Plain(t) => t.ids(bin).collect(),
            FirstLevel::Phf(p) => p.members(bin),
        }
    }
}

//! Invertible permutations over integer universes `[0, size)`.
//!
//! Every permutation exposes `apply` and `invert`; composite constructions
//! (Naor-Reingold style units, cycle-walking restrictions, chopping into
//! `(bin, quotient)` pairs) are built from these pieces and stay exactly
//! bijective.

use crate::arith::{add_mod, bits_for, is_prime, mul_mod, next_prime, pow_mod};
use crate::error::{Error, Result};
use crate::hash_family::KWiseHash;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Largest universe for which an explicit shuffled table is built.
pub const MAX_RANDOM_PERM_SIZE: u64 = 1 << 20;

/// Floors `u` to a multiple of `m`; the dropped values must be stored
/// elsewhere by the caller.
pub fn truncate_universe(u: u64, m: u64) -> Result<(u64, Range<u64>)> {
    if m == 0 {
        return Err(Error::param("bin count must be at least 1"));
    }
    if m > u {
        return Err(Error::param(format!("bin count {m} exceeds universe {u}")));
    }
    let kept = u - u % m;
    Ok((kept, kept..u))
}

/// `x -> (a*x + b) mod p` on `[0, p)` with `p` prime and `a != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwisePerm {
    a: u64,
    a_inv: u64,
    b: u64,
    p: u64,
}

impl PairwisePerm {
    pub fn new(a: u64, b: u64, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::param(format!("{p} is not prime")));
        }
        if a == 0 || a >= p || b >= p {
            return Err(Error::param("need 0 < a < p and 0 <= b < p"));
        }
        Ok(PairwisePerm {
            a,
            a_inv: pow_mod(a, p - 2, p),
            b,
            p,
        })
    }

    pub fn sample<R: Rng + ?Sized>(p: u64, rng: &mut R) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::param(format!("{p} is not prime")));
        }
        Self::new(rng.gen_range(1..p), rng.gen_range(0..p), p)
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        add_mod(mul_mod(self.a, x, self.p), self.b, self.p)
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        mul_mod(add_mod(y, self.p - self.b, self.p), self.a_inv, self.p)
    }

    pub fn size(&self) -> u64 {
        self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeistelMode {
    /// Left part is xored with `f(right)`; needs a power-of-two left size.
    Xor,
    /// Left part becomes `(left + f(right)) mod m`.
    Additive,
}

/// One Feistel round `(x_L, x_R) -> (x_L op f(x_R), x_R)` where
/// `x = x_L * right_size + x_R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeistelPerm {
    f: KWiseHash,
    left_size: u64,
    right_size: u64,
    mode: FeistelMode,
}

impl FeistelPerm {
    pub fn new(f: KWiseHash, left_size: u64, right_size: u64, mode: FeistelMode) -> Result<Self> {
        if left_size == 0 || right_size == 0 {
            return Err(Error::param("Feistel halves must be non-empty"));
        }
        left_size
            .checked_mul(right_size)
            .ok_or_else(|| Error::param("Feistel universe overflows u64"))?;
        if f.universe() < right_size || f.range() != left_size {
            return Err(Error::param(
                "round function must map [0, right_size) onto [0, left_size)",
            ));
        }
        if mode == FeistelMode::Xor && !left_size.is_power_of_two() {
            return Err(Error::param("xor mode needs a power-of-two left size"));
        }
        Ok(FeistelPerm {
            f,
            left_size,
            right_size,
            mode,
        })
    }

    pub fn sample<R: Rng + ?Sized>(
        k: usize,
        left_size: u64,
        right_size: u64,
        mode: FeistelMode,
        rng: &mut R,
    ) -> Result<Self> {
        let f = KWiseHash::sample(k, right_size, left_size, rng)?;
        Self::new(f, left_size, right_size, mode)
    }

    #[inline]
    pub fn split(&self, x: u64) -> (u64, u64) {
        (x / self.right_size, x % self.right_size)
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let (l, r) = self.split(x);
        let fr = self.f.hash(r);
        let l2 = match self.mode {
            FeistelMode::Xor => l ^ fr,
            FeistelMode::Additive => (l + fr) % self.left_size,
        };
        l2 * self.right_size + r
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        let (l, r) = self.split(y);
        let fr = self.f.hash(r);
        let l2 = match self.mode {
            FeistelMode::Xor => l ^ fr,
            FeistelMode::Additive => (l + self.left_size - fr) % self.left_size,
        };
        l2 * self.right_size + r
    }

    pub fn size(&self) -> u64 {
        self.left_size * self.right_size
    }

    pub fn left_size(&self) -> u64 {
        self.left_size
    }

    pub fn right_size(&self) -> u64 {
        self.right_size
    }

    pub fn round_function(&self) -> &KWiseHash {
        &self.f
    }
}

/// Explicit uniformly random permutation with its inverse table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrulyRandomPerm {
    forward: Vec<u32>,
    backward: Vec<u32>,
}

impl TrulyRandomPerm {
    pub fn sample<R: Rng + ?Sized>(size: u64, rng: &mut R) -> Result<Self> {
        if size == 0 || size > MAX_RANDOM_PERM_SIZE {
            return Err(Error::param(format!(
                "explicit random permutations support sizes 1..={MAX_RANDOM_PERM_SIZE}"
            )));
        }
        let mut forward: Vec<u32> = (0..size as u32).collect();
        forward.shuffle(rng);
        let mut backward = vec![0u32; size as usize];
        for (i, &y) in forward.iter().enumerate() {
            backward[y as usize] = i as u32;
        }
        Ok(TrulyRandomPerm { forward, backward })
    }

    pub fn size(&self) -> u64 {
        self.forward.len() as u64
    }
}

/// An invertible permutation of `[0, size())`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Permutation {
    Identity {
        size: u64,
    },
    Pairwise(PairwisePerm),
    Feistel(FeistelPerm),
    /// Exchanges the two `half_bits`-wide halves of a `2*half_bits` word.
    SwapHalves {
        half_bits: u32,
    },
    Random(TrulyRandomPerm),
    Composed(ComposedPerm),
    /// Restriction of `inner` to `[0, domain)` by re-applying until the
    /// image falls back inside the domain.
    CycleWalk {
        inner: Box<Permutation>,
        domain: u64,
    },
}

impl Permutation {
    pub fn size(&self) -> u64 {
        match self {
            Permutation::Identity { size } => *size,
            Permutation::Pairwise(p) => p.size(),
            Permutation::Feistel(f) => f.size(),
            Permutation::SwapHalves { half_bits } => 1u64 << (2 * half_bits),
            Permutation::Random(r) => r.size(),
            Permutation::Composed(c) => c.size,
            Permutation::CycleWalk { domain, .. } => *domain,
        }
    }

    pub fn apply(&self, x: u64) -> u64 {
        debug_assert!(x < self.size());
        match self {
            Permutation::Identity { .. } => x,
            Permutation::Pairwise(p) => p.apply(x),
            Permutation::Feistel(f) => f.apply(x),
            Permutation::SwapHalves { half_bits } => swap_halves(x, *half_bits),
            Permutation::Random(r) => r.forward[x as usize] as u64,
            Permutation::Composed(c) => c.rounds.iter().fold(x, |v, p| p.apply(v)),
            Permutation::CycleWalk { inner, domain } => {
                let mut y = inner.apply(x);
                while y >= *domain {
                    y = inner.apply(y);
                }
                y
            }
        }
    }

    pub fn invert(&self, y: u64) -> u64 {
        debug_assert!(y < self.size());
        match self {
            Permutation::Identity { .. } => y,
            Permutation::Pairwise(p) => p.invert(y),
            Permutation::Feistel(f) => f.invert(y),
            Permutation::SwapHalves { half_bits } => swap_halves(y, *half_bits),
            Permutation::Random(r) => r.backward[y as usize] as u64,
            Permutation::Composed(c) => c.rounds.iter().rev().fold(y, |v, p| p.invert(v)),
            Permutation::CycleWalk { inner, domain } => {
                let mut x = inner.invert(y);
                while x >= *domain {
                    x = inner.invert(x);
                }
                x
            }
        }
    }

    /// Bits needed to describe the permutation (coefficients, tables).
    pub fn descriptor_bits(&self) -> u64 {
        match self {
            Permutation::Identity { .. } | Permutation::SwapHalves { .. } => 0,
            Permutation::Pairwise(p) => 2 * bits_for(p.p) as u64,
            Permutation::Feistel(f) => f.f.descriptor_bits(),
            Permutation::Random(r) => r.size() * bits_for(r.size()) as u64,
            Permutation::Composed(c) => c.rounds.iter().map(|p| p.descriptor_bits()).sum(),
            Permutation::CycleWalk { inner, .. } => inner.descriptor_bits(),
        }
    }

    /// Restricts `self` to `[0, domain)`; a no-op when the sizes agree.
    pub fn restrict(self, domain: u64) -> Result<Permutation> {
        let size = self.size();
        if domain == 0 || domain > size {
            return Err(Error::param(format!(
                "cannot restrict size {size} to {domain}"
            )));
        }
        Ok(if domain == size {
            self
        } else {
            Permutation::CycleWalk {
                inner: Box::new(self),
                domain,
            }
        })
    }

    /// Pairwise-independent affine permutation of `[0, universe)`, cycle
    /// walked from the smallest prime field that covers the universe.
    pub fn sample_pairwise<R: Rng + ?Sized>(universe: u64, rng: &mut R) -> Result<Permutation> {
        if universe < 2 {
            return Ok(Permutation::Identity {
                size: universe.max(1),
            });
        }
        let p = next_prime(universe).ok_or_else(|| Error::param("universe too large"))?;
        Permutation::Pairwise(PairwisePerm::sample(p, rng)?).restrict(universe)
    }

    pub fn sample_random<R: Rng + ?Sized>(universe: u64, rng: &mut R) -> Result<Permutation> {
        Ok(Permutation::Random(TrulyRandomPerm::sample(universe, rng)?))
    }
}

#[inline]
fn swap_halves(x: u64, half_bits: u32) -> u64 {
    let mask = (1u64 << half_bits) - 1;
    ((x & mask) << half_bits) | (x >> half_bits)
}

/// Ordered composition; `rounds[0]` is applied first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedPerm {
    rounds: Vec<Permutation>,
    size: u64,
}

impl ComposedPerm {
    pub fn new(size: u64, rounds: Vec<Permutation>) -> Result<Self> {
        if let Some(bad) = rounds.iter().find(|r| r.size() != size) {
            return Err(Error::param(format!(
                "round of size {} in a composition over {size}",
                bad.size()
            )));
        }
        Ok(ComposedPerm { rounds, size })
    }

    pub fn rounds(&self) -> &[Permutation] {
        &self.rounds
    }
}

/// A permutation split into `(bin, quotient)` coordinates.
///
/// `inner` permutes `[0, kept)` where `kept` is a multiple of `bins`; values
/// in `[kept, universe)` are reported as [`Chop::Ignored`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoppedPerm {
    inner: Permutation,
    bins: u64,
    universe: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chop {
    Slot { bin: u64, quotient: u64 },
    Ignored,
}

impl ChoppedPerm {
    pub fn new(inner: Permutation, bins: u64, universe: u64) -> Result<Self> {
        let kept = inner.size();
        if bins == 0 || kept % bins != 0 {
            return Err(Error::param(format!("bin count {bins} must divide {kept}")));
        }
        if universe < kept {
            return Err(Error::param("inner permutation exceeds the universe"));
        }
        Ok(ChoppedPerm {
            inner,
            bins,
            universe,
        })
    }

    pub fn kept(&self) -> u64 {
        self.inner.size()
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn quotient_range(&self) -> u64 {
        self.inner.size() / self.bins
    }

    pub fn inner(&self) -> &Permutation {
        &self.inner
    }

    pub fn chop(&self, x: u64) -> Result<Chop> {
        if x >= self.universe {
            return Err(Error::Domain {
                value: x,
                size: self.universe,
            });
        }
        if x >= self.kept() {
            return Ok(Chop::Ignored);
        }
        let y = self.inner.apply(x);
        let q = self.quotient_range();
        Ok(Chop::Slot {
            bin: y / q,
            quotient: y % q,
        })
    }

    pub fn unchop(&self, bin: u64, quotient: u64) -> Result<u64> {
        if bin >= self.bins {
            return Err(Error::Domain {
                value: bin,
                size: self.bins,
            });
        }
        let q = self.quotient_range();
        if quotient >= q {
            return Err(Error::Domain {
                value: quotient,
                size: q,
            });
        }
        Ok(self.inner.invert(bin * q + quotient))
    }
}

/// Result of [`nr_perm_new`]: the composed permutation plus the dependence
/// bookkeeping used to choose it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NrPermutation {
    pub perm: Permutation,
    pub units: u32,
    pub unit_delta: f64,
    pub achieved_delta: f64,
}

/// Dependence of a single unit built from `k`-wise functions on a
/// `universe_bits`-bit domain: `k^2 / 2^(w/2) + k^2 / 2^w`.
pub fn nr_unit_delta(k: usize, universe_bits: u32) -> f64 {
    let k2 = (k * k) as f64;
    k2 / 2f64.powi((universe_bits / 2) as i32) + k2 / 2f64.powi(universe_bits as i32)
}

/// Smallest `t` with `(2 delta)^t / 2 <= target`.
pub fn nr_units_for(delta: f64, target: f64) -> Result<u32> {
    if !(target > 0.0) {
        return Err(Error::param("dependence target must be positive"));
    }
    let tol = 1.0 + 1e-9;
    if delta <= target * tol {
        return Ok(1);
    }
    if 2.0 * delta >= 1.0 {
        return Err(Error::param(format!(
            "single-unit dependence {delta} cannot be amplified to {target}"
        )));
    }
    let mut t = 1u32;
    let mut bound = delta;
    while bound > target * tol {
        t += 1;
        bound = 0.5 * (2.0 * delta).powi(t as i32);
    }
    Ok(t)
}

/// Builds `t` independent units `P2 . F_g2 . swap . F_g1 . P1` over
/// `[0, 2^universe_bits)`, with `P1, P2` pairwise-independent permutations
/// and `g1, g2` `k`-wise independent round functions, choosing `t` minimal
/// for the requested dependence.
pub fn nr_perm_new<R: Rng + ?Sized>(
    k: usize,
    delta_target: f64,
    universe_bits: u32,
    rng: &mut R,
) -> Result<NrPermutation> {
    if k < 2 {
        return Err(Error::param("Naor-Reingold units need k >= 2"));
    }
    if universe_bits < 2 || universe_bits % 2 != 0 || universe_bits > 62 {
        return Err(Error::param("universe must be 2^w with even w in [2, 62]"));
    }
    let unit_delta = nr_unit_delta(k, universe_bits);
    let units = nr_units_for(unit_delta, delta_target)?;
    let size = 1u64 << universe_bits;
    let half = 1u64 << (universe_bits / 2);
    let mut rounds = Vec::with_capacity(5 * units as usize);
    for _ in 0..units {
        rounds.push(Permutation::sample_pairwise(size, rng)?);
        rounds.push(Permutation::Feistel(FeistelPerm::sample(
            k,
            half,
            half,
            FeistelMode::Xor,
            rng,
        )?));
        rounds.push(Permutation::SwapHalves {
            half_bits: universe_bits / 2,
        });
        rounds.push(Permutation::Feistel(FeistelPerm::sample(
            k,
            half,
            half,
            FeistelMode::Xor,
            rng,
        )?));
        rounds.push(Permutation::sample_pairwise(size, rng)?);
    }
    let achieved_delta = if units == 1 {
        unit_delta
    } else {
        0.5 * (2.0 * unit_delta).powi(units as i32)
    };
    Ok(NrPermutation {
        perm: Permutation::Composed(ComposedPerm::new(size, rounds)?),
        units,
        unit_delta,
        achieved_delta,
    })
}

/// How shared permutations are generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PermMode {
    /// Explicit shuffled tables (universes up to 2^20).
    TrulyRandom,
    /// Composed Naor-Reingold units with `k`-wise round functions.
    NaorReingold { k: usize, delta_target: f64 },
    /// Truly random when the universe is small enough, otherwise
    /// Naor-Reingold with `k = 4`.
    Auto,
}

impl PermMode {
    pub const DEFAULT_NR_K: usize = 4;
    pub const DEFAULT_DELTA_TARGET: f64 = 0.25;

    /// Samples a permutation of `[0, universe)` in this mode.
    pub fn sample<R: Rng + ?Sized>(&self, universe: u64, rng: &mut R) -> Result<Permutation> {
        match *self {
            PermMode::TrulyRandom => Permutation::sample_random(universe, rng),
            PermMode::Auto if universe <= MAX_RANDOM_PERM_SIZE => {
                Permutation::sample_random(universe, rng)
            }
            PermMode::Auto => PermMode::NaorReingold {
                k: Self::DEFAULT_NR_K,
                delta_target: Self::DEFAULT_DELTA_TARGET,
            }
            .sample(universe, rng),
            PermMode::NaorReingold { k, delta_target } => {
                if universe < 4 {
                    return Permutation::sample_random(universe.max(1), rng);
                }
                let mut w = bits_for(universe);
                if w % 2 == 1 {
                    w += 1;
                }
                let w = w.max(2);
                nr_perm_new(k, delta_target, w, rng)?
                    .perm
                    .restrict(universe)
            }
        }
    }
}

//! Subsets stored by their colexicographic rank.
//!
//! A sorted `k`-subset `c_0 < c_1 < ... < c_{k-1}` of `[0, N)` has rank
//! `sum_i C(c_i, i + 1)`, a bijection onto `[0, C(N, k))`. A bin of
//! capacity `d` then takes a load counter plus one rank field of
//! `max_k ceil(log2 C(N, k))` bits.

use crate::arith::bits_for;
use crate::bins::BinInsert;
use crate::bitpack::BitVec;
use crate::error::{Error, Result};
use crate::meter::Meter;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// `ceil(log2 C(u, n))`, the information bound for `n`-subsets of `[u]`.
pub fn info_bound(u: u64, n: u64) -> u64 {
    let c = binomial(u, n);
    if c.is_zero() {
        return 0;
    }
    (c - 1u32).bits()
}

/// Bits needed for any rank of a subset of `[0, n)` with at most `d` elements.
pub fn rank_width(n: u64, d: u64) -> u64 {
    let k = d.min(n / 2);
    let c = binomial(n, k);
    (c - 1u32).bits()
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().unwrap_or(0) as f64;
    }
    let top = (x >> (bits - 64)).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + (bits - 64) as f64 * std::f64::consts::LN_2
}

fn ln_binomial(c: u64, i: u64) -> f64 {
    if c < i {
        return f64::NEG_INFINITY;
    }
    let j = i.min(c - i);
    if j <= 512 {
        // direct sum keeps precision when c is huge
        (0..j).map(|t| ((c - t) as f64).ln()).sum::<f64>() - ln_gamma(j as f64 + 1.0)
    } else {
        ln_gamma(c as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((c - i) as f64 + 1.0)
    }
}

pub fn rank(sorted: &[u64]) -> BigUint {
    let mut r = BigUint::zero();
    for (i, &c) in sorted.iter().enumerate() {
        r += binomial(c, i as u64 + 1);
    }
    r
}

/// Largest `c < hi` with `C(c, i) <= r`, and that binomial.
fn largest_below(i: u64, r: &BigUint, hi: u64) -> (u64, BigUint) {
    if r.is_zero() {
        return (i - 1, BigUint::zero());
    }
    let target = if r.bits() <= 64 {
        (r.to_u64().unwrap() as f64).ln()
    } else {
        ln_big(r)
    };
    // C(c, i) ~ (c - (i - 1) / 2)^i / i!
    let guess = ((target + ln_gamma(i as f64 + 1.0)) / i as f64).exp() + (i as f64 - 1.0) / 2.0;
    let guess = (guess.floor() as u64).clamp(i - 1, hi - 1);
    if let Some(found) = correct(i, r, hi, guess) {
        return found;
    }
    let (mut lo, mut up) = (i - 1, hi - 1);
    while lo < up {
        let mid = lo + (up - lo).div_ceil(2);
        if ln_binomial(mid, i) <= target + 1e-9 * target.abs().max(1.0) {
            lo = mid;
        } else {
            up = mid - 1;
        }
    }
    if let Some(found) = correct(i, r, hi, lo) {
        return found;
    }
    // estimates were far off: exact bisection
    let (mut lo, mut up) = (i - 1, hi - 1);
    while lo < up {
        let mid = lo + (up - lo).div_ceil(2);
        if binomial(mid, i) <= *r {
            lo = mid;
        } else {
            up = mid - 1;
        }
    }
    (lo, binomial(lo, i))
}

/// Walks from `c` to the answer of [`largest_below`] by exact ratio
/// steps, giving up after a bounded number of them.
fn correct(i: u64, r: &BigUint, hi: u64, mut c: u64) -> Option<(u64, BigUint)> {
    let mut b = binomial(c, i);
    let mut steps = 0;
    while b > *r && steps < 64 {
        // C(c-1, i) = C(c, i) (c - i) / c
        b = b * (c - i) / c;
        c -= 1;
        steps += 1;
    }
    while b <= *r && c + 1 < hi && steps < 128 {
        let next = if c + 1 == i {
            BigUint::one()
        } else {
            &b * (c + 1) / (c + 1 - i)
        };
        if next > *r {
            return Some((c, b));
        }
        b = next;
        c += 1;
        steps += 1;
    }
    if b <= *r && (c + 1 >= hi || binomial(c + 1, i) > *r) {
        return Some((c, b));
    }
    None
}

/// Inverse of [`rank`] for `k`-subsets of `[0, n)`.
pub fn unrank(mut r: BigUint, k: u64, n: u64) -> Vec<u64> {
    let mut out = vec![0; k as usize];
    let mut hi = n;
    for i in (1..=k).rev() {
        let (c, b) = largest_below(i, &r, hi);
        out[i as usize - 1] = c;
        r -= b;
        hi = c;
    }
    out
}

/// `m` bins of capacity `d` over identities in `[0, n)`, each stored as a
/// load counter and a subset rank.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankedBins {
    m: u64,
    d: u64,
    n: u64,
    count_bits: u32,
    rank_bits: u64,
    store: BitVec,
    #[serde(skip)]
    meter: Meter,
}

impl RankedBins {
    pub fn new(m: u64, d: u64, n: u64) -> Result<Self> {
        if m == 0 || d == 0 || n == 0 {
            return Err(Error::param("ranked bins need m, d, n >= 1"));
        }
        let count_bits = bits_for(d + 1);
        let rank_bits = rank_width(n, d);
        let total = m
            .checked_mul(count_bits as u64 + rank_bits)
            .ok_or_else(|| Error::param("ranked bins too large"))?;
        Ok(RankedBins {
            m,
            d,
            n,
            count_bits,
            rank_bits,
            store: BitVec::zeros(total),
            meter: Meter::default(),
        })
    }

    pub fn bins(&self) -> u64 {
        self.m
    }

    pub fn capacity(&self) -> u64 {
        self.d
    }

    pub fn identity_range(&self) -> u64 {
        self.n
    }

    fn offset(&self, bin: u64) -> u64 {
        bin * (self.count_bits as u64 + self.rank_bits)
    }

    pub fn load(&self, bin: u64) -> u64 {
        self.store.get_bits(self.offset(bin), self.count_bits)
    }

    pub fn has_vacancy(&self, bin: u64) -> bool {
        self.meter.tick(1);
        self.load(bin) < self.d
    }

    /// Sorted identities in `bin`.
    pub fn decode(&self, bin: u64) -> Vec<u64> {
        let k = self.load(bin);
        self.meter.tick(k + 1);
        if k == 0 {
            return Vec::new();
        }
        let r = self
            .store
            .get_wide(self.offset(bin) + self.count_bits as u64, self.rank_bits);
        unrank(r, k, self.n)
    }

    fn encode(&mut self, bin: u64, ids: &[u64]) {
        self.meter.tick(ids.len() as u64 + 1);
        let off = self.offset(bin);
        self.store.set_bits(off, self.count_bits, ids.len() as u64);
        self.store
            .set_wide(off + self.count_bits as u64, self.rank_bits, &rank(ids));
    }

    pub fn contains(&self, bin: u64, id: u64) -> bool {
        self.decode(bin).binary_search(&id).is_ok()
    }

    pub fn insert(&mut self, bin: u64, id: u64) -> Result<BinInsert> {
        if bin >= self.m {
            return Err(Error::Domain {
                value: bin,
                size: self.m,
            });
        }
        if id >= self.n {
            return Err(Error::Domain {
                value: id,
                size: self.n,
            });
        }
        let mut ids = self.decode(bin);
        match ids.binary_search(&id) {
            Ok(_) => Err(Error::Duplicate(id)),
            Err(_) if ids.len() as u64 >= self.d => Ok(BinInsert::Full),
            Err(pos) => {
                ids.insert(pos, id);
                self.encode(bin, &ids);
                Ok(BinInsert::Inserted(pos as u32))
            }
        }
    }

    pub fn delete(&mut self, bin: u64, id: u64) -> bool {
        let mut ids = self.decode(bin);
        match ids.binary_search(&id) {
            Ok(pos) => {
                ids.remove(pos);
                self.encode(bin, &ids);
                true
            }
            Err(_) => false,
        }
    }

    pub fn bits(&self) -> u64 {
        self.store.len()
    }

    pub fn steps(&self) -> u64 {
        self.meter.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn information_bound_examples() {
        assert_eq!(binomial(16, 4), BigUint::from(1820u32));
        assert_eq!(info_bound(16, 4), 11);
        assert_eq!(info_bound(8, 2), 5);
        assert_eq!(info_bound(8, 0), 0);
        assert_eq!(info_bound(4, 2), 3);
        // C(4, 1) = 4 is a power of two
        assert_eq!(info_bound(4, 1), 2);
    }

    #[test]
    fn rank_is_a_bijection_on_small_universes() {
        for n in 1..=12u64 {
            for k in 0..=n.min(6) {
                let total = binomial(n, k).to_u64().unwrap();
                let mut seen = vec![false; total as usize];
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as u64 != k {
                        continue;
                    }
                    let s: Vec<u64> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
                    let r = rank(&s);
                    let ri = r.to_u64().unwrap();
                    assert!(ri < total);
                    assert!(!seen[ri as usize]);
                    seen[ri as usize] = true;
                    assert_eq!(unrank(r, k, n), s);
                }
            }
        }
    }

    #[test]
    fn wide_ranks_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &(n, k) in &[(1u64 << 24, 64u64), (58254, 64), (1 << 40, 20), (100, 99)] {
            for _ in 0..20 {
                let mut s: Vec<u64> = Vec::new();
                while (s.len() as u64) < k {
                    let x = rng.gen_range(0..n);
                    if !s.contains(&x) {
                        s.push(x);
                    }
                }
                s.sort_unstable();
                let r = rank(&s);
                assert!(r < binomial(n, k));
                assert_eq!(unrank(r, k, n), s);
            }
        }
    }

    #[test]
    fn ranked_bins_behave_like_sets() {
        let mut b = RankedBins::new(3, 4, 50).unwrap();
        assert_eq!(b.insert(1, 7).unwrap(), BinInsert::Inserted(0));
        assert_eq!(b.insert(1, 3).unwrap(), BinInsert::Inserted(0));
        assert_eq!(b.insert(1, 7), Err(Error::Duplicate(7)));
        assert_eq!(b.decode(1), vec![3, 7]);
        for id in [40, 41] {
            b.insert(1, id).unwrap();
        }
        assert_eq!(b.insert(1, 9).unwrap(), BinInsert::Full);
        assert!(b.delete(1, 40));
        assert!(!b.contains(1, 40));
        assert!(b.contains(1, 41));
        assert!(b.decode(0).is_empty() && b.decode(2).is_empty());
        assert_eq!(b.bits(), 3 * (3 + rank_width(50, 4)));
    }
}

//! Approximate membership: keys are hashed into `[ceil(n / delta)]` by a
//! pairwise-independent function and the hashed values are kept in an
//! exact dictionary.

use crate::arith::ceil_exact;
use crate::backyard::{BackyardDict, BackyardParams, Overrides, DEFAULT_C, DEFAULT_UNIVERSE};
use crate::error::{Error, Result};
use crate::hash_family::PairwiseHash;
use crate::succinct::{compact_perm_mode, SuccinctDict, SuccinctParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_FILTER_EPS: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    MaybePresent,
    DefinitelyAbsent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterBackend {
    Succinct,
    Backyard,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum FilterDict {
    Succinct(SuccinctDict),
    Backyard(BackyardDict),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipFilter {
    h: PairwiseHash,
    dict: FilterDict,
    n: u64,
    delta: f64,
}

/// `ceil(n / delta)`.
pub fn reduced_universe(n: u64, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta = {delta} is outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::param("capacity n must be at least 1"));
    }
    Ok(ceil_exact(n as f64 / delta))
}

impl MembershipFilter {
    /// Filter over keys in `[0, 2^61 - 1)` backed by the succinct dictionary.
    pub fn new(n: u64, delta: f64, seed: u64) -> Result<Self> {
        Self::with_backend(n, delta, DEFAULT_UNIVERSE, FilterBackend::Succinct, seed)
    }

    pub fn with_backend(
        n: u64,
        delta: f64,
        universe: u64,
        backend: FilterBackend,
        seed: u64,
    ) -> Result<Self> {
        let range = reduced_universe(n, delta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = PairwiseHash::sample(universe, range, &mut rng)?;
        let dict = match backend {
            FilterBackend::Succinct => {
                let p = SuccinctParams::derive(range, n, 0.0, DEFAULT_FILTER_EPS)?;
                let p = p.clone().with_perm_mode(compact_perm_mode(p.bin_universe));
                FilterDict::Succinct(SuccinctDict::new(p, rng.gen())?)
            }
            FilterBackend::Backyard => {
                let o = Overrides {
                    universe: Some(range),
                    relax_space: true,
                    ..Overrides::default()
                };
                let p = BackyardParams::derive_with(n, DEFAULT_FILTER_EPS, DEFAULT_C, &o)?;
                FilterDict::Backyard(BackyardDict::new(p, rng.gen())?)
            }
        };
        Ok(MembershipFilter { h, dict, n, delta })
    }

    pub fn capacity(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn universe(&self) -> u64 {
        self.h.universe()
    }

    pub fn reduced_universe(&self) -> u64 {
        self.h.range()
    }

    pub fn hash(&self) -> &PairwiseHash {
        &self.h
    }

    pub fn dict(&self) -> &FilterDict {
        &self.dict
    }

    /// Number of distinct hashed values stored.
    pub fn len(&self) -> u64 {
        match &self.dict {
            FilterDict::Succinct(d) => d.len(),
            FilterDict::Backyard(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&mut self, x: u64) -> Result<()> {
        let v = self.h.eval(x)?;
        match &mut self.dict {
            FilterDict::Succinct(d) => d.insert(v),
            FilterDict::Backyard(d) => d.insert(v),
        }
    }

    pub fn query(&self, x: u64) -> Membership {
        let Ok(v) = self.h.eval(x) else {
            return Membership::DefinitelyAbsent;
        };
        let hit = match &self.dict {
            FilterDict::Succinct(d) => d.contains(v),
            FilterDict::Backyard(d) => d.contains(v),
        };
        if hit {
            Membership::MaybePresent
        } else {
            Membership::DefinitelyAbsent
        }
    }

    /// Dictionary bits plus the hash descriptor.
    pub fn bits(&self) -> u64 {
        let dict = match &self.dict {
            FilterDict::Succinct(d) => d.bits_used().bits_total,
            FilterDict::Backyard(d) => d.bits(),
        };
        dict + self.h.descriptor_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_universe_examples() {
        assert_eq!(reduced_universe(1000, 0.01).unwrap(), 100_000);
        assert_eq!(reduced_universe(10, 0.25).unwrap(), 40);
        assert!(reduced_universe(10, 0.0).is_err());
        assert!(reduced_universe(10, 1.0).is_err());
        assert!(MembershipFilter::new(10, 1.5, 0).is_err());
    }

    #[test]
    fn empty_filter_rejects_everything() {
        let f = MembershipFilter::new(100, 0.01, 4).unwrap();
        assert!(f.is_empty());
        assert!((0..10_000).all(|x| f.query(x) == Membership::DefinitelyAbsent));
    }

    #[test]
    fn inserted_keys_are_reported_and_capacity_counts_hashes() {
        for backend in [FilterBackend::Succinct, FilterBackend::Backyard] {
            let mut f = MembershipFilter::with_backend(200, 0.05, 1 << 40, backend, 9).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut keys = Vec::new();
            while f.len() < 200 {
                let x = rng.gen_range(0..1u64 << 40);
                f.insert(x).unwrap();
                f.insert(x).unwrap();
                keys.push(x);
            }
            assert!(keys.iter().all(|&x| f.query(x) == Membership::MaybePresent));
            let fresh = (0..)
                .map(|i| i * 7919)
                .find(|&x| f.query(x) == Membership::DefinitelyAbsent)
                .unwrap();
            assert_eq!(f.insert(fresh), Err(Error::Capacity(200)));
            // a key sharing a stored hash is still accepted
            assert!(f.insert(keys[0]).is_ok());
        }
    }
}

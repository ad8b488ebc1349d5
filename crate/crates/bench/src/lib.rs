//! Fixtures shared by the benchmarks.

use backyard::backyard::{BackyardDict, BackyardParams, CuckooMode};
use backyard::bins::BinMode;
use backyard::succinct::{BinBackend, SuccinctDict, SuccinctParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` distinct keys below `u`.
pub fn keys(n: u64, u: u64, seed: u64) -> Vec<u64> {
    let mut r = rng(seed);
    let mut seen = HashSet::with_capacity(n as usize);
    let mut out = Vec::with_capacity(n as usize);
    while (out.len() as u64) < n {
        let x = r.gen_range(0..u);
        if seen.insert(x) {
            out.push(x);
        }
    }
    out
}

/// The four backyard configurations at capacity `n`.
pub fn backyard_modes(n: u64) -> Vec<(String, BackyardParams)> {
    let base = BackyardParams::derive(n, 0.25, 2.0).expect("valid parameters");
    let mut out = Vec::new();
    for bins in [BinMode::Plain, BinMode::PerfectHash] {
        for cuckoo in [CuckooMode::Functions, CuckooMode::Permutations] {
            let p = base.clone().with_bin_mode(bins).with_cuckoo_mode(cuckoo);
            out.push((format!("{bins:?}/{cuckoo:?}").to_lowercase(), p));
        }
    }
    out
}

pub fn succinct_params(u: u64, n: u64, gamma: f64, backend: BinBackend) -> SuccinctParams {
    SuccinctParams::derive(u, n, gamma, 0.25)
        .expect("valid parameters")
        .with_backend(backend)
}

/// A backyard dictionary holding `keys`.
pub fn filled_backyard(p: &BackyardParams, keys: &[u64]) -> BackyardDict {
    let mut d = BackyardDict::new(p.clone(), 1).expect("dictionary");
    for &x in keys {
        d.insert(x).expect("insert");
    }
    d
}

/// A succinct dictionary holding `keys`.
pub fn filled_succinct(p: &SuccinctParams, keys: &[u64]) -> SuccinctDict {
    let mut d = SuccinctDict::new(p.clone(), 1).expect("dictionary");
    for &x in keys {
        d.insert(x).expect("insert");
    }
    d
}

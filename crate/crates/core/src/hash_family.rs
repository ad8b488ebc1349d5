//! Polynomial hash families over prime fields.
//!
//! [`KWiseHash`] evaluates a uniformly random polynomial of degree `k - 1`
//! over `GF(p)` and reduces the result mod `R`. With `R = p` the outputs on
//! any `k` distinct inputs are exactly jointly uniform; for `R < p` the
//! per-output bias is at most `(p mod R) / p`.

use crate::arith::{add_mod, bits_for, mul_mod, next_prime};
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

fn field_for(universe: u64, range: u64) -> Result<u64> {
    if universe == 0 {
        return Err(Error::param("universe size must be at least 1"));
    }
    if range == 0 {
        return Err(Error::param("hash range must be at least 1"));
    }
    next_prime(universe.max(range))
        .ok_or_else(|| Error::param("no 64-bit prime covers this universe"))
}

/// `x -> ((a*x + b) mod p) mod R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseHash {
    a: u64,
    b: u64,
    p: u64,
    range: u64,
    universe: u64,
}

impl PairwiseHash {
    pub fn sample<R: Rng + ?Sized>(universe: u64, range: u64, rng: &mut R) -> Result<Self> {
        let p = field_for(universe, range)?;
        Ok(PairwiseHash {
            a: rng.gen_range(0..p),
            b: rng.gen_range(0..p),
            p,
            range,
            universe,
        })
    }

    pub fn from_parts(a: u64, b: u64, p: u64, range: u64, universe: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::param(format!("modulus {p} is not prime")));
        }
        if universe == 0 || universe > p {
            return Err(Error::param("universe must be in [1, p]"));
        }
        if range == 0 {
            return Err(Error::param("hash range must be at least 1"));
        }
        if a >= p || b >= p {
            return Err(Error::param("coefficients must be reduced mod p"));
        }
        Ok(PairwiseHash {
            a,
            b,
            p,
            range,
            universe,
        })
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.universe {
            return Err(Error::Domain {
                value: x,
                size: self.universe,
            });
        }
        Ok(self.hash(x))
    }

    /// Unchecked evaluation; `x` must be inside the universe.
    #[inline]
    pub fn hash(&self, x: u64) -> u64 {
        debug_assert!(x < self.universe);
        add_mod(mul_mod(self.a, x, self.p), self.b, self.p) % self.range
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn coefficients(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    /// Upper bound on the deviation of any single output probability from `1/R`.
    pub fn bias_bound(&self) -> f64 {
        (self.p % self.range) as f64 / self.p as f64
    }

    /// Bits needed to store `a` and `b`.
    pub fn descriptor_bits(&self) -> u64 {
        2 * bits_for(self.p) as u64
    }
}

/// Random polynomial of degree `k - 1` over `GF(p)`, reduced mod `R`.
/// Coefficients are stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWiseHash {
    coeffs: Vec<u64>,
    p: u64,
    range: u64,
    universe: u64,
}

impl KWiseHash {
    pub fn sample<R: Rng + ?Sized>(
        k: usize,
        universe: u64,
        range: u64,
        rng: &mut R,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("independence k must be at least 1"));
        }
        let p = field_for(universe, range)?;
        let coeffs = (0..k).map(|_| rng.gen_range(0..p)).collect();
        Ok(KWiseHash {
            coeffs,
            p,
            range,
            universe,
        })
    }

    pub fn from_parts(coeffs: Vec<u64>, p: u64, range: u64, universe: u64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::param("independence k must be at least 1"));
        }
        if !crate::arith::is_prime(p) {
            return Err(Error::param(format!("modulus {p} is not prime")));
        }
        if universe == 0 || universe > p || range == 0 {
            return Err(Error::param(
                "universe must be in [1, p] and range at least 1",
            ));
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(Error::param("coefficients must be reduced mod p"));
        }
        Ok(KWiseHash {
            coeffs,
            p,
            range,
            universe,
        })
    }

    /// The all-zero polynomial over the smallest adequate field.
    pub fn zero(universe: u64, range: u64) -> Result<Self> {
        let p = field_for(universe, range)?;
        Ok(KWiseHash {
            coeffs: vec![0],
            p,
            range,
            universe,
        })
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.universe {
            return Err(Error::Domain {
                value: x,
                size: self.universe,
            });
        }
        Ok(self.hash(x))
    }

    /// Horner evaluation; `x` must be inside the universe.
    #[inline]
    pub fn hash(&self, x: u64) -> u64 {
        debug_assert!(x < self.universe);
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = add_mod(mul_mod(acc, x, self.p), c, self.p);
        }
        acc % self.range
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn descriptor_bits(&self) -> u64 {
        self.coeffs.len() as u64 * bits_for(self.p) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairwise_examples() {
        let id = PairwiseHash::from_parts(1, 0, 101, 101, 101).unwrap();
        assert!((0..101).all(|x| id.eval(x).unwrap() == x));
        let h = PairwiseHash::from_parts(1, 0, 101, 10, 101).unwrap();
        assert_eq!(h.eval(7).unwrap(), 7);
        let h = PairwiseHash::from_parts(3, 5, 101, 10, 101).unwrap();
        assert_eq!(h.eval(7).unwrap(), 6);
        let h = PairwiseHash::from_parts(0, 4, 101, 10, 101).unwrap();
        assert!((0..101).all(|x| h.eval(x).unwrap() == 4));
        assert_eq!(
            h.eval(101),
            Err(Error::Domain {
                value: 101,
                size: 101
            })
        );
    }

    #[test]
    fn pairwise_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = PairwiseHash::sample(100, 10, &mut rng).unwrap();
        assert_eq!(h.modulus(), 101);
        assert!(PairwiseHash::sample(100, 0, &mut rng).is_err());
        assert!(PairwiseHash::sample(0, 10, &mut rng).is_err());
    }

    #[test]
    fn pairwise_collision_rate() {
        // Fresh function per pair: Pr[h(x) = h(y)] <= 2/R for the family.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 100_000u64;
        let mut hits = 0;
        for _ in 0..trials {
            let h = PairwiseHash::sample(1 << 20, 256, &mut rng).unwrap();
            let x = rng.gen_range(0..1 << 20);
            let mut y = rng.gen_range(0..1 << 20);
            while y == x {
                y = rng.gen_range(0..1 << 20);
            }
            hits += (h.hash(x) == h.hash(y)) as u64;
        }
        assert!((hits as f64 / trials as f64) <= 2.0 / 256.0, "{hits}");
    }

    #[test]
    fn kwise_examples() {
        let h = KWiseHash::from_parts(vec![2, 0, 1], 7, 7, 7).unwrap();
        assert_eq!(h.eval(3).unwrap(), 4);
        assert_eq!(h.eval(0).unwrap(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = KWiseHash::sample(1, 1000, 50, &mut rng).unwrap();
        let v = c.hash(0);
        assert!((0..1000).all(|x| c.hash(x) == v));
        assert!(KWiseHash::sample(0, 10, 10, &mut rng).is_err());
        let a = KWiseHash::sample(5, 1 << 30, 1000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = KWiseHash::sample(5, 1 << 30, 1000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert!((0..1000).all(|x| a.hash(x * 7919) == b.hash(x * 7919)));
    }

    /// Enumerates every polynomial of degree < k over GF(p) and checks that
    /// each k-tuple of distinct inputs hits each output tuple exactly once.
    fn exhaustive_uniformity(p: u64, k: usize) {
        let total = p.pow(k as u32);
        let polys: Vec<KWiseHash> = (0..total)
            .map(|mut idx| {
                let coeffs = (0..k)
                    .map(|_| {
                        let c = idx % p;
                        idx /= p;
                        c
                    })
                    .collect();
                KWiseHash::from_parts(coeffs, p, p, p).unwrap()
            })
            .collect();
        let mut inputs = vec![0u64; k];
        fn next_combo(v: &mut [u64], p: u64) -> bool {
            let k = v.len();
            for i in (0..k).rev() {
                if v[i] < p - (k - i) as u64 {
                    v[i] += 1;
                    for j in i + 1..k {
                        v[j] = v[j - 1] + 1;
                    }
                    return true;
                }
            }
            false
        }
        for (i, x) in inputs.iter_mut().enumerate() {
            *x = i as u64;
        }
        loop {
            let mut counts = vec![0u32; total as usize];
            for h in &polys {
                let cell = inputs
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &x| acc * p + h.hash(x));
                counts[cell as usize] += 1;
            }
            assert!(
                counts.iter().all(|&c| c == 1),
                "p={p} k={k} inputs={inputs:?}"
            );
            if !next_combo(&mut inputs, p) {
                break;
            }
        }
    }

    #[test]
    fn exact_kwise_independence() {
        for &p in &[2u64, 3, 5, 7, 11] {
            for k in 1..=3usize {
                if k as u64 <= p {
                    exhaustive_uniformity(p, k);
                }
            }
        }
    }
}

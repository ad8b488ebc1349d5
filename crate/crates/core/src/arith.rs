//! Modular arithmetic and prime search over `u64`.

/// The Mersenne prime 2^61 - 1, the default field for large universes.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`, or `None` if it does not fit in a `u64`.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut c = n.max(2);
    loop {
        if is_prime(c) {
            return Some(c);
        }
        c = c.checked_add(1)?;
    }
}

/// Number of bits needed to write any value in `[0, n)`; zero for `n <= 1`.
#[inline]
pub fn bits_for(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// `ceil(log2(n))` for `n >= 1`.
#[inline]
pub fn ceil_log2(n: u64) -> u32 {
    bits_for(n)
}

/// Ceiling of a float that is meant to be an exact rational; absorbs
/// representation noise such as `1.2 * 5.0 = 6.000000000000001`.
pub fn ceil_exact(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_small() {
        let brute: Vec<u64> = (0..200)
            .filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0))
            .collect();
        let fast: Vec<u64> = (0..200).filter(|&n| is_prime(n)).collect();
        assert_eq!(brute, fast);
    }

    #[test]
    fn primes_large() {
        assert!(is_prime(MERSENNE_61));
        assert!(is_prime(65537));
        assert!(!is_prime((1u64 << 32) + 1));
        assert_eq!(next_prime(100), Some(101));
        assert_eq!(next_prime(1 << 16), Some(65537));
        assert_eq!(next_prime(u64::MAX), None);
    }

    #[test]
    fn bit_widths() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(16), 4);
        assert_eq!(bits_for(17), 5);
        assert_eq!(ceil_exact(1.2 * 5.0), 6);
        assert_eq!(ceil_exact(1228.8), 1229);
    }
}

//! Integers modulo a prime power `p^N`, stored in `u128`.

/// Largest admissible modulus (exclusive); keeps additions and doublings inside `u128`.
pub const MODULUS_LIMIT: u128 = 1u128 << 126;

/// Returns `a * b mod m` for `a, b < m < 2^126`.
#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        if m <= u32::MAX as u128 {
            return ((a as u64) * (b as u64) % (m as u64)) as u128;
        }
        return (a * b) % m;
    }
    let mut acc: u128 = 0;
    let mut bit = 127 - b.leading_zeros() as i32;
    while bit >= 0 {
        acc <<= 1;
        if acc >= m {
            acc -= m;
        }
        if (b >> bit) & 1 == 1 {
            acc += a;
            if acc >= m {
                acc -= m;
            }
        }
        bit -= 1;
    }
    acc
}

#[inline]
pub fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        a + (m - b)
    }
}

#[inline]
pub fn neg_mod(a: u128, m: u128) -> u128 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Reduces a signed integer into `[0, m)`.
pub fn reduce_i128(x: i128, m: u128) -> u128 {
    if x >= 0 {
        (x as u128) % m
    } else {
        let r = ((-(x + 1)) as u128) % m;
        m - 1 - r
    }
}

/// p-adic valuation of a nonzero residue, or `None` for zero.
#[inline]
pub fn val_p(mut x: u128, p: u128) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Returns the largest `N` with `p^N < MODULUS_LIMIT`.
pub fn max_digits(p: u64) -> u32 {
    let mut m: u128 = 1;
    let mut n = 0;
    while m.checked_mul(p as u128).is_some_and(|x| x < MODULUS_LIMIT) {
        m *= p as u128;
        n += 1;
    }
    n
}

/// Deterministic primality test for the small primes used as residue characteristics.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

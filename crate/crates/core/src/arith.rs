//! Small integer helpers. Everything here works on `i64` with `i128`
//! intermediates; moduli stay below 2^40 at desk scale.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn ipow(p: u64, e: u32) -> i64 {
    (p as i64).pow(e)
}

/// p-adic valuation of a nonzero integer.
pub fn vp(x: i64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let p = p as i64;
    let mut x = x.abs();
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Valuation capped at `cap` (zero counts as `cap`).
pub fn vp_cap(x: i64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        cap
    } else {
        vp(x, p).min(cap)
    }
}

pub fn rem(a: i64, m: i64) -> i64 {
    let r = a % m;
    if r < 0 {
        r + m
    } else {
        r
    }
}

pub fn mulmod(a: i64, b: i64, m: i64) -> i64 {
    ((a as i128 * b as i128).rem_euclid(m as i128)) as i64
}

/// Returns (g, s, t) with g = s*a + t*b, g >= 0.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Inverse of a unit modulo m.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = xgcd(rem(a, m), m);
    (g == 1).then(|| rem(s, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xgcd_identity() {
        for a in -30..30 {
            for b in -30..30 {
                let (g, s, t) = xgcd(a, b);
                assert_eq!(g, s * a + t * b);
                if a != 0 || b != 0 {
                    assert_eq!(a % g, 0);
                    assert_eq!(b % g, 0);
                }
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 8), Some(3));
        assert_eq!(inv_mod(2, 8), None);
        assert_eq!(vp(48, 2), 4);
        assert!(is_prime(3) && !is_prime(6) && !is_prime(1));
    }
}

//! Rational exponents pinning a cardinality k between powers of two.
//!
//! `choose_pq(k)` returns the smallest-denominator fraction p/q strictly
//! inside (log2(k-1), log2(k)), i.e. with (k-1)^q < 2^p < k^q. Both
//! comparisons are exact big-integer tests, never floating point. The
//! Stern-Brocot walk visits mediants between an under- and an
//! over-approximation; the first mediant that lands strictly inside the
//! interval is the unique fraction of minimal denominator there (and of
//! minimal numerator for that denominator).

use crate::error::PredicateError;
use num_bigint::BigUint;
use num_traits::One;

/// Exponents with (k-1)^q < 2^p < k^q, q minimal, then p minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalExponent {
    pub k: u64,
    pub p: u64,
    pub q: u64,
}

fn pow(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

/// p/q <= log2(k-1), i.e. 2^p <= (k-1)^q.
fn at_most_lo(p: u64, q: u64, k: u64) -> bool {
    (BigUint::one() << p) <= pow(k - 1, q)
}

/// p/q >= log2(k), i.e. 2^p >= k^q.
fn at_least_hi(p: u64, q: u64, k: u64) -> bool {
    (BigUint::one() << p) >= pow(k, q)
}

/// Smallest-denominator p/q with log2(k-1) < p/q < log2(k). Needs k >= 2.
pub fn choose_pq(k: u64) -> Result<RationalExponent, PredicateError> {
    if k < 2 {
        return Err(PredicateError::KTooSmall { k, min: 2 });
    }
    // Walk the Stern-Brocot tree: lo starts at 0/1, hi at the formal 1/0.
    let (mut lo, mut hi) = ((0u64, 1u64), (1u64, 0u64));
    loop {
        let m = (lo.0 + hi.0, lo.1 + hi.1);
        if at_most_lo(m.0, m.1, k) {
            lo = m;
        } else if at_least_hi(m.0, m.1, k) {
            hi = m;
        } else {
            return Ok(RationalExponent { k, p: m.0, q: m.1 });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inside(p: u64, q: u64, k: u64) -> bool {
        !at_most_lo(p, q, k) && !at_least_hi(p, q, k)
    }

    #[test]
    fn known_values() {
        let cases = [
            (2, 1, 2),
            (3, 3, 2),
            (4, 5, 3),
            (5, 9, 4),
            (105, 114, 17),
            (106, 47, 7),
        ];
        for (k, p, q) in cases {
            let r = choose_pq(k).unwrap();
            assert_eq!((r.p, r.q), (p, q), "k = {k}");
        }
    }

    #[test]
    fn k_below_two_rejected() {
        assert!(choose_pq(0).is_err());
        assert!(choose_pq(1).is_err());
    }

    #[test]
    fn defining_inequalities_hold() {
        for k in 2..=220 {
            let r = choose_pq(k).unwrap();
            assert!(inside(r.p, r.q, k), "k = {k} gave {}/{}", r.p, r.q);
        }
    }

    #[test]
    fn denominator_is_minimal() {
        for k in 2..=120 {
            let r = choose_pq(k).unwrap();
            for q in 1..r.q {
                // The only candidate numerator for denominator q is the least
                // p with 2^p > (k-1)^q; anything larger only moves right.
                let mut p = 0;
                while at_most_lo(p, q, k) {
                    p += 1;
                }
                assert!(
                    at_least_hi(p, q, k),
                    "k = {k}: {p}/{q} beats {}/{}",
                    r.p,
                    r.q
                );
            }
        }
    }

    #[test]
    fn numerator_is_minimal_for_denominator() {
        for k in 2..=120 {
            let r = choose_pq(k).unwrap();
            assert!(r.p == 0 || !inside(r.p - 1, r.q, k), "k = {k}");
        }
    }
}

use crate::error::{Error, Result};

/// The characteristic together with the small tables every construction needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    inv_factorials: Vec<u64>,
    wilson: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 16 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        let mut factorials = Vec::with_capacity(p as usize);
        let mut acc = 1u64;
        factorials.push(1);
        for i in 1..p {
            acc = acc * i % p;
            factorials.push(acc);
        }
        let wilson = factorials[(p - 1) as usize];
        let inv_factorials = factorials.iter().map(|&f| mod_pow(f, p - 2, p)).collect();
        Ok(Self {
            p,
            inv_factorials,
            wilson,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(i!)^{-1} mod p` for `0 <= i <= p - 1`.
    pub fn inv_factorial(&self, i: usize) -> u64 {
        self.inv_factorials[i]
    }

    /// `(p - 1)! mod p`; always `p - 1`.
    pub fn wilson(&self) -> u64 {
        self.wilson
    }
}

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

pub(crate) fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i64) as u64)
}

pub(crate) fn reduce_signed(c: i128, modulus: u64) -> u64 {
    c.rem_euclid(modulus as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite() {
        assert_eq!(PrimeContext::new(2), Err(Error::InvalidPrime(2)));
        assert!(PrimeContext::new(9).is_err());
        assert!(PrimeContext::new(1).is_err());
    }

    #[test]
    fn tables_are_consistent() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(ctx.wilson(), p - 1);
            let mut f = 1u64;
            for i in 0..p as usize {
                if i > 0 {
                    f = f * i as u64 % p;
                }
                assert_eq!(f * ctx.inv_factorial(i) % p, 1);
            }
        }
    }

    #[test]
    fn inverse_mod_p_squared() {
        assert_eq!(mod_inv(2, 9), Some(5));
        assert_eq!(mod_inv(3, 9), None);
        assert_eq!(mod_inv(7, 25).map(|x| x * 7 % 25), Some(1));
    }
}

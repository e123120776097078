use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient ring `Z/N`, optionally flagged as a prime field.
///
/// Elements are canonical representatives in `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    modulus: u64,
    prime: bool,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on nonnegative integers: returns `(g, s, t)` with `s a + t b = g`.
pub(crate) fn xgcd(a: u64, b: u64) -> (u64, i128, i128) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 as u64, s0, t0)
}

impl Ring {
    /// `Z/N` for `N >= 2`.
    pub fn modular(modulus: u64) -> Result<Self> {
        if modulus < 2 || modulus > u32::MAX as u64 {
            return Err(Error::InvalidRing(format!("modulus {modulus} out of range")));
        }
        Ok(Ring { modulus, prime: is_prime(modulus) })
    }

    /// The prime field `F_p`.
    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidRing(format!("{p} is not a supported prime")));
        }
        Ok(Ring { modulus: p, prime: true })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_field(&self) -> bool {
        self.prime
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub(crate) fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    /// Signed representative in `(-N/2, N/2]`, handy for display.
    pub fn signed(&self, x: u64) -> i64 {
        if x > self.modulus / 2 {
            x as i64 - self.modulus as i64
        } else {
            x as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// `a + b c`.
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        ((a as u128 + b as u128 * c as u128) % self.modulus as u128) as u64
    }

    pub fn is_unit(&self, a: u64) -> bool {
        gcd(a, self.modulus) == 1
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        let (g, s, _) = xgcd(a % self.modulus, self.modulus);
        (g == 1).then(|| self.reduce_i128(s))
    }

    /// A unit `u` with `u a = gcd(a, N)`; the stabilized form of a pivot.
    pub(crate) fn normalizing_unit(&self, a: u64) -> (u64, u64) {
        let n = self.modulus;
        let g = gcd(a, n);
        let m = n / g;
        if m == 1 {
            return (1, g);
        }
        let (_, s, _) = xgcd((a / g) % m, m);
        let mut u = s.rem_euclid(m as i128) as u64;
        while gcd(u, n) != 1 {
            u += m;
        }
        (u, g)
    }

    /// All elements `0..N`, in order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.modulus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizing_unit_hits_gcd() {
        for n in [4u64, 9, 12, 25, 36] {
            let r = Ring::modular(n).unwrap();
            for a in 1..n {
                let (u, g) = r.normalizing_unit(a);
                assert!(r.is_unit(u), "n={n} a={a}");
                assert_eq!(r.mul(u, a), g);
            }
        }
    }

    #[test]
    fn inverses() {
        let r = Ring::modular(9).unwrap();
        assert_eq!(r.inv(2), Some(5));
        assert_eq!(r.inv(3), None);
        assert!(Ring::prime_field(9).is_err());
        assert!(Ring::modular(1).is_err());
    }
}

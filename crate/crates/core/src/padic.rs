//! Truncated p-adic integers `Z/p^M` and polynomials over them.
//!
//! Elements are plain `u64` residues in `[0, p^M)`; the precision belongs to
//! the ring, not to the individual values. `p^M` must fit in 63 bits so that
//! products fit in a `u128`.

use crate::error::{Error, Result};

/// Deterministic trial-division primality test; `p` is always small here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffRing {
    p: u64,
    m: u32,
    modulus: u64,
}

impl CoeffRing {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroPrecision);
        }
        let mut modulus: u64 = 1;
        for _ in 0..m {
            modulus = modulus
                .checked_mul(p)
                .filter(|&x| x < (1u64 << 63))
                .ok_or(Error::ModulusTooLarge { p, m })?;
        }
        Ok(CoeffRing { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficient precision `M`.
    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce_i64(&self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.modulus as i128) as u64
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus as i128) as u64
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

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn invert(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::NonUnit(a));
        }
        let (mut old_r, mut r) = (a as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(self.reduce_i128(old_s))
    }

    /// p-adic valuation of a residue, capped at `M` (zero has valuation `M`).
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }
}

/// Polynomial over a [`CoeffRing`], coefficients lowest degree first.
/// Trailing zero coefficients are always trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(ring: &CoeffRing, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % ring.modulus()).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(ring: &CoeffRing, coeffs: &[i64]) -> Self {
        Poly::new(ring, coeffs.iter().map(|&c| ring.reduce_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, ring: &CoeffRing, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| ring.add(ring.mul(acc, x), c))
    }

    pub fn derivative(&self, ring: &CoeffRing) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ring.mul(c, i as u64 % ring.modulus()))
            .collect();
        Poly::new(ring, coeffs)
    }

    pub fn add(&self, ring: &CoeffRing, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                ring.add(a, b)
            })
            .collect();
        Poly::new(ring, coeffs)
    }

    pub fn mul(&self, ring: &CoeffRing, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly { coeffs: vec![] };
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ring.add(out[i + j], ring.mul(a, b));
            }
        }
        Poly::new(ring, out)
    }
}

/// Newton lifting of an approximate root `r0` of `f` until `v(f(r)) >= target`.
///
/// Requires the Hensel regime `v(f(r0)) > 2 v(f'(r0))`. The returned root
/// satisfies `r = r0 mod p^(v(f(r0)) - v(f'(r0)))`.
pub fn hensel_lift_root(ring: &CoeffRing, f: &Poly, r0: u64, target: u32) -> Result<u64> {
    let m = ring.precision();
    if target > m {
        return Err(Error::PrecisionExhausted(format!(
            "target {target} exceeds coefficient precision {m}"
        )));
    }
    let df = f.derivative(ring);
    let r0 = r0 % ring.modulus();
    let fv = ring.val(f.eval(ring, r0));
    let dv = ring.val(df.eval(ring, r0));
    if fv >= target && fv > 2 * dv.min(m) {
        return Ok(r0);
    }
    if dv >= m || fv <= 2 * dv {
        return Err(Error::HenselFailure {
            value_val: fv,
            deriv_val: dv,
        });
    }
    let pd = ring.pow(ring.p(), dv as u64);
    let mut r = r0;
    // Correct digits double per step; the bound is generous.
    for _ in 0..2 * (m.ilog2() + 2) {
        let fr = f.eval(ring, r);
        if ring.val(fr) >= target {
            break;
        }
        let dr = df.eval(ring, r);
        // fr / dr with both divisible by p^dv.
        let num = fr / pd;
        let den = ring.invert(dr / pd)?;
        r = ring.sub(r, ring.mul(num, den));
    }
    if ring.val(f.eval(ring, r)) < target {
        return Err(Error::PrecisionExhausted("Newton iteration did not converge".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coeff_arith_examples() {
        let r = CoeffRing::new(2, 4).unwrap();
        // 3 * 11 = 33 = 1 mod 16
        assert_eq!(r.invert(3).unwrap(), 11);
        assert_eq!(r.invert(2), Err(Error::NonUnit(2)));
        let r3 = CoeffRing::new(3, 2).unwrap();
        assert_eq!(r3.add(8, 1), 0);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(CoeffRing::new(4, 3), Err(Error::NotPrime(4)));
        assert_eq!(CoeffRing::new(5, 0), Err(Error::ZeroPrecision));
        assert!(matches!(CoeffRing::new(2, 63), Err(Error::ModulusTooLarge { .. })));
        assert!(CoeffRing::new(2, 62).is_ok());
    }

    #[test]
    fn hensel_sqrt_minus_seven() {
        let ring = CoeffRing::new(2, 8).unwrap();
        let f = Poly::from_i64(&ring, &[7, 0, 1]);
        let r = hensel_lift_root(&ring, &f, 1, 6).unwrap();
        // Brute force: roots of x^2 + 7 mod 64 congruent to 1 mod 4.
        let admissible: Vec<u64> = (0..64u64)
            .filter(|x| (x * x + 7) % 64 == 0 && x % 4 == 1)
            .collect();
        assert_eq!(admissible, vec![21, 53]);
        assert!(admissible.contains(&(r % 64)));
        // Re-lifting is a fixed point.
        assert_eq!(hensel_lift_root(&ring, &f, r, 6).unwrap(), r);
    }

    #[test]
    fn hensel_linear_and_degenerate() {
        let ring = CoeffRing::new(3, 10).unwrap();
        let f = Poly::from_i64(&ring, &[-5, 1]);
        assert_eq!(hensel_lift_root(&ring, &f, 5, 10).unwrap(), 5);
        let g = Poly::from_i64(&ring, &[0, 0, 1]);
        assert!(matches!(
            hensel_lift_root(&ring, &g, 0, 4),
            Err(Error::HenselFailure { .. })
        ));
        let h = Poly::from_i64(&ring, &[-2, 0, 1]);
        // 2 is not a square mod 3.
        assert!(hensel_lift_root(&ring, &h, 1, 5).is_err());
        assert!(matches!(
            hensel_lift_root(&ring, &f, 5, 11),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn poly_degree_bookkeeping() {
        let ring = CoeffRing::new(2, 3).unwrap();
        let a = Poly::from_i64(&ring, &[1, 4]);
        let b = Poly::from_i64(&ring, &[1, 2]);
        // (1 + 4x)(1 + 2x) = 1 + 6x + 8x^2 = 1 + 6x mod 8
        let c = a.mul(&ring, &b);
        assert_eq!(c.degree(), Some(1));
        assert_eq!(c.coeffs(), &[1, 6]);
        let z = Poly::from_i64(&ring, &[8, 16]);
        assert_eq!(z.degree(), None);
    }

    proptest! {
        #[test]
        fn inverse_is_involution(a in 0u64..3u64.pow(12), m in 1u32..12) {
            let ring = CoeffRing::new(3, m).unwrap();
            let a = a % ring.modulus();
            prop_assume!(a % 3 != 0);
            let inv = ring.invert(a).unwrap();
            prop_assert_eq!(ring.mul(a, inv), 1 % ring.modulus());
            prop_assert_eq!(ring.invert(inv).unwrap(), a);
        }

        #[test]
        fn ring_axioms(a in 0u64..1 << 40, b in 0u64..1 << 40, c in 0u64..1 << 40) {
            let ring = CoeffRing::new(2, 40).unwrap();
            let (a, b, c) = (a % ring.modulus(), b % ring.modulus(), c % ring.modulus());
            prop_assert_eq!(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
            prop_assert_eq!(ring.add(ring.add(a, b), c), ring.add(a, ring.add(b, c)));
            prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
            prop_assert_eq!(ring.sub(ring.add(a, b), b), a);
        }

        #[test]
        fn hensel_output_is_root(r in 0u64..1000, m in 6u32..20) {
            // x^2 - a for a = 1 mod 8 has a 2-adic square root lifting 1.
            let ring = CoeffRing::new(2, m + 2).unwrap();
            let a = (8 * r + 1) % ring.modulus();
            let f = Poly::new(&ring, vec![ring.neg(a), 0, 1]);
            let root = hensel_lift_root(&ring, &f, 1, m).unwrap();
            prop_assert!(ring.val(f.eval(&ring, root)) >= m);
            prop_assert_eq!(root % 4, 1);
        }
    }
}

//! The residue field `F_q = F_p[y]/(h)` and small `F_p[x]` helpers.

use serde::Serialize;

/// An element of the residue field, in the power basis `1, y, ..., y^(f-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueElement(pub Vec<u64>);

impl ResidueElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    /// Monic defining polynomial, lowest degree first, length `f + 1`.
    modulus: Vec<u64>,
}

impl ResidueField {
    /// `modulus` must be monic of degree `f >= 1` and irreducible mod `p`;
    /// the caller checks irreducibility with [`is_irreducible`].
    pub fn new(p: u64, modulus: Vec<u64>) -> Self {
        debug_assert_eq!(modulus.last(), Some(&1));
        ResidueField { p, modulus }
    }

    pub fn prime_field(p: u64) -> Self {
        ResidueField::new(p, vec![0, 1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }

    pub fn zero(&self) -> ResidueElement {
        ResidueElement(vec![0; self.degree()])
    }

    pub fn one(&self) -> ResidueElement {
        let mut c = vec![0; self.degree()];
        c[0] = 1 % self.p;
        ResidueElement(c)
    }

    /// The class of `y`; for `f = 1` the root of the linear modulus.
    pub fn generator(&self) -> ResidueElement {
        if self.degree() == 1 {
            ResidueElement(vec![(self.p - self.modulus[0] % self.p) % self.p])
        } else {
            let mut c = vec![0; self.degree()];
            c[1] = 1;
            ResidueElement(c)
        }
    }

    pub fn from_int(&self, a: i64) -> ResidueElement {
        let mut c = vec![0; self.degree()];
        c[0] = a.rem_euclid(self.p as i64) as u64;
        ResidueElement(c)
    }

    /// Elements in lexicographic order of their coordinates, zero first.
    pub fn elements(&self) -> impl Iterator<Item = ResidueElement> + '_ {
        let f = self.degree();
        (0..self.order()).map(move |mut k| {
            let mut c = vec![0; f];
            for slot in c.iter_mut() {
                *slot = k % self.p;
                k /= self.p;
            }
            ResidueElement(c)
        })
    }

    /// Index of an element in [`Self::elements`] order.
    pub fn index_of(&self, a: &ResidueElement) -> u64 {
        a.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        ResidueElement(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn neg(&self, a: &ResidueElement) -> ResidueElement {
        ResidueElement(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &ResidueElement, k: u64) -> ResidueElement {
        ResidueElement(a.0.iter().map(|x| x * (k % self.p) % self.p).collect())
    }

    pub fn mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let prod = fp_poly_mul(self.p, &a.0, &b.0);
        let (_, r) = fp_poly_divrem(self.p, &prod, &self.modulus);
        let mut c = r;
        c.resize(self.degree(), 0);
        ResidueElement(c)
    }

    pub fn pow(&self, a: &ResidueElement, mut e: u64) -> ResidueElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &ResidueElement) -> Option<ResidueElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    pub fn frobenius(&self, a: &ResidueElement) -> ResidueElement {
        self.pow(a, self.p)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: &ResidueElement) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let n = self.order() - 1;
        let mut ord = n;
        for (r, _) in factor_small(n) {
            while ord % r == 0 && self.pow(a, ord / r) == self.one() {
                ord /= r;
            }
        }
        ord
    }

    /// Smallest generator of `F_q^x` in [`Self::elements`] order.
    pub fn primitive_element(&self) -> ResidueElement {
        let n = self.order() - 1;
        self.elements()
            .skip(1)
            .find(|a| self.mult_order(a) == n)
            .expect("finite field has a primitive element")
    }
}

pub(crate) fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(p: u64, a: u64) -> u64 {
    let mut acc = 1u64;
    let (mut b, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn fp_poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

/// Division with remainder in `F_p[x]`; `b` must be nonzero.
pub(crate) fn fp_poly_divrem(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let b = fp_trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_inv(p, b[db]);
    let mut r = fp_trim(a.iter().map(|x| x % p).collect());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] * lead_inv % p;
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r = fp_trim(r);
    }
    (fp_trim(q), r)
}

fn fp_poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = fp_poly_divrem(p, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod h` in `F_p[x]`.
fn frobenius_power(p: u64, h: &[u64], k: usize) -> Vec<u64> {
    let mut x = fp_poly_divrem(p, &[0, 1], h).1;
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_poly_divrem(p, &fp_poly_mul(p, &acc, &base), h).1;
            }
            base = fp_poly_divrem(p, &fp_poly_mul(p, &base, &base), h).1;
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub fn is_irreducible(p: u64, h: &[u64]) -> bool {
    let h = fp_trim(h.iter().map(|c| c % p).collect());
    if h.len() < 2 {
        return false;
    }
    let d = h.len() - 1;
    if d == 1 {
        return true;
    }
    let sub_x = |mut a: Vec<u64>| {
        a.resize(a.len().max(2), 0);
        a[1] = (a[1] + p - 1) % p;
        fp_trim(a)
    };
    if !sub_x(frobenius_power(p, &h, d)).is_empty() {
        return false;
    }
    for (r, _) in factor_small(d as u64) {
        let g = fp_poly_gcd(p, &sub_x(frobenius_power(p, &h, d / r as usize)), &h);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(2, &[1, 1, 1]));
        assert!(!is_irreducible(2, &[1, 0, 1]));
        assert!(is_irreducible(2, &[1, 1, 0, 1]));
        assert!(!is_irreducible(2, &[1, 0, 0, 0, 1]));
        // (x^2 + x + 1)^2 = x^4 + x^2 + 1 has no roots over F_2 but is reducible.
        assert!(!is_irreducible(2, &[1, 0, 1, 0, 1]));
        assert!(is_irreducible(3, &[1, 0, 1]));
        assert!(is_irreducible(5, &[1, 4, 1]));
        // x^2 - x + 1 splits mod 7 since 7 = 1 mod 3.
        assert!(!is_irreducible(7, &[1, 6, 1]));
    }

    #[test]
    fn f4_arithmetic() {
        let k = ResidueField::new(2, vec![1, 1, 1]);
        let y = k.generator();
        assert_eq!(k.mult_order(&y), 3);
        assert_eq!(k.mul(&y, &y), ResidueElement(vec![1, 1]));
        assert_eq!(k.pow(&y, 3), k.one());
        assert_eq!(k.frobenius(&y), ResidueElement(vec![1, 1]));
        assert_eq!(k.inv(&y).unwrap(), ResidueElement(vec![1, 1]));
        assert_eq!(k.elements().count(), 4);
        for a in k.elements() {
            assert_eq!(k.elements().nth(k.index_of(&a) as usize).unwrap(), a);
        }
    }

    #[test]
    fn prime_field_generator() {
        let k = ResidueField::prime_field(3);
        assert_eq!(k.primitive_element(), ResidueElement(vec![2]));
        assert_eq!(k.mult_order(&k.from_int(2)), 2);
        assert_eq!(k.generator(), ResidueElement(vec![0]));
    }
}

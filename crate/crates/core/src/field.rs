//! Finite extensions of `Q_p` presented as towers: one unramified floor
//! `Z_p[y]/(h)` followed by Eisenstein floors `O[x_k]/(E_k)`.
//!
//! Elements of `O_L` are stored in the tower power basis
//! `y^a x_1^b_1 ... x_s^b_s` with coefficients in `Z/p^M`. Since every floor
//! is monogenic this basis is a `Z_p`-basis of `O_L`, so `p^M O_L` is exactly
//! the set of coordinate vectors divisible by `p^M` and ring arithmetic is
//! exact modulo `pi^(eM)`. Theorems are checked at the field precision
//! `N <= eM`; the remaining `guard` p-digits absorb division losses.
//!
//! Floor `k` elements are laid out as `e_k` consecutive blocks of floor
//! `k - 1` elements (the coefficients of `1, x_k, ..., x_k^(e_k - 1)`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::CoeffRing;
use crate::residue::{is_irreducible, ResidueElement, ResidueField};

pub const DEFAULT_GUARD: u32 = 4;

/// A polynomial coefficient in a config file: an integer, or the coordinate
/// list of an element of the previous floor (lowest degree first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Element(Vec<Coefficient>),
}

impl From<i64> for Coefficient {
    fn from(c: i64) -> Self {
        Coefficient::Int(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub p: u64,
    /// Monic, lowest degree first, irreducible mod `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unramified_poly: Option<Vec<i64>>,
    /// Each polynomial is monic and Eisenstein over the previous floor.
    #[serde(default)]
    pub eisenstein_polys: Vec<Vec<Coefficient>>,
}

impl TowerSpec {
    pub fn new(p: u64, unramified_poly: Option<Vec<i64>>, eisenstein: Vec<Vec<i64>>) -> Self {
        TowerSpec {
            p,
            unramified_poly,
            eisenstein_polys: eisenstein
                .into_iter()
                .map(|poly| poly.into_iter().map(Coefficient::Int).collect())
                .collect(),
        }
    }

    pub fn ramification_index(&self) -> u32 {
        self.eisenstein_polys
            .iter()
            .map(|e| e.len().saturating_sub(1) as u32)
            .product()
    }

    pub fn residue_degree(&self) -> usize {
        self.unramified_poly
            .as_ref()
            .map_or(1, |h| h.len().saturating_sub(1).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement(pub Vec<u64>);

impl FieldElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

/// Valuation at a stated precision: `Infinite` means indistinguishable from
/// zero modulo `pi^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite { precision: u32 },
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
struct EisensteinFloor {
    degree: usize,
    /// Non-leading coefficients, each an element of the previous floor.
    coeffs: Vec<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct LocalField {
    spec: TowerSpec,
    ring: CoeffRing,
    precision: u32,
    f: usize,
    e: u32,
    /// Monic unramified modulus reduced mod `p^M`, length `f + 1`.
    unramified: Vec<u64>,
    floors: Vec<EisensteinFloor>,
    /// `dims[k]` is the rank of floor `k` over `Z_p`.
    dims: Vec<usize>,
    /// Residue of `pi_(k-1) / pi_k^(e_k)` for each Eisenstein floor.
    floor_units: Vec<ResidueElement>,
    residue: ResidueField,
}

impl LocalField {
    pub fn build(spec: &TowerSpec, precision: u32) -> Result<Self> {
        Self::build_with_guard(spec, precision, DEFAULT_GUARD)
    }

    pub fn build_with_guard(spec: &TowerSpec, precision: u32, guard: u32) -> Result<Self> {
        if precision < 4 {
            return Err(Error::PrecisionTooSmall(precision));
        }
        let p = spec.p;
        if !crate::padic::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (f, residue_modulus) = match &spec.unramified_poly {
            None => (1, vec![0, 1]),
            Some(h) => {
                if h.len() < 3 {
                    return Err(Error::DegenerateTower(
                        "unramified polynomial must have degree at least 2".into(),
                    ));
                }
                if *h.last().unwrap() != 1 {
                    return Err(Error::DegenerateTower("unramified polynomial is not monic".into()));
                }
                let hbar: Vec<u64> = h.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
                if !is_irreducible(p, &hbar) {
                    return Err(Error::NotIrreducibleResiduePoly(p));
                }
                (h.len() - 1, hbar)
            }
        };
        for poly in &spec.eisenstein_polys {
            if poly.len() < 3 {
                return Err(Error::DegenerateTower(
                    "Eisenstein polynomial must have degree at least 2".into(),
                ));
            }
            if poly.last() != Some(&Coefficient::Int(1)) {
                return Err(Error::NotEisenstein("leading coefficient must be 1".into()));
            }
        }
        let e = spec.ramification_index();
        if f as u32 * e == 1 {
            return Err(Error::DegenerateTower("tower has degree 1".into()));
        }
        let m = precision.div_ceil(e) + guard;
        let ring = CoeffRing::new(p, m)?;
        let unramified = match &spec.unramified_poly {
            None => vec![0, 1],
            Some(h) => h.iter().map(|&c| ring.reduce_i64(c)).collect(),
        };
        let mut field = LocalField {
            spec: spec.clone(),
            ring,
            precision,
            f,
            e,
            unramified,
            floors: vec![],
            dims: vec![f],
            floor_units: vec![],
            residue: ResidueField::new(p, residue_modulus),
        };
        for (k, poly) in spec.eisenstein_polys.iter().enumerate() {
            let level = k; // coefficients live on floor `k`
            let degree = poly.len() - 1;
            let coeffs = poly[..degree]
                .iter()
                .map(|c| field.coefficient_element(level, c))
                .collect::<Result<Vec<_>>>()?;
            let cap = field.level_cap(level);
            for (i, c) in coeffs.iter().enumerate() {
                let v = field.val_level(level, c);
                if v == 0 {
                    return Err(Error::NotEisenstein(format!("coefficient of x^{i} is a unit")));
                }
                if i == 0 && v != 1 {
                    return Err(Error::NotEisenstein(if v >= cap {
                        "constant term is zero".into()
                    } else {
                        format!("constant term has valuation {v}")
                    }));
                }
            }
            let c0_digit = field.digit_level(level, &coeffs[0], 1);
            let unit = field
                .residue
                .inv(&field.residue.neg(&c0_digit))
                .expect("constant term has valuation one");
            field.floor_units.push(unit);
            field.floors.push(EisensteinFloor { degree, coeffs });
            field.dims.push(field.dims[level] * degree);
        }
        Ok(field)
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    /// Field precision `N` in pi-digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn ramification_index(&self) -> u32 {
        self.e
    }

    pub fn residue_degree(&self) -> usize {
        self.f
    }

    /// `q = p^f`.
    pub fn residue_order(&self) -> u64 {
        self.residue.order()
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    fn top(&self) -> usize {
        self.floors.len()
    }

    fn level_cap(&self, level: usize) -> u32 {
        let e: u32 = self.floors[..level].iter().map(|fl| fl.degree as u32).product();
        e * self.ring.precision()
    }

    fn coefficient_element(&self, level: usize, c: &Coefficient) -> Result<Vec<u64>> {
        let mut out = vec![0u64; self.dims[level]];
        match c {
            Coefficient::Int(a) => out[0] = self.ring.reduce_i64(*a),
            Coefficient::Element(list) => {
                if level == 0 {
                    if list.len() > self.f {
                        return Err(Error::DegenerateTower(
                            "coefficient has more entries than the unramified degree".into(),
                        ));
                    }
                    for (slot, entry) in out.iter_mut().zip(list) {
                        match entry {
                            Coefficient::Int(a) => *slot = self.ring.reduce_i64(*a),
                            Coefficient::Element(_) => {
                                return Err(Error::DegenerateTower(
                                    "nested coefficient below the first floor".into(),
                                ))
                            }
                        }
                    }
                } else {
                    let below = self.dims[level - 1];
                    if list.len() > self.floors[level - 1].degree {
                        return Err(Error::DegenerateTower(
                            "coefficient has more entries than the floor degree".into(),
                        ));
                    }
                    for (b, entry) in list.iter().enumerate() {
                        let block = self.coefficient_element(level - 1, entry)?;
                        out[b * below..(b + 1) * below].copy_from_slice(&block);
                    }
                }
            }
        }
        Ok(out)
    }

    // ----- constructors -----

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.degree()])
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, a: i64) -> FieldElement {
        let mut c = vec![0; self.degree()];
        c[0] = self.ring.reduce_i64(a);
        FieldElement(c)
    }

    /// Element from raw tower-basis coordinates.
    pub fn element(&self, coords: &[i64]) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "wrong number of coordinates");
        FieldElement(coords.iter().map(|&c| self.ring.reduce_i64(c)).collect())
    }

    /// The distinguished uniformizer: the root of the last Eisenstein step,
    /// or `p` for an unramified field.
    pub fn uniformizer(&self) -> FieldElement {
        let mut c = vec![0; self.degree()];
        match self.top() {
            0 => c[0] = self.p(),
            s => c[self.dims[s - 1]] = 1,
        }
        FieldElement(c)
    }

    /// The root `y` of the unramified polynomial, if there is an unramified step.
    pub fn unramified_generator(&self) -> Option<FieldElement> {
        (self.f > 1).then(|| {
            let mut c = vec![0; self.degree()];
            c[1] = 1;
            FieldElement(c)
        })
    }

    /// The generator `x_k` of Eisenstein floor `k` (1-based), embedded in `L`.
    pub fn floor_generator(&self, k: usize) -> FieldElement {
        assert!(k >= 1 && k <= self.top());
        let mut c = vec![0; self.degree()];
        c[self.dims[k - 1]] = 1;
        FieldElement(c)
    }

    /// Number of Eisenstein floors.
    pub fn eisenstein_floors(&self) -> usize {
        self.top()
    }

    /// Non-leading coefficients of Eisenstein floor `k` (1-based), embedded in `L`.
    pub fn eisenstein_coefficients(&self, k: usize) -> Vec<FieldElement> {
        self.floors[k - 1]
            .coeffs
            .iter()
            .map(|c| self.embed(c))
            .collect()
    }

    /// Unramified modulus coefficients (monic), as elements of `L`.
    pub fn unramified_coefficients(&self) -> Vec<FieldElement> {
        self.unramified
            .iter()
            .map(|&c| {
                let mut v = vec![0; self.degree()];
                v[0] = c;
                FieldElement(v)
            })
            .collect()
    }

    fn embed(&self, floor_elem: &[u64]) -> FieldElement {
        let mut c = vec![0; self.degree()];
        c[..floor_elem.len()].copy_from_slice(floor_elem);
        FieldElement(c)
    }

    /// Dimension of floor `k` (0 = unramified floor).
    pub fn floor_dimension(&self, k: usize) -> usize {
        self.dims[k]
    }

    /// Lifts a residue element through the coordinate embedding `F_p[y] -> Z_p[y]`.
    pub fn lift_residue(&self, c: &ResidueElement) -> FieldElement {
        let mut v = vec![0; self.degree()];
        v[..self.f].copy_from_slice(&c.0);
        FieldElement(v)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let m = self.ring.modulus();
        FieldElement((0..self.degree()).map(|_| rng.gen_range(0..m)).collect())
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random_element(rng);
            if !self.residue(&x).is_zero() {
                return x;
            }
        }
    }

    // ----- ring operations -----

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| self.ring.add(x, y)).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| self.ring.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|&x| self.ring.neg(x)).collect())
    }

    pub fn scale(&self, a: &FieldElement, k: i64) -> FieldElement {
        let k = self.ring.reduce_i64(k);
        FieldElement(a.0.iter().map(|&x| self.ring.mul(x, k)).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(self.mul_level(self.top(), &a.0, &b.0))
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn mul_level(&self, level: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        let ring = &self.ring;
        if level == 0 {
            let f = self.f;
            if f == 1 {
                return vec![ring.mul(a[0], b[0])];
            }
            let mut prod = vec![0u64; 2 * f - 1];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    prod[i + j] = ring.add(prod[i + j], ring.mul(x, y));
                }
            }
            for deg in (f..2 * f - 1).rev() {
                let c = prod[deg];
                if c == 0 {
                    continue;
                }
                for i in 0..f {
                    prod[deg - f + i] = ring.sub(prod[deg - f + i], ring.mul(c, self.unramified[i]));
                }
            }
            prod.truncate(f);
            return prod;
        }
        let floor = &self.floors[level - 1];
        let d = self.dims[level - 1];
        let e = floor.degree;
        let mut prod = vec![vec![0u64; d]; 2 * e - 1];
        for i in 0..e {
            let ai = &a[i * d..(i + 1) * d];
            if ai.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..e {
                let bj = &b[j * d..(j + 1) * d];
                if bj.iter().all(|&x| x == 0) {
                    continue;
                }
                let t = self.mul_level(level - 1, ai, bj);
                for (slot, v) in prod[i + j].iter_mut().zip(t) {
                    *slot = ring.add(*slot, v);
                }
            }
        }
        for deg in (e..2 * e - 1).rev() {
            let c = std::mem::take(&mut prod[deg]);
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for (i, coeff) in floor.coeffs.iter().enumerate() {
                let t = self.mul_level(level - 1, &c, coeff);
                for (slot, v) in prod[deg - e + i].iter_mut().zip(t) {
                    *slot = ring.sub(*slot, v);
                }
            }
        }
        prod.truncate(e);
        prod.concat()
    }

    // ----- valuation and digits -----

    fn val_level(&self, level: usize, a: &[u64]) -> u32 {
        if level == 0 {
            return a.iter().map(|&x| self.ring.val(x)).min().unwrap_or(self.ring.precision());
        }
        let d = self.dims[level - 1];
        let e = self.floors[level - 1].degree as u32;
        let cap = self.level_cap(level);
        a.chunks(d)
            .enumerate()
            .map(|(b, block)| (e * self.val_level(level - 1, block) + b as u32).min(cap))
            .min()
            .unwrap_or(cap)
    }

    /// Raw valuation, capped at `e * M` (the storage precision).
    pub fn raw_valuation(&self, x: &FieldElement) -> u32 {
        self.val_level(self.top(), &x.0)
    }

    /// `nu_L(x)` at the field precision `N`.
    pub fn valuation(&self, x: &FieldElement) -> Valuation {
        self.valuation_at(x, self.precision)
    }

    /// `nu_L(x)` at precision `n`; values `>= n` are indistinguishable from zero.
    pub fn valuation_at(&self, x: &FieldElement, n: u32) -> Valuation {
        let v = self.raw_valuation(x);
        if v >= n {
            Valuation::Infinite { precision: n }
        } else {
            Valuation::Finite(v)
        }
    }

    pub fn eq_at(&self, a: &FieldElement, b: &FieldElement, n: u32) -> bool {
        self.raw_valuation(&self.sub(a, b)) >= n
    }

    /// Residue of `a / pi^j` for `a` on floor `level` with `v(a) >= j`.
    fn digit_level(&self, level: usize, a: &[u64], j: u32) -> ResidueElement {
        if level == 0 {
            let p = self.p();
            if j >= self.ring.precision() {
                return self.residue.zero();
            }
            let pj = p.pow(j);
            return ResidueElement(a.iter().map(|&x| (x / pj) % p).collect());
        }
        let floor = &self.floors[level - 1];
        let e = floor.degree as u32;
        let d = self.dims[level - 1];
        let (s, r) = (j / e, (j % e) as usize);
        let lower = self.digit_level(level - 1, &a[r * d..(r + 1) * d], s);
        if s == 0 {
            lower
        } else {
            let unit = self.residue.pow(&self.floor_units[level - 1], s as u64);
            self.residue.mul(&lower, &unit)
        }
    }

    /// The residue of `x / pi^j`, the `j`-th pi-adic digit. Requires `v(x) >= j`.
    pub fn digit(&self, x: &FieldElement, j: u32) -> ResidueElement {
        debug_assert!(self.raw_valuation(x) >= j, "digit below the valuation");
        self.digit_level(self.top(), &x.0, j)
    }

    /// Reduction `O_L -> lambda`.
    pub fn residue(&self, x: &FieldElement) -> ResidueElement {
        self.digit_level(self.top(), &x.0, 0)
    }

    /// Canonical representative of `x mod pi^n`: equal keys iff congruent.
    pub fn reduce_at(&self, x: &FieldElement, n: u32) -> FieldElement {
        let mut out = x.0.clone();
        self.reduce_level(self.top(), &mut out, n);
        FieldElement(out)
    }

    fn reduce_level(&self, level: usize, a: &mut [u64], n: u32) {
        if level == 0 {
            let m = self.ring.precision();
            if n >= m {
                return;
            }
            let pn = self.p().pow(n);
            for x in a.iter_mut() {
                *x %= pn;
            }
            return;
        }
        let d = self.dims[level - 1];
        let e = self.floors[level - 1].degree as u32;
        for (b, block) in a.chunks_mut(d).enumerate() {
            let need = n.saturating_sub(b as u32).div_ceil(e);
            self.reduce_level(level - 1, block, need);
        }
    }

    // ----- division -----

    fn pi_power(&self, k: u32) -> FieldElement {
        self.pow(&self.uniformizer(), k as u64)
    }

    /// Exact division of coordinates by `p^m`; all coordinates must be divisible.
    fn div_by_p_power(&self, z: &FieldElement, m: u32) -> FieldElement {
        let pm = self.p().pow(m);
        debug_assert!(z.0.iter().all(|&c| c % pm == 0));
        FieldElement(z.0.iter().map(|&c| c / pm).collect())
    }

    /// Inverse of a unit by Newton iteration `w <- w (2 - u w)`.
    pub fn invert_unit(&self, u: &FieldElement) -> Result<FieldElement> {
        let r = self.residue(u);
        let rinv = self
            .residue
            .inv(&r)
            .ok_or(Error::NonIntegralQuotient { num: 0, den: self.raw_valuation(u) })?;
        let mut w = self.lift_residue(&rinv);
        let two = self.from_int(2);
        let target = self.level_cap(self.top());
        for _ in 0..64 {
            let uw = self.mul(u, &w);
            if self.raw_valuation(&self.sub(&uw, &self.one())) >= target {
                return Ok(w);
            }
            w = self.mul(&w, &self.sub(&two, &uw));
        }
        unreachable!("Newton inversion converges quadratically")
    }

    /// Field-level quotient `x / y` for integral results (`v(x) >= v(y)`).
    ///
    /// Loses `ceil(v(y) / e)` p-digits of storage precision.
    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        let k = self
            .valuation(y)
            .finite()
            .ok_or(Error::DivisionByIndistinguishableZero)?;
        let vx = self.raw_valuation(x);
        if vx >= self.level_cap(self.top()) {
            return Ok(self.zero());
        }
        if vx < k {
            return Err(Error::NonIntegralQuotient { num: vx, den: k });
        }
        if k == 0 {
            return Ok(self.mul(x, &self.invert_unit(y)?));
        }
        let m = k.div_ceil(self.e);
        let shift = self.pi_power(m * self.e - k);
        let unit = self.div_by_p_power(&self.mul(y, &shift), m);
        let num = self.div_by_p_power(&self.mul(x, &shift), m);
        Ok(self.mul(&num, &self.invert_unit(&unit)?))
    }

    /// `x / pi^j` for `v(x) >= j`.
    pub fn div_pi_power(&self, x: &FieldElement, j: u32) -> Result<FieldElement> {
        if j == 0 {
            return Ok(x.clone());
        }
        self.div(x, &self.pi_power(j))
    }

    /// The Teichmuller lift of a nonzero residue: the unique `(q-1)`-th root
    /// of unity reducing to `c`, as the fixed point of `x -> x^q`.
    pub fn teichmuller(&self, c: &ResidueElement) -> FieldElement {
        assert!(!c.is_zero(), "zero has no Teichmuller lift");
        let q = self.residue_order();
        let mut x = self.lift_residue(c);
        for _ in 0..=self.ring.precision() + 1 {
            let next = self.pow(&x, q);
            if next == x {
                return x;
            }
            x = next;
        }
        x
    }
}

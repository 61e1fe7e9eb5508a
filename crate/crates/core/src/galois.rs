//! Galois groups of towers by root search, the lower ramification
//! filtration and the maps `theta_i`.
//!
//! An embedding `L -> L` is determined by the images of the tower
//! generators. We enumerate them floor by floor: roots of the unramified
//! polynomial, then roots of each Eisenstein polynomial with coefficients
//! already mapped. Each automorphism is stored as the matrix of its action
//! on the tower basis, so applying and composing are matrix operations.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField, Valuation};
use crate::group::{FiniteGroup, Quotient, Subgroup};
use crate::residue::ResidueElement;

/// Horner evaluation of a polynomial with coefficients in `L` (lowest first).
pub fn eval_poly(field: &LocalField, poly: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = field.zero();
    for c in poly.iter().rev() {
        acc = field.add(&field.mul(&acc, x), c);
    }
    acc
}

fn derivative(field: &LocalField, poly: &[FieldElement]) -> Vec<FieldElement> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| field.scale(c, i as i64))
        .collect()
}

/// Roots in `O_L` of a polynomial over `O_L`, distinct modulo `pi^N`.
///
/// Digits are fixed one at a time. A prefix `c` known modulo `pi^k` survives
/// only if `v(g(c)) >= k`; once `v(g(c)) > 2 v(g'(c))` and `k > v(g'(c))`
/// Newton's method converges to the only root congruent to `c` mod `pi^k`.
pub fn roots_in_field(field: &LocalField, poly: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let n = field.precision();
    let dpoly = derivative(field, poly);
    let reps: Vec<FieldElement> = field
        .residue_field()
        .elements()
        .map(|c| field.lift_residue(&c))
        .collect();
    let pi = field.uniformizer();
    let mut roots: Vec<FieldElement> = vec![];
    let mut keys: BTreeSet<Vec<u64>> = BTreeSet::new();
    // (prefix, digits fixed, pi^digits)
    let mut stack = vec![(field.zero(), 0u32, field.one())];
    while let Some((c, k, pik)) = stack.pop() {
        let gv = field.raw_valuation(&eval_poly(field, poly, &c));
        if gv < k {
            continue;
        }
        let dv = field.raw_valuation(&eval_poly(field, &dpoly, &c));
        if dv < n && gv > 2 * dv && k > dv {
            let root = newton(field, poly, &dpoly, c)?;
            let key = field.reduce_at(&root, n).0;
            if keys.insert(key) {
                roots.push(root);
            }
            continue;
        }
        if k >= n {
            return Err(Error::PrecisionExhausted(format!(
                "roots not separated at precision {n}"
            )));
        }
        let next = field.mul(&pik, &pi);
        for r in reps.iter().rev() {
            stack.push((field.add(&c, &field.mul(r, &pik)), k + 1, next.clone()));
        }
    }
    Ok(roots)
}

fn newton(
    field: &LocalField,
    poly: &[FieldElement],
    dpoly: &[FieldElement],
    mut c: FieldElement,
) -> Result<FieldElement> {
    let n = field.precision();
    let mut best = 0;
    loop {
        let g = eval_poly(field, poly, &c);
        let gv = field.raw_valuation(&g);
        let d = eval_poly(field, dpoly, &c);
        let dv = field.raw_valuation(&d);
        if gv <= best {
            // no further progress: storage precision reached
            return if gv >= n + dv {
                Ok(c)
            } else {
                Err(Error::PrecisionExhausted(format!(
                    "root known only to pi^{}",
                    gv.saturating_sub(dv)
                )))
            };
        }
        best = gv;
        if gv >= field.ring().precision() * field.ramification_index() {
            return Ok(c);
        }
        c = field.sub(&c, &field.div(&g, &d)?);
    }
}

/// A field automorphism, stored by its generator images and its matrix on
/// the tower basis.
#[derive(Debug, Clone)]
pub struct Automorphism {
    /// Image of `y` (or `1` when there is no unramified step), then of each
    /// Eisenstein generator.
    generator_images: Vec<FieldElement>,
    /// `columns[j]` is the image of the `j`-th tower basis monomial.
    columns: Vec<Vec<u64>>,
}

impl Automorphism {
    pub fn generator_images(&self) -> &[FieldElement] {
        &self.generator_images
    }

    pub fn apply(&self, field: &LocalField, x: &FieldElement) -> FieldElement {
        let ring = field.ring();
        let mut out = vec![0u64; field.degree()];
        for (col, &xc) in self.columns.iter().zip(&x.0) {
            if xc == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(col) {
                *o = ring.add(*o, ring.mul(a, xc));
            }
        }
        FieldElement(out)
    }
}

/// Evaluates a floor-`level` element under generator images.
fn eval_floor(field: &LocalField, images: &[FieldElement], level: usize, coords: &[u64]) -> FieldElement {
    if level == 0 {
        let mut acc = field.zero();
        for &c in coords.iter().rev() {
            acc = field.add(&field.mul(&acc, &images[0]), &field.from_int(c as i64));
        }
        return acc;
    }
    let d = field.floor_dimension(level - 1);
    let mut acc = field.zero();
    for block in coords.chunks(d).rev() {
        acc = field.add(
            &field.mul(&acc, &images[level]),
            &eval_floor(field, images, level - 1, block),
        );
    }
    acc
}

#[derive(Debug, Clone)]
pub struct GaloisGroup {
    field: LocalField,
    elements: Vec<Automorphism>,
    group: FiniteGroup,
}

impl GaloisGroup {
    /// Enumerates all `Q_p`-embeddings `L -> L`; fails with `NotGalois` when
    /// there are fewer than `[L : Q_p]`.
    pub fn compute(field: &LocalField) -> Result<Self> {
        let n = field.degree();
        let base: Vec<Vec<FieldElement>> = match field.unramified_generator() {
            None => vec![vec![field.one()]],
            Some(_) => roots_in_field(field, &field.unramified_coefficients())?
                .into_iter()
                .map(|y| vec![y])
                .collect(),
        };
        let mut partial = base;
        for k in 1..=field.eisenstein_floors() {
            let coeffs = field.eisenstein_coefficients(k);
            let mut next = vec![];
            for images in &partial {
                let mut poly: Vec<FieldElement> = coeffs
                    .iter()
                    .map(|c| eval_floor(field, images, k - 1, &c.0[..field.floor_dimension(k - 1)]))
                    .collect();
                poly.push(field.one());
                for root in roots_in_field(field, &poly)? {
                    let mut ext = images.clone();
                    ext.push(root);
                    next.push(ext);
                }
            }
            partial = next;
        }
        if partial.len() != n {
            return Err(Error::NotGalois { found: partial.len(), degree: n });
        }
        let mut identity = vec![field.unramified_generator().unwrap_or_else(|| field.one())];
        identity.extend((1..=field.eisenstein_floors()).map(|k| field.floor_generator(k)));
        let prec = field.precision();
        let is_identity = |imgs: &[FieldElement]| {
            imgs.iter().zip(&identity).all(|(a, b)| field.eq_at(a, b, prec))
        };
        partial.sort_by_key(|imgs| !is_identity(imgs));
        if !is_identity(&partial[0]) {
            return Err(Error::ModuleInconsistent("identity embedding not found".into()));
        }
        let top = field.eisenstein_floors();
        let elements: Vec<Automorphism> = partial
            .into_iter()
            .map(|images| {
                let columns = (0..n)
                    .map(|j| {
                        let mut e = vec![0u64; n];
                        e[j] = 1;
                        eval_floor(field, &images, top, &e).0
                    })
                    .collect();
                Automorphism { generator_images: images, columns }
            })
            .collect();
        let find = |imgs: &[FieldElement]| {
            elements.iter().position(|s| {
                s.generator_images.iter().zip(imgs).all(|(a, b)| field.eq_at(a, b, prec))
            })
        };
        let mut table = vec![vec![0; n]; n];
        for (a, sa) in elements.iter().enumerate() {
            for (b, sb) in elements.iter().enumerate() {
                let imgs: Vec<FieldElement> = sb
                    .generator_images
                    .iter()
                    .map(|x| sa.apply(field, x))
                    .collect();
                table[a][b] = find(&imgs).ok_or_else(|| {
                    Error::ModuleInconsistent("composition of automorphisms not found".into())
                })?;
            }
        }
        let group = FiniteGroup::from_table(table)?;
        Ok(GaloisGroup { field: field.clone(), elements, group })
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn automorphism(&self, s: usize) -> &Automorphism {
        &self.elements[s]
    }

    /// `sigma_s(x)`; composition is `(st)(x) = s(t(x))`.
    pub fn apply(&self, s: usize, x: &FieldElement) -> FieldElement {
        self.elements[s].apply(&self.field, x)
    }

    /// The exponent `k < f` with `sigma(a) = a^(p^k)` on the residue field.
    pub fn residue_exponent(&self, s: usize) -> usize {
        let Some(y) = self.field.unramified_generator() else {
            return 0;
        };
        let lam = self.field.residue_field();
        let image = self.field.residue(&self.apply(s, &y));
        let mut power = lam.generator();
        for k in 0..self.field.residue_degree() {
            if power == image {
                return k;
            }
            power = lam.frobenius(&power);
        }
        unreachable!("automorphisms act on the residue field by Frobenius powers")
    }

    /// Action on the residue field.
    pub fn apply_residue(&self, s: usize, a: &ResidueElement) -> ResidueElement {
        let lam = self.field.residue_field();
        (0..self.residue_exponent(s)).fold(a.clone(), |x, _| lam.frobenius(&x))
    }

    /// An element acting on `lambda` as `a -> a^p`.
    pub fn frobenius(&self) -> usize {
        let f = self.field.residue_degree();
        (0..self.order())
            .find(|&s| self.residue_exponent(s) == 1 % f)
            .expect("G maps onto Gal(lambda/F_p)")
    }

    /// `sigma(pi) / pi` for a uniformizer `pi`.
    pub fn uniformizer_ratio(&self, s: usize, pi: &FieldElement) -> Result<FieldElement> {
        self.field.div(&self.apply(s, pi), pi)
    }

    /// The values `sigma -> sigma(pi)/pi` of the fundamental cocycle, as units.
    pub fn fundamental_cocycle_values(&self, pi: &FieldElement) -> Result<Vec<FieldElement>> {
        if self.field.valuation(pi) != Valuation::Finite(1) {
            return Err(Error::ModuleInconsistent("not a uniformizer".into()));
        }
        (0..self.order()).map(|s| self.uniformizer_ratio(s, pi)).collect()
    }

    pub fn subgroup(&self, indices: &[usize]) -> Result<Subgroup> {
        Subgroup::new(&self.group, indices)
    }

    pub fn quotient(&self, normal: &[usize]) -> Result<Quotient> {
        Quotient::new(&self.group, normal)
    }
}

/// The lower ramification filtration with per-element breaks.
#[derive(Debug, Clone, Serialize)]
pub struct RamificationFiltration {
    /// `i(sigma) = v(sigma(pi)/pi - 1)` for `sigma` in `G_0` minus the
    /// identity; `-1` outside `G_0` and `None` for the identity.
    pub element_breaks: Vec<Option<i64>>,
    /// Distinct values of `i(sigma)` over `G_0 \ {1}`, ascending.
    pub breaks: Vec<u32>,
    pub inertia: Vec<usize>,
    pub e: usize,
    pub f: usize,
    pub t: usize,
    pub w: usize,
}

impl RamificationFiltration {
    pub fn compute(g: &GaloisGroup) -> Result<Self> {
        let field = g.field();
        let pi = field.uniformizer();
        let one = field.one();
        let mut element_breaks = vec![None; g.order()];
        let mut inertia = vec![0];
        for s in 1..g.order() {
            if g.residue_exponent(s) != 0 {
                element_breaks[s] = Some(-1);
                continue;
            }
            inertia.push(s);
            let ratio = g.uniformizer_ratio(s, &pi)?;
            match field.valuation(&field.sub(&ratio, &one)) {
                Valuation::Finite(v) => element_breaks[s] = Some(v as i64),
                Valuation::Infinite { precision } => {
                    return Err(Error::PrecisionExhausted(format!(
                        "sigma(pi)/pi - 1 vanishes at precision {precision}"
                    )))
                }
            }
        }
        let breaks: Vec<u32> = element_breaks
            .iter()
            .flatten()
            .filter(|&&b| b >= 0)
            .map(|&b| b as u32)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let e = inertia.len();
        let w = element_breaks.iter().filter(|b| matches!(b, None | Some(1..))).count();
        Ok(RamificationFiltration {
            element_breaks,
            breaks,
            inertia,
            e,
            f: g.order() / e,
            t: e / w,
            w,
        })
    }

    pub fn max_break(&self) -> u32 {
        self.breaks.last().copied().unwrap_or(0)
    }

    /// `G_i` as sorted element indices; `G_{-1} = G`.
    pub fn subgroup(&self, i: i64) -> Vec<usize> {
        (0..self.element_breaks.len())
            .filter(|&s| match self.element_breaks[s] {
                None => true,
                Some(b) => i < 0 || (b >= 0 && b >= i),
            })
            .collect()
    }

    pub fn in_level(&self, s: usize, i: i64) -> bool {
        self.subgroup(i).contains(&s)
    }

    /// `theta_0(sigma)`: the residue of `sigma(pi)/pi` in `lambda^x`; for
    /// `i >= 1`, `theta_i(sigma)`: the residue of `(sigma(pi)/pi - 1)/pi^i`.
    pub fn theta(&self, g: &GaloisGroup, i: u32, s: usize) -> Result<ResidueElement> {
        if !self.in_level(s, i as i64) {
            return Err(Error::NotInLevel(i as i64));
        }
        let field = g.field();
        let ratio = g.uniformizer_ratio(s, &field.uniformizer())?;
        if i == 0 {
            Ok(field.residue(&ratio))
        } else {
            let d = field.sub(&ratio, &field.one());
            if field.raw_valuation(&d) < i {
                return Err(Error::NotInLevel(i as i64));
            }
            Ok(field.digit(&d, i))
        }
    }

    /// `residue(sigma(pi)/pi)` for every `sigma` in `G`: the twist character
    /// on the layers `U^j/U^(j+1)`.
    pub fn twist_character(g: &GaloisGroup) -> Result<Vec<ResidueElement>> {
        let field = g.field();
        let pi = field.uniformizer();
        (0..g.order())
            .map(|s| Ok(field.residue(&g.uniformizer_ratio(s, &pi)?)))
            .collect()
    }
}

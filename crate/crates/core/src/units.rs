//! `U^i/U^N` and the residue modules `lambda^x`, `lambda^+` as finite
//! G-modules.
//!
//! Generators of `U^i/U^N`: the Teichmuller lift `omega` of a primitive
//! element of `lambda^x` (level 0 only), then `u_(j,k) = 1 + y^k pi^j` for
//! `max(i,1) <= j < N`, `0 <= k < f`. Discrete logs are read off digit by
//! digit; the relations are the power relations `omega^(q-1) = 1` and
//! `u_(j,k)^p = (digits of level > j)`.

use std::collections::HashMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::abelian::IntMatrix;
use crate::cohomology::{
    Cocycle, CohomologyClass, CohomologyGroup, EnumerableModule, GModule, InducedMap, ModuleMap,
};
use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::galois::{GaloisGroup, RamificationFiltration};
use crate::group::FiniteGroup;
use crate::residue::{ResidueElement, ResidueField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Teichmuller,
    Principal { layer: u32, basis: usize },
}

fn pow_big(field: &LocalField, x: &FieldElement, e: &BigInt) -> FieldElement {
    debug_assert!(e.sign() != Sign::Minus);
    let mut acc = field.one();
    for i in (0..e.bits()).rev() {
        acc = field.mul(&acc, &acc);
        if e.bit(i) {
            acc = field.mul(&acc, x);
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct UnitQuotientModule<'g> {
    galois: &'g GaloisGroup,
    level: u32,
    precision: u32,
    kinds: Vec<Generator>,
    generators: Vec<FieldElement>,
    inverses: Vec<FieldElement>,
    residue_log: HashMap<ResidueElement, u64>,
    exponent: BigInt,
    gmodule: GModule,
}

impl<'g> UnitQuotientModule<'g> {
    /// Builds `U^level / U^precision`; checks the order against
    /// `(q-1)^[level=0] q^(precision - max(level,1))` and functoriality of
    /// the action.
    pub fn new(galois: &'g GaloisGroup, level: u32, precision: u32) -> Result<Self> {
        let field = galois.field();
        if precision > field.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "module precision {precision} exceeds field precision {}",
                field.precision()
            )));
        }
        if level >= precision {
            return Err(Error::LevelMismatch { expected: precision - 1, found: level });
        }
        let f = field.residue_degree();
        let lam = field.residue_field();
        let mut kinds = vec![];
        let mut generators = vec![];
        let mut residue_log = HashMap::new();
        if level == 0 {
            let prim = lam.primitive_element();
            let mut x = lam.one();
            for k in 0..lam.order() - 1 {
                residue_log.insert(x.clone(), k);
                x = lam.mul(&x, &prim);
            }
            kinds.push(Generator::Teichmuller);
            generators.push(field.teichmuller(&prim));
        }
        let y = field.unramified_generator().unwrap_or_else(|| field.one());
        let pi = field.uniformizer();
        let mut pij = field.pow(&pi, level.max(1) as u64);
        for j in level.max(1)..precision {
            let mut yk = field.one();
            for k in 0..f {
                kinds.push(Generator::Principal { layer: j, basis: k });
                generators.push(field.add(&field.one(), &field.mul(&yk, &pij)));
                yk = field.mul(&yk, &y);
            }
            pij = field.mul(&pij, &pi);
        }
        let inverses = generators
            .iter()
            .map(|g| field.invert_unit(g))
            .collect::<Result<Vec<_>>>()?;
        let mut module = UnitQuotientModule {
            galois,
            level,
            precision,
            kinds,
            generators,
            inverses,
            residue_log,
            exponent: BigInt::one(),
            gmodule: GModule::trivial(FiniteGroup::trivial(), &[])?,
        };
        let r = module.rank();
        let q = field.residue_order();
        let p = field.p();
        let mut relation_cols = vec![];
        for (g, kind) in module.kinds.iter().enumerate() {
            let e = match kind {
                Generator::Teichmuller => q - 1,
                Generator::Principal { .. } => p,
            };
            let power = field.pow(&module.generators[g], e);
            let mut col: Vec<BigInt> = module.dlog(&power)?.into_iter().map(|x| -x).collect();
            col[g] += BigInt::from(e);
            relation_cols.push(col);
        }
        let relations = IntMatrix::from_columns(&relation_cols, r);
        let mut actions = vec![];
        for s in 0..galois.order() {
            let cols = module
                .generators
                .iter()
                .map(|g| module.dlog(&galois.apply(s, g)))
                .collect::<Result<Vec<_>>>()?;
            actions.push(IntMatrix::from_columns(&cols, r));
        }
        module.gmodule = GModule::new(galois.group().clone(), relations, actions)?;
        let expected = module.expected_order();
        if module.gmodule.order() != expected {
            return Err(Error::ModuleInconsistent(format!(
                "order {} but expected {expected}",
                module.gmodule.order()
            )));
        }
        module.exponent = module.gmodule.invariant_factors().last().cloned().unwrap_or(BigInt::one());
        Ok(module)
    }

    pub fn galois(&self) -> &'g GaloisGroup {
        self.galois
    }

    pub fn field(&self) -> &'g LocalField {
        self.galois.field()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    pub fn kinds(&self) -> &[Generator] {
        &self.kinds
    }

    pub fn gmodule(&self) -> &GModule {
        &self.gmodule
    }

    pub fn relations(&self) -> &IntMatrix {
        self.gmodule.relations()
    }

    pub fn action_matrix(&self, s: usize) -> &IntMatrix {
        self.gmodule.action(s)
    }

    pub fn order(&self) -> BigInt {
        self.gmodule.order()
    }

    /// `(q-1)^[i=0] q^(N - max(i,1))`.
    pub fn expected_order(&self) -> BigInt {
        let q = BigInt::from(self.field().residue_order());
        let layers = self.precision - self.level.max(1);
        let mut order = num_traits::pow(q.clone(), layers as usize);
        if self.level == 0 {
            order *= q - 1;
        }
        order
    }

    fn index_of(&self, layer: u32, basis: usize) -> usize {
        let f = self.field().residue_degree();
        (self.level == 0) as usize + (layer - self.level.max(1)) as usize * f + basis
    }

    /// Coordinates of a unit of the right level, by digit extraction.
    pub fn dlog(&self, u: &FieldElement) -> Result<Vec<BigInt>> {
        let field = self.field();
        let one = field.one();
        let mut coords = vec![BigInt::zero(); self.rank()];
        let mut u = u.clone();
        if self.level == 0 {
            let r = field.residue(&u);
            let k = *self.residue_log.get(&r).ok_or(Error::WrongLevel { level: 0 })?;
            coords[0] = BigInt::from(k);
            let q = field.residue_order();
            if k > 0 {
                u = field.mul(&u, &field.pow(&self.generators[0], q - 1 - k));
            }
        } else if field.raw_valuation(&field.sub(&u, &one)) < self.level {
            return Err(Error::WrongLevel { level: self.level });
        }
        for j in self.level.max(1)..self.precision {
            let d = field.sub(&u, &one);
            if field.raw_valuation(&d) >= self.precision {
                break;
            }
            let digit = field.digit(&d, j);
            for (k, &a) in digit.coords().iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let g = self.index_of(j, k);
                coords[g] = BigInt::from(a);
                u = field.mul(&u, &field.pow(&self.inverses[g], a));
            }
        }
        Ok(coords)
    }

    pub fn exp(&self, coords: &[BigInt]) -> FieldElement {
        let field = self.field();
        let mut acc = field.one();
        for (g, c) in self.generators.iter().zip(coords) {
            let e = c.mod_floor(&self.exponent);
            if !e.is_zero() {
                acc = field.mul(&acc, &pow_big(field, g, &e));
            }
        }
        acc
    }

    /// Multiplicative cocycle values (one unit per group element) to an
    /// additive cocycle.
    pub fn cocycle_from_units(&self, values: &[FieldElement]) -> Result<Cocycle> {
        let coords = values.iter().map(|u| self.dlog(u)).collect::<Result<Vec<_>>>()?;
        Cocycle::new(&self.gmodule, coords)
    }

    /// `f_pi(sigma) = sigma(pi)/pi` in `U/U^N`.
    pub fn fundamental_cocycle(&self, pi: &FieldElement) -> Result<Cocycle> {
        if self.level != 0 {
            return Err(Error::LevelMismatch { expected: 0, found: self.level });
        }
        self.cocycle_from_units(&self.galois.fundamental_cocycle_values(pi)?)
    }

    /// Inclusion into a module of lower or equal level followed by reduction
    /// to a lower or equal precision.
    pub fn inclusion_into(&self, target: &UnitQuotientModule<'_>) -> Result<ModuleMap> {
        if target.level > self.level || target.precision > self.precision {
            return Err(Error::LevelMismatch { expected: self.level, found: target.level });
        }
        let cols = self
            .generators
            .iter()
            .map(|g| target.dlog(g))
            .collect::<Result<Vec<_>>>()?;
        let map = ModuleMap::new(IntMatrix::from_columns(&cols, target.rank()));
        map.check(&self.gmodule, &target.gmodule)?;
        Ok(map)
    }

    /// The map onto the bottom layer `U^i/U^(i+1)`: the residue map to
    /// `lambda^x` when `i = 0`, and `1 + a pi^i -> a mod pi` into the
    /// `theta^i`-twisted `lambda^+` when `i >= 1`.
    pub fn projection_to_layer(&self, layer: u32) -> Result<(ResidueGModule, ModuleMap)> {
        if layer != self.level {
            return Err(Error::LayerMismatch { level: self.level, layer });
        }
        let target = if layer == 0 {
            ResidueGModule::multiplicative(self.galois)?
        } else {
            ResidueGModule::additive(self.galois, layer)?
        };
        let f = self.field().residue_degree();
        let rows = if layer == 0 { 1 } else { f };
        let mut m = IntMatrix::zeros(rows, self.rank());
        for (g, kind) in self.kinds.iter().enumerate() {
            match *kind {
                Generator::Teichmuller => m.set(0, g, BigInt::one()),
                Generator::Principal { layer: j, basis } if j == layer => m.set(basis, g, BigInt::one()),
                _ => {}
            }
        }
        let map = ModuleMap::new(m);
        map.check(&self.gmodule, target.gmodule())?;
        Ok((target, map))
    }
}

/// `H^1(G, U^i/U^N)` together with the image in it of
/// `H^1(G, U^i/U^(N+lift))`.
///
/// For wild extensions the truncated group carries classes coming from
/// `H^2(G, U^N)` that do not lift; the image of a deeper truncation removes
/// them and, once stable in `lift`, is the image of `H^1(G, U^i)`.
#[derive(Debug, Clone)]
pub struct UnitCohomology<'g> {
    pub module: UnitQuotientModule<'g>,
    pub truncated: CohomologyGroup,
    /// Generators of the lifted classes inside `truncated`.
    pub lifted: Vec<CohomologyClass>,
}

impl<'g> UnitCohomology<'g> {
    pub fn compute(galois: &'g GaloisGroup, level: u32, precision: u32, lift: u32) -> Result<Self> {
        let module = UnitQuotientModule::new(galois, level, precision)?;
        let truncated = CohomologyGroup::compute(module.gmodule())?;
        let deep = UnitQuotientModule::new(galois, level, precision + lift)?;
        let deep_h1 = CohomologyGroup::compute(deep.gmodule())?;
        let induced = InducedMap::new(&deep.inclusion_into(&module)?, &deep_h1, &truncated)?;
        let lifted = induced.image(&truncated);
        Ok(UnitCohomology { module, truncated, lifted })
    }

    pub fn lifted_invariant_factors(&self) -> Vec<BigInt> {
        self.truncated.span_invariant_factors(&self.lifted)
    }

    pub fn lifted_order(&self) -> BigInt {
        self.truncated.span_order(&self.lifted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueKind {
    /// `lambda^x`, cyclic of order `q - 1`, coordinates are logs to the
    /// primitive element.
    Multiplicative,
    /// `lambda^+` with `sigma` acting as `a -> chi(sigma)^twist sigma(a)`,
    /// coordinates in the power basis.
    Additive { twist: u32 },
}

#[derive(Debug, Clone)]
pub struct ResidueGModule {
    kind: ResidueKind,
    lam: ResidueField,
    group: FiniteGroup,
    /// `sigma` acts on `lambda` as `Frob^exponents[sigma]`.
    exponents: Vec<usize>,
    /// `chi(sigma)`, the residue of `sigma(pi)/pi`.
    characters: Vec<ResidueElement>,
    primitive: ResidueElement,
    log: HashMap<ResidueElement, u64>,
    gmodule: GModule,
}

impl ResidueGModule {
    /// `lambda^x` over `G`.
    pub fn multiplicative(g: &GaloisGroup) -> Result<Self> {
        let (exps, chars) = Self::galois_data(g)?;
        Self::from_parts(g.field().residue_field().clone(), g.group().clone(), exps, chars, ResidueKind::Multiplicative)
    }

    /// `lambda^+` over `G`, twisted by `chi^twist` (the layer `U^twist/U^(twist+1)`).
    pub fn additive(g: &GaloisGroup, twist: u32) -> Result<Self> {
        let (exps, chars) = Self::galois_data(g)?;
        Self::from_parts(
            g.field().residue_field().clone(),
            g.group().clone(),
            exps,
            chars,
            ResidueKind::Additive { twist },
        )
    }

    /// The untwisted module over `Gal(lambda/kappa) = G/G_0`.
    pub fn over_residue_galois(g: &GaloisGroup, inertia: &[usize], kind: ResidueKind) -> Result<Self> {
        let quotient = g.quotient(inertia)?;
        let exps = quotient.representatives.iter().map(|&s| g.residue_exponent(s)).collect();
        let lam = g.field().residue_field().clone();
        let chars = vec![lam.one(); quotient.group.order()];
        let kind = match kind {
            ResidueKind::Multiplicative => kind,
            ResidueKind::Additive { .. } => ResidueKind::Additive { twist: 0 },
        };
        Self::from_parts(lam, quotient.group, exps, chars, kind)
    }

    fn galois_data(g: &GaloisGroup) -> Result<(Vec<usize>, Vec<ResidueElement>)> {
        let exps = (0..g.order()).map(|s| g.residue_exponent(s)).collect();
        Ok((exps, RamificationFiltration::twist_character(g)?))
    }

    pub fn from_parts(
        lam: ResidueField,
        group: FiniteGroup,
        exponents: Vec<usize>,
        characters: Vec<ResidueElement>,
        kind: ResidueKind,
    ) -> Result<Self> {
        let primitive = lam.primitive_element();
        let mut log = HashMap::new();
        let mut x = lam.one();
        for k in 0..lam.order() - 1 {
            log.insert(x.clone(), k);
            x = lam.mul(&x, &primitive);
        }
        let mut m = ResidueGModule {
            kind,
            lam,
            group,
            exponents,
            characters,
            primitive,
            log,
            gmodule: GModule::trivial(FiniteGroup::trivial(), &[])?,
        };
        let q = m.lam.order();
        let p = m.lam.p();
        let f = m.lam.degree();
        let (relations, actions) = match kind {
            ResidueKind::Multiplicative => {
                let rel = IntMatrix::from_rows(&[vec![BigInt::from(q - 1)]]);
                let acts = m
                    .exponents
                    .iter()
                    .map(|&e| {
                        let a = p.pow(e as u32) % (q - 1).max(1);
                        IntMatrix::from_rows(&[vec![BigInt::from(a)]])
                    })
                    .collect();
                (rel, acts)
            }
            ResidueKind::Additive { .. } => {
                let rel = IntMatrix::diagonal(&vec![BigInt::from(p); f]);
                let acts = (0..m.group.order())
                    .map(|s| {
                        let cols: Vec<Vec<BigInt>> = (0..f)
                            .map(|k| {
                                let mut e = m.lam.zero();
                                e.0[k] = 1;
                                m.coords(&m.act_element(s, &e))
                            })
                            .collect();
                        IntMatrix::from_columns(&cols, f)
                    })
                    .collect();
                (rel, acts)
            }
        };
        m.gmodule = GModule::new(m.group.clone(), relations, actions)?;
        Ok(m)
    }

    pub fn kind(&self) -> ResidueKind {
        self.kind
    }

    pub fn gmodule(&self) -> &GModule {
        &self.gmodule
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.lam
    }

    pub fn act_element(&self, s: usize, a: &ResidueElement) -> ResidueElement {
        let lam = &self.lam;
        let frob = (0..self.exponents[s]).fold(a.clone(), |x, _| lam.frobenius(&x));
        match self.kind {
            ResidueKind::Multiplicative => frob,
            ResidueKind::Additive { twist } => {
                lam.mul(&lam.pow(&self.characters[s], twist as u64), &frob)
            }
        }
    }

    pub fn coords(&self, a: &ResidueElement) -> Vec<BigInt> {
        match self.kind {
            ResidueKind::Multiplicative => vec![BigInt::from(self.log[a])],
            ResidueKind::Additive { .. } => a.coords().iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn element(&self, coords: &[BigInt]) -> ResidueElement {
        match self.kind {
            ResidueKind::Multiplicative => {
                let q1 = BigInt::from(self.lam.order() - 1);
                let k = coords[0].mod_floor(&q1).to_u64().unwrap();
                self.lam.pow(&self.primitive, k)
            }
            ResidueKind::Additive { .. } => {
                let p = BigInt::from(self.lam.p());
                ResidueElement(coords.iter().map(|c| c.mod_floor(&p).to_u64().unwrap()).collect())
            }
        }
    }
}

impl EnumerableModule for ResidueGModule {
    type Elem = ResidueElement;

    fn group(&self) -> &FiniteGroup {
        &self.group
    }

    fn elements(&self) -> Vec<ResidueElement> {
        match self.kind {
            ResidueKind::Multiplicative => self.lam.elements().skip(1).collect(),
            ResidueKind::Additive { .. } => self.lam.elements().collect(),
        }
    }

    fn zero(&self) -> ResidueElement {
        match self.kind {
            ResidueKind::Multiplicative => self.lam.one(),
            ResidueKind::Additive { .. } => self.lam.zero(),
        }
    }

    fn op(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        match self.kind {
            ResidueKind::Multiplicative => self.lam.mul(a, b),
            ResidueKind::Additive { .. } => self.lam.add(a, b),
        }
    }

    fn neg(&self, a: &ResidueElement) -> ResidueElement {
        match self.kind {
            ResidueKind::Multiplicative => self.lam.inv(a).expect("nonzero"),
            ResidueKind::Additive { .. } => self.lam.neg(a),
        }
    }

    fn act(&self, s: usize, a: &ResidueElement) -> ResidueElement {
        self.act_element(s, a)
    }
}

/// `U^i/U^N` with arithmetic done in the field and elements keyed by their
/// canonical reduction mod `pi^N`.
pub struct UnitArithmetic<'g> {
    galois: &'g GaloisGroup,
    level: u32,
    precision: u32,
}

impl<'g> UnitArithmetic<'g> {
    pub fn new(galois: &'g GaloisGroup, level: u32, precision: u32) -> Self {
        UnitArithmetic { galois, level, precision }
    }

    pub fn reduce(&self, x: &FieldElement) -> FieldElement {
        self.galois.field().reduce_at(x, self.precision)
    }
}

impl EnumerableModule for UnitArithmetic<'_> {
    type Elem = FieldElement;

    fn group(&self) -> &FiniteGroup {
        self.galois.group()
    }

    fn elements(&self) -> Vec<FieldElement> {
        let field = self.galois.field();
        let lam = field.residue_field();
        let reps: Vec<FieldElement> = lam.elements().map(|c| field.lift_residue(&c)).collect();
        let pi = field.uniformizer();
        let mut out = if self.level == 0 {
            reps[1..].to_vec()
        } else {
            vec![field.one()]
        };
        let mut pij = field.pow(&pi, self.level.max(1) as u64);
        for _ in self.level.max(1)..self.precision {
            out = out
                .iter()
                .flat_map(|x| reps.iter().map(|r| field.add(x, &field.mul(r, &pij))).collect::<Vec<_>>())
                .collect();
            pij = field.mul(&pij, &pi);
        }
        out.iter().map(|x| self.reduce(x)).collect()
    }

    fn zero(&self) -> FieldElement {
        self.galois.field().one()
    }

    fn op(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.reduce(&self.galois.field().mul(a, b))
    }

    fn neg(&self, a: &FieldElement) -> FieldElement {
        self.reduce(&self.galois.field().invert_unit(a).expect("unit"))
    }

    fn act(&self, s: usize, a: &FieldElement) -> FieldElement {
        self.reduce(&self.galois.apply(s, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{brute_force_h1, CohomologyGroup, DEFAULT_BRUTE_FORCE_BUDGET};
    use crate::field::TowerSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn galois(spec: TowerSpec, n: u32) -> GaloisGroup {
        GaloisGroup::compute(&LocalField::build(&spec, n).unwrap()).unwrap()
    }

    fn q2_i(n: u32) -> GaloisGroup {
        galois(TowerSpec::new(2, None, vec![vec![2, 2, 1]]), n)
    }

    #[test]
    fn orders_from_examples() {
        let g = q2_i(8);
        let m = UnitQuotientModule::new(&g, 1, 4).unwrap();
        assert_eq!(m.rank(), 3);
        assert_eq!(m.order(), BigInt::from(8));
        let pi = g.field().uniformizer();
        let one = g.field().one();
        for (j, gen) in m.generators().iter().enumerate() {
            let expect = g.field().add(&one, &g.field().pow(&pi, j as u64 + 1));
            assert_eq!(gen, &expect);
        }
        let u = galois(TowerSpec::new(2, Some(vec![1, 1, 1]), vec![]), 6);
        let m = UnitQuotientModule::new(&u, 0, 3).unwrap();
        assert_eq!(m.order(), BigInt::from(48));
        // top layer: elementary abelian of order q
        let m = UnitQuotientModule::new(&u, 2, 3).unwrap();
        assert_eq!(m.gmodule().invariant_factors(), vec![BigInt::from(2), BigInt::from(2)]);
        assert!(matches!(UnitQuotientModule::new(&u, 3, 3), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn dlog_examples() {
        let g = galois(TowerSpec::new(2, None, vec![vec![-2, 0, 1]]), 8);
        let k = g.field();
        let m = UnitQuotientModule::new(&g, 0, 5).unwrap();
        assert!(m.dlog(&k.one()).unwrap().iter().all(|x| x.is_zero()));
        for (i, gen) in m.generators().iter().enumerate() {
            let unit: Vec<BigInt> = (0..m.rank()).map(|j| BigInt::from((i == j) as i64)).collect();
            assert!(m.gmodule().eq(&m.dlog(gen).unwrap(), &unit));
        }
        let minus_one = k.from_int(-1);
        let d = m.dlog(&minus_one).unwrap();
        assert!(k.eq_at(&m.exp(&d), &minus_one, 5));
        let m1 = UnitQuotientModule::new(&g, 1, 5).unwrap();
        assert_eq!(m1.dlog(&k.uniformizer()), Err(Error::WrongLevel { level: 1 }));
        assert_eq!(
            UnitQuotientModule::new(&g, 2, 5).unwrap().dlog(&k.add(&k.one(), &k.uniformizer())),
            Err(Error::WrongLevel { level: 2 })
        );
        assert!(m.fundamental_cocycle(&k.uniformizer()).is_ok());
        assert_eq!(
            m1.fundamental_cocycle(&k.uniformizer()).unwrap_err(),
            Error::LevelMismatch { expected: 0, found: 1 }
        );
    }

    #[test]
    fn round_trip_and_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for spec in [
            TowerSpec::new(3, None, vec![vec![3, 3, 1]]),
            TowerSpec::new(2, Some(vec![1, 1, 1]), vec![vec![2, 2, 1]]),
        ] {
            let g = galois(spec, 8);
            let k = g.field();
            for level in [0, 1, 2] {
                let m = UnitQuotientModule::new(&g, level, 7).unwrap();
                let pil = k.pow(&k.uniformizer(), level as u64);
                for _ in 0..100 {
                    let u = if level == 0 {
                        k.random_unit(&mut rng)
                    } else {
                        k.add(&k.one(), &k.mul(&pil, &k.random_element(&mut rng)))
                    };
                    let v = if level == 0 {
                        k.random_unit(&mut rng)
                    } else {
                        k.add(&k.one(), &k.mul(&pil, &k.random_element(&mut rng)))
                    };
                    let du = m.dlog(&u).unwrap();
                    assert!(k.eq_at(&m.exp(&du), &u, 7));
                    let dv = m.dlog(&v).unwrap();
                    let duv = m.dlog(&k.mul(&u, &v)).unwrap();
                    let sum: Vec<BigInt> = du.iter().zip(&dv).map(|(a, b)| a + b).collect();
                    assert!(m.gmodule().eq(&sum, &duv));
                    for s in 0..g.order() {
                        let lhs = m.action_matrix(s).mul_vec(&du);
                        assert!(m.gmodule().eq(&lhs, &m.dlog(&g.apply(s, &u)).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn layer_sizes_and_inclusions() {
        let g = galois(TowerSpec::new(2, Some(vec![1, 1, 1]), vec![vec![2, 2, 1]]), 8);
        let q = BigInt::from(4);
        let mods: Vec<_> = (0..6).map(|i| UnitQuotientModule::new(&g, i, 6).unwrap()).collect();
        assert_eq!(mods[0].order() / mods[1].order(), BigInt::from(3));
        for i in 1..5 {
            assert_eq!(mods[i].order() / mods[i + 1].order(), q);
            let inc = mods[i + 1].inclusion_into(&mods[i]).unwrap();
            // injective: the image has the full order of the smaller module
            let cols: Vec<Vec<BigInt>> = (0..inc.matrix.cols()).map(|j| inc.matrix.col(j)).collect();
            let quotient = crate::abelian::FgAbelian::new(mods[i].rank(), mods[i].relations().clone())
                .quotient(&cols);
            assert_eq!(quotient.order().unwrap(), q);
        }
    }

    #[test]
    fn layer_projections_are_equivariant() {
        for spec in [
            TowerSpec::new(3, None, vec![vec![3, 3, 1]]),
            TowerSpec::new(2, Some(vec![1, 1, 1]), vec![vec![2, 2, 1]]),
            TowerSpec::new(2, None, vec![vec![-2, 0, 1]]),
        ] {
            let g = galois(spec, 8);
            for level in 0..4 {
                let m = UnitQuotientModule::new(&g, level, 6).unwrap();
                let (_, map) = m.projection_to_layer(level).unwrap();
                assert_eq!(map.matrix.rows(), if level == 0 { 1 } else { g.field().residue_degree() });
                assert!(matches!(m.projection_to_layer(level + 1), Err(Error::LayerMismatch { .. })));
            }
        }
    }

    #[test]
    fn untwisted_layer_fails_for_tame_extension() {
        // In Q_3(zeta_3) the layer U^1/U^2 is F_3 with sigma acting by
        // theta_0(sigma) = -1; the untwisted identification is not equivariant.
        let g = galois(TowerSpec::new(3, None, vec![vec![3, 3, 1]]), 8);
        let m = UnitQuotientModule::new(&g, 1, 6).unwrap();
        let (twisted, map) = m.projection_to_layer(1).unwrap();
        assert_eq!(twisted.gmodule().action(1).get(0, 0), &BigInt::from(2));
        let untwisted = ResidueGModule::additive(&g, 0).unwrap();
        assert_eq!(map.check(m.gmodule(), untwisted.gmodule()), Err(Error::NotEquivariant(1)));
    }

    #[test]
    fn brute_force_agrees_on_small_unit_modules() {
        for (spec, level, n) in [
            (TowerSpec::new(2, None, vec![vec![2, 2, 1]]), 0, 6),
            (TowerSpec::new(3, None, vec![vec![3, 3, 1]]), 1, 4),
            (TowerSpec::new(2, None, vec![vec![-2, 0, 1]]), 2, 7),
        ] {
            let g = galois(spec, n + 2);
            let m = UnitQuotientModule::new(&g, level, n).unwrap();
            let h = CohomologyGroup::compute(m.gmodule()).unwrap();
            let b = brute_force_h1(&UnitArithmetic::new(&g, level, n), DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
            let engine: Vec<u64> = h.invariant_factors().iter().map(|x| x.to_u64().unwrap()).collect();
            assert_eq!(engine, b.invariant_factors);
            for c in &b.cocycles {
                let mut values = vec![g.field().one()];
                values.extend(c.iter().cloned());
                let cls = h.class_of(&m.cocycle_from_units(&values).unwrap()).unwrap();
                let unit_brute = UnitArithmetic::new(&g, level, n);
                assert_eq!(h.order_of(&cls).to_u64().unwrap(), b.class_order(&unit_brute, c));
            }
        }
    }
}

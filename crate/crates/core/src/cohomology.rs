//! Finite G-modules in integer coordinates and their first cohomology.
//!
//! A module is `Z^r / col-span(R)` with integer matrices `A_s` for the
//! action. `H^1` is computed in Smith coordinates of the module: the
//! cocycle equations `c(st) = c(s) + A_s c(t)` cut out a lattice of
//! integer cochains, and `H^1` is that lattice modulo the relation
//! cochains and the coboundaries.

use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::abelian::{
    order_in_factors, smith_normal_form, solve_mod_lattice, FgAbelian, Infeasible, IntMatrix,
    QuotientMap,
};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::residue::factor_small;

fn sub_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[derive(Debug, Clone)]
pub struct GModule {
    group: FiniteGroup,
    relations: IntMatrix,
    actions: Vec<IntMatrix>,
    smith: QuotientMap,
}

impl GModule {
    /// Checks finiteness, that each `A_s` preserves the relations, and
    /// `A_st = A_s A_t` modulo the relations.
    pub fn new(group: FiniteGroup, relations: IntMatrix, actions: Vec<IntMatrix>) -> Result<Self> {
        let r = relations.rows();
        if actions.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} action matrices for a group of order {}",
                actions.len(),
                group.order()
            )));
        }
        if actions.iter().any(|a| a.rows() != r || a.cols() != r) {
            return Err(Error::DimensionMismatch("action matrix has wrong shape".into()));
        }
        let smith = FgAbelian::new(r, relations.clone()).smith();
        if smith.order().is_none() {
            return Err(Error::ModuleInconsistent("module is infinite".into()));
        }
        let m = GModule { group, relations, actions, smith };
        let bad = |msg: String| Err(Error::ModuleInconsistent(msg));
        if !m.matrices_agree(&m.actions[0], &IntMatrix::identity(r)) {
            return bad("identity acts nontrivially".into());
        }
        for (s, a) in m.actions.iter().enumerate() {
            let image = a.mul(&m.relations);
            if (0..image.cols()).any(|j| !m.smith.is_zero(&image.col(j))) {
                return bad(format!("action of {s} does not preserve the relations"));
            }
        }
        for s in 0..m.group.order() {
            for t in 0..m.group.order() {
                let st = m.group.mul(s, t);
                if !m.matrices_agree(&m.actions[st], &m.actions[s].mul(&m.actions[t])) {
                    return bad(format!("action is not multiplicative at ({s}, {t})"));
                }
            }
        }
        Ok(m)
    }

    /// `(+) Z/d_i` with trivial action.
    pub fn trivial(group: FiniteGroup, factors: &[BigInt]) -> Result<Self> {
        let r = factors.len();
        let actions = vec![IntMatrix::identity(r); group.order()];
        Self::new(group, IntMatrix::diagonal(factors), actions)
    }

    fn matrices_agree(&self, a: &IntMatrix, b: &IntMatrix) -> bool {
        (0..a.cols()).all(|j| self.smith.is_zero(&sub_vec(&a.col(j), &b.col(j))))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn action(&self, s: usize) -> &IntMatrix {
        &self.actions[s]
    }

    pub fn smith(&self) -> &QuotientMap {
        &self.smith
    }

    pub fn order(&self) -> BigInt {
        self.smith.order().expect("module is finite")
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.smith.factors.clone()
    }

    pub fn act(&self, s: usize, x: &[BigInt]) -> Vec<BigInt> {
        self.actions[s].mul_vec(x)
    }

    pub fn eq(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        self.smith.is_zero(&sub_vec(x, y))
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    /// The same module viewed over a subgroup.
    pub fn restrict(&self, sub: &Subgroup) -> Result<Self> {
        let actions = sub.embedding.iter().map(|&s| self.actions[s].clone()).collect();
        Self::new(sub.group.clone(), self.relations.clone(), actions)
    }
}

/// A homomorphism of modules given by an integer matrix on coordinates.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub matrix: IntMatrix,
}

impl ModuleMap {
    pub fn new(matrix: IntMatrix) -> Self {
        ModuleMap { matrix }
    }

    pub fn identity(rank: usize) -> Self {
        ModuleMap { matrix: IntMatrix::identity(rank) }
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &ModuleMap) -> ModuleMap {
        ModuleMap { matrix: self.matrix.mul(&first.matrix) }
    }

    /// Well-definedness on the quotient and `phi A_s = A'_s phi`.
    pub fn check(&self, source: &GModule, target: &GModule) -> Result<()> {
        if self.matrix.rows() != target.rank() || self.matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch("module map has wrong shape".into()));
        }
        if source.group().order() != target.group().order() {
            return Err(Error::DimensionMismatch("modules over different groups".into()));
        }
        let rel = self.matrix.mul(source.relations());
        if (0..rel.cols()).any(|j| !target.smith.is_zero(&rel.col(j))) {
            return Err(Error::ModuleInconsistent("map does not respect relations".into()));
        }
        for s in 0..source.group().order() {
            let lhs = self.matrix.mul(source.action(s));
            let rhs = target.action(s).mul(&self.matrix);
            if !target.matrices_agree(&lhs, &rhs) {
                return Err(Error::NotEquivariant(s));
            }
        }
        Ok(())
    }
}

/// A 1-cocycle in additive module coordinates, one value per group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub values: Vec<Vec<BigInt>>,
}

impl Cocycle {
    /// Checks `c(st) = c(s) + s.c(t)` for every pair.
    pub fn new(module: &GModule, values: Vec<Vec<BigInt>>) -> Result<Self> {
        let g = module.group();
        if values.len() != g.order() || values.iter().any(|v| v.len() != module.rank()) {
            return Err(Error::DimensionMismatch("cochain has wrong shape".into()));
        }
        for s in 0..g.order() {
            for t in 0..g.order() {
                let rhs = add_vec(&values[s], &module.act(s, &values[t]));
                if !module.eq(&values[g.mul(s, t)], &rhs) {
                    return Err(Error::NotACocycle(s, t));
                }
            }
        }
        Ok(Cocycle { values })
    }

    pub fn zero(module: &GModule) -> Self {
        Cocycle { values: vec![module.zero(); module.group().order()] }
    }

    /// `s -> s.m - m`.
    pub fn coboundary(module: &GModule, m: &[BigInt]) -> Self {
        let values = (0..module.group().order())
            .map(|s| sub_vec(&module.act(s, m), m))
            .collect();
        Cocycle { values }
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle { values: self.values.iter().zip(&other.values).map(|(a, b)| add_vec(a, b)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Cocycle {
        Cocycle { values: self.values.iter().map(|v| v.iter().map(|x| x * k).collect()).collect() }
    }

    pub fn push_forward(&self, map: &ModuleMap) -> Cocycle {
        Cocycle { values: self.values.iter().map(|v| map.apply(v)).collect() }
    }

    pub fn restrict(&self, sub: &Subgroup) -> Cocycle {
        Cocycle { values: sub.embedding.iter().map(|&s| self.values[s].clone()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyClass {
    pub coords: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    module: GModule,
    /// Invariant factors of the module and the maps to and from Smith coordinates.
    module_factors: Vec<BigInt>,
    to_smith: IntMatrix,
    from_smith: IntMatrix,
    smith_actions: Vec<IntMatrix>,
    /// The cochain lattice `{c : c is a cocycle mod the relations}` is
    /// `lattice_u^-1 diag(lattice_d) Z^n`.
    lattice_u: IntMatrix,
    lattice_d: Vec<BigInt>,
    lattice_basis: IntMatrix,
    h1: QuotientMap,
}

impl CohomologyGroup {
    pub fn compute(module: &GModule) -> Result<Self> {
        let g = module.group();
        let order = g.order();
        let smith = module.smith();
        let d = smith.factors.clone();
        let s = d.len();
        let to_smith = smith.proj.clone();
        let from_smith = smith.lift.clone();
        let smith_actions: Vec<IntMatrix> = (0..order)
            .map(|k| {
                let mut a = to_smith.mul(module.action(k)).mul(&from_smith);
                for i in 0..s {
                    for j in 0..s {
                        let x = a.get(i, j).mod_floor(&d[i]);
                        a.set(i, j, x);
                    }
                }
                a
            })
            .collect();
        let n = (order - 1) * s;
        let col = |sigma: usize, l: usize| (sigma - 1) * s + l;
        // Equations for pairs of nonidentity elements.
        let pairs: Vec<(usize, usize)> = (1..order)
            .flat_map(|a| (1..order).map(move |b| (a, b)))
            .collect();
        let mut eqs = IntMatrix::zeros(pairs.len() * s, n);
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let ab = g.mul(a, b);
            for l in 0..s {
                let row = p * s + l;
                if ab != 0 {
                    let x = eqs.get(row, col(ab, l)) + 1;
                    eqs.set(row, col(ab, l), x);
                }
                let x = eqs.get(row, col(a, l)) - 1;
                eqs.set(row, col(a, l), x);
                for m in 0..s {
                    let x = eqs.get(row, col(b, m)) - smith_actions[a].get(l, m);
                    eqs.set(row, col(b, m), x);
                }
            }
        }
        let rel_diag: Vec<BigInt> = (0..pairs.len()).flat_map(|_| d.iter().cloned()).collect();
        let sol = solve_mod_lattice(&eqs, &vec![BigInt::zero(); eqs.rows()], &IntMatrix::diagonal(&rel_diag))
            .expect("homogeneous system is solvable");
        let mut gens = sol.homogeneous;
        // relation cochains d_l e_(s,l)
        let mut relation_cochains = vec![];
        for sigma in 1..order {
            for l in 0..s {
                let mut v = vec![BigInt::zero(); n];
                v[col(sigma, l)] = d[l].clone();
                relation_cochains.push(v);
            }
        }
        gens.extend(relation_cochains.iter().cloned());
        let gen_matrix = IntMatrix::from_columns(&gens, n);
        let snf = smith_normal_form(&gen_matrix);
        let lattice_d = snf.diagonal()[..n].to_vec();
        if lattice_d.iter().any(|x| x.is_zero()) {
            return Err(Error::ModuleInconsistent("cocycle lattice is not of full rank".into()));
        }
        let lattice_basis = snf.u_inv.mul(&IntMatrix::diagonal(&lattice_d));
        let mut group = CohomologyGroup {
            module: module.clone(),
            module_factors: d,
            to_smith,
            from_smith,
            smith_actions,
            lattice_u: snf.u,
            lattice_d,
            lattice_basis,
            h1: FgAbelian::new(0, IntMatrix::zeros(0, 0)).smith(),
        };
        let mut killed: Vec<Vec<BigInt>> = relation_cochains
            .iter()
            .map(|c| group.lattice_coords(c))
            .collect::<Result<_>>()?;
        for l in 0..s {
            let mut e = vec![BigInt::zero(); s];
            e[l] = BigInt::one();
            let mut c = vec![BigInt::zero(); n];
            for sigma in 1..order {
                let v = sub_vec(&group.smith_actions[sigma].mul_vec(&e), &e);
                c[col(sigma, 0)..col(sigma, 0) + s].clone_from_slice(&v);
            }
            killed.push(group.lattice_coords(&c)?);
        }
        group.h1 = FgAbelian::new(n, IntMatrix::zeros(n, 0)).quotient(&killed);
        Ok(group)
    }

    fn lattice_coords(&self, c: &[BigInt]) -> Result<Vec<BigInt>> {
        let uc = self.lattice_u.mul_vec(c);
        uc.iter()
            .zip(&self.lattice_d)
            .map(|(x, d)| {
                let (q, r) = x.div_mod_floor(d);
                if r.is_zero() {
                    Ok(q)
                } else {
                    Err(Error::ModuleInconsistent("cochain outside the cocycle lattice".into()))
                }
            })
            .collect()
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.h1.factors
    }

    pub fn order(&self) -> BigInt {
        self.h1.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.h1.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.h1.factors.len() <= 1
    }

    pub fn zero(&self) -> CohomologyClass {
        CohomologyClass { coords: vec![BigInt::zero(); self.h1.factors.len()] }
    }

    /// Standard generators, one per invariant factor.
    pub fn generators(&self) -> Vec<CohomologyClass> {
        (0..self.h1.factors.len())
            .map(|i| {
                let mut coords = vec![BigInt::zero(); self.h1.factors.len()];
                coords[i] = BigInt::one();
                CohomologyClass { coords }
            })
            .collect()
    }

    pub fn class_of(&self, c: &Cocycle) -> Result<CohomologyClass> {
        let c = Cocycle::new(&self.module, c.values.clone())?;
        let mut stacked = vec![];
        for v in &c.values[1..] {
            let y = self.to_smith.mul_vec(v);
            stacked.extend(y.into_iter().zip(&self.module_factors).map(|(x, d)| x.mod_floor(d)));
        }
        let x = self.lattice_coords(&stacked)?;
        Ok(CohomologyClass { coords: self.h1.project(&x) })
    }

    pub fn representative(&self, h: &CohomologyClass) -> Cocycle {
        let x = self.h1.lift.mul_vec(&h.coords);
        let c = self.lattice_basis.mul_vec(&x);
        let s = self.module_factors.len();
        let mut values = vec![self.module.zero(); self.module.group().order()];
        if s > 0 {
            for (k, chunk) in c.chunks(s).enumerate() {
                values[k + 1] = self.from_smith.mul_vec(chunk);
            }
        }
        Cocycle { values }
    }

    pub fn order_of(&self, h: &CohomologyClass) -> BigInt {
        order_in_factors(&self.h1.factors, &h.coords).expect("H^1 is finite")
    }

    pub fn add(&self, a: &CohomologyClass, b: &CohomologyClass) -> CohomologyClass {
        self.reduce(&add_vec(&a.coords, &b.coords))
    }

    pub fn scale(&self, a: &CohomologyClass, k: &BigInt) -> CohomologyClass {
        self.reduce(&a.coords.iter().map(|x| x * k).collect::<Vec<_>>())
    }

    fn reduce(&self, coords: &[BigInt]) -> CohomologyClass {
        CohomologyClass {
            coords: coords.iter().zip(&self.h1.factors).map(|(x, d)| x.mod_floor(d)).collect(),
        }
    }

    fn ambient(&self) -> FgAbelian {
        FgAbelian::from_factors(&self.h1.factors)
    }

    /// Order of the subgroup generated by `gens`.
    pub fn span_order(&self, gens: &[CohomologyClass]) -> BigInt {
        let coords: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.clone()).collect();
        let rest = self.ambient().quotient(&coords).order().expect("finite");
        self.order() / rest
    }

    pub fn span_contains(&self, gens: &[CohomologyClass], x: &CohomologyClass) -> bool {
        let coords: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.clone()).collect();
        self.ambient().contains(&coords, &x.coords)
    }

    /// Equality of generated subgroups by membership both ways.
    pub fn span_equal(&self, a: &[CohomologyClass], b: &[CohomologyClass]) -> bool {
        a.iter().all(|x| self.span_contains(b, x)) && b.iter().all(|x| self.span_contains(a, x))
    }

    /// Invariant factors of the subgroup generated by `gens`.
    pub fn span_invariant_factors(&self, gens: &[CohomologyClass]) -> Vec<BigInt> {
        let k = gens.len();
        let m = self.h1.factors.len();
        if m == 0 {
            return vec![];
        }
        let cols: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.clone()).collect();
        let a = IntMatrix::from_columns(&cols, m);
        let kernel = solve_mod_lattice(&a, &vec![BigInt::zero(); m], &IntMatrix::diagonal(&self.h1.factors))
            .expect("homogeneous system is solvable")
            .homogeneous;
        FgAbelian::new(k, IntMatrix::from_columns(&kernel, k)).invariant_factors()
    }

    /// Restriction to a subgroup of `G`.
    pub fn restriction(
        &self,
        indices: &[usize],
        h: &CohomologyClass,
    ) -> Result<(CohomologyGroup, CohomologyClass)> {
        let sub = Subgroup::new(self.module.group(), indices)?;
        let module = self.module.restrict(&sub)?;
        let target = CohomologyGroup::compute(&module)?;
        let class = target.class_of(&self.representative(h).restrict(&sub))?;
        Ok((target, class))
    }
}

/// The map `H^1(G, M) -> H^1(G, M')` induced by an equivariant map.
#[derive(Debug, Clone)]
pub struct InducedMap {
    /// Column `k` is the image of the `k`-th generator of the source.
    pub matrix: IntMatrix,
    source_order: BigInt,
}

impl InducedMap {
    pub fn new(map: &ModuleMap, source: &CohomologyGroup, target: &CohomologyGroup) -> Result<Self> {
        map.check(source.module(), target.module())?;
        let columns: Vec<Vec<BigInt>> = source
            .generators()
            .iter()
            .map(|h| Ok(target.class_of(&source.representative(h).push_forward(map))?.coords))
            .collect::<Result<_>>()?;
        Ok(InducedMap {
            matrix: IntMatrix::from_columns(&columns, target.invariant_factors().len()),
            source_order: source.order(),
        })
    }

    pub fn apply(&self, target: &CohomologyGroup, h: &CohomologyClass) -> CohomologyClass {
        target.reduce(&self.matrix.mul_vec(&h.coords))
    }

    pub fn image(&self, target: &CohomologyGroup) -> Vec<CohomologyClass> {
        (0..self.matrix.cols())
            .map(|j| target.reduce(&self.matrix.col(j)))
            .collect()
    }

    pub fn image_order(&self, target: &CohomologyGroup) -> BigInt {
        target.span_order(&self.image(target))
    }

    pub fn is_injective(&self, target: &CohomologyGroup) -> bool {
        self.image_order(target) == self.source_order
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoboundaryCheck {
    /// `c(s) = s.m - m` for the witness `m`.
    Coboundary(Vec<BigInt>),
    NotCoboundary(Infeasible),
}

impl CoboundaryCheck {
    pub fn is_coboundary(&self) -> bool {
        matches!(self, CoboundaryCheck::Coboundary(_))
    }
}

pub fn is_coboundary(module: &GModule, c: &Cocycle) -> Result<CoboundaryCheck> {
    let c = Cocycle::new(module, c.values.clone())?;
    let r = module.rank();
    let order = module.group().order();
    let mut stacked = IntMatrix::zeros(order * r, r);
    let mut rhs = vec![];
    for s in 0..order {
        let a = module.action(s);
        for i in 0..r {
            for j in 0..r {
                let x = a.get(i, j) - BigInt::from((i == j) as i64);
                stacked.set(s * r + i, j, x);
            }
        }
        rhs.extend(c.values[s].iter().cloned());
    }
    let rel = module.relations();
    let mut rel_big = IntMatrix::zeros(order * r, order * rel.cols());
    for s in 0..order {
        for i in 0..r {
            for j in 0..rel.cols() {
                rel_big.set(s * r + i, s * rel.cols() + j, rel.get(i, j).clone());
            }
        }
    }
    Ok(match solve_mod_lattice(&stacked, &rhs, &rel_big) {
        Ok(sol) => CoboundaryCheck::Coboundary(sol.particular),
        Err(cert) => CoboundaryCheck::NotCoboundary(cert),
    })
}

// ----- brute-force oracle -----

/// A finite G-module given by explicit element arithmetic, for enumeration.
pub trait EnumerableModule {
    type Elem: Clone + Eq + Hash;
    fn group(&self) -> &FiniteGroup;
    fn elements(&self) -> Vec<Self::Elem>;
    fn zero(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn act(&self, s: usize, a: &Self::Elem) -> Self::Elem;
}

pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 10_000_000;

/// `H^1` by enumerating cochains. Cochains are stored on nonidentity elements.
#[derive(Debug, Clone)]
pub struct BruteH1<E> {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    pub cocycles: Vec<Vec<E>>,
    coboundaries: HashSet<Vec<E>>,
}

fn multiple<M: EnumerableModule>(m: &M, c: &[M::Elem], k: u64) -> Vec<M::Elem> {
    c.iter()
        .map(|x| (0..k).fold(m.zero(), |acc, _| m.op(&acc, x)))
        .collect()
}

impl<E: Clone + Eq + Hash> BruteH1<E> {
    /// Order of the class of a cocycle (values on nonidentity elements).
    pub fn class_order<M: EnumerableModule<Elem = E>>(&self, m: &M, c: &[E]) -> u64 {
        (1..=self.order)
            .find(|&k| self.coboundaries.contains(&multiple(m, c, k)))
            .expect("class order divides |H^1|")
    }

    pub fn is_coboundary(&self, c: &[E]) -> bool {
        self.coboundaries.contains(c)
    }
}

pub fn brute_force_h1<M: EnumerableModule>(m: &M, budget: u128) -> Result<BruteH1<M::Elem>> {
    let g = m.group();
    let n = g.order();
    let elements = m.elements();
    let needed = (elements.len() as u128).saturating_pow(n.saturating_sub(1) as u32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let zero = m.zero();
    let mut coboundaries = HashSet::new();
    for x in &elements {
        let c: Vec<M::Elem> = (1..n).map(|s| m.op(&m.act(s, x), &m.neg(x))).collect();
        coboundaries.insert(c);
    }
    // Backtracking over c(1), c(2), ...: check each identity once all three
    // of c(s), c(t), c(st) are assigned.
    let mut cocycles = vec![];
    let mut current: Vec<M::Elem> = vec![zero.clone(); n];
    fn consistent<M: EnumerableModule>(m: &M, g: &FiniteGroup, c: &[M::Elem], k: usize) -> bool {
        for s in 0..=k {
            for t in 0..=k {
                let st = g.mul(s, t);
                if st <= k && (s == k || t == k || st == k) {
                    let rhs = m.op(&c[s], &m.act(s, &c[t]));
                    if c[st] != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn recurse<M: EnumerableModule>(
        m: &M,
        g: &FiniteGroup,
        elements: &[M::Elem],
        k: usize,
        current: &mut Vec<M::Elem>,
        out: &mut Vec<Vec<M::Elem>>,
    ) {
        if k == g.order() {
            out.push(current[1..].to_vec());
            return;
        }
        for x in elements {
            current[k] = x.clone();
            if consistent(m, g, current, k) {
                recurse(m, g, elements, k + 1, current, out);
            }
        }
    }
    if n == 1 {
        cocycles.push(vec![]);
    } else {
        recurse(m, g, &elements, 1, &mut current, &mut cocycles);
    }
    let order = (cocycles.len() / coboundaries.len()) as u64;
    let mut brute = BruteH1 { invariant_factors: vec![], order, cocycles, coboundaries };
    brute.invariant_factors = invariant_factors_from_counts(m, &brute);
    Ok(brute)
}

/// Reads the invariant factors off the sizes of the `p^j`-torsion subgroups.
fn invariant_factors_from_counts<M: EnumerableModule>(m: &M, h: &BruteH1<M::Elem>) -> Vec<u64> {
    let b = h.coboundaries.len() as u64;
    // prime -> exponents of the cyclic p-parts, descending
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (p, _) in factor_small(h.order) {
        let mut ranks = vec![];
        let mut prev = 1u64;
        let mut pj = 1u64;
        loop {
            pj *= p;
            let killed = h
                .cocycles
                .iter()
                .filter(|c| h.coboundaries.contains(&multiple(m, c, pj)))
                .count() as u64
                / b;
            if killed == prev {
                break;
            }
            ranks.push((killed / prev).ilog(p));
            prev = killed;
        }
        // ranks[j-1] = number of p-parts of order >= p^j
        let mut exps = vec![];
        for (j, &r) in ranks.iter().enumerate() {
            let next = ranks.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(r - next) {
                exps.push(j as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        parts.insert(p, exps);
    }
    let count = parts.values().map(|v| v.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..count)
        .map(|i| parts.iter().map(|(&p, e)| e.get(i).map_or(1, |&k| p.pow(k))).product())
        .collect();
    factors.reverse();
    factors
}

/// `(+) Z/m_i` with the action given by integer matrices, arithmetic done
/// coordinate-wise.
#[derive(Debug, Clone)]
pub struct DiagonalModule {
    pub group: FiniteGroup,
    pub moduli: Vec<u64>,
    /// `actions[s][i][j]`
    pub actions: Vec<Vec<Vec<i64>>>,
}

impl DiagonalModule {
    pub fn to_gmodule(&self) -> Result<GModule> {
        let rel = IntMatrix::diagonal(&self.moduli.iter().map(|&m| BigInt::from(m)).collect::<Vec<_>>());
        let actions = self.actions.iter().map(|a| IntMatrix::from_rows(a)).collect();
        GModule::new(self.group.clone(), rel, actions)
    }

    pub fn coords(&self, x: &[u64]) -> Vec<BigInt> {
        x.iter().map(|&v| BigInt::from(v)).collect()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }
}

impl EnumerableModule for DiagonalModule {
    type Elem = Vec<u64>;

    fn group(&self) -> &FiniteGroup {
        &self.group
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..m).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.moduli.len()]
    }

    fn op(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x + y) % m).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect()
    }

    fn act(&self, s: usize, a: &Vec<u64>) -> Vec<u64> {
        self.actions[s]
            .iter()
            .zip(&self.moduli)
            .map(|(row, &m)| {
                let v: i64 = row.iter().zip(a).map(|(&r, &x)| r * x as i64).sum();
                v.rem_euclid(m as i64) as u64
            })
            .collect()
    }
}

/// A random finite module `(+) Z/m_i` of order at most `max_order` over a
/// random group of order at most 4, with a random action. Candidate actions
/// that are not well defined or not multiplicative are rejected; after
/// `attempts` rejections the action is trivial.
pub fn random_diagonal_module<R: rand::Rng>(rng: &mut R, max_order: u64, attempts: usize) -> DiagonalModule {
    let group = match rng.gen_range(0..5) {
        0 => FiniteGroup::trivial(),
        1 => FiniteGroup::cyclic(2),
        2 => FiniteGroup::cyclic(3),
        3 => FiniteGroup::cyclic(4),
        _ => FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
    };
    let mut moduli = vec![];
    let mut order = 1;
    for _ in 0..rng.gen_range(1..=3) {
        let m = rng.gen_range(2..=8u64);
        if order * m <= max_order {
            moduli.push(m);
            order *= m;
        }
    }
    if moduli.is_empty() {
        moduli.push(2);
    }
    let r = moduli.len();
    let identity: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..r)
            .map(|i| (0..r).map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum::<i64>().rem_euclid(moduli[i] as i64)).collect())
            .collect()
    };
    // entry (i, j) must be a multiple of m_i / gcd(m_i, m_j) to be well defined
    let candidate = |rng: &mut R| -> Vec<Vec<i64>> {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let step = moduli[i] / moduli[i].gcd(&moduli[j]);
                        (rng.gen_range(0..moduli[i] / step) * step) as i64
                    })
                    .collect()
            })
            .collect()
    };
    let n = group.order();
    let trivial = vec![identity.clone(); n];
    let mut actions = trivial.clone();
    for _ in 0..attempts {
        let a = candidate(rng);
        let proposal = if n == 4 && group.element_order(1) == 2 {
            let b = candidate(rng);
            vec![identity.clone(), b.clone(), a.clone(), mul(&a, &b)]
        } else {
            let mut powers = vec![identity.clone()];
            for k in 1..n {
                powers.push(mul(&powers[k - 1], &a));
            }
            powers
        };
        let module = DiagonalModule { group: group.clone(), moduli: moduli.clone(), actions: proposal.clone() };
        if proposal != trivial && module.to_gmodule().is_ok() {
            actions = proposal;
            break;
        }
    }
    DiagonalModule { group, moduli, actions }
}

/// Converts small cohomology invariants for reporting.
pub fn factors_u64(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().expect("small invariant factor")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::bigints;

    fn negation_on(modulus: u64) -> DiagonalModule {
        DiagonalModule {
            group: FiniteGroup::cyclic(2),
            moduli: vec![modulus],
            actions: vec![vec![vec![1]], vec![vec![-1]]],
        }
    }

    fn trivial_on(group: FiniteGroup, moduli: &[u64]) -> DiagonalModule {
        let r = moduli.len();
        let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
        DiagonalModule { actions: vec![id; group.order()], group, moduli: moduli.to_vec() }
    }

    #[test]
    fn cyclic_trivial_action() {
        for (n, k) in [(2, 2), (2, 4), (3, 6), (4, 6), (4, 2), (3, 4)] {
            let m = trivial_on(FiniteGroup::cyclic(n), &[k]);
            let h = CohomologyGroup::compute(&m.to_gmodule().unwrap()).unwrap();
            let g = num_integer::gcd(n as u64, k);
            let expect: Vec<u64> = if g > 1 { vec![g] } else { vec![] };
            assert_eq!(factors_u64(h.invariant_factors()), expect, "n={n} k={k}");
            assert_eq!(brute_force_h1(&m, DEFAULT_BRUTE_FORCE_BUDGET).unwrap().invariant_factors, expect);
        }
    }

    #[test]
    fn brute_force_examples() {
        let m = trivial_on(FiniteGroup::cyclic(2), &[2]);
        let b = brute_force_h1(&m, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        assert_eq!((b.cocycles.len(), b.invariant_factors.clone()), (2, vec![2]));
        let b = brute_force_h1(&negation_on(4), DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        assert_eq!(b.invariant_factors, vec![2]);
        let m = trivial_on(FiniteGroup::trivial(), &[5]);
        assert!(brute_force_h1(&m, DEFAULT_BRUTE_FORCE_BUDGET).unwrap().invariant_factors.is_empty());
        let m = trivial_on(FiniteGroup::cyclic(3), &[1000]);
        assert!(matches!(brute_force_h1(&m, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn negation_on_z4() {
        let m = negation_on(4).to_gmodule().unwrap();
        let h = CohomologyGroup::compute(&m).unwrap();
        assert_eq!(factors_u64(h.invariant_factors()), vec![2]);
        // c(s) = 1 is a cocycle: c(s^2) = c(s) - c(s) = 0
        let c = Cocycle::new(&m, vec![bigints(&[0]), bigints(&[1])]).unwrap();
        let cls = h.class_of(&c).unwrap();
        assert_eq!(h.order_of(&cls), BigInt::from(2));
        assert!(!is_coboundary(&m, &c).unwrap().is_coboundary());
        // c(s) = 2 = s(-1) - (-1)
        let c2 = Cocycle::new(&m, vec![bigints(&[0]), bigints(&[2])]).unwrap();
        match is_coboundary(&m, &c2).unwrap() {
            CoboundaryCheck::Coboundary(w) => {
                assert_eq!(Cocycle::coboundary(&m, &w).values[1][0].mod_floor(&BigInt::from(4)), BigInt::from(2))
            }
            other => panic!("expected a coboundary, got {other:?}"),
        }
        assert_eq!(h.class_of(&c2).unwrap(), h.zero());
        assert_eq!(
            Cocycle::new(&m, vec![bigints(&[1]), bigints(&[1])]).unwrap_err(),
            Error::NotACocycle(0, 0)
        );
    }

    #[test]
    fn zero_cocycle_and_representatives() {
        let m = trivial_on(
            FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
            &[2, 4],
        )
        .to_gmodule()
        .unwrap();
        let h = CohomologyGroup::compute(&m).unwrap();
        // Hom(V4, Z/2 + Z/4) = (Z/2)^4
        assert_eq!(factors_u64(h.invariant_factors()), vec![2, 2, 2, 2]);
        assert_eq!(h.class_of(&Cocycle::zero(&m)).unwrap(), h.zero());
        assert!(is_coboundary(&m, &h.representative(&h.zero())).unwrap().is_coboundary());
        for g in h.generators() {
            assert_eq!(h.class_of(&h.representative(&g)).unwrap(), g);
        }
    }

    #[test]
    fn restriction_and_induced_maps() {
        // Z/4 with trivial Z/4 action; restrict to the subgroup of order 2.
        let m = trivial_on(FiniteGroup::cyclic(4), &[4]).to_gmodule().unwrap();
        let h = CohomologyGroup::compute(&m).unwrap();
        let gen = &h.generators()[0];
        let (sub, r) = h.restriction(&[0, 2], gen).unwrap();
        assert_eq!(factors_u64(sub.invariant_factors()), vec![2]);
        assert_eq!(sub.order_of(&r), BigInt::from(2));
        let (full, r) = h.restriction(&[0, 1, 2, 3], gen).unwrap();
        assert_eq!(full.order_of(&r), BigInt::from(4));
        assert!(matches!(h.restriction(&[0, 1], gen), Err(Error::NotASubgroup)));

        // multiplication by 2: Z/4 -> Z/4
        let id = InducedMap::new(&ModuleMap::identity(1), &h, &h).unwrap();
        assert!(id.is_injective(&h));
        let double = ModuleMap::new(IntMatrix::from_rows(&[vec![2]]));
        let ind = InducedMap::new(&double, &h, &h).unwrap();
        assert_eq!(ind.image_order(&h), BigInt::from(2));
        let comp = InducedMap::new(&double.compose(&double), &h, &h).unwrap();
        let twice = ind.apply(&h, &ind.apply(&h, gen));
        assert_eq!(comp.apply(&h, gen), twice);

        let neg = negation_on(4).to_gmodule().unwrap();
        let triv = trivial_on(FiniteGroup::cyclic(2), &[4]).to_gmodule().unwrap();
        let hn = CohomologyGroup::compute(&neg).unwrap();
        let ht = CohomologyGroup::compute(&triv).unwrap();
        assert_eq!(
            InducedMap::new(&ModuleMap::identity(1), &hn, &ht).unwrap_err(),
            Error::NotEquivariant(1)
        );
    }
}

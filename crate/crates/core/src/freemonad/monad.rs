use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ptree::{FreeMonadView, PTerm};
use crate::error::{Error, Result};
use crate::finset::for_each_tuple;
use crate::guard::Guard;
use crate::poly::{
    associator, compose_guarded, hcomp_with, hom_poly, identity_poly, unitors, validate_mor, vcomp,
    Composite, Endpoints, MorTables, PolyMor, Polynomial,
};

/// Elementwise access to a (possibly partial) monad structure on a
/// polynomial endofunctor.
pub trait Multiplication {
    fn poly(&self) -> &Arc<Polynomial>;

    /// The operation picked out by the unit at colour `i`.
    fn unit_op(&self, i: usize) -> usize;

    /// `μ(outer; inners)` with its input correspondence: entry `t` is the
    /// input of the result matched with the `t`-th composite input, composite
    /// inputs running over the fiber of `outer` and then each inner fiber.
    fn multiply(&self, outer: usize, inners: &[usize]) -> Result<(usize, Vec<usize>)>;
}

/// A polynomial endofunctor with cartesian unit `id → P` and multiplication
/// `P ∘ P → P`.
#[derive(Clone, Debug)]
pub struct PolynomialMonad {
    p: Arc<Polynomial>,
    unit: PolyMor,
    mult: PolyMor,
    square: Arc<Composite>,
    laws_verified: bool,
}

#[derive(Serialize, Deserialize)]
struct MonadJson {
    poly: Polynomial,
    unit: MorTables,
    mult: MorTables,
}

impl Serialize for PolynomialMonad {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MonadJson {
            poly: (*self.p).clone(),
            unit: self.unit.tables(),
            mult: self.mult.tables(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PolynomialMonad {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MonadJson::deserialize(de)?;
        PolynomialMonad::from_tables(raw.poly, raw.unit, raw.mult).map_err(D::Error::custom)
    }
}

impl PolynomialMonad {
    /// Checks shapes, then runs [`monad_laws_check`] and records the outcome.
    pub fn new(p: Polynomial, unit: MorTables, mult: MorTables) -> Result<Self> {
        let mut m = PolynomialMonad::unchecked(p, unit, mult)?;
        m.laws_verified = monad_laws_check(&m)?.passed();
        Ok(m)
    }

    /// Like [`PolynomialMonad::new`] but fails unless the laws hold.
    pub fn from_tables(p: Polynomial, unit: MorTables, mult: MorTables) -> Result<Self> {
        let m = PolynomialMonad::new(p, unit, mult)?;
        if !m.laws_verified {
            let report = monad_laws_check(&m)?;
            return Err(Error::inconsistent(format!(
                "monad laws fail: {}",
                report.witness.unwrap_or_default()
            )));
        }
        Ok(m)
    }

    fn unchecked(p: Polynomial, unit: MorTables, mult: MorTables) -> Result<Self> {
        if !p.is_endo_shaped() {
            return Err(Error::shape("a monad needs an endofunctor (I = J)"));
        }
        let square = Arc::new(compose_guarded(&p, &p, Guard::default())?);
        let p = Arc::new(p);
        let unit = PolyMor::from_tables(Arc::new(identity_poly(p.i())), p.clone(), unit)?;
        let mult = PolyMor::from_tables(Arc::new(square.poly.clone()), p.clone(), mult)?;
        Ok(PolynomialMonad {
            p,
            unit,
            mult,
            square,
            laws_verified: false,
        })
    }

    /// Builds unit and multiplication from operation tables. Inputs of a
    /// composite are matched with inputs of the result in order.
    pub fn from_operations(
        p: Polynomial,
        unit_ops: &[usize],
        mult: impl Fn(usize, &[usize]) -> Option<usize>,
    ) -> Result<Self> {
        let square = compose_guarded(&p, &p, Guard::default())?;
        let n = p.i().size;
        if unit_ops.len() != n {
            return Err(Error::shape("one unit operation per colour"));
        }
        let unit = MorTables {
            on_i: (0..n).collect(),
            on_j: (0..n).collect(),
            eps: unit_ops
                .iter()
                .map(|&b| p.fiber(b).first().copied().ok_or_else(|| Error::shape("unit operations are unary")))
                .collect::<Result<_>>()?,
            beta: unit_ops.to_vec(),
        };
        let mut beta = Vec::with_capacity(square.d_parts.len());
        let mut first_input = vec![0; square.d_parts.len()];
        for (d, (c, phi)) in square.d_parts.iter().enumerate() {
            let r = mult(*c, phi).ok_or_else(|| Error::MissingDomain(format!("no product for operation {c} over {phi:?}")))?;
            beta.push(r);
            first_input[d] = square.poly.fiber(d).first().copied().unwrap_or(0);
        }
        let eps = (0..square.poly.e().size)
            .map(|g| {
                let d = square.poly.p().table[g];
                let pos = g - first_input[d];
                p.fiber(beta[d])
                    .get(pos)
                    .copied()
                    .ok_or_else(|| Error::shape(format!("product of composite {d} has the wrong arity")))
            })
            .collect::<Result<_>>()?;
        let mult = MorTables {
            on_i: (0..n).collect(),
            on_j: (0..n).collect(),
            eps,
            beta,
        };
        PolynomialMonad::new(p, unit, mult)
    }

    pub fn unit(&self) -> &PolyMor {
        &self.unit
    }

    pub fn mult(&self) -> &PolyMor {
        &self.mult
    }

    pub fn laws_verified(&self) -> bool {
        self.laws_verified
    }

    /// Replaces the multiplication tables, keeping the polynomial and unit.
    /// The law flag is recomputed.
    pub fn with_mult(&self, mult: MorTables) -> Result<Self> {
        PolynomialMonad::new((*self.p).clone(), self.unit.tables(), mult)
    }
}

impl Multiplication for PolynomialMonad {
    fn poly(&self) -> &Arc<Polynomial> {
        &self.p
    }

    fn unit_op(&self, i: usize) -> usize {
        self.unit.beta.table[i]
    }

    fn multiply(&self, outer: usize, inners: &[usize]) -> Result<(usize, Vec<usize>)> {
        let d = *self
            .square
            .d_index
            .get(&(outer, inners.to_vec()))
            .ok_or_else(|| Error::shape(format!("operations {inners:?} cannot be plugged into {outer}")))?;
        let table = self.square.poly.fiber(d).iter().map(|&g| self.mult.eps.table[g]).collect();
        Ok((self.mult.beta.table[d], table))
    }
}

/// Outcome of a monad law check, with the first failure located.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub unit_cartesian: bool,
    pub mult_cartesian: bool,
    pub left_unit: bool,
    pub right_unit: bool,
    pub associative: bool,
    /// Elementwise comparisons made (partial checks only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances_checked: Option<u64>,
    pub witness: Option<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.unit_cartesian && self.mult_cartesian && self.left_unit && self.right_unit && self.associative
    }
}

fn first_difference(a: &PolyMor, b: &PolyMor) -> Option<String> {
    if let Some(x) = (0..a.beta.table.len()).find(|&x| a.beta.table[x] != b.beta.table[x]) {
        return Some(format!("operation {}", a.src.b_tags()[x]));
    }
    if let Some(x) = (0..a.eps.table.len()).find(|&x| a.eps.table[x] != b.eps.table[x]) {
        return Some(format!("input {}", a.src.e_tags()[x]));
    }
    None
}

/// Checks the monad axioms as equations of cartesian morphisms, comparing
/// along the explicit unitors and associator.
pub fn monad_laws_check(m: &PolynomialMonad) -> Result<LawReport> {
    let mut report = LawReport {
        unit_cartesian: validate_mor(&m.unit).valid,
        mult_cartesian: validate_mor(&m.mult).valid,
        ..LawReport::default()
    };
    if !report.unit_cartesian || !report.mult_cartesian {
        report.witness = Some(if report.unit_cartesian { "multiplication is not cartesian" } else { "unit is not cartesian" }.into());
        return Ok(report);
    }
    let p = &*m.p;
    let id_p = PolyMor::identity(&m.p);
    let id_i = identity_poly(p.i());
    let u = unitors(p)?;
    let left_src = compose_guarded(&id_i, p, Guard::default())?;
    let right_src = compose_guarded(p, &id_i, Guard::default())?;
    let left = vcomp(&m.mult, &hcomp_with(&m.unit, &id_p, &left_src, &m.square)?)?;
    let right = vcomp(&m.mult, &hcomp_with(&id_p, &m.unit, &right_src, &m.square)?)?;
    let mut witness = None;
    let mut holds = |diff: Option<String>, law: &str| match diff {
        None => true,
        Some(d) => {
            witness.get_or_insert(format!("{law} fails at {d}"));
            false
        }
    };
    report.left_unit = holds(first_difference(&left, &u.left), "left unit law");
    report.right_unit = holds(first_difference(&right, &u.right), "right unit law");

    let cube = compose_guarded(&m.square.poly, p, Guard::default())?;
    let cube_right = compose_guarded(p, &m.square.poly, Guard::default())?;
    let outer_first = vcomp(&m.mult, &hcomp_with(&m.mult, &id_p, &cube, &m.square)?)?;
    let (assoc, _) = associator(p, p, p)?;
    let inner_first = vcomp(&m.mult, &vcomp(&hcomp_with(&id_p, &m.mult, &cube_right, &m.square)?, &assoc)?)?;
    report.associative = holds(first_difference(&outer_first, &inner_first), "associativity");
    report.witness = witness;
    Ok(report)
}

/// The identity monad on `n` colours.
pub fn identity_monad(n: usize) -> PolynomialMonad {
    let p = identity_poly(&crate::finset::FiniteSet::new(n));
    PolynomialMonad::from_operations(p, &(0..n).collect::<Vec<_>>(), |c, _| Some(c)).expect("identity monad")
}

/// One colour, a unary unit `u` (operation 0) and a constant `c`
/// (operation 1); every composite other than `u ∘ u` collapses to `c`.
pub fn maybe_monad() -> PolynomialMonad {
    let p = Polynomial::one_colour(&[1, 0]);
    PolynomialMonad::from_operations(p, &[0], |c, phi| match (c, phi) {
        (0, [0]) => Some(0),
        _ => Some(1),
    })
    .expect("maybe monad")
}

/// Folds a term through the multiplication, bottom up: a leaf goes to the
/// unit, a node to `μ` of its operation with the folds of its subtrees.
/// Also returns, for each leaf from left to right, the matching input of the
/// resulting operation.
pub fn fold_ptree(m: &dyn Multiplication, t: &PTerm) -> Result<(usize, Vec<usize>)> {
    fold_with(m, t, &|b| Ok((b, (0..m.poly().arity(b)).collect())), &|i| i)
}

/// Folds a `P`-term through `M` after relabelling along a map `P → M.P`
/// given on operations (with the fiber positions their inputs land in) and
/// on colours.
pub(crate) fn fold_with(
    m: &dyn Multiplication,
    t: &PTerm,
    op: &dyn Fn(usize) -> Result<(usize, Vec<usize>)>,
    colour: &dyn Fn(usize) -> usize,
) -> Result<(usize, Vec<usize>)> {
    let q = m.poly().clone();
    match t {
        PTerm::Leaf(i) => {
            let u = m.unit_op(colour(*i));
            Ok((u, vec![q.fiber(u)[0]]))
        }
        PTerm::Node(b, kids) => {
            let (image, positions) = op(*b)?;
            let folded: Vec<(usize, Vec<usize>)> =
                kids.iter().map(|k| fold_with(m, k, op, colour)).collect::<Result<_>>()?;
            let mut inners = vec![0; kids.len()];
            for (k, (x, _)) in folded.iter().enumerate() {
                inners[positions[k]] = *x;
            }
            let (r, table) = m.multiply(image, &inners)?;
            let mut offsets = Vec::with_capacity(inners.len());
            let mut acc = 0;
            for &x in &inners {
                offsets.push(acc);
                acc += q.arity(x);
            }
            let mut leaves = Vec::new();
            for (k, (_, lm)) in folded.iter().enumerate() {
                for &e in lm {
                    leaves.push(table[offsets[positions[k]] + q.fiber_position(e)]);
                }
            }
            Ok((r, leaves))
        }
    }
}

/// Maps of endofunctors `A.P → B.P` that carry units to units and
/// products to products, input correspondences included.
pub fn monad_maps(a: &PolynomialMonad, b: &PolynomialMonad, guard: Guard) -> Result<Vec<PolyMor>> {
    let homs = hom_poly(&a.p, &b.p, Endpoints::Endo, guard)?;
    let mut out = Vec::new();
    for phi in homs {
        if preserves_structure(a, b, &phi)? {
            out.push(phi);
        }
    }
    Ok(out)
}

fn preserves_structure(a: &PolynomialMonad, b: &PolynomialMonad, phi: &PolyMor) -> Result<bool> {
    let (pa, pb) = (&a.p, &b.p);
    for i in 0..pa.i().size {
        if phi.beta.table[a.unit_op(i)] != b.unit_op(phi.on_i.table[i]) {
            return Ok(false);
        }
    }
    let pos = |e: usize| pb.fiber_position(phi.eps.table[e]);
    for (c, inners) in &a.square.d_parts {
        let (r, tab) = a.multiply(*c, inners)?;
        let outer_in = pa.fiber(*c);
        let mut mapped = vec![0; inners.len()];
        for (k, &x) in inners.iter().enumerate() {
            mapped[pos(outer_in[k])] = phi.beta.table[x];
        }
        let (r2, tab2) = b.multiply(phi.beta.table[*c], &mapped)?;
        if phi.beta.table[r] != r2 {
            return Ok(false);
        }
        let mut offsets = Vec::with_capacity(mapped.len());
        let mut acc = 0;
        for &x in &mapped {
            offsets.push(acc);
            acc += pb.arity(x);
        }
        let mut t = 0;
        for (k, &x) in inners.iter().enumerate() {
            for &e in pa.fiber(x) {
                if phi.eps.table[tab[t]] != tab2[offsets[pos(outer_in[k])] + pos(e)] {
                    return Ok(false);
                }
                t += 1;
            }
        }
    }
    Ok(true)
}

/// A monad map that is bijective on colours and operations, if one exists.
pub fn monad_iso(a: &PolynomialMonad, b: &PolynomialMonad, guard: Guard) -> Result<Option<PolyMor>> {
    if a.p.b().size != b.p.b().size || a.p.i().size != b.p.i().size {
        return Ok(None);
    }
    Ok(monad_maps(a, b, guard)?
        .into_iter()
        .find(|m| m.on_i.is_bijective() && m.beta.is_bijective()))
}

/// The free monad on `P` cut at height `h`: operations are the `P`-trees of
/// height at most `h` and multiplication is grafting, defined when the
/// result stays within the bound.
#[derive(Clone, Debug)]
pub struct FreeTruncation {
    base: Arc<Polynomial>,
    poly: Arc<Polynomial>,
    terms: Vec<PTerm>,
    index: HashMap<PTerm, usize>,
    height: usize,
}

impl FreeTruncation {
    pub fn new(p: &Polynomial, h: usize, guard: Guard) -> Result<Self> {
        let mut view = FreeMonadView::new(p)?;
        let terms = view.up_to(h, guard)?;
        let poly = super::free_monad_poly(p, h, guard)?;
        Ok(FreeTruncation {
            base: view.poly().clone(),
            poly: Arc::new(poly),
            index: terms.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect(),
            terms,
            height: h,
        })
    }

    pub fn base(&self) -> &Arc<Polynomial> {
        &self.base
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn terms(&self) -> &[PTerm] {
        &self.terms
    }

    pub fn op_of(&self, t: &PTerm) -> Option<usize> {
        self.index.get(t).copied()
    }
}

impl Multiplication for FreeTruncation {
    fn poly(&self) -> &Arc<Polynomial> {
        &self.poly
    }

    fn unit_op(&self, i: usize) -> usize {
        self.index[&PTerm::Leaf(i)]
    }

    fn multiply(&self, outer: usize, inners: &[usize]) -> Result<(usize, Vec<usize>)> {
        let subs: Vec<PTerm> = inners.iter().map(|&x| self.terms[x].clone()).collect();
        let colours = self.terms[outer].leaf_colours();
        for (k, s) in subs.iter().enumerate() {
            if s.root_colour(&self.base) != colours[k] {
                return Err(Error::shape(format!("tree {s} cannot be grafted onto leaf {k}")));
            }
        }
        let grafted = self.terms[outer].substitute(&subs)?;
        let r = self.op_of(&grafted).ok_or_else(|| Error::OutsideTruncation(grafted.to_string()))?;
        Ok((r, self.poly.fiber(r).to_vec()))
    }
}

fn defined<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::OutsideTruncation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Elementwise law check for a possibly partial multiplication: unit laws
/// on every operation, associativity on every triple where both sides are
/// defined. At most `guard` triples are visited.
pub fn partial_laws_check(m: &dyn Multiplication, guard: Guard) -> Result<LawReport> {
    let q = m.poly().clone();
    let mut report = LawReport {
        unit_cartesian: true,
        mult_cartesian: true,
        left_unit: true,
        right_unit: true,
        associative: true,
        ..LawReport::default()
    };
    let mut checked: u64 = 0;
    let mut by_colour = vec![Vec::new(); q.i().size];
    for b in 0..q.b().size {
        by_colour[q.t().table[b]].push(b);
    }
    for c in 0..q.b().size {
        let ident: Vec<usize> = q.fiber(c).to_vec();
        let left = defined(m.multiply(m.unit_op(q.t().table[c]), &[c]))?;
        if left.as_ref() != Some(&(c, ident.clone())) {
            report.left_unit = false;
            report.witness.get_or_insert(format!("left unit law fails at operation {}", q.b_tags()[c]));
        }
        let units: Vec<usize> = q.input_colours(c).iter().map(|&i| m.unit_op(i)).collect();
        let right = defined(m.multiply(c, &units))?;
        if right.as_ref() != Some(&(c, ident)) {
            report.right_unit = false;
            report.witness.get_or_insert(format!("right unit law fails at operation {}", q.b_tags()[c]));
        }
        checked += 2;
    }
    let arity = |b: usize| q.arity(b);
    let mut result = Ok(());
    for c in 0..q.b().size {
        let colours = q.input_colours(c);
        let bounds: Vec<usize> = colours.iter().map(|&i| by_colour[i].len()).collect();
        for_each_tuple(&bounds, |choice| {
            if result.is_err() || !report.associative {
                return;
            }
            let xs: Vec<usize> = choice.iter().zip(&colours).map(|(&k, &i)| by_colour[i][k]).collect();
            let cx = match defined(m.multiply(c, &xs)) {
                Ok(Some(v)) => v,
                Ok(None) => return,
                Err(e) => {
                    result = Err(e);
                    return;
                }
            };
            let inner_colours: Vec<usize> = xs.iter().flat_map(|&x| q.input_colours(x)).collect();
            let inner_bounds: Vec<usize> = inner_colours.iter().map(|&i| by_colour[i].len()).collect();
            for_each_tuple(&inner_bounds, |choice2| {
                if result.is_err() || !report.associative {
                    return;
                }
                checked += 1;
                if checked > guard.limit() {
                    result = guard.check("associativity instances", checked as u128);
                    return;
                }
                let ys: Vec<usize> = choice2.iter().zip(&inner_colours).map(|(&k, &i)| by_colour[i][k]).collect();
                // μ(μ(c; xs); ys), with ys re-indexed along the input table of μ(c; xs)
                let mut regrouped = vec![0; ys.len()];
                for (t, &y) in ys.iter().enumerate() {
                    regrouped[q.fiber_position(cx.1[t])] = y;
                }
                let lhs = match defined(m.multiply(cx.0, &regrouped)) {
                    Ok(Some((r, table))) => {
                        let mut offs = Vec::new();
                        let mut acc = 0;
                        for &y in &regrouped {
                            offs.push(acc);
                            acc += arity(y);
                        }
                        let mut flat = Vec::new();
                        for (t, &y) in ys.iter().enumerate() {
                            let pos = q.fiber_position(cx.1[t]);
                            for j in 0..arity(y) {
                                flat.push(table[offs[pos] + j]);
                            }
                        }
                        (r, flat)
                    }
                    Ok(None) => return,
                    Err(e) => {
                        result = Err(e);
                        return;
                    }
                };
                // μ(c; μ(x_k; ys_k))
                let mut zs = Vec::with_capacity(xs.len());
                let mut tables = Vec::with_capacity(xs.len());
                let mut cursor = 0;
                for &x in &xs {
                    let n = arity(x);
                    match defined(m.multiply(x, &ys[cursor..cursor + n])) {
                        Ok(Some((z, table))) => {
                            zs.push(z);
                            tables.push(table);
                        }
                        Ok(None) => return,
                        Err(e) => {
                            result = Err(e);
                            return;
                        }
                    }
                    cursor += n;
                }
                let rhs = match defined(m.multiply(c, &zs)) {
                    Ok(Some((r, table))) => {
                        let mut offs = Vec::new();
                        let mut acc = 0;
                        for &z in &zs {
                            offs.push(acc);
                            acc += arity(z);
                        }
                        let mut flat = Vec::new();
                        for (k, tk) in tables.iter().enumerate() {
                            for &e in tk {
                                flat.push(table[offs[k] + q.fiber_position(e)]);
                            }
                        }
                        (r, flat)
                    }
                    Ok(None) => return,
                    Err(e) => {
                        result = Err(e);
                        return;
                    }
                };
                if lhs != rhs {
                    report.associative = false;
                    report.witness.get_or_insert(format!(
                        "associativity fails at operation {} over {:?} over {:?}",
                        q.b_tags()[c],
                        xs,
                        ys
                    ));
                }
            });
        });
    }
    result?;
    report.instances_checked = Some(checked);
    Ok(report)
}

/// Outcome of comparing monad maps out of the free monad with endofunctor
/// maps into the underlying polynomial, at a height bound.
#[derive(Clone, Debug, Serialize)]
pub struct AdjunctionReport {
    /// `|Hom(P, M.P)|` in the category of polynomial endofunctors.
    pub endofunctor_maps: usize,
    /// Extensions to `tr_{≤h}(P)` that respect grafting and units.
    pub monad_maps: usize,
    /// Whether every extension restricts back to the map it came from.
    pub restriction_recovers: bool,
    pub graftings_checked: u64,
    pub witness: Option<String>,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.endofunctor_maps == self.monad_maps && self.restriction_recovers
    }
}

/// Every `P`-term `c ∘ (x_k)` of height at most `h`: the outer tree and,
/// for each of its leaves, a tree short enough to fit under it.
fn graftings(trees: &[PTerm], p: &Polynomial, h: usize, visit: &mut dyn FnMut(&PTerm, &[PTerm]) -> bool) {
    fn depths(t: &PTerm, d: usize, out: &mut Vec<usize>) {
        match t {
            PTerm::Leaf(_) => out.push(d),
            PTerm::Node(_, kids) => kids.iter().for_each(|k| depths(k, d + 1, out)),
        }
    }
    for c in trees {
        let mut ds = Vec::new();
        depths(c, 0, &mut ds);
        let colours = c.leaf_colours();
        let options: Vec<Vec<&PTerm>> = colours
            .iter()
            .zip(&ds)
            .map(|(&i, &d)| {
                trees
                    .iter()
                    .filter(|t| t.root_colour(p) == i && d + t.height() <= h)
                    .collect()
            })
            .collect();
        let bounds: Vec<usize> = options.iter().map(Vec::len).collect();
        let mut go_on = true;
        for_each_tuple(&bounds, |choice| {
            if go_on {
                let xs: Vec<PTerm> = choice.iter().enumerate().map(|(k, &x)| options[k][x].clone()).collect();
                go_on = visit(c, &xs);
            }
        });
        if !go_on {
            return;
        }
    }
}

/// Compares `Hom(P, M.P)` with monad maps `tr_{≤h}(P) → M`: each endofunctor
/// map is extended by folding through `M`, the extension is checked to
/// respect grafting on every pair within the bound, and restricting it to
/// corollas must give back the original map.
pub fn adjunction_check(p: &Polynomial, m: &dyn Multiplication, h: usize, guard: Guard) -> Result<AdjunctionReport> {
    let target = m.poly().clone();
    let homs = hom_poly(p, &target, Endpoints::Endo, guard)?;
    let mut view = FreeMonadView::new(p)?;
    let trees = view.up_to(h, guard)?;
    let mut report = AdjunctionReport {
        endofunctor_maps: homs.len(),
        monad_maps: 0,
        restriction_recovers: true,
        graftings_checked: 0,
        witness: None,
    };
    for phi in &homs {
        let op = |b: usize| -> Result<(usize, Vec<usize>)> {
            let image = phi.beta.table[b];
            Ok((image, p.fiber(b).iter().map(|&e| target.fiber_position(phi.eps.table[e])).collect()))
        };
        let colour = |i: usize| phi.on_i.table[i];
        let ext = |t: &PTerm| fold_with(m, t, &op, &colour);

        for b in 0..p.b().size {
            let corolla = PTerm::Node(b, p.input_colours(b).into_iter().map(PTerm::Leaf).collect());
            let (r, leaves) = ext(&corolla)?;
            let expect: Vec<usize> = p.fiber(b).iter().map(|&e| phi.eps.table[e]).collect();
            if r != phi.beta.table[b] || leaves != expect {
                report.restriction_recovers = false;
                report.witness.get_or_insert(format!("restriction differs at operation {}", p.b_tags()[b]));
            }
        }

        let mut ok = true;
        let mut failure: Result<()> = Ok(());
        let mut checked = 0u64;
        graftings(&trees, p, h, &mut |c, xs| {
            checked += 1;
            if checked > guard.limit() {
                failure = guard.check("graftings", checked as u128);
                return false;
            }
            let run = || -> Result<bool> {
                let whole = ext(&c.substitute(xs)?)?;
                let (oc, lc) = ext(c)?;
                let parts: Vec<(usize, Vec<usize>)> = xs.iter().map(&ext).collect::<Result<_>>()?;
                let mut inners = vec![0; parts.len()];
                for (k, (x, _)) in parts.iter().enumerate() {
                    inners[target.fiber_position(lc[k])] = *x;
                }
                let (r, table) = m.multiply(oc, &inners)?;
                let mut offs = Vec::new();
                let mut acc = 0;
                for &x in &inners {
                    offs.push(acc);
                    acc += target.arity(x);
                }
                let mut leaves = Vec::new();
                for (k, (_, lm)) in parts.iter().enumerate() {
                    for &e in lm {
                        leaves.push(table[offs[target.fiber_position(lc[k])] + target.fiber_position(e)]);
                    }
                }
                Ok(whole == (r, leaves))
            };
            match run() {
                Ok(true) => true,
                Ok(false) => {
                    ok = false;
                    false
                }
                Err(Error::OutsideTruncation(_)) => true,
                Err(e) => {
                    failure = Err(e);
                    false
                }
            }
        });
        failure?;
        report.graftings_checked += checked;
        if ok {
            report.monad_maps += 1;
        } else {
            report.witness.get_or_insert("an extension does not respect grafting".into());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemonad::free_monad_poly;

    #[test]
    fn standard_monads_pass() {
        assert!(maybe_monad().laws_verified());
        assert!(identity_monad(2).laws_verified());
        let r = partial_laws_check(&maybe_monad(), Guard::default()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn perturbed_group_table_fails_associativity() {
        let p = Polynomial::one_colour(&[1, 1, 1]);
        // 0 = e, 1 = a, 2 = b; a·a = e, a·b = e, b·a = e, b·b = a
        let table = [[0, 1, 2], [1, 0, 0], [2, 0, 1]];
        let m = PolynomialMonad::from_operations(p, &[0], |c, phi| Some(table[c][phi[0]])).unwrap();
        let r = monad_laws_check(&m).unwrap();
        assert!(r.left_unit && r.right_unit && !r.associative, "{r:?}");
        assert!(r.witness.unwrap().starts_with("associativity"));
    }

    #[test]
    fn swapped_bijection_is_located() {
        // colours 0, 1; u0, u1 units and m: (0, 0) → 1
        let p = Polynomial::from_operations(2, 2, &[(vec![0], 0), (vec![1], 1), (vec![0, 0], 1)]).unwrap();
        let m = PolynomialMonad::from_operations(p, &[0, 1], |c, phi| match (c, phi) {
            (0, _) => Some(0),
            (1, [x]) => Some(*x),
            (2, _) => Some(2),
            _ => None,
        })
        .unwrap();
        assert!(m.laws_verified());
        let mut tables = m.mult().tables();
        let d = m.square.d_index[&(2, vec![0, 0])];
        let fib = m.square.poly.fiber(d).to_vec();
        tables.eps.swap(fib[0], fib[1]);
        let bad = m.with_mult(tables).unwrap();
        let r = monad_laws_check(&bad).unwrap();
        assert!(!r.passed() && !r.right_unit, "{r:?}");
    }

    #[test]
    fn folding_in_the_maybe_monad() {
        let m = maybe_monad();
        assert_eq!(fold_ptree(&m, &PTerm::Leaf(0)).unwrap(), (0, vec![0]));
        let two = PTerm::Node(0, vec![PTerm::Node(1, vec![])]);
        assert_eq!(fold_ptree(&m, &two).unwrap(), (1, vec![]));
        let uu = PTerm::Node(0, vec![PTerm::Node(0, vec![PTerm::Leaf(0)])]);
        assert_eq!(fold_ptree(&m, &uu).unwrap(), (0, vec![0]));
    }

    #[test]
    fn free_truncations_are_partial_monads() {
        let p = Polynomial::one_colour(&[0, 2]);
        let f = FreeTruncation::new(&p, 2, Guard::default()).unwrap();
        assert_eq!(*f.poly().as_ref(), free_monad_poly(&p, 2, Guard::default()).unwrap());
        let r = partial_laws_check(&f, Guard::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn adjunction_examples() {
        let empty = Polynomial::from_operations(1, 1, &[]).unwrap();
        let r = adjunction_check(&empty, &maybe_monad(), 2, Guard::default()).unwrap();
        assert_eq!((r.endofunctor_maps, r.monad_maps), (1, 1));
        let nullary = Polynomial::one_colour(&[0]);
        let r = adjunction_check(&nullary, &maybe_monad(), 2, Guard::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.endofunctor_maps, 1);
        let p = Polynomial::one_colour(&[0, 2]);
        let f = FreeTruncation::new(&p, 2, Guard::default()).unwrap();
        let r = adjunction_check(&p, &f, 2, Guard::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

//! Polynomial functors over finite sets.
//!
//! A polynomial is a diagram `I ←s E →p B →t J`. It acts on families over
//! `I` by `X ↦ t_! p_* s^* X`: an element of the result over `j` is an
//! operation `b` with `t(b) = j` together with a colour-respecting choice of
//! an `X`-element for every input `e ∈ E_b`.

mod compose;
mod family;
mod hom;
mod morphism;

pub use compose::{compose_guarded, compose_parts, compose_poly, composite_eval_bijection, Composite};
pub use family::{evaluate, evaluate_map, evaluate_with, Evaluation, Family, FamilyMap};
pub(crate) use family::predicted_size;
pub use hom::{hom_poly, Endpoints};
pub use morphism::{
    adjunction_counit, adjunction_unit, associator, hcomp_mor, naturality_is_pullback,
    pullback_poly, pushforward_poly, unitors, validate_mor, vcomp, MorReport, MorTables, PolyMor,
    Unitors,
};
pub(crate) use morphism::hcomp_with;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{FiniteMap, FiniteSet};
use crate::tag::Tag;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "PolyJson", try_from = "PolyJson")]
pub struct Polynomial {
    i: FiniteSet,
    e: FiniteSet,
    b: FiniteSet,
    j: FiniteSet,
    s: FiniteMap,
    p: FiniteMap,
    t: FiniteMap,
    e_tags: Vec<Tag>,
    b_tags: Vec<Tag>,
    fibers: Vec<Vec<usize>>,
}

/// Wire format of a polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    #[serde(rename = "I")]
    pub i: FiniteSet,
    #[serde(rename = "E")]
    pub e: FiniteSet,
    #[serde(rename = "B")]
    pub b: FiniteSet,
    #[serde(rename = "J")]
    pub j: FiniteSet,
    pub s: FiniteMap,
    pub p: FiniteMap,
    pub t: FiniteMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_tags: Option<Vec<Tag>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_tags: Option<Vec<Tag>>,
}

impl From<Polynomial> for PolyJson {
    fn from(p: Polynomial) -> Self {
        let plain_e = p.e_tags == Tag::atoms(p.e.size);
        let plain_b = p.b_tags == Tag::atoms(p.b.size);
        PolyJson {
            i: p.i,
            e: p.e,
            b: p.b,
            j: p.j,
            s: p.s,
            p: p.p,
            t: p.t,
            e_tags: (!plain_e).then_some(p.e_tags),
            b_tags: (!plain_b).then_some(p.b_tags),
        }
    }
}

impl TryFrom<PolyJson> for Polynomial {
    type Error = Error;

    fn try_from(raw: PolyJson) -> Result<Self> {
        let poly = Polynomial::new(raw.i, raw.e, raw.b, raw.j, raw.s, raw.p, raw.t)?;
        match (raw.e_tags, raw.b_tags) {
            (None, None) => Ok(poly),
            (e, b) => {
                let e = e.unwrap_or_else(|| Tag::atoms(poly.e.size));
                let b = b.unwrap_or_else(|| Tag::atoms(poly.b.size));
                poly.with_tags(e, b)
            }
        }
    }
}

fn check_map(name: &str, map: &FiniteMap, dom: &FiniteSet, cod: &FiniteSet) -> Result<()> {
    if map.dom.size != dom.size || map.cod.size != cod.size {
        return Err(Error::shape(format!(
            "map `{name}` goes {} → {} but should go {} → {}",
            map.dom.size, map.cod.size, dom.size, cod.size
        )));
    }
    if let Some(&bad) = map.table.iter().find(|&&y| y >= cod.size) {
        return Err(Error::shape(format!(
            "map `{name}` has entry {bad} outside a codomain of size {}",
            cod.size
        )));
    }
    Ok(())
}

fn distinct(tags: &[Tag]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(tags.len());
    tags.iter().all(|t| seen.insert(t))
}

impl Polynomial {
    /// Validates the diagram `I ←s E →p B →t J`; errors name the offending map.
    pub fn new(
        i: FiniteSet,
        e: FiniteSet,
        b: FiniteSet,
        j: FiniteSet,
        s: FiniteMap,
        p: FiniteMap,
        t: FiniteMap,
    ) -> Result<Self> {
        check_map("s", &s, &e, &i)?;
        check_map("p", &p, &e, &b)?;
        check_map("t", &t, &b, &j)?;
        let fibers = p.fibers();
        Ok(Polynomial {
            e_tags: Tag::atoms(e.size),
            b_tags: Tag::atoms(b.size),
            i,
            e,
            b,
            j,
            s,
            p,
            t,
            fibers,
        })
    }

    /// Builds a polynomial from bare tables; `|E|` is the length of `s`.
    pub fn from_tables(
        ni: usize,
        nj: usize,
        nb: usize,
        s: Vec<usize>,
        p: Vec<usize>,
        t: Vec<usize>,
    ) -> Result<Self> {
        let ne = s.len();
        let map = |name: &str, table: Vec<usize>, cod: usize| {
            FiniteMap::from_table(cod, table).map_err(|e| Error::shape(format!("map `{name}`: {e}")))
        };
        Polynomial::new(
            FiniteSet::new(ni),
            FiniteSet::new(ne),
            FiniteSet::new(nb),
            FiniteSet::new(nj),
            map("s", s, ni)?,
            map("p", p, nb)?,
            map("t", t, nj)?,
        )
    }

    /// One-colour polynomial with one operation per entry of `arities`.
    pub fn one_colour(arities: &[usize]) -> Self {
        let mut p = Vec::new();
        for (b, &n) in arities.iter().enumerate() {
            p.extend(std::iter::repeat_n(b, n));
        }
        Polynomial::from_tables(1, 1, arities.len(), vec![0; p.len()], p, vec![0; arities.len()])
            .expect("well-formed by construction")
    }

    /// Polynomial given by operations `(input colours, output colour)`.
    pub fn from_operations(ni: usize, nj: usize, ops: &[(Vec<usize>, usize)]) -> Result<Self> {
        let mut s = Vec::new();
        let mut p = Vec::new();
        let mut t = Vec::new();
        for (b, (inputs, out)) in ops.iter().enumerate() {
            for &c in inputs {
                s.push(c);
                p.push(b);
            }
            t.push(*out);
        }
        Polynomial::from_tables(ni, nj, ops.len(), s, p, t)
    }

    /// Replaces the structural tags of `E` and `B`.
    pub fn with_tags(mut self, e_tags: Vec<Tag>, b_tags: Vec<Tag>) -> Result<Self> {
        if e_tags.len() != self.e.size || b_tags.len() != self.b.size {
            return Err(Error::shape("tag lists do not match the sizes of E and B"));
        }
        if !distinct(&e_tags) || !distinct(&b_tags) {
            return Err(Error::shape("element tags must be distinct"));
        }
        self.e_tags = e_tags;
        self.b_tags = b_tags;
        Ok(self)
    }

    pub(crate) fn assemble(
        ni: usize,
        nj: usize,
        s: Vec<usize>,
        p: Vec<usize>,
        t: Vec<usize>,
        e_tags: Vec<Tag>,
        b_tags: Vec<Tag>,
    ) -> Self {
        let nb = t.len();
        let ne = s.len();
        let p = FiniteMap::raw(nb, p);
        let fibers = p.fibers();
        Polynomial {
            i: FiniteSet::new(ni),
            e: FiniteSet::new(ne),
            b: FiniteSet::new(nb),
            j: FiniteSet::new(nj),
            s: FiniteMap::raw(ni, s),
            p,
            t: FiniteMap::raw(nj, t),
            e_tags,
            b_tags,
            fibers,
        }
    }

    pub fn i(&self) -> &FiniteSet {
        &self.i
    }
    pub fn e(&self) -> &FiniteSet {
        &self.e
    }
    pub fn b(&self) -> &FiniteSet {
        &self.b
    }
    pub fn j(&self) -> &FiniteSet {
        &self.j
    }
    pub fn s(&self) -> &FiniteMap {
        &self.s
    }
    pub fn p(&self) -> &FiniteMap {
        &self.p
    }
    pub fn t(&self) -> &FiniteMap {
        &self.t
    }
    pub fn e_tags(&self) -> &[Tag] {
        &self.e_tags
    }
    pub fn b_tags(&self) -> &[Tag] {
        &self.b_tags
    }

    /// `E_b`, in increasing order.
    pub fn fiber(&self, b: usize) -> &[usize] {
        &self.fibers[b]
    }

    pub fn arity(&self, b: usize) -> usize {
        self.fibers[b].len()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.fibers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Input colours of `b`, in fiber order.
    pub fn input_colours(&self, b: usize) -> Vec<usize> {
        self.fibers[b].iter().map(|&e| self.s.table[e]).collect()
    }

    /// Position of `e` inside its fiber.
    pub fn fiber_position(&self, e: usize) -> usize {
        let b = self.p.table[e];
        self.fibers[b].binary_search(&e).expect("e lies in its own fiber")
    }

    /// Same index sets on both ends (needed for endofunctors).
    pub fn is_endo_shaped(&self) -> bool {
        self.i.size == self.j.size
    }

    pub fn b_lookup(&self) -> std::collections::HashMap<Tag, usize> {
        self.b_tags.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect()
    }

    pub fn e_lookup(&self) -> std::collections::HashMap<Tag, usize> {
        self.e_tags.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect()
    }

    /// Drops structural tags, keeping only the diagram.
    pub fn untagged(&self) -> Polynomial {
        let mut p = self.clone();
        p.e_tags = Tag::atoms(p.e.size);
        p.b_tags = Tag::atoms(p.b.size);
        p
    }

    /// Multiset of `(output colour, sorted input colours)` over all operations.
    pub fn signature_multiset(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<_> = (0..self.b.size)
            .map(|b| {
                let mut ins = self.input_colours(b);
                ins.sort_unstable();
                (self.t.table[b], ins)
            })
            .collect();
        out.sort();
        out
    }
}

/// The identity polynomial `I ← I → I → I`.
pub fn identity_poly(i: &FiniteSet) -> Polynomial {
    let n = i.size;
    let id: Vec<usize> = (0..n).collect();
    Polynomial::assemble(n, n, id.clone(), id.clone(), id, Tag::atoms(n), Tag::atoms(n))
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub arities: Vec<usize>,
}

/// Shape checks happen when a polynomial is built; this reports the arity of
/// every operation in `B` order.
pub fn validate(p: &Polynomial) -> ValidationReport {
    ValidationReport { arities: p.arities() }
}

/// Relabels the endpoints: `I' ←fs E →p B →gt J'`.
pub fn base_change(p: &Polynomial, f: &FiniteMap, g: &FiniteMap) -> Result<Polynomial> {
    if f.dom.size != p.i.size || g.dom.size != p.j.size {
        return Err(Error::shape("base change maps must start at I and J"));
    }
    let s = crate::finset::compose(f, &p.s)?;
    let t = crate::finset::compose(g, &p.t)?;
    let mut out = p.clone();
    out.i = f.cod.clone();
    out.j = g.cod.clone();
    out.s = s;
    out.t = t;
    Ok(out)
}

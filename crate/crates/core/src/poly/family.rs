use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::finset::{self, for_each_tuple, FiniteMap, FiniteSet};
use crate::guard::{sat_mul, Guard};
use crate::tag::Tag;

/// A family of finite sets over a base: `total → base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct Family {
    base: FiniteSet,
    total: FiniteSet,
    proj: FiniteMap,
    elem_tags: Vec<Tag>,
}

#[derive(Deserialize)]
struct RawFamily {
    base: FiniteSet,
    proj: FiniteMap,
    #[serde(default)]
    elem_tags: Option<Vec<Tag>>,
}

impl TryFrom<RawFamily> for Family {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        if raw.proj.cod.size != raw.base.size {
            return Err(Error::shape("family projection must land in the base"));
        }
        let tags = raw.elem_tags.unwrap_or_else(|| Tag::atoms(raw.proj.dom.size));
        Family::with_tags(raw.base, raw.proj, tags)
    }
}

impl Family {
    /// Family with plain index tags.
    pub fn new(base_size: usize, proj: Vec<usize>) -> Result<Self> {
        let proj = FiniteMap::from_table(base_size, proj)?;
        let tags = Tag::atoms(proj.dom.size);
        Family::with_tags(FiniteSet::new(base_size), proj, tags)
    }

    pub fn with_tags(base: FiniteSet, proj: FiniteMap, elem_tags: Vec<Tag>) -> Result<Self> {
        if elem_tags.len() != proj.dom.size {
            return Err(Error::shape("one tag per element is required"));
        }
        let mut seen = std::collections::HashSet::new();
        if !elem_tags.iter().all(|t| seen.insert(t)) {
            return Err(Error::shape("element tags must be distinct"));
        }
        Ok(Family {
            base,
            total: proj.dom.clone(),
            proj,
            elem_tags,
        })
    }

    pub fn empty(base_size: usize) -> Self {
        Family::new(base_size, Vec::new()).expect("empty family")
    }

    pub fn base(&self) -> &FiniteSet {
        &self.base
    }
    pub fn total(&self) -> &FiniteSet {
        &self.total
    }
    pub fn proj(&self) -> &FiniteMap {
        &self.proj
    }
    pub fn tags(&self) -> &[Tag] {
        &self.elem_tags
    }
    pub fn len(&self) -> usize {
        self.total.size
    }
    pub fn is_empty(&self) -> bool {
        self.total.size == 0
    }

    pub fn fibers(&self) -> Vec<Vec<usize>> {
        self.proj.fibers()
    }

    /// Sizes of the fibers over each base element.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.base.size];
        for &i in &self.proj.table {
            out[i] += 1;
        }
        out
    }

    pub fn lookup(&self) -> HashMap<Tag, usize> {
        self.elem_tags.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect()
    }

    /// `X ⊔ Y` over the same base, tagged `(0, x)` and `(1, y)`.
    pub fn coproduct(&self, other: &Family) -> Result<Family> {
        if self.base.size != other.base.size {
            return Err(Error::shape("coproduct of families over different bases"));
        }
        let mut proj = self.proj.table.clone();
        proj.extend(&other.proj.table);
        let tags = self
            .elem_tags
            .iter()
            .map(|t| Tag::inj(0, t.clone()))
            .chain(other.elem_tags.iter().map(|t| Tag::inj(1, t.clone())))
            .collect();
        Family::with_tags(self.base.clone(), FiniteMap::raw(self.base.size, proj), tags)
    }

    /// Reindexing `f^* X` along `f: I' → I`; elements are pairs `(i', x)`.
    pub fn reindex(&self, f: &FiniteMap) -> Result<Family> {
        if f.cod.size != self.base.size {
            return Err(Error::shape("reindexing map must land in the base"));
        }
        let pb = finset::pullback(f, &self.proj)?;
        let tags = (0..pb.apex.size)
            .map(|k| Tag::pair(Tag::atom(pb.left.table[k]), self.elem_tags[pb.right.table[k]].clone()))
            .collect();
        Family::with_tags(f.dom.clone(), FiniteMap::raw(f.dom.size, pb.left.table), tags)
    }

    /// Pushforward `f_! X` along `f: I → I'`.
    pub fn pushforward(&self, f: &FiniteMap) -> Result<Family> {
        let proj = finset::compose(f, &self.proj)?;
        Family::with_tags(f.cod.clone(), proj, self.elem_tags.clone())
    }
}

/// A map of families over a common base, commuting with the projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMap {
    pub src: Family,
    pub dst: Family,
    pub map: FiniteMap,
}

impl FamilyMap {
    pub fn new(src: Family, dst: Family, table: Vec<usize>) -> Result<Self> {
        if src.base.size != dst.base.size {
            return Err(Error::shape("family map between different bases"));
        }
        let map = FiniteMap::new(src.total.clone(), dst.total.clone(), table)?;
        for x in 0..src.len() {
            if dst.proj.table[map.table[x]] != src.proj.table[x] {
                return Err(Error::shape(format!(
                    "family map does not commute with projections at element {x}"
                )));
            }
        }
        Ok(FamilyMap { src, dst, map })
    }

    pub fn identity(x: &Family) -> Self {
        FamilyMap {
            src: x.clone(),
            dst: x.clone(),
            map: FiniteMap::identity(&x.total),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FamilyMap) -> Result<FamilyMap> {
        if self.dst != other.src {
            return Err(Error::shape("family maps are not composable"));
        }
        Ok(FamilyMap {
            src: self.src.clone(),
            dst: other.dst.clone(),
            map: finset::compose(&other.map, &self.map)?,
        })
    }

    /// Every map of families `X → Y` over the base, in lexicographic order.
    pub fn all(x: &Family, y: &Family, guard: Guard) -> Result<Vec<FamilyMap>> {
        if x.base.size != y.base.size {
            return Err(Error::shape("maps between families over different bases"));
        }
        let y_fib = y.fibers();
        let options: Vec<&[usize]> = x.proj.table.iter().map(|&i| y_fib[i].as_slice()).collect();
        let needed = options.iter().fold(1u128, |acc, o| sat_mul(acc, o.len() as u128));
        guard.check("maps of families", needed)?;
        let bounds: Vec<usize> = options.iter().map(|o| o.len()).collect();
        let mut out = Vec::new();
        for_each_tuple(&bounds, |t| {
            let table = t.iter().zip(&options).map(|(&k, o)| o[k]).collect();
            out.push(FamilyMap {
                src: x.clone(),
                dst: y.clone(),
                map: FiniteMap::raw(y.len(), table),
            });
        });
        Ok(out)
    }

    /// Pullback of a cospan of families `X → Z ← Y` with its projections.
    pub fn pullback(f: &FamilyMap, g: &FamilyMap) -> Result<(Family, FamilyMap, FamilyMap)> {
        if f.dst != g.dst {
            return Err(Error::shape("pullback of maps into different families"));
        }
        let pb = finset::pullback(&f.map, &g.map)?;
        let proj: Vec<usize> = pb.left.table.iter().map(|&x| f.src.proj.table[x]).collect();
        let tags = (0..pb.apex.size)
            .map(|k| {
                Tag::pair(
                    f.src.elem_tags[pb.left.table[k]].clone(),
                    g.src.elem_tags[pb.right.table[k]].clone(),
                )
            })
            .collect();
        let apex = Family::with_tags(f.src.base.clone(), FiniteMap::raw(f.src.base.size, proj), tags)?;
        let left = FamilyMap::new(apex.clone(), f.src.clone(), pb.left.table)?;
        let right = FamilyMap::new(apex.clone(), g.src.clone(), pb.right.table)?;
        Ok((apex, left, right))
    }
}

/// `P(X)` together with the `(b, φ)` description of each element.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub family: Family,
    /// `(b, φ)` where `φ[k]` is the `X`-element chosen for the `k`-th input of `b`.
    pub parts: Vec<(usize, Vec<usize>)>,
}

impl Evaluation {
    pub fn index(&self) -> HashMap<(usize, Vec<usize>), usize> {
        self.parts.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect()
    }
}

/// Predicted `|P(X)|` from fiber sizes alone.
pub(crate) fn predicted_size(p: &Polynomial, x_sizes: &[usize]) -> u128 {
    (0..p.b().size)
        .map(|b| {
            p.fiber(b)
                .iter()
                .fold(1u128, |acc, &e| sat_mul(acc, x_sizes[p.s().table[e]] as u128))
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// `P(X)`: elements `(b, φ)` ordered by `b`, then lexicographically by `φ`.
pub fn evaluate(p: &Polynomial, x: &Family) -> Result<Family> {
    evaluate_with(p, x, Guard::default()).map(|ev| ev.family)
}

pub fn evaluate_with(p: &Polynomial, x: &Family, guard: Guard) -> Result<Evaluation> {
    if x.base.size != p.i().size {
        return Err(Error::shape(format!(
            "family over a base of size {} but the polynomial expects {}",
            x.base.size,
            p.i().size
        )));
    }
    guard.check("polynomial evaluation", predicted_size(p, &x.fiber_sizes()))?;
    let x_fib = x.fibers();
    let mut parts = Vec::new();
    let mut proj = Vec::new();
    let mut tags = Vec::new();
    for b in 0..p.b().size {
        let options: Vec<&[usize]> = p
            .fiber(b)
            .iter()
            .map(|&e| x_fib[p.s().table[e]].as_slice())
            .collect();
        let bounds: Vec<usize> = options.iter().map(|o| o.len()).collect();
        for_each_tuple(&bounds, |t| {
            let phi: Vec<usize> = t.iter().zip(&options).map(|(&k, o)| o[k]).collect();
            tags.push(Tag::pair(
                p.b_tags()[b].clone(),
                Tag::seq(phi.iter().map(|&y| x.elem_tags[y].clone())),
            ));
            proj.push(p.t().table[b]);
            parts.push((b, phi));
        });
    }
    let family = Family::with_tags(p.j().clone(), FiniteMap::raw(p.j().size, proj), tags)?;
    Ok(Evaluation { family, parts })
}

/// `P(h)`: `(b, φ) ↦ (b, h ∘ φ)`.
pub fn evaluate_map(p: &Polynomial, h: &FamilyMap) -> Result<FamilyMap> {
    let src = evaluate_with(p, &h.src, Guard::default())?;
    let dst = evaluate_with(p, &h.dst, Guard::default())?;
    let index = dst.index();
    let table = src
        .parts
        .iter()
        .map(|(b, phi)| {
            let key = (*b, phi.iter().map(|&x| h.map.table[x]).collect::<Vec<_>>());
            index[&key]
        })
        .collect();
    Ok(FamilyMap {
        src: src.family,
        dst: dst.family,
        map: FiniteMap::raw(dst.parts.len(), table),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{identity_poly, tests::p_bin};
    use super::*;

    #[test]
    fn evaluate_examples() {
        let x = Family::new(1, vec![0, 0]).unwrap();
        let id = identity_poly(&FiniteSet::point());
        let ix = evaluate(&id, &x).unwrap();
        assert_eq!(ix.len(), 2);
        assert_eq!(ix.tags()[1], Tag::pair(Tag::atom(0), Tag::seq([Tag::atom(1)])));
        let bx = evaluate(&p_bin(), &x).unwrap();
        assert_eq!(bx.len(), 5);
        let constant = Polynomial::one_colour(&[0, 0, 0]);
        assert_eq!(evaluate(&constant, &x).unwrap().len(), 3);
        let wrong = Family::new(2, vec![0]).unwrap();
        assert!(evaluate(&p_bin(), &wrong).is_err());
    }

    #[test]
    fn evaluate_map_examples() {
        let x = Family::new(1, vec![0, 0]).unwrap();
        let id = FamilyMap::identity(&x);
        let pid = evaluate_map(&p_bin(), &id).unwrap();
        assert_eq!(pid.map, FiniteMap::identity(&pid.src.total));
        let point = Family::new(1, vec![0]).unwrap();
        let collapse = FamilyMap::new(x, point, vec![0, 0]).unwrap();
        let pc = evaluate_map(&p_bin(), &collapse).unwrap();
        assert_eq!(pc.src.len(), 5);
        assert_eq!(pc.dst.len(), 2);
        assert_eq!(pc.map.table, vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn evaluate_respects_guard() {
        let x = Family::new(1, vec![0; 10]).unwrap();
        let p = Polynomial::one_colour(&[6]);
        assert!(matches!(
            evaluate_with(&p, &x, Guard(1000)),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn family_map_checks_projections() {
        let x = Family::new(2, vec![0, 1]).unwrap();
        assert!(FamilyMap::new(x.clone(), x.clone(), vec![1, 0]).is_err());
        assert_eq!(FamilyMap::all(&x, &x, Guard::default()).unwrap().len(), 1);
    }
}

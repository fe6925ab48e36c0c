//! Finite sets and maps between them.
//!
//! Elements of a [`FiniteSet`] are the indices `0..size`. Every derived set
//! (pullback apex, pushout, hom-set) fixes a deterministic element order, so
//! two constructions that agree up to canonical isomorphism compare equal.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::{sat_pow, Guard};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct FiniteSet {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawSet {
    size: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawSet> for FiniteSet {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        match raw.labels {
            Some(labels) => FiniteSet::labelled(labels).and_then(|s| {
                if s.size == raw.size {
                    Ok(s)
                } else {
                    Err(Error::shape(format!(
                        "set declares size {} but has {} labels",
                        raw.size, s.size
                    )))
                }
            }),
            None => Ok(FiniteSet::new(raw.size)),
        }
    }
}

impl FiniteSet {
    pub fn new(size: usize) -> Self {
        FiniteSet { size, labels: None }
    }

    pub fn labelled(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::shape(format!("duplicate label `{l}`")));
            }
        }
        Ok(FiniteSet {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn empty() -> Self {
        FiniteSet::new(0)
    }

    pub fn point() -> Self {
        FiniteSet::new(1)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(ls) => ls[x].clone(),
            None => x.to_string(),
        }
    }

    /// Disjoint union with `self`'s elements first.
    pub fn coproduct(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet::new(self.size + other.size)
    }
}

/// A map of finite sets stored as a table of codomain indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct FiniteMap {
    pub dom: FiniteSet,
    pub cod: FiniteSet,
    pub table: Vec<usize>,
}

#[derive(Deserialize)]
struct RawMap {
    dom: FiniteSet,
    cod: FiniteSet,
    table: Vec<usize>,
}

impl TryFrom<RawMap> for FiniteMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        FiniteMap::new(raw.dom, raw.cod, raw.table)
    }
}

impl FiniteMap {
    pub fn new(dom: FiniteSet, cod: FiniteSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.size {
            return Err(Error::shape(format!(
                "table has {} entries but domain has size {}",
                table.len(),
                dom.size
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.size) {
            return Err(Error::OutOfRange {
                index: bad,
                size: cod.size,
            });
        }
        Ok(FiniteMap { dom, cod, table })
    }

    /// Map from an unlabelled domain of size `table.len()`.
    pub fn from_table(cod_size: usize, table: Vec<usize>) -> Result<Self> {
        FiniteMap::new(FiniteSet::new(table.len()), FiniteSet::new(cod_size), table)
    }

    pub(crate) fn raw(cod_size: usize, table: Vec<usize>) -> Self {
        debug_assert!(table.iter().all(|&y| y < cod_size));
        FiniteMap {
            dom: FiniteSet::new(table.len()),
            cod: FiniteSet::new(cod_size),
            table,
        }
    }

    pub fn identity(set: &FiniteSet) -> Self {
        FiniteMap {
            dom: set.clone(),
            cod: set.clone(),
            table: (0..set.size).collect(),
        }
    }

    pub fn constant(dom_size: usize, cod_size: usize, value: usize) -> Result<Self> {
        FiniteMap::from_table(cod_size, vec![value; dom_size])
    }

    /// The unique map out of the empty set.
    pub fn initial(cod: &FiniteSet) -> Self {
        FiniteMap {
            dom: FiniteSet::empty(),
            cod: cod.clone(),
            table: Vec::new(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn dom_size(&self) -> usize {
        self.dom.size
    }

    pub fn cod_size(&self) -> usize {
        self.cod.size
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size];
        for &y in &self.table {
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size];
        for &y in &self.table {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.size == self.cod.size && self.is_injective()
    }

    pub fn inverse(&self) -> Result<FiniteMap> {
        if !self.is_bijective() {
            return Err(Error::NotBijective("map".into()));
        }
        let mut inv = vec![0; self.cod.size];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        Ok(FiniteMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            table: inv,
        })
    }

    pub fn image(&self) -> Subset {
        let mut members = self.table.clone();
        members.sort_unstable();
        members.dedup();
        Subset {
            ambient: self.cod.clone(),
            members,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FiniteMap) -> Result<FiniteMap> {
        compose(other, self)
    }

    /// Precomputed fibers of the map, indexed by codomain element.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cod.size];
        for (x, &y) in self.table.iter().enumerate() {
            out[y].push(x);
        }
        out
    }

    /// Restriction to a subset of the domain, as a map out of that subset.
    pub fn restrict(&self, sub: &Subset) -> FiniteMap {
        FiniteMap::raw(
            self.cod.size,
            sub.members.iter().map(|&x| self.table[x]).collect(),
        )
    }
}

/// Sorted subset of an ambient finite set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subset {
    pub ambient: FiniteSet,
    pub members: Vec<usize>,
}

impl Subset {
    pub fn new(ambient: FiniteSet, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::shape("subset has repeated members"));
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= ambient.size) {
            return Err(Error::OutOfRange {
                index: bad,
                size: ambient.size,
            });
        }
        Ok(Subset { ambient, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// The inclusion of the subset into its ambient set.
    pub fn inclusion(&self) -> FiniteMap {
        FiniteMap::raw(self.ambient.size, self.members.clone())
    }
}

/// `g ∘ f`.
pub fn compose(g: &FiniteMap, f: &FiniteMap) -> Result<FiniteMap> {
    if f.cod.size != g.dom.size {
        return Err(Error::shape(format!(
            "cannot compose: codomain of size {} vs domain of size {}",
            f.cod.size, g.dom.size
        )));
    }
    Ok(FiniteMap {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        table: f.table.iter().map(|&x| g.table[x]).collect(),
    })
}

pub fn fiber(f: &FiniteMap, b: usize) -> Result<Subset> {
    if b >= f.cod.size {
        return Err(Error::OutOfRange {
            index: b,
            size: f.cod.size,
        });
    }
    Ok(Subset {
        ambient: f.dom.clone(),
        members: (0..f.dom.size).filter(|&x| f.table[x] == b).collect(),
    })
}

/// A pullback `A ×_C B` with its two projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub apex: FiniteSet,
    pub left: FiniteMap,
    pub right: FiniteMap,
}

/// Pullback of `f: A → C` and `g: B → C`; apex elements are the pairs
/// `(a, b)` with `f(a) = g(b)` in lexicographic order.
pub fn pullback(f: &FiniteMap, g: &FiniteMap) -> Result<Pullback> {
    if f.cod.size != g.cod.size {
        return Err(Error::shape(format!(
            "pullback of maps into sets of size {} and {}",
            f.cod.size, g.cod.size
        )));
    }
    let g_fibers = g.fibers();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (a, &c) in f.table.iter().enumerate() {
        for &b in &g_fibers[c] {
            left.push(a);
            right.push(b);
        }
    }
    let apex = FiniteSet::new(left.len());
    Ok(Pullback {
        left: FiniteMap {
            dom: apex.clone(),
            cod: f.dom.clone(),
            table: left,
        },
        right: FiniteMap {
            dom: apex.clone(),
            cod: g.dom.clone(),
            table: right,
        },
        apex,
    })
}

/// Whether the commuting square
///
/// ```text
///   A --top--> B
///   |          |
/// left       right
///   v          v
///   C --bot--> D
/// ```
///
/// is a pullback: it commutes and `A → C ×_D B` is a bijection.
pub fn is_pullback_square(
    top: &FiniteMap,
    left: &FiniteMap,
    right: &FiniteMap,
    bottom: &FiniteMap,
) -> Result<bool> {
    let via_top = compose(right, top)?;
    let via_left = compose(bottom, left)?;
    if via_top.table != via_left.table {
        return Ok(false);
    }
    let pb = pullback(bottom, right)?;
    if pb.apex.size != left.dom.size {
        return Ok(false);
    }
    let index: HashMap<(usize, usize), usize> = (0..pb.apex.size)
        .map(|k| ((pb.left.table[k], pb.right.table[k]), k))
        .collect();
    let mut hit = vec![false; pb.apex.size];
    for a in 0..left.dom.size {
        match index.get(&(left.table[a], top.table[a])) {
            Some(&k) if !hit[k] => hit[k] = true,
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// A pushout along a monomorphism with its two legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushout {
    pub apex: FiniteSet,
    /// `cod(f) → apex`.
    pub from_f_cod: FiniteMap,
    /// `cod(g) → apex`; injective.
    pub from_g_cod: FiniteMap,
}

/// Pushout of `f: C ↪ A` (injective) and `g: C → D`. The apex is
/// `D ⊔ (A ∖ f(C))`: the elements of `D` first, then the elements of `A`
/// outside the image of `f` in increasing order.
pub fn pushout_mono(f: &FiniteMap, g: &FiniteMap) -> Result<Pushout> {
    if f.dom.size != g.dom.size {
        return Err(Error::shape("pushout legs have different domains"));
    }
    if !f.is_injective() {
        return Err(Error::NotInjective(
            "f (pushouts are only formed along monomorphisms)".into(),
        ));
    }
    let d = g.cod.size;
    let mut preimage = vec![None; f.cod.size];
    for (c, &a) in f.table.iter().enumerate() {
        preimage[a] = Some(c);
    }
    let mut next = d;
    let mut from_f = Vec::with_capacity(f.cod.size);
    for pre in &preimage {
        match pre {
            Some(c) => from_f.push(g.table[*c]),
            None => {
                from_f.push(next);
                next += 1;
            }
        }
    }
    let apex = FiniteSet::new(next);
    Ok(Pushout {
        from_f_cod: FiniteMap {
            dom: f.cod.clone(),
            cod: apex.clone(),
            table: from_f,
        },
        from_g_cod: FiniteMap {
            dom: g.cod.clone(),
            cod: apex.clone(),
            table: (0..d).collect(),
        },
        apex,
    })
}

pub fn equalizer(f: &FiniteMap, g: &FiniteMap) -> Result<Subset> {
    if f.dom.size != g.dom.size || f.cod.size != g.cod.size {
        return Err(Error::shape("equalizer of maps with different shapes"));
    }
    Ok(Subset {
        ambient: f.dom.clone(),
        members: (0..f.dom.size)
            .filter(|&x| f.table[x] == g.table[x])
            .collect(),
    })
}

/// Every map `A → B`, tables in lexicographic order.
pub fn hom_set(a: &FiniteSet, b: &FiniteSet, guard: Guard) -> Result<Vec<FiniteMap>> {
    guard.check("hom-set", sat_pow(b.size as u128, a.size))?;
    let mut out = Vec::new();
    for_each_tuple(&vec![b.size; a.size], |t| {
        out.push(FiniteMap {
            dom: a.clone(),
            cod: b.clone(),
            table: t.to_vec(),
        })
    });
    Ok(out)
}

/// Calls `visit` on every tuple `t` with `t[k] < bounds[k]`, lexicographically.
pub(crate) fn for_each_tuple(bounds: &[usize], mut visit: impl FnMut(&[usize])) {
    if bounds.contains(&0) {
        return;
    }
    let mut cur = vec![0; bounds.len()];
    loop {
        visit(&cur);
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < bounds[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Number of orbits of the group generated by `generators` acting on `0..n`.
///
/// Orbits are the connected components of the graph `x -- g(x)`, found by
/// union-find; the group itself is never enumerated.
pub fn orbit_count(n: usize, generators: &[Vec<usize>]) -> Result<usize> {
    for (k, g) in generators.iter().enumerate() {
        let map = FiniteMap::from_table(n, g.clone())?;
        if !map.is_bijective() {
            return Err(Error::NotBijective(format!("generator {k}")));
        }
    }
    let mut uf = UnionFind::<usize>::new(n);
    for g in generators {
        for (x, &y) in g.iter().enumerate() {
            uf.union(x, y);
        }
    }
    let mut labels = uf.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    Ok(labels.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(cod: usize, t: &[usize]) -> FiniteMap {
        FiniteMap::from_table(cod, t.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let f = map(1, &[0, 0]);
        let id = FiniteMap::identity(&FiniteSet::new(1));
        assert_eq!(compose(&id, &f).unwrap(), f);
        let g = map(3, &[2]);
        assert_eq!(compose(&g, &f).unwrap().table, vec![2, 2]);
        assert!(compose(&f, &g).is_err());
    }

    #[test]
    fn fiber_examples() {
        let id = FiniteMap::identity(&FiniteSet::new(3));
        assert_eq!(fiber(&id, 1).unwrap().members, vec![1]);
        assert_eq!(fiber(&map(1, &[0, 0, 0]), 0).unwrap().members, vec![0, 1, 2]);
        assert_eq!(fiber(&map(2, &[0, 1, 0]), 0).unwrap().members, vec![0, 2]);
        assert!(matches!(
            fiber(&map(2, &[0, 1, 0]), 2),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn pullback_examples() {
        let pb = pullback(&map(1, &[0, 0]), &map(1, &[0, 0, 0])).unwrap();
        assert_eq!(pb.apex.size, 6);
        let f = map(2, &[0, 1]);
        let id = FiniteMap::identity(&FiniteSet::new(2));
        let pb = pullback(&f, &id).unwrap();
        assert_eq!(pb.apex.size, 2);
        assert_eq!(pb.left.table, vec![0, 1]);
        let pb = pullback(&map(2, &[0, 1]), &map(2, &[0, 0, 1])).unwrap();
        let pairs: Vec<_> = pb.left.table.iter().zip(&pb.right.table).map(|(a, b)| (*a, *b)).collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 2)]);
        assert!(pullback(&map(2, &[0]), &map(3, &[0])).is_err());
    }

    #[test]
    fn pushout_examples() {
        let e = FiniteSet::empty();
        let po = pushout_mono(&FiniteMap::initial(&FiniteSet::new(2)), &FiniteMap::initial(&FiniteSet::new(3))).unwrap();
        assert_eq!(po.apex.size, 5);
        assert_eq!(po.from_f_cod.table, vec![3, 4]);
        let _ = e;
        let g = map(2, &[1, 0, 1]);
        let id = FiniteMap::identity(&FiniteSet::new(3));
        let po = pushout_mono(&id, &g).unwrap();
        assert_eq!(po.apex.size, 2);
        assert_eq!(po.from_f_cod.table, g.table);
        // one point glued into two 2-element sets
        let po = pushout_mono(&map(2, &[1]), &map(2, &[0])).unwrap();
        assert_eq!(po.apex.size, 3);
        assert_eq!(po.from_f_cod.table, vec![2, 0]);
        assert!(po.from_g_cod.is_injective());
        assert!(matches!(
            pushout_mono(&map(1, &[0, 0]), &map(2, &[0, 1])),
            Err(Error::NotInjective(_))
        ));
    }

    #[test]
    fn equalizer_examples() {
        let f = map(2, &[0, 1, 1]);
        assert_eq!(equalizer(&f, &f).unwrap().members, vec![0, 1, 2]);
        assert!(equalizer(&map(2, &[0, 0]), &map(2, &[1, 1])).unwrap().is_empty());
        assert_eq!(equalizer(&f, &map(2, &[0, 0, 1])).unwrap().members, vec![0, 2]);
        assert!(equalizer(&f, &map(2, &[0])).is_err());
    }

    #[test]
    fn hom_set_examples() {
        let g = Guard::default();
        assert_eq!(hom_set(&FiniteSet::empty(), &FiniteSet::new(4), g).unwrap().len(), 1);
        assert_eq!(hom_set(&FiniteSet::new(2), &FiniteSet::new(2), g).unwrap().len(), 4);
        let maps = hom_set(&FiniteSet::new(3), &FiniteSet::new(2), g).unwrap();
        assert_eq!(maps.len(), 8);
        assert_eq!(maps[1].table, vec![0, 0, 1]);
        assert_eq!(maps[7].table, vec![1, 1, 1]);
        assert!(matches!(
            hom_set(&FiniteSet::new(5), &FiniteSet::new(5), Guard(100)),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit_count(4, &[]).unwrap(), 4);
        assert_eq!(orbit_count(4, &[vec![1, 2, 3, 0]]).unwrap(), 1);
        // coordinate swap on {(0,0),(0,1),(1,0),(1,1)} encoded as 2a+b
        assert_eq!(orbit_count(4, &[vec![0, 2, 1, 3]]).unwrap(), 3);
        assert!(matches!(
            orbit_count(2, &[vec![0, 0]]),
            Err(Error::NotBijective(_))
        ));
    }

    #[test]
    fn labelled_json() {
        let s: FiniteSet = serde_json::from_str(r#"{"size":2,"labels":["a","b"]}"#).unwrap();
        assert_eq!(s.label(1), "b");
        assert!(serde_json::from_str::<FiniteSet>(r#"{"size":2,"labels":["a","a"]}"#).is_err());
        assert!(serde_json::from_str::<FiniteMap>(
            r#"{"dom":{"size":1},"cod":{"size":1},"table":[3]}"#
        )
        .is_err());
    }
}

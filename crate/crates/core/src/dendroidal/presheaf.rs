use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{subtree_between, OmegaMor};
use crate::error::{Error, Result};
use crate::freemonad::{fold_with, Multiplication, PolynomialMonad};
use crate::guard::Guard;
use crate::poly::{hom_poly, Endpoints, PolyMor, Polynomial};
use crate::tree::{canonical_form, corolla, eta, validate_tree, Shape, Tree};

/// `N(M)(T)`: the endofunctor maps from `T` to the underlying polynomial.
pub fn nerve(m: &dyn Multiplication, t: &Tree, guard: Guard) -> Result<Vec<PolyMor>> {
    hom_poly(t.poly(), m.poly(), Endpoints::Endo, guard)
}

type NerveKey = (Vec<usize>, Vec<usize>, Vec<usize>);

fn key(m: &PolyMor) -> NerveKey {
    (m.on_i.table.clone(), m.eps.table.clone(), m.beta.table.clone())
}

/// Pulls one element of `N(M)(f.dst)` back along `f`: each node-subtree is
/// folded through `M`. `None` when a fold leaves a truncated monad.
fn restrict_one(m: &dyn Multiplication, f: &OmegaMor, phi: &PolyMor) -> Result<Option<NerveKey>> {
    let (t, s) = (&f.dst, &f.src);
    let q = m.poly().clone();
    let op = |b: usize| -> Result<(usize, Vec<usize>)> {
        Ok((
            phi.beta.table[b],
            t.poly().fiber(b).iter().map(|&e| q.fiber_position(phi.eps.table[e])).collect(),
        ))
    };
    let colour = |i: usize| phi.on_i.table[i];
    let mut beta = Vec::with_capacity(s.nodes());
    let mut eps = vec![0; s.poly().e().size];
    for (v, st) in f.node_images.iter().enumerate() {
        let (r, leaves) = match fold_with(m, &st.term(t), &op, &colour) {
            Ok(x) => x,
            Err(Error::OutsideTruncation(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        for (&x, e) in s.poly().fiber(v).iter().zip(s.inputs(v)) {
            let pos = st.leaves.iter().position(|&l| l == f.edge_map.table[e]).expect("leaf of the node image");
            eps[x] = leaves[pos];
        }
        beta.push(r);
    }
    let on_i = f.edge_map.table.iter().map(|&e| phi.on_i.table[e]).collect();
    Ok(Some((on_i, eps, beta)))
}

/// `N(M)(f): N(M)(f.dst) → N(M)(f.src)`, with `None` where the monad is
/// only partially defined.
pub fn nerve_restrict_partial(m: &dyn Multiplication, f: &OmegaMor, guard: Guard) -> Result<Vec<Option<usize>>> {
    let index: HashMap<NerveKey, usize> =
        nerve(m, &f.src, guard)?.iter().enumerate().map(|(k, x)| (key(x), k)).collect();
    restrict_with_index(m, f, &nerve(m, &f.dst, guard)?, &index)
}

fn restrict_with_index(
    m: &dyn Multiplication,
    f: &OmegaMor,
    dst_values: &[PolyMor],
    index: &HashMap<NerveKey, usize>,
) -> Result<Vec<Option<usize>>> {
    dst_values
        .iter()
        .map(|phi| {
            Ok(match restrict_one(m, f, phi)? {
                None => None,
                Some(k) => Some(
                    *index
                        .get(&k)
                        .ok_or_else(|| Error::inconsistent("restriction is not an endofunctor map"))?,
                ),
            })
        })
        .collect()
}

/// Total version of [`nerve_restrict_partial`].
pub fn nerve_restrict(m: &dyn Multiplication, f: &OmegaMor, guard: Guard) -> Result<Vec<usize>> {
    nerve_restrict_partial(m, f, guard)?
        .into_iter()
        .map(|x| x.ok_or_else(|| Error::OutsideTruncation("restriction leaves the truncation".into())))
        .collect()
}

/// Restriction along a morphism `source → target` of the domain:
/// `table[x]` is the image of `x ∈ Φ(target)` in `Φ(source)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    pub target: usize,
    pub source: usize,
    pub edge_map: Vec<usize>,
    pub table: Vec<Option<usize>>,
}

/// A set-valued presheaf on a finite list of trees, with restrictions along
/// the listed morphisms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PresheafJson", into = "PresheafJson")]
pub struct Presheaf {
    pub trees: Vec<Tree>,
    pub values: Vec<usize>,
    pub restrictions: Vec<Restriction>,
    index: HashMap<(usize, usize, Vec<usize>), usize>,
}

#[derive(Serialize, Deserialize)]
struct PresheafJson {
    trees: Vec<Polynomial>,
    values: Vec<usize>,
    restrictions: Vec<Restriction>,
}

impl TryFrom<PresheafJson> for Presheaf {
    type Error = Error;

    fn try_from(raw: PresheafJson) -> Result<Self> {
        let trees = raw.trees.iter().map(validate_tree).collect::<Result<Vec<_>>>()?;
        Presheaf::new(trees, raw.values, raw.restrictions)
    }
}

impl From<Presheaf> for PresheafJson {
    fn from(p: Presheaf) -> Self {
        PresheafJson {
            trees: p.trees.iter().map(|t| t.poly().clone()).collect(),
            values: p.values,
            restrictions: p.restrictions,
        }
    }
}

impl Presheaf {
    pub fn new(trees: Vec<Tree>, values: Vec<usize>, restrictions: Vec<Restriction>) -> Result<Self> {
        if trees.len() != values.len() {
            return Err(Error::shape("one value set per tree"));
        }
        let mut index = HashMap::new();
        for (k, r) in restrictions.iter().enumerate() {
            let (Some(t), Some(s)) = (trees.get(r.target), trees.get(r.source)) else {
                return Err(Error::OutOfRange {
                    index: r.target.max(r.source),
                    size: trees.len(),
                });
            };
            OmegaMor::from_edge_map(s, t, r.edge_map.clone())?;
            if r.table.len() != values[r.target] || r.table.iter().flatten().any(|&y| y >= values[r.source]) {
                return Err(Error::shape("restriction table does not fit its value sets"));
            }
            index.insert((r.target, r.source, r.edge_map.clone()), k);
        }
        Ok(Presheaf {
            trees,
            values,
            restrictions,
            index,
        })
    }

    pub fn tree_index(&self, t: &Tree) -> Option<usize> {
        self.trees.iter().position(|x| x == t)
    }

    fn require_tree(&self, t: &Tree) -> Result<usize> {
        self.tree_index(t)
            .ok_or_else(|| Error::MissingDomain(format!("tree {} is not in the domain", canonical_form(t))))
    }

    /// The restriction along `source → target` with the given edge map.
    pub fn restriction(&self, target: usize, source: usize, edge_map: &[usize]) -> Result<&Restriction> {
        self.index
            .get(&(target, source, edge_map.to_vec()))
            .map(|&k| &self.restrictions[k])
            .ok_or_else(|| Error::MissingDomain(format!("no restriction {source} → {target} along {edge_map:?}")))
    }

    /// Adds a copy of element `x` of `Φ(trees[t])` with the same restrictions.
    pub fn with_duplicate(&self, t: usize, x: usize) -> Result<Presheaf> {
        if x >= self.values[t] {
            return Err(Error::OutOfRange {
                index: x,
                size: self.values[t],
            });
        }
        let mut values = self.values.clone();
        let fresh = values[t];
        values[t] += 1;
        let mut restrictions = self.restrictions.clone();
        for r in &mut restrictions {
            if r.target == t {
                let identity = r.source == t && r.edge_map.iter().enumerate().all(|(k, &e)| k == e);
                let image = if identity { Some(fresh) } else { r.table[x] };
                r.table.push(image);
            }
        }
        Presheaf::new(self.trees.clone(), values, restrictions)
    }
}

/// The edge inclusions `η → T` and node inclusions `C_n → T` of each tree,
/// as edge maps into the domain's own `η` and corollas.
pub fn inert_generators(trees: &[Tree]) -> Result<Vec<OmegaMor>> {
    let mut out = Vec::new();
    let e = eta();
    for t in trees {
        for edge in 0..t.edges() {
            out.push(OmegaMor::from_edge_map(&e, t, vec![edge])?);
        }
        for v in 0..t.nodes() {
            let mut map = vec![t.output(v)];
            map.extend(t.inputs(v));
            out.push(OmegaMor::from_edge_map(&corolla(t.arity(v)), t, map)?);
        }
    }
    Ok(out)
}

/// `trees` together with `η` and every corolla occurring as a node.
pub fn segal_domain(trees: &[Tree]) -> Vec<Tree> {
    let mut out = vec![eta()];
    let mut push = |t: Tree| {
        if !out.contains(&t) {
            out.push(t);
        }
    };
    for t in trees {
        for v in 0..t.nodes() {
            push(corolla(t.arity(v)));
        }
    }
    for t in trees {
        push(t.clone());
    }
    out
}

/// The nerve of `m` on a finite domain, restricted along `maps`.
pub fn nerve_presheaf(m: &dyn Multiplication, trees: &[Tree], maps: &[OmegaMor], guard: Guard) -> Result<Presheaf> {
    let values: Vec<Vec<PolyMor>> = trees.iter().map(|t| nerve(m, t, guard)).collect::<Result<_>>()?;
    let indices: Vec<HashMap<NerveKey, usize>> = values
        .iter()
        .map(|vs| vs.iter().enumerate().map(|(k, x)| (key(x), k)).collect())
        .collect();
    let find = |t: &Tree| {
        trees
            .iter()
            .position(|x| x == t)
            .ok_or_else(|| Error::MissingDomain(format!("tree {} is not in the domain", canonical_form(t))))
    };
    let mut restrictions = Vec::with_capacity(maps.len());
    for f in maps {
        let (target, source) = (find(&f.dst)?, find(&f.src)?);
        restrictions.push(Restriction {
            target,
            source,
            edge_map: f.edge_map.table.clone(),
            table: restrict_with_index(m, f, &values[target], &indices[source])?,
        });
    }
    Presheaf::new(trees.to_vec(), values.iter().map(Vec::len).collect(), restrictions)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegalReport {
    pub segal: bool,
    pub value_size: usize,
    pub limit_size: usize,
    pub witness: Option<String>,
}

/// Compares `Φ(T)` with the limit over its elements: compatible families of
/// values on the nodes, matched along inner edges.
pub fn segal_check(phi: &Presheaf, t: &Tree, guard: Guard) -> Result<SegalReport> {
    let ti = phi.require_tree(t)?;
    let value_size = phi.values[ti];
    if t.nodes() <= 1 {
        return Ok(SegalReport {
            segal: true,
            value_size,
            limit_size: value_size,
            witness: None,
        });
    }
    let e = phi.require_tree(&eta())?;
    // per node: its corolla, its restriction from T and the corolla's edge restrictions
    struct NodeData<'a> {
        from_t: &'a Restriction,
        edges: Vec<&'a Restriction>,
        size: usize,
    }
    let mut nodes = Vec::with_capacity(t.nodes());
    for v in 0..t.nodes() {
        let c = corolla(t.arity(v));
        let ci = phi.require_tree(&c)?;
        let mut map = vec![t.output(v)];
        map.extend(t.inputs(v));
        let edges = (0..c.edges())
            .map(|k| phi.restriction(ci, e, &[k]))
            .collect::<Result<Vec<_>>>()?;
        nodes.push(NodeData {
            from_t: phi.restriction(ti, ci, &map)?,
            edges,
            size: phi.values[ci],
        });
    }
    // parent node and input position for every non-root node
    let parent: Vec<Option<(usize, usize)>> = (0..t.nodes()).map(|v| t.consumer(t.output(v))).collect();
    let mut order = Vec::new();
    let mut stack = vec![t.root()];
    while let Some(edge) = stack.pop() {
        if let Some(v) = t.producer(edge) {
            order.push(v);
            stack.extend(t.inputs(v).into_iter().rev());
        }
    }

    let mut limit: Vec<Vec<usize>> = Vec::new();
    let mut choice = vec![usize::MAX; t.nodes()];
    fn search(
        depth: usize,
        order: &[usize],
        nodes: &[NodeData<'_>],
        parent: &[Option<(usize, usize)>],
        choice: &mut Vec<usize>,
        limit: &mut Vec<Vec<usize>>,
        guard: Guard,
    ) -> Result<()> {
        let Some(&v) = order.get(depth) else {
            guard.check("Segal limit", limit.len() as u128 + 1)?;
            limit.push(choice.clone());
            return Ok(());
        };
        for x in 0..nodes[v].size {
            if let Some((u, k)) = parent[v] {
                let below = nodes[u].edges[k + 1].table[choice[u]];
                let above = nodes[v].edges[0].table[x];
                if below.is_none() || below != above {
                    continue;
                }
            }
            choice[v] = x;
            search(depth + 1, order, nodes, parent, choice, limit, guard)?;
        }
        Ok(())
    }
    search(0, &order, &nodes, &parent, &mut choice, &mut limit, guard)?;

    let lookup: HashMap<&Vec<usize>, usize> = limit.iter().enumerate().map(|(k, x)| (x, k)).collect();
    let mut hit = vec![None; limit.len()];
    let mut witness = None;
    for x in 0..value_size {
        let image: Option<Vec<usize>> = nodes.iter().map(|n| n.from_t.table[x]).collect();
        let Some(image) = image else {
            witness = Some(format!("element {x} has an undefined node restriction"));
            break;
        };
        let Some(&k) = lookup.get(&image) else {
            witness = Some(format!("element {x} restricts to an incompatible family"));
            break;
        };
        if let Some(y) = hit[k] {
            witness = Some(format!("elements {y} and {x} have the same node restrictions {image:?}"));
            break;
        }
        hit[k] = Some(x);
    }
    if witness.is_none() {
        if let Some(k) = hit.iter().position(Option::is_none) {
            witness = Some(format!("compatible family {:?} has no preimage", limit[k]));
        }
    }
    Ok(SegalReport {
        segal: witness.is_none(),
        value_size,
        limit_size: limit.len(),
        witness,
    })
}

fn two_level(m: usize) -> Tree {
    Tree::from_shape(&Shape::Node(vec![Shape::Node(vec![Shape::Leaf; m])]))
}

/// Leaves of `t` from left to right.
fn leaves_in_order(t: &Tree) -> Vec<usize> {
    subtree_between(t, t.root(), &t.leaves().members)
        .expect("a tree spans its own leaves")
        .leaves
}

/// The active map `C_n → t` onto the whole tree.
fn active_onto(t: &Tree) -> Result<OmegaMor> {
    let leaves = leaves_in_order(t);
    let mut map = vec![t.root()];
    map.extend(&leaves);
    OmegaMor::from_edge_map(&corolla(leaves.len()), t, map)
}

/// The trees and morphisms a presheaf must carry for [`segal_to_monad`]
/// to rebuild a monad whose operations have arity at most `k`. Only `k ≤ 1`
/// is supported: for larger arities `Φ(C_n)` also records the input
/// orderings, which the reconstruction does not quotient out.
pub fn segal_to_monad_requirements(k: usize) -> Result<(Vec<Tree>, Vec<OmegaMor>)> {
    if k > 1 {
        return Err(Error::shape("monads are rebuilt from arities 0 and 1 only"));
    }
    let mut trees = vec![eta()];
    trees.extend((0..=k).map(corolla));
    if k == 1 {
        trees.extend([two_level(0), two_level(1)]);
    }
    let mut maps = inert_generators(&trees)?;
    if k == 1 {
        maps.push(OmegaMor::from_edge_map(&corolla(1), &eta(), vec![0, 0])?);
        maps.push(active_onto(&two_level(0))?);
        maps.push(active_onto(&two_level(1))?);
    }
    Ok((trees, maps))
}

/// Rebuilds a monad from a Segal presheaf carrying the data listed by
/// [`segal_to_monad_requirements`]`(1)`. Fails unless the result satisfies
/// the monad laws.
pub fn segal_to_monad(phi: &Presheaf, guard: Guard) -> Result<PolynomialMonad> {
    let (trees, _) = segal_to_monad_requirements(1)?;
    for t in &trees {
        let report = segal_check(phi, t, guard)?;
        if !report.segal {
            return Err(Error::NotSegal(report.witness.unwrap_or_default()));
        }
    }
    let [e, c0, c1, g0, g1] = [0, 1, 2, 3, 4].map(|k| phi.require_tree(&trees[k]));
    let (e, c0, c1, g0, g1) = (e?, c0?, c1?, g0?, g1?);
    let colours = phi.values[e];
    let total = |r: &Restriction, x: usize| {
        r.table[x].ok_or_else(|| Error::MissingDomain(format!("restriction {} → {} undefined", r.source, r.target)))
    };

    let n0 = phi.values[c0];
    let mut ops = Vec::new();
    for x in 0..n0 {
        ops.push((vec![], total(phi.restriction(c0, e, &[0])?, x)?));
    }
    for x in 0..phi.values[c1] {
        let out = total(phi.restriction(c1, e, &[0])?, x)?;
        let input = total(phi.restriction(c1, e, &[1])?, x)?;
        ops.push((vec![input], out));
    }
    let p = Polynomial::from_operations(colours, colours, &ops)?;

    let collapse = phi.restriction(e, c1, &[0, 0])?;
    let unit_ops = (0..colours).map(|i| Ok(n0 + total(collapse, i)?)).collect::<Result<Vec<_>>>()?;

    // for each two-level tree: node restrictions and the active restriction
    let mut grafts = Vec::new();
    for (gi, ci) in [(g0, c0), (g1, c1)] {
        let g = &phi.trees[gi];
        let low = g.producer(g.root()).expect("two-level tree has a root node");
        let mid = g.inputs(low)[0];
        let high = g.producer(mid).expect("two-level tree has an upper node");
        let mut high_map = vec![mid];
        high_map.extend(g.inputs(high));
        let active = active_onto(g)?;
        grafts.push((
            phi.restriction(gi, c1, &[g.root(), mid])?,
            phi.restriction(gi, ci, &high_map)?,
            phi.restriction(gi, ci, &active.edge_map.table)?,
            phi.values[gi],
        ));
    }
    let mult = |c: usize, inner: &[usize]| -> Option<usize> {
        if c < n0 {
            return Some(c);
        }
        let x = c - n0;
        let y = inner[0];
        let (m, y_local, offset) = if y < n0 { (0, y, 0) } else { (1, y - n0, n0) };
        let (low, high, active, size) = grafts[m];
        let found: Vec<usize> =
            (0..size).filter(|&z| low.table[z] == Some(x) && high.table[z] == Some(y_local)).collect();
        match found.as_slice() {
            [z] => active.table[*z].map(|r| offset + r),
            _ => None,
        }
    };
    let monad = PolynomialMonad::from_operations(p, &unit_ops, mult)?;
    if !monad.laws_verified() {
        return Err(Error::inconsistent("rebuilt structure fails the monad laws"));
    }
    Ok(monad)
}

/// Counts the natural transformations `Φ → Ψ` between presheaves on the
/// same domain with the same restriction morphisms.
pub fn presheaf_maps(phi: &Presheaf, psi: &Presheaf, guard: Guard) -> Result<u64> {
    if phi.trees != psi.trees {
        return Err(Error::shape("presheaves on different domains"));
    }
    let pairs: Vec<(&Restriction, &Restriction)> = phi
        .restrictions
        .iter()
        .map(|r| Ok((r, psi.restriction(r.target, r.source, &r.edge_map)?)))
        .collect::<Result<_>>()?;
    // variables are (tree, element), trees in domain order
    let vars: Vec<(usize, usize)> =
        (0..phi.trees.len()).flat_map(|t| (0..phi.values[t]).map(move |x| (t, x))).collect();
    let mut assign: Vec<Vec<Option<usize>>> = phi.values.iter().map(|&n| vec![None; n]).collect();

    fn consistent(pairs: &[(&Restriction, &Restriction)], assign: &[Vec<Option<usize>>], t: usize, x: usize) -> bool {
        pairs.iter().all(|(r, s)| {
            let check = |tx: usize| -> bool {
                let Some(img) = assign[r.target][tx] else { return true };
                match r.table[tx] {
                    None => true,
                    Some(y) => match assign[r.source][y] {
                        None => true,
                        Some(z) => s.table[img] == Some(z),
                    },
                }
            };
            if r.target == t && !check(x) {
                return false;
            }
            if r.source == t {
                return (0..r.table.len()).filter(|&tx| r.table[tx] == Some(x)).all(check);
            }
            true
        })
    }

    fn go(
        k: usize,
        vars: &[(usize, usize)],
        psi: &Presheaf,
        pairs: &[(&Restriction, &Restriction)],
        assign: &mut Vec<Vec<Option<usize>>>,
        count: &mut u64,
        guard: Guard,
    ) -> Result<()> {
        let Some(&(t, x)) = vars.get(k) else {
            *count += 1;
            return guard.check("presheaf maps", *count as u128);
        };
        for y in 0..psi.values[t] {
            assign[t][x] = Some(y);
            if consistent(pairs, assign, t, x) {
                go(k + 1, vars, psi, pairs, assign, count, guard)?;
            }
        }
        assign[t][x] = None;
        Ok(())
    }
    let mut count = 0;
    go(0, &vars, psi, &pairs, &mut assign, &mut count, guard)?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemonad::{identity_monad, maybe_monad, monad_iso, monad_maps, FreeTruncation};
    use crate::tree::{enumerate_trees, linear};

    #[test]
    fn nerve_examples() {
        let g = Guard::default();
        let m = maybe_monad();
        assert_eq!(nerve(&m, &eta(), g).unwrap().len(), 1);
        assert_eq!(nerve(&m, &corolla(1), g).unwrap().len(), 1);
        let z2 = PolynomialMonad::from_operations(Polynomial::one_colour(&[1, 1]), &[0], |c, phi| Some(c ^ phi[0]))
            .unwrap();
        assert_eq!(nerve(&z2, &linear(2), g).unwrap().len(), 4);
    }

    #[test]
    fn maybe_nerve_is_segal_and_round_trips() {
        let g = Guard::default();
        let m = maybe_monad();
        let trees = segal_domain(&enumerate_trees(3, 2, g).unwrap());
        let maps = inert_generators(&trees).unwrap();
        let phi = nerve_presheaf(&m, &trees, &maps, g).unwrap();
        for t in &trees {
            assert!(segal_check(&phi, t, g).unwrap().segal, "{}", canonical_form(t));
        }

        let (trees, maps) = segal_to_monad_requirements(1).unwrap();
        let phi = nerve_presheaf(&m, &trees, &maps, g).unwrap();
        let back = segal_to_monad(&phi, g).unwrap();
        assert!(monad_iso(&back, &m, g).unwrap().is_some());
        let back = segal_to_monad(&nerve_presheaf(&identity_monad(1), &trees, &maps, g).unwrap(), g).unwrap();
        assert!(monad_iso(&back, &identity_monad(1), g).unwrap().is_some());
    }

    #[test]
    fn padded_presheaf_fails() {
        let g = Guard::default();
        let trees = segal_domain(&[linear(2)]);
        let maps = inert_generators(&trees).unwrap();
        let phi = nerve_presheaf(&maybe_monad(), &trees, &maps, g).unwrap();
        let t = phi.tree_index(&linear(2)).unwrap();
        let padded = phi.with_duplicate(t, 0).unwrap();
        let r = segal_check(&padded, &linear(2), g).unwrap();
        assert!(!r.segal && r.witness.is_some());
        assert_eq!((r.value_size, r.limit_size), (2, 1));
    }

    #[test]
    fn truncation_nerve_is_segal() {
        let g = Guard::default();
        let m = FreeTruncation::new(&Polynomial::one_colour(&[0, 2]), 2, g).unwrap();
        let trees = segal_domain(&enumerate_trees(3, 2, g).unwrap());
        let maps = inert_generators(&trees).unwrap();
        let phi = nerve_presheaf(&m, &trees, &maps, g).unwrap();
        for t in &trees {
            assert!(segal_check(&phi, t, g).unwrap().segal, "{}", canonical_form(t));
        }
    }

    #[test]
    fn monad_maps_match_presheaf_maps() {
        let g = Guard::default();
        let z2 = PolynomialMonad::from_operations(Polynomial::one_colour(&[1, 1]), &[0], |c, phi| Some(c ^ phi[0]))
            .unwrap();
        let (trees, maps) = segal_to_monad_requirements(1).unwrap();
        for (a, b) in [(&z2, &z2), (&maybe_monad(), &maybe_monad()), (&identity_monad(1), &z2)] {
            let expected = monad_maps(a, b, g).unwrap().len() as u64;
            let na = nerve_presheaf(a, &trees, &maps, g).unwrap();
            let nb = nerve_presheaf(b, &trees, &maps, g).unwrap();
            assert_eq!(presheaf_maps(&na, &nb, g).unwrap(), expected);
        }
    }
}

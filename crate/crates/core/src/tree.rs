//! Trees as polynomial endofunctors `A ← M → N → A`.
//!
//! `A` are the edges, `N` the nodes, `M` the pairs (node, incoming edge);
//! `s` sends such a pair to the edge and `t` sends a node to its outgoing
//! edge. Leaves are the edges that are not the output of any node.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{pushout_mono, FiniteMap, FiniteSet, Subset};
use crate::guard::Guard;
use crate::poly::{hom_poly, Endpoints, PolyMor, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    poly: Arc<Polynomial>,
    root: usize,
    sigma: FiniteMap,
    height: usize,
    leaves: Subset,
    producer: Vec<Option<usize>>,
    consumer: Vec<Option<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    #[serde(flatten)]
    poly: Polynomial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    leaves: Option<Vec<usize>>,
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        TreeJson {
            poly: (*self.poly).clone(),
            root: Some(self.root),
            height: Some(self.height),
            leaves: Some(self.leaves.members.clone()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TreeJson::deserialize(de)?;
        let tree = validate_tree(&raw.poly).map_err(D::Error::custom)?;
        let mismatch = |what: &str| D::Error::custom(format!("cached {what} disagrees with the tree"));
        if raw.root.is_some_and(|r| r != tree.root) {
            return Err(mismatch("root"));
        }
        if raw.height.is_some_and(|h| h != tree.height) {
            return Err(mismatch("height"));
        }
        if raw.leaves.as_ref().is_some_and(|l| *l != tree.leaves.members) {
            return Err(mismatch("leaves"));
        }
        Ok(tree)
    }
}

/// Checks the tree axioms and caches root, successor map, height and leaves.
///
/// Axioms are reported by number: (1) `I = J`, (2) `t` injective,
/// (3) `s` injective with exactly one edge outside its image (the root),
/// (4) iterating the successor map reaches the root from every edge.
pub fn validate_tree(p: &Polynomial) -> Result<Tree> {
    let axiom = |axiom: u8, detail: String| Error::TreeAxiom { axiom, detail };
    if !p.is_endo_shaped() {
        return Err(axiom(1, format!("I has {} elements but J has {}", p.i().size, p.j().size)));
    }
    let na = p.i().size;
    if !p.t().is_injective() {
        return Err(axiom(2, "two nodes share an outgoing edge".into()));
    }
    if !p.s().is_injective() {
        return Err(axiom(3, "an edge is an input of two nodes".into()));
    }
    let mut consumer = vec![None; na];
    for m in 0..p.e().size {
        consumer[p.s().table[m]] = Some((p.p().table[m], p.fiber_position(m)));
    }
    let roots: Vec<usize> = (0..na).filter(|&a| consumer[a].is_none()).collect();
    if roots.len() != 1 {
        return Err(axiom(3, format!("expected exactly one root edge, found {}", roots.len())));
    }
    let root = roots[0];
    let mut producer = vec![None; na];
    for (n, &a) in p.t().table.iter().enumerate() {
        producer[a] = Some(n);
    }
    let sigma: Vec<usize> = (0..na)
        .map(|a| match consumer[a] {
            Some((n, _)) => p.t().table[n],
            None => a,
        })
        .collect();
    let mut depth = vec![0usize; na];
    for a in 0..na {
        let mut e = a;
        let mut steps = 0;
        while e != root {
            e = sigma[e];
            steps += 1;
            if steps > na {
                return Err(axiom(4, format!("edge {a} never reaches the root")));
            }
        }
        depth[a] = steps;
    }
    let height = (0..p.b().size)
        .map(|n| depth[p.t().table[n]] + 1)
        .max()
        .unwrap_or(0);
    let leaves = Subset::new(
        FiniteSet::new(na),
        (0..na).filter(|&a| producer[a].is_none()).collect(),
    )?;
    Ok(Tree {
        poly: Arc::new(p.clone()),
        root,
        sigma: FiniteMap::raw(na, sigma),
        height,
        leaves,
        producer,
        consumer,
    })
}

/// Nested description of a tree up to isomorphism: a leaf, or a node with
/// its children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn sorted(self) -> Shape {
        match self {
            Shape::Leaf => Shape::Leaf,
            Shape::Node(kids) => {
                let mut kids: Vec<(String, Shape)> = kids
                    .into_iter()
                    .map(|k| {
                        let k = k.sorted();
                        (k.form(), k)
                    })
                    .collect();
                kids.sort();
                Shape::Node(kids.into_iter().map(|(_, k)| k).collect())
            }
        }
    }

    fn form(&self) -> String {
        match self {
            Shape::Leaf => "l".into(),
            Shape::Node(kids) => {
                let mut out = String::from("(");
                kids.iter().for_each(|k| out.push_str(&k.form()));
                out.push(')');
                out
            }
        }
    }

    /// Parses a canonical form string.
    pub fn parse(form: &str) -> Result<Shape> {
        fn go(bytes: &[u8], pos: &mut usize) -> Result<Shape> {
            match bytes.get(*pos) {
                Some(b'l') => {
                    *pos += 1;
                    Ok(Shape::Leaf)
                }
                Some(b'(') => {
                    *pos += 1;
                    let mut kids = Vec::new();
                    while bytes.get(*pos) != Some(&b')') {
                        if *pos >= bytes.len() {
                            return Err(Error::shape("unbalanced tree form"));
                        }
                        kids.push(go(bytes, pos)?);
                    }
                    *pos += 1;
                    Ok(Shape::Node(kids))
                }
                _ => Err(Error::shape(format!("unexpected character in tree form at {}", *pos))),
            }
        }
        let bytes = form.as_bytes();
        let mut pos = 0;
        let shape = go(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::shape("trailing characters in tree form"));
        }
        Ok(shape)
    }
}

/// Recursive child-multiset serialization: `l` for a leaf, `(…)` around the
/// sorted forms of the children for a node. Equal iff trees are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(pub String);

impl std::fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Tree {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }
    pub fn poly_arc(&self) -> &Arc<Polynomial> {
        &self.poly
    }
    pub fn edges(&self) -> usize {
        self.poly.i().size
    }
    pub fn nodes(&self) -> usize {
        self.poly.b().size
    }
    pub fn root(&self) -> usize {
        self.root
    }
    pub fn sigma(&self) -> &FiniteMap {
        &self.sigma
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn leaves(&self) -> &Subset {
        &self.leaves
    }
    pub fn is_leaf(&self, e: usize) -> bool {
        self.producer[e].is_none()
    }

    /// The node whose outgoing edge is `e`.
    pub fn producer(&self, e: usize) -> Option<usize> {
        self.producer[e]
    }

    /// The node having `e` as an input, with the input's position.
    pub fn consumer(&self, e: usize) -> Option<(usize, usize)> {
        self.consumer[e]
    }

    pub fn output(&self, v: usize) -> usize {
        self.poly.t().table[v]
    }

    /// Input edges of `v` in fiber order.
    pub fn inputs(&self, v: usize) -> Vec<usize> {
        self.poly.input_colours(v)
    }

    pub fn arity(&self, v: usize) -> usize {
        self.poly.arity(v)
    }

    /// Number of nodes between `e` and the root.
    pub fn edge_depth(&self, e: usize) -> usize {
        let mut e = e;
        let mut d = 0;
        while e != self.root {
            e = self.sigma.table[e];
            d += 1;
        }
        d
    }

    pub fn shape(&self) -> Shape {
        self.shape_at(self.root)
    }

    /// Shape of the part of the tree above edge `e`.
    pub fn shape_at(&self, e: usize) -> Shape {
        match self.producer[e] {
            None => Shape::Leaf,
            Some(v) => Shape::Node(self.inputs(v).into_iter().map(|c| self.shape_at(c)).collect()),
        }
    }

    /// The tree of a shape, with edges and nodes numbered in depth-first
    /// order from the root and children kept in the given order.
    pub fn from_shape(shape: &Shape) -> Tree {
        fn go(shape: &Shape, edge: usize, next_edge: &mut usize, ops: &mut Vec<(Vec<usize>, usize)>) {
            if let Shape::Node(kids) = shape {
                let slot = ops.len();
                ops.push((Vec::new(), edge));
                let inputs: Vec<usize> = kids
                    .iter()
                    .map(|_| {
                        let e = *next_edge;
                        *next_edge += 1;
                        e
                    })
                    .collect();
                ops[slot].0 = inputs.clone();
                for (k, e) in kids.iter().zip(inputs) {
                    go(k, e, next_edge, ops);
                }
            }
        }
        let mut ops = Vec::new();
        let mut next = 1;
        go(shape, 0, &mut next, &mut ops);
        let p = Polynomial::from_operations(next, next, &ops).expect("well-formed by construction");
        validate_tree(&p).expect("shapes give trees")
    }

    /// Rebuilds the tree from its canonical form, giving a canonical labelling.
    pub fn canonical(&self) -> Tree {
        Tree::from_shape(&self.shape().sorted())
    }
}

pub fn eta() -> Tree {
    validate_tree(&Polynomial::from_operations(1, 1, &[]).expect("η")).expect("η is a tree")
}

/// The corolla with `n` leaves: root edge `0`, leaves `1..=n`.
pub fn corolla(n: usize) -> Tree {
    let p = Polynomial::from_operations(n + 1, n + 1, &[((1..=n).collect(), 0)]).expect("corolla");
    validate_tree(&p).expect("corollas are trees")
}

/// A chain of `k` unary nodes.
pub fn linear(k: usize) -> Tree {
    let mut shape = Shape::Leaf;
    for _ in 0..k {
        shape = Shape::Node(vec![shape]);
    }
    Tree::from_shape(&shape)
}

pub fn canonical_form(t: &Tree) -> CanonicalForm {
    CanonicalForm(t.shape().sorted().form())
}

/// The canonical form of the part of `t` above edge `e`.
pub fn canonical_form_at(t: &Tree, e: usize) -> CanonicalForm {
    CanonicalForm(t.shape_at(e).sorted().form())
}

/// An explicit isomorphism `a → b` when one exists.
pub fn tree_iso(a: &Tree, b: &Tree) -> Option<PolyMor> {
    if canonical_form(a) != canonical_form(b) {
        return None;
    }
    let mut edge_map = vec![0; a.edges()];
    let mut node_map = vec![0; a.nodes()];
    let mut eps = vec![0; a.poly.e().size];
    let mut stack = vec![(a.root, b.root)];
    while let Some((x, y)) = stack.pop() {
        edge_map[x] = y;
        if let (Some(v), Some(w)) = (a.producer(x), b.producer(y)) {
            node_map[v] = w;
            let key = |t: &Tree, e: usize| canonical_form_at(t, e);
            let mut xs: Vec<(CanonicalForm, usize)> = a.inputs(v).into_iter().enumerate().map(|(k, e)| (key(a, e), k)).collect();
            let mut ys: Vec<(CanonicalForm, usize)> = b.inputs(w).into_iter().enumerate().map(|(k, e)| (key(b, e), k)).collect();
            xs.sort();
            ys.sort();
            for ((_, kx), (_, ky)) in xs.into_iter().zip(ys) {
                let mx = a.poly.fiber(v)[kx];
                let my = b.poly.fiber(w)[ky];
                eps[mx] = my;
                stack.push((a.poly.s().table[mx], b.poly.s().table[my]));
            }
        }
    }
    Some(PolyMor::new(a.poly.clone(), b.poly.clone(), edge_map.clone(), edge_map, eps, node_map).expect("iso tables"))
}

/// Self-maps of `t` that are isomorphisms.
pub fn automorphisms(t: &Tree, guard: Guard) -> Result<Vec<PolyMor>> {
    Ok(hom_poly(&t.poly, &t.poly, Endpoints::Endo, guard)?
        .into_iter()
        .filter(|m| m.on_i.is_bijective() && m.beta.is_bijective())
        .collect())
}

/// Grafts the root of `s` onto the leaf `leaf` of `r`. Edges of `r` keep
/// their numbers; the remaining edges of `s` follow in order, as do nodes.
pub fn graft(s: &Tree, r: &Tree, leaf: usize) -> Result<Tree> {
    graft_with_inclusions(s, r, leaf).map(|(t, _, _)| t)
}

/// [`graft`] together with the embeddings `s → T` and `r → T`.
pub fn graft_with_inclusions(s: &Tree, r: &Tree, leaf: usize) -> Result<(Tree, PolyMor, PolyMor)> {
    if leaf >= r.edges() || !r.is_leaf(leaf) {
        return Err(Error::NotALeaf(leaf));
    }
    let f = FiniteMap::from_table(s.edges(), vec![s.root])?;
    let g = FiniteMap::from_table(r.edges(), vec![leaf])?;
    let po = pushout_mono(&f, &g)?;
    let from_s = &po.from_f_cod.table;
    let (rp, sp) = (&*r.poly, &*s.poly);
    let nr = rp.b().size;
    let mr = rp.e().size;
    let mut src = rp.s().table.clone();
    src.extend(sp.s().table.iter().map(|&a| from_s[a]));
    let mut proj = rp.p().table.clone();
    proj.extend(sp.p().table.iter().map(|&n| n + nr));
    let mut tgt = rp.t().table.clone();
    tgt.extend(sp.t().table.iter().map(|&a| from_s[a]));
    let na = po.apex.size;
    let poly = Polynomial::from_tables(na, na, nr + sp.b().size, src, proj, tgt)?;
    let t = validate_tree(&poly)?;
    let s_inc = PolyMor::new(
        s.poly.clone(),
        t.poly.clone(),
        from_s.clone(),
        from_s.clone(),
        (0..sp.e().size).map(|m| m + mr).collect(),
        (0..sp.b().size).map(|n| n + nr).collect(),
    )?;
    let ids = |n: usize| (0..n).collect::<Vec<_>>();
    let r_inc = PolyMor::new(
        r.poly.clone(),
        t.poly.clone(),
        ids(r.edges()),
        ids(r.edges()),
        ids(mr),
        ids(nr),
    )?;
    Ok((t, s_inc, r_inc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Edge,
    Node,
}

/// An elementary subtree: an edge (as `η → T`) or a node (as `C_n → T`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementRef {
    pub kind: ElementKind,
    pub index: usize,
    pub inclusion: PolyMor,
}

/// Where an edge meets a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Incidence {
    /// The edge is the node's output.
    Root,
    /// The edge is the node's input at this position.
    Leaf(usize),
}

#[derive(Clone, Debug)]
pub struct Elements {
    pub edges: Vec<ElementRef>,
    pub nodes: Vec<ElementRef>,
    /// `(node, edge, how)`: the edge element factors through the node element.
    pub incidence: Vec<(usize, usize, Incidence)>,
}

/// Inclusion `η → T` of edge `e`.
pub fn edge_inclusion(t: &Tree, e: usize) -> PolyMor {
    let eta = eta();
    PolyMor::new(eta.poly.clone(), t.poly.clone(), vec![e], vec![e], vec![], vec![])
        .expect("edge inclusion tables")
}

/// Inclusion `C_n → T` of node `v`.
pub fn node_inclusion(t: &Tree, v: usize) -> PolyMor {
    let c = corolla(t.arity(v));
    let mut edges = vec![t.output(v)];
    edges.extend(t.inputs(v));
    PolyMor::new(
        c.poly.clone(),
        t.poly.clone(),
        edges.clone(),
        edges,
        t.poly.fiber(v).to_vec(),
        vec![v],
    )
    .expect("node inclusion tables")
}

pub fn elements(t: &Tree) -> Elements {
    let edges = (0..t.edges())
        .map(|e| ElementRef {
            kind: ElementKind::Edge,
            index: e,
            inclusion: edge_inclusion(t, e),
        })
        .collect();
    let nodes = (0..t.nodes())
        .map(|v| ElementRef {
            kind: ElementKind::Node,
            index: v,
            inclusion: node_inclusion(t, v),
        })
        .collect();
    let mut incidence = Vec::new();
    for v in 0..t.nodes() {
        incidence.push((v, t.output(v), Incidence::Root));
        for (k, e) in t.inputs(v).into_iter().enumerate() {
            incidence.push((v, e, Incidence::Leaf(k)));
        }
    }
    Elements {
        edges,
        nodes,
        incidence,
    }
}

/// Glues the elementary pieces back together by iterated grafting.
pub fn reassemble(el: &Elements) -> Result<Tree> {
    let n_edges = el.edges.len();
    let mut produced_by: Vec<Option<usize>> = vec![None; n_edges];
    let mut inputs: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut consumed = vec![false; n_edges];
    for &(v, e, how) in &el.incidence {
        if v >= el.nodes.len() || e >= n_edges {
            return Err(Error::inconsistent(format!("incidence ({v}, {e}) out of range")));
        }
        match how {
            Incidence::Root => {
                if produced_by[e].replace(v).is_some() {
                    return Err(Error::inconsistent(format!("edge {e} is the output of two nodes")));
                }
            }
            Incidence::Leaf(k) => {
                if consumed[e] {
                    return Err(Error::inconsistent(format!("edge {e} is an input of two nodes")));
                }
                consumed[e] = true;
                if inputs.entry(v).or_default().insert(k, e).is_some() {
                    return Err(Error::inconsistent(format!("node {v} has two inputs at position {k}")));
                }
            }
        }
    }
    for (v, node) in el.nodes.iter().enumerate() {
        let arity = node.inclusion.src.e().size;
        let have = inputs.get(&v).map_or(0, BTreeMap::len);
        if have != arity || !produced_by.contains(&Some(v)) {
            return Err(Error::inconsistent(format!("node {v} has inconsistent incidence")));
        }
    }
    let roots: Vec<usize> = (0..n_edges).filter(|&e| !consumed[e]).collect();
    if roots.len() != 1 {
        return Err(Error::inconsistent(format!("expected one root edge, found {}", roots.len())));
    }
    let mut budget = el.nodes.len() + 1;
    fn build(
        e: usize,
        produced_by: &[Option<usize>],
        inputs: &BTreeMap<usize, BTreeMap<usize, usize>>,
        budget: &mut usize,
    ) -> Result<Tree> {
        let Some(v) = produced_by[e] else {
            return Ok(eta());
        };
        if *budget == 0 {
            return Err(Error::inconsistent("incidence contains a cycle"));
        }
        *budget -= 1;
        let ins: Vec<usize> = inputs.get(&v).map(|m| m.values().copied().collect()).unwrap_or_default();
        let mut t = corolla(ins.len());
        for (k, &c) in ins.iter().enumerate() {
            let sub = build(c, produced_by, inputs, budget)?;
            t = graft(&sub, &t, k + 1)?;
        }
        Ok(t)
    }
    build(roots[0], &produced_by, &inputs, &mut budget)
}

/// One tree per isomorphism class with at most `max_nodes` nodes of arity
/// at most `max_arity`, ordered by node count and then canonical form.
pub fn enumerate_trees(max_nodes: usize, max_arity: usize, guard: Guard) -> Result<Vec<Tree>> {
    let mut out = vec![eta()];
    let mut level: BTreeMap<CanonicalForm, Tree> = BTreeMap::new();
    level.insert(canonical_form(&out[0]), out[0].clone());
    for _ in 0..max_nodes {
        let mut next: BTreeMap<CanonicalForm, Tree> = BTreeMap::new();
        for t in level.values() {
            for &leaf in &t.leaves().members {
                for a in 0..=max_arity {
                    let g = graft(&corolla(a), t, leaf)?;
                    next.entry(canonical_form(&g)).or_insert_with(|| g.canonical());
                }
            }
        }
        guard.check("trees", (out.len() + next.len()) as u128)?;
        out.extend(next.values().cloned());
        level = next;
    }
    Ok(out)
}

/// Tree embeddings `s → t`; every cartesian map between trees is injective,
/// which is checked here.
pub fn embeddings(s: &Tree, t: &Tree, guard: Guard) -> Result<Vec<PolyMor>> {
    let homs = hom_poly(&s.poly, &t.poly, Endpoints::Endo, guard)?;
    if let Some(bad) = homs.iter().find(|m| !m.is_injective()) {
        return Err(Error::inconsistent(format!(
            "non-injective map between trees: edges {:?}",
            bad.on_i.table
        )));
    }
    Ok(homs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::validate_mor;

    #[test]
    fn validate_tree_examples() {
        let e = eta();
        assert_eq!((e.height(), e.leaves().members.clone(), e.root()), (0, vec![0], 0));
        let c2 = corolla(2);
        assert_eq!(c2.height(), 1);
        assert_eq!(c2.leaves().len(), 2);
        let bad_t = Polynomial::from_tables(2, 2, 2, vec![], vec![], vec![0, 0]).unwrap();
        assert!(matches!(validate_tree(&bad_t), Err(Error::TreeAxiom { axiom: 2, .. })));
        let two_roots = Polynomial::from_tables(2, 2, 0, vec![], vec![], vec![]).unwrap();
        assert!(matches!(validate_tree(&two_roots), Err(Error::TreeAxiom { axiom: 3, .. })));
        // a node whose output feeds itself: root exists, but 1 never reaches it
        let cycle = Polynomial::from_tables(2, 2, 1, vec![1], vec![0], vec![1]).unwrap();
        assert!(matches!(validate_tree(&cycle), Err(Error::TreeAxiom { axiom: 4, .. })));
    }

    #[test]
    fn elementary_trees() {
        assert_eq!((eta().edges(), eta().nodes()), (1, 0));
        let c0 = corolla(0);
        assert_eq!((c0.edges(), c0.nodes(), c0.leaves().len(), c0.height()), (1, 1, 0, 1));
        assert_eq!(corolla(3).edges(), 4);
    }

    #[test]
    fn elements_examples() {
        let el = elements(&eta());
        assert_eq!((el.edges.len(), el.nodes.len()), (1, 0));
        let el = elements(&corolla(3));
        assert_eq!((el.edges.len(), el.nodes.len()), (4, 1));
        let el = elements(&linear(2));
        assert_eq!((el.edges.len(), el.nodes.len()), (3, 2));
        assert!(el.nodes.iter().chain(&el.edges).all(|r| validate_mor(&r.inclusion).valid));
        let shared: Vec<usize> = (0..3)
            .filter(|&e| el.incidence.iter().filter(|i| i.1 == e).count() == 2)
            .collect();
        assert_eq!(shared, vec![1]);
    }

    #[test]
    fn graft_examples() {
        let c2 = corolla(2);
        assert_eq!(graft(&eta(), &c2, 1).unwrap(), c2);
        let lin = graft(&corolla(1), &corolla(1), 1).unwrap();
        assert_eq!(lin.height(), 2);
        assert_eq!(canonical_form(&lin), canonical_form(&linear(2)));
        assert!(matches!(graft(&eta(), &c2, 0), Err(Error::NotALeaf(0))));
        let a = graft(&corolla(1), &graft(&corolla(0), &c2, 1).unwrap(), 2).unwrap();
        let b = graft(&corolla(0), &graft(&corolla(1), &c2, 2).unwrap(), 1).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn reassemble_round_trips() {
        for t in [eta(), corolla(0), corolla(3), linear(3)] {
            let back = reassemble(&elements(&t)).unwrap();
            assert_eq!(canonical_form(&back), canonical_form(&t));
        }
        let mut el = elements(&corolla(2));
        el.incidence.pop();
        assert!(reassemble(&el).is_err());
    }

    #[test]
    fn iso_examples() {
        let t = Tree::from_shape(&Shape::Node(vec![Shape::Node(vec![]), Shape::Leaf]));
        let u = Tree::from_shape(&Shape::Node(vec![Shape::Leaf, Shape::Node(vec![])]));
        assert_ne!(t, u);
        let iso = tree_iso(&t, &u).unwrap();
        assert!(validate_mor(&iso).valid);
        assert!(tree_iso(&corolla(2), &linear(2)).is_none());
        assert_eq!(automorphisms(&corolla(2), Guard::default()).unwrap().len(), 2);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_trees(0, 3, Guard::default()).unwrap(), vec![eta()]);
        let forms: Vec<String> = enumerate_trees(1, 2, Guard::default())
            .unwrap()
            .iter()
            .map(|t| canonical_form(t).0)
            .collect();
        assert_eq!(forms, ["l", "()", "(l)", "(ll)"]);
        let two = enumerate_trees(2, 2, Guard::default()).unwrap();
        assert_eq!(two.iter().filter(|t| t.nodes() == 2).count(), 6);
    }

    #[test]
    fn embeddings_examples() {
        let t = Tree::from_shape(&Shape::Node(vec![Shape::Node(vec![Shape::Leaf, Shape::Leaf]), Shape::Leaf]));
        assert_eq!(embeddings(&eta(), &t, Guard::default()).unwrap().len(), t.edges());
        assert_eq!(embeddings(&corolla(2), &t, Guard::default()).unwrap().len(), 4);
        assert!(embeddings(&corolla(1), &eta(), Guard::default()).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let t = linear(2);
        let json = serde_json::to_string(&t).unwrap();
        let back: Tree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["height"] = 7.into();
        assert!(serde_json::from_value::<Tree>(v).is_err());
    }
}

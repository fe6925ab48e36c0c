//! The dendroidal category: morphisms of trees, their active–inert
//! factorization, nerves of polynomial monads and the Segal condition.
//!
//! A morphism `S → T` is stored as a map on edges together with, for every
//! node of `S`, the subtree of `T` it is sent to. The subtree is determined
//! by its root and its leaves, so the edge map alone pins the morphism down;
//! the node images are kept because composition and classification read
//! them directly.

mod presheaf;

pub use presheaf::{
    inert_generators, nerve, nerve_presheaf, nerve_restrict, nerve_restrict_partial, presheaf_maps,
    segal_check, segal_domain, segal_to_monad, segal_to_monad_requirements, Presheaf, Restriction,
    SegalReport,
};

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finset::FiniteMap;
use crate::freemonad::{free_monad_poly, PTerm};
use crate::guard::Guard;
use crate::poly::{PolyMor, Polynomial};
use crate::tree::{tree_iso, validate_tree, Tree};

/// A subtree of a tree, given by its root edge and leaf edges (left to
/// right), with the nodes and edges it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Subtree {
    pub root: usize,
    pub leaves: Vec<usize>,
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Subtree {
    fn eta(e: usize) -> Subtree {
        Subtree {
            root: e,
            leaves: vec![e],
            nodes: Vec::new(),
            edges: vec![e],
        }
    }

    pub fn is_eta(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The subtree as a term over the tree's own polynomial.
    pub fn term(&self, t: &Tree) -> PTerm {
        fn go(t: &Tree, st: &Subtree, e: usize) -> PTerm {
            match t.producer(e) {
                Some(v) if st.nodes.binary_search(&v).is_ok() => {
                    PTerm::Node(v, t.inputs(v).into_iter().map(|c| go(t, st, c)).collect())
                }
                _ => PTerm::Leaf(e),
            }
        }
        go(t, self, self.root)
    }
}

/// The unique subtree with root `root` whose leaves are exactly `leaves`.
pub fn subtree_between(t: &Tree, root: usize, leaves: &[usize]) -> Option<Subtree> {
    let wanted: HashMap<usize, usize> = leaves.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    if wanted.len() != leaves.len() || root >= t.edges() {
        return None;
    }
    let mut st = Subtree {
        root,
        leaves: Vec::new(),
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    fn go(t: &Tree, e: usize, wanted: &HashMap<usize, usize>, st: &mut Subtree) -> bool {
        st.edges.push(e);
        if wanted.contains_key(&e) {
            st.leaves.push(e);
            return true;
        }
        match t.producer(e) {
            None => false,
            Some(v) => {
                st.nodes.push(v);
                t.inputs(v).into_iter().all(|c| go(t, c, wanted, st))
            }
        }
    }
    if !go(t, root, &wanted, &mut st) || st.leaves.len() != leaves.len() {
        return None;
    }
    st.nodes.sort_unstable();
    st.edges.sort_unstable();
    Some(st)
}

/// Every subtree rooted at edge `r`, the bare edge first.
pub fn subtrees_at(t: &Tree, r: usize) -> Vec<Subtree> {
    let mut memo: Vec<Option<Vec<Subtree>>> = vec![None; t.edges()];
    fn go(t: &Tree, e: usize, memo: &mut Vec<Option<Vec<Subtree>>>) -> Vec<Subtree> {
        if let Some(done) = &memo[e] {
            return done.clone();
        }
        let mut out = vec![Subtree::eta(e)];
        if let Some(v) = t.producer(e) {
            let options: Vec<Vec<Subtree>> = t.inputs(v).into_iter().map(|c| go(t, c, memo)).collect();
            for pick in options.iter().map(|o| o.iter()).multi_cartesian_product() {
                let mut st = Subtree {
                    root: e,
                    leaves: Vec::new(),
                    nodes: vec![v],
                    edges: vec![e],
                };
                for s in pick {
                    st.leaves.extend(&s.leaves);
                    st.nodes.extend(&s.nodes);
                    st.edges.extend(&s.edges);
                }
                st.nodes.sort_unstable();
                st.edges.sort_unstable();
                out.push(st);
            }
            if t.arity(v) == 0 {
                out.push(Subtree {
                    root: e,
                    leaves: Vec::new(),
                    nodes: vec![v],
                    edges: vec![e],
                });
            }
        }
        memo[e] = Some(out.clone());
        out
    }
    go(t, r, &mut memo)
}

/// A morphism of the dendroidal category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaMor {
    pub src: Tree,
    pub dst: Tree,
    pub edge_map: FiniteMap,
    /// For each node of `src`, the subtree of `dst` it is sent to; its root is
    /// the image of the node's output and its leaves are the images of the
    /// node's inputs.
    pub node_images: Vec<Subtree>,
}

impl OmegaMor {
    /// Checks that every node has a subtree image and returns the morphism.
    pub fn from_edge_map(src: &Tree, dst: &Tree, edge_map: Vec<usize>) -> Result<OmegaMor> {
        if edge_map.len() != src.edges() {
            return Err(Error::shape("edge map must cover every edge of the source"));
        }
        let node_images = (0..src.nodes())
            .map(|v| {
                let leaves: Vec<usize> = src.inputs(v).into_iter().map(|e| edge_map[e]).collect();
                subtree_between(dst, edge_map[src.output(v)], &leaves).ok_or_else(|| {
                    Error::inconsistent(format!("node {v} has no subtree with the required boundary"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OmegaMor {
            src: src.clone(),
            dst: dst.clone(),
            edge_map: FiniteMap::from_table(dst.edges(), edge_map)?,
            node_images,
        })
    }

    pub fn identity(t: &Tree) -> OmegaMor {
        OmegaMor::from_edge_map(t, t, (0..t.edges()).collect()).expect("identity")
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }
}

/// Every morphism `S → T`, found by assigning the root and then, node by
/// node from the root up, a subtree and a matching of its leaves with the
/// node's inputs.
pub fn omega_hom(s: &Tree, t: &Tree, guard: Guard) -> Result<Vec<OmegaMor>> {
    let mut order = Vec::new();
    let mut stack = vec![s.root()];
    while let Some(e) = stack.pop() {
        if let Some(v) = s.producer(e) {
            order.push(v);
            stack.extend(s.inputs(v).into_iter().rev());
        }
    }
    let at: Vec<Vec<Subtree>> = (0..t.edges()).map(|e| subtrees_at(t, e)).collect();
    let mut out = Vec::new();
    let mut f = vec![usize::MAX; s.edges()];
    fn go(
        s: &Tree,
        t: &Tree,
        order: &[usize],
        at: &[Vec<Subtree>],
        f: &mut Vec<usize>,
        images: &mut Vec<Option<Subtree>>,
        out: &mut Vec<OmegaMor>,
        guard: Guard,
    ) -> Result<()> {
        let Some((&v, rest)) = order.split_first() else {
            guard.check("dendroidal morphisms", out.len() as u128 + 1)?;
            out.push(OmegaMor {
                src: s.clone(),
                dst: t.clone(),
                edge_map: FiniteMap::from_table(t.edges(), f.clone())?,
                node_images: images.iter().map(|x| x.clone().expect("every node assigned")).collect(),
            });
            return Ok(());
        };
        let inputs = s.inputs(v);
        for st in &at[f[s.output(v)]] {
            if st.leaves.len() != inputs.len() {
                continue;
            }
            for perm in (0..inputs.len()).permutations(inputs.len()) {
                for (k, &e) in inputs.iter().enumerate() {
                    f[e] = st.leaves[perm[k]];
                }
                images[v] = Some(st.clone());
                go(s, t, rest, at, f, images, out, guard)?;
            }
        }
        Ok(())
    }
    let mut images = vec![None; s.nodes()];
    for r in 0..t.edges() {
        f[s.root()] = r;
        go(s, t, &order, &at, &mut f, &mut images, &mut out, guard)?;
    }
    Ok(out)
}

/// `g ∘ f`.
pub fn omega_compose(g: &OmegaMor, f: &OmegaMor) -> Result<OmegaMor> {
    if f.dst != g.src {
        return Err(Error::shape("composing dendroidal morphisms with mismatched boundary"));
    }
    let table = f.edge_map.table.iter().map(|&e| g.edge_map.table[e]).collect();
    OmegaMor::from_edge_map(&f.src, &g.dst, table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub inert: bool,
    pub active: bool,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match (self.inert, self.active) {
            (true, true) => "inert and active",
            (true, false) => "inert",
            (false, true) => "active",
            (false, false) => "neither",
        }
    }
}

/// Inert: an embedding sending each node to a single node. Active: the root
/// goes to the root and the leaves biject onto the leaves.
pub fn classify(f: &OmegaMor) -> Classification {
    let inert = f.edge_map.is_injective() && f.node_images.iter().all(|st| st.nodes.len() == 1);
    let mut leaf_images: Vec<usize> = f.src.leaves().members.iter().map(|&e| f.edge_map.table[e]).collect();
    leaf_images.sort_unstable();
    let active = f.edge_map.table[f.src.root()] == f.dst.root() && leaf_images == f.dst.leaves().members;
    Classification { inert, active }
}

/// A subtree as a tree in its own right, with the inclusion of its edges.
pub fn extract_subtree(t: &Tree, st: &Subtree) -> Result<(Tree, Vec<usize>)> {
    let local: HashMap<usize, usize> = st.edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let ops: Vec<(Vec<usize>, usize)> = st
        .nodes
        .iter()
        .map(|&v| (t.inputs(v).iter().map(|e| local[e]).collect(), local[&t.output(v)]))
        .collect();
    let n = st.edges.len();
    let tree = validate_tree(&Polynomial::from_operations(n, n, &ops)?)?;
    Ok((tree, st.edges.clone()))
}

/// Splits `f` as an active map onto its image subtree followed by the
/// inclusion of that subtree.
pub fn active_inert_factorize(f: &OmegaMor) -> Result<(OmegaMor, OmegaMor)> {
    let root = f.edge_map.table[f.src.root()];
    let leaves: Vec<usize> = f.src.leaves().members.iter().map(|&e| f.edge_map.table[e]).collect();
    let image = subtree_between(&f.dst, root, &leaves)
        .ok_or_else(|| Error::inconsistent("the image of the boundary does not bound a subtree"))?;
    let (middle, incl) = extract_subtree(&f.dst, &image)?;
    let back: HashMap<usize, usize> = incl.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let active_map = f
        .edge_map
        .table
        .iter()
        .map(|e| back.get(e).copied().ok_or_else(|| Error::inconsistent("edge outside the image subtree")))
        .collect::<Result<Vec<_>>>()?;
    let active = OmegaMor::from_edge_map(&f.src, &middle, active_map)?;
    let inert = OmegaMor::from_edge_map(&middle, &f.dst, incl)?;
    Ok((active, inert))
}

/// Checks that two factorizations of the same morphism agree up to an
/// isomorphism of their middle trees compatible with both halves.
pub fn factorizations_agree(a: &(OmegaMor, OmegaMor), b: &(OmegaMor, OmegaMor)) -> bool {
    let Some(iso) = tree_iso(&a.0.dst, &b.0.dst) else {
        return false;
    };
    let phi = &iso.on_i.table;
    let active_ok = a.0.edge_map.table.iter().zip(&b.0.edge_map.table).all(|(&x, &y)| phi[x] == y);
    let inert_ok = (0..phi.len()).all(|e| b.1.edge_map.table[phi[e]] == a.1.edge_map.table[e]);
    if active_ok && inert_ok {
        return true;
    }
    // a different isomorphism may be the compatible one
    crate::tree::automorphisms(&b.0.dst, Guard::default())
        .map(|auts| {
            auts.iter().any(|aut| {
                let psi: Vec<usize> = phi.iter().map(|&x| aut.on_i.table[x]).collect();
                a.0.edge_map.table.iter().zip(&b.0.edge_map.table).all(|(&x, &y)| psi[x] == y)
                    && (0..psi.len()).all(|e| b.1.edge_map.table[psi[e]] == a.1.edge_map.table[e])
            })
        })
        .unwrap_or(false)
}

/// The same morphism as a cartesian map `S → \bar T` into the free monad on
/// `T`, truncated at the height of `T`: each node goes to the operation
/// given by its subtree.
pub fn to_free_mor(f: &OmegaMor) -> Result<PolyMor> {
    let tp = f.dst.poly();
    let free = free_monad_poly(tp, f.dst.height(), Guard::default())?;
    let index = free.b_lookup();
    let mut beta = Vec::with_capacity(f.src.nodes());
    let mut eps = vec![0; f.src.poly().e().size];
    for (v, st) in f.node_images.iter().enumerate() {
        let op = index[&st.term(&f.dst).tag(tp)];
        for (&m, e) in f.src.poly().fiber(v).iter().zip(f.src.inputs(v)) {
            let pos = st
                .leaves
                .iter()
                .position(|&l| l == f.edge_map.table[e])
                .ok_or_else(|| Error::inconsistent("input not among the subtree leaves"))?;
            eps[m] = free.fiber(op)[pos];
        }
        beta.push(op);
    }
    let edges = f.edge_map.table.clone();
    PolyMor::new(f.src.poly_arc().clone(), Arc::new(free), edges.clone(), edges, eps, beta)
}

/// Inverse of [`to_free_mor`].
pub fn from_free_mor(src: &Tree, dst: &Tree, m: &PolyMor) -> Result<OmegaMor> {
    let f = OmegaMor::from_edge_map(src, dst, m.on_i.table.clone())?;
    if to_free_mor(&f)? != *m {
        return Err(Error::inconsistent("map into the free monad is not induced by its edge map"));
    }
    Ok(f)
}

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chain::pn_chain;
use crate::error::{Error, Result};
use crate::finset::for_each_tuple;
use crate::guard::Guard;
use crate::poly::{compose_guarded, identity_poly, vcomp, PolyMor, Polynomial};
use crate::tag::Tag;
use crate::tree::{automorphisms, validate_tree, Shape, Tree};

/// A `P`-tree written as a term: a leaf of some colour, or an operation of
/// `P` with one subterm per input, in fiber order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PTerm {
    Leaf(usize),
    Node(usize, Vec<PTerm>),
}

impl PTerm {
    /// Depth of the deepest node; a bare leaf has height 0.
    pub fn height(&self) -> usize {
        match self {
            PTerm::Leaf(_) => 0,
            PTerm::Node(_, kids) => 1 + kids.iter().map(PTerm::height).max().unwrap_or(0),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PTerm::Leaf(_) => 1,
            PTerm::Node(_, kids) => kids.iter().map(PTerm::leaf_count).sum(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            PTerm::Leaf(_) => 0,
            PTerm::Node(_, kids) => 1 + kids.iter().map(PTerm::node_count).sum::<usize>(),
        }
    }

    pub fn root_colour(&self, p: &Polynomial) -> usize {
        match self {
            PTerm::Leaf(i) => *i,
            PTerm::Node(b, _) => p.t().table[*b],
        }
    }

    /// Colours of the leaves from left to right.
    pub fn leaf_colours(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |i| out.push(i));
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(usize)) {
        match self {
            PTerm::Leaf(i) => f(*i),
            PTerm::Node(_, kids) => kids.iter().for_each(|k| k.visit_leaves(f)),
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            PTerm::Leaf(_) => Shape::Leaf,
            PTerm::Node(_, kids) => Shape::Node(kids.iter().map(PTerm::shape).collect()),
        }
    }

    /// Checks arities and that every input colour matches the root of the
    /// subterm plugged into it.
    pub fn check(&self, p: &Polynomial) -> Result<()> {
        match self {
            PTerm::Leaf(i) if *i < p.i().size => Ok(()),
            PTerm::Leaf(i) => Err(Error::OutOfRange { index: *i, size: p.i().size }),
            PTerm::Node(b, kids) => {
                if *b >= p.b().size {
                    return Err(Error::OutOfRange { index: *b, size: p.b().size });
                }
                if kids.len() != p.arity(*b) {
                    return Err(Error::shape(format!("operation {b} has arity {} but {} subtrees", p.arity(*b), kids.len())));
                }
                for (k, kid) in kids.iter().enumerate() {
                    kid.check(p)?;
                    let want = p.s().table[p.fiber(*b)[k]];
                    if kid.root_colour(p) != want {
                        return Err(Error::shape(format!("input {k} of operation {b} wants colour {want}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Structural tag: `(0, i)` for a leaf, `(1, b, (kids…))` for a node.
    pub fn tag(&self, p: &Polynomial) -> Tag {
        match self {
            PTerm::Leaf(i) => Tag::pair(Tag::atom(0), Tag::atom(*i)),
            PTerm::Node(b, kids) => Tag::triple(
                Tag::atom(1),
                p.b_tags()[*b].clone(),
                Tag::seq(kids.iter().map(|k| k.tag(p))),
            ),
        }
    }

    /// Replaces the `k`-th leaf by `inners[k]` for every `k`.
    pub fn substitute(&self, inners: &[PTerm]) -> Result<PTerm> {
        if inners.len() != self.leaf_count() {
            return Err(Error::shape(format!(
                "{} trees offered for {} leaves",
                inners.len(),
                self.leaf_count()
            )));
        }
        fn go(t: &PTerm, inners: &mut std::slice::Iter<'_, PTerm>) -> PTerm {
            match t {
                PTerm::Leaf(_) => inners.next().expect("counted").clone(),
                PTerm::Node(b, kids) => PTerm::Node(*b, kids.iter().map(|k| go(k, inners)).collect()),
            }
        }
        Ok(go(self, &mut inners.iter()))
    }

    /// Grafts `inner` onto leaf `leaf` (left-to-right index).
    pub fn graft_at(&self, leaf: usize, inner: &PTerm) -> Result<PTerm> {
        let n = self.leaf_count();
        if leaf >= n {
            return Err(Error::NotALeaf(leaf));
        }
        let colours = self.leaf_colours();
        let inners: Vec<PTerm> = (0..n)
            .map(|k| if k == leaf { inner.clone() } else { PTerm::Leaf(colours[k]) })
            .collect();
        self.substitute(&inners)
    }
}

impl fmt::Display for PTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PTerm::Leaf(i) => write!(f, "{i}"),
            PTerm::Node(b, kids) => {
                write!(f, "b{b}(")?;
                for (k, kid) in kids.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{kid}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A tree together with a cartesian decoration in `P`.
#[derive(Clone, Debug)]
pub struct PTree {
    term: PTerm,
    shape: Tree,
    deco: PolyMor,
    leaf_edges: Vec<usize>,
}

impl PTree {
    /// Builds the decorated tree of a term. Nodes are numbered in preorder;
    /// the inputs of a node are numbered when the node is visited.
    pub fn new(p: &Arc<Polynomial>, term: PTerm) -> Result<PTree> {
        term.check(p)?;
        struct Build<'a> {
            p: &'a Polynomial,
            ops: Vec<(Vec<usize>, usize)>,
            deco_b: Vec<usize>,
            colour: Vec<usize>,
            leaves: Vec<usize>,
        }
        fn go(t: &PTerm, edge: usize, st: &mut Build<'_>) {
            match t {
                PTerm::Leaf(_) => st.leaves.push(edge),
                PTerm::Node(b, kids) => {
                    let slot = st.ops.len();
                    st.ops.push((Vec::new(), edge));
                    st.deco_b.push(*b);
                    let inputs: Vec<usize> = kids
                        .iter()
                        .map(|k| {
                            st.colour.push(k.root_colour(st.p));
                            st.colour.len() - 1
                        })
                        .collect();
                    st.ops[slot].0 = inputs.clone();
                    for (k, e) in kids.iter().zip(inputs) {
                        go(k, e, st);
                    }
                }
            }
        }
        let mut st = Build {
            p,
            ops: Vec::new(),
            deco_b: Vec::new(),
            colour: vec![term.root_colour(p)],
            leaves: Vec::new(),
        };
        go(&term, 0, &mut st);
        let n = st.colour.len();
        let shape = validate_tree(&Polynomial::from_operations(n, n, &st.ops)?)?;
        let mut eps = Vec::with_capacity(shape.poly().e().size);
        for (v, &b) in st.deco_b.iter().enumerate() {
            for k in 0..shape.poly().arity(v) {
                eps.push(p.fiber(b)[k]);
            }
        }
        let deco = PolyMor::new(
            shape.poly_arc().clone(),
            p.clone(),
            st.colour.clone(),
            st.colour,
            eps,
            st.deco_b,
        )?;
        Ok(PTree {
            term,
            shape,
            deco,
            leaf_edges: st.leaves,
        })
    }

    /// Reads a term off a cartesian morphism from a tree into `P`.
    pub fn from_decoration(deco: &PolyMor) -> Result<PTree> {
        if !deco.is_cartesian() || !deco.on_i.table.iter().eq(deco.on_j.table.iter()) {
            return Err(Error::shape("a decoration is a cartesian endofunctor morphism"));
        }
        let shape = validate_tree(&deco.src)?;
        fn go(t: &Tree, deco: &PolyMor, e: usize) -> PTerm {
            match t.producer(e) {
                None => PTerm::Leaf(deco.on_i.table[e]),
                Some(v) => {
                    let fiber = t.poly().fiber(v);
                    let mut kids = vec![PTerm::Leaf(0); fiber.len()];
                    for (&m, &e_in) in fiber.iter().zip(&t.inputs(v)) {
                        kids[deco.dst.fiber_position(deco.eps.table[m])] = go(t, deco, e_in);
                    }
                    PTerm::Node(deco.beta.table[v], kids)
                }
            }
        }
        let term = go(&shape, deco, shape.root());
        PTree::new(&deco.dst, term)
    }

    pub fn term(&self) -> &PTerm {
        &self.term
    }

    pub fn shape(&self) -> &Tree {
        &self.shape
    }

    pub fn deco(&self) -> &PolyMor {
        &self.deco
    }

    /// Leaf edges of the shape, from left to right.
    pub fn leaf_edges(&self) -> &[usize] {
        &self.leaf_edges
    }

    /// Canonical form: decorations at nodes, colours at leaves. Children stay
    /// in fiber order, so no sorting is involved.
    pub fn canonical(&self) -> String {
        self.term.to_string()
    }

    /// Automorphisms of the shape that preserve the decoration.
    pub fn automorphisms(&self, guard: Guard) -> Result<Vec<PolyMor>> {
        let mut out = Vec::new();
        for aut in automorphisms(&self.shape, guard)? {
            let moved = vcomp(&self.deco, &aut)?;
            if moved.on_i == self.deco.on_i && moved.beta == self.deco.beta && moved.eps == self.deco.eps {
                out.push(aut);
            }
        }
        Ok(out)
    }
}

/// Lazily grown lists of `P`-trees, bucketed by exact height.
#[derive(Clone, Debug)]
pub struct FreeMonadView {
    p: Arc<Polynomial>,
    levels: Vec<Vec<PTerm>>,
    total: usize,
}

impl FreeMonadView {
    pub fn new(p: &Polynomial) -> Result<Self> {
        if !p.is_endo_shaped() {
            return Err(Error::shape("free monads need an endofunctor (I = J)"));
        }
        let leaves: Vec<PTerm> = (0..p.i().size).map(PTerm::Leaf).collect();
        Ok(FreeMonadView {
            p: Arc::new(p.clone()),
            total: leaves.len(),
            levels: vec![leaves],
        })
    }

    pub fn poly(&self) -> &Arc<Polynomial> {
        &self.p
    }

    /// Largest height computed so far.
    pub fn cached_height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn extend_to(&mut self, h: usize, guard: Guard) -> Result<()> {
        while self.levels.len() <= h {
            self.grow(guard)?;
        }
        Ok(())
    }

    fn grow(&mut self, guard: Guard) -> Result<()> {
        let p = self.p.clone();
        let top = self.cached_height();
        let mut by_colour: Vec<Vec<&PTerm>> = vec![Vec::new(); p.i().size];
        for t in self.levels.iter().flatten() {
            by_colour[t.root_colour(&p)].push(t);
        }
        let mut predicted: u128 = self.total as u128;
        for b in 0..p.b().size {
            let n = p.input_colours(b).iter().fold(1u128, |acc, &c| acc.saturating_mul(by_colour[c].len() as u128));
            predicted = predicted.saturating_add(n);
        }
        guard.check("P-trees", predicted)?;
        let mut level = Vec::new();
        for b in 0..p.b().size {
            let colours = p.input_colours(b);
            let bounds: Vec<usize> = colours.iter().map(|&c| by_colour[c].len()).collect();
            for_each_tuple(&bounds, |choice| {
                if choice.iter().zip(&colours).any(|(&x, &c)| by_colour[c][x].height() == top) || (top == 0 && choice.is_empty()) {
                    let kids = choice.iter().zip(&colours).map(|(&x, &c)| by_colour[c][x].clone()).collect();
                    level.push(PTerm::Node(b, kids));
                }
            });
        }
        self.total += level.len();
        self.levels.push(level);
        Ok(())
    }

    /// Trees of height exactly `h`; requires `h` to be cached.
    pub fn exact(&self, h: usize) -> &[PTerm] {
        &self.levels[h]
    }

    /// Trees of height at most `h`, lowest heights first.
    pub fn up_to(&mut self, h: usize, guard: Guard) -> Result<Vec<PTerm>> {
        self.extend_to(h, guard)?;
        Ok(self.levels[..=h].iter().flatten().cloned().collect())
    }

    /// Trees of height at most `h` with one leaf marked.
    pub fn marked(&mut self, h: usize, guard: Guard) -> Result<Vec<(PTerm, usize)>> {
        let trees = self.up_to(h, guard)?;
        guard.check("marked P-trees", trees.iter().map(|t| t.leaf_count() as u128).sum())?;
        Ok(trees
            .into_iter()
            .flat_map(|t| (0..t.leaf_count()).map(move |k| (t.clone(), k)))
            .collect())
    }
}

pub fn enumerate_ptrees(p: &Polynomial, max_height: usize, guard: Guard) -> Result<Vec<PTree>> {
    let mut view = FreeMonadView::new(p)?;
    let arc = view.poly().clone();
    view.up_to(max_height, guard)?.into_iter().map(|t| PTree::new(&arc, t)).collect()
}

/// Every `P`-tree of height at most `max_height` with a marked leaf edge.
pub fn ptrees_marked(p: &Polynomial, max_height: usize, guard: Guard) -> Result<Vec<(PTree, usize)>> {
    let trees = enumerate_ptrees(p, max_height, guard)?;
    Ok(trees
        .into_iter()
        .flat_map(|t| {
            let edges = t.leaf_edges().to_vec();
            edges.into_iter().map(move |e| (t.clone(), e))
        })
        .collect())
}

/// The polynomial `I ← tr'_{≤h}(P) → tr_{≤h}(P) → I`: operations are trees,
/// inputs are trees with a marked leaf, `s` is the colour of the marked leaf
/// and `t` the root colour.
pub fn free_monad_poly(p: &Polynomial, h: usize, guard: Guard) -> Result<Polynomial> {
    let mut view = FreeMonadView::new(p)?;
    let trees = view.up_to(h, guard)?;
    Ok(poly_of_terms(p, &trees))
}

fn poly_of_terms(p: &Polynomial, trees: &[PTerm]) -> Polynomial {
    let (mut s, mut w, mut t, mut e_tags, mut b_tags) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (b, tree) in trees.iter().enumerate() {
        let tag = tree.tag(p);
        for (k, c) in tree.leaf_colours().into_iter().enumerate() {
            s.push(c);
            w.push(b);
            e_tags.push(Tag::pair(tag.clone(), Tag::atom(k)));
        }
        t.push(tree.root_colour(p));
        b_tags.push(tag);
    }
    let n = p.i().size;
    Polynomial::assemble(n, n, s, w, t, e_tags, b_tags)
}

/// The unit `id → tr_{≤h}(P)`: colour `i` goes to the bare leaf of colour `i`.
pub fn free_unit(p: &Polynomial, h: usize, guard: Guard) -> Result<PolyMor> {
    let dst = free_monad_poly(p, h, guard)?;
    let index = dst.b_lookup();
    let n = p.i().size;
    let beta: Vec<usize> = (0..n).map(|i| index[&PTerm::Leaf(i).tag(p)]).collect();
    let eps: Vec<usize> = beta.iter().map(|&b| dst.fiber(b)[0]).collect();
    let ids: Vec<usize> = (0..n).collect();
    PolyMor::new(Arc::new(identity_poly(p.i())), Arc::new(dst), ids.clone(), ids, eps, beta)
}

/// Substitution by grafting, `tr_{≤h} ∘ tr_{≤h} → tr_{≤2h}`: an outer tree
/// with one tree per leaf goes to the tree obtained by gluing each onto its
/// leaf. Inputs follow the marked leaf of the chosen inner tree.
pub fn free_mult(p: &Polynomial, h: usize, guard: Guard) -> Result<PolyMor> {
    let mut view = FreeMonadView::new(p)?;
    let terms = view.up_to(h, guard)?;
    let small = poly_of_terms(p, &terms);
    let big_terms = view.up_to(2 * h, guard)?;
    let big = poly_of_terms(p, &big_terms);
    let big_index: HashMap<&PTerm, usize> = big_terms.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let comp = compose_guarded(&small, &small, guard)?;
    let mut beta = Vec::with_capacity(comp.d_parts.len());
    let mut offsets = Vec::with_capacity(comp.d_parts.len());
    for (c, phi) in &comp.d_parts {
        let inners: Vec<PTerm> = phi.iter().map(|&x| terms[x].clone()).collect();
        let grafted = terms[*c].substitute(&inners)?;
        let b = *big_index
            .get(&grafted)
            .ok_or_else(|| Error::OutsideTruncation(grafted.to_string()))?;
        beta.push(b);
        let mut acc = 0;
        offsets.push(
            inners
                .iter()
                .map(|t| {
                    let o = acc;
                    acc += t.leaf_count();
                    o
                })
                .collect::<Vec<_>>(),
        );
    }
    let eps: Vec<usize> = comp
        .g_parts
        .iter()
        .map(|&(d, f, e)| {
            let k = small.fiber_position(f);
            let leaf = offsets[d][k] + small.fiber_position(e);
            big.fiber(beta[d])[leaf]
        })
        .collect();
    let ids: Vec<usize> = (0..p.i().size).collect();
    PolyMor::new(Arc::new(comp.poly), Arc::new(big), ids.clone(), ids, eps, beta)
}

/// Reads a chain operation tag of `P_h` as a term.
fn chain_term(p: &Polynomial, ops: &HashMap<Tag, usize>, h: usize, tag: &Tag) -> Result<PTerm> {
    let bad = || Error::inconsistent(format!("{tag} is not an operation of P_{h}"));
    if h == 0 {
        return tag.as_atom().map(PTerm::Leaf).ok_or_else(bad);
    }
    match tag.as_inj() {
        Some((0, i)) => i.as_atom().map(PTerm::Leaf).ok_or_else(bad),
        Some((1, inner)) => {
            let b = ops.get(inner.get(0).ok_or_else(bad)?).copied().ok_or_else(bad)?;
            let ys = inner.get(1).and_then(Tag::as_seq).ok_or_else(bad)?;
            let kids = ys.iter().map(|y| chain_term(p, ops, h - 1, y)).collect::<Result<_>>()?;
            Ok(PTerm::Node(b, kids))
        }
        _ => Err(bad()),
    }
}

/// The comparison `P_h → tr_{≤h}(P)` between the two constructions: an
/// element of the chain read as the tree it describes. It is a cartesian
/// isomorphism preserving fiber order.
pub fn chain_to_trees(p: &Polynomial, h: usize, guard: Guard) -> Result<PolyMor> {
    let chain = pn_chain(p, h, guard)?;
    let trees = free_monad_poly(p, h, guard)?;
    let ops = p.b_lookup();
    let index = trees.b_lookup();
    let mut beta = Vec::with_capacity(chain.b().size);
    let mut eps = vec![0; chain.e().size];
    for (b, tag) in chain.b_tags().iter().enumerate() {
        let term = chain_term(p, &ops, h, tag)?;
        let image = *index
            .get(&term.tag(p))
            .ok_or_else(|| Error::inconsistent(format!("tree {term} missing from tr_{{≤{h}}}")))?;
        for (&e, &f) in chain.fiber(b).iter().zip(trees.fiber(image)) {
            eps[e] = f;
        }
        beta.push(image);
    }
    let ids: Vec<usize> = (0..p.i().size).collect();
    PolyMor::new(Arc::new(chain), Arc::new(trees), ids.clone(), ids, eps, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::validate_mor;

    fn p_bin() -> Polynomial {
        Polynomial::one_colour(&[0, 2])
    }

    #[test]
    fn counts_match_the_chain() {
        let mut view = FreeMonadView::new(&p_bin()).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|h| view.up_to(h, Guard::default()).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 3, 11, 123]);
        assert_eq!(view.exact(1).len(), 2);
    }

    #[test]
    fn trees_are_rigid() {
        for t in enumerate_ptrees(&p_bin(), 2, Guard::default()).unwrap() {
            assert_eq!(t.automorphisms(Guard::default()).unwrap().len(), 1, "{}", t.canonical());
            assert!(validate_mor(t.deco()).valid);
            let back = PTree::from_decoration(t.deco()).unwrap();
            assert_eq!(back.term(), t.term());
        }
    }

    #[test]
    fn grafting_two_corollas() {
        let b2 = PTerm::Node(1, vec![PTerm::Leaf(0), PTerm::Leaf(0)]);
        let g = b2.graft_at(1, &b2).unwrap();
        assert_eq!(g.to_string(), "b1(0,b1(0,0))");
        assert_eq!(g.height(), 2);
        let shape = PTree::new(&Arc::new(p_bin()), g).unwrap().shape().canonical().shape();
        assert_eq!(shape, Shape::parse("((ll)l)").unwrap());
    }

    #[test]
    fn constant_polynomial_gives_maybe_shape() {
        let p = Polynomial::one_colour(&[0]);
        let f = free_monad_poly(&p, 1, Guard::default()).unwrap();
        assert_eq!(f.arities(), vec![1, 0]);
    }

    #[test]
    fn unit_mult_and_comparison_are_cartesian() {
        let p = p_bin();
        assert!(validate_mor(&free_unit(&p, 1, Guard::default()).unwrap()).valid);
        let mu = free_mult(&p, 1, Guard::default()).unwrap();
        assert!(validate_mor(&mu).valid);
        let iso = chain_to_trees(&p, 3, Guard::default()).unwrap();
        assert!(validate_mor(&iso).valid);
        assert!(iso.beta.is_bijective() && iso.eps.is_bijective());
    }
}

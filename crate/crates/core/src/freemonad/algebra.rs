use std::collections::HashMap;

use serde::Serialize;

use super::chain::{pn_chain, ChainTags};
use super::coproduct;
use super::ptree::{FreeMonadView, PTerm};
use crate::error::{Error, Result};
use crate::finset::{for_each_tuple, FiniteMap};
use crate::guard::{sat_mul, Guard};
use crate::poly::{evaluate_map, evaluate_with, Evaluation, Family, FamilyMap, Polynomial};
use crate::tag::Tag;

/// A family `A` with a structure map `P(A) → A`.
#[derive(Clone, Debug)]
pub struct LambekAlgebra {
    pub carrier: Family,
    pub structure: FamilyMap,
}

/// A family `C` with a structure map `C → P(C)`.
#[derive(Clone, Debug)]
pub struct LambekCoalgebra {
    pub carrier: Family,
    pub structure: FamilyMap,
}

impl LambekAlgebra {
    /// `table[k]` is the image of the `k`-th element of `P(carrier)`.
    pub fn new(p: &Polynomial, carrier: Family, table: Vec<usize>) -> Result<Self> {
        let pa = evaluate_with(p, &carrier, Guard::default())?.family;
        let structure = FamilyMap::new(pa, carrier.clone(), table)?;
        Ok(LambekAlgebra { carrier, structure })
    }
}

impl LambekCoalgebra {
    /// `table[k]` is the element of `P(carrier)` assigned to the `k`-th element.
    pub fn new(p: &Polynomial, carrier: Family, table: Vec<usize>) -> Result<Self> {
        let pc = evaluate_with(p, &carrier, Guard::default())?.family;
        let structure = FamilyMap::new(carrier.clone(), pc, table)?;
        Ok(LambekCoalgebra { carrier, structure })
    }

    /// `(P C, P c)`.
    pub fn apply(&self, p: &Polynomial) -> Result<LambekCoalgebra> {
        let structure = evaluate_map(p, &self.structure)?;
        Ok(LambekCoalgebra {
            carrier: structure.src.clone(),
            structure,
        })
    }
}

/// Outcome of the Adámek chain `∅ → P∅ → P²∅ → …`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum WType {
    /// The chain map `X_k → X_{k+1}` became a bijection after `iterations`
    /// applications of `P`; `carrier = X_k` and `structure` is the inverse
    /// of that map, a `P`-algebra `P(W) → W`.
    Stabilized {
        iterations: usize,
        sizes: Vec<usize>,
        #[serde(skip)]
        carrier: Family,
        #[serde(skip)]
        structure: FamilyMap,
    },
    /// No stabilization within the iteration budget, or the next stage
    /// would exceed the guard.
    Unbounded { iterations: usize, sizes: Vec<usize> },
}

impl WType {
    pub fn is_stabilized(&self) -> bool {
        matches!(self, WType::Stabilized { .. })
    }

    pub fn sizes(&self) -> &[usize] {
        match self {
            WType::Stabilized { sizes, .. } | WType::Unbounded { sizes, .. } => sizes,
        }
    }

    pub fn carrier(&self) -> Option<&Family> {
        match self {
            WType::Stabilized { carrier, .. } => Some(carrier),
            WType::Unbounded { .. } => None,
        }
    }
}

pub fn adamek_wtype(p: &Polynomial, max_iter: usize, guard: Guard) -> Result<WType> {
    if !p.is_endo_shaped() {
        return Err(Error::shape("W-types need an endofunctor (I = J)"));
    }
    let mut stage = Family::empty(p.i().size);
    let mut sizes = vec![0];
    let mut link: Option<FamilyMap> = None;
    for k in 0..max_iter {
        if crate::poly::predicted_size(p, &stage.fiber_sizes()) > guard.limit() as u128 {
            return Ok(WType::Unbounded { iterations: k, sizes });
        }
        let next = evaluate_with(p, &stage, guard)?.family;
        sizes.push(next.len());
        let map = match &link {
            None => FamilyMap::new(stage.clone(), next.clone(), Vec::new())?,
            Some(prev) => evaluate_map(p, prev)?,
        };
        if map.map.is_bijective() {
            let inverse = map.map.inverse()?;
            let structure = FamilyMap::new(next, stage.clone(), inverse.table)?;
            return Ok(WType::Stabilized {
                iterations: k + 1,
                sizes,
                carrier: stage,
                structure,
            });
        }
        stage = next;
        link = Some(map);
    }
    Ok(WType::Unbounded { iterations: max_iter, sizes })
}

/// `P`-trees of height at most `h` without leaves.
pub fn leafless_ptrees(p: &Polynomial, h: usize, guard: Guard) -> Result<Vec<PTerm>> {
    let mut view = FreeMonadView::new(p)?;
    Ok(view.up_to(h, guard)?.into_iter().filter(|t| t.leaf_count() == 0).collect())
}

/// The polynomial with one constant per element of `X`.
fn constants(x: &Family) -> Result<Polynomial> {
    let n = x.base().size;
    Polynomial::from_tables(n, n, x.len(), Vec::new(), Vec::new(), x.proj().table.clone())?
        .with_tags(Vec::new(), x.tags().to_vec())
}

/// The free `P`-algebra on `X`: the W-type of `Y ↦ X ⊔ P(Y)`.
pub fn free_algebra(p: &Polynomial, x: &Family, max_iter: usize, guard: Guard) -> Result<WType> {
    if x.base().size != p.i().size {
        return Err(Error::shape("family and polynomial have different colours"));
    }
    adamek_wtype(&coproduct(&constants(x)?, p)?, max_iter, guard)
}

/// `Σ_{T} ∏_{leaves} X`: trees of height at most `h` with every leaf
/// labelled by an element of `X` of the leaf's colour, over the root colour.
/// Elements are tagged `(tree, (x…))` like those of an evaluation.
pub fn free_eval_via_trees(p: &Polynomial, x: &Family, h: usize, guard: Guard) -> Result<Family> {
    if x.base().size != p.i().size {
        return Err(Error::shape("family and polynomial have different colours"));
    }
    let mut view = FreeMonadView::new(p)?;
    let trees = view.up_to(h, guard)?;
    let fibers = x.fibers();
    let predicted = trees.iter().fold(0u128, |acc, t| {
        acc.saturating_add(t.leaf_colours().iter().fold(1u128, |a, &c| sat_mul(a, fibers[c].len() as u128)))
    });
    guard.check("leaf-labelled P-trees", predicted)?;
    let (mut proj, mut tags) = (Vec::new(), Vec::new());
    for t in &trees {
        let colours = t.leaf_colours();
        let bounds: Vec<usize> = colours.iter().map(|&c| fibers[c].len()).collect();
        let tree_tag = t.tag(p);
        let root = t.root_colour(p);
        for_each_tuple(&bounds, |choice| {
            let labels = choice.iter().zip(&colours).map(|(&k, &c)| x.tags()[fibers[c][k]].clone());
            tags.push(Tag::pair(tree_tag.clone(), Tag::seq(labels)));
            proj.push(root);
        });
    }
    Family::with_tags(x.base().clone(), FiniteMap::from_table(x.base().size, proj)?, tags)
}

/// The map `e_n : P_n(A) → A` with `e_0 = id` and
/// `e_{n+1} = (id | a) ∘ (id ⊔ P(e_n))`.
pub fn counit_en(p: &Polynomial, a: &LambekAlgebra, n: usize, guard: Guard) -> Result<FamilyMap> {
    let chain = pn_chain(p, n, guard)?;
    let src = evaluate_with(&chain, &a.carrier, guard)?;
    let pa = evaluate_with(p, &a.carrier, guard)?;
    let pa_index = pa.index();
    let tags = ChainTags::new(p);
    let ops = p.b_lookup();
    let env = Env {
        tags: &tags,
        ops: &ops,
        pa_index: &pa_index,
        structure: &a.structure.map.table,
    };
    let table = src
        .parts
        .iter()
        .map(|(b, phi)| env.eval(n, &chain.b_tags()[*b], phi))
        .collect::<Result<Vec<_>>>()?;
    FamilyMap::new(src.family, a.carrier.clone(), table)
}

struct Env<'a> {
    tags: &'a ChainTags<'a>,
    ops: &'a HashMap<Tag, usize>,
    pa_index: &'a HashMap<(usize, Vec<usize>), usize>,
    structure: &'a [usize],
}

impl Env<'_> {
    fn eval(&self, h: usize, b: &Tag, values: &[usize]) -> Result<usize> {
        let bad = || Error::inconsistent(format!("{b} is not an operation of P_{h}"));
        if h == 0 {
            return values.first().copied().ok_or_else(bad);
        }
        match b.as_inj() {
            Some((0, _)) => values.first().copied().ok_or_else(bad),
            Some((1, inner)) => {
                let c = *self.ops.get(inner.get(0).ok_or_else(bad)?).ok_or_else(bad)?;
                let ys = inner.get(1).and_then(Tag::as_seq).ok_or_else(bad)?;
                let mut cursor = 0;
                let mut args = Vec::with_capacity(ys.len());
                for y in ys {
                    let k = self.tags.arity(h - 1, y)?;
                    args.push(self.eval(h - 1, y, &values[cursor..cursor + k])?);
                    cursor += k;
                }
                let elem = self.pa_index.get(&(c, args)).ok_or_else(bad)?;
                Ok(self.structure[*elem])
            }
            _ => Err(bad()),
        }
    }
}

/// Applies `P(f)` using precomputed evaluations of source and target.
fn apply_p(src: &Evaluation, dst_index: &HashMap<(usize, Vec<usize>), usize>, f: &[usize]) -> Vec<usize> {
    src.parts
        .iter()
        .map(|(b, phi)| dst_index[&(*b, phi.iter().map(|&x| f[x]).collect::<Vec<_>>())])
        .collect()
}

fn twist_tables(p: &Polynomial, c: &LambekCoalgebra, a: &LambekAlgebra, guard: Guard) -> Result<Vec<Vec<usize>>> {
    let pc = evaluate_with(p, &c.carrier, guard)?;
    let pa = evaluate_with(p, &a.carrier, guard)?;
    if pc.family != c.structure.dst || pa.family != a.structure.src {
        return Err(Error::shape("structure maps do not match the evaluations of P"));
    }
    let pa_index = pa.index();
    let candidates = FamilyMap::all(&c.carrier, &a.carrier, guard)?;
    Ok(candidates
        .into_iter()
        .map(|f| f.map.table)
        .filter(|f| {
            let pf = apply_p(&pc, &pa_index, f);
            (0..f.len()).all(|x| a.structure.map.table[pf[c.structure.map.table[x]]] == f[x])
        })
        .collect())
}

/// All maps `f : C → A` over the colours with `f = a ∘ P(f) ∘ c`, by brute
/// force over every map of families.
pub fn twist_set(p: &Polynomial, c: &LambekCoalgebra, a: &LambekAlgebra, guard: Guard) -> Result<Vec<FamilyMap>> {
    twist_tables(p, c, a, guard)?
        .into_iter()
        .map(|t| FamilyMap::new(c.carrier.clone(), a.carrier.clone(), t))
        .collect()
}

/// Comparison of `Tw(PC, A)` with `Tw(C, A)` through `g ↦ g ∘ c` and
/// `f ↦ a ∘ P(f)`.
#[derive(Clone, Debug, Serialize)]
pub struct PcaReport {
    pub tw_pc: usize,
    pub tw_c: usize,
    /// `g ↦ g ∘ c` lands in `Tw(C, A)`.
    pub restrict_lands: bool,
    /// `f ↦ a ∘ P(f)` lands in `Tw(PC, A)`.
    pub extend_lands: bool,
    /// Both composites are identities.
    pub mutually_inverse: bool,
}

impl PcaReport {
    pub fn passed(&self) -> bool {
        self.restrict_lands && self.extend_lands && self.mutually_inverse && self.tw_pc == self.tw_c
    }
}

pub fn check_pca(p: &Polynomial, c: &LambekCoalgebra, a: &LambekAlgebra, guard: Guard) -> Result<PcaReport> {
    let pc_coalg = c.apply(p)?;
    let tw_c = twist_tables(p, c, a, guard)?;
    let tw_pc = twist_tables(p, &pc_coalg, a, guard)?;
    let pc = evaluate_with(p, &c.carrier, guard)?;
    let pa_index = evaluate_with(p, &a.carrier, guard)?.index();
    let restrict = |g: &Vec<usize>| -> Vec<usize> { c.structure.map.table.iter().map(|&y| g[y]).collect() };
    let extend = |f: &Vec<usize>| -> Vec<usize> {
        apply_p(&pc, &pa_index, f).into_iter().map(|z| a.structure.map.table[z]).collect()
    };
    let restricted: Vec<Vec<usize>> = tw_pc.iter().map(restrict).collect();
    let extended: Vec<Vec<usize>> = tw_c.iter().map(extend).collect();
    Ok(PcaReport {
        tw_pc: tw_pc.len(),
        tw_c: tw_c.len(),
        restrict_lands: restricted.iter().all(|f| tw_c.contains(f)),
        extend_lands: extended.iter().all(|g| tw_pc.contains(g)),
        mutually_inverse: tw_pc.iter().zip(&restricted).all(|(g, f)| extend(f) == *g)
            && tw_c.iter().zip(&extended).all(|(f, g)| restrict(g) == *f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemonad::{chain_to_trees, free_monad_poly, maybe_monad, transition};
    use crate::poly::{evaluate, identity_poly};
    use crate::finset::FiniteSet;

    fn p_bin() -> Polynomial {
        Polynomial::one_colour(&[0, 2])
    }

    #[test]
    fn wtype_examples() {
        let c = adamek_wtype(&Polynomial::one_colour(&[0, 0]), 5, Guard::default()).unwrap();
        assert!(matches!(c, WType::Stabilized { iterations: 2, .. }));
        assert_eq!(c.carrier().unwrap().len(), 2);
        let id = adamek_wtype(&identity_poly(&FiniteSet::point()), 5, Guard::default()).unwrap();
        assert_eq!(id.carrier().unwrap().len(), 0);
        let bin = adamek_wtype(&p_bin(), 10, Guard::default()).unwrap();
        assert!(!bin.is_stabilized());
        assert_eq!(&bin.sizes()[..6], &[0, 1, 2, 5, 26, 677]);
    }

    #[test]
    fn nilpotent_two_colours() {
        let p = Polynomial::from_operations(2, 2, &[(vec![], 0), (vec![0, 0], 1), (vec![0], 1)]).unwrap();
        let w = adamek_wtype(&p, 10, Guard::default()).unwrap();
        assert_eq!(w.carrier().unwrap().len(), 3);
        assert_eq!(leafless_ptrees(&p, 5, Guard::default()).unwrap().len(), 3);
        let x = Family::new(2, vec![0, 1]).unwrap();
        let free = free_algebra(&p, &x, 10, Guard::default()).unwrap();
        let trees = free_eval_via_trees(&p, &x, 4, Guard::default()).unwrap();
        assert_eq!(free.carrier().unwrap().len(), trees.len());
    }

    #[test]
    fn trees_evaluate_like_the_chain() {
        let x = Family::new(1, vec![0, 0]).unwrap();
        assert_eq!(free_eval_via_trees(&p_bin(), &x, 1, Guard::default()).unwrap().len(), 7);
        let one = Family::new(1, vec![0]).unwrap();
        assert_eq!(free_eval_via_trees(&p_bin(), &one, 2, Guard::default()).unwrap().len(), 11);
        let direct = free_eval_via_trees(&p_bin(), &x, 2, Guard::default()).unwrap();
        let via = evaluate(&free_monad_poly(&p_bin(), 2, Guard::default()).unwrap(), &x).unwrap();
        assert_eq!(direct, via);
        let bij = chain_to_trees(&p_bin(), 2, Guard::default()).unwrap().component(&x).unwrap();
        assert!(bij.map.is_bijective());
    }

    #[test]
    fn counit_of_the_maybe_algebra() {
        let m = maybe_monad();
        let p = (**crate::freemonad::Multiplication::poly(&m)).clone();
        // carrier {x, ⊥}; u acts as the identity, c goes to ⊥
        let carrier = Family::new(1, vec![0, 0]).unwrap();
        let pa = evaluate(&p, &carrier).unwrap();
        assert_eq!(pa.len(), 3);
        let alg = LambekAlgebra::new(&p, carrier, vec![0, 1, 1]).unwrap();
        let e0 = counit_en(&p, &alg, 0, Guard::default()).unwrap();
        assert_eq!(e0.map.table, vec![0, 1]);
        let e2 = counit_en(&p, &alg, 2, Guard::default()).unwrap();
        let e1 = counit_en(&p, &alg, 1, Guard::default()).unwrap();
        let f2 = transition(&p, 1, Guard::default()).unwrap().component(&alg.carrier).unwrap();
        assert_eq!(f2.then(&e2).unwrap().map, e1.map);
        assert_eq!(e2.map.table.len(), 8);
    }

    #[test]
    fn twisting_examples() {
        let p = Polynomial::one_colour(&[0]);
        let a = LambekAlgebra::new(&p, Family::new(1, vec![0, 0]).unwrap(), vec![1]).unwrap();
        let c = LambekCoalgebra::new(&p, Family::new(1, vec![0, 0]).unwrap(), vec![0, 0]).unwrap();
        assert_eq!(twist_set(&p, &c, &a, Guard::default()).unwrap().len(), 1);
        assert!(check_pca(&p, &c, &a, Guard::default()).unwrap().passed());
        let empty = LambekCoalgebra::new(&p, Family::empty(1), vec![]).unwrap();
        assert_eq!(twist_set(&p, &empty, &a, Guard::default()).unwrap().len(), 1);

        let id = identity_poly(&FiniteSet::point());
        let a = LambekAlgebra::new(&id, Family::new(1, vec![0, 0]).unwrap(), vec![1, 0]).unwrap();
        let c = LambekCoalgebra::new(&id, Family::new(1, vec![0, 0]).unwrap(), vec![0, 1]).unwrap();
        // f = swap ∘ f: no fixed points on a two-element target
        assert_eq!(twist_set(&id, &c, &a, Guard::default()).unwrap().len(), 0);
        assert!(check_pca(&id, &c, &a, Guard::default()).unwrap().passed());
    }
}

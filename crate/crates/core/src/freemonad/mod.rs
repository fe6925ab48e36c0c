//! Free monads on polynomial endofunctors.
//!
//! Two constructions are provided and cross-checked: the chain
//! `P_0 = id`, `P_{h+1} = id ⊔ P ∘ P_h` with its transition maps and
//! multiplication cells, and the polynomial of `P`-trees with marked leaves.
//! Alongside sit polynomial monads with law checking, W-types by the Adámek
//! chain, and twisting maps between coalgebras and algebras.

mod algebra;
mod chain;
mod monad;
mod ptree;

pub use algebra::{
    adamek_wtype, check_pca, counit_en, free_algebra, free_eval_via_trees, leafless_ptrees,
    twist_set, LambekAlgebra, LambekCoalgebra, PcaReport, WType,
};
pub use chain::{mu_mn, mu_squares, pn_chain, pn_chain_all, transition, ChainTags, SquareReport};
pub use monad::{
    adjunction_check, fold_ptree, identity_monad, maybe_monad, monad_iso, monad_laws_check, monad_maps,
    partial_laws_check, AdjunctionReport, FreeTruncation, LawReport, Multiplication, PolynomialMonad,
};
pub(crate) use monad::fold_with;
pub use ptree::{
    chain_to_trees, enumerate_ptrees, free_monad_poly, free_mult, free_unit, ptrees_marked,
    FreeMonadView, PTerm, PTree,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{PolyMor, Polynomial};
use crate::tag::Tag;

/// `P ⊔ Q` over common endpoints; elements are tagged `(0, ·)` and `(1, ·)`.
pub fn coproduct(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    if p.i().size != q.i().size || p.j().size != q.j().size {
        return Err(Error::shape("coproduct of polynomials with different endpoints"));
    }
    let (nb, ne) = (p.b().size, p.e().size);
    let mut s = p.s().table.clone();
    s.extend(&q.s().table);
    let mut w = p.p().table.clone();
    w.extend(q.p().table.iter().map(|&b| b + nb));
    let mut t = p.t().table.clone();
    t.extend(&q.t().table);
    let inj = |k: usize, tags: &[Tag]| tags.iter().map(move |x| Tag::inj(k, x.clone())).collect::<Vec<_>>();
    let mut e_tags = inj(0, p.e_tags());
    e_tags.extend(inj(1, q.e_tags()));
    let mut b_tags = inj(0, p.b_tags());
    b_tags.extend(inj(1, q.b_tags()));
    debug_assert_eq!(e_tags.len(), ne + q.e().size);
    Ok(Polynomial::assemble(p.i().size, p.j().size, s, w, t, e_tags, b_tags))
}

/// The two summand inclusions into `P ⊔ Q`.
pub fn coproduct_inclusions(p: &Polynomial, q: &Polynomial) -> Result<(PolyMor, PolyMor)> {
    let sum = Arc::new(coproduct(p, q)?);
    let ids = |n: usize| (0..n).collect::<Vec<_>>();
    let shift = |n: usize, by: usize| (by..by + n).collect::<Vec<_>>();
    let left = PolyMor::new(
        Arc::new(p.clone()),
        sum.clone(),
        ids(p.i().size),
        ids(p.j().size),
        ids(p.e().size),
        ids(p.b().size),
    )?;
    let right = PolyMor::new(
        Arc::new(q.clone()),
        sum,
        ids(q.i().size),
        ids(q.j().size),
        shift(q.e().size, p.e().size),
        shift(q.b().size, p.b().size),
    )?;
    Ok((left, right))
}

/// `[f, g] : P ⊔ Q → R` for morphisms agreeing on endpoints.
pub fn copair(f: &PolyMor, g: &PolyMor) -> Result<PolyMor> {
    if f.dst != g.dst || f.on_i != g.on_i || f.on_j != g.on_j {
        return Err(Error::shape("copairing morphisms with different targets or endpoint maps"));
    }
    let sum = Arc::new(coproduct(&f.src, &g.src)?);
    let mut eps = f.eps.table.clone();
    eps.extend(&g.eps.table);
    let mut beta = f.beta.table.clone();
    beta.extend(&g.beta.table);
    PolyMor::new(sum, f.dst.clone(), f.on_i.table.clone(), f.on_j.table.clone(), eps, beta)
}

/// `f ⊔ g : P ⊔ Q → P' ⊔ Q'`.
pub fn coproduct_mor(f: &PolyMor, g: &PolyMor) -> Result<PolyMor> {
    let (l, r) = coproduct_inclusions(&f.dst, &g.dst)?;
    copair(&crate::poly::vcomp(&l, f)?, &crate::poly::vcomp(&r, g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::FiniteSet;
    use crate::poly::{identity_poly, validate_mor};

    #[test]
    fn coproduct_inclusions_are_cartesian() {
        let p = Polynomial::one_colour(&[0, 2]);
        let id = identity_poly(&FiniteSet::point());
        let (l, r) = coproduct_inclusions(&id, &p).unwrap();
        assert!(validate_mor(&l).valid && validate_mor(&r).valid);
        assert_eq!(l.dst.arities(), vec![1, 0, 2]);
        let both = copair(&l, &r).unwrap();
        assert_eq!(both.beta.table, vec![0, 1, 2]);
    }
}

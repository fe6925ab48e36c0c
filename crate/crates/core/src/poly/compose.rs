use std::collections::HashMap;

use super::family::{evaluate_with, Family, FamilyMap};
use super::Polynomial;
use crate::error::{Error, Result};
use crate::finset::for_each_tuple;
use crate::guard::{sat_mul, Guard};
use crate::tag::Tag;

/// `Q ∘ P` together with the decomposition of its elements.
///
/// For `P = (I ← E → B → J)` and `Q = (J ← F → C → K)`, an operation of the
/// composite is `(c, φ)` with `φ: F_c → B` over `J`, and an input of `(c, φ)`
/// is `(d, f, e)` with `f ∈ F_c` and `e ∈ E_{φ(f)}`.
#[derive(Clone, Debug)]
pub struct Composite {
    pub poly: Polynomial,
    /// `(c, φ)` for every operation, `φ` listed in the fiber order of `F_c`.
    pub d_parts: Vec<(usize, Vec<usize>)>,
    /// `(d, f, e)` for every input.
    pub g_parts: Vec<(usize, usize, usize)>,
    pub d_index: HashMap<(usize, Vec<usize>), usize>,
    pub g_index: HashMap<(usize, usize, usize), usize>,
}

fn predicted_ops(q: &Polynomial, p: &Polynomial) -> u128 {
    let mut per_colour = vec![0u128; p.j().size];
    for &j in &p.t().table {
        per_colour[j] += 1;
    }
    (0..q.b().size)
        .map(|c| {
            q.fiber(c)
                .iter()
                .fold(1u128, |acc, &f| sat_mul(acc, per_colour[q.s().table[f]]))
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

pub fn compose_parts(q: &Polynomial, p: &Polynomial) -> Result<Composite> {
    compose_guarded(q, p, Guard::default())
}

/// Like [`compose_parts`] with an explicit enumeration bound.
pub fn compose_guarded(q: &Polynomial, p: &Polynomial, guard: Guard) -> Result<Composite> {
    if p.j().size != q.i().size {
        return Err(Error::shape(format!(
            "cannot compose: inner polynomial lands in {} colours, outer expects {}",
            p.j().size,
            q.i().size
        )));
    }
    guard.check("composite operations", predicted_ops(q, p))?;
    let mut by_colour = vec![Vec::new(); p.j().size];
    for b in 0..p.b().size {
        by_colour[p.t().table[b]].push(b);
    }

    let mut d_parts = Vec::new();
    let mut t = Vec::new();
    let mut b_tags = Vec::new();
    for c in 0..q.b().size {
        let options: Vec<&[usize]> = q
            .fiber(c)
            .iter()
            .map(|&f| by_colour[q.s().table[f]].as_slice())
            .collect();
        let bounds: Vec<usize> = options.iter().map(|o| o.len()).collect();
        for_each_tuple(&bounds, |tu| {
            let phi: Vec<usize> = tu.iter().zip(&options).map(|(&k, o)| o[k]).collect();
            b_tags.push(Tag::pair(
                q.b_tags()[c].clone(),
                Tag::seq(phi.iter().map(|&b| p.b_tags()[b].clone())),
            ));
            t.push(q.t().table[c]);
            d_parts.push((c, phi));
        });
    }

    let mut g_parts = Vec::new();
    let mut s = Vec::new();
    let mut w = Vec::new();
    let mut e_tags = Vec::new();
    for (d, (c, phi)) in d_parts.iter().enumerate() {
        for (&f, &b) in q.fiber(*c).iter().zip(phi) {
            for &e in p.fiber(b) {
                e_tags.push(Tag::triple(
                    b_tags[d].clone(),
                    q.e_tags()[f].clone(),
                    p.e_tags()[e].clone(),
                ));
                s.push(p.s().table[e]);
                w.push(d);
                g_parts.push((d, f, e));
            }
        }
    }

    let poly = Polynomial::assemble(p.i().size, q.j().size, s, w, t, e_tags, b_tags);
    let d_index = d_parts.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
    let g_index = g_parts.iter().copied().enumerate().map(|(k, v)| (v, k)).collect();
    Ok(Composite {
        poly,
        d_parts,
        g_parts,
        d_index,
        g_index,
    })
}

/// `Q ∘ P` (apply `P` first).
pub fn compose_poly(q: &Polynomial, p: &Polynomial) -> Result<Polynomial> {
    compose_parts(q, p).map(|c| c.poly)
}

/// The canonical map `(Q ∘ P)(X) → Q(P(X))`, sending `((c, φ), ψ)` to
/// `(c, f ↦ (φ(f), e ↦ ψ(f, e)))`. It is a bijection over `K`.
pub fn composite_eval_bijection(q: &Polynomial, p: &Polynomial, x: &Family) -> Result<FamilyMap> {
    let comp = compose_parts(q, p)?;
    let guard = Guard::default();
    let lhs = evaluate_with(&comp.poly, x, guard)?;
    let px = evaluate_with(p, x, guard)?;
    let rhs = evaluate_with(q, &px.family, guard)?;
    let px_index = px.index();
    let rhs_index = rhs.index();
    let mut table = Vec::with_capacity(lhs.parts.len());
    for (d, psi) in &lhs.parts {
        let (c, phi) = &comp.d_parts[*d];
        let mut cursor = 0;
        let mut outer = Vec::with_capacity(phi.len());
        for &b in phi {
            let n = p.arity(b);
            let inner = psi[cursor..cursor + n].to_vec();
            cursor += n;
            outer.push(px_index[&(b, inner)]);
        }
        table.push(rhs_index[&(*c, outer)]);
    }
    FamilyMap::new(lhs.family, rhs.family, table)
}

#[cfg(test)]
mod tests {
    use super::super::{identity_poly, tests::p_bin};
    use super::*;
    use crate::finset::FiniteSet;

    #[test]
    fn compose_examples() {
        let comp = compose_poly(&p_bin(), &p_bin()).unwrap();
        let mut arities = comp.arities();
        arities.sort_unstable();
        assert_eq!(arities, vec![0, 0, 2, 2, 4]);

        let left = compose_poly(&identity_poly(&FiniteSet::point()), &p_bin()).unwrap();
        assert_eq!(left.arities(), p_bin().arities());
        let right = compose_poly(&p_bin(), &identity_poly(&FiniteSet::point())).unwrap();
        assert_eq!(right.arities(), p_bin().arities());

        let wrong = identity_poly(&FiniteSet::new(2));
        assert!(compose_poly(&p_bin(), &wrong).is_err());
    }

    #[test]
    fn composite_tags_record_nesting() {
        let comp = compose_parts(&p_bin(), &p_bin()).unwrap();
        assert_eq!(comp.poly.b_tags()[0], Tag::pair(Tag::atom(0), Tag::seq([])));
        let last = comp.poly.b_tags().last().unwrap().clone();
        assert_eq!(last, Tag::pair(Tag::atom(1), Tag::seq([Tag::atom(1), Tag::atom(1)])));
        assert_eq!(comp.poly.e().size, 2 + 2 + 4);
    }

    #[test]
    fn double_evaluation_is_bijective() {
        let x = Family::new(1, vec![0, 0]).unwrap();
        let m = composite_eval_bijection(&p_bin(), &p_bin(), &x).unwrap();
        assert!(m.map.is_bijective());
        assert_eq!(m.src.len(), 1 + (1 + 4) * (1 + 4));
    }
}

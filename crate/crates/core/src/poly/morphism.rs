use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::compose::{compose_parts, Composite};
use super::family::{evaluate_map, evaluate_with, Family, FamilyMap};
use super::{identity_poly, Polynomial};
use crate::error::{Error, Result};
use crate::finset::{self, FiniteMap};
use crate::guard::Guard;
use crate::tag::Tag;

/// A morphism of polynomial diagrams
///
/// ```text
///   I' <-- E' --> B' --> J'
///   |      |      |      |
///  on_i   eps   beta   on_j
///   v      v      v      v
///   I  <-- E  --> B  --> J
/// ```
///
/// It is cartesian when `eps` is a bijection `E'_b ≅ E_{beta(b)}` on every
/// fiber. Shapes are checked on construction; commutativity and
/// cartesianness are reported by [`validate_mor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMor {
    pub src: Arc<Polynomial>,
    pub dst: Arc<Polynomial>,
    pub on_i: FiniteMap,
    pub on_j: FiniteMap,
    pub eps: FiniteMap,
    pub beta: FiniteMap,
}

/// Wire format: the four tables of a [`PolyMor`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorTables {
    #[serde(rename = "on_I")]
    pub on_i: Vec<usize>,
    #[serde(rename = "on_J")]
    pub on_j: Vec<usize>,
    pub eps: Vec<usize>,
    pub beta: Vec<usize>,
}

/// Outcome of [`validate_mor`]; `failure` names the first violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorReport {
    pub valid: bool,
    pub failure: Option<String>,
}

impl MorReport {
    fn ok() -> Self {
        MorReport {
            valid: true,
            failure: None,
        }
    }
    fn fail(msg: String) -> Self {
        MorReport {
            valid: false,
            failure: Some(msg),
        }
    }
}

impl PolyMor {
    pub fn new(
        src: Arc<Polynomial>,
        dst: Arc<Polynomial>,
        on_i: Vec<usize>,
        on_j: Vec<usize>,
        eps: Vec<usize>,
        beta: Vec<usize>,
    ) -> Result<Self> {
        let map = |name: &str, dom: usize, cod: usize, table: Vec<usize>| {
            if table.len() != dom {
                return Err(Error::shape(format!(
                    "morphism table `{name}` has length {} but should have {dom}",
                    table.len()
                )));
            }
            FiniteMap::from_table(cod, table).map_err(|e| Error::shape(format!("morphism table `{name}`: {e}")))
        };
        Ok(PolyMor {
            on_i: map("on_I", src.i().size, dst.i().size, on_i)?,
            on_j: map("on_J", src.j().size, dst.j().size, on_j)?,
            eps: map("eps", src.e().size, dst.e().size, eps)?,
            beta: map("beta", src.b().size, dst.b().size, beta)?,
            src,
            dst,
        })
    }

    pub fn from_tables(src: Arc<Polynomial>, dst: Arc<Polynomial>, t: MorTables) -> Result<Self> {
        PolyMor::new(src, dst, t.on_i, t.on_j, t.eps, t.beta)
    }

    pub(crate) fn raw(
        src: Arc<Polynomial>,
        dst: Arc<Polynomial>,
        on_i: Vec<usize>,
        on_j: Vec<usize>,
        eps: Vec<usize>,
        beta: Vec<usize>,
    ) -> Self {
        PolyMor {
            on_i: FiniteMap::raw(dst.i().size, on_i),
            on_j: FiniteMap::raw(dst.j().size, on_j),
            eps: FiniteMap::raw(dst.e().size, eps),
            beta: FiniteMap::raw(dst.b().size, beta),
            src,
            dst,
        }
    }

    pub fn identity(p: &Arc<Polynomial>) -> Self {
        let id = |n: usize| (0..n).collect::<Vec<_>>();
        PolyMor::raw(
            p.clone(),
            p.clone(),
            id(p.i().size),
            id(p.j().size),
            id(p.e().size),
            id(p.b().size),
        )
    }

    pub fn tables(&self) -> MorTables {
        MorTables {
            on_i: self.on_i.table.clone(),
            on_j: self.on_j.table.clone(),
            eps: self.eps.table.clone(),
            beta: self.beta.table.clone(),
        }
    }

    pub fn is_cartesian(&self) -> bool {
        validate_mor(self).valid
    }

    /// Injective on edges and on operations (the embedding condition for trees).
    pub fn is_injective(&self) -> bool {
        self.on_i.is_injective() && self.eps.is_injective() && self.beta.is_injective()
    }

    /// Inverse of an invertible morphism.
    pub fn inverse(&self) -> Result<PolyMor> {
        Ok(PolyMor {
            src: self.dst.clone(),
            dst: self.src.clone(),
            on_i: self.on_i.inverse()?,
            on_j: self.on_j.inverse()?,
            eps: self.eps.inverse()?,
            beta: self.beta.inverse()?,
        })
    }

    /// The component `P'(X) → P(X)` of the induced transformation. Only
    /// defined when both endpoint maps are identities.
    pub fn component(&self, x: &Family) -> Result<FamilyMap> {
        let identity = |m: &FiniteMap| m.dom.size == m.cod.size && m.table.iter().enumerate().all(|(k, &v)| k == v);
        if !identity(&self.on_i) || !identity(&self.on_j) {
            return Err(Error::shape("components need identity endpoint maps"));
        }
        if !self.is_cartesian() {
            return Err(Error::shape("components need a cartesian morphism"));
        }
        let guard = Guard::default();
        let src = evaluate_with(&self.src, x, guard)?;
        let dst = evaluate_with(&self.dst, x, guard)?;
        let index = dst.index();
        let table = src
            .parts
            .iter()
            .map(|(b_src, phi)| {
                let b = self.beta.table[*b_src];
                let mut out = vec![0; phi.len()];
                for (k, &e_src) in self.src.fiber(*b_src).iter().enumerate() {
                    out[self.dst.fiber_position(self.eps.table[e_src])] = phi[k];
                }
                index[&(b, out)]
            })
            .collect();
        FamilyMap::new(src.family, dst.family, table)
    }
}

pub fn validate_mor(m: &PolyMor) -> MorReport {
    let (src, dst) = (&*m.src, &*m.dst);
    let sizes = [
        ("on_I", &m.on_i, src.i().size, dst.i().size),
        ("on_J", &m.on_j, src.j().size, dst.j().size),
        ("eps", &m.eps, src.e().size, dst.e().size),
        ("beta", &m.beta, src.b().size, dst.b().size),
    ];
    for (name, map, d, c) in sizes {
        if map.dom.size != d || map.cod.size != c || map.table.len() != d {
            return MorReport::fail(format!("table `{name}` has the wrong shape"));
        }
    }
    for e in 0..src.e().size {
        let image = m.eps.table[e];
        if dst.s().table[image] != m.on_i.table[src.s().table[e]] {
            return MorReport::fail(format!("s-square fails at input {e}"));
        }
        if dst.p().table[image] != m.beta.table[src.p().table[e]] {
            return MorReport::fail(format!("p-square fails at input {e}"));
        }
    }
    for b in 0..src.b().size {
        if dst.t().table[m.beta.table[b]] != m.on_j.table[src.t().table[b]] {
            return MorReport::fail(format!("t-square fails at operation {b}"));
        }
    }
    for b in 0..src.b().size {
        let target = dst.fiber(m.beta.table[b]);
        let mut hit: Vec<usize> = src.fiber(b).iter().map(|&e| m.eps.table[e]).collect();
        hit.sort_unstable();
        hit.dedup();
        if hit.len() != src.arity(b) || hit.len() != target.len() {
            return MorReport::fail(format!(
                "not cartesian: eps is not a bijection on the fiber over operation {b}"
            ));
        }
    }
    MorReport::ok()
}

/// Vertical composite `g ∘ f`.
pub fn vcomp(g: &PolyMor, f: &PolyMor) -> Result<PolyMor> {
    if !Arc::ptr_eq(&f.dst, &g.src) && f.dst != g.src {
        return Err(Error::shape("vertical composition of non-composable morphisms"));
    }
    Ok(PolyMor {
        src: f.src.clone(),
        dst: g.dst.clone(),
        on_i: finset::compose(&g.on_i, &f.on_i)?,
        on_j: finset::compose(&g.on_j, &f.on_j)?,
        eps: finset::compose(&g.eps, &f.eps)?,
        beta: finset::compose(&g.beta, &f.beta)?,
    })
}

fn lookup<K: std::hash::Hash + Eq + std::fmt::Debug>(
    map: &std::collections::HashMap<K, usize>,
    key: &K,
) -> Result<usize> {
    map.get(key)
        .copied()
        .ok_or_else(|| Error::inconsistent(format!("no composite element {key:?}")))
}

/// Horizontal composite `ψ ∘ φ : Q' ∘ P' → Q ∘ P` of cartesian morphisms.
pub fn hcomp_mor(psi: &PolyMor, phi: &PolyMor) -> Result<PolyMor> {
    let src = compose_parts(&psi.src, &phi.src)?;
    let dst = compose_parts(&psi.dst, &phi.dst)?;
    hcomp_with(psi, phi, &src, &dst)
}

pub(crate) fn hcomp_with(psi: &PolyMor, phi: &PolyMor, src: &Composite, dst: &Composite) -> Result<PolyMor> {
    if phi.on_j.table != psi.on_i.table || phi.on_j.cod.size != psi.on_i.cod.size {
        return Err(Error::shape("horizontal composition: middle colour maps disagree"));
    }
    if !psi.is_cartesian() || !phi.is_cartesian() {
        return Err(Error::shape("horizontal composition needs cartesian morphisms"));
    }
    let mut beta = Vec::with_capacity(src.d_parts.len());
    for (c_src, phi_src) in &src.d_parts {
        let c = psi.beta.table[*c_src];
        let mut chosen = vec![0; phi_src.len()];
        for (k, &f_src) in psi.src.fiber(*c_src).iter().enumerate() {
            chosen[psi.dst.fiber_position(psi.eps.table[f_src])] = phi.beta.table[phi_src[k]];
        }
        beta.push(lookup(&dst.d_index, &(c, chosen))?);
    }
    let mut eps = Vec::with_capacity(src.g_parts.len());
    for &(d, f, e) in &src.g_parts {
        eps.push(lookup(&dst.g_index, &(beta[d], psi.eps.table[f], phi.eps.table[e]))?);
    }
    Ok(PolyMor::raw(
        Arc::new(src.poly.clone()),
        Arc::new(dst.poly.clone()),
        phi.on_i.table.clone(),
        psi.on_j.table.clone(),
        eps,
        beta,
    ))
}

fn identity_table(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// The associator `(R ∘ Q) ∘ P → R ∘ (Q ∘ P)` and its inverse.
pub fn associator(p: &Polynomial, q: &Polynomial, r: &Polynomial) -> Result<(PolyMor, PolyMor)> {
    let rq = compose_parts(r, q)?;
    let qp = compose_parts(q, p)?;
    let left = compose_parts(&rq.poly, p)?;
    let right = compose_parts(r, &qp.poly)?;

    let mut beta = Vec::with_capacity(left.d_parts.len());
    // for every left operation, the Q∘P operation chosen at each input of R
    let mut inner_ops: Vec<Vec<usize>> = Vec::with_capacity(left.d_parts.len());
    for (d_rq, phi) in &left.d_parts {
        let (c_r, chi) = &rq.d_parts[*d_rq];
        let mut chosen = Vec::with_capacity(chi.len());
        let mut cursor = 0;
        for &c_q in chi {
            let n = q.arity(c_q);
            chosen.push(lookup(&qp.d_index, &(c_q, phi[cursor..cursor + n].to_vec()))?);
            cursor += n;
        }
        beta.push(lookup(&right.d_index, &(*c_r, chosen.clone()))?);
        inner_ops.push(chosen);
    }
    let mut eps = Vec::with_capacity(left.g_parts.len());
    for &(d, g_rq, e) in &left.g_parts {
        let (_, f_r, f_q) = rq.g_parts[g_rq];
        let (c_r, _) = &rq.d_parts[left.d_parts[d].0];
        let k = r.fiber_position(f_r);
        debug_assert_eq!(r.p().table[f_r], *c_r);
        let g_qp = lookup(&qp.g_index, &(inner_ops[d][k], f_q, e))?;
        eps.push(lookup(&right.g_index, &(beta[d], f_r, g_qp))?);
    }
    let fwd = PolyMor::raw(
        Arc::new(left.poly.clone()),
        Arc::new(right.poly.clone()),
        identity_table(p.i().size),
        identity_table(r.j().size),
        eps,
        beta,
    );
    let bwd = fwd.inverse()?;
    Ok((fwd, bwd))
}

/// Unitor isomorphisms of `P`.
#[derive(Clone, Debug)]
pub struct Unitors {
    /// `id_J ∘ P → P`.
    pub left: PolyMor,
    pub left_inv: PolyMor,
    /// `P ∘ id_I → P`.
    pub right: PolyMor,
    pub right_inv: PolyMor,
}

pub fn unitors(p: &Polynomial) -> Result<Unitors> {
    let target = Arc::new(p.clone());
    let left_c = compose_parts(&identity_poly(p.j()), p)?;
    let beta = left_c.d_parts.iter().map(|(_, phi)| phi[0]).collect();
    let eps = left_c.g_parts.iter().map(|&(_, _, e)| e).collect();
    let left = PolyMor::raw(
        Arc::new(left_c.poly),
        target.clone(),
        identity_table(p.i().size),
        identity_table(p.j().size),
        eps,
        beta,
    );
    let right_c = compose_parts(p, &identity_poly(p.i()))?;
    let beta = right_c.d_parts.iter().map(|(b, _)| *b).collect();
    let eps = right_c.g_parts.iter().map(|&(_, f, _)| f).collect();
    let right = PolyMor::raw(
        Arc::new(right_c.poly),
        target,
        identity_table(p.i().size),
        identity_table(p.j().size),
        eps,
        beta,
    );
    Ok(Unitors {
        left_inv: left.inverse()?,
        right_inv: right.inverse()?,
        left,
        right,
    })
}

/// Whether the naturality square of the transformation induced by `m` at
/// the map of families `h` is a pullback.
pub fn naturality_is_pullback(m: &PolyMor, h: &FamilyMap) -> Result<bool> {
    let top = m.component(&h.src)?;
    let bottom = m.component(&h.dst)?;
    let left = evaluate_map(&m.src, h)?;
    let right = evaluate_map(&m.dst, h)?;
    finset::is_pullback_square(&top.map, &left.map, &right.map, &bottom.map)
}

/// `S ← S → S → T`, representing `f_!`.
pub fn pushforward_poly(f: &FiniteMap) -> Polynomial {
    let n = f.dom.size;
    let id = identity_table(n);
    Polynomial::assemble(n, f.cod.size, id.clone(), id, f.table.clone(), Tag::atoms(n), Tag::atoms(n))
}

/// `T ← S → S → S`, representing `f^*`.
pub fn pullback_poly(f: &FiniteMap) -> Polynomial {
    let n = f.dom.size;
    let id = identity_table(n);
    Polynomial::assemble(f.cod.size, n, f.table.clone(), id.clone(), id, Tag::atoms(n), Tag::atoms(n))
}

/// Unit `id → f^* ∘ f_!`, the diagonal `S → S ×_T S`.
pub fn adjunction_unit(f: &FiniteMap) -> Result<PolyMor> {
    let comp = compose_parts(&pullback_poly(f), &pushforward_poly(f))?;
    let n = f.dom.size;
    let mut beta = Vec::with_capacity(n);
    let mut eps = Vec::with_capacity(n);
    for x in 0..n {
        let d = lookup(&comp.d_index, &(x, vec![x]))?;
        beta.push(d);
        eps.push(lookup(&comp.g_index, &(d, x, x))?);
    }
    Ok(PolyMor::raw(
        Arc::new(identity_poly(&f.dom)),
        Arc::new(comp.poly),
        identity_table(n),
        identity_table(n),
        eps,
        beta,
    ))
}

/// Counit `f_! ∘ f^* → id`, acting by `f` on operations and inputs.
pub fn adjunction_counit(f: &FiniteMap) -> Result<PolyMor> {
    let comp = compose_parts(&pushforward_poly(f), &pullback_poly(f))?;
    let beta = comp.d_parts.iter().map(|(c, _)| f.table[*c]).collect();
    let eps = comp.g_parts.iter().map(|&(_, _, e)| f.table[e]).collect();
    let m = f.cod.size;
    Ok(PolyMor::raw(
        Arc::new(comp.poly),
        Arc::new(identity_poly(&f.cod)),
        identity_table(m),
        identity_table(m),
        eps,
        beta,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::tests::p_bin;
    use super::*;
    use crate::finset::FiniteSet;

    #[test]
    fn validate_mor_examples() {
        let p = Arc::new(p_bin());
        assert!(validate_mor(&PolyMor::identity(&p)).valid);
        let c2 = Arc::new(Polynomial::one_colour(&[2]));
        let collapse = PolyMor::new(c2.clone(), p.clone(), vec![0], vec![0], vec![0, 0], vec![1]).unwrap();
        let report = validate_mor(&collapse);
        assert!(!report.valid);
        assert!(report.failure.unwrap().contains("not cartesian"));
        let good = PolyMor::new(c2, p, vec![0], vec![0], vec![1, 0], vec![1]).unwrap();
        assert!(validate_mor(&good).valid);
    }

    #[test]
    fn associator_and_unitors_invert() {
        let p = p_bin();
        let (fwd, bwd) = associator(&p, &p, &p).unwrap();
        assert!(fwd.is_cartesian() && bwd.is_cartesian());
        let round = vcomp(&bwd, &fwd).unwrap();
        assert_eq!(round, PolyMor::identity(&fwd.src));
        let id = identity_poly(&FiniteSet::point());
        let (fwd, _) = associator(&id, &p, &p).unwrap();
        assert_eq!(fwd.beta.dom.size, 5);
        let u = unitors(&p).unwrap();
        assert!(u.left.is_cartesian() && u.right.is_cartesian());
        assert_eq!(vcomp(&u.left, &u.left_inv).unwrap(), PolyMor::identity(&u.left.dst));
    }

    #[test]
    fn hcomp_of_identities_is_identity() {
        let p = Arc::new(p_bin());
        let id = PolyMor::identity(&p);
        let h = hcomp_mor(&id, &id).unwrap();
        assert_eq!(h.eps.table, identity_table(h.src.e().size));
        assert_eq!(h.beta.table, identity_table(h.src.b().size));
    }

    #[test]
    fn adjunction_cells_are_cartesian() {
        let f = FiniteMap::from_table(2, vec![0, 1, 1]).unwrap();
        let unit = adjunction_unit(&f).unwrap();
        let counit = adjunction_counit(&f).unwrap();
        assert!(unit.is_cartesian() && counit.is_cartesian());
        assert_eq!(unit.dst.b().size, 1 + 4);
        let x = Family::new(3, vec![0, 1, 1, 2]).unwrap();
        let y = Family::new(3, vec![0, 1, 2]).unwrap();
        let h = FamilyMap::new(x, y, vec![0, 1, 1, 2]).unwrap();
        assert!(naturality_is_pullback(&unit, &h).unwrap());
    }
}

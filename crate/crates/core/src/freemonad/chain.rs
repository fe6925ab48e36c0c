use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::coproduct;
use crate::error::{Error, Result};
use crate::guard::Guard;
use crate::poly::{compose_guarded, identity_poly, PolyMor, Polynomial};
use crate::tag::Tag;

/// `[P_0, …, P_h]` with `P_0 = id` and `P_{k+1} = id ⊔ P ∘ P_k`.
pub fn pn_chain_all(p: &Polynomial, h: usize, guard: Guard) -> Result<Vec<Polynomial>> {
    if !p.is_endo_shaped() {
        return Err(Error::shape("the chain needs an endofunctor (I = J)"));
    }
    let id = identity_poly(p.i());
    let mut out = vec![id.clone()];
    for k in 0..h {
        let comp = compose_guarded(p, &out[k], guard)?;
        out.push(coproduct(&id, &comp.poly)?);
    }
    Ok(out)
}

pub fn pn_chain(p: &Polynomial, h: usize, guard: Guard) -> Result<Polynomial> {
    pn_chain_all(p, h, guard).map(|mut v| v.pop().expect("nonempty chain"))
}

/// Structural description of the chain on element tags.
///
/// Operations of `P_0` are tagged by their colour; operations of `P_{h+1}`
/// are `(0, i)` for the identity summand and `(1, (b, (y_1 … y_k)))` with
/// `y_j` operations of `P_h`. Inputs follow the tags of composites and
/// coproducts. Every map of the chain acts on these tags without the
/// polynomials ever being built.
pub struct ChainTags<'a> {
    p: &'a Polynomial,
    ops: HashMap<Tag, usize>,
    inputs: HashMap<Tag, usize>,
}

fn bad(tag: &Tag, what: &str) -> Error {
    Error::inconsistent(format!("tag {tag} is not {what}"))
}

fn parts<'t>(tag: &'t Tag, n: usize, what: &str) -> Result<&'t [Tag]> {
    match tag.as_seq() {
        Some(s) if s.len() == n => Ok(s),
        _ => Err(bad(tag, what)),
    }
}

impl<'a> ChainTags<'a> {
    pub fn new(p: &'a Polynomial) -> Self {
        ChainTags {
            p,
            ops: p.b_lookup(),
            inputs: p.e_lookup(),
        }
    }

    fn op(&self, tag: &Tag) -> Result<usize> {
        self.ops.get(tag).copied().ok_or_else(|| bad(tag, "an operation of P"))
    }

    /// Splits a chain operation tag of `P_h`, `h ≥ 1`, into the identity
    /// colour or `(b, ys)`.
    fn split<'t>(&self, b: &'t Tag) -> Result<std::result::Result<&'t Tag, (usize, &'t Tag, &'t [Tag])>> {
        match b.as_inj() {
            Some((0, i)) => Ok(Ok(i)),
            Some((1, inner)) => {
                let s = parts(inner, 2, "a composite operation")?;
                let ys = s[1].as_seq().ok_or_else(|| bad(inner, "a composite operation"))?;
                Ok(Err((self.op(&s[0])?, inner, ys)))
            }
            _ => Err(bad(b, "a chain operation")),
        }
    }

    pub fn arity(&self, h: usize, b: &Tag) -> Result<usize> {
        if h == 0 {
            return Ok(1);
        }
        match self.split(b)? {
            Ok(_) => Ok(1),
            Err((_, _, ys)) => ys.iter().map(|y| self.arity(h - 1, y)).sum(),
        }
    }

    /// The inputs of a `P_h` operation, in fiber order.
    pub fn fiber(&self, h: usize, b: &Tag) -> Result<Vec<Tag>> {
        if h == 0 {
            return Ok(vec![b.clone()]);
        }
        match self.split(b)? {
            Ok(i) => Ok(vec![Tag::inj(0, i.clone())]),
            Err((op, inner, ys)) => {
                let fib = self.p.fiber(op);
                if fib.len() != ys.len() {
                    return Err(bad(b, "a composite of the right arity"));
                }
                let mut out = Vec::new();
                for (&f, y) in fib.iter().zip(ys) {
                    for e in self.fiber(h - 1, y)? {
                        out.push(Tag::inj(1, Tag::triple(inner.clone(), self.p.e_tags()[f].clone(), e)));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Inputs of an operation `(c, xs)` of `P_n ∘ P_m`, in fiber order.
    pub fn composite_fiber(&self, n: usize, m: usize, d: &Tag) -> Result<Vec<Tag>> {
        let s = parts(d, 2, "a composite operation")?;
        let xs = s[1].as_seq().ok_or_else(|| bad(d, "a composite operation"))?;
        let fib = self.fiber(n, &s[0])?;
        if fib.len() != xs.len() {
            return Err(bad(d, "a composite of the right arity"));
        }
        let mut out = Vec::new();
        for (f, x) in fib.iter().zip(xs) {
            for e in self.fiber(m, x)? {
                out.push(Tag::triple(d.clone(), f.clone(), e));
            }
        }
        Ok(out)
    }

    /// `f_{h+1} : P_h → P_{h+1}` on operations.
    pub fn transition_b(&self, h: usize, b: &Tag) -> Result<Tag> {
        if h == 0 {
            return Ok(Tag::inj(0, b.clone()));
        }
        match self.split(b)? {
            Ok(_) => Ok(b.clone()),
            Err((_, inner, ys)) => Ok(Tag::inj(1, self.push_b(h - 1, inner, ys)?)),
        }
    }

    /// `P(f_h)` on a composite operation `(b, ys)` of `P ∘ P_{h-1}`.
    fn push_b(&self, h: usize, inner: &Tag, ys: &[Tag]) -> Result<Tag> {
        let b = &inner.as_seq().expect("checked by split")[0];
        let ys: Result<Vec<Tag>> = ys.iter().map(|y| self.transition_b(h, y)).collect();
        Ok(Tag::pair(b.clone(), Tag::seq(ys?)))
    }

    /// `f_{h+1} : P_h → P_{h+1}` on inputs.
    pub fn transition_e(&self, h: usize, e: &Tag) -> Result<Tag> {
        if h == 0 {
            return Ok(Tag::inj(0, e.clone()));
        }
        match e.as_inj() {
            Some((0, _)) => Ok(e.clone()),
            Some((1, inner)) => {
                let s = parts(inner, 3, "a composite input")?;
                let d = parts(&s[0], 2, "a composite operation")?;
                let ys = d[1].as_seq().ok_or_else(|| bad(&s[0], "a composite operation"))?;
                let d = self.push_b(h - 1, &s[0], ys)?;
                Ok(Tag::inj(1, Tag::triple(d, s[1].clone(), self.transition_e(h - 1, &s[2])?)))
            }
            _ => Err(bad(e, "a chain input")),
        }
    }

    /// Composite `P_from → P_to` of transitions, on operations.
    pub fn chain_b(&self, from: usize, to: usize, b: &Tag) -> Result<Tag> {
        (from..to).try_fold(b.clone(), |acc, h| self.transition_b(h, &acc))
    }

    pub fn chain_e(&self, from: usize, to: usize, e: &Tag) -> Result<Tag> {
        (from..to).try_fold(e.clone(), |acc, h| self.transition_e(h, &acc))
    }

    /// `μ_{m,n} : P_n ∘ P_m → P_{m+n}` on operations `(c, xs)`.
    pub fn mu_b(&self, m: usize, n: usize, d: &Tag) -> Result<Tag> {
        let s = parts(d, 2, "a composite operation")?;
        let xs = s[1].as_seq().ok_or_else(|| bad(d, "a composite operation"))?;
        if n == 0 {
            return match xs {
                [x] => Ok(x.clone()),
                _ => Err(bad(d, "an operation of id ∘ P_m")),
            };
        }
        match self.split(&s[0])? {
            Ok(_) => match xs {
                [x] => self.chain_b(m, m + n, x),
                _ => Err(bad(d, "an operation over the identity summand")),
            },
            Err((_, inner, ys)) => Ok(Tag::inj(1, self.mu_inner(m, n, inner, ys, xs)?.0)),
        }
    }

    /// Regroups `((b, ys), xs)` as `(b, ((y_k, chunk_k))_k)` and applies
    /// `P(μ_{m,n-1})`; also returns the regrouped pieces.
    fn mu_inner(&self, m: usize, n: usize, inner: &Tag, ys: &[Tag], xs: &[Tag]) -> Result<(Tag, Vec<Tag>)> {
        let b = &inner.as_seq().expect("checked by split")[0];
        let mut cursor = 0;
        let mut pieces = Vec::with_capacity(ys.len());
        let mut zs = Vec::with_capacity(ys.len());
        for y in ys {
            let k = self.arity(n - 1, y)?;
            let chunk = xs
                .get(cursor..cursor + k)
                .ok_or_else(|| Error::inconsistent("composite operation has too few inputs"))?;
            cursor += k;
            let piece = Tag::pair(y.clone(), Tag::seq(chunk.iter().cloned()));
            zs.push(self.mu_b(m, n - 1, &piece)?);
            pieces.push(piece);
        }
        if cursor != xs.len() {
            return Err(Error::inconsistent("composite operation has too many inputs"));
        }
        Ok((Tag::pair(b.clone(), Tag::seq(zs)), pieces))
    }

    /// `μ_{m,n}` on inputs `(d, f, e)`.
    pub fn mu_e(&self, m: usize, n: usize, g: &Tag) -> Result<Tag> {
        let s = parts(g, 3, "a composite input")?;
        let (d, f, e) = (&s[0], &s[1], &s[2]);
        if n == 0 {
            return Ok(e.clone());
        }
        match f.as_inj() {
            Some((0, _)) => self.chain_e(m, m + n, e),
            Some((1, f_inner)) => {
                let fs = parts(f_inner, 3, "a composite input")?;
                let (cin, fp, e_prime) = (&fs[0], &fs[1], &fs[2]);
                let ds = parts(d, 2, "a composite operation")?;
                let xs = ds[1].as_seq().ok_or_else(|| bad(d, "a composite operation"))?;
                let cs = parts(cin, 2, "a composite operation")?;
                let ys = cs[1].as_seq().ok_or_else(|| bad(cin, "a composite operation"))?;
                let (image, pieces) = self.mu_inner(m, n, cin, ys, xs)?;
                let fp_index = self.inputs.get(fp).copied().ok_or_else(|| bad(fp, "an input of P"))?;
                let k = self.p.fiber_position(fp_index);
                let inner = Tag::triple(pieces[k].clone(), e_prime.clone(), e.clone());
                Ok(Tag::inj(1, Tag::triple(image, fp.clone(), self.mu_e(m, n - 1, &inner)?)))
            }
            _ => Err(bad(f, "a chain input")),
        }
    }

    /// `f_{n+1} ∘ P_m : P_n ∘ P_m → P_{n+1} ∘ P_m` on operations.
    pub fn whisker_outer_b(&self, n: usize, m: usize, d: &Tag) -> Result<Tag> {
        let s = parts(d, 2, "a composite operation")?;
        let xs = s[1].as_seq().ok_or_else(|| bad(d, "a composite operation"))?;
        let _ = m;
        let c = self.transition_b(n, &s[0])?;
        let src_fib = self.fiber(n, &s[0])?;
        let dst_fib = self.fiber(n + 1, &c)?;
        let mut out = vec![None; xs.len()];
        for (k, f) in src_fib.iter().enumerate() {
            let image = self.transition_e(n, f)?;
            let pos = dst_fib
                .iter()
                .position(|x| *x == image)
                .ok_or_else(|| Error::inconsistent("transition leaves its fiber"))?;
            out[pos] = Some(xs[k].clone());
        }
        let xs: Option<Vec<Tag>> = out.into_iter().collect();
        let xs = xs.ok_or_else(|| Error::inconsistent("transition is not a fiber bijection"))?;
        Ok(Tag::pair(c, Tag::seq(xs)))
    }

    pub fn whisker_outer_e(&self, n: usize, m: usize, g: &Tag) -> Result<Tag> {
        let s = parts(g, 3, "a composite input")?;
        Ok(Tag::triple(self.whisker_outer_b(n, m, &s[0])?, self.transition_e(n, &s[1])?, s[2].clone()))
    }

    /// `P_n(f_{m+1}) : P_n ∘ P_m → P_n ∘ P_{m+1}` on operations.
    pub fn whisker_inner_b(&self, m: usize, d: &Tag) -> Result<Tag> {
        let s = parts(d, 2, "a composite operation")?;
        let xs = s[1].as_seq().ok_or_else(|| bad(d, "a composite operation"))?;
        let xs: Result<Vec<Tag>> = xs.iter().map(|x| self.transition_b(m, x)).collect();
        Ok(Tag::pair(s[0].clone(), Tag::seq(xs?)))
    }

    pub fn whisker_inner_e(&self, m: usize, g: &Tag) -> Result<Tag> {
        let s = parts(g, 3, "a composite input")?;
        Ok(Tag::triple(self.whisker_inner_b(m, &s[0])?, s[1].clone(), self.transition_e(m, &s[2])?))
    }
}

fn lookup(index: &HashMap<Tag, usize>, tag: &Tag) -> Result<usize> {
    index
        .get(tag)
        .copied()
        .ok_or_else(|| Error::inconsistent(format!("{tag} is not an element of the target")))
}

/// Materializes a tag-level map between two built polynomials.
fn materialize(
    src: Polynomial,
    dst: Polynomial,
    on_b: impl Fn(&Tag) -> Result<Tag>,
    on_e: impl Fn(&Tag) -> Result<Tag>,
) -> Result<PolyMor> {
    let b_index = dst.b_lookup();
    let e_index = dst.e_lookup();
    let beta = src.b_tags().iter().map(|t| lookup(&b_index, &on_b(t)?)).collect::<Result<Vec<_>>>()?;
    let eps = src.e_tags().iter().map(|t| lookup(&e_index, &on_e(t)?)).collect::<Result<Vec<_>>>()?;
    let ids = |n: usize| (0..n).collect::<Vec<_>>();
    let (ni, nj) = (src.i().size, src.j().size);
    PolyMor::new(Arc::new(src), Arc::new(dst), ids(ni), ids(nj), eps, beta)
}

/// The transition `f_{h+1} : P_h → P_{h+1}`.
pub fn transition(p: &Polynomial, h: usize, guard: Guard) -> Result<PolyMor> {
    let mut chain = pn_chain_all(p, h + 1, guard)?;
    let dst = chain.pop().expect("h + 2 stages");
    let src = chain.pop().expect("h + 2 stages");
    let tags = ChainTags::new(p);
    materialize(src, dst, |b| tags.transition_b(h, b), |e| tags.transition_e(h, e))
}

/// The multiplication cell `μ_{m,n} : P_n ∘ P_m → P_{m+n}`.
pub fn mu_mn(p: &Polynomial, m: usize, n: usize, guard: Guard) -> Result<PolyMor> {
    let chain = pn_chain_all(p, m + n, guard)?;
    let src = compose_guarded(&chain[n], &chain[m], guard)?.poly;
    let tags = ChainTags::new(p);
    materialize(src, chain[m + n].clone(), |b| tags.mu_b(m, n, b), |e| tags.mu_e(m, n, e))
}

/// Outcome of checking both compatibility squares of `μ_{m,n}` with the
/// transitions, elementwise on operations and inputs of `P_n ∘ P_m`.
#[derive(Clone, Debug, Serialize)]
pub struct SquareReport {
    pub m: usize,
    pub n: usize,
    pub operations_checked: usize,
    pub inputs_checked: usize,
    /// `f ∘ μ_{m,n} = μ_{m,n+1} ∘ (f_{n+1} ∘ P_m)`.
    pub outer_square: bool,
    /// `f ∘ μ_{m,n} = μ_{m+1,n} ∘ P_n(f_{m+1})`.
    pub inner_square: bool,
    pub witness: Option<String>,
}

pub fn mu_squares(p: &Polynomial, m: usize, n: usize, guard: Guard) -> Result<SquareReport> {
    let chain = pn_chain_all(p, m.max(n), guard)?;
    let dom = compose_guarded(&chain[n], &chain[m], guard)?.poly;
    let tags = ChainTags::new(p);
    let mut report = SquareReport {
        m,
        n,
        operations_checked: dom.b().size,
        inputs_checked: dom.e().size,
        outer_square: true,
        inner_square: true,
        witness: None,
    };
    let top = m + n;
    for d in dom.b_tags() {
        let image = tags.transition_b(top, &tags.mu_b(m, n, d)?)?;
        let outer = tags.mu_b(m, n + 1, &tags.whisker_outer_b(n, m, d)?)?;
        let inner = tags.mu_b(m + 1, n, &tags.whisker_inner_b(m, d)?)?;
        if report.outer_square && image != outer {
            report.outer_square = false;
            report.witness.get_or_insert(format!("outer square at operation {d}"));
        }
        if report.inner_square && image != inner {
            report.inner_square = false;
            report.witness.get_or_insert(format!("inner square at operation {d}"));
        }
    }
    for g in dom.e_tags() {
        let image = tags.transition_e(top, &tags.mu_e(m, n, g)?)?;
        let outer = tags.mu_e(m, n + 1, &tags.whisker_outer_e(n, m, g)?)?;
        let inner = tags.mu_e(m + 1, n, &tags.whisker_inner_e(m, g)?)?;
        if report.outer_square && image != outer {
            report.outer_square = false;
            report.witness.get_or_insert(format!("outer square at input {g}"));
        }
        if report.inner_square && image != inner {
            report.inner_square = false;
            report.witness.get_or_insert(format!("inner square at input {g}"));
        }
    }
    Ok(report)
}

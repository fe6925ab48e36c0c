use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::morphism::PolyMor;
use super::Polynomial;
use crate::error::{Error, Result};
use crate::finset::for_each_tuple;
use crate::guard::Guard;

/// How the endpoint maps of enumerated morphisms are constrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoints {
    /// `on_I` and `on_J` are identities.
    Fixed,
    /// Endofunctor maps: a single colour map serves as both `on_I` and `on_J`.
    Endo,
    /// `on_I` and `on_J` are chosen independently.
    Free,
}

struct Search<'a> {
    src: &'a Polynomial,
    dst: &'a Polynomial,
    mode: Endpoints,
    guard: Guard,
    out: Vec<PolyMor>,
    src_arc: Arc<Polynomial>,
    dst_arc: Arc<Polynomial>,
}

#[derive(Clone)]
struct State {
    on_i: Vec<Option<usize>>,
    on_j: Vec<Option<usize>>,
    eps: Vec<usize>,
    beta: Vec<usize>,
}

impl State {
    fn colour_j(&self, mode: Endpoints, j: usize) -> Option<usize> {
        match mode {
            Endpoints::Endo => self.on_i[j],
            _ => self.on_j[j],
        }
    }

    fn set_j(&mut self, mode: Endpoints, j: usize, v: usize) {
        match mode {
            Endpoints::Endo => self.on_i[j] = Some(v),
            _ => self.on_j[j] = Some(v),
        }
    }
}

impl Search<'_> {
    fn run(&mut self, state: State, b_src: usize) -> Result<()> {
        if b_src == self.src.b().size {
            return self.finish(state);
        }
        let n = self.src.arity(b_src);
        let j_src = self.src.t().table[b_src];
        let fiber_src = self.src.fiber(b_src);
        for b in 0..self.dst.b().size {
            if self.dst.arity(b) != n {
                continue;
            }
            let j = self.dst.t().table[b];
            let mut st = state.clone();
            match st.colour_j(self.mode, j_src) {
                Some(v) if v != j => continue,
                Some(_) => {}
                None => st.set_j(self.mode, j_src, j),
            }
            st.beta.push(b);
            let fiber = self.dst.fiber(b);
            'perm: for perm in (0..n).permutations(n) {
                let mut inner = st.clone();
                for (k, &e_src) in fiber_src.iter().enumerate() {
                    let e = fiber[perm[k]];
                    let (i_src, i) = (self.src.s().table[e_src], self.dst.s().table[e]);
                    match inner.on_i[i_src] {
                        Some(v) if v != i => continue 'perm,
                        Some(_) => {}
                        None => inner.on_i[i_src] = Some(i),
                    }
                    inner.eps[e_src] = e;
                }
                self.run(inner, b_src + 1)?;
            }
        }
        Ok(())
    }

    fn finish(&mut self, state: State) -> Result<()> {
        let ni = self.dst.i().size;
        let nj = self.dst.j().size;
        let free_i: Vec<usize> = (0..state.on_i.len()).filter(|&k| state.on_i[k].is_none()).collect();
        let free_j: Vec<usize> = match self.mode {
            Endpoints::Free => (0..state.on_j.len()).filter(|&k| state.on_j[k].is_none()).collect(),
            _ => Vec::new(),
        };
        let mut bounds = vec![ni; free_i.len()];
        bounds.extend(std::iter::repeat_n(nj, free_j.len()));
        let mut result = Ok(());
        for_each_tuple(&bounds, |t| {
            if result.is_err() {
                return;
            }
            let mut on_i = state.on_i.clone();
            for (k, &x) in free_i.iter().enumerate() {
                on_i[x] = Some(t[k]);
            }
            let mut on_j = state.on_j.clone();
            for (k, &x) in free_j.iter().enumerate() {
                on_j[x] = Some(t[free_i.len() + k]);
            }
            let on_i: Vec<usize> = on_i.into_iter().map(Option::unwrap).collect();
            let on_j: Vec<usize> = match self.mode {
                Endpoints::Endo => on_i.clone(),
                _ => on_j.into_iter().map(Option::unwrap).collect(),
            };
            if self.out.len() as u64 >= self.guard.limit() {
                result = self.guard.check("polynomial morphisms", self.out.len() as u128 + 1);
                return;
            }
            self.out.push(PolyMor::raw(
                self.src_arc.clone(),
                self.dst_arc.clone(),
                on_i,
                on_j,
                state.eps.clone(),
                state.beta.clone(),
            ));
        });
        result
    }
}

/// Every cartesian morphism `P' → P`, in search order: operations of `P'`
/// are matched in turn against operations of `P` of the same arity, fiber
/// bijections in lexicographic order, and colours left unconstrained by any
/// operation are enumerated last.
pub fn hom_poly(src: &Polynomial, dst: &Polynomial, mode: Endpoints, guard: Guard) -> Result<Vec<PolyMor>> {
    let on_j_len = match mode {
        Endpoints::Fixed => {
            if src.i().size != dst.i().size || src.j().size != dst.j().size {
                return Err(Error::shape("fixed endpoints need equal colour sets"));
            }
            src.j().size
        }
        Endpoints::Endo => {
            if !src.is_endo_shaped() || !dst.is_endo_shaped() {
                return Err(Error::shape("endofunctor morphisms need I = J on both sides"));
            }
            0
        }
        Endpoints::Free => src.j().size,
    };
    let (on_i, on_j) = match mode {
        Endpoints::Fixed => (
            (0..src.i().size).map(Some).collect(),
            (0..src.j().size).map(Some).collect(),
        ),
        _ => (vec![None; src.i().size], vec![None; on_j_len]),
    };
    let mut search = Search {
        src,
        dst,
        mode,
        guard,
        out: Vec::new(),
        src_arc: Arc::new(src.clone()),
        dst_arc: Arc::new(dst.clone()),
    };
    let state = State {
        on_i,
        on_j,
        eps: vec![0; src.e().size],
        beta: Vec::with_capacity(src.b().size),
    };
    search.run(state, 0)?;
    Ok(search.out)
}

#[cfg(test)]
mod tests {
    use super::super::{identity_poly, tests::p_bin, validate_mor};
    use super::*;
    use crate::finset::FiniteSet;

    #[test]
    fn hom_examples() {
        let eta = Polynomial::from_operations(1, 1, &[]).unwrap();
        let two = Polynomial::from_operations(2, 2, &[(vec![0, 1], 1), (vec![], 0)]).unwrap();
        assert_eq!(hom_poly(&eta, &two, Endpoints::Endo, Guard::default()).unwrap().len(), 2);

        let c2 = Polynomial::one_colour(&[2]);
        let homs = hom_poly(&c2, &p_bin(), Endpoints::Fixed, Guard::default()).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(homs.iter().all(|m| validate_mor(m).valid));

        let p = Arc::new(p_bin());
        let ends = hom_poly(&p, &p, Endpoints::Fixed, Guard::default()).unwrap();
        assert!(ends.contains(&PolyMor::identity(&p)));
    }

    #[test]
    fn hom_respects_guard() {
        let eta = Polynomial::from_operations(1, 1, &[]).unwrap();
        let wide = identity_poly(&FiniteSet::new(10));
        assert!(hom_poly(&eta, &wide, Endpoints::Endo, Guard(5)).is_err());
    }
}

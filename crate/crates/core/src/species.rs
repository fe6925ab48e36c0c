//! Symmetric sequences and exact generating functions.
//!
//! A symmetric sequence stores, for each arity `n`, a finite set `B_n` with
//! an action of `Σ_n` given by the images of the adjacent transpositions.

use std::ops::{Add, Mul};

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{orbit_count, FiniteMap};
use crate::guard::{sat_mul, sat_pow, Guard};
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSymSeq", into = "RawSymSeq")]
pub struct SymSeq {
    sizes: Vec<usize>,
    /// `actions[n][k]` is the action of the transposition `(k k+1)` on `B_n`.
    actions: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawSymSeq {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "B")]
    b: Vec<usize>,
    #[serde(default)]
    actions: Option<Vec<Vec<Vec<usize>>>>,
}

impl TryFrom<RawSymSeq> for SymSeq {
    type Error = Error;

    fn try_from(raw: RawSymSeq) -> Result<Self> {
        if raw.b.len() != raw.n + 1 {
            return Err(Error::shape(format!(
                "expected {} sizes for N = {}, found {}",
                raw.n + 1,
                raw.n,
                raw.b.len()
            )));
        }
        match raw.actions {
            Some(actions) => SymSeq::new(raw.b, actions),
            None => Ok(SymSeq::trivial(raw.b)),
        }
    }
}

impl From<SymSeq> for RawSymSeq {
    fn from(s: SymSeq) -> Self {
        RawSymSeq {
            n: s.max_arity(),
            b: s.sizes,
            actions: Some(s.actions),
        }
    }
}

fn compose_perm(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&x| g[x]).collect()
}

impl SymSeq {
    /// Checks that every generator is a bijection and that the Coxeter
    /// relations of `Σ_n` hold.
    pub fn new(sizes: Vec<usize>, actions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if actions.len() != sizes.len() {
            return Err(Error::InvalidAction(format!(
                "{} action lists for {} arities",
                actions.len(),
                sizes.len()
            )));
        }
        for (n, gens) in actions.iter().enumerate() {
            let expected = n.saturating_sub(1);
            if gens.len() != expected {
                return Err(Error::InvalidAction(format!(
                    "arity {n} needs {expected} generators, found {}",
                    gens.len()
                )));
            }
            for (k, g) in gens.iter().enumerate() {
                let map = FiniteMap::from_table(sizes[n], g.clone())
                    .map_err(|e| Error::InvalidAction(format!("arity {n}, generator {k}: {e}")))?;
                if g.len() != sizes[n] || !map.is_bijective() {
                    return Err(Error::InvalidAction(format!(
                        "arity {n}, generator {k} is not a permutation of B_{n}"
                    )));
                }
            }
            let id: Vec<usize> = (0..sizes[n]).collect();
            for k in 0..gens.len() {
                if compose_perm(&gens[k], &gens[k]) != id {
                    return Err(Error::InvalidAction(format!("arity {n}: generator {k} is not an involution")));
                }
                if k + 1 < gens.len() {
                    let (a, b) = (&gens[k], &gens[k + 1]);
                    if compose_perm(a, &compose_perm(b, a)) != compose_perm(b, &compose_perm(a, b)) {
                        return Err(Error::InvalidAction(format!(
                            "arity {n}: braid relation fails for generators {k}, {}",
                            k + 1
                        )));
                    }
                }
                for l in k + 2..gens.len() {
                    if compose_perm(&gens[k], &gens[l]) != compose_perm(&gens[l], &gens[k]) {
                        return Err(Error::InvalidAction(format!(
                            "arity {n}: generators {k} and {l} do not commute"
                        )));
                    }
                }
            }
        }
        Ok(SymSeq { sizes, actions })
    }

    /// Trivial actions on sets of the given sizes.
    pub fn trivial(sizes: Vec<usize>) -> Self {
        let actions = sizes
            .iter()
            .enumerate()
            .map(|(n, &m)| vec![(0..m).collect(); n.saturating_sub(1)])
            .collect();
        SymSeq { sizes, actions }
    }

    /// `B_n = m_n` copies of `Σ_n`, acted on freely by left multiplication.
    pub fn regular(multiplicities: &[usize]) -> Self {
        let mut sizes = Vec::new();
        let mut actions = Vec::new();
        for (n, &m) in multiplicities.iter().enumerate() {
            let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
            let index: std::collections::HashMap<&[usize], usize> =
                perms.iter().enumerate().map(|(k, p)| (p.as_slice(), k)).collect();
            let nf = perms.len();
            let mut gens = Vec::new();
            for k in 0..n.saturating_sub(1) {
                let mut table = Vec::with_capacity(m * nf);
                for copy in 0..m {
                    for p in &perms {
                        let moved: Vec<usize> = p
                            .iter()
                            .map(|&x| if x == k { k + 1 } else if x == k + 1 { k } else { x })
                            .collect();
                        table.push(copy * nf + index[moved.as_slice()]);
                    }
                }
                gens.push(table);
            }
            sizes.push(m * nf);
            actions.push(gens);
        }
        SymSeq { sizes, actions }
    }

    pub fn max_arity(&self) -> usize {
        self.sizes.len().saturating_sub(1)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, n: usize) -> usize {
        self.sizes.get(n).copied().unwrap_or(0)
    }

    pub fn generators(&self, n: usize) -> &[Vec<usize>] {
        &self.actions[n]
    }
}

/// A power series truncated at order `N`, with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl PowerSeries {
    /// Coefficients `c_0..c_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        PowerSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        PowerSeries::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries::new(vec![BigRational::zero(); order + 1])
    }

    /// `x` truncated at `order ≥ 1`.
    pub fn x(order: usize) -> Self {
        let mut s = PowerSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    /// `exp(x)` truncated at `order`.
    pub fn exp(order: usize) -> Self {
        PowerSeries::new((0..=order).map(|n| BigRational::new(BigInt::one(), factorial(n))).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        PowerSeries::new((0..=order).map(|n| self.coeff(n)).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `g(f)` for `f` and `g` read as exact polynomials; the result has
    /// order `order(g) · order(f)`.
    pub fn substitute_exact(&self, f: &PowerSeries) -> PowerSeries {
        let order = self.order() * f.order();
        let f = f.truncate(order);
        let mut acc = PowerSeries::zero(order);
        let mut power = PowerSeries::zero(order);
        power.coeffs[0] = BigRational::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = &power * &f;
            }
            for n in 0..=order {
                acc.coeffs[n] += c * &power.coeffs[n];
            }
        }
        acc
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries::new((0..=order).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect())
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;

    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries::new(out)
    }
}

/// `c_n = |B_n| / n!`.
pub fn egf(s: &SymSeq) -> PowerSeries {
    PowerSeries::new(
        s.sizes
            .iter()
            .enumerate()
            .map(|(n, &m)| BigRational::new(BigInt::from(m), factorial(n)))
            .collect(),
    )
}

/// Groupoid cardinality `Σ_n |B_n| xⁿ / n!` of the evaluation at a set of size `x`.
pub fn htpy_eval_card(s: &SymSeq, x: usize) -> BigRational {
    egf(s).eval(&rat(x as i64))
}

/// Number of elements of `Σ_n (B_n × Xⁿ)/Σ_n`, counted as orbits.
pub fn set_eval_card(s: &SymSeq, x: usize, guard: Guard) -> Result<usize> {
    let mut total = 0;
    for (n, &m) in s.sizes.iter().enumerate() {
        let tuples = sat_pow(x as u128, n);
        guard.check("orbit enumeration", sat_mul(m as u128, tuples))?;
        let tuples = tuples as usize;
        let size = m * tuples;
        // element (b, v) is encoded as b * x^n + digits of v, most significant first
        let digit = |code: usize, k: usize| (code / x.pow((n - 1 - k) as u32)) % x;
        let gens: Vec<Vec<usize>> = s.actions[n]
            .iter()
            .enumerate()
            .map(|(k, g)| {
                (0..size)
                    .map(|el| {
                        let (b, v) = (el / tuples, el % tuples);
                        let (a, c) = (digit(v, k), digit(v, k + 1));
                        let w = v - a * x.pow((n - 1 - k) as u32) - c * x.pow((n - 2 - k) as u32)
                            + c * x.pow((n - 1 - k) as u32)
                            + a * x.pow((n - 2 - k) as u32);
                        g[b] * tuples + w
                    })
                    .collect()
            })
            .collect();
        total += orbit_count(size, &gens)?;
    }
    Ok(total)
}

/// Calls `visit` with the block sizes of every set partition of `0..n` into
/// nonempty blocks, via restricted growth strings.
fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    fn go(k: usize, n: usize, blocks: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == n {
            visit(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] += 1;
            go(k + 1, n, blocks, visit);
            blocks[b] -= 1;
        }
        blocks.push(1);
        go(k + 1, n, blocks, visit);
        blocks.pop();
    }
    go(0, n, &mut Vec::new(), &mut visit);
}

/// `|(G ∘ F)_n|` by direct enumeration of set partitions of `{1..n}` into
/// nonempty blocks. `F_0` plays no role.
pub fn compose_card(g: &SymSeq, f: &SymSeq, n: usize) -> Result<BigUint> {
    let available = g.max_arity().min(f.max_arity());
    if n > available {
        return Err(Error::Truncation {
            requested: n,
            available,
        });
    }
    let mut total = BigUint::zero();
    for_each_partition(n, |blocks| {
        let term = blocks
            .iter()
            .fold(BigUint::from(g.size(blocks.len())), |acc, &b| acc * BigUint::from(f.size(b)));
        total += term;
    });
    Ok(total)
}

/// `g(f(x))` truncated at `min(order(g), order(f))`; needs `f(0) = 0`.
pub fn series_substitute(g: &PowerSeries, f: &PowerSeries) -> Result<PowerSeries> {
    if !f.coeffs[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let order = g.order().min(f.order());
    let f = f.truncate(order);
    let mut acc = PowerSeries::zero(order);
    let mut power = PowerSeries::zero(order);
    power.coeffs[0] = BigRational::one();
    for k in 0..=order {
        if k > 0 {
            power = &power * &f;
        }
        for n in k..=order {
            acc.coeffs[n] += &g.coeffs[k] * &power.coeffs[n];
        }
    }
    Ok(acc)
}

/// `n! · [xⁿ] G(F(x))` with the constant term of `F` dropped; equals
/// [`compose_card`] by Faà di Bruno.
pub fn compose_card_via_series(g: &SymSeq, f: &SymSeq, n: usize) -> Result<BigRational> {
    let mut inner = egf(f).truncate(n);
    inner.coeffs[0] = BigRational::zero();
    let outer = egf(g).truncate(n);
    Ok(series_substitute(&outer, &inner)?.coeff(n) * BigRational::from_integer(factorial(n)))
}

/// `Σ_b x^{|E_b|}` for a one-colour polynomial.
pub fn ogf_of_polynomial(p: &Polynomial) -> Result<PowerSeries> {
    if p.i().size != 1 || p.j().size != 1 {
        return Err(Error::MultiColour);
    }
    let mut coeffs = vec![BigRational::zero(); p.max_arity() + 1];
    for n in p.arities() {
        coeffs[n] += BigRational::one();
    }
    Ok(PowerSeries::new(coeffs))
}

/// Compositions of `G ∘ F` at the polynomial level: `g(f)` as exact polynomials.
pub fn polynomial_substitute(g: &PowerSeries, f: &PowerSeries) -> PowerSeries {
    g.substitute_exact(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{compose_poly, identity_poly};
    use crate::finset::FiniteSet;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn egf_examples() {
        assert_eq!(egf(&SymSeq::trivial(vec![1; 5])), PowerSeries::exp(4));
        assert_eq!(egf(&SymSeq::trivial(vec![3, 0, 0])), PowerSeries::from_integers(&[3, 0, 0]));
        let regular = SymSeq::regular(&[1, 1, 1, 1]);
        assert_eq!(regular.sizes(), &[1, 1, 2, 6]);
        assert_eq!(egf(&regular), PowerSeries::from_integers(&[1, 1, 1, 1]));
    }

    #[test]
    fn eval_card_examples() {
        let e2 = SymSeq::trivial(vec![0, 0, 1]);
        assert_eq!(htpy_eval_card(&e2, 2), r(2, 1));
        assert_eq!(set_eval_card(&e2, 2, Guard::default()).unwrap(), 3);
        let id = SymSeq::trivial(vec![0, 1]);
        assert_eq!(htpy_eval_card(&id, 5), r(5, 1));
        let regular = SymSeq::regular(&[1, 1, 1, 1]);
        assert_eq!(set_eval_card(&regular, 1, Guard::default()).unwrap(), 4);
        let s = SymSeq::trivial(vec![4, 2, 1]);
        assert_eq!(set_eval_card(&s, 0, Guard::default()).unwrap(), 4);
    }

    #[test]
    fn action_relations_are_checked() {
        assert!(SymSeq::new(vec![2, 0, 2], vec![vec![], vec![], vec![vec![0, 0]]]).is_err());
        assert!(SymSeq::new(vec![0, 0, 2], vec![vec![], vec![], vec![vec![1, 0]]]).is_ok());
        let bad_braid = vec![vec![1, 0, 2], vec![0, 2, 1]];
        assert!(SymSeq::new(vec![0, 0, 0, 3], vec![vec![], vec![], vec![], bad_braid]).is_err());
        let json = r#"{"N":2,"B":[0,0,1]}"#;
        let s: SymSeq = serde_json::from_str(json).unwrap();
        assert_eq!(s.sizes(), &[0, 0, 1]);
    }

    #[test]
    fn compose_card_examples() {
        let exp = SymSeq::trivial(vec![1, 1, 1, 1]);
        let exp_plus = SymSeq::trivial(vec![0, 1, 1, 1]);
        assert_eq!(compose_card(&exp, &exp_plus, 3).unwrap(), BigUint::from(5u32));
        let id = SymSeq::trivial(vec![0, 1, 0, 0]);
        let g = SymSeq::trivial(vec![2, 3, 5, 7]);
        assert_eq!(compose_card(&g, &id, 3).unwrap(), BigUint::from(7u32));
        assert_eq!(compose_card(&id, &g, 3).unwrap(), BigUint::from(7u32));
        assert!(compose_card(&g, &id, 4).is_err());
    }

    #[test]
    fn series_substitute_examples() {
        let f = PowerSeries::from_integers(&[0, 2, 3, 1]);
        assert_eq!(series_substitute(&PowerSeries::x(3), &f).unwrap(), f);
        let g = PowerSeries::from_integers(&[4, 1, 0, 5]);
        assert_eq!(series_substitute(&g, &PowerSeries::x(3)).unwrap(), g);
        let exp_minus_one = &PowerSeries::exp(5) + &PowerSeries::from_integers(&[-1, 0, 0, 0, 0, 0]);
        let bell = series_substitute(&PowerSeries::exp(5), &exp_minus_one).unwrap();
        let expected = [1, 1, 2, 5, 15, 52];
        for (n, b) in expected.iter().enumerate() {
            assert_eq!(bell.coeff(n), BigRational::new((*b).into(), factorial(n)));
        }
        assert_eq!(series_substitute(&g, &g), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn ogf_examples() {
        let p_bin = Polynomial::one_colour(&[0, 2]);
        assert_eq!(ogf_of_polynomial(&p_bin).unwrap(), PowerSeries::from_integers(&[1, 0, 1]));
        let id = identity_poly(&FiniteSet::point());
        assert_eq!(ogf_of_polynomial(&id).unwrap(), PowerSeries::from_integers(&[0, 1]));
        let comp = compose_poly(&p_bin, &p_bin).unwrap();
        let lhs = ogf_of_polynomial(&comp).unwrap();
        let g = ogf_of_polynomial(&p_bin).unwrap();
        assert_eq!(lhs, polynomial_substitute(&g, &g));
        assert_eq!(lhs, PowerSeries::from_integers(&[2, 0, 2, 0, 1]));
        assert_eq!(ogf_of_polynomial(&identity_poly(&FiniteSet::new(2))), Err(Error::MultiColour));
    }
}

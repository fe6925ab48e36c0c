//! Helpers shared by the integration suites: small-instance generators and
//! counting oracles that work from the raw polynomial data only.

#![allow(dead_code)]

use polyop::poly::{Family, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Operations of `p` as (input colours, output colour).
pub fn ops(p: &Polynomial) -> Vec<(Vec<usize>, usize)> {
    (0..p.b().size).map(|b| (p.input_colours(b), p.t().table[b])).collect()
}

pub fn random_poly(rng: &mut impl Rng, ni: usize, nj: usize, nb: usize, max_arity: usize) -> Polynomial {
    let ops: Vec<(Vec<usize>, usize)> = (0..nb)
        .map(|_| {
            let n = rng.gen_range(0..=max_arity);
            ((0..n).map(|_| rng.gen_range(0..ni)).collect(), rng.gen_range(0..nj))
        })
        .collect();
    Polynomial::from_operations(ni, nj, &ops).unwrap()
}

/// The family with the given fiber sizes.
pub fn family(sizes: &[usize]) -> Family {
    let proj = sizes.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n)).collect();
    Family::new(sizes.len(), proj).unwrap()
}

/// Every fiber-size vector over `base` colours with total at most `max_total`.
pub fn size_vectors(base: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn go(base: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == base {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(base, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(base, max_total, &mut Vec::new(), &mut out);
    out
}

/// `|P(X)_j|` for every output colour, from `Σ_b Π_e |X_{s(e)}|`.
pub fn eval_sizes(p: &Polynomial, x: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; p.j().size];
    for (inputs, j) in ops(p) {
        out[j] += inputs.iter().map(|&i| x[i]).product::<u128>();
    }
    out
}

/// Number of `P`-trees of height at most `h` by root colour and leaf
/// count, by the recursion `N_h = x + Σ_b Π_e N_{h-1}(s(e))` on
/// polynomials in `x`.
pub fn tree_count_table(p: &Polynomial, h: usize) -> Vec<Vec<u128>> {
    let leaf = |n: usize| -> Vec<Vec<u128>> { (0..n).map(|_| vec![0, 1]).collect() };
    let mul = |a: &[u128], b: &[u128]| -> Vec<u128> {
        let mut c = vec![0u128; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        c
    };
    let mut level = leaf(p.i().size);
    for _ in 0..h {
        let mut next = leaf(p.i().size);
        for (inputs, j) in ops(p) {
            let term = inputs.iter().fold(vec![1u128], |acc, &i| mul(&acc, &level[i]));
            if next[j].len() < term.len() {
                next[j].resize(term.len(), 0);
            }
            for (k, c) in term.into_iter().enumerate() {
                next[j][k] += c;
            }
        }
        level = next;
    }
    for row in &mut level {
        while row.len() > 1 && row.last() == Some(&0) {
            row.pop();
        }
    }
    level
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

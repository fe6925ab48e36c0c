//! Invariants checked on generated inputs.

mod common;

use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;

use polyop::dendroidal::{
    active_inert_factorize, classify, nerve, nerve_restrict, omega_compose, omega_hom, OmegaMor,
};
use polyop::freemonad::maybe_monad;
use polyop::poly::{compose_poly, composite_eval_bijection, evaluate};
use polyop::species::{compose_card, compose_card_via_series, SymSeq};
use polyop::tree::{canonical_form, enumerate_trees, eta, graft, tree_iso, Tree};
use polyop::Guard;

fn small_trees() -> &'static [Tree] {
    static TREES: OnceLock<Vec<Tree>> = OnceLock::new();
    TREES.get_or_init(|| {
        let mut v = vec![eta()];
        v.extend(enumerate_trees(3, 2, Guard::default()).unwrap());
        v
    })
}

fn tree_strategy() -> impl Strategy<Value = Tree> {
    (0..small_trees().len()).prop_map(|k| small_trees()[k].clone())
}

/// A morphism picked from the full hom-set, when it is nonempty.
fn pick(s: &Tree, t: &Tree, k: usize) -> Option<OmegaMor> {
    let homs = omega_hom(s, t, Guard::default()).unwrap();
    (!homs.is_empty()).then(|| homs[k % homs.len()].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_evaluation_matches_counts(
        seed in any::<u64>(),
        sizes in prop::collection::vec(0usize..3, 2),
    ) {
        let mut rng = common::rng(seed);
        let p = common::random_poly(&mut rng, 2, 2, 3, 2);
        let q = common::random_poly(&mut rng, 2, 1, 3, 2);
        let x = common::family(&sizes);
        let bij = composite_eval_bijection(&q, &p, &x).unwrap();
        prop_assert!(bij.map.is_bijective());

        let xs: Vec<u128> = sizes.iter().map(|&n| n as u128).collect();
        let expected = common::eval_sizes(&q, &common::eval_sizes(&p, &xs));
        let qp = compose_poly(&q, &p).unwrap();
        let got: Vec<u128> = evaluate(&qp, &x).unwrap().fiber_sizes().into_iter().map(|n| n as u128).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn canonical_form_survives_relabelling(t in tree_strategy()) {
        let rebuilt = Tree::from_shape(&t.shape());
        prop_assert_eq!(canonical_form(&rebuilt), canonical_form(&t));
        prop_assert!(tree_iso(&t, &t.canonical()).is_some());
    }

    #[test]
    fn grafting_adds_edges(s in tree_strategy(), r in tree_strategy(), k in any::<usize>()) {
        let leaves: Vec<usize> = (0..r.edges()).filter(|&e| r.is_leaf(e)).collect();
        prop_assume!(!leaves.is_empty());
        let g = graft(&s, &r, leaves[k % leaves.len()]).unwrap();
        prop_assert_eq!(g.edges(), s.edges() + r.edges() - 1);
        prop_assert_eq!(g.nodes(), s.nodes() + r.nodes());
    }

    #[test]
    fn edges_are_maps_from_eta(t in tree_strategy()) {
        prop_assert_eq!(omega_hom(&eta(), &t, Guard::default()).unwrap().len(), t.edges());
    }

    #[test]
    fn omega_composition_is_unital_and_associative(
        a in tree_strategy(), b in tree_strategy(), c in tree_strategy(), d in tree_strategy(),
        i in any::<usize>(), j in any::<usize>(), k in any::<usize>(),
    ) {
        let (Some(f), Some(g), Some(h)) = (pick(&a, &b, i), pick(&b, &c, j), pick(&c, &d, k)) else {
            return Ok(());
        };
        prop_assert_eq!(omega_compose(&f, &OmegaMor::identity(&a)).unwrap(), f.clone());
        prop_assert_eq!(omega_compose(&OmegaMor::identity(&b), &f).unwrap(), f.clone());
        let left = omega_compose(&h, &omega_compose(&g, &f).unwrap()).unwrap();
        let right = omega_compose(&omega_compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn factorization_recomposes(a in tree_strategy(), b in tree_strategy(), i in any::<usize>()) {
        let Some(f) = pick(&a, &b, i) else { return Ok(()) };
        let (active, inert) = active_inert_factorize(&f).unwrap();
        prop_assert!(classify(&active).active);
        prop_assert!(classify(&inert).inert);
        prop_assert_eq!(omega_compose(&inert, &active).unwrap(), f);
    }

    #[test]
    fn nerve_restriction_is_functorial(
        a in tree_strategy(), b in tree_strategy(), c in tree_strategy(),
        i in any::<usize>(), j in any::<usize>(),
    ) {
        let (Some(f), Some(g)) = (pick(&a, &b, i), pick(&b, &c, j)) else { return Ok(()) };
        let m = maybe_monad();
        let guard = Guard::default();
        let rf = nerve_restrict(&m, &f, guard).unwrap();
        let rg = nerve_restrict(&m, &g, guard).unwrap();
        let rgf = nerve_restrict(&m, &omega_compose(&g, &f).unwrap(), guard).unwrap();
        prop_assert_eq!(rgf.len(), nerve(&m, &c, guard).unwrap().len());
        for (x, &y) in rgf.iter().enumerate() {
            prop_assert_eq!(rf[rg[x]], y);
        }
    }

    #[test]
    fn series_composition_counts(
        g in prop::collection::vec(0usize..4, 5),
        f in prop::collection::vec(0usize..4, 5),
        n in 0usize..5,
    ) {
        let (g, f) = (SymSeq::trivial(g), SymSeq::trivial(f));
        let direct = compose_card(&g, &f, n).unwrap();
        let via = compose_card_via_series(&g, &f, n).unwrap();
        prop_assert_eq!(via, BigRational::from_integer(direct.into()));
    }
}

mod common;

use proptest::prelude::*;

use common::{build_tree, layers, payoffs, picks, profile_distribution, walk};
use qce::games::{corresponds, DEFAULT_STRATEGY_CAP};
use qce::scenarios::{appf_game, cghz_game, fig3_game};
use qce::Distribution;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_cells_match_tree_walk(l in layers(20), u in payoffs()) {
        let g = build_tree(&l, &u);
        prop_assert!(g.validate().is_empty());
        let conv = g.to_normal_form(DEFAULT_STRATEGY_CAP).unwrap();
        for p in conv.game.profiles() {
            let leaf = walk(&g, &conv, &p);
            prop_assert_eq!(conv.game.payoffs(&p), g.leaf_payoffs(leaf).unwrap());
            prop_assert_eq!(conv.leaf_of(&p), leaf);
        }
    }

    #[test]
    fn pushed_distributions_correspond(l in layers(20), u in payoffs(), w in picks()) {
        let g = build_tree(&l, &u);
        let conv = g.to_normal_form(DEFAULT_STRATEGY_CAP).unwrap();
        let d_nf = profile_distribution(&conv, &w);
        let mut leaves = std::collections::BTreeMap::new();
        for (p, prob) in d_nf.iter() {
            *leaves.entry(walk(&g, &conv, p)).or_insert(0.0) += prob;
        }
        let d_ext = Distribution::new(leaves).unwrap();
        prop_assert!(corresponds(&conv, &d_ext, &d_nf, 1e-12));
    }
}

#[test]
fn corpus_trees_are_valid() {
    for g in [fig3_game(), cghz_game(), appf_game()] {
        assert!(g.validate().is_empty(), "{:?}", g.validate());
    }
}

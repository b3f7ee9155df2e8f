mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use common::{instance, matrix, matrix_upto};
use graver_ilp::graver::{certified_graver_basis, norms};
use graver_ilp::json::{structure_from_value, structure_value};
use graver_ilp::structure::{
    assemble_multistage, assemble_nfold, assemble_treefold, detect_nfold, dual_graph, embed_dual_td, embed_primal_td,
    nfold_norm_bound, primal_graph, projection_matches, treedepth_decomposition, BlockKind, BlockStructure, EmbedMode,
    ShapeTree,
};

/// Uniform trees of height up to two: a root with `k` children, each with
/// `j` leaves when `deep`.
fn shape() -> impl Strategy<Value = ShapeTree> {
    (1usize..=3, 1usize..=2, any::<bool>()).prop_map(|(k, j, deep)| {
        if deep {
            ShapeTree::node((0..k).map(|_| ShapeTree::star(j)).collect())
        } else {
            ShapeTree::star(k)
        }
    })
}

fn blocks_sharing_cols(tree: &ShapeTree) -> impl Strategy<Value = Vec<graver_ilp::IntMatrix>> {
    let levels = tree.height() + 1;
    (1usize..=2).prop_flat_map(move |t| proptest::collection::vec((1usize..=2).prop_flat_map(move |r| matrix(r, t, 2)), levels))
}

fn blocks_sharing_rows(tree: &ShapeTree) -> impl Strategy<Value = Vec<graver_ilp::IntMatrix>> {
    let levels = tree.height() + 1;
    (1usize..=2).prop_flat_map(move |r| proptest::collection::vec((1usize..=2).prop_flat_map(move |s| matrix(r, s, 2)), levels))
}

fn round_trip(s: &BlockStructure) -> Result<(), TestCaseError> {
    let again = BlockStructure::recognize(s.kind(), s.tree(), &s.dims(), s.matrix()).unwrap();
    prop_assert_eq!(again.blocks(), s.blocks());
    let parsed = structure_from_value(&structure_value(s)).unwrap();
    prop_assert_eq!(parsed.matrix(), s.matrix());
    prop_assert_eq!(parsed.kind(), s.kind());
    let forest = s.natural_forest();
    let g = if s.kind() == BlockKind::MultiStage { primal_graph(s.matrix()) } else { dual_graph(s.matrix()) };
    prop_assert!(forest.witnesses(&g));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn treefold_round_trips((tree, blocks) in shape().prop_flat_map(|t| (Just(t.clone()), blocks_sharing_cols(&t)))) {
        let s = assemble_treefold(&tree, &blocks).unwrap();
        prop_assert_eq!(s.matrix().cols(), tree.leaf_count() * blocks[0].cols());
        round_trip(&s)?;
    }

    #[test]
    fn multistage_round_trips((tree, blocks) in shape().prop_flat_map(|t| (Just(t.clone()), blocks_sharing_rows(&t)))) {
        let s = assemble_multistage(&tree, &blocks).unwrap();
        prop_assert_eq!(s.matrix().rows(), tree.leaf_count() * blocks[0].rows());
        round_trip(&s)?;
    }

    #[test]
    fn assembled_nfolds_are_detected(t in 1usize..=2, r in 1usize..=2, s in 1usize..=2, n in 2usize..=3, seed in any::<u64>()) {
        let (a1, a2) = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = |rows: usize| {
                graver_ilp::IntMatrix::from_rows_with_cols(
                    (0..rows).map(|_| (0..t).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect()).collect(),
                    t,
                )
                .unwrap()
            };
            (draw(r), draw(s))
        };
        let built = assemble_nfold(&a1, &a2, n).unwrap();
        round_trip(&built)?;
        let found = detect_nfold(built.matrix());
        if let Some(found) = found {
            prop_assert_eq!(found.matrix(), built.matrix());
            let again = assemble_nfold(&found.blocks()[0], &found.blocks()[1], found.tree().leaf_count()).unwrap();
            prop_assert_eq!(again.matrix(), built.matrix());
        }
    }

    #[test]
    fn nfold_bound_dominates_the_graver_norm(a1 in matrix(1, 2, 2), a2 in matrix(1, 2, 2), n in 1usize..=2) {
        let s = assemble_nfold(&a1, &a2, n).unwrap();
        let basis = certified_graver_basis(s.matrix()).unwrap();
        prop_assert!(norms(&basis).g1 <= nfold_norm_bound(&a1, &a2).unwrap());
    }

    #[test]
    fn treedepth_forests_witness_their_graph(a in matrix_upto(4, 6, 1)) {
        for g in [primal_graph(&a), dual_graph(&a)] {
            let forest = treedepth_decomposition(&g).unwrap();
            prop_assert_eq!(forest.len(), g.vertex_count());
            prop_assert!(forest.witnesses(&g));
            prop_assert_eq!(forest.treedepth(), forest.height() + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn embeddings_project_onto_the_original(inst in instance(3, 2, 2, 2)) {
        let cube = vec![(BigInt::from(-1), BigInt::from(1)); inst.n()];
        let primal = treedepth_decomposition(&primal_graph(inst.a())).unwrap();
        for mode in [EmbedMode::Lazy, EmbedMode::Strict] {
            let emb = embed_primal_td(&inst, &primal, mode).unwrap();
            prop_assert!(projection_matches(&inst, &emb, &cube).unwrap());
        }
        let dual = treedepth_decomposition(&dual_graph(inst.a())).unwrap();
        let emb = embed_dual_td(&inst, &dual).unwrap();
        prop_assert!(projection_matches(&inst, &emb, &cube).unwrap());
    }
}

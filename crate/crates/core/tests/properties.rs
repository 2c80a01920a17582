use proptest::prelude::*;

use shareq_core::generators::{
    alpha_rename, gen_random_pair, gen_random_sharing, gen_random_sharing_many, gen_random_term,
    mutate_variable,
};
use shareq_core::json::{graph_to_json, parse_graph};
use shareq_core::{
    canonical_form, compile_many, compile_to_graph, inline_lets, is_sharing_equivalence, readback,
    readback_equal, run_check, spread_query, term_eq, to_locally_nameless, Backend, BuildOptions,
    Expr, LamGraph, NodeId, NodeKind, Query,
};

const NAMES: [&str; 5] = ["x", "y", "z", "u", "w"];

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop::sample::select(NAMES.to_vec()).prop_map(Expr::var);
    leaf.prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::app(l, r)),
            (prop::sample::select(NAMES.to_vec()), inner.clone()).prop_map(|(p, b)| Expr::lam(p, b)),
            (prop::sample::select(NAMES.to_vec()), inner.clone(), inner)
                .prop_map(|(n, e, b)| Expr::let_in(n, e, b)),
        ]
    })
}

/// Upper bound on transitions per unit of `|N| + |E| + |Q|`, counted from
/// the per-node, per-edge and per-query-edge work of both backends.
const TRANSITIONS_PER_ELEMENT: u64 = 17;

fn assert_run_invariants(g: &LamGraph, q: &Query) -> Result<bool, TestCaseError> {
    let queue = run_check(g, q, Backend::Queue);
    let recursive = run_check(g, q, Backend::Recursive);
    for r in [&queue, &recursive] {
        prop_assert!(r.stats.invariants_hold(), "{:?}", r.stats);
        prop_assert!(r.stats.transitions <= TRANSITIONS_PER_ELEMENT * r.stats.input_size() as u64);
    }
    prop_assert_eq!(queue.is_equal(), recursive.is_equal());
    if let (Ok(a), Ok(b)) = (&queue.outcome, &recursive.outcome) {
        prop_assert_eq!(a.partition(), b.partition());
        prop_assert_eq!(a.partition(), spread_query(g, q.pairs()));
        prop_assert!(a.is_idempotent());
    }
    Ok(queue.is_equal())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn let_sharing_is_transparent(e in expr_strategy()) {
        let (g, root) = compile_to_graph(&e).unwrap();
        let (h, hroot) = compile_to_graph(&inline_lets(&e)).unwrap();
        let t = readback(&g, root, 1 << 20).unwrap();
        let u = readback(&h, hroot, 1 << 20).unwrap();
        let mut atoms = g.atoms().clone();
        let direct = to_locally_nameless(&e, &mut atoms);
        prop_assert!(term_eq(&t, &direct));
        // Atom tables may number names differently; compare printed forms.
        prop_assert_eq!(t.display(g.atoms()).to_string(), u.display(h.atoms()).to_string());
        prop_assert!(h.node_count() >= g.node_count() || !e.has_let());
    }

    #[test]
    fn let_sharing_checks_equal_to_its_expansion(e in expr_strategy()) {
        let expanded = inline_lets(&e);
        let (g, roots) = compile_many(&[&e, &expanded]).unwrap();
        let q = Query::single(roots[0], roots[1]);
        if g.is_root(roots[0]) && g.is_root(roots[1]) {
            prop_assert!(assert_run_invariants(&g, &q)?);
        }
    }

    #[test]
    fn printing_and_parsing_roundtrip(e in expr_strategy()) {
        let printed = e.to_string();
        prop_assert_eq!(shareq_core::parse_surface(&printed).unwrap(), e);
    }

    #[test]
    fn random_sharing_preserves_readback(size in 1usize..60, seed: u64) {
        let t = gen_random_term(size, seed);
        let g = gen_random_sharing(&t, seed.rotate_left(7));
        let mut atoms = g.atoms().clone();
        let direct = to_locally_nameless(&t, &mut atoms);
        prop_assert!(term_eq(&readback(&g, g.roots()[0], 1 << 20).unwrap(), &direct));
    }

    #[test]
    fn checker_matches_readback_on_larger_pairs(size in 1usize..60, seed: u64) {
        let (g, a, b) = gen_random_pair(size, seed);
        let q = Query::single(a, b);
        let verdict = assert_run_invariants(&g, &q)?;
        prop_assert_eq!(verdict, readback_equal(&g, &q, 1 << 20).unwrap());
        if !verdict {
            prop_assert!(!is_sharing_equivalence(&g, &spread_query(&g, q.pairs())));
        }
    }

    #[test]
    fn alpha_variants_with_sharing_are_equal(size in 1usize..80, seed: u64) {
        let t = gen_random_term(size, seed);
        let (g, roots) = gen_random_sharing_many(&[&t, &alpha_rename(&t)], seed ^ 1);
        if g.is_root(roots[0]) && g.is_root(roots[1]) {
            prop_assert!(assert_run_invariants(&g, &Query::single(roots[0], roots[1]))?);
        }
    }

    #[test]
    fn multi_pair_queries(seed: u64, pairs in 2usize..5) {
        // Several random terms in one graph, queried along a chain.
        let terms: Vec<Expr> = (0..pairs as u64)
            .map(|k| {
                let t = gen_random_term(8, seed);
                if k % 2 == 0 { alpha_rename(&t) } else { mutate_variable(&t, seed.wrapping_add(k)) }
            })
            .collect();
        let refs: Vec<&Expr> = terms.iter().collect();
        let (g, roots) = gen_random_sharing_many(&refs, seed);
        if roots.iter().all(|&r| g.is_root(r)) {
            let q = Query::new(roots.windows(2).map(|w| (w[0], w[1])).collect());
            let verdict = assert_run_invariants(&g, &q)?;
            prop_assert_eq!(verdict, readback_equal(&g, &q, 1 << 20).unwrap());
        }
    }

    #[test]
    fn json_roundtrip(size in 1usize..40, seed: u64) {
        let g = gen_random_sharing(&gen_random_term(size, seed), seed);
        let back = parse_graph(&graph_to_json(&g), BuildOptions::default()).unwrap();
        prop_assert_eq!(canonical_form(&back.graph), canonical_form(&g));
    }

    #[test]
    fn canonical_form_ignores_numbering(size in 1usize..30, seed: u64, shuffle_seed: u64) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let g = gen_random_sharing(&gen_random_term(size, seed), seed);
        let mut order: Vec<usize> = (0..g.node_count()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let mut new_id = vec![NodeId(0); g.node_count()];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = NodeId::from_index(new);
        }
        let m = |n: NodeId| new_id[n.index()];
        let nodes: Vec<NodeKind> = order
            .iter()
            .map(|&old| match g.kind(NodeId::from_index(old)) {
                NodeKind::App { left, right } => NodeKind::App { left: m(left), right: m(right) },
                NodeKind::Abs { body } => NodeKind::Abs { body: m(body) },
                NodeKind::BoundVar { binder } => NodeKind::BoundVar { binder: m(binder) },
                free => free,
            })
            .collect();
        let h = LamGraph::from_nodes(nodes, g.atoms().clone(), BuildOptions::default()).unwrap();
        prop_assert_eq!(canonical_form(&h), canonical_form(&g));
    }
}

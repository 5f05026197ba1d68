use std::collections::BTreeSet;

use maxsym::automorphism::find_automorphisms;
use maxsym::*;
use proptest::prelude::*;

fn formula_strategy(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = Formula> {
    (1..=max_vars).prop_flat_map(move |n| {
        let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        let clause = (prop::collection::vec(lit, 1..=3), prop_oneof![3 => (1u64..=5).prop_map(Some), 1 => Just(None)]);
        prop::collection::vec(clause, 0..=max_clauses).prop_map(move |cs| {
            let clauses = cs
                .into_iter()
                .map(|(lits, w)| {
                    let c = Clause::from_dimacs(&lits);
                    match w {
                        Some(w) => WeightedClause::soft(c, w),
                        None => WeightedClause::hard(c),
                    }
                })
                .collect();
            Formula::new(n, clauses).unwrap()
        })
    })
}

fn unweighted(f: &Formula) -> Formula {
    Formula::unweighted(f.num_vars(), f.clauses().iter().map(|c| c.clause.clone()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wcnf_round_trip(f in formula_strategy(8, 20)) {
        prop_assert_eq!(parse_dimacs(&serialize(&f)).unwrap(), f);
    }

    #[test]
    fn soft_cost_bounded_by_top(f in formula_strategy(6, 15), bits in any::<u64>()) {
        let a = Assignment::from_bits(f.num_vars(), bits);
        let e = f.evaluate(&a);
        prop_assert!(e.soft_unsat_weight <= f.soft_weight_sum());
        prop_assert!(f.soft_weight_sum() < f.top());
        prop_assert_eq!(f.variant().has_hard(), f.num_hard() > 0);
    }

    #[test]
    fn clause_vertex_graph_shape(f in formula_strategy(8, 20)) {
        let g = encode(&f, EncodeMode::ClauseVertex).unwrap();
        let n = f.num_vars() as usize;
        let lits: usize = f.clauses().iter().map(|c| c.clause.len()).sum();
        prop_assert_eq!(g.num_vertices(), 2 * n + f.clauses().len());
        prop_assert_eq!(g.num_edges(), n + lits);
        for i in 0..f.clauses().len() {
            for j in 0..f.clauses().len() {
                let same_color = g.color(2 * n + i) == g.color(2 * n + j);
                prop_assert_eq!(same_color, f.clauses()[i].weight == f.clauses()[j].weight);
            }
        }
        prop_assert!((0..2 * n).all(|v| g.color(v) == 0));
        prop_assert_eq!(g, encode(&f, EncodeMode::ClauseVertex).unwrap());
    }

    #[test]
    fn edge_optimized_graph_shape(f in formula_strategy(8, 20)) {
        let f = unweighted(&f);
        let g = encode(&f, EncodeMode::EdgeOptimized).unwrap();
        let n = f.num_vars() as usize;
        let non_binary = f.clauses().iter().filter(|c| c.clause.len() != 2).count();
        prop_assert_eq!(g.num_vertices(), 2 * n + non_binary);
        let binary: BTreeSet<(usize, usize)> = f
            .clauses()
            .iter()
            .filter(|c| c.clause.len() == 2)
            .map(|c| {
                let l = c.clause.lits();
                let (a, b) = (g.literal_vertex(l[0]), g.literal_vertex(l[1]));
                (a.min(b), a.max(b))
            })
            .collect();
        for (u, v) in binary {
            prop_assert!(g.has_edge(u, v));
        }
    }

    #[test]
    fn generators_are_symmetries(f in formula_strategy(6, 12)) {
        let g = encode(&f, EncodeMode::ClauseVertex).unwrap();
        let gs = find_automorphisms(&g);
        prop_assert_eq!(gs.generators.len(), gs.vertex_maps.len());
        for (p, m) in gs.generators.iter().zip(&gs.vertex_maps) {
            prop_assert!(g.is_automorphism(m));
            prop_assert!(validate_on_formula(p, &f));
            prop_assert!(!p.is_identity());
            prop_assert_eq!(apply(&p.inverse(), &apply(p, &f)).clause_multiset(), f.clause_multiset());
        }
    }

    #[test]
    fn sbps_keep_optimum(f in formula_strategy(6, 12)) {
        let gs = detect_symmetries(&f, EncodeMode::ClauseVertex).unwrap();
        let aug = generate_sbps(&f, &gs.generators);
        prop_assert_eq!(aug.formula.top(), f.top());
        prop_assert_eq!(&aug.formula.clauses()[..f.clauses().len()], f.clauses());
        let before = brute_force(&f).unwrap();
        let after = brute_force(&aug.formula).unwrap();
        prop_assert_eq!(before.status, after.status);
        prop_assert_eq!(before.cost, after.cost);
    }
}

use num_traits::Zero;
use proptest::prelude::*;

use tautring::graphs::{graphs_with_edges, LocusKind, StableGraph};
use tautring::pixton::{
    delta_factor, hain_divisor, interpolate_constant_term, irreducible_part, pixton_class, pixton_class_window,
    pixton_mixed, q_form, weighting_sum, RamificationData, WeightingSystem,
};
use tautring::product::multiply;
use tautring::rational::{frac, q, Q};
use tautring::strata::{DecoratedStratum, TautClass};
use tautring::verify::{
    check_gplus1, check_hain_pin, check_multiplicativity, delta_irr, in_span_mod_pairing, is_zero_mod_pairing,
    off_locus_generators, restrict, Verdict,
};

fn data(g: u32, k: i64, a: &[i64]) -> RamificationData {
    RamificationData::from_a(g, a.len() as u32, k, a.to_vec()).unwrap()
}

#[test]
fn degree_one_class_on_m12() {
    let p = pixton_class(&RamificationData::from_A(1, 2, 0, vec![1, -1]).unwrap(), 1).unwrap();
    let loop12 = StableGraph::new(vec![0], vec![vec![1, 2]], vec![(0, 0)]).unwrap();
    assert_eq!(p.coefficient(&DecoratedStratum::undecorated(&loop12)), frac(-1, 12));
    assert_eq!(p.coefficient(&DecoratedStratum::psi(1, 2, 1).unwrap()), q(1));
    assert_eq!(p.coefficient(&DecoratedStratum::psi(1, 2, 2).unwrap()), q(1));
    assert_eq!(p.len(), 3);
}

#[test]
fn degree_zero_is_the_fundamental_class() {
    let p = pixton_class(&data(2, 1, &[3, -1]), 0).unwrap();
    assert_eq!(p, TautClass::fundamental(2, 2).unwrap());
}

#[test]
fn invalid_data_is_rejected() {
    assert!(RamificationData::from_a(1, 2, 0, vec![1, 0]).is_err());
    assert!(RamificationData::from_A(1, 2, 1, vec![1, 0]).is_err());
    assert!(RamificationData::from_a(1, 2, 0, vec![1]).is_err());
}

#[test]
fn result_does_not_depend_on_the_sample_window() {
    for (g, k, a) in [(1, 0, vec![2, 4, -6]), (1, 1, vec![1, 1, -2]), (2, 1, vec![2])] {
        let d = data(g, k, &a);
        for deg in 1..=2 {
            let base = pixton_class_window(&d, deg, 0).unwrap();
            assert_eq!(pixton_class_window(&d, deg, 7).unwrap(), base);
            assert_eq!(pixton_class(&d, deg).unwrap(), base);
        }
    }
}

#[test]
fn irreducible_part_is_data_independent() {
    let reference = delta_factor(1, 3, 3).unwrap();
    for (k, a) in [(0, vec![2, 4, -6]), (1, vec![-3, -1, 4]), (2, vec![5, 0, -5])] {
        assert_eq!(irreducible_part(&pixton_mixed(&data(1, k, &a)).unwrap()), reference);
    }
}

#[test]
fn interpolation_reports_inconsistent_surplus() {
    let samples: Vec<(i64, Q)> = (10..14).map(|r| (r, q(1) - frac(r, 6))).collect();
    assert_eq!(interpolate_constant_term(&samples, 1).unwrap(), q(1));
    let mut bad = samples.clone();
    bad[3].1 += q(1);
    assert!(interpolate_constant_term(&bad, 1).is_err());
}

#[test]
fn weighting_system_satisfies_vertex_conditions() {
    for (g, n) in [(1, 3), (2, 1), (2, 2)] {
        let d = RamificationData::from_A(g, n, 1, {
            let mut v = vec![1i64; n as usize];
            v[0] = 2 * g as i64 - 2 + n as i64 - (n as i64 - 1);
            v
        })
        .unwrap();
        for e in 1..=3 {
            for gr in graphs_with_edges(g, n, e) {
                let demands = d.vertex_demands(&gr);
                let ws = WeightingSystem::new(&gr, &demands);
                assert_eq!(ws.h1() as u32, gr.h1());
                let r = 11;
                let free = vec![3i64; ws.h1()];
                let u = ws.residues(&free, r);
                for v in 0..gr.num_vertices() {
                    let mut s = 0;
                    for (i, &(x, y)) in gr.edges().iter().enumerate() {
                        if x == v {
                            s += u[i];
                        }
                        if y == v {
                            s -= u[i];
                        }
                    }
                    assert_eq!((s - demands[v]).rem_euclid(r), 0, "{gr} vertex {v}");
                }
            }
        }
    }
}

#[test]
fn weighting_sum_refuses_small_moduli() {
    let d = data(1, 0, &[1, -1]);
    let gr = StableGraph::new(vec![0], vec![vec![1, 2]], vec![(0, 0)]).unwrap();
    assert!(weighting_sum(&gr, &d, &[0], d.residue_threshold()).is_err());
    assert!(weighting_sum(&gr, &d, &[0], d.residue_threshold() + 1).is_ok());
}

#[test]
fn hain_divisor_on_m12() {
    let h = hain_divisor(&data(1, 1, &[2, -2])).unwrap();
    assert_eq!(h.coefficient(&DecoratedStratum::kappa(1, 2, &[1]).unwrap()), frac(-1, 2));
    assert_eq!(h.coefficient(&DecoratedStratum::psi(1, 2, 1).unwrap()), frac(9, 2));
    assert_eq!(h.coefficient(&DecoratedStratum::psi(1, 2, 2).unwrap()), frac(1, 2));
    let sep = StableGraph::new(vec![0, 1], vec![vec![1, 2], vec![]], vec![(0, 1)]).unwrap();
    assert_eq!(h.coefficient(&DecoratedStratum::undecorated(&sep)), frac(-1, 2));
    assert_eq!(q_form(&data(1, 1, &[2, -2])).unwrap(), h.scaled(&q(2)));
}

#[test]
fn tree_part_of_degree_one_is_twice_hain() {
    for (g, k, a) in [(1, 0, vec![3, -3]), (1, 2, vec![1, 2, -3]), (2, 1, vec![1, 1]), (2, 3, vec![6])] {
        assert_eq!(check_hain_pin(&data(g, k, &a)).unwrap().verdict, Verdict::Pass);
    }
}

#[test]
fn full_space_multiplicativity_fails_for_the_counterexample() {
    let a = data(1, 0, &[2, 4, -6]);
    let b = data(1, 0, &[-3, -1, 4]);
    let r = check_multiplicativity(&a, &b, LocusKind::All).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.witness.is_null());
    let r = check_multiplicativity(&a, &b, LocusKind::Treelike).unwrap();
    assert!(r.verdict.passed());
}

#[test]
fn zero_vector_is_multiplicative_on_treelike_locus() {
    let a = data(1, 0, &[2, 4, -6]);
    let zero = data(1, 0, &[0, 0, 0]);
    assert!(check_multiplicativity(&a, &zero, LocusKind::Treelike).unwrap().verdict.passed());
}

#[test]
fn span_membership_with_certificate() {
    // psi_1^2 on M_{1,3} pairs nontrivially with classes the banana strata miss
    let psi1 = TautClass::from_stratum(DecoratedStratum::psi(1, 3, 1).unwrap());
    let sq = multiply(&psi1, &psi1).unwrap();
    let bananas = off_locus_generators(1, 3, 2, LocusKind::Treelike).unwrap();
    let r = in_span_mod_pairing(&sq, &bananas).unwrap();
    assert_eq!(r.report.verdict, Verdict::Fail);
    assert!(r.coefficients.is_none());

    let s = TautClass::from_stratum(bananas[0].clone()).scaled(&frac(3, 5));
    let r = in_span_mod_pairing(&s, &bananas).unwrap();
    assert_eq!(r.report.verdict, Verdict::PassModPairingKernel);
    assert!(r.coefficients.is_some());
}

#[test]
fn boundary_self_intersection_pairs_to_zero() {
    let d = delta_irr(1, 3).unwrap();
    let sq = multiply(&d, &d).unwrap();
    assert!(is_zero_mod_pairing(&sq).unwrap().verdict.passed());
    assert!(!restrict(&sq, LocusKind::All).is_zero());
}

#[test]
fn gplus1_beyond_dimension_passes_trivially() {
    let r = check_gplus1(&data(1, 0, &[0])).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.witness["beyond_dimension"], true);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn degree_one_tree_part_matches_hain(k in 0i64..=2, a1 in -4i64..=4, a2 in -4i64..=4) {
        let a3 = -a1 - a2;
        let d = data(1, k, &[a1, a2, a3]);
        let p1 = restrict(&pixton_class(&d, 1).unwrap(), LocusKind::CompactType);
        prop_assert_eq!(p1, q_form(&d).unwrap());
    }

    #[test]
    fn degree_one_coefficients_are_never_all_zero(a1 in 1i64..=5) {
        let d = data(1, 0, &[a1, -a1]);
        let p = pixton_class(&d, 1).unwrap();
        prop_assert!(p.terms().values().any(|c| !c.is_zero()));
    }
}

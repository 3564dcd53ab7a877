use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unistab_core::lie::{
    coadjoint_action, dominant_representative, exp_group, trace_pairing, weyl_orbit, CMatrix, CoadjointVector,
    GroupDescriptor, Weight, C64,
};
use unistab_core::moment::{random_compact, random_full, random_unit_vector};
use unistab_core::rep::{act_group, build_representation, RepTree};

fn groups() -> Vec<GroupDescriptor> {
    vec![GroupDescriptor::sl2(), GroupDescriptor::sl3(), GroupDescriptor::sl2_sl2()]
}

fn random_coadjoint(rng: &mut ChaCha8Rng, g: &GroupDescriptor) -> CoadjointVector {
    let m: Vec<f64> = random_compact(rng, g, 1.0).compact_coords(g).unwrap();
    CoadjointVector::from_coords(g, &m).unwrap()
}

/// Representations of dimension at most 20 built from every operation.
fn sample_trees() -> Vec<(GroupDescriptor, RepTree)> {
    let a1 = GroupDescriptor::sl2();
    let a2 = GroupDescriptor::sl3();
    let a1a1 = GroupDescriptor::sl2_sl2();
    vec![
        (a1.clone(), RepTree::standard(0)),
        (a1.clone(), RepTree::standard(0).sym(3)),
        (a1.clone(), RepTree::adjoint(0).tensor(RepTree::standard(0))),
        (a2.clone(), RepTree::standard(0).dual()),
        (a2.clone(), RepTree::adjoint(0)),
        (a2.clone(), RepTree::standard(0).sym(2)),
        (a2.clone(), RepTree::standard(0).tensor(RepTree::standard(0).dual())),
        (a1a1.clone(), RepTree::standard(0).tensor(RepTree::standard(1))),
        (a1a1.clone(), RepTree::direct_sum(vec![RepTree::standard(0), RepTree::standard(1).sym(2)]).scale_form(0.5)),
    ]
}

fn sorted(mut ws: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    ws.sort();
    ws
}

#[test]
fn built_representations_preserve_their_forms() {
    for (g, tree) in sample_trees() {
        let rep = build_representation(&g, tree.clone()).unwrap();
        assert!(rep.dim() <= 20);
        let h = rep.form();
        for r in rep.generators() {
            // compact action matrix i R_a must be skew for H
            let m = r * unistab_core::C64::i();
            let defect = (m.adjoint() * h + h * &m).norm();
            assert!(defect < 1e-10, "{tree:?}: {defect:.3e}");
        }
    }
}

#[test]
fn dual_negates_and_tensor_adds_weights() {
    for (g, tree) in sample_trees() {
        let rep = build_representation(&g, tree.clone()).unwrap();
        let w: Vec<Vec<i64>> = rep.weight_list().iter().map(|w| w.coords().to_vec()).collect();
        let dual = build_representation(&g, tree.clone().dual()).unwrap();
        let wd: Vec<Vec<i64>> = dual.weight_list().iter().map(|w| w.neg().coords().to_vec()).collect();
        assert_eq!(sorted(w.clone()), sorted(wd), "{tree:?}");

        let std = build_representation(&g, RepTree::standard(0)).unwrap();
        if rep.dim() * std.dim() > 20 {
            continue;
        }
        let t = build_representation(&g, tree.clone().tensor(RepTree::standard(0))).unwrap();
        let got: Vec<Vec<i64>> = t.weight_list().iter().map(|w| w.coords().to_vec()).collect();
        let want: Vec<Vec<i64>> = rep
            .weight_list()
            .iter()
            .flat_map(|a| std.weight_list().into_iter().map(move |b| a.add(&b).coords().to_vec()))
            .collect();
        assert_eq!(sorted(got), sorted(want), "{tree:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_invariant(seed in any::<u64>(), gi in 0usize..3) {
        let g = &groups()[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = exp_group(&random_compact(&mut rng, g, 2.0)).unwrap();
        let xi = random_compact(&mut rng, g, 1.0);
        let beta = random_coadjoint(&mut rng, g);
        let before = trace_pairing(&xi, &beta).unwrap();
        let after = trace_pairing(&xi.adjoint_by(&k).unwrap(), &coadjoint_action(&k, &beta).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-10, "{before} vs {after}");
    }

    #[test]
    fn exponential_inverts(seed in any::<u64>(), gi in 0usize..3, scale in 0.0f64..5.0) {
        let g = &groups()[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = random_full(&mut rng, g, scale);
        let prod = exp_group(&xi).unwrap().mul(&exp_group(&xi.scaled(-1.0)).unwrap()).unwrap();
        prop_assert!(prod.distance_to_identity() < 1e-10);
    }

    #[test]
    fn exponential_matches_two_by_two_closed_form(seed in any::<u64>(), scale in 0.0f64..4.0) {
        let g = GroupDescriptor::sl2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_full(&mut rng, &g, scale).blocks()[0].clone();
        // A^2 = d^2 I for traceless 2x2 A
        let d = (-a.determinant()).sqrt();
        let sinhc = if d.norm() < 1e-8 { C64::new(1.0, 0.0) + d * d / 6.0 } else { d.sinh() / d };
        let want = CMatrix::identity(2, 2) * d.cosh() + &a * sinhc;
        let xi = unistab_core::AlgebraElement::new(&g, vec![a], unistab_core::AlgebraKind::Full).unwrap();
        let got = exp_group(&xi).unwrap();
        prop_assert!((&got.blocks()[0] - &want).norm() < 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn dominant_representative_is_idempotent_and_in_orbit(a in -6i64..=6, b in -6i64..=6, sl3 in any::<bool>()) {
        let (g, w) = if sl3 { (GroupDescriptor::sl3(), Weight::new(vec![a, b])) } else { (GroupDescriptor::sl2_sl2(), Weight::new(vec![a, b])) };
        let d = dominant_representative(&g, &w).unwrap();
        prop_assert!(d.is_dominant());
        prop_assert_eq!(dominant_representative(&g, &d).unwrap(), d.clone());
        let orbit = weyl_orbit(&g, w.coords()).unwrap();
        prop_assert!(orbit.iter().any(|o| o.as_slice() == d.coords()));
    }

    #[test]
    fn group_action_is_a_homomorphism(seed in any::<u64>(), ti in 0usize..9) {
        let (g, tree) = sample_trees().swap_remove(ti);
        let rep = build_representation(&g, tree).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = exp_group(&random_full(&mut rng, &g, 1.0)).unwrap();
        let g2 = exp_group(&random_full(&mut rng, &g, 1.0)).unwrap();
        let v = random_unit_vector(&mut rng, rep.dim());
        let lhs = act_group(&rep, &g1.mul(&g2).unwrap(), &v).unwrap();
        let rhs = act_group(&rep, &g1, &act_group(&rep, &g2, &v).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-8);
    }
}

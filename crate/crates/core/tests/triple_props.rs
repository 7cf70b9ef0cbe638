use std::sync::OnceLock;

use proptest::prelude::*;
use symspace::product::ProductSpace;
use symspace::sampling::{random_orthogonal, rng_for, FrameSearch};
use symspace::symmetric::{build_cpn_pair, build_sphere_pair};
use symspace::triple::{self, CandidateSubspace, TripleStatus};

fn spaces() -> &'static [ProductSpace] {
    static SPACES: OnceLock<Vec<ProductSpace>> = OnceLock::new();
    SPACES.get_or_init(|| {
        let s = FrameSearch::new(32, 200, 0);
        vec![
            ProductSpace::new(
                build_sphere_pair(2).unwrap(),
                build_sphere_pair(2).unwrap(),
                &s,
            )
            .unwrap(),
            ProductSpace::new(
                build_sphere_pair(3).unwrap(),
                build_sphere_pair(3).unwrap(),
                &s,
            )
            .unwrap(),
            ProductSpace::new(
                build_sphere_pair(3).unwrap(),
                build_cpn_pair(2).unwrap(),
                &s,
            )
            .unwrap(),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn residual_ignores_basis_choice(k in 0usize..3, dim in 1usize..4, seed in any::<u64>(), rot in any::<u64>()) {
        let space = &spaces()[k];
        let sub = triple::random_subspace(space.pair(), dim, seed).unwrap();
        let q = random_orthogonal(&mut rng_for(rot), dim);
        let turned = CandidateSubspace::new(space.pair(), sub.basis() * q).unwrap();
        let a = triple::triple_residual(space.pair(), &sub);
        let b = triple::triple_residual(space.pair(), &turned);
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn great_spheres_and_their_rotations_are_triple(k in 0usize..3, dim in 1usize..4, rot in any::<u64>()) {
        let space = &spaces()[k];
        let p = space.p();
        prop_assume!(dim <= p);
        let q = random_orthogonal(&mut rng_for(rot), p);
        let mut basis = nalgebra::DMatrix::zeros(space.n_total(), dim);
        basis.view_mut((0, 0), (p, dim)).copy_from(&q.columns(0, dim));
        let sub = CandidateSubspace::new(space.pair(), basis).unwrap();
        let report = triple::triple_report(space, &sub).unwrap();
        prop_assert!(report.residual <= 1e-10);
        prop_assert_eq!(report.status, TripleStatus::Triple);
        if let Some(inj) = report.injectivity.filter(|i| i.applicable) {
            prop_assert_eq!(inj.injective, Some(true));
        }
    }

    #[test]
    fn envelopes_are_closed_subalgebras(k in 0usize..3, dim in 1usize..4, rot in any::<u64>()) {
        let space = &spaces()[k];
        prop_assume!(dim <= space.p());
        let q = random_orthogonal(&mut rng_for(rot), space.p());
        let mut basis = nalgebra::DMatrix::zeros(space.n_total(), dim);
        basis.view_mut((0, 0), (space.p(), dim)).copy_from(&q.columns(0, dim));
        let sub = CandidateSubspace::new(space.pair(), basis).unwrap();
        let env = triple::enveloping_algebra(space.pair(), &sub).unwrap();
        prop_assert!(env.closure_residual <= 1e-8);
        // t ⊕ [t,t] for a great k-sphere is so(k+1)
        prop_assert_eq!(env.dim(), dim * (dim + 1) / 2);
    }
}

#[test]
fn diagonal_of_equal_spheres_is_injective() {
    for space in &spaces()[..2] {
        let sub = triple::diagonal_subspace(space).unwrap();
        let report = triple::triple_report(space, &sub).unwrap();
        assert_eq!(report.status, TripleStatus::Triple);
        let inj = report.injectivity.unwrap();
        assert!(inj.applicable);
        assert_eq!(inj.injective, Some(true));
    }
}

#[test]
fn random_subspaces_of_cp2_are_not_triple() {
    let space = &spaces()[2];
    let cp2_block = {
        let f = space.factor2();
        (0..20u64)
            .filter(|s| {
                let sub = triple::random_subspace(f, 3, *s).unwrap();
                TripleStatus::classify(triple::triple_residual(f, &sub)) == TripleStatus::NotTriple
            })
            .count()
    };
    assert_eq!(cp2_block, 20);
}

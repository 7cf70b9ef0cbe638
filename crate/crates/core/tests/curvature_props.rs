use std::sync::OnceLock;

use proptest::prelude::*;
use symspace::lie::AlgebraVector;
use symspace::product::ProductSpace;
use symspace::sampling::{random_orthogonal, rng_for, FrameSearch};
use symspace::symmetric::{build_cpn_pair, build_hpn_pair, build_sphere_pair, SymmetricPair};

fn pairs() -> &'static [SymmetricPair] {
    static PAIRS: OnceLock<Vec<SymmetricPair>> = OnceLock::new();
    PAIRS.get_or_init(|| {
        vec![
            build_sphere_pair(3).unwrap(),
            build_sphere_pair(5).unwrap(),
            build_cpn_pair(2).unwrap(),
            build_hpn_pair(1).unwrap(),
        ]
    })
}

fn search() -> FrameSearch {
    FrameSearch::new(32, 200, 0)
}

fn m_vector(pair: &SymmetricPair, raw: &[f64]) -> AlgebraVector {
    let c: Vec<f64> = raw.iter().cycle().take(pair.m_dim()).copied().collect();
    pair.from_m_coords(&c)
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_tensor_symmetries(k in 0usize..4, a in coeffs(), b in coeffs(), c in coeffs(), d in coeffs()) {
        let pair = &pairs()[k];
        let (x, y, z, w) = (m_vector(pair, &a), m_vector(pair, &b), m_vector(pair, &c), m_vector(pair, &d));
        let r = pair.curvature_form(&x, &y, &z, &w).unwrap();
        let r_swapped = pair.curvature_form(&y, &x, &z, &w).unwrap();
        let r_pairs = pair.curvature_form(&z, &w, &x, &y).unwrap();
        let r_last = pair.curvature_form(&x, &y, &w, &z).unwrap();
        prop_assert!((r + r_swapped).abs() <= 1e-9);
        prop_assert!((r - r_pairs).abs() <= 1e-9);
        prop_assert!((r + r_last).abs() <= 1e-9);
        // first Bianchi identity
        let cyc = r + pair.curvature_form(&y, &z, &x, &w).unwrap() + pair.curvature_form(&z, &x, &y, &w).unwrap();
        prop_assert!(cyc.abs() <= 1e-9);
    }

    #[test]
    fn sectional_curvature_is_bracket_square(k in 0usize..4, seed in any::<u64>()) {
        let pair = &pairs()[k];
        let q = random_orthogonal(&mut rng_for(seed), pair.m_dim());
        let x: Vec<f64> = q.column(0).iter().copied().collect();
        let y: Vec<f64> = q.column(1).iter().copied().collect();
        let sec = pair.sectional_curvature(&pair.from_m_coords(&x), &pair.from_m_coords(&y)).unwrap();
        prop_assert!((sec - pair.bracket_sq(&x, &y)).abs() <= 1e-9);
        prop_assert!(sec >= -1e-12);
    }

    #[test]
    fn sectional_curvature_ignores_plane_basis(k in 0usize..4, a in coeffs(), b in coeffs(), s in 0.1f64..3.0, t in -2.0f64..2.0) {
        let pair = &pairs()[k];
        let (x, y) = (m_vector(pair, &a), m_vector(pair, &b));
        let mut y2 = y.scaled(s);
        y2.axpy(t, &x);
        if let (Ok(u), Ok(v)) = (pair.sectional_curvature(&x, &y), pair.sectional_curvature(&x, &y2)) {
            prop_assert!((u - v).abs() <= 1e-8 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn rotating_m_preserves_invariants(k in 0usize..4, seed in any::<u64>()) {
        let pair = &pairs()[k];
        let q = random_orthogonal(&mut rng_for(seed), pair.m_dim());
        let rotated = pair.with_rotated_m(&q).unwrap();
        prop_assert!((rotated.scalar_curvature() - pair.scalar_curvature()).abs() <= 1e-9);
        prop_assert!((rotated.rho_min() - pair.rho_min()).abs() <= 1e-9);
        let expected = q.transpose() * pair.ricci() * &q;
        prop_assert!((rotated.ricci() - expected).amax() <= 1e-9);
    }
}

#[test]
fn ricci_is_half_identity_for_every_builder() {
    for pair in pairs() {
        let d = pair.m_dim();
        let ric = pair.ricci();
        assert!(
            (ric - nalgebra::DMatrix::identity(d, d) * 0.5).amax() <= 1e-8,
            "{}",
            pair.name()
        );
        assert!((pair.scalar_curvature() - d as f64 / 2.0).abs() <= 1e-8);
    }
}

#[test]
fn odd_sphere_scalar_curvature() {
    for n in 1..=3 {
        let p = 2 * n + 1;
        let s = build_sphere_pair(p).unwrap();
        assert!((s.scalar_curvature() - p as f64 / 2.0).abs() <= 1e-9);
    }
}

#[test]
fn product_blocks_commute() {
    let space = ProductSpace::new(
        build_sphere_pair(3).unwrap(),
        build_cpn_pair(2).unwrap(),
        &search(),
    )
    .unwrap();
    let pair = space.pair();
    let (p, n) = (space.p(), space.n_total());
    for u in 0..p {
        for v in p..n {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[u] = 1.0;
            y[v] = 1.0;
            assert_eq!(pair.bracket_sq(&x, &y), 0.0);
        }
    }
    let rho = space.factor1().rho_min().min(space.factor2().rho_min());
    assert!((space.constants().rho - rho).abs() <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn constants_survive_basis_rotation(seed in any::<u64>()) {
        let f1 = build_sphere_pair(4).unwrap();
        let f2 = build_cpn_pair(2).unwrap();
        let base = ProductSpace::new(f1.clone(), f2.clone(), &search()).unwrap();
        let mut rng = rng_for(seed);
        let q1 = random_orthogonal(&mut rng, f1.m_dim());
        let q2 = random_orthogonal(&mut rng, f2.m_dim());
        let rotated = ProductSpace::new(f1.with_rotated_m(&q1).unwrap(), f2.with_rotated_m(&q2).unwrap(), &search()).unwrap();
        let (a, b) = (base.constants(), rotated.constants());
        prop_assert!((a.k1 - b.k1).abs() <= 1e-8);
        prop_assert!((a.k2 - b.k2).abs() <= 1e-8);
        prop_assert!((a.c - b.c).abs() <= 1e-8 * a.c);
        prop_assert!((a.lambda_tg - b.lambda_tg).abs() <= 1e-8);
    }
}

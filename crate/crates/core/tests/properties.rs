use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use syl_core::boundary::{canonical_spectrum, transform_boundary_data, AffineField, BoundaryData};
use syl_core::mobius::{random_map, MobiusMap};
use syl_core::radial::{u_from_xi, xi_from_u};
use syl_core::symfn::{homotopy_point, in_gamma_k, sigma_k, sigma_k_expanded};

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sigma_matches_subset_expansion(x in spectrum()) {
        for k in 0..=x.len() {
            let a = sigma_k(&x, k).unwrap();
            let b = sigma_k_expanded(&x, k).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn sigma_is_symmetric_and_homogeneous(x in spectrum(), shift in 0usize..8, s in 0.1..4.0f64) {
        let mut y = x.clone();
        y.rotate_left(shift % x.len());
        y.reverse();
        let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
        for k in 1..=x.len() {
            let a = sigma_k(&x, k).unwrap();
            prop_assert!((a - sigma_k(&y, k).unwrap()).abs() <= 1e-12 * a.abs().max(1.0));
            let b = sigma_k(&scaled, k).unwrap();
            prop_assert!((b - s.powi(k as i32) * a).abs() <= 1e-11 * b.abs().max(1.0));
        }
    }

    #[test]
    fn cones_are_nested(x in spectrum()) {
        for k in 2..=x.len() {
            if in_gamma_k(&x, k) {
                prop_assert!(in_gamma_k(&x, k - 1));
            }
        }
    }

    #[test]
    fn homotopy_endpoints(x in spectrum()) {
        let one = homotopy_point(&x, 1.0);
        prop_assert!(one.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-15));
        let tr: f64 = x.iter().sum();
        prop_assert!(homotopy_point(&x, 0.0).iter().all(|v| (v - tr).abs() < 1e-12));
    }

    #[test]
    fn xi_round_trip(u in 1e-3..1e3f64, t in -3.0..3.0f64, n in 3usize..9) {
        let xi = xi_from_u(u, t.exp(), n).unwrap();
        prop_assert!((u_from_xi(xi, t, n) / u - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mobius_inverse_round_trip(seed in any::<u64>(), n in 2usize..7, len in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_map(&mut rng, n, len);
        let inv = m.inverse();
        let y: Vec<f64> = (0..n).map(|i| 0.3 + 0.1 * i as f64).collect();
        if let Ok(img) = m.apply(&y) {
            if let Ok(back) = inv.apply(&img) {
                let scale = 1.0 + img.iter().map(|v| v.abs()).fold(0.0, f64::max);
                let err = back.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                prop_assert!(err < 1e-8 * scale, "err {err}");
            }
        }
    }

    #[test]
    fn inversion_is_involutive(cx in -2.0..2.0f64, lam in 0.2..3.0f64, y in prop::collection::vec(-4.0..4.0f64, 3)) {
        let m = MobiusMap::inversion(vec![cx, 0.0, -cx], lam).unwrap();
        if let Ok(img) = m.apply(&y) {
            let back = m.apply(&img).unwrap();
            let err = back.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err < 1e-9 * (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max)));
        }
    }

    #[test]
    fn canonical_spectrum_is_mobius_invariant(seed in any::<u64>(), n in 3usize..7, len in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = BoundaryData::random(&mut rng, n);
        let psi = random_map(&mut rng, n, len);
        let Ok(loc) = psi.local(&d.x) else { return Ok(()) };
        let u = AffineField { base: loc.image.clone(), s: d.s, p: d.p.clone() };
        let Ok(tr) = transform_boundary_data(&psi, &u, &d.nu, &d.h, &d.x) else { return Ok(()) };
        let a = canonical_spectrum(&tr.pulled_back).unwrap();
        let b = canonical_spectrum(&tr.pushed_forward).unwrap();
        let scale = a.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let gap = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-9 * scale, "gap {gap}");
    }

    #[test]
    fn canonical_matrix_scales_with_s(seed in any::<u64>(), c in 0.2..5.0f64) {
        // u → c·u scales the canonical matrix by c^{-2/(n-2)}
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = BoundaryData::random(&mut rng, 5);
        let scaled = BoundaryData::new(
            d.x.clone(), c * d.s, d.p.iter().map(|v| c * v).collect(), d.nu.clone(), d.h.clone(),
        ).unwrap();
        let a = canonical_spectrum(&d).unwrap();
        let b = canonical_spectrum(&scaled).unwrap();
        let f = c.powf(-2.0 / 3.0);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((q - f * p).abs() <= 1e-12 * (1.0 + p.abs()));
        }
    }
}

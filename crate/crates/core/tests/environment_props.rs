use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrelax_core::angular::Sigma;
use vrelax_core::environment::{
    k_spontaneous, k_stimulated, quadrature_selfcheck, AngularDistribution, KMatrix,
    ModeDensityModifier, PhotonicCrystal, TabulatedDistribution,
};

// Midpoint rule in θ with the d¹ entries written out by hand; φ integrates to
// 2π for a φ-independent profile, leaving a factor 1/2 against dΩ/4π.
fn riemann_cos2_diag(nodes: usize) -> [f64; 3] {
    let mut k = [0.0; 3];
    let dt = PI / nodes as f64;
    for i in 0..nodes {
        let t = (i as f64 + 0.5) * dt;
        let (s, c) = t.sin_cos();
        let n = c * c;
        let w = 0.5 * s * dt * n;
        let d11 = 0.5 * (1.0 + c);
        let d1m = 0.5 * (1.0 - c);
        let d10 = s / 2f64.sqrt();
        // λ = ±1 summed
        k[0] += w * (d1m * d1m + d11 * d11);
        k[1] += w * 2.0 * d10 * d10;
        k[2] += w * (d11 * d11 + d1m * d1m);
    }
    k
}

#[test]
fn cos2_matches_riemann_oracle() {
    let q = k_stimulated(
        &AngularDistribution::cos2(1.0),
        &ModeDensityModifier::Vacuum,
        1.0,
        16,
    )
    .unwrap();
    let r = riemann_cos2_diag(1_000_000);
    for s in Sigma::ALL {
        assert!((q.get(s, s).re - r[s.index()]).abs() < 1e-8);
    }
    assert!((r[1] - 2.0 / 15.0).abs() < 1e-8);
    assert!((r[0] - 4.0 / 15.0).abs() < 1e-8);
    assert!(q.max_off_diagonal() < 1e-12);
}

fn random_table(rng: &mut ChaCha8Rng) -> TabulatedDistribution {
    let nt = rng.gen_range(2..7);
    let np = rng.gen_range(1..7);
    let thetas: Vec<f64> = (0..nt).map(|i| PI * i as f64 / (nt - 1) as f64).collect();
    let phis: Vec<f64> = (0..np).map(|i| 2.0 * PI * i as f64 / np as f64).collect();
    let minus = (0..nt * np).map(|_| rng.gen_range(0.0..3.0)).collect();
    let plus = (0..nt * np).map(|_| rng.gen_range(0.0..3.0)).collect();
    TabulatedDistribution::new(thetas, phis, minus, plus).unwrap()
}

#[test]
fn random_tables_give_hermitian_psd_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let t = random_table(&mut rng);
        let axisymmetric = t.phis().len() == 1;
        let d = AngularDistribution::Tabulated(t);
        let k = k_stimulated(&d, &ModeDensityModifier::Vacuum, 1.0, 8).unwrap();
        assert!(k.hermiticity_defect() == 0.0);
        for s in Sigma::ALL {
            assert!(k.get(s, s).re >= 0.0);
            assert_eq!(k.get(s, s).im, 0.0);
        }
        if axisymmetric {
            assert!(k.max_off_diagonal() < 1e-10);
        }
    }
}

#[test]
fn axisymmetric_profiles_have_no_off_diagonal() {
    for d in [
        AngularDistribution::isotropic(1.3),
        AngularDistribution::cos2(0.7),
    ] {
        let k = k_stimulated(&d, &ModeDensityModifier::Vacuum, 1.0, 16).unwrap();
        assert!(k.max_off_diagonal() < 1e-10);
    }
    let t = TabulatedDistribution::new(
        vec![0.0, 1.0, PI],
        vec![0.0],
        vec![1.0, 2.0, 0.5],
        vec![0.0, 4.0, 1.0],
    )
    .unwrap();
    let k = k_stimulated(
        &AngularDistribution::Tabulated(t),
        &ModeDensityModifier::Vacuum,
        1.0,
        16,
    )
    .unwrap();
    assert!(k.max_off_diagonal() < 1e-10);
}

#[test]
fn phi_dependent_profile_gives_complex_off_diagonal() {
    let t = TabulatedDistribution::new(
        vec![0.0, PI / 2.0, PI],
        vec![0.0, PI / 2.0, PI, 1.5 * PI],
        vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        vec![0.5; 12],
    )
    .unwrap();
    let k = k_stimulated(
        &AngularDistribution::Tabulated(t),
        &ModeDensityModifier::Vacuum,
        1.0,
        16,
    )
    .unwrap();
    assert!(k.max_off_diagonal() > 1e-3);
    assert!(k.hermiticity_defect() == 0.0);
}

#[test]
fn scaling_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = AngularDistribution::Tabulated(random_table(&mut rng));
    let k1 = k_stimulated(&base, &ModeDensityModifier::Vacuum, 1.0, 12).unwrap();
    for c in [0.0, 1.0, 2.5] {
        let kc = k_stimulated(&base.scaled(c), &ModeDensityModifier::Vacuum, 1.0, 12).unwrap();
        assert!(kc.max_abs_diff(&k1.scaled(c)) <= 1e-14 * (1.0 + c));
    }
    for d in [
        AngularDistribution::isotropic(2.0),
        AngularDistribution::cos2(2.0),
    ] {
        let k1 = k_stimulated(&d, &ModeDensityModifier::Vacuum, 1.0, 12).unwrap();
        for c in [0.0, 1.0, 2.5] {
            let kc = k_stimulated(&d.scaled(c), &ModeDensityModifier::Vacuum, 1.0, 12).unwrap();
            assert!(kc.max_abs_diff(&k1.scaled(c)) <= 1e-14 * (1.0 + c));
        }
    }
}

#[test]
fn cavity_monotone_in_reflectivity() {
    let rs: Vec<f64> = (0..=99).map(|i| i as f64 / 100.0).collect();
    let ks: Vec<KMatrix> = rs
        .iter()
        .map(|&r| k_spontaneous(&ModeDensityModifier::planar_cavity(r).unwrap(), 1.0).unwrap())
        .collect();
    for w in ks.windows(2) {
        assert!(w[1].get(Sigma::Zero, Sigma::Zero).re > w[0].get(Sigma::Zero, Sigma::Zero).re);
        assert!(w[1].get(Sigma::Plus, Sigma::Plus).re < w[0].get(Sigma::Plus, Sigma::Plus).re);
    }
    assert_eq!(
        ks[0],
        k_spontaneous(&ModeDensityModifier::Vacuum, 1.0).unwrap()
    );
}

#[test]
fn quadrature_converges_on_doubling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profiles = [
        AngularDistribution::isotropic(1.0),
        AngularDistribution::cos2(1.0),
        AngularDistribution::Tabulated(random_table(&mut rng)),
    ];
    for (i, d) in profiles.iter().enumerate() {
        let a = k_stimulated(d, &ModeDensityModifier::Vacuum, 1.0, 16).unwrap();
        let b = k_stimulated(d, &ModeDensityModifier::Vacuum, 1.0, 32).unwrap();
        // bilinear tables have kinks, so they converge more slowly
        let tol = if i < 2 { 1e-10 } else { 1e-2 };
        assert!(
            a.max_abs_diff(&b) < tol,
            "profile {i}: {}",
            a.max_abs_diff(&b)
        );
    }
}

#[test]
fn selfcheck_orders() {
    assert!(quadrature_selfcheck(8).unwrap().max_deviation() < 1e-12);
    assert!(quadrature_selfcheck(4).unwrap().max_deviation() < 1e-12);
    assert!(quadrature_selfcheck(3).is_err());
}

#[test]
fn photonic_crystal_gaps_selected_channel() {
    let edge = 3.2e15;
    let pc = PhotonicCrystal::new(edge, 3.0, vec![Sigma::Plus]).unwrap();
    let m = ModeDensityModifier::PhotonicCrystal(pc);
    let below = k_spontaneous(&m, 0.999 * edge).unwrap();
    assert_eq!(below.get(Sigma::Plus, Sigma::Plus).re, 0.0);
    assert_eq!(below.get(Sigma::Zero, Sigma::Zero).re, 2.0 / 3.0);
    let above = k_spontaneous(&m, 1.001 * edge).unwrap();
    assert!(above.get(Sigma::Plus, Sigma::Plus).re > 0.0);
    let s = k_stimulated(&AngularDistribution::isotropic(1.0), &m, 0.999 * edge, 8).unwrap();
    assert_eq!(s.get(Sigma::Plus, Sigma::Plus).re, 0.0);
    assert_eq!(s.get(Sigma::Plus, Sigma::Zero).norm(), 0.0);
}

proptest! {
    #[test]
    fn isotropic_closed_form(n in 0.0f64..100.0, order in 4usize..24) {
        let k = k_stimulated(&AngularDistribution::isotropic(n), &ModeDensityModifier::Vacuum, 1.0, order).unwrap();
        for s in Sigma::ALL {
            prop_assert!((k.get(s, s).re - 2.0 * n / 3.0).abs() < 1e-12 * (1.0 + n));
        }
        prop_assert!(k.max_off_diagonal() < 1e-12 * (1.0 + n));
    }

    #[test]
    fn cavity_closed_form(r in 0.0f64..0.999) {
        let k = k_spontaneous(&ModeDensityModifier::planar_cavity(r).unwrap(), 2.0).unwrap();
        let f = (1.0 - r) / (1.0 + r);
        prop_assert!((k.get(Sigma::Plus, Sigma::Plus).re - 2.0 / 3.0 * f).abs() < 1e-14);
        prop_assert!((k.get(Sigma::Minus, Sigma::Minus).re - 2.0 / 3.0 * f).abs() < 1e-14);
        prop_assert!((k.get(Sigma::Zero, Sigma::Zero).re - 2.0 / 3.0 / f).abs() < 1e-12 / f);
        prop_assert_eq!(k.max_off_diagonal(), 0.0);
    }
}

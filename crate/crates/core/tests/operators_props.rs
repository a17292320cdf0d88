use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrelax_core::angular::{clebsch_gordan, wigner_d1, HalfInt, Sigma};
use vrelax_core::environment::{
    AngularDistribution, KMatrix, ModeDensityModifier, PhotonicCrystal, QuadratureRule,
};
use vrelax_core::operators::{
    build_relaxation_superop, build_stimulated_superop, interference_report, rates_fine,
    rates_hyperfine, rates_spontaneous, rates_stimulated, rates_stimulated_from_k,
    rates_stimulated_with, Basis, BasisState, DipoleScale, HyperfineScheme, Level, LevelScheme,
    RateSet, Scheme, TransitionK,
};

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn allowed(j: i32, jd: i32) -> bool {
    j >= 0 && (j - jd).abs() <= 2 && (j - jd) % 2 == 0 && !(j == 0 && jd == 0)
}

fn uppers_for(jd: i32, max: i32) -> Vec<i32> {
    [jd - 2, jd, jd + 2]
        .into_iter()
        .filter(|&j| j <= max && allowed(j, jd))
        .collect()
}

fn scheme(jb: i32, jc: i32, jd: i32, s: f64) -> LevelScheme {
    LevelScheme::new(h(jb), h(jc), h(jd), 1.0, 1.0, DipoleScale::Uniform { s }).unwrap()
}

fn dline() -> LevelScheme {
    LevelScheme::d_line(1.0, 1.0, 1.0).unwrap()
}

fn random_psd_k(rng: &mut ChaCha8Rng) -> KMatrix {
    let b: Vec<Complex64> = (0..9)
        .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut e = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            e[i][j] = (0..3).map(|k| b[3 * i + k] * b[3 * j + k].conj()).sum();
        }
    }
    KMatrix::from_entries(e).unwrap()
}

fn max_off_diagonal(r: &RateSet) -> f64 {
    let m = r.upper_matrix();
    let mut d = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                d = d.max(m[(i, j)].norm());
            }
        }
    }
    d
}

fn st(level: Level, twice_m: i32) -> BasisState {
    BasisState::fine(level, h(twice_m))
}

fn idx(basis: &Basis, level: Level, twice_m: i32) -> usize {
    basis.index_of(&st(level, twice_m)).unwrap()
}

#[test]
fn free_space_diagonality_on_full_grid() {
    let mut count = 0;
    for jd in 0..=9 {
        for jb in uppers_for(jd, 9) {
            for jc in uppers_for(jd, 9) {
                if jb == jc {
                    continue;
                }
                let r = rates_fine(
                    &scheme(jb, jc, jd, 1.0),
                    &TransitionK::uniform(KMatrix::vacuum()),
                )
                .unwrap();
                assert!(max_off_diagonal(&r) < 1e-12, "J = ({jb}, {jc}, {jd})/2");
                for u in r.basis().upper_indices() {
                    assert!((r.upper(u, u).re - 2.0 / 3.0).abs() < 1e-12);
                }
                count += 1;
            }
        }
    }
    assert!(count > 40);
}

#[test]
fn equal_upper_momenta_interfere_in_vacuum() {
    let r = rates_fine(
        &scheme(2, 2, 0, 1.0),
        &TransitionK::uniform(KMatrix::vacuum()),
    )
    .unwrap();
    let b = r.basis().clone();
    let v = r.upper(idx(&b, Level::B, 0), idx(&b, Level::C, 0));
    assert!((v.re - 2.0 / 3.0).abs() < 1e-12);
}

fn random_hyperfine(rng: &mut ChaCha8Rng) -> HyperfineScheme {
    loop {
        let jd = rng.gen_range(0..=5);
        let ups = uppers_for(jd, 5);
        let jb = ups[rng.gen_range(0..ups.len())];
        let jc = ups[rng.gen_range(0..ups.len())];
        if jb == jc {
            continue;
        }
        let i = rng.gen_range(0..=5);
        return HyperfineScheme::new(scheme(jb, jc, jd, 1.0), h(i)).unwrap();
    }
}

#[test]
fn hyperfine_free_space_diagonality() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let hs = random_hyperfine(&mut rng);
        let r = rates_hyperfine(&hs, &TransitionK::uniform(KMatrix::vacuum())).unwrap();
        assert!(max_off_diagonal(&r) < 1e-12, "{hs:?}");
        for u in r.basis().upper_indices() {
            assert!((r.upper(u, u).re - 2.0 / 3.0).abs() < 1e-12, "{hs:?}");
        }
        r.check_consistency().unwrap();
    }
}

#[test]
fn zero_nuclear_spin_reduces_to_fine() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (jb, jc, jd) in [(3, 1, 1), (2, 0, 2), (4, 2, 2), (5, 3, 3)] {
        let fine = scheme(jb, jc, jd, 1.3);
        let k = TransitionK {
            at_b: random_psd_k(&mut rng),
            at_c: random_psd_k(&mut rng),
        };
        let a = rates_fine(&fine, &k).unwrap();
        let b = rates_hyperfine(&HyperfineScheme::new(fine, HalfInt::ZERO).unwrap(), &k).unwrap();
        assert_eq!(a.basis().len(), b.basis().len());
        assert!((a.upper_matrix() - b.upper_matrix()).camax() < 1e-14);
        assert_eq!(a.feeding().len(), b.feeding().len());
        for (x, y) in a.feeding().iter().zip(b.feeding()) {
            assert_eq!((x.u1, x.l1, x.u2, x.l2), (y.u1, y.l1, y.u2, y.l2));
            assert!((x.value - y.value).norm() < 1e-14);
        }
    }
}

// Dipole acts on J only; F is built from J and I in that order.
fn hyperfine_amp_oracle(j: i32, f: i32, m: i32, jd: i32, fd: i32, md: i32, i: i32) -> f64 {
    let sigma = m - md;
    if sigma.abs() > 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for mi in (-i..=i).step_by(2) {
        let mj = m - mi;
        let mjd = md - mi;
        if mj.abs() > j || mjd.abs() > jd {
            continue;
        }
        let a = clebsch_gordan(h(j), h(mj), h(i), h(mi), h(f), h(m)).unwrap();
        let b = clebsch_gordan(h(jd), h(mjd), h(i), h(mi), h(fd), h(md)).unwrap();
        let c = clebsch_gordan(h(jd), h(mjd), HalfInt::ONE, h(sigma), h(j), h(mj)).unwrap();
        sum += a * b * c;
    }
    sum
}

fn sodium() -> HyperfineScheme {
    HyperfineScheme::new(LevelScheme::d_line(1.0, 1.0, 1.0).unwrap(), h(3)).unwrap()
}

fn oracle_rates(
    hs: &HyperfineScheme,
    k: &KMatrix,
) -> (
    Basis,
    Vec<Vec<Complex64>>,
    Vec<(usize, usize, usize, usize, Complex64)>,
) {
    let basis = hs.basis();
    let n = basis.len();
    let fine = hs.fine();
    let i = hs.nuclear_spin().twice();
    let jd = fine.j(Level::D).twice();
    let amp = |u: usize, l: usize| {
        let su = basis.state(u);
        let sl = basis.state(l);
        let v = hyperfine_amp_oracle(
            fine.j(su.level).twice(),
            su.f.unwrap().twice(),
            su.m.twice(),
            jd,
            sl.f.unwrap().twice(),
            sl.m.twice(),
            i,
        );
        (Sigma::from_delta(su.m, sl.m), v)
    };
    let mut upper = vec![vec![Complex64::default(); n]; n];
    let mut feed = Vec::new();
    for u1 in basis.upper_indices() {
        for u2 in basis.upper_indices() {
            for l1 in basis.lower_indices() {
                for l2 in basis.lower_indices() {
                    let (Some(s1), a1) = amp(u1, l1) else {
                        continue;
                    };
                    let (Some(s2), a2) = amp(u2, l2) else {
                        continue;
                    };
                    let v = k.get(s1, s2) * (a1 * a2);
                    if l1 == l2 {
                        upper[u1][u2] += v;
                    }
                    feed.push((u1, l1, u2, l2, v));
                }
            }
        }
    }
    (basis, upper, feed)
}

fn assert_matches_oracle(r: &RateSet, hs: &HyperfineScheme, k: &KMatrix, tol: f64) {
    let (basis, upper, feed) = oracle_rates(hs, k);
    assert_eq!(&basis, r.basis());
    for u1 in basis.upper_indices() {
        for u2 in basis.upper_indices() {
            assert!(
                (r.upper(u1, u2) - upper[u1][u2]).norm() < tol,
                "{} {}",
                basis.state(u1),
                basis.state(u2)
            );
        }
    }
    for (u1, l1, u2, l2, v) in feed {
        assert!((r.feeding_rate(u1, l1, u2, l2) - v).norm() < tol);
    }
}

#[test]
fn sodium_cavity_matches_uncoupled_oracle() {
    let hs = sodium();
    let m = ModeDensityModifier::planar_cavity(0.9).unwrap();
    let r = rates_spontaneous(&Scheme::Hyperfine(hs.clone()), &m).unwrap();
    let f = 0.1 / 1.9;
    let k = KMatrix::diagonal(2.0 / 3.0 * f, 2.0 / 3.0 / f, 2.0 / 3.0 * f).unwrap();
    assert_matches_oracle(&r, &hs, &k, 1e-12);
    assert!(max_off_diagonal(&r) > 1e-3 * r.scale());
    r.check_consistency().unwrap();
    assert!(r.selection_rule_holds());
}

// Dense midpoint rule over θ for the cos²θ profile, written from the d¹ table.
fn cos2_k_oracle(n_mean: f64, nodes: usize) -> KMatrix {
    let mut k = [0.0; 3];
    let dt = PI / nodes as f64;
    for i in 0..nodes {
        let t = (i as f64 + 0.5) * dt;
        let (s, c) = t.sin_cos();
        let w = 0.5 * s * dt * n_mean * c * c;
        for sig in Sigma::ALL {
            for lam in [Sigma::Minus, Sigma::Plus] {
                k[sig.index()] += w * wigner_d1(lam, sig, t).powi(2);
            }
        }
    }
    KMatrix::diagonal(k[0], k[1], k[2]).unwrap()
}

#[test]
fn sodium_cos2_matches_dense_grid_oracle() {
    let hs = sodium();
    let rule = QuadratureRule::new(16).unwrap();
    let r = rates_stimulated_with(
        &Scheme::Hyperfine(hs.clone()),
        &AngularDistribution::cos2(1.0),
        &ModeDensityModifier::Vacuum,
        &rule,
    )
    .unwrap();
    assert_matches_oracle(&r, &hs, &cos2_k_oracle(1.0, 200_000), 1e-9);
}

#[test]
fn closed_forms_for_random_diagonal_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r2 = 2f64.sqrt() / 3.0;
    for _ in 0..100 {
        let (km, k0, kp) = (
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..5.0),
        );
        let s = rng.gen_range(0.1..3.0);
        let sc = LevelScheme::d_line(1.0, 1.0, s).unwrap();
        let r = rates_fine(
            &sc,
            &TransitionK::uniform(KMatrix::diagonal(km, k0, kp).unwrap()),
        )
        .unwrap();
        let b = r.basis().clone();
        let g = |l1: Level, m1: i32, l2: Level, m2: i32| r.upper(idx(&b, l1, m1), idx(&b, l2, m2));
        let expect = [
            (g(Level::B, 3, Level::B, 3), s * kp),
            (g(Level::B, -3, Level::B, -3), s * km),
            (
                g(Level::B, 1, Level::B, 1),
                s * (2.0 / 3.0 * k0 + 1.0 / 3.0 * kp),
            ),
            (
                g(Level::B, -1, Level::B, -1),
                s * (2.0 / 3.0 * k0 + 1.0 / 3.0 * km),
            ),
            (
                g(Level::C, 1, Level::C, 1),
                s * (1.0 / 3.0 * k0 + 2.0 / 3.0 * kp),
            ),
            (
                g(Level::C, -1, Level::C, -1),
                s * (1.0 / 3.0 * k0 + 2.0 / 3.0 * km),
            ),
            (g(Level::B, 1, Level::C, 1), s * r2 * (k0 - kp)),
            (g(Level::C, 1, Level::B, 1), s * r2 * (k0 - kp)),
            (g(Level::B, -1, Level::C, -1), s * r2 * (km - k0)),
            (g(Level::C, -1, Level::B, -1), s * r2 * (km - k0)),
        ];
        let mut covered = 0.0;
        for (got, want) in expect {
            assert!((got - c64(want, 0.0)).norm() < 1e-12, "{got} vs {want}");
            covered += got.norm();
        }
        let total: f64 = r.upper_matrix().iter().map(|z| z.norm()).sum();
        assert!((total - covered).abs() < 1e-12);
        assert!(r.selection_rule_holds());
    }
}

#[test]
fn trace_identity_for_random_schemes_and_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let jd = rng.gen_range(0..=7);
        let ups = uppers_for(jd, 7);
        let jb = ups[rng.gen_range(0..ups.len())];
        let jc = ups[rng.gen_range(0..ups.len())];
        let k = TransitionK {
            at_b: random_psd_k(&mut rng),
            at_c: random_psd_k(&mut rng),
        };
        let r = rates_stimulated_from_k(&Scheme::Fine(scheme(jb, jc, jd, 0.7)), &k).unwrap();
        r.check_consistency().unwrap();
        let n = r.basis().len();
        let mut sums = DMatrix::<Complex64>::zeros(n, n);
        for f in r.feeding() {
            if f.l1 == f.l2 {
                sums[(f.u1, f.u2)] += f.value;
            }
        }
        assert!((sums - r.upper_matrix()).camax() < 1e-12 * r.scale());
    }
}

#[test]
fn selection_rule_for_diagonal_k_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let diag = KMatrix::diagonal(0.3, 1.1, 0.2).unwrap();
    for (jb, jc, jd) in [(3, 1, 1), (4, 2, 2), (2, 0, 2), (5, 7, 5)] {
        let r = rates_fine(
            &scheme(jb, jc, jd, 1.0),
            &TransitionK::uniform(diag.clone()),
        )
        .unwrap();
        assert!(r.selection_rule_holds());
    }
    let r = rates_fine(&dline(), &TransitionK::uniform(random_psd_k(&mut rng))).unwrap();
    assert!(!r.selection_rule_holds());
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

#[test]
fn superoperators_preserve_hermiticity_and_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sc = Scheme::Fine(dline());
    let k = TransitionK::uniform(random_psd_k(&mut rng));
    let relax = rates_fine(&dline(), &k).unwrap();
    let stim = rates_stimulated_from_k(&sc, &k).unwrap();
    let maps = [
        build_relaxation_superop(&relax, relax.basis()).unwrap(),
        build_stimulated_superop(&stim, stim.basis()).unwrap(),
    ];
    for l in &maps {
        let n = l.dim();
        for _ in 0..100 {
            let a = random_matrix(&mut rng, n);
            let rho = &a + a.adjoint();
            let out = l.apply(&rho);
            assert!((&out - out.adjoint()).camax() < 1e-12);
            let lhs = l.apply(&a.adjoint());
            assert!((lhs - l.apply(&a).adjoint()).camax() < 1e-12);
            assert!(out.trace().norm() < 1e-12);
        }
    }
}

// Σ_{σσ'} conj(K(σ,σ')) (2 L_σ ρ L_σ'† - L_σ'† L_σ ρ - ρ L_σ'† L_σ) with
// L_σ = Σ sqrt(S) A |l⟩⟨u| over pairs of polarization σ.
fn lindblad_oracle(
    sc: &Scheme,
    s: f64,
    k: &KMatrix,
    rho: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let basis = sc.basis();
    let n = basis.len();
    let mut ls = vec![DMatrix::<Complex64>::zeros(n, n); 3];
    for u in basis.upper_indices() {
        for l in basis.lower_indices() {
            if let Some((sig, a)) = sc.amplitude(basis.state(u), basis.state(l)).unwrap() {
                ls[sig.index()][(l, u)] += c64(s.sqrt() * a, 0.0);
            }
        }
    }
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for s1 in Sigma::ALL {
        for s2 in Sigma::ALL {
            let c = k.get(s1, s2).conj();
            let a = &ls[s1.index()];
            let b = &ls[s2.index()];
            let bd_a = b.adjoint() * a;
            out += (a * rho * b.adjoint() * c64(2.0, 0.0) - &bd_a * rho - rho * &bd_a) * c;
        }
    }
    out
}

#[test]
fn relaxation_matches_lindblad_channel_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let hyper = HyperfineScheme::new(LevelScheme::d_line(1.0, 1.0, 0.8).unwrap(), h(1)).unwrap();
    let cases = [
        (
            Scheme::Fine(LevelScheme::d_line(1.0, 1.0, 0.8).unwrap()),
            KMatrix::vacuum(),
        ),
        (
            Scheme::Fine(LevelScheme::d_line(1.0, 1.0, 0.8).unwrap()),
            random_psd_k(&mut rng),
        ),
        (Scheme::Fine(scheme(2, 4, 2, 0.8)), random_psd_k(&mut rng)),
        (Scheme::Hyperfine(hyper), random_psd_k(&mut rng)),
    ];
    for (sc, k) in &cases {
        let r = rates_stimulated_from_k(sc, &TransitionK::uniform(k.clone())).unwrap();
        let l = build_relaxation_superop(&r, r.basis()).unwrap();
        let n = l.dim();
        for _ in 0..5 {
            let rho = random_matrix(&mut rng, n);
            let want = lindblad_oracle(sc, 0.8, k, &rho);
            assert!((l.apply(&rho) - want).camax() < 1e-12);
        }
    }
}

#[test]
fn vacuum_frequency_asymmetry_ratio() {
    let (wb, wc) = (1.3, 1.0);
    let sc = LevelScheme::new(
        h(3),
        h(1),
        h(1),
        wb,
        wc,
        DipoleScale::Explicit {
            mu_b: 2.0,
            mu_c: 1.5,
            prefactor: 0.4,
            enforce_alkali: false,
        },
    )
    .unwrap();
    let r = rates_spontaneous(&Scheme::Fine(sc), &ModeDensityModifier::Vacuum).unwrap();
    let level = |i: usize| r.basis().state(i).level;
    let want = (wc / wb).powi(3);
    let mut n = 0;
    for f in r.feeding() {
        if level(f.u1) == Level::B && level(f.u2) == Level::C {
            let g = r.feeding_rate(f.u2, f.l2, f.u1, f.l1);
            assert!((f.value / g - want).norm() < 1e-12);
            n += 1;
        }
    }
    assert!(n > 0);
    assert!(max_off_diagonal(&r) < 1e-12 * r.scale());
}

#[test]
fn photonic_gap_quenches_channel_and_breaks_symmetry() {
    let wc = 3.2e15;
    let wb = 1.01 * wc;
    let pc = PhotonicCrystal::new(1.005 * wc, 3.0, vec![Sigma::Plus]).unwrap();
    let sc = LevelScheme::new(h(3), h(1), h(1), wb, wc, DipoleScale::Uniform { s: 1.0 }).unwrap();
    let r =
        rates_spontaneous(&Scheme::Fine(sc), &ModeDensityModifier::PhotonicCrystal(pc)).unwrap();
    let b = r.basis().clone();
    let sig = |u: usize, l: usize| Sigma::from_delta(b.state(u).m, b.state(l).m);
    let mut asym = 0;
    for u1 in b.upper_indices() {
        for u2 in b.upper_indices() {
            for l1 in b.lower_indices() {
                for l2 in b.lower_indices() {
                    let v = r.feeding_rate(u1, l1, u2, l2);
                    let gapped = b.state(u2).level == Level::C
                        && (sig(u1, l1) == Some(Sigma::Plus) || sig(u2, l2) == Some(Sigma::Plus));
                    if gapped {
                        assert_eq!(v, Complex64::default());
                    }
                    if b.state(u1).level == Level::B && b.state(u2).level == Level::C {
                        let w = r.feeding_rate(u2, l2, u1, l1);
                        if (v - w).norm() > 1e-6 {
                            asym += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(asym > 0);
}

#[test]
fn rate_scale_enters_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let k = TransitionK::uniform(random_psd_k(&mut rng));
    let base = rates_fine(&LevelScheme::d_line(1.0, 1.0, 0.7).unwrap(), &k).unwrap();
    let p0 = interference_report(&base);
    for c in [0.25, 2.0, 1024.0] {
        let r = rates_fine(&LevelScheme::d_line(1.0, 1.0, 0.7 * c).unwrap(), &k).unwrap();
        assert_eq!(r, base.scaled(c));
        let p = interference_report(&r);
        for (a, b) in p.pairs.iter().zip(&p0.pairs) {
            assert_eq!(a.p, b.p);
            assert_eq!(a.magnitude, b.magnitude);
        }
    }
    let r = base.scaled(3.7);
    for (a, b) in interference_report(&r).pairs.iter().zip(&p0.pairs) {
        assert!((a.p.unwrap() - b.p.unwrap()).abs() < 1e-14);
    }
}

#[test]
fn isotropic_stimulated_rates() {
    let (n_mean, s) = (1.7, 0.9);
    let sc = LevelScheme::d_line(1.0, 1.0, s).unwrap();
    let r = rates_stimulated(
        &sc,
        &AngularDistribution::isotropic(n_mean),
        &ModeDensityModifier::Vacuum,
    )
    .unwrap();
    let b = r.basis().clone();
    for u in b.upper_indices() {
        assert!((r.upper(u, u).re - 2.0 / 3.0 * n_mean * s).abs() < 1e-12);
    }
    assert!(max_off_diagonal(&r) < 1e-12);
    let lower = r.lower().unwrap();
    let jd = h(1);
    for l in b.lower_indices() {
        let md = b.state(l).m;
        let mut sum = 0.0;
        for level in Level::UPPER {
            let j = sc.j(level);
            for m in j.projections() {
                for sig in Sigma::ALL {
                    if (m - md) == sig.as_halfint() && md.twice().abs() <= jd.twice() {
                        sum += clebsch_gordan(jd, md, HalfInt::ONE, sig.as_halfint(), j, m)
                            .unwrap()
                            .powi(2);
                    }
                }
            }
        }
        let want = s * 2.0 / 3.0 * n_mean * sum;
        assert!((lower[(l, l)].re - want).abs() < 1e-12);
        assert!((want - 2.0 * n_mean * s).abs() < 1e-12);
    }
    for i in b.lower_indices() {
        for j in b.lower_indices() {
            if i != j {
                assert!(lower[(i, j)].norm() < 1e-12);
            }
        }
    }
    let l = build_stimulated_superop(&r, &b).unwrap();
    let n = b.len();
    for g in b.lower_indices() {
        let mut rho = DMatrix::<Complex64>::zeros(n, n);
        rho[(g, g)] = c64(1.0, 0.0);
        let d = l.apply(&rho);
        assert!((d[(g, g)].re + 4.0 * n_mean * s).abs() < 1e-12);
    }
}

#[test]
fn dark_field_gives_zero_map() {
    let sc = dline();
    let r = rates_stimulated(
        &sc,
        &AngularDistribution::isotropic(0.0),
        &ModeDensityModifier::Vacuum,
    )
    .unwrap();
    let l = build_stimulated_superop(&r, r.basis()).unwrap();
    assert_eq!(l.matrix().camax(), 0.0);
}

#[test]
fn emission_and_absorption_share_one_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sc = Scheme::Fine(dline());
    let r = rates_stimulated_from_k(&sc, &TransitionK::uniform(random_psd_k(&mut rng))).unwrap();
    let b = r.basis().clone();
    let l = build_stimulated_superop(&r, &b).unwrap();
    let m = l.matrix();
    for u1 in b.upper_indices() {
        for u2 in b.upper_indices() {
            for l1 in b.lower_indices() {
                for l2 in b.lower_indices() {
                    let up = m[(l.index(u1, u2), l.index(l1, l2))];
                    let down = m[(l.index(l1, l2), l.index(u1, u2))];
                    assert!((up - down.conj()).norm() < 1e-14);
                    let want =
                        r.feeding_rate(u1, l1, u2, l2) + r.feeding_rate(u2, l2, u1, l1).conj();
                    assert!((up - want).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn cos2_bc_rate() {
    let (n_mean, s) = (2.0, 1.5);
    let sc = LevelScheme::d_line(1.0, 1.0, s).unwrap();
    let r = rates_stimulated(
        &sc,
        &AngularDistribution::cos2(n_mean),
        &ModeDensityModifier::Vacuum,
    )
    .unwrap();
    let b = r.basis().clone();
    let v = r.upper(idx(&b, Level::B, 1), idx(&b, Level::C, 1));
    assert!((v.re + 2.0 * 2f64.sqrt() / 45.0 * n_mean * s).abs() < 1e-12);
}

#[test]
fn isotropic_field_has_no_interference() {
    let r = rates_stimulated(
        &dline(),
        &AngularDistribution::isotropic(3.0),
        &ModeDensityModifier::Vacuum,
    )
    .unwrap();
    let rep = interference_report(&r);
    assert!(!rep.pairs.is_empty());
    for p in &rep.pairs {
        assert!(p.p.unwrap().abs() < 1e-12);
    }
}

#[test]
fn cavity_interference_grows_with_reflectivity() {
    let p_at = |r: f64| {
        let m = ModeDensityModifier::planar_cavity(r).unwrap();
        let rates = rates_spontaneous(&Scheme::Fine(dline()), &m).unwrap();
        interference_report(&rates)
            .p_for(&st(Level::B, 1), &st(Level::C, 1))
            .unwrap()
    };
    let ps: Vec<f64> = [0.0, 0.3, 0.6, 0.9, 0.99]
        .iter()
        .map(|&r| p_at(r))
        .collect();
    assert!(ps[0].abs() < 1e-12);
    assert!(ps.windows(2).all(|w| w[1] > w[0]));
    assert!(ps[4] > 0.98);
}

proptest! {
    #[test]
    fn interference_degree_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rates_fine(&dline(), &TransitionK::uniform(random_psd_k(&mut rng))).unwrap();
        for p in interference_report(&r).pairs {
            if let Some(m) = p.magnitude {
                prop_assert!(m <= 1.0 + 1e-12);
            }
        }
    }
}

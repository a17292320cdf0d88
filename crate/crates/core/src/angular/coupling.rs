//! Clebsch–Gordan coefficients, 6j symbols and Racah W coefficients.
//!
//! All three are evaluated from the explicit Racah finite sums. Each sum is
//! accumulated exactly over a common integer denominator, and the only
//! rounding happens when the final squared ratio is converted to `f64`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::factorial::{falling_ratio, table};
use super::HalfInt;
use crate::error::AngularError;

/// Triangle rule for twice-encoded momenta, including integrality of the sum.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

fn fact(n: i32) -> Result<&'static BigUint, AngularError> {
    debug_assert!(n >= 0);
    table().get(n as usize)
}

/// `sign(n) * sqrt(num * n^2 / (den * l^2))`, rounded once.
fn finish(num: BigUint, den: BigUint, n: BigInt, l: BigUint) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let sign = if n.sign() == Sign::Minus { -1.0 } else { 1.0 };
    let n_abs = n.magnitude().clone();
    let top = BigInt::from(num * &n_abs * &n_abs);
    let bottom = BigInt::from(den * &l * &l);
    let sq = BigRational::new(top, bottom)
        .to_f64()
        .expect("ratio of finite integers");
    sign * sq.sqrt()
}

/// `C^{JM}_{j1 m1 j2 m2}` in the Condon–Shortley convention.
///
/// Zero when `M != m1 + m2` or the triangle rule fails; a domain error when
/// any projection is out of range for its momentum.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64, AngularError> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;
    if m != m1 + m2 || !triangle(j1, j2, j) {
        return Ok(0.0);
    }
    let (tj1, tm1, tj2, tm2, tj, tm) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let h = |x: i32| x / 2;

    let mut pnum = BigUint::from((tj + 1) as u32);
    for x in [
        h(tj + tj1 - tj2),
        h(tj - tj1 + tj2),
        h(tj1 + tj2 - tj),
        h(tj + tm),
        h(tj - tm),
        h(tj1 - tm1),
        h(tj1 + tm1),
        h(tj2 - tm2),
        h(tj2 + tm2),
    ] {
        pnum *= fact(x)?;
    }
    let pden = fact(h(tj1 + tj2 + tj) + 1)?.clone();

    let a = h(tj1 + tj2 - tj);
    let b = h(tj1 - tm1);
    let c = h(tj2 + tm2);
    let d = h(tj - tj2 + tm1);
    let e = h(tj - tj1 - tm2);
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);
    if kmin > kmax {
        return Ok(0.0);
    }

    let u = |x: i32| x as usize;
    let mut l = fact(kmax)?.clone();
    for x in [a - kmin, b - kmin, c - kmin, d + kmax, e + kmax] {
        l *= fact(x)?;
    }

    let mut n = BigInt::zero();
    for k in kmin..=kmax {
        let mut t = falling_ratio(u(kmax), u(k));
        t *= falling_ratio(u(a - kmin), u(a - k));
        t *= falling_ratio(u(b - kmin), u(b - k));
        t *= falling_ratio(u(c - kmin), u(c - k));
        t *= falling_ratio(u(d + kmax), u(d + k));
        t *= falling_ratio(u(e + kmax), u(e + k));
        if k % 2 == 0 {
            n += BigInt::from(t);
        } else {
            n -= BigInt::from(t);
        }
    }
    Ok(finish(pnum, pden, n, l))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`; zero when any triad fails.
pub fn six_j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64, AngularError> {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(0.0);
    }
    let h = |x: i32| x / 2;

    let mut pnum = BigUint::from(1u32);
    let mut pden = BigUint::from(1u32);
    for &(a, b, c) in &triads {
        let (a, b, c) = (a.twice(), b.twice(), c.twice());
        pnum *= fact(h(a + b - c))?;
        pnum *= fact(h(a - b + c))?;
        pnum *= fact(h(-a + b + c))?;
        pden *= fact(h(a + b + c) + 1)?;
    }

    let (t1, t2, t3, t4, t5, t6) = (
        j1.twice(),
        j2.twice(),
        j3.twice(),
        j4.twice(),
        j5.twice(),
        j6.twice(),
    );
    let alphas = [
        h(t1 + t2 + t3),
        h(t1 + t5 + t6),
        h(t4 + t2 + t6),
        h(t4 + t5 + t3),
    ];
    let betas = [
        h(t1 + t2 + t4 + t5),
        h(t2 + t3 + t5 + t6),
        h(t3 + t1 + t6 + t4),
    ];
    let tmin = *alphas.iter().max().unwrap();
    let tmax = *betas.iter().min().unwrap();
    if tmin > tmax {
        return Ok(0.0);
    }
    // (tmax + 1)! is the largest factorial touched by the sum.
    fact(tmax + 1)?;

    let u = |x: i32| x as usize;
    let mut l = BigUint::from(1u32);
    for &a in &alphas {
        l *= fact(tmax - a)?;
    }
    for &b in &betas {
        l *= fact(b - tmin)?;
    }

    let mut n = BigInt::zero();
    for t in tmin..=tmax {
        let mut term = fact(t + 1)?.clone();
        for &a in &alphas {
            term *= falling_ratio(u(tmax - a), u(t - a));
        }
        for &b in &betas {
            term *= falling_ratio(u(b - tmin), u(b - t));
        }
        if t % 2 == 0 {
            n += BigInt::from(term);
        } else {
            n -= BigInt::from(term);
        }
    }
    Ok(finish(pnum, pden, n, l))
}

/// Racah coefficient `W(l1 l2 l3 l4; l5 l6) = (-1)^(l1+l2+l3+l4) {l1 l2 l5; l4 l3 l6}`.
///
/// Negative arguments and failed triangle rules give zero.
pub fn racah_w(
    l1: HalfInt,
    l2: HalfInt,
    l3: HalfInt,
    l4: HalfInt,
    l5: HalfInt,
    l6: HalfInt,
) -> Result<f64, AngularError> {
    if [l1, l2, l3, l4, l5, l6].iter().any(|l| l.twice() < 0) {
        return Ok(0.0);
    }
    let s = six_j(l1, l2, l5, l4, l3, l6)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let twice_sum = l1.twice() + l2.twice() + l3.twice() + l4.twice();
    debug_assert_eq!(twice_sum % 2, 0);
    Ok(if (twice_sum / 2) % 2 == 0 { s } else { -s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hi(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn stretched_state_is_one() {
        let c = clebsch_gordan(hi(1), hi(1), hi(2), hi(2), hi(3), hi(3)).unwrap();
        assert_eq!(c, 1.0);
    }

    #[test]
    fn one_one_zero_vanishes() {
        // <1 0; 1 0 | 1 0> = 0 by the parity of the Racah sum.
        let c = clebsch_gordan(hi(2), hi(0), hi(2), hi(0), hi(2), hi(0)).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn known_half_one_values() {
        // 1/2 x 1 -> 3/2 and 1/2, M = 1/2.
        let s = |v: f64| v.sqrt();
        let cases = [
            (1, 1, 0, 3, 1, s(2.0 / 3.0)),
            (1, -1, 2, 3, 1, s(1.0 / 3.0)),
            (1, 1, 0, 1, 1, s(1.0 / 3.0)),
            (1, -1, 2, 1, 1, -s(2.0 / 3.0)),
        ];
        for (tj1m, tm1, tm2, tj, tm, want) in cases {
            let got =
                clebsch_gordan(hi(1), hi(tj1m * tm1), hi(2), hi(tm2), hi(tj), hi(tm)).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn selection_rules_give_zero() {
        assert_eq!(
            clebsch_gordan(hi(1), hi(1), hi(2), hi(2), hi(3), hi(1)).unwrap(),
            0.0
        );
        assert_eq!(
            clebsch_gordan(hi(1), hi(1), hi(2), hi(0), hi(7), hi(1)).unwrap(),
            0.0
        );
    }

    #[test]
    fn malformed_projection_is_domain_error() {
        let r = clebsch_gordan(hi(1), hi(3), hi(2), hi(0), hi(3), hi(3));
        assert!(matches!(r, Err(AngularError::InvalidProjection { .. })));
        let r = clebsch_gordan(hi(1), hi(0), hi(2), hi(0), hi(1), hi(0));
        assert!(r.is_err());
    }

    #[test]
    fn six_j_known_values() {
        // {1 1 1; 1 1 1} = 1/6, {1/2 1/2 1; 1/2 1/2 0} = 1/2.
        assert_abs_diff_eq!(
            six_j(hi(2), hi(2), hi(2), hi(2), hi(2), hi(2)).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            six_j(hi(1), hi(1), hi(2), hi(1), hi(1), hi(0)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        // {1/2 1/2 0; 1/2 1/2 0} = -1/2
        assert_abs_diff_eq!(
            six_j(hi(1), hi(1), hi(0), hi(1), hi(1), hi(0)).unwrap(),
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn triangle_violations_give_zero() {
        assert_eq!(
            six_j(hi(2), hi(2), hi(8), hi(2), hi(2), hi(2)).unwrap(),
            0.0
        );
        assert_eq!(
            racah_w(hi(2), hi(2), hi(2), hi(2), hi(9), hi(2)).unwrap(),
            0.0
        );
        assert_eq!(
            racah_w(hi(-2), hi(2), hi(2), hi(2), hi(0), hi(2)).unwrap(),
            0.0
        );
    }

    #[test]
    fn large_arguments_stay_finite() {
        let j = hi(25);
        let c = clebsch_gordan(j, hi(1), j, hi(-1), hi(0), hi(0)).unwrap();
        assert_abs_diff_eq!(c.abs(), 1.0 / 26f64.sqrt(), epsilon = 1e-14);
        let s = six_j(j, j, hi(0), j, j, hi(50)).unwrap();
        assert!(s.is_finite());
    }
}

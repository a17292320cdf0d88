//! Self-checks: quadrature, angular-momentum identities and free-space
//! diagonality on a grid of angular momenta up to a cap.

use std::fmt::Write as _;

use vrelax_core::angular::{clebsch_gordan, six_j, triangle, wigner_d1, HalfInt, Sigma};
use vrelax_core::environment::{quadrature_selfcheck, ModeDensityModifier, DEFAULT_QUAD_ORDER};
use vrelax_core::operators::{rates_spontaneous, DipoleScale, LevelScheme, Scheme};

/// Largest angular momentum on the doctor grid.
pub const GRID_MAX: HalfInt = HalfInt::from_twice(9);

const ANGULAR_TOL: f64 = 1e-12;
const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DoctorOptions {
    pub quad_order: usize,
    pub grid_cap: HalfInt,
}

impl Default for DoctorOptions {
    fn default() -> Self {
        DoctorOptions {
            quad_order: DEFAULT_QUAD_ORDER,
            grid_cap: GRID_MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct DoctorReport {
    pub checks: Vec<CheckResult>,
}

impl DoctorReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# vrelax doctor\n");
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = writeln!(out, "{tag} {} ({})", c.name, c.detail);
        }
        match self.first_failure() {
            Some(c) => {
                let _ = writeln!(out, "first failure: {}", c.name);
            }
            None => out.push_str("all checks passed\n"),
        }
        out
    }
}

fn graded(name: String, deviation: f64, tol: f64) -> CheckResult {
    let status = if deviation < tol {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult {
        name,
        status,
        detail: format!("max deviation {deviation:e}, tol {tol:e}"),
    }
}

fn failed(name: String, detail: String) -> CheckResult {
    CheckResult {
        name,
        status: Status::Fail,
        detail,
    }
}

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn step2(lo: i32, hi: i32) -> impl Iterator<Item = i32> {
    (lo..=hi).step_by(2)
}

fn quadrature(order: usize) -> CheckResult {
    let name = "quadrature".to_string();
    match quadrature_selfcheck(order) {
        Ok(sc) => {
            let mut r = graded(name, sc.max_deviation(), QUADRATURE_TOL);
            r.detail = format!("order {order}, {}", r.detail);
            r
        }
        Err(e) => failed(name, e.to_string()),
    }
}

fn wigner_d1_orthogonality() -> CheckResult {
    let mut dev: f64 = 0.0;
    for beta in [0.0, 0.3, 1.1, 2.0, std::f64::consts::PI] {
        for a in Sigma::ALL {
            for b in Sigma::ALL {
                let s: f64 = Sigma::ALL
                    .iter()
                    .map(|&m| wigner_d1(a, m, beta) * wigner_d1(b, m, beta))
                    .sum();
                dev = dev.max((s - f64::from(u8::from(a == b))).abs());
            }
        }
    }
    graded("wigner-d1-orthogonality".into(), dev, ANGULAR_TOL)
}

/// `Σ_{m1 m2} C(j1 m1 j2 m2 | J M) C(j1 m1 j2 m2 | J' M') = δ_{JJ'} δ_{MM'}` with `j1 = J`.
fn cg_orthogonality(j1: i32) -> Result<f64, String> {
    let mut dev: f64 = 0.0;
    for j2 in 0..=j1 {
        let totals: Vec<i32> = step2((j1 - j2).abs(), j1 + j2).collect();
        for &ja in &totals {
            for &jb in &totals {
                for ma in step2(-ja, ja).filter(|m| m.abs() <= jb) {
                    let mut s = 0.0;
                    for m1 in step2(-j1, j1) {
                        let m2 = ma - m1;
                        if m2.abs() > j2 {
                            continue;
                        }
                        let a = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(ja), h(ma))
                            .map_err(|e| e.to_string())?;
                        let b = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(jb), h(ma))
                            .map_err(|e| e.to_string())?;
                        s += a * b;
                    }
                    let want = if ja == jb { 1.0 } else { 0.0 };
                    dev = dev.max((s - want).abs());
                }
            }
        }
    }
    Ok(dev)
}

/// `Σ_{Md} C(Jd Md 1 σ | J1 M) C(Jd Md 1 σ | J2 M) = δ_{J1 J2}` with `Jd = J`
/// and `σ = M - Md`.
fn upper_sum_rule(jd: i32) -> Result<f64, String> {
    let mut dev: f64 = 0.0;
    let uppers: Vec<i32> = step2((jd - 2).max(jd % 2), jd + 2)
        .filter(|&j| j + jd > 0)
        .collect();
    for &ja in &uppers {
        for &jb in &uppers {
            for m in step2(-ja.min(jb), ja.min(jb)) {
                let mut s = 0.0;
                for md in step2(-jd, jd) {
                    let sig = m - md;
                    if sig.abs() > 2 {
                        continue;
                    }
                    let a = clebsch_gordan(h(jd), h(md), h(2), h(sig), h(ja), h(m))
                        .map_err(|e| e.to_string())?;
                    let b = clebsch_gordan(h(jd), h(md), h(2), h(sig), h(jb), h(m))
                        .map_err(|e| e.to_string())?;
                    s += a * b;
                }
                let want = if ja == jb { 1.0 } else { 0.0 };
                dev = dev.max((s - want).abs());
            }
        }
    }
    Ok(dev)
}

/// `Σ_l (2l+1) {l1 l2 l'; l3 l4 l}{l3 l2 l; l1 l4 l''} = δ_{l'l''}/(2l'+1)` with `l1 = J`.
fn six_j_sum_rule(l1: i32) -> Result<f64, String> {
    let mut dev: f64 = 0.0;
    let six =
        |a, b, c, d, e, f| six_j(h(a), h(b), h(c), h(d), h(e), h(f)).map_err(|e| e.to_string());
    for l2 in 0..=l1 {
        for l3 in 0..=l1 {
            for l4 in 0..=l1 {
                let lo = (l1 - l2).abs().max((l3 - l4).abs());
                let hi = (l1 + l2).min(l3 + l4);
                for lp in step2(lo, hi) {
                    if !triangle(h(l1), h(l2), h(lp)) || !triangle(h(l3), h(l4), h(lp)) {
                        continue;
                    }
                    for lpp in step2(lo, hi) {
                        if !triangle(h(l1), h(l2), h(lpp)) || !triangle(h(l3), h(l4), h(lpp)) {
                            continue;
                        }
                        let lmin = (l2 - l3).abs().max((l1 - l4).abs());
                        let lmax = (l2 + l3).min(l1 + l4);
                        let mut s = 0.0;
                        for l in step2(lmin, lmax) {
                            s += f64::from(l + 1)
                                * six(l1, l2, lp, l3, l4, l)?
                                * six(l3, l2, l, l1, l4, lpp)?;
                        }
                        let want = if lp == lpp {
                            1.0 / f64::from(lp + 1)
                        } else {
                            0.0
                        };
                        dev = dev.max((s - want).abs());
                    }
                }
            }
        }
    }
    Ok(dev)
}

/// Largest free-space off-diagonal rate, relative to `S`, over every
/// dipole-allowed scheme with `J_b ≠ J_c` whose largest momentum is `J`.
fn diagonality(j: i32) -> Result<f64, String> {
    let mut dev: f64 = 0.0;
    for jd in 0..=j {
        for jb in 0..=j {
            for jc in 0..=j {
                if jb == jc || jd.max(jb).max(jc) != j {
                    continue;
                }
                let Ok(fine) = LevelScheme::new(
                    h(jb),
                    h(jc),
                    h(jd),
                    1.3,
                    1.0,
                    DipoleScale::Uniform { s: 1.0 },
                ) else {
                    continue;
                };
                let rates = rates_spontaneous(&Scheme::Fine(fine), &ModeDensityModifier::Vacuum)
                    .map_err(|e| e.to_string())?;
                let m = rates.upper_matrix();
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        if r != c {
                            dev = dev.max(m[(r, c)].norm());
                        }
                    }
                }
            }
        }
    }
    Ok(dev)
}

type PerJCheck = fn(i32) -> Result<f64, String>;

pub fn run(opts: &DoctorOptions) -> DoctorReport {
    let mut checks = vec![quadrature(opts.quad_order), wigner_d1_orthogonality()];
    let per_j: [(&str, PerJCheck); 4] = [
        ("cg-orthogonality", cg_orthogonality),
        ("upper-level-sum-rule", upper_sum_rule),
        ("six-j-sum-rule", six_j_sum_rule),
        ("free-space-diagonality", diagonality),
    ];
    for (label, check) in per_j {
        for t in 0..=GRID_MAX.twice() {
            let name = format!("{label} J={}", h(t));
            if t > opts.grid_cap.twice() {
                checks.push(CheckResult {
                    name,
                    status: Status::Skip,
                    detail: format!("above grid cap {}", opts.grid_cap),
                });
                continue;
            }
            checks.push(match check(t) {
                Ok(dev) => graded(name, dev, ANGULAR_TOL),
                Err(e) => failed(name, e),
            });
        }
    }
    DoctorReport { checks }
}

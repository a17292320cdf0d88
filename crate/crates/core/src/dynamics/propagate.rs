use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::{hermiticity_defect, min_eigenvalue, AtomicHamiltonian, DensityMatrix};
use crate::error::DynamicsError;
use crate::operators::{vectorize, Basis, Superoperator};

pub const TRACE_ABORT: f64 = 1e-6;
pub const NEGATIVITY_ABORT: f64 = -1e-6;

/// Dense generator of `dρ/dt = -i[H, ρ] + Σ L[ρ]` in the row-major vectorization.
pub fn generator(
    h: &AtomicHamiltonian,
    l_list: &[Superoperator],
) -> Result<DMatrix<Complex64>, DynamicsError> {
    let basis = h.basis();
    let n = basis.len();
    let mut g = DMatrix::<Complex64>::zeros(n * n, n * n);
    for l in l_list {
        if l.basis() != basis {
            return Err(DynamicsError::Dimension(
                "superoperator basis differs from the Hamiltonian basis".into(),
            ));
        }
        g += l.matrix();
    }
    let e = h.energies();
    for i in 0..n {
        for j in 0..n {
            g[(i * n + j, i * n + j)] += Complex64::new(0.0, -(e[i] - e[j]));
        }
    }
    Ok(g)
}

/// Sampled solution of the master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    basis: Basis,
    samples: Vec<DensityMatrix>,
    /// `dt × (largest generator diagonal magnitude)`.
    pub stiffness: f64,
}

impl Trajectory {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn samples(&self) -> &[DensityMatrix] {
        &self.samples
    }

    pub fn last(&self) -> &DensityMatrix {
        self.samples
            .last()
            .expect("trajectory has the initial sample")
    }

    /// `t` then `re_i_j, im_i_j` for every element in basis order.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let n = self.basis.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        for i in 0..n {
            for j in 0..n {
                header.push(format!("re_{i}_{j}"));
                header.push(format!("im_{i}_{j}"));
            }
        }
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![format!("{:e}", s.time())];
            for i in 0..n {
                for j in 0..n {
                    let z = s.matrix()[(i, j)];
                    row.push(format!("{:e}", z.re + 0.0));
                    row.push(format!("{:e}", z.im + 0.0));
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `t, p_0, ..., p_{n-1}, trace`.
    pub fn write_populations_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let n = self.basis.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("p_{i}")));
        header.push("trace".into());
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![format!("{:e}", s.time())];
            row.extend(s.populations().iter().map(|p| format!("{p:e}")));
            row.push(format!("{:e}", s.trace().re));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn unvec(v: &DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, v.as_slice())
}

fn hermitize(v: &mut DVector<Complex64>, n: usize) {
    for i in 0..n {
        v[i * n + i].im = 0.0;
        for j in i + 1..n {
            let a = v[i * n + j];
            let b = v[j * n + i];
            let m = (a + b.conj()) * 0.5;
            v[i * n + j] = m;
            v[j * n + i] = m.conj();
        }
    }
}

/// Row-wise nonzeros of a generator; Lindblad generators are very sparse.
struct SparseRows {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseRows {
    fn new(g: &DMatrix<Complex64>) -> Self {
        let zero = Complex64::default();
        let rows = (0..g.nrows())
            .map(|i| {
                (0..g.ncols())
                    .filter(|&j| g[(i, j)] != zero)
                    .map(|j| (j, g[(i, j)]))
                    .collect()
            })
            .collect();
        SparseRows { rows }
    }

    fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows
                .iter()
                .map(|r| r.iter().map(|&(j, z)| z * v[j]).sum::<Complex64>()),
        )
    }

    /// Gershgorin bound on the spectral radius.
    fn radius_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(_, z)| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn rk4_step(g: &SparseRows, v: &DVector<Complex64>, h: f64) -> DVector<Complex64> {
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = g.apply(v);
    let k2 = g.apply(&(v + &k1 * half));
    let k3 = g.apply(&(v + &k2 * half));
    let k4 = g.apply(&(v + &k3 * hc));
    v + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Classical fixed-step RK4 from `rho0` to `t_final`.
///
/// The step count is `ceil(t_final / dt)` and the step is shrunk to land on
/// `t_final` exactly. Each step is followed by `ρ ← (ρ + ρ†)/2`. Samples are
/// kept every `stride` steps plus the final state; at each sample the trace
/// drift (abort above 1e-6) and the smallest eigenvalue (abort below -1e-6)
/// are checked. A warning is logged when `dt` times the largest generator
/// diagonal is 0.1 or more.
pub fn propagate(
    rho0: &DensityMatrix,
    h: &AtomicHamiltonian,
    l_list: &[Superoperator],
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DynamicsError::TimeStep(dt));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(DynamicsError::TimeStep(t_final));
    }
    if rho0.basis() != h.basis() {
        return Err(DynamicsError::Dimension(
            "initial state basis differs from the Hamiltonian basis".into(),
        ));
    }
    let basis = h.basis().clone();
    let n = basis.len();
    let g = generator(h, l_list)?;
    let steps = (t_final / dt).ceil() as usize;
    let step = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };
    let rate = g.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let stiffness = step * rate;
    if stiffness >= 0.1 {
        log::warn!("dt x max rate = {stiffness:.3} >= 0.1; RK4 results may be inaccurate");
    }
    let stride = stride.max(1);
    let g = SparseRows::new(&g);
    let t0 = rho0.time();
    let trace0 = rho0.trace().re;
    let mut v = vectorize(rho0.matrix());
    let mut samples = vec![rho0.clone()];
    for k in 1..=steps {
        v = rk4_step(&g, &v, step);
        hermitize(&mut v, n);
        let t = t0 + step * k as f64;
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DynamicsError::NonFinite(t));
        }
        if k % stride == 0 || k == steps {
            let rho = unvec(&v, n);
            let tr = rho.diagonal().iter().map(|z| z.re).sum::<f64>();
            if (tr - trace0).abs() > TRACE_ABORT {
                return Err(DynamicsError::TraceDrift { t, trace: tr });
            }
            let e = min_eigenvalue(&rho);
            if e < NEGATIVITY_ABORT {
                return Err(DynamicsError::Negativity { t, eigenvalue: e });
            }
            debug_assert!(hermiticity_defect(&rho) == 0.0);
            samples.push(DensityMatrix::from_parts_unchecked(basis.clone(), rho, t));
        }
    }
    Ok(Trajectory {
        basis,
        samples,
        stiffness,
    })
}

const NULL_TOL: f64 = 1e-9;
const RELAX_TOL: f64 = 1e-12;
const RELAX_MAX_STEPS: usize = 2_000_000;

/// Number of singular values of the generator below `1e-9` of the largest.
pub fn null_space_dimension(g: &DMatrix<Complex64>) -> usize {
    let sv = g.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return sv.len();
    }
    sv.iter().filter(|&&s| s < NULL_TOL * top).count()
}

/// Trace-one null vector of the full generator.
///
/// A one-dimensional null space is solved directly (one population equation
/// replaced by the trace condition). Otherwise the state is relaxed from the
/// maximally mixed state until `max |dρ/dt| < 1e-12`; if that does not happen
/// the null-space dimension is reported.
pub fn steady_state(
    h: &AtomicHamiltonian,
    l_list: &[Superoperator],
) -> Result<DensityMatrix, DynamicsError> {
    let basis = h.basis().clone();
    let n = basis.len();
    let g = generator(h, l_list)?;
    let null = null_space_dimension(&g);
    let v = if null == 1 {
        let mut a = g.clone();
        let mut b = DVector::<Complex64>::zeros(n * n);
        for c in 0..n * n {
            a[(0, c)] = Complex64::default();
        }
        for i in 0..n {
            a[(0, i * n + i)] = Complex64::new(1.0, 0.0);
        }
        b[0] = Complex64::new(1.0, 0.0);
        let mut v = a.lu().solve(&b).ok_or(DynamicsError::Singular)?;
        hermitize(&mut v, n);
        v
    } else {
        relax(&g, &basis).ok_or(DynamicsError::Degenerate(null))?
    };
    let rho = unvec(&v, n);
    let tr = rho.diagonal().iter().map(|z| z.re).sum::<f64>();
    let rho = rho / Complex64::new(tr, 0.0);
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DynamicsError::Singular);
    }
    Ok(DensityMatrix::from_parts_unchecked(
        basis,
        rho,
        f64::INFINITY,
    ))
}

/// Any step with `h·ρ(g) <= 1` keeps RK4 stable on the closed left half plane,
/// and fixed points of the step are exactly the null vectors of `g`.
fn relax(g: &DMatrix<Complex64>, basis: &Basis) -> Option<DVector<Complex64>> {
    let n = basis.len();
    let g = SparseRows::new(g);
    let bound = g.radius_bound();
    let mut v = vectorize(DensityMatrix::maximally_mixed(basis.clone()).matrix());
    if bound == 0.0 {
        return Some(v);
    }
    let h = 0.9 / bound;
    for k in 0..RELAX_MAX_STEPS {
        if k % 16 == 0 {
            let d = g.apply(&v);
            if d.iter().map(|z| z.norm()).fold(0.0, f64::max) < RELAX_TOL {
                return Some(v);
            }
        }
        v = rk4_step(&g, &v, h);
        hermitize(&mut v, n);
    }
    None
}

use std::f64::consts::{PI, TAU};
use std::io::Read;
use std::path::Path;

use crate::angular::Sigma;
use crate::error::EnvironmentError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistributionKind {
    Isotropic,
    AxisymmetricCos2,
    Tabulated,
}

/// Mean photon number per mode `N_{kλ}(θ, φ)` at the transition frequency.
#[derive(Clone, Debug, PartialEq)]
pub enum AngularDistribution {
    /// Constant `N` in every direction and helicity.
    Isotropic { n_mean: f64 },
    /// `N cos²θ`, symmetric about the quantization axis.
    Cos2 { n_mean: f64 },
    /// Bilinear interpolation on a user-supplied `(θ, φ)` grid per helicity.
    Tabulated(TabulatedDistribution),
}

impl AngularDistribution {
    pub fn isotropic(n_mean: f64) -> Self {
        AngularDistribution::Isotropic { n_mean }
    }

    pub fn cos2(n_mean: f64) -> Self {
        AngularDistribution::Cos2 { n_mean }
    }

    pub fn kind(&self) -> DistributionKind {
        match self {
            AngularDistribution::Isotropic { .. } => DistributionKind::Isotropic,
            AngularDistribution::Cos2 { .. } => DistributionKind::AxisymmetricCos2,
            AngularDistribution::Tabulated(_) => DistributionKind::Tabulated,
        }
    }

    /// Photon number for helicity `lam`; `lam = 0` carries no transverse mode and yields 0.
    pub fn evaluate(&self, theta: f64, phi: f64, lam: Sigma) -> f64 {
        if lam == Sigma::Zero {
            return 0.0;
        }
        match self {
            AngularDistribution::Isotropic { n_mean } => *n_mean,
            AngularDistribution::Cos2 { n_mean } => {
                let c = theta.cos();
                n_mean * c * c
            }
            AngularDistribution::Tabulated(t) => t.evaluate(theta, phi, lam),
        }
    }

    /// The same distribution multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            AngularDistribution::Isotropic { n_mean } => {
                AngularDistribution::Isotropic { n_mean: n_mean * c }
            }
            AngularDistribution::Cos2 { n_mean } => {
                AngularDistribution::Cos2 { n_mean: n_mean * c }
            }
            AngularDistribution::Tabulated(t) => AngularDistribution::Tabulated(t.scaled(c)),
        }
    }

    /// No `φ` dependence, so every off-diagonal `K` entry vanishes.
    pub fn is_axisymmetric(&self) -> bool {
        match self {
            AngularDistribution::Tabulated(t) => t.phis.len() == 1,
            _ => true,
        }
    }
}

/// Rectangular `(θ, φ)` grid of photon numbers for `λ = -1` and `λ = +1`.
///
/// `θ` is clamped to the grid range; `φ` is periodic with period `2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedDistribution {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    // [helicity][theta_index * phis.len() + phi_index]; helicity 0 -> λ=-1, 1 -> λ=+1
    values: [Vec<f64>; 2],
}

fn helicity_slot(lam: Sigma) -> Option<usize> {
    match lam {
        Sigma::Minus => Some(0),
        Sigma::Plus => Some(1),
        Sigma::Zero => None,
    }
}

impl TabulatedDistribution {
    /// Builds a grid from θ nodes, φ nodes and values laid out θ-major for each helicity.
    pub fn new(
        thetas: Vec<f64>,
        phis: Vec<f64>,
        minus: Vec<f64>,
        plus: Vec<f64>,
    ) -> Result<Self, EnvironmentError> {
        let err = |m: String| EnvironmentError::Table(m);
        if thetas.is_empty() || phis.is_empty() {
            return Err(err(
                "grid must have at least one theta and one phi node".into()
            ));
        }
        for w in thetas.windows(2) {
            if !(w[1] > w[0]) {
                return Err(err("theta nodes must be strictly increasing".into()));
            }
        }
        for w in phis.windows(2) {
            if !(w[1] > w[0]) {
                return Err(err("phi nodes must be strictly increasing".into()));
            }
        }
        if thetas.iter().any(|t| !(0.0..=PI + 1e-12).contains(t)) {
            return Err(err("theta nodes must lie in [0, pi]".into()));
        }
        if phis.iter().any(|p| !(0.0..TAU).contains(p)) {
            return Err(err("phi nodes must lie in [0, 2pi)".into()));
        }
        let n = thetas.len() * phis.len();
        for (vals, lam) in [(&minus, -1), (&plus, 1)] {
            if vals.len() != n {
                return Err(err(format!(
                    "lambda = {lam}: expected {n} values, got {}",
                    vals.len()
                )));
            }
            if let Some(v) = vals.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(err(format!("lambda = {lam}: invalid photon number {v}")));
            }
        }
        Ok(TabulatedDistribution {
            thetas,
            phis,
            values: [minus, plus],
        })
    }

    /// Parses `theta_rad, phi_rad, lambda, n_mean` rows. The grid must be
    /// complete and rectangular; NaN, negative numbers and duplicates are rejected.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, EnvironmentError> {
        let err = |m: String| EnvironmentError::Table(m);
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
        let expected = ["theta_rad", "phi_rad", "lambda", "n_mean"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(err(format!(
                "header must be `theta_rad, phi_rad, lambda, n_mean`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(", ")
            )));
        }
        let mut rows: Vec<(f64, f64, usize, f64)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| err(format!("line {line}: {e}")))?;
            if rec.len() != 4 {
                return Err(err(format!(
                    "line {line}: expected 4 fields, got {}",
                    rec.len()
                )));
            }
            let num = |k: usize, name: &str| -> Result<f64, EnvironmentError> {
                let v: f64 = rec[k]
                    .parse()
                    .map_err(|_| err(format!("line {line}: cannot parse {name} {:?}", &rec[k])))?;
                if !v.is_finite() {
                    return Err(err(format!("line {line}: {name} is not finite")));
                }
                Ok(v)
            };
            let theta = num(0, "theta_rad")?;
            let phi = num(1, "phi_rad")?;
            let lam: Sigma = rec[2]
                .parse()
                .map_err(|_| err(format!("line {line}: lambda must be -1 or +1")))?;
            let slot = helicity_slot(lam)
                .ok_or_else(|| err(format!("line {line}: lambda must be -1 or +1")))?;
            let n = num(3, "n_mean")?;
            if n < 0.0 {
                return Err(err(format!("line {line}: negative n_mean {n}")));
            }
            rows.push((theta, phi, slot, n));
        }
        let mut thetas: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut phis: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for v in [&mut thetas, &mut phis] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let n = thetas.len() * phis.len();
        if rows.len() != 2 * n {
            return Err(err(format!(
                "grid is not complete: {} theta x {} phi x 2 helicities needs {} rows, found {}",
                thetas.len(),
                phis.len(),
                2 * n,
                rows.len()
            )));
        }
        let mut values = [vec![f64::NAN; n], vec![f64::NAN; n]];
        for (theta, phi, slot, v) in rows {
            let it = thetas.binary_search_by(|x| x.total_cmp(&theta)).unwrap();
            let ip = phis.binary_search_by(|x| x.total_cmp(&phi)).unwrap();
            let cell = &mut values[slot][it * phis.len() + ip];
            if !cell.is_nan() {
                return Err(err(format!(
                    "duplicate grid point theta = {theta}, phi = {phi}"
                )));
            }
            *cell = v;
        }
        let [minus, plus] = values;
        Self::new(thetas, phis, minus, plus)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, EnvironmentError> {
        let f = std::fs::File::open(path)
            .map_err(|e| EnvironmentError::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(f)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut().flatten() {
            *v *= c;
        }
        out
    }

    pub fn evaluate(&self, theta: f64, phi: f64, lam: Sigma) -> f64 {
        let Some(slot) = helicity_slot(lam) else {
            return 0.0;
        };
        let vals = &self.values[slot];
        let np = self.phis.len();
        let (t0, t1, wt) = bracket_clamped(&self.thetas, theta);
        let (p0, p1, wp) = bracket_periodic(&self.phis, phi);
        let at = |it: usize, ip: usize| vals[it * np + ip];
        let lo = at(t0, p0) * (1.0 - wp) + at(t0, p1) * wp;
        let hi = at(t1, p0) * (1.0 - wp) + at(t1, p1) * wp;
        lo * (1.0 - wt) + hi * wt
    }
}

fn bracket_clamped(nodes: &[f64], x: f64) -> (usize, usize, f64) {
    let n = nodes.len();
    if n == 1 || x <= nodes[0] {
        return (0, 0, 0.0);
    }
    if x >= nodes[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let k = nodes.partition_point(|&v| v <= x) - 1;
    let w = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    (k, k + 1, w)
}

fn bracket_periodic(nodes: &[f64], x: f64) -> (usize, usize, f64) {
    let n = nodes.len();
    if n == 1 {
        return (0, 0, 0.0);
    }
    let mut x = x.rem_euclid(TAU);
    if x < nodes[0] {
        x += TAU;
    }
    if x >= nodes[n - 1] {
        let span = nodes[0] + TAU - nodes[n - 1];
        return (n - 1, 0, (x - nodes[n - 1]) / span);
    }
    let k = nodes.partition_point(|&v| v <= x) - 1;
    (k, k + 1, (x - nodes[k]) / (nodes[k + 1] - nodes[k]))
}

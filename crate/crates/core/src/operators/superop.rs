use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::Basis;
use super::rates::{RateKind, RateSet};
use crate::error::OperatorError;

/// Dense linear map on `n×n` density matrices.
///
/// A density matrix is vectorized row-major: element `(i, j)` sits at
/// `i * n + j`, so the matrix is `n² × n²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    basis: Basis,
    matrix: DMatrix<Complex64>,
}

impl Superoperator {
    pub fn zero(basis: Basis) -> Self {
        let d = basis.len() * basis.len();
        Superoperator {
            basis,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn from_matrix(basis: Basis, matrix: DMatrix<Complex64>) -> Result<Self, OperatorError> {
        let d = basis.len() * basis.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(OperatorError::Basis(format!(
                "superoperator is {}x{}, basis needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Superoperator { basis, matrix })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Side `n` of the density matrices this map acts on.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim() + j
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.dim();
        let v = vectorize(rho);
        let out = &self.matrix * v;
        DMatrix::from_row_slice(n, n, out.as_slice())
    }

    pub fn sum(&self, other: &Superoperator) -> Result<Superoperator, OperatorError> {
        if self.basis != other.basis {
            return Err(OperatorError::Basis(
                "cannot add superoperators over different bases".into(),
            ));
        }
        Ok(Superoperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    fn add(&mut self, row: (usize, usize), col: (usize, usize), v: Complex64) {
        let (r, c) = (self.index(row.0, row.1), self.index(col.0, col.1));
        self.matrix[(r, c)] += v;
    }

    /// Adds `-Xρ - ρX†`.
    fn add_depletion(&mut self, x: &DMatrix<Complex64>) {
        let n = self.dim();
        for i in 0..n {
            for a in 0..n {
                let g = x[(i, a)];
                if g == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    self.add((i, j), (a, j), -g);
                    self.add((j, i), (j, a), -g.conj());
                }
            }
        }
    }

    /// Writes a `#` legend of the basis followed by `row, re_0, im_0, ...`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.dim();
        writeln!(
            out,
            "# basis ({n} states); vector index k = i * {n} + j for element (i, j)"
        )?;
        for (i, s) in self.basis.states().iter().enumerate() {
            writeln!(out, "# {i},{s}")?;
        }
        let d = n * n;
        let mut header = String::from("row");
        for c in 0..d {
            header.push_str(&format!(",re_{c},im_{c}"));
        }
        writeln!(out, "{header}")?;
        for r in 0..d {
            let mut line = r.to_string();
            for c in 0..d {
                let z = self.matrix[(r, c)];
                line.push_str(&format!(",{:e},{:e}", z.re + 0.0, z.im + 0.0));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

pub fn vectorize(rho: &DMatrix<Complex64>) -> nalgebra::DVector<Complex64> {
    let n = rho.nrows();
    nalgebra::DVector::from_iterator(n * n, (0..n).flat_map(|i| (0..n).map(move |j| rho[(i, j)])))
}

fn check(rates: &RateSet, basis: &Basis) -> Result<(), OperatorError> {
    if rates.basis() != basis {
        return Err(OperatorError::Basis(
            "rate set was assembled over a different basis".into(),
        ));
    }
    rates.check_consistency()
}

fn add_emission(l: &mut Superoperator, rates: &RateSet) {
    l.add_depletion(rates.upper_matrix());
    for f in rates.feeding() {
        l.add((f.l1, f.l2), (f.u1, f.u2), f.value.conj());
        l.add((f.l2, f.l1), (f.u2, f.u1), f.value);
    }
}

/// Relaxation map
/// `ρ ↦ -Gρ - ρG† + Σ conj(Γ)|l1⟩⟨u1|ρ|u2⟩⟨l2| + Σ Γ|l2⟩⟨u2|ρ|u1⟩⟨l1|`
/// with `G` the two-index upper block and the sums over every four-index
/// coefficient `Γ(u1 l1, u2 l2)`.
pub fn build_relaxation_superop(
    rates: &RateSet,
    basis: &Basis,
) -> Result<Superoperator, OperatorError> {
    check(rates, basis)?;
    let mut l = Superoperator::zero(basis.clone());
    add_emission(&mut l, rates);
    Ok(l)
}

/// Stimulated map: the emission terms of [`build_relaxation_superop`] plus the
/// absorption terms
/// `-Aρ - ρA† + Σ Γ|u1⟩⟨l1|ρ|l2⟩⟨u2| + Σ conj(Γ)|u2⟩⟨l2|ρ|l1⟩⟨u1|`,
/// which reuse the same four-index table, with `A` the ground-level block.
pub fn build_stimulated_superop(
    rates: &RateSet,
    basis: &Basis,
) -> Result<Superoperator, OperatorError> {
    check(rates, basis)?;
    let lower = match (rates.kind(), rates.lower()) {
        (RateKind::Stimulated, Some(a)) => a,
        _ => {
            return Err(OperatorError::Basis(
                "stimulated superoperator needs a stimulated rate set with an absorption block"
                    .into(),
            ))
        }
    };
    let mut l = Superoperator::zero(basis.clone());
    add_emission(&mut l, rates);
    l.add_depletion(lower);
    for f in rates.feeding() {
        l.add((f.u1, f.u2), (f.l1, f.l2), f.value);
        l.add((f.u2, f.u1), (f.l2, f.l1), f.value.conj());
    }
    Ok(l)
}

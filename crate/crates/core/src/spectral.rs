//! Dense spectra, ground spaces and the parity-sector structure of the
//! compass model.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, fix_phase, inner, norm, CMatrix, CVector, Eigen, C64, ZERO};
use crate::pauli::{OperatorSum, PauliTerm};

/// Degeneracy tolerance, relative to the spectral range.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Amplitudes below this are treated as zero when fixing phases.
const PHASE_EPS: f64 = 1e-8;

pub fn spectrum(h: &OperatorSum) -> Result<Eigen> {
    eig_hermitian(&h.to_matrix()?)
}

#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub e0: f64,
    pub basis: Vec<CVector>,
    /// Distance from `e0` to the next distinct level; infinite when the
    /// whole spectrum is degenerate.
    pub gap: f64,
    /// Absolute tolerance used to group the ground level.
    pub degeneracy_tol: f64,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.first().map_or(0, |v| v.len())
    }

    /// Groups every eigenvalue within `rel_tol · range` of the minimum.
    pub fn from_eigen(eig: &Eigen, rel_tol: f64) -> Result<Self> {
        let values = &eig.values;
        if values.is_empty() {
            return Err(Error::InvalidParams("empty spectrum".into()));
        }
        let range = values[values.len() - 1] - values[0];
        let tol = if range > 0.0 { rel_tol * range } else { rel_tol };
        let e_min = values[0];
        let count = values.iter().take_while(|&&v| v - e_min <= tol).count();
        let cluster: f64 = values[..count].iter().sum::<f64>() / count as f64;
        let gap = match values.get(count) {
            Some(&next) => {
                let separation = next - values[count - 1];
                if separation <= tol {
                    return Err(Error::DegeneracyAmbiguous { separation, tol });
                }
                next - cluster
            }
            None => f64::INFINITY,
        };
        let basis = (0..count)
            .map(|i| {
                let mut v = eig.vector(i);
                fix_phase(&mut v, PHASE_EPS);
                v
            })
            .collect();
        Ok(Self {
            e0: cluster,
            basis,
            gap,
            degeneracy_tol: tol,
        })
    }

    /// Rotates the basis to diagonalize `op` within the ground space,
    /// largest eigenvalue first, each vector phase-fixed.
    pub fn gauge_fixed(&self, op: &PauliTerm) -> Result<Self> {
        let k = self.basis.len();
        let images: Vec<CVector> = self.basis.iter().map(|v| op.apply(v)).collect();
        let g = CMatrix::from_fn(k, k, |p, q| inner(&self.basis[p], &images[q]));
        let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        let eig = eig_hermitian(&g)?;
        let basis = (0..k)
            .rev()
            .map(|col| {
                let mut v = CVector::zeros(self.dim());
                for (q, b) in self.basis.iter().enumerate() {
                    v += b * eig.vectors[(q, col)];
                }
                let n = norm(&v);
                v /= C64::new(n, 0.0);
                fix_phase(&mut v, PHASE_EPS);
                v
            })
            .collect();
        Ok(Self {
            basis,
            ..self.clone()
        })
    }

    /// Largest `‖H v − E₀ v‖` over the basis.
    pub fn max_residual(&self, h: &OperatorSum) -> f64 {
        self.basis
            .iter()
            .map(|v| norm(&(h.apply(v) - v * C64::new(self.e0, 0.0))))
            .fold(0.0, f64::max)
    }

    /// Projector onto the ground space.
    pub fn projector(&self) -> CMatrix {
        projector(&self.basis)
    }
}

pub fn projector(basis: &[CVector]) -> CMatrix {
    let dim = basis.first().map_or(0, |v| v.len());
    let mut p = CMatrix::zeros(dim, dim);
    for v in basis {
        p += v * v.adjoint();
    }
    p
}

pub fn ground_space(h: &OperatorSum, rel_tol: f64) -> Result<GroundSpace> {
    GroundSpace::from_eigen(&spectrum(h)?, rel_tol)
}

pub fn ground_space_of_matrix(m: &CMatrix, rel_tol: f64) -> Result<GroundSpace> {
    GroundSpace::from_eigen(&eig_hermitian(m)?, rel_tol)
}

/// One block of a parity decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector {
    /// Bit `i` is 1 when parity operator `i` has eigenvalue −1.
    pub label: Vec<u8>,
    pub min_energy: f64,
    pub dim: usize,
}

impl Sector {
    pub fn label_string(&self) -> String {
        self.label.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

/// Splits the computational basis by the eigenvalues of diagonal parity
/// operators and solves each block. Sectors are ordered by label.
pub fn sector_split(h: &OperatorSum, parity_ops: &[PauliTerm]) -> Result<Vec<Sector>> {
    for p in parity_ops {
        if !p.is_diagonal() {
            return Err(Error::NotDiagonal(p.to_string()));
        }
        if !h.terms().iter().all(|t| t.commutes(p)) {
            return Err(Error::NonCommuting(p.to_string()));
        }
    }
    let n = h.n_sites();
    let dim = 1usize << n;
    let masks: Vec<usize> = parity_ops
        .iter()
        .map(|p| p.support().iter().map(|&s| 1usize << (n - 1 - s)).sum())
        .collect();
    let n_sectors = 1usize << parity_ops.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_sectors];
    for b in 0..dim {
        let label = masks.iter().enumerate().fold(0usize, |acc, (i, &m)| {
            acc | ((((b & m).count_ones() & 1) as usize) << i)
        });
        members[label].push(b);
    }
    let full = h.to_matrix()?;
    members
        .par_iter()
        .enumerate()
        .filter(|(_, idx)| !idx.is_empty())
        .map(|(label, idx)| {
            let block = CMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])]);
            let eig = eig_hermitian(&block)?;
            Ok(Sector {
                label: (0..parity_ops.len())
                    .map(|i| ((label >> i) & 1) as u8)
                    .collect(),
                min_energy: eig.values[0],
                dim: idx.len(),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(|mut v| {
            v.sort_by(|a, b| a.label.iter().rev().cmp(b.label.iter().rev()));
            v
        })
}

/// Even-parity 3-site columns `v₀ … v₃`, entries listed top row first.
pub const EVEN_COLUMNS: [[u8; 3]; 4] = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]];

/// Basis index of the 3×3 configuration whose column `c` is `EVEN_COLUMNS[cols[c]]`.
fn column_config(cols: [usize; 3]) -> usize {
    let mut b = 0usize;
    for (c, &v) in cols.iter().enumerate() {
        for (r, &bit) in EVEN_COLUMNS[v].iter().enumerate() {
            let site = 3 * r + c;
            b |= (bit as usize) << (8 - site);
        }
    }
    b
}

/// `|A₁⟩, |A₂⟩, |A₃⟩`: the symmetric combinations of even-column
/// configurations with all columns equal, exactly two equal, and all distinct.
pub fn build_paper_basis(n: usize) -> Result<[CVector; 3]> {
    if n != 3 {
        return Err(Error::InvalidParams(format!(
            "explicit ground-state basis exists for n = 3 only, got {n}"
        )));
    }
    let mut a = [
        CVector::zeros(512),
        CVector::zeros(512),
        CVector::zeros(512),
    ];
    let w = [0.5, 1.0 / 6.0, 1.0 / 24f64.sqrt()];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let class = match (i == j, j == k, i == k) {
                    (true, true, _) => 0,
                    (false, false, false) => 2,
                    _ => 1,
                };
                a[class][column_config([i, j, k])] += C64::new(w[class], 0.0);
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroundStateDecomposition {
    pub a: [C64; 3],
    pub residual: f64,
}

/// Coefficients `a_i = ⟨A_i|C₀⟩` with `a₁` made real and non-negative.
pub fn decompose_ground_state(c0: &CVector) -> Result<GroundStateDecomposition> {
    let basis = build_paper_basis(3)?;
    if c0.len() != 512 {
        return Err(Error::DimensionMismatch {
            expected: 512,
            actual: c0.len(),
        });
    }
    let mut a = [ZERO; 3];
    let mut rest = c0.clone();
    for (ai, bi) in a.iter_mut().zip(&basis) {
        *ai = inner(bi, c0);
        rest -= bi * *ai;
    }
    if let Some(z) = a.iter().find(|z| z.norm() > PHASE_EPS).copied() {
        let phase = z.conj() / z.norm();
        for ai in a.iter_mut() {
            *ai *= phase;
        }
    }
    Ok(GroundStateDecomposition {
        a,
        residual: norm(&rest),
    })
}

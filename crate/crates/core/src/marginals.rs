//! Partial traces and the marginal vector `{ρ_jk}`.
//!
//! Kept sites are ordered as given; the first kept site is the most
//! significant bit of the reduced matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_sites, eig_hermitian, local_index, matrix_from_pairs, matrix_pairs, site_pairs, trace,
    CMatrix, CVector, C64,
};

fn n_sites_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidParams(format!(
            "state dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Reshapes `state` into a `2^|keep| × 2^(N−|keep|)` matrix.
fn split(state: &CVector, keep: &[usize], n: usize) -> CMatrix {
    let shifts: Vec<usize> = keep.iter().map(|&s| n - 1 - s).collect();
    let rest_shifts: Vec<usize> = (0..n)
        .filter(|s| !keep.contains(s))
        .map(|s| n - 1 - s)
        .collect();
    let mut m = CMatrix::zeros(1 << keep.len(), 1 << rest_shifts.len());
    for (b, &amp) in state.iter().enumerate() {
        m[(local_index(b, &shifts), local_index(b, &rest_shifts))] = amp;
    }
    m
}

/// `Tr_complement |u⟩⟨v|`: linear in `u`, conjugate-linear in `v`.
pub fn cross_marginal(u: &CVector, v: &CVector, keep: &[usize]) -> Result<CMatrix> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let n = n_sites_of(u.len())?;
    check_sites(keep, n)?;
    let mu = split(u, keep, n);
    let mv = split(v, keep, n);
    Ok(&mu * mv.adjoint())
}

pub fn partial_trace(state: &CVector, keep: &[usize]) -> Result<CMatrix> {
    cross_marginal(state, state, keep)
}

/// All cross-marginals `σ^{pq}_S` of a basis on one site set.
pub fn cross_marginals(basis: &[CVector], keep: &[usize]) -> Result<Vec<Vec<CMatrix>>> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidParams("empty basis".into()))?;
    let n = n_sites_of(first.len())?;
    check_sites(keep, n)?;
    let parts: Vec<CMatrix> = basis
        .iter()
        .map(|v| {
            if v.len() != first.len() {
                Err(Error::DimensionMismatch {
                    expected: first.len(),
                    actual: v.len(),
                })
            } else {
                Ok(split(v, keep, n))
            }
        })
        .collect::<Result<_>>()?;
    Ok(parts
        .iter()
        .map(|a| parts.iter().map(|b| a * b.adjoint()).collect())
        .collect())
}

/// `Σ_pq c_p c_q* σ^{pq}`: marginal of `Σ c_p |C_p⟩`.
pub fn mixture_marginal(sigma: &[Vec<CMatrix>], c: &[C64]) -> CMatrix {
    let dim = sigma[0][0].nrows();
    let mut out = CMatrix::zeros(dim, dim);
    for (p, row) in sigma.iter().enumerate() {
        for (q, s) in row.iter().enumerate() {
            out += s * (c[p] * c[q].conj());
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CrossMarginal {
    pub p: usize,
    pub q: usize,
    pub sites: Vec<usize>,
    pub matrix: CMatrix,
}

/// `{ρ_jk}` over all pairs `j < k` in lexicographic order.
#[derive(Debug, Clone)]
pub struct MarginalVector {
    pub n_sites: usize,
    pub pairs: Vec<(usize, usize)>,
    pub rdms: Vec<CMatrix>,
}

impl MarginalVector {
    pub fn get(&self, j: usize, k: usize) -> Option<&CMatrix> {
        if j < k && k < self.n_sites {
            self.rdms.get(crate::linalg::pair_index(j, k, self.n_sites))
        } else {
            None
        }
    }

    /// Largest elementwise deviation from another marginal vector.
    pub fn max_deviation(&self, other: &MarginalVector) -> f64 {
        self.rdms
            .iter()
            .zip(&other.rdms)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Checks pair coverage, unit trace and positivity.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.pairs != site_pairs(self.n_sites) || self.rdms.len() != self.pairs.len() {
            return Err(Error::IncompleteMarginals(format!(
                "expected {} lexicographic pairs, got {}",
                site_pairs(self.n_sites).len(),
                self.rdms.len()
            )));
        }
        for (&(j, k), r) in self.pairs.iter().zip(&self.rdms) {
            if r.nrows() != 4 || r.ncols() != 4 {
                return Err(Error::DimensionMismatch {
                    expected: 4,
                    actual: r.nrows(),
                });
            }
            let t = trace(r);
            if (t - C64::new(1.0, 0.0)).norm() > tol {
                return Err(Error::IncompleteMarginals(format!(
                    "rho_({j},{k}) has trace {t}"
                )));
            }
            let eig = eig_hermitian(r)?;
            if eig.values[0] < -tol {
                return Err(Error::IncompleteMarginals(format!(
                    "rho_({j},{k}) has eigenvalue {}",
                    eig.values[0]
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> MarginalVectorJson {
        MarginalVectorJson {
            pairs: self.pairs.iter().map(|&(j, k)| [j, k]).collect(),
            rdms: self.rdms.iter().map(matrix_pairs).collect(),
        }
    }

    pub fn from_json(doc: &MarginalVectorJson) -> Result<Self> {
        let m = doc.pairs.len();
        // C(N,2) = m
        let n = (1..64).find(|&n| n * (n - 1) / 2 == m).ok_or_else(|| {
            Error::IncompleteMarginals(format!("{m} pairs is not C(N,2) for any N"))
        })?;
        let pairs: Vec<(usize, usize)> = doc.pairs.iter().map(|p| (p[0], p[1])).collect();
        if pairs != site_pairs(n) {
            return Err(Error::IncompleteMarginals("pairs not lexicographic".into()));
        }
        let rdms = doc
            .rdms
            .iter()
            .map(|r| matrix_from_pairs(4, r))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_sites: n,
            pairs,
            rdms,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginalVectorJson {
    pub pairs: Vec<[usize; 2]>,
    /// Each entry: 16 row-major `[re, im]` pairs.
    pub rdms: Vec<Vec<[f64; 2]>>,
}

/// All C(N,2) pair marginals of `state`.
pub fn marginal_vector(state: &CVector, n: usize) -> Result<MarginalVector> {
    if state.len() != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1usize << n,
            actual: state.len(),
        });
    }
    let pairs = site_pairs(n);
    let rdms = pairs
        .par_iter()
        .map(|&(j, k)| partial_trace(state, &[j, k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(MarginalVector {
        n_sites: n,
        pairs,
        rdms,
    })
}

/// Marginal vector of `Σ c_p |C_p⟩` assembled from basis cross-marginals.
pub fn mixture_marginal_vector(basis: &[CVector], c: &[C64]) -> Result<MarginalVector> {
    let n = n_sites_of(basis[0].len())?;
    let pairs = site_pairs(n);
    let rdms = pairs
        .par_iter()
        .map(|&(j, k)| cross_marginals(basis, &[j, k]).map(|s| mixture_marginal(&s, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MarginalVector {
        n_sites: n,
        pairs,
        rdms,
    })
}

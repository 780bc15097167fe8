//! Dense complex linear algebra shared by the solvers and certificates.
//!
//! Computational-basis convention throughout the crate: site 0 is the most
//! significant bit of a basis index, site `N - 1` the least significant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Maximum number of sites `to_matrix` will expand by default.
pub const DEFAULT_MAX_SITES: usize = 14;
/// Maximum matrix dimension handed to the dense eigensolver by default.
pub const DEFAULT_MAX_EIG_DIM: usize = 4096;
/// Overrides [`DEFAULT_MAX_EIG_DIM`] when set to a positive integer.
pub const MAX_DIM_ENV: &str = "QMARGINAL_MAX_DENSE_DIM";

const HERMITIAN_TOL: f64 = 1e-12;

pub fn max_eig_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_EIG_DIM)
}

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Dense Hermitian eigendecomposition, eigenvalues sorted ascending.
pub fn eig_hermitian(m: &CMatrix) -> Result<Eigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: m.ncols(),
        });
    }
    let limit = max_eig_dim();
    if n > limit {
        return Err(Error::DenseLimit {
            what: "eigensolver dimension",
            actual: n,
            limit,
        });
    }
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian(defect));
    }
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }

    let (raw_values, raw_vectors): (Vec<f64>, CMatrix) = if m.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        let eig = real.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let sym = CMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
        let eig = sym.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| raw_vectors[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `min_θ ‖u − e^{iθ} v‖`.
pub fn phase_distance(u: &CVector, v: &CVector) -> f64 {
    let d = norm(u).powi(2) + norm(v).powi(2) - 2.0 * inner(v, u).norm();
    d.max(0.0).sqrt()
}

/// Makes the first amplitude with modulus above `eps` real and positive.
pub fn fix_phase(v: &mut CVector, eps: f64) {
    if let Some(z) = v.iter().find(|z| z.norm() > eps).copied() {
        let phase = z.conj() / z.norm();
        for a in v.iter_mut() {
            *a *= phase;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All site pairs `(j, k)` with `j < k`, lexicographic.
pub fn site_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(binomial(n, 2));
    for j in 0..n {
        for k in j + 1..n {
            out.push((j, k));
        }
    }
    out
}

/// Position of `(j, k)`, `j < k`, in [`site_pairs`].
pub fn pair_index(j: usize, k: usize, n: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * n - j * (j + 1) / 2 + (k - j - 1)
}

/// Haar-random pure state of dimension `dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let mut v = CVector::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = norm(&v);
    v /= C64::new(n, 0.0);
    v
}

/// Haar-random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = random_state(dim, rng);
        for c in &cols {
            let overlap = inner(c, &v);
            v -= c * overlap;
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v / C64::new(n, 0.0));
        }
    }
    CMatrix::from_columns(&cols)
}

/// Embeds an operator on the ordered `sites` into the full `n_sites` space.
/// The first listed site is the most significant bit of `local`.
pub fn embed(local: &CMatrix, sites: &[usize], n_sites: usize) -> Result<CMatrix> {
    let k = sites.len();
    let ldim = 1usize << k;
    if local.nrows() != ldim || local.ncols() != ldim {
        return Err(Error::DimensionMismatch {
            expected: ldim,
            actual: local.nrows(),
        });
    }
    check_sites(sites, n_sites)?;
    let dim = 1usize << n_sites;
    let shifts: Vec<usize> = sites.iter().map(|&s| n_sites - 1 - s).collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let a = local_index(col, &shifts);
        let rest = col & !mask;
        for a_out in 0..ldim {
            let z = local[(a_out, a)];
            if z == ZERO {
                continue;
            }
            let row = rest | scatter(a_out, &shifts);
            out[(row, col)] += z;
        }
    }
    Ok(out)
}

pub(crate) fn check_sites(sites: &[usize], n_sites: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::BadSites("empty site set".into()));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s >= n_sites {
            return Err(Error::BadSites(format!("site {s} >= {n_sites}")));
        }
        if sites[..i].contains(&s) {
            return Err(Error::BadSites(format!("site {s} repeated")));
        }
    }
    Ok(())
}

/// Gathers the bits at `shifts` (first = most significant) into a local index.
#[inline]
pub(crate) fn local_index(basis: usize, shifts: &[usize]) -> usize {
    shifts
        .iter()
        .fold(0usize, |acc, &s| (acc << 1) | ((basis >> s) & 1))
}

#[inline]
pub(crate) fn scatter(local: usize, shifts: &[usize]) -> usize {
    let k = shifts.len();
    shifts
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &s)| acc | (((local >> (k - 1 - i)) & 1) << s))
}

/// `[re, im]` pair used by every JSON format in the crate.
pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vector_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| pair(z)).collect()
}

/// Row-major `[re, im]` pairs.
pub fn matrix_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(pair(m[(r, c)]));
        }
    }
    out
}

pub fn matrix_from_pairs(dim: usize, entries: &[[f64; 2]]) -> Result<CMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            actual: entries.len(),
        });
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| from_pair(entries[r * dim + c])))
}

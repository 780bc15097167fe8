//! Spin-lattice to fermion correspondence.
//!
//! Site `j` of the lattice becomes a spatial orbital carrying two modes,
//! `(j, ↑)` and `(j, ↓)`, with mode index `2j + s` where `s = 0` is spin up
//! (lattice `|0⟩`). An occupation bit-vector `occ` (bit `m` = mode `m`)
//! denotes `a†_{m₁} a†_{m₂} ⋯ a†_{m_k} |Ω⟩` with `m₁ < m₂ < ⋯ < m_k`.
//!
//! 2-RDMs are normalized to unit trace. The quantum-chemistry convention
//! `Γ = ⟨a†a†aa⟩` has trace `N(N−1)/2` on the pair basis, i.e. it is
//! `C(N,2)` times the matrices produced here.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{binomial, matrix_pairs, pair_index, site_pairs, trace, CMatrix, CVector, C64, ONE, ZERO};
use crate::marginals::{marginal_vector, MarginalVector};
use crate::pauli::OperatorSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FermionMode {
    pub site: usize,
    pub spin: Spin,
}

impl FermionMode {
    pub fn new(site: usize, spin: Spin) -> Self {
        Self { site, spin }
    }

    pub fn index(self) -> usize {
        2 * self.site + matches!(self.spin, Spin::Down) as usize
    }

    pub fn from_index(m: usize) -> Self {
        Self {
            site: m / 2,
            spin: if m.is_multiple_of(2) { Spin::Up } else { Spin::Down },
        }
    }
}

/// Number of occupied modes below `m`.
#[inline]
fn below(occ: u64, m: usize) -> u32 {
    (occ & ((1u64 << m) - 1)).count_ones()
}

#[inline]
fn parity_sign(count: u32) -> f64 {
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sparse amplitude map over occupation bit-vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_modes: usize,
    pub amps: BTreeMap<u64, C64>,
}

impl FockState {
    pub fn vacuum(n_modes: usize) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(0, ONE);
        Self { n_modes, amps }
    }

    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            amps: BTreeMap::new(),
        }
    }

    pub fn determinant(n_modes: usize, modes: &[usize]) -> Self {
        let mut s = Self::vacuum(n_modes);
        for &m in modes.iter().rev() {
            s = s.create(m);
        }
        s
    }

    pub fn create(&self, m: usize) -> Self {
        assert!(m < self.n_modes, "mode {m} out of range");
        let mut out = Self::zero(self.n_modes);
        for (&occ, &a) in &self.amps {
            if occ & (1 << m) == 0 {
                *out.amps.entry(occ | (1 << m)).or_insert(ZERO) += a * parity_sign(below(occ, m));
            }
        }
        out
    }

    pub fn annihilate(&self, m: usize) -> Self {
        assert!(m < self.n_modes, "mode {m} out of range");
        let mut out = Self::zero(self.n_modes);
        for (&occ, &a) in &self.amps {
            if occ & (1 << m) != 0 {
                *out.amps.entry(occ & !(1 << m)).or_insert(ZERO) += a * parity_sign(below(occ, m));
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &FockState, c: C64) {
        for (&occ, &a) in &other.amps {
            *self.amps.entry(occ).or_insert(ZERO) += a * c;
        }
    }

    pub fn inner(&self, other: &FockState) -> C64 {
        self.amps
            .iter()
            .filter_map(|(occ, a)| other.amps.get(occ).map(|b| a.conj() * b))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Particle number, if every nonzero amplitude agrees on it.
    pub fn particle_number(&self) -> Option<usize> {
        let mut counts = self
            .amps
            .iter()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(occ, _)| occ.count_ones() as usize);
        let first = counts.next()?;
        counts.all(|c| c == first).then_some(first)
    }

    pub fn max_distance(&self, other: &FockState) -> f64 {
        let mut d = 0.0f64;
        for (occ, a) in &self.amps {
            d = d.max((a - other.amps.get(occ).copied().unwrap_or(ZERO)).norm());
        }
        for (occ, b) in &other.amps {
            if !self.amps.contains_key(occ) {
                d = d.max(b.norm());
            }
        }
        d
    }

    /// Mode 0 leftmost.
    pub fn bitstring(&self, occ: u64) -> String {
        (0..self.n_modes)
            .map(|m| if occ & (1 << m) != 0 { '1' } else { '0' })
            .collect()
    }

    /// `{"occupation bitstring": [re, im]}`.
    pub fn to_json(&self) -> BTreeMap<String, [f64; 2]> {
        self.amps
            .iter()
            .map(|(&occ, &a)| (self.bitstring(occ), [a.re, a.im]))
            .collect()
    }

    pub fn to_dense(&self) -> CVector {
        let mut v = CVector::zeros(1 << self.n_modes);
        for (&occ, &a) in &self.amps {
            v[occ as usize] = a;
        }
        v
    }

    pub fn from_dense(n_modes: usize, v: &CVector) -> Self {
        let amps = v
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(i, &a)| (i as u64, a))
            .collect();
        Self { n_modes, amps }
    }
}

fn check_modes(n_sites: usize) -> Result<()> {
    if 2 * n_sites > 63 {
        return Err(Error::DenseLimit {
            what: "fermion modes",
            actual: 2 * n_sites,
            limit: 63,
        });
    }
    Ok(())
}

fn site_bit(b: usize, j: usize, n_sites: usize) -> usize {
    (b >> (n_sites - 1 - j)) & 1
}

/// Occupation vector of the Slater determinant for lattice basis state `b`.
pub fn lattice_occupation(b: usize, n_sites: usize) -> u64 {
    (0..n_sites).fold(0u64, |occ, j| occ | 1 << (2 * j + site_bit(b, j, n_sites)))
}

/// `V: |s₁ … s_N⟩ ↦ a†_{1,s₁} ⋯ a†_{N,s_N} |Ω⟩`, extended linearly.
/// Creation operators are already in increasing mode order, so no signs arise.
pub fn map_state(latt: &CVector, n_sites: usize) -> Result<FockState> {
    check_modes(n_sites)?;
    if latt.len() != 1 << n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_sites,
            actual: latt.len(),
        });
    }
    let amps = latt
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != ZERO)
        .map(|(b, &a)| (lattice_occupation(b, n_sites), a))
        .collect();
    Ok(FockState {
        n_modes: 2 * n_sites,
        amps,
    })
}

/// Lattice basis index of a singly-occupied configuration.
pub fn singly_occupied_index(occ: u64, n_sites: usize) -> Option<usize> {
    let mut b = 0usize;
    for j in 0..n_sites {
        match (occ >> (2 * j)) & 0b11 {
            0b01 => b <<= 1,
            0b10 => b = (b << 1) | 1,
            _ => return None,
        }
    }
    Some(b)
}

/// `V†`: projects onto the singly-occupied sector and returns lattice amplitudes.
pub fn unmap_state(f: &FockState, n_sites: usize) -> Result<CVector> {
    if f.n_modes != 2 * n_sites {
        return Err(Error::DimensionMismatch {
            expected: 2 * n_sites,
            actual: f.n_modes,
        });
    }
    let mut v = CVector::zeros(1 << n_sites);
    for (&occ, &a) in &f.amps {
        if let Some(b) = singly_occupied_index(occ, n_sites) {
            v[b] += a;
        }
    }
    Ok(v)
}

/// `V` as a dense `2^{2N} × 2^N` matrix over the full Fock space.
pub fn isometry_matrix(n_sites: usize) -> Result<CMatrix> {
    if 2 * n_sites > 12 {
        return Err(Error::DenseLimit {
            what: "Fock modes for dense isometry",
            actual: 2 * n_sites,
            limit: 12,
        });
    }
    let mut v = CMatrix::zeros(1 << (2 * n_sites), 1 << n_sites);
    for b in 0..1usize << n_sites {
        v[(lattice_occupation(b, n_sites) as usize, b)] = ONE;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// Sum of coefficient × product of ladder operators. Within a monomial the
/// last operator acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    pub n_modes: usize,
    pub terms: Vec<(C64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coeff: C64, ops: Vec<Ladder>) {
        assert!(ops.iter().all(|l| l.mode < self.n_modes));
        self.terms.push((coeff, ops));
    }

    pub fn add(&self, other: &FermionOperator) -> Self {
        assert_eq!(self.n_modes, other.n_modes);
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    /// `n_j = n_{j↑} + n_{j↓}`.
    pub fn site_number(n_modes: usize, site: usize) -> Self {
        let mut op = Self::zero(n_modes);
        for m in [2 * site, 2 * site + 1] {
            op.push(ONE, vec![Ladder::create(m), Ladder::annihilate(m)]);
        }
        op
    }

    pub fn apply(&self, f: &FockState) -> FockState {
        let mut out = FockState::zero(self.n_modes);
        for (c, ops) in &self.terms {
            let mut s = f.clone();
            for l in ops.iter().rev() {
                s = if l.dagger {
                    s.create(l.mode)
                } else {
                    s.annihilate(l.mode)
                };
                if s.amps.is_empty() {
                    break;
                }
            }
            out.add_scaled(&s, *c);
        }
        out
    }

    /// Applies the operator to a single occupation basis state.
    fn apply_basis(&self, occ: u64) -> Vec<(u64, C64)> {
        let mut out = Vec::new();
        'terms: for (c, ops) in &self.terms {
            let mut cur = occ;
            let mut amp = *c;
            for l in ops.iter().rev() {
                let bit = 1u64 << l.mode;
                if l.dagger == (cur & bit != 0) {
                    continue 'terms;
                }
                amp *= parity_sign(below(cur, l.mode));
                cur ^= bit;
            }
            out.push((cur, amp));
        }
        out
    }

    /// Matrix over the full Fock space, basis index = occupation bits.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.n_modes > 12 {
            return Err(Error::DenseLimit {
                what: "Fock modes",
                actual: self.n_modes,
                limit: 12,
            });
        }
        let dim = 1usize << self.n_modes;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            for (row, a) in self.apply_basis(col as u64) {
                m[(row as usize, col)] += a;
            }
        }
        Ok(m)
    }
}

/// `W_j = Σ w_st |s⟩⟨t| ↦ Σ w_st a†_{j,s} a_{j,t}`, applied factor by factor.
pub fn map_operator(op: &OperatorSum) -> Result<FermionOperator> {
    let n = op.n_sites();
    check_modes(n)?;
    let mut out = FermionOperator::zero(2 * n);
    for t in op.terms() {
        let mut monomials: Vec<(C64, Vec<Ladder>)> = vec![(t.coeff, Vec::new())];
        for (&site, &p) in t.letters() {
            let w = p.matrix();
            let mut next = Vec::with_capacity(monomials.len() * 2);
            for (c, ops) in &monomials {
                for (s, row) in w.iter().enumerate() {
                    for (tt, &wst) in row.iter().enumerate() {
                        if wst == ZERO {
                            continue;
                        }
                        let mut o = ops.clone();
                        o.push(Ladder::create(2 * site + s));
                        o.push(Ladder::annihilate(2 * site + tt));
                        next.push((c * wst, o));
                    }
                }
            }
            monomials = next;
        }
        for (c, ops) in monomials {
            out.push(c, ops);
        }
    }
    Ok(out)
}

/// `Σ_j U_j (n_j − 1)² = Σ_j U_j (1 − n_{j↑} − n_{j↓} + 2 n_{j↑} n_{j↓})`.
pub fn build_penalty(u: &[f64]) -> Result<FermionOperator> {
    if let Some(bad) = u.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParams(format!(
            "penalty strengths must be positive, got {bad}"
        )));
    }
    check_modes(u.len())?;
    let mut op = FermionOperator::zero(2 * u.len());
    for (j, &uj) in u.iter().enumerate() {
        let (up, down) = (2 * j, 2 * j + 1);
        let c = C64::new(uj, 0.0);
        op.push(c, vec![]);
        op.push(-c, vec![Ladder::create(up), Ladder::annihilate(up)]);
        op.push(-c, vec![Ladder::create(down), Ladder::annihilate(down)]);
        op.push(
            c * 2.0,
            vec![
                Ladder::create(up),
                Ladder::annihilate(up),
                Ladder::create(down),
                Ladder::annihilate(down),
            ],
        );
    }
    Ok(op)
}

/// Default uniform penalty strength `10 · Σ|coefficients|`.
pub fn default_penalty_strength(latt: &OperatorSum) -> f64 {
    10.0 * latt.one_norm()
}

/// `map_operator(H) + Σ_j U_j (n_j − 1)²`, uniform `U` by default.
pub fn exposing_hamiltonian(latt: &OperatorSum, u: Option<&[f64]>) -> Result<FermionOperator> {
    let default;
    let u = match u {
        Some(u) => u,
        None => {
            default = vec![default_penalty_strength(latt); latt.n_sites()];
            &default
        }
    };
    if u.len() != latt.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: latt.n_sites(),
            actual: u.len(),
        });
    }
    Ok(map_operator(latt)?.add(&build_penalty(u)?))
}

/// Unit-trace fermionic 2-RDM indexed by ordered mode pairs `(P, Q)`, `P < Q`.
#[derive(Debug, Clone)]
pub struct Fermionic2RDM {
    pub n_modes: usize,
    pub pairs: Vec<(usize, usize)>,
    pub matrix: CMatrix,
}

impl Fermionic2RDM {
    pub fn max_deviation(&self, other: &Fermionic2RDM) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Fermionic2RDM) -> f64 {
        crate::linalg::frobenius(&(&self.matrix - &other.matrix))
    }

    pub fn to_json(&self) -> Fermionic2RdmJson {
        Fermionic2RdmJson {
            n_modes: self.n_modes,
            mode_pairs: self.pairs.iter().map(|&(p, q)| [p, q]).collect(),
            dim: self.matrix.nrows(),
            matrix: matrix_pairs(&self.matrix),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fermionic2RdmJson {
    pub n_modes: usize,
    pub mode_pairs: Vec<[usize; 2]>,
    pub dim: usize,
    /// Row-major `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

/// `Γ[(P,Q),(R,S)] = ⟨f| a†_R a†_S a_Q a_P |f⟩ / (C(n,2) ⟨f|f⟩)`.
pub fn fermionic_2rdm(f: &FockState) -> Result<Fermionic2RDM> {
    let n = match f.particle_number() {
        Some(n) => n,
        None if f.amps.values().all(|a| a.norm() == 0.0) => 0,
        None => return Err(Error::MixedParticleNumber),
    };
    if n < 2 {
        return Err(Error::ParticleNumber(n));
    }
    let modes = f.n_modes;
    let pairs = site_pairs(modes);
    // residual occupation -> entries (pair index, <residual| a_Q a_P |f>)
    let mut columns: BTreeMap<u64, Vec<(usize, C64)>> = BTreeMap::new();
    for (&occ, &a) in &f.amps {
        if a == ZERO {
            continue;
        }
        for p in 0..modes {
            if occ & (1 << p) == 0 {
                continue;
            }
            let after_p = occ & !(1 << p);
            let sign_p = parity_sign(below(occ, p));
            for q in p + 1..modes {
                if after_p & (1 << q) == 0 {
                    continue;
                }
                let rest = after_p & !(1 << q);
                let sign = sign_p * parity_sign(below(after_p, q));
                columns
                    .entry(rest)
                    .or_default()
                    .push((pair_index(p, q, modes), a * sign));
            }
        }
    }
    let dim = pairs.len();
    let norm_sqr = f.norm().powi(2);
    let scale = 1.0 / (binomial(n, 2) as f64 * norm_sqr);
    let mut g = CMatrix::zeros(dim, dim);
    for entries in columns.values() {
        for &(i, x) in entries {
            for &(j, y) in entries {
                g[(i, j)] += x * y.conj() * scale;
            }
        }
    }
    Ok(Fermionic2RDM {
        n_modes: modes,
        pairs,
        matrix: g,
    })
}

/// `C(N,2)⁻¹ Σ_{j<k} V_jk ρ_jk V_jk†`.
pub fn assemble_2rdm(mv: &MarginalVector) -> Result<Fermionic2RDM> {
    let n = mv.n_sites;
    if mv.pairs != site_pairs(n) || mv.rdms.len() != mv.pairs.len() {
        return Err(Error::IncompleteMarginals(format!(
            "need all {} pairs for {} sites, got {}",
            binomial(n, 2),
            n,
            mv.rdms.len()
        )));
    }
    check_modes(n)?;
    let modes = 2 * n;
    let pairs = site_pairs(modes);
    let scale = 1.0 / binomial(n, 2) as f64;
    let blocks: Vec<Vec<(usize, usize, C64)>> = mv
        .pairs
        .par_iter()
        .zip(&mv.rdms)
        .map(|(&(j, k), rho)| {
            let idx = |a: usize| pair_index(2 * j + (a >> 1), 2 * k + (a & 1), modes);
            let mut out = Vec::with_capacity(16);
            for a in 0..4 {
                for b in 0..4 {
                    out.push((idx(a), idx(b), rho[(a, b)] * scale));
                }
            }
            out
        })
        .collect();
    let mut g = CMatrix::zeros(pairs.len(), pairs.len());
    for block in blocks {
        for (r, c, z) in block {
            g[(r, c)] += z;
        }
    }
    Ok(Fermionic2RDM {
        n_modes: modes,
        pairs,
        matrix: g,
    })
}

/// `ρ_jk ∝ V_jk† ρ⁻ V_jk`, renormalized to unit trace (the block itself
/// carries weight `C(N,2)⁻¹`).
pub fn recover_marginals(rdm: &Fermionic2RDM) -> Result<MarginalVector> {
    let modes = rdm.n_modes;
    let n = modes / 2;
    let pairs = site_pairs(n);
    let mut rdms = Vec::with_capacity(pairs.len());
    for &(j, k) in &pairs {
        let idx = |a: usize| pair_index(2 * j + (a >> 1), 2 * k + (a & 1), modes);
        let block = CMatrix::from_fn(4, 4, |a, b| rdm.matrix[(idx(a), idx(b))]);
        let t = trace(&block);
        if t.norm() < 1e-300 {
            return Err(Error::IncompleteMarginals(format!(
                "block ({j},{k}) has zero trace"
            )));
        }
        rdms.push(block / t);
    }
    Ok(MarginalVector {
        n_sites: n,
        pairs,
        rdms,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramReport {
    pub n_sites: usize,
    /// Largest elementwise difference between map-then-reduce and
    /// reduce-then-assemble.
    pub max_deviation: f64,
    pub trace_direct: f64,
    pub trace_assembled: f64,
}

/// Computes `ρ⁻₁₂` along both paths of the commutative diagram.
pub fn verify_diagram(latt: &CVector, n_sites: usize) -> Result<DiagramReport> {
    let direct = fermionic_2rdm(&map_state(latt, n_sites)?)?;
    let assembled = assemble_2rdm(&marginal_vector(latt, n_sites)?)?;
    Ok(DiagramReport {
        n_sites,
        max_deviation: direct.max_deviation(&assembled),
        trace_direct: trace(&direct.matrix).re,
        trace_assembled: trace(&assembled.matrix).re,
    })
}

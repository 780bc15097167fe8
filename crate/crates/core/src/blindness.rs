//! m-blindness certificates, Knill-Laflamme checks and the exposed
//! extreme-point verdict.
//!
//! A ground space is m-blind when `⟨C_p|B|C_q⟩ = δ_pq b` for every operator
//! `B` supported on at most m sites. By linearity this holds iff, for every
//! m-site set `S`, the cross-marginals `σ^{pq}_S = Tr_{S̄}|C_p⟩⟨C_q|` vanish
//! for `p ≠ q` and coincide for `p = q`. Checking it that way costs one
//! contraction per (subset, basis pair) instead of one per operator.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ReducedHamiltonianVector;
use crate::linalg::{combinations, frobenius, inner, matrix_pairs, trace, CMatrix, CVector, C64};
use crate::marginals::{cross_marginals, MarginalVector};
use crate::pauli::{all_of_weight, OperatorSum, PauliTerm};
use crate::spectral::{ground_space, GroundSpace, DEFAULT_DEGENERACY_TOL};

/// Absolute Frobenius tolerance for blindness and KL checks.
pub const DEFAULT_BLINDNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DenseMarginals,
    StabilizerEnumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationKind {
    /// `σ^{pp} ≠ σ^{qq}`: the states are told apart.
    Diagonal,
    /// `σ^{pq} ≠ 0`: some m-body operator connects them.
    OffDiagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    Marginal {
        sites: Vec<usize>,
        p: usize,
        q: usize,
        kind: DeviationKind,
        norm: f64,
    },
    /// A logical Pauli (commutes with the stabilizer, not in it).
    Logical { pauli: String, weight: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct BlindnessCertificate {
    pub m: usize,
    pub passed: bool,
    pub method: Method,
    /// Worst `‖σ^{pp} − σ^{qq}‖_F`. Not computed by stabilizer enumeration.
    pub max_diagonal_deviation: Option<f64>,
    /// Worst `‖σ^{pq}‖_F`, `p ≠ q`. Not computed by stabilizer enumeration.
    pub max_offdiagonal_norm: Option<f64>,
    /// Off-diagonal witness when one exceeds the tolerance, otherwise the
    /// diagonal one.
    pub witness: Option<Witness>,
    pub diagonal_witness: Option<Witness>,
    pub tolerance: f64,
    /// Number of (subset, basis pair) blocks or Pauli operators examined.
    pub checked: u64,
}

struct Worst {
    value: f64,
    sites: usize,
    p: usize,
    q: usize,
}

impl Worst {
    fn none() -> Self {
        Self {
            value: 0.0,
            sites: usize::MAX,
            p: 0,
            q: 0,
        }
    }

    fn offer(&mut self, value: f64, sites: usize, p: usize, q: usize) {
        if value > self.value || self.sites == usize::MAX {
            *self = Worst { value, sites, p, q };
        }
    }
}

/// Checks `⟨C_p|B|C_q⟩ = δ_pq b` for all B supported on `m` sites.
pub fn certify_blindness(gs: &GroundSpace, m: usize, tol: f64) -> Result<BlindnessCertificate> {
    let k = gs.degeneracy();
    let n = gs.dim().trailing_zeros() as usize;
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if m > n {
        return Err(Error::SubsetTooLarge { m, n });
    }
    let subsets = combinations(n, m);
    let per_subset: Vec<(Worst, Worst)> = subsets
        .par_iter()
        .enumerate()
        .map(|(si, sites)| {
            let sigma = cross_marginals(&gs.basis, sites)?;
            let mut diag = Worst::none();
            let mut off = Worst::none();
            for p in 0..k {
                for q in 0..k {
                    if p != q {
                        off.offer(frobenius(&sigma[p][q]), si, p, q);
                    }
                    if p < q {
                        diag.offer(frobenius(&(&sigma[p][p] - &sigma[q][q])), si, p, q);
                    }
                }
            }
            Ok((diag, off))
        })
        .collect::<Result<_>>()?;

    let mut diag = Worst::none();
    let mut off = Worst::none();
    for (d, o) in per_subset {
        if d.sites != usize::MAX {
            diag.offer(d.value, d.sites, d.p, d.q);
        }
        if o.sites != usize::MAX {
            off.offer(o.value, o.sites, o.p, o.q);
        }
    }
    let to_witness = |w: &Worst, kind| Witness::Marginal {
        sites: subsets[w.sites].clone(),
        p: w.p,
        q: w.q,
        kind,
        norm: w.value,
    };
    let diag_fail = diag.sites != usize::MAX && diag.value > tol;
    let off_fail = off.sites != usize::MAX && off.value > tol;
    let diagonal_witness = diag_fail.then(|| to_witness(&diag, DeviationKind::Diagonal));
    let witness = if off_fail {
        Some(to_witness(&off, DeviationKind::OffDiagonal))
    } else {
        diagonal_witness.clone()
    };
    Ok(BlindnessCertificate {
        m,
        passed: !diag_fail && !off_fail,
        method: Method::DenseMarginals,
        max_diagonal_deviation: Some(diag.value),
        max_offdiagonal_norm: Some(off.value),
        witness,
        diagonal_witness,
        tolerance: tol,
        checked: (subsets.len() * k * k) as u64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KLReport {
    pub errors: Vec<String>,
    /// True when the identity was prepended to the supplied error set.
    pub identity_added: bool,
    /// `Q_{ℓm}` as row-major `[re, im]` pairs.
    #[serde(serialize_with = "serialize_q")]
    pub q: CMatrix,
    pub passed: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
}

fn serialize_q<S: serde::Serializer>(q: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    matrix_pairs(q).serialize(s)
}

fn is_identity(op: &OperatorSum) -> bool {
    let c = op.canonical();
    c.len() == 1 && c.terms()[0].weight() == 0
}

/// Evaluates `⟨C_p|E_ℓ† E_m|C_q⟩ = δ_pq Q_{ℓm}`.
///
/// The no-error case belongs to every correctable set, so the identity is
/// prepended when no supplied error is proportional to it.
pub fn check_knill_laflamme(codewords: &[CVector], errors: &[OperatorSum], tol: f64) -> Result<KLReport> {
    let first = codewords
        .first()
        .ok_or_else(|| Error::InvalidParams("no codewords".into()))?;
    let n = first.len().trailing_zeros() as usize;
    let mut errs: Vec<OperatorSum> = Vec::with_capacity(errors.len() + 1);
    let identity_added = !errors.iter().any(is_identity);
    if identity_added {
        errs.push(PauliTerm::identity(n, C64::new(1.0, 0.0)).to_operator());
    }
    for e in errors {
        if e.n_sites() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: e.n_sites(),
            });
        }
        errs.push(e.clone());
    }
    let k = codewords.len();
    let images: Vec<Vec<CVector>> = errs
        .iter()
        .map(|e| codewords.iter().map(|c| e.apply(c)).collect())
        .collect();
    let ne = errs.len();
    let rows: Vec<(Vec<C64>, f64)> = (0..ne)
        .into_par_iter()
        .map(|l| {
            let mut q_row = Vec::with_capacity(ne);
            let mut worst = 0.0f64;
            for m in 0..ne {
                let g = CMatrix::from_fn(k, k, |p, q| inner(&images[l][p], &images[m][q]));
                let mean = (0..k).map(|p| g[(p, p)]).sum::<C64>() / C64::new(k as f64, 0.0);
                for p in 0..k {
                    for q in 0..k {
                        let v = if p == q {
                            (0..k).map(|r| (g[(p, p)] - g[(r, r)]).norm()).fold(0.0, f64::max)
                        } else {
                            g[(p, q)].norm()
                        };
                        worst = worst.max(v);
                    }
                }
                q_row.push(mean);
            }
            (q_row, worst)
        })
        .collect();
    let q = CMatrix::from_fn(ne, ne, |l, m| rows[l].0[m]);
    let worst_violation = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(KLReport {
        errors: errs.iter().map(|e| e.canonical().to_string()).collect(),
        identity_added,
        q,
        passed: worst_violation <= tol,
        worst_violation,
        tolerance: tol,
    })
}

/// `{I}` plus every Pauli of weight 1..=`w` on `n` sites.
pub fn errors_up_to_weight(n: usize, w: usize) -> Vec<OperatorSum> {
    (0..=w)
        .flat_map(|k| all_of_weight(n, k))
        .map(|t| t.to_operator())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    ExtremeMultiplePreimages,
    ExtremeUniquePreimage,
    NotCertified,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremePointCertificate {
    pub e0: f64,
    pub degeneracy: usize,
    pub gap: f64,
    pub blindness: BlindnessCertificate,
    pub conclusion: Conclusion,
}

impl ExtremePointCertificate {
    pub fn from_parts(gs: &GroundSpace, blindness: BlindnessCertificate) -> Self {
        let strict_gap = gs.gap > blindness.tolerance;
        let conclusion = match gs.degeneracy() {
            1 if strict_gap => Conclusion::ExtremeUniquePreimage,
            d if d >= 2 && strict_gap && blindness.passed => Conclusion::ExtremeMultiplePreimages,
            _ => Conclusion::NotCertified,
        };
        Self {
            e0: gs.e0,
            degeneracy: gs.degeneracy(),
            gap: gs.gap,
            blindness,
            conclusion,
        }
    }

    /// Flat certificate record.
    pub fn to_json(&self, model: &str) -> CertificateJson {
        CertificateJson {
            model: model.to_string(),
            m: self.blindness.m,
            passed: self.blindness.passed,
            max_diag_dev: self.blindness.max_diagonal_deviation,
            max_offdiag: self.blindness.max_offdiagonal_norm,
            witness: self.blindness.witness.clone(),
            degeneracy: self.degeneracy,
            gap: finite_or_none(self.gap),
            e0: self.e0,
            tolerance: self.blindness.tolerance,
            conclusion: self.conclusion,
        }
    }
}

pub(crate) fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub model: String,
    pub m: usize,
    pub passed: bool,
    pub max_diag_dev: Option<f64>,
    pub max_offdiag: Option<f64>,
    pub witness: Option<Witness>,
    pub degeneracy: usize,
    pub gap: Option<f64>,
    pub e0: f64,
    pub tolerance: f64,
    pub conclusion: Conclusion,
}

/// Solves for the ground space of `h` and decides whether its marginals are
/// an exposed extreme point with several pure pre-images.
pub fn certify_exposed_extreme(h: &OperatorSum, m: usize, tol: f64) -> Result<ExtremePointCertificate> {
    let gs = ground_space(h, DEFAULT_DEGENERACY_TOL)?;
    let blindness = certify_blindness(&gs, m, tol)?;
    Ok(ExtremePointCertificate::from_parts(&gs, blindness))
}

/// `Σ_{j<k} Tr(Ĥ_jk ρ_jk)`; non-negative on consistent marginals and zero
/// exactly on ground-state marginals.
pub fn verify_witness_duality(rh: &ReducedHamiltonianVector, mv: &MarginalVector) -> Result<f64> {
    if rh.n_sites != mv.n_sites || rh.pairs != mv.pairs {
        return Err(Error::DimensionMismatch {
            expected: rh.pairs.len(),
            actual: mv.pairs.len(),
        });
    }
    Ok(rh
        .entries
        .iter()
        .zip(&mv.rdms)
        .map(|(h, rho)| trace(&(h * rho)).re)
        .sum())
}

//! Hamiltonian and operator builders: the quantum compass model, Kitaev's
//! toric code, their parity/logical operators and the reduced (witness)
//! Hamiltonian of a 2-body operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    binomial, hermitian_defect, matrix_from_pairs, pair_index, site_pairs, trace, CMatrix,
    CVector, C64, ONE, ZERO,
};
use crate::pauli::{OperatorSum, Pauli, PauliTerm, SiteIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Cyclic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" | "periodic" => Ok(Boundary::Cyclic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::InvalidParams(format!("unknown boundary {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompassParams {
    pub n: usize,
    pub jx: f64,
    pub jz: f64,
    pub boundary: Boundary,
}

impl CompassParams {
    pub fn new(n: usize, jx: f64, jz: f64, boundary: Boundary) -> Self {
        Self {
            n,
            jx,
            jz,
            boundary,
        }
    }

    /// The 3×3 cyclic lattice with unit couplings.
    pub fn bacon_shor_3x3() -> Self {
        Self::new(3, 1.0, 1.0, Boundary::Cyclic)
    }

    pub fn n_sites(&self) -> usize {
        self.n * self.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "lattice side {} < 2",
                self.n
            )));
        }
        if !(self.jx > 0.0 && self.jz > 0.0) || !self.jx.is_finite() || !self.jz.is_finite() {
            return Err(Error::InvalidParams(format!(
                "couplings must be positive, got jx={} jz={}",
                self.jx, self.jz
            )));
        }
        // mod-2 wraparound would double every bond
        if self.boundary == Boundary::Cyclic && self.n < 3 {
            return Err(Error::InvalidParams(
                "cyclic boundary needs n >= 3; use open boundary for n = 2".into(),
            ));
        }
        Ok(())
    }

    pub fn site(&self, row: usize, col: usize) -> usize {
        SiteIndex::new(row, col).flat(self.n)
    }
}

/// `H = −Σ_{jk} (Jx X_{j,k} X_{j+1,k} + Jz Z_{j,k} Z_{j,k+1})`.
///
/// XX bonds join vertically adjacent sites (same column), ZZ bonds join
/// horizontally adjacent sites (same row). All XX bonds come first.
pub fn build_compass(p: &CompassParams) -> Result<OperatorSum> {
    p.validate()?;
    let n = p.n;
    let n_sites = p.n_sites();
    let mut op = OperatorSum::new(n_sites).with_width(n);
    let cyclic = p.boundary == Boundary::Cyclic;
    for j in 0..n {
        for k in 0..n {
            if cyclic || j + 1 < n {
                let a = p.site(j, k);
                let b = p.site((j + 1) % n, k);
                op.push(PauliTerm::new(
                    n_sites,
                    [(a, Pauli::X), (b, Pauli::X)],
                    C64::new(-p.jx, 0.0),
                )?);
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if cyclic || k + 1 < n {
                let a = p.site(j, k);
                let b = p.site(j, (k + 1) % n);
                op.push(PauliTerm::new(
                    n_sites,
                    [(a, Pauli::Z), (b, Pauli::Z)],
                    C64::new(-p.jz, 0.0),
                )?);
            }
        }
    }
    Ok(op)
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        Err(Error::IndexOutOfRange { index: i, size: n })
    } else {
        Ok(())
    }
}

/// `Π_j Z_{j,k}`: Z-parity of column `k`.
pub fn build_column_parity(k: usize, n: usize) -> Result<PauliTerm> {
    check_index(k, n)?;
    let sites: Vec<usize> = (0..n).map(|j| j * n + k).collect();
    PauliTerm::uniform(n * n, &sites, Pauli::Z)
}

/// `Π_k X_{j,k}`: X-parity of row `j`.
pub fn build_row_parity(j: usize, n: usize) -> Result<PauliTerm> {
    check_index(j, n)?;
    let sites: Vec<usize> = (0..n).map(|k| j * n + k).collect();
    PauliTerm::uniform(n * n, &sites, Pauli::X)
}

/// `X̃_j`: flips the parity of every column, supported on row `j`.
pub fn build_logical_x(j: usize, n: usize) -> Result<PauliTerm> {
    build_row_parity(j, n)
}

/// `Z̃_k`: distinguishes the even and odd ground states, supported on column `k`.
pub fn build_logical_z(k: usize, n: usize) -> Result<PauliTerm> {
    build_column_parity(k, n)
}

/// `X` on every site: maps each column parity to its complement.
pub fn build_global_flip(n_sites: usize) -> PauliTerm {
    let sites: Vec<usize> = (0..n_sites).collect();
    PauliTerm::uniform(n_sites, &sites, Pauli::X).expect("sites in range")
}

/// Edge numbering on the `L×L` torus: all horizontal edges first, then all
/// vertical ones, each row-major over their base vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToricLayout {
    pub l: usize,
}

impl ToricLayout {
    pub fn new(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParams(format!("toric size {l} < 2")));
        }
        Ok(Self { l })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.l * self.l
    }

    /// Edge from vertex `(i, j)` to `(i, j + 1)`.
    pub fn horizontal(&self, i: usize, j: usize) -> usize {
        (i % self.l) * self.l + (j % self.l)
    }

    /// Edge from vertex `(i, j)` to `(i + 1, j)`.
    pub fn vertical(&self, i: usize, j: usize) -> usize {
        self.l * self.l + (i % self.l) * self.l + (j % self.l)
    }

    pub fn star_edges(&self, i: usize, j: usize) -> [usize; 4] {
        let l = self.l;
        [
            self.horizontal(i, j),
            self.horizontal(i, j + l - 1),
            self.vertical(i, j),
            self.vertical(i + l - 1, j),
        ]
    }

    /// Face whose top-left corner is vertex `(i, j)`.
    pub fn plaquette_edges(&self, i: usize, j: usize) -> [usize; 4] {
        [
            self.horizontal(i, j),
            self.horizontal(i + 1, j),
            self.vertical(i, j),
            self.vertical(i, j + 1),
        ]
    }

    pub fn stars(&self) -> Vec<PauliTerm> {
        let mut out = Vec::with_capacity(self.l * self.l);
        for i in 0..self.l {
            for j in 0..self.l {
                out.push(
                    PauliTerm::uniform(self.n_qubits(), &self.star_edges(i, j), Pauli::X)
                        .expect("edges in range"),
                );
            }
        }
        out
    }

    pub fn plaquettes(&self) -> Vec<PauliTerm> {
        let mut out = Vec::with_capacity(self.l * self.l);
        for i in 0..self.l {
            for j in 0..self.l {
                out.push(
                    PauliTerm::uniform(self.n_qubits(), &self.plaquette_edges(i, j), Pauli::Z)
                        .expect("edges in range"),
                );
            }
        }
        out
    }

    /// Z string along the horizontal edges of row 0: a logical operator of weight `L`.
    pub fn logical_z_row(&self) -> PauliTerm {
        let edges: Vec<usize> = (0..self.l).map(|j| self.horizontal(0, j)).collect();
        PauliTerm::uniform(self.n_qubits(), &edges, Pauli::Z).expect("edges in range")
    }
}

/// `H = −Σ_v A_v − Σ_p B_p` with X-type stars and Z-type plaquettes.
pub fn build_toric(l: usize) -> Result<OperatorSum> {
    let layout = ToricLayout::new(l)?;
    let mut op = OperatorSum::new(layout.n_qubits()).with_width(l);
    for t in layout.stars().into_iter().chain(layout.plaquettes()) {
        op.push(t.with_coeff(C64::new(-1.0, 0.0)));
    }
    Ok(op)
}

/// Computational basis states `|0…0⟩` and `|1…1⟩` on `n` sites.
pub fn build_repetition_code_states(n: usize) -> (CVector, CVector) {
    assert!(n >= 1, "repetition code needs at least one site");
    let dim = 1usize << n;
    let mut zeros = CVector::zeros(dim);
    let mut ones = CVector::zeros(dim);
    zeros[0] = ONE;
    ones[dim - 1] = ONE;
    (zeros, ones)
}

/// One-body, two-body and constant parts of an operator of weight ≤ 2.
///
/// `two_body` is indexed by [`site_pairs`]; in each 4×4 block the lower
/// site index is the more significant bit.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    pub n_sites: usize,
    pub one_body: Vec<CMatrix>,
    pub two_body: Vec<CMatrix>,
    pub constant: C64,
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn pauli_matrix(p: Pauli) -> CMatrix {
    let m = p.matrix();
    CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

impl LocalHamiltonian {
    pub fn from_operator(op: &OperatorSum) -> Result<Self> {
        let n = op.n_sites();
        if n < 2 {
            return Err(Error::InvalidParams("need at least two sites".into()));
        }
        let mut one_body = vec![CMatrix::zeros(2, 2); n];
        let mut two_body = vec![CMatrix::zeros(4, 4); binomial(n, 2)];
        let mut constant = ZERO;
        for t in op.terms() {
            let letters: Vec<(usize, Pauli)> = t.letters().iter().map(|(&s, &p)| (s, p)).collect();
            match letters.as_slice() {
                [] => constant += t.coeff,
                [(s, p)] => one_body[*s] += pauli_matrix(*p) * t.coeff,
                [(j, a), (k, b)] => {
                    two_body[pair_index(*j, *k, n)] +=
                        kron(&pauli_matrix(*a), &pauli_matrix(*b)) * t.coeff
                }
                _ => {
                    return Err(Error::InvalidParams(format!(
                        "term {t} has weight {} > 2",
                        t.weight()
                    )))
                }
            }
        }
        Ok(Self {
            n_sites: n,
            one_body,
            two_body,
            constant,
        })
    }
}

/// `{Ĥ_jk}` over all pairs `j < k`, lexicographic.
#[derive(Debug, Clone)]
pub struct ReducedHamiltonianVector {
    pub n_sites: usize,
    pub e0: f64,
    pub pairs: Vec<(usize, usize)>,
    pub entries: Vec<CMatrix>,
}

impl ReducedHamiltonianVector {
    /// Reduced Hamiltonian of `op − e0` for a weight ≤ 2 operator.
    /// Identity components of `op` are folded into the energy offset.
    pub fn from_operator(op: &OperatorSum, e0: f64) -> Result<Self> {
        let local = LocalHamiltonian::from_operator(op)?;
        build_reduced_hamiltonian(
            &local.one_body,
            &local.two_body,
            e0 - local.constant.re,
            local.n_sites,
        )
    }
}

/// `Ĥ_jk = V_jk + (T_j + T_k)/(N − 1) − E₀/C(N,2)`.
pub fn build_reduced_hamiltonian(
    one_body: &[CMatrix],
    two_body: &[CMatrix],
    e0: f64,
    n: usize,
) -> Result<ReducedHamiltonianVector> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("particle count {n} < 2")));
    }
    if one_body.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: one_body.len(),
        });
    }
    let pairs = site_pairs(n);
    if two_body.len() != pairs.len() {
        return Err(Error::DimensionMismatch {
            expected: pairs.len(),
            actual: two_body.len(),
        });
    }
    for t in one_body {
        if t.nrows() != 2 || t.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: t.nrows(),
            });
        }
        check_hermitian(t)?;
    }
    for v in two_body {
        if v.nrows() != 4 || v.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: v.nrows(),
            });
        }
        check_hermitian(v)?;
    }
    let id2 = CMatrix::identity(2, 2);
    let spread = C64::new(1.0 / (n as f64 - 1.0), 0.0);
    let offset = C64::new(e0 / binomial(n, 2) as f64, 0.0);
    let entries = pairs
        .iter()
        .zip(two_body)
        .map(|(&(j, k), v)| {
            let one = kron(&one_body[j], &id2) + kron(&id2, &one_body[k]);
            v + one * spread - CMatrix::identity(4, 4) * offset
        })
        .collect();
    Ok(ReducedHamiltonianVector {
        n_sites: n,
        e0,
        pairs,
        entries,
    })
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let d = hermitian_defect(m);
    if d > 1e-12 * (1.0 + m.norm()) {
        Err(Error::NonHermitian(d))
    } else {
        Ok(())
    }
}

/// Pauli decomposition of an operator on the ordered `sites`
/// (first site = most significant bit of `m`).
pub fn pauli_decompose(m: &CMatrix, sites: &[usize], n_sites: usize) -> Result<OperatorSum> {
    let k = sites.len();
    let dim = 1usize << k;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.nrows(),
        });
    }
    crate::linalg::check_sites(sites, n_sites)?;
    let local = OperatorSum::new(k);
    let mut out = OperatorSum::new(n_sites);
    let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
    for code in 0..4usize.pow(k as u32) {
        let mut c = code;
        let mut choice = vec![None; k];
        for slot in choice.iter_mut().rev() {
            *slot = letters[c % 4];
            c /= 4;
        }
        let local_term = PauliTerm::new(
            k,
            choice
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.map(|p| (i, p))),
            ONE,
        )?;
        let mut probe = local.clone();
        probe.push(local_term);
        let pm = probe.to_matrix()?;
        let coeff = trace(&(pm * m)) / C64::new(dim as f64, 0.0);
        if coeff.norm() >= crate::pauli::CANONICAL_DROP {
            out.push(PauliTerm::new(
                n_sites,
                choice
                    .iter()
                    .enumerate()
                    .filter_map(|(i, p)| p.map(|p| (sites[i], p))),
                coeff,
            )?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneBodyJson {
    pub site: usize,
    /// Row-major 2×2 `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoBodyJson {
    pub sites: [usize; 2],
    /// Row-major 4×4 `[re, im]` pairs, first listed site most significant.
    pub matrix: Vec<[f64; 2]>,
}

/// Descriptor for a user-supplied 2-body Hamiltonian `Σ T_j + Σ V_jk`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomModel {
    pub n_sites: usize,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub one_body: Vec<OneBodyJson>,
    #[serde(default)]
    pub two_body: Vec<TwoBodyJson>,
}

impl CustomModel {
    pub fn to_operator(&self) -> Result<OperatorSum> {
        let n = self.n_sites;
        let mut op = OperatorSum::new(n).with_width(self.width.unwrap_or(n));
        for t in &self.one_body {
            let m = matrix_from_pairs(2, &t.matrix)?;
            check_hermitian(&m)?;
            for term in pauli_decompose(&m, &[t.site], n)?.terms() {
                op.push(term.clone());
            }
        }
        for v in &self.two_body {
            let m = matrix_from_pairs(4, &v.matrix)?;
            check_hermitian(&m)?;
            for term in pauli_decompose(&m, &v.sites, n)?.terms() {
                op.push(term.clone());
            }
        }
        Ok(op.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{embed, frobenius};

    #[test]
    fn compass_3x3_has_18_negative_terms() {
        let h = build_compass(&CompassParams::bacon_shor_3x3()).unwrap();
        assert_eq!(h.len(), 18);
        assert!(h.terms().iter().all(|t| t.coeff.re < 0.0 && t.coeff.im == 0.0));
        assert_eq!(h.canonical().len(), 18);
    }

    #[test]
    fn open_boundary_term_count() {
        for n in 2..5 {
            let h = build_compass(&CompassParams::new(n, 1.0, 2.0, Boundary::Open)).unwrap();
            assert_eq!(h.len(), 2 * n * (n - 1));
        }
        let h = build_compass(&CompassParams::new(4, 1.0, 1.0, Boundary::Cyclic)).unwrap();
        assert_eq!(h.len(), 32);
    }

    #[test]
    fn invalid_compass_params() {
        assert!(build_compass(&CompassParams::new(2, 1.0, 1.0, Boundary::Cyclic)).is_err());
        assert!(build_compass(&CompassParams::new(1, 1.0, 1.0, Boundary::Open)).is_err());
        assert!(build_compass(&CompassParams::new(3, 0.0, 1.0, Boundary::Cyclic)).is_err());
        assert!(build_compass(&CompassParams::new(3, 1.0, -1.0, Boundary::Cyclic)).is_err());
    }

    #[test]
    fn compass_trace_zero_and_real_symmetric() {
        let h = build_compass(&CompassParams::bacon_shor_3x3())
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(trace(&h), ZERO);
        assert!(h.iter().all(|z| z.im == 0.0));
        assert_eq!(frobenius(&(&h - h.transpose())), 0.0);
    }

    #[test]
    fn parity_operators_commute_with_compass() {
        for n in 3..5 {
            let h = build_compass(&CompassParams::new(n, 1.0, 0.7, Boundary::Cyclic)).unwrap();
            for k in 0..n {
                let col = build_column_parity(k, n).unwrap();
                let row = build_row_parity(k, n).unwrap();
                assert!(h.terms().iter().all(|t| t.commutes(&col) && t.commutes(&row)));
            }
        }
    }

    #[test]
    fn parity_operator_shapes() {
        let z0 = build_column_parity(0, 3).unwrap();
        assert_eq!(z0.support(), vec![0, 3, 6]);
        assert_eq!(z0.weight(), 3);
        let x0 = build_logical_x(0, 3).unwrap();
        assert_eq!(x0.support(), vec![0, 1, 2]);
        assert!(!x0.commutes(&z0));
        assert!(build_column_parity(3, 3).is_err());
        assert!(build_logical_x(5, 3).is_err());
    }

    #[test]
    fn toric_l2_structure() {
        let layout = ToricLayout::new(2).unwrap();
        let h = build_toric(2).unwrap();
        assert_eq!(h.n_sites(), 8);
        assert_eq!(h.len(), 8);
        let stars = layout.stars();
        let plaqs = layout.plaquettes();
        assert!(stars.iter().all(|s| s.weight() == 4));
        assert!(plaqs.iter().all(|p| p.weight() == 4));
        for s in &stars {
            for p in &plaqs {
                assert!(s.commutes(p));
            }
        }
        let product = stars.iter().skip(1).fold(stars[0].clone(), |acc, s| acc.multiply(s));
        assert_eq!(product.weight(), 0);
        assert_eq!(product.coeff, ONE);
        assert!(ToricLayout::new(1).is_err());
    }

    #[test]
    fn toric_logical_commutes_with_stars() {
        for l in 2..6 {
            let layout = ToricLayout::new(l).unwrap();
            let z = layout.logical_z_row();
            assert_eq!(z.weight(), l);
            assert!(layout.stars().iter().all(|s| s.commutes(&z)));
        }
    }

    #[test]
    fn repetition_states() {
        let (a, b) = build_repetition_code_states(3);
        assert_eq!(a[0], ONE);
        assert_eq!(b[7], ONE);
        assert_eq!(crate::linalg::inner(&a, &b), ZERO);
        // ⟨000|Z₁|000⟩ = 1, ⟨111|Z₁|111⟩ = −1
        let z1 = PauliTerm::single(3, 1, Pauli::Z, ONE).unwrap();
        assert_eq!(crate::linalg::inner(&a, &z1.apply(&a)), ONE);
        assert_eq!(crate::linalg::inner(&b, &z1.apply(&b)), -ONE);
    }

    #[test]
    fn reduced_hamiltonian_constant_offset() {
        let t = vec![CMatrix::zeros(2, 2); 9];
        let v = vec![CMatrix::zeros(4, 4); 36];
        let rh = build_reduced_hamiltonian(&t, &v, -9.0, 9).unwrap();
        assert_eq!(rh.entries.len(), 36);
        for e in &rh.entries {
            assert!(frobenius(&(e - CMatrix::identity(4, 4) * C64::new(0.25, 0.0))) < 1e-15);
        }
    }

    #[test]
    fn reduced_hamiltonian_rejects_bad_input() {
        let t = vec![CMatrix::zeros(2, 2); 3];
        let v = vec![CMatrix::zeros(4, 4); 2];
        assert!(matches!(
            build_reduced_hamiltonian(&t, &v, 0.0, 3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(build_reduced_hamiltonian(&t[..1], &[], 0.0, 1).is_err());
        let mut bad = vec![CMatrix::zeros(4, 4); 3];
        bad[0][(0, 1)] = ONE;
        assert!(matches!(
            build_reduced_hamiltonian(&t, &bad, 0.0, 3),
            Err(Error::NonHermitian(_))
        ));
    }

    #[test]
    fn reduced_hamiltonian_sums_to_shifted_hamiltonian() {
        // 4 sites, with one-body fields so the (N-1) spreading is exercised.
        let mut op = build_compass(&CompassParams::new(2, 0.8, 1.3, Boundary::Open)).unwrap();
        op.push(PauliTerm::single(4, 1, Pauli::Z, C64::new(0.4, 0.0)).unwrap());
        op.push(PauliTerm::single(4, 2, Pauli::Y, C64::new(-0.3, 0.0)).unwrap());
        op.push(PauliTerm::identity(4, C64::new(0.5, 0.0)));
        let e0 = -2.75;
        let rh = ReducedHamiltonianVector::from_operator(&op, e0).unwrap();
        let mut sum = CMatrix::zeros(16, 16);
        for (&(j, k), e) in rh.pairs.iter().zip(&rh.entries) {
            sum += embed(e, &[j, k], 4).unwrap();
        }
        let target = op.to_matrix().unwrap() - CMatrix::identity(16, 16) * C64::new(e0, 0.0);
        assert!(frobenius(&(sum - target)) < 1e-12);
    }

    #[test]
    fn pauli_decomposition_round_trips() {
        let m = CMatrix::from_fn(4, 4, |r, c| {
            let x = (r * 4 + c) as f64;
            C64::new(x.sin(), if r == c { 0.0 } else { x.cos() })
        });
        let h = &m + m.adjoint();
        let op = pauli_decompose(&h, &[2, 0], 3).unwrap();
        let back = op.to_matrix().unwrap();
        let want = embed(&h, &[2, 0], 3).unwrap();
        assert!(frobenius(&(back - want)) < 1e-12);
    }

    #[test]
    fn custom_model_from_json() {
        let doc = r#"{
            "n_sites": 2,
            "one_body": [{"site": 0, "matrix": [[1,0],[0,0],[0,0],[-1,0]]}],
            "two_body": [{"sites": [0, 1], "matrix": [
                [0,0],[0,0],[0,0],[1,0],
                [0,0],[0,0],[1,0],[0,0],
                [0,0],[1,0],[0,0],[0,0],
                [1,0],[0,0],[0,0],[0,0]]}]
        }"#;
        let model: CustomModel = serde_json::from_str(doc).unwrap();
        let op = model.to_operator().unwrap();
        let labels: Vec<String> = op.terms().iter().map(|t| t.to_string()).collect();
        assert_eq!(labels, vec!["X(0) X(1)", "Z(0)"]);
    }
}

//! Multi-qubit Pauli strings and weighted sums of them.
//!
//! Sites carry a row-major flat index. In the computational basis site 0 is
//! the most significant bit, so the Kronecker order is `site 0 ⊗ site 1 ⊗ …`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pair, CMatrix, CVector, C64, ZERO};

/// Position on an `n`-wide grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SiteIndex {
    pub row: usize,
    pub col: usize,
}

impl SiteIndex {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn flat(self, width: usize) -> usize {
        self.row * width + self.col
    }

    pub fn from_flat(flat: usize, width: usize) -> Self {
        Self {
            row: flat / width,
            col: flat % width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Option<Pauli>> {
        match c {
            'I' => Some(None),
            'X' => Some(Some(Pauli::X)),
            'Y' => Some(Some(Pauli::Y)),
            'Z' => Some(Some(Pauli::Z)),
            _ => None,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    /// Single-site product `self · other` as (phase, letter).
    pub fn product(self, other: Pauli) -> (Phase, Option<Pauli>) {
        use Pauli::*;
        let phase = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => Phase::I,
            (Y, X) | (Z, Y) | (X, Z) => Phase::MINUS_I,
            _ => Phase::ONE,
        };
        let letter = Pauli::from_bits(
            self.has_x() != other.has_x(),
            self.has_z() != other.has_z(),
        );
        (phase, letter)
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => [[ZERO, o], [o, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[o, ZERO], [ZERO, -o]],
        }
    }
}

/// Exact element of {1, i, −1, −i}, stored as a power of i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Weighted tensor product of single-site Paulis. Absent sites are identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    n_sites: usize,
    letters: BTreeMap<usize, Pauli>,
    pub coeff: C64,
}

impl PauliTerm {
    pub fn new<I>(n_sites: usize, letters: I, coeff: C64) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        let mut map = BTreeMap::new();
        for (site, p) in letters {
            if site >= n_sites {
                return Err(Error::IndexOutOfRange {
                    index: site,
                    size: n_sites,
                });
            }
            if map.insert(site, p).is_some() {
                return Err(Error::BadSites(format!("site {site} given twice")));
            }
        }
        Ok(Self {
            n_sites,
            letters: map,
            coeff,
        })
    }

    pub fn identity(n_sites: usize, coeff: C64) -> Self {
        Self {
            n_sites,
            letters: BTreeMap::new(),
            coeff,
        }
    }

    pub fn single(n_sites: usize, site: usize, p: Pauli, coeff: C64) -> Result<Self> {
        Self::new(n_sites, [(site, p)], coeff)
    }

    /// Product of one letter on each listed site, unit coefficient.
    pub fn uniform(n_sites: usize, sites: &[usize], p: Pauli) -> Result<Self> {
        Self::new(n_sites, sites.iter().map(|&s| (s, p)), C64::new(1.0, 0.0))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn letters(&self) -> &BTreeMap<usize, Pauli> {
        &self.letters
    }

    pub fn get(&self, site: usize) -> Option<Pauli> {
        self.letters.get(&site).copied()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters.keys().copied().collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.values().all(|&p| p == Pauli::Z)
    }

    pub fn with_coeff(&self, coeff: C64) -> Self {
        Self {
            coeff,
            ..self.clone()
        }
    }

    pub fn adjoint(&self) -> Self {
        self.with_coeff(self.coeff.conj())
    }

    /// Letter string in site order, e.g. `"XZ"`.
    pub fn letter_string(&self) -> String {
        self.letters.values().map(|p| p.letter()).collect()
    }

    pub fn multiply(&self, other: &PauliTerm) -> PauliTerm {
        assert_eq!(
            self.n_sites, other.n_sites,
            "Pauli terms on different site counts"
        );
        let mut phase = Phase::ONE;
        let mut letters = self.letters.clone();
        for (&site, &b) in &other.letters {
            match letters.get(&site).copied() {
                None => {
                    letters.insert(site, b);
                }
                Some(a) => {
                    let (ph, p) = a.product(b);
                    phase = phase * ph;
                    match p {
                        Some(p) => {
                            letters.insert(site, p);
                        }
                        None => {
                            letters.remove(&site);
                        }
                    }
                }
            }
        }
        PauliTerm {
            n_sites: self.n_sites,
            letters,
            coeff: self.coeff * other.coeff * phase.to_complex(),
        }
    }

    /// True iff the number of sites carrying different non-identity letters is even.
    pub fn commutes(&self, other: &PauliTerm) -> bool {
        let conflicts = self
            .letters
            .iter()
            .filter(|(site, a)| matches!(other.letters.get(site), Some(b) if b != *a))
            .count();
        conflicts % 2 == 0
    }

    pub(crate) fn masks(&self) -> BasisAction {
        let n = self.n_sites;
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u8;
        for (&site, &p) in &self.letters {
            let bit = 1usize << (n - 1 - site);
            if p.has_x() {
                flip |= bit;
            }
            if p.has_z() {
                sign |= bit;
            }
            if p == Pauli::Y {
                n_y += 1;
            }
        }
        BasisAction {
            flip,
            sign,
            scale: self.coeff * Phase(n_y % 4).to_complex(),
        }
    }

    /// Applies the term to a state vector without forming a matrix.
    pub fn apply(&self, state: &CVector) -> CVector {
        assert_eq!(state.len(), 1usize << self.n_sites);
        let act = self.masks();
        let mut out = CVector::zeros(state.len());
        for (b, &amp) in state.iter().enumerate() {
            if amp != ZERO {
                let (row, z) = act.on(b);
                out[row] += z * amp;
            }
        }
        out
    }

    pub fn to_operator(&self) -> OperatorSum {
        let mut op = OperatorSum::new(self.n_sites);
        op.push(self.clone());
        op
    }
}

/// `P|b⟩ = scale · (−1)^{|b ∧ sign|} |b ⊕ flip⟩`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BasisAction {
    pub flip: usize,
    pub sign: usize,
    pub scale: C64,
}

impl BasisAction {
    #[inline]
    pub fn on(&self, b: usize) -> (usize, C64) {
        let z = if (b & self.sign).count_ones() % 2 == 1 {
            -self.scale
        } else {
            self.scale
        };
        (b ^ self.flip, z)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(s, p)| format!("{}({})", p.letter(), s))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Weighted sum of Pauli terms on a fixed number of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_sites: usize,
    /// Grid width used to render sites as `[row, col]`.
    width: usize,
    terms: Vec<PauliTerm>,
}

/// Coefficients below this magnitude are dropped by [`OperatorSum::canonical`].
pub const CANONICAL_DROP: f64 = 1e-14;

impl OperatorSum {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            width: n_sites.max(1),
            terms: Vec::new(),
        }
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width.max(1);
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliTerm) {
        assert_eq!(term.n_sites, self.n_sites, "term on wrong site count");
        self.terms.push(term);
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= s;
        }
        out
    }

    pub fn add(&self, other: &OperatorSum) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.clone());
        }
        out.canonical()
    }

    pub fn multiply(&self, other: &OperatorSum) -> Self {
        let mut out = OperatorSum::new(self.n_sites).with_width(self.width);
        for a in &self.terms {
            for b in &other.terms {
                out.push(a.multiply(b));
            }
        }
        out.canonical()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = t.coeff.conj();
        }
        out
    }

    /// Merges terms with identical letters and drops negligible ones.
    /// Output terms are sorted by their letter maps.
    pub fn canonical(&self) -> Self {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, C64> = BTreeMap::new();
        for t in &self.terms {
            let key: Vec<(usize, Pauli)> = t.letters.iter().map(|(&s, &p)| (s, p)).collect();
            *merged.entry(key).or_insert(ZERO) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.norm() >= CANONICAL_DROP)
            .map(|(key, coeff)| PauliTerm {
                n_sites: self.n_sites,
                letters: key.into_iter().collect(),
                coeff,
            })
            .collect();
        Self {
            n_sites: self.n_sites,
            width: self.width,
            terms,
        }
    }

    /// Pauli strings are Hermitian and independent, so the sum is Hermitian
    /// iff every canonical coefficient is real.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.canonical().terms.iter().all(|t| t.coeff.im.abs() <= tol)
    }

    /// Sum of coefficient moduli; bounds the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.canonical().terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|t| t.weight()).max().unwrap_or(0)
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.to_matrix_limited(crate::linalg::DEFAULT_MAX_SITES)
    }

    pub fn to_matrix_limited(&self, max_sites: usize) -> Result<CMatrix> {
        if self.n_sites > max_sites {
            return Err(Error::DenseLimit {
                what: "operator sites",
                actual: self.n_sites,
                limit: max_sites,
            });
        }
        let dim = 1usize << self.n_sites;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            let act = t.masks();
            for b in 0..dim {
                let (row, z) = act.on(b);
                m[(row, b)] += z;
            }
        }
        Ok(m)
    }

    pub fn apply(&self, state: &CVector) -> CVector {
        assert_eq!(state.len(), 1usize << self.n_sites);
        let mut out = CVector::zeros(state.len());
        for t in &self.terms {
            let act = t.masks();
            for (b, &amp) in state.iter().enumerate() {
                if amp != ZERO {
                    let (row, z) = act.on(b);
                    out[row] += z * amp;
                }
            }
        }
        out
    }

    pub fn expectation(&self, state: &CVector) -> C64 {
        crate::linalg::inner(state, &self.apply(state))
    }

    pub fn to_json(&self) -> OperatorSumJson {
        OperatorSumJson {
            n_sites: self.n_sites,
            width: self.width,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    sites: t
                        .letters
                        .keys()
                        .map(|&s| {
                            let si = SiteIndex::from_flat(s, self.width);
                            [si.row, si.col]
                        })
                        .collect(),
                    letters: t.letter_string(),
                    coeff: pair(t.coeff),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &OperatorSumJson) -> Result<Self> {
        let mut op = OperatorSum::new(doc.n_sites).with_width(doc.width);
        for (i, t) in doc.terms.iter().enumerate() {
            let letters: Vec<char> = t.letters.chars().collect();
            if letters.len() != t.sites.len() {
                return Err(Error::Schema {
                    path: format!("terms[{i}]"),
                    reason: "letters and sites differ in length".into(),
                });
            }
            let mut pairs = Vec::new();
            for (site, &c) in t.sites.iter().zip(&letters) {
                let p = Pauli::from_letter(c).ok_or_else(|| Error::Schema {
                    path: format!("terms[{i}].letters"),
                    reason: format!("unknown Pauli letter {c:?}"),
                })?;
                if let Some(p) = p {
                    pairs.push((SiteIndex::new(site[0], site[1]).flat(op.width), p));
                }
            }
            op.push(PauliTerm::new(
                doc.n_sites,
                pairs,
                C64::new(t.coeff[0], t.coeff[1]),
            )?);
        }
        Ok(op)
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+}{:+}i) {}", t.coeff.re, t.coeff.im, t)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub sites: Vec<[usize; 2]>,
    pub letters: String,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSumJson {
    pub n_sites: usize,
    pub width: usize,
    pub terms: Vec<TermJson>,
}

/// Every Pauli of weight exactly `w`, sites lexicographic then letters X<Y<Z.
pub fn all_of_weight(n_sites: usize, w: usize) -> Vec<PauliTerm> {
    let mut out = Vec::new();
    for sites in crate::linalg::combinations(n_sites, w) {
        let count = 3usize.pow(w as u32);
        for code in 0..count {
            let mut c = code;
            let mut letters = vec![Pauli::X; w];
            for slot in letters.iter_mut().rev() {
                *slot = Pauli::ALL[c % 3];
                c /= 3;
            }
            out.push(
                PauliTerm::new(
                    n_sites,
                    sites.iter().copied().zip(letters),
                    C64::new(1.0, 0.0),
                )
                .expect("sites in range"),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, ONE};
    use proptest::prelude::*;

    fn term(n: usize, letters: &[(usize, Pauli)]) -> PauliTerm {
        PauliTerm::new(n, letters.iter().copied(), ONE).unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let p = term(1, &[(0, Pauli::X)]).multiply(&term(1, &[(0, Pauli::Z)]));
        assert_eq!(p.get(0), Some(Pauli::Y));
        assert_eq!(p.coeff, C64::new(0.0, -1.0));
    }

    #[test]
    fn identity_is_neutral() {
        let id = PauliTerm::identity(3, ONE);
        let p = term(3, &[(0, Pauli::Y), (2, Pauli::Z)]).with_coeff(C64::new(0.5, -2.0));
        assert_eq!(id.multiply(&p), p);
        assert_eq!(p.multiply(&id), p);
    }

    #[test]
    fn overlapping_product_and_anticommutation() {
        let a = term(3, &[(0, Pauli::X), (1, Pauli::X)]);
        let b = term(3, &[(1, Pauli::Z), (2, Pauli::Z)]);
        let p = a.multiply(&b);
        assert_eq!(p.get(0), Some(Pauli::X));
        assert_eq!(p.get(1), Some(Pauli::Y));
        assert_eq!(p.get(2), Some(Pauli::Z));
        assert_eq!(p.coeff, C64::new(0.0, -1.0));
        assert!(!a.commutes(&b));
    }

    #[test]
    fn commutation_examples() {
        assert!(term(2, &[(0, Pauli::X)]).commutes(&term(2, &[(1, Pauli::Z)])));
        assert!(!term(1, &[(0, Pauli::X)]).commutes(&term(1, &[(0, Pauli::Z)])));
    }

    #[test]
    fn small_matrices() {
        let z = term(1, &[(0, Pauli::Z)]).to_operator().to_matrix().unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert_eq!(z[(1, 1)], -ONE);
        assert_eq!(z[(0, 1)], ZERO);

        let xx = term(2, &[(0, Pauli::X), (1, Pauli::X)])
            .to_operator()
            .to_matrix()
            .unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r + c == 3 { ONE } else { ZERO };
                assert_eq!(xx[(r, c)], want);
            }
        }
    }

    #[test]
    fn site_zero_is_most_significant() {
        // Z on site 0 of 2 sites is diag(1, 1, -1, -1).
        let m = term(2, &[(0, Pauli::Z)]).to_operator().to_matrix().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn dense_limit_enforced() {
        let op = OperatorSum::new(5);
        assert!(matches!(
            op.to_matrix_limited(4),
            Err(Error::DenseLimit { .. })
        ));
    }

    #[test]
    fn canonical_merges_and_drops() {
        let mut op = OperatorSum::new(2);
        op.push(term(2, &[(0, Pauli::X)]));
        op.push(term(2, &[(0, Pauli::X)]).with_coeff(C64::new(2.0, 0.0)));
        op.push(term(2, &[(1, Pauli::Z)]).with_coeff(C64::new(1e-15, 0.0)));
        let c = op.canonical();
        assert_eq!(c.len(), 1);
        assert_eq!(c.terms()[0].coeff, C64::new(3.0, 0.0));
    }

    #[test]
    fn json_round_trip_keeps_grid_sites() {
        let mut op = OperatorSum::new(9).with_width(3);
        op.push(term(9, &[(1, Pauli::X), (4, Pauli::X)]).with_coeff(C64::new(-1.0, 0.0)));
        let doc = op.to_json();
        assert_eq!(doc.terms[0].sites, vec![[0, 1], [1, 1]]);
        let text = serde_json::to_string(&doc).unwrap();
        let back = OperatorSum::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, op);
    }

    fn arb_term(n: usize) -> impl Strategy<Value = PauliTerm> {
        (
            proptest::collection::vec(0u8..4, n),
            -2.0f64..2.0,
            -2.0f64..2.0,
        )
            .prop_map(move |(codes, re, im)| {
                let letters = codes.iter().enumerate().filter_map(|(s, &c)| match c {
                    1 => Some((s, Pauli::X)),
                    2 => Some((s, Pauli::Y)),
                    3 => Some((s, Pauli::Z)),
                    _ => None,
                });
                PauliTerm::new(n, letters, C64::new(re, im)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn multiply_is_associative(a in arb_term(4), b in arb_term(4), c in arb_term(4)) {
            let left = a.multiply(&b).multiply(&c);
            let right = a.multiply(&b.multiply(&c));
            prop_assert_eq!(left.letters(), right.letters());
            prop_assert!((left.coeff - right.coeff).norm() < 1e-15 * (1.0 + left.coeff.norm()));
        }

        #[test]
        fn commutes_matches_matrix_commutator(a in arb_term(4), b in arb_term(4)) {
            let ma = a.to_operator().to_matrix().unwrap();
            let mb = b.to_operator().to_matrix().unwrap();
            let comm = &ma * &mb - &mb * &ma;
            let vanishes = frobenius(&comm) < 1e-12;
            prop_assert_eq!(a.commutes(&b), vanishes || a.coeff.norm() * b.coeff.norm() < 1e-12);
        }

        #[test]
        fn apply_matches_matrix(a in arb_term(3), re in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let v = CVector::from_fn(8, |i, _| C64::new(re[i], re[i + 8]));
            let m = a.to_operator().to_matrix().unwrap();
            let diff = &m * &v - a.apply(&v);
            prop_assert!(diff.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn matrix_product_matches_term_product_on_two_qubits() {
        let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
        let mut all = Vec::new();
        for a in letters {
            for b in letters {
                let l: Vec<(usize, Pauli)> = [(0, a), (1, b)]
                    .into_iter()
                    .filter_map(|(s, p)| p.map(|p| (s, p)))
                    .collect();
                all.push(term(2, &l));
            }
        }
        for a in &all {
            for b in &all {
                let ma = a.to_operator().to_matrix().unwrap();
                let mb = b.to_operator().to_matrix().unwrap();
                let mp = a.multiply(b).to_operator().to_matrix().unwrap();
                assert!(frobenius(&(&ma * &mb - mp)) < 1e-15);
            }
        }
    }

    #[test]
    fn weight_enumeration_counts() {
        assert_eq!(all_of_weight(9, 1).len(), 27);
        assert_eq!(all_of_weight(4, 2).len(), 6 * 9);
        assert_eq!(all_of_weight(3, 0).len(), 1);
    }
}

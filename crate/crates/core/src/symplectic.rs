//! GF(2) symplectic Paulis and exhaustive low-weight logical search.
//!
//! A stabilizer code is m-blind iff it has no logical operator of weight
//! ≤ m, i.e. every Pauli of weight 1..=m either anticommutes with some
//! generator or lies in the stabilizer group (phases ignored). Enumeration
//! keeps a syndrome bit-vector per candidate and updates it by XOR with
//! precomputed single-qubit syndromes, so each candidate costs O(1).

use std::fmt;

use rayon::prelude::*;

use crate::blindness::{BlindnessCertificate, Method, Witness};
use crate::error::{Error, Result};
use crate::lattice::build_toric;
use crate::linalg::binomial;
use crate::pauli::{Pauli, PauliTerm};

const WORD: usize = 64;

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticPauli {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl SymplecticPauli {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, Some(p));
        s
    }

    pub fn from_term(t: &PauliTerm) -> Self {
        let mut s = Self::identity(t.n_sites());
        for (&q, &p) in t.letters() {
            s.set(q, Some(p));
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, qubit: usize, p: Option<Pauli>) {
        assert!(qubit < self.n, "qubit {qubit} out of range");
        let (w, b) = (qubit / WORD, 1u64 << (qubit % WORD));
        let (hx, hz) = p.map_or((false, false), |p| (p.has_x(), p.has_z()));
        self.x[w] = if hx { self.x[w] | b } else { self.x[w] & !b };
        self.z[w] = if hz { self.z[w] | b } else { self.z[w] & !b };
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        let (w, b) = (qubit / WORD, 1u64 << (qubit % WORD));
        match (self.x[w] & b != 0, self.z[w] & b != 0) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Product up to phase.
    pub fn mul(&self, other: &SymplecticPauli) -> SymplecticPauli {
        assert_eq!(self.n, other.n);
        SymplecticPauli {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn to_term(&self) -> PauliTerm {
        let letters: Vec<(usize, Pauli)> = (0..self.n).filter_map(|q| self.get(q).map(|p| (q, p))).collect();
        PauliTerm::new(self.n, letters, crate::linalg::ONE).expect("qubits in range")
    }

    /// Concatenated `x | z` bits, used for row reduction.
    fn packed(&self) -> Vec<u64> {
        self.x.iter().chain(&self.z).copied().collect()
    }
}

impl fmt::Display for SymplecticPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.n)
            .filter_map(|q| self.get(q).map(|p| format!("{}({q})", p.letter())))
            .collect();
        if parts.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// `a.x·b.z + a.z·b.x mod 2`; 0 iff the operators commute.
pub fn symplectic_product(a: &SymplecticPauli, b: &SymplecticPauli) -> Result<u8> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            actual: b.n,
        });
    }
    let ones: u32 = (0..a.x.len())
        .map(|w| ((a.x[w] & b.z[w]) ^ (a.z[w] & b.x[w])).count_ones())
        .sum();
    Ok((ones % 2) as u8)
}

#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<SymplecticPauli>,
    /// Reduced row echelon form of the generator matrix, with pivot bits.
    echelon: Vec<(usize, Vec<u64>)>,
}

fn bit(v: &[u64], i: usize) -> bool {
    v[i / WORD] >> (i % WORD) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

impl StabilizerGroup {
    pub fn new(n: usize, generators: Vec<SymplecticPauli>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.n != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: g.n,
            });
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if symplectic_product(a, b)? == 1 {
                    return Err(Error::InvalidParams(format!(
                        "stabilizer generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
        for g in &generators {
            let mut row = g.packed();
            for (pivot, r) in &echelon {
                if bit(&row, *pivot) {
                    xor_into(&mut row, r);
                }
            }
            if let Some(pivot) = first_bit(&row) {
                for (_, r) in echelon.iter_mut() {
                    if bit(r, pivot) {
                        xor_into(r, &row);
                    }
                }
                echelon.push((pivot, row));
            }
        }
        Ok(Self {
            n,
            generators,
            echelon,
        })
    }

    pub fn from_terms(terms: &[PauliTerm]) -> Result<Self> {
        let n = terms.first().map_or(0, PauliTerm::n_sites);
        Self::new(n, terms.iter().map(SymplecticPauli::from_term).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[SymplecticPauli] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    /// log₂ of the code-space dimension.
    pub fn logical_qubits(&self) -> usize {
        self.n - self.rank()
    }
}

/// True iff `p` is, up to phase, a product of generators.
pub fn in_group(p: &SymplecticPauli, g: &StabilizerGroup) -> bool {
    if p.n != g.n {
        return false;
    }
    let mut row = p.packed();
    for (pivot, r) in &g.echelon {
        if bit(&row, *pivot) {
            xor_into(&mut row, r);
        }
    }
    row.iter().all(|w| *w == 0)
}

/// Stars and plaquettes of the `L×L` toric code, minus one of each (the
/// products of all stars and of all plaquettes are the identity).
pub fn toric_generators(l: usize) -> Result<StabilizerGroup> {
    let h = build_toric(l)?;
    let per_type = l * l;
    let terms: Vec<PauliTerm> = h
        .terms()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != per_type - 1 && *i != 2 * per_type - 1)
        .map(|(_, t)| t.clone())
        .collect();
    StabilizerGroup::from_terms(&terms)
}

/// `Σ_{w=1}^{m} C(n,w)·3^w`.
pub fn candidate_count(n: usize, m: usize) -> u64 {
    (1..=m.min(n))
        .map(|w| binomial(n, w) as u64 * 3u64.pow(w as u32))
        .sum()
}

const MAX_GENERATORS: usize = 128;

struct Scan<'a> {
    n: usize,
    /// `table[q][letter]`: syndrome of X, Y, Z on qubit q.
    table: Vec<[u128; 3]>,
    group: &'a StabilizerGroup,
}

struct ShardResult {
    count: u64,
    witness: Option<Vec<(usize, Pauli)>>,
}

impl Scan<'_> {
    fn new(group: &StabilizerGroup) -> Result<Scan<'_>> {
        if group.generators.len() > MAX_GENERATORS {
            return Err(Error::DenseLimit {
                what: "stabilizer generators",
                actual: group.generators.len(),
                limit: MAX_GENERATORS,
            });
        }
        let n = group.n;
        let table = (0..n)
            .map(|q| {
                Pauli::ALL.map(|p| {
                    let single = SymplecticPauli::single(n, q, p);
                    group
                        .generators
                        .iter()
                        .enumerate()
                        .filter(|(_, g)| symplectic_product(g, &single).expect("same size") == 1)
                        .fold(0u128, |s, (i, _)| s | 1 << i)
                })
            })
            .collect();
        Ok(Scan { n, table, group })
    }

    /// All weight-`w` Paulis whose lowest qubit is `lead`, in lexicographic
    /// (qubit, letter) order. Stops at the first logical operator.
    fn shard(&self, lead: usize, w: usize) -> ShardResult {
        let mut out = ShardResult {
            count: 0,
            witness: None,
        };
        let mut stack = Vec::with_capacity(w);
        for (li, &p) in Pauli::ALL.iter().enumerate() {
            stack.push((lead, p));
            self.descend(lead + 1, w - 1, self.table[lead][li], &mut stack, &mut out);
            stack.pop();
            if out.witness.is_some() {
                break;
            }
        }
        out
    }

    fn descend(&self, start: usize, left: usize, syn: u128, stack: &mut Vec<(usize, Pauli)>, out: &mut ShardResult) {
        if left == 0 {
            out.count += 1;
            if syn == 0 && !self.stabilizes(stack) {
                out.witness = Some(stack.clone());
            }
            return;
        }
        for q in start..=self.n - left {
            for (li, &p) in Pauli::ALL.iter().enumerate() {
                stack.push((q, p));
                self.descend(q + 1, left - 1, syn ^ self.table[q][li], stack, out);
                stack.pop();
                if out.witness.is_some() {
                    return;
                }
            }
        }
    }

    fn stabilizes(&self, letters: &[(usize, Pauli)]) -> bool {
        let mut p = SymplecticPauli::identity(self.n);
        for &(q, l) in letters {
            p.set(q, Some(l));
        }
        in_group(&p, self.group)
    }
}

/// Certifies m-blindness of the code space by showing no Pauli of weight
/// `1..=m` is a nontrivial logical operator. Runs weight by weight, so a
/// failure reports a minimum-weight witness.
pub fn certify_stabilizer_blindness(g: &StabilizerGroup, m: usize) -> Result<BlindnessCertificate> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if m > g.n {
        return Err(Error::SubsetTooLarge { m, n: g.n });
    }
    let scan = Scan::new(g)?;
    let mut checked = 0u64;
    let mut witness = None;
    for w in 1..=m {
        let shards: Vec<ShardResult> = (0..=g.n - w).into_par_iter().map(|lead| scan.shard(lead, w)).collect();
        checked += shards.iter().map(|s| s.count).sum::<u64>();
        if let Some(letters) = shards.into_iter().find_map(|s| s.witness) {
            let mut p = SymplecticPauli::identity(g.n);
            for (q, l) in letters {
                p.set(q, Some(l));
            }
            witness = Some(Witness::Logical {
                pauli: p.to_string(),
                weight: w,
            });
            break;
        }
        assert_eq!(
            checked,
            candidate_count(g.n, w),
            "enumeration missed candidates at weight {w}"
        );
    }
    Ok(BlindnessCertificate {
        m,
        passed: witness.is_none(),
        method: Method::StabilizerEnumeration,
        max_diagonal_deviation: None,
        max_offdiagonal_norm: None,
        witness,
        diagonal_witness: None,
        tolerance: 0.0,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ToricLayout;
    use crate::linalg::combinations;
    use proptest::prelude::*;

    fn parse(n: usize, letters: &[(usize, Pauli)]) -> SymplecticPauli {
        let mut p = SymplecticPauli::identity(n);
        for &(q, l) in letters {
            p.set(q, Some(l));
        }
        p
    }

    #[test]
    fn products_of_singles() {
        let x = SymplecticPauli::single(1, 0, Pauli::X);
        let z = SymplecticPauli::single(1, 0, Pauli::Z);
        assert_eq!(symplectic_product(&x, &x).unwrap(), 0);
        assert_eq!(symplectic_product(&x, &z).unwrap(), 1);
        assert_eq!(x.mul(&z), SymplecticPauli::single(1, 0, Pauli::Y));
        assert!(symplectic_product(&x, &SymplecticPauli::identity(2)).is_err());
    }

    #[test]
    fn star_and_adjacent_plaquette_commute() {
        let t = ToricLayout::new(3).unwrap();
        let s = SymplecticPauli::from_term(&t.stars()[4]);
        for p in t.plaquettes() {
            assert_eq!(symplectic_product(&s, &SymplecticPauli::from_term(&p)).unwrap(), 0);
        }
    }

    #[test]
    fn words_span_more_than_64_qubits() {
        let a = parse(130, &[(3, Pauli::X), (70, Pauli::Z), (129, Pauli::Y)]);
        let b = parse(130, &[(70, Pauli::X), (129, Pauli::Y)]);
        assert_eq!(a.weight(), 3);
        assert_eq!(symplectic_product(&a, &b).unwrap(), 1);
        assert_eq!(a.to_string(), "X(3) Z(70) Y(129)");
        assert_eq!(SymplecticPauli::from_term(&a.to_term()), a);
    }

    proptest! {
        #[test]
        fn symplectic_product_matches_term_commutation(
            a in proptest::collection::vec(0u8..4, 6),
            b in proptest::collection::vec(0u8..4, 6),
        ) {
            let to = |v: &[u8]| {
                let letters: Vec<(usize, Pauli)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| **l > 0)
                    .map(|(q, l)| (q, Pauli::ALL[*l as usize - 1]))
                    .collect();
                PauliTerm::new(6, letters, crate::linalg::ONE).unwrap()
            };
            let (ta, tb) = (to(&a), to(&b));
            let s = symplectic_product(&SymplecticPauli::from_term(&ta), &SymplecticPauli::from_term(&tb)).unwrap();
            prop_assert_eq!(s == 0, ta.commutes(&tb));
        }
    }

    #[test]
    fn toric_l2_group() {
        let g = toric_generators(2).unwrap();
        assert_eq!(g.generators().len(), 6);
        assert_eq!(g.rank(), 6);
        assert_eq!(g.logical_qubits(), 2);
        for s in g.generators() {
            assert!(in_group(s, &g));
        }
        assert!(in_group(&SymplecticPauli::identity(8), &g));
        assert!(!in_group(&SymplecticPauli::single(8, 0, Pauli::X), &g));
        // the dropped star is the product of the others
        let dropped = SymplecticPauli::from_term(&ToricLayout::new(2).unwrap().stars()[3]);
        assert!(in_group(&dropped, &g));
        let logical = SymplecticPauli::from_term(&ToricLayout::new(2).unwrap().logical_z_row());
        assert!(!in_group(&logical, &g));
    }

    #[test]
    fn membership_matches_brute_force_span() {
        let g = toric_generators(2).unwrap();
        let gens = g.generators();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..1 << gens.len() {
            let mut p = SymplecticPauli::identity(8);
            for (i, s) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p = p.mul(s);
                }
            }
            span.insert(p);
        }
        assert_eq!(span.len(), 64);
        for w in 1..=3 {
            for sites in combinations(8, w) {
                for code in 0..3usize.pow(w as u32) {
                    let mut p = SymplecticPauli::identity(8);
                    let mut c = code;
                    for &q in &sites {
                        p.set(q, Some(Pauli::ALL[c % 3]));
                        c /= 3;
                    }
                    assert_eq!(in_group(&p, &g), span.contains(&p), "{p}");
                }
            }
        }
    }

    #[test]
    fn toric_generator_counts() {
        for l in 2..=5 {
            let g = toric_generators(l).unwrap();
            assert_eq!(g.n_qubits(), 2 * l * l);
            assert_eq!(g.rank(), 2 * l * l - 2);
        }
        assert!(toric_generators(1).is_err());
    }

    #[test]
    fn anticommuting_generators_rejected() {
        let gens = vec![SymplecticPauli::single(1, 0, Pauli::X), SymplecticPauli::single(1, 0, Pauli::Z)];
        assert!(matches!(StabilizerGroup::new(1, gens), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn toric_l2_distance_two() {
        let g = toric_generators(2).unwrap();
        let c1 = certify_stabilizer_blindness(&g, 1).unwrap();
        assert!(c1.passed);
        assert_eq!(c1.checked, 24);
        let c2 = certify_stabilizer_blindness(&g, 2).unwrap();
        assert!(!c2.passed);
        match c2.witness.unwrap() {
            Witness::Logical { pauli, weight } => {
                assert_eq!(weight, 2);
                assert_eq!(pauli, "X(0) X(2)");
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn repetition_z_group_fails_at_weight_one() {
        let zz = |a, b| parse(3, &[(a, Pauli::Z), (b, Pauli::Z)]);
        let g = StabilizerGroup::new(3, vec![zz(0, 1), zz(1, 2)]).unwrap();
        let c = certify_stabilizer_blindness(&g, 1).unwrap();
        assert!(!c.passed);
        assert_eq!(
            c.witness,
            Some(Witness::Logical {
                pauli: "Z(0)".into(),
                weight: 1
            })
        );
    }

    #[test]
    fn toric_l3_is_two_blind_not_three() {
        let g = toric_generators(3).unwrap();
        let c = certify_stabilizer_blindness(&g, 2).unwrap();
        assert!(c.passed);
        assert_eq!(c.checked, candidate_count(18, 2));
        assert!(!certify_stabilizer_blindness(&g, 3).unwrap().passed);
    }

    #[test]
    fn bad_m() {
        let g = toric_generators(2).unwrap();
        assert!(certify_stabilizer_blindness(&g, 0).is_err());
        assert!(matches!(
            certify_stabilizer_blindness(&g, 9),
            Err(Error::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_count(8, 1), 24);
        assert_eq!(candidate_count(8, 2), 24 + 28 * 9);
        assert_eq!(candidate_count(50, 4), 19_194_675);
    }
}

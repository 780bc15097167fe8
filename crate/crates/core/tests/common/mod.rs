#![allow(dead_code)]

use qmarginal::lattice::{build_compass, build_logical_z, CompassParams};
use qmarginal::pauli::OperatorSum;
use qmarginal::spectral::{ground_space, GroundSpace, DEFAULT_DEGENERACY_TOL};

pub fn compass_ground() -> (OperatorSum, GroundSpace) {
    let h = build_compass(&CompassParams::bacon_shor_3x3()).unwrap();
    let gs = ground_space(&h, DEFAULT_DEGENERACY_TOL)
        .unwrap()
        .gauge_fixed(&build_logical_z(0, 3).unwrap())
        .unwrap();
    (h, gs)
}

/// Compass Hamiltonian assembled straight from bit operations, without the
/// Pauli-term machinery. Site `s` of an `n×n` grid is bit `n²−1−s`.
pub fn compass_matrix_by_bits(n: usize, jx: f64, jz: f64, cyclic: bool) -> Vec<Vec<f64>> {
    let ns = n * n;
    let dim = 1usize << ns;
    let bit = |s: usize| 1usize << (ns - 1 - s);
    let mut bonds_x = Vec::new();
    let mut bonds_z = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if cyclic || r + 1 < n {
                bonds_x.push((r * n + c, ((r + 1) % n) * n + c));
            }
            if cyclic || c + 1 < n {
                bonds_z.push((r * n + c, r * n + (c + 1) % n));
            }
        }
    }
    let mut h = vec![vec![0.0; dim]; dim];
    for b in 0..dim {
        for &(s, t) in &bonds_z {
            let same = (b & bit(s) != 0) == (b & bit(t) != 0);
            h[b][b] -= jz * if same { 1.0 } else { -1.0 };
        }
        for &(s, t) in &bonds_x {
            h[b ^ bit(s) ^ bit(t)][b] -= jx;
        }
    }
    h
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    v.sort_by(f64::total_cmp);
    v
}

//! Smith and Hermite forms against determinantal divisors and direct checks.

use glattice::int::Int;
use glattice::matrix::Matrix;
use glattice::normal_form::{hnf_rows, invariant_factors, kernel, smith, solve};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Plain Smith form: diagonalize by repeated row and column reduction
/// around the smallest entry, then fix the divisibility chain with
/// gcd/lcm swaps.
fn naive_smith(a: &[Vec<i64>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let (rows, cols) = (m.len(), m[0].len());
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !m[i][j].is_zero() && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            for r in m.iter_mut() {
                r.swap(t, bj);
            }
            let p = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&p);
                for j in t..cols {
                    let v = &m[t][j] * &q;
                    m[i][j] -= v;
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = m[t][j].div_floor(&p);
                for i in t..rows {
                    let v = &m[i][t] * &q;
                    m[i][j] -= v;
                }
                clean &= m[t][j].is_zero();
            }
            if clean {
                diag.push(p.abs());
                break;
            }
        }
    }
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let (g, l) = (diag[i].gcd(&diag[j]), diag[i].lcm(&diag[j]));
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag.into_iter().filter(|d| !d.is_zero()).collect()
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det_i128(&minor)
        })
        .sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
            s.push(last);
            s
        }))
        .collect()
}

/// Invariant factors as ratios of gcds of k x k minors.
fn determinantal_invariants(a: &[Vec<i64>]) -> Vec<i128> {
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=r.min(c) {
        let mut d = 0i128;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let m: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
                d = gcd(d, det_i128(&m));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_matches_determinantal_divisors(a in matrix_strategy()) {
        let m = Matrix::from_rows(&a);
        let got: Vec<i128> = invariant_factors(&m).iter().map(|x| x.to_i64().unwrap() as i128).collect();
        prop_assert_eq!(got, determinantal_invariants(&a));
    }

    #[test]
    fn smith_matches_naive_reduction(a in prop::collection::vec(prop::collection::vec(-9i64..=9, 6), 6)) {
        let got: Vec<BigInt> = invariant_factors(&Matrix::from_rows(&a)).iter().map(|x| x.to_big()).collect();
        prop_assert_eq!(got, naive_smith(&a));
    }

    #[test]
    fn smith_transforms_diagonalize(a in matrix_strategy()) {
        let m = Matrix::from_rows(&a);
        let s = smith(&m);
        let d = s.u().mul(&m).mul(s.v());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expected = if i == j && i < s.invariants().len() { s.invariants()[i].clone() } else { Int::ZERO };
                prop_assert_eq!(&d[(i, j)], &expected);
            }
        }
        prop_assert!(s.u().mul(s.u_inv()).is_identity());
        prop_assert!(s.v().mul(s.v_inv()).is_identity());
    }

    #[test]
    fn hermite_form_keeps_the_row_lattice(a in matrix_strategy()) {
        let m = Matrix::from_rows(&a);
        let h = hnf_rows(&m);
        // same row lattice: each generates the other
        if h.rows() > 0 {
            prop_assert!(solve(&h.transpose(), &m.transpose()).is_some());
            prop_assert!(solve(&m.transpose(), &h.transpose()).is_some());
        } else {
            prop_assert!(m.is_zero());
        }
    }

    #[test]
    fn kernel_is_annihilated_and_saturated(a in matrix_strategy()) {
        let m = Matrix::from_rows(&a);
        let k = kernel(&m);
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(k.cols() + glattice::normal_form::rank(&m), m.cols());
        if k.cols() > 0 {
            prop_assert!(glattice::normal_form::is_saturated(&k));
        }
    }
}

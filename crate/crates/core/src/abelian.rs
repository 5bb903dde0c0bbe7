//! Finitely generated abelian groups in invariant-factor form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::matrix::Matrix;
use crate::normal_form::{hnf_columns, kernel, smith_with, solve};

/// `Z/d_1 + ... + Z/d_k + Z^free_rank` with `1 < d_1 | d_2 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupStructure {
    pub torsion: Vec<Int>,
    pub free_rank: usize,
}

impl AbelianGroupStructure {
    /// Canonicalize an arbitrary list of cyclic orders (entries equal to 0
    /// count as free summands, entries equal to 1 are dropped).
    pub fn new(orders: Vec<Int>, free_rank: usize) -> AbelianGroupStructure {
        let mut free = free_rank;
        let mut finite: Vec<Int> = Vec::new();
        for d in orders {
            let d = d.abs();
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                finite.push(d);
            }
        }
        let chained = finite.windows(2).all(|w| w[0].divides(&w[1]));
        let torsion = if chained {
            finite
        } else {
            let n = finite.len();
            let mut diag = Matrix::zeros(n, n);
            for (i, d) in finite.into_iter().enumerate() {
                diag[(i, i)] = d;
            }
            let s = smith_with(&diag, false, false);
            s.diag.into_iter().filter(|d| !d.is_one()).collect()
        };
        AbelianGroupStructure { torsion, free_rank: free }
    }

    pub fn trivial() -> AbelianGroupStructure {
        AbelianGroupStructure { torsion: vec![], free_rank: 0 }
    }

    /// Finite group with the given cyclic factors.
    pub fn finite(orders: &[i64]) -> AbelianGroupStructure {
        AbelianGroupStructure::new(orders.iter().map(|&d| Int::from(d)).collect(), 0)
    }

    pub fn free(rank: usize) -> AbelianGroupStructure {
        AbelianGroupStructure { torsion: vec![], free_rank: rank }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(Int::ONE, |a, d| a * d))
    }

    /// Smallest positive integer annihilating the torsion part.
    pub fn exponent(&self) -> Int {
        self.torsion.last().cloned().unwrap_or(Int::ONE)
    }

    pub fn direct_sum(&self, other: &AbelianGroupStructure) -> AbelianGroupStructure {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        AbelianGroupStructure::new(t, self.free_rank + other.free_rank)
    }

    pub fn torsion_part(&self) -> AbelianGroupStructure {
        AbelianGroupStructure { torsion: self.torsion.clone(), free_rank: 0 }
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Kernel of the homomorphism `(+) Z/s_i -> (+) Z/t_j` given on generators by
/// the integer matrix `a` (`t_j = 0` means a free target summand). The map
/// must be well defined, i.e. `s_i * a e_i` must vanish in the target.
pub fn finite_hom_kernel(src: &[Int], tgt: &[Int], a: &Matrix) -> AbelianGroupStructure {
    let k = src.len();
    let m = tgt.len();
    assert_eq!(a.cols(), k);
    assert_eq!(a.rows(), m);
    if k == 0 {
        return AbelianGroupStructure::trivial();
    }
    // K = {x : a x in T Z^m} is the projection of ker [a | -T]
    let mut big = Matrix::zeros(m, k + m);
    big.set_block(0, 0, a);
    for (j, t) in tgt.iter().enumerate() {
        big[(j, k + j)] = -t;
    }
    let ker = kernel(&big);
    let mut gens = ker.block(0, 0, k, ker.cols());
    // K contains diag(s) Z^k; include it so the basis has full rank even
    // when the kernel computation returns a degenerate projection
    let mut sdiag = Matrix::zeros(k, k);
    for (i, s) in src.iter().enumerate() {
        sdiag[(i, i)] = s.clone();
    }
    gens = Matrix::hstack(&[&gens, &sdiag]);
    let basis = hnf_columns(&gens);
    assert_eq!(basis.cols(), k, "finite source must give a full-rank kernel lattice");
    let rel = solve(&basis, &sdiag).expect("source relations lie in the kernel lattice");
    let s = smith_with(&rel, false, false);
    AbelianGroupStructure::new(s.diag[..s.rank].to_vec(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let g = AbelianGroupStructure::new(vec![Int::from(6), Int::from(4), Int::ONE], 0);
        assert_eq!(g, AbelianGroupStructure::finite(&[2, 12]));
        assert_eq!(g.to_string(), "Z/2 + Z/12");
        assert_eq!(g.order(), Some(Int::from(24)));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"torsion":[2,12],"free_rank":0}"#);
    }

    #[test]
    fn kernel_of_doubling() {
        // Z/4 -> Z/4, x -> 2x has kernel Z/2
        let k = finite_hom_kernel(&[Int::from(4)], &[Int::from(4)], &Matrix::from_rows(&[[2]]));
        assert_eq!(k, AbelianGroupStructure::finite(&[2]));
        // Z/2 + Z/2 -> Z/2, (x, y) -> x + y has kernel Z/2
        let k = finite_hom_kernel(
            &[Int::from(2), Int::from(2)],
            &[Int::from(2)],
            &Matrix::from_rows(&[[1, 1]]),
        );
        assert_eq!(k, AbelianGroupStructure::finite(&[2]));
        // zero map keeps everything
        let k = finite_hom_kernel(&[Int::from(3)], &[], &Matrix::zeros(0, 1));
        assert_eq!(k, AbelianGroupStructure::finite(&[3]));
    }
}

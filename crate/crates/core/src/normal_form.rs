//! Smith and Hermite normal forms and the lattice operations built on them:
//! kernels, saturation, solving `A X = B` over the integers, and one-sided
//! inverses of split maps.

use crate::abelian::AbelianGroupStructure;
use crate::int::Int;
use crate::matrix::Matrix;

/// Result of a Smith normal form computation: `U * A * V = diag(d)`.
///
/// `diag` has length `min(rows, cols)`, is nonnegative, satisfies the
/// divisibility chain, and its first `rank` entries are nonzero. Transforms
/// are present only when requested.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Int>,
    pub rank: usize,
    pub u: Option<Matrix>,
    pub u_inv: Option<Matrix>,
    pub v: Option<Matrix>,
    pub v_inv: Option<Matrix>,
}

impl Smith {
    pub fn u(&self) -> &Matrix {
        self.u.as_ref().expect("left transform not computed")
    }
    pub fn u_inv(&self) -> &Matrix {
        self.u_inv.as_ref().expect("left transform not computed")
    }
    pub fn v(&self) -> &Matrix {
        self.v.as_ref().expect("right transform not computed")
    }
    pub fn v_inv(&self) -> &Matrix {
        self.v_inv.as_ref().expect("right transform not computed")
    }

    /// Nonzero invariant factors.
    pub fn invariants(&self) -> &[Int] {
        &self.diag[..self.rank]
    }
}

struct Work {
    m: usize,
    n: usize,
    a: Vec<Int>,
    u: Option<(Matrix, Matrix)>,
    v: Option<(Matrix, Matrix)>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> &Int {
        &self.a[i * self.n + j]
    }

    /// row_i += c * row_k
    fn row_add(&mut self, i: usize, k: usize, c: &Int, from: usize) {
        let n = self.n;
        for j in from..n {
            if !self.a[k * n + j].is_zero() {
                let src = self.a[k * n + j].clone();
                self.a[i * n + j].add_mul(c, &src);
            }
        }
        if let Some((u, ui)) = self.u.as_mut() {
            for j in 0..u.cols() {
                if !u[(k, j)].is_zero() {
                    let src = u[(k, j)].clone();
                    u[(i, j)].add_mul(c, &src);
                }
            }
            for r in 0..ui.rows() {
                if !ui[(r, i)].is_zero() {
                    let src = ui[(r, i)].clone();
                    ui[(r, k)].sub_mul(c, &src);
                }
            }
        }
    }

    /// col_j += c * col_k
    fn col_add(&mut self, j: usize, k: usize, c: &Int, from: usize) {
        let n = self.n;
        for i in from..self.m {
            if !self.a[i * n + k].is_zero() {
                let src = self.a[i * n + k].clone();
                self.a[i * n + j].add_mul(c, &src);
            }
        }
        if let Some((v, vi)) = self.v.as_mut() {
            for r in 0..v.rows() {
                if !v[(r, k)].is_zero() {
                    let src = v[(r, k)].clone();
                    v[(r, j)].add_mul(c, &src);
                }
            }
            for col in 0..vi.cols() {
                if !vi[(j, col)].is_zero() {
                    let src = vi[(j, col)].clone();
                    vi[(k, col)].sub_mul(c, &src);
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        let n = self.n;
        for j in 0..n {
            self.a.swap(i * n + j, k * n + j);
        }
        if let Some((u, ui)) = self.u.as_mut() {
            u.swap_rows(i, k);
            ui.swap_cols(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        let n = self.n;
        for i in 0..self.m {
            self.a.swap(i * n + j, i * n + k);
        }
        if let Some((v, vi)) = self.v.as_mut() {
            v.swap_cols(j, k);
            vi.swap_rows(j, k);
        }
    }

    fn negate_row(&mut self, i: usize) {
        let n = self.n;
        for j in 0..n {
            let x = -&self.a[i * n + j];
            self.a[i * n + j] = x;
        }
        if let Some((u, ui)) = self.u.as_mut() {
            for j in 0..u.cols() {
                let x = -&u[(i, j)];
                u[(i, j)] = x;
            }
            for r in 0..ui.rows() {
                let x = -&ui[(r, i)];
                ui[(r, i)] = x;
            }
        }
    }

    /// Replace diagonal entries `a = d_i`, `b = d_j` by `gcd, lcm` using the
    /// 2x2 transforms `U = [[x, y], [-b/g, a/g]]`, `V = [[1, -yb/g], [1, xa/g]]`.
    fn gcd_lcm(&mut self, i: usize, j: usize) {
        let a = self.at(i, i).clone();
        let b = self.at(j, j).clone();
        let (g, x, y) = Int::extended_gcd(&a, &b);
        let ag = a.div_exact(&g);
        let bg = b.div_exact(&g);
        let n = self.n;
        self.a[i * n + i] = g;
        self.a[j * n + j] = &ag * &b;
        if let Some((u, ui)) = self.u.as_mut() {
            // rows i, j of U: [x, y; -b/g, a/g]
            for c in 0..u.cols() {
                let ri = u[(i, c)].clone();
                let rj = u[(j, c)].clone();
                u[(i, c)] = &(&x * &ri) + &(&y * &rj);
                u[(j, c)] = &(&ag * &rj) - &(&bg * &ri);
            }
            // columns i, j of U^-1 times [a/g, -y; b/g, x]
            for r in 0..ui.rows() {
                let ci = ui[(r, i)].clone();
                let cj = ui[(r, j)].clone();
                ui[(r, i)] = &(&ci * &ag) + &(&cj * &bg);
                ui[(r, j)] = &(&cj * &x) - &(&ci * &y);
            }
        }
        if let Some((v, vi)) = self.v.as_mut() {
            // columns i, j of V times [1, -yb/g; 1, xa/g]
            let p = -(&y * &bg);
            let q = &x * &ag;
            for r in 0..v.rows() {
                let ci = v[(r, i)].clone();
                let cj = v[(r, j)].clone();
                v[(r, i)] = &ci + &cj;
                v[(r, j)] = &(&ci * &p) + &(&cj * &q);
            }
            // rows i, j of V^-1: [xa/g, yb/g; -1, 1]
            let yb = &y * &bg;
            for c in 0..vi.cols() {
                let ri = vi[(i, c)].clone();
                let rj = vi[(j, c)].clone();
                vi[(i, c)] = &(&q * &ri) + &(&yb * &rj);
                vi[(j, c)] = &rj - &ri;
            }
        }
    }
}

/// Smith normal form with all four transforms.
pub fn smith(a: &Matrix) -> Smith {
    smith_with(a, true, true)
}

/// Smith normal form computing only the requested transforms.
pub fn smith_with(a: &Matrix, left: bool, right: bool) -> Smith {
    let (m, n) = a.shape();
    let mut w = Work {
        m,
        n,
        a: a.data().to_vec(),
        u: left.then(|| (Matrix::identity(m), Matrix::identity(m))),
        v: right.then(|| (Matrix::identity(n), Matrix::identity(n))),
    };
    let steps = m.min(n);
    let mut rank = 0;
    for t in 0..steps {
        // minimal nonzero pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        'search: for i in t..m {
            for j in t..n {
                let v = w.at(i, j);
                if v.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if v.cmp_abs(w.at(bi, bj)) == std::cmp::Ordering::Less {
                            best = Some((i, j));
                        }
                    }
                }
                if v.is_unit() {
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if w.at(i, t).is_zero() {
                    continue;
                }
                let q = w.at(i, t).div_round(w.at(t, t));
                if !q.is_zero() {
                    w.row_add(i, t, &-q, t);
                }
                if !w.at(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if w.at(t, j).is_zero() {
                    continue;
                }
                let q = w.at(t, j).div_round(w.at(t, t));
                if !q.is_zero() {
                    w.col_add(j, t, &-q, t);
                }
                if !w.at(t, j).is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // bring the smallest leftover in row/column t to the pivot
            let mut best = (t, t);
            for i in t + 1..m {
                if !w.at(i, t).is_zero() && w.at(i, t).cmp_abs(w.at(best.0, best.1)).is_lt() {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                if !w.at(t, j).is_zero() && w.at(t, j).cmp_abs(w.at(best.0, best.1)).is_lt() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                w.swap_rows(t, best.0);
            } else if best.1 != t {
                w.swap_cols(t, best.1);
            }
        }
        rank = t + 1;
    }
    for i in 0..rank {
        if w.at(i, i).is_negative() {
            w.negate_row(i);
        }
    }
    for i in 0..rank {
        for j in i + 1..rank {
            if !w.at(i, i).divides(w.at(j, j)) {
                w.gcd_lcm(i, j);
            }
        }
    }
    let diag = (0..steps).map(|i| w.at(i, i).clone()).collect();
    let (u, u_inv) = match w.u {
        Some((u, ui)) => (Some(u), Some(ui)),
        None => (None, None),
    };
    let (v, v_inv) = match w.v {
        Some((v, vi)) => (Some(v), Some(vi)),
        None => (None, None),
    };
    Smith { diag, rank, u, u_inv, v, v_inv }
}

/// Nonzero invariant factors of `a` (including those equal to 1).
pub fn invariant_factors(a: &Matrix) -> Vec<Int> {
    let s = smith_with(a, false, false);
    s.diag[..s.rank].to_vec()
}

pub fn rank(a: &Matrix) -> usize {
    smith_with(a, false, false).rank
}

/// Structure of `Z^rows / (column span of a)`.
pub fn cokernel(a: &Matrix) -> AbelianGroupStructure {
    let s = smith_with(a, false, false);
    AbelianGroupStructure::new(s.diag[..s.rank].to_vec(), a.rows() - s.rank)
}

/// Torsion subgroup of the cokernel of `a`.
pub fn cokernel_torsion(a: &Matrix) -> AbelianGroupStructure {
    let s = smith_with(a, false, false);
    AbelianGroupStructure::new(s.diag[..s.rank].to_vec(), 0)
}

/// Row-style Hermite normal form: the nonzero rows of the unique echelon
/// basis of the row lattice, with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf_rows(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<Int>> = a.to_rows();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in w.iter().enumerate().skip(r) {
                if row[col].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| row[col].cmp_abs(&w[b][col]).is_lt()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            w.swap(r, b);
            let mut clean = true;
            for i in r + 1..m {
                if w[i][col].is_zero() {
                    continue;
                }
                let q = w[i][col].div_floor(&w[r][col]);
                let (head, tail) = w.split_at_mut(i);
                let pivot_row = &head[r];
                for (x, p) in tail[0].iter_mut().zip(pivot_row).skip(col) {
                    if !p.is_zero() {
                        x.sub_mul(&q, p);
                    }
                }
                if !w[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r < m && !w[r][col].is_zero() {
            if w[r][col].is_negative() {
                for x in w[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let q = w[i][col].div_floor(&w[r][col]);
                if q.is_zero() {
                    continue;
                }
                let (head, tail) = w.split_at_mut(r);
                for (x, p) in head[i].iter_mut().zip(&tail[0]).skip(col) {
                    if !p.is_zero() {
                        x.sub_mul(&q, p);
                    }
                }
            }
            r += 1;
        }
    }
    w.truncate(r);
    Matrix::from_int_rows(w, n)
}

/// Canonical basis (as columns) of the lattice spanned by the columns of `b`.
pub fn hnf_columns(b: &Matrix) -> Matrix {
    hnf_rows(&b.transpose()).transpose()
}

/// Saturated basis (columns) of `{x : a x = 0}`, in Hermite form.
pub fn kernel(a: &Matrix) -> Matrix {
    let n = a.cols();
    if a.rows() == 0 {
        return Matrix::identity(n);
    }
    let s = smith_with(a, false, true);
    let idx: Vec<usize> = (s.rank..n).collect();
    let k = s.v().select_cols(&idx);
    if k.cols() == 0 {
        return Matrix::zeros(n, 0);
    }
    let h = hnf_columns(&k);
    if h.cols() == 0 {
        Matrix::zeros(n, 0)
    } else {
        h
    }
}

/// Solve `a X = b` over the integers; `None` if no integral solution exists.
pub fn solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.rows(), b.rows(), "solve: shape mismatch");
    let s = smith(a);
    solve_with(&s, a.cols(), b)
}

/// Solve using a precomputed Smith form of the coefficient matrix.
pub fn solve_with(s: &Smith, ncols: usize, b: &Matrix) -> Option<Matrix> {
    let ub = s.u().mul(b);
    let mut y = Matrix::zeros(ncols, b.cols());
    for c in 0..b.cols() {
        for i in 0..ub.rows() {
            let val = &ub[(i, c)];
            if i < s.rank {
                if !s.diag[i].divides(val) {
                    return None;
                }
                y[(i, c)] = val.div_exact(&s.diag[i]);
            } else if !val.is_zero() {
                return None;
            }
        }
    }
    Some(s.v().mul(&y))
}

/// True when the columns of `b` are independent and span a saturated
/// sublattice (a direct summand of `Z^rows`).
pub fn is_saturated(b: &Matrix) -> bool {
    let s = smith_with(b, false, false);
    s.rank == b.cols() && s.invariants().iter().all(|d| d.is_one())
}

/// Basis (columns, Hermite form) of the saturation of the column span.
pub fn saturate(b: &Matrix) -> Matrix {
    let s = smith_with(b, true, false);
    let idx: Vec<usize> = (0..s.rank).collect();
    let basis = s.u_inv().select_cols(&idx);
    if basis.cols() == 0 {
        return Matrix::zeros(b.rows(), 0);
    }
    hnf_columns(&basis)
}

/// Left inverse `L` with `L b = I` for a matrix with saturated independent
/// columns.
pub fn left_inverse(b: &Matrix) -> Option<Matrix> {
    let s = smith(b);
    if s.rank != b.cols() || !s.invariants().iter().all(|d| d.is_one()) {
        return None;
    }
    let k = b.cols();
    let proj = Matrix::hstack(&[&Matrix::identity(k), &Matrix::zeros(k, b.rows() - k)]);
    Some(s.v().mul(&proj).mul(s.u()))
}

/// Right inverse `R` with `p R = I` for a surjective integer matrix.
pub fn right_inverse(p: &Matrix) -> Option<Matrix> {
    let s = smith(p);
    if s.rank != p.rows() || !s.invariants().iter().all(|d| d.is_one()) {
        return None;
    }
    let k = p.rows();
    let inc = Matrix::vstack(&[&Matrix::identity(k), &Matrix::zeros(p.cols() - k, k)]);
    Some(s.v().mul(&inc).mul(s.u()))
}

/// Least `e >= 1` with `e v` in the column span of `m`, or `None` when `v`
/// is not even in the rational span.
pub fn least_multiple_in_span(m: &Matrix, v: &[Int]) -> Option<Int> {
    assert_eq!(m.rows(), v.len(), "least_multiple_in_span: shape mismatch");
    let s = smith_with(m, true, false);
    let y = s.u().mul_vec(v);
    let mut e = Int::ONE;
    for (i, yi) in y.iter().enumerate() {
        if i < s.rank {
            let d = &s.diag[i];
            e = e.lcm(&d.div_exact(&d.gcd(yi)));
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(e)
}

pub fn is_unimodular(a: &Matrix) -> bool {
    a.is_square() && a.det().is_unit()
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(a: &Matrix) -> Option<Matrix> {
    if !a.is_square() {
        return None;
    }
    solve(a, &Matrix::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &Matrix) {
        let s = smith(a);
        let prod = s.u().mul(a).mul(s.v());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let expect = if i == j { s.diag[i].clone() } else { Int::ZERO };
                assert_eq!(prod[(i, j)], expect, "U A V not diagonal for {a:?}");
            }
        }
        assert!(s.u().mul(s.u_inv()).is_identity());
        assert!(s.v().mul(s.v_inv()).is_identity());
        for w in s.diag[..s.rank].windows(2) {
            assert!(w[0].divides(&w[1]));
        }
    }

    #[test]
    fn smith_examples() {
        let a = Matrix::from_rows(&[[2, 4], [6, 8]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![Int::from(2), Int::from(4)]);
        check_smith(&a);
        check_smith(&Matrix::from_rows(&[[2, 0], [0, 3]]));
        check_smith(&Matrix::from_rows(&[[0, 0, 0], [0, 0, 0]]));
        check_smith(&Matrix::from_rows(&[[4, 6, 0], [6, 9, 3], [2, 0, 5], [1, 1, 1]]));
        check_smith(&Matrix::zeros(0, 3));
    }

    #[test]
    fn divisibility_fixup() {
        let a = Matrix::from_rows(&[[4, 0, 0], [0, 6, 0], [0, 0, 10]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![Int::from(2), Int::from(2), Int::from(60)]);
        check_smith(&a);
    }

    #[test]
    fn kernel_and_solve() {
        let a = Matrix::from_rows(&[[1, 2, 3], [2, 4, 6]]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        assert!(is_saturated(&k));
        let b = Matrix::from_rows(&[[5], [10]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
        assert!(solve(&a, &Matrix::from_rows(&[[1], [1]])).is_none());
        let two = Matrix::from_rows(&[[2]]);
        assert!(solve(&two, &Matrix::from_rows(&[[3]])).is_none());
    }

    #[test]
    fn hermite_is_canonical() {
        let a = Matrix::from_rows(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
        let b = Matrix::from_rows(&[[2, 4, 4], [-4, 10, 16], [10, -4, -16]]);
        // b differs by adding row 0 to row 1, same row lattice
        assert_eq!(hnf_rows(&a), hnf_rows(&b));
        let h = hnf_rows(&a);
        assert!(h[(0, 0)] > Int::ZERO);
    }

    #[test]
    fn one_sided_inverses() {
        let b = Matrix::from_rows(&[[1, 0], [1, 1], [2, 3]]);
        let l = left_inverse(&b).unwrap();
        assert!(l.mul(&b).is_identity());
        let p = b.transpose();
        let r = right_inverse(&p).unwrap();
        assert!(p.mul(&r).is_identity());
        assert!(left_inverse(&Matrix::from_rows(&[[2], [0]])).is_none());
    }

    #[test]
    fn saturation() {
        let b = Matrix::from_rows(&[[2], [4]]);
        assert!(!is_saturated(&b));
        let s = saturate(&b);
        assert_eq!(s, Matrix::from_rows(&[[1], [2]]));
    }
}

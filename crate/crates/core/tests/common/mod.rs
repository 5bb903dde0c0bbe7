#![allow(dead_code)]

use glattice::groups::named::*;
use glattice::groups::{GSet, Group, Subgroup, DEFAULT_SUBGROUP_BOUND};
use glattice::int::Int;
use glattice::lattices::{augmentation_ideal, chevalley_lattice, ExactSequence, GLattice};
use glattice::matrix::Matrix;
use glattice::normal_form::kernel;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const B: usize = DEFAULT_SUBGROUP_BOUND;

/// Groups of order at most 12.
pub fn small_groups() -> Vec<Group> {
    vec![
        cyclic(2),
        cyclic(3),
        cyclic(4),
        klein_four(),
        cyclic(5),
        cyclic(6),
        symmetric(3),
        dihedral(4),
        quaternion(),
        alternating(4),
        dihedral(6),
    ]
}

pub fn random_subgroup(g: &Group, rng: &mut ChaCha8Rng) -> Subgroup {
    g.subgroup_classes(B).unwrap().choose(rng).unwrap().clone()
}

/// `Z`, `Z[G/H]`, `I_{G/H}` or `J_{G/H}` of rank at most `max_rank`.
pub fn random_basic(g: &Group, rng: &mut ChaCha8Rng, max_rank: usize) -> GLattice {
    loop {
        let h = random_subgroup(g, rng);
        let x = GSet::cosets(&h);
        let m = match rng.gen_range(0..4) {
            0 => GLattice::trivial(g, 1),
            1 => GLattice::permutation(&x),
            2 => augmentation_ideal(&x).unwrap(),
            _ => chevalley_lattice(&x).unwrap(),
        };
        if (1..=max_rank).contains(&m.rank()) {
            return m;
        }
    }
}

/// Product of a few elementary matrices together with its inverse.
pub fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> (Matrix, Matrix) {
    let mut u = Matrix::identity(n);
    let mut v = Matrix::identity(n);
    if n < 2 {
        return (u, v);
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(-2i64..=2);
        let mut e = Matrix::identity(n);
        e[(i, j)] = Int::from(c);
        let mut f = Matrix::identity(n);
        f[(i, j)] = Int::from(-c);
        u = e.mul(&u);
        v = v.mul(&f);
    }
    (u, v)
}

/// The same lattice written in a random basis.
pub fn rebase(m: &GLattice, rng: &mut ChaCha8Rng) -> GLattice {
    let (u, v) = random_unimodular(m.rank(), rng);
    let gens = m.generator_matrices().iter().map(|a| u.mul(a).mul(&v)).collect();
    GLattice::with_rank(m.group().clone(), m.rank(), gens).unwrap()
}

/// A direct sum of one or two basic lattices in a random basis.
pub fn random_lattice(g: &Group, rng: &mut ChaCha8Rng, max_rank: usize) -> GLattice {
    let a = random_basic(g, rng, max_rank);
    let m = if a.rank() < max_rank && rng.gen_bool(0.5) {
        let b = random_basic(g, rng, max_rank - a.rank());
        GLattice::direct_sum(&[&a, &b]).unwrap()
    } else {
        a
    };
    rebase(&m, rng)
}

/// `0 -> ker phi -> M -> M / ker phi -> 0` for a random equivariant
/// `phi: M -> N`, with both ends nonzero.
pub fn random_extension(g: &Group, rng: &mut ChaCha8Rng, max_rank: usize) -> ExactSequence {
    loop {
        let m = random_lattice(g, rng, max_rank);
        let n = random_lattice(g, rng, max_rank);
        let maps = GLattice::equivariant_maps(&m, &n).unwrap();
        if maps.is_empty() {
            continue;
        }
        let mut phi = Matrix::zeros(n.rank(), m.rank());
        for h in &maps {
            phi = phi.add(&h.scale(&Int::from(rng.gen_range(-2i64..=2))));
        }
        let k = kernel(&phi);
        if k.cols() == 0 || k.cols() == m.rank() {
            continue;
        }
        let (_, incl) = m.sublattice(&k).unwrap();
        let (_, proj) = m.quotient(&k).unwrap();
        return ExactSequence::short(incl, proj).unwrap();
    }
}

/// Index of `g^k` for the element `g`.
pub fn power(g: &Group, e: usize, k: usize) -> usize {
    (0..k).fold(0, |acc, _| g.mul(acc, e))
}

/// Independent construction of `rho_J(g)` on the basis dual to
/// `e_x - e_{x0}`, `x != x0`.
pub fn chevalley_action(x: &GSet, e: usize) -> Matrix {
    let n = x.size();
    let mut i = Matrix::zeros(n - 1, n - 1);
    let g = x.group();
    let ginv = g.inv(e);
    for col in 1..n {
        let (a, b) = (x.act(ginv, col), x.act(ginv, 0));
        if a != 0 {
            i[(a - 1, col - 1)] = &i[(a - 1, col - 1)] + &Int::from(1);
        }
        if b != 0 {
            i[(b - 1, col - 1)] = &i[(b - 1, col - 1)] - &Int::from(1);
        }
    }
    i.transpose()
}

pub fn permutation_matrix(x: &GSet, e: usize) -> Matrix {
    let n = x.size();
    let mut p = Matrix::zeros(n, n);
    for pt in 0..n {
        p[(x.act(e, pt), pt)] = Int::from(1);
    }
    p
}

/// Whether `a` intertwines the two actions on every group element.
pub fn intertwines(a: &Matrix, src: &GLattice, tgt: &GLattice) -> bool {
    (0..src.group().order()).all(|e| tgt.matrix(e).mul(a) == a.mul(&src.matrix(e)))
}

pub fn is_unit_det(a: &Matrix) -> bool {
    a.is_square() && a.det().abs().is_one()
}

/// Every Sylow subgroup cyclic, by brute force over element orders.
pub fn sylow_cyclic_oracle(g: &Group) -> bool {
    let n = g.order();
    let elements = g.elements();
    let order_of = |p: &glattice::groups::Perm| {
        let mut q = p.clone();
        let mut k = 1;
        while !q.is_identity() {
            q = q.compose(p);
            k += 1;
        }
        k
    };
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            let mut pa = 1;
            while m % p == 0 {
                m /= p;
                pa *= p;
            }
            if !elements.iter().any(|e| order_of(e) == pa) {
                return false;
            }
        }
        p += 1;
    }
    true
}

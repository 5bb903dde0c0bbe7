//! Group cohomology of G-lattices: `H^0`, `H^1`, `H^2`, Tate `H^-1` and
//! `H^0`, flabby/coflabby tests and the kernel `Sha^2_omega` of restriction
//! to cyclic subgroups.
//!
//! For a lattice `M` and `n >= 1` the group `H^n(H, M)` is finite, so the
//! cocycles `Z^n` are the saturation of the coboundaries `B^n` inside the
//! cochains. Hence `H^n = torsion(C^n / B^n)`, which only needs the Smith
//! form of the single coboundary map `d^{n-1}`.

use serde::{Deserialize, Serialize};

use crate::abelian::{finite_hom_kernel, AbelianGroupStructure};
use crate::error::{input, Error, Result};
use crate::groups::Subgroup;
use crate::int::Int;
use crate::lattices::GLattice;
use crate::matrix::Matrix;
use crate::normal_form::{cokernel, cokernel_torsion, kernel, smith_with, solve, Smith};

/// Default bound on `|H|` for the second cohomology route.
pub const DEFAULT_H2_BOUND: usize = 24;

fn check_subgroup(m: &GLattice, h: &Subgroup) -> Result<()> {
    if !h.parent().same_as(m.group()) {
        return input("subgroup of a different group than the lattice");
    }
    Ok(())
}

/// `H^0(H, M) = M^H`: rank and a saturated basis.
pub fn h0(m: &GLattice, h: &Subgroup) -> Result<(usize, Matrix)> {
    check_subgroup(m, h)?;
    let b = m.fixed_points(h);
    Ok((b.cols(), b))
}

/// Stacked `rho(h_i) - 1` over the subgroup generators: the coboundary
/// `M -> C^1` followed by evaluation at the generators.
fn generator_coboundary(m: &GLattice, h: &Subgroup) -> Matrix {
    let r = m.rank();
    let id = Matrix::identity(r);
    let blocks: Vec<Matrix> = m.subgroup_generator_matrices(h).iter().map(|a| a.sub(&id)).collect();
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::vstack_with_cols(&refs, r)
}

/// `H^1(H, M)`. A 1-cocycle is determined by its values on generators and
/// the cocycles form a saturated sublattice of `M^k`, so `H^1` is the
/// torsion of `M^k / B^1`.
pub fn h1(m: &GLattice, h: &Subgroup) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    if h.generators().is_empty() {
        return Ok(AbelianGroupStructure::trivial());
    }
    Ok(cokernel_torsion(&generator_coboundary(m, h)))
}

/// `H^1(H, M)` from normalized bar cochains, computing `Z^1 = ker d^1`
/// explicitly and taking `Z^1 / B^1`. Slower than `h1`; used to cross-check.
pub fn h1_bar(m: &GLattice, h: &Subgroup, bound: usize) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    if h.order() > bound {
        return Err(Error::Resource(format!("|H| = {} exceeds the bar-cochain bound {bound}", h.order())));
    }
    let r = m.rank();
    let els: Vec<usize> = h.elements()[1..].to_vec();
    let k = els.len();
    if k == 0 || r == 0 {
        return Ok(AbelianGroupStructure::trivial());
    }
    let mats = m.matrices();
    let g = m.group();
    let pos = |e: usize| els.iter().position(|&x| x == e);
    // d^0: m -> (h m - m)_h
    let id = Matrix::identity(r);
    let d0_blocks: Vec<Matrix> = els.iter().map(|&e| mats[e].sub(&id)).collect();
    let d0 = Matrix::vstack(&d0_blocks.iter().collect::<Vec<_>>());
    // d^1 f(a, b) = a f(b) - f(ab) + f(a)
    let mut d1 = Matrix::zeros(k * k * r, k * r);
    for (ia, &a) in els.iter().enumerate() {
        for (ib, &b) in els.iter().enumerate() {
            let row0 = (ia * k + ib) * r;
            add_block(&mut d1, row0, ib * r, &mats[a]);
            if let Some(iab) = pos(g.mul(a, b)) {
                add_block(&mut d1, row0, iab * r, &id.neg());
            }
            add_block(&mut d1, row0, ia * r, &id);
        }
    }
    let z1 = kernel(&d1);
    let coords = solve(&z1, &d0).ok_or_else(|| Error::Input("coboundaries are not cocycles".into()))?;
    Ok(cokernel(&coords))
}

fn add_block(target: &mut Matrix, r0: usize, c0: usize, b: &Matrix) {
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            if !b[(i, j)].is_zero() {
                let v = &target[(r0 + i, c0 + j)] + &b[(i, j)];
                target[(r0 + i, c0 + j)] = v;
            }
        }
    }
}

/// `H^1` of a cyclic group as `ker N / (g - 1) M`.
pub fn h1_cyclic(m: &GLattice, h: &Subgroup) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    let g = h.parent();
    let Some(&gen) = h.elements().iter().find(|&&e| g.element_order(e) == h.order()) else {
        return input("subgroup is not cyclic");
    };
    let r = m.rank();
    let mut norm = Matrix::zeros(r, r);
    for &e in h.elements() {
        norm = norm.add(&m.matrix(e));
    }
    let ker_n = kernel(&norm);
    let img = m.matrix(gen).sub(&Matrix::identity(r));
    if ker_n.cols() == 0 {
        return Ok(AbelianGroupStructure::trivial());
    }
    let coords = solve(&ker_n, &img).ok_or_else(|| Error::Input("(g-1)M not inside ker N".into()))?;
    Ok(cokernel(&coords))
}

/// Normalized bar coboundary `d^1: C^1 -> C^2` for the elements of `h`.
fn bar_d1(m: &GLattice, h: &Subgroup) -> Matrix {
    let r = m.rank();
    let els: Vec<usize> = h.elements()[1..].to_vec();
    let k = els.len();
    let g = m.group();
    let mats = m.matrices();
    let id = Matrix::identity(r);
    let minus = id.neg();
    let mut d1 = Matrix::zeros(k * k * r, k * r);
    for (ia, &a) in els.iter().enumerate() {
        for (ib, &b) in els.iter().enumerate() {
            let row0 = (ia * k + ib) * r;
            add_block(&mut d1, row0, ib * r, &mats[a]);
            let ab = g.mul(a, b);
            if ab != 0 {
                let iab = els.binary_search(&ab).expect("subgroup closed");
                add_block(&mut d1, row0, iab * r, &minus);
            }
            add_block(&mut d1, row0, ia * r, &id);
        }
    }
    d1
}

/// `H^2(H, M)` as the torsion of `C^2 / B^2` for normalized bar cochains.
pub fn h2(m: &GLattice, h: &Subgroup, bound: usize) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    if h.order() > bound {
        return Err(Error::Resource(format!("|H| = {} exceeds the H^2 bound {bound}", h.order())));
    }
    if h.order() == 1 || m.rank() == 0 {
        return Ok(AbelianGroupStructure::trivial());
    }
    Ok(cokernel_torsion(&bar_d1(m, h)))
}

/// Tate `H^-1(H, M) = ker N_H / I_H M`. The kernel of the norm is
/// saturated and contains `I_H M` with finite index, so this is the torsion
/// of `M / I_H M`, where `I_H M` is spanned by `(h_i - 1) M` over generators.
pub fn tate_h_minus1(m: &GLattice, h: &Subgroup) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    let r = m.rank();
    let id = Matrix::identity(r);
    let blocks: Vec<Matrix> = m.subgroup_generator_matrices(h).iter().map(|a| a.sub(&id)).collect();
    if blocks.is_empty() {
        return Ok(AbelianGroupStructure::trivial());
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Ok(cokernel_torsion(&Matrix::hstack(&refs)))
}

/// Tate `H^0(H, M) = M^H / N_H M`.
pub fn tate_h0(m: &GLattice, h: &Subgroup) -> Result<AbelianGroupStructure> {
    check_subgroup(m, h)?;
    let r = m.rank();
    let fixed = m.fixed_points(h);
    if fixed.cols() == 0 {
        return Ok(AbelianGroupStructure::trivial());
    }
    let mut norm = Matrix::zeros(r, r);
    for &e in h.elements() {
        norm = norm.add(&m.matrix(e));
    }
    let coords = solve(&fixed, &norm).ok_or_else(|| Error::Input("norm image not fixed".into()))?;
    Ok(cokernel(&coords))
}

/// Cohomology group attached to one subgroup class representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupCohomology {
    pub subgroup_order: usize,
    /// Parent element indices (0-based, sorted).
    pub subgroup_elements: Vec<usize>,
    pub group: AbelianGroupStructure,
}

/// `H^-1(H, M)` for every conjugacy class representative `H`.
pub fn flabby_certificates(m: &GLattice, bound: usize) -> Result<Vec<SubgroupCohomology>> {
    per_subgroup(m, bound, tate_h_minus1)
}

/// `H^1(H, M)` for every conjugacy class representative `H`.
pub fn coflabby_certificates(m: &GLattice, bound: usize) -> Result<Vec<SubgroupCohomology>> {
    per_subgroup(m, bound, h1)
}

fn per_subgroup(
    m: &GLattice,
    bound: usize,
    f: fn(&GLattice, &Subgroup) -> Result<AbelianGroupStructure>,
) -> Result<Vec<SubgroupCohomology>> {
    m.group()
        .subgroup_classes(bound)?
        .iter()
        .map(|h| {
            Ok(SubgroupCohomology {
                subgroup_order: h.order(),
                subgroup_elements: h.elements().to_vec(),
                group: f(m, h)?,
            })
        })
        .collect()
}

/// `H^-1(H, M) = 0` for all subgroups `H`.
pub fn is_flabby(m: &GLattice, bound: usize) -> Result<bool> {
    for h in m.group().subgroup_classes(bound)? {
        if !tate_h_minus1(m, &h)?.is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `H^1(H, M) = 0` for all subgroups `H`.
pub fn is_coflabby(m: &GLattice, bound: usize) -> Result<bool> {
    for h in m.group().subgroup_classes(bound)? {
        if !h1(m, &h)?.is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An element of `H^1(H, M)` in invariant-factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyElement {
    pub ambient: AbelianGroupStructure,
    /// Coordinates modulo the torsion invariants of `ambient`.
    pub coordinates: Vec<Int>,
    /// Cocycle values on the subgroup generators, concatenated.
    pub representative_cocycle: Vec<Int>,
}

impl CohomologyElement {
    pub fn order(&self) -> Int {
        self.ambient
            .torsion
            .iter()
            .zip(&self.coordinates)
            .fold(Int::ONE, |acc, (s, c)| acc.lcm(&s.div_exact(&s.gcd(c))))
    }

    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|c| c.is_zero())
    }
}

/// Smith data for `H^1(H, M)` on generator cochains, used to locate the
/// classes of explicit cocycles.
pub struct H1Presentation {
    pub structure: AbelianGroupStructure,
    smith: Smith,
    coboundary: Matrix,
    torsion_idx: Vec<usize>,
}

impl H1Presentation {
    pub fn new(m: &GLattice, h: &Subgroup) -> Result<H1Presentation> {
        check_subgroup(m, h)?;
        let d = generator_coboundary(m, h);
        let smith = smith_with(&d, true, true);
        let torsion_idx: Vec<usize> = (0..smith.rank).filter(|&i| !smith.diag[i].is_one()).collect();
        let structure =
            AbelianGroupStructure::new(torsion_idx.iter().map(|&i| smith.diag[i].clone()).collect(), 0);
        Ok(H1Presentation { structure, smith, coboundary: d, torsion_idx })
    }

    /// Class of the cocycle with the given generator values; errors when the
    /// values do not satisfy the cocycle condition.
    pub fn class_of(&self, values: &[Int]) -> Result<CohomologyElement> {
        if values.len() != self.coboundary.rows() {
            return input("cocycle has the wrong length");
        }
        let y = self.smith.u().mul_vec(values);
        if y[self.smith.rank..].iter().any(|v| !v.is_zero()) {
            return input("values do not satisfy the cocycle condition");
        }
        let coordinates = self
            .torsion_idx
            .iter()
            .map(|&i| y[i].mod_floor(&self.smith.diag[i]))
            .collect();
        Ok(CohomologyElement {
            ambient: self.structure.clone(),
            coordinates,
            representative_cocycle: values.to_vec(),
        })
    }

    /// Some `r` with `d^0 r = values`, if the cocycle is a coboundary.
    pub fn coboundary_preimage(&self, values: &[Int]) -> Option<Vec<Int>> {
        let b = Matrix::column_vector(values);
        crate::normal_form::solve_with(&self.smith, self.coboundary.cols(), &b).map(|x| x.column(0))
    }
}

/// `Sha^2_omega(G, M)`: kernel of restriction from `H^2(G, M)` to
/// `H^2(C, M)` over representatives `C` of the cyclic subgroup classes,
/// computed on normalized bar cocycles.
pub fn sha2_omega_direct(m: &GLattice, bound: usize) -> Result<AbelianGroupStructure> {
    let g = m.group().clone();
    let n = g.order();
    if n > bound {
        return Err(Error::Resource(format!("|G| = {n} exceeds the H^2 bound {bound}")));
    }
    let r = m.rank();
    if n == 1 || r == 0 {
        return Ok(AbelianGroupStructure::trivial());
    }
    let whole = g.whole();
    let d1 = bar_d1(m, &whole);
    let s = smith_with(&d1, true, false);
    let tors: Vec<usize> = (0..s.rank).filter(|&i| !s.diag[i].is_one()).collect();
    if tors.is_empty() {
        return Ok(AbelianGroupStructure::trivial());
    }
    let src: Vec<Int> = tors.iter().map(|&i| s.diag[i].clone()).collect();
    let gens: Vec<Vec<Int>> = tors.iter().map(|&i| s.u_inv().column(i)).collect();
    let k = n - 1;
    let mut tgt: Vec<Int> = Vec::new();
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for c in g.cyclic_subgroup_classes() {
        if c.order() == 1 {
            continue;
        }
        let cd1 = bar_d1(m, &c);
        let cs = smith_with(&cd1, true, false);
        let cels: Vec<usize> = c.elements()[1..].to_vec();
        let kc = cels.len();
        // restriction picks the coordinates of pairs inside C
        let mut picks = Vec::with_capacity(kc * kc * r);
        for &a in &cels {
            for &b in &cels {
                let base = ((a - 1) * k + (b - 1)) * r;
                picks.extend(base..base + r);
            }
        }
        let images: Vec<Vec<Int>> = gens
            .iter()
            .map(|v| {
                let restricted: Vec<Int> = picks.iter().map(|&p| v[p].clone()).collect();
                cs.u().mul_vec(&restricted)
            })
            .collect();
        for j in 0..cs.rank {
            if cs.diag[j].is_one() {
                continue;
            }
            tgt.push(cs.diag[j].clone());
            rows.push(images.iter().map(|y| y[j].clone()).collect());
        }
        for y in &images {
            debug_assert!(y[cs.rank..].iter().all(|v| v.is_zero()), "torsion class restricts to torsion");
        }
    }
    let a = Matrix::from_int_rows(rows, src.len());
    Ok(finite_hom_kernel(&src, &tgt, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::named::*;
    use crate::groups::GSet;
    use crate::lattices::{augmentation_ideal, chevalley_lattice};

    fn sign_c2() -> GLattice {
        GLattice::character(&cyclic(2), &[-1]).unwrap()
    }

    #[test]
    fn small_cyclic_values() {
        let c2 = cyclic(2);
        let z = GLattice::trivial(&c2, 1);
        let w = c2.whole();
        assert!(h1(&z, &w).unwrap().is_trivial());
        assert_eq!(h1(&sign_c2(), &w).unwrap(), AbelianGroupStructure::finite(&[2]));
        assert_eq!(h2(&z, &w, 24).unwrap(), AbelianGroupStructure::finite(&[2]));
        let c3 = cyclic(3);
        assert_eq!(h2(&GLattice::trivial(&c3, 1), &c3.whole(), 24).unwrap(), AbelianGroupStructure::finite(&[3]));
        assert_eq!(tate_h_minus1(&sign_c2(), &w).unwrap(), AbelianGroupStructure::finite(&[2]));
        let reg = GLattice::permutation(&GSet::cosets(&c2.trivial_subgroup()));
        assert!(tate_h_minus1(&reg, &w).unwrap().is_trivial());
        assert!(h2(&reg, &w, 24).unwrap().is_trivial());
    }

    #[test]
    fn h1_of_augmentation_ideal_of_regular_set() {
        for g in [cyclic(2), cyclic(3), symmetric(3)] {
            let x = GSet::cosets(&g.trivial_subgroup());
            let ix = augmentation_ideal(&x).unwrap();
            let n = g.order() as i64;
            assert_eq!(h1(&ix, &g.whole()).unwrap(), AbelianGroupStructure::finite(&[n]));
            assert_eq!(h1_bar(&ix, &g.whole(), 24).unwrap(), AbelianGroupStructure::finite(&[n]));
        }
    }

    #[test]
    fn sha_for_biquadratic_three_orbits() {
        let v = klein_four();
        let subs: Vec<_> = v.subgroup_classes(512).unwrap().into_iter().filter(|h| h.order() == 2).collect();
        assert_eq!(subs.len(), 3);
        let sets: Vec<GSet> = subs.iter().map(GSet::cosets).collect();
        let x = GSet::disjoint_union(&sets).unwrap();
        let jx = chevalley_lattice(&x).unwrap();
        assert_eq!(sha2_omega_direct(&jx, 24).unwrap(), AbelianGroupStructure::finite(&[2]));
    }

    #[test]
    fn sha_vanishes_for_cyclic_groups() {
        let c4 = cyclic(4);
        let jx = chevalley_lattice(&GSet::cosets(&c4.trivial_subgroup())).unwrap();
        assert!(sha2_omega_direct(&jx, 24).unwrap().is_trivial());
    }

    #[test]
    fn class_coordinates() {
        let c2 = cyclic(2);
        let p = H1Presentation::new(&sign_c2(), &c2.whole()).unwrap();
        let cls = p.class_of(&[Int::ONE]).unwrap();
        assert_eq!(cls.order(), Int::from(2));
        let zero = p.class_of(&[Int::from(2)]).unwrap();
        assert!(zero.is_zero());
        assert!(p.coboundary_preimage(&[Int::from(2)]).is_some());
    }
}

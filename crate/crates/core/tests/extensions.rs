//! Extension classes built from cocycles, and resolution independence.

mod common;

use common::*;
use glattice::cohomology::{h1, is_flabby, tate_h_minus1};
use glattice::extensions::{cocycle_from_section, extension_from_cocycle, extension_order};
use glattice::groups::named::*;
use glattice::groups::GSet;
use glattice::lattices::{chevalley_module, GLattice};
use glattice::matrix::Matrix;
use glattice::normal_form::{kernel, solve};
use glattice::resolutions::flabby_resolution_with;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn co_augmentation_of_regular_c2_set_from_its_cocycle() {
    let g = cyclic(2);
    let x = GSet::cosets(&g.trivial_subgroup());
    let (_, fx) = chevalley_module(&x).unwrap();
    // basis lift of the quotient map Z[X] -> J_X
    let q = fx.maps[1].matrix();
    let s = glattice::normal_form::right_inverse(q).unwrap();
    let f = cocycle_from_section(&fx, &s).unwrap();
    let (class, rebuilt) = extension_from_cocycle(&fx.terms[0], &fx.terms[2], f).unwrap();
    assert_eq!(class.class().unwrap().order(), glattice::int::Int::from(2));
    assert_eq!(extension_order(&rebuilt).unwrap().order, glattice::int::Int::from(2));
    // the middle term is Z[C2]: find an intertwiner with unit determinant
    let zx = GLattice::permutation(&x);
    let maps = GLattice::equivariant_maps(&class.middle, &zx).unwrap();
    let found = (0..maps.len())
        .flat_map(|i| (0..maps.len()).map(move |j| (i, j)))
        .flat_map(|(i, j)| [(i, j, 1i64), (i, j, -1)])
        .any(|(i, j, s)| {
            let m = if i == j { maps[i].clone() } else { maps[i].add(&maps[j].scale(&s.into())) };
            is_unit_det(&m)
        });
    assert!(found);
}

#[test]
fn equivariant_maps_solve_the_intertwining_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in small_groups() {
        let m = random_lattice(&g, &mut rng, 3);
        let n = random_lattice(&g, &mut rng, 3);
        let (r, c) = (n.rank(), m.rank());
        // rows: entries of T(g) X - X S(g) for each generator, unknowns vec(X) row-major
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (s, t) in m.generator_matrices().iter().zip(n.generator_matrices()) {
            for i in 0..r {
                for j in 0..c {
                    let mut row = vec![0i64; r * c];
                    for k in 0..r {
                        row[k * c + j] += t[(i, k)].to_i64().unwrap();
                    }
                    for k in 0..c {
                        row[i * c + k] -= s[(k, j)].to_i64().unwrap();
                    }
                    rows.push(row);
                }
            }
        }
        let direct = if rows.is_empty() { Matrix::identity(r * c) } else { kernel(&Matrix::from_rows(&rows)) };
        let maps = GLattice::equivariant_maps(&m, &n).unwrap();
        assert_eq!(maps.len(), direct.cols(), "{}", g.id());
        if maps.is_empty() {
            continue;
        }
        let cols: Vec<Vec<glattice::int::Int>> = maps.iter().map(|x| x.to_rows().concat()).collect();
        let lib = Matrix::from_columns(&cols, r * c);
        assert!(solve(&lib, &direct).is_some() && solve(&direct, &lib).is_some(), "{}", g.id());
    }
}

#[test]
fn three_quadratic_orbits_flabby_status_by_subgroup() {
    let v = klein_four();
    let hs: Vec<_> = v.all_subgroups(B).unwrap().into_iter().filter(|h| h.order() == 2).collect();
    let x = GSet::disjoint_union(&hs.iter().map(GSet::cosets).collect::<Vec<_>>()).unwrap();
    let (j, _) = chevalley_module(&x).unwrap();
    let all = v.all_subgroups(B).unwrap();
    assert_eq!(all.len(), 5);
    let direct = all.iter().all(|h| tate_h_minus1(&j, h).unwrap().is_trivial());
    assert_eq!(is_flabby(&j, B).unwrap(), direct);
}

#[test]
fn flabby_h1_does_not_depend_on_the_envelope() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in small_groups() {
        let m = random_lattice(&g, &mut rng, 4);
        let a = flabby_resolution_with(&m, B, true).unwrap();
        let b = flabby_resolution_with(&m, B, false).unwrap();
        let w = g.whole();
        assert_eq!(h1(a.end(), &w).unwrap(), h1(b.end(), &w).unwrap(), "{}", g.id());
    }
}

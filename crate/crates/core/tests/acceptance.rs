//! End-to-end acceptance run. Each criterion prints one line and the
//! process exits nonzero if any of them fails or runs over its time limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use glattice::abelian::AbelianGroupStructure;
use glattice::cohomology::{h1, is_coflabby, is_flabby};
use glattice::extensions::{
    extension_order, image_sequence_e2, klyachko_sequence, order_by_retractions, order_by_sections,
    tensor_extensions_e2,
};
use glattice::groups::named::*;
use glattice::groups::{GSet, Group, Subgroup};
use glattice::int::Int;
use glattice::lattices::{augmentation_sequence, chevalley_lattice, GLattice};
use glattice::matrix::Matrix;
use glattice::rationality::{chevalley_splitting, hasse_obstruction, verify_tensor_splitting, ClassifyOptions, EtaleSpec};
use glattice::resolutions::{
    coflabby_resolution, flabby_class_invertible, flabby_resolution, local_permutation_order, permutation_order,
    stably_permutation_witness, SearchBudget, StablePermutationVerdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: glattice::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn run(n: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over the {}s limit", limit.as_secs())),
        Err(e) => (false, e),
    };
    println!(
        "[acceptance] criterion {n}: {} ({:.2}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn gen(g: &Group, i: usize) -> usize {
    g.generator_indices()[i]
}

fn subgroup_of_order(g: &Group, order: usize) -> Subgroup {
    g.subgroup_classes(B).unwrap().into_iter().find(|h| h.order() == order).expect("subgroup of that order")
}

fn subgroups_of_order(g: &Group, order: usize) -> Vec<Subgroup> {
    g.all_subgroups(B).unwrap().into_iter().filter(|h| h.order() == order).collect()
}

fn chevalley_orders() -> Outcome {
    let s3 = symmetric(3);
    let a4 = alternating(4);
    let cases: Vec<(&str, Subgroup)> = vec![
        ("C2/1", cyclic(2).trivial_subgroup()),
        ("C3/1", cyclic(3).trivial_subgroup()),
        ("C4/1", cyclic(4).trivial_subgroup()),
        ("S3/C2", s3.subgroup_generated(&[gen(&s3, 0)])),
        ("S3/1", s3.trivial_subgroup()),
        ("A4/C3", a4.subgroup_generated(&[gen(&a4, 0)])),
        ("C2xC2/1", klein_four().trivial_subgroup()),
    ];
    let mut seen = Vec::new();
    for (name, h) in cases {
        let start = Instant::now();
        let j = lib(chevalley_lattice(&GSet::cosets(&h)))?;
        let ord = lib(permutation_order(&j, B))?.order;
        let index = Int::from(h.index());
        ensure(ord == index, format!("{name}: p-ord {ord}, expected {index}"))?;
        ensure(start.elapsed() < Duration::from_secs(5), format!("{name} took over 5s"))?;
        seen.push(format!("{name}={ord}"));
    }
    Ok(seen.join(" "))
}

fn multi_orbit() -> Outcome {
    let c6 = cyclic(6);
    let r = gen(&c6, 0);
    let x = lib(GSet::disjoint_union(&[
        GSet::cosets(&c6.subgroup_generated(&[power(&c6, r, 2)])),
        GSet::cosets(&c6.subgroup_generated(&[power(&c6, r, 3)])),
    ]))?;
    let mut sizes = x.orbit_sizes();
    sizes.sort();
    ensure(sizes == vec![2, 3], format!("orbit sizes {sizes:?}"))?;
    let j = lib(chevalley_lattice(&x))?;
    let ord = lib(permutation_order(&j, B))?.order;
    ensure(ord.is_one(), format!("p-ord {ord} for sizes 2, 3"))?;
    let split = lib(chevalley_splitting(&x))?.ok_or("no splitting for coprime orbit sizes")?;
    let iso = &split.isomorphism;
    ensure(is_unit_det(iso), "splitting is not unimodular")?;
    for e in 0..c6.order() {
        let mut rhs = Matrix::identity(x.size());
        rhs.set_block(1, 1, &chevalley_action(&x, e));
        ensure(iso.mul(&permutation_matrix(&x, e)) == rhs.mul(iso), "splitting is not equivariant")?;
    }

    let g = product(&cyclic(4), &cyclic(2));
    let y = lib(GSet::disjoint_union(&[
        GSet::cosets(&subgroup_of_order(&g, 4)),
        GSet::cosets(&subgroup_of_order(&g, 2)),
    ]))?;
    let mut sizes = y.orbit_sizes();
    sizes.sort();
    ensure(sizes == vec![2, 4], format!("orbit sizes {sizes:?}"))?;
    let ord2 = lib(permutation_order(&lib(chevalley_lattice(&y))?, B))?.order;
    ensure(ord2 == Int::from(2), format!("p-ord {ord2} for sizes 2, 4"))?;
    Ok(format!("C6 sizes (2,3): p-ord 1, splitting verified; C4xC2 sizes (2,4): p-ord {ord2}"))
}

fn sha_values() -> Outcome {
    let opts = ClassifyOptions::default();
    let mut seen = Vec::new();
    let mut check = |g: &Group, hs: &[Subgroup], expected: AbelianGroupStructure| -> Result<(), String> {
        let pairs: Vec<(Subgroup, usize)> = hs.iter().map(|h| (h.clone(), 1)).collect();
        let spec = lib(EtaleSpec::over(g, &pairs))?;
        let rep = lib(hasse_obstruction(&spec, &opts))?;
        let direct = rep.sha2_omega_direct.clone().ok_or("direct route not computed")?;
        ensure(
            rep.sha2_omega == expected && direct == expected,
            format!("{} with {} subgroups: {} / {}, expected {expected}", g.id(), hs.len(), rep.sha2_omega, direct),
        )?;
        seen.push(format!("{}x{}={}", g.id(), hs.len(), rep.sha2_omega));
        Ok(())
    };
    let v4 = klein_four();
    check(&v4, &subgroups_of_order(&v4, 2), AbelianGroupStructure::finite(&[2]))?;
    let c33 = product(&cyclic(3), &cyclic(3));
    let index3 = subgroups_of_order(&c33, 3);
    ensure(index3.len() == 4, "C3xC3 should have four subgroups of order 3")?;
    check(&c33, &index3[..2], AbelianGroupStructure::trivial())?;
    check(&c33, &index3[..3], AbelianGroupStructure::finite(&[3]))?;
    check(&c33, &index3, AbelianGroupStructure::finite(&[3, 3]))?;
    Ok(seen.join(" "))
}

fn sylow_criterion() -> Outcome {
    let groups = vec![
        cyclic(2),
        cyclic(3),
        cyclic(4),
        cyclic(6),
        klein_four(),
        product(&cyclic(3), &cyclic(3)),
        symmetric(3),
        quaternion(),
    ];
    let mut seen = Vec::new();
    for g in groups {
        let j = lib(chevalley_lattice(&GSet::cosets(&g.trivial_subgroup())))?;
        let inv = lib(flabby_class_invertible(&j, B))?;
        let oracle = sylow_cyclic_oracle(&g);
        ensure(inv == oracle, format!("{}: invertible {inv}, Sylow subgroups cyclic {oracle}", g.id()))?;
        seen.push(format!("{}={inv}", g.id()));
    }
    Ok(seen.join(" "))
}

fn tensor_counterexamples() -> Outcome {
    let c33 = product(&cyclic(3), &cyclic(3));
    let hs = subgroups_of_order(&c33, 3);
    let jx = lib(chevalley_lattice(&GSet::cosets(&hs[0])))?;
    let jy = lib(chevalley_lattice(&GSet::cosets(&hs[1])))?;
    let t = lib(GLattice::tensor(&jx, &jy))?;
    ensure(!lib(flabby_class_invertible(&t, B))?, "J_X (x) J_Y over C3xC3 has invertible flabby class")?;

    let v4 = klein_four();
    let ks = subgroups_of_order(&v4, 2);
    let xy = lib(GSet::product(&GSet::cosets(&ks[0]), &GSet::cosets(&ks[1])))?;
    let j = lib(chevalley_lattice(&xy))?;
    ensure(!lib(flabby_class_invertible(&j, B))?, "biquadratic J over C2xC2 has invertible flabby class")?;
    Ok(format!("C3xC3 rank {} and C2xC2 rank {}: flabby classes not invertible", t.rank(), j.rank()))
}

fn tensor_splitting() -> Outcome {
    let c6 = cyclic(6);
    let r = gen(&c6, 0);
    let x = GSet::cosets(&c6.subgroup_generated(&[power(&c6, r, 2)]));
    let y = GSet::cosets(&c6.subgroup_generated(&[power(&c6, r, 3)]));
    ensure(x.size() == 2 && y.size() == 3, "coset sizes")?;
    let rep = lib(verify_tensor_splitting(&x, &y))?;
    let iso = rep.isomorphism.clone().ok_or("no isomorphism for coprime sizes")?;
    let (jx, jy) = (lib(chevalley_lattice(&x))?, lib(chevalley_lattice(&y))?);
    let jxy = lib(chevalley_lattice(&lib(GSet::product(&x, &y))?))?;
    let src = lib(GLattice::direct_sum(&[&jxy, &lib(GLattice::tensor(&jx, &jy))?]))?;
    let tgt = lib(GLattice::direct_sum(&[
        &lib(GLattice::tensor(&jx, &GLattice::permutation(&y)))?,
        &lib(GLattice::tensor(&GLattice::permutation(&x), &jy))?,
    ]))?;
    ensure(is_unit_det(&iso), "isomorphism is not unimodular")?;
    ensure(intertwines(&iso, &src, &tgt), "isomorphism is not equivariant")?;

    let v4 = klein_four();
    let ks = subgroups_of_order(&v4, 2);
    let (a, b) = (GSet::cosets(&ks[0]), GSet::cosets(&ks[1]));
    let rep2 = lib(verify_tensor_splitting(&a, &b))?;
    ensure(rep2.isomorphism.is_none() && !rep2.coprime, "size-2 case should be refused")?;
    let te = lib(tensor_extensions_e2(&lib(augmentation_sequence(&a))?, &lib(augmentation_sequence(&b))?))?;
    let (short, _) = lib(image_sequence_e2(&te))?;
    let by_sections = lib(order_by_sections(&short))?;
    let reported = rep2.nonsplit_order.clone().ok_or("no order for the nonsplit case")?;
    ensure(
        !by_sections.is_one() && by_sections == reported,
        format!("order {reported}, by sections {by_sections}"),
    )?;
    Ok(format!("C6: rank {} isomorphism verified; C2xC2: sequence of order {reported}", iso.rows()))
}

fn klyachko() -> Outcome {
    let mut seen = Vec::new();
    for sizes in [vec![2usize, 3], vec![2, 3, 5]] {
        let n: usize = sizes.iter().product();
        let g = cyclic(n);
        let r = gen(&g, 0);
        let xs: Vec<GSet> = sizes.iter().map(|&k| GSet::cosets(&g.subgroup_generated(&[power(&g, r, k)]))).collect();
        ensure(xs.iter().map(|x| x.size()).collect::<Vec<_>>() == sizes, "coset sizes")?;
        let k = lib(klyachko_sequence(&xs))?;
        let e = &k.sequence;
        ensure(e.verify_exactness().exact, format!("{sizes:?}: not exact"))?;
        let diff = e.terms[1].rank() as i64 - e.terms[2].rank() as i64;
        let expected: i64 = sizes.iter().map(|&s| s as i64 - 1).product();
        ensure(diff == expected, format!("{sizes:?}: rank difference {diff}, expected {expected}"))?;
        let ord = lib(order_by_sections(e))?;
        ensure(
            ord == k.order && ord.divides(&Int::from(n)),
            format!("{sizes:?}: order {} (sections {ord}) does not divide {n}", k.order),
        )?;
        seen.push(format!("{sizes:?}: order {ord}"));
    }
    Ok(seen.join(", "))
}

fn extension_orders() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let groups = small_groups();
    let mut seen = std::collections::BTreeMap::<String, usize>::new();
    for i in 0..50 {
        let g = &groups[i % groups.len()];
        let e = random_extension(g, &mut rng, 6);
        let by_class = lib(extension_order(&e))?.order;
        let by_sections = lib(order_by_sections(&e))?;
        let by_retractions = lib(order_by_retractions(&e))?;
        ensure(
            by_class == by_sections && by_class == by_retractions,
            format!("instance {i} over {}: {by_class}, {by_sections}, {by_retractions}", g.id()),
        )?;
        ensure(by_class.divides(&Int::from(g.order())), format!("order {by_class} does not divide |{}|", g.id()))?;
        *seen.entry(by_class.to_string()).or_default() += 1;
    }
    Ok(format!("50 extensions, orders {seen:?}"))
}

fn invariant_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let groups = small_groups();
    const N: usize = 20;
    for i in 0..N {
        let g = &groups[i % groups.len()];
        let m = random_lattice(g, &mut rng, 5);
        let a = lib(permutation_order(&m, B))?.order;
        let b = lib(permutation_order(&m.dual(), B))?.order;
        ensure(a == b, format!("duality: {a} vs {b} over {}", g.id()))?;
        let mut local = Int::from(1);
        for p in g.prime_divisors() {
            local = local * lib(local_permutation_order(&m, p, B))?;
        }
        ensure(local == a, format!("Sylow product {local} vs {a} over {}", g.id()))?;
    }
    for i in 0..N {
        let g = &groups[i % groups.len()];
        let m1 = random_lattice(g, &mut rng, 3);
        let m2 = random_lattice(g, &mut rng, 3);
        let t = lib(permutation_order(&lib(GLattice::tensor(&m1, &m2))?, B))?.order;
        let bound = lib(permutation_order(&m1, B))?.order * lib(permutation_order(&m2, B))?.order;
        ensure(t.divides(&bound), format!("tensor order {t} does not divide {bound}"))?;
    }
    for i in 0..N {
        let g = &groups[i % groups.len()];
        let h = random_subgroup(g, &mut rng);
        let p = GLattice::permutation(&GSet::cosets(&h));
        for k in g.subgroup_classes(B).unwrap() {
            ensure(lib(h1(&p, &k))?.is_trivial(), format!("H^1 of a coset lattice over {} is nonzero", g.id()))?;
        }
    }
    for i in 0..N {
        let g = &groups[i % groups.len()];
        let m = random_lattice(g, &mut rng, 3);
        let p = GLattice::permutation(&GSet::cosets(&random_subgroup(g, &mut rng)));
        if i % 2 == 0 {
            let f = lib(flabby_resolution(&m, B))?;
            let fp = lib(GLattice::tensor(f.end(), &p))?;
            ensure(lib(is_flabby(&fp, B))?, format!("flabby (x) permutation not flabby over {}", g.id()))?;
        } else {
            let c = lib(coflabby_resolution(&m, B))?;
            let cp = lib(GLattice::tensor(c.end(), &p))?;
            ensure(lib(is_coflabby(&cp, B))?, format!("coflabby (x) permutation not coflabby over {}", g.id()))?;
        }
    }
    Ok(format!("{N} instances each of duality with Sylow product, tensor bound, Shapiro, closure"))
}

fn witnesses() -> Outcome {
    let s3 = symmetric(3);
    let cases = [
        ("C2/1", cyclic(2).trivial_subgroup()),
        ("C3/1", cyclic(3).trivial_subgroup()),
        ("S3/C2", s3.subgroup_generated(&[gen(&s3, 0)])),
    ];
    let mut seen = Vec::new();
    for (name, h) in cases {
        let g = h.parent().clone();
        let j = lib(chevalley_lattice(&GSet::cosets(&h)))?;
        let f = lib(flabby_resolution(&j, B))?;
        let f = f.end();
        let verdict = lib(stably_permutation_witness(f, B, SearchBudget::default(), 0))?;
        let StablePermutationVerdict::Witness { plus, minus, isomorphism, .. } = verdict else {
            return Err(format!("{name}: {verdict:?}"));
        };
        let expand = |s: &[glattice::resolutions::PermutationSummand]| -> Result<Vec<GLattice>, String> {
            let mut out = Vec::new();
            for t in s {
                let k = lib(g.subgroup_from_elements(&t.subgroup_elements))?;
                out.extend(std::iter::repeat_with(|| GLattice::permutation(&GSet::cosets(&k))).take(t.multiplicity));
            }
            Ok(out)
        };
        let p_plus = expand(&plus)?;
        let p_minus = expand(&minus)?;
        let src = lib(GLattice::direct_sum(&p_plus.iter().collect::<Vec<_>>()))?;
        let mut parts = vec![f];
        parts.extend(p_minus.iter());
        let tgt = lib(GLattice::direct_sum(&parts))?;
        ensure(src.rank() == tgt.rank() && is_unit_det(&isomorphism), format!("{name}: not unimodular"))?;
        ensure(intertwines(&isomorphism, &src, &tgt), format!("{name}: not equivariant"))?;
        seen.push(format!("{name}: F rank {} + {} = {}", f.rank(), tgt.rank() - f.rank(), src.rank()));
    }
    Ok(seen.join("; "))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, s(35), chevalley_orders),
        run(2, s(5), multi_orbit),
        run(3, s(60), sha_values),
        run(4, s(120), sylow_criterion),
        run(5, s(120), tensor_counterexamples),
        run(6, s(30), tensor_splitting),
        run(7, s(60), klyachko),
        run(8, s(120), extension_orders),
        run(9, s(180), invariant_suite),
        run(10, s(120), witnesses),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("[acceptance] {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Extensions of G-lattices `0 -> A -> B -> C -> 0`.
//!
//! An extension is stored through a 1-cocycle `f: G -> Hom_Z(C, A)`; the
//! middle term `B_f = A x C` carries `g(a, c) = (ga + f(g)(gc), gc)`. Classes
//! live in `H^1(G, Hom(C, A))` with `Hom(C, A) = A (x) C°`, an element `u`
//! being stored as the row-major vector of the `rank A x rank C` matrix.

use crate::cohomology::{CohomologyElement, H1Presentation};
use crate::error::{input, Error, Result};
use crate::groups::GSet;
use crate::int::Int;
use crate::lattices::{augmentation_sequence, ExactSequence, GLattice, LatticeMap};
use crate::matrix::Matrix;
use crate::normal_form::{hnf_columns, least_multiple_in_span, left_inverse, right_inverse, solve};

/// An extension of `quotient` by `sub`, given by its cocycle on the group
/// generators.
#[derive(Clone, Debug)]
pub struct ExtensionClass {
    pub sub: GLattice,
    pub quotient: GLattice,
    /// `f(g_j)` for each group generator `g_j`, a `rank A x rank C` matrix.
    pub cocycle: Vec<Matrix>,
    pub middle: GLattice,
}

impl ExtensionClass {
    /// `f(g)` for every group element, from the cocycle rule
    /// `f(gh) = g.f(h) + f(g)`.
    pub fn values(&self) -> Vec<Matrix> {
        let g = self.sub.group().clone();
        let (ra, rc) = (self.sub.rank(), self.quotient.rank());
        let mut out = vec![Matrix::zeros(ra, rc); g.order()];
        let am = self.sub.matrices();
        let cm = self.quotient.matrices();
        for e in g.bfs_order() {
            if let Some((parent, j)) = g.word_step(e) {
                let h = g.generator_indices()[j];
                let twisted = am[h].mul(&out[parent]).mul(&cm[g.inv(h)]);
                out[e] = twisted.add(&self.cocycle[j]);
            }
        }
        out
    }

    /// The lattice `Hom_Z(C, A)` in which the cocycle takes values.
    pub fn coefficients(&self) -> Result<GLattice> {
        GLattice::hom(&self.quotient, &self.sub)
    }

    /// Cohomology class of the cocycle.
    pub fn class(&self) -> Result<CohomologyElement> {
        let hom = self.coefficients()?;
        let pres = H1Presentation::new(&hom, &hom.group().whole())?;
        pres.class_of(&flatten(&self.cocycle))
    }
}

fn flatten(values: &[Matrix]) -> Vec<Int> {
    values.iter().flat_map(|m| m.vectorize()).collect()
}

/// The three terms and two maps of a short exact sequence.
struct Short<'a> {
    a: &'a GLattice,
    b: &'a GLattice,
    c: &'a GLattice,
    iota: &'a Matrix,
    pi: &'a Matrix,
}

fn short(e: &ExactSequence) -> Result<Short<'_>> {
    if !e.is_short() {
        return input("expected a short exact sequence 0 -> A -> B -> C -> 0");
    }
    Ok(Short {
        a: &e.terms[0],
        b: &e.terms[1],
        c: &e.terms[2],
        iota: e.maps[0].matrix(),
        pi: e.maps[1].matrix(),
    })
}

fn require_exact(e: &ExactSequence) -> Result<()> {
    e.check_exact().map_err(|err| match err {
        Error::NotExact { node, detail } => Error::Input(format!("sequence not exact at term {node}: {detail}")),
        other => other,
    })
}

/// Build `B_f` and the sequence `0 -> A -> B_f -> C -> 0` with `iota = [I; 0]`
/// and `pi = [0 I]`. Fails when `f` is not a cocycle.
pub fn extension_from_cocycle(a: &GLattice, c: &GLattice, f: Vec<Matrix>) -> Result<(ExtensionClass, ExactSequence)> {
    let g = a.group().clone();
    if !g.same_as(c.group()) {
        return input("sub and quotient lattices live over different groups");
    }
    let (ra, rc) = (a.rank(), c.rank());
    if f.len() != g.generators().len() || f.iter().any(|m| m.shape() != (ra, rc)) {
        return input(format!("cocycle must give one {ra}x{rc} matrix per group generator"));
    }
    let gens: Vec<Matrix> = a
        .generator_matrices()
        .iter()
        .zip(c.generator_matrices())
        .zip(&f)
        .map(|((am, cm), fm)| {
            let mut m = Matrix::zeros(ra + rc, ra + rc);
            m.set_block(0, 0, am);
            m.set_block(0, ra, &fm.mul(cm));
            m.set_block(ra, ra, cm);
            m
        })
        .collect();
    let middle = GLattice::with_rank(g, ra + rc, gens)
        .map_err(|_| Error::Input("cocycle condition fails: B_f is not a representation".into()))?;
    let iota = Matrix::vstack_with_cols(&[&Matrix::identity(ra), &Matrix::zeros(rc, ra)], ra);
    let pi = Matrix::hstack(&[&Matrix::zeros(rc, ra), &Matrix::identity(rc)]);
    let seq = ExactSequence::short(
        LatticeMap::new(a.clone(), middle.clone(), iota)?,
        LatticeMap::new(middle.clone(), c.clone(), pi)?,
    )?;
    let class = ExtensionClass { sub: a.clone(), quotient: c.clone(), cocycle: f, middle };
    Ok((class, seq))
}

/// `f_s(g) = g s g^-1 - s`, pulled back into `Hom_Z(C, A)`, on the group
/// generators. `s: C -> B` is any Z-linear map with `pi s` equivariant.
pub fn cocycle_from_section(e: &ExactSequence, s: &Matrix) -> Result<Vec<Matrix>> {
    let t = short(e)?;
    if s.shape() != (t.b.rank(), t.c.rank()) {
        return input("section has the wrong shape");
    }
    let ps = t.pi.mul(s);
    if !LatticeMap::new_unchecked(t.c.clone(), t.c.clone(), ps).is_equivariant() {
        return input("pi o s is not equivariant");
    }
    let left = left_inverse(t.iota).ok_or_else(|| Error::Input("first map is not a split injection over Z".into()))?;
    let g = t.a.group().clone();
    let bm = t.b.matrices();
    let cm = t.c.matrices();
    let mut out = Vec::with_capacity(g.generators().len());
    for &h in g.generator_indices() {
        let diff = bm[h].mul(s).mul(&cm[g.inv(h)]).sub(s);
        let f = left.mul(&diff);
        if t.iota.mul(&f) != diff {
            return input("section cocycle does not land in the image of A");
        }
        out.push(f);
    }
    Ok(out)
}

/// Order of an extension with its two splitting certificates.
#[derive(Clone, Debug)]
pub struct ExtensionOrder {
    pub order: Int,
    pub class: CohomologyElement,
    /// Equivariant `s: C -> B` with `pi s = order * Id`.
    pub section: Matrix,
    /// Equivariant `t: B -> A` with `t iota = order * Id`.
    pub retraction: Matrix,
}

/// Section certificate of minimal multiple together with the class.
fn section_certificate(e: &ExactSequence) -> Result<(Int, CohomologyElement, Matrix)> {
    let t = short(e)?;
    let s1 = right_inverse(t.pi).ok_or_else(|| Error::Input("second map is not surjective".into()))?;
    let f = cocycle_from_section(e, &s1)?;
    let hom = GLattice::hom(t.c, t.a)?;
    let pres = H1Presentation::new(&hom, &hom.group().whole())?;
    let class = pres.class_of(&flatten(&f))?;
    let order = class.order();
    let scaled: Vec<Int> = flatten(&f).iter().map(|x| x * &order).collect();
    let r = pres
        .coboundary_preimage(&scaled)
        .ok_or_else(|| Error::Hypothesis("order * cocycle is not a coboundary".into()))?;
    let r = Matrix::from_vector(&r, t.a.rank(), t.c.rank());
    // order * s1 - iota r is equivariant since d0(r) = order * f
    let sec = s1.scale(&order).sub(&t.iota.mul(&r));
    Ok((order, class, sec))
}

/// `ord(E)`: order of the class of `E` in `H^1(G, Hom(C, A))`, with a
/// verified equivariant section and retraction of that multiple.
pub fn extension_order(e: &ExactSequence) -> Result<ExtensionOrder> {
    require_exact(e)?;
    let t = short(e)?;
    let (order, class, section) = section_certificate(e)?;
    let (dual_order, _, dual_sec) = section_certificate(&e.dual())?;
    if dual_order != order {
        return Err(Error::Hypothesis(format!(
            "extension and its dual have orders {order} and {dual_order}"
        )));
    }
    let retraction = dual_sec.transpose();
    let checks = [
        LatticeMap::new(t.c.clone(), t.b.clone(), section.clone()).is_ok(),
        t.pi.mul(&section) == Matrix::scalar(t.c.rank(), order.clone()),
        LatticeMap::new(t.b.clone(), t.a.clone(), retraction.clone()).is_ok(),
        retraction.mul(t.iota) == Matrix::scalar(t.a.rank(), order.clone()),
    ];
    if checks.iter().any(|ok| !ok) {
        return Err(Error::Hypothesis("splitting certificate failed verification".into()));
    }
    Ok(ExtensionOrder { order, class, section, retraction })
}

/// Least `e` with `e Id` in the span of the given maps, each flattened.
fn least_multiple_of_identity(maps: &[Matrix], n: usize) -> Result<Int> {
    let cols: Vec<Vec<Int>> = maps.iter().map(|m| m.vectorize()).collect();
    let span = Matrix::from_columns(&cols, n * n);
    least_multiple_in_span(&span, &Matrix::identity(n).vectorize())
        .ok_or_else(|| Error::Hypothesis("no multiple of the identity factors through the sequence".into()))
}

/// Order computed as the least `e` with `e Id_C` in `pi o Hom_G(C, B)`.
pub fn order_by_sections(e: &ExactSequence) -> Result<Int> {
    require_exact(e)?;
    let t = short(e)?;
    let maps: Vec<Matrix> = GLattice::equivariant_maps(t.c, t.b)?.iter().map(|s| t.pi.mul(s)).collect();
    least_multiple_of_identity(&maps, t.c.rank())
}

/// Order computed as the least `e` with `e Id_A` in `Hom_G(B, A) o iota`.
pub fn order_by_retractions(e: &ExactSequence) -> Result<Int> {
    require_exact(e)?;
    let t = short(e)?;
    let maps: Vec<Matrix> = GLattice::equivariant_maps(t.b, t.a)?.iter().map(|r| r.mul(t.iota)).collect();
    least_multiple_of_identity(&maps, t.a.rank())
}

/// An equivariant `s: C -> B` with `pi s = m Id`, which exists iff
/// `ord(E) | m`.
pub fn section_of_multiple(e: &ExactSequence, m: &Int) -> Result<Option<Matrix>> {
    let ord = extension_order(e)?;
    if m.is_zero() {
        let t = short(e)?;
        return Ok(Some(Matrix::zeros(t.b.rank(), t.c.rank())));
    }
    if !ord.order.divides(m) {
        return Ok(None);
    }
    Ok(Some(ord.section.scale(&m.div_exact(&ord.order))))
}

/// `(u, v)` with `v e2 - u e1 = 1` and `|u|` minimal (ties go to `u >= 0`).
pub fn bezout_pair(e1: &Int, e2: &Int) -> Option<(Int, Int)> {
    let (g, x, _) = Int::extended_gcd(e1, e2);
    if !g.is_one() {
        return None;
    }
    // x e1 + y e2 = 1 gives u = -x modulo e2
    let mut u = (-x).mod_floor(e2);
    let two_u = &u + &u;
    if two_u > *e2 {
        u = &u - e2;
    }
    let num = Int::ONE + &u * e1;
    let v = num.div_exact(e2);
    debug_assert!(&v * e2 - &u * e1 == Int::ONE);
    Some((u, v))
}

/// Tensor product of two short exact sequences in one of the two shapes,
/// plus the Bézout splitting when the orders are coprime.
#[derive(Clone, Debug)]
pub struct TensorExtension {
    /// The four-term sequence.
    pub sequence: ExactSequence,
    pub orders: (Int, Int),
    pub bezout: Option<(Int, Int)>,
    /// First shape: equivariant section `C1 (x) C2 -> (C1 (x) B2) + (B1 (x) C2)`.
    /// Second shape: equivariant retraction `(A1 (x) B2) + (B1 (x) A2) -> A1 (x) A2`.
    pub splitting: Option<Matrix>,
    /// The three-term sequence obtained from the splitting.
    pub derived: Option<ExactSequence>,
    /// Certificate that the derived sequence has order dividing `e1 e2`:
    /// a retraction for the first shape, a section for the second.
    pub derived_certificate: Option<Matrix>,
}

impl TensorExtension {
    pub fn order_bound(&self) -> Int {
        &self.orders.0 * &self.orders.1
    }
}

struct Factor {
    a: GLattice,
    b: GLattice,
    c: GLattice,
    iota: Matrix,
    pi: Matrix,
    ord: ExtensionOrder,
}

fn factor(e: &ExactSequence) -> Result<Factor> {
    let ord = extension_order(e)?;
    let t = short(e)?;
    Ok(Factor {
        a: t.a.clone(),
        b: t.b.clone(),
        c: t.c.clone(),
        iota: t.iota.clone(),
        pi: t.pi.clone(),
        ord,
    })
}

fn same_group(e1: &ExactSequence, e2: &ExactSequence) -> Result<()> {
    if !e1.group().same_as(e2.group()) {
        return input("sequences live over different groups; pull them back to a common group first");
    }
    Ok(())
}

fn map(src: &GLattice, tgt: &GLattice, m: Matrix) -> Result<LatticeMap> {
    LatticeMap::new(src.clone(), tgt.clone(), m)
}

/// `0 -> A1(x)A2 -> B1(x)B2 -> (C1(x)B2) + (B1(x)C2) -> C1(x)C2 -> 0`.
/// With coprime orders also the section of the right end and the sequence
/// `0 -> A1(x)A2 -> (B1(x)B2) + (C1(x)C2) -> (C1(x)B2) + (B1(x)C2) -> 0`.
pub fn tensor_extensions_e1(e1: &ExactSequence, e2: &ExactSequence) -> Result<TensorExtension> {
    same_group(e1, e2)?;
    let x = factor(e1)?;
    let y = factor(e2)?;
    let t = |p: &GLattice, q: &GLattice| GLattice::tensor(p, q);
    let aa = t(&x.a, &y.a)?;
    let bb = t(&x.b, &y.b)?;
    let cb = t(&x.c, &y.b)?;
    let bc = t(&x.b, &y.c)?;
    let cc = t(&x.c, &y.c)?;
    let mid = GLattice::direct_sum(&[&cb, &bc])?;
    let id = Matrix::identity;
    let iota = x.iota.kron(&y.iota);
    let f = Matrix::vstack(&[&x.pi.kron(&id(y.b.rank())), &id(x.b.rank()).kron(&y.pi)]);
    let pi = Matrix::hstack(&[&id(x.c.rank()).kron(&y.pi), &x.pi.kron(&id(y.c.rank())).neg()]);
    let sequence = ExactSequence::new(vec![
        map(&aa, &bb, iota.clone())?,
        map(&bb, &mid, f.clone())?,
        map(&mid, &cc, pi.clone())?,
    ])?;
    require_exact(&sequence)?;
    let (e1o, e2o) = (x.ord.order.clone(), y.ord.order.clone());
    let mut out = TensorExtension {
        sequence,
        orders: (e1o.clone(), e2o.clone()),
        bezout: None,
        splitting: None,
        derived: None,
        derived_certificate: None,
    };
    let Some((u, v)) = bezout_pair(&e1o, &e2o) else {
        return Ok(out);
    };
    let s = Matrix::vstack(&[
        &id(x.c.rank()).kron(&y.ord.section).scale(&v),
        &x.ord.section.kron(&id(y.c.rank())).scale(&u),
    ]);
    if pi.mul(&s) != id(cc.rank()) {
        return Err(Error::Hypothesis("Bézout section does not split".into()));
    }
    map(&cc, &mid, s.clone())?;
    let left_mid = GLattice::direct_sum(&[&bb, &cc])?;
    let iota_rs = Matrix::vstack_with_cols(&[&iota, &Matrix::zeros(cc.rank(), aa.rank())], aa.rank());
    let fs = Matrix::hstack(&[&f, &s]);
    let derived = ExactSequence::short(map(&aa, &left_mid, iota_rs.clone())?, map(&left_mid, &mid, fs)?)?;
    require_exact(&derived)?;
    let cert = Matrix::hstack(&[
        &x.ord.retraction.kron(&y.ord.retraction),
        &Matrix::zeros(aa.rank(), cc.rank()),
    ]);
    map(&left_mid, &aa, cert.clone())?;
    debug_assert!(cert.mul(&iota_rs) == Matrix::scalar(aa.rank(), out.order_bound()));
    out.bezout = Some((u, v));
    out.splitting = Some(s);
    out.derived = Some(derived);
    out.derived_certificate = Some(cert);
    Ok(out)
}

/// `0 -> A1(x)A2 -> (A1(x)B2) + (B1(x)A2) -> B1(x)B2 -> C1(x)C2 -> 0`.
/// With coprime orders also the retraction of the left end and the sequence
/// `0 -> (A1(x)B2) + (B1(x)A2) -> (A1(x)A2) + (B1(x)B2) -> C1(x)C2 -> 0`.
pub fn tensor_extensions_e2(e1: &ExactSequence, e2: &ExactSequence) -> Result<TensorExtension> {
    same_group(e1, e2)?;
    let x = factor(e1)?;
    let y = factor(e2)?;
    let t = |p: &GLattice, q: &GLattice| GLattice::tensor(p, q);
    let aa = t(&x.a, &y.a)?;
    let ab = t(&x.a, &y.b)?;
    let ba = t(&x.b, &y.a)?;
    let bb = t(&x.b, &y.b)?;
    let cc = t(&x.c, &y.c)?;
    let mid = GLattice::direct_sum(&[&ab, &ba])?;
    let id = Matrix::identity;
    let iota = Matrix::vstack_with_cols(
        &[&id(x.a.rank()).kron(&y.iota), &x.iota.kron(&id(y.a.rank())).neg()],
        aa.rank(),
    );
    let f = Matrix::hstack(&[&x.iota.kron(&id(y.b.rank())), &id(x.b.rank()).kron(&y.iota)]);
    let pi = x.pi.kron(&y.pi);
    let sequence = ExactSequence::new(vec![
        map(&aa, &mid, iota.clone())?,
        map(&mid, &bb, f.clone())?,
        map(&bb, &cc, pi.clone())?,
    ])?;
    require_exact(&sequence)?;
    let (e1o, e2o) = (x.ord.order.clone(), y.ord.order.clone());
    let mut out = TensorExtension {
        sequence,
        orders: (e1o.clone(), e2o.clone()),
        bezout: None,
        splitting: None,
        derived: None,
        derived_certificate: None,
    };
    let Some((u, v)) = bezout_pair(&e1o, &e2o) else {
        return Ok(out);
    };
    let r = Matrix::hstack(&[
        &id(x.a.rank()).kron(&y.ord.retraction).scale(&v),
        &x.ord.retraction.kron(&id(y.a.rank())).scale(&u),
    ]);
    if r.mul(&iota) != id(aa.rank()) {
        return Err(Error::Hypothesis("Bézout retraction does not split".into()));
    }
    map(&mid, &aa, r.clone())?;
    let right_mid = GLattice::direct_sum(&[&aa, &bb])?;
    let tf = Matrix::vstack_with_cols(&[&r, &f], mid.rank());
    let zero_pi = Matrix::hstack(&[&Matrix::zeros(cc.rank(), aa.rank()), &pi]);
    let derived = ExactSequence::short(map(&mid, &right_mid, tf)?, map(&right_mid, &cc, zero_pi.clone())?)?;
    require_exact(&derived)?;
    let cert = Matrix::vstack_with_cols(
        &[&Matrix::zeros(aa.rank(), cc.rank()), &x.ord.section.kron(&y.ord.section)],
        cc.rank(),
    );
    map(&cc, &right_mid, cert.clone())?;
    debug_assert!(zero_pi.mul(&cert) == Matrix::scalar(cc.rank(), out.order_bound()));
    out.bezout = Some((u, v));
    out.splitting = Some(r);
    out.derived = Some(derived);
    out.derived_certificate = Some(cert);
    Ok(out)
}

/// The short sequence `0 -> A1(x)A2 -> (A1(x)B2) + (B1(x)A2) -> Im f -> 0`
/// cut out of the second tensor shape, with `Im f` realized on a Hermite
/// basis inside `B1 (x) B2`. Returns the sequence and the inclusion of
/// `Im f`.
pub fn image_sequence_e2(te: &TensorExtension) -> Result<(ExactSequence, LatticeMap)> {
    let seq = &te.sequence;
    if seq.terms.len() != 4 {
        return input("expected a four-term sequence");
    }
    let f = seq.maps[1].matrix();
    let basis = hnf_columns(f);
    let (image, inclusion) = seq.terms[2].sublattice(&basis)?;
    let coords = solve(&basis, f).ok_or_else(|| Error::Hypothesis("map does not factor through its image".into()))?;
    let short = ExactSequence::short(seq.maps[0].clone(), map(&seq.terms[1], &image, coords)?)?;
    require_exact(&short)?;
    Ok((short, inclusion))
}

/// The sequence `0 -> I_X1(x)...(x)I_Xr -> P+ -> P- -> 0`, built by
/// tensoring augmentation sequences one factor at a time.
#[derive(Clone, Debug)]
pub struct KlyachkoSequence {
    pub sequence: ExactSequence,
    pub sizes: Vec<usize>,
    pub order: Int,
    /// `n_1 ... n_r`, which the order divides.
    pub order_bound: Int,
    pub plus_is_permutation: bool,
    pub minus_is_permutation: bool,
    /// The flabby class of the tensor product of the `I_Xi` is trivial,
    /// witnessed by `P-` being a permutation lattice.
    pub flabby_class_trivial: bool,
}

pub fn klyachko_sequence(xs: &[GSet]) -> Result<KlyachkoSequence> {
    let Some(first) = xs.first() else {
        return input("need at least one G-set");
    };
    let g = first.group().clone();
    if xs.iter().any(|x| !x.group().same_as(&g)) {
        return input("all G-sets must be over the same group");
    }
    let gcds: Vec<Int> = xs
        .iter()
        .map(|x| x.orbit_sizes().iter().fold(Int::ZERO, |acc, &n| acc.gcd(&Int::from(n))))
        .collect();
    for i in 0..gcds.len() {
        for j in i + 1..gcds.len() {
            if !gcds[i].gcd(&gcds[j]).is_one() {
                return input(format!(
                    "orbit sizes of factors {} and {} are not coprime (gcds {} and {})",
                    i + 1,
                    j + 1,
                    gcds[i],
                    gcds[j]
                ));
            }
        }
    }
    let mut seq = augmentation_sequence(first)?;
    for x in &xs[1..] {
        let te = tensor_extensions_e1(&seq, &augmentation_sequence(x)?)?;
        seq = te.derived.ok_or_else(|| Error::Hypothesis("coprime orders did not split".into()))?;
    }
    let order = extension_order(&seq)?.order;
    let order_bound = xs.iter().fold(Int::ONE, |acc, x| acc * Int::from(x.size()));
    if !order.divides(&order_bound) {
        return Err(Error::Hypothesis(format!("order {order} does not divide {order_bound}")));
    }
    let plus_is_permutation = seq.terms[1].is_permutation_basis();
    let minus_is_permutation = seq.terms[2].is_permutation_basis();
    Ok(KlyachkoSequence {
        sizes: xs.iter().map(|x| x.size()).collect(),
        sequence: seq,
        order,
        order_bound,
        plus_is_permutation,
        minus_is_permutation,
        flabby_class_trivial: plus_is_permutation && minus_is_permutation,
    })
}

/// An isomorphism of extensions `B_f1 -> B_f2` of the form
/// `(a, c) -> (a + r c, c)` when `f1 - f2` is a coboundary.
pub fn equivalence_of_cocycles(a: &GLattice, c: &GLattice, f1: &[Matrix], f2: &[Matrix]) -> Result<Option<LatticeMap>> {
    let (x1, _) = extension_from_cocycle(a, c, f1.to_vec())?;
    let (x2, _) = extension_from_cocycle(a, c, f2.to_vec())?;
    let hom = GLattice::hom(c, a)?;
    let pres = H1Presentation::new(&hom, &hom.group().whole())?;
    let diff: Vec<Int> = flatten(f1).iter().zip(flatten(f2)).map(|(p, q)| p - &q).collect();
    let Some(r) = pres.coboundary_preimage(&diff) else {
        return Ok(None);
    };
    let (ra, rc) = (a.rank(), c.rank());
    let mut phi = Matrix::identity(ra + rc);
    phi.set_block(0, ra, &Matrix::from_vector(&r, ra, rc));
    Ok(Some(LatticeMap::new(x1.middle, x2.middle, phi)?))
}

//! Coflabby and flabby resolutions, the permutation order `p-ord(M)`,
//! invertibility and stably-permutation witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{coflabby_certificates, flabby_certificates, SubgroupCohomology};
use crate::error::{input, Error, Result};
use crate::extensions::{extension_order, tensor_extensions_e1};
use crate::groups::{GSet, Subgroup};
use crate::int::Int;
use crate::lattices::{is_unimodular, ExactSequence, GLattice, LatticeMap};
use crate::matrix::Matrix;
use crate::normal_form::{hnf_columns, is_saturated, kernel, least_multiple_in_span, smith_with, solve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionKind {
    Coflabby,
    Flabby,
}

/// One coset lattice `Z[G/H]` in a permutation envelope, with the vector its
/// coset of `H` is sent to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSummand {
    pub subgroup_order: usize,
    pub subgroup_elements: Vec<usize>,
    pub vector: Vec<Int>,
}

/// `0 -> C -> P -> M -> 0` (coflabby) or `0 -> M -> P -> F -> 0` (flabby)
/// with `P` permutation.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub kind: ResolutionKind,
    pub sequence: ExactSequence,
    /// Decomposition of the middle term into coset lattices, when known.
    pub summands: Vec<CosetSummand>,
    /// `H^1` (coflabby) or `H^-1` (flabby) of the end term for every
    /// subgroup class; all trivial.
    pub certificates: Vec<SubgroupCohomology>,
    /// Order of the extension class, equal to `p-ord(M)`.
    pub order: Int,
}

impl Resolution {
    /// The resolved lattice `M`.
    pub fn lattice(&self) -> &GLattice {
        match self.kind {
            ResolutionKind::Coflabby => &self.sequence.terms[2],
            ResolutionKind::Flabby => &self.sequence.terms[0],
        }
    }

    pub fn permutation_term(&self) -> &GLattice {
        &self.sequence.terms[1]
    }

    /// `C` for a coflabby resolution, `F` for a flabby one.
    pub fn end(&self) -> &GLattice {
        match self.kind {
            ResolutionKind::Coflabby => &self.sequence.terms[0],
            ResolutionKind::Flabby => &self.sequence.terms[2],
        }
    }
}

struct Envelope {
    sets: Vec<GSet>,
    reps: Vec<Vec<usize>>,
    summands: Vec<CosetSummand>,
}

fn coset_reps(h: &Subgroup) -> Vec<usize> {
    h.left_cosets().iter().map(|c| c[0]).collect()
}

/// Columns `rho(g_c) m` for the cosets of one summand.
fn summand_images(m: &GLattice, reps: &[usize], v: &[Int]) -> Vec<Vec<Int>> {
    let mats = m.matrices();
    reps.iter().map(|&g| mats[g].mul_vec(v)).collect()
}

/// The images of the orbit sums of each class representative `K` span
/// `M^K` exactly.
fn surjective_on_fixed_points(m: &GLattice, env: &Envelope, keep: &[bool], classes: &[Subgroup], fixed: &[Matrix]) -> bool {
    for (k, mk) in classes.iter().zip(fixed) {
        let mut cols: Vec<Vec<Int>> = Vec::new();
        for (j, x) in env.sets.iter().enumerate() {
            if !keep[j] {
                continue;
            }
            let images = summand_images(m, &env.reps[j], &env.summands[j].vector);
            for orbit in x.restrict(k).orbits() {
                let mut sum = vec![Int::ZERO; m.rank()];
                for &c in &orbit {
                    for (s, v) in sum.iter_mut().zip(&images[c]) {
                        *s += v;
                    }
                }
                cols.push(sum);
            }
        }
        if mk.cols() == 0 {
            continue;
        }
        if cols.is_empty() {
            return false;
        }
        let span = Matrix::from_columns(&cols, m.rank());
        let s = smith_with(&span, false, false);
        if s.rank != mk.cols() || !s.invariants().iter().all(|d| d.is_one()) {
            return false;
        }
    }
    true
}

/// Coflabby resolution `0 -> C -> P -> M -> 0` where `P` has one summand
/// `Z[G/H]` per subgroup class `H` and per Hermite basis vector of `M^H`,
/// pruned greedily while `P^K -> M^K` stays onto for every `K`.
pub fn coflabby_resolution(m: &GLattice, bound: usize) -> Result<Resolution> {
    coflabby_resolution_with(m, bound, true)
}

pub fn coflabby_resolution_with(m: &GLattice, bound: usize, minimize: bool) -> Result<Resolution> {
    let g = m.group().clone();
    let classes = g.subgroup_classes(bound)?;
    let fixed: Vec<Matrix> = classes.iter().map(|k| m.fixed_points(k)).collect();
    let mut env = Envelope { sets: vec![], reps: vec![], summands: vec![] };
    for (h, basis) in classes.iter().zip(&fixed) {
        for v in basis.columns() {
            env.sets.push(GSet::cosets(h));
            env.reps.push(coset_reps(h));
            env.summands.push(CosetSummand {
                subgroup_order: h.order(),
                subgroup_elements: h.elements().to_vec(),
                vector: v,
            });
        }
    }
    let mut keep = vec![true; env.sets.len()];
    if !surjective_on_fixed_points(m, &env, &keep, &classes, &fixed) {
        return Err(Error::Hypothesis("permutation envelope is not onto on fixed points".into()));
    }
    if minimize {
        for j in (0..keep.len()).rev() {
            keep[j] = false;
            if !surjective_on_fixed_points(m, &env, &keep, &classes, &fixed) {
                keep[j] = true;
            }
        }
    }
    let mut parts = Vec::new();
    let mut cols: Vec<Vec<Int>> = Vec::new();
    let mut summands = Vec::new();
    for j in 0..keep.len() {
        if !keep[j] {
            continue;
        }
        parts.push(GLattice::permutation(&env.sets[j]));
        cols.extend(summand_images(m, &env.reps[j], &env.summands[j].vector));
        summands.push(env.summands[j].clone());
    }
    let refs: Vec<&GLattice> = parts.iter().collect();
    let p = GLattice::direct_sum(&refs)?;
    let pi = Matrix::from_columns(&cols, m.rank());
    let pi = if cols.is_empty() { Matrix::zeros(m.rank(), 0) } else { pi };
    let pi_map = LatticeMap::new(p.clone(), m.clone(), pi.clone())?;
    let (c, incl) = p.sublattice(&kernel(&pi))?;
    let sequence = ExactSequence::short(incl, pi_map)?;
    sequence.check_exact()?;
    let certificates = coflabby_certificates(&c, bound)?;
    if certificates.iter().any(|s| !s.group.is_trivial()) {
        return Err(Error::Hypothesis("kernel of the envelope is not coflabby".into()));
    }
    let order = extension_order(&sequence)?.order;
    Ok(Resolution { kind: ResolutionKind::Coflabby, sequence, summands, certificates, order })
}

/// Flabby resolution `0 -> M -> P -> F -> 0`, the dual of the coflabby
/// resolution of `M°`.
pub fn flabby_resolution(m: &GLattice, bound: usize) -> Result<Resolution> {
    flabby_resolution_with(m, bound, true)
}

pub fn flabby_resolution_with(m: &GLattice, bound: usize, minimize: bool) -> Result<Resolution> {
    let co = coflabby_resolution_with(&m.dual(), bound, minimize)?;
    let d = co.sequence.dual();
    // the double dual has the same matrices as m; use m itself as the first term
    let iota = LatticeMap::new(m.clone(), d.terms[1].clone(), d.maps[0].matrix().clone())?;
    let sequence = ExactSequence::short(iota, d.maps[1].clone())?;
    let certificates = flabby_certificates(&sequence.terms[2], bound)?;
    if certificates.iter().any(|s| !s.group.is_trivial()) {
        return Err(Error::Hypothesis("cokernel of the envelope is not flabby".into()));
    }
    Ok(Resolution {
        kind: ResolutionKind::Flabby,
        sequence,
        summands: co.summands,
        certificates,
        order: co.order,
    })
}

/// `a Id_M = g o f` through a permutation lattice `P`.
#[derive(Clone, Debug)]
pub struct PermutationFactorization {
    pub order: Int,
    pub summands: Vec<CosetSummand>,
    /// For each summand, the `H`-invariant functional on `M` defining `f`.
    pub functionals: Vec<Vec<Int>>,
    pub permutation: GLattice,
    /// `f: M -> P`.
    pub into: Matrix,
    /// `g: P -> M`.
    pub out_of: Matrix,
}

/// `p-ord(M)`: least `a` with `a Id_M` factoring through a permutation
/// lattice. Maps `M -> Z[G/H] -> M` are `sum_c rho(g_c) m l^T rho(g_c)^-1`
/// for `m` in `M^H` and `l` in `(M°)^H`, so `p-ord(M)` is the least
/// multiple of the identity in their span. The factorization is rebuilt
/// from the coefficients and verified.
pub fn permutation_order(m: &GLattice, bound: usize) -> Result<PermutationFactorization> {
    let g = m.group().clone();
    let r = m.rank();
    if r == 0 {
        let p = GLattice::zero(&g);
        return Ok(PermutationFactorization {
            order: Int::ONE,
            summands: vec![],
            functionals: vec![],
            permutation: p,
            into: Matrix::zeros(0, 0),
            out_of: Matrix::zeros(0, 0),
        });
    }
    let classes = g.subgroup_classes(bound)?;
    let dual = m.dual();
    let mats = m.matrices();
    struct Term {
        class: usize,
        m: Vec<Int>,
        lambdas: Vec<Vec<Int>>,
        reps: Vec<usize>,
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut cols: Vec<Vec<Int>> = Vec::new();
    for (ci, h) in classes.iter().enumerate() {
        let mh = m.fixed_points(h);
        let lh = dual.fixed_points(h);
        if mh.cols() == 0 || lh.cols() == 0 {
            continue;
        }
        let reps = coset_reps(h);
        let lambdas = lh.columns();
        for v in mh.columns() {
            for l in &lambdas {
                let rank_one = Matrix::column_vector(&v).mul(&Matrix::column_vector(l).transpose());
                let mut t = Matrix::zeros(r, r);
                for &gc in &reps {
                    t = t.add(&mats[gc].mul(&rank_one).mul(&mats[g.inv(gc)]));
                }
                cols.push(t.vectorize());
            }
            terms.push(Term { class: ci, m: v, lambdas: lambdas.clone(), reps: reps.clone() });
        }
    }
    let span = Matrix::from_columns(&cols, r * r);
    let target = Matrix::identity(r).vectorize();
    let order = least_multiple_in_span(&span, &target)
        .ok_or_else(|| Error::Hypothesis("identity is not in the rational span of permutation factorizations".into()))?;
    let scaled: Vec<Int> = target.iter().map(|x| x * &order).collect();
    let coeffs = solve(&span, &Matrix::column_vector(&scaled))
        .ok_or_else(|| Error::Hypothesis("least multiple has no integral preimage".into()))?
        .column(0);
    // collapse coefficients per (H, m) into one functional
    let mut summands = Vec::new();
    let mut functionals = Vec::new();
    let mut parts = Vec::new();
    let mut into_blocks: Vec<Matrix> = Vec::new();
    let mut out_cols: Vec<Vec<Int>> = Vec::new();
    let mut idx = 0;
    for t in &terms {
        let mut lam = vec![Int::ZERO; r];
        for l in &t.lambdas {
            let x = &coeffs[idx];
            idx += 1;
            for (a, b) in lam.iter_mut().zip(l) {
                a.add_mul(x, b);
            }
        }
        if lam.iter().all(|x| x.is_zero()) {
            continue;
        }
        let h = &classes[t.class];
        let mut rows = Vec::with_capacity(t.reps.len());
        for &gc in &t.reps {
            let row = mats[g.inv(gc)].transpose().mul_vec(&lam);
            rows.push(row);
            out_cols.push(mats[gc].mul_vec(&t.m));
        }
        into_blocks.push(Matrix::from_int_rows(rows, r));
        parts.push(GLattice::permutation(&GSet::cosets(h)));
        summands.push(CosetSummand {
            subgroup_order: h.order(),
            subgroup_elements: h.elements().to_vec(),
            vector: t.m.clone(),
        });
        functionals.push(lam);
    }
    let refs: Vec<&GLattice> = parts.iter().collect();
    let permutation = GLattice::direct_sum(&refs)?;
    let block_refs: Vec<&Matrix> = into_blocks.iter().collect();
    let into = Matrix::vstack_with_cols(&block_refs, r);
    let out_of = if out_cols.is_empty() { Matrix::zeros(r, 0) } else { Matrix::from_columns(&out_cols, r) };
    LatticeMap::new(m.clone(), permutation.clone(), into.clone())?;
    LatticeMap::new(permutation.clone(), m.clone(), out_of.clone())?;
    if out_of.mul(&into) != Matrix::scalar(r, order.clone()) {
        return Err(Error::Hypothesis("permutation factorization failed verification".into()));
    }
    Ok(PermutationFactorization { order, summands, functionals, permutation, into, out_of })
}

/// `p-ord(M)` as the order of a coflabby resolution; a second route used
/// for cross-checking.
pub fn permutation_order_by_resolution(m: &GLattice, bound: usize) -> Result<Int> {
    Ok(coflabby_resolution(m, bound)?.order)
}

/// `p-ord` of the restriction to a Sylow `p`-subgroup.
pub fn local_permutation_order(m: &GLattice, p: usize, bound: usize) -> Result<Int> {
    let s = m.group().sylow_subgroup(p)?;
    if s.order() == 1 {
        return Ok(Int::ONE);
    }
    Ok(permutation_order(&m.restrict(&s)?, bound)?.order)
}

/// Invertibility of `M` with, when invertible, a verified isomorphism
/// `M + C -> P` onto a permutation lattice.
#[derive(Clone, Debug)]
pub struct Invertibility {
    pub invertible: bool,
    pub permutation_order: Int,
    pub complement: Option<GLattice>,
    pub permutation: Option<GLattice>,
    /// `[f | incl_C]: M + C -> P`, unimodular and equivariant.
    pub isomorphism: Option<Matrix>,
}

pub fn is_invertible(m: &GLattice, bound: usize) -> Result<Invertibility> {
    let fac = permutation_order(m, bound)?;
    if !fac.order.is_one() {
        return Ok(Invertibility {
            invertible: false,
            permutation_order: fac.order,
            complement: None,
            permutation: None,
            isomorphism: None,
        });
    }
    let p = fac.permutation.clone();
    let k = kernel(&fac.out_of);
    let (c, incl) = p.sublattice(&k)?;
    let iso = Matrix::hstack(&[&fac.into, incl.matrix()]);
    let iso = if iso.cols() == 0 { Matrix::zeros(p.rank(), 0) } else { iso };
    let sum = GLattice::direct_sum(&[m, &c])?;
    LatticeMap::new(sum, p.clone(), iso.clone())?;
    if !is_unimodular(&iso) && iso.rows() > 0 {
        return Err(Error::Hypothesis("direct-summand certificate is not unimodular".into()));
    }
    Ok(Invertibility {
        invertible: true,
        permutation_order: fac.order,
        complement: Some(c),
        permutation: Some(p),
        isomorphism: Some(iso),
    })
}

/// Whether the flabby class `[M]^fl` is invertible.
pub fn flabby_class_invertible(m: &GLattice, bound: usize) -> Result<bool> {
    let f = flabby_resolution(m, bound)?;
    Ok(is_invertible(f.end(), bound)?.invertible)
}

/// Flabby resolution of `M1 (x) M2` from resolutions of the factors with
/// coprime permutation orders, with the splitting
/// `F + (F1 (x) F2) = (F1 (x) P2) + (P1 (x) F2)`.
#[derive(Clone, Debug)]
pub struct TensorResolution {
    pub resolution: Resolution,
    pub factor_orders: (Int, Int),
    pub splitting: Matrix,
    pub order_bound: Int,
}

pub fn tensor_flabby_resolutions(m1: &GLattice, m2: &GLattice, bound: usize) -> Result<TensorResolution> {
    let r1 = flabby_resolution(m1, bound)?;
    let r2 = flabby_resolution(m2, bound)?;
    if !r1.order.gcd(&r2.order).is_one() {
        return input(format!(
            "permutation orders {} and {} are not coprime",
            r1.order, r2.order
        ));
    }
    let te = tensor_extensions_e1(&r1.sequence, &r2.sequence)?;
    let s = te.splitting.clone().ok_or_else(|| Error::Hypothesis("coprime orders did not split".into()))?;
    let seq4 = &te.sequence;
    let f = seq4.maps[1].matrix();
    let mid = seq4.terms[2].clone();
    let ff = seq4.terms[3].clone();
    let basis = hnf_columns(f);
    let (fl, incl) = mid.sublattice(&basis)?;
    let coords = solve(&basis, f).ok_or_else(|| Error::Hypothesis("map does not factor through its image".into()))?;
    let sequence = ExactSequence::short(
        seq4.maps[0].clone(),
        LatticeMap::new(seq4.terms[1].clone(), fl.clone(), coords)?,
    )?;
    sequence.check_exact()?;
    let splitting = Matrix::hstack(&[incl.matrix(), &s]);
    let sum = GLattice::direct_sum(&[&fl, &ff])?;
    LatticeMap::new(sum, mid, splitting.clone())?;
    if !is_unimodular(&splitting) {
        return Err(Error::Hypothesis("splitting is not unimodular".into()));
    }
    let certificates = flabby_certificates(&fl, bound)?;
    if certificates.iter().any(|c| !c.group.is_trivial()) {
        return Err(Error::Hypothesis("image lattice is not flabby".into()));
    }
    let order = extension_order(&sequence)?.order;
    let order_bound = &r1.order * &r2.order;
    if !order.divides(&order_bound) {
        return Err(Error::Hypothesis(format!("order {order} does not divide {order_bound}")));
    }
    Ok(TensorResolution {
        resolution: Resolution { kind: ResolutionKind::Flabby, sequence, summands: vec![], certificates, order },
        factor_orders: (r1.order, r2.order),
        splitting,
        order_bound,
    })
}

/// Limits for the randomized isomorphism search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Random vectors tried, summed over all candidate decompositions.
    pub trials: usize,
    /// Largest coordinate of a random vector, in absolute value.
    pub entry_bound: i64,
    /// Largest rank of `P_+` worth searching.
    pub rank_cap: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { trials: 20000, entry_bound: 2, rank_cap: 40 }
    }
}

/// `Z[G/H]^multiplicity`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSummand {
    pub subgroup_order: usize,
    pub subgroup_elements: Vec<usize>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StablePermutationVerdict {
    /// `plus -> F + minus` is an equivariant unimodular isomorphism.
    Witness {
        plus: Vec<PermutationSummand>,
        minus: Vec<PermutationSummand>,
        isomorphism: Matrix,
        trials: usize,
    },
    Disproof {
        reason: String,
    },
    Unknown {
        reason: String,
    },
}

impl StablePermutationVerdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, StablePermutationVerdict::Witness { .. })
    }

    pub fn is_disproof(&self) -> bool {
        matches!(self, StablePermutationVerdict::Disproof { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            StablePermutationVerdict::Witness { .. } => "witness",
            StablePermutationVerdict::Disproof { .. } => "disproof",
            StablePermutationVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Integral solutions `c` of `rank F^K = sum_H c_H rank Z[G/H]^K`, best
/// first (smallest total rank of the positive part).
fn stable_candidates(orbits: &Matrix, ranks: &[Int], sizes: &[usize]) -> Vec<Vec<Int>> {
    let Some(c0) = solve(orbits, &Matrix::column_vector(ranks)) else {
        return vec![];
    };
    let c0 = c0.column(0);
    let ker = kernel(orbits).columns();
    let mut cands = vec![c0.clone()];
    if !ker.is_empty() && ker.len() <= 6 {
        let reach = if ker.len() <= 3 { 2 } else { 1 };
        let steps: Vec<i64> = (-reach..=reach).collect();
        let mut combos: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..ker.len() {
            combos = combos
                .into_iter()
                .flat_map(|c| steps.iter().map(move |&t| [c.clone(), vec![t]].concat()))
                .collect();
        }
        for t in combos {
            if t.iter().all(|&x| x == 0) {
                continue;
            }
            let mut c = c0.clone();
            for (ti, k) in t.iter().zip(&ker) {
                for (a, b) in c.iter_mut().zip(k) {
                    *a += &(Int::from(*ti) * b);
                }
            }
            cands.push(c);
        }
    }
    let plus_rank = |c: &Vec<Int>| -> Int {
        c.iter()
            .zip(sizes)
            .filter(|(x, _)| !x.is_negative())
            .fold(Int::ZERO, |acc, (x, &n)| acc + x * &Int::from(n))
    };
    cands.sort_by(|a, b| plus_rank(a).cmp(&plus_rank(b)).then_with(|| a.cmp(b)));
    cands
}

/// Decide whether `F` is stably permutation where the evidence allows.
///
/// If `F + P_- = P_+` then `rank F^K = sum_H c_H |K \ G/H|` for integers
/// `c_H`; when no integral solution exists this is a disproof. Otherwise an
/// isomorphism `P_+ -> F + P_-` is searched for by sending each coset of
/// `H` to a random `H`-fixed vector.
pub fn stably_permutation_witness(
    f: &GLattice,
    bound: usize,
    budget: SearchBudget,
    seed: u64,
) -> Result<StablePermutationVerdict> {
    if f.rank() == 0 {
        return Ok(StablePermutationVerdict::Witness {
            plus: vec![],
            minus: vec![],
            isomorphism: Matrix::zeros(0, 0),
            trials: 0,
        });
    }
    let g = f.group().clone();
    let classes = g.subgroup_classes(bound)?;
    let n = classes.len();
    let sets: Vec<GSet> = classes.iter().map(GSet::cosets).collect();
    let mut orbits = Matrix::zeros(n, n);
    for (j, k) in classes.iter().enumerate() {
        for (i, x) in sets.iter().enumerate() {
            orbits[(j, i)] = Int::from(x.restrict(k).orbits().len());
        }
    }
    let ranks: Vec<Int> = classes.iter().map(|k| Int::from(f.fixed_points(k).cols())).collect();
    let sizes: Vec<usize> = sets.iter().map(|x| x.size()).collect();
    let cands = stable_candidates(&orbits, &ranks, &sizes);
    if cands.is_empty() {
        return Ok(StablePermutationVerdict::Disproof {
            reason: "fixed-point ranks admit no integral combination of coset lattices".into(),
        });
    }
    let mut prepared = Vec::new();
    for c in cands.iter().take(MAX_CANDIDATES) {
        if let Some(p) = Candidate::prepare(f, &classes, &sets, c, budget)? {
            prepared.push(p);
        }
    }
    if prepared.is_empty() {
        return Ok(StablePermutationVerdict::Unknown {
            reason: format!("every candidate exceeds the search cap of rank {}", budget.rank_cap),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0;
    while evaluations < budget.trials {
        for p in &prepared {
            if let Some(w) = p.attempt(budget.entry_bound, &mut rng, &mut evaluations)? {
                return Ok(w);
            }
        }
    }
    Ok(StablePermutationVerdict::Unknown {
        reason: format!(
            "no isomorphism found for {} candidate decompositions in {evaluations} vector trials",
            prepared.len()
        ),
    })
}

const MAX_CANDIDATES: usize = 4;
/// Random vectors tried per summand before an attempt is abandoned.
const GREEDY_TRIES: usize = 200;

/// One candidate `P_+ -> F + P_-` with everything the search needs.
struct Candidate {
    plus: Vec<PermutationSummand>,
    minus: Vec<PermutationSummand>,
    source: GLattice,
    target: GLattice,
    /// For each coset summand of `P_+`, an index into the three lists below.
    kinds: Vec<usize>,
    subgroups: Vec<Subgroup>,
    cosets: Vec<GLattice>,
    reps: Vec<Vec<usize>>,
}

impl Candidate {
    /// `None` when the candidate exceeds the rank cap.
    fn prepare(
        f: &GLattice,
        classes: &[Subgroup],
        sets: &[GSet],
        c: &[Int],
        budget: SearchBudget,
    ) -> Result<Option<Candidate>> {
        let summand = |i: usize, mult: usize| PermutationSummand {
            subgroup_order: classes[i].order(),
            subgroup_elements: classes[i].elements().to_vec(),
            multiplicity: mult,
        };
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut kinds = Vec::new();
        let mut plus_classes = Vec::new();
        let mut minus_parts: Vec<GLattice> = Vec::new();
        for (i, ci) in c.iter().enumerate() {
            let k = ci.abs().to_i64().unwrap_or(i64::MAX) as usize;
            if k == 0 {
                continue;
            }
            if k > budget.rank_cap {
                return Ok(None);
            }
            if ci.is_negative() {
                minus.push(summand(i, k));
                minus_parts.extend(std::iter::repeat_with(|| GLattice::permutation(&sets[i])).take(k));
            } else {
                plus.push(summand(i, k));
                kinds.extend(std::iter::repeat(plus_classes.len()).take(k));
                plus_classes.push(i);
            }
        }
        let plus_rank: usize = kinds.iter().map(|&k| sets[plus_classes[k]].size()).sum();
        if plus_rank > budget.rank_cap {
            return Ok(None);
        }
        let mut tparts: Vec<&GLattice> = vec![f];
        tparts.extend(minus_parts.iter());
        let target = GLattice::direct_sum(&tparts)?;
        if plus_rank != target.rank() {
            return Err(Error::Hypothesis("rank bookkeeping of the stable decomposition failed".into()));
        }
        let cosets: Vec<GLattice> = plus_classes.iter().map(|&i| GLattice::permutation(&sets[i])).collect();
        let parts: Vec<&GLattice> = kinds.iter().map(|&k| &cosets[k]).collect();
        let source = GLattice::direct_sum(&parts)?;
        Ok(Some(Candidate {
            plus,
            minus,
            source,
            target,
            kinds,
            subgroups: plus_classes.iter().map(|&i| classes[i].clone()).collect(),
            reps: plus_classes.iter().map(|&i| coset_reps(&classes[i])).collect(),
            cosets,
        }))
    }

    /// Split off one coset summand at a time, largest orbits first. A random
    /// `H`-fixed vector `v` of the current complement `C` is accepted when
    /// its orbit spans a saturated sublattice `S` with an equivariant
    /// retraction `C -> S`; the kernel of the retraction becomes the next
    /// complement. When every summand is placed the orbits form a basis.
    fn attempt(
        &self,
        bound: i64,
        rng: &mut ChaCha8Rng,
        evaluations: &mut usize,
    ) -> Result<Option<StablePermutationVerdict>> {
        let n = self.target.rank();
        let mut order: Vec<usize> = (0..self.kinds.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        order.sort_by_key(|&b| std::cmp::Reverse(self.reps[self.kinds[b]].len()));
        let mut blocks: Vec<Matrix> = vec![Matrix::zeros(n, 0); self.kinds.len()];
        let mut comp = self.target.clone();
        let mut basis = Matrix::identity(n);
        for b in order {
            let k = self.kinds[b];
            let fixed = comp.fixed_points(&self.subgroups[k]);
            let homs = GLattice::equivariant_maps(&comp, &self.cosets[k])?;
            let mut placed = false;
            for _ in 0..GREEDY_TRIES {
                *evaluations += 1;
                let a: Vec<Int> = sparse_vector(fixed.cols(), bound, rng).into_iter().map(Int::from).collect();
                let v = fixed.mul_vec(&a);
                let orbit: Vec<Vec<Int>> = self.reps[k].iter().map(|&gc| comp.matrices()[gc].mul_vec(&v)).collect();
                let phi = Matrix::from_columns(&orbit, comp.rank());
                if !is_saturated(&phi) {
                    continue;
                }
                let Some(pi) = retraction(&phi, &homs) else {
                    continue;
                };
                let rest = kernel(&pi);
                blocks[b] = basis.mul(&phi);
                basis = basis.mul(&rest);
                comp = comp.sublattice(&rest)?.0;
                placed = true;
                break;
            }
            if !placed {
                return Ok(None);
            }
        }
        let psi = Matrix::hstack(&blocks.iter().collect::<Vec<_>>());
        if !is_unimodular(&psi) {
            return Err(Error::Hypothesis("an equivariant basis failed to be unimodular".into()));
        }
        LatticeMap::new(self.source.clone(), self.target.clone(), psi.clone())?;
        Ok(Some(StablePermutationVerdict::Witness {
            plus: self.plus.clone(),
            minus: self.minus.clone(),
            isomorphism: psi,
            trials: *evaluations,
        }))
    }
}

/// A random vector with one to three nonzero entries, most often a single
/// `+-1`.
fn sparse_vector(len: usize, bound: i64, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let mut a = vec![0; len];
    if len == 0 {
        return a;
    }
    let nonzero = [1, 1, 2, 3][rng.gen_range(0..4)];
    for _ in 0..nonzero {
        let x = rng.gen_range(1..=bound.max(1)) * if rng.gen_bool(0.5) { 1 } else { -1 };
        a[rng.gen_range(0..len)] = if nonzero == 1 { x.signum() } else { x };
    }
    a
}

/// An equivariant left inverse of `phi`, combined from the basis `homs` of
/// the equivariant maps into the source of `phi`.
fn retraction(phi: &Matrix, homs: &[Matrix]) -> Option<Matrix> {
    let m = phi.cols();
    let mut a = Matrix::zeros(m * m, homs.len());
    for (k, h) in homs.iter().enumerate() {
        let prod = h.mul(phi);
        for r in 0..m {
            for j in 0..m {
                a[(r * m + j, k)] = prod[(r, j)].clone();
            }
        }
    }
    let mut rhs = Matrix::zeros(m * m, 1);
    for r in 0..m {
        rhs[(r * m + r, 0)] = Int::from(1);
    }
    let c = solve(&a, &rhs)?;
    let mut pi = Matrix::zeros(m, phi.rows());
    for (k, h) in homs.iter().enumerate() {
        pi = pi.add(&h.scale(&c[(k, 0)]));
    }
    Some(pi)
}

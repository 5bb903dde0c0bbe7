//! Norm one tori of étale algebras: the Chevalley module `J_X`, retract and
//! stable rationality verdicts, the Hasse obstruction `Sha^2_omega` and the
//! statements about tensor products of étale algebras.

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroupStructure;
use crate::cohomology::{h1, sha2_omega_direct, DEFAULT_H2_BOUND};
use crate::error::{input, Error, Result};
use crate::extensions::{extension_order, image_sequence_e2, tensor_extensions_e2};
use crate::groups::{direct_product, FiniteGroup, GSet, Group, GroupHom, Perm, Subgroup, DEFAULT_SUBGROUP_BOUND};
use crate::int::Int;
use crate::lattices::{augmentation_sequence, chevalley_module, is_unimodular, GLattice, LatticeMap};
use crate::matrix::Matrix;
use crate::normal_form::{right_inverse, solve};
use crate::resolutions::{
    flabby_resolution, is_invertible, permutation_order, stably_permutation_witness, CosetSummand, SearchBudget,
    StablePermutationVerdict,
};

/// One field `K_i = L^{H_i}` of the algebra, repeated `multiplicity` times.
#[derive(Clone)]
pub struct EtaleFactor {
    pub group: Group,
    pub subgroup: Subgroup,
    pub multiplicity: usize,
}

/// `A = K_1 x ... x K_r` with the Galois group `G` of a common splitting
/// field surjecting onto each `G_i`.
#[derive(Clone)]
pub struct EtaleSpec {
    pub factors: Vec<EtaleFactor>,
    pub joint: Group,
    pub projections: Vec<GroupHom>,
}

impl EtaleSpec {
    pub fn new(factors: Vec<EtaleFactor>, joint: Group, projections: Vec<GroupHom>) -> Result<EtaleSpec> {
        if factors.is_empty() {
            return input("an étale spec needs at least one factor");
        }
        if factors.len() != projections.len() {
            return input(format!("{} factors but {} projections", factors.len(), projections.len()));
        }
        for (i, (f, p)) in factors.iter().zip(&projections).enumerate() {
            if f.multiplicity == 0 {
                return input(format!("factor {} has multiplicity 0", i + 1));
            }
            if !f.subgroup.parent().same_as(&f.group) {
                return input(format!("subgroup of factor {} does not lie in its group", i + 1));
            }
            if !p.source().same_as(&joint) || !p.target().same_as(&f.group) {
                return input(format!("projection {} has the wrong source or target", i + 1));
            }
            if !p.is_surjective() {
                return input(format!("projection {} is not surjective", i + 1));
            }
        }
        Ok(EtaleSpec { factors, joint, projections })
    }

    /// The field `L^H` with `G` itself as the joint group.
    pub fn transitive(h: &Subgroup) -> EtaleSpec {
        EtaleSpec::over(h.parent(), &[(h.clone(), 1)]).expect("subgroup of the joint group")
    }

    /// Several fields `L^{H_i}` inside one Galois extension with group `G`.
    pub fn over(g: &Group, subgroups: &[(Subgroup, usize)]) -> Result<EtaleSpec> {
        let factors = subgroups
            .iter()
            .map(|(h, k)| EtaleFactor { group: g.clone(), subgroup: h.clone(), multiplicity: *k })
            .collect();
        let projections = subgroups.iter().map(|_| GroupHom::identity(g)).collect();
        EtaleSpec::new(factors, g.clone(), projections)
    }

    pub fn group(&self) -> &Group {
        &self.joint
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity * f.subgroup.index()).sum()
    }

    /// `X`: disjoint union of the coset sets `G_i/H_i` pulled back to `G`.
    pub fn gset(&self) -> Result<GSet> {
        let mut sets = Vec::new();
        for (f, p) in self.factors.iter().zip(&self.projections) {
            let x = GSet::cosets(&f.subgroup).pullback(p)?;
            for _ in 0..f.multiplicity {
                sets.push(x.clone());
            }
        }
        GSet::disjoint_union(&sets)
    }

    /// The same algebra seen through `phi: K -> G`, which must be onto.
    pub fn pullback(&self, phi: &GroupHom) -> Result<EtaleSpec> {
        if !phi.target().same_as(&self.joint) {
            return input("homomorphism target is not the joint group");
        }
        let projections = self.projections.iter().map(|p| compose(phi, p)).collect::<Result<Vec<_>>>()?;
        EtaleSpec::new(self.factors.clone(), phi.source().clone(), projections)
    }
}

/// `psi o phi`.
fn compose(phi: &GroupHom, psi: &GroupHom) -> Result<GroupHom> {
    let src = phi.source();
    let images: Vec<usize> = src.generator_indices().iter().map(|&g| psi.apply(phi.apply(g))).collect();
    GroupHom::from_generator_images(src.clone(), psi.target().clone(), &images)
}

/// Whether `(p1, p2): G -> G1 x G2` is an isomorphism.
pub fn is_direct_product(g: &Group, p1: &GroupHom, p2: &GroupHom) -> bool {
    if !p1.source().same_as(g) || !p2.source().same_as(g) {
        return false;
    }
    let (n1, n2) = (p1.target().order(), p2.target().order());
    if g.order() != n1 * n2 {
        return false;
    }
    let mut seen = vec![false; n1 * n2];
    for e in 0..g.order() {
        let k = p1.apply(e) * n2 + p2.apply(e);
        if std::mem::replace(&mut seen[k], true) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub bound_subgroups: usize,
    pub bound_h2: usize,
    pub seed: u64,
    pub budget: SearchBudget,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            bound_subgroups: DEFAULT_SUBGROUP_BOUND,
            bound_h2: DEFAULT_H2_BOUND,
            seed: 0,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CrossCheck {
    CrossCheck { name: name.to_string(), passed, detail: detail.into() }
}

/// `J_X = Z[Y]` for `Y = X` minus a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointReduction {
    pub point: usize,
    /// Points of `X` indexing the basis of `Z[Y]`.
    pub remaining: Vec<usize>,
    /// `J_X -> Z[Y]`, unimodular and equivariant.
    pub isomorphism: Matrix,
}

/// `Z[X] = Z + J_X` when the orbit sizes are coprime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChevalleySplitting {
    pub orbit_sizes: Vec<usize>,
    /// `a_i` with `sum a_i n_i = 1`.
    pub orbit_weights: Vec<Int>,
    /// `Z[X] -> Z + J_X`: the functional `x -> a_{orbit(x)}` stacked on the
    /// quotient map onto `J_X`.
    pub isomorphism: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StableEvidence {
    /// `J_X` is itself a permutation lattice.
    FixedPoint { reduction: FixedPointReduction },
    /// `J_X` is stably permutation.
    Splitting { splitting: ChevalleySplitting },
    /// Search on the flabby class, over the group acting faithfully on `X`
    /// when `quotient` is set.
    Search { result: StablePermutationVerdict, quotient: Option<String> },
    /// The flabby class is not invertible.
    NotRetract { flabby_permutation_order: Int },
}

/// `0 -> J_X -> P -> F -> 0` with `P` permutation and `F` flabby.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlabbyCertificate {
    pub rank: usize,
    pub generators: Vec<Matrix>,
    pub summands: Vec<CosetSummand>,
    pub inclusion: Matrix,
    pub projection: Matrix,
    /// `p-ord(F)`, equal to 1 exactly when `F` is invertible.
    pub permutation_order: Int,
}

/// `order * Id = out_of * into` through a permutation lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationOrderCertificate {
    pub summands: Vec<CosetSummand>,
    pub into: Matrix,
    pub out_of: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub group: String,
    pub group_order: usize,
    pub orbit_sizes: Vec<usize>,
    pub lattice_rank: usize,
    /// `J_X` on the group generators.
    pub lattice: Vec<Matrix>,
    pub pord: Int,
    pub pord_certificate: PermutationOrderCertificate,
    pub flabby: FlabbyCertificate,
    pub rational: bool,
    pub retract_rational: bool,
    pub stably_rational: Verdict,
    pub stable_evidence: StableEvidence,
    pub sha2_omega: AbelianGroupStructure,
    pub sha2_omega_direct: Option<AbelianGroupStructure>,
    pub hasse: String,
    pub cross_checks: Vec<CrossCheck>,
}

impl ClassificationReport {
    pub fn all_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| G | order | orbits | rank J_X | p-ord | retract rational | stably rational | Sha^2_omega |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        out.push_str(&format!(
            "| {} | {} | {:?} | {} | {} | {} | {} | {} |\n",
            self.group,
            self.group_order,
            self.orbit_sizes,
            self.lattice_rank,
            self.pord,
            yes_no(self.retract_rational),
            self.stably_rational.as_str(),
            self.sha2_omega
        ));
        out.push('\n');
        out.push_str(&format!("Flabby class rank {}, evidence: {}.\n\n", self.flabby.rank, evidence_label(&self.stable_evidence)));
        out.push_str(&format!("{}\n\n", self.hasse));
        out.push_str(&checks_markdown(&self.cross_checks));
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn evidence_label(e: &StableEvidence) -> String {
    match e {
        StableEvidence::FixedPoint { .. } => "J_X is a permutation lattice (fixed point)".into(),
        StableEvidence::Splitting { .. } => "Z + J_X = Z[X] (coprime orbit sizes)".into(),
        StableEvidence::Search { result, quotient } => match quotient {
            None => format!("search on the flabby class: {}", result.label()),
            Some(q) => format!("search on the flabby class over {q}: {}", result.label()),
        },
        StableEvidence::NotRetract { flabby_permutation_order } => {
            format!("flabby class not invertible, p-ord(F) = {flabby_permutation_order}")
        }
    }
}

fn checks_markdown(checks: &[CrossCheck]) -> String {
    let mut out = String::from("| check | result | detail |\n|---|---|---|\n");
    for c in checks {
        out.push_str(&format!("| {} | {} | {} |\n", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail));
    }
    out
}

fn orbit_gcd(sizes: &[usize]) -> Int {
    sizes.iter().fold(Int::ZERO, |acc, &n| acc.gcd(&Int::from(n)))
}

/// If `X` has a fixed point `x_i`, the isomorphism `J_X -> Z[X \ x_i]`
/// dual to `[y] -> [y] - [x_i]`, verified.
pub fn fixed_point_reduction(x: &GSet) -> Result<Option<FixedPointReduction>> {
    let Some(orbit) = x.orbits().into_iter().find(|o| o.len() == 1) else {
        return Ok(None);
    };
    let p = orbit[0];
    let n = x.size();
    let remaining: Vec<usize> = (0..n).filter(|&y| y != p).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &y) in remaining.iter().enumerate() {
        pos[y] = i;
    }
    let y = GSet::from_fn(x.group().clone(), n - 1, |e, i| pos[x.act(e, remaining[i])])?;
    let mut phi = Matrix::zeros(n - 1, n - 1);
    for (i, &pt) in remaining.iter().enumerate() {
        if pt != 0 {
            phi[(pt - 1, i)] += &Int::ONE;
        }
        if p != 0 {
            phi[(p - 1, i)] -= &Int::ONE;
        }
    }
    let ix = augmentation_sequence(x)?.terms[0].clone();
    let zy = GLattice::permutation(&y);
    LatticeMap::new(zy.clone(), ix.clone(), phi.clone())?;
    if n > 1 && !is_unimodular(&phi) {
        return Err(Error::Hypothesis("fixed-point map is not unimodular".into()));
    }
    let isomorphism = phi.transpose();
    LatticeMap::new(ix.dual(), zy, isomorphism.clone())?;
    Ok(Some(FixedPointReduction { point: p, remaining, isomorphism }))
}

/// When the orbit sizes of `X` have gcd 1, a verified isomorphism
/// `Z[X] -> Z + J_X`.
pub fn chevalley_splitting(x: &GSet) -> Result<Option<ChevalleySplitting>> {
    let orbits = x.orbits();
    let sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    let mut g = Int::ZERO;
    let mut weights: Vec<Int> = Vec::new();
    for &n in &sizes {
        let (d, s, t) = Int::extended_gcd(&g, &Int::from(n));
        for w in weights.iter_mut() {
            *w = &*w * &s;
        }
        weights.push(t);
        g = d;
    }
    if !g.is_one() {
        return Ok(None);
    }
    let n = x.size();
    let mut t = Matrix::zeros(1, n);
    for (o, w) in orbits.iter().zip(&weights) {
        for &pt in o {
            t[(0, pt)] = w.clone();
        }
    }
    let (jx, seq) = chevalley_module(x)?;
    let q = seq.maps[1].matrix();
    let isomorphism = Matrix::vstack(&[&t, q]);
    let target = GLattice::direct_sum(&[&GLattice::trivial(x.group(), 1), &jx])?;
    LatticeMap::new(GLattice::permutation(x), target, isomorphism.clone())?;
    if !is_unimodular(&isomorphism) {
        return Err(Error::Hypothesis("orbit-weight splitting is not unimodular".into()));
    }
    Ok(Some(ChevalleySplitting { orbit_sizes: sizes, orbit_weights: weights, isomorphism }))
}

fn hasse_statement(sha: &AbelianGroupStructure) -> String {
    if sha.is_trivial() {
        "Obstruction group Sha^2_omega(G, J_X) = 0: the Tate-Shafarevich group of the norm one torus vanishes, \
         so the Hasse norm principle holds for this algebra."
            .into()
    } else {
        format!(
            "Obstruction group Sha^2_omega(G, J_X) = {sha}: the Hasse norm principle can fail, \
             and whether it does depends on the decomposition groups of the splitting field."
        )
    }
}

/// `X` as a set with an action of the permutation group it induces, when
/// the action of `G` is not faithful.
pub fn faithful_action(x: &GSet) -> Result<Option<GSet>> {
    let g = x.group();
    let kernel = (0..g.order()).filter(|&e| (0..x.size()).all(|p| x.act(e, p) == p)).count();
    if kernel == 1 {
        return Ok(None);
    }
    let images: Vec<Vec<usize>> = g.generator_indices().iter().map(|&s| x.permutation_of(s)).collect();
    let perms = images.iter().map(|v| Perm::from_images(v.clone())).collect::<Result<Vec<_>>>()?;
    let id = format!("{}/N ({} on {} points)", g.id(), g.order() / kernel, x.size());
    let q = FiniteGroup::from_generators(x.size(), perms, id)?;
    Ok(Some(GSet::from_generator_action(q, x.size(), &images)?))
}

/// Classify the norm one torus of `spec`.
pub fn classify_norm_one(spec: &EtaleSpec, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    classify_gset(&spec.gset()?, opts)
}

/// Classify the norm one torus with character lattice `J_X`.
pub fn classify_gset(x: &GSet, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let g = x.group().clone();
    let bound = opts.bound_subgroups;
    let sizes = x.orbit_sizes();
    let (jx, _) = chevalley_module(x)?;

    let fac = permutation_order(&jx, bound)?;
    let res = flabby_resolution(&jx, bound)?;
    let f = res.end().clone();
    let inv = is_invertible(&f, bound)?;
    let retract = inv.invertible;
    let sha = h1(&f, &g.whole())?;
    let direct = if g.order() <= opts.bound_h2 { Some(sha2_omega_direct(&jx, opts.bound_h2)?) } else { None };

    let fixed = fixed_point_reduction(x)?;
    let rational = fixed.is_some();
    let (stable, evidence) = if let Some(reduction) = fixed {
        (Verdict::Yes, StableEvidence::FixedPoint { reduction })
    } else if let Some(splitting) = chevalley_splitting(x)? {
        (Verdict::Yes, StableEvidence::Splitting { splitting })
    } else if !retract {
        (Verdict::No, StableEvidence::NotRetract { flabby_permutation_order: inv.permutation_order.clone() })
    } else {
        // Inflation preserves permutation and flabby lattices, so the class
        // can be searched over the group acting faithfully.
        let (result, quotient) = match faithful_action(x)? {
            None => (stably_permutation_witness(&f, bound, opts.budget, opts.seed)?, None),
            Some(xq) => {
                let jq = chevalley_module(&xq)?.0;
                let fq = flabby_resolution(&jq, bound)?;
                let r = stably_permutation_witness(fq.end(), bound, opts.budget, opts.seed)?;
                (r, Some(xq.group().id().to_string()))
            }
        };
        let v = match &result {
            StablePermutationVerdict::Witness { .. } => Verdict::Yes,
            StablePermutationVerdict::Disproof { .. } => Verdict::No,
            StablePermutationVerdict::Unknown { .. } => Verdict::Unknown,
        };
        (v, StableEvidence::Search { result, quotient })
    };

    let expected = orbit_gcd(&sizes);
    let mut checks = vec![
        check(
            "pord_equals_orbit_gcd",
            fac.order == expected,
            format!("p-ord(J_X) = {}, gcd of orbit sizes = {expected}", fac.order),
        ),
        check(
            "pord_matches_resolution_order",
            fac.order == res.order,
            format!("factorization {} vs flabby resolution class {}", fac.order, res.order),
        ),
        check(
            "retract_implies_sha_trivial",
            !retract || sha.is_trivial(),
            format!("retract {retract}, Sha^2_omega = {sha}"),
        ),
        check(
            "stable_implies_retract",
            stable != Verdict::Yes || retract,
            format!("stable {}, retract {retract}", stable.as_str()),
        ),
    ];
    if let Some(d) = &direct {
        checks.push(check("sha_routes_agree", d == &sha, format!("H^1(G, F) = {sha}, restriction kernel = {d}")));
    }
    if x.is_transitive() && x.size() == g.order() {
        let sylow = g.all_sylow_cyclic();
        checks.push(check(
            "sylow_cyclic_criterion",
            sylow == retract,
            format!("all Sylow subgroups cyclic: {sylow}, retract: {retract}"),
        ));
    }

    Ok(ClassificationReport {
        group: g.id().to_string(),
        group_order: g.order(),
        orbit_sizes: sizes,
        lattice_rank: jx.rank(),
        lattice: jx.generator_matrices().to_vec(),
        pord: fac.order,
        pord_certificate: PermutationOrderCertificate { summands: fac.summands, into: fac.into, out_of: fac.out_of },
        flabby: FlabbyCertificate {
            rank: f.rank(),
            generators: f.generator_matrices().to_vec(),
            summands: res.summands.clone(),
            inclusion: res.sequence.maps[0].matrix().clone(),
            projection: res.sequence.maps[1].matrix().clone(),
            permutation_order: inv.permutation_order,
        },
        rational,
        retract_rational: retract,
        stably_rational: stable,
        stable_evidence: evidence,
        hasse: hasse_statement(&sha),
        sha2_omega: sha,
        sha2_omega_direct: direct,
        cross_checks: checks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseReport {
    pub group: String,
    pub group_order: usize,
    pub orbit_sizes: Vec<usize>,
    pub sha2_omega: AbelianGroupStructure,
    pub sha2_omega_direct: Option<AbelianGroupStructure>,
    pub routes_agree: Option<bool>,
    pub statement: String,
}

impl HasseReport {
    pub fn to_markdown(&self) -> String {
        let direct = self.sha2_omega_direct.as_ref().map_or("not computed".to_string(), |d| d.to_string());
        format!(
            "| G | order | orbits | H^1(G, F) | restriction kernel |\n|---|---|---|---|---|\n| {} | {} | {:?} | {} | {} |\n\n{}\n",
            self.group, self.group_order, self.orbit_sizes, self.sha2_omega, direct, self.statement
        )
    }
}

/// `Sha^2_omega(G, J_X)` as `H^1(G, F)` for the flabby class `F`, and
/// directly from `H^2` when `|G|` is within the bound.
pub fn hasse_obstruction(spec: &EtaleSpec, opts: &ClassifyOptions) -> Result<HasseReport> {
    let x = spec.gset()?;
    let g = x.group().clone();
    let jx = chevalley_module(&x)?.0;
    let res = flabby_resolution(&jx, opts.bound_subgroups)?;
    let sha = h1(res.end(), &g.whole())?;
    let direct = if g.order() <= opts.bound_h2 { Some(sha2_omega_direct(&jx, opts.bound_h2)?) } else { None };
    Ok(HasseReport {
        group: g.id().to_string(),
        group_order: g.order(),
        orbit_sizes: x.orbit_sizes(),
        routes_agree: direct.as_ref().map(|d| d == &sha),
        statement: hasse_statement(&sha),
        sha2_omega: sha,
        sha2_omega_direct: direct,
    })
}

/// `J_{X x Y} + (J_X (x) J_Y) = (J_X (x) Z[Y]) + (Z[X] (x) J_Y)` when the
/// orbit sizes of `X` and of `Y` have coprime gcds, or a certificate that
/// the relevant sequence does not split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSplitReport {
    pub group: String,
    pub x_orbit_sizes: Vec<usize>,
    pub y_orbit_sizes: Vec<usize>,
    /// Orders of the augmentation sequences of `X` and `Y`.
    pub orders: (Int, Int),
    pub coprime: bool,
    pub image_is_augmentation_ideal: bool,
    pub bezout: Option<(Int, Int)>,
    /// Source basis: `J_{XxY}` then `J_X (x) J_Y`; target basis:
    /// `J_X (x) Z[Y]` then `Z[X] (x) J_Y`.
    pub isomorphism: Option<Matrix>,
    pub refusal: Option<String>,
    /// Order of `0 -> I_X(x)I_Y -> (I_X(x)Z[Y]) + (Z[X](x)I_Y) -> I_{XxY} -> 0`
    /// when the sizes are not coprime.
    pub nonsplit_order: Option<Int>,
    pub verified: bool,
}

impl TensorSplitReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| X orbits | Y orbits | orders | coprime | Im f = I_XY | result |\n|---|---|---|---|---|---|\n");
        let result = match (&self.isomorphism, &self.nonsplit_order) {
            (Some(m), _) => format!("isomorphism of rank {} verified", m.rows()),
            (None, Some(o)) => format!("refused; sequence has order {o}"),
            _ => "no result".to_string(),
        };
        out.push_str(&format!(
            "| {:?} | {:?} | ({}, {}) | {} | {} | {} |\n",
            self.x_orbit_sizes,
            self.y_orbit_sizes,
            self.orders.0,
            self.orders.1,
            yes_no(self.coprime),
            yes_no(self.image_is_augmentation_ideal),
            result
        ));
        if let Some(r) = &self.refusal {
            out.push_str(&format!("\nRefused: {r}\n"));
        }
        out
    }
}

pub fn verify_tensor_splitting(x: &GSet, y: &GSet) -> Result<TensorSplitReport> {
    if !x.group().same_as(y.group()) {
        return input("G-sets live over different groups");
    }
    let (dx, dy) = (orbit_gcd(&x.orbit_sizes()), orbit_gcd(&y.orbit_sizes()));
    let coprime = dx.gcd(&dy).is_one();
    let ex = augmentation_sequence(x)?;
    let ey = augmentation_sequence(y)?;
    let te = tensor_extensions_e2(&ex, &ey)?;
    let (short, incl) = image_sequence_e2(&te)?;
    let xy = GSet::product(x, y)?;
    let exy = augmentation_sequence(&xy)?;
    let iota_xy = exy.maps[0].matrix();
    let image_is_augmentation_ideal =
        solve(iota_xy, incl.matrix()).is_some() && solve(incl.matrix(), iota_xy).is_some();
    let mut report = TensorSplitReport {
        group: x.group().id().to_string(),
        x_orbit_sizes: x.orbit_sizes(),
        y_orbit_sizes: y.orbit_sizes(),
        orders: te.orders.clone(),
        coprime,
        image_is_augmentation_ideal,
        bezout: te.bezout.clone(),
        isomorphism: None,
        refusal: None,
        nonsplit_order: None,
        verified: false,
    };
    if !coprime {
        report.refusal = Some(format!("orbit sizes of X and Y share the factor {}", dx.gcd(&dy)));
        let order = extension_order(&short)?.order;
        report.verified = image_is_augmentation_ideal && !order.is_one();
        report.nonsplit_order = Some(order);
        return Ok(report);
    }
    let t = te.splitting.clone().ok_or_else(|| Error::Hypothesis("coprime orders did not split".into()))?;
    let f = te.sequence.maps[1].matrix();
    let f_coords = solve(iota_xy, f).ok_or_else(|| Error::Hypothesis("image is not inside I_XY".into()))?;
    let w = te.sequence.terms[1].clone();
    let ii = te.sequence.terms[0].clone();
    let ixy = exy.terms[0].clone();
    let theta = Matrix::vstack_with_cols(&[&t, &f_coords], w.rank());
    LatticeMap::new(w.clone(), GLattice::direct_sum(&[&ii, &ixy])?, theta.clone())?;
    let (r_ii, r_xy) = (ii.rank(), ixy.rank());
    let idx: Vec<usize> = (r_ii..r_ii + r_xy).chain(0..r_ii).collect();
    let iso = theta.transpose().select_cols(&idx);
    let source = GLattice::direct_sum(&[&ixy.dual(), &ii.dual()])?;
    let jx = ex.terms[0].dual();
    let jy = ey.terms[0].dual();
    let target = GLattice::direct_sum(&[
        &GLattice::tensor(&jx, &GLattice::permutation(y))?,
        &GLattice::tensor(&GLattice::permutation(x), &jy)?,
    ])?;
    if !target.same_action(&w.dual()) {
        return Err(Error::Hypothesis("dual of the middle term is not J_X(x)Z[Y] + Z[X](x)J_Y".into()));
    }
    LatticeMap::new(source, target, iso.clone())?;
    report.verified = image_is_augmentation_ideal && (iso.rows() == 0 || is_unimodular(&iso));
    report.isomorphism = Some(iso);
    Ok(report)
}

/// Flabby class data of one lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlabbySummary {
    pub rank: usize,
    pub flabby_rank: usize,
    pub invertible: bool,
    /// `H^1(G, F)`.
    pub h1: AbelianGroupStructure,
}

pub fn flabby_summary(m: &GLattice, bound: usize) -> Result<FlabbySummary> {
    let res = flabby_resolution(m, bound)?;
    let f = res.end();
    Ok(FlabbySummary {
        rank: m.rank(),
        flabby_rank: f.rank(),
        invertible: is_invertible(f, bound)?.invertible,
        h1: h1(f, &m.group().whole())?,
    })
}

/// Norm one torus of `A (x) B` against those of `A` and `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorRationalityReport {
    pub group: String,
    pub group_order: usize,
    pub coprime: bool,
    pub refusal: Option<String>,
    pub first: ClassificationReport,
    pub second: ClassificationReport,
    /// `J_{X x Y}`, the character lattice of the norm one torus of `A (x) B`.
    pub product: ClassificationReport,
    /// `J_X (x) J_Y`.
    pub tensor: FlabbySummary,
    pub mixed: Option<(FlabbySummary, FlabbySummary)>,
    pub splitting: TensorSplitReport,
    /// Stable rationality of the product torus deduced from stably rational
    /// factors with coprime orbit sizes and the verified splitting, even
    /// when the direct search on `J_{X x Y}` is inconclusive.
    pub product_stable_deduced: bool,
    pub cross_checks: Vec<CrossCheck>,
}

impl TensorRationalityReport {
    pub fn all_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("Joint group {} of order {}.\n\n", self.group, self.group_order);
        out.push_str("| torus | orbits | retract rational | stably rational | Sha^2_omega |\n|---|---|---|---|---|\n");
        for (name, r) in [("A", &self.first), ("B", &self.second), ("A (x) B", &self.product)] {
            out.push_str(&format!(
                "| {name} | {:?} | {} | {} | {} |\n",
                r.orbit_sizes,
                yes_no(r.retract_rational),
                r.stably_rational.as_str(),
                r.sha2_omega
            ));
        }
        out.push_str(&format!(
            "\nJ_X (x) J_Y: rank {}, flabby class invertible: {}, H^1(G, F) = {}.\n\n",
            self.tensor.rank,
            yes_no(self.tensor.invertible),
            self.tensor.h1
        ));
        if self.product_stable_deduced {
            out.push_str("A (x) B: stably rational, deduced from the stably rational factors and the verified splitting.\n\n");
        }
        if let Some(r) = &self.refusal {
            out.push_str(&format!("Refused: {r}\n\n"));
        }
        out.push_str(&self.splitting.to_markdown());
        out.push('\n');
        out.push_str(&checks_markdown(&self.cross_checks));
        out
    }
}

/// Bring two specs onto one joint group: the shared group if they agree,
/// otherwise the direct product.
pub fn common_joint(a: &EtaleSpec, b: &EtaleSpec) -> Result<(EtaleSpec, EtaleSpec)> {
    if a.joint.same_as(&b.joint) {
        return Ok((a.clone(), b.clone()));
    }
    let (_, p1, p2) = direct_product(&a.joint, &b.joint)?;
    Ok((a.pullback(&p1)?, b.pullback(&p2)?))
}

/// Compare the norm one torus of `A (x) B` with those of `A` and `B`.
/// When the orbit sizes are coprime, the product and the tensor lattice
/// inherit rationality from the factors and
/// `[J_XY]^fl + [J_X(x)J_Y]^fl = [J_X(x)Z[Y]]^fl + [Z[X](x)J_Y]^fl`; the
/// identity is checked through `H^1` of the flabby classes and their
/// invertibility. Otherwise the comparison is refused and the lattices
/// are classified directly.
pub fn verify_tensor_rationality(a: &EtaleSpec, b: &EtaleSpec, opts: &ClassifyOptions) -> Result<TensorRationalityReport> {
    let (a, b) = common_joint(a, b)?;
    let bound = opts.bound_subgroups;
    let x = a.gset()?;
    let y = b.gset()?;
    let g = x.group().clone();
    let (dx, dy) = (orbit_gcd(&x.orbit_sizes()), orbit_gcd(&y.orbit_sizes()));
    let coprime = dx.gcd(&dy).is_one();
    let first = classify_gset(&x, opts)?;
    let second = classify_gset(&y, opts)?;
    let product = classify_gset(&GSet::product(&x, &y)?, opts)?;
    let jx = chevalley_module(&x)?.0;
    let jy = chevalley_module(&y)?.0;
    let tensor = flabby_summary(&GLattice::tensor(&jx, &jy)?, bound)?;
    let splitting = verify_tensor_splitting(&x, &y)?;
    let mut checks = Vec::new();
    let mut refusal = None;
    let mut mixed = None;
    let mut product_stable_deduced = false;
    if coprime {
        let jz = flabby_summary(&GLattice::tensor(&jx, &GLattice::permutation(&y))?, bound)?;
        let zj = flabby_summary(&GLattice::tensor(&GLattice::permutation(&x), &jy)?, bound)?;
        checks.push(check("tensor_splitting_verified", splitting.verified, "explicit isomorphism checked"));
        let left = product.sha2_omega.direct_sum(&tensor.h1);
        let right = jz.h1.direct_sum(&zj.h1);
        checks.push(check("flabby_h1_identity", left == right, format!("{left} vs {right}")));
        let inv_left = product.retract_rational && tensor.invertible;
        let inv_right = jz.invertible && zj.invertible;
        checks.push(check(
            "flabby_invertibility_identity",
            inv_left == inv_right,
            format!("left invertible {inv_left}, right invertible {inv_right}"),
        ));
        let both_retract = first.retract_rational && second.retract_rational;
        checks.push(check(
            "retract_factors_give_retract_products",
            !both_retract || (product.retract_rational && tensor.invertible),
            format!(
                "factors retract {both_retract}, product retract {}, tensor invertible {}",
                product.retract_rational, tensor.invertible
            ),
        ));
        let both_stable = first.stably_rational == Verdict::Yes && second.stably_rational == Verdict::Yes;
        product_stable_deduced = both_stable && splitting.verified;
        checks.push(check(
            "stable_factors_give_stable_product",
            !both_stable || product.stably_rational != Verdict::No,
            format!("factors stable {both_stable}, product {}", product.stably_rational.as_str()),
        ));
        mixed = Some((jz, zj));
    } else {
        refusal = Some(format!("orbit size gcds {dx} and {dy} are not coprime"));
        checks.push(check(
            "nonsplit_certified",
            splitting.verified,
            format!("sequence order {}", splitting.nonsplit_order.clone().unwrap_or(Int::ONE)),
        ));
    }
    for (name, r) in [("first", &first), ("second", &second), ("product", &product)] {
        checks.push(check(&format!("{name}_classification_consistent"), r.all_checks_pass(), ""));
    }
    Ok(TensorRationalityReport {
        group: g.id().to_string(),
        group_order: g.order(),
        coprime,
        refusal,
        first,
        second,
        product,
        tensor,
        mixed,
        splitting,
        product_stable_deduced,
        cross_checks: checks,
    })
}

/// Restriction of `J_{X x Y}` to the first factor of `G1 x G2` and the
/// retract rationality of the three tori.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionConverseReport {
    pub group: String,
    pub first_size: usize,
    pub second_size: usize,
    /// `J_{XxY}|_{G1} -> J_X + Z[X]^(n2 - 1)`.
    pub restriction_isomorphism: Matrix,
    pub restriction_verified: bool,
    pub first_retract: bool,
    pub second_retract: bool,
    pub composite_retract: bool,
    pub cross_checks: Vec<CrossCheck>,
}

impl RestrictionConverseReport {
    pub fn all_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "Group {}; J_(XxY) restricted to the first factor is J_X + Z[X]^{} (verified: {}).\n\n",
            self.group,
            self.second_size.saturating_sub(1),
            yes_no(self.restriction_verified)
        );
        out.push_str("| torus | retract rational |\n|---|---|\n");
        out.push_str(&format!("| first | {} |\n", yes_no(self.first_retract)));
        out.push_str(&format!("| second | {} |\n", yes_no(self.second_retract)));
        out.push_str(&format!("| composite | {} |\n\n", yes_no(self.composite_retract)));
        out.push_str(&checks_markdown(&self.cross_checks));
        out
    }
}

/// For `A` over `G1` and `B` over `G2` with joint group `G1 x G2`.
pub fn verify_restriction_converse(a: &EtaleSpec, b: &EtaleSpec, opts: &ClassifyOptions) -> Result<RestrictionConverseReport> {
    let (g, p1, p2) = direct_product(&a.joint, &b.joint)?;
    verify_restriction_converse_over(a, b, &g, &p1, &p2, opts)
}

/// As [`verify_restriction_converse`] with a supplied joint group, which
/// must be the full direct product.
pub fn verify_restriction_converse_over(
    a: &EtaleSpec,
    b: &EtaleSpec,
    g: &Group,
    p1: &GroupHom,
    p2: &GroupHom,
    opts: &ClassifyOptions,
) -> Result<RestrictionConverseReport> {
    if !p1.target().same_as(&a.joint) || !p2.target().same_as(&b.joint) || !is_direct_product(g, p1, p2) {
        return input("joint group is not the direct product of the two factor groups");
    }
    let bound = opts.bound_subgroups;
    let x1 = a.gset()?;
    let y2 = b.gset()?;
    let x = x1.pullback(p1)?;
    let y = y2.pullback(p2)?;
    let xy = GSet::product(&x, &y)?;
    let (n1, n2) = (x1.size(), y2.size());
    let (jxy, seq_xy) = chevalley_module(&xy)?;
    let (jx1, seq_x1) = chevalley_module(&x1)?;
    let q_xy = seq_xy.maps[1].matrix();
    let q_x = seq_x1.maps[1].matrix();

    // (w_y)_y -> (q_X w_{y0}, w_{y1} - w_{y0}, ...), which kills the norm
    let rows = (n1 - 1) + n1 * (n2 - 1);
    let mut phi = Matrix::zeros(rows, n1 * n2);
    for i in 0..n1 - 1 {
        for xp in 0..n1 {
            phi[(i, xp * n2)] = q_x[(i, xp)].clone();
        }
    }
    for k in 1..n2 {
        for xp in 0..n1 {
            let r = (n1 - 1) + (k - 1) * n1 + xp;
            phi[(r, xp * n2 + k)] = Int::ONE;
            phi[(r, xp * n2)] = Int::from(-1);
        }
    }
    let r = right_inverse(q_xy).ok_or_else(|| Error::Hypothesis("quotient onto J_XY is not surjective".into()))?;
    let psi = phi.mul(&r);
    let factors_through = psi.mul(q_xy) == phi;

    // G1 -> G1 x G2, g -> (g, 1)
    let g1 = a.joint.clone();
    let mut embed = vec![usize::MAX; g1.order()];
    for e in 0..g.order() {
        if p2.apply(e) == 0 {
            embed[p1.apply(e)] = e;
        }
    }
    let images: Vec<usize> = g1.generator_indices().iter().map(|&s| embed[s]).collect();
    let emb = GroupHom::from_generator_images(g1.clone(), g.clone(), &images)?;
    let restricted = jxy.pullback(&emb)?;
    let zx = GLattice::permutation(&x1);
    let mut parts: Vec<&GLattice> = vec![&jx1];
    parts.extend(std::iter::repeat(&zx).take(n2 - 1));
    let target = GLattice::direct_sum(&parts)?;
    let equivariant = LatticeMap::new(restricted, target, psi.clone()).is_ok();
    let restriction_verified = factors_through && equivariant && (psi.rows() == 0 || is_unimodular(&psi));

    let first_retract = flabby_summary(&jx1, bound)?.invertible;
    let second_retract = flabby_summary(&chevalley_module(&y2)?.0, bound)?.invertible;
    let composite_retract = flabby_summary(&jxy, bound)?.invertible;
    let cross_checks = vec![
        check("restriction_isomorphism", restriction_verified, format!("rank {}", psi.rows())),
        check(
            "non_retract_factor_forces_non_retract_composite",
            (first_retract && second_retract) || !composite_retract,
            format!("factors ({first_retract}, {second_retract}), composite {composite_retract}"),
        ),
    ];
    Ok(RestrictionConverseReport {
        group: g.id().to_string(),
        first_size: n1,
        second_size: n2,
        restriction_isomorphism: psi,
        restriction_verified,
        first_retract,
        second_retract,
        composite_retract,
        cross_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::named::*;

    fn opts() -> ClassifyOptions {
        ClassifyOptions { seed: 7, ..Default::default() }
    }

    fn index_subgroups(g: &Group, index: usize) -> Vec<Subgroup> {
        g.all_subgroups(g.order()).unwrap().into_iter().filter(|h| h.index() == index).collect()
    }

    #[test]
    fn cyclic_six_is_stably_rational() {
        let g = cyclic(6);
        let r = classify_norm_one(&EtaleSpec::transitive(&g.trivial_subgroup()), &opts()).unwrap();
        assert!(r.retract_rational);
        assert_eq!(r.stably_rational, Verdict::Yes);
        assert!(r.sha2_omega.is_trivial());
        assert_eq!(r.pord, Int::from(6));
        assert!(r.all_checks_pass(), "{:?}", r.cross_checks);
    }

    #[test]
    fn klein_four_regular_is_not_retract() {
        let g = klein_four();
        let r = classify_norm_one(&EtaleSpec::transitive(&g.trivial_subgroup()), &opts()).unwrap();
        assert!(!r.retract_rational);
        assert_eq!(r.stably_rational, Verdict::No);
        assert_eq!(r.pord, Int::from(4));
        assert_eq!(r.sha2_omega, AbelianGroupStructure::finite(&[2]));
        assert!(r.all_checks_pass(), "{:?}", r.cross_checks);
    }

    #[test]
    fn three_quadratic_subfields() {
        let g = klein_four();
        let hs: Vec<(Subgroup, usize)> = index_subgroups(&g, 2).into_iter().map(|h| (h, 1)).collect();
        assert_eq!(hs.len(), 3);
        let r = classify_norm_one(&EtaleSpec::over(&g, &hs).unwrap(), &opts()).unwrap();
        assert_eq!(r.sha2_omega, AbelianGroupStructure::finite(&[2]));
        assert_eq!(r.sha2_omega_direct, Some(AbelianGroupStructure::finite(&[2])));
        assert_eq!(r.pord, Int::from(2));
    }

    #[test]
    fn fixed_point_gives_permutation_lattice() {
        let g = cyclic(3);
        let spec = EtaleSpec::over(&g, &[(g.whole(), 1), (g.trivial_subgroup(), 1)]).unwrap();
        let x = spec.gset().unwrap();
        let red = fixed_point_reduction(&x).unwrap().unwrap();
        assert_eq!(red.remaining.len(), 3);
        let two = EtaleSpec::over(&g, &[(g.whole(), 2)]).unwrap();
        let red = fixed_point_reduction(&two.gset().unwrap()).unwrap().unwrap();
        assert_eq!(red.isomorphism, Matrix::identity(1));
        assert!(fixed_point_reduction(&GSet::cosets(&g.trivial_subgroup())).unwrap().is_none());
        let r = classify_norm_one(&spec, &opts()).unwrap();
        assert!(r.rational && r.retract_rational);
    }

    #[test]
    fn coprime_orbits_split() {
        let g = cyclic(6);
        let subs = g.all_subgroups(6).unwrap();
        let c3 = subs.iter().find(|h| h.order() == 3).unwrap().clone();
        let c2 = subs.iter().find(|h| h.order() == 2).unwrap().clone();
        let spec = EtaleSpec::over(&g, &[(c3.clone(), 1), (c2.clone(), 1)]).unwrap();
        let s = chevalley_splitting(&spec.gset().unwrap()).unwrap().unwrap();
        let total: Int = s
            .orbit_weights
            .iter()
            .zip(&s.orbit_sizes)
            .fold(Int::ZERO, |acc, (w, &n)| acc + w * &Int::from(n));
        assert!(total.is_one());
        let x = GSet::cosets(&c3);
        let y = GSet::cosets(&c2);
        let rep = verify_tensor_splitting(&x, &y).unwrap();
        assert!(rep.verified && rep.isomorphism.is_some());
    }

    #[test]
    fn klein_four_pairs_do_not_split() {
        let g = klein_four();
        let hs = index_subgroups(&g, 2);
        let rep = verify_tensor_splitting(&GSet::cosets(&hs[0]), &GSet::cosets(&hs[1])).unwrap();
        assert!(!rep.coprime && rep.refusal.is_some());
        assert!(rep.verified, "{rep:?}");
    }

    #[test]
    fn tensor_of_degree_three_and_two() {
        let s3 = symmetric(3);
        let c2s = s3.all_subgroups(6).unwrap().into_iter().find(|h| h.order() == 2).unwrap();
        let c2 = cyclic(2);
        let a = EtaleSpec::transitive(&c2s);
        let b = EtaleSpec::transitive(&c2.trivial_subgroup());
        let rep = verify_tensor_rationality(&a, &b, &opts()).unwrap();
        assert!(rep.coprime);
        assert!(rep.all_checks_pass(), "{:?}", rep.cross_checks);
        assert!(rep.product.retract_rational);
        assert_ne!(rep.product.stably_rational, Verdict::No);
    }

    #[test]
    fn restriction_converse() {
        let a = EtaleSpec::transitive(&cyclic(2).trivial_subgroup());
        let b = EtaleSpec::transitive(&cyclic(3).trivial_subgroup());
        let rep = verify_restriction_converse(&a, &b, &opts()).unwrap();
        assert!(rep.all_checks_pass(), "{:?}", rep.cross_checks);
        assert_eq!(rep.restriction_isomorphism.rows(), 5);
        let k = EtaleSpec::transitive(&klein_four().trivial_subgroup());
        let rep = verify_restriction_converse(&k, &b, &opts()).unwrap();
        assert!(!rep.first_retract && !rep.composite_retract);
        assert!(rep.all_checks_pass());
    }
}

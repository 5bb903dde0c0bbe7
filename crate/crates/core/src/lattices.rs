//! G-lattices, equivariant maps and exact sequences.
//!
//! Matrices act on coordinate column vectors and `rho(gh) = rho(g) rho(h)`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input, Error, Result};
use crate::groups::{GSet, Group, GroupHom, Subgroup};
use crate::int::Int;
use crate::matrix::Matrix;
use crate::normal_form::{is_saturated, kernel, left_inverse, right_inverse, smith, smith_with};

struct LatticeInner {
    group: Group,
    rank: usize,
    gens: Vec<Matrix>,
    all: OnceLock<Vec<Matrix>>,
}

/// A free Z-module of finite rank with a group action by integer matrices,
/// one per group generator. Cloning is cheap.
#[derive(Clone)]
pub struct GLattice(Arc<LatticeInner>);

impl GLattice {
    /// Lattice given by the action of each generator. Verifies that the
    /// matrices define a representation of the group.
    pub fn new(group: Group, gens: Vec<Matrix>) -> Result<GLattice> {
        if gens.len() != group.generators().len() {
            return input(format!(
                "{} generator matrices given for a group with {} generators",
                gens.len(),
                group.generators().len()
            ));
        }
        let rank = gens.first().map(|m| m.rows()).unwrap_or(0);
        let rank = if gens.is_empty() { 0 } else { rank };
        for m in &gens {
            if m.rows() != rank || m.cols() != rank {
                return input("generator matrices must be square of equal size");
            }
        }
        let lat = GLattice::new_unchecked(group, rank, gens);
        lat.validate()?;
        Ok(lat)
    }

    /// Like `new` for a group without generators, where the rank cannot be
    /// read off the matrices.
    pub fn with_rank(group: Group, rank: usize, gens: Vec<Matrix>) -> Result<GLattice> {
        if gens.is_empty() && group.generators().is_empty() {
            return Ok(GLattice::trivial(&group, rank));
        }
        let lat = GLattice::new(group, gens)?;
        if lat.rank() != rank {
            return input(format!("declared rank {rank} but matrices have size {}", lat.rank()));
        }
        Ok(lat)
    }

    /// Skip the representation check; for lattices built from valid ones by
    /// constructions that preserve the homomorphism property.
    pub fn new_unchecked(group: Group, rank: usize, gens: Vec<Matrix>) -> GLattice {
        GLattice(Arc::new(LatticeInner { group, rank, gens, all: OnceLock::new() }))
    }

    fn validate(&self) -> Result<()> {
        let g = self.group().clone();
        let all = self.matrices();
        for e in 0..g.order() {
            for (j, &h) in g.generator_indices().iter().enumerate() {
                let he = g.mul(h, e);
                if self.0.gens[j].mul(&all[e]) != all[he] {
                    return input("matrices do not define a representation of the group");
                }
            }
        }
        Ok(())
    }

    pub fn trivial(group: &Group, rank: usize) -> GLattice {
        let gens = vec![Matrix::identity(rank); group.generators().len()];
        GLattice::new_unchecked(group.clone(), rank, gens)
    }

    pub fn zero(group: &Group) -> GLattice {
        GLattice::trivial(group, 0)
    }

    /// Rank-one lattice where generator `j` acts by `signs[j]`.
    pub fn character(group: &Group, signs: &[i64]) -> Result<GLattice> {
        let gens = signs.iter().map(|&s| Matrix::from_rows(&[[s]])).collect();
        GLattice::with_rank(group.clone(), 1, gens)
    }

    /// The permutation lattice `Z[X]`.
    pub fn permutation(x: &GSet) -> GLattice {
        let g = x.group();
        let gens = g
            .generator_indices()
            .iter()
            .map(|&h| Matrix::permutation(&x.permutation_of(h)))
            .collect();
        GLattice::new_unchecked(g.clone(), x.size(), gens)
    }

    pub fn group(&self) -> &Group {
        &self.0.group
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn generator_matrices(&self) -> &[Matrix] {
        &self.0.gens
    }

    /// Matrices of all group elements, indexed like `group().elements()`.
    pub fn matrices(&self) -> &[Matrix] {
        self.0.all.get_or_init(|| {
            let g = &self.0.group;
            let mut all = vec![Matrix::zeros(0, 0); g.order()];
            all[0] = Matrix::identity(self.rank());
            for e in g.bfs_order() {
                if let Some((parent, j)) = g.word_step(e) {
                    all[e] = self.0.gens[j].mul(&all[parent]);
                }
            }
            all
        })
    }

    /// Matrix of a single element, without forcing the full cache.
    pub fn matrix(&self, e: usize) -> Matrix {
        if let Some(all) = self.0.all.get() {
            return all[e].clone();
        }
        let g = &self.0.group;
        let mut m = Matrix::identity(self.rank());
        let mut steps = Vec::new();
        let mut x = e;
        while let Some((parent, j)) = g.word_step(x) {
            steps.push(j);
            x = parent;
        }
        // e = gens[steps[0]] * gens[steps[1]] * ...
        for &j in steps.iter().rev() {
            m = self.0.gens[j].mul(&m);
        }
        m
    }

    /// Matrices for the generators of a subgroup.
    pub fn subgroup_generator_matrices(&self, h: &Subgroup) -> Vec<Matrix> {
        h.generators().iter().map(|&e| self.matrix(e)).collect()
    }

    /// True when every generator acts by a permutation matrix.
    pub fn is_permutation_basis(&self) -> bool {
        self.0.gens.iter().all(|m| m.as_permutation().is_some())
    }

    pub fn same_action(&self, other: &GLattice) -> bool {
        self.group().same_as(other.group()) && self.rank() == other.rank() && self.0.gens == other.0.gens
    }

    /// `M° = Hom(M, Z)` with action `rho(g^-1)^T`.
    pub fn dual(&self) -> GLattice {
        let g = self.group();
        let gens = g
            .generator_indices()
            .iter()
            .map(|&h| self.matrix(g.inv(h)).transpose())
            .collect();
        GLattice::new_unchecked(g.clone(), self.rank(), gens)
    }

    pub fn direct_sum(parts: &[&GLattice]) -> Result<GLattice> {
        let Some(first) = parts.first() else {
            return input("direct sum of no lattices");
        };
        let g = first.group().clone();
        if parts.iter().any(|p| !p.group().same_as(&g)) {
            return input("direct sum over different groups");
        }
        let rank = parts.iter().map(|p| p.rank()).sum();
        let gens = (0..g.generators().len())
            .map(|j| {
                let blocks: Vec<&Matrix> = parts.iter().map(|p| &p.0.gens[j]).collect();
                Matrix::block_diag(&blocks)
            })
            .collect();
        Ok(GLattice::new_unchecked(g, rank, gens))
    }

    /// `M1 (x) M2` over a common group, basis index `i1 * rank2 + i2`.
    pub fn tensor(a: &GLattice, b: &GLattice) -> Result<GLattice> {
        if !a.group().same_as(b.group()) {
            return input("tensor product of lattices over different groups needs projections");
        }
        let gens = a.0.gens.iter().zip(&b.0.gens).map(|(x, y)| x.kron(y)).collect();
        Ok(GLattice::new_unchecked(a.group().clone(), a.rank() * b.rank(), gens))
    }

    /// Tensor product of lattices over two groups, pulled back to a common
    /// group through surjections onto each.
    pub fn tensor_via(a: &GLattice, b: &GLattice, pa: &GroupHom, pb: &GroupHom) -> Result<GLattice> {
        GLattice::tensor(&a.pullback(pa)?, &b.pullback(pb)?)
    }

    /// Inflate along `phi: G -> H` where this lattice lives over `H`.
    pub fn pullback(&self, phi: &GroupHom) -> Result<GLattice> {
        if !phi.target().same_as(self.group()) {
            return input("homomorphism target does not match the lattice's group");
        }
        let src = phi.source();
        let gens = src.generator_indices().iter().map(|&h| self.matrix(phi.apply(h))).collect();
        Ok(GLattice::new_unchecked(src.clone(), self.rank(), gens))
    }

    /// `Hom(M, N)` with `(g u) = rho_N(g) u rho_M(g)^-1`; a map `u` is stored
    /// as its row-major vectorization, so this is `N (x) M°` literally.
    pub fn hom(m: &GLattice, n: &GLattice) -> Result<GLattice> {
        GLattice::tensor(n, &m.dual())
    }

    /// Restriction to a subgroup (regarded as its own group).
    pub fn restrict(&self, h: &Subgroup) -> Result<GLattice> {
        if !h.parent().same_as(self.group()) {
            return input("subgroup of a different group");
        }
        let hg = h.as_group();
        let gens = self.subgroup_generator_matrices(h);
        Ok(GLattice::new_unchecked(hg, self.rank(), gens))
    }

    /// Saturated basis (as columns, Hermite form) of `M^H`.
    pub fn fixed_points(&self, h: &Subgroup) -> Matrix {
        let r = self.rank();
        let mats = self.subgroup_generator_matrices(h);
        if mats.is_empty() || r == 0 {
            return Matrix::identity(r);
        }
        let id = Matrix::identity(r);
        let diffs: Vec<Matrix> = mats.iter().map(|m| m.sub(&id)).collect();
        let refs: Vec<&Matrix> = diffs.iter().collect();
        kernel(&Matrix::vstack(&refs))
    }

    /// `M^G` for the whole group.
    pub fn invariants(&self) -> Matrix {
        self.fixed_points(&self.group().whole())
    }

    /// Sublattice spanned by the (saturated, invariant) columns of `basis`,
    /// with its inclusion map.
    pub fn sublattice(&self, basis: &Matrix) -> Result<(GLattice, LatticeMap)> {
        if basis.rows() != self.rank() {
            return input("sublattice basis has the wrong length");
        }
        if basis.cols() == 0 {
            let zero = GLattice::zero(self.group());
            let inc = LatticeMap::new_unchecked(zero.clone(), self.clone(), Matrix::zeros(self.rank(), 0));
            return Ok((zero, inc));
        }
        let Some(l) = left_inverse(basis) else {
            return input("sublattice basis is not saturated");
        };
        let mut gens = Vec::new();
        for m in self.generator_matrices() {
            let img = m.mul(basis);
            let coords = l.mul(&img);
            if basis.mul(&coords) != img {
                return input("sublattice is not invariant");
            }
            gens.push(coords);
        }
        let sub = GLattice::new_unchecked(self.group().clone(), basis.cols(), gens);
        let inc = LatticeMap::new_unchecked(sub.clone(), self.clone(), basis.clone());
        Ok((sub, inc))
    }

    /// Quotient by a saturated invariant sublattice, with the projection.
    pub fn quotient(&self, basis: &Matrix) -> Result<(GLattice, LatticeMap)> {
        let n = self.rank();
        if basis.rows() != n {
            return input("sublattice basis has the wrong length");
        }
        if basis.cols() > 0 && !is_saturated(basis) {
            return input("quotient by a non-saturated sublattice");
        }
        let k = basis.cols();
        let q = if k == 0 {
            Matrix::identity(n)
        } else {
            let s = smith_with(basis, true, false);
            let idx: Vec<usize> = (k..n).collect();
            s.u().select_rows(&idx)
        };
        let r = right_inverse(&q).unwrap_or_else(|| Matrix::zeros(n, 0));
        let mut gens = Vec::new();
        for m in self.generator_matrices() {
            if k > 0 && !q.mul(&m.mul(basis)).is_zero() {
                return input("sublattice is not invariant");
            }
            gens.push(q.mul(m).mul(&r));
        }
        let quo = GLattice::new_unchecked(self.group().clone(), n - k, gens);
        let proj = LatticeMap::new_unchecked(self.clone(), quo.clone(), q);
        Ok((quo, proj))
    }

    /// Basis of `Hom_G(M, N)` as `rank(N) x rank(M)` matrices.
    pub fn equivariant_maps(m: &GLattice, n: &GLattice) -> Result<Vec<Matrix>> {
        let h = GLattice::hom(m, n)?;
        let fixed = h.invariants();
        Ok(fixed
            .columns()
            .into_iter()
            .map(|v| Matrix::from_vector(&v, n.rank(), m.rank()))
            .collect())
    }

    /// Randomized search for an equivariant isomorphism `M -> N`.
    pub fn find_isomorphism(m: &GLattice, n: &GLattice, seed: u64, trials: usize) -> Result<Option<LatticeMap>> {
        if m.rank() != n.rank() {
            return Ok(None);
        }
        if m.rank() == 0 {
            return Ok(Some(LatticeMap::new_unchecked(m.clone(), n.clone(), Matrix::zeros(0, 0))));
        }
        let basis = GLattice::equivariant_maps(m, n)?;
        if basis.is_empty() {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..trials {
            let cand = if t < basis.len() {
                basis[t].clone()
            } else {
                let mut acc = Matrix::zeros(n.rank(), m.rank());
                for b in &basis {
                    let c: i64 = rng.gen_range(-2..=2);
                    if c != 0 {
                        acc = acc.add(&b.scale(&Int::from(c)));
                    }
                }
                acc
            };
            if cand.det().is_unit() {
                return Ok(Some(LatticeMap::new(m.clone(), n.clone(), cand)?));
            }
        }
        Ok(None)
    }
}

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GLattice(rank {} over {})", self.rank(), self.group().id())
    }
}

/// An equivariant homomorphism, stored as a `target.rank x source.rank`
/// matrix acting on column vectors.
#[derive(Clone)]
pub struct LatticeMap {
    source: GLattice,
    target: GLattice,
    matrix: Matrix,
}

impl LatticeMap {
    /// Checked constructor: shapes and equivariance on every generator.
    pub fn new(source: GLattice, target: GLattice, matrix: Matrix) -> Result<LatticeMap> {
        if !source.group().same_as(target.group()) {
            return input("map between lattices over different groups");
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return input(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            ));
        }
        for (a, b) in target.generator_matrices().iter().zip(source.generator_matrices()) {
            if a.mul(&matrix) != matrix.mul(b) {
                return input("map is not equivariant");
            }
        }
        Ok(LatticeMap { source, target, matrix })
    }

    pub fn new_unchecked(source: GLattice, target: GLattice, matrix: Matrix) -> LatticeMap {
        LatticeMap { source, target, matrix }
    }

    pub fn identity(m: &GLattice) -> LatticeMap {
        LatticeMap::new_unchecked(m.clone(), m.clone(), Matrix::identity(m.rank()))
    }

    pub fn zero(source: &GLattice, target: &GLattice) -> LatticeMap {
        LatticeMap::new_unchecked(source.clone(), target.clone(), Matrix::zeros(target.rank(), source.rank()))
    }

    pub fn source(&self) -> &GLattice {
        &self.source
    }

    pub fn target(&self) -> &GLattice {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `other` after `self`.
    pub fn then(&self, other: &LatticeMap) -> LatticeMap {
        LatticeMap::new_unchecked(self.source.clone(), other.target.clone(), other.matrix.mul(&self.matrix))
    }

    /// The transposed map between dual lattices.
    pub fn dual(&self) -> LatticeMap {
        LatticeMap::new_unchecked(self.target.dual(), self.source.dual(), self.matrix.transpose())
    }

    pub fn is_isomorphism(&self) -> bool {
        self.matrix.is_square() && self.matrix.det().is_unit()
    }

    pub fn is_equivariant(&self) -> bool {
        self.target
            .generator_matrices()
            .iter()
            .zip(self.source.generator_matrices())
            .all(|(a, b)| a.mul(&self.matrix) == self.matrix.mul(b))
    }
}

impl fmt::Debug for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeMap({} -> {}, {:?})", self.source.rank(), self.target.rank(), self.matrix)
    }
}

/// `0 -> T_0 -> T_1 -> ... -> T_k -> 0`; `maps[i]: terms[i] -> terms[i+1]`.
#[derive(Clone, Debug)]
pub struct ExactSequence {
    pub terms: Vec<GLattice>,
    pub maps: Vec<LatticeMap>,
}

/// Outcome of an exactness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub exact: bool,
    pub failing_node: Option<usize>,
    pub detail: String,
}

impl ExactSequence {
    pub fn new(maps: Vec<LatticeMap>) -> Result<ExactSequence> {
        let Some(first) = maps.first() else {
            return input("a sequence needs at least one map");
        };
        let mut terms = vec![first.source().clone()];
        for (i, m) in maps.iter().enumerate() {
            if i > 0 {
                let prev = &maps[i - 1];
                if prev.target().rank() != m.source().rank() {
                    return input(format!("maps {} and {} do not compose", i - 1, i));
                }
            }
            terms.push(m.target().clone());
        }
        Ok(ExactSequence { terms, maps })
    }

    /// `0 -> A -> B -> C -> 0` from `iota: A -> B` and `pi: B -> C`.
    pub fn short(iota: LatticeMap, pi: LatticeMap) -> Result<ExactSequence> {
        ExactSequence::new(vec![iota, pi])
    }

    pub fn is_short(&self) -> bool {
        self.terms.len() == 3
    }

    pub fn group(&self) -> &Group {
        self.terms[0].group()
    }

    /// Check that all compositions vanish and that the image of each
    /// incoming map equals the kernel of the outgoing map.
    pub fn verify_exactness(&self) -> ExactnessReport {
        for node in 0..self.terms.len() {
            if let Err(detail) = self.check_node(node) {
                return ExactnessReport { exact: false, failing_node: Some(node), detail };
            }
        }
        ExactnessReport { exact: true, failing_node: None, detail: String::new() }
    }

    pub fn check_exact(&self) -> Result<()> {
        let r = self.verify_exactness();
        match r.failing_node {
            None => Ok(()),
            Some(node) => Err(Error::NotExact { node, detail: r.detail }),
        }
    }

    fn check_node(&self, node: usize) -> std::result::Result<(), String> {
        let n = self.terms[node].rank();
        let incoming = if node > 0 { Some(&self.maps[node - 1]) } else { None };
        let outgoing = self.maps.get(node);
        if let Some(m) = incoming {
            if !m.is_equivariant() {
                return Err(format!("map into term {node} is not equivariant"));
            }
        }
        if let (Some(a), Some(b)) = (incoming, outgoing) {
            if !b.matrix().mul(a.matrix()).is_zero() {
                return Err("consecutive maps do not compose to zero".into());
            }
        }
        let rank_out = outgoing.map(|m| smith_with(m.matrix(), false, false).rank).unwrap_or(0);
        let kernel_rank = n - rank_out;
        let (rank_in, saturated) = match incoming {
            None => (0, true),
            Some(m) => {
                let s = smith_with(m.matrix(), false, false);
                (s.rank, s.invariants().iter().all(|d| d.is_one()))
            }
        };
        if rank_in != kernel_rank {
            return Err(format!("image has rank {rank_in} but kernel has rank {kernel_rank}"));
        }
        if !saturated {
            return Err("image is not saturated, so it is strictly smaller than the kernel".into());
        }
        Ok(())
    }

    /// Dual sequence: reversed terms, transposed maps.
    pub fn dual(&self) -> ExactSequence {
        let maps = self.maps.iter().rev().map(|m| m.dual()).collect();
        let terms = self.terms.iter().rev().map(|t| t.dual()).collect();
        ExactSequence { terms, maps }
    }

    /// Inflate every term along `phi`.
    pub fn pullback(&self, phi: &GroupHom) -> Result<ExactSequence> {
        let terms: Vec<GLattice> = self.terms.iter().map(|t| t.pullback(phi)).collect::<Result<_>>()?;
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| LatticeMap::new_unchecked(terms[i].clone(), terms[i + 1].clone(), m.matrix().clone()))
            .collect();
        Ok(ExactSequence { terms, maps })
    }
}

/// `(E_X): 0 -> I_X -> Z[X] -> Z -> 0`, with `I_X` on the basis
/// `[x] - [x_0]`, `x != x_0`.
pub fn augmentation_sequence(x: &GSet) -> Result<ExactSequence> {
    let n = x.size();
    if n == 0 {
        return input("augmentation sequence of an empty G-set");
    }
    let zx = GLattice::permutation(x);
    let mut iota = Matrix::zeros(n, n - 1);
    for k in 1..n {
        iota[(0, k - 1)] = Int::from(-1);
        iota[(k, k - 1)] = Int::ONE;
    }
    let drop_first: Vec<usize> = (1..n).collect();
    let left = Matrix::identity(n).select_rows(&drop_first);
    let g = x.group();
    let gens = zx.generator_matrices().iter().map(|m| left.mul(m).mul(&iota)).collect();
    let ix = GLattice::new_unchecked(g.clone(), n - 1, gens);
    let z = GLattice::trivial(g, 1);
    let eps = Matrix::from_int_rows(vec![vec![Int::ONE; n]], n);
    ExactSequence::short(
        LatticeMap::new(ix, zx.clone(), iota)?,
        LatticeMap::new(zx, z, eps)?,
    )
}

/// `I_X` on the basis `[x] - [x_0]`.
pub fn augmentation_ideal(x: &GSet) -> Result<GLattice> {
    Ok(augmentation_sequence(x)?.terms[0].clone())
}

/// `J_X = I_X°` and `(F_X): 0 -> Z -> Z[X] -> J_X -> 0` with the norm map
/// first and the transpose of the inclusion of `I_X` second.
pub fn chevalley_module(x: &GSet) -> Result<(GLattice, ExactSequence)> {
    let e = augmentation_sequence(x)?;
    let f = e.dual();
    // dual of Z[X] has the same matrices; rebuild with the permutation lattice itself
    let zx = GLattice::permutation(x);
    let jx = f.terms[2].clone();
    let z = GLattice::trivial(x.group(), 1);
    let seq = ExactSequence::short(
        LatticeMap::new(z, zx.clone(), f.maps[0].matrix().clone())?,
        LatticeMap::new(zx, jx.clone(), f.maps[1].matrix().clone())?,
    )?;
    Ok((jx, seq))
}

pub fn chevalley_lattice(x: &GSet) -> Result<GLattice> {
    Ok(chevalley_module(x)?.0)
}

/// Unimodularity check shared by isomorphism certificates.
pub fn is_unimodular(m: &Matrix) -> bool {
    m.is_square() && {
        let s = smith(m);
        s.rank == m.rows() && s.invariants().iter().all(|d| d.is_one())
    }
}

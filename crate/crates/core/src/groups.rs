//! Finite permutation groups, subgroups, G-sets and homomorphisms.
//!
//! Points are 0-based internally; the JSON layer converts from the 1-based
//! image arrays used in input files. Composition is `(g*h)(x) = g(h(x))` and
//! the element list of every group is sorted lexicographically by image
//! tuple, so the identity always has index 0.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{input, Error, Result};

/// Largest group order for which the multiplication table is built.
pub const MAX_GROUP_ORDER: usize = 2048;

/// Default bound on `|G|` for subgroup enumeration.
pub const DEFAULT_SUBGROUP_BOUND: usize = 512;

/// A permutation of `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    /// From 0-based images; validates that the map is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return input(format!("{images:?} is not a permutation of 0..{n}"));
            }
            seen[x] = true;
        }
        Ok(Perm(images.into_iter().map(|x| x as u32).collect()))
    }

    /// From 1-based images as used in JSON input.
    pub fn from_one_based(images: &[usize]) -> Result<Perm> {
        if images.iter().any(|&x| x == 0) {
            return input(format!("{images:?}: permutation entries are 1-based"));
        }
        Perm::from_images(images.iter().map(|&x| x - 1).collect())
    }

    /// From disjoint cycles written with 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut img: Vec<usize> = (0..degree).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                let y = c[(k + 1) % c.len()];
                if x == 0 || y == 0 || x > degree || y > degree {
                    return input(format!("cycle {c:?} leaves 1..{degree}"));
                }
                img[x - 1] = y - 1;
            }
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize + 1).collect()
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_based())
    }
}

/// Element set of a subgroup as a bitset over parent element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as usize;
                out.push(w * 64 + b);
                x &= x - 1;
            }
        }
        out
    }
}

pub type Group = Arc<FiniteGroup>;

/// A finite permutation group with its full element list and
/// multiplication table.
pub struct FiniteGroup {
    id: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    table: Vec<u32>,
    inverses: Vec<usize>,
    gen_idx: Vec<usize>,
    /// `element = generators[j] * parent` along a shortest word.
    word_parent: Vec<Option<(usize, usize)>>,
    classes: OnceLock<Vec<(Vec<usize>, Vec<usize>)>>,
}

impl FiniteGroup {
    /// Group generated by `gens` acting on `degree` points.
    pub fn from_generators(degree: usize, gens: Vec<Perm>, id: impl Into<String>) -> Result<Group> {
        if degree == 0 {
            return input("group degree must be positive");
        }
        for g in &gens {
            if g.degree() != degree {
                return input(format!("generator {g:?} does not act on {degree} points"));
            }
        }
        let id_perm = Perm::identity(degree);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id_perm.clone());
        let mut queue = VecDeque::from([id_perm]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = g.compose(&x);
                if !seen.contains(&y) {
                    if seen.len() >= MAX_GROUP_ORDER {
                        return Err(Error::Resource(format!(
                            "group order exceeds {MAX_GROUP_ORDER}"
                        )));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        let n = elements.len();
        let lookup: HashMap<Perm, usize> =
            elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = lookup[&elements[a].compose(&elements[b])] as u32;
            }
        }
        let inverses: Vec<usize> = elements.iter().map(|p| lookup[&p.inverse()]).collect();
        let gen_idx: Vec<usize> = gens.iter().map(|g| lookup[g]).collect();
        let mut word_parent = vec![None; n];
        let mut reached = vec![false; n];
        reached[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (j, &g) in gen_idx.iter().enumerate() {
                let y = table[g * n + x] as usize;
                if !reached[y] {
                    reached[y] = true;
                    word_parent[y] = Some((x, j));
                    queue.push_back(y);
                }
            }
        }
        Ok(Arc::new(FiniteGroup {
            id: id.into(),
            degree,
            generators: gens,
            elements,
            lookup,
            table,
            inverses,
            gen_idx,
            word_parent,
            classes: OnceLock::new(),
        }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Element indices of the generators, in generator order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.gen_idx
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elements.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g x g^-1`
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Shortest word for `e` as generator positions, applied right to left:
    /// `e = gens[w[0]] * gens[w[1]] * ... `.
    pub fn word(&self, mut e: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while let Some((parent, j)) = self.word_parent[e] {
            w.push(j);
            e = parent;
        }
        w
    }

    /// Parent step of the breadth-first word tree (`None` for the identity).
    pub fn word_step(&self, e: usize) -> Option<(usize, usize)> {
        self.word_parent[e]
    }

    /// Elements in breadth-first order from the identity, so that every
    /// element appears after its word parent.
    pub fn bfs_order(&self) -> Vec<usize> {
        let n = self.order();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[0] = true;
        order.push(0);
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            k += 1;
            for &g in &self.gen_idx {
                let y = self.mul(g, x);
                if !seen[y] && self.word_parent[y].map(|p| p.0) == Some(x) {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
        order
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.gen_idx
            .iter()
            .all(|&a| self.gen_idx.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order();
        (0..n).any(|a| self.element_order(a) == n)
    }

    /// True when both are the same permutation group (same degree and
    /// element set).
    pub fn same_as(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || (self.degree == other.degree && self.elements == other.elements)
    }

    fn closure_bits(&self, gens: &[usize]) -> Bits {
        let n = self.order();
        let mut bits = Bits::new(n);
        bits.set(0);
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !bits.get(y) {
                    bits.set(y);
                    stack.push(y);
                }
            }
        }
        bits
    }

    /// Greedy generating set: scan the elements in order and keep those not
    /// already generated.
    fn greedy_generators(&self, elements: &[usize]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut have = self.closure_bits(&gens);
        for &e in elements {
            if !have.get(e) {
                gens.push(e);
                have = self.closure_bits(&gens);
            }
        }
        gens
    }

    pub fn trivial_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup::from_parts(self.clone(), vec![0], vec![])
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        let elements: Vec<usize> = (0..self.order()).collect();
        Subgroup::from_parts(self.clone(), elements, self.gen_idx.clone())
    }

    /// Subgroup generated by the given element indices.
    pub fn subgroup_generated(self: &Arc<Self>, gens: &[usize]) -> Subgroup {
        let bits = self.closure_bits(gens);
        let elements = bits.ones();
        let gens = self.greedy_generators(gens);
        Subgroup::from_parts(self.clone(), elements, gens)
    }

    /// Subgroup with the given elements; errors if the set is not a subgroup.
    pub fn subgroup_from_elements(self: &Arc<Self>, elements: &[usize]) -> Result<Subgroup> {
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.iter().any(|&e| e >= self.order()) {
            return input("subgroup element out of range");
        }
        let sub = self.subgroup_generated(&sorted);
        if sub.elements != sorted {
            return input("element set is not closed under multiplication");
        }
        Ok(sub)
    }

    /// Subgroup of elements given as permutations.
    pub fn subgroup_from_perms(self: &Arc<Self>, perms: &[Perm], closed: bool) -> Result<Subgroup> {
        let mut idx = Vec::with_capacity(perms.len());
        for p in perms {
            match self.index_of(p) {
                Some(i) => idx.push(i),
                None => return input(format!("{p:?} is not an element of {}", self.id)),
            }
        }
        if closed {
            self.subgroup_from_elements(&idx)
        } else {
            Ok(self.subgroup_generated(&idx))
        }
    }

    fn cyclic_subgroup_bits(&self) -> Vec<(Bits, usize)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for a in 0..self.order() {
            let b = self.closure_bits(&[a]);
            if seen.insert(b.clone()) {
                out.push((b, a));
            }
        }
        out
    }

    fn conjugate_bits(&self, bits: &Bits, g: usize) -> Bits {
        let mut out = Bits::new(self.order());
        for x in bits.ones() {
            out.set(self.conjugate(g, x));
        }
        out
    }

    /// One representative per conjugacy class of subgroups, sorted by order
    /// and then by element list. Fails when `|G| > bound`.
    pub fn subgroup_classes(self: &Arc<Self>, bound: usize) -> Result<Vec<Subgroup>> {
        if self.order() > bound {
            return Err(Error::Resource(format!(
                "subgroup enumeration for |G| = {} exceeds the bound {bound}",
                self.order()
            )));
        }
        let raw = self.classes.get_or_init(|| self.compute_classes());
        Ok(raw
            .iter()
            .map(|(el, gens)| Subgroup::from_parts(self.clone(), el.clone(), gens.clone()))
            .collect())
    }

    fn compute_classes(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let n = self.order();
        let cyclic = self.cyclic_subgroup_bits();
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut reps: Vec<(Bits, Vec<usize>)> = Vec::new();
        let trivial = self.closure_bits(&[]);
        seen.insert(trivial.clone());
        reps.push((trivial, vec![]));
        let mut queue = VecDeque::from([0usize]);
        while let Some(r) = queue.pop_front() {
            let (sbits, sgens) = reps[r].clone();
            for (cbits, c) in &cyclic {
                if cbits.is_subset(&sbits) {
                    continue;
                }
                let mut gens = sgens.clone();
                gens.push(*c);
                let j = self.closure_bits(&gens);
                if seen.contains(&j) {
                    continue;
                }
                for g in 0..n {
                    seen.insert(self.conjugate_bits(&j, g));
                }
                reps.push((j, gens));
                queue.push_back(reps.len() - 1);
            }
        }
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = reps
            .into_iter()
            .map(|(b, gens)| {
                let el = b.ones();
                let gens = self.greedy_generators(&gens);
                (el, gens)
            })
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Every subgroup (all conjugates of the class representatives).
    pub fn all_subgroups(self: &Arc<Self>, bound: usize) -> Result<Vec<Subgroup>> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for rep in self.subgroup_classes(bound)? {
            for g in 0..self.order() {
                let c = rep.conjugate(g);
                if seen.insert(c.elements.clone()) {
                    out.push(c);
                }
            }
        }
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
        Ok(out)
    }

    /// Representatives of conjugacy classes of cyclic subgroups.
    pub fn cyclic_subgroup_classes(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut out = Vec::new();
        for (bits, a) in self.cyclic_subgroup_bits() {
            if seen.contains(&bits) {
                continue;
            }
            for g in 0..self.order() {
                seen.insert(self.conjugate_bits(&bits, g));
            }
            out.push(Subgroup::from_parts(self.clone(), bits.ones(), if a == 0 { vec![] } else { vec![a] }));
        }
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
        out
    }

    /// A Sylow `p`-subgroup (trivial if `p` does not divide the order).
    pub fn sylow_subgroup(self: &Arc<Self>, p: usize) -> Result<Subgroup> {
        if !is_prime(p) {
            return input(format!("{p} is not prime"));
        }
        let mut target = 1;
        let mut n = self.order();
        while n % p == 0 {
            n /= p;
            target *= p;
        }
        let mut gens: Vec<usize> = Vec::new();
        let mut bits = self.closure_bits(&gens);
        let mut size = 1;
        let p_elements: Vec<usize> =
            (1..self.order()).filter(|&a| is_power_of(self.element_order(a), p)).collect();
        // a maximal p-subgroup is a Sylow subgroup
        while size < target {
            let mut grown = false;
            for &a in &p_elements {
                if bits.get(a) {
                    continue;
                }
                let mut trial = gens.clone();
                trial.push(a);
                let tb = self.closure_bits(&trial);
                let tsize = tb.ones().len();
                if is_power_of(tsize, p) {
                    gens = trial;
                    bits = tb;
                    size = tsize;
                    grown = true;
                    break;
                }
            }
            if !grown {
                break;
            }
        }
        debug_assert_eq!(size, target);
        Ok(Subgroup::from_parts(self.clone(), bits.ones(), gens))
    }

    pub fn prime_divisors(&self) -> Vec<usize> {
        prime_factors(self.order())
    }

    /// True when every Sylow subgroup is cyclic.
    pub fn all_sylow_cyclic(self: &Arc<Self>) -> bool {
        self.prime_divisors().into_iter().all(|p| {
            let s = self.sylow_subgroup(p).expect("prime");
            s.as_group().is_cyclic()
        })
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {}, degree {})", self.id, self.order(), self.degree)
    }
}

pub fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A subgroup of a finite group, stored as sorted parent element indices.
#[derive(Clone)]
pub struct Subgroup {
    group: Group,
    elements: Vec<usize>,
    generators: Vec<usize>,
    as_group: OnceLock<Group>,
}

impl Subgroup {
    fn from_parts(group: Group, elements: Vec<usize>, generators: Vec<usize>) -> Subgroup {
        Subgroup { group, elements, generators, as_group: OnceLock::new() }
    }

    pub fn parent(&self) -> &Group {
        &self.group
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.order()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.group.order()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// `g H g^-1`
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let mut el: Vec<usize> = self.elements.iter().map(|&x| self.group.conjugate(g, x)).collect();
        el.sort_unstable();
        let gens = self.generators.iter().map(|&x| self.group.conjugate(g, x)).collect();
        Subgroup::from_parts(self.group.clone(), el, gens)
    }

    pub fn is_normal(&self) -> bool {
        self.group
            .generator_indices()
            .iter()
            .all(|&g| self.elements.iter().all(|&x| self.contains(self.group.conjugate(g, x))))
    }

    /// Left cosets `gH`, each sorted, ordered by smallest element.
    pub fn left_cosets(&self) -> Vec<Vec<usize>> {
        let n = self.group.order();
        let mut assigned = vec![false; n];
        let mut cosets = Vec::new();
        for g in 0..n {
            if assigned[g] {
                continue;
            }
            let mut c: Vec<usize> = self.elements.iter().map(|&h| self.group.mul(g, h)).collect();
            c.sort_unstable();
            for &x in &c {
                assigned[x] = true;
            }
            cosets.push(c);
        }
        cosets
    }

    /// The subgroup as a permutation group in its own right. Its element
    /// `i` is parent element `self.elements()[i]`, and its generators are
    /// `self.generators()`.
    pub fn as_group(&self) -> Group {
        self.as_group
            .get_or_init(|| {
                let gens = self.generators.iter().map(|&g| self.group.element(g).clone()).collect();
                let id = if self.is_whole() {
                    self.group.id().to_string()
                } else {
                    format!("{}<{}>", self.group.id(), self.order())
                };
                let g = FiniteGroup::from_generators(self.group.degree(), gens, id)
                    .expect("subgroup of a valid group");
                debug_assert_eq!(g.order(), self.order());
                g
            })
            .clone()
    }

    /// Map from elements of `as_group()` to parent indices.
    pub fn embedding(&self) -> &[usize] {
        &self.elements
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Subgroup) -> bool {
        self.group.same_as(&other.group) && self.elements == other.elements
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} in {})", self.order(), self.group.id())
    }
}

/// A homomorphism of finite groups stored by the image of every element.
#[derive(Clone)]
pub struct GroupHom {
    source: Group,
    target: Group,
    images: Vec<usize>,
}

impl GroupHom {
    /// Extend generator images to a homomorphism, verifying that the
    /// assignment respects all relations.
    pub fn from_generator_images(source: Group, target: Group, gen_images: &[usize]) -> Result<GroupHom> {
        if gen_images.len() != source.generators().len() {
            return input(format!(
                "expected {} generator images, got {}",
                source.generators().len(),
                gen_images.len()
            ));
        }
        if gen_images.iter().any(|&x| x >= target.order()) {
            return input("generator image out of range");
        }
        let n = source.order();
        let mut images = vec![usize::MAX; n];
        images[0] = 0;
        for e in source.bfs_order() {
            if let Some((parent, j)) = source.word_step(e) {
                images[e] = target.mul(gen_images[j], images[parent]);
            }
        }
        for e in 0..n {
            for (j, &g) in source.generator_indices().iter().enumerate() {
                let ge = source.mul(g, e);
                if images[ge] != target.mul(gen_images[j], images[e]) {
                    return input("generator images do not define a homomorphism");
                }
            }
        }
        Ok(GroupHom { source, target, images })
    }

    pub fn from_generator_perms(source: Group, target: Group, perms: &[Perm]) -> Result<GroupHom> {
        let mut idx = Vec::with_capacity(perms.len());
        for p in perms {
            match target.index_of(p) {
                Some(i) => idx.push(i),
                None => return input(format!("{p:?} is not an element of {}", target.id())),
            }
        }
        GroupHom::from_generator_images(source, target, &idx)
    }

    pub fn identity(g: &Group) -> GroupHom {
        GroupHom { source: g.clone(), target: g.clone(), images: (0..g.order()).collect() }
    }

    /// Inclusion of a subgroup (as its own group) into the parent.
    pub fn inclusion(h: &Subgroup) -> GroupHom {
        GroupHom { source: h.as_group(), target: h.parent().clone(), images: h.elements().to_vec() }
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    #[inline]
    pub fn apply(&self, e: usize) -> usize {
        self.images[e]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.into_iter().all(|x| x)
    }

    pub fn kernel(&self) -> Subgroup {
        let el: Vec<usize> = (0..self.source.order()).filter(|&e| self.images[e] == 0).collect();
        self.source.subgroup_from_elements(&el).expect("kernel is a subgroup")
    }

    /// Preimage of a subgroup of the target.
    pub fn preimage(&self, h: &Subgroup) -> Subgroup {
        let el: Vec<usize> = (0..self.source.order()).filter(|&e| h.contains(self.images[e])).collect();
        self.source.subgroup_from_elements(&el).expect("preimage is a subgroup")
    }
}

/// A finite set with a left action of a group.
#[derive(Clone)]
pub struct GSet {
    group: Group,
    size: usize,
    /// `action[e * size + x]`
    action: Vec<u32>,
}

impl GSet {
    /// Build from the permutation of points induced by each group element.
    pub fn from_fn(group: Group, size: usize, f: impl Fn(usize, usize) -> usize) -> Result<GSet> {
        let n = group.order();
        let mut action = vec![0u32; n * size];
        for e in 0..n {
            for x in 0..size {
                let y = f(e, x);
                if y >= size {
                    return input("action leaves the point set");
                }
                action[e * size + x] = y as u32;
            }
        }
        let s = GSet { group, size, action };
        s.validate()?;
        Ok(s)
    }

    /// Build from the action of each generator, given as 0-based images.
    pub fn from_generator_action(group: Group, size: usize, gen_images: &[Vec<usize>]) -> Result<GSet> {
        if gen_images.len() != group.generators().len() {
            return input("one point permutation per generator is required");
        }
        let perms: Vec<Perm> = gen_images.iter().map(|v| Perm::from_images(v.clone())).collect::<Result<_>>()?;
        if perms.iter().any(|p| p.degree() != size) {
            return input("generator action has the wrong number of points");
        }
        let n = group.order();
        let mut action = vec![0u32; n * size];
        for x in 0..size {
            action[x] = x as u32;
        }
        for e in group.bfs_order() {
            if let Some((parent, j)) = group.word_step(e) {
                for x in 0..size {
                    let y = action[parent * size + x];
                    action[e * size + x] = perms[j].0[y as usize];
                }
            }
        }
        let s = GSet { group, size, action };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        for x in 0..self.size {
            if self.act(0, x) != x {
                return input("identity does not act trivially");
            }
        }
        for e in 0..g.order() {
            for &h in g.generator_indices() {
                let he = g.mul(h, e);
                for x in 0..self.size {
                    if self.act(he, x) != self.act(h, self.act(e, x)) {
                        return input("point maps do not define a group action");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn act(&self, e: usize, x: usize) -> usize {
        self.action[e * self.size + x] as usize
    }

    /// Images of all points under `e`.
    pub fn permutation_of(&self, e: usize) -> Vec<usize> {
        (0..self.size).map(|x| self.act(e, x)).collect()
    }

    /// Orbits, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for x in 0..self.size {
            if seen[x] {
                continue;
            }
            let mut orb: Vec<usize> = (0..self.group.order()).map(|e| self.act(e, x)).collect();
            orb.sort_unstable();
            orb.dedup();
            for &y in &orb {
                seen[y] = true;
            }
            out.push(orb);
        }
        out
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits().iter().map(|o| o.len()).collect()
    }

    pub fn is_transitive(&self) -> bool {
        self.size > 0 && self.orbits().len() == 1
    }

    /// Number of points fixed by every element of `k`.
    pub fn fixed_point_count(&self, k: &Subgroup) -> usize {
        (0..self.size).filter(|&x| k.generators().iter().all(|&h| self.act(h, x) == x)).count()
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        let el: Vec<usize> = (0..self.group.order()).filter(|&e| self.act(e, x) == x).collect();
        self.group.subgroup_from_elements(&el).expect("stabilizer is a subgroup")
    }

    /// Left cosets of `h` with the translation action. Coset order follows
    /// `Subgroup::left_cosets`, so the coset of `h` itself is point 0.
    pub fn cosets(h: &Subgroup) -> GSet {
        let g = h.parent().clone();
        let cosets = h.left_cosets();
        let mut which = vec![0usize; g.order()];
        for (i, c) in cosets.iter().enumerate() {
            for &x in c {
                which[x] = i;
            }
        }
        let reps: Vec<usize> = cosets.iter().map(|c| c[0]).collect();
        let size = cosets.len();
        GSet::from_fn(g.clone(), size, |e, x| which[g.mul(e, reps[x])]).expect("coset action")
    }

    /// Disjoint union; points of later sets are shifted past earlier ones.
    pub fn disjoint_union(sets: &[GSet]) -> Result<GSet> {
        let Some(first) = sets.first() else {
            return input("disjoint union of no G-sets");
        };
        let group = first.group.clone();
        if sets.iter().any(|s| !s.group.same_as(&group)) {
            return input("disjoint union over different groups");
        }
        let size: usize = sets.iter().map(|s| s.size).sum();
        let mut offsets = Vec::new();
        let mut off = 0;
        for s in sets {
            offsets.push(off);
            off += s.size;
        }
        GSet::from_fn(group, size, |e, x| {
            let k = (0..sets.len())
                .find(|&k| x < offsets[k] + sets[k].size)
                .expect("point within the union");
            offsets[k] + sets[k].act(e, x - offsets[k])
        })
    }

    /// Product `X x Y` with point `(x, y)` at index `x * |Y| + y`.
    pub fn product(x: &GSet, y: &GSet) -> Result<GSet> {
        if !x.group.same_as(&y.group) {
            return input("product of G-sets over different groups");
        }
        let ny = y.size;
        GSet::from_fn(x.group.clone(), x.size * ny, |e, p| x.act(e, p / ny) * ny + y.act(e, p % ny))
    }

    /// Pull back along a homomorphism `phi: G -> self.group()`.
    pub fn pullback(&self, phi: &GroupHom) -> Result<GSet> {
        if !phi.target().same_as(&self.group) {
            return input("homomorphism target does not match the G-set's group");
        }
        GSet::from_fn(phi.source().clone(), self.size, |e, x| self.act(phi.apply(e), x))
    }

    /// Restrict the action to a subgroup (regarded as its own group).
    pub fn restrict(&self, h: &Subgroup) -> GSet {
        self.pullback(&GroupHom::inclusion(h)).expect("inclusion into own group")
    }

    /// Single orbit as a G-set.
    pub fn orbit_gset(&self, orbit: &[usize]) -> GSet {
        let pos: HashMap<usize, usize> = orbit.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        GSet::from_fn(self.group.clone(), orbit.len(), |e, i| pos[&self.act(e, orbit[i])]).expect("orbit is invariant")
    }
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GSet(size {}, orbits {:?}, group {})", self.size, self.orbit_sizes(), self.group.id())
    }
}

/// Direct product `G1 x G2` acting on `d1 + d2` points, with projections.
pub fn direct_product(g1: &Group, g2: &Group) -> Result<(Group, GroupHom, GroupHom)> {
    let (d1, d2) = (g1.degree(), g2.degree());
    let lift = |p: &Perm, first: bool| -> Perm {
        let mut img: Vec<usize> = (0..d1 + d2).collect();
        for x in 0..p.degree() {
            if first {
                img[x] = p.apply(x);
            } else {
                img[d1 + x] = d1 + p.apply(x);
            }
        }
        Perm::from_images(img).expect("lifted permutation")
    };
    let mut gens: Vec<Perm> = g1.generators().iter().map(|p| lift(p, true)).collect();
    gens.extend(g2.generators().iter().map(|p| lift(p, false)));
    let id = format!("{}x{}", g1.id(), g2.id());
    let g = FiniteGroup::from_generators(d1 + d2, gens, id)?;
    let (p1, p2) = projections(&g, g1, g2)?;
    Ok((g, p1, p2))
}

fn projections(g: &Group, g1: &Group, g2: &Group) -> Result<(GroupHom, GroupHom)> {
    let d1 = g1.degree();
    let mut im1 = Vec::new();
    let mut im2 = Vec::new();
    for p in g.generators() {
        let a: Vec<usize> = (0..d1).map(|x| p.apply(x)).collect();
        let b: Vec<usize> = (d1..g.degree()).map(|x| p.apply(x) - d1).collect();
        im1.push(Perm::from_images(a)?);
        im2.push(Perm::from_images(b)?);
    }
    Ok((
        GroupHom::from_generator_perms(g.clone(), g1.clone(), &im1)?,
        GroupHom::from_generator_perms(g.clone(), g2.clone(), &im2)?,
    ))
}

/// A subgroup of `G1 x G2` surjecting onto both factors.
#[derive(Clone)]
pub struct SubdirectProduct {
    pub group: Group,
    pub factors: (Group, Group),
    pub projections: (GroupHom, GroupHom),
    /// Kernels of the quotient maps in the classifying triple, as element
    /// lists of the factors.
    pub normal_subgroups: (Vec<usize>, Vec<usize>),
}

struct Quotient {
    of: Vec<usize>,
    reps: Vec<usize>,
    table: Vec<usize>,
}

impl Quotient {
    fn new(g: &Group, n: &Subgroup) -> Quotient {
        let cosets = n.left_cosets();
        let mut of = vec![0; g.order()];
        for (i, c) in cosets.iter().enumerate() {
            for &x in c {
                of[x] = i;
            }
        }
        let reps: Vec<usize> = cosets.iter().map(|c| c[0]).collect();
        let q = reps.len();
        let mut table = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                table[a * q + b] = of[g.mul(reps[a], reps[b])];
            }
        }
        Quotient { of, reps, table }
    }

    fn order(&self) -> usize {
        self.reps.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    fn elem_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

/// All isomorphisms `q1 -> q2`, as image arrays on coset indices.
fn quotient_isomorphisms(q1: &Quotient, gens1: &[usize], q2: &Quotient) -> Vec<Vec<usize>> {
    let n = q1.order();
    if n != q2.order() {
        return vec![];
    }
    // reduce to an irredundant generating set of q1
    let mut gens: Vec<usize> = Vec::new();
    let closure = |gs: &[usize]| -> Vec<bool> {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gs {
                let y = q1.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    };
    let mut have = closure(&gens);
    for &g in gens1 {
        if !have[g] {
            gens.push(g);
            have = closure(&gens);
        }
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = q1.elem_order(g);
            (0..n).filter(|&y| q2.elem_order(y) == o).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        if candidates.iter().any(|c| c.is_empty()) {
            break;
        }
        let imgs: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_quotient_hom(q1, &gens, q2, &imgs) {
            out.push(map);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
    out
}

fn extend_quotient_hom(q1: &Quotient, gens: &[usize], q2: &Quotient, imgs: &[usize]) -> Option<Vec<usize>> {
    let n = q1.order();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for (g, &im) in gens.iter().zip(imgs) {
            let y = q1.mul(*g, x);
            let val = q2.mul(im, map[x]);
            if map[y] == usize::MAX {
                map[y] = val;
                stack.push(y);
            } else if map[y] != val {
                return None;
            }
        }
    }
    if map.iter().any(|&v| v == usize::MAX) {
        return None;
    }
    let mut hit = vec![false; n];
    for &v in &map {
        if hit[v] {
            return None;
        }
        hit[v] = true;
    }
    Some(map)
}

fn small_generating_set(degree: usize, perms: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut have: HashSet<Perm> = HashSet::from([Perm::identity(degree)]);
    for p in perms {
        if have.contains(p) {
            continue;
        }
        gens.push(p.clone());
        let mut stack: Vec<Perm> = have.iter().cloned().collect();
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = x.compose(g);
                if have.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
    }
    gens
}

/// All subdirect products of `G1 x G2`, one per triple `(N1, N2, theta)`
/// with `N_i` normal and `theta: G1/N1 -> G2/N2` an isomorphism.
pub fn subdirect_products(g1: &Group, g2: &Group, bound: usize) -> Result<Vec<SubdirectProduct>> {
    if g1.order() * g2.order() > bound {
        return Err(Error::Resource(format!(
            "|G1|*|G2| = {} exceeds the bound {bound}",
            g1.order() * g2.order()
        )));
    }
    let normals = |g: &Group| -> Result<Vec<Subgroup>> {
        Ok(g.subgroup_classes(bound)?.into_iter().filter(|h| h.is_normal()).collect())
    };
    let n1s = normals(g1)?;
    let n2s = normals(g2)?;
    let d1 = g1.degree();
    let mut out = Vec::new();
    for n1 in &n1s {
        let q1 = Quotient::new(g1, n1);
        let gens1: Vec<usize> = g1.generator_indices().iter().map(|&g| q1.of[g]).collect();
        for n2 in &n2s {
            if n1.index() != n2.index() {
                continue;
            }
            let q2 = Quotient::new(g2, n2);
            for theta in quotient_isomorphisms(&q1, &gens1, &q2) {
                let mut perms = Vec::new();
                for a in 0..g1.order() {
                    let target = theta[q1.of[a]];
                    for b in 0..g2.order() {
                        if q2.of[b] != target {
                            continue;
                        }
                        let mut img = g1.element(a).images();
                        img.extend(g2.element(b).images().into_iter().map(|y| y + d1));
                        perms.push(Perm::from_images(img)?);
                    }
                }
                perms.sort();
                let gens = small_generating_set(d1 + g2.degree(), &perms);
                let id = format!("{}x{}[{}]", g1.id(), g2.id(), out.len());
                let group = FiniteGroup::from_generators(d1 + g2.degree(), gens, id)?;
                debug_assert_eq!(group.order(), perms.len());
                let (p1, p2) = projections(&group, g1, g2)?;
                out.push(SubdirectProduct {
                    group,
                    factors: (g1.clone(), g2.clone()),
                    projections: (p1, p2),
                    normal_subgroups: (n1.elements().to_vec(), n2.elements().to_vec()),
                });
            }
        }
    }
    Ok(out)
}

/// Standard small groups used throughout tests and examples.
pub mod named {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images((0..n).map(|i| (i + 1) % n).collect()).expect("cycle")
    }

    pub fn cyclic(n: usize) -> Group {
        let gens = if n == 1 { vec![] } else { vec![cycle(n)] };
        FiniteGroup::from_generators(n.max(1), gens, format!("C{n}")).expect("cyclic group")
    }

    pub fn symmetric(n: usize) -> Group {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Perm::from_cycles(n, &[&[1, 2]]).expect("transposition"));
        }
        if n >= 3 {
            gens.push(cycle(n));
        }
        FiniteGroup::from_generators(n, gens, format!("S{n}")).expect("symmetric group")
    }

    pub fn alternating(n: usize) -> Group {
        let gens: Vec<Perm> = (3..=n)
            .map(|k| Perm::from_cycles(n, &[&[1, 2, k]]).expect("3-cycle"))
            .collect();
        FiniteGroup::from_generators(n, gens, format!("A{n}")).expect("alternating group")
    }

    /// Dihedral group of order `2n` acting on an `n`-gon.
    pub fn dihedral(n: usize) -> Group {
        let r = cycle(n);
        let s = Perm::from_images((0..n).map(|i| (n - i) % n).collect()).expect("reflection");
        FiniteGroup::from_generators(n, vec![r, s], format!("D{}", 2 * n)).expect("dihedral group")
    }

    /// `C2 x C2` on four points, generated by `(1 2)` and `(3 4)`.
    pub fn klein_four() -> Group {
        let a = Perm::from_cycles(4, &[&[1, 2]]).expect("perm");
        let b = Perm::from_cycles(4, &[&[3, 4]]).expect("perm");
        FiniteGroup::from_generators(4, vec![a, b], "C2xC2").expect("klein four")
    }

    /// Quaternion group in its regular representation on 8 points.
    pub fn quaternion() -> Group {
        // units ±1, ±i, ±j, ±k as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k
        let idx = |neg: bool, axis: usize| axis * 2 + neg as usize;
        let mul = |a: usize, b: usize| -> usize {
            let (sa, xa) = (a % 2 == 1, a / 2);
            let (sb, xb) = (b % 2 == 1, b / 2);
            // product of basis units
            let (s, x) = match (xa, xb) {
                (0, y) => (false, y),
                (y, 0) => (false, y),
                (p, q) if p == q => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            };
            idx(s ^ sa ^ sb, x)
        };
        let left = |u: usize| Perm::from_images((0..8).map(|b| mul(u, b)).collect()).expect("perm");
        FiniteGroup::from_generators(8, vec![left(idx(false, 1)), left(idx(false, 2))], "Q8")
            .expect("quaternion group")
    }

    pub fn product(g1: &Group, g2: &Group) -> Group {
        direct_product(g1, g2).expect("direct product").0
    }
}

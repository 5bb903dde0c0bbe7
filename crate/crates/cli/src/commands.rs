//! Report builders for the commands that are thin wrappers around the
//! library.

use serde::Serialize;

use glattice::abelian::AbelianGroupStructure;
use glattice::cohomology::{h0, h1, h2, sha2_omega_direct, tate_h0, tate_h_minus1};
use glattice::error::Result;
use glattice::extensions::extension_order;
use glattice::groups::{prime_factors, Group};
use glattice::int::Int;
use glattice::lattices::{ExactSequence, GLattice};
use glattice::resolutions::{is_invertible, local_permutation_order, permutation_order, permutation_order_by_resolution};

#[derive(Serialize)]
pub struct SubgroupInfo {
    pub order: usize,
    pub index: usize,
    pub normal: bool,
    pub cyclic: bool,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Serialize)]
pub struct GroupInfo {
    pub id: String,
    pub order: usize,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
    pub abelian: bool,
    pub cyclic: bool,
    pub all_sylow_cyclic: bool,
    pub subgroup_classes: Vec<SubgroupInfo>,
}

pub fn group_info(g: &Group, bound: usize) -> Result<GroupInfo> {
    let classes = g.subgroup_classes(bound)?;
    Ok(GroupInfo {
        id: g.id().to_string(),
        order: g.order(),
        degree: g.degree(),
        generators: g.generators().iter().map(|p| p.one_based()).collect(),
        abelian: g.is_abelian(),
        cyclic: g.is_cyclic(),
        all_sylow_cyclic: g.all_sylow_cyclic(),
        subgroup_classes: classes
            .iter()
            .map(|h| SubgroupInfo {
                order: h.order(),
                index: h.index(),
                normal: h.is_normal(),
                cyclic: h.as_group().is_cyclic(),
                generators: h.generators().iter().map(|&e| g.element(e).one_based()).collect(),
            })
            .collect(),
    })
}

impl GroupInfo {
    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "Group {} of order {} on {} points; abelian: {}, cyclic: {}, all Sylow subgroups cyclic: {}.\n\n",
            self.id, self.order, self.degree, self.abelian, self.cyclic, self.all_sylow_cyclic
        );
        out.push_str("| order | index | normal | cyclic | generators |\n|---|---|---|---|---|\n");
        for s in &self.subgroup_classes {
            out.push_str(&format!("| {} | {} | {} | {} | {:?} |\n", s.order, s.index, s.normal, s.cyclic, s.generators));
        }
        out
    }
}

#[derive(Serialize)]
pub struct SubgroupCohomologyRow {
    pub order: usize,
    pub generators: Vec<Vec<usize>>,
    pub h0_rank: usize,
    pub h1: AbelianGroupStructure,
    pub tate_h0: AbelianGroupStructure,
    pub tate_h_minus1: AbelianGroupStructure,
}

#[derive(Serialize)]
pub struct LatticeCohomology {
    pub group: String,
    pub rank: usize,
    pub subgroups: Vec<SubgroupCohomologyRow>,
    pub h2: Option<AbelianGroupStructure>,
    pub sha2_omega: Option<AbelianGroupStructure>,
    pub flabby: bool,
    pub coflabby: bool,
}

pub fn lattice_cohomology(m: &GLattice, bound: usize, bound_h2: usize) -> Result<LatticeCohomology> {
    let g = m.group().clone();
    let mut rows = Vec::new();
    for h in g.subgroup_classes(bound)? {
        rows.push(SubgroupCohomologyRow {
            order: h.order(),
            generators: h.generators().iter().map(|&e| g.element(e).one_based()).collect(),
            h0_rank: h0(m, &h)?.0,
            h1: h1(m, &h)?,
            tate_h0: tate_h0(m, &h)?,
            tate_h_minus1: tate_h_minus1(m, &h)?,
        });
    }
    let (h2v, sha) = if g.order() <= bound_h2 {
        (Some(h2(m, &g.whole(), bound_h2)?), Some(sha2_omega_direct(m, bound_h2)?))
    } else {
        (None, None)
    };
    Ok(LatticeCohomology {
        group: g.id().to_string(),
        rank: m.rank(),
        flabby: rows.iter().all(|r| r.tate_h_minus1.is_trivial()),
        coflabby: rows.iter().all(|r| r.h1.is_trivial()),
        subgroups: rows,
        h2: h2v,
        sha2_omega: sha,
    })
}

impl LatticeCohomology {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("Lattice of rank {} over {}.\n\n", self.rank, self.group);
        out.push_str("| subgroup order | rank M^H | H^1 | H^0 (Tate) | H^-1 (Tate) |\n|---|---|---|---|---|\n");
        for r in &self.subgroups {
            out.push_str(&format!("| {} | {} | {} | {} | {} |\n", r.order, r.h0_rank, r.h1, r.tate_h0, r.tate_h_minus1));
        }
        if let Some(h) = &self.h2 {
            out.push_str(&format!("\nH^2(G, M) = {h}\n"));
        }
        if let Some(s) = &self.sha2_omega {
            out.push_str(&format!("Sha^2_omega(G, M) = {s}\n"));
        }
        out.push_str(&format!("\nflabby: {}, coflabby: {}\n", self.flabby, self.coflabby));
        out
    }
}

#[derive(Serialize)]
pub struct LocalOrder {
    pub prime: usize,
    pub order: Int,
}

#[derive(Serialize)]
pub struct PordReport {
    pub group: String,
    pub rank: usize,
    pub pord: Int,
    pub by_resolution: Int,
    pub local: Vec<LocalOrder>,
    pub invertible: bool,
    pub certificate: glattice::rationality::PermutationOrderCertificate,
}

pub fn pord(m: &GLattice, bound: usize) -> Result<PordReport> {
    let fac = permutation_order(m, bound)?;
    let mut primes = prime_factors(m.group().order());
    primes.dedup();
    let local = primes
        .into_iter()
        .map(|p| Ok(LocalOrder { prime: p, order: local_permutation_order(m, p, bound)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(PordReport {
        group: m.group().id().to_string(),
        rank: m.rank(),
        by_resolution: permutation_order_by_resolution(m, bound)?,
        invertible: is_invertible(m, bound)?.invertible,
        pord: fac.order,
        local,
        certificate: glattice::rationality::PermutationOrderCertificate {
            summands: fac.summands,
            into: fac.into,
            out_of: fac.out_of,
        },
    })
}

impl PordReport {
    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "p-ord = {} (resolution route {}), invertible: {}, rank {} over {}.\n\n",
            self.pord, self.by_resolution, self.invertible, self.rank, self.group
        );
        out.push_str("| prime | local order |\n|---|---|\n");
        for l in &self.local {
            out.push_str(&format!("| {} | {} |\n", l.prime, l.order));
        }
        out
    }
}

#[derive(Serialize)]
pub struct SequenceReport {
    pub group: String,
    pub ranks: Vec<usize>,
    pub exact: bool,
    pub failing_node: Option<usize>,
    pub detail: String,
    /// Order of the extension class for an exact short sequence.
    pub order: Option<Int>,
}

pub fn verify_sequence(e: &ExactSequence) -> Result<SequenceReport> {
    let r = e.verify_exactness();
    let order = if r.exact && e.is_short() { Some(extension_order(e)?.order) } else { None };
    Ok(SequenceReport {
        group: e.group().id().to_string(),
        ranks: e.terms.iter().map(|t| t.rank()).collect(),
        exact: r.exact,
        failing_node: r.failing_node,
        detail: r.detail,
        order,
    })
}

impl SequenceReport {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("Sequence over {} with term ranks {:?}.\n\n", self.group, self.ranks);
        match self.failing_node {
            None => out.push_str("exact\n"),
            Some(n) => out.push_str(&format!("not exact at term {n}: {}\n", self.detail)),
        }
        if let Some(o) = &self.order {
            out.push_str(&format!("extension order {o}\n"));
        }
        out
    }
}

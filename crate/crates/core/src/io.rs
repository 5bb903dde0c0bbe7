//! JSON formats for groups, subgroups, lattices, sequences and étale specs.
//!
//! Permutations are written 1-based as image lists. Lattice matrices act on
//! column vectors, one matrix per group generator in the order the
//! generators are listed.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::groups::{direct_product, named, FiniteGroup, Group, GroupHom, Perm, Subgroup};
use crate::lattices::{ExactSequence, GLattice, LatticeMap};
use crate::matrix::Matrix;
use crate::rationality::{EtaleFactor, EtaleSpec};

/// A group by name (`C6`, `S3`, `A4`, `D8`, `Q8`, `C2xC3`, ...) or by
/// generating permutations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl GroupJson {
    pub fn named(name: &str) -> GroupJson {
        GroupJson { name: Some(name.to_string()), ..Default::default() }
    }

    pub fn from_group(g: &FiniteGroup) -> GroupJson {
        GroupJson {
            name: None,
            degree: Some(g.degree()),
            generators: g.generators().iter().map(|p| p.one_based()).collect(),
            id: Some(g.id().to_string()),
        }
    }

    pub fn build(&self) -> Result<Group> {
        if let Some(name) = &self.name {
            if !self.generators.is_empty() || self.degree.is_some() {
                return input("give a group either by name or by generators, not both");
            }
            return group_by_name(name);
        }
        let perms = self.generators.iter().map(|p| Perm::from_one_based(p)).collect::<Result<Vec<_>>>()?;
        let degree = match self.degree {
            Some(d) => d,
            None => perms.first().map(|p| p.degree()).unwrap_or(1),
        };
        if let Some(p) = perms.iter().find(|p| p.degree() != degree) {
            return input(format!("generator of degree {} in a group of degree {degree}", p.degree()));
        }
        let id = self.id.clone().unwrap_or_else(|| "G".to_string());
        FiniteGroup::from_generators(degree, perms, id)
    }
}

fn number(s: &str, token: &str) -> Result<usize> {
    s.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| Error::Input(format!("bad group name {token:?}")))
}

/// Parse names such as `C4`, `S3`, `A4`, `D8` (order 8), `Q8`, `V4` and
/// products joined by `x`.
pub fn group_by_name(name: &str) -> Result<Group> {
    let mut out: Option<Group> = None;
    for token in name.split('x') {
        let token = token.trim();
        let g = match token {
            "Q8" => named::quaternion(),
            "V4" => named::klein_four(),
            _ if token.len() >= 2 => {
                let n = &token[1..];
                match &token[..1] {
                    "C" => named::cyclic(number(n, token)?),
                    "S" => named::symmetric(number(n, token)?),
                    "A" => named::alternating(number(n, token)?),
                    "D" => {
                        let k = number(n, token)?;
                        if k % 2 == 1 || k < 6 {
                            return input(format!("dihedral group {token} must have even order at least 6"));
                        }
                        named::dihedral(k / 2)
                    }
                    _ => return input(format!("unknown group name {token:?}")),
                }
            }
            _ => return input(format!("unknown group name {token:?}")),
        };
        out = Some(match out {
            None => g,
            Some(acc) => direct_product(&acc, &g)?.0,
        });
    }
    out.ok_or_else(|| Error::Input("empty group name".into()))
}

/// `"trivial"`, `"whole"`, a list of generating permutations, or an object
/// with `generators`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupJson {
    Keyword(String),
    Generators(Vec<Vec<usize>>),
    Object { generators: Vec<Vec<usize>> },
}

impl SubgroupJson {
    pub fn from_subgroup(h: &Subgroup) -> SubgroupJson {
        let g = h.parent();
        SubgroupJson::Object { generators: h.generators().iter().map(|&e| g.element(e).one_based()).collect() }
    }

    pub fn build(&self, g: &Group) -> Result<Subgroup> {
        let gens = match self {
            SubgroupJson::Keyword(k) => {
                return match k.as_str() {
                    "trivial" => Ok(g.trivial_subgroup()),
                    "whole" => Ok(g.whole()),
                    _ => input(format!("unknown subgroup keyword {k:?}; use \"trivial\" or \"whole\"")),
                }
            }
            SubgroupJson::Generators(v) | SubgroupJson::Object { generators: v } => v,
        };
        let perms = gens.iter().map(|p| Perm::from_one_based(p)).collect::<Result<Vec<_>>>()?;
        g.subgroup_from_perms(&perms, false)
    }
}

/// A lattice given by the matrices of the group generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub group: GroupJson,
    pub rank: usize,
    pub action: Vec<Matrix>,
}

impl LatticeJson {
    pub fn from_lattice(m: &GLattice) -> LatticeJson {
        LatticeJson {
            group: GroupJson::from_group(m.group()),
            rank: m.rank(),
            action: m.generator_matrices().to_vec(),
        }
    }

    pub fn build(&self) -> Result<GLattice> {
        lattice_on(&self.group.build()?, self.rank, &self.action)
    }
}

fn lattice_on(g: &Group, rank: usize, action: &[Matrix]) -> Result<GLattice> {
    let action: Vec<Matrix> =
        action.iter().map(|m| if rank == 0 { Matrix::zeros(0, 0) } else { m.clone() }).collect();
    GLattice::with_rank(g.clone(), rank, action)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub rank: usize,
    pub action: Vec<Matrix>,
}

/// `0 -> T_0 -> ... -> T_k -> 0` with `maps[i]: T_i -> T_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceJson {
    pub group: GroupJson,
    pub terms: Vec<TermJson>,
    pub maps: Vec<Matrix>,
}

impl SequenceJson {
    pub fn from_sequence(e: &ExactSequence) -> SequenceJson {
        SequenceJson {
            group: GroupJson::from_group(e.group()),
            terms: e
                .terms
                .iter()
                .map(|t| TermJson { rank: t.rank(), action: t.generator_matrices().to_vec() })
                .collect(),
            maps: e.maps.iter().map(|m| m.matrix().clone()).collect(),
        }
    }

    /// Terms are checked to be representations and maps to have the right
    /// shapes; exactness and equivariance are left to the caller.
    pub fn build(&self) -> Result<ExactSequence> {
        let g = self.group.build()?;
        if self.maps.len() + 1 != self.terms.len() {
            return input(format!("{} terms need {} maps, got {}", self.terms.len(), self.terms.len() - 1, self.maps.len()));
        }
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| lattice_on(&g, t.rank, &t.action).map_err(|e| Error::Input(format!("term {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for (i, m) in self.maps.iter().enumerate() {
            let (src, tgt) = (&terms[i], &terms[i + 1]);
            let m = if m.data().is_empty() { Matrix::zeros(tgt.rank(), src.rank()) } else { m.clone() };
            if m.shape() != (tgt.rank(), src.rank()) {
                return input(format!(
                    "map {i} has shape {:?}, expected ({}, {})",
                    m.shape(),
                    tgt.rank(),
                    src.rank()
                ));
            }
            maps.push(LatticeMap::new_unchecked(src.clone(), tgt.clone(), m));
        }
        Ok(ExactSequence { terms, maps })
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorJson {
    pub group: GroupJson,
    pub subgroup: SubgroupJson,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

/// Joint group with, for each factor, the images of the joint generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointJson {
    pub group: GroupJson,
    pub projections: Vec<Vec<Vec<usize>>>,
}

/// Without `joint`, all factors must share one group, which becomes the
/// joint group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub factors: Vec<FactorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<JointJson>,
}

impl SpecJson {
    pub fn build(&self) -> Result<EtaleSpec> {
        let Some(first) = self.factors.first() else {
            return input("a spec needs at least one factor");
        };
        match &self.joint {
            None => {
                let g = first.group.build()?;
                let mut subs = Vec::new();
                for (i, f) in self.factors.iter().enumerate() {
                    if !f.group.build()?.same_as(&g) {
                        return input(format!("factor {} uses a different group; supply a joint group", i + 1));
                    }
                    subs.push((f.subgroup.build(&g)?, f.multiplicity));
                }
                EtaleSpec::over(&g, &subs)
            }
            Some(joint) => {
                let jg = joint.group.build()?;
                if joint.projections.len() != self.factors.len() {
                    return input("one projection per factor is required");
                }
                let mut factors = Vec::new();
                let mut projections = Vec::new();
                for (f, p) in self.factors.iter().zip(&joint.projections) {
                    let g = f.group.build()?;
                    let perms = p.iter().map(|q| Perm::from_one_based(q)).collect::<Result<Vec<_>>>()?;
                    projections.push(GroupHom::from_generator_perms(jg.clone(), g.clone(), &perms)?);
                    factors.push(EtaleFactor {
                        subgroup: f.subgroup.build(&g)?,
                        group: g,
                        multiplicity: f.multiplicity,
                    });
                }
                EtaleSpec::new(factors, jg, projections)
            }
        }
    }
}

/// Parse JSON, reporting the line and column of syntax errors.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("{what}: line {}, column {}: {e}", e.line(), e.column())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{augmentation_sequence, chevalley_lattice};
    use crate::groups::GSet;

    #[test]
    fn names_and_generators() {
        assert_eq!(group_by_name("C6").unwrap().order(), 6);
        assert_eq!(group_by_name("C2xC2").unwrap().order(), 4);
        assert_eq!(group_by_name("D8").unwrap().order(), 8);
        assert_eq!(group_by_name("C3xS3").unwrap().order(), 18);
        assert!(group_by_name("X5").is_err());
        let g = GroupJson { degree: Some(3), generators: vec![vec![2, 3, 1], vec![2, 1, 3]], ..Default::default() };
        assert_eq!(g.build().unwrap().order(), 6);
        let back = GroupJson::from_group(&g.build().unwrap());
        assert_eq!(back.build().unwrap().order(), 6);
    }

    #[test]
    fn lattice_and_sequence_round_trip() {
        let g = named::symmetric(3);
        let h = g.subgroup_from_perms(&[Perm::from_one_based(&[2, 1, 3]).unwrap()], false).unwrap();
        let x = GSet::cosets(&h);
        let j = chevalley_lattice(&x).unwrap();
        let text = serde_json::to_string(&LatticeJson::from_lattice(&j)).unwrap();
        let back: LatticeJson = parse_json(&text, "lattice").unwrap();
        assert!(back.build().unwrap().same_action(&j));
        let e = augmentation_sequence(&x).unwrap();
        let text = serde_json::to_string(&SequenceJson::from_sequence(&e)).unwrap();
        let back: SequenceJson = parse_json(&text, "sequence").unwrap();
        assert!(back.build().unwrap().verify_exactness().exact);
    }

    #[test]
    fn spec_with_and_without_joint() {
        let text = r#"{"factors":[{"group":{"name":"C2xC2"},"subgroup":"trivial"}]}"#;
        let s: SpecJson = parse_json(text, "spec").unwrap();
        assert_eq!(s.build().unwrap().degree(), 4);
        let text = r#"{"factors":[
            {"group":{"name":"C2"},"subgroup":"trivial"},
            {"group":{"name":"C3"},"subgroup":"trivial"}],
          "joint":{"group":{"name":"C6"},"projections":[[[2,1]],[[2,3,1]]]}}"#;
        let s: SpecJson = parse_json(text, "spec").unwrap();
        let spec = s.build().unwrap();
        assert_eq!(spec.gset().unwrap().orbit_sizes(), vec![2, 3]);
        let bad = r#"{"factors":[{"group":{"name":"C2"},"subgroup":"trivial"}],
          "joint":{"group":{"name":"C3"},"projections":[[[2,1]]]}}"#;
        let s: SpecJson = parse_json(bad, "spec").unwrap();
        assert!(s.build().is_err());
        let err = parse_json::<SpecJson>("{\n  \"factors\": [,]\n}", "spec").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
